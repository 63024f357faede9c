// Scratch: protocol sensitivity of the ExpSin adaptive percentage.
use newtonflow::*;

fn main() {
    let p = builtin_problem(BuiltinId::ExpSin);
    let res = 100;
    let oracle = oracle_labels(&p, p.domain(), res, res, &OracleConfig::default()).unwrap();
    let n_none = oracle.iter().filter(|l| l.is_none()).count();
    println!(
        "oracle: {} labeled, {} none ({:.2}%)",
        oracle.len() - n_none,
        n_none,
        100.0 * n_none as f64 / oracle.len() as f64
    );

    for tau in [0.01, 0.05, 0.1] {
        let cfg = SolverConfig {
            tau,
            ..SolverConfig::default()
        };
        let grid = sample_grid(&p, SolverKind::Adaptive, p.domain(), res, res, &cfg).unwrap();
        let s = convergence_stats(&grid, "adaptive", Criterion::CorrectAttractor, Some(&oracle))
            .unwrap();
        println!(
            "tau={tau}: adaptive correct = {:.3}%  failures={:?} wrong={}",
            s.percent_convergent, s.failure_counts, s.wrong_attractor
        );
    }

    // classical at tau irrelevant; rerun for reference
    let cfg = SolverConfig::default();
    let grid = sample_grid(&p, SolverKind::FixedStep(1.0), p.domain(), res, res, &cfg).unwrap();
    let s = convergence_stats(&grid, "fixed:1", Criterion::CorrectAttractor, Some(&oracle)).unwrap();
    println!("classical correct = {:.3}%", s.percent_convergent);

    // how much does n_max matter for adaptive at tau=0.01?
    for n_max in [50usize, 200, 400] {
        let cfg = SolverConfig {
            n_max,
            ..SolverConfig::default()
        };
        let grid = sample_grid(&p, SolverKind::Adaptive, p.domain(), res, res, &cfg).unwrap();
        let s = convergence_stats(&grid, "adaptive", Criterion::CorrectAttractor, Some(&oracle))
            .unwrap();
        println!(
            "n_max={n_max}: adaptive correct = {:.3}%  failures={:?} wrong={}",
            s.percent_convergent, s.failure_counts, s.wrong_attractor
        );
    }
}
