// Scratch: acceptance-resolution basin statistics. Not part of the deliverable.
use newtonflow::*;

fn main() {
    let cfg = SolverConfig::default();
    let ocfg = OracleConfig::default();

    let run = |id: BuiltinId, res: usize, criterion: Criterion| {
        let p = builtin_problem(id);
        let t0 = std::time::Instant::now();
        let grid_c =
            sample_grid(&p, SolverKind::FixedStep(1.0), p.domain(), res, res, &cfg).unwrap();
        let grid_a = sample_grid(&p, SolverKind::Adaptive, p.domain(), res, res, &cfg).unwrap();
        let t_solve = t0.elapsed();
        let oracle = match criterion {
            Criterion::CorrectAttractor => {
                Some(oracle_labels(&p, p.domain(), res, res, &ocfg).unwrap())
            }
            Criterion::PlainConvergence => None,
        };
        let t_oracle = t0.elapsed() - t_solve;
        let sc = convergence_stats(&grid_c, "fixed:1", criterion, oracle.as_deref()).unwrap();
        let sa = convergence_stats(&grid_a, "adaptive", criterion, oracle.as_deref()).unwrap();
        println!(
            "{:?} {res}x{res} {:?}: classical={:.3}% adaptive={:.3}% solve={:?} oracle={:?}",
            id, criterion, sc.percent_convergent, sa.percent_convergent, t_solve, t_oracle
        );
        println!(
            "  classical failures: {:?}  wrong_attractor={}",
            sc.failure_counts, sc.wrong_attractor
        );
        println!(
            "  adaptive  failures: {:?}  wrong_attractor={}",
            sa.failure_counts, sa.wrong_attractor
        );
    };

    run(BuiltinId::ExpSin, 100, Criterion::CorrectAttractor);
    run(BuiltinId::Cubic, 200, Criterion::CorrectAttractor);
    run(BuiltinId::UniqueRoot, 200, Criterion::PlainConvergence);
}
