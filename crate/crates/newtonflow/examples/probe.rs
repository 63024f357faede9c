// Scratch exploration binary; not part of the deliverable.
use newtonflow::*;

fn main() {
    let cubic = builtin_problem(BuiltinId::Cubic);
    let newton = Preconditioner::NewtonInverse;
    let cfg = SolverConfig::default();

    // near-root adaptive solve
    let out = solve_adaptive(&cubic, &newton, &[1.0 + 1e-3, 0.0], &cfg);
    println!(
        "near-root: status={:?} iters={} steps={:?}",
        out.status,
        out.trace.len(),
        out.trace.steps.iter().map(|s| (s.step, s.rejections)).collect::<Vec<_>>()
    );

    // quadratic convergence ratios from within 1e-3
    for id in BuiltinId::ALL {
        let p = builtin_problem(id);
        for (ri, root) in p.known_roots().iter().enumerate() {
            let x0: Vec<f64> = vec![root[0] + 7e-4, root[1] - 6e-4];
            let out = solve_adaptive(&p, &newton, &x0, &cfg);
            let mut errs: Vec<f64> = out
                .trace
                .steps
                .iter()
                .map(|s| linalg::distance(&s.iterate, root))
                .collect();
            errs.push(linalg::distance(&out.final_iterate, root));
            let ratios: Vec<f64> = errs
                .windows(2)
                .filter(|w| w[0] > 1e-7)
                .map(|w| w[1] / (w[0] * w[0]))
                .collect();
            let all_t1 = out.trace.steps.iter().all(|s| s.step == 1.0 && s.rejections == 0);
            println!(
                "{:?} root {}: status={:?} iters={} all_t1={} ratios={:?}",
                id, ri, out.status, out.trace.len(), all_t1, ratios
            );
        }
    }

    // oracle from (0.08, 0.55) on the cubic
    let label = attractor_oracle(&cubic, &[0.08, 0.55], &OracleConfig::default());
    println!("oracle (0.08,0.55) -> {label:?} (expect Some(1) = (-1/2, +sqrt3/2))");

    // compare counts from (0.08, 0.55)
    let ad = solve_adaptive(&cubic, &newton, &[0.08, 0.55], &cfg);
    println!(
        "adaptive from (0.08,0.55): status={:?} iters={} root={:?}",
        ad.status,
        ad.trace.len(),
        ad.matched_root
    );
    let fx = solve_fixed_step(&cubic, &newton, &[0.08, 0.55], 1e-2, &cfg);
    println!("fixed 1e-2: status={:?} iters={}", fx.status, fx.trace.len());

    // error-indicator order at (0.08, 0.55)
    let x0 = [0.08, 0.55];
    for t in [1e-1, 1e-2, 1e-3] {
        let trial = trial_step(&cubic, &newton, &x0, t).unwrap();
        let traj = integrate_reference(&cubic, &x0, t / 100.0, t).unwrap();
        let x_t = traj.final_point();
        let dev = linalg::distance(x_t, &trial.x_projected);
        let q = (dev - t * trial.gamma).abs() / (t * t * t);
        println!(
            "t={t:e}: gamma={:.6e} dev={dev:.6e} t*gamma={:.6e} q={q:.6e}",
            trial.gamma,
            t * trial.gamma
        );
    }

    // residual law on cubic from (2,0)
    let traj = integrate_reference(&cubic, &[2.0, 0.0], 1e-3, 5.0).unwrap();
    let f0 = linalg::norm(&cubic.eval_f(&[2.0, 0.0]).unwrap());
    let mut max_rel = 0.0f64;
    for (t, x) in &traj.samples {
        let fx = linalg::norm(&cubic.eval_f(x).unwrap());
        let expect = f0 * (-t).exp();
        max_rel = max_rel.max((fx - expect).abs() / expect);
    }
    println!("residual law max rel dev = {max_rel:.3e} (end={:?})", traj.end);

    // coarse basin stats
    let t0 = std::time::Instant::now();
    let grid_c = sample_grid(
        &cubic,
        SolverKind::FixedStep(1.0),
        cubic.domain(),
        60,
        60,
        &cfg,
    )
    .unwrap();
    let grid_a = sample_grid(&cubic, SolverKind::Adaptive, cubic.domain(), 60, 60, &cfg).unwrap();
    let oracle = oracle_labels(&cubic, cubic.domain(), 60, 60, &OracleConfig::default()).unwrap();
    let sc = convergence_stats(&grid_c, "fixed:1", Criterion::CorrectAttractor, Some(&oracle))
        .unwrap();
    let sa = convergence_stats(&grid_a, "adaptive", Criterion::CorrectAttractor, Some(&oracle))
        .unwrap();
    println!(
        "cubic 60x60 correct: classical={:.2}% adaptive={:.2}%  ({:?})",
        sc.percent_convergent,
        sa.percent_convergent,
        t0.elapsed()
    );

    let expsin = builtin_problem(BuiltinId::ExpSin);
    let t0 = std::time::Instant::now();
    let grid_c = sample_grid(
        &expsin,
        SolverKind::FixedStep(1.0),
        expsin.domain(),
        50,
        50,
        &cfg,
    )
    .unwrap();
    let grid_a =
        sample_grid(&expsin, SolverKind::Adaptive, expsin.domain(), 50, 50, &cfg).unwrap();
    let oracle =
        oracle_labels(&expsin, expsin.domain(), 50, 50, &OracleConfig::default()).unwrap();
    let sc = convergence_stats(&grid_c, "fixed:1", Criterion::CorrectAttractor, Some(&oracle))
        .unwrap();
    let sa = convergence_stats(&grid_a, "adaptive", Criterion::CorrectAttractor, Some(&oracle))
        .unwrap();
    println!(
        "expsin 50x50 correct: classical={:.2}% adaptive={:.2}%  ({:?})",
        sc.percent_convergent,
        sa.percent_convergent,
        t0.elapsed()
    );

    let unique = builtin_problem(BuiltinId::UniqueRoot);
    let t0 = std::time::Instant::now();
    let grid_c = sample_grid(
        &unique,
        SolverKind::FixedStep(1.0),
        unique.domain(),
        60,
        60,
        &cfg,
    )
    .unwrap();
    let grid_a =
        sample_grid(&unique, SolverKind::Adaptive, unique.domain(), 60, 60, &cfg).unwrap();
    let sc = convergence_stats(&grid_c, "fixed:1", Criterion::PlainConvergence, None).unwrap();
    let sa = convergence_stats(&grid_a, "adaptive", Criterion::PlainConvergence, None).unwrap();
    println!(
        "unique 60x60 plain: classical={:.2}% adaptive={:.2}%  ({:?})",
        sc.percent_convergent,
        sa.percent_convergent,
        t0.elapsed()
    );
}
