use weighted_diffusion::fit::linear_fit;
use weighted_diffusion::solver::{GridSpec, InitialProfile, Solver, WeightMode};
use weighted_diffusion::{Config, Equation, Trajectory, Weight};

fn weighted(n_cells: usize, r_max: f64, t_end: f64, height: f64) -> Config {
    Config::new(
        Equation::new(3, 2.0, 2.0).unwrap(),
        WeightMode::Weighted(Weight::power(0.5).unwrap()),
        GridSpec {
            r_max,
            n_cells,
            stretch: 1.0,
        },
        InitialProfile::Bump { radius: 1.0, height },
        t_end,
    )
}

fn run(config: Config) -> Trajectory {
    Solver::new(config).unwrap().run().unwrap()
}

fn sup_exponent(traj: &Trajectory, t_lo: f64) -> f64 {
    let rows: Vec<_> = traj.rows.iter().filter(|r| r.t >= t_lo).collect();
    let x: Vec<f64> = rows.iter().map(|r| r.t.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.sup_u.ln()).collect();
    linear_fit(&x, &y).unwrap().0
}

#[test]
fn barenblatt_calibration() {
    // Porous medium with g = 0: sup u ~ t^{−N/(N(m−1)+2)}.
    for (n, cells, r_max, t_end) in [(1u32, 400usize, 64.0, 1e4), (2, 300, 32.0, 1e4), (3, 300, 32.0, 1e4)] {
        let mut config = Config::new(
            Equation::calibration(n, 2.0, 2.0).unwrap(),
            WeightMode::Unweighted,
            GridSpec {
                r_max,
                n_cells: cells,
                stretch: 1.0,
            },
            InitialProfile::Bump {
                radius: 1.0,
                height: 1.0,
            },
            t_end,
        )
        .with_log_outputs(1e-2, 10);
        config.allow_unweighted = true;
        let traj = run(config);
        let expected = -(n as f64) / (n as f64 + 2.0);
        let slope = sup_exponent(&traj, t_end / 10.0);
        assert!(
            ((slope - expected) / expected).abs() < 0.1,
            "N = {n}: slope {slope} vs {expected}"
        );
        assert!(traj.max_mass_drift() < 1e-6);
    }
}

#[test]
fn weighted_run_invariants() {
    let traj = run(weighted(400, 64.0, 1e4, 1.0).with_log_outputs(1e-3, 10));
    assert!(traj.max_mass_drift() < 1e-6);
    let dr = 64.0 / 400.0;
    for pair in traj.rows.windows(2) {
        assert!(pair[1].support_radius >= pair[0].support_radius - dr * (1.0 + 1e-12));
    }
    assert!(traj.rows.last().unwrap().support_radius < 64.0);
}

#[test]
fn comparison_in_the_data() {
    let low = run(weighted(200, 32.0, 1e3, 1.0).with_log_outputs(1e-2, 5));
    let high = run(weighted(200, 32.0, 1e3, 2.0).with_log_outputs(1e-2, 5));
    for (a, b) in low.rows.iter().zip(&high.rows) {
        assert!(b.sup_u >= a.sup_u, "t = {}: {} < {}", a.t, b.sup_u, a.sup_u);
    }
}

#[test]
fn grid_convergence() {
    let coarse = run(weighted(200, 32.0, 1e3, 1.0));
    let fine = run(weighted(400, 32.0, 1e3, 1.0));
    let (a, b) = (coarse.rows.last().unwrap().sup_u, fine.rows.last().unwrap().sup_u);
    assert!(((a - b) / b).abs() <= 0.05, "{a} vs {b}");
}

#[test]
fn scaling_coherence() {
    // U(x,t) = λu(x, λ^k t) with k = p + m − 3 = 1 solves the equation with data λu₀.
    let lambda = 3.0;
    let times = weighted_diffusion::solver::log_times(1e-1, 1e3, 4);
    let mut scaled = weighted(400, 64.0, 1e3, lambda);
    scaled.output_times = times.clone();
    let mut base = weighted(400, 64.0, 1e3 * lambda, 1.0);
    base.output_times = times.iter().map(|t| t * lambda).collect();
    let (a, b) = (run(scaled), run(base));
    for (x, y) in a.rows.iter().zip(&b.rows).skip(1) {
        let rel = (x.sup_u - lambda * y.sup_u).abs() / x.sup_u;
        assert!(rel < 0.02, "t = {}: {rel}", x.t);
    }
}

#[test]
fn extension_conserves_mass() {
    let mut config = weighted(200, 8.0, 1e6, 1.0).with_log_outputs(1e-2, 5);
    config.auto_extend = true;
    config.normalize_mass = true;
    let traj = run(config);
    assert!(traj.r_max > 8.0);
    assert!(traj.max_mass_drift() < 1e-12);
}

#[test]
fn restart_from_checkpoint_matches() {
    let mut config = weighted(200, 32.0, 1e2, 1.0);
    config.output_times = vec![1.0, 1e2];
    let whole = run(config.clone());

    let mut first = config.clone();
    first.t_end = 1.0;
    first.output_times = vec![1.0];
    let mut solver = Solver::new(first).unwrap();
    let mut state = solver.initial_state().unwrap();
    solver.run_from(&mut state).unwrap();
    let mut text = Vec::new();
    solver.checkpoint(&state).write_text(&mut text).unwrap();

    let mut second = Solver::new(config).unwrap();
    let cp = weighted_diffusion::solver::Checkpoint::read_text(&text[..]).unwrap();
    let mut resumed = second.restore(&cp).unwrap();
    let tail = second.run_from(&mut resumed).unwrap();
    let (a, b) = (whole.rows.last().unwrap(), tail.rows.last().unwrap());
    assert_eq!(a.t, b.t);
    assert!(((a.sup_u - b.sup_u) / a.sup_u).abs() < 1e-12);
}
