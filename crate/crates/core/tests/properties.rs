use approx::assert_relative_eq;
use proptest::prelude::*;
use weighted_diffusion::checks::{
    check_monotone_quantities, log_grid, validate_envelope, validate_inverse_scaling, validate_lambda_bounds,
    validate_sandwich, zygmund_inverse_asymptotics,
};
use weighted_diffusion::measure::RadialMeasure;
use weighted_diffusion::{Equation, Weight};

fn weights() -> Vec<Weight> {
    vec![
        Weight::power(0.3).unwrap(),
        Weight::power(0.5).unwrap(),
        Weight::power(0.9).unwrap(),
        Weight::zygmund(0.5, 1.0, 2.0).unwrap(),
    ]
}

#[test]
fn decaying_tail_oracle() {
    // ∫₁^∞ r^{−2} e^{−√r} dr for N = 3, p = 2.
    let w = Weight::power(0.5).unwrap();
    let m = RadialMeasure::decaying_tail(&w, 3, 2.0);
    let v = m.integrate(|_| 1.0, 1.0, f64::INFINITY).unwrap().value;
    assert_relative_eq!(v, 0.21938393439552027, max_relative = 1e-10);
}

#[test]
fn zygmund_g_oracle() {
    let w = Weight::zygmund(0.5, 1.0, 2.0).unwrap();
    assert_relative_eq!(w.g(2.0), 1.9605162869370944, max_relative = 1e-15);
}

#[test]
fn zygmund_inverse_table() {
    let taus = [1e2f64, 1e4, 1e6, 1e8];
    let rows = zygmund_inverse_asymptotics(0.5, 1.0, 2.0, &taus).unwrap();
    let inverses = [
        304.93164670863879,
        569396.88918298752,
        2164267996.7022678,
        11084099207617.708,
    ];
    let a = [
        2.5867464344153575,
        1.9320859461577980,
        1.6523608899289855,
        1.5044291749177200,
    ];
    for (i, row) in rows.iter().enumerate() {
        assert_relative_eq!(row.inverse, inverses[i], max_relative = 1e-11);
        assert_relative_eq!(row.a, a[i], max_relative = 1e-11);
    }
    for pair in rows.windows(2) {
        assert!((pair[1].a - 1.0).abs() < (pair[0].a - 1.0).abs());
    }
}

#[test]
fn weight_battery_passes() {
    let grid = log_grid(1e-3, 1e6, 300);
    let zs = log_grid(1e-2, 1e3, 40);
    let lambdas: Vec<f64> = log_grid(0.01, 100.0, 21).into_iter().filter(|&l| l != 1.0).collect();
    let eq = Equation::new(3, 2.0, 2.0).unwrap();
    for w in weights() {
        assert!(validate_envelope(&w, &grid).passed(), "{}", w.label());
        assert!(validate_sandwich(&w, &grid).unwrap().passed(), "{}", w.label());
        assert!(validate_lambda_bounds(&w, &grid).unwrap().passed(), "{}", w.label());
        assert!(
            validate_inverse_scaling(&w, &zs, &lambdas).unwrap().passed(),
            "{}",
            w.label()
        );
        for rep in check_monotone_quantities(&w, &eq, &log_grid(1e-2, 1e5, 120)).unwrap() {
            assert!(rep.passed(), "{}: {:?}", w.label(), rep);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sandwich_and_lambda_bounds(log_s in -6.0f64..12.0, which in 0usize..4) {
        let w = &weights()[which];
        let s = 10f64.powf(log_s);
        let (a1, a2) = (w.alpha1(), w.alpha2());
        let prim = w.primitive(s).unwrap();
        let gs = w.g(s) * s;
        let tol = 1e-10;
        prop_assert!(prim >= gs / (a2 + 1.0) * (1.0 - tol));
        prop_assert!(prim <= gs / (a1 + 1.0) * (1.0 + tol));
        let lam = w.lambda(s).unwrap();
        let g_over_s = w.g(s) / s;
        prop_assert!(lam >= a1 / (a1 + 1.0) * g_over_s * (1.0 - tol));
        prop_assert!(lam <= a2 / (a2 + 1.0) * g_over_s * (1.0 + tol));
    }

    #[test]
    fn inverse_scaling(log_z in -2.0f64..6.0, log_l in -2.0f64..2.0, which in 0usize..4) {
        let w = &weights()[which];
        let (z, l) = (10f64.powf(log_z), 10f64.powf(log_l));
        prop_assume!((l - 1.0).abs() > 1e-9);
        let base = w.invert_g(z).unwrap();
        let scaled = w.invert_g(z * l).unwrap();
        let (e1, e2) = (1.0 / w.alpha1(), 1.0 / w.alpha2());
        let (lo, hi) = if l > 1.0 { (base * l.powf(e2), base * l.powf(e1)) } else { (base * l.powf(e1), base * l.powf(e2)) };
        prop_assert!(scaled >= lo * (1.0 - 1e-10) && scaled <= hi * (1.0 + 1e-10));
    }

    #[test]
    fn measure_additive_and_monotone(a in 0.0f64..3.0, d1 in 0.01f64..3.0, d2 in 0.01f64..3.0, which in 0usize..4) {
        let w = &weights()[which];
        let m = RadialMeasure::growing(w, 3);
        let (b, c) = (a + d1, a + d1 + d2);
        let ab = m.integrate(|_| 1.0, a, b).unwrap().value;
        let bc = m.integrate(|_| 1.0, b, c).unwrap().value;
        let ac = m.integrate(|_| 1.0, a, c).unwrap().value;
        prop_assert!(((ab + bc) - ac).abs() <= 1e-10 * ac);
        prop_assert!(ac > ab && ab > 0.0);
    }
}
