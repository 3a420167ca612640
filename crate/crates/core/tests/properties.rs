//! Property tests for the invariants of the profile, solver, geometry,
//! boundary, catalog and configuration layers.

use approx::assert_relative_eq;
use proptest::prelude::*;
use xkahler::boundary::gluing_order;
use xkahler::catalog::{coefficients_from_roots, make, FamilyName, FamilySpec};
use xkahler::cli::{Grid, RunConfig, Spacing};
use xkahler::exact::{exact, slope_at_root};
use xkahler::geometry::curvature_sample;
use xkahler::profile::{fmt_sig, Coefficients, Dimension, ModelOptions, ProfileError, ProfileModel};
use xkahler::roots::find_real_roots;
use xkahler::poly::Poly;

fn two() -> Dimension {
    Dimension::new(2).unwrap()
}

fn coefficient() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 3 => -2.0f64..2.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Every admitted window has `H(A) = 0` and `H > 0` inside, and every
    /// classification is a single valid label or a named failure.
    #[test]
    fn windows_and_labels(c0 in coefficient(), c1 in coefficient(), c3 in coefficient(), c4 in coefficient()) {
        let c = Coefficients::new(c0, c1, c3, c4);
        match ProfileModel::new(two(), c, &ModelOptions { window_index: Some(0), ..Default::default() }) {
            Ok(m) => {
                let h = m.profile.h();
                for w in &m.windows {
                    let scale = h.norm_inf() * (1.0 + w.a.abs()).powi(h.degree() as i32);
                    prop_assert!(h.eval(w.a).abs() <= 1e-9 * scale);
                    prop_assert!(h.eval(w.midpoint()) > 0.0);
                }
                match m.classify() {
                    Ok(l) => prop_assert!(l.is_valid()),
                    Err(ProfileError::Unclassifiable { condition }) => prop_assert!(!condition.is_empty()),
                    Err(e) => prop_assert!(false, "unexpected {e}"),
                }
            }
            Err(ProfileError::NoWindow) => {}
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    /// The solution is increasing in `s`, stays in the window and satisfies
    /// the ODE to finite-difference accuracy.
    #[test]
    fn biquard_solution_is_monotone_and_solves_the_ode(beta in 0.2f64..5.0, t in -8.0f64..8.0) {
        let spec = FamilySpec::new(FamilyName::Biquard, two()).with("beta", beta).unwrap();
        let sol = make(&spec).unwrap().solution;
        let h = 1e-5;
        let lo = sol.solve_at_log(t - h).g;
        let mid = sol.solve_at_log(t);
        let hi = sol.solve_at_log(t + h).g;
        prop_assert!(lo <= mid.g && mid.g <= hi);
        prop_assert!(mid.g >= 0.0 && mid.g <= beta);
        let dg_dt = (hi - lo) / (2.0 * h);
        let f = sol.model.f_at(&mid);
        prop_assert!((dg_dt - f).abs() <= 1e-6 * (1.0 + f.abs()));
    }

    /// Roots placed by construction are recovered by the root finder.
    #[test]
    fn roots_round_trip(a in -3.0f64..-0.5, b in 0.5f64..1.5, gap in 0.5f64..2.0) {
        let c = coefficients_from_roots(two(), &[(a, 1), (b, 1), (b + gap, 1)], &[], Some(1), None).unwrap();
        let h = Poly::new(vec![c.c0, c.c1, 1.0, c.c3, c.c4]);
        let r = find_real_roots(&h, 1e-12).unwrap();
        let vals: Vec<f64> = r.roots.iter().map(|x| x.value).collect();
        prop_assert_eq!(vals.len(), 3);
        for (got, want) in vals.iter().zip([a, b, b + gap]) {
            prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
        }
    }

    /// Integer cone parameters are recognised and others are not.
    #[test]
    fn gluing_order_detects_integers(k in 1u32..50, off in 1e-6f64..0.4) {
        prop_assert_eq!(gluing_order(k as f64, 1e-9), Some(k));
        prop_assert_eq!(gluing_order(k as f64 + off, 1e-9), None);
    }

    /// Seventeen significant digits survive a print and parse.
    #[test]
    fn csv_numbers_round_trip(x in proptest::num::f64::NORMAL) {
        prop_assert_eq!(fmt_sig(x, 17).parse::<f64>().unwrap(), x);
    }

    /// The exact slope at a root agrees with the floating point derivative.
    #[test]
    fn exact_slope_matches_float(k in 1u32..20, beta in 0.25f64..4.0) {
        let spec = FamilySpec::new(FamilyName::LeBrunNeg, two())
            .with("k", k as f64).unwrap()
            .with("beta", beta).unwrap();
        let m = make(&spec).unwrap().model;
        let alpha = beta * (1.0 - k as f64);
        let r = exact(beta).unwrap();
        let s = slope_at_root(2, 1, &[exact(alpha).unwrap(), r.clone()], &r).unwrap();
        use num_traits::ToPrimitive;
        assert_relative_eq!(s.to_f64().unwrap(), m.df(beta).unwrap(), max_relative = 1e-12);
    }

    /// Scalar curvature from the affine formula and from the metric agree.
    #[test]
    fn scalar_curvature_routes_agree(alpha in 0.2f64..2.0, ratio in 1.2f64..4.0, t in -6.0f64..6.0) {
        let spec = FamilySpec::new(FamilyName::StrictExtremalPunctured, two())
            .with("alpha", alpha).unwrap()
            .with("beta", alpha * ratio).unwrap();
        let sol = make(&spec).unwrap().solution;
        let c = curvature_sample(&sol, t.exp());
        prop_assert!(c.scalar_curvature_discrepancy() <= 1e-6);
        prop_assert!(c.positive());
    }

    /// A configuration survives a TOML round trip.
    #[test]
    fn config_round_trip(s_min in 1e-6f64..1.0, span in 1.0f64..1e3, samples in 2usize..500, log in any::<bool>(), c4 in -2.0f64..2.0) {
        let cfg = RunConfig {
            coefficients: Some(Coefficients::new(0.0, 0.0, -1.0, c4)),
            grid: Grid {
                s_min,
                s_max: s_min * (1.0 + span),
                samples,
                spacing: if log { Spacing::Log } else { Spacing::Linear },
            },
            ..RunConfig::default()
        };
        prop_assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }
}
