//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion
//! and fails if any criterion fails.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use xkahler::boundary::{
    distance_by_log_s, endpoint_behavior, fit_asymptotics, geodesic_distance, AsymptoticLaw, End,
    EndpointKind, GLUE_TOL,
};
use xkahler::catalog::{default_entries, make, representatives, FamilyName, FamilySpec};
use xkahler::cli::{run_sweep, SweepConfig, SweepOutcome};
use xkahler::exact::{closing_checks, pos_csck_params_exact, pos_csck_printed_relation};
use xkahler::geometry::{
    bisectional_positive_test, curvature_sample, extremal_residual, extremal_residual_perturbed,
    log_grid, BisectionalCondition,
};
use xkahler::ode::DpOptions;
use xkahler::profile::{Dimension, ModelOptions, ProfileModel};
use xkahler::solver::{ode_oracle_points, Anchor, ProfileSolution};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn two() -> Dimension {
    Dimension::new(2).unwrap()
}

fn grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 200)
}

fn family(name: FamilyName, params: &[(&str, f64)]) -> ProfileSolution {
    let mut spec = FamilySpec::new(name, two());
    for (k, v) in params {
        spec = spec.with(k, *v).unwrap();
    }
    make(&spec).unwrap().solution
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let reps = representatives().unwrap();
    let grid = grid();
    let mut worst = (0.0f64, String::new());
    let mut extremal_cases = Vec::new();
    for r in &reps {
        let model = ProfileModel::new(r.n, r.coefficients, &ModelOptions::default()).unwrap();
        let sol = ProfileSolution::new(&model, Anchor::canonical(&model.window)).unwrap();
        let oracle = ode_oracle_points(&model, sol.anchor, &grid, &DpOptions::default()).unwrap();
        for (&s, o) in grid.iter().zip(&oracle) {
            // Relative error in the distance to the nearer window endpoint.
            let p = sol.solve_point(s);
            let (d, e) = if p.d_lo <= p.d_hi { (p.d_lo, o.d_lo) } else { (p.d_hi, o.d_hi) };
            let err = (d - e).abs() / d;
            if err > worst.0 {
                worst = (err, format!("{} at s={s:e}", r.name));
            }
        }
        if r.expected.theorem == xkahler::profile::Theorem::ExtremalC2 {
            extremal_cases.push(r.expected.case_index);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let covers = [6, 11, 13].iter().all(|c| extremal_cases.contains(c));
    outcome(
        reps.len() >= 10 && covers && worst.0 <= 1e-7 && elapsed < 10.0,
        format!(
            "{} representatives, max relative error in nearer-endpoint distance {:.2e} ({}), {:.2} s",
            reps.len(),
            worst.0,
            worst.1,
            elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let fs = family(FamilyName::FubiniStudy, &[]);
    let eu = family(FamilyName::Euclidean, &[]);
    let grid = grid();
    let fs_err = grid
        .iter()
        .map(|&s| (curvature_sample(&fs, s).r_direct - 6.0).abs())
        .fold(0.0, f64::max);
    let eu_err = grid
        .iter()
        .map(|&s| curvature_sample(&eu, s).r_direct.abs())
        .fold(0.0, f64::max);
    outcome(
        fs_err <= 1e-8 && eu_err <= 1e-10,
        format!("max |R_FS - 6| = {fs_err:.2e}, max |R_Euclid| = {eu_err:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let grid = grid();
    let mut worst = (0.0f64, String::new());
    let entries = default_entries().unwrap();
    for e in &entries {
        for &s in &grid {
            let d = curvature_sample(&e.solution, s).scalar_curvature_discrepancy();
            if !(d <= worst.0) {
                worst = (d, format!("{} n={}", e.spec.name, e.spec.n.get()));
            }
        }
    }
    outcome(
        worst.0 <= 1e-6,
        format!(
            "{} models, max |R_affine - R_direct|/(1+|R|) = {:.2e} ({})",
            entries.len(),
            worst.0,
            worst.1
        ),
    )
}

fn criterion_4() -> Outcome {
    let h = 1e-4;
    let grid = grid();
    let mut worst: f64 = 0.0;
    for e in default_entries().unwrap() {
        let sol = &e.solution;
        let log_gp = |t: f64| {
            let p = sol.solve_at_log(t);
            (sol.model.f_at(&p) / t.exp()).ln()
        };
        for &s in &grid {
            let t = s.ln();
            let xi_def = -(log_gp(t + h) - log_gp(t - h)) / (2.0 * h);
            let g = sol.solve(s);
            let xi_closed = 1.0 - sol.model.df(g).unwrap();
            worst = worst.max((xi_def - xi_closed).abs());
        }
    }
    let bq = family(FamilyName::Biquard, &[("beta", 1.0)]);
    let bq_err = grid
        .iter()
        .map(|&s| {
            let c = curvature_sample(&bq, s);
            (c.xi - c.g * (4.0 - 3.0 * c.g)).abs()
        })
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-5 && bq_err <= 1e-9,
        format!("max |xi_fd - (1-F')| = {worst:.2e}, Biquard max |xi - g(4-3g)| = {bq_err:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let bq = bisectional_positive_test(&family(FamilyName::Biquard, &[]));
    let eu = bisectional_positive_test(&family(FamilyName::Euclidean, &[]));
    let fs = bisectional_positive_test(&family(FamilyName::FubiniStudy, &[]));
    let bq_ok = !bq.positive
        && bq.witness.is_some_and(|w| {
            w.condition == BisectionalCondition::XiIncreasing && (w.g - 2.0 / 3.0).abs() <= 1e-2
        });
    let describe = |v: &xkahler::geometry::BisectionalVerdict| match v.witness {
        Some(w) => format!("{:?} at g={:.4}", w.condition, w.g),
        None => "no witness".into(),
    };
    outcome(
        bq_ok && !eu.positive && !fs.positive,
        format!(
            "Biquard: {}; Euclidean: {}; FS: {}",
            describe(&bq),
            describe(&eu),
            describe(&fs)
        ),
    )
}

fn criterion_6() -> Outcome {
    let cases = [
        ("HirzebruchCscKCone(1,3)", family(FamilyName::HirzebruchCscKCone, &[("alpha", 1.0), ("beta", 3.0)])),
        ("GauduchonCone(1,2)", family(FamilyName::GauduchonCone, &[("beta", 1.0), ("gamma", 2.0)])),
        ("LeBrunNeg(3)", family(FamilyName::LeBrunNeg, &[("k", 3.0)])),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, sol) in &cases {
        let w = sol.window();
        let mut ends = vec![];
        if w.a_multiplicity == 1 {
            ends.push((End::Origin, w.a));
        }
        if w.is_bounded() && w.b_multiplicity == 1 {
            ends.push((End::Infinity, w.b));
        }
        for (end, root) in ends {
            let exact = sol.model.df(root).unwrap().abs();
            let fit = match fit_asymptotics(sol, end).unwrap().law {
                AsymptoticLaw::PowerLaw { theta, .. } => theta,
                _ => f64::NAN,
            };
            let err = (fit - exact).abs();
            ok &= err <= 1e-3;
            parts.push(format!("{name} {end}: fit {fit:.6} vs {exact:.6}"));
        }
    }
    outcome(ok && parts.len() == 5, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let checks = [
        FamilySpec::named("EguchiHanson", two()).unwrap(),
        FamilySpec::named("Burns", two()).unwrap(),
        FamilySpec::new(FamilyName::WeightedProjective, two()),
        FamilySpec::new(FamilyName::StrictExtremalNegBundle, two()),
        FamilySpec::new(FamilyName::PosCscKOnPosBundle, two()),
    ];
    for spec in &checks {
        for c in closing_checks(spec).unwrap() {
            if c.root == num_rational::BigRational::from_integer(0.into()) {
                continue;
            }
            ok &= c.holds();
            parts.push(format!(
                "{} F'({}) = {} vs {} [{}]",
                c.family,
                c.root,
                c.value,
                c.target,
                if c.holds() { "exact" } else { "VIOLATED" }
            ));
        }
    }
    let (a, b) = pos_csck_params_exact(1);
    parts.push(format!(
        "(alpha,beta) = ({a},{b}), (beta-alpha)^2/(beta^2(beta+2alpha)) = {}",
        pos_csck_printed_relation(&a, &b)
    ));
    outcome(ok, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for a in [0.5, 1.0, 2.0] {
        let sol = family(FamilyName::FubiniStudy, &[("a", a)]);
        let d = geodesic_distance(&sol, 0.0, f64::INFINITY).unwrap();
        worst = worst.max((d - FRAC_PI_2).abs());
        parts.push(format!("a={a}: {d:.12}"));
    }
    outcome(
        worst <= 1e-6,
        format!("{} (max error {worst:.2e})", parts.join(", ")),
    )
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let bq = family(FamilyName::Biquard, &[]);
    let bq_end = endpoint_behavior(&bq, End::Infinity, GLUE_TOL).unwrap();
    let bq_dist = geodesic_distance(&bq, 1.0, f64::INFINITY).unwrap();
    ok &= bq_end.kind == EndpointKind::CompleteEnd && bq_dist.is_infinite();
    parts.push(format!("Biquard infinity {:?} distance {bq_dist}", bq_end.kind));
    let sep = family(FamilyName::StrictExtremalPunctured, &[]);
    for end in [End::Origin, End::Infinity] {
        let b = endpoint_behavior(&sep, end, GLUE_TOL).unwrap();
        ok &= b.kind == EndpointKind::CompleteEnd;
        parts.push(format!("Punctured {end} {:?}", b.kind));
    }
    let d0 = geodesic_distance(&sep, 0.0, 1.0).unwrap();
    let d1 = geodesic_distance(&sep, 1.0, f64::INFINITY).unwrap();
    ok &= d0.is_infinite() && d1.is_infinite();

    let mut simple = 0;
    let mut worst: f64 = 0.0;
    for e in default_entries().unwrap() {
        let sol = &e.solution;
        let w = sol.window();
        let ta = sol.anchor.s.ln();
        if w.a_multiplicity == 1 {
            let theta = sol.model.df(w.a).unwrap().abs();
            let d = geodesic_distance(sol, 0.0, sol.anchor.s).unwrap();
            let q = distance_by_log_s(sol, ta - 80.0 / theta, ta).unwrap();
            ok &= d.is_finite();
            worst = worst.max((d - q).abs());
            simple += 1;
        }
        if w.is_bounded() && w.b_multiplicity == 1 {
            let theta = sol.model.df(w.b).unwrap().abs();
            let d = geodesic_distance(sol, sol.anchor.s, f64::INFINITY).unwrap();
            let q = distance_by_log_s(sol, ta, ta + 80.0 / theta).unwrap();
            ok &= d.is_finite();
            worst = worst.max((d - q).abs());
            simple += 1;
        }
    }
    ok &= worst <= 1e-4;
    parts.push(format!(
        "{simple} simple-root ends finite, max |closed - log-s quadrature| = {worst:.2e}"
    ));
    outcome(ok, parts.join("; "))
}

fn criterion_10() -> Outcome {
    let grid = grid();
    let mut worst = (0.0f64, String::new());
    for e in default_entries().unwrap() {
        let r = extremal_residual(&e.solution, &grid);
        if !(r <= worst.0) {
            worst = (r, format!("{} n={}", e.spec.name, e.spec.n.get()));
        }
    }
    let control = extremal_residual_perturbed(&family(FamilyName::Biquard, &[]), &grid, 1.01);
    outcome(
        worst.0 <= 1e-8 && control >= 1e-2,
        format!(
            "max residual {:.2e} ({}), perturbed Biquard control {control:.3e}",
            worst.0, worst.1
        ),
    )
}

fn criterion_11() -> Outcome {
    let n = two();
    let cfg = SweepConfig::default();
    let records = run_sweep(n, &cfg, 1e-12);
    let (mut labeled, mut failures, mut negative, mut lemma) = (0usize, 0usize, 0usize, 0usize);
    for r in &records {
        match &r.outcome {
            SweepOutcome::Labeled(ls) => {
                let model = ProfileModel::new(
                    n,
                    r.coeffs,
                    &ModelOptions {
                        window_index: Some(0),
                        ..ModelOptions::default()
                    },
                )
                .unwrap();
                if ls.len() != model.windows.len() || ls.iter().any(|(_, l)| !l.is_valid()) {
                    failures += 1;
                }
                let (slope, intercept) = model.affine_curvature();
                let h = model.profile.h();
                for (w, _) in ls {
                    labeled += 1;
                    let scale = h.norm_inf() * (1.0 + w.a.abs()).powi(h.degree() as i32);
                    let samples: Vec<f64> = (1..=1000)
                        .map(|i| {
                            let u = i as f64 / 1001.0;
                            if w.is_bounded() {
                                w.a + (w.b - w.a) * u
                            } else {
                                w.a + u / (1.0 - u)
                            }
                        })
                        .collect();
                    if h.eval(w.a).abs() > 1e-9 * scale || samples.iter().any(|&g| h.eval(g) <= 0.0)
                    {
                        lemma += 1;
                    }
                    if r.coeffs.c0 == 0.0
                        && r.coeffs.c1 == 0.0
                        && samples.iter().all(|&g| slope * g + intercept < 0.0)
                    {
                        negative += 1;
                    }
                }
            }
            SweepOutcome::Unclassifiable { condition, .. } => {
                if condition.is_empty() {
                    failures += 1;
                }
            }
            SweepOutcome::NoWindow => {}
            SweepOutcome::Failure(_) => failures += 1,
        }
    }
    outcome(
        failures == 0 && negative == 0 && lemma == 0,
        format!(
            "{} tuples, {labeled} labelled windows, {failures} failures, {negative} negative-R smooth-origin windows, {lemma} window-condition violations",
            records.len()
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("oracle equivalence", criterion_1),
        ("cscK constancy", criterion_2),
        ("scalar curvature double derivation", criterion_3),
        ("xi closed form", criterion_4),
        ("bisectional curvature witnesses", criterion_5),
        ("cone angle recovery", criterion_6),
        ("exact closing conditions", criterion_7),
        ("Fubini-Study diameter", criterion_8),
        ("completeness verdicts", criterion_9),
        ("extremality residual", criterion_10),
        ("property sweep", criterion_11),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{verdict}] {name}: {}", i + 1, o.detail);
        if !o.passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
