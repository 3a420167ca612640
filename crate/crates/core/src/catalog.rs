//! Named metric families, each returning a calibrated model together with
//! the theorem case it is expected to realise.

use crate::poly::Poly;
use crate::profile::{
    CaseLabel, Coefficients, Dimension, ModelOptions, ProfileError, ProfileModel, Theorem,
};
use crate::solver::{Anchor, ProfileSolution, SolverError};
use nalgebra::{Matrix4, Vector4};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("family {family} has no parameter '{param}'")]
    UnknownParameter { family: FamilyName, param: String },
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("no parameters found: {0}")]
    NoSolutionFound(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyName {
    Euclidean,
    FubiniStudy,
    Biquard,
    WeightedProjective,
    GauduchonCone,
    LeBrunNeg,
    HirzebruchCscKCone,
    PosCscKOnPosBundle,
    StrictExtremalNegBundle,
    StrictExtremalPunctured,
    HirzebruchExtremal,
}

impl FamilyName {
    pub const ALL: [FamilyName; 11] = [
        FamilyName::Euclidean,
        FamilyName::FubiniStudy,
        FamilyName::Biquard,
        FamilyName::WeightedProjective,
        FamilyName::GauduchonCone,
        FamilyName::LeBrunNeg,
        FamilyName::HirzebruchCscKCone,
        FamilyName::PosCscKOnPosBundle,
        FamilyName::StrictExtremalNegBundle,
        FamilyName::StrictExtremalPunctured,
        FamilyName::HirzebruchExtremal,
    ];

    /// Parameter names with their default values.
    pub fn default_params(self) -> &'static [(&'static str, f64)] {
        match self {
            FamilyName::Euclidean | FamilyName::FubiniStudy => &[("a", 1.0)],
            FamilyName::Biquard => &[("beta", 1.0)],
            FamilyName::WeightedProjective => &[("k", 2.0), ("gamma", -1.0)],
            FamilyName::GauduchonCone => &[("beta", 1.0), ("gamma", 2.0)],
            FamilyName::LeBrunNeg => &[("k", 2.0), ("beta", 1.0)],
            FamilyName::HirzebruchCscKCone => &[("alpha", 1.0), ("beta", 3.0), ("k", 1.0)],
            FamilyName::PosCscKOnPosBundle => &[("k", 1.0)],
            FamilyName::StrictExtremalNegBundle => &[("k", 1.0), ("beta", 1.0)],
            FamilyName::StrictExtremalPunctured => &[("alpha", 1.0), ("beta", 2.0), ("k", 1.0)],
            FamilyName::HirzebruchExtremal => &[("k", 1.0)],
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for FamilyName {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace(['_', '-'], "");
        FamilyName::ALL
            .into_iter()
            .find(|f| f.to_string().to_ascii_lowercase() == key)
            .or(match key.as_str() {
                "burns" | "eguchihanson" => Some(FamilyName::LeBrunNeg),
                _ => None,
            })
            .ok_or_else(|| CatalogError::UnknownFamily(s.to_string()))
    }
}

/// A family name with parameter values and dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub name: FamilyName,
    pub params: BTreeMap<String, f64>,
    pub n: Dimension,
}

impl FamilySpec {
    /// The family at its default parameters.
    pub fn new(name: FamilyName, n: Dimension) -> Self {
        FamilySpec {
            name,
            params: name
                .default_params()
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            n,
        }
    }

    /// Parses a family name, applying the fixed `k` of the aliases
    /// `Burns` (`k = 1`) and `EguchiHanson` (`k = 2`).
    pub fn named(name: &str, n: Dimension) -> Result<Self, CatalogError> {
        let fam: FamilyName = name.parse()?;
        let mut spec = FamilySpec::new(fam, n);
        match name.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "burns" => spec.params.insert("k".into(), 1.0),
            "eguchihanson" => spec.params.insert("k".into(), 2.0),
            _ => None,
        };
        Ok(spec)
    }

    pub fn with(mut self, key: &str, value: f64) -> Result<Self, CatalogError> {
        if !self.params.contains_key(key) {
            return Err(CatalogError::UnknownParameter {
                family: self.name,
                param: key.to_string(),
            });
        }
        self.params.insert(key.to_string(), value);
        Ok(self)
    }

    pub fn param(&self, key: &str) -> f64 {
        self.params[key]
    }

    fn positive_integer(&self, key: &str, min: u32) -> Result<u32, CatalogError> {
        let v = self.param(key);
        if v.fract() != 0.0 || v < min as f64 || v > 1e6 {
            return Err(CatalogError::ConstraintViolation(format!(
                "{key} = {v} must be an integer >= {min}"
            )));
        }
        Ok(v as u32)
    }
}

/// A calibrated catalog model.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub spec: FamilySpec,
    pub model: ProfileModel,
    pub solution: ProfileSolution,
    pub expected: CaseLabel,
    /// Gluing integer to use when identifying the completed space.
    pub k_choice: Option<u32>,
}

fn violation(msg: impl Into<String>) -> CatalogError {
    CatalogError::ConstraintViolation(msg.into())
}

fn require(cond: bool, msg: &str) -> Result<(), CatalogError> {
    if cond {
        Ok(())
    } else {
        Err(violation(msg))
    }
}

fn require_n2(spec: &FamilySpec) -> Result<(), CatalogError> {
    require(spec.n.get() == 2, "this family is defined for n = 2 only")
}

/// Coefficients of the profile `F = lead ∏(g - r)^k ∏((g-a)^2 + b^2) / g^m`.
///
/// The leading coefficient is forced by the normalisation of the `g^n` term;
/// when `leading` is given it must agree with that value. When `m` is not
/// given the largest admissible denominator exponent is used.
pub fn coefficients_from_roots(
    n: Dimension,
    real: &[(f64, usize)],
    pairs: &[(f64, f64)],
    m: Option<usize>,
    leading: Option<f64>,
) -> Result<Coefficients, CatalogError> {
    let nn = n.get();
    let mut k = Poly::constant(1.0);
    for &(r, mult) in real {
        require(mult >= 1, "root multiplicities must be at least 1")?;
        for _ in 0..mult {
            k = k.mul(&Poly::new(vec![-r, 1.0]));
        }
    }
    for &(a, b) in pairs {
        require(b > 0.0, "complex pairs need b > 0")?;
        k = k.mul(&Poly::new(vec![a * a + b * b, -2.0 * a, 1.0]));
    }
    let candidates: Vec<usize> = match m {
        Some(m) if m < nn => vec![m],
        Some(m) => return Err(violation(format!("denominator exponent m = {m} exceeds n - 1"))),
        None => (0..nn).rev().collect(),
    };
    for m in candidates {
        let num = k.shift_up(nn - 1 - m);
        let lead_coeff = num.coeff(nn);
        if num.degree() > nn + 2 || lead_coeff == 0.0 {
            continue;
        }
        let norm = num.scale(1.0 / lead_coeff);
        let scale = norm.norm_inf();
        let stray = (2..nn).any(|i| norm.coeff(i).abs() > 1e-12 * scale);
        if stray {
            continue;
        }
        let forced = 1.0 / lead_coeff;
        if let Some(l) = leading {
            if (l - forced).abs() > 1e-9 * forced.abs().max(1.0) {
                return Err(violation(format!(
                    "leading coefficient {l} differs from the value {forced} forced by the g^n normalisation"
                )));
            }
        }
        return Ok(Coefficients {
            c0: norm.coeff(0),
            c1: norm.coeff(1),
            c3: norm.coeff(nn + 1),
            c4: norm.coeff(nn + 2),
        });
    }
    Err(violation(
        "no denominator exponent makes the roots match c4 g^{n+2} + c3 g^{n+1} + g^n + c1 g + c0",
    ))
}

/// `(α, β) = λ (1, 2)` with `λ = v₀ / k`, `v₀ = (β₀-α₀)² / (β₀² (β₀+2α₀)) = 1/16`,
/// which makes `(β-α)² / (β² (β+2α)) = k`.
pub fn solve_pos_csck_params(k: u32) -> (f64, f64) {
    let (a0, b0) = (1.0, 2.0);
    let v0: f64 = (b0 - a0) * (b0 - a0) / (b0 * b0 * (b0 + 2.0 * a0));
    let lambda = v0 / k as f64;
    (lambda * a0, lambda * b0)
}

/// How the two roots below the window of a Hirzebruch extremal profile occur.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OtherRoots {
    Real(f64, f64),
    Complex { a: f64, b: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HirzebruchExtremalParams {
    /// Window `(A, B)`.
    pub a: f64,
    pub b: f64,
    pub coefficients: Coefficients,
    pub other: OtherRoots,
    /// `|F'(A) - k| + |F'(B) + k|`.
    pub residual: f64,
}

/// Window of the Hirzebruch extremal family: `B = 2`, `A = 1/k³`.
pub fn hirzebruch_window(k: u32) -> (f64, f64) {
    (1.0 / (k as f64).powi(3), 2.0)
}

/// Quartic profile `F = (c4 g⁴ + c3 g³ + g² + c1 g + c0)/g` on the window
/// `(A, B)` with `F(A) = F(B) = 0`, `F'(A) = k` and `F'(B) = -k`.
///
/// The four conditions are linear in `(c4, c3, c1, c0)`. The remaining
/// quadratic factor decides between four real roots and a complex pair.
pub fn solve_hirzebruch_extremal_params(k: u32) -> Result<HirzebruchExtremalParams, CatalogError> {
    require(k >= 1, "k must be at least 1")?;
    let (a, b) = hirzebruch_window(k);
    let kf = k as f64;
    let row_p = |x: f64| [x.powi(4), x.powi(3), x, 1.0];
    let row_dp = |x: f64| [4.0 * x.powi(3), 3.0 * x * x, 1.0, 0.0];
    let rows = [row_p(a), row_p(b), row_dp(a), row_dp(b)];
    let mat = Matrix4::from_fn(|i, j| rows[i][j]);
    let rhs = Vector4::new(-a * a, -b * b, kf * a - 2.0 * a, -kf * b - 2.0 * b);
    let sol = mat
        .lu()
        .solve(&rhs)
        .ok_or_else(|| CatalogError::NoSolutionFound("closing conditions are singular".into()))?;
    let c = Coefficients::new(sol[3], sol[2], sol[1], sol[0]);
    let p = Poly::new(vec![c.c0, c.c1, 1.0, c.c3, c.c4]);
    let (q, _) = p.div_rem(&Poly::from_roots(1.0, &[a, b]));
    let (qa, qb, qc) = (q.coeff(2), q.coeff(1), q.coeff(0));
    let disc = qb * qb - 4.0 * qa * qc;
    let other = if disc >= 0.0 {
        let sq = disc.sqrt();
        let r1 = (-qb - qb.signum() * sq) / (2.0 * qa);
        let r2 = qc / (qa * r1);
        OtherRoots::Real(r1.min(r2), r1.max(r2))
    } else {
        OtherRoots::Complex {
            a: -qb / (2.0 * qa),
            b: (-disc).sqrt() / (2.0 * qa.abs()),
        }
    };
    let dp = p.derivative();
    let residual = (dp.eval(a) / a - kf).abs() + (dp.eval(b) / b + kf).abs();
    require(c.c4 < 0.0, "c4 < 0 is needed for F > 0 between the two top roots")?;
    if let OtherRoots::Real(_, r2) = other {
        require(r2 < a, "the remaining real roots must lie below A")?;
    }
    require(
        (1..200).all(|i| p.eval(a + (b - a) * i as f64 / 200.0) > 0.0),
        "F must be positive on (A, B)",
    )?;
    if residual > 1e-10 {
        return Err(CatalogError::NoSolutionFound(format!(
            "closing residual {residual:e} exceeds 1e-10"
        )));
    }
    Ok(HirzebruchExtremalParams {
        a,
        b,
        coefficients: c,
        other,
        residual,
    })
}

/// Builds the model, solution and expected case of a family.
pub fn make(spec: &FamilySpec) -> Result<CatalogEntry, CatalogError> {
    let n = spec.n;
    let nn = n.get();
    let label = |t: Theorem, i: u8| CaseLabel::new(t, i);
    let mut anchor: Option<Anchor> = None;
    let mut k_choice = None;
    let (coeffs, expected) = match spec.name {
        FamilyName::Euclidean => {
            let a = spec.param("a");
            require(a > 0.0, "a > 0")?;
            anchor = Some(Anchor { s: 1.0, g: a });
            let l = if nn == 2 {
                label(Theorem::ScalarFlatC2, 1)
            } else {
                label(Theorem::SmoothCn, 1)
            };
            (Coefficients::default(), l)
        }
        FamilyName::FubiniStudy => {
            let a = spec.param("a");
            require(a > 0.0, "a > 0")?;
            anchor = Some(Anchor {
                s: 1.0,
                g: 1.0 / (1.0 + a),
            });
            let l = if nn == 2 {
                label(Theorem::PositiveCscKC2, 1)
            } else {
                label(Theorem::SmoothCn, 1)
            };
            (Coefficients::new(0.0, 0.0, -1.0, 0.0), l)
        }
        FamilyName::Biquard => {
            let b = spec.param("beta");
            require(b > 0.0, "beta > 0")?;
            (
                Coefficients::new(0.0, 0.0, -2.0 / b, 1.0 / (b * b)),
                label(Theorem::SmoothCn, 2),
            )
        }
        FamilyName::WeightedProjective => {
            let k = spec.positive_integer("k", 2)?;
            let g = spec.param("gamma");
            require(g < 0.0, "gamma < 0")?;
            let b = g.abs() * (k as f64 - 1.0);
            k_choice = Some(k);
            (
                Coefficients::new(0.0, 0.0, -(b + g) / (b * g), 1.0 / (b * g)),
                label(Theorem::SmoothCn, 3),
            )
        }
        FamilyName::GauduchonCone => {
            let (b, g) = (spec.param("beta"), spec.param("gamma"));
            require(0.0 < b && b < g, "0 < beta < gamma")?;
            (
                Coefficients::new(0.0, 0.0, -(b + g) / (b * g), 1.0 / (b * g)),
                label(Theorem::SmoothCn, 4),
            )
        }
        FamilyName::LeBrunNeg => {
            require_n2(spec)?;
            let k = spec.positive_integer("k", 1)?;
            let b = spec.param("beta");
            require(b > 0.0, "beta > 0")?;
            let a = b * (1.0 - k as f64);
            k_choice = Some(k);
            let case = if k == 1 { 2 } else { 3 };
            (
                Coefficients::new(a * b, -(a + b), 0.0, 0.0),
                label(Theorem::ScalarFlatC2, case),
            )
        }
        FamilyName::HirzebruchCscKCone => {
            require_n2(spec)?;
            let (a, b) = (spec.param("alpha"), spec.param("beta"));
            require(0.0 < a && a < b, "0 < alpha < beta")?;
            k_choice = Some(spec.positive_integer("k", 1)?);
            (
                Coefficients::new(0.0, -a * b / (a + b), -1.0 / (a + b), 0.0),
                label(Theorem::PositiveCscKC2, 2),
            )
        }
        FamilyName::PosCscKOnPosBundle => {
            require_n2(spec)?;
            let k = spec.positive_integer("k", 1)?;
            let (a, b) = solve_pos_csck_params(k);
            k_choice = Some(k);
            (
                coefficients_from_roots(n, &[(a, 2), (b, 1)], &[], Some(1), None)?,
                label(Theorem::PositiveCscKC2, 4),
            )
        }
        FamilyName::StrictExtremalNegBundle => {
            require_n2(spec)?;
            let k = spec.positive_integer("k", 1)?;
            let b = spec.param("beta");
            require(b > 0.0, "beta > 0")?;
            let g = 2.0 * b;
            let kf = k as f64;
            let a = (1.0 - 8.0 * kf) / (1.0 + 5.0 * kf) * b;
            require(
                -g * (g + 2.0 * b) / (2.0 * g + b) < a && a < b,
                "-gamma(gamma+2beta)/(2gamma+beta) < alpha < beta",
            )?;
            k_choice = Some(k);
            (
                coefficients_from_roots(n, &[(a, 1), (b, 1), (g, 2)], &[], Some(1), None)?,
                label(Theorem::ExtremalC2, 10),
            )
        }
        FamilyName::StrictExtremalPunctured => {
            require_n2(spec)?;
            let (a, b) = (spec.param("alpha"), spec.param("beta"));
            require(0.0 < a && a < b, "0 < alpha < beta")?;
            k_choice = Some(spec.positive_integer("k", 1)?);
            (
                coefficients_from_roots(n, &[(a, 2), (b, 2)], &[], Some(1), None)?,
                label(Theorem::ExtremalC2, 6),
            )
        }
        FamilyName::HirzebruchExtremal => {
            require_n2(spec)?;
            let k = spec.positive_integer("k", 1)?;
            let p = solve_hirzebruch_extremal_params(k)?;
            k_choice = Some(k);
            let case = match p.other {
                OtherRoots::Real(..) => 12,
                OtherRoots::Complex { .. } => 13,
            };
            (p.coefficients, label(Theorem::ExtremalC2, case))
        }
    };
    let model = ProfileModel::new(n, coeffs, &ModelOptions::default())?;
    let anchor = anchor.unwrap_or_else(|| Anchor::canonical(&model.window));
    let solution = ProfileSolution::new(&model, anchor)?;
    Ok(CatalogEntry {
        spec: spec.clone(),
        model,
        solution,
        expected,
        k_choice,
    })
}

/// Every family at its default parameters in dimension two, plus the
/// families defined in every dimension at `n = 3`.
pub fn default_entries() -> Result<Vec<CatalogEntry>, CatalogError> {
    let two = Dimension::new(2).expect("2 is a valid dimension");
    let three = Dimension::new(3).expect("3 is a valid dimension");
    let mut out = Vec::new();
    for f in FamilyName::ALL {
        out.push(make(&FamilySpec::new(f, two))?);
    }
    for f in [
        FamilyName::Euclidean,
        FamilyName::FubiniStudy,
        FamilyName::Biquard,
        FamilyName::WeightedProjective,
        FamilyName::GauduchonCone,
    ] {
        out.push(make(&FamilySpec::new(f, three))?);
    }
    for name in ["Burns", "EguchiHanson"] {
        out.push(make(&FamilySpec::named(name, two)?)?);
    }
    out.push(make(&FamilySpec::new(FamilyName::LeBrunNeg, two).with("k", 3.0)?)?);
    out.push(make(&FamilySpec::new(FamilyName::GauduchonCone, two))?);
    Ok(out)
}

/// A model realising one theorem case, given by its roots.
#[derive(Clone, Debug, PartialEq)]
pub struct Representative {
    pub name: String,
    pub n: Dimension,
    pub coefficients: Coefficients,
    pub expected: CaseLabel,
}

/// One representative for every case the classifier can return.
pub fn representatives() -> Result<Vec<Representative>, CatalogError> {
    let two = Dimension::new(2).expect("2 is a valid dimension");
    let three = Dimension::new(3).expect("3 is a valid dimension");
    type Roots = &'static [(f64, usize)];
    let specs: [(Theorem, u8, Dimension, Roots, &[(f64, f64)], usize); 23] = [
        (Theorem::SmoothCn, 1, three, &[(0.0, 1), (1.0, 1)], &[], 0),
        (Theorem::SmoothCn, 2, two, &[(0.0, 1), (1.0, 2)], &[], 0),
        (Theorem::SmoothCn, 3, two, &[(-1.0, 1), (0.0, 1), (1.0, 1)], &[], 0),
        (Theorem::SmoothCn, 4, two, &[(0.0, 1), (1.0, 1), (2.0, 1)], &[], 0),
        (Theorem::ScalarFlatC2, 1, two, &[(0.0, 1)], &[], 0),
        (Theorem::ScalarFlatC2, 2, two, &[(1.0, 1)], &[], 0),
        (Theorem::ScalarFlatC2, 3, two, &[(-1.0, 1), (1.0, 1)], &[], 1),
        (Theorem::ScalarFlatC2, 4, two, &[(1.0, 2)], &[], 1),
        (Theorem::PositiveCscKC2, 1, two, &[(0.0, 1), (1.0, 1)], &[], 0),
        (Theorem::PositiveCscKC2, 2, two, &[(1.0, 1), (3.0, 1)], &[], 0),
        (Theorem::PositiveCscKC2, 3, two, &[(-1.0, 1), (1.0, 1), (2.0, 1)], &[], 1),
        (Theorem::PositiveCscKC2, 4, two, &[(1.0, 2), (2.0, 1)], &[], 1),
        (Theorem::ExtremalC2, 3, two, &[(1.0, 1), (2.0, 2)], &[], 0),
        (Theorem::ExtremalC2, 4, two, &[(-1.0, 1), (1.0, 1), (2.0, 1)], &[], 0),
        (Theorem::ExtremalC2, 5, two, &[(1.0, 1), (2.0, 1), (3.0, 1)], &[], 0),
        (Theorem::ExtremalC2, 6, two, &[(1.0, 2), (2.0, 2)], &[], 1),
        (Theorem::ExtremalC2, 7, two, &[(1.0, 2), (2.0, 1), (3.0, 1)], &[], 1),
        (Theorem::ExtremalC2, 8, two, &[(-1.0, 2), (1.0, 1), (2.0, 1)], &[], 1),
        (Theorem::ExtremalC2, 9, two, &[(-2.0, 1), (1.0, 2), (2.0, 1)], &[], 1),
        (Theorem::ExtremalC2, 10, two, &[(-1.0, 1), (1.0, 1), (2.0, 2)], &[], 1),
        (
            Theorem::ExtremalC2,
            11,
            two,
            &[(-1.0, 1), (1.0, 1), (2.0, 1), (3.0, 1)],
            &[],
            1,
        ),
        (
            Theorem::ExtremalC2,
            12,
            two,
            &[(-3.0, 1), (-1.0, 1), (1.0, 1), (2.0, 1)],
            &[],
            1,
        ),
        (Theorem::ExtremalC2, 13, two, &[(1.0, 1), (2.0, 1)], &[(-1.0, 1.0)], 1),
    ];
    specs
        .iter()
        .map(|&(t, i, n, real, pairs, m)| {
            Ok(Representative {
                name: format!("{t} case {i}"),
                n,
                coefficients: coefficients_from_roots(n, real, pairs, Some(m), None)?,
                expected: CaseLabel::new(t, i),
            })
        })
        .collect()
}
