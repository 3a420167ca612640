//! The rational profile `F(g) = H(g) / g^m` of the reduced extremal equation
//! `s g'(s) = F(g(s))`, its roots, admissible window and case classification.

use crate::jet::Jet;
use crate::poly::Poly;
use crate::roots::{find_real_roots, RootError, RootMultiset};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// `|c4|` below this is treated as zero.
pub const C4_ZERO: f64 = 1e-12;

/// Coefficients `c0, c1, c3` below this are treated as zero when branching.
pub const COEFF_ZERO: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("dimension must satisfy n >= 2, got {0}")]
    InvalidDimension(usize),
    #[error("coefficient {name} is not finite")]
    NonFinite { name: &'static str },
    #[error("F is undefined at g = 0 when the denominator exponent is {m}")]
    Domain { m: usize },
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error("no admissible window: the coefficients admit no positive increasing solution")]
    NoWindow,
    #[error("{count} admissible windows exist; select one by index")]
    AmbiguousWindow { count: usize },
    #[error("window index {index} out of range ({count} windows)")]
    WindowIndex { index: usize, count: usize },
    #[error("unclassifiable: {condition}")]
    Unclassifiable { condition: String },
    #[error("point g={0} lies outside the window")]
    OutOfWindow(f64),
}

/// Complex dimension `n >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self, ProfileError> {
        if n < 2 {
            return Err(ProfileError::InvalidDimension(n));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for Dimension {
    type Error = ProfileError;
    fn try_from(n: usize) -> Result<Self, Self::Error> {
        Dimension::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

/// The free constants of the extremal equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub c0: f64,
    pub c1: f64,
    pub c3: f64,
    pub c4: f64,
}

impl Coefficients {
    pub fn new(c0: f64, c1: f64, c3: f64, c4: f64) -> Self {
        Coefficients { c0, c1, c3, c4 }
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        for (name, v) in [("c0", self.c0), ("c1", self.c1), ("c3", self.c3), ("c4", self.c4)] {
            if !v.is_finite() {
                return Err(ProfileError::NonFinite { name });
            }
        }
        Ok(())
    }

    /// The full numerator `c4 x^{n+2} + c3 x^{n+1} + x^n + c1 x + c0`.
    pub fn numerator(&self, n: Dimension) -> Poly {
        let n = n.get();
        let mut c = vec![0.0; n + 3];
        c[0] = self.c0;
        c[1] = self.c1;
        c[n] = 1.0;
        c[n + 1] = self.c3;
        c[n + 2] = if self.c4.abs() < C4_ZERO { 0.0 } else { self.c4 };
        Poly::new(c)
    }

    pub fn c4_is_zero(&self) -> bool {
        self.c4.abs() < C4_ZERO
    }

    pub fn smooth_origin(&self) -> bool {
        self.c0 == 0.0 && self.c1 == 0.0
    }
}

/// `F(g) = H(g) / g^m` after cancelling common powers of `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfilePolynomial {
    n: Dimension,
    h: Poly,
    m: usize,
}

/// Builds `H` and `m` from the coefficients.
pub fn build_profile(n: Dimension, c: &Coefficients) -> ProfilePolynomial {
    let num = c.numerator(n);
    let j = num.low_order_zeros().min(n.get() - 1);
    let h = Poly::new(num.coeffs()[j..].to_vec());
    ProfilePolynomial {
        n,
        h,
        m: n.get() - 1 - j,
    }
}

impl ProfilePolynomial {
    pub fn n(&self) -> Dimension {
        self.n
    }

    pub fn h(&self) -> &Poly {
        &self.h
    }

    /// Denominator exponent `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    fn check_domain(&self, g: f64) -> Result<(), ProfileError> {
        if g == 0.0 && self.m > 0 {
            return Err(ProfileError::Domain { m: self.m });
        }
        Ok(())
    }

    /// `F(g)`.
    pub fn eval(&self, g: f64) -> Result<f64, ProfileError> {
        self.check_domain(g)?;
        Ok(self.h.eval(g) / g.powi(self.m as i32))
    }

    /// `F'(g)` by the quotient rule.
    pub fn eval_derivative(&self, g: f64) -> Result<f64, ProfileError> {
        self.check_domain(g)?;
        let (h, dh) = self.h.eval_with_derivative(g);
        if self.m == 0 {
            return Ok(dh);
        }
        let m = self.m as i32;
        Ok(dh / g.powi(m) - m as f64 * h / g.powi(m + 1))
    }

    /// `F''(g)`.
    pub fn eval_second_derivative(&self, g: f64) -> Result<f64, ProfileError> {
        self.check_domain(g)?;
        let (h, dh) = self.h.eval_with_derivative(g);
        let ddh = self.h.derivative().derivative().eval(g);
        if self.m == 0 {
            return Ok(ddh);
        }
        let m = self.m as i32;
        let mf = m as f64;
        Ok(ddh / g.powi(m) - 2.0 * mf * dh / g.powi(m + 1)
            + mf * (mf + 1.0) * h / g.powi(m + 2))
    }

    /// Taylor jet of `F` composed with the jet `g`.
    pub fn jet(&self, g: &Jet) -> Jet {
        let num = g.compose_poly(&self.h);
        if self.m == 0 {
            num
        } else {
            num.div(&g.powi(self.m))
        }
    }
}

/// `F(g)`; see [`ProfilePolynomial::eval`].
pub fn eval_profile(p: &ProfilePolynomial, g: f64) -> Result<f64, ProfileError> {
    p.eval(g)
}

/// `F'(g)`; see [`ProfilePolynomial::eval_derivative`].
pub fn eval_profile_derivative(p: &ProfilePolynomial, g: f64) -> Result<f64, ProfileError> {
    p.eval_derivative(g)
}

/// `(slope, intercept)` with `R = slope * g + intercept`.
pub fn scalar_curvature_affine_coeffs(n: Dimension, c: &Coefficients) -> (f64, f64) {
    let n = n.get() as f64;
    (-(n + 2.0) * (n + 1.0) * c.c4, -(n + 1.0) * n * c.c3)
}

/// Range `(A, B)` of an admissible solution; `b` is `f64::INFINITY` when unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmissibleWindow {
    pub a: f64,
    pub b: f64,
    /// Multiplicity of `A` as a root of `H`.
    pub a_multiplicity: usize,
    /// Multiplicity of `B` as a root of `H`, zero when `B` is infinite.
    pub b_multiplicity: usize,
}

impl AdmissibleWindow {
    pub fn is_bounded(&self) -> bool {
        self.b.is_finite()
    }

    pub fn contains(&self, g: f64) -> bool {
        g > self.a && g < self.b
    }

    /// Canonical interior point: the midpoint, or `A + 1` when unbounded.
    pub fn midpoint(&self) -> f64 {
        if self.is_bounded() {
            0.5 * (self.a + self.b)
        } else {
            self.a + 1.0
        }
    }
}

impl fmt::Display for AdmissibleWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bounded() {
            write!(f, "({}, {})", fmt_sig(self.a, 12), fmt_sig(self.b, 12))
        } else {
            write!(f, "({}, inf)", fmt_sig(self.a, 12))
        }
    }
}

/// Shortest decimal form of `x` rounded to `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x);
    let v = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{v}")
}

/// All admissible windows of `H`, ascending.
pub fn admissible_windows(p: &ProfilePolynomial, r: &RootMultiset) -> Vec<AdmissibleWindow> {
    let h = p.h();
    let mut out = Vec::new();
    let roots = &r.roots;
    for (i, ra) in roots.iter().enumerate() {
        if ra.value < 0.0 {
            continue;
        }
        if let Some(rb) = roots.get(i + 1) {
            let mid = 0.5 * (ra.value + rb.value);
            if h.eval(mid) > 0.0 {
                out.push(AdmissibleWindow {
                    a: ra.value,
                    b: rb.value,
                    a_multiplicity: ra.multiplicity,
                    b_multiplicity: rb.multiplicity,
                });
            }
        } else if h.lead() > 0.0 && h.degree() <= p.m() + 1 {
            out.push(AdmissibleWindow {
                a: ra.value,
                b: f64::INFINITY,
                a_multiplicity: ra.multiplicity,
                b_multiplicity: 0,
            });
        }
    }
    out
}

/// The admissible window, using `select` when several exist.
pub fn admissible_window(
    p: &ProfilePolynomial,
    r: &RootMultiset,
    select: Option<usize>,
) -> Result<AdmissibleWindow, ProfileError> {
    let all = admissible_windows(p, r);
    match (all.len(), select) {
        (0, _) => Err(ProfileError::NoWindow),
        (count, Some(index)) => all
            .get(index)
            .copied()
            .ok_or(ProfileError::WindowIndex { index, count }),
        (1, None) => Ok(all[0]),
        (count, None) => Err(ProfileError::AmbiguousWindow { count }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theorem {
    SmoothCn,
    ScalarFlatC2,
    PositiveCscKC2,
    ExtremalC2,
}

impl Theorem {
    pub fn case_count(self) -> u8 {
        match self {
            Theorem::ExtremalC2 => 13,
            _ => 4,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Theorem::SmoothCn => "SmoothCn",
            Theorem::ScalarFlatC2 => "ScalarFlatC2",
            Theorem::PositiveCscKC2 => "PositiveCscKC2",
            Theorem::ExtremalC2 => "ExtremalC2",
        };
        f.write_str(s)
    }
}

/// A case of one of the four classification theorems.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CaseLabel {
    pub theorem: Theorem,
    pub case_index: u8,
    pub descriptor: String,
}

impl CaseLabel {
    /// Builds a label, panicking on a pair outside the published case ranges.
    pub fn new(theorem: Theorem, case_index: u8) -> Self {
        assert!(
            (1..=theorem.case_count()).contains(&case_index),
            "{theorem} has no case {case_index}"
        );
        CaseLabel {
            theorem,
            case_index,
            descriptor: descriptor(theorem, case_index).to_string(),
        }
    }

    pub fn is_valid(&self) -> bool {
        (1..=self.theorem.case_count()).contains(&self.case_index)
    }

    /// Same theorem and case, ignoring the descriptor.
    pub fn same_case(&self, other: &CaseLabel) -> bool {
        self.theorem == other.theorem && self.case_index == other.case_index
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} case {} ({})", self.theorem, self.case_index, self.descriptor)
    }
}

fn descriptor(t: Theorem, i: u8) -> &'static str {
    match (t, i) {
        (Theorem::SmoothCn, 1) => "cscK: Euclidean or Fubini-Study",
        (Theorem::SmoothCn, 2) => "Biquard family",
        (Theorem::SmoothCn, 3) => "weighted projective family",
        (Theorem::SmoothCn, 4) => "Gauduchon cone family",
        (Theorem::ScalarFlatC2, 1) => "Euclidean",
        (Theorem::ScalarFlatC2, 2) => "Burns family",
        (Theorem::ScalarFlatC2, 3) => "LeBrun family",
        (Theorem::ScalarFlatC2, 4) => "double root, complete at both ends",
        (Theorem::PositiveCscKC2, 1) => "Fubini-Study",
        (Theorem::PositiveCscKC2, 2) => "Hirzebruch cone family",
        (Theorem::PositiveCscKC2, 3) => "three simple roots",
        (Theorem::PositiveCscKC2, 4) => "double root at A, positive bundle family",
        (Theorem::ExtremalC2, 1) => "smooth extension to C2",
        (Theorem::ExtremalC2, 2) => "cscK with a singular origin",
        (Theorem::ExtremalC2, 3) => "roots (a,b,b), window (a,b)",
        (Theorem::ExtremalC2, 4) => "cubic, window between the two largest roots",
        (Theorem::ExtremalC2, 5) => "cubic, window between the two smallest roots",
        (Theorem::ExtremalC2, 6) => "double roots at both ends",
        (Theorem::ExtremalC2, 7) => "roots (a,a,b,c), window (a,b)",
        (Theorem::ExtremalC2, 8) => "roots (a,a,b,c), window (b,c)",
        (Theorem::ExtremalC2, 9) => "roots (a,b,b,c), window (b,c)",
        (Theorem::ExtremalC2, 10) => "roots (a,b,c,c), window (b,c)",
        (Theorem::ExtremalC2, 11) => "four simple roots, window (b,c)",
        (Theorem::ExtremalC2, 12) => "four simple roots, window (c,d)",
        (Theorem::ExtremalC2, 13) => "two real roots and a complex pair",
        _ => "unknown",
    }
}

fn unclassifiable(condition: impl Into<String>) -> ProfileError {
    ProfileError::Unclassifiable {
        condition: condition.into(),
    }
}

fn is_zero(v: f64) -> bool {
    v.abs() < COEFF_ZERO
}

/// Position of the window endpoints among the distinct real roots.
fn window_positions(w: &AdmissibleWindow, r: &RootMultiset) -> (Option<usize>, Option<usize>) {
    let find = |v: f64| r.roots.iter().position(|x| x.value == v);
    let ia = find(w.a);
    let ib = if w.is_bounded() { find(w.b) } else { None };
    (ia, ib)
}

/// Assigns the unique theorem case realized by a model with window `w`.
pub fn classify(
    n: Dimension,
    c: &Coefficients,
    w: &AdmissibleWindow,
    r: &RootMultiset,
) -> Result<CaseLabel, ProfileError> {
    let (slope, intercept) = scalar_curvature_affine_coeffs(n, c);
    let pattern = r.pattern();
    let (ia, ib) = window_positions(w, r);
    let pairs = r.complex_pairs.len();
    let c0z = is_zero(c.c0);
    let c1z = is_zero(c.c1);
    let nn = n.get();

    if c.c4_is_zero() {
        if intercept < -COEFF_ZERO {
            return Err(unclassifiable(format!(
                "negative constant scalar curvature R = {} admits no solution",
                fmt_sig(intercept, 12)
            )));
        }
        if nn >= 3 {
            if c0z && c1z {
                return Ok(CaseLabel::new(Theorem::SmoothCn, 1));
            }
            return Err(unclassifiable(
                "no classification for n >= 3 with a singular origin (c0, c1) != 0",
            ));
        }
        let flat = is_zero(c.c3);
        let _ = slope;
        if flat {
            if c0z && c1z {
                return Ok(CaseLabel::new(Theorem::ScalarFlatC2, 1));
            }
            if c0z {
                if w.a > 0.0 && !w.is_bounded() && pattern == [1] {
                    return Ok(CaseLabel::new(Theorem::ScalarFlatC2, 2));
                }
                return Err(unclassifiable("scalar-flat with c0 = 0 requires alpha = -c1 > 0"));
            }
            return match (pattern.as_slice(), ia) {
                ([1, 1], Some(1)) if !w.is_bounded() => Ok(CaseLabel::new(Theorem::ScalarFlatC2, 3)),
                ([2], Some(0)) if !w.is_bounded() && w.a > 0.0 => {
                    Ok(CaseLabel::new(Theorem::ScalarFlatC2, 4))
                }
                _ => Err(unclassifiable(
                    "scalar-flat quadratic must have real roots alpha < beta with window (beta, inf) or a double root",
                )),
            };
        }
        // Positive constant scalar curvature.
        if c0z && c1z {
            return Ok(CaseLabel::new(Theorem::PositiveCscKC2, 1));
        }
        if c0z {
            return match (pattern.as_slice(), ia, ib) {
                ([1, 1], Some(0), Some(1)) if w.a > 0.0 => {
                    Ok(CaseLabel::new(Theorem::PositiveCscKC2, 2))
                }
                _ => Err(unclassifiable(
                    "positive cscK quadratic needs two simple roots 0 < alpha < beta",
                )),
            };
        }
        return match (pattern.as_slice(), ia, ib) {
            ([1, 1, 1], Some(1), Some(2)) => Ok(CaseLabel::new(Theorem::PositiveCscKC2, 3)),
            ([2, 1], Some(0), Some(1)) => Ok(CaseLabel::new(Theorem::PositiveCscKC2, 4)),
            _ => Err(unclassifiable(
                "positive cscK cubic must be (alpha,beta,gamma) with window (beta,gamma) or (alpha,alpha,beta) with window (alpha,beta)",
            )),
        };
    }

    if c0z && c1z {
        if w.a != 0.0 {
            return Err(unclassifiable(
                "c0 = c1 = 0 with A > 0 forces c4 < 0, contradicting c4 = 1/(AB) > 0",
            ));
        }
        // Roots of g (c4 g^2 + c3 g + 1) with the zero root at ia.
        return match (pattern.as_slice(), ia) {
            ([1, 2], Some(0)) => Ok(CaseLabel::new(Theorem::SmoothCn, 2)),
            ([1, 1, 1], Some(1)) => Ok(CaseLabel::new(Theorem::SmoothCn, 3)),
            ([1, 1, 1], Some(0)) => Ok(CaseLabel::new(Theorem::SmoothCn, 4)),
            _ => Err(unclassifiable(
                "c4 g^2 + c3 g + 1 must have a double positive root, roots gamma < 0 < beta, or 0 < beta < gamma",
            )),
        };
    }

    if nn >= 3 {
        return Err(unclassifiable(
            "no classification for n >= 3 with a singular origin (c0, c1) != 0",
        ));
    }

    if c0z {
        // Cubic c4 g^3 + c3 g^2 + g + c1.
        return match (pattern.as_slice(), ia, ib) {
            ([1, 2], Some(0), Some(1)) => Ok(CaseLabel::new(Theorem::ExtremalC2, 3)),
            ([1, 1, 1], Some(1), Some(2)) if c.c4 < 0.0 => {
                Ok(CaseLabel::new(Theorem::ExtremalC2, 4))
            }
            ([1, 1, 1], Some(0), Some(1)) if c.c4 > 0.0 => {
                Ok(CaseLabel::new(Theorem::ExtremalC2, 5))
            }
            ([3], _, _) => Err(unclassifiable(
                "triple root forces B = inf, impossible for degree reasons",
            )),
            ([2, 1], _, _) => Err(unclassifiable(
                "roots (alpha,alpha,beta) force c4 (alpha^2 + 2 alpha beta) = 1 with c4 < 0",
            )),
            _ => Err(unclassifiable("cubic root pattern admits no solution")),
        };
    }

    // Quartic c4 g^4 + c3 g^3 + g^2 + c1 g + c0 over g.
    match (pattern.as_slice(), pairs, ia, ib) {
        ([2, 2], 0, Some(0), Some(1)) => Ok(CaseLabel::new(Theorem::ExtremalC2, 6)),
        ([2, 1, 1], 0, Some(0), Some(1)) => Ok(CaseLabel::new(Theorem::ExtremalC2, 7)),
        ([2, 1, 1], 0, Some(1), Some(2)) => Ok(CaseLabel::new(Theorem::ExtremalC2, 8)),
        ([1, 2, 1], 0, Some(1), Some(2)) => Ok(CaseLabel::new(Theorem::ExtremalC2, 9)),
        ([1, 1, 2], 0, Some(1), Some(2)) => Ok(CaseLabel::new(Theorem::ExtremalC2, 10)),
        ([1, 1, 1, 1], 0, Some(1), Some(2)) if c.c4 > 0.0 => {
            Ok(CaseLabel::new(Theorem::ExtremalC2, 11))
        }
        ([1, 1, 1, 1], 0, Some(2), Some(3)) if c.c4 < 0.0 => {
            Ok(CaseLabel::new(Theorem::ExtremalC2, 12))
        }
        ([1, 1, 1, 1], 0, Some(0), Some(1)) => Err(unclassifiable(
            "window (alpha,beta) of four simple roots makes all roots positive, contradicting c4 < 0",
        )),
        ([1, 1], 1, Some(0), Some(1)) => Ok(CaseLabel::new(Theorem::ExtremalC2, 13)),
        ([3, 1], _, _, _) | ([1, 3], _, _, _) => Err(unclassifiable(
            "a triple root leaves no admissible window",
        )),
        ([] | [1] | [2], _, _, _) => Err(unclassifiable("at most one real root forces B = inf")),
        _ => Err(unclassifiable("quartic root pattern admits no solution")),
    }
}

/// A point of the window with accurate distances to both endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub g: f64,
    /// `g - A`.
    pub d_lo: f64,
    /// `B - g`, infinite when `B` is.
    pub d_hi: f64,
}

impl ProfilePoint {
    pub fn from_lower(w: &AdmissibleWindow, delta: f64) -> Self {
        let g = w.a + delta;
        ProfilePoint {
            g,
            d_lo: delta,
            d_hi: w.b - g,
        }
    }

    pub fn from_upper(w: &AdmissibleWindow, delta: f64) -> Self {
        let g = w.b - delta;
        ProfilePoint {
            g,
            d_lo: g - w.a,
            d_hi: delta,
        }
    }

    pub fn from_g(w: &AdmissibleWindow, g: f64) -> Self {
        ProfilePoint {
            g,
            d_lo: g - w.a,
            d_hi: w.b - g,
        }
    }

    /// Distance to the nearer endpoint, capped at one.
    pub fn endpoint_scale(&self) -> f64 {
        self.d_lo.min(self.d_hi).min(1.0)
    }

    /// Relative disagreement of two points in the distance to the endpoint
    /// nearer to `self`.
    pub fn relative_discrepancy(&self, other: &ProfilePoint) -> f64 {
        let (d, e) = if self.d_lo <= self.d_hi {
            (self.d_lo, other.d_lo)
        } else {
            (self.d_hi, other.d_hi)
        };
        if d == e {
            0.0
        } else {
            (d - e).abs() / d.abs().max(e.abs())
        }
    }
}

/// `H` expanded at a root: `H(root ± d) = d^k P(d)`.
#[derive(Clone, Debug, PartialEq)]
struct EndpointExpansion {
    k: usize,
    p: Poly,
}

impl EndpointExpansion {
    fn new(h: &Poly, root: f64, k: usize, upward: bool) -> Self {
        let mut shifted = h.taylor_shift(root);
        if !upward {
            shifted = shifted.reflect();
        }
        let c = shifted.coeffs();
        let p = Poly::new(c[k.min(c.len() - 1)..].to_vec());
        EndpointExpansion { k, p }
    }

    fn eval(&self, d: f64) -> f64 {
        d.powi(self.k as i32) * self.p.eval(d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelOptions {
    pub root_tol: f64,
    /// Which window to use when several exist.
    pub window_index: Option<usize>,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            root_tol: 1e-12,
            window_index: None,
        }
    }
}

/// Coefficients together with the derived profile, roots and window.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileModel {
    pub n: Dimension,
    pub coeffs: Coefficients,
    pub profile: ProfilePolynomial,
    pub roots: RootMultiset,
    pub windows: Vec<AdmissibleWindow>,
    pub window: AdmissibleWindow,
    lower: EndpointExpansion,
    upper: Option<EndpointExpansion>,
}

impl ProfileModel {
    pub fn new(n: Dimension, coeffs: Coefficients, opts: &ModelOptions) -> Result<Self, ProfileError> {
        coeffs.validate()?;
        let profile = build_profile(n, &coeffs);
        let roots = find_real_roots(profile.h(), opts.root_tol)?;
        let windows = admissible_windows(&profile, &roots);
        let window = admissible_window(&profile, &roots, opts.window_index)?;
        let lower = EndpointExpansion::new(profile.h(), window.a, window.a_multiplicity, true);
        let upper = window
            .is_bounded()
            .then(|| EndpointExpansion::new(profile.h(), window.b, window.b_multiplicity, false));
        Ok(ProfileModel {
            n,
            coeffs,
            profile,
            roots,
            windows,
            window,
            lower,
            upper,
        })
    }

    pub fn classify(&self) -> Result<CaseLabel, ProfileError> {
        classify(self.n, &self.coeffs, &self.window, &self.roots)
    }

    pub fn affine_curvature(&self) -> (f64, f64) {
        scalar_curvature_affine_coeffs(self.n, &self.coeffs)
    }

    /// `F` at a window point, evaluated in the chart of the nearer endpoint so
    /// that small values keep full relative precision.
    pub fn f_at(&self, p: &ProfilePoint) -> f64 {
        let m = self.profile.m() as i32;
        let h = if p.d_lo <= p.d_hi {
            self.lower.eval(p.d_lo)
        } else {
            match &self.upper {
                Some(u) => u.eval(p.d_hi),
                None => self.profile.h().eval(p.g),
            }
        };
        h / p.g.powi(m)
    }

    pub fn f(&self, g: f64) -> Result<f64, ProfileError> {
        self.profile.eval(g)
    }

    pub fn df(&self, g: f64) -> Result<f64, ProfileError> {
        self.profile.eval_derivative(g)
    }

    pub fn d2f(&self, g: f64) -> Result<f64, ProfileError> {
        self.profile.eval_second_derivative(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn build_profile_examples() {
        let p = build_profile(dim(2), &Coefficients::default());
        assert_eq!(p.h(), &Poly::new(vec![0.0, 1.0]));
        assert_eq!(p.m(), 0);
        let p = build_profile(dim(2), &Coefficients::new(0.0, 0.0, -1.0, 0.0));
        assert_eq!(p.h(), &Poly::new(vec![0.0, 1.0, -1.0]));
        assert_eq!(p.m(), 0);
        let p = build_profile(dim(3), &Coefficients::new(1.0, 0.0, 0.0, 1.0));
        assert_eq!(p.h(), &Poly::new(vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0]));
        assert_eq!(p.m(), 2);
        let p = build_profile(dim(2), &Coefficients::new(0.0, -1.0, 0.5, 0.0));
        assert_eq!(p.h(), &Poly::new(vec![-1.0, 1.0, 0.5]));
        assert_eq!(p.m(), 0);
    }

    #[test]
    fn dimension_rejects_one() {
        assert!(Dimension::new(1).is_err());
    }

    #[test]
    fn biquard_values() {
        let p = build_profile(dim(2), &Coefficients::new(0.0, 0.0, -2.0, 1.0));
        assert!((eval_profile(&p, 0.5).unwrap() - 0.125).abs() < 1e-15);
        assert!((eval_profile_derivative(&p, 0.5).unwrap() + 0.25).abs() < 1e-15);
        // F'' = 6g - 4 at g = 0.5
        assert!((p.eval_second_derivative(0.5).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn eguchi_hanson_derivative() {
        // (g+1)(g-1)/g: c0 = -1, c1 = 0
        let p = build_profile(dim(2), &Coefficients::new(-1.0, 0.0, 0.0, 0.0));
        assert_eq!(p.m(), 1);
        assert!((eval_profile_derivative(&p, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(p.eval(0.0), Err(ProfileError::Domain { m: 1 })));
    }

    #[test]
    fn windows_of_examples() {
        let cases: [(Poly, usize, (f64, f64)); 3] = [
            (Poly::from_roots(1.0, &[0.0, 1.0, 1.0]), 0, (0.0, 1.0)),
            (Poly::new(vec![-1.0, 1.0]), 0, (1.0, f64::INFINITY)),
            (Poly::from_roots(-1.0, &[0.0, 1.0, 2.0]), 0, (1.0, 2.0)),
        ];
        for (h, m, (a, b)) in cases {
            let p = ProfilePolynomial { n: dim(2), h, m };
            let r = find_real_roots(p.h(), 1e-12).unwrap();
            let w = admissible_window(&p, &r, None).unwrap();
            assert!((w.a - a).abs() < 1e-10 && (w.b == b || (w.b - b).abs() < 1e-10));
        }
    }

    #[test]
    fn negative_csck_has_no_window() {
        let c = Coefficients::new(0.0, 0.0, 1.0, 0.0);
        assert_eq!(
            ProfileModel::new(dim(2), c, &ModelOptions::default()).unwrap_err(),
            ProfileError::NoWindow
        );
    }

    #[test]
    fn affine_curvature_examples() {
        assert_eq!(
            scalar_curvature_affine_coeffs(dim(2), &Coefficients::new(0.0, 0.0, -1.0, 0.0)),
            (0.0, 6.0)
        );
        assert_eq!(
            scalar_curvature_affine_coeffs(dim(2), &Coefficients::new(0.0, 0.0, -2.0, 1.0)),
            (-12.0, 12.0)
        );
    }

    #[test]
    fn classify_examples() {
        let lab = |c: Coefficients| {
            ProfileModel::new(dim(2), c, &ModelOptions::default())
                .unwrap()
                .classify()
                .unwrap()
        };
        assert!(lab(Coefficients::default()).same_case(&CaseLabel::new(Theorem::ScalarFlatC2, 1)));
        assert!(lab(Coefficients::new(0.0, 0.0, -2.0, 1.0))
            .same_case(&CaseLabel::new(Theorem::SmoothCn, 2)));
        assert!(lab(Coefficients::new(-1.0, 0.0, 0.0, 0.0))
            .same_case(&CaseLabel::new(Theorem::ScalarFlatC2, 3)));
        assert_eq!(
            lab(Coefficients::new(0.0, 0.0, -2.0, 1.0)).to_string(),
            "SmoothCn case 2 (Biquard family)"
        );
    }

    #[test]
    fn accurate_evaluation_near_endpoints() {
        // F = -(g-1)(g-3)/4 has F(1 + d) = d (2 - d)/4 exactly.
        let c = Coefficients::new(0.0, -0.75, -0.25, 0.0);
        let m = ProfileModel::new(dim(2), c, &ModelOptions::default()).unwrap();
        assert_eq!(m.window.a, 1.0);
        let d = 1e-13;
        let f = m.f_at(&ProfilePoint::from_lower(&m.window, d));
        assert!((f / (d * (2.0 - d) / 4.0) - 1.0).abs() < 1e-12);
        let f = m.f_at(&ProfilePoint::from_upper(&m.window, d));
        assert!((f / (d * (2.0 - d) / 4.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fmt_sig_rounds() {
        assert_eq!(fmt_sig(1.0, 12), "1");
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(0.1, 17), "0.1");
        assert_eq!(fmt_sig(-0.0, 12), "0");
    }
}
