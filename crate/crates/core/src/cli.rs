//! Command-line front end: a TOML run configuration, six subcommands, CSV
//! tables and `key = value` reports.

use crate::boundary::{boundary_report, BoundaryError, BoundaryReport, EndpointBehavior, GLUE_TOL};
use crate::catalog::{coefficients_from_roots, make, CatalogError, FamilySpec};
use crate::geometry::{curvature_sample, log_grid};
use crate::ode::DpOptions;
use crate::profile::{
    classify, fmt_sig, AdmissibleWindow, CaseLabel, Coefficients, Dimension, ModelOptions,
    ProfileError, ProfileModel,
};
use crate::solver::{ode_oracle_points, Anchor, ProfileSolution, SolverError};
use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Header of the profile and curvature tables.
pub const CSV_COLUMNS: [&str; 9] = [
    "s", "g", "dg", "u_prime", "R", "xi", "A_curv", "B_curv", "C_curv",
];

/// Number of profile columns written by `solve`.
const SOLVE_COLUMNS: usize = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Model(ProfileError),
    #[error("numeric failure in {operation}: {message}")]
    Numeric { operation: &'static str, message: String },
}

impl CliError {
    /// 1 for configuration errors, 2 for models without a window or label,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Model(_) => 2,
            CliError::Numeric { .. } => 3,
        }
    }

    fn numeric(operation: &'static str, e: impl ToString) -> Self {
        CliError::Numeric {
            operation,
            message: e.to_string(),
        }
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::NoWindow | ProfileError::Unclassifiable { .. } => CliError::Model(e),
            ProfileError::Roots(_) | ProfileError::OutOfWindow(_) => {
                CliError::numeric("model construction", e)
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Profile(p) => p.into(),
            CatalogError::Solver(s) => CliError::numeric("solve", s),
            CatalogError::NoSolutionFound(_) => CliError::numeric("family parameters", e),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::OutOfWindow { .. } | SolverError::BadAnchor(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::numeric("solve", e),
        }
    }
}

impl From<BoundaryError> for CliError {
    fn from(e: BoundaryError) -> Self {
        CliError::numeric("boundary", e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    Classify,
    Solve,
    Curvature,
    Boundary,
    Catalog,
    Sweep,
}

#[derive(Debug, Parser)]
#[command(name = "xkahler", version, about = "Rotationally symmetric extremal Kähler profiles")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Subcommand,
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Catalog family, overriding the config input.
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameter as `key=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Output path for the table (`solve`, `curvature`, `catalog`) or the report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    pub dump_config: bool,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("'{v}' is not a number"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootsInput {
    /// Real roots as `[value, multiplicity]`.
    #[serde(default)]
    pub real: Vec<(f64, usize)>,
    /// Complex pairs `a ± ib` as `[a, b]`.
    #[serde(default)]
    pub pairs: Vec<(f64, f64)>,
    /// Power of `g` in the denominator of `F`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Leading coefficient of `F`; checked against the normalisation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leading: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorInput {
    pub s: f64,
    pub g: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    pub s_min: f64,
    pub s_max: f64,
    pub samples: usize,
    pub spacing: Spacing,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            s_min: 0.1,
            s_max: 10.0,
            samples: 100,
            spacing: Spacing::Linear,
        }
    }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => log_grid(self.s_min, self.s_max, self.samples),
            Spacing::Linear => {
                let step = (self.s_max - self.s_min) / (self.samples - 1) as f64;
                (0..self.samples)
                    .map(|i| {
                        if i + 1 == self.samples {
                            self.s_max
                        } else {
                            self.s_min + step * i as f64
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Root isolation tolerance.
    pub root_tol: f64,
    /// Largest admitted disagreement between the closed-form solution and
    /// the ODE integration, relative to the distance to the nearer endpoint.
    pub solve_tol: f64,
    /// Tolerance for recognising an integer gluing order.
    pub glue_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_tol: 1e-12,
            solve_tol: 1e-7,
            glue_tol: GLUE_TOL,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyInput {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub samples: usize,
    pub seed: u64,
    /// Each coefficient is drawn uniformly from `[range[0], range[1]]`.
    pub range: (f64, f64),
    /// Probability that a coefficient is set to exactly zero.
    pub zero_prob: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            samples: 10_000,
            seed: 0,
            range: (-2.0, 2.0),
            zero_prob: 0.25,
        }
    }
}

/// The full run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n: usize,
    /// Index of the admissible window when several exist.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    /// Gluing integer for the identification of the completed space.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_choice: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Coefficients>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roots: Option<RootsInput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyInput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<AnchorInput>,
    pub grid: Grid,
    pub tolerances: Tolerances,
    pub outputs: Outputs,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 2,
            window: None,
            k_choice: None,
            coefficients: None,
            roots: None,
            family: None,
            anchor: None,
            grid: Grid::default(),
            tolerances: Tolerances::default(),
            outputs: Outputs::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serialises")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        let g = &self.grid;
        if !(g.s_min.is_finite() && g.s_max.is_finite() && g.s_min > 0.0 && g.s_min < g.s_max) {
            return bad("grid needs 0 < s_min < s_max");
        }
        if g.samples < 2 {
            return bad("grid needs at least 2 samples");
        }
        let t = &self.tolerances;
        if !([t.root_tol, t.solve_tol, t.glue_tol].iter().all(|v| *v > 0.0)) {
            return bad("tolerances must be positive");
        }
        let inputs = [
            self.coefficients.is_some(),
            self.roots.is_some(),
            self.family.is_some(),
        ];
        if inputs.iter().filter(|b| **b).count() > 1 {
            return bad("give only one of [coefficients], [roots] and [family]");
        }
        let sw = &self.sweep;
        if !(sw.range.0 < sw.range.1 && (0.0..=1.0).contains(&sw.zero_prob)) {
            return bad("sweep needs range[0] < range[1] and 0 <= zero_prob <= 1");
        }
        Ok(())
    }

    fn dimension(&self) -> Result<Dimension, CliError> {
        Dimension::new(self.n).map_err(|e| CliError::Config(e.to_string()))
    }

    fn model_options(&self) -> ModelOptions {
        ModelOptions {
            root_tol: self.tolerances.root_tol,
            window_index: self.window,
        }
    }
}

/// A model with its anchor and gluing choice, resolved from a config.
#[derive(Clone, Debug)]
pub struct ResolvedModel {
    pub solution: ProfileSolution,
    pub k_choice: Option<u32>,
    pub family: Option<String>,
}

impl ResolvedModel {
    pub fn model(&self) -> &ProfileModel {
        &self.solution.model
    }
}

/// Builds the model named by the config's input section.
pub fn resolve_model(cfg: &RunConfig) -> Result<ResolvedModel, CliError> {
    let n = cfg.dimension()?;
    let opts = cfg.model_options();
    if let Some(f) = &cfg.family {
        let mut spec = FamilySpec::named(&f.name, n)?;
        for (k, v) in &f.params {
            spec = spec.with(k, *v)?;
        }
        let entry = make(&spec)?;
        let solution = match cfg.anchor {
            Some(a) => ProfileSolution::new(&entry.model, Anchor { s: a.s, g: a.g })?,
            None => entry.solution,
        };
        return Ok(ResolvedModel {
            solution,
            k_choice: cfg.k_choice.or(entry.k_choice),
            family: Some(entry.spec.name.to_string()),
        });
    }
    let coeffs = match (&cfg.coefficients, &cfg.roots) {
        (Some(c), _) => *c,
        (None, Some(r)) => coefficients_from_roots(n, &r.real, &r.pairs, r.m, r.leading)?,
        (None, None) => {
            return Err(CliError::Config(
                "the config needs [coefficients], [roots] or [family]".into(),
            ))
        }
    };
    let model = ProfileModel::new(n, coeffs, &opts)?;
    let anchor = match cfg.anchor {
        Some(a) => Anchor { s: a.s, g: a.g },
        None => Anchor::canonical(&model.window),
    };
    Ok(ResolvedModel {
        solution: ProfileSolution::new(&model, anchor)?,
        k_choice: cfg.k_choice,
        family: None,
    })
}

fn num(x: f64) -> String {
    fmt_sig(x, 12)
}

/// Window as `(a,b)` with report precision.
pub fn format_window(w: &AdmissibleWindow) -> String {
    let b = if w.is_bounded() { num(w.b) } else { "inf".into() };
    format!("({},{})", num(w.a), b)
}

/// Headline `"<label>, window (a,b)"` followed by `key = value` lines.
pub fn classify_report(r: &ResolvedModel) -> Result<String, CliError> {
    let m = r.model();
    let label = m.classify()?;
    let mut out = format!("{label}, window {}\n", format_window(&m.window));
    let c = &m.coeffs;
    let _ = writeln!(out, "n = {}", m.n.get());
    if let Some(f) = &r.family {
        let _ = writeln!(out, "family = {f}");
    }
    for (k, v) in [("c0", c.c0), ("c1", c.c1), ("c3", c.c3), ("c4", c.c4)] {
        let _ = writeln!(out, "{k} = {}", num(v));
    }
    let _ = writeln!(out, "label = {label}");
    let _ = writeln!(out, "theorem = {}", label.theorem);
    let _ = writeln!(out, "case = {}", label.case_index);
    let _ = writeln!(out, "window = {}", format_window(&m.window));
    let _ = writeln!(out, "window_count = {}", m.windows.len());
    let roots: Vec<String> = m
        .roots
        .roots
        .iter()
        .map(|r| format!("{}^{}", num(r.value), r.multiplicity))
        .collect();
    let _ = writeln!(out, "real_roots = {}", roots.join(" "));
    let pairs: Vec<String> = m
        .roots
        .complex_pairs
        .iter()
        .map(|p| format!("{}±{}i", num(p.a), num(p.b)))
        .collect();
    let _ = writeln!(out, "complex_pairs = {}", pairs.join(" "));
    let (slope, intercept) = m.affine_curvature();
    let _ = writeln!(out, "scalar_curvature_slope = {}", num(slope));
    let _ = writeln!(out, "scalar_curvature_intercept = {}", num(intercept));
    Ok(out)
}

/// Profile table (`full = false`) or profile plus curvature table.
///
/// Every row is cross-checked against the ODE integration; a disagreement
/// beyond `solve_tol` is a numeric failure.
pub fn profile_table(
    r: &ResolvedModel,
    grid: &[f64],
    solve_tol: f64,
    full: bool,
) -> Result<String, CliError> {
    let sol = &r.solution;
    let oracle = ode_oracle_points(&sol.model, sol.anchor, grid, &DpOptions::default())?;
    for (&s, o) in grid.iter().zip(&oracle) {
        let err = sol.solve_point(s).relative_discrepancy(o);
        if !(err <= solve_tol) {
            return Err(CliError::Numeric {
                operation: "solve",
                message: format!(
                    "closed form and ODE disagree by {err:e} at s = {s} (solve_tol {solve_tol:e})"
                ),
            });
        }
    }
    let cols = if full { CSV_COLUMNS.len() } else { SOLVE_COLUMNS };
    let mut out = CSV_COLUMNS[..cols].join(",");
    out.push('\n');
    for &s in grid {
        let c = curvature_sample(sol, s);
        let row = [
            s,
            c.g,
            c.g_prime,
            c.u_prime,
            c.r_direct,
            c.xi,
            c.klembeck.a,
            c.klembeck.b,
            c.klembeck.c,
        ];
        if row[..cols].iter().any(|v| !v.is_finite()) {
            return Err(CliError::numeric(
                "curvature",
                format!("non-finite value at s = {s}"),
            ));
        }
        let cells: Vec<String> = row[..cols].iter().map(|v| fmt_sig(*v, 17)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn behavior_lines(out: &mut String, prefix: &str, b: &EndpointBehavior) {
    let _ = writeln!(out, "{prefix}_kind = {:?}", b.kind);
    if let Some(t) = b.theta {
        let _ = writeln!(out, "{prefix}_theta = {}", num(t));
    }
    if let Some(k) = b.glue_k {
        let _ = writeln!(out, "{prefix}_glue_k = {k}");
    }
    let _ = writeln!(out, "{prefix}_law = {:?}", b.asymptotic.law);
    let _ = writeln!(out, "{prefix}_fit_residual = {}", num(b.asymptotic.fit_residual));
}

/// Headline summary followed by `key = value` lines.
pub fn boundary_text(r: &ResolvedModel, glue_tol: f64) -> Result<(BoundaryReport, String), CliError> {
    let rep = boundary_report(&r.solution, r.k_choice, glue_tol)?;
    let mut out = rep.summary();
    out.push('\n');
    behavior_lines(&mut out, "origin", &rep.origin);
    behavior_lines(&mut out, "infinity", &rep.infinity);
    let _ = writeln!(out, "distance_origin = {}", num(rep.distance_origin));
    let _ = writeln!(out, "distance_infinity = {}", num(rep.distance_infinity));
    let _ = writeln!(out, "space = {}", rep.space.label);
    for (end, theta) in &rep.space.cone_data {
        let _ = writeln!(out, "cone_{} = {}", end.to_string().to_lowercase(), num(*theta));
    }
    Ok((rep, out))
}

/// Result of classifying one sampled tuple.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepOutcome {
    /// One label per admissible window.
    Labeled(Vec<(AdmissibleWindow, CaseLabel)>),
    NoWindow,
    Unclassifiable {
        window: AdmissibleWindow,
        condition: String,
    },
    /// Any other error; these count as silent failures.
    Failure(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub index: usize,
    pub coeffs: Coefficients,
    pub outcome: SweepOutcome,
}

/// Draws the coefficient tuples of a sweep.
pub fn sweep_tuples(cfg: &SweepConfig) -> Vec<Coefficients> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (lo, hi) = cfg.range;
    let draw = |rng: &mut ChaCha8Rng| {
        if rng.gen::<f64>() < cfg.zero_prob {
            0.0
        } else {
            rng.gen_range(lo..hi)
        }
    };
    (0..cfg.samples)
        .map(|_| {
            let c0 = draw(&mut rng);
            let c1 = draw(&mut rng);
            let c3 = draw(&mut rng);
            let c4 = draw(&mut rng);
            Coefficients::new(c0, c1, c3, c4)
        })
        .collect()
}

/// Classifies one tuple on every admissible window.
pub fn sweep_one(n: Dimension, c: Coefficients, root_tol: f64) -> SweepOutcome {
    let opts = ModelOptions {
        root_tol,
        window_index: Some(0),
    };
    let model = match ProfileModel::new(n, c, &opts) {
        Ok(m) => m,
        Err(ProfileError::NoWindow) => return SweepOutcome::NoWindow,
        Err(e) => return SweepOutcome::Failure(e.to_string()),
    };
    let mut labels = Vec::new();
    for w in &model.windows {
        match classify(n, &c, w, &model.roots) {
            Ok(l) => labels.push((*w, l)),
            Err(ProfileError::Unclassifiable { condition }) => {
                return SweepOutcome::Unclassifiable {
                    window: *w,
                    condition,
                }
            }
            Err(e) => return SweepOutcome::Failure(e.to_string()),
        }
    }
    SweepOutcome::Labeled(labels)
}

/// Classifies every sampled tuple in parallel, in input order.
pub fn run_sweep(n: Dimension, cfg: &SweepConfig, root_tol: f64) -> Vec<SweepRecord> {
    sweep_tuples(cfg)
        .into_par_iter()
        .enumerate()
        .map(|(index, coeffs)| SweepRecord {
            index,
            coeffs,
            outcome: sweep_one(n, coeffs, root_tol),
        })
        .collect()
}

/// Label frequencies and witness list of a sweep, plus its CSV table.
pub fn sweep_text(records: &[SweepRecord]) -> (String, String) {
    let mut freq: BTreeMap<String, usize> = BTreeMap::new();
    let (mut no_window, mut unclassifiable, mut failures) = (0usize, 0usize, 0usize);
    let mut table = String::from("index,c0,c1,c3,c4,outcome,window\n");
    let mut witnesses = String::new();
    for r in records {
        let c = &r.coeffs;
        let coeffs = [c.c0, c.c1, c.c3, c.c4].map(|v| fmt_sig(v, 17)).join(",");
        match &r.outcome {
            SweepOutcome::Labeled(ls) => {
                for (w, l) in ls {
                    *freq.entry(l.to_string()).or_default() += 1;
                    let _ = writeln!(table, "{},{coeffs},{l},\"{}\"", r.index, format_window(w));
                }
            }
            SweepOutcome::NoWindow => {
                no_window += 1;
                let _ = writeln!(table, "{},{coeffs},NoWindow,", r.index);
            }
            SweepOutcome::Unclassifiable { window, condition } => {
                unclassifiable += 1;
                let _ = writeln!(
                    table,
                    "{},{coeffs},Unclassifiable,\"{}\"",
                    r.index,
                    format_window(window)
                );
                let _ = writeln!(witnesses, "witness_{} = {condition}", r.index);
            }
            SweepOutcome::Failure(msg) => {
                failures += 1;
                let _ = writeln!(table, "{},{coeffs},Failure,", r.index);
                let _ = writeln!(witnesses, "failure_{} = {msg}", r.index);
            }
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "samples = {}", records.len());
    let _ = writeln!(out, "no_window = {no_window}");
    let _ = writeln!(out, "unclassifiable = {unclassifiable}");
    let _ = writeln!(out, "failures = {failures}");
    for (label, count) in &freq {
        let _ = writeln!(out, "label[{label}] = {count}");
    }
    out.push_str(&witnesses);
    (out, table)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Applies `--family` and `--param` to a loaded configuration.
pub fn effective_config(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(name) = &args.family {
        cfg.coefficients = None;
        cfg.roots = None;
        let keep = cfg
            .family
            .take()
            .filter(|f| f.name == *name)
            .map(|f| f.params)
            .unwrap_or_default();
        cfg.family = Some(FamilyInput {
            name: name.clone(),
            params: keep,
        });
    }
    if !args.params.is_empty() {
        let fam = cfg
            .family
            .as_mut()
            .ok_or_else(|| CliError::Config("--param needs a family".into()))?;
        for (k, v) in &args.params {
            fam.params.insert(k.clone(), *v);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one subcommand, writing the report to `stdout`.
pub fn run(args: &Args, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = effective_config(args)?;
    let emit = |stdout: &mut dyn Write, text: &str| -> Result<(), CliError> {
        stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Config(format!("stdout: {e}")))
    };
    if args.dump_config {
        return emit(stdout, &cfg.to_toml());
    }
    let report_path = args
        .out
        .clone()
        .filter(|_| {
            matches!(
                args.command,
                Subcommand::Classify | Subcommand::Boundary | Subcommand::Sweep
            )
        })
        .or_else(|| cfg.outputs.report_path.clone());
    let table_path = args
        .out
        .clone()
        .filter(|_| {
            matches!(
                args.command,
                Subcommand::Solve | Subcommand::Curvature | Subcommand::Catalog
            )
        })
        .or_else(|| cfg.outputs.table_path.clone());
    let grid = cfg.grid.points();
    let (report, table) = match args.command {
        Subcommand::Sweep => {
            let records = run_sweep(cfg.dimension()?, &cfg.sweep, cfg.tolerances.root_tol);
            let (rep, table) = sweep_text(&records);
            (rep, Some(table))
        }
        Subcommand::Classify => (classify_report(&resolve_model(&cfg)?)?, None),
        Subcommand::Boundary => (boundary_text(&resolve_model(&cfg)?, cfg.tolerances.glue_tol)?.1, None),
        Subcommand::Solve | Subcommand::Curvature => {
            let r = resolve_model(&cfg)?;
            let full = args.command == Subcommand::Curvature;
            let table = profile_table(&r, &grid, cfg.tolerances.solve_tol, full)?;
            (String::new(), Some(table))
        }
        Subcommand::Catalog => {
            if cfg.family.is_none() {
                return Err(CliError::Config("catalog needs --family or [family]".into()));
            }
            let r = resolve_model(&cfg)?;
            let mut rep = classify_report(&r)?;
            rep.push_str(&boundary_text(&r, cfg.tolerances.glue_tol)?.1);
            let table = profile_table(&r, &grid, cfg.tolerances.solve_tol, true)?;
            (rep, Some(table))
        }
    };
    if let Some(p) = &report_path {
        write_file(p, &report)?;
    }
    emit(stdout, &report)?;
    if let Some(t) = table {
        match &table_path {
            Some(p) => write_file(p, &t)?,
            None if report.is_empty() => emit(stdout, &t)?,
            None => {}
        }
    }
    Ok(())
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(&args, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("xkahler").chain(args.iter().copied());
        let code = main_with_args(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn config_round_trips_through_toml() {
        let text = r#"
n = 2
window = 0
[roots]
real = [[1.0, 2], [2.0, 2]]
m = 1
[grid]
s_min = 0.5
s_max = 2.0
samples = 5
spacing = "log"
[outputs]
table_path = "t.csv"
"#;
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn invalid_grid_is_a_config_error() {
        let e = RunConfig::parse("[grid]\ns_min = 2.0\ns_max = 1.0\n").unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(RunConfig::parse("bogus = 1\n").is_err());
    }

    #[test]
    fn family_by_flag_classifies() {
        let (code, out, _) = run_args(&["classify", "--family", "Biquard"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("SmoothCn case 2 (Biquard family), window (0,1)"), "{out}");
    }

    #[test]
    fn unknown_param_exits_one_and_help_exits_zero() {
        let (code, _, err) = run_args(&["classify", "--family", "Biquard", "--param", "k=2"]);
        assert_eq!(code, 1, "{err}");
        assert_eq!(run_args(&["--help"]).0, 0);
        assert_eq!(run_args(&["frobnicate"]).0, 1);
    }

    #[test]
    fn linear_grid_hits_endpoints() {
        let g = Grid {
            s_min: 1.0,
            s_max: 4.0,
            samples: 4,
            spacing: Spacing::Linear,
        };
        assert_eq!(g.points(), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = SweepConfig {
            samples: 200,
            ..SweepConfig::default()
        };
        let n = Dimension::new(2).unwrap();
        assert_eq!(run_sweep(n, &cfg, 1e-12), run_sweep(n, &cfg, 1e-12));
    }
}
