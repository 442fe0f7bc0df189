//! Command-line front end: argument and config-file parsing, the seven
//! commands, and deterministic CSV/JSON emission.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{Map, Number, Value};

use crate::coherent::{
    cs_wavefunction_closed, cs_wavefunction_series, measure_density, normalization_closed_complex,
    normalization_series, overlap_series, upsilon, CSLabel, CoherentState,
};
use crate::gk_model::GKParams;
use crate::quadrature::QuadratureSpec;
use crate::specfun::{clear_coefficient_perturbation, inject_coefficient_perturbation, mp_poly_all, mp_poly_hyp};
use crate::specfun::{MPPolyParams, LANCZOS_COEFFS};
use crate::verify::{self, VerificationReport, VerifyOptions, SUITES};
use crate::{Error, Result};

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

const DEFAULT_XI_GRID: &str = "0.1:5:50";
const DEFAULT_X_GRID: &str = "-5:5:21";
const DEFAULT_M_MAX: usize = 10;
const DEFAULT_EPSILON: f64 = 0.1;
const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "gkcs",
    version,
    about = "Coherent states of the Gol'dman-Krivchenkov oscillator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Eigen,
    MpPoly,
    CsEval,
    CsNorm,
    Overlap,
    Measure,
    Verify,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and normalized eigenfunctions on a ξ-grid.
    Eigen(RunArgs),
    /// Meixner-Pollaczek polynomials by recurrence and hypergeometric routes.
    MpPoly(RunArgs),
    /// Coherent-state wavefunction by series and closed form.
    CsEval(RunArgs),
    /// Normalization factor by series and closed form.
    CsNorm(RunArgs),
    /// Overlap matrix between the states labelled by an x list.
    Overlap(RunArgs),
    /// Density of the labelling measure on an x-grid.
    Measure(RunArgs),
    /// Run the invariant suites.
    Verify(RunArgs),
}

impl Command {
    fn split(self) -> (CommandKind, RunArgs) {
        match self {
            Command::Eigen(a) => (CommandKind::Eigen, a),
            Command::MpPoly(a) => (CommandKind::MpPoly, a),
            Command::CsEval(a) => (CommandKind::CsEval, a),
            Command::CsNorm(a) => (CommandKind::CsNorm, a),
            Command::Overlap(a) => (CommandKind::Overlap, a),
            Command::Measure(a) => (CommandKind::Measure, a),
            Command::Verify(a) => (CommandKind::Verify, a),
        }
    }
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Eigen => "eigen",
            CommandKind::MpPoly => "mp-poly",
            CommandKind::CsEval => "cs-eval",
            CommandKind::CsNorm => "cs-norm",
            CommandKind::Overlap => "overlap",
            CommandKind::Measure => "measure",
            CommandKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Every flag is optional here so that config-file values can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub kappa0: Option<f64>,
    /// Angle θ in (0, π); defaults to π/2.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Label coordinate(s): a value, a comma list, or start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// start:stop:count or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub xi_grid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_grid: Option<String>,
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    /// Comma list of ε values for the resolution-of-identity suite.
    #[arg(long)]
    pub eps_ladder: Option<String>,
    /// Restrict `verify` to a comma list of suites.
    #[arg(long)]
    pub suite: Option<String>,
    /// key=value file with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// IDX:REL — scale one Lanczos coefficient by 1+REL (mutation testing).
    #[arg(long, hide = true)]
    pub inject_lanczos_perturbation: Option<String>,
}

const CONFIG_KEYS: [&str; 17] = [
    "beta",
    "gamma",
    "alpha",
    "rho",
    "kappa0",
    "theta",
    "epsilon",
    "x",
    "xi-grid",
    "x-grid",
    "m-max",
    "tol",
    "format",
    "out",
    "quad-nodes",
    "eps-ladder",
    "suite",
];

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| config_err(format!("cannot parse {key} = {v:?}")))
}

/// Parses `key=value` lines; `#` starts a comment, keys accept `_` or `-`.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("config line {}: expected key=value", lineno + 1)))?;
        let key = k.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(config_err(format!("config line {}: unknown key {key:?}", lineno + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

impl RunArgs {
    /// Fills flags that were not given from the config map.
    pub fn merge_config(&mut self, map: &BTreeMap<String, String>) -> Result<()> {
        fn fill<T: FromStr>(slot: &mut Option<T>, map: &BTreeMap<String, String>, key: &str) -> Result<()> {
            if slot.is_none() {
                if let Some(v) = map.get(key) {
                    *slot = Some(parse_value(key, v)?);
                }
            }
            Ok(())
        }
        fill(&mut self.beta, map, "beta")?;
        fill(&mut self.gamma, map, "gamma")?;
        fill(&mut self.alpha, map, "alpha")?;
        fill(&mut self.rho, map, "rho")?;
        fill(&mut self.kappa0, map, "kappa0")?;
        fill(&mut self.theta, map, "theta")?;
        fill(&mut self.epsilon, map, "epsilon")?;
        fill(&mut self.x, map, "x")?;
        fill(&mut self.xi_grid, map, "xi-grid")?;
        fill(&mut self.x_grid, map, "x-grid")?;
        fill(&mut self.m_max, map, "m-max")?;
        fill(&mut self.tol, map, "tol")?;
        fill(&mut self.out, map, "out")?;
        fill(&mut self.quad_nodes, map, "quad-nodes")?;
        fill(&mut self.eps_ladder, map, "eps-ladder")?;
        fill(&mut self.suite, map, "suite")?;
        if self.format.is_none() {
            if let Some(v) = map.get("format") {
                self.format = Some(Format::from_str(v, true).map_err(|_| config_err(format!("unknown format {v:?}")))?);
            }
        }
        Ok(())
    }
}

/// `start:stop:count` with inclusive endpoints, or a comma-separated list.
pub fn parse_grid(key: &str, spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|v| parse_value::<f64>(key, v))
            .collect::<Result<Vec<_>>>()?,
        [a, b, n] => {
            let (a, b): (f64, f64) = (parse_value(key, a)?, parse_value(key, b)?);
            let n: usize = parse_value(key, n)?;
            match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            }
        }
        _ => {
            return Err(config_err(format!(
                "{key}: expected start:stop:count or a comma list, got {spec:?}"
            )))
        }
    };
    if grid.is_empty() {
        return Err(config_err(format!("{key}: grid is empty")));
    }
    if let Some(v) = grid.iter().find(|v| !v.is_finite()) {
        return Err(config_err(format!("{key}: non-finite grid value {v}")));
    }
    Ok(grid)
}

/// Validated configuration of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: Option<GKParams>,
    pub theta: f64,
    pub epsilon: f64,
    pub x: Vec<f64>,
    pub xi_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub m_max: usize,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub verify: VerifyOptions,
    pub suites: Vec<&'static str>,
    pub perturbation: Option<(usize, f64)>,
    /// Flat key-value view echoed into JSON output.
    pub echo: BTreeMap<String, String>,
}

fn params_from(args: &RunArgs) -> Result<Option<GKParams>> {
    let groups = [
        args.gamma.is_some(),
        args.alpha.is_some(),
        args.rho.is_some() || args.kappa0.is_some(),
    ];
    match groups.iter().filter(|&&g| g).count() {
        0 => {
            if args.beta.is_some() {
                return Err(config_err("--beta needs --gamma or --alpha"));
            }
            Ok(None)
        }
        1 => {
            let beta = args.beta;
            let p = if let Some(g) = args.gamma {
                GKParams::from_gamma(g, beta.ok_or_else(|| config_err("--gamma needs --beta"))?)
            } else if let Some(a) = args.alpha {
                GKParams::from_reduced(a, beta.ok_or_else(|| config_err("--alpha needs --beta"))?)
            } else {
                if beta.is_some() {
                    return Err(config_err(
                        "--beta is implied by --rho/--kappa0 and cannot be given with them",
                    ));
                }
                match (args.rho, args.kappa0) {
                    (Some(r), Some(k)) => GKParams::from_physical(r, k),
                    _ => return Err(config_err("--rho and --kappa0 must be given together")),
                }
            };
            p.map(Some).map_err(|e| config_err(e.to_string()))
        }
        _ => Err(config_err("give exactly one of --gamma, --alpha, or --rho/--kappa0")),
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(format!("{key} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_args(command: CommandKind, args: RunArgs) -> Result<Self> {
        let params = params_from(&args)?;
        if params.is_none() && command != CommandKind::Verify {
            return Err(config_err(format!(
                "{} needs model parameters: --gamma/--alpha with --beta, or --rho with --kappa0",
                command.name()
            )));
        }
        let theta = args.theta.unwrap_or(FRAC_PI_2);
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(config_err(format!("theta must lie in (0, π), got {theta}")));
        }
        let epsilon = positive("epsilon", args.epsilon.unwrap_or(DEFAULT_EPSILON))?;
        let tol = positive("tol", args.tol.unwrap_or(DEFAULT_TOL))?;
        let x = parse_grid("x", args.x.as_deref().unwrap_or("0"))?;
        let xi_grid = parse_grid("xi-grid", args.xi_grid.as_deref().unwrap_or(DEFAULT_XI_GRID))?;
        let x_grid = parse_grid("x-grid", args.x_grid.as_deref().unwrap_or(DEFAULT_X_GRID))?;
        if let Some(v) = xi_grid.iter().find(|&&v| v < 0.0) {
            return Err(config_err(format!("xi-grid values must be non-negative, got {v}")));
        }
        let m_max = args.m_max.unwrap_or(DEFAULT_M_MAX);

        let mut verify = VerifyOptions {
            series_tol: tol,
            ..VerifyOptions::default()
        };
        if let Some(n) = args.quad_nodes {
            verify.quad = QuadratureSpec {
                n_nodes: n,
                ..verify.quad
            };
        }
        verify.quad.validate()?;
        if let Some(l) = &args.eps_ladder {
            let ladder = parse_grid("eps-ladder", l)?;
            for &e in &ladder {
                positive("eps-ladder entries", e)?;
            }
            verify.eps_ladder = ladder;
        }
        let suites = match &args.suite {
            None => SUITES.to_vec(),
            Some(list) => list
                .split(',')
                .map(|s| {
                    let s = s.trim().replace('-', "_");
                    SUITES
                        .iter()
                        .copied()
                        .find(|&k| k == s)
                        .ok_or_else(|| config_err(format!("unknown suite {s:?}; known: {}", SUITES.join(", "))))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let perturbation = match &args.inject_lanczos_perturbation {
            None => None,
            Some(spec) => {
                let (i, r) = spec
                    .split_once(':')
                    .ok_or_else(|| config_err("--inject-lanczos-perturbation expects IDX:REL"))?;
                let i: usize = parse_value("perturbation index", i)?;
                let r: f64 = parse_value("perturbation size", r)?;
                if i >= LANCZOS_COEFFS.len() || !r.is_finite() {
                    return Err(config_err(format!("perturbation {spec:?} out of range")));
                }
                Some((i, r))
            }
        };

        let mut echo = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            echo.insert(k.to_string(), v);
        };
        put("command", command.name().to_string());
        if let Some(p) = &params {
            put("rho", fmt_f64(p.rho));
            put("kappa0", fmt_f64(p.kappa0));
            put("alpha", fmt_f64(p.alpha));
            put("beta", fmt_f64(p.beta));
            put("gamma", fmt_f64(p.gamma));
        }
        put("theta", fmt_f64(theta));
        put("epsilon", fmt_f64(epsilon));
        put("tol", fmt_f64(tol));
        put("m-max", m_max.to_string());
        put("x", args.x.unwrap_or_else(|| "0".into()));
        put("xi-grid", args.xi_grid.unwrap_or_else(|| DEFAULT_XI_GRID.into()));
        put("x-grid", args.x_grid.unwrap_or_else(|| DEFAULT_X_GRID.into()));
        put("quad-nodes", verify.quad.n_nodes.to_string());
        put(
            "eps-ladder",
            verify
                .eps_ladder
                .iter()
                .map(|&e| fmt_f64(e))
                .collect::<Vec<_>>()
                .join(","),
        );
        put("suite", suites.join(","));

        Ok(RunConfig {
            command,
            params,
            theta,
            epsilon,
            x,
            xi_grid,
            x_grid,
            m_max,
            tol,
            format: args.format.unwrap_or(Format::Csv),
            out: args.out,
            verify,
            suites,
            perturbation,
            echo,
        })
    }

    fn params(&self) -> GKParams {
        self.params.expect("validated: non-verify commands carry parameters")
    }

    fn label(&self, x: f64) -> Result<CSLabel> {
        CSLabel::new(self.params(), self.theta, self.epsilon, x)
    }
}

/// Fixed 17-significant-digit float formatting used in every output.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(v) if v.is_finite() => {
                Value::Number(Number::from_str(&fmt_f64(*v)).expect("formatted float is a JSON number"))
            }
            Cell::Float(_) => Value::Null,
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

/// Column-named rows of one command, in grid order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

fn report_table(reports: &[VerificationReport]) -> Table {
    Table {
        columns: vec![
            "suite",
            "module",
            "invariant",
            "reference",
            "cases",
            "worst_case",
            "value_a",
            "value_b",
            "abs_err",
            "rel_err",
            "tolerance",
            "passed",
        ],
        rows: reports
            .iter()
            .map(|r| {
                vec![
                    Cell::Text(r.suite.into()),
                    Cell::Text(r.module.into()),
                    Cell::Text(r.invariant.into()),
                    Cell::Text(r.reference.into()),
                    Cell::Int(r.cases),
                    Cell::Text(r.worst_case.clone()),
                    Cell::Float(r.value_a),
                    Cell::Float(r.value_b),
                    Cell::Float(r.abs_err),
                    Cell::Float(r.rel_err),
                    Cell::Float(r.tolerance),
                    Cell::Bool(r.passed),
                ]
            })
            .collect(),
    }
}

fn complex_cells(z: Complex64) -> [Cell; 3] {
    [Cell::Float(z.re), Cell::Float(z.im), Cell::Float(z.norm_sqr())]
}

/// Evaluates `f` over `items` in parallel, keeping input order.
fn par_rows<T: Sync>(items: &[T], f: impl Fn(usize, &T) -> Result<Vec<Vec<Cell>>> + Sync) -> Result<Vec<Vec<Cell>>> {
    let chunks: Vec<Result<Vec<Vec<Cell>>>> = items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    let mut rows = Vec::new();
    for c in chunks {
        rows.extend(c?);
    }
    Ok(rows)
}

fn eigen_table(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.params();
    let rows = par_rows(&cfg.xi_grid, |_, &xi| {
        let psi = p.eigenfunctions(cfg.m_max, xi)?;
        Ok(psi
            .iter()
            .enumerate()
            .map(|(m, &v)| {
                vec![
                    Cell::Int(m),
                    Cell::Float(p.eigenvalue(m)),
                    Cell::Float(xi),
                    Cell::Float(v),
                ]
            })
            .collect())
    })?;
    // m-major order: all ξ for m = 0, then m = 1, ...
    let n = cfg.xi_grid.len();
    let mut sorted = Vec::with_capacity(rows.len());
    for m in 0..=cfg.m_max {
        for k in 0..n {
            sorted.push(rows[k * (cfg.m_max + 1) + m].clone());
        }
    }
    Ok(Table {
        columns: vec!["m", "lambda_m", "xi", "psi"],
        rows: sorted,
    })
}

fn mp_poly_table(cfg: &RunConfig) -> Result<Table> {
    let lambda = cfg.params().gamma / 2.0;
    let mp = MPPolyParams::new(lambda, cfg.theta)?;
    let rows = par_rows(&cfg.x_grid, |_, &x| {
        let rec = mp_poly_all(cfg.m_max, mp, x);
        rec.iter()
            .enumerate()
            .map(|(m, &r)| {
                let h = mp_poly_hyp(m, mp, x)?;
                Ok(vec![
                    Cell::Int(m),
                    Cell::Float(x),
                    Cell::Float(r),
                    Cell::Float(h.value),
                    Cell::Float(h.imag_residue),
                    Cell::Float((r - h.value).abs()),
                ])
            })
            .collect()
    })?;
    Ok(Table {
        columns: vec!["m", "x", "recurrence", "hypergeometric", "imag_residue", "abs_diff"],
        rows,
    })
}

fn cs_eval_table(cfg: &RunConfig) -> Result<Table> {
    let mut points = Vec::new();
    for &x in &cfg.x {
        for &xi in &cfg.xi_grid {
            points.push((x, xi));
        }
    }
    let labels: Vec<CSLabel> = cfg.x.iter().map(|&x| cfg.label(x)).collect::<Result<_>>()?;
    let nxi = cfg.xi_grid.len();
    let rows = par_rows(&points, |i, &(x, xi)| {
        let label = &labels[i / nxi];
        let closed = cs_wavefunction_closed(label, xi)?;
        let series = cs_wavefunction_series(label, xi, cfg.tol)?.require("cs_wavefunction_series")?;
        let mut row = vec![Cell::Float(x), Cell::Float(xi)];
        row.extend(complex_cells(closed));
        row.extend(complex_cells(series.value));
        row.push(Cell::Float((closed - series.value).norm()));
        Ok(vec![row])
    })?;
    Ok(Table {
        columns: vec![
            "x",
            "xi",
            "closed_re",
            "closed_im",
            "closed_abs2",
            "series_re",
            "series_im",
            "series_abs2",
            "abs_diff",
        ],
        rows,
    })
}

fn cs_norm_table(cfg: &RunConfig) -> Result<Table> {
    let rows = par_rows(&cfg.x, |_, &x| {
        let label = cfg.label(x)?;
        let closed = normalization_closed_complex(&label)?;
        let series = normalization_series(&label, cfg.tol)?.require("normalization_series")?;
        Ok(vec![vec![
            Cell::Float(x),
            Cell::Float(series.value.re),
            Cell::Int(series.terms_used),
            Cell::Float(closed.re),
            Cell::Float(closed.im),
            Cell::Float((series.value.re - closed.re).abs() / closed.re.abs()),
        ]])
    })?;
    Ok(Table {
        columns: vec!["x", "series", "series_terms", "closed", "closed_imag", "rel_diff"],
        rows,
    })
}

fn overlap_table(cfg: &RunConfig) -> Result<Table> {
    let states: Vec<CoherentState> = cfg
        .x
        .iter()
        .map(|&x| cfg.label(x).and_then(CoherentState::new))
        .collect::<Result<_>>()?;
    let n = states.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let rows = par_rows(&pairs, |_, &(i, j)| {
        let (a, b) = (states[i].label(), states[j].label());
        let closed = crate::coherent::overlap_with_norms(a, b, states[i].norm(), states[j].norm())?;
        let series = overlap_series(a, b, cfg.tol)?;
        Ok(vec![vec![
            Cell::Int(i),
            Cell::Int(j),
            Cell::Float(a.x),
            Cell::Float(b.x),
            Cell::Float(closed.re),
            Cell::Float(closed.im),
            Cell::Float(closed.norm()),
            Cell::Float((closed - series).norm()),
        ]])
    })?;
    Ok(Table {
        columns: vec!["i", "j", "x_i", "x_j", "re", "im", "abs", "series_abs_diff"],
        rows,
    })
}

fn measure_table(cfg: &RunConfig) -> Result<Table> {
    let gamma = cfg.params().gamma;
    let rows = par_rows(&cfg.x_grid, |_, &x| {
        let label = cfg.label(x)?;
        Ok(vec![vec![
            Cell::Float(x),
            Cell::Float(upsilon(gamma, cfg.theta, x)?),
            Cell::Float(measure_density(&label)?),
        ]])
    })?;
    Ok(Table {
        columns: vec!["x", "upsilon", "density"],
        rows,
    })
}

/// Result of one run: the emitted table and, for `verify`, the reports.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub reports: Vec<VerificationReport>,
}

impl Outcome {
    pub fn failures(&self) -> impl Iterator<Item = &VerificationReport> {
        self.reports.iter().filter(|r| !r.passed)
    }
}

/// Computes the command's output without writing it.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.command == CommandKind::Verify {
        if let Some((i, r)) = cfg.perturbation {
            inject_coefficient_perturbation(i, r);
        }
        let result = cfg
            .suites
            .iter()
            .map(|s| verify::run_suite(s, &cfg.verify))
            .collect::<Result<Vec<_>>>();
        if cfg.perturbation.is_some() {
            clear_coefficient_perturbation();
        }
        let reports: Vec<VerificationReport> = result?.into_iter().flatten().collect();
        return Ok(Outcome {
            table: report_table(&reports),
            reports,
        });
    }
    let table = match cfg.command {
        CommandKind::Eigen => eigen_table(cfg)?,
        CommandKind::MpPoly => mp_poly_table(cfg)?,
        CommandKind::CsEval => cs_eval_table(cfg)?,
        CommandKind::CsNorm => cs_norm_table(cfg)?,
        CommandKind::Overlap => overlap_table(cfg)?,
        CommandKind::Measure => measure_table(cfg)?,
        CommandKind::Verify => unreachable!(),
    };
    Ok(Outcome {
        table,
        reports: Vec::new(),
    })
}

pub fn render_csv(table: &Table) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn render_json(cfg: &RunConfig, outcome: &Outcome) -> Vec<u8> {
    let objects = |t: &Table| -> Value {
        Value::Array(
            t.rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (c, v) in t.columns.iter().zip(row) {
                        m.insert((*c).to_string(), v.json());
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    };
    let config: Map<String, Value> = cfg
        .echo
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let rows = if cfg.command == CommandKind::Verify {
        Value::Array(Vec::new())
    } else {
        objects(&outcome.table)
    };
    let doc = serde_json::json!({
        "config": Value::Object(config),
        "rows": rows,
        "reports": objects(&report_table(&outcome.reports)),
    });
    let mut out = serde_json::to_vec_pretty(&doc).expect("JSON serialization");
    out.push(b'\n');
    out
}

fn emit(cfg: &RunConfig, outcome: &Outcome) -> std::io::Result<()> {
    let bytes = match cfg.format {
        Format::Csv => render_csv(&outcome.table),
        Format::Json => render_json(cfg, outcome),
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

/// Parses the process arguments, runs, and returns the exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { 0 };
        }
    };
    let (kind, mut args) = cli.command.split();
    let cfg = (|| {
        if let Some(path) = args.config.clone() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
            args.merge_config(&parse_config_text(&text)?)?;
        }
        RunConfig::from_args(kind, args)
    })();
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("gkcs: {e}");
            return EXIT_VALIDATION;
        }
    };
    let outcome = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("gkcs {}: {e}", kind.name());
            return exit_code(&e);
        }
    };
    if let Err(e) = emit(&cfg, &outcome) {
        eprintln!("gkcs: cannot write output: {e}");
        return EXIT_VALIDATION;
    }
    let failures: Vec<_> = outcome.failures().collect();
    if failures.is_empty() {
        return 0;
    }
    for r in &failures {
        eprintln!(
            "FAIL {}::{} [{}] ({}): rel_err {} > tol {} at {}",
            r.module,
            r.invariant,
            r.suite,
            r.reference,
            fmt_f64(r.rel_err),
            fmt_f64(r.tolerance),
            r.worst_case
        );
    }
    eprintln!(
        "gkcs verify: {} of {} invariants failed",
        failures.len(),
        outcome.reports.len()
    );
    EXIT_VERIFICATION
}
