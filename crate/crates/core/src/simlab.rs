//! Seeded Monte Carlo experiments that write CSV tables.
//!
//! Three experiment kinds are supported:
//!
//! * `vconv`: ratios of plug-in to limiting values of `v` and `v'`,
//! * `prial`: percentage relative improvement in average Frobenius loss of
//!   precision estimators over the Moore-Penrose plug-in,
//! * `rosv`: relative out-of-sample variance of GMV portfolio weights.
//!
//! Replication `r` of every cell is generated from seed `base_seed + r`, and
//! results are reduced in replication order, so tables do not depend on the
//! number of worker threads.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::detlim::{v_derivatives, DEFAULT_TOL};
use crate::error::{arg, Error, Result};
use crate::plugin_est::PluginContext;
use crate::randmat::{paper_mix_spectrum, read_spectrum, Dist, InverseKind, SampleEigen, Sampler, SpectralModel, WeightMatrix};
use crate::shrink_gmv::{bona_fide_alpha_mp_ctx, double_shrinkage, equal_weights, mp_weights, reflexive, rosv, true_gmv};
use crate::shrink_prec::{bona_fide_ctx, empirical_bayes, frobenius_loss, optimal_ridge, oracle_nl, PrecisionMethod};

/// Share of failed replications above which a cell is reported as failed.
pub const MAX_FAILURE_SHARE: f64 = 0.2;
pub const DEFAULT_REPS: usize = 100;

/// Formats like C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (16 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Vconv,
    Prial,
    Rosv,
}

impl ExperimentKind {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Vconv => "vconv",
            Self::Prial => "prial",
            Self::Rosv => "rosv",
        }
    }

    pub fn default_methods(self) -> Vec<String> {
        let m: &[&str] = match self {
            Self::Vconv => &["hat_v0", "hat_v1", "hat_vt", "hat_vt1"],
            Self::Prial => &[
                "mp", "ridge", "mpr", "empirical_bayes", "optimal_ridge", "oracle_nl", "true_precision", "mp_plugin",
                "identity",
            ],
            Self::Rosv => &["gmv_true", "plugin", "mp", "reflexive", "double", "equal"],
        };
        m.iter().map(|s| s.to_string()).collect()
    }

    fn header(self) -> &'static [&'static str] {
        match self {
            Self::Vconv => &["dist", "n", "c", "t", "method", "mean_ratio", "sd", "reps", "errors"],
            Self::Prial => &["dist", "n", "c", "method", "prial_pct", "se", "reps", "errors"],
            Self::Rosv => &["dist", "n", "c", "method", "rosv", "se", "reps", "errors"],
        }
    }

    fn known_method(self, m: &str) -> bool {
        match self {
            Self::Vconv => matches!(m, "hat_v0" | "hat_v1" | "hat_vt" | "hat_vt1"),
            Self::Prial => matches!(
                m,
                "mp" | "ridge"
                    | "mpr"
                    | "empirical_bayes"
                    | "optimal_ridge"
                    | "oracle_nl"
                    | "true_precision"
                    | "mp_plugin"
                    | "identity"
            ),
            Self::Rosv => matches!(m, "gmv_true" | "plugin" | "mp" | "reflexive" | "double" | "equal"),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vconv" => Ok(Self::Vconv),
            "prial" => Ok(Self::Prial),
            "rosv" => Ok(Self::Rosv),
            other => arg(format!("unknown experiment kind '{other}'")),
        }
    }
}

/// Population spectrum used by every cell.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSpec {
    PaperMix,
    Identity,
    /// Eigenvalues read from a file; resampled by rank to the cell dimension.
    File(PathBuf),
}

impl SpectrumSpec {
    pub fn eigenvalues(&self, p: usize) -> Result<Vec<f64>> {
        match self {
            Self::PaperMix => Ok(paper_mix_spectrum(p)),
            Self::Identity => Ok(vec![1.0; p]),
            Self::File(path) => {
                let mut vals = read_spectrum(path)?;
                vals.sort_by(f64::total_cmp);
                let len = vals.len();
                Ok((0..p).map(|i| vals[i * len / p]).collect())
            }
        }
    }
}

impl FromStr for SpectrumSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "paper" | "paper_mix" => Ok(Self::PaperMix),
            "identity" => Ok(Self::Identity),
            "" => arg("empty spectrum"),
            path => Ok(Self::File(PathBuf::from(path))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub dists: Vec<Dist>,
    pub n_list: Vec<usize>,
    pub c_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub reps: usize,
    pub base_seed: u64,
    pub spectrum: SpectrumSpec,
    pub methods: Vec<String>,
    pub workers: usize,
    /// Draw a Haar eigenbasis for `Σ` (otherwise `Σ` is diagonal).
    pub haar: bool,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            dists: vec![Dist::Normal],
            n_list: vec![100],
            c_grid: vec![2.0],
            t_grid: vec![1.0, 2.0, 5.0],
            reps: DEFAULT_REPS,
            base_seed: 1,
            spectrum: SpectrumSpec::PaperMix,
            methods: kind.default_methods(),
            workers: 1,
            haar: true,
        }
    }

    /// Parses `key=value` lines; `#` starts a comment. `kind` may appear
    /// anywhere and resets the default method list if `methods` is absent.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("line {}: expected key=value", lineno + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let kind = match pairs.iter().rev().find(|(k, _)| k == "kind") {
            Some((_, v)) => v.parse()?,
            None => return arg("config is missing 'kind'"),
        };
        let mut cfg = Self::new(kind);
        for (k, v) in pairs.iter().filter(|(k, _)| k != "kind") {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "kind" => {
                let kind: ExperimentKind = value.parse()?;
                if kind != self.kind {
                    self.kind = kind;
                    self.methods = kind.default_methods();
                }
            }
            "dist" | "dists" => self.dists = parse_list(value)?,
            "n" | "n_list" => self.n_list = parse_list(value)?,
            "c" | "c_grid" => self.c_grid = parse_list(value)?,
            "t" | "t_grid" => self.t_grid = parse_list(value)?,
            "reps" => self.reps = parse_one(value)?,
            "seed" | "base_seed" => self.base_seed = parse_one(value)?,
            "spectrum" => self.spectrum = value.parse()?,
            "methods" => self.methods = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            "workers" => self.workers = parse_one(value)?,
            "basis" => {
                self.haar = match value.trim() {
                    "haar" => true,
                    "identity" => false,
                    other => return arg(format!("basis must be haar or identity, got '{other}'")),
                }
            }
            other => return arg(format!("unknown config key '{other}'")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return arg("reps must be at least 1");
        }
        if self.workers == 0 {
            return arg("workers must be at least 1");
        }
        if self.dists.is_empty() || self.n_list.is_empty() || self.c_grid.is_empty() || self.methods.is_empty() {
            return arg("dist, n, c and methods must be non-empty");
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n < 2) {
            return arg(format!("sample sizes must be at least 2, got {n}"));
        }
        if let Some(c) = self.c_grid.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return arg(format!("concentration ratios must be positive, got {c}"));
        }
        if let Some(t) = self.t_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return arg(format!("t values must be positive, got {t}"));
        }
        if let Some(m) = self.methods.iter().find(|m| !self.kind.known_method(m)) {
            return arg(format!("method '{m}' is not available for {} experiments", self.kind));
        }
        Ok(())
    }
}

fn parse_one<T: FromStr>(s: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    s.trim().parse::<T>().map_err(|e| Error::Argument(format!("bad value '{s}': {e}")))
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    s.split(',').filter(|x| !x.trim().is_empty()).map(parse_one).collect()
}

/// One reduced line of an experiment table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dist: Dist,
    pub n: usize,
    pub p: usize,
    pub c: f64,
    /// Tuning value for `vconv` rows (`0` for the `t = 0` estimators).
    pub t: Option<f64>,
    pub method: String,
    /// Mean ratio, PRIAL in percent or mean rOSV.
    pub value: f64,
    /// Standard deviation (`vconv`) or standard error (`prial`, `rosv`).
    pub spread: f64,
    pub reps: usize,
    pub errors: usize,
    pub base_seed: u64,
    /// Per-replication statistic: ratio, loss or rOSV; `None` on failure.
    pub per_rep: Vec<Option<f64>>,
    /// Wall-clock seconds per replication; informational only.
    pub elapsed: Vec<f64>,
    /// Message of the first failed replication, if any.
    pub first_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub kind: ExperimentKind,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.kind.header())?;
        for r in &self.rows {
            let mut rec = vec![r.dist.tag().to_string(), r.n.to_string(), fmt_g17(r.c)];
            if self.kind == ExperimentKind::Vconv {
                rec.push(fmt_g17(r.t.unwrap_or(0.0)));
            }
            rec.extend([r.method.clone(), fmt_g17(r.value), fmt_g17(r.spread), r.reps.to_string(), r.errors.to_string()]);
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// Long-format per-replication values with timings. Timings make this
    /// output machine dependent, so it is kept apart from [`to_csv`](Self::to_csv).
    pub fn per_rep_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["dist", "n", "p", "c", "t", "method", "rep", "seed", "value", "elapsed_s"])?;
        for r in &self.rows {
            for (i, v) in r.per_rep.iter().enumerate() {
                w.write_record([
                    r.dist.tag().to_string(),
                    r.n.to_string(),
                    r.p.to_string(),
                    fmt_g17(r.c),
                    fmt_g17(r.t.unwrap_or(0.0)),
                    r.method.clone(),
                    i.to_string(),
                    (r.base_seed + i as u64).to_string(),
                    v.map(fmt_g17).unwrap_or_else(|| "error".into()),
                    fmt_g17(r.elapsed.get(i).copied().unwrap_or(f64::NAN)),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn find(&self, method: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

/// A method evaluated at a tuning value (`t` is only used by `vconv`).
#[derive(Debug, Clone)]
struct Slot {
    method: String,
    t: Option<f64>,
}

struct Cell {
    dist: Dist,
    n: usize,
    p: usize,
    c: f64,
    model: SpectralModel,
    sigma: Option<DMatrix<f64>>,
    sampler: Sampler,
}

/// Output of one replication: per-slot statistic and timing, plus the
/// baseline loss for PRIAL.
struct RepOutput {
    values: Vec<std::result::Result<f64, String>>,
    elapsed: Vec<f64>,
    baseline: std::result::Result<f64, String>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Argument(format!("cannot start {} workers: {e}", cfg.workers)))?;
    let slots = build_slots(cfg);
    let mut rows = Vec::new();
    for &dist in &cfg.dists {
        for &n in &cfg.n_list {
            for &c in &cfg.c_grid {
                let p = ((c * n as f64).round() as usize).max(1);
                let mut model = SpectralModel::new(cfg.spectrum.eigenvalues(p)?, None)?;
                if cfg.haar {
                    model = model.with_haar_basis(cfg.base_seed)?;
                }
                let sigma = match cfg.kind {
                    ExperimentKind::Prial => Some(model.covariance()),
                    _ => None,
                };
                let cell = Cell { dist, n, p, c, sampler: Sampler::new(&model), model, sigma };
                let truth = CellTruth::new(cfg.kind, &cell, &slots);
                let outputs: Vec<RepOutput> = pool.install(|| {
                    (0..cfg.reps)
                        .into_par_iter()
                        .map(|r| run_rep(cfg.kind, &cell, &slots, &truth, cfg.base_seed + r as u64))
                        .collect()
                });
                rows.extend(reduce(cfg, &cell, &slots, &outputs));
            }
        }
    }
    Ok(ResultTable { kind: cfg.kind, rows })
}

fn build_slots(cfg: &ExperimentConfig) -> Vec<Slot> {
    let mut slots = Vec::new();
    for m in &cfg.methods {
        match (cfg.kind, m.as_str()) {
            (ExperimentKind::Vconv, "hat_vt" | "hat_vt1") => {
                for &t in &cfg.t_grid {
                    slots.push(Slot { method: m.clone(), t: Some(t) });
                }
            }
            (ExperimentKind::Vconv, _) => slots.push(Slot { method: m.clone(), t: Some(0.0) }),
            _ => slots.push(Slot { method: m.clone(), t: None }),
        }
    }
    slots
}

/// Population quantities computed once per cell.
enum CellTruth {
    /// `(v(t), v'(t))` per slot, or the reason it is unavailable.
    Vconv(Vec<std::result::Result<(f64, f64), String>>),
    Prial,
    Rosv(crate::shrink_gmv::GmvTruth),
}

impl CellTruth {
    fn new(kind: ExperimentKind, cell: &Cell, slots: &[Slot]) -> Self {
        match kind {
            ExperimentKind::Vconv => {
                let cn = cell.p as f64 / cell.n as f64;
                CellTruth::Vconv(
                    slots
                        .iter()
                        .map(|s| {
                            let t = s.t.unwrap_or(0.0);
                            v_derivatives(t, 1, cn, &cell.model, DEFAULT_TOL)
                                .map(|st| (st.values[0], st.values[1]))
                                .map_err(|e| e.to_string())
                        })
                        .collect(),
                )
            }
            ExperimentKind::Prial => CellTruth::Prial,
            ExperimentKind::Rosv => CellTruth::Rosv(true_gmv(&cell.model)),
        }
    }
}

fn run_rep(kind: ExperimentKind, cell: &Cell, slots: &[Slot], truth: &CellTruth, seed: u64) -> RepOutput {
    let data = cell.sampler.draw(cell.n, cell.dist, None, seed);
    let y = match data {
        Ok(y) => y,
        Err(e) => {
            let msg = e.to_string();
            return RepOutput {
                values: slots.iter().map(|_| Err(msg.clone())).collect(),
                elapsed: vec![0.0; slots.len()],
                baseline: Err(msg),
            };
        }
    };
    let with_vectors = kind != ExperimentKind::Vconv;
    let ctx = SampleEigen::from_observations(&y, with_vectors).and_then(|e| PluginContext::from_centered_eigen(e, y.n()));
    let ctx = match ctx {
        Ok(c) => c,
        Err(e) => {
            let msg = e.to_string();
            return RepOutput {
                values: slots.iter().map(|_| Err(msg.clone())).collect(),
                elapsed: vec![0.0; slots.len()],
                baseline: Err(msg),
            };
        }
    };
    let baseline = match kind {
        ExperimentKind::Prial => {
            let sigma = cell.sigma.as_ref().expect("dense Σ for PRIAL");
            ctx.inverse_matrix(InverseKind::MoorePenrose, 0.0)
                .map(|g| frobenius_loss(&g, sigma))
                .map_err(|e| e.to_string())
        }
        _ => Ok(f64::NAN),
    };
    let mut values = Vec::with_capacity(slots.len());
    let mut elapsed = Vec::with_capacity(slots.len());
    for (i, slot) in slots.iter().enumerate() {
        let start = Instant::now();
        let v = match (kind, truth) {
            (ExperimentKind::Vconv, CellTruth::Vconv(tv)) => vconv_value(&ctx, slot, &tv[i]),
            (ExperimentKind::Prial, _) => prial_loss(&ctx, cell, slot),
            (ExperimentKind::Rosv, CellTruth::Rosv(gt)) => rosv_value(&ctx, cell, slot, gt),
            _ => Err(Error::Argument("inconsistent experiment state".into())),
        };
        elapsed.push(start.elapsed().as_secs_f64());
        values.push(v.map_err(|e| e.to_string()));
    }
    RepOutput { values, elapsed, baseline }
}

fn vconv_value(ctx: &PluginContext, slot: &Slot, truth: &std::result::Result<(f64, f64), String>) -> Result<f64> {
    let (v, v1) = truth.clone().map_err(Error::Domain)?;
    let t = slot.t.unwrap_or(0.0);
    match slot.method.as_str() {
        "hat_v0" | "hat_vt" => Ok(ctx.hat_v_derivative(0, t)? / v),
        "hat_v1" | "hat_vt1" => Ok(ctx.hat_v_derivative(1, t)? / v1),
        other => arg(format!("unknown vconv method '{other}'")),
    }
}

fn prial_loss(ctx: &PluginContext, cell: &Cell, slot: &Slot) -> Result<f64> {
    let sigma = cell.sigma.as_ref().expect("dense Σ for PRIAL");
    let p = cell.p;
    let identity = WeightMatrix::scaled_identity(p, 1.0);
    let estimate = match slot.method.as_str() {
        "true_precision" => cell.model.matrix_function(|l| 1.0 / l),
        "mp_plugin" => ctx.inverse_matrix(InverseKind::MoorePenrose, 0.0)?,
        "identity" => DMatrix::identity(p, p),
        "mp" => bona_fide_ctx(ctx, PrecisionMethod::Mp, &identity, None)?.estimate,
        "ridge" => bona_fide_ctx(ctx, PrecisionMethod::Ridge, &identity, None)?.estimate,
        "mpr" => bona_fide_ctx(ctx, PrecisionMethod::Mpr, &identity, None)?.estimate,
        "empirical_bayes" => empirical_bayes(ctx)?.estimate,
        "optimal_ridge" => optimal_ridge(ctx)?.estimate,
        "oracle_nl" => oracle_nl(ctx, sigma)?.estimate,
        other => return arg(format!("unknown prial method '{other}'")),
    };
    let loss = frobenius_loss(&estimate, sigma);
    if !loss.is_finite() {
        return Err(Error::Degenerate(format!("{} produced a non-finite loss", slot.method)));
    }
    Ok(loss)
}

fn rosv_value(ctx: &PluginContext, cell: &Cell, slot: &Slot, truth: &crate::shrink_gmv::GmvTruth) -> Result<f64> {
    let b = equal_weights(cell.p);
    let w: DVector<f64> = match slot.method.as_str() {
        "gmv_true" => truth.weights.weights.clone(),
        "plugin" => mp_weights(ctx)?,
        "mp" => bona_fide_alpha_mp_ctx(ctx, &b)?.weights,
        "reflexive" => reflexive(ctx, &b)?.weights,
        "double" => double_shrinkage(ctx, &b)?.weights,
        "equal" => b,
        other => return arg(format!("unknown rosv method '{other}'")),
    };
    let r = rosv(&w, &cell.model, truth);
    if !r.is_finite() {
        return Err(Error::Degenerate(format!("{} produced a non-finite rOSV", slot.method)));
    }
    Ok(r)
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample covariance of paired values (divisor `k − 1`).
fn cov(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len();
    if k < 2 {
        return f64::NAN;
    }
    let (mx, my) = (mean(x), mean(y));
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (k - 1) as f64
}

fn reduce(cfg: &ExperimentConfig, cell: &Cell, slots: &[Slot], outputs: &[RepOutput]) -> Vec<ResultRow> {
    let reps = outputs.len();
    slots
        .iter()
        .enumerate()
        .map(|(i, slot)| {
            let per_rep: Vec<Option<f64>> = outputs
                .iter()
                .map(|o| match (&o.values[i], &o.baseline, cfg.kind) {
                    (Ok(v), Ok(_), ExperimentKind::Prial) => Some(*v),
                    (Ok(_), Err(_), ExperimentKind::Prial) => None,
                    (Ok(v), _, _) => Some(*v),
                    _ => None,
                })
                .collect();
            let errors = per_rep.iter().filter(|v| v.is_none()).count();
            let first_error = outputs.iter().find_map(|o| match (&o.values[i], &o.baseline) {
                (Err(e), _) => Some(e.clone()),
                (_, Err(e)) if cfg.kind == ExperimentKind::Prial => Some(e.clone()),
                _ => None,
            });
            let elapsed = outputs.iter().map(|o| o.elapsed[i]).collect();
            let failed = errors as f64 > MAX_FAILURE_SHARE * reps as f64;
            let (value, spread) = if failed {
                (f64::NAN, f64::NAN)
            } else {
                summarize(cfg.kind, &per_rep, outputs)
            };
            ResultRow {
                dist: cell.dist,
                n: cell.n,
                p: cell.p,
                c: cell.c,
                t: slot.t,
                method: slot.method.clone(),
                value,
                spread,
                reps,
                errors,
                base_seed: cfg.base_seed,
                per_rep,
                elapsed,
                first_error,
            }
        })
        .collect()
}

fn summarize(kind: ExperimentKind, per_rep: &[Option<f64>], outputs: &[RepOutput]) -> (f64, f64) {
    match kind {
        ExperimentKind::Vconv | ExperimentKind::Rosv => {
            let ok: Vec<f64> = per_rep.iter().flatten().copied().collect();
            let m = mean(&ok);
            let sd = cov(&ok, &ok).sqrt();
            if kind == ExperimentKind::Vconv {
                (m, sd)
            } else {
                (m, sd / (ok.len() as f64).sqrt())
            }
        }
        ExperimentKind::Prial => {
            let (mut l, mut l0) = (Vec::new(), Vec::new());
            for (v, o) in per_rep.iter().zip(outputs) {
                if let (Some(v), Ok(b)) = (v, &o.baseline) {
                    l.push(*v);
                    l0.push(*b);
                }
            }
            let (ml, ml0) = (mean(&l), mean(&l0));
            let ratio = ml / ml0;
            let prial = (1.0 - ratio) * 100.0;
            // delta method for a ratio of paired means
            let var = (cov(&l, &l) - 2.0 * ratio * cov(&l, &l0) + ratio * ratio * cov(&l0, &l0)) / (l.len() as f64 * ml0 * ml0);
            (prial, 100.0 * var.max(0.0).sqrt())
        }
    }
}
