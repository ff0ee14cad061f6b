//! Command line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;

use pseudoshrink::detlim::{limit_moment, Family};
use pseudoshrink::plugin_est::PluginContext;
use pseudoshrink::randmat::{
    read_matrix_csv, read_spectrum, write_matrix_csv, ObservationMatrix, SpectralModel, WeightMatrix,
};
use pseudoshrink::shrink_gmv::{bona_fide_alpha_mp_ctx, double_shrinkage, equal_weights, mp_weights, reflexive, GmvMethod, PortfolioWeights};
use pseudoshrink::shrink_prec::{bona_fide_ctx, empirical_bayes, optimal_ridge, PrecisionMethod};
use pseudoshrink::simlab::{fmt_g17, run_experiment, ExperimentConfig, ExperimentKind};
use pseudoshrink::{Error, Result};

#[derive(Parser)]
#[command(name = "pseudoshrink", version, about = "Generalized-inverse limits, plug-in estimators and shrinkage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deterministic equivalent of tr(G^m Θ).
    Limits(LimitsArgs),
    /// Plug-in estimates from a data file, printed as key=value lines.
    Estimate(EstimateArgs),
    /// Bona fide shrinkage estimator of the precision matrix.
    ShrinkPrecision(PrecisionArgs),
    /// Shrinkage estimator of GMV portfolio weights.
    ShrinkGmv(GmvArgs),
    /// Monte Carlo experiment written as CSV.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct LimitsArgs {
    /// `identity`, `paper` or a file of eigenvalues.
    #[arg(long, default_value = "identity")]
    spectrum: String,
    /// Dimension for the built-in spectra.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    cn: f64,
    /// mp, ridge, mpr, samplecov or ordinary.
    #[arg(long)]
    family: Family,
    /// Power of the inverse (of S for samplecov).
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    /// `trace` (Θ = I/p), `identity` or a CSV matrix.
    #[arg(long, default_value = "trace")]
    theta: String,
}

#[derive(Args)]
struct DataArgs {
    /// Headerless CSV of observations.
    #[arg(long)]
    data: PathBuf,
    /// The file is p × n (one observation per column) instead of n × p.
    #[arg(long)]
    n_is_columns: bool,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Ridge parameter; 0 selects the Moore-Penrose estimators.
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long, default_value = "trace")]
    theta: String,
    /// Highest derivative order of v̂.
    #[arg(long, default_value_t = 3)]
    max_order: usize,
}

#[derive(Args)]
struct PrecisionArgs {
    #[command(flatten)]
    data: DataArgs,
    /// mp, ridge, mpr, eb or or.
    #[arg(long)]
    method: PrecisionMethod,
    /// `identity` or a CSV matrix.
    #[arg(long, default_value = "identity")]
    target: String,
    /// Fixed tuning value; searched when omitted.
    #[arg(long)]
    t: Option<f64>,
    /// Where to write the estimate.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GmvArgs {
    #[command(flatten)]
    data: DataArgs,
    /// mp, plugin, reflexive or double.
    #[arg(long)]
    method: GmvMethod,
    /// `equal` or a file of target weights.
    #[arg(long, default_value = "equal")]
    target: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// key=value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kind: Option<ExperimentKind>,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    spectrum: Option<String>,
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// haar or identity.
    #[arg(long)]
    basis: Option<String>,
    /// Table destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional per-replication values with timings.
    #[arg(long)]
    per_rep: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Limits(a) => limits(a),
        Command::Estimate(a) => estimate(a),
        Command::ShrinkPrecision(a) => shrink_precision(a),
        Command::ShrinkGmv(a) => shrink_gmv(a),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn model_from(spec: &str, p: Option<usize>) -> Result<SpectralModel> {
    let need_p = || p.ok_or_else(|| Error::Argument(format!("--p is required with --spectrum {spec}")));
    match spec {
        "identity" => Ok(SpectralModel::identity(need_p()?)),
        "paper" | "paper_mix" => Ok(SpectralModel::paper_mix(need_p()?)),
        path => {
            let eig = read_spectrum(Path::new(path))?;
            if let Some(p) = p {
                if p != eig.len() {
                    return Err(Error::Argument(format!("--p {p} disagrees with {} eigenvalues in {path}", eig.len())));
                }
            }
            SpectralModel::new(eig, None)
        }
    }
}

fn theta_from(spec: &str, p: usize) -> Result<WeightMatrix> {
    match spec {
        "trace" => Ok(WeightMatrix::trace_normalized(p)),
        "identity" => Ok(WeightMatrix::scaled_identity(p, 1.0)),
        path => {
            let m = read_matrix_csv(Path::new(path))?;
            if m.shape() != (p, p) {
                return Err(Error::Argument(format!("Θ must be {p} × {p}, got {} × {}", m.nrows(), m.ncols())));
            }
            WeightMatrix::symmetrized(&m)
        }
    }
}

fn load_data(d: &DataArgs) -> Result<ObservationMatrix> {
    let m = read_matrix_csv(&d.data)?;
    ObservationMatrix::new(if d.n_is_columns { m } else { m.transpose() })
}

fn limits(a: LimitsArgs) -> Result<()> {
    let model = model_from(&a.spectrum, a.p)?;
    let theta = theta_from(&a.theta, model.p())?;
    let lim = limit_moment(a.family, a.m, a.t, &theta, a.cn, &model)?;
    println!("{:?}", round_sig(lim.value, 12));
    Ok(())
}

/// Rounds to `digits` significant digits; the limits carry about that many.
fn round_sig(v: f64, digits: usize) -> f64 {
    if !v.is_finite() {
        return v;
    }
    format!("{:.*e}", digits - 1, v).parse().unwrap_or(v)
}

fn report(key: &str, r: Result<f64>) {
    match r {
        Ok(v) => println!("{key}={}", fmt_g17(v)),
        Err(e) => eprintln!("{key}: {e}"),
    }
}

fn estimate(a: EstimateArgs) -> Result<()> {
    let y = load_data(&a.data)?;
    let ctx = PluginContext::from_observations(&y)?;
    let theta = theta_from(&a.theta, ctx.p())?;
    let proj = ctx.project(&theta)?;
    println!("p={}", ctx.p());
    println!("n={}", ctx.n());
    println!("cn={}", fmt_g17(ctx.cn()));
    println!("t={}", fmt_g17(a.t));
    for m in 0..=a.max_order {
        report(&format!("v{m}"), ctx.hat_v_derivative(m, a.t));
    }
    if a.t == 0.0 {
        for k in [2, 3] {
            report(&format!("h{k}"), ctx.hat_h(k));
        }
    }
    let dmax = if a.t == 0.0 { 3 } else { 1 };
    for k in 0..=dmax {
        report(&format!("d{k}"), ctx.hat_d_projected(k, &proj, a.t));
    }
    for k in [1, 2] {
        report(&format!("q{k}"), ctx.hat_q_projected(k, &proj));
    }
    Ok(())
}

fn shrink_precision(a: PrecisionArgs) -> Result<()> {
    let y = load_data(&a.data)?;
    let ctx = PluginContext::from_observations(&y)?;
    let target = match a.target.as_str() {
        "identity" => WeightMatrix::scaled_identity(ctx.p(), 1.0),
        _ => theta_from(&a.target, ctx.p())?,
    };
    let plan = match a.method {
        PrecisionMethod::Mp | PrecisionMethod::Ridge | PrecisionMethod::Mpr => bona_fide_ctx(&ctx, a.method, &target, a.t)?,
        PrecisionMethod::EmpiricalBayes => empirical_bayes(&ctx)?,
        PrecisionMethod::OptimalRidge => optimal_ridge(&ctx)?,
        PrecisionMethod::OracleNl => {
            return Err(Error::Argument("oracle_nl needs the true covariance and is not available here".into()))
        }
    };
    println!("method={}", plan.method);
    println!("alpha={}", fmt_g17(plan.alpha));
    println!("beta={}", fmt_g17(plan.beta));
    println!("t_star={}", fmt_g17(plan.t_star));
    if let Some(o) = plan.objective {
        println!("objective={}", fmt_g17(o));
    }
    println!("flags={}", plan.flags.join(","));
    if let Some(out) = &a.out {
        write_matrix_csv(out, &plan.estimate)?;
    }
    Ok(())
}

fn shrink_gmv(a: GmvArgs) -> Result<()> {
    let y = load_data(&a.data)?;
    let ctx = PluginContext::from_observations(&y)?;
    let b = match a.target.as_str() {
        "equal" => equal_weights(ctx.p()),
        path => DVector::from_vec(read_spectrum(Path::new(path))?),
    };
    if b.len() != ctx.p() {
        return Err(Error::Argument(format!("target has {} weights, expected {}", b.len(), ctx.p())));
    }
    let pw: PortfolioWeights = match a.method {
        GmvMethod::Mp => bona_fide_alpha_mp_ctx(&ctx, &b)?,
        GmvMethod::Reflexive => reflexive(&ctx, &b)?,
        GmvMethod::Double => double_shrinkage(&ctx, &b)?,
        GmvMethod::Plugin => PortfolioWeights {
            weights: mp_weights(&ctx)?,
            method: GmvMethod::Plugin,
            alpha: None,
            eta: None,
            target: None,
            flags: Vec::new(),
        },
        other => return Err(Error::Argument(format!("method {other} is not a data-driven estimator"))),
    };
    println!("method={}", pw.method);
    if let Some(alpha) = pw.alpha {
        println!("alpha={}", fmt_g17(alpha));
    }
    if let Some(eta) = pw.eta {
        println!("eta={}", fmt_g17(eta));
    }
    println!("flags={}", pw.flags.join(","));
    match &a.out {
        Some(out) => write_matrix_csv(out, &nalgebra::DMatrix::from_column_slice(pw.weights.len(), 1, pw.weights.as_slice()))?,
        None => {
            for w in pw.weights.iter() {
                println!("{}", fmt_g17(*w));
            }
        }
    }
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = match (&a.config, a.kind) {
        (Some(path), _) => ExperimentConfig::from_kv(&std::fs::read_to_string(path)?)?,
        (None, Some(kind)) => ExperimentConfig::new(kind),
        (None, None) => return Err(Error::Argument("either --kind or --config is required".into())),
    };
    if let Some(kind) = a.kind {
        cfg.set("kind", kind.tag())?;
    }
    let overrides = [
        ("dist", a.dist),
        ("n", a.n),
        ("c", a.c),
        ("t", a.t),
        ("reps", a.reps.map(|v| v.to_string())),
        ("seed", a.seed.map(|v| v.to_string())),
        ("spectrum", a.spectrum),
        ("methods", a.methods),
        ("workers", a.workers.map(|v| v.to_string())),
        ("basis", a.basis),
    ];
    for (k, v) in overrides {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    let table = run_experiment(&cfg)?;
    let csv = table.to_csv()?;
    match &a.out {
        Some(out) => std::fs::write(out, csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &a.per_rep {
        std::fs::write(path, table.per_rep_csv()?)?;
    }
    Ok(())
}
