//! Acceptance criteria. Every criterion prints one `PASS` or `FAIL` line and
//! the process exits with a failure status if any criterion fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pseudoshrink::bellpoly::bell_partial_exact;
use pseudoshrink::detlim::{identity_closed_form, limit_moment, solve_v, v_derivatives, Family, DEFAULT_TOL};
use pseudoshrink::plugin_est::PluginContext;
use pseudoshrink::randmat::{Dist, InverseKind, Sampler, SpectralModel, WeightMatrix};
use pseudoshrink::shrink_prec::{bona_fide_ctx, PrecisionMethod};
use pseudoshrink::simlab::{run_experiment, ExperimentConfig, ExperimentKind, ResultTable};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn tr(p: usize) -> WeightMatrix {
    WeightMatrix::trace_normalized(p)
}

fn c1_bell_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    let mut checked = 0;
    for _ in 0..200 {
        let x: Vec<i64> = (0..8).map(|_| rng.random_range(-6..=6)).collect();
        for m in 1..=8 {
            for k in 1..=m {
                let got = bell_partial_exact(m, k, &x[..m - k + 1]).expect("valid arguments");
                checked += 1;
                if got != common::brute_bell(m, k, &x) {
                    mismatches += 1;
                }
            }
        }
    }
    outcome(mismatches == 0, format!("{checked} (m, k, x) cases, {mismatches} mismatches"))
}

fn c2_identity_closed_forms() -> Outcome {
    let model = SpectralModel::identity(64);
    let mut cases = Vec::new();
    for c in [2.0, 3.0] {
        for m in 1..=4 {
            cases.push((Family::Mp, m, 0.0, c));
        }
    }
    for c in [0.5, 2.0] {
        for m in 1..=4 {
            cases.push((Family::SampleCov, m, 0.0, c));
        }
    }
    for m in 1..=3 {
        cases.push((Family::Ordinary, m, 0.0, 0.5));
    }
    for c in [0.5, 2.0] {
        for t in [0.5, 1.0, 2.0] {
            for m in 1..=3 {
                cases.push((Family::Ridge, m, t, c));
            }
            for m in 1..=2 {
                cases.push((Family::Mpr, m, t, c));
            }
        }
    }
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for &(family, m, t, c) in &cases {
        let lim = limit_moment(family, m, t, &tr(64), c, &model).map(|l| l.value);
        let closed = identity_closed_form(family, m, t, c);
        match (lim, closed) {
            (Ok(a), Ok(b)) => {
                let err = (a - b).abs() / b.abs().max(1.0);
                worst = worst.max(err);
                if err > 1e-9 {
                    failures.push(format!("{family} m={m} t={t} c={c}"));
                }
            }
            _ => failures.push(format!("{family} m={m} t={t} c={c} errored")),
        }
    }
    let seq: Vec<f64> = (1..=4).map(|m| limit_moment(Family::Mp, m, 0.0, &tr(64), 2.0, &model).unwrap().value).collect();
    let seq_ok = seq.iter().zip([0.5, 1.0, 3.0, 11.0]).all(|(a, b)| (a - b).abs() < 1e-9);
    outcome(
        failures.is_empty() && seq_ok,
        format!("{} cases, worst error {worst:.1e}, mp at c = 2: {seq:?} {failures:?}", cases.len()),
    )
}

fn c3_derivatives_vs_differences() -> Outcome {
    let model = SpectralModel::paper_mix(200);
    let mut worst = 0.0f64;
    for c in [1.5, 3.0] {
        for t in [0.5, 2.0] {
            let st = v_derivatives(t, 3, c, &model, DEFAULT_TOL).expect("derivatives");
            let v = |x: f64| solve_v(x, c, &model, DEFAULT_TOL).expect("v");
            for j in 1..=3 {
                let fd = common::richardson_derivative(v, t, j, 0.05 * t);
                worst = worst.max((st.values[j] - fd).abs() / fd.abs());
            }
        }
    }
    outcome(worst < 1e-6, format!("worst relative gap {worst:.2e}"))
}

/// `(1/p) tr[(S⁺)^m]`, m = 1..=3, from the nonzero eigenvalues of the
/// centred Gram matrix.
fn empirical_mp_moments(y: &DMatrix<f64>) -> [f64; 3] {
    let (p, n) = y.shape();
    let mut yc = y.clone();
    for mut row in yc.row_iter_mut() {
        let m = row.mean();
        row.add_scalar_mut(-m);
    }
    let gram = yc.tr_mul(&yc) / n as f64;
    let vals = gram.symmetric_eigenvalues();
    let top = vals.max();
    let mut out = [0.0; 3];
    for &l in vals.iter().filter(|&&l| l > 1e-10 * top) {
        for (m, o) in out.iter_mut().enumerate() {
            *o += l.powi(-(m as i32 + 1)) / p as f64;
        }
    }
    out
}

fn c4_moment_consistency() -> Outcome {
    let (p, n, reps) = (800, 400, 20u64);
    let model = SpectralModel::paper_mix(p);
    let sampler = Sampler::new(&model);
    let sums: Vec<[f64; 3]> = (0..reps)
        .into_par_iter()
        .map(|seed| empirical_mp_moments(sampler.draw(n, Dist::Normal, None, 100 + seed).expect("draw").data()))
        .collect();
    let mut parts = Vec::new();
    let mut pass = true;
    for (m, tol) in [(1, 0.05), (2, 0.05), (3, 0.10)] {
        let emp = sums.iter().map(|s| s[m - 1]).sum::<f64>() / reps as f64;
        let lim = limit_moment(Family::Mp, m, 0.0, &tr(p), 2.0, &model).expect("limit").value;
        let rel = (emp / lim - 1.0).abs();
        pass &= rel < tol;
        parts.push(format!("m={m}: {emp:.5} vs {lim:.5} ({:.2}%)", 100.0 * rel));
    }
    outcome(pass, parts.join(", "))
}

fn vconv(n: usize, c: f64, reps: usize) -> ResultTable {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Vconv);
    cfg.n_list = vec![n];
    cfg.c_grid = vec![c];
    cfg.reps = reps;
    cfg.methods = vec!["hat_v0".into(), "hat_v1".into()];
    cfg.workers = rayon::current_num_threads();
    run_experiment(&cfg).expect("vconv experiment")
}

fn mean_abs_dev(t: &ResultTable, method: &str) -> f64 {
    let r = t.find(method).expect("row");
    let ok: Vec<f64> = r.per_rep.iter().flatten().map(|x| (x - 1.0).abs()).collect();
    if ok.len() < r.reps {
        return f64::NAN;
    }
    ok.iter().sum::<f64>() / ok.len() as f64
}

fn c5_estimator_convergence() -> Outcome {
    let big = vconv(500, 3.0, 50);
    let (d0, d1) = (mean_abs_dev(&big, "hat_v0"), mean_abs_dev(&big, "hat_v1"));
    let hi = vconv(100, 3.0, 50);
    let lo = vconv(100, 1.2, 50);
    let (h0, h1) = (mean_abs_dev(&hi, "hat_v0"), mean_abs_dev(&hi, "hat_v1"));
    let (l0, l1) = (mean_abs_dev(&lo, "hat_v0"), mean_abs_dev(&lo, "hat_v1"));
    let pass = d0 < 0.03 && d1 < 0.08 && h0 < l0 && h1 < l1;
    outcome(
        pass,
        format!("n=500 c=3: v {d0:.4}, v' {d1:.4}; n=100: c=3 ({h0:.4}, {h1:.4}) vs c=1.2 ({l0:.4}, {l1:.4})"),
    )
}

fn c6_v_decreasing() -> Outcome {
    let model = SpectralModel::paper_mix(200);
    let mut violations = 0;
    for c in [1.5, 2.0, 4.0] {
        let vs: Vec<f64> = (0..50).map(|i| solve_v(10.0 * i as f64 / 49.0, c, &model, DEFAULT_TOL).expect("v")).collect();
        violations += vs.windows(2).filter(|w| !(w[1] < w[0])).count();
    }
    outcome(violations == 0, format!("{violations} violations over 3 × 50 grid points"))
}

fn c7_mpr_handoff() -> Outcome {
    let model = SpectralModel::paper_mix(200);
    let theta = tr(200);
    let mut ratios = Vec::new();
    for m in 1..=2 {
        let s = limit_moment(Family::Mp, m, 0.0, &theta, 2.0, &model).expect("mp").value;
        let gap = |t: f64| (limit_moment(Family::Mpr, m, t, &theta, 2.0, &model).expect("mpr").value - s).abs();
        ratios.push(gap(1e-4) / gap(1e-3));
    }
    outcome(ratios.iter().all(|r| *r <= 0.12), format!("gap ratios {ratios:.4?}"))
}

fn c8_prial_ordering() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Prial);
    cfg.n_list = vec![100];
    cfg.c_grid = vec![2.0];
    cfg.reps = 50;
    cfg.methods = ["mp", "ridge", "empirical_bayes", "oracle_nl"].map(String::from).to_vec();
    cfg.workers = rayon::current_num_threads();
    let t = run_experiment(&cfg).expect("prial experiment");
    let v = |m: &str| t.find(m).expect("row").value;
    let (mp, ridge, eb, or) = (v("mp"), v("ridge"), v("empirical_bayes"), v("oracle_nl"));
    let pass = mp > 0.0 && ridge >= mp - 2.0 && ridge >= eb && or >= ridge - 3.0;
    outcome(pass, format!("PRIAL %: mp {mp:.2}, ridge {ridge:.2}, eb {eb:.2}, oracle_nl {or:.2}"))
}

fn c9_rosv_ordering() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Rosv);
    cfg.n_list = vec![100];
    cfg.c_grid = vec![4.0];
    cfg.reps = 50;
    cfg.methods = ["mp", "plugin", "reflexive"].map(String::from).to_vec();
    cfg.workers = rayon::current_num_threads();
    let t = run_experiment(&cfg).expect("rosv experiment");
    let v = |m: &str| t.find(m).expect("row").value;
    let (mp, plugin, refl) = (v("mp"), v("plugin"), v("reflexive"));
    outcome(mp < plugin && mp <= refl, format!("mean rOSV: mp {mp:.4}, plugin {plugin:.4}, reflexive {refl:.4}"))
}

/// Minimizer of `‖(αG + βI)Σ − I‖²_F` for diagonal `Σ`, from the 2 × 2
/// normal equations.
fn oracle_alpha_beta(g: &DMatrix<f64>, sigma: &[f64]) -> (f64, f64) {
    let x = DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| g[(i, j)] * sigma[j]);
    let xx = x.norm_squared();
    let xz: f64 = (0..sigma.len()).map(|i| x[(i, i)] * sigma[i]).sum();
    let zz: f64 = sigma.iter().map(|s| s * s).sum();
    let (rx, rz) = (x.trace(), sigma.iter().sum::<f64>());
    let det = xx * zz - xz * xz;
    ((rx * zz - rz * xz) / det, (xx * rz - xz * rx) / det)
}

fn c10_intensities() -> Outcome {
    let (n, p, reps) = (250, 500, 50u64);
    let model = SpectralModel::paper_mix(p);
    let sigma = model.eigenvalues().to_vec();
    let sampler = Sampler::new(&model);
    let target = WeightMatrix::scaled_identity(p, 1.0);
    let errs: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|seed| {
            let y = sampler.draw(n, Dist::Normal, None, 500 + seed).expect("draw");
            let ctx = PluginContext::from_observations(&y).expect("context");
            let plan = bona_fide_ctx(&ctx, PrecisionMethod::Mp, &target, None).expect("plan");
            let g = ctx.inverse_matrix(InverseKind::MoorePenrose, 0.0).expect("S⁺");
            let (a, b) = oracle_alpha_beta(&g, &sigma);
            ((plan.alpha - a).abs() / a.abs(), (plan.beta - b).abs() / b.abs())
        })
        .collect();
    let ea = errs.iter().map(|e| e.0).sum::<f64>() / reps as f64;
    let eb = errs.iter().map(|e| e.1).sum::<f64>() / reps as f64;
    outcome(ea < 0.10 && eb < 0.10, format!("mean relative error: alpha {ea:.4}, beta {eb:.4}"))
}

fn c11_determinism() -> Outcome {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let cfg = dir.join("acceptance_determinism.txt");
    std::fs::write(&cfg, "kind=prial\nn=40\nc=2\nreps=16\nseed=7\nmethods=mp,ridge,mpr,empirical_bayes,oracle_nl\n").expect("config");
    let mut outputs = Vec::new();
    for kind in ["prial", "rosv", "vconv"] {
        for w in ["1", "2", "8"] {
            let o = Command::new(env!("CARGO_BIN_EXE_pseudoshrink"))
                .args(["simulate", "--config", cfg.to_str().unwrap(), "--workers", w])
                .args(if kind == "prial" { vec![] } else { vec!["--kind", kind, "--methods", default_for(kind)] })
                .output()
                .expect("simulate runs");
            if !o.status.success() {
                return outcome(false, format!("{kind} with {w} workers: {}", String::from_utf8_lossy(&o.stderr)));
            }
            outputs.push((kind, o.stdout));
        }
    }
    let same = outputs.chunks(3).all(|c| c[0].1 == c[1].1 && c[0].1 == c[2].1);
    outcome(same, format!("{} runs of prial, rosv and vconv over 1, 2, 8 workers", outputs.len()))
}

fn default_for(kind: &str) -> &'static str {
    match kind {
        "rosv" => "plugin,mp,reflexive,double",
        _ => "hat_v0,hat_v1,hat_vt,hat_vt1",
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "Bell polynomials against partition enumeration", c1_bell_oracle),
        (2, "identity-covariance closed forms", c2_identity_closed_forms),
        (3, "v derivatives against finite differences", c3_derivatives_vs_differences),
        (4, "stochastic moment consistency", c4_moment_consistency),
        (5, "estimator convergence", c5_estimator_convergence),
        (6, "v strictly decreasing", c6_v_decreasing),
        (7, "MPR to MP handoff", c7_mpr_handoff),
        (8, "PRIAL ordering", c8_prial_ordering),
        (9, "rOSV ordering", c9_rosv_ordering),
        (10, "bona fide against oracle intensities", c10_intensities),
        (11, "determinism across worker counts", c11_determinism),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status}: {name} [{:.1}s] {}", start.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
