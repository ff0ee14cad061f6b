//! Global minimum variance portfolio weights and their shrinkage towards a
//! target portfolio `b`: `ŵ = α w_{S^#} + (1 − α) b`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::detlim::sandwich_combination;
use crate::error::{arg, degenerate, domain, Error, Result};
use crate::plugin_est::PluginContext;
use crate::randmat::{ObservationMatrix, SpectralModel, WeightMatrix};
use crate::search::search_tstar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GmvMethod {
    True,
    Plugin,
    Mp,
    Reflexive,
    Double,
    Target,
}

impl GmvMethod {
    pub fn tag(self) -> &'static str {
        match self {
            Self::True => "gmv_true",
            Self::Plugin => "plugin",
            Self::Mp => "mp",
            Self::Reflexive => "reflexive",
            Self::Double => "double",
            Self::Target => "target",
        }
    }
}

impl fmt::Display for GmvMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for GmvMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gmv_true" | "true" => Ok(Self::True),
            "plugin" => Ok(Self::Plugin),
            "mp" => Ok(Self::Mp),
            "reflexive" => Ok(Self::Reflexive),
            "double" | "double_shrinkage" => Ok(Self::Double),
            "target" | "equal" => Ok(Self::Target),
            other => arg(format!("unknown portfolio method '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PortfolioWeights {
    pub weights: DVector<f64>,
    pub method: GmvMethod,
    pub alpha: Option<f64>,
    /// Ridge parameter of the double shrinkage benchmark.
    pub eta: Option<f64>,
    pub target: Option<DVector<f64>>,
    pub flags: Vec<String>,
}

impl PortfolioWeights {
    fn plain(weights: DVector<f64>, method: GmvMethod) -> Self {
        Self { weights, method, alpha: None, eta: None, target: None, flags: Vec::new() }
    }

    fn shrunk(w: &DVector<f64>, b: &DVector<f64>, alpha: f64, method: GmvMethod) -> Self {
        let weights = w * alpha + b * (1.0 - alpha);
        let mut flags = Vec::new();
        if !(0.0..=1.0).contains(&alpha) {
            flags.push("alpha_outside_unit_interval".to_string());
        }
        Self { weights, method, alpha: Some(alpha), eta: None, target: Some(b.clone()), flags }
    }

    /// `wᵀ Σ w`.
    pub fn variance(&self, model: &SpectralModel) -> f64 {
        model.quad_form(&self.weights, |l| l)
    }
}

#[derive(Debug, Clone)]
pub struct GmvTruth {
    pub weights: PortfolioWeights,
    /// `V = 1 / (1ᵀ Σ^{-1} 1)`.
    pub variance: f64,
}

pub fn equal_weights(p: usize) -> DVector<f64> {
    DVector::from_element(p, 1.0 / p as f64)
}

pub fn true_gmv(model: &SpectralModel) -> GmvTruth {
    let ones = DVector::from_element(model.p(), 1.0);
    let x = model.apply(&ones, |l| 1.0 / l);
    let s = x.sum();
    GmvTruth { weights: PortfolioWeights::plain(&x / s, GmvMethod::True), variance: 1.0 / s }
}

/// Relative out-of-sample variance `wᵀΣw / V − 1`.
pub fn rosv(weights: &DVector<f64>, model: &SpectralModel, truth: &GmvTruth) -> f64 {
    model.quad_form(weights, |l| l) / truth.variance - 1.0
}

/// `G1 / (1ᵀG1)`.
pub fn plugin_weights(ginv: &DMatrix<f64>) -> Result<PortfolioWeights> {
    let g1 = ginv.column_sum();
    let s = g1.sum();
    if s.abs() < 1e-12 {
        return degenerate("1ᵀG1 vanishes");
    }
    Ok(PortfolioWeights::plain(g1 / s, GmvMethod::Plugin))
}

/// Moore-Penrose plug-in weights `S⁺1 / (1ᵀS⁺1)` from the thin spectrum.
pub fn mp_weights(ctx: &PluginContext) -> Result<DVector<f64>> {
    let u = ctx.eigen().require_vectors()?;
    let ones = DVector::from_element(ctx.p(), 1.0);
    let mut z = u.tr_mul(&ones);
    for (zj, l) in z.iter_mut().zip(ctx.eigen().values()) {
        *zj /= l;
    }
    let x = u * z;
    let s = x.sum();
    if s.abs() < 1e-12 {
        return degenerate("1ᵀS⁺1 vanishes");
    }
    Ok(x / s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleAlpha {
    pub alpha: f64,
    pub objective: f64,
}

/// Oracle intensity for the shrinkage of `w = G1/(1ᵀG1)` towards `b`.
pub fn oracle_alpha(ginv: &DMatrix<f64>, model: &SpectralModel, b: &DVector<f64>) -> Result<OracleAlpha> {
    let w = plugin_weights(ginv)?.weights;
    oracle_alpha_for(&w, model, b)
}

/// `α* = bᵀΣ(b − w) / (b − w)ᵀΣ(b − w)` and
/// `L = (bᵀΣ(b − w))² / (bᵀΣb · (b − w)ᵀΣ(b − w))`.
pub fn oracle_alpha_for(w: &DVector<f64>, model: &SpectralModel, b: &DVector<f64>) -> Result<OracleAlpha> {
    if w.len() != model.p() || b.len() != model.p() {
        return arg("portfolio dimensions disagree");
    }
    let diff = b - w;
    let sd = model.apply(&diff, |l| l);
    let den = diff.dot(&sd);
    if !(den > 0.0) {
        return degenerate("(b − w)ᵀΣ(b − w) vanishes; the plug-in weights equal the target");
    }
    let num = b.dot(&sd);
    let bsb = model.quad_form(b, |l| l);
    Ok(OracleAlpha { alpha: num / den, objective: num * num / (bsb * den) })
}

fn check_target(b: &DVector<f64>, p: usize) -> Result<()> {
    if b.len() != p {
        return arg(format!("target has length {}, expected {p}", b.len()));
    }
    if (b.sum() - 1.0).abs() > 1e-10 {
        return arg(format!("target weights must sum to 1, got {}", b.sum()));
    }
    Ok(())
}

/// `p bᵀ S b`.
fn p_bsb(ctx: &PluginContext, b: &DVector<f64>) -> Result<f64> {
    let u = ctx.eigen().require_vectors()?;
    let z = u.tr_mul(b);
    Ok(ctx.p() as f64 * z.iter().zip(ctx.eigen().values()).map(|(x, l)| l * x * x).sum::<f64>())
}

/// Bona fide Moore-Penrose shrinkage of the GMV weights.
pub fn bona_fide_alpha_mp(y: &ObservationMatrix, b: &DVector<f64>) -> Result<PortfolioWeights> {
    let ctx = PluginContext::from_observations(y)?;
    bona_fide_alpha_mp_ctx(&ctx, b)
}

/// How the out-of-sample quadratic form `wᵀΣw` of the sample weights enters
/// an estimated intensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SandwichForm {
    /// Two-resolvent deterministic equivalent: the leading term plus the
    /// fluctuation of its normalizing denominator.
    #[default]
    Consistent,
    /// Leading term only: `d̂_3/d̂_1²` for the Moore-Penrose weights and
    /// `(1 − v̂_2) d_2` for the ridge weights. Biased low (by a factor 4 at
    /// `Σ = I`, `c = 2` for the Moore-Penrose case); kept for comparison.
    LeadingOnly,
}

pub fn bona_fide_alpha_mp_ctx(ctx: &PluginContext, b: &DVector<f64>) -> Result<PortfolioWeights> {
    bona_fide_alpha_mp_form(ctx, b, SandwichForm::Consistent)
}

pub fn bona_fide_alpha_mp_form(ctx: &PluginContext, b: &DVector<f64>, form: SandwichForm) -> Result<PortfolioWeights> {
    // the weights are scale invariant, so only the intensity uses the view
    let (ectx, _) = ctx.effective()?;
    let (near_singular, n) = (ctx.near_singular(), ctx.n());
    let ctx = &ectx;
    let p = ctx.p();
    check_target(b, p)?;
    if p <= n {
        return domain("the Moore-Penrose GMV shrinkage needs p > n");
    }
    let ones = DVector::from_element(p, 1.0);
    let th11 = WeightMatrix::rank_one(ones.clone(), 1.0 / p as f64)?;
    let th1b = WeightMatrix::symmetrized_outer(&ones, b)?;
    let v0 = ctx.hat_v_derivative(0, 0.0)?;
    let d1_11 = ctx.hat_d(1, &th11, 0.0)?;
    let d3_11 = ctx.hat_d(3, &th11, 0.0)?;
    let d1_1b = ctx.hat_d(1, &th1b, 0.0)?;
    let d0_1b = ctx.hat_d(0, &th1b, 0.0)?;
    if d1_11 == 0.0 {
        return degenerate("d̂_1(11ᵀ/p) vanishes");
    }
    // tr(1bᵀ) = bᵀ1 = 1
    let d1_1bs = ((1.0 - d0_1b) / v0 - d1_1b) / v0;
    let r = d1_1bs / d1_11;
    let pb = p_bsb(ctx, b)?;
    let quad = match form {
        SandwichForm::LeadingOnly => d3_11 / (d1_11 * d1_11),
        SandwichForm::Consistent => {
            let d2_11 = ctx.hat_d(2, &th11, 0.0)?;
            let h = [ctx.hat_h(2)?, ctx.hat_h(3)?, ctx.hat_h(4)?];
            sandwich_combination(v0, [d1_11, d2_11, d3_11], h) / (d1_11 * d1_11)
        }
    };
    let den = pb - 2.0 * r + quad;
    if !(den > 0.0) {
        return degenerate(format!("α̂ denominator is {den}"));
    }
    let alpha = (pb - r) / den;
    let w = mp_weights(ctx)?;
    let mut out = PortfolioWeights::shrunk(&w, b, alpha, GmvMethod::Mp);
    if near_singular {
        out.flags.push("near_singular".into());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmvBenchmark {
    Reflexive,
    DoubleShrinkage,
}

pub fn benchmark(method: GmvBenchmark, y: &ObservationMatrix, b: &DVector<f64>) -> Result<PortfolioWeights> {
    let ctx = PluginContext::from_observations(y)?;
    match method {
        GmvBenchmark::Reflexive => reflexive(&ctx, b),
        GmvBenchmark::DoubleShrinkage => double_shrinkage(&ctx, b),
    }
}

/// Intensity of the reflexive-inverse benchmark for a given `R̂`.
pub fn reflexive_alpha(cn: f64, r_hat: f64) -> f64 {
    let k = cn - 1.0;
    k * r_hat / (k * k + cn + k * r_hat)
}

pub fn reflexive(ctx: &PluginContext, b: &DVector<f64>) -> Result<PortfolioWeights> {
    let p = ctx.p();
    check_target(b, p)?;
    if p <= ctx.n() {
        return domain("the reflexive benchmark needs p > n");
    }
    let c = ctx.cn();
    let u = ctx.eigen().require_vectors()?;
    let z = u.tr_mul(&DVector::from_element(p, 1.0));
    let one_sp_one: f64 = z.iter().zip(ctx.eigen().values()).map(|(x, l)| x * x / l).sum();
    let bsb = p_bsb(ctx, b)? / p as f64;
    let r_hat = c * (c - 1.0) * bsb * one_sp_one - 1.0;
    let alpha = reflexive_alpha(c, r_hat);
    if !alpha.is_finite() {
        return degenerate("reflexive intensity is not finite");
    }
    let w = mp_weights(ctx)?;
    Ok(PortfolioWeights::shrunk(&w, b, alpha, GmvMethod::Reflexive))
}

#[derive(Debug, Clone, Copy)]
struct DoubleFit {
    alpha: f64,
    objective: f64,
    v_hat: f64,
}

/// Spectral summaries of `S⁻(η) = (S + ηI)^{-1}` needed by the double
/// shrinkage benchmark.
struct DoubleInputs {
    lam: Vec<f64>,
    z1: Vec<f64>,
    zb: Vec<f64>,
    sum1: f64,
    sum1b: f64,
    p: f64,
    c: f64,
    bsb: f64,
}

impl DoubleInputs {
    fn new(ctx: &PluginContext, b: &DVector<f64>) -> Result<Self> {
        let p = ctx.p();
        let u = ctx.eigen().require_vectors()?;
        let ones = DVector::from_element(p, 1.0);
        let z1: Vec<f64> = u.tr_mul(&ones).iter().copied().collect();
        let zb: Vec<f64> = u.tr_mul(b).iter().copied().collect();
        let bsb = p_bsb(ctx, b)? / p as f64;
        Ok(Self {
            lam: ctx.eigen().values().to_vec(),
            z1,
            zb,
            sum1: p as f64,
            sum1b: b.sum(),
            p: p as f64,
            c: ctx.cn(),
            bsb,
        })
    }

    /// `xᵀ f(S) y` with `f(0) = f0` on the null space.
    fn bilinear(&self, zx: &[f64], zy: &[f64], xy: f64, f: impl Fn(f64) -> f64, f0: f64) -> f64 {
        let nz: f64 = self.lam.iter().zip(zx.iter().zip(zy)).map(|(&l, (a, b))| (f(l) - f0) * a * b).sum();
        nz + f0 * xy
    }

    fn mean(&self, f: impl Fn(f64) -> f64, f0: f64) -> f64 {
        let nz: f64 = self.lam.iter().map(|&l| f(l) - f0).sum();
        (nz + f0 * self.p) / self.p
    }

    fn fit(&self, eta: f64, form: SandwichForm) -> DoubleFit {
        let c = self.c;
        let r1 = |l: f64| 1.0 / (l + eta);
        let r2 = |l: f64| (l + eta).powi(-2);
        let tr1 = self.mean(r1, 1.0 / eta);
        let tr2 = self.mean(r2, eta.powi(-2));
        let a1 = self.bilinear(&self.z1, &self.z1, self.sum1, r1, 1.0 / eta);
        let a2 = self.bilinear(&self.z1, &self.z1, self.sum1, r2, eta.powi(-2));
        let bs1 = self.bilinear(&self.zb, &self.z1, self.sum1b, r1, 1.0 / eta);
        let v = 1.0 - c * (1.0 - eta * tr1);
        // derivative of v in η
        let vp = c * (tr1 - eta * tr2);
        let k = 1.0 / (1.0 + eta);
        let d1 = (1.0 + eta) / v * (1.0 - eta * bs1);
        // estimate of 1ᵀS⁻ΣS⁻1
        let quad = match form {
            SandwichForm::LeadingOnly => {
                let v1 = v * vp;
                let v2 = 1.0 - 1.0 / v + eta * v1 / (v * v);
                let d2 = (1.0 + eta).powi(2) / v * (a1 - eta * a2);
                k * k * (1.0 - v2) * d2
            }
            SandwichForm::Consistent => {
                let m2 = (v * tr2 - vp * tr1) / (v - eta * vp);
                let den = 1.0 - c * (1.0 - 2.0 * eta * tr1 + eta * eta * m2);
                (a1 - eta * a2) / ((v - eta * vp) * den)
            }
        };
        let num = 1.0 - k / self.bsb * d1 / a1;
        let den = 1.0 - 2.0 * k / self.bsb * d1 / a1 + quad / (self.bsb * a1 * a1);
        DoubleFit { alpha: num / den, objective: num * num / den, v_hat: v }
    }
}

/// `v̂(η, 0) = 1 − c (1 − η (1/p) tr S⁻(η))`, as used by the double
/// shrinkage benchmark.
pub fn double_v_hat(ctx: &PluginContext, eta: f64) -> Result<f64> {
    let (ectx, kappa) = ctx.effective()?;
    let b = equal_weights(ctx.p());
    Ok(DoubleInputs::new(&ectx, &b)?.fit(eta / kappa, SandwichForm::Consistent).v_hat)
}

/// Ridge-regularized GMV weights shrunk towards `b`, with `η` chosen by the
/// tan search. The search runs on `η / ((1/p) tr S)` so that rescaling the
/// data does not move the chosen portfolio.
pub fn double_shrinkage(ctx: &PluginContext, b: &DVector<f64>) -> Result<PortfolioWeights> {
    double_shrinkage_form(ctx, b, SandwichForm::Consistent)
}

pub fn double_shrinkage_form(ctx: &PluginContext, b: &DVector<f64>, form: SandwichForm) -> Result<PortfolioWeights> {
    let (ectx, kappa) = ctx.effective()?;
    let ctx = &ectx;
    let p = ctx.p();
    check_target(b, p)?;
    let scale = ctx.mean_eigenvalue();
    if !(scale > 0.0) {
        return degenerate("tr(S) = 0");
    }
    let inputs = DoubleInputs::new(ctx, b)?;
    // The population objective is a squared correlation, so estimates
    // outside [0, 1] come from a near-zero denominator and are skipped.
    let score = |tau: f64| {
        let f = inputs.fit(tau * scale, form);
        if f.alpha.is_finite() && (0.0..=1.0).contains(&f.objective) {
            f.objective
        } else {
            f64::NAN
        }
    };
    let s = search_tstar(score)?;
    let eta = s.t_star * scale;
    let fit = inputs.fit(eta, form);
    if !fit.alpha.is_finite() {
        return degenerate("double shrinkage intensity is not finite");
    }
    let u = ctx.eigen().require_vectors()?;
    let ones = DVector::from_element(p, 1.0);
    let mut z = u.tr_mul(&ones);
    for (zj, l) in z.iter_mut().zip(ctx.eigen().values()) {
        *zj *= 1.0 / (l + eta) - 1.0 / eta;
    }
    let x = u * z + &ones / eta;
    let w = &x / x.sum();
    let mut out = PortfolioWeights::shrunk(&w, b, fit.alpha, GmvMethod::Double);
    out.eta = Some(eta * kappa);
    if s.flat {
        out.flags.push("flat_objective".into());
    }
    Ok(out)
}
