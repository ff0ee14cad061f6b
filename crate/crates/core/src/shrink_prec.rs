//! Linear shrinkage of the precision matrix, `Π̂ = α S^#(t) + β Π₀`.
//!
//! [`oracle_intensities`] needs the population covariance; [`bona_fide`]
//! replaces every unknown by its plug-in estimator. The benchmarks
//! [`empirical_bayes`], [`optimal_ridge`] and [`oracle_nl`] complete the
//! comparison set used by the simulation harness.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{arg, degenerate, domain, Error, Result};
use crate::plugin_est::{PluginContext, Projected};
use crate::randmat::{symmetrize, InverseKind, ObservationMatrix, SpectralModel, WeightMatrix};
use crate::search::search_tstar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecisionMethod {
    Mp,
    Ridge,
    Mpr,
    EmpiricalBayes,
    OptimalRidge,
    OracleNl,
}

impl PrecisionMethod {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Mp => "mp",
            Self::Ridge => "ridge",
            Self::Mpr => "mpr",
            Self::EmpiricalBayes => "empirical_bayes",
            Self::OptimalRidge => "optimal_ridge",
            Self::OracleNl => "oracle_nl",
        }
    }
}

impl fmt::Display for PrecisionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PrecisionMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mp" => Ok(Self::Mp),
            "ridge" => Ok(Self::Ridge),
            "mpr" => Ok(Self::Mpr),
            "eb" | "empirical_bayes" => Ok(Self::EmpiricalBayes),
            "or" | "optimal_ridge" => Ok(Self::OptimalRidge),
            "oracle_nl" | "nl" => Ok(Self::OracleNl),
            other => arg(format!("unknown precision method '{other}'")),
        }
    }
}

/// A fitted precision estimator.
#[derive(Debug, Clone)]
pub struct PrecisionShrinkagePlan {
    pub method: PrecisionMethod,
    /// Generalized inverse multiplied by `alpha`; `None` for the nonlinear oracle.
    pub inverse: Option<InverseKind>,
    pub alpha: f64,
    pub beta: f64,
    pub t_star: f64,
    pub target: WeightMatrix,
    pub estimate: DMatrix<f64>,
    /// Estimated (or oracle) objective at the chosen tuning value, if any.
    pub objective: Option<f64>,
    pub flags: Vec<String>,
}

impl PrecisionShrinkagePlan {
    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    /// `‖Π̂ Σ − I‖²_F`.
    pub fn loss(&self, sigma: &DMatrix<f64>) -> f64 {
        frobenius_loss(&self.estimate, sigma)
    }
}

/// `‖A Σ − I‖²_F`.
pub fn frobenius_loss(a: &DMatrix<f64>, sigma: &DMatrix<f64>) -> f64 {
    let mut x = a * sigma;
    for i in 0..x.nrows() {
        x[(i, i)] -= 1.0;
    }
    x.norm_squared()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleIntensities {
    pub alpha: f64,
    pub beta: f64,
    pub objective: f64,
}

/// Minimizer of `‖(α G + β Π₀) Σ − I‖²_F` for known `Σ`.
pub fn oracle_intensities(ginv: &DMatrix<f64>, model: &SpectralModel, target: &WeightMatrix) -> Result<OracleIntensities> {
    oracle_intensities_dense(ginv, &model.covariance(), target)
}

/// Same as [`oracle_intensities`] with a dense `Σ`.
pub fn oracle_intensities_dense(ginv: &DMatrix<f64>, sigma: &DMatrix<f64>, target: &WeightMatrix) -> Result<OracleIntensities> {
    let p = sigma.nrows();
    if ginv.shape() != (p, p) || target.dim() != p {
        return arg("oracle intensities: dimensions disagree");
    }
    let x = ginv * sigma;
    let z = match target.is_scaled_identity() {
        Some(s) => sigma * s,
        None => target.to_dense() * sigma,
    };
    let nz = z.norm();
    if nz == 0.0 {
        return degenerate("target is zero");
    }
    let a = z.trace() / nz;
    let b = x.component_mul(&z).sum() / nz;
    let xx = x.norm_squared();
    let den = xx - b * b;
    if !(den > 1e-12 * xx) {
        return degenerate("‖S^#Σ‖² − tr(S^#Σ²Π₀)²/‖ΣΠ₀‖² vanishes; the inverse is proportional to the target");
    }
    let tx = x.trace();
    let num = tx - a * b;
    Ok(OracleIntensities { alpha: num / den, beta: (a * xx - tx * b) / (den * nz), objective: num * num / den })
}

/// Quantities shared by the three bona fide plans.
struct Common<'a> {
    ctx: &'a PluginContext,
    c: f64,
    trs: f64,
    trs_pi: f64,
    trpi: f64,
    q1: f64,
    q2: f64,
    pi_p: Projected,
    i_p: Projected,
}

impl<'a> Common<'a> {
    fn new(ctx: &'a PluginContext, target: &WeightMatrix) -> Result<Self> {
        let p = ctx.p() as f64;
        let pi_p = ctx.project(&target.scaled(1.0 / p))?;
        let i_p = ctx.project(&WeightMatrix::trace_normalized(ctx.p()))?;
        let pi2_p = ctx.project(&target.squared().scaled(1.0 / p))?;
        let q1 = ctx.hat_q_projected(1, &pi_p)?;
        let q2 = ctx.hat_q_projected(2, &pi2_p)?;
        if q2 == 0.0 || !q2.is_finite() {
            return degenerate(format!("q̂_2(Π₀²/p) = {q2}"));
        }
        Ok(Self {
            ctx,
            c: ctx.cn(),
            trs: ctx.mean_eigenvalue(),
            trs_pi: q1,
            trpi: pi_p.trace,
            q1,
            q2,
            pi_p,
            i_p,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Fit {
    alpha: f64,
    beta: f64,
    objective: f64,
}

fn checked_den(name: &str, den: f64) -> Result<f64> {
    if den == 0.0 || !den.is_finite() {
        return degenerate(format!("{name} = {den}"));
    }
    Ok(den)
}

/// Moore-Penrose plan with `L̂²(0)` as objective.
fn mp_fit(cm: &Common) -> Result<Fit> {
    let ctx = cm.ctx;
    let c = cm.c;
    let v0 = ctx.hat_v_derivative(0, 0.0)?;
    let h2 = ctx.hat_h(2)?;
    let h3 = ctx.hat_h(3)?;
    let d1_i = ctx.hat_d_projected(1, &cm.i_p, 0.0)?;
    let d2_i = ctx.hat_d_projected(2, &cm.i_p, 0.0)?;
    let d1_pi = ctx.hat_d_projected(1, &cm.pi_p, 0.0)?;
    let d0_pi = ctx.hat_d_projected(0, &cm.pi_p, 0.0)?;

    let d1_s = (1.0 / v0) * (1.0 / (c * v0) - d1_i);
    let d1_s2 = (cm.trs + d1_i - 2.0 / (c * v0)) / (v0 * v0);
    let d1_s2pi = (cm.trs_pi + d1_pi) / (v0 * v0) - 2.0 / v0.powi(3) * (cm.trpi - d0_pi);
    let d2_s2 = d1_s2 / v0 - (d1_s - d2_i) / (v0 * v0);
    let k = d2_s2 - d1_s2 * h3 / h2;

    let (q1, q2) = (cm.q1, cm.q2);
    let num_a = d1_s * q2 - d1_s2pi * q1;
    let den_a = checked_den("MP α̂ denominator", -(k * q2) / h2 - d1_s2pi * d1_s2pi / h2)?;
    let den_b = checked_den("MP β̂ denominator", k * q2 + d1_s2pi * d1_s2pi)?;
    let alpha = num_a / den_a;
    let beta = (k * q1 + d1_s * d1_s2pi) / den_b;
    // generic form: B = d1_s/h2, C = d1_s2pi/h2, A = −k/h2²
    let (bb, cc, aa) = (d1_s / h2, d1_s2pi / h2, -k / (h2 * h2));
    let objective = (bb * q2 - cc * q1).powi(2) / (q2 * (aa * q2 - cc * cc));
    Ok(Fit { alpha, beta, objective })
}

/// Ridge plan at `t` with `L̂²_R(t)` as objective.
fn ridge_fit(cm: &Common, t: f64) -> Result<Fit> {
    let ctx = cm.ctx;
    let c = cm.c;
    let v = ctx.hat_v_derivative(0, t)?;
    let v1 = ctx.hat_v_derivative(1, t)?;
    let d0_s = 1.0 / (c * v) - t / c;
    let d0_s2 = (cm.trs - 1.0 / (c * v) + t / c) / v;
    let d0_pi = ctx.hat_d_projected(0, &cm.pi_p, t)?;
    let d0_s2pi = cm.trs_pi / v - (cm.trpi - d0_pi) / (v * v);
    let d1_i = ctx.hat_d_projected(1, &cm.i_p, t)?;
    let d1_s2 = (cm.trs + d1_i - 2.0 / (c * v) + 2.0 * t / c) / (v * v);

    let (q1, q2) = (cm.q1, cm.q2);
    let lead = d0_s2 / t + v1 * d1_s2;
    let den = checked_den("ridge denominator", lead * q2 - d0_s2pi * d0_s2pi / t)?;
    let alpha = (d0_s * q2 - d0_s2pi * q1) / den;
    let beta = (lead * q1 - d0_s * d0_s2pi / t) / den;
    let obj_den = (d0_s2 + t * v1 * d1_s2) * q2 - d0_s2pi * d0_s2pi;
    let objective = (d0_s * q2 - d0_s2pi * q1).powi(2) / (q2 * obj_den);
    Ok(Fit { alpha, beta, objective })
}

/// Moore-Penrose-ridge plan at `t` with `L̂²_MPR(t)` as objective.
fn mpr_fit(cm: &Common, t: f64) -> Result<Fit> {
    let ctx = cm.ctx;
    let c = cm.c;
    let v = ctx.hat_v_derivative(0, t)?;
    let v1 = ctx.hat_v_derivative(1, t)?;
    let v2 = ctx.hat_v_derivative(2, t)?;
    let v3 = ctx.hat_v_derivative(3, t)?;
    let d1_s = (v.powi(-2) + 1.0 / v1) / c;
    let d0_s2 = (cm.trs - 1.0 / (c * v) + t / c) / v;
    let d1_s2 = (d0_s2 - d1_s) / v;
    let d0_pi = ctx.hat_d_projected(0, &cm.pi_p, t)?;
    let d1_pi = ctx.hat_d_projected(1, &cm.pi_p, t)?;
    let d0_s2pi = cm.trs_pi / v - (cm.trpi - d0_pi) / (v * v);
    let d1_s2pi = d0_s2pi / v + d1_pi / (v * v) - (cm.trpi - d0_pi) / v.powi(3);
    let d2_s2 = (d1_s2 - (v.powi(-3) + v2 / (2.0 * v1.powi(3))) / c) / v;
    let d3_s2 = (d2_s2 - (v.powi(-4) + 0.5 * v2 * v2 / v1.powi(5) - v3 / (6.0 * v1.powi(4))) / c) / v;
    let s2 = -(v1 * v1 * d2_s2 - 0.5 * v2 * d1_s2)
        + t * (v3 * d1_s2 / 6.0 - v1 * v2 * d2_s2 + v1.powi(3) * d3_s2);

    let (q1, q2) = (cm.q1, cm.q2);
    let den = checked_den("MPR denominator", s2 * q2 - v1 * v1 * d1_s2pi * d1_s2pi)?;
    let alpha = (-v1 * d1_s * q2 + v1 * d1_s2pi * q1) / den;
    let beta = (s2 * q1 - v1 * v1 * d1_s * d1_s2pi) / den;
    let objective = v1 * v1 * (d1_s * q2 - d1_s2pi * q1).powi(2) / (q2 * den);
    Ok(Fit { alpha, beta, objective })
}

fn finite_or_nan(r: Result<Fit>) -> f64 {
    match r {
        Ok(f) if f.objective.is_finite() => f.objective,
        _ => f64::NAN,
    }
}

/// Bona fide plan from raw observations.
pub fn bona_fide(y: &ObservationMatrix, method: PrecisionMethod, target: &WeightMatrix, t: Option<f64>) -> Result<PrecisionShrinkagePlan> {
    let ctx = PluginContext::from_observations(y)?;
    bona_fide_ctx(&ctx, method, target, t)
}

/// Bona fide plan on an existing context. Without `t`, ridge and MPR search
/// `t*` by maximizing the estimated objective.
pub fn bona_fide_ctx(ctx: &PluginContext, method: PrecisionMethod, target: &WeightMatrix, t: Option<f64>) -> Result<PrecisionShrinkagePlan> {
    if let Some(t) = t {
        if !(t > 0.0 && t.is_finite()) {
            return arg(format!("t must be positive, got {t}"));
        }
    }
    let (ectx, kappa) = ctx.effective()?;
    let t = t.map(|t| t / kappa);
    let cm = Common::new(&ectx, target)?;
    let mut flags = Vec::new();
    if ctx.near_singular() {
        flags.push("near_singular".to_string());
    }
    let (kind, t_star, fit) = match method {
        PrecisionMethod::Mp => {
            if ctx.p() <= ctx.n() {
                return domain("the Moore-Penrose plan needs p > n");
            }
            (InverseKind::MoorePenrose, 0.0, mp_fit(&cm)?)
        }
        PrecisionMethod::Ridge => {
            let t = match t {
                Some(t) => t,
                None => {
                    let s = search_tstar(|t| finite_or_nan(ridge_fit(&cm, t)))?;
                    if s.flat {
                        flags.push("flat_objective".into());
                    }
                    s.t_star
                }
            };
            (InverseKind::Ridge, t, ridge_fit(&cm, t)?)
        }
        PrecisionMethod::Mpr => match t {
            Some(t) => (InverseKind::Mpr, t, mpr_fit(&cm, t)?),
            None => {
                let s = search_tstar(|t| finite_or_nan(mpr_fit(&cm, t)))?;
                if s.flat {
                    flags.push("flat_objective".into());
                }
                let at_t = mpr_fit(&cm, s.t_star)?;
                let at_zero = if ctx.p() > ctx.n() { mp_fit(&cm).ok() } else { None };
                match at_zero {
                    Some(mp) if !(at_t.objective > mp.objective) => {
                        flags.push("mp_fallback".into());
                        (InverseKind::MoorePenrose, 0.0, mp)
                    }
                    _ => (InverseKind::Mpr, s.t_star, at_t),
                }
            }
        },
        other => return arg(format!("{other} is a benchmark; use shrink_prec::benchmark")),
    };
    if fit.alpha < 0.0 {
        flags.push("alpha_negative".into());
    }
    let (alpha, t_star) = (fit.alpha * kappa, t_star * kappa);
    let mut estimate = ctx.inverse_matrix(kind, t_star)? * alpha;
    add_target(&mut estimate, target, fit.beta);
    Ok(PrecisionShrinkagePlan {
        method,
        inverse: Some(kind),
        alpha,
        beta: fit.beta,
        t_star,
        target: target.clone(),
        estimate,
        objective: Some(fit.objective),
        flags,
    })
}

fn add_target(estimate: &mut DMatrix<f64>, target: &WeightMatrix, beta: f64) {
    match target.is_scaled_identity() {
        Some(s) => {
            for i in 0..estimate.nrows() {
                estimate[(i, i)] += beta * s;
            }
        }
        None => *estimate += target.to_dense() * beta,
    }
}

/// Estimated objective `L̂²_R(t)` of the ridge plan; `NaN` where undefined.
pub fn ridge_objective(ctx: &PluginContext, target: &WeightMatrix, t: f64) -> Result<f64> {
    let (ectx, kappa) = ctx.effective()?;
    let cm = Common::new(&ectx, target)?;
    Ok(finite_or_nan(ridge_fit(&cm, t / kappa)))
}

/// Estimated objective `L̂²_MPR(t)`; `t = 0` gives the Moore-Penrose value.
pub fn mpr_objective(ctx: &PluginContext, target: &WeightMatrix, t: f64) -> Result<f64> {
    let (ectx, kappa) = ctx.effective()?;
    let cm = Common::new(&ectx, target)?;
    if t == 0.0 {
        return Ok(finite_or_nan(mp_fit(&cm)));
    }
    Ok(finite_or_nan(mpr_fit(&cm, t / kappa)))
}

/// Dispatches to one of the benchmark estimators. `model` is only needed by
/// the nonlinear oracle.
pub fn benchmark(method: PrecisionMethod, y: &ObservationMatrix, model: Option<&SpectralModel>) -> Result<PrecisionShrinkagePlan> {
    let ctx = PluginContext::from_observations(y)?;
    match method {
        PrecisionMethod::EmpiricalBayes => empirical_bayes(&ctx),
        PrecisionMethod::OptimalRidge => optimal_ridge(&ctx),
        PrecisionMethod::OracleNl => match model {
            Some(m) => oracle_nl(&ctx, &m.covariance()),
            None => arg("the nonlinear oracle needs the population covariance"),
        },
        other => arg(format!("{other} is not a benchmark; use shrink_prec::bona_fide")),
    }
}

/// `p ((n−1) S + tr(S) I)^{-1}`, stored as `α (S + t I)^{-1}` with
/// `α = p/(n−1)` and `t = tr(S)/(n−1)`.
pub fn empirical_bayes(ctx: &PluginContext) -> Result<PrecisionShrinkagePlan> {
    let p = ctx.p() as f64;
    let n1 = ctx.n() as f64 - 1.0;
    if n1 <= 0.0 {
        return arg("empirical Bayes needs n >= 2");
    }
    let tr = p * ctx.mean_eigenvalue();
    if !(tr > 0.0) {
        return degenerate("tr(S) = 0");
    }
    let t = tr / n1;
    let alpha = p / n1;
    let estimate = ctx.inverse_matrix(InverseKind::Ridge, t)? * alpha;
    Ok(PrecisionShrinkagePlan {
        method: PrecisionMethod::EmpiricalBayes,
        inverse: Some(InverseKind::Ridge),
        alpha,
        beta: 0.0,
        t_star: t,
        target: WeightMatrix::scaled_identity(ctx.p(), 1.0),
        estimate,
        objective: None,
        flags: Vec::new(),
    })
}

/// `â_1(λ) = 1 − (1/p) tr[(S/λ + I)^{-1}]`.
pub fn optimal_ridge_a1(ctx: &PluginContext, lambda: f64) -> f64 {
    1.0 - ctx.mean_fn(|s| lambda / (s + lambda), 1.0)
}

/// `(R̂_1(λ), R̂_2(λ))`, or `None` where `1 − c â_1 ≤ 1e-10`.
pub fn optimal_ridge_r(ctx: &PluginContext, lambda: f64) -> Option<(f64, f64)> {
    let c = ctx.cn();
    let m1 = ctx.mean_fn(|s| lambda / (s + lambda), 1.0);
    let m2 = ctx.mean_fn(|s| (lambda / (s + lambda)).powi(2), 1.0);
    let a1 = 1.0 - m1;
    let a2 = m1 - m2;
    let g = 1.0 - c * a1;
    if g <= 1e-10 {
        return None;
    }
    Some((a1 / g, a1 / g.powi(3) - a2 / g.powi(4)))
}

/// Ridge benchmark `α (S + λI)^{-1}` with `λ` minimizing `1 − R̂_1²/R̂_2`.
pub fn optimal_ridge(ctx: &PluginContext) -> Result<PrecisionShrinkagePlan> {
    let score = |lam: f64| match optimal_ridge_r(ctx, lam) {
        Some((r1, r2)) if r2 > 0.0 => r1 * r1 / r2,
        _ => f64::NAN,
    };
    let s = search_tstar(score)?;
    let (r1, r2) = optimal_ridge_r(ctx, s.t_star)
        .filter(|(_, r2)| *r2 > 0.0)
        .ok_or_else(|| Error::Degenerate("R̂_2 is not positive at the optimum".into()))?;
    let alpha = r1 / r2;
    let estimate = ctx.inverse_matrix(InverseKind::Ridge, s.t_star)? * alpha;
    let mut flags = Vec::new();
    if s.flat {
        flags.push("flat_objective".into());
    }
    Ok(PrecisionShrinkagePlan {
        method: PrecisionMethod::OptimalRidge,
        inverse: Some(InverseKind::Ridge),
        alpha,
        beta: 0.0,
        t_star: s.t_star,
        target: WeightMatrix::scaled_identity(ctx.p(), 1.0),
        estimate,
        objective: Some(1.0 - r1 * r1 / r2),
        flags,
    })
}

/// Nonlinear oracle `Σ_i u_i u_iᵀ / d̃_i` with `d̃_i = u_iᵀΣ²u_i / u_iᵀΣu_i`.
///
/// The sample eigenvectors are completed on the null space of `S` by the
/// eigenvectors of `Σ` compressed to that space.
pub fn oracle_nl(ctx: &PluginContext, sigma: &DMatrix<f64>) -> Result<PrecisionShrinkagePlan> {
    let p = ctx.p();
    if sigma.shape() != (p, p) {
        return arg("population covariance has the wrong dimension");
    }
    let u = ctx.eigen().require_vectors()?;
    let r = u.ncols();
    let basis = if r < p {
        let mut proj = -(u * u.transpose());
        for i in 0..p {
            proj[(i, i)] += 1.0;
        }
        let mut comp = &proj * sigma * &proj;
        symmetrize(&mut comp);
        let eig = SymmetricEigen::new(comp);
        let mut idx: Vec<usize> = (0..p).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let null = eig.eigenvectors.select_columns(idx[..p - r].iter());
        let mut full = DMatrix::zeros(p, p);
        full.columns_mut(0, r).copy_from(u);
        full.columns_mut(r, p - r).copy_from(&null);
        full
    } else {
        u.clone()
    };
    let w = sigma * &basis;
    let mut scaled = basis.clone();
    for j in 0..p {
        let num = w.column(j).norm_squared();
        let den = basis.column(j).dot(&w.column(j));
        if !(num > 0.0 && den > 0.0) {
            return degenerate("u'Σu vanishes for a sample eigenvector");
        }
        scaled.column_mut(j).scale_mut(den / num);
    }
    let mut estimate = &scaled * basis.transpose();
    symmetrize(&mut estimate);
    Ok(PrecisionShrinkagePlan {
        method: PrecisionMethod::OracleNl,
        inverse: None,
        alpha: 1.0,
        beta: 0.0,
        t_star: 0.0,
        target: WeightMatrix::scaled_identity(p, 1.0),
        estimate,
        objective: None,
        flags: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    #[test]
    fn exact_inverse_needs_no_shrinkage() {
        let model = SpectralModel::new(vec![1.0, 2.0, 5.0], None).unwrap();
        let ginv = model.matrix_function(|l| 1.0 / l);
        let o = oracle_intensities(&ginv, &model, &WeightMatrix::scaled_identity(3, 1.0)).unwrap();
        assert_relative_eq!(o.alpha, 1.0, epsilon = 1e-12);
        assert!(o.beta.abs() < 1e-12);
    }

    #[test]
    fn inverse_equal_to_target_is_degenerate() {
        let model = SpectralModel::new(vec![1.0, 2.0, 5.0], None).unwrap();
        let ginv = DMatrix::identity(3, 3);
        let r = oracle_intensities(&ginv, &model, &WeightMatrix::scaled_identity(3, 1.0));
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn empirical_bayes_by_hand() {
        let ctx = PluginContext::from_covariance(&DMatrix::identity(2, 2), 3).unwrap();
        let plan = empirical_bayes(&ctx).unwrap();
        assert_relative_eq!(plan.estimate, DMatrix::identity(2, 2) * 0.5, epsilon = 1e-14);
    }

    #[test]
    fn optimal_ridge_component() {
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.0]));
        let ctx = PluginContext::from_covariance(&s, 4).unwrap();
        assert_relative_eq!(optimal_ridge_a1(&ctx, 2.0), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn oracle_nl_recovers_inverse_on_shared_basis() {
        let sigma = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0, 10.0]));
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 4.0, 7.0]));
        let ctx = PluginContext::from_covariance(&s, 10).unwrap();
        let plan = oracle_nl(&ctx, &sigma).unwrap();
        let inv = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0 / 3.0, 0.1]));
        assert_relative_eq!(plan.estimate, inv, epsilon = 1e-12);
    }

    #[test]
    fn method_tags_round_trip() {
        for m in ["mp", "ridge", "mpr", "eb", "or", "oracle_nl"] {
            assert!(m.parse::<PrecisionMethod>().is_ok());
        }
        assert!("lw".parse::<PrecisionMethod>().is_err());
    }
}
