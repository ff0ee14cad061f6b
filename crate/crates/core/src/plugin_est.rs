//! Data-driven estimators of `v^{(m)}(t)`, `h_k`, `d_k(t, Θ)` and `q_k(Θ)`.
//!
//! All traces go through the thin eigendecomposition `S = U diag(λ) Uᵀ`.
//! For a spectral function `f` with value `f0` on the null space,
//! `tr(f(S) Θ) = Σ_j (f(λ_j) − f0) u_jᵀΘu_j + f0 tr(Θ)`.

use nalgebra::DMatrix;

use crate::error::{arg, degenerate, domain, Result};
use crate::randmat::{sample_covariance, InverseKind, ObservationMatrix, SampleEigen, WeightMatrix};

pub const MAX_ORDER: usize = 8;

/// Upper end of the concentration range flagged as near-singular.
pub const NEAR_SINGULAR_C: f64 = 1.05;

/// Immutable view of one sample used by every plug-in estimator.
#[derive(Debug, Clone)]
pub struct PluginContext {
    eig: SampleEigen,
    n: usize,
    /// Degrees of freedom behind `S`: `n − 1` after centering, `n` otherwise.
    dof: usize,
    cn: f64,
    near_singular: bool,
}

/// A weight matrix reduced to what the spectral traces need.
#[derive(Debug, Clone)]
pub struct Projected {
    /// `u_jᵀ Θ u_j` for the retained sample eigenvectors.
    pub diag: Vec<f64>,
    pub trace: f64,
}

impl PluginContext {
    pub fn from_observations(y: &ObservationMatrix) -> Result<Self> {
        let eig = SampleEigen::from_observations(y, true)?;
        Self::from_centered_eigen(eig, y.n())
    }

    /// Context for the spectrum of a mean-centred sample covariance of `n`
    /// observations, which has at most `n − 1` nonzero eigenvalues.
    pub fn from_centered_eigen(eig: SampleEigen, n: usize) -> Result<Self> {
        let mut ctx = Self::from_eigen(eig, n)?;
        ctx.dof = n.saturating_sub(1).max(1);
        Ok(ctx)
    }

    /// Builds the context from a sample covariance and its sample size.
    pub fn from_covariance(s: &DMatrix<f64>, n: usize) -> Result<Self> {
        let eig = SampleEigen::from_covariance(s, None)?;
        Self::from_eigen(eig, n)
    }

    pub fn from_eigen(eig: SampleEigen, n: usize) -> Result<Self> {
        if n == 0 {
            return arg("sample size must be positive");
        }
        let cn = eig.p() as f64 / n as f64;
        Ok(Self { eig, n, dof: n, cn, near_singular: cn > 1.0 && cn <= NEAR_SINGULAR_C })
    }

    /// View of a centred sample as `dof = n − 1` uncentred draws: the
    /// spectrum is multiplied by `n/(n−1)` and `c` becomes `p/(n−1)`. Returns
    /// the view together with the factor `κ = (n−1)/n` that maps its
    /// generalized inverses back to those of `S` (`(S_u + tI)^{-1} =
    /// κ (S + κtI)^{-1}`, and likewise for the other inverses).
    pub fn effective(&self) -> Result<(Self, f64)> {
        if self.dof == self.n {
            return Ok((self.clone(), 1.0));
        }
        let kappa = self.dof as f64 / self.n as f64;
        let ctx = Self::from_eigen(self.eig.scaled(1.0 / kappa), self.dof)?;
        Ok((ctx, kappa))
    }

    pub fn p(&self) -> usize {
        self.eig.p()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cn(&self) -> f64 {
        self.cn
    }

    pub fn eigen(&self) -> &SampleEigen {
        &self.eig
    }

    /// True when `1 < c ≤ 1.05`, where the Moore-Penrose based estimators are
    /// numerically fragile.
    pub fn near_singular(&self) -> bool {
        self.near_singular
    }

    fn pf(&self) -> f64 {
        self.p() as f64
    }

    /// `(1/p) tr[(S+tI)^{-k}] − t^{-k} (p − dof)/p`, with the null-space
    /// terms cancelled exactly: `(1/p) Σ_{λ>0} (λ+t)^{-k} + (dof − r) t^{-k}/p`.
    fn ridge_moment_net(&self, k: usize, t: f64) -> f64 {
        let nz: f64 = self.eig.values().iter().map(|&l| (l + t).powi(-(k as i32))).sum();
        let excess = self.dof as f64 - self.eig.rank() as f64;
        (nz + excess * t.powi(-(k as i32))) / self.pf()
    }

    pub fn project(&self, theta: &WeightMatrix) -> Result<Projected> {
        if theta.dim() != self.p() {
            return arg(format!("weight matrix has dimension {}, expected {}", theta.dim(), self.p()));
        }
        let u = self.eig.require_vectors()?;
        Ok(Projected { diag: theta.compressed_diagonal(u), trace: theta.trace() })
    }

    /// `tr(f(S) Θ)` with `f = f0` on the null space of `S`.
    pub fn trace_fn(&self, proj: &Projected, f: impl Fn(f64) -> f64, f0: f64) -> f64 {
        let nz: f64 = self.eig.values().iter().zip(&proj.diag).map(|(&l, &w)| (f(l) - f0) * w).sum();
        nz + f0 * proj.trace
    }

    /// `(1/p) tr(f(S))` with `f = f0` on the null space.
    pub fn mean_fn(&self, f: impl Fn(f64) -> f64, f0: f64) -> f64 {
        let r = self.eig.rank() as f64;
        let nz: f64 = self.eig.values().iter().map(|&l| f(l)).sum();
        (nz + (self.pf() - r) * f0) / self.pf()
    }

    /// `(1/p) tr[(S⁺)^k]`.
    pub fn mp_moment(&self, k: usize) -> f64 {
        self.mean_fn(|l| l.powi(-(k as i32)), 0.0)
    }

    /// `(1/p) tr[(S + tI)^{-k}]`.
    pub fn ridge_moment(&self, k: usize, t: f64) -> f64 {
        self.mean_fn(|l| (l + t).powi(-(k as i32)), t.powi(-(k as i32)))
    }

    /// `(1/p) tr(S)`.
    pub fn mean_eigenvalue(&self) -> f64 {
        self.mean_fn(|l| l, 0.0)
    }

    fn require_p_over_n(&self, what: &str) -> Result<()> {
        if self.p() <= self.n {
            return domain(format!("{what} at t = 0 needs p > n (p = {}, n = {})", self.p(), self.n));
        }
        Ok(())
    }

    fn p2(&self) -> Result<f64> {
        let p2 = self.mp_moment(2);
        if !(p2 > 0.0 && p2.is_finite()) {
            return degenerate("(1/p) tr[(S⁺)²] is zero; the sample covariance vanishes");
        }
        Ok(p2)
    }

    /// Estimator of `v^{(m)}(t)`.
    ///
    /// At `t = 0`: `(−1)^m m! c (1/p) tr[(S⁺)^{m+1}]`; for `t > 0`:
    /// `(−1)^m m! c ((1/p) tr[(S+tI)^{-(m+1)}] − t^{-(m+1)} (p − dof)/p)`,
    /// where `dof` is `n − 1` for a centred sample.
    pub fn hat_v_derivative(&self, m: usize, t: f64) -> Result<f64> {
        if m > MAX_ORDER {
            return arg(format!("derivative order {m} exceeds {MAX_ORDER}"));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return arg(format!("t must be non-negative, got {t}"));
        }
        let c = self.cn;
        let pre = sign(m) * fact(m) * c;
        if t == 0.0 {
            self.require_p_over_n("v̂")?;
            return Ok(pre * self.mp_moment(m + 1));
        }
        let k = m + 1;
        Ok(pre * self.ridge_moment_net(k, t))
    }

    /// `ĥ_2 = 1/(c P_2)`, `ĥ_3 = P_3/(c² P_2³)` and
    /// `ĥ_4 = (2P_3² − P_2 P_4)/(c³ P_2⁵)` with `P_k = (1/p) tr[(S⁺)^k]`.
    pub fn hat_h(&self, k: usize) -> Result<f64> {
        self.require_p_over_n("ĥ")?;
        let c = self.cn;
        let p2 = self.p2()?;
        let p3 = self.mp_moment(3);
        match k {
            2 => Ok(1.0 / (c * p2)),
            3 => Ok(p3 / (c * c * p2.powi(3))),
            4 => Ok((2.0 * p3 * p3 - p2 * self.mp_moment(4)) / (c.powi(3) * p2.powi(5))),
            _ => arg(format!("ĥ_{k} is not available (k must be 2, 3 or 4)")),
        }
    }

    pub fn hat_d(&self, k: usize, theta: &WeightMatrix, t: f64) -> Result<f64> {
        let proj = self.project(theta)?;
        self.hat_d_projected(k, &proj, t)
    }

    /// Estimator of `d_k(t, Θ)`: `k ∈ {0, 1, 2, 3}` at `t = 0`, `k ∈ {0, 1}`
    /// for `t > 0`.
    pub fn hat_d_projected(&self, k: usize, proj: &Projected, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t.is_finite()) {
            return arg(format!("t must be non-negative, got {t}"));
        }
        let c = self.cn;
        if k == 0 {
            return Ok(if t == 0.0 {
                // tr[(I − SS⁺)Θ]
                proj.trace - proj.diag.iter().sum::<f64>()
            } else {
                t * self.trace_fn(proj, |l| 1.0 / (l + t), 1.0 / t)
            });
        }
        if t > 0.0 {
            if k != 1 {
                return arg(format!("d̂_{k}(t, Θ) is only available for k ≤ 1 when t > 0"));
            }
            let d0 = t * self.trace_fn(proj, |l| 1.0 / (l + t), 1.0 / t);
            let r2 = self.trace_fn(proj, |l| (l + t).powi(-2), t.powi(-2));
            let denom = c * self.ridge_moment_net(2, t);
            if denom == 0.0 {
                return degenerate("v̂'(t) vanishes");
            }
            return Ok(-(t * r2 - d0 / t) / denom);
        }
        self.require_p_over_n("d̂")?;
        let p2 = self.p2()?;
        let (p3, p4) = (self.mp_moment(3), self.mp_moment(4));
        let tk = |j: i32| self.trace_fn(proj, move |l| l.powi(-j), 0.0);
        match k {
            1 => Ok(tk(1) / (c * p2)),
            2 => Ok((tk(1) * p3 - p2 * tk(2)) / (c * c * p2.powi(3))),
            3 => {
                let (t1, t2, t3) = (tk(1), tk(2), tk(3));
                let c3 = c.powi(3);
                Ok(t3 / (c3 * p2.powi(3)) + 2.0 * p3 * p3 * t1 / (c3 * p2.powi(5))
                    - (2.0 * p3 * t2 + p4 * t1) / (c3 * p2.powi(4)))
            }
            _ => arg(format!("d̂_{k} is not available")),
        }
    }

    pub fn hat_q(&self, order: usize, theta: &WeightMatrix) -> Result<f64> {
        let proj = self.project(theta)?;
        self.hat_q_projected(order, &proj)
    }

    /// `q̂_1 = tr(SΘ)`, `q̂_2 = tr(S²Θ) − c (1/p) tr(S) tr(SΘ)`.
    pub fn hat_q_projected(&self, order: usize, proj: &Projected) -> Result<f64> {
        let q1 = self.trace_fn(proj, |l| l, 0.0);
        match order {
            1 => Ok(q1),
            2 => Ok(self.trace_fn(proj, |l| l * l, 0.0) - self.cn * self.mean_eigenvalue() * q1),
            _ => arg(format!("q̂_{order} is not available (order must be 1 or 2)")),
        }
    }

    /// Dense `S^#(t)` for the requested inverse.
    pub fn inverse_matrix(&self, kind: InverseKind, t: f64) -> Result<DMatrix<f64>> {
        match kind {
            InverseKind::MoorePenrose => self.eig.dense_function(|l| 1.0 / l, 0.0),
            InverseKind::Ridge => {
                positive(t)?;
                self.eig.dense_function(|l| 1.0 / (l + t), 1.0 / t)
            }
            InverseKind::Mpr => {
                positive(t)?;
                self.eig.dense_function(|l| l / ((l + t) * (l + t)), 0.0)
            }
            InverseKind::Ordinary => {
                if self.eig.rank() < self.p() {
                    return Err(crate::Error::Singular(format!(
                        "sample covariance has rank {} < p = {}",
                        self.eig.rank(),
                        self.p()
                    )));
                }
                self.eig.dense_function(|l| 1.0 / l, 0.0)
            }
        }
    }
}

fn positive(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return arg(format!("t must be positive, got {t}"));
    }
    Ok(())
}

fn sign(m: usize) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn fact(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// Convenience: the sample covariance and its context in one go.
pub fn context_with_covariance(y: &ObservationMatrix) -> Result<(DMatrix<f64>, PluginContext)> {
    let s = sample_covariance(y)?;
    let ctx = PluginContext::from_observations(y)?;
    Ok((s, ctx))
}
