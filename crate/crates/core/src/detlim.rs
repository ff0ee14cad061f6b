//! Deterministic equivalents of weighted trace moments.
//!
//! Everything is driven by the function `v(t)`, the positive root of
//!
//! ```text
//! (1/p) tr[(vΣ + I)^{-1}] = (c − 1 + t v) / c,
//! ```
//!
//! and by its derivatives in `t`, obtained from Faà di Bruno recursions with
//! partial Bell polynomials. The ordinary inverse (`c < 1`) uses the companion
//! pair `w, w̃ = t/w`, and moments of `S` itself use `u`.
//!
//! Throughout, `power` is the exponent of the inverse: `power = 2` targets
//! `tr(G² Θ)` for every family.

use std::fmt;
use std::str::FromStr;

use crate::bellpoly::bell_on;
use crate::error::{arg, domain, Error, Result};
use crate::randmat::{SpectralModel, WeightMatrix};

/// Highest derivative order supported by the recursions.
pub const MAX_ORDER: usize = 8;
/// Default residual tolerance for [`solve_v`].
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `v` at `t = 0` and beyond, `c > 1`.
    VOverOne,
    /// `v` at `t > 0`, any `c > 0`.
    VGeneral,
    /// `w` and `w̃` at `t = 0`, `c < 1`.
    WUnderOne,
    /// `u` for moments of the sample covariance.
    USampleCov,
}

/// Values `(f(t), f'(t), ..., f^{(m)}(t))` of one of the driving functions.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeStack {
    pub t: f64,
    pub cn: f64,
    pub regime: Regime,
    pub values: Vec<f64>,
    /// `w̃` and its derivatives in the [`Regime::WUnderOne`] case, empty
    /// otherwise.
    pub companion: Vec<f64>,
}

impl DerivativeStack {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.values[0]
    }

    /// `(f', ..., f^{(m)})`, the argument list of the Bell polynomials.
    pub fn derivatives(&self) -> &[f64] {
        &self.values[1..]
    }

    pub fn derivative(&self, j: usize) -> Option<f64> {
        self.values.get(j).copied()
    }
}

/// Which generalized inverse a moment refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Mp,
    Ridge,
    Mpr,
    SampleCov,
    Ordinary,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Mp => "mp",
            Family::Ridge => "ridge",
            Family::Mpr => "mpr",
            Family::SampleCov => "samplecov",
            Family::Ordinary => "ordinary",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mp" | "moore_penrose" => Ok(Family::Mp),
            "ridge" => Ok(Family::Ridge),
            "mpr" => Ok(Family::Mpr),
            "samplecov" | "sample_cov" | "cov" => Ok(Family::SampleCov),
            "ordinary" | "inverse" => Ok(Family::Ordinary),
            other => arg(format!("unknown family '{other}'")),
        }
    }
}

/// Limit of `tr(G^power Θ)` together with the ingredients used.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentLimit {
    pub family: Family,
    pub power: usize,
    pub t: f64,
    pub value: f64,
    pub components: Vec<(String, f64)>,
}

impl MomentLimit {
    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

/// Distinct eigenvalues with their multiplicities divided by `p`.
#[derive(Debug, Clone)]
struct Spectrum {
    atoms: Vec<(f64, f64)>,
}

impl Spectrum {
    fn of(model: &SpectralModel) -> Self {
        let mut vals = model.eigenvalues().to_vec();
        vals.sort_by(f64::total_cmp);
        let w = 1.0 / vals.len() as f64;
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        for l in vals {
            match atoms.last_mut() {
                Some((v, m)) if *v == l => *m += w,
                _ => atoms.push((l, w)),
            }
        }
        Self { atoms }
    }

    fn mean(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(l, w)| w * f(l)).sum()
    }
}

fn check_cn(cn: f64) -> Result<()> {
    if !(cn > 0.0 && cn.is_finite()) {
        return arg(format!("concentration ratio must be positive, got {cn}"));
    }
    Ok(())
}

fn check_order(m: usize) -> Result<()> {
    if m > MAX_ORDER {
        return arg(format!("derivative order {m} exceeds the cap {MAX_ORDER}"));
    }
    Ok(())
}

/// Solves for `v(t)` by bisection on the decreasing residual.
///
/// The bracket starts at `[0, 1]` and its upper end doubles until the residual
/// changes sign. Bisection then runs to machine precision and the residual is
/// required to be below `tol`.
pub fn solve_v(t: f64, cn: f64, model: &SpectralModel, tol: f64) -> Result<f64> {
    solve_v_spec(t, cn, &Spectrum::of(model), tol)
}

fn solve_v_spec(t: f64, cn: f64, spec: &Spectrum, tol: f64) -> Result<f64> {
    check_cn(cn)?;
    if !(t >= 0.0 && t.is_finite()) {
        return arg(format!("t must be non-negative and finite, got {t}"));
    }
    if !(tol > 0.0) {
        return arg(format!("tolerance must be positive, got {tol}"));
    }
    if t == 0.0 && cn <= 1.0 {
        return domain(format!("v(0) exists only for c > 1, got c = {cn}"));
    }
    let resid = |v: f64| spec.mean(|l| 1.0 / (v * l + 1.0)) - (cn - 1.0 + t * v) / cn;
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while resid(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Convergence(format!(
                "no sign change for v(t) at t = {t}, c = {cn}"
            )));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if resid(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (rl, rh) = (resid(lo).abs(), resid(hi).abs());
    let (v, r) = if rl <= rh { (lo, rl) } else { (hi, rh) };
    if r > tol || !(v > 0.0) {
        return Err(Error::Convergence(format!(
            "residual {r:.3e} above tolerance {tol:.1e} at t = {t}, c = {cn}"
        )));
    }
    Ok(v)
}

/// `h_k = v^{-k} − c (1/p) Σ_i (λ_i / (vλ_i + 1))^k`.
fn h_k(v: f64, cn: f64, spec: &Spectrum, k: usize) -> f64 {
    v.powi(-(k as i32)) - cn * spec.mean(|l| (l / (v * l + 1.0)).powi(k as i32))
}

/// Second mixed derivative of
/// `F(a, b) = tr{(aΣ+I)^{-1} Σ (bΣ+I)^{-1} Θ} / (1 − ab (1/n) tr{Σ²(aΣ+I)^{-1}(bΣ+I)^{-1}})`
/// at `a = b = v`, written in terms of `d_1, d_2, d_3` of `Θ` and `h_2, h_3, h_4`.
///
/// `v'(0)² F_ab` is the limit of `tr(S⁺ΣS⁺Θ)`. Its leading term alone is `d_3`;
/// the remaining terms come from the fluctuation of the denominator.
pub fn sandwich_combination(v: f64, d: [f64; 3], h: [f64; 3]) -> f64 {
    let [d1, d2, d3] = d;
    let [h2, h3, h4] = h;
    let den = v * v * h2;
    let den_a = v * h2 - v * v * h3;
    let den_ab = h2 - 2.0 * v * h3 + v * v * h4;
    d3 / den + 2.0 * d2 * den_a / (den * den) + d1 * (2.0 * den_a * den_a / den.powi(3) - den_ab / (den * den))
}

/// Deterministic equivalent of `tr(S⁺ Σ S⁺ Θ)` for `c > 1`.
pub fn mp_sandwich_limit(theta: &WeightMatrix, cn: f64, model: &SpectralModel) -> Result<f64> {
    check_cn(cn)?;
    if cn <= 1.0 {
        return domain(format!("S⁺ limits need c > 1, got c = {cn}"));
    }
    let spec = Spectrum::of(model);
    let v = solve_v_spec(0.0, cn, &spec, DEFAULT_TOL)?;
    let h = [2, 3, 4].map(|k| h_k(v, cn, &spec, k));
    let diag = model.theta_diagonal(theta)?;
    let d = [1, 2, 3].map(|k| dk_from_diag(v, k, model.eigenvalues(), &diag));
    let v1 = -1.0 / h[0];
    Ok(v1 * v1 * sandwich_combination(v, d, h))
}

/// `v(t)` and its first `m` derivatives.
pub fn v_derivatives(t: f64, m: usize, cn: f64, model: &SpectralModel, tol: f64) -> Result<DerivativeStack> {
    check_order(m)?;
    let spec = Spectrum::of(model);
    let v = solve_v_spec(t, cn, &spec, tol)?;
    let regime = if t == 0.0 { Regime::VOverOne } else { Regime::VGeneral };
    let values = v_recursion(v, m, |k| h_k(v, cn, &spec, k))?;
    Ok(DerivativeStack { t, cn, regime, values, companion: Vec::new() })
}

/// `v' = −1/h_2` and
/// `v^{(j)} = −v' Σ_{k=2}^{j} (−1)^k k! h_{k+1} B_{j,k}(v', ..., v^{(j−k+1)})`.
fn v_recursion(v: f64, m: usize, h: impl Fn(usize) -> f64) -> Result<Vec<f64>> {
    let mut vals = vec![v];
    if m == 0 {
        return Ok(vals);
    }
    let h2 = h(2);
    if h2 == 0.0 || !h2.is_finite() {
        return Err(Error::Degenerate(format!("h_2 = {h2}")));
    }
    let v1 = -1.0 / h2;
    vals.push(v1);
    for j in 2..=m {
        let mut acc = 0.0;
        for k in 2..=j {
            acc += sign(k) * fact(k) * h(k + 1) * bell_on(j, k, &vals[1..])?;
        }
        vals.push(-v1 * acc);
    }
    Ok(vals)
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn fact(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn binom(n: usize, k: usize) -> f64 {
    fact(n) / (fact(k) * fact(n - k))
}

/// `d_k(t, Θ) = tr{(vΣ + I)^{-1} [Σ(vΣ + I)^{-1}]^k Θ}` with `v = v(t)`.
///
/// `k = 0` is only defined for `t > 0`.
pub fn dk_weighted(stack: &DerivativeStack, k: usize, theta: &WeightMatrix, model: &SpectralModel) -> Result<f64> {
    if !matches!(stack.regime, Regime::VOverOne | Regime::VGeneral) {
        return arg("d_k needs a stack of v derivatives");
    }
    if k == 0 && stack.t == 0.0 {
        return arg("d_0 is only defined for t > 0");
    }
    let diag = model.theta_diagonal(theta)?;
    Ok(dk_from_diag(stack.value(), k, model.eigenvalues(), &diag))
}

fn dk_from_diag(v: f64, k: usize, lam: &[f64], diag: &[f64]) -> f64 {
    lam.iter()
        .zip(diag)
        .map(|(&l, &w)| {
            let r = 1.0 / (v * l + 1.0);
            r * (l * r).powi(k as i32) * w
        })
        .sum()
}

/// `D_j = Σ_{k=1}^{j} ((−1)^{j+k} k!/j!) d_k B_{j,k}(v', ...)`, i.e. the
/// `j`-th Taylor coefficient (up to sign) of `d_0(t)` at fixed `t`.
fn big_d(j: usize, d: &[f64], vder: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for k in 1..=j {
        acc += sign(j + k) * fact(k) / fact(j) * d[k] * bell_on(j, k, vder)?;
    }
    Ok(acc)
}

/// Deterministic equivalent of `tr(G^power Θ)` for the chosen family.
pub fn limit_moment(
    family: Family,
    power: usize,
    t: f64,
    theta: &WeightMatrix,
    cn: f64,
    model: &SpectralModel,
) -> Result<MomentLimit> {
    check_cn(cn)?;
    if power == 0 {
        return arg("power must be at least 1");
    }
    let diag = model.theta_diagonal(theta)?;
    let lam = model.eigenvalues();
    match family {
        Family::Mp => {
            at_zero(family, t)?;
            if cn <= 1.0 {
                return domain(format!("Moore-Penrose limits need c > 1, got {cn}"));
            }
            check_order(power)?;
            let st = v_derivatives(0.0, power, cn, model, DEFAULT_TOL)?;
            let d: Vec<f64> = (0..=power).map(|k| dk_from_diag(st.value(), k, lam, &diag)).collect();
            let m = power;
            let mut value = 0.0;
            for k in 1..=m {
                value += sign(m + k + 1) * fact(k) / fact(m) * d[k] * bell_on(m, k, st.derivatives())?;
            }
            let mut comps = stack_components("v", &st.values);
            comps.extend(named("d", &d[1..], 1));
            Ok(MomentLimit { family, power, t: 0.0, value, components: comps })
        }
        Family::Ridge => {
            positive_t(family, t)?;
            let order = power - 1;
            check_order(order)?;
            let st = v_derivatives(t, order, cn, model, DEFAULT_TOL)?;
            let d: Vec<f64> = (0..=order).map(|k| dk_from_diag(st.value(), k, lam, &diag)).collect();
            let value = ridge_direct(power, t, &d, st.derivatives())?;
            let mut comps = stack_components("v", &st.values);
            comps.extend(named("d", &d, 0));
            Ok(MomentLimit { family, power, t, value, components: comps })
        }
        Family::Mpr => {
            positive_t(family, t)?;
            let order = 2 * power - 1;
            check_order(order)?;
            let st = v_derivatives(t, order, cn, model, DEFAULT_TOL)?;
            let d: Vec<f64> = (0..=order).map(|k| dk_from_diag(st.value(), k, lam, &diag)).collect();
            let value = mpr_from_d(power, t, &d, st.derivatives())?;
            let mut comps = stack_components("v", &st.values);
            comps.extend(named("d", &d, 0));
            Ok(MomentLimit { family, power, t, value, components: comps })
        }
        Family::SampleCov => {
            at_zero(family, t)?;
            check_order(power)?;
            let st = u_derivatives(power, cn, model)?;
            let m = power;
            let mut value = 0.0;
            let mut traces = Vec::with_capacity(m);
            for k in 1..=m {
                let tr_k: f64 = lam.iter().zip(&diag).map(|(&l, &w)| l.powi(k as i32) * w).sum();
                traces.push(tr_k);
                value += sign(m + k) * fact(k) / fact(m) * tr_k * bell_on(m, k, st.derivatives())?;
            }
            let mut comps = stack_components("u", &st.values);
            comps.extend(named("tr_sigma_theta", &traces, 1));
            Ok(MomentLimit { family, power, t: 0.0, value, components: comps })
        }
        Family::Ordinary => {
            at_zero(family, t)?;
            if cn >= 1.0 {
                return domain(format!("the ordinary inverse needs c < 1, got {cn}"));
            }
            check_order(power)?;
            let st = w_derivatives(power, cn, model)?;
            let m = power;
            let wt = &st.companion[1..];
            let mut value = 0.0;
            let mut traces = Vec::with_capacity(m);
            for k in 1..=m {
                // tr(Σ^{-k} Θ)
                let tr_k: f64 = lam.iter().zip(&diag).map(|(&l, &w)| l.powi(-(k as i32)) * w).sum();
                traces.push(tr_k);
                value += sign(k) * fact(k) * tr_k * bell_on(m, k, wt)?;
            }
            value *= sign(m) / fact(m);
            let mut comps = stack_components("w", &st.values);
            comps.extend(stack_components("wtilde", &st.companion));
            comps.extend(named("tr_inv_sigma_theta", &traces, 1));
            Ok(MomentLimit { family, power, t: 0.0, value, components: comps })
        }
    }
}

fn at_zero(family: Family, t: f64) -> Result<()> {
    if t != 0.0 {
        return arg(format!("family {family} is evaluated at t = 0, got t = {t}"));
    }
    Ok(())
}

fn positive_t(family: Family, t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("family {family} needs t > 0, got {t}"));
    }
    Ok(())
}

fn stack_components(name: &str, vals: &[f64]) -> Vec<(String, f64)> {
    vals.iter()
        .enumerate()
        .map(|(j, &x)| (if j == 0 { name.to_string() } else { format!("{name}{j}") }, x))
        .collect()
}

fn named(prefix: &str, vals: &[f64], start: usize) -> Vec<(String, f64)> {
    vals.iter().enumerate().map(|(j, &x)| (format!("{prefix}{}", j + start), x)).collect()
}

/// `s̃_power = t^{-power} d_0 + Σ_{l=1}^{power−1} t^{l−power} D_l`.
fn ridge_direct(power: usize, t: f64, d: &[f64], vder: &[f64]) -> Result<f64> {
    let mut value = d[0] / t.powi(power as i32);
    for l in 1..power {
        value += t.powi(l as i32 - power as i32) * big_d(l, d, vder)?;
    }
    Ok(value)
}

/// Same quantity through `s̃_{j+1} = (s̃_j + D_j) / t`.
fn ridge_recursive(power: usize, t: f64, d: &[f64], vder: &[f64]) -> Result<f64> {
    let mut s = d[0] / t;
    for j in 1..power {
        s = (s + big_d(j, d, vder)?) / t;
    }
    Ok(s)
}

/// MPR moment written with the `D_j` only, which keeps small `t` free of
/// cancellation: `−D_m + Σ_{k=2}^{m} (−1)^k C(m,k) Σ_{j=1}^{k−1} t^j D_{m+j}`.
fn mpr_from_d(m: usize, t: f64, d: &[f64], vder: &[f64]) -> Result<f64> {
    let mut value = -big_d(m, d, vder)?;
    for k in 2..=m {
        let mut inner = 0.0;
        for j in 1..k {
            inner += t.powi(j as i32) * big_d(m + j, d, vder)?;
        }
        value += sign(k) * binom(m, k) * inner;
    }
    Ok(value)
}

/// Ridge moment of a given power evaluated with the recursion in `j`; exposed
/// for cross-checking the direct sum.
pub fn ridge_moment_recursive(power: usize, t: f64, theta: &WeightMatrix, cn: f64, model: &SpectralModel) -> Result<f64> {
    positive_t(Family::Ridge, t)?;
    if power == 0 {
        return arg("power must be at least 1");
    }
    check_order(power - 1)?;
    let st = v_derivatives(t, power - 1, cn, model, DEFAULT_TOL)?;
    let diag = model.theta_diagonal(theta)?;
    let d: Vec<f64> = (0..power).map(|k| dk_from_diag(st.value(), k, model.eigenvalues(), &diag)).collect();
    ridge_recursive(power, t, &d, st.derivatives())
}

/// MPR moment from the binomial expansion
/// `Σ_{k=0}^{m} (−1)^k t^k C(m,k) s̃_{m+k}`; exposed for cross-checking.
pub fn mpr_moment_binomial(power: usize, t: f64, theta: &WeightMatrix, cn: f64, model: &SpectralModel) -> Result<f64> {
    positive_t(Family::Mpr, t)?;
    if power == 0 {
        return arg("power must be at least 1");
    }
    let order = 2 * power - 1;
    check_order(order)?;
    let st = v_derivatives(t, order, cn, model, DEFAULT_TOL)?;
    let diag = model.theta_diagonal(theta)?;
    let d: Vec<f64> = (0..=order).map(|k| dk_from_diag(st.value(), k, model.eigenvalues(), &diag)).collect();
    let mut value = 0.0;
    for k in 0..=power {
        value += sign(k) * t.powi(k as i32) * binom(power, k) * ridge_direct(power + k, t, &d, st.derivatives())?;
    }
    Ok(value)
}

/// `w(0) = 1 − c` with its derivatives, and `w̃ = t/w` in `companion`.
pub fn w_derivatives(m: usize, cn: f64, model: &SpectralModel) -> Result<DerivativeStack> {
    check_cn(cn)?;
    check_order(m)?;
    if cn >= 1.0 {
        return domain(format!("w(0) needs c < 1, got {cn}"));
    }
    let spec = Spectrum::of(model);
    let w0 = 1.0 - cn;
    // (1/p) tr Σ^{-k}
    let inv_mom = |k: usize| spec.mean(|l| l.powi(-(k as i32)));
    let mut w = vec![w0];
    let mut wt = vec![0.0];
    for j in 1..=m {
        // w̃^{(j)}(0) = j (1/w)^{(j−1)}(0)
        let recip = if j == 1 {
            1.0 / w0
        } else {
            let mut acc = 0.0;
            for k in 1..j {
                acc += sign(k) * fact(k) / w0.powi(k as i32 + 1) * bell_on(j - 1, k, &w[1..])?;
            }
            acc
        };
        wt.push(j as f64 * recip);
        let mut acc = 0.0;
        for k in 1..=j {
            acc += sign(k) * fact(k) * inv_mom(k) * bell_on(j, k, &wt[1..])?;
        }
        w.push(-cn * acc);
    }
    Ok(DerivativeStack { t: 0.0, cn, regime: Regime::WUnderOne, values: w, companion: wt })
}

/// `u' = 1` and `u^{(j)} = j c Σ_{k=1}^{j−1} (−1)^k k! (1/p) tr Σ^k B_{j−1,k}(u', ...)`.
pub fn u_derivatives(m: usize, cn: f64, model: &SpectralModel) -> Result<DerivativeStack> {
    check_cn(cn)?;
    check_order(m)?;
    let spec = Spectrum::of(model);
    let mut u = vec![0.0];
    for j in 1..=m {
        if j == 1 {
            u.push(1.0);
            continue;
        }
        let mut acc = 0.0;
        for k in 1..j {
            acc += sign(k) * fact(k) * spec.mean(|l| l.powi(k as i32)) * bell_on(j - 1, k, &u[1..])?;
        }
        u.push(j as f64 * cn * acc);
    }
    Ok(DerivativeStack { t: 0.0, cn, regime: Regime::USampleCov, values: u, companion: Vec::new() })
}

/// `v(t)` for `Σ = I`.
pub fn v_identity(t: f64, cn: f64) -> Result<f64> {
    check_cn(cn)?;
    if t < 0.0 || (t == 0.0 && cn <= 1.0) {
        return domain(format!("v({t}) is undefined at c = {cn}"));
    }
    let a = cn - 1.0 + t;
    Ok(2.0 / (a + (a * a + 4.0 * t).sqrt()))
}

/// `w(t)` for `Σ = I`; `w(0) = 1 − c` when `c < 1`.
pub fn w_identity(t: f64, cn: f64) -> Result<f64> {
    check_cn(cn)?;
    if t < 0.0 || (t == 0.0 && cn >= 1.0) {
        return domain(format!("w({t}) is undefined at c = {cn}"));
    }
    let a = 1.0 - cn - t;
    Ok((a + (a * a + 4.0 * t).sqrt()) / 2.0)
}

/// Closed-form `v` derivatives for `Σ = I`, where `h_k = v^{-k} − c (v+1)^{-k}`.
pub fn v_identity_derivatives(t: f64, m: usize, cn: f64) -> Result<Vec<f64>> {
    check_order(m)?;
    let v = v_identity(t, cn)?;
    v_recursion(v, m, |k| v.powi(-(k as i32)) - cn * (v + 1.0).powi(-(k as i32)))
}

/// Narayana polynomial `Σ_{k=1}^{m} N(m,k) c^{k−1}`, with value 1 at `m = 0`.
fn narayana(m: usize, c: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    (1..=m).map(|k| binom(m, k) * binom(m, k - 1) / m as f64 * c.powi(k as i32 - 1)).sum()
}

/// Coefficient of `tr(Θ)` in the limit of `tr(G^power Θ)` when `Σ = I`,
/// from closed forms only.
pub fn identity_closed_form(family: Family, power: usize, t: f64, cn: f64) -> Result<f64> {
    check_cn(cn)?;
    if power == 0 {
        return arg("power must be at least 1");
    }
    let c = cn;
    match family {
        Family::Mp => {
            at_zero(family, t)?;
            if c <= 1.0 {
                return domain(format!("Moore-Penrose limits need c > 1, got {c}"));
            }
            Ok(match power {
                1 => 1.0 / ((c - 1.0) * c),
                2 => 1.0 / (c - 1.0).powi(3),
                3 => (c + 1.0) / (c - 1.0).powi(5),
                4 => (c * c + 3.0 * c + 1.0) / (c - 1.0).powi(7),
                m => {
                    let v = v_identity_derivatives(0.0, m - 1, c)?;
                    sign(m - 1) * v[m - 1] / (fact(m - 1) * c)
                }
            })
        }
        Family::Ridge => {
            positive_t(family, t)?;
            let m = power;
            check_order(m - 1)?;
            let v = v_identity_derivatives(t, m - 1, c)?;
            Ok((c - 1.0) / (c * t.powi(m as i32)) + sign(m - 1) * v[m - 1] / (fact(m - 1) * c))
        }
        Family::Mpr => {
            positive_t(family, t)?;
            let m = power;
            check_order(2 * m - 1)?;
            let v = v_identity_derivatives(t, 2 * m - 1, c)?;
            let sum: f64 = (0..=m)
                .map(|k| binom(m, k) * v[m + k - 1] * t.powi(k as i32) / fact(m + k - 1))
                .sum();
            Ok(sign(m - 1) * sum / c)
        }
        Family::SampleCov => {
            at_zero(family, t)?;
            Ok(narayana(power, c))
        }
        Family::Ordinary => {
            at_zero(family, t)?;
            if c >= 1.0 {
                return domain(format!("the ordinary inverse needs c < 1, got {c}"));
            }
            Ok(narayana(power - 1, c) / (1.0 - c).powi(2 * power as i32 - 1))
        }
    }
}
