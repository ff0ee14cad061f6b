//! Partial exponential Bell polynomials.
//!
//! `B_{m,k}(x_1, ..., x_{m-k+1})` sums `m! / (j_1! ... j_r!) * prod (x_l / l!)^{j_l}`
//! over all non-negative integer sequences with `sum j_l = k` and
//! `sum l * j_l = m`. Orders used in this crate stay small, so the sequences
//! are enumerated directly by a bounded depth-first search.

use crate::error::{arg, Error, Result};

/// Largest order for which the integer coefficients are guaranteed to fit.
pub const MAX_ORDER: usize = 20;

/// Validated arguments of `B_{m,k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BellArguments {
    m: usize,
    k: usize,
    x: Vec<f64>,
}

impl BellArguments {
    /// `x` must hold exactly `m - k + 1` values.
    pub fn new(m: usize, k: usize, x: Vec<f64>) -> Result<Self> {
        check_shape(m, k, x.len())?;
        Ok(Self { m, k, x })
    }

    /// Takes the leading `m - k + 1` entries of a longer sequence, which is how
    /// the derivative recursions call the polynomial.
    pub fn from_prefix(m: usize, k: usize, seq: &[f64]) -> Result<Self> {
        check_order(m, k)?;
        let len = m - k + 1;
        if seq.len() < len {
            return arg(format!(
                "B_{{{m},{k}}} needs {len} arguments, got {}",
                seq.len()
            ));
        }
        Ok(Self { m, k, x: seq[..len].to_vec() })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }
}

fn check_order(m: usize, k: usize) -> Result<()> {
    if k == 0 || m < k {
        return arg(format!("Bell polynomial needs m >= k >= 1, got m={m}, k={k}"));
    }
    if m > MAX_ORDER {
        return arg(format!("Bell polynomial order {m} exceeds {MAX_ORDER}"));
    }
    Ok(())
}

fn check_shape(m: usize, k: usize, len: usize) -> Result<()> {
    check_order(m, k)?;
    if len != m - k + 1 {
        return arg(format!(
            "B_{{{m},{k}}} needs {} arguments, got {len}",
            m - k + 1
        ));
    }
    Ok(())
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// Calls `visit(j, coefficient)` for every admissible sequence `j`, where
/// `coefficient = m! / prod(j_l! (l!)^{j_l})` is the number of set partitions
/// with that block structure.
pub fn for_each_term(m: usize, k: usize, mut visit: impl FnMut(&[usize], i128)) -> Result<()> {
    check_order(m, k)?;
    let len = m - k + 1;
    let fact: Vec<i128> = (0..=m).map(factorial).collect();
    let mut j = vec![0usize; len];
    dfs(0, k, m, &mut j, &fact, &mut visit);
    Ok(())
}

fn dfs(
    pos: usize,
    k_left: usize,
    m_left: usize,
    j: &mut [usize],
    fact: &[i128],
    visit: &mut impl FnMut(&[usize], i128),
) {
    if pos == j.len() {
        if k_left == 0 && m_left == 0 {
            let m = fact.len() - 1;
            let mut denom: i128 = 1;
            for (i, &ji) in j.iter().enumerate() {
                denom *= fact[ji] * fact[i + 1].pow(ji as u32);
            }
            visit(j, fact[m] / denom);
        }
        return;
    }
    let l = pos + 1;
    // every remaining block has size >= l
    let max_j = k_left.min(m_left / l);
    for ji in 0..=max_j {
        let rest_k = k_left - ji;
        let rest_m = m_left - l * ji;
        if rest_k * (l + 1) > rest_m && rest_k > 0 {
            // remaining blocks cannot all be larger than l
            j[pos] = ji;
            continue;
        }
        j[pos] = ji;
        dfs(pos + 1, rest_k, rest_m, j, fact, visit);
    }
    j[pos] = 0;
}

/// Floating point value of `B_{m,k}(x)`.
pub fn bell_partial(args: &BellArguments) -> f64 {
    let mut total = 0.0;
    for_each_term(args.m, args.k, |j, coef| {
        let mut term = coef as f64;
        for (i, &ji) in j.iter().enumerate() {
            if ji > 0 {
                term *= args.x[i].powi(ji as i32);
            }
        }
        total += term;
    })
    .expect("validated arguments");
    total
}

/// Convenience wrapper: validates and evaluates in one call.
pub fn bell(m: usize, k: usize, x: &[f64]) -> Result<f64> {
    Ok(bell_partial(&BellArguments::new(m, k, x.to_vec())?))
}

/// Evaluates `B_{m,k}` on the prefix of a derivative sequence
/// `seq = (f', f'', ...)`.
pub fn bell_on(m: usize, k: usize, seq: &[f64]) -> Result<f64> {
    Ok(bell_partial(&BellArguments::from_prefix(m, k, seq)?))
}

/// Exact integer evaluation. Fails on overflow instead of wrapping.
pub fn bell_partial_exact(m: usize, k: usize, x: &[i64]) -> Result<i128> {
    check_shape(m, k, x.len())?;
    let overflow = || Error::Argument(format!("B_{{{m},{k}}} overflows 128-bit integers"));
    let mut total: Option<i128> = Some(0);
    for_each_term(m, k, |j, coef| {
        let mut term = Some(coef);
        for (i, &ji) in j.iter().enumerate() {
            term = term.and_then(|t| {
                (x[i] as i128)
                    .checked_pow(ji as u32)
                    .and_then(|p| t.checked_mul(p))
            });
        }
        total = match (total, term) {
            (Some(a), Some(b)) => a.checked_add(b),
            _ => None,
        };
    })?;
    total.ok_or_else(overflow)
}
