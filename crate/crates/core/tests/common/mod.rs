//! Reference computations shared by the integration tests. None of them goes
//! through the library routines they are compared with.

#![allow(dead_code)]

use std::f64::consts::PI;

/// `B_{m,k}(x)` by walking every set partition of `{1, ..., m}` with exactly
/// `k` blocks (restricted growth strings) and multiplying `x_{|block|}`.
pub fn brute_bell(m: usize, k: usize, x: &[i64]) -> i128 {
    fn walk(pos: usize, m: usize, k: usize, labels: &mut Vec<usize>, blocks: usize, x: &[i64], total: &mut i128) {
        if pos == m {
            if blocks == k {
                let mut sizes = vec![0usize; k];
                for &l in labels.iter() {
                    sizes[l] += 1;
                }
                *total += sizes.iter().map(|&s| x[s - 1] as i128).product::<i128>();
            }
            return;
        }
        // not enough elements left to open the missing blocks
        if blocks + (m - pos) < k {
            return;
        }
        for l in 0..=blocks.min(k - 1) {
            labels.push(l);
            walk(pos + 1, m, k, labels, blocks.max(l + 1), x, total);
            labels.pop();
        }
    }
    let mut total = 0;
    walk(0, m, k, &mut Vec::with_capacity(m), 0, x, &mut total);
    total
}

/// `∫ g dμ` for the Marchenko-Pastur law with ratio `y ≤ 1` and unit scale,
/// via `x = mid + half·cos θ` and the trapezoid rule, which converges
/// geometrically for smooth `g`.
pub fn mp_integral(y: f64, g: impl Fn(f64) -> f64) -> f64 {
    let a = (1.0 - y.sqrt()).powi(2);
    let b = (1.0 + y.sqrt()).powi(2);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let n = 4000;
    let h = PI / n as f64;
    let mut s = 0.0;
    for i in 1..n {
        let th = i as f64 * h;
        let x = mid + half * th.cos();
        s += th.sin().powi(2) * g(x) / x;
    }
    s * h * half * half / (2.0 * PI * y)
}

/// Limit of `(1/p) tr[(S⁺)^m]` for `Σ = I` and `c > 1`: the `n` nonzero
/// eigenvalues of `S` are `c` times a Marchenko-Pastur variable with ratio
/// `1/c`.
pub fn mp_trace_identity(c: f64, m: i32) -> f64 {
    mp_integral(1.0 / c, |x| (c * x).powi(-m)) / c
}

/// Limit of `(1/p) tr[(S + tI)^{-m}]` for `Σ = I` and `c > 1`.
pub fn ridge_trace_identity(c: f64, t: f64, m: i32) -> f64 {
    mp_integral(1.0 / c, |x| (c * x + t).powi(-m)) / c + (1.0 - 1.0 / c) * t.powi(-m)
}

/// `v(t)` from the Silverstein equation `1/v − t = c·mean(λ/(1 + λv))` by
/// damped fixed-point iteration.
pub fn silverstein_v(t: f64, c: f64, lam: &[f64]) -> f64 {
    let mean = |v: f64| lam.iter().map(|l| l / (1.0 + l * v)).sum::<f64>() / lam.len() as f64;
    let mut v = 1.0 / (t + c * mean(0.0));
    for _ in 0..200_000 {
        let next = 1.0 / (t + c * mean(v));
        let upd = 0.5 * (v + next);
        if (upd - v).abs() < 1e-15 * v {
            return upd;
        }
        v = upd;
    }
    v
}

/// Richardson-extrapolated central differences of order 1 to 3.
pub fn richardson_derivative(f: impl Fn(f64) -> f64, x: f64, order: usize, h: f64) -> f64 {
    let d = |h: f64| match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h.powi(3)),
        _ => panic!("order {order} not supported"),
    };
    let (a, b, c) = (d(h), d(h / 2.0), d(h / 4.0));
    // two rounds removing the h² and h⁴ error terms
    let ab = (4.0 * b - a) / 3.0;
    let bc = (4.0 * c - b) / 3.0;
    (16.0 * bc - ab) / 15.0
}

/// Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}
