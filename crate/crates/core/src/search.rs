//! One-dimensional maximization over `t ∈ (0, ∞)` through `t = tan(u)`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

pub const GRID_POINTS: usize = 64;
pub const U_MIN: f64 = 0.01;
pub const U_MAX: f64 = FRAC_PI_2 - 0.01;
/// Golden-section refinement stops once the bracket is this narrow in `u`.
pub const U_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TanSearch {
    pub t_star: f64,
    pub u_star: f64,
    pub value: f64,
    /// Set when every grid value was the same; `u_star` is then the midpoint.
    pub flat: bool,
    /// `(t, objective(t))` on the coarse grid.
    pub grid: Vec<(f64, f64)>,
}

pub fn grid_u() -> Vec<f64> {
    let step = (U_MAX - U_MIN) / (GRID_POINTS - 1) as f64;
    (0..GRID_POINTS).map(|i| U_MIN + i as f64 * step).collect()
}

/// Maximizes `objective(t)`: a 64 point grid in `u`, then golden-section
/// search on the two cells around the best grid point. Non-finite values are
/// treated as missing.
pub fn search_tstar(objective: impl Fn(f64) -> f64) -> Result<TanSearch> {
    let us = grid_u();
    let grid: Vec<(f64, f64)> = us.iter().map(|&u| (u.tan(), objective(u.tan()))).collect();
    let finite: Vec<usize> = (0..grid.len()).filter(|&i| grid[i].1.is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::Search("objective is not finite anywhere on the grid".into()));
    }
    let (lo, hi) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &i| {
        (a.min(grid[i].1), b.max(grid[i].1))
    });
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        let u = 0.5 * (U_MIN + U_MAX);
        return Ok(TanSearch { t_star: u.tan(), u_star: u, value: objective(u.tan()), flat: true, grid });
    }
    let best = *finite
        .iter()
        .max_by(|&&a, &&b| grid[a].1.total_cmp(&grid[b].1).then(b.cmp(&a)))
        .expect("non-empty");
    let g = |u: f64| {
        let y = objective(u.tan());
        if y.is_finite() {
            y
        } else {
            f64::NEG_INFINITY
        }
    };
    let a = us[best.saturating_sub(1)];
    let b = us[(best + 1).min(us.len() - 1)];
    let (u_ref, y_ref) = golden_max(&g, a, b);
    let (u_star, value) = if y_ref >= grid[best].1 { (u_ref, y_ref) } else { (us[best], grid[best].1) };
    Ok(TanSearch { t_star: u_star.tan(), u_star, value, flat: false, grid })
}

fn golden_max(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    while b - a > U_TOL {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = g(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
