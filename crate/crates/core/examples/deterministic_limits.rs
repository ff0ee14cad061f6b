//! Deterministic equivalents of weighted trace moments for each inverse,
//! checked against the closed forms available when `Σ = I`.

use pseudoshrink::detlim::{identity_closed_form, limit_moment, solve_v, v_derivatives, Family, DEFAULT_TOL};
use pseudoshrink::randmat::{SpectralModel, WeightMatrix};

pub fn run() -> pseudoshrink::Result<()> {
    let p = 200;
    let theta = WeightMatrix::trace_normalized(p);
    let identity = SpectralModel::identity(p);

    println!("Σ = I, c = 2, Moore-Penrose moments (1/p) tr((S⁺)^m):");
    for m in 1..=4 {
        let lim = limit_moment(Family::Mp, m, 0.0, &theta, 2.0, &identity)?;
        println!("  m = {m}: {:.12} (closed form {:.12})", lim.value, identity_closed_form(Family::Mp, m, 0.0, 2.0)?);
    }

    let mix = SpectralModel::paper_mix(p);
    println!("mixed spectrum (ones, threes, tens), c = 2:");
    for t in [0.0, 0.5, 2.0] {
        let st = v_derivatives(t, 2, 2.0, &mix, DEFAULT_TOL)?;
        println!("  v({t}) = {:.6}, v' = {:.6}, v'' = {:.6}", st.values[0], st.values[1], st.values[2]);
    }
    for family in [Family::Ridge, Family::Mpr] {
        let lim = limit_moment(family, 2, 1.0, &theta, 2.0, &mix)?;
        println!("  {family} at t = 1, m = 2: {:.6}", lim.value);
    }
    let lim = limit_moment(Family::SampleCov, 3, 0.0, &theta, 0.5, &mix)?;
    println!("  samplecov, c = 0.5, m = 3: {:.4}", lim.value);

    // v(t) decreases in t
    let vs: Vec<f64> = (0..6).map(|i| solve_v(i as f64, 2.0, &mix, DEFAULT_TOL)).collect::<pseudoshrink::Result<_>>()?;
    println!("  v on t = 0..5: {vs:.4?}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> pseudoshrink::Result<()> {
    run()
}
