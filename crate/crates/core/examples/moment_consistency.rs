//! Empirical weighted trace moments of the Moore-Penrose and ridge inverses
//! against their deterministic equivalents, including the two-resolvent
//! sandwich `1ᵀS⁺ΣS⁺1`.

use nalgebra::DVector;
use pseudoshrink::detlim::{limit_moment, mp_sandwich_limit, Family};
use pseudoshrink::plugin_est::PluginContext;
use pseudoshrink::randmat::{matrix_trace_power, Dist, InverseKind, Sampler, SpectralModel, WeightMatrix};

pub fn run() -> pseudoshrink::Result<()> {
    let (n, p, reps) = (100, 200, 4);
    let cn = p as f64 / n as f64;
    let model = SpectralModel::paper_mix(p).with_haar_basis(1)?;
    let sigma = model.covariance();
    let sampler = Sampler::new(&model);
    let theta = WeightMatrix::trace_normalized(p);
    let ones = DVector::from_element(p, 1.0);
    let th11 = WeightMatrix::rank_one(ones.clone(), 1.0 / p as f64)?;

    let mut mp = [0.0; 3];
    let mut ridge = [0.0; 2];
    let mut sandwich = 0.0;
    for seed in 0..reps {
        let ctx = PluginContext::from_observations(&sampler.draw(n, Dist::Normal, None, seed)?)?;
        let g = ctx.inverse_matrix(InverseKind::MoorePenrose, 0.0)?;
        for (m, acc) in mp.iter_mut().enumerate() {
            *acc += matrix_trace_power(&g, m + 1, &theta)? / reps as f64;
        }
        let r = ctx.inverse_matrix(InverseKind::Ridge, 1.0)?;
        for (m, acc) in ridge.iter_mut().enumerate() {
            *acc += matrix_trace_power(&r, m + 1, &theta)? / reps as f64;
        }
        let g1 = &g * &ones;
        sandwich += (g1.dot(&(&sigma * &g1)) / p as f64) / reps as f64;
    }
    for (m, e) in mp.iter().enumerate() {
        let lim = limit_moment(Family::Mp, m + 1, 0.0, &theta, cn, &model)?.value;
        println!("mp    m = {}: empirical {e:.5}, limit {lim:.5}", m + 1);
    }
    for (m, e) in ridge.iter().enumerate() {
        let lim = limit_moment(Family::Ridge, m + 1, 1.0, &theta, cn, &model)?.value;
        println!("ridge m = {}: empirical {e:.5}, limit {lim:.5}", m + 1);
    }
    println!("(1/p) 1ᵀS⁺ΣS⁺1: empirical {sandwich:.4}, limit {:.4}", mp_sandwich_limit(&th11, cn, &model)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> pseudoshrink::Result<()> {
    run()
}
