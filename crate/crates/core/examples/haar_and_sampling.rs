//! Population models with a Haar distributed eigenbasis, seeded sampling and
//! the generalized inverses of the resulting sample covariance.

use pseudoshrink::randmat::{
    generalized_inverse, sample_covariance, weighted_trace_power, Dist, InverseKind, Sampler, SpectralModel, WeightMatrix,
};

pub fn run() -> pseudoshrink::Result<()> {
    let (p, n) = (60, 30);
    let model = SpectralModel::paper_mix(p).with_haar_basis(11)?;
    let sigma = model.covariance();
    println!("tr(Σ)/p = {:.4}", sigma.trace() / p as f64);

    let sampler = Sampler::new(&model);
    for dist in [Dist::Normal, Dist::ScaledT5] {
        let y = sampler.draw(n, dist, None, 5)?;
        let again = sampler.draw(n, dist, None, 5)?;
        let s = sample_covariance(&y)?;
        println!(
            "{dist}: same seed reproduces the draw: {}, tr(S)/p = {:.4}",
            y.data() == again.data(),
            s.trace() / p as f64
        );
    }

    let y = sampler.draw(n, Dist::Normal, None, 6)?;
    let theta = WeightMatrix::trace_normalized(p);
    for (kind, t) in [(InverseKind::MoorePenrose, 0.0), (InverseKind::Ridge, 1.0), (InverseKind::Mpr, 1.0)] {
        let g = generalized_inverse(&sample_covariance(&y)?, kind, t, None)?;
        println!("{kind:?}: (1/p) tr(G) = {:.5}, (1/p) tr(G²) = {:.5}", weighted_trace_power(&g, 1, &theta)?, weighted_trace_power(&g, 2, &theta)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pseudoshrink::Result<()> {
    run()
}
