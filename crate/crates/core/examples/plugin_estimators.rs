//! Plug-in estimators of `v^{(m)}(t)`, `h_k` and `d_k` next to their
//! deterministic targets.

use pseudoshrink::detlim::{v_derivatives, DEFAULT_TOL};
use pseudoshrink::plugin_est::PluginContext;
use pseudoshrink::randmat::{Dist, Sampler, SpectralModel, WeightMatrix};

pub fn run() -> pseudoshrink::Result<()> {
    let (n, p) = (150, 300);
    let model = SpectralModel::paper_mix(p).with_haar_basis(3)?;
    let y = Sampler::new(&model).draw(n, Dist::Normal, None, 21)?;
    let ctx = PluginContext::from_observations(&y)?;
    let cn = p as f64 / n as f64;

    for t in [0.0, 1.0] {
        let truth = v_derivatives(t, 2, cn, &model, DEFAULT_TOL)?;
        for m in 0..=2 {
            println!("t = {t}: v^({m}) estimate {:+.5}, limit {:+.5}", ctx.hat_v_derivative(m, t)?, truth.values[m]);
        }
    }
    println!("ĥ_2 = {:.5}, ĥ_3 = {:.5}", ctx.hat_h(2)?, ctx.hat_h(3)?);
    let theta = WeightMatrix::trace_normalized(p);
    for k in 0..=3 {
        println!("d̂_{k}(I/p) = {:.5}", ctx.hat_d(k, &theta, 0.0)?);
    }
    println!("q̂_1 = {:.4}, q̂_2 = {:.4}", ctx.hat_q(1, &theta)?, ctx.hat_q(2, &theta)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> pseudoshrink::Result<()> {
    run()
}
