//! Global minimum variance portfolio weights from a singular sample
//! covariance, shrunk towards the equally weighted portfolio.

use pseudoshrink::plugin_est::PluginContext;
use pseudoshrink::randmat::{Dist, Sampler, SpectralModel};
use pseudoshrink::shrink_gmv::{
    bona_fide_alpha_mp_ctx, double_shrinkage, equal_weights, mp_weights, oracle_alpha_for, reflexive, rosv, true_gmv,
};

pub fn run() -> pseudoshrink::Result<()> {
    let (n, p) = (50, 150);
    let model = SpectralModel::paper_mix(p).with_haar_basis(2)?;
    let truth = true_gmv(&model);
    let y = Sampler::new(&model).draw(n, Dist::Normal, None, 9)?;
    let ctx = PluginContext::from_observations(&y)?;
    let b = equal_weights(p);

    let plugin = mp_weights(&ctx)?;
    println!("V_GMV = {:.4}", truth.variance);
    println!("plugin S⁺: rOSV {:.3}", rosv(&plugin, &model, &truth));
    println!("equal:     rOSV {:.3}", rosv(&b, &model, &truth));
    let mp = bona_fide_alpha_mp_ctx(&ctx, &b)?;
    let oracle = oracle_alpha_for(&plugin, &model, &b)?;
    println!(
        "mp:        rOSV {:.3}, α = {:.4} (oracle {:.4})",
        rosv(&mp.weights, &model, &truth),
        mp.alpha.unwrap_or(f64::NAN),
        oracle.alpha
    );
    let refl = reflexive(&ctx, &b)?;
    println!("reflexive: rOSV {:.3}", rosv(&refl.weights, &model, &truth));
    let double = double_shrinkage(&ctx, &b)?;
    println!("double:    rOSV {:.3}, η = {:.4}", rosv(&double.weights, &model, &truth), double.eta.unwrap_or(f64::NAN));
    Ok(())
}

#[allow(dead_code)]
fn main() -> pseudoshrink::Result<()> {
    run()
}
