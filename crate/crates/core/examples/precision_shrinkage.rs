//! Shrinkage of the precision matrix towards the identity with the three
//! generalized inverses, compared with the benchmarks and the oracle.

use pseudoshrink::plugin_est::PluginContext;
use pseudoshrink::randmat::{Dist, Sampler, SpectralModel, WeightMatrix};
use pseudoshrink::shrink_prec::{
    bona_fide_ctx, empirical_bayes, frobenius_loss, optimal_ridge, oracle_intensities, oracle_nl, PrecisionMethod,
};

pub fn run() -> pseudoshrink::Result<()> {
    let (n, p) = (60, 120);
    let model = SpectralModel::paper_mix(p).with_haar_basis(8)?;
    let sigma = model.covariance();
    let y = Sampler::new(&model).draw(n, Dist::Normal, None, 4)?;
    let ctx = PluginContext::from_observations(&y)?;
    let target = WeightMatrix::scaled_identity(p, 1.0);

    let baseline = frobenius_loss(&ctx.inverse_matrix(pseudoshrink::randmat::InverseKind::MoorePenrose, 0.0)?, &sigma);
    println!("loss of S⁺: {baseline:.2}");
    for method in [PrecisionMethod::Mp, PrecisionMethod::Ridge, PrecisionMethod::Mpr] {
        let plan = bona_fide_ctx(&ctx, method, &target, None)?;
        let g = ctx.inverse_matrix(plan.inverse.expect("bona fide plans carry an inverse"), plan.t_star)?;
        let oracle = oracle_intensities(&g, &model, &target)?;
        println!(
            "{method:>5}: t* = {:.3}, α = {:+.4} (oracle {:+.4}), β = {:.4} (oracle {:.4}), loss {:.2} {:?}",
            plan.t_star,
            plan.alpha,
            oracle.alpha,
            plan.beta,
            oracle.beta,
            plan.loss(&sigma),
            plan.flags
        );
    }
    for plan in [empirical_bayes(&ctx)?, optimal_ridge(&ctx)?, oracle_nl(&ctx, &sigma)?] {
        println!("{:>15}: loss {:.2}", plan.method.tag(), plan.loss(&sigma));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pseudoshrink::Result<()> {
    run()
}
