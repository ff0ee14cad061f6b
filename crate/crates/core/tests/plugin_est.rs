use proptest::prelude::*;
use pseudoshrink::detlim::{dk_weighted, v_derivatives, DEFAULT_TOL};
use pseudoshrink::plugin_est::PluginContext;
use pseudoshrink::randmat::{Dist, Sampler, SpectralModel, WeightMatrix};

fn ctx_for(p: usize, n: usize, seed: u64) -> PluginContext {
    let model = SpectralModel::paper_mix(p).with_haar_basis(seed).unwrap();
    PluginContext::from_observations(&Sampler::new(&model).draw(n, Dist::Normal, None, seed).unwrap()).unwrap()
}

#[test]
fn estimators_are_close_to_their_limits() {
    let (n, p) = (200, 400);
    let model = SpectralModel::paper_mix(p).with_haar_basis(5).unwrap();
    let ctx = PluginContext::from_observations(&Sampler::new(&model).draw(n, Dist::Normal, None, 5).unwrap()).unwrap();
    let theta = WeightMatrix::trace_normalized(p);
    for t in [0.0, 0.5, 2.0] {
        let st = v_derivatives(t, 2, 2.0, &model, DEFAULT_TOL).unwrap();
        for m in 0..=2 {
            let e = ctx.hat_v_derivative(m, t).unwrap();
            // higher derivatives converge more slowly
            let tol = [0.03, 0.05, 0.12][m];
            assert!((e / st.values[m] - 1.0).abs() < tol, "t={t} m={m}: {e} vs {}", st.values[m]);
        }
        let d1 = dk_weighted(&st, 1, &theta, &model).unwrap();
        let e = ctx.hat_d(1, &theta, t).unwrap();
        assert!((e / d1 - 1.0).abs() < 0.05, "d1 at t={t}: {e} vs {d1}");
        if t == 0.0 {
            for (k, tol) in [(2, 0.03), (3, 0.06)] {
                let dk = dk_weighted(&st, k, &theta, &model).unwrap();
                let e = ctx.hat_d(k, &theta, 0.0).unwrap();
                assert!((e / dk - 1.0).abs() < tol, "d{k}: {e} vs {dk}");
            }
        }
    }
    let sigma = model.covariance();
    let q1 = sigma.trace() / p as f64;
    let q2 = (&sigma * &sigma).trace() / p as f64;
    assert!((ctx.hat_q(1, &theta).unwrap() / q1 - 1.0).abs() < 0.03);
    assert!((ctx.hat_q(2, &theta).unwrap() / q2 - 1.0).abs() < 0.05);
}

#[test]
fn t_zero_needs_more_variables_than_observations() {
    let ctx = ctx_for(20, 40, 1);
    assert!(ctx.hat_v_derivative(0, 0.0).is_err());
    assert!(ctx.hat_h(2).is_err());
    assert!(ctx.hat_v_derivative(0, 1.0).unwrap() > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Y → aY multiplies S by a²: v^{(m)} picks up a^{-2(m+1)} at fixed t/a²,
    // h_k and d_k pick up a^{2k}
    #[test]
    fn scale_equivariance(a in 0.2f64..5.0, seed in 0u64..500, t in 0.1f64..3.0) {
        let model = SpectralModel::paper_mix(30);
        let y = Sampler::new(&model).draw(12, Dist::Normal, None, seed).unwrap();
        let c0 = PluginContext::from_observations(&y).unwrap();
        let c1 = PluginContext::from_observations(&y.scaled(a)).unwrap();
        let a2 = a * a;
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-8 * (x.abs() + y.abs());
        for m in 0..3 {
            let f = a2.powi(-(m as i32 + 1));
            prop_assert!(close(c1.hat_v_derivative(m, 0.0).unwrap(), f * c0.hat_v_derivative(m, 0.0).unwrap()));
            prop_assert!(close(c1.hat_v_derivative(m, a2 * t).unwrap(), f * c0.hat_v_derivative(m, t).unwrap()));
        }
        let th = WeightMatrix::trace_normalized(30);
        for k in 2..=4 {
            prop_assert!(close(c1.hat_h(k).unwrap(), a2.powi(k as i32) * c0.hat_h(k).unwrap()));
        }
        for k in 1..=3 {
            prop_assert!(close(c1.hat_d(k, &th, 0.0).unwrap(), a2.powi(k as i32) * c0.hat_d(k, &th, 0.0).unwrap()));
        }
    }

    #[test]
    fn v_hat_decreases_and_joins_t_zero(seed in 0u64..500, t in 0.01f64..5.0, dt in 0.01f64..2.0) {
        let ctx = ctx_for(30, 12, seed);
        let a = ctx.hat_v_derivative(0, t).unwrap();
        let b = ctx.hat_v_derivative(0, t + dt).unwrap();
        prop_assert!(a > b && b > 0.0);
        let v0 = ctx.hat_v_derivative(0, 0.0).unwrap();
        prop_assert!(v0 > a);
        prop_assert!((ctx.hat_v_derivative(0, 1e-9).unwrap() - v0).abs() < 1e-6 * v0);
    }

    // d̂_0(t, Θ) is linear in Θ
    #[test]
    fn d_hat_is_linear_in_theta(seed in 0u64..500, w in -3.0f64..3.0, t in 0.0f64..2.0) {
        let ctx = ctx_for(20, 8, seed);
        let a = WeightMatrix::trace_normalized(20);
        let diag = nalgebra::DMatrix::from_fn(20, 20, |i, j| if i == j { (i % 4) as f64 } else { 0.0 });
        let b = WeightMatrix::dense(diag.clone()).unwrap();
        let ab = WeightMatrix::dense(a.to_dense() + diag * w).unwrap();
        let k = if t == 0.0 { 1 } else { 0 };
        let lhs = ctx.hat_d(k, &ab, t).unwrap();
        let rhs = ctx.hat_d(k, &a, t).unwrap() + w * ctx.hat_d(k, &b, t).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }
}
