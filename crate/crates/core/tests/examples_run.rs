//! Every example runs to completion.

#[path = "../examples/bell_polynomials.rs"]
mod bell_polynomials;

#[path = "../examples/haar_and_sampling.rs"]
mod haar_and_sampling;

#[path = "../examples/deterministic_limits.rs"]
mod deterministic_limits;

#[path = "../examples/plugin_estimators.rs"]
mod plugin_estimators;

#[path = "../examples/precision_shrinkage.rs"]
mod precision_shrinkage;

#[path = "../examples/gmv_portfolio.rs"]
mod gmv_portfolio;

#[path = "../examples/monte_carlo.rs"]
mod monte_carlo;

#[path = "../examples/moment_consistency.rs"]
mod moment_consistency;

macro_rules! runs {
    ($($name:ident),*) => {
        $(
            #[test]
            fn $name() {
                $name::run().unwrap();
            }
        )*
    };
}

runs!(bell_polynomials, haar_and_sampling, deterministic_limits, plugin_estimators, precision_shrinkage, gmv_portfolio, monte_carlo, moment_consistency);
