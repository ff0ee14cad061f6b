//! Partial exponential Bell polynomials, evaluated in floating point and
//! exactly, and the Bell numbers recovered from them.

use pseudoshrink::bellpoly::{bell, bell_partial_exact, for_each_term};

pub fn run() -> pseudoshrink::Result<()> {
    // B_{6,2}(x_1, ..., x_5) term by term
    println!("terms of B_6,2:");
    for_each_term(6, 2, |j, coef| println!("  {coef} * x^{j:?}"))?;

    let x: Vec<f64> = (1..=5).map(|i| 1.0 / i as f64).collect();
    println!("B_6,2(1, 1/2, ..., 1/5) = {}", bell(6, 2, &x)?);

    // with every argument equal to one the partial polynomials are Stirling
    // numbers of the second kind and their row sums are Bell numbers
    for m in 1..=8 {
        let ones = vec![1i64; m];
        let total: i128 = (1..=m).map(|k| bell_partial_exact(m, k, &ones[..m - k + 1])).sum::<pseudoshrink::Result<i128>>()?;
        println!("Bell number B_{m} = {total}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pseudoshrink::Result<()> {
    run()
}
