//! Where 3.44 comes from.
//!
//! For `Y ~ Poisson(λ)` the threshold variable `F*` puts weight on the upper
//! half of `Y`; the zero-round cover guarantee is the worst ratio of
//! `E[F*]` to `Pr(Y ≠ 0)` over all `λ`.
//!
//! Run with `cargo run --release --example poisson_constant`.

use stochgraph::poisson::{evaluate_point, lambda_boundaries, lambda_of_p, minimize_ratio, ratio_curve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("p = 0.5 gives lambda = {:.6}", lambda_of_p(0.5)?);
    for lambda in [0.5, 1.0, 2.0, 5.0] {
        let pt = evaluate_point(lambda)?;
        println!(
            "lambda {lambda}: median {}, beta {:.4}, E[F*] {:.4}, E[F*Y] {:.4}, ratio {:.4}",
            pt.m, pt.beta, pt.exp_f, pt.exp_fy, pt.ratio
        );
    }
    println!("median boundaries: {:?}", lambda_boundaries(4));
    let min = minimize_ratio();
    println!("minimum at lambda = {:.6}: ratio 1/{:.5}", min.lambda, 1.0 / min.ratio);
    let worst = ratio_curve(10_000, 20.0)
        .iter()
        .map(|p| p.ratio)
        .fold(f64::INFINITY, f64::min);
    println!("worst on a grid over (0, 20]: 1/{:.5}", 1.0 / worst);
    Ok(())
}
