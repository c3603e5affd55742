//! Selects theory parameters for several `κ₁` targets and prints the
//! resulting step sizes, contraction factor and `λ̂_G` bounds.

use mappro::algorithm::{select_parameters, LAMBDA_HAT_BOUNDS};
use mappro::graph::{laplacian, random_connected_graph, Weighting};
use mappro::mixing::MixingSpec;
use mappro::problems::pl_quadratic;
use mappro::Error;

fn main() -> mappro::Result<()> {
    let problem = pl_quadratic(10, 4, 3, 7)?;
    let h = laplacian(&random_connected_graph(10, 15, 3)?, Weighting::Uniform);
    for kappa1 in [1.0, 1.5, 3.0] {
        match select_parameters(&problem, &h, kappa1, &MixingSpec::uniform(2)) {
            Ok((cfg, c)) => {
                let g = cfg.constant_operator().expect("theory configs are constant");
                println!(
                    "κ₁ = {kappa1}: ζ = {:.3e}, η = {:.3e}, ρ = {:.3e}, θ = {:.3e}, δ = {:?}",
                    g.zeta(),
                    g.eta(),
                    cfg.rho(),
                    cfg.theta(),
                    c.delta
                );
                for (name, b) in LAMBDA_HAT_BOUNDS.iter().zip(c.lambda_hat_bounds) {
                    println!("    λ̂_G = {:.3e} ≤ {b:.3e} ({name})", c.lambda_hat_g);
                }
                assert!(c.violations().is_empty());
            }
            Err(e @ Error::Infeasible { .. }) => println!("κ₁ = {kappa1}: {e}"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
