//! Compares explicit and Chebyshev mixing on the same disagreement vector and
//! reports the rounds each oracle charges.

use mappro::graph::{laplacian, random_connected_graph, Weighting};
use mappro::linalg::{broadcast, node_average};
use mappro::mixing::{polynomial_spectral_range, rescale_for_chebyshev, kappa_p, MixingSpec, RoundCounter};
use nalgebra::DMatrix;

fn main() -> mappro::Result<()> {
    let net = random_connected_graph(16, 24, 2)?;
    let h = laplacian(&net, Weighting::Uniform);
    let (p, _) = rescale_for_chebyshev(&h)?;

    let y = DMatrix::from_fn(16, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
    let y = &y - broadcast(&node_average(&y), 16);

    for spec in [MixingSpec::identity(), MixingSpec::uniform(3), MixingSpec::Chebyshev { degree: 3 }] {
        let bound = spec.bind(&p)?;
        let mut rounds = RoundCounter::new();
        let out = bound.apply(&y, &p, &mut rounds)?;
        let range = polynomial_spectral_range(&bound, &p)?;
        println!(
            "{spec:?}: rounds {}, range [{:.4}, {:.4}], κ_P {:.3}, ‖out‖ {:.4}",
            rounds.get(),
            range.0,
            range.1,
            kappa_p(range),
            out.norm()
        );
    }
    Ok(())
}
