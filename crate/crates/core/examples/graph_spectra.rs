//! Builds a random connected graph and prints the spectra of both gossip
//! weightings, plus the Chebyshev rescaling.

use mappro::graph::{laplacian, random_connected_graph, Weighting};
use mappro::mixing::rescale_for_chebyshev;

fn main() -> mappro::Result<()> {
    let net = random_connected_graph(12, 20, 4)?;
    println!("{} nodes, {} edges", net.n_nodes(), net.n_edges());
    for w in [Weighting::Uniform, Weighting::Metropolis] {
        let h = laplacian(&net, w);
        let b = h.bounds();
        println!(
            "{w:?}: λ_min+ = {:.4}, λ_max = {:.4}, κ = {:.2}",
            b.lambda_min_pos,
            b.lambda_max,
            b.lambda_max / b.lambda_min_pos
        );
        let (scaled, sb) = rescale_for_chebyshev(&h)?;
        println!(
            "  rescaled: λ_min+ + λ_max = {:.6}, trace {:.4}",
            sb.lambda_min_pos + sb.lambda_max,
            scaled.dense().trace()
        );
    }
    Ok(())
}
