//! Ranks the three tuned benchmark configurations by the communication
//! rounds they need to reach a common optimality gap.

use std::path::Path;

use mappro::experiment::{compare, format_table, ExperimentConfig};

fn main() -> mappro::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let configs = ["bench_ladmm.toml", "bench_map_pro.toml", "bench_map_pro_ca.toml"]
        .iter()
        .map(|f| ExperimentConfig::load(&dir.join(f)))
        .collect::<mappro::Result<Vec<_>>>()?;
    let gap = 1e-6;
    print!("{}", format_table(&compare(&configs, gap)?, gap));
    Ok(())
}
