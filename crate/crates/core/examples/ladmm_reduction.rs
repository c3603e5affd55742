//! Runs the L-ADMM baseline through its primal-dual reduction and shows that
//! each iteration costs two rounds and `η = 0`.

use std::sync::Arc;

use mappro::algorithm::{init_state, l_admm_config, run, RunOptions};
use mappro::graph::{laplacian, random_connected_graph, Weighting};
use mappro::metrics::{DiagnosticOptions, Diagnostics};
use mappro::problems::{generate_benchmark_data, logistic_nonconvex, BenchmarkSpec};

fn main() -> mappro::Result<()> {
    let spec = BenchmarkSpec { n_nodes: 8, samples: 50, ..BenchmarkSpec::default() };
    let problem = logistic_nonconvex(&generate_benchmark_data(&spec))?;
    let h = Arc::new(laplacian(&random_connected_graph(8, 12, 1)?, Weighting::Uniform));

    let (gamma, alpha, beta) = (1.0, 0.05, 0.3);
    let cfg = l_admm_config(gamma, alpha, beta, h.clone())?;
    let g = cfg.constant_operator().expect("L-ADMM uses a constant operator");
    println!("ζ = {}, η = {}, ρ = {}, θ = {}, ᾱ = {}", g.zeta(), g.eta(), cfg.rho(), cfg.theta(), cfg.dual_scale());

    let diag = Diagnostics::new(&problem, &cfg, h, None, DiagnosticOptions::default())?;
    let traj = run(&problem, &cfg, init_state(&problem, None, None)?, &RunOptions::iterations(300), &diag)?;
    for r in traj.records.iter().step_by(50) {
        println!("k {:>4}  rounds {:>4}  gap {:.3e}", r.k, r.rounds, r.opt_gap);
    }
    Ok(())
}
