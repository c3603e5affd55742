//! Runs a theory-mode solver on a P-Ł quadratic and checks the Lyapunov
//! descent, sandwich and rate inequalities along the trajectory.

use std::sync::Arc;

use mappro::algorithm::{init_state, run, select_parameters, RunOptions};
use mappro::graph::{laplacian, random_connected_graph, Weighting};
use mappro::metrics::{check_descent, check_rates, check_sandwich, DiagnosticOptions, Diagnostics};
use mappro::mixing::MixingSpec;
use mappro::problems::pl_quadratic;
use nalgebra::DMatrix;

fn main() -> mappro::Result<()> {
    let problem = pl_quadratic(10, 4, 3, 7)?;
    let h = Arc::new(laplacian(&random_connected_graph(10, 15, 3)?, Weighting::Uniform));
    let (cfg, c) = select_parameters(&problem, &h, 1.5, &MixingSpec::uniform(2))?;
    let diag = Diagnostics::new(&problem, &cfg, h, Some(&c), DiagnosticOptions { lyapunov: true })?;

    let x0 = DMatrix::from_fn(10, 4, |i, j| ((i + 2 * j) as f64).sin());
    let traj = run(&problem, &cfg, init_state(&problem, Some(x0), None)?, &RunOptions::iterations(2000), &diag)?;

    let first = &traj.records[0];
    let last = traj.records.last().unwrap();
    println!("gap {:.3e} -> {:.3e} after {} rounds", first.opt_gap, last.opt_gap, last.rounds);
    println!("{}", check_descent(&traj.records, &c).summary());
    println!("{}", check_sandwich(&traj.records, &c).summary());
    let rates = check_rates(&traj.records, &c);
    println!("{}", rates.average_w.summary());
    println!("{}", rates.function_gap.summary());
    println!("{}", rates.envelope.summary());
    if let (Some(fit), Some(delta)) = (rates.fitted_ratio, c.delta) {
        println!("fitted V̂ ratio {fit:.6} vs guaranteed {:.6}", 1.0 - delta);
    }
    Ok(())
}
