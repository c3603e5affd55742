mod common;

use common::*;
use mappro::algorithm::{constants_for, init_state, run, select_parameters, step, AlgoState, RunOptions, Variant};
use mappro::graph::{laplacian, Network, Weighting};
use mappro::linalg::{broadcast, node_average};
use mappro::metrics::{
    check_descent, check_rates, check_sandwich, optimality_gap, w_metric, write_csv, DiagnosticOptions, Diagnostics,
    CSV_HEADER,
};
use mappro::mixing::MixingSpec;
use mappro::problems::{pl_quadratic, stationary_point, ProblemInstance};
use nalgebra::{DMatrix, DVector};

/// Dense `Nd x Nd` reference quantities.
struct Dense {
    k: DMatrix<f64>,
    l: DMatrix<f64>,
    h_pinv: DMatrix<f64>,
    h_half: DMatrix<f64>,
}

impl Dense {
    fn new(p: &DMatrix<f64>, d: usize) -> Self {
        let n = p.nrows();
        let avg = DMatrix::from_element(n, n, 1.0 / n as f64);
        let tol = 1e-9 * p.norm();
        Dense {
            k: kron_eye(&(DMatrix::identity(n, n) - &avg), d),
            l: kron_eye(&avg, d),
            h_pinv: kron_eye(&sym_fn(p, |v| if v > tol { 1.0 / v } else { 0.0 }), d),
            h_half: kron_eye(&sym_fn(p, |v| v.max(0.0).sqrt()), d),
        }
    }

    fn quad(m: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
        v.dot(&(m * v))
    }
}

struct Reference {
    gap: f64,
    w: f64,
    v: f64,
    v_hat: f64,
}

fn reference(p: &ProblemInstance, dense: &Dense, st: &AlgoState, rho: f64, theta: f64) -> Reference {
    let (n, d) = (p.n_nodes(), p.dim());
    let x = flatten(&st.x);
    let q = flatten(&st.q);
    let g = flatten(&p.stacked_gradient(&st.x).unwrap());
    let xbar = unflatten(&(&dense.l * &x), n, d);
    let g0 = flatten(&p.stacked_gradient(&xbar).unwrap());
    let s = &q + &g0 / theta;
    let fgap = p.global_value(&node_average(&st.x)) - p.f_star().unwrap_or(0.0);
    let kx = &dense.k * &x;
    let ks = &dense.k * &s;
    Reference {
        gap: (&dense.l * &g).norm_squared() + (&dense.h_half * &x).norm_squared(),
        w: kx.norm_squared() + ks.norm_squared() + (&dense.l * &g).norm_squared() + (&dense.l * &g0).norm_squared(),
        v: 0.5 * Dense::quad(&dense.k, &x)
            + 0.5 * (theta / rho * Dense::quad(&dense.h_pinv, &s) + Dense::quad(&dense.k, &s))
            + kx.dot(&ks)
            + fgap,
        v_hat: kx.norm_squared() + ks.norm_squared() + fgap,
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn diagnostics_match_dense_reference() {
    for (n, seed) in [(4usize, 0u64), (7, 1), (10, 2)] {
        let p = pl_quadratic(n, 3, 2, seed).unwrap();
        let h = gossip(n, n + 2, seed);
        let spec = MixingSpec::uniform(2);
        let eta = eta_fraction(&h, &spec, 0.3, 0.5);
        let cfg = tuned(Variant::MapPro, h.clone(), &spec, 0.3, eta, 0.7, 1.4, 0.3);
        let c = constants_for(&p, &cfg).unwrap();
        let diag = Diagnostics::new(&p, &cfg, h.clone(), Some(&c), DiagnosticOptions { lyapunov: true }).unwrap();
        let dense = Dense::new(h.dense(), 3);
        let mut st = init_state(&p, Some(random_stacked(n, 3, seed + 10)), None).unwrap();
        for _ in 0..15 {
            step(&mut st, &p, &cfg).unwrap();
            let rec = diag.record(&st).unwrap();
            let want = reference(&p, &dense, &st, cfg.rho(), cfg.theta());
            assert!(close(rec.opt_gap, want.gap), "gap {} vs {}", rec.opt_gap, want.gap);
            assert!(close(rec.w, want.w), "W {} vs {}", rec.w, want.w);
            assert!(close(rec.v.unwrap(), want.v), "V {} vs {}", rec.v.unwrap(), want.v);
            assert!(close(rec.v_hat.unwrap(), want.v_hat));
            let coef = c.lambda_hat_g * (c.eps1 + c.eps2 * c.lambda_hat_g);
            assert!(close(rec.v_tilde.unwrap(), want.v - coef * rec.consensus_err));
            assert!(close(w_metric(&st, &p, cfg.theta()).unwrap(), want.w));
        }
    }
}

#[test]
fn gap_matches_explicit_square_root_on_path() {
    let net = Network::new(3, [(0, 1), (1, 2)]).unwrap();
    let h = std::sync::Arc::new(laplacian(&net, Weighting::Uniform));
    let p = pl_quadratic(3, 2, 1, 5).unwrap();
    let dense = Dense::new(h.dense(), 2);
    for seed in 0..5 {
        let x = random_stacked(3, 2, seed);
        let v = flatten(&x);
        let g = flatten(&p.stacked_gradient(&x).unwrap());
        let want = (&dense.l * g).norm_squared() + (&dense.h_half * v).norm_squared();
        assert!(close(optimality_gap(&x, &p, &h).unwrap(), want));
    }
}

#[test]
fn gap_vanishes_at_consensual_stationary_points() {
    let p = small_benchmark(5, 12, 3);
    let h = gossip(5, 6, 3);
    let u = stationary_point(&p, &DVector::from_element(5, 0.1), 1e-13, 20_000).unwrap();
    let x = broadcast(&u, 5);
    assert!(optimality_gap(&x, &p, &h).unwrap() <= 1e-20);

    let moved = broadcast(&(u.add_scalar(0.3)), 5);
    let gap = optimality_gap(&moved, &p, &h).unwrap();
    let avg = p.global_gradient(&moved.row(0).transpose()) / 5.0;
    assert!(close(gap, 5.0 * avg.norm_squared()));
    assert!(gap > 0.0);
}

#[test]
fn w_at_planted_pair_is_zero_and_consensual_w_has_gradient_terms() {
    let p = pl_quadratic(5, 3, 2, 1).unwrap();
    let theta = 1.7;
    let (x, q) = planted_pair(&p, theta);
    let st = init_state(&p, Some(x), Some(q)).unwrap();
    assert!(w_metric(&st, &p, theta).unwrap() <= 1e-20);

    let u = DVector::from_vec(vec![0.4, -1.0, 2.0]);
    let x = broadcast(&u, 5);
    let st = init_state(&p, Some(x.clone()), None).unwrap();
    let g = p.stacked_gradient(&x).unwrap();
    let gbar = broadcast(&node_average(&g), 5);
    let gk = &g - &gbar;
    let want = (gk / theta).norm_squared() + 2.0 * gbar.norm_squared();
    assert!(close(w_metric(&st, &p, theta).unwrap(), want));
}

#[test]
fn theory_run_has_no_violations() {
    let p = pl_quadratic(8, 4, 3, 3).unwrap();
    let h = gossip(8, 12, 3);
    let (cfg, c) = select_parameters(&p, &h, 1.0, &MixingSpec::identity()).unwrap();
    let diag = Diagnostics::new(&p, &cfg, h, Some(&c), DiagnosticOptions { lyapunov: true }).unwrap();
    let st = init_state(&p, Some(random_stacked(8, 4, 0)), None).unwrap();
    let traj = run(&p, &cfg, st, &RunOptions::iterations(1000), &diag).unwrap();
    assert!(check_descent(&traj.records, &c).passed());
    assert!(check_sandwich(&traj.records, &c).passed());
    let rates = check_rates(&traj.records, &c);
    assert!(rates.average_w.passed() && rates.function_gap.passed() && rates.envelope.passed());
    let first = traj.records[0];
    let base = (c.delta1 / c.delta3) * first.v_hat.unwrap();
    assert!(first.consensus_err + first.fgap.unwrap() <= base);
}

#[test]
fn doubled_step_beyond_the_bound_is_flagged() {
    let p = pl_quadratic(8, 4, 3, 3).unwrap();
    let h = gossip(8, 12, 3);
    let (cfg, c) = select_parameters(&p, &h, 1.0, &MixingSpec::identity()).unwrap();
    let limit = c.eps7 / c.eps10;
    let zeta = 2.0 * limit.max(cfg.constant_operator().unwrap().zeta());
    let bad = tuned(Variant::MapPro, h, &MixingSpec::identity(), zeta, 0.0, cfg.rho(), cfg.theta(), cfg.dual_scale());
    let bad_c = constants_for(&p, &bad).unwrap();
    let violations = bad_c.violations();
    assert!(violations.iter().any(|v| v.starts_with("zeta_eps7_eps10")), "{violations:?}");
}

#[test]
fn single_node_reduces_to_gradient_descent() {
    let p = pl_quadratic(1, 3, 2, 0).unwrap();
    let net = Network::new(1, []).unwrap();
    let h = std::sync::Arc::new(laplacian(&net, Weighting::Uniform));
    let cfg = tuned(Variant::MapPro, h.clone(), &MixingSpec::identity(), 0.5, 0.0, 1.0, 1.0, 0.5);
    let c = constants_for(&p, &cfg).unwrap();
    let diag = Diagnostics::new(&p, &cfg, h, Some(&c), DiagnosticOptions { lyapunov: true }).unwrap();
    let st = init_state(&p, Some(random_stacked(1, 3, 0)), None).unwrap();
    let traj = run(&p, &cfg, st, &RunOptions::iterations(30), &diag).unwrap();
    for r in &traj.records {
        assert_eq!(r.consensus_err, 0.0);
        assert!(r.s_norm.abs() < 1e-30);
        assert!(close(r.w, 2.0 * r.opt_gap));
    }
    let fg: Vec<f64> = traj.records.iter().map(|r| r.fgap.unwrap()).collect();
    assert!(fg.windows(2).all(|w| w[1] <= w[0] + 1e-15));
}

#[test]
fn unknown_optimum_skips_rate_checks() {
    let p = small_benchmark(4, 6, 0);
    let h = gossip(4, 5, 0);
    let cfg = tuned(Variant::MapPro, h.clone(), &MixingSpec::identity(), 0.2, 0.0, 0.3, 1.0, 0.3);
    let c = constants_for(&p, &cfg).unwrap();
    assert!(Diagnostics::new(&p, &cfg, h.clone(), Some(&c), DiagnosticOptions { lyapunov: true }).is_err());
    let diag = Diagnostics::new(&p, &cfg, h, None, DiagnosticOptions::default()).unwrap();
    let st = init_state(&p, None, None).unwrap();
    let traj = run(&p, &cfg, st, &RunOptions::iterations(5), &diag).unwrap();
    let rates = check_rates(&traj.records, &c);
    assert!(rates.envelope.skipped.is_some());
    assert!(rates.envelope.summary().contains("skipped"));
    assert!(check_descent(&traj.records, &c).skipped.is_some());
}

#[test]
fn smoothness_transfer_holds_along_runs() {
    let p = small_benchmark(6, 10, 4);
    let h = gossip(6, 8, 4);
    let cfg = tuned(Variant::MapPro, h, &MixingSpec::identity(), 0.3, 0.0, 0.4, 1.0, 0.5);
    let mut st = init_state(&p, Some(random_stacked(6, 5, 1) * 2.0), None).unwrap();
    let m2 = p.smoothness().powi(2);
    for _ in 0..50 {
        let g = p.stacked_gradient(&st.x).unwrap();
        let g0 = p.stacked_gradient(&broadcast(&node_average(&st.x), 6)).unwrap();
        let kx = mappro::metrics::consensus_error(&st.x);
        assert!((g0 - g).norm_squared() <= m2 * kx * (1.0 + 1e-12) + 1e-14);
        step(&mut st, &p, &cfg).unwrap();
    }
}

#[test]
fn csv_rows_use_seventeen_significant_digits() {
    let p = pl_quadratic(3, 2, 1, 0).unwrap();
    let h = gossip(3, 3, 0);
    let cfg = tuned(Variant::MapPro, h.clone(), &MixingSpec::identity(), 0.2, 0.0, 0.3, 1.0, 0.3);
    let diag = Diagnostics::new(&p, &cfg, h, None, DiagnosticOptions::default()).unwrap();
    let st = init_state(&p, Some(random_stacked(3, 2, 0)), None).unwrap();
    let traj = run(&p, &cfg, st, &RunOptions::iterations(3), &diag).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &traj.records).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 10);
    let mantissa = row[2].split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
    assert_eq!(row[2].parse::<f64>().unwrap(), traj.records[0].opt_gap);
    assert_eq!(row[5], "");
}
