#![allow(dead_code)]

use std::sync::Arc;

use mappro::algorithm::{step, AlgoConfig, AlgoState, Mode, Variant};
use mappro::graph::{laplacian, random_connected_graph, GossipMatrix, Weighting};
use mappro::linalg::{node_average, node_sum, Stacked};
use mappro::mixing::{GOperator, MixingSpec};
use mappro::problems::{
    generate_benchmark_data, logistic_nonconvex, stationary_point, BenchmarkSpec, ProblemInstance,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn gossip(n: usize, e: usize, seed: u64) -> Arc<GossipMatrix> {
    Arc::new(laplacian(&random_connected_graph(n, e, seed).unwrap(), Weighting::Uniform))
}

pub fn random_stacked(n: usize, d: usize, seed: u64) -> Stacked {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, d, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn small_benchmark(n: usize, samples: usize, seed: u64) -> ProblemInstance {
    logistic_nonconvex(&generate_benchmark_data(&BenchmarkSpec {
        n_nodes: n,
        samples,
        seed,
        ..BenchmarkSpec::default()
    }))
    .unwrap()
}

/// Tuned configuration with explicit step sizes.
pub fn tuned(
    variant: Variant,
    h: Arc<GossipMatrix>,
    mixing: &MixingSpec,
    zeta: f64,
    eta: f64,
    rho: f64,
    theta: f64,
    dual_scale: f64,
) -> AlgoConfig {
    let g = GOperator::new(zeta, eta, mixing, h).unwrap();
    AlgoConfig::new(variant, Mode::Tuned, rho, theta, dual_scale, g).unwrap()
}

/// Consensual stationary point `1⊗u*` with `q* = -∇f̃(x*)/θ`.
pub fn planted_pair(p: &ProblemInstance, theta: f64) -> (Stacked, Stacked) {
    let u = stationary_point(p, &DVector::from_element(p.dim(), 0.1), 1e-14, 20_000).unwrap();
    let x = DMatrix::from_fn(p.n_nodes(), p.dim(), |_, c| u[c]);
    let q = -p.stacked_gradient(&x).unwrap() / theta;
    (x, q)
}

/// Worst per-iteration violations of the average-dynamics identity and of
/// dual feasibility seen so far.
#[derive(Debug, Default, Clone, Copy)]
pub struct Monitor {
    pub steps: usize,
    pub avg_identity: f64,
    pub dual_sum: f64,
}

impl Monitor {
    pub fn absorb(&mut self, other: Monitor) {
        self.steps += other.steps;
        self.avg_identity = self.avg_identity.max(other.avg_identity);
        self.dual_sum = self.dual_sum.max(other.dual_sum);
    }
}

/// Runs `iters` steps while checking `x̄⁺ = x̄ - ζḡ` and `Σq = 0`.
pub fn monitored(
    p: &ProblemInstance,
    cfg: &AlgoConfig,
    state: &mut AlgoState,
    iters: usize,
    stop_gap: Option<(f64, &GossipMatrix)>,
) -> Monitor {
    let mut m = Monitor {
        dual_sum: node_sum(&state.q).amax(),
        ..Monitor::default()
    };
    for _ in 0..iters {
        if let Some((eps, h)) = stop_gap {
            if mappro::metrics::optimality_gap(&state.x, p, h).unwrap() <= eps {
                break;
            }
        }
        let zeta = cfg.operator_at(state.k).unwrap().zeta();
        let xbar = node_average(&state.x);
        let gbar = node_average(&p.stacked_gradient(&state.x).unwrap());
        step(state, p, cfg).unwrap();
        let err = (node_average(&state.x) - xbar + gbar * zeta).norm();
        m.steps += 1;
        m.avg_identity = m.avg_identity.max(err);
        m.dual_sum = m.dual_sum.max(node_sum(&state.q).amax());
    }
    m
}

/// Dense `Σ a_t Pᵗ`.
pub fn dense_poly(p: &DMatrix<f64>, a: &[f64]) -> DMatrix<f64> {
    let n = p.nrows();
    let mut power = DMatrix::identity(n, n);
    let mut out = DMatrix::zeros(n, n);
    for &coef in a {
        power = &power * p;
        out += &power * coef;
    }
    out
}

/// Dense `I - T_τ(c₁(I - P)) / T_τ(c₁)` from the matrix three-term recurrence.
pub fn dense_chebyshev(p: &DMatrix<f64>, tau: usize, c1: f64) -> DMatrix<f64> {
    let n = p.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let x = (&id - p) * c1;
    let (mut t_prev, mut t_cur) = (id.clone(), x.clone());
    let (mut s_prev, mut s_cur) = (1.0, c1);
    for _ in 1..tau {
        let t_next = &x * &t_cur * 2.0 - &t_prev;
        let s_next = 2.0 * c1 * s_cur - s_prev;
        t_prev = t_cur;
        t_cur = t_next;
        s_prev = s_cur;
        s_cur = s_next;
    }
    id - t_cur / s_cur
}

/// Symmetric matrix function via eigendecomposition.
pub fn sym_fn(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// `A ⊗ I_d` as an `Nd x Nd` matrix acting on node-major vectors.
pub fn kron_eye(a: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    a.kronecker(&DMatrix::identity(d, d))
}

/// Node-major flattening `(x_1ᵀ, ..., x_Nᵀ)ᵀ`.
pub fn flatten(x: &Stacked) -> DVector<f64> {
    DVector::from_iterator(x.len(), x.transpose().iter().copied())
}

pub fn unflatten(v: &DVector<f64>, n: usize, d: usize) -> Stacked {
    DMatrix::from_row_slice(n, d, v.as_slice())
}

/// Gossip matrix on the complete graph with the given positive eigenvalues
/// (`N = eigs.len() + 1`) and a random eigenbasis.
pub fn spectrum_gossip(eigs: &[f64], seed: u64) -> Arc<GossipMatrix> {
    use mappro::graph::Network;
    let n = eigs.len() + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    basis.column_mut(0).fill(1.0);
    let q = basis.qr().q();
    let mut lam = vec![0.0];
    lam.extend_from_slice(eigs);
    let m = &q * DMatrix::from_diagonal(&DVector::from_vec(lam)) * q.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let pairs = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)));
    let net = Network::new(n, pairs).unwrap();
    Arc::new(GossipMatrix::new(&net, m).unwrap())
}

/// Scaled identity least squares with smoothness exactly `m_bar`.
pub fn scaled_quadratic(n: usize, d: usize, m_bar: f64, seed: u64) -> ProblemInstance {
    use mappro::problems::{quadratic_from_blocks, QuadraticCost};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = (0..n)
        .map(|_| QuadraticCost {
            a: DMatrix::identity(d, d) * (m_bar / n as f64).sqrt(),
            b: DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)),
        })
        .collect();
    quadratic_from_blocks("scaled_quadratic", blocks).unwrap()
}

pub fn config_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

/// `frac · ζ / λ̄_P`, a fraction of the largest admissible `η`.
pub fn eta_fraction(h: &GossipMatrix, mixing: &MixingSpec, zeta: f64, frac: f64) -> f64 {
    let range = mappro::mixing::polynomial_spectral_range(&mixing.bind(h).unwrap(), h).unwrap();
    frac * zeta / range.1
}
