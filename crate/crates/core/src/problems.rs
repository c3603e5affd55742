//! Problem instances: per-node smooth costs `f_i` with gradient oracles.
//!
//! The global cost is `f(u) = Σ_i f_i(u)` over `u ∈ ℝ^d`; the stacked cost
//! `f̃(x) = Σ_i f_i(x_i)` evaluates each node at its own local copy.

use std::fmt::Debug;
use std::io::{BufRead, Write};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigenvalues, sym_pinv, Stacked};

/// A differentiable local cost held by one node.
pub trait LocalCost: Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
}

/// Local costs of all nodes plus what is known about the global problem.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    name: String,
    dim: usize,
    costs: Vec<Arc<dyn LocalCost>>,
    smoothness: f64,
    f_star: Option<f64>,
    pl_constant: Option<f64>,
}

impl ProblemInstance {
    pub fn new(name: impl Into<String>, costs: Vec<Arc<dyn LocalCost>>, smoothness: f64) -> Result<Self> {
        let dim = costs.first().map(|c| c.dim()).ok_or_else(|| Error::config("problem needs at least one node"))?;
        if let Some(bad) = costs.iter().find(|c| c.dim() != dim) {
            return Err(Error::dims("local cost dimension", dim, bad.dim()));
        }
        if !(smoothness >= 0.0 && smoothness.is_finite()) {
            return Err(Error::config(format!("smoothness bound must be finite and non-negative, got {smoothness}")));
        }
        Ok(ProblemInstance {
            name: name.into(),
            dim,
            costs,
            smoothness,
            f_star: None,
            pl_constant: None,
        })
    }

    pub fn with_optimum(mut self, f_star: f64) -> Self {
        self.f_star = Some(f_star);
        self
    }

    pub fn with_pl_constant(mut self, nu: f64) -> Self {
        self.pl_constant = Some(nu);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_nodes(&self) -> usize {
        self.costs.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Declared smoothness bound `M̄` of the stacked cost.
    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    pub fn f_star(&self) -> Option<f64> {
        self.f_star
    }

    /// Polyak-Łojasiewicz constant `ν` of the global cost, when known.
    pub fn pl_constant(&self) -> Option<f64> {
        self.pl_constant
    }

    pub fn local(&self, i: usize) -> &dyn LocalCost {
        self.costs[i].as_ref()
    }

    fn check_stacked(&self, x: &Stacked) -> Result<()> {
        if x.nrows() != self.n_nodes() || x.ncols() != self.dim {
            return Err(Error::dims(
                "stacked iterate",
                format!("{}x{}", self.n_nodes(), self.dim),
                format!("{}x{}", x.nrows(), x.ncols()),
            ));
        }
        Ok(())
    }

    /// `∇f̃(x)`: row `i` is `∇f_i(x_i)`.
    pub fn stacked_gradient(&self, x: &Stacked) -> Result<Stacked> {
        self.check_stacked(x)?;
        let mut g = Stacked::zeros(x.nrows(), x.ncols());
        for (i, cost) in self.costs.iter().enumerate() {
            let xi = x.row(i).transpose();
            g.set_row(i, &cost.gradient(&xi).transpose());
        }
        Ok(g)
    }

    /// `f̃(x) = Σ_i f_i(x_i)`.
    pub fn stacked_value(&self, x: &Stacked) -> Result<f64> {
        self.check_stacked(x)?;
        Ok(self.costs.iter().enumerate().map(|(i, c)| c.value(&x.row(i).transpose())).sum())
    }

    /// `f(u) = Σ_i f_i(u)`.
    pub fn global_value(&self, u: &DVector<f64>) -> f64 {
        self.costs.iter().map(|c| c.value(u)).sum()
    }

    /// `∇f(u) = Σ_i ∇f_i(u)`.
    pub fn global_gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        self.costs.iter().fold(DVector::zeros(self.dim), |acc, c| acc + c.gradient(u))
    }

    /// Largest relative mismatch between analytic gradients and central
    /// differences (step `1e-6`) over `n_points` random stacked points.
    pub fn max_gradient_error(&self, n_points: usize, scale: f64, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for _ in 0..n_points {
            for cost in &self.costs {
                let x = random_vector(&mut rng, self.dim) * scale;
                let g = cost.gradient(&x);
                let mut fd = DVector::zeros(self.dim);
                for c in 0..self.dim {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[c] += h;
                    xm[c] -= h;
                    fd[c] = (cost.value(&xp) - cost.value(&xm)) / (2.0 * h);
                }
                let err = (&g - &fd).norm() / g.norm().max(1e-3);
                worst = worst.max(err);
            }
        }
        worst
    }
}

fn random_vector(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

fn random_stacked(rng: &mut impl Rng, n: usize, d: usize) -> Stacked {
    Stacked::from_fn(n, d, |_, _| rng.sample(StandardNormal))
}

fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^u)` without overflow.
fn softplus(u: f64) -> f64 {
    if u > 0.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

/// Per-node binary classification data with a nonconvex regularizer.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticNonconvexData {
    /// `labels[i][s] ∈ {-1, +1}`.
    pub labels: Vec<Vec<f64>>,
    /// `features[i]` is `m x d`; row `s` is `z_{is}`.
    pub features: Vec<DMatrix<f64>>,
    pub lambda: f64,
    pub mu: f64,
}

impl LogisticNonconvexData {
    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn samples_per_node(&self) -> usize {
        self.labels.first().map_or(0, Vec::len)
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, |f| f.ncols())
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.samples_per_node();
        let d = self.dim();
        if self.labels.is_empty() || m == 0 || d == 0 {
            return Err(Error::config("dataset must have nodes, samples and features"));
        }
        if self.features.len() != self.labels.len() {
            return Err(Error::dims("feature blocks", self.labels.len(), self.features.len()));
        }
        for (y, z) in self.labels.iter().zip(&self.features) {
            if y.len() != m || z.nrows() != m || z.ncols() != d {
                return Err(Error::config("every node must hold the same number of samples and features"));
            }
            if y.iter().any(|&l| l != 1.0 && l != -1.0) {
                return Err(Error::config("labels must be -1 or +1"));
            }
        }
        if !(self.lambda > 0.0 && self.mu > 0.0) {
            return Err(Error::config("regularization parameters λ and μ must be positive"));
        }
        Ok(())
    }

    /// CSV with header `node,label,z0,...`; one row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header: Vec<String> = (0..self.dim()).map(|c| format!("z{c}")).collect();
        writeln!(w, "node,label,{}", header.join(","))?;
        for (i, (y, z)) in self.labels.iter().zip(&self.features).enumerate() {
            for s in 0..y.len() {
                let feats: Vec<String> = z.row(s).iter().map(|v| format!("{v:.16e}")).collect();
                writeln!(w, "{i},{},{}", y[s] as i64, feats.join(","))?;
            }
        }
        Ok(())
    }

    /// Reads the format written by [`write_csv`](Self::write_csv). Nodes must
    /// be numbered `0..N` and appear in order.
    pub fn read_csv<R: BufRead>(r: R, lambda: f64, mu: f64) -> Result<Self> {
        let mut rows: Vec<(usize, f64, Vec<f64>)> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if lineno == 0 || line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let err = |what: &str| Error::Parse(format!("line {}: bad {what}", lineno + 1));
            let node = cols.next().and_then(|s| s.trim().parse().ok()).ok_or_else(|| err("node"))?;
            let label = cols.next().and_then(|s| s.trim().parse().ok()).ok_or_else(|| err("label"))?;
            let feats = cols
                .map(|s| s.trim().parse::<f64>().map_err(|_| err("feature")))
                .collect::<Result<Vec<_>>>()?;
            rows.push((node, label, feats));
        }
        let n = rows.iter().map(|r| r.0 + 1).max().unwrap_or(0);
        let d = rows.first().map_or(0, |r| r.2.len());
        let mut labels = vec![Vec::new(); n];
        let mut feats: Vec<Vec<f64>> = vec![Vec::new(); n];
        for (node, label, f) in rows {
            if f.len() != d {
                return Err(Error::Parse("rows have different feature counts".into()));
            }
            labels[node].push(label);
            feats[node].extend(f);
        }
        let features = feats
            .into_iter()
            .zip(&labels)
            .map(|(f, y)| DMatrix::from_row_slice(y.len(), d, &f))
            .collect();
        let data = LogisticNonconvexData { labels, features, lambda, mu };
        data.validate()?;
        Ok(data)
    }
}

/// `f_i(x) = (1/m) Σ_s log(1 + exp(-y_s xᵀz_s)) + Σ_t λμ x_t² / (1 + μ x_t²)`.
#[derive(Debug, Clone)]
pub struct LogisticCost {
    labels: Vec<f64>,
    features: DMatrix<f64>,
    lambda: f64,
    mu: f64,
}

impl LogisticCost {
    /// Curvature bound `(1/(4m)) Σ_s ‖z_s‖² + 2λμ`.
    pub fn smoothness_bound(&self) -> f64 {
        let m = self.labels.len() as f64;
        self.features.norm_squared() / (4.0 * m) + 2.0 * self.lambda * self.mu
    }

    pub fn regularizer(&self, x: &DVector<f64>) -> f64 {
        x.iter().map(|&v| self.lambda * self.mu * v * v / (1.0 + self.mu * v * v)).sum()
    }

    pub fn regularizer_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        x.map(|v| {
            let den = 1.0 + self.mu * v * v;
            2.0 * self.lambda * self.mu * v / (den * den)
        })
    }
}

impl LocalCost for LogisticCost {
    fn dim(&self) -> usize {
        self.features.ncols()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let margins = &self.features * x;
        let m = self.labels.len() as f64;
        let loss: f64 = margins.iter().zip(&self.labels).map(|(t, y)| softplus(-y * t)).sum();
        loss / m + self.regularizer(x)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let margins = &self.features * x;
        let m = self.labels.len() as f64;
        let weights = DVector::from_iterator(
            self.labels.len(),
            margins.iter().zip(&self.labels).map(|(t, y)| -sigmoid(-y * t) * y / m),
        );
        self.features.tr_mul(&weights) + self.regularizer_gradient(x)
    }
}

/// Builds the logistic benchmark with `M̄ = max_i` of the per-node curvature bounds.
pub fn logistic_nonconvex(data: &LogisticNonconvexData) -> Result<ProblemInstance> {
    data.validate()?;
    let costs: Vec<LogisticCost> = data
        .labels
        .iter()
        .zip(&data.features)
        .map(|(y, z)| LogisticCost {
            labels: y.clone(),
            features: z.clone(),
            lambda: data.lambda,
            mu: data.mu,
        })
        .collect();
    let smoothness = costs.iter().map(LogisticCost::smoothness_bound).fold(0.0, f64::max);
    let costs = costs.into_iter().map(|c| Arc::new(c) as Arc<dyn LocalCost>).collect();
    ProblemInstance::new("logistic_nonconvex", costs, smoothness)
}

/// Sizes and seed of the synthetic classification benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkSpec {
    pub n_nodes: usize,
    pub dim: usize,
    pub samples: usize,
    pub lambda: f64,
    pub mu: f64,
    pub seed: u64,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        BenchmarkSpec {
            n_nodes: 20,
            dim: 5,
            samples: 200,
            lambda: 0.001,
            mu: 1.0,
            seed: 0,
        }
    }
}

/// Standard-normal features and uniform ±1 labels, deterministic per seed.
pub fn generate_benchmark_data(spec: &BenchmarkSpec) -> LogisticNonconvexData {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut labels = Vec::with_capacity(spec.n_nodes);
    let mut features = Vec::with_capacity(spec.n_nodes);
    for _ in 0..spec.n_nodes {
        features.push(DMatrix::from_fn(spec.samples, spec.dim, |_, _| rng.sample(StandardNormal)));
        labels.push((0..spec.samples).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect());
    }
    LogisticNonconvexData {
        labels,
        features,
        lambda: spec.lambda,
        mu: spec.mu,
    }
}

/// `f_i(x) = ½‖A x - b‖²`.
#[derive(Debug, Clone)]
pub struct QuadraticCost {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl LocalCost for QuadraticCost {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * (&self.a * x - &self.b).norm_squared()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.a.tr_mul(&(&self.a * x - &self.b))
    }
}

/// Least-squares problem from explicit blocks, with exact `f*`, `ν` and `M̄`.
///
/// `ν` is the smallest positive eigenvalue of `S = Σ A_iᵀA_i` and `M̄` its
/// largest, which bounds the smoothness of both `f` and `f̃`.
pub fn quadratic_from_blocks(name: &str, blocks: Vec<QuadraticCost>) -> Result<ProblemInstance> {
    let d = blocks.first().map(|c| c.a.ncols()).ok_or_else(|| Error::config("no blocks"))?;
    let mut s = DMatrix::zeros(d, d);
    let mut c = DVector::zeros(d);
    for blk in &blocks {
        if blk.a.ncols() != d || blk.a.nrows() != blk.b.len() {
            return Err(Error::dims("quadratic block", d, blk.a.ncols()));
        }
        s += blk.a.tr_mul(&blk.a);
        c += blk.a.tr_mul(&blk.b);
    }
    let ev = sym_eigenvalues(&s);
    let lmax = ev.last().copied().unwrap_or(0.0);
    let nu = ev.iter().copied().find(|&v| v > 1e-9 * lmax);
    let x_star = sym_pinv(&s, 1e-9) * c;
    let costs: Vec<Arc<dyn LocalCost>> = blocks.into_iter().map(|b| Arc::new(b) as Arc<dyn LocalCost>).collect();
    let mut p = ProblemInstance::new(name, costs, lmax)?;
    let f_star = p.global_value(&x_star);
    p = p.with_optimum(f_star);
    if let Some(nu) = nu {
        p = p.with_pl_constant(nu);
    }
    Ok(p)
}

/// Rank-deficient least squares: P-Ł but not strongly convex.
///
/// Each node holds `d` rows `A_i = B_i Uᵀ` where `U` spans a random
/// `rank`-dimensional subspace, so `Σ A_iᵀA_i` has rank exactly `rank` and `f`
/// is constant along the orthogonal complement. Data are scaled so that the
/// largest eigenvalue of `Σ A_iᵀA_i` is 1.
pub fn pl_quadratic(n_nodes: usize, dim: usize, rank: usize, seed: u64) -> Result<ProblemInstance> {
    if n_nodes == 0 {
        return Err(Error::config("problem needs at least one node"));
    }
    if rank == 0 || rank >= dim {
        return Err(Error::config(format!("rank must satisfy 1 ≤ r < d, got r = {rank}, d = {dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = basis.qr().q();
    let u = q.columns(0, rank).into_owned();
    let mut blocks: Vec<QuadraticCost> = (0..n_nodes)
        .map(|_| {
            let b_i = DMatrix::from_fn(dim, rank, |_, _| rng.sample::<f64, _>(StandardNormal));
            QuadraticCost {
                a: b_i * u.transpose(),
                b: random_vector(&mut rng, dim),
            }
        })
        .collect();
    let s = blocks.iter().fold(DMatrix::zeros(dim, dim), |acc, blk| acc + blk.a.tr_mul(&blk.a));
    let lmax = sym_eigenvalues(&s).last().copied().unwrap_or(1.0);
    let scale = 1.0 / lmax.sqrt();
    for blk in &mut blocks {
        blk.a *= scale;
        blk.b *= scale;
    }
    quadratic_from_blocks("pl_quadratic", blocks)
}

/// Ratio `‖∇f̃(x) - ∇f̃(y)‖ / ‖x - y‖`.
pub fn smoothness_ratio(p: &ProblemInstance, x: &Stacked, y: &Stacked) -> Result<f64> {
    let num = (p.stacked_gradient(x)? - p.stacked_gradient(y)?).norm();
    let den = (x - y).norm();
    Ok(if den > 0.0 { num / den } else { 0.0 })
}

/// Empirical lower bound on the smoothness of `f̃`.
///
/// Each probe draws a random base point and refines a direction by a few
/// finite-difference power steps, which steers it toward the locally
/// steepest gradient change. Fails when the estimate exceeds the declared
/// bound by more than a relative `1e-6`.
pub fn estimate_smoothness(p: &ProblemInstance, n_probes: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, d) = (p.n_nodes(), p.dim());
    let mut best: f64 = 0.0;
    for probe in 0..n_probes {
        let spread = [0.1, 1.0, 3.0][probe % 3];
        let x = random_stacked(&mut rng, n, d) * spread;
        let gx = p.stacked_gradient(&x)?;
        let mut dir = random_stacked(&mut rng, n, d);
        let h = 1e-4;
        for _ in 0..20 {
            let norm = dir.norm();
            if norm == 0.0 {
                break;
            }
            dir /= norm;
            let y = &x + &dir * h;
            let diff = (p.stacked_gradient(&y)? - &gx) / h;
            best = best.max(diff.norm());
            dir = diff;
        }
    }
    if best > p.smoothness() * (1.0 + 1e-6) {
        return Err(Error::SmoothnessViolation {
            empirical: best,
            declared: p.smoothness(),
        });
    }
    Ok(best)
}

/// Stationary point of the global cost, started at `u0`.
///
/// Gradient descent with Armijo backtracking brings `‖∇f‖` near `1e-6`, then
/// Newton steps on a finite-difference Hessian polish the point until
/// `‖∇f(u)‖ ≤ tol`. Any stationary point qualifies, saddles included.
pub fn stationary_point(p: &ProblemInstance, u0: &DVector<f64>, tol: f64, max_iter: usize) -> Result<DVector<f64>> {
    let mut u = u0.clone();
    let mut step = 1.0 / (p.smoothness() * p.n_nodes() as f64).max(1e-12);
    for _ in 0..max_iter {
        let g = p.global_gradient(&u);
        let gn2 = g.norm_squared();
        if gn2.sqrt() <= tol.max(1e-6) {
            break;
        }
        let f0 = p.global_value(&u);
        step *= 2.0;
        loop {
            let cand = &u - &g * step;
            if p.global_value(&cand) <= f0 - 0.5 * step * gn2 || step < 1e-16 {
                u = cand;
                break;
            }
            step *= 0.5;
        }
    }
    let d = p.dim();
    let h = 1e-5;
    for _ in 0..30 {
        let g = p.global_gradient(&u);
        if g.norm() <= tol {
            return Ok(u);
        }
        let mut hess = DMatrix::zeros(d, d);
        for c in 0..d {
            let mut up = u.clone();
            let mut um = u.clone();
            up[c] += h;
            um[c] -= h;
            hess.set_column(c, &((p.global_gradient(&up) - p.global_gradient(&um)) / (2.0 * h)));
        }
        hess = (&hess + hess.transpose()) * 0.5;
        let Some(delta) = hess.lu().solve(&g) else { break };
        let cand = &u - delta;
        if p.global_gradient(&cand).norm() >= g.norm() {
            break;
        }
        u = cand;
    }
    let g = p.global_gradient(&u);
    if g.norm() <= tol {
        Ok(u)
    } else {
        Err(Error::Config(format!("stationary point search stalled at ‖∇f‖ = {:e}", g.norm())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_sample() -> LogisticNonconvexData {
        LogisticNonconvexData {
            labels: vec![vec![-1.0]],
            features: vec![DMatrix::from_row_slice(1, 3, &[0.5, -2.0, 1.0])],
            lambda: 0.01,
            mu: 2.0,
        }
    }

    #[test]
    fn logistic_gradient_at_zero() {
        let p = logistic_nonconvex(&single_sample()).unwrap();
        let g = p.local(0).gradient(&DVector::zeros(3));
        // -½ y z with y = -1
        let expect = DVector::from_row_slice(&[0.25, -1.0, 0.5]);
        assert!((g - expect).norm() < 1e-15);
    }

    #[test]
    fn regularizer_limits() {
        let data = single_sample();
        let cost = LogisticCost {
            labels: data.labels[0].clone(),
            features: data.features[0].clone(),
            lambda: 0.01,
            mu: 2.0,
        };
        assert_eq!(cost.regularizer_gradient(&DVector::zeros(3)).norm(), 0.0);
        let big = DVector::from_element(3, 1e8);
        assert!((cost.regularizer(&big) - 3.0 * 0.01).abs() < 1e-12);
    }

    #[test]
    fn logistic_matches_finite_differences() {
        let data = generate_benchmark_data(&BenchmarkSpec {
            n_nodes: 3,
            samples: 30,
            ..BenchmarkSpec::default()
        });
        let p = logistic_nonconvex(&data).unwrap();
        assert!(p.max_gradient_error(100, 1.0, 4) < 1e-5);
    }

    #[test]
    fn benchmark_shape_and_determinism() {
        let spec = BenchmarkSpec { seed: 9, ..BenchmarkSpec::default() };
        let a = generate_benchmark_data(&spec);
        assert_eq!(a.n_nodes(), 20);
        assert_eq!(a.samples_per_node(), 200);
        assert_eq!(a.dim(), 5);
        assert_eq!(a, generate_benchmark_data(&spec));
        let pos = a.labels.iter().flatten().filter(|&&l| l > 0.0).count();
        assert!(pos > 0 && pos < 4000);
    }

    #[test]
    fn dataset_csv_round_trip() {
        let data = generate_benchmark_data(&BenchmarkSpec {
            n_nodes: 2,
            samples: 4,
            dim: 3,
            ..BenchmarkSpec::default()
        });
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let back = LogisticNonconvexData::read_csv(buf.as_slice(), data.lambda, data.mu).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn rejects_bad_labels() {
        let mut data = single_sample();
        data.labels[0][0] = 0.0;
        assert!(logistic_nonconvex(&data).is_err());
    }

    #[test]
    fn pl_quadratic_rank_checks() {
        assert!(matches!(pl_quadratic(3, 3, 3, 0), Err(Error::Config(_))));
        assert!(matches!(pl_quadratic(3, 3, 0, 0), Err(Error::Config(_))));
        let p = pl_quadratic(4, 3, 2, 1).unwrap();
        assert!((p.smoothness() - 1.0).abs() < 1e-12);
        assert!(p.pl_constant().unwrap() > 0.0);
        assert!(p.f_star().unwrap() > 0.0);
    }

    #[test]
    fn zero_rhs_has_zero_optimum() {
        let blocks = vec![QuadraticCost {
            a: DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]),
            b: DVector::zeros(2),
        }];
        let p = quadratic_from_blocks("zero", blocks).unwrap();
        assert_eq!(p.f_star(), Some(0.0));
        assert_eq!(p.global_value(&DVector::zeros(2)), 0.0);
    }

    #[test]
    fn consistent_system_fits_exactly() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let x = DVector::from_row_slice(&[0.3, -1.2]);
        let b = &a * &x;
        let p = quadratic_from_blocks("consistent", vec![QuadraticCost { a, b }]).unwrap();
        assert!(p.f_star().unwrap().abs() < 1e-24);
    }

    #[test]
    fn stationary_point_of_benchmark() {
        let data = generate_benchmark_data(&BenchmarkSpec {
            n_nodes: 4,
            samples: 50,
            ..BenchmarkSpec::default()
        });
        let p = logistic_nonconvex(&data).unwrap();
        let u = stationary_point(&p, &DVector::zeros(5), 1e-13, 10_000).unwrap();
        assert!(p.global_gradient(&u).norm() <= 1e-13);
    }
}
