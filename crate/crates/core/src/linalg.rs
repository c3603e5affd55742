//! Small dense helpers over stacked network vectors.
//!
//! A stacked vector holds one `d`-dimensional local vector per node. It is
//! stored as an `N x d` matrix whose row `i` is node `i`'s vector, so applying
//! `P ⊗ I_d` is the product `P * X` and never needs an `Nd x Nd` matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Stacked network vector: row `i` is the local vector of node `i`.
pub type Stacked = DMatrix<f64>;

pub fn zeros(n_nodes: usize, dim: usize) -> Stacked {
    DMatrix::zeros(n_nodes, dim)
}

/// Node average `x̄ = (1/N) Σ_i x_i`.
pub fn node_average(x: &Stacked) -> DVector<f64> {
    let n = x.nrows() as f64;
    let mut avg = DVector::zeros(x.ncols());
    for i in 0..x.nrows() {
        for c in 0..x.ncols() {
            avg[c] += x[(i, c)];
        }
    }
    avg / n
}

/// Node sum `Σ_i x_i`.
pub fn node_sum(x: &Stacked) -> DVector<f64> {
    node_average(x) * x.nrows() as f64
}

/// Every row set to `v`.
pub fn broadcast(v: &DVector<f64>, n_nodes: usize) -> Stacked {
    DMatrix::from_fn(n_nodes, v.len(), |_, c| v[c])
}

/// Projection onto the consensus subspace, `L x`.
pub fn consensus_part(x: &Stacked) -> Stacked {
    broadcast(&node_average(x), x.nrows())
}

/// Projection onto the disagreement subspace, `K x = x - L x`.
pub fn disagreement_part(x: &Stacked) -> Stacked {
    x - consensus_part(x)
}

/// Frobenius inner product of two stacked vectors.
pub fn dot(a: &Stacked, b: &Stacked) -> f64 {
    a.dot(b)
}

/// `Σ_c x[:,c]ᵀ M x[:,c]`, i.e. `xᵀ (M ⊗ I_d) x`.
pub fn quad_form(m: &DMatrix<f64>, x: &Stacked) -> f64 {
    (m * x).dot(x)
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix, dropping
/// eigenvalues below `rel_tol * λ_max`.
pub fn sym_pinv(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let lmax = eig.eigenvalues.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam.abs() > rel_tol * lmax && lam.abs() > 0.0 {
            let v = eig.eigenvectors.column(k);
            out += (v * v.transpose()) / lam;
        }
    }
    out
}

pub fn all_finite(x: &Stacked) -> bool {
    x.iter().all(|v| v.is_finite())
}
