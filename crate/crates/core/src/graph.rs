//! Network topologies, neighbor-sparse gossip matrices and their spectra.
//!
//! A [`GossipMatrix`] is a symmetric positive semi-definite `N x N` matrix
//! whose off-diagonal support is contained in the edge set and whose null
//! space is exactly `span(1)`. Its Kronecker lift `P ⊗ I_d` is never formed:
//! [`GossipMatrix::mix`] applies it to a stacked vector one node at a time,
//! which is what a single communication round computes.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigenvalues, Stacked};

/// Eigenvalues below this fraction of the largest one count as zero.
pub const ZERO_EIG_REL_TOL: f64 = 1e-9;

/// Connected undirected graph without self-loops or duplicate edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    n_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Network {
    /// Builds a network from unordered pairs. Pairs are normalized so that
    /// `{i, j}` and `{j, i}` describe the same edge; repeating one is an error.
    pub fn new(n_nodes: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::config("a network needs at least one node"));
        }
        let mut edges = BTreeSet::new();
        for (i, j) in pairs {
            if i == j {
                return Err(Error::InvariantViolation(format!("self-loop at node {i}")));
            }
            if i >= n_nodes || j >= n_nodes {
                return Err(Error::InvariantViolation(format!(
                    "edge {{{i}, {j}}} references a node outside 0..{n_nodes}"
                )));
            }
            if !edges.insert((i.min(j), i.max(j))) {
                return Err(Error::InvariantViolation(format!("duplicate edge {{{i}, {j}}}")));
            }
        }
        let mut adjacency = vec![Vec::new(); n_nodes];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let net = Network { n_nodes, edges, adjacency };
        if !net.is_connected() {
            return Err(Error::InvariantViolation("graph is not connected".into()));
        }
        Ok(net)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n_nodes];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n_nodes
    }

    /// One `i j` pair per line, 0-indexed.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    /// Parses the edge-list format. Blank lines and `#` comments are skipped.
    /// The node count is `n_nodes` when given, otherwise one past the largest index.
    pub fn parse_edge_list(text: &str, n_nodes: Option<usize>) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.ok_or_else(|| Error::Parse(format!("line {}: expected two node indices", lineno + 1)))?
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            let i = parse(it.next())?;
            let j = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse(format!("line {}: trailing tokens", lineno + 1)));
            }
            pairs.push((i, j));
        }
        let inferred = pairs.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(1);
        Network::new(n_nodes.unwrap_or(inferred), pairs)
    }

    pub fn read_edge_list(path: &Path, n_nodes: Option<usize>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_edge_list(&text, n_nodes)
    }
}

/// Random connected graph with exactly `n_edges` edges.
///
/// A random recursive spanning tree over a shuffled node order guarantees
/// connectivity; the remaining edges are drawn uniformly without replacement
/// from the pairs not yet present.
pub fn random_connected_graph(n_nodes: usize, n_edges: usize, seed: u64) -> Result<Network> {
    if n_nodes == 0 {
        return Err(Error::config("a network needs at least one node"));
    }
    let max_edges = n_nodes * (n_nodes - 1) / 2;
    if n_edges + 1 < n_nodes || n_edges > max_edges {
        return Err(Error::config(format!(
            "{n_edges} edges cannot form a connected simple graph on {n_nodes} nodes \
             (need {} to {max_edges})",
            n_nodes - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n_nodes).collect();
    order.shuffle(&mut rng);

    let mut edges = BTreeSet::new();
    for k in 1..n_nodes {
        let parent = order[rng.random_range(0..k)];
        let child = order[k];
        edges.insert((parent.min(child), parent.max(child)));
    }
    let mut rest: Vec<(usize, usize)> = (0..n_nodes)
        .flat_map(|i| ((i + 1)..n_nodes).map(move |j| (i, j)))
        .filter(|e| !edges.contains(e))
        .collect();
    rest.shuffle(&mut rng);
    edges.extend(rest.into_iter().take(n_edges - (n_nodes - 1)));
    Network::new(n_nodes, edges)
}

/// Edge weighting used to build a Laplacian-type gossip matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Unweighted graph Laplacian: degree on the diagonal, `-1` on edges.
    #[default]
    Uniform,
    /// `I - W` with Metropolis-Hastings weights `1 / (1 + max(deg_i, deg_j))`.
    Metropolis,
}

/// Smallest positive and largest eigenvalue of a gossip matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBounds {
    pub lambda_min_pos: f64,
    pub lambda_max: f64,
    pub kappa2: f64,
}

impl SpectralBounds {
    pub fn new(lambda_min_pos: f64, lambda_max: f64) -> Result<Self> {
        if !(lambda_min_pos > 0.0 && lambda_max >= lambda_min_pos && lambda_max.is_finite()) {
            return Err(Error::InvariantViolation(format!(
                "spectral bounds need 0 < λ_min ≤ λ_max, got ({lambda_min_pos}, {lambda_max})"
            )));
        }
        Ok(SpectralBounds {
            lambda_min_pos,
            lambda_max,
            kappa2: lambda_max / lambda_min_pos,
        })
    }
}

/// Symmetric, neighbor-sparse, PSD matrix with null space `span(1)`.
#[derive(Debug, Clone)]
pub struct GossipMatrix {
    matrix: DMatrix<f64>,
    /// `N_i ∪ {i}` in ascending order; fixes the per-node summation order.
    support: Vec<Vec<usize>>,
    eigenvalues: Vec<f64>,
    bounds: SpectralBounds,
}

impl GossipMatrix {
    /// Validates `matrix` against the sparsity of `net` and the spectral invariants.
    pub fn new(net: &Network, matrix: DMatrix<f64>) -> Result<Self> {
        let n = net.n_nodes();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::dims("gossip matrix", format!("{n}x{n}"), format!("{}x{}", matrix.nrows(), matrix.ncols())));
        }
        let scale = matrix.amax().max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (matrix[(i, j)], matrix[(j, i)]);
                if (a - b).abs() > 1e-12 * scale {
                    return Err(Error::InvariantViolation(format!("matrix not symmetric at ({i}, {j})")));
                }
                if !net.has_edge(i, j) && (a != 0.0 || b != 0.0) {
                    return Err(Error::InvariantViolation(format!(
                        "entry ({i}, {j}) is nonzero but {{{i}, {j}}} is not an edge"
                    )));
                }
            }
        }
        let norm = matrix.norm().max(f64::MIN_POSITIVE);
        let ones = nalgebra::DVector::from_element(n, 1.0);
        if (&matrix * &ones).norm() > 1e-10 * norm * (n as f64).sqrt() {
            return Err(Error::InvariantViolation("rows do not annihilate the consensus vector".into()));
        }
        let (eigenvalues, bounds) = spectrum_of(&matrix)?;
        let support = (0..n)
            .map(|i| {
                let mut s: Vec<usize> = net.neighbors(i).to_vec();
                s.push(i);
                s.sort_unstable();
                s
            })
            .collect();
        Ok(GossipMatrix { matrix, support, eigenvalues, bounds })
    }

    pub fn n_nodes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dense(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    /// `N_i ∪ {i}`, ascending.
    pub fn support(&self, i: usize) -> &[usize] {
        &self.support[i]
    }

    /// All eigenvalues, ascending, with the consensus eigenvalue snapped to 0.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvalues on the disagreement subspace. Empty for a single node.
    pub fn positive_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues[1..]
    }

    pub fn bounds(&self) -> SpectralBounds {
        self.bounds
    }

    /// One communication round: node `i` returns `Σ_{j ∈ N_i ∪ {i}} p_ij y_j`.
    pub fn mix(&self, y: &Stacked) -> Result<Stacked> {
        self.check_rows(y)?;
        let d = y.ncols();
        let mut out = Stacked::zeros(self.n_nodes(), d);
        for (i, support) in self.support.iter().enumerate() {
            for &j in support {
                let w = self.matrix[(i, j)];
                if w == 0.0 {
                    continue;
                }
                for c in 0..d {
                    out[(i, c)] += w * y[(j, c)];
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn check_rows(&self, y: &Stacked) -> Result<()> {
        if y.nrows() != self.n_nodes() {
            return Err(Error::dims("stacked vector rows", self.n_nodes(), y.nrows()));
        }
        Ok(())
    }

    /// `factor * P`, keeping sparsity; eigenvalues scale exactly.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::config(format!("gossip scale factor must be positive, got {factor}")));
        }
        let bounds = if self.positive_eigenvalues().is_empty() {
            self.bounds
        } else {
            SpectralBounds::new(self.bounds.lambda_min_pos * factor, self.bounds.lambda_max * factor)?
        };
        Ok(GossipMatrix {
            matrix: &self.matrix * factor,
            support: self.support.clone(),
            eigenvalues: self.eigenvalues.iter().map(|v| v * factor).collect(),
            bounds,
        })
    }

    /// Comma separated rows, full precision.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.n_nodes() {
            let row: Vec<String> = (0..self.n_nodes()).map(|j| format!("{:.16e}", self.matrix[(i, j)])).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Builds a Laplacian-type gossip matrix for `net`.
pub fn laplacian(net: &Network, weighting: Weighting) -> GossipMatrix {
    let n = net.n_nodes();
    let mut m = DMatrix::zeros(n, n);
    for (i, j) in net.edges() {
        let w = match weighting {
            Weighting::Uniform => 1.0,
            Weighting::Metropolis => 1.0 / (1.0 + net.degree(i).max(net.degree(j)) as f64),
        };
        m[(i, j)] = -w;
        m[(j, i)] = -w;
        m[(i, i)] += w;
        m[(j, j)] += w;
    }
    GossipMatrix::new(net, m).expect("Laplacian of a connected graph is a valid gossip matrix")
}

/// Spectral bounds of a gossip matrix from a dense symmetric eigensolve.
pub fn spectral_bounds(m: &GossipMatrix) -> SpectralBounds {
    m.bounds()
}

/// Eigenvalues (consensus eigenvalue snapped to zero) and bounds of a
/// candidate gossip matrix.
///
/// For a single node the disagreement subspace is empty; the bounds are then
/// reported as the vacuous `(1, 1)`.
pub fn spectrum_of(matrix: &DMatrix<f64>) -> Result<(Vec<f64>, SpectralBounds)> {
    let mut ev = sym_eigenvalues(matrix);
    let lmax = ev.last().copied().unwrap_or(0.0);
    let tol = ZERO_EIG_REL_TOL * lmax.abs();
    if ev[0] < -tol {
        return Err(Error::InvariantViolation(format!(
            "matrix is indefinite: eigenvalue {:e} below -{tol:e}",
            ev[0]
        )));
    }
    if ev.len() == 1 {
        if ev[0].abs() > f64::EPSILON {
            return Err(Error::InvariantViolation("single-node gossip matrix must be zero".into()));
        }
        return Ok((vec![0.0], SpectralBounds::new(1.0, 1.0)?));
    }
    if ev[1] <= tol {
        return Err(Error::InvariantViolation(
            "null space is larger than the consensus subspace".into(),
        ));
    }
    ev[0] = 0.0;
    let bounds = SpectralBounds::new(ev[1], lmax)?;
    Ok((ev, bounds))
}
