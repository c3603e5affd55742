//! Mixing polynomials of the gossip matrix and the proximal operator
//! `G = ζI - η P_τ(H)`.
//!
//! Two oracles evaluate `P_τ(H) y` through neighbor exchanges only:
//!
//! * [`macc`] takes explicit coefficients, `P_τ(H) = Σ_{t=1}^{τ} a_t H^t`;
//! * [`cacc`] runs the Chebyshev three-term recursion and realizes
//!   `P_τ(λ) = 1 - T_τ(c₁(1-λ)) / T_τ(c₁)` with `c₁ = (κ₂+1)/(κ₂-1)`.
//!
//! The Chebyshev polynomial is only bounded on the spectrum when the positive
//! eigenvalues satisfy `λ_min + λ_max = 2`, so [`cacc`] requires a matrix
//! produced by [`rescale_for_chebyshev`].
//!
//! Every call of either oracle with degree `τ` costs exactly `τ` communication
//! rounds, recorded on a [`RoundCounter`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GossipMatrix, SpectralBounds};
use crate::linalg::Stacked;

/// Relative tolerance for accepting `λ_min + λ_max = 2` before a Chebyshev call.
pub const CHEBYSHEV_NORMALIZATION_TOL: f64 = 1e-9;

/// Cumulative number of communication rounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct RoundCounter(u64);

impl RoundCounter {
    pub fn new() -> Self {
        RoundCounter(0)
    }

    pub fn add(&mut self, rounds: u64) {
        self.0 += rounds;
    }

    pub fn get(&self) -> u64 {
        self.0
    }
}

/// Which degree-`τ` polynomial of `H` the proximal operator uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MixingSpec {
    /// `Σ_{t=1}^{τ} a_t H^t` with `τ = coefficients.len()`.
    Explicit { coefficients: Vec<f64> },
    /// Chebyshev acceleration of degree `τ`.
    Chebyshev { degree: usize },
}

impl MixingSpec {
    /// Explicit polynomial with `a_t = 1/τ`.
    pub fn uniform(degree: usize) -> Self {
        MixingSpec::Explicit { coefficients: vec![1.0 / degree as f64; degree] }
    }

    /// `P_τ(H) = H`.
    pub fn identity() -> Self {
        MixingSpec::Explicit { coefficients: vec![1.0] }
    }

    pub fn degree(&self) -> usize {
        match self {
            MixingSpec::Explicit { coefficients } => coefficients.len(),
            MixingSpec::Chebyshev { degree } => *degree,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree() == 0 {
            return Err(Error::config("mixing polynomial degree must be at least 1"));
        }
        if let MixingSpec::Explicit { coefficients } = self {
            if coefficients.iter().any(|a| !a.is_finite()) {
                return Err(Error::config("mixing coefficients must be finite"));
            }
        }
        Ok(())
    }

    /// Binds the polynomial to a gossip matrix, fixing `c₁` for Chebyshev.
    pub fn bind(&self, p: &GossipMatrix) -> Result<BoundMixing> {
        self.validate()?;
        let c1 = match self {
            MixingSpec::Explicit { .. } => None,
            MixingSpec::Chebyshev { .. } => {
                check_chebyshev_normalized(p)?;
                Some(chebyshev_c1(p.bounds().kappa2)?)
            }
        };
        Ok(BoundMixing { spec: self.clone(), c1 })
    }
}

/// `⌈√κ₂⌉`, the default Chebyshev degree.
pub fn default_chebyshev_degree(kappa2: f64) -> usize {
    (kappa2.sqrt().ceil() as usize).max(1)
}

/// `c₁ = (κ₂+1)/(κ₂-1)`; undefined when `κ₂ = 1`.
pub fn chebyshev_c1(kappa2: f64) -> Result<f64> {
    if !(kappa2 > 1.0 + 1e-12) {
        return Err(Error::config(format!(
            "Chebyshev acceleration needs κ₂ > 1 (got {kappa2}); the positive spectrum is flat, \
             use an explicit mixing polynomial with τ = 1 instead"
        )));
    }
    Ok((kappa2 + 1.0) / (kappa2 - 1.0))
}

/// Chebyshev polynomial of the first kind, by the three-term recurrence.
pub fn chebyshev_t(degree: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if degree == 0 {
        return prev;
    }
    for _ in 1..degree {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn check_chebyshev_normalized(p: &GossipMatrix) -> Result<()> {
    if p.positive_eigenvalues().is_empty() {
        return Ok(());
    }
    let b = p.bounds();
    let sum = b.lambda_min_pos + b.lambda_max;
    if (sum - 2.0).abs() > CHEBYSHEV_NORMALIZATION_TOL * 2.0 {
        return Err(Error::config(format!(
            "Chebyshev oracle needs λ_min + λ_max = 2 on the gossip matrix (got {sum}); \
             apply rescale_for_chebyshev first"
        )));
    }
    Ok(())
}

/// A mixing polynomial bound to one gossip matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundMixing {
    spec: MixingSpec,
    c1: Option<f64>,
}

impl BoundMixing {
    pub fn spec(&self) -> &MixingSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.spec.degree()
    }

    /// `c₁` for Chebyshev polynomials.
    pub fn c1(&self) -> Option<f64> {
        self.c1
    }

    /// Scalar value of the polynomial at eigenvalue `lambda`.
    pub fn value_at(&self, lambda: f64) -> f64 {
        match (&self.spec, self.c1) {
            (MixingSpec::Explicit { coefficients }, _) => {
                let mut pow = 1.0;
                let mut acc = 0.0;
                for a in coefficients {
                    pow *= lambda;
                    acc += a * pow;
                }
                acc
            }
            (MixingSpec::Chebyshev { degree }, Some(c1)) => {
                1.0 - chebyshev_t(*degree, c1 * (1.0 - lambda)) / chebyshev_t(*degree, c1)
            }
            // single node: the disagreement subspace is empty
            (MixingSpec::Chebyshev { .. }, None) => 1.0,
        }
    }

    /// `P_τ(H) y` through the matching oracle.
    pub fn apply(&self, y: &Stacked, p: &GossipMatrix, rounds: &mut RoundCounter) -> Result<Stacked> {
        match (&self.spec, self.c1) {
            (MixingSpec::Explicit { coefficients }, _) => macc(y, p, coefficients.len(), coefficients, rounds),
            (MixingSpec::Chebyshev { degree }, Some(c1)) => cacc(y, p, *degree, c1, rounds),
            (MixingSpec::Chebyshev { degree }, None) => {
                // single node: one round per degree is still charged, output is zero
                rounds.add(*degree as u64);
                Ok(Stacked::zeros(y.nrows(), y.ncols()))
            }
        }
    }
}

/// Mixing acceleration with explicit coefficients: `Σ_{t=1}^{τ} a_t H^t y`.
///
/// Runs `τ` rounds of neighbor-local multiplication, accumulating `a_t y^t`.
pub fn macc(y: &Stacked, p: &GossipMatrix, tau: usize, a: &[f64], rounds: &mut RoundCounter) -> Result<Stacked> {
    if tau == 0 {
        return Err(Error::config("mixing degree τ must be at least 1"));
    }
    if a.len() != tau {
        return Err(Error::dims("mixing coefficients", tau, a.len()));
    }
    p.check_rows(y)?;
    let mut yt = y.clone();
    let mut out = Stacked::zeros(y.nrows(), y.ncols());
    for &coef in a {
        yt = p.mix(&yt)?;
        rounds.add(1);
        out += &yt * coef;
    }
    Ok(out)
}

/// Chebyshev acceleration: `y - y^τ / b^τ` from the three-term recursions
/// `b^{t+1} = 2c₁b^t - b^{t-1}` and `y^{t+1} = 2c₁(y^t - P y^t) - y^{t-1}`.
///
/// `p` must be normalized so that `λ_min + λ_max = 2` on its positive spectrum.
pub fn cacc(y: &Stacked, p: &GossipMatrix, tau: usize, c1: f64, rounds: &mut RoundCounter) -> Result<Stacked> {
    if tau == 0 {
        return Err(Error::config("mixing degree τ must be at least 1"));
    }
    if !c1.is_finite() {
        return Err(Error::config(
            "Chebyshev c₁ is not finite (κ₂ = 1); use an explicit mixing polynomial with τ = 1 instead",
        ));
    }
    p.check_rows(y)?;
    check_chebyshev_normalized(p)?;

    let (mut b_prev, mut b_cur) = (1.0, c1);
    let py = p.mix(y)?;
    rounds.add(1);
    let mut y_prev = y.clone();
    let mut y_cur = (y - py) * c1;
    for _ in 1..tau {
        let b_next = 2.0 * c1 * b_cur - b_prev;
        let py = p.mix(&y_cur)?;
        rounds.add(1);
        let y_next = (&y_cur - py) * (2.0 * c1) - &y_prev;
        b_prev = b_cur;
        b_cur = b_next;
        y_prev = y_cur;
        y_cur = y_next;
    }
    Ok(y - y_cur / b_cur)
}

/// `P' = 2P / (λ_min + λ_max)`, so that `λ'_min + λ'_max = 2` and `κ₂` is unchanged.
pub fn rescale_for_chebyshev(p: &GossipMatrix) -> Result<(GossipMatrix, SpectralBounds)> {
    let b = p.bounds();
    let factor = 2.0 / (b.lambda_min_pos + b.lambda_max);
    if p.positive_eigenvalues().is_empty() || (factor - 1.0).abs() <= f64::EPSILON {
        return Ok((p.clone(), b));
    }
    let scaled = p.scaled(factor)?;
    let bounds = scaled.bounds();
    Ok((scaled, bounds))
}

/// `(min, max)` of the polynomial over the positive eigenvalues of `p`.
///
/// Fails when the polynomial is negative on some positive eigenvalue.
pub fn polynomial_spectral_range(mixing: &BoundMixing, p: &GossipMatrix) -> Result<(f64, f64)> {
    let eigs = p.positive_eigenvalues();
    let vacuous = [p.bounds().lambda_min_pos, p.bounds().lambda_max];
    let eigs: &[f64] = if eigs.is_empty() { &vacuous } else { eigs };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &lam in eigs {
        let v = mixing.value_at(lam);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let scale = hi.abs().max(1.0);
    if lo < -1e-12 * scale {
        return Err(Error::MixingAssumption(format!(
            "mixing polynomial is negative ({lo:e}) on a positive eigenvalue"
        )));
    }
    if let MixingSpec::Explicit { coefficients } = mixing.spec() {
        if coefficients.iter().all(|&a| a > 0.0) {
            let monotone = mixing.value_at(p.bounds().lambda_max);
            debug_assert!((monotone - hi).abs() <= 1e-9 * hi.abs().max(1.0));
        }
    }
    Ok((lo.max(0.0), hi))
}

/// Eigengap `κ_p = λ̄_P / λ̲_P` of a polynomial range.
pub fn kappa_p(range: (f64, f64)) -> f64 {
    range.1 / range.0
}

/// `η = ζ(κ₁ - 1)/(κ₁ λ̄_P - λ̲_P)`, which makes the proximal operator's
/// condition number on the disagreement subspace equal `κ₁`.
pub fn compute_eta(zeta: f64, kappa1_target: f64, poly_range: (f64, f64)) -> Result<f64> {
    let (lo, hi) = poly_range;
    if !(kappa1_target >= 1.0) {
        return Err(Error::config(format!("κ₁ target must be at least 1, got {kappa1_target}")));
    }
    if !(zeta > 0.0) {
        return Err(Error::config(format!("ζ must be positive, got {zeta}")));
    }
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::MixingAssumption(format!(
            "polynomial range ({lo}, {hi}) must be positive to define η"
        )));
    }
    if kappa1_target == 1.0 {
        return Ok(0.0);
    }
    if hi - lo <= 1e-14 * hi {
        return Err(Error::Infeasible {
            bound: "kappa1_target",
            detail: format!("κ₁ = {kappa1_target} is unreachable: the mixing polynomial is flat on the spectrum (κ_p = 1)"),
        });
    }
    Ok(zeta * (kappa1_target - 1.0) / (kappa1_target * hi - lo))
}

/// `G = ζI - η P_τ(H)` bound to a gossip matrix, with its spectrum on the
/// disagreement subspace.
#[derive(Debug, Clone)]
pub struct GOperator {
    zeta: f64,
    eta: f64,
    mixing: BoundMixing,
    gossip: Arc<GossipMatrix>,
    poly_range: (f64, f64),
    lambda_hat: f64,
    lambda_low: f64,
}

impl GOperator {
    /// Requires `ζ > 0`, `η ≥ 0` and `η λ̄_P < ζ`. `η = 0` gives `G = ζI`.
    pub fn new(zeta: f64, eta: f64, spec: &MixingSpec, gossip: Arc<GossipMatrix>) -> Result<Self> {
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::MixingAssumption(format!("ζ must be positive, got {zeta}")));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::MixingAssumption(format!("η must be non-negative, got {eta}")));
        }
        let mixing = spec.bind(&gossip)?;
        let poly_range = polynomial_spectral_range(&mixing, &gossip)?;
        if eta * poly_range.1 >= zeta {
            return Err(Error::MixingAssumption(format!(
                "η λ̄_P = {:e} must stay below ζ = {zeta:e}",
                eta * poly_range.1
            )));
        }
        let eigs = gossip.positive_eigenvalues();
        let (mut lambda_low, mut lambda_hat) = (f64::INFINITY, f64::NEG_INFINITY);
        if eigs.is_empty() {
            lambda_low = zeta;
            lambda_hat = zeta;
        }
        for &lam in eigs {
            let g = zeta - eta * mixing.value_at(lam);
            lambda_low = lambda_low.min(g);
            lambda_hat = lambda_hat.max(g);
        }
        Ok(GOperator { zeta, eta, mixing, gossip, poly_range, lambda_hat, lambda_low })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn mixing(&self) -> &BoundMixing {
        &self.mixing
    }

    pub fn gossip(&self) -> &GossipMatrix {
        &self.gossip
    }

    pub fn degree(&self) -> usize {
        self.mixing.degree()
    }

    /// `(λ̲_P, λ̄_P)` of the mixing polynomial.
    pub fn poly_range(&self) -> (f64, f64) {
        self.poly_range
    }

    /// Largest eigenvalue of `G` on the disagreement subspace, `λ̂_G`.
    pub fn lambda_hat(&self) -> f64 {
        self.lambda_hat
    }

    /// Smallest eigenvalue of `G` on the disagreement subspace, `λ̲_G`.
    pub fn lambda_low(&self) -> f64 {
        self.lambda_low
    }

    /// `κ₁ = λ̂_G / λ̲_G`.
    pub fn kappa1(&self) -> f64 {
        self.lambda_hat / self.lambda_low
    }

    /// `ζ y - η P_τ(H) y`. Charges `τ` rounds even when `η = 0`, since the
    /// oracle still runs; callers that skip it account for rounds themselves.
    pub fn apply(&self, y: &Stacked, rounds: &mut RoundCounter) -> Result<Stacked> {
        let mixed = self.mixing.apply(y, &self.gossip, rounds)?;
        Ok(y * self.zeta - mixed * self.eta)
    }
}

/// Free-function form of [`GOperator::apply`].
pub fn apply_g(op: &GOperator, y: &Stacked, rounds: &mut RoundCounter) -> Result<Stacked> {
    op.apply(y, rounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{laplacian, Network, Weighting};
    use nalgebra::DMatrix;

    fn path3() -> GossipMatrix {
        laplacian(&Network::new(3, [(0, 1), (1, 2)]).unwrap(), Weighting::Uniform)
    }

    fn k3() -> GossipMatrix {
        laplacian(&Network::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap(), Weighting::Uniform)
    }

    fn sample(n: usize, d: usize) -> Stacked {
        Stacked::from_fn(n, d, |i, c| ((1 + i * d + c) as f64 * 0.7).cos())
    }

    #[test]
    fn macc_degree_one_is_h() {
        let p = path3();
        let y = sample(3, 2);
        let mut r = RoundCounter::new();
        let out = macc(&y, &p, 1, &[1.0], &mut r).unwrap();
        assert!((out - p.dense() * &y).norm() < 1e-14);
        assert_eq!(r.get(), 1);
    }

    #[test]
    fn macc_matches_dense_powers() {
        let p = path3();
        let y = sample(3, 2);
        let h = p.dense();
        let dense = (h * 0.5 + h * h * 0.3 + h * h * h * 0.2) * &y;
        let mut r = RoundCounter::new();
        let out = macc(&y, &p, 3, &[0.5, 0.3, 0.2], &mut r).unwrap();
        assert!((out - dense).norm() < 1e-12);
        assert_eq!(r.get(), 3);
    }

    #[test]
    fn oracles_annihilate_consensus() {
        let p = path3();
        let y = Stacked::from_fn(3, 2, |_, c| c as f64 + 1.5);
        let mut r = RoundCounter::new();
        assert!(macc(&y, &p, 4, &[0.1, 0.2, 0.3, 0.4], &mut r).unwrap().norm() < 1e-12);
        let (ps, _) = rescale_for_chebyshev(&p).unwrap();
        let c1 = chebyshev_c1(ps.bounds().kappa2).unwrap();
        assert!(cacc(&y, &ps, 5, c1, &mut r).unwrap().norm() < 1e-12);
    }

    #[test]
    fn macc_rejects_bad_input() {
        let p = path3();
        let mut r = RoundCounter::new();
        assert!(macc(&sample(3, 2), &p, 2, &[1.0], &mut r).is_err());
        assert!(macc(&sample(3, 2), &p, 0, &[], &mut r).is_err());
        assert!(macc(&sample(4, 2), &p, 1, &[1.0], &mut r).is_err());
    }

    #[test]
    fn cacc_degree_one_is_h() {
        let (ps, _) = rescale_for_chebyshev(&path3()).unwrap();
        let y = sample(3, 3);
        let mut r = RoundCounter::new();
        let out = cacc(&y, &ps, 1, 2.0, &mut r).unwrap();
        assert!((out - ps.dense() * &y).norm() < 1e-14);
        assert_eq!(r.get(), 1);
    }

    #[test]
    fn cacc_spot_value_six_sevenths() {
        let (ps, b) = rescale_for_chebyshev(&path3()).unwrap();
        assert!((b.kappa2 - 3.0).abs() < 1e-12);
        let c1 = chebyshev_c1(b.kappa2).unwrap();
        assert!((c1 - 2.0).abs() < 1e-12);
        // eigenvectors of the path Laplacian for λ = 1 and λ = 3
        let v1 = Stacked::from_column_slice(3, 1, &[1.0, 0.0, -1.0]);
        let v3 = Stacked::from_column_slice(3, 1, &[1.0, -2.0, 1.0]);
        let mut r = RoundCounter::new();
        for v in [v1, v3] {
            let out = cacc(&v, &ps, 2, c1, &mut r).unwrap();
            assert!((out - &v * (6.0 / 7.0)).norm() < 1e-12);
        }
        assert_eq!(r.get(), 4);
    }

    #[test]
    fn cacc_requires_normalization_and_kappa() {
        let p = path3();
        let mut r = RoundCounter::new();
        assert!(matches!(cacc(&sample(3, 1), &p, 2, 2.0, &mut r), Err(Error::Config(_))));
        assert!(matches!(chebyshev_c1(1.0), Err(Error::Config(_))));
        let (k3s, _) = rescale_for_chebyshev(&k3()).unwrap();
        let err = MixingSpec::Chebyshev { degree: 2 }.bind(&k3s).unwrap_err();
        assert!(err.to_string().contains("explicit"));
    }

    #[test]
    fn rescaling_examples() {
        let (ps, b) = rescale_for_chebyshev(&path3()).unwrap();
        let ev = ps.eigenvalues();
        assert!(ev[0].abs() < 1e-15 && (ev[1] - 0.5).abs() < 1e-12 && (ev[2] - 1.5).abs() < 1e-12);
        assert!((ps.entry(0, 1) + 0.5).abs() < 1e-15);
        assert!((b.lambda_min_pos + b.lambda_max - 2.0).abs() < 1e-12);
        let (again, _) = rescale_for_chebyshev(&ps).unwrap();
        assert_eq!(again.dense(), ps.dense());
        let (k3s, _) = rescale_for_chebyshev(&k3()).unwrap();
        let ev = k3s.eigenvalues();
        assert!((ev[1] - 1.0).abs() < 1e-12 && (ev[2] - 1.0).abs() < 1e-12);
        assert!((k3s.entry(0, 0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_ranges() {
        let p = path3();
        let id = MixingSpec::identity().bind(&p).unwrap();
        let r = polynomial_spectral_range(&id, &p).unwrap();
        assert!((r.0 - 1.0).abs() < 1e-12 && (r.1 - 3.0).abs() < 1e-12);
        let two = MixingSpec::Explicit { coefficients: vec![1.0, 1.0] }.bind(&p).unwrap();
        let r = polynomial_spectral_range(&two, &p).unwrap();
        assert!((r.0 - 2.0).abs() < 1e-12 && (r.1 - 12.0).abs() < 1e-12);
        let (ps, _) = rescale_for_chebyshev(&p).unwrap();
        let ch = MixingSpec::Chebyshev { degree: 2 }.bind(&ps).unwrap();
        let r = polynomial_spectral_range(&ch, &ps).unwrap();
        assert!((r.0 - 6.0 / 7.0).abs() < 1e-12 && (r.1 - 6.0 / 7.0).abs() < 1e-12);
        assert!((kappa_p(r) - 1.0).abs() < 1e-12);
        let id_s = MixingSpec::identity().bind(&ps).unwrap();
        assert!((kappa_p(polynomial_spectral_range(&id_s, &ps).unwrap()) - 3.0).abs() < 1e-12);
        let neg = MixingSpec::Explicit { coefficients: vec![1.0, -1.0] }.bind(&p).unwrap();
        assert!(matches!(polynomial_spectral_range(&neg, &p), Err(Error::MixingAssumption(_))));
    }

    #[test]
    fn eta_formula() {
        assert_eq!(compute_eta(1.0, 1.0, (1.0, 3.0)).unwrap(), 0.0);
        let eta = compute_eta(1.0, 2.0, (1.0, 3.0)).unwrap();
        assert!((eta - 0.2).abs() < 1e-15);
        assert!(((1.0 - eta) / (1.0 - 3.0 * eta) - 2.0).abs() < 1e-12);
        assert!(compute_eta(1.0, 0.5, (1.0, 3.0)).is_err());
        assert!(compute_eta(1.0, 2.0, (0.5, 0.5)).is_err());
    }

    #[test]
    fn g_operator_spectrum_and_apply() {
        let p = Arc::new(path3());
        let spec = MixingSpec::identity();
        let eta = compute_eta(1.0, 2.0, (1.0, 3.0)).unwrap();
        let g = GOperator::new(1.0, eta, &spec, p.clone()).unwrap();
        assert!((g.kappa1() - 2.0).abs() < 1e-12);
        assert!((g.lambda_hat() - 0.8).abs() < 1e-12);
        let y = sample(3, 2);
        let mut r = RoundCounter::new();
        let dense = (DMatrix::identity(3, 3) - p.dense() * eta) * &y;
        assert!((g.apply(&y, &mut r).unwrap() - dense).norm() < 1e-12);

        let g0 = GOperator::new(0.7, 0.0, &spec, p.clone()).unwrap();
        assert!((g0.apply(&y, &mut r).unwrap() - &y * 0.7).norm() < 1e-15);
        let cons = Stacked::from_fn(3, 2, |_, c| c as f64 - 0.3);
        assert!((g.apply(&cons, &mut r).unwrap() - &cons).norm() < 1e-12);

        assert!(GOperator::new(1.0, 0.34, &spec, p.clone()).is_err());
        assert!(GOperator::new(0.0, 0.0, &spec, p).is_err());
    }

    #[test]
    fn chebyshev_t_values() {
        assert_eq!(chebyshev_t(0, 0.3), 1.0);
        assert_eq!(chebyshev_t(2, 2.0), 7.0);
        assert!((chebyshev_t(5, 0.4) - (5.0 * 0.4f64.acos()).cos()).abs() < 1e-12);
        assert_eq!(default_chebyshev_degree(9.0), 3);
        assert_eq!(default_chebyshev_degree(10.0), 4);
    }
}
