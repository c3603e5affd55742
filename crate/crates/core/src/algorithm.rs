//! The MAP-Pro iteration, its Chebyshev-accelerated variant, the L-ADMM
//! special case, and theory-driven parameter selection.
//!
//! One iteration with `G = ζI - η P_τ(H)` and `H̃ = ᾱH`:
//!
//! ```text
//! z  = ∇f̃(x) + θ q + ρ H x
//! x⁺ = x - G z
//! q⁺ = q + ρ H̃ x⁺
//! ```

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GossipMatrix;
use crate::linalg::{all_finite, node_sum, Stacked};
use crate::metrics::{Diagnostics, DiagnosticsRecord};
use crate::mixing::{compute_eta, polynomial_spectral_range, rescale_for_chebyshev, GOperator, MixingSpec, RoundCounter};
use crate::problems::ProblemInstance;

/// Tolerance on `|Σ_i q_i|` for a user-supplied dual start.
pub const DUAL_INIT_TOL: f64 = 1e-12;
/// Iterates with a larger norm are treated as diverged.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    MapPro,
    MapProCa,
    LAdmm,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::MapPro => "map_pro",
            Variant::MapProCa => "map_pro_ca",
            Variant::LAdmm => "l_admm",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Theory,
    Tuned,
}

/// Builds the operator `Gᵏ` for iteration `k`.
pub type ScheduleFn = dyn Fn(usize) -> Result<GOperator> + Send + Sync;

#[derive(Clone)]
enum Schedule {
    Constant(GOperator),
    Varying(Arc<ScheduleFn>),
}

/// Everything the iteration needs besides the problem.
#[derive(Clone)]
pub struct AlgoConfig {
    variant: Variant,
    mode: Mode,
    gossip: Arc<GossipMatrix>,
    rho: f64,
    theta: f64,
    dual_scale: f64,
    schedule: Schedule,
}

impl fmt::Debug for AlgoConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("AlgoConfig");
        s.field("variant", &self.variant)
            .field("mode", &self.mode)
            .field("rho", &self.rho)
            .field("theta", &self.theta)
            .field("dual_scale", &self.dual_scale);
        match &self.schedule {
            Schedule::Constant(g) => s.field("zeta", &g.zeta()).field("eta", &g.eta()).field("tau", &g.degree()),
            Schedule::Varying(_) => s.field("schedule", &"varying"),
        };
        s.finish()
    }
}

impl AlgoConfig {
    /// Constant-in-`k` configuration. `g` must be bound to `gossip`.
    ///
    /// In theory mode the dual scale must lie in `(0, λ̲_G / (2κ₁κ₂))`.
    pub fn new(variant: Variant, mode: Mode, rho: f64, theta: f64, dual_scale: f64, g: GOperator) -> Result<Self> {
        let gossip = Arc::new(g.gossip().clone());
        let cfg = AlgoConfig {
            variant,
            mode,
            gossip,
            rho,
            theta,
            dual_scale,
            schedule: Schedule::Constant(g),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replaces the constant operator with a per-iteration schedule. Each
    /// `Gᵏ` is validated when it is built.
    pub fn with_schedule(mut self, schedule: Arc<ScheduleFn>) -> Self {
        self.schedule = Schedule::Varying(schedule);
        self
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("ρ", self.rho), ("θ", self.theta), ("ᾱ", self.dual_scale)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if let (Mode::Theory, Schedule::Constant(g)) = (self.mode, &self.schedule) {
            let cap = g.lambda_low() / (2.0 * g.kappa1() * self.gossip.bounds().kappa2);
            if self.dual_scale >= cap {
                return Err(Error::Infeasible {
                    bound: "dual_scale",
                    detail: format!("ᾱ = {:e} must be below λ̲_G/(2κ₁κ₂) = {cap:e}", self.dual_scale),
                });
            }
        }
        Ok(())
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The gossip matrix `H` the iteration runs on.
    pub fn gossip(&self) -> &Arc<GossipMatrix> {
        &self.gossip
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `ᾱ` in `H̃ = ᾱH`.
    pub fn dual_scale(&self) -> f64 {
        self.dual_scale
    }

    /// The constant operator, if the schedule is constant.
    pub fn constant_operator(&self) -> Option<&GOperator> {
        match &self.schedule {
            Schedule::Constant(g) => Some(g),
            Schedule::Varying(_) => None,
        }
    }

    pub fn operator_at(&self, k: usize) -> Result<GOperator> {
        match &self.schedule {
            Schedule::Constant(g) => Ok(g.clone()),
            Schedule::Varying(f) => f(k),
        }
    }

    /// Communication rounds charged for one iteration with mixing degree `τ`:
    /// `τ + 2` for MAP-Pro variants, `2` for L-ADMM.
    pub fn rounds_per_iteration(&self, tau: usize) -> u64 {
        match self.variant {
            Variant::LAdmm => 2,
            _ => tau as u64 + 2,
        }
    }
}

/// Primal, dual and auxiliary iterates with bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoState {
    pub x: Stacked,
    pub q: Stacked,
    pub z: Stacked,
    pub k: usize,
    pub rounds: u64,
}

/// Starting state. `x0` defaults to zero; `q0` defaults to zero and must
/// otherwise sum to zero across nodes.
pub fn init_state(problem: &ProblemInstance, x0: Option<Stacked>, q0: Option<Stacked>) -> Result<AlgoState> {
    let (n, d) = (problem.n_nodes(), problem.dim());
    let shape_ok = |m: &Stacked| m.nrows() == n && m.ncols() == d;
    let x = x0.unwrap_or_else(|| Stacked::zeros(n, d));
    if !shape_ok(&x) {
        return Err(Error::dims("x0", format!("{n}x{d}"), format!("{}x{}", x.nrows(), x.ncols())));
    }
    let q = q0.unwrap_or_else(|| Stacked::zeros(n, d));
    if !shape_ok(&q) {
        return Err(Error::dims("q0", format!("{n}x{d}"), format!("{}x{}", q.nrows(), q.ncols())));
    }
    let residual = node_sum(&q).amax();
    if residual > DUAL_INIT_TOL {
        return Err(Error::InvalidDualInit { residual });
    }
    Ok(AlgoState {
        x,
        q,
        z: Stacked::zeros(n, d),
        k: 0,
        rounds: 0,
    })
}

/// Advances `state` by one iteration.
pub fn step(state: &mut AlgoState, problem: &ProblemInstance, config: &AlgoConfig) -> Result<()> {
    let g = config.operator_at(state.k)?;
    let h = config.gossip();
    let grad = problem.stacked_gradient(&state.x)?;
    let hx = h.mix(&state.x)?;
    let z = grad + &state.q * config.theta + hx * config.rho;

    let mut oracle_rounds = RoundCounter::new();
    let mut x_next = &state.x - &z * g.zeta();
    if g.eta() != 0.0 {
        let mixed = g.mixing().apply(&z, h, &mut oracle_rounds)?;
        x_next += mixed * g.eta();
    }
    let q_next = &state.q + h.mix(&x_next)? * (config.rho * config.dual_scale);

    let k = state.k;
    if !all_finite(&x_next) || !all_finite(&q_next) {
        return Err(Error::Divergence {
            iteration: k,
            reason: "non-finite iterate".into(),
        });
    }
    let norm = x_next.norm();
    if norm > DIVERGENCE_NORM {
        return Err(Error::Divergence {
            iteration: k,
            reason: format!("‖x‖ = {norm:e} exceeds {DIVERGENCE_NORM:e}"),
        });
    }
    state.x = x_next;
    state.q = q_next;
    state.z = z;
    state.k += 1;
    state.rounds += config.rounds_per_iteration(g.degree());
    Ok(())
}

/// Stopping rules for [`run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub iterations: usize,
    /// Stop at the first recorded state whose optimality gap is at most this.
    pub stop_gap: Option<f64>,
    /// Stop before an iteration would exceed this many rounds.
    pub round_budget: Option<u64>,
}

impl RunOptions {
    pub fn iterations(iterations: usize) -> Self {
        RunOptions {
            iterations,
            stop_gap: None,
            round_budget: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: AlgoState,
    /// Index into `records` of the first state meeting `stop_gap`.
    pub reached: Option<usize>,
}

/// Runs up to `opts.iterations` steps, recording diagnostics for the initial
/// state and after every step.
pub fn run(
    problem: &ProblemInstance,
    config: &AlgoConfig,
    state: AlgoState,
    opts: &RunOptions,
    diagnostics: &Diagnostics,
) -> Result<Trajectory> {
    run_with(problem, config, state, opts, diagnostics, |_, _| {})
}

/// [`run`] with an observer called on every recorded state.
pub fn run_with(
    problem: &ProblemInstance,
    config: &AlgoConfig,
    mut state: AlgoState,
    opts: &RunOptions,
    diagnostics: &Diagnostics,
    mut observe: impl FnMut(&AlgoState, &DiagnosticsRecord),
) -> Result<Trajectory> {
    if opts.iterations == 0 {
        return Err(Error::config("run needs at least one iteration"));
    }
    let mut records = Vec::with_capacity(opts.iterations + 1);
    let mut reached = None;
    loop {
        let rec = diagnostics.record(&state)?;
        observe(&state, &rec);
        let done = opts.stop_gap.is_some_and(|eps| rec.opt_gap <= eps);
        records.push(rec);
        if done {
            reached = Some(records.len() - 1);
            break;
        }
        if state.k >= opts.iterations {
            break;
        }
        if let Some(budget) = opts.round_budget {
            let tau = config.operator_at(state.k)?.degree();
            if state.rounds + config.rounds_per_iteration(tau) > budget {
                break;
            }
        }
        step(&mut state, problem, config)?;
    }
    Ok(Trajectory {
        records,
        final_state: state,
        reached,
    })
}

/// L-ADMM as a special case: `ζ = 1/γ`, `η = 0`, `ρ = α`, `θ = β`, `H̃ = β/(αγ) H`.
pub fn l_admm_config(gamma: f64, alpha: f64, beta: f64, gossip: Arc<GossipMatrix>) -> Result<AlgoConfig> {
    if !(gamma > 0.0 && alpha > 0.0 && beta > 0.0) {
        return Err(Error::config("L-ADMM parameters γ, α, β must be positive"));
    }
    let g = GOperator::new(1.0 / gamma, 0.0, &MixingSpec::identity(), gossip)?;
    AlgoConfig::new(Variant::LAdmm, Mode::Tuned, alpha, beta, beta / (alpha * gamma), g)
}

/// Raw inputs for the descent-lemma constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantInputs {
    pub smoothness: f64,
    pub lambda_h_min: f64,
    pub lambda_h_max: f64,
    pub rho: f64,
    pub theta: f64,
    pub zeta: f64,
    /// `λ̂_G`, largest eigenvalue of `G` off the consensus direction.
    pub lambda_hat_g: f64,
    /// `λ̲_G`, smallest eigenvalue of `G` off the consensus direction.
    pub lambda_low_g: f64,
    pub dual_scale: f64,
    /// `(ν, N)` for P-Ł problems.
    pub pl: Option<(f64, usize)>,
}

/// The descent-lemma and rate constants for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaConstants {
    pub kappa1: f64,
    pub kappa2: f64,
    pub smoothness: f64,
    pub lambda_h_min: f64,
    pub lambda_h_max: f64,
    pub rho: f64,
    pub theta: f64,
    pub zeta: f64,
    pub lambda_hat_g: f64,
    pub lambda_low_g: f64,
    pub lambda_d_max: f64,
    pub lambda_d_min: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
    pub eps5: f64,
    pub eps6: f64,
    pub eps7: f64,
    pub eps8: f64,
    pub eps9: f64,
    pub eps10: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta4: Option<f64>,
    pub delta: Option<f64>,
    /// Upper bounds on `λ̂_G`, in the order they are listed in [`LAMBDA_HAT_BOUNDS`].
    pub lambda_hat_bounds: [f64; 6],
}

/// Names of the `λ̂_G` upper bounds.
pub const LAMBDA_HAT_BOUNDS: [&str; 6] = [
    "eps3_over_eps4",
    "eps5_over_eps6",
    "eps7_eps9_over_eps8",
    "xi2_positive",
    "xi1_xi2_above_quarter",
    "xi1_xi2_above_quarter_printed",
];

/// Positive root of `a t² + b t = c` without cancellation.
fn positive_root(a: f64, b: f64, c: f64) -> f64 {
    2.0 * c / (b + (b * b + 4.0 * a * c).sqrt())
}

impl LemmaConstants {
    pub fn evaluate(inp: &ConstantInputs) -> LemmaConstants {
        let m = inp.smoothness;
        let (lh_min, lh) = (inp.lambda_h_min, inp.lambda_h_max);
        let (rho, theta, zeta) = (inp.rho, inp.theta, inp.zeta);
        let lhat = inp.lambda_hat_g;
        let lg = inp.lambda_low_g;
        let kappa1 = lhat / lg;
        let kappa2 = lh / lh_min;
        let ld = inp.dual_scale / lg;
        let ld_min = inp.dual_scale / lhat;
        let m2 = m * m;

        let eps1 = rho * lh * (1.0 / (2.0 * kappa1 * kappa2) + ld);
        let eps2 = rho * (theta + rho * lh) * ld * lh;
        let eps3 = rho * lh * (1.0 / (2.0 * kappa1 * kappa2) - ld) - (1.0 + m2 + theta / (8.0 * kappa1));
        let eps4 = 4.5 * rho * rho * lh * lh
            + rho * ld * lh
            + 0.25
            + rho * rho * ld * lh * lh
            + (3.0 + 1.5 * rho * lh) * m2
            + eps2;
        let eps5 = (theta - 1.0) / (2.0 * kappa1);
        let eps6 = 3.5 * theta * theta + 0.5 * (3.0 * theta * theta + rho * rho * lh * lh);
        let eps7 = 0.25;
        let eps8 = m / 2.0 + m2 / (theta * ld_min) * (1.0 / (rho * lh_min) + 1.0 / theta);
        let eps9 = m2 / (theta * ld_min) * (1.0 / (rho * lh_min).powi(2) + 1.0 / (theta * theta))
            + m2 / (2.0 * theta * theta * rho * lh_min);
        let eps10 = eps8 + eps9 / lg;

        let xi1 = 0.5 * (theta / (rho * lh) + 1.0);
        let xi2 = 0.5 - eps1 * lhat - eps2 * lhat * lhat;
        let xi3 = 0.5 * (xi2 - xi1 + ((xi2 - xi1).powi(2) + 1.0).sqrt());

        let a = lhat * (eps3 - eps4 * lhat);
        let b = lhat * (eps5 - eps6 * lhat);
        let delta1 = 0.5 + xi1;
        let delta2 = a.min(b).min(zeta * (eps7 - eps10 * zeta)).min(zeta / 4.0);
        let delta3 = xi2 - xi3;
        let delta4 = inp.pl.map(|(nu, n)| a.min(b).min(nu * zeta / (2.0 * n as f64)));
        let delta = delta4.map(|d4| d4 / delta1);

        let r = lhat / zeta;
        let quarter = 0.5 - 1.0 / (4.0 * xi1);
        let lambda_hat_bounds = [
            eps3 / eps4,
            eps5 / eps6,
            (r * eps7 - eps9 * kappa1) / eps8,
            positive_root(eps2, eps1, 0.5),
            positive_root(eps2, eps1, quarter),
            // printed form drops the ε₂ factor under the root
            (2.0 - 1.0 / xi1) / (2.0 * eps2 * (eps1 + (eps1 * eps1 + 2.0 - 1.0 / xi1).sqrt())),
        ];

        LemmaConstants {
            kappa1,
            kappa2,
            smoothness: m,
            lambda_h_min: lh_min,
            lambda_h_max: lh,
            rho,
            theta,
            zeta,
            lambda_hat_g: lhat,
            lambda_low_g: lg,
            lambda_d_max: ld,
            lambda_d_min: ld_min,
            eps1,
            eps2,
            eps3,
            eps4,
            eps5,
            eps6,
            eps7,
            eps8,
            eps9,
            eps10,
            xi1,
            xi2,
            xi3,
            delta1,
            delta2,
            delta3,
            delta4,
            delta,
            lambda_hat_bounds,
        }
    }

    /// Coefficient `λ̂_G(ε₁ + ε₂λ̂_G)` linking `Ṽ` to `V`.
    pub fn v_tilde_coefficient(&self) -> f64 {
        self.lambda_hat_g * (self.eps1 + self.eps2 * self.lambda_hat_g)
    }

    /// Every strict inequality the theory requires, as `(name, lhs, rhs)`
    /// meaning `lhs < rhs`.
    pub fn conditions(&self) -> Vec<(&'static str, f64, f64)> {
        let m2 = self.smoothness * self.smoothness;
        let k1 = self.kappa1;
        let kk = 2.0 * k1 * self.kappa2;
        let lh = self.lambda_h_max;
        let lhat = self.lambda_hat_g;
        let mut out = vec![
            ("lambda_d_max", self.lambda_d_max, 1.0 / kk),
            ("theta", (4.0 * k1 * m2).max(1.0), self.theta),
            (
                "rho_descent",
                (1.0 + m2 + self.theta / (8.0 * k1)) / (lh / kk - lh * self.lambda_d_max),
                self.rho,
            ),
            ("rho_theta", self.theta / self.lambda_h_min, self.rho),
            ("eps3", 0.0, self.eps3),
            ("eps5", 0.0, self.eps5),
            ("zeta_eps7_eps10", self.zeta, self.eps7 / self.eps10),
            ("zeta_gradient_transfer", self.zeta, self.theta * lhat / (4.0 * k1 * m2)),
            ("delta2", 0.0, self.delta2),
            ("delta3", 0.0, self.delta3),
        ];
        if lh / kk - lh * self.lambda_d_max <= 0.0 {
            out[2].1 = f64::INFINITY;
        }
        for (name, bound) in LAMBDA_HAT_BOUNDS.iter().zip(self.lambda_hat_bounds) {
            out.push((name, lhat, bound));
        }
        if let Some(delta) = self.delta {
            out.push(("delta_positive", 0.0, delta));
            out.push(("delta_below_one", delta, 1.0));
        }
        out
    }

    /// Names of the conditions that fail, with their values.
    pub fn violations(&self) -> Vec<String> {
        self.conditions()
            .into_iter()
            .filter(|(_, lhs, rhs)| !(lhs < rhs))
            .map(|(name, lhs, rhs)| format!("{name}: {lhs:e} is not below {rhs:e}"))
            .collect()
    }
}

/// Scalar inputs to the theory parameter chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainInputs {
    pub smoothness: f64,
    pub lambda_h_min: f64,
    pub lambda_h_max: f64,
    pub kappa1: f64,
    /// `(λ̲_P, λ̄_P)` of the mixing polynomial on the disagreement spectrum.
    pub poly_range: (f64, f64),
    pub pl: Option<(f64, usize)>,
}

/// Output of the theory parameter chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParameters {
    pub rho: f64,
    pub theta: f64,
    pub zeta: f64,
    pub eta: f64,
    pub dual_scale: f64,
    pub constants: LemmaConstants,
}

fn infeasible(bound: &'static str, detail: String) -> Error {
    Error::Infeasible { bound, detail }
}

/// Runs the theory chain `λ̄_D̃ → θ → ρ → ε → λ̂_G → ζ → η → ᾱ` on scalars.
///
/// Open intervals are resolved at their midpoint, one-sided ones at twice
/// the lower bound. The target `κ₁` fixes the ratio `r = λ̂_G/ζ`, which feeds
/// the `θ` bound and the third `λ̂_G` bound.
pub fn theory_chain(inp: &ChainInputs) -> Result<TheoryParameters> {
    let m = inp.smoothness;
    let (lh_min, lh) = (inp.lambda_h_min, inp.lambda_h_max);
    let k1 = inp.kappa1;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::config(format!("smoothness bound must be positive, got {m}")));
    }
    if !(lh_min > 0.0 && lh >= lh_min) {
        return Err(Error::config("spectral bounds of H must satisfy 0 < λ̲_H ≤ λ̄_H"));
    }
    if !(k1 >= 1.0 && k1.is_finite()) {
        return Err(Error::config(format!("κ₁ target must be at least 1, got {k1}")));
    }
    let (lo, hi) = inp.poly_range;
    let k2 = lh / lh_min;
    let r = if k1 == 1.0 {
        1.0
    } else {
        let r = k1 * (hi - lo) / (k1 * hi - lo);
        if !(r > 0.0 && r.is_finite()) || hi - lo <= 1e-14 * hi {
            return Err(infeasible(
                "kappa1_target",
                format!("κ₁ = {k1} is unreachable with polynomial range [{lo:e}, {hi:e}]"),
            ));
        }
        r
    };

    let ld = 1.0 / (4.0 * k1 * k2);
    let m2 = m * m;
    let theta = 2.0 * (4.0 * k1 * m2 / r).max(1.0);
    let rho = 2.0 * ((1.0 + m2 + theta / (8.0 * k1)) / (lh / (2.0 * k1 * k2) - lh * ld)).max(theta / lh_min);

    // Constants at a unit placeholder; only the λ̂_G-free parts are read.
    let probe = LemmaConstants::evaluate(&ConstantInputs {
        smoothness: m,
        lambda_h_min: lh_min,
        lambda_h_max: lh,
        rho,
        theta,
        zeta: 1.0 / r,
        lambda_hat_g: 1.0,
        lambda_low_g: 1.0 / k1,
        dual_scale: ld / k1,
        pl: inp.pl,
    });
    if probe.eps3 <= 0.0 {
        return Err(infeasible("eps3", format!("ε₃ = {:e}", probe.eps3)));
    }
    if probe.eps5 <= 0.0 {
        return Err(infeasible("eps5", format!("ε₅ = {:e}", probe.eps5)));
    }
    let mut bound = f64::INFINITY;
    for (name, b) in LAMBDA_HAT_BOUNDS.iter().zip(probe.lambda_hat_bounds) {
        if !(b > 0.0) {
            return Err(infeasible(name, format!("upper bound on λ̂_G is {b:e}; the interval is empty")));
        }
        bound = bound.min(b);
    }
    let lhat = bound / 2.0;
    let zeta = lhat / r;
    let lg = lhat / k1;
    let eta = if k1 == 1.0 { 0.0 } else { compute_eta(zeta, k1, inp.poly_range)? };
    let dual_scale = ld * lg;

    let constants = LemmaConstants::evaluate(&ConstantInputs {
        smoothness: m,
        lambda_h_min: lh_min,
        lambda_h_max: lh,
        rho,
        theta,
        zeta,
        lambda_hat_g: lhat,
        lambda_low_g: lg,
        dual_scale,
        pl: inp.pl,
    });
    if !(zeta < constants.eps7 / constants.eps10) {
        return Err(infeasible(
            "zeta_eps7_eps10",
            format!("ζ = {zeta:e} must be below ε₇/ε₁₀ = {:e}", constants.eps7 / constants.eps10),
        ));
    }
    let transfer = theta * lhat / (4.0 * k1 * m2);
    if !(zeta < transfer) {
        return Err(infeasible(
            "zeta_gradient_transfer",
            format!("ζ = {zeta:e} must be below θλ̂_G/(4κ₁M̄²) = {transfer:e}"),
        ));
    }
    if let Some(v) = constants.violations().into_iter().next() {
        return Err(infeasible("theorem_conditions", v));
    }
    Ok(TheoryParameters {
        rho,
        theta,
        zeta,
        eta,
        dual_scale,
        constants,
    })
}

/// The gossip matrix a variant iterates on: Chebyshev mixing needs the
/// rescaled spectrum with `λ̲ + λ̄ = 2`.
pub fn prepare_gossip(p: &GossipMatrix, mixing: &MixingSpec) -> Result<Arc<GossipMatrix>> {
    match mixing {
        MixingSpec::Chebyshev { .. } => Ok(Arc::new(rescale_for_chebyshev(p)?.0)),
        MixingSpec::Explicit { .. } => Ok(Arc::new(p.clone())),
    }
}

/// Theory-mode configuration for a gossip matrix and a target `κ₁`.
pub fn select_parameters(
    problem: &ProblemInstance,
    gossip: &GossipMatrix,
    kappa1_target: f64,
    mixing: &MixingSpec,
) -> Result<(AlgoConfig, LemmaConstants)> {
    let h = prepare_gossip(gossip, mixing)?;
    let bounds = h.bounds();
    let bound = mixing.bind(&h)?;
    let poly_range = polynomial_spectral_range(&bound, &h)?;
    let pl = problem.pl_constant().map(|nu| (nu, problem.n_nodes()));
    let params = theory_chain(&ChainInputs {
        smoothness: problem.smoothness(),
        lambda_h_min: bounds.lambda_min_pos,
        lambda_h_max: bounds.lambda_max,
        kappa1: kappa1_target,
        poly_range,
        pl,
    })?;
    let variant = match mixing {
        MixingSpec::Chebyshev { .. } => Variant::MapProCa,
        MixingSpec::Explicit { .. } => Variant::MapPro,
    };
    let g = GOperator::new(params.zeta, params.eta, mixing, h)?;
    let config = AlgoConfig::new(variant, Mode::Theory, params.rho, params.theta, params.dual_scale, g)?;
    let constants = constants_for(problem, &config)?;
    Ok((config, constants))
}

/// Constants of an arbitrary constant-schedule configuration, evaluated from
/// the actual spectrum of `G`.
pub fn constants_for(problem: &ProblemInstance, config: &AlgoConfig) -> Result<LemmaConstants> {
    let g = config
        .constant_operator()
        .ok_or(Error::UnsupportedDiagnostic("constants need a constant schedule"))?;
    let bounds = config.gossip().bounds();
    Ok(LemmaConstants::evaluate(&ConstantInputs {
        smoothness: problem.smoothness(),
        lambda_h_min: bounds.lambda_min_pos,
        lambda_h_max: bounds.lambda_max,
        rho: config.rho(),
        theta: config.theta(),
        zeta: g.zeta(),
        lambda_hat_g: g.lambda_hat(),
        lambda_low_g: g.lambda_low(),
        dual_scale: config.dual_scale(),
        pl: problem.pl_constant().map(|nu| (nu, problem.n_nodes())),
    }))
}
