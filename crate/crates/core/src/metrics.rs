//! Diagnostics: optimality gap, consensus error, `W`, the Lyapunov functions
//! `V`, `Ṽ`, `V̂`, and checks of the descent and rate inequalities.
//!
//! With `x̄` the node average, `K = (I - 11ᵀ/N) ⊗ I_d`, `L = I - K`,
//! `g = ∇f̃(x)`, `g₀ = ∇f̃(1 ⊗ x̄)` and `s = q + g₀/θ`:
//!
//! ```text
//! W  = ‖x‖²_K + ‖s‖²_K + ‖Lg‖² + ‖Lg₀‖²
//! V  = ½‖x‖²_K + ½ sᵀ((θ/ρ)H† + K)s + ⟨x, Ks⟩ + f(x̄) - f*
//! Ṽ  = V - λ̂_G(ε₁ + ε₂λ̂_G)‖x‖²_K
//! V̂  = ‖x‖²_K + ‖s‖²_K + f(x̄) - f*
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algorithm::{AlgoConfig, AlgoState, LemmaConstants};
use crate::error::{Error, Result};
use crate::graph::GossipMatrix;
use crate::linalg::{broadcast, consensus_part, disagreement_part, dot, node_average, quad_form, sym_pinv, Stacked};
use crate::problems::ProblemInstance;

/// Relative slack for the descent and sandwich checks.
pub const CHECK_SLACK: f64 = 1e-9;

/// One row of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub k: usize,
    pub rounds: u64,
    pub opt_gap: f64,
    pub consensus_err: f64,
    pub w: f64,
    pub v: Option<f64>,
    pub v_tilde: Option<f64>,
    pub v_hat: Option<f64>,
    pub fgap: Option<f64>,
    pub s_norm: f64,
}

/// `‖L∇f̃(x)‖² + xᵀHx`.
///
/// The gradient enters through its consensus component `L∇f̃(x)`, which is
/// `1 ⊗ (1/N)Σ_i ∇f_i(x_i)`. The unprojected `‖∇f̃(x)‖²` stays bounded away
/// from zero at consensual stationary points whenever local costs differ.
pub fn optimality_gap(x: &Stacked, problem: &ProblemInstance, h: &GossipMatrix) -> Result<f64> {
    let g = problem.stacked_gradient(x)?;
    Ok(consensus_part(&g).norm_squared() + quad_form(h.dense(), x).max(0.0))
}

/// `‖x - 1⊗x̄‖²`.
pub fn consensus_error(x: &Stacked) -> f64 {
    disagreement_part(x).norm_squared()
}

/// Gradient at the broadcast average, `∇f̃(1 ⊗ x̄)`.
fn averaged_gradient(x: &Stacked, problem: &ProblemInstance) -> Result<Stacked> {
    problem.stacked_gradient(&broadcast(&node_average(x), x.nrows()))
}

/// `s = q + ∇f̃(1⊗x̄)/θ`.
pub fn s_vector(state: &AlgoState, problem: &ProblemInstance, theta: f64) -> Result<Stacked> {
    Ok(&state.q + averaged_gradient(&state.x, problem)? / theta)
}

/// `W = ‖x‖²_K + ‖s‖²_K + ‖Lg‖² + ‖Lg₀‖²`.
pub fn w_metric(state: &AlgoState, problem: &ProblemInstance, theta: f64) -> Result<f64> {
    let g = problem.stacked_gradient(&state.x)?;
    let g0 = averaged_gradient(&state.x, problem)?;
    let s = &state.q + &g0 / theta;
    Ok(consensus_error(&state.x)
        + disagreement_part(&s).norm_squared()
        + consensus_part(&g).norm_squared()
        + consensus_part(&g0).norm_squared())
}

/// What to compute for each recorded state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DiagnosticOptions {
    /// Compute `V` and `Ṽ` (needs `H†`, `f*` and the lemma constants).
    pub lyapunov: bool,
}

/// Precomputed context for evaluating [`DiagnosticsRecord`]s.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    problem: ProblemInstance,
    gap_matrix: Arc<GossipMatrix>,
    rho: f64,
    theta: f64,
    lyapunov: Option<(DMatrix<f64>, f64, f64)>,
}

impl Diagnostics {
    /// The optimality gap uses `gap_matrix`, which may differ from the matrix
    /// the algorithm runs on so that runs with different scalings compare.
    pub fn new(
        problem: &ProblemInstance,
        config: &AlgoConfig,
        gap_matrix: Arc<GossipMatrix>,
        constants: Option<&LemmaConstants>,
        options: DiagnosticOptions,
    ) -> Result<Self> {
        if gap_matrix.n_nodes() != problem.n_nodes() {
            return Err(Error::dims("gap matrix", problem.n_nodes(), gap_matrix.n_nodes()));
        }
        let lyapunov = if options.lyapunov {
            let f_star = problem
                .f_star()
                .ok_or(Error::UnsupportedDiagnostic("V needs the optimal value f*"))?;
            let c = constants.ok_or(Error::UnsupportedDiagnostic("Ṽ needs the lemma constants"))?;
            let pinv = sym_pinv(config.gossip().dense(), crate::graph::ZERO_EIG_REL_TOL);
            Some((pinv, f_star, c.v_tilde_coefficient()))
        } else {
            None
        };
        Ok(Diagnostics {
            problem: problem.clone(),
            gap_matrix,
            rho: config.rho(),
            theta: config.theta(),
            lyapunov,
        })
    }

    pub fn record(&self, state: &AlgoState) -> Result<DiagnosticsRecord> {
        let p = &self.problem;
        let x = &state.x;
        let g = p.stacked_gradient(x)?;
        let xbar = node_average(x);
        let g0 = p.stacked_gradient(&broadcast(&xbar, x.nrows()))?;
        let s = &state.q + &g0 / self.theta;
        let kx = disagreement_part(x);
        let ks = disagreement_part(&s);
        let x_k = kx.norm_squared();
        let s_k = ks.norm_squared();
        let lg = consensus_part(&g).norm_squared();
        let w = x_k + s_k + lg + consensus_part(&g0).norm_squared();
        let opt_gap = lg + quad_form(self.gap_matrix.dense(), x).max(0.0);
        let fgap = p.f_star().map(|fs| p.global_value(&xbar) - fs);
        let v_hat = fgap.map(|fg| x_k + s_k + fg);
        let (v, v_tilde) = match (&self.lyapunov, fgap) {
            (Some((pinv, _, coef)), Some(fg)) => {
                let h_dag = quad_form(pinv, &s) * self.theta / self.rho;
                let v = 0.5 * x_k + 0.5 * (h_dag + s_k) + dot(&kx, &ks) + fg;
                (Some(v), Some(v - coef * x_k))
            }
            _ => (None, None),
        };
        Ok(DiagnosticsRecord {
            k: state.k,
            rounds: state.rounds,
            opt_gap,
            consensus_err: x_k,
            w,
            v,
            v_tilde,
            v_hat,
            fgap,
            s_norm: s_k,
        })
    }
}

/// First failure and count of an inequality check over a trajectory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    /// `(k, lhs, rhs)` of the first violation.
    pub first_violation: Option<(usize, f64, f64)>,
    pub skipped: Option<String>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        CheckReport {
            name: name.into(),
            ..Default::default()
        }
    }

    fn skipped(name: &str, why: &str) -> Self {
        CheckReport {
            name: name.into(),
            skipped: Some(why.into()),
            ..Default::default()
        }
    }

    fn check(&mut self, k: usize, lhs: f64, rhs: f64) {
        self.checked += 1;
        if !(lhs <= rhs) {
            self.violations += 1;
            self.first_violation.get_or_insert((k, lhs, rhs));
        }
    }

    pub fn passed(&self) -> bool {
        self.skipped.is_none() && self.violations == 0 && self.checked > 0
    }

    pub fn summary(&self) -> String {
        match (&self.skipped, self.first_violation) {
            (Some(why), _) => format!("{}: skipped ({why})", self.name),
            (None, None) => format!("{}: ok over {} checks", self.name, self.checked),
            (None, Some((k, l, r))) => format!(
                "{}: {} of {} checks failed, first at k = {k} ({l:e} > {r:e})",
                self.name, self.violations, self.checked
            ),
        }
    }
}

fn lyapunov_rows(records: &[DiagnosticsRecord]) -> Option<Vec<(f64, f64)>> {
    records.iter().map(|r| Some((r.v_tilde?, r.v_hat?))).collect()
}

/// `Ṽᵏ⁺¹ - Ṽᵏ ≤ -δ₂Wᵏ + slack` for consecutive records.
pub fn check_descent(records: &[DiagnosticsRecord], constants: &LemmaConstants) -> CheckReport {
    let name = "descent";
    let Some(rows) = lyapunov_rows(records) else {
        return CheckReport::skipped(name, "Lyapunov diagnostics not recorded");
    };
    let mut rep = CheckReport::new(name);
    for (i, pair) in rows.windows(2).enumerate() {
        let (vt, vt_next) = (pair[0].0, pair[1].0);
        let slack = CHECK_SLACK * (1.0 + vt.abs());
        rep.check(records[i].k, vt_next - vt, -constants.delta2 * records[i].w + slack);
    }
    rep
}

/// `δ₃V̂ ≤ Ṽ ≤ δ₁V̂` at every record.
pub fn check_sandwich(records: &[DiagnosticsRecord], constants: &LemmaConstants) -> CheckReport {
    let name = "sandwich";
    let Some(rows) = lyapunov_rows(records) else {
        return CheckReport::skipped(name, "Lyapunov diagnostics not recorded");
    };
    let mut rep = CheckReport::new(name);
    for (rec, (vt, vh)) in records.iter().zip(rows) {
        let slack = CHECK_SLACK * (1.0 + vh.abs());
        rep.check(rec.k, constants.delta3 * vh, vt + slack);
        rep.check(rec.k, vt, constants.delta1 * vh + slack);
    }
    rep
}

/// Rate checks over a trajectory starting at `k = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// Running average of `W` against `δ₁V̂⁰/(δ₂(T+1))`.
    pub average_w: CheckReport,
    /// `f(x̄) - f* ≤ δ₁V̂⁰`.
    pub function_gap: CheckReport,
    /// `‖x - x̄‖² + f(x̄) - f* ≤ (1-δ)ᵏ(δ₁/δ₃)V̂⁰`.
    pub envelope: CheckReport,
    /// `exp` of the least-squares slope of `log(‖x - x̄‖² + f(x̄) - f*)` over
    /// the second half of the trajectory.
    pub fitted_ratio: Option<f64>,
}

pub fn check_rates(records: &[DiagnosticsRecord], constants: &LemmaConstants) -> RateReport {
    let Some(v_hat0) = records.first().and_then(|r| r.v_hat) else {
        let why = "f* unknown";
        return RateReport {
            average_w: CheckReport::skipped("average_w", why),
            function_gap: CheckReport::skipped("function_gap", why),
            envelope: CheckReport::skipped("envelope", why),
            fitted_ratio: None,
        };
    };
    let (d1, d2, d3) = (constants.delta1, constants.delta2, constants.delta3);
    let slack = |v: f64| CHECK_SLACK * (1.0 + v.abs());

    let mut average_w = CheckReport::new("average_w");
    let mut running = 0.0;
    for (t, rec) in records.iter().enumerate() {
        running += rec.w;
        let denom = (t + 1) as f64;
        average_w.check(rec.k, running / denom, d1 * v_hat0 / (d2 * denom) + slack(v_hat0));
    }

    let mut function_gap = CheckReport::new("function_gap");
    for rec in records {
        if let Some(fg) = rec.fgap {
            function_gap.check(rec.k, fg, d1 * v_hat0 + slack(v_hat0));
        }
    }

    let envelope = match constants.delta {
        None => CheckReport::skipped("envelope", "no P-Ł constant for this problem"),
        Some(delta) => {
            let mut rep = CheckReport::new("envelope");
            for rec in records {
                if let Some(fg) = rec.fgap {
                    let bound = (1.0 - delta).powi(rec.k as i32) * d1 / d3 * v_hat0;
                    rep.check(rec.k, rec.consensus_err + fg, bound + slack(bound));
                }
            }
            rep
        }
    };

    RateReport {
        average_w,
        function_gap,
        envelope,
        fitted_ratio: fitted_decay_ratio(records),
    }
}

/// Per-iteration decay ratio of `‖x - x̄‖² + f(x̄) - f*` fitted on the tail.
pub fn fitted_decay_ratio(records: &[DiagnosticsRecord]) -> Option<f64> {
    let tail = &records[records.len() / 2..];
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .filter_map(|r| {
            let e = r.consensus_err + r.fgap?;
            (e > 0.0).then(|| (r.k as f64, e.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

pub const CSV_HEADER: &str = "k,rounds,opt_gap,consensus_err,W,V,Vtilde,Vhat,fgap,s_norm";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(mut w: W, records: &[DiagnosticsRecord]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{:.16e},{:.16e},{:.16e},{},{},{},{},{:.16e}",
            r.k,
            r.rounds,
            r.opt_gap,
            r.consensus_err,
            r.w,
            fmt_opt(r.v),
            fmt_opt(r.v_tilde),
            fmt_opt(r.v_hat),
            fmt_opt(r.fgap),
            r.s_norm
        )?;
    }
    Ok(())
}

/// Writes `contents` next to `path` and renames it into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    fs::write(tmp, contents)?;
    fs::rename(tmp, path)?;
    Ok(())
}

pub fn write_trajectory_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records)?;
    write_atomic(path, &buf)
}
