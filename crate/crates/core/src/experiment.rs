//! Config-driven experiments: build graph, problem and algorithm from a TOML
//! file, run, and write the trajectory CSV, a JSON summary and a JSON dump of
//! the lemma constants.
//!
//! ```toml
//! name = "ca"
//!
//! [graph]
//! nodes = 20
//! edges = 26
//! seed = 1
//!
//! [problem]
//! kind = "benchmark"
//! seed = 0
//!
//! [algorithm]
//! variant = "map_pro_ca"
//! mode = "tuned"
//! tau = 3
//! zeta = 0.5
//! eta_fraction = 0.9
//! rho = 1.0
//! theta = 1.0
//! dual_scale = 0.3
//!
//! [run]
//! iterations = 3000
//! stop_gap = 1e-6
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algorithm::{
    constants_for, init_state, l_admm_config, prepare_gossip, run, select_parameters, AlgoConfig, LemmaConstants,
    Mode, RunOptions, Trajectory, Variant,
};
use crate::error::{Error, Result};
use crate::graph::{laplacian, random_connected_graph, GossipMatrix, Network, Weighting};
use crate::metrics::{
    check_descent, check_rates, check_sandwich, write_atomic, write_trajectory_csv, DiagnosticOptions, Diagnostics,
};
use crate::mixing::{default_chebyshev_degree, polynomial_spectral_range, GOperator, MixingSpec};
use crate::problems::{generate_benchmark_data, logistic_nonconvex, pl_quadratic, BenchmarkSpec, ProblemInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: Option<String>,
    pub graph: GraphSpec,
    pub problem: ProblemSpec,
    pub algorithm: AlgorithmSpec,
    pub run: RunSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Either a random connected graph (`edges`) or an edge-list file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub nodes: usize,
    pub edges: Option<usize>,
    pub edge_list: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_weighting")]
    pub weighting: Weighting,
}

fn default_weighting() -> Weighting {
    Weighting::Uniform
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Benchmark {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default = "default_mu")]
        mu: f64,
        #[serde(default)]
        seed: u64,
    },
    PlQuadratic {
        dim: usize,
        rank: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_dim() -> usize {
    BenchmarkSpec::default().dim
}
fn default_samples() -> usize {
    BenchmarkSpec::default().samples
}
fn default_lambda() -> f64 {
    BenchmarkSpec::default().lambda
}
fn default_mu() -> f64 {
    BenchmarkSpec::default().mu
}

impl ProblemSpec {
    pub fn seed(&self) -> u64 {
        match self {
            ProblemSpec::Benchmark { seed, .. } | ProblemSpec::PlQuadratic { seed, .. } => *seed,
        }
    }
}

/// Algorithm choice and parameters.
///
/// Theory mode derives everything from `kappa1`. Tuned MAP-Pro variants take
/// `zeta`, `rho`, `theta`, `dual_scale` and one of `eta` or `eta_fraction`
/// (a fraction of the largest admissible `ζ/λ̄_P`). L-ADMM takes `gamma`,
/// `alpha`, `beta` and is always tuned.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub variant: Option<Variant>,
    #[serde(default)]
    pub mode: Mode,
    pub tau: Option<usize>,
    pub coefficients: Option<Vec<f64>>,
    pub kappa1: Option<f64>,
    pub zeta: Option<f64>,
    pub eta: Option<f64>,
    pub eta_fraction: Option<f64>,
    pub rho: Option<f64>,
    pub theta: Option<f64>,
    pub dual_scale: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitSpec {
    #[default]
    Zero,
    /// Standard normal entries scaled by `init_scale`.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub iterations: usize,
    pub stop_gap: Option<f64>,
    pub round_budget: Option<u64>,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default)]
    pub init_seed: u64,
    #[serde(default = "one")]
    pub init_scale: f64,
    /// Record `V` and `Ṽ` and check the theorems (needs a known `f*`).
    #[serde(default)]
    pub lyapunov: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    /// File stem; defaults to the experiment name.
    pub prefix: Option<String>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: default_out_dir(),
            prefix: None,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(p) = &cfg.graph.edge_list {
            cfg.graph.edge_list = Some(base.join(p));
        }
        cfg.output.dir = base.join(&cfg.output.dir);
        if let Some(p) = &cfg.graph.edge_list {
            if !p.exists() {
                return Err(Error::config(format!("edge list {} does not exist", p.display())));
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.graph.edges.is_some() == self.graph.edge_list.is_some() {
            return Err(Error::config("graph needs exactly one of `edges` or `edge_list`"));
        }
        if self.algorithm.variant.is_none() {
            return Err(Error::config("algorithm.variant is required"));
        }
        if self.run.iterations == 0 {
            return Err(Error::config("run.iterations must be at least 1"));
        }
        Ok(())
    }

    pub fn variant(&self) -> Variant {
        self.algorithm.variant.unwrap_or(Variant::MapPro)
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.variant().name().to_string())
    }
}

/// A fully constructed experiment ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub network: Network,
    /// The unscaled gossip matrix; optimality gaps are measured against it.
    pub gossip: Arc<GossipMatrix>,
    pub problem: ProblemInstance,
    pub algo: AlgoConfig,
    pub constants: Option<LemmaConstants>,
}

fn build_network(spec: &GraphSpec) -> Result<Network> {
    match (&spec.edge_list, spec.edges) {
        (Some(path), _) => Network::read_edge_list(path, Some(spec.nodes)),
        (None, Some(e)) => random_connected_graph(spec.nodes, e, spec.seed),
        (None, None) => Err(Error::config("graph needs `edges` or `edge_list`")),
    }
}

fn build_problem(spec: &ProblemSpec, n_nodes: usize) -> Result<ProblemInstance> {
    match *spec {
        ProblemSpec::Benchmark {
            dim,
            samples,
            lambda,
            mu,
            seed,
        } => logistic_nonconvex(&generate_benchmark_data(&BenchmarkSpec {
            n_nodes,
            dim,
            samples,
            lambda,
            mu,
            seed,
        })),
        ProblemSpec::PlQuadratic { dim, rank, seed } => pl_quadratic(n_nodes, dim, rank, seed),
    }
}

fn mixing_spec(alg: &AlgorithmSpec, variant: Variant, gossip: &GossipMatrix) -> Result<MixingSpec> {
    match variant {
        Variant::MapProCa => {
            if alg.coefficients.is_some() {
                return Err(Error::config("map_pro_ca uses Chebyshev mixing; drop `coefficients`"));
            }
            let degree = alg.tau.unwrap_or_else(|| default_chebyshev_degree(gossip.bounds().kappa2));
            Ok(MixingSpec::Chebyshev { degree })
        }
        _ => match (&alg.coefficients, alg.tau) {
            (Some(c), tau) => {
                if tau.is_some_and(|t| t != c.len()) {
                    return Err(Error::config("`tau` disagrees with the number of coefficients"));
                }
                Ok(MixingSpec::Explicit { coefficients: c.clone() })
            }
            (None, Some(t)) => Ok(MixingSpec::uniform(t)),
            (None, None) => Ok(MixingSpec::identity()),
        },
    }
}

fn required(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::config(format!("tuned mode needs `algorithm.{name}`")))
}

fn build_algorithm(
    alg: &AlgorithmSpec,
    variant: Variant,
    problem: &ProblemInstance,
    gossip: &Arc<GossipMatrix>,
) -> Result<(AlgoConfig, LemmaConstants)> {
    if variant == Variant::LAdmm {
        if alg.mode == Mode::Theory {
            return Err(Error::config("l_admm runs in tuned mode; set `mode = \"tuned\"`"));
        }
        let cfg = l_admm_config(
            required(alg.gamma, "gamma")?,
            required(alg.alpha, "alpha")?,
            required(alg.beta, "beta")?,
            gossip.clone(),
        )?;
        let c = constants_for(problem, &cfg)?;
        return Ok((cfg, c));
    }
    let mixing = mixing_spec(alg, variant, gossip)?;
    match alg.mode {
        Mode::Theory => select_parameters(problem, gossip, alg.kappa1.unwrap_or(1.0), &mixing),
        Mode::Tuned => {
            let h = prepare_gossip(gossip, &mixing)?;
            let zeta = required(alg.zeta, "zeta")?;
            let eta = match (alg.eta, alg.eta_fraction) {
                (Some(e), None) => e,
                (None, Some(frac)) => {
                    let range = polynomial_spectral_range(&mixing.bind(&h)?, &h)?;
                    frac * zeta / range.1
                }
                (None, None) => 0.0,
                (Some(_), Some(_)) => return Err(Error::config("give `eta` or `eta_fraction`, not both")),
            };
            let g = GOperator::new(zeta, eta, &mixing, h)?;
            let cfg = AlgoConfig::new(
                variant,
                Mode::Tuned,
                required(alg.rho, "rho")?,
                required(alg.theta, "theta")?,
                required(alg.dual_scale, "dual_scale")?,
                g,
            )?;
            let c = constants_for(problem, &cfg)?;
            Ok((cfg, c))
        }
    }
}

impl Experiment {
    pub fn build(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let network = build_network(&config.graph)?;
        let gossip = Arc::new(laplacian(&network, config.graph.weighting));
        let problem = build_problem(&config.problem, network.n_nodes())?;
        let (algo, constants) = build_algorithm(&config.algorithm, config.variant(), &problem, &gossip)?;
        Ok(Experiment {
            config,
            network,
            gossip,
            problem,
            algo,
            constants: Some(constants),
        })
    }

    pub fn initial_point(&self) -> DMatrix<f64> {
        let (n, d) = (self.problem.n_nodes(), self.problem.dim());
        match self.config.run.init {
            InitSpec::Zero => DMatrix::zeros(n, d),
            InitSpec::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.config.run.init_seed);
                let scale = self.config.run.init_scale;
                DMatrix::from_fn(n, d, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
            }
        }
    }

    pub fn diagnostics(&self) -> Result<Diagnostics> {
        Diagnostics::new(
            &self.problem,
            &self.algo,
            self.gossip.clone(),
            self.constants.as_ref(),
            DiagnosticOptions {
                lyapunov: self.config.run.lyapunov,
            },
        )
    }

    /// Runs with the configured stopping rules, optionally overriding the gap threshold.
    pub fn run(&self, stop_gap: Option<f64>) -> Result<Trajectory> {
        let state = init_state(&self.problem, Some(self.initial_point()), None)?;
        let opts = RunOptions {
            iterations: self.config.run.iterations,
            stop_gap: stop_gap.or(self.config.run.stop_gap),
            round_budget: self.config.run.round_budget,
        };
        run(&self.problem, &self.algo, state, &opts, &self.diagnostics()?)
    }

    pub fn constants_dump(&self) -> ConstantsDump {
        let g = self.algo.constant_operator();
        ConstantsDump {
            name: self.config.display_name(),
            variant: self.algo.variant(),
            mode: self.algo.mode(),
            rho: self.algo.rho(),
            theta: self.algo.theta(),
            dual_scale: self.algo.dual_scale(),
            zeta: g.map(|g| g.zeta()),
            eta: g.map(|g| g.eta()),
            tau: g.map(|g| g.degree()),
            smoothness: self.problem.smoothness(),
            constants: self.constants,
            violations: self.constants.map(|c| c.violations()).unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsDump {
    pub name: String,
    pub variant: Variant,
    pub mode: Mode,
    pub rho: f64,
    pub theta: f64,
    pub dual_scale: f64,
    pub zeta: Option<f64>,
    pub eta: Option<f64>,
    pub tau: Option<usize>,
    pub smoothness: f64,
    pub constants: Option<LemmaConstants>,
    /// Theory conditions that fail for these parameters.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub variant: Variant,
    pub mode: Mode,
    pub iterations: usize,
    pub rounds: u64,
    pub initial_gap: f64,
    pub final_gap: f64,
    pub stop_gap: Option<f64>,
    pub reached: bool,
    /// Theorem checks; present for theory-mode runs with Lyapunov diagnostics.
    pub checks: Vec<String>,
}

/// Paths written by [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub trajectory: PathBuf,
    pub summary: PathBuf,
    pub constants: PathBuf,
    pub summary_data: RunSummary,
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s.into_bytes()
}

/// Loads, runs and writes all artifacts. Nothing is written on failure.
pub fn run_experiment(config_path: &Path) -> Result<Artifacts> {
    let exp = Experiment::build(ExperimentConfig::load(config_path)?)?;
    let traj = exp.run(None)?;
    let first = traj.records.first().expect("run records the initial state");
    let last = traj.records.last().expect("run records the initial state");
    let mut checks = Vec::new();
    if let (Mode::Theory, true, Some(c)) = (exp.algo.mode(), exp.config.run.lyapunov, &exp.constants) {
        checks.push(check_descent(&traj.records, c).summary());
        checks.push(check_sandwich(&traj.records, c).summary());
        let rates = check_rates(&traj.records, c);
        checks.push(rates.average_w.summary());
        checks.push(rates.function_gap.summary());
        checks.push(rates.envelope.summary());
    }
    let summary = RunSummary {
        name: exp.config.display_name(),
        variant: exp.algo.variant(),
        mode: exp.algo.mode(),
        iterations: traj.final_state.k,
        rounds: traj.final_state.rounds,
        initial_gap: first.opt_gap,
        final_gap: last.opt_gap,
        stop_gap: exp.config.run.stop_gap,
        reached: traj.reached.is_some(),
        checks,
    };

    let out = &exp.config.output;
    fs::create_dir_all(&out.dir)?;
    let stem = out.prefix.clone().unwrap_or_else(|| exp.config.display_name());
    let paths = Artifacts {
        trajectory: out.dir.join(format!("{stem}.csv")),
        summary: out.dir.join(format!("{stem}.summary.json")),
        constants: out.dir.join(format!("{stem}.constants.json")),
        summary_data: summary,
    };
    write_trajectory_csv(&paths.trajectory, &traj.records)?;
    write_atomic(&paths.summary, &to_json(&paths.summary_data))?;
    write_atomic(&paths.constants, &to_json(&exp.constants_dump()))?;
    Ok(paths)
}

/// Constants for a config without running it.
pub fn constants(config_path: &Path) -> Result<ConstantsDump> {
    Ok(Experiment::build(ExperimentConfig::load(config_path)?)?.constants_dump())
}

pub fn constants_json(dump: &ConstantsDump) -> String {
    String::from_utf8(to_json(dump)).expect("json is utf-8")
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub name: String,
    pub variant: Variant,
    /// `(iterations, rounds)` at the first state with gap at most `ε`.
    pub reached: Option<(usize, u64)>,
    /// Why the run stopped short, when it did.
    pub note: Option<String>,
}

/// Runs every config to gap `ε` and ranks them by communication rounds.
///
/// All configs must share the problem and graph. Runs that diverge or stop
/// short are listed last.
pub fn compare(configs: &[ExperimentConfig], gap: f64) -> Result<Vec<CompareRow>> {
    if configs.len() < 2 {
        return Err(Error::config("compare needs at least two configs"));
    }
    let first = &configs[0];
    for c in &configs[1..] {
        if c.problem != first.problem {
            return Err(Error::Comparability(format!(
                "problem of `{}` (seed {}) differs from `{}` (seed {})",
                c.display_name(),
                c.problem.seed(),
                first.display_name(),
                first.problem.seed()
            )));
        }
        if c.graph != first.graph {
            return Err(Error::Comparability(format!(
                "graph of `{}` differs from `{}`",
                c.display_name(),
                first.display_name()
            )));
        }
    }
    let experiments = configs
        .iter()
        .map(|c| Experiment::build(c.clone()))
        .collect::<Result<Vec<_>>>()?;
    let outcomes: Vec<Result<Trajectory>> = std::thread::scope(|s| {
        let handles: Vec<_> = experiments.iter().map(|e| s.spawn(move || e.run(Some(gap)))).collect();
        handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
    });
    let mut rows = Vec::with_capacity(configs.len());
    for (exp, outcome) in experiments.iter().zip(outcomes) {
        let (reached, note) = match outcome {
            Ok(t) => match t.reached {
                Some(i) => (Some((t.records[i].k, t.records[i].rounds)), None),
                None => (None, Some(format!("did not reach {gap:e}"))),
            },
            Err(e @ Error::Divergence { .. }) => (None, Some(format!("did not reach {gap:e}: {e}"))),
            Err(e) => return Err(e),
        };
        rows.push(CompareRow {
            name: exp.config.display_name(),
            variant: exp.algo.variant(),
            reached,
            note,
        });
    }
    rows.sort_by(|a, b| match (a.reached, b.reached) {
        (Some(x), Some(y)) => x.1.cmp(&y.1).then_with(|| a.name.cmp(&b.name)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.name.cmp(&b.name),
    });
    Ok(rows)
}

/// Plain-text ranking table.
pub fn format_table(rows: &[CompareRow], gap: f64) -> String {
    let mut out = format!("{:<4} {:<20} {:<12} {:>10} {:>10}\n", "rank", "name", "variant", "iters", "rounds");
    for (i, r) in rows.iter().enumerate() {
        match r.reached {
            Some((k, rounds)) => {
                out += &format!("{:<4} {:<20} {:<12} {:>10} {:>10}\n", i + 1, r.name, r.variant.name(), k, rounds);
            }
            None => {
                out += &format!(
                    "{:<4} {:<20} {:<12} did not reach {gap:e}\n",
                    i + 1,
                    r.name,
                    r.variant.name()
                );
            }
        }
    }
    out
}
