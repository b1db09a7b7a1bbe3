use std::path::PathBuf;

use clap::{ArgGroup, Args};
use rand::Rng;
use serde::Serialize;
use torpid_core::analysis::{
    self, assess_barrier, cut_conductance, exact_mixing_time, mass, CutSpec, EscapeConfig,
    EscapeSummary, StartSide, TorpidBound,
};
use torpid_core::chains::{ExactTransitionMatrix, KernelName};
use torpid_core::graphs::{self, BipartiteGraph, CounterexampleGraph};
use torpid_core::report::{ratio_to_f64, RationalJson};
use torpid_core::semantics::{self, EnumerationLimits, SigmaSide};
use torpid_core::{rng, Error};

use crate::output::{verdict, write_csv, write_report, write_text};
use crate::source::{parse_list, GraphSource};
use crate::{CommonArgs, Failure};

type CmdResult = Result<(), Failure>;

fn limits(c: &CommonArgs) -> EnumerationLimits {
    EnumerationLimits {
        max_pair_bits: c.limit_pair_bits,
        max_edges: c.limit_edges,
        max_states: c.limit_states,
        ..EnumerationLimits::default()
    }
}

fn source(s: &str) -> Result<GraphSource, Failure> {
    s.parse::<GraphSource>().map_err(Failure::Usage)
}

fn kernel(s: &str) -> Result<KernelName, Failure> {
    s.parse::<KernelName>().map_err(Failure::from)
}

fn positive(value: u64, what: &str) -> CmdResult {
    if value == 0 {
        return Err(Failure::Usage(format!("{what} must be positive")));
    }
    Ok(())
}

#[derive(Serialize)]
struct Rational {
    exact: RationalJson,
    #[serde(serialize_with = "torpid_core::report::fixed")]
    approx: f64,
}

impl From<&torpid_core::BigRational> for Rational {
    fn from(r: &torpid_core::BigRational) -> Self {
        Rational {
            exact: r.into(),
            approx: ratio_to_f64(r),
        }
    }
}

// ---------------------------------------------------------------- generate

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    /// counterexample:N[:M], complete:K, complete:A,B, random:U,V,P or a file.
    #[arg(long)]
    pub graph: String,
    /// Where to write the graph text (default <out-dir>/graph.txt).
    #[arg(long)]
    #[serde(skip)]
    pub graph_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CounterexampleInfo {
    n: usize,
    m: usize,
    satisfies_size_relation: bool,
    alpha: Rational,
    omega_low_mass: Rational,
}

#[derive(Serialize)]
struct GenerateResult {
    u: usize,
    v: usize,
    e: usize,
    counterexample: Option<CounterexampleInfo>,
}

pub fn generate(c: &CommonArgs, a: &GenerateArgs) -> CmdResult {
    let loaded = source(&a.graph)?.load(c.seed)?;
    let text = match &loaded.counterexample {
        Some(g) => graphs::serialize_counterexample(g),
        None => graphs::serialize_graph(&loaded.graph),
    };
    let path = a.graph_out.clone().unwrap_or_else(|| c.out_dir.join("graph.txt"));
    write_text(&path, &text)?;
    println!("{}", path.display());
    let g = &loaded.graph;
    let result = GenerateResult {
        u: g.u_count(),
        v: g.v_count(),
        e: g.edge_count(),
        counterexample: loaded.counterexample.as_ref().map(|ce| CounterexampleInfo {
            n: ce.n(),
            m: ce.m(),
            satisfies_size_relation: ce.satisfies_size_relation(),
            alpha: (&semantics::alpha(ce.n(), ce.m())).into(),
            omega_low_mass: (&analysis::omega_low_mass_exact(ce)).into(),
        }),
    };
    write_report(c, "generate", a, None, &result)
}

// ---------------------------------------------------------- verify-marginals

#[derive(Args, Debug, Serialize)]
pub struct VerifyMarginalsArgs {
    /// Number of random graphs.
    #[arg(long, default_value_t = 50)]
    pub graphs: usize,
    /// Largest |U| + |V| of a random graph.
    #[arg(long, default_value_t = 10)]
    pub max_vertices: usize,
    /// Edge probability of the random graphs.
    #[arg(long, default_value_t = 0.5)]
    pub edge_prob: f64,
    /// Also check K_{1,1}, K_{2,2} and G_2.
    #[arg(long)]
    pub standard: bool,
}

#[derive(Serialize)]
struct MarginalRow {
    label: String,
    u: usize,
    v: usize,
    e: usize,
    /// Vertex marginal equals the trace of a uniform independent set.
    passes: bool,
    /// Closed-form vertex marginal equals pair enumeration (when enumerable).
    sigma_matches_pairs: Option<bool>,
    /// Rank form of the edge marginal equals pair enumeration (when enumerable).
    omega_matches_pairs: Option<bool>,
}

fn marginal_row(label: String, g: &BipartiteGraph, lim: &EnumerationLimits) -> Result<MarginalRow, Failure> {
    let passes = semantics::marginal_equivalence_check(g, lim)?;
    let pair_ok = g.u_count() + g.edge_count() <= lim.max_pair_bits;
    let sigma_matches_pairs = if pair_ok {
        Some(semantics::exact_pi_sigma(g, lim)? == semantics::exact_pi_sigma_by_pairs(g, lim)?)
    } else {
        None
    };
    let omega_matches_pairs = if pair_ok && g.edge_count() <= lim.max_edges {
        Some(semantics::exact_pi_omega(g, lim)?.same_distribution(&semantics::exact_pi_omega_by_pairs(g, lim)?))
    } else {
        None
    };
    Ok(MarginalRow {
        label,
        u: g.u_count(),
        v: g.v_count(),
        e: g.edge_count(),
        passes,
        sigma_matches_pairs,
        omega_matches_pairs,
    })
}

#[derive(Serialize)]
struct MarginalResult {
    checked: usize,
    failures: usize,
    graphs: Vec<MarginalRow>,
}

pub fn verify_marginals(c: &CommonArgs, a: &VerifyMarginalsArgs) -> CmdResult {
    positive(a.graphs as u64, "--graphs")?;
    if a.max_vertices < 2 {
        return Err(Failure::Usage("--max-vertices must be at least 2".into()));
    }
    if !(0.0..=1.0).contains(&a.edge_prob) {
        return Err(Failure::Usage("--edge-prob must lie in [0, 1]".into()));
    }
    let lim = limits(c);
    let mut rows = Vec::new();
    if a.standard {
        for (label, g) in [
            ("K11", BipartiteGraph::complete(1)?),
            ("K22", BipartiteGraph::complete(2)?),
            ("G2", CounterexampleGraph::new(2)?.graph().clone()),
        ] {
            rows.push(marginal_row(label.into(), &g, &lim)?);
        }
    }
    let mut r = rng::master(c.seed);
    for i in 0..a.graphs {
        let u = r.gen_range(1..a.max_vertices);
        let v = r.gen_range(1..=a.max_vertices - u);
        let g = BipartiteGraph::random(u, v, a.edge_prob, &mut r);
        rows.push(marginal_row(format!("random-{i}"), &g, &lim)?);
    }
    let failures = rows
        .iter()
        .filter(|r| !r.passes || r.sigma_matches_pairs == Some(false) || r.omega_matches_pairs == Some(false))
        .count();
    let result = MarginalResult {
        checked: rows.len(),
        failures,
        graphs: rows,
    };
    write_report(c, "verify-marginals", a, Some(failures == 0), &result)?;
    verdict(failures == 0, &format!("{failures} graphs failed the marginal check"))
}

// -------------------------------------------------- verify-consistency-counts

#[derive(Args, Debug, Serialize)]
pub struct VerifyCountsArgs {
    /// Corpus size.
    #[arg(long, default_value_t = 200)]
    pub graphs: usize,
    #[arg(long, default_value_t = 4)]
    pub max_u: usize,
    #[arg(long, default_value_t = 3)]
    pub max_v: usize,
    #[arg(long, default_value_t = 10)]
    pub max_edges: usize,
}

#[derive(Serialize)]
struct CountRow {
    index: usize,
    u: usize,
    v: usize,
    e: usize,
    vertex_subsets: usize,
    edge_subsets: usize,
    vertex_mismatches: usize,
    edge_mismatches: usize,
}

#[derive(Serialize)]
struct CountResult {
    checked: usize,
    identities_checked: usize,
    failures: usize,
    graphs: Vec<CountRow>,
}

pub fn verify_counts(c: &CommonArgs, a: &VerifyCountsArgs) -> CmdResult {
    positive(a.graphs as u64, "--graphs")?;
    if a.max_u == 0 || a.max_v == 0 {
        return Err(Failure::Usage("--max-u and --max-v must be positive".into()));
    }
    let lim = limits(c);
    let corpus = graphs::random_corpus(a.graphs, a.max_u, a.max_v, a.max_edges, &mut rng::master(c.seed))?;
    let mut rows = Vec::with_capacity(corpus.len());
    for (index, g) in corpus.iter().enumerate() {
        let r = semantics::consistency_count_check(g, &lim)?;
        rows.push(CountRow {
            index,
            u: g.u_count(),
            v: g.v_count(),
            e: g.edge_count(),
            vertex_subsets: r.vertex_subsets_checked,
            edge_subsets: r.edge_subsets_checked,
            vertex_mismatches: r.vertex_mismatches.len(),
            edge_mismatches: r.edge_mismatches.len(),
        });
    }
    let failures = rows
        .iter()
        .filter(|r| r.vertex_mismatches + r.edge_mismatches > 0)
        .count();
    let result = CountResult {
        checked: rows.len(),
        identities_checked: rows.iter().map(|r| r.vertex_subsets + r.edge_subsets).sum(),
        failures,
        graphs: rows,
    };
    write_report(c, "verify-consistency-counts", a, Some(failures == 0), &result)?;
    verdict(failures == 0, &format!("{failures} graphs violate a count identity"))
}

// ------------------------------------------------------------------ mixing

#[derive(Args, Debug, Serialize)]
pub struct MixingArgs {
    #[arg(long)]
    pub graph: String,
    /// single-site, bond-flip or sw.
    #[arg(long, default_value = "bond-flip")]
    pub kernel: String,
    /// Step budget per start state.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
}

#[derive(Serialize)]
struct BarrierComparison {
    cut: String,
    swapped: bool,
    pi_s: Rational,
    pi_c: Rational,
    no_crossing: bool,
    /// `π(S) / (8 π(C))`; `None` for an empty barrier.
    bound: Option<Rational>,
    admissible: bool,
    /// `τ >= bound`, when both are defined.
    respected: Option<bool>,
}

#[derive(Serialize)]
struct MixingResult {
    kernel: KernelName,
    states: usize,
    max_step_distance: usize,
    stationary_verified: bool,
    detailed_balance: bool,
    tau: Option<u64>,
    censored_starts: usize,
    budget: u64,
    stationary: Vec<RationalJson>,
    barrier: Option<BarrierComparison>,
}

pub fn mixing(c: &CommonArgs, a: &MixingArgs) -> CmdResult {
    positive(a.budget, "--budget")?;
    let k = kernel(&a.kernel)?;
    let loaded = source(&a.graph)?.load(c.seed)?;
    let lim = limits(c);
    let (p, pi) = ExactTransitionMatrix::with_target(k, &loaded.graph, &lim)?;
    let stationary_verified = p.is_stationary(&pi);
    let pi_f: Vec<f64> = pi.iter().map(ratio_to_f64).collect();
    let report = exact_mixing_time(&p.to_sparse_f64(), &pi_f, a.budget)?;
    let barrier = match (&loaded.counterexample, k) {
        (Some(g), KernelName::BondFlip) => {
            let cut = CutSpec::omega_weight_cut(g, p.masks());
            let c_set = cut.barrier.clone().expect("weight cut has a barrier");
            let b = assess_barrier(&p, &pi, &cut.in_s, &c_set);
            let respected = match (&b.bound, report.tau) {
                (Some(bound), Some(tau)) if b.no_crossing => Some(bound.is_respected_by(tau)),
                _ => None,
            };
            Some(BarrierComparison {
                cut: cut.name.clone(),
                swapped: b.swapped,
                pi_s: (&b.pi_s).into(),
                pi_c: (&b.pi_c).into(),
                no_crossing: b.no_crossing,
                bound: match &b.bound {
                    Some(TorpidBound::Finite(x)) => Some(x.into()),
                    _ => None,
                },
                admissible: b.admissible(),
                respected,
            })
        }
        _ => None,
    };
    let passed = stationary_verified && barrier.as_ref().and_then(|b| b.respected).unwrap_or(true);
    let result = MixingResult {
        kernel: k,
        states: p.num_states(),
        max_step_distance: p.cautiousness_report().d_observed,
        stationary_verified,
        detailed_balance: p.satisfies_detailed_balance(&pi),
        tau: report.tau,
        censored_starts: report.censored_starts,
        budget: a.budget,
        stationary: pi.iter().map(RationalJson::from).collect(),
        barrier,
    };
    write_report(c, "mixing", a, Some(passed), &result)?;
    verdict(passed, "stationarity or the barrier bound failed")
}

// ------------------------------------------------------------- conductance

#[derive(Args, Debug, Serialize)]
pub struct ConductanceArgs {
    /// A counterexample graph.
    #[arg(long)]
    pub graph: String,
    #[arg(long, default_value = "bond-flip")]
    pub kernel: String,
}

#[derive(Serialize)]
struct ConductanceResult {
    kernel: KernelName,
    cut: String,
    states: usize,
    pi_s: Rational,
    pi_t: Rational,
    conductance: Rational,
}

pub fn conductance(c: &CommonArgs, a: &ConductanceArgs) -> CmdResult {
    let k = kernel(&a.kernel)?;
    let g = source(&a.graph)?.load_counterexample(c.seed)?;
    let (p, pi) = ExactTransitionMatrix::with_target(k, g.graph(), &limits(c))?;
    let cut = match k {
        KernelName::BondFlip => CutSpec::omega_weight_cut(&g, p.masks()),
        KernelName::Sw => CutSpec::sigma_cut(&g, p.masks()),
        KernelName::SingleSite => {
            // U' occupies the lowest bits of the U ∪ V layout
            let u_prime = (1u64 << g.n()) - 1;
            CutSpec::from_predicates("independent-set-trace", p.masks(), |x| x & u_prime == 0, None)
        }
    };
    let phi = cut_conductance(&p, &pi, &cut)?;
    let t: Vec<bool> = cut.in_s.iter().map(|b| !b).collect();
    let result = ConductanceResult {
        kernel: k,
        cut: cut.name.clone(),
        states: p.num_states(),
        pi_s: (&mass(&pi, &cut.in_s)).into(),
        pi_t: (&mass(&pi, &t)).into(),
        conductance: (&phi).into(),
    };
    write_report(c, "conductance", a, None, &result)
}

// ----------------------------------------------------------------- barrier

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("target").required(true).args(["graph", "n_sweep"])))]
pub struct BarrierArgs {
    #[arg(long)]
    pub graph: Option<String>,
    /// Comma-separated values of n.
    #[arg(long)]
    pub n_sweep: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Serialize)]
struct BarrierRow {
    n: usize,
    m: usize,
    trials: u64,
    hits: u64,
    estimate: f64,
    wilson_low: f64,
    wilson_high: f64,
    ceiling: f64,
}

fn targets(c: &CommonArgs, graph: &Option<String>, sweep: &Option<String>) -> Result<Vec<CounterexampleGraph>, Failure> {
    match (graph, sweep) {
        (Some(g), None) => Ok(vec![source(g)?.load_counterexample(c.seed)?]),
        (None, Some(s)) => parse_list(s)?
            .into_iter()
            .map(|n| CounterexampleGraph::new(n).map_err(Failure::from))
            .collect(),
        _ => Err(Failure::Usage("give exactly one of --graph and --n-sweep".into())),
    }
}

pub fn barrier(c: &CommonArgs, a: &BarrierArgs) -> CmdResult {
    positive(a.trials, "--trials")?;
    let lim = limits(c);
    let reports = targets(c, &a.graph, &a.n_sweep)?
        .iter()
        .map(|g| analysis::barrier_mass(g, a.trials, c.seed, &lim))
        .collect::<Result<Vec<_>, _>>()?;
    if a.n_sweep.is_some() {
        let rows: Vec<BarrierRow> = reports
            .iter()
            .map(|r| BarrierRow {
                n: r.n,
                m: r.m,
                trials: r.trials,
                hits: r.hits,
                estimate: r.estimate,
                wilson_low: r.wilson_low,
                wilson_high: r.wilson_high,
                ceiling: r.ceiling,
            })
            .collect();
        write_csv(c, "barrier", &rows)?;
    }
    write_report(c, "barrier", a, None, &reports)
}

// ----------------------------------------------------------------- weights

#[derive(Args, Debug, Serialize)]
pub struct WeightsArgs {
    /// A counterexample graph.
    #[arg(long)]
    pub graph: String,
    /// avoiding, meeting or both.
    #[arg(long, default_value = "both")]
    pub side: String,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Serialize)]
struct SideResult {
    bernoulli: analysis::WeightReport,
    tail: analysis::ChernoffReport,
}

pub fn weights(c: &CommonArgs, a: &WeightsArgs) -> CmdResult {
    positive(a.trials, "--trials")?;
    let g = source(&a.graph)?.load_counterexample(c.seed)?;
    let sides = match a.side.as_str() {
        "both" => vec![SigmaSide::Avoiding, SigmaSide::Meeting],
        s => vec![s.parse::<SigmaSide>()?],
    };
    let lim = limits(c);
    let results = sides
        .into_iter()
        .map(|side| {
            Ok(SideResult {
                bernoulli: analysis::weight_distribution_check(&g, side, a.trials, c.seed, &lim)?,
                tail: analysis::chernoff_tail_check(&g, side, a.trials, c.seed)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let passed = results.iter().all(|r| r.bernoulli.passes && r.tail.holds);
    write_report(c, "weights", a, Some(passed), &results)?;
    verdict(passed, "the Bernoulli structure or a tail ceiling was rejected")
}

// ------------------------------------------------------------------ escape

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("target").required(true).args(["graph", "n_sweep"])))]
pub struct EscapeArgs {
    #[arg(long)]
    pub graph: Option<String>,
    /// Comma-separated values of n.
    #[arg(long)]
    pub n_sweep: Option<String>,
    /// bond-flip or sw.
    #[arg(long, default_value = "bond-flip")]
    pub kernel: String,
    /// minority, low or high.
    #[arg(long, default_value = "minority")]
    pub start: String,
    #[arg(long, default_value_t = 200)]
    pub replicas: u64,
    /// Step budget per replica; longer runs are censored.
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Serialize)]
struct EscapeRow {
    n: usize,
    m: usize,
    kernel: KernelName,
    start_side: String,
    replicas: u64,
    budget: u64,
    censored: u64,
    q10: u64,
    q25: u64,
    median: u64,
    q75: u64,
    q90: u64,
    median_is_lower_bound: bool,
}

#[derive(Serialize)]
struct EscapeTrend {
    medians: Vec<u64>,
    non_decreasing: bool,
    /// Median ratio between the two largest sizes.
    #[serde(serialize_with = "torpid_core::report::fixed_opt")]
    last_growth: Option<f64>,
}

#[derive(Serialize)]
struct EscapeResult {
    runs: Vec<EscapeSummary>,
    trend: EscapeTrend,
}

pub fn escape_trend(runs: &[EscapeSummary]) -> (Vec<u64>, bool, Option<f64>) {
    let medians: Vec<u64> = runs.iter().map(|r| r.median).collect();
    let non_decreasing = medians.windows(2).all(|w| w[0] <= w[1]);
    let last_growth = match medians[..] {
        [.., a, b] if a > 0 => Some(b as f64 / a as f64),
        _ => None,
    };
    (medians, non_decreasing, last_growth)
}

pub fn escape(c: &CommonArgs, a: &EscapeArgs) -> CmdResult {
    positive(a.replicas, "--replicas")?;
    positive(a.budget, "--budget")?;
    let config = EscapeConfig {
        kernel: kernel(&a.kernel)?,
        start: a.start.parse::<StartSide>()?,
        step_budget: a.budget,
        replicas: a.replicas,
        seed: c.seed,
        threads: c.threads,
    };
    let runs = targets(c, &a.graph, &a.n_sweep)?
        .iter()
        .map(|g| analysis::escape_time_experiment(g, &config))
        .collect::<Result<Vec<_>, _>>()?;
    let (medians, non_decreasing, last_growth) = escape_trend(&runs);
    let rows: Vec<EscapeRow> = runs
        .iter()
        .map(|r| EscapeRow {
            n: r.n,
            m: r.m,
            kernel: r.config.kernel,
            start_side: r.start_side.clone(),
            replicas: r.config.replicas,
            budget: r.config.step_budget,
            censored: r.censored,
            q10: r.quantiles[0].value,
            q25: r.quantiles[1].value,
            median: r.quantiles[2].value,
            q75: r.quantiles[3].value,
            q90: r.quantiles[4].value,
            median_is_lower_bound: r.median_is_lower_bound,
        })
        .collect();
    if a.n_sweep.is_some() {
        write_csv(c, "escape", &rows)?;
    }
    let result = EscapeResult {
        runs,
        trend: EscapeTrend {
            medians,
            non_decreasing,
            last_growth,
        },
    };
    write_report(c, "escape", a, None, &result)
}

// ---------------------------------------------------------- rank-experiment

#[derive(Args, Debug, Serialize)]
pub struct RankArgs {
    /// Rows.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Columns; defaults to ceil(2m/3) for the matching size m of G_n.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Serialize)]
struct RankResult {
    report: analysis::RankReport,
    /// `1 - 2 * 2^{n-k}`: the union bound with a factor-two slack.
    #[serde(serialize_with = "torpid_core::report::fixed")]
    threshold: f64,
}

pub fn rank(c: &CommonArgs, a: &RankArgs) -> CmdResult {
    positive(a.trials, "--trials")?;
    let k = match a.k {
        Some(k) => k,
        None => (2 * graphs::matching_size_for(a.n)?).div_ceil(3),
    };
    let report = analysis::random_rank_experiment(a.n, k, a.trials, c.seed)?;
    let threshold = 1.0 - 2f64.powi(a.n as i32 - k as i32 + 1);
    let passed = report.frequency >= threshold;
    write_report(c, "rank-experiment", a, Some(passed), &RankResult { report, threshold })?;
    verdict(passed, "full-rank frequency below the union bound")
}

// ----------------------------------------------------------------- sw-joint

#[derive(Args, Debug, Serialize)]
pub struct SwJointArgs {
    /// A counterexample graph.
    #[arg(long)]
    pub graph: String,
    /// One-step leave trials from the avoiding side (0 skips the experiment).
    #[arg(long, default_value_t = 100_000)]
    pub leave_trials: u64,
}

#[derive(Serialize)]
struct SwJointResult {
    exact: Option<analysis::SwJointReport>,
    exact_skipped: Option<String>,
    leave: Option<analysis::SwLeaveReport>,
}

pub fn sw_joint(c: &CommonArgs, a: &SwJointArgs) -> CmdResult {
    let g = source(&a.graph)?.load_counterexample(c.seed)?;
    let (exact, exact_skipped) = match analysis::sw_joint_conductance(&g, &limits(c)) {
        Ok(r) => (Some(r), None),
        Err(e @ Error::TooLarge { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let leave = if a.leave_trials > 0 {
        Some(analysis::sw_one_step_leave(&g, a.leave_trials, c.seed)?)
    } else {
        None
    };
    let passed = exact
        .as_ref()
        .is_none_or(|r| r.stationary_verified && r.reversibility_holds && r.decomposition_holds)
        && leave
            .as_ref()
            .is_none_or(|l| l.frequency <= l.union_bound_f64 && l.frequency <= l.heuristic_ceiling);
    let result = SwJointResult {
        exact,
        exact_skipped,
        leave,
    };
    write_report(c, "sw-joint", a, Some(passed), &result)?;
    verdict(passed, "joint-chain identities or the leave bound failed")
}
