use super::cuts::{in_barrier, low_side_max_weight, weight, OmegaSide};
use crate::chains::{sw_style_step, BondFlipWalker, KernelName};
use crate::error::{Error, Result};
use crate::gf2::GF2Matrix;
use crate::graphs::CounterexampleGraph;
use crate::report::{fixed, fixed_opt, fixed_vec, ratio_to_f64, RationalJson};
use crate::rng;
use crate::semantics::{
    self, alpha, sample_a_given_i, sample_pi_sigma_on_side, sample_pi_sigma_structured,
    EnumerationLimits, MaskTables, SigmaSide,
};
use crate::stats;
use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

/// Significance level of every hypothesis test in this module.
pub const SIGNIFICANCE: f64 = 1e-3;

fn ratio_u(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `P(Bin(m, p) <= t)` in exact arithmetic.
pub fn binomial_cdf_exact(m: usize, p: &BigRational, t: usize) -> BigRational {
    let q = BigRational::one() - p;
    (0..=t.min(m)).fold(BigRational::zero(), |acc, k| {
        let c = BigRational::from_integer(BigInt::from(binomial(BigUint::from(m), BigUint::from(k))));
        acc + c * num_traits::pow(p.clone(), k) * num_traits::pow(q.clone(), m - k)
    })
}

/// `π_Ω(Ω_0)` through the two-stage structure: the matching weight is
/// `Bin(m, 1/3)` on the avoiding side and `Bin(m, 1/2)` on the meeting side.
pub fn omega_low_mass_exact(g: &CounterexampleGraph) -> BigRational {
    let a = alpha(g.n(), g.m());
    let t = low_side_max_weight(g.m());
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    &a * binomial_cdf_exact(g.m(), &third, t)
        + (BigRational::one() - &a) * binomial_cdf_exact(g.m(), &half, t)
}

/// Monte Carlo estimate of `π_Ω(Ω_0)` by two-stage sampling.
pub fn estimate_omega_low_mass(g: &CounterexampleGraph, trials: u64, seed: u64) -> f64 {
    let mut r = rng::master(seed);
    let low = (0..trials)
        .filter(|_| {
            let i = sample_pi_sigma_structured(g, &mut r);
            let a = sample_a_given_i(g.graph(), &i, &mut r);
            OmegaSide::of_weight(g.m(), weight(g, &a)) == OmegaSide::Low
        })
        .count();
    low as f64 / trials as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct BarrierReport {
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub hits: u64,
    #[serde(serialize_with = "fixed")]
    pub estimate: f64,
    #[serde(serialize_with = "fixed")]
    pub wilson_low: f64,
    #[serde(serialize_with = "fixed")]
    pub wilson_high: f64,
    /// `exp(-m/576)`.
    #[serde(serialize_with = "fixed")]
    pub ceiling: f64,
    /// Barrier weights that exist at this `m`.
    pub barrier_weights: Vec<usize>,
    pub exact: Option<RationalJson>,
    #[serde(serialize_with = "fixed_opt")]
    pub exact_f64: Option<f64>,
}

/// Estimate of `π_Ω(C)`; exact as well when the edge set is enumerable and
/// `m <= 4`.
pub fn barrier_mass(
    g: &CounterexampleGraph,
    trials: u64,
    seed: u64,
    limits: &EnumerationLimits,
) -> Result<BarrierReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let m = g.m();
    let mut r = rng::master(seed);
    let hits = (0..trials)
        .filter(|_| {
            let i = sample_pi_sigma_structured(g, &mut r);
            let a = sample_a_given_i(g.graph(), &i, &mut r);
            in_barrier(m, weight(g, &a))
        })
        .count() as u64;
    let (wilson_low, wilson_high) = stats::wilson_interval(hits, trials, 0.99);
    let exact = if m <= 4 && g.graph().edge_count() <= limits.max_edges {
        let pi = semantics::exact_pi_omega(g.graph(), limits)?;
        Some(pi.mass(|a| in_barrier(m, super::cuts::weight_of_mask(g, a as u64))))
    } else {
        None
    };
    Ok(BarrierReport {
        n: g.n(),
        m,
        trials,
        seed,
        hits,
        estimate: hits as f64 / trials as f64,
        wilson_low,
        wilson_high,
        ceiling: (-(m as f64) / 576.0).exp(),
        barrier_weights: (0..=m).filter(|&w| in_barrier(m, w)).collect(),
        exact_f64: exact.as_ref().map(ratio_to_f64),
        exact: exact.as_ref().map(RationalJson::from),
    })
}

/// Matching-edge inclusion probability on each side.
pub fn matching_inclusion_probability(side: SigmaSide) -> BigRational {
    match side {
        SigmaSide::Avoiding => BigRational::new(BigInt::one(), BigInt::from(3)),
        SigmaSide::Meeting => BigRational::new(BigInt::one(), BigInt::from(2)),
    }
}

/// Exact law of `A ∩ M` (as a mask over the `m` matching edges) under the
/// uniform distribution on consistent pairs with `I` on `side`.
pub fn exact_matching_law(
    g: &CounterexampleGraph,
    side: SigmaSide,
    limits: &EnumerationLimits,
) -> Result<Vec<BigRational>> {
    let graph = g.graph();
    let bits_needed = graph.u_count() + graph.edge_count();
    if bits_needed > limits.max_pair_bits {
        return Err(Error::too_large("pair space (|U|+|E|)", bits_needed, limits.max_pair_bits));
    }
    let t = MaskTables::new(graph)?;
    let u_prime = (1u64 << g.n()) - 1;
    let shift = g.matching_edges().start;
    let mut counts = vec![0u64; 1 << g.m()];
    let mut total = 0u64;
    for i in 0u64..1 << graph.u_count() {
        let on_side = (i & u_prime == 0) == (side == SigmaSide::Avoiding);
        if !on_side {
            continue;
        }
        for a in 0u64..1 << graph.edge_count() {
            if t.chi(i, a) {
                counts[(a >> shift) as usize] += 1;
                total += 1;
            }
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| ratio_u(BigUint::from(c), BigUint::from(total)))
        .collect())
}

/// Product Bernoulli(`p`) law on `m` bits.
pub fn product_bernoulli(m: usize, p: &BigRational) -> Vec<BigRational> {
    let q = BigRational::one() - p;
    (0u64..1 << m)
        .map(|mask| {
            let k = mask.count_ones() as usize;
            num_traits::pow(p.clone(), k) * num_traits::pow(q.clone(), m - k)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightReport {
    pub n: usize,
    pub m: usize,
    pub side: SigmaSide,
    pub trials: u64,
    pub seed: u64,
    #[serde(serialize_with = "fixed")]
    pub p_expected: f64,
    #[serde(serialize_with = "fixed_vec")]
    pub per_edge_frequency: Vec<f64>,
    #[serde(serialize_with = "fixed")]
    pub per_edge_min_p: f64,
    #[serde(serialize_with = "fixed")]
    pub pair_min_p: f64,
    pub tests: usize,
    #[serde(serialize_with = "fixed")]
    pub bonferroni_threshold: f64,
    #[serde(serialize_with = "fixed")]
    pub mean_weight: f64,
    #[serde(serialize_with = "fixed")]
    pub expected_mean: f64,
    /// Standardized deviation of the mean weight from `m p`.
    #[serde(serialize_with = "fixed")]
    pub mean_z: f64,
    /// Exact product-law check, when the pair space is enumerable.
    pub exact_product: Option<bool>,
    pub passes: bool,
}

/// Test that `A ∩ M` is i.i.d. Bernoulli(1/3) (avoiding side) or
/// Bernoulli(1/2) (meeting side): one binomial test per matching edge and
/// one 4-cell goodness-of-fit test per pair, Bonferroni-corrected.
pub fn weight_distribution_check(
    g: &CounterexampleGraph,
    side: SigmaSide,
    trials: u64,
    seed: u64,
    limits: &EnumerationLimits,
) -> Result<WeightReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let m = g.m();
    let p_exact = matching_inclusion_probability(side);
    let p = ratio_to_f64(&p_exact);
    let matching = g.matching_edges();
    let mut r = rng::master(seed);
    let mut single = vec![0u64; m];
    let mut pair = vec![0u64; m * m];
    let mut weight_sum = 0u64;
    let mut present = Vec::with_capacity(m);
    for _ in 0..trials {
        let i = sample_pi_sigma_on_side(g, side, &mut r);
        let a = sample_a_given_i(g.graph(), &i, &mut r);
        present.clear();
        present.extend(matching.clone().filter(|&e| a.contains(e)).map(|e| e - matching.start));
        weight_sum += present.len() as u64;
        for (k, &x) in present.iter().enumerate() {
            single[x] += 1;
            for &y in &present[k + 1..] {
                pair[x * m + y] += 1;
            }
        }
    }
    let tests = m + m * m.saturating_sub(1) / 2;
    let threshold = SIGNIFICANCE / tests.max(1) as f64;
    let per_edge_min_p = single
        .iter()
        .map(|&c| stats::binomial_two_sided_p(c, trials, p))
        .fold(1.0, f64::min);
    let nf = trials as f64;
    let mut pair_min_p = 1.0f64;
    for x in 0..m {
        for y in x + 1..m {
            let both = pair[x * m + y];
            let observed = [
                (trials + both - single[x] - single[y]) as usize,
                (single[x] - both) as usize,
                (single[y] - both) as usize,
                both as usize,
            ];
            let expected = [
                nf * (1.0 - p) * (1.0 - p),
                nf * p * (1.0 - p),
                nf * (1.0 - p) * p,
                nf * p * p,
            ];
            pair_min_p = pair_min_p.min(stats::chi_square_p(&observed, &expected));
        }
    }
    let mean_weight = weight_sum as f64 / nf;
    let expected_mean = m as f64 * p;
    let sd = (m as f64 * p * (1.0 - p) / nf).sqrt();
    let mean_z = if sd > 0.0 { (mean_weight - expected_mean) / sd } else { 0.0 };
    let exact_product = if m <= 3 {
        match exact_matching_law(g, side, limits) {
            Ok(law) => Some(law == product_bernoulli(m, &p_exact)),
            Err(Error::TooLarge { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let passes = per_edge_min_p > threshold
        && pair_min_p > threshold
        && exact_product.unwrap_or(true);
    Ok(WeightReport {
        n: g.n(),
        m,
        side,
        trials,
        seed,
        p_expected: p,
        per_edge_frequency: single.iter().map(|&c| c as f64 / nf).collect(),
        per_edge_min_p,
        pair_min_p,
        tests,
        bonferroni_threshold: threshold,
        mean_weight,
        expected_mean,
        mean_z,
        exact_product,
        passes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChernoffReport {
    pub n: usize,
    pub m: usize,
    pub side: SigmaSide,
    pub trials: u64,
    pub seed: u64,
    pub tail_hits: u64,
    #[serde(serialize_with = "fixed")]
    pub frequency: f64,
    /// One-sided 99% Clopper-Pearson upper bound.
    #[serde(serialize_with = "fixed")]
    pub upper_99: f64,
    #[serde(serialize_with = "fixed")]
    pub ceiling: f64,
    pub holds: bool,
}

/// Conditional tail probabilities against the ceiling `exp(-m/576)`:
/// `P(w >= 9m/24 | avoiding)` and `P(w <= 11m/24 | meeting)`.
pub fn chernoff_tail_check(
    g: &CounterexampleGraph,
    side: SigmaSide,
    trials: u64,
    seed: u64,
) -> Result<ChernoffReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let m = g.m();
    let mut r = rng::master(seed);
    let tail_hits = (0..trials)
        .filter(|_| {
            let i = sample_pi_sigma_on_side(g, side, &mut r);
            let w = weight(g, &sample_a_given_i(g.graph(), &i, &mut r));
            match side {
                SigmaSide::Avoiding => 24 * w >= 9 * m,
                SigmaSide::Meeting => 24 * w <= 11 * m,
            }
        })
        .count() as u64;
    let upper_99 = stats::clopper_pearson_upper(tail_hits, trials, 0.99);
    let ceiling = (-(m as f64) / 576.0).exp();
    Ok(ChernoffReport {
        n: g.n(),
        m,
        side,
        trials,
        seed,
        tail_hits,
        frequency: tail_hits as f64 / trials as f64,
        upper_99,
        ceiling,
        holds: upper_99 < ceiling,
    })
}

/// Which side escape runs start from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartSide {
    /// The side of smaller stationary mass.
    Minority,
    /// `Ω_0` for bond-flip, `Σ_0` for sw.
    Low,
    /// `Ω_1` for bond-flip, `Σ_1` for sw.
    High,
}

impl std::str::FromStr for StartSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minority" => Ok(StartSide::Minority),
            "low" => Ok(StartSide::Low),
            "high" => Ok(StartSide::High),
            other => Err(Error::InvalidParameter(format!(
                "unknown start side {other:?} (expected minority, low or high)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EscapeConfig {
    pub kernel: KernelName,
    pub start: StartSide,
    pub step_budget: u64,
    pub replicas: u64,
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[serde(skip)]
    pub threads: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantileEntry {
    pub q: f64,
    pub value: u64,
    /// The quantile falls on a censored replica; `value` is the budget.
    pub lower_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EscapeSummary {
    pub n: usize,
    pub m: usize,
    pub config: EscapeConfig,
    /// Resolved start side: `low` or `high`.
    pub start_side: String,
    /// Stationary mass of the resolved start side.
    #[serde(serialize_with = "fixed")]
    pub start_side_mass: f64,
    /// Escape time of each replica; `None` when censored at the budget.
    pub times: Vec<Option<u64>>,
    pub censored: u64,
    pub quantiles: Vec<QuantileEntry>,
    pub median: u64,
    pub median_is_lower_bound: bool,
}

pub const ESCAPE_QUANTILES: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

fn resolve_start(g: &CounterexampleGraph, kernel: KernelName, start: StartSide) -> (bool, f64) {
    // returns (start on the low side?, mass of that side)
    let low_mass = match kernel {
        KernelName::Sw => ratio_to_f64(&alpha(g.n(), g.m())),
        _ => ratio_to_f64(&omega_low_mass_exact(g)),
    };
    let low = match start {
        StartSide::Low => true,
        StartSide::High => false,
        StartSide::Minority => low_mass <= 0.5,
    };
    (low, if low { low_mass } else { 1.0 - low_mass })
}

fn bond_flip_escape(g: &CounterexampleGraph, from_low: bool, budget: u64, seed: u64, idx: u64) -> Option<u64> {
    let mut r = rng::replica(seed, idx);
    let m = g.m();
    let start = if from_low { OmegaSide::Low } else { OmegaSide::High };
    let a = loop {
        let i = sample_pi_sigma_structured(g, &mut r);
        let a = sample_a_given_i(g.graph(), &i, &mut r);
        if OmegaSide::of_weight(m, weight(g, &a)) == start {
            break a;
        }
    };
    let matching = g.matching_edges();
    let mut w = weight(g, &a);
    let mut walker = BondFlipWalker::new(g.graph(), a);
    for t in 1..=budget {
        if let Some(e) = walker.step(&mut r) {
            if matching.contains(&e) {
                if walker.state().contains(e) {
                    w += 1;
                } else {
                    w -= 1;
                }
                if OmegaSide::of_weight(m, w) != start {
                    return Some(t);
                }
            }
        }
    }
    None
}

fn sw_escape(g: &CounterexampleGraph, from_low: bool, budget: u64, seed: u64, idx: u64) -> Option<u64> {
    let mut r = rng::replica(seed, idx);
    let start = if from_low { SigmaSide::Avoiding } else { SigmaSide::Meeting };
    let mut i = sample_pi_sigma_on_side(g, start, &mut r);
    for t in 1..=budget {
        i = sw_style_step(g.graph(), &i, &mut r);
        if SigmaSide::of(g, &i) != start {
            return Some(t);
        }
    }
    None
}

/// Replicated escape times from the stationary law conditioned on a side of
/// the cut, censored at the step budget.
pub fn escape_time_experiment(g: &CounterexampleGraph, config: &EscapeConfig) -> Result<EscapeSummary> {
    if config.replicas == 0 || config.step_budget == 0 {
        return Err(Error::InvalidParameter("replicas and budget must be positive".into()));
    }
    if g.m() == 0 {
        return Err(Error::InvalidParameter("escape needs m >= 1".into()));
    }
    let runner: fn(&CounterexampleGraph, bool, u64, u64, u64) -> Option<u64> = match config.kernel {
        KernelName::BondFlip => bond_flip_escape,
        KernelName::Sw => sw_escape,
        KernelName::SingleSite => {
            return Err(Error::InvalidParameter(
                "escape supports the bond-flip and sw kernels".into(),
            ))
        }
    };
    let (from_low, start_side_mass) = resolve_start(g, config.kernel, config.start);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let times: Vec<Option<u64>> = pool.install(|| {
        (0..config.replicas)
            .into_par_iter()
            .map(|idx| runner(g, from_low, config.step_budget, config.seed, idx))
            .collect()
    });
    let censored = times.iter().filter(|t| t.is_none()).count() as u64;
    let mut sorted: Vec<u64> = times
        .iter()
        .map(|t| t.unwrap_or(config.step_budget + 1))
        .collect();
    sorted.sort_unstable();
    let quantiles: Vec<QuantileEntry> = ESCAPE_QUANTILES
        .iter()
        .map(|&q| {
            let v = stats::nearest_rank(&sorted, q);
            QuantileEntry {
                q,
                value: v.min(config.step_budget),
                lower_bound: v > config.step_budget,
            }
        })
        .collect();
    let med = &quantiles[2];
    Ok(EscapeSummary {
        n: g.n(),
        m: g.m(),
        config: config.clone(),
        start_side: if from_low { "low" } else { "high" }.into(),
        start_side_mass,
        times,
        censored,
        median: med.value,
        median_is_lower_bound: med.lower_bound,
        quantiles,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub full_rank: u64,
    #[serde(serialize_with = "fixed")]
    pub frequency: f64,
    /// `1 - 2^{n-k}`.
    #[serde(serialize_with = "fixed")]
    pub union_lower_bound: f64,
    /// `Π_{i<n} (1 - 2^{i-k})`.
    #[serde(serialize_with = "fixed")]
    pub exact_probability: f64,
    #[serde(serialize_with = "fixed")]
    pub std_error: f64,
}

/// Frequency with which a uniform `n × k` matrix has rank `n`.
pub fn random_rank_experiment(n: usize, k: usize, trials: u64, seed: u64) -> Result<RankReport> {
    if n > k {
        return Err(Error::InvalidParameter(format!("need n <= k, got n={n} k={k}")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let mut r = rng::master(seed);
    let full_rank = (0..trials)
        .filter(|_| GF2Matrix::random(n, k, &mut r).rank() == n)
        .count() as u64;
    let freq = full_rank as f64 / trials as f64;
    let exact_probability = (0..n).map(|i| 1.0 - 2f64.powi(i as i32 - k as i32)).product();
    Ok(RankReport {
        n,
        k,
        trials,
        seed,
        full_rank,
        frequency: freq,
        union_lower_bound: 1.0 - 2f64.powi(n as i32 - k as i32),
        exact_probability,
        std_error: (freq * (1.0 - freq) / trials as f64).sqrt(),
    })
}

/// Exact union bound on leaving the avoiding side in one SW step:
/// `Σ_w P(Bin(m,1/3) = w) · min(1, (2^n - 1) / 2^{m-w})`.
pub fn sw_leave_union_bound(n: usize, m: usize) -> BigRational {
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let two_thirds = BigRational::one() - &third;
    let nonzero = BigInt::from((BigUint::one() << n) - BigUint::one());
    (0..=m).fold(BigRational::zero(), |acc, w| {
        let c = BigRational::from_integer(BigInt::from(binomial(BigUint::from(m), BigUint::from(w))));
        let pw = c * num_traits::pow(third.clone(), w) * num_traits::pow(two_thirds.clone(), m - w);
        let expected_kernel = BigRational::new(nonzero.clone(), BigInt::from(BigUint::one() << (m - w)));
        acc + pw * expected_kernel.min(BigRational::one())
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SwLeaveReport {
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub leaves: u64,
    #[serde(serialize_with = "fixed")]
    pub frequency: f64,
    #[serde(serialize_with = "fixed")]
    pub upper_99: f64,
    pub union_bound: RationalJson,
    #[serde(serialize_with = "fixed")]
    pub union_bound_f64: f64,
    /// `2^{n - 2m/3 + 1}`.
    #[serde(serialize_with = "fixed")]
    pub heuristic_ceiling: f64,
}

/// Frequency of `I' ∩ U' ≠ ∅` after one SW step from the avoiding side.
pub fn sw_one_step_leave(g: &CounterexampleGraph, trials: u64, seed: u64) -> Result<SwLeaveReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let mut r = rng::master(seed);
    let leaves = (0..trials)
        .filter(|_| {
            let i = sample_pi_sigma_on_side(g, SigmaSide::Avoiding, &mut r);
            SigmaSide::of(g, &sw_style_step(g.graph(), &i, &mut r)) == SigmaSide::Meeting
        })
        .count() as u64;
    let bound = sw_leave_union_bound(g.n(), g.m());
    Ok(SwLeaveReport {
        n: g.n(),
        m: g.m(),
        trials,
        seed,
        leaves,
        frequency: leaves as f64 / trials as f64,
        upper_99: stats::clopper_pearson_upper(leaves, trials, 0.99),
        union_bound_f64: ratio_to_f64(&bound),
        union_bound: (&bound).into(),
        heuristic_ceiling: 2f64.powf(g.n() as f64 - 2.0 * g.m() as f64 / 3.0 + 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::ratio;

    fn limits() -> EnumerationLimits {
        EnumerationLimits::default()
    }

    #[test]
    fn exact_matching_law_is_product_on_g2() {
        let g = CounterexampleGraph::new(2).unwrap();
        let law = exact_matching_law(&g, SigmaSide::Avoiding, &limits()).unwrap();
        assert_eq!(law, vec![ratio(4, 9), ratio(2, 9), ratio(2, 9), ratio(1, 9)]);
        let law = exact_matching_law(&g, SigmaSide::Meeting, &limits()).unwrap();
        assert_eq!(law, vec![ratio(1, 4); 4]);
    }

    #[test]
    fn omega_low_mass_matches_enumeration() {
        for n in [2, 3] {
            let g = CounterexampleGraph::new(n).unwrap();
            let pi = semantics::exact_pi_omega(g.graph(), &limits()).unwrap();
            let t = low_side_max_weight(g.m());
            let enumerated = pi.mass(|a| super::super::cuts::weight_of_mask(&g, a as u64) <= t);
            assert_eq!(enumerated, omega_low_mass_exact(&g), "n={n}");
        }
    }

    #[test]
    fn omega_low_mass_near_alpha_at_simulation_scale() {
        for n in [8, 10, 15, 20] {
            let g = CounterexampleGraph::new(n).unwrap();
            let exact = ratio_to_f64(&omega_low_mass_exact(&g));
            assert!(exact > 0.3 && exact < 0.7, "n={n} mass={exact}");
            let est = estimate_omega_low_mass(&g, 20_000, n as u64);
            assert!((est - exact).abs() < 0.02, "n={n} est={est} exact={exact}");
        }
    }

    #[test]
    fn omega_low_mass_within_five_percent_of_alpha() {
        for n in [15, 20, 28, 56] {
            let g = CounterexampleGraph::new(n).unwrap();
            let gap = ratio_to_f64(&omega_low_mass_exact(&g)) - ratio_to_f64(&alpha(n, g.m()));
            assert!(gap.abs() <= 0.05, "n={n} gap={gap}");
        }
        // below that the threshold still sits between the two binomial means
        let g = CounterexampleGraph::new(10).unwrap();
        assert!(ratio_to_f64(&omega_low_mass_exact(&g)) - ratio_to_f64(&alpha(10, 17)) > 0.05);
    }

    #[test]
    fn barrier_is_empty_at_m2() {
        let g = CounterexampleGraph::new(2).unwrap();
        let r = barrier_mass(&g, 1000, 1, &limits()).unwrap();
        assert!(r.barrier_weights.is_empty());
        assert_eq!(r.hits, 0);
        assert_eq!(r.exact_f64, Some(0.0));
    }

    #[test]
    fn barrier_estimate_brackets_exact_at_m4() {
        let g = CounterexampleGraph::new(3).unwrap();
        // m = 4: barrier weight w with 36 <= 24w <= 44, none
        let r = barrier_mass(&g, 1000, 2, &limits()).unwrap();
        assert_eq!(r.barrier_weights, Vec::<usize>::new());
        let g = CounterexampleGraph::with_sizes(1, 8).unwrap();
        // m = 8: w = 3 only; |E| = 16
        let r = barrier_mass(&g, 50_000, 3, &limits()).unwrap();
        assert_eq!(r.barrier_weights, vec![3]);
        assert!(r.exact.is_none());
    }

    #[test]
    fn weight_check_small_exact() {
        let g = CounterexampleGraph::new(2).unwrap();
        for side in [SigmaSide::Avoiding, SigmaSide::Meeting] {
            let r = weight_distribution_check(&g, side, 20_000, 5, &limits()).unwrap();
            assert_eq!(r.exact_product, Some(true));
            assert!(r.passes, "{r:?}");
        }
    }

    #[test]
    fn weight_check_detects_wrong_side() {
        // Meeting-side samples tested against 1/3 must fail: swap by hand
        let g = CounterexampleGraph::with_sizes(3, 12).unwrap();
        let r = weight_distribution_check(&g, SigmaSide::Meeting, 20_000, 6, &limits()).unwrap();
        assert!(r.passes);
        let p13 = 1.0 / 3.0;
        let worst = r
            .per_edge_frequency
            .iter()
            .map(|&f| stats::binomial_two_sided_p((f * 20_000.0).round() as u64, 20_000, p13))
            .fold(1.0, f64::min);
        assert!(worst < 1e-10);
    }

    #[test]
    fn chernoff_small() {
        let g = CounterexampleGraph::with_sizes(10, 48).unwrap();
        let r = chernoff_tail_check(&g, SigmaSide::Avoiding, 5_000, 1).unwrap();
        assert!(r.holds, "{r:?}");
        let r = chernoff_tail_check(&g, SigmaSide::Meeting, 5_000, 2).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn rank_experiment_basic() {
        let r = random_rank_experiment(1, 1, 10_000, 3).unwrap();
        assert!((r.frequency - 0.5).abs() < 3.0 * 0.005);
        assert!(random_rank_experiment(3, 2, 10, 0).is_err());
        let r = random_rank_experiment(0, 4, 10, 0).unwrap();
        assert_eq!(r.full_rank, 10);
    }

    #[test]
    fn union_bound_is_a_probability() {
        let b = sw_leave_union_bound(20, 34);
        assert!(b > BigRational::zero() && b <= BigRational::one());
        assert_eq!(sw_leave_union_bound(1, 0), BigRational::one());
    }

    #[test]
    fn escape_smoke_test_at_n2() {
        let g = CounterexampleGraph::new(2).unwrap();
        for kernel in [KernelName::BondFlip, KernelName::Sw] {
            let cfg = EscapeConfig {
                kernel,
                start: StartSide::Minority,
                step_budget: 100_000,
                replicas: 50,
                seed: 9,
                threads: 2,
            };
            let s = escape_time_experiment(&g, &cfg).unwrap();
            assert_eq!(s.censored, 0);
            assert!(s.median < 10_000);
            // thread count does not change results
            let single = escape_time_experiment(&g, &EscapeConfig { threads: 1, ..cfg }).unwrap();
            assert_eq!(single.times, s.times);
        }
    }

    #[test]
    fn escape_reports_censoring() {
        let g = CounterexampleGraph::new(6).unwrap();
        let cfg = EscapeConfig {
            kernel: KernelName::BondFlip,
            start: StartSide::Low,
            step_budget: 1,
            replicas: 20,
            seed: 1,
            threads: 1,
        };
        let s = escape_time_experiment(&g, &cfg).unwrap();
        assert!(s.censored > 0);
        assert!(s.quantiles.last().unwrap().lower_bound);
        let bad = EscapeConfig { kernel: KernelName::SingleSite, ..cfg };
        assert!(escape_time_experiment(&g, &bad).is_err());
    }

    #[test]
    fn binomial_cdf_sums_to_one() {
        let third = ratio(1, 3);
        assert_eq!(binomial_cdf_exact(5, &third, 5), BigRational::one());
        assert_eq!(binomial_cdf_exact(2, &third, 0), ratio(4, 9));
    }
}
