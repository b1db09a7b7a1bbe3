use crate::chains::ExactTransitionMatrix;
use crate::error::{Error, Result};
use crate::graphs::CounterexampleGraph;
use crate::report::{ratio_to_f64, RationalJson};
use crate::semantics::{self, EdgeSubset, EnumerationLimits, MaskTables};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

/// `w(A) = |A ∩ M|`.
pub fn weight(g: &CounterexampleGraph, a: &EdgeSubset) -> usize {
    let r = g.matching_edges();
    a.0.count_ones_in(r.start, r.end)
}

pub fn weight_of_mask(g: &CounterexampleGraph, mask: u64) -> usize {
    let r = g.matching_edges();
    let span = if r.is_empty() { 0 } else { ((1u64 << r.len()) - 1) << r.start };
    (mask & span).count_ones() as usize
}

/// Block of the Ω partition by matching weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum OmegaSide {
    /// `w(A) <= 5m/12`.
    Low,
    High,
}

impl OmegaSide {
    /// Thresholds are compared on integers scaled by 12.
    pub fn of_weight(m: usize, w: usize) -> OmegaSide {
        if 12 * w <= 5 * m {
            OmegaSide::Low
        } else {
            OmegaSide::High
        }
    }

    pub fn opposite(self) -> OmegaSide {
        match self {
            OmegaSide::Low => OmegaSide::High,
            OmegaSide::High => OmegaSide::Low,
        }
    }
}

/// `9m/24 <= w <= 11m/24`, on integers scaled by 24.
pub fn in_barrier(m: usize, w: usize) -> bool {
    9 * m <= 24 * w && 24 * w <= 11 * m
}

/// Largest weight on the low side, `floor(5m/12)`.
pub fn low_side_max_weight(m: usize) -> usize {
    5 * m / 12
}

/// A two-block partition of an enumerated state space, with an optional
/// barrier set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSpec {
    pub name: String,
    pub in_s: Vec<bool>,
    pub barrier: Option<Vec<bool>>,
}

impl CutSpec {
    pub fn from_predicates(
        name: impl Into<String>,
        masks: &[u64],
        s: impl Fn(u64) -> bool,
        barrier: Option<&dyn Fn(u64) -> bool>,
    ) -> Self {
        CutSpec {
            name: name.into(),
            in_s: masks.iter().map(|&x| s(x)).collect(),
            barrier: barrier.map(|c| masks.iter().map(|&x| c(x)).collect()),
        }
    }

    /// `S = Ω_0`, `T = Ω_1`, barrier `C`, over edge-subset masks.
    pub fn omega_weight_cut(g: &CounterexampleGraph, masks: &[u64]) -> Self {
        let m = g.m();
        let barrier = |a: u64| in_barrier(m, weight_of_mask(g, a));
        Self::from_predicates(
            "omega-weight",
            masks,
            |a| OmegaSide::of_weight(m, weight_of_mask(g, a)) == OmegaSide::Low,
            Some(&barrier),
        )
    }

    /// `S = Σ_0` (avoiding `U'`), `T = Σ_1`, over left-vertex masks.
    pub fn sigma_cut(g: &CounterexampleGraph, masks: &[u64]) -> Self {
        let u_prime = (1u64 << g.n()) - 1;
        Self::from_predicates("sigma-trace", masks, |i| i & u_prime == 0, None)
    }

    pub fn complement(&self) -> Self {
        CutSpec {
            name: format!("{}-complement", self.name),
            in_s: self.in_s.iter().map(|b| !b).collect(),
            barrier: self.barrier.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.in_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.in_s.is_empty()
    }
}

pub fn mass(pi: &[BigRational], set: &[bool]) -> BigRational {
    pi.iter()
        .zip(set)
        .filter(|(_, &b)| b)
        .fold(BigRational::zero(), |acc, (p, _)| acc + p)
}

/// Stationary flow `Σ_{x ∈ from, y ∈ to} π(x) P(x,y)`.
pub fn flow(p: &ExactTransitionMatrix, pi: &[BigRational], from: &[bool], to: &[bool]) -> BigRational {
    let mut total = BigRational::zero();
    for (x, _) in from.iter().enumerate().filter(|(_, &b)| b) {
        for (y, q) in p.row(x) {
            if to[*y] {
                total += &pi[x] * q;
            }
        }
    }
    total
}

/// `Φ(S) = flow(S → T) / π(S)`.
pub fn conductance_of_cut(
    p: &ExactTransitionMatrix,
    pi: &[BigRational],
    cut: &CutSpec,
) -> Result<BigRational> {
    let pi_s = mass(pi, &cut.in_s);
    if pi_s.is_zero() {
        return Err(Error::InvalidParameter(format!("cut {} has an empty side", cut.name)));
    }
    let t: Vec<bool> = cut.in_s.iter().map(|b| !b).collect();
    Ok(flow(p, pi, &cut.in_s, &t) / pi_s)
}

/// `flow(S → T) / min(π(S), π(T))`.
pub fn cut_conductance(
    p: &ExactTransitionMatrix,
    pi: &[BigRational],
    cut: &CutSpec,
) -> Result<BigRational> {
    let t: Vec<bool> = cut.in_s.iter().map(|b| !b).collect();
    let smaller = mass(pi, &cut.in_s).min(mass(pi, &t));
    if smaller.is_zero() {
        return Err(Error::InvalidParameter(format!("cut {} has an empty side", cut.name)));
    }
    Ok(flow(p, pi, &cut.in_s, &t) / smaller)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorpidBound {
    Finite(BigRational),
    /// Barrier of zero stationary mass.
    Infinite,
}

impl TorpidBound {
    /// Whether a mixing time of `tau` steps respects the bound.
    pub fn is_respected_by(&self, tau: u64) -> bool {
        match self {
            TorpidBound::Finite(b) => BigRational::from_integer(BigInt::from(tau)) >= *b,
            TorpidBound::Infinite => false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            TorpidBound::Finite(b) => ratio_to_f64(b),
            TorpidBound::Infinite => f64::INFINITY,
        }
    }
}

/// Barrier lower bound `π(S) / (8 π(C))` on the mixing time.
pub fn torpid_bound(pi_s: &BigRational, pi_c: &BigRational) -> Result<TorpidBound> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if *pi_s > half || *pi_s < BigRational::zero() {
        return Err(Error::InvalidParameter(format!(
            "π(S) = {pi_s} must lie in [0, 1/2]; use the other side"
        )));
    }
    if *pi_c < BigRational::zero() {
        return Err(Error::InvalidParameter(format!("π(C) = {pi_c} is negative")));
    }
    if pi_c.is_zero() {
        return Ok(TorpidBound::Infinite);
    }
    Ok(TorpidBound::Finite(pi_s / (pi_c * BigInt::from(8))))
}

/// Outcome of checking a (cut, barrier) pair against the barrier bound's
/// hypotheses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarrierAssessment {
    /// True if `S` was replaced by its complement to get `π(S) <= 1/2`.
    pub swapped: bool,
    pub pi_s: BigRational,
    pub pi_c: BigRational,
    /// No positive-probability move from `S \ C` to `T \ C`.
    pub no_crossing: bool,
    pub bound: Option<TorpidBound>,
}

impl BarrierAssessment {
    pub fn admissible(&self) -> bool {
        self.no_crossing && matches!(self.bound, Some(TorpidBound::Finite(_)))
    }
}

/// Orient the cut so that `π(S) <= 1/2`, check the no-crossing hypothesis
/// exhaustively, and evaluate the bound.
pub fn assess_barrier(
    p: &ExactTransitionMatrix,
    pi: &[BigRational],
    in_s: &[bool],
    barrier: &[bool],
) -> BarrierAssessment {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut s: Vec<bool> = in_s.to_vec();
    let mut swapped = false;
    if mass(pi, &s) > half {
        s.iter_mut().for_each(|b| *b = !*b);
        swapped = true;
    }
    let pi_s = mass(pi, &s);
    let pi_c = mass(pi, barrier);
    let no_crossing = (0..s.len()).filter(|&x| s[x] && !barrier[x]).all(|x| {
        p.row(x)
            .iter()
            .all(|(y, _)| s[*y] || barrier[*y])
    });
    let bound = torpid_bound(&pi_s, &pi_c).ok();
    BarrierAssessment {
        swapped,
        pi_s,
        pi_c,
        no_crossing,
        bound,
    }
}

/// Exact flows of the joint chain on `Σ ∪ Ω` across the cut
/// `(Σ_0 ∪ Ω_0, Σ_1 ∪ Ω_1)`.
#[derive(Clone, Debug, Serialize)]
pub struct SwJointReport {
    pub n: usize,
    pub m: usize,
    pub sigma_states: usize,
    pub omega_states: usize,
    pub stationary_verified: bool,
    pub flow_sigma0_to_omega1: RationalJson,
    pub flow_omega0_to_sigma1: RationalJson,
    pub flow_sigma1_to_omega0: RationalJson,
    pub total_cut_flow: RationalJson,
    pub pi_s: RationalJson,
    pub conductance: RationalJson,
    #[serde(serialize_with = "crate::report::fixed")]
    pub conductance_f64: f64,
    /// `flow(Ω_0 → Σ_1) = flow(Σ_1 → Ω_0)`.
    pub reversibility_holds: bool,
    /// Total flow equals the sum of its two possible routes.
    pub decomposition_holds: bool,
}

/// Joint chain: a Σ-state `I` moves to a uniform consistent `A`, an Ω-state
/// moves to a uniform consistent `I`. Σ-states come first in the index.
pub fn sw_joint_chain(
    g: &CounterexampleGraph,
    limits: &EnumerationLimits,
) -> Result<(ExactTransitionMatrix, Vec<BigRational>)> {
    let graph = g.graph();
    let bits_needed = graph.u_count() + graph.edge_count();
    if bits_needed > limits.max_pair_bits {
        return Err(Error::too_large("pair space (|U|+|E|)", bits_needed, limits.max_pair_bits));
    }
    let t = MaskTables::new(graph)?;
    let uc = graph.u_count();
    let ec = graph.edge_count();
    let ns = 1usize << uc;
    let no = 1usize << ec;
    let mut rows: Vec<Vec<(usize, BigRational)>> = Vec::with_capacity(ns + no);
    for i in 0..ns as u64 {
        let partners: Vec<usize> = (0..no as u64).filter(|&a| t.chi(i, a)).map(|a| a as usize).collect();
        let p = BigRational::new(BigInt::one(), BigInt::from(partners.len()));
        rows.push(partners.into_iter().map(|a| (ns + a, p.clone())).collect());
    }
    for a in 0..no as u64 {
        let partners: Vec<usize> = (0..ns as u64).filter(|&i| t.chi(i, a)).map(|i| i as usize).collect();
        let p = BigRational::new(BigInt::one(), BigInt::from(partners.len()));
        rows.push(partners.into_iter().map(|i| (i, p.clone())).collect());
    }
    let masks = (0..ns as u64).chain(0..no as u64).collect();
    let chain = ExactTransitionMatrix::from_rows(masks, rows)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let sigma = semantics::exact_pi_sigma(graph, limits)?.probabilities();
    let omega = semantics::exact_pi_omega(graph, limits)?.probabilities();
    let pi = sigma.iter().chain(&omega).map(|p| p * &half).collect();
    Ok((chain, pi))
}

pub fn sw_joint_conductance(
    g: &CounterexampleGraph,
    limits: &EnumerationLimits,
) -> Result<SwJointReport> {
    let (chain, pi) = sw_joint_chain(g, limits)?;
    let ns = 1usize << g.graph().u_count();
    let k = chain.num_states();
    let u_prime = (1u64 << g.n()) - 1;
    let m = g.m();
    let is_sigma = |x: usize| x < ns;
    let low = |x: usize| {
        let mask = chain.mask(x);
        if is_sigma(x) {
            mask & u_prime == 0
        } else {
            OmegaSide::of_weight(m, weight_of_mask(g, mask)) == OmegaSide::Low
        }
    };
    let select = |sigma: bool, want_low: bool| -> Vec<bool> {
        (0..k).map(|x| is_sigma(x) == sigma && low(x) == want_low).collect()
    };
    let sigma0 = select(true, true);
    let sigma1 = select(true, false);
    let omega0 = select(false, true);
    let omega1 = select(false, false);
    let s: Vec<bool> = (0..k).map(low).collect();
    let t: Vec<bool> = s.iter().map(|b| !b).collect();

    let f_s0_o1 = flow(&chain, &pi, &sigma0, &omega1);
    let f_o0_s1 = flow(&chain, &pi, &omega0, &sigma1);
    let f_s1_o0 = flow(&chain, &pi, &sigma1, &omega0);
    let total = flow(&chain, &pi, &s, &t);
    let smaller = mass(&pi, &s).min(mass(&pi, &t));
    let conductance = &total / &smaller;
    Ok(SwJointReport {
        n: g.n(),
        m,
        sigma_states: ns,
        omega_states: k - ns,
        stationary_verified: chain.is_stationary(&pi),
        flow_sigma0_to_omega1: (&f_s0_o1).into(),
        flow_omega0_to_sigma1: (&f_o0_s1).into(),
        flow_sigma1_to_omega0: (&f_s1_o0).into(),
        total_cut_flow: (&total).into(),
        pi_s: (&mass(&pi, &s)).into(),
        conductance_f64: ratio_to_f64(&conductance),
        conductance: (&conductance).into(),
        reversibility_holds: f_o0_s1 == f_s1_o0,
        decomposition_holds: total == &f_s0_o1 + &f_o0_s1,
    })
}
