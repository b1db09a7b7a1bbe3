//! The consistency relation between vertex subsets `I ⊆ U` and edge subsets
//! `A ⊆ E`, the two marginals of the uniform distribution on consistent
//! pairs, and exact samplers for the conditionals.
//!
//! Orientation: the incidence matrix of `A` has rows indexed by `U` and
//! columns by `V`. `(I, A)` is consistent iff `transpose(incidence(A)) · 1_I
//! = 0`, i.e. every `v` has an even number of `A`-edges into `I`. Hence
//! `|{I : χ(I,A)}| = 2^{|U| - rank(A)}` and `|{A : χ(I,A)}| = 2^{|E| - |N(I)|}`.

use crate::error::{Error, Result};
use crate::gf2::{self, GF2Matrix, GF2Vector};
use crate::graphs::{BipartiteGraph, CounterexampleGraph};
use num_bigint::{BigInt, BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

/// Subset of the left side `U` (a Σ-state).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSubset(pub GF2Vector);

/// Subset of the edge set (an Ω-state).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeSubset(pub GF2Vector);

macro_rules! subset_impl {
    ($t:ident) => {
        impl $t {
            pub fn empty(len: usize) -> Self {
                $t(GF2Vector::zeros(len))
            }
            pub fn full(len: usize) -> Self {
                $t(GF2Vector::from_indices(len, 0..len))
            }
            pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
                $t(GF2Vector::from_indices(len, idx))
            }
            pub fn from_mask(len: usize, mask: u64) -> Self {
                $t(GF2Vector::from_u64(len, mask))
            }
            pub fn mask(&self) -> u64 {
                self.0.to_u64()
            }
            #[inline]
            pub fn contains(&self, i: usize) -> bool {
                self.0.get(i)
            }
            #[inline]
            pub fn set(&mut self, i: usize, value: bool) {
                self.0.set(i, value)
            }
            #[inline]
            pub fn toggle(&mut self, i: usize) {
                self.0.flip(i)
            }
            #[inline]
            pub fn universe_len(&self) -> usize {
                self.0.len()
            }
            #[inline]
            pub fn count(&self) -> usize {
                self.0.count_ones()
            }
            pub fn is_empty(&self) -> bool {
                self.0.is_zero()
            }
            pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
                self.0.iter_ones()
            }
            /// Size of the symmetric difference.
            pub fn distance(&self, other: &Self) -> usize {
                let mut x = self.0.clone();
                x.xor_assign(&other.0);
                x.count_ones()
            }
        }
    };
}
subset_impl!(VertexSubset);
subset_impl!(EdgeSubset);

/// Caps on exhaustive enumeration. Defaults keep the worst loop near 2^26.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationLimits {
    /// Total vertices for independent-set counting.
    pub max_vertices: usize,
    /// Total vertices for brute force over all vertex subsets.
    pub max_brute_vertices: usize,
    /// `|U|` for the closed form of the Σ-marginal.
    pub max_u_closed_form: usize,
    /// `|U| + |E|` for enumeration of all pairs.
    pub max_pair_bits: usize,
    /// `|E|` for the Ω-marginal.
    pub max_edges: usize,
    /// States of an explicit transition matrix.
    pub max_states: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_vertices: 26,
            max_brute_vertices: 22,
            max_u_closed_form: 20,
            max_pair_bits: 24,
            max_edges: 22,
            max_states: 1 << 16,
        }
    }
}

/// Exact distribution over an enumerated state space; state `s` has
/// probability `weights[s] / total`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution {
    weights: Vec<BigUint>,
    total: BigUint,
}

#[derive(Serialize)]
struct ExactDistributionJson {
    states: usize,
    weights: Vec<String>,
    total: String,
}

impl ExactDistribution {
    pub fn new(weights: Vec<BigUint>) -> Result<Self> {
        let total: BigUint = weights.iter().sum();
        if total.is_zero() {
            return Err(Error::InvalidParameter("distribution with zero total weight".into()));
        }
        Ok(ExactDistribution { weights, total })
    }

    pub fn uniform(states: usize) -> Result<Self> {
        Self::new(vec![BigUint::one(); states])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[BigUint] {
        &self.weights
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn probability(&self, s: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.weights[s].clone()),
            BigInt::from(self.total.clone()),
        )
    }

    pub fn probabilities(&self) -> Vec<BigRational> {
        (0..self.len()).map(|s| self.probability(s)).collect()
    }

    /// Total probability of the states selected by `pred`.
    pub fn mass(&self, mut pred: impl FnMut(usize) -> bool) -> BigRational {
        let w: BigUint = (0..self.len())
            .filter(|&s| pred(s))
            .map(|s| &self.weights[s])
            .sum();
        BigRational::new(BigInt::from(w), BigInt::from(self.total.clone()))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probabilities().iter().map(crate::report::ratio_to_f64).collect()
    }

    /// Equality of the normalized distributions.
    pub fn same_distribution(&self, other: &ExactDistribution) -> bool {
        self.len() == other.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| a * &other.total == b * &self.total)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ExactDistributionJson {
            states: self.len(),
            weights: self.weights.iter().map(|w| w.to_string()).collect(),
            total: self.total.to_string(),
        })
        .expect("plain data serializes")
    }
}

/// Does every right vertex have even degree in the `A`-edges incident to `I`?
pub fn chi(g: &BipartiteGraph, i: &VertexSubset, a: &EdgeSubset) -> bool {
    assert_eq!(i.universe_len(), g.u_count());
    assert_eq!(a.universe_len(), g.edge_count());
    (0..g.v_count()).all(|v| {
        g.v_neighbors(v)
            .iter()
            .filter(|&&(u, e)| i.contains(u) && a.contains(e))
            .count()
            % 2
            == 0
    })
}

/// Incidence matrix of `A`: rows `U`, columns `V`.
pub fn incidence_matrix(g: &BipartiteGraph, a: &EdgeSubset) -> GF2Matrix {
    let mut m = GF2Matrix::zeros(g.u_count(), g.v_count());
    for e in a.iter() {
        let (u, v) = g.edge(e);
        m.set(u, v, true);
    }
    m
}

pub fn rank_of(g: &BipartiteGraph, a: &EdgeSubset) -> usize {
    incidence_matrix(g, a).rank()
}

/// `N(I) ⊆ V`.
pub fn neighborhood(g: &BipartiteGraph, i: &VertexSubset) -> GF2Vector {
    let mut n = GF2Vector::zeros(g.v_count());
    for u in i.iter() {
        for &(v, _) in g.u_neighbors(u) {
            n.set(v, true);
        }
    }
    n
}

/// Per-vertex masks used by the mask-level enumerations (all sizes <= 64).
pub(crate) struct MaskTables {
    /// Edge mask of the edges at each `u`.
    pub u_edges: Vec<u64>,
    /// Edge mask of the edges at each `v`.
    pub v_edges: Vec<u64>,
    /// `V`-mask of the neighbours of each `u`.
    pub u_nbrs: Vec<u64>,
    /// `U`-mask of the neighbours of each `v`.
    pub v_nbrs: Vec<u64>,
}

impl MaskTables {
    pub fn new(g: &BipartiteGraph) -> Result<Self> {
        for (what, size) in [
            ("left side", g.u_count()),
            ("right side", g.v_count()),
            ("edge set", g.edge_count()),
        ] {
            if size > 64 {
                return Err(Error::too_large(what, size, 64));
            }
        }
        let mut t = MaskTables {
            u_edges: vec![0; g.u_count()],
            v_edges: vec![0; g.v_count()],
            u_nbrs: vec![0; g.u_count()],
            v_nbrs: vec![0; g.v_count()],
        };
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            t.u_edges[u] |= 1 << e;
            t.v_edges[v] |= 1 << e;
            t.u_nbrs[u] |= 1 << v;
            t.v_nbrs[v] |= 1 << u;
        }
        Ok(t)
    }

    pub fn edges_at(&self, i_mask: u64) -> u64 {
        bits(i_mask).fold(0, |acc, u| acc | self.u_edges[u])
    }

    pub fn neighborhood(&self, i_mask: u64) -> u64 {
        bits(i_mask).fold(0, |acc, u| acc | self.u_nbrs[u])
    }

    pub fn chi(&self, i_mask: u64, a_mask: u64) -> bool {
        let live = a_mask & self.edges_at(i_mask);
        self.v_edges.iter().all(|&ve| (live & ve).count_ones().is_multiple_of(2))
    }

    pub fn rank(&self, g: &BipartiteGraph, a_mask: u64) -> usize {
        let mut rows = vec![0u64; g.u_count()];
        for e in bits(a_mask) {
            let (u, v) = g.edge(e);
            rows[u] |= 1 << v;
        }
        gf2::rank_single_word(&mut rows)
    }
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let b = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(b)
    })
}

fn pow2(k: usize) -> BigUint {
    BigUint::one() << k
}

/// Number of independent sets, enumerating subsets of the smaller side and
/// counting the free vertices on the other side.
pub fn count_independent_sets(g: &BipartiteGraph, limits: &EnumerationLimits) -> Result<BigUint> {
    if g.vertex_count() > limits.max_vertices {
        return Err(Error::too_large("vertex set", g.vertex_count(), limits.max_vertices));
    }
    let t = MaskTables::new(g)?;
    let (small, small_nbrs, other) = if g.u_count() <= g.v_count() {
        (g.u_count(), &t.u_nbrs, g.v_count())
    } else {
        (g.v_count(), &t.v_nbrs, g.u_count())
    };
    let mut total = BigUint::zero();
    for s in 0u64..1 << small {
        let blocked = bits(s).fold(0u64, |acc, x| acc | small_nbrs[x]);
        total += pow2(other - blocked.count_ones() as usize);
    }
    Ok(total)
}

/// Every independent set of `g`, as a mask with `U` in bits `0..|U|` and `V`
/// in bits `|U|..|U|+|V|`, by brute force over all vertex subsets.
pub fn independent_sets_brute(g: &BipartiteGraph, limits: &EnumerationLimits) -> Result<Vec<u64>> {
    let nv = g.vertex_count();
    if nv > limits.max_brute_vertices {
        return Err(Error::too_large("vertex set", nv, limits.max_brute_vertices));
    }
    let uc = g.u_count();
    let edge_masks: Vec<u64> = g
        .edges()
        .iter()
        .map(|&(u, v)| (1u64 << u) | (1u64 << (uc + v)))
        .collect();
    Ok((0u64..1 << nv)
        .filter(|&j| edge_masks.iter().all(|&em| j & em != em))
        .collect())
}

/// Σ-marginal from the closed form `weight(I) = 2^{|E| - |N(I)|}`, indexed
/// by the mask of `I`.
pub fn exact_pi_sigma(g: &BipartiteGraph, limits: &EnumerationLimits) -> Result<ExactDistribution> {
    if g.u_count() > limits.max_u_closed_form {
        return Err(Error::too_large("left side", g.u_count(), limits.max_u_closed_form));
    }
    let t = MaskTables::new(g)?;
    let e = g.edge_count();
    let weights = (0u64..1 << g.u_count())
        .map(|i| pow2(e - t.neighborhood(i).count_ones() as usize))
        .collect();
    ExactDistribution::new(weights)
}

fn check_pairs(g: &BipartiteGraph, limits: &EnumerationLimits) -> Result<MaskTables> {
    let bits = g.u_count() + g.edge_count();
    if bits > limits.max_pair_bits {
        return Err(Error::too_large("pair space (|U|+|E|)", bits, limits.max_pair_bits));
    }
    MaskTables::new(g)
}

/// Σ-marginal by counting consistent pairs directly.
pub fn exact_pi_sigma_by_pairs(
    g: &BipartiteGraph,
    limits: &EnumerationLimits,
) -> Result<ExactDistribution> {
    let t = check_pairs(g, limits)?;
    let weights = (0u64..1 << g.u_count())
        .map(|i| {
            let c = (0u64..1 << g.edge_count()).filter(|&a| t.chi(i, a)).count();
            BigUint::from(c)
        })
        .collect();
    ExactDistribution::new(weights)
}

/// Ω-marginal from `weight(A) = 2^{|U| - rank(A)}`, indexed by the mask of `A`.
pub fn exact_pi_omega(g: &BipartiteGraph, limits: &EnumerationLimits) -> Result<ExactDistribution> {
    if g.edge_count() > limits.max_edges {
        return Err(Error::too_large("edge set", g.edge_count(), limits.max_edges));
    }
    let t = MaskTables::new(g)?;
    let uc = g.u_count();
    let weights = (0u64..1 << g.edge_count())
        .map(|a| pow2(uc - t.rank(g, a)))
        .collect();
    ExactDistribution::new(weights)
}

/// Ω-marginal by counting consistent pairs directly.
pub fn exact_pi_omega_by_pairs(
    g: &BipartiteGraph,
    limits: &EnumerationLimits,
) -> Result<ExactDistribution> {
    let t = check_pairs(g, limits)?;
    let weights = (0u64..1 << g.edge_count())
        .map(|a| {
            let c = (0u64..1 << g.u_count()).filter(|&i| t.chi(i, a)).count();
            BigUint::from(c)
        })
        .collect();
    ExactDistribution::new(weights)
}

/// Distribution of `J ∩ U` for `J` uniform over independent sets of `g`, by
/// brute force over all vertex subsets.
pub fn trace_distribution(g: &BipartiteGraph, limits: &EnumerationLimits) -> Result<ExactDistribution> {
    let u_mask = (1u64 << g.u_count()) - 1;
    let mut counts = vec![BigUint::zero(); 1 << g.u_count()];
    for j in independent_sets_brute(g, limits)? {
        counts[(j & u_mask) as usize] += 1u32;
    }
    ExactDistribution::new(counts)
}

/// Mismatches found by [`consistency_count_check`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConsistencyCounts {
    pub vertex_subsets_checked: usize,
    pub edge_subsets_checked: usize,
    /// `I` whose partner count differs from `2^{|E| - |N(I)|}`.
    pub vertex_mismatches: Vec<u64>,
    /// `A` whose partner count differs from `2^{|U| - rank(A)}`.
    pub edge_mismatches: Vec<u64>,
}

impl ConsistencyCounts {
    pub fn passes(&self) -> bool {
        self.vertex_mismatches.is_empty() && self.edge_mismatches.is_empty()
    }
}

/// Count consistent partners of every `I` and every `A` by brute force and
/// compare with the closed forms.
pub fn consistency_count_check(g: &BipartiteGraph, limits: &EnumerationLimits) -> Result<ConsistencyCounts> {
    let bits_needed = g.u_count() + g.edge_count();
    if bits_needed > limits.max_pair_bits {
        return Err(Error::too_large("pair space (|U|+|E|)", bits_needed, limits.max_pair_bits));
    }
    let t = MaskTables::new(g)?;
    let (uc, ec) = (g.u_count(), g.edge_count());
    let mut per_i = vec![0u64; 1 << uc];
    let mut per_a = vec![0u64; 1 << ec];
    for i in 0u64..1 << uc {
        for a in 0u64..1 << ec {
            if t.chi(i, a) {
                per_i[i as usize] += 1;
                per_a[a as usize] += 1;
            }
        }
    }
    let mut out = ConsistencyCounts {
        vertex_subsets_checked: per_i.len(),
        edge_subsets_checked: per_a.len(),
        ..Default::default()
    };
    for (i, &c) in per_i.iter().enumerate() {
        let nbrs = neighborhood(g, &VertexSubset::from_mask(uc, i as u64)).count_ones();
        if c != 1u64 << (ec - nbrs) {
            out.vertex_mismatches.push(i as u64);
        }
    }
    for (a, &c) in per_a.iter().enumerate() {
        let r = rank_of(g, &EdgeSubset::from_mask(ec, a as u64));
        if c != 1u64 << (uc - r) {
            out.edge_mismatches.push(a as u64);
        }
    }
    Ok(out)
}

/// Whether the Σ-marginal equals the trace on `U` of a uniform independent set.
pub fn marginal_equivalence_check(g: &BipartiteGraph, limits: &EnumerationLimits) -> Result<bool> {
    let sigma = exact_pi_sigma(g, limits)?;
    let trace = trace_distribution(g, limits)?;
    Ok(sigma.same_distribution(&trace))
}

/// Which block of the Σ partition a state lies in, according to `I ∩ U'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaSide {
    /// `I ∩ U' = ∅`.
    Avoiding,
    /// `I ∩ U' ≠ ∅`.
    Meeting,
}

impl SigmaSide {
    pub fn of(g: &CounterexampleGraph, i: &VertexSubset) -> SigmaSide {
        if g.u_prime().any(|u| i.contains(u)) {
            SigmaSide::Meeting
        } else {
            SigmaSide::Avoiding
        }
    }

    pub fn opposite(self) -> SigmaSide {
        match self {
            SigmaSide::Avoiding => SigmaSide::Meeting,
            SigmaSide::Meeting => SigmaSide::Avoiding,
        }
    }
}

impl std::str::FromStr for SigmaSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "avoiding" => Ok(SigmaSide::Avoiding),
            "meeting" => Ok(SigmaSide::Meeting),
            other => Err(Error::InvalidParameter(format!(
                "unknown side {other:?} (expected avoiding or meeting)"
            ))),
        }
    }
}

/// `3^m` and `(2^n - 1) 2^m`: the independent sets avoiding and meeting `U'`.
pub fn side_counts(n: usize, m: usize) -> (BigUint, BigUint) {
    let avoiding = BigUint::from(3u32).pow(m as u32);
    let meeting = (pow2(n) - BigUint::one()) * pow2(m);
    (avoiding, meeting)
}

/// `α = 3^m / (3^m + (2^n - 1) 2^m)`, the Σ-mass of the avoiding side.
pub fn alpha(n: usize, m: usize) -> BigRational {
    let (a, b) = side_counts(n, m);
    BigRational::new(BigInt::from(a.clone()), BigInt::from(a + b))
}

/// Exact draw from the Σ-marginal of a counterexample graph, conditioned on
/// `side`.
pub fn sample_pi_sigma_on_side<R: Rng + ?Sized>(
    g: &CounterexampleGraph,
    side: SigmaSide,
    rng: &mut R,
) -> VertexSubset {
    let mut i = VertexSubset::empty(g.graph().u_count());
    match side {
        SigmaSide::Avoiding => {
            // each matching edge: {}, {v}, {u''} equally likely
            for u in g.u_double_prime() {
                if rng.gen_range(0..3) == 0 {
                    i.set(u, true);
                }
            }
        }
        SigmaSide::Meeting => {
            loop {
                for u in g.u_prime() {
                    i.set(u, rng.gen::<bool>());
                }
                if g.u_prime().any(|u| i.contains(u)) {
                    break;
                }
            }
            for u in g.u_double_prime() {
                if rng.gen::<bool>() {
                    i.set(u, true);
                }
            }
        }
    }
    i
}

/// Exact draw from the Σ-marginal of a counterexample graph using its
/// two-block structure.
pub fn sample_pi_sigma_structured<R: Rng + ?Sized>(
    g: &CounterexampleGraph,
    rng: &mut R,
) -> VertexSubset {
    let (avoiding, meeting) = side_counts(g.n(), g.m());
    let total = &avoiding + meeting;
    let side = if rng.gen_biguint_below(&total) < avoiding {
        SigmaSide::Avoiding
    } else {
        SigmaSide::Meeting
    };
    sample_pi_sigma_on_side(g, side, rng)
}

/// Uniform `A` among those consistent with `I`.
///
/// At each right vertex `v`, edges to `U \ I` are fair coins; of the `d`
/// edges into `I`, the first `d - 1` are fair coins and the last fixes even
/// parity.
pub fn sample_a_given_i<R: Rng + ?Sized>(
    g: &BipartiteGraph,
    i: &VertexSubset,
    rng: &mut R,
) -> EdgeSubset {
    let mut a = EdgeSubset::empty(g.edge_count());
    for v in 0..g.v_count() {
        let mut parity = false;
        let mut last_constrained = None;
        for &(u, e) in g.v_neighbors(v) {
            if i.contains(u) {
                if let Some(prev) = last_constrained.replace(e) {
                    let take = rng.gen::<bool>();
                    a.set(prev, take);
                    parity ^= take;
                }
            } else if rng.gen::<bool>() {
                a.set(e, true);
            }
        }
        if let Some(last) = last_constrained {
            a.set(last, parity);
        }
    }
    a
}

/// Uniform `I` among those consistent with `A`: a uniform kernel element of
/// `transpose(incidence(A))`.
pub fn sample_i_given_a<R: Rng + ?Sized>(
    g: &BipartiteGraph,
    a: &EdgeSubset,
    rng: &mut R,
) -> VertexSubset {
    let mut system = GF2Matrix::zeros(g.v_count(), g.u_count());
    for e in a.iter() {
        let (u, v) = g.edge(e);
        system.set(v, u, true);
    }
    VertexSubset(gf2::sample_kernel_uniform(&system, rng))
}
