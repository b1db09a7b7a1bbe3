//! Markov chains on independent sets, edge subsets and left-vertex subsets,
//! with exact transition matrices for instances small enough to enumerate.

use crate::analysis::SparseStochastic;
use crate::error::{Error, Result};
use crate::gf2::{GF2Matrix, GF2Vector};
use crate::graphs::BipartiteGraph;
use crate::report::ratio_to_f64;
use crate::semantics::{
    self, bits, sample_a_given_i, sample_i_given_a, EdgeSubset, EnumerationLimits, MaskTables,
    VertexSubset,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// A vertex set of `U ∪ V`, with `U` at positions `0..|U|` and `V` after it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndependentSet(GF2Vector);

impl IndependentSet {
    pub fn empty(g: &BipartiteGraph) -> Self {
        IndependentSet(GF2Vector::zeros(g.vertex_count()))
    }

    pub fn new(g: &BipartiteGraph, vertices: GF2Vector) -> Result<Self> {
        if vertices.len() != g.vertex_count() {
            return Err(Error::LengthMismatch {
                left: vertices.len(),
                right: g.vertex_count(),
            });
        }
        let uc = g.u_count();
        let independent = g
            .edges()
            .iter()
            .all(|&(u, v)| !(vertices.get(u) && vertices.get(uc + v)));
        if !independent {
            return Err(Error::NotIndependent);
        }
        Ok(IndependentSet(vertices))
    }

    pub fn vertices(&self) -> &GF2Vector {
        &self.0
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.get(x)
    }

    /// Whether `x` could be added without creating an edge.
    fn can_add(&self, g: &BipartiteGraph, x: usize) -> bool {
        let uc = g.u_count();
        if x < uc {
            g.u_neighbors(x).iter().all(|&(v, _)| !self.0.get(uc + v))
        } else {
            g.v_neighbors(x - uc).iter().all(|&(u, _)| !self.0.get(u))
        }
    }
}

/// A Markov chain given by its one-step sampler.
pub trait MarkovKernel {
    type State: Clone;

    fn name(&self) -> &'static str;

    fn step<R: Rng + ?Sized>(&self, state: &Self::State, rng: &mut R) -> Self::State;
}

/// Single-site flip chain on independent sets: each of the `2N` moves
/// (vertex, fair coin) has probability `1/2N`; heads toggles the vertex when
/// the result is still independent.
#[derive(Clone, Copy, Debug)]
pub struct SingleSiteFlip<'g> {
    pub graph: &'g BipartiteGraph,
}

impl MarkovKernel for SingleSiteFlip<'_> {
    type State = IndependentSet;

    fn name(&self) -> &'static str {
        KernelName::SingleSite.as_str()
    }

    fn step<R: Rng + ?Sized>(&self, state: &IndependentSet, rng: &mut R) -> IndependentSet {
        let g = self.graph;
        let mut next = state.clone();
        if g.vertex_count() == 0 {
            return next;
        }
        let x = rng.gen_range(0..g.vertex_count());
        if rng.gen::<bool>() && (state.contains(x) || state.can_add(g, x)) {
            next.0.flip(x);
        }
        next
    }
}

pub fn single_site_flip_step<R: Rng + ?Sized>(
    g: &BipartiteGraph,
    state: &IndependentSet,
    rng: &mut R,
) -> Result<IndependentSet> {
    // revalidate: IndependentSet may have been built for another graph
    let state = IndependentSet::new(g, state.0.clone())?;
    Ok(SingleSiteFlip { graph: g }.step(&state, rng))
}

/// Metropolis single-bond flip with stationary law `∝ 2^{-rank(A)}`: flip a
/// uniform edge and accept with probability `min(1, 2^{rank(A) - rank(A')})`.
#[derive(Clone, Copy, Debug)]
pub struct BondFlip<'g> {
    pub graph: &'g BipartiteGraph,
}

impl MarkovKernel for BondFlip<'_> {
    type State = EdgeSubset;

    fn name(&self) -> &'static str {
        KernelName::BondFlip.as_str()
    }

    fn step<R: Rng + ?Sized>(&self, state: &EdgeSubset, rng: &mut R) -> EdgeSubset {
        let g = self.graph;
        if g.edge_count() == 0 {
            return state.clone();
        }
        let e = rng.gen_range(0..g.edge_count());
        let mut proposal = state.clone();
        proposal.toggle(e);
        let before = semantics::rank_of(g, state);
        let after = semantics::rank_of(g, &proposal);
        if after <= before || rng.gen::<bool>() {
            proposal
        } else {
            state.clone()
        }
    }
}

pub fn bond_flip_step<R: Rng + ?Sized>(
    g: &BipartiteGraph,
    state: &EdgeSubset,
    rng: &mut R,
) -> EdgeSubset {
    BondFlip { graph: g }.step(state, rng)
}

/// Bond-flip trajectory that keeps the incidence matrix and its rank between
/// steps. Same transition law as [`BondFlip`].
#[derive(Clone, Debug)]
pub struct BondFlipWalker<'g> {
    graph: &'g BipartiteGraph,
    state: EdgeSubset,
    incidence: GF2Matrix,
    rank: usize,
}

impl<'g> BondFlipWalker<'g> {
    pub fn new(graph: &'g BipartiteGraph, state: EdgeSubset) -> Self {
        let incidence = semantics::incidence_matrix(graph, &state);
        let rank = incidence.rank();
        BondFlipWalker {
            graph,
            state,
            incidence,
            rank,
        }
    }

    pub fn state(&self) -> &EdgeSubset {
        &self.state
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// One step; returns the flipped edge if the move was accepted.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        let ec = self.graph.edge_count();
        if ec == 0 {
            return None;
        }
        let e = rng.gen_range(0..ec);
        let (u, v) = self.graph.edge(e);
        self.incidence.flip(u, v);
        let after = self.incidence.rank();
        if after <= self.rank || rng.gen::<bool>() {
            self.rank = after;
            self.state.toggle(e);
            Some(e)
        } else {
            self.incidence.flip(u, v);
            None
        }
    }
}

/// Swendsen-Wang-style chain on left-vertex subsets: `I -> A -> I'`, each
/// half-step uniform among consistent partners.
#[derive(Clone, Copy, Debug)]
pub struct SwStyle<'g> {
    pub graph: &'g BipartiteGraph,
}

impl MarkovKernel for SwStyle<'_> {
    type State = VertexSubset;

    fn name(&self) -> &'static str {
        KernelName::Sw.as_str()
    }

    fn step<R: Rng + ?Sized>(&self, state: &VertexSubset, rng: &mut R) -> VertexSubset {
        let a = sample_a_given_i(self.graph, state, rng);
        sample_i_given_a(self.graph, &a, rng)
    }
}

pub fn sw_style_step<R: Rng + ?Sized>(
    g: &BipartiteGraph,
    state: &VertexSubset,
    rng: &mut R,
) -> VertexSubset {
    SwStyle { graph: g }.step(state, rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelName {
    SingleSite,
    BondFlip,
    Sw,
}

impl KernelName {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelName::SingleSite => "single-site",
            KernelName::BondFlip => "bond-flip",
            KernelName::Sw => "sw",
        }
    }
}

impl fmt::Display for KernelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single-site" => Ok(KernelName::SingleSite),
            "bond-flip" => Ok(KernelName::BondFlip),
            "sw" => Ok(KernelName::Sw),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel {other:?} (expected single-site, bond-flip or sw)"
            ))),
        }
    }
}

/// Exact transition matrix over an enumerated state space. State `i` is the
/// subset with bit mask `masks[i]` of its ground set (vertices or edges), so
/// `|x ⊕ y|` is the popcount of the mask XOR.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactTransitionMatrix {
    masks: Vec<u64>,
    rows: Vec<Vec<(usize, BigRational)>>,
}

fn rat(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl ExactTransitionMatrix {
    /// Rows must sum to exactly 1 with nonnegative entries and distinct
    /// targets.
    pub fn from_rows(masks: Vec<u64>, rows: Vec<Vec<(usize, BigRational)>>) -> Result<Self> {
        if masks.len() != rows.len() {
            return Err(Error::LengthMismatch {
                left: masks.len(),
                right: rows.len(),
            });
        }
        let mut clean = Vec::with_capacity(rows.len());
        for (r, row) in rows.into_iter().enumerate() {
            let mut merged: Vec<(usize, BigRational)> = Vec::with_capacity(row.len());
            let mut sum = BigRational::zero();
            let mut sorted = row;
            sorted.sort_by_key(|(j, _)| *j);
            for (j, p) in sorted {
                if j >= masks.len() || p < BigRational::zero() {
                    return Err(Error::InvalidParameter(format!("bad entry in row {r}")));
                }
                sum += &p;
                if p.is_zero() {
                    continue;
                }
                match merged.last_mut() {
                    Some((lj, lp)) if *lj == j => *lp += p,
                    _ => merged.push((j, p)),
                }
            }
            if !sum.is_one() {
                return Err(Error::NotStochastic {
                    row: r,
                    sum: ratio_to_f64(&sum),
                });
            }
            clean.push(merged);
        }
        Ok(ExactTransitionMatrix { masks, rows: clean })
    }

    pub fn identity(masks: Vec<u64>) -> Self {
        let rows = (0..masks.len()).map(|i| vec![(i, BigRational::one())]).collect();
        ExactTransitionMatrix { masks, rows }
    }

    /// Single-site flip chain; states are the independent sets of `g`.
    pub fn single_site(g: &BipartiteGraph, limits: &EnumerationLimits) -> Result<Self> {
        let masks = semantics::independent_sets_brute(g, limits)?;
        if masks.len() > limits.max_states {
            return Err(Error::too_large("state space", masks.len(), limits.max_states));
        }
        let index: HashMap<u64, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let nv = g.vertex_count();
        let rows = masks
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let mut row = Vec::new();
                let mut moves = 0;
                for x in 0..nv {
                    if let Some(&k) = index.get(&(j ^ (1 << x))) {
                        row.push((k, rat(1, 2 * nv)));
                        moves += 1;
                    }
                }
                if nv == 0 {
                    row.push((i, BigRational::one()));
                } else {
                    row.push((i, rat(2 * nv - moves, 2 * nv)));
                }
                row
            })
            .collect();
        Self::from_rows(masks, rows)
    }

    /// Metropolis bond-flip chain; states are all edge subsets.
    pub fn bond_flip(g: &BipartiteGraph, limits: &EnumerationLimits) -> Result<Self> {
        let ec = g.edge_count();
        if ec > limits.max_edges || (1usize << ec) > limits.max_states {
            return Err(Error::too_large("edge set", ec, limits.max_edges));
        }
        let t = MaskTables::new(g)?;
        let ranks: Vec<usize> = (0u64..1 << ec).map(|a| t.rank(g, a)).collect();
        let masks: Vec<u64> = (0u64..1 << ec).collect();
        let rows = masks
            .iter()
            .map(|&a| {
                let mut row = Vec::with_capacity(ec + 1);
                let mut hold = BigRational::one();
                for e in 0..ec {
                    let b = a ^ (1 << e);
                    let p = if ranks[b as usize] <= ranks[a as usize] {
                        rat(1, ec)
                    } else {
                        rat(1, 2 * ec)
                    };
                    hold -= &p;
                    row.push((b as usize, p));
                }
                row.push((a as usize, hold));
                row
            })
            .collect();
        Self::from_rows(masks, rows)
    }

    /// Composed SW-style kernel on left-vertex subsets:
    /// `P(I, I') = Σ_A χ(I,A) χ(I',A) / (#A consistent with I · #I consistent with A)`.
    pub fn sw(g: &BipartiteGraph, limits: &EnumerationLimits) -> Result<Self> {
        let bits_needed = g.u_count() + g.edge_count();
        if bits_needed > limits.max_pair_bits {
            return Err(Error::too_large("pair space (|U|+|E|)", bits_needed, limits.max_pair_bits));
        }
        let t = MaskTables::new(g)?;
        let uc = g.u_count();
        let ec = g.edge_count();
        let states = 1usize << uc;
        let mut dense = vec![vec![BigRational::zero(); states]; states];
        for a in 0u64..1 << ec {
            let consistent: Vec<usize> =
                (0u64..1 << uc).filter(|&i| t.chi(i, a)).map(|i| i as usize).collect();
            for &i in &consistent {
                let choices_of_a = 1usize << (ec - t.neighborhood(i as u64).count_ones() as usize);
                let p = rat(1, choices_of_a * consistent.len());
                for &j in &consistent {
                    dense[i][j] += &p;
                }
            }
        }
        let rows = dense
            .into_iter()
            .map(|r| r.into_iter().enumerate().filter(|(_, p)| !p.is_zero()).collect())
            .collect();
        Self::from_rows((0..states as u64).collect(), rows)
    }

    /// Exact matrix of `kernel` with its target stationary vector: uniform on
    /// independent sets, `π_Ω`, or `π_Σ`, indexed like the matrix.
    pub fn with_target(
        kernel: KernelName,
        g: &BipartiteGraph,
        limits: &EnumerationLimits,
    ) -> Result<(Self, Vec<BigRational>)> {
        match kernel {
            KernelName::SingleSite => {
                let p = Self::single_site(g, limits)?;
                let pi = vec![rat(1, p.num_states()); p.num_states()];
                Ok((p, pi))
            }
            KernelName::BondFlip => {
                let p = Self::bond_flip(g, limits)?;
                let pi = semantics::exact_pi_omega(g, limits)?;
                let v = p.masks.iter().map(|&a| pi.probability(a as usize)).collect();
                Ok((p, v))
            }
            KernelName::Sw => {
                let p = Self::sw(g, limits)?;
                let pi = semantics::exact_pi_sigma(g, limits)?;
                let v = p.masks.iter().map(|&i| pi.probability(i as usize)).collect();
                Ok((p, v))
            }
        }
    }

    pub fn num_states(&self) -> usize {
        self.masks.len()
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn mask(&self, i: usize) -> u64 {
        self.masks[i]
    }

    pub fn row(&self, i: usize) -> &[(usize, BigRational)] {
        &self.rows[i]
    }

    pub fn prob(&self, i: usize, j: usize) -> BigRational {
        self.rows[i]
            .iter()
            .find(|(k, _)| *k == j)
            .map_or_else(BigRational::zero, |(_, p)| p.clone())
    }

    /// `π P`.
    pub fn apply(&self, pi: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(pi.len(), self.num_states());
        let mut out = vec![BigRational::zero(); pi.len()];
        for (i, row) in self.rows.iter().enumerate() {
            if pi[i].is_zero() {
                continue;
            }
            for (j, p) in row {
                out[*j] += &pi[i] * p;
            }
        }
        out
    }

    pub fn is_stationary(&self, pi: &[BigRational]) -> bool {
        self.apply(pi) == pi
    }

    /// `π(x) P(x,y) = π(y) P(y,x)` for every pair.
    pub fn satisfies_detailed_balance(&self, pi: &[BigRational]) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter()
                .all(|(j, p)| &pi[i] * p == &pi[*j] * self.prob(*j, i))
        })
    }

    /// The unique stationary distribution, solved in exact arithmetic; `None`
    /// if it is not unique.
    pub fn exact_stationary(&self) -> Option<Vec<BigRational>> {
        let k = self.num_states();
        // columns: unknowns π_0..π_{k-1}, then right-hand side
        let mut sys = vec![vec![BigRational::zero(); k + 1]; k];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, p) in row {
                sys[*j][i] += p;
            }
        }
        for (j, eq) in sys.iter_mut().enumerate() {
            eq[j] -= BigRational::one();
        }
        // the balance equations have rank k-1; replace the last by Σπ = 1
        sys[k - 1] = vec![BigRational::one(); k + 1];
        for col in 0..k {
            let pivot = (col..k).find(|&r| !sys[r][col].is_zero())?;
            sys.swap(col, pivot);
            let inv = sys[col][col].recip();
            for x in sys[col].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = sys[col].clone();
            for (r, eq) in sys.iter_mut().enumerate() {
                if r != col && !eq[col].is_zero() {
                    let f = eq[col].clone();
                    for (x, y) in eq.iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
        }
        Some(sys.into_iter().map(|eq| eq[k].clone()).collect())
    }

    pub fn to_sparse_f64(&self) -> SparseStochastic {
        SparseStochastic::new(
            self.rows
                .iter()
                .map(|row| row.iter().map(|(j, p)| (*j, ratio_to_f64(p))).collect())
                .collect(),
        )
        .expect("exact rows are stochastic")
    }

    pub fn cautiousness_report(&self) -> CautiousnessReport {
        let d_observed = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .map(move |(j, _)| (self.masks[i] ^ self.masks[*j]).count_ones() as usize)
            })
            .max()
            .unwrap_or(0);
        CautiousnessReport { d_observed }
    }
}

/// Largest `|x ⊕ y|` over positive-probability transitions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CautiousnessReport {
    pub d_observed: usize,
}

impl CautiousnessReport {
    pub fn is_d_cautious_for(&self, d: usize) -> bool {
        self.d_observed <= d
    }
}

/// Independent-set masks (`U ∪ V` layout) of an exact single-site matrix,
/// expanded to an explicit independent set.
pub fn independent_set_from_mask(g: &BipartiteGraph, mask: u64) -> Result<IndependentSet> {
    IndependentSet::new(g, GF2Vector::from_u64(g.vertex_count(), mask))
}

/// `U`-indices of a left-vertex mask.
pub fn mask_vertices(mask: u64) -> Vec<usize> {
    bits(mask).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::CounterexampleGraph;
    use crate::rng;
    use crate::semantics::{exact_pi_omega, exact_pi_sigma};
    use crate::stats;

    fn limits() -> EnumerationLimits {
        EnumerationLimits::default()
    }

    fn r(a: usize, b: usize) -> BigRational {
        rat(a, b)
    }

    #[test]
    fn single_site_on_isolated_vertex() {
        let g = BipartiteGraph::new(1, 0, vec![]).unwrap();
        let p = ExactTransitionMatrix::single_site(&g, &limits()).unwrap();
        assert_eq!(p.prob(0, 1), r(1, 2));
        assert_eq!(p.prob(0, 0), r(1, 2));
    }

    #[test]
    fn single_site_on_k11() {
        let g = BipartiteGraph::complete(1).unwrap();
        let p = ExactTransitionMatrix::single_site(&g, &limits()).unwrap();
        // masks: ∅ = 0, {u} = 1, {v} = 2
        assert_eq!(p.masks(), &[0, 1, 2]);
        assert_eq!(p.prob(0, 1), r(1, 4));
        assert_eq!(p.prob(0, 2), r(1, 4));
        assert_eq!(p.prob(0, 0), r(1, 2));
    }

    #[test]
    fn single_site_uniform_stationary_on_k22() {
        let g = BipartiteGraph::complete(2).unwrap();
        let p = ExactTransitionMatrix::single_site(&g, &limits()).unwrap();
        assert_eq!(p.num_states(), 7);
        let uniform = vec![r(1, 7); 7];
        assert!(p.is_stationary(&uniform));
        assert!(p.satisfies_detailed_balance(&uniform));
        assert_eq!(p.exact_stationary().unwrap(), uniform);
        // power iteration in floating point
        let sparse = p.to_sparse_f64();
        let mut dist = vec![0.0; 7];
        dist[0] = 1.0;
        for _ in 0..2000 {
            dist = sparse.apply(&dist);
        }
        assert!(dist.iter().all(|x| (x - 1.0 / 7.0).abs() < 1e-12));
    }

    #[test]
    fn single_site_rejects_dependent_input() {
        let g = BipartiteGraph::complete(1).unwrap();
        let both = GF2Vector::from_u64(2, 0b11);
        assert!(matches!(IndependentSet::new(&g, both), Err(Error::NotIndependent)));
        let mut rr = rng::master(0);
        let empty = IndependentSet::empty(&g);
        let next = single_site_flip_step(&g, &empty, &mut rr).unwrap();
        assert!(IndependentSet::new(&g, next.vertices().clone()).is_ok());
    }

    #[test]
    fn bond_flip_on_k11() {
        let g = BipartiteGraph::complete(1).unwrap();
        let p = ExactTransitionMatrix::bond_flip(&g, &limits()).unwrap();
        assert_eq!(p.prob(0, 1), r(1, 2));
        assert_eq!(p.prob(1, 0), r(1, 1));
        let pi = exact_pi_omega(&g, &limits()).unwrap().probabilities();
        assert_eq!(pi, vec![r(2, 3), r(1, 3)]);
        assert_eq!(&pi[0] * p.prob(0, 1), &pi[1] * p.prob(1, 0));
    }

    #[test]
    fn bond_flip_on_g2() {
        let g = CounterexampleGraph::new(2).unwrap();
        let p = ExactTransitionMatrix::bond_flip(g.graph(), &limits()).unwrap();
        assert_eq!(p.num_states(), 64);
        let pi = exact_pi_omega(g.graph(), &limits()).unwrap();
        let exact = pi.probabilities();
        assert!(p.is_stationary(&exact));
        assert!(p.satisfies_detailed_balance(&exact));
        assert_eq!(p.exact_stationary().unwrap(), exact);
        assert_eq!(p.cautiousness_report().d_observed, 1);
        // every off-diagonal entry is 1/|E| or 1/2|E|
        for i in 0..64 {
            for (j, q) in p.row(i) {
                if *j != i {
                    assert!(*q == r(1, 6) || *q == r(1, 12));
                }
            }
        }
        let target = pi.to_f64();
        let sparse = p.to_sparse_f64();
        let mut dist = vec![0.0; 64];
        dist[63] = 1.0;
        for _ in 0..5000 {
            dist = sparse.apply(&dist);
        }
        assert!(dist.iter().zip(&target).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn sw_on_k11() {
        let g = BipartiteGraph::complete(1).unwrap();
        let p = ExactTransitionMatrix::sw(&g, &limits()).unwrap();
        assert_eq!(p.prob(0, 0), r(3, 4));
        assert_eq!(p.prob(0, 1), r(1, 4));
        assert_eq!(p.prob(1, 0), r(1, 2));
        assert_eq!(p.prob(1, 1), r(1, 2));
        assert_eq!(p.exact_stationary().unwrap(), vec![r(2, 3), r(1, 3)]);
    }

    #[test]
    fn sw_on_g2_is_reversible_with_sigma() {
        let g = CounterexampleGraph::new(2).unwrap();
        let p = ExactTransitionMatrix::sw(g.graph(), &limits()).unwrap();
        let pi = exact_pi_sigma(g.graph(), &limits()).unwrap().probabilities();
        assert!(p.is_stationary(&pi));
        assert!(p.satisfies_detailed_balance(&pi));
        assert_eq!(p.exact_stationary().unwrap(), pi);
    }

    #[test]
    fn cautiousness_of_reference_kernels() {
        let masks: Vec<u64> = (0..8).collect();
        assert_eq!(ExactTransitionMatrix::identity(masks.clone()).cautiousness_report().d_observed, 0);
        // swap two of three edges at once: A -> A ⊕ {e, f}
        let rows = masks
            .iter()
            .map(|&a| {
                [0b011u64, 0b101, 0b110]
                    .iter()
                    .map(|pair| ((a ^ pair) as usize, r(1, 3)))
                    .collect()
            })
            .collect();
        let swap = ExactTransitionMatrix::from_rows(masks, rows).unwrap();
        let report = swap.cautiousness_report();
        assert_eq!(report.d_observed, 2);
        assert!(report.is_d_cautious_for(2));
        assert!(!report.is_d_cautious_for(1));
    }

    #[test]
    fn from_rows_rejects_non_stochastic() {
        let err = ExactTransitionMatrix::from_rows(vec![0, 1], vec![vec![(0, r(1, 2))], vec![(1, r(1, 1))]]);
        assert!(matches!(err, Err(Error::NotStochastic { row: 0, .. })));
    }

    fn check_step_matches_row<K: MarkovKernel>(
        kernel: &K,
        p: &ExactTransitionMatrix,
        rows: &[usize],
        to_state: impl Fn(u64) -> K::State,
        to_mask: impl Fn(&K::State) -> u64,
        seed: u64,
    ) {
        let mut rr = rng::master(seed);
        let index: HashMap<u64, usize> = p.masks().iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let draws = 100_000;
        for &i in rows {
            let start = to_state(p.mask(i));
            let mut counts = vec![0usize; p.num_states()];
            for _ in 0..draws {
                counts[index[&to_mask(&kernel.step(&start, &mut rr))]] += 1;
            }
            let expected: Vec<f64> = (0..p.num_states())
                .map(|j| ratio_to_f64(&p.prob(i, j)) * draws as f64)
                .collect();
            let pv = stats::chi_square_p(&counts, &expected);
            assert!(pv > 1e-3 / rows.len() as f64, "row {i}: p={pv}");
        }
    }

    #[test]
    fn bond_flip_step_matches_exact_rows() {
        let g = CounterexampleGraph::new(2).unwrap();
        let p = ExactTransitionMatrix::bond_flip(g.graph(), &limits()).unwrap();
        check_step_matches_row(
            &BondFlip { graph: g.graph() },
            &p,
            &[0, 21, 63],
            |m| EdgeSubset::from_mask(6, m),
            EdgeSubset::mask,
            31,
        );
    }

    #[test]
    fn sw_step_matches_exact_rows() {
        let g = CounterexampleGraph::new(2).unwrap();
        let p = ExactTransitionMatrix::sw(g.graph(), &limits()).unwrap();
        check_step_matches_row(
            &SwStyle { graph: g.graph() },
            &p,
            &[0, 5, 15],
            |m| VertexSubset::from_mask(4, m),
            VertexSubset::mask,
            32,
        );
    }

    #[test]
    fn single_site_step_matches_exact_rows() {
        let g = BipartiteGraph::complete(2).unwrap();
        let p = ExactTransitionMatrix::single_site(&g, &limits()).unwrap();
        let rows: Vec<usize> = (0..p.num_states()).collect();
        check_step_matches_row(
            &SingleSiteFlip { graph: &g },
            &p,
            &rows,
            |m| independent_set_from_mask(&g, m).unwrap(),
            |s| s.vertices().to_u64(),
            33,
        );
    }

    #[test]
    fn walker_agrees_with_kernel_and_is_one_cautious() {
        let g = CounterexampleGraph::new(4).unwrap();
        let mut rr = rng::master(40);
        let mut walker = BondFlipWalker::new(g.graph(), EdgeSubset::empty(g.graph().edge_count()));
        for _ in 0..5000 {
            let before = walker.state().clone();
            walker.step(&mut rr);
            assert!(before.distance(walker.state()) <= 1);
            assert_eq!(walker.rank(), semantics::rank_of(g.graph(), walker.state()));
        }
    }

    #[test]
    fn sw_leave_rate_respects_union_bound() {
        let g = CounterexampleGraph::new(10).unwrap();
        let mut rr = rng::master(41);
        let trials = 2000;
        let mut leaves = 0;
        for _ in 0..trials {
            let i = semantics::sample_pi_sigma_on_side(&g, semantics::SigmaSide::Avoiding, &mut rr);
            let next = sw_style_step(g.graph(), &i, &mut rr);
            if semantics::SigmaSide::of(&g, &next) == semantics::SigmaSide::Meeting {
                leaves += 1;
            }
        }
        let bound = crate::report::ratio_to_f64(&crate::analysis::sw_leave_union_bound(10, g.m()));
        let freq = leaves as f64 / trials as f64;
        assert!(freq > 0.0 && freq < bound + 4.0 * (bound / trials as f64).sqrt(), "{freq} {bound}");
    }

    #[test]
    fn kernel_names_parse() {
        for k in [KernelName::SingleSite, KernelName::BondFlip, KernelName::Sw] {
            assert_eq!(k.as_str().parse::<KernelName>().unwrap(), k);
        }
        assert!("glauber".parse::<KernelName>().is_err());
    }
}
