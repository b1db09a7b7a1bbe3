//! Bipartite graphs, the slow-mixing counterexample family, and the text
//! file format.
//!
//! Vertices are numbered per side: `U = 0..u_count`, `V = 0..v_count`.
//! Edges are numbered in insertion order; that numbering is the bit order of
//! every edge subset in the crate.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::ops::Range;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    u_count: usize,
    v_count: usize,
    edges: Vec<(usize, usize)>,
    /// `(v, edge index)` for each `u`.
    u_adj: Vec<Vec<(usize, usize)>>,
    /// `(u, edge index)` for each `v`.
    v_adj: Vec<Vec<(usize, usize)>>,
}

impl BipartiteGraph {
    pub fn new(u_count: usize, v_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u >= u_count || v >= v_count {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) out of range for {u_count}x{v_count} graph"
                )));
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidParameter(format!("duplicate edge ({u}, {v})")));
            }
        }
        let mut u_adj = vec![Vec::new(); u_count];
        let mut v_adj = vec![Vec::new(); v_count];
        for (e, &(u, v)) in edges.iter().enumerate() {
            u_adj[u].push((v, e));
            v_adj[v].push((u, e));
        }
        Ok(BipartiteGraph {
            u_count,
            v_count,
            edges,
            u_adj,
            v_adj,
        })
    }

    /// `K_{k,k}`, edges row-major by left vertex.
    pub fn complete(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("complete bipartite graph needs k >= 1".into()));
        }
        Self::complete_with_sides(k, k)
    }

    pub fn complete_with_sides(a: usize, b: usize) -> Result<Self> {
        let edges = (0..a).flat_map(|u| (0..b).map(move |v| (u, v))).collect();
        Self::new(a, b, edges)
    }

    /// Each of the `u_count * v_count` possible edges present independently
    /// with probability `p`.
    pub fn random<R: Rng + ?Sized>(u_count: usize, v_count: usize, p: f64, rng: &mut R) -> Self {
        let edges = (0..u_count)
            .flat_map(|u| (0..v_count).map(move |v| (u, v)))
            .filter(|_| rng.gen_bool(p))
            .collect();
        Self::new(u_count, v_count, edges).expect("generated edges are valid")
    }

    /// Uniformly random graph with exactly `edge_count` edges, in shuffled order.
    pub fn random_with_edges<R: Rng + ?Sized>(
        u_count: usize,
        v_count: usize,
        edge_count: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let mut all: Vec<(usize, usize)> = (0..u_count)
            .flat_map(|u| (0..v_count).map(move |v| (u, v)))
            .collect();
        if edge_count > all.len() {
            return Err(Error::InvalidParameter(format!(
                "{edge_count} edges do not fit a {u_count}x{v_count} graph"
            )));
        }
        all.shuffle(rng);
        all.truncate(edge_count);
        Self::new(u_count, v_count, all)
    }

    #[inline]
    pub fn u_count(&self) -> usize {
        self.u_count
    }

    #[inline]
    pub fn v_count(&self) -> usize {
        self.v_count
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.u_count + self.v_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// `(v, edge index)` pairs incident to left vertex `u`.
    #[inline]
    pub fn u_neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.u_adj[u]
    }

    /// `(u, edge index)` pairs incident to right vertex `v`.
    #[inline]
    pub fn v_neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.v_adj[v]
    }

    /// Same graph with edges sorted; two graphs are the same up to edge
    /// numbering iff their normalizations are equal.
    pub fn normalized(&self) -> Self {
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        Self::new(self.u_count, self.v_count, edges).expect("already validated")
    }
}

/// `count` random graphs with `1 <= |U| <= max_u`, `1 <= |V| <= max_v` and
/// an edge count uniform on `0..=min(|U||V|, max_edges)`.
pub fn random_corpus<R: Rng + ?Sized>(
    count: usize,
    max_u: usize,
    max_v: usize,
    max_edges: usize,
    rng: &mut R,
) -> Result<Vec<BipartiteGraph>> {
    if max_u == 0 || max_v == 0 {
        return Err(Error::InvalidParameter("corpus sides must be positive".into()));
    }
    (0..count)
        .map(|_| {
            let u = rng.gen_range(1..=max_u);
            let v = rng.gen_range(1..=max_v);
            let k = rng.gen_range(0..=(u * v).min(max_edges));
            BipartiteGraph::random_with_edges(u, v, k, rng)
        })
        .collect()
}

/// The family `G_n`: `U'` (size `n`) joined completely to `V` (size `m`),
/// and `V` perfectly matched to `U''` (size `m`).
///
/// Left vertices: `U'` is `0..n`, `U''` is `n..n+m`. Edge `u*m + v` joins
/// `u` in `U'` to `v`; matching edge `n*m + i` joins `v = i` to `n + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleGraph {
    base: BipartiteGraph,
    n: usize,
    m: usize,
}

/// Whether `(3/2)^m <= 2^n - 1 < (3/2)^(m+1)`, in exact integers.
pub fn satisfies_size_relation(n: usize, m: usize) -> bool {
    let three = BigUint::from(3u32);
    let two = BigUint::from(2u32);
    let mersenne = (BigUint::one() << n) - BigUint::one();
    let lower = three.pow(m as u32) <= &mersenne * two.pow(m as u32);
    let upper = &mersenne * two.pow(m as u32 + 1) < three.pow(m as u32 + 1);
    lower && upper
}

/// The unique `m` with `(3/2)^m <= 2^n - 1 < (3/2)^(m+1)`.
pub fn matching_size_for(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("counterexample needs n >= 1".into()));
    }
    let mersenne = (BigUint::one() << n) - BigUint::one();
    let mut m = 0usize;
    let mut three_pow = BigUint::from(3u32); // 3^(m+1)
    let mut two_pow = BigUint::from(2u32); // 2^(m+1)
    while three_pow <= &mersenne * &two_pow {
        m += 1;
        three_pow *= 3u32;
        two_pow <<= 1;
    }
    Ok(m)
}

impl CounterexampleGraph {
    /// `G_n` with its defining `m`.
    pub fn new(n: usize) -> Result<Self> {
        let m = matching_size_for(n)?;
        Self::with_sizes(n, m)
    }

    /// Same construction with an arbitrary `m`, not tied to `n` by the size
    /// relation. The matching-weight structure under the two-stage sampler
    /// depends only on `n >= 1`, so this is how experiments reach matching
    /// sizes the family skips.
    pub fn with_sizes(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("counterexample needs n >= 1".into()));
        }
        let mut edges = Vec::with_capacity(n * m + m);
        for u in 0..n {
            for v in 0..m {
                edges.push((u, v));
            }
        }
        for i in 0..m {
            edges.push((n + i, i));
        }
        Ok(CounterexampleGraph {
            base: BipartiteGraph::new(n + m, m, edges)?,
            n,
            m,
        })
    }

    /// Recognize a graph with exactly the `with_sizes(n, m)` layout.
    pub fn from_graph(base: BipartiteGraph, n: usize, m: usize) -> Result<Self> {
        let expected = Self::with_sizes(n, m)?;
        if expected.base != base {
            return Err(Error::InvalidParameter(format!(
                "graph does not have the counterexample layout for n={n} m={m}"
            )));
        }
        Ok(expected)
    }

    #[inline]
    pub fn graph(&self) -> &BipartiteGraph {
        &self.base
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn satisfies_size_relation(&self) -> bool {
        satisfies_size_relation(self.n, self.m)
    }

    #[inline]
    pub fn u_prime(&self) -> Range<usize> {
        0..self.n
    }

    #[inline]
    pub fn u_double_prime(&self) -> Range<usize> {
        self.n..self.n + self.m
    }

    /// Edge indices of the matching `M`.
    #[inline]
    pub fn matching_edges(&self) -> Range<usize> {
        self.n * self.m..self.n * self.m + self.m
    }

    /// Edge index of `(u, v)` for `u` in `U'`.
    #[inline]
    pub fn complete_edge(&self, u: usize, v: usize) -> usize {
        debug_assert!(u < self.n && v < self.m);
        u * self.m + v
    }
}

impl AsRef<BipartiteGraph> for CounterexampleGraph {
    fn as_ref(&self) -> &BipartiteGraph {
        &self.base
    }
}

impl AsRef<BipartiteGraph> for BipartiteGraph {
    fn as_ref(&self) -> &BipartiteGraph {
        self
    }
}

pub fn serialize_graph(g: &BipartiteGraph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {} {}", g.u_count, g.v_count, g.edge_count()).unwrap();
    for &(u, v) in &g.edges {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn serialize_counterexample(g: &CounterexampleGraph) -> String {
    format!("# counterexample n={} m={}\n{}", g.n, g.m, serialize_graph(&g.base))
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("{what}: expected a nonnegative integer, found {tok:?}"),
    })
}

pub fn parse_graph(text: &str) -> Result<BipartiteGraph> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        match header {
            None => {
                if toks.len() != 3 {
                    return Err(Error::Parse {
                        line,
                        message: "header must be `<u_count> <v_count> <edge_count>`".into(),
                    });
                }
                header = Some((
                    parse_usize(toks[0], line, "u_count")?,
                    parse_usize(toks[1], line, "v_count")?,
                    parse_usize(toks[2], line, "edge_count")?,
                ));
            }
            Some((uc, vc, ec)) => {
                if toks.len() != 2 {
                    return Err(Error::Parse {
                        line,
                        message: "edge line must be `<u_index> <v_index>`".into(),
                    });
                }
                if edges.len() == ec {
                    return Err(Error::Parse {
                        line,
                        message: format!("more than the declared {ec} edges"),
                    });
                }
                let u = parse_usize(toks[0], line, "u_index")?;
                let v = parse_usize(toks[1], line, "v_index")?;
                if u >= uc || v >= vc {
                    return Err(Error::Parse {
                        line,
                        message: format!("edge ({u}, {v}) out of range for {uc}x{vc} graph"),
                    });
                }
                if !seen.insert((u, v)) {
                    return Err(Error::Parse {
                        line,
                        message: format!("duplicate edge ({u}, {v})"),
                    });
                }
                edges.push((u, v));
            }
        }
    }
    let Some((uc, vc, ec)) = header else {
        return Err(Error::Parse {
            line: last_line.max(1),
            message: "missing header".into(),
        });
    };
    if edges.len() != ec {
        return Err(Error::Parse {
            line: last_line,
            message: format!("declared {ec} edges, found {}", edges.len()),
        });
    }
    BipartiteGraph::new(uc, vc, edges)
}

/// `(n, m)` from a `# counterexample n=<n> m=<m>` comment, if present.
pub fn counterexample_tag(text: &str) -> Option<(usize, usize)> {
    text.lines().find_map(|l| {
        let rest = l.trim().strip_prefix('#')?.trim().strip_prefix("counterexample")?;
        let mut n = None;
        let mut m = None;
        for tok in rest.split_whitespace() {
            if let Some(x) = tok.strip_prefix("n=") {
                n = x.parse().ok();
            } else if let Some(x) = tok.strip_prefix("m=") {
                m = x.parse().ok();
            }
        }
        Some((n?, m?))
    })
}

pub fn parse_counterexample(text: &str) -> Result<CounterexampleGraph> {
    let (n, m) = counterexample_tag(text).ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing `# counterexample n=<n> m=<m>` header".into(),
    })?;
    CounterexampleGraph::from_graph(parse_graph(text)?, n, m)
}
