use std::path::PathBuf;
use std::str::FromStr;

use torpid_core::graphs::{self, BipartiteGraph, CounterexampleGraph};
use torpid_core::rng;

/// Where a graph comes from, as given on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    /// `counterexample:N` or `counterexample:N:M`.
    Counterexample { n: usize, m: Option<usize> },
    /// `complete:K` or `complete:A,B`.
    Complete { u: usize, v: usize },
    /// `random:U,V,P`, drawn from the run seed.
    Random { u: usize, v: usize, p: f64 },
    File(PathBuf),
}

pub struct LoadedGraph {
    pub graph: BipartiteGraph,
    pub counterexample: Option<CounterexampleGraph>,
}

fn numbers<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| format!("{what}: cannot parse {x:?}"))
        })
        .collect()
}

impl FromStr for GraphSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(rest) = s.strip_prefix("counterexample:") {
            let parts: Vec<usize> = rest
                .split(':')
                .map(|x| x.parse().map_err(|_| format!("counterexample: bad size {x:?}")))
                .collect::<Result<_, _>>()?;
            return match parts[..] {
                [n] => Ok(GraphSource::Counterexample { n, m: None }),
                [n, m] => Ok(GraphSource::Counterexample { n, m: Some(m) }),
                _ => Err("expected counterexample:N or counterexample:N:M".into()),
            };
        }
        if let Some(rest) = s.strip_prefix("complete:") {
            let parts: Vec<usize> = numbers(rest, "complete")?;
            return match parts[..] {
                [k] => Ok(GraphSource::Complete { u: k, v: k }),
                [u, v] => Ok(GraphSource::Complete { u, v }),
                _ => Err("expected complete:K or complete:A,B".into()),
            };
        }
        if let Some(rest) = s.strip_prefix("random:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 3 {
                return Err("expected random:U,V,P".into());
            }
            let u = parts[0].parse().map_err(|_| format!("random: bad |U| {:?}", parts[0]))?;
            let v = parts[1].parse().map_err(|_| format!("random: bad |V| {:?}", parts[1]))?;
            let p: f64 = parts[2].parse().map_err(|_| format!("random: bad p {:?}", parts[2]))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("random: p = {p} is not a probability"));
            }
            return Ok(GraphSource::Random { u, v, p });
        }
        if s.is_empty() {
            return Err("empty graph source".into());
        }
        Ok(GraphSource::File(PathBuf::from(s)))
    }
}

impl GraphSource {
    pub fn load(&self, seed: u64) -> Result<LoadedGraph, String> {
        match *self {
            GraphSource::Counterexample { n, m } => {
                let g = match m {
                    None => CounterexampleGraph::new(n),
                    Some(m) => CounterexampleGraph::with_sizes(n, m),
                }
                .map_err(|e| e.to_string())?;
                Ok(LoadedGraph {
                    graph: g.graph().clone(),
                    counterexample: Some(g),
                })
            }
            GraphSource::Complete { u, v } => Ok(LoadedGraph {
                graph: BipartiteGraph::complete_with_sides(u, v).map_err(|e| e.to_string())?,
                counterexample: None,
            }),
            GraphSource::Random { u, v, p } => Ok(LoadedGraph {
                graph: BipartiteGraph::random(u, v, p, &mut rng::master(seed)),
                counterexample: None,
            }),
            GraphSource::File(ref path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                if graphs::counterexample_tag(&text).is_some() {
                    let g = graphs::parse_counterexample(&text).map_err(|e| e.to_string())?;
                    Ok(LoadedGraph {
                        graph: g.graph().clone(),
                        counterexample: Some(g),
                    })
                } else {
                    Ok(LoadedGraph {
                        graph: graphs::parse_graph(&text).map_err(|e| e.to_string())?,
                        counterexample: None,
                    })
                }
            }
        }
    }

    pub fn load_counterexample(&self, seed: u64) -> Result<CounterexampleGraph, String> {
        self.load(seed)?
            .counterexample
            .ok_or_else(|| "this command needs a counterexample graph (counterexample:N)".into())
    }
}

pub fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    numbers(s, "list")
}
