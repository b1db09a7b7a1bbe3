use crate::error::{Error, Result};
use serde::Serialize;

const STOCHASTIC_TOL: f64 = 1e-12;

/// Row-stochastic matrix in sparse row form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseStochastic {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseStochastic {
    pub fn new(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let k = rows.len();
        for (r, row) in rows.iter().enumerate() {
            let mut sum = 0.0;
            for &(j, p) in row {
                if j >= k || p.is_nan() || p < 0.0 {
                    return Err(Error::NotStochastic { row: r, sum: f64::NAN });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NotStochastic { row: r, sum });
            }
        }
        Ok(SparseStochastic { rows })
    }

    pub fn from_dense(dense: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            dense
                .iter()
                .map(|r| r.iter().copied().enumerate().filter(|(_, p)| *p != 0.0).collect())
                .collect(),
        )
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    /// `p P`.
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let pi = p[i];
            if pi == 0.0 {
                continue;
            }
            for &(j, q) in row {
                out[j] += pi * q;
            }
        }
        out
    }
}

fn check_normalized(p: &[f64]) -> Result<()> {
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > STOCHASTIC_TOL * p.len().max(1) as f64 {
        return Err(Error::NotNormalized(s));
    }
    Ok(())
}

/// Half the L1 distance between two probability vectors.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    check_normalized(p)?;
    check_normalized(q)?;
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixingMethod {
    ExactPowerIteration,
    Bound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    /// First `t` with `TV(p_t, π) <= 1/e` from each start; `None` if the
    /// budget ran out first.
    pub tau_per_start: Vec<Option<u64>>,
    /// Maximum over starts; `None` if any start was censored.
    pub tau: Option<u64>,
    pub censored_starts: usize,
    pub budget: u64,
    pub method: MixingMethod,
}

/// Mixing time by iterating `p_{t+1} = p_t P` from every point mass.
pub fn exact_mixing_time(p: &SparseStochastic, pi: &[f64], budget: u64) -> Result<MixingReport> {
    let k = p.num_states();
    if pi.len() != k {
        return Err(Error::LengthMismatch { left: pi.len(), right: k });
    }
    check_normalized(pi)?;
    let threshold = (-1.0f64).exp();
    let mut tau_per_start = Vec::with_capacity(k);
    for start in 0..k {
        let mut dist = vec![0.0; k];
        dist[start] = 1.0;
        let mut t = 0u64;
        let hit = loop {
            let tv = 0.5 * dist.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum::<f64>();
            if tv <= threshold {
                break Some(t);
            }
            if t == budget {
                break None;
            }
            dist = p.apply(&dist);
            t += 1;
        };
        tau_per_start.push(hit);
    }
    let censored_starts = tau_per_start.iter().filter(|t| t.is_none()).count();
    let tau = if censored_starts == 0 {
        tau_per_start.iter().flatten().copied().max()
    } else {
        None
    };
    Ok(MixingReport {
        tau_per_start,
        tau,
        censored_starts,
        budget,
        method: MixingMethod::ExactPowerIteration,
    })
}
