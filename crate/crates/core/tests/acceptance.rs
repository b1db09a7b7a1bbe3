//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails. Criterion 11 reruns the others and
//! compares their JSON reports byte for byte.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rand::Rng;
use serde_json::{json, Value};
use torpid_core::analysis::{
    self, assess_barrier, exact_mixing_time, EscapeConfig, StartSide, TorpidBound,
};
use torpid_core::chains::{ExactTransitionMatrix, KernelName};
use torpid_core::graphs::{self, BipartiteGraph, CounterexampleGraph};
use torpid_core::report::{ratio_to_f64, to_json_string, RationalJson};
use torpid_core::semantics::{self, EnumerationLimits, SigmaSide};
use torpid_core::{rng, BigRational};

const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
    report: Value,
}

fn limits() -> EnumerationLimits {
    EnumerationLimits::default()
}

fn counterexample(n: usize, m: usize) -> CounterexampleGraph {
    CounterexampleGraph::with_sizes(n, m).expect("valid sizes")
}

fn consistency_counts() -> Outcome {
    let corpus = graphs::random_corpus(300, 4, 3, 10, &mut rng::master(SEED)).unwrap();
    let mut identities = 0;
    let mut bad_graphs = 0;
    let mut max_edges = 0;
    for g in &corpus {
        let r = semantics::consistency_count_check(g, &limits()).unwrap();
        identities += r.vertex_subsets_checked + r.edge_subsets_checked;
        max_edges = max_edges.max(g.edge_count());
        if !r.passes() {
            bad_graphs += 1;
        }
    }
    Outcome {
        pass: corpus.len() >= 200 && bad_graphs == 0,
        detail: format!(
            "{} graphs (|E| up to {max_edges}), {identities} identities, {bad_graphs} graphs with mismatches",
            corpus.len()
        ),
        report: json!({"graphs": corpus.len(), "identities": identities, "failures": bad_graphs}),
    }
}

fn marginal_equivalence() -> Outcome {
    let mut graphs = vec![
        ("K11".to_string(), BipartiteGraph::complete(1).unwrap()),
        ("K22".to_string(), BipartiteGraph::complete(2).unwrap()),
        ("G2".to_string(), CounterexampleGraph::new(2).unwrap().graph().clone()),
    ];
    let mut r = rng::master(SEED);
    for i in 0..50 {
        let u = r.gen_range(1..10);
        let v = r.gen_range(1..=10 - u);
        let p = r.gen_range(0.2..0.8);
        graphs.push((format!("random-{i}"), BipartiteGraph::random(u, v, p, &mut r)));
    }
    let failed: Vec<&str> = graphs
        .iter()
        .filter(|(_, g)| !semantics::marginal_equivalence_check(g, &limits()).unwrap())
        .map(|(l, _)| l.as_str())
        .collect();
    Outcome {
        pass: failed.is_empty(),
        detail: format!("{} graphs, failures: {:?}", graphs.len(), failed),
        report: json!({"graphs": graphs.len(), "failed": failed}),
    }
}

fn counting_claims() -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 1..=4 {
        let g = CounterexampleGraph::new(n).unwrap();
        let m = g.m();
        let sets = semantics::independent_sets_brute(g.graph(), &limits()).unwrap();
        let u_prime = (1u64 << n) - 1;
        let avoiding = sets.iter().filter(|&&s| s & u_prime == 0).count();
        let meeting = sets.len() - avoiding;
        let (want_avoid, want_meet) = semantics::side_counts(n, m);
        let sigma = semantics::exact_pi_sigma(g.graph(), &limits()).unwrap();
        let sigma0 = sigma.mass(|i| i as u64 & u_prime == 0);
        let alpha = semantics::alpha(n, m);
        let row_ok = BigUint::from(avoiding) == want_avoid
            && BigUint::from(meeting) == want_meet
            && sigma0 == alpha;
        ok &= row_ok;
        rows.push(json!({"n": n, "m": m, "avoiding": avoiding, "meeting": meeting,
                         "alpha": RationalJson::from(&alpha), "ok": row_ok}));
    }
    let two_fifths = BigRational::new(BigInt::from(2), BigInt::from(5));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut alpha_range_ok = true;
    for n in 1..=30 {
        let m = graphs::matching_size_for(n).unwrap();
        let a = semantics::alpha(n, m);
        alpha_range_ok &= a > two_fifths && a <= half;
    }
    Outcome {
        pass: ok && alpha_range_ok,
        detail: format!("counts and side mass exact for n <= 4: {ok}; 2/5 < alpha <= 1/2 for n <= 30: {alpha_range_ok}"),
        report: json!({"rows": rows, "alpha_range_ok": alpha_range_ok}),
    }
}

fn stationarity() -> Outcome {
    let g = CounterexampleGraph::new(2).unwrap();
    let (bf, pi_omega) = ExactTransitionMatrix::with_target(KernelName::BondFlip, g.graph(), &limits()).unwrap();
    let balance = bf.satisfies_detailed_balance(&pi_omega);
    let sw = ExactTransitionMatrix::sw(g.graph(), &limits()).unwrap();
    let pi_sigma = semantics::exact_pi_sigma(g.graph(), &limits()).unwrap().probabilities();
    let solved = sw.exact_stationary();
    let sw_ok = solved.as_deref() == Some(&pi_sigma[..]);
    Outcome {
        pass: bf.num_states() == 64 && sw.num_states() == 16 && balance && sw_ok,
        detail: format!(
            "bond-flip {} states, detailed balance {balance}; SW {} states, stationary vector equals the vertex marginal {sw_ok}",
            bf.num_states(),
            sw.num_states()
        ),
        report: json!({"omega_states": bf.num_states(), "sigma_states": sw.num_states(),
                       "detailed_balance": balance, "sw_stationary": sw_ok}),
    }
}

fn bernoulli_structure() -> Outcome {
    let mut exact_cases = 0;
    let mut exact_ok = true;
    for n in 1..=3 {
        for m in 1..=3 {
            let g = counterexample(n, m);
            for side in [SigmaSide::Avoiding, SigmaSide::Meeting] {
                let law = analysis::exact_matching_law(&g, side, &limits()).unwrap();
                let p = analysis::matching_inclusion_probability(side);
                exact_ok &= law == analysis::product_bernoulli(m, &p);
                exact_cases += 1;
            }
        }
    }
    let mut reports = Vec::new();
    let mut stat_ok = true;
    let mut worst = f64::INFINITY;
    for (n, m) in [(14, 24), (28, 48)] {
        let g = counterexample(n, m);
        for side in [SigmaSide::Avoiding, SigmaSide::Meeting] {
            let r = analysis::weight_distribution_check(&g, side, 100_000, SEED, &limits()).unwrap();
            stat_ok &= r.passes;
            worst = worst.min(r.per_edge_min_p / r.bonferroni_threshold);
            worst = worst.min(r.pair_min_p / r.bonferroni_threshold);
            reports.push(serde_json::to_value(&r).unwrap());
        }
    }
    Outcome {
        pass: exact_ok && stat_ok,
        detail: format!(
            "exact product law in {exact_cases} (n, m <= 3, side) cases: {exact_ok}; m = 24, 48 not rejected: {stat_ok} (smallest p / threshold {worst:.3})"
        ),
        report: json!({"exact_cases": exact_cases, "exact_ok": exact_ok, "statistical": reports}),
    }
}

fn chernoff_ceilings() -> Outcome {
    let mut ok = true;
    let mut reports = Vec::new();
    let mut parts = Vec::new();
    for (n, m) in [(28, 48), (56, 96)] {
        let g = counterexample(n, m);
        for side in [SigmaSide::Avoiding, SigmaSide::Meeting] {
            let r = analysis::chernoff_tail_check(&g, side, 100_000, SEED).unwrap();
            ok &= r.holds;
            parts.push(format!("m={m} {side:?}: {:.2e} < {:.4}", r.upper_99, r.ceiling));
            reports.push(serde_json::to_value(&r).unwrap());
        }
    }
    Outcome {
        pass: ok,
        detail: parts.join("; "),
        report: json!(reports),
    }
}

/// Checks `τ >= π(S) / (8 π(C))` on every admissible pair; returns
/// (admissible pairs, violations).
fn barrier_pairs(
    p: &ExactTransitionMatrix,
    pi: &[BigRational],
    tau: u64,
    pairs: impl Iterator<Item = (Vec<bool>, Vec<bool>)>,
) -> (usize, usize) {
    let mut admissible = 0;
    let mut violations = 0;
    for (s, c) in pairs {
        let a = assess_barrier(p, pi, &s, &c);
        if a.admissible() {
            admissible += 1;
            if let Some(TorpidBound::Finite(_)) = &a.bound {
                if !a.bound.as_ref().unwrap().is_respected_by(tau) {
                    violations += 1;
                }
            }
        }
    }
    (admissible, violations)
}

fn subset(bits: u64, k: usize) -> Vec<bool> {
    (0..k).map(|i| bits >> i & 1 == 1).collect()
}

fn barrier_bound_holds() -> Outcome {
    // single-site chain on K_{2,2}: every (S, C)
    let k22 = BipartiteGraph::complete(2).unwrap();
    let (p, pi) = ExactTransitionMatrix::with_target(KernelName::SingleSite, &k22, &limits()).unwrap();
    let pi_f: Vec<f64> = pi.iter().map(ratio_to_f64).collect();
    let tau_k22 = exact_mixing_time(&p.to_sparse_f64(), &pi_f, 1_000_000).unwrap().tau.unwrap();
    let k = p.num_states();
    let all = (0u64..1 << k).flat_map(|s| (0u64..1 << k).map(move |c| (subset(s, k), subset(c, k))));
    let (adm_k22, bad_k22) = barrier_pairs(&p, &pi, tau_k22, all);

    // bond-flip chain on G_2: level-set families of weight, |A| and rank
    let g = CounterexampleGraph::new(2).unwrap();
    let (p, pi) = ExactTransitionMatrix::with_target(KernelName::BondFlip, g.graph(), &limits()).unwrap();
    let pi_f: Vec<f64> = pi.iter().map(ratio_to_f64).collect();
    let tau_g2 = exact_mixing_time(&p.to_sparse_f64(), &pi_f, 1_000_000).unwrap().tau.unwrap();
    let masks = p.masks().to_vec();
    let stats: Vec<(&str, Vec<usize>)> = vec![
        ("weight", masks.iter().map(|&a| analysis::weight_of_mask(&g, a)).collect()),
        ("size", masks.iter().map(|&a| a.count_ones() as usize).collect()),
        (
            "rank",
            masks
                .iter()
                .map(|&a| semantics::rank_of(g.graph(), &semantics::EdgeSubset::from_mask(6, a)))
                .collect(),
        ),
    ];
    let mut families = Vec::new();
    for (_, f) in &stats {
        let top = *f.iter().max().unwrap();
        for t in 0..=top {
            for lo in 0..=top {
                for hi in lo..=top {
                    let s = f.iter().map(|&x| x <= t).collect();
                    let c = f.iter().map(|&x| (lo..=hi).contains(&x)).collect();
                    families.push((s, c));
                }
            }
        }
    }
    // random cuts with their inner boundary as barrier
    let mut r = rng::master(SEED);
    for _ in 0..2000 {
        let s: Vec<bool> = (0..masks.len()).map(|_| r.gen_bool(0.3)).collect();
        let c = (0..masks.len())
            .map(|x| s[x] && p.row(x).iter().any(|(y, _)| !s[*y]))
            .collect();
        families.push((s, c));
    }
    let (adm_g2, bad_g2) = barrier_pairs(&p, &pi, tau_g2, families.into_iter());
    Outcome {
        pass: bad_k22 == 0 && bad_g2 == 0 && adm_k22 > 0 && adm_g2 > 0,
        detail: format!(
            "K22 single-site tau={tau_k22}: {adm_k22} admissible pairs, {bad_k22} violations; G2 bond-flip tau={tau_g2}: {adm_g2} admissible pairs, {bad_g2} violations"
        ),
        report: json!({"k22": {"tau": tau_k22, "admissible": adm_k22, "violations": bad_k22},
                       "g2": {"tau": tau_g2, "admissible": adm_g2, "violations": bad_g2}}),
    }
}

fn escape_config(threads: usize) -> EscapeConfig {
    EscapeConfig {
        kernel: KernelName::BondFlip,
        start: StartSide::Minority,
        step_budget: 10_000_000,
        replicas: 200,
        seed: SEED,
        threads,
    }
}

fn escape_runs(threads: usize) -> Vec<analysis::EscapeSummary> {
    [4, 6, 8, 10]
        .iter()
        .map(|&n| {
            let g = CounterexampleGraph::new(n).unwrap();
            analysis::escape_time_experiment(&g, &escape_config(threads)).unwrap()
        })
        .collect()
}

fn torpid_trend() -> Outcome {
    let runs = escape_runs(4);
    let medians: Vec<u64> = runs.iter().map(|r| r.median).collect();
    let censored = runs.iter().any(|r| r.median_is_lower_bound);
    let non_decreasing = medians.windows(2).all(|w| w[0] <= w[1]);
    let growth = medians[3] as f64 / medians[2].max(1) as f64;
    Outcome {
        pass: non_decreasing && growth >= 1.5,
        detail: format!(
            "medians {medians:?} for n = 4,6,8,10 (m = {:?}), non-decreasing {non_decreasing}, last growth {growth:.3} (need >= 1.5){}",
            runs.iter().map(|r| r.m).collect::<Vec<_>>(),
            if censored { ", some medians censored" } else { "" }
        ),
        report: serde_json::to_value(&runs).unwrap(),
    }
}

fn sw_lock_in() -> Outcome {
    let g = CounterexampleGraph::new(20).unwrap();
    let r = analysis::sw_one_step_leave(&g, 100_000, SEED).unwrap();
    let ok = g.m() == 34 && r.frequency <= r.heuristic_ceiling && r.frequency <= r.union_bound_f64;
    Outcome {
        pass: ok,
        detail: format!(
            "n=20 m={}: leave frequency {:.5} vs ceiling {:.4} and exact union bound {:.4}",
            g.m(),
            r.frequency,
            r.heuristic_ceiling,
            r.union_bound_f64
        ),
        report: serde_json::to_value(&r).unwrap(),
    }
}

fn random_rank() -> Outcome {
    let m = graphs::matching_size_for(20).unwrap();
    let k = (2 * m).div_ceil(3);
    let r = analysis::random_rank_experiment(20, k, 100_000, SEED).unwrap();
    let threshold = 1.0 - 0.25;
    Outcome {
        pass: k == 23 && r.frequency >= threshold,
        detail: format!(
            "n=20 k={k}: full rank {:.5} (exact {:.5}) >= {threshold}",
            r.frequency, r.exact_probability
        ),
        report: serde_json::to_value(&r).unwrap(),
    }
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "consistency-count identities", Duration::from_secs(60), consistency_counts),
        (2, "marginal equivalence", Duration::from_secs(60), marginal_equivalence),
        (3, "counting claims on G_n", Duration::from_secs(60), counting_claims),
        (4, "stationarity and reversibility on G_2", Duration::from_secs(60), stationarity),
        (5, "Bernoulli structure of the matching", Duration::from_secs(300), bernoulli_structure),
        (6, "tail ceilings exp(-m/576)", Duration::from_secs(300), chernoff_ceilings),
        (7, "barrier lower bound vs exact mixing time", Duration::from_secs(120), barrier_bound_holds),
        (8, "bond-flip escape-time trend", Duration::from_secs(1800), torpid_trend),
        (9, "SW lock-in", Duration::from_secs(300), sw_lock_in),
        (10, "random-rank experiment", Duration::from_secs(60), random_rank),
    ];
    let mut failed = Vec::new();
    let mut first_reports = Vec::new();
    for (id, name, limit, run) in &criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took < *limit;
        println!(
            "criterion {id:>2} {} {name} [{:.1}s, limit {}s]: {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs(),
            out.detail
        );
        if !pass {
            failed.push(*id);
        }
        first_reports.push(to_json_string(&out.report));
    }

    let start = Instant::now();
    let mut differing = Vec::new();
    for ((id, _, _, run), first) in criteria.iter().zip(&first_reports) {
        if to_json_string(&run().report) != *first {
            differing.push(*id);
        }
    }
    let by_threads = to_json_string(&escape_runs(1)) == to_json_string(&escape_runs(4));
    let pass = differing.is_empty() && by_threads;
    println!(
        "criterion 11 {} determinism [{:.1}s]: reruns of criteria 1-10 byte-identical ({} differ), escape reports identical for 1 and 4 threads {by_threads}",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        differing.len()
    );
    if !pass {
        failed.push(11);
    }

    if failed.is_empty() {
        println!("acceptance: all 11 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
