//! Acceptance criteria A1-A9. Runs without the libtest harness and prints
//! one PASS/FAIL line per criterion; exits nonzero if any fails.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;

use fasclique::analysis::RTuple;
use fasclique::campaign::{run_campaign_records, trial_tournament, CampaignSpec, OrderStrategy, RunRecord};
use fasclique::constants::{d_inequalities_hold, practical_constants, smallest_d, Constants};
use fasclique::matching::{hopcroft_karp, BipartiteGraph};
use fasclique::oracle::{branch_and_bound_packing, brute_force_fk, enumerate_tournaments, max_transversal_packing};
use fasclique::order::{upper_bound_witness, LeftGraph, VertexOrder};
use fasclique::packing::{
    build_p2, compute_b_sets, extend_set, find_clique_packing, friendly_h1_filter, friendly_hr_filter, j_set,
    verify_packing, AttemptTrace, PackingOptions,
};
use fasclique::seed::RngSeed;
use fasclique::tournament::Tournament;
use fasclique::verify::{verify_property, Property, VerifyOptions};
use fasclique::{Error, StageFailure};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: &str, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = o.pass && in_time;
    println!(
        "{id} {} {title}: {} [{:.2}s, limit {}s{}]",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", too slow" }
    );
    pass
}

fn exhaustive_sets() -> Vec<Tournament> {
    enumerate_tournaments(vec![2, 2])
        .unwrap()
        .chain(enumerate_tournaments(vec![1, 1, 1]).unwrap())
        .collect()
}

fn s_bound(t: &Tournament) -> usize {
    let s = t.layout().min_part_size();
    (s + 1).saturating_sub(t.k())
}

fn a1() -> Outcome {
    let ts = exhaustive_sets();
    let bad = ts.iter().filter(|t| brute_force_fk(t).unwrap() > s_bound(t)).count();
    Outcome {
        pass: ts.len() == 24 && bad == 0,
        detail: format!("{} tournaments, {bad} exceed max(0, s-k+1)", ts.len()),
    }
}

fn a2() -> Outcome {
    let mut ts = exhaustive_sets();
    ts.extend((0..100).map(|i| Tournament::sample_random(2, 3, RngSeed(0xa2).derive(i, 0)).unwrap()));
    let (mut checked, mut gated, mut bad) = (0, 0, 0);
    for t in &ts {
        match upper_bound_witness(t) {
            Ok(w) => {
                let l = LeftGraph::new(t, &w.order).unwrap();
                let size = max_transversal_packing(&l).unwrap().size;
                if size > s_bound(t) || !w.validate(&l) {
                    bad += 1;
                }
                checked += 1;
            }
            // s < k-1: no witness exists and the bound is 0, covered by A1
            Err(Error::Precondition(_)) if t.layout().min_part_size() + 1 < t.k() => gated += 1,
            Err(_) => bad += 1,
        }
    }
    Outcome {
        pass: bad == 0 && checked == 116 && gated == 8,
        detail: format!("{checked} witness packings within s-k+1, {gated} with s < k-1 rejected, {bad} exceptions"),
    }
}

fn campaign(
    k: usize,
    n: usize,
    trials: usize,
    strategies: Vec<OrderStrategy>,
    seed: u64,
    retries: usize,
) -> (CampaignSpec, Vec<RunRecord>) {
    let mut spec = CampaignSpec::new(k, n, trials, strategies, RngSeed(seed));
    spec.retries = retries;
    let (records, _) = run_campaign_records(&spec).unwrap();
    (spec, records)
}

fn a3(records: &[RunRecord], n: usize) -> Outcome {
    let ok = records
        .iter()
        .filter(|r| r.result.is_success() && r.result.cliques.len() >= n - 1)
        .count();
    let rate = ok as f64 / records.len() as f64;
    let mut per: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records.iter().filter(|r| r.result.is_success()) {
        *per.entry(r.strategy.name()).or_default() += 1;
    }
    Outcome {
        pass: records.len() == 300 && rate >= 0.99,
        detail: format!(
            "matching of size >= n-1 in {ok}/{} runs ({:.1}%), per strategy {per:?}",
            records.len(),
            100.0 * rate
        ),
    }
}

fn a4(records: &[RunRecord], n: usize) -> Outcome {
    let ok = records
        .iter()
        .filter(|r| r.result.is_success() && r.result.cliques.len() >= n - 2)
        .count();
    let max_absorber = records
        .iter()
        .flat_map(|r| r.result.trace.iter().map(|a| a.absorber_attempts))
        .max()
        .unwrap_or(0);
    let rate = ok as f64 / records.len() as f64;
    Outcome {
        pass: records.len() == 50 && rate >= 0.95 && max_absorber <= 21,
        detail: format!(
            "{ok}/{} runs with >= n-2 disjoint 3-cliques ({:.1}%), at most {} absorber retries",
            records.len(),
            100.0 * rate,
            max_absorber.saturating_sub(1)
        ),
    }
}

fn a5() -> Outcome {
    let c = practical_constants(3, 600, &BTreeMap::new()).unwrap();
    let th_ok = (c.thresholds.friendly_vertex - 600.0 / 17.0).abs() < 1e-9;
    let r = verify_property(Property::Friendly, &c, 50, RngSeed(0xa5), VerifyOptions::default()).unwrap();
    Outcome {
        pass: th_ok && r.trials == 50 && r.passes == 50,
        detail: format!(
            "{}/{} samples with <= 2 non-friendly vertices per part",
            r.passes, r.trials
        ),
    }
}

fn a6() -> Outcome {
    let c = practical_constants(3, 1000, &BTreeMap::new()).unwrap();
    let opts = VerifyOptions {
        tournaments: 10,
        max_len: 5,
    };
    let r = verify_property(Property::P4, &c, 1000, RngSeed(0xa6), opts).unwrap();
    Outcome {
        pass: r.trials == 1000 && r.passes == 1000,
        detail: format!(
            "{}/{} witnesses within n/2^q + n^(2/3), worst count/bound {:.3}",
            r.passes, r.trials, r.worst_ratio
        ),
    }
}

/// `(μ - d^{1-2r})/(dr+1) > (1-2^{-r})^d` with μ = 1/18, cleared of denominators.
fn first_inequality(d: u32, r: u32) -> bool {
    let dd = BigInt::from(d);
    let p = dd.pow(2 * r - 1);
    let two_r = BigInt::one() << r;
    let lhs = (&p - 18) * two_r.pow(d);
    let rhs = (&two_r - BigInt::one()).pow(d) * 18 * &p * (BigInt::from(d * r) + 1);
    lhs > rhs
}

/// `(d^{2-2r} - d^{1-2r})/(d+1) > 2^{-d}`, cleared of denominators.
fn second_inequality(d: u32, r: u32) -> bool {
    let dd = BigInt::from(d);
    (&dd - 1) * (BigInt::one() << d) > dd.pow(2 * r - 1) * (&dd + 1)
}

fn a7() -> Outcome {
    let d = smallest_d(2).unwrap();
    let d23_fails_r2 = !first_inequality(23, 2);
    let d24_all = (1..=2).all(|r| first_inequality(24, r) && second_inequality(24, r));
    let lib_agrees = !d_inequalities_hold(2, 23) && d_inequalities_hold(2, 24);
    Outcome {
        pass: d == 24 && d23_fails_r2 && d24_all && lib_agrees,
        detail: format!(
            "smallest_d(2) = {d}; d=23 fails the r=2 inequality: {d23_fails_r2}; d=24 meets all four: {d24_all}"
        ),
    }
}

fn a8() -> Outcome {
    let mut disagree = 0;
    for i in 0..200 {
        let seed = RngSeed(0xa8).derive(i, 0);
        let t = Tournament::sample_random(6, 2, seed).unwrap();
        let l = LeftGraph::new(&t, &VertexOrder::random(12, &mut seed.derive(0, 1).rng())).unwrap();
        let g = BipartiteGraph::from_predicate(6, 6, |a, b| l.adjacent(a, 6 + b));
        let oracle = branch_and_bound_packing(&l, 8).unwrap().size;
        if oracle != hopcroft_karp(&g).size() || oracle != max_transversal_packing(&l).unwrap().size {
            disagree += 1;
        }
    }
    let (mut exceed, mut pipeline_ok) = (0, 0);
    for i in 0..50 {
        let seed = RngSeed(0xa8).derive(i, 1);
        let t = Tournament::sample_random(4, 3, seed).unwrap();
        let pi = VertexOrder::random(12, &mut seed.derive(0, 1).rng());
        let l = LeftGraph::new(&t, &pi).unwrap();
        let c = practical_constants(3, 4, &BTreeMap::new()).unwrap();
        let res = find_clique_packing(&t, &pi, &c, seed, PackingOptions::default()).unwrap();
        let opt = max_transversal_packing(&l).unwrap();
        if res.is_success() {
            pipeline_ok += 1;
        }
        if res.cliques.len() > opt.size || !verify_packing(&l, &opt.witness) {
            exceed += 1;
        }
    }
    Outcome {
        pass: disagree == 0 && exceed == 0,
        detail: format!(
            "k=2: {disagree}/200 disagreements; k=3: optimum below pipeline output in {exceed}/50 ({pipeline_ok} pipeline successes)"
        ),
    }
}

/// Rebuilds the filtered graph of the failing stage from the recorded
/// absorber and checks the reported set has a smaller neighborhood there.
fn hall_certificate_holds(l: &LeftGraph, c: &Constants, at: &AttemptTrace, f: &StageFailure) -> bool {
    let (Some(set), Some(absorber)) = (&f.hall_set, &at.absorber) else {
        return false;
    };
    let k = l.k();
    let b = compute_b_sets(absorber, k);
    let (left, right, g): (Vec<RTuple>, Vec<usize>, BipartiteGraph) = if f.stage == "p2" {
        let left: Vec<RTuple> = b[0]
            .iter()
            .map(|&v| RTuple::new(l.layout(), vec![v]).unwrap())
            .collect();
        let (g, _) = friendly_h1_filter(l, &b, c);
        (left, b[1].clone(), g)
    } else if let Some(next) = f.stage.strip_prefix("extend_").and_then(|s| s.parse::<usize>().ok()) {
        let r = next - 1;
        let Ok((mut set, _)) = build_p2(l, absorber, c, true) else {
            return false;
        };
        while set.r < r {
            let Ok((s, _)) = extend_set(l, &set, absorber, c, true) else {
                return false;
            };
            set = s;
        }
        let j = j_set(&set, absorber);
        let Ok((g, _)) = friendly_hr_filter(l, &j, &b, c, r) else {
            return false;
        };
        (j, b[r].clone(), g)
    } else {
        return false;
    };
    let idx: Option<Vec<usize>> = set
        .iter()
        .map(|s| left.iter().position(|p| p.vertices() == s.as_slice()))
        .collect();
    let Some(idx) = idx else { return false };
    let nb: HashSet<usize> = idx
        .iter()
        .flat_map(|&i| g.neighbors(i).iter().map(|&j| right[j]))
        .collect();
    let reported: HashSet<usize> = f.hall_neighborhood.iter().flatten().copied().collect();
    nb.len() < idx.len() && nb == reported
}

fn a9(runs: &[(&CampaignSpec, &[RunRecord])]) -> Outcome {
    let (mut successes, mut bad_success) = (0, 0);
    let (mut matching_failures, mut bad_hall) = (0, 0);
    let (mut tournaments, mut bad_roundtrip) = (0, 0);
    let mut check = |spec: &CampaignSpec, records: &[RunRecord]| {
        let c = spec.constants().unwrap();
        let mut seen_trials = HashSet::new();
        for r in records {
            let t = trial_tournament(spec, r.trial).unwrap();
            if seen_trials.insert(r.trial) {
                tournaments += 1;
                let kpt = Tournament::from_kpt_bytes(&t.to_kpt_bytes()).unwrap();
                let json = Tournament::from_json(
                    &serde_json::from_str(&serde_json::to_string(&t.to_json()).unwrap()).unwrap(),
                )
                .unwrap();
                if kpt != t || json != t || kpt.to_kpt_bytes() != t.to_kpt_bytes() {
                    bad_roundtrip += 1;
                }
            }
            let l = LeftGraph::new(&t, &r.order).unwrap();
            if r.result.is_success() {
                successes += 1;
                if !verify_packing(&l, &r.result.cliques) || r.result.cliques.len() < spec.n + 1 - spec.k {
                    bad_success += 1;
                }
            }
            for at in &r.result.trace {
                if let Some(f) = &at.failure {
                    if f.stage == "p2" || f.stage.starts_with("extend_") {
                        matching_failures += 1;
                        if !hall_certificate_holds(&l, &c, at, f) {
                            bad_hall += 1;
                        }
                    }
                }
            }
        }
    };
    for (spec, records) in runs {
        check(spec, records);
    }
    // runs that provoke matching failures: tight edge filters, small parts
    let mut stress = CampaignSpec::new(3, 40, 40, vec![OrderStrategy::Random], RngSeed(0xa9));
    stress.overrides.insert("edge_scale".into(), 6.0);
    stress.retries = 1;
    let (stress_records, _) = run_campaign_records(&stress).unwrap();
    check(&stress, &stress_records);
    let mut small = CampaignSpec::new(
        2,
        12,
        60,
        vec![OrderStrategy::Random, OrderStrategy::DegreeSorted],
        RngSeed(0xa9),
    );
    small.overrides.insert("vertex_scale".into(), 1e-9);
    let (small_records, _) = run_campaign_records(&small).unwrap();
    check(&small, &small_records);
    Outcome {
        pass: bad_success == 0 && bad_hall == 0 && bad_roundtrip == 0 && matching_failures > 0,
        detail: format!(
            "{successes} successes verified ({bad_success} bad), {matching_failures} matching failures with Hall sets checked ({bad_hall} bad), {tournaments} tournaments round-tripped ({bad_roundtrip} bad)"
        ),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let mut all = true;
    all &= run("A1", "exhaustive upper bound", secs(1), a1);
    all &= run("A2", "witness validity", secs(10), a2);

    let mut a3_data = None;
    all &= run("A3", "bipartite instance k=2 n=300", secs(60), || {
        let (spec, records) = campaign(
            2,
            300,
            100,
            vec![OrderStrategy::Random, OrderStrategy::Witness, OrderStrategy::Identity],
            0xa3,
            PackingOptions::default().retries,
        );
        let o = a3(&records, 300);
        a3_data = Some((spec, records));
        o
    });
    let mut a4_data = None;
    all &= run("A4", "full pipeline k=3 n=120", secs(300), || {
        // one pipeline attempt: at most 20 absorber retries in total
        let (spec, records) = campaign(3, 120, 50, vec![OrderStrategy::Random], 0xa4, 0);
        let o = a4(&records, 120);
        a4_data = Some((spec, records));
        o
    });
    all &= run("A5", "friendly vertices k=3 n=600", secs(120), a5);
    all &= run("A6", "consistent-set concentration k=3 n=1000", secs(60), a6);
    all &= run("A7", "constants oracle", secs(1), a7);
    all &= run("A8", "oracle cross-agreement", secs(30), a8);
    let (s3, r3) = a3_data.expect("A3 ran");
    let (s4, r4) = a4_data.expect("A4 ran");
    all &= run("A9", "soundness invariants", secs(120), || {
        a9(&[(&s3, &r3), (&s4, &r4)])
    });

    println!("acceptance: {}", if all { "all criteria passed" } else { "FAILED" });
    if !all {
        std::process::exit(1);
    }
}
