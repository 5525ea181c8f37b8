//! Acceptance suite: one pass/fail line per criterion, with timing. Exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use recolor_core::adversaries::{gen_bounded_bond, Family};
use recolor_core::audit::{audit_bond_partition, BondMode};
use recolor_core::fraction::Fraction;
use recolor_core::graph::Edge;
use recolor_core::harness::run::{run, Algo, BetaSource, RunOptions, RunOutcome, RunParams};
use recolor_core::harness::sweep::{make_source, sweep, write_csv, Grid, Suite};
use recolor_core::oracles::{largest_bond_bruteforce, opt2_bruteforce, opt2_exact, BOND_CAP};
use recolor_core::sim::FlipPolicy;

const SEEDS: u64 = 20;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

#[derive(Clone, Copy, Debug)]
struct SuiteCfg {
    suite: Suite,
    n: usize,
    d: u64,
}

fn suite_one() -> Vec<SuiteCfg> {
    let mut v: Vec<SuiteCfg> =
        [4, 16, 64, 256].into_iter().map(|d| SuiteCfg { suite: Suite::PathDoubling, n: 4096, d }).collect();
    v.push(SuiteCfg { suite: Suite::Forest, n: 4096, d: 16 });
    v.push(SuiteCfg { suite: Suite::EvenCycles, n: 4096, d: 16 });
    v.push(SuiteCfg { suite: Suite::Ladders, n: 4096, d: 16 });
    v.push(SuiteCfg { suite: Suite::Dominating, n: 1024, d: 16 });
    v
}

struct Record {
    cfg: SuiteCfg,
    seed: u64,
    algo: Algo,
    outcome: Result<RunOutcome, String>,
}

fn run_suite_one() -> Vec<Record> {
    let jobs: Vec<(SuiteCfg, u64, Algo)> = suite_one()
        .into_iter()
        .flat_map(|cfg| (0..SEEDS).flat_map(move |s| Algo::ALL.into_iter().map(move |a| (cfg, s, a))))
        .collect();
    jobs.par_iter()
        .map(|&(cfg, seed, algo)| {
            let outcome = make_source(cfg.suite, cfg.n, cfg.d, seed, None)
                .and_then(|src| {
                    let params = RunParams { seed: Some(seed), ..RunParams::default() };
                    run(&src, algo, &params, "acceptance", RunOptions { audit: true, ..Default::default() })
                })
                .map_err(|e| e.to_string());
            Record { cfg, seed, algo, outcome }
        })
        .collect()
}

fn label(r: &Record) -> String {
    format!("{}/n{}/D{}/s{}/{}", r.cfg.suite, r.cfg.n, r.cfg.d, r.seed, r.algo)
}

fn ceil_log2(x: u64) -> u32 {
    let mut k = 0;
    while (1u64 << k) < x {
        k += 1;
    }
    k
}

fn criterion_1(records: &[Record]) -> Verdict {
    let mut mono = 0;
    let mut errors = Vec::new();
    let mut other = 0;
    for r in records {
        match &r.outcome {
            Err(e) => errors.push(format!("{}: {e}", label(r))),
            Ok(o) => {
                let m = o.violation_messages.iter().filter(|v| v.contains("monochromatic")).count();
                mono += m;
                other += o.violation_messages.len() - m;
            }
        }
    }
    let detail = format!(
        "{} runs, {mono} monochromatic edges, {} run errors, {other} other invariant failures{}",
        records.len(),
        errors.len(),
        errors.first().map(|e| format!("; first error {e}")).unwrap_or_default()
    );
    verdict(mono == 0 && errors.is_empty(), detail)
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=12);
        let side: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let p = rng.gen_range(0.1..0.7);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if side[a] && !side[b] && rng.gen_bool(p) {
                    edges.push(if rng.gen() { Edge::new(a, b) } else { Edge::new(b, a) });
                }
            }
        }
        edges.shuffle(&mut rng);
        let initial: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
        let prefix = rng.gen_range(0..=edges.len());
        let exact = opt2_exact(&initial, &edges, prefix).map(|r| r.value).ok();
        let brute = opt2_bruteforce(&initial, &edges, prefix).ok();
        if exact.is_none() || exact != brute {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("500 instances, {mismatches} mismatches"))
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut wrong = 0;
    for t in 0..100 {
        let n = rng.gen_range(2..=16);
        let tree = gen_bounded_bond(Family::Forest, n, 4, t).expect("tree");
        if largest_bond_bruteforce(n, &tree.edges, BOND_CAP).map(|b| b.beta).ok() != Some(1) {
            wrong += 1;
        }
    }
    for len in (4..=16).step_by(2) {
        let cycle: Vec<Edge> = (0..len).map(|i| Edge::new(i, (i + 1) % len)).collect();
        if largest_bond_bruteforce(len, &cycle, BOND_CAP).map(|b| b.beta).ok() != Some(2) {
            wrong += 1;
        }
    }
    verdict(wrong == 0, format!("100 trees and C4..C16, {wrong} wrong"))
}

/// A random partition of all vertices into connected parts: `k` random
/// seeds grown by random frontier steps, plus one part per seedless
/// component piece.
fn random_connected_partition(n: usize, edges: &[Edge], rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut part = vec![usize::MAX; n];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let k = rng.gen_range(1..=n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for &s in order.iter().take(k) {
        part[s] = parts.len();
        parts.push(vec![s]);
    }
    loop {
        let frontier: Vec<(usize, usize)> = (0..n)
            .filter(|&v| part[v] == usize::MAX)
            .flat_map(|v| adj[v].iter().filter(|&&w| part[w] != usize::MAX).map(move |&w| (v, w)))
            .collect();
        let Some(&(v, w)) = frontier.choose(rng) else { break };
        part[v] = part[w];
        parts[part[w]].push(v);
    }
    for v in 0..n {
        if part[v] == usize::MAX {
            // grow a fresh part through unassigned vertices
            part[v] = parts.len();
            let mut p = vec![v];
            let mut i = 0;
            while i < p.len() {
                for &w in &adj[p[i]] {
                    if part[w] == usize::MAX {
                        part[w] = parts.len();
                        p.push(w);
                    }
                }
                i += 1;
            }
            parts.push(p);
        }
    }
    parts
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut violations, mut checks, mut errors) = (0, 0, 0);
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let p = rng.gen_range(0.1..0.6);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    edges.push(Edge::new(a, b));
                }
            }
        }
        let beta = largest_bond_bruteforce(n, &edges, BOND_CAP).expect("small graph").beta;
        for _ in 0..10 {
            let parts = random_connected_partition(n, &edges, &mut rng);
            match audit_bond_partition(n, &edges, &parts, beta, BondMode::Partition) {
                Ok(a) => {
                    checks += 1;
                    // independent recount
                    let mut part_of = vec![0; n];
                    for (i, part) in parts.iter().enumerate() {
                        for &v in part {
                            part_of[v] = i;
                        }
                    }
                    let cross = edges.iter().filter(|e| part_of[e.u] != part_of[e.v]).count() as u64;
                    if cross != a.cross_edges || cross > (parts.len() as u64 - 1) * beta {
                        violations += 1;
                    }
                }
                Err(_) => errors += 1,
            }
        }
    }
    verdict(
        violations == 0 && errors == 0,
        format!("{checks} partitions, {violations} violations, {errors} precondition errors"),
    )
}

fn augmented(r: &Record) -> bool {
    matches!(r.algo, Algo::B | Algo::Bhat)
}

fn criterion_5(records: &[Record]) -> Verdict {
    let (mut checked, mut bad) = (0, Vec::new());
    for r in records.iter().filter(|r| augmented(r)) {
        let Ok(o) = &r.outcome else { continue };
        if !matches!(o.beta_source, BetaSource::Forest | BetaSource::BruteForce) {
            continue;
        }
        let beta = o.result.beta.expect("verified beta");
        let a = &o.audits[0];
        let r_size = a.r_size as u128;
        let exc = o.result.excess_edges as u128;
        checked += 1;
        // |exc| <= beta |R| / (alpha D) with alpha = 1/2
        if exc * a.threshold as u128 > 2 * beta as u128 * r_size {
            bad.push(format!("{}: {exc} excess, |R| {r_size}, beta {beta}", label(r)));
        }
    }
    verdict(
        bad.is_empty() && checked > 0,
        format!("{checked} runs, {} violations{}", bad.len(), bad.first().map(|b| format!("; {b}")).unwrap_or_default()),
    )
}

fn criterion_6(records: &[Record]) -> Verdict {
    let (mut audited, mut bad) = (0, Vec::new());
    let mut worst = (f64::INFINITY, f64::INFINITY, 0u32);
    for r in records {
        let Ok(o) = &r.outcome else { continue };
        for a in &o.audits {
            audited += 1;
            let Some(c) = &a.charging else {
                bad.push(format!("{} level {}: {}", label(r), a.level, a.charging_error.clone().unwrap_or_default()));
                continue;
            };
            if let Some((x, size)) = c.min_fresh_ratio {
                worst.0 = worst.0.min(x as f64 / size as f64);
                if 10 * x < size {
                    bad.push(format!("{} level {}: |X| {x} < |C| {size} / 10", label(r), a.level));
                }
            }
            if let Some((ch, size)) = c.min_step_ratio {
                worst.1 = worst.1.min(ch as f64 / size as f64);
                if 40 * ch < size {
                    bad.push(format!("{} level {}: charge {ch} < |C| {size} / 40", label(r), a.level));
                }
            }
            let bound = ceil_log2(a.threshold) + 4;
            worst.2 = worst.2.max(c.max_vertex_charges);
            if c.max_vertex_charges > bound {
                bad.push(format!("{} level {}: {} charges > {bound}", label(r), a.level, c.max_vertex_charges));
            }
            if !c.structural_failures.is_empty() {
                bad.push(format!("{}: {}", label(r), c.structural_failures[0]));
            }
        }
    }
    verdict(
        bad.is_empty() && audited > 0,
        format!(
            "{audited} simulated sequences, min |X|/|C| {:.3}, min charge/|C| {:.3}, max charges/vertex {}, {} violations{}",
            worst.0,
            worst.1,
            worst.2,
            bad.len(),
            bad.first().map(|b| format!("; {b}")).unwrap_or_default()
        ),
    )
}

fn criterion_7(records: &[Record]) -> Verdict {
    let (mut checked, mut bad) = (0, 0);
    let mut worst: f64 = 0.0;
    for r in records {
        let Ok(o) = &r.outcome else { continue };
        for a in &o.audits {
            checked += 1;
            let bound = 280.0 * ((a.threshold as f64).log2() + 4.0) * a.r_size as f64;
            if a.r_size > 0 {
                worst = worst.max(a.sim_cost as f64 / (((a.threshold as f64).log2() + 4.0) * a.r_size as f64));
            }
            if a.sim_cost as f64 > bound {
                bad += 1;
            }
        }
    }
    verdict(bad == 0, format!("{checked} sequences, worst cost / ((log2 D + 4)|R|) = {worst:.3}, {bad} violations"))
}

fn criterion_8() -> Verdict {
    let params = RunParams { epsilon: Fraction::new(1, 4).unwrap(), beta: Some(1), ..RunParams::default() };
    let jobs: Vec<(usize, u64)> = [256usize, 1024, 4096].into_iter().flat_map(|n| (0..SEEDS).map(move |s| (n, s))).collect();
    type LevelRun = Result<(usize, Vec<String>, u32), String>;
    let results: Vec<LevelRun> = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let src = make_source(Suite::Forest, n, 16, seed, None).map_err(|e| e.to_string())?;
            let o = run(&src, Algo::C, &params, "c", RunOptions::default()).map_err(|e| e.to_string())?;
            let mut bad = o.violation_messages.clone();
            // tau = 16, gamma = 1/4, beta = 1, alpha = 1/2
            for w in o.levels.windows(2) {
                if 4 * w[1].r_size > w[0].r_size {
                    bad.push(format!("n{n} s{seed}: |R_{}| = {} > |R_{}| / 4 = {}", w[1].level, w[1].r_size, w[0].level, w[0].r_size));
                }
            }
            for l in &o.levels {
                if 8 * l.excess_edges > l.r_size {
                    bad.push(format!("n{n} s{seed}: |F_{}| = {} > |R| / 8 with |R| = {}", l.level, l.excess_edges, l.r_size));
                }
            }
            let mut log4 = 0;
            while 4usize.pow(log4 + 1) <= n {
                log4 += 1;
            }
            if o.result.max_level > log4 + 2 {
                bad.push(format!("n{n} s{seed}: max level {} > {}", o.result.max_level, log4 + 2));
            }
            Ok((n, bad, o.result.max_level))
        })
        .collect();
    let mut bad = Vec::new();
    let mut max_level = 0;
    for r in results {
        match r {
            Ok((_, b, l)) => {
                bad.extend(b);
                max_level = max_level.max(l);
            }
            Err(e) => bad.push(e),
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{} runs, highest level {max_level}, {} violations{}",
            jobs.len(),
            bad.len(),
            bad.first().map(|b| format!("; {b}")).unwrap_or_default()
        ),
    )
}

fn criterion_9(records: &[Record]) -> Verdict {
    let (mut checked, mut bad) = (0, 0);
    let mut worst: f64 = 0.0;
    for r in records.iter().filter(|r| r.algo == Algo::Greedy) {
        let Ok(o) = &r.outcome else {
            bad += 1;
            continue;
        };
        checked += 1;
        let res = &o.result;
        if res.opt2_final > 0 {
            worst = worst.max(res.cost_total as f64 / (res.d * res.opt2_final) as f64);
        }
        if res.cost_total > 2 * res.d * res.opt2_final {
            bad += 1;
        }
    }
    verdict(bad == 0 && checked > 0, format!("{checked} runs, worst cost / (D OPT2) = {worst:.3}, {bad} violations"))
}

fn criterion_10() -> Verdict {
    const TRIALS: u64 = 1000;
    let hits: Vec<Result<bool, String>> = (0..TRIALS)
        .into_par_iter()
        .map(|seed| {
            let src = make_source(Suite::PathDoubling, 64, 64, 10_000 + seed, Some(6)).map_err(|e| e.to_string())?;
            let o = run(&src, Algo::A, &RunParams::default(), "lb", RunOptions::default()).map_err(|e| e.to_string())?;
            Ok(o.result.cost_total >= 32)
        })
        .collect();
    let errors = hits.iter().filter(|h| h.is_err()).count();
    let count = hits.iter().filter(|h| matches!(h, Ok(true))).count();
    let freq = count as f64 / TRIALS as f64;
    verdict(errors == 0 && freq >= 0.45, format!("Pr[cost >= 32] = {freq:.3} over {TRIALS} trials (need >= 0.45)"))
}

fn mean_ratio(algo: Algo, n: usize, d: u64, phases: Option<u32>) -> Result<f64, String> {
    let ratios: Vec<Result<f64, String>> = (0..SEEDS)
        .into_par_iter()
        .map(|seed| {
            let src = make_source(Suite::PathDoubling, n, d, seed, phases).map_err(|e| e.to_string())?;
            let o = run(&src, algo, &RunParams::default(), "trend", RunOptions::default()).map_err(|e| e.to_string())?;
            o.result.ratio.ok_or_else(|| "zero optimum".to_string())
        })
        .collect();
    let ratios = ratios.into_iter().collect::<Result<Vec<f64>, String>>()?;
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

fn criterion_11() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    let mut go = || -> Result<(), String> {
        for d in [4u64, 16, 64, 256] {
            let r = mean_ratio(Algo::B, 4096, d, None)?;
            let bound = 8.0 * ((d as f64).log2() + 4.0);
            pass &= r <= bound;
            parts.push(format!("B D{d}: {r:.3} <= {bound}"));
        }
        // full doubling: one component of n vertices
        let full = |n: usize| Some(n.trailing_zeros());
        let (b_small, b_large) = (mean_ratio(Algo::B, 512, 16, full(512))?, mean_ratio(Algo::B, 4096, 16, full(4096))?);
        pass &= b_large <= 2.0 * b_small;
        parts.push(format!("B n512 {b_small:.3} -> n4096 {b_large:.3}"));
        let (a_small, a_large) = (mean_ratio(Algo::A, 512, 16, full(512))?, mean_ratio(Algo::A, 4096, 16, full(4096))?);
        pass &= a_large >= 1.2 * a_small;
        parts.push(format!("A n512 {a_small:.3} -> n4096 {a_large:.3} (x{:.3})", a_large / a_small));
        Ok(())
    };
    if let Err(e) = go() {
        return verdict(false, e);
    }
    verdict(pass, parts.join(", "))
}

fn criterion_12() -> Verdict {
    let grid = Grid {
        suite: Suite::PathDoubling,
        algos: Algo::ALL.to_vec(),
        ns: vec![512, 1024],
        ds: vec![4, 16, 64, 256],
        epsilons: vec![Fraction::new(1, 4).unwrap()],
        seeds: (0..5).collect(),
        alpha: Fraction::half(),
        policy: FlipPolicy::default(),
        phases: None,
        beta: None,
    };
    let csv = || {
        let mut buf = Vec::new();
        write_csv(&sweep(&grid).rows, &mut buf).expect("in-memory CSV");
        buf
    };
    let (a, b) = (csv(), csv());
    verdict(a == b && !a.is_empty(), format!("{} bytes, identical: {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, start: Instant, v: Verdict| {
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {id:>2} {name:<24} {} {secs:>7.2}s  {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed += 1;
        }
    };

    let t = Instant::now();
    let records = run_suite_one();
    report(1, "validity", t, criterion_1(&records));
    let t = Instant::now();
    report(2, "opt2 oracle", t, criterion_2());
    let t = Instant::now();
    report(3, "bond oracle", t, criterion_3());
    let t = Instant::now();
    report(4, "bond inequality", t, criterion_4());
    let t = Instant::now();
    report(5, "witness bound", t, criterion_5(&records));
    let t = Instant::now();
    report(6, "charging audit", t, criterion_6(&records));
    let t = Instant::now();
    report(7, "moderate cost bound", t, criterion_7(&records));
    let t = Instant::now();
    report(8, "hierarchy structure", t, criterion_8());
    let t = Instant::now();
    report(9, "baseline bound", t, criterion_9(&records));
    let t = Instant::now();
    report(10, "lower-bound monte carlo", t, criterion_10());
    let t = Instant::now();
    report(11, "ratio trend", t, criterion_11());
    let t = Instant::now();
    report(12, "determinism", t, criterion_12());

    if failed == 0 {
        println!("acceptance: all 12 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
