//! Acceptance criteria, run in order with one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so criteria execute
//! sequentially and their wall-clock limits are measured without other tests
//! competing for the CPU.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use multijames::identities::distorted_difference;
use multijames::ingest::{build_standings, EventRecord, TiesPolicy};
use multijames::sim::{estimate_p_n, SimConfig};
use multijames::tree::{
    p_n_from_tree, propagate_percentages, CompetitionGraph, CompetitorId, PairwiseEdge,
};
use multijames::verify::{check_conditions, CanonicalFamily, Counterexample, SampleSpec};
use multijames::{evaluate, james_p, p_n, Contest, Method, MethodOptions, Partition, WinPct};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

/// Number, name, body and wall-clock limit of one criterion.
type Criterion = (u32, &'static str, fn() -> Check, Option<Duration>);

fn pct(x: f64) -> WinPct {
    WinPct::new(x).unwrap()
}

fn contest(a: f64, b: &[f64]) -> Contest {
    Contest::from_values(a, b).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    let third = 1.0 / 3.0;
    let cases = [
        (
            "p_n(0.4; 1/3, 1/3)",
            p_n(&contest(0.4, &[third, third])).unwrap().value(),
            0.4,
        ),
        (
            "p_2(0.5; 0.5, 0.5)",
            p_n(&contest(0.5, &[0.5, 0.5])).unwrap().value(),
            third,
        ),
        (
            "p_2(0.5; 0.8, 0.5)",
            p_n(&contest(0.5, &[0.8, 0.5])).unwrap().value(),
            1.0 / 6.0,
        ),
        (
            "james_p(0.6, 0.4)",
            james_p(pct(0.6), pct(0.4)).unwrap().value(),
            9.0 / 13.0,
        ),
    ];
    let mut worst: f64 = 0.0;
    for (name, got, want) in cases {
        let err = (got - want).abs();
        worst = worst.max(err);
        ensure(err <= 1e-12, || format!("{name} = {got}, expected {want}"))?;
    }
    Ok(format!("max error {worst:e}"))
}

fn criterion_2() -> Check {
    let spec = SampleSpec::new(1, 8, 1000, 2, 1e-9).map_err(|e| e.to_string())?;
    let reports = check_conditions(&CanonicalFamily, &spec);
    let worst = reports.iter().map(|r| r.max_violation).fold(0.0, f64::max);
    for r in &reports {
        ensure(r.passed && r.max_violation < 1e-9, || {
            format!("{} max violation {:e}", r.name, r.max_violation)
        })?;
    }
    Ok(format!(
        "{} checks, 8000 contests each, max violation {worst:e}",
        reports.len()
    ))
}

fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Partition {
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &l) in labels.iter().enumerate() {
        blocks[l].push(i);
    }
    blocks.retain(|b| !b.is_empty());
    Partition::new(blocks, n).unwrap()
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let a = rng.random_range(0.05..=0.95);
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..=0.95)).collect();
        let c = contest(a, &b);
        let options = MethodOptions {
            pivot: Some(pct(rng.random_range(0.05..=0.95))),
            partition: Some(random_partition(&mut rng, n)),
        };
        let values: Vec<f64> = Method::ALL
            .iter()
            .map(|&m| evaluate(m, &c, &options).map(|p| p.value()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let spread = values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max(spread);
        ensure(spread <= 1e-12, || {
            format!("spread {spread:e} at a={a} b={b:?}")
        })?;
    }
    Ok(format!(
        "8 evaluators on 1000 contests, max pairwise spread {worst:e}"
    ))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for t in 0..200 {
        let size = rng.random_range(2..=12);
        let hidden: Vec<f64> = (0..size).map(|_| rng.random_range(0.05..=0.95)).collect();
        let mut labels: Vec<usize> = (0..size).collect();
        labels.shuffle(&mut rng);
        let name = |i: usize| CompetitorId::new(format!("t{t}v{}", labels[i])).unwrap();
        let mut edges = Vec::new();
        for child in 1..size {
            let parent = rng.random_range(0..child);
            let (u, v) = if rng.random_bool(0.5) {
                (parent, child)
            } else {
                (child, parent)
            };
            let p = james_p(pct(hidden[u]), pct(hidden[v])).unwrap().value();
            edges.push(PairwiseEdge::new(name(u), name(v), p).unwrap());
        }
        edges.shuffle(&mut rng);

        let root = rng.random_range(0..size);
        let graph = CompetitionGraph::new(name(root), edges);
        let others: Vec<f64> = (0..size)
            .filter(|&i| i != root)
            .map(|i| hidden[i])
            .collect();
        let expected = p_n(&contest(hidden[root], &others)).unwrap().value();
        let got = p_n_from_tree(&graph).map_err(|e| e.to_string())?.value();
        let err = (got - expected).abs();
        worst = worst.max(err);
        ensure(err <= 1e-12, || format!("tree {t}: {got} vs {expected}"))?;

        let anchor = rng.random_range(0..size);
        let solved = propagate_percentages(&graph, &name(anchor), pct(hidden[anchor]))
            .map_err(|e| e.to_string())?;
        for (i, &h) in hidden.iter().enumerate() {
            let recovered = solved.get(&name(i)).ok_or("missing competitor")?.value();
            let err = (recovered - h).abs();
            worst = worst.max(err);
            ensure(err <= 1e-12, || {
                format!("tree {t}: vertex {i} recovered {recovered}, hidden {h}")
            })?;
        }
    }
    Ok(format!("200 trees, max error {worst:e}"))
}

fn criterion_5() -> Check {
    let third = 1.0 / 3.0;
    let contests = [
        contest(0.4, &[third, third]),
        contest(0.5, &[0.5, 0.5]),
        contest(0.5, &[0.8, 0.5]),
        contest(0.6, &[0.4]),
    ];
    let mut worst_z: f64 = 0.0;
    let mut worst_freq_z: f64 = 0.0;
    for (k, c) in contests.iter().enumerate() {
        let cfg = SimConfig::new(1_000_000, 5).unwrap();
        let r = estimate_p_n(c, &cfg).map_err(|e| e.to_string())?;
        let closed = p_n(c).unwrap().value();
        let z = (r.win_probability_estimate.value() - closed).abs() / r.standard_error;
        worst_z = worst_z.max(z);
        ensure(z < 3.0, || format!("contest {k}: |z| = {z:.3}"))?;
        for i in 0..=c.n() {
            let expected = p_n(&c.rotate(i)).unwrap().value();
            let z = (r.frequency(i) - expected).abs() / r.frequency_standard_error(i);
            worst_freq_z = worst_freq_z.max(z);
            ensure(z < 4.0, || {
                format!("contest {k} competitor {i}: |z| = {z:.3}")
            })?;
        }
    }
    Ok(format!(
        "4 contests x 10^6 trials, protagonist max |z| {worst_z:.3}, competitor max |z| {worst_freq_z:.3}"
    ))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for m in 1..=3usize {
        for n in 1..=3usize {
            for _ in 0..100 {
                let a = pct(rng.random_range(0.05..=0.95));
                let b = pct(rng.random_range(0.05..=0.95));
                let c: Vec<WinPct> = (1..n).map(|_| pct(rng.random_range(0.05..=0.95))).collect();
                let d: Vec<WinPct> = (1..m).map(|_| pct(rng.random_range(0.05..=0.95))).collect();
                let got = distorted_difference(b, a, &c, &d)
                    .map_err(|e| e.to_string())?
                    .value();
                let mut opponents = vec![a];
                opponents.extend(&d);
                let direct = p_n(&Contest::new(b, opponents).unwrap()).unwrap().value();
                let err = (got - direct).abs();
                worst = worst.max(err);
                ensure(err <= 1e-12, || format!("m={m} n={n}: {got} vs {direct}"))?;
                if m == 1 && n == 1 {
                    let complement = 1.0 - james_p(a, b).unwrap().value();
                    ensure(got == complement, || {
                        format!("m=n=1: {got} != 1 - P(a,b) = {complement}")
                    })?;
                }
            }
        }
    }
    Ok(format!("900 cases, max error {worst:e}, m=n=1 exact"))
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_multijames"))
        .args(args)
        .output()
        .expect("binary runs");
    let text =
        String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap_or(-1), text)
}

fn criterion_7() -> Check {
    let (code, text) = run_cli(&[
        "verify",
        "--family",
        "builtin",
        "--samples",
        "1000",
        "--seed",
        "1",
    ]);
    ensure(code == 0, || format!("builtin exited {code}:\n{text}"))?;
    let mut summary = vec!["builtin: exit 0".to_string()];
    for family in Counterexample::ALL {
        let spec = format!("counterexample:{family}");
        let (code, text) = run_cli(&[
            "verify",
            "--family",
            &spec,
            "--samples",
            "1000",
            "--seed",
            "1",
        ]);
        ensure(code == 1, || format!("{spec} exited {code}"))?;
        for check in family.documented_failures() {
            let line = text
                .lines()
                .find(|l| l.starts_with("FAIL") && l.split_whitespace().nth(1) == Some(check))
                .ok_or_else(|| format!("{spec}: documented check {check} did not fail"))?;
            ensure(line.contains("witness: a="), || {
                format!("{spec}: {check} has no witness")
            })?;
        }
        summary.push(format!(
            "{family}: exit 1, {} documented failures",
            family.documented_failures().len()
        ));
    }
    Ok(summary.join("; "))
}

fn criterion_8() -> Check {
    let pairs: Vec<(String, u32)> = (1..=10).map(|r| (format!("c{r}"), r)).collect();
    let refs: Vec<(&str, u32)> = pairs.iter().map(|(n, r)| (n.as_str(), *r)).collect();
    let event = EventRecord::from_pairs("race", &refs).unwrap();
    let standings = build_standings(&[event], TiesPolicy::Reject).map_err(|e| e.to_string())?;
    for r in 1..=10u32 {
        let id = CompetitorId::new(format!("c{r}")).unwrap();
        let got = standings.pct(&id).ok_or("missing pct")?.value();
        let want = f64::from(10 - r) / 9.0;
        ensure(got == want, || format!("rank {r}: {got} vs {want}"))?;
    }
    let third = standings.record(&CompetitorId::new("c3").unwrap()).unwrap();
    ensure(third.wins == 7.0 && third.losses == 2.0, || {
        format!("rank 3 record {third:?}")
    })?;
    Ok("rank r has pct (10-r)/9; rank 3 is 7 wins, 2 losses".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            1,
            "canonical values",
            criterion_1,
            Some(Duration::from_secs(1)),
        ),
        (
            2,
            "multi-James conditions",
            criterion_2,
            Some(Duration::from_secs(10)),
        ),
        (
            3,
            "identity cross-agreement",
            criterion_3,
            Some(Duration::from_secs(10)),
        ),
        (
            4,
            "path formula round-trip",
            criterion_4,
            Some(Duration::from_secs(5)),
        ),
        (
            5,
            "Monte Carlo oracle",
            criterion_5,
            Some(Duration::from_secs(60)),
        ),
        (6, "distorted difference formula", criterion_6, None),
        (
            7,
            "verifier discrimination",
            criterion_7,
            Some(Duration::from_secs(30)),
        ),
        (8, "ingestion", criterion_8, None),
    ];
    let mut failures = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!(
                "took {:.2}s, limit {}s",
                elapsed.as_secs_f64(),
                limit.as_secs()
            )),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!(
                "criterion {id} PASS {name} ({:.2}s): {detail}",
                elapsed.as_secs_f64()
            ),
            Err(why) => {
                failures += 1;
                println!(
                    "criterion {id} FAIL {name} ({:.2}s): {why}",
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
