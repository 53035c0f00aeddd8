//! Acceptance criteria 1–8. Prints one PASS/FAIL line per criterion.
//!
//! Sub-checks listed in `KNOWN_FAILURES` fail because the stated
//! expectation contradicts the mathematics; they are reported as FAIL and
//! do not fail the process. Any other failing sub-check does, and so does a
//! known failure that starts passing.

mod common;

use std::time::Instant;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::Dfs;
use serde_json::Value;

use common::*;
use svdyn::cli;
use svdyn::expansive::{certify_expansive, check_expansive_lift, expansive_candidates, quantize, ExpansiveVerdict};
use svdyn::lifting::{
    inverse_slack, lift_pseudo_orbit, match_orbit, shadow_in_shift, shadow_inverse, transfer_shadowing_down,
    transfer_shadowing_up,
};
use svdyn::orbits::{extend_orbit, generate_pseudo_orbit, rho, validate_orbit, validate_pseudo_orbit, ExtendPolicy, Flavor, TruncatedOrbitPoint};
use svdyn::shadowing::{decide_finite_shadowing, decide_shadowing_property, delta_candidates, delta_star, PropertyLimits, Verdict};
use svdyn::svmap::{example_3_11, identity_fn, modulus_chain, symmetrize, tent_family, PiecewiseMap, Relation, System};
use svdyn::SeededRng;

/// Sub-checks whose expectation is contradicted by the mathematics.
const KNOWN_FAILURES: &[(u32, &str)] = &[
    (1, "property decisions match universal enumeration (length ≤ 6)"),
    (4, "quantized Ex. 3.11 at h = 2/256"),
    (7, "fiber_map(tent c=2) non-continuous"),
];

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn check(name: &str, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.to_string(), pass, detail: detail.into() }
}

fn main() {
    let criteria: Vec<(u32, &str, fn() -> Vec<Check>)> = vec![
        (1, "oracle equivalence (shadowing)", criterion_1),
        (2, "lift and transfer down", criterion_2),
        (3, "transfer up within the closed-form bound", criterion_3),
        (4, "inverse shadowing pipeline", criterion_4),
        (5, "expansiveness exactness", criterion_5),
        (6, "orbit matcher", criterion_6),
        (7, "semicontinuity and openness fixtures", criterion_7),
        (8, "CLI determinism", criterion_8),
    ];
    let mut unexpected = Vec::new();
    for (id, title, run) in criteria {
        let start = Instant::now();
        let checks = run();
        let secs = start.elapsed().as_secs_f64();
        let failing: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
        let status = if failing.is_empty() { "PASS" } else { "FAIL" };
        println!("CRITERION {id} {status}: {title} ({} sub-checks, {secs:.1}s)", checks.len());
        for c in &checks {
            let known = KNOWN_FAILURES.contains(&(id, c.name.as_str()));
            let mark = match (c.pass, known) {
                (true, false) => "ok",
                (false, true) => "FAIL (documented conflict)",
                (false, false) => "FAIL",
                (true, true) => "ok (documented conflict no longer reproduces)",
            };
            println!("    [{mark}] {}: {}", c.name, c.detail);
            if c.pass == known {
                unexpected.push(format!("criterion {id}: {}", c.name));
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcomes: {unexpected:?}");
        std::process::exit(1);
    }
}

fn criterion_1() -> Vec<Check> {
    let mut systems: Vec<Relation> = Vec::new();
    for n in [2, 3] {
        for s in all_metrics(n) {
            systems.extend(all_relations(&s));
        }
    }
    let exhaustive = systems.len();
    let mut rng = SeededRng::new(1);
    systems.extend((0..500).map(|_| random_system(4, &mut rng)));

    let mut seg_cases = 0u64;
    let mut seg_mismatch = Vec::new();
    let mut prop_cases = 0u64;
    let mut prop_mismatch = Vec::new();
    let mut beyond_horizon = Vec::new();
    let mut unexplained = Vec::new();
    let limits = PropertyLimits::default();
    for (k, f) in systems.iter().enumerate() {
        let eps = eps_grid(f);
        for xs in all_sequences(f.len(), 4) {
            let threshold = naive_shadow_threshold(f, &xs);
            for &e in &eps {
                seg_cases += 1;
                let got = decide_finite_shadowing(f, &xs, e).unwrap().verdict == Verdict::Shadowed;
                if got != (threshold < e) && seg_mismatch.len() < 5 {
                    seg_mismatch.push(format!("system {k} seq {xs:?} eps {e}"));
                }
            }
        }
        for &e in &eps {
            for d in delta_candidates(f, e) {
                prop_cases += 1;
                let got = decide_shadowing_property(f, e, d, limits).unwrap();
                let naive = naive_property(f, e, d, 6);
                if (got.verdict == Verdict::PropertyHolds) == naive {
                    continue;
                }
                let case = format!("system {k} eps {e} delta {d} counterexample {:?}", got.counterexample);
                let verified = got.counterexample.as_ref().is_some_and(|c| {
                    c.len() > 6 && validate_pseudo_orbit(f, c, d) && !naive_shadowed(f, c, e)
                });
                if verified {
                    beyond_horizon.push(case.clone());
                } else {
                    unexplained.push(case.clone());
                }
                prop_mismatch.push(case);
            }
        }
    }
    vec![
        check(
            "segment decisions match orbit enumeration",
            seg_mismatch.is_empty(),
            format!("{seg_cases} cases on {exhaustive} exhaustive + 500 sampled systems; mismatches {seg_mismatch:?}"),
        ),
        check(
            "property decisions match universal enumeration (length ≤ 6)",
            prop_mismatch.is_empty(),
            format!("{prop_cases} (ε, δ) cases; {} mismatches {prop_mismatch:?}", prop_mismatch.len()),
        ),
        check(
            "every disagreement is a verified counterexample longer than 6",
            unexplained.is_empty(),
            format!(
                "{} shortest counterexamples exceed the enumeration horizon, each a δ-pseudo-orbit that no orbit ε-shadows; unexplained {unexplained:?}",
                beyond_horizon.len()
            ),
        ),
    ]
}

/// Finite and symmetrized-tent pseudo-orbits used by criteria 2 and 3.
struct Corpus {
    finite: Vec<(Relation, Vec<usize>)>,
    tent: PiecewiseMap,
    tent_orbits: Vec<Vec<f64>>,
}

const FINITE_DELTA: f64 = 0.5;
const TENT_DELTA: f64 = 0.1;

fn corpus() -> Corpus {
    let mut rng = SeededRng::new(2);
    let finite = (0..50)
        .map(|k| {
            let f = random_line_system(2 + k % 5, &mut rng);
            let d1 = modulus_chain(&f, FINITE_DELTA).unwrap().first();
            let p = generate_pseudo_orbit(&f, d1, 8, k as u64).unwrap();
            (f, p.points)
        })
        .collect();
    let tent = symmetrize(&tent_family(2.0).unwrap()).unwrap();
    let d1 = modulus_chain(&tent, TENT_DELTA).unwrap().first();
    let tent_orbits = (0..20)
        .map(|k| generate_pseudo_orbit(&tent, d1, 5 + k % 16, 100 + k as u64).unwrap().points)
        .collect();
    Corpus { finite, tent, tent_orbits }
}

struct DownTally {
    instances: usize,
    gap_violations: usize,
    shadowed: usize,
    down_violations: usize,
    errors: Vec<String>,
}

fn lift_and_down<S: svdyn::shadowing::ShadowEngine>(f: &S, pts: &[S::Point], delta: f64, eps: f64, t: &mut DownTally) {
    t.instances += 1;
    let (lifted, report) = match lift_pseudo_orbit(f, pts, delta, None) {
        Ok(x) => x,
        Err(e) => {
            t.errors.push(e.to_string());
            return;
        }
    };
    let ok = report.beta.iter().all(|&b| b < delta) && lifted.iter().all(|u| u.is_valid(f));
    let heads_ok = lifted.iter().zip(pts).all(|(u, &x)| u.head() == x);
    if !ok || !heads_ok {
        t.gap_violations += 1;
    }
    match shadow_in_shift(f, &lifted, eps) {
        Ok(Some((y, _))) => {
            t.shadowed += 1;
            match transfer_shadowing_down(f, &y.points, pts, eps) {
                Ok(down) => {
                    if !down.points.iter().zip(pts).all(|(&a, &b)| f.dist(a, b) < 2.0 * eps) {
                        t.down_violations += 1;
                    }
                }
                Err(_) => t.down_violations += 1,
            }
        }
        Ok(None) => {}
        Err(e) => t.errors.push(e.to_string()),
    }
}

fn criterion_2() -> Vec<Check> {
    let c = corpus();
    let mut fin = DownTally { instances: 0, gap_violations: 0, shadowed: 0, down_violations: 0, errors: vec![] };
    for (f, pts) in &c.finite {
        lift_and_down(f, pts, FINITE_DELTA, 0.25, &mut fin);
    }
    let mut tent = DownTally { instances: 0, gap_violations: 0, shadowed: 0, down_violations: 0, errors: vec![] };
    for pts in &c.tent_orbits {
        lift_and_down(&c.tent, pts, TENT_DELTA, 0.2, &mut tent);
    }
    [("finite systems", fin), ("symmetrized tent c=2", tent)]
        .into_iter()
        .map(|(name, t)| {
            check(
                name,
                t.gap_violations == 0 && t.down_violations == 0 && t.errors.is_empty() && t.shadowed > 0,
                format!(
                    "{} instances, gap violations {}, shift-level shadows {}, 2ε violations {}, errors {:?}",
                    t.instances, t.gap_violations, t.shadowed, t.down_violations, t.errors
                ),
            )
        })
        .collect()
}

struct UpTally {
    instances: usize,
    transferred: usize,
    violations: usize,
    worst_margin: f64,
    errors: Vec<String>,
}

fn lift_and_up<S: svdyn::shadowing::ShadowEngine>(f: &S, pts: &[S::Point], delta: f64, eps: f64, t: &mut UpTally) {
    t.instances += 1;
    let eps0 = modulus_chain(f, eps / 2.0).unwrap().first();
    let lifted = match lift_pseudo_orbit(f, pts, delta, None) {
        Ok((l, _)) => l,
        Err(e) => {
            t.errors.push(e.to_string());
            return;
        }
    };
    let heads: Vec<S::Point> = lifted.iter().map(|u| u.head()).collect();
    let Some(z) = decide_finite_shadowing(f, &heads, eps0 / 2.0).unwrap().witness else {
        return;
    };
    match transfer_shadowing_up(f, &lifted, &z, eps) {
        Ok((zbar, report)) => {
            t.transferred += 1;
            let within = report.beta.iter().all(|&b| b < eps);
            let valid = zbar.iter().all(|u| u.is_valid(f));
            if report.first_violation.is_some() || !within || !valid {
                t.violations += 1;
            }
            for (b, c) in report.beta.iter().zip(&report.bounds) {
                t.worst_margin = t.worst_margin.min(c - b);
            }
        }
        Err(e) => t.errors.push(e.to_string()),
    }
}

fn criterion_3() -> Vec<Check> {
    let c = corpus();
    let mut fin = UpTally { instances: 0, transferred: 0, violations: 0, worst_margin: f64::INFINITY, errors: vec![] };
    for (f, pts) in &c.finite {
        lift_and_up(f, pts, FINITE_DELTA, 0.5, &mut fin);
    }
    let mut tent = UpTally { instances: 0, transferred: 0, violations: 0, worst_margin: f64::INFINITY, errors: vec![] };
    for pts in &c.tent_orbits {
        lift_and_up(&c.tent, pts, TENT_DELTA, 0.5, &mut tent);
    }
    [("finite systems", fin), ("symmetrized tent c=2", tent)]
        .into_iter()
        .map(|(name, t)| {
            check(
                name,
                t.violations == 0 && t.errors.is_empty() && t.transferred > 0,
                format!(
                    "{} instances, {} with a base witness, bound violations {}, smallest margin {:.3e}, errors {:?}",
                    t.instances, t.transferred, t.violations, t.worst_margin, t.errors
                ),
            )
        })
        .collect()
}

fn inverse_pipeline(name: &str, f: &Relation) -> Check {
    if !f.is_onto() {
        let err = shadow_inverse(f, &[0], 0.1, 0.1).unwrap_err();
        return check(name, false, format!("precondition: {err}"));
    }
    let g = f.invert().unwrap();
    let mut total = 0;
    let mut ok = 0;
    let mut notes = Vec::new();
    for eps in [0.1, 0.25] {
        let delta = delta_star(f, eps, PropertyLimits::default()).unwrap();
        if !(delta > 0.0) {
            notes.push(format!("no δ at ε = {eps}"));
            total += 100;
            continue;
        }
        let d1 = inverse_slack(f, delta).unwrap();
        for seed in 0..100 {
            total += 1;
            let pts = generate_pseudo_orbit(&g, d1, 10, seed).unwrap().points;
            let twice: Vec<usize> = pts.iter().rev().rev().copied().collect();
            let reversed: Vec<usize> = pts.iter().rev().copied().collect();
            let involution = twice == pts && validate_pseudo_orbit(f, &reversed, delta);
            match shadow_inverse(f, &pts, eps, delta) {
                Ok(r) => {
                    let good = r.verdict == Verdict::Shadowed
                        && r.witness.as_ref().is_some_and(|w| {
                            validate_orbit(&g, w) && w.iter().zip(&pts).all(|(&a, &b)| f.dist(a, b) < eps)
                        });
                    if good && involution {
                        ok += 1;
                    }
                }
                Err(e) => notes.push(e.to_string()),
            }
        }
    }
    notes.dedup();
    check(name, ok == total, format!("{ok}/{total} witnesses; notes {notes:?}"))
}

fn criterion_4() -> Vec<Check> {
    let q = quantize(&example_3_11(), 2.0 / 256.0).unwrap();
    vec![
        inverse_pipeline("permutation", &permutation()),
        inverse_pipeline("cycle", &cycle()),
        inverse_pipeline("full relation", &full()),
        inverse_pipeline("quantized Ex. 3.11 at h = 2/256", &q),
    ]
}

/// A pair survives iff it reaches a node on a cycle of the product graph.
fn petgraph_expansive(f: &Relation, delta: f64) -> bool {
    let n = f.len();
    let mut g: DiGraph<(usize, usize), ()> = DiGraph::new();
    let mut idx = vec![None; n * n];
    for x in 0..n {
        for y in 0..n {
            if f.dist(x, y) < delta {
                idx[x * n + y] = Some(g.add_node((x, y)));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let Some(a) = idx[x * n + y] else { continue };
            for u in f.image(x) {
                for v in f.image(y) {
                    if let Some(b) = idx[u * n + v] {
                        g.add_edge(a, b, ());
                    }
                }
            }
        }
    }
    let mut cyclic = vec![false; g.node_count()];
    for scc in tarjan_scc(&g) {
        let looped = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
        for v in scc {
            cyclic[v.index()] = looped;
        }
    }
    !g.node_indices().any(|s: NodeIndex| {
        let (x, y) = g[s];
        if x == y {
            return false;
        }
        let mut dfs = Dfs::new(&g, s);
        while let Some(v) = dfs.next(&g) {
            if cyclic[v.index()] {
                return true;
            }
        }
        false
    })
}

fn criterion_5() -> Vec<Check> {
    let mut systems = vec![finite_line(), cycle(), permutation(), full(), identity2()];
    for n in [2, 3] {
        for s in all_metrics(n) {
            systems.extend(all_relations(&s));
        }
    }
    let mut rng = SeededRng::new(5);
    systems.extend((0..250).map(|_| random_system(4, &mut rng)));
    systems.extend((0..250).map(|_| random_system(5, &mut rng)));
    let mut cases = 0;
    let mut mismatches = Vec::new();
    let mut bad_witness = 0;
    for (k, f) in systems.iter().enumerate() {
        for d in expansive_candidates(f) {
            cases += 1;
            let cert = certify_expansive(f, d).unwrap();
            let got = cert.verdict == ExpansiveVerdict::Expansive;
            if got != petgraph_expansive(f, d) && mismatches.len() < 5 {
                mismatches.push(format!("system {k} delta {d}"));
            }
            if cert.witness_pair.as_ref().is_some_and(|w| !w.is_valid(f, d)) {
                bad_witness += 1;
            }
        }
    }
    let q = quantize(&example_3_11(), 2.0 / 512.0).unwrap();
    let cert = certify_expansive(&q, 0.1).unwrap();
    let lift = check_expansive_lift(&q, 0.1, 2000, 32, 5).unwrap();
    vec![
        check(
            "certificates match cycle-reachability oracle",
            mismatches.is_empty() && bad_witness == 0,
            format!("{cases} (system, δ) cases on {} systems; mismatches {mismatches:?}; invalid witnesses {bad_witness}", systems.len()),
        ),
        check(
            "quantized Ex. 3.11 at h = 2/512 expansive at δ = 0.1",
            cert.verdict == ExpansiveVerdict::Expansive,
            format!("{} product nodes, {} survivors", cert.product_nodes, cert.surviving_nodes),
        ),
        check(
            "shift separates distinct heads by δ/2 − 2^-32",
            lift.violations == 0 && lift.separated > 0,
            format!(
                "{} samples: separated {}, inconclusive {}, violations {}, equal heads {}, horizon {}",
                lift.samples, lift.separated, lift.inconclusive, lift.violations, lift.equal_heads, lift.max_horizon
            ),
        ),
    ]
}

fn criterion_6() -> Vec<Check> {
    let f = symmetrize(&tent_family(2.0).unwrap()).unwrap();
    let chain = modulus_chain(&f, 0.1).unwrap();
    let mut rng = SeededRng::new(6);
    let mut violations = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let y = f.sample(&mut rng);
        let x = f.perturb(y, chain.first(), &mut rng);
        let oy = extend_orbit(&f, &[y], 33, ExtendPolicy::Seeded(rng.next_u64())).unwrap();
        let u = TruncatedOrbitPoint::new(&f, Flavor::Right, oy.points).unwrap();
        match match_orbit(&f, x, &u, 0.1) {
            Ok(m) => {
                let r = rho(&f, &m, &u).unwrap().upper();
                worst = worst.max(r);
                if !(r <= 0.1) || !m.is_valid(&f) || m.head() != x {
                    violations.push(format!("pair {k}: ρ = {r}"));
                }
            }
            Err(e) => violations.push(format!("pair {k}: {e}")),
        }
    }
    let mut exact_fail = Vec::new();
    let mut instances = 0;
    for (name, g) in [("finite line", finite_line()), ("cycle", cycle()), ("permutation", permutation()), ("full", full())] {
        let min_slack = g.positive_slacks().into_iter().map(svdyn::space::rational_to_f64).fold(f64::INFINITY, f64::min);
        let slack = if min_slack.is_finite() { min_slack } else { 1.0 };
        for seed in 0..25 {
            instances += 1;
            let pts = generate_pseudo_orbit(&g, slack, 8, seed).unwrap().points;
            let exact = validate_orbit(&g, &pts)
                && lift_pseudo_orbit(&g, &pts, 0.5, Some(12)).is_ok_and(|(lifted, _)| {
                    lifted.iter().all(|u| u.is_valid(&g))
                        && lifted.windows(2).all(|w| w[0].shift_right().unwrap().prefix[..] == w[1].prefix[..w[0].depth()])
                });
            if !exact {
                exact_fail.push(format!("{name} seed {seed}"));
            }
        }
    }
    vec![
        check(
            "symmetrized tent matches within ρ ≤ 0.1",
            violations.is_empty(),
            format!("200 pairs, largest ρ {worst:.3e}, δ_1 = {:.3e}; violations {violations:?}", chain.first()),
        ),
        check(
            "below minimal slack lifts are exact shift orbits",
            exact_fail.is_empty(),
            format!("{instances} instances; failures {exact_fail:?}"),
        ),
    ]
}

fn run_json(args: &[&str]) -> std::result::Result<(i32, Value, String), String> {
    let out = cli::run(args.iter().copied());
    if out.code == 1 {
        return Err(out.stderr);
    }
    let v = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
    Ok((out.code, v, out.stdout))
}

fn golden(name: &str, text: &str) -> bool {
    std::fs::read_to_string(format!("tests/golden/{name}")).is_ok_and(|g| g == text)
}

fn criterion_7() -> Vec<Check> {
    let mut out = Vec::new();
    match run_json(&["check", "tests/fixtures/example_3_11.json"]) {
        Ok((code, v, text)) => {
            let r = &v["report"];
            let want = r["usc"] == true && r["lsc"] == false && r["open"] == true && r["onto"] == true;
            out.push(check(
                "check example_3_11 = {usc, ¬lsc, open, onto}",
                code == 0 && want && golden("check_example_3_11.json", &text),
                format!("usc {} lsc {} open {} onto {}; golden file compared", r["usc"], r["lsc"], r["open"], r["onto"]),
            ));
        }
        Err(e) => out.push(check("check example_3_11 = {usc, ¬lsc, open, onto}", false, e)),
    }
    for (file, gold) in [
        ("symmetrized_tent_2.json", "check_symmetrized_tent_2.json"),
        ("symmetrized_tent_1_5.json", "check_symmetrized_tent_1_5.json"),
    ] {
        let name = format!("check {file} continuous");
        match run_json(&["check", &format!("tests/fixtures/{file}")]) {
            Ok((code, v, text)) => out.push(check(
                &name,
                code == 0 && v["report"]["continuous"] == true && golden(gold, &text),
                format!("continuous {}; golden file compared", v["report"]["continuous"]),
            )),
            Err(e) => out.push(check(&name, false, e)),
        }
    }
    let tent = tent_family(2.0).unwrap().fiber_map().unwrap();
    out.push(check(
        "fiber_map(tent c=2) non-continuous",
        !tent.is_continuous(),
        format!(
            "is_continuous = {}; the tent on [0,2] is open (f((1−η, 1+η)) = (2−2η, 2] is relatively open), so its fiber map is continuous",
            tent.is_continuous()
        ),
    ));
    let id = identity_fn(0.0, 1.0).unwrap().fiber_map().unwrap();
    out.push(check("fiber_map(identity) continuous", id.is_continuous(), format!("is_continuous = {}", id.is_continuous())));
    out
}

fn criterion_8() -> Vec<Check> {
    let dir = std::env::temp_dir().join(format!("svdyn-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let q = dir.join("q.json");
    let qs = q.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["check", "tests/fixtures/example_3_11.json"],
        vec!["gen", "tests/fixtures/symmetrized_tent_2.json", "--delta", "0.001", "--len", "12", "--seed", "7"],
        vec!["shadow", "tests/fixtures/finite_line.json", "--points", "p0,p2,p2", "--eps", "0.6"],
        vec!["shadow", "tests/fixtures/symmetrized_tent_2.json", "--gen-delta", "0.01", "--len", "15", "--seed", "3", "--eps", "0.1"],
        vec!["shadow", "tests/fixtures/finite_line.json", "--property", "--delta", "0.5", "--eps", "0.3"],
        vec!["scan", "tests/fixtures/finite_line.json", "--eps-grid", "0.3,0.6,1.0", "--delta-star"],
        vec!["scan", "tests/fixtures/finite_line.json", "--eps-grid", "0.3,0.6", "--delta-grid", "0.25,0.5,0.75"],
        vec!["lift", "tests/fixtures/finite_line.json", "--points", "p0,p1,p2", "--delta", "0.5", "--mode", "shift", "--eps", "0.3"],
        vec!["lift", "tests/fixtures/example_3_11.json", "--gen-delta", "0.0005", "--len", "8", "--seed", "2", "--delta", "0.1", "--mode", "inv"],
        vec!["lift", "tests/fixtures/three_cycle.json", "--points", "p0,p2,p1", "--eps", "0.25", "--mode", "inverse-shadow"],
        vec!["lift", "tests/fixtures/symmetrized_tent_2.json", "--gen-delta", "1e-8", "--len", "20", "--seed", "4", "--eps", "0.2", "--depth", "8", "--mode", "nstep"],
        vec!["expansive", "tests/fixtures/finite_line.json", "--delta", "0.6", "--samples", "50", "--seed", "1", "--depth", "8"],
        vec!["quantize", "tests/fixtures/example_3_11.json", "--h", "0.0078125", "--out", qs],
        vec!["expansive", qs, "--delta", "0.1", "--samples", "100", "--seed", "2"],
    ];
    let mut out = Vec::new();
    for args in commands {
        let a = cli::run(args.iter().copied());
        let first_file = (args[0] == "quantize").then(|| std::fs::read(&q).unwrap_or_default());
        let b = cli::run(args.iter().copied());
        let second_file = (args[0] == "quantize").then(|| std::fs::read(&q).unwrap_or_default());
        let same = a == b && first_file == second_file && a.code != 1;
        out.push(check(
            &args[..2].join(" "),
            same,
            format!("exit {} twice; {} bytes; {}", a.code, a.stdout.len() + first_file.map_or(0, |f| f.len()), a.stderr.trim()),
        ));
    }
    let _ = std::fs::remove_dir_all(&dir);
    out
}
