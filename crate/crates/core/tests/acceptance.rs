//! End-to-end runs of the whole proof schedule plus the audit and the
//! property suites. One line per criterion, then a single assertion.
//!
//! Run with `cargo test --release -p pcr4bp-core --test acceptance -- --nocapture`.

mod suites;

use std::time::{Duration, Instant};

use pcr4bp_core::bifurcation::Mechanism;
use pcr4bp_core::search::{self, RunReport, SearchOptions};
use pcr4bp_core::small_masses;
use pcr4bp_core::solve::pairwise_disjoint;

struct Line {
    ok: bool,
    detail: String,
}

fn line(ok: bool, detail: impl Into<String>) -> Line {
    Line { ok, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn point_count(run: &RunReport, took: Duration, expected: usize) -> Line {
    let tight: Vec<_> = run.lists.tight.records.iter().map(|r| r.phase).collect();
    let ok = run.conclusive
        && run.solution_count == Some(expected)
        && tight.len() == expected
        && pairwise_disjoint(&tight)
        && took <= Duration::from_secs(60);
    line(ok, format!("{:?} solutions, conclusive {}, {}", run.solution_count, run.conclusive, secs(took)))
}

fn s300_has_existence(run: &RunReport) -> bool {
    run.lists.s300.records.iter().any(|r| {
        r.components.iter().any(|c| c.max_solutions == 3 && c.has_solution && c.mechanism == Mechanism::CubicMiranda)
    })
}

fn strip_summary(run: &RunReport) -> String {
    let l = &run.lists;
    format!(
        "conclusive {}, s2 {}, s111 {}, s210 {}, s300 {}",
        run.conclusive, l.s2.count, l.s111.count, l.s210.count, l.s300.count
    )
}

#[test]
fn acceptance() {
    let opts = SearchOptions::new(1e-6);
    let mut runs = Vec::new();
    let mut times = Vec::new();
    for (strategy, pr) in search::proof_schedule() {
        let start = Instant::now();
        runs.push(search::run_strategy(strategy, &pr, &opts));
        times.push(start.elapsed());
        let r = runs.last().unwrap();
        eprintln!("  run {:?} on {:?}: conclusive {} in {}", strategy, pr, r.conclusive, secs(times[times.len() - 1]));
    }

    let mut lines = Vec::new();
    lines.push(point_count(&runs[0], times[0], 8));
    lines.push(point_count(&runs[1], times[1], 10));

    let p2 = &runs[2];
    lines.push(line(
        p2.conclusive && p2.outer_conclusive && times[2] <= Duration::from_secs(600),
        format!("P2 conclusive {}, {}", p2.conclusive, secs(times[2])),
    ));

    let p1 = &runs[3..7];
    let p1_time: Duration = times[3..7].iter().sum();
    let certs: usize = p1.iter().map(|r| r.small_mass_certificates).sum();
    lines.push(line(
        p1.iter().all(|r| r.conclusive) && certs > 0 && p1_time <= Duration::from_secs(7200),
        format!(
            "P1 conclusive {:?}, small-mass certificates {}, {}",
            p1.iter().map(|r| r.conclusive).collect::<Vec<_>>(),
            certs,
            secs(p1_time)
        ),
    ));

    let (a, b, c) = (&runs[7], &runs[8], &runs[9]);
    let p3_time: Duration = times[7..10].iter().sum();
    let light = a.conclusive && a.lists.s2.count == 0 && a.lists.s3_count() == 0;
    let cusp = b.conclusive && b.lists.s2.count == 0 && b.lists.s300.count > 0 && s300_has_existence(b);
    let heavy = c.conclusive && c.lists.s2.count == 0 && c.lists.s300.count == 0 && c.lists.s210.count > 0;
    lines.push(line(
        light && cusp && heavy && p3_time <= Duration::from_secs(7200),
        format!(
            "[0,0.2]: {}; [0.2,0.25]: {}; [0.25,0.5]: {}; {}",
            strip_summary(a),
            strip_summary(b),
            strip_summary(c),
            secs(p3_time)
        ),
    ));

    let proof = search::assemble_proof(runs);
    let conn = &proof.connectivity;
    lines.push(line(
        proof.verdict,
        format!(
            "failures {}, point counts {:?}, s1 meets P1 {}, s111 meets P2 {}, unanchored {}",
            proof.failures.len(),
            proof.point_counts,
            conn.s1_meets_p1,
            conn.s111_meets_p2,
            conn.unanchored
        ),
    ));

    let start = Instant::now();
    let audit = small_masses::constants_audit();
    let took = start.elapsed();
    lines.push(match audit {
        Ok(rows) => {
            let bad: Vec<&str> = rows.iter().filter(|r| !r.ok()).map(|r| r.name.as_str()).collect();
            line(
                bad.is_empty() && took <= Duration::from_secs(600),
                format!("{} constants, out of tolerance {:?}, {}", rows.len(), bad, secs(took)),
            )
        }
        Err(e) => line(false, format!("audit failed: {e}")),
    });

    let suites = [
        suites::interval_inclusion(100_000),
        suites::jets_vs_finite_differences(100),
        suites::krawczyk_vs_sampling(),
        suites::fold_classifier(64),
        suites::miranda_soundness(1000),
    ];
    let failed: Vec<&String> = suites.iter().filter_map(|s| s.as_ref().err()).collect();
    lines.push(line(
        failed.is_empty(),
        if failed.is_empty() { "5 suites pass".to_string() } else { format!("{failed:?}") },
    ));

    for (i, l) in lines.iter().enumerate() {
        println!("criterion {}: {} - {}", i + 1, if l.ok { "PASS" } else { "FAIL" }, l.detail);
    }
    let failing: Vec<usize> = lines.iter().enumerate().filter(|(_, l)| !l.ok).map(|(i, _)| i + 1).collect();
    assert!(failing.is_empty(), "failing criteria: {failing:?}");
}
