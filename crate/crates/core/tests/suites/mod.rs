//! Property suites shared by the `properties` and `acceptance` targets.
//! Each returns a one-line summary or the first violation.

use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pcr4bp_core::bifurcation::{inner_solution_bounds, miranda_exists_system};
use pcr4bp_core::potential::{self, f_point, ParamRect};
use pcr4bp_core::solve::{count_solutions, global_region, MapSystem};
use pcr4bp_core::taylor::Scalar;
use pcr4bp_core::{Interval, Jet2, PBox};

pub type Outcome = Result<String, String>;

fn random_interval(rng: &mut ChaCha8Rng, span: f64) -> Interval {
    let a = rng.gen_range(-span..span);
    let w = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..span) * rng.gen::<f64>().powi(3) };
    Interval::new(a, a + w)
}

fn sample(rng: &mut ChaCha8Rng, x: &Interval) -> f64 {
    match rng.gen_range(0..4) {
        0 => x.lo(),
        1 => x.hi(),
        _ => (x.lo() + rng.gen::<f64>() * x.width()).clamp(x.lo(), x.hi()),
    }
}

/// Random operations on random intervals: every point result lies in the
/// interval result, and point inputs give results inside it too.
pub fn interval_inclusion(cases: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1234);
    let mut violations = Vec::new();
    for case in 0..cases {
        let a = random_interval(&mut rng, 4.0);
        let b = random_interval(&mut rng, 4.0);
        let op = rng.gen_range(0..10);
        let eval = |x: &Interval, y: &Interval| -> Option<Interval> {
            Some(match op {
                0 => *x + *y,
                1 => *x - *y,
                2 => *x * *y,
                3 => x.checked_div(y).ok()?,
                4 => x.abs().sqrt().ok()?,
                5 => x.sin(),
                6 => x.cos(),
                7 => x.sqr(),
                8 => x.powi(3),
                _ => x.scale(0.25).min(&Interval::ONE).max(&-Interval::ONE).asin().ok()?,
            })
        };
        let point = |x: f64, y: f64| -> f64 {
            match op {
                0 => x + y,
                1 => x - y,
                2 => x * y,
                3 => x / y,
                4 => x.abs().sqrt(),
                5 => x.sin(),
                6 => x.cos(),
                7 => x * x,
                8 => x * x * x,
                _ => (0.25 * x).clamp(-1.0, 1.0).asin(),
            }
        };
        let Some(out) = eval(&a, &b) else { continue };
        let (x, y) = (sample(&mut rng, &a), sample(&mut rng, &b));
        let v = point(x, y);
        if v.is_finite() && !out.contains(v) {
            violations.push(format!("case {case} op {op}: {a:?} {b:?} -> {out:?} misses f({x}, {y}) = {v}"));
        }
        // inclusion monotonicity on the degenerate sub-intervals
        if let Some(inner) = eval(&Interval::point(x), &Interval::point(y)) {
            if !inner.subset_of(&out) {
                violations.push(format!("case {case} op {op}: {inner:?} not inside {out:?}"));
            }
        }
    }
    match violations.first() {
        None => Ok(format!("{cases} cases, 0 violations")),
        Some(v) => Err(format!("{} violations, first: {v}", violations.len())),
    }
}

/// Random ordered parameters and phase points at least `0.05` from every
/// primary.
fn phase_points(n: usize, seed: u64) -> Vec<(f64, f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let (r, phi) = (rng.gen_range(0.4..1.9), rng.gen_range(-3.1..3.1));
        let (s, t) = (rng.gen_range(0.01..0.5), rng.gen_range(0.01..0.6));
        if (1.0 - s) * t > 1.0 - t {
            continue;
        }
        let b = PBox::from_bounds((r, r), (phi, phi));
        if potential::primary_distances(&b).iter().any(|d| d.lo() < 0.05) {
            continue;
        }
        out.push((r, phi, s, t));
    }
    out
}

/// Jet partials enclose the derivative over a box, so they contain the
/// central difference quotient across the box (mean value theorem).
pub fn jets_vs_finite_differences(points: usize) -> Outcome {
    let h = 1e-4;
    for (r, phi, s, t) in phase_points(points, 7) {
        let pr = ParamRect::point(s, t);
        let b = PBox::from_bounds((r - h, r + h), (phi - h, phi + h));
        let (f1, f2) = potential::f_jet(&b, &pr, 1).map_err(|e| e.to_string())?;
        let dr = |k: usize| (f_point(r + h, phi, s, t)[k] - f_point(r - h, phi, s, t)[k]) / (2.0 * h);
        let dp = |k: usize| (f_point(r, phi + h, s, t)[k] - f_point(r, phi - h, s, t)[k]) / (2.0 * h);
        for (k, jet) in [(0usize, &f1), (1, &f2)] {
            let slack = 1e-8 * (1.0 + jet.value().mag());
            let at = format!("({r}, {phi}; {s}, {t})");
            if !jet.value().inflate(slack).contains(f_point(r, phi, s, t)[k]) {
                return Err(format!("F{} value at {at}", k + 1));
            }
            if !jet.partials(1, 0).inflate(slack).contains(dr(k)) {
                return Err(format!("dF{}/dr at {at}", k + 1));
            }
            if !jet.partials(0, 1).inflate(slack).contains(dp(k)) {
                return Err(format!("dF{}/dphi at {at}", k + 1));
            }
        }
    }
    Ok(format!("{points} points, F1 and F2 partials contain the difference quotients"))
}

pub fn newton(f: &dyn Fn(f64, f64) -> [f64; 2], mut x: f64, mut y: f64) -> Option<(f64, f64)> {
    for _ in 0..50 {
        let v = f(x, y);
        let e = 1e-7;
        let fx = f(x + e, y);
        let fy = f(x, y + e);
        let j = [[(fx[0] - v[0]) / e, (fy[0] - v[0]) / e], [(fx[1] - v[1]) / e, (fy[1] - v[1]) / e]];
        let d = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if d.abs() < 1e-14 {
            return None;
        }
        x -= (v[0] * j[1][1] - v[1] * j[0][1]) / d;
        y -= (j[0][0] * v[1] - j[1][0] * v[0]) / d;
        if !x.is_finite() || !y.is_finite() || x.abs() > 10.0 || y.abs() > 10.0 {
            return None;
        }
    }
    let v = f(x, y);
    (v[0].abs() + v[1].abs() < 1e-10).then_some((x, y))
}

/// Every zero found by multi-start Newton at (1/4, 1/4) lies in exactly one
/// certified box and in no excluded box; every tight box holds one.
pub fn krawczyk_vs_sampling() -> Outcome {
    let (s, t) = (0.25, 0.25);
    let lists = count_solutions(&global_region(), &ParamRect::point(s, t), 1e-6);
    let c = global_region();
    let f = |r: f64, p: f64| f_point(r, p, s, t);
    let mut zeros: Vec<(f64, f64)> = Vec::new();
    for i in 0..60 {
        for k in 0..120 {
            let r = c[0].lo() + c[0].width() * (i as f64 + 0.5) / 60.0;
            let p = c[1].lo() + c[1].width() * (k as f64 + 0.5) / 120.0;
            if let Some((zr, zp)) = newton(&f, r, p) {
                if c[0].contains(zr)
                    && c[1].contains(zp)
                    && !zeros.iter().any(|q| (q.0 - zr).abs() + (q.1 - zp).abs() < 1e-7)
                {
                    zeros.push((zr, zp));
                }
            }
        }
    }
    if zeros.len() != 8 {
        return Err(format!("oracle found {} zeros: {zeros:?}", zeros.len()));
    }
    let inside = |b: &PBox, z: &(f64, f64)| b[0].inflate(1e-9).contains(z.0) && b[1].inflate(1e-9).contains(z.1);
    let interior =
        |b: &PBox, z: &(f64, f64)| Interval::point(z.0).interior_of(&b[0]) && Interval::point(z.1).interior_of(&b[1]);
    for z in &zeros {
        if lists.yes.iter().filter(|b| inside(b, z)).count() != 1
            || lists.tight.iter().filter(|b| inside(b, z)).count() != 1
        {
            return Err(format!("zero {z:?} not in exactly one certified box"));
        }
        if lists.no.iter().any(|b| interior(b, z)) {
            return Err(format!("excluded box holds {z:?}"));
        }
    }
    if let Some(b) = lists.tight.iter().find(|b| zeros.iter().filter(|z| inside(b, z)).count() != 1) {
        return Err(format!("tight box {b:?} does not hold exactly one sampled zero"));
    }
    Ok(format!("8 sampled zeros, each in exactly one of {} certified boxes", lists.yes.len()))
}

fn cst(j: &Jet2, v: f64) -> Jet2 {
    j.cst(Interval::point(v))
}

/// `(x² + a·b·x − p, y − b·x)` has 0 or 2 zeros by the sign of the
/// discriminant; the classifier brackets the count and is exact away from
/// the fold. Followed by a sweep through the fold of `x² − p`.
pub fn fold_classifier(cases: u32) -> Outcome {
    let region = PBox::from_bounds((-1.0, 1.0), (-1.0, 1.0));
    let mut runner = TestRunner::new(Config { cases, ..Config::default() });
    runner
        .run(&(-0.05f64..0.05, -0.2f64..0.2, -0.2f64..0.2), |(p, a, b)| {
            let disc = (a * b) * (a * b) + 4.0 * p;
            if disc.abs() <= 1e-9 {
                return Err(TestCaseError::reject("at the fold"));
            }
            let sys =
                MapSystem(move |x: &Jet2, y: &Jet2| [*x * *x + *x * cst(x, a * b) - cst(x, p), *y - *x * cst(x, b)]);
            let brute = if disc > 0.0 { 2 } else { 0 };
            match inner_solution_bounds(&sys, &region, &|_: &PBox| false) {
                Some((lo, hi)) if lo > brute || brute > hi => {
                    Err(TestCaseError::fail(format!("disc {disc}: [{lo}, {hi}]")))
                }
                Some((lo, hi)) if disc.abs() >= 4e-3 && (lo, hi) != (brute, brute) => {
                    Err(TestCaseError::fail(format!("disc {disc}: [{lo}, {hi}] not exact")))
                }
                None if disc.abs() >= 4e-3 => Err(TestCaseError::fail(format!("unresolved at disc {disc}"))),
                _ => Ok(()),
            }
        })
        .map_err(|e| e.to_string())?;

    let mut counts = Vec::new();
    for i in -10..=10 {
        let p = 0.005 * i as f64;
        let sys = MapSystem(move |x: &Jet2, y: &Jet2| [*x * *x - cst(x, p), *y]);
        counts.push(inner_solution_bounds(&sys, &region, &|_: &PBox| false).ok_or(format!("unresolved at p = {p}"))?);
    }
    let ok = counts[..10].iter().all(|&c| c == (0, 0))
        && counts[10].0 <= 1
        && counts[10].1 >= 1
        && counts[11..].iter().all(|&c| c == (2, 2));
    if !ok {
        return Err(format!("fold sweep counts {counts:?}"));
    }
    Ok(format!("{cases} random folds bracketed; sweep 0 -> [{}, {}] -> 2", counts[10].0, counts[10].1))
}

/// Perturbed identity maps: whenever the Miranda test claims a zero in the
/// unit box, Newton finds one there.
pub fn miranda_soundness(cases: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let sq = PBox::from_bounds((-1.0, 1.0), (-1.0, 1.0));
    let (mut claimed, mut violations) = (0usize, Vec::new());
    for case in 0..cases {
        let c: [f64; 2] = [rng.gen_range(-1.6..1.6), rng.gen_range(-1.6..1.6)];
        let e: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-0.3..0.3));
        let swap = rng.gen_bool(0.5);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let sys = MapSystem(move |x: &Jet2, y: &Jet2| {
            let u = (*x + *x * *y * cst(x, e[0]) + *y * *y * cst(x, e[1]) - cst(x, c[0])) * cst(x, sign);
            let v = *y + *x * *x * cst(x, e[2]) + *x * *y * cst(x, e[3]) - cst(x, c[1]);
            if swap {
                [v, u]
            } else {
                [u, v]
            }
        });
        let point = |x: f64, y: f64| -> [f64; 2] {
            let u = sign * (x + e[0] * x * y + e[1] * y * y - c[0]);
            let v = y + e[2] * x * x + e[3] * x * y - c[1];
            if swap {
                [v, u]
            } else {
                [u, v]
            }
        };
        if !miranda_exists_system(&sys, &sq) {
            continue;
        }
        claimed += 1;
        let starts = (0..5).flat_map(|i| (0..5).map(move |k| (-0.8 + 0.4 * i as f64, -0.8 + 0.4 * k as f64)));
        let found = starts
            .filter_map(|(x0, y0)| newton(&point, x0, y0))
            .any(|(x, y)| x.abs() <= 1.0 + 1e-9 && y.abs() <= 1.0 + 1e-9);
        if !found {
            violations.push(case);
        }
    }
    if claimed < cases / 10 {
        return Err(format!("Miranda test too weak: {claimed} claims in {cases} cases"));
    }
    if !violations.is_empty() {
        return Err(format!("no zero found for cases {violations:?}"));
    }
    Ok(format!("{cases} maps, {claimed} existence claims, 0 violations"))
}
