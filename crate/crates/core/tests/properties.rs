mod suites;

use proptest::prelude::*;

use pcr4bp_core::potential::{self, f_point, ParamRect};
use pcr4bp_core::{Interval, PBox};

fn check(outcome: suites::Outcome) {
    match outcome {
        Ok(summary) => eprintln!("{summary}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn interval_inclusion_fuzz() {
    check(suites::interval_inclusion(100_000));
}

#[test]
fn jet_partials_contain_finite_differences() {
    check(suites::jets_vs_finite_differences(100));
}

#[test]
fn krawczyk_agrees_with_sampling_oracle() {
    check(suites::krawczyk_vs_sampling());
}

#[test]
fn fold_classifier_oracle() {
    check(suites::fold_classifier(64));
}

#[test]
fn miranda_soundness_fuzz() {
    check(suites::miranda_soundness(1000));
}

/// Second-order jet coefficients against nested differences at points.
#[test]
fn second_order_jets_match_nested_differences() {
    let h = 1e-4;
    for (r, phi, s, t) in [(0.7, 0.3, 0.25, 0.25), (1.4, -2.0, 0.1, 0.5), (0.9, 2.5, 0.45, 0.6)] {
        let pr = ParamRect::point(s, t);
        let b = PBox::from_bounds((r, r), (phi, phi));
        let (f1, _) = potential::f_jet(&b, &pr, 2).unwrap();
        let f = |x: f64, y: f64| f_point(x, y, s, t)[0];
        let rr = (f(r + h, phi) - 2.0 * f(r, phi) + f(r - h, phi)) / (h * h);
        let exact = f1.partials(2, 0).mid();
        assert!((rr - exact).abs() <= 1e-4 * (1.0 + exact.abs()), "d2F1/dr2 {rr} vs {exact}");
    }
}

proptest! {
    #[test]
    fn multiplication_contains_products(a in -5.0f64..5.0, w in 0.0f64..2.0, b in -5.0f64..5.0, v in 0.0f64..2.0, u in 0.0f64..1.0, z in 0.0f64..1.0) {
        let x = Interval::new(a, a + w);
        let y = Interval::new(b, b + v);
        let p = (a + u * w) * (b + z * v);
        prop_assert!((x * y).contains(p));
    }

    #[test]
    fn hull_and_intersection_are_consistent(a in -5.0f64..5.0, w in 0.0f64..2.0, b in -5.0f64..5.0, v in 0.0f64..2.0) {
        let x = Interval::new(a, a + w);
        let y = Interval::new(b, b + v);
        let h = x.hull(&y);
        prop_assert!(x.subset_of(&h) && y.subset_of(&h));
        if let Some(i) = x.intersect(&y) {
            prop_assert!(i.subset_of(&x) && i.subset_of(&y));
        } else {
            prop_assert!(!x.overlaps(&y));
        }
    }

    #[test]
    fn bisection_halves_cover_the_box(r0 in 0.34f64..1.9, w in 1e-9f64..0.1, p0 in -3.0f64..3.0, v in 1e-9f64..0.1, axis in 0usize..2) {
        let b = PBox::from_bounds((r0, r0 + w), (p0, p0 + v));
        let (l, u) = pcr4bp_core::solve::split_box(&b, axis);
        prop_assert!(b.contains_box(&l) && b.contains_box(&u));
        prop_assert_eq!(l[axis].hi(), u[axis].lo());
        prop_assert_eq!(l[axis].lo(), b[axis].lo());
        prop_assert_eq!(u[axis].hi(), b[axis].hi());
    }
}
