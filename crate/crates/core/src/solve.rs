//! Zero certification: the exclusion principle, the Krawczyk operator and
//! the adaptive bisection counter used for point parameters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::interval::{Interval, PBox};
use crate::potential::{self, PResult, ParamRect};
use crate::taylor::Jet2;

/// A smooth map `R² → R²` that can be enclosed over boxes.
pub trait System2: Sync {
    /// Enclosure of the map over the box.
    fn eval(&self, b: &PBox) -> PResult<[Interval; 2]>;
    /// Enclosure of the Jacobian over the box.
    fn jacobian(&self, b: &PBox) -> PResult<[[Interval; 2]; 2]>;
    /// Jets of both components over the box.
    fn jets(&self, b: &PBox, order: usize) -> PResult<(Jet2, Jet2)>;
}

/// `F(·; s, t)` uniformly over a parameter rectangle.
#[derive(Debug, Clone, Copy)]
pub struct PotentialSystem {
    pub pr: ParamRect,
}

impl System2 for PotentialSystem {
    fn eval(&self, b: &PBox) -> PResult<[Interval; 2]> {
        if b.r().is_point() && b.phi().is_point() {
            potential::f_natural(b, &self.pr)
        } else {
            potential::evaluate(b, &self.pr).map(|e| e.f)
        }
    }

    fn jacobian(&self, b: &PBox) -> PResult<[[Interval; 2]; 2]> {
        potential::jacobian(b, &self.pr)
    }

    fn jets(&self, b: &PBox, order: usize) -> PResult<(Jet2, Jet2)> {
        potential::f_jet_mv(b, &self.pr, order)
    }
}

/// A test map given by one jet formula; evaluation and Jacobian come from
/// low-order jets.
pub struct MapSystem<F>(pub F)
where
    F: Fn(&Jet2, &Jet2) -> [Jet2; 2] + Sync;

impl<F> System2 for MapSystem<F>
where
    F: Fn(&Jet2, &Jet2) -> [Jet2; 2] + Sync,
{
    fn eval(&self, b: &PBox) -> PResult<[Interval; 2]> {
        let (a, c) = self.jets(b, 0)?;
        Ok([a.value(), c.value()])
    }

    fn jacobian(&self, b: &PBox) -> PResult<[[Interval; 2]; 2]> {
        let (a, c) = self.jets(b, 1)?;
        Ok([[a.partials(1, 0), a.partials(0, 1)], [c.partials(1, 0), c.partials(0, 1)]])
    }

    fn jets(&self, b: &PBox, order: usize) -> PResult<(Jet2, Jet2)> {
        let x = Jet2::lift(b, 0, order);
        let y = Jet2::lift(b, 1, order);
        let [a, c] = (self.0)(&x, &y);
        Ok((a, c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Excluded,
    UniqueZero,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrawczykOutcome {
    pub verdict: Verdict,
    /// Present iff `UniqueZero`: the Krawczyk image intersected with the box.
    pub tight: Option<PBox>,
}

impl KrawczykOutcome {
    fn of(verdict: Verdict) -> Self {
        KrawczykOutcome { verdict, tight: None }
    }
}

/// Floating-point inverse of a 2×2 matrix, `None` if nearly singular.
pub fn approx_inverse(m: [[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if !det.is_finite() || det.abs() <= 1e-14 * scale * scale {
        return None;
    }
    Some([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

/// The Krawczyk test `K = x̌ − C·F(x̌) + (I − C·DF(x))(x − x̌)` with `x̌` the
/// midpoint and `C` the inverse of the midpoint of the interval Jacobian.
pub fn krawczyk_system<S: System2 + ?Sized>(sys: &S, b: &PBox) -> KrawczykOutcome {
    let Ok(fb) = sys.eval(b) else { return KrawczykOutcome::of(Verdict::Inconclusive) };
    if !fb[0].contains_zero() || !fb[1].contains_zero() {
        return KrawczykOutcome::of(Verdict::Excluded);
    }
    let Ok(j) = sys.jacobian(b) else { return KrawczykOutcome::of(Verdict::Inconclusive) };
    let center = b.mid_box();
    let Ok(fc) = sys.eval(&center) else { return KrawczykOutcome::of(Verdict::Inconclusive) };
    let Some(c) = approx_inverse([[j[0][0].mid(), j[0][1].mid()], [j[1][0].mid(), j[1][1].mid()]]) else {
        return KrawczykOutcome::of(Verdict::Inconclusive);
    };
    let dx = [b[0] - center[0], b[1] - center[1]];
    let mut k = *b;
    for i in 0..2 {
        let ci = [Interval::point(c[i][0]), Interval::point(c[i][1])];
        let cf = ci[0] * fc[0] + ci[1] * fc[1];
        let mut acc = center[i] - cf;
        for l in 0..2 {
            let delta = if i == l { Interval::ONE } else { Interval::ZERO };
            let m = delta - (ci[0] * j[0][l] + ci[1] * j[1][l]);
            acc += m * dx[l];
        }
        k[i] = acc;
    }
    match k.intersect(b) {
        None => KrawczykOutcome::of(Verdict::Excluded),
        Some(tight) if b.contains_in_interior(&k) => {
            KrawczykOutcome { verdict: Verdict::UniqueZero, tight: Some(tight) }
        }
        Some(_) => KrawczykOutcome::of(Verdict::Inconclusive),
    }
}

/// Krawczyk test for `F(·; s, t)` uniformly over `pr`.
pub fn krawczyk(b: &PBox, pr: &ParamRect) -> KrawczykOutcome {
    krawczyk_system(&PotentialSystem { pr: *pr }, b)
}

// ---------------------------------------------------------------------------
// Adaptive bisection
// ---------------------------------------------------------------------------

/// Classified boxes from a point-parameter search.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CountLists {
    pub small: Vec<PBox>,
    pub no: Vec<PBox>,
    pub yes: Vec<PBox>,
    pub tight: Vec<PBox>,
    pub ndt: Vec<PBox>,
}

impl CountLists {
    fn merge(mut self, o: CountLists) -> CountLists {
        self.small.extend(o.small);
        self.no.extend(o.no);
        self.yes.extend(o.yes);
        self.tight.extend(o.tight);
        self.ndt.extend(o.ndt);
        self
    }

    /// Sorts every list by box coordinates.
    pub fn canonicalize(&mut self) {
        for l in [&mut self.small, &mut self.no, &mut self.yes, &mut self.ndt] {
            l.sort_by(box_order);
        }
        // keep tight aligned with yes
        let mut pairs: Vec<(PBox, PBox)> = self.yes.iter().cloned().zip(self.tight.iter().cloned()).collect();
        pairs.sort_by(|a, b| box_order(&a.0, &b.0));
        self.yes = pairs.iter().map(|p| p.0).collect();
        self.tight = pairs.iter().map(|p| p.1).collect();
    }

    pub fn total(&self) -> usize {
        self.small.len() + self.no.len() + self.yes.len() + self.ndt.len()
    }

    /// Conclusive iff nothing was left unresolved and the certified
    /// enclosures are pairwise disjoint.
    pub fn conclusive(&self) -> bool {
        self.small.is_empty() && pairwise_disjoint(&self.tight)
    }
}

pub fn box_order(a: &PBox, b: &PBox) -> std::cmp::Ordering {
    let ka = [a[0].lo(), a[1].lo(), a[0].hi(), a[1].hi()];
    let kb = [b[0].lo(), b[1].lo(), b[0].hi(), b[1].hi()];
    ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
}

pub fn pairwise_disjoint(boxes: &[PBox]) -> bool {
    for (i, a) in boxes.iter().enumerate() {
        for b in &boxes[i + 1..] {
            if a.overlaps(b) {
                return false;
            }
        }
    }
    true
}

/// Fraction of the width at which search boxes are split. Slightly off
/// center so zeros on symmetry lines (φ = 0, φ = ±π) never sit on a cut.
pub const SPLIT_FRACTION: f64 = 0.5 - 1.0 / 128.0;

/// Splits along `axis` at [`SPLIT_FRACTION`] of the width.
pub fn split_box(b: &PBox, axis: usize) -> (PBox, PBox) {
    let c = b[axis];
    let cut = (c.lo() + (c.hi() - c.lo()) * SPLIT_FRACTION).clamp(c.lo(), c.hi());
    let mut l = *b;
    let mut r = *b;
    l[axis] = Interval::new(c.lo(), cut);
    r[axis] = Interval::new(cut, c.hi());
    (l, r)
}

/// Axis with the larger geometric extent: r-width against arc length
/// `mid(r)·φ-width`.
pub fn split_axis(b: &PBox) -> usize {
    let wr = b.r().width();
    let wp = b.phi().width() * b.r().mid().abs();
    if wr >= wp {
        0
    } else {
        1
    }
}

/// The global search region `C = [1/3, 2] × [−π, π]`, with outward-rounded
/// endpoints.
pub fn global_region() -> PBox {
    let third = Interval::ratio(1.0, 3.0);
    PBox::new([Interval::new(third.lo(), 2.0), Interval::new(-Interval::PI.hi(), Interval::PI.hi())])
}

fn classify_point_box(b: &PBox, pr: &ParamRect, tol: f64, out: &mut CountLists) {
    let masses = pr.masses();
    let mut stack = vec![*b];
    while let Some(b) = stack.pop() {
        if potential::excluded_by_lemmas(&b, &masses) {
            out.ndt.push(b);
            continue;
        }
        let small = b.width() < tol;
        if let Ok(e) = potential::evaluate(&b, pr) {
            if !e.f[0].contains_zero() || !e.f[1].contains_zero() {
                out.no.push(b);
                continue;
            }
            let k = krawczyk(&b, pr);
            match k.verdict {
                Verdict::UniqueZero => {
                    out.yes.push(b);
                    out.tight.push(k.tight.expect("unique zero carries enclosure"));
                    continue;
                }
                Verdict::Excluded => {
                    out.no.push(b);
                    continue;
                }
                Verdict::Inconclusive => {}
            }
        }
        if small {
            out.small.push(b);
            continue;
        }
        let (l, r) = split_box(&b, split_axis(&b));
        stack.push(r);
        stack.push(l);
    }
}

/// Counts the zeros of `F(·; pr)` in `region` by depth-first bisection.
pub fn count_solutions(region: &PBox, pr: &ParamRect, tol: f64) -> CountLists {
    // fan out over a coarse grid so independent subtrees can run in parallel
    let mut seeds = vec![*region];
    for _ in 0..6 {
        seeds = seeds
            .iter()
            .flat_map(|b| {
                let (l, r) = split_box(b, split_axis(b));
                [l, r]
            })
            .collect();
    }
    let mut lists = seeds
        .par_iter()
        .map(|b| {
            let mut out = CountLists::default();
            classify_point_box(b, pr, tol, &mut out);
            out
        })
        .reduce(CountLists::default, CountLists::merge);
    lists.canonicalize();
    lists
}
