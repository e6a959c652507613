//! Certificates that bound the number of zeros in a box uniformly over a
//! parameter rectangle: the determinant test, the reduced bifurcation
//! function `g(r) = F1(r, φ(r))` along the level set `F2 = 0`, and a
//! topological existence test.

use serde::{Deserialize, Serialize};

use crate::interval::{Interval, PBox};
use crate::potential::{self, PResult, ParamRect};
use crate::solve::{krawczyk_system, PotentialSystem, System2, Verdict};
use crate::taylor::{implicit_curve_jet, Jet2};

/// Relative width to which edge zero sets are resolved.
pub const EDGE_REL_WIDTH: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mechanism {
    Determinant,
    Quadratic,
    CubicMiranda,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentCertificate {
    #[serde(rename = "box")]
    pub bx: PBox,
    pub max_solutions: u8,
    pub has_solution: bool,
    pub mechanism: Mechanism,
}

// ---------------------------------------------------------------------------
// Determinant test
// ---------------------------------------------------------------------------

/// `0 ∉ det DF(box)`: `F` is injective on the box, so at most one zero and
/// no bifurcation there.
pub fn no_bifurcation_system<S: System2 + ?Sized>(sys: &S, b: &PBox) -> bool {
    match sys.jacobian(b) {
        Ok(j) => !potential::det(&j).contains_zero(),
        Err(_) => false,
    }
}

pub fn no_bifurcation(b: &PBox, pr: &ParamRect) -> bool {
    no_bifurcation_system(&PotentialSystem { pr: *pr }, b)
}

// ---------------------------------------------------------------------------
// Edge machinery
// ---------------------------------------------------------------------------

/// A box edge: one coordinate fixed, the other ranging over `range`.
#[derive(Debug, Clone, Copy)]
struct Segment {
    fixed_axis: usize,
    fixed: f64,
    range: Interval,
}

impl Segment {
    fn piece(&self, p: Interval) -> PBox {
        let f = Interval::point(self.fixed);
        if self.fixed_axis == 0 {
            PBox::new([f, p])
        } else {
            PBox::new([p, f])
        }
    }

    fn varying_axis(&self) -> usize {
        1 - self.fixed_axis
    }
}

fn edges(b: &PBox) -> [Segment; 4] {
    // left, right, bottom, top
    [
        Segment { fixed_axis: 0, fixed: b[0].lo(), range: b[1] },
        Segment { fixed_axis: 0, fixed: b[0].hi(), range: b[1] },
        Segment { fixed_axis: 1, fixed: b[1].lo(), range: b[0] },
        Segment { fixed_axis: 1, fixed: b[1].hi(), range: b[0] },
    ]
}

/// Pieces of the segment on which component `comp` may vanish, resolved to
/// `rel` of the segment length. `None` if evaluation failed.
fn zero_pieces<S: System2 + ?Sized>(sys: &S, seg: &Segment, comp: usize, rel: f64) -> Option<Vec<Interval>> {
    let min_w = seg.range.width() * rel;
    let mut out = Vec::new();
    let mut stack = vec![seg.range];
    while let Some(p) = stack.pop() {
        let v = sys.eval(&seg.piece(p)).ok()?[comp];
        if !v.contains_zero() {
            continue;
        }
        if p.width() <= min_w {
            out.push(p);
            continue;
        }
        let (a, c) = p.bisect();
        stack.push(c);
        stack.push(a);
    }
    out.sort_by(|a, b| a.lo().partial_cmp(&b.lo()).unwrap());
    Some(out)
}

fn point_sign<S: System2 + ?Sized>(sys: &S, x: f64, y: f64, comp: usize) -> Option<i8> {
    let b = PBox::new([Interval::point(x), Interval::point(y)]);
    sys.eval(&b).ok()?[comp].sign()
}

/// Constant sign of component `comp` along the segment, if certified.
fn segment_sign<S: System2 + ?Sized>(sys: &S, seg: &Segment, comp: usize, rel: f64) -> Option<i8> {
    let z = zero_pieces(sys, seg, comp, rel)?;
    if !z.is_empty() {
        return None;
    }
    let m = seg.piece(seg.range.mid_point());
    sys.eval(&m).ok()?[comp].sign()
}

/// Number of zeros of `σ·F2` along a segment, using strict monotonicity on
/// every piece that is not excluded.
fn count_segment_zeros<S: System2 + ?Sized>(sys: &S, seg: &Segment, sigma: f64, rel: f64) -> Option<usize> {
    let axis = seg.varying_axis();
    let min_w = seg.range.width() * rel;
    let sign_at = |v: f64| -> Option<i8> {
        let p = seg.piece(Interval::point(v));
        let f = sys.eval(&p).ok()?[1] * sigma;
        f.sign()
    };
    let mut count = 0usize;
    let mut stack = vec![seg.range];
    while let Some(p) = stack.pop() {
        let b = seg.piece(p);
        let f = sys.eval(&b).ok()?[1];
        if !f.contains_zero() {
            continue;
        }
        let monotone = !sys.jacobian(&b).ok()?[1][axis].contains_zero();
        if monotone {
            if let (Some(a), Some(c)) = (sign_at(p.lo()), sign_at(p.hi())) {
                if a != c {
                    count += 1;
                }
                continue;
            }
        }
        if p.width() <= min_w {
            return None;
        }
        let (a, c) = p.bisect();
        stack.push(c);
        stack.push(a);
    }
    Some(count)
}

// ---------------------------------------------------------------------------
// Single connected component of F2 = 0
// ---------------------------------------------------------------------------

/// Sign of `∂F2/∂φ` on `{F2 = 0} ∩ box`, from a cover by pieces down to
/// [`GK_MIN_FRACTION`] of the box; pieces with `0 ∉ F2` are skipped.
fn level_set_slope_sign<S: System2 + ?Sized>(sys: &S, b: &PBox) -> Option<i8> {
    if let Ok(j) = sys.jacobian(b) {
        if let Some(sg) = j[1][1].sign() {
            return Some(sg);
        }
    }
    let min_w = [b[0].width() * GK_MIN_FRACTION, b[1].width() * GK_MIN_FRACTION];
    let mut sign = None;
    let mut stack = vec![*b];
    while let Some(p) = stack.pop() {
        let f2 = sys.eval(&p).ok()?[1];
        if !f2.contains_zero() {
            continue;
        }
        if let Some(sg) = sys.jacobian(&p).ok()?[1][1].sign() {
            if *sign.get_or_insert(sg) != sg {
                return None;
            }
            continue;
        }
        let axis = if p[0].width() / min_w[0] >= p[1].width() / min_w[1] { 0 } else { 1 };
        if p[axis].width() <= min_w[axis] {
            return None;
        }
        let (l, r) = p.bisect(axis);
        stack.push(r);
        stack.push(l);
    }
    // an empty zero set is not a curve
    sign
}

/// Certifies that `{F2 = 0} ∩ box` is exactly one connected curve: `∂F2/∂φ`
/// has constant sign on it (so every line `r = const` meets it at most
/// once), the corners are nonzero and the boundary is crossed exactly twice.
pub fn certify_single_component_system<S: System2 + ?Sized>(sys: &S, b: &PBox) -> bool {
    let Some(sg) = level_set_slope_sign(sys, b) else { return false };
    let sigma = sg as f64;
    let corners = [(b[0].lo(), b[1].lo()), (b[0].lo(), b[1].hi()), (b[0].hi(), b[1].lo()), (b[0].hi(), b[1].hi())];
    if corners.iter().any(|&(x, y)| point_sign(sys, x, y, 1).is_none()) {
        return false;
    }
    let mut crossings = 0usize;
    for seg in edges(b) {
        match count_segment_zeros(sys, &seg, sigma, EDGE_REL_WIDTH) {
            Some(c) => crossings += c,
            None => return false,
        }
    }
    crossings == 2
}

pub fn certify_single_component(b: &PBox, pr: &ParamRect) -> bool {
    certify_single_component_system(&PotentialSystem { pr: *pr }, b)
}

/// `g^(k) ≠ 0` along the reduced curve: at most `k` zeros in the box.
/// Requires the single-component certificate.
pub fn max_k_solutions_system<S: System2 + ?Sized>(sys: &S, b: &PBox, k: usize) -> bool {
    if !certify_single_component_system(sys, b) {
        return false;
    }
    gk_nonzero(sys, b, k)
}

/// Pieces are bisected down to this fraction of the box when bounding
/// `g^(k)` along the level curve.
pub const GK_MIN_FRACTION: f64 = 1.0 / 64.0;

/// `g^(k) ≠ 0` wherever the curve `F2 = 0` may pass. The box is covered by
/// pieces; pieces with `0 ∉ F2` are skipped, the rest get their own jet
/// enclosure and are bisected while it contains 0.
fn gk_nonzero<S: System2 + ?Sized>(sys: &S, b: &PBox, k: usize) -> bool {
    let min_w = [b[0].width() * GK_MIN_FRACTION, b[1].width() * GK_MIN_FRACTION];
    let mut stack = vec![*b];
    while let Some(p) = stack.pop() {
        let Ok((f1, f2)) = sys.jets(&p, k) else { return false };
        if !f2.value().contains_zero() {
            continue;
        }
        if let Ok(g) = implicit_curve_jet(&f1, &f2, k) {
            if !g.derivative(k).contains_zero() {
                continue;
            }
        }
        let axis = if p[0].width() / min_w[0] >= p[1].width() / min_w[1] { 0 } else { 1 };
        if p[axis].width() <= min_w[axis] {
            return false;
        }
        let (l, r) = p.bisect(axis);
        stack.push(r);
        stack.push(l);
    }
    true
}

pub fn max_k_solutions(b: &PBox, pr: &ParamRect, k: usize) -> bool {
    max_k_solutions_system(&PotentialSystem { pr: *pr }, b, k)
}

// ---------------------------------------------------------------------------
// Existence
// ---------------------------------------------------------------------------

/// Existence of a zero from boundary conditions. Accepts the four-condition
/// theorem (under global sign reversal, component interchange and box
/// reflections) or the classical Poincaré–Miranda conditions.
pub fn miranda_exists_system<S: System2 + ?Sized>(sys: &S, b: &PBox) -> bool {
    classical_miranda(sys, b) || four_condition_miranda(sys, b)
}

pub fn miranda_exists(b: &PBox, pr: &ParamRect) -> bool {
    miranda_exists_system(&PotentialSystem { pr: *pr }, b)
}

/// `f_a` has opposite constant signs on the two x-edges and `f_b` on the
/// two y-edges, for `(a, b)` either component order.
fn classical_miranda<S: System2 + ?Sized>(sys: &S, b: &PBox) -> bool {
    let [left, right, bottom, top] = edges(b);
    let s = |seg: &Segment, c: usize| segment_sign(sys, seg, c, EDGE_REL_WIDTH);
    let opposite = |a: Option<i8>, c: Option<i8>| matches!((a, c), (Some(x), Some(y)) if x == -y);
    for (ca, cb) in [(0usize, 1usize), (1, 0)] {
        if opposite(s(&left, ca), s(&right, ca)) && opposite(s(&bottom, cb), s(&top, cb)) {
            return true;
        }
    }
    false
}

fn four_condition_miranda<S: System2 + ?Sized>(sys: &S, b: &PBox) -> bool {
    let [left, right, bottom, top] = edges(b);
    let rel = EDGE_REL_WIDTH;
    // per-edge data shared by every variant
    let sign = |seg: &Segment| [segment_sign(sys, seg, 0, rel), segment_sign(sys, seg, 1, rel)];
    let zeros = |seg: &Segment| [zero_pieces(sys, seg, 0, rel), zero_pieces(sys, seg, 1, rel)];
    let sg = [sign(&left), sign(&right), sign(&bottom), sign(&top)];
    let zs = [zeros(&left), zeros(&right), zeros(&bottom), zeros(&top)];
    let corner = |x: f64, y: f64| [point_sign(sys, x, y, 0), point_sign(sys, x, y, 1)];
    for flip_x in [false, true] {
        for flip_y in [false, true] {
            // oriented roles: "left" is x⁻ side, "bottom" the y⁻ side
            let (xl, xr) = if flip_x { (1, 0) } else { (0, 1) };
            let (yb, yt) = if flip_y { (3, 2) } else { (2, 3) };
            let cx = if flip_x { b[0].lo() } else { b[0].hi() };
            let cy = if flip_y { b[1].lo() } else { b[1].hi() };
            let cs = corner(cx, cy);
            for swap in [false, true] {
                let (c1, c2) = if swap { (1, 0) } else { (0, 1) };
                for sigma in [1i8, -1] {
                    let neg = -sigma;
                    // 1: f1 negative on the bottom edge, f2 on the left edge
                    let cond1 = sg[yb][c1] == Some(neg) && sg[xl][c2] == Some(neg);
                    let cond2 = cs[c1] == Some(sigma) && cs[c2] == Some(sigma);
                    if !(cond1 && cond2) {
                        continue;
                    }
                    // 3: on the top edge, zeros of f1 come before zeros of f2
                    let (Some(z1), Some(z2)) = (&zs[yt][c1], &zs[yt][c2]) else { continue };
                    if !ordered_before(z1, z2, flip_x) {
                        continue;
                    }
                    // 4: on the right edge, zeros of f2 come before zeros of f1
                    let (Some(w1), Some(w2)) = (&zs[xr][c1], &zs[xr][c2]) else { continue };
                    if ordered_before(w2, w1, flip_y) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// All of `a` strictly before all of `b` in the (possibly reversed) order.
fn ordered_before(a: &[Interval], b: &[Interval], reversed: bool) -> bool {
    if a.is_empty() || b.is_empty() {
        return false;
    }
    let a_lo = a.iter().map(|i| i.lo()).fold(f64::INFINITY, f64::min);
    let a_hi = a.iter().map(|i| i.hi()).fold(f64::NEG_INFINITY, f64::max);
    let b_lo = b.iter().map(|i| i.lo()).fold(f64::INFINITY, f64::min);
    let b_hi = b.iter().map(|i| i.hi()).fold(f64::NEG_INFINITY, f64::max);
    if reversed {
        a_lo > b_hi
    } else {
        a_hi < b_lo
    }
}

// ---------------------------------------------------------------------------
// Inner-region classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnerClass {
    S1,
    /// A single component with up to two zeros and no existence proof.
    S2,
    S111,
    S210,
    S300,
}

impl InnerClass {
    /// Maps per-component bounds onto the list taxonomy.
    pub fn from_components(c: &[ComponentCertificate]) -> Option<InnerClass> {
        let mut k: Vec<u8> = c.iter().map(|x| x.max_solutions).collect();
        k.sort_unstable();
        match k.as_slice() {
            [1] => Some(InnerClass::S1),
            [1, 1, 1] => Some(InnerClass::S111),
            [2] => Some(InnerClass::S2),
            [1, 1] | [1, 2] => Some(InnerClass::S210),
            [3] if c[0].has_solution => Some(InnerClass::S300),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InnerOutcome {
    Classified { class: InnerClass, components: Vec<ComponentCertificate> },
    Unresolved,
}

/// Initial phase-space resolution of [`classify_inner`]: boxes are
/// bisected until their widths drop below `region / 2^level`.
pub const INNER_START_LEVEL: u32 = 6;

/// Rounds of local refinement applied to components that resist
/// certification; each round quarters their boxes.
pub const INNER_REFINE_ROUNDS: u32 = 6;

/// Refinement gives up once this many boxes are pending; the caller then
/// narrows the parameter rectangle instead.
pub const INNER_MAX_BOXES: usize = 3000;

/// Whether a box may still contain a zero.
fn may_contain_zero<S, E>(sys: &S, b: &PBox, excluded: &E) -> bool
where
    S: System2 + ?Sized,
    E: Fn(&PBox) -> bool,
{
    if excluded(b) {
        return false;
    }
    if let Ok(f) = sys.eval(b) {
        if !f[0].contains_zero() || !f[1].contains_zero() {
            return false;
        }
    }
    true
}

/// Bisects `region` down to `level`, keeping boxes that may contain a zero
/// and are not excluded by the Krawczyk operator.
fn survivors<S, E>(sys: &S, region: &PBox, level: u32, excluded: &E) -> Vec<PBox>
where
    S: System2 + ?Sized,
    E: Fn(&PBox) -> bool,
{
    let wr = region[0].width() / f64::from(1u32 << level);
    let wp = region[1].width() / f64::from(1u32 << level);
    let mut out = Vec::new();
    let mut stack = vec![*region];
    while let Some(b) = stack.pop() {
        if !may_contain_zero(sys, &b, excluded) {
            continue;
        }
        let done_r = b[0].width() <= wr * 1.000_001;
        let done_p = b[1].width() <= wp * 1.000_001;
        if done_r && done_p {
            if krawczyk_system(sys, &b).verdict != Verdict::Excluded {
                out.push(b);
            }
            continue;
        }
        let axis = if done_r || (!done_p && b[0].width() / wr < b[1].width() / wp) { 1 } else { 0 };
        let (l, r) = b.bisect(axis);
        stack.push(r);
        stack.push(l);
    }
    out
}

fn quarter(b: &PBox) -> [PBox; 4] {
    let (l, r) = b.bisect(0);
    let (ll, lu) = l.bisect(1);
    let (rl, ru) = r.bisect(1);
    [ll, lu, rl, ru]
}

/// Groups boxes into components under edge-or-corner adjacency.
pub fn cluster(boxes: &[PBox]) -> Vec<Vec<PBox>> {
    let n = boxes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| boxes[a][0].lo().partial_cmp(&boxes[b][0].lo()).unwrap());
    for (oi, &i) in order.iter().enumerate() {
        for &j in &order[oi + 1..] {
            if boxes[j][0].lo() > boxes[i][0].hi() {
                break;
            }
            if boxes[i].touches(&boxes[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<PBox>> = Default::default();
    for (i, b) in boxes.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(*b);
    }
    let mut out: Vec<Vec<PBox>> = groups.into_values().collect();
    out.sort_by(|a, b| crate::solve::box_order(&a[0], &b[0]));
    out
}

fn hull_of(boxes: &[PBox]) -> PBox {
    boxes.iter().skip(1).fold(boxes[0], |h, b| h.hull(b))
}

/// `sys` with its equations and/or its variables exchanged. The zero set is
/// the same up to the coordinate swap, so every count certified for an
/// orientation holds for `sys`; the curve tests take `F2` as a graph over
/// the first variable and profit from trying all four.
struct Oriented<'a, S: ?Sized> {
    sys: &'a S,
    swap_eq: bool,
    swap_var: bool,
}

fn orientations<S: System2 + ?Sized>(sys: &S) -> impl Iterator<Item = Oriented<'_, S>> {
    [(false, false), (true, false), (false, true), (true, true)].into_iter().map(move |(swap_eq, swap_var)| Oriented {
        sys,
        swap_eq,
        swap_var,
    })
}

impl<S: System2 + ?Sized> Oriented<'_, S> {
    /// The box in this orientation's coordinates (the swap is an involution).
    fn view(&self, b: &PBox) -> PBox {
        if self.swap_var {
            PBox::new([b[1], b[0]])
        } else {
            *b
        }
    }
}

impl<S: System2 + ?Sized> System2 for Oriented<'_, S> {
    fn eval(&self, b: &PBox) -> PResult<[Interval; 2]> {
        let [a, c] = self.sys.eval(&self.view(b))?;
        Ok(if self.swap_eq { [c, a] } else { [a, c] })
    }

    fn jacobian(&self, b: &PBox) -> PResult<[[Interval; 2]; 2]> {
        let mut j = self.sys.jacobian(&self.view(b))?;
        if self.swap_var {
            j = [[j[0][1], j[0][0]], [j[1][1], j[1][0]]];
        }
        Ok(if self.swap_eq { [j[1], j[0]] } else { j })
    }

    fn jets(&self, b: &PBox, order: usize) -> PResult<(Jet2, Jet2)> {
        let (mut a, mut c) = self.sys.jets(&self.view(b), order)?;
        if self.swap_var {
            a = a.transpose();
            c = c.transpose();
        }
        Ok(if self.swap_eq { (c, a) } else { (a, c) })
    }
}

/// Bounds the zeros in one component hull by at most two: `0 ∉ det DF`
/// over the hull, or a single level curve with `g' ≠ 0` or `g'' ≠ 0` along
/// it.
pub fn certify_component<S: System2 + ?Sized>(sys: &S, h: &PBox) -> Option<ComponentCertificate> {
    let unique = |mechanism| {
        let has = exists_zero(sys, h);
        ComponentCertificate { bx: *h, max_solutions: 1, has_solution: has, mechanism }
    };
    if no_bifurcation_system(sys, h) {
        return Some(unique(Mechanism::Determinant));
    }
    let curves: Vec<Oriented<S>> =
        orientations(sys).filter(|o| certify_single_component_system(o, &o.view(h))).collect();
    // g' = det DF / ∂F2/∂φ along the curve
    if curves.iter().any(|o| gk_nonzero(o, &o.view(h), 1)) {
        return Some(unique(Mechanism::Determinant));
    }
    if curves.iter().any(|o| gk_nonzero(o, &o.view(h), 2)) {
        return Some(ComponentCertificate {
            bx: *h,
            max_solutions: 2,
            has_solution: false,
            mechanism: Mechanism::Quadratic,
        });
    }
    None
}

/// Sub-boxes narrower than this fraction of the hull are not searched for a
/// Krawczyk-certified zero.
pub const EXISTENCE_MIN_FRACTION: f64 = 1.0 / 4096.0;

/// Boxes visited by [`exists_zero`] before it gives up.
pub const EXISTENCE_BUDGET: usize = 2000;

/// A zero exists in `h`: the boundary conditions hold on `h`, or some
/// sub-box passes the Krawczyk test. Sub-boxes are searched depth first,
/// most promising (smallest `|F|` at the midpoint) first.
pub fn exists_zero<S: System2 + ?Sized>(sys: &S, h: &PBox) -> bool {
    if krawczyk_system(sys, h).verdict == Verdict::UniqueZero || miranda_exists_system(sys, h) {
        return true;
    }
    let min_w = [h[0].width() * EXISTENCE_MIN_FRACTION, h[1].width() * EXISTENCE_MIN_FRACTION];
    let residual = |b: &PBox| -> f64 {
        let m = PBox::new([Interval::point(b[0].mid()), Interval::point(b[1].mid())]);
        sys.eval(&m).map(|f| f[0].mag() + f[1].mag()).unwrap_or(f64::INFINITY)
    };
    let mut stack = vec![*h];
    let mut visited = 0usize;
    while let Some(b) = stack.pop() {
        visited += 1;
        if visited > EXISTENCE_BUDGET {
            return false;
        }
        match sys.eval(&b) {
            Ok(f) if !f[0].contains_zero() || !f[1].contains_zero() => continue,
            _ => {}
        }
        if b[0].width() < h[0].width() && krawczyk_system(sys, &b).verdict == Verdict::UniqueZero {
            return true;
        }
        let axis = if b[0].width() / min_w[0] >= b[1].width() / min_w[1] { 0 } else { 1 };
        if b[axis].width() <= min_w[axis] {
            continue;
        }
        let (l, r) = b.bisect(axis);
        // popped first: the half with the smaller midpoint residual
        if residual(&l) <= residual(&r) {
            stack.push(r);
            stack.push(l);
        } else {
            stack.push(l);
            stack.push(r);
        }
    }
    false
}

/// `g''' ≠ 0` along a single level curve plus topological existence: one
/// to three zeros in the hull.
pub fn certify_cubic<S: System2 + ?Sized>(sys: &S, h: &PBox) -> Option<ComponentCertificate> {
    let cubic = orientations(sys).any(|o| {
        let v = o.view(h);
        certify_single_component_system(&o, &v) && gk_nonzero(&o, &v, 3)
    });
    if cubic && exists_zero(sys, h) {
        return Some(ComponentCertificate {
            bx: *h,
            max_solutions: 3,
            has_solution: true,
            mechanism: Mechanism::CubicMiranda,
        });
    }
    None
}

fn refine<S, E>(sys: &S, boxes: &[PBox], excluded: &E) -> Vec<PBox>
where
    S: System2 + ?Sized,
    E: Fn(&PBox) -> bool,
{
    boxes
        .iter()
        .flat_map(quarter)
        .filter(|b| may_contain_zero(sys, b, excluded) && krawczyk_system(sys, b).verdict != Verdict::Excluded)
        .collect()
}

/// Certificates for the components of `boxes`. A component failing the
/// low-order tests is refined; its cubic certificate, if any, is kept when
/// refinement does not bring the count below three.
fn certify_boxes<S, E>(sys: &S, boxes: &[PBox], excluded: &E, round: u32) -> Option<Vec<ComponentCertificate>>
where
    S: System2 + ?Sized,
    E: Fn(&PBox) -> bool,
{
    let mut out = Vec::new();
    for c in cluster(boxes) {
        let h = hull_of(&c);
        if let Some(cert) = certify_component(sys, &h) {
            out.push(cert);
            continue;
        }
        let cubic = certify_cubic(sys, &h);
        let finer = if round < INNER_REFINE_ROUNDS && 4 * c.len() <= INNER_MAX_BOXES {
            certify_boxes(sys, &refine(sys, &c, excluded), excluded, round + 1)
        } else {
            None
        };
        let cap = |v: &Vec<ComponentCertificate>| v.iter().map(|x| x.max_solutions as usize).sum::<usize>();
        match (finer, cubic) {
            (Some(v), Some(cu)) if cap(&v) >= 3 => out.push(cu),
            (Some(v), _) => out.extend(v),
            (None, Some(cu)) => out.push(cu),
            (None, None) => return None,
        }
    }
    Some(out)
}

/// Certificates covering every zero in `region`; `None` if some component
/// resists certification after [`INNER_REFINE_ROUNDS`] local refinements.
pub fn inner_components<S, E>(sys: &S, region: &PBox, excluded: &E) -> Option<Vec<ComponentCertificate>>
where
    S: System2 + ?Sized,
    E: Fn(&PBox) -> bool,
{
    let start = survivors(sys, region, INNER_START_LEVEL, excluded);
    let mut done = certify_boxes(sys, &start, excluded, 0)?;
    done.sort_by(|a, b| crate::solve::box_order(&a.bx, &b.bx));
    Some(done)
}

/// Lower and upper bounds on the number of zeros in `region`: the number
/// of components with proven existence and the sum of per-component caps.
pub fn inner_solution_bounds<S, E>(sys: &S, region: &PBox, excluded: &E) -> Option<(usize, usize)>
where
    S: System2 + ?Sized,
    E: Fn(&PBox) -> bool,
{
    let c = inner_components(sys, region, excluded)?;
    let lo = c.iter().filter(|x| x.has_solution).count();
    let hi = c.iter().map(|x| x.max_solutions as usize).sum();
    Some((lo, hi))
}

/// Classifies the zero set of a system in `region`.
pub fn classify_inner_system<S, E>(sys: &S, region: &PBox, excluded: &E) -> InnerOutcome
where
    S: System2 + ?Sized,
    E: Fn(&PBox) -> bool,
{
    match inner_components(sys, region, excluded) {
        Some(components) => match InnerClass::from_components(&components) {
            Some(class) => InnerOutcome::Classified { class, components },
            None => InnerOutcome::Unresolved,
        },
        None => InnerOutcome::Unresolved,
    }
}

/// Inner-region classification of `F(·; pr)`, with the primary lemmas as
/// additional exclusion.
pub fn classify_inner(region: &PBox, pr: &ParamRect) -> InnerOutcome {
    let masses = pr.masses();
    let sys = PotentialSystem { pr: *pr };
    classify_inner_system(&sys, region, &|b: &PBox| potential::excluded_by_lemmas(b, &masses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::MapSystem;
    use crate::taylor::{Jet2, Scalar};

    fn sq() -> PBox {
        PBox::from_bounds((-1.0, 1.0), (-1.0, 1.0))
    }

    fn c(j: &Jet2, v: f64) -> Jet2 {
        j.cst(Interval::point(v))
    }

    #[test]
    fn identity_has_no_bifurcation() {
        let sys = MapSystem(|x: &Jet2, y: &Jet2| [*x, *y]);
        assert!(no_bifurcation_system(&sys, &sq()));
    }

    #[test]
    fn fold_straddling_zero_is_flagged() {
        let sys = MapSystem(|x: &Jet2, y: &Jet2| [*x * *x - c(x, 0.0) + x.cst(Interval::new(-0.01, 0.01)), *y]);
        assert!(!no_bifurcation_system(&sys, &sq()));
    }

    #[test]
    fn single_component_examples() {
        let line = MapSystem(|x: &Jet2, y: &Jet2| [*x, *y]);
        assert!(certify_single_component_system(&line, &sq()));
        let two = MapSystem(|x: &Jet2, y: &Jet2| [*x, *y * *y - c(y, 0.25)]);
        assert!(!certify_single_component_system(&two, &sq()));
    }

    #[test]
    fn k_solution_bounds_on_normal_forms() {
        let lin = MapSystem(|x: &Jet2, y: &Jet2| [*x + *y * c(y, 0.5), *y - *x * c(x, 0.3)]);
        let b = PBox::from_bounds((-0.1, 0.1), (-0.1, 0.1));
        assert!(max_k_solutions_system(&lin, &b, 1));
        // f = (x1² − p, x2 − x1) near the fold; the box is off-centre so the
        // curve x2 = x1 avoids the corners
        let fold = MapSystem(|x: &Jet2, y: &Jet2| [*x * *x - x.cst(Interval::new(-1e-4, 1e-4)), *y - *x]);
        let bf = PBox::from_bounds((-0.1, 0.1), (-0.13, 0.12));
        assert!(!max_k_solutions_system(&fold, &bf, 1));
        assert!(max_k_solutions_system(&fold, &bf, 2));
        // f = (x1³ − p x1 − q, x2)
        let cusp = MapSystem(|x: &Jet2, y: &Jet2| {
            let p = x.cst(Interval::new(-1e-3, 1e-3));
            let q = x.cst(Interval::new(-1e-4, 1e-4));
            [*x * *x * *x - p * *x - q, *y]
        });
        assert!(!max_k_solutions_system(&cusp, &b, 2));
        assert!(max_k_solutions_system(&cusp, &b, 3));
    }

    #[test]
    fn miranda_examples() {
        let id = MapSystem(|x: &Jet2, y: &Jet2| [*x, *y]);
        assert!(miranda_exists_system(&id, &sq()));
        let shifted = MapSystem(|x: &Jet2, y: &Jet2| [*x - c(x, 2.0), *y - c(y, 2.0)]);
        assert!(!miranda_exists_system(&shifted, &sq()));
    }

    #[test]
    fn four_condition_theorem_accepts_its_configuration() {
        // zero lines of f1 and f2 cross the top and right edges in the
        // required order; the classical edge conditions fail here
        let sys = MapSystem(|x: &Jet2, y: &Jet2| {
            [*x * c(x, 0.5) + *y * c(y, 1.5) - c(x, 1.25), *x * c(x, 1.5) + *y * c(y, 0.5) - c(x, 1.25)]
        });
        assert!(!classical_miranda(&sys, &sq()));
        assert!(four_condition_miranda(&sys, &sq()));
        // the mirrored map is caught by a reflection variant
        let mirrored = MapSystem(|x: &Jet2, y: &Jet2| {
            [-*x * c(x, 0.5) + *y * c(y, 1.5) - c(x, 1.25), -*x * c(x, 1.5) + *y * c(y, 0.5) - c(x, 1.25)]
        });
        assert!(four_condition_miranda(&mirrored, &sq()));
    }

    #[test]
    fn fold_oracle_transitions() {
        let region = sq();
        let none = |_: &PBox| false;
        for i in -4..=4 {
            let p = 0.01 * i as f64;
            let sys = MapSystem(move |x: &Jet2, y: &Jet2| [*x * *x - x.cst(Interval::point(p)), *y]);
            let brute = match p.partial_cmp(&0.0).unwrap() {
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Greater => 2,
            };
            let (lo, hi) = inner_solution_bounds(&sys, &region, &none).expect("classified");
            assert!(lo <= brute && brute <= hi, "p = {p}: [{lo}, {hi}] vs {brute}");
            if p != 0.0 {
                assert_eq!((lo, hi), (brute, brute), "p = {p}");
            }
        }
    }

    #[test]
    fn clustering_by_adjacency() {
        let a = PBox::from_bounds((0.0, 1.0), (0.0, 1.0));
        let b = PBox::from_bounds((1.0, 2.0), (1.0, 2.0)); // corner contact
        let c = PBox::from_bounds((5.0, 6.0), (0.0, 1.0));
        let groups = cluster(&[a, c, b]);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups.iter().map(|g| g.len()).max(), Some(2));
    }

    #[test]
    fn taxonomy() {
        let mk = |k: u8, has: bool| ComponentCertificate {
            bx: sq(),
            max_solutions: k,
            has_solution: has,
            mechanism: Mechanism::Determinant,
        };
        assert_eq!(InnerClass::from_components(&[mk(1, false)]), Some(InnerClass::S1));
        assert_eq!(InnerClass::from_components(&[mk(1, true), mk(1, true), mk(1, false)]), Some(InnerClass::S111));
        assert_eq!(InnerClass::from_components(&[mk(2, false), mk(1, true)]), Some(InnerClass::S210));
        assert_eq!(InnerClass::from_components(&[mk(3, true)]), Some(InnerClass::S300));
        assert_eq!(InnerClass::from_components(&[mk(2, false)]), Some(InnerClass::S2));
        assert_eq!(InnerClass::from_components(&[mk(3, false)]), None);
        assert_eq!(InnerClass::from_components(&[]), None);
    }
}
