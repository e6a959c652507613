//! The desingularized critical-point system of the amended potential in
//! polar coordinates centered at the heavy primary `p3 = (0,0)`.
//!
//! The light primaries sit on the unit circle at angles `α1 = π/6` (mass
//! `m1`) and `α2 = −π/6` (mass `m2`). With `s = m1/(m1+m2)`, `t = m1+m2`:
//!
//! ```text
//! F1 = r − (1−t)/r² + st·W_r(r, φ−α1) + (1−s)t·W_r(r, φ−α2)
//! F2 = s·W*_α(r, φ−α1) + (1−s)·W*_α(r, φ−α2)
//! ```
//!
//! with `W_r = −(r − cos α)/d³ − cos α`, `W*_α = sin α (1 − 1/d³)` and
//! `d(r, α)² = r² − 2r cos α + 1`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{angles, Interval, PBox};
use crate::taylor::{Jet2, JetError, Scalar, MAX_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PotentialError {
    #[error("singularity: the box may touch primary p{0}")]
    Singularity(u8),
    #[error(transparent)]
    Jet(#[from] JetError),
}

pub type PResult<T> = Result<T, PotentialError>;

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Interval masses derived from a parameter rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Masses {
    pub m1: Interval,
    pub m2: Interval,
    pub m3: Interval,
}

impl Masses {
    pub fn get(&self, i: usize) -> Interval {
        match i {
            1 => self.m1,
            2 => self.m2,
            3 => self.m3,
            _ => panic!("primary index {i} out of range"),
        }
    }
}

/// A rectangle in `(s, t)` parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRect {
    pub s: Interval,
    pub t: Interval,
}

impl ParamRect {
    pub fn new(s: Interval, t: Interval) -> Self {
        ParamRect { s, t }
    }

    pub fn from_bounds(s: (f64, f64), t: (f64, f64)) -> Self {
        ParamRect { s: Interval::new(s.0, s.1), t: Interval::new(t.0, t.1) }
    }

    pub fn point(s: f64, t: f64) -> Self {
        ParamRect { s: Interval::point(s), t: Interval::point(t) }
    }

    /// `m1 = st`, `m2 = (1−s)t`, `m3 = 1−t`.
    pub fn masses(&self) -> Masses {
        Masses { m1: self.s * self.t, m2: (1.0 - self.s) * self.t, m3: 1.0 - self.t }
    }

    pub fn is_point(&self) -> bool {
        self.s.is_point() && self.t.is_point()
    }

    pub fn bisect(&self, axis: usize) -> (ParamRect, ParamRect) {
        if axis == 0 {
            let (a, b) = self.s.bisect();
            (ParamRect { s: a, ..*self }, ParamRect { s: b, ..*self })
        } else {
            let (a, b) = self.t.bisect();
            (ParamRect { t: a, ..*self }, ParamRect { t: b, ..*self })
        }
    }

    pub fn width(&self) -> f64 {
        self.s.width().max(self.t.width())
    }

    pub fn mid(&self) -> ParamRect {
        ParamRect { s: self.s.mid_point(), t: self.t.mid_point() }
    }

    pub fn hull(&self, o: &ParamRect) -> ParamRect {
        ParamRect { s: self.s.hull(&o.s), t: self.t.hull(&o.t) }
    }

    pub fn touches(&self, o: &ParamRect) -> bool {
        self.s.overlaps(&o.s) && self.t.overlaps(&o.t)
    }
}

/// Inverse of [`ParamRect::masses`]: `s = m1/(m1+m2)`, `t = m1+m2`.
pub fn params_from_masses(m1: Interval, m2: Interval) -> Option<ParamRect> {
    let t = m1 + m2;
    let s = m1.checked_div(&t).ok()?;
    Some(ParamRect { s, t })
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

struct Consts {
    alpha1: Interval,
    alpha2: Interval,
    half: Interval,
}

fn consts() -> &'static Consts {
    static C: OnceLock<Consts> = OnceLock::new();
    C.get_or_init(|| {
        let p6 = angles::pi_over_6();
        Consts { alpha1: p6, alpha2: -p6, half: Interval::point(0.5) }
    })
}

/// Angular positions of the light primaries `p1`, `p2`.
pub fn primary_angles() -> (Interval, Interval) {
    let c = consts();
    (c.alpha1, c.alpha2)
}

/// `d(r, α) = (r² − 2r cos α + 1)^{1/2}`, evaluated as
/// `((r−1)² + 4r sin²(α/2))^{1/2}` to avoid cancellation near the primary.
pub fn chord(r: Interval, alpha: Interval) -> Interval {
    let sh = (alpha * consts().half).sin();
    let d2 = (r - 1.0).powi(2) + 4.0 * r * sh.powi(2);
    let d2 = Interval::new(d2.lo().max(0.0), d2.hi().max(0.0));
    d2.sqrt().expect("non-negative after clamping")
}

/// Distances `(r1, r2, r3)` from the box to the three primaries.
pub fn primary_distances(b: &PBox) -> [Interval; 3] {
    let c = consts();
    [chord(b.r(), b.phi() - c.alpha1), chord(b.r(), b.phi() - c.alpha2), b.r()]
}

// ---------------------------------------------------------------------------
// Closed-form evaluation over interval boxes
// ---------------------------------------------------------------------------

/// Per-primary quantities at `(r, α)`.
#[derive(Debug, Clone, Copy)]
struct Term {
    sigma: Interval,
    cos_a: Interval,
    c: Interval,
    d3: Interval,
    d5: Interval,
}

impl Term {
    fn new(r: Interval, alpha: Interval, primary: u8) -> PResult<Term> {
        let sh = (alpha * consts().half).sin();
        let sh2 = sh.powi(2);
        let (sigma, cos_a) = alpha.sin_cos();
        let c = (r - 1.0) + 2.0 * sh2;
        let d2 = (r - 1.0).powi(2) + 4.0 * r * sh2;
        if d2.lo() <= 0.0 {
            return Err(PotentialError::Singularity(primary));
        }
        let dinv = d2.sqrt().and_then(|d| d.recip()).map_err(|_| PotentialError::Singularity(primary))?;
        let d3 = dinv.powi(3);
        let d5 = dinv.powi(5);
        Ok(Term { sigma, cos_a, c, d3, d5 })
    }

    /// ∂W/∂r
    fn wr(&self) -> Interval {
        -(self.c * self.d3) - self.cos_a
    }

    /// ∂W*/∂α = (1/r)∂W/∂α
    fn wa(&self) -> Interval {
        self.sigma * (1.0 - self.d3)
    }

    fn wr_r(&self) -> Interval {
        self.d5 * (2.0 * self.c.powi(2) - self.sigma.powi(2))
    }

    fn wr_a(&self, r: Interval) -> Interval {
        self.sigma * (1.0 - self.d3 + 3.0 * r * self.c * self.d5)
    }

    fn wa_r(&self) -> Interval {
        3.0 * self.sigma * self.c * self.d5
    }

    fn wa_a(&self, r: Interval) -> Interval {
        self.cos_a * (1.0 - self.d3) + 3.0 * r * self.sigma.powi(2) * self.d5
    }
}

fn terms(b: &PBox) -> PResult<(Term, Term)> {
    let c = consts();
    let t1 = Term::new(b.r(), b.phi() - c.alpha1, 1)?;
    let t2 = Term::new(b.r(), b.phi() - c.alpha2, 2)?;
    Ok((t1, t2))
}

/// `u2 + s(u1 − u2)`: the convex combination with `s` occurring once.
#[inline]
fn mix(s: Interval, u1: Interval, u2: Interval) -> Interval {
    u2 + s * (u1 - u2)
}

/// Natural interval extension of `(F1, F2)`.
pub fn f_natural(b: &PBox, pr: &ParamRect) -> PResult<[Interval; 2]> {
    let r = b.r();
    if r.contains_zero() {
        return Err(PotentialError::Singularity(3));
    }
    let (t1, t2) = terms(b)?;
    let rinv2 = r.powi(-2);
    let f1 = r - rinv2 + pr.t * (rinv2 + mix(pr.s, t1.wr(), t2.wr()));
    let f2 = mix(pr.s, t1.wa(), t2.wa());
    Ok([f1, f2])
}

/// Interval Jacobian `∂(F1,F2)/∂(r,φ)` over the box.
pub fn jacobian(b: &PBox, pr: &ParamRect) -> PResult<[[Interval; 2]; 2]> {
    let r = b.r();
    if r.contains_zero() {
        return Err(PotentialError::Singularity(3));
    }
    let (t1, t2) = terms(b)?;
    let mut jac = jacobian_from(r, pr, &t1, &t2);
    if !(b.r().is_point() && b.phi().is_point()) {
        refine_jacobian(b, pr, &mut jac);
    }
    Ok(jac)
}

/// Intersects `jac` with the mean-value form `DF(c) + D²F(box)·(box − c)`.
fn refine_jacobian(b: &PBox, pr: &ParamRect, jac: &mut [[Interval; 2]; 2]) {
    let center = b.mid_box();
    let (Ok((t1, t2)), Ok((g1, g2))) = (terms(&center), f_jet(b, pr, 2)) else { return };
    let jc = jacobian_from(center.r(), pr, &t1, &t2);
    let dr = b.r() - center.r();
    let dp = b.phi() - center.phi();
    for (i, g) in [g1, g2].iter().enumerate() {
        let (hrr, hrp, hpp) = (g.partials(2, 0), g.partials(1, 1), g.partials(0, 2));
        let mv = [jc[i][0] + hrr * dr + hrp * dp, jc[i][1] + hrp * dr + hpp * dp];
        for k in 0..2 {
            if let Some(x) = jac[i][k].intersect(&mv[k]) {
                jac[i][k] = x;
            }
        }
    }
}

fn jacobian_from(r: Interval, pr: &ParamRect, t1: &Term, t2: &Term) -> [[Interval; 2]; 2] {
    let rinv3 = r.powi(-3);
    let j11 = 1.0 + 2.0 * rinv3 + pr.t * (mix(pr.s, t1.wr_r(), t2.wr_r()) - 2.0 * rinv3);
    let j12 = pr.t * mix(pr.s, t1.wr_a(r), t2.wr_a(r));
    let j21 = mix(pr.s, t1.wa_r(), t2.wa_r());
    let j22 = mix(pr.s, t1.wa_a(r), t2.wa_a(r));
    [[j11, j12], [j21, j22]]
}

/// Sensitivities `[∂F/∂s, ∂F/∂t]`, each a pair `(∂F1, ∂F2)`.
pub fn param_partials(b: &PBox, pr: &ParamRect) -> PResult<[[Interval; 2]; 2]> {
    let r = b.r();
    let (t1, t2) = terms(b)?;
    let ds = [pr.t * (t1.wr() - t2.wr()), t1.wa() - t2.wa()];
    let dt = [r.powi(-2) + mix(pr.s, t1.wr(), t2.wr()), Interval::ZERO];
    Ok([ds, dt])
}

/// Everything the search loops need from one box in one pass.
#[derive(Debug, Clone, Copy)]
pub struct BoxEval {
    pub f: [Interval; 2],
    pub jac: [[Interval; 2]; 2],
}

/// `F` as the intersection of the natural and mean-value forms, plus the
/// Jacobian over the box.
pub fn evaluate(b: &PBox, pr: &ParamRect) -> PResult<BoxEval> {
    let r = b.r();
    if r.contains_zero() {
        return Err(PotentialError::Singularity(3));
    }
    let (t1, t2) = terms(b)?;
    let rinv2 = r.powi(-2);
    let mut f = [r - rinv2 + pr.t * (rinv2 + mix(pr.s, t1.wr(), t2.wr())), mix(pr.s, t1.wa(), t2.wa())];
    let mut jac = jacobian_from(r, pr, &t1, &t2);
    if !(b.r().is_point() && b.phi().is_point()) {
        refine_jacobian(b, pr, &mut jac);
    }
    let center = b.mid_box();
    if let Ok(fc) = f_natural(&center, pr) {
        let dr = b.r() - center.r();
        let dp = b.phi() - center.phi();
        for i in 0..2 {
            let mv = fc[i] + jac[i][0] * dr + jac[i][1] * dp;
            if let Some(x) = f[i].intersect(&mv) {
                f[i] = x;
            }
        }
    }
    Ok(BoxEval { f, jac })
}

pub fn det(j: &[[Interval; 2]; 2]) -> Interval {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

// ---------------------------------------------------------------------------
// Generic evaluation (floats, intervals, jets)
// ---------------------------------------------------------------------------

/// `(F1, F2)` in any [`Scalar`] type; `s`, `t` enter as interval constants.
pub fn f_generic<T: Scalar>(r: &T, phi: &T, pr: &ParamRect) -> PResult<[T; 2]> {
    let c = consts();
    let one = r.cst(Interval::ONE);
    let mut wr = Vec::with_capacity(2);
    let mut wa = Vec::with_capacity(2);
    for (k, a) in [c.alpha1, c.alpha2].into_iter().enumerate() {
        let alpha = phi.clone() - phi.cst(a);
        let half = alpha.clone() * alpha.cst(c.half);
        let (sh, _) = half.sin_cos();
        let (sigma, cos_a) = alpha.sin_cos();
        let sh2 = sh.sqr();
        let two_sh2 = sh2.clone() + sh2.clone();
        let rm1 = r.clone() - one.clone();
        let cc = rm1.clone() + two_sh2;
        let d2 = rm1.sqr() + r.cst(Interval::point(4.0)) * r.clone() * sh2;
        let dinv = d2.sqrt().and_then(|d| d.recip()).map_err(|_| PotentialError::Singularity(k as u8 + 1))?;
        let d3 = dinv.clone() * dinv.clone() * dinv;
        wr.push(-(cc * d3.clone()) - cos_a);
        wa.push(sigma * (one.clone() - d3));
    }
    let rinv = r.recip().map_err(|_| PotentialError::Singularity(3))?;
    let rinv2 = rinv.sqr();
    let s = r.cst(pr.s);
    let t = r.cst(pr.t);
    let f1 = r.clone() - rinv2.clone() + t * (rinv2 + wr[1].clone() + s.clone() * (wr[0].clone() - wr[1].clone()));
    let f2 = wa[1].clone() + s * (wa[0].clone() - wa[1].clone());
    Ok([f1, f2])
}

/// Jets of `F1`, `F2` in `(r, φ)` over the box.
pub fn f_jet(b: &PBox, pr: &ParamRect, order: usize) -> PResult<(Jet2, Jet2)> {
    let r = Jet2::lift(b, 0, order);
    let phi = Jet2::lift(b, 1, order);
    let [f1, f2] = f_generic(&r, &phi, pr)?;
    Ok((f1, f2))
}

/// [`f_jet`] tightened by the mean-value form around the box center, using
/// one extra order over the box.
pub fn f_jet_mv(b: &PBox, pr: &ParamRect, order: usize) -> PResult<(Jet2, Jet2)> {
    if order >= MAX_ORDER {
        return f_jet(b, pr, order);
    }
    let center = b.mid_box();
    let (c1, c2) = f_jet(&center, pr, order)?;
    let (g1, g2) = f_jet(b, pr, order + 1)?;
    let dr = b.r() - center.r();
    let dp = b.phi() - center.phi();
    Ok((g1.mean_value(&c1, dr, dp, order), g2.mean_value(&c2, dr, dp, order)))
}

/// Point evaluation in floating point (non-rigorous).
pub fn f_point(r: f64, phi: f64, s: f64, t: f64) -> [f64; 2] {
    f_generic(&r, &phi, &ParamRect::point(s, t)).unwrap_or([f64::NAN; 2])
}

/// Unrescaled polar gradient `(∂V/∂r, ∂V/∂φ)` (non-rigorous, point masses).
pub fn grad_v_point(r: f64, phi: f64, m1: f64, m2: f64) -> [f64; 2] {
    let a1 = std::f64::consts::FRAC_PI_6;
    let m3 = 1.0 - m1 - m2;
    let w = |alpha: f64| {
        let d = (r * r - 2.0 * r * alpha.cos() + 1.0).sqrt();
        let d3 = d.powi(-3);
        (-(r - alpha.cos()) * d3 - alpha.cos(), r * alpha.sin() * (1.0 - d3))
    };
    let (wr1, wa1) = w(phi - a1);
    let (wr2, wa2) = w(phi + a1);
    [r - m3 / (r * r) + m1 * wr1 + m2 * wr2, m1 * wa1 + m2 * wa2]
}

// ---------------------------------------------------------------------------
// Exclusion lemmas
// ---------------------------------------------------------------------------

/// Near-primary test: `m_i/r_i² > (1−m_i)/(1−r_i)² + r_i + 1` certifies that
/// no critical point lies at distance `r_i` from primary `i`.
pub fn exclude_near_primary(ri: Interval, mi: Interval) -> bool {
    if ri.hi() >= 1.0 || mi.lo() <= 0.0 {
        return false;
    }
    let ri_nonneg = Interval::new(ri.lo().max(0.0), ri.hi());
    let lhs_lo = Interval::point(mi.lo()).checked_div(&ri_nonneg.hi_point().powi(2));
    let Ok(lhs) = lhs_lo else { return false };
    let Ok(rhs1) = (1.0 - mi).checked_div(&(1.0 - ri_nonneg).powi(2)) else { return false };
    let rhs = rhs1 + ri_nonneg + 1.0;
    lhs.lo() > rhs.hi()
}

/// Far test: `r_i ≥ 2`, or `r_i − 1 > (1−m_i)/(r_i−1)² + m_i/r_i²`.
pub fn exclude_far(ri: Interval, mi: Interval) -> bool {
    if ri.lo() >= 2.0 {
        return true;
    }
    if ri.lo() <= 1.0 {
        return false;
    }
    let (Ok(a), Ok(b)) = ((ri - 1.0).powi(2).recip(), ri.powi(2).recip()) else { return false };
    // (1−m)a + mb = a − m(a − b), with m occurring once
    let rhs = a - mi * (a - b);
    (ri - 1.0).lo() > rhs.hi()
}

/// Applies the near and far tests to all three primaries.
pub fn excluded_by_lemmas(b: &PBox, m: &Masses) -> bool {
    let d = primary_distances(b);
    (0..3).any(|k| {
        let mi = m.get(k + 1);
        exclude_near_primary(d[k], mi) || exclude_far(d[k], mi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b)
    }

    #[test]
    fn chord_examples() {
        assert!(chord(Interval::ZERO, iv(-3.0, 3.0)).contains(1.0));
        assert!(chord(Interval::ONE, Interval::ZERO).contains(0.0));
        assert!(chord(Interval::ONE, Interval::PI).contains(2.0));
        let d = chord(Interval::point(0.5), Interval::point(1.0));
        let exact = (0.25f64 - 1.0f64.cos() + 1.0).sqrt();
        assert!(d.contains(exact) && d.width() < 1e-14);
    }

    #[test]
    fn f2_vanishes_on_symmetry_axis() {
        for t in [0.1, 0.4, 0.6] {
            for r in [0.5, 0.9, 1.3, 1.9] {
                let b = PBox::from_bounds((r, r), (0.0, 0.0));
                let f = f_natural(&b, &ParamRect::point(0.5, t)).unwrap();
                assert!(f[1].contains_zero(), "r={r} t={t}: {:?}", f[1]);
            }
        }
    }

    #[test]
    fn box_touching_primary_is_singular() {
        let b = PBox::from_bounds((0.9, 1.1), (0.4, 0.6));
        assert!(matches!(f_natural(&b, &ParamRect::point(0.25, 0.25)), Err(PotentialError::Singularity(1))));
        let b = PBox::from_bounds((0.9, 1.1), (-0.6, -0.4));
        assert!(matches!(jacobian(&b, &ParamRect::point(0.25, 0.25)), Err(PotentialError::Singularity(2))));
    }

    #[test]
    fn closed_forms_agree_with_jets() {
        let pr = ParamRect::from_bounds((0.2, 0.21), (0.3, 0.31));
        let b = PBox::from_bounds((0.7, 0.71), (1.0, 1.01));
        let f = f_natural(&b, &pr).unwrap();
        let j = jacobian(&b, &pr).unwrap();
        let (f1, f2) = f_jet(&b, &pr, 2).unwrap();
        assert!(f[0].overlaps(&f1.value()) && f[1].overlaps(&f2.value()));
        assert!(j[0][0].overlaps(&f1.partials(1, 0)));
        assert!(j[0][1].overlaps(&f1.partials(0, 1)));
        assert!(j[1][0].overlaps(&f2.partials(1, 0)));
        assert!(j[1][1].overlaps(&f2.partials(0, 1)));
    }

    #[test]
    fn jet_value_equals_interval_evaluation() {
        let pr = ParamRect::point(0.25, 0.25);
        let b = PBox::from_bounds((1.2, 1.25), (-2.0, -1.9));
        let [g1, g2] = f_generic(&b.r(), &b.phi(), &pr).unwrap();
        let (f1, f2) = f_jet(&b, &pr, 3).unwrap();
        assert_eq!(f1.value(), g1);
        assert_eq!(f2.value(), g2);
    }

    #[test]
    fn mass_round_trip() {
        let pr = ParamRect::from_bounds((0.1, 0.2), (0.3, 0.4));
        let m = pr.masses();
        let back = params_from_masses(m.m1, m.m2).unwrap();
        assert!(pr.s.subset_of(&back.s) && pr.t.subset_of(&back.t));
        assert!((m.m1 + m.m2 + m.m3).contains(1.0));
    }

    #[test]
    fn gradient_matches_rescaled_system() {
        let (s, t) = (0.3, 0.4);
        let (m1, m2) = (s * t, (1.0 - s) * t);
        let (r, phi) = (0.8, 2.1);
        let g = grad_v_point(r, phi, m1, m2);
        let f = f_point(r, phi, s, t);
        assert!((g[0] - f[0]).abs() < 1e-12);
        assert!((g[1] - r * t * f[1]).abs() < 1e-12);
    }

    #[test]
    fn near_primary_examples() {
        // m3 ≥ 1/3, r3 ≤ 1/3
        assert!(exclude_near_primary(iv(0.0, 1.0 / 3.0), iv(1.0 / 3.0, 1.0)));
        // m ≥ ε, r ≤ √ε/2
        let eps: f64 = 1e-4;
        assert!(exclude_near_primary(iv(0.0, eps.sqrt() / 2.0), iv(eps, eps)));
        // inconclusive when straddling
        assert!(!exclude_near_primary(iv(0.0, 0.5), iv(1.0 / 3.0, 1.0)));
    }

    #[test]
    fn refined_exclusion_radius_for_heavy_primary() {
        // largest r with m/r² > (1−m)/(1−r)² + r + 1 at m = 1/3, by bisection
        let m = Interval::ratio(1.0, 3.0);
        let (mut lo, mut hi) = (0.3, 0.4);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if exclude_near_primary(iv(0.0, mid), m) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(lo > 0.34 && lo < 0.3406, "{lo}");
    }

    #[test]
    fn far_examples() {
        assert!(exclude_far(Interval::point(2.0), iv(0.0, 1.0)));
        assert!(exclude_far(iv(2.0, 5.0), iv(0.0, 1.0)));
        assert!(!exclude_far(Interval::point(1.5), Interval::ZERO));
        assert!(!exclude_far(iv(1.5, 2.5), Interval::point(0.5)));
    }
}
