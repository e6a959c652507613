//! Verified bounds near a light primary.
//!
//! When a light primary carries mass at most [`MASS_THRESHOLD`], every
//! equilibrium within [`DISK_RADIUS`] of it is non-degenerate. Two regimes
//! are certified separately:
//!
//! * case 1: the other light mass is at least the threshold. The Hessian of
//!   the regular part at the primary has two eigenvalues bounded away from
//!   zero ([`eigen_bounds`]), and the cubic remainder ([`h_bounds`]) is too
//!   small to spoil `d/dr(∂V/∂r)` along the four angular branches.
//! * case 2: both light masses are small. The angular equation is solved as
//!   a perturbation of the unperturbed circle `r3 = 1` ([`phi0_branches`],
//!   [`delta_bounds`]), and the radial derivative along each branch is
//!   written as `base + m1·a + m2·b + 2m1/r³` with verified coefficients
//!   ([`branch_expansions`]).
//!
//! Local coordinates: the light primary sits at `(1, 0)`, the other light
//! primary at `(1/2, √3/2)` and the heavy one at the origin; `(r, φ)` are
//! polar coordinates around the light primary. The global modules never see
//! this frame.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{angles, IBox, Interval, IntervalError};
use crate::potential::ParamRect;
use crate::taylor::{Jet2, JetError, Scalar};

/// Largest light mass covered by the certificate.
pub const MASS_THRESHOLD: f64 = 1e-2;
/// Radius of the certified disk around the light primary.
pub const DISK_RADIUS: f64 = 1e-3;
/// Largest radius accepted by [`phi0_branches`].
pub const PHI0_MAX_RADIUS: f64 = 0.1;

/// Number of angular pieces used to bound the `g` derivatives.
const G_PIECES: usize = 1024;
/// Radial and mass subdivision used by [`branch_expansions`].
const BRANCH_R_PIECES: usize = 8;
const BRANCH_M_PIECES: usize = 16;
/// Tolerance of the eigenvalue range search.
const EIGEN_TOL: f64 = 1e-5;
const EIGEN_MAX_DEPTH: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SmallMassError {
    #[error("radius too large: 2RC1/gap = {0} is not below 1")]
    RadiusTooLarge(Interval),
    #[error("radius condition R²(4C1² + (C1+C2)²) < gap² fails: {lhs} vs {rhs}")]
    MainCondition { lhs: Interval, rhs: Interval },
    #[error("branch certification failed: {0}")]
    BranchCertification(&'static str),
    #[error("argument outside the certified domain: {0}")]
    Domain(&'static str),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

pub type SmResult<T> = Result<T, SmallMassError>;

fn pt(x: f64) -> Interval {
    Interval::point(x)
}

/// `[0, x.hi]`: a certified non-negative upper bound kept as an interval.
fn upper(x: Interval) -> Interval {
    Interval::new(0.0, x.hi().max(0.0))
}

// ---------------------------------------------------------------------------
// Eigenvalues of the regular part at the light primary
// ---------------------------------------------------------------------------

/// Eigenvalues `λ1 > λ2` of the Hessian of the regular potential at the
/// light primary, and their gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenBounds {
    pub lambda1: Interval,
    pub lambda2: Interval,
    pub gap: Interval,
}

/// Closed-form enclosure on a single mass box, with the two-sided sandwich
/// for `λ2` when it applies.
fn eigen_direct(m2: Interval, m3: Interval) -> EigenBounds {
    let mut s = m2 + m3;
    if let Some(c) = s.intersect(&Interval::new(0.5, 1.0)) {
        s = c;
    }
    // m2² − m2·m3 + m3² written so that it stays non-negative
    let q = (m2 - m3).sqr() + m2 * m3;
    let q = Interval::new(q.lo().max(0.0), q.hi().max(0.0));
    let mut gap = q.sqrt().expect("non-negative") * 3.0;
    // s²/4 ≤ q ≤ s²
    let sandwich = Interval::new((s * 1.5).lo(), (s * 3.0).hi());
    gap = gap.intersect(&sandwich).unwrap_or(gap);
    let lambda1 = (2.0 + s + gap) * 0.5;
    let mut lambda2 = (2.0 + s - gap) * 0.5;
    // λ1 ≤ 1 + 2s and λ2 ≥ 1 − s
    let lambda1 = lambda1.intersect(&Interval::new(f64::NEG_INFINITY, (1.0 + s * 2.0).hi())).unwrap_or(lambda1);
    lambda2 = lambda2.intersect(&Interval::new((1.0 - s).lo(), f64::INFINITY)).unwrap_or(lambda2);
    let m1 = 1.0 - s;
    if s.lo() > 0.0 && m1.hi() <= 0.5 {
        let hm = if m2.lo() > 0.0 && m3.lo() > 0.0 {
            (m2.recip().unwrap() + m3.recip().unwrap()).recip().unwrap()
        } else {
            (m2 * m3).checked_div(&s).unwrap()
        };
        let lo = m1 + hm * 2.25;
        let hi = m1 + hm * 4.5;
        if let Some(x) = lambda2.intersect(&Interval::new(lo.lo(), hi.hi())) {
            lambda2 = x;
        }
    }
    EigenBounds { lambda1, lambda2, gap }
}

fn eigen_feasible(m2: Interval, m3: Interval) -> bool {
    let s = m2 + m3;
    s.hi() >= 0.5 && s.lo() <= 1.0
}

/// Enclosures of `λ1,2 = ½(2 + m2 + m3 ± 3√(m2² − m2m3 + m3²))` over the
/// masses in `m2 × m3` with `m1 = 1 − m2 − m3 ∈ [0, 1/2]`.
///
/// The range is found by subdividing the mass box until every cell's
/// enclosure lies within [`EIGEN_TOL`] of the values sampled at cell
/// centers, so the result is close to the true range rather than a single
/// interval evaluation.
pub fn eigen_bounds(m2: Interval, m3: Interval) -> SmResult<EigenBounds> {
    if m2.lo() < 0.0 || m3.lo() < 0.0 || m2.hi() > 1.0 || m3.hi() > 1.0 {
        return Err(SmallMassError::Domain("eigen_bounds needs m2, m3 ⊆ [0, 1]"));
    }
    if !eigen_feasible(m2, m3) {
        return Err(SmallMassError::Domain("no masses with m1 ∈ [0, 1/2] in the box"));
    }
    if m2.is_point() && m3.is_point() {
        return Ok(eigen_direct(m2, m3));
    }
    let mut cells = vec![(m2, m3, 0u32)];
    let mut done: Vec<EigenBounds> = Vec::new();
    let mut inner: Option<EigenBounds> = None;
    let sample = |a: Interval, b: Interval| {
        let (x, y) = (a.mid_point(), b.mid_point());
        let s = (x + y).mid();
        if (0.5..=1.0).contains(&s) {
            Some(eigen_direct(x, y))
        } else {
            None
        }
    };
    let widen = |acc: Option<EigenBounds>, e: EigenBounds| match acc {
        None => Some(e),
        Some(a) => Some(EigenBounds {
            lambda1: a.lambda1.hull(&e.lambda1),
            lambda2: a.lambda2.hull(&e.lambda2),
            gap: a.gap.hull(&e.gap),
        }),
    };
    while let Some((a, b, depth)) = cells.pop() {
        if !eigen_feasible(a, b) {
            continue;
        }
        if let Some(e) = sample(a, b) {
            inner = widen(inner, e);
        }
        let e = eigen_direct(a, b);
        let within = inner.is_some_and(|i| {
            e.lambda1.subset_of(&i.lambda1.inflate(EIGEN_TOL))
                && e.lambda2.subset_of(&i.lambda2.inflate(EIGEN_TOL))
                && e.gap.subset_of(&i.gap.inflate(EIGEN_TOL))
        });
        if within || depth >= EIGEN_MAX_DEPTH || (a.width() < EIGEN_TOL && b.width() < EIGEN_TOL) {
            done.push(e);
            continue;
        }
        let (a0, a1) = a.bisect();
        let (b0, b1) = b.bisect();
        for (x, y) in [(a0, b0), (a0, b1), (a1, b0), (a1, b1)] {
            cells.push((x, y, depth + 1));
        }
    }
    done.into_iter().fold(None, widen).ok_or(SmallMassError::Domain("no feasible masses in the box"))
}

// ---------------------------------------------------------------------------
// Cubic remainder of the regular potential
// ---------------------------------------------------------------------------

/// Constants bounding the cubic remainder `h` of the regular potential and
/// the function `g` of the case-2 expansion, valid for `‖(x,y)‖ ≤ radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HigherOrderBounds {
    pub c1: Interval,
    pub c2: Interval,
    pub d: [Interval; 5],
    pub radius: Interval,
}

impl HigherOrderBounds {
    /// All constants for masses `m2, m3 ∈ [0, 1]` on the given disk.
    pub fn compute(radius: f64) -> SmResult<Self> {
        let unit = Interval::new(0.0, 1.0);
        let (c1, c2) = h_bounds(pt(radius), unit, unit)?;
        let d = g_r33_bounds(pt(radius))?;
        Ok(HigherOrderBounds { c1, c2, d, radius: pt(radius) })
    }
}

/// Degree-3 Taylor coefficients of `1/r2` and `1/r3` over the square of
/// half-width `radius` around the light primary.
fn cubic_coefficients(radius: Interval) -> SmResult<([Interval; 4], [Interval; 4])> {
    let w = Interval::new(-radius.hi(), radius.hi());
    let b = IBox([w, w]);
    let x = Jet2::lift(&b, 0, 3);
    let y = Jet2::lift(&b, 1, 3);
    let half_sqrt3 = pt(3.0).sqrt().unwrap() * 0.5;
    let inv_dist = |dx: Jet2, dy: Jet2| -> Result<Jet2, JetError> { (dx * dx + dy * dy).sqrt()?.recip() };
    let inv2 = inv_dist(x + pt(0.5), y + (-half_sqrt3))?;
    let inv3 = inv_dist(x + pt(1.0), y)?;
    let pick = |j: &Jet2| [j.coeff(3, 0), j.coeff(2, 1), j.coeff(1, 2), j.coeff(0, 3)];
    Ok((pick(&inv2), pick(&inv3)))
}

/// `(C1, C2)` with `‖∇h‖ < C1‖(x,y)‖²` and `‖D²h‖ < C2‖(x,y)‖` on the disk.
///
/// `h` is linear in `(m2, m3)`, so the sum of coefficient magnitudes is
/// convex in the masses and its maximum over the mass box sits at a vertex.
/// `C1` is three times that maximum and `C2` six times.
pub fn h_bounds(radius: Interval, m2: Interval, m3: Interval) -> SmResult<(Interval, Interval)> {
    if radius.hi() > 2.0 || radius.lo() < 0.0 {
        return Err(SmallMassError::Domain("h_bounds radius must lie in [0, 2]"));
    }
    let (a, b) = cubic_coefficients(radius)?;
    let mut worst = Interval::ZERO;
    for u in [m2.lo(), m2.hi()] {
        for v in [m3.lo(), m3.hi()] {
            let mut sum = Interval::ZERO;
            for k in 0..4 {
                sum += pt((a[k] * u + b[k] * v).mag());
            }
            worst = worst.max(&sum);
        }
    }
    Ok((upper(worst * 3.0), upper(worst * 6.0)))
}

/// The five polar-derivative bounds of `h` at radius `r`, raw and divided by
/// the natural power of `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarBounds {
    pub h_r: Interval,
    pub h_phi: Interval,
    pub h_rr: Interval,
    pub h_rphi: Interval,
    pub h_phiphi: Interval,
    pub tilde_r: Interval,
    pub tilde_phi: Interval,
    pub tilde_rr: Interval,
    pub tilde_rphi: Interval,
    pub tilde_phiphi: Interval,
}

pub fn polar_derivative_bounds(c1: Interval, c2: Interval, r: Interval) -> PolarBounds {
    let r = upper(r);
    let s = c1 + c2;
    PolarBounds {
        h_r: upper(c1 * r.sqr()),
        h_phi: upper(c1 * r.powi(3)),
        h_rr: upper(c2 * r),
        h_rphi: upper(s * r.sqr()),
        h_phiphi: upper(s * r.powi(3)),
        tilde_r: upper(c1),
        tilde_phi: upper(c1),
        tilde_rr: upper(c2),
        tilde_rphi: upper(s),
        tilde_phiphi: upper(s),
    }
}

// ---------------------------------------------------------------------------
// Case 1: the other light mass bounded below
// ---------------------------------------------------------------------------

/// The four angular branches of `∂V/∂φ = 0` on the disk of radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorCertificate {
    pub radius: Interval,
    /// Sector half-opening `arcsin(2R·C1/gap)`.
    pub alpha: Interval,
    /// Largest radius allowed by `2R·C1/gap < 1`.
    pub sector_radius: Interval,
    /// Largest radius allowed by `R²(4C1² + (C1+C2)²) < gap²`.
    pub main_radius: Interval,
    /// `|δ(r)|` for `r ≤ radius`.
    pub delta_bound: Interval,
    /// `|φ'(r)|` for `r ≤ radius`.
    pub phi_prime_bound: Interval,
}

pub fn sector_curves(c1: Interval, c2: Interval, gap: Interval, radius: Interval) -> SmResult<SectorCertificate> {
    let c1 = upper(c1);
    let c2 = upper(c2);
    let gap_lo = pt(gap.lo());
    let r = upper(radius);
    let ratio = (pt(2.0) * r.hi_point() * c1.hi_point())
        .checked_div(&gap_lo)
        .map_err(|_| SmallMassError::Domain("eigenvalue gap must be positive"))?;
    if ratio.hi() >= 1.0 {
        return Err(SmallMassError::RadiusTooLarge(ratio));
    }
    let lhs = r.hi_point().sqr() * (c1.hi_point().sqr() * 4.0 + (c1 + c2).hi_point().sqr());
    let rhs = gap_lo.sqr();
    if !lhs.certainly_lt(&rhs) {
        return Err(SmallMassError::MainCondition { lhs, rhs });
    }
    let alpha = ratio.asin()?;
    let sector_radius = gap_lo.checked_div(&(c1.hi_point() * 2.0)).unwrap_or(Interval::ENTIRE);
    let main_radius = gap_lo
        .checked_div(&(c1.hi_point().sqr() * 4.0 + (c1 + c2).hi_point().sqr()).sqrt()?)
        .unwrap_or(Interval::ENTIRE);
    let cos_part = (1.0 - ratio.sqr()).sqrt()?;
    let den = gap_lo * cos_part - (c1 + c2).hi_point() * r.hi_point();
    if den.lo() <= 0.0 {
        return Err(SmallMassError::MainCondition { lhs, rhs });
    }
    let phi_prime = (c1.hi_point() * 3.0 + c2.hi_point()).checked_div(&den).unwrap();
    Ok(SectorCertificate {
        radius: r,
        alpha: upper(alpha),
        sector_radius,
        main_radius,
        delta_bound: upper(alpha),
        phi_prime_bound: upper(phi_prime),
    })
}

/// Outcome of the case-1 radial analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Case1Certificate {
    pub sector: SectorCertificate,
    /// `|L(r)|` in `∂V/∂r = −m/r² + λr + r²L`.
    pub l_bound: Interval,
    /// `|T(r)|` in `d/dr(∂V/∂r) = 2m/r³ + λ + rT`.
    pub t_bound: Interval,
    /// Lower bounds of `λ − R|T|` and `a − R|T|`.
    pub margins: [f64; 2],
    pub certified: bool,
}

/// Bounds `L`, `T` along the four branches and checks that
/// `2m/r³ + λ + rT` and `2m/r³ + a + rT` stay positive for `r ≤ R`.
pub fn radial_nondegeneracy_case1(
    eb: &EigenBounds,
    c1: Interval,
    c2: Interval,
    radius: Interval,
) -> SmResult<Case1Certificate> {
    let sector = sector_curves(c1, c2, eb.gap, radius)?;
    let r = sector.radius.hi_point();
    let gap = upper(eb.gap);
    let (c1, c2) = (upper(c1), upper(c2));
    let delta = sector.delta_bound;
    let l_bound = upper(gap * 0.5 * r * 2.0 * delta.sqr() + c1);
    let t_bound = upper(gap * 0.5 * r * delta + c2 + r * sector.phi_prime_bound * (c1 + c2 + r * gap * delta));
    let shrink = r * t_bound.hi_point();
    let margins = [(eb.lambda1 - shrink).lo(), (eb.lambda2 - shrink).lo()];
    let certified = margins[0] > 0.0 && margins[1] > 0.0;
    Ok(Case1Certificate { sector, l_bound, t_bound, margins, certified })
}

// ---------------------------------------------------------------------------
// Case 2: both light masses small
// ---------------------------------------------------------------------------

/// The branches `cos φ0 = −r/2` of the unperturbed angular equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phi0Branches {
    /// `φ0⁺(r) = π/2 + arcsin(r/2)`.
    pub plus: Interval,
    /// `φ0⁻(r) = 3π/2 − arcsin(r/2)`.
    pub minus: Interval,
    pub dplus: Interval,
    pub dminus: Interval,
    /// `c` with `φ0⁺ ∈ π/2 + r/2 + r³/48 + c·r⁴`.
    pub remainder: Interval,
    /// `c` with `φ0⁺' ∈ 1/2 + r²/16 + c·r³`.
    pub derivative_remainder: Interval,
}

pub fn phi0_branches(r: Interval) -> SmResult<Phi0Branches> {
    if r.lo() < 0.0 || r.hi() > PHI0_MAX_RADIUS {
        return Err(SmallMassError::Domain("phi0_branches needs r ⊆ [0, 0.1]"));
    }
    let x = r * 0.5;
    let shift = x.asin()?;
    let plus = angles::half_pi() + shift;
    let minus = angles::half_pi() * 3.0 - shift;
    let dplus = (1.0 - x.sqr()).sqrt()?.recip()? * 0.5;
    // arcsin and (1 − x²)^{-1/2} have positive series coefficients bounded by
    // the first omitted one, so the tails are geometric.
    let tail = (1.0 - x.sqr()).recip()?;
    let remainder = upper(r * 3.0 * tail).checked_div(&pt(1280.0)).unwrap();
    let derivative_remainder = upper(r * 3.0 * tail).checked_div(&pt(256.0)).unwrap();
    Ok(Phi0Branches {
        plus,
        minus,
        dplus,
        dminus: -dplus,
        remainder: upper(remainder),
        derivative_remainder: upper(derivative_remainder),
    })
}

/// Bounds `D1..D5` on `g` and its partials, where
/// `1 − r3⁻³ = 3r cos φ + r²(3 sin²φ/2 − 6 cos²φ) + r³ g(r, φ)`, for
/// `r ≤ R0`.
///
/// With `f = 1 − r3⁻³` expanded over `[0, R0] × (angular piece)`,
/// `g ∈ f₃₀`, `∂φ g ∈ f₃₁`, `∂²φ g ∈ 2f₃₂`, and `r∂r f − 3f = r⁴ ∂r g`
/// gives `∂r g ∈ f₄₀ + 5r f₅₀` and `∂r∂φ g ∈ f₄₁ + 5r f₅₁`.
pub fn g_r33_bounds(r0: Interval) -> SmResult<[Interval; 5]> {
    if r0.hi() >= 1.0 || r0.lo() < 0.0 {
        return Err(SmallMassError::Domain("g_r33_bounds needs R0 < 1"));
    }
    let rr = Interval::new(0.0, r0.hi());
    let pieces = Interval::new(0.0, angles::two_pi().hi()).subdivide(G_PIECES);
    let mut d = [0.0f64; 5];
    for phi in pieces {
        let b = IBox([rr, phi]);
        let r = Jet2::lift(&b, 0, 6);
        let p = Jet2::lift(&b, 1, 6);
        let (_, c) = p.sin_cos();
        let d2 = (r * c) * pt(2.0) + r * r + pt(1.0);
        let inv = d2.sqrt()?.recip()?;
        let f = -(inv * inv * inv) + pt(1.0);
        let vals = [
            f.coeff(3, 0),
            f.coeff(3, 1),
            f.coeff(3, 2) * 2.0,
            f.coeff(4, 0) + rr * f.coeff(5, 0) * 5.0,
            f.coeff(4, 1) + rr * f.coeff(5, 1) * 5.0,
        ];
        for (k, v) in vals.iter().enumerate() {
            d[k] = d[k].max(v.mag());
        }
    }
    Ok(d.map(|x| Interval::new(0.0, x)))
}

/// The perturbation estimates of the case-2 angular branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaBounds {
    pub radius: Interval,
    /// `sup |f0|`.
    pub z0: Interval,
    /// `inf |∂φ f0|` on the sectors.
    pub d0: Interval,
    /// `sup |∂φ f0|`.
    pub df: Interval,
    /// `sup |∂²φ f0|`, `sup |∂r f0|`, `sup |∂r∂φ f0|`.
    pub d2: Interval,
    pub d3: Interval,
    pub d4: Interval,
    pub h: Interval,
    /// `|δ|` with `φ = φ0 + m2·δ`.
    pub delta: Interval,
    /// `|δ'|` and `|Δ'| = m2|δ'|`.
    pub delta_prime: Interval,
    pub big_delta_prime: Interval,
}

/// The δ estimates for `r ∈ [0, R1]`, using the `g` constants `d`.
pub fn delta_bounds_with(
    d: &[Interval; 5],
    r1: Interval,
    m1: Interval,
    m2: Interval,
    alpha: Interval,
) -> SmResult<DeltaBounds> {
    if m1.lo() < 0.0 || m2.lo() < 0.0 || m1.hi() > MASS_THRESHOLD || m2.hi() > MASS_THRESHOLD {
        return Err(SmallMassError::Domain("delta_bounds needs m1, m2 ⊆ [0, 1e-2]"));
    }
    let [d1, d2c, d3c, d4c, d5c] = d.map(upper);
    let r = upper(r1);
    let m3 = 1.0 - m1 - m2;
    let mu = m2.checked_div(&m3).map_err(|_| SmallMassError::Domain("m3 vanishes"))?;
    let z0 = 1.5 + r * 2.5 + r.sqr() * d1;
    let d0 = alpha.cos() * 3.0 - r * 6.0 - r.sqr() * (d1.sqr() + d2c.sqr()).sqrt()?;
    let df = 3.0 + r * 6.0 + r.sqr() * (d1 + d2c);
    if d0.lo() <= (mu * df).hi() {
        return Err(SmallMassError::BranchCertification("∂φ f does not dominate the perturbation"));
    }
    let shift = phi0_branches(r.hi_point().min(&pt(PHI0_MAX_RADIUS)))?.plus - angles::half_pi();
    let spread = upper(shift) + mu * z0.checked_div(&d0).unwrap();
    if spread.hi() > (alpha * 0.5).lo() {
        return Err(SmallMassError::BranchCertification("branch leaves its sector"));
    }
    let delta = upper(z0.checked_div(&(m3 * d0)).unwrap());
    let d2 = 6.0 + r * 27.0 + r.sqr() * (d1 + d2c * 2.0 + d3c);
    let d3 = 2.5 + r * 2.0 * d1 + r.sqr() * d4c;
    let d4 = 6.0 + r * 2.0 * (d1 + d2c) + r.sqr() * (d4c + d5c);
    let h = upper((d2 * delta + df.checked_div(&m3).unwrap()).checked_div(&d0).unwrap());
    let mh = m2 * h;
    if mh.hi() >= 1.0 {
        return Err(SmallMassError::BranchCertification("m2·|h| is not below 1"));
    }
    let hq = h.checked_div(&(1.0 - mh)).unwrap();
    let inv_d0 = d0.recip().unwrap();
    let delta_prime = upper(inv_d0 * (1.0 + m2 * hq) * (d4 + d3.checked_div(&m3).unwrap()) + d3 * inv_d0 * hq);
    let big_delta_prime = upper(inv_d0 * (1.0 + m2 * hq) * (m2 * d4 + mu * d3) + m2 * d3 * inv_d0 * hq);
    Ok(DeltaBounds {
        radius: r,
        z0: upper(z0),
        d0: Interval::new(d0.lo(), d0.hi()),
        df: upper(df),
        d2: upper(d2),
        d3: upper(d3),
        d4: upper(d4),
        h,
        delta,
        delta_prime,
        big_delta_prime,
    })
}

/// [`delta_bounds_with`] with the `g` constants computed on `[0, R1]`.
pub fn delta_bounds(r1: Interval, m1: Interval, m2: Interval, alpha: Interval) -> SmResult<DeltaBounds> {
    let d = g_r33_bounds(upper(r1))?;
    delta_bounds_with(&d, r1, m1, m2, alpha)
}

/// The four branches of the case-2 angular equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Zero,
    HalfPi,
    Pi,
    ThreeHalfPi,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::Zero, Branch::HalfPi, Branch::Pi, Branch::ThreeHalfPi];

    /// Whether the branch bends with `r` (it follows the circle `r3 = 1`).
    fn on_circle(self) -> bool {
        matches!(self, Branch::HalfPi | Branch::ThreeHalfPi)
    }

    fn phi0(self, r: Interval) -> SmResult<(Interval, Interval)> {
        Ok(match self {
            Branch::Zero => (Interval::ZERO, Interval::ZERO),
            Branch::Pi => (angles::pi(), Interval::ZERO),
            Branch::HalfPi => {
                let b = phi0_branches(r)?;
                (b.plus, b.dplus)
            }
            Branch::ThreeHalfPi => {
                let b = phi0_branches(r)?;
                (b.minus, b.dminus)
            }
        })
    }
}

/// `base + m1·a + m2·b` with interval coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearForm {
    pub base: Interval,
    pub m1: Interval,
    pub m2: Interval,
}

impl LinearForm {
    pub fn eval(&self, m1: Interval, m2: Interval) -> Interval {
        self.base + m1 * self.m1 + m2 * self.m2
    }

    fn hull(&self, o: &LinearForm) -> LinearForm {
        LinearForm { base: self.base.hull(&o.base), m1: self.m1.hull(&o.m1), m2: self.m2.hull(&o.m2) }
    }
}

/// Verified description of one case-2 branch.
///
/// `∂V/∂r(r, φ(r)) ∈ r·radial(m1, m2) − m1/r²` and
/// `d/dr(∂V/∂r(r, φ(r))) ∈ derivative(m1, m2) + 2m1/r³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchEnclosure {
    pub branch: Branch,
    /// Enclosure of `φ(r)`.
    pub phi: Interval,
    /// Enclosure of `δ = (φ − φ0)/m2`.
    pub delta: Interval,
    /// `|δ'|` from [`delta_bounds`].
    pub delta_prime_bound: Interval,
    pub radial: LinearForm,
    pub derivative: LinearForm,
    /// Enclosure of `d/dr(∂V/∂r) − 2m1/r³`; a non-negative lower bound means
    /// the derivative is positive for every `m1 > 0`.
    pub radial_sign: Interval,
}

impl BranchEnclosure {
    pub fn nondegenerate(&self) -> bool {
        self.radial_sign.lo() >= 0.0
    }

    fn hull(&self, o: &BranchEnclosure) -> BranchEnclosure {
        BranchEnclosure {
            branch: self.branch,
            phi: self.phi.hull(&o.phi),
            delta: self.delta.hull(&o.delta),
            delta_prime_bound: self.delta_prime_bound.max(&o.delta_prime_bound),
            radial: self.radial.hull(&o.radial),
            derivative: self.derivative.hull(&o.derivative),
            // the lower bound must hold on every piece
            radial_sign: self.radial_sign.hull(&o.radial_sign),
        }
    }
}

// Case-2 potential pieces, cancellation-free at r = 0. With
// P(r, c) = (1 + 2rc + r²)^{-3/2} and Q = (P − 1)/r:
//   f0 = (1/r²)∂φV0 = sin φ·Q(r, cos φ)
//   G  = (1/r)∂rV0  = −(r + cos φ)·Q(r, cos φ)
//   H  = (1/r)∂rV2  = (r + cos φ)·Q(r, cos φ) − (r + c2)·Q(r, c2), c2 = cos(φ + π/3)
// and ∂V/∂r = m1(r − 1/r²) + r((1 − m1)G + m2·H).

fn cst<T: Scalar>(x: &T, v: f64) -> T {
    x.cst(pt(v))
}

fn q_fn<T: Scalar>(r: &T, c: &T) -> Result<T, JetError> {
    let w = cst(c, 2.0) * c.clone() + r.clone();
    let u = r.clone() * w.clone();
    let v = cst(&u, 1.0) + u.clone();
    let p = v.sqrt()?.recip()?;
    let p3 = p.clone() * p.clone() * p;
    let num = cst(&u, 3.0) + cst(&u, 3.0) * u.clone() + u.clone() * u;
    let den = v.clone() * v.clone() * v * (p3 + cst(c, 1.0));
    Ok(-(w * num * den.recip()?))
}

fn f0_fn<T: Scalar>(r: &T, phi: &T) -> Result<T, JetError> {
    let (s, c) = phi.sin_cos();
    Ok(s * q_fn(r, &c)?)
}

fn f_fn<T: Scalar>(r: &T, phi: &T, mu: Interval) -> Result<T, JetError> {
    let shifted = phi.clone() + phi.cst(angles::pi_over_3());
    Ok(f0_fn(r, phi)? + f0_fn(r, &shifted)? * phi.cst(mu))
}

fn g_fn<T: Scalar>(r: &T, phi: &T) -> Result<T, JetError> {
    let (_, c) = phi.sin_cos();
    Ok(-((r.clone() + c.clone()) * q_fn(r, &c)?))
}

fn h_fn<T: Scalar>(r: &T, phi: &T) -> Result<T, JetError> {
    let (_, c) = phi.sin_cos();
    let (_, c2) = (phi.clone() + phi.cst(angles::pi_over_3())).sin_cos();
    Ok((r.clone() + c.clone()) * q_fn(r, &c)? - (r.clone() + c2.clone()) * q_fn(r, &c2)?)
}

fn v0_fn<T: Scalar>(r: &T, phi: &T) -> Result<T, JetError> {
    let (_, c) = phi.sin_cos();
    let d2 = cst(r, 1.0) + cst(r, 2.0) * r.clone() * c.clone() + r.clone() * r.clone();
    Ok(cst(r, 0.5) * r.clone() * r.clone() + r.clone() * c + d2.sqrt()?.recip()?)
}

fn jet<F>(f: F, r: Interval, phi: Interval, order: usize) -> Result<Jet2, JetError>
where
    F: Fn(&Jet2, &Jet2) -> Result<Jet2, JetError>,
{
    let b = IBox([r, phi]);
    f(&Jet2::lift(&b, 0, order), &Jet2::lift(&b, 1, order))
}

/// Value enclosure over `r × phi`, restricted to the faces along which a
/// partial derivative has constant sign.
fn value_monotone<F>(f: F, r: Interval, phi: Interval) -> Result<Interval, JetError>
where
    F: Fn(&Jet2, &Jet2) -> Result<Jet2, JetError>,
{
    let j = jet(&f, r, phi, 1)?;
    let ends = |x: Interval, d: Interval| {
        if !x.is_point() && !d.contains_zero() {
            vec![x.lo_point(), x.hi_point()]
        } else {
            vec![x]
        }
    };
    let mut out: Option<Interval> = None;
    for ri in ends(r, j.coeff(1, 0)) {
        for pj in ends(phi, j.coeff(0, 1)) {
            let v = jet(&f, ri, pj, 1)?.value();
            out = Some(out.map_or(v, |o| o.hull(&v)));
        }
    }
    let v = out.expect("at least one face");
    Ok(v.intersect(&j.value()).unwrap_or(v))
}

/// One branch over a single `(r, m1, m2)` piece.
fn branch_piece(
    branch: Branch,
    db: &DeltaBounds,
    r: Interval,
    m1: Interval,
    m2: Interval,
) -> SmResult<BranchEnclosure> {
    let m3 = 1.0 - m1 - m2;
    let mu = m2.checked_div(&m3).map_err(|_| SmallMassError::Domain("m3 vanishes"))?;
    let (phi0, dphi0) = branch.phi0(r)?;
    let sym = Interval::new(-1.0, 1.0);

    // φ(r) = φ0(r) + m2·δ with δ = −f0(r, φ + π/3) / (m3·∂φ f0(r, ξ))
    let mut window = phi0 + m2 * sym * db.delta.hi();
    let mut delta = sym * db.delta.hi();
    for _ in 0..4 {
        let xi = window.hull(&phi0);
        let num = f0_fn(&r, &(window + angles::pi_over_3()))?;
        let slope = jet(f0_fn, r, xi, 1)?.coeff(0, 1);
        let est = -(num
            .checked_div(&(m3 * slope))
            .map_err(|_| SmallMassError::BranchCertification("∂φ f0 may vanish on the branch window"))?);
        delta = est.intersect(&delta).unwrap_or(est);
        let next = phi0 + m2 * delta;
        window = next.intersect(&window).unwrap_or(next);
    }
    let xi = window.hull(&phi0);

    // φ'(r) = −∂r f / ∂φ f
    let fj = jet(|a, b| f_fn(a, b, mu), r, window, 1)?;
    let dphi = -(fj
        .coeff(1, 0)
        .checked_div(&fj.coeff(0, 1))
        .map_err(|_| SmallMassError::BranchCertification("∂φ f may vanish on the branch window"))?);

    let hj = jet(h_fn, r, window, 1)?;
    let h_val = value_monotone(h_fn, r, window)?;
    let h_hat = h_val + r * (hj.coeff(1, 0) + hj.coeff(0, 1) * dphi);

    let (radial, derivative) = if branch.on_circle() {
        // G(φ0) = 0 and d/dr(rG) vanishes along φ0, so both contributions
        // of G carry a factor m2.
        let g_phi = jet(g_fn, r, xi, 1)?.coeff(0, 1);
        let radial = LinearForm { base: Interval::ZERO, m1: Interval::ONE, m2: h_val + (1.0 - m1) * delta * g_phi };
        let v0 = jet(v0_fn, r, xi, 3)?;
        let e_phi = v0.coeff(2, 1) * 2.0 + v0.coeff(1, 2) * 2.0 * dphi0;
        let v0_rphi = jet(v0_fn, r, window, 2)?.coeff(1, 1);
        let b = (1.0 - m1) * (delta * e_phi + v0_rphi * sym * db.delta_prime.hi()) + h_hat;
        (radial, LinearForm { base: Interval::ZERO, m1: Interval::ONE, m2: b })
    } else {
        let gj = jet(g_fn, r, window, 1)?;
        let g_val = value_monotone(g_fn, r, window)?;
        let g_hat = g_val + r * (gj.coeff(1, 0) + gj.coeff(0, 1) * dphi);
        (LinearForm { base: g_val, m1: 1.0 - g_val, m2: h_val }, LinearForm { base: g_hat, m1: 1.0 - g_hat, m2: h_hat })
    };
    let radial_sign = derivative.eval(m1, m2);
    Ok(BranchEnclosure {
        branch,
        phi: window,
        delta,
        delta_prime_bound: db.delta_prime,
        radial,
        derivative,
        radial_sign,
    })
}

/// Enclosures along the four branches for `r ∈ r`, masses in `m1 × m2`,
/// with the δ estimates `db` (valid on a superset of the arguments).
pub fn branch_expansions_with(
    db: &DeltaBounds,
    r: Interval,
    m1: Interval,
    m2: Interval,
) -> SmResult<[BranchEnclosure; 4]> {
    if r.lo() < 0.0 || r.hi() > db.radius.hi() {
        return Err(SmallMassError::Domain("radius outside the δ estimates"));
    }
    if m1.lo() < 0.0 || m2.lo() < 0.0 || m1.hi() > MASS_THRESHOLD || m2.hi() > MASS_THRESHOLD {
        return Err(SmallMassError::Domain("branch_expansions needs m1, m2 ⊆ [0, 1e-2]"));
    }
    let rs = if r.is_point() { vec![r] } else { r.subdivide(BRANCH_R_PIECES) };
    let ms = if m2.is_point() { vec![m2] } else { m2.subdivide(BRANCH_M_PIECES) };
    let mut out: Vec<BranchEnclosure> = Vec::with_capacity(4);
    for branch in Branch::ALL {
        let mut acc: Option<BranchEnclosure> = None;
        for &ri in &rs {
            for &mi in &ms {
                let e = branch_piece(branch, db, ri, m1, mi)?;
                acc = Some(acc.map_or(e, |a| a.hull(&e)));
            }
        }
        out.push(acc.expect("non-empty subdivision"));
    }
    Ok([out[0], out[1], out[2], out[3]])
}

/// [`branch_expansions_with`] on `r ⊆ (0, 10⁻³]`, `m1, m2 ⊆ [0, 10⁻²]`.
pub fn branch_expansions(r: Interval, m1: Interval, m2: Interval) -> SmResult<[BranchEnclosure; 4]> {
    if r.hi() > DISK_RADIUS {
        return Err(SmallMassError::Domain("branch_expansions needs r ⊆ (0, 1e-3]"));
    }
    let m = Interval::new(0.0, MASS_THRESHOLD);
    let db = delta_bounds(pt(DISK_RADIUS), m, m, angles::pi() * 0.25)?;
    branch_expansions_with(&db, r, m1, m2)
}

// ---------------------------------------------------------------------------
// Region certificate
// ---------------------------------------------------------------------------

/// Which light primary a certificate is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LightPrimary {
    P1,
    P2,
}

/// Parameter bounds as bit patterns, plus the light primary.
type CacheKey = (u64, u64, u64, u64, LightPrimary);

/// Precomputed constants for the small-mass certificates.
///
/// Construction evaluates every mass-independent bound once; queries only
/// add the eigenvalue gate of case 1 and are cached per parameter box.
#[derive(Debug)]
pub struct SmallMassContext {
    pub radius: f64,
    pub bounds: HigherOrderBounds,
    pub delta: DeltaBounds,
    pub case2: Option<[BranchEnclosure; 4]>,
    cache: Mutex<HashMap<CacheKey, bool>>,
}

impl SmallMassContext {
    pub fn new(radius: f64) -> SmResult<Self> {
        let bounds = HigherOrderBounds::compute(radius)?;
        let m = Interval::new(0.0, MASS_THRESHOLD);
        let delta = delta_bounds_with(&bounds.d, pt(radius), m, m, angles::pi() * 0.25)?;
        let case2 = branch_expansions_with(&delta, Interval::new(0.0, radius), m, m)
            .ok()
            .filter(|b| b.iter().all(BranchEnclosure::nondegenerate));
        Ok(SmallMassContext { radius, bounds, delta, case2, cache: Mutex::new(HashMap::new()) })
    }

    fn case1(&self, light: Interval, other: Interval) -> bool {
        let m3 = 1.0 - light - other;
        let Ok(eb) = eigen_bounds(other, Interval::new(m3.lo().max(0.0), m3.hi().min(1.0))) else {
            return false;
        };
        radial_nondegeneracy_case1(&eb, self.bounds.c1, self.bounds.c2, pt(self.radius)).is_ok_and(|c| c.certified)
    }

    /// True when no equilibrium within the disk around `which` bifurcates
    /// for any parameter in `pr`.
    pub fn certify(&self, pr: &ParamRect, which: LightPrimary) -> bool {
        let key = (pr.s.lo().to_bits(), pr.s.hi().to_bits(), pr.t.lo().to_bits(), pr.t.hi().to_bits(), which);
        if let Some(&v) = self.cache.lock().unwrap().get(&key) {
            return v;
        }
        let m = pr.masses();
        let (light, other) = match which {
            LightPrimary::P1 => (m.m1, m.m2),
            LightPrimary::P2 => (m.m2, m.m1),
        };
        let thr = MASS_THRESHOLD;
        let v = if light.lo() < 0.0 || light.hi() > thr || other.lo() < 0.0 || !light.is_finite() {
            false
        } else if other.hi() <= thr {
            self.case2.is_some()
        } else if other.lo() >= thr {
            self.case1(light, other)
        } else {
            self.case2.is_some() && self.case1(light, Interval::new(thr, other.hi()))
        };
        self.cache.lock().unwrap().insert(key, v);
        v
    }
}

/// The shared context for the standard disk radius.
pub fn default_context() -> &'static SmallMassContext {
    static CTX: OnceLock<SmallMassContext> = OnceLock::new();
    CTX.get_or_init(|| SmallMassContext::new(DISK_RADIUS).expect("standard small-mass constants"))
}

pub fn certify_small_mass_region(pr: &ParamRect, which: LightPrimary) -> bool {
    default_context().certify(pr, which)
}

// ---------------------------------------------------------------------------
// Audit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    /// The computed value must not exceed 1.05× the reference.
    Upper,
    /// The computed value must be at least the reference / 1.05.
    Lower,
    /// Admissible radius: within 5% of the reference.
    Radius,
}

/// One reproduced constant beside its published reference value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditRow {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub kind: BoundKind,
}

impl AuditRow {
    pub fn ok(&self) -> bool {
        match self.kind {
            BoundKind::Upper => self.computed >= 0.0 && self.computed <= 1.05 * self.reference,
            BoundKind::Lower => self.computed * 1.05 >= self.reference,
            BoundKind::Radius => (self.computed / self.reference - 1.0).abs() <= 0.05,
        }
    }
}

/// Every constant of this module beside its reference value.
pub fn constants_audit() -> SmResult<Vec<AuditRow>> {
    let ctx = default_context();
    let mut rows = Vec::new();
    let mut push = |name: &str, computed: f64, reference: f64, kind: BoundKind| {
        rows.push(AuditRow { name: name.to_string(), computed, reference, kind });
    };
    let b = &ctx.bounds;
    push("C1", b.c1.hi(), 9.68850, BoundKind::Upper);
    push("C2", b.c2.hi(), 19.3770, BoundKind::Upper);
    for (k, reference) in [10.0662, 16.665, 45.4482, 98.4105, 173.801].iter().enumerate() {
        push(&format!("D{}", k + 1), b.d[k].hi(), *reference, BoundKind::Upper);
    }
    let eb = eigen_bounds(Interval::new(MASS_THRESHOLD, 1.0), Interval::new(MASS_THRESHOLD, 1.0))?;
    push("lambda2 lower", eb.lambda2.lo(), 0.02167, BoundKind::Lower);
    push("lambda2 upper", eb.lambda2.hi(), 0.87695, BoundKind::Upper);
    push("lambda1 lower", eb.lambda1.lo(), 1.62287, BoundKind::Lower);
    push("lambda1 upper", eb.lambda1.hi(), 2.97843, BoundKind::Upper);
    push("gap upper", eb.gap.hi(), 2.95643, BoundKind::Upper);
    let generic = EigenBounds { lambda1: pt(1.62), lambda2: pt(0.02167), gap: pt(0.75) };
    let c1 = radial_nondegeneracy_case1(&generic, b.c1, b.c2, pt(DISK_RADIUS))?;
    push("sector radius (2RC1/gap < 1)", c1.sector.sector_radius.lo(), 0.03952, BoundKind::Radius);
    push("main radius condition", c1.sector.main_radius.lo(), 0.02193, BoundKind::Radius);
    push("|delta| case 1", c1.sector.delta_bound.hi(), 0.0259, BoundKind::Upper);
    push("|phi'| case 1", c1.sector.phi_prime_bound.hi(), 67.2174, BoundKind::Upper);
    push("|L|", c1.l_bound.hi(), 9.68851, BoundKind::Upper);
    push("|T|", c1.t_bound.hi(), 21.33076, BoundKind::Upper);
    let p0 = phi0_branches(Interval::new(0.0, PHI0_MAX_RADIUS))?;
    push("phi0 quartic remainder", p0.remainder.hi(), 0.0011841572, BoundKind::Upper);
    push("phi0' cubic remainder", p0.derivative_remainder.hi(), 0.04366287, BoundKind::Upper);
    push("|delta| case 2", ctx.delta.delta.hi(), 0.724802, BoundKind::Upper);
    push("|delta'|", ctx.delta.delta_prime.hi(), 8.56695, BoundKind::Upper);
    push("|Delta'|", ctx.delta.big_delta_prime.hi(), 0.0856695, BoundKind::Upper);
    Ok(rows)
}

/// Plain-text rendering of [`constants_audit`].
pub fn audit_table(rows: &[AuditRow]) -> String {
    let mut s = format!("{:<32} {:>16} {:>16}  {}\n", "constant", "computed", "reference", "status");
    for row in rows {
        s += &format!(
            "{:<32} {:>16.9} {:>16.9}  {}\n",
            row.name,
            row.computed,
            row.reference,
            if row.ok() { "ok" } else { "MISMATCH" }
        );
    }
    s
}
