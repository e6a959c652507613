//! Closed floating-point intervals with outward rounding.
//!
//! Every operation returns an interval containing the exact real image of
//! its operands. Directed rounding is realized without touching the FPU
//! rounding mode: the round-to-nearest result is computed together with an
//! error-free transformation (TwoSum, Dekker TwoProduct) whose sign tells
//! whether the exact value lies above or below it, and the endpoint is
//! nudged to the neighbouring float only when needed. Results that are
//! exact stay exact, so `[1,2] + [2,3]` is `[3,5]`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum IntervalError {
    #[error("possible singularity: divisor {0} contains zero")]
    Singularity(Interval),
    #[error("domain error in {op}: argument {arg}")]
    Domain { op: &'static str, arg: Interval },
}

pub type IResult<T> = Result<T, IntervalError>;

// ---------------------------------------------------------------------------
// Directed rounding primitives
// ---------------------------------------------------------------------------

/// Below this magnitude products and quotients may be inexact in a way the
/// error-free transforms cannot see (gradual underflow).
const TINY: f64 = 1.0e-280;
/// Above this magnitude Dekker splitting may overflow.
const HUGE: f64 = 1.0e290;

#[inline]
fn down_if(v: f64, err_negative: bool) -> f64 {
    if err_negative {
        v.next_down()
    } else {
        v
    }
}

#[inline]
fn up_if(v: f64, err_positive: bool) -> f64 {
    if err_positive {
        v.next_up()
    } else {
        v
    }
}

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let c = 134_217_729.0 * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

/// Exact error of `p = fl(a*b)`, i.e. `a*b - p`, valid when no over/underflow.
#[inline]
fn two_prod_err(a: f64, b: f64, p: f64) -> f64 {
    if cfg!(target_feature = "fma") {
        a.mul_add(b, -p)
    } else {
        let (ah, al) = split(a);
        let (bh, bl) = split(b);
        ((ah * bh - p) + ah * bl + al * bh) + al * bl
    }
}

#[inline]
fn safe_for_prod(a: f64, b: f64, p: f64) -> bool {
    p.is_finite() && p.abs() > TINY && a.abs() < HUGE && b.abs() < HUGE
}

#[inline]
fn nonfinite_down(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else if v == f64::INFINITY {
        f64::MAX
    } else {
        v
    }
}

#[inline]
fn nonfinite_up(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else if v == f64::NEG_INFINITY {
        f64::MIN
    } else {
        v
    }
}

#[inline]
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if a.is_finite() && b.is_finite() {
            nonfinite_down(s)
        } else if s.is_nan() {
            f64::NEG_INFINITY
        } else {
            s
        };
    }
    down_if(s, two_sum_err(a, b, s) < 0.0)
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if a.is_finite() && b.is_finite() {
            nonfinite_up(s)
        } else if s.is_nan() {
            f64::INFINITY
        } else {
            s
        };
    }
    up_if(s, two_sum_err(a, b, s) > 0.0)
}

#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.is_nan() {
        return f64::NEG_INFINITY;
    }
    if !safe_for_prod(a, b, p) {
        if p.is_infinite() {
            return if a.is_finite() && b.is_finite() && p > 0.0 { f64::MAX } else { p };
        }
        return p.next_down();
    }
    down_if(p, two_prod_err(a, b, p) < 0.0)
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.is_nan() {
        return f64::INFINITY;
    }
    if !safe_for_prod(a, b, p) {
        if p.is_infinite() {
            return if a.is_finite() && b.is_finite() && p < 0.0 { f64::MIN } else { p };
        }
        return p.next_up();
    }
    up_if(p, two_prod_err(a, b, p) > 0.0)
}

/// Sign of `a/b - q` as a float (only the sign is meaningful).
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> f64 {
    // q*b = p + e exactly; a - q*b = (a - p) - e, with a - p exact (Sterbenz).
    let p = q * b;
    let e = two_prod_err(q, b, p);
    let r = (a - p) - e;
    if b > 0.0 {
        r
    } else {
        -r
    }
}

#[inline]
fn safe_for_div(a: f64, b: f64, q: f64) -> bool {
    q.is_finite() && q.abs() > TINY && a.abs() > TINY && a.abs() < HUGE && b.abs() < HUGE && b.abs() > TINY
}

#[inline]
pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 && b != 0.0 {
        return 0.0;
    }
    let q = a / b;
    if q.is_nan() {
        return f64::NEG_INFINITY;
    }
    if !safe_for_div(a, b, q) {
        if q.is_infinite() {
            return if q > 0.0 && a.is_finite() && b != 0.0 { f64::MAX } else { q };
        }
        return q.next_down();
    }
    down_if(q, div_residual_sign(a, b, q) < 0.0)
}

#[inline]
pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 && b != 0.0 {
        return 0.0;
    }
    let q = a / b;
    if q.is_nan() {
        return f64::INFINITY;
    }
    if !safe_for_div(a, b, q) {
        if q.is_infinite() {
            return if q < 0.0 && a.is_finite() && b != 0.0 { f64::MIN } else { q };
        }
        return q.next_up();
    }
    up_if(q, div_residual_sign(a, b, q) > 0.0)
}

#[inline]
fn sqrt_residual(x: f64, s: f64) -> f64 {
    let p = s * s;
    let e = two_prod_err(s, s, p);
    (x - p) - e
}

#[inline]
pub(crate) fn sqrt_down(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let s = x.sqrt();
    if !(s.is_finite() && x > TINY && x < HUGE) {
        return s.next_down().max(0.0);
    }
    down_if(s, sqrt_residual(x, s) < 0.0)
}

#[inline]
pub(crate) fn sqrt_up(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let s = x.sqrt();
    if !(s.is_finite() && x > TINY && x < HUGE) {
        return s.next_up();
    }
    up_if(s, sqrt_residual(x, s) > 0.0)
}

/// Libm transcendentals are faithful but not correctly rounded; widen by two ulps.
#[inline]
fn widen_down(v: f64) -> f64 {
    v.next_down().next_down()
}

#[inline]
fn widen_up(v: f64) -> f64 {
    v.next_up().next_up()
}

// ---------------------------------------------------------------------------
// Interval
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:+e}, {:+e}]", self.lo, self.hi)
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::ZERO
    }
}

/// Enclosure of π: `PI` is the nearest double (below π), its successor is above.
pub const PI_LO: f64 = std::f64::consts::PI;
pub const PI_HI: f64 = 3.141_592_653_589_793_6;

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    pub const PI: Interval = Interval { lo: PI_LO, hi: PI_HI };

    /// Builds `[lo, hi]`. Panics if `lo > hi` or either endpoint is NaN.
    #[inline]
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// Like [`Interval::new`] but returns `None` instead of panicking.
    #[inline]
    pub fn try_new(lo: f64, hi: f64) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    #[inline]
    pub fn point(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN point interval");
        Interval { lo: x, hi: x }
    }

    /// Interval hull of two floats in either order.
    #[inline]
    pub fn spanning(a: f64, b: f64) -> Self {
        Interval { lo: a.min(b), hi: a.max(b) }
    }

    /// Tight enclosure of the rational `num/den`.
    pub fn ratio(num: f64, den: f64) -> Self {
        assert!(den != 0.0);
        Interval::new(div_down(num, den), div_up(num, den))
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        if !self.lo.is_finite() || !self.hi.is_finite() {
            if self.lo.is_finite() {
                return f64::MAX;
            }
            if self.hi.is_finite() {
                return f64::MIN;
            }
            return 0.0;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Width rounded upward.
    #[inline]
    pub fn width(&self) -> f64 {
        add_up(self.hi, -self.lo)
    }

    #[inline]
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        add_up(self.hi, -m).max(add_up(m, -self.lo))
    }

    /// Largest absolute value.
    #[inline]
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    #[inline]
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    #[inline]
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    #[inline]
    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Strict containment in the interior of `other`.
    #[inline]
    pub fn interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    #[inline]
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    #[inline]
    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.hi < 0.0
    }

    /// `Some(1)` if certainly positive, `Some(-1)` if certainly negative.
    #[inline]
    pub fn sign(&self) -> Option<i8> {
        if self.lo > 0.0 {
            Some(1)
        } else if self.hi < 0.0 {
            Some(-1)
        } else {
            None
        }
    }

    #[inline]
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    #[inline]
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        Interval::try_new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    #[inline]
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    #[inline]
    pub fn hull_point(&self, x: f64) -> Interval {
        Interval { lo: self.lo.min(x), hi: self.hi.max(x) }
    }

    /// Splits at the midpoint; the halves share the midpoint.
    #[inline]
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }

    /// `n` consecutive pieces covering `self` exactly.
    pub fn subdivide(&self, n: usize) -> Vec<Interval> {
        assert!(n > 0);
        let w = self.hi - self.lo;
        let mut cuts = Vec::with_capacity(n + 1);
        cuts.push(self.lo);
        for k in 1..n {
            cuts.push((self.lo + w * (k as f64) / (n as f64)).clamp(self.lo, self.hi));
        }
        cuts.push(self.hi);
        cuts.windows(2).map(|c| Interval::new(c[0], c[1].max(c[0]))).collect()
    }

    /// Enlarges by `eps` (absolute) on both sides.
    pub fn inflate(&self, eps: f64) -> Interval {
        Interval { lo: add_down(self.lo, -eps), hi: add_up(self.hi, eps) }
    }

    pub fn lower_half(&self) -> Interval {
        self.bisect().0
    }

    pub fn upper_half(&self) -> Interval {
        self.bisect().1
    }

    /// Interval at the lower endpoint.
    #[inline]
    pub fn lo_point(&self) -> Interval {
        Interval::point(self.lo)
    }

    #[inline]
    pub fn hi_point(&self) -> Interval {
        Interval::point(self.hi)
    }

    #[inline]
    pub fn mid_point(&self) -> Interval {
        Interval::point(self.mid())
    }

    #[inline]
    pub fn scale(&self, c: f64) -> Interval {
        *self * Interval::point(c)
    }

    // -- division --------------------------------------------------------

    pub fn recip(&self) -> IResult<Interval> {
        if self.contains_zero() {
            return Err(IntervalError::Singularity(*self));
        }
        Ok(Interval { lo: div_down(1.0, self.hi), hi: div_up(1.0, self.lo) })
    }

    pub fn checked_div(&self, other: &Interval) -> IResult<Interval> {
        if other.contains_zero() {
            return Err(IntervalError::Singularity(*other));
        }
        let (a, b) = (self, other);
        let (lo, hi) = if b.lo > 0.0 {
            if a.lo >= 0.0 {
                (div_down(a.lo, b.hi), div_up(a.hi, b.lo))
            } else if a.hi <= 0.0 {
                (div_down(a.lo, b.lo), div_up(a.hi, b.hi))
            } else {
                (div_down(a.lo, b.lo), div_up(a.hi, b.lo))
            }
        } else if a.lo >= 0.0 {
            (div_down(a.hi, b.hi), div_up(a.lo, b.lo))
        } else if a.hi <= 0.0 {
            (div_down(a.hi, b.lo), div_up(a.lo, b.hi))
        } else {
            (div_down(a.hi, b.hi), div_up(a.lo, b.hi))
        };
        Ok(Interval { lo, hi })
    }

    // -- elementary functions ------------------------------------------------

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Interval { lo: 0.0, hi: self.mag() }
        }
    }

    pub fn sqr(&self) -> Interval {
        self.powi(2)
    }

    /// Integer power with even/odd case analysis.
    pub fn powi(&self, n: i32) -> Interval {
        if n == 0 {
            return Interval::ONE;
        }
        if n < 0 {
            return match self.powi(-n).recip() {
                Ok(v) => v,
                Err(_) => Interval::ENTIRE,
            };
        }
        let n = n as u32;
        if n.is_multiple_of(2) {
            let a = self.abs();
            Interval { lo: pow_down(a.lo, n), hi: pow_up(a.hi, n) }
        } else {
            let lo = if self.lo >= 0.0 { pow_down(self.lo, n) } else { -pow_up(-self.lo, n) };
            let hi = if self.hi >= 0.0 { pow_up(self.hi, n) } else { -pow_down(-self.hi, n) };
            Interval { lo, hi }
        }
    }

    /// Checked negative integer power (`n > 0` gives `self^-n`).
    pub fn powi_neg(&self, n: u32) -> IResult<Interval> {
        self.recip().map(|r| r.powi(n as i32))
    }

    pub fn sqrt(&self) -> IResult<Interval> {
        if self.hi < 0.0 {
            return Err(IntervalError::Domain { op: "sqrt", arg: *self });
        }
        Ok(Interval { lo: sqrt_down(self.lo.max(0.0)), hi: sqrt_up(self.hi) })
    }

    pub fn sin(&self) -> Interval {
        // maxima at π/2 + 2kπ, minima at -π/2 + 2kπ
        trig(self, f64::sin, 0.5, -0.5)
    }

    pub fn cos(&self) -> Interval {
        // maxima at 2kπ, minima at π + 2kπ
        trig(self, f64::cos, 0.0, 1.0)
    }

    pub fn sin_cos(&self) -> (Interval, Interval) {
        (self.sin(), self.cos())
    }

    pub fn asin(&self) -> IResult<Interval> {
        if self.lo < -1.0 || self.hi > 1.0 {
            return Err(IntervalError::Domain { op: "asin", arg: *self });
        }
        let half_pi_hi = PI_HI / 2.0;
        let lo = if self.lo == 0.0 { 0.0 } else { widen_down(self.lo.asin()).max(-half_pi_hi) };
        let hi = if self.hi == 0.0 { 0.0 } else { widen_up(self.hi.asin()).min(half_pi_hi) };
        Ok(Interval { lo, hi })
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.min(other.hi) }
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }
}

fn pow_up(x: f64, n: u32) -> f64 {
    debug_assert!(x >= 0.0);
    let mut base = x;
    let mut acc = 1.0;
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = mul_up(acc, base);
        }
        k >>= 1;
        if k > 0 {
            base = mul_up(base, base);
        }
    }
    acc
}

fn pow_down(x: f64, n: u32) -> f64 {
    debug_assert!(x >= 0.0);
    let mut base = x;
    let mut acc = 1.0;
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = mul_down(acc, base);
        }
        k >>= 1;
        if k > 0 {
            base = mul_down(base, base);
        }
    }
    acc
}

/// Range of sin or cos over `x`. Extrema sit at `(max_off + 2k)·π` and
/// `(min_off + 2k)·π`; a critical point is assumed present whenever the
/// enclosure of the index range might contain an integer.
fn trig(x: &Interval, f: fn(f64) -> f64, max_off: f64, min_off: f64) -> Interval {
    if !x.is_finite() || x.width() >= 2.0 * PI_LO {
        return Interval::new(-1.0, 1.0);
    }
    let fa = f(x.lo);
    let fb = f(x.hi);
    let mut lo = widen_down(fa.min(fb));
    let mut hi = widen_up(fa.max(fb));
    let two_pi = Interval::PI.scale(2.0);
    let index = |off: f64| -> (f64, f64) {
        let shift = Interval::PI.scale(off);
        let a = (x.lo_point() - shift).checked_div(&two_pi).expect("2π is nonzero");
        let b = (x.hi_point() - shift).checked_div(&two_pi).expect("2π is nonzero");
        (a.lo, b.hi)
    };
    let (a, b) = index(max_off);
    if a.ceil() <= b.floor() {
        hi = 1.0;
    }
    let (a, b) = index(min_off);
    if a.ceil() <= b.floor() {
        lo = -1.0;
    }
    Interval { lo: lo.max(-1.0), hi: hi.min(1.0) }
}

// ---------------------------------------------------------------------------
// Operator impls
// ---------------------------------------------------------------------------

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, o: Interval) -> Interval {
        Interval { lo: add_down(self.lo, o.lo), hi: add_up(self.hi, o.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, o: Interval) -> Interval {
        Interval { lo: add_down(self.lo, -o.hi), hi: add_up(self.hi, -o.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, o: Interval) -> Interval {
        let (a, b) = (self, o);
        let (lo, hi) = if a.lo >= 0.0 {
            if b.lo >= 0.0 {
                (mul_down(a.lo, b.lo), mul_up(a.hi, b.hi))
            } else if b.hi <= 0.0 {
                (mul_down(a.hi, b.lo), mul_up(a.lo, b.hi))
            } else {
                (mul_down(a.hi, b.lo), mul_up(a.hi, b.hi))
            }
        } else if a.hi <= 0.0 {
            if b.lo >= 0.0 {
                (mul_down(a.lo, b.hi), mul_up(a.hi, b.lo))
            } else if b.hi <= 0.0 {
                (mul_down(a.hi, b.hi), mul_up(a.lo, b.lo))
            } else {
                (mul_down(a.lo, b.hi), mul_up(a.lo, b.lo))
            }
        } else if b.lo >= 0.0 {
            (mul_down(a.lo, b.hi), mul_up(a.hi, b.hi))
        } else if b.hi <= 0.0 {
            (mul_down(a.hi, b.lo), mul_up(a.lo, b.lo))
        } else {
            (mul_down(a.lo, b.hi).min(mul_down(a.hi, b.lo)), mul_up(a.lo, b.lo).max(mul_up(a.hi, b.hi)))
        };
        Interval { lo, hi }
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, o: f64) -> Interval {
        self + Interval::point(o)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, o: f64) -> Interval {
        self - Interval::point(o)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, o: f64) -> Interval {
        self * Interval::point(o)
    }
}

impl Add<Interval> for f64 {
    type Output = Interval;
    #[inline]
    fn add(self, o: Interval) -> Interval {
        Interval::point(self) + o
    }
}

impl Sub<Interval> for f64 {
    type Output = Interval;
    #[inline]
    fn sub(self, o: Interval) -> Interval {
        Interval::point(self) - o
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    #[inline]
    fn mul(self, o: Interval) -> Interval {
        Interval::point(self) * o
    }
}

impl AddAssign for Interval {
    fn add_assign(&mut self, o: Interval) {
        *self = *self + o;
    }
}

impl SubAssign for Interval {
    fn sub_assign(&mut self, o: Interval) {
        *self = *self - o;
    }
}

impl MulAssign for Interval {
    fn mul_assign(&mut self, o: Interval) {
        *self = *self * o;
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

/// Angle constants derived from the π enclosure by interval division.
pub mod angles {
    use super::Interval;

    pub fn pi() -> Interval {
        Interval::PI
    }

    pub fn half_pi() -> Interval {
        Interval::PI.checked_div(&Interval::point(2.0)).unwrap()
    }

    pub fn pi_over_3() -> Interval {
        Interval::PI.checked_div(&Interval::point(3.0)).unwrap()
    }

    pub fn pi_over_6() -> Interval {
        Interval::PI.checked_div(&Interval::point(6.0)).unwrap()
    }

    pub fn two_pi() -> Interval {
        Interval::PI * 2.0
    }
}

// ---------------------------------------------------------------------------
// Boxes
// ---------------------------------------------------------------------------

/// An axis-aligned box: a fixed-length product of intervals.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct IBox<const N: usize>(pub [Interval; N]);

/// Phase-space box `(r, φ)`.
pub type PBox = IBox<2>;

impl<const N: usize> IBox<N> {
    pub fn new(c: [Interval; N]) -> Self {
        IBox(c)
    }

    pub fn midpoint(&self) -> [f64; N] {
        self.0.map(|c| c.mid())
    }

    /// Degenerate box at the midpoint.
    pub fn mid_box(&self) -> Self {
        IBox(self.0.map(|c| c.mid_point()))
    }

    pub fn widths(&self) -> [f64; N] {
        self.0.map(|c| c.width())
    }

    /// Largest component width.
    pub fn width(&self) -> f64 {
        self.widths().iter().cloned().fold(0.0, f64::max)
    }

    pub fn bisect(&self, axis: usize) -> (Self, Self) {
        let (a, b) = self.0[axis].bisect();
        let mut l = *self;
        let mut r = *self;
        l.0[axis] = a;
        r.0[axis] = b;
        (l, r)
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let mut out = *self;
        for i in 0..N {
            out.0[i] = self.0[i].intersect(&other.0[i])?;
        }
        Some(out)
    }

    pub fn hull(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..N {
            out.0[i] = self.0[i].hull(&other.0[i]);
        }
        out
    }

    pub fn contains_in_interior(&self, inner: &Self) -> bool {
        (0..N).all(|i| inner.0[i].interior_of(&self.0[i]))
    }

    pub fn contains_box(&self, inner: &Self) -> bool {
        (0..N).all(|i| inner.0[i].subset_of(&self.0[i]))
    }

    pub fn contains_point(&self, p: &[f64; N]) -> bool {
        (0..N).all(|i| self.0[i].contains(p[i]))
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        (0..N).all(|i| self.0[i].overlaps(&other.0[i]))
    }

    /// Boxes that share at least a boundary point (edge or corner adjacency).
    pub fn touches(&self, other: &Self) -> bool {
        self.overlaps(other)
    }

    pub fn inflate(&self, eps: f64) -> Self {
        IBox(self.0.map(|c| c.inflate(eps)))
    }
}

impl<const N: usize> std::ops::Index<usize> for IBox<N> {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl<const N: usize> std::ops::IndexMut<usize> for IBox<N> {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.0[i]
    }
}

impl PBox {
    pub fn from_bounds(r: (f64, f64), phi: (f64, f64)) -> Self {
        IBox([Interval::new(r.0, r.1), Interval::new(phi.0, phi.1)])
    }

    #[inline]
    pub fn r(&self) -> Interval {
        self.0[0]
    }

    #[inline]
    pub fn phi(&self) -> Interval {
        self.0[1]
    }
}

impl<const N: usize> Serialize for IBox<N> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(N))?;
        for c in &self.0 {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

impl<'de, const N: usize> Deserialize<'de> for IBox<N> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<Interval> = Vec::deserialize(d)?;
        let arr: [Interval; N] = v
            .try_into()
            .map_err(|v: Vec<Interval>| serde::de::Error::invalid_length(v.len(), &"box of fixed dimension"))?;
        Ok(IBox(arr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b)
    }

    #[test]
    fn exact_endpoint_addition() {
        assert_eq!(iv(1.0, 2.0) + iv(2.0, 3.0), iv(3.0, 5.0));
    }

    #[test]
    fn sign_cases_in_multiplication() {
        assert_eq!(iv(-1.0, 2.0) * iv(3.0, 4.0), iv(-4.0, 8.0));
        assert_eq!(iv(-1.0, 2.0) * iv(-3.0, 4.0), iv(-6.0, 8.0));
        assert_eq!(iv(-2.0, -1.0) * iv(-3.0, 4.0), iv(-8.0, 6.0));
    }

    #[test]
    fn one_third_is_two_ulp_tight() {
        let q = Interval::ONE.checked_div(&Interval::point(3.0)).unwrap();
        assert!(q.lo() < q.hi());
        assert_eq!(q.lo().next_up(), q.hi());
        // 1/3 = 0x3FD5555555555555 rounded down; 3*lo < 1 < 3*hi exactly
        assert!(mul_up(q.lo(), 3.0) <= 1.0 || (q.lo() * 3.0) < 1.0);
        let x = 1.0f64 / 3.0;
        assert!(q.contains(x));
    }

    #[test]
    fn division_by_zero_is_singular() {
        let e = Interval::ONE.checked_div(&iv(-1.0, 1.0)).unwrap_err();
        assert!(matches!(e, IntervalError::Singularity(_)));
        assert!(e.to_string().contains("possible singularity"));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(iv(4.0, 9.0).sqrt().unwrap(), iv(2.0, 3.0));
        let two = Interval::point(2.0).sqrt().unwrap();
        assert!(two.lo() < std::f64::consts::SQRT_2 || two.hi() > std::f64::consts::SQRT_2 || two.is_point());
        assert!(two.sqr().contains(2.0));
        assert!(matches!(iv(-2.0, -1.0).sqrt(), Err(IntervalError::Domain { op: "sqrt", .. })));
        assert_eq!(iv(-1.0, 4.0).sqrt().unwrap(), iv(0.0, 2.0));
    }

    #[test]
    fn sin_on_first_quadrant() {
        let s = iv(0.0, std::f64::consts::FRAC_PI_2).sin();
        assert!(s.lo() <= 0.0 && s.lo() > -1e-15);
        assert_eq!(s.hi(), 1.0);
    }

    #[test]
    fn cos_full_period() {
        assert_eq!(iv(0.0, 2.0 * PI_HI).cos(), iv(-1.0, 1.0));
        assert_eq!(iv(-0.1, 0.1).cos().hi(), 1.0);
        let c = iv(3.0, 3.3).cos();
        assert_eq!(c.lo(), -1.0);
    }

    #[test]
    fn sin_brackets_extrema_conservatively() {
        let s = iv(-PI_HI / 2.0, -1.0).sin();
        assert_eq!(s.lo(), -1.0);
        let s = iv(0.1, 0.2).sin();
        assert!(s.contains(0.1f64.sin()) && s.contains(0.2f64.sin()));
        assert!(s.width() < 1e-14 + 0.2f64.sin() - 0.1f64.sin());
    }

    #[test]
    fn asin_domain() {
        assert!(iv(0.5, 1.5).asin().is_err());
        let a = iv(-1.0, 1.0).asin().unwrap();
        assert!(a.contains(std::f64::consts::FRAC_PI_2) && a.contains(-std::f64::consts::FRAC_PI_2));
    }

    #[test]
    fn even_powers_use_absolute_value() {
        assert_eq!(iv(-1.0, 2.0).powi(2), iv(0.0, 4.0));
        assert_eq!(iv(-2.0, 1.0).powi(3), iv(-8.0, 1.0));
        assert_eq!(iv(-3.0, -2.0).powi(2), iv(4.0, 9.0));
        let inv = iv(2.0, 4.0).powi(-2);
        assert!(inv.contains(0.25) && inv.contains(1.0 / 16.0));
    }

    #[test]
    fn pi_enclosure_and_derived_angles() {
        assert!(Interval::PI.lo() < Interval::PI.hi());
        assert_eq!(PI_HI, PI_LO.next_up());
        let p6 = angles::pi_over_6();
        assert!(p6.contains(std::f64::consts::FRAC_PI_6));
        assert!(p6.width() <= 2.0 * f64::EPSILON);
        let h = angles::half_pi();
        assert!(h.contains(std::f64::consts::FRAC_PI_2));
    }

    #[test]
    fn box_bisect_intersect_hull() {
        let b = PBox::from_bounds((0.0, 2.0), (0.0, 1.0));
        let (l, r) = b.bisect(0);
        assert_eq!(l, PBox::from_bounds((0.0, 1.0), (0.0, 1.0)));
        assert_eq!(r, PBox::from_bounds((1.0, 2.0), (0.0, 1.0)));
        assert_eq!(l.hull(&r), b);
        assert_eq!(iv(0.0, 1.0).intersect(&iv(2.0, 3.0)), None);
        assert_eq!(iv(0.0, 1.0).hull(&iv(2.0, 3.0)), iv(0.0, 3.0));
        let inner = PBox::from_bounds((0.5, 1.0), (0.1, 0.9));
        assert!(!b.contains_in_interior(&inner) || inner.r().lo() > 0.0);
        assert!(!b.contains_in_interior(&PBox::from_bounds((0.0, 1.0), (0.1, 0.9))));
    }

    #[test]
    fn ratio_encloses_rational() {
        let t = Interval::ratio(1.0, 3.0);
        assert!(t.lo() < t.hi());
        assert!(t.contains(1.0 / 3.0));
    }

    #[test]
    fn tiny_and_huge_products_are_nudged() {
        let t = Interval::point(1e-200) * Interval::point(1e-200);
        assert!(t.lo() <= 0.0 || t.lo() < 1e-400_f64.max(t.hi()));
        assert!(t.hi() > 0.0);
        let h = Interval::point(1e300) * Interval::point(1e10);
        assert!(h.hi().is_infinite() && h.lo() == f64::MAX);
    }
}
