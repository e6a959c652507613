//! Truncated Taylor expansions with interval coefficients.
//!
//! A [`Jet2`] expanded over a box holds, for each multi-index `(i, j)`, an
//! interval containing the Taylor coefficient of the function at *every*
//! point of the box. Arithmetic follows the usual truncated-series
//! recurrences, so composed expressions keep that property.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::interval::{IBox, Interval, IntervalError};

pub const MAX_ORDER: usize = 6;
const N2: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;
pub const MAX_ORDER1: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JetError {
    #[error("jet singularity: leading coefficient {0} is not invertible")]
    Singularity(Interval),
    #[error("jet domain error: leading coefficient {0}")]
    Domain(Interval),
    #[error("reduction unavailable: solved-for derivative {0} may vanish")]
    ReductionUnavailable(Interval),
}

impl From<IntervalError> for JetError {
    fn from(e: IntervalError) -> Self {
        match e {
            IntervalError::Singularity(i) => JetError::Singularity(i),
            IntervalError::Domain { arg, .. } => JetError::Domain(arg),
        }
    }
}

#[inline]
const fn idx(i: usize, j: usize) -> usize {
    let k = i + j;
    k * (k + 1) / 2 + j
}

const fn factorial(n: usize) -> f64 {
    let mut f = 1.0;
    let mut k = 2;
    while k <= n {
        f *= k as f64;
        k += 1;
    }
    f
}

/// Numeric types the potential can be evaluated in: plain floats, intervals
/// and jets share one formula.
pub trait Scalar: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    /// A constant of the same shape as `self`.
    fn cst(&self, c: Interval) -> Self;
    fn recip(&self) -> Result<Self, JetError>;
    fn sqrt(&self) -> Result<Self, JetError>;
    fn sin_cos(&self) -> (Self, Self);
    fn sqr(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for f64 {
    fn cst(&self, c: Interval) -> Self {
        c.mid()
    }
    fn recip(&self) -> Result<Self, JetError> {
        if *self == 0.0 {
            Err(JetError::Singularity(Interval::ZERO))
        } else {
            Ok(1.0 / self)
        }
    }
    fn sqrt(&self) -> Result<Self, JetError> {
        if *self < 0.0 {
            Err(JetError::Domain(Interval::point(*self)))
        } else {
            Ok(f64::sqrt(*self))
        }
    }
    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }
}

impl Scalar for Interval {
    fn cst(&self, c: Interval) -> Self {
        c
    }
    fn recip(&self) -> Result<Self, JetError> {
        Ok(Interval::recip(self)?)
    }
    fn sqrt(&self) -> Result<Self, JetError> {
        Ok(Interval::sqrt(self)?)
    }
    fn sin_cos(&self) -> (Self, Self) {
        Interval::sin_cos(self)
    }
    fn sqr(&self) -> Self {
        self.powi(2)
    }
}

// ---------------------------------------------------------------------------
// Jet2
// ---------------------------------------------------------------------------

/// Bivariate truncated Taylor expansion in `(Δx, Δy)`.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Jet2 {
    order: usize,
    c: [Interval; N2],
}

impl Jet2 {
    pub fn constant(order: usize, v: Interval) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut c = [Interval::ZERO; N2];
        c[0] = v;
        Jet2 { order, c }
    }

    /// Jet of the coordinate function `var` (0 for x, 1 for y) over `b`.
    pub fn lift(b: &IBox<2>, var: usize, order: usize) -> Self {
        assert!(var < 2);
        let mut j = Jet2::constant(order, b[var]);
        if order >= 1 {
            j.c[if var == 0 { idx(1, 0) } else { idx(0, 1) }] = Interval::ONE;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> Interval {
        if i + j > self.order {
            Interval::ZERO
        } else {
            self.c[idx(i, j)]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, v: Interval) {
        assert!(i + j <= self.order);
        self.c[idx(i, j)] = v;
    }

    /// The function value over the expansion box.
    pub fn value(&self) -> Interval {
        self.c[0]
    }

    /// Enclosure of `∂^{i+j} f / ∂x^i ∂y^j` over the expansion box.
    pub fn partials(&self, i: usize, j: usize) -> Interval {
        assert!(i + j <= self.order, "partial ({i},{j}) beyond order {}", self.order);
        self.c[idx(i, j)] * (factorial(i) * factorial(j))
    }

    /// The same expansion with the two variables exchanged.
    pub fn transpose(&self) -> Self {
        let mut out = Jet2::constant(self.order, Interval::ZERO);
        for i in 0..=self.order {
            for j in 0..=(self.order - i) {
                out.c[idx(j, i)] = self.c[idx(i, j)];
            }
        }
        out
    }

    /// Drops coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let mut out = Jet2::constant(order, Interval::ZERO);
        for k in 0..=order {
            for j in 0..=k {
                out.c[idx(k - j, j)] = self.c[idx(k - j, j)];
            }
        }
        out
    }

    /// Order-`order` jet over a box as the intersection of this jet (over
    /// the box, order at least `order + 1`) with the mean-value form
    /// `c_ij(center) + (i+1)c_{i+1,j}·dx + (j+1)c_{i,j+1}·dy`.
    pub fn mean_value(&self, center: &Jet2, dx: Interval, dy: Interval, order: usize) -> Self {
        assert!(order < self.order && order <= center.order, "mean-value form needs a higher-order box jet");
        let mut out = self.truncate(order);
        for k in 0..=order {
            for j in 0..=k {
                let i = k - j;
                let mv = center.coeff(i, j)
                    + self.coeff(i + 1, j) * dx * (i + 1) as f64
                    + self.coeff(i, j + 1) * dy * (j + 1) as f64;
                if let Some(x) = out.c[idx(i, j)].intersect(&mv) {
                    out.c[idx(i, j)] = x;
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Interval) -> Self {
        let mut out = *self;
        for v in out.c.iter_mut().take(Self::len(self.order)) {
            *v *= s;
        }
        out
    }

    #[inline]
    fn len(order: usize) -> usize {
        (order + 1) * (order + 2) / 2
    }

    fn check(&self, other: &Jet2) {
        assert_eq!(self.order, other.order, "jet orders differ");
    }

    /// Reciprocal via `b·a = 1`.
    pub fn recip(&self) -> Result<Self, JetError> {
        let a0 = self.c[0];
        let inv = a0.recip().map_err(|_| JetError::Singularity(a0))?;
        let mut b = Jet2::constant(self.order, inv);
        for k in 1..=self.order {
            for j in 0..=k {
                let i = k - j;
                let mut s = Interval::ZERO;
                for p in 0..=i {
                    for q in 0..=j {
                        if p == 0 && q == 0 {
                            continue;
                        }
                        s += self.c[idx(p, q)] * b.c[idx(i - p, j - q)];
                    }
                }
                b.c[idx(i, j)] = -(s * inv);
            }
        }
        Ok(b)
    }

    pub fn checked_div(&self, other: &Jet2) -> Result<Self, JetError> {
        Ok(*self * other.recip()?)
    }

    /// Square root via `b·b = a`; requires a positive leading coefficient.
    pub fn sqrt(&self) -> Result<Self, JetError> {
        let a0 = self.c[0];
        if a0.lo() <= 0.0 && self.order > 0 {
            return Err(JetError::Domain(a0));
        }
        let b0 = a0.sqrt().map_err(|_| JetError::Domain(a0))?;
        let mut b = Jet2::constant(self.order, b0);
        if self.order == 0 {
            return Ok(b);
        }
        let inv2 = (b0 * 2.0).recip().map_err(|_| JetError::Singularity(b0))?;
        for k in 1..=self.order {
            for j in 0..=k {
                let i = k - j;
                let mut s = Interval::ZERO;
                for p in 0..=i {
                    for q in 0..=j {
                        if (p == 0 && q == 0) || (p == i && q == j) {
                            continue;
                        }
                        s += b.c[idx(p, q)] * b.c[idx(i - p, j - q)];
                    }
                }
                b.c[idx(i, j)] = (self.c[idx(i, j)] - s) * inv2;
            }
        }
        Ok(b)
    }

    /// `(sin a, cos a)` via `s' = c·a'`, `c' = −s·a'` along x (or y when
    /// the x-index is zero).
    pub fn sin_cos(&self) -> (Self, Self) {
        let (s0, c0) = self.c[0].sin_cos();
        let mut s = Jet2::constant(self.order, s0);
        let mut c = Jet2::constant(self.order, c0);
        for k in 1..=self.order {
            for j in 0..=k {
                let i = k - j;
                let (mut ss, mut cc) = (Interval::ZERO, Interval::ZERO);
                if i > 0 {
                    for p in 1..=i {
                        for q in 0..=j {
                            let w = self.c[idx(p, q)] * (p as f64);
                            ss += w * c.c[idx(i - p, j - q)];
                            cc += w * s.c[idx(i - p, j - q)];
                        }
                    }
                    let inv = Interval::ratio(1.0, i as f64);
                    s.c[idx(i, j)] = ss * inv;
                    c.c[idx(i, j)] = -(cc * inv);
                } else {
                    for q in 1..=j {
                        let w = self.c[idx(0, q)] * (q as f64);
                        ss += w * c.c[idx(0, j - q)];
                        cc += w * s.c[idx(0, j - q)];
                    }
                    let inv = Interval::ratio(1.0, j as f64);
                    s.c[idx(0, j)] = ss * inv;
                    c.c[idx(0, j)] = -(cc * inv);
                }
            }
        }
        (s, c)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = self.cst(Interval::ONE);
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }

    /// Evaluates the polynomial at offsets `(dx, dy)` from the expansion point.
    pub fn eval_offset(&self, dx: Interval, dy: Interval) -> Interval {
        let mut acc = Interval::ZERO;
        for k in 0..=self.order {
            for j in 0..=k {
                let i = k - j;
                acc += self.c[idx(i, j)] * dx.powi(i as i32) * dy.powi(j as i32);
            }
        }
        acc
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, o: Jet2) -> Jet2 {
        self.check(&o);
        for k in 0..Self::len(self.order) {
            self.c[k] += o.c[k];
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(mut self, o: Jet2) -> Jet2 {
        self.check(&o);
        for k in 0..Self::len(self.order) {
            self.c[k] -= o.c[k];
        }
        self
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        for k in 0..Self::len(self.order) {
            self.c[k] = -self.c[k];
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        self.check(&o);
        let mut out = Jet2::constant(self.order, Interval::ZERO);
        for k in 0..=self.order {
            for j in 0..=k {
                let i = k - j;
                let mut s = Interval::ZERO;
                for p in 0..=i {
                    for q in 0..=j {
                        s += self.c[idx(p, q)] * o.c[idx(i - p, j - q)];
                    }
                }
                out.c[idx(i, j)] = s;
            }
        }
        out
    }
}

impl Add<Interval> for Jet2 {
    type Output = Jet2;
    fn add(mut self, o: Interval) -> Jet2 {
        self.c[0] += o;
        self
    }
}

impl Mul<Interval> for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Interval) -> Jet2 {
        self.scale(o)
    }
}

impl Scalar for Jet2 {
    fn cst(&self, c: Interval) -> Self {
        Jet2::constant(self.order, c)
    }
    fn recip(&self) -> Result<Self, JetError> {
        Jet2::recip(self)
    }
    fn sqrt(&self) -> Result<Self, JetError> {
        Jet2::sqrt(self)
    }
    fn sin_cos(&self) -> (Self, Self) {
        Jet2::sin_cos(self)
    }
}

// ---------------------------------------------------------------------------
// Jet1
// ---------------------------------------------------------------------------

/// Univariate truncated Taylor expansion in `Δy`.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Jet1 {
    order: usize,
    c: [Interval; MAX_ORDER1 + 1],
}

impl Jet1 {
    pub fn constant(order: usize, v: Interval) -> Self {
        assert!(order <= MAX_ORDER1);
        let mut c = [Interval::ZERO; MAX_ORDER1 + 1];
        c[0] = v;
        Jet1 { order, c }
    }

    pub fn variable(order: usize, v: Interval) -> Self {
        let mut j = Jet1::constant(order, v);
        if order >= 1 {
            j.c[1] = Interval::ONE;
        }
        j
    }

    pub fn from_coeffs(coeffs: &[Interval]) -> Self {
        assert!(!coeffs.is_empty() && coeffs.len() <= MAX_ORDER1 + 1);
        let mut j = Jet1::constant(coeffs.len() - 1, coeffs[0]);
        j.c[..coeffs.len()].copy_from_slice(coeffs);
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize) -> Interval {
        if k > self.order {
            Interval::ZERO
        } else {
            self.c[k]
        }
    }

    pub fn set_coeff(&mut self, k: usize, v: Interval) {
        assert!(k <= self.order);
        self.c[k] = v;
    }

    pub fn coeffs(&self) -> &[Interval] {
        &self.c[..=self.order]
    }

    pub fn value(&self) -> Interval {
        self.c[0]
    }

    /// Enclosure of the `k`-th derivative: `k!·c_k`.
    pub fn derivative(&self, k: usize) -> Interval {
        assert!(k <= self.order);
        self.c[k] * factorial(k)
    }

    pub fn scale(&self, s: Interval) -> Self {
        let mut out = *self;
        for v in out.c.iter_mut().take(self.order + 1) {
            *v *= s;
        }
        out
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        let a0 = self.c[0];
        let inv = a0.recip().map_err(|_| JetError::Singularity(a0))?;
        let mut b = Jet1::constant(self.order, inv);
        for k in 1..=self.order {
            let mut s = Interval::ZERO;
            for p in 1..=k {
                s += self.c[p] * b.c[k - p];
            }
            b.c[k] = -(s * inv);
        }
        Ok(b)
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        let a0 = self.c[0];
        if a0.lo() <= 0.0 && self.order > 0 {
            return Err(JetError::Domain(a0));
        }
        let b0 = a0.sqrt().map_err(|_| JetError::Domain(a0))?;
        let mut b = Jet1::constant(self.order, b0);
        if self.order == 0 {
            return Ok(b);
        }
        let inv2 = (b0 * 2.0).recip().map_err(|_| JetError::Singularity(b0))?;
        for k in 1..=self.order {
            let mut s = Interval::ZERO;
            for p in 1..k {
                s += b.c[p] * b.c[k - p];
            }
            b.c[k] = (self.c[k] - s) * inv2;
        }
        Ok(b)
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let (s0, c0) = self.c[0].sin_cos();
        let mut s = Jet1::constant(self.order, s0);
        let mut c = Jet1::constant(self.order, c0);
        for k in 1..=self.order {
            let (mut ss, mut cc) = (Interval::ZERO, Interval::ZERO);
            for p in 1..=k {
                let w = self.c[p] * (p as f64);
                ss += w * c.c[k - p];
                cc += w * s.c[k - p];
            }
            let inv = Interval::ratio(1.0, k as f64);
            s.c[k] = ss * inv;
            c.c[k] = -(cc * inv);
        }
        (s, c)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Jet1::constant(self.order, Interval::ONE);
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }

    /// Termwise antiderivative with zero constant, order raised by one.
    pub fn integrate(&self) -> Self {
        assert!(self.order < MAX_ORDER1);
        let mut out = Jet1::constant(self.order + 1, Interval::ZERO);
        for k in 0..=self.order {
            out.c[k + 1] = self.c[k] * Interval::ratio(1.0, (k + 1) as f64);
        }
        out
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(mut self, o: Jet1) -> Jet1 {
        assert_eq!(self.order, o.order);
        for k in 0..=self.order {
            self.c[k] += o.c[k];
        }
        self
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(mut self, o: Jet1) -> Jet1 {
        assert_eq!(self.order, o.order);
        for k in 0..=self.order {
            self.c[k] -= o.c[k];
        }
        self
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(mut self) -> Jet1 {
        for k in 0..=self.order {
            self.c[k] = -self.c[k];
        }
        self
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, o: Jet1) -> Jet1 {
        assert_eq!(self.order, o.order);
        let mut out = Jet1::constant(self.order, Interval::ZERO);
        for k in 0..=self.order {
            let mut s = Interval::ZERO;
            for p in 0..=k {
                s += self.c[p] * o.c[k - p];
            }
            out.c[k] = s;
        }
        out
    }
}

impl Scalar for Jet1 {
    fn cst(&self, c: Interval) -> Self {
        Jet1::constant(self.order, c)
    }
    fn recip(&self) -> Result<Self, JetError> {
        Jet1::recip(self)
    }
    fn sqrt(&self) -> Result<Self, JetError> {
        Jet1::sqrt(self)
    }
    fn sin_cos(&self) -> (Self, Self) {
        Jet1::sin_cos(self)
    }
}

// ---------------------------------------------------------------------------
// Implicit curve transport
// ---------------------------------------------------------------------------

/// Jet of the reduced function `g(x1) = f1(x1, x2(x1))`, where `x2(x1)` is the
/// curve implicitly defined by `f2 = 0`.
///
/// The coefficients of `x2(x1 + h) − x2(x1)` are solved order by order from
/// `Σ a_ij h^i η^j = 0`, dividing by the enclosure of `∂f2/∂x2`. Both jets
/// must be expanded over the same box; the result is valid at every point of
/// the curve inside that box.
pub fn implicit_curve_jet(f1: &Jet2, f2: &Jet2, order: usize) -> Result<Jet1, JetError> {
    assert!(order <= f1.order() && order <= f2.order(), "implicit jet order exceeds input jets");
    let a01 = f2.coeff(0, 1);
    if a01.contains_zero() {
        return Err(JetError::ReductionUnavailable(a01));
    }
    let inv = a01.recip()?;
    // η(h) = Σ_{k≥1} φ_k h^k
    let mut eta = Jet1::constant(order, Interval::ZERO);
    for k in 1..=order {
        let t = series_coeff(f2, &eta, k, true);
        eta.c[k] = -(t * inv);
    }
    let mut g = Jet1::constant(order, f1.coeff(0, 0));
    for k in 1..=order {
        g.c[k] = series_coeff(f1, &eta, k, false);
    }
    Ok(g)
}

/// Coefficient of `h^k` in `Σ_{(i,j)} a_ij h^i η(h)^j`, skipping `(0,0)` and,
/// when `skip_linear` is set, the `(0,1)` term (whose `η_k` is unknown).
fn series_coeff(f: &Jet2, eta: &Jet1, k: usize, skip_linear: bool) -> Interval {
    let mut total = Interval::ZERO;
    let mut eta_pow = Jet1::constant(eta.order(), Interval::ONE);
    for j in 0..=k {
        if j > 0 {
            eta_pow = eta_pow * *eta;
        }
        for i in 0..=(k - j) {
            if i + j == 0 || i + j > f.order() {
                continue;
            }
            if skip_linear && i == 0 && j == 1 {
                continue;
            }
            // [h^k] h^i η^j = [h^{k-i}] η^j
            let c = eta_pow.coeff(k - i);
            if c == Interval::ZERO {
                continue;
            }
            total += f.coeff(i, j) * c;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> IBox<2> {
        IBox([Interval::point(x), Interval::point(y)])
    }

    fn contains(i: Interval, x: f64, tol: f64) -> bool {
        i.inflate(tol).contains(x)
    }

    #[test]
    fn transpose_swaps_partials() {
        let b = IBox([Interval::new(0.5, 0.6), Interval::new(0.1, 0.2)]);
        let x = Jet2::lift(&b, 0, 4);
        let y = Jet2::lift(&b, 1, 4);
        let f = x * x * y + y.sin_cos().0 * x;
        let ft = f.transpose();
        for i in 0..=4 {
            for j in 0..=(4 - i) {
                assert_eq!(ft.coeff(i, j), f.coeff(j, i));
            }
        }
        assert_eq!(ft.transpose(), f);
    }

    #[test]
    fn lift_sets_value_and_unit_slope() {
        let b = IBox([Interval::new(2.0, 3.0), Interval::new(0.0, 1.0)]);
        let x = Jet2::lift(&b, 0, 2);
        assert_eq!(x.coeff(0, 0), Interval::new(2.0, 3.0));
        assert_eq!(x.coeff(1, 0), Interval::ONE);
        assert_eq!(x.coeff(0, 1), Interval::ZERO);
        assert_eq!(x.coeff(2, 0), Interval::ZERO);
        assert_eq!(x.value(), b[0]);
    }

    #[test]
    fn square_of_point_jet() {
        let x = Jet2::lift(&pt(3.0, 0.0), 0, 2);
        let sq = x * x;
        assert_eq!(sq.coeff(0, 0), Interval::point(9.0));
        assert_eq!(sq.coeff(1, 0), Interval::point(6.0));
        assert_eq!(sq.coeff(2, 0), Interval::point(1.0));
        assert!(sq.partials(2, 0).contains(2.0));
    }

    #[test]
    fn pythagorean_identity() {
        let b = IBox([Interval::new(0.3, 0.31), Interval::new(-0.2, -0.19)]);
        let x = Jet2::lift(&b, 0, 5);
        let y = Jet2::lift(&b, 1, 5);
        let arg = x * y + x;
        let (s, c) = arg.sin_cos();
        let one = s * s + c * c;
        assert!(one.coeff(0, 0).contains(1.0));
        for k in 1..=5 {
            for j in 0..=k {
                assert!(one.coeff(k - j, j).contains_zero(), "({},{})", k - j, j);
            }
        }
    }

    #[test]
    fn recip_and_sqrt_match_closed_forms() {
        let x = Jet2::lift(&pt(2.0, 0.0), 0, 4);
        let r = x.recip().unwrap();
        // 1/(2+h) = Σ (-1)^k h^k / 2^{k+1}
        for k in 0..=4 {
            let expect = (-1f64).powi(k as i32) / 2f64.powi(k as i32 + 1);
            assert!(contains(r.coeff(k, 0), expect, 1e-15));
        }
        let s = (x * x).sqrt().unwrap();
        assert!(contains(s.coeff(1, 0), 1.0, 1e-14));
        assert!(contains(s.coeff(2, 0), 0.0, 1e-14));
        assert!(matches!(Jet2::lift(&pt(0.0, 0.0), 0, 2).recip(), Err(JetError::Singularity(_))));
    }

    #[test]
    fn truncation_keeps_low_coefficients() {
        let b = IBox([Interval::new(0.5, 0.6), Interval::new(1.0, 1.1)]);
        let hi = {
            let x = Jet2::lift(&b, 0, 6);
            let y = Jet2::lift(&b, 1, 6);
            (x * y + x * x).recip().unwrap()
        };
        let lo = {
            let x = Jet2::lift(&b, 0, 3);
            let y = Jet2::lift(&b, 1, 3);
            (x * y + x * x).recip().unwrap()
        };
        for k in 0..=3 {
            for j in 0..=k {
                assert!(hi.coeff(k - j, j).overlaps(&lo.coeff(k - j, j)));
            }
        }
        assert_eq!(hi.truncate(3).order(), 3);
    }

    #[test]
    fn implicit_identity_curve() {
        // f2 = y - x, f1 = x + y: y(x) = x, g = 2x
        let b = IBox([Interval::new(-1.0, 1.0), Interval::new(-1.0, 1.0)]);
        let x = Jet2::lift(&b, 0, 3);
        let y = Jet2::lift(&b, 1, 3);
        let g = implicit_curve_jet(&(x + y), &(y - x), 3).unwrap();
        assert!(g.derivative(1).contains(2.0));
        assert_eq!(g.derivative(1), Interval::point(2.0));
        assert!(g.derivative(2).contains_zero());
    }

    #[test]
    fn implicit_linear_system_determinant() {
        // f1 = a x + b y, f2 = c x + d y: g' = det / d
        let (a, b_, c, d) = (2.0, 1.0, 3.0, 4.0);
        let bx = IBox([Interval::new(-1.0, 1.0), Interval::new(-1.0, 1.0)]);
        let x = Jet2::lift(&bx, 0, 2);
        let y = Jet2::lift(&bx, 1, 2);
        let f1 = x.scale(Interval::point(a)) + y.scale(Interval::point(b_));
        let f2 = x.scale(Interval::point(c)) + y.scale(Interval::point(d));
        let g = implicit_curve_jet(&f1, &f2, 2).unwrap();
        assert!(g.derivative(1).contains((a * d - b_ * c) / d));
    }

    #[test]
    fn implicit_quadratic_fold() {
        // f2 = y - x², f1 = y: g = x², g'(0) = 0, g'' = 2
        let bx = IBox([Interval::new(-0.1, 0.1), Interval::new(-0.1, 0.1)]);
        let x = Jet2::lift(&bx, 0, 3);
        let y = Jet2::lift(&bx, 1, 3);
        let g = implicit_curve_jet(&y, &(y - x * x), 3).unwrap();
        assert!(g.derivative(1).contains_zero());
        assert!(g.derivative(2).contains(2.0) && !g.derivative(2).contains_zero());
    }

    #[test]
    fn implicit_reports_unavailable_reduction() {
        let bx = IBox([Interval::new(-1.0, 1.0), Interval::new(-1.0, 1.0)]);
        let x = Jet2::lift(&bx, 0, 2);
        let y = Jet2::lift(&bx, 1, 2);
        let err = implicit_curve_jet(&x, &(y * y - x), 2).unwrap_err();
        assert!(matches!(err, JetError::ReductionUnavailable(_)));
    }

    #[test]
    fn jet1_sqrt_integrate() {
        let x = Jet1::variable(5, Interval::point(0.0));
        // (1 - x²)^{-1/2} = 1 + x²/2 + 3x⁴/8
        let f = (x.cst(Interval::ONE) - x * x).sqrt().unwrap().recip().unwrap();
        assert!(f.coeff(2).contains(0.5));
        assert!(f.coeff(4).contains(0.375));
        let asin = f.integrate();
        assert!(asin.coeff(3).contains(1.0 / 6.0));
        assert_eq!(asin.order(), 6);
    }
}
