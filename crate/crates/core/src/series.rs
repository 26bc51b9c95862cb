//! Truncated formal power series with complex coefficients.
//!
//! A [`TruncatedSeries`] of order `K` stores `c_0..c_K` and represents
//! `c_0 + c_1 z + ... + c_K z^K + O(z^{K+1})`. Every binary operation
//! truncates to the smaller of the operand orders, so identities between
//! generating functions can be checked coefficient by coefficient.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::{Deserializer, Error as _};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default absolute tolerance for coefficient-wise equality.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Magnitude below which a leading coefficient is treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("series must have at least one coefficient")]
    Empty,
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("constant term {0} is too small to invert")]
    ZeroConstantTerm(f64),
    #[error("inner series has nonzero constant term {0}")]
    NonzeroInnerConstant(f64),
    #[error("series is not invertible: |c_0| = {c0}, |c_1| = {c1}")]
    NonInvertible { c0: f64, c1: f64 },
}

#[derive(Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        if let Some(index) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(SeriesError::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self, SeriesError> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(value: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), order)
    }

    /// The series `z`, truncated at `order` (which must be at least 1 to be
    /// anything but zero).
    pub fn identity(order: usize) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), 1, order)
    }

    pub fn monomial(value: Complex64, power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = value;
        }
        s
    }

    /// `1 / (1 - ratio z)` to the given order.
    pub fn geometric(ratio: Complex64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut p = Complex64::new(1.0, 0.0);
        for _ in 0..=order {
            coeffs.push(p);
            p *= ratio;
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^k`; zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn real_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self { coeffs: self.coeffs[..=order].to_vec() }
    }

    /// Pads with zeros (or truncates) to exactly `order`.
    pub fn resize(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Multiplies by `z`, raising the order by one.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Divides by `z`, dropping the constant term and lowering the order by
    /// one. The constant term is discarded, so callers must know it vanishes.
    pub fn shift_down(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        Self { coeffs: self.coeffs[1..].to_vec() }
    }

    /// `f(a z)`.
    pub fn dilate(&self, a: Complex64) -> Self {
        let mut p = Complex64::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * p;
                p *= a;
                v
            })
            .collect();
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self { coeffs: (0..=order).map(|k| self.coeffs[k] + other.coeffs[k]).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self { coeffs: (0..=order).map(|k| self.coeffs[k] - other.coeffs[k]).collect() }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    pub fn powi(&self, n: usize) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse, `f * g = 1` to the order of `f`.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let c0 = self.coeffs[0];
        if c0.norm() <= PIVOT_TOLERANCE {
            return Err(SeriesError::ZeroConstantTerm(c0.norm()));
        }
        let inv0 = c0.inv();
        let mut out = Vec::with_capacity(self.coeffs.len());
        out.push(inv0);
        for n in 1..self.coeffs.len() {
            let acc: Complex64 = (1..=n).map(|k| self.coeffs[k] * out[n - k]).sum();
            out.push(-acc * inv0);
        }
        Ok(Self { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.reciprocal()?))
    }

    /// `f(g(z))`, requires `g(0) = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        let g0 = inner.coeffs[0].norm();
        if g0 > PIVOT_TOLERANCE {
            return Err(SeriesError::NonzeroInnerConstant(g0));
        }
        Ok(self.compose_unchecked(inner))
    }

    fn compose_unchecked(&self, inner: &Self) -> Self {
        let order = self.order().min(inner.order());
        let mut g = inner.truncate(order);
        g.coeffs[0] = Complex64::new(0.0, 0.0);
        // Horner in the series ring.
        let mut acc = Self::constant(self.coeffs[order], order);
        for k in (0..order).rev() {
            acc = acc.mul(&g);
            acc.coeffs[0] += self.coeffs[k];
        }
        acc
    }

    /// Compositional inverse `h` with `f(h(z)) = h(f(z)) = z`, computed by
    /// Newton iteration on series with precision doubling.
    pub fn compositional_inverse(&self) -> Result<Self, SeriesError> {
        let c0 = self.coeffs[0].norm();
        let c1 = self.coeff(1).norm();
        if c0 > PIVOT_TOLERANCE || c1 <= PIVOT_TOLERANCE || self.order() == 0 {
            return Err(SeriesError::NonInvertible { c0, c1 });
        }
        let order = self.order();
        let df = self.derivative().resize(order);
        let newton = |h: &Self, prec: usize| -> Result<Self, SeriesError> {
            let h = h.resize(prec);
            let residual = self.truncate(prec).compose_unchecked(&h).sub(&Self::identity(prec));
            let slope = df.truncate(prec).compose_unchecked(&h);
            Ok(h.sub(&residual.mul(&slope.reciprocal()?)))
        };
        // h is exact through z^prec; a Newton step doubles the precision.
        let mut h = Self::monomial(self.coeffs[1].inv(), 1, 1);
        let mut prec = 1usize;
        while prec < order {
            prec = (2 * prec + 1).min(order);
            h = newton(&h, prec)?;
        }
        let mut h = newton(&h, order)?;
        h.coeffs[0] = Complex64::new(0.0, 0.0);
        Ok(h)
    }

    /// Formal derivative; the order drops by one (a constant maps to the
    /// zero series of order 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self {
            coeffs: (1..self.coeffs.len())
                .map(|k| self.coeffs[k] * k as f64)
                .collect(),
        }
    }

    /// Solves `f(inner(z)) = target(z)` for `f` order by order. Requires
    /// `inner(0) = 0` and `inner'(0) != 0`.
    pub fn solve_outer(inner: &Self, target: &Self) -> Result<Self, SeriesError> {
        let c0 = inner.coeffs[0].norm();
        let c1 = inner.coeff(1);
        if c0 > PIVOT_TOLERANCE || c1.norm() <= PIVOT_TOLERANCE {
            return Err(SeriesError::NonInvertible { c0, c1: c1.norm() });
        }
        let order = inner.order().min(target.order());
        let inner = inner.truncate(order);
        // powers[j] = inner^j truncated at `order`
        let mut powers = Vec::with_capacity(order + 1);
        powers.push(Self::one(order));
        for j in 1..=order {
            let next = powers[j - 1].mul(&inner);
            powers.push(next);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
        for n in 0..=order {
            let known: Complex64 = (0..n).map(|j| out[j] * powers[j].coeffs[n]).sum();
            out[n] = (target.coeffs[n] - known) / powers[n].coeffs[n];
        }
        Ok(Self { coeffs: out })
    }

    /// Solves `x = step(x)` for a map whose `z^n` coefficient only depends on
    /// the coefficients of `x` below `n`. Starting from zero, each pass fixes
    /// one more coefficient.
    pub fn fixed_point<F>(order: usize, mut step: F) -> Result<Self, SeriesError>
    where
        F: FnMut(&Self) -> Result<Self, SeriesError>,
    {
        let mut x = Self::zero(order);
        for _ in 0..=order {
            x = step(&x)?.resize(order);
        }
        Ok(x)
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, c)| acc * z + c * k as f64)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let order = self.order().min(other.order());
        (0..=order)
            .map(|k| (self.coeffs[k] - other.coeffs[k]).norm())
            .fold(0.0, f64::max)
    }

    /// Coefficient-wise equality on the common order.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries[")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "{}{:+}i", c.re, c.im)?;
            }
        }
        write!(f, "; O(z^{})]", self.coeffs.len())
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::add(self, rhs)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::sub(self, rhs)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale_real(-1.0)
    }
}

// JSON form: an array of [re, im] pairs, index = power.
impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        TruncatedSeries::new(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .map_err(D::Error::custom)
    }
}
