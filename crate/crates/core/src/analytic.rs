//! Callable (closed-form) evaluation of transforms.
//!
//! Truncated series are enough for coefficient identities, but the
//! single-ring and Stieltjes solvers evaluate transforms at arguments of order
//! one, outside the disc where a truncated expansion is accurate. Those paths
//! take an [`AnalyticFn`], implemented both by [`TruncatedSeries`] (as a
//! polynomial) and by [`ClosedForm`].

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::series::TruncatedSeries;

pub trait AnalyticFn: Send + Sync {
    fn eval(&self, z: Complex64) -> Complex64;

    /// Derivative; the default is a central difference, which is accurate to
    /// roughly 1e-10 relative for well-scaled analytic functions.
    fn deriv(&self, z: Complex64) -> Complex64 {
        let h = 1e-6 * z.norm().max(1.0);
        (self.eval(z + h) - self.eval(z - h)) / (2.0 * h)
    }

    /// Whether `z` lies in the region where `eval` is trustworthy.
    fn in_domain(&self, _z: Complex64) -> bool {
        true
    }
}

impl AnalyticFn for TruncatedSeries {
    fn eval(&self, z: Complex64) -> Complex64 {
        TruncatedSeries::eval(self, z)
    }

    fn deriv(&self, z: Complex64) -> Complex64 {
        self.eval_derivative(z)
    }
}

type Func = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
type Domain = Arc<dyn Fn(Complex64) -> bool + Send + Sync>;

/// A transform given by a closure, with optional exact derivative and domain.
#[derive(Clone)]
pub struct ClosedForm {
    label: String,
    f: Func,
    df: Option<Func>,
    domain: Option<Domain>,
}

impl ClosedForm {
    pub fn new(label: impl Into<String>, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { label: label.into(), f: Arc::new(f), df: None, domain: None }
    }

    pub fn with_derivative(mut self, df: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        self.df = Some(Arc::new(df));
        self
    }

    pub fn with_domain(mut self, domain: impl Fn(Complex64) -> bool + Send + Sync + 'static) -> Self {
        self.domain = Some(Arc::new(domain));
        self
    }

    /// Restricts the domain to the open disc `|z| < radius`.
    pub fn with_radius(self, radius: f64) -> Self {
        self.with_domain(move |z| z.norm() < radius)
    }

    pub fn constant(label: impl Into<String>, value: f64) -> Self {
        Self::new(label, move |_| Complex64::new(value, 0.0)).with_derivative(|_| Complex64::new(0.0, 0.0))
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedForm").field("label", &self.label).finish_non_exhaustive()
    }
}

impl AnalyticFn for ClosedForm {
    fn eval(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    fn deriv(&self, z: Complex64) -> Complex64 {
        match &self.df {
            Some(df) => df(z),
            None => {
                let h = 1e-6 * z.norm().max(1.0);
                ((self.f)(z + h) - (self.f)(z - h)) / (2.0 * h)
            }
        }
    }

    fn in_domain(&self, z: Complex64) -> bool {
        self.domain.as_ref().map_or(true, |d| d(z))
    }
}

impl<T: AnalyticFn + ?Sized> AnalyticFn for Arc<T> {
    fn eval(&self, z: Complex64) -> Complex64 {
        (**self).eval(z)
    }
    fn deriv(&self, z: Complex64) -> Complex64 {
        (**self).deriv(z)
    }
    fn in_domain(&self, z: Complex64) -> bool {
        (**self).in_domain(z)
    }
}

/// Taylor coefficients `c_0..c_order` of `f` at the origin from the
/// trapezoidal rule on the circle `|z| = radius`, which must lie inside the
/// disc of analyticity.
pub fn taylor_coefficients(f: &dyn AnalyticFn, order: usize, radius: f64) -> TruncatedSeries {
    let m = (4 * (order + 1)).max(64);
    let samples: Vec<Complex64> =
        (0..m).map(|j| f.eval(Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / m as f64))).collect();
    let coeffs = (0..=order)
        .map(|n| {
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (n * j) as f64 / m as f64))
                .sum();
            sum / (m as f64 * radius.powi(n as i32))
        })
        .collect();
    TruncatedSeries::new(coeffs).expect("samples of an analytic function are finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_derivative_is_accurate() {
        let f = ClosedForm::new("exp", |z: Complex64| z.exp());
        let z = Complex64::new(0.3, -0.7);
        assert!((f.deriv(z) - z.exp()).norm() < 1e-9);
    }

    #[test]
    fn radius_limits_domain() {
        let f = ClosedForm::new("geo", |z: Complex64| 1.0 / (1.0 - z)).with_radius(1.0);
        assert!(f.in_domain(Complex64::new(0.5, 0.0)));
        assert!(!f.in_domain(Complex64::new(-1.5, 0.0)));
    }

    #[test]
    fn series_evaluates_as_polynomial() {
        let s = TruncatedSeries::from_real(&[1.0, 0.0, 2.0]).unwrap();
        let z = Complex64::new(2.0, 0.0);
        assert_eq!(AnalyticFn::eval(&s, z), Complex64::new(9.0, 0.0));
        assert_eq!(AnalyticFn::deriv(&s, z), Complex64::new(8.0, 0.0));
    }

    #[test]
    fn contour_coefficients_of_geometric_series() {
        let f = ClosedForm::new("geo", |z: Complex64| 1.0 / (1.0 - z));
        let c = taylor_coefficients(&f, 12, 0.5);
        assert!(c.approx_eq(&TruncatedSeries::geometric(Complex64::new(1.0, 0.0), 12), 1e-10));
    }
}
