//! Closed-form ensembles: Ginibre, Haar unitary, products of Ginibre
//! matrices, the non-Hermitian free Poisson law and the Ginibre commutator.
//!
//! Ginibre entries have variance `v/N`, so `(1/N) Tr X X^dagger -> v` and the
//! unit-variance disc has radius one.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::ClosedForm;
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;
use crate::single_ring::SingleRingModel;
use crate::transforms::{commutator_r, DeterminingSequence, TransformKind, TransformSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "params")]
pub enum EnsembleSpec {
    Ginibre { variance: f64 },
    HaarUnitary,
    GinibreProduct { k: u32 },
    FreePoissonNH { q: f64 },
    CommutatorGinibre { variance: f64 },
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ginibre { variance } => write!(f, "ginibre(v={variance})"),
            Self::HaarUnitary => write!(f, "haar"),
            Self::GinibreProduct { k } => write!(f, "product(k={k})"),
            Self::FreePoissonNH { q } => write!(f, "poisson(q={q})"),
            Self::CommutatorGinibre { variance } => write!(f, "commutator(v={variance})"),
        }
    }
}

/// How the Ginibre commutator R-transform is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CommutatorConvention {
    /// `R_C(z) = R(z) - R(-z)` with `R` the R-transform of `X X^dagger`;
    /// for unit variance `R_C = 2z/(1 - z^2)` and `kappa_2(C) = 2`.
    #[default]
    UnitTrace,
    /// Half of the above, `z/(1 - z^2)` at unit variance. No Ginibre variance
    /// produces it; kept to compare against that normalization.
    Halved,
}

impl EnsembleSpec {
    pub fn ginibre() -> Self {
        Self::Ginibre { variance: 1.0 }
    }

    /// Parses a short name plus its parameter (`variance`, `k` or `q`).
    pub fn by_name(name: &str, variance: Option<f64>, k: Option<u32>, q: Option<f64>) -> Result<Self> {
        let spec = match name.to_ascii_lowercase().as_str() {
            "ginibre" => Self::Ginibre { variance: variance.unwrap_or(1.0) },
            "haar" | "haarunitary" => Self::HaarUnitary,
            "product" | "ginibreproduct" => Self::GinibreProduct { k: k.unwrap_or(2) },
            "poisson" | "freepoissonnh" => Self::FreePoissonNH { q: q.unwrap_or(1.0) },
            "commutator" | "commutatorginibre" => Self::CommutatorGinibre { variance: variance.unwrap_or(1.0) },
            other => return Err(Error::InvalidInput(format!("unknown ensemble {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Ginibre { variance } | Self::CommutatorGinibre { variance } => variance.is_finite() && variance > 0.0,
            Self::HaarUnitary => true,
            Self::GinibreProduct { k } => k >= 1,
            Self::FreePoissonNH { q } => q.is_finite() && q > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("parameter out of range in {self}")))
        }
    }

    fn unsupported(&self) -> Error {
        Error::UnsupportedVariant(self.to_string())
    }

    /// Mass of the spectrum at the origin.
    pub fn zero_mode_fraction(&self) -> f64 {
        match *self {
            Self::FreePoissonNH { q } => (1.0 - q).max(0.0),
            _ => 0.0,
        }
    }

    /// S-transform of `X X^dagger` as a callable.
    pub fn s_transform(&self) -> Result<ClosedForm> {
        self.validate()?;
        Ok(match *self {
            Self::Ginibre { variance: v } => ClosedForm::new("S ginibre", move |z: Complex64| 1.0 / (v * (1.0 + z)))
                .with_derivative(move |z| -1.0 / (v * (1.0 + z) * (1.0 + z))),
            Self::HaarUnitary => ClosedForm::constant("S haar", 1.0),
            Self::GinibreProduct { k } => {
                let k = k as i32;
                ClosedForm::new("S product", move |z: Complex64| (1.0 + z).powi(-k))
                    .with_derivative(move |z| -(k as f64) * (1.0 + z).powi(-k - 1))
            }
            Self::FreePoissonNH { q } => ClosedForm::new("S poisson", move |z: Complex64| 1.0 / ((1.0 + z) * (q + z)))
                .with_derivative(move |z| -(1.0 + q + 2.0 * z) / ((1.0 + z) * (q + z)).powi(2)),
            Self::CommutatorGinibre { .. } => return Err(self.unsupported()),
        })
    }

    /// Determining sequence `A(x)` as a callable.
    pub fn a_transform(&self) -> Result<ClosedForm> {
        self.validate()?;
        Ok(match *self {
            Self::Ginibre { variance } => ClosedForm::constant("A ginibre", variance),
            Self::HaarUnitary => ClosedForm::new("A haar", haar_a).with_derivative(haar_a_prime),
            Self::GinibreProduct { k } => {
                ClosedForm::new("A product", move |x| product_a(k, x).0).with_derivative(move |x| product_a(k, x).1)
            }
            Self::FreePoissonNH { q } => ClosedForm::new("A poisson", move |x: Complex64| q / (1.0 - x))
                .with_derivative(move |x| q / ((1.0 - x) * (1.0 - x))),
            Self::CommutatorGinibre { .. } => return Err(self.unsupported()),
        })
    }

    /// `(1/N) Tr X X^dagger` and `(1/N) Tr (X X^dagger)^{-1}` in the limit.
    pub fn moments(&self) -> Result<(f64, f64)> {
        Ok(match *self {
            Self::Ginibre { variance } => (variance, f64::INFINITY),
            Self::HaarUnitary => (1.0, 1.0),
            Self::GinibreProduct { .. } => (1.0, f64::INFINITY),
            Self::FreePoissonNH { q } => (q, f64::INFINITY),
            Self::CommutatorGinibre { .. } => return Err(self.unsupported()),
        })
    }

    pub fn single_ring_model(&self) -> Result<SingleRingModel> {
        let (m1, inv) = self.moments()?;
        Ok(SingleRingModel::new(self.to_string(), Arc::new(self.s_transform()?))
            .with_zero_modes(self.zero_mode_fraction())
            .with_moments(Some(m1), Some(inv)))
    }
}

fn haar_a(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        // 1 - x + 2x^2 - 5x^3 + 14x^4 - 42x^5 + 132x^6
        [1.0, -1.0, 2.0, -5.0, 14.0, -42.0, 132.0].iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    } else {
        ((1.0 + 4.0 * x).sqrt() - 1.0) / (2.0 * x)
    }
}

fn haar_a_prime(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        [-1.0, 4.0, -15.0, 56.0, -210.0, 792.0].iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    } else {
        let root = (1.0 + 4.0 * x).sqrt();
        (4.0 * x / root - 2.0 * root + 2.0) / (4.0 * x * x)
    }
}

/// `A` and `A'` for the `k`-fold product: `A = (1 + y)^{k-1}` with
/// `y = x A` the root of `y = x (1 + y)^{k-1}` that vanishes at `x = 0`.
fn product_a(k: u32, x: Complex64) -> (Complex64, Complex64) {
    let p = k as i32 - 1;
    if p == 0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let y = if x.im == 0.0 && x.re <= 0.0 {
        // y in (-1, 0]: g(y) = y - x (1 + y)^p goes from -1 at y = -1 to -x at 0
        let g = |y: f64| y - x.re * (1.0 + y).powi(p);
        let (mut lo, mut hi) = (-1.0, 0.0);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if g(m) < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
            if hi - lo < 1e-17 {
                break;
            }
        }
        Complex64::new(0.5 * (lo + hi), 0.0)
    } else {
        let mut y = x;
        for _ in 0..100 {
            let f = y - x * (1.0 + y).powi(p);
            let df = 1.0 - x * p as f64 * (1.0 + y).powi(p - 1);
            let step = f / df;
            y -= step;
            if step.norm() < 1e-16 * y.norm().max(1e-300) {
                break;
            }
        }
        y
    };
    let a = (1.0 + y).powi(p);
    let dy = p as f64 * (1.0 + y).powi(p - 1);
    let a_prime = dy * a / (1.0 - x * dy);
    (a, a_prime)
}

/// `alpha_1..alpha_len` from the defining algebraic equation of each ensemble,
/// solved order by order with the branch `A(0) = alpha_1`.
pub fn determining_sequence(spec: &EnsembleSpec, len: usize) -> Result<DeterminingSequence> {
    spec.validate()?;
    if len == 0 {
        return Err(Error::InvalidInput("need at least one cumulant".into()));
    }
    let order = len - 1;
    let a = match *spec {
        EnsembleSpec::Ginibre { variance } => {
            TruncatedSeries::constant(Complex64::new(variance, 0.0), order)
        }
        // x A^2 + A - 1 = 0
        EnsembleSpec::HaarUnitary => {
            let one = TruncatedSeries::one(order);
            TruncatedSeries::fixed_point(order, |a| Ok(one.sub(&a.mul(a).shift_up().truncate(order))))?
        }
        // (x A + 1)^{k-1} = A
        EnsembleSpec::GinibreProduct { k } => {
            let one = TruncatedSeries::one(order);
            TruncatedSeries::fixed_point(order, |a| Ok(one.add(&a.shift_up().truncate(order)).powi(k as usize - 1)))?
        }
        EnsembleSpec::FreePoissonNH { q } => TruncatedSeries::from_real(&vec![q; len])?,
        EnsembleSpec::CommutatorGinibre { .. } => return Err(spec.unsupported()),
    };
    Ok(DeterminingSequence::from_series(a))
}

/// Raney number `A_n(p, r) = r/(np + r) binomial(np + r, n)` in exact
/// integer arithmetic.
pub fn raney(n: u64, p: u64, r: u64) -> Result<u64> {
    let m = n.checked_mul(p).and_then(|x| x.checked_add(r)).ok_or(Error::Overflow)?;
    if m == 0 {
        return Err(Error::InvalidInput("np + r must be positive".into()));
    }
    if n > m {
        return Ok(0);
    }
    // binomial(m, n) built as a running product, exact at every step
    let mut b: u128 = 1;
    for i in 0..n as u128 {
        b = b.checked_mul(m as u128 - i).ok_or(Error::Overflow)? / (i + 1);
    }
    let v = b.checked_mul(r as u128).ok_or(Error::Overflow)? / m as u128;
    u64::try_from(v).map_err(|_| Error::Overflow)
}

/// Closed-form `(F, rho, O)` at radius `s`.
pub fn reference_profile(spec: &EnsembleSpec, s: f64) -> Result<(f64, f64, f64)> {
    spec.validate()?;
    if !(s > 0.0) {
        return Err(Error::InvalidInput(format!("s must be positive, got {s}")));
    }
    let overlap = |f: f64| f * (1.0 - f) / (PI * s * s);
    Ok(match *spec {
        EnsembleSpec::Ginibre { variance: v } => {
            if s * s >= v {
                (1.0, 0.0, 0.0)
            } else {
                (s * s / v, 1.0 / (PI * v), (1.0 - s * s / v) / (PI * v))
            }
        }
        EnsembleSpec::HaarUnitary => (if s < 1.0 { 0.0 } else { 1.0 }, 0.0, 0.0),
        EnsembleSpec::GinibreProduct { k } => {
            if s >= 1.0 {
                (1.0, 0.0, 0.0)
            } else {
                let kf = k as f64;
                let f = s.powf(2.0 / kf);
                (f, s.powf(2.0 / kf - 2.0) / (kf * PI), overlap(f))
            }
        }
        EnsembleSpec::FreePoissonNH { q } => {
            if s >= q.sqrt() {
                (1.0, 0.0, 0.0)
            } else {
                let root = ((q - 1.0) * (q - 1.0) + 4.0 * s * s).sqrt();
                let f = (1.0 - q + root) / 2.0;
                let rho = 1.0 / (PI * root);
                let o = (q * root - q * q + q - 2.0 * s * s) / (2.0 * PI * s * s);
                (f, rho, o)
            }
        }
        EnsembleSpec::CommutatorGinibre { .. } => return Err(spec.unsupported()),
    })
}

/// R-transform of `C = X X^dagger - X^dagger X` for Ginibre `X`.
pub fn commutator_reference(spec: &EnsembleSpec, convention: CommutatorConvention, order: usize) -> Result<TransformSeries> {
    let EnsembleSpec::CommutatorGinibre { variance: v } = *spec else {
        return Err(spec.unsupported());
    };
    spec.validate()?;
    // X X^dagger is free Poisson with rate one and scale v: kappa_n = v^n
    let kappa: Vec<f64> = (1..=order + 1).map(|n| v.powi(n as i32)).collect();
    let r = commutator_r(&TransformSeries::from_real(TransformKind::R, &kappa)?)?;
    Ok(match convention {
        CommutatorConvention::UnitTrace => r,
        CommutatorConvention::Halved => TransformSeries::new(TransformKind::R, r.series.scale_real(0.5)),
    })
}

/// Callable form of [`commutator_reference`]: `R_C(G) = 2 v^2 G / (1 - v^2 G^2)`.
pub fn commutator_r_callable(spec: &EnsembleSpec, convention: CommutatorConvention) -> Result<ClosedForm> {
    let EnsembleSpec::CommutatorGinibre { variance: v } = *spec else {
        return Err(spec.unsupported());
    };
    spec.validate()?;
    let scale = match convention {
        CommutatorConvention::UnitTrace => 2.0,
        CommutatorConvention::Halved => 1.0,
    };
    let v2 = v * v;
    Ok(ClosedForm::new("R commutator", move |g: Complex64| scale * v2 * g / (1.0 - v2 * g * g))
        .with_derivative(move |g| scale * v2 * (1.0 + v2 * g * g) / ((1.0 - v2 * g * g) * (1.0 - v2 * g * g))))
}

/// `R_{X + X^dagger}` for the Haar unitary as a callable:
/// `(sqrt(1 + 4G^2) - 1)/G`, the arcsine law on `[-2, 2]`.
pub fn haar_hermitian_part_callable() -> ClosedForm {
    ClosedForm::new("R haar hermitian part", |g: Complex64| 2.0 * g * haar_a(g * g))
        .with_derivative(|g| 2.0 * haar_a(g * g) + 4.0 * g * g * haar_a_prime(g * g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{taylor_coefficients, AnalyticFn};
    use crate::single_ring::{overlap_correlator, radial_cdf, radial_density};
    use crate::transforms::{rdiagonal_multiply, s_from_a};

    fn catalan(n: u64) -> u64 {
        raney(n, 2, 1).unwrap()
    }

    #[test]
    fn ginibre_sequence() {
        let a = determining_sequence(&EnsembleSpec::ginibre(), 8).unwrap();
        assert_eq!(a.alphas(), vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn haar_sequence_is_signed_catalan() {
        let a = determining_sequence(&EnsembleSpec::HaarUnitary, 10).unwrap();
        for (n, x) in a.alphas().iter().enumerate() {
            let c = catalan(n as u64) as f64;
            let want = if n % 2 == 0 { c } else { -c };
            assert!((x - want).abs() < 1e-10);
        }
    }

    #[test]
    fn product_sequences() {
        let a = determining_sequence(&EnsembleSpec::GinibreProduct { k: 3 }, 6).unwrap();
        assert_eq!(a.alphas().iter().map(|x| x.round() as u64).collect::<Vec<_>>(), vec![1, 2, 5, 14, 42, 132]);
        for k in 2..=4u64 {
            let a = determining_sequence(&EnsembleSpec::GinibreProduct { k: k as u32 }, 8).unwrap();
            for n in 1..=8u64 {
                let want = raney(n - 1, k - 1, k - 1).unwrap() as f64;
                assert!((a.alpha(n as usize).re - want).abs() < 1e-9 * want.max(1.0));
                // the same numbers as A_n(k - 1, 1)
                assert_eq!(raney(n - 1, k - 1, k - 1).unwrap(), raney(n, k - 1, 1).unwrap());
            }
        }
        // A_n(k, 1) is a different sequence: A_2(3, 1) = 3 while alpha_2 = 2 for k = 3
        assert_eq!(raney(2, 3, 1).unwrap(), 3);
    }

    #[test]
    fn commutator_has_no_sequence() {
        let spec = EnsembleSpec::CommutatorGinibre { variance: 1.0 };
        assert!(matches!(determining_sequence(&spec, 4), Err(Error::UnsupportedVariant(_))));
        assert!(matches!(reference_profile(&spec, 0.5), Err(Error::UnsupportedVariant(_))));
    }

    #[test]
    fn raney_values() {
        for p in 0..5 {
            for r in 1..5 {
                assert_eq!(raney(0, p, r).unwrap(), 1);
            }
        }
        assert_eq!(raney(1, 1, 1).unwrap(), 1);
        assert_eq!(raney(2, 2, 2).unwrap(), 5);
        assert_eq!(raney(3, 2, 2).unwrap(), 14);
        for n in 0..30 {
            assert_eq!(raney(n, 1, 1).unwrap(), 1);
        }
        assert!(matches!(raney(200, 3, 1), Err(Error::Overflow)));
    }

    #[test]
    fn poisson_reference_value() {
        let (f, _, _) = reference_profile(&EnsembleSpec::FreePoissonNH { q: 2.0 }, 1.0).unwrap();
        assert!((f - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn ginibre_reference_value() {
        let (f, rho, o) = reference_profile(&EnsembleSpec::ginibre(), 0.5).unwrap();
        assert!((f - 0.25).abs() < 1e-15);
        assert!((rho - 1.0 / PI).abs() < 1e-15);
        assert!((o - 0.75 / PI).abs() < 1e-15);
    }

    #[test]
    fn haar_reference_is_empty_inside() {
        for &s in &[0.3, 0.99, 1.5] {
            let (_, rho, o) = reference_profile(&EnsembleSpec::HaarUnitary, s).unwrap();
            assert_eq!((rho, o), (0.0, 0.0));
        }
    }

    fn catalogue() -> Vec<EnsembleSpec> {
        vec![
            EnsembleSpec::ginibre(),
            EnsembleSpec::Ginibre { variance: 2.5 },
            EnsembleSpec::HaarUnitary,
            EnsembleSpec::GinibreProduct { k: 1 },
            EnsembleSpec::GinibreProduct { k: 2 },
            EnsembleSpec::GinibreProduct { k: 3 },
            EnsembleSpec::FreePoissonNH { q: 0.5 },
            EnsembleSpec::FreePoissonNH { q: 1.0 },
            EnsembleSpec::FreePoissonNH { q: 2.0 },
        ]
    }

    #[test]
    fn series_and_callable_s_agree() {
        for spec in catalogue() {
            let a = determining_sequence(&spec, 12).unwrap();
            let series = s_from_a(&a).unwrap().series;
            let callable = taylor_coefficients(&spec.s_transform().unwrap(), 11, 0.25);
            assert!(series.approx_eq(&callable, 1e-8), "{spec}");
        }
    }

    #[test]
    fn series_and_callable_a_agree() {
        for spec in catalogue() {
            let a = determining_sequence(&spec, 10).unwrap();
            let callable = taylor_coefficients(&spec.a_transform().unwrap(), 9, 0.05);
            assert!(a.series().approx_eq(&callable, 1e-6 * 50f64.powi(9)), "{spec}");
            let low = taylor_coefficients(&spec.a_transform().unwrap(), 4, 0.05);
            assert!(a.series().truncate(4).approx_eq(&low, 1e-9), "{spec}");
        }
    }

    #[test]
    fn callable_derivatives() {
        for spec in catalogue() {
            let a = spec.a_transform().unwrap();
            for &x in &[-0.2, -0.01, -1e-5] {
                let x = Complex64::new(x, 0.0);
                let h = 1e-6;
                let fd = (a.eval(x + h) - a.eval(x - h)) / (2.0 * h);
                assert!((a.deriv(x) - fd).norm() < 1e-6, "{spec} at {x}");
            }
        }
    }

    #[test]
    fn pipeline_matches_reference() {
        for spec in catalogue() {
            let model = spec.single_ring_model().unwrap();
            let (_, r_out) = (0.0, spec.moments().unwrap().0.sqrt());
            for j in 1..=50 {
                let s = r_out * j as f64 / 51.0;
                let (f, rho, o) = reference_profile(&spec, s).unwrap();
                assert!((radial_cdf(&model, s).unwrap() - f).abs() < 1e-8, "{spec} s={s}");
                assert!((radial_density(&model, s).unwrap() - rho).abs() < 1e-8 * rho.max(1.0), "{spec} s={s}");
                assert!((overlap_correlator(&model, s).unwrap() - o).abs() < 1e-8 * o.max(1.0), "{spec} s={s}");
            }
        }
    }

    #[test]
    fn product_s_is_power_of_ginibre_s() {
        let g = s_from_a(&determining_sequence(&EnsembleSpec::ginibre(), 10).unwrap()).unwrap();
        for k in 1..=4u32 {
            let mut acc = g.clone();
            for _ in 1..k {
                acc = rdiagonal_multiply(&acc, &g).unwrap();
            }
            let direct = s_from_a(&determining_sequence(&EnsembleSpec::GinibreProduct { k }, 10).unwrap()).unwrap();
            assert!(acc.series.approx_eq(&direct.series, 1e-9), "k = {k}");
        }
    }

    #[test]
    fn commutator_conventions() {
        let spec = EnsembleSpec::CommutatorGinibre { variance: 1.0 };
        let r = commutator_reference(&spec, CommutatorConvention::UnitTrace, 7).unwrap();
        assert_eq!(r.series.real_coeffs(), vec![0.0, 2.0, 0.0, 2.0, 0.0, 2.0, 0.0, 2.0]);
        let h = commutator_reference(&spec, CommutatorConvention::Halved, 7).unwrap();
        assert_eq!(h.series.real_coeffs(), vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        let callable = taylor_coefficients(&commutator_r_callable(&spec, CommutatorConvention::UnitTrace).unwrap(), 7, 0.5);
        assert!(callable.approx_eq(&r.series, 1e-10));
    }

    #[test]
    fn haar_hermitian_part_matches_series() {
        let series = crate::transforms::hermitian_part_r(&determining_sequence(&EnsembleSpec::HaarUnitary, 6).unwrap());
        let callable = taylor_coefficients(&haar_hermitian_part_callable(), 11, 0.3);
        assert!(series.series.approx_eq(&callable, 1e-6));
        assert_eq!(series.series.real_coeffs()[..6], [0.0, 2.0, 0.0, -2.0, 0.0, 4.0]);
    }

    #[test]
    fn json_shape() {
        let js = serde_json::to_string(&EnsembleSpec::FreePoissonNH { q: 2.0 }).unwrap();
        assert_eq!(js, r#"{"variant":"FreePoissonNH","params":{"q":2.0}}"#);
        let haar: EnsembleSpec = serde_json::from_str(r#"{"variant":"HaarUnitary"}"#).unwrap();
        assert_eq!(haar, EnsembleSpec::HaarUnitary);
        let back: EnsembleSpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, EnsembleSpec::FreePoissonNH { q: 2.0 });
    }

    #[test]
    fn names_parse() {
        assert_eq!(EnsembleSpec::by_name("poisson", None, None, Some(0.5)).unwrap(), EnsembleSpec::FreePoissonNH { q: 0.5 });
        assert!(EnsembleSpec::by_name("poisson", None, None, Some(-1.0)).is_err());
        assert!(EnsembleSpec::by_name("elliptic", None, None, None).is_err());
    }
}
