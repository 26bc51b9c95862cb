//! Generating functions of Hermitian and R-diagonal operators and the
//! relations between them.
//!
//! Conventions for [`TransformSeries`]:
//!
//! | kind | stored series |
//! |------|---------------|
//! | `G`  | `G` in the variable `u = 1/z`: `u + m_1 u^2 + m_2 u^3 + ...` |
//! | `M`  | `M~(z) = m_1 + m_2 z + m_3 z^2 + ...` |
//! | `R`  | `R(z) = kappa_1 + kappa_2 z + ...` |
//! | `B`  | `z B(z) = 1 + z R(z)` (the pole is factored out) |
//! | `S`  | `S(z)` |
//! | `A`  | `A(z) = alpha_1 + alpha_2 z + ...` |
//! | `K`  | `K(z)`, with `z K(z)` the inverse of `z A(z)` |

mod noncrossing;
mod relations;
mod stieltjes;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

pub use noncrossing::{nc_cumulant_oracle, noncrossing_partitions, NC_ORACLE_MAX_ORDER};
pub use relations::{
    a_from_r, a_to_k, commutator_r, cumulants_from_moments, hermitian_multiply, hermitian_multiply_via_s,
    hermitian_part_r, k_from_s, k_to_a, moments_from_cumulants, r_from_a, r_to_s, rdiagonal_add, rdiagonal_multiply,
    s_from_a, s_from_a_via_k, s_from_a_via_r, s_from_k, s_to_r,
};
pub use stieltjes::{green_function, stieltjes_density, StieltjesOptions};

/// Default truncation order for transform pipelines.
pub const DEFAULT_ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransformKind {
    G,
    M,
    R,
    B,
    S,
    A,
    K,
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::str::FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "G" | "g" | "green" => Self::G,
            "M" | "m" | "moments" => Self::M,
            "R" | "r" | "cumulants" => Self::R,
            "B" | "b" | "blue" => Self::B,
            "S" | "s" => Self::S,
            "A" | "a" => Self::A,
            "K" | "k" => Self::K,
            other => return Err(Error::InvalidInput(format!("unknown transform kind {other:?}"))),
        })
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSeries {
    pub kind: TransformKind,
    #[serde(rename = "coeffs")]
    pub series: TruncatedSeries,
}

impl fmt::Debug for TransformSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.kind, self.series)
    }
}

impl TransformSeries {
    pub fn new(kind: TransformKind, series: TruncatedSeries) -> Self {
        Self { kind, series }
    }

    pub fn from_real(kind: TransformKind, coeffs: &[f64]) -> Result<Self> {
        Ok(Self::new(kind, TruncatedSeries::from_real(coeffs)?))
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn expect_kind(&self, kind: TransformKind) -> Result<&TruncatedSeries> {
        if self.kind == kind {
            Ok(&self.series)
        } else {
            Err(Error::KindMismatch { expected: kind.to_string(), got: self.kind.to_string() })
        }
    }

    /// Green's function from moments.
    pub fn g_from_m(m: &Self) -> Result<Self> {
        let s = m.expect_kind(TransformKind::M)?;
        Ok(Self::new(TransformKind::G, s.shift_up().shift_up().add(&TruncatedSeries::monomial(one(), 1, s.order() + 2))))
    }

    pub fn m_from_g(g: &Self) -> Result<Self> {
        let s = g.expect_kind(TransformKind::G)?;
        if s.order() < 2 || (s.coeff(0).norm() > 1e-12) || (s.coeff(1) - one()).norm() > 1e-12 {
            return Err(Error::InconsistentInput("G must start as u + O(u^2)".into()));
        }
        Ok(Self::new(TransformKind::M, s.shift_down().shift_down()))
    }

    /// Blue's function `zB(z) = 1 + zR(z)`.
    pub fn b_from_r(r: &Self) -> Result<Self> {
        let s = r.expect_kind(TransformKind::R)?;
        Ok(Self::new(TransformKind::B, s.shift_up().add(&TruncatedSeries::one(s.order() + 1))))
    }

    pub fn r_from_b(b: &Self) -> Result<Self> {
        let s = b.expect_kind(TransformKind::B)?;
        if s.order() < 1 || (s.coeff(0) - one()).norm() > 1e-12 {
            return Err(Error::InconsistentInput("zB(z) must start with 1".into()));
        }
        Ok(Self::new(TransformKind::R, s.shift_down()))
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Moments `m_1..m_K` of a Hermitian distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentData {
    pub m: Vec<f64>,
}

impl MomentData {
    pub fn new(m: Vec<f64>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::InvalidInput("need at least one moment".into()));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("moments must be finite".into()));
        }
        Ok(Self { m })
    }

    pub fn order(&self) -> usize {
        self.m.len()
    }

    /// `M~(z) = sum_k m_k z^{k-1}`.
    pub fn to_transform(&self) -> TransformSeries {
        TransformSeries::new(TransformKind::M, TruncatedSeries::from_real(&self.m).expect("validated"))
    }

    pub fn from_transform(t: &TransformSeries) -> Result<Self> {
        Self::new(t.expect_kind(TransformKind::M)?.real_coeffs())
    }
}

/// Free cumulants `kappa_1..kappa_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantData {
    pub kappa: Vec<f64>,
}

impl CumulantData {
    pub fn new(kappa: Vec<f64>) -> Result<Self> {
        if kappa.is_empty() {
            return Err(Error::InvalidInput("need at least one cumulant".into()));
        }
        if kappa.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("cumulants must be finite".into()));
        }
        Ok(Self { kappa })
    }

    pub fn order(&self) -> usize {
        self.kappa.len()
    }

    /// `R(z) = sum_n kappa_n z^{n-1}`.
    pub fn to_transform(&self) -> TransformSeries {
        TransformSeries::new(TransformKind::R, TruncatedSeries::from_real(&self.kappa).expect("validated"))
    }

    pub fn from_transform(t: &TransformSeries) -> Result<Self> {
        Self::new(t.expect_kind(TransformKind::R)?.real_coeffs())
    }
}

/// Alternating *-cumulants `alpha_1..alpha_K` of an R-diagonal operator,
/// stored as `A(z) = sum_k alpha_k z^{k-1}`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeterminingSequence {
    a: TruncatedSeries,
}

impl fmt::Debug for DeterminingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{:?}", self.a)
    }
}

impl DeterminingSequence {
    pub fn from_series(a: TruncatedSeries) -> Self {
        Self { a }
    }

    pub fn from_alphas(alpha: &[f64]) -> Result<Self> {
        Ok(Self { a: TruncatedSeries::from_real(alpha)? })
    }

    pub fn zero(len: usize) -> Self {
        Self { a: TruncatedSeries::zero(len.saturating_sub(1)) }
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.a
    }

    /// Number of stored cumulants `K`.
    pub fn len(&self) -> usize {
        self.a.order() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn alpha(&self, n: usize) -> Complex64 {
        assert!(n >= 1, "alpha is indexed from 1");
        self.a.coeff(n - 1)
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.a.real_coeffs()
    }

    pub fn to_transform(&self) -> TransformSeries {
        TransformSeries::new(TransformKind::A, self.a.clone())
    }

    pub fn from_transform(t: &TransformSeries) -> Result<Self> {
        Ok(Self { a: t.expect_kind(TransformKind::A)?.clone() })
    }

    pub(crate) fn require_nonzero(&self) -> Result<()> {
        let a1 = self.a.coeff(0).norm();
        if a1 <= crate::series::PIVOT_TOLERANCE {
            Err(Error::ZeroFirstCumulant(a1))
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn green_function_round_trip() {
        let m = MomentData::new(vec![0.0, 1.0, 0.0, 2.0]).unwrap().to_transform();
        let g = TransformSeries::g_from_m(&m).unwrap();
        assert_eq!(g.series.real_coeffs(), vec![0.0, 1.0, 0.0, 1.0, 0.0, 2.0]);
        assert_eq!(TransformSeries::m_from_g(&g).unwrap(), m);
    }

    #[test]
    fn blue_function_round_trip() {
        let r = TransformSeries::from_real(TransformKind::R, &[0.0, 1.0]).unwrap();
        let b = TransformSeries::b_from_r(&r).unwrap();
        assert_eq!(b.series.real_coeffs(), vec![1.0, 0.0, 1.0]);
        assert_eq!(TransformSeries::r_from_b(&b).unwrap(), r);
    }

    #[test]
    fn json_shape() {
        let t = TransformSeries::from_real(TransformKind::S, &[1.0, -1.0]).unwrap();
        let js = serde_json::to_string(&t).unwrap();
        assert_eq!(js, r#"{"kind":"S","coeffs":[[1.0,0.0],[-1.0,0.0]]}"#);
        let back: TransformSeries = serde_json::from_str(&js).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let t = TransformSeries::from_real(TransformKind::S, &[1.0]).unwrap();
        assert!(matches!(t.expect_kind(TransformKind::R), Err(Error::KindMismatch { .. })));
    }
}
