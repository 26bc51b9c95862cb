//! Series identities between the transforms. Every relation is an exact
//! order-by-order solve on truncated series.

use num_complex::Complex64;

use super::{CumulantData, DeterminingSequence, MomentData, TransformKind, TransformSeries};
use crate::error::{Error, Result};
use crate::series::{TruncatedSeries, PIVOT_TOLERANCE};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Given `f = f_0 + f_1 z + ...` with `f_0 != 0`, returns `g` such that
/// `z g(z)` is the compositional inverse of `z f(z)`. The R/S and A/K pairs
/// are both related this way.
fn tilde_inverse(f: &TruncatedSeries) -> Result<TruncatedSeries, crate::series::SeriesError> {
    Ok(f.shift_up().compositional_inverse()?.shift_down())
}

pub fn cumulants_from_moments(m: &MomentData) -> CumulantData {
    let k = m.order();
    // psi(z) = G(1/z) = z + m_1 z^2 + ... + m_K z^{K+1}
    let mut coeffs = vec![c(0.0), c(1.0)];
    coeffs.extend(m.m.iter().map(|&x| c(x)));
    let psi = TruncatedSeries::new(coeffs).expect("moments are finite");
    // psi^{-1}(y) = y / (1 + y R(y)) = y h(y)
    let h = psi.compositional_inverse().expect("psi'(0) = 1").shift_down();
    let r = h.reciprocal().expect("h(0) = 1").sub(&TruncatedSeries::one(k)).shift_down();
    CumulantData { kappa: r.real_coeffs() }
}

pub fn moments_from_cumulants(kappa: &CumulantData) -> MomentData {
    let k = kappa.order();
    let r = TruncatedSeries::from_real(&kappa.kappa).expect("cumulants are finite");
    let denom = r.shift_up().add(&TruncatedSeries::one(k));
    let inv_psi = denom.reciprocal().expect("constant term is 1").shift_up();
    let psi = inv_psi.compositional_inverse().expect("derivative at 0 is 1");
    MomentData { m: psi.shift_down().shift_down().real_coeffs() }
}

fn require_mean(r: &TruncatedSeries) -> Result<()> {
    let k1 = r.coeff(0).norm();
    if k1 <= PIVOT_TOLERANCE {
        Err(Error::ZeroMean(k1))
    } else {
        Ok(())
    }
}

/// `R(z) S(z R(z)) = 1`.
pub fn r_to_s(r: &TransformSeries) -> Result<TransformSeries> {
    let rs = r.expect_kind(TransformKind::R)?;
    require_mean(rs)?;
    Ok(TransformSeries::new(TransformKind::S, tilde_inverse(rs)?))
}

pub fn s_to_r(s: &TransformSeries) -> Result<TransformSeries> {
    let ss = s.expect_kind(TransformKind::S)?;
    require_mean(ss)?;
    Ok(TransformSeries::new(TransformKind::R, tilde_inverse(ss)?))
}

/// `A(z) K(z A(z)) = 1`.
pub fn a_to_k(a: &DeterminingSequence) -> Result<TransformSeries> {
    a.require_nonzero()?;
    Ok(TransformSeries::new(TransformKind::K, tilde_inverse(a.series())?))
}

pub fn k_to_a(k: &TransformSeries) -> Result<DeterminingSequence> {
    let ks = k.expect_kind(TransformKind::K)?;
    let k0 = ks.coeff(0).norm();
    if k0 <= PIVOT_TOLERANCE {
        return Err(Error::ZeroFirstCumulant(k0));
    }
    Ok(DeterminingSequence::from_series(tilde_inverse(ks)?))
}

/// S-transform of `X X^dagger` from `S(z A(z)) = 1 / (A(z) (1 + z A(z)))`,
/// solved directly for the coefficients of `S`.
pub fn s_from_a(a: &DeterminingSequence) -> Result<TransformSeries> {
    a.require_nonzero()?;
    let a = a.series();
    let za = a.shift_up();
    let target = a.mul(&za.add(&TruncatedSeries::one(za.order()))).reciprocal()?;
    Ok(TransformSeries::new(TransformKind::S, TruncatedSeries::solve_outer(&za, &target)?))
}

/// `S(z) = K(z) / (1 + z)`.
pub fn s_from_k(k: &TransformSeries) -> Result<TransformSeries> {
    let ks = k.expect_kind(TransformKind::K)?;
    let one_plus_z = TruncatedSeries::from_real(&[1.0, 1.0])?.resize(ks.order());
    Ok(TransformSeries::new(TransformKind::S, ks.div(&one_plus_z)?))
}

pub fn k_from_s(s: &TransformSeries) -> Result<TransformSeries> {
    let ss = s.expect_kind(TransformKind::S)?;
    let one_plus_z = TruncatedSeries::from_real(&[1.0, 1.0])?.resize(ss.order());
    Ok(TransformSeries::new(TransformKind::K, ss.mul(&one_plus_z)))
}

pub fn s_from_a_via_k(a: &DeterminingSequence) -> Result<TransformSeries> {
    s_from_k(&a_to_k(a)?)
}

pub fn s_from_a_via_r(a: &DeterminingSequence) -> Result<TransformSeries> {
    r_to_s(&r_from_a(a)?)
}

/// Determining sequence from the R-transform of `X X^dagger`, solving
/// `R(z / (1 + z A)) = (1 + z A) A` for `A` one coefficient at a time.
pub fn a_from_r(r: &TransformSeries) -> Result<DeterminingSequence> {
    let rs = r.expect_kind(TransformKind::R)?;
    let k1 = rs.coeff(0);
    if !(k1.re > PIVOT_TOLERANCE) {
        return Err(Error::InconsistentInput(format!(
            "first moment of X X^dagger must be positive, got {k1}"
        )));
    }
    let order = rs.order();
    let one = TruncatedSeries::one(order);
    let a = TruncatedSeries::fixed_point(order, |a| {
        let za = a.shift_up().truncate(order);
        let inner = one.add(&za).reciprocal()?.shift_up();
        Ok(rs.compose(&inner)?.sub(&za.mul(a)))
    })?;
    Ok(DeterminingSequence::from_series(a))
}

/// R-transform of `X X^dagger` from `R(z) = (1 + z R) A(z + z^2 R)`.
pub fn r_from_a(a: &DeterminingSequence) -> Result<TransformSeries> {
    let k1 = a.alpha(1);
    if !(k1.re > PIVOT_TOLERANCE) {
        return Err(Error::InconsistentInput(format!("alpha_1 must be positive, got {k1}")));
    }
    let a = a.series();
    let order = a.order();
    let one = TruncatedSeries::one(order);
    let r = TruncatedSeries::fixed_point(order, |r| {
        let zb = one.add(&r.shift_up().truncate(order));
        let inner = zb.shift_up().truncate(order);
        Ok(zb.mul(&a.compose(&inner)?))
    })?;
    Ok(TransformSeries::new(TransformKind::R, r))
}

pub fn rdiagonal_add(a1: &DeterminingSequence, a2: &DeterminingSequence) -> DeterminingSequence {
    DeterminingSequence::from_series(a1.series().add(a2.series()))
}

pub fn rdiagonal_multiply(s1: &TransformSeries, s2: &TransformSeries) -> Result<TransformSeries> {
    let a = s1.expect_kind(TransformKind::S)?;
    let b = s2.expect_kind(TransformKind::S)?;
    Ok(TransformSeries::new(TransformKind::S, a.mul(b)))
}

/// Free product of Hermitian operators through R-transforms alone:
/// `R_AB(z) = R_A(x) R_B(y)` with `x = z R_B(y)`, `y = z R_A(x)`.
pub fn hermitian_multiply(r1: &TransformSeries, r2: &TransformSeries) -> Result<TransformSeries> {
    let ra = r1.expect_kind(TransformKind::R)?;
    let rb = r2.expect_kind(TransformKind::R)?;
    if ra.coeff(0).norm() <= PIVOT_TOLERANCE && rb.coeff(0).norm() <= PIVOT_TOLERANCE {
        return Err(Error::ZeroMean(0.0));
    }
    let order = ra.order().min(rb.order());
    let mut x = TruncatedSeries::zero(order);
    let mut y = TruncatedSeries::zero(order);
    for _ in 0..=order {
        let nx = rb.compose(&y)?.shift_up().truncate(order);
        let ny = ra.compose(&x)?.shift_up().truncate(order);
        x = nx;
        y = ny;
    }
    Ok(TransformSeries::new(TransformKind::R, ra.compose(&x)?.mul(&rb.compose(&y)?)))
}

/// Same product through `S_AB = S_A S_B`.
pub fn hermitian_multiply_via_s(r1: &TransformSeries, r2: &TransformSeries) -> Result<TransformSeries> {
    s_to_r(&rdiagonal_multiply(&r_to_s(r1)?, &r_to_s(r2)?)?)
}

/// `R_{X + X^dagger}(z) = 2 z A(z^2)`.
pub fn hermitian_part_r(a: &DeterminingSequence) -> TransformSeries {
    let alpha = a.series().coeffs();
    let order = 2 * alpha.len() - 1;
    let mut out = vec![c(0.0); order + 1];
    for (k, al) in alpha.iter().enumerate() {
        out[2 * k + 1] = al * 2.0;
    }
    TransformSeries::new(TransformKind::R, TruncatedSeries::new(out).expect("finite"))
}

/// `R_C(z) = R(z) - R(-z)` for `C = P^2 - U^dagger P^2 U` with `R` the
/// R-transform of `P^2 = X X^dagger`.
pub fn commutator_r(r_p2: &TransformSeries) -> Result<TransformSeries> {
    let r = r_p2.expect_kind(TransformKind::R)?;
    Ok(TransformSeries::new(TransformKind::R, r.sub(&r.dilate(c(-1.0)))))
}
