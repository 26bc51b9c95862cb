//! Density of a Hermitian operator from its R-transform.
//!
//! `G` solves `R(G) + 1/G = z`. The physical root is the one with
//! `G ~ 1/z` at infinity, so we start high above the real axis where that
//! root is isolated and follow it down to `x + i eps`. Along the path the
//! root must keep `Im G < 0`.

use num_complex::Complex64;

use crate::analytic::AnalyticFn;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesOptions {
    pub eps: f64,
    /// Combine `eps` and `eps/2` to cancel the leading smoothing bias.
    pub richardson: bool,
    /// Ratio between successive heights on the descent path.
    pub step_ratio: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for StieltjesOptions {
    fn default() -> Self {
        Self { eps: 1e-6, richardson: false, step_ratio: 0.7, newton_tol: 1e-13, max_newton: 60 }
    }
}

fn newton(r: &dyn AnalyticFn, z: Complex64, mut g: Complex64, opts: &StieltjesOptions) -> Result<Complex64> {
    for _ in 0..opts.max_newton {
        if !r.in_domain(g) {
            return Err(Error::EvaluationDomain(format!("R evaluated at {g}")));
        }
        let f = r.eval(g) + g.inv() - z;
        let df = r.deriv(g) - (g * g).inv();
        let step = f / df;
        // damp steps that would jump across the real axis
        let mut t = 1.0;
        while t > 1e-3 && (g - step * t).im > 0.0 && z.im > 0.0 {
            t *= 0.5;
        }
        g -= step * t;
        if !(g.re.is_finite() && g.im.is_finite()) {
            return Err(Error::NoConvergence(format!("Newton diverged at z = {z}")));
        }
        if (step * t).norm() <= opts.newton_tol * g.norm().max(1e-300) {
            return Ok(g);
        }
    }
    Err(Error::NoConvergence(format!("Newton stalled at z = {z}")))
}

/// Green's function at `z = x + i eps`, followed down from `x + i Y`.
pub fn green_function(r: &dyn AnalyticFn, x: f64, eps: f64, opts: &StieltjesOptions) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    let top = 1e3 * (1.0 + x.abs());
    let mut y = top;
    let mut z = Complex64::new(x, y);
    let mut g = newton(r, z, z.inv(), opts)?;
    while y > eps {
        y = (y * opts.step_ratio).max(eps);
        z = Complex64::new(x, y);
        g = newton(r, z, g, opts)?;
        if g.im > 1e-12 * g.norm() {
            return Err(Error::NoValidBranch(x));
        }
    }
    Ok(g)
}

/// `rho(x) = -Im G(x + i eps) / pi`.
pub fn stieltjes_density(r: &dyn AnalyticFn, x: f64, opts: &StieltjesOptions) -> Result<f64> {
    let rho = |eps: f64| -> Result<f64> { Ok(-green_function(r, x, eps, opts)?.im / std::f64::consts::PI) };
    if opts.richardson {
        Ok(2.0 * rho(opts.eps / 2.0)? - rho(opts.eps)?)
    } else {
        rho(opts.eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::ClosedForm;
    use crate::series::TruncatedSeries;
    use std::f64::consts::PI;

    #[test]
    fn semicircle_at_origin() {
        let r = TruncatedSeries::from_real(&[0.0, 1.0]).unwrap();
        let rho = stieltjes_density(&r, 0.0, &StieltjesOptions::default()).unwrap();
        assert!((rho - 1.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn semicircle_profile() {
        let r = TruncatedSeries::from_real(&[0.0, 1.0]).unwrap();
        let opts = StieltjesOptions { richardson: true, ..Default::default() };
        for &x in &[-1.9, -1.0, 0.3, 1.5] {
            let rho = stieltjes_density(&r, x, &opts).unwrap();
            let want = (4.0 - x * x).sqrt() / (2.0 * PI);
            assert!((rho - want).abs() < 1e-6, "x = {x}: {rho} vs {want}");
        }
        assert!(stieltjes_density(&r, 2.5, &opts).unwrap().abs() < 1e-6);
    }

    #[test]
    fn point_mass_density_vanishes_away_from_zero() {
        let r = TruncatedSeries::from_real(&[0.0]).unwrap();
        let rho = stieltjes_density(&r, 1.0, &StieltjesOptions::default()).unwrap();
        assert!(rho.abs() < 1e-6);
    }

    #[test]
    fn variance_two_semicircle() {
        let r = TruncatedSeries::from_real(&[0.0, 2.0]).unwrap();
        let rho = stieltjes_density(&r, 0.0, &StieltjesOptions::default()).unwrap();
        assert!((rho - 1.0 / (PI * 2f64.sqrt())).abs() < 1e-6);
    }

    #[test]
    fn arcsine_law_from_closed_form() {
        // U + U^dagger: R(G) = (sqrt(1 + 4G^2) - 1)/G, density 1/(pi sqrt(4 - x^2))
        let r = ClosedForm::new("haar hermitian part", |g: Complex64| ((1.0 + 4.0 * g * g).sqrt() - 1.0) / g)
            .with_derivative(|g: Complex64| {
                let root = (1.0 + 4.0 * g * g).sqrt();
                4.0 / root - (root - 1.0) / (g * g)
            });
        for &x in &[0.0, 0.7, -1.2] {
            let rho = stieltjes_density(&r, x, &StieltjesOptions::default()).unwrap();
            let want = 1.0 / (PI * (4.0 - x * x).sqrt());
            assert!((rho - want).abs() < 1e-5, "x = {x}: {rho} vs {want}");
        }
    }

    #[test]
    fn rejects_nonpositive_eps() {
        let r = TruncatedSeries::from_real(&[0.0, 1.0]).unwrap();
        let opts = StieltjesOptions { eps: 0.0, ..Default::default() };
        assert!(stieltjes_density(&r, 0.0, &opts).is_err());
    }
}
