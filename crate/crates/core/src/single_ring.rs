//! Radial statistics of single-ring spectra.
//!
//! The radial CDF solves `S(F - 1) = 1/s^2` for `F` in
//! `(zero_mode_fraction, 1)`, where `S` is the S-transform of `X X^dagger`.
//! The density and the eigenvector correlator follow from `F`.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::AnalyticFn;
use crate::error::{Error, Result};

/// Bracket margin on `F` at both ends.
const F_MARGIN: f64 = 1e-14;
const BISECTION_TOL: f64 = 1e-8;
const NEWTON_TOL: f64 = 1e-12;
const SCAN_POINTS: usize = 64;

#[derive(Clone)]
pub struct SingleRingModel {
    pub label: String,
    pub s: Arc<dyn AnalyticFn>,
    pub zero_mode_fraction: f64,
    /// First moment of `X X^dagger`; derived as `1/S(0)` when absent.
    pub moment1: Option<f64>,
    /// First inverse moment of `X X^dagger`, possibly infinite; derived from
    /// `S(zero_mode_fraction - 1)` when absent.
    pub inv_moment1: Option<f64>,
}

impl fmt::Debug for SingleRingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SingleRingModel")
            .field("label", &self.label)
            .field("zero_mode_fraction", &self.zero_mode_fraction)
            .field("moment1", &self.moment1)
            .field("inv_moment1", &self.inv_moment1)
            .finish()
    }
}

impl SingleRingModel {
    pub fn new(label: impl Into<String>, s: Arc<dyn AnalyticFn>) -> Self {
        Self { label: label.into(), s, zero_mode_fraction: 0.0, moment1: None, inv_moment1: None }
    }

    pub fn with_zero_modes(mut self, fraction: f64) -> Self {
        self.zero_mode_fraction = fraction;
        self
    }

    pub fn with_moments(mut self, moment1: Option<f64>, inv_moment1: Option<f64>) -> Self {
        self.moment1 = moment1;
        self.inv_moment1 = inv_moment1;
        self
    }

    fn s_at(&self, x: f64) -> f64 {
        self.s.eval(Complex64::new(x, 0.0)).re
    }

    fn s_prime_at(&self, x: f64) -> f64 {
        self.s.deriv(Complex64::new(x, 0.0)).re
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.zero_mode_fraction) {
            return Err(Error::InvalidInput(format!(
                "zero_mode_fraction must lie in [0, 1), got {}",
                self.zero_mode_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingRadii {
    pub r_in: f64,
    pub r_out: f64,
    /// `r_in == r_out`: the spectrum is a circle and has no area density.
    pub degenerate: bool,
}

/// `r_out^2 = m_1`, `r_in^{-2} = m_{-1}` of `X X^dagger`.
pub fn ring_radii(model: &SingleRingModel) -> Result<RingRadii> {
    model.validate()?;
    let m1 = model.moment1.unwrap_or_else(|| 1.0 / model.s_at(0.0));
    if !(m1.is_finite() && m1 > 0.0) {
        return Err(Error::InconsistentInput(format!("first moment must be positive, got {m1}")));
    }
    let r_in2 = match model.inv_moment1 {
        Some(inv) if inv.is_finite() && inv > 0.0 => 1.0 / inv,
        Some(_) => 0.0,
        None => {
            let v = 1.0 / model.s_at(model.zero_mode_fraction - 1.0);
            if v.is_finite() && v > 0.0 {
                v
            } else {
                0.0
            }
        }
    };
    let (r_in, r_out) = (r_in2.sqrt(), m1.sqrt());
    if r_in > r_out * (1.0 + 1e-12) {
        return Err(Error::InconsistentInput(format!("r_in = {r_in} exceeds r_out = {r_out}")));
    }
    let degenerate = (r_out - r_in).abs() <= 1e-12 * r_out;
    Ok(RingRadii { r_in: if degenerate { r_out } else { r_in }, r_out, degenerate })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfSolution {
    pub f: f64,
    /// Sign changes of `S(F - 1) - 1/s^2` seen on the scan; above one means
    /// `S(F - 1)` is not monotone and the root nearest `F = 1` was taken.
    pub root_count: usize,
}

/// Radial CDF with the root-count diagnostic.
pub fn radial_cdf_detailed(model: &SingleRingModel, s: f64) -> Result<CdfSolution> {
    if !(s > 0.0) {
        return Err(Error::InvalidInput(format!("s must be positive, got {s}")));
    }
    let radii = ring_radii(model)?;
    let zm = model.zero_mode_fraction;
    if s >= radii.r_out {
        return Ok(CdfSolution { f: 1.0, root_count: 1 });
    }
    if s <= radii.r_in {
        let f = if radii.degenerate { 0.0 } else { zm };
        return Ok(CdfSolution { f, root_count: 1 });
    }
    let target = 1.0 / (s * s);
    let h = |f: f64| model.s_at(f - 1.0) - target;
    let lo = zm + F_MARGIN;
    let hi = 1.0 - F_MARGIN;
    let grid: Vec<f64> = (0..=SCAN_POINTS).map(|k| lo + (hi - lo) * k as f64 / SCAN_POINTS as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&f| h(f)).collect();
    let mut brackets = Vec::new();
    for k in 0..SCAN_POINTS {
        let (a, b) = (vals[k], vals[k + 1]);
        if a.is_nan() || b.is_nan() {
            continue;
        }
        if a == 0.0 || a.signum() != b.signum() {
            brackets.push((grid[k], grid[k + 1]));
        }
    }
    if vals[SCAN_POINTS] == 0.0 {
        brackets.push((grid[SCAN_POINTS], grid[SCAN_POINTS]));
    }
    let root_count = brackets.len();
    if root_count == 0 {
        // A root within F_MARGIN of either end leaves no sign change on the
        // scan; which end follows from the sign of the nearer value.
        let (first, last) = (vals[0], vals[SCAN_POINTS]);
        if first.is_nan() || last.is_nan() {
            return Err(Error::NoRoot(s));
        }
        // orient h so that it decreases through the root
        let sign = if model.s_prime_at(lo - 1.0) < 0.0 { 1.0 } else { -1.0 };
        let f = if sign * first <= 0.0 {
            lo
        } else if sign * last >= 0.0 {
            hi
        } else {
            return Err(Error::NoRoot(s));
        };
        return Ok(CdfSolution { f, root_count: 1 });
    }
    let (mut a, mut b) = brackets[root_count - 1];
    let mut ha = h(a);
    while b - a > BISECTION_TOL {
        let m = 0.5 * (a + b);
        let hm = h(m);
        if hm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if hm.signum() == ha.signum() {
            a = m;
            ha = hm;
        } else {
            b = m;
        }
    }
    let mut f = 0.5 * (a + b);
    for _ in 0..50 {
        let d = model.s_prime_at(f - 1.0);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let step = h(f) / d;
        let next = (f - step).clamp(a, b);
        let done = (next - f).abs() <= NEWTON_TOL;
        f = next;
        if done {
            break;
        }
    }
    Ok(CdfSolution { f, root_count })
}

/// Solves `S(F - 1) = 1/s^2`. Outside the ring `F` is clamped to its
/// boundary values.
pub fn radial_cdf(model: &SingleRingModel, s: f64) -> Result<f64> {
    let sol = radial_cdf_detailed(model, s)?;
    if sol.root_count > 1 {
        return Err(Error::MultipleRoots { s, count: sol.root_count });
    }
    Ok(sol.f)
}

/// `rho = F'(s) / (2 pi s)` with `F'(s) = -2 / (s^3 S'(F - 1))`.
pub fn radial_density(model: &SingleRingModel, s: f64) -> Result<f64> {
    let radii = ring_radii(model)?;
    if radii.degenerate || s <= radii.r_in || s >= radii.r_out {
        return Ok(0.0);
    }
    let f = radial_cdf_detailed(model, s)?.f;
    let sp = model.s_prime_at(f - 1.0);
    if sp.abs() < 1e-14 {
        return Err(Error::EdgeSingularity(s));
    }
    let fp = -2.0 / (s * s * s * sp);
    Ok((fp / (2.0 * PI * s)).max(0.0))
}

/// `O(s) = F (1 - F) / (pi s^2)`.
pub fn overlap_correlator(model: &SingleRingModel, s: f64) -> Result<f64> {
    let f = radial_cdf_detailed(model, s)?.f;
    Ok((f * (1.0 - f) / (PI * s * s)).max(0.0))
}

/// `2 pi int rho(s) s ds` over the ring, which should equal
/// `1 - zero_mode_fraction`.
pub fn normalization(model: &SingleRingModel) -> Result<f64> {
    let radii = ring_radii(model)?;
    if radii.degenerate {
        return Ok(0.0);
    }
    let len = radii.r_out - radii.r_in;
    // s = r_in + len (3t^2 - 2t^3) flattens integrable edge singularities
    let integrand = |t: f64| -> Result<f64> {
        let jac = 6.0 * t * (1.0 - t) * len;
        if jac == 0.0 {
            return Ok(0.0);
        }
        let s = radii.r_in + len * t * t * (3.0 - 2.0 * t);
        Ok(2.0 * PI * s * radial_density(model, s)? * jac)
    };
    adaptive_simpson(&integrand, 0.0, 1.0, 1e-11)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn rec(
        f: &dyn Fn(f64) -> Result<f64>,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm)?, f(rm)?);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)? + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
    }
    let (fa, fm, fb) = (f(a)?, f(0.5 * (a + b))?, f(b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: usize,
    /// The grid spans `(0, r_out (1 + margin)]`.
    pub margin: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { points: 512, margin: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileHeader {
    pub label: String,
    pub radii: RingRadii,
    pub zero_mode_fraction: f64,
    /// Grid points where `S(F - 1) = 1/s^2` had more than one root.
    pub multiple_root_points: usize,
    /// Settings of the run that produced the profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub header: ProfileHeader,
    pub s_grid: Vec<f64>,
    pub f: Vec<f64>,
    pub rho: Vec<f64>,
    pub o: Vec<f64>,
}

impl RadialProfile {
    pub fn radii(&self) -> RingRadii {
        self.header.radii
    }

    /// Linear interpolation of `F`; boundary values outside the grid.
    pub fn f_at(&self, s: f64) -> f64 {
        interp(&self.s_grid, &self.f, s, self.header.zero_mode_fraction, 1.0)
    }

    pub fn o_at(&self, s: f64) -> f64 {
        interp(&self.s_grid, &self.o, s, self.o.first().copied().unwrap_or(0.0), 0.0)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# {}", serde_json::to_string(&self.header)?)?;
        writeln!(w, "s,F,rho,O")?;
        for i in 0..self.s_grid.len() {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", self.s_grid[i], self.f[i], self.rho[i], self.o[i])?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidInput(format!("profile csv: {msg}"));
        let mut lines = r.lines();
        let mut next = || -> Result<String> {
            lines.next().ok_or_else(|| bad("unexpected end"))?.map_err(|e| bad(&e.to_string()))
        };
        let head = next()?;
        let json = head.strip_prefix("# ").ok_or_else(|| bad("missing header"))?;
        let header: ProfileHeader = serde_json::from_str(json).map_err(|e| bad(&e.to_string()))?;
        if next()?.trim() != "s,F,rho,O" {
            return Err(bad("unexpected column names"));
        }
        let mut p = RadialProfile { header, s_grid: vec![], f: vec![], rho: vec![], o: vec![] };
        while let Ok(line) = next() {
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| bad(&e.to_string())))
                .collect::<Result<_>>()?;
            if v.len() != 4 {
                return Err(bad("expected four columns"));
            }
            p.s_grid.push(v[0]);
            p.f.push(v[1]);
            p.rho.push(v[2]);
            p.o.push(v[3]);
        }
        Ok(p)
    }
}

fn interp(xs: &[f64], ys: &[f64], x: f64, below: f64, above: f64) -> f64 {
    if xs.is_empty() || x < xs[0] {
        return below;
    }
    if x >= xs[xs.len() - 1] {
        return if x == xs[xs.len() - 1] { ys[ys.len() - 1] } else { above };
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

/// Tabulates `F`, `rho` and `O` on `points` equally spaced radii.
pub fn build_profile(model: &SingleRingModel, grid: &GridSpec) -> Result<RadialProfile> {
    if grid.points < 2 || !(grid.margin >= 0.0) {
        return Err(Error::InvalidInput("grid needs at least two points and a non-negative margin".into()));
    }
    let radii = ring_radii(model)?;
    let smax = radii.r_out * (1.0 + grid.margin);
    let s_grid: Vec<f64> = (1..=grid.points).map(|k| smax * k as f64 / grid.points as f64).collect();
    let rows: Vec<(f64, f64, f64, bool)> = s_grid
        .par_iter()
        .map(|&s| -> Result<_> {
            let sol = radial_cdf_detailed(model, s)?;
            let rho = radial_density(model, s)?;
            let o = (sol.f * (1.0 - sol.f) / (PI * s * s)).max(0.0);
            Ok((sol.f, rho, o, sol.root_count > 1))
        })
        .collect::<Result<_>>()?;
    let multiple_root_points = rows.iter().filter(|r| r.3).count();
    if multiple_root_points > 0 {
        warn!("{}: S(F - 1) = 1/s^2 has several roots at {multiple_root_points} radii", model.label);
    }
    if radii.degenerate {
        warn!("{}: degenerate ring at r = {}", model.label, radii.r_out);
    }
    Ok(RadialProfile {
        header: ProfileHeader {
            label: model.label.clone(),
            radii,
            zero_mode_fraction: model.zero_mode_fraction,
            multiple_root_points,
            config: None,
        },
        f: rows.iter().map(|r| r.0).collect(),
        rho: rows.iter().map(|r| r.1).collect(),
        o: rows.iter().map(|r| r.2).collect(),
        s_grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::ClosedForm;
    use proptest::prelude::*;

    fn ginibre() -> SingleRingModel {
        let s = ClosedForm::new("S", |z: Complex64| 1.0 / (1.0 + z)).with_derivative(|z| -1.0 / ((1.0 + z) * (1.0 + z)));
        SingleRingModel::new("ginibre", Arc::new(s))
    }

    fn poisson(q: f64) -> SingleRingModel {
        let s = ClosedForm::new("S", move |z: Complex64| 1.0 / ((1.0 + z) * (q + z)))
            .with_derivative(move |z| -(q + 1.0 + 2.0 * z) / ((1.0 + z) * (q + z)).powi(2));
        SingleRingModel::new("poisson", Arc::new(s)).with_zero_modes((1.0 - q).max(0.0))
    }

    fn product(k: i32) -> SingleRingModel {
        let s = ClosedForm::new("S", move |z: Complex64| (1.0 + z).powi(-k))
            .with_derivative(move |z| -(k as f64) * (1.0 + z).powi(-k - 1));
        SingleRingModel::new("product", Arc::new(s))
    }

    fn haar() -> SingleRingModel {
        SingleRingModel::new("haar", Arc::new(ClosedForm::constant("S", 1.0)))
    }

    fn poisson_f(q: f64, r: f64) -> f64 {
        (1.0 - q + ((q - 1.0).powi(2) + 4.0 * r * r).sqrt()) / 2.0
    }

    #[test]
    fn ginibre_cdf_density_overlap() {
        let m = ginibre();
        for &s in &[0.1, 0.5, 0.9] {
            assert!((radial_cdf(&m, s).unwrap() - s * s).abs() < 1e-12);
            assert!((radial_density(&m, s).unwrap() - 1.0 / PI).abs() < 1e-10);
            assert!((overlap_correlator(&m, s).unwrap() - (1.0 - s * s) / PI).abs() < 1e-10);
        }
        assert_eq!(radial_cdf(&m, 1.3).unwrap(), 1.0);
        assert_eq!(radial_density(&m, 1.3).unwrap(), 0.0);
    }

    #[test]
    fn poisson_closed_forms() {
        for &q in &[0.5, 1.0, 2.0] {
            let m = poisson(q);
            for k in 1..20 {
                let r = q.sqrt() * k as f64 / 20.0;
                let f = poisson_f(q, r);
                assert!((radial_cdf(&m, r).unwrap() - f).abs() < 1e-10);
                let rho = 1.0 / (PI * ((1.0 - q).powi(2) + 4.0 * r * r).sqrt());
                assert!((radial_density(&m, r).unwrap() - rho).abs() < 1e-8 * rho.max(1.0));
                let o = (q * ((q - 1.0).powi(2) + 4.0 * r * r).sqrt() - q * q + q - 2.0 * r * r) / (2.0 * PI * r * r);
                assert!((overlap_correlator(&m, r).unwrap() - o).abs() < 1e-8 * o.max(1.0));
            }
        }
    }

    #[test]
    fn haar_is_degenerate() {
        let m = haar();
        let r = ring_radii(&m).unwrap();
        assert!(r.degenerate && r.r_in == 1.0 && r.r_out == 1.0);
        assert_eq!(radial_cdf(&m, 0.99).unwrap(), 0.0);
        assert_eq!(radial_cdf(&m, 1.01).unwrap(), 1.0);
        assert_eq!(overlap_correlator(&m, 0.5).unwrap(), 0.0);
        let p = build_profile(&m, &GridSpec::default()).unwrap();
        assert!(p.header.radii.degenerate);
        assert!(p.rho.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn radii_of_catalogue() {
        let g = ring_radii(&ginibre()).unwrap();
        assert_eq!((g.r_in, g.r_out), (0.0, 1.0));
        for k in 1..=4 {
            let p = ring_radii(&product(k)).unwrap();
            assert_eq!((p.r_in, p.r_out), (0.0, 1.0));
        }
        let p = ring_radii(&poisson(2.0)).unwrap();
        assert!((p.r_out - 2f64.sqrt()).abs() < 1e-14);
        // S has a pole at -1 for every q, so m_{-1} diverges
        assert_eq!(p.r_in, 0.0);
        assert_eq!(ring_radii(&poisson(0.5)).unwrap().r_in, 0.0);
        let explicit = ginibre().with_moments(Some(4.0), Some(f64::INFINITY));
        let r = ring_radii(&explicit).unwrap();
        assert_eq!((r.r_in, r.r_out), (0.0, 2.0));
    }

    #[test]
    fn normalization_of_profiles() {
        assert!((normalization(&ginibre()).unwrap() - 1.0).abs() < 1e-6);
        assert!((normalization(&poisson(0.5)).unwrap() - 0.5).abs() < 1e-6);
        assert!((normalization(&poisson(2.0)).unwrap() - 1.0).abs() < 1e-6);
        assert!((normalization(&product(3)).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ginibre_profile_on_512_points() {
        let p = build_profile(&ginibre(), &GridSpec::default()).unwrap();
        assert_eq!(p.s_grid.len(), 512);
        assert!(p.f.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(*p.f.last().unwrap(), 1.0);
        // trapezoid on the tabulated density
        let mut total = 0.0;
        let mut prev = (0.0, 1.0 / PI);
        for (s, rho) in p.s_grid.iter().zip(&p.rho) {
            if *s > 1.0 {
                break;
            }
            total += 0.5 * (s - prev.0) * (2.0 * PI * (prev.0 * prev.1 + s * rho));
            prev = (*s, *rho);
        }
        assert!((total - 1.0).abs() < 1e-2);
        assert!((normalization(&ginibre()).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn poisson_zero_mode_plateau() {
        let m = poisson(0.5);
        let f0 = radial_cdf(&m, 1e-9).unwrap();
        assert!((f0 - 0.5).abs() < 1e-8);
    }

    #[test]
    fn edge_values() {
        for m in [ginibre(), poisson(2.0), poisson(0.5), product(3)] {
            let r = ring_radii(&m).unwrap();
            let outer = radial_cdf(&m, r.r_out * (1.0 - 1e-12)).unwrap();
            assert!((outer - 1.0).abs() < 1e-10, "{}", m.label);
            if r.r_in > 0.0 {
                let inner = radial_cdf(&m, r.r_in * (1.0 + 1e-13)).unwrap();
                assert!((inner - m.zero_mode_fraction).abs() < 1e-10, "{}", m.label);
            }
        }
    }

    #[test]
    fn non_monotone_s_is_flagged() {
        // S(F - 1) = 1 + 20 (F - 0.5)^2 - 4 (F - 0.5) crosses 1/s^2 twice for some s
        let s = ClosedForm::new("bumpy", |z: Complex64| {
            let f = z + 1.0;
            1.0 + 20.0 * (f - 0.5) * (f - 0.5) - 4.0 * (f - 0.5)
        });
        let m = SingleRingModel::new("bumpy", Arc::new(s)).with_moments(Some(2.0), Some(f64::INFINITY));
        let sol = radial_cdf_detailed(&m, 0.95).unwrap();
        assert!(sol.root_count > 1);
        assert!(matches!(radial_cdf(&m, 0.95), Err(Error::MultipleRoots { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let p = build_profile(&poisson(0.5), &GridSpec { points: 16, margin: 0.2 }).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let back = RadialProfile::read_csv(&buf[..]).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn overlap_vanishes_at_edges() {
        for m in [ginibre(), poisson(2.0)] {
            let r = ring_radii(&m).unwrap();
            assert!(overlap_correlator(&m, r.r_out * (1.0 - 1e-9)).unwrap() < 1e-7);
            if r.r_in > 0.0 {
                assert!(overlap_correlator(&m, r.r_in * (1.0 + 1e-9)).unwrap() < 1e-7);
            }
        }
    }

    proptest! {
        #[test]
        fn implicit_derivative_matches_finite_difference(u in 0.05f64..0.95) {
            let m = product(3);
            let h = 1e-5;
            let fd = (radial_cdf(&m, u + h).unwrap() - radial_cdf(&m, u - h).unwrap()) / (2.0 * h);
            let rho = radial_density(&m, u).unwrap();
            let want = fd / (2.0 * PI * u);
            prop_assert!((rho - want).abs() <= 1e-5 * want);
        }

        #[test]
        fn overlap_is_nonnegative(s in 0.001f64..2.0, q in 0.2f64..3.0) {
            prop_assert!(overlap_correlator(&poisson(q), s).unwrap() >= 0.0);
        }
    }
}
