//! Quaternionic Green's function of biunitarily invariant ensembles.
//!
//! For `Q(z, w) = [[z, i conj(w)], [i w, conj(z)]]` the generalized Green's
//! function has the form `G = [[g, b], [-conj(b), conj(g)]]` and solves
//! `R(G) + G^{-1} = Q` with `R(G) = A(b c) [[0, b], [c, 0]]`, `c = -conj(b)`.
//! Writing `D = |g|^2 + |b|^2` and `beta = |b|^2`, the diagonal entries give
//! `g = conj(z) D` and the off-diagonal ones `b (A(-beta) - 1/D) = i conj(w)`.
//! That leaves two real unknowns `(D, sqrt(beta))`:
//!
//! ```text
//! D - |z|^2 D^2 - beta = 0
//! sqrt(beta) (1/D - A(-beta)) = |w|
//! ```
//!
//! with the physical sign `1/D > A(-beta)`. Then `F = z g = |z|^2 D` and
//! `pi O = -b c = beta`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::AnalyticFn;
use crate::error::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default regulator used in place of `w = 0`.
pub const DEFAULT_REGULATOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuaternionPoint {
    pub z: Complex64,
    pub w: Complex64,
}

impl QuaternionPoint {
    pub fn new(z: Complex64, w: Complex64) -> Self {
        Self { z, w }
    }

    pub fn matrix(&self) -> Mat2 {
        [[self.z, I * self.w.conj()], [I * self.w, self.z.conj()]]
    }
}

/// Solved generalized Green's function. Only `g11` and `g1w` are stored; the
/// other two entries follow from the quaternion structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QGreenValue {
    pub g11: Complex64,
    pub g1w: Complex64,
}

impl QGreenValue {
    pub fn g_bar(&self) -> Complex64 {
        self.g11.conj()
    }

    pub fn gw1(&self) -> Complex64 {
        -self.g1w.conj()
    }

    pub fn matrix(&self) -> Mat2 {
        [[self.g11, self.g1w], [self.gw1(), self.g_bar()]]
    }

    /// `-g1w gw1 = |g1w|^2`, which equals `pi O` in the limit `w -> 0`.
    pub fn pi_overlap(&self) -> f64 {
        self.g1w.norm_sqr()
    }

    pub fn radial_cdf(&self, z: Complex64) -> f64 {
        (z * self.g11).re
    }

    pub fn is_trivial(&self) -> bool {
        self.g1w == Complex64::new(0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BranchRule {
    /// Nontrivial branch inside the ring, trivial outside.
    #[default]
    Auto,
    Trivial,
    Nontrivial,
}

/// `R(Q) = A(q12 q21) [[0, q12], [q21, 0]]`.
pub fn quaternionic_r(a: &dyn AnalyticFn, q: &Mat2) -> Result<Mat2> {
    let x = q[0][1] * q[1][0];
    if !a.in_domain(x) {
        return Err(Error::EvaluationDomain(format!("A evaluated at {x}")));
    }
    let ax = a.eval(x);
    let zero = Complex64::new(0.0, 0.0);
    Ok([[zero, ax * q[0][1]], [ax * q[1][0], zero]])
}

fn inv2(m: &Mat2) -> Mat2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

/// Max-norm of `R(G) + G^{-1} - Q`.
pub fn sd_residual(a: &dyn AnalyticFn, point: &QuaternionPoint, g: &QGreenValue) -> Result<f64> {
    let gm = g.matrix();
    let r = quaternionic_r(a, &gm)?;
    let gi = inv2(&gm);
    let q = point.matrix();
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((r[i][j] + gi[i][j] - q[i][j]).norm());
        }
    }
    Ok(worst)
}

/// Root `F in (0, 1)` of `F A(-F(1 - F)/|z|^2) = |z|^2` closest to `F = 1`,
/// i.e. the nontrivial solution at `w = 0`.
pub fn nontrivial_root(a: &dyn AnalyticFn, z_abs2: f64) -> Option<f64> {
    let h = |f: f64| f * a.eval(Complex64::new(-f * (1.0 - f) / z_abs2, 0.0)).re - z_abs2;
    let n = 400;
    let grid = |k: usize| 1.0 - 1e-12 - (1.0 - 2e-12) * k as f64 / n as f64;
    let mut hi = grid(0);
    let mut h_hi = h(hi);
    for k in 1..=n {
        let lo = grid(k);
        let h_lo = h(lo);
        if h_lo.is_finite() && h_hi.is_finite() && h_lo.signum() != h_hi.signum() {
            let (mut l, mut u, mut hl) = (lo, hi, h_lo);
            for _ in 0..200 {
                let m = 0.5 * (l + u);
                let hm = h(m);
                if hm.signum() == hl.signum() {
                    l = m;
                    hl = hm;
                } else {
                    u = m;
                }
                if u - l < 1e-15 {
                    break;
                }
            }
            return Some(0.5 * (l + u));
        }
        hi = lo;
        h_hi = h_lo;
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iter: 200, tol: 1e-15, residual_tol: 1e-10 }
    }
}

// Newton on (D, s) for the reduced equations.
fn newton_ds(a: &dyn AnalyticFn, z_abs2: f64, w_abs: f64, mut d: f64, mut s: f64, opts: &SolverOptions) -> Result<(f64, f64)> {
    let av = |s: f64| a.eval(Complex64::new(-s * s, 0.0)).re;
    let resid = |d: f64, s: f64| -> (f64, f64) { (d - z_abs2 * d * d - s * s, s * (1.0 / d - av(s)) - w_abs) };
    let mut e = resid(d, s);
    for _ in 0..opts.max_iter {
        let ap = a.deriv(Complex64::new(-s * s, 0.0)).re;
        let j11 = 1.0 - 2.0 * z_abs2 * d;
        let j12 = -2.0 * s;
        let j21 = -s / (d * d);
        let j22 = (1.0 / d - av(s)) + 2.0 * s * s * ap;
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NoConvergence("singular Jacobian".into()));
        }
        let dd = (e.0 * j22 - j12 * e.1) / det;
        let ds = (j11 * e.1 - j21 * e.0) / det;
        let norm0 = e.0.hypot(e.1);
        let mut t = 1.0;
        loop {
            let (nd, ns) = (d - t * dd, s - t * ds);
            if nd > 0.0 && ns >= 0.0 {
                let ne = resid(nd, ns);
                let norm1 = ne.0.hypot(ne.1);
                if norm1.is_finite() && (norm1 < norm0 || t < 1e-6) {
                    d = nd;
                    s = ns;
                    e = ne;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::NoConvergence("line search failed".into()));
            }
        }
        if (t * dd).abs() <= opts.tol * d.max(1.0) && (t * ds).abs() <= opts.tol * s.max(1.0) {
            return Ok((d, s));
        }
    }
    if e.0.hypot(e.1) < 1e-13 {
        Ok((d, s))
    } else {
        Err(Error::NoConvergence(format!("Newton stalled with residual {:e}", e.0.hypot(e.1))))
    }
}

fn assemble(point: &QuaternionPoint, d: f64, s: f64) -> QGreenValue {
    let z = point.z;
    let w_abs = point.w.norm();
    // b = -i conj(w) / (1/D - A): the phase of b is that of -i conj(w)
    let phase = if w_abs > 0.0 { -I * point.w.conj() / w_abs } else { -I };
    QGreenValue { g11: z.conj() * d, g1w: phase * s }
}

fn trivial_start(a: &dyn AnalyticFn, z_abs2: f64, w_abs: f64) -> (f64, f64) {
    let d = 1.0 / z_abs2;
    let gap = (z_abs2 - a.eval(Complex64::new(0.0, 0.0)).re).abs().max(1e-3);
    (d, w_abs / gap)
}

fn nontrivial_start(a: &dyn AnalyticFn, z_abs2: f64) -> Option<(f64, f64)> {
    if z_abs2 < 1e-24 {
        // z = 0: D = beta with beta A(-beta) = 1
        let h = |b: f64| b * a.eval(Complex64::new(-b, 0.0)).re - 1.0;
        let (mut lo, mut hi) = (0.0, 1.0);
        while h(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return None;
            }
        }
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if h(m) < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let beta = 0.5 * (lo + hi);
        return Some((beta, beta.sqrt()));
    }
    let f = nontrivial_root(a, z_abs2)?;
    Some((f / z_abs2, (f * (1.0 - f) / z_abs2).sqrt()))
}

/// Solves `R(G) + G^{-1} = Q(z, w)`.
pub fn solve_sd(a: &dyn AnalyticFn, z: Complex64, w: Complex64, rule: BranchRule) -> Result<QGreenValue> {
    solve_sd_with(a, z, w, rule, &SolverOptions::default())
}

pub fn solve_sd_with(a: &dyn AnalyticFn, z: Complex64, w: Complex64, rule: BranchRule, opts: &SolverOptions) -> Result<QGreenValue> {
    let point = QuaternionPoint::new(z, w);
    let z_abs2 = z.norm_sqr();
    let w_abs = w.norm();
    let nontrivial = nontrivial_start(a, z_abs2);

    if w_abs == 0.0 {
        let trivial = || -> Result<QGreenValue> {
            if z_abs2 == 0.0 {
                return Err(Error::InvalidInput("trivial branch is singular at z = 0".into()));
            }
            Ok(QGreenValue { g11: z.inv(), g1w: Complex64::new(0.0, 0.0) })
        };
        let nontriv = |(d, s): (f64, f64)| -> Result<QGreenValue> {
            let (d, s) = newton_ds(a, z_abs2, 0.0, d, s, opts)?;
            Ok(assemble(&point, d, s))
        };
        let g = match (rule, nontrivial) {
            (BranchRule::Trivial, _) => trivial()?,
            (BranchRule::Nontrivial, Some(start)) => nontriv(start)?,
            (BranchRule::Nontrivial, None) => {
                return Err(Error::NoConvergence(format!("no nontrivial solution at |z| = {}", z_abs2.sqrt())))
            }
            (BranchRule::Auto, Some(_)) => return Err(Error::AmbiguousBranch),
            (BranchRule::Auto, None) => trivial()?,
        };
        return check(a, &point, g, opts);
    }

    let trivial = trivial_start(a, z_abs2.max(1e-300), w_abs);
    let starts: Vec<(f64, f64)> = match (rule, nontrivial) {
        (BranchRule::Trivial, _) => vec![trivial],
        (BranchRule::Nontrivial, Some(n)) => vec![n],
        (BranchRule::Nontrivial, None) => vec![],
        (BranchRule::Auto, Some(n)) if z_abs2 > 0.0 => vec![n, trivial],
        (BranchRule::Auto, Some(n)) => vec![n],
        (BranchRule::Auto, None) => vec![trivial],
    };
    let mut last = Error::NoConvergence(format!("no admissible start at |z| = {}", z_abs2.sqrt()));
    for (d0, s0) in starts {
        match newton_ds(a, z_abs2, w_abs, d0, s0, opts) {
            Ok((d, s)) => return check(a, &point, assemble(&point, d, s), opts),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn check(a: &dyn AnalyticFn, point: &QuaternionPoint, g: QGreenValue, opts: &SolverOptions) -> Result<QGreenValue> {
    let r = sd_residual(a, point, &g)?;
    if r < opts.residual_tol {
        Ok(g)
    } else {
        Err(Error::NoConvergence(format!("residual {r:e} at z = {}", point.z)))
    }
}

/// `w -> 0` limit by Richardson extrapolation from `|w|` and `|w|/2`. The
/// nontrivial branch approaches its limit linearly in `|w|`.
pub fn solve_sd_limit(a: &dyn AnalyticFn, z: Complex64, w: Complex64, rule: BranchRule) -> Result<QGreenValue> {
    let g1 = solve_sd(a, z, w, rule)?;
    let g2 = solve_sd(a, z, w * 0.5, rule)?;
    let s = (2.0 * g2.g1w.norm() - g1.g1w.norm()).max(0.0);
    let phase = if g1.g1w.norm() > 0.0 { g1.g1w / g1.g1w.norm() } else { Complex64::new(0.0, 0.0) };
    Ok(QGreenValue { g11: 2.0 * g2.g11 - g1.g11, g1w: phase * s })
}
