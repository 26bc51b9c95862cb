use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{hermitian_eigenvalues, sample_matrix, McConfig, SeedRecord, SpectralSample};
use crate::analytic::{taylor_coefficients, AnalyticFn, ClosedForm};
use crate::ensembles::{
    commutator_r_callable, determining_sequence, haar_hermitian_part_callable, CommutatorConvention, EnsembleSpec,
};
use crate::error::{Error, Result};
use crate::single_ring::RadialProfile;
use crate::transforms::{hermitian_part_r, stieltjes_density, StieltjesOptions};

/// Equal-width annuli over `[0, r_max]`.
pub fn radial_edges(r_max: f64, bins: usize) -> Vec<f64> {
    (0..=bins).map(|i| r_max * i as f64 / bins as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalProfile {
    pub n: usize,
    pub sample_count: usize,
    pub bin_edges: Vec<f64>,
    /// Fraction of eigenvalues with `|lambda| <= edge`, pooled.
    pub f_hat: Vec<f64>,
    pub counts: Vec<usize>,
    /// `sum O_aa / (samples N^2 area)` per annulus.
    pub o_hat: Option<Vec<f64>>,
    /// Spread of the per-sample estimates divided by `sqrt(samples)`.
    pub o_stderr: Option<Vec<f64>>,
    pub empty_bins: Vec<usize>,
    /// Outer edge from the half-density point of the pooled radial profile,
    /// falling back to `r_out_max` when the edge is too thin to resolve.
    pub r_out_hat: f64,
    /// Mean over samples of the largest modulus. Biased upwards by the
    /// extreme-value tail, about +0.03 for Ginibre at N = 1024.
    pub r_out_max: f64,
    /// Mean over samples of the smallest modulus after the structural zero modes.
    pub r_in_hat: f64,
    /// Pooled sorted moduli, with structural zero modes set to exactly zero.
    #[serde(skip)]
    pub moduli: Vec<f64>,
}

fn zero_mode_count(spec: &EnsembleSpec, n: usize) -> usize {
    match *spec {
        EnsembleSpec::FreePoissonNH { q } => n.saturating_sub((q * n as f64).round() as usize),
        _ => 0,
    }
}

fn annulus_area(lo: f64, hi: f64) -> f64 {
    PI * (hi * hi - lo * lo)
}

fn check_samples(samples: &[SpectralSample], edges: &[f64]) -> Result<usize> {
    let first = samples.first().ok_or_else(|| Error::InvalidInput("no samples".into()))?;
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("bin edges must be increasing".into()));
    }
    if samples.iter().any(|s| s.n != first.n || s.eigenvalues.len() != s.n) {
        return Err(Error::InvalidInput("samples disagree on N".into()));
    }
    Ok(first.n)
}

/// Radial CDF at the edges, per-annulus overlap density when overlaps are
/// present, and the radius estimates.
pub fn empirical_profile(samples: &[SpectralSample], edges: &[f64]) -> Result<EmpiricalProfile> {
    let n = check_samples(samples, edges)?;
    let bins = edges.len() - 1;
    let s_count = samples.len();
    let with_overlaps = samples.iter().all(|s| s.overlaps.is_some());

    let mut moduli = Vec::with_capacity(n * s_count);
    let mut counts = vec![0usize; bins];
    let mut per_sample = vec![vec![0.0; bins]; s_count];
    let (mut r_out_hat, mut r_in_hat) = (0.0, 0.0);
    for (si, s) in samples.iter().enumerate() {
        let zeros = zero_mode_count(&s.ensemble, n);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| s.eigenvalues[a].norm().total_cmp(&s.eigenvalues[b].norm()));
        r_out_hat += s.eigenvalues[order[n - 1]].norm();
        r_in_hat += s.eigenvalues[order[zeros.min(n - 1)]].norm();
        for (rank, &a) in order.iter().enumerate() {
            let r = if rank < zeros { 0.0 } else { s.eigenvalues[a].norm() };
            moduli.push(r);
            // bins are half-open [lo, hi) except the last, which is closed
            let b = edges.partition_point(|&e| e <= r);
            let b = if b == edges.len() && r == edges[bins] { bins } else { b };
            if b >= 1 && b <= bins {
                counts[b - 1] += 1;
                if let Some(o) = &s.overlaps {
                    per_sample[si][b - 1] += o[a];
                }
            }
        }
    }
    moduli.sort_by(f64::total_cmp);
    let total = moduli.len() as f64;
    let f_hat = edges.iter().map(|&e| moduli.partition_point(|&r| r <= e) as f64 / total).collect();

    let nn = (n * n) as f64;
    let (o_hat, o_stderr) = if with_overlaps {
        let mut mean = vec![0.0; bins];
        let mut se = vec![0.0; bins];
        for b in 0..bins {
            let area = annulus_area(edges[b], edges[b + 1]);
            let vals: Vec<f64> = per_sample.iter().map(|v| v[b] / (nn * area)).collect();
            let m = vals.iter().sum::<f64>() / s_count as f64;
            let var = if s_count > 1 {
                vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (s_count - 1) as f64
            } else {
                f64::NAN
            };
            mean[b] = m;
            se[b] = (var / s_count as f64).sqrt();
        }
        (Some(mean), Some(se))
    } else {
        (None, None)
    };
    let empty_bins: Vec<usize> = (0..bins).filter(|&b| counts[b] == 0).collect();
    if !empty_bins.is_empty() {
        log::debug!("{} empty radial bins", empty_bins.len());
    }
    let r_out_max = r_out_hat / s_count as f64;
    let r_out_hat = half_density_edge(&moduli, n as f64, r_out_max).unwrap_or(r_out_max);
    Ok(EmpiricalProfile {
        n,
        sample_count: s_count,
        bin_edges: edges.to_vec(),
        f_hat,
        counts,
        o_hat,
        o_stderr,
        empty_bins,
        r_out_hat,
        r_out_max,
        r_in_hat: r_in_hat / s_count as f64,
        moduli,
    })
}

/// Density per eigenvalue in the annulus `[lo, hi)` of the sorted moduli.
fn annulus_density(moduli: &[f64], total: f64, lo: f64, hi: f64) -> f64 {
    let count = moduli.partition_point(|&r| r < hi) - moduli.partition_point(|&r| r < lo);
    count as f64 / (total * annulus_area(lo, hi))
}

/// Radius where the density falls to half of its inward linear trend. A
/// soft edge is an erfc profile of width `w = (2 pi N rho)^{-1/2}` centred on
/// the limiting edge, so the half-density point has no leading-order bias.
fn half_density_edge(moduli: &[f64], n: f64, r_guess: f64) -> Option<f64> {
    let total = moduli.len() as f64;
    let mut r = r_guess;
    for _ in 0..4 {
        let rho_in = annulus_density(moduli, total, 0.7 * r, 0.85 * r);
        if !(rho_in > 0.0) {
            return None;
        }
        let w = 1.0 / (2.0 * PI * n * rho_in).sqrt();
        if 8.0 * w > 0.5 * r {
            return None;
        }
        // linear trend of the density from bins of width w/2 on [r - 8w, r - 4w]
        let h = 0.5 * w;
        let fit: Vec<(f64, f64)> = (0..8)
            .map(|i| {
                let lo = r - 8.0 * w + i as f64 * h;
                (lo + 0.5 * h, annulus_density(moduli, total, lo, lo + h))
            })
            .collect();
        let mx = fit.iter().map(|p| p.0).sum::<f64>() / 8.0;
        let my = fit.iter().map(|p| p.1).sum::<f64>() / 8.0;
        let sxx: f64 = fit.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let trend = |x: f64| my + slope * (x - mx);
        // first crossing of ratio 1/2 scanning outwards from r - 4w
        let ratio = |i: usize| {
            let lo = r - 4.0 * w + i as f64 * h;
            (lo + 0.5 * h, annulus_density(moduli, total, lo, lo + h) / trend(lo + 0.5 * h))
        };
        let mut prev = ratio(0);
        let mut next_r = None;
        for i in 1..32 {
            let cur = ratio(i);
            if prev.1 >= 0.5 && cur.1 < 0.5 {
                let t = (prev.1 - 0.5) / (prev.1 - cur.1);
                next_r = Some(prev.0 + t * (cur.0 - prev.0));
                break;
            }
            prev = cur;
        }
        let next_r = next_r?;
        if (next_r - r).abs() < 1e-3 * w {
            return Some(next_r);
        }
        r = next_r;
    }
    Some(r)
}

pub fn empirical_radial_cdf(samples: &[SpectralSample], edges: &[f64]) -> Result<EmpiricalProfile> {
    let mut p = empirical_profile(samples, edges)?;
    p.o_hat = None;
    p.o_stderr = None;
    Ok(p)
}

pub fn empirical_overlap_density(samples: &[SpectralSample], edges: &[f64]) -> Result<EmpiricalProfile> {
    if samples.iter().any(|s| s.overlaps.is_none()) {
        return Err(Error::InvalidInput("samples carry no overlaps".into()));
    }
    empirical_profile(samples, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub ks: f64,
    pub overlap_rel: f64,
    pub edge_margin_bins: usize,
    /// Absolute tolerance on the radius estimates; `None` skips the check.
    pub radius_abs: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { ks: 0.02, overlap_rel: 0.1, edge_margin_bins: 2, radius_abs: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinComparison {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub f_hat: f64,
    pub f_ref: f64,
    pub o_hat: Option<f64>,
    pub o_ref: f64,
    pub o_stderr: Option<f64>,
    pub interior: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiiComparison {
    pub r_in: f64,
    pub r_out: f64,
    pub r_in_hat: f64,
    pub r_out_hat: f64,
    pub r_out_max: f64,
    pub r_in_error: f64,
    pub r_out_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub label: String,
    pub n: usize,
    pub sample_count: usize,
    pub discarded: usize,
    pub ks_statistic: f64,
    /// Radius where the KS supremum is attained.
    pub ks_at: f64,
    pub overlap_sup_error: Option<f64>,
    pub overlap_worst_bin: Option<usize>,
    /// Largest `|O_hat - O| / stderr` over interior bins.
    pub overlap_max_zscore: Option<f64>,
    pub radii: RadiiComparison,
    pub tolerances: Tolerances,
    pub ks_pass: bool,
    pub overlap_pass: Option<bool>,
    pub radii_pass: Option<bool>,
    pub bins: Vec<BinComparison>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.ks_pass && self.overlap_pass.unwrap_or(true) && self.radii_pass.unwrap_or(true)
    }
}

/// Composite Simpson on `[a, b]` with `m` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Kolmogorov distance between the pooled moduli and a CDF given by its
/// value `f` and left limit `f_left`, taking both one-sided limits at each
/// jump of the empirical CDF.
fn ks_distance(moduli: &[f64], f: impl Fn(f64) -> f64, f_left: impl Fn(f64) -> f64) -> (f64, f64) {
    let m = moduli.len() as f64;
    let mut best = (0.0, 0.0);
    let mut i = 0;
    while i < moduli.len() {
        let x = moduli[i];
        let mut j = i;
        while j < moduli.len() && moduli[j] == x {
            j += 1;
        }
        let d = (j as f64 / m - f(x)).abs().max((i as f64 / m - f_left(x)).abs());
        if d > best.0 {
            best = (d, x);
        }
        i = j;
    }
    best
}

/// KS statistic against the analytic profile. Exact zeros sit on the
/// reference's own jump at the origin. A degenerate ring is a step at `r`;
/// moduli within `2/N` of it count as on the circle, since roundoff puts
/// them on either side.
fn ks_against(analytic: &RadialProfile, empirical: &EmpiricalProfile) -> (f64, f64) {
    let radii = analytic.radii();
    if radii.degenerate {
        let r = radii.r_out;
        let band = 2.0 / empirical.n as f64;
        let mut snapped: Vec<f64> =
            empirical.moduli.iter().map(|&m| if (m - r).abs() <= band { r } else { m }).collect();
        snapped.sort_by(f64::total_cmp);
        let step = |s: f64| if s >= r { 1.0 } else { 0.0 };
        let step_left = |s: f64| if s > r { 1.0 } else { 0.0 };
        return ks_distance(&snapped, step, step_left);
    }
    let f = |s: f64| analytic.f_at(s);
    ks_distance(&empirical.moduli, f, |s| if s > 0.0 { f(s) } else { 0.0 })
}

pub fn compare(analytic: &RadialProfile, empirical: &EmpiricalProfile, tol: &Tolerances) -> ComparisonReport {
    let radii = analytic.radii();
    let (ks, ks_at) = ks_against(analytic, empirical);
    let edges = &empirical.bin_edges;
    let bins = edges.len() - 1;

    // annuli lying inside the ring, then trimmed by the margin on both sides
    let inside: Vec<usize> = (0..bins)
        .filter(|&b| edges[b] >= radii.r_in - 1e-12 && edges[b + 1] <= radii.r_out + 1e-12 && !radii.degenerate)
        .collect();
    let interior: Vec<usize> = if inside.len() > 2 * tol.edge_margin_bins {
        inside[tol.edge_margin_bins..inside.len() - tol.edge_margin_bins].to_vec()
    } else {
        Vec::new()
    };

    let mut rows = Vec::with_capacity(bins);
    for b in 0..bins {
        let (lo, hi) = (edges[b], edges[b + 1]);
        let o_ref = simpson(|s| 2.0 * PI * s * analytic.o_at(s), lo, hi, 16) / annulus_area(lo, hi);
        rows.push(BinComparison {
            lo,
            hi,
            count: empirical.counts[b],
            f_hat: empirical.f_hat[b + 1],
            f_ref: analytic.f_at(hi),
            o_hat: empirical.o_hat.as_ref().map(|v| v[b]),
            o_ref,
            o_stderr: empirical.o_stderr.as_ref().map(|v| v[b]),
            interior: interior.contains(&b),
        });
    }

    let (mut sup, mut worst, mut zmax) = (None::<f64>, None, None::<f64>);
    if empirical.o_hat.is_some() && !interior.is_empty() {
        for &b in &interior {
            let r = &rows[b];
            let (oh, se) = (r.o_hat.unwrap(), r.o_stderr.unwrap());
            let rel = if r.o_ref > 0.0 { (oh - r.o_ref).abs() / r.o_ref } else { f64::INFINITY };
            if sup.map_or(true, |s| rel > s) {
                sup = Some(rel);
                worst = Some(b);
            }
            if se > 0.0 {
                let z = (oh - r.o_ref).abs() / se;
                zmax = Some(zmax.map_or(z, |m| m.max(z)));
            }
        }
    }

    let radii_cmp = RadiiComparison {
        r_in: radii.r_in,
        r_out: radii.r_out,
        r_in_hat: empirical.r_in_hat,
        r_out_hat: empirical.r_out_hat,
        r_out_max: empirical.r_out_max,
        r_in_error: (empirical.r_in_hat - radii.r_in).abs(),
        r_out_error: (empirical.r_out_hat - radii.r_out).abs(),
    };
    // with r_in = 0 the smallest modulus is a sampling statistic of order
    // N^{-1/2}, not an edge, so only a genuine hole is checked
    let radii_pass = tol
        .radius_abs
        .map(|t| radii_cmp.r_out_error <= t && (radii.r_in == 0.0 || radii_cmp.r_in_error <= t));

    ComparisonReport {
        label: analytic.header.label.clone(),
        n: empirical.n,
        sample_count: empirical.sample_count,
        discarded: 0,
        ks_statistic: ks,
        ks_at,
        overlap_sup_error: sup,
        overlap_worst_bin: worst,
        overlap_max_zscore: zmax,
        radii: radii_cmp,
        tolerances: *tol,
        ks_pass: ks <= tol.ks,
        overlap_pass: sup.map(|s| s <= tol.overlap_rel),
        radii_pass,
        bins: rows,
    }
}

/// Hermitian matrices built from a non-Hermitian ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "object", content = "params")]
pub enum HermitianObject {
    /// `X X^dagger - X^dagger X` for Ginibre `X`.
    Commutator { variance: f64 },
    /// `X + X^dagger`.
    HermitianPart(EnsembleSpec),
}

impl HermitianObject {
    pub fn label(&self) -> String {
        match self {
            Self::Commutator { variance } => format!("commutator(v={variance})"),
            Self::HermitianPart(spec) => format!("hermitian part of {spec}"),
        }
    }

    /// Predicted R-transform as a callable.
    pub fn predicted_r(&self) -> Result<Arc<dyn AnalyticFn>> {
        Ok(match *self {
            Self::Commutator { variance } => Arc::new(commutator_r_callable(
                &EnsembleSpec::CommutatorGinibre { variance },
                CommutatorConvention::UnitTrace,
            )?),
            Self::HermitianPart(EnsembleSpec::Ginibre { variance }) => {
                Arc::new(ClosedForm::new("R 2vz", move |z: Complex64| 2.0 * variance * z).with_derivative(move |_| {
                    Complex64::new(2.0 * variance, 0.0)
                }))
            }
            Self::HermitianPart(EnsembleSpec::HaarUnitary) => Arc::new(haar_hermitian_part_callable()),
            Self::HermitianPart(EnsembleSpec::FreePoissonNH { q }) => Arc::new(
                ClosedForm::new("R poisson hermitian part", move |z: Complex64| 2.0 * q * z / (1.0 - z * z))
                    .with_derivative(move |z| 2.0 * q * (1.0 + z * z) / ((1.0 - z * z) * (1.0 - z * z))),
            ),
            Self::HermitianPart(spec) => {
                let a = determining_sequence(&spec, 24)?;
                Arc::new(hermitian_part_r(&a).series)
            }
        })
    }

    fn sample(&self, n: usize, seed: SeedRecord) -> Result<Vec<f64>> {
        let mut rng = seed.rng();
        let m = match *self {
            Self::Commutator { variance } => {
                sample_matrix(&EnsembleSpec::CommutatorGinibre { variance }, n, &mut rng)?
            }
            Self::HermitianPart(spec) => {
                let x = sample_matrix(&spec, n, &mut rng)?;
                &x + x.adjoint()
            }
        };
        hermitian_eigenvalues(&m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianReport {
    pub label: String,
    pub n: usize,
    pub sample_count: usize,
    /// `(1/N) Tr H^2`, averaged over samples.
    pub second_moment: f64,
    /// `kappa_2 + kappa_1^2` read off the predicted R-transform.
    pub second_moment_predicted: f64,
    pub moment_tolerance: f64,
    pub moment_pass: bool,
    /// Sup over bulk bins of `|histogram - rho|`.
    pub sup_error: f64,
    pub sup_tolerance: f64,
    pub density_pass: bool,
    /// Mean over samples of the largest `|eigenvalue|`.
    pub edge_hat: f64,
    pub bins: Vec<(f64, f64, f64, bool)>,
    pub note: String,
}

impl HermitianReport {
    pub fn passed(&self) -> bool {
        self.moment_pass && self.density_pass
    }
}

/// Histogram of the pooled spectrum against the density of the predicted
/// R-transform. Bulk bins lie within 90% of the empirical edge.
pub fn hermitian_spectrum_check(
    object: &HermitianObject,
    cfg: &McConfig,
    bins: usize,
    sup_tolerance: f64,
    moment_tolerance: f64,
) -> Result<HermitianReport> {
    if cfg.n < 64 {
        return Err(Error::InvalidInput(format!("N = {} is below 64", cfg.n)));
    }
    if bins == 0 || cfg.samples == 0 {
        return Err(Error::InvalidInput("need at least one bin and one sample".into()));
    }
    faer::set_global_parallelism(faer::Par::Seq);
    let spectra: Vec<Vec<f64>> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|stream| object.sample(cfg.n, SeedRecord { master: cfg.seed, stream }))
        .collect::<Result<_>>()?;

    let nf = cfg.n as f64;
    let second_moment = spectra.iter().map(|ev| ev.iter().map(|x| x * x).sum::<f64>() / nf).sum::<f64>()
        / cfg.samples as f64;
    let edge_hat = spectra.iter().map(|ev| ev.iter().fold(0.0f64, |m, x| m.max(x.abs()))).sum::<f64>()
        / cfg.samples as f64;

    let r = object.predicted_r()?;
    let coeffs = taylor_coefficients(r.as_ref(), 2, 0.05);
    let (k1, k2) = (coeffs.coeff(0).re, coeffs.coeff(1).re);
    let second_moment_predicted = k2 + k1 * k1;

    let half = 1.05 * edge_hat;
    let width = 2.0 * half / bins as f64;
    let mut hist = vec![0usize; bins];
    for &x in spectra.iter().flatten() {
        let b = (((x + half) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
        hist[b] += 1;
    }
    let total = (cfg.n * cfg.samples) as f64;
    let opts = StieltjesOptions::default();
    let rows: Vec<(f64, f64, f64, bool)> = (0..bins)
        .into_par_iter()
        .map(|b| {
            let lo = -half + b as f64 * width;
            let hi = lo + width;
            let bulk = lo >= -0.9 * edge_hat && hi <= 0.9 * edge_hat;
            let rho = if bulk {
                let mut acc = 0.0;
                for (i, w) in [1.0, 4.0, 2.0, 4.0, 1.0].iter().enumerate() {
                    acc += w * stieltjes_density(r.as_ref(), lo + i as f64 * width / 4.0, &opts)?;
                }
                acc / 12.0
            } else {
                f64::NAN
            };
            Ok((0.5 * (lo + hi), hist[b] as f64 / (total * width), rho, bulk))
        })
        .collect::<Result<_>>()?;
    let sup_error = rows.iter().filter(|r| r.3).map(|r| (r.1 - r.2).abs()).fold(0.0, f64::max);

    let note = match object {
        HermitianObject::Commutator { .. } => {
            "unit-trace convention: R_C(z) = R(z) - R(-z) with R the R-transform of X X^dagger, \
             giving 2v^2 z/(1 - v^2 z^2); the form z/(1 - z^2) is half of it and matches no Ginibre variance"
                .to_string()
        }
        HermitianObject::HermitianPart(_) => "R_{X + X^dagger}(z) = 2z A(z^2)".to_string(),
    };
    Ok(HermitianReport {
        label: object.label(),
        n: cfg.n,
        sample_count: cfg.samples,
        second_moment,
        second_moment_predicted,
        moment_tolerance,
        moment_pass: (second_moment - second_moment_predicted).abs() <= moment_tolerance,
        sup_error,
        sup_tolerance,
        density_pass: sup_error <= sup_tolerance,
        edge_hat,
        bins: rows,
        note,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::EnsembleSpec;
    use crate::montecarlo::run_batch;
    use crate::single_ring::{build_profile, GridSpec};

    fn sample_with(eigs: Vec<Complex64>, overlaps: Option<Vec<f64>>) -> SpectralSample {
        SpectralSample {
            n: eigs.len(),
            eigenvalues: eigs,
            overlaps,
            ensemble: EnsembleSpec::ginibre(),
            seed: SeedRecord { master: 0, stream: 0 },
            condition: 1.0,
        }
    }

    #[test]
    fn cdf_counts_and_overlap_normalization() {
        let eigs = vec![Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.6), Complex64::new(-0.9, 0.0), Complex64::new(0.5, 0.5)];
        let o = vec![2.0, 3.0, 4.0, 5.0];
        let edges = radial_edges(1.0, 4);
        let p = empirical_profile(&[sample_with(eigs, Some(o))], &edges).unwrap();
        assert_eq!(p.counts, vec![1, 0, 2, 1]);
        assert_eq!(p.f_hat, vec![0.0, 0.25, 0.25, 0.75, 1.0]);
        assert_eq!(p.empty_bins, vec![1]);
        let oh = p.o_hat.unwrap();
        let area = annulus_area(0.5, 0.75);
        assert!((oh[2] - 8.0 / (16.0 * area)).abs() < 1e-15);
        assert!((p.r_out_hat - 0.9).abs() < 1e-15);
        assert!((p.r_in_hat - 0.1).abs() < 1e-15);
    }

    #[test]
    fn ks_of_exact_quantiles() {
        // moduli at the midpoints of the quantile cells of F = s^2
        let m = 1000;
        let moduli: Vec<f64> = (0..m).map(|i| ((i as f64 + 0.5) / m as f64).sqrt()).collect();
        let f = |s: f64| (s * s).min(1.0);
        let (d, _) = ks_distance(&moduli, f, f);
        assert!((d - 0.5 / m as f64).abs() < 1e-12);
    }

    #[test]
    fn ks_ignores_left_limit_at_zero_modes() {
        let moduli = vec![0.0, 0.0, 0.5f64.sqrt(), 0.75f64.sqrt()];
        let f = |s: f64| if s == 0.0 { 0.5 } else { (0.5 + s * s / 2.0).min(1.0) };
        let (d, _) = ks_distance(&moduli, f, |s| if s > 0.0 { f(s) } else { 0.0 });
        assert!(d <= 0.25 + 1e-12);
    }

    #[test]
    fn haar_matches_its_own_step() {
        let batch = run_batch(&EnsembleSpec::HaarUnitary, &McConfig::new(64, 2, 9)).unwrap();
        let emp = empirical_profile(&batch.samples, &radial_edges(1.1, 16)).unwrap();
        let haar = build_profile(&EnsembleSpec::HaarUnitary.single_ring_model().unwrap(), &GridSpec::default()).unwrap();
        assert_eq!(compare(&haar, &emp, &Tolerances::default()).ks_statistic, 0.0);
    }

    #[test]
    fn wrong_profile_fails() {
        let batch = run_batch(&EnsembleSpec::ginibre(), &McConfig::new(128, 4, 3)).unwrap();
        let edges = radial_edges(1.1, 32);
        let emp = empirical_profile(&batch.samples, &edges).unwrap();
        let haar = build_profile(&EnsembleSpec::HaarUnitary.single_ring_model().unwrap(), &GridSpec::default()).unwrap();
        let report = compare(&haar, &emp, &Tolerances::default());
        assert!(!report.passed());
        assert!(report.ks_statistic > 0.4);
        let gin = build_profile(&EnsembleSpec::ginibre().single_ring_model().unwrap(), &GridSpec::default()).unwrap();
        let report = compare(&gin, &emp, &Tolerances { ks: 0.05, ..Tolerances::default() });
        assert!(report.ks_pass, "ks = {}", report.ks_statistic);
        assert_eq!(report.bins.iter().filter(|b| b.interior).count(), 32 * 10 / 11 - 4);
    }

    #[test]
    fn edge_estimators() {
        let batch = run_batch(&EnsembleSpec::ginibre(), &McConfig::new(256, 8, 21)).unwrap();
        let emp = empirical_profile(&batch.samples, &radial_edges(1.1, 32)).unwrap();
        assert!((emp.r_out_hat - 1.0).abs() < 0.02, "half-density edge {}", emp.r_out_hat);
        assert!(emp.r_out_max > emp.r_out_hat);
        // a thin ring has no resolvable soft edge
        let haar = run_batch(&EnsembleSpec::HaarUnitary, &McConfig::new(64, 2, 1)).unwrap();
        let emp = empirical_profile(&haar.samples, &radial_edges(1.1, 32)).unwrap();
        assert!((emp.r_out_hat - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(empirical_profile(&[], &radial_edges(1.0, 4)).is_err());
        let s = sample_with(vec![Complex64::new(0.1, 0.0)], None);
        assert!(empirical_overlap_density(&[s], &radial_edges(1.0, 4)).is_err());
    }

    #[test]
    fn ginibre_hermitian_part_small() {
        let obj = HermitianObject::HermitianPart(EnsembleSpec::ginibre());
        let rep = hermitian_spectrum_check(&obj, &McConfig::new(128, 8, 11), 24, 0.08, 0.1).unwrap();
        assert!((rep.second_moment_predicted - 2.0).abs() < 1e-10);
        assert!(rep.passed(), "{rep:?}");
    }
}
