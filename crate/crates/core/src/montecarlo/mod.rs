//! Finite-N sampling, eigendecomposition with diagonal overlaps, and
//! empirical radial statistics.
//!
//! Every sample draws from its own ChaCha8 stream: the master seed picks the
//! key and the sample index picks the stream, so a batch is bit-identical
//! regardless of thread count or completion order.

mod stats;

use std::io::Write;

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Par, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleSpec;
use crate::error::{Error, Result};

pub use stats::{
    compare, empirical_overlap_density, empirical_profile, empirical_radial_cdf, hermitian_spectrum_check,
    radial_edges, BinComparison, ComparisonReport, EmpiricalProfile, HermitianObject, HermitianReport,
    RadiiComparison, Tolerances,
};

pub const DEFAULT_COND_THRESHOLD: f64 = 1e12;

/// Master seed and per-sample stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub master: u64,
    pub stream: u64,
}

impl SeedRecord {
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub n: usize,
    pub eigenvalues: Vec<Complex64>,
    /// `O_aa = <L_a|L_a><R_a|R_a>`; absent for Hermitian runs.
    pub overlaps: Option<Vec<f64>>,
    pub ensemble: EnsembleSpec,
    pub seed: SeedRecord,
    /// `||R||_F ||R^{-1}||_F` for the eigenvector matrix.
    pub condition: f64,
}

impl SpectralSample {
    /// Writes `re,im,overlap` rows under a JSON comment line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let meta = serde_json::json!({
            "n": self.n, "ensemble": self.ensemble, "seed": self.seed, "condition": self.condition,
        });
        writeln!(w, "# {meta}")?;
        writeln!(w, "re,im,overlap")?;
        for (i, l) in self.eigenvalues.iter().enumerate() {
            match &self.overlaps {
                Some(o) => writeln!(w, "{:.16e},{:.16e},{:.16e}", l.re, l.im, o[i])?,
                None => writeln!(w, "{:.16e},{:.16e},", l.re, l.im)?,
            }
        }
        Ok(())
    }
}

fn complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    let sd = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

/// Rows by columns matrix of iid complex Gaussians with the given variance,
/// filled column by column.
pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, variance: f64) -> Mat<Complex64> {
    let mut m = Mat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_gaussian(rng, variance);
        }
    }
    m
}

/// Haar unitary from the QR factors of a Ginibre draw, with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng>(rng: &mut R, n: usize) -> Mat<Complex64> {
    let g = gaussian_matrix(rng, n, n, 1.0);
    let qr = g.qr();
    let mut q = qr.compute_Q();
    let r = qr.R();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// One draw of the ensemble at size `n`. For the commutator this is the
/// Hermitian matrix `X X^dagger - X^dagger X`.
pub fn sample_matrix<R: Rng>(spec: &EnsembleSpec, n: usize, rng: &mut R) -> Result<Mat<Complex64>> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::InvalidInput(format!("matrix size must be at least 2, got {n}")));
    }
    let nf = n as f64;
    Ok(match *spec {
        EnsembleSpec::Ginibre { variance } => gaussian_matrix(rng, n, n, variance / nf),
        EnsembleSpec::HaarUnitary => haar_unitary(rng, n),
        EnsembleSpec::GinibreProduct { k } => {
            let mut m = gaussian_matrix(rng, n, n, 1.0 / nf);
            for _ in 1..k {
                m = &m * gaussian_matrix(rng, n, n, 1.0 / nf);
            }
            m
        }
        EnsembleSpec::FreePoissonNH { q } => {
            let t = (q * nf).round() as usize;
            if t == 0 {
                return Err(Error::InvalidInput(format!("T = round(qN) vanishes for q = {q}, N = {n}")));
            }
            // unit-variance entries and a 1/N prefactor give (1/N) Tr M M^dagger -> q
            let x = gaussian_matrix(rng, n, t, 1.0);
            let y = gaussian_matrix(rng, n, t, 1.0);
            let mut m = &x * y.adjoint();
            m *= faer::Scale(Complex64::new(1.0 / nf, 0.0));
            m
        }
        EnsembleSpec::CommutatorGinibre { variance } => {
            let x = gaussian_matrix(rng, n, n, variance / nf);
            &x * x.adjoint() - x.adjoint() * &x
        }
    })
}

/// Eigenvalues, diagonal overlaps and the Frobenius condition estimate of the
/// eigenvector matrix. Left eigenvectors are the rows of `R^{-1}`.
pub fn eigen_overlaps(m: &Mat<Complex64>, cond_threshold: f64) -> Result<(Vec<Complex64>, Vec<f64>, f64)> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    let n = m.nrows();
    let eig = m.eigen().map_err(|e| Error::NoConvergence(format!("eigendecomposition: {e:?}")))?;
    let r = eig.U();
    let lambda: Vec<Complex64> = (0..n).map(|i| eig.S()[i]).collect();
    let rinv = r.partial_piv_lu().inverse();
    let mut overlaps = Vec::with_capacity(n);
    let (mut fr, mut fl) = (0.0, 0.0);
    for a in 0..n {
        let right: f64 = (0..n).map(|i| r[(i, a)].norm_sqr()).sum();
        let left: f64 = (0..n).map(|j| rinv[(a, j)].norm_sqr()).sum();
        fr += right;
        fl += left;
        overlaps.push(right * left);
    }
    let cond = (fr * fl).sqrt();
    if !cond.is_finite() || cond > cond_threshold || overlaps.iter().any(|o| !o.is_finite()) {
        return Err(Error::IllConditioned(cond));
    }
    Ok((lambda, overlaps, cond))
}

/// Eigenvalues of a Hermitian matrix, as complex numbers with zero imaginary part.
pub fn hermitian_eigenvalues(m: &Mat<Complex64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::NoConvergence(format!("Hermitian eigendecomposition: {e:?}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub cond_threshold: f64,
}

impl McConfig {
    pub fn new(n: usize, samples: usize, seed: u64) -> Self {
        Self { n, samples, seed, cond_threshold: DEFAULT_COND_THRESHOLD }
    }
}

/// Draws and decomposes sample `index` of a batch.
pub fn sample_spectrum(spec: &EnsembleSpec, n: usize, seed: SeedRecord, cond_threshold: f64) -> Result<SpectralSample> {
    let mut rng = seed.rng();
    let m = sample_matrix(spec, n, &mut rng)?;
    let (eigenvalues, overlaps, condition) = match spec {
        EnsembleSpec::CommutatorGinibre { .. } => {
            let ev = hermitian_eigenvalues(&m)?;
            (ev.into_iter().map(|x| Complex64::new(x, 0.0)).collect(), None, 1.0)
        }
        _ => {
            let (l, o, c) = eigen_overlaps(&m, cond_threshold)?;
            (l, Some(o), c)
        }
    };
    Ok(SpectralSample { n, eigenvalues, overlaps, ensemble: *spec, seed, condition })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub samples: Vec<SpectralSample>,
    /// Stream indices dropped as ill-conditioned.
    pub discarded: Vec<u64>,
}

impl Batch {
    pub fn discard_rate(&self) -> f64 {
        let total = self.samples.len() + self.discarded.len();
        if total == 0 {
            0.0
        } else {
            self.discarded.len() as f64 / total as f64
        }
    }
}

/// Samples streams `0..samples` in parallel on the current rayon pool. The
/// dense kernels run sequentially inside each worker.
pub fn run_batch(spec: &EnsembleSpec, cfg: &McConfig) -> Result<Batch> {
    if cfg.samples == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    faer::set_global_parallelism(Par::Seq);
    let results: Vec<(u64, Result<SpectralSample>)> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|stream| {
            let seed = SeedRecord { master: cfg.seed, stream };
            (stream, sample_spectrum(spec, cfg.n, seed, cfg.cond_threshold))
        })
        .collect();
    let mut samples = Vec::with_capacity(cfg.samples);
    let mut discarded = Vec::new();
    for (stream, r) in results {
        match r {
            Ok(s) => samples.push(s),
            Err(Error::IllConditioned(c)) => {
                log::warn!("discarding sample {stream}: eigenvector condition estimate {c:e}");
                discarded.push(stream);
            }
            Err(e) => return Err(e),
        }
    }
    if samples.is_empty() {
        return Err(Error::NoConvergence("every sample was ill-conditioned".into()));
    }
    Ok(Batch { samples, discarded })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        SeedRecord { master: seed, stream: 0 }.rng()
    }

    #[test]
    fn ginibre_trace_normalization() {
        let n = 512;
        let x = sample_matrix(&EnsembleSpec::ginibre(), n, &mut rng(1)).unwrap();
        let tr: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| x[(i, j)].norm_sqr()).sum();
        assert!((tr / n as f64 - 1.0).abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn haar_is_unitary() {
        let u = sample_matrix(&EnsembleSpec::HaarUnitary, 256, &mut rng(2)).unwrap();
        let sv = u.singular_values().unwrap();
        assert!(sv.iter().all(|s| (s - 1.0).abs() < 1e-10));
    }

    #[test]
    fn haar_phases_are_uniform() {
        // without the phase correction the diagonal of U is biased towards
        // positive real parts; with it, E[U_00] = 0
        let mut acc = Complex64::new(0.0, 0.0);
        let reps = 400;
        for s in 0..reps {
            let u = sample_matrix(&EnsembleSpec::HaarUnitary, 4, &mut rng(100 + s)).unwrap();
            acc += u[(0, 0)];
        }
        // |U_00|^2 has mean 1/4, so the mean over reps has sd 1/(2 sqrt(reps))
        assert!((acc / reps as f64).norm() < 4.0 / (2.0 * (reps as f64).sqrt()));
    }

    #[test]
    fn jordan_like_overlap() {
        let (a, d) = (0.7, 0.3);
        let mut m = Mat::<Complex64>::zeros(2, 2);
        m[(0, 1)] = Complex64::new(a, 0.0);
        m[(1, 1)] = Complex64::new(d, 0.0);
        let (l, o, _) = eigen_overlaps(&m, DEFAULT_COND_THRESHOLD).unwrap();
        let want = 1.0 + a * a / (d * d);
        for (li, oi) in l.iter().zip(&o) {
            assert!((oi - want).abs() < 1e-10, "lambda {li}: {oi} vs {want}");
        }
    }

    #[test]
    fn normal_matrix_overlaps_are_one() {
        let u = sample_matrix(&EnsembleSpec::HaarUnitary, 64, &mut rng(3)).unwrap();
        let (_, o, _) = eigen_overlaps(&u, DEFAULT_COND_THRESHOLD).unwrap();
        assert!(o.iter().all(|x| (x - 1.0).abs() < 1e-8));
    }

    #[test]
    fn defective_matrix_is_rejected() {
        let mut m = Mat::<Complex64>::zeros(3, 3);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        m[(1, 2)] = Complex64::new(1.0, 0.0);
        assert!(matches!(eigen_overlaps(&m, DEFAULT_COND_THRESHOLD), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn overlaps_bounded_below() {
        let batch = run_batch(&EnsembleSpec::ginibre(), &McConfig::new(64, 4, 9)).unwrap();
        for s in &batch.samples {
            assert!(s.overlaps.as_ref().unwrap().iter().all(|&o| o >= 1.0 - 1e-8));
            assert_eq!(s.eigenvalues.len(), 64);
        }
    }

    #[test]
    fn batches_are_deterministic() {
        let cfg = McConfig::new(48, 6, 77);
        let spec = EnsembleSpec::FreePoissonNH { q: 2.0 };
        let a = run_batch(&spec, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| run_batch(&spec, &cfg)).unwrap();
        assert_eq!(a, b);
        let c = run_batch(&spec, &McConfig::new(48, 6, 78)).unwrap();
        assert_ne!(a.samples[0].eigenvalues, c.samples[0].eigenvalues);
    }

    #[test]
    fn commutator_is_hermitian_and_traceless() {
        let s = sample_spectrum(&EnsembleSpec::CommutatorGinibre { variance: 1.0 }, 64, SeedRecord { master: 5, stream: 0 }, 1e12)
            .unwrap();
        assert!(s.overlaps.is_none());
        let tr: f64 = s.eigenvalues.iter().map(|l| l.re).sum();
        assert!(tr.abs() < 1e-10);
    }

    #[test]
    fn poisson_rejects_empty_t() {
        assert!(sample_matrix(&EnsembleSpec::FreePoissonNH { q: 0.01 }, 10, &mut rng(0)).is_err());
    }

    #[test]
    fn csv_dump_shape() {
        let s = sample_spectrum(&EnsembleSpec::ginibre(), 8, SeedRecord { master: 1, stream: 2 }, 1e12).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("# {"));
        assert_eq!(lines[1], "re,im,overlap");
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[2].split(',').count(), 3);
    }
}
