use std::io::BufReader;

use ringlab_core::ensembles::{determining_sequence, reference_profile, EnsembleSpec};
use ringlab_core::montecarlo::{empirical_profile, radial_edges, run_batch, McConfig};
use ringlab_core::single_ring::{
    build_profile, overlap_correlator, radial_cdf, radial_density, ring_radii, GridSpec, RadialProfile,
};
use ringlab_core::transforms::{s_from_a, stieltjes_density, StieltjesOptions};
use ringlab_core::{TransformKind, TransformSeries};

#[test]
fn free_poisson_closed_forms() {
    for q in [0.5, 1.0, 2.0] {
        let spec = EnsembleSpec::FreePoissonNH { q };
        let model = spec.single_ring_model().unwrap();
        let r_out = ring_radii(&model).unwrap().r_out;
        assert!((r_out - q.sqrt()).abs() < 1e-12);
        for j in 1..=100 {
            let s = r_out * j as f64 / 101.0;
            let f = (1.0 - q + ((q - 1.0) * (q - 1.0) + 4.0 * s * s).sqrt()) / 2.0;
            assert!((radial_cdf(&model, s).unwrap() - f).abs() < 1e-10, "q={q} s={s}");
            let (_, rho, o) = reference_profile(&spec, s).unwrap();
            assert!((radial_density(&model, s).unwrap() - rho).abs() < 1e-8 * rho.max(1.0));
            assert!((overlap_correlator(&model, s).unwrap() - o).abs() < 1e-8 * o.max(1.0));
        }
    }
}

#[test]
fn profile_csv_round_trip() {
    let model = EnsembleSpec::GinibreProduct { k: 2 }.single_ring_model().unwrap();
    let mut p = build_profile(&model, &GridSpec { points: 64, margin: 0.1 }).unwrap();
    p.header.config = Some(serde_json::json!({ "points": 64 }));
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    let back = RadialProfile::read_csv(BufReader::new(&buf[..])).unwrap();
    assert_eq!(back, p);
}

#[test]
fn transform_json_round_trip() {
    let a = determining_sequence(&EnsembleSpec::HaarUnitary, 12).unwrap();
    let s = s_from_a(&a).unwrap();
    let text = serde_json::to_string(&s).unwrap();
    let back: TransformSeries = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
    assert_eq!(back.kind, TransformKind::S);
}

#[test]
fn zero_modes_show_in_the_empirical_cdf() {
    let batch = run_batch(&EnsembleSpec::FreePoissonNH { q: 0.5 }, &McConfig::new(128, 4, 8)).unwrap();
    let emp = empirical_profile(&batch.samples, &radial_edges(1.1 * 0.5f64.sqrt(), 32)).unwrap();
    assert!((emp.f_hat[0] - 0.5).abs() < 1e-12);
    // numerically the zero modes are tiny but nonzero eigenvalues
    let smallest: Vec<f64> = batch.samples[0].eigenvalues.iter().map(|l| l.norm()).filter(|&r| r < 1e-6).collect();
    assert_eq!(smallest.len(), 64);
}

#[test]
fn haar_cdf_jumps_at_one() {
    let batch = run_batch(&EnsembleSpec::HaarUnitary, &McConfig::new(128, 2, 4)).unwrap();
    let emp = empirical_profile(&batch.samples, &[0.0, 1.0 - 1.0 / 128.0, 1.0 + 1.0 / 128.0, 2.0]).unwrap();
    assert_eq!(emp.f_hat[1], 0.0);
    assert_eq!(emp.f_hat[2], 1.0);
}

#[test]
fn product_of_two_ginibre_edge() {
    let batch = run_batch(&EnsembleSpec::GinibreProduct { k: 2 }, &McConfig::new(512, 2, 13)).unwrap();
    let emp = empirical_profile(&batch.samples, &radial_edges(1.1, 32)).unwrap();
    assert!((emp.r_out_hat - 1.0).abs() < 0.05, "{}", emp.r_out_hat);
}

#[test]
fn ginibre_bulk_overlap_scaling() {
    // average O_aa / N over eigenvalues with |lambda| near 0.5; the
    // conditional law has an infinite variance, so a single matrix's
    // ~100 eigenvalues are not enough and the pool spans 40 matrices
    let n = 512;
    let batch = run_batch(&EnsembleSpec::ginibre(), &McConfig::new(n, 40, 17)).unwrap();
    let picked: Vec<f64> = batch
        .samples
        .iter()
        .flat_map(|s| s.eigenvalues.iter().zip(s.overlaps.as_ref().unwrap()))
        .filter(|(l, _)| (l.norm() - 0.5).abs() < 0.05)
        .map(|(_, &o)| o / n as f64)
        .collect();
    let mean = picked.iter().sum::<f64>() / picked.len() as f64;
    assert!((mean - 0.75).abs() < 0.1 * 0.75, "mean O/N = {mean}");
}

#[test]
fn hermitian_part_of_haar_is_arcsine() {
    let r = ringlab_core::ensembles::haar_hermitian_part_callable();
    let opts = StieltjesOptions::default();
    for &x in &[0.0, 0.5, 1.2, 1.9] {
        let want = 1.0 / (std::f64::consts::PI * (4.0f64 - x * x).sqrt());
        assert!((stieltjes_density(&r, x, &opts).unwrap() - want).abs() < 1e-4, "x = {x}");
    }
}
