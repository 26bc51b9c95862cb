use std::fs;
use std::io::Read;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use ringlab_core::ensembles::{determining_sequence, raney, EnsembleSpec};
use ringlab_core::montecarlo::{
    compare, empirical_profile, hermitian_spectrum_check, radial_edges, run_batch, HermitianObject, McConfig, Tolerances,
};
use ringlab_core::single_ring::{build_profile, ring_radii, GridSpec, SingleRingModel};
use ringlab_core::transforms::{
    a_from_r, a_to_k, cumulants_from_moments, k_to_a, moments_from_cumulants, nc_cumulant_oracle, r_from_a, r_to_s,
    s_from_a, s_from_a_via_k, s_from_a_via_r, s_to_r,
};
use ringlab_core::{DeterminingSequence, MomentData, TransformKind, TransformSeries, TruncatedSeries};

use crate::convert::convert;
use crate::{emit, parse_kind, CliError, CliResult, EnsembleArgs, McArgs, RingArgs, TransformArgs, VerifyArgs};

fn read_input(src: &str) -> CliResult<String> {
    if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(src).map_err(|e| CliError::Input(format!("{src}: {e}")))
    }
}

/// Accepts `{"kind", "coeffs"}`, `{"m": [...]}`, `{"kappa": [...]}` or a bare
/// list of reals read as coefficients of `kind`.
fn parse_series(text: &str, kind: TransformKind) -> CliResult<TransformSeries> {
    let bad = |e: String| CliError::Input(format!("series file: {e}"));
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let t = match &v {
        Value::Array(_) => {
            let xs: Vec<f64> = serde_json::from_value(v).map_err(|e| bad(e.to_string()))?;
            TransformSeries::from_real(kind, &xs)?
        }
        Value::Object(o) if o.contains_key("coeffs") => {
            serde_json::from_value(v.clone()).map_err(|e| bad(e.to_string()))?
        }
        Value::Object(o) if o.contains_key("m") => {
            serde_json::from_value::<MomentData>(v.clone()).map_err(|e| bad(e.to_string()))?.to_transform()
        }
        Value::Object(o) if o.contains_key("kappa") => serde_json::from_value::<ringlab_core::CumulantData>(v.clone())
            .map_err(|e| bad(e.to_string()))?
            .to_transform(),
        _ => return Err(bad("expected a list or an object with coeffs, m or kappa".into())),
    };
    t.expect_kind(kind)?;
    Ok(t)
}

fn with_config<T: Serialize>(config: &impl Serialize, body: &T) -> String {
    let mut v = serde_json::to_value(body).expect("serializable");
    let cfg = serde_json::to_value(config).expect("serializable");
    match &mut v {
        Value::Object(o) => {
            o.insert("config".into(), cfg);
        }
        other => *other = json!({ "config": cfg, "result": other.clone() }),
    }
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

const DEFAULT_ORDER: usize = 16;

pub fn transform(args: &TransformArgs) -> CliResult<()> {
    let from = parse_kind(&args.from)?;
    let to = parse_kind(&args.to)?;
    let input = parse_series(&read_input(&args.input)?, from)?;
    let order = args.order.unwrap_or(input.series.order().max(DEFAULT_ORDER));
    // omitted coefficients are zero, so a short input is padded rather than
    // dictating the output length
    let input = TransformSeries::new(input.kind, input.series.resize(order));
    let out = convert(&input, to)?;
    emit(args.output.as_deref(), &with_config(args, &out))
}

fn ensemble_spec(e: &EnsembleArgs) -> CliResult<EnsembleSpec> {
    let name = e.ensemble.as_deref().ok_or_else(|| CliError::Input("--ensemble is required".into()))?;
    Ok(EnsembleSpec::by_name(name, e.variance, e.k, e.q)?)
}

pub fn ring(args: &RingArgs) -> CliResult<()> {
    let model = match (&args.s_series, &args.ensemble.ensemble) {
        (Some(path), _) => {
            let s = parse_series(&read_input(&path.to_string_lossy())?, TransformKind::S)?;
            SingleRingModel::new(format!("S from {}", path.display()), Arc::new(s.series))
        }
        (None, Some(_)) => ensemble_spec(&args.ensemble)?.single_ring_model()?,
        (None, None) => return Err(CliError::Input("give --ensemble or --s-series".into())),
    };
    let radii = ring_radii(&model)?;
    if radii.degenerate {
        log::warn!("degenerate ring: r_in = r_out = {}; the spectrum lies on a circle", radii.r_out);
        eprintln!("warning: degenerate ring, r_in = r_out = {}", radii.r_out);
    }
    let mut profile = build_profile(&model, &GridSpec { points: args.points, margin: args.margin })?;
    profile.header.config = Some(serde_json::to_value(args).expect("serializable"));
    println!("r_in = {:.16e}", radii.r_in);
    println!("r_out = {:.16e}", radii.r_out);
    let mut buf = Vec::new();
    profile.write_csv(&mut buf)?;
    emit(args.output.as_deref(), &String::from_utf8(buf).expect("ascii csv"))
}

pub fn mc(args: &McArgs) -> CliResult<()> {
    let seed = args.seed.ok_or_else(|| CliError::Input("a seed is required (--seed or RINGLAB_SEED)".into()))?;
    let spec = ensemble_spec(&args.ensemble)?;
    let cfg = McConfig::new(args.n, args.samples, seed);

    let hermitian = match spec {
        EnsembleSpec::CommutatorGinibre { variance } => Some(HermitianObject::Commutator { variance }),
        _ if args.hermitian_part => Some(HermitianObject::HermitianPart(spec)),
        _ => None,
    };
    if let Some(object) = hermitian {
        let rep = hermitian_spectrum_check(&object, &cfg, args.bins, args.density_tol, args.moment_tol)?;
        emit(args.output.as_deref(), &with_config(args, &rep))?;
        return if rep.passed() {
            Ok(())
        } else {
            Err(CliError::Tolerance(format!(
                "second moment {:.4} vs {:.4}, density sup error {:.4}",
                rep.second_moment, rep.second_moment_predicted, rep.sup_error
            )))
        };
    }

    let reference = match &args.against {
        Some(name) => EnsembleSpec::by_name(name, args.ensemble.variance, args.ensemble.k, args.ensemble.q)?,
        None => spec,
    };
    let analytic = build_profile(&reference.single_ring_model()?, &GridSpec::default())?;
    let batch = run_batch(&spec, &cfg)?;
    if let Some(dir) = &args.dump {
        fs::create_dir_all(dir)?;
        for s in &batch.samples {
            let mut buf = Vec::new();
            s.write_csv(&mut buf)?;
            fs::write(dir.join(format!("sample_{:04}.csv", s.seed.stream)), buf)?;
        }
    }
    let edges = radial_edges(1.1 * analytic.radii().r_out, args.bins);
    let emp = empirical_profile(&batch.samples, &edges)?;
    let tol = Tolerances {
        ks: args.ks_tol,
        overlap_rel: args.overlap_tol,
        edge_margin_bins: args.margin_bins,
        radius_abs: args.radius_tol,
    };
    let mut rep = compare(&analytic, &emp, &tol);
    rep.discarded = batch.discarded.len();
    emit(args.output.as_deref(), &with_config(args, &rep))?;
    if rep.passed() {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!(
            "KS {:.4} (tol {}), overlap sup rel err {:?} (tol {})",
            rep.ks_statistic, tol.ks, rep.overlap_sup_error, tol.overlap_rel
        )))
    }
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

impl Check {
    fn new(name: &str, worst: ringlab_core::Result<f64>, tol: f64) -> Self {
        match worst {
            Ok(w) => Self { name: name.into(), passed: w <= tol, detail: format!("max error {w:.3e} (tol {tol:.0e})") },
            Err(e) => Self { name: name.into(), passed: false, detail: e.to_string() },
        }
    }
}

fn random_admissible(rng: &mut ChaCha8Rng, len: usize) -> DeterminingSequence {
    // alpha_1 near one, higher cumulants shrinking like 4^-n
    let alphas: Vec<f64> = (0..len)
        .map(|k| if k == 0 { rng.random_range(0.8..1.25) } else { rng.random_range(-1.0..1.0) * 0.25f64.powi(k as i32) })
        .collect();
    DeterminingSequence::from_alphas(&alphas).expect("finite")
}

/// Largest coefficient error, relative once a reference coefficient exceeds one.
fn rel_diff(x: &TruncatedSeries, reference: &TruncatedSeries) -> f64 {
    let order = x.order().min(reference.order());
    (0..=order)
        .map(|n| (x.coeff(n) - reference.coeff(n)).norm() / reference.coeff(n).norm().max(1.0))
        .fold(0.0, f64::max)
}

fn triangle_error(a: &DeterminingSequence) -> ringlab_core::Result<f64> {
    let direct = s_from_a(a)?.series;
    Ok(rel_diff(&s_from_a_via_k(a)?.series, &direct).max(rel_diff(&s_from_a_via_r(a)?.series, &direct)))
}

fn round_trip_error(a: &DeterminingSequence) -> ringlab_core::Result<f64> {
    let r = r_from_a(a)?;
    let mut worst = rel_diff(a_from_r(&r)?.series(), a.series());
    worst = worst.max(rel_diff(&r_from_a(&a_from_r(&r)?)?.series, &r.series));
    worst = worst.max(rel_diff(k_to_a(&a_to_k(a)?)?.series(), a.series()));
    worst = worst.max(rel_diff(&s_to_r(&r_to_s(&r)?)?.series, &r.series));
    Ok(worst)
}

pub fn verify(args: &VerifyArgs) -> CliResult<()> {
    if args.order == 0 {
        return Err(CliError::Input("--order must be positive".into()));
    }
    let tol = args.tol.unwrap_or(if args.order > 16 { 1e-8 } else { 1e-9 });
    let len = args.order + 1;
    let user = match &args.input {
        Some(p) => Some(DeterminingSequence::from_transform(&parse_series(
            &read_input(&p.to_string_lossy())?,
            TransformKind::A,
        )?)?),
        None => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let inputs: Vec<DeterminingSequence> = (0..args.cases).map(|_| random_admissible(&mut rng, len)).collect();
    let fold = |f: fn(&DeterminingSequence) -> ringlab_core::Result<f64>| {
        inputs.iter().try_fold(0.0f64, |m, a| Ok(m.max(f(a)?)))
    };

    let mut checks = vec![
        Check::new("triangle A->S direct / via K / via R", fold(triangle_error), tol),
        Check::new("round trips A<->R, A<->K, R<->S", fold(round_trip_error), tol),
    ];

    let nc_order = args.order.min(8);
    let nc = (0..args.cases).try_fold(0.0f64, |m, _| {
        let moments = MomentData::new((0..nc_order).map(|_| rng.random_range(-1.0..1.0)).collect())?;
        let kappa = cumulants_from_moments(&moments);
        let back = moments_from_cumulants(&kappa);
        let mut w = m.max(back.m.iter().zip(&moments.m).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        for n in 1..=nc_order {
            w = w.max((kappa.kappa[n - 1] - nc_cumulant_oracle(&moments, n)?).abs());
        }
        Ok(w)
    });
    checks.push(Check::new("moments -> cumulants vs non-crossing Moebius sum", nc, 1e-10));

    // relative errors: the exact values outgrow f64 integers near n = 30
    let product = |k: u64| -> ringlab_core::Result<f64> {
        let a = determining_sequence(&EnsembleSpec::GinibreProduct { k: k as u32 }, len.min(30))?;
        let mut w: f64 = 0.0;
        for n in 1..=a.len() as u64 {
            // the exact integer leaves u128 before n = 30 for k = 4
            let Ok(exact) = raney(n - 1, k - 1, k - 1) else { break };
            let exact = exact as f64;
            w = w.max((a.alpha(n as usize).re - exact).abs() / exact);
        }
        Ok(w)
    };
    let haar = (|| -> ringlab_core::Result<f64> {
        let a = determining_sequence(&EnsembleSpec::HaarUnitary, len.min(30))?;
        let mut w: f64 = 0.0;
        for n in 1..=a.len() as u64 {
            let c = raney(n - 1, 2, 1)? as f64;
            let want = if n % 2 == 0 { -c } else { c };
            w = w.max((a.alpha(n as usize).re - want).abs() / c);
        }
        Ok(w)
    })();
    checks.push(Check::new("Haar alpha_n = (-1)^(n-1) C_(n-1)", haar, 1e-10));
    for k in [2u64, 3, 4] {
        checks.push(Check::new(&format!("product k={k}: alpha_n = A_(n-1)(k-1, k-1)"), product(k), 1e-10));
    }

    if let Some(a) = &user {
        checks.push(Check::new("input: triangle", triangle_error(a), tol));
        checks.push(Check::new("input: round trips", round_trip_error(a), tol));
    }

    let passed = checks.iter().all(|c| c.passed);
    for c in &checks {
        eprintln!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    emit(None, &with_config(args, &json!({ "passed": passed, "checks": checks })))?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!("{} checks failed", checks.iter().filter(|c| !c.passed).count())))
    }
}
