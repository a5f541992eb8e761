use std::f64::consts::SQRT_2;

use anyhow::anyhow;
use imsteer_core::audit::{run_suite, Suite};
use imsteer_core::imaginarity::{CoherenceMeasure, ImaginarityMeasure};
use imsteer_core::monogamy::{monogamy_scan, MONOGAMY_BOUND};
use imsteer_core::states::{region_completion, to_bloch, x_state};
use imsteer_core::steering::{
    coherence_label, imaginarity_label, isi_closed, isi_with, naqi_with, unsharp_singlet_threshold,
    violates_isi, werner_threshold, Criterion, CriterionValue, MeasurementModel, NaqiSearch,
};
use imsteer_core::witness::{all_witnesses, reconstruct, select_witness, witness_expectation};
use imsteer_core::ISI_BOUND;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::Sink;
use crate::state::resolve;
use crate::{Failure, StateArgs};

const CONSISTENCY_TOL: f64 = 1e-9;

fn criterion_json(c: CriterionValue) -> Value {
    json!({"value": c.value, "bound": c.bound, "violated": c.violated()})
}

fn input(msg: String) -> Failure {
    Failure::Input(anyhow!(msg))
}

pub fn eval(args: &StateArgs, lambda: Option<f64>, optimize: bool, sink: &Sink) -> Result<(), Failure> {
    let state = resolve(args)?;
    let rho = &state.rho;
    let model = match lambda {
        None => MeasurementModel::Projective,
        Some(l) if (0.0..=1.0).contains(&l) => MeasurementModel::Unsharp(l),
        Some(l) => return Err(input(format!("--lambda must lie in [0, 1], got {l}"))),
    };

    let i2 = isi_with(rho, model)?;
    let mut fano = to_bloch(rho)?;
    let sharpness = lambda.unwrap_or(1.0);
    fano.t.iter_mut().flatten().for_each(|t| *t *= sharpness);
    let i2_closed = isi_closed(&fano);

    let mut naqc = serde_json::Map::new();
    for g in [CoherenceMeasure::L1, CoherenceMeasure::RelEntropy, CoherenceMeasure::Skew] {
        let v = Criterion::Naqc(g).evaluate(rho, model)?;
        naqc.insert(coherence_label(g).into(), criterion_json(v));
    }
    let search = if optimize {
        NaqiSearch::Refined
    } else {
        NaqiSearch::Canonical
    };
    let mut naqi = serde_json::Map::new();
    for g in [ImaginarityMeasure::L1, ImaginarityMeasure::RelEntropy] {
        let r = naqi_with(rho, g, search, model)?;
        let mut entry = criterion_json(r.criterion());
        if optimize {
            entry["alice"] = json!(r.alice);
            entry["bob"] = json!(r.bob);
        }
        naqi.insert(imaginarity_label(g).into(), entry);
    }
    let sel = select_witness(rho)?;
    let w = &sel.witness;

    let report = json!({
        "state": state.source,
        "measurement": match model {
            MeasurementModel::Projective => json!({"kind": "projective"}),
            MeasurementModel::Unsharp(l) => json!({"kind": "unsharp", "lambda": l}),
        },
        "i2": i2,
        "i2_closed": i2_closed,
        "bound": ISI_BOUND,
        "violated": violates_isi(i2),
        "cffw": criterion_json(Criterion::Cffw.evaluate(rho, model)?),
        "naqc": naqc,
        "naqi": naqi,
        "naqi_search": search,
        "selected_witness": {
            "k": w.k, "i": w.i, "j": w.j,
            "expectation": sel.expectation,
            "detects": sel.expectation < 0.0,
        },
    });
    sink.report(report)?;

    if (i2 - i2_closed).abs() > CONSISTENCY_TOL {
        return Err(Failure::Invariant(format!(
            "operational I2 {i2} and closed form {i2_closed} disagree"
        )));
    }
    if model == MeasurementModel::Projective && (sel.expectation - (SQRT_2 - i2)).abs() > CONSISTENCY_TOL {
        return Err(Failure::Invariant(format!(
            "witness minimum {} differs from sqrt(2) - I2 = {}",
            sel.expectation,
            SQRT_2 - i2
        )));
    }
    Ok(())
}

struct RegionPoint {
    beta_xx: f64,
    beta_yy: f64,
    beta_zz: Option<f64>,
    i2: Option<f64>,
}

pub fn region(resolution: usize, sink: &Sink) -> Result<(), Failure> {
    if resolution < 2 {
        return Err(input(format!("--resolution must be at least 2, got {resolution}")));
    }
    let step = 2.0 / (resolution - 1) as f64;
    let points: Vec<RegionPoint> = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let beta_xx = -1.0 + (k / resolution) as f64 * step;
            let beta_yy = -1.0 + (k % resolution) as f64 * step;
            let params = region_completion(beta_xx, beta_yy);
            let i2 = match params.map(|p| x_state(&p)) {
                Some(Ok(rho)) => Some(isi_with(&rho, MeasurementModel::Projective)?),
                _ => None,
            };
            Ok(RegionPoint {
                beta_xx,
                beta_yy,
                beta_zz: params.filter(|_| i2.is_some()).map(|p| p.beta_zz),
                i2,
            })
        })
        .collect::<imsteer_core::Result<_>>()?;

    let rows: Vec<Vec<Value>> = points
        .iter()
        .map(|p| {
            vec![
                json!(p.beta_xx),
                json!(p.beta_yy),
                json!(p.beta_zz),
                json!(p.i2.is_some()),
                json!(p.i2),
                json!(p.i2.map(violates_isi)),
            ]
        })
        .collect();
    sink.table(&["beta_xx", "beta_yy", "beta_zz", "valid", "i2", "violated"], &rows)?;

    let mismatches = points
        .iter()
        .filter_map(|p| p.i2.map(|i2| (p, i2)))
        .filter(|(p, i2)| {
            let expected = p.beta_xx.abs() + p.beta_yy.abs();
            (i2 - expected).abs() > CONSISTENCY_TOL || violates_isi(*i2) != (expected > SQRT_2)
        })
        .count();
    if mismatches > 0 {
        return Err(Failure::Invariant(format!(
            "{mismatches} grid points disagree with |beta_xx| + |beta_yy|"
        )));
    }
    Ok(())
}

pub fn thresholds(optimize: bool, sink: &Sink) -> Result<(), Failure> {
    let mut criteria = vec![
        Criterion::Isi,
        Criterion::Cffw,
        Criterion::Naqc(CoherenceMeasure::L1),
        Criterion::Naqi(ImaginarityMeasure::L1, NaqiSearch::Canonical),
    ];
    if optimize {
        criteria.push(Criterion::Naqi(ImaginarityMeasure::L1, NaqiSearch::Refined));
    }
    let jobs: Vec<(&str, Criterion)> = ["werner", "unsharp_singlet"]
        .into_iter()
        .flat_map(|family| criteria.iter().map(move |&c| (family, c)))
        .collect();
    let rows: Vec<Vec<Value>> = jobs
        .par_iter()
        .map(|&(family, c)| {
            let t = if family == "werner" {
                werner_threshold(c)
            } else {
                unsharp_singlet_threshold(c)
            };
            let t = t.map_err(|e| format!("{family} {}: {e}", c.label()))?;
            let bound = c.evaluate(&imsteer_core::states::singlet(), MeasurementModel::Projective)
                .map_err(|e| e.to_string())?
                .bound;
            Ok(vec![json!(family), json!(c.label()), json!(t), json!(bound)])
        })
        .collect::<Result<_, String>>()
        .map_err(Failure::Invariant)?;
    sink.table(&["family", "criterion", "threshold", "bound"], &rows)?;
    Ok(())
}

pub fn monogamy(samples: u64, seed: u64, include_maximizer: bool, sink: &Sink) -> Result<(), Failure> {
    if samples == 0 {
        return Err(input("--samples must be at least 1".into()));
    }
    let r = monogamy_scan(samples, seed, include_maximizer);
    let within = r.max_sum <= MONOGAMY_BOUND + CONSISTENCY_TOL;
    sink.report(json!({
        "samples": r.samples,
        "seed": seed,
        "include_maximizer": include_maximizer,
        "bound": MONOGAMY_BOUND,
        "max_sum": r.max_sum,
        "within_bound": within,
        "argmax": r.argmax,
        "i2_ab": r.argmax_value.i2_ab,
        "i2_ac": r.argmax_value.i2_ac,
        "max_pair": r.max_pair,
        "exclusivity_violations": r.exclusivity_violations,
    }))?;
    if !within {
        return Err(Failure::Invariant(format!(
            "monogamy sum {} exceeds {}",
            r.max_sum, MONOGAMY_BOUND
        )));
    }
    if r.exclusivity_violations > 0 {
        return Err(Failure::Invariant(format!(
            "{} samples violate the inequality on both pairs",
            r.exclusivity_violations
        )));
    }
    Ok(())
}

pub fn witness(args: &StateArgs, sink: &Sink) -> Result<(), Failure> {
    let state = resolve(args)?;
    let sel = select_witness(&state.rho)?;
    let w = &sel.witness;
    let terms = w.projector_decomposition();
    let residual = reconstruct(&terms).max_abs_diff(&w.matrix);
    let candidates = all_witnesses()
        .iter()
        .map(|c| {
            Ok(json!({"k": c.k, "i": c.i, "j": c.j, "expectation": witness_expectation(c, &state.rho)?}))
        })
        .collect::<imsteer_core::Result<Vec<Value>>>()?;
    sink.report(json!({
        "state": state.source,
        "k": w.k,
        "i": w.i,
        "j": w.j,
        "expectation": sel.expectation,
        "detects": sel.expectation < 0.0,
        "nu": w.nu(),
        "terms": terms,
        "nonzero_terms": terms.iter().filter(|t| t.coefficient.abs() > 1e-12).count(),
        "reconstruction_residual": residual,
        "candidates": candidates,
    }))?;
    if residual >= 1e-12 {
        return Err(Failure::Invariant(format!("decomposition residual {residual:e}")));
    }
    Ok(())
}

pub fn audit(suite: Option<&str>, samples: Option<u64>, seed: u64, sink: &Sink) -> Result<(), Failure> {
    let suites = match suite {
        None => Suite::ALL.to_vec(),
        Some(name) => vec![name.parse::<Suite>()?],
    };
    if samples == Some(0) {
        return Err(input("--samples must be at least 1".into()));
    }
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for s in suites {
        let r = run_suite(s, samples.unwrap_or(s.default_samples()), seed)?;
        if !r.passed {
            failed.push(s.name());
        }
        rows.push(vec![
            json!(r.suite),
            json!(r.samples),
            json!(r.seed),
            json!(r.worst),
            json!(r.limit),
            json!(r.passed),
        ]);
    }
    sink.table(&["suite", "samples", "seed", "worst", "limit", "passed"], &rows)?;
    if !failed.is_empty() {
        return Err(Failure::Invariant(format!("suites failed: {}", failed.join(", "))));
    }
    Ok(())
}
