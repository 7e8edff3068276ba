// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

use serde_json::{json, Map, Value};

use ensemble_gate::broadening::{broadened_profile, dilute_limit_fwhm, AngularFactor, PerturberField};
use ensemble_gate::composite::{
    ensemble_average_fidelity, infidelity, log_space, loglog_slope, scaling_table, GateKind, InhomogeneityModel,
};
use ensemble_gate::gate::{compose_cnot_sequence, local_z_cnot_equivalence, refocused_cnot_limit};
use ensemble_gate::holeburn::{holeburn_sweep, local_maxima, profile, selection_width, uniform_grid, HoleburnConfig};
use ensemble_gate::hyperfine::{
    cyclic_transition_sim, group_closure_check, kramers_check, levels, CyclicConfig, DriveLevel, Group, Level, Spin,
};
use ensemble_gate::qmath::global_phase_distance;
use ensemble_gate::{Error, GateSchedule, QuadrupoleParams, TwoIonHamiltonian};

use crate::config::RunConfig;
use crate::schema::Experiment;

/// Why a run failed.
#[derive(Debug)]
pub enum RunError {
    /// Parameters rejected; exit status 2.
    Config(String),
    /// Computation failed; exit status 4.
    Numerical(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotHermitian { .. }
            | Error::NotUnitary { .. }
            | Error::NoConvergence { .. }
            | Error::PeakNotResolved { .. }
            | Error::DimensionMismatch { .. } => RunError::Numerical(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, RunError> {
    Err(RunError::Config(msg.into()))
}

/// Tabular result plus any extra JSON fields.
#[derive(Debug, Clone)]
pub struct Output {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub extra: Map<String, Value>,
    /// Appended to the summary line.
    pub note: Option<String>,
}

impl Output {
    fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), extra: Map::new(), note: None }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Output, RunError> {
    match cfg.experiment {
        Experiment::Gate => gate(cfg),
        Experiment::Holeburn => holeburn(cfg),
        Experiment::Broaden => broaden(cfg),
        Experiment::Composite => composite(cfg),
        Experiment::Hyperfine => hyperfine(cfg),
    }
}

fn gate(cfg: &RunConfig) -> Result<Output, RunError> {
    let (eta, dt, d1, d2) = (cfg.f64("eta"), cfg.f64("dt"), cfg.f64("delta1"), cfg.f64("delta2"));
    let h = TwoIonHamiltonian::new(d1, d2, eta)?;
    let sched = GateSchedule::new(dt, 0)?;
    let u = compose_cnot_sequence(&h, &sched);
    let fit = local_z_cnot_equivalence(&u)?;
    let undetuned = compose_cnot_sequence(&TwoIonHamiltonian::coupling(eta), &sched);
    let delta_residual = global_phase_distance(&u, &undetuned)?;
    let limit_distance = global_phase_distance(&u, &refocused_cnot_limit())?;

    let mut cols = vec!["eta", "dt", "delta1", "delta2", "cnot_fidelity", "delta_residual", "limit_distance"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    let mut row = vec![eta, dt, d1, d2, fit.fidelity, delta_residual, limit_distance];
    for r in 0..4 {
        for c in 0..4 {
            cols.push(format!("u{r}{c}_re"));
            cols.push(format!("u{r}{c}_im"));
            row.push(u[(r, c)].re);
            row.push(u[(r, c)].im);
        }
    }
    let unitary: Vec<Value> =
        (0..4).map(|r| Value::Array((0..4).map(|c| json!([u[(r, c)].re, u[(r, c)].im])).collect())).collect();
    let mut out = Output { columns: cols, rows: vec![row], extra: Map::new(), note: None };
    out.extra.insert("unitary".into(), Value::Array(unitary));
    out.extra.insert("cnot_fidelity".into(), json!(fit.fidelity));
    out.extra.insert("local_z_angles".into(), json!(fit.angles));
    out.extra.insert("delta_residual".into(), json!(delta_residual));
    out.extra.insert("limit_distance".into(), json!(limit_distance));
    Ok(out)
}

fn holeburn(cfg: &RunConfig) -> Result<Output, RunError> {
    let (start, stop, step) = (cfg.f64("eta_start"), cfg.f64("eta_stop"), cfg.f64("eta_step"));
    if !(step > 0.0 && step.is_finite()) {
        return config_err(format!("eta_step must be > 0, got {step}"));
    }
    if !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return config_err(format!("need eta_start <= eta_stop, got {start} and {stop}"));
    }
    if (stop - start) / step > 1e7 {
        return config_err("eta grid has more than 1e7 points");
    }
    let checkpoints: Vec<usize> = cfg.list("checkpoints").into_iter().map(|c| c as usize).collect();
    let Some(&cycles) = checkpoints.iter().max() else {
        return config_err("checkpoints must not be empty");
    };
    let hb = HoleburnConfig {
        gamma: cfg.f64("gamma"),
        dt: cfg.f64("dt"),
        cycles,
        branching: cfg.f64("branching"),
        eta_grid: uniform_grid(start, stop, step),
        checkpoints: checkpoints.clone(),
        relax_fully: cfg.bool("relax_fully"),
        swap_roles: cfg.bool("swap_roles"),
    };
    let rows = holeburn_sweep(&hb)?;

    let mut out = Output::new(&["eta", "N", "survival"]);
    out.rows = rows.iter().map(|r| vec![r.eta, r.cycle as f64, r.survival]).collect();
    let conservation = rows.iter().map(|r| (r.survival + r.auxiliary - 1.0).abs()).fold(0.0, f64::max);
    let mut cps = checkpoints;
    cps.sort_unstable();
    cps.dedup();
    let peaks: Vec<Value> = cps
        .iter()
        .map(|&n| {
            let width = selection_width(&rows, 1.0, n);
            json!({
                "N": n,
                "maxima": local_maxima(&profile(&rows, n)),
                "fwhm_eta1": width.as_ref().ok(),
                "fwhm_note": width.err().map(|e| e.to_string()),
            })
        })
        .collect();
    out.extra.insert("peaks".into(), Value::Array(peaks));
    out.extra.insert("max_population_error".into(), json!(conservation));
    Ok(out)
}

fn broaden(cfg: &RunConfig) -> Result<Output, RunError> {
    let (d0, d1, points) = (cfg.f64("density"), cfg.f64("density_max"), cfg.u64("density_points") as usize);
    let densities = match points {
        0 => return config_err("density_points must be >= 1"),
        1 => vec![d0],
        _ => {
            if !(d0 > 0.0 && d1 > d0) {
                return config_err(format!("a density sweep needs 0 < density < density_max, got {d0} and {d1}"));
            }
            log_space(d0, d1, points)
        }
    };
    let angular = match cfg.str("angular") {
        "sign" => AngularFactor::Sign,
        _ => AngularFactor::Dipole,
    };
    let (coupling, radius, mean_count) = (cfg.f64("coupling"), cfg.f64("sample_radius"), cfg.f64("mean_count"));
    let samples = cfg.u64("samples") as usize;

    let mut out = Output::new(&["density", "fwhm", "ks_distance"]);
    let mut details = Vec::new();
    for (i, &density) in densities.iter().enumerate() {
        let seed = cfg.seed ^ ((i as u64) << 32);
        let field = if radius > 0.0 {
            PerturberField::new(density, coupling, radius, seed)?
        } else {
            PerturberField::with_mean_count(density, coupling, mean_count, seed)?
        }
        .with_angular(angular);
        let dist = broadened_profile(&field, samples)?;
        out.rows.push(vec![density, dist.fitted_fwhm, dist.ks_distance]);
        let mut d = json!({
            "density": density,
            "fitted_center": dist.fitted_center,
            "sample_radius": field.sample_radius(),
            "mean_count": field.mean_count(),
            "dilute_limit_fwhm": dilute_limit_fwhm(density, coupling, angular),
        });
        if cfg.bool("dump_samples") {
            d["samples"] = json!(dist.samples);
        }
        details.push(d);
    }
    out.extra.insert("details".into(), Value::Array(details));
    if out.rows.len() >= 2 && out.rows.iter().all(|r| r[1] > 0.0) {
        let xs: Vec<f64> = out.rows.iter().map(|r| r[0]).collect();
        let ys: Vec<f64> = out.rows.iter().map(|r| r[1]).collect();
        out.extra.insert("loglog_slope".into(), json!(loglog_slope(&xs, &ys)));
    }
    Ok(out)
}

/// Point where the composite gate is compared with the 1e-6 figure.
const POINT_EPS: f64 = 0.1;
const POINT_BOUND: f64 = 1e-6;

fn composite(cfg: &RunConfig) -> Result<Output, RunError> {
    let (lo, hi, n) = (cfg.f64("eps_min"), cfg.f64("eps_max"), cfg.u64("eps_points") as usize);
    if !(lo > 0.0 && hi > lo && hi < 1.0) {
        return config_err(format!("need 0 < eps_min < eps_max < 1, got {lo} and {hi}"));
    }
    if n < 2 {
        return config_err("eps_points must be >= 2");
    }
    let mut eps = log_space(lo, hi, n);
    if !eps.iter().any(|&e| (e - POINT_EPS).abs() < 1e-12) {
        eps.push(POINT_EPS);
        eps.sort_by(f64::total_cmp);
    }
    let table = scaling_table(&eps)?;
    let mut out = Output::new(&["epsilon", "naive_infidelity", "composite_infidelity"]);
    out.rows = table.iter().map(|r| vec![r.epsilon, r.naive_infidelity, r.composite_infidelity]).collect();

    let slope = |kind, a, b| -> Result<f64, RunError> {
        let xs = log_space(a, b, 9);
        let ys = xs.iter().map(|&e| infidelity(kind, e)).collect::<Result<Vec<_>, _>>()?;
        Ok(loglog_slope(&xs, &ys))
    };
    out.extra.insert(
        "slopes".into(),
        json!({
            "naive": { "eps_range": [1e-3, 1e-1], "slope": slope(GateKind::Naive, 1e-3, 1e-1)? },
            "composite": { "eps_range": [0.03, 0.3], "slope": slope(GateKind::Composite, 0.03, 0.3)? },
        }),
    );

    let at_point = infidelity(GateKind::Composite, POINT_EPS)?;
    let met = at_point < POINT_BOUND;
    out.extra.insert(
        "point_bound".into(),
        json!({
            "epsilon": POINT_EPS,
            "bound": POINT_BOUND,
            "composite_infidelity": at_point,
            "met": met,
            "ratio_to_bound": at_point / POINT_BOUND,
        }),
    );
    if !met {
        out.note = Some(format!("composite infidelity at eps={POINT_EPS} is {at_point:.3e}, above {POINT_BOUND:e}"));
    }

    let hw = cfg.f64("half_width");
    let q = cfg.u64("quad_points") as usize;
    let model = InhomogeneityModel::uniform(0.0, hw)?;
    out.extra.insert(
        "ensemble".into(),
        json!({
            "half_width": hw,
            "quad_points": q,
            "naive_mean_infidelity": 1.0 - ensemble_average_fidelity(model, GateKind::Naive, q)?,
            "composite_mean_infidelity": 1.0 - ensemble_average_fidelity(model, GateKind::Composite, q)?,
        }),
    );
    Ok(out)
}

fn level_table(lv: &[Level<f64>]) -> Value {
    Value::Array(
        lv.iter().map(|l| json!({ "energy": l.energy, "group": l.group.to_string(), "purity": l.purity })).collect(),
    )
}

fn hyperfine(cfg: &RunConfig) -> Result<Output, RunError> {
    let spin = Spin::new(cfg.f64("spin"))?;
    let ground = QuadrupoleParams::new(cfg.f64("quad_d"), cfg.f64("quad_e"), cfg.f64("bz"), spin)?.with_transverse(cfg.f64("bx"));
    let excited = QuadrupoleParams::new(cfg.f64("excited_quad_d"), cfg.f64("excited_quad_e"), cfg.f64("excited_bz"), spin)?;
    let m2 = 2.0 * cfg.f64("drive_m");
    if m2.fract() != 0.0 || !m2.is_finite() {
        return config_err(format!("drive_m must be a multiple of 1/2, got {}", cfg.f64("drive_m")));
    }
    let group = if cfg.str("drive_group") == "B" { Group::B } else { Group::A };
    let sim = CyclicConfig {
        ground,
        excited,
        drive: DriveLevel { group, twice_m: m2 as i64 },
        rf_repump: cfg.bool("rf_repump"),
        duration: cfg.f64("duration"),
        rate: cfg.f64("rate"),
        emission_rate: cfg.f64("emission_rate"),
        repump_rate: cfg.f64("repump_rate"),
        trace_points: cfg.u64("trace_points") as usize,
    };
    let res = cyclic_transition_sim(&sim)?;

    let mut out = Output::new(&["time", "excited_population", "emitted"]);
    out.rows = res.trace.iter().map(|p| vec![p.time, p.excited_population, p.photons]).collect();
    let closure = group_closure_check(&ground)?;
    let kramers = kramers_check(&ground)?;
    out.extra.insert("ground_levels".into(), level_table(&levels(&ground)?));
    out.extra.insert("excited_levels".into(), level_table(&levels(&excited)?));
    out.extra.insert(
        "closure".into(),
        json!({ "max_cross_element": closure.max_cross_element, "group_eigvec_purity": closure.group_eigvec_purity }),
    );
    out.extra.insert(
        "kramers".into(),
        json!({ "all_doublets": kramers.all_doublets, "one_per_group": kramers.one_per_group }),
    );
    out.extra.insert(
        "readout".into(),
        json!({
            "photons_emitted": res.photons_emitted,
            "leaked_population": res.leaked_population,
            "max_population_error": res.max_population_error,
        }),
    );
    Ok(out)
}
