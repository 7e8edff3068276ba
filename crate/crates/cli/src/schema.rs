// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

//! Parameter keys, defaults and presets for each experiment.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    Gate,
    Holeburn,
    Broaden,
    Composite,
    Hyperfine,
}

impl Experiment {
    pub const ALL: [Experiment; 5] =
        [Experiment::Gate, Experiment::Holeburn, Experiment::Broaden, Experiment::Composite, Experiment::Hyperfine];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Gate => "gate",
            Experiment::Holeburn => "holeburn",
            Experiment::Broaden => "broaden",
            Experiment::Composite => "composite",
            Experiment::Hyperfine => "hyperfine",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }

    pub fn about(self) -> &'static str {
        match self {
            Experiment::Gate => "Compose the refocused CNOT and check it against CNOT",
            Experiment::Holeburn => "Survival versus coupling strength under repeated gates",
            Experiment::Broaden => "Dipole-dipole shift statistics versus perturber density",
            Experiment::Composite => "Naive versus composite gate infidelity against coupling errors",
            Experiment::Hyperfine => "Pseudo-quadrupole levels and cyclic-transition readout",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Bool,
    IntList,
    Choice(&'static [&'static str]),
}

impl Kind {
    pub fn value_name(self) -> &'static str {
        match self {
            Kind::Float => "FLOAT",
            Kind::Int => "INT",
            Kind::Bool => "BOOL",
            Kind::IntList => "LIST",
            Kind::Choice(_) => "NAME",
        }
    }

    /// Parse a command-line string.
    pub fn parse_str(self, s: &str) -> Result<Value, String> {
        match self {
            Kind::Float => s.trim().parse::<f64>().map(|x| json!(x)).map_err(|_| format!("expected a number, got `{s}`")),
            Kind::Int => s.trim().parse::<u64>().map(|x| json!(x)).map_err(|_| format!("expected a non-negative integer, got `{s}`")),
            Kind::Bool => match s.trim() {
                "true" | "1" => Ok(json!(true)),
                "false" | "0" => Ok(json!(false)),
                _ => Err(format!("expected true or false, got `{s}`")),
            },
            Kind::IntList => s
                .split(',')
                .map(|p| p.trim().parse::<u64>().map_err(|_| format!("expected comma-separated integers, got `{s}`")))
                .collect::<Result<Vec<_>, _>>()
                .map(|v| json!(v)),
            Kind::Choice(options) => {
                if options.contains(&s) {
                    Ok(json!(s))
                } else {
                    Err(format!("expected one of {}, got `{s}`", options.join(", ")))
                }
            }
        }
    }

    /// Check and normalise a value from a config file.
    pub fn parse_json(self, v: &Value) -> Result<Value, String> {
        match (self, v) {
            (Kind::Float, Value::Number(n)) => n.as_f64().map(|x| json!(x)).ok_or_else(|| "expected a number".into()),
            (Kind::Int, Value::Number(n)) => {
                n.as_u64().map(|x| json!(x)).ok_or_else(|| format!("expected a non-negative integer, got {n}"))
            }
            (Kind::Bool, Value::Bool(b)) => Ok(json!(b)),
            (Kind::IntList, Value::Array(items)) => items
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| format!("expected integers, got {x}")))
                .collect::<Result<Vec<_>, _>>()
                .map(|v| json!(v)),
            (Kind::IntList, Value::String(s)) | (Kind::Choice(_), Value::String(s)) => self.parse_str(s),
            _ => Err(format!("expected {}, got {v}", self.value_name().to_lowercase())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Value,
    pub help: &'static str,
}

fn key(name: &'static str, kind: Kind, default: Value, help: &'static str) -> KeySpec {
    KeySpec { name, kind, default, help }
}

pub const ANGULAR: &[&str] = &["dipole", "sign"];
pub const GROUPS: &[&str] = &["A", "B"];

pub fn keys(exp: Experiment) -> Vec<KeySpec> {
    use Kind::*;
    match exp {
        Experiment::Gate => vec![
            key("eta", Float, json!(1.0), "coupling strength"),
            key("dt", Float, json!(FRAC_PI_4), "free evolution per half-gate"),
            key("delta1", Float, json!(0.0), "detuning of ion 1 (target)"),
            key("delta2", Float, json!(0.0), "detuning of ion 2 (control)"),
        ],
        Experiment::Holeburn => vec![
            key("gamma", Float, json!(0.1), "spontaneous emission rate"),
            key("dt", Float, json!(FRAC_PI_4), "free evolution per half-gate"),
            key("branching", Float, json!(0.5), "probability a decay returns to |0>"),
            key("eta_start", Float, json!(0.0), "first coupling on the grid"),
            key("eta_stop", Float, json!(8.0), "last coupling on the grid"),
            key("eta_step", Float, json!(0.02), "grid spacing"),
            key("checkpoints", IntList, json!([1, 5, 20, 50]), "gate counts to report"),
            key("relax_fully", Bool, json!(true), "full relaxation between gates"),
            key("swap_roles", Bool, json!(false), "alternate control and target"),
        ],
        Experiment::Broaden => vec![
            key("density", Float, json!(1.0), "perturber density (first row)"),
            key("density_max", Float, json!(0.0), "last density of a log-spaced sweep; 0 for a single row"),
            key("density_points", Int, json!(1), "number of densities"),
            key("coupling", Float, json!(1.0), "dipolar constant C"),
            key("sample_radius", Float, json!(0.0), "truncation radius; 0 picks it from mean_count"),
            key("mean_count", Float, json!(200.0), "mean perturbers inside the sphere when sample_radius is 0"),
            key("samples", Int, json!(100_000), "shift samples per density"),
            key("angular", Choice(ANGULAR), json!("dipole"), "orientation factor"),
            key("dump_samples", Bool, json!(false), "include raw shifts in JSON output"),
        ],
        Experiment::Composite => vec![
            key("eps_min", Float, json!(1e-3), "smallest coupling error"),
            key("eps_max", Float, json!(0.3), "largest coupling error"),
            key("eps_points", Int, json!(25), "log-spaced errors in the table"),
            key("half_width", Float, json!(0.1), "half-width of the uniform ensemble spread"),
            key("quad_points", Int, json!(16), "quadrature nodes for the ensemble average"),
        ],
        Experiment::Hyperfine => vec![
            key("spin", Float, json!(2.5), "nuclear spin I"),
            key("quad_d", Float, json!(1.0), "axial constant D (ground)"),
            key("quad_e", Float, json!(0.1), "rhombic constant E (ground)"),
            key("bz", Float, json!(0.0), "Zeeman term along z (ground)"),
            key("bx", Float, json!(0.0), "transverse Zeeman term, diagnostic only (ground)"),
            key("excited_quad_d", Float, json!(0.6), "axial constant D (excited)"),
            key("excited_quad_e", Float, json!(0.1), "rhombic constant E (excited)"),
            key("excited_bz", Float, json!(0.0), "Zeeman term along z (excited)"),
            key("drive_group", Choice(GROUPS), json!("A"), "group of the driven level"),
            key("drive_m", Float, json!(0.5), "m of the driven level"),
            key("rf_repump", Bool, json!(true), "RF repumping within the driven group"),
            key("duration", Float, json!(100.0), "simulated time"),
            key("rate", Float, json!(1.0), "optical pumping rate"),
            key("emission_rate", Float, json!(1.0), "spontaneous emission rate"),
            key("repump_rate", Float, json!(10.0), "RF rate between ground levels"),
            key("trace_points", Int, json!(100), "intervals in the time series"),
        ],
    }
}

/// Default seed when none is given.
pub const DEFAULT_SEED: u64 = 20_020_101;

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub experiment: Experiment,
    pub params: Vec<(&'static str, Value)>,
    /// Lines shown by `validate`, e.g. unit conversions.
    pub notes: Vec<String>,
}

pub const PRESET_NAMES: &[&str] = &["cnot", "fig4a", "fig4b", "fig4c", "fig4d", "eu_yso", "dilute", "bb1", "readout"];

// Eu:YSO scale: 10 kHz coupling is the frequency unit, so time is in 100 μs.
const EU_FREQ_UNIT_HZ: f64 = 10e3;

pub fn preset(name: &str) -> Option<Preset> {
    let fig4 = |name, gamma: f64| Preset {
        name,
        experiment: Experiment::Holeburn,
        params: vec![("gamma", json!(gamma))],
        notes: vec![format!("gamma = {gamma}, dt = pi/4, branching = 1/2, eta in [0, 8] step 0.02, N = 1, 5, 20, 50")],
    };
    let p = match name {
        "cnot" => Preset {
            name: "cnot",
            experiment: Experiment::Gate,
            params: vec![("eta", json!(1.0)), ("dt", json!(FRAC_PI_4)), ("delta1", json!(5.3)), ("delta2", json!(-2.1))],
            notes: vec!["dt = pi/4 at eta = 1 gives the CNOT-class gate for any detunings".into()],
        },
        "fig4a" => fig4("fig4a", 0.1),
        "fig4b" => fig4("fig4b", 0.05),
        "fig4c" => fig4("fig4c", 0.02),
        "fig4d" => fig4("fig4d", 0.01),
        "eu_yso" => {
            let unit = |hz: f64| hz / EU_FREQ_UNIT_HZ;
            Preset {
                name: "eu_yso",
                experiment: Experiment::Holeburn,
                params: vec![("gamma", json!(unit(500.0))), ("eta_stop", json!(unit(100e3)))],
                notes: vec![
                    "frequency unit 10 kHz (typical interaction strength), time unit 100 us".into(),
                    format!("interaction 10 kHz -> eta = {}", unit(10e3)),
                    format!("spontaneous emission 500 Hz -> gamma = {}", unit(500.0)),
                    format!("anti-hole width 100 kHz -> eta range up to {}", unit(100e3)),
                    format!("Rabi frequency 1 MHz -> {} (pulses treated as instantaneous)", unit(1e6)),
                    format!("experiment time 200 us -> t = {}", 200e-6 * EU_FREQ_UNIT_HZ),
                ],
            }
        }
        "dilute" => Preset {
            name: "dilute",
            experiment: Experiment::Broaden,
            params: vec![("density", json!(0.1)), ("density_max", json!(1.0)), ("density_points", json!(5))],
            notes: vec!["one decade of density at 1e5 samples per point".into()],
        },
        "bb1" => Preset { name: "bb1", experiment: Experiment::Composite, params: vec![], notes: vec![] },
        "readout" => Preset {
            name: "readout",
            experiment: Experiment::Hyperfine,
            params: vec![("quad_e", json!(0.2)), ("bz", json!(0.01)), ("excited_bz", json!(0.01))],
            notes: vec!["I = 5/2 with a small axial field splitting the doublets".into()],
        },
        _ => return None,
    };
    Some(p)
}

/// Closest candidate by edit distance, if reasonably close.
pub fn suggest<'a>(word: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    candidates
        .into_iter()
        .map(|c| (strsim::levenshtein(word, c), c))
        .filter(|&(d, c)| d <= 2.max(c.len() / 3))
        .min()
        .map(|(_, c)| c)
}
