// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

//! Config resolution: flag > file > preset > default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::schema::{keys, preset, suggest, Experiment, DEFAULT_SEED, PRESET_NAMES};

/// Invalid configuration; maps to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Default,
    Preset,
    File,
    Flag,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Default => "default",
            Source::Preset => "preset",
            Source::File => "file",
            Source::Flag => "flag",
        })
    }
}

/// Keys a config file may carry besides experiment parameters.
pub const RESERVED: &[&str] = &["experiment", "preset", "seed", "format", "out"];

/// Contents of a flat JSON config file.
#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    pub path: PathBuf,
    pub experiment: Option<Experiment>,
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub params: Vec<(String, Value)>,
}

pub fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let map: Map<String, Value> = serde_json::from_str(&text).map_err(|e| {
        ConfigError(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })?;
    let mut cfg = FileConfig { path: path.to_path_buf(), ..FileConfig::default() };
    let text_of = |k: &str, v: &Value| -> Result<String, ConfigError> {
        v.as_str().map(str::to_owned).ok_or_else(|| ConfigError(format!("{}: key `{k}` must be a string", path.display())))
    };
    for (k, v) in map {
        match k.as_str() {
            "experiment" => {
                let name = text_of(&k, &v)?;
                cfg.experiment = Some(
                    Experiment::from_name(&name)
                        .ok_or_else(|| ConfigError(format!("{}: unknown experiment `{name}`", path.display())))?,
                );
            }
            "preset" => cfg.preset = Some(text_of(&k, &v)?),
            "seed" => {
                cfg.seed = Some(
                    v.as_u64().ok_or_else(|| ConfigError(format!("{}: key `seed` must be a non-negative integer", path.display())))?,
                )
            }
            "format" => cfg.format = Some(Format::parse(&text_of(&k, &v)?)?),
            "out" => cfg.out = Some(PathBuf::from(text_of(&k, &v)?)),
            _ => {
                if v.is_object() {
                    return err(format!("{}: key `{k}`: nested objects are not allowed", path.display()));
                }
                cfg.params.push((k, v));
            }
        }
    }
    Ok(cfg)
}

/// A fully resolved run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub params: BTreeMap<String, (Value, Source)>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub preset: Option<String>,
    pub notes: Vec<String>,
}

/// Everything the command line supplied.
#[derive(Debug, Clone, Default)]
pub struct Request {
    pub experiment: Option<Experiment>,
    pub file: Option<FileConfig>,
    pub preset: Option<String>,
    pub flags: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

fn unknown_key(exp: Experiment, k: &str, origin: &str) -> ConfigError {
    let names: Vec<&str> = keys(exp).iter().map(|s| s.name).chain(RESERVED.iter().copied()).collect();
    let hint = match suggest(k, names.iter().copied()) {
        Some(s) => format!(" (did you mean `{s}`?)"),
        None => String::new(),
    };
    ConfigError(format!("{origin}: unknown key `{k}` for {exp}{hint}"))
}

pub fn resolve(req: Request) -> Result<RunConfig, ConfigError> {
    let preset_name = req.preset.clone().or_else(|| req.file.as_ref().and_then(|f| f.preset.clone()));
    let preset = match &preset_name {
        Some(name) => Some(preset(name).ok_or_else(|| {
            let hint = suggest(name, PRESET_NAMES.iter().copied()).map(|s| format!(" (did you mean `{s}`?)")).unwrap_or_default();
            ConfigError(format!("unknown preset `{name}`{hint}; available: {}", PRESET_NAMES.join(", ")))
        })?),
        None => None,
    };

    let mut experiment = req.experiment;
    let mut claim = |e: Experiment, origin: &str| -> Result<(), ConfigError> {
        match experiment {
            Some(x) if x != e => err(format!("{origin} is for `{e}` but the run is `{x}`")),
            _ => {
                experiment = Some(e);
                Ok(())
            }
        }
    };
    if let Some(f) = &req.file {
        if let Some(e) = f.experiment {
            claim(e, &format!("config file {}", f.path.display()))?;
        }
    }
    if let Some(p) = &preset {
        claim(p.experiment, &format!("preset `{}`", p.name))?;
    }
    let Some(experiment) = experiment else {
        return err("cannot tell which experiment to run: give a subcommand, a preset, or an `experiment` key");
    };

    let schema = keys(experiment);
    let mut params: BTreeMap<String, (Value, Source)> =
        schema.iter().map(|s| (s.name.to_string(), (s.default.clone(), Source::Default))).collect();
    let mut set = |k: &str, v: Value, src: Source, origin: &str| -> Result<(), ConfigError> {
        let spec = schema.iter().find(|s| s.name == k).ok_or_else(|| unknown_key(experiment, k, origin))?;
        let parsed = match &v {
            Value::String(s) if src == Source::Flag => spec.kind.parse_str(s),
            _ => spec.kind.parse_json(&v),
        }
        .map_err(|e| ConfigError(format!("{origin}: key `{k}`: {e}")))?;
        params.insert(k.to_string(), (parsed, src));
        Ok(())
    };
    if let Some(p) = &preset {
        for (k, v) in &p.params {
            set(k, v.clone(), Source::Preset, &format!("preset `{}`", p.name))?;
        }
    }
    if let Some(f) = &req.file {
        for (k, v) in &f.params {
            set(k, v.clone(), Source::File, &f.path.display().to_string())?;
        }
    }
    for (k, v) in &req.flags {
        set(k, Value::String(v.clone()), Source::Flag, "command line")?;
    }

    let file = req.file.as_ref();
    Ok(RunConfig {
        experiment,
        params,
        out: req.out.or_else(|| file.and_then(|f| f.out.clone())),
        format: req.format.or_else(|| file.and_then(|f| f.format)).unwrap_or(Format::Csv),
        seed: req.seed.or_else(|| file.and_then(|f| f.seed)).unwrap_or(DEFAULT_SEED),
        preset: preset_name,
        notes: preset.map(|p| p.notes).unwrap_or_default(),
    })
}

impl RunConfig {
    fn value(&self, k: &str) -> &Value {
        &self.params.get(k).unwrap_or_else(|| panic!("key `{k}` not in schema")).0
    }

    pub fn f64(&self, k: &str) -> f64 {
        self.value(k).as_f64().expect("validated float")
    }

    pub fn u64(&self, k: &str) -> u64 {
        self.value(k).as_u64().expect("validated integer")
    }

    pub fn bool(&self, k: &str) -> bool {
        self.value(k).as_bool().expect("validated bool")
    }

    pub fn str(&self, k: &str) -> &str {
        self.value(k).as_str().expect("validated string")
    }

    pub fn list(&self, k: &str) -> Vec<u64> {
        self.value(k).as_array().expect("validated list").iter().map(|v| v.as_u64().expect("validated")).collect()
    }

    /// Parameters as a JSON object.
    pub fn params_json(&self) -> Value {
        Value::Object(self.params.iter().map(|(k, (v, _))| (k.clone(), v.clone())).collect())
    }

    /// `key=value` pairs for diagnostics.
    pub fn echo(&self) -> String {
        self.params.iter().map(|(k, (v, _))| format!("{k}={}", show(v))).collect::<Vec<_>>().join(" ")
    }

    pub fn output_path(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.{}", self.experiment, self.format.extension())))
    }

    /// Human-readable listing used by `validate`.
    pub fn report(&self) -> String {
        let mut s = String::from("ok\n");
        s += &format!("experiment: {}\n", self.experiment);
        if let Some(p) = &self.preset {
            s += &format!("preset: {p}\n");
        }
        s += &format!("seed: {}\nformat: {}\noutput: {}\n", self.seed, self.format.extension(), self.output_path().display());
        s += "parameters:\n";
        for (k, (v, src)) in &self.params {
            s += &format!("  {k} = {} ({src})\n", show(v));
        }
        if !self.notes.is_empty() {
            s += "notes:\n";
            for n in &self.notes {
                s += &format!("  {n}\n");
            }
        }
        s
    }
}

fn show(v: &Value) -> String {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => crate::output::number(n.as_f64().unwrap_or(f64::NAN)),
        _ => v.to_string(),
    }
}
