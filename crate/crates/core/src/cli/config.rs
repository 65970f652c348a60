//! Sectioned `key = value` scenario files.
//!
//! ```toml
//! [model]
//! beta = 0.8
//! gamma = 0.4
//! state = [1, 0]
//!
//! [run]
//! initial = [[1.1, 0, 1, 0]]
//! t_final = 100
//!
//! [controller]
//! master = [2, 0, 2, 0]
//! ```

use std::path::PathBuf;

use toml::{Table, Value};

use crate::control::{ControllerConfig, DEFAULT_EPSILON, DEFAULT_GAIN, DEFAULT_SURFACE};
use crate::error::{Error, Result};
use crate::integrator::{IntegratorSettings, PhaseState, DEFAULT_DT, DEFAULT_STRIDE};
use crate::model::{derive_params, Branch, EigenstateSpec, OscillatorParams};

pub const DEFAULT_T_FINAL: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub params: OscillatorParams,
    pub spec: EigenstateSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub initial: Vec<PhaseState>,
    pub settings: IntegratorSettings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSection {
    pub controller: ControllerConfig,
    pub master: PhaseState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub embed_dim: usize,
    pub tau_min: usize,
    pub tau_max: usize,
    pub spectrum: bool,
    pub lle: bool,
    pub grid_half_width: f64,
    pub grid_n: usize,
    /// Imaginary parts `(x_i, y_i)` held fixed on the potential grid.
    pub grid_imag: (f64, f64),
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            embed_dim: 6,
            tau_min: 5,
            tau_max: 15,
            spectrum: true,
            lle: true,
            grid_half_width: 3.0,
            grid_n: 121,
            grid_imag: (0.0, 0.0),
        }
    }
}

impl AnalysisConfig {
    pub fn taus(&self) -> Vec<usize> {
        (self.tau_min..=self.tau_max).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), formats: vec![Format::Csv, Format::Svg] }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    pub run: Option<RunConfig>,
    pub controller: Option<ControlSection>,
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn require_run(&self) -> Result<&RunConfig> {
        self.run.as_ref().ok_or_else(|| cfg_err("run", "initial", "missing required key"))
    }

    pub fn require_controller(&self) -> Result<&ControlSection> {
        self.controller
            .as_ref()
            .ok_or_else(|| cfg_err("controller", "master", "missing required key"))
    }
}

fn cfg_err(section: &str, key: &str, message: impl Into<String>) -> Error {
    Error::Config { section: section.into(), key: key.into(), message: message.into() }
}

/// Typed access to one section; every read key is tracked so leftovers can be
/// reported as unknown.
struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    seen: Vec<&'static str>,
}

impl<'a> Section<'a> {
    fn new(root: &'a Table, name: &'static str) -> Result<Self> {
        let table = match root.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => return Err(cfg_err(name, "*", "expected a section")),
        };
        Ok(Section { name, table, seen: Vec::new() })
    }

    fn is_empty(&self) -> bool {
        self.table.is_none_or(Table::is_empty)
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a Value> {
        self.seen.push(key);
        self.table.and_then(|t| t.get(key))
    }

    fn err(&self, key: &str, message: impl Into<String>) -> Error {
        cfg_err(self.name, key, message)
    }

    fn number(v: &Value) -> Option<f64> {
        match v {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn f64_opt(&mut self, key: &'static str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => Self::number(v)
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| self.err(key, "expected a finite number")),
        }
    }

    fn f64_or(&mut self, key: &'static str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn f64_req(&mut self, key: &'static str) -> Result<f64> {
        self.f64_opt(key)?.ok_or_else(|| self.err(key, "missing required key"))
    }

    fn positive(&mut self, key: &'static str, default: f64) -> Result<f64> {
        let v = self.f64_or(key, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.err(key, format!("must be > 0, got {v}")))
        }
    }

    fn usize_or(&mut self, key: &'static str, default: usize, min: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(Value::Integer(i)) if *i >= min as i64 => Ok(*i as usize),
            Some(Value::Integer(i)) => Err(self.err(key, format!("must be >= {min}, got {i}"))),
            Some(_) => Err(self.err(key, "expected an integer")),
        }
    }

    fn bool_or(&mut self, key: &'static str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(_) => Err(self.err(key, "expected true or false")),
        }
    }

    fn str_opt(&mut self, key: &'static str) -> Result<Option<&'a str>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(self.err(key, "expected a string")),
        }
    }

    fn numbers(&self, key: &str, v: &Value, len: usize) -> Result<Vec<f64>> {
        let arr = v.as_array().ok_or_else(|| self.err(key, format!("expected an array of {len} numbers")))?;
        let out: Option<Vec<f64>> = arr.iter().map(Self::number).collect();
        match out {
            Some(o) if o.len() == len && o.iter().all(|x| x.is_finite()) => Ok(o),
            _ => Err(self.err(key, format!("expected an array of {len} finite numbers"))),
        }
    }

    fn vec4_opt(&mut self, key: &'static str) -> Result<Option<[f64; 4]>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                let n = self.numbers(key, v, 4)?;
                Ok(Some([n[0], n[1], n[2], n[3]]))
            }
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(t) = self.table {
            if let Some(k) = t.keys().find(|k| !self.seen.contains(&k.as_str())) {
                return Err(cfg_err(self.name, k, "unknown key"));
            }
        }
        Ok(())
    }
}

const SECTIONS: [&str; 5] = ["model", "run", "controller", "analysis", "output"];

/// Apply a `section.key=value` override. The value is read as a TOML value,
/// falling back to a bare string.
pub fn apply_override(root: &mut Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::ConfigSyntax(format!("override `{assignment}` is not section.key=value")))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| Error::ConfigSyntax(format!("override `{assignment}` is not section.key=value")))?;
    let value = match format!("v = {}", raw.trim()).parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or(Value::String(raw.trim().into())),
        Err(_) => Value::String(raw.trim().into()),
    };
    let sec = root
        .entry(section.to_string())
        .or_insert_with(|| Value::Table(Table::new()));
    match sec {
        Value::Table(t) => {
            t.insert(key.to_string(), value);
            Ok(())
        }
        _ => Err(cfg_err(section, key, "expected a section")),
    }
}

pub fn parse_document(text: &str) -> Result<Table> {
    text.parse::<Table>().map_err(|e| Error::ConfigSyntax(e.to_string()))
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    from_table(&parse_document(text)?)
}

pub fn from_table(root: &Table) -> Result<ScenarioConfig> {
    if let Some(k) = root.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
        return Err(cfg_err(k, "*", "unknown section"));
    }
    let model = parse_model(Section::new(root, "model")?)?;
    let run = parse_run(Section::new(root, "run")?)?;
    let controller = parse_controller(Section::new(root, "controller")?)?;
    let analysis = parse_analysis(Section::new(root, "analysis")?)?;
    let output = parse_output(Section::new(root, "output")?)?;
    Ok(ScenarioConfig { model, run, controller, analysis, output })
}

fn parse_model(mut s: Section<'_>) -> Result<ModelConfig> {
    let beta = s.f64_req("beta")?;
    let gamma = s.f64_req("gamma")?;
    let branch = match s.str_opt("branch")? {
        None => Branch::default(),
        Some(b) => b.parse().map_err(|e: Error| s.err("branch", e.to_string()))?,
    };
    let spec = match s.raw("state") {
        None => EigenstateSpec::first_excited(),
        Some(v) => {
            let n = s.numbers("state", v, 2)?;
            if n.iter().any(|x| *x < 0.0 || x.fract() != 0.0) {
                return Err(s.err("state", "quantum numbers must be nonnegative integers"));
            }
            EigenstateSpec::new(n[0] as u32, n[1] as u32)
        }
    };
    let params = derive_params(beta, gamma, branch).map_err(|e| {
        let key = if matches!(e, Error::DegenerateAnisotropy { .. }) { "gamma" } else { "beta" };
        s.err(key, e.to_string())
    })?;
    s.finish()?;
    Ok(ModelConfig { params, spec })
}

fn parse_run(mut s: Section<'_>) -> Result<Option<RunConfig>> {
    if s.is_empty() {
        return Ok(None);
    }
    let initial = match s.raw("initial") {
        None => return Err(s.err("initial", "missing required key")),
        Some(Value::Array(rows)) if !rows.is_empty() => {
            // a single state may be written without the outer brackets
            if rows.iter().all(|r| !r.is_array()) {
                let n = s.numbers("initial", &Value::Array(rows.clone()), 4)?;
                vec![PhaseState::new(n[0], n[1], n[2], n[3])]
            } else {
                rows.iter()
                    .map(|r| s.numbers("initial", r, 4).map(|n| PhaseState::new(n[0], n[1], n[2], n[3])))
                    .collect::<Result<_>>()?
            }
        }
        Some(_) => return Err(s.err("initial", "expected one or more [x_r, x_i, y_r, y_i] states")),
    };
    let t_final = s.positive("t_final", DEFAULT_T_FINAL)?;
    let dt = s.positive("dt", DEFAULT_DT)?;
    let stride = s.usize_or("stride", DEFAULT_STRIDE, 1)?;
    let settings = IntegratorSettings::new(t_final, dt, stride).map_err(|e| s.err("t_final", e.to_string()))?;
    s.finish()?;
    Ok(Some(RunConfig { initial, settings }))
}

fn parse_controller(mut s: Section<'_>) -> Result<Option<ControlSection>> {
    if s.is_empty() {
        return Ok(None);
    }
    let master = s.vec4_opt("master")?.ok_or_else(|| s.err("master", "missing required key"))?;
    let c = s.vec4_opt("surface")?.unwrap_or(DEFAULT_SURFACE);
    let k = s.vec4_opt("gain")?.unwrap_or(DEFAULT_GAIN);
    let q = s.positive("q", 1.0)?;
    let r = s.positive("r", 1.0)?;
    let epsilon = s.positive("epsilon", DEFAULT_EPSILON)?;
    let controller = ControllerConfig::new(c, k, q, r, epsilon).map_err(|e| {
        let key = match e {
            Error::UncontrollableSurface { .. } => "gain",
            Error::InvalidController(ref m) if m.contains("gain") => "gain",
            _ => "surface",
        };
        s.err(key, e.to_string())
    })?;
    s.finish()?;
    Ok(Some(ControlSection { controller, master: PhaseState::from_array(master) }))
}

fn parse_analysis(mut s: Section<'_>) -> Result<AnalysisConfig> {
    let d = AnalysisConfig::default();
    let embed_dim = s.usize_or("embed_dim", d.embed_dim, 1)?;
    let tau_min = s.usize_or("tau_min", d.tau_min, 1)?;
    let tau_max = s.usize_or("tau_max", d.tau_max, 1)?;
    if tau_max < tau_min {
        return Err(s.err("tau_max", format!("must be >= tau_min ({tau_min})")));
    }
    let spectrum = s.bool_or("spectrum", d.spectrum)?;
    let lle = s.bool_or("lle", d.lle)?;
    let grid_half_width = s.positive("grid_half_width", d.grid_half_width)?;
    let grid_n = s.usize_or("grid_n", d.grid_n, 2)?;
    let grid_imag = match s.raw("grid_imag") {
        None => d.grid_imag,
        Some(v) => {
            let n = s.numbers("grid_imag", v, 2)?;
            (n[0], n[1])
        }
    };
    s.finish()?;
    Ok(AnalysisConfig { embed_dim, tau_min, tau_max, spectrum, lle, grid_half_width, grid_n, grid_imag })
}

fn parse_output(mut s: Section<'_>) -> Result<OutputConfig> {
    let d = OutputConfig::default();
    let dir = s.str_opt("dir")?.map_or(d.dir, PathBuf::from);
    let formats = match s.raw("formats") {
        None => d.formats,
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| match v.as_str() {
                Some("csv") => Ok(Format::Csv),
                Some("svg") => Ok(Format::Svg),
                _ => Err(s.err("formats", format!("unknown format {v}; expected \"csv\" or \"svg\""))),
            })
            .collect::<Result<_>>()?,
        Some(_) => return Err(s.err("formats", "expected an array of strings")),
    };
    s.finish()?;
    Ok(OutputConfig { dir, formats })
}
