use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use super::config::{Format, ScenarioConfig};
use super::svg::{heat_map, line_plot, Plot, Series};
use crate::control::{simulate_sync, write_sync_csv, SyncRun};
use crate::diagnostics::{largest_lyapunov, periodogram, LleResult, SpectrumResult, DOMINANT_FRACTION};
use crate::error::{Error, Result};
use crate::integrator::{fmt17, integrate, write_trajectory_csv, PhaseState, Trajectory};
use crate::model::{total_potential_grid, RealGrid, StateField};

/// Threshold on `|e_i|` used when reporting when a run has synchronized.
pub const SYNC_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    /// A run stopped early at a wavefunction node.
    pub singular: bool,
    pub acceptance_failed: bool,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn merge(&mut self, other: Outcome) {
        self.singular |= other.singular;
        self.acceptance_failed |= other.acceptance_failed;
        self.files.extend(other.files);
    }
}

pub(crate) struct Writer<'a> {
    dir: &'a Path,
    csv: bool,
    svg: bool,
    pub(crate) outcome: Outcome,
}

impl<'a> Writer<'a> {
    pub(crate) fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        Self::with_formats(&cfg.output.dir, cfg.output.wants(Format::Csv), cfg.output.wants(Format::Svg))
    }

    pub(crate) fn with_formats(dir: &'a Path, csv: bool, svg: bool) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Writer { dir, csv, svg, outcome: Outcome::default() })
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.outcome.files.push(path);
        Ok(())
    }

    pub(crate) fn csv(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        if !self.csv {
            return Ok(());
        }
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.put(&format!("{name}.csv"), &buf)
    }

    pub(crate) fn svg(&mut self, name: &str, f: impl FnOnce() -> String) -> Result<()> {
        if !self.svg {
            return Ok(());
        }
        self.put(&format!("{name}.svg"), f().as_bytes())
    }

    pub(crate) fn text(&mut self, name: &str, text: &str) -> Result<()> {
        self.put(name, text.as_bytes())
    }
}

pub(crate) fn state_label(s: &PhaseState) -> String {
    let [a, b, c, d] = s.to_array();
    format!("[{a}, {b}, {c}, {d}]")
}

fn report_abort(tr: &Trajectory, label: &str, out: &mut Outcome) {
    if let Some(a) = &tr.abort {
        println!("{label}: stopped at t = {:.4}: {}", a.t, a.error);
        out.singular |= a.error.is_singularity();
    }
}

pub fn params(cfg: &ScenarioConfig) -> Result<Outcome> {
    let p = &cfg.model.params;
    let table = p.table();
    for (name, v) in &table {
        println!("{name:>6} = {v:.10}");
    }
    println!("{:>6} = {:.10}", "E", cfg.model.params.energy(cfg.model.spec.n1, cfg.model.spec.n2));
    let mut w = Writer::new(cfg)?;
    w.csv("params", |buf| {
        writeln!(buf, "name,value").map_err(|e| Error::io("params.csv", e))?;
        for (name, v) in &table {
            writeln!(buf, "{name},{}", fmt17(*v)).map_err(|e| Error::io("params.csv", e))?;
        }
        Ok(())
    })?;
    Ok(w.outcome)
}

fn trajectories(cfg: &ScenarioConfig) -> Result<Vec<Trajectory>> {
    let run = cfg.require_run()?;
    let field = StateField::new(cfg.model.params, cfg.model.spec.clone());
    run.initial
        .iter()
        .map(|s0| {
            let s = &run.settings;
            integrate(&field, *s0, s.t_final, s.dt, s.stride)
                .map(|t| t.with_model(cfg.model.params, cfg.model.spec.clone()))
        })
        .collect()
}

fn sync_runs(cfg: &ScenarioConfig) -> Result<Vec<SyncRun>> {
    let run = cfg.require_run()?;
    let ctl = cfg.require_controller()?;
    run.initial
        .iter()
        .map(|s0| simulate_sync(&cfg.model.params, &ctl.controller, ctl.master, *s0, run.settings))
        .collect()
}

pub(crate) fn plane_plot(title: &str, trs: &[(&str, &Trajectory)]) -> String {
    line_plot(&Plot {
        title,
        x_label: "x_R",
        y_label: "y_R",
        log_y: false,
        series: trs
            .iter()
            .map(|(label, t)| Series { label, points: t.states.iter().map(|s| (s.x_r, s.y_r)).collect() })
            .collect(),
    })
}

pub fn simulate(cfg: &ScenarioConfig) -> Result<Outcome> {
    let mut w = Writer::new(cfg)?;
    for (i, tr) in trajectories(cfg)?.iter().enumerate() {
        let label = state_label(&tr.states[0]);
        println!("trajectory {i} from {label}: {} samples, dt_sample {}", tr.len(), tr.dt_sample);
        report_abort(tr, &label, &mut w.outcome);
        w.csv(&format!("trajectory_{i}"), |b| write_trajectory_csv(tr, b))?;
        w.svg(&format!("trajectory_{i}"), || plane_plot(&format!("trajectory from {label}"), &[("", tr)]))?;
    }
    Ok(w.outcome)
}

pub(crate) fn error_plot(run: &SyncRun, title: &str) -> String {
    let t: Vec<f64> = (0..run.len()).map(|k| run.time(k)).collect();
    let names = ["e1", "e2", "e3", "e4"];
    line_plot(&Plot {
        title,
        x_label: "t",
        y_label: "error",
        log_y: false,
        series: (0..4)
            .map(|c| Series { label: names[c], points: t.iter().zip(&run.error).map(|(t, e)| (*t, e[c])).collect() })
            .collect(),
    })
}

fn sliding_plot(run: &SyncRun, title: &str) -> String {
    line_plot(&Plot {
        title,
        x_label: "t",
        y_label: "s",
        log_y: false,
        series: vec![Series { label: "s", points: (0..run.len()).map(|k| (run.time(k), run.sliding[k])).collect() }],
    })
}

pub fn control(cfg: &ScenarioConfig) -> Result<Outcome> {
    let mut w = Writer::new(cfg)?;
    let eps = cfg.require_controller()?.controller.epsilon;
    for (i, run) in sync_runs(cfg)?.iter().enumerate() {
        let label = state_label(&run.slave.states[0]);
        let reach = run.reach_time(eps).map_or("never".into(), |t| format!("{t:.3}"));
        let synced = run
            .last_error_excursion(SYNC_TOLERANCE)
            .map_or("from start".into(), |t| format!("after t = {t:.3}"));
        println!("slave {i} from {label}: |s| < {eps} from t = {reach}; |e| < {SYNC_TOLERANCE} {synced}");
        if let Some(a) = &run.abort {
            println!("slave {i}: stopped at t = {:.4}: {}", a.t, a.error);
            w.outcome.singular |= a.error.is_singularity();
        }
        w.csv(&format!("sync_{i}"), |b| write_sync_csv(run, b))?;
        w.svg(&format!("sync_{i}_error"), || error_plot(run, &format!("synchronization error, slave {label}")))?;
        w.svg(&format!("sync_{i}_sliding"), || sliding_plot(run, &format!("sliding value, slave {label}")))?;
        w.svg(&format!("sync_{i}_plane"), || {
            plane_plot(&format!("master and slave {label}"), &[("master", &run.master), ("slave", &run.slave)])
        })?;
    }
    Ok(w.outcome)
}

/// The uncontrolled trajectories, plus the controlled slaves when a
/// controller is configured.
fn analysis_series(cfg: &ScenarioConfig) -> Result<(Vec<(String, Trajectory)>, Outcome)> {
    let mut out = Outcome::default();
    let mut list = Vec::new();
    for (i, tr) in trajectories(cfg)?.into_iter().enumerate() {
        report_abort(&tr, &state_label(&tr.states[0]), &mut out);
        list.push((format!("{i}"), tr));
    }
    if cfg.controller.is_some() {
        for (i, run) in sync_runs(cfg)?.into_iter().enumerate() {
            report_abort(&run.slave, &state_label(&run.slave.states[0]), &mut out);
            list.push((format!("{i}_controlled"), run.slave));
        }
    }
    Ok((list, out))
}

pub(crate) fn spectrum_plot(s: &SpectrumResult, title: &str) -> String {
    line_plot(&Plot {
        title,
        x_label: "frequency",
        y_label: "power",
        log_y: true,
        series: vec![Series { label: "", points: s.freqs.iter().copied().zip(s.power.iter().copied()).skip(1).collect() }],
    })
}

pub(crate) fn write_spectrum_csv(s: &SpectrumResult, buf: &mut Vec<u8>) -> Result<()> {
    let err = |e: std::io::Error| Error::io("spectrum.csv", e);
    writeln!(buf, "freq,power").map_err(err)?;
    for (f, p) in s.freqs.iter().zip(&s.power) {
        writeln!(buf, "{},{}", fmt17(*f), fmt17(*p)).map_err(err)?;
    }
    Ok(())
}

pub fn spectrum(cfg: &ScenarioConfig) -> Result<Outcome> {
    let (series, pre) = analysis_series(cfg)?;
    let mut w = Writer::new(cfg)?;
    w.outcome.merge(pre);
    for (tag, tr) in &series {
        let s = periodogram(&tr.x_real(), tr.dt_sample)?;
        let dom: Vec<String> = s
            .dominant_peaks(DOMINANT_FRACTION)
            .iter()
            .map(|(f, p)| format!("{f:.4} ({:.1}%)", 100.0 * p / s.total_power()))
            .collect();
        println!(
            "spectrum {tag} from {}: flatness {:.3e}, dominant peaks: {}",
            state_label(&tr.states[0]),
            s.flatness,
            if dom.is_empty() { "none".into() } else { dom.join(", ") }
        );
        w.csv(&format!("spectrum_{tag}"), |b| write_spectrum_csv(&s, b))?;
        w.svg(&format!("spectrum_{tag}"), || spectrum_plot(&s, &format!("spectrum {tag}")))?;
    }
    Ok(w.outcome)
}

pub(crate) fn divergence_plot(r: &LleResult, title: &str) -> String {
    line_plot(&Plot {
        title,
        x_label: "t",
        y_label: "mean ln separation",
        log_y: false,
        series: r
            .divergence_curves
            .iter()
            .map(|c| Series {
                label: "",
                points: c.mean_log.iter().enumerate().map(|(i, v)| (i as f64 * r.dt_sample, *v)).collect(),
            })
            .collect(),
    })
}

pub(crate) fn write_divergence_csv(r: &LleResult, buf: &mut Vec<u8>) -> Result<()> {
    let err = |e: std::io::Error| Error::io("divergence.csv", e);
    writeln!(buf, "tau,step,t,mean_log,in_fit").map_err(err)?;
    for c in &r.divergence_curves {
        for (i, v) in c.mean_log.iter().enumerate() {
            let t = i as f64 * r.dt_sample;
            writeln!(buf, "{},{i},{},{},{}", c.tau, fmt17(t), fmt17(*v), u8::from(i < c.fit_len)).map_err(err)?;
        }
    }
    Ok(())
}

pub fn lle(cfg: &ScenarioConfig) -> Result<Outcome> {
    let (series, pre) = analysis_series(cfg)?;
    let mut w = Writer::new(cfg)?;
    w.outcome.merge(pre);
    let taus = cfg.analysis.taus();
    for (tag, tr) in &series {
        let r = largest_lyapunov(&tr.x_real(), tr.dt_sample, cfg.analysis.embed_dim, &taus)?;
        let per: Vec<String> = r.per_delay_slopes.iter().map(|v| format!("{v:.4}")).collect();
        println!(
            "lle {tag} from {}: {:.4} (per delay: {})",
            state_label(&tr.states[0]),
            r.slope,
            per.join(" ")
        );
        w.csv(&format!("divergence_{tag}"), |b| write_divergence_csv(&r, b))?;
        w.svg(&format!("divergence_{tag}"), || divergence_plot(&r, &format!("divergence {tag}")))?;
    }
    Ok(w.outcome)
}

pub fn potential_grid(cfg: &ScenarioConfig) -> Result<Outcome> {
    let a = &cfg.analysis;
    let grid = RealGrid::square(a.grid_half_width, a.grid_n);
    let g = total_potential_grid(&cfg.model.params, &cfg.model.spec, a.grid_imag.0, a.grid_imag.1, &grid)?;
    let missing = g.value.iter().filter(|v| v.is_none()).count();
    if let Some((x, y, v)) = g.max_magnitude() {
        println!("potential grid {}x{}: largest |V| = {v:.4} at ({x:.3}, {y:.3}); {missing} node cells", a.grid_n, a.grid_n);
    }
    let mut w = Writer::new(cfg)?;
    w.csv("potential", |buf| {
        let err = |e: std::io::Error| Error::io("potential.csv", e);
        writeln!(buf, "x_r,y_r,x_i,y_i,v,dv_dx,dv_dy").map_err(err)?;
        for (iy, y) in g.ys.iter().enumerate() {
            for (ix, x) in g.xs.iter().enumerate() {
                let k = g.index(ix, iy);
                let v = g.value[k].map(fmt17).unwrap_or_default();
                let (gx, gy) = g.gradient[k].map_or((String::new(), String::new()), |(a, b)| (fmt17(a), fmt17(b)));
                writeln!(buf, "{},{},{},{},{v},{gx},{gy}", fmt17(*x), fmt17(*y), fmt17(g.x_imag), fmt17(g.y_imag))
                    .map_err(err)?;
            }
        }
        Ok(())
    })?;
    w.svg("potential", || heat_map("total potential", &g.xs, &g.ys, &g.value))?;
    Ok(w.outcome)
}
