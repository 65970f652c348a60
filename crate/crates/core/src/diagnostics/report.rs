use std::fmt::Write as _;
use std::io::Write;

use super::lyapunov::largest_lyapunov;
use crate::control::SyncRun;
use crate::error::{Error, Result};
use crate::integrator::{fmt17, PhaseState, Trajectory};

#[derive(Debug, Clone, PartialEq)]
pub struct LleSettings {
    pub embed_dim: usize,
    pub taus: Vec<usize>,
}

impl Default for LleSettings {
    fn default() -> Self {
        LleSettings {
            embed_dim: super::lyapunov::DEFAULT_EMBED_DIM,
            taus: super::lyapunov::DEFAULT_TAUS.collect(),
        }
    }
}

/// One uncontrolled slave run and the matching controlled run.
#[derive(Debug, Clone, Copy)]
pub struct ReportEntry<'a> {
    pub uncontrolled: &'a Trajectory,
    pub controlled: &'a SyncRun,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaosRow {
    pub slave: PhaseState,
    pub uncontrolled: f64,
    pub controlled: f64,
    pub master: PhaseState,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChaosTable {
    pub rows: Vec<ChaosRow>,
}

fn fmt_state(s: &PhaseState) -> String {
    let [a, b, c, d] = s.to_array();
    format!("[{a}, {b}, {c}, {d}]")
}

impl ChaosTable {
    pub fn to_text(&self) -> String {
        let head = ["slave initial", "uncontrolled", "controlled", "master initial"];
        let body: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    fmt_state(&r.slave),
                    format!("{:.4}", r.uncontrolled),
                    format!("{:.4}", r.controlled),
                    fmt_state(&r.master),
                ]
            })
            .collect();
        let mut width = head.map(str::len);
        for row in &body {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: [&str; 4]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(width)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&mut out, head);
        let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
        let _ = writeln!(out, "{}", rule.join("  "));
        for row in &body {
            line(&mut out, [&row[0], &row[1], &row[2], &row[3]]);
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "slave_x_r", "slave_x_i", "slave_y_r", "slave_y_i", "lle_uncontrolled",
            "lle_controlled", "master_x_r", "master_x_i", "master_y_r", "master_y_i",
        ])
        .map_err(err)?;
        for r in &self.rows {
            let mut row: Vec<f64> = r.slave.to_array().to_vec();
            row.push(r.uncontrolled);
            row.push(r.controlled);
            row.extend(r.master.to_array());
            w.write_record(row.into_iter().map(fmt17)).map_err(err)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidArgument(format!("csv flush: {e}")))
    }
}

fn first_state(tr: &Trajectory) -> Result<PhaseState> {
    tr.states
        .first()
        .copied()
        .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))
}

/// Largest exponent of the `x_r` series before and after control, per entry.
pub fn chaos_report(entries: &[ReportEntry<'_>], settings: &LleSettings) -> Result<ChaosTable> {
    let lle = |tr: &Trajectory| {
        largest_lyapunov(&tr.x_real(), tr.dt_sample, settings.embed_dim, &settings.taus)
            .map(|r| r.slope)
    };
    let rows = entries
        .iter()
        .map(|e| {
            Ok(ChaosRow {
                slave: first_state(e.uncontrolled)?,
                uncontrolled: lle(e.uncontrolled)?,
                controlled: lle(&e.controlled.slave)?,
                master: first_state(&e.controlled.master)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ChaosTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report() {
        let t = chaos_report(&[], &LleSettings::default()).unwrap();
        assert!(t.rows.is_empty());
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
        assert_eq!(t.to_text().lines().count(), 2);
    }

    #[test]
    fn text_columns_align() {
        let t = ChaosTable {
            rows: vec![ChaosRow {
                slave: PhaseState::new(1.1, 0.0, 1.0, 0.0),
                uncontrolled: 0.294,
                controlled: 0.005,
                master: PhaseState::new(2.0, 0.0, 2.0, 0.0),
            }],
        };
        let text = t.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0].find("uncontrolled"), lines[2].find("0.2940"));
        assert!(lines[2].contains("[1.1, 0, 1, 0]"));
    }
}
