use std::io::{Read, Write};

use super::{IntegratorSettings, PhaseState, Trajectory, TrajectoryMeta};
use crate::error::{Error, Result};

pub const TRAJECTORY_HEADER: [&str; 5] = ["t", "x_r", "x_i", "y_r", "y_i"];

/// 17 significant digits: enough to round-trip any `f64`.
pub(crate) fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

pub fn write_trajectory_csv<W: Write>(tr: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER).map_err(csv_err)?;
    for (k, s) in tr.states.iter().enumerate() {
        let row = [tr.time(k), s.x_r, s.x_i, s.y_r, s.y_i].map(fmt17);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("csv flush: {e}")))
}

/// Reads a trajectory CSV back. Sampling is inferred from the first two rows.
pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Trajectory> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != TRAJECTORY_HEADER {
        return Err(Error::InvalidArgument(format!(
            "unexpected trajectory header: {header:?}"
        )));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidArgument(format!("bad number `{f}`: {e}")))
            })
            .collect::<Result<_>>()?;
        if vals.len() != 5 {
            return Err(Error::InvalidArgument("trajectory row needs 5 columns".into()));
        }
        times.push(vals[0]);
        states.push(PhaseState::new(vals[1], vals[2], vals[3], vals[4]));
    }
    if states.is_empty() {
        return Err(Error::InvalidArgument("trajectory CSV has no rows".into()));
    }
    let dt_sample = if times.len() > 1 { times[1] - times[0] } else { 1.0 };
    let t_final = times[times.len() - 1] - times[0];
    Ok(Trajectory {
        t0: times[0],
        dt_sample,
        states,
        meta: TrajectoryMeta {
            settings: IntegratorSettings {
                t_final: t_final.max(dt_sample),
                dt: dt_sample,
                stride: 1,
            },
            params: None,
            spec: None,
        },
        abort: None,
    })
}
