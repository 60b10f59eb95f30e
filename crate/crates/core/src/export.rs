//! CSV and JSON writers for traces, episode summaries and Monte Carlo output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::montecarlo::MCStats;
use crate::simulation::{EpisodeResult, Trace};

/// Formats `x` with 9 significant digits, without exponent for ordinary
/// magnitudes.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=12).contains(&mag) {
        return format!("{x:.8e}");
    }
    let decimals = (8 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn trace_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 1..=n {
        h.push(format!("x_p{i}"));
        h.push(format!("y_p{i}"));
    }
    h.extend(["x_e", "y_e"].map(String::from));
    h.extend((1..=n).map(|i| format!("A_{i}")));
    h.extend(["V", "d_min", "mode", "active_j", "active_k", "encircled"].map(String::from));
    h
}

/// Writes one row per trace record. Area columns follow the hull edge order;
/// `active_j`/`active_k` are 1-based pursuer labels, empty in the interior
/// phase.
pub fn write_trace_csv<W: Write>(trace: &Trace, out: W) -> Result<()> {
    let n = trace.order.len();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trace_header(n)).map_err(csv_err)?;
    for r in &trace.records {
        let mut row = Vec::with_capacity(4 * n + 9);
        row.push(sig9(r.t));
        for p in &r.pursuers {
            row.push(sig9(p.x));
            row.push(sig9(p.y));
        }
        row.push(sig9(r.evader.x));
        row.push(sig9(r.evader.y));
        row.extend(r.areas.iter().map(|a| sig9(*a)));
        row.push(sig9(r.lyapunov));
        row.push(sig9(r.d_min));
        row.push(r.phase.label().to_string());
        match r.phase.active_edge() {
            Some(e) => {
                row.push((e.j + 1).to_string());
                row.push((e.k + 1).to_string());
            }
            None => {
                row.push(String::new());
                row.push(String::new());
            }
        }
        row.push(r.encircled.to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn save_trace(trace: &Trace, path: impl AsRef<Path>) -> Result<()> {
    write_trace_csv(trace, BufWriter::new(File::create(path)?))
}

pub fn save_summary(result: &EpisodeResult, path: impl AsRef<Path>) -> Result<()> {
    write_json(result, path)
}

/// Per-trial rows for every speed ratio in the sweep.
pub fn write_trials_csv<W: Write>(stats: &[MCStats], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "mu_max",
        "trial",
        "x_e0",
        "y_e0",
        "rejected_draws",
        "captured",
        "t_capture",
        "t_bound",
        "tau",
        "encirclement_ok",
        "min_area",
    ])
    .map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(sig9).unwrap_or_default();
    for s in stats {
        for r in &s.rows {
            w.write_record([
                sig9(r.mu_max),
                r.trial.to_string(),
                sig9(r.evader_start.x),
                sig9(r.evader_start.y),
                r.rejected_draws.to_string(),
                r.captured.to_string(),
                opt(r.t_capture),
                opt(r.t_bound),
                opt(r.tau),
                r.encirclement_ok.to_string(),
                sig9(r.min_area),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// τ histogram rows `mu_max, bin_lo, bin_hi, count`; the overflow bin has an
/// empty upper edge.
pub fn write_histogram_csv<W: Write>(stats: &[MCStats], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mu_max", "bin_lo", "bin_hi", "count"]).map_err(csv_err)?;
    for s in stats {
        let h = &s.histogram;
        for (i, c) in h.counts.iter().enumerate() {
            w.write_record([sig9(s.mu_max), sig9(h.edges[i]), sig9(h.edges[i + 1]), c.to_string()]).map_err(csv_err)?;
        }
        w.write_record([sig9(s.mu_max), "1".into(), String::new(), h.overflow.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `trials.csv`, `histogram.csv` and `montecarlo.json` into `dir`.
pub fn save_monte_carlo(stats: &[MCStats], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    write_trials_csv(stats, BufWriter::new(File::create(dir.join("trials.csv"))?))?;
    write_histogram_csv(stats, BufWriter::new(File::create(dir.join("histogram.csv"))?))?;
    write_json(stats, dir.join("montecarlo.json"))
}

fn csv_err(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}
