//! CSV outputs. Floats are written with 17 significant digits so every
//! value round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::certify::CertificationReport;
use crate::simulate::Trajectory;

pub const SUMMARY_HEADER: &str = "command,system,norm,rate_estimate,certified,worst_ratio,passed,samples,wall_s";

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub command: String,
    pub system_name: String,
    pub norm_kind: String,
    pub rate_estimate: Option<f64>,
    pub certified: Option<bool>,
    pub worst_ratio: Option<f64>,
    pub passed: Option<bool>,
    pub sample_count: usize,
    pub wall_time_seconds: f64,
}

/// A trajectory with its two Lyapunov series, written as `traj_<stem>.csv`.
#[derive(Debug, Clone)]
pub struct TrajectoryDump {
    pub stem: String,
    pub trajectory: Trajectory,
    pub v_identity: Vec<f64>,
    pub v_rho: Vec<f64>,
}

/// Everything one command produced.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub trajectories: Vec<TrajectoryDump>,
    /// `(stem, report)`, written as `cert_<stem>.csv`.
    pub certifications: Vec<(String, CertificationReport)>,
    /// Extra free-form tables: `(file name, header, rows)`.
    pub tables: Vec<(String, String, Vec<String>)>,
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn opt_bool(b: Option<bool>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

fn coordinate_header(n: usize) -> String {
    (1..=n).map(|i| format!("x_{i}")).collect::<Vec<_>>().join(",")
}

fn join_floats<'a>(values: impl Iterator<Item = &'a f64>) -> String {
    values.map(|&v| fmt_float(v)).collect::<Vec<_>>().join(",")
}

impl ReportRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.command,
            self.system_name,
            self.norm_kind,
            opt_float(self.rate_estimate),
            opt_bool(self.certified),
            opt_float(self.worst_ratio),
            opt_bool(self.passed),
            self.sample_count,
            fmt_float(self.wall_time_seconds),
        )
    }
}

pub fn summary_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

pub fn trajectory_csv(dump: &TrajectoryDump) -> String {
    let traj = &dump.trajectory;
    let mut out = format!("t,{},V_identity,V_rho\n", coordinate_header(traj.dim()));
    for (k, (t, x)) in traj.times().iter().zip(traj.states()).enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_float(*t),
            join_floats(x.iter()),
            fmt_float(dump.v_identity[k]),
            fmt_float(dump.v_rho[k])
        );
    }
    out
}

pub fn certification_csv(report: &CertificationReport) -> String {
    let n = report.witness.len();
    let mut out = format!("sample_index,{},mu\n", coordinate_header(n));
    for s in &report.samples {
        let _ = writeln!(out, "{},{},{}", s.index, join_floats(s.point.iter()), fmt_float(s.mu));
    }
    out
}

/// Writes `summary.csv` plus every trajectory, certification dump and extra
/// table into `dir`, creating it if needed. Returns the written paths.
pub fn emit_report(report: &Report, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> io::Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put("summary.csv".into(), summary_csv(&report.rows))?;
    for (stem, cert) in &report.certifications {
        put(format!("cert_{stem}.csv"), certification_csv(cert))?;
    }
    for dump in &report.trajectories {
        put(format!("traj_{}.csv", dump.stem), trajectory_csv(dump))?;
    }
    for (name, header, rows) in &report.tables {
        let mut body = header.clone();
        body.push('\n');
        for row in rows {
            body.push_str(row);
            body.push('\n');
        }
        put(name.clone(), body)?;
    }
    Ok(written)
}
