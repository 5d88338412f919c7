//! Command-line front end.
//!
//! ```text
//! contraction-kit <measure|certify|simulate|verify|audit-eq10> --config <path>
//!                 [--output <dir>] [--seed <int>] [--quiet]
//! ```
//!
//! Exit status: 0 pass, 1 verification failure, 2 usage or config error,
//! 3 numerical or I/O error.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::certify::{
    certify_domain, equivalence_audit, pointwise_rate, random_audit_case, AuditCase, CertificationReport,
};
use crate::dynsys::{make_system, DynamicalSystem};
use crate::error::Error;
use crate::measure::{matrix_measure, NormSpec, Vector};
use crate::simulate::{
    default_horizon, dini_slope_check, find_equilibrium, integrate, lyapunov_series, verify_pair_contraction,
    verify_theorem1, ClassK, Trajectory, VerificationVerdict,
};

pub use config::ExperimentConfig;
pub use report::{emit_report, fmt_float, Report, ReportRow, TrajectoryDump, SUMMARY_HEADER};

const DEFAULT_OUTPUT_DIR: &str = "out";
const DEFAULT_AUDIT_DRAWS: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("I/O failure: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

fn config_err(what: &str) -> impl Fn(Error) -> CliError + '_ {
    move |e| CliError::Config(format!("{what}: {e}"))
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_passed(passed: bool) -> Self {
        if passed {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "contraction-kit", version, about = "Contraction certificates and velocity Lyapunov checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print mu(J(x)) at the configured points for every configured norm.
    Measure(CommonArgs),
    /// Estimate the contraction rate over the configured box.
    Certify(CommonArgs),
    /// Integrate one trajectory and dump it.
    Simulate(CommonArgs),
    /// Certify, integrate, and check the velocity, pairwise and slope bounds.
    Verify(CommonArgs),
    /// Compare the weighted measure against the Krasovskii LMI.
    #[command(name = "audit-eq10")]
    AuditEq10(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides the config and CONTRACTION_KIT_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

/// Parses `argv` (command first, no program name), runs it and returns the
/// process exit status.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = std::iter::once(OsString::from("contraction-kit")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let rendered = e.to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: invalid arguments"));
            return CliError::Usage(rendered).exit_code();
        }
    };
    match execute(cli.command) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<Outcome, CliError> {
    let (name, args) = match &command {
        Command::Measure(a) => ("measure", a),
        Command::Certify(a) => ("certify", a),
        Command::Simulate(a) => ("simulate", a),
        Command::Verify(a) => ("verify", a),
        Command::AuditEq10(a) => ("audit-eq10", a),
    };
    let cfg = ExperimentConfig::load(&args.config)?;
    let seed = cfg.seed(args.seed)?;
    let out_dir = args
        .output
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    info!("{name}: config {} seed {seed} output {}", args.config.display(), out_dir.display());

    let mut run = Run {
        cfg,
        seed,
        quiet: args.quiet,
        report: Report::default(),
    };
    let outcome = match name {
        "measure" => run.measure()?,
        "certify" => run.certify()?,
        "simulate" => run.simulate()?,
        "verify" => run.verify()?,
        _ => run.audit()?,
    };
    emit_report(&run.report, &out_dir)?;
    if !run.quiet {
        for row in &run.report.rows {
            println!("{}", row_summary(row));
        }
        println!("wrote {}", out_dir.display());
    }
    Ok(outcome)
}

fn row_summary(row: &ReportRow) -> String {
    let mut parts = vec![format!("{:<24}", row.command), format!("{} [{}]", row.system_name, row.norm_kind)];
    if let Some(c) = row.rate_estimate {
        parts.push(format!("rate={c:.6}"));
    }
    if let Some(c) = row.certified {
        parts.push(format!("certified={c}"));
    }
    if let Some(r) = row.worst_ratio {
        parts.push(format!("worst_ratio={r:.9}"));
    }
    if let Some(p) = row.passed {
        parts.push(if p { "PASS".into() } else { "FAIL".into() });
    }
    parts.push(format!("samples={}", row.sample_count));
    parts.join("  ")
}

struct Run {
    cfg: ExperimentConfig,
    seed: u64,
    quiet: bool,
    report: Report,
}

impl Run {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    fn system(&self) -> Result<DynamicalSystem, CliError> {
        make_system(self.cfg.system()?).map_err(config_err("system"))
    }

    fn state(&self, values: &[f64], sys: &DynamicalSystem, what: &str) -> Result<Vector, CliError> {
        if values.len() != sys.dimension() {
            return Err(CliError::Config(format!(
                "{what} has {} entries, system '{}' has dimension {}",
                values.len(),
                sys.name(),
                sys.dimension()
            )));
        }
        Ok(Vector::from_row_slice(values))
    }

    fn row(&self, command: &str, sys: &str, norm: &NormSpec, started: Instant) -> ReportRow {
        ReportRow {
            command: command.into(),
            system_name: sys.into(),
            norm_kind: norm.kind().as_str().into(),
            rate_estimate: None,
            certified: None,
            worst_ratio: None,
            passed: None,
            sample_count: 0,
            wall_time_seconds: started.elapsed().as_secs_f64(),
        }
    }

    fn measure(&mut self) -> Result<Outcome, CliError> {
        let sys = self.system()?;
        let mut norms = vec![self.cfg.norm.resolve()?];
        for extra in &self.cfg.norms {
            norms.push(extra.resolve()?);
        }
        let points: Vec<Vec<f64>> = match (&self.cfg.measure_points, &self.cfg.simulation, &self.cfg.domain) {
            (Some(points), _, _) => points.clone(),
            (None, Some(sim), _) => vec![sim.x0.clone()],
            (None, None, Some(b)) => vec![b.lower.iter().zip(&b.upper).map(|(l, u)| 0.5 * (l + u)).collect()],
            _ => return Err(CliError::Config("measure needs measure_points, simulation.x0 or a box".into())),
        };
        if points.is_empty() {
            return Err(CliError::Config("measure_points is empty".into()));
        }
        let points = points
            .iter()
            .map(|p| self.state(p, &sys, "measure point"))
            .collect::<Result<Vec<_>, _>>()?;

        let n = sys.dimension();
        let header = format!(
            "point_index,{},norm,mu",
            (1..=n).map(|i| format!("x_{i}")).collect::<Vec<_>>().join(",")
        );
        let mut lines = Vec::new();
        for norm in &norms {
            let started = Instant::now();
            let mut sup = f64::NEG_INFINITY;
            for (k, x) in points.iter().enumerate() {
                let mu = pointwise_rate(&sys, x, norm)?;
                sup = sup.max(mu);
                self.say(format!("mu_{}(J(x{k})) = {}", norm.kind(), fmt_float(mu)));
                lines.push(format!(
                    "{k},{},{},{}",
                    x.iter().map(|v| fmt_float(*v)).collect::<Vec<_>>().join(","),
                    norm.kind(),
                    fmt_float(mu)
                ));
            }
            let mut row = self.row("measure", sys.name(), norm, started);
            row.rate_estimate = Some(-sup);
            row.sample_count = points.len();
            self.report.rows.push(row);
        }
        self.report
            .tables
            .push((format!("measure_{}.csv", sys.name()), header, lines));
        Ok(Outcome::Pass)
    }

    fn run_certification(&mut self, sys: &DynamicalSystem, norm: &NormSpec) -> Result<CertificationReport, CliError> {
        let started = Instant::now();
        let domain = self.cfg.domain()?;
        if domain.dim() != sys.dimension() {
            return Err(CliError::Config(format!(
                "box has dimension {}, system '{}' has {}",
                domain.dim(),
                sys.name(),
                sys.dimension()
            )));
        }
        let cert = certify_domain(sys, &domain, norm, &self.cfg.plan(self.seed))?;
        let mut row = self.row("certify", sys.name(), norm, started);
        row.rate_estimate = Some(cert.rate_estimate);
        row.certified = Some(cert.certified);
        row.passed = Some(cert.certified);
        row.sample_count = cert.sample_count;
        self.report.rows.push(row);
        self.report.certifications.push((sys.name().to_string(), cert.clone()));
        self.say(format!(
            "sup mu = {} at {:?} ({}, {} samples)",
            fmt_float(cert.sup_measure),
            cert.witness.as_slice(),
            cert.caveat,
            cert.sample_count
        ));
        Ok(cert)
    }

    fn certify(&mut self) -> Result<Outcome, CliError> {
        let sys = self.system()?;
        let norm = self.cfg.norm.resolve()?;
        let cert = self.run_certification(&sys, &norm)?;
        Ok(Outcome::from_passed(cert.certified))
    }

    fn horizon(&self, sys: &DynamicalSystem, norm: &NormSpec, x0: &Vector, rate: Option<f64>) -> Result<(f64, f64), CliError> {
        let sim = self.cfg.simulation()?;
        if let (Some(t_final), Some(dt)) = (sim.t_final, sim.dt) {
            return Ok((t_final, dt));
        }
        let mu0 = pointwise_rate(sys, x0, norm)?;
        let (default_t, default_dt) = match rate {
            Some(c) if c > 0.0 => default_horizon(c, mu0),
            _ if sim.t_final.is_some() => (0.0, default_horizon(1.0, mu0).1),
            _ => {
                return Err(CliError::Config(
                    "simulation.t_final is required when no positive rate is available".into(),
                ))
            }
        };
        let t_final = sim.t_final.unwrap_or(default_t);
        Ok((t_final, sim.dt.unwrap_or(default_dt.min(t_final))))
    }

    fn dump(&self, stem: String, traj: Trajectory, sys: &DynamicalSystem, norm: &NormSpec) -> Result<TrajectoryDump, CliError> {
        let values = |rho| -> Result<Vec<f64>, CliError> {
            Ok(lyapunov_series(&traj, sys, norm, rho)?.into_iter().map(|(_, v)| v).collect())
        };
        let v_identity = values(ClassK::Identity)?;
        let v_rho = values(self.cfg.rho.validate().map_err(config_err("rho"))?)?;
        Ok(TrajectoryDump {
            stem,
            trajectory: traj,
            v_identity,
            v_rho,
        })
    }

    fn simulate(&mut self) -> Result<Outcome, CliError> {
        let started = Instant::now();
        let sys = self.system()?;
        let norm = self.cfg.norm.resolve()?;
        let sim = self.cfg.simulation()?.clone();
        let x0 = self.state(&sim.x0, &sys, "simulation.x0")?;
        let rate = match (sim.t_final, self.cfg.verification.c, &self.cfg.domain) {
            (Some(_), _, _) => None,
            (None, Some(c), _) => Some(c),
            (None, None, Some(_)) => {
                let domain = self.cfg.domain()?;
                Some(certify_domain(&sys, &domain, &norm, &self.cfg.plan(self.seed))?.rate_estimate)
            }
            (None, None, None) => None,
        };
        let (t_final, dt) = self.horizon(&sys, &norm, &x0, rate)?;
        let traj = integrate(&sys, &x0, t_final, dt)?;
        let mut row = self.row("simulate", sys.name(), &norm, started);
        row.sample_count = traj.len();
        row.wall_time_seconds = started.elapsed().as_secs_f64();
        self.report.rows.push(row);
        let dump = self.dump(sys.name().to_string(), traj, &sys, &norm)?;
        self.report.trajectories.push(dump);
        Ok(Outcome::Pass)
    }

    fn verdict_row(&self, command: &str, sys: &str, norm: &NormSpec, rate: Option<f64>, v: &VerificationVerdict, started: Instant) -> ReportRow {
        let mut row = self.row(command, sys, norm, started);
        row.rate_estimate = rate;
        row.worst_ratio = Some(v.worst_ratio);
        row.passed = Some(v.passed);
        row.sample_count = v.samples;
        row
    }

    fn verify(&mut self) -> Result<Outcome, CliError> {
        let sys = self.system()?;
        let norm = self.cfg.norm.resolve()?;
        let sim = self.cfg.simulation()?.clone();
        let x0 = self.state(&sim.x0, &sys, "simulation.x0")?;
        let settings = self.cfg.verification.clone();

        let cert = self.run_certification(&sys, &norm)?;
        let c = match settings.c {
            Some(c) if c > 0.0 && c.is_finite() => c,
            Some(c) => return Err(CliError::Config(format!("verification.c must be positive, got {c}"))),
            None if cert.certified => cert.rate_estimate,
            None => {
                self.say("no positive contraction rate on the box; nothing to verify");
                return Ok(Outcome::Fail);
            }
        };

        let (t_final, dt) = self.horizon(&sys, &norm, &x0, Some(c))?;
        let started = Instant::now();
        let traj = integrate(&sys, &x0, t_final, dt)?;
        let velocity = verify_theorem1(&traj, &sys, &norm, c, settings.tol)?;
        let row = self.verdict_row("verify_theorem1", sys.name(), &norm, Some(c), &velocity, started);
        self.report.rows.push(row);

        let started = Instant::now();
        let xi0 = match &sim.xi0 {
            Some(xi0) => self.state(xi0, &sys, "simulation.xi0")?,
            None => find_equilibrium(&sys, &x0, settings.equilibrium_tol)?,
        };
        let traj_xi = integrate(&sys, &xi0, t_final, dt)?;
        let pair = verify_pair_contraction(&traj, &traj_xi, &norm, c, settings.tol)?;
        let row = self.verdict_row("verify_pair_contraction", sys.name(), &norm, Some(c), &pair, started);
        self.report.rows.push(row);

        let started = Instant::now();
        let slope = dini_slope_check(&traj, &sys, &norm, settings.slope_tol)?;
        let row = self.verdict_row("dini_slope_check", sys.name(), &norm, None, &slope, started);
        self.report.rows.push(row);

        let name = sys.name().to_string();
        let main = self.dump(name.clone(), traj, &sys, &norm)?;
        let comparison = self.dump(format!("{name}_xi"), traj_xi, &sys, &norm)?;
        self.report.trajectories.push(main);
        self.report.trajectories.push(comparison);

        Ok(Outcome::from_passed(velocity.passed && pair.passed && slope.passed))
    }

    fn audit(&mut self) -> Result<Outcome, CliError> {
        let started = Instant::now();
        let audit = self.cfg.audit.clone().unwrap_or(config::AuditConfig {
            cases: Vec::new(),
            random: DEFAULT_AUDIT_DRAWS,
            min_dim: 1,
            max_dim: 5,
        });
        let mut cases = Vec::with_capacity(audit.cases.len() + audit.random);
        for (k, case) in audit.cases.iter().enumerate() {
            let a = config::square_matrix(&case.a, "audit A")?;
            let p = config::square_matrix(&case.p, "audit P")?;
            if a.nrows() != p.nrows() {
                return Err(CliError::Config(format!("audit case {k}: A and P differ in size")));
            }
            NormSpec::weighted(p.clone()).map_err(config_err("audit P"))?;
            cases.push(AuditCase { a, p, c: case.c });
        }
        let sampler = audit.sampler()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        cases.extend((0..audit.random).map(|_| random_audit_case(&mut rng, &sampler)));

        let mut lines = Vec::with_capacity(cases.len());
        let (mut boundary, mut disagree) = (0, 0);
        for (k, case) in cases.iter().enumerate() {
            let rec = equivalence_audit(&case.a, &case.p, case.c)?;
            boundary += usize::from(rec.boundary);
            disagree += usize::from(rec.disagrees());
            lines.push(format!(
                "{k},{},{},{},{},{},{}",
                case.a.nrows(),
                fmt_float(case.c),
                fmt_float(rec.measure_side),
                fmt_float(rec.lmi_side),
                rec.agree,
                rec.boundary
            ));
        }
        self.say(format!(
            "{} cases, {} boundary, {} disagreements",
            cases.len(),
            boundary,
            disagree
        ));
        let system = self.cfg.system.as_ref().map_or("-".to_string(), |s| s.name.clone());
        let weighted = NormSpec::weighted(crate::measure::Matrix::identity(1, 1))?;
        let mut row = self.row("audit-eq10", &system, &weighted, started);
        row.passed = Some(disagree == 0);
        row.sample_count = cases.len();
        self.report.rows.push(row);
        self.report.tables.push((
            "audit_eq10.csv".into(),
            "case_index,dimension,c,measure_side,lmi_side,agree,boundary".into(),
            lines,
        ));
        Ok(Outcome::from_passed(disagree == 0))
    }
}

/// Convenience for tests and embedding: the measure of `J(x)` in every norm
/// listed, in order.
pub fn measures_at(sys: &DynamicalSystem, x: &Vector, norms: &[NormSpec]) -> crate::Result<Vec<f64>> {
    let jac = sys.eval_jacobian(x)?;
    norms.iter().map(|n| Ok(matrix_measure(&jac, n)?.value)).collect()
}
