//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit
//! if any criterion fails. Tolerances and runtime limits are fixed here and
//! must not be relaxed to make a line green.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use contraction_kit::certify::{
    certify_domain, equivalence_audit, random_audit_batch, random_audit_case, AuditSampler, BoxDomain, SamplingPlan,
};
use contraction_kit::cli::run_command;
use contraction_kit::dynsys::{make_system, DynamicalSystem, SystemConfig};
use contraction_kit::measure::{
    induced_norm, matrix_measure, matrix_measure_limit_oracle, Matrix, NormSpec, Vector, DEFAULT_H_SCHEDULE,
};
use contraction_kit::simulate::{
    dini_slope_check, find_equilibrium, integrate, verify_pair_contraction, verify_theorem1,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_TOL: f64 = 1e-6;
const AXIOM_SLACK: f64 = 1e-9;
const AUDIT_COUNT: usize = 1000;
const VERIFY_TOL: f64 = 1e-6;
const TIGHTNESS_TOL: f64 = 1e-6;
const SLOPE_TOL: f64 = 1e-2;
const DT: f64 = 1e-3;
const T_FINAL: f64 = 10.0;
const RK4_RATIO: (f64, f64) = (12.0, 20.0);
const DIMS: [usize; 5] = [1, 2, 3, 5, 10];
const PER_DIM: usize = 200;

type Check = Result<(bool, String), String>;

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, id: u32, title: &str, limit_s: Option<f64>, body: impl FnOnce() -> Check) {
        let started = Instant::now();
        let result = body();
        let elapsed = started.elapsed().as_secs_f64();
        let (mut ok, mut detail) = match result {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        match limit_s {
            Some(limit) => {
                let in_time = elapsed < limit;
                ok &= in_time;
                detail.push_str(&format!("; {elapsed:.2} s (limit {limit} s){}", if in_time { "" } else { " TOO SLOW" }));
            }
            None => detail.push_str(&format!("; {elapsed:.2} s")),
        }
        if !ok {
            self.failures += 1;
        }
        println!("[{}] {id}. {title}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

/// Random matrix with a random SPD weight of the same size, for each of the
/// 200 draws per dimension.
fn corpus() -> Vec<(Matrix, [NormSpec; 4])> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut out = Vec::with_capacity(DIMS.len() * PER_DIM);
    for n in DIMS {
        let sampler = AuditSampler {
            min_dim: n,
            max_dim: n,
            ..AuditSampler::default()
        };
        for _ in 0..PER_DIM {
            let scale = rng.gen_range(0.1..3.0);
            let a = Matrix::from_fn(n, n, |_, _| scale * rng.gen_range(-1.0..=1.0));
            let p = random_audit_case(&mut rng, &sampler).p;
            let weighted = NormSpec::weighted(p).expect("sampled weight is SPD");
            out.push((a, [NormSpec::L1, NormSpec::L2, NormSpec::LInf, weighted]));
        }
    }
    out
}

fn mu(a: &Matrix, norm: &NormSpec) -> f64 {
    matrix_measure(a, norm).expect("finite square matrix").value
}

fn criterion_oracle() -> Check {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (a, norms) in corpus() {
        for norm in &norms {
            let closed = matrix_measure(&a, norm).map_err(|e| e.to_string())?.value;
            let oracle = matrix_measure_limit_oracle(&a, norm, &DEFAULT_H_SCHEDULE).map_err(|e| e.to_string())?;
            let scale = 1.0 + induced_norm(&a, norm).map_err(|e| e.to_string())?;
            worst = worst.max((closed - oracle.extrapolated).abs() / scale);
            checked += 1;
        }
    }
    Ok((
        worst <= ORACLE_TOL,
        format!("{checked} (matrix, norm) pairs, max |closed - oracle|/(1+|A|) = {worst:.3e} (tol {ORACLE_TOL:e})"),
    ))
}

fn criterion_axioms() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let corpus = corpus();
    let mut worst = [0.0f64; 5];
    for (k, (a, norms)) in corpus.iter().enumerate() {
        let n = a.nrows();
        let b = &corpus[(k + 1) % corpus.len()].0;
        let b = if b.nrows() == n { b.clone() } else { Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..=1.0)) };
        let alpha = rng.gen_range(0.0..5.0);
        let shift = rng.gen_range(-5.0..5.0);
        let spectrum = a.complex_eigenvalues();
        for norm in norms {
            let m = mu(a, norm);
            let viol = [
                mu(&(a + &b), norm) - m - mu(&b, norm),
                (mu(&(a * alpha), norm) - alpha * m).abs(),
                (mu(&(a + Matrix::identity(n, n) * shift), norm) - m - shift).abs(),
                spectrum.iter().map(|l| l.re - m).fold(f64::NEG_INFINITY, f64::max),
                m.abs() - induced_norm(a, norm).map_err(|e| e.to_string())?,
            ];
            for (w, v) in worst.iter_mut().zip(viol) {
                *w = w.max(v);
            }
        }
    }
    let ok = worst.iter().all(|&w| w <= AXIOM_SLACK);
    Ok((
        ok,
        format!(
            "worst violations: subadditivity {:.1e}, homogeneity {:.1e}, shift {:.1e}, Re(lambda) {:.1e}, |mu|<=|A| {:.1e} (slack {AXIOM_SLACK:e})",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    ))
}

fn criterion_audit() -> Check {
    let cases = random_audit_batch(AUDIT_COUNT, 1010, &AuditSampler::default());
    let (mut boundary, mut disagree) = (0, 0);
    for case in &cases {
        let rec = equivalence_audit(&case.a, &case.p, case.c).map_err(|e| e.to_string())?;
        boundary += usize::from(rec.boundary);
        disagree += usize::from(rec.disagrees());
    }
    Ok((
        disagree == 0,
        format!("{AUDIT_COUNT} triples, {boundary} in dead zone, {disagree} sign disagreements"),
    ))
}

fn system(cfg: SystemConfig) -> Result<DynamicalSystem, String> {
    make_system(&cfg).map_err(|e| e.to_string())
}

fn linear(rows: &[&[f64]]) -> Result<DynamicalSystem, String> {
    system(SystemConfig {
        matrix: Some(rows.iter().map(|r| r.to_vec()).collect()),
        ..SystemConfig::named("linear")
    })
}

fn cubic() -> Result<DynamicalSystem, String> {
    system(SystemConfig::named("scalar_cubic_contractive").param("a", 1.0).param("b", 1.0))
}

fn diag4() -> Result<DynamicalSystem, String> {
    system(SystemConfig {
        dimension: Some(4),
        ..SystemConfig::named("diag_dominant_nl").param("a", 1.0).param("epsilon", 0.25)
    })
}

/// Certified rate over `[-2, 2]^n` with a 21-point grid per axis.
fn certified_rate(sys: &DynamicalSystem, norm: &NormSpec) -> Result<f64, String> {
    let domain = BoxDomain::cube(sys.dimension(), -2.0, 2.0).map_err(|e| e.to_string())?;
    let report = certify_domain(sys, &domain, norm, &SamplingPlan::grid(21)).map_err(|e| e.to_string())?;
    if !report.certified {
        return Err(format!("{} not certified: rate {}", sys.name(), report.rate_estimate));
    }
    Ok(report.rate_estimate)
}

struct Case {
    label: &'static str,
    sys: DynamicalSystem,
    norm: NormSpec,
    x0: Vec<f64>,
}

fn theorem_cases() -> Result<Vec<Case>, String> {
    Ok(vec![
        Case { label: "(a) n=1", sys: linear(&[&[-1.0]])?, norm: NormSpec::L2, x0: vec![2.0] },
        Case { label: "(a) n=2", sys: linear(&[&[-1.0, 0.0], &[0.0, -1.0]])?, norm: NormSpec::L2, x0: vec![2.0, -1.0] },
        Case { label: "(b)", sys: cubic()?, norm: NormSpec::L2, x0: vec![2.0] },
        Case { label: "(e) n=4", sys: diag4()?, norm: NormSpec::LInf, x0: vec![1.0, -2.0, 0.5, 1.5] },
    ])
}

fn criterion_theorem() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for case in theorem_cases()? {
        let c = certified_rate(&case.sys, &case.norm)?;
        let traj = integrate(&case.sys, &Vector::from_vec(case.x0), T_FINAL, DT).map_err(|e| e.to_string())?;
        let v = verify_theorem1(&traj, &case.sys, &case.norm, c, VERIFY_TOL).map_err(|e| e.to_string())?;
        ok &= v.passed;
        if case.label == "(a) n=1" {
            let tight = (v.worst_ratio - 1.0).abs() <= TIGHTNESS_TOL;
            ok &= tight;
            parts.push(format!("{} c={c:.4} ratio={:.12} tight={tight}", case.label, v.worst_ratio));
        } else {
            parts.push(format!("{} c={c:.4} ratio={:.9} passed={}", case.label, v.worst_ratio, v.passed));
        }
    }
    Ok((ok, parts.join(", ")))
}

fn write_config(dir: &Path, name: &str, body: &str) -> Result<String, String> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| e.to_string())?;
    Ok(path.to_string_lossy().into_owned())
}

fn criterion_negative_control() -> Check {
    let sys = system(SystemConfig::named("scalar_cubic_marginal"))?;
    let traj = integrate(&sys, &Vector::from_vec(vec![1.0]), 60.0, DT).map_err(|e| e.to_string())?;
    let v = verify_theorem1(&traj, &sys, &NormSpec::L2, 0.1, VERIFY_TOL).map_err(|e| e.to_string())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = write_config(
        dir.path(),
        "marginal.json",
        r#"{"system": {"name": "scalar_cubic_marginal"}, "norm": {"kind": "L2"},
            "box": {"lower": [-2.0], "upper": [2.0]},
            "simulation": {"x0": [1.0], "t_final": 60.0, "dt": 0.001},
            "verification": {"c": 0.1}}"#,
    )?;
    let out = dir.path().join("out");
    let status = run_command(["verify", "--config", &config, "--output", out.to_str().unwrap(), "--quiet"]);

    let (t_end, x_end) = traj.last();
    let v_end = x_end[0].powi(3).abs();
    let envelope = (-0.1 * t_end).exp();
    Ok((
        !v.passed && status == 1,
        format!(
            "verify_theorem1 passed={} (worst ratio {:.4} at t={:.3}); V(60)={v_end:.3e} vs envelope {envelope:.3e}; CLI exit {status}",
            v.passed, v.worst_ratio, v.worst_time
        ),
    ))
}

fn criterion_pairwise() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for case in theorem_cases()?.into_iter().filter(|c| !c.label.starts_with("(e)")) {
        let c = certified_rate(&case.sys, &case.norm)?;
        let x0 = Vector::from_vec(case.x0);
        let xi0 = find_equilibrium(&case.sys, &x0, 1e-10).map_err(|e| e.to_string())?;
        let a = integrate(&case.sys, &x0, T_FINAL, DT).map_err(|e| e.to_string())?;
        let b = integrate(&case.sys, &xi0, T_FINAL, DT).map_err(|e| e.to_string())?;
        let v = verify_pair_contraction(&a, &b, &case.norm, c, VERIFY_TOL).map_err(|e| e.to_string())?;
        ok &= v.passed;
        if case.label == "(a) n=1" {
            let tight = (v.worst_ratio - 1.0).abs() <= TIGHTNESS_TOL;
            ok &= tight;
            parts.push(format!("{} ratio={:.12} tight={tight}", case.label, v.worst_ratio));
        } else {
            parts.push(format!("{} ratio={:.9} passed={}", case.label, v.worst_ratio, v.passed));
        }
    }
    Ok((ok, parts.join(", ")))
}

fn criterion_dini() -> Check {
    let cases = [
        ("(a)", linear(&[&[-1.0]])?, vec![2.0]),
        ("(b)", cubic()?, vec![1.0]),
        ("(d)", system(SystemConfig::named("rotation").param("omega", 1.0))?, vec![1.0, 0.0]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, sys, x0) in cases {
        let traj = integrate(&sys, &Vector::from_vec(x0), T_FINAL, DT).map_err(|e| e.to_string())?;
        let v = dini_slope_check(&traj, &sys, &NormSpec::L2, SLOPE_TOL).map_err(|e| e.to_string())?;
        ok &= v.passed;
        parts.push(format!("{label} ratio={:.6} over {} samples", v.worst_ratio, v.samples));
    }
    Ok((ok, parts.join(", ")))
}

fn criterion_rk4_order() -> Check {
    let sys = linear(&[&[-1.0]])?;
    let x0 = Vector::from_vec(vec![1.0]);
    let exact = (-1.0f64).exp();
    let errors = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            let traj = integrate(&sys, &x0, 1.0, dt).map_err(|e| e.to_string())?;
            Ok((traj.last().1[0] - exact).abs())
        })
        .collect::<Result<Vec<f64>, String>>()?;
    let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
    Ok((
        ratios.iter().all(|r| (RK4_RATIO.0..=RK4_RATIO.1).contains(r)),
        format!("error ratios {:.3}, {:.3} (band [{}, {}])", ratios[0], ratios[1], RK4_RATIO.0, RK4_RATIO.1),
    ))
}

fn strip_wall_clock(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

fn criterion_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = write_config(
        dir.path(),
        "cubic.json",
        r#"{"system": {"name": "scalar_cubic_contractive", "params": {"a": 1.0, "b": 1.0}},
            "norm": {"kind": "L2"}, "box": {"lower": [-2.0], "upper": [2.0]},
            "sampling": {"grid_points_per_axis": 21, "random_points": 500},
            "simulation": {"x0": [1.5], "t_final": 10.0, "dt": 0.001},
            "rho": {"kind": "power", "p": 2.0}}"#,
    )?;
    let mut outputs = Vec::new();
    for run in ["run1", "run2"] {
        let out = dir.path().join(run);
        let status = run_command(["verify", "--config", &config, "--output", out.to_str().unwrap(), "--seed", "42", "--quiet"]);
        if status != 0 {
            return Err(format!("verify exited {status}"));
        }
        let mut files = fs::read_dir(&out)
            .map_err(|e| e.to_string())?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        files.sort();
        let mut contents = Vec::new();
        for f in files {
            let body = fs::read_to_string(&f).map_err(|e| e.to_string())?;
            let name = f.file_name().unwrap().to_string_lossy().into_owned();
            let body = if name == "summary.csv" { strip_wall_clock(&body) } else { body };
            contents.push((name, body));
        }
        outputs.push(contents);
    }
    let same = outputs[0] == outputs[1];
    Ok((same, format!("{} files compared, identical={same}", outputs[0].len())))
}

fn main() -> ExitCode {
    let mut suite = Suite { failures: 0 };
    suite.run(1, "measure-oracle agreement", Some(10.0), criterion_oracle);
    suite.run(2, "measure axioms", None, criterion_axioms);
    suite.run(3, "weighted-measure / LMI equivalence audit", Some(5.0), criterion_audit);
    suite.run(4, "velocity Lyapunov bound", Some(30.0), criterion_theorem);
    suite.run(5, "negative control (marginal cubic, c=0.1, t_final=60)", None, criterion_negative_control);
    suite.run(6, "pairwise contraction bound", None, criterion_pairwise);
    suite.run(7, "Dini slope check", None, criterion_dini);
    suite.run(8, "RK4 convergence order", None, criterion_rk4_order);
    suite.run(9, "determinism of verify outputs", None, criterion_determinism);
    println!("{} of 9 criteria failed", suite.failures);
    if suite.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
