//! Command-line driver: run configuration, structured output (field dumps,
//! convergence tables, diagnostics), and schlieren image emission.

use crate::dg::DgWorkspace;
use crate::error::{Result, SolverError};
use crate::field::ModalField;
use crate::metric::{from_w, MetricKind};
use crate::problems::{builtin, error_norms, error_norms_conserved, observed_rate, problem_names};
use crate::recovery::{recover_primitives, Method};
use crate::time_loop::{run, IntegratorKind, RunControls, StepDiagnostics};
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Everything needed to reproduce a run. Serialized as a flat
/// `key = value` file with `#` comments.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub degree: usize,
    pub integrator: String,
    pub t_final: Option<f64>,
    pub output_dir: Option<String>,
    pub snapshot_every: Option<usize>,
    pub oe_enabled: bool,
    pub pcp_enabled: bool,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: String::new(),
            nx: None,
            ny: None,
            degree: 2,
            integrator: "ssprk3".into(),
            t_final: None,
            output_dir: None,
            snapshot_every: None,
            oe_enabled: true,
            pcp_enabled: true,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn parse_config(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(SolverError::ConfigParse {
                line: lineno + 1,
                message: format!("expected `key = value`, got '{line}'"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |message: String| SolverError::ConfigParse {
                line: lineno + 1,
                message,
            };
            match key {
                "problem" => cfg.problem = value.to_string(),
                "nx" => cfg.nx = Some(value.parse().map_err(|e| bad(format!("nx: {e}")))?),
                "ny" => cfg.ny = Some(value.parse().map_err(|e| bad(format!("ny: {e}")))?),
                "degree" => cfg.degree = value.parse().map_err(|e| bad(format!("degree: {e}")))?,
                "integrator" => cfg.integrator = value.to_string(),
                "t_final" => {
                    cfg.t_final = Some(value.parse().map_err(|e| bad(format!("t_final: {e}")))?)
                }
                "output_dir" => cfg.output_dir = Some(value.to_string()),
                "snapshot_every" => {
                    cfg.snapshot_every = Some(
                        value
                            .parse()
                            .map_err(|e| bad(format!("snapshot_every: {e}")))?,
                    )
                }
                "oe" => cfg.oe_enabled = parse_bool(value).map_err(bad)?,
                "pcp" => cfg.pcp_enabled = parse_bool(value).map_err(bad)?,
                "seed" => cfg.seed = value.parse().map_err(|e| bad(format!("seed: {e}")))?,
                other => {
                    return Err(bad(format!("unknown key '{other}'")));
                }
            }
        }
        Ok(cfg)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# solver run configuration");
        let _ = writeln!(out, "problem = {}", self.problem);
        if let Some(nx) = self.nx {
            let _ = writeln!(out, "nx = {nx}");
        }
        if let Some(ny) = self.ny {
            let _ = writeln!(out, "ny = {ny}");
        }
        let _ = writeln!(out, "degree = {}", self.degree);
        let _ = writeln!(out, "integrator = {}", self.integrator);
        if let Some(t) = self.t_final {
            let _ = writeln!(out, "t_final = {t}");
        }
        if let Some(dir) = &self.output_dir {
            let _ = writeln!(out, "output_dir = {dir}");
        }
        if let Some(s) = self.snapshot_every {
            let _ = writeln!(out, "snapshot_every = {s}");
        }
        let _ = writeln!(out, "oe = {}", self.oe_enabled);
        let _ = writeln!(out, "pcp = {}", self.pcp_enabled);
        let _ = writeln!(out, "seed = {}", self.seed);
        out
    }
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "1" | "on" | "yes" => Ok(true),
        "false" | "0" | "off" | "no" => Ok(false),
        other => Err(format!("expected a boolean, got '{other}'")),
    }
}

/// Display-plane azimuth unwinding for the rotating-hole snapshots: the
/// evolution coordinate differs from the far-field azimuth by a radial
/// integral that is singular at the horizon, so the unwinding is clamped
/// there. Display only; solver state is untouched.
fn display_phi(metric: &MetricKind, r: f64, phi_tilde: f64) -> f64 {
    match metric {
        MetricKind::KerrSchildEquatorial { a } if *a > 0.0 => {
            let root = (1.0 - a * a).sqrt();
            let rp = 1.0 + root;
            let rm = 1.0 - root;
            let num = (r - rp).abs().max(1e-12);
            let den = (r - rm).abs().max(1e-12);
            phi_tilde - a / (2.0 * root) * (num / den).ln()
        }
        _ => phi_tilde,
    }
}

/// Write a delimited text table of cell-center primitive values and,
/// in 2D, a binary P5 graymap of the density logarithm (per-frame
/// min-max normalization). Returns the csv path.
pub fn write_snapshot(field: &ModalField, ws: &DgWorkspace, path_base: &Path) -> Result<PathBuf> {
    let dim = ws.mesh.dim;
    let (nx, ny) = field.shape();
    let n = ws.basis.n;
    let n_comp = field.n_comp;
    let csv_path = path_base.with_extension("csv");
    let mut out = String::new();
    if dim == 1 {
        out.push_str("x,rho,v1,p,lorentz\n");
    } else {
        out.push_str("x,y,rho,v1,v2,p,lorentz\n");
    }
    let center_row: Vec<f64> = (0..n).map(|k| ws.basis.eval(k, [0.0, 0.0])).collect();
    let mut log_rho = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let coeffs = field.cell(i, j);
            let x = ws.mesh.cell_center(i, j);
            let mp = ws.metric_at(x)?;
            let w = ModalField::eval_with_row(coeffs, &center_row, n_comp, n);
            let u = from_w(&crate::eos::WState { w, dim }, &mp);
            let prim = recover_primitives(&u, &mp, &ws.eos, Method::Newton)
                .map_err(|e| e.with_context(&format!("snapshot cell ({i},{j})")))?;
            let gamma = prim.lorentz(&mp.x_mat, dim);
            log_rho[j * nx + i] = prim.rho.ln();
            if dim == 1 {
                let _ = writeln!(
                    out,
                    "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                    x[0], prim.rho, prim.v[0], prim.p, gamma
                );
            } else {
                let (px, py) = match ws.metric {
                    MetricKind::KerrSchildEquatorial { .. } => {
                        let phi = display_phi(&ws.metric, x[0], x[1]);
                        (x[0] * phi.cos(), x[0] * phi.sin())
                    }
                    _ => (x[0], x[1]),
                };
                let _ = writeln!(
                    out,
                    "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                    px, py, prim.rho, prim.v[0], prim.v[1], prim.p, gamma
                );
            }
        }
    }
    std::fs::write(&csv_path, out)?;

    if dim == 2 {
        let pgm_path = path_base.with_extension("pgm");
        let lo = log_rho.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = log_rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = (hi - lo).max(1e-300);
        let mut bytes = Vec::with_capacity(nx * ny);
        // Row-major from the domain's top-left corner.
        for j in (0..ny).rev() {
            for i in 0..nx {
                let v = (log_rho[j * nx + i] - lo) / span;
                bytes.push((v * 255.0).round().clamp(0.0, 255.0) as u8);
            }
        }
        let mut f = std::fs::File::create(&pgm_path)?;
        write!(f, "P5\n{nx} {ny}\n255\n")?;
        f.write_all(&bytes)?;
    }
    Ok(csv_path)
}

/// Parse a snapshot table back into rows of values (reload side of the
/// round-trip check).
pub fn read_snapshot(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        rows.push(
            row.map_err(|e| SolverError::InvalidParameter(format!("bad snapshot row: {e}")))?,
        );
    }
    Ok(rows)
}

/// One-line-per-step machine-readable log.
pub fn write_diagnostics(path: &Path, diags: &[StepDiagnostics]) -> Result<()> {
    let mut out = String::from("# step t dt min_q limiter_activations recovery_iter_max\n");
    for d in diags {
        let _ = writeln!(
            out,
            "{} {:.17e} {:.17e} {:.17e} {} {}",
            d.step, d.t, d.dt, d.min_q, d.limiter_activations, d.recovery_iter_max
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[derive(Parser, Debug)]
#[command(
    name = "oedg",
    about = "Constraint-preserving, oscillation-eliminating DG solver for relativistic hydrodynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single simulation.
    Run(RunArgs),
    /// Mesh-refinement ladder with error norms and observed rates.
    Convergence(ConvArgs),
    /// List the registered problems.
    List,
    /// Run the randomized property suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Problem name from the registry.
    #[arg(long)]
    problem: Option<String>,
    /// Flat key = value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    /// euler, ssprk3, or rk4.
    #[arg(long)]
    integrator: Option<String>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Output directory for snapshots/diagnostics.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Snapshot cadence in steps.
    #[arg(long)]
    snapshot_every: Option<usize>,
    /// Disable the oscillation-eliminating filter.
    #[arg(long)]
    no_oe: bool,
    /// Disable the constraint-preserving limiter and step bound.
    #[arg(long)]
    no_pcp: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ConvArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, default_value_t = 2)]
    degree: usize,
    /// Comma-separated mesh ladder, e.g. 64,128,256.
    #[arg(long)]
    meshes: String,
    #[arg(long)]
    integrator: Option<String>,
    #[arg(long)]
    t_final: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// all, gql, flux, pcp, or recovery.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Sample count scale.
    #[arg(long, default_value_t = 1000)]
    states: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Entry point for the thin binary; returns the process exit status.
pub fn main<I: IntoIterator<Item = String>>(argv: I) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Convergence(args) => cmd_convergence(args),
        Command::List => {
            for name in problem_names() {
                println!("{name}");
            }
            Ok(())
        }
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut cfg = if let Some(path) = &args.config {
        RunConfig::parse_config(&std::fs::read_to_string(path)?)?
    } else {
        RunConfig::default()
    };
    if let Some(p) = args.problem {
        cfg.problem = p;
    }
    if cfg.problem.is_empty() {
        return Err(SolverError::InvalidParameter(
            "no problem given (use --problem or a config file)".into(),
        ));
    }
    if let Some(nx) = args.nx {
        cfg.nx = Some(nx);
    }
    if let Some(ny) = args.ny {
        cfg.ny = Some(ny);
    }
    if let Some(d) = args.degree {
        cfg.degree = d;
    }
    if let Some(i) = args.integrator {
        cfg.integrator = i;
    }
    if let Some(t) = args.t_final {
        cfg.t_final = Some(t);
    }
    if let Some(out) = &args.out {
        cfg.output_dir = Some(out.display().to_string());
    }
    if let Some(s) = args.snapshot_every {
        cfg.snapshot_every = Some(s);
    }
    if args.no_oe {
        cfg.oe_enabled = false;
    }
    if args.no_pcp {
        cfg.pcp_enabled = false;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }

    let spec = builtin(&cfg.problem)?;
    let controls = RunControls {
        nx: cfg.nx.unwrap_or(spec.default_mesh.0),
        ny: cfg.ny.unwrap_or(spec.default_mesh.1),
        degree: cfg.degree,
        integrator: IntegratorKind::parse(&cfg.integrator)?,
        t_final: cfg.t_final.unwrap_or(spec.t_final),
        oe_enabled: cfg.oe_enabled,
        pcp_enabled: cfg.pcp_enabled,
        max_steps: 50_000_000,
    };

    let out_dir = cfg.output_dir.as_ref().map(PathBuf::from);
    if let Some(dir) = &out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("config.txt"), cfg.serialize())?;
    }
    let cadence = cfg.snapshot_every;
    let mut observer = |step: usize, _t: f64, field: &ModalField, ws: &DgWorkspace| -> Result<()> {
        if let (Some(dir), Some(every)) = (&out_dir, cadence) {
            if every > 0 && step % every == 0 {
                write_snapshot(field, ws, &dir.join(format!("snapshot_{step:07}")))?;
            }
        }
        Ok(())
    };

    println!(
        "running '{}' on {}x{} cells, degree {}, {} to t = {}",
        cfg.problem, controls.nx, controls.ny, controls.degree, cfg.integrator, controls.t_final
    );
    let started = std::time::Instant::now();
    let result = run(&spec, &controls, Some(&mut observer))?;
    println!(
        "done: {} steps to t = {} in {:.2?}; limiter activations {}",
        result.steps,
        result.t_end,
        started.elapsed(),
        result.limiter_activations_total
    );
    for c in 0..spec.dim + 2 {
        let drift = (result.final_totals[c] - result.initial_totals[c]).abs()
            / result.initial_totals[c].abs().max(1e-300);
        println!("  component {c}: total drift {drift:.3e}");
    }
    if let Some(dir) = &out_dir {
        let csv = write_snapshot(&result.field, &result.ws, &dir.join("final"))?;
        write_diagnostics(&dir.join("diagnostics.log"), &result.diagnostics)?;
        println!("wrote {}", csv.display());
    }
    Ok(())
}

fn cmd_convergence(args: ConvArgs) -> Result<()> {
    let spec = builtin(&args.problem)?;
    let exact = spec.exact.clone().ok_or_else(|| {
        SolverError::InvalidParameter(format!(
            "problem '{}' has no exact solution for a convergence study",
            args.problem
        ))
    })?;
    let meshes: Vec<usize> = args
        .meshes
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| SolverError::InvalidParameter(format!("bad mesh list: {e}")))?;
    let integrator = match &args.integrator {
        Some(name) => IntegratorKind::parse(name)?,
        None => {
            if args.degree == 3 {
                IntegratorKind::Rk4
            } else {
                IntegratorKind::SspRk3
            }
        }
    };
    let t_final = args.t_final.unwrap_or(spec.t_final);

    let mut prim_reports = Vec::new();
    let mut cons_reports = Vec::new();
    for &n in &meshes {
        let controls = RunControls {
            nx: n,
            ny: if spec.dim == 2 { n } else { 1 },
            degree: args.degree,
            integrator,
            t_final,
            oe_enabled: true,
            pcp_enabled: true,
            max_steps: 50_000_000,
        };
        let result = run(&spec, &controls, None)?;
        prim_reports.push(error_norms(
            &result.field,
            &result.ws,
            &exact,
            result.t_end,
        )?);
        cons_reports.push(error_norms_conserved(
            &result.field,
            &result.ws,
            &exact,
            result.t_end,
        )?);
    }
    for (label, reports, comp) in [
        ("density rho", &prim_reports, "rho"),
        ("conserved D", &cons_reports, "D"),
    ] {
        let idx = reports[0].component(comp).unwrap();
        println!(
            "\n{label} ({} cells per axis -> errors and rates):",
            args.meshes
        );
        println!(
            "{:>8} {:>13} {:>6} {:>13} {:>6} {:>13} {:>6}",
            "N", "L1", "rate", "L2", "rate", "Linf", "rate"
        );
        for (k, rep) in reports.iter().enumerate() {
            let rate = |errs: &dyn Fn(&crate::problems::ErrorReport) -> f64| -> String {
                if k == 0 {
                    "-".into()
                } else {
                    format!(
                        "{:.3}",
                        observed_rate(errs(&reports[k - 1]), errs(rep), meshes[k - 1], meshes[k])
                    )
                }
            };
            println!(
                "{:>8} {:>13.4e} {:>6} {:>13.4e} {:>6} {:>13.4e} {:>6}",
                meshes[k],
                rep.l1[idx],
                rate(&|r| r.l1[idx]),
                rep.l2[idx],
                rate(&|r| r.l2[idx]),
                rep.linf[idx],
                rate(&|r| r.linf[idx]),
            );
        }
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    use crate::verify::*;
    let mut all_ok = true;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("{}  {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };
    let want = |s: &str| args.suite == "all" || args.suite == s;
    if want("gql") {
        let rep = gql_suite(args.states, 41, args.seed);
        report("gql-equivalence", rep.passed(), rep.detail.clone());
    }
    if want("flux") {
        let rep = flux_domination_suite(args.states.min(500), 41, args.seed + 1);
        report("flux-domination", rep.passed(), rep.detail.clone());
    }
    if want("pcp") {
        for form in [
            PcpForm::Flat1d,
            PcpForm::Flat2d,
            PcpForm::Axisymmetric,
            PcpForm::KerrW,
        ] {
            let rep = weak_pcp_suite(form, args.states.min(200), args.seed + 2)?;
            report("weak-pcp", rep.passed(), rep.detail.clone());
        }
    }
    if want("recovery") {
        let audit = recovery_suite(args.states.max(100_000), 1e3, args.seed + 3);
        report(
            "recovery",
            audit.violations == 0,
            format!(
                "{} states, newton mean {:.2} iters vs hybrid {:.2}",
                audit.cases, audit.newton_mean_iters, audit.hybrid_mean_iters
            ),
        );
    }
    if all_ok {
        Ok(())
    } else {
        Err(SolverError::InvalidParameter(
            "one or more property suites failed".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_is_idempotent() {
        let text = "# comment\nproblem = smooth1d\nnx = 64\ndegree = 2\noe = true\npcp = false\nseed = 7\n";
        let cfg = RunConfig::parse_config(text).unwrap();
        assert_eq!(cfg.problem, "smooth1d");
        assert_eq!(cfg.nx, Some(64));
        assert!(!cfg.pcp_enabled);
        let ser = cfg.serialize();
        let cfg2 = RunConfig::parse_config(&ser).unwrap();
        assert_eq!(cfg, cfg2);
        assert_eq!(ser, cfg2.serialize());
    }

    #[test]
    fn config_rejects_bad_lines() {
        assert!(RunConfig::parse_config("nonsense").is_err());
        assert!(RunConfig::parse_config("unknown_key = 3").is_err());
        assert!(RunConfig::parse_config("nx = banana").is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        use crate::basis::Basis;
        use crate::eos::{IdealGas, PrimitiveState};
        use crate::mesh::{BcKind, Mesh};
        let mesh = Mesh::new_2d(
            5,
            4,
            0.0,
            1.0,
            0.0,
            1.0,
            [
                BcKind::Periodic,
                BcKind::Periodic,
                BcKind::Periodic,
                BcKind::Periodic,
            ],
        )
        .unwrap();
        let ws = DgWorkspace::new(
            mesh,
            Basis::new(2, 2),
            MetricKind::MinkowskiCartesian(2),
            IdealGas::new(5.0 / 3.0).unwrap(),
        )
        .unwrap();
        let f = |x: [f64; 2]| PrimitiveState::new_2d(1.0 + 0.3 * x[0] + 0.1 * x[1], 0.2, -0.1, 0.8);
        let field = ws.project_initial(&f).unwrap();
        let dir = std::env::temp_dir().join("oedg_snapshot_test");
        std::fs::create_dir_all(&dir).unwrap();
        let base = dir.join("snap");
        let csv = write_snapshot(&field, &ws, &base).unwrap();
        let rows = read_snapshot(&csv).unwrap();
        assert_eq!(rows.len(), 20);
        // Reload agrees with a fresh evaluation at centers.
        let mut k = 0;
        for j in 0..4 {
            for i in 0..5 {
                let x = ws.mesh.cell_center(i, j);
                let q = f(x);
                let row = &rows[k];
                assert!((row[0] - x[0]).abs() < 1e-12);
                assert!((row[1] - x[1]).abs() < 1e-12);
                assert!((row[2] - q.rho).abs() < 1e-12);
                assert!((row[3] - q.v[0]).abs() < 1e-12);
                assert!((row[4] - q.v[1]).abs() < 1e-12);
                assert!((row[5] - q.p).abs() < 1e-12);
                k += 1;
            }
        }
        // The graymap is a valid 8-bit P5 raster.
        let pgm = std::fs::read(base.with_extension("pgm")).unwrap();
        assert!(pgm.starts_with(b"P5\n5 4\n255\n"));
        assert_eq!(pgm.len(), b"P5\n5 4\n255\n".len() + 20);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn constant_field_snapshot_rows_identical() {
        use crate::basis::Basis;
        use crate::eos::{IdealGas, PrimitiveState};
        use crate::mesh::{BcKind, Mesh};
        let mesh = Mesh::new_1d(4, 0.0, 1.0, BcKind::Periodic, BcKind::Periodic).unwrap();
        let ws = DgWorkspace::new(
            mesh,
            Basis::new(1, 1),
            MetricKind::MinkowskiCartesian(1),
            IdealGas::new(5.0 / 3.0).unwrap(),
        )
        .unwrap();
        let f = |_: [f64; 2]| PrimitiveState::new_1d(1.5, 0.2, 0.8);
        let field = ws.project_initial(&f).unwrap();
        let dir = std::env::temp_dir().join("oedg_snapshot_const");
        std::fs::create_dir_all(&dir).unwrap();
        let csv = write_snapshot(&field, &ws, &dir.join("c")).unwrap();
        let rows = read_snapshot(&csv).unwrap();
        for r in &rows[1..] {
            for (a, b) in r[1..].iter().zip(rows[0][1..].iter()) {
                assert_eq!(a, b);
            }
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
