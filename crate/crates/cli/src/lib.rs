//! `fluidic` command line: netlist validation, transient simulation, truth
//! tables, the built-in latch and robot demos, and geometry queries.
//!
//! Exit codes: 0 on success, 1 for usage, parse and netlist errors (and a
//! failed demo self-check), 2 when the solver fails to converge.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fluidic_core::design::{rho_estimate, thresholds_from_rho, GeometryPoint};
use fluidic_core::logic::{
    build_gate, check_latch, truth_table, truth_table_sequential, write_truth_table_csv, GateKind, LatchTiming,
    DEFAULT_GATE_VENT,
};
use fluidic_core::netlist::{parse_netlist_with_lines, validate, Netlist, SourceMap};
use fluidic_core::pneumatic::FstParams;
use fluidic_core::robot::{run_scenario, ContactScript};
use fluidic_core::solver::{format_sig, simulate, write_waveform_csv, CsvError, SolverConfig, SolverError};

#[derive(Debug, Parser)]
#[command(name = "fluidic", version, about = "Pneumatic sheet-valve logic simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a netlist and print its diagnostics.
    Validate { file: PathBuf },
    /// Transient simulation; writes the probe waveforms as CSV.
    Sim {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Steady-state truth table of a built-in gate or a netlist.
    Truth {
        /// Netlist whose supplies named by --in are driven as inputs.
        file: Option<PathBuf>,
        /// Built-in gate: not, positive, nor, nand.
        #[arg(long, conflicts_with = "file")]
        gate: Option<GateKind>,
        /// Comma-separated input ports (supply nodes of the netlist).
        #[arg(long = "in", value_delimiter = ',')]
        inputs: Vec<String>,
        /// Comma-separated output nodes.
        #[arg(long = "out", value_delimiter = ',')]
        outputs: Vec<String>,
        /// Walk the rows on one circuit instead of resetting between rows.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Built-in scenarios.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Closure-start ratio and valve thresholds for a sheet geometry (mm).
    Rho {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        d: f64,
    },
}

#[derive(Debug, Subcommand)]
enum Demo {
    /// Set pulse at 0 s, reset pulse at 10 s; checks that the latch holds.
    Latch {
        #[arg(long, default_value = "latch.csv")]
        out: PathBuf,
        #[arg(long = "t-end", default_value_t = 20.0)]
        t_end: f64,
    },
    /// Left touch at 1.0 s, right touch at 2.0 s; writes the trajectory.
    Robot {
        #[arg(long, default_value = "robot.csv")]
        out: PathBuf,
        #[arg(long = "t-end", default_value_t = 3.0)]
        t_end: f64,
    },
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Time step, s.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Horizon, s.
    #[arg(long = "t-end", default_value_t = 20.0)]
    t_end: f64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig<f64> {
        SolverConfig {
            dt: self.dt,
            t_end: self.t_end,
            ..SolverConfig::default()
        }
    }
}

enum Failure {
    /// Message for stderr, exit 1.
    User(String),
    Solver(SolverError),
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        Failure::Solver(e)
    }
}

impl From<CsvError> for Failure {
    fn from(e: CsvError) -> Self {
        Failure::User(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::User(e.to_string())
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Validate { file } => cmd_validate(&file, out, err),
        Command::Sim { file, solver, out: path } => cmd_sim(&file, &solver.config(), path.as_deref(), out, err),
        Command::Truth {
            file,
            gate,
            inputs,
            outputs,
            sequential,
            solver,
        } => cmd_truth(file.as_deref(), gate, &inputs, &outputs, sequential, &solver.config(), out, err),
        Command::Demo { which } => match which {
            Demo::Latch { out: path, t_end } => demo_latch(&path, t_end, out),
            Demo::Robot { out: path, t_end } => demo_robot(&path, t_end, out),
        },
        Command::Rho { a, b, d } => cmd_rho(a, b, d, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Failure::User(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Solver(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                SolverError::NonConvergence { .. } | SolverError::NoSteadyState { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn load(path: &Path) -> Result<(Netlist<f64>, SourceMap), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::User(format!("{}: {e}", path.display())))?;
    parse_netlist_with_lines(&text).map_err(|e| Failure::User(format!("{}: {e}", path.display())))
}

/// Loads a netlist and refuses it if validation finds errors.
fn load_valid(path: &Path, err: &mut dyn Write) -> Result<Netlist<f64>, Failure> {
    let (netlist, map) = load(path)?;
    let diags: Vec<_> = validate(&netlist).into_iter().map(|d| d.locate(&map)).collect();
    for d in &diags {
        writeln!(err, "{}: {d}", path.display())?;
    }
    if diags.iter().any(|d| d.is_error()) {
        return Err(Failure::User(format!("{}: netlist has errors", path.display())));
    }
    Ok(netlist)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::User(format!("{}: {e}", path.display())))
}

fn cmd_validate(path: &Path, out: &mut dyn Write, _err: &mut dyn Write) -> Result<i32, Failure> {
    let (netlist, map) = load(path)?;
    let diags: Vec<_> = validate(&netlist).into_iter().map(|d| d.locate(&map)).collect();
    for d in &diags {
        writeln!(out, "{}: {d}", path.display())?;
    }
    let errors = diags.iter().filter(|d| d.is_error()).count();
    writeln!(
        out,
        "{}: {errors} error(s), {} warning(s)",
        path.display(),
        diags.len() - errors
    )?;
    Ok(if errors == 0 { 0 } else { 1 })
}

fn cmd_sim(
    path: &Path,
    cfg: &SolverConfig<f64>,
    csv_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let netlist = load_valid(path, err)?;
    let wave = simulate(&netlist, cfg)?;
    match csv_path {
        Some(p) => {
            write_waveform_csv(&wave, create(p)?)?;
            writeln!(out, "wrote {} samples of {} probe(s) to {}", wave.len(), wave.probes.len(), p.display())?;
        }
        None => write_waveform_csv(&wave, &mut *out)?,
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_truth(
    file: Option<&Path>,
    gate: Option<GateKind>,
    inputs: &[String],
    outputs: &[String],
    sequential: bool,
    cfg: &SolverConfig<f64>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let (netlist, ins, outs): (Netlist<f64>, Vec<String>, Vec<String>) = match (file, gate) {
        (_, Some(GateKind::Latch)) => {
            return Err(Failure::User(
                "the latch has no combinational truth table; try `demo latch`".into(),
            ))
        }
        (None, Some(kind)) => {
            let n = build_gate(kind, &FstParams::baseline(), DEFAULT_GATE_VENT)
                .map_err(|e| Failure::User(e.to_string()))?;
            let ports = |ps: &[&str]| ps.iter().map(|s| s.to_string()).collect();
            (n, ports(kind.inputs()), ports(kind.outputs()))
        }
        (Some(path), None) => {
            if inputs.is_empty() || outputs.is_empty() {
                return Err(Failure::User("truth <file> needs --in and --out port lists".into()));
            }
            (load_valid(path, err)?, inputs.to_vec(), outputs.to_vec())
        }
        (None, None) => return Err(Failure::User("give either --gate <kind> or a netlist file".into())),
        (Some(_), Some(_)) => unreachable!("clap rejects file together with --gate"),
    };
    let ins: Vec<&str> = ins.iter().map(String::as_str).collect();
    let outs: Vec<&str> = outs.iter().map(String::as_str).collect();
    let table = if sequential {
        truth_table_sequential(&netlist, &ins, &outs, cfg)?
    } else {
        truth_table(&netlist, &ins, &outs, cfg)?
    };
    write_truth_table_csv(&table, &mut *out)?;
    Ok(0)
}

fn demo_latch(path: &Path, t_end: f64, out: &mut dyn Write) -> Result<i32, Failure> {
    let latch = build_gate(GateKind::Latch, &FstParams::baseline(), DEFAULT_GATE_VENT)
        .map_err(|e| Failure::User(e.to_string()))?;
    let verdict = check_latch(&latch, &SolverConfig::with_horizon(t_end), &LatchTiming::default())?;
    write_waveform_csv(&verdict.waveform, create(path)?)?;
    for phase in &verdict.phases {
        let mark = if phase.passed { "ok  " } else { "FAIL" };
        writeln!(out, "{mark} {:<10} {}", phase.name, phase.detail)?;
    }
    writeln!(out, "wrote {}", path.display())?;
    Ok(if verdict.passed() { 0 } else { 1 })
}

fn demo_robot(path: &Path, t_end: f64, out: &mut dyn Write) -> Result<i32, Failure> {
    let result = run_scenario(&ContactScript::fig16(), &SolverConfig::with_horizon(t_end))?;
    let traj = &result.trajectory;
    traj.write_csv(create(path)?)?;
    let facing = |theta: f64| if theta >= 0.0 { "right" } else { "left" };
    if let Some(first) = traj.samples.first() {
        writeln!(out, "t = 0 s: facing {} (theta = {} deg)", facing(first.state.theta), format_sig(first.state.theta, 4))?;
    }
    let mut from = 0.0;
    while let Some(t) = traj.first_sign_change(from) {
        let theta = traj.theta_at(t).unwrap_or(0.0);
        writeln!(out, "t = {} s: turned {}", format_sig(t, 4), facing(theta))?;
        from = t;
    }
    writeln!(out, "wrote {}", path.display())?;
    Ok(0)
}

fn cmd_rho(a: f64, b: f64, d: f64, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let est = rho_estimate(&GeometryPoint::new(a, b, d)).map_err(|e| Failure::User(e.to_string()))?;
    for axis in &est.extrapolated {
        writeln!(err, "warning: {axis} lies outside the characterised range; its factor is held at the nearest anchor")?;
    }
    let r = est.ratio;
    writeln!(out, "rho = {}", format_sig(r.rho, 6))?;
    writeln!(out, "p_c = {} kPa", format_sig(r.p_c, 6))?;
    let p = thresholds_from_rho(&r, r.p_c).map_err(|e| Failure::User(e.to_string()))?;
    writeln!(out, "p_close_start = {} kPa", format_sig(p.p_close_start, 6))?;
    writeln!(out, "p_close_end = {} kPa", format_sig(p.p_close_end, 6))?;
    writeln!(out, "p_reopen = {} kPa", format_sig(p.p_reopen, 6))?;
    Ok(0)
}
