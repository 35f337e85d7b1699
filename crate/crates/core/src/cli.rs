//! Command-line front end.
//!
//! ```text
//! toda-duality map --direction forward --input state.json [--output out.json]
//! toda-duality flow --system toda --method numeric --t 5 --dt 1e-4 --input state.json
//! toda-duality spectrum --input toda.json
//! toda-duality verify --suite all --n 4 --seed 7 --trials 50
//! ```
//!
//! Exit codes: 0 success, 1 failed verification, 2 input error, 3 numerical
//! failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::ToleranceConfig;
use crate::duality::{
    aa_to_toda, angles_from_w, dual_flow_exact, dual_flow_numeric, dual_hamiltonian, toda_flow_exact, toda_to_aa,
    ActionAngleState,
};
use crate::error::{Error, Result};
use crate::gauge::{moser_to_toda, toda_to_moser};
use crate::io::{self, State, StateKind};
use crate::toda::{hamiltonian, time_grid, verlet_flow, TodaState};
use crate::verify::{self, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "toda-duality", version, about = "Open Toda lattice, its action-angle map and the dual system")]
pub struct Cli {
    /// JSON file overriding tolerance defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a state between the Toda, action-angle and Moser descriptions.
    Map {
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(long)]
        input: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Integrate a flow and write the trajectory as CSV.
    Flow {
        #[arg(long, value_enum)]
        system: System,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        /// Write every `stride`-th step (the final state is always written).
        #[arg(long, default_value_t = 10)]
        stride: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Eigenvalues, norming constants and angles of a Toda state.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the randomized verification suite; prints one JSON report per line.
    Verify {
        /// `all`, a suite name or a single check name.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Override one tolerance, `name=value`; repeatable.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
        /// Feed every check its corrupted input.
        #[arg(long)]
        negative_controls: bool,
        /// Run checks one after another on the main thread.
        #[arg(long)]
        serial: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// action_angle → toda
    Forward,
    /// toda → action_angle
    Inverse,
    /// toda → moser
    ToMoser,
    /// moser → toda
    FromMoser,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum System {
    Toda,
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Numeric,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_input() {
                EXIT_INPUT
            } else {
                EXIT_NUMERIC
            }
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ToleranceConfig> {
    match path {
        None => Ok(ToleranceConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            ToleranceConfig::from_json(&text)
        }
    }
}

fn emit(output: Option<&Path>, stdout: &mut impl Write, text: &[u8]) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text).map_err(|e| Error::Io(e.to_string())),
    }
}

fn expect_kind(state: &State, kind: StateKind) -> Result<()> {
    if state.kind() != kind {
        return Err(Error::InvalidArgument(format!("expected a {kind} state, got {}", state.kind())));
    }
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut impl Write, stderr: &mut impl Write) -> Result<i32> {
    let tol = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Map { direction, input, output } => {
            let state = io::read_state(input, &tol)?;
            let (converted, residual) = map_state(*direction, &state, &tol)?;
            let mut text = converted.to_json();
            text.push('\n');
            emit(output.as_deref(), stdout, text.as_bytes())?;
            let _ = writeln!(stderr, "round-trip residual: {residual:e}");
            Ok(EXIT_OK)
        }
        Command::Flow { system, method, t, dt, stride, input, output } => {
            let state = io::read_state(input, &tol)?;
            let (header, rows) = flow_rows(*system, *method, &state, *t, *dt, *stride, &tol)?;
            let mut buf = Vec::new();
            io::write_csv(&mut buf, &header, &rows)?;
            emit(output.as_deref(), stdout, &buf)?;
            Ok(EXIT_OK)
        }
        Command::Spectrum { input } => {
            let state = io::read_state(input, &tol)?;
            expect_kind(&state, StateKind::Toda)?;
            let State::Toda(s) = &state else { unreachable!() };
            let m = toda_to_moser(s, &tol)?;
            let a = angles_from_w(&m, &tol)?;
            let mut text = State::Moser(m, Some(a.qhat().to_vec())).to_json();
            text.push('\n');
            emit(None, stdout, text.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Verify { suite, n, seed, trials, tol: overrides, negative_controls, serial } => {
            let mut tol = tol;
            for item in overrides {
                let (name, value) = item
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidArgument(format!("expected NAME=VALUE, got {item:?}")))?;
                tol.set(name.trim(), value.trim())?;
            }
            let config = VerifyConfig {
                suite: Some(suite.clone()),
                n: *n,
                seed: *seed,
                trials: *trials,
                tol,
                corrupted: *negative_controls,
                parallel: !*serial,
            };
            let reports = verify::run_all(&config)?;
            for r in &reports {
                writeln!(stdout, "{}", r.to_json_line()).map_err(|e| Error::Io(e.to_string()))?;
            }
            Ok(if reports.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}

/// Converts `state` and reports the round-trip residual back to the input.
pub fn map_state(direction: Direction, state: &State, tol: &ToleranceConfig) -> Result<(State, f64)> {
    let diff = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    match (direction, state) {
        (Direction::Forward, State::ActionAngle(a)) => {
            let s = aa_to_toda(a, tol)?;
            let residual = toda_to_aa(&s, tol)?.max_abs_diff(a);
            Ok((State::Toda(s), residual))
        }
        (Direction::Inverse, State::Toda(s)) => {
            let a = toda_to_aa(s, tol)?;
            let residual = aa_to_toda(&a, tol)?.max_abs_diff(s);
            Ok((State::ActionAngle(a), residual))
        }
        (Direction::ToMoser, State::Toda(s)) => {
            let m = toda_to_moser(s, tol)?;
            let residual = moser_to_toda(&m, tol)?.max_abs_diff(s);
            Ok((State::Moser(m, None), residual))
        }
        (Direction::FromMoser, State::Moser(m, _)) => {
            let s = moser_to_toda(m, tol)?;
            let back = toda_to_moser(&s, tol)?;
            let residual = diff(back.phat(), m.phat()).max(diff(back.w(), m.w()));
            Ok((State::Toda(s), residual))
        }
        (direction, state) => {
            let wanted = match direction {
                Direction::Forward => StateKind::ActionAngle,
                Direction::FromMoser => StateKind::Moser,
                Direction::Inverse | Direction::ToMoser => StateKind::Toda,
            };
            expect_kind(state, wanted).map(|_| unreachable!())
        }
    }
}

fn toda_row(t: f64, s: &TodaState, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let mut row = vec![t];
    row.extend(s.to_coords());
    row.push(hamiltonian(s, tol)?);
    Ok(row)
}

fn dual_row(t: f64, a: &ActionAngleState, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let mut row = vec![t];
    row.extend(a.to_coords());
    row.push(dual_hamiltonian(a, tol)?);
    Ok(row)
}

/// Header and rows of the trajectory CSV. Exact flows are evaluated on the
/// same time grid as the integrators.
pub fn flow_rows(
    system: System,
    method: Method,
    state: &State,
    t: f64,
    dt: f64,
    stride: usize,
    tol: &ToleranceConfig,
) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be positive".into()));
    }
    let mut times = vec![0.0];
    times.extend(time_grid(t, dt)?);
    let keep = io::strided(times.len(), stride);
    match system {
        System::Toda => {
            expect_kind(state, StateKind::Toda)?;
            let State::Toda(s) = state else { unreachable!() };
            let rows = match method {
                Method::Numeric => {
                    let traj = verlet_flow(s, t, dt, tol)?;
                    keep.iter().map(|&i| toda_row(traj.times[i], &traj.states[i], tol)).collect::<Result<_>>()?
                }
                Method::Exact => keep
                    .iter()
                    .map(|&i| toda_row(times[i], &toda_flow_exact(s, times[i], tol)?, tol))
                    .collect::<Result<_>>()?,
            };
            Ok((io::toda_header(s.n()), rows))
        }
        System::Dual => {
            expect_kind(state, StateKind::ActionAngle)?;
            let State::ActionAngle(a) = state else { unreachable!() };
            let rows = match method {
                Method::Numeric => {
                    let traj = dual_flow_numeric(a, t, dt, tol)?;
                    keep.iter().map(|&i| dual_row(traj.times[i], &traj.states[i], tol)).collect::<Result<_>>()?
                }
                Method::Exact => keep
                    .iter()
                    .map(|&i| dual_row(times[i], &dual_flow_exact(a, times[i], tol)?, tol))
                    .collect::<Result<_>>()?,
            };
            Ok((io::action_angle_header(a.n()), rows))
        }
    }
}
