//! Command-line driver for `pvspace`.
//!
//! [`run_cli`] is the whole program minus process plumbing: it takes the
//! argument vector and the contents of standard input and returns the exit
//! code together with what should go to stdout and stderr. Nothing is
//! written to stdout unless the command succeeds.

mod render;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pvspace::grid::{Grid, GridPoint};
use pvspace::json::{
    analysis_to_json, consumption_to_json, positions_to_json, region_from_json, region_to_json,
    JsonPoint,
};
use pvspace::positions::{enumerate_positions, is_valid_position, Position, ProgramPoset};
use pvspace::regions::{region_normalize, Interval, PosetContract, Region};
use pvspace::resources::{check_conservative, is_valid_state};
use pvspace::statespace::{analyze, Analysis};
use pvspace::syntax::{parse_program, print_program, Program};
use serde_json::{json, Value};
use thiserror::Error;

pub use render::{render, RenderedGrid};

#[derive(Debug, Parser)]
#[command(
    name = "pvspace",
    version,
    about = "State-space analysis of programs with mutexes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full report: consumption, position count, regions and deadlocks.
    Check(Common),
    /// List every position with its validity.
    Positions(Common),
    /// Normal form of the region of invalid positions.
    Forbidden(Common),
    /// Normal form of the region of valid positions.
    Fundamental(Common),
    /// Reachable valid positions with no valid way forward.
    Deadlocks(Common),
    /// Normal form of the region stored in a JSON file.
    Normalize(NormalizeArgs),
    /// Draw the state space of a two-thread program as a text grid.
    Render(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Program file; standard input when omitted or `-`.
    input: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Unroll loops this many times before analysis.
    #[arg(long, value_name = "K")]
    max_iterations: Option<u64>,

    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NormalizeArgs {
    #[command(flatten)]
    common: Common,

    /// JSON array of `{"low": .., "high": ..}` intervals.
    #[arg(long, value_name = "FILE")]
    region: PathBuf,

    /// Interpret the region over the grid with these per-axis maxima
    /// (for example `5,5`) instead of over a program.
    #[arg(long, value_name = "BOUNDS", value_delimiter = ',')]
    grid: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },

    #[error(transparent)]
    Core(#[from] pvspace::Error),
}

impl CliError {
    /// 1 when the analysis refuses the input, 2 for malformed input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                pvspace::Error::NonConservative { .. }
                | pvspace::Error::UnboundedLoop
                | pvspace::Error::NotFinitelyComplemented(_)
                | pvspace::Error::UnsupportedShape(_),
            ) => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Read { .. } => "read",
            CliError::Write { .. } => "write",
            CliError::Core(e) => e.kind(),
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `argv` (including the program name), reading
/// standard input only if the command asks for it.
pub fn run_cli<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli_with_stdin(argv, || {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map(|_| s)
    })
}

/// Like [`run_cli`], with a custom source for standard input.
pub fn run_cli_with_stdin<I, T>(argv: I, stdin: impl FnOnce() -> io::Result<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let common = match &cli.command {
        Command::Check(c)
        | Command::Positions(c)
        | Command::Forbidden(c)
        | Command::Fundamental(c)
        | Command::Deadlocks(c)
        | Command::Render(c) => c,
        Command::Normalize(n) => &n.common,
    };
    let format = common.format;
    let report = execute(&cli.command, stdin).and_then(|out| match &common.output {
        Some(path) => fs::write(path, &out)
            .map(|_| String::new())
            .map_err(|source| CliError::Write {
                path: path.display().to_string(),
                source,
            }),
        None => Ok(out),
    });
    match report {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: match format {
                Format::Json => {
                    let v = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
                    format!("{v}\n")
                }
                Format::Text => format!("error: {e}\n"),
            },
        },
    }
}

fn read_source(
    path: Option<&Path>,
    stdin: impl FnOnce() -> io::Result<String>,
) -> Result<String, CliError> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p).map_err(|source| CliError::Read {
            path: p.display().to_string(),
            source,
        }),
        _ => stdin().map_err(|source| CliError::Read {
            path: "standard input".into(),
            source,
        }),
    }
}

fn load_program(
    c: &Common,
    stdin: impl FnOnce() -> io::Result<String>,
) -> Result<Program, CliError> {
    Ok(parse_program(&read_source(c.input.as_deref(), stdin)?)?)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

fn execute(
    command: &Command,
    stdin: impl FnOnce() -> io::Result<String>,
) -> Result<String, CliError> {
    match command {
        Command::Check(c) => {
            let prog = load_program(c, stdin)?;
            let a = analyze(&prog, c.max_iterations)?;
            Ok(match c.format {
                Format::Json => pretty(&analysis_to_json(&a)),
                Format::Text => check_text(&prog, &a),
            })
        }
        Command::Positions(c) => {
            let prog = load_program(c, stdin)?;
            positions(&prog, c)
        }
        Command::Forbidden(c) | Command::Fundamental(c) => {
            let prog = load_program(c, stdin)?;
            let a = analyze(&prog, c.max_iterations)?;
            let r = if matches!(command, Command::Forbidden(_)) {
                &a.forbidden
            } else {
                &a.fundamental
            };
            Ok(match c.format {
                Format::Json => pretty(&region_to_json(r)),
                Format::Text => unroll_note(&a) + &region_text(r),
            })
        }
        Command::Deadlocks(c) => {
            let prog = load_program(c, stdin)?;
            let a = analyze(&prog, c.max_iterations)?;
            Ok(match c.format {
                Format::Json => pretty(&positions_to_json(&a.deadlocks)),
                Format::Text => {
                    let mut s = unroll_note(&a);
                    if a.deadlocks.is_empty() {
                        s.push_str("no deadlocks\n");
                    }
                    for d in &a.deadlocks {
                        s.push_str(&format!("{d}\n"));
                    }
                    s
                }
            })
        }
        Command::Normalize(n) => normalize(n, stdin),
        Command::Render(c) => {
            let prog = load_program(c, stdin)?;
            let grid = render(&prog)?;
            Ok(match c.format {
                Format::Json => pretty(&grid.to_json()),
                Format::Text => grid.to_text(),
            })
        }
    }
}

fn unroll_note(a: &Analysis) -> String {
    match a.unroll {
        Some(k) => format!("# loops unrolled {k} times; longer runs are not covered\n"),
        None => String::new(),
    }
}

fn region_text<T: Ord + std::fmt::Display>(r: &Region<T>) -> String {
    if r.is_empty() {
        return "empty region\n".into();
    }
    r.iter().map(|i| format!("{i}\n")).collect()
}

fn check_text(prog: &Program, a: &Analysis) -> String {
    let mut s = format!("program: {}\n", print_program(prog));
    s.push_str(&unroll_note(a));
    s.push_str(&format!("delta: {}\n", a.delta));
    s.push_str(&format!(
        "positions: {} ({} invalid)\n",
        a.graph.vertex_count(),
        a.graph.invalid_positions().count()
    ));
    for (name, r) in [("forbidden", &a.forbidden), ("fundamental", &a.fundamental)] {
        s.push_str(&format!("{name}: {} intervals\n", r.len()));
        for i in r {
            s.push_str(&format!("  {i}\n"));
        }
    }
    s.push_str(&format!("deadlocks: {}\n", a.deadlocks.len()));
    for d in &a.deadlocks {
        s.push_str(&format!("  {d}\n"));
    }
    s
}

fn positions(prog: &Program, c: &Common) -> Result<String, CliError> {
    let delta = check_conservative(prog)?;
    let all = enumerate_positions(prog, c.max_iterations)?;
    let mut rows = all
        .iter()
        .map(|p| Ok((p, is_valid_state(prog, p)?)))
        .collect::<Result<Vec<(&Position, bool)>, pvspace::Error>>()?;
    Ok(match c.format {
        Format::Json => {
            let invalid = rows.iter().filter(|(_, ok)| !ok).map(|(p, _)| *p);
            pretty(&json!({
                "delta": consumption_to_json(&delta),
                "count": rows.len(),
                "invalid": positions_to_json(invalid),
                "positions": positions_to_json(rows.iter().map(|(p, _)| *p)),
            }))
        }
        Format::Text => {
            rows.sort_by_cached_key(|(p, _)| p.to_json().to_string());
            rows.iter()
                .map(|(p, ok)| {
                    if *ok {
                        format!("{p}\n")
                    } else {
                        format!("{p}  invalid\n")
                    }
                })
                .collect()
        }
    })
}

fn parse_region<C: PosetContract>(
    ctx: &C,
    v: &Value,
    check: impl Fn(&C::Point) -> Result<(), pvspace::Error>,
) -> Result<Region<C::Point>, pvspace::Error>
where
    C::Point: JsonPoint,
{
    region_from_json::<C::Point>(v)?
        .into_iter()
        .map(|i| {
            check(&i.low)?;
            check(&i.high)?;
            Interval::new(ctx, i.low, i.high)
        })
        .collect()
}

fn normalize(
    n: &NormalizeArgs,
    stdin: impl FnOnce() -> io::Result<String>,
) -> Result<String, CliError> {
    let text = fs::read_to_string(&n.region).map_err(|source| CliError::Read {
        path: n.region.display().to_string(),
        source,
    })?;
    let v: Value = serde_json::from_str(&text).map_err(|e| pvspace::Error::Json(e.to_string()))?;
    let format = n.common.format;
    match &n.grid {
        Some(bounds) => {
            let g = Grid::new(bounds.clone())?;
            let r = parse_region(&g, &v, |p: &GridPoint| {
                if g.contains(p) {
                    Ok(())
                } else {
                    Err(pvspace::Error::InvalidGrid(format!(
                        "{p} lies outside the grid"
                    )))
                }
            })?;
            let nf = region_normalize(&g, &r)?;
            Ok(match format {
                Format::Json => pretty(&region_to_json(&nf)),
                Format::Text => region_text(&nf),
            })
        }
        None => {
            let prog = load_program(&n.common, stdin)?;
            let ctx = ProgramPoset::new(&prog);
            let r = parse_region(&ctx, &v, |p: &Position| {
                if is_valid_position(&prog, p) {
                    Ok(())
                } else {
                    Err(pvspace::Error::InvalidPosition {
                        program: print_program(&prog),
                        position: p.to_string(),
                    })
                }
            })?;
            let nf = region_normalize(&ctx, &r)?;
            Ok(match format {
                Format::Json => pretty(&region_to_json(&nf)),
                Format::Text => region_text(&nf),
            })
        }
    }
}
