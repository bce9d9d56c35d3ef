use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tcla_cli::api::{router, AppState, Limits};
use tcla_cli::report::{analyze, translate, ProtocolKind, TranslateError};
use tcla_cli::text;
use tcla_core::af::io::{parse_framework, to_dot};
use tcla_core::af::{ArgumentationFramework, Semantics};
use tcla_core::engine::{observables, run, timeline, SchedulingPolicy, Terminal, DEFAULT_NODE_BUDGET};
use tcla_core::protocols::VerdictStatus;
use tcla_core::session::ExecSession;
use tcla_core::syntax::{parse_program, pretty_print, Diagnostic, Program};

/// Interpreter and tools for tcla programs.
#[derive(Parser)]
#[command(name = "tcla", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Run a program to termination, or explore all its schedules.
    Run {
        file: PathBuf,
        /// Seed of the default scheduler.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw uniformly among all enabled steps instead of preferring
        /// satisfied guards.
        #[arg(long)]
        uniform: bool,
        /// Comma-separated choice indices, e.g. `0,2,1`.
        #[arg(long, conflicts_with_all = ["uniform", "exhaustive"])]
        script: Option<String>,
        /// Enumerate every schedule up to the bound.
        #[arg(long)]
        exhaustive: bool,
        /// Maximum number of steps.
        #[arg(long, default_value_t = 1000)]
        bound: usize,
        /// Node budget for exhaustive exploration.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
        /// Initial store, as JSON or apx facts.
        #[arg(long)]
        initial: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Execute one time unit at a time, choosing among enabled steps.
    Step {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        initial: Option<PathBuf>,
    },
    /// Compile a debate or dialogue game (JSON) into a program.
    Translate {
        kind: ProtocolKind,
        input: PathBuf,
        /// Also explore the program and compare it with the protocol.
        #[arg(long)]
        check_theorem: bool,
        #[arg(long, default_value_t = 60)]
        bound: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Extensions and labellings of a framework (JSON or apx).
    Analyze {
        file: PathBuf,
        /// cf, adm, com, stb, sst, prf or gde; every semantics when omitted.
        #[arg(long)]
        semantics: Option<Semantics>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check syntax and print the program in canonical form.
    Parse { file: PathBuf },
    /// Serve the HTTP API. The address defaults to `TCLA_ADDR`, then
    /// 127.0.0.1:8080; `TCLA_NODE_BUDGET` and `TCLA_MAX_BOUND` cap requests.
    Serve {
        #[arg(long)]
        addr: Option<String>,
    },
}

const EXIT_SS: u8 = 0;
const EXIT_FF: u8 = 1;
const EXIT_OTHER: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_OTHER)
        }
    }
}

fn read(path: &PathBuf) -> Result<String, String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| e.to_string())?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_program(path: &PathBuf) -> Result<Program, String> {
    let source = read(path)?;
    parse_program(&source).map_err(|ds| diagnostics(path, &ds))
}

fn diagnostics(path: &PathBuf, ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| format!("{}:{d}", path.display()))
        .collect::<Vec<_>>()
        .join("\n")
}

fn load_framework(path: &Option<PathBuf>) -> Result<ArgumentationFramework, String> {
    match path {
        None => Ok(ArgumentationFramework::new()),
        Some(p) => parse_framework(&read(p)?).map_err(|e| format!("{}: {e}", p.display())),
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn exit_for(t: Terminal) -> u8 {
    match t {
        Terminal::Success => EXIT_SS,
        Terminal::Failure => EXIT_FF,
        Terminal::Bounded => EXIT_OTHER,
    }
}

fn dispatch(command: Command) -> Result<u8, String> {
    match command {
        Command::Run {
            file,
            seed,
            uniform,
            script,
            exhaustive,
            bound,
            budget,
            initial,
            format,
        } => {
            let program = load_program(&file)?;
            let initial = load_framework(&initial)?;
            if exhaustive {
                let obs = observables(&program, &initial, bound, budget).map_err(|e| e.to_string())?;
                match format {
                    Format::Text => print!("{}", text::observables(&obs)),
                    Format::Json => println!("{}", json(&obs)),
                    Format::Dot => return Err("--format dot needs a single run".into()),
                }
                let code = if obs.budget_exhausted {
                    EXIT_OTHER
                } else if obs.successful().next().is_some() {
                    EXIT_SS
                } else if obs.failed().next().is_some() {
                    EXIT_FF
                } else {
                    EXIT_OTHER
                };
                return Ok(code);
            }
            let policy = match script {
                Some(s) => SchedulingPolicy::Scripted {
                    choices: parse_script(&s)?,
                },
                None if uniform => SchedulingPolicy::UniformRandom { seed },
                None => SchedulingPolicy::SeededRandom { seed },
            };
            let trace = run(&program, &initial, policy, bound).map_err(|e| e.to_string())?;
            let rows = timeline(&trace);
            match format {
                Format::Text => print!("{}", text::trace(&trace, &rows)),
                Format::Json => println!("{}", json(&serde_json::json!({"trace": trace, "timeline": rows}))),
                Format::Dot => print!("{}", to_dot(trace.final_store(), None)),
            }
            Ok(exit_for(trace.terminal))
        }
        Command::Step { file, seed, initial } => {
            let program = load_program(&file)?;
            let initial = load_framework(&initial)?;
            let session = ExecSession::new(program, initial, SchedulingPolicy::SeededRandom { seed })
                .map_err(|e| e.to_string())?;
            let stdin = std::io::stdin();
            interactive(session, &mut stdin.lock(), &mut std::io::stdout())
        }
        Command::Translate {
            kind,
            input,
            check_theorem,
            bound,
            budget,
            format,
        } => {
            let value: serde_json::Value =
                serde_json::from_str(&read(&input)?).map_err(|e| format!("{}: {e}", input.display()))?;
            let translation = match translate(kind, value, check_theorem.then_some((bound, budget))) {
                Ok(t) => t,
                Err(TranslateError::Invalid(violations)) => {
                    for v in violations {
                        eprintln!("violation: {}", v.message);
                    }
                    return Ok(EXIT_OTHER);
                }
                Err(e) => return Err(e.to_string()),
            };
            match format {
                Format::Json => println!("{}", json(&translation)),
                _ => print!("{}", translation.program),
            }
            let Some(verdict) = &translation.verdict else {
                return Ok(EXIT_SS);
            };
            if !matches!(format, Format::Json) {
                eprintln!("{}", json(verdict));
            }
            Ok(match verdict.status() {
                VerdictStatus::Holds => EXIT_SS,
                VerdictStatus::Mismatch | VerdictStatus::NoSuccessfulRun => EXIT_FF,
                VerdictStatus::Inconclusive => EXIT_OTHER,
            })
        }
        Command::Analyze {
            file,
            semantics,
            format,
        } => {
            let af = load_framework(&Some(file))?;
            let chosen: Vec<Semantics> = semantics.map_or_else(|| Semantics::ALL.to_vec(), |s| vec![s]);
            let analyses = chosen
                .into_iter()
                .map(|s| analyze(&af, s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            match format {
                Format::Json => println!("{}", json(&analyses)),
                Format::Dot => print!("{}", analyses[0].dot),
                Format::Text => {
                    for a in &analyses {
                        let exts: Vec<String> = a
                            .extensions
                            .iter()
                            .map(|e| {
                                let names: Vec<&str> = e.members().iter().map(|x| x.as_str()).collect();
                                format!("{{{}}}", names.join(","))
                            })
                            .collect();
                        println!("{}: {}", a.semantics, exts.join(" "));
                    }
                }
            }
            Ok(EXIT_SS)
        }
        Command::Parse { file } => {
            let program = load_program(&file)?;
            print!("{}", pretty_print(&program));
            Ok(EXIT_SS)
        }
        Command::Serve { addr } => {
            let addr = addr
                .or_else(|| std::env::var("TCLA_ADDR").ok())
                .unwrap_or_else(|| "127.0.0.1:8080".into());
            let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(&addr)
                    .await
                    .map_err(|e| format!("{addr}: {e}"))?;
                eprintln!("listening on http://{addr}/v1");
                axum::serve(listener, router(AppState::new(Limits::from_env())))
                    .await
                    .map_err(|e| e.to_string())
            })?;
            Ok(EXIT_SS)
        }
    }
}

fn parse_script(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<usize>().map_err(|_| format!("invalid choice index {x:?}")))
        .collect()
}

/// The prompt loop of `tcla step`. Reads a choice index, `auto` or `quit`
/// per time unit.
fn interactive(mut session: ExecSession, input: &mut impl BufRead, out: &mut impl Write) -> Result<u8, String> {
    let io = |e: std::io::Error| e.to_string();
    loop {
        let view = session.state().map_err(|e| e.to_string())?;
        writeln!(out, "clock {}  store {}", view.clock, view.store).map_err(io)?;
        if let Some(t) = view.terminal {
            writeln!(out, "==== {t} at clock {} ====", view.clock).map_err(io)?;
            return Ok(exit_for(t));
        }
        write!(out, "{}", text::choices(&view.choices)).map_err(io)?;
        let choice = loop {
            write!(out, "choice [0-{}], auto or quit> ", view.choices.len() - 1).map_err(io)?;
            out.flush().map_err(io)?;
            let mut line = String::new();
            if input.read_line(&mut line).map_err(io)? == 0 {
                return Ok(EXIT_OTHER);
            }
            match line.trim() {
                "quit" | "q" => return Ok(EXIT_OTHER),
                "auto" | "a" | "" => break None,
                other => match other.parse::<usize>() {
                    Ok(i) if i < view.choices.len() => break Some(i),
                    _ => writeln!(out, "not a valid choice: {other}").map_err(io)?,
                },
            }
        };
        let before = view.store;
        session.step(choice).map_err(|e| e.to_string())?;
        let after = session.state().map_err(|e| e.to_string())?;
        for e in &after.events {
            writeln!(out, "  {e}").map_err(io)?;
        }
        writeln!(out, "  {}", text::store_diff(&before, &after.store)).map_err(io)?;
    }
}
