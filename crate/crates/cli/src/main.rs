//! Command-line interface: solve process specifications into truncated
//! trees, extract trace sets, print tree unfoldings, and run the iteration
//! law suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;

use elgot_core::effects::{render_word, IterPolicy, MonadId};
use elgot_core::laws::{self, Law, Sizes};
use elgot_core::proclang::{compile, parse, EquationSystem};
use elgot_core::{bridge, Carrier, Point};

#[derive(Parser)]
#[command(
    name = "elgot",
    version,
    about = "Solve recursive process specifications and check iteration laws"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a specification and print depth-truncated trees per variable.
    Solve {
        file: PathBuf,
        /// Truncation depth for the printed trees.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Resolve unguarded occurrences by least fixpoint instead of
        /// refusing.
        #[arg(long)]
        least: bool,
    },
    /// Print the successful traces of one variable, shortest first.
    Traces {
        file: PathBuf,
        #[arg(long)]
        var: String,
        /// Keep traces of at most this length.
        #[arg(long)]
        maxlen: usize,
    },
    /// Print the depth-truncated tree of one variable.
    Unfold {
        file: PathBuf,
        #[arg(long)]
        var: String,
        #[arg(long)]
        depth: usize,
    },
    /// Check iteration laws exhaustively (maybe, powerset) or on random
    /// samples (traces).
    Laws {
        /// One of `maybe`, `powerset`, `traces`.
        #[arg(long)]
        monad: String,
        /// A law name or `all`.
        #[arg(long)]
        law: String,
        /// Carrier size bound for the quantified objects.
        #[arg(long)]
        size: usize,
        /// Comparison depth for the trace monad (default 5).
        #[arg(long)]
        depth: Option<usize>,
    },
}

fn load(file: &PathBuf) -> Result<EquationSystem, String> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    let ast = parse(&text).map_err(|e| e.to_string())?;
    compile(&ast).map_err(|e| e.to_string())
}

fn tick_name(p: &Point) -> String {
    match p {
        Point::At(0) => "tick".to_string(),
        other => format!("{other:?}"),
    }
}

fn run() -> Result<(), String> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Solve { file, depth, least } => {
            let system = load(&file)?;
            let trees = system
                .solve(least, IterPolicy::Exact { window: 256 })
                .map_err(|e| e.to_string())?;
            for (i, t) in trees.iter().enumerate() {
                println!(
                    "{} = {}",
                    system.state_names[i],
                    t.truncate(depth).render(&system.inst, &tick_name)
                );
            }
            Ok(())
        }
        Cmd::Traces { file, var, maxlen } => {
            let system = load(&file)?;
            let words = bridge::trace_set(&system, &var, maxlen).map_err(|e| e.to_string())?;
            let alphabet = system
                .inst
                .monad
                .alphabet()
                .cloned()
                .or_else(|| system.inst.sig.alphabet().map(|a| (**a).clone()))
                .unwrap_or_else(|| Carrier::of("A", &["u"]));
            for w in words {
                if w.is_empty() {
                    println!("<eps>");
                } else {
                    println!("{}", render_word(&w, &alphabet));
                }
            }
            Ok(())
        }
        Cmd::Unfold { file, var, depth } => {
            let system = load(&file)?;
            let trees = system
                .solve(false, IterPolicy::Exact { window: 256 })
                .map_err(|e| e.to_string())?;
            let i = system.state_names[..system.var_count]
                .iter()
                .position(|n| n == &var)
                .ok_or_else(|| format!("undefined variable `{var}`"))?;
            println!(
                "{}",
                trees[i].truncate(depth).render(&system.inst, &tick_name)
            );
            Ok(())
        }
        Cmd::Laws {
            monad,
            law,
            size,
            depth,
        } => {
            let monad = match monad.as_str() {
                "maybe" => MonadId::Maybe,
                "powerset" => MonadId::FinPowerset,
                "traces" => {
                    MonadId::traces(Carrier::of("A", &["a", "b"])).map_err(|e| e.to_string())?
                }
                other => return Err(format!("unknown monad `{other}`")),
            };
            let laws_to_run: Vec<Law> = if law == "all" {
                Law::ALL.to_vec()
            } else {
                vec![Law::from_name(&law).ok_or_else(|| {
                    format!(
                        "unknown law `{law}`; known: {} or all",
                        Law::ALL
                            .iter()
                            .map(|l| l.name())
                            .collect::<Vec<_>>()
                            .join(", ")
                    )
                })?]
            };
            let sizes = Sizes {
                x: size,
                y: size,
                z: size,
            };
            let trace_depth = depth.unwrap_or(5);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xE160);
            let mut any_failed = false;
            for l in laws_to_run {
                let report =
                    laws::run_suite(l, &monad, sizes, 1 << 20, 50, trace_depth, &mut rng)
                        .map_err(|e| e.to_string())?;
                for line in &report.failures {
                    println!("{line}");
                }
                println!("{}", report.summary());
                any_failed |= !report.ok();
            }
            if any_failed {
                Err("law failures detected".into())
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
