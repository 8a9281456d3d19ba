//! Command-line front end: generate instances, apply constructions, search
//! for solutions, and run the named verification pipelines.
//!
//! Exit codes: 0 on success, 1 when a verification or search fails, 2 on
//! usage errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rrlab::coloring::TailWindow;
use rrlab::dnc;
use rrlab::generate::{self, ColoringClass};
use rrlab::instance::{InstanceFile, InstancePayload};
use rrlab::rainbow;
use rrlab::solvers;
use rrlab::verify::{self, Scale};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rrlab", version, about = "Finite laboratory for rainbow Ramsey constructions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct Common {
    /// Seed for all randomness; runs are bit-exact per seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of points (and stages, unless --stages is given).
    #[arg(long)]
    domain: Option<u64>,
    /// Stage bound; defaults to the domain.
    #[arg(long)]
    stages: Option<u64>,
    /// Tail window length used by the stability classifiers.
    #[arg(long)]
    window: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output rendering.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance of the requested stability class.
    Gen {
        /// married | monk | mixed | drifting | tournament | limit | tree
        #[arg(long)]
        class: String,
        #[command(flatten)]
        common: Common,
    },
    /// Apply a named construction to an instance file.
    Reduce {
        /// Construction name; see the long help for the catalogue.
        #[arg(long)]
        name: String,
        /// Input instance file.
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Search an instance for a solution of the requested shape.
    Solve {
        /// rainbow | thin | free | transitive
        #[arg(long)]
        goal: String,
        /// Input instance file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Solution size to search for.
        #[arg(long, default_value_t = 4)]
        size: usize,
        /// Colour a thin set must avoid.
        #[arg(long, default_value_t = 0)]
        colour: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run one named verification pipeline.
    Verify {
        /// Pipeline name; `rrlab pipeline` lists them all.
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run every verification pipeline in sequence.
    Pipeline {
        #[command(flatten)]
        common: Common,
    },
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn emit(common: &Common, text: String) -> ExitCode {
    match &common.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text + "\n") {
                eprintln!("error: writing {}: {e}", p.display());
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        None => {
            use std::io::Write;
            // A closed pipe downstream is not our error.
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::SUCCESS
        }
    }
}

fn scale_with(common: &Common) -> Scale {
    let mut s = Scale::from_env();
    if let Some(d) = common.domain {
        s.domain = d;
        s.stages = d;
    }
    if let Some(st) = common.stages {
        s.stages = st;
    }
    if let Some(w) = common.window {
        s.window = w;
    }
    s
}

fn cmd_gen(class: &str, common: &Common) -> ExitCode {
    let scale = scale_with(common);
    let (domain, window, seed) = (scale.domain, scale.window, common.seed);
    if window >= scale.stages {
        return usage_error(&format!(
            "window {window} must be shorter than the stage bound {}",
            scale.stages
        ));
    }
    let payload = match class {
        "tournament" => InstancePayload::Tournament(generate::gen_tournament(domain, seed)),
        "limit" => InstancePayload::LimitFunction(generate::gen_two_bounded_limit(
            domain,
            scale.stages,
            scale.stages / 4,
            seed,
        )),
        "tree" => InstancePayload::Tree(generate::gen_random_tree(12, 0.2, seed)),
        other => match ColoringClass::parse(other) {
            Some(c) => {
                InstancePayload::StageColoring(generate::gen_coloring(c, domain, window, seed))
            }
            None => return usage_error(&format!("unknown generator class '{other}'")),
        },
    };
    let file = InstanceFile::new(payload, &format!("gen:{class}"), Some(seed));
    match file.to_json() {
        Ok(j) => emit(common, j),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_reduce(name: &str, input: &PathBuf, common: &Common) -> ExitCode {
    let scale = scale_with(common);
    let file = match InstanceFile::load(input) {
        Ok(f) => f,
        Err(e) => return usage_error(&format!("reading {}: {e}", input.display())),
    };
    let w = TailWindow::new(scale.window);
    let built: Result<InstancePayload, rrlab::Error> = (|| match name {
        "rainbow_to_thin" => {
            Ok(InstancePayload::StageColoring(rainbow::rainbow_to_thin(file.as_coloring()?)))
        }
        "rainbow_to_free" => Ok(InstancePayload::StageColoring(rainbow::rainbow_to_free(
            file.as_coloring()?,
            1,
            scale.domain,
        )?)),
        "jump_lower" => Ok(InstancePayload::StageColoring(rainbow::jump_lower(
            file.as_limit_function()?,
            1,
            scale.domain,
        ))),
        "stabilize_strongly" => {
            Ok(InstancePayload::StageColoring(rainbow::stabilize_strongly(file.as_coloring()?)))
        }
        "srt_to_sfs" => Ok(InstancePayload::StageColoring(rainbow::srt_to_sfs(
            file.as_coloring()?,
            scale.domain * scale.domain,
        )?)),
        "wsrrt_collapse" => Ok(InstancePayload::StageColoring(
            rainbow::wsrrt_to_jump_rainbow(file.as_coloring()?, w),
        )),
        "em_tournament" => Ok(InstancePayload::Tournament(dnc::build_em_tournament(
            file.as_limit_function()?,
            scale.domain,
            |_| 0,
        )?)),
        "ts2_coloring" => Ok(InstancePayload::StageColoring(dnc::build_ts2_coloring(
            file.as_limit_function()?,
            scale.domain,
        )?)),
        other => Err(rrlab::Error::Instance(format!("__usage__ unknown construction '{other}'"))),
    })();
    match built {
        Ok(payload) => {
            let out = InstanceFile::new(payload, &format!("reduce:{name}"), file.metadata.seed);
            match out.to_json() {
                Ok(j) => emit(common, j),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(rrlab::Error::Instance(m)) if m.starts_with("__usage__") => {
            usage_error(m.trim_start_matches("__usage__ "))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_solve(goal: &str, input: &PathBuf, size: usize, colour: u64, common: &Common) -> ExitCode {
    let file = match InstanceFile::load(input) {
        Ok(f) => f,
        Err(e) => return usage_error(&format!("reading {}: {e}", input.display())),
    };
    let budget = 200_000_000;
    let outcome = match goal {
        "rainbow" => match file.as_coloring() {
            Ok(f) => solvers::find_rainbows(f, size, budget, 1),
            Err(e) => return usage_error(&e.to_string()),
        },
        "thin" => match file.as_coloring() {
            Ok(f) => solvers::find_thin_sets(f, colour, size, budget, 1),
            Err(e) => return usage_error(&e.to_string()),
        },
        "free" => match file.as_coloring() {
            Ok(f) => solvers::find_free_sets(f, size, budget, 1),
            Err(e) => return usage_error(&e.to_string()),
        },
        "transitive" => match file.as_tournament() {
            Ok(t) => solvers::find_transitive_sets(t, size, budget, 1),
            Err(e) => return usage_error(&e.to_string()),
        },
        other => return usage_error(&format!("unknown goal '{other}'")),
    };
    match outcome.solutions.first() {
        Some(sol) => {
            let text = match common.format {
                Format::Text => format!("found {goal} of size {size}: {sol:?}"),
                Format::Structured => serde_json::json!({
                    "goal": goal,
                    "size": size,
                    "solution": sol,
                })
                .to_string(),
            };
            emit(common, text)
        }
        None => {
            eprintln!("no {goal} of size {size} found ({:?})", outcome.end);
            ExitCode::from(1)
        }
    }
}

fn render_report(report: &rrlab::instance::Report, format: Format) -> String {
    match format {
        Format::Text => report.render_text(),
        Format::Structured => serde_json::to_string_pretty(report).unwrap(),
    }
}

fn cmd_verify(name: &str, common: &Common) -> ExitCode {
    let scale = scale_with(common);
    match verify::run_pipeline(name, common.seed, scale) {
        Ok(report) => {
            let pass = report.pass;
            let code = if pass { ExitCode::SUCCESS } else { ExitCode::from(1) };
            let e = emit(common, render_report(&report, common.format));
            if e != ExitCode::SUCCESS {
                e
            } else {
                code
            }
        }
        Err(_) => usage_error(&format!(
            "unknown pipeline '{name}'; available: {}",
            verify::PIPELINES.join(", ")
        )),
    }
}

fn cmd_pipeline(common: &Common) -> ExitCode {
    let scale = scale_with(common);
    let mut all_pass = true;
    let mut rendered = Vec::new();
    for name in verify::PIPELINES {
        let report = verify::run_pipeline(name, common.seed, scale).expect("registered pipeline");
        all_pass &= report.pass;
        rendered.push(render_report(&report, common.format));
    }
    let e = emit(common, rendered.join("\n"));
    if e != ExitCode::SUCCESS {
        e
    } else if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Gen { class, common } => cmd_gen(class, common),
        Cmd::Reduce { name, input, common } => cmd_reduce(name, input, common),
        Cmd::Solve { goal, input, size, colour, common } => {
            cmd_solve(goal, input, *size, *colour, common)
        }
        Cmd::Verify { name, common } => cmd_verify(name, common),
        Cmd::Pipeline { common } => cmd_pipeline(common),
    }
}
