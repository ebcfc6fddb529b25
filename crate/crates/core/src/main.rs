use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use charge_komlos::scenario::{self, RunReport, ScenarioSpec};

#[derive(Parser)]
#[command(name = "charge-komlos", version, about = "Run charge extraction scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files and write reports.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also fail when a degenerate regime is flagged.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Parse and check scenario files without running them.
    Validate {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
    },
    /// Run a built-in demo.
    Demo {
        /// One of: dichotomy, empirical, posterior, slln.
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        strict: bool,
    },
}

fn load(path: &Path) -> charge_komlos::Result<ScenarioSpec> {
    let mut spec = ScenarioSpec::from_path(path)?;
    scenario::apply_env_override(&mut spec)?;
    Ok(spec)
}

fn execute(spec: &ScenarioSpec, dir: &Path) -> charge_komlos::Result<RunReport> {
    let report = scenario::run(spec)?;
    report.write(dir, spec)?;
    Ok(report)
}

fn summarize(label: &str, r: &charge_komlos::Result<RunReport>, strict: bool) -> bool {
    match r {
        Ok(rep) => {
            let ok = rep.ok(strict);
            println!(
                "{label}: {} ({} failures{})",
                if ok { "pass" } else { "FAIL" },
                rep.failures.len(),
                if rep.degenerate { ", degenerate" } else { "" }
            );
            for f in &rep.failures {
                println!("  {}: {:e} > {:e}", f.check, f.value, f.limit);
            }
            ok
        }
        Err(e) => {
            eprintln!("{label}: error: {e}");
            false
        }
    }
}

fn run_many(paths: &[PathBuf], out: &Path, strict: bool, jobs: usize) -> bool {
    let single = paths.len() == 1;
    let task = |path: &PathBuf| -> charge_komlos::Result<RunReport> {
        let spec = load(path)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
        let dir = if single {
            out.to_path_buf()
        } else {
            out.join(spec.display_name(stem))
        };
        execute(&spec, &dir)
    };
    let jobs = jobs.max(1);
    let mut results: Vec<Option<charge_komlos::Result<RunReport>>> =
        paths.iter().map(|_| None).collect();
    for (chunk_paths, chunk_out) in paths.chunks(jobs).zip(results.chunks_mut(jobs)) {
        std::thread::scope(|s| {
            let handles: Vec<_> = chunk_paths.iter().map(|p| s.spawn(move || task(p))).collect();
            for (slot, h) in chunk_out.iter_mut().zip(handles) {
                *slot = Some(h.join().expect("scenario thread panicked"));
            }
        });
    }
    let mut all = true;
    for (p, r) in paths.iter().zip(results) {
        let r = r.expect("every scenario ran");
        all &= summarize(&p.display().to_string(), &r, strict);
    }
    all
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ok = match cli.command {
        Command::Run {
            scenarios,
            out,
            strict,
            jobs,
        } => run_many(&scenarios, &out, strict, jobs),
        Command::Validate { scenarios } => {
            let mut all = true;
            for p in &scenarios {
                match ScenarioSpec::from_path(p) {
                    Ok(_) => println!("{}: valid", p.display()),
                    Err(e) => {
                        eprintln!("{}: {e}", p.display());
                        all = false;
                    }
                }
            }
            all
        }
        Command::Demo { name, out, strict } => {
            let r = scenario::demo_spec(&name).and_then(|mut spec| {
                scenario::apply_env_override(&mut spec)?;
                execute(&spec, &out)
            });
            summarize(&name, &r, strict)
        }
    };
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
