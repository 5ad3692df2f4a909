use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use opcalc::exactlin::Field;
use opcalc_cli::build::resolve;
use opcalc_cli::run::{csv, run, RunOptions};
use opcalc_cli::spec::{parse, parse_field, SpecError, SpecFile};

#[derive(Parser)]
#[command(name = "opcalc", version, about = "Run operadic bar-construction jobs from a spec file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every job and print the JSON report.
    Run(RunArgs),
    /// Parse and resolve a spec without running jobs.
    Check(Common),
    /// Print a spec in canonical form.
    Fmt {
        spec: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    spec: PathBuf,
    /// Extra file whose sections are appended to the spec.
    #[arg(long)]
    jobs: Option<PathBuf>,
    /// Coefficient field, `Q` or `Fp:p`.
    #[arg(long, value_parser = parse_field)]
    field: Option<Field>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    degree_cap: Option<i32>,
    #[arg(long)]
    arity_cap: Option<usize>,
    /// Truncate bar constructions at this simplicial degree.
    #[arg(long)]
    bar_cap: Option<usize>,
    /// Directory for report.json and per-job CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write one CSV of Betti tables per job (needs --out).
    #[arg(long, requires = "out")]
    csv: bool,
    #[arg(long, env = "OPCALC_THREADS", default_value_t = 0)]
    threads: usize,
    /// Record wall-clock time per job; reports are no longer reproducible.
    #[arg(long)]
    timing: bool,
}

fn report_errors(path: &Path, errs: &[SpecError]) {
    for e in errs {
        eprintln!("{}:{e}", path.display());
    }
}

fn load(c: &Common) -> Result<Result<SpecFile, ()>> {
    let text = std::fs::read_to_string(&c.spec).with_context(|| format!("reading {}", c.spec.display()))?;
    let mut spec = match parse(&text) {
        Ok(s) => s,
        Err(errs) => {
            report_errors(&c.spec, &errs);
            return Ok(Err(()));
        }
    };
    if let Some(p) = &c.jobs {
        let more = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        match parse(&more) {
            Ok(s) => spec.extend(s),
            Err(errs) => {
                report_errors(p, &errs);
                return Ok(Err(()));
            }
        }
    }
    Ok(Ok(spec))
}

fn threads(n: usize) -> usize {
    if n > 0 {
        n
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
}

fn main_inner(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Fmt { spec } => {
            let text = std::fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
            match parse(&text) {
                Ok(s) => {
                    print!("{s}");
                    Ok(ExitCode::SUCCESS)
                }
                Err(errs) => {
                    report_errors(&spec, &errs);
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Check(c) => {
            let Ok(spec) = load(&c)? else { return Ok(ExitCode::from(2)) };
            match resolve(&spec, c.field) {
                Ok(env) => {
                    println!(
                        "ok: {} complexes, {} operads, {} algebras, {} maps, {} jobs",
                        env.complexes.len(),
                        env.operads.len(),
                        env.algebras.len(),
                        env.maps.len(),
                        spec.jobs().count()
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Err(errs) => {
                    report_errors(&c.spec, &errs);
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Run(r) => {
            let Ok(spec) = load(&r.common)? else { return Ok(ExitCode::from(2)) };
            let env = match resolve(&spec, r.common.field) {
                Ok(e) => e,
                Err(errs) => {
                    report_errors(&r.common.spec, &errs);
                    return Ok(ExitCode::from(2));
                }
            };
            let opts = RunOptions {
                degree_cap: r.degree_cap,
                arity_cap: r.arity_cap,
                bar_cap: r.bar_cap,
                threads: threads(r.threads),
                timing: r.timing,
            };
            let report = run(&env, &spec, &opts);
            let json = serde_json::to_string_pretty(&report)? + "\n";
            for j in &report.jobs {
                let status = if j.pass { "pass" } else { "FAIL" };
                eprintln!("{status} {} ({})", j.name, j.kind);
                if let Some(e) = &j.error {
                    eprintln!("  error: {e}");
                }
                for a in j.assertions.iter().filter(|a| !a.pass) {
                    eprintln!("  failed {}: {}", a.name, a.detail);
                }
            }
            match &r.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                    std::fs::write(dir.join("report.json"), &json)?;
                    if r.csv {
                        for j in &report.jobs {
                            std::fs::write(dir.join(format!("{}.csv", j.name)), csv(j))?;
                        }
                    }
                }
                None => print!("{json}"),
            }
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_inner(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
