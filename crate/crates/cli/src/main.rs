//! `toricodim`: analyze, verify, generate and tabulate polytope families.
//!
//! Exit codes: 0 analysis completed, 1 formula/oracle disagreement, 2 input
//! error, 3 genericity budget exhausted.

mod instance;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use toricodim::codim::{self, analyze, oracle_generic, SubsetTable};
use toricodim::random::random_essential_family;
use toricodim::Verdict;

use instance::{Instance, InstanceFile};
use report::{to_json, AnalysisReport, Timing, Tool, Trial, VerifyReport};

#[derive(Parser)]
#[command(name = "toricodim", version, about = "Codimension in the critical degree of toric Cox rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Essential check, bounds, closed formulas, first-page table and, when
    /// the instance asks for it, the Koszul oracle.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Include wall-clock timing (makes the output nondeterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Runs independent generic oracle draws and checks every claim.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Writes a random essential family as an instance file.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_coord: i64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prints the dimensions of the first page of the spectral sequence.
    E1Table {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<instance::InputError> for Failure {
    fn from(e: instance::InputError) -> Self {
        Failure::input(e)
    }
}

impl From<toricodim::Error> for Failure {
    fn from(e: toricodim::Error) -> Self {
        Failure::input(e)
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    Ok(InstanceFile::read(path)?.validate()?)
}

fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Disagree => 1,
        Verdict::Indeterminate => 3,
        _ => 0,
    }
}

fn emit(text: &str) -> Result<(), Failure> {
    std::io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|e| Failure::input(format!("writing output: {e}")))
}

fn cmd_analyze(file: &Path, format: Format, timing: bool) -> Result<u8, Failure> {
    let inst = load(file)?;
    let start = Instant::now();
    let r = analyze(&inst.family, &inst.request)?;
    let mut report = AnalysisReport::new(&inst.family, &inst.request, &r)?;
    if timing {
        report.timing = Some(Timing {
            analysis_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    match format {
        Format::Json => emit(&to_json(&report))?,
        Format::Text => emit(&report.to_text())?,
    }
    Ok(exit_code(report.verdict()))
}

fn cmd_verify(file: &Path, seed: u64, trials: usize, format: Format) -> Result<u8, Failure> {
    let inst = load(file)?;
    let family = &inst.family;
    let table = SubsetTable::new(family)?;
    let Some(claims) = table.claims()? else {
        let j = table.essential().violating_subset.unwrap_or_default();
        return Err(Failure::input(format!(
            "family is not essential (J = {j:?} has dim(Delta_J) < |J|); nothing to verify"
        )));
    };
    if trials == 0 {
        return Err(Failure::input("--trials must be at least 1"));
    }

    // Trials run concurrently; results are collated by trial index.
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(trials);
    let mut slots: Vec<Option<toricodim::Result<Trial>>> = (0..trials).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (worker, chunk) in slots.chunks_mut(trials.div_ceil(threads)).enumerate() {
            let claims = &claims;
            let base = worker * trials.div_ceil(threads);
            scope.spawn(move || {
                for (k, slot) in chunk.iter_mut().enumerate() {
                    let t = base + k;
                    let s = seed.wrapping_add(t as u64);
                    *slot = Some(oracle_generic(family, Some(claims), s).map(|run| {
                        let v = codim::verdict(Some(claims), Some(&run), false);
                        Trial {
                            trial: t,
                            seed: s,
                            oracle_value: run.value(),
                            reseeds: run.reseeds(),
                            attempt_values: run.attempts.iter().map(|a| a.codim).collect(),
                            rank_checks_agree: run.attempts.iter().all(|a| a.rank_check.agrees()),
                            verdict: v.as_str().into(),
                        }
                    }));
                }
            });
        }
    });
    let results = slots
        .into_iter()
        .map(|s| s.expect("every trial ran"))
        .collect::<toricodim::Result<Vec<_>>>()?;

    let verdicts: Vec<Verdict> = results
        .iter()
        .map(|t| t.verdict.parse().expect("verdict written above"))
        .collect();
    let overall = if verdicts.contains(&Verdict::Disagree) {
        Verdict::Disagree
    } else if verdicts.contains(&Verdict::Indeterminate) {
        Verdict::Indeterminate
    } else {
        Verdict::Agree
    };
    let failing_seeds = results
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| **v != Verdict::Agree)
        .map(|(t, _)| t.seed)
        .collect();
    let report = VerifyReport {
        tool: Tool::current(),
        n: family.n(),
        seed,
        trials,
        lower: claims.lower,
        upper: claims.upper,
        formula_value: claims.formula,
        genfor_value: claims.genfor,
        results,
        failing_seeds,
        verdict: overall.as_str().into(),
    };
    match format {
        Format::Json => emit(&to_json(&report))?,
        Format::Text => emit(&report.to_text())?,
    }
    Ok(exit_code(overall))
}

fn cmd_random(n: usize, max_coord: i64, seed: u64, out: &Path) -> Result<u8, Failure> {
    let family = random_essential_family(n, max_coord, seed).map_err(|e| match e {
        toricodim::Error::SamplingExhausted(_) => Failure {
            code: 3,
            message: e.to_string(),
        },
        e => Failure::input(e),
    })?;
    let file = InstanceFile::from_family(&family, Some(seed));
    let mut json = serde_json::to_string(&file).expect("instances serialize");
    json.push('\n');
    std::fs::write(out, json).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    Ok(0)
}

fn cmd_e1_table(file: &Path, format: Format) -> Result<u8, Failure> {
    let inst = load(file)?;
    let table = codim::e1_table(&inst.family)?;
    match format {
        Format::Json => emit(&to_json(&table.entries))?,
        Format::Text => emit(&report::e1_text(table.n, &table.entries))?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Analyze {
            file,
            format,
            timing,
        } => cmd_analyze(file, *format, *timing),
        Command::Verify {
            file,
            seed,
            trials,
            format,
        } => cmd_verify(file, *seed, *trials, *format),
        Command::Random {
            n,
            max_coord,
            seed,
            out,
        } => cmd_random(*n, *max_coord, *seed, out),
        Command::E1Table { file, format } => cmd_e1_table(file, *format),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
