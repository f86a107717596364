mod form;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use quatring::classify::{build_witness, classify, verify_witness, IsoWitness};
use quatring::congruence::{solve_binary_form_2adic, solve_binary_form_odd};
use quatring::oracle::{census, crosscheck_solver, Budget, CheckRecord, CrosscheckRanges, Suite};
use quatring::quat::RingParams;

/// Quaternion rings (a, b / Z/n): classification, witnesses and oracles.
#[derive(Parser)]
#[command(name = "quatring", version)]
struct Cli {
    /// Worker threads for parallel searches.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RingArgs {
    #[arg(short)]
    n: u64,
    #[arg(short)]
    a: i64,
    #[arg(short)]
    b: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical class as {tag, split, collapse}.
    #[command(allow_negative_numbers = true)]
    Classify(RingArgs),
    /// Build and check an isomorphism witness.
    #[command(allow_negative_numbers = true)]
    Witness {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a witness file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Solve a x^2 + b y^2 = c modulo a prime power.
    #[command(allow_negative_numbers = true)]
    Solve {
        #[arg(long)]
        form: String,
        #[arg(long = "mod")]
        modulus: String,
    },
    /// Element counts by full enumeration.
    #[command(allow_negative_numbers = true)]
    Census(RingArgs),
    /// Check the congruence solvers against exhaustive enumeration.
    Crosscheck {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Unit triples per odd modulus before falling back to scaling-class representatives.
        #[arg(long)]
        budget: Option<u128>,
        /// Also print one line per checked tuple.
        #[arg(long)]
        records: bool,
    },
}

/// Failures that map to exit code 2.
#[derive(Debug)]
struct Usage(anyhow::Error);

/// Sorted keys, no whitespace.
fn canonical(value: impl serde::Serialize) -> String {
    serde_json::to_value(value)
        .and_then(|v| serde_json::to_string(&v))
        .expect("output is plain data")
}

fn usage<T, E: Into<anyhow::Error>>(r: std::result::Result<T, E>) -> std::result::Result<T, Usage> {
    r.map_err(|e| Usage(e.into()))
}

type Outcome = std::result::Result<bool, Usage>;

fn run(cli: Cli) -> Outcome {
    if let Some(jobs) = cli.jobs {
        usage(rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global())?;
    }
    match cli.command {
        Command::Classify(r) => {
            let class = usage(classify(r.n, r.a, r.b))?;
            println!("{}", canonical(class));
            Ok(true)
        }
        Command::Witness { ring, out } => {
            let w = usage(build_witness(ring.n, ring.a, ring.b))?;
            let report = verify_witness(&w);
            let text = serde_json::to_string_pretty(&usage(serde_json::to_value(&w))?).expect("plain data");
            match out {
                Some(path) => usage(fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display())))?,
                None => println!("{text}"),
            }
            report_failures(&report);
            Ok(report.ok)
        }
        Command::Verify { input } => {
            let text = usage(fs::read_to_string(&input).with_context(|| format!("reading {}", input.display())))?;
            let w: IsoWitness = match serde_json::from_str(&text) {
                Ok(w) => w,
                Err(e) => {
                    eprintln!("malformed witness: {e}");
                    println!("{}", canonical(json!({"ok": false, "failures": [{"detail": e.to_string()}]})));
                    return Ok(false);
                }
            };
            let report = verify_witness(&w);
            println!("{}", canonical(&report));
            report_failures(&report);
            Ok(report.ok)
        }
        Command::Solve { form, modulus } => {
            let (a, b, c) = usage(form::parse_form(&form))?;
            let (p, s) = usage(form::parse_prime_power(&modulus))?;
            let solved = if p == 2 {
                solve_binary_form_2adic(a, b, c, s)
            } else {
                solve_binary_form_odd(a, b, c, p, s)
            };
            let m = p.pow(s);
            match solved {
                Ok((x, y)) => {
                    println!("{}", canonical(json!({"a": a, "b": b, "c": c, "modulus": m, "x": x, "y": y})));
                    Ok(true)
                }
                Err(e) => {
                    eprintln!("{e}");
                    println!("{}", canonical(json!({"a": a, "b": b, "c": c, "modulus": m, "error": "NoSolution", "detail": e.to_string()})));
                    Ok(false)
                }
            }
        }
        Command::Census(r) => {
            let budget = usage(Budget::from_env())?;
            let params = usage(RingParams::new(r.n, r.a, r.b))?;
            let f = usage(census(params, &budget))?;
            println!("{}", canonical(f));
            Ok(true)
        }
        Command::Crosscheck { suite, budget, records } => {
            let suites = usage(Suite::parse(&suite).ok_or_else(|| anyhow::anyhow!("unknown suite {suite:?}")))?;
            let mut ranges = CrosscheckRanges::default();
            if let Some(b) = budget {
                ranges.triple_budget = b;
            }
            let out = Mutex::new(BufWriter::new(io::stdout()));
            let sink = |rec: &CheckRecord| {
                if records {
                    let mut v = serde_json::to_value(rec).expect("plain data");
                    v["kind"] = json!("record");
                    writeln!(out.lock().expect("stdout lock"), "{}", canonical(v)).expect("stdout");
                }
            };
            let summaries = crosscheck_solver(&suites, &ranges, &sink);
            let mut out = out.into_inner().expect("stdout lock");
            let (mut checked, mut mismatches) = (0, 0);
            for s in &summaries {
                let mut v: Value = serde_json::to_value(s).expect("plain data");
                v["kind"] = json!("summary");
                writeln!(out, "{}", canonical(v)).expect("stdout");
                checked += s.checked;
                mismatches += s.mismatches;
            }
            writeln!(out, "{}", canonical(json!({"kind": "total", "checked": checked, "mismatches": mismatches})))
                .expect("stdout");
            Ok(mismatches == 0)
        }
    }
}

fn report_failures(report: &quatring::classify::VerifyReport) {
    for f in &report.failures {
        let at = f.factor.as_deref().unwrap_or("witness");
        match f.relation {
            Some(r) => eprintln!("{at}: violated {r}"),
            None => eprintln!("{at}: {}", f.detail),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
