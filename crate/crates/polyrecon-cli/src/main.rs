//! Command-line surface for the reconstruction library.
//!
//! Exit codes: 0 on success, 1 when a verification or reconstruction check
//! fails, 2 on unreadable or malformed input.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use polyrecon::codes::{self, Codebook, Family};
use polyrecon::oracle;
use polyrecon::poly::{self, BiPoly};
use polyrecon::reconstruct::{self, DegreeMode, ReconConfig, SearchStatus};
use polyrecon::strings::{compose, BitString, CompositionMultiset};
use polyrecon::FieldPolicy;

#[derive(Parser)]
#[command(name = "polyrecon", version, about = "Binary string reconstruction from substring composition multisets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    /// Smallest prime exceeding the string length.
    PaperMin,
    /// Smallest prime whose group order exceeds every solver exponent.
    Safe,
}

#[derive(Clone, Copy, ValueEnum)]
enum DegModeArg {
    /// Residual coefficient vector per step.
    Slice,
    /// Exact big-integer evaluation at base n+1.
    BaseB,
}

#[derive(Args)]
struct FieldArgs {
    /// Prime selection policy for the validity checks.
    #[arg(long, value_enum, default_value = "safe")]
    field_policy: PolicyArg,
    /// Explicit field prime (validated; must exceed the string length).
    #[arg(long)]
    field_prime: Option<u64>,
    /// Residual degree extraction mode.
    #[arg(long, value_enum, default_value = "slice")]
    deg_mode: DegModeArg,
}

impl FieldArgs {
    fn recon_config(&self, first_only: bool, trace: bool) -> ReconConfig {
        ReconConfig {
            field_policy: match self.field_policy {
                PolicyArg::PaperMin => FieldPolicy::PaperMin,
                PolicyArg::Safe => FieldPolicy::Safe,
            },
            field_prime: self.field_prime,
            degree_mode: match self.deg_mode {
                DegModeArg::Slice => DegreeMode::SliceVec,
                DegModeArg::BaseB => DegreeMode::BaseB,
            },
            first_only,
            trace,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the composition multiset of a string in the text format.
    Compose {
        /// Binary string, e.g. 1001.
        #[arg(long)]
        string: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the product polynomial F = P·P*, from a string or a multiset.
    Fpoly {
        #[arg(long, conflicts_with = "input")]
        string: Option<String>,
        /// Multiset file in the text format.
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover all strings (start 1, end 0) with the given multiset.
    Reconstruct {
        /// Multiset file in the text format.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Enumerate every matching string (default).
        #[arg(long, conflicts_with = "first")]
        all: bool,
        /// Stop at the first recovered string.
        #[arg(long)]
        first: bool,
        /// Log each solver step to stderr: `j a_j a_{d-j} [pause] [backtrack]`.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Generate a codebook, one word per line, sorted.
    GenCode {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a codebook: structure, distinct multisets, backtrack-free decoding.
    VerifyCode {
        /// Codebook file (one word per line); omit to generate the family.
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        /// Family to generate or to check structure against.
        #[arg(long)]
        family: Option<Family>,
        #[arg(long)]
        n: usize,
    },
    /// Brute-force ground truth for small lengths.
    Oracle {
        #[arg(long)]
        n: usize,
        /// Print all strings sharing this string's multiset (restricted to
        /// the start-1/end-0 class).
        #[arg(long, conflicts_with = "input")]
        string: Option<String>,
        /// Same, for a multiset file.
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
    },
    /// Time reconstruction over sampled backtracking-free codewords and
    /// emit CSV: n,median_ms,p95_ms,backtracks.
    Bench {
        /// Comma-separated length ladder.
        #[arg(long, default_value = "256,512,1024,2048", value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Codewords sampled per rung.
        #[arg(long, default_value_t = 9)]
        samples: usize,
        /// Seed for the codeword sampler.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        field: FieldArgs,
    },
}

/// Failures mapped to exit codes: input problems exit 2, check failures exit 1.
enum CliError {
    Input(String),
    Check(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> CliError {
        CliError::Input(e.to_string())
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
    }
}

fn parse_bits(s: &str) -> Result<BitString, CliError> {
    s.parse::<BitString>().map_err(CliError::input)
}

fn load_multiset(path: &PathBuf) -> Result<CompositionMultiset, CliError> {
    CompositionMultiset::from_text(&read_file(path)?).map_err(CliError::input)
}

fn product_of_multiset(m: &CompositionMultiset) -> Result<BiPoly, CliError> {
    poly::product_from_multiset(&poly::poly_of_multiset(m), m.n()).map_err(CliError::input)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compose { string, out } => {
            let s = parse_bits(&string)?;
            write_out(&out, &compose(&s).to_text())
        }
        Command::Fpoly { string, input, out } => {
            let f = match (string, input) {
                (Some(s), None) => poly::product_poly(&parse_bits(&s)?),
                (None, Some(path)) => product_of_multiset(&load_multiset(&path)?)?,
                _ => return Err(CliError::Input("pass exactly one of --string / --in".into())),
            };
            write_out(&out, &f.to_text())
        }
        Command::Reconstruct {
            input,
            all: _,
            first,
            trace,
            field,
        } => {
            let m = load_multiset(&input)?;
            let f = product_of_multiset(&m)?;
            let cfg = field.recon_config(first, trace);
            let report = reconstruct::reconstruct(&f, &cfg).map_err(CliError::input)?;
            for event in &report.trace {
                eprintln!(
                    "{} {} {}{}{}",
                    event.step,
                    event.low_gap,
                    event.high_gap,
                    if event.pause { " pause" } else { "" },
                    if event.backtrack { " backtrack" } else { "" },
                );
            }
            let mut strings = report.strings();
            strings.sort();
            for s in &strings {
                println!("{s}");
            }
            if report.status == SearchStatus::Exhausted {
                return Err(CliError::Check(
                    "exhausted: multiset has no preimage starting 1 and ending 0".into(),
                ));
            }
            Ok(())
        }
        Command::GenCode { family, n, out } => {
            let cb = codes::generate(family, n).map_err(CliError::input)?;
            write_out(&out, &cb.to_lines())
        }
        Command::VerifyCode { input, family, n } => {
            if n > 63 {
                return Err(CliError::Input(format!(
                    "verify-code supports n <= 63, got {n}"
                )));
            }
            let (cb, check_structure) = match (&input, family) {
                (Some(path), fam) => {
                    let mut words = Vec::new();
                    for (idx, line) in read_file(path)?.lines().enumerate() {
                        let line = line.trim();
                        if line.is_empty() {
                            continue;
                        }
                        let w = parse_bits(line)?;
                        if w.len() != n {
                            return Err(CliError::Input(format!(
                                "line {}: word length {} != {n}",
                                idx + 1,
                                w.len()
                            )));
                        }
                        words.push(w.pack());
                    }
                    (
                        Codebook::from_packed(n, fam.unwrap_or(Family::T), words),
                        fam.is_some(),
                    )
                }
                (None, Some(fam)) => (codes::generate(fam, n).map_err(CliError::input)?, true),
                (None, None) => {
                    return Err(CliError::Input("pass --in and/or --family".into()))
                }
            };
            let report = codes::verify_codebook_with(&cb, check_structure);
            let mut summary = String::new();
            let _ = writeln!(
                summary,
                "family={} n={n} words={}",
                cb.family(),
                report.word_count
            );
            let _ = writeln!(summary, "structure: {}", if !check_structure { "skipped" } else if report.structural_ok { "ok" } else { "FAIL" });
            let _ = writeln!(summary, "distinct multisets: {}", if report.distinct_multisets { "ok" } else { "FAIL" });
            let _ = writeln!(summary, "decodes to self: {}", if report.decodes_to_self { "ok" } else { "FAIL" });
            let _ = writeln!(summary, "zero backtracks: {}", if report.zero_backtracks { "ok" } else { "FAIL" });
            let _ = writeln!(summary, "type-2 pauses: {}", if report.no_type2_pauses { "none" } else { "FOUND" });
            let _ = writeln!(summary, "unique decodes: {}", if report.unique_decodes { "yes" } else { "no" });
            for v in &report.violations {
                let _ = writeln!(summary, "  violation: {v}");
            }
            let mut pass = report.pass();
            let mut size_note = String::new();
            if cb.family() == Family::T && input.is_none() {
                let sr = codes::gen_sr(n).map_err(CliError::input)?;
                let ok = 40 * cb.len() as u128 >= 41 * sr.len() as u128;
                pass = pass && ok;
                size_note = format!(
                    ", |T|={} {} 41/40*|S_R| (|S_R|={})",
                    cb.len(),
                    if ok { ">=" } else { "<" },
                    sr.len()
                );
            }
            print!("{summary}");
            if pass {
                println!(
                    "PASS: 0 backtracks, {} words{size_note}",
                    report.word_count
                );
                Ok(())
            } else {
                Err(CliError::Check(format!("verification failed{size_note}")))
            }
        }
        Command::Oracle { n, string, input } => {
            let table = oracle::build_classes(n).map_err(CliError::input)?;
            let multiset = match (string, input) {
                (Some(s), None) => {
                    let s = parse_bits(&s)?;
                    if s.len() != n {
                        return Err(CliError::Input(format!(
                            "string length {} != --n {n}",
                            s.len()
                        )));
                    }
                    Some(compose(&s))
                }
                (None, Some(path)) => Some(load_multiset(&path)?),
                (None, None) => None,
                _ => unreachable!("clap conflicts_with"),
            };
            match multiset {
                None => {
                    println!("n={n} strings={} classes={}", 1u64 << n, table.num_classes());
                    Ok(())
                }
                Some(m) => {
                    let members = table.reconstruct_by_lookup(&m).map_err(CliError::input)?;
                    for s in members {
                        println!("{s}");
                    }
                    Ok(())
                }
            }
        }
        Command::Bench {
            sizes,
            samples,
            seed,
            field,
        } => {
            let cfg = field.recon_config(false, false);
            println!("n,median_ms,p95_ms,backtracks");
            for &n in &sizes {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
                let mut times_ms: Vec<f64> = Vec::with_capacity(samples);
                let mut backtracks = 0u64;
                for i in 0..samples.max(1) {
                    let w = codes::sample_p(n, &mut rng);
                    let f = poly::product_poly(&w);
                    // Warm up the first rung sample without recording it.
                    let runs = if i == 0 { 2 } else { 1 };
                    for r in 0..runs {
                        let start = Instant::now();
                        let report = reconstruct::reconstruct(&f, &cfg).map_err(CliError::input)?;
                        let elapsed = start.elapsed().as_secs_f64() * 1e3;
                        if r + 1 == runs {
                            times_ms.push(elapsed);
                            backtracks += report.backtracks;
                        }
                        if report.strings() != vec![w.clone()] {
                            return Err(CliError::Check(format!(
                                "sampled codeword at n={n} failed to decode to itself"
                            )));
                        }
                    }
                }
                times_ms.sort_by(|a, b| a.total_cmp(b));
                let median = times_ms[times_ms.len() / 2];
                let p95 = times_ms[((times_ms.len() * 95).div_ceil(100)).saturating_sub(1)];
                println!("{n},{median:.3},{p95:.3},{backtracks}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
