use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bijcorr::oracle::{worst_case_search, Bijection, BijectionProbe, SearchMode, EXHAUSTIVE_CAP};
use bijcorr::remainder::asymptotic_scan;
use bijcorr::report::{remainder_csv, spectrum_csv, RemainderSummary, SpectrumRecord};
use bijcorr::spectrum::spectrum_summary;
use bijcorr::tensor::{tensor_min_search, TensorInstance};
use bijcorr::verify::run_all;
use bijcorr::Error;
use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "bijcorr", version, about = "Half-space spectra, remainder terms and bijection probes on the hypercube")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Dimension of the cube.
    #[arg(long, global = true, conflicts_with = "n_range")]
    n: Option<usize>,

    /// Inclusive range `a:b:step` of dimensions.
    #[arg(long, global = true, value_parser = parse_range)]
    n_range: Option<NRange>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Random bijections for `probe --family random`, one probe per trial.
    #[arg(long, global = true)]
    trials: Option<usize>,

    #[arg(long, global = true)]
    restarts: Option<usize>,

    #[arg(long, global = true)]
    iters: Option<u64>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Keep the trivial eigenvalue in the tensor instance.
    #[arg(long, global = true)]
    include_lambda_empty: bool,

    /// Always include the permutation in probe output.
    #[arg(long, global = true)]
    emit_permutations: bool,

    #[arg(long, global = true, value_enum, default_value_t = ProbeFamily::Identity)]
    family: ProbeFamily,

    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Eigenvalue table per level.
    Spectrum,
    /// r_n scan.
    Remainder,
    /// Exact joint probability of one bijection.
    Probe,
    /// Worst-case bijection search.
    Search,
    /// Full invariant suite.
    Verify,
    /// Latin-square search on the cubic objective.
    Tensor,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ProbeFamily {
    Identity,
    Complement,
    CoordinatePermutation,
    Random,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Mode {
    Exhaustive,
    LocalSearch,
}

enum Failure {
    Verify(String),
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Integrity(_) => Failure::Verify(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
struct NRange(Vec<usize>);

fn parse_range(s: &str) -> Result<NRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let (a, b, step) = match nums[..] {
        [a, b] => (a, b, 1),
        [a, b, step] => (a, b, step),
        _ => return Err("expected a:b or a:b:step".into()),
    };
    if step == 0 || a > b {
        return Err("need a <= b and step >= 1".into());
    }
    Ok(NRange((a..=b).step_by(step).collect()))
}

impl Cli {
    fn n_values(&self, default: &[usize]) -> Vec<usize> {
        match (&self.n, &self.n_range) {
            (Some(n), _) => vec![*n],
            (None, Some(r)) => r.0.clone(),
            (None, None) => default.to_vec(),
        }
    }

    fn single_n(&self, default: usize) -> Result<usize, Failure> {
        match self.n_values(&[default])[..] {
            [n] => Ok(n),
            _ => Err(Failure::Usage("this subcommand takes a single --n".into())),
        }
    }

    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Failure::Usage(format!("--format {f:?} is not available here").to_lowercase()))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn spectrum(cli: &Cli) -> Result<(), Failure> {
    let format = cli.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let tables = cli
        .n_values(&[8])
        .into_iter()
        .map(spectrum_summary)
        .collect::<Result<Vec<_>, _>>()?;
    let text = match format {
        Format::Csv => spectrum_csv(&tables),
        Format::Json => to_json(&tables.iter().map(SpectrumRecord::from).collect::<Vec<_>>()),
    };
    write_to(cli.out.as_deref(), &text)
}

/// CSV goes to `--out`; the JSON summary goes next to it with a `.json`
/// extension.
fn remainder(cli: &Cli) -> Result<(), Failure> {
    let format = cli.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let default: Vec<usize> = (0..11).map(|k| 4usize << k).collect();
    let scan = asymptotic_scan(&cli.n_values(&default))?;
    let summary = to_json(&RemainderSummary::from(&scan));
    match format {
        Format::Json => write_to(cli.out.as_deref(), &summary),
        Format::Csv => {
            write_to(cli.out.as_deref(), &remainder_csv(&scan))?;
            if let Some(out) = &cli.out {
                let json = out.with_extension("json");
                if &json == out {
                    return Err(Failure::Usage("--out must not end in .json with --format csv".into()));
                }
                write_to(Some(&json), &summary)?;
            }
            Ok(())
        }
    }
}

fn probe(cli: &Cli) -> Result<(), Failure> {
    cli.format(Format::Json, &[Format::Json])?;
    let n = cli.single_n(2)?;
    let make = |seed: u64| -> Result<Bijection, Error> {
        match cli.family {
            ProbeFamily::Identity => Bijection::identity(n),
            ProbeFamily::Complement => Bijection::complement(n),
            ProbeFamily::CoordinatePermutation => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut coords: Vec<usize> = (0..n).collect();
                coords.shuffle(&mut rng);
                Bijection::isometry(n, &coords, rng.gen())
            }
            ProbeFamily::Random => Bijection::random(n, seed),
        }
    };
    let text = match (cli.family, cli.trials) {
        (ProbeFamily::Random, Some(trials)) => {
            let records = (0..trials as u64)
                .map(|k| {
                    let probe = BijectionProbe::new(make(cli.seed.wrapping_add(k))?)?;
                    Ok(probe.record(cli.emit_permutations))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            to_json(&records)
        }
        _ => to_json(&BijectionProbe::new(make(cli.seed)?)?.record(cli.emit_permutations)),
    };
    write_to(cli.out.as_deref(), &text)
}

fn search(cli: &Cli) -> Result<(), Failure> {
    cli.format(Format::Json, &[Format::Json])?;
    let n = cli.single_n(3)?;
    let mode = match cli.mode {
        Some(Mode::Exhaustive) => SearchMode::Exhaustive,
        Some(Mode::LocalSearch) => SearchMode::LocalSearch,
        None if n <= EXHAUSTIVE_CAP => SearchMode::Exhaustive,
        None => SearchMode::LocalSearch,
    };
    let probe = worst_case_search(n, mode, cli.seed, cli.iters.unwrap_or(1000))?;
    write_to(cli.out.as_deref(), &to_json(&probe.record(cli.emit_permutations)))
}

fn verify(cli: &Cli) -> Result<(), Failure> {
    let n_max = cli.single_n(10)?;
    let results = run_all(n_max, cli.seed)?;
    let text = match cli.format {
        Some(Format::Json) => to_json(&results),
        Some(Format::Csv) => return Err(Failure::Usage("verify prints text or json".into())),
        None => results
            .iter()
            .map(|r| format!("{} {}: {}\n", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail))
            .collect(),
    };
    write_to(cli.out.as_deref(), &text)?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(format!("failed checks: {}", failed.join(", "))))
    }
}

fn tensor(cli: &Cli) -> Result<(), Failure> {
    cli.format(Format::Json, &[Format::Json])?;
    let n = cli.single_n(3)?;
    let inst = TensorInstance::from_spectrum(&spectrum_summary(n)?, cli.include_lambda_empty)?;
    let result = tensor_min_search(&inst, cli.seed, cli.restarts.unwrap_or(4), cli.iters.unwrap_or(5000))?;
    write_to(cli.out.as_deref(), &to_json(&result))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Spectrum => spectrum(&cli),
        Command::Remainder => remainder(&cli),
        Command::Probe => probe(&cli),
        Command::Search => search(&cli),
        Command::Verify => verify(&cli),
        Command::Tensor => tensor(&cli),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("bijcorr: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("bijcorr: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("bijcorr: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
