//! Command-line front end: argument parsing, file I/O and report output.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::containment::find_embedding_with_budget;
use crate::division::{count_divisions_of, find_full_division, DEFAULT_DIVISION_CAP};
use crate::error::{Error, Result};
use crate::extremal::{
    alpha, count_avoiders, doubling_map_check, extremal_division, f_exact, klazar_check, latin_count,
    latin_count_avoiders, log2_approx, recursion_coefficient, sunflower_reduction_check, AlphaTable, SearchOptions,
    DEFAULT_SEARCH_BUDGET,
};
use crate::pattern::{classify, Pattern};
use crate::shadow::{cascade_representation, corollary_entry_bound, face_counts, shadow_upper_bound};
use crate::tensor::{BitTensor, CAP_ENV_VAR, DEFAULT_CAP_CELLS};
use crate::verify::{run_groups, Mutation, SuiteConfig, DEFAULT_SEED, GROUPS};

#[derive(Parser, Debug)]
#[command(name = "tensor-extremal", version, about = "Pattern avoidance in t-dimensional 0-1 matrices")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for searches and sweeps.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..), global = true)]
    pub threads: u16,
    /// Largest number of cells enumerated or searched exhaustively.
    #[arg(long, env = CAP_ENV_VAR, default_value_t = DEFAULT_CAP_CELLS, global = true)]
    pub cap_cells: usize,
    /// Node budget for branch and bound and containment search.
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    pub budget: u64,
    /// Seed for randomized property sweeps.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a t-pattern and report its classes.
    Classify {
        #[arg(short, long, visible_alias = "matrix")]
        input: PathBuf,
    },
    /// Search for a copy of a pattern in a matrix.
    Contains {
        #[arg(short, long, visible_alias = "matrix")]
        input: PathBuf,
        #[arg(short, long)]
        pattern: PathBuf,
    },
    /// Count k x ... x k divisions and optionally find a full one.
    Divisions {
        #[arg(short, long, visible_alias = "matrix")]
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long)]
        find_full: bool,
    },
    /// Face counts and entry bound of a matrix, or a cascade representation.
    Shadow {
        #[arg(short, long, visible_alias = "matrix", required_unless_present = "cascade", conflicts_with = "cascade")]
        input: Option<PathBuf>,
        /// Represent M at level K with T colours and bound the next level.
        #[arg(long, num_args = 3, value_names = ["M", "K", "T"])]
        cascade: Option<Vec<u64>>,
    },
    /// Exact f_t(n, P) by branch and bound, or the most ones without a full
    /// k-division when no pattern is given.
    Extremal {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(short, long, required_unless_present = "k")]
        pattern: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        t: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), requires = "t")]
        k: Option<u64>,
    },
    /// Number of n x ... x n matrices avoiding a pattern.
    Count {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(short, long)]
        pattern: PathBuf,
    },
    /// Both sides of |T(2n)| <= |T(n)| (2^(2^t)-1)^f(n).
    Klazar {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(short, long)]
        pattern: PathBuf,
        /// Also check the block-contraction map avoider by avoider.
        #[arg(long)]
        map: bool,
    },
    /// The constant alpha_t(k).
    Alpha {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        t: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        k: u64,
    },
    /// Count Latin matrices of order n, optionally only those avoiding a pattern.
    Latin {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        t: u64,
        #[arg(short, long)]
        pattern: Option<PathBuf>,
        /// Enumerate orders beyond the default reach table.
        #[arg(long)]
        beyond_reach: bool,
    },
    /// Compare f_t(n, P) with n f_(t-1)(n, P') for a sunflower pattern.
    Reduction {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(short, long)]
        pattern: PathBuf,
        /// Core axis to slice along (zero-based).
        #[arg(long)]
        axis: Option<usize>,
    },
    /// Run the property suite.
    VerifySuite {
        /// Smaller random sweeps.
        #[arg(long)]
        quick: bool,
        /// Run only these groups (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Directory for counterexample tensor files.
        #[arg(long, default_value = "counterexamples")]
        counterexample_dir: PathBuf,
        #[arg(long, value_enum, hide = true)]
        mutate: Option<MutationArg>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MutationArg {
    FlipShadowBound,
}

/// Parses `args`, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_tensor(path: &Path) -> Result<BitTensor> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    BitTensor::from_json_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn read_pattern(path: &Path) -> Result<Pattern> {
    Pattern::new(read_tensor(path)?)
}

fn search_options(common: &Common) -> SearchOptions {
    SearchOptions {
        budget: common.budget,
        threads: common.threads as usize,
        cap_cells: common.cap_cells,
    }
}

/// Big integers as JSON numbers when they fit, strings otherwise.
fn big(v: &BigUint) -> Value {
    match v.to_u64() {
        Some(small) => json!(small),
        None => json!(v.to_string()),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn as_usize(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::arg(format!("{v} is too large")))
}

pub fn dispatch(cli: &Cli) -> Result<i32> {
    let common = &cli.common;
    if common.cap_cells > DEFAULT_CAP_CELLS {
        eprintln!(
            "warning: enumeration cap raised to {} cells (default {DEFAULT_CAP_CELLS}); runs may take very long",
            common.cap_cells
        );
    }
    let opts = search_options(common);
    let mut status = 0;
    let report: Value = match &cli.command {
        Command::Classify { input } => to_value(&classify(&read_tensor(input)?)),
        Command::Contains { input, pattern } => {
            let host = read_tensor(input)?;
            let p = read_pattern(pattern)?;
            let r = find_embedding_with_budget(&host, &p, common.budget)?;
            json!({
                "contains": r.embedding.is_some(),
                "witness": r.embedding.map(|e| e.selections),
                "nodes": r.nodes,
            })
        }
        Command::Divisions { input, k, find_full } => {
            let m = read_tensor(input)?;
            let k = as_usize(*k)?;
            let count = count_divisions_of(m.shape(), k);
            let (full_found, division) = if *find_full {
                let d = find_full_division(&m, k, DEFAULT_DIVISION_CAP)?;
                (Some(d.is_some()), d.map(|d| d.cuts().to_vec()))
            } else {
                (None, None)
            };
            json!({ "count": big(&count), "full_found": full_found, "division": division })
        }
        Command::Shadow { input, cascade } => match (input, cascade) {
            (Some(path), _) => {
                let m = read_tensor(path)?;
                let fc = face_counts(&m)?;
                let corollary = if m.t() >= 3 {
                    Some(corollary_entry_bound(&m)?.holds)
                } else {
                    None
                };
                json!({ "face_counts": fc.counts, "corollary_holds": corollary })
            }
            (None, Some(v)) => {
                let rep = cascade_representation(v[0], as_usize(v[1])?, as_usize(v[2])?)?;
                json!({ "terms": rep.terms, "bound": big(&shadow_upper_bound(&rep)) })
            }
            (None, None) => return Err(Error::arg("give --matrix or --cascade")),
        },
        Command::Extremal { n, pattern, t, k } => {
            let n = as_usize(*n)?;
            match pattern {
                Some(path) => {
                    let p = read_pattern(path)?;
                    let t = t.map_or(Ok(p.t()), as_usize)?;
                    to_value(&f_exact(n, &p, t, &opts)?)
                }
                None => {
                    let t = as_usize(t.expect("required by clap"))?;
                    let k = as_usize(k.expect("required by clap"))?;
                    to_value(&extremal_division(n, k, t, common.cap_cells)?)
                }
            }
        }
        Command::Count { n, pattern } => {
            let p = read_pattern(pattern)?;
            let n = as_usize(*n)?;
            json!({ "n": n, "t": p.t(), "count": count_avoiders(n, &p, p.t(), &opts)? })
        }
        Command::Klazar { n, pattern, map } => {
            let p = read_pattern(pattern)?;
            let n = as_usize(*n)?;
            let mut v = to_value(&klazar_check(n, &p, p.t(), &opts)?);
            if *map {
                let m = doubling_map_check(n, &p, p.t(), &opts)?;
                v["map_holds"] = json!(m.holds());
                v["map"] = to_value(&m);
            }
            v
        }
        Command::Alpha { t, k } => {
            let (t, k) = (as_usize(*t)?, as_usize(*k)?);
            let a = alpha(t, k)?;
            let exact = if a.is_integer() {
                match a.to_integer().to_u64() {
                    Some(small) => json!(small),
                    None => json!(a.to_integer().to_string()),
                }
            } else {
                json!(a.to_string())
            };
            let mut v = json!({ "t": t, "k": k, "alpha": exact, "log2": log2_approx(&a) });
            if t >= 3 {
                v["recursion"] = to_value(&recursion_coefficient(&mut AlphaTable::default(), t, k, None)?);
            }
            v
        }
        Command::Latin { n, t, pattern, beyond_reach } => {
            let (n, t) = (as_usize(*n)?, as_usize(*t)?);
            let count = latin_count(n, t, *beyond_reach)?;
            let avoiders = match pattern {
                Some(path) => Some(latin_count_avoiders(n, t, &read_pattern(path)?, *beyond_reach)?),
                None => None,
            };
            json!({ "n": n, "t": t, "count": count, "avoiders": avoiders })
        }
        Command::Reduction { n, pattern, axis } => {
            let p = read_pattern(pattern)?;
            to_value(&sunflower_reduction_check(as_usize(*n)?, &p, *axis, &opts)?)
        }
        Command::VerifySuite {
            quick,
            only,
            counterexample_dir,
            mutate,
        } => {
            for g in only {
                if !GROUPS.iter().any(|(name, _)| name == g) {
                    let known: Vec<&str> = GROUPS.iter().map(|(name, _)| *name).collect();
                    return Err(Error::arg(format!("unknown group `{g}`; known: {}", known.join(", "))));
                }
            }
            let mut config = SuiteConfig {
                seed: common.seed,
                threads: common.threads as usize,
                mutation: mutate.map(|MutationArg::FlipShadowBound| Mutation::FlipShadowBound),
                ..SuiteConfig::default()
            };
            if *quick {
                config.random_pairs = 1_000;
                config.random_tensors = 1_000;
                config.instances = 100;
            }
            let names: Vec<&str> = only.iter().map(String::as_str).collect();
            let report = run_groups(config, (!names.is_empty()).then_some(names.as_slice()))?;
            let mut v = to_value(&report);
            if !report.passed {
                status = 1;
                let files = write_counterexamples(counterexample_dir, &report)?;
                v["counterexample_files"] = json!(files);
            }
            if common.format == Format::Csv {
                v = to_value(&report.properties);
            }
            v
        }
    };
    emit(common, &report)?;
    Ok(status)
}

fn write_counterexamples(dir: &Path, report: &crate::verify::SuiteReport) -> Result<Vec<String>> {
    let mut files = Vec::new();
    for (i, p) in report.properties.iter().enumerate() {
        let Some(c) = &p.counterexample else { continue };
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        for (name, tensor) in &c.tensors {
            let slug: String = p
                .name
                .chars()
                .map(|ch| if ch.is_ascii_alphanumeric() { ch.to_ascii_lowercase() } else { '-' })
                .collect();
            let path = dir.join(format!("{i:02}-{slug}-{name}.json"));
            fs::write(&path, tensor.to_json_string() + "\n")
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            files.push(path.display().to_string());
        }
    }
    Ok(files)
}

fn emit(common: &Common, report: &Value) -> Result<()> {
    let text = match common.format {
        Format::Json => serde_json::to_string_pretty(report).expect("values serialize") + "\n",
        Format::Csv => to_csv(report)?,
    };
    match &common.output {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Objects become one row, arrays of objects one row each; nested values
/// are written as JSON text.
fn to_csv(report: &Value) -> Result<String> {
    let rows: Vec<&serde_json::Map<String, Value>> = match report {
        Value::Object(map) => vec![map],
        Value::Array(items) => items.iter().filter_map(Value::as_object).collect(),
        _ => Vec::new(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = rows.first() {
        let header: Vec<&String> = first.keys().collect();
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(header.iter().map(|k| k.as_str())).map_err(csv_err)?;
        for row in &rows {
            w.write_record(header.iter().map(|k| cell(row.get(*k).unwrap_or(&Value::Null))))
                .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
