//! Command-line front end. Exit codes: 0 success, 1 input error, 2 budget refusal.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ffpl::blocklu::{block_lu, correlated_pair, is_sharp, to_omega_rep, DEFAULT_DET_PRECISION};
use ffpl::enumerate::{for_each_primitive, EnumSpec, Shard, DEFAULT_BUDGET};
use ffpl::harness::{
    emit_report, run_counting, run_detclass, run_triple, ExperimentParams, ReportFormat,
    DEFAULT_GRASS_PRECISION,
};
use ffpl::io::{block_lu_json, correlated_pair_json, lattice_json, matr_json, write_jsonl};
use ffpl::latmod::{orthogonal_lattice, PartialLattice};
use ffpl::measures::constants_bundle;
use ffpl::scalars::text::{parse_matrix, parse_poly, parse_poly_matrix};
use ffpl::scalars::{Fq, IdealR};
use ffpl::shapes::{shape_of_full, shape_of_partial};
use ffpl::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "ffpl",
    version,
    about = "Primitive lattices over F_q[Y]: constants, enumeration, experiments"
)]
#[command(args_override_self = true)]
struct Cli {
    /// Key-value file (`key = value` per line, `#` comments) supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print every arithmetic constant as a flat JSON object of exact fractions.
    Constants {
        #[arg(long)]
        q: u32,
        #[arg(long = "D")]
        big_d: usize,
        #[arg(long)]
        d: usize,
        /// Ideal generator as a coefficient list, e.g. `[0,1]` for (Y).
        #[arg(long)]
        ideal: Option<String>,
    },
    /// Stream the primitive lattices of a given covolume as JSONL.
    Enumerate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        exp: i64,
        /// Shard `k/n`.
        #[arg(long)]
        shard: Option<String>,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: EnumFormat,
        /// Enumerate rank-1 lattices in the dual and take orthogonals (d = D-1).
        #[arg(long)]
        dualize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Block LU decomposition of a determinant-1 matrix, or of the canonical
    /// representative of a lattice given by a D x d basis.
    Lu {
        /// Matrix literal, e.g. `q=2; [[[0,1],[1]],[[1],[]]]`.
        #[arg(long)]
        matrix: String,
        /// Size of the upper-left block (square input only).
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_DET_PRECISION)]
        precision: i64,
    },
    /// Shape of a primitive lattice (D x d basis) or of `Y^{-m} A R^k` (square, with --m).
    Shape {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        m: Option<i64>,
    },
    /// Orthogonal lattice of a primitive lattice given by a basis.
    Orth {
        #[arg(long)]
        matrix: String,
    },
    /// Counting experiments.
    Experiment {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 1)]
        imax: u32,
        /// Cell precision (triple) or determinant jet precision (detclass).
        #[arg(long, default_value_t = DEFAULT_GRASS_PRECISION)]
        precision: i64,
        #[arg(long, default_value_t = 1)]
        shards: u64,
        /// Output stem; writes `<out>.csv` and/or `<out>.json`. Without it the JSON goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "both")]
        format: OutFormat,
    },
}

#[derive(Args, Debug)]
struct SpecArgs {
    #[arg(long)]
    q: u32,
    #[arg(long = "D")]
    big_d: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    ideal: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EnumFormat {
    Jsonl,
    Count,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OutFormat {
    Csv,
    Json,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Counting,
    Triple,
    Detclass,
}

fn parse_ideal(q: u32, src: Option<&str>) -> Result<IdealR> {
    let f = Fq::new(q)?;
    match src {
        None => Ok(IdealR::unit(f)),
        Some(s) => IdealR::new(parse_poly(&format!("q={q}; {s}"))?),
    }
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?
    )?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Constants { q, big_d, d, ideal } => {
            if d == 0 || d >= big_d {
                return Err(Error::Invalid("need 1 <= d < D".into()));
            }
            let ideal = parse_ideal(q, ideal.as_deref())?;
            print_json(&constants_bundle(d as u32, (big_d - d) as u32, &ideal)?.to_json())?;
        }
        Cmd::Enumerate {
            spec,
            exp,
            shard,
            format,
            dualize,
            out,
        } => {
            let e = EnumSpec {
                q: spec.q,
                big_d: spec.big_d,
                d: spec.d,
                covol_exp: exp,
                ideal: parse_ideal(spec.q, spec.ideal.as_deref())?,
                dualize,
            };
            let shard = match shard {
                Some(s) => s.parse::<Shard>()?,
                None => Shard::ALL,
            };
            let mut w = writer(&out)?;
            let mut io_err = None;
            let count = for_each_primitive(&e, shard, spec.budget, |l| {
                if matches!(format, EnumFormat::Jsonl) && io_err.is_none() {
                    if let Err(err) = writeln!(w, "{}", lattice_json(&l)) {
                        io_err = Some(err);
                    }
                }
            })?;
            if let Some(err) = io_err {
                return Err(err.into());
            }
            if matches!(format, EnumFormat::Count) {
                writeln!(w, "{count}")?;
            }
            w.flush()?;
        }
        Cmd::Lu {
            matrix,
            d,
            precision,
        } => {
            let m = parse_matrix(&matrix)?;
            if m.is_square() {
                let d =
                    d.ok_or_else(|| Error::Invalid("--d is required for a square matrix".into()))?;
                let lu = block_lu(&m, d)?;
                let mut v = block_lu_json(&lu);
                v["reassembles"] = json!(lu.reassemble() == m);
                print_json(&v)?;
            } else {
                let b = m
                    .to_r()
                    .ok_or_else(|| Error::Parse("basis entries must be polynomials".into()))?;
                let l = PartialLattice::new(&b)?;
                let (g, lu) = to_omega_rep(&l)?;
                let pair = correlated_pair(&l, precision)?;
                print_json(&json!({
                    "lattice": lattice_json(&l),
                    "g": matr_json(&g),
                    "block_lu": block_lu_json(&lu),
                    "correlated_pair": correlated_pair_json(&pair),
                }))?;
            }
        }
        Cmd::Shape { matrix, m } => {
            let a = parse_poly_matrix(&matrix)?;
            let v = match m {
                Some(m) => json!({ "shape": shape_of_full(m, &a)?.to_string() }),
                None => {
                    let l = PartialLattice::new(&a)?;
                    json!({ "lattice": lattice_json(&l), "sharp": is_sharp(&l), "shape": shape_of_partial(&l)?.to_string() })
                }
            };
            print_json(&v)?;
        }
        Cmd::Orth { matrix } => {
            let l = PartialLattice::new(&parse_poly_matrix(&matrix)?)?;
            let o = orthogonal_lattice(&l)?;
            write_jsonl(io::stdout().lock(), [lattice_json(&o)])?;
        }
        Cmd::Experiment {
            kind,
            spec,
            imax,
            precision,
            shards,
            out,
            format,
        } => {
            let mut p = ExperimentParams::new(spec.q, spec.big_d, spec.d, imax)?;
            p.ideal = parse_ideal(spec.q, spec.ideal.as_deref())?;
            p.precision = precision;
            p.shards = shards;
            p.budget = spec.budget;
            let r = match kind {
                Kind::Counting => run_counting(&p)?,
                Kind::Triple => run_triple(&p)?,
                Kind::Detclass => run_detclass(&p)?,
            };
            match out {
                Some(stem) => {
                    let fmt = match format {
                        OutFormat::Csv => ReportFormat::Csv,
                        OutFormat::Json => ReportFormat::Json,
                        OutFormat::Both => ReportFormat::Both,
                    };
                    for path in emit_report(&r, fmt, &stem)? {
                        eprintln!("wrote {}", path.display());
                    }
                }
                None => match format {
                    OutFormat::Csv => print!("{}", r.to_csv()),
                    _ => print_json(&r.to_json())?,
                },
            }
            if r.partial {
                for n in &r.notes {
                    eprintln!("{n}");
                }
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Append `--key=value` for every config entry whose flag is absent from argv.
fn with_config(mut argv: Vec<String>) -> Result<Vec<String>> {
    let pos = argv
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(argv) };
    let path = match argv[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => argv
            .get(pos + 1)
            .cloned()
            .ok_or_else(|| Error::Parse("--config needs a path".into()))?,
    };
    let text = std::fs::read_to_string(&path)?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{path}:{}: expected key = value", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k == "config" {
            continue;
        }
        let flag = format!("--{k}");
        if argv
            .iter()
            .any(|a| a == &flag || a.starts_with(&format!("{flag}=")))
        {
            continue;
        }
        if v.eq_ignore_ascii_case("true") {
            extra.push(flag);
        } else if !v.eq_ignore_ascii_case("false") {
            extra.push(format!("{flag}={v}"));
        }
    }
    argv.extend(extra);
    Ok(argv)
}

fn main() -> ExitCode {
    let argv = match with_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Error::Budget { needed, budget }) => {
            eprintln!("error: enumeration needs {needed} nodes, budget is {budget}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
