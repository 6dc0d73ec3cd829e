mod config;
mod verify;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chromalg::algebra::{structure_constants, CONVENTION};
use chromalg::genset::{evaluate_cached, Decomposer, GeneratorExpression};
use chromalg::ncpartition::{enumerate_basis_capped, riordan};
use chromalg::rewrite::Normalizer;
use chromalg::{AlgebraElement, Diagram, Error, Partition, ProductCache, RationalFunction};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use config::{Config, Overrides};

#[derive(Parser)]
#[command(name = "chromalg", version, about = "Exact computations in chromatic algebras")]
struct Cli {
    /// TOML file with cap, parallelism, seed, trace and output settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for the randomized verification suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for table generation and verification.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    /// Write the rewrite trace of `normalize` to stderr.
    #[arg(long, global = true)]
    trace: bool,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension of C_n, checked against explicit enumeration below the cap.
    Dim { n: usize },
    /// Basis partitions of order n, one JSON object per line.
    Basis { n: usize },
    /// Normal form of a diagram file.
    Normalize { file: PathBuf },
    /// Product of two element files, the first on top.
    Mul {
        a: PathBuf,
        b: PathBuf,
        /// Expected order of both factors.
        #[arg(short)]
        n: Option<usize>,
    },
    /// Full structure-constant table of order n.
    Table { n: usize },
    /// Generator expression of a partition or element file.
    Decompose {
        #[arg(required_unless_present = "all")]
        input: Option<PathBuf>,
        /// Decompose every basis element of this order instead.
        #[arg(long, conflicts_with = "input")]
        all: Option<usize>,
        /// Evaluate the expression back and compare.
        #[arg(long)]
        verify: bool,
    },
    /// Run the verification suites for order n.
    Verify { n: usize },
}

enum Failure {
    /// Exit code 2.
    Cap(String),
    /// Exit code 1.
    Other(String),
    /// The reader went away; exit quietly.
    BrokenPipe,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            Failure::BrokenPipe
        } else {
            Failure::Other(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn line(out: &mut dyn Write, v: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    out.write_all(b"\n")
}

fn cap_check(n: usize, cap: usize, what: &str) -> Outcome {
    if n > cap {
        return Err(Failure::Cap(format!("order {n} exceeds the {what} cap {cap}")));
    }
    Ok(())
}

/// A JSON number when it fits in `u64`, otherwise the decimal string.
fn decimal_to_json(s: &str) -> Value {
    s.parse::<u64>().map(Value::from).unwrap_or_else(|_| Value::from(s))
}

fn cmd_dim(n: usize, cfg: &Config, out: &mut dyn Write) -> Outcome {
    if n == 0 {
        return Err(Failure::Other("order must be at least 1".into()));
    }
    let dim = riordan(2 * n)?.to_string();
    let mut report = json!({ "n": n, "dimension": decimal_to_json(&dim) });
    if n <= cfg.max_enumeration_order {
        let count = enumerate_basis_capped(n, cfg.max_enumeration_order)?.len();
        let pass = count.to_string() == dim;
        report["enumerated"] = json!(count);
        report["check"] = json!(if pass { "PASS" } else { "FAIL" });
        line(out, &report)?;
        if !pass {
            return Err(Failure::Other(format!("enumeration gives {count}, recurrence {dim}")));
        }
    } else {
        report["note"] = json!(format!("order exceeds enumeration cap {}; recurrence only", cfg.max_enumeration_order));
        line(out, &report)?;
    }
    Ok(())
}

fn cmd_basis(n: usize, cfg: &Config, out: &mut dyn Write) -> Outcome {
    cap_check(n, cfg.max_enumeration_order, "enumeration")?;
    let basis = enumerate_basis_capped(n, cfg.max_enumeration_order)?;
    for p in &basis {
        line(out, p)?;
    }
    line(out, &json!({ "count": basis.len() }))?;
    Ok(())
}

fn cmd_normalize(file: &Path, cfg: &Config, out: &mut dyn Write) -> Outcome {
    let d: Diagram = read_json(file)?;
    let mut normalizer = if cfg.trace { Normalizer::canonical().with_trace() } else { Normalizer::canonical() };
    let nf = normalizer.normalize(&d)?;
    if cfg.trace {
        let stderr = &mut io::stderr().lock();
        for step in normalizer.take_trace() {
            line(stderr, &step)?;
        }
    }
    line(out, &nf)?;
    Ok(())
}

fn cmd_mul(a: &Path, b: &Path, n: Option<usize>, out: &mut dyn Write) -> Outcome {
    let x: AlgebraElement = read_json(a)?;
    let y: AlgebraElement = read_json(b)?;
    if let Some(n) = n {
        for e in [&x, &y] {
            if e.order() != n {
                return Err(Error::OrderMismatch(n, e.order()).into());
            }
        }
    }
    line(out, &x.mul(&y)?)?;
    Ok(())
}

#[derive(Serialize)]
struct TableTerm<'a> {
    blocks: &'a [Vec<usize>],
    coeff: &'a RationalFunction,
}

#[derive(Serialize)]
struct TableRow<'a> {
    left: &'a [Vec<usize>],
    right: &'a [Vec<usize>],
    terms: Vec<TableTerm<'a>>,
}

/// Table body: one row per ordered basis pair.
fn table_body(n: usize, cfg: &Config) -> Result<(Vec<u8>, usize, usize, usize), Failure> {
    cap_check(n, cfg.max_table_order, "table")?;
    let table = structure_constants(n, cfg.max_table_order, cfg.parallelism)?;
    let basis = table.basis();
    let mut body = Vec::new();
    for (i, p) in basis.iter().enumerate() {
        for (j, q) in basis.iter().enumerate() {
            let terms = table.product(i, j).terms().iter().map(|(r, c)| TableTerm { blocks: r.blocks(), coeff: c }).collect();
            line(&mut body, &TableRow { left: p.blocks(), right: q.blocks(), terms })?;
        }
    }
    Ok((body, basis.len(), basis.len() * basis.len(), table.triples().count()))
}

fn cmd_table(n: usize, cfg: &Config, out: &mut dyn Write) -> Outcome {
    let (body, size, rows, triples) = table_body(n, cfg)?;
    let digest = Sha256::digest(&body);
    line(
        out,
        &json!({
            "convention": CONVENTION,
            "n": n,
            "basis_size": size,
            "rows": rows,
            "nonzero_triples": triples,
            "sha256": format!("{digest:x}"),
            "version": env!("CARGO_PKG_VERSION"),
        }),
    )?;
    out.write_all(&body)?;
    Ok(())
}

fn cmd_decompose(input: Option<&Path>, all: Option<usize>, verify: bool, cfg: &Config, out: &mut dyn Write) -> Outcome {
    let cache = ProductCache::new();
    let mut dec = Decomposer::new();
    let check = |expr: &GeneratorExpression, target: &AlgebraElement| -> Result<bool, Failure> {
        Ok(evaluate_cached(expr, &cache)? == *target)
    };
    if let Some(n) = all {
        cap_check(n, cfg.max_enumeration_order, "enumeration")?;
        let (mut count, mut passed) = (0, 0);
        for p in enumerate_basis_capped(n, cfg.max_enumeration_order)? {
            let expr = dec.decompose_basis(&p)?;
            let mut row = json!({ "blocks": p.blocks(), "expression": expr });
            if verify {
                let ok = check(&expr, &AlgebraElement::basis(p.clone()))?;
                passed += usize::from(ok);
                row["verify"] = json!(if ok { "PASS" } else { "FAIL" });
            }
            count += 1;
            line(out, &row)?;
        }
        let mut trailer = json!({ "count": count });
        if verify {
            trailer["passed"] = json!(passed);
        }
        line(out, &trailer)?;
        return if passed == count || !verify {
            Ok(())
        } else {
            Err(Failure::Other(format!("{} of {count} decompositions failed", count - passed)))
        };
    }
    let path = input.expect("clap requires input without --all");
    let value: Value = read_json(path)?;
    let target: AlgebraElement = if value.get("terms").is_some() {
        serde_json::from_value(value).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?
    } else {
        let p: Partition = serde_json::from_value(value).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
        AlgebraElement::basis(p)
    };
    cap_check(target.order(), cfg.max_enumeration_order, "enumeration")?;
    let expr = dec.decompose_element(&target)?;
    line(out, &expr)?;
    if verify {
        let ok = check(&expr, &target)?;
        eprintln!("{}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            return Err(Failure::Other("decomposition does not evaluate back to the input".into()));
        }
    }
    Ok(())
}

fn cmd_verify(n: usize, cfg: &Config, out: &mut dyn Write) -> Outcome {
    if n == 0 {
        return Err(Failure::Other("order must be at least 1".into()));
    }
    cap_check(n, cfg.max_table_order, "table")?;
    let results = verify::run(n, cfg);
    let mut failed = 0;
    for r in &results {
        failed += usize::from(!r.pass);
        line(out, &json!({ "suite": r.name, "status": if r.pass { "PASS" } else { "FAIL" }, "detail": r.detail }))?;
    }
    if failed > 0 {
        return Err(Failure::Other(format!("{failed} suites failed")));
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let Format::Json = cli.format;
    let flags = Overrides { parallelism: cli.parallel, trace: cli.trace, output: cli.out, seed: cli.seed };
    let cfg = Config::load(cli.config.as_deref(), |k| std::env::var(k).ok(), flags).map_err(Failure::Other)?;
    let mut out: Box<dyn Write> = match &cfg.output {
        Some(path) => Box::new(io::BufWriter::new(fs::File::create(path)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    };
    let result = match &cli.command {
        Command::Dim { n } => cmd_dim(*n, &cfg, &mut out),
        Command::Basis { n } => cmd_basis(*n, &cfg, &mut out),
        Command::Normalize { file } => cmd_normalize(file, &cfg, &mut out),
        Command::Mul { a, b, n } => cmd_mul(a, b, *n, &mut out),
        Command::Table { n } => cmd_table(*n, &cfg, &mut out),
        Command::Decompose { input, all, verify } => cmd_decompose(input.as_deref(), *all, *verify, &cfg, &mut out),
        Command::Verify { n } => cmd_verify(*n, &cfg, &mut out),
    };
    out.flush()?;
    result
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Cap(msg)) => {
            eprintln!("chromalg: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("chromalg: {msg}");
            ExitCode::FAILURE
        }
        Err(Failure::BrokenPipe) => ExitCode::SUCCESS,
    }
}
