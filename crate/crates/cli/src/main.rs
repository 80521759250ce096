//! `subrank`: loop-group decompositions, Hilbert-Mumford witnesses,
//! degeneration certificates, bound tables, and re-verification.
//!
//! Exit codes: 0 success or certified, 1 refuted or failed verification,
//! 2 inconclusive (precision or prime retries exhausted), 3 input or
//! parameter error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use subrank_core::bounds::{crossover_scan, first_excess, table_csv, table_json};
use subrank_core::degeneration::{certify_generic_lower_bound, verify_certificate, CertifyOptions, RankField, Verdict};
use subrank_core::field::{random_prime, Field};
use subrank_core::hm::{hm_witness, random_instance, verify_witness, GroupCurve};
use subrank_core::json::{self as wire, document_field};
use subrank_core::loop_group::{cim_decompose, verify_cim, CimDecomposition, CimVerdict};
use subrank_core::{Error, Tensor};

#[derive(Parser)]
#[command(name = "subrank", version, about = "Exact tools for tensor degenerations and border subrank")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldKind {
    Q,
    Fp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RunConfig {
    /// Scalar field; defaults to the input file's field, else Q.
    #[arg(long, global = true, value_enum)]
    field: Option<FieldKind>,
    /// Prime for `--field fp` (a random 62-bit prime from the seed if omitted).
    #[arg(long, global = true)]
    prime: Option<String>,
    /// Working precision N (series are compared modulo t^N).
    #[arg(long, global = true, default_value_t = 16)]
    precision: i64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file, written atomically; stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Precision doublings tried before giving up.
    #[arg(long, global = true, default_value_t = 4)]
    max_doublings: u32,
    /// Extra primes tried after a rank deficiency.
    #[arg(long, global = true, default_value_t = 3)]
    max_prime_retries: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose g = h1 diag(t^w) h2^-1 for one or more matrices over K((t)).
    Cim { input: PathBuf },
    /// Build and check a Hilbert-Mumford witness for lim g(t).p.
    Witness {
        /// Curve file, or an instance file holding both "g" and "p".
        g: PathBuf,
        /// Tensor file for p.
        p: Option<PathBuf>,
    },
    /// Certify the order-3 lower bound construction for (n, r).
    Certify {
        #[arg(long)]
        n: usize,
        /// Defaults to floor(sqrt(4n)) - 3.
        #[arg(long)]
        r: Option<usize>,
        /// Compute the Jacobian rank over the run field instead of modulo a prime.
        #[arg(long)]
        exact_rank: bool,
    },
    /// Bound table with columns n, d3_lower, generic_subrank, dmz_lo, border_upper, excess_flag.
    Bounds {
        /// Order used for the border_upper column.
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
    },
    /// Re-derive every claim of a stored certificate.
    Verify { certificate: PathBuf },
    /// Generate a test instance with a known specialization.
    Gen {
        /// Witness instance: a curve g and a tensor p with lim g(t).p defined.
        #[arg(long)]
        witness: bool,
        #[arg(long, value_delimiter = ',', default_value = "3,3")]
        dims: Vec<usize>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NoLimit { .. } | Error::WitnessVerification(_) => 1,
            Error::Precision(_) => 2,
            _ => 3,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let cfg = &cli.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let field = config_field(cfg, &mut rng)?;
    match &cli.cmd {
        Command::Cim { input } => cmd_cim(cfg, field.as_ref(), input),
        Command::Witness { g, p } => cmd_witness(cfg, field.as_ref(), g, p.as_deref()),
        Command::Certify { n, r, exact_rank } => cmd_certify(cfg, field, &mut rng, *n, *r, *exact_rank),
        Command::Bounds { d, n_min, n_max } => cmd_bounds(cfg, *d, *n_min, *n_max),
        Command::Verify { certificate } => cmd_verify(cfg, &mut rng, certificate),
        Command::Gen { witness, dims } => cmd_gen(cfg, field, &mut rng, *witness, dims),
    }
}

fn config_field(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Option<Field>, Failure> {
    match (cfg.field, &cfg.prime) {
        (Some(FieldKind::Q), Some(_)) => Err(Failure::new(3, "--prime given with --field q")),
        (Some(FieldKind::Q), None) => Ok(Some(Field::Rationals)),
        (_, Some(p)) => {
            let p: BigUint = p.trim().parse().map_err(|_| Failure::new(3, format!("malformed prime {p:?}")))?;
            Ok(Some(Field::prime(p)?))
        }
        (Some(FieldKind::Fp), None) => Ok(Some(Field::prime_u64(random_prime(rng, 62))?)),
        (None, None) => Ok(None),
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(3, format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(3, format!("{}: {e}", path.display())))
}

/// Writes to `--out` through a temporary file in the same directory, or to stdout.
fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::new(3, format!("write failed: {e}"));
    match &cfg.out {
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(text.as_bytes()).map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}

/// Runs `f` at the configured precision, doubling it after precision failures.
fn with_doubling<T>(cfg: &RunConfig, mut f: impl FnMut(i64) -> Result<T, Error>) -> Result<(T, i64), Failure> {
    if cfg.precision < 1 {
        return Err(Failure::new(3, "precision must be positive"));
    }
    let mut n = cfg.precision;
    let mut last = None;
    for _ in 0..=cfg.max_doublings {
        match f(n) {
            Ok(v) => return Ok((v, n)),
            Err(Error::Precision(msg)) => {
                last = Some(msg);
                n = n.saturating_mul(2);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(Failure::new(
        2,
        format!("inconclusive after {} doublings: {}", cfg.max_doublings, last.unwrap_or_default()),
    ))
}

fn cmd_cim(cfg: &RunConfig, field: Option<&Field>, input: &Path) -> Outcome {
    let doc = read_json(input)?;
    let f = document_field(&doc, field)?;
    let gs = wire::group_elements_from_json(&f, &doc)?;
    let mut decs: Vec<CimDecomposition> = Vec::new();
    let mut failure = None;
    for (i, g) in gs.iter().enumerate() {
        let (dec, _) = with_doubling(cfg, |n| cim_decompose(g, n))?;
        if let CimVerdict::Fail { reason, .. } = verify_cim(g, &dec) {
            failure.get_or_insert(format!("matrix {}: {reason}", i + 1));
        }
        decs.push(dec);
    }
    let verdict = if failure.is_some() { "Fail" } else { "Pass" };
    emit(cfg, &wire::to_pretty(&wire::cim_certificate_to_json(&f, &gs, &decs, verdict)))?;
    for (i, d) in decs.iter().enumerate() {
        eprintln!("matrix {}: weights {:?}", i + 1, d.weights);
    }
    match failure {
        Some(msg) => Err(Failure::new(1, format!("verification failed: {msg}"))),
        None => Ok(0),
    }
}

fn load_instance(field: Option<&Field>, g: &Path, p: Option<&Path>) -> Result<(Field, GroupCurve, Tensor), Failure> {
    let gdoc = read_json(g)?;
    let f = document_field(&gdoc, field)?;
    let (f, pval) = match p {
        Some(path) => {
            let pdoc = read_json(path)?;
            let f = document_field(&pdoc, Some(&f))?;
            (f, pdoc)
        }
        None => {
            let pv = wire::get(&gdoc, "p")?.clone();
            (f, pv)
        }
    };
    let curve = wire::curve_from_json(&f, &gdoc)?;
    let tensor = wire::tensor_from_json(&f, &pval)?;
    Ok((f, curve, tensor))
}

fn cmd_witness(cfg: &RunConfig, field: Option<&Field>, g: &Path, p: Option<&Path>) -> Outcome {
    let (f, curve, tensor) = load_instance(field, g, p)?;
    let (w, n) = with_doubling(cfg, |n| hm_witness(&curve, &tensor, n))?;
    emit(cfg, &wire::to_pretty(&wire::witness_to_json(&f, n, &curve, &tensor, &w)))?;
    eprintln!(
        "witness verified: weights {:?}, shared limit {}",
        w.cim.iter().map(|d| d.weights.clone()).collect::<Vec<_>>(),
        if w.shared_limit.is_zero() { "zero".to_string() } else { format!("{} nonzero entries", w.shared_limit.nnz()) }
    );
    Ok(0)
}

fn cmd_certify(cfg: &RunConfig, field: Option<Field>, rng: &mut ChaCha8Rng, n: usize, r: Option<usize>, exact_rank: bool) -> Outcome {
    let f = field.unwrap_or(Field::Rationals);
    let opts = CertifyOptions {
        exact_rank,
        max_prime_retries: cfg.max_prime_retries,
        ..CertifyOptions::default()
    };
    let cert = certify_generic_lower_bound(rng, &f, n, r, &opts)?;
    emit(cfg, &wire::to_pretty(&wire::certificate_to_json(&cert)))?;
    let over = match cert.rank_field {
        RankField::Prime(p) => format!("F_{p}"),
        RankField::Exact => f.to_string(),
    };
    eprintln!(
        "n = {}, r = {}: {} (jacobian rank {} of {} over {over})",
        cert.n,
        cert.r,
        cert.verdict.name(),
        cert.jacobian_rank,
        cert.pyramid_size
    );
    Ok(match cert.verdict {
        Verdict::Certified => 0,
        Verdict::Refuted => 1,
        Verdict::Inconclusive => 2,
    })
}

fn cmd_bounds(cfg: &RunConfig, d: usize, n_min: u64, n_max: u64) -> Outcome {
    if d < 2 || n_min == 0 {
        return Err(Failure::new(3, format!("need d >= 2 and n-min >= 1, got d = {d}, n-min = {n_min}")));
    }
    let rows = crossover_scan(d, n_min, n_max)?;
    let text = match cfg.format {
        Format::Csv => table_csv(&rows),
        Format::Json => wire::to_pretty(&table_json(d, &rows)),
    };
    emit(cfg, &text)?;
    match first_excess(&rows) {
        Some(n) => eprintln!("first n with d3_lower > generic_subrank: {n}"),
        None => eprintln!("no n in range with d3_lower > generic_subrank"),
    }
    Ok(0)
}

fn clause_failure(clause: &str, detail: impl std::fmt::Display) -> Failure {
    Failure::new(1, format!("verification failed: clause `{clause}`: {detail}"))
}

fn report_ok(cfg: &RunConfig, kind: &str) -> Outcome {
    if cfg.out.is_some() {
        emit(cfg, &wire::to_pretty(&json!({"kind": kind, "verdict": "Pass"})))?;
    }
    eprintln!("{kind} certificate re-verified");
    Ok(0)
}

fn cmd_verify(cfg: &RunConfig, rng: &mut ChaCha8Rng, path: &Path) -> Outcome {
    let doc = read_json(path)?;
    let kind = wire::get(&doc, "kind")?.as_str().unwrap_or_default().to_string();
    match kind.as_str() {
        "cim" => {
            let (_, inputs, decs) = wire::cim_certificate_from_json(&doc)?;
            if inputs.len() != decs.len() {
                return Err(clause_failure("cim", "one decomposition per input matrix expected"));
            }
            for (i, (g, d)) in inputs.iter().zip(&decs).enumerate() {
                if let CimVerdict::Fail { reason, .. } = verify_cim(g, d) {
                    return Err(clause_failure("cim", format!("matrix {}: {reason}", i + 1)));
                }
            }
            report_ok(cfg, "cim")
        }
        "witness" => {
            let (_, g, p, w) = wire::witness_from_json(&doc)?;
            if let Err(msg) = verify_witness(&g, &p, &w) {
                let (clause, detail) = msg.split_once(": ").unwrap_or(("witness", msg.as_str()));
                return Err(clause_failure(clause, detail));
            }
            report_ok(cfg, "witness")
        }
        "degeneration" => {
            let cert = wire::certificate_from_json(&doc)?;
            let stored = match cert.rank_field {
                RankField::Prime(p) => Some(p),
                RankField::Exact => None,
            };
            let fresh = loop {
                let p = random_prime(rng, 62);
                if Some(p) != stored {
                    break p;
                }
            };
            if let Err(fail) = verify_certificate(&cert, fresh) {
                return Err(clause_failure(fail.clause, fail.detail));
            }
            report_ok(cfg, "degeneration")
        }
        other => Err(Failure::new(3, format!("unknown certificate kind {other:?}"))),
    }
}

fn cmd_gen(cfg: &RunConfig, field: Option<Field>, rng: &mut ChaCha8Rng, witness: bool, dims: &[usize]) -> Outcome {
    if !witness {
        return Err(Failure::new(3, "choose an instance kind: --witness"));
    }
    if dims.len() < 2 || dims.iter().any(|&n| n == 0) {
        return Err(Failure::new(3, format!("need at least two positive dimensions, got {dims:?}")));
    }
    let f = field.unwrap_or(Field::Rationals);
    let (g, p) = random_instance(rng, &f, dims)?;
    emit(cfg, &wire::to_pretty(&wire::instance_to_json(&f, &g, &p)))?;
    Ok(0)
}
