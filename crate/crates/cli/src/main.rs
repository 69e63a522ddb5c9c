//! jsum: exact Jacobi sums, Dickson-Hurwitz sums and identity verification
//! over small finite fields, with JSON output suitable for scripting.
//!
//! Exit codes: 0 success, 1 verification found failing checks, 2 usage or
//! precondition error, 3 I/O or cache corruption. Every error prints a
//! machine-readable {"error": code, "detail": ...} object on stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use jsum_core::charsums::{
    coeffs_b, coeffs_d, cyclotomic_numbers, dickson_hurwitz, extract_c, jacobi_direct,
    set_sweep_threads, DHTable, SumError,
};
use jsum_core::cycring::{CycInt, RingError};
use jsum_core::fieldtab::{CacheError, FieldCacheError, FieldError, FieldSummary, IndexedField};
use jsum_core::verify::{
    precheck, run_with_field, CheckReport, CheckStatus, Suite, VerifyError, VerifyOptions,
};

#[derive(Parser)]
#[command(
    name = "jsum",
    version,
    about = "Exact Jacobi sums, cyclotomic numbers and Dickson-Hurwitz sums over F_{p^r}, with identity and congruence verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Field-table cache directory (overrides JSUM_CACHE and the default
    /// user cache path)
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for field sweeps (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Build (or load from cache) the index table for F_{p^r} and print a summary
    Field {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
    },
    /// Compute the Jacobi sum J_e(i, j) over F_{p^r}
    Jacobi {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Order parameter; e defaults to 2*l^2
        #[arg(long)]
        l: Option<u64>,
        /// Character order (overrides the default derived from --l)
        #[arg(long)]
        e: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        i: i64,
        #[arg(long, allow_hyphen_values = true)]
        j: i64,
    },
    /// Dickson-Hurwitz sums B_e(i, j): a single value or the full matrix
    Dickson {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Order parameter; e defaults to 2*l^2
        #[arg(long)]
        l: Option<u64>,
        #[arg(long)]
        e: Option<u64>,
        /// Print the full e x e matrix
        #[arg(long, conflicts_with_all = ["i", "j"])]
        matrix: bool,
        #[arg(long, requires = "j", allow_hyphen_values = true)]
        i: Option<i64>,
        #[arg(long, requires = "i", allow_hyphen_values = true)]
        j: Option<i64>,
    },
    /// Coefficient families tied to J(1, n): b (order l^2), d (order 2l^2),
    /// c (congruence residues mod l)
    Coeffs {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long)]
        l: u64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, value_enum)]
        family: Family,
    },
    /// Run verification suites for (l, p, r) and emit a check report
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long)]
        l: u64,
        /// Suite selection; repeatable (default: all)
        #[arg(long = "suite", value_enum)]
        suites: Vec<SuiteArg>,
        /// Seed for randomized checks (decimal or 0x-prefixed hex)
        #[arg(long, value_parser = parse_seed, default_value = "0x4a53")]
        seed: u64,
        /// Record per-check wall-clock times in the JSON output (off by
        /// default so identical invocations stay byte-identical)
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    B,
    D,
    C,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Props,
    Dickson,
    Coeffs,
    Congruences,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse()
    };
    parsed.map_err(|_| format!("invalid seed '{s}'"))
}

struct CliError {
    code: &'static str,
    detail: String,
    exit: u8,
}

impl CliError {
    fn usage(detail: impl Into<String>) -> Self {
        CliError {
            code: "usage",
            detail: detail.into(),
            exit: 2,
        }
    }

    fn precondition(detail: impl Into<String>) -> Self {
        CliError {
            code: "precondition",
            detail: detail.into(),
            exit: 2,
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Internal(_) => CliError {
                code: "internal",
                detail: e.to_string(),
                exit: 2,
            },
            _ => CliError::precondition(e.to_string()),
        }
    }
}

impl From<CacheError> for CliError {
    fn from(e: CacheError) -> Self {
        let code = match e {
            CacheError::Io(_) => "io",
            _ => "cache",
        };
        CliError {
            code,
            detail: e.to_string(),
            exit: 3,
        }
    }
}

impl From<FieldCacheError> for CliError {
    fn from(e: FieldCacheError) -> Self {
        match e {
            FieldCacheError::Field(f) => f.into(),
            FieldCacheError::Cache(c) => c.into(),
        }
    }
}

impl From<SumError> for CliError {
    fn from(e: SumError) -> Self {
        CliError::precondition(e.to_string())
    }
}

impl From<RingError> for CliError {
    fn from(e: RingError) -> Self {
        CliError::precondition(e.to_string())
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Field(f) => f.into(),
            other => CliError::precondition(other.to_string()),
        }
    }
}

// output documents

#[derive(Serialize)]
struct JacobiDoc {
    e: u64,
    q: u64,
    i: u64,
    j: u64,
    value: CycInt,
}

#[derive(Serialize)]
struct DicksonValueDoc {
    e: u64,
    q: u64,
    k: u64,
    i: u64,
    j: u64,
    value: u64,
}

#[derive(Serialize)]
struct CoeffsDoc {
    family: &'static str,
    l: u64,
    e: u64,
    q: u64,
    n: u64,
    coeffs: Vec<String>,
}

#[derive(Serialize)]
struct CResidueDoc {
    family: &'static str,
    l: u64,
    e: u64,
    q: u64,
    n: u64,
    valid: bool,
    residues: Vec<String>,
    low_residues: Vec<String>,
    jacobi: CycInt,
}

enum Doc {
    Field(FieldSummary),
    Jacobi(JacobiDoc),
    DicksonValue(DicksonValueDoc),
    DicksonMatrix(DHTable),
    Coeffs(CoeffsDoc),
    CResidues(CResidueDoc),
    Verify(CheckReport),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            emit_error(&CliError::usage(e.to_string().trim_end()));
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        set_sweep_threads(n);
    }
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            emit_error(&err);
            ExitCode::from(err.exit)
        }
    }
}

fn emit_error(err: &CliError) {
    println!(
        "{}",
        serde_json::json!({"error": err.code, "detail": err.detail})
    );
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let cache_dir = resolve_cache_dir(cli.cache.as_deref());
    match &cli.command {
        Command::Field { p, r } => {
            let (field, path, _) = IndexedField::load_or_build(*p, *r, &cache_dir)?;
            let summary = FieldSummary::new(&field, Some(path.display().to_string()));
            print_doc(&Doc::Field(summary), cli.format);
            Ok(ExitCode::SUCCESS)
        }
        Command::Jacobi { p, r, l, e, i, j } => {
            let e = resolve_order(*l, *e)?;
            let (field, _, _) = IndexedField::load_or_build(*p, *r, &cache_dir)?;
            let value = jacobi_direct(&field, e, *i, *j)?;
            print_doc(
                &Doc::Jacobi(JacobiDoc {
                    e,
                    q: field.q(),
                    i: i.rem_euclid(e as i64) as u64,
                    j: j.rem_euclid(e as i64) as u64,
                    value,
                }),
                cli.format,
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Dickson {
            p,
            r,
            l,
            e,
            matrix,
            i,
            j,
        } => {
            let e = resolve_order(*l, *e)?;
            if !matrix && i.is_none() {
                return Err(CliError::usage(
                    "dickson needs either --matrix or both --i and --j",
                ));
            }
            let (field, _, _) = IndexedField::load_or_build(*p, *r, &cache_dir)?;
            let dh = dickson_hurwitz(&cyclotomic_numbers(&field, e)?);
            if *matrix {
                print_doc(&Doc::DicksonMatrix(dh), cli.format);
            } else {
                let iu = i.unwrap().rem_euclid(e as i64) as u64;
                let ju = j.unwrap().rem_euclid(e as i64) as u64;
                print_doc(
                    &Doc::DicksonValue(DicksonValueDoc {
                        e,
                        q: field.q(),
                        k: dh.k(),
                        i: iu,
                        j: ju,
                        value: dh.b(iu, ju),
                    }),
                    cli.format,
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Coeffs { p, r, l, n, family } => {
            let (field, _, _) = IndexedField::load_or_build(*p, *r, &cache_dir)?;
            let q = field.q();
            let doc = match family {
                Family::B => {
                    let e = l * l;
                    let dh = dickson_hurwitz(&cyclotomic_numbers(&field, e)?);
                    let coeffs = coeffs_b(&dh, *l, *n)?;
                    Doc::Coeffs(CoeffsDoc {
                        family: "b",
                        l: *l,
                        e,
                        q,
                        n: n.rem_euclid(e as i64) as u64,
                        coeffs: coeffs.iter().map(|c| c.to_string()).collect(),
                    })
                }
                Family::D => {
                    let e = 2 * l * l;
                    let dh = dickson_hurwitz(&cyclotomic_numbers(&field, e)?);
                    let coeffs = coeffs_d(&dh, *l, *n)?;
                    Doc::Coeffs(CoeffsDoc {
                        family: "d",
                        l: *l,
                        e,
                        q,
                        n: n.rem_euclid(e as i64) as u64,
                        coeffs: coeffs.iter().map(|c| c.to_string()).collect(),
                    })
                }
                Family::C => {
                    let e = l * l;
                    let jval = jacobi_direct(&field, e, 1, *n)?;
                    let cx = extract_c(&jval, *l)?;
                    Doc::CResidues(CResidueDoc {
                        family: "c",
                        l: *l,
                        e,
                        q,
                        n: n.rem_euclid(e as i64) as u64,
                        valid: cx.valid,
                        residues: cx.residues.iter().map(|c| c.to_string()).collect(),
                        low_residues: cx.low_residues.iter().map(|c| c.to_string()).collect(),
                        jacobi: jval,
                    })
                }
            };
            print_doc(&doc, cli.format);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            p,
            r,
            l,
            suites,
            seed,
            timings,
        } => {
            precheck(*l, *p, *r)?;
            let (field, _, _) = IndexedField::load_or_build(*p, *r, &cache_dir)?;
            let opts = VerifyOptions {
                suites: resolve_suites(suites),
                seed: *seed,
                record_timings: *timings,
            };
            let report = run_with_field(&field, *l, &opts)?;
            let ok = report.all_passed();
            print_doc(&Doc::Verify(report), cli.format);
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn resolve_order(l: Option<u64>, e: Option<u64>) -> Result<u64, CliError> {
    match (e, l) {
        (Some(e), _) if e >= 1 => Ok(e),
        (Some(e), _) => Err(CliError::usage(format!("invalid order e = {e}"))),
        (None, Some(l)) => Ok(2 * l * l),
        (None, None) => Err(CliError::usage("one of --e or --l is required")),
    }
}

fn resolve_suites(args: &[SuiteArg]) -> Vec<Suite> {
    if args.is_empty() || args.contains(&SuiteArg::All) {
        return Suite::ALL.to_vec();
    }
    let mut out = Vec::new();
    for arg in args {
        let suite = match arg {
            SuiteArg::Props => Suite::Props,
            SuiteArg::Dickson => Suite::Dickson,
            SuiteArg::Coeffs => Suite::Coeffs,
            SuiteArg::Congruences => Suite::Congruences,
            SuiteArg::All => unreachable!(),
        };
        if !out.contains(&suite) {
            out.push(suite);
        }
    }
    out
}

/// --cache flag, then JSUM_CACHE, then XDG/HOME cache dir, then a temp dir.
fn resolve_cache_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Some(env) = std::env::var_os("JSUM_CACHE").filter(|s| !s.is_empty()) {
        return PathBuf::from(env);
    }
    if let Some(xdg) = std::env::var_os("XDG_CACHE_HOME").filter(|s| !s.is_empty()) {
        return PathBuf::from(xdg).join("jsum");
    }
    if let Some(home) = std::env::var_os("HOME").filter(|s| !s.is_empty()) {
        return PathBuf::from(home).join(".cache").join("jsum");
    }
    std::env::temp_dir().join("jsum-cache")
}

// rendering

fn print_doc(doc: &Doc, format: Format) {
    let out = match format {
        Format::Json => to_json(doc),
        Format::Csv => to_csv(doc),
        Format::Pretty => to_pretty(doc),
    };
    println!("{out}");
}

fn to_json(doc: &Doc) -> String {
    match doc {
        Doc::Field(d) => serde_json::to_string(d),
        Doc::Jacobi(d) => serde_json::to_string(d),
        Doc::DicksonValue(d) => serde_json::to_string(d),
        Doc::DicksonMatrix(d) => serde_json::to_string(d),
        Doc::Coeffs(d) => serde_json::to_string(d),
        Doc::CResidues(d) => serde_json::to_string(d),
        Doc::Verify(d) => serde_json::to_string(d),
    }
    .expect("serialization cannot fail")
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn to_csv(doc: &Doc) -> String {
    match doc {
        Doc::Field(d) => {
            let mut rows = vec![
                format!("p,{}", d.p),
                format!("r,{}", d.r),
                format!("q,{}", d.q),
                format!("modulus,{}", csv_quote(&join(&d.modulus))),
                format!("gamma,{}", csv_quote(&join(&d.gamma))),
            ];
            rows.push(match d.w {
                Some(w) => format!("w,{w}"),
                None => "w,".to_string(),
            });
            if let Some(path) = &d.cache_path {
                rows.push(format!("cache_path,{}", csv_quote(path)));
            }
            rows.join("\n")
        }
        Doc::Jacobi(d) => {
            let mut rows = vec!["index,coefficient".to_string()];
            for (t, c) in d.value.coeffs().iter().enumerate() {
                rows.push(format!("{t},{c}"));
            }
            rows.join("\n")
        }
        Doc::DicksonValue(d) => format!(
            "e,q,k,i,j,value\n{},{},{},{},{},{}",
            d.e, d.q, d.k, d.i, d.j, d.value
        ),
        Doc::DicksonMatrix(d) => {
            let rows: Vec<String> = d
                .rows()
                .map(|row| row.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
                .collect();
            rows.join("\n")
        }
        Doc::Coeffs(d) => {
            let mut rows = vec!["index,coefficient".to_string()];
            for (t, c) in d.coeffs.iter().enumerate() {
                rows.push(format!("{t},{c}"));
            }
            rows.join("\n")
        }
        Doc::CResidues(d) => {
            let mut rows = vec![format!("valid,{}", d.valid)];
            for (idx, c) in d.residues.iter().enumerate() {
                rows.push(format!("c{},{}", idx + 3, c));
            }
            rows.join("\n")
        }
        Doc::Verify(d) => {
            let mut rows = vec!["name,category,status,elapsed_ms,witness".to_string()];
            for check in &d.checks {
                let witness = check
                    .witness
                    .as_ref()
                    .map(|w| w.to_string())
                    .unwrap_or_default();
                let elapsed = check
                    .elapsed_ms
                    .map(|ms| ms.to_string())
                    .unwrap_or_default();
                rows.push(format!(
                    "{},{},{},{},{}",
                    check.name,
                    json_lower(&check.category),
                    json_lower(&check.status),
                    elapsed,
                    csv_quote(&witness)
                ));
            }
            rows.join("\n")
        }
    }
}

fn json_lower<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v)
        .expect("serialization cannot fail")
        .trim_matches('"')
        .to_string()
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn poly_pretty(coeffs: &[u64]) -> String {
    let mut terms = Vec::new();
    for (d, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let term = match (d, c) {
            (0, c) => c.to_string(),
            (1, 1) => "x".to_string(),
            (1, c) => format!("{c}x"),
            (d, 1) => format!("x^{d}"),
            (d, c) => format!("{c}x^{d}"),
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

fn to_pretty(doc: &Doc) -> String {
    match doc {
        Doc::Field(d) => {
            let mut out = vec![
                format!("F_{} (p = {}, r = {})", d.q, d.p, d.r),
                format!("  modulus: {}", poly_pretty(&d.modulus)),
                format!("  gamma:   {}", poly_pretty(&d.gamma)),
                format!(
                    "  w = ind(2): {}",
                    d.w.map(|w| w.to_string())
                        .unwrap_or_else(|| "undefined (p = 2)".into())
                ),
            ];
            if let Some(path) = &d.cache_path {
                out.push(format!("  cache:   {path}"));
            }
            out.join("\n")
        }
        Doc::Jacobi(d) => format!(
            "J_{}({}, {}) over F_{} = {}\ncoefficients: [{}]",
            d.e,
            d.i,
            d.j,
            d.q,
            d.value,
            d.value
                .coeffs()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ),
        Doc::DicksonValue(d) => format!(
            "B_{}({}, {}) over F_{} = {}   (k = {})",
            d.e, d.i, d.j, d.q, d.value, d.k
        ),
        Doc::DicksonMatrix(d) => {
            let width = d
                .rows()
                .flat_map(|row| row.iter().map(|v| v.to_string().len()))
                .max()
                .unwrap_or(1);
            let mut out = vec![format!(
                "Dickson-Hurwitz sums, e = {}, q = {}, k = {}",
                d.e(),
                d.q(),
                d.k()
            )];
            for row in d.rows() {
                out.push(
                    row.iter()
                        .map(|v| format!("{v:>width$}"))
                        .collect::<Vec<_>>()
                        .join(" "),
                );
            }
            out.join("\n")
        }
        Doc::Coeffs(d) => format!(
            "{}-coefficients of J(1, {}) at order {} over F_{}:\n[{}]",
            d.family,
            d.n,
            d.e,
            d.q,
            d.coeffs.join(", ")
        ),
        Doc::CResidues(d) => {
            let mut out = vec![format!(
                "c-residues mod {} for J_{}(1, {}) over F_{}: valid = {}",
                d.l, d.e, d.n, d.q, d.valid
            )];
            for (idx, c) in d.residues.iter().enumerate() {
                out.push(format!("  c{} = {}", idx + 3, c));
            }
            out.push(format!("  jacobi = {}", d.jacobi));
            out.join("\n")
        }
        Doc::Verify(d) => {
            let mut out = vec![format!(
                "verify l = {}, q = {} (p = {}, r = {}), gamma = [{}], w = {}, seed = {:#x}",
                d.params.l,
                d.params.q,
                d.params.p,
                d.params.r,
                join(&d.params.gamma),
                d.params
                    .w
                    .map(|w| w.to_string())
                    .unwrap_or_else(|| "-".into()),
                d.params.seed
            )];
            for check in &d.checks {
                let status = match check.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "skip",
                };
                let mut line = format!(
                    "  [{status}] {:<40} {}",
                    check.name,
                    json_lower(&check.category)
                );
                if let Some(ms) = check.elapsed_ms {
                    line.push_str(&format!("  {ms} ms"));
                }
                if check.status == CheckStatus::Fail {
                    if let Some(w) = &check.witness {
                        line.push_str(&format!("\n         witness: {w}"));
                    }
                }
                out.push(line);
            }
            let verdict = if d.failures == 0 {
                "all checks passed".to_string()
            } else {
                format!("{} check(s) FAILED", d.failures)
            };
            out.push(format!(
                "{} of {} run, {}",
                d.checks
                    .iter()
                    .filter(|c| c.status != CheckStatus::Skipped)
                    .count(),
                d.checks.len(),
                verdict
            ));
            out.join("\n")
        }
    }
}
