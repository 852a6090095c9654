//! Command-line front end for the quadrank library.
//!
//! Every verb validates its inputs, computes through quadrank-core, and
//! prints one JSON document (default) or CSV to stdout. Domain failures
//! print a machine-readable error object and exit 1; argument problems exit
//! 2 via clap. Exact rationals appear as "p/q" strings, field elements in
//! the "x+y*sqrt(D)" text form, ideals as {scale, a, b, D} objects.

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use quadrank_core::cfrac::CFExpansion;
use quadrank_core::ideals::FracIdeal;
use quadrank_core::indec::{ClassSource, IndecClass};
use quadrank_core::interval::Interval;
use quadrank_core::suite::{run_verify, Scope};
use quadrank_core::zeta::SiegelData;
use quadrank_core::{bounds, cfrac, ideals, indec, zeta};
use quadrank_core::{Error, QuadraticField, Result};
use serde_json::{json, Value};
use std::path::PathBuf;

const AFTER_HELP: &str = "\
Exit codes: 0 success, 1 domain error (JSON error object on stdout), 2 usage.

Configuration file (--config): plain text `key=value` lines, `#` comments.
Keys: out, coeffs, tol, workers. Explicit flags override file values.

Siegel coefficient file (--coeffs): plain text lines `d ell p/q`, one
coefficient per line, `#` comments. Degree-2 rows replace the built-in
derived coefficient; higher-degree rows feed the d > 2 bounds and the
verify suite, which reports those checks as skipped when no rows exist.

QUADRANK_WORKERS limits the worker pool for scan and verify (a positive
integer; overrides the config `workers` key; default: all cores).";

#[derive(Parser)]
#[command(name = "quadrank", version, about = "Exact arithmetic for real quadratic fields: indecomposables, zeta special values, universal form rank bounds", after_help = AFTER_HELP)]
struct Cli {
    /// Output format (default json)
    #[arg(long, global = true, value_enum)]
    out: Option<OutFmt>,
    /// External Siegel coefficient file (lines "d ell p/q")
    #[arg(long, global = true, value_name = "FILE")]
    coeffs: Option<PathBuf>,
    /// Plain-text key=value configuration file
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Field summary: discriminant, omega, fundamental unit, narrow class number
    Field { d: i64 },
    /// Continued fraction of omega: partial quotients, period, unit
    Cfrac { d: i64 },
    /// Indecomposable classes of O_K (or of an ideal given as HNF data)
    Indec {
        d: i64,
        /// Ideal as "a,b,scale": Z-basis scale*(a, b+omega)
        #[arg(long, value_name = "a,b,scale", value_parser = parse_ideal_spec)]
        ideal: Option<IdealSpec>,
    },
    /// Generator-count bounds for the positive part of O_K, per narrow class
    Kappa { d: i64 },
    /// Siegel zeta_K(-1), character oracle, zeta_K(2), functional equation
    Zeta {
        d: i64,
        /// Functional-equation tolerance as a rational (default 1/1000000)
        #[arg(long, value_parser = parse_rat_arg)]
        tol: Option<BigRational>,
    },
    /// Universal-form rank bound report for one discriminant
    Rankbound {
        #[arg(long)]
        d: u32,
        #[arg(long, value_parser = parse_bigint_arg)]
        disc: BigInt,
    },
    /// Discriminant bound below which lifts of the minimal-trace form exist
    Lift {
        #[arg(long)]
        d: u32,
    },
    /// Tabulate fields over a discriminant range (CSV columns: D, disc, h_plus, eps_norm, s1, zeta_minus1, rhs, r_min)
    Scan {
        #[arg(long)]
        d: u32,
        #[arg(long, value_name = "A..B", value_parser = parse_range_arg)]
        disc_range: DiscRange,
    },
    /// Cross-oracle verification suites; exit 1 if any suite fails
    Verify {
        #[arg(value_enum, default_value = "quick")]
        scope: ScopeArg,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFmt {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Quick,
    Full,
}

#[derive(Clone)]
struct IdealSpec {
    a: BigInt,
    b: BigInt,
    scale: BigRational,
}

#[derive(Clone, Copy)]
struct DiscRange {
    lo: i64,
    hi: i64,
}

fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::ParseError(format!("bad rational `{s}`: expected p or p/q"));
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
        Some((n, d)) => {
            let den: BigInt = d.trim().parse().map_err(|_| bad())?;
            if den == BigInt::from(0) {
                return Err(Error::ParseError("zero denominator".into()));
            }
            Ok(BigRational::new(n.trim().parse().map_err(|_| bad())?, den))
        }
    }
}

fn parse_rat_arg(s: &str) -> std::result::Result<BigRational, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

fn parse_bigint_arg(s: &str) -> std::result::Result<BigInt, String> {
    s.trim().parse().map_err(|_| format!("bad integer `{s}`"))
}

fn parse_ideal_spec(s: &str) -> std::result::Result<IdealSpec, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected a,b,scale".into());
    }
    Ok(IdealSpec {
        a: parse_bigint_arg(parts[0])?,
        b: parse_bigint_arg(parts[1])?,
        scale: parse_rat_arg(parts[2])?,
    })
}

fn parse_range_arg(s: &str) -> std::result::Result<DiscRange, String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let lo = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
    let hi = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
    Ok(DiscRange { lo, hi })
}

/// Flag values merged over config-file values; flags win.
struct Settings {
    out: OutFmt,
    rows: Vec<(u32, u32, BigRational)>,
    tol_default: Option<BigRational>,
}

fn resolve_settings(cli: &Cli) -> Result<Settings> {
    let mut out = cli.out;
    let mut coeffs = cli.coeffs.clone();
    let mut workers: Option<usize> = None;
    let mut tol_default = None;
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::ParseError(format!(
                    "config line {}: expected key=value",
                    i + 1
                )));
            };
            let value = value.trim();
            match key.trim() {
                "out" => {
                    if out.is_none() {
                        out = Some(match value {
                            "json" => OutFmt::Json,
                            "csv" => OutFmt::Csv,
                            other => {
                                return Err(Error::ParseError(format!(
                                    "config: out must be json or csv, got `{other}`"
                                )))
                            }
                        });
                    }
                }
                "coeffs" => {
                    if coeffs.is_none() {
                        coeffs = Some(PathBuf::from(value));
                    }
                }
                "tol" => tol_default = Some(parse_rat(value)?),
                "workers" => {
                    workers = Some(value.parse().map_err(|_| {
                        Error::ParseError(format!("config: bad workers count `{value}`"))
                    })?)
                }
                other => {
                    return Err(Error::ParseError(format!("config: unknown key `{other}`")));
                }
            }
        }
    }
    if let Ok(v) = std::env::var("QUADRANK_WORKERS") {
        workers = Some(
            v.parse()
                .map_err(|_| Error::ParseError(format!("QUADRANK_WORKERS: bad count `{v}`")))?,
        );
    }
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::ParseError("worker count must be positive".into()));
        }
        // Ignore failure: the global pool can only be installed once.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let rows = match coeffs {
        None => Vec::new(),
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            zeta::parse_coeff_lines(&text)?
        }
    };
    Ok(Settings {
        out: out.unwrap_or(OutFmt::Json),
        rows,
        tol_default,
    })
}

/// Degree-d Siegel coefficients: external rows when present, else the
/// derived quadratic value (d = 2 only).
fn siegel_for(d: u32, rows: &[(u32, u32, BigRational)]) -> Result<SiegelData> {
    if d == 2 && !rows.iter().any(|r| r.0 == 2) {
        return Ok(SiegelData::derived_quadratic());
    }
    zeta::data_for_degree(d, rows)
}

fn rat_str(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn int_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn interval_json(iv: &Interval) -> Value {
    let (lo, hi) = iv.to_f64();
    json!({
        "lo": rat_str(iv.lo()),
        "hi": rat_str(iv.hi()),
        "approx": (lo + hi) / 2.0,
    })
}

fn ideal_json(ideal: &FracIdeal) -> Result<Value> {
    let small = |n: &BigInt| -> Result<i64> {
        n.to_i64()
            .ok_or_else(|| Error::OutOfRange(format!("ideal coefficient {n} exceeds i64")))
    };
    Ok(json!({
        "scale": rat_str(ideal.scale()),
        "a": small(ideal.a())?,
        "b": small(ideal.b())?,
        "D": ideal.field().d(),
    }))
}

fn class_json(c: &IndecClass) -> Value {
    let (u, v) = c.representative.omega_coords();
    let source = match &c.source {
        ClassSource::Cf { i, r } => json!({"cf": {"i": i, "r": int_value(r)}}),
        ClassSource::Brute => json!("brute"),
    };
    json!({
        "element": c.representative.to_string(),
        "omega_coords": [rat_str(&u), rat_str(&v)],
        "norm": rat_str(&c.representative.norm()),
        "source": source,
    })
}

fn field_cmd(d: i64) -> Result<Value> {
    let k = QuadraticField::new(d)?;
    let unit = cfrac::fundamental_unit(&k);
    let h_plus = ideals::narrow_class_reps(&k).len();
    Ok(json!({
        "d": k.d(),
        "disc": k.discriminant(),
        "omega": k.omega().to_string(),
        "eps": unit.eps.to_string(),
        "eps_norm": unit.norm_sign,
        "eps_plus": unit.eps_plus.to_string(),
        "h_plus": h_plus,
    }))
}

fn cfrac_cmd(d: i64) -> Result<Value> {
    let k = QuadraticField::new(d)?;
    let e = CFExpansion::of_field(&k);
    let unit = cfrac::fundamental_unit(&k);
    Ok(json!({
        "d": k.d(),
        "subject": e.subject().to_string(),
        "u0": int_value(e.u0()),
        "period": e.period().iter().map(int_value).collect::<Vec<_>>(),
        "s": e.period_len(),
        "eps": unit.eps.to_string(),
        "eps_norm": unit.norm_sign,
    }))
}

fn indec_cmd(d: i64, hnf: Option<&IdealSpec>) -> Result<Value> {
    let k = QuadraticField::new(d)?;
    let (ideal, classes) = match hnf {
        None => (FracIdeal::unit_ideal(k), indec::indecomposables_ring(&k)),
        Some(s) => {
            let ideal = FracIdeal::from_hnf(k, s.scale.clone(), s.a.clone(), s.b.clone())?;
            let classes = indec::i_indecomposables(&ideal);
            (ideal, classes)
        }
    };
    Ok(json!({
        "d": k.d(),
        "ideal": ideal_json(&ideal)?,
        "count": classes.len(),
        "classes": classes.iter().map(class_json).collect::<Vec<_>>(),
    }))
}

fn kappa_cmd(d: i64) -> Result<Value> {
    let k = QuadraticField::new(d)?;
    let (lower, upper) = indec::kappa_field_bound(&k);
    let mut classes = Vec::new();
    for rep in ideals::narrow_class_reps(&k) {
        classes.push(json!({
            "ideal": ideal_json(&rep)?,
            "cf_upper": indec::kappa_upper_cf(&rep).ok(),
            "class_upper": indec::kappa_upper_classcount(&rep),
            "is_one": indec::kappa_is_one(&rep),
        }));
    }
    Ok(json!({
        "d": k.d(),
        "disc": k.discriminant(),
        "lower": lower,
        "upper": upper,
        "classes": classes,
    }))
}

fn zeta_cmd(d: i64, tol: &BigRational, rows: &[(u32, u32, BigRational)]) -> Result<Value> {
    let k = QuadraticField::new(d)?;
    let data = siegel_for(2, rows)?;
    let zeta_minus1 = zeta::zeta_minus1_siegel(&k, &data)?;
    let oracle = zeta::zeta_minus1_oracle(&k);
    let floor_err = BigRational::new(BigInt::one(), BigInt::from(10u64).pow(12));
    let abs_err = (tol / BigRational::from_integer(BigInt::from(1000))).max(floor_err);
    let zeta2 = zeta::zeta2_numeric(&k, &abs_err);
    let (residual, pass) = zeta::functional_eq_check(&k, tol);
    let s_values: Vec<Value> = (1..=3u64)
        .map(|l| json!([l, int_value(&zeta::s_ell(&k, l))]))
        .collect();
    Ok(json!({
        "d": k.d(),
        "disc": k.discriminant(),
        "s_values": s_values,
        "zeta_minus1": rat_str(&zeta_minus1),
        "oracle_minus1": rat_str(&oracle),
        "zeta2": interval_json(&zeta2),
        "fe_residual": rat_str(&residual),
        "fe_residual_approx": residual.to_f64().unwrap_or(f64::NAN),
        "fe_pass": pass,
    }))
}

fn rankbound_cmd(d: u32, disc: &BigInt, rows: &[(u32, u32, BigRational)]) -> Result<Value> {
    let data = siegel_for(d, rows)?;
    let report = bounds::bound_report(disc, d, &data)?;
    Ok(json!({
        "d": report.d,
        "disc": int_value(&report.disc),
        "r_d": report.r_d,
        "g": interval_json(&report.g_value),
        "b": rat_str(&report.b_value),
        "rhs": interval_json(&report.rhs),
        "r_min": report.r_min,
        "notes": report.notes,
    }))
}

fn lift_cmd(d: u32, rows: &[(u32, u32, BigRational)]) -> Result<Value> {
    let data = siegel_for(d, rows)?;
    let bound = bounds::lifting_disc_bound(d, &data)?;
    Ok(json!({
        "d": d,
        "bound": interval_json(&bound),
    }))
}

struct ScanRow {
    d: i64,
    disc: i64,
    h_plus: usize,
    eps_norm: i8,
    s1: BigInt,
    zeta_minus1: BigRational,
    rhs: Interval,
    r_min: u32,
}

/// The squarefree D whose field has discriminant exactly `delta`, if any.
fn fundamental_d(delta: i64) -> Option<i64> {
    let candidate = match delta.rem_euclid(4) {
        1 => delta,
        0 => delta / 4,
        _ => return None,
    };
    let k = QuadraticField::new(candidate).ok()?;
    (k.discriminant() == delta).then_some(candidate)
}

fn scan_cmd(d: u32, range: &DiscRange, rows: &[(u32, u32, BigRational)]) -> Result<Vec<ScanRow>> {
    if d != 2 {
        return Err(Error::DegreeUnsupported(d));
    }
    let data = siegel_for(2, rows)?;
    let pairs: Vec<(i64, i64)> = (range.lo..=range.hi)
        .filter_map(|delta| fundamental_d(delta).map(|d0| (delta, d0)))
        .collect();
    use rayon::prelude::*;
    pairs
        .par_iter()
        .map(|&(delta, d0)| {
            let k = QuadraticField::new(d0).expect("validated");
            let disc = BigInt::from(delta);
            Ok(ScanRow {
                d: k.d(),
                disc: delta,
                h_plus: ideals::narrow_class_reps(&k).len(),
                eps_norm: cfrac::fundamental_unit(&k).norm_sign,
                s1: zeta::s_ell(&k, 1),
                zeta_minus1: zeta::zeta_minus1_siegel(&k, &data)?,
                rhs: bounds::main_rhs(&disc, 2, &data)?,
                r_min: bounds::min_rank_bound(&disc, 2, &data)?,
            })
        })
        .collect()
}

fn scan_json(rows: &[ScanRow], flat: bool) -> Value {
    let items: Vec<Value> = rows
        .iter()
        .map(|r| {
            let rhs = if flat {
                let (lo, hi) = r.rhs.to_f64();
                json!((lo + hi) / 2.0)
            } else {
                interval_json(&r.rhs)
            };
            json!({
                "D": r.d,
                "disc": r.disc,
                "h_plus": r.h_plus,
                "eps_norm": r.eps_norm,
                "s1": int_value(&r.s1),
                "zeta_minus1": rat_str(&r.zeta_minus1),
                "rhs": rhs,
                "r_min": r.r_min,
            })
        })
        .collect();
    Value::Array(items)
}

/// Print a line, treating a closed pipe as an orderly stop.
fn print_line(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{s}").is_err() {
        std::process::exit(0);
    }
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

/// Arrays of uniform objects print as a header plus rows; a single object
/// prints as key,value lines.
fn emit_csv(v: &Value) {
    match v {
        Value::Array(rows) => {
            let Some(first) = rows.first().and_then(Value::as_object) else {
                return;
            };
            let keys: Vec<&String> = first.keys().collect();
            print_line(
                &keys.iter().map(|k| csv_cell(&json!(k))).collect::<Vec<_>>().join(","),
            );
            for row in rows {
                let obj = row.as_object().expect("uniform rows");
                let line: Vec<String> = keys
                    .iter()
                    .map(|k| csv_cell(obj.get(*k).unwrap_or(&Value::Null)))
                    .collect();
                print_line(&line.join(","));
            }
        }
        Value::Object(map) => {
            for (k, val) in map {
                print_line(&format!("{},{}", csv_cell(&json!(k)), csv_cell(val)));
            }
        }
        other => print_line(&csv_cell(other)),
    }
}

fn emit(out: OutFmt, v: &Value) {
    match out {
        OutFmt::Json => print_line(&serde_json::to_string_pretty(v).expect("valid json")),
        OutFmt::Csv => emit_csv(v),
    }
}

fn error_value(e: &Error) -> Value {
    let debug = format!("{e:?}");
    let kind: String = debug
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect();
    json!({"error": {"kind": kind, "message": e.to_string()}})
}

fn run(cli: &Cli) -> Result<i32> {
    let settings = resolve_settings(cli)?;
    let out = settings.out;
    match &cli.cmd {
        Cmd::Field { d } => emit(out, &field_cmd(*d)?),
        Cmd::Cfrac { d } => emit(out, &cfrac_cmd(*d)?),
        Cmd::Indec { d, ideal } => emit(out, &indec_cmd(*d, ideal.as_ref())?),
        Cmd::Kappa { d } => emit(out, &kappa_cmd(*d)?),
        Cmd::Zeta { d, tol } => {
            let default_tol = BigRational::new(BigInt::one(), BigInt::from(1_000_000));
            let tol = tol
                .clone()
                .or(settings.tol_default.clone())
                .unwrap_or(default_tol);
            if !tol.is_positive() {
                return Err(Error::DomainError("tol must be positive".into()));
            }
            emit(out, &zeta_cmd(*d, &tol, &settings.rows)?);
        }
        Cmd::Rankbound { d, disc } => emit(out, &rankbound_cmd(*d, disc, &settings.rows)?),
        Cmd::Lift { d } => emit(out, &lift_cmd(*d, &settings.rows)?),
        Cmd::Scan { d, disc_range } => {
            let rows = scan_cmd(*d, disc_range, &settings.rows)?;
            emit(out, &scan_json(&rows, out == OutFmt::Csv));
        }
        Cmd::Verify { scope } => {
            let scope = match scope {
                ScopeArg::Quick => Scope::Quick,
                ScopeArg::Full => Scope::Full,
            };
            let data = siegel_for(2, &settings.rows)?;
            let report = run_verify(scope, &data, &settings.rows);
            match out {
                OutFmt::Json => emit(out, &serde_json::to_value(&report).expect("serializable")),
                OutFmt::Csv => {
                    let rows: Vec<Value> = report
                        .outcomes
                        .iter()
                        .map(|o| {
                            json!({
                                "suite": o.name,
                                "status": format!("{:?}", o.status),
                                "detail": o.detail,
                                "counterexample": o.counterexample,
                            })
                        })
                        .collect();
                    emit_csv(&Value::Array(rows));
                }
            }
            if !report.all_pass() {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            print_line(&serde_json::to_string_pretty(&error_value(&e)).expect("valid json"));
            1
        }
    };
    std::process::exit(code);
}
