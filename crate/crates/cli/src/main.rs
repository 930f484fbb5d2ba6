//! Batch front end for the exponential-sum and periodicity toolkit.
//!
//! One command per process: validate every parameter, compute, emit one
//! machine-readable report (JSON by default, CSV for flat tables) with
//! the resolved run parameters embedded, and exit. Exit codes separate
//! failure modes: 2 for parameter/parse problems, 3 for enumeration
//! budget overruns, 4 for internal errors. Identical parameters produce
//! byte-identical output unless a timestamp is requested.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use persum_core::cyclotomic::{self, CycElem, GaloisAuto, SubfieldSpec};
use persum_core::dynamics::{self, CycPoly};
use persum_core::expsum::{self, ExpSumError, MultiPoly};
use persum_core::field::rat;
use persum_core::finitefield::FqConfig;
use persum_core::json as pj;
use persum_core::lrs;
use persum_core::periodicity;

const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug)]
enum CliError {
    /// Bad parameters or unparseable inputs.
    Parse(String),
    /// Enumeration would exceed the point budget.
    Budget(String),
    /// Anything else: inconsistent internal state, I/O.
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "invalid input: {m}"),
            CliError::Budget(m) => write!(f, "budget exceeded: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

fn from_expsum(e: ExpSumError) -> CliError {
    match e {
        ExpSumError::Budget { .. } => CliError::Budget(e.to_string()),
        ExpSumError::BadPoly(_) | ExpSumError::ZeroShift => CliError::Parse(e.to_string()),
        other => CliError::Internal(other.to_string()),
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "persum",
    about = "Exact exponential sums over finite fields and periodicity analysis of their degree sequences"
)]
struct Cli {
    /// Worker threads for the enumeration kernels (results do not depend
    /// on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format; CSV is available only for flat sequence tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the timestamp, making the output a pure function of the
    /// parameters.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Character sums S_k(f) over F_{p^k} for k = 1..kmax, with degree
    /// analysis and L-function reconstruction.
    Expsum {
        /// The prime p.
        #[arg(long)]
        p: u64,
        /// Polynomial as "c:e" monomials joined by ';' or '+', e.g.
        /// "1:3" for x^3 or "2:1,1" for 2xy.
        #[arg(long)]
        f: String,
        #[arg(long)]
        kmax: usize,
        /// Enumeration point budget (default from PERSUM_BUDGET or 10^7).
        #[arg(long)]
        budget: Option<u64>,
        /// Explicit F_{p^kmax} modulus as comma-separated coefficients,
        /// constant first, leading 1; applies to k = kmax only.
        #[arg(long)]
        fq_modulus: Option<String>,
    },
    /// n-dimensional Kloosterman sums Kl_k(n, a) for k = 1..kmax.
    Kloosterman {
        #[arg(long)]
        p: u64,
        /// Dimension: the sum runs over n invertible coordinates.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// The shift a (must not be divisible by p).
        #[arg(long)]
        a: u64,
        #[arg(long)]
        kmax: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Exact fixedness and degree analysis of the powers alpha^n.
    PowerSeq {
        /// Cyclotomic conductor m of the ambient field Q(zeta_m).
        #[arg(long)]
        m: u64,
        /// Element literal, e.g. "zeta", "1+2z", "3/2z^2-1".
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 15)]
        horizon: usize,
        /// Subgroup generators of (Z/m)^* (comma separated); defaults to
        /// the full group, i.e. analysis over Q.
        #[arg(long)]
        subgroup: Option<String>,
    },
    /// Infer the minimal linear recurrence of the given terms and
    /// describe its zero set.
    Lrs {
        /// Conductor for the term literals; 1 means plain rationals.
        #[arg(long, default_value_t = 1)]
        m: u64,
        /// Comma-separated element literals.
        #[arg(long)]
        terms: String,
    },
    /// Iterate a polynomial map and analyze the orbit degree sequence.
    Iterate {
        #[arg(long)]
        m: u64,
        /// Coefficients of f, constant first, comma separated.
        #[arg(long)]
        f: String,
        /// Starting point.
        #[arg(long)]
        a: String,
        #[arg(long)]
        nmax: usize,
        /// Coefficient growth budget in bits (default from
        /// PERSUM_SIZE_BUDGET or 10^6).
        #[arg(long)]
        size_budget: Option<u64>,
        /// Also report where sigma_t fixes the orbit.
        #[arg(long)]
        sigma: Option<u64>,
    },
    /// Minimal polynomials of the given terms with a rationality report
    /// for their coefficient sequences.
    MinpolySeq {
        #[arg(long)]
        m: u64,
        /// Comma-separated element literals.
        #[arg(long)]
        terms: String,
        #[arg(long)]
        subgroup: Option<String>,
    },
}

// ---- Element literal parsing ----

/// One signed monomial of an element literal: "3", "-1/2", "z", "2z^3",
/// "zeta^2". Multiplication signs are optional.
fn parse_monomial(m: u64, tok: &str) -> Result<CycElem, String> {
    let tok = tok.trim();
    if tok.is_empty() {
        return Err("empty term".into());
    }
    let (coef_str, exp) = if let Some(zpos) = tok.find(['z', 'Z']) {
        let head = tok[..zpos].trim_end_matches('*').trim();
        let tail = &tok[zpos..];
        let tail = tail
            .strip_prefix("zeta")
            .or_else(|| tail.strip_prefix('z'))
            .ok_or_else(|| format!("unrecognized term {tok:?}"))?;
        let exp = match tail.strip_prefix('^') {
            Some(e) => e
                .parse::<u64>()
                .map_err(|_| format!("bad exponent in {tok:?}"))?,
            None if tail.is_empty() => 1,
            None => return Err(format!("unexpected trailing {tail:?} in {tok:?}")),
        };
        (head, Some(exp))
    } else {
        (tok, None)
    };
    let coef = match coef_str {
        "" | "+" => rat(1, 1),
        "-" => rat(-1, 1),
        s => {
            let (num, den) = match s.split_once('/') {
                Some((n, d)) => (n, d),
                None => (s, "1"),
            };
            let n: i64 = num
                .trim()
                .parse()
                .map_err(|_| format!("bad coefficient in {s:?}"))?;
            let d: i64 = den
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in {s:?}"))?;
            if d == 0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            rat(n, d)
        }
    };
    Ok(match exp {
        None => CycElem::rational(m, coef),
        Some(e) => &CycElem::rational(m, coef) * &CycElem::zeta_pow(m, e % m.max(1)),
    })
}

/// An element literal: monomials joined by '+' and '-'.
fn parse_elem(m: u64, s: &str) -> Result<CycElem, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty element".into());
    }
    let mut acc = CycElem::zero(m);
    let mut start = 0usize;
    let bytes = s.as_bytes();
    for i in 1..=bytes.len() {
        let boundary = i == bytes.len()
            || (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' && bytes[i - 1] != b'/';
        if boundary {
            let tok = &s[start..i];
            let (sign, body) = match tok.as_bytes().first() {
                Some(b'-') => (-1, &tok[1..]),
                Some(b'+') => (1, &tok[1..]),
                _ => (1, tok),
            };
            let term = parse_monomial(m, body)?;
            acc = if sign < 0 { &acc - &term } else { &acc + &term };
            start = i;
        }
    }
    Ok(acc)
}

fn parse_elem_list(m: u64, s: &str) -> Result<Vec<CycElem>, String> {
    s.split(',').map(|t| parse_elem(m, t)).collect()
}

fn parse_subgroup(m: u64, spec: &Option<String>) -> Result<SubfieldSpec, CliError> {
    match spec {
        None => Ok(SubfieldSpec::rationals(m)),
        Some(s) => {
            let gens: Result<Vec<u64>, _> = s.split(',').map(|t| t.trim().parse::<u64>()).collect();
            let gens = gens.map_err(|_| CliError::Parse(format!("bad subgroup list {s:?}")))?;
            SubfieldSpec::new(m, gens).map_err(|e| CliError::Parse(e.to_string()))
        }
    }
}

fn env_budget(name: &str, fallback: u64) -> u64 {
    std::env::var(name)
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .unwrap_or(fallback)
}

// ---- Report assembly ----

struct Report {
    run: Value,
    body: Map<String, Value>,
    /// Flat (header, rows) table for CSV output, when one exists.
    table: Option<(Vec<&'static str>, Vec<Vec<Value>>)>,
}

fn run_spec(cli: &Cli, command: &str, params: Value) -> Value {
    let mut run = Map::new();
    run.insert("command".into(), json!(command));
    run.insert("params".into(), params);
    run.insert(
        "format".into(),
        json!(match cli.format {
            Format::Json => "json",
            Format::Csv => "csv",
        }),
    );
    run.insert("threads".into(), json!(cli.threads));
    if !cli.no_timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        run.insert("timestamp".into(), json!(secs));
    }
    Value::Object(run)
}

/// Degree table -> certificate -> generating function, shared by the sum
/// commands; detection failures are reported in place, not fatal.
fn degree_analysis_fields(
    body: &mut Map<String, Value>,
    degrees: &[u64],
    start: usize,
) {
    body.insert("degrees".into(), json!(degrees));
    match periodicity::detect_virtual_period(degrees) {
        Ok(cert) => {
            body.insert("certificate".into(), pj::certificate_to_value(&cert));
            match periodicity::degree_genfun(degrees, &cert, start) {
                Ok(gf) => body.insert("genfun".into(), pj::rational_fn_rat_to_value(&gf)),
                Err(e) => body.insert("genfun_error".into(), json!(e.to_string())),
            };
        }
        Err(e) => {
            body.insert("certificate".into(), Value::Null);
            body.insert("certificate_error".into(), json!(e.to_string()));
        }
    }
}

fn cmd_expsum(
    p: u64,
    f: &str,
    kmax: usize,
    budget: Option<u64>,
    fq_modulus: &Option<String>,
) -> Result<(Value, Report), CliError> {
    let poly = MultiPoly::parse(f).map_err(|e| CliError::Parse(e.to_string()))?;
    if kmax == 0 {
        return Err(CliError::Parse("kmax must be at least 1".into()));
    }
    let budget = budget.unwrap_or_else(|| env_budget("PERSUM_BUDGET", DEFAULT_BUDGET));
    let override_modulus: Option<Vec<u64>> = match fq_modulus {
        None => None,
        Some(s) => {
            let coeffs: Result<Vec<u64>, _> =
                s.split(',').map(|t| t.trim().parse::<u64>()).collect();
            let coeffs = coeffs.map_err(|_| CliError::Parse(format!("bad modulus list {s:?}")))?;
            if coeffs.len() != kmax + 1 {
                return Err(CliError::Parse(format!(
                    "modulus must have degree kmax = {kmax} (got {} coefficients, need {})",
                    coeffs.len(),
                    kmax + 1
                )));
            }
            Some(coeffs)
        }
    };
    let params = json!({
        "p": p, "f": f, "kmax": kmax, "budget": budget,
        "fq_modulus": override_modulus,
    });

    let mut sums = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let s = match (&override_modulus, k == kmax) {
            (Some(coeffs), true) => {
                let cfg: Arc<FqConfig> = FqConfig::with_modulus(p, k, coeffs.clone())
                    .map_err(|e| CliError::Parse(e.to_string()))?;
                expsum::exp_sum_with_config(&cfg, &poly, budget)
            }
            _ => expsum::exp_sum(&poly, p, k, budget),
        }
        .map_err(from_expsum)?;
        sums.push(s);
    }
    let q = SubfieldSpec::rationals(p);
    let degrees: Vec<u64> = sums.iter().map(|s| cyclotomic::degree(s, &q)).collect();

    let mut body = Map::new();
    body.insert(
        "sums".into(),
        Value::Array(sums.iter().map(pj::cyc_to_value).collect()),
    );
    degree_analysis_fields(&mut body, &degrees, 1);
    match lrs::berlekamp_massey(&sums) {
        Ok(rec) => body.insert("recurrence".into(), pj::recurrence_to_value(&rec)),
        Err(e) => body.insert("recurrence_error".into(), json!(e.to_string())),
    };
    match lrs::lfunction_from_sums(&sums) {
        Ok((l, confirmed)) => {
            let mut lv = Map::new();
            lv.insert("num".into(), pj::poly_cyc_to_value(l.num()));
            lv.insert("den".into(), pj::poly_cyc_to_value(l.den()));
            lv.insert("confirmed".into(), json!(confirmed));
            body.insert("lfunction".into(), Value::Object(lv))
        }
        Err(e) => body.insert("lfunction_error".into(), json!(e.to_string())),
    };
    let table = (
        vec!["k", "degree"],
        degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| vec![json!(i + 1), json!(d)])
            .collect(),
    );
    Ok((
        params,
        Report {
            run: Value::Null,
            body,
            table: Some(table),
        },
    ))
}

fn cmd_kloosterman(
    p: u64,
    n: usize,
    a: u64,
    kmax: usize,
    budget: Option<u64>,
) -> Result<(Value, Report), CliError> {
    if n == 0 {
        return Err(CliError::Parse("dimension n must be at least 1".into()));
    }
    if kmax == 0 {
        return Err(CliError::Parse("kmax must be at least 1".into()));
    }
    if a % p == 0 {
        return Err(CliError::Parse(format!(
            "shift a = {a} must not be divisible by p = {p}"
        )));
    }
    let budget = budget.unwrap_or_else(|| env_budget("PERSUM_BUDGET", DEFAULT_BUDGET));
    let params = json!({"p": p, "n": n, "a": a, "kmax": kmax, "budget": budget});

    let mut sums = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        sums.push(expsum::kloosterman_sum(n, a, p, k, budget).map_err(from_expsum)?);
    }
    let q = SubfieldSpec::rationals(p);
    let degrees: Vec<u64> = sums.iter().map(|s| cyclotomic::degree(s, &q)).collect();
    let formula_value = expsum::kloosterman_degree_formula(p, n as u64);

    let mut rows = Vec::with_capacity(kmax);
    let mut formula = Vec::with_capacity(kmax);
    for (i, &d) in degrees.iter().enumerate() {
        let k = (i + 1) as u64;
        // The closed form is proven only away from p | k; elsewhere the
        // computed value stands on its own.
        let applicable = k % p != 0;
        formula.push(json!({
            "k": k,
            "formula_applicable": applicable,
            "formula_value": formula_value,
            "matches": if applicable { json!(d == formula_value) } else { Value::Null },
        }));
        rows.push(vec![
            json!(k),
            json!(d),
            json!(applicable),
            json!(formula_value),
        ]);
    }

    let mut body = Map::new();
    body.insert(
        "sums".into(),
        Value::Array(sums.iter().map(pj::cyc_to_value).collect()),
    );
    degree_analysis_fields(&mut body, &degrees, 1);
    body.insert("formula".into(), Value::Array(formula));
    Ok((
        params,
        Report {
            run: Value::Null,
            body,
            table: Some((vec!["k", "degree", "formula_applicable", "formula_value"], rows)),
        },
    ))
}

fn cmd_power_seq(
    m: u64,
    alpha: &str,
    horizon: usize,
    subgroup: &Option<String>,
) -> Result<(Value, Report), CliError> {
    let elem = parse_elem(m, alpha).map_err(CliError::Parse)?;
    let k = parse_subgroup(m, subgroup)?;
    if horizon < 2 {
        return Err(CliError::Parse("horizon must be at least 2".into()));
    }
    let params = json!({
        "m": m, "alpha": alpha, "horizon": horizon,
        "subgroup": k.subgroup(),
    });
    let analysis = periodicity::power_sequence_analysis(&elem, &k, horizon)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let mut body = Map::new();
    body.insert("degrees".into(), json!(analysis.degrees));
    body.insert(
        "certificate".into(),
        pj::certificate_to_value(&analysis.certificate),
    );
    body.insert("profile".into(), pj::profile_to_value(&analysis.profile));
    match periodicity::degree_genfun(&analysis.degrees, &analysis.certificate, 0) {
        Ok(gf) => body.insert("genfun".into(), pj::rational_fn_rat_to_value(&gf)),
        Err(e) => body.insert("genfun_error".into(), json!(e.to_string())),
    };
    let table = (
        vec!["n", "degree"],
        analysis
            .degrees
            .iter()
            .enumerate()
            .map(|(n, &d)| vec![json!(n), json!(d)])
            .collect(),
    );
    Ok((
        params,
        Report {
            run: Value::Null,
            body,
            table: Some(table),
        },
    ))
}

fn cmd_lrs(m: u64, terms: &str) -> Result<(Value, Report), CliError> {
    let elems = parse_elem_list(m, terms).map_err(CliError::Parse)?;
    let params = json!({"m": m, "terms": terms});
    let rec = lrs::berlekamp_massey(&elems).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut body = Map::new();
    body.insert("recurrence".into(), pj::recurrence_to_value(&rec));
    let gf = lrs::generating_function(&rec);
    let mut gv = Map::new();
    gv.insert("num".into(), pj::poly_cyc_to_value(gf.num()));
    gv.insert("den".into(), pj::poly_cyc_to_value(gf.den()));
    body.insert("genfun".into(), Value::Object(gv));
    match lrs::zero_set_empirical(&elems) {
        Ok(z) => body.insert("zero_set_empirical".into(), pj::zero_set_to_value(&z)),
        Err(e) => body.insert("zero_set_empirical_error".into(), json!(e.to_string())),
    };
    match lrs::certify_zero_set_order_le2(&rec) {
        Ok(z) => body.insert("zero_set_certified".into(), pj::zero_set_to_value(&z)),
        Err(e) => body.insert("zero_set_certified_error".into(), json!(e.to_string())),
    };
    Ok((
        params,
        Report {
            run: Value::Null,
            body,
            table: None,
        },
    ))
}

fn cmd_iterate(
    m: u64,
    f: &str,
    a: &str,
    nmax: usize,
    size_budget: Option<u64>,
    sigma: Option<u64>,
) -> Result<(Value, Report), CliError> {
    let coeffs = parse_elem_list(m, f).map_err(CliError::Parse)?;
    let poly = CycPoly::new(coeffs).map_err(|e| CliError::Parse(e.to_string()))?;
    let start = parse_elem(m, a).map_err(CliError::Parse)?;
    let size_budget = size_budget
        .unwrap_or_else(|| env_budget("PERSUM_SIZE_BUDGET", dynamics::DEFAULT_SIZE_BUDGET_BITS));
    let sigma_auto = match sigma {
        None => None,
        Some(t) => Some(GaloisAuto::new(m, t).map_err(|e| CliError::Parse(e.to_string()))?),
    };
    let params = json!({
        "m": m, "f": f, "a": a, "nmax": nmax,
        "size_budget": size_budget, "sigma": sigma,
    });
    let orbit =
        dynamics::iterate(&poly, &start, nmax, size_budget).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut body = Map::new();
    body.insert("orbit".into(), pj::orbit_to_value(&orbit));
    let k = SubfieldSpec::rationals(m);
    let mut table = None;
    match dynamics::orbit_degree_analysis(&orbit, &k) {
        Ok((degrees, cert)) => {
            body.insert("degrees".into(), json!(degrees));
            body.insert("certificate".into(), pj::certificate_to_value(&cert));
            table = Some((
                vec!["n", "degree", "bit_size"],
                degrees
                    .iter()
                    .zip(orbit.bit_sizes.iter())
                    .enumerate()
                    .map(|(n, (&d, &b))| vec![json!(n), json!(d), json!(b)])
                    .collect::<Vec<_>>(),
            ));
        }
        Err(e) => {
            body.insert("degrees".into(), Value::Null);
            body.insert("degrees_error".into(), json!(e.to_string()));
        }
    }
    if let Some(auto) = sigma_auto {
        match dynamics::diagonal_fixedness(&poly, &start, &auto, nmax) {
            Ok((pattern, cert)) => {
                body.insert(
                    "diagonal".into(),
                    json!({
                        "t": auto.t(),
                        "pattern": pattern,
                        "certificate": pj::certificate_to_value(&cert),
                    }),
                );
            }
            Err(e) => {
                body.insert("diagonal_error".into(), json!(e.to_string()));
            }
        }
    }
    Ok((
        params,
        Report {
            run: Value::Null,
            body,
            table,
        },
    ))
}

fn cmd_minpoly_seq(
    m: u64,
    terms: &str,
    subgroup: &Option<String>,
) -> Result<(Value, Report), CliError> {
    let elems = parse_elem_list(m, terms).map_err(CliError::Parse)?;
    let k = parse_subgroup(m, subgroup)?;
    let params = json!({"m": m, "terms": terms, "subgroup": k.subgroup()});
    let (records, report) =
        periodicity::minpoly_sequence(&elems, &k).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut body = Map::new();
    body.insert("records".into(), pj::minpoly_records_to_value(&records));
    body.insert("report".into(), pj::rationality_report_to_value(&report));
    Ok((
        params,
        Report {
            run: Value::Null,
            body,
            table: None,
        },
    ))
}

fn emit(cli: &Cli, report: Report) -> Result<(), CliError> {
    let text = match cli.format {
        Format::Json => {
            let mut all = Map::new();
            all.insert("run".into(), report.run);
            for (k, v) in report.body {
                all.insert(k, v);
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(all))
                .map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let (header, rows) = report.table.ok_or_else(|| {
                CliError::Parse(
                    "this subcommand has no flat table; CSV covers only flat sequence tables"
                        .into(),
                )
            })?;
            let mut s = header.join(",");
            s.push('\n');
            for row in rows {
                let cells: Vec<String> = row
                    .iter()
                    .map(|v| match v {
                        Value::String(x) => x.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Internal(e.to_string())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Parse("threads must be at least 1".into()));
        }
        // Best effort: the global pool can only be sized once.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let (name, (params, mut report)) = match &cli.cmd {
        Cmd::Expsum {
            p,
            f,
            kmax,
            budget,
            fq_modulus,
        } => ("expsum", cmd_expsum(*p, f, *kmax, *budget, fq_modulus)?),
        Cmd::Kloosterman {
            p,
            n,
            a,
            kmax,
            budget,
        } => ("kloosterman", cmd_kloosterman(*p, *n, *a, *kmax, *budget)?),
        Cmd::PowerSeq {
            m,
            alpha,
            horizon,
            subgroup,
        } => ("power-seq", cmd_power_seq(*m, alpha, *horizon, subgroup)?),
        Cmd::Lrs { m, terms } => ("lrs", cmd_lrs(*m, terms)?),
        Cmd::Iterate {
            m,
            f,
            a,
            nmax,
            size_budget,
            sigma,
        } => (
            "iterate",
            cmd_iterate(*m, f, a, *nmax, *size_budget, *sigma)?,
        ),
        Cmd::MinpolySeq { m, terms, subgroup } => {
            ("minpoly-seq", cmd_minpoly_seq(*m, terms, subgroup)?)
        }
    };
    report.run = run_spec(cli, name, params);
    emit(cli, report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
