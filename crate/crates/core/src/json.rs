//! JSON views of the crate's exact types.
//!
//! Machine-readable output needs lossless integers, so every unbounded
//! value (numerators, denominators) is emitted as a decimal string and
//! machine-sized values stay native JSON numbers. A rational is the
//! pair ["num", "den"], a cyclotomic number is its full power-basis
//! coordinate vector over a stated modulus, and a finite field
//! configuration is (p, k, modulus coefficients). serde_json's default
//! map keeps keys sorted, so serialization is deterministic.

use crate::cyclotomic::{self, CycElem};
use crate::dynamics::OrbitRecord;
use crate::finitefield::{FqConfig, FqError};
use crate::lrs::{Exactness, RationalFn, Recurrence, ZeroSetDescription};
use crate::periodicity::{
    FixednessProfile, MinPolyRecord, PeriodCertificate, RationalityReport,
};
use crate::poly::Poly;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON value: expected {0}")]
    Shape(&'static str),
    #[error("bad integer literal {0:?}")]
    Int(String),
    #[error("coefficient list longer than the power basis for modulus {0}")]
    TooManyCoeffs(u64),
    #[error(transparent)]
    Fq(#[from] FqError),
}

fn parse_bigint(s: &str) -> Result<BigInt, JsonError> {
    s.parse::<BigInt>().map_err(|_| JsonError::Int(s.into()))
}

pub fn rational_to_value(x: &BigRational) -> Value {
    json!([x.numer().to_string(), x.denom().to_string()])
}

pub fn rational_from_value(v: &Value) -> Result<BigRational, JsonError> {
    let pair = v.as_array().ok_or(JsonError::Shape("[num, den] pair"))?;
    if pair.len() != 2 {
        return Err(JsonError::Shape("[num, den] pair"));
    }
    let num = pair[0].as_str().ok_or(JsonError::Shape("decimal string"))?;
    let den = pair[1].as_str().ok_or(JsonError::Shape("decimal string"))?;
    let den = parse_bigint(den)?;
    if den == BigInt::from(0) {
        return Err(JsonError::Shape("nonzero denominator"));
    }
    Ok(BigRational::new(parse_bigint(num)?, den))
}

pub fn cyc_to_value(a: &CycElem) -> Value {
    json!({
        "m": a.modulus(),
        "coeffs": a.coeffs().iter().map(rational_to_value).collect::<Vec<_>>(),
    })
}

pub fn cyc_from_value(v: &Value) -> Result<CycElem, JsonError> {
    let obj = v.as_object().ok_or(JsonError::Shape("{m, coeffs} object"))?;
    let m = obj
        .get("m")
        .and_then(Value::as_u64)
        .ok_or(JsonError::Shape("modulus m"))?;
    let coeffs = obj
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or(JsonError::Shape("coeffs array"))?;
    if coeffs.len() as u64 > cyclotomic::euler_phi(m) {
        return Err(JsonError::TooManyCoeffs(m));
    }
    let coeffs: Result<Vec<BigRational>, JsonError> =
        coeffs.iter().map(rational_from_value).collect();
    Ok(CycElem::from_coeffs(m, coeffs?))
}

pub fn poly_cyc_to_value(p: &Poly<CycElem>) -> Value {
    Value::Array(p.coeffs().iter().map(cyc_to_value).collect())
}

pub fn rational_fn_cyc_to_value(rf: &RationalFn<CycElem>) -> Value {
    json!({
        "num": poly_cyc_to_value(rf.num()),
        "den": poly_cyc_to_value(rf.den()),
    })
}

pub fn rational_fn_rat_to_value(rf: &RationalFn<BigRational>) -> Value {
    let ser =
        |p: &Poly<BigRational>| Value::Array(p.coeffs().iter().map(rational_to_value).collect());
    json!({ "num": ser(rf.num()), "den": ser(rf.den()) })
}

pub fn fq_config_to_value(cfg: &FqConfig) -> Value {
    json!({
        "p": cfg.p(),
        "k": cfg.k() as u64,
        "modulus": cfg.modulus(),
    })
}

pub fn fq_config_from_value(v: &Value) -> Result<Arc<FqConfig>, JsonError> {
    let obj = v
        .as_object()
        .ok_or(JsonError::Shape("{p, k, modulus} object"))?;
    let p = obj
        .get("p")
        .and_then(Value::as_u64)
        .ok_or(JsonError::Shape("prime p"))?;
    let k = obj
        .get("k")
        .and_then(Value::as_u64)
        .ok_or(JsonError::Shape("extension degree k"))?;
    let modulus: Option<Vec<u64>> = obj
        .get("modulus")
        .and_then(Value::as_array)
        .map(|a| a.iter().map(Value::as_u64).collect::<Option<Vec<u64>>>())
        .ok_or(JsonError::Shape("modulus coefficient array"))?;
    let modulus = modulus.ok_or(JsonError::Shape("modulus coefficient array"))?;
    Ok(FqConfig::with_modulus(p, k as usize, modulus)?)
}

pub fn certificate_to_value(c: &PeriodCertificate) -> Value {
    json!({
        "N": c.n,
        "r": c.r,
        "horizon": c.horizon,
        "exact": c.exact,
    })
}

pub fn certificate_from_value(v: &Value) -> Result<PeriodCertificate, JsonError> {
    let obj = v
        .as_object()
        .ok_or(JsonError::Shape("{N, r, horizon, exact} object"))?;
    let field = |k: &'static str| {
        obj.get(k)
            .and_then(Value::as_u64)
            .ok_or(JsonError::Shape("certificate field"))
    };
    Ok(PeriodCertificate {
        n: field("N")?,
        r: field("r")?,
        horizon: field("horizon")?,
        exact: obj
            .get("exact")
            .and_then(Value::as_bool)
            .ok_or(JsonError::Shape("exact flag"))?,
    })
}

pub fn recurrence_to_value(rec: &Recurrence<CycElem>) -> Value {
    json!({
        "order": rec.order() as u64,
        "coeffs": rec.coeffs().iter().map(cyc_to_value).collect::<Vec<_>>(),
        "confirmed": rec.confirmed(),
    })
}

pub fn exactness_str(e: Exactness) -> &'static str {
    match e {
        Exactness::Certified => "certified",
        Exactness::Empirical => "empirical",
        Exactness::Undecidable => "undecidable",
    }
}

pub fn zero_set_to_value(z: &ZeroSetDescription) -> Value {
    json!({
        "exceptional": z.exceptional,
        "modulus": z.modulus,
        "residues": z.residues,
        "start": z.start,
        "horizon": z.horizon,
        "exactness": exactness_str(z.exactness),
    })
}

/// Rows keyed by the automorphism residue t (as a decimal key), each
/// carrying its boolean pattern and certificate, plus the combined
/// pre-period and period.
pub fn profile_to_value(p: &FixednessProfile) -> Value {
    let mut rows = Map::new();
    for row in &p.rows {
        rows.insert(
            row.t.to_string(),
            json!({
                "pattern": row.pattern,
                "N": row.cert.n,
                "r": row.cert.r,
                "exact": row.cert.exact,
            }),
        );
    }
    json!({
        "rows": rows,
        "combined": { "N": p.combined_n, "r": p.combined_r },
    })
}

pub fn orbit_to_value(o: &OrbitRecord) -> Value {
    json!({
        "points": o.points.iter().map(cyc_to_value).collect::<Vec<_>>(),
        "bit_sizes": o.bit_sizes,
        "truncated": o.truncated,
    })
}

pub fn minpoly_records_to_value(records: &[MinPolyRecord]) -> Value {
    Value::Array(
        records
            .iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "stabilizer": r.stabilizer,
                    "poly": poly_cyc_to_value(&r.poly),
                })
            })
            .collect(),
    )
}

pub fn rationality_report_to_value(rep: &RationalityReport) -> Value {
    json!({
        "pre_period": rep.pre_period,
        "period": rep.period,
        "classes": rep.classes.iter().map(|c| {
            json!({
                "residue": c.residue,
                "coefficients": c.entries.iter().map(|e| {
                    json!({
                        "coeff": e.coeff as u64,
                        "order": e.order as u64,
                        "confirmed": e.confirmed,
                    })
                }).collect::<Vec<_>>(),
            })
        }).collect::<Vec<_>>(),
    })
}
