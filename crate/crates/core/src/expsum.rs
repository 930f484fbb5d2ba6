//! Additive character sums over finite fields, computed exactly.
//!
//! The k-th sum of a polynomial f over F_{p^k} in n variables is
//! sum of zeta_p^{Tr(f(x))} over all tuples x; Kloosterman sums range over
//! invertible tuples and add the shifted inverse term a/(x_1...x_n). Both
//! land in Z[zeta_p], so the whole computation reduces to counting how
//! often each trace residue occurs: the kernels below accumulate machine
//! integer tallies and convert to a cyclotomic element once at the end.
//!
//! Three kernels share that contract. A generic odometer walks every tuple
//! and evaluates f through per-variable power tables; a multiplicative walk
//! handles one-variable monomials c*x^d by stepping indices in the cyclic
//! group; the Kloosterman kernel looks traces up in a precomputed table of
//! Tr(g^j), which turns the inner loop into index arithmetic. Kernels are
//! chunked by fixed work size and merged by exact tally addition, so the
//! result is bit-identical no matter how many worker threads run.

use crate::cyclotomic::{self, CycElem, SubfieldSpec};
use crate::finitefield::{FqConfig, FqElem, FqError};
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpSumError {
    #[error("polynomial: {0}")]
    BadPoly(String),
    #[error("enumeration of {needed} points exceeds budget {budget}")]
    Budget { needed: u128, budget: u64 },
    #[error("the Kloosterman shift a must be nonzero mod p")]
    ZeroShift,
    #[error("degree formula needs p = 1 (mod d); got p = {p}, d = {d}")]
    FormulaPrecondition { p: u64, d: u64 },
    #[error("subfield modulus {0} does not match the character modulus {1}")]
    SubfieldMismatch(u64, u64),
    #[error(transparent)]
    Field(#[from] FqError),
}

/// Fixed work-chunk size for the parallel kernels. Chunk boundaries depend
/// only on the problem size, never on the worker count, which together with
/// commutative tally merging keeps output thread-count independent.
const CHUNK: u64 = 1 << 16;

// ---- Sparse multivariate polynomials over F_p ----

/// A polynomial in n variables as a list of (coefficient, exponent vector)
/// terms. Coefficients are reduced and zero terms dropped against a given
/// prime before any kernel runs; duplicate exponent vectors are rejected.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    n_vars: usize,
    terms: Vec<(u64, Vec<u64>)>,
}

impl MultiPoly {
    pub fn new(n_vars: usize, terms: Vec<(u64, Vec<u64>)>) -> Result<Self, ExpSumError> {
        if n_vars == 0 {
            return Err(ExpSumError::BadPoly("need at least one variable".into()));
        }
        for (_, exps) in &terms {
            if exps.len() != n_vars {
                return Err(ExpSumError::BadPoly(format!(
                    "term has {} exponents, expected {}",
                    exps.len(),
                    n_vars
                )));
            }
        }
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                if terms[i].1 == terms[j].1 {
                    return Err(ExpSumError::BadPoly(format!(
                        "duplicate exponent vector {:?}",
                        terms[i].1
                    )));
                }
            }
        }
        Ok(MultiPoly { n_vars, terms })
    }

    /// Parses the term-list syntax "c:e1,e2,...,en", terms separated by
    /// ';', '+', or whitespace. "0:0" is the zero polynomial in one
    /// variable.
    pub fn parse(s: &str) -> Result<Self, ExpSumError> {
        let mut terms = Vec::new();
        let mut n_vars = None;
        for tok in s.split(|c: char| c == ';' || c == '+' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            let (c_str, e_str) = tok
                .split_once(':')
                .ok_or_else(|| ExpSumError::BadPoly(format!("term '{tok}' is missing ':'")))?;
            let c: u64 = c_str
                .trim()
                .parse()
                .map_err(|_| ExpSumError::BadPoly(format!("bad coefficient '{c_str}'")))?;
            let exps: Vec<u64> = e_str
                .split(',')
                .map(|e| {
                    e.trim()
                        .parse()
                        .map_err(|_| ExpSumError::BadPoly(format!("bad exponent '{e}'")))
                })
                .collect::<Result<_, _>>()?;
            match n_vars {
                None => n_vars = Some(exps.len()),
                Some(n) if n != exps.len() => {
                    return Err(ExpSumError::BadPoly(
                        "terms disagree on the number of variables".into(),
                    ))
                }
                _ => {}
            }
            terms.push((c, exps));
        }
        let n_vars =
            n_vars.ok_or_else(|| ExpSumError::BadPoly("empty polynomial string".into()))?;
        MultiPoly::new(n_vars, terms)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> &[(u64, Vec<u64>)] {
        &self.terms
    }

    /// Coefficients reduced mod p, zero terms dropped.
    pub fn reduced_mod(&self, p: u64) -> MultiPoly {
        MultiPoly {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .filter_map(|(c, e)| {
                    let c = c % p;
                    if c == 0 {
                        None
                    } else {
                        Some((c, e.clone()))
                    }
                })
                .collect(),
        }
    }

    pub fn is_zero_mod(&self, p: u64) -> bool {
        self.terms.iter().all(|(c, _)| c % p == 0)
    }

    /// True when the polynomial is a single monomial c*x^d in one variable
    /// with d >= 1 (the multiplicative-walk fast path).
    fn as_single_monomial(&self, p: u64) -> Option<(u64, u64)> {
        let red = self.reduced_mod(p);
        if red.n_vars == 1 && red.terms.len() == 1 && red.terms[0].1[0] >= 1 {
            Some((red.terms[0].0, red.terms[0].1[0]))
        } else {
            None
        }
    }

    pub fn eval(&self, xs: &[FqElem]) -> FqElem {
        assert_eq!(xs.len(), self.n_vars);
        let cfg = xs[0].config();
        let mut acc = cfg.zero();
        for (c, exps) in &self.terms {
            let mut prod = cfg.from_int(*c);
            for (x, &e) in xs.iter().zip(exps) {
                if e > 0 {
                    prod = prod.mul(&x.pow(e));
                }
            }
            acc = acc.add(&prod);
        }
        acc
    }
}

// ---- Tally plumbing ----

fn merge_tallies(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Converts a count-per-residue tally into the exact element
/// sum tally[r] * zeta_p^r of Z[zeta_p].
pub fn tally_to_elem(p: u64, tally: &[u64]) -> CycElem {
    let terms: Vec<(u64, BigRational)> = tally
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(r, &c)| (r as u64, BigRational::from_integer(c.into())))
        .collect();
    CycElem::from_exponent_terms(p, &terms)
}

/// Folds an unreduced tally (indexed by raw residue sums) down to length p.
fn fold_tally(raw: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; p as usize];
    for (s, &c) in raw.iter().enumerate() {
        if c != 0 {
            out[s % p as usize] += c;
        }
    }
    out
}

// ---- Trace table for the cyclic-group kernels ----

/// Traces of g^j for j in 0..q-1, plus discrete logs of the requested
/// targets, all found in one chunk-parallel sweep. Requires p < 256 so the
/// table fits in bytes.
fn trace_table(cfg: &Arc<FqConfig>, targets: &[FqElem]) -> (Vec<u8>, Vec<Option<u64>>) {
    let g = cfg.multiplicative_generator();
    let m = (cfg.order() - 1) as u64;
    let mut table = vec![0u8; m as usize];
    let chunks: Vec<(u64, &mut [u8])> = {
        let mut v = Vec::new();
        let mut rest: &mut [u8] = &mut table;
        let mut start = 0u64;
        while !rest.is_empty() {
            let take = (CHUNK as usize).min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            v.push((start, head));
            start += take as u64;
            rest = tail;
        }
        v
    };
    let found: Vec<Option<u64>> = chunks
        .into_par_iter()
        .map(|(start, slice)| {
            let mut w = g.pow(start);
            let mut local: Vec<Option<u64>> = vec![None; targets.len()];
            for (off, out) in slice.iter_mut().enumerate() {
                *out = w.trace() as u8;
                for (ti, t) in targets.iter().enumerate() {
                    if local[ti].is_none() && w == *t {
                        local[ti] = Some(start + off as u64);
                    }
                }
                w = w.mul(&g);
            }
            local
        })
        .reduce(
            || vec![None; targets.len()],
            |a, b| {
                a.into_iter()
                    .zip(b)
                    .map(|(x, y)| match (x, y) {
                        (Some(i), Some(j)) => Some(i.min(j)),
                        (x, y) => x.or(y),
                    })
                    .collect()
            },
        );
    (table, found)
}

// ---- The three kernels ----

fn generic_tally(
    cfg: &Arc<FqConfig>,
    f: &MultiPoly,
    budget: u64,
) -> Result<Vec<u64>, ExpSumError> {
    let p = cfg.p();
    let q = cfg.order();
    let n = f.n_vars();
    let total = q.checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(ExpSumError::Budget {
            needed: total,
            budget,
        });
    }
    let f = f.reduced_mod(p);
    let max_exp: Vec<u64> = (0..n)
        .map(|v| f.terms.iter().map(|(_, e)| e[v]).max().unwrap_or(0))
        .collect();
    let elem_at = |i: u128| -> FqElem {
        let k = cfg.k();
        let mut v = i;
        let mut coeffs = vec![0u64; k];
        for slot in (0..k).rev() {
            coeffs[slot] = (v % p as u128) as u64;
            v /= p as u128;
        }
        cfg.element(coeffs)
    };
    let rebuild = |pows: &mut Vec<FqElem>, x: &FqElem, cap: u64| {
        pows.clear();
        pows.push(cfg.one());
        for e in 1..=cap {
            let prev = pows[(e - 1) as usize].clone();
            pows.push(prev.mul(x));
        }
    };
    let mut idx = vec![0u128; n];
    let mut pows: Vec<Vec<FqElem>> = Vec::with_capacity(n);
    for v in 0..n {
        let mut t = Vec::new();
        rebuild(&mut t, &cfg.zero(), max_exp[v]);
        pows.push(t);
    }
    let mut tally = vec![0u64; p as usize];
    let mut remaining = total;
    loop {
        // Tr is F_p-linear, so Tr(f(x)) = sum of c_t * Tr(prod of powers).
        let mut residue = 0u64;
        for (c, exps) in &f.terms {
            let mut prod = cfg.one();
            for (v, &e) in exps.iter().enumerate() {
                if e > 0 {
                    prod = prod.mul(&pows[v][e as usize]);
                }
            }
            residue = (residue + c * prod.trace()) % p;
        }
        tally[residue as usize] += 1;
        remaining -= 1;
        if remaining == 0 {
            break;
        }
        // Odometer advance, last variable fastest.
        let mut v = n - 1;
        loop {
            idx[v] += 1;
            if idx[v] < q {
                rebuild(&mut pows[v], &elem_at(idx[v]), max_exp[v]);
                break;
            }
            idx[v] = 0;
            rebuild(&mut pows[v], &cfg.zero(), max_exp[v]);
            v = v.checked_sub(1).expect("odometer overflow");
        }
    }
    Ok(tally)
}

fn monomial_tally(
    cfg: &Arc<FqConfig>,
    c: u64,
    d: u64,
    budget: u64,
) -> Result<Vec<u64>, ExpSumError> {
    let p = cfg.p();
    let q = cfg.order();
    if q > budget as u128 {
        return Err(ExpSumError::Budget {
            needed: q,
            budget,
        });
    }
    let m = (q - 1) as u64;
    let mut tally = vec![0u64; p as usize];
    // x = 0 contributes Tr(0) since d >= 1.
    tally[0] += 1;
    let d_red = d % m;
    if d_red == 0 {
        // x^d = 1 on the whole group.
        let tr = cfg.from_int(c).trace();
        tally[tr as usize] += m;
        return Ok(tally);
    }
    let (table, dlogs) = trace_table(cfg, &[cfg.from_int(c)]);
    let e_c = dlogs[0].expect("a nonzero scalar lies in the multiplicative group");
    let starts: Vec<u64> = (0..m).step_by(CHUNK as usize).collect();
    let partial = starts
        .into_par_iter()
        .map(|start| {
            let end = (start + CHUNK).min(m);
            let mut local = vec![0u64; p as usize];
            // Index of c * g^(i*d) in the table, stepped by d per i.
            let mut j = ((e_c as u128 + start as u128 * d_red as u128) % m as u128) as u64;
            for _ in start..end {
                local[table[j as usize] as usize] += 1;
                j += d_red;
                if j >= m {
                    j -= m;
                }
            }
            local
        })
        .reduce(|| vec![0u64; p as usize], merge_tallies);
    Ok(merge_tallies(tally, partial))
}

fn kloosterman_tally(
    cfg: &Arc<FqConfig>,
    n: usize,
    a: u64,
    budget: u64,
) -> Result<Vec<u64>, ExpSumError> {
    let p = cfg.p();
    let q = cfg.order();
    let m = (q - 1) as u64;
    let points = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if points > budget as u128 {
        return Err(ExpSumError::Budget {
            needed: points,
            budget,
        });
    }
    let (table, dlogs) = trace_table(cfg, &[cfg.from_int(a)]);
    let e_a = dlogs[0].expect("a nonzero scalar lies in the multiplicative group");
    let raw_len = (n + 1) * (p as usize - 1) + 1;
    let raw = match n {
        1 => {
            let starts: Vec<u64> = (0..m).step_by(CHUNK as usize).collect();
            starts
                .into_par_iter()
                .map(|start| {
                    let end = (start + CHUNK).min(m);
                    let mut local = vec![0u64; raw_len];
                    // Index of a * g^(-i), stepped down by one per i.
                    let mut j = (e_a + m - start % m) % m;
                    for i in start..end {
                        local[(table[i as usize] as u64 + table[j as usize] as u64) as usize] += 1;
                        j = if j == 0 { m - 1 } else { j - 1 };
                    }
                    local
                })
                .reduce(|| vec![0u64; raw_len], merge_tallies)
        }
        2 => {
            let starts: Vec<u64> = (0..m).step_by(256).collect();
            starts
                .into_par_iter()
                .map(|start| {
                    let end = (start + 256).min(m);
                    let mut local = vec![0u64; raw_len];
                    for i in start..end {
                        let base = table[i as usize] as u64;
                        // Index of a * g^(-i-j) for j = 0, stepped down.
                        let mut idx = (e_a + m - i % m) % m;
                        for j in 0..m {
                            local[(base
                                + table[j as usize] as u64
                                + table[idx as usize] as u64)
                                as usize] += 1;
                            idx = if idx == 0 { m - 1 } else { idx - 1 };
                        }
                    }
                    local
                })
                .reduce(|| vec![0u64; raw_len], merge_tallies)
        }
        _ => {
            // General n: odometer over the first n-1 indices, incremental
            // index for the inverse factor in the innermost loop. Budgets
            // keep these runs small, so this path stays serial.
            let mut local = vec![0u64; raw_len];
            let mut outer = vec![0u64; n - 1];
            loop {
                let base: u64 = outer.iter().map(|&i| table[i as usize] as u64).sum();
                let outer_sum: u64 = outer.iter().map(|&i| i % m).sum::<u64>() % m;
                let mut idx = (e_a + m - outer_sum % m) % m;
                for j in 0..m {
                    local[(base + table[j as usize] as u64 + table[idx as usize] as u64)
                        as usize] += 1;
                    idx = if idx == 0 { m - 1 } else { idx - 1 };
                }
                let mut v = n - 1;
                loop {
                    if v == 0 {
                        return Ok(fold_tally(&local, p));
                    }
                    v -= 1;
                    outer[v] += 1;
                    if outer[v] < m {
                        break;
                    }
                    outer[v] = 0;
                }
            }
        }
    };
    Ok(fold_tally(&raw, p))
}

// ---- Public operations ----

/// Exact tally of trace residues for the k-th sum of f; mostly a building
/// block for [`exp_sum`], exposed for the Galois-closure cross-checks.
pub fn exp_sum_tally(
    cfg: &Arc<FqConfig>,
    f: &MultiPoly,
    budget: u64,
) -> Result<Vec<u64>, ExpSumError> {
    let p = cfg.p();
    if f.is_zero_mod(p) {
        // Every point contributes zeta^0.
        let total = cfg
            .order()
            .checked_pow(f.n_vars() as u32)
            .unwrap_or(u128::MAX);
        if total > budget as u128 {
            return Err(ExpSumError::Budget {
                needed: total,
                budget,
            });
        }
        let mut tally = vec![0u64; p as usize];
        tally[0] = total as u64;
        return Ok(tally);
    }
    if p < 256 {
        if let Some((c, d)) = f.as_single_monomial(p) {
            return monomial_tally(cfg, c, d, budget);
        }
    }
    generic_tally(cfg, f, budget)
}

/// The k-th exponential sum of f over F_{p^k}, an exact element of
/// Z[zeta_p]. For p = 2 the value is rational (zeta_2 = -1); the API stays
/// total there rather than refusing.
pub fn exp_sum(f: &MultiPoly, p: u64, k: usize, budget: u64) -> Result<CycElem, ExpSumError> {
    let cfg = FqConfig::new(p, k)?;
    exp_sum_with_config(&cfg, f, budget)
}

/// Same as [`exp_sum`] with an explicit field model; the result must not
/// depend on the modulus choice (traces are intrinsic), which the tests
/// pin down.
pub fn exp_sum_with_config(
    cfg: &Arc<FqConfig>,
    f: &MultiPoly,
    budget: u64,
) -> Result<CycElem, ExpSumError> {
    Ok(tally_to_elem(cfg.p(), &exp_sum_tally(cfg, f, budget)?))
}

/// The n-dimensional Kloosterman sum over F_{p^k}: the sum of
/// zeta_p^{Tr(x_1 + ... + x_n + a/(x_1...x_n))} over invertible tuples.
pub fn kloosterman_sum(
    n: usize,
    a: u64,
    p: u64,
    k: usize,
    budget: u64,
) -> Result<CycElem, ExpSumError> {
    let cfg = FqConfig::new(p, k)?;
    kloosterman_sum_with_config(&cfg, n, a, budget)
}

pub fn kloosterman_sum_with_config(
    cfg: &Arc<FqConfig>,
    n: usize,
    a: u64,
    budget: u64,
) -> Result<CycElem, ExpSumError> {
    assert!(n >= 1);
    let p = cfg.p();
    if a % p == 0 {
        return Err(ExpSumError::ZeroShift);
    }
    Ok(tally_to_elem(p, &kloosterman_tally(cfg, n, a % p, budget)?))
}

/// Degrees over the fixed field of K of the sums S_1(f) .. S_{k_max}(f).
pub fn degree_sequence(
    f: &MultiPoly,
    p: u64,
    k_max: usize,
    k_field: &SubfieldSpec,
    budget: u64,
) -> Result<Vec<u64>, ExpSumError> {
    if k_field.modulus() != p {
        return Err(ExpSumError::SubfieldMismatch(k_field.modulus(), p));
    }
    (1..=k_max)
        .map(|k| Ok(cyclotomic::degree(&exp_sum(f, p, k, budget)?, k_field)))
        .collect()
}

/// The closed-form degree of the k-th sum of x^d when p = 1 (mod d):
/// d / gcd(d, k).
pub fn gauss_degree_formula(p: u64, d: u64, k: u64) -> Result<u64, ExpSumError> {
    if d == 0 || p % d != 1 || d.gcd(&p) != 1 {
        return Err(ExpSumError::FormulaPrecondition { p, d });
    }
    Ok(d / d.gcd(&k))
}

/// The closed-form degree of the n-dimensional Kloosterman sum:
/// (p - 1) / gcd(n + 1, p - 1). Valid when p does not divide k; the
/// caller owns that hypothesis (the value at p | k is genuinely open).
pub fn kloosterman_degree_formula(p: u64, n: u64) -> u64 {
    (p - 1) / (n + 1).gcd(&(p - 1))
}

/// Classical square-root cancellation diagnostic for a one-variable sum of
/// degree d with gcd(d, p) = 1: every embedding obeys
/// |S_k| <= (d - 1) * p^(k/2), up to the caller's tolerance.
pub fn weil_bound_ok(s: &CycElem, d: u64, p: u64, k: usize, tol: f64) -> bool {
    let bound = (d.saturating_sub(1)) as f64 * (p as f64).powf(k as f64 / 2.0) + tol;
    cyclotomic::max_abs_upper_bound(s) <= bound
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u64 = 100_000_000;

    fn q(p: u64) -> SubfieldSpec {
        SubfieldSpec::rationals(p)
    }

    #[test]
    fn parse_round_trips() {
        let f = MultiPoly::parse("1:3").unwrap();
        assert_eq!(f.n_vars(), 1);
        assert_eq!(f.terms(), &[(1, vec![3])]);
        let g = MultiPoly::parse("1:1,1; 2:0,3").unwrap();
        assert_eq!(g.n_vars(), 2);
        let zero = MultiPoly::parse("0:0").unwrap();
        assert!(zero.is_zero_mod(5));
        assert!(MultiPoly::parse("1:1,1 2:3").is_err());
        assert!(MultiPoly::parse("").is_err());
        assert!(MultiPoly::parse("x:1").is_err());
        assert!(MultiPoly::new(1, vec![(1, vec![2]), (3, vec![2])]).is_err());
    }

    #[test]
    fn zero_polynomial_sums_to_field_size() {
        let f = MultiPoly::parse("0:0").unwrap();
        assert_eq!(exp_sum(&f, 3, 1, B).unwrap(), CycElem::from_integer(3, 3));
        assert_eq!(exp_sum(&f, 3, 2, B).unwrap(), CycElem::from_integer(3, 9));
    }

    #[test]
    fn quadratic_gauss_sum_at_three() {
        // Over F_3 the squares 0, 1, 1 give traces 0, 1, 1.
        let f = MultiPoly::parse("1:2").unwrap();
        let s1 = exp_sum(&f, 3, 1, B).unwrap();
        let expected = CycElem::from_coeffs(
            3,
            vec![
                BigRational::from_integer(1.into()),
                BigRational::from_integer(2.into()),
            ],
        );
        assert_eq!(s1, expected);
        // Over F_9 the sum collapses to a rational.
        let s2 = exp_sum(&f, 3, 2, B).unwrap();
        assert_eq!(s2, CycElem::from_integer(3, 3));
        // Lifting relation oracle: S_k = -(-S_1)^k.
        let s3 = exp_sum(&f, 3, 3, B).unwrap();
        let lifted = -&(-&s1).pow(3);
        assert_eq!(s3, lifted);
    }

    #[test]
    fn walk_and_generic_kernels_agree() {
        let f = MultiPoly::parse("1:3").unwrap();
        for k in 1..=3 {
            let cfg = FqConfig::new(7, k).unwrap();
            let via_walk = exp_sum_tally(&cfg, &f, B).unwrap();
            let via_generic = generic_tally(&cfg, &f, B).unwrap();
            assert_eq!(via_walk, via_generic, "k = {k}");
        }
        // Also with a coefficient other than 1 and a two-term polynomial.
        let g = MultiPoly::parse("3:4").unwrap();
        let cfg = FqConfig::new(7, 2).unwrap();
        assert_eq!(
            exp_sum_tally(&cfg, &g, B).unwrap(),
            generic_tally(&cfg, &g, B).unwrap()
        );
        let two_terms = MultiPoly::parse("1:2;1:1").unwrap();
        assert_eq!(
            exp_sum_with_config(&cfg, &two_terms, B).unwrap(),
            tally_to_elem(7, &generic_tally(&cfg, &two_terms, B).unwrap())
        );
    }

    #[test]
    fn kloosterman_hand_values() {
        // p = 3: the two points give exponents 1+1 = 2 and 2+2 = 4 = 1, so
        // the sum is zeta + zeta^2 = -1.
        let s = kloosterman_sum(1, 1, 3, 1, B).unwrap();
        assert_eq!(s, CycElem::from_integer(3, -1));
        // p = 5: inverse pairs (1,1), (2,3), (3,2), (4,4).
        let s = kloosterman_sum(1, 1, 5, 1, B).unwrap();
        let expected = CycElem::from_exponent_terms(
            5,
            &[
                (0, BigRational::from_integer(2.into())),
                (2, BigRational::from_integer(1.into())),
                (3, BigRational::from_integer(1.into())),
            ],
        );
        assert_eq!(s, expected);
        assert_eq!(cyclotomic::degree(&s, &q(5)), 2);
        assert_eq!(kloosterman_degree_formula(5, 1), 2);
    }

    #[test]
    fn kloosterman_rejects_zero_shift() {
        assert_eq!(kloosterman_sum(1, 5, 5, 1, B), Err(ExpSumError::ZeroShift));
    }

    #[test]
    fn kloosterman_two_dimensional_small() {
        // Brute force over (F_3^*)^2 by hand: 4 points, exponent
        // x1 + x2 + 1/(x1 x2).
        let cfg = FqConfig::new(3, 1).unwrap();
        let mut expect = vec![0u64; 3];
        for x1 in 1..3u64 {
            for x2 in 1..3u64 {
                let prod_inv = cfg.from_int(x1 * x2).inv().unwrap();
                let e = cfg.from_int(x1 + x2).add(&prod_inv);
                expect[e.trace() as usize] += 1;
            }
        }
        let got = kloosterman_tally(&cfg, 2, 1, B).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn kloosterman_general_n_matches_two_dim_kernel() {
        let cfg = FqConfig::new(5, 1).unwrap();
        let two = kloosterman_tally(&cfg, 2, 2, B).unwrap();
        // Route the same computation through the generic odometer path by
        // asking for n = 3 over a domain where one variable is forced: not
        // directly comparable, so instead check n = 3 against brute force.
        let mut expect = vec![0u64; 5];
        for x1 in 1..5u64 {
            for x2 in 1..5u64 {
                for x3 in 1..5u64 {
                    let inv = cfg.from_int(x1 * x2 * x3).inv().unwrap();
                    let e = cfg.from_int(x1 + x2 + x3).add(&inv.mul(&cfg.from_int(2)));
                    expect[e.trace() as usize] += 1;
                }
            }
        }
        let got = kloosterman_tally(&cfg, 3, 2, B).unwrap();
        assert_eq!(got, expect);
        // And the 2-dimensional kernel against its own brute force.
        let mut expect2 = vec![0u64; 5];
        for x1 in 1..5u64 {
            for x2 in 1..5u64 {
                let inv = cfg.from_int(x1 * x2).inv().unwrap();
                let e = cfg.from_int(x1 + x2).add(&inv.mul(&cfg.from_int(2)));
                expect2[e.trace() as usize] += 1;
            }
        }
        assert_eq!(two, expect2);
    }

    #[test]
    fn degree_sequence_of_cubes_at_seven() {
        let f = MultiPoly::parse("1:3").unwrap();
        let degs = degree_sequence(&f, 7, 3, &q(7), B).unwrap();
        assert_eq!(degs, vec![3, 3, 1]);
    }

    #[test]
    fn coprime_exponent_gives_degree_one() {
        let f = MultiPoly::parse("1:5").unwrap();
        let degs = degree_sequence(&f, 7, 2, &q(7), B).unwrap();
        assert_eq!(degs, vec![1, 1]);
    }

    #[test]
    fn formula_edges() {
        assert_eq!(gauss_degree_formula(7, 3, 3).unwrap(), 1);
        assert_eq!(gauss_degree_formula(7, 3, 1).unwrap(), 3);
        assert_eq!(gauss_degree_formula(5, 4, 6).unwrap(), 2);
        assert!(gauss_degree_formula(7, 4, 1).is_err());
        assert_eq!(kloosterman_degree_formula(3, 1), 1);
        assert_eq!(kloosterman_degree_formula(7, 2), 2);
    }

    #[test]
    fn galois_closure_of_sums() {
        // sigma_t(S) must equal the sum assembled with zeta^t, i.e. the
        // tally re-read along residues t*r.
        let f = MultiPoly::parse("1:3").unwrap();
        let cfg = FqConfig::new(7, 2).unwrap();
        let tally = exp_sum_tally(&cfg, &f, B).unwrap();
        let s = tally_to_elem(7, &tally);
        for t in [2u64, 3, 6] {
            let twisted: Vec<(u64, BigRational)> = tally
                .iter()
                .enumerate()
                .map(|(r, &c)| ((r as u64 * t) % 7, BigRational::from_integer(c.into())))
                .collect();
            let direct = CycElem::from_exponent_terms(7, &twisted);
            let via_auto = cyclotomic::GaloisAuto::new(7, t).unwrap().apply(&s);
            assert_eq!(direct, via_auto, "t = {t}");
        }
    }

    #[test]
    fn budget_is_enforced_everywhere() {
        let f = MultiPoly::parse("1:2").unwrap();
        assert!(matches!(
            exp_sum(&f, 7, 4, 100),
            Err(ExpSumError::Budget { .. })
        ));
        assert!(matches!(
            kloosterman_sum(2, 1, 7, 2, 100),
            Err(ExpSumError::Budget { .. })
        ));
    }

    #[test]
    fn modulus_independence_small() {
        use crate::finitefield::find_irreducible_nth;
        let f = MultiPoly::parse("1:2").unwrap();
        let a = FqConfig::with_modulus(5, 2, find_irreducible_nth(5, 2, 0).unwrap()).unwrap();
        let b = FqConfig::with_modulus(5, 2, find_irreducible_nth(5, 2, 1).unwrap()).unwrap();
        assert_eq!(
            exp_sum_with_config(&a, &f, B).unwrap(),
            exp_sum_with_config(&b, &f, B).unwrap()
        );
    }

    #[test]
    fn weil_bound_sanity_small() {
        let f = MultiPoly::parse("1:2").unwrap();
        for k in 1..=4 {
            let s = exp_sum(&f, 3, k, B).unwrap();
            assert!(weil_bound_ok(&s, 2, 3, k, 1e-6), "k = {k}");
        }
    }

    #[test]
    fn two_is_and_stays_rational() {
        // p = 2 sums are rational because zeta_2 = -1.
        let f = MultiPoly::parse("1:3").unwrap();
        let s = exp_sum(&f, 2, 3, B).unwrap();
        assert!(s.is_rational());
        assert_eq!(cyclotomic::degree(&s, &q(2)), 1);
    }
}
