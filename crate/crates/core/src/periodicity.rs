//! Virtual periodicity of Galois-theoretic sequences.
//!
//! A sequence is virtually periodic when it becomes r-periodic after some
//! pre-period N. For a sequence of cyclotomic numbers the interesting
//! sequences are derived ones: for each automorphism sigma in H_K the
//! boolean row b_n = [sigma fixes a_n], the degree sequence
//! deg_K(a_n) = |H_K| / |Stab(a_n)|, and the minimal polynomial sequence
//! P_n. The degree row is a function of the fixedness rows, so any common
//! period of the rows is a period of the degrees; the analysis recomputes
//! both and cross-checks the divisibility instead of trusting either side.
//!
//! Detection is empirical: it reports the least pre-period N admitting a
//! period, then the least period at that N, and demands two full periods
//! inside the horizon. (Choosing the least period globally first would
//! let degenerate constant tails shadow the true period; the fixedness
//! rows of root-of-unity powers are the canonical counterexample.) The
//! one fully effective case is a power sequence alpha^n, where the fixed
//! set of each sigma is exactly an arithmetic progression and every
//! certificate is exact rather than empirical.

use crate::cyclotomic::{self, CycElem, GaloisAuto, SubfieldSpec};
use crate::field::Field;
use crate::lrs::{self, LrsError, RationalFn};
use crate::poly::Poly;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PeriodicityError {
    #[error("need at least {need} terms, got {got}")]
    TooFewTerms { need: usize, got: usize },
    #[error("no virtually periodic fit within horizon {horizon}; increase the horizon")]
    NoPeriodicFit { horizon: usize },
    #[error("degree period {degree_r} does not divide the combined fixedness period {fixed_r}")]
    InconsistentPeriods { degree_r: u64, fixed_r: u64 },
    #[error("certificate does not describe the supplied terms")]
    CertificateMismatch,
    #[error("modulus mismatch: terms over zeta_{0}, subfield over zeta_{1}")]
    ModulusMismatch(u64, u64),
    #[error("power-sequence analysis needs a nonzero base")]
    ZeroAlpha,
    #[error(transparent)]
    Lrs(#[from] LrsError),
    #[error(transparent)]
    Cyc(#[from] cyclotomic::CycError),
}

/// A virtually periodic description of a finite window: terms with index
/// >= n repeat with period r, verified up to `horizon` terms, with at
/// least two full periods confirmed. `exact` marks certificates produced
/// by a closed-form argument instead of window inspection.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PeriodCertificate {
    pub n: u64,
    pub r: u64,
    pub horizon: u64,
    pub exact: bool,
}

impl PeriodCertificate {
    /// Whether the certificate describes the window: t(i) = t(i + r) for
    /// every i >= n inside it, with two full periods after n.
    pub fn verify<T: PartialEq>(&self, terms: &[T]) -> bool {
        let m = terms.len() as u64;
        if self.horizon != m || m < self.n + 2 * self.r {
            return false;
        }
        (self.n..m - self.r).all(|i| terms[i as usize] == terms[(i + self.r) as usize])
    }
}

/// Least pre-period first, then least period: the smallest N admitting
/// any period within the window, and the smallest r valid at that N. Two
/// full periods must fit after N.
pub fn detect_virtual_period<T: PartialEq>(
    terms: &[T],
) -> Result<PeriodCertificate, PeriodicityError> {
    let m = terms.len();
    if m < 6 {
        return Err(PeriodicityError::TooFewTerms { need: 6, got: m });
    }
    for n in 0..m {
        let room = (m - n) / 2;
        for r in 1..=room {
            if (n..m - r).all(|i| terms[i] == terms[i + r]) {
                return Ok(PeriodCertificate {
                    n: n as u64,
                    r: r as u64,
                    horizon: m as u64,
                    exact: false,
                });
            }
        }
    }
    Err(PeriodicityError::NoPeriodicFit { horizon: m })
}

/// One automorphism's view of the sequence: which terms it fixes, and the
/// periodicity of that boolean row.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FixednessRow {
    pub t: u64,
    pub pattern: Vec<bool>,
    pub cert: PeriodCertificate,
}

/// Fixedness rows for every element of H_K plus the combined pre-period
/// (the max over rows) and period (the lcm over rows); the lcm is the
/// least uniform period all rows share.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FixednessProfile {
    pub rows: Vec<FixednessRow>,
    pub combined_n: u64,
    pub combined_r: u64,
}

impl FixednessProfile {
    /// Residues t whose automorphism fixes term n: the stabilizer of a_n
    /// read off the profile.
    pub fn stabilizer_at(&self, n: usize) -> Vec<u64> {
        self.rows
            .iter()
            .filter(|row| row.pattern[n])
            .map(|row| row.t)
            .collect()
    }
}

fn check_common_modulus(terms: &[CycElem], k: &SubfieldSpec) -> Result<(), PeriodicityError> {
    for t in terms {
        if t.modulus() != k.modulus() {
            return Err(PeriodicityError::ModulusMismatch(t.modulus(), k.modulus()));
        }
    }
    Ok(())
}

/// Per-automorphism fixedness rows with their detected periods. Rows are
/// independent, so they are computed in parallel; output order follows
/// the subgroup listing and does not depend on scheduling.
pub fn fixedness_profile(
    terms: &[CycElem],
    k: &SubfieldSpec,
) -> Result<FixednessProfile, PeriodicityError> {
    check_common_modulus(terms, k)?;
    let m = k.modulus();
    let rows: Result<Vec<FixednessRow>, PeriodicityError> = k
        .subgroup()
        .into_par_iter()
        .map(|t| {
            let auto = GaloisAuto::new(m, t)?;
            let pattern: Vec<bool> = terms.iter().map(|a| auto.apply(a) == *a).collect();
            let cert = detect_virtual_period(&pattern)?;
            Ok(FixednessRow { t, pattern, cert })
        })
        .collect();
    let rows = rows?;
    let combined_n = rows.iter().map(|r| r.cert.n).max().unwrap_or(0);
    let combined_r = rows.iter().fold(1u64, |acc, r| acc.lcm(&r.cert.r));
    Ok(FixednessProfile {
        rows,
        combined_n,
        combined_r,
    })
}

/// Degrees of the terms over the fixed field of K together with their
/// period certificate. The degree at each index is re-derived from the
/// fixedness profile (degree = |H_K| / |stabilizer|) as a self-check,
/// and the degree period must divide the combined fixedness period;
/// disagreement is reported as a failure rather than resolved silently.
pub fn degree_sequence_analysis(
    terms: &[CycElem],
    k: &SubfieldSpec,
) -> Result<(Vec<u64>, PeriodCertificate), PeriodicityError> {
    check_common_modulus(terms, k)?;
    let degrees: Vec<u64> = terms.iter().map(|a| cyclotomic::degree(a, k)).collect();
    let cert = detect_virtual_period(&degrees)?;
    let profile = fixedness_profile(terms, k)?;
    let order = k.order();
    for (n, &d) in degrees.iter().enumerate() {
        let stab = profile.stabilizer_at(n).len() as u64;
        assert_eq!(d, order / stab, "degree disagrees with profile at {n}");
    }
    if profile.combined_r % cert.r != 0 {
        return Err(PeriodicityError::InconsistentPeriods {
            degree_r: cert.r,
            fixed_r: profile.combined_r,
        });
    }
    Ok((degrees, cert))
}

/// The rational function sum of d_i T^(start + i) implied by a period
/// certificate: a polynomial head below the pre-period and a geometric
/// tail over 1 - T^r. The result is re-expanded and compared against the
/// input before being returned.
pub fn degree_genfun(
    degrees: &[u64],
    cert: &PeriodCertificate,
    start: usize,
) -> Result<RationalFn<BigRational>, PeriodicityError> {
    if !cert.verify(degrees) {
        return Err(PeriodicityError::CertificateMismatch);
    }
    let n = cert.n as usize;
    let r = cert.r as usize;
    let q = |v: u64| BigRational::from_integer(v.into());
    let zero = BigRational::from_integer(0.into());
    let one = BigRational::from_integer(1.into());
    // head(T) = sum_{i<n} d_i T^(start+i)
    let mut head = vec![zero.clone(); start];
    head.extend(degrees[..n].iter().map(|&d| q(d)));
    let head = Poly::from_coeffs(head);
    // block(T) = sum_{j<r} d_{n+j} T^(start+n+j)
    let mut block = vec![zero.clone(); start + n];
    block.extend(degrees[n..n + r].iter().map(|&d| q(d)));
    let block = Poly::from_coeffs(block);
    // den = 1 - T^r
    let mut den = vec![zero.clone(); r + 1];
    den[0] = one.clone();
    den[r] = -one.clone();
    let den = Poly::from_coeffs(den);
    let num = head.mul(&den).add(&block);
    let rf = RationalFn::new(num, den);
    let expanded = rf.expand(start + degrees.len());
    let expected: Vec<BigRational> = (0..start)
        .map(|_| zero.clone())
        .chain(degrees.iter().map(|&d| q(d)))
        .collect();
    if expanded != expected {
        return Err(PeriodicityError::CertificateMismatch);
    }
    Ok(rf)
}

/// Minimal polynomial of one term: its index, stabilizer, and P_n(T).
#[derive(Clone, PartialEq, Debug)]
pub struct MinPolyRecord {
    pub n: u64,
    pub stabilizer: Vec<u64>,
    pub poly: Poly<CycElem>,
}

/// Inference result for one T-coefficient of the polynomials in a
/// residue class: the recurrence order found and whether the window was
/// long enough to confirm it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoeffInference {
    pub coeff: usize,
    pub order: usize,
    pub confirmed: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassRationality {
    pub residue: u64,
    pub entries: Vec<CoeffInference>,
}

/// Rationality report for the minimal-polynomial sequence: degrees are
/// (N, r)-periodic, and within each residue class mod r every coefficient
/// sequence of P_{N+i+kr} is fed to recurrence inference.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalityReport {
    pub pre_period: u64,
    pub period: u64,
    pub classes: Vec<ClassRationality>,
}

/// Minimal polynomials P_n of every term plus the per-class rationality
/// report of their coefficient sequences.
pub fn minpoly_sequence(
    terms: &[CycElem],
    k: &SubfieldSpec,
) -> Result<(Vec<MinPolyRecord>, RationalityReport), PeriodicityError> {
    if terms.len() < 8 {
        return Err(PeriodicityError::TooFewTerms {
            need: 8,
            got: terms.len(),
        });
    }
    check_common_modulus(terms, k)?;
    let records: Vec<MinPolyRecord> = terms
        .iter()
        .enumerate()
        .map(|(n, a)| MinPolyRecord {
            n: n as u64,
            stabilizer: cyclotomic::stabilizer(a, k),
            poly: cyclotomic::minimal_polynomial(a, k),
        })
        .collect();
    let (_, cert) = degree_sequence_analysis(terms, k)?;
    let n0 = cert.n as usize;
    let r = cert.r as usize;
    let mut classes = Vec::with_capacity(r);
    for i in 0..r {
        let class: Vec<&Poly<CycElem>> = (n0 + i..terms.len())
            .step_by(r)
            .map(|n| &records[n].poly)
            .collect();
        let deg = class[0].degree().expect("minimal polynomials are nonzero");
        let like = terms[0].zero_like();
        let mut entries = Vec::with_capacity(deg + 1);
        for c in 0..=deg {
            let seq: Vec<CycElem> = class.iter().map(|p| p.coeff_or_zero(c, &like)).collect();
            let rec = lrs::berlekamp_massey(&seq)?;
            entries.push(CoeffInference {
                coeff: c,
                order: rec.order(),
                confirmed: rec.confirmed(),
            });
        }
        classes.push(ClassRationality {
            residue: i as u64,
            entries,
        });
    }
    Ok((
        records,
        RationalityReport {
            pre_period: cert.n,
            period: cert.r,
            classes,
        },
    ))
}

/// Everything the effective power-sequence case yields: exact fixedness
/// rows, an exact degree certificate, and the degree values themselves.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PowerSequenceAnalysis {
    pub profile: FixednessProfile,
    pub certificate: PeriodCertificate,
    pub degrees: Vec<u64>,
}

/// The fully effective case: for a_n = alpha^n the set fixed by sigma is
/// {n : e | n} when q = sigma(alpha)/alpha is a root of unity of order e,
/// and {0} alone otherwise. All certificates here are exact. The degree
/// certificate has r = lcm of the orders e and pre-period 0, except that
/// a non-torsion ratio contributes only the isolated index 0, forcing
/// pre-period 1.
pub fn power_sequence_analysis(
    alpha: &CycElem,
    k: &SubfieldSpec,
    horizon: usize,
) -> Result<PowerSequenceAnalysis, PeriodicityError> {
    if alpha.is_zero() {
        return Err(PeriodicityError::ZeroAlpha);
    }
    if alpha.modulus() != k.modulus() {
        return Err(PeriodicityError::ModulusMismatch(
            alpha.modulus(),
            k.modulus(),
        ));
    }
    assert!(horizon >= 2, "need a nontrivial horizon");
    let m = k.modulus();
    let inv = alpha.inverse().expect("alpha nonzero");
    // Order of sigma(alpha)/alpha per subgroup element; None = non-torsion.
    let mut ratio_orders: Vec<(u64, Option<u64>)> = Vec::new();
    for t in k.subgroup() {
        let auto = GaloisAuto::new(m, t)?;
        let q = &auto.apply(alpha) * &inv;
        ratio_orders.push((t, cyclotomic::root_of_unity_order(&q)?));
    }
    let any_nontorsion = ratio_orders.iter().any(|(_, e)| e.is_none());
    let combined_r = ratio_orders
        .iter()
        .filter_map(|(_, e)| *e)
        .fold(1u64, |acc, e| acc.lcm(&e));
    let combined_n = if any_nontorsion { 1 } else { 0 };
    let rows: Vec<FixednessRow> = ratio_orders
        .iter()
        .map(|&(t, e)| {
            let pattern: Vec<bool> = (0..horizon as u64)
                .map(|n| match e {
                    Some(e) => n % e == 0,
                    None => n == 0,
                })
                .collect();
            let cert = match e {
                Some(e) => PeriodCertificate {
                    n: 0,
                    r: e,
                    horizon: horizon as u64,
                    exact: true,
                },
                None => PeriodCertificate {
                    n: 1,
                    r: 1,
                    horizon: horizon as u64,
                    exact: true,
                },
            };
            FixednessRow { t, pattern, cert }
        })
        .collect();
    let group_order = k.order();
    let degrees: Vec<u64> = (0..horizon as u64)
        .map(|n| {
            let stab = ratio_orders
                .iter()
                .filter(|(_, e)| match e {
                    Some(e) => n % e == 0,
                    None => n == 0,
                })
                .count() as u64;
            group_order / stab
        })
        .collect();
    let certificate = PeriodCertificate {
        n: combined_n,
        r: combined_r,
        horizon: horizon as u64,
        exact: true,
    };
    Ok(PowerSequenceAnalysis {
        profile: FixednessProfile {
            rows,
            combined_n,
            combined_r,
        },
        certificate,
        degrees,
    })
}
