//! Orbits of one-variable polynomial maps over Q(zeta_m).
//!
//! For f in Q(zeta_m)[x] and a starting point a, the orbit is a,
//! f(a), f(f(a)), ... computed exactly. The derived objects mirror the
//! sequence analyses elsewhere in the crate: the degree sequence
//! deg_K f^(n)(a) and, for an automorphism sigma, the set of n where
//! sigma fixes the n-th orbit point, read off the pair orbit
//! (f^(n)(a), sigma(f)^(n)(sigma(a))) without assuming the equivariance
//! identity that makes the two views agree.
//!
//! Generic orbits grow doubly exponentially in coefficient size, so
//! every iteration carries a bit-size budget; hitting it truncates the
//! record and sets a flag rather than failing.

use crate::cyclotomic::{self, CycElem, GaloisAuto, SubfieldSpec};
use crate::field::rational_bits;
use crate::periodicity::{detect_virtual_period, PeriodCertificate, PeriodicityError};
use thiserror::Error;

/// Default growth budget: bits of numerator plus denominator allowed in
/// any single coefficient of an orbit point.
pub const DEFAULT_SIZE_BUDGET_BITS: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynError {
    #[error("polynomial needs at least one coefficient")]
    EmptyPolynomial,
    #[error("modulus mismatch: zeta_{0} against zeta_{1}")]
    ModulusMismatch(u64, u64),
    #[error("orbit has {got} points, need {need}")]
    OrbitTooShort { need: usize, got: usize },
    #[error(transparent)]
    Periodicity(#[from] PeriodicityError),
    #[error(transparent)]
    Cyc(#[from] cyclotomic::CycError),
}

/// Dense one-variable polynomial over a fixed Q(zeta_m), low degree
/// first. Trailing zeros are trimmed; the zero polynomial keeps one
/// coefficient so the degree is always defined.
#[derive(Clone, PartialEq, Debug)]
pub struct CycPoly {
    coeffs: Vec<CycElem>,
}

impl CycPoly {
    pub fn new(coeffs: Vec<CycElem>) -> Result<Self, DynError> {
        if coeffs.is_empty() {
            return Err(DynError::EmptyPolynomial);
        }
        let m = coeffs[0].modulus();
        for c in &coeffs {
            if c.modulus() != m {
                return Err(DynError::ModulusMismatch(c.modulus(), m));
            }
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().map(CycElem::is_zero) == Some(true) {
            coeffs.pop();
        }
        Ok(CycPoly { coeffs })
    }

    pub fn modulus(&self) -> u64 {
        self.coeffs[0].modulus()
    }

    pub fn coeffs(&self) -> &[CycElem] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation, exact.
    pub fn eval(&self, x: &CycElem) -> CycElem {
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// sigma(f): the automorphism applied to every coefficient.
    pub fn apply_auto(&self, sigma: &GaloisAuto) -> Result<CycPoly, DynError> {
        if sigma.modulus() != self.modulus() {
            return Err(DynError::ModulusMismatch(sigma.modulus(), self.modulus()));
        }
        Ok(CycPoly {
            coeffs: self.coeffs.iter().map(|c| sigma.apply(c)).collect(),
        })
    }
}

/// Largest coefficient size of a point, in bits of numerator plus
/// denominator: the quantity the growth budget bounds.
pub fn point_bits(a: &CycElem) -> u64 {
    a.coeffs().iter().map(rational_bits).max().unwrap_or(0)
}

/// An exactly computed orbit prefix: points f^(0)(a) = a onward, the
/// coefficient bit-size of each, and whether the budget cut it short.
#[derive(Clone, PartialEq, Debug)]
pub struct OrbitRecord {
    pub points: Vec<CycElem>,
    pub bit_sizes: Vec<u64>,
    pub truncated: bool,
}

impl OrbitRecord {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Iterate f from a, recording points 0..=n_max, stopping early (with
/// the truncation flag set) as soon as a freshly computed point has a
/// coefficient larger than the budget. The starting point itself is
/// always recorded.
pub fn iterate(
    f: &CycPoly,
    a: &CycElem,
    n_max: usize,
    size_budget_bits: u64,
) -> Result<OrbitRecord, DynError> {
    if f.modulus() != a.modulus() {
        return Err(DynError::ModulusMismatch(f.modulus(), a.modulus()));
    }
    let mut points = vec![a.clone()];
    let mut bit_sizes = vec![point_bits(a)];
    let mut truncated = false;
    for _ in 0..n_max {
        let next = f.eval(points.last().expect("nonempty"));
        let bits = point_bits(&next);
        if bits > size_budget_bits {
            truncated = true;
            break;
        }
        points.push(next);
        bit_sizes.push(bits);
    }
    Ok(OrbitRecord {
        points,
        bit_sizes,
        truncated,
    })
}

/// Degrees of the orbit points over the fixed field of K and their
/// empirical period certificate.
pub fn orbit_degree_analysis(
    record: &OrbitRecord,
    k: &SubfieldSpec,
) -> Result<(Vec<u64>, PeriodCertificate), DynError> {
    if record.len() < 6 {
        return Err(DynError::OrbitTooShort {
            need: 6,
            got: record.len(),
        });
    }
    for p in &record.points {
        if p.modulus() != k.modulus() {
            return Err(DynError::ModulusMismatch(p.modulus(), k.modulus()));
        }
    }
    let degrees: Vec<u64> = record
        .points
        .iter()
        .map(|p| cyclotomic::degree(p, k))
        .collect();
    let cert = detect_virtual_period(&degrees)?;
    Ok((degrees, cert))
}

/// Track the pair (f^(n)(a), sigma(f)^(n)(sigma(a))) and report where
/// the two components are equal, with an empirical certificate for the
/// boolean pattern. Both component orbits are iterated independently;
/// equality at n is equivalent to sigma fixing f^(n)(a), but that
/// identity is checked by tests rather than assumed here.
pub fn diagonal_fixedness(
    f: &CycPoly,
    a: &CycElem,
    sigma: &GaloisAuto,
    n_max: usize,
) -> Result<(Vec<bool>, PeriodCertificate), DynError> {
    if sigma.modulus() != a.modulus() {
        return Err(DynError::ModulusMismatch(sigma.modulus(), a.modulus()));
    }
    let g = f.apply_auto(sigma)?;
    let b = sigma.apply(a);
    let xs = iterate(f, a, n_max, DEFAULT_SIZE_BUDGET_BITS)?;
    let ys = iterate(&g, &b, n_max, DEFAULT_SIZE_BUDGET_BITS)?;
    let len = xs.len().min(ys.len());
    let pattern: Vec<bool> = (0..len)
        .map(|n| xs.points[n] == ys.points[n])
        .collect();
    let cert = detect_virtual_period(&pattern)?;
    Ok((pattern, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    fn squaring(m: u64) -> CycPoly {
        CycPoly::new(vec![
            CycElem::zero(m),
            CycElem::zero(m),
            CycElem::one(m),
        ])
        .unwrap()
    }

    #[test]
    fn squaring_orbit_of_sixteenth_root() {
        let orbit = iterate(&squaring(16), &CycElem::zeta(16), 8, 1 << 20).unwrap();
        assert_eq!(orbit.len(), 9);
        assert!(!orbit.truncated);
        for (n, p) in orbit.points.iter().enumerate() {
            // Point n is zeta_16 raised to 2^n.
            assert_eq!(*p, CycElem::zeta_pow(16, 1 << n), "n = {n}");
        }
        assert_eq!(orbit.points[3], CycElem::from_integer(16, -1));
        assert_eq!(orbit.points[4], CycElem::one(16));
    }

    #[test]
    fn rotation_orbit_cycles() {
        let f = CycPoly::new(vec![CycElem::zero(3), CycElem::zeta(3)]).unwrap();
        let orbit = iterate(&f, &CycElem::one(3), 9, 1 << 20).unwrap();
        for (n, p) in orbit.points.iter().enumerate() {
            assert_eq!(*p, CycElem::zeta_pow(3, n as u64 % 3));
        }
    }

    #[test]
    fn quadratic_orbit_over_rationals() {
        // x^2 + 1 from 0: 0, 1, 2, 5, 26, 677, ...
        let f = CycPoly::new(vec![
            CycElem::one(1),
            CycElem::zero(1),
            CycElem::one(1),
        ])
        .unwrap();
        let orbit = iterate(&f, &CycElem::zero(1), 5, 1 << 20).unwrap();
        let expect = [0i64, 1, 2, 5, 26, 677];
        for (p, &v) in orbit.points.iter().zip(expect.iter()) {
            assert_eq!(*p, CycElem::from_integer(1, v));
        }
        assert!(!orbit.truncated);
        // Sizes are recorded for every point.
        assert_eq!(orbit.bit_sizes.len(), orbit.points.len());
    }

    #[test]
    fn growth_budget_truncates() {
        let f = CycPoly::new(vec![
            CycElem::one(1),
            CycElem::zero(1),
            CycElem::one(1),
        ])
        .unwrap();
        // 2 -> 5 -> 26 -> 677; 677 needs 11 bits (10 + 1), over an
        // 8-bit budget.
        let orbit = iterate(&f, &CycElem::from_integer(1, 2), 10, 8).unwrap();
        assert!(orbit.truncated);
        assert_eq!(orbit.len(), 3);
        assert_eq!(orbit.points[2], CycElem::from_integer(1, 26));
    }

    #[test]
    fn polynomial_constructor_trims_and_validates() {
        assert_eq!(CycPoly::new(vec![]), Err(DynError::EmptyPolynomial));
        let f = CycPoly::new(vec![
            CycElem::from_integer(3, 2),
            CycElem::one(3),
            CycElem::zero(3),
        ])
        .unwrap();
        assert_eq!(f.degree(), 1);
        let mixed = CycPoly::new(vec![CycElem::one(3), CycElem::one(5)]);
        assert!(matches!(mixed, Err(DynError::ModulusMismatch(5, 3))));
    }

    #[test]
    fn squaring_orbit_degrees() {
        let orbit = iterate(&squaring(16), &CycElem::zeta(16), 8, 1 << 20).unwrap();
        let k = SubfieldSpec::rationals(16);
        let (degrees, cert) = orbit_degree_analysis(&orbit, &k).unwrap();
        assert_eq!(&degrees[..5], &[8, 4, 2, 1, 1]);
        assert!(cert.n <= 3);
        assert_eq!(cert.r, 1);
    }

    #[test]
    fn rotation_orbit_degrees() {
        let f = CycPoly::new(vec![CycElem::zero(3), CycElem::zeta(3)]).unwrap();
        let orbit = iterate(&f, &CycElem::one(3), 8, 1 << 20).unwrap();
        let k = SubfieldSpec::rationals(3);
        let (degrees, cert) = orbit_degree_analysis(&orbit, &k).unwrap();
        let expect: Vec<u64> = (0..9).map(|n| if n % 3 == 0 { 1 } else { 2 }).collect();
        assert_eq!(degrees, expect);
        assert_eq!((cert.n, cert.r), (0, 3));
    }

    #[test]
    fn shift_orbit_degrees_are_constant() {
        let f = CycPoly::new(vec![CycElem::one(1), CycElem::one(1)]).unwrap();
        let orbit = iterate(&f, &CycElem::zero(1), 7, 1 << 20).unwrap();
        let k = SubfieldSpec::rationals(1);
        let (degrees, cert) = orbit_degree_analysis(&orbit, &k).unwrap();
        assert_eq!(degrees, vec![1; 8]);
        assert_eq!((cert.n, cert.r), (0, 1));
    }

    #[test]
    fn short_orbit_is_rejected() {
        let f = CycPoly::new(vec![
            CycElem::one(1),
            CycElem::zero(1),
            CycElem::one(1),
        ])
        .unwrap();
        let orbit = iterate(&f, &CycElem::from_integer(1, 2), 10, 8).unwrap();
        let k = SubfieldSpec::rationals(1);
        assert_eq!(
            orbit_degree_analysis(&orbit, &k).unwrap_err(),
            DynError::OrbitTooShort { need: 6, got: 3 }
        );
    }

    #[test]
    fn diagonal_fixedness_of_rational_data() {
        let f = CycPoly::new(vec![
            CycElem::from_integer(5, 1),
            CycElem::from_integer(5, 2),
        ])
        .unwrap();
        let sigma = GaloisAuto::new(5, 2).unwrap();
        let (pattern, cert) =
            diagonal_fixedness(&f, &CycElem::from_integer(5, 3), &sigma, 7).unwrap();
        assert!(pattern.iter().all(|&b| b));
        assert_eq!((cert.n, cert.r), (0, 1));
    }

    #[test]
    fn diagonal_fixedness_of_rotation() {
        let f = CycPoly::new(vec![CycElem::zero(3), CycElem::zeta(3)]).unwrap();
        let sigma = GaloisAuto::new(3, 2).unwrap();
        let (pattern, cert) = diagonal_fixedness(&f, &CycElem::one(3), &sigma, 11).unwrap();
        let expect: Vec<bool> = (0..12).map(|n| n % 3 == 0).collect();
        assert_eq!(pattern, expect);
        assert_eq!((cert.n, cert.r), (0, 3));
    }

    #[test]
    fn diagonal_fixedness_under_conjugation() {
        // Squaring from zeta_16: points become real (in fact +-1) from
        // n = 3 onward, so conjugation fixes exactly the tail.
        let sigma = GaloisAuto::new(16, 15).unwrap();
        let (pattern, cert) =
            diagonal_fixedness(&squaring(16), &CycElem::zeta(16), &sigma, 8).unwrap();
        let expect: Vec<bool> = (0..9).map(|n| n >= 3).collect();
        assert_eq!(pattern, expect);
        assert_eq!((cert.n, cert.r), (3, 1));
    }

    #[test]
    fn sigma_equivariance_of_orbits() {
        // sigma(f^(n)(a)) = sigma(f)^(n)(sigma(a)) exactly, checked on a
        // map with irrational coefficients and an irrational start.
        let f = CycPoly::new(vec![
            CycElem::zeta(5),
            CycElem::zero(5),
            CycElem::one(5),
        ])
        .unwrap();
        let a = &CycElem::from_integer(5, 2) + &CycElem::zeta(5);
        for t in [2u64, 3, 4] {
            let sigma = GaloisAuto::new(5, t).unwrap();
            let xs = iterate(&f, &a, 6, 1 << 20).unwrap();
            let ys = iterate(&f.apply_auto(&sigma).unwrap(), &sigma.apply(&a), 6, 1 << 20)
                .unwrap();
            assert_eq!(xs.len(), ys.len());
            for n in 0..xs.len() {
                assert_eq!(sigma.apply(&xs.points[n]), ys.points[n], "t={t} n={n}");
            }
        }
    }

    #[test]
    fn diagonal_pattern_matches_stabilizers() {
        let f = CycPoly::new(vec![CycElem::zeta(5), CycElem::one(5)]).unwrap();
        let a = CycElem::from_integer(5, 1);
        let k = SubfieldSpec::rationals(5);
        let orbit = iterate(&f, &a, 9, 1 << 20).unwrap();
        for t in k.subgroup() {
            let sigma = GaloisAuto::new(5, t).unwrap();
            let (pattern, _) = diagonal_fixedness(&f, &a, &sigma, 9).unwrap();
            for (n, point) in orbit.points.iter().enumerate() {
                let fixed = cyclotomic::stabilizer(point, &k).contains(&t);
                assert_eq!(pattern[n], fixed, "t={t} n={n}");
            }
        }
    }

    #[test]
    fn degrees_agree_with_diagonal_patterns() {
        // Degree at each n is the subgroup order divided by the number
        // of automorphisms whose diagonal pattern is true there. The
        // orbit zeta_8^n has degree period 4, so 16 points suffice for
        // every certificate involved.
        let f = CycPoly::new(vec![CycElem::zero(8), CycElem::zeta(8)]).unwrap();
        let a = CycElem::one(8);
        let k = SubfieldSpec::rationals(8);
        let orbit = iterate(&f, &a, 15, 1 << 20).unwrap();
        let (degrees, _) = orbit_degree_analysis(&orbit, &k).unwrap();
        let patterns: Vec<Vec<bool>> = k
            .subgroup()
            .into_iter()
            .map(|t| {
                let sigma = GaloisAuto::new(8, t).unwrap();
                diagonal_fixedness(&f, &a, &sigma, 15).unwrap().0
            })
            .collect();
        for n in 0..orbit.len() {
            let fixers = patterns.iter().filter(|pat| pat[n]).count() as u64;
            assert_eq!(degrees[n], k.order() / fixers, "n = {n}");
        }
    }

    #[test]
    fn eval_uses_horner_exactly() {
        // f = (1/2) x^2 + zeta x + 3 at x = 2 zeta: 2 zeta^2 + 2 zeta^2
        // + 3 = 4 zeta^2 + 3.
        let half = CycElem::rational(8, rat(1, 2));
        let f = CycPoly::new(vec![CycElem::from_integer(8, 3), CycElem::zeta(8), half])
            .unwrap();
        let x = &CycElem::from_integer(8, 2) * &CycElem::zeta(8);
        let got = f.eval(&x);
        let expect = &(&CycElem::from_integer(8, 4) * &CycElem::zeta_pow(8, 2))
            + &CycElem::from_integer(8, 3);
        assert_eq!(got, expect);
    }
}
