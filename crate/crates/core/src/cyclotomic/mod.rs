//! Exact arithmetic in the cyclotomic field Q(zeta_m).
//!
//! Elements are stored in the power basis 1, zeta, ..., zeta^{phi(m)-1} with
//! big-rational coordinates, reduced modulo the m-th cyclotomic polynomial
//! after every operation. The Galois group (Z/m)^* acts by zeta -> zeta^t;
//! subfields are always described by subgroups of that group, so stabilizers,
//! degrees over a subfield, and minimal polynomials are finite enumerations.
//!
//! Reduction data (the cyclotomic polynomial and the power-basis rows for
//! zeta^e) is computed once per modulus and shared behind an `Arc`, so
//! elements stay cheap to clone and safe to use from many threads.

mod embed;
mod sqrt;

pub use embed::{embeddings_dyadic, embeddings_f64, max_abs_upper_bound};
pub use sqrt::sqrt_in_field;

use crate::poly::Poly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycError {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("zero element has no inverse")]
    ZeroInverse,
    #[error("t = {t} does not define an automorphism mod {m} (gcd(t, m) must be 1)")]
    InvalidAutomorphism { m: u64, t: u64 },
    #[error("root-of-unity test needs a nonzero element")]
    ZeroElement,
    #[error("{0} does not divide {1}, cannot lift between those cyclotomic fields")]
    BadConductorLift(u64, u64),
    #[error("square root search unsupported here: {0}")]
    SqrtUnsupported(String),
    #[error("generator {t} is not a unit mod {m}")]
    BadSubgroupGenerator { m: u64, t: u64 },
}

// ---- Elementary number theory helpers ----

pub fn euler_phi(m: u64) -> u64 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result.max(1)
}

/// Ascending residues in [0, m) coprime to m. For m = 1 this is {0}, the
/// class of every integer.
pub fn units_mod(m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![0];
    }
    (1..m).filter(|&t| t.gcd(&m) == 1).collect()
}

fn divisors(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            if d != m / d {
                out.push(m / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

// ---- Integer polynomial helpers for the cyclotomic polynomial ----

/// Exact division of integer polynomials, valid when the divisor is monic
/// and divides exactly (both hold along the cyclotomic recursion).
fn int_poly_divexact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map_or(false, |c| c.is_one()), "divisor must be monic");
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    assert!(rem.len() > dd);
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let factor = rem[k + dd].clone();
        if !factor.is_zero() {
            for (j, b) in den.iter().enumerate() {
                rem[k + j] -= &factor * b;
            }
        }
        quot[k] = factor;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "division was not exact");
    quot
}

/// The m-th cyclotomic polynomial Phi_m as ascending integer coefficients,
/// monic of degree phi(m). Computed by exact division of x^m - 1 by Phi_d
/// over the proper divisors d of m; no factorization is involved.
pub fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    assert!(m >= 1);
    let mut memo: HashMap<u64, Vec<BigInt>> = HashMap::new();
    memo.insert(1, vec![BigInt::from(-1), BigInt::one()]);
    for d in divisors(m) {
        if d == 1 {
            continue;
        }
        // x^d - 1
        let mut q = vec![BigInt::zero(); (d + 1) as usize];
        q[0] = BigInt::from(-1);
        q[d as usize] = BigInt::one();
        for dd in divisors(d) {
            if dd < d {
                q = int_poly_divexact(&q, &memo[&dd]);
            }
        }
        memo.insert(d, q);
    }
    memo.remove(&m).unwrap()
}

// ---- Per-modulus reduction context ----

struct CycCtx {
    phi: usize,
    /// Phi_m over Q, for inversion via the extended Euclidean algorithm.
    cyclo_rat: Poly<BigRational>,
    /// Row e holds the power-basis coordinates of zeta^e, for
    /// e = 0 ..= max(m - 1, 2*phi - 2), covering both products of basis
    /// elements and Galois images of basis exponents.
    pow_rows: Vec<Vec<BigInt>>,
}

fn ctx(m: u64) -> Arc<CycCtx> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CycCtx>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(c) = guard.get(&m) {
        return Arc::clone(c);
    }
    let cyclo = cyclotomic_polynomial(m);
    let phi = cyclo.len() - 1;
    let max_exp = (m as usize).saturating_sub(1).max(2 * phi.saturating_sub(1));
    let mut pow_rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_exp + 1);
    for e in 0..=max_exp {
        if e < phi {
            let mut row = vec![BigInt::zero(); phi];
            row[e] = BigInt::one();
            pow_rows.push(row);
        } else {
            // zeta^e = zeta * zeta^{e-1}; fold the overflow coordinate back
            // through zeta^phi = -(c_0 + c_1 zeta + ... + c_{phi-1} zeta^{phi-1}).
            let prev = &pow_rows[e - 1];
            let top = prev[phi - 1].clone();
            let mut row = vec![BigInt::zero(); phi];
            for i in 1..phi {
                row[i] = prev[i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..phi {
                    row[i] -= &top * &cyclo[i];
                }
            }
            pow_rows.push(row);
        }
    }
    let cyclo_rat = Poly::from_coeffs(
        cyclo
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect(),
    );
    let arc = Arc::new(CycCtx {
        phi,
        cyclo_rat,
        pow_rows,
    });
    guard.insert(m, Arc::clone(&arc));
    arc
}

// ---- The element type ----

/// An element of Q(zeta_m) in the power basis. All arithmetic is exact and
/// reduced; two elements are equal iff they share a modulus and coordinates.
///
/// Binary operations panic on a modulus mismatch: mixing conductors is a
/// programming error, and callers that accept external input are expected to
/// validate moduli up front (the CLI does).
#[derive(Clone, PartialEq, Eq)]
pub struct CycElem {
    m: u64,
    coeffs: Vec<BigRational>,
}

impl CycElem {
    pub fn zero(m: u64) -> Self {
        let c = ctx(m);
        CycElem {
            m,
            coeffs: vec![BigRational::zero(); c.phi],
        }
    }

    pub fn one(m: u64) -> Self {
        Self::rational(m, BigRational::one())
    }

    pub fn rational(m: u64, q: BigRational) -> Self {
        let c = ctx(m);
        let mut coeffs = vec![BigRational::zero(); c.phi];
        coeffs[0] = q;
        CycElem { m, coeffs }
    }

    pub fn from_integer(m: u64, n: i64) -> Self {
        Self::rational(m, BigRational::from_integer(BigInt::from(n)))
    }

    /// The distinguished primitive root zeta_m.
    pub fn zeta(m: u64) -> Self {
        Self::zeta_pow(m, 1)
    }

    /// zeta_m^e for any exponent, reduced to the power basis.
    pub fn zeta_pow(m: u64, e: u64) -> Self {
        let c = ctx(m);
        let row = &c.pow_rows[(e % m) as usize];
        CycElem {
            m,
            coeffs: row
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        }
    }

    /// Builds an element from power-basis coordinates; shorter vectors are
    /// padded with zeros. Panics if more than phi(m) coordinates are given.
    pub fn from_coeffs(m: u64, mut coeffs: Vec<BigRational>) -> Self {
        let c = ctx(m);
        assert!(
            coeffs.len() <= c.phi,
            "expected at most {} coordinates for modulus {}, got {}",
            c.phi,
            m,
            coeffs.len()
        );
        coeffs.resize(c.phi, BigRational::zero());
        CycElem { m, coeffs }
    }

    /// Sum of q_i * zeta^{e_i} with arbitrary exponents (reduced mod m).
    pub fn from_exponent_terms(m: u64, terms: &[(u64, BigRational)]) -> Self {
        let c = ctx(m);
        let mut coeffs = vec![BigRational::zero(); c.phi];
        for (e, q) in terms {
            let row = &c.pow_rows[(e % m) as usize];
            for i in 0..c.phi {
                if !row[i].is_zero() {
                    coeffs[i] += q * BigRational::from_integer(row[i].clone());
                }
            }
        }
        CycElem { m, coeffs }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Rational over Q iff every coordinate past the first vanishes.
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn assert_same_modulus(&self, other: &CycElem) {
        assert_eq!(
            self.m, other.m,
            "cyclotomic modulus mismatch: {} vs {}",
            self.m, other.m
        );
    }

    /// Exact inverse via the extended Euclidean algorithm against Phi_m.
    pub fn inverse(&self) -> Result<CycElem, CycError> {
        if self.is_zero() {
            return Err(CycError::ZeroInverse);
        }
        let c = ctx(self.m);
        let a = Poly::from_coeffs(self.coeffs.clone());
        // Phi_m is irreducible over Q, so gcd(a, Phi_m) = 1 and the Bezout
        // coefficient of a is the inverse modulo Phi_m.
        let (g, u, _) = a.xgcd(&c.cyclo_rat);
        debug_assert_eq!(g.degree(), Some(0));
        let ginv = g.coeffs()[0].recip();
        let u = u.mul_scalar(&ginv);
        let red = u.rem(&c.cyclo_rat).unwrap();
        let mut coeffs: Vec<BigRational> = red.coeffs().to_vec();
        coeffs.resize(c.phi, BigRational::zero());
        Ok(CycElem { m: self.m, coeffs })
    }

    pub fn pow(&self, mut e: u64) -> CycElem {
        let mut base = self.clone();
        let mut acc = CycElem::one(self.m);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Complex conjugation, zeta -> zeta^{-1}. Identity for m <= 2.
    pub fn conj(&self) -> CycElem {
        if self.m <= 2 {
            return self.clone();
        }
        GaloisAuto::new(self.m, self.m - 1).unwrap().apply(self)
    }

    /// a * conj(a). Every complex embedding of the result is the squared
    /// absolute value of the corresponding embedding of a; in particular the
    /// result equals 1 exactly when a lies on the unit circle in every
    /// embedding.
    pub fn abs_square(&self) -> CycElem {
        &self.conj() * self
    }

    /// Canonical image in Q(zeta_m2) for m | m2, sending zeta_m to
    /// zeta_m2^{m2/m}.
    pub fn lift_to(&self, m2: u64) -> Result<CycElem, CycError> {
        if m2 % self.m != 0 {
            return Err(CycError::BadConductorLift(self.m, m2));
        }
        let step = m2 / self.m;
        let terms: Vec<(u64, BigRational)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .map(|(i, q)| ((i as u64 * step) % m2, q.clone()))
            .collect();
        Ok(CycElem::from_exponent_terms(m2, &terms))
    }
}

impl fmt::Debug for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycElem(m={}, {})", self.m, self)
    }
}

impl fmt::Display for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, q) in self.coeffs.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{}", q)?,
                1 => write!(f, "{}*z{}", q, self.m)?,
                _ => write!(f, "{}*z{}^{}", q, self.m, i)?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! cyc_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for &CycElem {
            type Output = CycElem;
            fn $method(self, rhs: &CycElem) -> CycElem {
                self.assert_same_modulus(rhs);
                CycElem {
                    m: self.m,
                    coeffs: self
                        .coeffs
                        .iter()
                        .zip(rhs.coeffs.iter())
                        .map(|(a, b)| a $op b)
                        .collect(),
                }
            }
        }
    };
}

cyc_binop!(Add, add, +);
cyc_binop!(Sub, sub, -);

impl std::ops::Mul for &CycElem {
    type Output = CycElem;
    fn mul(self, rhs: &CycElem) -> CycElem {
        self.assert_same_modulus(rhs);
        let c = ctx(self.m);
        let phi = c.phi;
        // Schoolbook convolution, then fold exponents >= phi through the
        // precomputed rows for zeta^e.
        let mut conv = vec![BigRational::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    conv[i + j] += a * b;
                }
            }
        }
        let mut out: Vec<BigRational> = conv[..phi].to_vec();
        for (e, q) in conv.iter().enumerate().skip(phi) {
            if q.is_zero() {
                continue;
            }
            let row = &c.pow_rows[e];
            for i in 0..phi {
                if !row[i].is_zero() {
                    out[i] += q * BigRational::from_integer(row[i].clone());
                }
            }
        }
        CycElem { m: self.m, coeffs: out }
    }
}

impl std::ops::Neg for &CycElem {
    type Output = CycElem;
    fn neg(self) -> CycElem {
        CycElem {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl crate::field::Field for CycElem {
    fn zero_like(&self) -> Self {
        CycElem::zero(self.m)
    }
    fn one_like(&self) -> Self {
        CycElem::one(self.m)
    }
    fn is_zero(&self) -> bool {
        CycElem::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        self.inverse().ok()
    }
    fn int_like(&self, n: i64) -> Self {
        CycElem::from_integer(self.m, n)
    }
}

// ---- Galois action ----

/// The automorphism zeta_m -> zeta_m^t for t coprime to m. Residues are
/// stored reduced mod m, so for m = 1 the identity is t = 0.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct GaloisAuto {
    m: u64,
    t: u64,
}

impl GaloisAuto {
    pub fn new(m: u64, t: u64) -> Result<Self, CycError> {
        let tr = t % m;
        if m > 1 && tr.gcd(&m) != 1 {
            return Err(CycError::InvalidAutomorphism { m, t });
        }
        Ok(GaloisAuto { m, t: tr })
    }

    pub fn identity(m: u64) -> Self {
        GaloisAuto { m, t: 1 % m }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn is_identity(&self) -> bool {
        self.t == 1 % self.m
    }

    /// Composition: applying `self` after `other` is the automorphism with
    /// residue t_self * t_other mod m.
    pub fn compose(&self, other: &GaloisAuto) -> Result<GaloisAuto, CycError> {
        if self.m != other.m {
            return Err(CycError::ModulusMismatch(self.m, other.m));
        }
        Ok(GaloisAuto {
            m: self.m,
            t: (self.t as u128 * other.t as u128 % self.m as u128) as u64,
        })
    }

    /// Image of a under zeta -> zeta^t, reduced to the power basis. This is
    /// a field automorphism; additivity is coordinate bookkeeping and
    /// multiplicativity follows because exponent arithmetic is mod m.
    pub fn apply(&self, a: &CycElem) -> CycElem {
        assert_eq!(self.m, a.m, "automorphism/element modulus mismatch");
        let terms: Vec<(u64, BigRational)> = a
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .map(|(i, q)| ((i as u64 * self.t) % self.m, q.clone()))
            .collect();
        CycElem::from_exponent_terms(self.m, &terms)
    }
}

// ---- Subfields as subgroups of (Z/m)^* ----

/// A subfield K of Q(zeta_m), described by the subgroup H_K of (Z/m)^*
/// whose fixed field it is. The full group corresponds to K = Q.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubfieldSpec {
    m: u64,
    generators: Vec<u64>,
}

impl SubfieldSpec {
    pub fn new(m: u64, generators: Vec<u64>) -> Result<Self, CycError> {
        for &g in &generators {
            let gr = g % m;
            if m > 1 && gr.gcd(&m) != 1 {
                return Err(CycError::BadSubgroupGenerator { m, t: g });
            }
        }
        Ok(SubfieldSpec { m, generators })
    }

    /// K = Q: the subgroup is all of (Z/m)^*.
    pub fn rationals(m: u64) -> Self {
        SubfieldSpec {
            m,
            generators: units_mod(m),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// The generated subgroup as sorted residues; always contains the
    /// identity residue.
    pub fn subgroup(&self) -> Vec<u64> {
        let id = 1 % self.m;
        let mut seen: Vec<u64> = vec![id];
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for &g in &self.generators {
                let y = (x as u128 * (g % self.m) as u128 % self.m.max(1) as u128) as u64;
                if !seen.contains(&y) {
                    seen.push(y);
                    frontier.push(y);
                }
            }
        }
        seen.sort_unstable();
        seen
    }

    pub fn order(&self) -> u64 {
        self.subgroup().len() as u64
    }

    pub fn is_full(&self) -> bool {
        self.order() == euler_phi(self.m)
    }

    pub fn automorphisms(&self) -> Vec<GaloisAuto> {
        self.subgroup()
            .into_iter()
            .map(|t| GaloisAuto { m: self.m, t })
            .collect()
    }
}

/// H = {t in H_K : sigma_t(a) = a}, as sorted residues. Always a subgroup:
/// it is the intersection of H_K with the full stabilizer of a.
pub fn stabilizer(a: &CycElem, k: &SubfieldSpec) -> Vec<u64> {
    assert_eq!(a.m, k.m, "element/subfield modulus mismatch");
    k.subgroup()
        .into_iter()
        .filter(|&t| GaloisAuto { m: a.m, t }.apply(a) == *a)
        .collect()
}

/// Degree of a over the fixed field of H_K: the index of the stabilizer.
/// Zero is rational, so degree(0, K) = 1.
pub fn degree(a: &CycElem, k: &SubfieldSpec) -> u64 {
    k.order() / stabilizer(a, k).len() as u64
}

/// Monic minimal polynomial of a over the fixed field of H_K, as the product
/// of (T - sigma(a)) over one representative per stabilizer coset. The
/// coefficients are fixed by every element of H_K; over K = Q they are
/// rational.
pub fn minimal_polynomial(a: &CycElem, k: &SubfieldSpec) -> Poly<CycElem> {
    assert_eq!(a.m, k.m, "element/subfield modulus mismatch");
    let stab = stabilizer(a, k);
    let mut conjugates: Vec<CycElem> = Vec::new();
    for t in k.subgroup() {
        let image = GaloisAuto { m: a.m, t }.apply(a);
        if !conjugates.contains(&image) {
            conjugates.push(image);
        }
    }
    debug_assert_eq!(conjugates.len() * stab.len(), k.subgroup().len());
    let one = CycElem::one(a.m);
    let mut p = Poly::constant(one);
    for c in conjugates {
        let factor = Poly::from_coeffs(vec![-&c, CycElem::one(a.m)]);
        p = p.mul(&factor);
    }
    p
}

/// Order of a as a root of unity, if it is one. The roots of unity in
/// Q(zeta_m) all have order dividing lcm(2, m), so a single exactness test
/// at that exponent decides, and the order is the least divisor d of
/// lcm(2, m) with a^d = 1.
pub fn root_of_unity_order(a: &CycElem) -> Result<Option<u64>, CycError> {
    if a.is_zero() {
        return Err(CycError::ZeroElement);
    }
    let big = a.m.lcm(&2);
    let one = CycElem::one(a.m);
    if a.pow(big) != one {
        return Ok(None);
    }
    for d in divisors(big) {
        if a.pow(d) == one {
            return Ok(Some(d));
        }
    }
    unreachable!("a^lcm(2, m) = 1 guarantees some divisor works")
}

/// Product of sigma_t(a) over every t in H_K. For K = Q this is the field
/// norm down to Q (as a rational element of Q(zeta_m)).
pub fn full_norm(a: &CycElem, k: &SubfieldSpec) -> CycElem {
    let mut acc = CycElem::one(a.m);
    for auto in k.automorphisms() {
        acc = &acc * &auto.apply(a);
    }
    acc
}
