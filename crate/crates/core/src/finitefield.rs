//! Arithmetic in F_{p^k} modeled as F_p[x] modulo a deterministic
//! irreducible polynomial.
//!
//! The modulus is the lexicographically smallest monic irreducible of its
//! degree, so runs are reproducible without external tables; a
//! modulus-independence test elsewhere guards against accidentally relying
//! on the particular model. Traces are precomputed per basis element at
//! construction, making the trace map a dot product: the enumeration
//! kernels lean on that heavily.

use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FqError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is not monic of degree {expected}")]
    BadModulusShape { expected: usize },
    #[error("modulus is reducible over F_{p}")]
    Reducible { p: u64 },
    #[error("inverse of zero in F_{{p^k}}")]
    ZeroInverse,
    #[error("elements belong to different field configurations")]
    ConfigMismatch,
    #[error("enumeration of {needed} elements exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}

/// Default cap on how many field elements a single enumeration may visit.
pub const DEFAULT_ENUM_BUDGET: u64 = 100_000_000;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---- Polynomial arithmetic over F_p (coefficients ascending, u64) ----

fn ptrim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    ptrim(&mut out);
    out
}

/// Remainder of a modulo monic f.
fn prem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let df = f.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| c % p).collect();
    ptrim(&mut r);
    while r.len() > df {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - df;
        if lead != 0 {
            // r -= lead * x^shift * f; the monic top cancels exactly.
            for (j, &c) in f.iter().enumerate() {
                r[shift + j] = (r[shift + j] + (p - lead) * c % p) % p;
            }
        }
        r.pop();
        ptrim(&mut r);
    }
    r
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    ptrim(&mut a);
    ptrim(&mut b);
    while !b.is_empty() {
        // Make b monic so prem applies.
        let lead = *b.last().unwrap();
        let linv = mod_inverse(lead, p);
        let monic: Vec<u64> = b.iter().map(|&c| c * linv % p).collect();
        let r = prem(&a, &monic, p);
        a = b;
        b = r;
    }
    a
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a nonzero mod p.
    let mut acc: u64 = 1;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// x^(p^i) mod f by repeated p-th powering of x.
fn frobenius_powers_of_x(f: &[u64], p: u64, count: usize) -> Vec<Vec<u64>> {
    let mut cur = vec![0, 1]; // x
    cur = prem(&cur, f, p);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        cur = ppow_mod(&cur, p, f, p);
        out.push(cur.clone());
    }
    out
}

fn ppow_mod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = prem(&pmul(&acc, &b, p), f, p);
        }
        b = prem(&pmul(&b, &b, p), f, p);
        e >>= 1;
    }
    acc
}

/// Irreducibility over F_p for monic f: no factor of degree <= deg(f)/2,
/// tested as gcd(x^(p^i) - x, f) = 1 for 1 <= i <= deg(f)/2.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    let frob = frobenius_powers_of_x(f, p, k / 2);
    for xpi in frob.iter() {
        // x^(p^i) - x mod f
        let mut g = xpi.clone();
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        ptrim(&mut g);
        let d = pgcd(&g, f, p);
        if d.len() != 1 {
            return false;
        }
    }
    true
}

/// The n-th (0-indexed) monic irreducible of degree k over F_p, in the
/// lexicographic order of the tuple (c_{k-1}, ..., c_0). The 0-th is the
/// canonical modulus used when no override is given.
pub fn find_irreducible_nth(p: u64, k: usize, n: usize) -> Result<Vec<u64>, FqError> {
    if !is_prime(p) {
        return Err(FqError::NotPrime(p));
    }
    assert!(k >= 1);
    let total = (p as u128).pow(k as u32);
    let mut seen = 0;
    let mut idx: u128 = 0;
    while idx < total {
        // Digits of idx with c_0 least significant, so increasing idx walks
        // the tuple (c_{k-1}, ..., c_0) in lexicographic order.
        let mut f = vec![0u64; k + 1];
        f[k] = 1;
        let mut v = idx;
        for i in 0..k {
            f[i] = (v % p as u128) as u64;
            v /= p as u128;
        }
        if is_irreducible(&f, p) {
            if seen == n {
                return Ok(f);
            }
            seen += 1;
        }
        idx += 1;
    }
    unreachable!("irreducibles of every degree exist over F_p")
}

/// The canonical (lexicographically minimal) monic irreducible of degree k.
pub fn find_irreducible(p: u64, k: usize) -> Result<Vec<u64>, FqError> {
    find_irreducible_nth(p, k, 0)
}

/// A concrete model of F_{p^k}: the prime, the degree, the monic
/// irreducible modulus, and the precomputed traces of the basis powers
/// x^0 .. x^{k-1}.
#[derive(Debug, PartialEq, Eq)]
pub struct FqConfig {
    p: u64,
    k: usize,
    modulus: Vec<u64>,
    trace_basis: Vec<u64>,
}

impl FqConfig {
    /// The canonical model with the deterministic minimal modulus.
    pub fn new(p: u64, k: usize) -> Result<Arc<FqConfig>, FqError> {
        let modulus = find_irreducible(p, k)?;
        Self::with_modulus(p, k, modulus)
    }

    /// A model with an explicit modulus (validated); used by the
    /// modulus-independence checks.
    pub fn with_modulus(p: u64, k: usize, modulus: Vec<u64>) -> Result<Arc<FqConfig>, FqError> {
        if !is_prime(p) {
            return Err(FqError::NotPrime(p));
        }
        if modulus.len() != k + 1 || modulus[k] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(FqError::BadModulusShape { expected: k });
        }
        if !is_irreducible(&modulus, p) {
            return Err(FqError::Reducible { p });
        }
        // Tr(x^i) = sum over Frobenius orbits; the result of summing the
        // conjugate polynomials must be a constant, which is the trace.
        let mut frob = vec![vec![0u64, 1]]; // x^(p^0)
        frob.extend(frobenius_powers_of_x(&modulus, p, k - 1));
        let mut trace_basis = Vec::with_capacity(k);
        for i in 0..k {
            let mut acc = vec![0u64];
            for fr in &frob {
                // (x^(p^j))^i mod f
                let conj = ppow_mod(fr, i as u64, &modulus, p);
                let padded_len = acc.len().max(conj.len());
                acc.resize(padded_len, 0);
                for (t, &c) in conj.iter().enumerate() {
                    acc[t] = (acc[t] + c) % p;
                }
            }
            ptrim(&mut acc);
            assert!(acc.len() <= 1, "trace of a basis power must be scalar");
            trace_basis.push(acc.first().copied().unwrap_or(0));
        }
        Ok(Arc::new(FqConfig {
            p,
            k,
            modulus,
            trace_basis,
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.k as u32)
    }

    pub fn trace_of_basis(&self) -> &[u64] {
        &self.trace_basis
    }

    pub fn zero(self: &Arc<Self>) -> FqElem {
        FqElem {
            cfg: Arc::clone(self),
            coeffs: vec![0; self.k],
        }
    }

    pub fn one(self: &Arc<Self>) -> FqElem {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, n: u64) -> FqElem {
        let mut coeffs = vec![0; self.k];
        coeffs[0] = n % self.p;
        FqElem {
            cfg: Arc::clone(self),
            coeffs,
        }
    }

    /// The class of x, a generator of the ring model (not necessarily of
    /// the multiplicative group).
    pub fn x(self: &Arc<Self>) -> FqElem {
        let mut coeffs = vec![0; self.k];
        if self.k == 1 {
            // x reduces to a constant: x = -c_0 mod p.
            coeffs[0] = (self.p - self.modulus[0] % self.p) % self.p;
        } else {
            coeffs[1] = 1;
        }
        FqElem {
            cfg: Arc::clone(self),
            coeffs,
        }
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<u64>) -> FqElem {
        assert_eq!(coeffs.len(), self.k, "coordinate count must equal k");
        FqElem {
            cfg: Arc::clone(self),
            coeffs: coeffs.into_iter().map(|c| c % self.p).collect(),
        }
    }

    /// All p^k elements in lexicographic coordinate order (c_0 is the most
    /// significant position), each exactly once.
    pub fn enumerate(self: &Arc<Self>, budget: u64) -> Result<FqIter, FqError> {
        let needed = self.order();
        if needed > budget as u128 {
            return Err(FqError::BudgetExceeded {
                needed,
                budget,
            });
        }
        Ok(FqIter {
            cfg: Arc::clone(self),
            next: 0,
            total: needed,
        })
    }

    /// A generator of the cyclic group F_{p^k}^*, the first one in
    /// enumeration order. Factors p^k - 1 by trial division, so this is
    /// meant for desk-scale orders.
    pub fn multiplicative_generator(self: &Arc<Self>) -> FqElem {
        let q_minus_1 = (self.order() - 1) as u64;
        let factors = {
            let mut n = q_minus_1;
            let mut out = Vec::new();
            let mut d = 2;
            while (d as u128) * (d as u128) <= n as u128 {
                if n % d == 0 {
                    out.push(d);
                    while n % d == 0 {
                        n /= d;
                    }
                }
                d += 1;
            }
            if n > 1 {
                out.push(n);
            }
            out
        };
        let iter = self.enumerate(u64::MAX).unwrap();
        for cand in iter {
            if cand.is_zero() {
                continue;
            }
            if factors
                .iter()
                .all(|&f| !cand.pow(q_minus_1 / f).is_one())
            {
                return cand;
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }
}

pub struct FqIter {
    cfg: Arc<FqConfig>,
    next: u128,
    total: u128,
}

impl Iterator for FqIter {
    type Item = FqElem;
    fn next(&mut self) -> Option<FqElem> {
        if self.next >= self.total {
            return None;
        }
        let mut v = self.next;
        let k = self.cfg.k;
        let p = self.cfg.p as u128;
        let mut coeffs = vec![0u64; k];
        for i in (0..k).rev() {
            coeffs[i] = (v % p) as u64;
            v /= p;
        }
        self.next += 1;
        Some(FqElem {
            cfg: Arc::clone(&self.cfg),
            coeffs,
        })
    }
}

/// An element of F_{p^k}: k residues in the power basis of x.
#[derive(Clone)]
pub struct FqElem {
    cfg: Arc<FqConfig>,
    coeffs: Vec<u64>,
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.cfg, &other.cfg) || self.cfg == other.cfg)
            && self.coeffs == other.coeffs
    }
}
impl Eq for FqElem {}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq{:?}", self.coeffs)
    }
}

impl FqElem {
    pub fn config(&self) -> &Arc<FqConfig> {
        &self.cfg
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn check_cfg(&self, other: &FqElem) {
        assert!(
            Arc::ptr_eq(&self.cfg, &other.cfg) || self.cfg == other.cfg,
            "field configuration mismatch"
        );
    }

    pub fn add(&self, other: &FqElem) -> FqElem {
        self.check_cfg(other);
        let p = self.cfg.p;
        FqElem {
            cfg: Arc::clone(&self.cfg),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| (a + b) % p)
                .collect(),
        }
    }

    pub fn sub(&self, other: &FqElem) -> FqElem {
        self.check_cfg(other);
        let p = self.cfg.p;
        FqElem {
            cfg: Arc::clone(&self.cfg),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| (a + p - b) % p)
                .collect(),
        }
    }

    pub fn mul(&self, other: &FqElem) -> FqElem {
        self.check_cfg(other);
        let p = self.cfg.p;
        let prod = pmul(&self.coeffs, &other.coeffs, p);
        let mut red = prem(&prod, &self.cfg.modulus, p);
        red.resize(self.cfg.k, 0);
        FqElem {
            cfg: Arc::clone(&self.cfg),
            coeffs: red,
        }
    }

    pub fn pow(&self, mut e: u64) -> FqElem {
        let mut acc = self.cfg.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by the group order: a^(p^k - 2). Desk-scale fields only.
    pub fn inv(&self) -> Result<FqElem, FqError> {
        if self.is_zero() {
            return Err(FqError::ZeroInverse);
        }
        let q = self.cfg.order();
        Ok(self.pow((q - 2) as u64))
    }

    /// Absolute trace down to F_p, as a residue. A dot product against the
    /// precomputed basis traces; linearity is then immediate.
    pub fn trace(&self) -> u64 {
        let p = self.cfg.p;
        let mut acc = 0u64;
        for (c, t) in self.coeffs.iter().zip(&self.cfg.trace_basis) {
            acc = (acc + c * t) % p;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli_match_hand_checks() {
        assert_eq!(find_irreducible(3, 1).unwrap(), vec![0, 1]);
        assert_eq!(find_irreducible(3, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(find_irreducible(2, 2).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn nonprime_p_is_rejected() {
        assert_eq!(find_irreducible(6, 2), Err(FqError::NotPrime(6)));
        assert!(FqConfig::new(1, 1).is_err());
    }

    #[test]
    fn x_squared_in_f9() {
        let f9 = FqConfig::new(3, 2).unwrap();
        let x = f9.x();
        assert_eq!(x.mul(&x), f9.from_int(2));
    }

    #[test]
    fn inverses_and_group_order() {
        let f9 = FqConfig::new(3, 2).unwrap();
        for a in f9.enumerate(100).unwrap() {
            if a.is_zero() {
                assert_eq!(a.inv(), Err(FqError::ZeroInverse));
                continue;
            }
            assert!(a.mul(&a.inv().unwrap()).is_one());
            assert!(a.pow(8).is_one());
        }
    }

    #[test]
    fn trace_examples() {
        let f9 = FqConfig::new(3, 2).unwrap();
        // Constants embed with trace k*c.
        assert_eq!(f9.from_int(1).trace(), 2);
        assert_eq!(f9.from_int(2).trace(), 1);
        // Tr(x) = x + x^3 = x + 2x = 0 when x^2 = -1.
        assert_eq!(f9.x().trace(), 0);
    }

    #[test]
    fn trace_is_linear_and_frobenius_stable() {
        let f = FqConfig::new(5, 3).unwrap();
        let elems: Vec<FqElem> = f.enumerate(1000).unwrap().collect();
        for a in elems.iter().step_by(7) {
            assert_eq!(a.pow(5).trace(), a.trace(), "trace(a^p) = trace(a)");
            for b in elems.iter().step_by(11) {
                assert_eq!(
                    a.add(b).trace(),
                    (a.trace() + b.trace()) % 5,
                    "additivity"
                );
            }
        }
    }

    #[test]
    fn trace_is_onto_with_even_fibers() {
        let f = FqConfig::new(3, 2).unwrap();
        let mut counts = [0usize; 3];
        for a in f.enumerate(100).unwrap() {
            counts[a.trace() as usize] += 1;
        }
        assert_eq!(counts, [3, 3, 3]);
    }

    #[test]
    fn enumeration_is_exact_and_ordered() {
        let f2 = FqConfig::new(2, 1).unwrap();
        let all: Vec<Vec<u64>> = f2.enumerate(10).unwrap().map(|e| e.coeffs().to_vec()).collect();
        assert_eq!(all, vec![vec![0], vec![1]]);

        let f9 = FqConfig::new(3, 2).unwrap();
        let all: Vec<Vec<u64>> = f9.enumerate(10).unwrap().map(|e| e.coeffs().to_vec()).collect();
        assert_eq!(all.len(), 9);
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 9);
        // Lexicographic: (0,0), (0,1), (0,2), (1,0), ...
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[3], vec![1, 0]);
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let f = FqConfig::new(3, 2).unwrap();
        assert!(matches!(
            f.enumerate(8),
            Err(FqError::BudgetExceeded { needed: 9, .. })
        ));
    }

    #[test]
    fn modulus_override_is_validated() {
        assert!(FqConfig::with_modulus(3, 2, vec![1, 0, 1]).is_ok());
        // x^2 + 2x + 1 = (x+1)^2 is reducible.
        assert_eq!(
            FqConfig::with_modulus(3, 2, vec![1, 2, 1]).err(),
            Some(FqError::Reducible { p: 3 })
        );
        assert!(FqConfig::with_modulus(3, 2, vec![1, 1]).is_err());
    }

    #[test]
    fn traces_are_modulus_independent_as_multisets() {
        let a = FqConfig::with_modulus(3, 2, find_irreducible_nth(3, 2, 0).unwrap()).unwrap();
        let b = FqConfig::with_modulus(3, 2, find_irreducible_nth(3, 2, 1).unwrap()).unwrap();
        assert_ne!(a.modulus(), b.modulus());
        let collect = |cfg: &Arc<FqConfig>| {
            let mut v: Vec<u64> = cfg
                .enumerate(100)
                .unwrap()
                .map(|e| e.pow(3).trace())
                .collect();
            v.sort_unstable();
            v
        };
        assert_eq!(collect(&a), collect(&b));
    }

    #[test]
    fn generator_has_full_order() {
        let f = FqConfig::new(3, 2).unwrap();
        let g = f.multiplicative_generator();
        let mut seen = vec![g.clone()];
        let mut cur = g.clone();
        for _ in 0..7 {
            cur = cur.mul(&g);
            assert!(!seen.contains(&cur));
            seen.push(cur.clone());
        }
        assert!(cur.is_one());
    }

    #[test]
    fn degree_one_field_collapses_x() {
        let f3 = FqConfig::new(3, 1).unwrap();
        // modulus x, so the class of x is 0.
        assert!(f3.x().is_zero());
        assert_eq!(f3.from_int(2).mul(&f3.from_int(2)), f3.from_int(1));
        assert_eq!(f3.from_int(2).trace(), 2);
    }
}
