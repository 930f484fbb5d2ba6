//! Linear recurrence sequences over exact fields.
//!
//! Everything here works over any [`Field`], in practice Q and Q(zeta_m).
//! A [`Recurrence`] carries its coefficients together with every term it
//! was built from, so inference, extension, and resampling compose without
//! re-deriving context. Inference is Berlekamp-Massey; an inferred order L
//! is only marked confirmed when 2L <= number of supplied terms, the usual
//! uniqueness threshold. Generating functions and L-function
//! reconstruction go through [`RationalFn`], which keeps numerator and
//! denominator in lowest terms and re-expands to verify itself.
//!
//! Zero sets of recurrent sequences are eventually periodic. The empirical
//! fitter describes the zeros seen within a horizon; for orders up to two
//! the certifier turns the closed form a_n = A alpha^n + B beta^n into an
//! exact description, splitting on whether alpha/beta is a root of unity,
//! has an embedding off the unit circle (which bounds all zeros), or
//! neither, in which case it honestly reports that it cannot decide.

use crate::cyclotomic::{self, CycElem};
use crate::field::Field;
use crate::poly::Poly;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LrsError {
    #[error("need at least {need} terms, got {got}")]
    TooFewTerms { need: usize, got: usize },
    #[error("supplied terms do not satisfy the recurrence at index {0}")]
    Inconsistent(usize),
    #[error("combination expects {expect} sequences, got {got}")]
    BadArity { expect: usize, got: usize },
    #[error("series is not rational at this horizon")]
    NotRational,
    #[error("zero-set certification implemented only for order <= 2, got {0}")]
    OrderTooHigh(usize),
    #[error("characteristic roots do not lie in the working cyclotomic field")]
    RootsNotInField,
    #[error("square-root search gave up; cannot decide whether roots lie in the field")]
    SqrtUndecided,
    #[error("no eventually periodic fit of the zero set within horizon {horizon}")]
    NoPeriodicFit { horizon: usize },
    #[error("zero bound {0} too large for exhaustive verification")]
    BoundTooLarge(u64),
    #[error(transparent)]
    Cyc(#[from] cyclotomic::CycError),
}

// ---- Recurrence ----

/// a_n = c_1 a_{n-1} + ... + c_m a_{n-m}, together with all known terms
/// (at least the m initial ones) and a confirmation flag from the
/// inference that produced it.
#[derive(Clone, PartialEq, Debug)]
pub struct Recurrence<F: Field> {
    coeffs: Vec<F>,
    known: Vec<F>,
    confirmed: bool,
}

impl<F: Field> Recurrence<F> {
    /// Builds a recurrence and checks that every supplied term beyond the
    /// first m is reproduced by it.
    pub fn new(coeffs: Vec<F>, known: Vec<F>) -> Result<Self, LrsError> {
        let m = coeffs.len();
        // At least one term is always required: field constants can only
        // be minted from an existing element.
        if known.len() < m.max(1) {
            return Err(LrsError::TooFewTerms {
                need: m.max(1),
                got: known.len(),
            });
        }
        for n in m..known.len() {
            let mut acc = known[n].zero_like();
            for (i, c) in coeffs.iter().enumerate() {
                acc = acc.add(&c.mul(&known[n - 1 - i]));
            }
            if acc != known[n] {
                return Err(LrsError::Inconsistent(n));
            }
        }
        let confirmed = 2 * m <= known.len();
        Ok(Recurrence {
            coeffs,
            known,
            confirmed,
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Every term this recurrence was built from.
    pub fn known(&self) -> &[F] {
        &self.known
    }

    /// Whether the inferred order met the 2L <= terms uniqueness bound.
    pub fn confirmed(&self) -> bool {
        self.confirmed
    }

    /// The first `total` terms of the sequence (known terms, then
    /// recurrence steps). An order-0 recurrence is the zero sequence.
    pub fn terms(&self, total: usize) -> Vec<F> {
        let m = self.order();
        let mut out: Vec<F> = self.known.iter().take(total).cloned().collect();
        if m == 0 {
            let zero = self.known[0].zero_like();
            out.resize(total, zero);
            return out;
        }
        while out.len() < total {
            let n = out.len();
            let mut acc = out[0].zero_like();
            for (i, c) in self.coeffs.iter().enumerate() {
                acc = acc.add(&c.mul(&out[n - 1 - i]));
            }
            out.push(acc);
        }
        out
    }

    /// The characteristic polynomial x^m - c_1 x^{m-1} - ... - c_m.
    pub fn characteristic(&self) -> Poly<F> {
        let m = self.order();
        if m == 0 {
            return Poly::constant(self.known[0].one_like());
        }
        let one = self.coeffs[0].one_like();
        let mut v: Vec<F> = (0..m).map(|i| self.coeffs[m - 1 - i].neg()).collect();
        v.push(one);
        Poly::from_coeffs(v)
    }
}

// A zero-order recurrence over an empty term list has no element to mint
// field constants from, so the inference path always stores its input.

/// Minimal-order recurrence consistent with all supplied terms
/// (Berlekamp-Massey). The result is flagged unconfirmed when the order
/// exceeds half the term count, where minimality no longer pins it down.
pub fn berlekamp_massey<F: Field>(terms: &[F]) -> Result<Recurrence<F>, LrsError> {
    if terms.len() < 2 {
        return Err(LrsError::TooFewTerms {
            need: 2,
            got: terms.len(),
        });
    }
    let one = terms[0].one_like();
    let zero = terms[0].zero_like();
    // Connection polynomial C with C[0] = 1; terms satisfy
    // sum C[i] a_{n-i} = 0 for n >= L.
    let mut c = vec![one.clone()];
    let mut b = vec![one.clone()];
    let mut l = 0usize;
    let mut gap = 1usize;
    let mut last_d = one.clone();
    for n in 0..terms.len() {
        let mut d = zero.clone();
        for (i, ci) in c.iter().enumerate() {
            if i <= n {
                d = d.add(&ci.mul(&terms[n - i]));
            }
        }
        if d.is_zero() {
            gap += 1;
        } else {
            let coef = d.div(&last_d).expect("last discrepancy is nonzero");
            if 2 * l <= n {
                let snapshot = c.clone();
                if c.len() < b.len() + gap {
                    c.resize(b.len() + gap, zero.clone());
                }
                for (i, bi) in b.iter().enumerate() {
                    c[i + gap] = c[i + gap].sub(&coef.mul(bi));
                }
                l = n + 1 - l;
                b = snapshot;
                last_d = d;
                gap = 1;
            } else {
                if c.len() < b.len() + gap {
                    c.resize(b.len() + gap, zero.clone());
                }
                for (i, bi) in b.iter().enumerate() {
                    c[i + gap] = c[i + gap].sub(&coef.mul(bi));
                }
                gap += 1;
            }
        }
    }
    let coeffs: Vec<F> = (1..=l)
        .map(|i| c.get(i).map(|x| x.neg()).unwrap_or_else(|| zero.clone()))
        .collect();
    Recurrence::new(coeffs, terms.to_vec())
}

/// The `count` terms following everything the recurrence already knows.
pub fn extend<F: Field>(rec: &Recurrence<F>, count: usize) -> Vec<F> {
    let total = rec.known().len() + count;
    rec.terms(total).split_off(rec.known().len())
}

// ---- Rational functions and generating functions ----

/// num/den in lowest terms. When den(0) is nonzero the fraction is
/// normalized so den(0) = 1 and represents a power series; that series is
/// an LRS from index 0 exactly when deg num < deg den.
#[derive(Clone, PartialEq, Debug)]
pub struct RationalFn<F: Field> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RationalFn<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Self {
        assert!(!den.is_zero(), "denominator must be nonzero");
        let (num, den) = if num.is_zero() {
            (num, Poly::constant(den.leading().unwrap().one_like()))
        } else {
            let g = num.gcd(&den);
            let num = num.divrem(&g).unwrap().0;
            let den = den.divrem(&g).unwrap().0;
            (num, den)
        };
        let c0 = den.coeff_or_zero(0, den.leading().unwrap());
        let scale = if c0.is_zero() {
            den.leading().unwrap().clone()
        } else {
            c0
        };
        let inv = scale.inv().expect("nonzero scale");
        RationalFn {
            num: num.mul_scalar(&inv),
            den: den.mul_scalar(&inv),
        }
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    /// First `count` power-series coefficients; requires den(0) != 0.
    pub fn expand(&self, count: usize) -> Vec<F> {
        let like = self.den.leading().expect("den nonzero");
        let d0 = self.den.coeff_or_zero(0, like);
        assert!(!d0.is_zero(), "series expansion needs den(0) != 0");
        let d0inv = d0.inv().unwrap();
        let mut out: Vec<F> = Vec::with_capacity(count);
        let dd = self.den.degree().unwrap_or(0);
        for n in 0..count {
            let mut acc = self.num.coeff_or_zero(n, like);
            for i in 1..=dd.min(n) {
                let di = self.den.coeff_or_zero(i, like);
                if !di.is_zero() {
                    acc = acc.sub(&di.mul(&out[n - i]));
                }
            }
            out.push(acc.mul(&d0inv));
        }
        out
    }
}

/// f(x)/g(x) with g = 1 - c_1 x - ... - c_m x^m and deg f < m, whose
/// series expansion is the sequence. The result is re-expanded for 3m
/// terms against the recurrence as a self-check.
pub fn generating_function<F: Field>(rec: &Recurrence<F>) -> RationalFn<F> {
    let m = rec.order();
    let like = rec
        .known()
        .first()
        .map(|t| t.one_like())
        .unwrap_or_else(|| rec.coeffs()[0].one_like());
    let mut den = vec![like.clone()];
    for c in rec.coeffs() {
        den.push(c.neg());
    }
    let den = Poly::from_coeffs(den);
    let a = rec.terms(m);
    let mut num = Vec::with_capacity(m);
    for n in 0..m {
        let mut acc = a[n].clone();
        for i in 1..=n {
            acc = acc.sub(&rec.coeffs()[i - 1].mul(&a[n - i]));
        }
        num.push(acc);
    }
    let rf = RationalFn::new(Poly::from_coeffs(num), den);
    let check = 3 * m.max(1);
    assert_eq!(
        rf.expand(check),
        rec.terms(check),
        "generating function failed re-expansion"
    );
    rf
}

/// Infers the recurrence of the subsequence a_{i + n r} from `count` of
/// its terms. Its order never exceeds the parent order (the subsequence's
/// characteristic roots are r-th powers of the parent's).
pub fn arithmetic_subsequence<F: Field>(
    rec: &Recurrence<F>,
    i: usize,
    r: usize,
    count: usize,
) -> Result<Recurrence<F>, LrsError> {
    assert!(r >= 1, "step must be positive");
    let need = i + count.saturating_sub(1) * r + 1;
    let all = rec.terms(need.max(rec.order()));
    let sub: Vec<F> = (0..count).map(|n| all[i + n * r].clone()).collect();
    let inferred = berlekamp_massey(&sub)?;
    assert!(
        inferred.order() <= rec.order(),
        "subsequence order exceeded parent order"
    );
    Ok(inferred)
}

// ---- Termwise polynomial combinations ----

/// A polynomial in several variables with coefficients in the field,
/// evaluated termwise across sequences.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiExpr<F: Field> {
    n_vars: usize,
    terms: Vec<(F, Vec<u64>)>,
}

impl<F: Field> MultiExpr<F> {
    pub fn new(n_vars: usize, terms: Vec<(F, Vec<u64>)>) -> Self {
        assert!(terms.iter().all(|(_, e)| e.len() == n_vars));
        MultiExpr { n_vars, terms }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn eval(&self, xs: &[F]) -> F {
        assert_eq!(xs.len(), self.n_vars);
        let like = if let Some((c, _)) = self.terms.first() {
            c.zero_like()
        } else {
            xs[0].zero_like()
        };
        let mut acc = like;
        for (c, exps) in &self.terms {
            let mut prod = c.clone();
            for (x, &e) in xs.iter().zip(exps) {
                for _ in 0..e {
                    prod = prod.mul(x);
                }
            }
            acc = acc.add(&prod);
        }
        acc
    }
}

/// g(a_{1n}, ..., a_{ln}) termwise for `count` terms, then inference. The
/// combined sequence is again recurrent; whether `count` sufficed shows in
/// the confirmation flag.
pub fn polynomial_combination<F: Field>(
    recs: &[Recurrence<F>],
    g: &MultiExpr<F>,
    count: usize,
) -> Result<Recurrence<F>, LrsError> {
    if recs.len() != g.n_vars() {
        return Err(LrsError::BadArity {
            expect: g.n_vars(),
            got: recs.len(),
        });
    }
    let streams: Vec<Vec<F>> = recs.iter().map(|r| r.terms(count)).collect();
    let combined: Vec<F> = (0..count)
        .map(|n| {
            let xs: Vec<F> = streams.iter().map(|s| s[n].clone()).collect();
            g.eval(&xs)
        })
        .collect();
    berlekamp_massey(&combined)
}

// ---- L-functions from exponential sums ----

/// Reconstructs the rational function L(T) = exp(sum S_k T^k / k) from
/// the sums S_1..S_M. The series is built exactly through T^M by the
/// logarithmic-derivative recurrence (k+1) L_{k+1} = sum S_{i+1} L_{k-i},
/// then Pade reconstruction runs the extended Euclidean algorithm against
/// T^{M+1} under deg num + deg den <= M - 1 and re-expands to verify. The
/// flag is false when the degrees saturate that bound, meaning more sums
/// would be needed to pin the answer down.
pub fn lfunction_from_sums(sums: &[CycElem]) -> Result<(RationalFn<CycElem>, bool), LrsError> {
    let m = sums.len();
    if m < 2 {
        return Err(LrsError::TooFewTerms { need: 2, got: m });
    }
    let modulus = sums[0].modulus();
    let one = CycElem::one(modulus);
    let mut series: Vec<CycElem> = vec![one.clone()];
    for k in 0..m {
        let mut acc = CycElem::zero(modulus);
        for i in 0..=k {
            acc = &acc + &(&sums[i] * &series[k - i]);
        }
        let scale = CycElem::rational(
            modulus,
            BigRational::new(1.into(), ((k + 1) as i64).into()),
        );
        series.push(&acc * &scale);
    }
    let series_poly = Poly::from_coeffs(series.clone());
    let target = Poly::monomial(one.clone(), m + 1);
    // Extended Euclid on (T^{M+1}, series): each remainder r_k satisfies
    // r_k = t_k * series (mod T^{M+1}); stop at the first k with
    // deg r_k + deg t_k <= M - 1.
    let mut r0 = target.clone();
    let mut r1 = series_poly;
    let mut t0: Poly<CycElem> = Poly::zero();
    let mut t1 = Poly::constant(one.clone());
    let found = loop {
        let dr = r1.degree().map(|d| d as i64).unwrap_or(-1);
        let dt = t1.degree().map(|d| d as i64).unwrap_or(0);
        if dr + dt <= m as i64 - 1 {
            break if r1.is_zero() { None } else { Some((r1, t1)) };
        }
        let (q, r) = r0.divrem(&r1).expect("divisor nonzero in EEA");
        let tn = t0.sub(&q.mul(&t1));
        r0 = r1;
        t0 = t1;
        r1 = r;
        t1 = tn;
    };
    let (num, den) = found.ok_or(LrsError::NotRational)?;
    if den.coeff_or_zero(0, &one).is_zero() {
        return Err(LrsError::NotRational);
    }
    let rf = RationalFn::new(num, den);
    if rf.expand(m + 1) != series {
        return Err(LrsError::NotRational);
    }
    let dsum = rf.num().degree().map(|d| d as i64).unwrap_or(-1)
        + rf.den().degree().unwrap_or(0) as i64;
    let confirmed = dsum < m as i64 - 1;
    Ok((rf, confirmed))
}

// ---- Closed forms for small orders ----

/// a_n = sum h_i(n) beta_i^n, valid for n >= from; the beta_i are
/// distinct.
#[derive(Clone, PartialEq, Debug)]
pub struct ClosedForm<F: Field> {
    parts: Vec<(Poly<F>, F)>,
    from: u64,
}

impl<F: Field> ClosedForm<F> {
    pub fn parts(&self) -> &[(Poly<F>, F)] {
        &self.parts
    }

    pub fn valid_from(&self) -> u64 {
        self.from
    }

    pub fn eval(&self, n: u64, like: &F) -> F {
        let mut acc = like.zero_like();
        let nval = like.int_like(n as i64);
        for (h, beta) in &self.parts {
            let mut pw = like.one_like();
            let mut base = beta.clone();
            let mut e = n;
            while e > 0 {
                if e & 1 == 1 {
                    pw = pw.mul(&base);
                }
                base = base.mul(&base);
                e >>= 1;
            }
            acc = acc.add(&h.eval(&nval).mul(&pw));
        }
        acc
    }
}

// ---- Zero sets ----

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Exactness {
    Certified,
    Empirical,
    Undecidable,
}

/// Zeros of a sequence as a finite exceptional set plus arithmetic
/// progressions: n is a zero iff n is exceptional, or n >= start and
/// n mod modulus is one of the residues. Certified descriptions are exact
/// for all n; empirical ones only match up to the stated horizon.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZeroSetDescription {
    pub exceptional: Vec<u64>,
    pub modulus: u64,
    pub residues: Vec<u64>,
    pub start: u64,
    pub horizon: Option<u64>,
    pub exactness: Exactness,
}

impl ZeroSetDescription {
    pub fn new(
        mut exceptional: Vec<u64>,
        modulus: u64,
        mut residues: Vec<u64>,
        start: u64,
        horizon: Option<u64>,
        exactness: Exactness,
    ) -> Self {
        assert!(modulus >= 1);
        exceptional.sort_unstable();
        exceptional.dedup();
        for r in &mut residues {
            *r %= modulus;
        }
        residues.sort_unstable();
        residues.dedup();
        ZeroSetDescription {
            exceptional,
            modulus,
            residues,
            start,
            horizon,
            exactness,
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        self.exceptional.binary_search(&n).is_ok()
            || (n >= self.start && self.residues.binary_search(&(n % self.modulus)).is_ok())
    }

    /// No zeros at all.
    pub fn is_empty(&self) -> bool {
        self.exceptional.is_empty() && self.residues.is_empty()
    }
}

/// Fits the minimal eventually periodic description to the zeros seen in
/// the supplied terms: smallest exceptional set first, then smallest
/// modulus, requiring at least two full periods inside the horizon.
pub fn zero_set_empirical<F: Field>(terms: &[F]) -> Result<ZeroSetDescription, LrsError> {
    if terms.len() < 8 {
        return Err(LrsError::TooFewTerms {
            need: 8,
            got: terms.len(),
        });
    }
    let horizon = terms.len();
    let is_zero: Vec<bool> = terms.iter().map(|t| t.is_zero()).collect();
    let zeros: Vec<u64> = is_zero
        .iter()
        .enumerate()
        .filter(|(_, &z)| z)
        .map(|(n, _)| n as u64)
        .collect();
    // (exceptional count, r, start) lexicographic minimum over all
    // consistent fits.
    let mut best: Option<(usize, u64, u64, Vec<u64>)> = None;
    for r in 1..=horizon / 2 {
        for start in 0..=horizon - 2 * r {
            let mut residues: Vec<bool> = vec![false; r];
            for n in start..horizon {
                if is_zero[n] {
                    residues[n % r] = true;
                }
            }
            let consistent = (start..horizon).all(|n| is_zero[n] == residues[n % r]);
            if !consistent {
                continue;
            }
            let exc = zeros.iter().filter(|&&z| (z as usize) < start).count();
            let key = (exc, r as u64, start as u64);
            if best
                .as_ref()
                .map(|(e, rr, s, _)| key < (*e, *rr, *s))
                .unwrap_or(true)
            {
                let rs: Vec<u64> = residues
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i as u64)
                    .collect();
                best = Some((key.0, key.1, key.2, rs));
            }
        }
    }
    let (_, r, start, residues) = best.ok_or(LrsError::NoPeriodicFit { horizon })?;
    let exceptional: Vec<u64> = zeros.into_iter().filter(|&z| z < start).collect();
    Ok(ZeroSetDescription::new(
        exceptional,
        r,
        residues,
        start,
        Some(horizon as u64),
        Exactness::Empirical,
    ))
}

/// Closed form for a recurrence of order <= 2 over Q(zeta_m), when its
/// characteristic roots lie in the field.
pub fn closed_form_order_le2(rec: &Recurrence<CycElem>) -> Result<ClosedForm<CycElem>, LrsError> {
    let m = rec.order();
    if m > 2 {
        return Err(LrsError::OrderTooHigh(m));
    }
    let modulus = rec.known()[0].modulus();
    let a = rec.terms(2.max(m));
    match m {
        0 => Ok(ClosedForm {
            parts: vec![],
            from: 0,
        }),
        1 => {
            let c = rec.coeffs()[0].clone();
            if c.is_zero() {
                // Everything after a_0 vanishes.
                return Ok(ClosedForm {
                    parts: vec![],
                    from: 1,
                });
            }
            Ok(ClosedForm {
                parts: vec![(Poly::constant(a[0].clone()), c)],
                from: 0,
            })
        }
        _ => {
            let c1 = rec.coeffs()[0].clone();
            let c2 = rec.coeffs()[1].clone();
            if c2.is_zero() {
                // Degenerate: one root is 0; from n = 1 the sequence is
                // geometric with ratio c_1.
                if c1.is_zero() {
                    return Ok(ClosedForm {
                        parts: vec![],
                        from: 2,
                    });
                }
                let scale = a[1].mul(&c1.inv().expect("c1 nonzero"));
                return Ok(ClosedForm {
                    parts: vec![(Poly::constant(scale), c1)],
                    from: 1,
                });
            }
            let half = CycElem::rational(modulus, BigRational::new(1.into(), 2.into()));
            let two_c2 = &c2 + &c2;
            let disc = &(&c1 * &c1) + &(&two_c2 + &two_c2);
            if disc.is_zero() {
                // Repeated root alpha = c_1/2; a_n = (A + B n) alpha^n.
                let alpha = &c1 * &half;
                let ainv = alpha.inverse().expect("alpha nonzero since c2 != 0");
                let big_a = a[0].clone();
                let big_b = &a[1].mul(&ainv) - &a[0];
                return Ok(ClosedForm {
                    parts: vec![(
                        Poly::from_coeffs(vec![big_a, big_b]),
                        alpha,
                    )],
                    from: 0,
                });
            }
            let s = match cyclotomic::sqrt_in_field(&disc) {
                Ok(Some(s)) => s,
                Ok(None) => return Err(LrsError::RootsNotInField),
                Err(cyclotomic::CycError::SqrtUnsupported(_)) => {
                    return Err(LrsError::SqrtUndecided)
                }
                Err(e) => return Err(e.into()),
            };
            let alpha = &(&c1 + &s) * &half;
            let beta = &(&c1 - &s) * &half;
            // a_n = A alpha^n + B beta^n from a_0, a_1.
            let diff = (&alpha - &beta).inverse().expect("distinct roots");
            let big_a = &(&a[1] - &(&a[0] * &beta)) * &diff;
            let big_b = &(&(&a[0] * &alpha) - &a[1]) * &diff;
            Ok(ClosedForm {
                parts: vec![
                    (Poly::constant(big_a), alpha),
                    (Poly::constant(big_b), beta),
                ],
                from: 0,
            })
        }
    }
}

/// Exact zero-set certification for recurrences of order <= 2 over
/// Q(zeta_m), after the closed form a_n = A alpha^n + B beta^n: zeros
/// solve (alpha/beta)^n = -B/A. A root-of-unity ratio gives exact
/// progressions; an embedding with |alpha/beta| != 1 bounds every zero
/// and the bound is checked exhaustively; a non-torsion ratio on the unit
/// circle in every embedding is reported undecidable (with the empirical
/// fit over 64 terms attached for context).
pub fn certify_zero_set_order_le2(
    rec: &Recurrence<CycElem>,
) -> Result<ZeroSetDescription, LrsError> {
    let m = rec.order();
    if m > 2 {
        return Err(LrsError::OrderTooHigh(m));
    }
    let certified_exceptional = |exc: Vec<u64>| {
        ZeroSetDescription::new(exc, 1, vec![], 0, None, Exactness::Certified)
    };
    let all_zero = ZeroSetDescription::new(vec![], 1, vec![0], 0, None, Exactness::Certified);
    let a = rec.terms(2.max(m));
    match m {
        0 => Ok(all_zero),
        1 => {
            let c = &rec.coeffs()[0];
            if a[0].is_zero() {
                return Ok(all_zero);
            }
            if c.is_zero() {
                // Nonzero a_0, then zeros forever.
                return Ok(ZeroSetDescription::new(
                    vec![],
                    1,
                    vec![0],
                    1,
                    None,
                    Exactness::Certified,
                ));
            }
            Ok(certified_exceptional(vec![]))
        }
        _ => {
            let c1 = rec.coeffs()[0].clone();
            let c2 = rec.coeffs()[1].clone();
            if c2.is_zero() {
                // Degenerate characteristic root 0: a_n = a_1 c_1^{n-1}
                // for n >= 1, so the tail is geometric.
                let mut exc: Vec<u64> = vec![];
                if a[0].is_zero() {
                    exc.push(0);
                }
                if a[1].is_zero() {
                    // Zero from index 1 on.
                    return Ok(ZeroSetDescription::new(
                        exc,
                        1,
                        vec![0],
                        1,
                        None,
                        Exactness::Certified,
                    ));
                }
                if c1.is_zero() {
                    // Zero from index 2 on.
                    return Ok(ZeroSetDescription::new(
                        exc,
                        1,
                        vec![0],
                        2,
                        None,
                        Exactness::Certified,
                    ));
                }
                return Ok(certified_exceptional(exc));
            }
            let cf = closed_form_order_le2(rec)?;
            if cf.parts().len() == 1 {
                // Repeated root: a_n = (A + Bn) alpha^n.
                let (h, _alpha) = &cf.parts()[0];
                let like = a[0].clone();
                let big_a = h.coeff_or_zero(0, &like);
                let big_b = h.coeff_or_zero(1, &like);
                if big_b.is_zero() {
                    return if big_a.is_zero() {
                        Ok(all_zero)
                    } else {
                        Ok(certified_exceptional(vec![]))
                    };
                }
                // A + Bn = 0 has at most one solution, n = -A/B, a zero
                // of the sequence only when that is a natural number.
                let ratio = &(-&big_a) * &big_b.inverse().expect("B nonzero");
                let exc = match ratio.as_rational() {
                    Some(q)
                        if q.is_integer()
                            && q >= BigRational::from_integer(0.into()) =>
                    {
                        q.to_integer().to_u64().map(|n| vec![n]).unwrap_or_default()
                    }
                    _ => vec![],
                };
                return Ok(certified_exceptional(exc));
            }
            let (ha, alpha) = &cf.parts()[0];
            let (hb, beta) = &cf.parts()[1];
            let like = a[0].clone();
            let big_a = ha.coeff_or_zero(0, &like);
            let big_b = hb.coeff_or_zero(0, &like);
            match (big_a.is_zero(), big_b.is_zero()) {
                (true, true) => return Ok(all_zero),
                (true, false) | (false, true) => {
                    // Single nonzero geometric term with nonzero root.
                    return Ok(certified_exceptional(vec![]));
                }
                _ => {}
            }
            let rho = alpha.mul(&beta.inverse().expect("beta nonzero"));
            let gamma = &(-&big_b) * &big_a.inverse().expect("A nonzero");
            if let Some(ord) = cyclotomic::root_of_unity_order(&rho)? {
                // Solutions of rho^n = gamma form residue classes mod ord.
                let mut residues = vec![];
                let mut pw = CycElem::one(rho.modulus());
                for j in 0..ord {
                    if pw == gamma {
                        residues.push(j);
                    }
                    pw = &pw * &rho;
                }
                if residues.is_empty() {
                    return Ok(certified_exceptional(vec![]));
                }
                return Ok(ZeroSetDescription::new(
                    vec![],
                    ord,
                    residues,
                    0,
                    None,
                    Exactness::Certified,
                ));
            }
            let rho_abs2 = rho.abs_square();
            if rho_abs2 == CycElem::one(rho.modulus()) {
                // Every embedding of rho lies on the unit circle but rho
                // is not torsion: no bound is available here.
                let terms = rec.terms(64);
                let mut d = zero_set_empirical(&terms)?;
                d.exactness = Exactness::Undecidable;
                return Ok(d);
            }
            let bound = zero_index_bound(&rho_abs2, &gamma.abs_square())?;
            let terms = rec.terms(bound as usize + 1);
            let exc: Vec<u64> = terms
                .iter()
                .enumerate()
                .filter(|(_, t)| t.is_zero())
                .map(|(n, _)| n as u64)
                .collect();
            Ok(certified_exceptional(exc))
        }
    }
}

/// Given u = |rho|^2 and w = |gamma|^2 as exact elements with u != 1,
/// returns n0 such that u^n = w has no solutions n > n0 in the embedding
/// where u stays away from 1. Dyadic enclosures are widened until they
/// exclude 1 and stay positive, then a small safety margin absorbs the
/// final float rounding.
fn zero_index_bound(u: &CycElem, w: &CycElem) -> Result<u64, LrsError> {
    for prec in [64u32, 128, 256, 512] {
        let ue = cyclotomic::embeddings_dyadic(u, prec);
        let we = cyclotomic::embeddings_dyadic(w, prec);
        let err = BigRational::new(1.into(), num_bigint::BigInt::from(2).pow(prec));
        for (idx, (ur, _)) in ue.iter().enumerate() {
            let ul = ur - &err;
            let uh = ur + &err;
            let wl = &we[idx].0 - &err;
            let wh = &we[idx].0 + &err;
            let one = BigRational::from_integer(1.into());
            if wl <= BigRational::from_integer(0.into()) {
                continue;
            }
            let n0 = if uh < one {
                if wl > one {
                    Some(0u64)
                } else {
                    let num = wl.to_f64().unwrap_or(f64::NAN).ln();
                    let den = uh.to_f64().unwrap_or(f64::NAN).ln();
                    let q = num / den;
                    if q.is_finite() {
                        Some(q.ceil() as u64 + 4)
                    } else {
                        None
                    }
                }
            } else if ul > one {
                if wh < one {
                    Some(0u64)
                } else {
                    let num = wh.to_f64().unwrap_or(f64::NAN).ln();
                    let den = ul.to_f64().unwrap_or(f64::NAN).ln();
                    let q = num / den;
                    if q.is_finite() {
                        Some(q.ceil() as u64 + 4)
                    } else {
                        None
                    }
                }
            } else {
                None
            };
            if let Some(n0) = n0 {
                if n0 <= 10_000 {
                    return Ok(n0);
                }
            }
        }
    }
    Err(LrsError::BoundTooLarge(10_000))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    fn fib() -> Recurrence<BigRational> {
        berlekamp_massey(&[rat(1, 1), rat(1, 1), rat(2, 1), rat(3, 1), rat(5, 1), rat(8, 1)])
            .unwrap()
    }

    #[test]
    fn infers_fibonacci() {
        let r = fib();
        assert_eq!(r.order(), 2);
        assert_eq!(r.coeffs(), &[rat(1, 1), rat(1, 1)]);
        assert!(r.confirmed());
    }

    #[test]
    fn infers_constant_and_zero() {
        let c = berlekamp_massey(&vec![rat(7, 1); 6]).unwrap();
        assert_eq!(c.order(), 1);
        assert_eq!(c.coeffs(), &[rat(1, 1)]);
        let z = berlekamp_massey(&vec![rat(0, 1); 6]).unwrap();
        assert_eq!(z.order(), 0);
    }

    #[test]
    fn extend_continues_after_known_terms() {
        let r = fib();
        assert_eq!(extend(&r, 3), vec![rat(13, 1), rat(21, 1), rat(34, 1)]);
        let z = berlekamp_massey(&vec![rat(0, 1); 6]).unwrap();
        assert_eq!(extend(&z, 5), vec![rat(0, 1); 5]);
        let g = Recurrence::new(vec![rat(2, 1)], vec![rat(1, 1)]).unwrap();
        assert_eq!(
            extend(&g, 4),
            vec![rat(2, 1), rat(4, 1), rat(8, 1), rat(16, 1)]
        );
    }

    #[test]
    fn recurrence_rejects_inconsistent_terms() {
        let bad = Recurrence::new(vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1), rat(3, 1)]);
        assert_eq!(bad, Err(LrsError::Inconsistent(2)));
    }

    #[test]
    fn generating_functions_match_hand_values() {
        let ones = berlekamp_massey(&vec![rat(1, 1); 8]).unwrap();
        let gf = generating_function(&ones);
        assert_eq!(gf.num().coeffs(), &[rat(1, 1)]);
        assert_eq!(gf.den().coeffs(), &[rat(1, 1), rat(-1, 1)]);

        let f = generating_function(&fib());
        assert_eq!(f.num().coeffs(), &[rat(1, 1)]);
        assert_eq!(f.den().coeffs(), &[rat(1, 1), rat(-1, 1), rat(-1, 1)]);

        let alt = berlekamp_massey(&[
            rat(1, 1),
            rat(-1, 1),
            rat(1, 1),
            rat(-1, 1),
            rat(1, 1),
            rat(-1, 1),
        ])
        .unwrap();
        let g = generating_function(&alt);
        assert_eq!(g.num().coeffs(), &[rat(1, 1)]);
        assert_eq!(g.den().coeffs(), &[rat(1, 1), rat(1, 1)]);
    }

    #[test]
    fn even_index_fibonacci() {
        let sub = arithmetic_subsequence(&fib(), 0, 2, 8).unwrap();
        assert_eq!(sub.order(), 2);
        assert_eq!(sub.coeffs(), &[rat(3, 1), rat(-1, 1)]);
        // r = 1 reproduces the same terms.
        let same = arithmetic_subsequence(&fib(), 0, 1, 6).unwrap();
        assert_eq!(same.terms(6), fib().terms(6));
        // Constant subsequences collapse to order 1.
        let ones = berlekamp_massey(&vec![rat(5, 1); 8]).unwrap();
        let s = arithmetic_subsequence(&ones, 3, 4, 8).unwrap();
        assert_eq!(s.order(), 1);
    }

    #[test]
    fn combinations_of_geometrics_and_squares() {
        let two = Recurrence::new(vec![rat(2, 1)], vec![rat(1, 1)]).unwrap();
        let three = Recurrence::new(vec![rat(3, 1)], vec![rat(1, 1)]).unwrap();
        let sum = MultiExpr::new(2, vec![(rat(1, 1), vec![1, 0]), (rat(1, 1), vec![0, 1])]);
        let comb = polynomial_combination(&[two, three], &sum, 10).unwrap();
        assert_eq!(comb.order(), 2);
        // Characteristic roots 2 and 3: x^2 - 5x + 6.
        assert_eq!(comb.coeffs(), &[rat(5, 1), rat(-6, 1)]);

        let sq = MultiExpr::new(1, vec![(rat(1, 1), vec![2])]);
        let f2 = polynomial_combination(&[fib()], &sq, 10).unwrap();
        assert_eq!(f2.order(), 3);
        assert!(f2.confirmed());

        let konst = MultiExpr::new(1, vec![(rat(9, 1), vec![0])]);
        let k = polynomial_combination(&[fib()], &konst, 8).unwrap();
        assert_eq!(k.order(), 1);

        assert_eq!(
            polynomial_combination(&[fib()], &sum, 8),
            Err(LrsError::BadArity { expect: 2, got: 1 })
        );
    }

    #[test]
    fn lfunction_trivial_cases() {
        let zeros = vec![CycElem::zero(3); 4];
        let (l, confirmed) = lfunction_from_sums(&zeros).unwrap();
        assert_eq!(l.num().coeffs(), &[CycElem::one(3)]);
        assert_eq!(l.den().coeffs(), &[CycElem::one(3)]);
        assert!(confirmed);

        let ones = vec![CycElem::one(3); 4];
        let (l, _) = lfunction_from_sums(&ones).unwrap();
        // Zeta of a point: 1/(1 - T).
        assert_eq!(l.num().coeffs(), &[CycElem::one(3)]);
        assert_eq!(
            l.den().coeffs(),
            &[CycElem::one(3), CycElem::from_integer(3, -1)]
        );
    }

    #[test]
    fn lfunction_of_quadratic_character_sums() {
        // S_k = -(-S_1)^k with S_1 = 1 + 2 zeta_3 telescopes the
        // exponential series to 1 + S_1 T.
        let s1 = CycElem::from_coeffs(3, vec![rat(1, 1), rat(2, 1)]);
        let sums: Vec<CycElem> = (1..=4u64).map(|k| -&(-&s1).pow(k)).collect();
        let (l, confirmed) = lfunction_from_sums(&sums).unwrap();
        assert!(confirmed);
        assert_eq!(l.den().coeffs(), &[CycElem::one(3)]);
        assert_eq!(l.num().coeffs().len(), 2);
        assert_eq!(l.num().coeffs()[1], s1);
    }

    #[test]
    fn lfunction_agrees_with_inferred_recurrence_roots() {
        // The multiset of reciprocal roots of num*den must match the
        // characteristic roots of the recurrence satisfied by the sums.
        let s1 = CycElem::from_coeffs(3, vec![rat(1, 1), rat(2, 1)]);
        let sums: Vec<CycElem> = (1..=6u64).map(|k| -&(-&s1).pow(k)).collect();
        let (l, _) = lfunction_from_sums(&sums).unwrap();
        let rec = berlekamp_massey(&sums).unwrap();
        let prod = l.num().mul(l.den());
        let d = prod.degree().unwrap();
        let rev = Poly::from_coeffs(prod.coeffs().iter().rev().cloned().collect::<Vec<_>>());
        assert_eq!(d, rec.order());
        assert_eq!(
            rev.to_monic().unwrap(),
            rec.characteristic().to_monic().unwrap()
        );
    }

    #[test]
    fn empirical_zero_sets() {
        // zeta_3^n - 1 vanishes exactly on multiples of 3.
        let z = CycElem::zeta(3);
        let one = CycElem::one(3);
        let terms: Vec<CycElem> = (0..12u64).map(|n| &z.pow(n) - &one).collect();
        let d = zero_set_empirical(&terms).unwrap();
        assert_eq!(d.exceptional, Vec::<u64>::new());
        assert_eq!(d.modulus, 3);
        assert_eq!(d.residues, vec![0]);
        assert_eq!(d.start, 0);
        assert_eq!(d.exactness, Exactness::Empirical);

        // All nonzero: empty description.
        let nz: Vec<BigRational> = (1..=10).map(|n| rat(n, 1)).collect();
        let d = zero_set_empirical(&nz).unwrap();
        assert!(d.is_empty());

        // (n - 2) 2^n: single exceptional zero, no progression.
        let terms: Vec<BigRational> = (0..12i64)
            .map(|n| rat((n - 2) * (1 << n), 1))
            .collect();
        let d = zero_set_empirical(&terms).unwrap();
        assert_eq!(d.exceptional, vec![2]);
        assert!(d.residues.is_empty());

        assert!(matches!(
            zero_set_empirical(&nz[..5]),
            Err(LrsError::TooFewTerms { .. })
        ));
    }

    #[test]
    fn empirical_fit_can_fail() {
        // A single zero at the last index cannot be exceptional (the
        // window must cover it) nor periodic.
        let mut terms: Vec<BigRational> = (0..8).map(|_| rat(1, 1)).collect();
        terms[7] = rat(0, 1);
        assert_eq!(
            zero_set_empirical(&terms),
            Err(LrsError::NoPeriodicFit { horizon: 8 })
        );
    }

    #[test]
    fn certify_root_of_unity_ratio() {
        // a_n = zeta_3^n - 1: roots zeta_3 and 1, ratio of order 3.
        let z = CycElem::zeta(3);
        let one = CycElem::one(3);
        let terms: Vec<CycElem> = (0..8u64).map(|n| &z.pow(n) - &one).collect();
        let rec = berlekamp_massey(&terms).unwrap();
        assert_eq!(rec.order(), 2);
        let d = certify_zero_set_order_le2(&rec).unwrap();
        assert_eq!(d.exactness, Exactness::Certified);
        assert_eq!(d.modulus, 3);
        assert_eq!(d.residues, vec![0]);
        assert!(d.exceptional.is_empty());
        // Certified and empirical views agree on the horizon.
        let emp = zero_set_empirical(&rec.terms(24)).unwrap();
        for n in 0..24 {
            assert_eq!(d.contains(n), emp.contains(n), "n = {n}");
        }
    }

    #[test]
    fn certify_magnitude_bound() {
        // a_n = 2^n - 1 over Q: ratio 2 forces all zeros below a bound.
        let terms: Vec<CycElem> = (0..8u64)
            .map(|n| CycElem::from_integer(1, (1i64 << n) - 1))
            .collect();
        let rec = berlekamp_massey(&terms).unwrap();
        let d = certify_zero_set_order_le2(&rec).unwrap();
        assert_eq!(d.exactness, Exactness::Certified);
        assert_eq!(d.exceptional, vec![0]);
        assert!(d.residues.is_empty());
    }

    #[test]
    fn certify_repeated_root() {
        // a_n = (1 + n) 1^n is never zero for n >= 0.
        let terms: Vec<CycElem> = (1..=8).map(|n| CycElem::from_integer(1, n)).collect();
        let rec = berlekamp_massey(&terms).unwrap();
        assert_eq!(rec.order(), 2);
        let d = certify_zero_set_order_le2(&rec).unwrap();
        assert_eq!(d.exactness, Exactness::Certified);
        assert!(d.is_empty());

        // a_n = (2 - n) 2^n has exactly one zero, at n = 2.
        let terms: Vec<CycElem> = (0..8i64)
            .map(|n| CycElem::from_integer(1, (2 - n) * (1 << n)))
            .collect();
        let rec = berlekamp_massey(&terms).unwrap();
        let d = certify_zero_set_order_le2(&rec).unwrap();
        assert_eq!(d.exactness, Exactness::Certified);
        assert_eq!(d.exceptional, vec![2]);
    }

    #[test]
    fn certify_rejects_roots_outside_field() {
        // x^2 - x - 1 has irrational roots; over Q = Q(zeta_1) they are
        // out of reach.
        let terms: Vec<CycElem> = [1i64, 1, 2, 3, 5, 8, 13, 21]
            .iter()
            .map(|&n| CycElem::from_integer(1, n))
            .collect();
        let rec = berlekamp_massey(&terms).unwrap();
        assert_eq!(
            certify_zero_set_order_le2(&rec),
            Err(LrsError::RootsNotInField)
        );
    }

    #[test]
    fn certify_undecidable_unit_circle_ratio() {
        // alpha = 3 + 4i, beta = 5 in Q(i): |alpha/beta| = 1 in every
        // embedding yet the ratio is not a root of unity.
        let alpha = CycElem::from_coeffs(4, vec![rat(3, 1), rat(4, 1)]);
        let beta = CycElem::from_integer(4, 5);
        let a0 = CycElem::from_integer(4, 2);
        let a1 = &alpha + &beta;
        let c1 = &alpha + &beta;
        let c2 = -&(&alpha * &beta);
        let mut terms = vec![a0, a1];
        for n in 2..10 {
            let t = &(&c1 * &terms[n - 1]) + &(&c2 * &terms[n - 2]);
            terms.push(t);
        }
        let rec = Recurrence::new(vec![c1, c2], terms).unwrap();
        let d = certify_zero_set_order_le2(&rec).unwrap();
        assert_eq!(d.exactness, Exactness::Undecidable);
    }

    #[test]
    fn certify_order_bound() {
        let terms: Vec<CycElem> = (0..8i64)
            .map(|n| CycElem::from_integer(1, n * n * n))
            .collect();
        let rec = berlekamp_massey(&terms).unwrap();
        assert!(rec.order() > 2);
        assert_eq!(
            certify_zero_set_order_le2(&rec),
            Err(LrsError::OrderTooHigh(4))
        );
    }

    #[test]
    fn closed_forms_reproduce_terms() {
        let z = CycElem::zeta(3);
        let one = CycElem::one(3);
        let terms: Vec<CycElem> = (0..8u64).map(|n| &z.pow(n) - &one).collect();
        let rec = berlekamp_massey(&terms).unwrap();
        let cf = closed_form_order_le2(&rec).unwrap();
        let like = CycElem::one(3);
        for (n, t) in rec.terms(10).iter().enumerate() {
            if (n as u64) >= cf.valid_from() {
                assert_eq!(cf.eval(n as u64, &like), *t, "n = {n}");
            }
        }
        // Distinct bases.
        let bases: Vec<&CycElem> = cf.parts().iter().map(|(_, b)| b).collect();
        assert!(bases[0] != bases[1]);
    }

    #[test]
    fn inference_is_idempotent_under_extension() {
        let r = fib();
        let more = r.terms(16);
        let again = berlekamp_massey(&more).unwrap();
        assert_eq!(again.order(), r.order());
        assert_eq!(again.coeffs(), r.coeffs());
    }
}
