//! Exact square roots in Q(zeta_m).
//!
//! The search works modulo a split prime: pick a prime l = 1 (mod m), where
//! the cyclotomic polynomial factors into distinct linear pieces, take a
//! square root of the target at every root, and reassemble coordinate
//! candidates by interpolation after Hensel-lifting everything to l^e. Each
//! root contributes an unknown sign, so up to 2^(phi-1) candidates are
//! walked (Gray-code order, one cheap update per step) behind a coordinate
//! size filter; survivors are verified by exact squaring, which is what
//! makes the Some answer unconditional.
//!
//! A "not a square" answer is also unconditional: it is only produced when
//! some residue is a quadratic non-residue, and squares stay squares under
//! every reduction map Z[zeta] -> F_l. Running out of search room returns
//! an explicit unsupported error instead of guessing.

use super::{cyclotomic_polynomial, euler_phi, units_mod, CycElem, CycError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

// ---- Small prime-field helpers (u64 with u128 intermediates) ----

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Legendre symbol of a mod odd prime l, in {-1, 0, 1}.
fn legendre(a: u64, l: u64) -> i32 {
    let a = a % l;
    if a == 0 {
        return 0;
    }
    let e = powmod(a, (l - 1) / 2, l);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Tonelli-Shanks square root mod an odd prime; requires (a|l) = 1.
fn sqrt_mod_prime(a: u64, l: u64) -> u64 {
    let a = a % l;
    if l % 4 == 3 {
        return powmod(a, (l + 1) / 4, l);
    }
    // Write l - 1 = q * 2^s with q odd.
    let s = (l - 1).trailing_zeros();
    let q = (l - 1) >> s;
    let mut z = 2;
    while legendre(z, l) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, l);
    let mut t = powmod(a, q, l);
    let mut r = powmod(a, (q + 1) / 2, l);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulmod(t2, t2, l);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), l);
        m = i;
        c = mulmod(b, b, l);
        t = mulmod(t, c, l);
        r = mulmod(r, b, l);
    }
    r
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Primes l = 1 (mod m) above 2^20, ascending.
fn split_primes(m: u64) -> impl Iterator<Item = u64> {
    let start: u64 = 1 << 20;
    let first = start + ((1 + m - start % m) % m);
    (0..).map(move |i| first + i * m).filter(|&l| is_prime_u64(l))
}

// ---- BigInt modular helpers for work mod l^e ----

fn big_mod(x: &BigInt, modulus: &BigInt) -> BigInt {
    let r = x % modulus;
    if r.sign() == num_bigint::Sign::Minus {
        r + modulus
    } else {
        r
    }
}

fn big_modinv(x: &BigInt, modulus: &BigInt) -> BigInt {
    let g = x.extended_gcd(modulus);
    assert!(g.gcd.is_one(), "inverse of a non-unit mod l^e");
    big_mod(&g.x, modulus)
}

fn eval_mod(coeffs: &[BigInt], x: &BigInt, modulus: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = big_mod(&(&acc * x + c), modulus);
    }
    acc
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

enum Attempt {
    /// Witnessed quadratic non-residue: provably not a square.
    NonSquare,
    /// Verified square root (integral coordinates).
    Found(Vec<BigInt>),
    /// The prime divides the target's image somewhere, or no candidate
    /// verified within the size cap; try elsewhere.
    Unlucky,
}

/// One prime's worth of search: residues, lifting, interpolation, sign walk.
fn attempt(m: u64, phi: usize, b: &[BigInt], l: u64) -> Attempt {
    // Primitive m-th root of unity mod l via the (l-1)/m power map.
    let cofactor = (l - 1) / m;
    let m_primes = prime_factors(m);
    let mut w0 = 0;
    for c in 2u64.. {
        let w = powmod(c, cofactor, l);
        if w != 1 && m_primes.iter().all(|&p| powmod(w, m / p, l) != 1) {
            w0 = w;
            break;
        }
    }
    let roots_u64: Vec<u64> = units_mod(m).into_iter().map(|t| powmod(w0, t, l)).collect();
    debug_assert_eq!(roots_u64.len(), phi);

    // Residues of b at each root; bail to another prime on zeros (Hensel
    // needs units), refuse on any non-residue.
    let b_mod_l: Vec<u64> = b
        .iter()
        .map(|c| {
            let r = big_mod(c, &BigInt::from(l));
            u64::try_from(&r).unwrap()
        })
        .collect();
    let mut values_l = Vec::with_capacity(phi);
    for &w in &roots_u64 {
        let mut acc: u64 = 0;
        for c in b_mod_l.iter().rev() {
            acc = (mulmod(acc, w, l) + c) % l;
        }
        match legendre(acc, l) {
            0 => return Attempt::Unlucky,
            -1 => return Attempt::NonSquare,
            _ => values_l.push(acc),
        }
    }

    let phi_poly: Vec<BigInt> = cyclotomic_polynomial(m);
    let phi_deriv: Vec<BigInt> = phi_poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();

    // Escalating precision: the true root has fixed coordinates, so some
    // l^e is eventually large enough to reconstruct them.
    let lg_l = (l as f64).log2();
    let mut e = ((192.0 / lg_l).ceil() as u32).max(2);
    loop {
        let modulus = BigInt::from(l).pow(e);
        if modulus.bits() > 4608 {
            return Attempt::Unlucky;
        }

        // Lift each root of Phi_m and the square root of b above it.
        let mut roots = Vec::with_capacity(phi);
        let mut sqrts = Vec::with_capacity(phi);
        for (j, &w) in roots_u64.iter().enumerate() {
            let mut wk = BigInt::from(w);
            let mut prec = BigInt::from(l);
            while prec < modulus {
                prec = (&prec * &prec).min(modulus.clone());
                let f = eval_mod(&phi_poly, &wk, &prec);
                let fp = eval_mod(&phi_deriv, &wk, &prec);
                wk = big_mod(&(&wk - f * big_modinv(&fp, &prec)), &prec);
            }
            let bw = eval_mod(b, &wk, &modulus);
            let mut rk = BigInt::from(sqrt_mod_prime(values_l[j], l));
            let mut prec = BigInt::from(l);
            let inv2 = big_modinv(&BigInt::from(2), &modulus);
            while prec < modulus {
                prec = (&prec * &prec).min(modulus.clone());
                let bw_p = big_mod(&bw, &prec);
                rk = big_mod(&((&rk + bw_p * big_modinv(&rk, &prec)) * &inv2), &prec);
            }
            debug_assert_eq!(big_mod(&(&rk * &rk), &modulus), big_mod(&bw, &modulus));
            roots.push(wk);
            sqrts.push(rk);
        }

        // Lagrange basis polynomials mod l^e (independent of signs).
        let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(phi);
        for j in 0..phi {
            let mut num = vec![BigInt::one()];
            let mut den = BigInt::one();
            for i in 0..phi {
                if i == j {
                    continue;
                }
                // num *= (x - W_i)
                let mut next = vec![BigInt::zero(); num.len() + 1];
                for (k, c) in num.iter().enumerate() {
                    next[k + 1] = big_mod(&(&next[k + 1] + c), &modulus);
                    next[k] = big_mod(&(&next[k] - c * &roots[i]), &modulus);
                }
                num = next;
                den = big_mod(&(den * (&roots[j] - &roots[i])), &modulus);
            }
            let dinv = big_modinv(&den, &modulus);
            for c in num.iter_mut() {
                *c = big_mod(&(&*c * &dinv), &modulus);
            }
            basis.push(num);
        }

        // Gray-code walk over sign patterns (first sign pinned: s and -s
        // are the same answer). Candidates pass a coordinate size filter
        // before the exact verification.
        let threshold: BigInt = &modulus >> 12;
        let half: BigInt = &modulus >> 1;
        let target = CycElem::from_coeffs(
            m,
            b.iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        );
        let mut coeffs: Vec<BigInt> = vec![BigInt::zero(); phi];
        for j in 0..phi {
            for k in 0..phi {
                coeffs[k] = big_mod(&(&coeffs[k] + &sqrts[j] * &basis[j][k]), &modulus);
            }
        }
        let mut signs = vec![1i8; phi];
        let total: u64 = 1 << (phi - 1);
        for g in 0..total {
            if g > 0 {
                // Flip the sign of one interpolation node per step.
                let j = (g.trailing_zeros() + 1) as usize;
                let two = BigInt::from(2 * (-(signs[j] as i64)));
                for k in 0..phi {
                    coeffs[k] =
                        big_mod(&(&coeffs[k] + &two * &sqrts[j] * &basis[j][k]), &modulus);
                }
                signs[j] = -signs[j];
            }
            let centered: Vec<BigInt> = coeffs
                .iter()
                .map(|c| if c > &half { c - &modulus } else { c.clone() })
                .collect();
            if centered.iter().any(|c| c.abs() > threshold) {
                continue;
            }
            let cand = CycElem::from_coeffs(
                m,
                centered
                    .iter()
                    .map(|c| BigRational::from_integer(c.clone()))
                    .collect(),
            );
            if &cand * &cand == target {
                return Attempt::Found(centered);
            }
        }
        e *= 2;
    }
}

/// Exact square root of `a` in its own field Q(zeta_m).
///
/// Returns `Ok(Some(s))` with `s * s == a` verified exactly, `Ok(None)` when
/// `a` is provably not a square in Q(zeta_m), and
/// `Err(CycError::SqrtUnsupported)` when the degree or reconstruction size
/// exceeds what this searcher handles (never a silent wrong answer).
pub fn sqrt_in_field(a: &CycElem) -> Result<Option<CycElem>, CycError> {
    if a.is_zero() {
        return Ok(Some(a.clone()));
    }
    let m = a.modulus();
    if let Some(q) = a.as_rational() {
        if let Some(r) = rational_sqrt(&q) {
            return Ok(Some(CycElem::rational(m, r)));
        }
        if m <= 2 {
            return Ok(None);
        }
    }
    let phi = euler_phi(m) as usize;
    if phi > 16 {
        return Err(CycError::SqrtUnsupported(format!(
            "field degree {} over Q is beyond the supported bound 16",
            phi
        )));
    }

    // Clear denominators: with d the lcm of coordinate denominators,
    // a*d^2 is an algebraic integer, and so is any square root of it, so
    // the reconstruction only ever meets integer coordinates.
    let mut d = BigInt::one();
    for c in a.coeffs() {
        d = d.lcm(c.denom());
    }
    let dr = BigRational::from_integer(d.clone());
    let b: Vec<BigInt> = a
        .coeffs()
        .iter()
        .map(|c| (c * &dr * &dr).to_integer())
        .collect();

    for l in split_primes(m).take(3) {
        match attempt(m, phi, &b, l) {
            Attempt::NonSquare => return Ok(None),
            Attempt::Found(coords) => {
                let s = CycElem::from_coeffs(
                    m,
                    coords
                        .into_iter()
                        .map(|c| BigRational::new(c, d.clone()))
                        .collect(),
                );
                debug_assert_eq!(&s * &s, *a);
                return Ok(Some(s));
            }
            Attempt::Unlucky => continue,
        }
    }
    Err(CycError::SqrtUnsupported(
        "no square root found within the reconstruction cap, and no disproof either".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    #[test]
    fn rational_squares_come_back_rational() {
        let a = CycElem::rational(5, rat(9, 4));
        let s = sqrt_in_field(&a).unwrap().unwrap();
        assert_eq!(s.as_rational().unwrap().abs(), rat(3, 2));
        assert_eq!(&s * &s, a);
    }

    #[test]
    fn minus_three_is_a_square_in_the_third_cyclotomic() {
        let a = CycElem::from_integer(3, -3);
        let s = sqrt_in_field(&a).unwrap().expect("is a square");
        assert_eq!(&s * &s, a);
        // The answer is +-(1 + 2 zeta).
        let expected = CycElem::from_coeffs(3, vec![rat(1, 1), rat(2, 1)]);
        assert!(s == expected || s == -&expected);
    }

    #[test]
    fn square_of_one_minus_zeta_recovers() {
        let one_minus = &CycElem::one(3) - &CycElem::zeta(3);
        let sq = &one_minus * &one_minus;
        let s = sqrt_in_field(&sq).unwrap().expect("built as a square");
        assert!(s == one_minus || s == -&one_minus);
    }

    #[test]
    fn two_is_not_a_square_in_the_third_cyclotomic() {
        // The only quadratic subfield of Q(zeta_3) is generated by the
        // square root of -3, so 2 must be refused.
        let a = CycElem::from_integer(3, 2);
        assert_eq!(sqrt_in_field(&a).unwrap(), None);
    }

    #[test]
    fn zeta_five_has_a_root_inside_its_own_field() {
        // (zeta^3)^2 = zeta^6 = zeta.
        let s = sqrt_in_field(&CycElem::zeta(5)).unwrap().expect("square");
        assert_eq!(&s * &s, CycElem::zeta(5));
    }

    #[test]
    fn five_is_a_square_in_the_fifth_cyclotomic() {
        let a = CycElem::from_integer(5, 5);
        let s = sqrt_in_field(&a).unwrap().expect("sqrt(5) lives here");
        assert_eq!(&s * &s, a);
        assert!(!s.is_rational());
    }

    #[test]
    fn denominators_are_handled() {
        // (-3/4) has square root (1 + 2 zeta)/2.
        let a = CycElem::rational(3, rat(-3, 4));
        let s = sqrt_in_field(&a).unwrap().expect("square");
        assert_eq!(&s * &s, a);
    }

    #[test]
    fn sqrt_of_zero() {
        let z = CycElem::zero(7);
        assert_eq!(sqrt_in_field(&z).unwrap(), Some(z.clone()));
    }
}
