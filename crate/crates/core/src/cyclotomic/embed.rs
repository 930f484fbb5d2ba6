//! Dyadic-rational complex embeddings of cyclotomic elements.
//!
//! Every embedding of Q(zeta_m) sends zeta to e^{2*pi*i*t/m} for a unit t
//! mod m, so an element embeds through cosines and sines of the rational
//! angles 2*pi*j/m. Those are computed here as dyadic rationals with a
//! stated error bound: pi comes from a Machin formula, the angle is reduced
//! to a quadrant exactly (the fraction j/m is rational), and the remaining
//! series is summed with per-term rounding at a widened working precision.
//!
//! These values are diagnostics and bounds, never field arithmetic: all
//! algebraic decisions in this crate are made exactly.

use super::{units_mod, CycElem};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Rounds toward zero to a denominator of 2^bits; |error| < 2^-bits.
fn dyadic_round(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = (x * BigRational::from_integer(scale.clone())).trunc();
    BigRational::new(scaled.to_integer(), scale)
}

fn pow2_inv(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

/// Machin's arctangent series for 1/q, summed until the next term drops
/// below 2^-(bits+8). The series alternates, so the truncation error is
/// bounded by the first omitted term.
fn atan_inv(q: i64, bits: u32) -> BigRational {
    let threshold = pow2_inv(bits + 8);
    let q2 = BigRational::from_integer(BigInt::from(q * q));
    let mut term = BigRational::new(BigInt::one(), BigInt::from(q));
    let mut acc = BigRational::zero();
    let mut k: i64 = 0;
    loop {
        let contrib = &term / BigRational::from_integer(BigInt::from(2 * k + 1));
        if contrib.abs() < threshold {
            break;
        }
        if k % 2 == 0 {
            acc += contrib;
        } else {
            acc -= contrib;
        }
        term = &term / &q2;
        k += 1;
        // Keep the running term from accumulating huge exact denominators.
        term = dyadic_round(&term, bits + 16);
    }
    acc
}

/// pi to within 2^-bits, cached per precision.
fn pi_dyadic(bits: u32) -> BigRational {
    static CACHE: OnceLock<Mutex<HashMap<u32, BigRational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(v) = guard.get(&bits) {
        return v.clone();
    }
    // pi = 16*atan(1/5) - 4*atan(1/239)
    let sixteen = BigRational::from_integer(BigInt::from(16));
    let four = BigRational::from_integer(BigInt::from(4));
    let v = dyadic_round(
        &(sixteen * atan_inv(5, bits + 6) - four * atan_inv(239, bits + 6)),
        bits,
    );
    guard.insert(bits, v.clone());
    v
}

/// cos and sin of x by Taylor series with per-term dyadic rounding at
/// `bits` working precision; valid for |x| <= 2 (we only call it on a
/// quadrant-reduced angle in [0, pi/2)).
fn cos_sin_series(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let threshold = pow2_inv(bits + 4);
    let mut cos = BigRational::zero();
    let mut sin = BigRational::zero();
    // term walks through x^n/n!; even n feed cos, odd n feed sin, with the
    // sign pattern + + - - + + - - of the combined expansion.
    let mut term = BigRational::one();
    let mut n: i64 = 0;
    loop {
        let signed = if (n / 2) % 2 == 0 {
            term.clone()
        } else {
            -term.clone()
        };
        if n % 2 == 0 {
            cos += &signed;
        } else {
            sin += &signed;
        }
        if n >= 3 && term.abs() < threshold {
            break;
        }
        term = dyadic_round(
            &(&term * x / BigRational::from_integer(BigInt::from(n + 1))),
            bits + 8,
        );
        n += 1;
    }
    (cos, sin)
}

/// (cos, sin) of 2*pi*j/m with |error| <= 2^-bits per component.
fn cos_sin_of_turn(j: u64, m: u64, bits: u32) -> (BigRational, BigRational) {
    let j = j % m;
    let wb = bits + 24;
    // Split the turn 4*j/m = q + u with quadrant q in 0..4 and u in [0, 1).
    let q = (4 * j) / m;
    let num = 4 * j - q * m;
    let u = BigRational::new(BigInt::from(num), BigInt::from(m));
    let pi = pi_dyadic(wb);
    let eta = dyadic_round(&(&u * &pi / BigRational::from_integer(BigInt::from(2))), wb);
    let (c, s) = cos_sin_series(&eta, wb);
    let (c, s) = match q {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        3 => (s, -c),
        _ => unreachable!(),
    };
    (dyadic_round(&c, bits + 4), dyadic_round(&s, bits + 4))
}

fn turn_table(m: u64, bits: u32) -> Arc<Vec<(BigRational, BigRational)>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<Vec<(BigRational, BigRational)>>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(v) = guard.get(&(m, bits)) {
        return Arc::clone(v);
    }
    let table: Vec<(BigRational, BigRational)> =
        (0..m).map(|j| cos_sin_of_turn(j, m, bits)).collect();
    let arc = Arc::new(table);
    guard.insert((m, bits), Arc::clone(&arc));
    arc
}

/// All complex embeddings of `a` as dyadic-rational (re, im) pairs, one per
/// unit t mod m in ascending order, each component within 2^-prec of the
/// true value.
pub fn embeddings_dyadic(a: &CycElem, prec: u32) -> Vec<(BigRational, BigRational)> {
    let m = a.modulus();
    // Widen by the coefficient mass so the summed rounding errors stay
    // below the advertised bound.
    let mass: BigRational = a
        .coeffs()
        .iter()
        .map(|c| c.abs())
        .fold(BigRational::one(), |acc, x| acc + x);
    let extra = mass.to_integer().bits() as u32 + 8;
    let bits = prec + extra;
    let table = turn_table(m, bits);
    units_mod(m)
        .into_iter()
        .map(|t| {
            let mut re = BigRational::zero();
            let mut im = BigRational::zero();
            for (i, c) in a.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (cos, sin) = &table[((i as u64 * t) % m) as usize];
                re += c * cos;
                im += c * sin;
            }
            (dyadic_round(&re, prec + 4), dyadic_round(&im, prec + 4))
        })
        .collect()
}

/// Convenience float view of the embeddings (80 dyadic bits, far beyond
/// f64).
pub fn embeddings_f64(a: &CycElem) -> Vec<(f64, f64)> {
    embeddings_dyadic(a, 80)
        .into_iter()
        .map(|(re, im)| (re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN)))
        .collect()
}

/// An upper bound on max_t |sigma_t(a)|, safe for use in inequalities with
/// slack much larger than 2^-40: |sigma(a)|^2 is computed exactly as an
/// embedding of a * conj(a), bounded above dyadically, then square-rooted
/// in floats with a small relative pad.
pub fn max_abs_upper_bound(a: &CycElem) -> f64 {
    let sq = a.abs_square();
    let eps = pow2_inv(40);
    let mut best = BigRational::zero();
    for (re, _) in embeddings_dyadic(&sq, 44) {
        let hi = re + &eps;
        if hi > best {
            best = hi;
        }
    }
    let v = best.to_f64().unwrap_or(f64::INFINITY).max(0.0);
    v.sqrt() * (1.0 + 1e-12)
}
