//! Dense univariate polynomials over an exact field.
//!
//! Coefficients are stored in ascending order with no trailing zeros, so the
//! zero polynomial is the empty vector and `degree` is `None` for it. Sizes
//! here are small (degrees in the tens), so the arithmetic is the plain
//! schoolbook kind; exactness and predictability matter more than speed.

use crate::field::Field;

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<F: Field> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: F) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: F, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![c.zero_like(); k];
        coeffs.push(c);
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Coefficient of `x^k`; needs a sample element to mint zero past the end.
    pub fn coeff_or_zero(&self, k: usize, like: &F) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(|| like.zero_like())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let c = match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.push(c);
        }
        Poly::from_coeffs(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn mul_scalar(&self, s: &F) -> Self {
        Poly::from_coeffs(self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    /// Multiplies by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = vec![zero; k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Euclidean division; `None` when `rhs` is zero.
    pub fn divrem(&self, rhs: &Self) -> Option<(Self, Self)> {
        let dd = rhs.degree()?;
        let lead_inv = rhs.leading().unwrap().inv().expect("field leading coeff");
        let mut rem = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return Some((Poly::zero(), self.clone()));
        }
        let mut quot = vec![lead_inv.zero_like(); rem.len() - dd];
        let mut top = rem.len();
        while top >= dd + 1 {
            let k = top - 1 - dd;
            let factor = rem[top - 1].mul(&lead_inv);
            if !factor.is_zero() {
                for (j, b) in rhs.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].sub(&factor.mul(b));
                }
            }
            quot[k] = factor;
            top -= 1;
        }
        Some((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, rhs: &Self) -> Option<Self> {
        self.divrem(rhs).map(|(_, r)| r)
    }

    /// Monic associate; `None` for the zero polynomial.
    pub fn to_monic(&self) -> Option<Self> {
        let lead = self.leading()?;
        Some(self.mul_scalar(&lead.inv().expect("nonzero leading coeff")))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b).unwrap();
            a = b;
            b = r;
        }
        a.to_monic().unwrap_or(a)
    }

    /// Extended Euclid: returns `(g, u, v)` with `u*self + v*rhs = g`, `g` monic
    /// (or zero when both inputs are zero).
    pub fn xgcd(&self, rhs: &Self) -> (Self, Self, Self) {
        let like = self
            .coeffs
            .first()
            .or_else(|| rhs.coeffs.first())
            .cloned();
        let like = match like {
            Some(c) => c,
            None => return (Poly::zero(), Poly::zero(), Poly::zero()),
        };
        let one = Poly::constant(like.one_like());
        let mut r0 = self.clone();
        let mut r1 = rhs.clone();
        let mut s0 = one.clone();
        let mut s1 = Poly::zero();
        let mut t0 = Poly::zero();
        let mut t1 = one;
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).unwrap();
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        match r0.leading().map(|l| l.inv().expect("nonzero leading coeff")) {
            Some(inv) => (r0.mul_scalar(&inv), s0.mul_scalar(&inv), t0.mul_scalar(&inv)),
            None => (r0, s0, t0),
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F) -> F {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// The polynomial modulo `x^n`.
    pub fn truncated(&self, n: usize) -> Self {
        Poly::from_coeffs(self.coeffs.iter().take(n).cloned().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use num_rational::BigRational;

    fn p(cs: &[i64]) -> Poly<BigRational> {
        Poly::from_coeffs(cs.iter().map(|&c| rat(c, 1)).collect())
    }

    #[test]
    fn trims_trailing_zeros() {
        assert_eq!(p(&[1, 2, 0, 0]), p(&[1, 2]));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[]).degree(), None);
    }

    #[test]
    fn schoolbook_identities() {
        let a = p(&[1, 0, 2, 3]);
        let b = p(&[-4, 1]);
        assert_eq!(a.add(&b).sub(&b), a);
        assert_eq!(a.mul(&b), b.mul(&a));
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn division_by_longer_divisor_gives_zero_quotient() {
        let a = p(&[5, 1]);
        let b = p(&[1, 2, 3, 4]);
        let (q, r) = a.divrem(&b).unwrap();
        assert!(q.is_zero());
        assert_eq!(r, a);
    }

    #[test]
    fn gcd_of_products_with_common_factor() {
        let g = p(&[1, 1]); // x + 1
        let a = g.mul(&p(&[2, 0, 1]));
        let b = g.mul(&p(&[-3, 1]));
        assert_eq!(a.gcd(&b), g);
        assert_eq!(p(&[]).gcd(&p(&[])), Poly::zero());
    }

    #[test]
    fn xgcd_certifies_bezout() {
        let a = p(&[2, 7, 0, 1]);
        let b = p(&[1, 0, 3]);
        let (g, u, v) = a.xgcd(&b);
        assert_eq!(u.mul(&a).add(&v.mul(&b)), g);
        // a, b coprime here, so g = 1.
        assert_eq!(g, p(&[1]));
    }

    #[test]
    fn eval_is_horner() {
        let a = p(&[1, -2, 1]); // (x-1)^2
        assert_eq!(a.eval(&rat(1, 1)), rat(0, 1));
        assert_eq!(a.eval(&rat(3, 2)), rat(1, 4));
        assert_eq!(Poly::<BigRational>::zero().eval(&rat(5, 1)), rat(0, 1));
    }

    #[test]
    fn monomial_and_shift() {
        let m = Poly::monomial(rat(3, 1), 2);
        assert_eq!(m, p(&[0, 0, 3]));
        assert_eq!(p(&[1, 1]).shift_up(2), p(&[0, 0, 1, 1]));
    }
}
