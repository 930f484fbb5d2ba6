//! Randomized structural properties.
//!
//! These complement the example-driven unit tests: every algebraic law
//! here must hold for arbitrary inputs, so each is checked against
//! freshly generated elements rather than frozen values. Conductors stay
//! small (phi(m) <= 4) to keep exact arithmetic fast under many cases.

use num_rational::BigRational;
use persum_core::cyclotomic::{self, CycElem, GaloisAuto, SubfieldSpec};
use persum_core::expsum::{self, MultiPoly};
use persum_core::field::rat;
use persum_core::lrs;
use persum_core::periodicity;
use persum_core::poly::Poly;
use proptest::collection::{btree_set, vec};
use proptest::prelude::*;

const MODULI: [u64; 6] = [1, 3, 4, 5, 8, 12];

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn cyc_elem() -> impl Strategy<Value = (u64, CycElem)> {
    (0..MODULI.len()).prop_flat_map(|i| {
        let m = MODULI[i];
        vec(small_rat(), cyclotomic::euler_phi(m) as usize)
            .prop_map(move |cs| (m, CycElem::from_coeffs(m, cs)))
    })
}

fn cyc_pair() -> impl Strategy<Value = (u64, CycElem, CycElem)> {
    (0..MODULI.len()).prop_flat_map(|i| {
        let m = MODULI[i];
        let phi = cyclotomic::euler_phi(m) as usize;
        (vec(small_rat(), phi), vec(small_rat(), phi)).prop_map(move |(a, b)| {
            (m, CycElem::from_coeffs(m, a), CycElem::from_coeffs(m, b))
        })
    })
}

fn rat_poly(max_len: usize) -> impl Strategy<Value = Poly<BigRational>> {
    vec(small_rat(), 0..max_len).prop_map(Poly::from_coeffs)
}

proptest! {
    #[test]
    fn multiplication_distributes((m, a, b) in cyc_pair(), cs in vec(small_rat(), 1..5)) {
        let c = CycElem::from_coeffs(m, {
            let phi = cyclotomic::euler_phi(m) as usize;
            let mut cs = cs;
            cs.truncate(phi);
            cs
        });
        let lhs = &(&a + &b) * &c;
        let rhs = &(&a * &c) + &(&b * &c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn galois_action_is_a_ring_map((m, a, b) in cyc_pair()) {
        for t in cyclotomic::units_mod(m) {
            let s = GaloisAuto::new(m, t).unwrap();
            prop_assert_eq!(s.apply(&(&a + &b)), &s.apply(&a) + &s.apply(&b));
            prop_assert_eq!(s.apply(&(&a * &b)), &s.apply(&a) * &s.apply(&b));
            prop_assert_eq!(s.apply(&CycElem::one(m)), CycElem::one(m));
        }
    }

    #[test]
    fn abs_square_commutes_with_galois((m, a) in cyc_elem()) {
        prop_assert_eq!(a.abs_square(), &a * &a.conj());
        for t in cyclotomic::units_mod(m) {
            let s = GaloisAuto::new(m, t).unwrap();
            prop_assert_eq!(s.apply(&a.abs_square()), s.apply(&a).abs_square());
        }
    }

    #[test]
    fn inverse_round_trips((m, a) in cyc_elem()) {
        if !a.is_zero() {
            let inv = a.inverse().unwrap();
            prop_assert_eq!(&a * &inv, CycElem::one(m));
        } else {
            prop_assert!(a.inverse().is_err());
        }
    }

    #[test]
    fn minimal_polynomial_annihilates((m, a) in cyc_elem()) {
        let k = SubfieldSpec::rationals(m);
        let p = cyclotomic::minimal_polynomial(&a, &k);
        prop_assert!(p.eval(&a).is_zero());
        prop_assert_eq!(p.degree().unwrap() as u64, cyclotomic::degree(&a, &k));
        prop_assert_eq!(k.order() % cyclotomic::degree(&a, &k), 0);
    }

    #[test]
    fn stabilizer_respects_conjugation((m, a) in cyc_elem(), seed in any::<u64>()) {
        // Stab(sigma(a)) = Stab(a) in an abelian Galois group.
        let k = SubfieldSpec::rationals(m);
        let units = cyclotomic::units_mod(m);
        let t = units[(seed % units.len() as u64) as usize];
        let s = GaloisAuto::new(m, t).unwrap();
        prop_assert_eq!(
            cyclotomic::stabilizer(&a, &k),
            cyclotomic::stabilizer(&s.apply(&a), &k)
        );
    }

    #[test]
    fn division_round_trips(a in rat_poly(7), b in rat_poly(5)) {
        if !b.is_zero() {
            let (q, r) = a.divrem(&b).unwrap();
            prop_assert_eq!(q.mul(&b).add(&r), a.clone());
            if let Some(rd) = r.degree() {
                prop_assert!(rd < b.degree().unwrap());
            }
        }
    }

    #[test]
    fn bezout_identity_holds(a in rat_poly(6), b in rat_poly(6)) {
        let (g, u, v) = a.xgcd(&b);
        prop_assert_eq!(u.mul(&a).add(&v.mul(&b)), g.clone());
        if !g.is_zero() {
            prop_assert!(a.divrem(&g).unwrap().1.is_zero());
            prop_assert!(b.divrem(&g).unwrap().1.is_zero());
        }
    }

    #[test]
    fn inference_reproduces_random_recurrences(
        order in 1usize..=3,
        cs in vec((-3i64..=3).prop_map(|n| rat(n, 1)), 3),
        init in vec((-2i64..=2).prop_map(|n| rat(n, 1)), 3),
    ) {
        let rec = lrs::Recurrence::new(
            cs[..order].to_vec(),
            init[..order].to_vec(),
        ).unwrap();
        let terms = rec.terms(12);
        let inferred = lrs::berlekamp_massey(&terms).unwrap();
        prop_assert!(inferred.order() <= order);
        prop_assert_eq!(inferred.terms(12), terms);
    }

    #[test]
    fn empirical_zero_sets_describe_the_window(
        raw in vec(-1i64..=1, 8..=20),
    ) {
        let terms: Vec<BigRational> = raw.iter().map(|&n| rat(n, 1)).collect();
        if let Ok(d) = lrs::zero_set_empirical(&terms) {
            for (n, t) in terms.iter().enumerate() {
                prop_assert_eq!(
                    d.contains(n as u64),
                    *t == rat(0, 1),
                    "mismatch at {}", n
                );
            }
        }
    }

    #[test]
    fn detected_certificates_verify_and_are_minimal(
        prefix in vec(0u8..3, 0..4),
        block in vec(0u8..3, 1..5),
        reps in 2usize..5,
    ) {
        let mut seq = prefix.clone();
        for _ in 0..reps {
            seq.extend_from_slice(&block);
        }
        if seq.len() < 6 {
            return Ok(());
        }
        let cert = periodicity::detect_virtual_period(&seq).unwrap();
        prop_assert!(cert.verify(&seq));
        let fits = |n: usize, r: usize| {
            r >= 1
                && seq.len() >= n + 2 * r
                && (n..seq.len() - r).all(|i| seq[i] == seq[i + r])
        };
        // No fit with a strictly smaller pre-period, and none with the
        // same pre-period but a smaller period.
        for n in 0..cert.n as usize {
            for r in 1..=(seq.len() - n) / 2 {
                prop_assert!(!fits(n, r), "smaller pre-period {} fits with r={}", n, r);
            }
        }
        for r in 1..cert.r as usize {
            prop_assert!(!fits(cert.n as usize, r), "smaller period {} fits", r);
        }
    }

    #[test]
    fn prime_field_sums_match_direct_evaluation(
        p in prop::sample::select(vec![3u64, 5, 7]),
        exps in btree_set(0u64..5, 1..4),
        coeff_seed in any::<u64>(),
    ) {
        // Over F_p itself the trace is the identity, so S_1(f) is a bare
        // character sum that five lines of independent code can produce.
        let terms: Vec<(u64, Vec<u64>)> = exps
            .iter()
            .enumerate()
            .map(|(i, &e)| (1 + (coeff_seed >> (8 * i)) % (p - 1), vec![e]))
            .collect();
        let f = MultiPoly::new(1, terms.clone()).unwrap();
        let s = expsum::exp_sum(&f, p, 1, 1_000_000).unwrap();
        let mut direct = CycElem::zero(p);
        for x in 0..p {
            let mut e = 0u64;
            for (c, v) in &terms {
                let mut pw = 1u64;
                for _ in 0..v[0] {
                    pw = pw * x % p;
                }
                e = (e + c * pw) % p;
            }
            direct = &direct + &CycElem::zeta_pow(p, e);
        }
        prop_assert_eq!(s, direct);
    }

    #[test]
    fn galois_permutes_sum_values(
        p in prop::sample::select(vec![3u64, 5]),
        k in 1usize..=3,
        d in 1u64..=4,
    ) {
        // sigma_t(S_k) is itself a sum twisted by t, hence has the same
        // degree; the whole Galois orbit of S_k lies in its conjugates.
        let f = MultiPoly::new(1, vec![(1, vec![d])]).unwrap();
        let s = expsum::exp_sum(&f, p, k, 1_000_000).unwrap();
        let q = SubfieldSpec::rationals(p);
        let deg = cyclotomic::degree(&s, &q);
        for t in cyclotomic::units_mod(p) {
            let image = GaloisAuto::new(p, t).unwrap().apply(&s);
            prop_assert_eq!(cyclotomic::degree(&image, &q), deg);
        }
    }
}
