use capitula::arith;
use capitula::cyclotomic::{self, period_cosets_with_root, period_polynomial, verify_subfield};
use capitula::poly;
use capitula_oracles::{fixed, periods};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

fn coeffs_i64(f: &[BigInt]) -> Vec<i64> {
    f.iter().map(|c| c.to_i64().unwrap()).collect()
}

fn cases(bound: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for q in arith::primes_in_range(3, bound) {
        for e in [3u64, 5, 7, 9] {
            if (q - 1) % e == 0 {
                out.push((q, e));
            }
        }
    }
    out
}

#[test]
fn period_polynomials_match_direct_expansion() {
    for (q, e) in cases(200) {
        let f = period_polynomial(q, e).unwrap();
        assert_eq!(coeffs_i64(&f.period_poly), periods::period_polynomial(q, e), "q={q} e={e}");
    }
}

#[test]
fn cosets_match_brute_force() {
    for (q, e) in cases(120) {
        let c = cyclotomic::period_cosets(q, e).unwrap();
        let mut ours: Vec<Vec<u64>> = c
            .cosets
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.sort_unstable();
                s
            })
            .collect();
        ours.sort();
        let mut theirs = periods::cosets(q, e);
        theirs.sort();
        assert_eq!(ours, theirs, "q={q} e={e}");
    }
}

#[test]
fn periods_are_roots_to_64_bits() {
    let bits = 200;
    for (q, e) in cases(200) {
        let f = period_polynomial(q, e).unwrap();
        let c = coeffs_i64(&f.period_poly);
        let weight: i64 = c.iter().map(|x| x.abs()).sum();
        for coset in &f.cosets.cosets {
            let eta = fixed::period_value(coset, q, bits);
            let v = fixed::eval(&c, &eta, bits);
            // |f(eta)| < 2^-64 * sum |c_i|
            let bound = BigInt::from(weight) << (bits - 64);
            assert!(num_traits::Signed::abs(&v) < bound, "q={q} e={e}");
        }
    }
}

#[test]
fn cubic_discriminants_agree_with_closed_form() {
    for q in arith::primes_in_range(7, 200).into_iter().filter(|q| q % 3 == 1) {
        let f = period_polynomial(q, 3).unwrap();
        let c = coeffs_i64(&f.period_poly);
        let closed = periods::cubic_discriminant(c[2], c[1], c[0]);
        assert_eq!(poly::discriminant(&f.period_poly), BigInt::from(closed), "q={q}");
        assert_eq!(poly::count_real_roots(&f.period_poly), 3, "q={q}");
    }
}

#[test]
fn the_polynomial_does_not_depend_on_the_primitive_root() {
    for (q, e) in cases(150) {
        let base = period_polynomial(q, e).unwrap().period_poly;
        for g in 2..q {
            if arith::mult_order(g as i64, q).unwrap() != q - 1 {
                continue;
            }
            let c = period_cosets_with_root(q, e, g).unwrap();
            assert_eq!(cyclotomic::build(c).unwrap().period_poly, base, "q={q} e={e} g={g}");
        }
    }
}

#[test]
fn galois_action_permutes_roots() {
    for (q, e) in cases(120) {
        let f = period_polynomial(q, e).unwrap();
        let eta = f.period(0);
        let mut seen = Vec::new();
        for k in 0..e as usize {
            let s = f.galois(&eta, k);
            // every conjugate is again a single period with trace -1
            assert_eq!(s.iter().filter(|x| x.is_one()).count(), 1);
            assert!(s.iter().all(|x| x.is_zero() || x.is_one()));
            assert_eq!(f.trace(&s), BigInt::from(-1));
            seen.push(s);
        }
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), e as usize);
        // sigma is a ring map
        let a = f.mul(&f.period(0), &f.period(1 % e as usize));
        for k in 0..e as usize {
            let lhs = f.galois(&a, k);
            let rhs = f.mul(&f.galois(&f.period(0), k), &f.galois(&f.period(1 % e as usize), k));
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn subfield_disc_is_a_power_of_the_conductor() {
    for (q, e) in cases(200) {
        let f = period_polynomial(q, e).unwrap();
        match verify_subfield(&f) {
            Ok(r) => {
                assert_eq!(r.field_disc, BigInt::from(q).pow(e as u32 - 1));
                assert_eq!(r.real_roots, e as usize);
            }
            Err(err) => panic!("q={q} e={e}: {err}"),
        }
    }
}

#[test]
fn periods_numerically_match_coset_sums() {
    let f = period_polynomial(31, 3).unwrap();
    let vals = f.period_values();
    for (i, v) in vals.iter().enumerate() {
        let exact = fixed::period_value(&f.cosets.cosets[i], 31, 80);
        let approx = exact.to_f64().unwrap() / 2f64.powi(80);
        assert!((v - approx).abs() < 1e-12);
    }
}
