//! Univariate integer polynomials: discriminants, Sturm real-root counts and
//! an irreducibility test by reduction modulo a prime.
//!
//! Coefficients are stored lowest degree first.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{factor, inv_mod, is_prime, mul_mod};
use crate::linalg;

pub type IntPoly = Vec<BigInt>;

pub fn degree(f: &[BigInt]) -> usize {
    f.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

pub fn derivative(f: &[BigInt]) -> IntPoly {
    f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

pub fn eval(f: &[BigInt], x: &BigInt) -> BigInt {
    f.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn eval_f64(f: &[BigInt], x: f64) -> f64 {
    use num_traits::ToPrimitive;
    f.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
}

/// Resultant via the Sylvester determinant.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let (m, n) = (degree(f), degree(g));
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut r = vec![BigInt::zero(); size];
        for (j, c) in f[..=m].iter().rev().enumerate() {
            r[i + j] = c.clone();
        }
        rows.push(r);
    }
    for i in 0..m {
        let mut r = vec![BigInt::zero(); size];
        for (j, c) in g[..=n].iter().rev().enumerate() {
            r[i + j] = c.clone();
        }
        rows.push(r);
    }
    linalg::determinant(&rows)
}

/// disc(f) = (-1)^{n(n-1)/2} Res(f, f') / lc(f).
pub fn discriminant(f: &[BigInt]) -> BigInt {
    let n = degree(f);
    if n == 0 {
        return BigInt::zero();
    }
    if n == 1 {
        return BigInt::one();
    }
    let r = resultant(f, &derivative(f)) / &f[n];
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = r.last().unwrap().clone();
        if !lead.is_zero() {
            let q = &lead / &b[db];
            let shift = r.len() - 1 - db;
            for (i, c) in b.iter().enumerate() {
                r[shift + i] -= &q * c;
            }
        }
        r.pop();
    }
    while r.len() > 1 && r.last().unwrap().is_zero() {
        r.pop();
    }
    r
}

/// Number of distinct real roots by a Sturm sequence.
pub fn count_real_roots(f: &[BigInt]) -> usize {
    let n = degree(f);
    if n == 0 {
        return 0;
    }
    let to_rat = |p: &[BigInt]| -> Vec<BigRational> { p.iter().map(|c| BigRational::from_integer(c.clone())).collect() };
    let mut seq = vec![to_rat(&f[..=n]), to_rat(&derivative(&f[..=n]))];
    loop {
        let len = seq.len();
        if seq[len - 1].len() == 1 {
            break;
        }
        let r = rat_rem(&seq[len - 2], &seq[len - 1]);
        if r.iter().all(Zero::is_zero) {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    // sign changes at -inf and +inf from leading coefficients and degrees
    let changes = |at_pos: bool| -> usize {
        let signs: Vec<i8> = seq
            .iter()
            .filter_map(|p| {
                let lead = p.last()?;
                if lead.is_zero() {
                    return None;
                }
                let s = if lead.is_positive() { 1 } else { -1 };
                let odd = (p.len() - 1) % 2 == 1;
                Some(if !at_pos && odd { -s } else { s })
            })
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    changes(false) - changes(true)
}

// polynomials over F_l, lowest degree first, no trailing zeros

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn pmul(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, l)) % l;
        }
    }
    trim(out)
}

fn prem(a: &[u64], m: &[u64], l: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let inv = inv_mod(m[dm], l).expect("leading coefficient invertible");
    while r.len() > dm {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let q = mul_mod(lead, inv, l);
            let shift = r.len() - 1 - dm;
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + l - mul_mod(q, c, l)) % l;
            }
        }
        r.pop();
    }
    trim(r)
}

fn pgcd(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = prem(&a, &b, l);
        a = b;
        b = r;
    }
    a
}

fn ppow_mod(base: &[u64], mut e: u64, m: &[u64], l: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = prem(base, m, l);
    while e > 0 {
        if e & 1 == 1 {
            acc = prem(&pmul(&acc, &b, l), m, l);
        }
        b = prem(&pmul(&b, &b, l), m, l);
        e >>= 1;
    }
    acc
}

/// Reduce an integer polynomial modulo the prime `l`.
pub fn reduce_mod(f: &[BigInt], l: u64) -> Vec<u64> {
    let lb = BigInt::from(l);
    trim(
        f.iter()
            .map(|c| {
                let r = ((c % &lb) + &lb) % &lb;
                u64::try_from(r).expect("reduced coefficient fits")
            })
            .collect(),
    )
}

/// Rabin's test: is the monic reduction of `f` irreducible over F_l?
pub fn irreducible_mod(f: &[BigInt], l: u64) -> bool {
    let fl = reduce_mod(f, l);
    let n = degree(f);
    if fl.len() != n + 1 {
        return false;
    }
    if n <= 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // frob(k) = x^{l^k} mod f
    let frob = |k: usize| -> Vec<u64> {
        let mut y = x.clone();
        for _ in 0..k {
            y = ppow_mod(&y, l, &fl, l);
        }
        y
    };
    let minus_x = |mut y: Vec<u64>| -> Vec<u64> {
        y.resize(y.len().max(2), 0);
        y[1] = (y[1] + l - 1) % l;
        trim(y)
    };
    if !minus_x(frob(n)).is_empty() {
        return false;
    }
    let primes: Vec<u64> = factor(n as u64).into_iter().map(|(r, _)| r).collect();
    primes.into_iter().all(|r| {
        let g = pgcd(&fl, &minus_x(frob(n / r as usize)), l);
        g.len() == 1
    })
}

/// Smallest prime `l <= bound` modulo which `f` is irreducible, certifying
/// irreducibility of the monic integer polynomial `f` over Q.
pub fn irreducibility_witness(f: &[BigInt], bound: u64) -> Option<u64> {
    let lead = &f[degree(f)];
    if !lead.is_one() {
        return None;
    }
    (2..=bound).filter(|&l| is_prime(l)).find(|&l| irreducible_mod(f, l))
}

pub fn from_i64(c: &[i64]) -> IntPoly {
    c.iter().map(|&x| BigInt::from(x)).collect()
}

/// Value of `f` at `x` modulo `l`.
pub fn eval_mod(f: &[BigInt], x: u64, l: u64) -> u64 {
    reduce_mod(f, l).iter().rev().fold(0u64, |acc, &c| (mul_mod(acc, x, l) + c) % l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_discriminants() {
        assert_eq!(discriminant(&from_i64(&[-1, -2, 1, 1])), BigInt::from(49));
        assert_eq!(discriminant(&from_i64(&[1, -4, 1, 1])), BigInt::from(169));
        // x^2 - 2
        assert_eq!(discriminant(&from_i64(&[-2, 0, 1])), BigInt::from(8));
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(count_real_roots(&from_i64(&[-1, -2, 1, 1])), 3);
        assert_eq!(count_real_roots(&from_i64(&[1, 0, 1])), 0);
        assert_eq!(count_real_roots(&from_i64(&[-2, 0, 0, 1])), 1);
        // repeated root counted once
        assert_eq!(count_real_roots(&from_i64(&[1, -2, 1])), 1);
    }

    #[test]
    fn rabin() {
        // x^2 + 1 irreducible mod 3, splits mod 5
        let f = from_i64(&[1, 0, 1]);
        assert!(irreducible_mod(&f, 3));
        assert!(!irreducible_mod(&f, 5));
        // the cubic of conductor 7 stays irreducible mod 2 since 2 is not a cube mod 7
        let g = from_i64(&[-1, -2, 1, 1]);
        assert!(irreducibility_witness(&g, 100).is_some());
        // reducible over Q: (x-1)(x^2+1)
        let h = from_i64(&[-1, 1, -1, 1]);
        assert!(irreducibility_witness(&h, 200).is_none());
    }
}
