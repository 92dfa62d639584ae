//! Integer and modular arithmetic primitives.
//!
//! Everything here works on machine words: moduli stay below 2^63 and all
//! products go through `u128`. Big-integer primality lives in
//! [`is_probable_prime_big`].

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{q} is not congruent to 1 modulo {pn}: the {pn}-th roots of unity are not in F_{q}")]
    NoRootsOfUnity { q: u64, pn: u64 },
    #[error("{a} is divisible by the modulus {q}")]
    NotInvertible { a: i64, q: u64 },
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("degree {0} is not a prime power")]
    NotPrimePower(u64),
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn reduce(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

// Deterministic for every n < 2^64 (Sorenson & Webster).
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn miller_rabin_round(n: u64, d: u64, s: u32, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Primality for machine words. Exact for every input.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    MR_BASES.iter().all(|&a| miller_rabin_round(n, d, s, a))
}

/// Number of random Miller-Rabin rounds used beyond 2^64; each round lets a
/// composite through with probability at most 1/4, so 64 rounds keep the
/// error below 2^-128.
pub const BIG_PRIME_ROUNDS: usize = 64;

/// Strong-probable-prime test for arbitrary size.
///
/// Inputs below 2^64 are routed to [`is_prime`] and are exact. Larger inputs
/// get [`BIG_PRIME_ROUNDS`] Miller-Rabin rounds with bases drawn from a
/// generator seeded by the input, so the answer is reproducible.
pub fn is_probable_prime_big(n: &BigUint) -> bool {
    if let Some(small) = num_traits::ToPrimitive::to_u64(n) {
        return is_prime(small);
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let seed = n.iter_u64_digits().fold(0x9e37_79b9_7f4a_7c15u64, |h, w| {
        h.rotate_left(17) ^ w.wrapping_mul(0xff51_afd7_ed55_8ccd)
    });
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let two = BigUint::from(2u32);
    'rounds: for _ in 0..BIG_PRIME_ROUNDS {
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'rounds;
            }
        }
        return false;
    }
    true
}

/// Kronecker symbol (a/n).
pub fn kronecker(a: i64, n: i64) -> i32 {
    assert!(n != 0, "kronecker symbol needs a nonzero modulus");
    let mut a = a as i128;
    let mut n = n as i128;
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let v = n.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        // (a/2) = 1 for a = ±1 (mod 8), -1 for a = ±3 (mod 8)
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= v;
    }
    // n is now odd and positive: Jacobi symbol.
    a = a.rem_euclid(n);
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Square root of `a` modulo an odd prime `q` by Tonelli-Shanks.
///
/// Returns the smaller of the two roots, so the result lies in `[0, (q-1)/2]`.
pub fn sqrt_mod(a: i64, q: u64) -> Option<u64> {
    debug_assert!(q > 2 && q % 2 == 1);
    let a = reduce(a, q);
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (q - 1) / 2, q) != 1 {
        return None;
    }
    let root = if q % 4 == 3 {
        pow_mod(a, (q + 1) / 4, q)
    } else {
        let s = (q - 1).trailing_zeros();
        let t = (q - 1) >> s;
        let mut z = 2u64;
        while pow_mod(z, (q - 1) / 2, q) != q - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow_mod(z, t, q);
        let mut x = pow_mod(a, (t + 1) / 2, q);
        let mut b = pow_mod(a, t, q);
        while b != 1 {
            let mut i = 0;
            let mut sq = b;
            while sq != 1 {
                sq = mul_mod(sq, sq, q);
                i += 1;
            }
            let mut f = c;
            for _ in 0..(m - i - 1) {
                f = mul_mod(f, f, q);
            }
            x = mul_mod(x, f, q);
            c = mul_mod(f, f, q);
            b = mul_mod(b, c, q);
            m = i;
        }
        x
    };
    Some(root.min(q - root))
}

fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |v| v <= n) {
        r += 1;
    }
    r
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Prime factorisation, ascending. Trial division up to 10^6, then Pollard rho.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.iter_mut().find(|e| e.0 == p) {
        Some(e) => e.1 += 1,
        None => out.push((p, 1)),
    };
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && p * p <= n {
        while n % p == 0 {
            push(p, &mut out);
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push(m, &mut out);
            continue;
        }
        let r = isqrt_u64(m);
        if r * r == m {
            stack.push(r);
            stack.push(r);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort_unstable();
    out
}

/// Exact multiplicative order of `a` modulo the prime `q`.
pub fn mult_order(a: i64, q: u64) -> Result<u64, ArithError> {
    let r = reduce(a, q);
    if r == 0 {
        return Err(ArithError::NotInvertible { a, q });
    }
    Ok(order_dividing(r, q, q - 1, &factor(q - 1)))
}

/// Order of `x` in (Z/q)^x given that it divides `n = prod p^k`.
fn order_dividing(x: u64, q: u64, n: u64, factors: &[(u64, u32)]) -> u64 {
    let mut order = n;
    for &(p, k) in factors {
        for _ in 0..k {
            if pow_mod(x, order / p, q) == 1 {
                order /= p;
            } else {
                break;
            }
        }
    }
    order
}

/// Split a prime power into `(p, n)`.
pub fn prime_power_parts(pn: u64) -> Option<(u64, u32)> {
    match factor(pn).as_slice() {
        [(p, k)] => Some((*p, *k)),
        _ => None,
    }
}

/// The `p^n`-th power residue symbol of `a` at `q`, realised inside F_q^x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSymbol {
    pub base: u64,
    pub modulus: u64,
    pub degree: u64,
    /// `base^((modulus-1)/degree) mod modulus`, a `degree`-th root of unity.
    pub value: u64,
    /// Exact multiplicative order of `value`; divides `degree`.
    pub order: u64,
}

impl ResidueSymbol {
    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.order == self.degree
    }
}

pub fn power_residue_symbol(a: i64, q: u64, pn: u64) -> Result<ResidueSymbol, ArithError> {
    if !is_prime(q) {
        return Err(ArithError::NotPrime(q));
    }
    let (p, n) = prime_power_parts(pn).ok_or(ArithError::NotPrimePower(pn))?;
    if (q - 1) % pn != 0 {
        return Err(ArithError::NoRootsOfUnity { q, pn });
    }
    let base = reduce(a, q);
    if base == 0 {
        return Err(ArithError::NotInvertible { a, q });
    }
    let value = pow_mod(base, (q - 1) / pn, q);
    let order = order_dividing(value, q, pn, &[(p, n)]);
    Ok(ResidueSymbol { base, modulus: q, degree: pn, value, order })
}

/// Least primitive root modulo the prime `q`.
pub fn primitive_root(q: u64) -> u64 {
    if q == 2 {
        return 1;
    }
    let primes: Vec<u64> = factor(q - 1).into_iter().map(|(p, _)| p).collect();
    (2..q)
        .find(|&g| primes.iter().all(|&p| pow_mod(g, (q - 1) / p, q) != 1))
        .expect("every prime has a primitive root")
}

/// `p`-adic valuation of a positive integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    assert!(n > 0 && p > 1);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn is_squarefree(n: u64) -> bool {
    n > 0 && factor(n).iter().all(|&(_, k)| k == 1)
}

/// Primes in `[lo, hi]` in increasing order, by a segmented sieve.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = isqrt_u64(hi);
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
    }
    let mut seg = vec![true; (hi - lo + 1) as usize];
    for &p in &base {
        let start = (p * p).max(lo.div_ceil(p) * p);
        let mut j = start;
        while j <= hi {
            seg[(j - lo) as usize] = false;
            j += p;
        }
    }
    seg.iter()
        .enumerate()
        .filter(|(_, &ok)| ok)
        .map(|(i, _)| lo + i as u64)
        .collect()
}
