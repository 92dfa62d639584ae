//! Fixed-point real arithmetic: values are integers scaled by `2^bits`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn arctan_inv(n: i64, bits: u32) -> BigInt {
    // arctan(1/n) = sum (-1)^k / ((2k+1) n^{2k+1})
    let one = BigInt::one() << bits;
    let n2 = BigInt::from(n * n);
    let mut term = &one / BigInt::from(n);
    let mut sum = BigInt::zero();
    let mut k = 0i64;
    while !term.is_zero() {
        let t = &term / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        term /= &n2;
        k += 1;
    }
    sum
}

/// `pi * 2^bits` by Machin's formula, with guard bits.
pub fn pi(bits: u32) -> BigInt {
    let g = bits + 16;
    let v = arctan_inv(5, g) * 16 - arctan_inv(239, g) * 4;
    v >> 16
}

/// `cos(x)` for a fixed-point `x` with `|x| <= 4`.
pub fn cos(x: &BigInt, bits: u32) -> BigInt {
    let g = bits + 16;
    let x = x << 16;
    let one = BigInt::one() << g;
    let x2 = (&x * &x) >> g;
    let mut term = one.clone();
    let mut sum = one;
    let mut k = 1i64;
    loop {
        let t: BigInt = (&term * &x2) >> g;
        term = -t / BigInt::from((2 * k - 1) * (2 * k));
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    sum >> 16
}

/// `sum_{h in set} cos(2 pi h / q)` in fixed point.
pub fn period_value(set: &[u64], q: u64, bits: u32) -> BigInt {
    let p = pi(bits + 8);
    set.iter()
        .map(|&h| {
            // reduce the angle to [0, pi] using cos(2 pi - t) = cos t
            let h = if 2 * h > q { q - h } else { h };
            let angle = (&p * BigInt::from(2 * h)).div_floor(&BigInt::from(q));
            cos(&angle, bits + 8) >> 8
        })
        .fold(BigInt::zero(), |a, b| a + b)
}

/// Evaluate an integer polynomial at a fixed-point value.
pub fn eval(coeffs: &[i64], x: &BigInt, bits: u32) -> BigInt {
    coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, &c| ((acc * x) >> bits) + (BigInt::from(c) << bits))
}

/// `|v| < 2^-k` for fixed-point `v`?
pub fn below_pow2(v: &BigInt, bits: u32, k: u32) -> bool {
    v.abs() < BigInt::one() << (bits - k)
}
