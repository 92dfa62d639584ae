//! Real quadratic fields: elements, the fundamental unit, ideals in
//! Hermite form, reduction cycles, and the class group.

mod classgroup;
mod ideal;

pub use classgroup::{ClassCoords, ClassGroup, SylowInfo};
pub use ideal::{IdealKind, QuadIdeal, ReducedIdeal};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;

/// Largest |disc| the class-group engine accepts.
pub const MAX_DISC: i64 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("d = {0} is below 2; only real quadratic fields are supported")]
    TooSmall(i64),
    #[error("d = {0} is not squarefree")]
    NotSquarefree(i64),
    #[error("discriminant {0} exceeds the supported bound {MAX_DISC}")]
    DiscTooLarge(i64),
    #[error("q = {q} is inert in Q(sqrt {d}): the prime is not totally split")]
    Inert { d: i64, q: u64 },
    #[error("q = {q} ramifies in Q(sqrt {d}): the prime is not totally split")]
    Ramified { d: i64, q: u64 },
    #[error("q = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("({a}, {b} + w) is not an ideal: N(b + w) is not divisible by a")]
    NotAnIdeal { a: i64, b: i64 },
    #[error("ideal is not integral")]
    NotIntegral,
}

/// Which generator of the maximal order is used: `O_L = Z[w]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Omega {
    /// w = sqrt(d), for d = 2, 3 (mod 4)
    SqrtD,
    /// w = (1 + sqrt(d)) / 2, for d = 1 (mod 4)
    HalfOnePlusSqrtD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticField {
    d: i64,
    disc: i64,
    omega: Omega,
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<Self, FieldError> {
        if d < 2 {
            return Err(FieldError::TooSmall(d));
        }
        if !arith::is_squarefree(d as u64) {
            return Err(FieldError::NotSquarefree(d));
        }
        let (disc, omega) = if d % 4 == 1 { (d, Omega::HalfOnePlusSqrtD) } else { (4 * d, Omega::SqrtD) };
        Ok(Self { d, disc, omega })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn omega(&self) -> Omega {
        self.omega
    }

    /// Trace of w.
    pub fn omega_trace(&self) -> i64 {
        match self.omega {
            Omega::SqrtD => 0,
            Omega::HalfOnePlusSqrtD => 1,
        }
    }

    /// Norm of w; w^2 = tr(w) w - N(w).
    pub fn omega_norm(&self) -> i64 {
        match self.omega {
            Omega::SqrtD => -self.d,
            Omega::HalfOnePlusSqrtD => (1 - self.d) / 4,
        }
    }

    /// floor(sqrt(disc)); disc is never a square.
    pub fn isqrt_disc(&self) -> i64 {
        num_integer::sqrt(self.disc)
    }

    pub fn sqrt_d(&self) -> f64 {
        (self.d as f64).sqrt()
    }

    /// Real value of w under the embedding sending sqrt(d) to +sqrt(d).
    pub fn omega_real(&self, sign: f64) -> f64 {
        match self.omega {
            Omega::SqrtD => sign * self.sqrt_d(),
            Omega::HalfOnePlusSqrtD => (1.0 + sign * self.sqrt_d()) / 2.0,
        }
    }

    /// Splitting type of a rational prime: the Kronecker symbol (disc/q).
    pub fn splitting(&self, q: u64) -> i32 {
        arith::kronecker(self.disc, q as i64)
    }

    /// Minkowski bound sqrt(disc)/2, rounded down.
    pub fn minkowski_bound(&self) -> u64 {
        (num_integer::sqrt(self.disc) / 2) as u64
    }

    pub fn one(&self) -> QuadNumber {
        QuadNumber::integral(1, 0)
    }

    pub fn omega_elt(&self) -> QuadNumber {
        QuadNumber::integral(0, 1)
    }

    /// sqrt(d) as an element.
    pub fn sqrt_d_elt(&self) -> QuadNumber {
        match self.omega {
            Omega::SqrtD => QuadNumber::integral(0, 1),
            Omega::HalfOnePlusSqrtD => QuadNumber::integral(-1, 2),
        }
    }

    pub fn mul(&self, a: &QuadNumber, b: &QuadNumber) -> QuadNumber {
        // (x1 + y1 w)(x2 + y2 w) with w^2 = t w - n
        let t = BigInt::from(self.omega_trace());
        let n = BigInt::from(self.omega_norm());
        let yy = &a.y * &b.y;
        let x = &a.x * &b.x - &n * &yy;
        let y = &a.x * &b.y + &a.y * &b.x + &t * &yy;
        QuadNumber::new(x, y, &a.den * &b.den)
    }

    pub fn conj(&self, a: &QuadNumber) -> QuadNumber {
        // conj(w) = t - w
        let t = BigInt::from(self.omega_trace());
        QuadNumber::new(&a.x + &t * &a.y, -&a.y, a.den.clone())
    }

    pub fn norm(&self, a: &QuadNumber) -> BigRational {
        let t = BigInt::from(self.omega_trace());
        let n = BigInt::from(self.omega_norm());
        let num = &a.x * &a.x + &t * &a.x * &a.y + &n * &a.y * &a.y;
        BigRational::new(num, &a.den * &a.den)
    }

    pub fn trace(&self, a: &QuadNumber) -> BigRational {
        let t = BigInt::from(self.omega_trace());
        BigRational::new(BigInt::from(2) * &a.x + t * &a.y, a.den.clone())
    }

    pub fn pow(&self, a: &QuadNumber, mut k: u64) -> QuadNumber {
        let mut acc = self.one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Element `(u + v sqrt(disc)) / w` rewritten in the w-basis.
    pub(crate) fn from_sqrt_disc(&self, u: BigInt, v: BigInt, w: BigInt) -> QuadNumber {
        match self.omega {
            // sqrt(4d) = 2w
            Omega::SqrtD => QuadNumber::new(u, BigInt::from(2) * v, w),
            // sqrt(d) = 2w - 1
            Omega::HalfOnePlusSqrtD => QuadNumber::new(&u - &v, BigInt::from(2) * v, w),
        }
    }

    /// Real image under the embedding sqrt(d) -> sign * sqrt(d).
    pub fn embed(&self, a: &QuadNumber, sign: f64) -> f64 {
        let x = a.x.to_f64().unwrap_or(f64::NAN);
        let y = a.y.to_f64().unwrap_or(f64::NAN);
        (x + y * self.omega_real(sign)) / a.den.to_f64().unwrap_or(f64::NAN)
    }

    /// Reduce an integral element modulo the prime above `q` on which
    /// sqrt(d) takes the value `sqrt_d_res`.
    pub fn residue(&self, a: &QuadNumber, q: u64, sqrt_d_res: u64) -> Option<u64> {
        if !a.is_integral() {
            return None;
        }
        let qb = BigInt::from(q);
        let w = match self.omega {
            Omega::SqrtD => sqrt_d_res % q,
            Omega::HalfOnePlusSqrtD => {
                let inv2 = (q + 1) / 2;
                arith::mul_mod(1 + sqrt_d_res, inv2, q)
            }
        };
        let v = (&a.x + &a.y * BigInt::from(w)).mod_floor(&qb);
        v.to_u64()
    }
}

impl fmt::Display for QuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt {})", self.d)
    }
}

/// `(x + y w) / den` with `den > 0` and the triple in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadNumber {
    pub x: BigInt,
    pub y: BigInt,
    pub den: BigInt,
}

impl QuadNumber {
    pub fn new(x: BigInt, y: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let g = x.gcd(&y).gcd(&den);
        let (mut x, mut y, mut den) = (x / &g, y / &g, den / &g);
        if den.is_negative() {
            x = -x;
            y = -y;
            den = -den;
        }
        Self { x, y, den }
    }

    pub fn integral(x: i64, y: i64) -> Self {
        Self { x: x.into(), y: y.into(), den: BigInt::one() }
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn neg(&self) -> Self {
        Self { x: -&self.x, y: -&self.y, den: self.den.clone() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(&self.x * k, &self.y * k, self.den.clone())
    }
}

impl fmt::Display for QuadNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{} + {}w", self.x, self.y)
        } else {
            write!(f, "({} + {}w)/{}", self.x, self.y, self.den)
        }
    }
}

/// The fundamental unit `a + b w > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalUnit {
    pub a: BigInt,
    pub b: BigInt,
    pub norm: i32,
}

impl FundamentalUnit {
    pub fn element(&self) -> QuadNumber {
        QuadNumber { x: self.a.clone(), y: self.b.clone(), den: BigInt::one() }
    }

    /// `(x2, y2)` with the unit equal to `(x2 + y2 sqrt(d)) / 2`.
    pub fn doubled_sqrt_d_coords(&self, field: &QuadraticField) -> (BigInt, BigInt) {
        match field.omega {
            Omega::SqrtD => (BigInt::from(2) * &self.a, BigInt::from(2) * &self.b),
            Omega::HalfOnePlusSqrtD => (BigInt::from(2) * &self.a + &self.b, self.b.clone()),
        }
    }

    pub fn log(&self, field: &QuadraticField) -> f64 {
        // a + b w can overflow f64 for large regulators; go through ln of digits
        let (x2, y2) = self.doubled_sqrt_d_coords(field);
        let bits = x2.bits().max(y2.bits());
        if bits < 900 {
            ((x2.to_f64().unwrap() + y2.to_f64().unwrap() * field.sqrt_d()) / 2.0).ln()
        } else {
            let shift = bits - 60;
            let x = (&x2 >> shift).to_f64().unwrap();
            let y = (&y2 >> shift).to_f64().unwrap();
            (x + y * field.sqrt_d()).ln() + shift as f64 * std::f64::consts::LN_2 - std::f64::consts::LN_2
        }
    }
}

/// Fundamental unit from the continued-fraction expansion of w.
///
/// w = (P0 + sqrt(D)) / Q0 with (P0, Q0) = (0, 2) or (1, 2); the complete
/// quotients (P_k + sqrt(D)) / Q_k are purely periodic from k = 1 on, and at
/// the end of the first period h_{r-1} - k_{r-1} conj(w) is the unit.
pub fn fundamental_unit(field: &QuadraticField) -> FundamentalUnit {
    let disc = field.disc;
    let s = field.isqrt_disc();
    let (mut p, mut q) = match field.omega {
        Omega::SqrtD => (0i64, 2i64),
        Omega::HalfOnePlusSqrtD => (1, 2),
    };
    // convergents h_k / k_k
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    // Q_k returns to Q_0 exactly at the end of each period
    let q0 = q;
    loop {
        let a = Integer::div_floor(&(p + s), &q);
        let h_next = BigInt::from(a) * &h + &h_prev;
        let k_next = BigInt::from(a) * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        p = a * q - p;
        q = (disc - p * p) / q;
        if q == q0 {
            break;
        }
    }
    // h/k is the last convergent of the first period; unit = h - k conj(w)
    let t = field.omega_trace();
    let a = &h - &k * BigInt::from(t);
    let b = k;
    let unit = QuadNumber { x: a.clone(), y: b.clone(), den: BigInt::one() };
    let norm = field.norm(&unit);
    debug_assert!(norm.is_integer() && norm.to_integer().abs().is_one());
    FundamentalUnit { a, b, norm: norm.to_integer().to_i32().expect("unit norm is +-1") }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_examples() {
        assert_eq!(QuadraticField::new(79).unwrap().disc(), 316);
        assert_eq!(QuadraticField::new(5).unwrap().disc(), 5);
        assert_eq!(QuadraticField::new(12), Err(FieldError::NotSquarefree(12)));
        assert_eq!(QuadraticField::new(1), Err(FieldError::TooSmall(1)));
    }

    #[test]
    fn fundamental_unit_examples() {
        let f = QuadraticField::new(2).unwrap();
        let u = fundamental_unit(&f);
        assert_eq!((u.a.clone(), u.b.clone(), u.norm), (1.into(), 1.into(), -1));

        let f = QuadraticField::new(5).unwrap();
        let u = fundamental_unit(&f);
        // (1 + sqrt 5)/2 = 0 + 1 w
        assert_eq!((u.a.clone(), u.b.clone(), u.norm), (0.into(), 1.into(), -1));
        assert_eq!(u.doubled_sqrt_d_coords(&f), (1.into(), 1.into()));

        let f = QuadraticField::new(79).unwrap();
        let u = fundamental_unit(&f);
        assert_eq!((u.a.clone(), u.b.clone(), u.norm), (80.into(), 9.into(), 1));
    }

    #[test]
    fn unit_of_large_regulator() {
        let f = QuadraticField::new(94).unwrap();
        let u = fundamental_unit(&f);
        assert_eq!((u.a, u.b), (2_143_295.into(), 221_064.into()));
    }

    #[test]
    fn arithmetic() {
        let f = QuadraticField::new(13).unwrap();
        let w = f.omega_elt();
        // w^2 = w + 3
        assert_eq!(f.mul(&w, &w), QuadNumber::integral(3, 1));
        assert_eq!(f.norm(&w), BigRational::from_integer((-3).into()));
        let s = f.sqrt_d_elt();
        assert_eq!(f.mul(&s, &s), QuadNumber::integral(13, 0));
        assert_eq!(f.conj(&s), s.neg());
    }

    #[test]
    fn residues() {
        let f = QuadraticField::new(79).unwrap();
        let u = fundamental_unit(&f).element();
        assert_eq!(f.residue(&u, 13, 1), Some(11));
        assert_eq!(f.residue(&u, 13, 12), Some(6));
        let f5 = QuadraticField::new(5).unwrap();
        // sqrt 5 = 2w - 1 maps to the chosen root
        assert_eq!(f5.residue(&f5.sqrt_d_elt(), 11, 4), Some(4));
    }
}
