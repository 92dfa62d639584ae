//! Ideals `scale * (Z a + Z (b + w))` and their reduction theory.
//!
//! Internally a primitive ideal is also written `[a, (-B + sqrt(D)) / 2]`
//! with `B = -(2b + tr w)`; this is the shape in which composition and the
//! reduction operator are stated.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{FieldError, QuadNumber, QuadraticField};
use crate::arith;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadIdeal {
    /// Least positive rational integer of the primitive part.
    pub a: i64,
    /// `0 <= b < a` with `a | N(b + w)`.
    pub b: i64,
    pub scale: Ratio<i64>,
}

/// How a rational prime decomposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdealKind {
    Split,
    Inert,
    Ramified,
}

/// A reduced primitive ideal `[a, (-bb + sqrt(D)) / 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedIdeal {
    pub a: i64,
    pub bb: i64,
}

impl QuadraticField {
    fn norm_b_plus_omega(&self, b: i128) -> i128 {
        b * b + self.omega_trace() as i128 * b + self.omega_norm() as i128
    }

    pub fn prime_kind(&self, q: u64) -> IdealKind {
        match self.splitting(q) {
            1 => IdealKind::Split,
            0 => IdealKind::Ramified,
            _ => IdealKind::Inert,
        }
    }

    /// The prime ideal `(q, b + w)` above a split odd prime.
    ///
    /// The residue map of this ideal sends sqrt(d) to `-r`, where `r` is the
    /// smaller square root of d mod q; for w = sqrt(d) that means `b = r`.
    pub fn prime_ideal_above(&self, q: u64) -> Result<QuadIdeal, FieldError> {
        if q < 3 || q % 2 == 0 || !arith::is_prime(q) {
            return Err(FieldError::BadPrime(q));
        }
        match self.prime_kind(q) {
            IdealKind::Inert => return Err(FieldError::Inert { d: self.d(), q }),
            IdealKind::Ramified => return Err(FieldError::Ramified { d: self.d(), q }),
            IdealKind::Split => {}
        }
        let r = arith::sqrt_mod(self.d(), q).expect("split prime has a square root");
        Ok(self.prime_ideal_with_root(q, r))
    }

    /// Prime above `q` with sqrt(d) = -r in its residue field.
    pub fn prime_ideal_with_root(&self, q: u64, r: u64) -> QuadIdeal {
        let b = match self.omega() {
            super::Omega::SqrtD => r % q,
            // b + w = b + (1 + sqrt d)/2 = 0  =>  b = (r - 1)/2
            super::Omega::HalfOnePlusSqrtD => arith::mul_mod((r + q - 1) % q, (q + 1) / 2, q),
        };
        QuadIdeal::new(self, q as i64, b as i64).expect("root gives an ideal")
    }

    /// Some prime ideal of norm `l` above a small split or ramified prime.
    pub(crate) fn small_prime_ideal(&self, l: u64) -> Option<QuadIdeal> {
        if self.prime_kind(l) == IdealKind::Inert {
            return None;
        }
        (0..l as i64)
            .find(|&b| self.norm_b_plus_omega(b as i128).rem_euclid(l as i128) == 0)
            .map(|b| QuadIdeal::new(self, l as i64, b).expect("root gives an ideal"))
    }
}

impl QuadIdeal {
    pub fn new(field: &QuadraticField, a: i64, b: i64) -> Result<Self, FieldError> {
        if a < 1 || field.norm_b_plus_omega(b as i128).rem_euclid(a as i128) != 0 {
            return Err(FieldError::NotAnIdeal { a, b });
        }
        Ok(Self { a, b: b.rem_euclid(a), scale: Ratio::one() })
    }

    pub fn unit() -> Self {
        Self { a: 1, b: 0, scale: Ratio::one() }
    }

    pub fn with_scale(mut self, scale: Ratio<i64>) -> Self {
        self.scale *= scale;
        self
    }

    pub fn primitive_part(&self) -> Self {
        Self { a: self.a, b: self.b, scale: Ratio::one() }
    }

    pub fn is_integral(&self) -> bool {
        self.scale.is_integer()
    }

    pub fn norm(&self) -> Ratio<i64> {
        self.scale * self.scale * self.a
    }

    /// Z-basis as elements: `scale * a` and `scale * (b + w)`.
    pub fn basis(&self) -> [QuadNumber; 2] {
        let n = BigInt::from(*self.scale.numer());
        let d = BigInt::from(*self.scale.denom());
        [
            QuadNumber::new(BigInt::from(self.a) * &n, BigInt::zero(), d.clone()),
            QuadNumber::new(BigInt::from(self.b) * &n, n, d),
        ]
    }

    /// The ideal generated (as an O_L-module) by the given integral elements.
    pub fn from_generators(field: &QuadraticField, gens: &[QuadNumber]) -> Result<Self, FieldError> {
        if gens.iter().any(|g| !g.is_integral()) {
            return Err(FieldError::NotIntegral);
        }
        let omega = field.omega_elt();
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for g in gens {
            rows.push(vec![g.x.clone(), g.y.clone()]);
            let gw = field.mul(g, &omega);
            rows.push(vec![gw.x, gw.y]);
        }
        // column order (w, 1) so the HNF reads [[c, c*b], [0, c*a]]
        let swapped: Vec<Vec<BigInt>> = rows.into_iter().map(|r| vec![r[1].clone(), r[0].clone()]).collect();
        let h = crate::linalg::hnf(&swapped, 2).ok_or(FieldError::NotIntegral)?;
        let c = h[0][0].to_i64().ok_or(FieldError::NotIntegral)?;
        let cb = h[0][1].to_i64().ok_or(FieldError::NotIntegral)?;
        let ca = h[1][1].to_i64().ok_or(FieldError::NotIntegral)?;
        debug_assert!(cb % c == 0 && ca % c == 0);
        let ideal = QuadIdeal::new(field, ca / c, cb / c)?;
        Ok(ideal.with_scale(Ratio::from_integer(c)))
    }

    pub fn principal(field: &QuadraticField, alpha: &QuadNumber) -> Result<Self, FieldError> {
        let den = alpha.den.to_i64().ok_or(FieldError::NotIntegral)?;
        let numer = QuadNumber::new(alpha.x.clone(), alpha.y.clone(), BigInt::one());
        Ok(Self::from_generators(field, &[numer])?.with_scale(Ratio::new(1, den)))
    }

    /// `(a, B)` with the ideal equal to `[a, (-B + sqrt D)/2]`.
    pub(crate) fn to_form(&self, field: &QuadraticField) -> (i64, i64) {
        (self.a, -(2 * self.b + field.omega_trace()))
    }

    pub(crate) fn from_form(field: &QuadraticField, a: i64, bb: i64) -> Self {
        let b = (-bb - field.omega_trace()).div_euclid(2);
        Self { a, b: b.rem_euclid(a), scale: Ratio::one() }
    }

    pub fn conj(&self, field: &QuadraticField) -> Self {
        // conj(b + w) = (b + t) - w; the lattice is Z a + Z (-(b + t) + w)
        let t = field.omega_trace();
        Self { a: self.a, b: (-(self.b + t)).rem_euclid(self.a), scale: self.scale }
    }

    pub fn inverse(&self, field: &QuadraticField) -> Self {
        let c = self.conj(field);
        let n = self.norm();
        Self { scale: c.scale / n, ..c }
    }

    /// Exact product by form composition.
    pub fn mul(&self, field: &QuadraticField, other: &Self) -> Self {
        let (a1, b1) = self.to_form(field);
        let (a2, b2) = other.to_form(field);
        let (g, a3, b3) = compose(field.disc(), (a1, b1), (a2, b2));
        let mut out = Self::from_form(field, a3, b3);
        out.scale = self.scale * other.scale * g;
        out
    }

    pub fn pow(&self, field: &QuadraticField, mut k: u64) -> Self {
        let mut acc = Self::unit();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(field, &base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(field, &base);
            }
        }
        acc
    }

    /// Membership test for an element of L.
    pub fn contains(&self, field: &QuadraticField, x: &QuadNumber) -> bool {
        // x / scale = u a + v (b + w) with u, v integers
        let s = self.scale;
        let xs = x.scale(&BigInt::from(*s.denom()));
        let den = &xs.den * BigInt::from(*s.numer());
        let _ = field;
        let (v, rv) = xs.y.div_rem(&den);
        if !rv.is_zero() {
            return false;
        }
        let rest = &xs.x - &v * BigInt::from(self.b) * &den;
        let (_, ru) = rest.div_rem(&(&den * BigInt::from(self.a)));
        ru.is_zero()
    }
}

/// Composition of primitive ideals `[a1, (-b1 + sqrt D)/2] * [a2, ...]`.
///
/// Returns `(g, a3, b3)` with the product equal to `g * [a3, (-b3 + sqrt D)/2]`.
pub(crate) fn compose(disc: i64, f1: (i64, i64), f2: (i64, i64)) -> (i64, i64, i64) {
    let (mut f1, mut f2) = (f1, f2);
    if f1.0 > f2.0 {
        std::mem::swap(&mut f1, &mut f2);
    }
    let (a1, b1) = (f1.0 as i128, f1.1 as i128);
    let (a2, b2) = (f2.0 as i128, f2.1 as i128);
    let disc = disc as i128;
    let c2 = (b2 * b2 - disc) / (4 * a2);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (y1, d) = if a2 % a1 == 0 {
        (0, a1)
    } else {
        let e = a2.extended_gcd(&a1);
        (e.x, e.gcd)
    };
    let (x2, y2, d1) = if s % d == 0 {
        (0, -1, d)
    } else {
        let e = s.extended_gcd(&d);
        (e.x, -e.y, e.gcd)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let b3 = normalize_b(b3, a3);
    (to_i64(d1), to_i64(a3), to_i64(b3))
}

fn to_i64(x: i128) -> i64 {
    x.try_into().expect("ideal coefficient exceeds the supported range")
}

/// Representative of `b (mod 2a)` in `(-a, a]`.
fn normalize_b(b: i128, a: i128) -> i128 {
    let m = 2 * a;
    let mut r = b.rem_euclid(m);
    if r > a {
        r -= m;
    }
    r
}

pub(crate) fn is_reduced(s: i64, a: i64, bb: i64) -> bool {
    a >= 1 && bb >= 1 && bb <= s && bb >= s - 2 * a + 1 && bb + s >= 2 * a
}

/// One step of the reduction operator.
///
/// For `I = [a, beta]`, `beta = (-B + sqrt D)/2`, returns `J = [|c|, ...]`
/// with `c = N(beta)/a`, and `I = (beta / c) J`.
fn rho(disc: i64, s: i64, a: i64, bb: i64) -> (i64, i64, i64) {
    let c = ((bb as i128 * bb as i128 - disc as i128) / (4 * a as i128)) as i64;
    let ac = c.abs();
    let target = -(bb as i128);
    let m = 2 * ac as i128;
    let nb = if ac <= s {
        // B' in [s - 2|c| + 1, s]
        let lo = (s - 2 * ac + 1) as i128;
        lo + (target - lo).rem_euclid(m)
    } else {
        normalize_b(target, ac as i128)
    };
    (ac, nb as i64, c)
}

/// Reduction with generator tracking: `(u, v, w)` stands for `(u + v sqrt D)/w`.
struct Tracker {
    u: BigInt,
    v: BigInt,
    w: BigInt,
}

impl Tracker {
    fn one() -> Self {
        Self { u: BigInt::one(), v: BigInt::zero(), w: BigInt::one() }
    }

    /// Multiply by `(-B + sqrt D) / (2c)`.
    fn step(&mut self, disc: i64, bb: i64, c: i64) {
        let (p, q) = (BigInt::from(-bb), BigInt::one());
        let d = BigInt::from(disc);
        let u = &self.u * &p + &self.v * &q * &d;
        let v = &self.u * &q + &self.v * &p;
        let w = &self.w * BigInt::from(2 * c);
        let g = u.gcd(&v).gcd(&w);
        self.u = u / &g;
        self.v = v / &g;
        self.w = w / &g;
    }
}

impl ReducedIdeal {
    pub fn to_ideal(&self, field: &QuadraticField) -> QuadIdeal {
        QuadIdeal::from_form(field, self.a, self.bb)
    }

    pub fn is_unit(&self) -> bool {
        self.a == 1
    }

    /// The next reduced ideal in the cycle.
    pub fn next(&self, field: &QuadraticField) -> ReducedIdeal {
        let (a, bb, _) = rho(field.disc(), field.isqrt_disc(), self.a, self.bb);
        ReducedIdeal { a, bb }
    }

    /// The whole cycle of reduced ideals starting here.
    pub fn cycle(&self, field: &QuadraticField) -> Vec<ReducedIdeal> {
        let mut out = vec![*self];
        let mut cur = self.next(field);
        while cur != *self {
            out.push(cur);
            cur = cur.next(field);
        }
        out
    }
}

impl QuadraticField {
    /// A reduced ideal equivalent to the primitive part of `ideal`.
    pub fn reduce(&self, ideal: &QuadIdeal) -> ReducedIdeal {
        let s = self.isqrt_disc();
        let (mut a, mut bb) = ideal.to_form(self);
        while !is_reduced(s, a, bb) {
            let (na, nb, _) = rho(self.disc(), s, a, bb);
            a = na;
            bb = nb;
        }
        ReducedIdeal { a, bb }
    }

    /// Generator of `ideal` if it is principal.
    ///
    /// Walks from the ideal to its reduced cycle and around it, accumulating
    /// the relative generators; principal exactly when the unit ideal shows
    /// up in the cycle.
    pub fn principal_generator(&self, ideal: &QuadIdeal) -> Option<QuadNumber> {
        let disc = self.disc();
        let s = self.isqrt_disc();
        let (mut a, mut bb) = ideal.to_form(self);
        let mut t = Tracker::one();
        while !is_reduced(s, a, bb) {
            let (na, nb, c) = rho(disc, s, a, bb);
            t.step(disc, bb, c);
            a = na;
            bb = nb;
        }
        let start = (a, bb);
        while a != 1 {
            let (na, nb, c) = rho(disc, s, a, bb);
            t.step(disc, bb, c);
            a = na;
            bb = nb;
            if (a, bb) == start {
                return None;
            }
        }
        let gamma = self.from_sqrt_disc(t.u, t.v, t.w);
        let scale = ideal.scale;
        let gen = QuadNumber::new(
            gamma.x * BigInt::from(*scale.numer()),
            gamma.y * BigInt::from(*scale.numer()),
            gamma.den * BigInt::from(*scale.denom()),
        );
        debug_assert_eq!(
            self.norm(&gen).abs(),
            num_rational::BigRational::new((*ideal.norm().numer()).into(), (*ideal.norm().denom()).into())
        );
        Some(gen)
    }

    pub fn is_principal(&self, ideal: &QuadIdeal) -> bool {
        let start = self.reduce(ideal);
        let mut cur = start;
        loop {
            if cur.is_unit() {
                return true;
            }
            cur = cur.next(self);
            if cur == start {
                return false;
            }
        }
    }

    /// Canonical reduced representative of the class: the least ideal of the cycle.
    pub fn canonical(&self, ideal: &QuadIdeal) -> ReducedIdeal {
        let r = self.reduce(ideal);
        r.cycle(self).into_iter().min().expect("cycles are nonempty")
    }
}
