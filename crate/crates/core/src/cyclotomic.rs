//! The cyclic degree-`e` subfield `F` of `Q(zeta_q)` through Gaussian periods.
//!
//! For the least primitive root `g` the subgroup `H` of `e`-th powers has the
//! cosets `C_i = g^i H`, and `eta_i = sum_{h in C_i} zeta^h`. Everything is
//! done in the period basis, where multiplication is pure coset
//! combinatorics; the Galois action is the shift `eta_i -> eta_{i+1}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, mul_mod, primitive_root};
use crate::linalg;
use crate::poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("conductor {0} is not prime")]
    NotPrime(u64),
    #[error("degree {e} does not divide {q} - 1")]
    NotDivisor { q: u64, e: u64 },
    #[error("degree {0} is even; only odd degrees are supported")]
    EvenDegree(u64),
    #[error("{0} is not a primitive root")]
    NotPrimitiveRoot(u64),
    #[error("subfield check failed: {0}")]
    Verification(String),
}

/// Coset decomposition of `(Z/q)^x` by the subgroup of `e`-th powers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodCosets {
    pub q: u64,
    pub e: u64,
    pub generator: u64,
    /// `cosets[i] = g^i H`, each sorted.
    pub cosets: Vec<Vec<u64>>,
    /// `index[x]` is the coset containing `x` (entry 0 unused).
    #[serde(skip)]
    index: Vec<u32>,
}

impl PeriodCosets {
    pub fn coset_of(&self, x: u64) -> usize {
        self.index[(x % self.q) as usize] as usize
    }

    pub fn subgroup(&self) -> &[u64] {
        &self.cosets[0]
    }

    fn rebuild_index(&mut self) {
        let mut index = vec![0u32; self.q as usize];
        for (i, c) in self.cosets.iter().enumerate() {
            for &x in c {
                index[x as usize] = i as u32;
            }
        }
        self.index = index;
    }
}

pub fn period_cosets(q: u64, e: u64) -> Result<PeriodCosets, CycloError> {
    if !is_prime(q) {
        return Err(CycloError::NotPrime(q));
    }
    period_cosets_with_root(q, e, primitive_root(q))
}

/// Same as [`period_cosets`] with an explicit primitive root.
pub fn period_cosets_with_root(q: u64, e: u64, g: u64) -> Result<PeriodCosets, CycloError> {
    if !is_prime(q) {
        return Err(CycloError::NotPrime(q));
    }
    if e == 0 || (q - 1) % e != 0 {
        return Err(CycloError::NotDivisor { q, e });
    }
    let g = g % q;
    let order_ok = q == 2 || crate::arith::mult_order(g as i64, q).map_or(false, |o| o == q - 1);
    if !order_ok {
        return Err(CycloError::NotPrimitiveRoot(g));
    }
    let mut cosets = vec![Vec::with_capacity(((q - 1) / e) as usize); e as usize];
    let mut x = 1u64;
    for k in 0..q - 1 {
        cosets[(k % e) as usize].push(x);
        x = mul_mod(x, g, q);
    }
    cosets.iter_mut().for_each(|c| c.sort_unstable());
    let mut out = PeriodCosets { q, e, generator: g, cosets, index: Vec::new() };
    out.rebuild_index();
    Ok(out)
}

/// Element of `F` in the period basis.
pub type PeriodVec = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicSubfield {
    pub q: u64,
    pub e: u64,
    /// Monic minimal polynomial of `eta_0`, lowest degree first.
    pub period_poly: Vec<BigInt>,
    pub cosets: PeriodCosets,
    /// Field discriminant, `q^(e-1)`.
    pub disc: BigInt,
    /// `mult[i][j]` = `eta_i * eta_j` in the period basis.
    pub mult: Vec<Vec<Vec<i64>>>,
}

fn row0_products(c: &PeriodCosets) -> Vec<Vec<i64>> {
    let e = c.e as usize;
    let f = ((c.q - 1) / c.e) as i64;
    // eta_0 eta_k = sum_{y in C_k} zeta^{1+y} summed over H; since -1 in H the
    // constant term appears only for k = 0 and contributes f = -f sum eta
    (0..e)
        .map(|k| {
            let mut v = vec![0i64; e];
            for &y in &c.cosets[k] {
                let s = (1 + y) % c.q;
                if s == 0 {
                    v.iter_mut().for_each(|x| *x -= f);
                } else {
                    v[c.coset_of(s)] += 1;
                }
            }
            v
        })
        .collect()
}

impl CyclotomicSubfield {
    pub fn degree(&self) -> usize {
        self.e as usize
    }

    /// The element 1 in the period basis: `1 = -sum eta_i`.
    pub fn one(&self) -> PeriodVec {
        vec![-BigInt::one(); self.degree()]
    }

    pub fn period(&self, i: usize) -> PeriodVec {
        let mut v = vec![BigInt::zero(); self.degree()];
        v[i % self.degree()] = BigInt::one();
        v
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> PeriodVec {
        let e = self.degree();
        let mut out = vec![BigInt::zero(); e];
        for i in 0..e {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..e {
                if b[j].is_zero() {
                    continue;
                }
                let c = &a[i] * &b[j];
                for (t, &m) in self.mult[i][j].iter().enumerate() {
                    if m != 0 {
                        out[t] += &c * m;
                    }
                }
            }
        }
        out
    }

    /// Trace to Q: every period has trace -1.
    pub fn trace(&self, a: &[BigInt]) -> BigInt {
        -a.iter().sum::<BigInt>()
    }

    /// Generator of Gal(F/Q) applied `k` times: `eta_i -> eta_{i+k}`.
    pub fn galois(&self, a: &[BigInt], k: usize) -> PeriodVec {
        let e = self.degree();
        let mut out = vec![BigInt::zero(); e];
        for (i, x) in a.iter().enumerate() {
            out[(i + k) % e] = x.clone();
        }
        out
    }

    /// Real values of the periods, `eta_i = sum_{h in C_i} cos(2 pi h / q)`.
    pub fn period_values(&self) -> Vec<f64> {
        let q = self.q as f64;
        self.cosets
            .cosets
            .iter()
            .map(|c| c.iter().map(|&h| (2.0 * std::f64::consts::PI * h as f64 / q).cos()).sum())
            .collect()
    }

    /// Trace-form Gram matrix `Tr(eta_i eta_j)`.
    pub fn trace_gram(&self) -> linalg::IntMatrix {
        let e = self.degree();
        (0..e)
            .map(|i| {
                (0..e)
                    .map(|j| -BigInt::from(self.mult[i][j].iter().sum::<i64>()))
                    .collect()
            })
            .collect()
    }
}

/// Characteristic polynomial from power sums `p_1..p_n` (Newton's identities).
fn newton(power_sums: &[BigInt]) -> Vec<BigInt> {
    let n = power_sums.len();
    // elementary symmetric e_0..e_n
    let mut el = vec![BigInt::one()];
    for k in 1..=n {
        let mut acc = BigInt::zero();
        for i in 1..=k {
            let term = &el[k - i] * &power_sums[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let (quot, rem) = acc.div_rem(&BigInt::from(k));
        debug_assert!(rem.is_zero());
        el.push(quot);
    }
    // x^n - e1 x^{n-1} + e2 x^{n-2} ...
    let mut coeffs = vec![BigInt::zero(); n + 1];
    for (k, ek) in el.into_iter().enumerate() {
        coeffs[n - k] = if k % 2 == 1 { -ek } else { ek };
    }
    coeffs
}

pub fn period_polynomial(q: u64, e: u64) -> Result<CyclotomicSubfield, CycloError> {
    if !is_prime(q) {
        return Err(CycloError::NotPrime(q));
    }
    if e == 0 || (q - 1) % e != 0 {
        return Err(CycloError::NotDivisor { q, e });
    }
    if e % 2 == 0 {
        return Err(CycloError::EvenDegree(e));
    }
    build(period_cosets(q, e)?)
}

/// Construct the subfield from an already chosen coset decomposition.
pub fn build(cosets: PeriodCosets) -> Result<CyclotomicSubfield, CycloError> {
    let (q, e) = (cosets.q, cosets.e);
    if e % 2 == 0 {
        return Err(CycloError::EvenDegree(e));
    }
    let row0 = row0_products(&cosets);
    let n = e as usize;
    let mult: Vec<Vec<Vec<i64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let src = &row0[(j + n - i) % n];
                    let mut v = vec![0i64; n];
                    for (t, &x) in src.iter().enumerate() {
                        v[(t + i) % n] = x;
                    }
                    v
                })
                .collect()
        })
        .collect();
    let mut field = CyclotomicSubfield {
        q,
        e,
        period_poly: Vec::new(),
        cosets,
        disc: BigInt::from(q).pow((e - 1) as u32),
        mult,
    };
    let eta = field.period(0);
    let mut power = eta.clone();
    let mut sums = Vec::with_capacity(n);
    for k in 1..=n {
        sums.push(field.trace(&power));
        if k < n {
            power = field.mul(&power, &eta);
        }
    }
    field.period_poly = newton(&sums);
    Ok(field)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubfieldReport {
    pub q: u64,
    pub e: u64,
    /// Determinant of the trace form on the period basis.
    pub field_disc: BigInt,
    pub poly_disc: BigInt,
    /// `[O_F : Z[eta_0]]`, so that `poly_disc = index^2 field_disc`.
    pub index: BigInt,
    pub real_roots: usize,
    /// Prime modulo which the period polynomial stays irreducible.
    pub irreducible_mod: u64,
}

impl SubfieldReport {
    pub fn monogenic_by_period(&self) -> bool {
        self.index.is_one()
    }
}

pub fn verify_subfield(f: &CyclotomicSubfield) -> Result<SubfieldReport, CycloError> {
    let expected = BigInt::from(f.q).pow((f.e - 1) as u32);
    let field_disc = linalg::determinant(&f.trace_gram());
    if field_disc != expected {
        return Err(CycloError::Verification(format!(
            "trace form of the period basis has determinant {field_disc}, expected {expected}"
        )));
    }
    let poly_disc = poly::discriminant(&f.period_poly);
    let (index2, rem) = poly_disc.div_rem(&field_disc);
    let index = index2.sqrt();
    if !rem.is_zero() || &index * &index != index2 {
        return Err(CycloError::Verification(format!(
            "polynomial discriminant {poly_disc} is not a square multiple of {field_disc}"
        )));
    }
    if f.period_poly.get(f.degree().saturating_sub(1)).map_or(true, |c| !c.is_one()) {
        return Err(CycloError::Verification("periods do not sum to -1".into()));
    }
    let real_roots = poly::count_real_roots(&f.period_poly);
    if real_roots != f.degree() {
        return Err(CycloError::Verification(format!("{real_roots} real roots out of {}", f.e)));
    }
    // a prime whose Frobenius generates Gal(F/Q) exists with density phi(e)/e
    let bound = 10_000u64.max(16 * f.q);
    let irreducible_mod = poly::irreducibility_witness(&f.period_poly, bound)
        .ok_or_else(|| CycloError::Verification("no irreducibility witness found".into()))?;
    Ok(SubfieldReport { q: f.q, e: f.e, field_disc, poly_disc, index, real_roots, irreducible_mod })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn coeffs(f: &CyclotomicSubfield) -> Vec<i64> {
        f.period_poly.iter().map(|c| c.to_i64().unwrap()).collect()
    }

    #[test]
    fn cosets_mod_7_and_13() {
        let c = period_cosets(7, 3).unwrap();
        assert_eq!(c.generator, 3);
        assert_eq!(c.cosets, vec![vec![1, 6], vec![3, 4], vec![2, 5]]);
        let c = period_cosets(13, 3).unwrap();
        assert_eq!(c.subgroup(), &[1, 5, 8, 12]);
        let c = period_cosets(11, 1).unwrap();
        assert_eq!(c.cosets, vec![(1..11).collect::<Vec<_>>()]);
        assert_eq!(period_cosets(13, 5), Err(CycloError::NotDivisor { q: 13, e: 5 }));
        assert_eq!(period_cosets(15, 1), Err(CycloError::NotPrime(15)));
    }

    #[test]
    fn small_period_polynomials() {
        assert_eq!(coeffs(&period_polynomial(7, 3).unwrap()), vec![-1, -2, 1, 1]);
        assert_eq!(coeffs(&period_polynomial(13, 3).unwrap()), vec![1, -4, 1, 1]);
        assert_eq!(coeffs(&period_polynomial(23, 1).unwrap()), vec![1, 1]);
        assert_eq!(period_polynomial(13, 2), Err(CycloError::EvenDegree(2)));
        assert_eq!(period_polynomial(13, 4), Err(CycloError::EvenDegree(4)));
    }

    #[test]
    fn reports() {
        let r = verify_subfield(&period_polynomial(7, 3).unwrap()).unwrap();
        assert_eq!((r.field_disc.clone(), r.poly_disc.clone(), r.real_roots), (49.into(), 49.into(), 3));
        let r = verify_subfield(&period_polynomial(13, 3).unwrap()).unwrap();
        assert_eq!((r.field_disc.clone(), r.poly_disc.clone(), r.real_roots), (169.into(), 169.into(), 3));
        let r = verify_subfield(&period_polynomial(5, 1).unwrap()).unwrap();
        assert_eq!((r.field_disc.clone(), r.real_roots), (1.into(), 1));
        // conductor 31: Z[eta_0] has index 2 in O_F
        let r = verify_subfield(&period_polynomial(31, 3).unwrap()).unwrap();
        assert_eq!(r.field_disc, BigInt::from(961));
        assert_eq!(r.poly_disc, BigInt::from(3844));
        assert_eq!(r.index, BigInt::from(2));
    }

    #[test]
    fn degree_nine() {
        let f = period_polynomial(19, 9).unwrap();
        let r = verify_subfield(&f).unwrap();
        assert_eq!(r.field_disc, BigInt::from(19u64.pow(8)));
        assert_eq!(r.real_roots, 9);
    }

    #[test]
    fn one_is_neutral_and_table_is_commutative() {
        let f = period_polynomial(37, 3).unwrap();
        for i in 0..3 {
            assert_eq!(f.mul(&f.one(), &f.period(i)), f.period(i));
            for j in 0..3 {
                assert_eq!(f.mult[i][j], f.mult[j][i]);
            }
        }
        assert_eq!(f.trace(&f.one()), BigInt::from(3));
    }

    #[test]
    fn numeric_periods_are_roots() {
        let f = period_polynomial(43, 3).unwrap();
        for v in f.period_values() {
            assert!(poly::eval_f64(&f.period_poly, v).abs() < 1e-9);
        }
    }

    #[test]
    fn other_primitive_root_same_polynomial() {
        let a = period_polynomial(31, 3).unwrap();
        let b = build(period_cosets_with_root(31, 3, 11).unwrap()).unwrap();
        assert_eq!(a.period_poly, b.period_poly);
        assert!(period_cosets_with_root(31, 3, 2).is_err());
    }
}
