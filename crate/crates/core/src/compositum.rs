//! The order `O_L (x) O_F` of the compositum `M = L F`, ideal extension,
//! and exact principality certificates found by lattice enumeration.
//!
//! Basis element `w_i v_j` (with `w = (1, w)` and `v` the periods) has
//! index `i e + j`. Since `M` is totally real the T2 form is the trace form
//! `Tr(x y)`, an exact integer matrix; floating embeddings only pre-screen
//! candidates.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::CyclotomicSubfield;
use crate::lattice::{self, Enumerated, DELTA_099};
use crate::linalg::{self, IntMatrix};
use crate::quadfield::{QuadIdeal, QuadNumber, QuadraticField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompositumError {
    #[error("conductor {q} divides disc(L) = {disc}")]
    CommonFactor { q: u64, disc: i64 },
    #[error("discriminant check failed: got {got}, expected {expected}")]
    Discriminant { got: BigInt, expected: BigInt },
    #[error("ideal is not integral")]
    NotIntegral,
    #[error("coordinate vector has length {got}, expected {expected}")]
    Dimension { got: usize, expected: usize },
}

#[derive(Debug, Clone)]
pub struct CompositumOrder {
    pub field: QuadraticField,
    pub sub: CyclotomicSubfield,
    pub degree: usize,
    /// `mult[k][l]` = `b_k b_l` in the basis.
    pub mult: Vec<Vec<Vec<i64>>>,
    /// `Tr(b_k b_l)`, equal to the T2 Gram matrix.
    pub trace_gram: IntMatrix,
    pub disc: BigInt,
    /// `embeddings[k][s]` is the value of `b_k` at the `s`-th real place.
    pub embeddings: Vec<Vec<f64>>,
}

pub type Coords = Vec<BigInt>;

pub fn build_compositum(field: &QuadraticField, sub: &CyclotomicSubfield) -> Result<CompositumOrder, CompositumError> {
    let e = sub.degree();
    let n = 2 * e;
    if field.disc() % sub.q as i64 == 0 {
        return Err(CompositumError::CommonFactor { q: sub.q, disc: field.disc() });
    }
    let t = field.omega_trace();
    let nw = field.omega_norm();
    // w_i w_k in the basis (1, w)
    let wmul = |i: usize, k: usize| -> [i64; 2] {
        match (i, k) {
            (0, 0) => [1, 0],
            (0, 1) | (1, 0) => [0, 1],
            _ => [-nw, t],
        }
    };
    let mut mult = vec![vec![vec![0i64; n]; n]; n];
    for (k, row) in mult.iter_mut().enumerate() {
        let (i1, j1) = (k / e, k % e);
        for (l, out) in row.iter_mut().enumerate() {
            let (i2, j2) = (l / e, l % e);
            let w = wmul(i1, i2);
            let v = &sub.mult[j1][j2];
            for (a, &wa) in w.iter().enumerate() {
                if wa == 0 {
                    continue;
                }
                for (s, &vs) in v.iter().enumerate() {
                    out[a * e + s] += wa * vs;
                }
            }
        }
    }
    // Tr(w_i v_j) = Tr_L(w_i) Tr_F(v_j) = -Tr_L(w_i)
    let basis_trace: Vec<i64> = (0..n).map(|k| if k / e == 0 { -2 } else { -t }).collect();
    let trace_gram: IntMatrix = (0..n)
        .map(|k| {
            (0..n)
                .map(|l| BigInt::from(mult[k][l].iter().zip(&basis_trace).map(|(a, b)| a * b).sum::<i64>()))
                .collect()
        })
        .collect();
    let disc = linalg::determinant(&trace_gram);
    let expected = BigInt::from(field.disc()).pow(e as u32) * BigInt::from(sub.q).pow(2 * (e as u32 - 1));
    if disc != expected {
        return Err(CompositumError::Discriminant { got: disc, expected });
    }
    let periods = sub.period_values();
    let embeddings = (0..n)
        .map(|k| {
            let (i, j) = (k / e, k % e);
            let mut vals = Vec::with_capacity(n);
            for sign in [1.0, -1.0] {
                let w = if i == 0 { 1.0 } else { field.omega_real(sign) };
                for s in 0..e {
                    vals.push(w * periods[(j + s) % e]);
                }
            }
            vals
        })
        .collect();
    Ok(CompositumOrder { field: field.clone(), sub: sub.clone(), degree: n, mult, trace_gram, disc, embeddings })
}

impl CompositumOrder {
    pub fn e(&self) -> usize {
        self.sub.degree()
    }

    pub fn one(&self) -> Coords {
        // 1 = -sum_j v_j
        let mut v = vec![BigInt::zero(); self.degree];
        v[..self.e()].iter_mut().for_each(|x| *x = -BigInt::one());
        v
    }

    pub fn scalar(&self, k: &BigInt) -> Coords {
        self.one().iter().map(|x| x * k).collect()
    }

    pub fn basis_element(&self, k: usize) -> Coords {
        let mut v = vec![BigInt::zero(); self.degree];
        v[k] = BigInt::one();
        v
    }

    /// Image of an integral element `x + y w` of `L`.
    pub fn from_quadratic(&self, a: &QuadNumber) -> Option<Coords> {
        if !a.is_integral() {
            return None;
        }
        let e = self.e();
        let mut v = vec![BigInt::zero(); self.degree];
        for j in 0..e {
            v[j] = -a.x.clone();
            v[e + j] = -a.y.clone();
        }
        Some(v)
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Coords {
        let n = self.degree;
        let mut out = vec![BigInt::zero(); n];
        for k in 0..n {
            if a[k].is_zero() {
                continue;
            }
            for l in 0..n {
                if b[l].is_zero() {
                    continue;
                }
                let c = &a[k] * &b[l];
                for (s, &m) in self.mult[k][l].iter().enumerate() {
                    if m != 0 {
                        out[s] += &c * m;
                    }
                }
            }
        }
        out
    }

    /// Rows `alpha b_k`.
    pub fn mult_matrix(&self, alpha: &[BigInt]) -> IntMatrix {
        (0..self.degree).map(|k| self.mul(alpha, &self.basis_element(k))).collect()
    }

    pub fn trace(&self, a: &[BigInt]) -> BigInt {
        let e = self.e();
        let t = BigInt::from(self.field.omega_trace());
        a.iter()
            .enumerate()
            .fold(BigInt::zero(), |acc, (k, x)| if k / e == 0 { acc - x * 2 } else { acc - x * &t })
    }

    /// `T2(a) = Tr(a^2)`.
    pub fn t2(&self, a: &[BigInt]) -> BigInt {
        let ga = linalg::vec_mat_mul(a, &self.trace_gram);
        a.iter().zip(&ga).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
    }

    pub fn embed(&self, a: &[BigInt]) -> Vec<f64> {
        let af: Vec<f64> = a.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        (0..self.degree)
            .map(|s| af.iter().zip(&self.embeddings).map(|(x, row)| x * row[s]).sum())
            .collect()
    }

    /// Apply the generator of Gal(M/L): `v_j -> v_{j+1}`.
    pub fn galois(&self, a: &[BigInt]) -> Coords {
        let e = self.e();
        let mut out = vec![BigInt::zero(); self.degree];
        for (k, x) in a.iter().enumerate() {
            let (i, j) = (k / e, k % e);
            out[i * e + (j + 1) % e] = x.clone();
        }
        out
    }
}

/// Exact norm `N_{M/Q}(alpha)`, the determinant of multiplication by alpha.
pub fn exact_norm(alpha: &[BigInt], o: &CompositumOrder) -> Result<BigInt, CompositumError> {
    if alpha.len() != o.degree {
        return Err(CompositumError::Dimension { got: alpha.len(), expected: o.degree });
    }
    Ok(linalg::determinant(&o.mult_matrix(alpha)))
}

/// HNF basis of an ideal of `O_M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealLatticeBasis {
    pub hnf: IntMatrix,
    pub norm: BigInt,
}

impl IdealLatticeBasis {
    pub fn contains(&self, alpha: &[BigInt]) -> Option<Vec<BigInt>> {
        linalg::solve_upper(&self.hnf, alpha)
    }
}

/// Lattice of `I O_M` from the generators `{g b_k}`.
pub fn extend_ideal(ideal: &QuadIdeal, o: &CompositumOrder) -> Result<IdealLatticeBasis, CompositumError> {
    if !ideal.is_integral() {
        return Err(CompositumError::NotIntegral);
    }
    let gens: Vec<Coords> = ideal
        .basis()
        .iter()
        .map(|g| o.from_quadratic(g).ok_or(CompositumError::NotIntegral))
        .collect::<Result<_, _>>()?;
    let rows: Vec<Coords> = gens
        .iter()
        .flat_map(|g| (0..o.degree).map(move |k| o.mul(g, &o.basis_element(k))))
        .collect();
    let hnf = linalg::hnf(&rows, o.degree).expect("nonzero ideal has full rank");
    let norm = linalg::determinant(&hnf).abs();
    Ok(IdealLatticeBasis { hnf, norm })
}

/// Lattice of the principal ideal `(alpha)`.
pub fn principal_lattice(alpha: &[BigInt], o: &CompositumOrder) -> IdealLatticeBasis {
    let hnf = linalg::hnf(&o.mult_matrix(alpha), o.degree).expect("nonzero element");
    let norm = linalg::determinant(&hnf).abs();
    IdealLatticeBasis { hnf, norm }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalityCertificate {
    /// Generator in the basis `w_i v_j`.
    pub alpha: Vec<BigInt>,
    pub norm_alpha: BigInt,
    pub ideal_norm: BigInt,
    /// `containment * hnf = alpha`.
    pub containment: Vec<BigInt>,
    pub t2: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Valid,
    WrongLength,
    ContainmentMismatch,
    NotInIdeal,
    NormMismatch { norm: BigInt, expected: BigInt },
    IdealNormMismatch,
}

/// Exact check: `alpha` lies in the ideal and `|N(alpha)| = N(I)`, hence
/// `(alpha) = I`.
pub fn verify_certificate(cert: &PrincipalityCertificate, basis: &IdealLatticeBasis, o: &CompositumOrder) -> Verdict {
    let n = o.degree;
    if cert.alpha.len() != n || cert.containment.len() != n {
        return Verdict::WrongLength;
    }
    if cert.ideal_norm != basis.norm || linalg::determinant(&basis.hnf).abs() != basis.norm {
        return Verdict::IdealNormMismatch;
    }
    if linalg::vec_mat_mul(&cert.containment, &basis.hnf) != cert.alpha {
        return Verdict::ContainmentMismatch;
    }
    if basis.contains(&cert.alpha).is_none() {
        return Verdict::NotInIdeal;
    }
    let norm = linalg::determinant(&o.mult_matrix(&cert.alpha));
    if norm.abs() != basis.norm || norm != cert.norm_alpha {
        return Verdict::NormMismatch { norm, expected: basis.norm.clone() };
    }
    Verdict::Valid
}

/// Radius schedule for the enumeration: T2 bounds
/// `c0 * 2e * N^(1/e) * 2^k` for `k = 0..=max_doublings`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusSchedule {
    pub c0: f64,
    pub max_doublings: u32,
    /// Enumeration nodes allowed per radius.
    pub node_budget: u64,
}

impl Default for RadiusSchedule {
    fn default() -> Self {
        Self { c0: 2.0, max_doublings: 12, node_budget: 200_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CertifyOutcome {
    Certified { certificate: PrincipalityCertificate, radius: f64, doublings: u32 },
    NotFound { max_radius: f64, truncated: bool },
}

impl CertifyOutcome {
    pub fn certificate(&self) -> Option<&PrincipalityCertificate> {
        match self {
            CertifyOutcome::Certified { certificate, .. } => Some(certificate),
            CertifyOutcome::NotFound { .. } => None,
        }
    }
}

fn approx_log_norm(o: &CompositumOrder, alpha: &[BigInt]) -> f64 {
    o.embed(alpha).iter().map(|x| x.abs().ln()).sum()
}

/// Search the ideal lattice for a generator by increasing T2 radius.
///
/// At each radius all candidates whose floating norm is close to `N(I)`
/// are checked exactly and the one of least T2 (ties lexicographic) wins.
pub fn certify_principal(basis: &IdealLatticeBasis, o: &CompositumOrder, schedule: RadiusSchedule) -> CertifyOutcome {
    let e = o.e() as f64;
    let norm_f = basis.norm.to_f64().unwrap_or(f64::INFINITY);
    let log_target = norm_f.ln();
    let reduced = lattice::lll(&basis.hnf, &o.trace_gram, DELTA_099);
    let start = schedule.c0 * 2.0 * e * norm_f.powf(1.0 / e);
    let mut truncated = false;
    let mut radius = start;
    for k in 0..=schedule.max_doublings {
        radius = start * 2f64.powi(k as i32);
        let mut hits: Vec<Vec<i64>> = Vec::new();
        let status = lattice::fincke_pohst(&reduced.gram, radius, schedule.node_budget, |x, _| {
            let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
            let alpha = linalg::vec_mat_mul(&xb, &reduced.basis);
            if (approx_log_norm(o, &alpha) - log_target).abs() < 1e-6 * log_target.max(1.0) {
                hits.push(x.to_vec());
            }
            true
        });
        truncated |= status == Enumerated::Truncated;
        let found = exact_pick(basis, o, &reduced, hits);
        if let Some(certificate) = found {
            return CertifyOutcome::Certified { certificate, radius, doublings: k };
        }
        if status == Enumerated::Truncated {
            break;
        }
    }
    CertifyOutcome::NotFound { max_radius: radius, truncated }
}

fn exact_pick(
    basis: &IdealLatticeBasis,
    o: &CompositumOrder,
    reduced: &lattice::Reduced,
    hits: Vec<Vec<i64>>,
) -> Option<PrincipalityCertificate> {
    let mut certs: Vec<PrincipalityCertificate> = hits
        .par_iter()
        .filter_map(|x| {
            let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
            let mut alpha = linalg::vec_mat_mul(&xb, &reduced.basis);
            let mut norm = linalg::determinant(&o.mult_matrix(&alpha));
            if norm.abs() != basis.norm {
                return None;
            }
            // normalise the sign so the trace is nonnegative
            if o.trace(&alpha).is_negative() {
                alpha.iter_mut().for_each(|c| *c = -&*c);
                if o.degree % 2 == 1 {
                    norm = -norm;
                }
            }
            let containment = basis.contains(&alpha)?;
            let t2 = o.t2(&alpha);
            Some(PrincipalityCertificate { alpha, norm_alpha: norm, ideal_norm: basis.norm.clone(), containment, t2 })
        })
        .collect();
    certs.sort_by(|a, b| a.t2.cmp(&b.t2).then_with(|| a.alpha.cmp(&b.alpha)));
    certs.into_iter().next()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::period_polynomial;

    fn order(d: i64, q: u64, e: u64) -> CompositumOrder {
        let field = QuadraticField::new(d).unwrap();
        build_compositum(&field, &period_polynomial(q, e).unwrap()).unwrap()
    }

    #[test]
    fn discriminants() {
        let o = order(79, 13, 3);
        assert_eq!(o.disc, BigInt::from(316).pow(3) * BigInt::from(13).pow(4));
        let o = order(2, 7, 3);
        assert_eq!(o.disc, BigInt::from(8).pow(3) * BigInt::from(7).pow(4));
        let o = order(5, 11, 1);
        assert_eq!((o.degree, o.disc.clone()), (2, BigInt::from(5)));
        let field = QuadraticField::new(13).unwrap();
        assert!(matches!(
            build_compositum(&field, &period_polynomial(13, 3).unwrap()),
            Err(CompositumError::CommonFactor { .. })
        ));
    }

    #[test]
    fn norms() {
        let o = order(79, 13, 3);
        assert_eq!(exact_norm(&o.one(), &o).unwrap(), BigInt::one());
        assert_eq!(exact_norm(&o.scalar(&BigInt::from(5)), &o).unwrap(), BigInt::from(5).pow(6));
        let s = o.from_quadratic(&o.field.sqrt_d_elt()).unwrap();
        assert_eq!(exact_norm(&s, &o).unwrap(), BigInt::from(-493039));
        // floating embeddings agree with the exact trace form
        let x: Coords = (0..6).map(|k| BigInt::from(k as i64 * 3 - 7)).collect();
        let t2f: f64 = o.embed(&x).iter().map(|v| v * v).sum();
        assert!((t2f - o.t2(&x).to_f64().unwrap()).abs() < 1e-6 * t2f);
    }

    #[test]
    fn extension_determinants() {
        let o = order(79, 13, 3);
        let unit = extend_ideal(&QuadIdeal::unit(), &o).unwrap();
        assert_eq!(unit.hnf, linalg::identity(6));
        let p = o.field.prime_ideal_above(13).unwrap();
        assert_eq!(extend_ideal(&p, &o).unwrap().norm, BigInt::from(2197));
        let thirteen = QuadIdeal::principal(&o.field, &QuadNumber::integral(13, 0)).unwrap();
        assert_eq!(extend_ideal(&thirteen, &o).unwrap().norm, BigInt::from(13).pow(6));
    }

    #[test]
    fn trivial_certificates() {
        let o = order(79, 13, 3);
        let b = extend_ideal(&QuadIdeal::unit(), &o).unwrap();
        let c = certify_principal(&b, &o, RadiusSchedule::default());
        let cert = c.certificate().unwrap();
        assert_eq!(verify_certificate(cert, &b, &o), Verdict::Valid);
        assert!(exact_norm(&cert.alpha, &o).unwrap().abs().is_one());
        let root = QuadIdeal::principal(&o.field, &o.field.sqrt_d_elt()).unwrap();
        let b = extend_ideal(&root, &o).unwrap();
        let cert = certify_principal(&b, &o, RadiusSchedule::default()).certificate().cloned().unwrap();
        assert_eq!(cert.norm_alpha.abs(), BigInt::from(79).pow(3));
        assert_eq!(verify_certificate(&cert, &b, &o), Verdict::Valid);
    }
}
