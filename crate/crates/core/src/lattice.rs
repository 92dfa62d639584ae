//! Lattice reduction and short-vector enumeration for a positive definite
//! integral quadratic form.
//!
//! Reduction is the integral LLL of Cohen (Alg. 2.6.7) carried out on the
//! exact Gram matrix, so the transformation is exactly unimodular. The
//! enumeration uses a floating Cholesky decomposition of the reduced form;
//! it only proposes vectors, every decision downstream is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::{self, IntMatrix};

/// Reduction parameter `delta = num / den`.
#[derive(Debug, Clone, Copy)]
pub struct Delta {
    pub num: i64,
    pub den: i64,
}

pub const DELTA_099: Delta = Delta { num: 99, den: 100 };

#[derive(Debug, Clone)]
pub struct Reduced {
    /// Reduced basis, rows in the ambient coordinates.
    pub basis: IntMatrix,
    /// `basis = transform * input`.
    pub transform: IntMatrix,
    /// Gram matrix of the reduced basis.
    pub gram: IntMatrix,
}

fn dot(gram: &IntMatrix, x: &[BigInt], y: &[BigInt]) -> BigInt {
    let gy = linalg::vec_mat_mul(y, gram);
    x.iter().zip(&gy).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
}

/// Round `a / b` to the nearest integer, `b > 0`.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

/// LLL-reduce the rows of `basis` with respect to the form `gram`
/// (symmetric positive definite). The rows must be linearly independent.
pub fn lll(basis: &IntMatrix, gram: &IntMatrix, delta: Delta) -> Reduced {
    let n = basis.len();
    let mut b = basis.clone();
    let mut h = linalg::identity(n);
    if n == 0 {
        return Reduced { basis: b, transform: h, gram: Vec::new() };
    }
    // d[0] = 1, d[i+1] = d_i of Cohen (1-based), lambda[k][j] for j < k
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n]; n];
    d[0] = BigInt::one();
    d[1] = dot(gram, &b[0], &b[0]);
    let (dn, dd) = (BigInt::from(delta.num), BigInt::from(delta.den));

    let red = |k: usize, l: usize, b: &mut IntMatrix, h: &mut IntMatrix, lam: &mut Vec<Vec<BigInt>>, d: &[BigInt]| {
        let dl = &d[l + 1];
        let twice = BigInt::from(2) * &lam[k][l];
        if twice.abs() > *dl {
            let q = round_div(&lam[k][l], dl);
            let (bl, hl) = (b[l].clone(), h[l].clone());
            b[k].iter_mut().zip(&bl).for_each(|(x, y)| *x -= &q * y);
            h[k].iter_mut().zip(&hl).for_each(|(x, y)| *x -= &q * y);
            lam[k][l] -= &q * dl;
            for i in 0..l {
                let t = &q * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    };

    let mut k = 1usize;
    let mut kmax = 0usize;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(gram, &b[k], &b[j]);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    assert!(u.is_positive(), "LLL input rows are dependent");
                    d[k + 1] = u;
                }
            }
        }
        loop {
            red(k, k - 1, &mut b, &mut h, &mut lam, &d);
            // Lovasz: d_k d_{k-2} >= delta d_{k-1}^2 - lambda^2
            let lhs = &dd * &d[k + 1] * &d[k - 1];
            let l2 = &lam[k][k - 1] * &lam[k][k - 1];
            let rhs = &dn * &d[k] * &d[k] - &dd * &l2;
            if lhs >= rhs {
                break;
            }
            // swap k and k-1
            b.swap(k, k - 1);
            h.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = std::mem::take(&mut lam[k][j]);
                lam[k][j] = std::mem::replace(&mut lam[k - 1][j], t);
            }
            let lambda = lam[k][k - 1].clone();
            let bb = (&d[k - 1] * &d[k + 1] + &lambda * &lambda) / &d[k];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &lambda * &t) / &d[k];
                lam[i][k - 1] = (&bb * &t + &lambda * &lam[i][k]) / &d[k + 1];
            }
            d[k] = bb;
            if k > 1 {
                k -= 1;
            }
        }
        for l in (0..k.saturating_sub(1)).rev() {
            red(k, l, &mut b, &mut h, &mut lam, &d);
        }
        k += 1;
    }
    let g = gram_of(&b, gram);
    Reduced { basis: b, transform: h, gram: g }
}

/// Gram matrix of the rows of `b` under `gram`.
pub fn gram_of(b: &IntMatrix, gram: &IntMatrix) -> IntMatrix {
    let bg = linalg::mat_mul(b, gram);
    linalg::mat_mul(&bg, &linalg::transpose(b))
}

/// Is the basis LLL-reduced for `delta` (checked in exact rationals)?
pub fn is_reduced(gram_b: &IntMatrix, delta: Delta) -> bool {
    use num_rational::BigRational;
    let n = gram_b.len();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut bstar = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = BigRational::from_integer(gram_b[i][j].clone());
            for k in 0..j {
                s -= &mu[j][k] * &mu[i][k] * &bstar[k];
            }
            mu[i][j] = s / &bstar[j];
        }
        let mut s = BigRational::from_integer(gram_b[i][i].clone());
        for k in 0..i {
            s -= &mu[i][k] * &mu[i][k] * &bstar[k];
        }
        bstar[i] = s;
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let dl = BigRational::new(BigInt::from(delta.num), BigInt::from(delta.den));
    let size_ok = (0..n).all(|i| (0..i).all(|j| mu[i][j].abs() <= half));
    let lovasz_ok = (1..n).all(|k| bstar[k] >= (&dl - &mu[k][k - 1] * &mu[k][k - 1]) * &bstar[k - 1]);
    size_ok && lovasz_ok
}

/// Floating Cholesky data `Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2`.
fn cholesky(gram: &IntMatrix) -> Option<Vec<Vec<f64>>> {
    let n = gram.len();
    let mut q: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
        if !(q[i][i] > 0.0) {
            return None;
        }
    }
    Some(q)
}

/// Outcome of an enumeration pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enumerated {
    Complete,
    /// Stopped after visiting the node budget.
    Truncated,
}

/// Visit every nonzero `x` with last nonzero coordinate negative (one of
/// each pair `+-x`) and `x^T G x <= bound`
/// (up to floating slack), calling `visit(x, approx_value)`.
///
/// The visitor returns `false` to stop early.
pub fn fincke_pohst<F>(gram: &IntMatrix, bound: f64, node_budget: u64, mut visit: F) -> Enumerated
where
    F: FnMut(&[i64], f64) -> bool,
{
    let n = gram.len();
    if n == 0 {
        return Enumerated::Complete;
    }
    let q = cholesky(gram).expect("form must be positive definite");
    let c = bound * (1.0 + 1e-9) + 1e-9;
    let mut x = vec![0i64; n];
    let mut t = vec![0f64; n];
    let mut u = vec![0f64; n];
    let mut upper = vec![0i64; n];
    let mut nodes = 0u64;
    let mut i = n - 1;
    t[i] = c;
    u[i] = 0.0;
    // initialise level i
    let init = |i: usize, t: &[f64], u: &[f64], x: &mut [i64], upper: &mut [i64]| {
        let z = (t[i] / q[i][i]).max(0.0).sqrt();
        upper[i] = (z - u[i]).floor() as i64;
        x[i] = (-z - u[i]).ceil() as i64 - 1;
    };
    init(i, &t, &u, &mut x, &mut upper);
    loop {
        x[i] += 1;
        nodes += 1;
        if nodes > node_budget {
            return Enumerated::Truncated;
        }
        if x[i] > upper[i] {
            i += 1;
            if i == n {
                return Enumerated::Complete;
            }
            continue;
        }
        if i > 0 {
            let s = x[i] as f64 + u[i];
            let rest = t[i] - q[i][i] * s * s;
            i -= 1;
            t[i] = rest;
            u[i] = (i + 1..n).map(|j| q[i][j] * x[j] as f64).sum();
            init(i, &t, &u, &mut x, &mut upper);
            continue;
        }
        // vectors come in increasing lexicographic order from the top
        // coordinate; reaching zero means one of each pair has been seen
        if x.iter().all(|&v| v == 0) {
            return Enumerated::Complete;
        }
        let s = x[0] as f64 + u[0];
        let value = c - (t[0] - q[0][0] * s * s);
        if !visit(&x, value) {
            return Enumerated::Complete;
        }
    }
}

/// Exact value of the form at integer coordinates.
pub fn form_value(gram: &IntMatrix, x: &[i64]) -> BigInt {
    let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
    dot(gram, &xb, &xb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_big;

    #[test]
    fn lll_standard_form() {
        let basis = to_big(&[vec![1, 1, 1], vec![-1, 0, 2], vec![3, 5, 6]]);
        let gram = linalg::identity(3);
        let r = lll(&basis, &gram, DELTA_099);
        assert!(is_reduced(&r.gram, DELTA_099));
        assert_eq!(linalg::determinant(&r.transform).abs(), BigInt::one());
        assert_eq!(linalg::mat_mul(&r.transform, &basis), r.basis);
        assert_eq!(linalg::determinant(&r.gram), linalg::determinant(&gram_of(&basis, &gram)));
    }

    #[test]
    fn lll_skewed_form() {
        // a badly skewed basis of Z^4 under a nondiagonal form
        let basis = to_big(&[vec![1, 0, 0, 0], vec![1000, 1, 0, 0], vec![-311, 7000, 1, 0], vec![5, 9, 123456, 1]]);
        let gram = to_big(&[vec![2, 1, 0, 0], vec![1, 2, 1, 0], vec![0, 1, 2, 1], vec![0, 0, 1, 2]]);
        let r = lll(&basis, &gram, DELTA_099);
        assert!(is_reduced(&r.gram, DELTA_099));
        assert_eq!(linalg::determinant(&r.transform).abs(), BigInt::one());
        assert!(r.gram[0][0] <= BigInt::from(2));
    }

    #[test]
    fn enumeration_counts() {
        // Z^2 standard: vectors of norm <= 2 up to sign: (1,0),(0,1),(1,1),(1,-1)
        let gram = linalg::identity(2);
        let mut seen = Vec::new();
        let out = fincke_pohst(&gram, 2.0, 1_000_000, |x, _| {
            seen.push(x.to_vec());
            true
        });
        assert_eq!(out, Enumerated::Complete);
        assert_eq!(seen.len(), 4);
        for x in &seen {
            assert!(form_value(&gram, x) <= BigInt::from(2));
        }
        // A2 lattice: 3 pairs of minimal vectors of norm 2
        let a2 = to_big(&[vec![2, -1], vec![-1, 2]]);
        let mut count = 0;
        fincke_pohst(&a2, 2.0, 1_000_000, |_, _| {
            count += 1;
            true
        });
        assert_eq!(count, 3);
    }
}
