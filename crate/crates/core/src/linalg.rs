//! Exact integer matrix routines: Hermite and Smith normal forms, Bareiss
//! determinants, and triangular solves. Matrices are row-major `Vec<Vec<_>>`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn vec_mat_mul(v: &[BigInt], m: &IntMatrix) -> Vec<BigInt> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| v.iter().zip(m).fold(BigInt::zero(), |acc, (x, row)| acc + x * &row[j]))
        .collect()
}

pub fn transpose(m: &IntMatrix) -> IntMatrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Determinant by fraction-free Gaussian elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Row-style Hermite normal form of the lattice spanned by `rows` in Z^n.
///
/// The result is upper triangular with positive pivots, entries above each
/// pivot reduced into `[0, pivot)`. Returns `None` if the rows do not span a
/// full-rank lattice.
pub fn hnf(rows: &[Vec<BigInt>], n: usize) -> Option<IntMatrix> {
    let mut work: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out: IntMatrix = Vec::with_capacity(n);
    for col in 0..n {
        // gcd-eliminate column `col` among the remaining rows
        loop {
            let mut nz: Vec<usize> = (0..work.len()).filter(|&i| !work[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by(|&i, &j| work[i][col].abs().cmp(&work[j][col].abs()));
            let p = nz[0];
            let pivot = work[p][col].clone();
            let pivot_row = work[p].clone();
            for &i in &nz[1..] {
                let q = work[i][col].div_floor(&pivot);
                for (x, y) in work[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
        let idx = (0..work.len()).find(|&i| !work[i][col].is_zero())?;
        let mut row = work.swap_remove(idx);
        if row[col].is_negative() {
            row.iter_mut().for_each(|x| *x = -&*x);
        }
        out.push(row);
        work.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    // reduce entries above pivots
    for col in 0..n {
        let pivot = out[col][col].clone();
        let (above, below) = out.split_at_mut(col);
        let prow = &below[0];
        for r in above.iter_mut() {
            let q = r[col].div_floor(&pivot);
            if !q.is_zero() {
                for (x, y) in r.iter_mut().zip(prow) {
                    *x -= &q * y;
                }
            }
        }
    }
    Some(out)
}

/// Solve `x * h = v` for an upper-triangular `h` with nonzero diagonal.
/// Returns `None` if the solution is not integral.
pub fn solve_upper(h: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = h.len();
    let mut rest = v.to_vec();
    let mut x = vec![BigInt::zero(); n];
    for i in 0..n {
        let (q, r) = rest[i].div_rem(&h[i][i]);
        if !r.is_zero() {
            return None;
        }
        for j in i..n {
            rest[j] -= &q * &h[i][j];
        }
        x[i] = q;
    }
    Some(x)
}

/// Smith normal form of a square integer matrix `m`.
///
/// Returns `(diag, v, v_inv)` with `u * m * v = diag(diag)` for some
/// unimodular `u`, the divisors in divisibility order `d_1 | d_2 | ...`.
pub fn smith(m: &[Vec<i128>]) -> (Vec<i128>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut v: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    let mut vinv = v.clone();

    // column op: col_j += k * col_i ; v likewise ; v_inv rows: row_i -= k * row_j
    fn col_add(a: &mut [Vec<i128>], v: &mut [Vec<i128>], vinv: &mut [Vec<i128>], i: usize, j: usize, k: i128) {
        for r in a.iter_mut() {
            r[j] += k * r[i];
        }
        for r in v.iter_mut() {
            r[j] += k * r[i];
        }
        let (ri, rj) = (vinv[i].clone(), &vinv[j]);
        vinv[i] = ri.iter().zip(rj).map(|(x, y)| x - k * y).collect();
    }
    fn col_swap(a: &mut [Vec<i128>], v: &mut [Vec<i128>], vinv: &mut [Vec<i128>], i: usize, j: usize) {
        for r in a.iter_mut() {
            r.swap(i, j);
        }
        for r in v.iter_mut() {
            r.swap(i, j);
        }
        vinv.swap(i, j);
    }
    fn col_neg(a: &mut [Vec<i128>], v: &mut [Vec<i128>], vinv: &mut [Vec<i128>], i: usize) {
        for r in a.iter_mut() {
            r[i] = -r[i];
        }
        for r in v.iter_mut() {
            r[i] = -r[i];
        }
        vinv[i].iter_mut().for_each(|x| *x = -*x);
    }

    for t in 0..n {
        loop {
            // pick the smallest nonzero entry in the trailing block as pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, v, vinv);
            };
            a.swap(t, pi);
            col_swap(&mut a, &mut v, &mut vinv, t, pj);
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    let rt = a[t].clone();
                    a[i].iter_mut().zip(&rt).for_each(|(x, y)| *x -= q * y);
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    col_add(&mut a, &mut v, &mut vinv, t, j, -q);
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: p must divide the whole trailing block
            let bad = (t + 1..n).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
            match bad {
                Some((i, _)) => {
                    let ri = a[i].clone();
                    a[t].iter_mut().zip(&ri).for_each(|(x, y)| *x += y);
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            col_neg(&mut a, &mut v, &mut vinv, t);
        }
    }
    finish(a, v, vinv)
}

fn finish(a: Vec<Vec<i128>>, v: Vec<Vec<i128>>, vinv: Vec<Vec<i128>>) -> (Vec<i128>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let diag = (0..a.len()).map(|i| a[i][i]).collect();
    (diag, v, vinv)
}

pub fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}
