//! Period polynomials by direct expansion of `prod (X - eta_C)` with
//! coefficients in `Z[x]/(x^q - 1)`.

type Cyc = Vec<i64>;

fn cyc_mul(a: &Cyc, b: &Cyc, q: usize) -> Cyc {
    let mut out = vec![0i64; q];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[(i + j) % q] += x * y;
            }
        }
    }
    out
}

/// The subgroup of `e`-th powers and its cosets, found by exhaustion.
pub fn cosets(q: u64, e: u64) -> Vec<Vec<u64>> {
    let mut h: Vec<u64> = (1..q)
        .map(|x| {
            let mut acc = 1u64;
            for _ in 0..e {
                acc = acc * x % q;
            }
            acc
        })
        .collect();
    h.sort_unstable();
    h.dedup();
    let mut seen = vec![false; q as usize];
    let mut out = Vec::new();
    for a in 1..q {
        if seen[a as usize] {
            continue;
        }
        let mut c: Vec<u64> = h.iter().map(|&x| x * a % q).collect();
        c.sort_unstable();
        for &x in &c {
            seen[x as usize] = true;
        }
        out.push(c);
    }
    out
}

/// Coefficients, lowest degree first, of the polynomial whose roots are the
/// Gaussian periods of degree `e` and conductor `q`.
pub fn period_polynomial(q: u64, e: u64) -> Vec<i64> {
    let qs = q as usize;
    let mut poly: Vec<Cyc> = vec![{
        let mut one = vec![0i64; qs];
        one[0] = 1;
        one
    }];
    for c in cosets(q, e) {
        let mut eta = vec![0i64; qs];
        for &h in &c {
            eta[h as usize] += 1;
        }
        let minus_eta: Cyc = eta.iter().map(|x| -x).collect();
        // poly * (X - eta)
        let mut next: Vec<Cyc> = vec![vec![0i64; qs]; poly.len() + 1];
        for (i, coeff) in poly.iter().enumerate() {
            for t in 0..qs {
                next[i + 1][t] += coeff[t];
            }
            let prod = cyc_mul(coeff, &minus_eta, qs);
            for t in 0..qs {
                next[i][t] += prod[t];
            }
        }
        poly = next;
    }
    // a rational element of Z[zeta] is c_0 + c (1 + x + ... + x^{q-1})
    poly.iter()
        .map(|c| {
            assert!(c[1..].iter().all(|&x| x == c[1]), "coefficient is not rational");
            c[0] - c.get(1).copied().unwrap_or(0)
        })
        .collect()
}

/// Polynomial discriminant of a cubic `x^3 + a x^2 + b x + c`.
pub fn cubic_discriminant(a: i64, b: i64, c: i64) -> i64 {
    18 * a * b * c - 4 * a * a * a * c + a * a * b * b - 4 * b * b * b - 27 * c * c
}
