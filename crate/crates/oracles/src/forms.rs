//! Indefinite binary quadratic forms `(a, b, c)`, `b^2 - 4ac = D > 0`.

use std::collections::{HashMap, HashSet};

pub type Form = (i64, i64, i64);

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Gauss-reduced: `0 < b < sqrt D` and `sqrt D - b < 2|a| < sqrt D + b`.
pub fn is_reduced(disc: i64, f: Form) -> bool {
    let (a, b, _) = f;
    let two_a = 2 * a.abs();
    b > 0 && b * b < disc && (two_a + b) * (two_a + b) > disc && (two_a - b < 0 || (two_a - b) * (two_a - b) < disc)
}

/// All reduced forms of discriminant `disc`.
pub fn reduced_forms(disc: i64) -> Vec<Form> {
    let s = isqrt(disc);
    let mut out = Vec::new();
    let mut b = if disc % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let ac = (b * b - disc) / 4;
        let m = -ac;
        for a in 1..=m {
            if m % a != 0 {
                continue;
            }
            for sa in [a, -a] {
                let f = (sa, b, ac / sa);
                if is_reduced(disc, f) {
                    out.push(f);
                }
            }
        }
        b += 2;
    }
    out
}

/// One reduction step `(a, b, c) -> (c, b', *)`, `b' = -b mod 2c`.
pub fn rho(disc: i64, f: Form) -> Form {
    let (_, b, c) = f;
    let s = isqrt(disc);
    let m = 2 * c.abs();
    let lo = if c.abs() <= s { s - m + 1 } else { -c.abs() + 1 };
    let mut nb = (-b).rem_euclid(m) + lo.div_euclid(m) * m;
    while nb < lo {
        nb += m;
    }
    while nb >= lo + m {
        nb -= m;
    }
    (c, nb, (nb * nb - disc) / (4 * c))
}

/// Reduce an arbitrary form of discriminant `disc`.
pub fn reduce(disc: i64, mut f: Form) -> Form {
    let mut guard = 0;
    while !is_reduced(disc, f) {
        f = rho(disc, f);
        guard += 1;
        assert!(guard < 100_000, "form reduction did not terminate");
    }
    f
}

pub fn cycle(disc: i64, f: Form) -> Vec<Form> {
    let mut out = vec![f];
    let mut g = rho(disc, f);
    while g != f {
        out.push(g);
        g = rho(disc, g);
    }
    out
}

/// `(wide class number, narrow class number)`: narrow classes are cycles
/// of reduced forms; wide classes identify the cycles of `f` and `-f`.
pub fn class_numbers(disc: i64) -> (u64, u64) {
    let forms = reduced_forms(disc);
    let mut cycle_id: HashMap<Form, usize> = HashMap::new();
    let mut ncycles = 0;
    for &f in &forms {
        if cycle_id.contains_key(&f) {
            continue;
        }
        for g in cycle(disc, f) {
            cycle_id.insert(g, ncycles);
        }
        ncycles += 1;
    }
    let mut wide: HashSet<(usize, usize)> = HashSet::new();
    for &(a, b, c) in &forms {
        let x = cycle_id[&(a, b, c)];
        let y = cycle_id[&(-a, b, -c)];
        wide.insert((x.min(y), x.max(y)));
    }
    (wide.len() as u64, ncycles as u64)
}

/// Is the ideal `[a, (-b + sqrt D)/2]` (`a > 0`, `b^2 = D mod 4a`)
/// principal in the wide sense?
pub fn ideal_is_principal(disc: i64, a: i64, b: i64) -> bool {
    let c = (b * b - disc) / (4 * a);
    assert_eq!(b * b - 4 * a * c, disc, "not an ideal");
    let r = reduce(disc, (a, b, c));
    cycle(disc, r).iter().any(|f| f.0.abs() == 1)
}
