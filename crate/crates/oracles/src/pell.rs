//! Least solution of `u^2 - d v^2 = +-k` by exhaustive search over `v`,
//! with `k = 4` for `d = 1 (mod 4)` and `k = 1` otherwise.
//!
//! A residue wheel modulo 64*63*65 and bitmask tables for a few more
//! primes discard almost every `v` before the square-root test.

fn isqrt128(n: u128) -> u128 {
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn square_table(m: u64) -> Vec<bool> {
    let mut t = vec![false; m as usize];
    for x in 0..m {
        t[(x * x % m) as usize] = true;
    }
    t
}

/// `allowed[v mod m]`: could `d v^2 + s k` be a square mod `m` for s = +-1.
fn allowed(d: u64, k: u64, m: u64) -> Vec<bool> {
    let sq = square_table(m);
    (0..m)
        .map(|v| {
            let base = d % m * (v * v % m) % m;
            sq[((base + k) % m) as usize] || sq[((base + m * 4 - k % m) % m) as usize]
        })
        .collect()
}

/// Minimal unit `(u + v sqrt d) / 2` as the doubled coordinates `(u, v)`
/// with its norm. Searches `v` up to `v_max`.
pub fn fundamental_unit(d: u64, v_max: u64) -> Option<(u128, u128, i32)> {
    let k: u64 = if d % 4 == 1 { 4 } else { 1 };
    let wheel_m: u64 = 64 * 63 * 65;
    let wheel = allowed(d, k, wheel_m);
    let wheel_res: Vec<u64> = (0..wheel_m).filter(|&v| wheel[v as usize]).collect();
    let extra: Vec<(u64, Vec<bool>)> = [11u64, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53]
        .iter()
        .map(|&m| (m, allowed(d, k, m)))
        .collect();
    let test = |v: u64| -> Option<(u128, i32)> {
        if extra.iter().any(|(m, t)| !t[(v % m) as usize]) {
            return None;
        }
        let dv2 = d as u128 * v as u128 * v as u128;
        // minus sign first: the norm -1 unit is the smaller one
        for (n, sign) in [(dv2.checked_sub(k as u128), -1), (Some(dv2 + k as u128), 1)] {
            if let Some(n) = n {
                let r = isqrt128(n);
                if r * r == n && (r > 0 || sign == 1) {
                    return Some((r, sign));
                }
            }
        }
        None
    };
    let mut block = 0u64;
    loop {
        for &r in &wheel_res {
            let v = block * wheel_m + r;
            if v == 0 {
                continue;
            }
            if v > v_max {
                return None;
            }
            if let Some((u, sign)) = test(v) {
                let scale = if k == 1 { 2 } else { 1 };
                return Some((u * scale, v as u128 * scale, sign));
            }
        }
        block += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_units() {
        assert_eq!(fundamental_unit(2, 1000), Some((2, 2, -1)));
        assert_eq!(fundamental_unit(5, 1000), Some((1, 1, -1)));
        assert_eq!(fundamental_unit(3, 1000), Some((4, 2, 1)));
        assert_eq!(fundamental_unit(79, 1000), Some((160, 18, 1)));
        assert_eq!(fundamental_unit(13, 1000), Some((3, 1, -1)));
    }
}
