//! Slow, independent reference computations for tests.
//!
//! Nothing here shares code with `capitula`: class numbers come from cycles
//! of reduced indefinite binary quadratic forms, fundamental units from a
//! sieved brute-force Pell search, period polynomials from expansion in
//! `Z[x]/(x^q - 1)`, and real values of periods from fixed-point series.

pub mod fixed;
pub mod forms;
pub mod pell;
pub mod periods;

/// Trial-division primality.
pub fn is_prime_naive(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

pub fn is_squarefree_naive(n: u64) -> bool {
    let mut i = 2;
    while i * i <= n {
        if n % (i * i) == 0 {
            return false;
        }
        i += 1;
    }
    n > 0
}

/// Discriminant of Q(sqrt d).
pub fn field_disc(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// Is `a` a `k`-th power modulo the prime `q`? By exhaustion.
pub fn is_kth_power_brute(a: u64, q: u64, k: u64) -> bool {
    let a = a % q;
    (1..q).any(|x| {
        let mut acc = 1u64;
        for _ in 0..k {
            acc = acc * x % q;
        }
        acc == a
    })
}

/// Multiplicative order by repeated multiplication.
pub fn order_brute(a: u64, q: u64) -> u64 {
    let a = a % q;
    let mut x = a;
    let mut k = 1;
    while x != 1 {
        x = x * a % q;
        k += 1;
    }
    k
}
