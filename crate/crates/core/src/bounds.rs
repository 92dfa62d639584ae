//! Exponent bookkeeping for the cohomological principalization bound.
//!
//! All quantities are exponents of `p`: `|H^0(E_M)| >= p^h0`,
//! `|H^1(E_M)| = p^h1`, and `|I_M^G / P_M^G| <= p^igpg` on the `p`-part.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("{name} must be nonnegative, got {value}")]
    Negative { name: &'static str, value: i64 },
    #[error("group order must be at least 2, got {0}")]
    GroupTooSmall(i64),
    #[error("ramification exponent n must be at least 1, got {0}")]
    NTooSmall(i64),
    #[error("index must be positive, got {0}")]
    BadIndex(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub g_order: i64,
    pub n: i64,
    pub delta: i64,
    pub d_exp: i64,
    pub w: i64,
    pub h0_exp: i64,
    pub h1_exp: i64,
    pub igpg_exp_bound: i64,
    pub threshold_met: bool,
}

fn nonneg(name: &'static str, value: i64) -> Result<(), BoundsError> {
    if value < 0 {
        Err(BoundsError::Negative { name, value })
    } else {
        Ok(())
    }
}

pub fn herbrand_report(g_order: i64, n: i64, delta: i64, d_exp: i64, w: i64) -> Result<BoundReport, BoundsError> {
    nonneg("G_order", g_order)?;
    nonneg("n", n)?;
    nonneg("delta", delta)?;
    nonneg("d_exp", d_exp)?;
    nonneg("w", w)?;
    if g_order < 2 {
        return Err(BoundsError::GroupTooSmall(g_order));
    }
    if n < 1 {
        return Err(BoundsError::NTooSmall(n));
    }
    let h0_exp = n * (g_order - 1) - delta;
    // Herbrand quotient of the units is p^-(n+d)
    let h1_exp = h0_exp + n + d_exp;
    debug_assert_eq!(h1_exp, n * g_order + d_exp - delta);
    let igpg_exp_bound = w + delta - d_exp;
    Ok(BoundReport {
        g_order,
        n,
        delta,
        d_exp,
        w,
        h0_exp,
        h1_exp,
        igpg_exp_bound,
        threshold_met: n >= igpg_exp_bound,
    })
}

/// `v_p(r)` for the index `r` of the image of the unit map.
pub fn delta_from_phi_image(index_r: u64, p: u64) -> Result<i64, BoundsError> {
    if index_r == 0 {
        return Err(BoundsError::BadIndex(index_r));
    }
    if !crate::arith::is_prime(p) {
        return Err(BoundsError::NotPrime(p));
    }
    Ok(crate::arith::valuation(index_r, p) as i64)
}

/// Least `n >= 1` with `n >= w + delta - d_exp`.
pub fn required_n(w: i64, delta: i64, d_exp: i64) -> Result<i64, BoundsError> {
    nonneg("w", w)?;
    nonneg("delta", delta)?;
    nonneg("d_exp", d_exp)?;
    Ok((w + delta - d_exp).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r = herbrand_report(2, 1, 0, 0, 1).unwrap();
        assert_eq!((r.h0_exp, r.h1_exp, r.igpg_exp_bound, r.threshold_met), (1, 2, 1, true));
        assert!(!herbrand_report(2, 1, 0, 0, 2).unwrap().threshold_met);
        let r = herbrand_report(6, 2, 1, 0, 1).unwrap();
        assert_eq!((r.h0_exp, r.h1_exp, r.threshold_met), (9, 11, true));
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(herbrand_report(2, 1, -1, 0, 0), Err(BoundsError::Negative { name: "delta", value: -1 }));
        assert_eq!(herbrand_report(1, 1, 0, 0, 0), Err(BoundsError::GroupTooSmall(1)));
        assert_eq!(herbrand_report(2, 0, 0, 0, 0), Err(BoundsError::NTooSmall(0)));
        assert!(required_n(-1, 0, 0).is_err());
        assert!(delta_from_phi_image(0, 3).is_err());
        assert!(delta_from_phi_image(3, 4).is_err());
    }

    #[test]
    fn delta_and_required_n() {
        assert_eq!(delta_from_phi_image(1, 3), Ok(0));
        assert_eq!(delta_from_phi_image(9, 3), Ok(2));
        assert_eq!(delta_from_phi_image(12, 3), Ok(1));
        assert_eq!(required_n(1, 0, 0), Ok(1));
        assert_eq!(required_n(2, 0, 0), Ok(2));
        assert_eq!(required_n(0, 0, 3), Ok(1));
    }
}
