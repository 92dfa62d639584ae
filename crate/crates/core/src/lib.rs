//! Exact arithmetic for capitulation of ideal classes of real quadratic
//! fields in real cyclotomic compositums.
//!
//! The pipeline: pick a prime `q` satisfying the six splitting conditions
//! ([`chebotarev`]), build the degree-`p^n` subfield `F` of `Q(zeta_q)`
//! ([`cyclotomic`]), form the order of `M = L F` ([`compositum`]), and find
//! an explicit generator of the extended prime ideal.

pub mod arith;
pub mod bounds;
pub mod chebotarev;
pub mod compositum;
pub mod cyclotomic;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod quadfield;
