//! Search for primes `q` whose Frobenius data make a prescribed ideal class
//! of a real quadratic field capitulate in `L F`, `F` of degree `p^n` and
//! conductor `q`.
//!
//! Conditions checked for each candidate, in order:
//!
//! 1. `q != p` and `q` does not divide disc(L);
//! 2. `q = 1 (mod p^n)`, i.e. the `p^n`-th roots of unity lie in `F_q`;
//! 3. `-1` is a `p^n`-th power modulo `q`;
//! 4. `q` splits in `L`;
//! 5. Frobenius at `q_L` fixes the `p^n`-th roots of unity and the
//!    `p^n`-th power residue symbol of the fundamental unit at `q_L` has
//!    exact order `p^n / phi_scale`;
//! 6. the class of `q_L` is the target class or its inverse.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, ResidueSymbol};
use crate::cyclotomic;
use crate::quadfield::{fundamental_unit, ClassCoords, ClassGroup, FieldError, FundamentalUnit, QuadNumber, QuadraticField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChebError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("p = {0} must be an odd prime")]
    BadP(u64),
    #[error("{0} must be at least 1")]
    Exponent(&'static str),
    #[error("q = {0} is not prime")]
    NotPrime(u64),
    #[error("q = {q} rejected: {reason}")]
    Rejected { q: u64, reason: String },
    #[error("target class {0:?} is not a class of this group")]
    InvalidTarget(ClassCoords),
    #[error("target class {target:?} is not in the {p}-Sylow subgroup")]
    NotInSylow { target: ClassCoords, p: u64 },
    #[error("phi_scale {scale} must be a power of p = {p} dividing p^n")]
    BadScale { scale: u64, p: u64 },
    #[error("implication (4) and (5) => (2) and (3) violated at q = {0}")]
    ImplicationViolated(u64),
}

/// The fixed data of `L`: field, class group and fundamental unit.
#[derive(Debug, Clone)]
pub struct FieldContext {
    pub field: QuadraticField,
    pub class_group: ClassGroup,
    pub unit: FundamentalUnit,
}

impl FieldContext {
    pub fn new(d: i64) -> Result<Self, FieldError> {
        let field = QuadraticField::new(d)?;
        let class_group = ClassGroup::compute(&field)?;
        let unit = fundamental_unit(&field);
        Ok(Self { field, class_group, unit })
    }
}

/// Scaling of the unit character: the symbol of the fundamental unit must
/// have order `p^n / phi_scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaSpec {
    pub p: u64,
    pub n: u32,
    pub phi_scale: u64,
}

impl LambdaSpec {
    pub fn new(p: u64, n: u32) -> Self {
        Self { p, n, phi_scale: 1 }
    }

    pub fn pn(&self) -> u64 {
        self.p.pow(self.n)
    }

    fn validate(&self) -> Result<(), ChebError> {
        if self.p < 3 || !arith::is_prime(self.p) {
            return Err(ChebError::BadP(self.p));
        }
        if self.n == 0 {
            return Err(ChebError::Exponent("n"));
        }
        let v = arith::valuation(self.phi_scale.max(1), self.p);
        if self.phi_scale == 0 || self.p.pow(v) != self.phi_scale || v > self.n {
            return Err(ChebError::BadScale { scale: self.phi_scale, p: self.p });
        }
        Ok(())
    }

    pub fn required_order(&self) -> u64 {
        self.pn() / self.phi_scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassMatch {
    Target,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Value of sqrt(d) in the residue field of `q_L`.
    pub sqrt_d: Option<u64>,
    /// `q_L = (q, b + w)`.
    pub ideal_b: Option<i64>,
    pub symbol: Option<ResidueSymbol>,
    pub class: Option<ClassCoords>,
    pub class_match: Option<ClassMatch>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeCandidate {
    pub q: u64,
    pub p: u64,
    pub n: u32,
    pub cond1: bool,
    pub cond2: bool,
    pub cond3: bool,
    pub cond4: bool,
    pub cond5: bool,
    pub cond6: bool,
    pub witness: Witness,
    pub target_class: ClassCoords,
}

impl PrimeCandidate {
    pub fn flags(&self) -> [bool; 6] {
        [self.cond1, self.cond2, self.cond3, self.cond4, self.cond5, self.cond6]
    }

    pub fn all(&self) -> bool {
        self.flags().iter().all(|&b| b)
    }

    /// Index (1-based) of the first failing condition.
    pub fn first_failure(&self) -> Option<usize> {
        self.flags().iter().position(|&b| !b).map(|i| i + 1)
    }

    /// `(4) and (5) => (2) and (3)`.
    pub fn implication_holds(&self) -> bool {
        !(self.cond4 && self.cond5) || (self.cond2 && self.cond3)
    }
}

fn validate_target(ctx: &FieldContext, p: u64, target: &[u64]) -> Result<(), ChebError> {
    let cl = &ctx.class_group;
    if !cl.is_valid(target) {
        return Err(ChebError::InvalidTarget(target.to_vec()));
    }
    if !cl.in_sylow(p, target) {
        return Err(ChebError::NotInSylow { target: target.to_vec(), p });
    }
    Ok(())
}

/// Is `-1` a `k`-th power in `F_q^x`?
fn minus_one_is_power(q: u64, k: u64) -> bool {
    let g = num_integer::gcd(k, q - 1);
    arith::pow_mod(q - 1, (q - 1) / g, q) == 1
}

fn unit_residue(field: &QuadraticField, unit: &QuadNumber, q: u64, sqrt_d: u64) -> u64 {
    field.residue(unit, q, sqrt_d).expect("unit is integral")
}

pub fn check_conditions(
    ctx: &FieldContext,
    spec: LambdaSpec,
    q: u64,
    target: &[u64],
) -> Result<PrimeCandidate, ChebError> {
    check_conditions_with_root(ctx, spec, q, target, None)
}

/// As [`check_conditions`] with an explicit choice of the prime above `q`:
/// `root` is the value of sqrt(d) in its residue field.
pub fn check_conditions_with_root(
    ctx: &FieldContext,
    spec: LambdaSpec,
    q: u64,
    target: &[u64],
    root: Option<u64>,
) -> Result<PrimeCandidate, ChebError> {
    spec.validate()?;
    validate_target(ctx, spec.p, target)?;
    if !arith::is_prime(q) {
        return Err(ChebError::NotPrime(q));
    }
    let disc = ctx.field.disc();
    for (m, what) in [(2u64, "q = 2"), (spec.p, "condition (1): q = p")] {
        if q == m {
            return Err(ChebError::Rejected { q, reason: what.into() });
        }
    }
    if disc % q as i64 == 0 {
        return Err(ChebError::Rejected { q, reason: "condition (1): q divides disc(L)".into() });
    }
    Ok(evaluate(ctx, spec, q, target, root))
}

fn evaluate(ctx: &FieldContext, spec: LambdaSpec, q: u64, target: &[u64], root: Option<u64>) -> PrimeCandidate {
    let field = &ctx.field;
    let pn = spec.pn();
    let disc = field.disc();
    let cond1 = q != spec.p && disc % q as i64 != 0;
    let cond2 = q % pn == 1;
    let cond3 = minus_one_is_power(q, pn);
    let cond4 = arith::kronecker(disc, q as i64) == 1;
    let mut witness = Witness { sqrt_d: None, ideal_b: None, symbol: None, class: None, class_match: None };
    let mut cond5 = false;
    let mut cond6 = false;
    if cond4 {
        // q_L = (q, b + w) with sqrt(d) = -r in its residue field
        let r = arith::sqrt_mod(field.d(), q).expect("split prime");
        let sqrt_d = root.map_or((q - r) % q, |x| x % q);
        let ideal = field.prime_ideal_with_root(q, (q - sqrt_d) % q);
        witness.sqrt_d = Some(sqrt_d);
        witness.ideal_b = Some(ideal.b);
        // Frobenius of a degree-one prime acts on roots of unity by x -> x^q
        let frob_fixes_mu = q % pn == 1;
        if frob_fixes_mu {
            let eps = unit_residue(field, &ctx.unit.element(), q, sqrt_d);
            if let Ok(sym) = arith::power_residue_symbol(eps as i64, q, pn) {
                cond5 = sym.order == spec.required_order();
                witness.symbol = Some(sym);
            }
        }
        let cl = &ctx.class_group;
        let class = cl.class_of(&ideal);
        let m = if class == target {
            Some(ClassMatch::Target)
        } else if cl.inverse(&class) == target {
            Some(ClassMatch::Inverse)
        } else {
            None
        };
        cond6 = m.is_some();
        witness.class = Some(class);
        witness.class_match = m;
    }
    PrimeCandidate {
        q,
        p: spec.p,
        n: spec.n,
        cond1,
        cond2,
        cond3,
        cond4,
        cond5,
        cond6,
        witness,
        target_class: target.to_vec(),
    }
}

/// Per-condition diagnostics of a scan.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanStats {
    pub q_bound: u64,
    /// Primes examined (excluding those dividing 2 p disc).
    pub candidates: u64,
    pub skipped: u64,
    /// `failed_at[k]` candidates whose first false condition is `k + 1`.
    pub failed_at: [u64; 6],
    /// Candidates with each condition false, counted independently.
    pub failed_each: [u64; 6],
    pub implication_violations: u64,
}

impl ScanStats {
    fn record(&mut self, c: &PrimeCandidate) {
        self.candidates += 1;
        if let Some(k) = c.first_failure() {
            self.failed_at[k - 1] += 1;
        }
        for (slot, ok) in self.failed_each.iter_mut().zip(c.flags()) {
            if !ok {
                *slot += 1;
            }
        }
        if !c.implication_holds() {
            self.implication_violations += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { candidate: PrimeCandidate, stats: ScanStats },
    Exhausted { stats: ScanStats },
}

impl SearchOutcome {
    pub fn stats(&self) -> &ScanStats {
        match self {
            SearchOutcome::Found { stats, .. } | SearchOutcome::Exhausted { stats } => stats,
        }
    }

    pub fn candidate(&self) -> Option<&PrimeCandidate> {
        match self {
            SearchOutcome::Found { candidate, .. } => Some(candidate),
            SearchOutcome::Exhausted { .. } => None,
        }
    }
}

const BLOCK: u64 = 1 << 15;

/// Scan primes in increasing blocks, evaluating each block in parallel and
/// stopping at the first block containing a hit; the hit is the least one.
fn scan<F>(ctx: &FieldContext, p: u64, q_bound: u64, check: F) -> Result<(Option<PrimeCandidate>, ScanStats), ChebError>
where
    F: Fn(u64) -> PrimeCandidate + Sync,
{
    let disc = ctx.field.disc();
    let mut stats = ScanStats { q_bound, ..ScanStats::default() };
    let mut lo = 2u64;
    while lo <= q_bound {
        let hi = (lo + BLOCK - 1).min(q_bound);
        let primes = arith::primes_in_range(lo, hi);
        let (keep, skip): (Vec<u64>, Vec<u64>) =
            primes.into_iter().partition(|&q| q != 2 && q != p && disc % q as i64 != 0);
        stats.skipped += skip.len() as u64;
        let results: Vec<PrimeCandidate> = keep.par_iter().map(|&q| check(q)).collect();
        let hit = results.iter().position(PrimeCandidate::all);
        let upto = hit.map_or(results.len(), |i| i + 1);
        for c in &results[..upto] {
            stats.record(c);
            if !c.implication_holds() {
                return Err(ChebError::ImplicationViolated(c.q));
            }
        }
        if let Some(i) = hit {
            return Ok((Some(results[i].clone()), stats));
        }
        lo = hi + 1;
    }
    Ok((None, stats))
}

/// Smallest `q <= q_bound` satisfying all six conditions.
pub fn find_prime(ctx: &FieldContext, spec: LambdaSpec, target: &[u64], q_bound: u64) -> Result<SearchOutcome, ChebError> {
    spec.validate()?;
    validate_target(ctx, spec.p, target)?;
    let (hit, stats) = scan(ctx, spec.p, q_bound, |q| evaluate(ctx, spec, q, target, None))?;
    Ok(match hit {
        Some(candidate) => SearchOutcome::Found { candidate, stats },
        None => SearchOutcome::Exhausted { stats },
    })
}

/// Every candidate up to `q_bound`, for diagnostics and invariant checks.
pub fn scan_all(ctx: &FieldContext, spec: LambdaSpec, target: &[u64], q_bound: u64) -> Result<Vec<PrimeCandidate>, ChebError> {
    spec.validate()?;
    validate_target(ctx, spec.p, target)?;
    let disc = ctx.field.disc();
    Ok(arith::primes_in_range(2, q_bound)
        .into_par_iter()
        .filter(|&q| q != 2 && q != spec.p && disc % q as i64 != 0)
        .map(|q| evaluate(ctx, spec, q, target, None))
        .collect())
}

/// The conclusion drawn from an auxiliary prime: in `L' = L F_0`, with
/// `F_0` of degree `p^a` and conductor `q`, totally ramified at `q`, the
/// extended class is a `p^a`-th power.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxiliaryStatement {
    pub q: u64,
    pub p: u64,
    pub a: u32,
    /// `[F_0 : Q] = p^a`; also the power of `class(q')` equal to `c_{L'}`.
    pub power: u64,
    /// Discriminant of `F_0`, `q^(p^a - 1)`.
    pub f0_disc: num_bigint::BigInt,
    pub statement: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxiliaryPrime {
    pub q: u64,
    pub splits: bool,
    pub congruent: bool,
    pub class: ClassCoords,
    pub class_match: ClassMatch,
    pub target_class: ClassCoords,
    pub statement: AuxiliaryStatement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum AuxiliaryOutcome {
    Found(AuxiliaryPrime),
    Exhausted { q_bound: u64 },
}

/// Smallest `q <= q_bound` splitting in `L`, `q = 1 (mod 2 p^a)`, with the
/// class of `q_L` equal to the target (or its inverse).
pub fn find_auxiliary_prime(
    ctx: &FieldContext,
    p: u64,
    a: u32,
    target: &[u64],
    q_bound: u64,
) -> Result<AuxiliaryOutcome, ChebError> {
    if p < 3 || !arith::is_prime(p) {
        return Err(ChebError::BadP(p));
    }
    if a == 0 {
        return Err(ChebError::Exponent("a"));
    }
    if !ctx.class_group.is_valid(target) {
        return Err(ChebError::InvalidTarget(target.to_vec()));
    }
    let field = &ctx.field;
    let cl = &ctx.class_group;
    let modulus = 2 * p.pow(a);
    let check = |q: u64| -> Option<(ClassCoords, ClassMatch)> {
        if q % modulus != 1 || arith::kronecker(field.disc(), q as i64) != 1 {
            return None;
        }
        let class = cl.class_of(&field.prime_ideal_above(q).ok()?);
        if class == target {
            Some((class, ClassMatch::Target))
        } else if cl.inverse(&class) == target {
            Some((class, ClassMatch::Inverse))
        } else {
            None
        }
    };
    let mut lo = 3u64;
    while lo <= q_bound {
        let hi = (lo + BLOCK - 1).min(q_bound);
        let primes = arith::primes_in_range(lo, hi);
        let hit = primes.par_iter().find_map_first(|&q| check(q).map(|h| (q, h)));
        if let Some((q, (class, class_match))) = hit {
            let power = p.pow(a);
            let f0 = cyclotomic::period_polynomial(q, power).map_err(|e| ChebError::Rejected { q, reason: e.to_string() })?;
            let report = cyclotomic::verify_subfield(&f0).map_err(|e| ChebError::Rejected { q, reason: e.to_string() })?;
            let statement = format!(
                "c_L' = class(q')^{power} in Cl_L'^{power} for L' = L F_0, F_0 the degree-{power} subfield of Q(zeta_{q}), totally ramified at {q} (disc F_0 = {q}^{})",
                power - 1
            );
            return Ok(AuxiliaryOutcome::Found(AuxiliaryPrime {
                q,
                splits: true,
                congruent: true,
                class,
                class_match,
                target_class: target.to_vec(),
                statement: AuxiliaryStatement { q, p, a, power, f0_disc: report.field_disc, statement },
            }));
        }
        lo = hi + 1;
    }
    Ok(AuxiliaryOutcome::Exhausted { q_bound })
}

/// Whether the finite abelian group with the given invariants has a cyclic
/// quotient of order divisible by `c_order`.
pub fn cyclic_quotient_exponent(invariants: &[u64], c_order: u64) -> bool {
    let exponent = invariants.iter().fold(1u64, |acc, &d| num_integer::lcm(acc, d.max(1)));
    exponent % c_order == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx79() -> FieldContext {
        FieldContext::new(79).unwrap()
    }

    #[test]
    fn flagship_q13() {
        let ctx = ctx79();
        let g = ctx.class_group.sylow_generator(3).unwrap();
        let c = check_conditions(&ctx, LambdaSpec::new(3, 1), 13, &g).unwrap();
        assert!(c.cond1 && c.cond2 && c.cond3 && c.cond4 && c.cond5);
        let sym = c.witness.symbol.unwrap();
        assert_eq!(sym.order, 3);
        // q_L = (13, 1 + sqrt 79): sqrt 79 = -1, eps = 80 - 9 = 6
        assert_eq!(c.witness.ideal_b, Some(1));
        assert_eq!(sym.base, 6);
        assert_eq!(sym.value, 9);
        // the other prime gives the inverse symbol and the same flags
        let c2 = check_conditions_with_root(&ctx, LambdaSpec::new(3, 1), 13, &g, Some(1)).unwrap();
        assert_eq!(c2.witness.symbol.unwrap().value, 3);
        assert_eq!(c.flags(), c2.flags());
    }

    #[test]
    fn failing_conditions() {
        let ctx = ctx79();
        let g = ctx.class_group.sylow_generator(3).unwrap();
        let c = check_conditions(&ctx, LambdaSpec::new(3, 1), 11, &g).unwrap();
        assert!(!c.cond4);
        let c = check_conditions(&ctx, LambdaSpec::new(3, 2), 13, &g).unwrap();
        assert!(!c.cond2 && !c.cond5);
        assert!(matches!(check_conditions(&ctx, LambdaSpec::new(3, 1), 79, &g), Err(ChebError::Rejected { .. })));
        assert!(matches!(check_conditions(&ctx, LambdaSpec::new(3, 1), 3, &g), Err(ChebError::Rejected { .. })));
    }

    #[test]
    fn search_79() {
        let ctx = ctx79();
        let g = ctx.class_group.sylow_generator(3).unwrap();
        let out = find_prime(&ctx, LambdaSpec::new(3, 1), &g, 100_000).unwrap();
        let c = out.candidate().unwrap().clone();
        assert!(c.all());
        // every smaller candidate fails somewhere
        let all = scan_all(&ctx, LambdaSpec::new(3, 1), &g, c.q - 1).unwrap();
        assert!(all.iter().all(|x| !x.all()));
        assert_eq!(out.stats().candidates as usize, all.len() + 1);
        // (7, 3 + w) already qualifies, in the inverse class
        assert_eq!(c.q, 7);
        assert_eq!(c.witness.class_match, Some(ClassMatch::Inverse));
        let SearchOutcome::Exhausted { stats } = find_prime(&ctx, LambdaSpec::new(3, 1), &g, 6).unwrap() else {
            panic!("hit below 7")
        };
        assert_eq!((stats.candidates, stats.skipped), (1, 2));
        assert!(matches!(find_prime(&ctx, LambdaSpec::new(5, 1), &g, 1000), Err(ChebError::NotInSylow { .. })));
    }

    #[test]
    fn trivial_class_group() {
        let ctx = FieldContext::new(2).unwrap();
        let id = ctx.class_group.identity();
        let c = find_prime(&ctx, LambdaSpec::new(3, 1), &id, 10_000).unwrap().candidate().cloned().unwrap();
        assert_eq!(c.q % 3, 1);
        assert_eq!(arith::kronecker(8, c.q as i64), 1);
        assert_eq!(c.witness.symbol.unwrap().order, 3);
    }

    #[test]
    fn auxiliary() {
        let ctx = ctx79();
        let g = ctx.class_group.sylow_generator(3).unwrap();
        let AuxiliaryOutcome::Found(a) = find_auxiliary_prime(&ctx, 3, 1, &g, 100_000).unwrap() else {
            panic!("no auxiliary prime")
        };
        assert_eq!(a.q % 6, 1);
        assert_eq!(a.statement.power, 3);
        let id = ctx.class_group.identity();
        let AuxiliaryOutcome::Found(b) = find_auxiliary_prime(&ctx, 3, 1, &id, 100_000).unwrap() else {
            panic!("no auxiliary prime")
        };
        assert!(ctx.field.is_principal(&ctx.field.prime_ideal_above(b.q).unwrap()));
        assert_eq!(find_auxiliary_prime(&ctx, 3, 0, &g, 100), Err(ChebError::Exponent("a")));
    }

    #[test]
    fn cyclic_quotients() {
        assert!(cyclic_quotient_exponent(&[3, 9], 9));
        assert!(!cyclic_quotient_exponent(&[3, 3], 9));
        assert!(cyclic_quotient_exponent(&[12], 4));
    }

    #[test]
    fn scale_validation() {
        let ctx = ctx79();
        let g = ctx.class_group.sylow_generator(3).unwrap();
        let bad = LambdaSpec { p: 3, n: 1, phi_scale: 2 };
        assert!(matches!(check_conditions(&ctx, bad, 13, &g), Err(ChebError::BadScale { .. })));
        let bad = LambdaSpec { p: 3, n: 1, phi_scale: 9 };
        assert!(matches!(check_conditions(&ctx, bad, 13, &g), Err(ChebError::BadScale { .. })));
    }
}
