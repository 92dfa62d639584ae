//! Drivers behind the `capitula` binary: each command produces a
//! [`RunRecord`], one JSON object per line in the record file.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use capitula::bounds::{self, BoundReport};
use capitula::chebotarev::{self, ChebError, FieldContext, LambdaSpec, ScanStats, SearchOutcome, Witness};
use capitula::compositum::{self, CertifyOutcome, PrincipalityCertificate, RadiusSchedule, Verdict};
use capitula::cyclotomic;
use capitula::quadfield::{ClassCoords, ClassGroup, QuadIdeal, QuadraticField};
use capitula::{arith, linalg};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};
use thiserror::Error;

pub const ARTIFACT_VERSION: &str = "capitula-record/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

fn invalid(e: impl fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn cheb_error(e: ChebError) -> CliError {
    match e {
        ChebError::ImplicationViolated(_) => CliError::Internal(e.to_string()),
        other => invalid(other),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassSelector {
    /// Maximal-order element of the p-Sylow subgroup.
    Generator,
    Identity,
    Coords(Vec<u64>),
}

impl FromStr for ClassSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generator" => Ok(Self::Generator),
            "identity" => Ok(Self::Identity),
            _ => {
                let body = s.strip_prefix("coords:").unwrap_or(s);
                body.split(',')
                    .map(|t| t.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map(Self::Coords)
                    .map_err(|_| format!("class must be generator, identity or coords:a,b,..; got {s:?}"))
            }
        }
    }
}

impl fmt::Display for ClassSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Generator => write!(f, "generator"),
            Self::Identity => write!(f, "identity"),
            Self::Coords(c) => {
                let parts: Vec<String> = c.iter().map(u64::to_string).collect();
                write!(f, "coords:{}", parts.join(","))
            }
        }
    }
}

impl ClassSelector {
    pub fn resolve(&self, cl: &ClassGroup, p: u64) -> Result<ClassCoords, CliError> {
        let c = match self {
            Self::Generator => cl
                .sylow_generator(p)
                .ok_or_else(|| invalid(format!("Cl has no {p}-torsion (h = {})", cl.order)))?,
            Self::Identity => cl.identity(),
            Self::Coords(c) => {
                if !cl.is_valid(c) {
                    return Err(invalid(format!(
                        "coordinates {c:?} do not fit the structure {:?}",
                        cl.elementary_divisors
                    )));
                }
                c.clone()
            }
        };
        if !cl.in_sylow(p, &c) {
            return Err(invalid(format!("class {c:?} is not in the {p}-Sylow subgroup")));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// No prime up to the bound satisfies all six conditions.
    Exhausted,
    /// A prime was found but the enumeration did not reach a generator.
    NotFound,
    /// `n` is below the principalization threshold; nothing was attempted.
    BelowThreshold,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            _ => 1,
        }
    }
}

/// Exact principality certificate together with everything needed to
/// rebuild the order and the ideal.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub conductor: u64,
    pub subfield_degree: u64,
    /// `(a, b)` of the ideal `(a, b + w)` of `L` that was extended.
    pub ideal: (i64, i64),
    #[serde_as(as = "Vec<Vec<DisplayFromStr>>")]
    pub ideal_hnf: Vec<Vec<BigInt>>,
    #[serde_as(as = "Vec<DisplayFromStr>")]
    pub alpha: Vec<BigInt>,
    #[serde_as(as = "DisplayFromStr")]
    pub norm_alpha: BigInt,
    #[serde_as(as = "DisplayFromStr")]
    pub ideal_norm: BigInt,
    #[serde_as(as = "Vec<DisplayFromStr>")]
    pub containment: Vec<BigInt>,
    #[serde_as(as = "DisplayFromStr")]
    pub t2: BigInt,
    pub radius: f64,
    pub doublings: u32,
}

impl CertificateRecord {
    pub fn certificate(&self) -> PrincipalityCertificate {
        PrincipalityCertificate {
            alpha: self.alpha.clone(),
            norm_alpha: self.norm_alpha.clone(),
            ideal_norm: self.ideal_norm.clone(),
            containment: self.containment.clone(),
            t2: self.t2.clone(),
        }
    }
}

/// Independent check that the extended ideal is not already principal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeControl {
    pub ideal: (i64, i64),
    pub principal_in_l: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub jobs: Option<usize>,
    pub q_bound: Option<u64>,
    pub class_selector: Option<String>,
    pub schedule: Option<RadiusSchedule>,
    pub given_q: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub artifact_version: String,
    pub command: String,
    pub status: Status,
    pub d: Option<i64>,
    pub p: Option<u64>,
    pub n: Option<u32>,
    pub q: Option<u64>,
    pub class_number: Option<u64>,
    pub class_structure: Option<Vec<u64>>,
    pub target_class: Option<ClassCoords>,
    pub condition_flags: Option<[bool; 6]>,
    pub witness: Option<Witness>,
    pub scan: Option<ScanStats>,
    pub certificate: Option<CertificateRecord>,
    pub negative_control: Option<NegativeControl>,
    pub bound_report: Option<BoundReport>,
    pub flags: Vec<String>,
    pub timings_ms: BTreeMap<String, f64>,
    pub config: ConfigEcho,
}

impl RunRecord {
    fn new(command: &str, config: ConfigEcho) -> Self {
        Self {
            artifact_version: ARTIFACT_VERSION.into(),
            command: command.into(),
            status: Status::Ok,
            d: None,
            p: None,
            n: None,
            q: None,
            class_number: None,
            class_structure: None,
            target_class: None,
            condition_flags: None,
            witness: None,
            scan: None,
            certificate: None,
            negative_control: None,
            bound_report: None,
            flags: Vec::new(),
            timings_ms: BTreeMap::new(),
            config,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }

    /// Record with the timings stripped, for determinism comparisons.
    pub fn without_timings(&self) -> Self {
        Self { timings_ms: BTreeMap::new(), ..self.clone() }
    }
}

struct Timer(BTreeMap<String, f64>);

impl Timer {
    fn run<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.0.entry(phase.into()).or_insert(0.0) += t.elapsed().as_secs_f64() * 1e3;
        out
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub jobs: Option<usize>,
    pub q_bound: u64,
    pub schedule: RadiusSchedule,
}

impl Default for Settings {
    fn default() -> Self {
        Self { jobs: None, q_bound: 1_000_000, schedule: RadiusSchedule::default() }
    }
}

pub fn structure_string(divisors: &[u64]) -> String {
    if divisors.is_empty() {
        "trivial".into()
    } else {
        let parts: Vec<String> = divisors.iter().map(|d| format!("Z/{d}")).collect();
        format!("structure {}", parts.join(" x "))
    }
}

fn check_p(p: u64) -> Result<(), CliError> {
    if p < 3 || !arith::is_prime(p) {
        return Err(invalid(format!("p must be an odd prime, got {p}")));
    }
    Ok(())
}

fn check_n(n: u32) -> Result<(), CliError> {
    if n == 0 {
        return Err(invalid("n >= 1 required"));
    }
    Ok(())
}

fn context(d: i64, timer: &mut Timer) -> Result<FieldContext, CliError> {
    timer.run("class_group", || FieldContext::new(d)).map_err(invalid)
}

pub fn cmd_classgroup(d: i64, settings: &Settings) -> Result<RunRecord, CliError> {
    let mut timer = Timer(BTreeMap::new());
    let ctx = context(d, &mut timer)?;
    let mut rec = RunRecord::new("classgroup", echo(settings, None, None, false));
    rec.d = Some(d);
    rec.class_number = Some(ctx.class_group.order);
    rec.class_structure = Some(ctx.class_group.elementary_divisors.clone());
    rec.timings_ms = timer.0;
    Ok(rec)
}

fn echo(settings: &Settings, class: Option<&ClassSelector>, given_q: Option<u64>, enumerates: bool) -> ConfigEcho {
    ConfigEcho {
        jobs: settings.jobs,
        q_bound: class.map(|_| settings.q_bound),
        class_selector: class.map(ToString::to_string),
        schedule: enumerates.then_some(settings.schedule),
        given_q,
    }
}

/// Bound report for `G = Gal(L/Q)`, `[M:L] = p^n` (so `d = 0`) and the
/// quadratic unit index `r = 1`.
pub fn quadratic_bound_report(cl: &ClassGroup, p: u64, n: u32) -> Result<BoundReport, CliError> {
    let w = cl.sylow(p).w as i64;
    let delta = bounds::delta_from_phi_image(1, p).map_err(invalid)?;
    bounds::herbrand_report(2, n as i64, delta, 0, w).map_err(invalid)
}

pub fn cmd_search(d: i64, p: u64, n: u32, class: &ClassSelector, settings: &Settings) -> Result<RunRecord, CliError> {
    check_p(p)?;
    check_n(n)?;
    let mut timer = Timer(BTreeMap::new());
    let ctx = context(d, &mut timer)?;
    let target = class.resolve(&ctx.class_group, p)?;
    let mut rec = RunRecord::new("search", echo(settings, Some(class), None, false));
    fill_field(&mut rec, &ctx, p, n, &target);
    let out = timer
        .run("search", || chebotarev::find_prime(&ctx, LambdaSpec::new(p, n), &target, settings.q_bound))
        .map_err(cheb_error)?;
    apply_search(&mut rec, &out)?;
    rec.timings_ms = timer.0;
    Ok(rec)
}

fn fill_field(rec: &mut RunRecord, ctx: &FieldContext, p: u64, n: u32, target: &[u64]) {
    rec.d = Some(ctx.field.d());
    rec.p = Some(p);
    rec.n = Some(n);
    rec.class_number = Some(ctx.class_group.order);
    rec.class_structure = Some(ctx.class_group.elementary_divisors.clone());
    rec.target_class = Some(target.to_vec());
}

fn apply_search(rec: &mut RunRecord, out: &SearchOutcome) -> Result<(), CliError> {
    if out.stats().implication_violations > 0 {
        return Err(CliError::Internal("implication (4) and (5) => (2) and (3) violated".into()));
    }
    rec.scan = Some(out.stats().clone());
    match out.candidate() {
        Some(c) => {
            rec.q = Some(c.q);
            rec.condition_flags = Some(c.flags());
            rec.witness = Some(c.witness.clone());
        }
        None => rec.status = Status::Exhausted,
    }
    Ok(())
}

pub fn cmd_certify(
    d: i64,
    p: u64,
    n: u32,
    class: &ClassSelector,
    given_q: Option<u64>,
    settings: &Settings,
) -> Result<RunRecord, CliError> {
    check_p(p)?;
    check_n(n)?;
    let mut timer = Timer(BTreeMap::new());
    let ctx = context(d, &mut timer)?;
    let target = class.resolve(&ctx.class_group, p)?;
    let report = timer.run("bounds", || quadratic_bound_report(&ctx.class_group, p, n))?;
    if !report.threshold_met {
        return Err(invalid(format!(
            "n = {n} is below the principalization threshold {} for |Cl_L[{p}^oo]| = {p}^{}",
            report.igpg_exp_bound, report.w
        )));
    }
    let mut rec = RunRecord::new("certify", echo(settings, Some(class), given_q, true));
    fill_field(&mut rec, &ctx, p, n, &target);
    finish_certify(&mut rec, &ctx, LambdaSpec::new(p, n), &target, given_q, report, settings, &mut timer)?;
    rec.timings_ms = timer.0;
    Ok(rec)
}

#[allow(clippy::too_many_arguments)]
fn finish_certify(
    rec: &mut RunRecord,
    ctx: &FieldContext,
    spec: LambdaSpec,
    target: &[u64],
    given_q: Option<u64>,
    report: BoundReport,
    settings: &Settings,
    timer: &mut Timer,
) -> Result<(), CliError> {
    rec.bound_report = Some(report);
    let candidate = match given_q {
        Some(q) => {
            let c = chebotarev::check_conditions(ctx, spec, q, target).map_err(cheb_error)?;
            if !c.implication_holds() {
                return Err(CliError::Internal(format!("implication violated at q = {q}")));
            }
            if !c.all() {
                return Err(invalid(format!("q = {q} fails condition ({})", c.first_failure().unwrap_or(0))));
            }
            rec.q = Some(q);
            rec.condition_flags = Some(c.flags());
            rec.witness = Some(c.witness.clone());
            c
        }
        None => {
            let out = timer
                .run("search", || chebotarev::find_prime(ctx, spec, target, settings.q_bound))
                .map_err(cheb_error)?;
            apply_search(rec, &out)?;
            match out.candidate() {
                Some(c) => c.clone(),
                None => return Ok(()),
            }
        }
    };
    let q = candidate.q;
    let e = spec.pn();
    let field = &ctx.field;
    let b = candidate.witness.ideal_b.ok_or_else(|| CliError::Internal("split prime without ideal".into()))?;
    let ideal = QuadIdeal::new(field, q as i64, b).map_err(|e| CliError::Internal(e.to_string()))?;
    let principal_in_l = timer.run("negative_control", || field.is_principal(&ideal));
    rec.negative_control = Some(NegativeControl { ideal: (ideal.a, ideal.b), principal_in_l });
    if principal_in_l {
        rec.flags.push("already-principal".into());
    }
    let sub = timer.run("subfield", || cyclotomic::period_polynomial(q, e)).map_err(internal)?;
    timer.run("subfield", || cyclotomic::verify_subfield(&sub)).map_err(internal)?;
    let order = timer.run("compositum", || compositum::build_compositum(field, &sub)).map_err(internal)?;
    let lattice = timer.run("extend", || compositum::extend_ideal(&ideal, &order)).map_err(internal)?;
    let outcome = timer.run("enumerate", || compositum::certify_principal(&lattice, &order, settings.schedule));
    match outcome {
        CertifyOutcome::Certified { certificate, radius, doublings } => {
            let verdict = timer.run("verify", || compositum::verify_certificate(&certificate, &lattice, &order));
            if verdict != Verdict::Valid {
                return Err(CliError::Internal(format!("emitted certificate fails verification: {verdict:?}")));
            }
            rec.certificate = Some(CertificateRecord {
                conductor: q,
                subfield_degree: e,
                ideal: (ideal.a, ideal.b),
                ideal_hnf: lattice.hnf,
                alpha: certificate.alpha,
                norm_alpha: certificate.norm_alpha,
                ideal_norm: certificate.ideal_norm,
                containment: certificate.containment,
                t2: certificate.t2,
                radius,
                doublings,
            });
        }
        CertifyOutcome::NotFound { truncated, .. } => {
            rec.status = Status::NotFound;
            if truncated {
                rec.flags.push("enumeration-truncated".into());
            }
        }
    }
    Ok(())
}

fn internal(e: impl fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

/// Squarefree `d` in the range with `p | h(d)`, each with its certify record.
pub fn cmd_survey<F>(
    d_min: i64,
    d_max: i64,
    p: u64,
    n: Option<u32>,
    settings: &Settings,
    mut emit: F,
) -> Result<Vec<RunRecord>, CliError>
where
    F: FnMut(&RunRecord) -> Result<(), CliError>,
{
    check_p(p)?;
    if let Some(n) = n {
        check_n(n)?;
    }
    let mut out = Vec::new();
    let class = ClassSelector::Generator;
    for d in d_min.max(2)..=d_max {
        if !arith::is_squarefree(d as u64) {
            continue;
        }
        let mut timer = Timer(BTreeMap::new());
        let ctx = context(d, &mut timer)?;
        if ctx.class_group.order % p != 0 {
            continue;
        }
        let target = class.resolve(&ctx.class_group, p)?;
        let report0 = quadratic_bound_report(&ctx.class_group, p, 1)?;
        let need = bounds::required_n(report0.w, report0.delta, report0.d_exp).map_err(invalid)? as u32;
        let n = n.unwrap_or(need);
        let report = quadratic_bound_report(&ctx.class_group, p, n)?;
        let mut rec = RunRecord::new("survey", echo(settings, Some(&class), None, true));
        fill_field(&mut rec, &ctx, p, n, &target);
        if report.threshold_met {
            finish_certify(&mut rec, &ctx, LambdaSpec::new(p, n), &target, None, report, settings, &mut timer)?;
        } else {
            rec.bound_report = Some(report);
            rec.status = Status::BelowThreshold;
        }
        rec.timings_ms = timer.0;
        emit(&rec)?;
        out.push(rec);
    }
    Ok(out)
}

pub fn cmd_bound(g_order: i64, n: i64, delta: i64, d_exp: i64, w: i64, settings: &Settings) -> Result<RunRecord, CliError> {
    let report = bounds::herbrand_report(g_order, n, delta, d_exp, w).map_err(invalid)?;
    let mut rec = RunRecord::new("bound", echo(settings, None, None, false));
    rec.flags.push(format!("required_n={}", bounds::required_n(w, delta, d_exp).map_err(invalid)?));
    rec.bound_report = Some(report);
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReverifyError {
    #[error("record carries no certificate")]
    NoCertificate,
    #[error("record is incomplete: {0}")]
    Incomplete(&'static str),
    #[error("a certified record must have all six conditions and the threshold met")]
    Inconsistent,
    #[error("cannot rebuild the order: {0}")]
    Rebuild(String),
    #[error("recorded ideal basis differs from the recomputed one")]
    IdealMismatch,
    #[error("certificate rejected: {0:?}")]
    Rejected(Verdict),
}

/// Re-verify a certificate from the record alone.
pub fn reverify(rec: &RunRecord) -> Result<(), ReverifyError> {
    let cert = rec.certificate.as_ref().ok_or(ReverifyError::NoCertificate)?;
    let flags = rec.condition_flags.ok_or(ReverifyError::Incomplete("condition_flags"))?;
    let report = rec.bound_report.as_ref().ok_or(ReverifyError::Incomplete("bound_report"))?;
    if !flags.iter().all(|&f| f) || !report.threshold_met {
        return Err(ReverifyError::Inconsistent);
    }
    let d = rec.d.ok_or(ReverifyError::Incomplete("d"))?;
    let rebuild = |e: &dyn fmt::Display| ReverifyError::Rebuild(e.to_string());
    let field = QuadraticField::new(d).map_err(|e| rebuild(&e))?;
    let sub = cyclotomic::period_polynomial(cert.conductor, cert.subfield_degree).map_err(|e| rebuild(&e))?;
    let order = compositum::build_compositum(&field, &sub).map_err(|e| rebuild(&e))?;
    let ideal = QuadIdeal::new(&field, cert.ideal.0, cert.ideal.1).map_err(|e| rebuild(&e))?;
    let lattice = compositum::extend_ideal(&ideal, &order).map_err(|e| rebuild(&e))?;
    if lattice.hnf != cert.ideal_hnf || linalg::determinant(&lattice.hnf) != lattice.norm {
        return Err(ReverifyError::IdealMismatch);
    }
    match compositum::verify_certificate(&cert.certificate(), &lattice, &order) {
        Verdict::Valid => Ok(()),
        v => Err(ReverifyError::Rejected(v)),
    }
}

/// Append-only JSON-lines writer; the single appender for a run.
pub struct Appender {
    file: Option<std::fs::File>,
}

impl Appender {
    pub fn open(path: Option<&Path>) -> std::io::Result<Self> {
        let file = match path {
            Some(p) => Some(std::fs::OpenOptions::new().create(true).append(true).open(p)?),
            None => None,
        };
        Ok(Self { file })
    }

    pub fn append(&mut self, rec: &RunRecord) -> std::io::Result<()> {
        if let Some(f) = &mut self.file {
            writeln!(f, "{}", rec.to_json_line())?;
            f.flush()?;
        }
        Ok(())
    }
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| RunRecord::from_json_line(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors_parse() {
        assert_eq!("generator".parse::<ClassSelector>(), Ok(ClassSelector::Generator));
        assert_eq!("identity".parse::<ClassSelector>(), Ok(ClassSelector::Identity));
        assert_eq!("coords:1,0".parse::<ClassSelector>(), Ok(ClassSelector::Coords(vec![1, 0])));
        assert_eq!("2".parse::<ClassSelector>(), Ok(ClassSelector::Coords(vec![2])));
        assert!("gen".parse::<ClassSelector>().is_err());
        let c = ClassSelector::Coords(vec![1, 2]);
        assert_eq!(c.to_string().parse::<ClassSelector>(), Ok(c));
    }

    #[test]
    fn selector_resolution() {
        let cl = ClassGroup::compute(&QuadraticField::new(79).unwrap()).unwrap();
        assert_eq!(ClassSelector::Generator.resolve(&cl, 3).unwrap(), vec![1]);
        assert!(ClassSelector::Generator.resolve(&cl, 5).is_err());
        assert!(ClassSelector::Coords(vec![3]).resolve(&cl, 3).is_err());
        // Z/8 for d = 226: an element of order 2 is not in the 3-Sylow subgroup
        let cl = ClassGroup::compute(&QuadraticField::new(226).unwrap()).unwrap();
        assert!(ClassSelector::Coords(vec![4]).resolve(&cl, 3).is_err());
    }

    #[test]
    fn structure_strings() {
        assert_eq!(structure_string(&[]), "trivial");
        assert_eq!(structure_string(&[3]), "structure Z/3");
        assert_eq!(structure_string(&[2, 6]), "structure Z/2 x Z/6");
    }

    #[test]
    fn certify_record_round_trips_and_reverifies() {
        let rec = cmd_certify(79, 3, 1, &ClassSelector::Generator, None, &Settings::default()).unwrap();
        assert_eq!(rec.status, Status::Ok);
        assert_eq!(rec.q, Some(7));
        assert!(rec.flags.is_empty());
        let back = RunRecord::from_json_line(&rec.to_json_line()).unwrap();
        assert_eq!(back, rec);
        assert_eq!(reverify(&back), Ok(()));
        let mut bad = back.clone();
        bad.certificate.as_mut().unwrap().norm_alpha += 1;
        assert!(matches!(reverify(&bad), Err(ReverifyError::Rejected(_))));
        let mut bad = back.clone();
        bad.condition_flags.as_mut().unwrap()[4] = false;
        assert_eq!(reverify(&bad), Err(ReverifyError::Inconsistent));
        let mut bad = back;
        bad.certificate.as_mut().unwrap().ideal = (7, 4);
        assert!(reverify(&bad).is_err());
    }

    #[test]
    fn identity_class_is_flagged_already_principal() {
        let rec = cmd_certify(2, 3, 1, &ClassSelector::Identity, None, &Settings::default()).unwrap();
        assert!(rec.certificate.is_some());
        assert_eq!(rec.flags, vec!["already-principal".to_string()]);
        assert!(rec.negative_control.unwrap().principal_in_l);
    }

    #[test]
    fn invalid_inputs() {
        let s = Settings::default();
        assert_eq!(cmd_classgroup(12, &s).unwrap_err().exit_code(), 2);
        assert_eq!(cmd_certify(79, 3, 0, &ClassSelector::Generator, None, &s).unwrap_err().exit_code(), 2);
        assert_eq!(cmd_search(79, 5, 1, &ClassSelector::Generator, &s).unwrap_err().exit_code(), 2);
        assert_eq!(cmd_search(79, 9, 1, &ClassSelector::Generator, &s).unwrap_err().exit_code(), 2);
        // q = 11 is inert in Q(sqrt 79)
        assert_eq!(cmd_certify(79, 3, 1, &ClassSelector::Generator, Some(11), &s).unwrap_err().exit_code(), 2);
        // a field with 9 | h fails the threshold at n = 1
        let d = (2..20_000i64)
            .filter(|&d| arith::is_squarefree(d as u64))
            .find(|&d| ClassGroup::compute(&QuadraticField::new(d).unwrap()).unwrap().sylow(3).w >= 2)
            .unwrap();
        assert_eq!(cmd_certify(d, 3, 1, &ClassSelector::Generator, None, &s).unwrap_err().exit_code(), 2);
        let rec = cmd_survey(d, d, 3, Some(1), &s, |_| Ok(())).unwrap();
        assert_eq!(rec[0].status, Status::BelowThreshold);
    }

    #[test]
    fn exhausted_search() {
        let s = Settings { q_bound: 6, ..Settings::default() };
        let rec = cmd_search(79, 3, 1, &ClassSelector::Generator, &s).unwrap();
        assert_eq!(rec.status, Status::Exhausted);
        assert_eq!(rec.status.exit_code(), 1);
        assert!(rec.q.is_none());
        assert_eq!(rec.scan.unwrap().candidates, 1);
    }

    #[test]
    fn bound_record() {
        let rec = cmd_bound(2, 1, 0, 0, 2, &Settings::default()).unwrap();
        assert!(!rec.bound_report.unwrap().threshold_met);
        assert_eq!(rec.flags, vec!["required_n=2".to_string()]);
    }

    #[test]
    fn survey_membership() {
        let s = Settings::default();
        let recs = cmd_survey(70, 80, 3, None, &s, |_| Ok(())).unwrap();
        assert_eq!(recs.iter().map(|r| r.d.unwrap()).collect::<Vec<_>>(), vec![79]);
        assert!(cmd_survey(10, 2, 3, None, &s, |_| Ok(())).unwrap().is_empty());
        assert_eq!(cmd_survey(2, 10, 4, None, &s, |_| Ok(())).unwrap_err().exit_code(), 2);
    }
}
