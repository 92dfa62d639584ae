use std::path::PathBuf;
use std::process::ExitCode;

use capitula::compositum::RadiusSchedule;
use capitula_cli::{
    cmd_bound, cmd_certify, cmd_classgroup, cmd_search, cmd_survey, read_records, reverify, structure_string,
    Appender, ClassSelector, CliError, RunRecord, Settings,
};
use clap::{Args, Parser, Subcommand};

/// Capitulation certificates for real quadratic fields.
///
/// Exit codes: 0 success, 1 not found or exhausted, 2 invalid input,
/// 3 internal consistency failure.
#[derive(Parser)]
#[command(name = "capitula", version)]
struct Cli {
    /// Worker threads for the prime scan (default: all cores).
    #[arg(long, global = true, env = "CAPITULA_JOBS")]
    jobs: Option<usize>,
    /// Append one JSON record per line to this file.
    #[arg(long, global = true, env = "CAPITULA_OUT")]
    out: Option<PathBuf>,
    /// Print records as JSON lines instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Instance {
    /// Squarefree d >= 2 of L = Q(sqrt d).
    #[arg(long)]
    d: i64,
    /// Odd prime p.
    #[arg(long, env = "CAPITULA_P", default_value_t = 3)]
    p: u64,
    /// Exponent n: F has degree p^n.
    #[arg(long, env = "CAPITULA_N", default_value_t = 1)]
    n: u32,
    /// Target class: generator, identity, or coords:a,b,...
    #[arg(long = "class", env = "CAPITULA_CLASS", default_value = "generator")]
    class: ClassSelector,
}

#[derive(Args, Clone, Copy)]
struct Scan {
    /// Largest prime q examined.
    #[arg(long, env = "CAPITULA_QBOUND", default_value_t = 1_000_000)]
    qbound: u64,
}

#[derive(Args, Clone, Copy)]
struct Enumeration {
    /// Initial T2 radius factor.
    #[arg(long, env = "CAPITULA_C0", default_value_t = 2.0)]
    c0: f64,
    /// Number of radius doublings before giving up.
    #[arg(long, env = "CAPITULA_MAX_DOUBLINGS", default_value_t = 12)]
    max_doublings: u32,
    /// Enumeration nodes allowed per radius.
    #[arg(long, env = "CAPITULA_NODE_BUDGET", default_value_t = 200_000_000)]
    node_budget: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Class group of Q(sqrt d).
    Classgroup {
        #[arg(long)]
        d: i64,
    },
    /// Least prime q satisfying the six conditions.
    Search {
        #[command(flatten)]
        inst: Instance,
        #[command(flatten)]
        scan: Scan,
    },
    /// Search, then certify that the class becomes principal in L F.
    Certify {
        #[command(flatten)]
        inst: Instance,
        /// Use this q instead of searching.
        #[arg(long)]
        q: Option<u64>,
        #[command(flatten)]
        scan: Scan,
        #[command(flatten)]
        enumeration: Enumeration,
    },
    /// Certify every squarefree d in a range with p | h(d).
    Survey {
        #[arg(long)]
        dmin: i64,
        #[arg(long)]
        dmax: i64,
        #[arg(long, env = "CAPITULA_P", default_value_t = 3)]
        p: u64,
        /// Fixed n; by default the least n meeting the threshold.
        #[arg(long)]
        n: Option<u32>,
        #[command(flatten)]
        scan: Scan,
        #[command(flatten)]
        enumeration: Enumeration,
    },
    /// Exponent bounds for given |G|, n, delta, d, w.
    Bound {
        #[arg(long = "g")]
        g_order: i64,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 0)]
        delta: i64,
        #[arg(long = "d-exp", default_value_t = 0)]
        d_exp: i64,
        #[arg(long)]
        w: i64,
    },
    /// Re-verify every certificate in a record file.
    Verify {
        #[arg(long)]
        records: PathBuf,
    },
}

fn settings(jobs: Option<usize>, scan: Option<Scan>, enumeration: Option<Enumeration>) -> Settings {
    let mut s = Settings { jobs, ..Settings::default() };
    if let Some(scan) = scan {
        s.q_bound = scan.qbound;
    }
    if let Some(e) = enumeration {
        s.schedule = RadiusSchedule { c0: e.c0, max_doublings: e.max_doublings, node_budget: e.node_budget };
    }
    s
}

fn flags_string(flags: &[bool; 6]) -> String {
    flags.iter().map(|&f| if f { 'T' } else { 'F' }).collect()
}

fn print_record(rec: &RunRecord) {
    match rec.command.as_str() {
        "classgroup" => {
            let h = rec.class_number.unwrap_or(0);
            println!("d = {}: h = {h}, {}", rec.d.unwrap_or(0), structure_string(rec.class_structure.as_deref().unwrap_or(&[])));
        }
        "bound" => {
            if let Some(b) = &rec.bound_report {
                println!("|G| = {}  n = {}  delta = {}  d = {}  w = {}", b.g_order, b.n, b.delta, b.d_exp, b.w);
                println!("H^0 exponent >= {}", b.h0_exp);
                println!("H^1 exponent  = {}", b.h1_exp);
                println!("I^G/P^G exponent <= {}", b.igpg_exp_bound);
                println!("threshold n >= {}: {}", b.igpg_exp_bound, if b.threshold_met { "met" } else { "not met" });
            }
            for f in &rec.flags {
                println!("{f}");
            }
        }
        _ => {
            println!(
                "d = {}  h = {}  p = {}  n = {}  class {:?}  status {:?}",
                rec.d.unwrap_or(0),
                rec.class_number.unwrap_or(0),
                rec.p.unwrap_or(0),
                rec.n.unwrap_or(0),
                rec.target_class.as_deref().unwrap_or(&[]),
                rec.status
            );
            if let (Some(q), Some(f)) = (rec.q, &rec.condition_flags) {
                println!("  q = {q}  conditions {}", flags_string(f));
            }
            if let Some(w) = &rec.witness {
                if let Some(s) = &w.symbol {
                    println!("  symbol of eps at (q, {} + w): {} (order {})", w.ideal_b.unwrap_or(0), s.value, s.order);
                }
                if let Some(m) = &w.class_match {
                    println!("  class of q_L: {:?} ({m:?})", w.class.as_deref().unwrap_or(&[]));
                }
            }
            if let Some(s) = &rec.scan {
                println!(
                    "  scanned {} primes up to {} ({} skipped); first failure by condition {:?}",
                    s.candidates, s.q_bound, s.skipped, s.failed_at
                );
            }
            if let Some(nc) = &rec.negative_control {
                println!("  principal in L: {}", nc.principal_in_l);
            }
            if let Some(c) = &rec.certificate {
                let alpha: Vec<String> = c.alpha.iter().map(ToString::to_string).collect();
                println!("  alpha = [{}]", alpha.join(", "));
                println!("  N(alpha) = {}  N(I) = {}  T2 = {}", c.norm_alpha, c.ideal_norm, c.t2);
            }
            for f in &rec.flags {
                println!("  flag: {f}");
            }
        }
    }
}

fn emit(rec: &RunRecord, json: bool, appender: &mut Appender) -> Result<(), CliError> {
    if json {
        println!("{}", rec.to_json_line());
    } else {
        print_record(rec);
    }
    appender.append(rec).map_err(|e| CliError::Internal(format!("writing records: {e}")))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let mut appender = Appender::open(cli.out.as_deref()).map_err(|e| CliError::Invalid(format!("--out: {e}")))?;
    let json = cli.json;
    let rec = match cli.command {
        Command::Classgroup { d } => cmd_classgroup(d, &settings(cli.jobs, None, None))?,
        Command::Search { inst, scan } => {
            cmd_search(inst.d, inst.p, inst.n, &inst.class, &settings(cli.jobs, Some(scan), None))?
        }
        Command::Certify { inst, q, scan, enumeration } => cmd_certify(
            inst.d,
            inst.p,
            inst.n,
            &inst.class,
            q,
            &settings(cli.jobs, Some(scan), Some(enumeration)),
        )?,
        Command::Survey { dmin, dmax, p, n, scan, enumeration } => {
            let s = settings(cli.jobs, Some(scan), Some(enumeration));
            let records = cmd_survey(dmin, dmax, p, n, &s, |r| emit(r, json, &mut appender))?;
            if !json && !records.is_empty() {
                println!();
                println!("{:>6} {:>4} {:>3} {:>9} {:>6} {:>12}", "d", "h", "n", "q", "cert", "ms");
                for r in &records {
                    let ms: f64 = r.timings_ms.values().sum();
                    println!(
                        "{:>6} {:>4} {:>3} {:>9} {:>6} {:>12.1}",
                        r.d.unwrap_or(0),
                        r.class_number.unwrap_or(0),
                        r.n.unwrap_or(0),
                        r.q.map_or("-".into(), |q| q.to_string()),
                        if r.certificate.is_some() { "yes" } else { "no" },
                        ms
                    );
                }
            }
            return Ok(0);
        }
        Command::Bound { g_order, n, delta, d_exp, w } => {
            cmd_bound(g_order, n, delta, d_exp, w, &settings(cli.jobs, None, None))?
        }
        Command::Verify { records } => {
            let recs = read_records(&records).map_err(CliError::Invalid)?;
            let mut bad = 0;
            for (i, r) in recs.iter().enumerate() {
                if r.certificate.is_none() {
                    continue;
                }
                match reverify(r) {
                    Ok(()) => println!("record {}: d = {} q = {} valid", i + 1, r.d.unwrap_or(0), r.q.unwrap_or(0)),
                    Err(e) => {
                        bad += 1;
                        println!("record {}: {e}", i + 1);
                    }
                }
            }
            return Ok(if bad == 0 { 0 } else { 3 });
        }
    };
    emit(&rec, json, &mut appender)?;
    Ok(rec.status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
