//! Command implementations behind the `cantorcf` binary.
//!
//! Exit statuses: 0 success, 1 verification failure, 2 usage error,
//! 3 budget exhausted.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::build::{run, ConstructionParams, Mode, DEFAULT_MAX_BITS};
use crate::certificate::{parse_epsilon, CertError, Certificate, Status};
use crate::psi::Psi;
use crate::verify::{
    abbreviate, euclid_convergents, guaranteed_digits, verify_all, CheckKind, VerificationReport, VerifyOptions,
    DEFAULT_MEMBERSHIP_DIGITS,
};
use crate::words::{digit_char, ratio, DigitPair};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Certificate(#[from] CertError),
    #[error("construction failed: {0}")]
    Build(#[from] crate::build::BuildError),
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Certificate(CertError::Io { .. }) => EXIT_USAGE,
            CliError::Certificate(_) | CliError::Build(_) => EXIT_FAIL,
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "cantorcf",
    version,
    about = "Numbers in missing-digit Cantor sets with convergents in the set"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the construction and write a certificate.
    Construct(ConstructArgs),
    /// Check a certificate.
    Verify(VerifyArgs),
    /// Print the certified digit prefix of the limit.
    Expand(ExpandArgs),
    /// Continued fraction and convergents of p/q.
    Cf(CfArgs),
    /// Construct and verify the two worked base-3 examples.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub base: u32,
    /// Comma-separated digit set D, e.g. `0,2`.
    #[arg(long)]
    pub digits: String,
    /// Construction digits `d1,d2` (default: 0,1 if available, else the two smallest).
    #[arg(long)]
    pub pair: Option<String>,
    #[arg(long, default_value = "1")]
    pub psi: String,
    /// Positive rational `a/b` or integer.
    #[arg(long, default_value = "1")]
    pub epsilon: String,
    #[arg(long, default_value_t = Mode::Strict)]
    pub mode: Mode,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_BITS)]
    pub max_bits: u64,
    /// Output path; `.gz` compresses.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub cert: PathBuf,
    /// Comma-separated check names (default: all).
    #[arg(long)]
    pub checks: Option<String>,
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value_t = DEFAULT_MEMBERSHIP_DIGITS)]
    pub digit_budget: usize,
    #[arg(long, default_value_t = crate::psi::MAX_LOG_PRECISION)]
    pub max_precision: u32,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    pub cert: PathBuf,
    /// Number of digits to print.
    #[arg(long, short = 'k')]
    pub digits: u64,
}

#[derive(Debug, Args)]
pub struct CfArgs {
    /// Certificate to take p_i/q_i from (with --index).
    pub cert: Option<PathBuf>,
    #[arg(long)]
    pub index: Option<usize>,
    #[arg(long)]
    pub p: Option<BigUint>,
    #[arg(long)]
    pub q: Option<BigUint>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Run only the example with this digit set (`0,1` or `0,2`).
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long)]
    pub json: bool,
}

pub fn parse_digit_list(s: &str) -> Result<Vec<u8>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u8>()
                .map_err(|_| usage(format!("bad digit {t:?} in {s:?}")))
        })
        .collect()
}

fn parse_pair(s: &str) -> Result<(u8, u8), CliError> {
    match parse_digit_list(s)?[..] {
        [a, b] => Ok((a, b)),
        _ => Err(usage(format!("pair must be two digits, got {s:?}"))),
    }
}

fn read_cert(path: &Path) -> Result<Certificate, CliError> {
    Ok(Certificate::read_from(path)?)
}

fn print_summary(cert: &Certificate, out: &mut dyn Write) -> std::io::Result<()> {
    let pair = &cert.pair;
    let digits: Vec<String> = pair.digits().iter().map(|d| d.to_string()).collect();
    writeln!(
        out,
        "base {}, D = {{{}}}, pair ({}, {}), mode {}, Ψ = {}, ε = {}",
        pair.base(),
        digits.join(","),
        pair.d1(),
        pair.d2(),
        cert.mode,
        cert.psi.source(),
        crate::certificate::format_epsilon(&cert.epsilon)
    )?;
    writeln!(
        out,
        "m1 = {}, N = {}, u = {} = {}·{}, q0 = {}, c1 = {}",
        cert.m1,
        cert.n,
        cert.u,
        cert.u1,
        cert.u2,
        abbreviate(&cert.q0),
        abbreviate(&cert.c1)
    )?;
    writeln!(out, "{:>3} {:>12} {:>14} {:>6}  q", "i", "m", "N", "sigma")?;
    for s in &cert.steps {
        writeln!(
            out,
            "{:>3} {:>12} {:>14} {:>6}  {}",
            s.i,
            s.m,
            s.n,
            format!("{:+}", s.sigma),
            abbreviate(&s.q)
        )?;
    }
    writeln!(out, "status: {}", cert.status)
}

pub fn cmd_construct(args: &ConstructArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let digits = parse_digit_list(&args.digits)?;
    let pair = args.pair.as_deref().map(parse_pair).transpose()?;
    let pair = DigitPair::new(args.base, &digits, pair).map_err(usage)?;
    let psi = Psi::parse(&args.psi).map_err(|e| usage(format!("Ψ: {e}")))?;
    let epsilon = parse_epsilon(&args.epsilon).map_err(usage)?;
    let params = ConstructionParams::new(pair, psi, epsilon, args.mode, args.depth, args.max_bits)
        .map_err(|e| usage(e.to_string()))?;
    let started = Instant::now();
    let cert = run(params)?;
    cert.write_to(&args.out)?;
    print_summary(&cert, out)?;
    writeln!(out, "wrote {} in {:.2?}", args.out.display(), started.elapsed())?;
    Ok(match cert.status {
        Status::Complete => EXIT_OK,
        Status::BudgetExhausted { .. } => EXIT_BUDGET,
    })
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let checks = match &args.checks {
        None => None,
        Some(list) => Some(
            list.split(',')
                .map(|t| t.trim().parse::<CheckKind>().map_err(usage))
                .collect::<Result<BTreeSet<_>, _>>()?,
        ),
    };
    let cert = read_cert(&args.cert)?;
    let opts = VerifyOptions {
        membership_digits: args.digit_budget,
        max_precision: args.max_precision,
        checks,
    };
    let report = verify_all(&cert, &opts);
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &JsonReport::new(&report)).map_err(std::io::Error::from)?;
        writeln!(out)?;
    } else {
        writeln!(out, "{report}")?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct JsonReport<'a> {
    passed: bool,
    #[serde(flatten)]
    report: &'a VerificationReport,
}

impl<'a> JsonReport<'a> {
    fn new(report: &'a VerificationReport) -> Self {
        JsonReport {
            passed: report.passed(),
            report,
        }
    }
}

pub fn cmd_expand(args: &ExpandArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    let cert = read_cert(&args.cert)?;
    let (guaranteed, digits) = guaranteed_digits(&cert);
    let k = args.digits.min(guaranteed);
    let text: String = digits.take(k as usize).map(digit_char).collect();
    writeln!(out, "{text}")?;
    if args.digits > guaranteed {
        writeln!(
            err,
            "note: only the first {guaranteed} digits are certified (m1 + N_{})",
            cert.steps.len()
        )?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_cf(args: &CfArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let (p, q) = match (&args.cert, args.index, &args.p, &args.q) {
        (Some(path), Some(i), None, None) => {
            let cert = read_cert(path)?;
            let s = cert
                .steps
                .get(i.wrapping_sub(1))
                .ok_or_else(|| usage(format!("index {i} out of range 1..={}", cert.steps.len())))?;
            (s.p.clone(), s.q.clone())
        }
        (None, None, Some(p), Some(q)) => (p.clone(), q.clone()),
        _ => return Err(usage("give either --p and --q, or a certificate with --index")),
    };
    if q.is_zero() || p >= q {
        return Err(usage("need 0 <= p < q"));
    }
    if !p.gcd(&q).is_one() {
        return Err(usage("p/q must be in lowest terms"));
    }
    let cf = euclid_convergents(&p, &q);
    writeln!(out, "{}", cf.quotients_string())?;
    let convs: Vec<String> = cf.convergents.iter().map(|(a, b)| format!("{}/{}", abbreviate(a), abbreviate(b))).collect();
    writeln!(out, "{}", convs.join(", "))?;
    Ok(EXIT_OK)
}

/// What each check establishes, in words.
pub fn check_description(kind: CheckKind) -> &'static str {
    match kind {
        CheckKind::Initial => "m1 from the totient choice; u = u1·u2; u2·q1 = b^(m1+1) − 1; q0 = b^m1/u1",
        CheckKind::Conditions => "m2 in its residue class mod q1, q_i | m_(i+1), alternating signs, N-law",
        CheckKind::Selection => "each m_i is the least admissible value with gap below Ψ(q_(i−1))",
        CheckKind::Identity => "b^m1(b^N_i − 1) = u·q_(i−1)·q_i: consecutive fractions are neighbours",
        CheckKind::Determinant => "p_(i+1)q_i − q_(i+1)p_i = ±1",
        CheckKind::Convergents => "Euclid on the deepest fraction returns every p_i/q_i as a convergent",
        CheckKind::Membership => "p_i/q_i = (0.v w̄_i)_b with digits from the pair",
        CheckKind::MembershipDigits => "long division reproduces v w_i w_i digit by digit",
        CheckKind::Gap => "|Δ_i| = 1/(q_i q_(i+1)) < Ψ(q_i) and the alternating-tail sandwich",
        CheckKind::Growth => "b^(m_i N_(i−1)) <= q_i < b^N_i",
        CheckKind::TheoremUpper => "|ξ − p_i/q_i| < min(Ψ(q_i), q_i^(−q_i))",
        CheckKind::TheoremLower => "|ξ − p_i/q_i| > Ψ(q_i)·q_i^(−(1+ε)q_i) from the threshold index on",
    }
}

/// The two worked configurations: `{0,1}` relaxed to depth 3 and the
/// middle-third set `{0,2}` strict to depth 2.
pub fn golden_params(digits: &[u8]) -> Option<ConstructionParams> {
    let (mode, depth) = match digits {
        [0, 1] => (Mode::Relaxed, 3),
        [0, 2] => (Mode::Strict, 2),
        _ => return None,
    };
    ConstructionParams::new(
        DigitPair::new(3, digits, None).ok()?,
        Psi::parse("1").ok()?,
        ratio(1, 1),
        mode,
        depth,
        DEFAULT_MAX_BITS,
    )
    .ok()
}

#[derive(Serialize)]
struct DemoRun {
    digits: Vec<u8>,
    mode: Mode,
    status: String,
    m: Vec<u64>,
    q_digits: Vec<usize>,
    seconds: f64,
    passed: bool,
    report: VerificationReport,
}

pub fn cmd_demo(args: &DemoArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let sets: Vec<Vec<u8>> = match &args.only {
        Some(s) => vec![parse_digit_list(s)?],
        None => vec![vec![0, 1], vec![0, 2]],
    };
    let mut runs = Vec::new();
    for digits in sets {
        let params =
            golden_params(&digits).ok_or_else(|| usage(format!("no demo for D = {digits:?} (choose 0,1 or 0,2)")))?;
        let started = Instant::now();
        let cert = run(params)?;
        let report = verify_all(&cert, &VerifyOptions::default());
        let seconds = started.elapsed().as_secs_f64();
        if !args.json {
            writeln!(out, "== base 3, D = {digits:?} ==")?;
            print_summary(&cert, out)?;
            for kind in CheckKind::ALL {
                let rows: Vec<_> = report.reports.iter().filter(|r| r.check == kind).collect();
                let shown: Vec<String> = rows.iter().map(|r| format!("{} {}", r.scope, r.verdict)).collect();
                writeln!(out, "{:<18} {}", kind.name(), check_description(kind))?;
                writeln!(out, "{:<18} {}", "", shown.join(" | "))?;
            }
            match report.lower_bound_threshold {
                Some(t) => writeln!(out, "lower bound holds from i = {t} on")?,
                None => writeln!(out, "lower bound: no index reached (informational)")?,
            }
            writeln!(
                out,
                "overall {} in {seconds:.2}s\n",
                if report.passed() { "PASS" } else { "FAIL" }
            )?;
        }
        runs.push(DemoRun {
            digits,
            mode: cert.mode,
            status: cert.status.to_string(),
            m: cert.steps.iter().map(|s| s.m).collect(),
            q_digits: cert.steps.iter().map(|s| s.q.to_string().len()).collect(),
            seconds,
            passed: report.passed(),
            report,
        });
    }
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &runs).map_err(std::io::Error::from)?;
        writeln!(out)?;
    }
    Ok(if runs.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

pub fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    match command {
        Command::Construct(a) => cmd_construct(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Expand(a) => cmd_expand(a, out, err),
        Command::Cf(a) => cmd_cf(a, out),
        Command::Demo(a) => cmd_demo(a, out),
    }
}
