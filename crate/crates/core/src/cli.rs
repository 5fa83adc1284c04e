//! Command-line front end. Exit codes: 0 success, 2 usage or domain error,
//! 3 numeric or kernel failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::kernel::KernelSpec;
use crate::pairings::{enumerate, EnumerationCaps, PairingClass};
use crate::polynomial::WeightPoly;
use crate::qcatalan::{bk_recurrence, consistency_report, phi_degree, phi_recurrence, ConsistencyReport};
use crate::rmt_sim::{estimate_product, limit_reference, variance_decay_probe, RmtConfig, SimulationReport};
use crate::scalar_moments::{growth_curve, moment_dp, pc_bracket, Backend, ExactOptions, MomentValue};
use crate::selfcheck;

#[derive(Parser, Debug)]
#[command(
    name = "qpairings",
    version,
    about = "Weighted pairing moments, q-Catalan tables and correlated GOE simulation"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    All,
    Nc,
}

impl From<ClassArg> for PairingClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::All => PairingClass::All,
            ClassArg::Nc => PairingClass::NonCrossing,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Probe {
    Odd,
    Variance,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stream every pairing of 2k points with its weight exponent.
    Enumerate(EnumerateArgs),
    /// Non-crossing moment polynomials B_k(p), k = 0..=k_max.
    Bk(TableArgs),
    /// The phi_k(x) family, k = 0..=k_max.
    Phi(TableArgs),
    /// Coefficient-reversed phi_k (q-Catalan form), k = 1..=k_max.
    Qrev(TableArgs),
    /// One pairing moment at weight p via the arc dynamic program.
    Moment(MomentArgs),
    /// Growth rate (1/k) ln S_k(p) over a grid, with extrapolation.
    Growth(GrowthArgs),
    /// Bracket the weight where the extrapolated growth rate changes sign.
    Pc(PcArgs),
    /// Monte Carlo estimate of E (1/N) Tr(A^(1) ... A^(2k)).
    Simulate(SimulateArgs),
    /// Run the oracle-equivalence checks and print a pass/fail table.
    Selfcheck,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = ClassArg::All)]
    pub class: ClassArg,
    /// Largest k enumerated for all pairings.
    #[arg(long, default_value_t = EnumerationCaps::default().all)]
    pub cap_all: usize,
    /// Largest k enumerated for non-crossing pairings.
    #[arg(long, default_value_t = EnumerationCaps::default().non_crossing)]
    pub cap_nc: usize,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long)]
    pub k_max: usize,
    /// Largest accepted k_max.
    #[arg(long, default_value_t = 200)]
    pub k_cap: usize,
}

#[derive(Args, Debug)]
pub struct MomentArgs {
    #[arg(long)]
    pub k: usize,
    /// Weight, as a decimal (0.25) or a fraction (1/4).
    #[arg(long)]
    pub p: String,
    #[arg(long, value_enum, default_value_t = ClassArg::All)]
    pub class: ClassArg,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    pub backend: BackendArg,
    /// Permit p > 1 with the exact backend.
    #[arg(long)]
    pub allow_p_above_one: bool,
    /// Largest k for the exact backend.
    #[arg(long, default_value_t = 1000)]
    pub max_k_exact: usize,
    /// Largest k for the log-space backend.
    #[arg(long, default_value_t = 100_000)]
    pub max_k: usize,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    /// Comma-separated weights.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    /// Comma-separated, strictly ascending k values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ClassArg::All)]
    pub class: ClassArg,
    #[arg(long, default_value_t = 100_000)]
    pub max_k: usize,
}

#[derive(Args, Debug)]
pub struct PcArgs {
    #[arg(long)]
    pub p_lo: f64,
    #[arg(long)]
    pub p_hi: f64,
    #[arg(long)]
    pub k_probe: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ClassArg::All)]
    pub class: ClassArg,
    #[arg(long, default_value_t = 100_000)]
    pub max_k: usize,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Matrix dimension N.
    #[arg(long)]
    pub n: usize,
    /// Half the number of factors.
    #[arg(long)]
    pub k: usize,
    /// Geometric kernel weight V(r) = p^|r|.
    #[arg(long, conflicts_with = "kernel_file", required_unless_present = "kernel_file")]
    pub p: Option<f64>,
    /// Tabulated kernel: one `lag value` pair per line, lag 0 first.
    #[arg(long)]
    pub kernel_file: Option<PathBuf>,
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    /// Required: there is no entropy-seeded default.
    #[arg(long)]
    pub seed: u64,
    /// Additional probes: `odd` (2k+1 factors) and/or `variance` (N grid).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub probe: Vec<Probe>,
    /// N values for the variance probe.
    #[arg(long, value_delimiter = ',', default_values_t = [25usize, 50, 100, 200])]
    pub n_grid: Vec<usize>,
    /// Use the factors A^(shift+1) ... A^(shift+2k).
    #[arg(long, default_value_t = 0)]
    pub shift: usize,
    /// Sample geometric kernels through the Toeplitz factor instead of AR(1).
    #[arg(long)]
    pub toeplitz: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    pub max_n: usize,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_samples: usize,
}

#[derive(Debug)]
enum CliError {
    Domain(Error),
    Usage(String),
    Io(io::Error),
    /// Checks ran but at least one failed.
    Failed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Failed => 3,
        }
    }
}

type CliResult = Result<(), CliError>;

/// Parses `args` (including the program name) and runs the command, writing
/// results to `stdout` unless `--out` is given. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = match &e {
                CliError::Domain(Error::CapExceeded { class, .. }) => {
                    let flag = match class {
                        PairingClass::All => "--cap-all",
                        PairingClass::NonCrossing => "--cap-nc",
                    };
                    writeln!(stderr, "error: {} (raise it with {flag})", domain_message(&e))
                }
                CliError::Failed => writeln!(stderr, "error: self-check failed"),
                CliError::Usage(msg) => writeln!(stderr, "error: {msg}"),
                CliError::Io(err) => writeln!(stderr, "error: {err}"),
                CliError::Domain(err) => writeln!(stderr, "error: {err}"),
            };
            e.exit_code()
        }
    }
}

fn domain_message(e: &CliError) -> String {
    match e {
        CliError::Domain(err) => err.to_string(),
        _ => String::new(),
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> CliResult {
    let mut sink: Box<dyn Write + '_> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(stdout)),
    };
    let out = sink.as_mut();
    match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(a, cli.format, out)?,
        Command::Bk(a) => cmd_table(TableKind::Bk, a, cli.format, out)?,
        Command::Phi(a) => cmd_table(TableKind::Phi, a, cli.format, out)?,
        Command::Qrev(a) => cmd_qrev(a, cli.format, out)?,
        Command::Moment(a) => cmd_moment(a, cli.format, out)?,
        Command::Growth(a) => cmd_growth(a, cli.format, out)?,
        Command::Pc(a) => cmd_pc(a, cli.format, out)?,
        Command::Simulate(a) => cmd_simulate(a, cli.format, out)?,
        Command::Selfcheck => cmd_selfcheck(cli.format, out)?,
    }
    sink.flush()?;
    Ok(())
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> CliResult {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_enumerate(a: &EnumerateArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let class: PairingClass = a.class.into();
    let caps = EnumerationCaps {
        all: a.cap_all,
        non_crossing: a.cap_nc,
    };
    caps.check(a.k, class)?;
    match format {
        Format::Json => write!(out, "{{\"k\":{},\"class\":\"{}\",\"pairings\":[", a.k, class)?,
        Format::Csv => writeln!(out, "index,pairs,exponent")?,
    }
    let mut count: u64 = 0;
    let mut exponents: BTreeMap<u32, u64> = BTreeMap::new();
    let mut io_err = None;
    enumerate(a.k, class).for_each_pairs(|pairs| {
        if io_err.is_some() {
            return;
        }
        let e: u32 = pairs.iter().map(|&(l, m)| m - l).sum();
        *exponents.entry(e).or_default() += 1;
        let res = match format {
            Format::Json => {
                let list: Vec<[u32; 2]> = pairs.iter().map(|&(l, m)| [l, m]).collect();
                let sep = if count == 0 { "\n" } else { ",\n" };
                serde_json::to_string(&list)
                    .map_err(io::Error::from)
                    .and_then(|s| write!(out, "{sep}{{\"pairs\":{s},\"exponent\":{e}}}"))
            }
            Format::Csv => {
                let list: Vec<String> = pairs.iter().map(|(l, m)| format!("{l}-{m}")).collect();
                writeln!(out, "{count},{},{e}", list.join(" "))
            }
        };
        if let Err(err) = res {
            io_err = Some(err);
        }
        count += 1;
    });
    if let Some(err) = io_err {
        return Err(err.into());
    }
    let poly = WeightPoly::from_terms(exponents.into_iter().map(|(e, c)| (e, BigInt::from(c))));
    match format {
        Format::Json => {
            write!(
                out,
                "\n],\"count\":{count},\"total_at_p1\":\"{}\",\"weight_poly\":{}}}\n",
                poly.eval_at_one(),
                serde_json::to_string(&poly)?
            )?;
        }
        Format::Csv => {
            writeln!(
                out,
                "# count={count} total_at_p1={} weight_poly={poly}",
                poly.eval_at_one()
            )?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum TableKind {
    Bk,
    Phi,
}

#[derive(Serialize)]
struct TableEntry<'a> {
    k: usize,
    #[serde(flatten)]
    poly: &'a WeightPoly,
}

fn check_k_cap(k_max: usize, cap: usize) -> CliResult {
    if k_max > cap {
        return Err(CliError::Usage(format!("k_max = {k_max} exceeds --k-cap {cap}")));
    }
    Ok(())
}

fn write_consistency_csv(report: &ConsistencyReport, out: &mut dyn Write) -> CliResult {
    for row in &report.rows {
        match row.first_mismatch {
            None => writeln!(out, "# consistency k={} pass", row.k)?,
            Some(e) => writeln!(out, "# consistency k={} FAIL first_mismatch={e}", row.k)?,
        }
    }
    Ok(())
}

fn cmd_table(kind: TableKind, a: &TableArgs, format: Format, out: &mut dyn Write) -> CliResult {
    check_k_cap(a.k_max, a.k_cap)?;
    let bk = bk_recurrence(a.k_max);
    let phi = phi_recurrence(a.k_max);
    let report = consistency_report(&bk, &phi);
    let (name, entries) = match kind {
        TableKind::Bk => ("bk", &bk.entries),
        TableKind::Phi => ("phi", &phi.entries),
    };
    match format {
        Format::Json => {
            let rows: Vec<TableEntry> = entries
                .iter()
                .enumerate()
                .map(|(k, poly)| TableEntry { k, poly })
                .collect();
            write_json(
                out,
                &json!({
                    "table": name,
                    "k_max": a.k_max,
                    "entries": rows,
                    "consistency": report,
                }),
            )?;
        }
        Format::Csv => {
            crate::qcatalan::write_table_csv(entries, &mut *out)?;
            write_consistency_csv(&report, out)?;
        }
    }
    Ok(())
}

fn cmd_qrev(a: &TableArgs, format: Format, out: &mut dyn Write) -> CliResult {
    check_k_cap(a.k_max, a.k_cap)?;
    if a.k_max == 0 {
        return Err(Error::InvalidArgument("q-Catalan reversal needs k_max >= 1".into()).into());
    }
    let phi = phi_recurrence(a.k_max);
    let reversed: Vec<WeightPoly> = (1..=a.k_max).map(|k| phi.reversed(k)).collect::<Result<_, _>>()?;
    match format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = reversed
                .iter()
                .enumerate()
                .map(|(i, poly)| {
                    let k = i + 1;
                    json!({"k": k, "degree_bound": phi_degree(k), "terms": serde_json::to_value(poly).expect("serializable")["terms"]})
                })
                .collect();
            write_json(
                out,
                &json!({"table": "q_catalan_reversal", "k_max": a.k_max, "entries": rows}),
            )?;
        }
        Format::Csv => {
            writeln!(out, "k,exponent,coefficient")?;
            for (i, poly) in reversed.iter().enumerate() {
                for (e, c) in poly.terms() {
                    writeln!(out, "{},{e},{c}", i + 1)?;
                }
            }
        }
    }
    Ok(())
}

/// Parses `3/8`, `0.375`, `1e-3` or `2` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::InvalidWeight(format!("cannot parse {s:?} as a number"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits == "-" || digits == "+" {
        return Err(bad());
    } else {
        digits
    };
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    })
}

fn cmd_moment(a: &MomentArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let class: PairingClass = a.class.into();
    let p = parse_rational(&a.p)?;
    let (backend, cap) = match a.backend {
        BackendArg::Exact => (Backend::Exact, a.max_k_exact),
        BackendArg::Log => (Backend::LogSpace, a.max_k),
    };
    if a.k > cap {
        return Err(CliError::Usage(format!(
            "k = {} exceeds the {:?} backend cap {cap}",
            a.k, a.backend
        )));
    }
    let opts = ExactOptions {
        allow_p_above_one: a.allow_p_above_one,
    };
    let value = moment_dp(a.k, class, &p, backend, &opts)?;
    let exact = match &value {
        MomentValue::Exact(r) => Some(r.to_string()),
        MomentValue::Log(_) => None,
    };
    let p_f64 = p.to_f64().unwrap_or(f64::NAN);
    let backend_name = match backend {
        Backend::Exact => "exact",
        Backend::LogSpace => "log",
    };
    match format {
        Format::Json => write_json(
            out,
            &json!({
                "k": a.k,
                "p": p.to_string(),
                "p_f64": p_f64,
                "class": class,
                "backend": backend_name,
                "value": exact,
                "value_f64": value.to_f64(),
                "log_value": value.ln(),
            }),
        )?,
        Format::Csv => {
            writeln!(out, "k,p,class,backend,value,value_f64,log_value")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                a.k,
                p,
                class,
                backend_name,
                exact.unwrap_or_default(),
                value.to_f64(),
                value.ln()
            )?;
        }
    }
    Ok(())
}

fn cmd_growth(a: &GrowthArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let class: PairingClass = a.class.into();
    if let Some(&k) = a.k.iter().max() {
        if k > a.max_k {
            return Err(CliError::Usage(format!("k = {k} exceeds --max-k {}", a.max_k)));
        }
    }
    let curves =
        a.p.iter()
            .map(|&p| growth_curve(&a.k, p, class))
            .collect::<Result<Vec<_>, _>>()?;
    match format {
        Format::Json => write_json(out, &json!({"class": class, "curves": curves}))?,
        Format::Csv => {
            writeln!(out, "k,p,log_moment,growth_rate")?;
            for c in &curves {
                for pt in &c.points {
                    writeln!(out, "{},{},{},{}", pt.k, pt.p, pt.log_moment, pt.growth_rate)?;
                }
            }
            for c in &curves {
                if let Some(ex) = &c.extrapolation {
                    let ks: Vec<String> = ex.k_used.iter().map(usize::to_string).collect();
                    writeln!(
                        out,
                        "# extrapolation p={} estimate={} k_used={}",
                        ex.p,
                        ex.estimate,
                        ks.join(" ")
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_pc(a: &PcArgs, format: Format, out: &mut dyn Write) -> CliResult {
    if a.k_probe > a.max_k {
        return Err(CliError::Usage(format!(
            "k_probe = {} exceeds --max-k {}",
            a.k_probe, a.max_k
        )));
    }
    let bracket = pc_bracket(a.p_lo, a.p_hi, a.k_probe, a.tol, a.class.into())?;
    match format {
        Format::Json => write_json(out, &bracket)?,
        Format::Csv => {
            writeln!(out, "p_lo,p_hi,width,k_probe,tol,iterations")?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                bracket.p_lo, bracket.p_hi, bracket.width, bracket.k_probe, bracket.tol, bracket.iterations
            )?;
        }
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, format: Format, out: &mut dyn Write) -> CliResult {
    let kernel = match (&a.kernel_file, a.p) {
        (Some(path), _) => KernelSpec::from_file(path)?,
        (None, Some(p)) => KernelSpec::geometric(p)?,
        (None, None) => return Err(CliError::Usage("one of --p or --kernel-file is required".into())),
    };
    if a.n > a.max_n {
        return Err(CliError::Usage(format!("N = {} exceeds --max-n {}", a.n, a.max_n)));
    }
    if let Some(&n) = a.n_grid.iter().find(|&&n| n > a.max_n) {
        return Err(CliError::Usage(format!("grid N = {n} exceeds --max-n {}", a.max_n)));
    }
    if a.samples > a.max_samples {
        return Err(CliError::Usage(format!(
            "samples = {} exceeds --max-samples {}",
            a.samples, a.max_samples
        )));
    }
    if a.k == 0 {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    let cfg = RmtConfig {
        n: a.n,
        k: a.k,
        kernel,
        samples: a.samples,
        seed: a.seed,
        odd_probe: a.probe.contains(&Probe::Odd),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = a.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Io(io::Error::other(e.to_string())))?;

    let report = pool.install(|| -> Result<SimulationReport, Error> {
        let reference = limit_reference(&cfg.kernel, cfg.k)?;
        let est = estimate_product(&cfg, 2 * cfg.k, a.shift, a.toeplitz)?;
        let mut report = SimulationReport::new(&est, reference);
        if cfg.odd_probe {
            let odd = estimate_product(&cfg, 2 * cfg.k + 1, a.shift, a.toeplitz)?;
            report.odd_probe = Some(Box::new(SimulationReport::new(&odd, 0.0)));
        }
        if a.probe.contains(&Probe::Variance) {
            report.variance_probe = Some(variance_decay_probe(&cfg, &a.n_grid)?);
        }
        Ok(report)
    })?;

    match format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            writeln!(out, "kind,n,k,factors,samples,mean,stderr,var_trace,reference,z_score")?;
            let row = |out: &mut dyn Write, kind: &str, r: &SimulationReport| {
                writeln!(
                    out,
                    "{kind},{},{},{},{},{},{},{},{},{}",
                    r.config.n,
                    r.config.k,
                    r.factors,
                    r.samples,
                    r.mean,
                    r.stderr,
                    r.var_trace,
                    r.reference_bk,
                    r.z_score
                )
            };
            row(out, "moment", &report)?;
            if let Some(odd) = &report.odd_probe {
                row(out, "odd_probe", odd)?;
            }
            if let Some(grid) = &report.variance_probe {
                for v in grid {
                    let z = (v.mean - report.reference_bk) / v.stderr;
                    writeln!(
                        out,
                        "variance_probe,{},{},{},{},{},{},{},{},{}",
                        v.n,
                        report.config.k,
                        report.factors,
                        report.samples,
                        v.mean,
                        v.stderr,
                        v.var_trace,
                        report.reference_bk,
                        z
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_selfcheck(format: Format, out: &mut dyn Write) -> CliResult {
    let results = selfcheck::run();
    let all_pass = results.iter().all(|r| r.pass);
    match format {
        Format::Json => write_json(out, &json!({"checks": results, "all_pass": all_pass}))?,
        Format::Csv => {
            writeln!(out, "check,status,detail")?;
            for r in &results {
                writeln!(
                    out,
                    "{},{},{}",
                    r.name,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.detail.replace(',', ";")
                )?;
            }
        }
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}
