//! The `cascade` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a computation or verification fails,
//! 2 for usage errors. Failures print `error: <Code>: <message>` on stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::avoidance::{count_avoiding, StatefulOperation};
use crate::counting::{count_cascade_free, CountSequence, GpkDecomposition};
use crate::error::{Error, Result};
use crate::golden::{run_suite, Suite};
use crate::instances::{Instance, InstanceDescriptor, InstanceKind};
use crate::markov::{asymptotic_dispersion, dispersion_regime, markov_chain, moments, Regime};
use crate::opspec::load_operation;
use crate::oracle::{
    brute_count_adjacency, brute_count_avoiding, brute_count_cascade_free,
    monte_carlo_dispersion, DEFAULT_BUDGET,
};
use crate::output::{Format, Table};
use crate::poisson::{poisson_root, DEFAULT_ROOT_TOL};

pub const BUDGET_ENV: &str = "CASCADE_BUDGET";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cascade", version, about = "Cascade-free counting for stateful digit-wise operations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count cascade-free or state-avoiding words of each length up to L.
    Count(CountArgs),
    /// Compare exhaustive enumeration with the transfer-matrix count.
    Oracle(OracleArgs),
    /// Exact moments and dispersion index of the state count.
    Dispersion(DispersionArgs),
    /// Finite Poisson transition point of symmetric chains.
    Poisson(PoissonArgs),
    /// Check the built-in reference tables.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => Format::Table,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InstanceArg {
    Carry,
    Dbl,
    Ternary3,
    Binary4,
    Sediment,
}

impl From<InstanceArg> for InstanceKind {
    fn from(i: InstanceArg) -> Self {
        match i {
            InstanceArg::Carry => InstanceKind::Addition,
            InstanceArg::Dbl => InstanceKind::Doubling,
            InstanceArg::Ternary3 => InstanceKind::TernaryThreeSum,
            InstanceArg::Binary4 => InstanceKind::BinaryFourSum,
            InstanceArg::Sediment => InstanceKind::Sediment,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegimeArg {
    Stationary,
    Transient,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Scaling,
    Fibonacci,
    A007070,
    Dispersion,
    Convergence,
    Discriminant,
    Avoidance,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Scaling => Suite::Scaling,
            SuiteArg::Fibonacci => Suite::Fibonacci,
            SuiteArg::A007070 => Suite::A007070,
            SuiteArg::Dispersion => Suite::Dispersion,
            SuiteArg::Convergence => Suite::Convergence,
            SuiteArg::Discriminant => Suite::Discriminant,
            SuiteArg::Avoidance => Suite::Avoidance,
            SuiteArg::All => Suite::All,
        }
    }
}

fn parse_gpk(s: &str) -> std::result::Result<GpkDecomposition, String> {
    s.parse::<GpkDecomposition>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Decomposition as g:t:k.
    #[arg(long, value_parser = parse_gpk)]
    gpk: Option<GpkDecomposition>,
    /// Named instance.
    #[arg(long, value_enum)]
    instance: Option<InstanceArg>,
    /// JSON operation file.
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct GpkSource {
    /// Decomposition as g:t:k.
    #[arg(long, value_parser = parse_gpk)]
    gpk: Option<GpkDecomposition>,
    /// Named instance (carry or dbl).
    #[arg(long, value_enum)]
    instance: Option<InstanceArg>,
}

#[derive(Debug, Args)]
struct CountArgs {
    #[command(flatten)]
    source: Source,
    /// Base for --instance.
    #[arg(long)]
    base: Option<u64>,
    #[arg(long, short = 'L')]
    length: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    base: Option<u64>,
    #[arg(long, short = 'L')]
    length: usize,
    /// Maximum number of enumerated words [env: CASCADE_BUDGET, default 10000000].
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct DispersionArgs {
    #[command(flatten)]
    source: GpkSource,
    #[arg(long)]
    base: Option<u64>,
    #[arg(long, short = 'L')]
    length: usize,
    /// Reports both regimes when omitted.
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Number of Monte Carlo samples.
    #[arg(long, value_name = "SAMPLES")]
    mc: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["length", "scan"]))]
struct PoissonArgs {
    #[arg(long, short = 'L')]
    length: Option<usize>,
    /// Solve for every L from 2 to LMAX.
    #[arg(long, value_name = "LMAX")]
    scan: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
}

/// A failure that maps to exit code 1.
#[derive(Debug)]
enum Failure {
    Compute(Error),
    Check { code: &'static str, message: String },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

struct Usage(String);

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let budget_env = std::env::var(BUDGET_ENV).ok();
    match dispatch(cli.command, budget_env.as_deref(), out, err) {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(Failure::Compute(e))) => {
            let _ = writeln!(err, "error: {}: {e}", e.code());
            EXIT_FAILURE
        }
        Ok(Err(Failure::Check { code, message })) => {
            let _ = writeln!(err, "error: {code}: {message}");
            EXIT_FAILURE
        }
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

type Outcome = std::result::Result<std::result::Result<(), Failure>, Usage>;

fn dispatch(command: Command, budget_env: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Count(a) => {
            base_needs_instance(a.base, a.source.instance.is_some())?;
            Ok(cmd_count(a, out))
        }
        Command::Oracle(a) => {
            base_needs_instance(a.base, a.source.instance.is_some())?;
            let budget = match (a.budget, budget_env) {
                (Some(b), _) => b,
                (None, Some(v)) => v
                    .trim()
                    .parse()
                    .map_err(|_| Usage(format!("{BUDGET_ENV} must be a nonnegative integer, got {v:?}")))?,
                (None, None) => DEFAULT_BUDGET,
            };
            Ok(cmd_oracle(a, budget, out))
        }
        Command::Dispersion(a) => {
            base_needs_instance(a.base, a.source.instance.is_some())?;
            Ok(cmd_dispersion(a, out))
        }
        Command::Poisson(a) => Ok(cmd_poisson(a, out)),
        Command::Verify(a) => Ok(cmd_verify(a, out, err)),
    }
}

fn base_needs_instance(base: Option<u64>, has_instance: bool) -> std::result::Result<(), Usage> {
    if base.is_some() && !has_instance {
        Err(Usage("--base is only valid together with --instance".into()))
    } else {
        Ok(())
    }
}

fn emit(out: &mut dyn Write, table: &Table, format: FormatArg) -> std::result::Result<(), Failure> {
    out.write_all(table.render(format.into()).as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Check {
            code: "IoError",
            message: e.to_string(),
        })
}

fn resolve(source: &Source, base: Option<u64>) -> Result<Instance> {
    if let Some(gpk) = source.gpk {
        return Ok(Instance::Gpk(gpk));
    }
    if let Some(kind) = source.instance {
        return InstanceDescriptor::new(kind.into(), base)?.build();
    }
    let path = source.spec.as_ref().expect("clap enforces one source");
    Ok(Instance::Operation(load_operation(path)?))
}

fn resolve_gpk(source: &GpkSource, base: Option<u64>) -> Result<GpkDecomposition> {
    if let Some(gpk) = source.gpk {
        return Ok(gpk);
    }
    let kind = source.instance.expect("clap enforces one source");
    match InstanceDescriptor::new(kind.into(), base)?.build()? {
        Instance::Gpk(gpk) => Ok(gpk),
        Instance::Operation(_) => Err(Error::NotApplicable(format!(
            "{} is not a binary-state instance",
            InstanceKind::from(kind)
        ))),
    }
}

fn counts_of(instance: &Instance, len: usize) -> CountSequence {
    match instance {
        Instance::Gpk(gpk) => count_cascade_free(gpk, len),
        Instance::Operation(op) => count_avoiding(op, len),
    }
}

fn cmd_count(a: CountArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let instance = resolve(&a.source, a.base)?;
    let mut table = Table::new(["L", "a_L"]);
    for (l, v) in counts_of(&instance, a.length).iter().enumerate() {
        table.push([l.to_string(), v.to_string()]);
    }
    emit(out, &table, a.format)
}

fn describe(op: &StatefulOperation) -> String {
    format!(
        "{} states, alphabet {}, forbidden {}",
        op.states(),
        op.alphabet(),
        op.forbidden()
    )
}

fn cmd_oracle(a: OracleArgs, budget: u64, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let instance = resolve(&a.source, a.base)?;
    let len = a.length;
    let fast = counts_of(&instance, len).values()[len].clone();
    let mut table = Table::new(["quantity", "value"]);
    let mut all_equal = true;
    match &instance {
        Instance::Gpk(gpk) => {
            let brute = brute_count_cascade_free(gpk, len, budget)?;
            let adjacency = brute_count_adjacency(gpk, len, budget)?;
            all_equal &= brute == fast && adjacency == fast;
            table.push(["instance".to_string(), gpk.to_string()]);
            table.push(["length".to_string(), len.to_string()]);
            table.push(["brute".to_string(), brute.to_string()]);
            table.push(["adjacency".to_string(), adjacency.to_string()]);
            table.push(["recurrence".to_string(), fast.to_string()]);
        }
        Instance::Operation(op) => {
            let brute = brute_count_avoiding(op, len, budget)?;
            all_equal &= brute == fast;
            table.push(["instance".to_string(), describe(op)]);
            table.push(["length".to_string(), len.to_string()]);
            table.push(["brute".to_string(), brute.to_string()]);
            table.push(["transfer".to_string(), fast.to_string()]);
        }
    }
    table.push(["match", if all_equal { "true" } else { "false" }]);
    emit(out, &table, a.format)?;
    if all_equal {
        Ok(())
    } else {
        Err(Failure::Check {
            code: "OracleMismatch",
            message: format!("enumeration and transfer-matrix counts differ at L={len}"),
        })
    }
}

fn ratio_row(table: &mut Table, name: &str, q: &BigRational) {
    let approx = q.to_f64().map_or("nan".to_string(), |v| format!("{v:.12}"));
    table.push([name.to_string(), fraction(q), approx]);
}

fn fraction(q: &BigRational) -> String {
    if q.is_integer() {
        format!("{}/1", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn cmd_dispersion(a: DispersionArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let gpk = resolve_gpk(&a.source, a.base)?;
    let chain = markov_chain(&gpk)?;
    let d_inf = asymptotic_dispersion(&gpk)?;
    let mut table = Table::new(["quantity", "exact", "approx"]);
    ratio_row(&mut table, "mu", &chain.mu);
    ratio_row(&mut table, "pi0", &chain.pi0);
    ratio_row(&mut table, "pi1", &chain.pi1);
    ratio_row(&mut table, "D_inf", &d_inf);
    table.push(["regime", dispersion_regime(&d_inf), "-"]);
    let regimes = match a.regime {
        Some(RegimeArg::Stationary) => vec![Regime::Stationary],
        Some(RegimeArg::Transient) => vec![Regime::Transient],
        None => vec![Regime::Stationary, Regime::Transient],
    };
    let mut transient_d = None;
    for regime in regimes {
        let m = moments(&gpk, a.length, regime)?;
        let name = regime.name();
        ratio_row(&mut table, &format!("{name}.mean"), &m.mean);
        ratio_row(&mut table, &format!("{name}.variance"), &m.variance);
        ratio_row(&mut table, &format!("{name}.D"), &m.dispersion);
        if regime == Regime::Transient {
            transient_d = m.dispersion.to_f64();
        }
    }
    let mut mc_ok = true;
    if let Some(samples) = a.mc {
        let est = monte_carlo_dispersion(&gpk, a.length, samples, a.seed)?;
        let analytic = match transient_d {
            Some(d) => d,
            None => moments(&gpk, a.length, Regime::Transient)?
                .dispersion
                .to_f64()
                .unwrap_or(f64::NAN),
        };
        let z = (est.dispersion - analytic).abs() / est.se_dispersion;
        mc_ok = z <= 3.0;
        for (name, v) in [
            ("mc.samples", est.samples as f64),
            ("mc.mean", est.mean),
            ("mc.variance", est.variance),
            ("mc.D", est.dispersion),
            ("mc.se_D", est.se_dispersion),
            ("mc.z", z),
        ] {
            table.push([name.to_string(), "-".to_string(), format!("{v:.12}")]);
        }
        table.push(["mc.within_3se", if mc_ok { "true" } else { "false" }, "-"]);
    }
    emit(out, &table, a.format)?;
    if mc_ok {
        Ok(())
    } else {
        Err(Failure::Check {
            code: "MonteCarloMismatch",
            message: "sampled dispersion is more than 3 standard errors from the transient value".into(),
        })
    }
}

fn cmd_poisson(a: PoissonArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let lengths: Vec<usize> = match (a.length, a.scan) {
        (Some(l), _) => vec![l],
        (None, Some(lmax)) if lmax >= 2 => (2..=lmax).collect(),
        (None, Some(lmax)) => {
            return Err(Error::InvalidArgument(format!("--scan needs LMAX >= 2, got {lmax}")).into())
        }
        (None, None) => unreachable!("clap enforces --length or --scan"),
    };
    let mut table = Table::new(["L", "mu_star", "residual", "rate"]);
    let mut previous: Option<f64> = None;
    let mut monotone = true;
    for len in lengths {
        let root = poisson_root(len, a.tol)?;
        if let Some(prev) = previous {
            monotone &= root.mu_star < prev;
        }
        previous = Some(root.mu_star);
        table.push([
            len.to_string(),
            format!("{:.12}", root.mu_star),
            format!("{:.3e}", root.residual),
            format!("{:.9}", root.rate()),
        ]);
    }
    emit(out, &table, a.format)?;
    if monotone {
        Ok(())
    } else {
        Err(Failure::Check {
            code: "NotMonotone",
            message: "mu*(L) failed to decrease".into(),
        })
    }
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<(), Failure> {
    let report = run_suite(a.suite.into())?;
    let mut table = Table::new(["suite", "check", "expected", "actual", "status"]);
    for r in &report.rows {
        table.push([
            r.suite,
            r.label.as_str(),
            r.expected.as_str(),
            r.actual.as_str(),
            if r.pass { "pass" } else { "FAIL" },
        ]);
    }
    emit(out, &table, a.format)?;
    let failures: Vec<_> = report.failures().collect();
    if failures.is_empty() {
        return Ok(());
    }
    for r in &failures {
        let _ = writeln!(err, "- {} {}: expected {}", r.suite, r.label, r.expected);
        let _ = writeln!(err, "+ {} {}: actual   {}", r.suite, r.label, r.actual);
    }
    Err(Failure::Check {
        code: "VerificationFailed",
        message: format!("{} of {} rows differ", failures.len(), report.rows.len()),
    })
}
