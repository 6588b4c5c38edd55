//! The `ruq` command line. [`run`] parses `argv`, writes to the given
//! streams and returns the process exit code: 0 on success, 1 if any check
//! failed, 2 on usage errors and 3 on bad input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ruq_core::bounds::{bound_curve, s0_joint, s0_single, thresholds, BoundKind};
use ruq_core::hash::UniversalityLevel;
use ruq_core::measures::conditional_entropy;
use ruq_core::multipath::{demo_line, eavesdropper_uncertainty, MultipathConfig};
use ruq_core::oneshot::BinomialMomentQuery;
use ruq_core::report::fmt_sig;
use ruq_core::{RenyiOrderSpec, Verdict, VerificationReport};

use crate::io::{parse_pmf, read_family_table, read_source, write_curve};
use crate::suites::{self, FamilySpec, SourceSpec};
use crate::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "ruq", version, about = "Conditional Rényi entropies, hashing bounds and their checks")]
struct Cli {
    /// Significant digits in printed numbers.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=15))]
    precision: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Conditional entropy of a source file.
    Measure(MeasureArgs),
    /// CSV of a remaining-uncertainty bound over a rate grid.
    Curve(CurveArgs),
    /// CSV of an exponent bound over a rate grid.
    ExponentCurve(CurveArgs),
    /// The `s0` threshold of a distribution or a source.
    S0(S0Args),
    /// Optimal-rate thresholds at one order.
    Thresholds(ThresholdArgs),
    /// Verification suites.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Masked multipath transmission demo and eavesdropper accounting.
    Multipath(MultipathArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Variant {
    Shannon,
    Plain,
    Gallager,
    TwoParam,
    Min,
    MinGallager,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long, value_enum, default_value = "shannon")]
    variant: Variant,
    /// Order offset: order `1+s`.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    /// Second order offset of the two-parameter variant.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Comma-separated reference law on E (shannon and plain only).
    #[arg(long)]
    relative_q: Option<String>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    kind: String,
    #[arg(long)]
    s: f64,
    #[arg(long, default_value_t = 0.0)]
    r_min: f64,
    #[arg(long)]
    r_max: f64,
    #[arg(long, default_value_t = 161)]
    steps: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct S0Args {
    /// Comma-separated distribution.
    #[arg(long, conflicts_with = "source", required_unless_present = "source")]
    p: Option<String>,
    /// Source file; reports the minimum over the conditionals.
    #[arg(long)]
    source: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    s: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyName {
    Binning,
    Gf2m,
    Affine,
    Table,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value = "binning")]
    family: FamilyName,
    /// |A| for binning and affine families.
    #[arg(long, default_value_t = 4)]
    a_size: usize,
    /// Number of hash values.
    #[arg(long = "M", default_value_t = 2)]
    bins: usize,
    /// Field bits of the gf2m family.
    #[arg(long = "m", default_value_t = 4)]
    field_bits: u32,
    /// Piece width of the gf2m family.
    #[arg(long, default_value_t = 2)]
    l: u32,
    /// Piece index of the gf2m family, 1-based.
    #[arg(long, default_value_t = 1)]
    j: u32,
    /// Prime of the affine family.
    #[arg(long, default_value_t = 5)]
    p: u64,
    /// Seed table file for the table family.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Claimed collision slack ε.
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
}

impl FamilyArgs {
    fn spec(&self) -> CliResult<FamilySpec> {
        Ok(match self.family {
            FamilyName::Binning => FamilySpec::Binning { a_size: self.a_size, m: self.bins },
            FamilyName::Gf2m => FamilySpec::Gf2m { m: self.field_bits, l: self.l, j: self.j },
            FamilyName::Affine => FamilySpec::Affine { a_size: self.a_size, m: self.bins, p: self.p },
            FamilyName::Table => {
                let path = self
                    .table
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("--family table needs --table".into()))?;
                FamilySpec::Table(read_family_table(path, self.eps)?)
            }
        })
    }

    fn config(&self) -> String {
        let fam = match self.family {
            FamilyName::Binning => format!("family=binning a-size={} M={}", self.a_size, self.bins),
            FamilyName::Gf2m => format!("family=gf2m m={} l={} j={}", self.field_bits, self.l, self.j),
            FamilyName::Affine => format!("family=affine a-size={} M={} p={}", self.a_size, self.bins, self.p),
            FamilyName::Table => format!(
                "family=table table={}",
                self.table.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
            ),
        };
        format!("{fam} eps={}", self.eps)
    }
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// `random` or a source file.
    #[arg(long, default_value = "random")]
    source: String,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest |E| of random sources.
    #[arg(long, default_value_t = 3)]
    e_max: usize,
    /// Largest number of live A symbols of random sources.
    #[arg(long, default_value_t = 5)]
    support_max: usize,
    /// Print only checks that did not pass, plus the summary.
    #[arg(long)]
    summary_only: bool,
}

impl SuiteArgs {
    fn spec(&self) -> CliResult<SourceSpec> {
        if self.source == "random" {
            Ok(SourceSpec::Random { e_max: self.e_max, support_max: self.support_max })
        } else {
            Ok(SourceSpec::Fixed(read_source(self.source.as_ref())?))
        }
    }

    fn config(&self) -> String {
        format!(
            "source={} trials={} seed={} e-max={} support-max={} threads={}",
            self.source,
            self.trials,
            self.seed,
            self.e_max,
            self.support_max,
            suites::thread_count()
        )
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Level {
    Universal2,
    StronglyUniversal,
    AlmostUniversal2,
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// One-shot hashing inequalities over random instances.
    Oneshot {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Decoding identities of random Slepian-Wolf systems, or an exponent
    /// trend with `--trend`.
    Sw {
        #[command(flatten)]
        suite: SuiteArgs,
        /// Largest |A| of random sources.
        #[arg(long, default_value_t = 3)]
        a_max: usize,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Orders of the error chain.
        #[arg(long = "orders", value_delimiter = ',', default_value = "1,2")]
        orders: Vec<f64>,
        /// Report `-(1/n) ln P_e` for n in 4..=10 at `--rate` instead.
        #[arg(long)]
        trend: bool,
        #[arg(long, default_value_t = 0.6)]
        rate: f64,
    },
    /// Universality certification and the expected preimage mass.
    Hash {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value = "universal2")]
        level: Level,
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Concentration and Jensen bounds on fractional binomial moments.
    Binomial {
        /// Single cell instead of the built-in grid: `L`.
        #[arg(long = "L", requires_all = ["p", "s", "eps"])]
        l: Option<u64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        summary_only: bool,
    },
}

#[derive(Debug, Args)]
struct MultipathArgs {
    #[arg(long = "m", default_value_t = 8)]
    field_bits: u32,
    #[arg(long, default_value_t = 2)]
    l: u32,
    #[arg(long, default_value_t = 1)]
    j: u32,
    /// Message in hex; with `--x` prints one demo line.
    #[arg(long, requires = "x")]
    a: Option<String>,
    /// Mask in hex.
    #[arg(long, requires = "a")]
    x: Option<String>,
    /// Random demo lines when no message is given.
    #[arg(long, default_value_t = 4)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Source over the 2^m messages for the eavesdropper accounting.
    #[arg(long)]
    source: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "shannon")]
    variant: Variant,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
}

/// Runs the command line on `argv` (including the program name).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: &mut dyn Write, line: &str) -> CliResult<()> {
    writeln!(out, "{line}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

fn order_spec(variant: Variant, s: Option<f64>, t: Option<f64>) -> CliResult<RenyiOrderSpec> {
    let need_s = || s.ok_or_else(|| CliError::Usage("this variant needs --s".into()));
    Ok(match variant {
        Variant::Shannon => RenyiOrderSpec::Shannon,
        Variant::Plain => RenyiOrderSpec::Plain { s: need_s()? },
        Variant::Gallager => RenyiOrderSpec::Gallager { s: need_s()? },
        Variant::TwoParam => RenyiOrderSpec::TwoParam {
            s: need_s()?,
            t: t.ok_or_else(|| CliError::Usage("two-param needs --t".into()))?,
        },
        Variant::Min => RenyiOrderSpec::Min,
        Variant::MinGallager => RenyiOrderSpec::MinGallager,
    })
}

fn label(spec: RenyiOrderSpec) -> &'static str {
    match spec {
        RenyiOrderSpec::Shannon => "H(A|E)",
        RenyiOrderSpec::Plain { .. } => "H_{1+s}(A|E)",
        RenyiOrderSpec::Gallager { .. } => "H^up_{1+s}(A|E)",
        RenyiOrderSpec::TwoParam { .. } => "H_{1+s|1+t}(A|E)",
        RenyiOrderSpec::Min => "H_min(A|E)",
        RenyiOrderSpec::MinGallager => "H^up_min(A|E)",
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "none".into())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    let digits = cli.precision as usize;
    let num = |x: f64| fmt_sig(x, digits);
    match &cli.command {
        Command::Measure(a) => {
            emit(
                out,
                &format!(
                    "# config: command=measure source={} variant={:?} s={} t={} relative-q={} precision={digits}",
                    a.source.display(),
                    a.variant,
                    opt(a.s),
                    opt(a.t),
                    a.relative_q.as_deref().unwrap_or("none")
                ),
            )?;
            let src = read_source(&a.source)?;
            let spec = order_spec(a.variant, a.s, a.t)?;
            let q = a.relative_q.as_deref().map(parse_pmf).transpose()?;
            let h = conditional_entropy(&src, spec, q.as_ref())?;
            emit(out, &format!("{} = {} nats", label(spec), num(h)))?;
            Ok(0)
        }
        Command::Curve(a) | Command::ExponentCurve(a) => {
            let exponent = matches!(cli.command, Command::ExponentCurve(_));
            let name = if exponent { "exponent-curve" } else { "curve" };
            emit(
                out,
                &format!(
                    "# config: command={name} source={} kind={} s={} r-min={} r-max={} steps={} out={} precision={digits}",
                    a.source.display(),
                    a.kind,
                    a.s,
                    a.r_min,
                    a.r_max,
                    a.steps,
                    a.out.display()
                ),
            )?;
            let kind: BoundKind = a.kind.parse()?;
            if kind.is_uncertainty() == exponent {
                let want = if exponent { "an exponent kind (e_*, eup_*)" } else { "a bound kind (g_*, gup_*)" };
                return Err(CliError::Usage(format!("{name} needs {want}, got {kind}")));
            }
            let src = read_source(&a.source)?;
            let curve = bound_curve(&src, kind, a.s, a.r_min, a.r_max, a.steps)?;
            write_curve(&a.out, &curve, digits)?;
            emit(out, &format!("wrote {} rows to {}", curve.rows.len(), a.out.display()))?;
            Ok(0)
        }
        Command::S0(a) => {
            emit(
                out,
                &format!(
                    "# config: command=s0 p={} source={} precision={digits}",
                    a.p.as_deref().unwrap_or("none"),
                    a.source.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "none".into())
                ),
            )?;
            let s0 = match (&a.p, &a.source) {
                (Some(p), _) => s0_single(&parse_pmf(p)?),
                (None, Some(path)) => s0_joint(&read_source(path)?),
                (None, None) => return Err(CliError::Usage("s0 needs --p or --source".into())),
            };
            emit(out, &format!("s0 = {}", num(s0)))?;
            Ok(0)
        }
        Command::Thresholds(a) => {
            emit(
                out,
                &format!("# config: command=thresholds source={} s={} precision={digits}", a.source.display(), a.s),
            )?;
            let th = thresholds(&read_source(&a.source)?, a.s)?;
            let lines = [
                format!("s0 = {}", num(th.s0)),
                format!("t_minus_upper = {}", num(th.t_minus_upper)),
                format!("t_minus_strong_lower = {} valid={}", num(th.t_minus_strong_lower), th.strong_lower_valid),
                format!("t_plus = {}", num(th.t_plus)),
                format!("t_up_minus = {} valid={}", num(th.t_up_minus), th.up_minus_valid),
                format!("t_up_plus = {}", num(th.t_up_plus)),
            ];
            for l in lines {
                emit(out, &l)?;
            }
            Ok(0)
        }
        Command::Verify(v) => verify(v, digits, out),
        Command::Multipath(a) => multipath(a, digits, out),
    }
}

fn print_report(rep: &VerificationReport, digits: usize, summary_only: bool, out: &mut dyn Write) -> CliResult<i32> {
    for rec in &rep.records {
        if !summary_only || rec.verdict != Verdict::Pass {
            emit(out, &rec.render(digits))?;
        }
    }
    for f in &rep.flags {
        emit(out, &format!("# flag: {f}"))?;
    }
    let count = |v| rep.count(v);
    emit(
        out,
        &format!(
            "SUMMARY checks={} pass={} fail={} precondition-failed={} degenerate={} min_slack={}",
            rep.records.len(),
            count(Verdict::Pass),
            count(Verdict::Fail),
            count(Verdict::PreconditionFailed),
            count(Verdict::Degenerate),
            fmt_sig(rep.min_slack(), digits)
        ),
    )?;
    Ok(if rep.passed() { 0 } else { 1 })
}

fn verify(cmd: &VerifyCommand, digits: usize, out: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        VerifyCommand::Oneshot { family, suite } => {
            emit(
                out,
                &format!("# config: command=verify-oneshot {} {} precision={digits}", family.config(), suite.config()),
            )?;
            let rep = suites::oneshot_suite(&family.spec()?, &suite.spec()?, suite.trials, suite.seed)?;
            print_report(&rep, digits, suite.summary_only, out)
        }
        VerifyCommand::Sw { suite, a_max, n_max, orders, trend, rate } => {
            let orders_s: Vec<String> = orders.iter().map(|o| o.to_string()).collect();
            emit(
                out,
                &format!(
                    "# config: command=verify-sw {} a-max={a_max} n-max={n_max} orders={} trend={trend} rate={rate} precision={digits}",
                    suite.config(),
                    orders_s.join(",")
                ),
            )?;
            if *trend {
                let src = match suite.spec()? {
                    SourceSpec::Fixed(s) => s,
                    SourceSpec::Random { .. } => {
                        return Err(CliError::Usage("--trend needs a source file".into()));
                    }
                };
                for row in suites::exponent_trend(&src, *rate, 4..=10)? {
                    emit(
                        out,
                        &format!(
                            "TREND n={} M={} P_e={} exponent={}",
                            row.n,
                            row.m,
                            fmt_sig(row.error, digits),
                            fmt_sig(row.exponent, digits)
                        ),
                    )?;
                }
                return Ok(0);
            }
            let rep = suites::sw_suite(&suite.spec()?, *a_max, *n_max, orders, suite.trials, suite.seed)?;
            print_report(&rep, digits, suite.summary_only, out)
        }
        VerifyCommand::Hash { family, level, suite } => {
            emit(
                out,
                &format!(
                    "# config: command=verify-hash {} level={level:?} {} precision={digits}",
                    family.config(),
                    suite.config()
                ),
            )?;
            let level = match level {
                Level::Universal2 => UniversalityLevel::Universal2,
                Level::StronglyUniversal => UniversalityLevel::StronglyUniversal,
                Level::AlmostUniversal2 => UniversalityLevel::AlmostUniversal2(family.eps),
            };
            let rep = suites::hash_suite(&family.spec()?, level, &suite.spec()?, suite.trials, suite.seed)?;
            print_report(&rep, digits, suite.summary_only, out)
        }
        VerifyCommand::Binomial { l, p, s, eps, summary_only } => {
            emit(
                out,
                &format!(
                    "# config: command=verify-binomial L={} p={} s={} eps={} precision={digits}",
                    l.map(|v| v.to_string()).unwrap_or_else(|| "grid".into()),
                    opt(*p),
                    opt(*s),
                    opt(*eps)
                ),
            )?;
            let queries = match (l, p, s, eps) {
                (Some(l), Some(p), Some(s), Some(eps)) => vec![BinomialMomentQuery { l: *l, p: *p, s: *s, eps: *eps }],
                _ => suites::binomial_grid(),
            };
            let rep = suites::binomial_suite(&queries)?;
            print_report(&rep, digits, *summary_only, out)
        }
    }
}

fn parse_hex(s: &str, what: &str) -> CliResult<u32> {
    let body = s.trim_start_matches("0x");
    u32::from_str_radix(body, 16).map_err(|_| CliError::Usage(format!("{what} `{s}` is not hexadecimal")))
}

fn multipath(a: &MultipathArgs, digits: usize, out: &mut dyn Write) -> CliResult<i32> {
    emit(
        out,
        &format!(
            "# config: command=multipath m={} l={} j={} a={} x={} count={} seed={} source={} variant={:?} s={} t={} precision={digits}",
            a.field_bits,
            a.l,
            a.j,
            a.a.as_deref().unwrap_or("random"),
            a.x.as_deref().unwrap_or("random"),
            a.count,
            a.seed,
            a.source.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "none".into()),
            a.variant,
            opt(a.s),
            opt(a.t)
        ),
    )?;
    let cfg = MultipathConfig::new(a.field_bits, a.l, a.j)?;
    match (&a.a, &a.x) {
        (Some(msg), Some(mask)) => emit(out, &demo_line(&cfg, parse_hex(msg, "A")?, parse_hex(mask, "X")?)?)?,
        _ => {
            use rand::Rng;
            let mut rng = suites::trial_rng(a.seed, 0);
            let order = cfg.field.order();
            for _ in 0..a.count {
                let msg = rng.gen_range(0..order);
                let mask = rng.gen_range(1..order);
                emit(out, &demo_line(&cfg, msg, mask)?)?;
            }
        }
    }
    if let Some(path) = &a.source {
        let src = read_source(path)?;
        let spec = order_spec(a.variant, a.s, a.t)?;
        let h = eavesdropper_uncertainty(&cfg, &src, spec)?;
        emit(out, &format!("eavesdropper {} = {} nats", label(spec).replace("(A|E)", "(A|piece,E,X)"), fmt_sig(h, digits)))?;
    }
    Ok(0)
}
