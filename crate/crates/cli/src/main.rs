//! `egfasym` — coefficients, asymptotics, and OEIS verification for
//! exponential generating functions exp(m·e^(bx) + r·e^(dx) + s).

use clap::{Args, Parser, Subcommand, ValueEnum};
use egfasym::asymptotics::{estimate_with_z, AsympError, Formula};
use egfasym::numerics::PrecisionContext;
use egfasym::oeis::{
    compare_prefix, fetch_bfile, lookup_params, parse_bfile, BFile, OeisError, SequenceId,
    DEFAULT_BASE_URL,
};
use egfasym::params::{EgfParams, ParamError};
use egfasym::richardson::{extrapolation_table, ratio_series, RichardsonError};
use egfasym::series::{egf_coefficients_with_jobs, CoeffMode, SeriesError};
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

mod render;

/// Exit codes: 0 success, 1 computational failure, 2 usage/validation,
/// 3 verification mismatch.
struct CliError {
    code: i32,
    msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { code: 2, msg: msg.into() }
    }
    fn compute(msg: impl Into<String>) -> Self {
        CliError { code: 1, msg: msg.into() }
    }
    fn mismatch(msg: impl Into<String>) -> Self {
        CliError { code: 3, msg: msg.into() }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::compute(e.to_string())
    }
}

impl From<AsympError> for CliError {
    fn from(e: AsympError) -> Self {
        match e {
            AsympError::FullFormulaRequired { .. } => CliError::usage(e.to_string()),
            _ => CliError::compute(e.to_string()),
        }
    }
}

impl From<RichardsonError> for CliError {
    fn from(e: RichardsonError) -> Self {
        match e {
            RichardsonError::OrderZero
            | RichardsonError::OrderTooLarge { .. }
            | RichardsonError::InsufficientCoefficientPrecision { .. } => {
                CliError::usage(e.to_string())
            }
            RichardsonError::Asymp(inner) => inner.into(),
            RichardsonError::Series(inner) => inner.into(),
        }
    }
}

impl From<OeisError> for CliError {
    fn from(e: OeisError) -> Self {
        match e {
            OeisError::InvalidAnum(_) | OeisError::NotExactMode => CliError::usage(e.to_string()),
            _ => CliError::compute(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::compute(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "egfasym",
    version,
    about = "Exact coefficients and saddle-point asymptotics for exp(m*e^(b*x) + r*e^(d*x) + s)",
    after_help = "Environment: OEIS_BASE_URL overrides the b-file host, \
                  EGF_CACHE_DIR sets the default --cache-dir."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print coefficients a(n) for n = 0..terms (exact by default)
    Coeffs(CoeffsArgs),
    /// Evaluate an asymptotic estimate of a(n) at chosen n
    Asymp(AsympArgs),
    /// Compare coefficients against OEIS and extrapolate the ratio series
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ParamArgs {
    /// Weight m of e^(bx); rational, e.g. 1/2 (requires b, d, r, s)
    #[arg(long)]
    m: Option<String>,
    /// Growth b of the dominant exponential; must exceed d
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Growth d of the secondary exponential
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    /// Weight r of e^(dx); nonzero, may be negative
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Constant shift s
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    /// Built-in sequence id (e.g. A143405); supplies m,b,d,r,s when omitted
    #[arg(long)]
    oeis: Option<String>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<(EgfParams, Option<SequenceId>), CliError> {
        let anum = self
            .oeis
            .as_deref()
            .map(SequenceId::parse)
            .transpose()?;
        let given = [
            self.m.as_deref(),
            self.b.as_deref(),
            self.d.as_deref(),
            self.r.as_deref(),
            self.s.as_deref(),
        ];
        if given.iter().any(Option::is_some) {
            let [Some(m), Some(b), Some(d), Some(r), Some(s)] = given else {
                return Err(CliError::usage(
                    "parameters are all-or-nothing: pass every one of --m --b --d --r --s",
                ));
            };
            return Ok((EgfParams::from_strs(m, b, d, r, s)?, anum));
        }
        if let Some(anum) = anum {
            let params = lookup_params(&anum).ok_or_else(|| {
                CliError::usage(format!(
                    "{anum} is not in the built-in table; pass --m --b --d --r --s explicitly"
                ))
            })?;
            return Ok((params.clone(), Some(anum)));
        }
        Err(CliError::usage(
            "no parameters: pass --m --b --d --r --s or a built-in --oeis id",
        ))
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Table,
    Csv,
    Jsonl,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormulaArg {
    Full,
    Simplified,
    Hayman,
}

impl From<FormulaArg> for Formula {
    fn from(f: FormulaArg) -> Formula {
        match f {
            FormulaArg::Full => Formula::Full,
            FormulaArg::Simplified => Formula::Simplified,
            FormulaArg::Hayman => Formula::Hayman,
        }
    }
}

#[derive(Args)]
struct CoeffsArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Last index n to print (output has terms+1 rows)
    #[arg(long)]
    terms: usize,
    /// Switch to float coefficients at this many significant digits
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long, value_enum, default_value_t = OutFormat::Table)]
    out: OutFormat,
    /// Worker threads for long recurrence sums (result is jobs-invariant)
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
}

#[derive(Args)]
struct AsympArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Indices to estimate at, comma separated (e.g. 10,100,1000)
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u64>,
    #[arg(long, value_enum, default_value_t = FormulaArg::Full)]
    formula: FormulaArg,
    /// Working precision in significant decimal digits
    #[arg(long, default_value_t = 64)]
    digits: u32,
    #[arg(long, value_enum, default_value_t = OutFormat::Table)]
    out: OutFormat,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Ratio-series length L (coefficients run to this index)
    #[arg(long, default_value_t = 2000, conflicts_with = "full_scale")]
    terms: usize,
    /// Extrapolation orders: lo:hi:step or a comma list (e.g. 10,20,40,80)
    #[arg(long, default_value = "10:100:10", conflicts_with = "full_scale")]
    orders: String,
    #[arg(long, value_enum, default_value_t = FormulaArg::Simplified)]
    formula: FormulaArg,
    /// Internal precision; defaults to max(64, 2*max order)
    #[arg(long)]
    digits: Option<u32>,
    /// b-file index aligned with a(0)
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    offset: i64,
    /// Local b-file to compare against instead of fetching
    #[arg(long)]
    bfile: Option<PathBuf>,
    /// b-file cache directory [env: EGF_CACHE_DIR]
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Worker threads for the recurrence and the ratio series
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
    /// Reproduce the published tables: L = 10000, orders 100:1000:100
    /// (hours of CPU; excluded from ordinary runs)
    #[arg(long)]
    full_scale: bool,
    #[arg(long, value_enum, default_value_t = OutFormat::Table)]
    out: OutFormat,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_orders(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = |detail: &str| CliError::usage(format!("bad --orders {spec:?}: {detail}"));
    let parse = |t: &str| -> Result<usize, CliError> {
        t.trim()
            .parse::<usize>()
            .map_err(|_| bad("orders must be positive integers"))
    };
    let orders: Vec<usize> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("range form is lo:hi:step"));
        }
        let (lo, hi, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if step == 0 || hi < lo {
            return Err(bad("need hi >= lo and step >= 1"));
        }
        (lo..=hi).step_by(step).collect()
    } else {
        spec.split(',').map(parse).collect::<Result<_, _>>()?
    };
    if orders.is_empty() || orders.contains(&0) {
        return Err(bad("need at least one positive order"));
    }
    Ok(orders)
}

fn main() {
    let cli = Cli::parse();
    let out = std::io::stdout();
    let result = match cli.cmd {
        Cmd::Coeffs(args) => cmd_coeffs(args, &mut out.lock()),
        Cmd::Asymp(args) => cmd_asymp(args, &mut out.lock()),
        Cmd::Verify(args) => cmd_verify(args, &mut out.lock()),
    };
    match result {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.msg);
            std::process::exit(e.code);
        }
    }
}

fn cmd_coeffs(args: CoeffsArgs, out: &mut impl Write) -> Result<(), CliError> {
    let (params, _) = args.params.resolve()?;
    let mode = match args.digits {
        None => CoeffMode::Exact,
        Some(digits) => CoeffMode::Float { digits },
    };
    let table = egf_coefficients_with_jobs(&params, args.terms, mode, args.jobs)?;
    match args.out {
        OutFormat::Csv => table.write_csv(out)?,
        OutFormat::Jsonl => table.write_jsonl(out)?,
        OutFormat::Table => render::coeff_table(&table, out)?,
    }
    Ok(())
}

fn cmd_asymp(args: AsympArgs, out: &mut impl Write) -> Result<(), CliError> {
    let (params, _) = args.params.resolve()?;
    let ctx = PrecisionContext::new(args.digits);
    let formula: Formula = args.formula.into();
    let mut rows = Vec::with_capacity(args.n.len());
    for &n in &args.n {
        let (est, z) = estimate_with_z(&params, n, formula, &ctx)?;
        rows.push(render::AsympRow::new(&est, z.as_ref()));
    }
    match args.out {
        OutFormat::Csv => render::asymp_csv(&rows, out)?,
        OutFormat::Jsonl => render::asymp_jsonl(&rows, out)?,
        OutFormat::Table => render::asymp_table(&rows, out)?,
    }
    Ok(())
}

/// Digits rendered for every verify-mode extrapolant.
const VERIFY_RENDER_DIGITS: usize = 40;

fn cmd_verify(args: VerifyArgs, out: &mut impl Write) -> Result<(), CliError> {
    let (params, anum) = args.params.resolve()?;
    let (terms, orders) = if args.full_scale {
        (10_000, parse_orders("100:1000:100")?)
    } else {
        (args.terms, parse_orders(&args.orders)?)
    };
    if terms < 1 {
        return Err(CliError::usage("--terms must be at least 1"));
    }
    let max_order = *orders.iter().max().expect("orders nonempty");
    if max_order > terms {
        return Err(CliError::usage(format!(
            "order {max_order} exceeds the {terms}-term series"
        )));
    }
    let digits = args
        .digits
        .unwrap_or_else(|| 64.max(2 * u32::try_from(max_order).unwrap_or(u32::MAX / 2)));
    let ctx = PrecisionContext::new(digits);
    let formula: Formula = args.formula.into();

    // stage 1+2: exact coefficients vs the published terms
    let bfile = load_bfile(&args, anum.as_ref())?;
    let comparison = match &bfile {
        Some(bfile) => {
            let available = usize::try_from(
                bfile.entries().last().expect("nonempty").0 - args.offset + 1,
            )
            .unwrap_or(0);
            let count = available.min(terms + 1);
            let exact = egf_coefficients_with_jobs(
                &params,
                count.saturating_sub(1),
                CoeffMode::Exact,
                args.jobs,
            )?;
            Some(compare_prefix(&exact, bfile, count, args.offset)?)
        }
        None => None,
    };

    // stage 3+4: float ratio series and its extrapolants
    let table = egf_coefficients_with_jobs(&params, terms, CoeffMode::Float { digits }, args.jobs)?;
    let series = ratio_series(&table, formula, &ctx, args.jobs)?;
    let report = extrapolation_table(&series, &orders, &ctx)?;

    render::verify_report(
        args.out.into(),
        &params,
        anum.as_ref(),
        comparison.as_ref(),
        &series,
        &report,
        VERIFY_RENDER_DIGITS,
        out,
    )?;

    if let Some(c) = &comparison {
        if !c.is_clean() {
            let detail = c
                .first_mismatch
                .as_ref()
                .map(|m| format!("first mismatch at index {}: published {}, computed {}", m.index, m.expected, m.got))
                .unwrap_or_else(|| "no overlapping terms to compare".to_string());
            return Err(CliError::mismatch(format!(
                "sequence comparison failed after {} matches: {detail}",
                c.matched
            )));
        }
    }
    Ok(())
}

fn load_bfile(args: &VerifyArgs, anum: Option<&SequenceId>) -> Result<Option<BFile>, CliError> {
    if let Some(path) = &args.bfile {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let anum = anum.copied().unwrap_or(SequenceId::parse("A000000").expect("static id"));
        return Ok(Some(parse_bfile(&text, anum)?));
    }
    let Some(anum) = anum else {
        return Ok(None); // extrapolation-only run
    };
    let cache_dir = args
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("EGF_CACHE_DIR").map(PathBuf::from))
        .unwrap_or_else(|| std::env::temp_dir().join("egfasym-cache"));
    let base_url =
        std::env::var("OEIS_BASE_URL").unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
    Ok(Some(fetch_bfile(
        anum,
        &cache_dir,
        &base_url,
        Duration::from_secs(30),
    )?))
}

impl From<OutFormat> for render::Format {
    fn from(f: OutFormat) -> render::Format {
        match f {
            OutFormat::Table => render::Format::Table,
            OutFormat::Csv => render::Format::Csv,
            OutFormat::Jsonl => render::Format::Jsonl,
        }
    }
}
