//! Argument grammar and dispatch for the `symcap` binary.
//!
//! Exit status: 0 for any computed answer (a "no" or an obstruction is an
//! answer), 2 for invalid input, 3 when a comparison stayed open at the
//! refinement budget, 1 for I/O failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use symcap_core::cremona::{default_max_steps, reduce_trace, ClassVector, ReduceOutcome};
use symcap_core::diophantine::{classify_degree, Catalog, DiophantineError};
use symcap_core::ech::{
    ech_ball_capacity, ech_capacities, ech_decide, stability_chain_check, EchDecision, EchError, StabilityResult,
};
use symcap_core::ellipsoid::{c_of_a, farey_grid, plateaus, scan_row, ScanRow};
use symcap_core::numeric::{Rat, Real, Refiner};
use symcap_core::packing::{capacity, pack_decide, packing_number, PackDecision, PackingProblem, Witness};
use symcap_core::weights::weight_expansion;

use crate::cache;
use crate::output;
use crate::parse;

/// Largest `--dmax` accepted for enumerations without `--max-parts`; the
/// number of solutions grows roughly like `d^5` per degree.
pub const UNBOUNDED_ENUMERATION_LIMIT: i64 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "symcap", version, about = "Exact calculator for 4-dimensional symplectic embedding capacities")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Highest class degree searched.
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(i64).range(1..))]
    pub dmax: i64,
    /// Highest ECH index compared.
    #[arg(long, global = true, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    pub kmax: u64,
    /// Largest denominator of staircase grid points.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub denom: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Catalog cache directory (default: $SYMCAP_CACHE_DIR, then the user data directory).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Bisection steps allowed when comparing irrational values.
    #[arg(long, global = true, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..))]
    pub refine_budget: u32,
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub d_max: i64,
    pub k_max: usize,
    pub refine_budget: u32,
    pub denom_max: u64,
    pub cache_dir: Option<PathBuf>,
    pub output_format: Format,
}

impl From<&GlobalArgs> for RunConfig {
    fn from(g: &GlobalArgs) -> RunConfig {
        RunConfig {
            d_max: g.dmax,
            k_max: g.kmax as usize,
            refine_budget: g.refine_budget,
            denom_max: g.denom,
            cache_dir: g.cache_dir.clone().or_else(cache::default_cache_dir),
            output_format: g.format,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RatList(pub Vec<Rat>);

fn rat_list(s: &str) -> Result<RatList, String> {
    parse::rational_list(s).map(RatList)
}

#[derive(Clone, Debug)]
pub struct RealPair(pub Real, pub Real);

fn real_pair(s: &str) -> Result<RealPair, String> {
    parse::real_pair(s).map(|(a, b)| RealPair(a, b))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weight expansion w(a) of a rational a >= 1.
    Weights {
        #[arg(value_parser = parse::rational)]
        a: Rat,
    },
    /// Cremona reduction of a class (d; m1, m2, ...).
    #[command(allow_negative_numbers = true)]
    Reduce {
        d: i64,
        m: Vec<i64>,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// All solutions of the Diophantine system up to --dmax, marked by the Cremona test.
    SolveDe {
        #[arg(long)]
        max_parts: Option<usize>,
    },
    /// Catalog of exceptional classes up to --dmax (cached on disk).
    Exceptional {
        #[arg(long)]
        max_parts: Option<usize>,
        /// Neither read nor write the cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Decide whether balls B(a_1), ..., B(a_k) embed into B(A).
    Pack {
        /// Ball sizes, e.g. 1,1,1 or 1^8.
        #[arg(long = "a", value_parser = rat_list)]
        a: RatList,
        #[arg(long = "A", value_parser = parse::rational)]
        target: Rat,
    },
    /// Smallest ball that the given balls embed into.
    Capacity {
        #[arg(long = "a", value_parser = rat_list)]
        a: RatList,
    },
    /// Capacities c_k and packing numbers p_k of k equal balls.
    Table2 {
        /// Last k printed.
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
        upto: u64,
    },
    /// The ellipsoid capacity c(a) of E(1, a).
    C {
        #[arg(value_parser = parse::rational)]
        a: Rat,
    },
    /// c(a) on a grid of fractions with denominators up to --denom.
    Staircase {
        #[arg(long, value_parser = parse::rational, default_value = "1")]
        lo: Rat,
        #[arg(long, value_parser = parse::rational, default_value = "27/4")]
        hi: Rat,
    },
    /// ECH capacities N_0 .. N_k of E(a, b).
    EchCaps {
        #[arg(long = "a", value_parser = parse::real)]
        a: Real,
        #[arg(long = "b", value_parser = parse::real)]
        b: Real,
        #[arg(long = "k")]
        k: usize,
    },
    /// Decide E(src) -> E(tgt) by comparing ECH capacities up to --kmax.
    EchEmbeds {
        #[arg(long, value_parser = real_pair)]
        src: RealPair,
        #[arg(long, value_parser = real_pair)]
        tgt: RealPair,
    },
    /// Bracket the ball capacity of E(1, a) by bisection on ECH capacities.
    EchBall {
        #[arg(value_parser = parse::rational)]
        a: Rat,
        #[arg(long, value_parser = parse::rational, default_value = "1/1000")]
        tol: Rat,
    },
    /// Check E(1,k) -> E(k^1/3, k^2/3) and E(1,k^2/3) -> B(k^1/3) up to --kmax.
    Stability {
        #[arg(long = "k")]
        k: u64,
    },
}

/// A computed result in every output form.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub text: String,
    pub json: Value,
    /// Header and rows for `--format csv`.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
    pub undecided: bool,
    /// Notes for standard error.
    pub warnings: Vec<String>,
}

impl Report {
    fn new(text: String, json: Value) -> Report {
        Report { text, json, ..Report::default() }
    }

    fn with_table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Report {
        self.table = Some((header.iter().map(|s| s.to_string()).collect(), rows));
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Undecided(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Undecided(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn ech_error(e: EchError) -> CliError {
    match e {
        EchError::Undecided(k) => CliError::Undecided(format!("ordering undecided at index {}", k)),
        other => input(other),
    }
}

/// Catalog built in parallel over degrees.
pub fn parallel_catalog(d_max: i64, max_parts: Option<usize>) -> Result<Catalog, DiophantineError> {
    if d_max < 1 {
        return Err(DiophantineError::BadDegree(d_max));
    }
    let per_degree: Vec<_> = (1..=d_max).into_par_iter().map(|d| classify_degree(d, max_parts)).collect();
    Ok(Catalog::from_degrees(d_max, max_parts, per_degree))
}

fn check_enumeration(cfg: &RunConfig, max_parts: Option<usize>) -> Result<(), CliError> {
    if max_parts.is_none() && cfg.d_max > UNBOUNDED_ENUMERATION_LIMIT {
        return Err(input(format!(
            "enumerating without --max-parts is limited to --dmax {}; pass --max-parts or a smaller --dmax",
            UNBOUNDED_ENUMERATION_LIMIT
        )));
    }
    Ok(())
}

fn class_row(c: &ClassVector, extra: &str) -> Vec<String> {
    let m: Vec<String> = c.multiplicities().iter().map(i64::to_string).collect();
    vec![c.degree().to_string(), m.join(" "), extra.to_string()]
}

fn real_text(x: &Real) -> String {
    x.to_string()
}

/// Runs one subcommand.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Report, CliError> {
    match command {
        Command::Weights { a } => {
            let w = weight_expansion(a).map_err(input)?;
            let blocks: Vec<String> = w.blocks().iter().map(|b| format!("{} x{}", b.value, b.multiplicity)).collect();
            let text = format!("{}\nblocks: {}", w, blocks.join(", "));
            let rows = w.flat().iter().map(|v| vec![v.to_string()]).collect();
            Ok(Report::new(text, output::weights(&w)).with_table(&["weight"], rows))
        }
        Command::Reduce { d, m, max_steps } => {
            let v = ClassVector::new(*d, m.clone());
            let steps = max_steps.unwrap_or_else(|| default_max_steps(&v));
            if steps == 0 {
                return Err(input("--max-steps must be at least 1"));
            }
            let trace = reduce_trace(&v, steps);
            let verdict = match &trace.outcome {
                ReduceOutcome::ReducesToZero(n) => format!("reduces to (0; -1) in {} moves", n),
                ReduceOutcome::Stuck(c) => format!("stuck at {}", c.compact()),
                ReduceOutcome::BudgetExhausted => format!("no verdict after {} moves", steps),
            };
            let mut text: Vec<String> = trace.iterates.iter().map(ClassVector::compact).collect();
            text.push(verdict.clone());
            let json = json!({
                "iterates": trace.iterates.iter().map(output::class).collect::<Vec<_>>(),
                "verdict": match trace.outcome {
                    ReduceOutcome::ReducesToZero(_) => "reduces",
                    ReduceOutcome::Stuck(_) => "stuck",
                    ReduceOutcome::BudgetExhausted => "budget-exhausted",
                },
                "summary": verdict,
            });
            let rows = trace.iterates.iter().map(|c| class_row(c, "")).collect();
            Ok(Report::new(text.join("\n"), json).with_table(&["d", "m", "note"], rows))
        }
        Command::SolveDe { max_parts } => {
            check_enumeration(cfg, *max_parts)?;
            let catalog = parallel_catalog(cfg.d_max, *max_parts).map_err(input)?;
            let mut all: Vec<(&ClassVector, bool)> = catalog
                .classes()
                .iter()
                .map(|c| (c, true))
                .chain(catalog.rejected().iter().map(|c| (c, false)))
                .collect();
            all.sort();
            let label = |ok: bool| if ok { "exceptional" } else { "rejected" };
            let text: Vec<String> = all.iter().map(|(c, ok)| format!("{} {}", c.compact(), label(*ok))).collect();
            let json = json!({
                "d_max": cfg.d_max,
                "max_parts": max_parts,
                "solutions": all.iter().map(|(c, ok)| json!({ "d": c.degree(), "m": c.multiplicities(), "exceptional": ok })).collect::<Vec<_>>(),
            });
            let rows = all.iter().map(|(c, ok)| class_row(c, label(*ok))).collect();
            Ok(Report::new(text.join("\n"), json).with_table(&["d", "m", "status"], rows))
        }
        Command::Exceptional { max_parts, no_cache } => {
            check_enumeration(cfg, *max_parts)?;
            let dir = if *no_cache { None } else { cfg.cache_dir.as_deref() };
            let mut warnings = Vec::new();
            let (catalog, source) = cache::load_or_build(
                dir,
                cfg.d_max,
                *max_parts,
                || parallel_catalog(cfg.d_max, *max_parts),
                |w| warnings.push(w),
            )
            .map_err(input)?;
            let mut text: Vec<String> = catalog.classes().iter().map(ClassVector::compact).collect();
            text.push(format!(
                "{} exceptional classes, {} rejected solutions (d <= {}, {})",
                catalog.len(),
                catalog.rejected().len(),
                cfg.d_max,
                match max_parts {
                    Some(k) => format!("at most {} parts", k),
                    None => "any number of parts".to_string(),
                }
            ));
            let json = json!({
                "d_max": cfg.d_max,
                "max_parts": max_parts,
                "source": match source { cache::Source::Loaded => "cache", cache::Source::Built => "built" },
                "classes": catalog.classes().iter().map(output::class).collect::<Vec<_>>(),
                "rejected": catalog.rejected().iter().map(output::class).collect::<Vec<_>>(),
            });
            let rows = catalog.classes().iter().map(|c| class_row(c, "exceptional")).collect();
            let mut report = Report::new(text.join("\n"), json).with_table(&["d", "m", "status"], rows);
            report.warnings = warnings;
            Ok(report)
        }
        Command::Pack { a, target } => {
            let problem = PackingProblem::new(a.0.clone(), target.clone()).map_err(input)?;
            let decision = pack_decide(&problem, cfg.d_max).map_err(input)?;
            let (text, json) = match &decision {
                PackDecision::Yes { certified } => (
                    if *certified {
                        "yes certified".to_string()
                    } else {
                        format!("yes uncertified (classes searched to d <= {})", cfg.d_max)
                    },
                    json!({ "embeds": true, "certified": certified }),
                ),
                PackDecision::No(w) => {
                    let text = match w {
                        Witness::VolumeBound => "no witness=volume".to_string(),
                        Witness::Class(c) => format!("no witness={}", c),
                    };
                    (text, json!({ "embeds": false, "certified": true, "witness": output::witness(w) }))
                }
            };
            Ok(Report::new(text, json))
        }
        Command::Capacity { a } => {
            let c = capacity(&a.0, cfg.d_max).map_err(input)?;
            let mut report = Report::new(output::capacity_text(&c), output::capacity(&c));
            if !c.certified() {
                report.warnings.push(format!("capacity not certified beyond d = {}", c.d_max_used));
            }
            Ok(report)
        }
        Command::Table2 { upto } => {
            let rows: Vec<_> = (1..=*upto)
                .into_par_iter()
                .map(|k| packing_number(k, cfg.d_max).map_err(input))
                .collect::<Result<_, _>>()?;
            let mut text = vec![format!("{:>3}  {:>12}  {:>10}  {}", "k", "c_k", "p_k", "certified")];
            let mut table = Vec::new();
            let mut entries = Vec::new();
            for p in &rows {
                let c = &p.capacity;
                text.push(format!("{:>3}  {:>12}  {:>10}  {}", p.k, real_text(&c.value), p.value.to_string(), c.certified()));
                table.push(vec![
                    p.k.to_string(),
                    real_text(&c.value),
                    p.value.to_string(),
                    c.certified().to_string(),
                    c.witness.to_string(),
                ]);
                entries.push(json!({
                    "k": p.k,
                    "c_k": output::real(&c.value),
                    "p_k": output::rat(&p.value),
                    "certified": c.certified(),
                    "witness": output::witness(&c.witness),
                }));
            }
            Ok(Report::new(text.join("\n"), json!({ "rows": entries }))
                .with_table(&["k", "c_k", "p_k", "certified", "witness"], table))
        }
        Command::C { a } => {
            let c = c_of_a(a, cfg.d_max).map_err(input)?;
            let mut json = output::capacity(&c);
            json["a"] = output::rat(a);
            Ok(Report::new(output::capacity_text(&c), json))
        }
        Command::Staircase { lo, hi } => {
            if *lo < Rat::one() || lo > hi {
                return Err(input("need 1 <= lo <= hi"));
            }
            let grid = farey_grid(lo, hi, cfg.denom_max).map_err(input)?;
            let rows: Vec<ScanRow> = grid
                .par_iter()
                .map_init(|| Refiner::new(cfg.refine_budget), |rf, a| scan_row(a, cfg.d_max, rf))
                .collect::<Result<_, _>>()
                .map_err(input)?;
            staircase_report(&rows)
        }
        Command::EchCaps { a, b, k } => {
            let mut refiner = Refiner::new(cfg.refine_budget);
            let seq = ech_capacities(a, b, *k, &mut refiner).map_err(ech_error)?;
            let text: Vec<String> =
                seq.values().iter().enumerate().map(|(i, v)| format!("{}: {}", i, real_text(v))).collect();
            let rows = seq
                .values()
                .iter()
                .zip(seq.points())
                .enumerate()
                .map(|(i, (v, (m, n)))| vec![i.to_string(), m.to_string(), n.to_string(), real_text(v)])
                .collect();
            let json = json!({
                "a": output::real(a),
                "b": output::real(b),
                "values": seq.values().iter().map(output::real).collect::<Vec<_>>(),
            });
            Ok(Report::new(text.join("\n"), json).with_table(&["k", "m", "n", "value"], rows))
        }
        Command::EchEmbeds { src, tgt } => {
            let mut refiner = Refiner::new(cfg.refine_budget);
            let d = ech_decide((&src.0, &src.1), (&tgt.0, &tgt.1), cfg.k_max, &mut refiner).map_err(ech_error)?;
            let mut report = Report::new(d.to_string(), output::ech_decision(&d));
            report.undecided = matches!(d, EchDecision::Undecided(_));
            Ok(report)
        }
        Command::EchBall { a, tol } => {
            let (lo, hi) = ech_ball_capacity(a, cfg.k_max, tol).map_err(ech_error)?;
            let json = json!({
                "a": output::rat(a),
                "lo": output::rat(&lo),
                "hi": output::rat(&hi),
                "k_max": cfg.k_max,
                "tol": output::rat(tol),
            });
            Ok(Report::new(format!("[{}, {}]", lo, hi), json))
        }
        Command::Stability { k } => {
            let mut refiner = Refiner::new(cfg.refine_budget);
            let s = stability_chain_check(*k, cfg.k_max, &mut refiner).map_err(ech_error)?;
            let mut text = s.to_string();
            if let StabilityResult::Holds { .. } = s {
                text.push_str(&format!("\nimplies: {} unit 6-balls embed into B^6(cbrt({}))", k, k));
            }
            let mut report = Report::new(text, output::stability(&s));
            report.undecided = matches!(s, StabilityResult::Undecided { .. });
            Ok(report)
        }
    }
}

fn staircase_report(rows: &[ScanRow]) -> Result<Report, CliError> {
    let mut text = Vec::new();
    let mut warnings = Vec::new();
    for row in rows {
        let c = &row.capacity;
        let oracle = match &row.oracle {
            Some(o) if c.value.as_rat() == Some(o) => format!("oracle={} (match)", o),
            Some(o) => format!("oracle={} (MISMATCH)", o),
            None => String::new(),
        };
        text.push(format!("{} {} {}", row.a, output::capacity_text(c), oracle).trim_end().to_string());
        if !c.certified() {
            warnings.push(format!("uncertified: a = {} (c = {})", row.a, c.value));
        }
    }
    let steps = plateaus(rows);
    for p in &steps {
        text.push(format!("plateau c = {} on [{}, {}]", p.value, p.start, p.end));
    }
    let json = json!({
        "rows": rows.iter().map(output::scan_row).collect::<Vec<_>>(),
        "plateaus": steps.iter().map(|p| json!({
            "start": output::rat(&p.start), "end": output::rat(&p.end), "value": output::rat(&p.value),
        })).collect::<Vec<_>>(),
        "uncertified": rows.iter().filter(|r| !r.capacity.certified()).map(|r| output::rat(&r.a)).collect::<Vec<_>>(),
    });
    let table = rows.iter().map(output::scan_record).collect();
    let mut report = Report::new(text.join("\n"), json).with_table(&output::SCAN_COLUMNS, table);
    report.warnings = warnings;
    Ok(report)
}

/// Writes a report in the chosen format.
pub fn render(report: &Report, format: Format, out: &mut impl Write) -> Result<(), CliError> {
    match format {
        Format::Text => writeln!(out, "{}", report.text).map_err(anyhow::Error::from)?,
        Format::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(&report.json).map_err(anyhow::Error::from)?)
                .map_err(anyhow::Error::from)?
        }
        Format::Csv => {
            let (header, rows) =
                report.table.as_ref().ok_or_else(|| input("this command has no CSV form; use --format text or json"))?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header).map_err(anyhow::Error::from)?;
            for row in rows {
                w.write_record(row).map_err(anyhow::Error::from)?;
            }
            w.flush().map_err(anyhow::Error::from)?;
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and prints the result; returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{}", rendered) } else { write!(stderr, "{}", rendered) };
            return code;
        }
    };
    let cfg = RunConfig::from(&cli.global);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.global.jobs {
        builder = builder.num_threads(j as usize);
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| execute(&cli.command, &cfg)),
        Err(e) => Err(CliError::Other(e.into())),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e);
            return e.exit_code();
        }
    };
    for w in &report.warnings {
        let _ = writeln!(stderr, "warning: {}", w);
    }
    if let Err(e) = render(&report, cfg.output_format, stdout) {
        let _ = writeln!(stderr, "error: {}", e);
        return e.exit_code();
    }
    if report.undecided {
        3
    } else {
        0
    }
}
