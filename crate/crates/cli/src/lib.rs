//! Command-line front end: colour, verify, bound and generate instances.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 internal invariant breach.

pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use treesq::product::{
    bounds, colour_product_with_cap, total_span_bound, wrap, ProductInstance,
    DEFAULT_MATERIALIZE_CAP,
};
use treesq::spancol::Colour;
use treesq::tree::{generate, trees_to_text, GenerateParams, TreeKind};
use treesq::verify::{
    build_product_graph, check_proper, check_spans, chi_exact_seeded, clique_certificate, square,
    ExplicitGraph, ProperCheck, SpanCheck, DEFAULT_EXACT_LIMIT, DEFAULT_EXPLICIT_CAP,
};

pub use report::{RunReport, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "treesq",
    version,
    about = "Distance-2 colourings of products of trees"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Emit the report as `key=value` lines
    #[arg(long, global = true)]
    pub machine: bool,
    /// Leave per-phase wall times out of the report
    #[arg(long, global = true)]
    pub no_timings: bool,
    /// Largest product for which explicit graphs are built
    #[arg(long, global = true, default_value_t = DEFAULT_EXPLICIT_CAP)]
    pub cap_vertices: usize,
    /// Largest square the exact chromatic number search accepts
    #[arg(long, global = true, default_value_t = DEFAULT_EXACT_LIMIT)]
    pub cap_exact: usize,
    /// Largest product whose colours are stored densely
    #[arg(long, global = true, default_value_t = DEFAULT_MATERIALIZE_CAP)]
    pub cap_materialize: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Colour the square of a product of trees
    Colour {
        instance: PathBuf,
        /// Colouring file to write, `-` for stdout
        output: PathBuf,
        /// Reduce colours into [0, 2S] (default)
        #[arg(long, overrides_with = "no_wrap")]
        wrap: bool,
        /// Keep the raw coordinate-sum colours
        #[arg(long)]
        no_wrap: bool,
    },
    /// Check a colouring file against an instance
    Verify {
        instance: PathBuf,
        colouring: PathBuf,
        /// Treat the colouring as unwrapped and check span windows
        #[arg(long)]
        unwrapped: bool,
    },
    /// Print the lower and upper bounds on the chromatic number of the square
    Bounds {
        instance: PathBuf,
        /// Also compute the exact chromatic number
        #[arg(long)]
        exact: bool,
    },
    /// Write a generated instance
    Generate {
        #[arg(value_enum)]
        kind: Kind,
        /// Vertex count (spine length for caterpillars)
        #[arg(long)]
        size: usize,
        /// Leaves per spine vertex for caterpillars
        #[arg(long, default_value_t = 1)]
        legs: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of factors; random factors use seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Instance file to write, `-` for stdout
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Path,
    Star,
    Caterpillar,
    Random,
}

impl From<Kind> for TreeKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Path => TreeKind::Path,
            Kind::Star => TreeKind::Star,
            Kind::Caterpillar => TreeKind::Caterpillar,
            Kind::Random => TreeKind::Random,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

fn input<E: std::fmt::Display>(context: &Path) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", context.display()))
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(report) => {
            let failed = report.as_ref().is_some_and(RunReport::any_failed);
            if let Some(report) = report {
                let text = report.render(cli.opts.machine, !cli.opts.no_timings);
                // the colouring may own stdout
                let sink: &mut dyn Write = match &cli.command {
                    Command::Colour { output, .. } if is_stdout(output) => stderr,
                    _ => stdout,
                };
                let _ = sink.write_all(text.as_bytes());
            }
            if failed {
                EXIT_VERIFY_FAILED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<Option<RunReport>, CliError> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Colour {
            instance,
            output,
            no_wrap,
            ..
        } => cmd_colour(instance, output, !no_wrap, opts, stdout).map(Some),
        Command::Verify {
            instance,
            colouring,
            unwrapped,
        } => cmd_verify(instance, colouring, *unwrapped, opts).map(Some),
        Command::Bounds { instance, exact } => cmd_bounds(instance, *exact, opts).map(Some),
        Command::Generate {
            kind,
            size,
            legs,
            seed,
            count,
            output,
        } => {
            let params = GenerateParams {
                size: *size,
                legs: *legs,
                seed: *seed,
            };
            cmd_generate(*kind, params, *count, output, stdout)?;
            Ok(None)
        }
    }
}

fn is_stdout(p: &Path) -> bool {
    p.as_os_str() == "-"
}

fn write_output(path: &Path, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    if is_stdout(path) {
        stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("stdout: {e}")))
    } else {
        fs::write(path, text).map_err(input(path))
    }
}

pub fn read_instance(path: &Path) -> Result<ProductInstance, CliError> {
    let text = fs::read_to_string(path).map_err(input(path))?;
    ProductInstance::parse(&text).map_err(input(path))
}

/// Parses `v_1,...,v_d<TAB>colour` lines into colours in flat-index order.
/// Every vertex must appear exactly once.
pub fn parse_colouring(text: &str, instance: &ProductInstance) -> Result<Vec<Colour>, String> {
    let mut colours: Vec<Option<Colour>> = vec![None; instance.total()];
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || format!("line {line_no}: expected `v_1,...,v_d<TAB>colour`, found {line:?}");
        let (coords, colour) = line.split_once('\t').ok_or_else(bad)?;
        let coords: Vec<usize> = coords
            .split(',')
            .map(|c| c.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let colour: Colour = colour.trim().parse().map_err(|_| bad())?;
        let flat = instance
            .encode(&coords)
            .map_err(|e| format!("line {line_no}: {e}"))?;
        if colours[flat].replace(colour).is_some() {
            return Err(format!("line {line_no}: vertex {coords:?} coloured twice"));
        }
    }
    colours
        .iter()
        .enumerate()
        .map(|(flat, c)| {
            c.ok_or_else(|| {
                let coords = instance.decode(flat).unwrap_or_default();
                format!("no colour given for vertex {coords:?}")
            })
        })
        .collect()
}

fn summary(instance: &ProductInstance) -> RunReport {
    RunReport {
        dims: instance.dims().to_vec(),
        degrees: instance.max_degrees(),
        bounds: Some(bounds(instance)),
        ..Default::default()
    }
}

/// Explicit square of the product, or `None` past the cap.
fn explicit_square(instance: &ProductInstance, cap: usize) -> Option<ExplicitGraph> {
    let g = build_product_graph(instance, cap).ok()?;
    square(&g, cap).ok()
}

fn proper_verdict(check: ProperCheck, instance: &ProductInstance) -> Verdict {
    match check {
        ProperCheck::Ok => Verdict::Pass,
        ProperCheck::Conflict { u, v, colour } => Verdict::Fail(format!(
            "{:?} and {:?} both coloured {colour}",
            instance.decode(u).unwrap_or_default(),
            instance.decode(v).unwrap_or_default()
        )),
    }
}

fn span_verdict(check: SpanCheck, instance: &ProductInstance) -> Verdict {
    match check {
        SpanCheck::Ok => Verdict::Pass,
        SpanCheck::OutOfWindow {
            u,
            v,
            dimension,
            span,
            window,
        } => Verdict::Fail(format!(
            "edge {:?}-{:?} in dimension {} has span {span} outside [{}, {}]",
            instance.decode(u).unwrap_or_default(),
            instance.decode(v).unwrap_or_default(),
            dimension + 1,
            window.0,
            window.1
        )),
    }
}

fn too_large(n: usize, cap: usize) -> String {
    format!("{n} vertices exceeds --cap-vertices {cap}")
}

pub fn cmd_colour(
    instance_path: &Path,
    output: &Path,
    wrapped: bool,
    opts: &GlobalOpts,
    stdout: &mut dyn Write,
) -> Result<RunReport, CliError> {
    let instance = read_instance(instance_path)?;
    let mut report = summary(&instance);
    let upper = report.bounds.map(|b| b.upper).unwrap_or(0);

    let start = Instant::now();
    let raw = colour_product_with_cap(&instance, opts.cap_materialize)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let pc = if wrapped {
        wrap(&raw).map_err(|e| CliError::Internal(e.to_string()))?
    } else {
        raw.clone()
    };
    report.timings.push(("colour", start.elapsed()));

    let start = Instant::now();
    write_output(output, &pc.to_string(), stdout)?;
    report.timings.push(("write", start.elapsed()));

    let used = pc.distinct_colours();
    report.colours_used = Some(used);
    let cert = clique_certificate(&instance);
    report.clique_size = Some(cert.size());

    let start = Instant::now();
    match explicit_square(&instance, opts.cap_vertices) {
        Some(sq) => {
            let colours = pc.to_vec();
            let proper =
                check_proper(&sq, &colours).map_err(|e| CliError::Internal(e.to_string()))?;
            report.verdict("proper-on-square", proper_verdict(proper, &instance));
            let clique = if cert.verify_in(&sq) {
                Verdict::Pass
            } else {
                Verdict::Fail("closed neighbourhood is not a clique of the square".into())
            };
            report.verdict("clique-certificate", clique);
            let spans = check_spans(&instance, &raw.to_vec())
                .map_err(|e| CliError::Internal(e.to_string()))?;
            report.verdict("spans-in-windows", span_verdict(spans, &instance));
        }
        None => {
            let why = too_large(instance.total(), opts.cap_vertices);
            report
                .warnings
                .push(format!("explicit checks skipped: {why}"));
            for name in ["proper-on-square", "clique-certificate", "spans-in-windows"] {
                report.verdict(name, Verdict::Skipped(why.clone()));
            }
        }
    }
    if wrapped {
        let budget = if used as u64 <= upper {
            Verdict::Pass
        } else {
            Verdict::Fail(format!("{used} colours exceed the upper bound {upper}"))
        };
        report.verdict("colour-budget", budget);
    }
    report.timings.push(("verify", start.elapsed()));

    if report.any_failed() {
        return Err(CliError::Internal(
            report
                .verdicts
                .iter()
                .filter(|(_, v)| v.is_fail())
                .map(|(n, v)| format!("{n}: {v:?}"))
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    Ok(report)
}

pub fn cmd_verify(
    instance_path: &Path,
    colouring_path: &Path,
    force_unwrapped: bool,
    opts: &GlobalOpts,
) -> Result<RunReport, CliError> {
    let instance = read_instance(instance_path)?;
    let text = fs::read_to_string(colouring_path).map_err(input(colouring_path))?;
    let colours = parse_colouring(&text, &instance).map_err(input(colouring_path))?;
    let mut report = summary(&instance);
    let upper = report.bounds.map(|b| b.upper).unwrap_or(0);

    let mut distinct = colours.clone();
    distinct.sort_unstable();
    distinct.dedup();
    report.colours_used = Some(distinct.len());

    // Colours outside [0, 2S] cannot come from a wrap.
    let top = 2 * total_span_bound(&instance) as Colour;
    let unwrapped = force_unwrapped || colours.iter().any(|&c| c < 0 || c > top);

    let start = Instant::now();
    let cert = clique_certificate(&instance);
    report.clique_size = Some(cert.size());
    match explicit_square(&instance, opts.cap_vertices) {
        Some(sq) => {
            let proper = check_proper(&sq, &colours).map_err(input(colouring_path))?;
            report.verdict("proper-on-square", proper_verdict(proper, &instance));
            let clique = if cert.verify_in(&sq) {
                Verdict::Pass
            } else {
                Verdict::Fail("closed neighbourhood is not a clique of the square".into())
            };
            report.verdict("clique-certificate", clique);
        }
        None => {
            let why = too_large(instance.total(), opts.cap_vertices);
            report
                .warnings
                .push(format!("explicit checks skipped: {why}"));
            report.verdict("proper-on-square", Verdict::Skipped(why.clone()));
            report.verdict("clique-certificate", Verdict::Skipped(why));
        }
    }
    if unwrapped {
        let spans = check_spans(&instance, &colours).map_err(input(colouring_path))?;
        report.verdict("spans-in-windows", span_verdict(spans, &instance));
        report.verdict(
            "colour-budget",
            Verdict::Skipped("unwrapped colourings are not bounded".into()),
        );
    } else {
        report.verdict(
            "spans-in-windows",
            Verdict::Skipped("colouring treated as wrapped; pass --unwrapped to check".into()),
        );
        let budget = if distinct.len() as u64 <= upper {
            Verdict::Pass
        } else {
            Verdict::Fail(format!(
                "{} colours exceed the upper bound {upper}",
                distinct.len()
            ))
        };
        report.verdict("colour-budget", budget);
    }
    report.timings.push(("verify", start.elapsed()));
    Ok(report)
}

pub fn cmd_bounds(
    instance_path: &Path,
    exact: bool,
    opts: &GlobalOpts,
) -> Result<RunReport, CliError> {
    let instance = read_instance(instance_path)?;
    let mut report = summary(&instance);
    let cert = clique_certificate(&instance);
    report.clique_size = Some(cert.size());
    if exact {
        let n = instance.total();
        let cap = opts.cap_exact.min(opts.cap_vertices);
        if n > cap {
            return Err(CliError::Input(format!(
                "--exact: square has {n} vertices, above --cap-exact {}",
                opts.cap_exact
            )));
        }
        let start = Instant::now();
        let sq = explicit_square(&instance, cap)
            .ok_or_else(|| CliError::Internal("explicit square below cap failed".into()))?;
        let chi = chi_exact_seeded(&sq, cap, &cert.members)
            .map_err(|e| CliError::Input(e.to_string()))?;
        report.chi_exact = Some(chi);
        report.timings.push(("exact", start.elapsed()));
        if let Some(b) = report.bounds {
            if (chi as u64) < b.lower || chi as u64 > b.upper {
                return Err(CliError::Internal(format!(
                    "exact value {chi} outside [{}, {}]",
                    b.lower, b.upper
                )));
            }
        }
    }
    Ok(report)
}

pub fn cmd_generate(
    kind: Kind,
    params: GenerateParams,
    count: usize,
    output: &Path,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    if count == 0 {
        return Err(CliError::Input("--count must be at least 1".into()));
    }
    let trees = (0..count)
        .map(|i| {
            let seed = params.seed.map(|s| s.wrapping_add(i as u64));
            generate(kind.into(), GenerateParams { seed, ..params })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Input(e.to_string()))?;
    write_output(output, &trees_to_text(&trees), stdout)
}
