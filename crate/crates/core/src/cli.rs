//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or invalid input,
//! 3 failed verification or infeasible correlator.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::export::{to_dot, to_tikz};
use crate::oracle::deterministic_checks;
use crate::pauli::PauliOperator;
use crate::sample::{sample, to_csv, InitError, PostSelect, SampleConfig};
use crate::surface::{
    build_diagram, build_layout, layout_document, logical_operators, CircuitSpec,
    LayoutAnnotations, Scheme,
};
use crate::verify::{four_qubit_check, verify, VerifyConfig};
use crate::web::{
    boundary_legs, detectors, read_webs_document, solve, web_space, webs_document,
    BoundaryCondition, Highlight, Solution, Web,
};
use crate::zx::{self, Diagram, NodeId};

pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "pauliweb",
    version,
    about = "Pauli webs of surface-code ZX diagrams"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Qubit and plaquette layout with logical operators.
    Layout(LayoutArgs),
    /// The layered ZX diagram of a circuit.
    Diagram(CircuitArgs),
    /// Correlator web and detector basis of a circuit.
    Webs(WebsArgs),
    /// Solve for a web on a diagram document.
    Solve(SolveArgs),
    /// Cross-check webs against the tableau oracle.
    Verify(VerifyArgs),
    /// Monte Carlo over initialisation errors.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Tikz,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "UPPER")]
pub enum Correlator {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PostSelectArg {
    None,
    FigureSet,
    AllDeterministic,
}

impl From<PostSelectArg> for PostSelect {
    fn from(p: PostSelectArg) -> Self {
        match p {
            PostSelectArg::None => PostSelect::None,
            PostSelectArg::FigureSet => PostSelect::FigureSet,
            PostSelectArg::AllDeterministic => PostSelect::AllDeterministic,
        }
    }
}

#[derive(Args, Debug)]
pub struct LayoutArgs {
    #[arg(short, long)]
    pub distance: usize,
    /// Annotate with the init pattern and deterministic checks.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CircuitArgs {
    #[arg(short, long)]
    pub distance: usize,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    #[arg(long, default_value = "inject-y")]
    pub scheme: Scheme,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WebsArgs {
    #[command(flatten)]
    pub circuit: CircuitArgs,
    /// Logical correlator to solve for; defaults to the scheme's logical.
    #[arg(long, value_enum)]
    pub correlator: Option<Correlator>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Diagram document.
    pub diagram: PathBuf,
    /// Leg highlight, e.g. `out4=Y`; repeatable.
    #[arg(long = "bc")]
    pub legs: Vec<String>,
    /// Pauli string over the boundary legs, e.g. `+X0 Y2`.
    #[arg(long)]
    pub operator: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(short, long)]
    pub distance: usize,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    #[arg(long, default_value = "inject-y")]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Error-free oracle shots.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long)]
    pub exhaustive_errors: bool,
    /// Random error sets checked when not exhaustive.
    #[arg(long, default_value_t = 500)]
    pub error_samples: usize,
    /// Also run the four-qubit random-measurement instance.
    #[arg(long = "footnote5")]
    pub four_qubit: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(short, long)]
    pub distance: usize,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    #[arg(long, default_value = "inject-y")]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    /// Per-qubit X error probability at initialisation.
    #[arg(short = 'p', long, default_value_t = 0.0)]
    pub error_rate: f64,
    /// Draw Z errors at the same rate.
    #[arg(long)]
    pub z_errors: bool,
    /// Error applied on every shot, e.g. `X14`; repeatable.
    #[arg(long = "error")]
    pub errors: Vec<InitError>,
    #[arg(long, value_enum, default_value_t = PostSelectArg::FigureSet)]
    pub postselect: PostSelectArg,
    /// Post-select figure-set plaquettes in every round.
    #[arg(long)]
    pub all_rounds: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Shot rows go here and the summary to stdout; without it, rows go to
    /// stdout and the summary to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Io(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Failure::Io(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Layout(a) => cmd_layout(&a, stdout),
        Command::Diagram(a) => cmd_diagram(&a, stdout),
        Command::Webs(a) => cmd_webs(&a, stdout, stderr),
        Command::Solve(a) => cmd_solve(&a, stdout, stderr),
        Command::Verify(a) => cmd_verify(&a, stdout),
        Command::Sample(a) => cmd_sample(&a, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Io(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_IO
        }
        Err(Failure::Failed(m)) => {
            let _ = writeln!(stderr, "{m}");
            EXIT_FAILED
        }
    }
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, text: &str) -> CmdResult {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn reject_format(format: Format, allowed: &[Format]) -> CmdResult {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "format {:?} is not available for this command",
            format
        )))
    }
}

fn render(d: &Diagram, web: Option<&Web>, format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Dot => to_dot(d, web)?,
        Format::Tikz => to_tikz(d, web)?,
        _ => unreachable!("json handled by the caller"),
    })
}

fn circuit(a: &CircuitArgs) -> Result<(CircuitSpec, Diagram), Failure> {
    let spec = CircuitSpec::for_scheme(a.distance, a.scheme, a.rounds)?;
    let d = build_diagram(&spec);
    Ok((spec, d))
}

fn cmd_layout(a: &LayoutArgs, stdout: &mut dyn Write) -> CmdResult {
    reject_format(a.format, &[Format::Json])?;
    let layout = build_layout(a.distance)?;
    let text = match a.scheme {
        Some(scheme) => {
            let spec = CircuitSpec::for_scheme(a.distance, scheme, a.rounds)?;
            let checks = deterministic_checks(&build_diagram(&spec), false)?;
            layout_document(
                &layout,
                Some(&LayoutAnnotations {
                    scheme,
                    init: spec.init(),
                    deterministic_checks: &checks,
                }),
            )
        }
        None => layout_document(&layout, None),
    };
    emit(a.out.as_deref(), stdout, &text)
}

fn cmd_diagram(a: &CircuitArgs, stdout: &mut dyn Write) -> CmdResult {
    reject_format(a.format, &[Format::Json, Format::Dot, Format::Tikz])?;
    let (_, d) = circuit(a)?;
    let text = match a.format {
        Format::Json => zx::serialize(&d),
        f => render(&d, None, f)?,
    };
    emit(a.out.as_deref(), stdout, &text)
}

fn correlator_name(c: Correlator) -> &'static str {
    match c {
        Correlator::X => "X",
        Correlator::Y => "Y",
        Correlator::Z => "Z",
    }
}

fn cmd_webs(a: &WebsArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let c = &a.circuit;
    reject_format(c.format, &[Format::Json, Format::Dot, Format::Tikz])?;
    let (spec, d) = circuit(c)?;
    let correlator = a.correlator.unwrap_or(match c.scheme {
        Scheme::InjectY => Correlator::Y,
        Scheme::MemoryZ => Correlator::Z,
        Scheme::MemoryX => Correlator::X,
    });
    let logicals = logical_operators(spec.layout());
    let op = match correlator {
        Correlator::X => &logicals.x,
        Correlator::Y => &logicals.y,
        Correlator::Z => &logicals.z,
    };
    let space = web_space(&d);
    let _ = writeln!(
        stderr,
        "web space: dimension {}, rank {}, {} edges",
        space.dimension(),
        space.rank,
        d.num_edges()
    );
    let web = match solve(&d, &BoundaryCondition::from_operator(&d, op)?)? {
        Solution::Web(w) => w,
        Solution::Infeasible(witness) => {
            return Err(Failure::Failed(format!(
                "correlator {} ({op}) is infeasible: {witness}",
                correlator_name(correlator)
            )))
        }
    };
    let dets = detectors(&d);
    let _ = writeln!(
        stderr,
        "correlator {}: {} stubs; {} detectors",
        correlator_name(correlator),
        web.stub_set().len(),
        dets.len()
    );
    let text = match c.format {
        Format::Json => {
            let mut named = vec![(format!("correlator-{}", correlator_name(correlator)), &web)];
            named.extend(
                dets.iter()
                    .enumerate()
                    .map(|(k, w)| (format!("detector-{k}"), w)),
            );
            webs_document(&d, &named)?
        }
        f => render(&d, Some(&web), f)?,
    };
    emit(c.out.as_deref(), stdout, &text)
}

fn parse_leg(text: &str) -> Result<(NodeId, Highlight), Failure> {
    let (leg, h) = text
        .split_once('=')
        .ok_or_else(|| Failure::Usage(format!("expected LEG=HIGHLIGHT, got {text:?}")))?;
    let h: Highlight = h.trim().parse()?;
    Ok((NodeId::new(leg.trim()), h))
}

fn cmd_solve(a: &SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    reject_format(a.format, &[Format::Json, Format::Dot, Format::Tikz])?;
    let text = fs::read_to_string(&a.diagram)
        .map_err(|e| Failure::Usage(format!("{}: {e}", a.diagram.display())))?;
    let d = match read_webs_document(&text) {
        Ok((d, _)) => d,
        Err(_) => zx::deserialize(&text)?,
    };
    let violations = d.validate();
    if let Some(v) = violations.first() {
        return Err(Failure::Usage(format!("invalid diagram: {v}")));
    }
    let mut bc = match &a.operator {
        Some(s) => {
            let n = boundary_legs(&d).len();
            BoundaryCondition::from_operator(&d, &PauliOperator::parse(n, s)?)?
        }
        None => BoundaryCondition::new(),
    };
    for leg in &a.legs {
        let (id, h) = parse_leg(leg)?;
        bc.set(&d, &id, h)?;
    }
    let web = match solve(&d, &bc)? {
        Solution::Web(w) => w,
        Solution::Infeasible(witness) => {
            return Err(Failure::Failed(format!("infeasible: {witness}")))
        }
    };
    let _ = writeln!(
        stderr,
        "solution: boundary {}, {} stubs",
        web.boundary_restriction(),
        web.stub_set().len()
    );
    let text = match a.format {
        Format::Json => webs_document(&d, &[("solution".to_owned(), &web)])?,
        f => render(&d, Some(&web), f)?,
    };
    emit(a.out.as_deref(), stdout, &text)
}

fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> CmdResult {
    if a.samples == 0 {
        return Err(Failure::Usage("samples must be at least 1".into()));
    }
    let mut cfg = VerifyConfig::new(a.distance, a.rounds, a.scheme);
    cfg.seed = a.seed;
    cfg.samples = a.samples;
    cfg.exhaustive_errors = a.exhaustive_errors;
    cfg.error_samples = a.error_samples;
    let mut checks = verify(&cfg)?;
    if a.four_qubit {
        checks.extend(four_qubit_check(a.seed).checks());
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut text: String = checks.iter().map(|c| format!("{c}\n")).collect();
    text.push_str(&format!(
        "{} of {} checks passed\n",
        checks.len() - failed,
        checks.len()
    ));
    emit(a.out.as_deref(), stdout, &text)?;
    if failed > 0 {
        Err(Failure::Failed(format!("{failed} checks failed")))
    } else {
        Ok(())
    }
}

fn cmd_sample(a: &SampleArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    reject_format(a.format, &[Format::Csv, Format::Json])?;
    let mut cfg = SampleConfig::new(a.distance, a.rounds, a.scheme);
    cfg.seed = a.seed;
    cfg.shots = a.shots;
    cfg.error_rate = a.error_rate;
    cfg.z_errors = a.z_errors;
    cfg.fixed = a.errors.clone();
    cfg.postselect = a.postselect.into();
    cfg.all_rounds = a.all_rounds;
    let res = sample(&cfg)?;
    let summary = res.summary.to_json();
    match a.format {
        Format::Csv => {
            let csv = to_csv(&res.rows);
            match &a.out {
                Some(path) => {
                    emit(Some(path), stdout, &csv)?;
                    emit(None, stdout, &summary)
                }
                None => {
                    let _ = stderr.write_all(summary.as_bytes());
                    emit(None, stdout, &csv)
                }
            }
        }
        _ => {
            let doc = serde_json::json!({ "summary": res.summary, "shots": res.rows });
            let text =
                serde_json::to_string_pretty(&doc).expect("sample document serializes") + "\n";
            emit(a.out.as_deref(), stdout, &text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("pauliweb").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn even_distance_is_a_usage_error() {
        let (code, _, err) = call(&["layout", "-d", "4"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("odd"));
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        assert_eq!(call(&["layout", "--bogus"]).0, EXIT_USAGE);
    }

    #[test]
    fn memory_layout_has_eight_plaquettes() {
        let (code, out, _) = call(&["layout", "-d", "3", "--scheme", "memory-z"]);
        assert_eq!(code, 0);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["plaquettes"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn infeasible_correlator_exits_three() {
        let (code, _, err) = call(&[
            "webs",
            "-d",
            "3",
            "--scheme",
            "inject-y",
            "--correlator",
            "Z",
        ]);
        assert_eq!(code, EXIT_FAILED);
        assert!(err.contains("q2:0"), "{err}");
    }

    #[test]
    fn sample_rejects_bad_rate() {
        let (code, _, _) = call(&["sample", "-d", "3", "-p", "2"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn csv_header_is_fixed() {
        let (code, out, _) = call(&["sample", "-d", "3", "--shots", "3"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("shot,accepted,logical_y,n_errors\n"));
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn injected_leg_is_y_in_the_correlator_web() {
        let (code, out, _) = call(&[
            "webs",
            "-d",
            "5",
            "--scheme",
            "inject-y",
            "--correlator",
            "Y",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains(r#"["q4:0","q4:1","Y"]"#));
    }

    #[test]
    fn memory_z_correlator_is_feasible() {
        let (code, out, _) = call(&[
            "webs",
            "-d",
            "3",
            "--scheme",
            "memory-z",
            "--correlator",
            "Z",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("\"correlator-Z\""));
    }

    #[test]
    fn verification_suites_pass() {
        for args in [
            &[
                "verify",
                "-d",
                "3",
                "--scheme",
                "inject-y",
                "--exhaustive-errors",
            ][..],
            &[
                "verify",
                "-d",
                "5",
                "--scheme",
                "memory-z",
                "--samples",
                "500",
            ][..],
            &["verify", "-d", "5", "--scheme", "inject-y", "--footnote5"][..],
        ] {
            let (code, out, _) = call(args);
            assert_eq!(code, 0, "{args:?}\n{out}");
            assert!(!out.contains("FAIL"));
        }
    }

    #[test]
    fn layout_lists_ten_postselected_checks() {
        let (_, out, _) = call(&["layout", "-d", "5", "--scheme", "inject-y"]);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["deterministic_checks"].as_array().unwrap().len(), 10);
    }

    #[test]
    fn solve_reads_an_exported_diagram() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.json");
        let p = path.to_str().unwrap();
        assert_eq!(call(&["diagram", "-d", "3", "--out", p]).0, 0);
        let (code, out, _) = call(&["solve", p, "--operator", "+X0 X1 Y2 Z5 Z8"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"solution\""));
        let (code, _, err) = call(&["solve", p, "--operator", "+Z2 Z5 Z8"]);
        assert_eq!(code, EXIT_FAILED, "{err}");
    }

    #[test]
    fn conditional_rate_is_reported() {
        let (code, out, _) = call(&[
            "sample", "-d", "5", "-p", "0.01", "--shots", "2000", "--format", "json",
        ]);
        assert_eq!(code, 0);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        let s = &doc["summary"];
        assert!(
            s["conditional_logical_error"]["rate"].as_f64()
                <= s["raw_logical_error"]["rate"].as_f64()
        );
    }
}
