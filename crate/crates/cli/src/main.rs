//! Command-line front end: compile network files, synthesize stabilizers,
//! verify externally supplied laws, and emit closed-loop transition graphs.
//!
//! Exit codes: 0 success / verified, 1 usage or input error, 2 problem
//! unsolvable or verification failed (a report is still written).

mod input;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use stpstab_core::dot::closed_loop_dot;
use stpstab_core::ledley::FeedbackLaw;
use stpstab_core::matrix::LogicalMatrix;
use stpstab_core::report::{stabilize_report, verify_report, StabilizeReport};
use stpstab_core::synth::{
    closed_loop, point_stabilize, select_stabilizer, set_stabilize, Outcome, SelectionPolicy,
    TargetSpec,
};

use input::NetworkInput;

#[derive(Parser)]
#[command(
    name = "stpstab",
    version,
    about = "Semi-tensor-product stabilizer synthesis for logical control networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a network file to its algebraic form and print it as JSON
    Compile {
        /// Network description (DSL) or previously compiled JSON
        file: PathBuf,
    },
    /// Synthesize all time-optimal state-feedback stabilizers for a target
    Stabilize {
        file: PathBuf,
        #[command(flatten)]
        target: TargetArgs,
        /// Include up to N enumerated laws in the report
        #[arg(long, value_name = "N")]
        enumerate: Option<usize>,
        /// Which family member the report selects
        #[arg(long, value_enum, default_value_t = Policy::Smallest)]
        policy: Policy,
        /// Write the selected law's closed-loop graph as DOT
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        /// Write the report to a file in addition to stdout
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Check a feedback law: layer inequalities, convergence, optimality
    Verify {
        file: PathBuf,
        /// Law file: N whitespace-separated control indices
        #[arg(long, value_name = "FILE")]
        law: PathBuf,
        #[command(flatten)]
        target: TargetArgs,
    },
    /// Emit a closed-loop state transition graph as DOT
    Graph {
        file: PathBuf,
        /// Law file to build the closed loop from
        #[arg(long, value_name = "FILE")]
        law: Option<PathBuf>,
        /// Stabilization report to read the closed-loop matrix from
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        /// Output path (stdout when omitted)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TargetArgs {
    /// Target point as a value tuple v1,...,vn
    #[arg(long, value_name = "TUPLE")]
    point: Option<String>,
    /// Target point as a delta index in 1..=N
    #[arg(long, value_name = "I")]
    index: Option<usize>,
    /// Target set: inline "{(...),(...)}" / "{i,j}" or a file path
    #[arg(long, value_name = "SET")]
    set: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Smallest,
    Largest,
}

impl From<Policy> for SelectionPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Smallest => SelectionPolicy::SmallestControl,
            Policy::Largest => SelectionPolicy::LargestControl,
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Compile { file } => {
            let net = NetworkInput::load(&file)?;
            println!("{}", serde_json::to_string_pretty(&net.compiled())?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Stabilize { file, target, enumerate, policy, dot, json } => {
            let net = NetworkInput::load(&file)?;
            let m_f = net.m_f()?;
            let target = net.resolve_target(&target)?;
            let is_set = matches!(target, TargetSpec::Set(_));
            let outcome = match &target {
                TargetSpec::Point(x) => point_stabilize(&m_f, *x)?,
                TargetSpec::Set(s) => set_stabilize(&m_f, s)?,
            };
            let report = stabilize_report(
                &m_f,
                &net.control_radices(),
                &outcome,
                is_set,
                policy.into(),
                enumerate,
            )?;
            emit_report(&report, json.as_deref())?;
            if let (Some(dot_path), Outcome::Stabilizable(st)) = (&dot, &outcome) {
                let law = select_stabilizer(&st.family, policy.into());
                let cl = closed_loop(&m_f, &law, &st.core)?;
                let text = closed_loop_dot(net.name(), cl.m_c(), &net.state_labels());
                fs::write(dot_path, text)
                    .with_context(|| format!("writing {}", dot_path.display()))?;
            }
            Ok(if outcome.is_solvable() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Verify { file, law, target } => {
            let net = NetworkInput::load(&file)?;
            let m_f = net.m_f()?;
            let target = net.resolve_target(&target)?;
            let law = read_law(&law, &m_f)?;
            let outcome = match &target {
                TargetSpec::Point(x) => point_stabilize(&m_f, *x)?,
                TargetSpec::Set(s) => set_stabilize(&m_f, s)?,
            };
            let report = verify_report(&m_f, &outcome, &target, &law)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Graph { file, law, report, out } => {
            let net = NetworkInput::load(&file)?;
            let m_f = net.m_f()?;
            let n = m_f.rows();
            let m_c = match (law, report) {
                (Some(law_path), None) => {
                    let g = read_law(&law_path, &m_f)?;
                    m_f.stp(g.matrix())?.stp(&LogicalMatrix::power_reducing(n)?)?
                }
                (None, Some(report_path)) => {
                    let text = fs::read_to_string(&report_path)
                        .with_context(|| format!("reading {}", report_path.display()))?;
                    let report: StabilizeReport = serde_json::from_str(&text)
                        .with_context(|| format!("parsing report {}", report_path.display()))?;
                    let cols = report.m_c.ok_or_else(|| {
                        anyhow!("report has no closed-loop matrix (unsolvable run?)")
                    })?;
                    LogicalMatrix::new(n, cols).context("closed-loop matrix in report")?
                }
                _ => bail!("exactly one of --law or --report is required"),
            };
            let text = closed_loop_dot(net.name(), &m_c, &net.state_labels());
            match out {
                Some(path) => {
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn emit_report(report: &StabilizeReport, json_path: Option<&std::path::Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    println!("{text}");
    if let Some(path) = json_path {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn read_law(path: &std::path::Path, m_f: &LogicalMatrix) -> Result<FeedbackLaw> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading law file {}", path.display()))?;
    let n = m_f.rows();
    let m = m_f.num_cols() / n;
    let cols: Vec<usize> = text
        .split_whitespace()
        .map(|tok| tok.parse::<usize>().with_context(|| format!("bad control index '{tok}'")))
        .collect::<Result<_>>()?;
    if cols.len() != n {
        bail!("law file lists {} control indices, expected one per state ({n})", cols.len());
    }
    let matrix = LogicalMatrix::new(m, cols).context("law column indices must lie in 1..=M")?;
    Ok(FeedbackLaw::new(matrix))
}
