//! Command-line driver: evaluate the recurrence, count and enumerate
//! matchings, render graphs, draw random matchings, run the integer
//! sequences, and execute the verification suites.
//!
//! Exit codes: 0 success, 2 invalid input, 3 violated invariant (a failed
//! verification or an internal exactness check).

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use octa_core::graph::build_subgraph;
use octa_core::lattice::{height_from_json_str, HeightFunction, LatticePoint};
use octa_core::laurent::{poly_to_json, LaurentPoly};
use octa_core::matching::{enumerate_matchings, EnumerationLimits};
use octa_core::recurrence::{gale_robinson_sequence, EvalContext, TermCounter};
use octa_core::render::{graph_to_dot, graph_to_json, graph_to_svg, matchings_to_json, SvgOptions};
use octa_core::sampler::{complete_matching, sample_matching};
use octa_core::verify::{run_suite_by_name, suite_names, SuiteOptions, SuiteReport};

#[derive(Parser)]
#[command(
    name = "octa",
    version,
    about = "Octahedron recurrence and crosses-and-wrenches toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Svg,
    Dot,
}

#[derive(Args)]
struct JobArgs {
    /// Height-function JSON file; defaults to the aztec surface.
    #[arg(long)]
    height: Option<PathBuf>,
    /// Apex triple n i j with n ≡ i+j (mod 2).
    #[arg(long, num_args = 3, value_names = ["N", "I", "J"], allow_negative_numbers = true)]
    apex: Vec<i64>,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the recurrence at the apex as a Laurent polynomial.
    Eval {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Count the terms of the recurrence value (equivalently, matchings).
    Count {
        #[command(flatten)]
        job: JobArgs,
        /// recurrence: all-ones value; enumerate: backtracking count;
        /// both: run the two and insist they agree.
        #[arg(long, default_value = "recurrence")]
        method: String,
    },
    /// List every matching of the subgraph at the apex.
    Enumerate {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Cap on the number of matchings (OCTA_MAX_MATCHINGS also applies).
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Render the subgraph at the apex.
    Graph {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long, value_enum, default_value = "svg")]
        format: Format,
        /// Draw face and edge labels in the SVG output.
        #[arg(long)]
        labels: bool,
    },
    /// Draw random matchings, uniformly.
    Sample {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Print a three-term Gale-Robinson sequence.
    Somos {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
        #[arg(long, default_value_t = 1)]
        r: i64,
        #[arg(long, default_value_t = 1)]
        s: i64,
        /// Number of terms.
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        /// One of the suite names, or `all`.
        suite: String,
        /// Families to cover (default all).
        #[arg(long)]
        family: Vec<String>,
        #[arg(long, default_value_t = 10)]
        max_cone: usize,
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Invariant(String),
}

impl From<octa_core::Error> for Failure {
    fn from(e: octa_core::Error) -> Self {
        if e.is_invariant_violation() {
            Failure::Invariant(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violated: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_height(path: &Option<PathBuf>) -> Result<HeightFunction, Failure> {
    match path {
        None => Ok(HeightFunction::aztec()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?;
            Ok(height_from_json_str(&text)?)
        }
    }
}

fn parse_apex(triple: &[i64]) -> Result<LatticePoint, Failure> {
    if triple.len() != 3 {
        return Err(Failure::Usage("--apex takes exactly N I J".into()));
    }
    Ok(LatticePoint::new(triple[0], triple[1], triple[2])?)
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match output {
        None => {
            print!("{content}");
            std::io::stdout()
                .flush()
                .map_err(|e| Failure::Usage(format!("stdout: {e}")))
        }
        Some(p) => fs::write(p, content)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
    }
}

fn env_limits(limit: Option<u64>) -> EnumerationLimits {
    let from_env = std::env::var("OCTA_MAX_MATCHINGS")
        .ok()
        .and_then(|s| s.parse::<u64>().ok());
    EnumerationLimits { max_vertices: None, max_matchings: limit.or(from_env) }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Eval { job, format } => {
            let h = load_height(&job.height)?;
            let apex = parse_apex(&job.apex)?;
            let ctx = EvalContext::new(h);
            let value: std::sync::Arc<LaurentPoly> = ctx.eval(apex)?;
            let rendered = match format {
                Format::Text => format!("{value}\n"),
                Format::Json => format!("{}\n", poly_to_json(&value)),
                _ => return Err(Failure::Usage("eval emits text or json".into())),
            };
            emit(&job.output, &rendered)
        }
        Command::Count { job, method } => {
            let h = load_height(&job.height)?;
            let apex = parse_apex(&job.apex)?;
            let value = match method.as_str() {
                "recurrence" => TermCounter::new(h).count_numeric(apex)?.to_string(),
                "enumerate" => {
                    let g = build_subgraph(&h, apex)?;
                    octa_core::matching::count_matchings(&g, env_limits(None))?.to_string()
                }
                "both" => {
                    let numeric = TermCounter::new(h.clone()).count_numeric(apex)?;
                    let g = build_subgraph(&h, apex)?;
                    let enumerated =
                        octa_core::matching::count_matchings(&g, env_limits(None))?;
                    if numeric != enumerated.into() {
                        return Err(Failure::Invariant(format!(
                            "recurrence count {numeric} disagrees with enumeration {enumerated}"
                        )));
                    }
                    numeric.to_string()
                }
                other => {
                    return Err(Failure::Usage(format!(
                        "unknown method `{other}`; use recurrence, enumerate, or both"
                    )))
                }
            };
            emit(&job.output, &format!("{value}\n"))
        }
        Command::Enumerate { job, format, limit } => {
            let h = load_height(&job.height)?;
            let apex = parse_apex(&job.apex)?;
            let g = build_subgraph(&h, apex)?;
            let ms = enumerate_matchings(&g, env_limits(limit))?;
            let rendered = match format {
                Format::Json => format!("{}\n", matchings_to_json(&g, &ms)),
                Format::Svg => {
                    let mut s = String::new();
                    for m in &ms {
                        s.push_str(&graph_to_svg(&g, Some(m), SvgOptions::default()));
                    }
                    s
                }
                _ => return Err(Failure::Usage("enumerate emits json or svg".into())),
            };
            emit(&job.output, &rendered)
        }
        Command::Graph { job, format, labels } => {
            let h = load_height(&job.height)?;
            let apex = parse_apex(&job.apex)?;
            let g = build_subgraph(&h, apex)?;
            let rendered = match format {
                Format::Svg => graph_to_svg(&g, None, SvgOptions { show_labels: labels }),
                Format::Json => format!("{}\n", graph_to_json(&g)),
                Format::Dot => graph_to_dot(&g),
                Format::Text => format!(
                    "apex ({}, {}, {}): {} vertices, {} edges, {} closed faces, {} open faces\n",
                    g.apex.n,
                    g.apex.i,
                    g.apex.j,
                    g.vertex_count(),
                    g.edges.len(),
                    g.closed_faces.len(),
                    g.open_faces.len()
                ),
            };
            emit(&job.output, &rendered)
        }
        Command::Sample { job, seed, count, format } => {
            let h = load_height(&job.height)?;
            let apex = parse_apex(&job.apex)?;
            let mut rendered = String::new();
            let mut json_samples = Vec::new();
            for k in 0..count {
                let outcome = sample_matching(&h, apex, seed.wrapping_add(k))?;
                match format {
                    Format::Json => {
                        let labels: Vec<serde_json::Value> = outcome
                            .edges
                            .iter()
                            .map(|l| serde_json::json!([l.kind.letter().to_string(), l.i, l.j]))
                            .collect();
                        json_samples.push(serde_json::json!({
                            "seed": seed.wrapping_add(k),
                            "labels": labels,
                        }));
                    }
                    Format::Svg => {
                        let g = build_subgraph(&h, apex)?;
                        let m = complete_matching(&g, &outcome.edges)?;
                        rendered.push_str(&graph_to_svg(&g, Some(&m), SvgOptions::default()));
                    }
                    _ => return Err(Failure::Usage("sample emits json or svg".into())),
                }
            }
            if format == Format::Json {
                rendered = format!("{}\n", serde_json::json!({ "samples": json_samples }));
            }
            emit(&job.output, &rendered)
        }
        Command::Somos { k, a, b, r, s, n, output } => {
            let seq = gale_robinson_sequence(k, a, b, &r.into(), &s.into(), n)?;
            let line: Vec<String> = seq.iter().map(|g| g.to_string()).collect();
            emit(&output, &format!("{}\n", line.join(" ")))
        }
        Command::Verify { suite, family, max_cone, seed, output } => {
            let mut options = SuiteOptions { max_cone, seed, ..SuiteOptions::default() };
            if !family.is_empty() {
                options.families = family;
            }
            let reports: Vec<SuiteReport> = if suite == "all" {
                suite_names()
                    .iter()
                    .map(|name| run_suite_by_name(name, &options))
                    .collect::<Result<_, _>>()?
            } else {
                vec![run_suite_by_name(&suite, &options)?]
            };
            let mut text = String::new();
            let mut all_passed = true;
            for report in &reports {
                text.push_str(&report.render());
                all_passed &= report.passed();
            }
            emit(&output, &text)?;
            if all_passed {
                Ok(())
            } else {
                Err(Failure::Invariant("verification suite failed".into()))
            }
        }
    }
}
