//! `lowtw`: mean, ratio and energy values of weighted digraphs from the
//! command line.
//!
//! Exit codes: 0 success, 1 bad input or usage, 2 internal failure or a
//! cross-check mismatch, 3 a `--decide` answer of "no".

mod bench;
mod compute;
mod report;
mod selftest;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lowtw_core::gen::{generate, largest_scc, GenKind, GenParams};
use lowtw_core::energy::decide_energy;
use lowtw_core::graph::{parse_graph, Format};
use lowtw_core::rational::parse_rational;
use lowtw_core::treedec::{validate, Heuristic, TreeDecomposition};
use lowtw_core::{Error, WeightedDigraph};
use serde_json::{json, Map, Value};

use crate::compute::{approx_all_nodes, checked_decomposition, mincycle, solve, Algo, Problem};
use crate::report::Style;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("{0}: {1}")]
    InFile(String, Error),

    #[error("{0}: {1}")]
    Io(String, #[source] io::Error),

    #[error("{0}")]
    Usage(String),

    /// Two algorithms disagreed.
    #[error("mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Internal(_)) | CliError::InFile(_, Error::Internal(_)) | CliError::Mismatch(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "lowtw", version, about = "Minimum mean, ratio and energy values of weighted digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Graph file, or `-` for standard input.
    file: PathBuf,

    /// Input format: dimacs, edgelist or dot. Guessed from the content when absent.
    #[arg(long)]
    format: Option<Format>,

    /// Elimination heuristic for tree decompositions: min-degree or min-fill.
    #[arg(long, default_value = "min-degree")]
    heuristic: Heuristic,
}

#[derive(Args, Debug, Clone, Copy)]
struct Output {
    /// Emit JSON instead of TSV.
    #[arg(long)]
    json: bool,

    /// Also print operation counters.
    #[arg(long)]
    stats: bool,
}

impl From<Output> for Style {
    fn from(o: Output) -> Style {
        Style { json: o.json, stats: o.stats }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimum mean cycle value reachable from each node.
    Mean {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// tw, karp or oracle.
        #[arg(long, default_value = "tw")]
        algo: Algo,
        /// Relative error bound in (0,1); switches to the approximation.
        #[arg(long, value_name = "EPS")]
        approx: Option<String>,
    },
    /// Minimum ratio (weight over transit) cycle value reachable from each node.
    Ratio {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// tw or oracle.
        #[arg(long, default_value = "tw")]
        algo: Algo,
    },
    /// Minimum initial credit of each node (`inf` when none suffices).
    Energy {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// general, tw or oracle.
        #[arg(long, default_value = "general")]
        algo: Algo,
        /// Answer whether CREDIT suffices at NODE: exit 0 for yes, 3 for no.
        #[arg(long, num_args = 2, value_names = ["NODE", "CREDIT"], allow_hyphen_values = true)]
        decide: Option<Vec<String>>,
    },
    /// Minimum cycle weight found by the decomposition sweep.
    Mincycle {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Print a balanced binary tree decomposition, one `b <id> <parent|-> <node...>` line per bag.
    Treedec {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Check the decomposition and exit nonzero on a violation.
        #[arg(long)]
        validate: bool,
        /// Read the decomposition from this file instead of building one.
        #[arg(long, value_name = "FILE")]
        decomposition: Option<PathBuf>,
    },
    /// Write a seeded synthetic graph to standard output.
    Gen {
        /// ktree, sparse-random or cfg-like.
        kind: GenKind,
        /// Number of nodes.
        n: usize,
        /// Clique size for k-trees, average out-degree for sparse graphs.
        #[arg(default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inclusive weight range LO,HI.
        #[arg(long, default_value = "-10,10", allow_hyphen_values = true)]
        weights: String,
        /// Inclusive transit range LO,HI (LO >= 1).
        #[arg(long, default_value = "1,1")]
        transit: String,
        /// Keep only the largest strongly connected component.
        #[arg(long)]
        strong: bool,
        /// Output format: dimacs, edgelist or dot.
        #[arg(long, default_value = "dimacs")]
        format: Format,
    },
    /// Cross-check and time algorithms over a directory of graphs.
    Bench {
        /// mean, ratio or energy.
        problem: Problem,
        dir: PathBuf,
        /// Comma-separated algorithms; the first is the reference.
        #[arg(long)]
        algos: Option<String>,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value = "min-degree")]
        heuristic: Heuristic,
        #[arg(long)]
        json: bool,
    },
    /// Run every algorithm against the brute-force baselines on random graphs.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances per suite.
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long)]
        json: bool,
    },
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io("standard input".into(), e))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    }
    Ok(text)
}

fn load(input: &Input) -> Result<WeightedDigraph, CliError> {
    let text = read_text(&input.file)?;
    let format = input.format.unwrap_or_else(|| Format::sniff(&text));
    parse_graph(&text, format).map_err(|e| CliError::InFile(input.file.display().to_string(), e))
}

fn range(s: &str, what: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Usage(format!("{what} must look like LO,HI, got `{s}`"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn stdout_err(e: io::Error) -> CliError {
    CliError::Io("standard output".into(), e)
}

fn run(cli: Cli, out: &mut impl Write) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Mean { input, output, algo, approx } => {
            let g = load(&input)?;
            let (values, stats) = match approx {
                Some(eps) => {
                    if algo != Algo::Tw {
                        return Err(CliError::Usage("--approx only works with --algo tw".into()));
                    }
                    approx_all_nodes(&g, input.heuristic, &parse_rational(&eps)?)?
                }
                None => solve(Problem::Mean, algo, &g, input.heuristic)?,
            };
            report::node_values(out, output.into(), "mean", g.labels(), &values, &stats).map_err(stdout_err)?;
        }
        Command::Ratio { input, output, algo } => {
            let g = load(&input)?;
            let (values, stats) = solve(Problem::Ratio, algo, &g, input.heuristic)?;
            report::node_values(out, output.into(), "ratio", g.labels(), &values, &stats).map_err(stdout_err)?;
        }
        Command::Energy { input, output, algo, decide } => {
            let g = load(&input)?;
            if let Some(args) = decide {
                let [node, credit] = &args[..] else { unreachable!("clap enforces two values") };
                let u = g
                    .find_label(node)
                    .ok_or_else(|| CliError::Usage(format!("unknown node `{node}`")))?;
                let credit: i128 = credit
                    .parse()
                    .map_err(|_| CliError::Usage(format!("credit must be an integer, got `{credit}`")))?;
                let yes = decide_energy(&g, u, credit)?;
                report::scalar(out, output.into(), "energy", "decision", json!(yes), &Vec::new()).map_err(stdout_err)?;
                return Ok(ExitCode::from(if yes { 0 } else { 3 }));
            }
            let (values, stats) = solve(Problem::Energy, algo, &g, input.heuristic)?;
            report::node_values(out, output.into(), "energy", g.labels(), &values, &stats).map_err(stdout_err)?;
        }
        Command::Mincycle { input, output } => {
            let g = load(&input)?;
            let (value, stats) = mincycle(&g, input.heuristic)?;
            let shown = value.map_or(json!("inf"), |c| i64::try_from(c).map_or_else(|_| json!(c.to_string()), |c| json!(c)));
            report::scalar(out, output.into(), "mincycle", "value", shown, &stats).map_err(stdout_err)?;
        }
        Command::Treedec { input, output, validate: check, decomposition } => {
            let g = load(&input)?;
            let supplied = decomposition.is_some();
            let t = match &decomposition {
                Some(path) => TreeDecomposition::from_text(&read_text(path)?, g.labels())
                    .map_err(|e| CliError::InFile(path.display().to_string(), e))?,
                None => checked_decomposition(&g, input.heuristic)?,
            };
            if check {
                if let Err(v) = validate(&t, &g) {
                    let msg = format!("decomposition invalid: {v}");
                    return Err(if supplied { Error::Domain(msg) } else { Error::Internal(msg) }.into());
                }
            }
            treedec_output(out, output, &t, &g).map_err(stdout_err)?;
        }
        Command::Gen { kind, n, k, seed, weights, transit, strong, format } => {
            let p = GenParams {
                n,
                k,
                weights: range(&weights, "--weights")?,
                transit: range(&transit, "--transit")?,
                seed,
            };
            let mut g = generate(kind, &p)?;
            if strong {
                g = largest_scc(&g);
            }
            let text = match format {
                Format::Dimacs => g.to_dimacs(),
                Format::EdgeList => g.to_edgelist(),
                Format::Dot => g.to_dot(),
            };
            out.write_all(text.as_bytes()).map_err(stdout_err)?;
        }
        Command::Bench { problem, dir, algos, reps, heuristic, json } => {
            let algos = match algos {
                Some(list) => list
                    .split(',')
                    .map(|a| a.trim().parse::<Algo>())
                    .collect::<Result<Vec<_>, _>>()?,
                None => match problem {
                    Problem::Mean => vec![Algo::Tw, Algo::Karp],
                    Problem::Ratio => vec![Algo::Tw, Algo::Oracle],
                    Problem::Energy => vec![Algo::General, Algo::Tw],
                },
            };
            let cfg = bench::BenchConfig { problem, algos, reps, heuristic };
            bench::run(&dir, &cfg, Style { json, stats: false }, out)?;
        }
        Command::Selftest { seed, count, json } => {
            if !selftest::run(seed, count, Style { json, stats: false }, out)? {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn treedec_output(out: &mut impl Write, output: Output, t: &TreeDecomposition, g: &WeightedDigraph) -> io::Result<()> {
    let stats = vec![
        ("width", json!(t.width())),
        ("height", json!(t.height())),
        ("bags", json!(t.bag_count())),
        ("elimination_width", json!(t.elimination_width())),
    ];
    if output.json {
        let bags: Vec<Value> = t
            .bags()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let nodes: Vec<&str> = b.nodes.iter().map(|&u| g.label(u)).collect();
                json!({ "id": i, "parent": b.parent.map(|p| p.index()), "nodes": nodes })
            })
            .collect();
        let mut body = Map::new();
        body.insert("command".into(), json!("treedec"));
        body.insert("bags".into(), Value::Array(bags));
        return report::write_json(out, body, output.stats.then_some(&stats));
    }
    out.write_all(t.to_text(g.labels()).as_bytes())?;
    if output.stats {
        report::stats_only(out, &stats)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `lowtw --help` for usage");
            }
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(e) = out.flush() {
        eprintln!("error: {}", stdout_err(e));
        return ExitCode::from(1);
    }
    code
}
