//! Timing harness over a directory of graph files. Every algorithm's output
//! is checked against the first one before any timing is printed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use lowtw_core::graph::{parse_graph, tarjan_scc, Format};
use lowtw_core::mincycle::min_cycle;
use lowtw_core::treedec::Heuristic;
use lowtw_core::WeightedDigraph;
use serde_json::{json, Map, Value};

use crate::compute::{checked_decomposition, headline_counter, solve, Algo, Problem, Values};
use crate::report::{write_json, Style};
use crate::CliError;

pub struct BenchConfig {
    pub problem: Problem,
    pub algos: Vec<Algo>,
    pub reps: usize,
    pub heuristic: Heuristic,
}

struct Row {
    file: String,
    n: usize,
    m: usize,
    width: usize,
    height: usize,
    algo: Algo,
    mean_time: Duration,
    counter: Option<u64>,
    peak_tables: Option<usize>,
}

pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let io = |e| CliError::Io(dir.display().to_string(), e);
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Largest number of tables alive at once over the cyclic components, for
/// algorithms that sweep a decomposition.
fn peak_tables(g: &WeightedDigraph, heuristic: Heuristic) -> Result<usize, CliError> {
    let scc = tarjan_scc(g);
    let mut peak = 0;
    for c in 0..scc.len() {
        if scc.is_cyclic(g, c) {
            let (sub, _) = g.induced_subgraph(&scc.components[c]);
            let t = checked_decomposition(&sub, heuristic)?;
            peak = peak.max(min_cycle(&sub, &t)?.peak_tables);
        }
    }
    Ok(peak)
}

pub fn run(dir: &Path, cfg: &BenchConfig, style: Style, out: &mut impl Write) -> Result<(), CliError> {
    if cfg.algos.is_empty() {
        return Err(CliError::Usage("no algorithms selected".into()));
    }
    for &a in &cfg.algos {
        if !cfg.problem.supports(a) {
            return Err(CliError::Usage(format!("algorithm `{a}` does not solve {}", cfg.problem)));
        }
    }
    let reps = cfg.reps.max(1);
    let mut rows = Vec::new();
    for path in corpus_files(dir)? {
        let name = path.file_name().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        let text = fs::read_to_string(&path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        let g = parse_graph(&text, Format::sniff(&text)).map_err(|e| CliError::InFile(name.clone(), e))?;
        let t = checked_decomposition(&g, cfg.heuristic)?;
        let mut reference: Option<(Algo, Values)> = None;
        for &algo in &cfg.algos {
            let mut total = Duration::ZERO;
            let mut first = None;
            for _ in 0..reps {
                let start = Instant::now();
                let result = solve(cfg.problem, algo, &g, cfg.heuristic).map_err(|e| CliError::InFile(name.clone(), e))?;
                total += start.elapsed();
                first.get_or_insert(result);
            }
            let (values, stats) = first.expect("at least one repetition");
            match &reference {
                None => reference = Some((algo, values)),
                Some((ref_algo, ref_values)) if *ref_values != values => {
                    return Err(CliError::Mismatch(format!(
                        "{name}: `{algo}` disagrees with `{ref_algo}` on {}",
                        cfg.problem
                    )));
                }
                Some(_) => {}
            }
            let peak = if algo == Algo::Tw && cfg.problem != Problem::Energy {
                Some(peak_tables(&g, cfg.heuristic)?)
            } else {
                None
            };
            rows.push(Row {
                file: name.clone(),
                n: g.node_count(),
                m: g.edge_count(),
                width: t.width(),
                height: t.height(),
                algo,
                mean_time: total / reps as u32,
                counter: headline_counter(&stats),
                peak_tables: peak,
            });
        }
    }
    emit(&rows, cfg.problem, style, out).map_err(|e| CliError::Io("standard output".into(), e))
}

fn emit(rows: &[Row], problem: Problem, style: Style, out: &mut impl Write) -> std::io::Result<()> {
    if style.json {
        let list: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "file": r.file,
                    "n": r.n,
                    "m": r.m,
                    "width": r.width,
                    "height": r.height,
                    "algorithm": r.algo.to_string(),
                    "time_ms": r.mean_time.as_secs_f64() * 1e3,
                    "counter": r.counter,
                    "peak_tables": r.peak_tables,
                })
            })
            .collect();
        let mut body = Map::new();
        body.insert("command".into(), json!("bench"));
        body.insert("problem".into(), json!(problem.to_string()));
        body.insert("rows".into(), Value::Array(list));
        return write_json(out, body, None);
    }
    writeln!(out, "file\tn\tm\twidth\theight\talgorithm\ttime_ms\tcounter\tpeak_tables")?;
    let dash = |x: Option<String>| x.unwrap_or_else(|| "-".into());
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{}\t{}",
            r.file,
            r.n,
            r.m,
            r.width,
            r.height,
            r.algo,
            r.mean_time.as_secs_f64() * 1e3,
            dash(r.counter.map(|c| c.to_string())),
            dash(r.peak_tables.map(|p| p.to_string())),
        )?;
    }
    Ok(())
}
