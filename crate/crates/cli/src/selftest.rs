//! Differential suites on small random graphs: every algorithm against the
//! brute-force baselines.

use std::io::Write;

use lowtw_core::gen::{generate, GenKind, GenParams};
use lowtw_core::mincycle::min_cycle;
use lowtw_core::oracles::{enumerate_cycles, DEFAULT_CYCLE_CAP};
use lowtw_core::ratio::mean_values_all_nodes;
use lowtw_core::treedec::{build_decomposition, validate, Heuristic};
use lowtw_core::{Rational, WeightedDigraph};
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::compute::{approx_all_nodes, solve, Algo, Problem, Values};
use crate::report::{write_json, Style};
use crate::CliError;

#[derive(Default)]
struct Suite {
    name: &'static str,
    checked: usize,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, ..Suite::default() }
    }

    fn record(&mut self, instance: &str, outcome: Result<(), String>) {
        self.checked += 1;
        if let Err(msg) = outcome {
            self.failures.push(format!("{instance}: {msg}"));
        }
    }
}

fn instance(rng: &mut ChaCha8Rng) -> WeightedDigraph {
    let kind = [GenKind::KTree, GenKind::SparseRandom, GenKind::CfgLike][rng.gen_range(0..3)];
    let k = rng.gen_range(1..=3usize);
    let lo = if kind == GenKind::KTree { k + 1 } else { 1 };
    let p = GenParams {
        n: rng.gen_range(lo..=9),
        k,
        weights: (-10, 10),
        transit: (1, 3),
        seed: rng.gen(),
    };
    generate(kind, &p).expect("parameters are in range")
}

fn agree(problem: Problem, algos: &[Algo], g: &WeightedDigraph) -> Result<(), String> {
    let mut reference: Option<(Algo, Values)> = None;
    for &a in algos {
        let (v, _) = solve(problem, a, g, Heuristic::MinDegree).map_err(|e| format!("{a}: {e}"))?;
        match &reference {
            None => reference = Some((a, v)),
            Some((r, rv)) if *rv != v => return Err(format!("`{a}` disagrees with `{r}`")),
            Some(_) => {}
        }
    }
    Ok(())
}

fn approx_within(g: &WeightedDigraph) -> Result<(), String> {
    let (exact, _) = mean_values_all_nodes(g, Heuristic::MinDegree).map_err(|e| e.to_string())?;
    for eps in [Rational::new(1.into(), 2.into()), Rational::new(1.into(), 100.into())] {
        let (approx, _) = approx_all_nodes(g, Heuristic::MinDegree, &eps).map_err(|e| e.to_string())?;
        let Values::Rational(approx) = approx else { unreachable!("mean values are rational") };
        for (u, (a, e)) in approx.iter().zip(&exact).enumerate() {
            let ok = match (a, e) {
                (None, None) => true,
                (Some(a), Some(e)) => (a - e).abs() <= &eps * e.abs(),
                _ => false,
            };
            if !ok {
                return Err(format!("node {u}, eps {eps}: {a:?} vs {e:?}"));
            }
        }
    }
    Ok(())
}

fn mincycle_contract(g: &WeightedDigraph) -> Result<(), String> {
    let t = build_decomposition(g, Heuristic::MinDegree);
    let mc = min_cycle(g, &t).map_err(|e| e.to_string())?;
    let cycles = enumerate_cycles(g, DEFAULT_CYCLE_CAP).map_err(|e| e.to_string())?;
    let exact = cycles.iter().map(|c| c.weight).min();
    if mc.peak_tables > mc.height + 1 {
        return Err(format!("{} tables alive at height {}", mc.peak_tables, mc.height));
    }
    let ok = match (mc.value, exact) {
        (None, None) => true,
        (Some(c), Some(s)) if s >= 0 => c == s,
        (Some(c), Some(s)) => c <= s && c.abs() <= s.abs() * g.edge_count() as i128 * (1i128 << mc.height),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("minimum cycle {:?}, enumeration {exact:?}", mc.value))
    }
}

fn decompositions_valid(g: &WeightedDigraph) -> Result<(), String> {
    for h in [Heuristic::MinDegree, Heuristic::MinFill] {
        let t = build_decomposition(g, h);
        validate(&t, g).map_err(|v| format!("{h:?}: {v}"))?;
    }
    Ok(())
}

/// Returns whether every suite passed.
pub fn run(seed: u64, count: usize, style: Style, out: &mut impl Write) -> Result<bool, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suites = [
        Suite::new("mean"),
        Suite::new("ratio"),
        Suite::new("energy"),
        Suite::new("approx"),
        Suite::new("mincycle"),
        Suite::new("treedec"),
    ];
    for i in 0..count {
        let g = instance(&mut rng);
        let id = format!("instance {i}");
        suites[0].record(&id, agree(Problem::Mean, &[Algo::Tw, Algo::Karp, Algo::Oracle], &g));
        suites[1].record(&id, agree(Problem::Ratio, &[Algo::Tw, Algo::Oracle], &g));
        suites[2].record(&id, agree(Problem::Energy, &[Algo::General, Algo::Tw, Algo::Oracle], &g));
        suites[3].record(&id, approx_within(&g));
        suites[4].record(&id, mincycle_contract(&g));
        suites[5].record(&id, decompositions_valid(&g));
    }
    for s in &suites {
        for f in s.failures.iter().take(3) {
            log::error!("{} suite: {f}", s.name);
        }
    }
    let io = |e| CliError::Io("standard output".into(), e);
    if style.json {
        let list: Vec<Value> = suites
            .iter()
            .map(|s| json!({ "suite": s.name, "instances": s.checked, "failures": s.failures.len() }))
            .collect();
        let mut body = Map::new();
        body.insert("command".into(), json!("selftest"));
        body.insert("seed".into(), json!(seed));
        body.insert("suites".into(), Value::Array(list));
        write_json(out, body, None).map_err(io)?;
    } else {
        for s in &suites {
            let verdict = if s.failures.is_empty() { "pass" } else { "FAIL" };
            writeln!(out, "{}\t{verdict}\t{}\t{}", s.name, s.checked, s.failures.len()).map_err(io)?;
        }
    }
    Ok(suites.iter().all(|s| s.failures.is_empty()))
}
