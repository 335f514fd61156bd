//! One entry point per problem and algorithm, shared by the subcommands,
//! `bench` and `selftest`.

use std::fmt;
use std::str::FromStr;

use lowtw_core::energy::{energy_values, Energies};
use lowtw_core::energy_tw::energy_values_tw;
use lowtw_core::graph::{propagate_component_values, tarjan_scc};
use lowtw_core::mincycle::min_cycle;
use lowtw_core::oracles::{energy_fixpoint, enumerate_cycles, karp_mean, per_node_min, DEFAULT_CYCLE_CAP};
use lowtw_core::ratio::{approx_mean, mean_values_all_nodes, per_component, ratio_values_all_nodes, ApproxStats};
use lowtw_core::rational::format_ratio;
use lowtw_core::treedec::{build_decomposition, validate, Heuristic, TreeDecomposition};
use lowtw_core::{Error, Rational, Result, WeightedDigraph};
use serde_json::{json, Value};

pub type Stats = Vec<(&'static str, Value)>;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    Mean,
    Ratio,
    Energy,
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Problem::Mean),
            "ratio" => Ok(Problem::Ratio),
            "energy" => Ok(Problem::Energy),
            _ => Err(Error::Domain(format!("unknown problem `{s}`"))),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Mean => "mean",
            Problem::Ratio => "ratio",
            Problem::Energy => "energy",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Algo {
    /// Decomposition-based algorithm.
    Tw,
    Karp,
    /// Brute force: cycle enumeration or value iteration.
    Oracle,
    /// Bellman-Ford based energy algorithm for arbitrary graphs.
    General,
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tw" => Ok(Algo::Tw),
            "karp" => Ok(Algo::Karp),
            "oracle" => Ok(Algo::Oracle),
            "general" => Ok(Algo::General),
            _ => Err(Error::Domain(format!("unknown algorithm `{s}`"))),
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Tw => "tw",
            Algo::Karp => "karp",
            Algo::Oracle => "oracle",
            Algo::General => "general",
        })
    }
}

impl Problem {
    pub fn supports(self, algo: Algo) -> bool {
        matches!(
            (self, algo),
            (Problem::Mean, Algo::Tw | Algo::Karp | Algo::Oracle)
                | (Problem::Ratio, Algo::Tw | Algo::Oracle)
                | (Problem::Energy, Algo::General | Algo::Tw | Algo::Oracle)
        )
    }
}

/// Per-node values rendered for output; `None` prints as `inf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Values {
    Rational(Vec<Option<Rational>>),
    Integer(Energies),
}

impl Values {
    pub fn render(&self) -> Vec<String> {
        match self {
            Values::Rational(v) => v.iter().map(|x| x.as_ref().map_or("inf".into(), format_ratio)).collect(),
            Values::Integer(v) => v.iter().map(|x| x.map_or("inf".into(), |e| e.to_string())).collect(),
        }
    }

    pub fn to_json(&self) -> Vec<Value> {
        match self {
            Values::Rational(v) => v
                .iter()
                .map(|x| x.as_ref().map_or(json!("inf"), |r| json!(format_ratio(r))))
                .collect(),
            Values::Integer(v) => v
                .iter()
                .map(|x| match x {
                    Some(e) => i64::try_from(*e).map_or_else(|_| json!(e.to_string()), |e| json!(e)),
                    None => json!("inf"),
                })
                .collect(),
        }
    }
}

pub fn solve(problem: Problem, algo: Algo, g: &WeightedDigraph, heuristic: Heuristic) -> Result<(Values, Stats)> {
    if !problem.supports(algo) {
        return Err(Error::Domain(format!("algorithm `{algo}` does not solve {problem}")));
    }
    match (problem, algo) {
        (Problem::Mean, Algo::Tw) => {
            let (v, s) = mean_values_all_nodes(g, heuristic)?;
            Ok((Values::Rational(v), search_stats(&s)))
        }
        (Problem::Ratio, Algo::Tw) => {
            let (v, s) = ratio_values_all_nodes(g, heuristic)?;
            Ok((Values::Rational(v), search_stats(&s)))
        }
        (Problem::Mean, Algo::Karp) => Ok((Values::Rational(karp_all_nodes(g)?), Stats::new())),
        (Problem::Mean, Algo::Oracle) => {
            let cs = enumerate_cycles(g, DEFAULT_CYCLE_CAP)?;
            let v = per_node_min(g, &cs, |c| c.mean());
            Ok((Values::Rational(v), vec![("cycles", json!(cs.len()))]))
        }
        (Problem::Ratio, Algo::Oracle) => {
            let cs = enumerate_cycles(g, DEFAULT_CYCLE_CAP)?;
            let v = per_node_min(g, &cs, |c| c.ratio());
            Ok((Values::Rational(v), vec![("cycles", json!(cs.len()))]))
        }
        (Problem::Energy, Algo::General) => {
            let (v, s) = energy_values(g)?;
            Ok((
                Values::Integer(v),
                vec![
                    ("zero_energy_nodes", json!(s.zero_energy_nodes)),
                    ("bellman_ford_passes", json!(s.bellman_ford_passes)),
                ],
            ))
        }
        (Problem::Energy, Algo::Tw) => {
            let (v, s) = energy_values_tw(g, heuristic)?;
            Ok((
                Values::Integer(v),
                vec![
                    ("kills", json!(s.kills)),
                    ("update_recomputes", json!(s.update_recomputes)),
                    ("height", json!(s.height)),
                    ("bags", json!(s.bags)),
                ],
            ))
        }
        (Problem::Energy, Algo::Oracle) => Ok((Values::Integer(energy_fixpoint(g)), Stats::new())),
        _ => unreachable!("checked by supports"),
    }
}

/// Decision counter reported by `bench`: oracle calls for exact searches,
/// kills or Bellman-Ford passes for energies.
pub fn headline_counter(stats: &Stats) -> Option<u64> {
    ["oracle_calls", "kills", "bellman_ford_passes"]
        .iter()
        .find_map(|k| stats.iter().find(|(name, _)| name == k))
        .and_then(|(_, v)| v.as_u64())
}

fn search_stats(s: &lowtw_core::ratio::SearchStats) -> Stats {
    vec![
        ("oracle_calls", json!(s.oracle_calls())),
        ("zero_test", json!(s.zero_test)),
        ("exponential", json!(s.exponential)),
        ("binary", json!(s.binary)),
        ("rational_refine", json!(s.rational_refine)),
    ]
}

fn karp_all_nodes(g: &WeightedDigraph) -> Result<Vec<Option<Rational>>> {
    let scc = tarjan_scc(g);
    let mut per = Vec::with_capacity(scc.len());
    for c in 0..scc.len() {
        if scc.is_cyclic(g, c) {
            let (sub, _) = g.induced_subgraph(&scc.components[c]);
            per.push(Some(karp_mean(&sub)?));
        } else {
            per.push(None);
        }
    }
    Ok(propagate_component_values(&scc, &per))
}

pub fn approx_all_nodes(g: &WeightedDigraph, heuristic: Heuristic, eps: &Rational) -> Result<(Values, Stats)> {
    let (v, s): (_, ApproxStats) = per_component(g, heuristic, |sub, t| approx_mean(sub, t, eps))?;
    Ok((
        Values::Rational(v),
        vec![
            ("min_cycle_runs", json!(s.min_cycle_runs)),
            ("decision_steps", json!(s.decision_steps)),
            ("planned_steps", json!(s.planned_steps)),
        ],
    ))
}

/// Decomposition of the whole graph, checked before use.
pub fn checked_decomposition(g: &WeightedDigraph, heuristic: Heuristic) -> Result<TreeDecomposition> {
    let t = build_decomposition(g, heuristic);
    validate(&t, g).map_err(|v| Error::Internal(format!("decomposition invalid: {v}")))?;
    Ok(t)
}

/// Minimum cycle weight over the whole graph with its statistics.
pub fn mincycle(g: &WeightedDigraph, heuristic: Heuristic) -> Result<(Option<i128>, Stats)> {
    let t = checked_decomposition(g, heuristic)?;
    let mc = min_cycle(g, &t)?;
    Ok((
        mc.value,
        vec![
            ("peak_tables", json!(mc.peak_tables)),
            ("height", json!(mc.height)),
            ("width", json!(t.width())),
            ("exact", json!(mc.is_exact())),
        ],
    ))
}
