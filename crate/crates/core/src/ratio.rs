//! Exact minimum ratio and mean cycle values, and approximate mean values.
//!
//! Every query reduces to one minimum-cycle computation under the integer
//! weights `q * wt - p * transit` for a threshold `p/q`: the sign of the
//! result is the sign of `value - p/q`, and zero means equality.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::graph::{propagate_component_values, tarjan_scc, WeightedDigraph};
use crate::mincycle::min_cycle_by;
use crate::rational::{ceil_log2, Rational};
use crate::treedec::{build_decomposition, validate, Heuristic, TreeDecomposition};
use crate::{Error, Result};

/// Decision calls spent by an exact search, split by phase.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub zero_test: usize,
    pub exponential: usize,
    pub binary: usize,
    pub rational_refine: usize,
}

impl SearchStats {
    pub fn oracle_calls(&self) -> usize {
        self.zero_test + self.exponential + self.binary + self.rational_refine
    }

    pub fn absorb(&mut self, other: &SearchStats) {
        self.zero_test += other.zero_test;
        self.exponential += other.exponential;
        self.binary += other.binary;
        self.rational_refine += other.rational_refine;
    }
}

/// Counters of an approximate mean computation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ApproxStats {
    /// Minimum-cycle runs made before the search (one or two).
    pub min_cycle_runs: usize,
    /// Decisions made by the bisection.
    pub decision_steps: usize,
    /// Bisection length that was planned.
    pub planned_steps: u64,
}

/// Compares the minimum ratio of `g` with `shift + p/q`, where `shift` is
/// added to every edge weight beforehand.
struct Threshold<'a> {
    g: &'a WeightedDigraph,
    t: &'a TreeDecomposition,
    max_weight: BigInt,
    max_transit: BigInt,
    shift: BigInt,
}

impl<'a> Threshold<'a> {
    fn new(g: &'a WeightedDigraph, t: &'a TreeDecomposition, shift: BigInt) -> Self {
        Threshold {
            g,
            t,
            max_weight: BigInt::from(g.max_abs_weight()),
            max_transit: BigInt::from(g.max_transit()),
            shift,
        }
    }

    /// Sign of the minimum cycle weight under `q * (wt + shift) - p * transit`,
    /// i.e. the ordering of the minimum ratio against `p/q`.
    fn compare(&self, threshold: &Rational) -> Result<Ordering> {
        let (p, q) = (threshold.numer(), threshold.denom());
        let per_edge = q * (&self.max_weight + self.shift.abs()) + p.abs() * &self.max_transit;
        let m = self.g.edge_count().max(1) as u64;
        let bits = per_edge.bits() + (64 - m.leading_zeros() as u64) + self.t.height() as u64 + 1;
        let sign = if bits < 126 {
            let p = p.to_i128().expect("fits");
            let q = q.to_i128().expect("fits");
            let s = self.shift.to_i128().expect("fits");
            let c = min_cycle_by(self.g, self.t, |e| {
                q * (e.weight as i128 + s) - p * e.transit as i128
            })?;
            c.value.ok_or(Error::Acyclic)?.cmp(&0)
        } else {
            let c = min_cycle_by(self.g, self.t, |e| {
                q * (BigInt::from(e.weight) + &self.shift) - p * BigInt::from(e.transit)
            })?;
            c.value.ok_or(Error::Acyclic)?.cmp(&BigInt::zero())
        };
        Ok(sign)
    }
}

/// Whether the minimum cycle ratio is at least `threshold`.
pub fn decide_ratio_geq(g: &WeightedDigraph, t: &TreeDecomposition, threshold: &Rational) -> Result<bool> {
    Ok(compare_ratio(g, t, threshold)? != Ordering::Less)
}

/// Whether the minimum cycle ratio equals `threshold`.
pub fn decide_ratio_eq(g: &WeightedDigraph, t: &TreeDecomposition, threshold: &Rational) -> Result<bool> {
    Ok(compare_ratio(g, t, threshold)? == Ordering::Equal)
}

/// Ordering of the minimum cycle ratio against `threshold`, from one
/// minimum-cycle run.
pub fn compare_ratio(g: &WeightedDigraph, t: &TreeDecomposition, threshold: &Rational) -> Result<Ordering> {
    Threshold::new(g, t, BigInt::zero()).compare(threshold)
}

/// Exact minimum over all cycles of `wt(C) / transit(C)`.
///
/// Finds the sign, brackets the integer part by exponential and binary
/// search, then walks the Stern-Brocot tree with galloping steps. Every
/// answer has denominator at most `n * T_max`, which bounds the walk.
pub fn ratio_value(g: &WeightedDigraph, t: &TreeDecomposition) -> Result<(Rational, SearchStats)> {
    let th = Threshold::new(g, t, BigInt::zero());
    let mut stats = SearchStats::default();
    let cmp = |x: &Rational, counter: &mut usize| -> Result<Ordering> {
        *counter += 1;
        th.compare(x)
    };
    let int = |k: &BigInt| Rational::from_integer(k.clone());

    let sign = cmp(&Rational::zero(), &mut stats.zero_test)?;
    if sign == Ordering::Equal {
        return Ok((Rational::zero(), stats));
    }

    // Integers lo < value < hi.
    let n_w = BigInt::from(g.node_count().max(1)) * BigInt::from(g.max_abs_weight().max(1));
    let cap = ceil_log2(&Rational::from_integer(n_w)) + 2;
    let (mut lo, mut hi): (BigInt, BigInt);
    let mut i = 0u64;
    loop {
        if i > cap {
            return Err(Error::Internal("exponential search exceeded its bound".into()));
        }
        let step = BigInt::one() << i;
        let probe = if sign == Ordering::Greater { step.clone() } else { -step.clone() };
        match cmp(&int(&probe), &mut stats.exponential)? {
            Ordering::Equal => return Ok((int(&probe), stats)),
            o if o == sign => i += 1,
            _ => {
                let inner = if i == 0 { BigInt::zero() } else { &probe / 2 };
                if sign == Ordering::Greater {
                    (lo, hi) = (inner, probe);
                } else {
                    (lo, hi) = (probe, inner);
                }
                break;
            }
        }
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
        match cmp(&int(&mid), &mut stats.binary)? {
            Ordering::Equal => return Ok((int(&mid), stats)),
            Ordering::Greater => lo = mid,
            Ordering::Less => hi = mid,
        }
    }

    let bound = BigInt::from(g.node_count().max(1)) * BigInt::from(g.max_transit());
    let value = stern_brocot(lo, bound, |x| cmp(x, &mut stats.rational_refine))?;
    Ok((value, stats))
}

/// Locate the value strictly inside `(floor, floor + 1)` with three-way
/// comparisons, given that its denominator is at most `bound`.
fn stern_brocot(
    floor: BigInt,
    bound: BigInt,
    mut cmp: impl FnMut(&Rational) -> Result<Ordering>,
) -> Result<Rational> {
    // Neighbouring fractions left < value < right.
    let (mut lp, mut lq): (BigInt, BigInt) = (floor.clone(), BigInt::one());
    let (mut rp, mut rq): (BigInt, BigInt) = (floor + 1, BigInt::one());
    let breach = || Error::Internal("no fraction within the denominator bound matched".into());

    loop {
        let mp = &lp + &rp;
        let mq = &lq + &rq;
        if mq > bound {
            return Err(breach());
        }
        let dir = cmp(&Rational::new(mp.clone(), mq.clone()))?;
        if dir == Ordering::Equal {
            return Ok(Rational::new(mp, mq));
        }
        // Moving toward the left end replaces right by (k*l + r); moving
        // right replaces left by (k*r + l). k = 1 is the mediant, already
        // known to lie on the value's far side.
        let toward_left = dir == Ordering::Less;
        let (ap, aq, bp, bq) = if toward_left {
            (lp.clone(), lq.clone(), rp.clone(), rq.clone())
        } else {
            (rp.clone(), rq.clone(), lp.clone(), lq.clone())
        };
        let at = |k: &BigInt| (k * &ap + &bp, k * &aq + &bq);
        // Same side as the mediant iff the comparison returns `dir`.
        let mut good = BigInt::one();
        let mut bad = BigInt::from(2);
        loop {
            let (p, q) = at(&bad);
            if q > bound {
                break;
            }
            match cmp(&Rational::new(p.clone(), q.clone()))? {
                Ordering::Equal => return Ok(Rational::new(p, q)),
                o if o == dir => {
                    good = bad.clone();
                    bad *= 2;
                }
                _ => break,
            }
        }
        // Now `good` is on the mediant's side and `bad` is either past
        // the value or beyond the denominator bound.
        while &bad - &good > BigInt::one() {
            let mid: BigInt = (&good + &bad) / 2;
            let (p, q) = at(&mid);
            if q > bound {
                bad = mid;
                continue;
            }
            match cmp(&Rational::new(p.clone(), q.clone()))? {
                Ordering::Equal => return Ok(Rational::new(p, q)),
                o if o == dir => good = mid,
                _ => bad = mid,
            }
        }
        let (gp, gq) = at(&good);
        let (bp2, bq2) = at(&bad);
        if bq2 > bound {
            // Only the near side can still hold the value; shrink to it.
            if toward_left {
                (rp, rq) = (gp, gq);
            } else {
                (lp, lq) = (gp, gq);
            }
            if &lq + &rq > bound {
                return Err(breach());
            }
            continue;
        }
        if toward_left {
            (rp, rq) = (gp, gq);
            (lp, lq) = (bp2, bq2);
        } else {
            (lp, lq) = (gp, gq);
            (rp, rq) = (bp2, bq2);
        }
    }
}

/// Exact minimum mean cycle value (all transit weights taken as 1).
pub fn mean_value(g: &WeightedDigraph, t: &TreeDecomposition) -> Result<(Rational, SearchStats)> {
    ratio_value(&g.with_unit_transit(), t)
}

/// Per-node value over the cycles reachable from each node; `None` where
/// no cycle is reachable. Each cyclic component gets its own
/// decomposition.
pub fn ratio_values_all_nodes(
    g: &WeightedDigraph,
    heuristic: Heuristic,
) -> Result<(Vec<Option<Rational>>, SearchStats)> {
    per_component(g, heuristic, ratio_value)
}

pub fn mean_values_all_nodes(
    g: &WeightedDigraph,
    heuristic: Heuristic,
) -> Result<(Vec<Option<Rational>>, SearchStats)> {
    per_component(&g.with_unit_transit(), heuristic, ratio_value)
}

/// Run `solve` on every cyclic strongly connected component and spread the
/// results to every node that reaches the component.
pub fn per_component<S: Default + Absorb>(
    g: &WeightedDigraph,
    heuristic: Heuristic,
    mut solve: impl FnMut(&WeightedDigraph, &TreeDecomposition) -> Result<(Rational, S)>,
) -> Result<(Vec<Option<Rational>>, S)> {
    let scc = tarjan_scc(g);
    let mut total = S::default();
    let mut values = Vec::with_capacity(scc.len());
    for c in 0..scc.len() {
        if !scc.is_cyclic(g, c) {
            values.push(None);
            continue;
        }
        let (sub, _) = g.induced_subgraph(&scc.components[c]);
        let t = build_decomposition(&sub, heuristic);
        validate(&t, &sub).map_err(|v| Error::Internal(format!("decomposition invalid: {v}")))?;
        let (v, s) = solve(&sub, &t)?;
        total.absorb_from(&s);
        values.push(Some(v));
    }
    Ok((propagate_component_values(&scc, &values), total))
}

/// Accumulation of per-component statistics.
pub trait Absorb {
    fn absorb_from(&mut self, other: &Self);
}

impl Absorb for SearchStats {
    fn absorb_from(&mut self, other: &Self) {
        self.absorb(other);
    }
}

impl Absorb for ApproxStats {
    fn absorb_from(&mut self, other: &Self) {
        self.min_cycle_runs += other.min_cycle_runs;
        self.decision_steps += other.decision_steps;
        self.planned_steps += other.planned_steps;
    }
}

/// Mean value within relative error `eps`: `|approx - exact| <= eps * |exact|`.
///
/// Transit weights are ignored. When the graph has a negative cycle the
/// weights are first shifted by the magnitude of the (under-approximated)
/// minimum cycle, and the tolerance is tightened by the factor
/// `1 + n * m * 2^height` that bounds the under-approximation.
pub fn approx_mean(
    g: &WeightedDigraph,
    t: &TreeDecomposition,
    eps: &Rational,
) -> Result<(Rational, ApproxStats)> {
    if !eps.is_positive() || eps >= &Rational::one() {
        return Err(Error::Domain(format!("epsilon must lie in (0,1), got {eps}")));
    }
    let g = g.with_unit_transit();
    let n = BigInt::from(g.node_count());
    let mut stats = ApproxStats::default();

    let c = min_cycle_by(&g, t, |e| BigInt::from(e.weight))?;
    stats.min_cycle_runs += 1;
    let c = c.value.ok_or(Error::Acyclic)?;
    if c.is_zero() {
        return Ok((Rational::zero(), stats));
    }

    let (shift, top, eps_search) = if c.is_positive() {
        (BigInt::zero(), c, eps.clone())
    } else {
        let shift = -c;
        let shifted = min_cycle_by(&g, t, |e| BigInt::from(e.weight) + &shift)?;
        stats.min_cycle_runs += 1;
        let c2 = shifted.value.ok_or(Error::Acyclic)?;
        if c2.is_negative() {
            return Err(Error::Internal("negative cycle survived the shift".into()));
        }
        if c2.is_zero() {
            return Ok((Rational::from_integer(-shift), stats));
        }
        let m = BigInt::from(g.edge_count());
        let blowup = BigInt::one() + &n * m * (BigInt::one() << t.height());
        (shift, c2, eps / Rational::from_integer(blowup))
    };

    // The shifted value lies in [top / n, top]; after k halvings of
    // [0, top] the width top / 2^k is at most eps * top / n.
    let steps = ceil_log2(&(Rational::from_integer(n) / &eps_search));
    stats.planned_steps = steps;
    let th = Threshold::new(&g, t, shift.clone());
    let mut lo = Rational::zero();
    let mut hi = Rational::from_integer(top);
    for _ in 0..steps {
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        stats.decision_steps += 1;
        match th.compare(&mid)? {
            Ordering::Equal => {
                hi = mid;
                break;
            }
            Ordering::Greater => lo = mid,
            Ordering::Less => hi = mid,
        }
    }
    Ok((hi - Rational::from_integer(shift), stats))
}
