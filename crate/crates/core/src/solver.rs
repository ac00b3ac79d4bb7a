//! Top-level driver: peel components with budgeted perfect matchings, then
//! walk the switching schedule on the last (connected) piece.

use crate::components::{components, restrict};
use crate::error::{Error, Result};
use crate::instance::{BudgetTriple, Color, Edge, Instance, TargetTriple};
use crate::matching::Matching;
use crate::reduction::reduce_perfect;
use crate::switching::{switch_traced, SwitchDirection};
use crate::trace::Tracer;
use crate::trace_event;

/// Counters reported by `solve_with_stats`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    pub switches: u64,
    pub pipeline_steps: u64,
    pub max_switch_steps: u64,
}

impl SolveStats {
    fn absorb(&mut self, steps: u64) {
        self.switches += 1;
        self.pipeline_steps += steps;
        self.max_switch_steps = self.max_switch_steps.max(steps);
    }

    fn merge(&mut self, other: SolveStats) {
        self.switches += other.switches;
        self.pipeline_steps += other.pipeline_steps;
        self.max_switch_steps = self.max_switch_steps.max(other.max_switch_steps);
    }
}

/// Find a matching with exactly the target per-color counts;
/// `a1 + a2 + a3` must equal `n - 1`. Always succeeds on valid input, so
/// any error beyond the target-sum check signals a bug.
pub fn solve(inst: &Instance, target: TargetTriple) -> Result<Matching> {
    solve_with_stats(inst, target, &mut Tracer::none()).map(|(m, _)| m)
}

pub fn solve_with_stats(
    inst: &Instance,
    target: TargetTriple,
    tracer: &mut Tracer<'_>,
) -> Result<(Matching, SolveStats)> {
    let n = inst.n();
    if target.sum() != n - 1 {
        return Err(Error::InvalidTargetSum {
            sum: target.sum(),
            expected: n - 1,
        });
    }
    let comps = components(inst);
    let mut stats = SolveStats::default();
    if comps.len() == 1 {
        let m = solve_connected(inst, target, &mut stats, tracer)?;
        return Ok((m, stats));
    }
    // Peel components smallest-first: all but the last receive a perfect
    // matching within the remaining budgets, the last takes the residue.
    let mut remaining = target;
    let mut out = Matching::new(n);
    for (idx, comp) in comps.iter().enumerate() {
        let r = restrict(inst, comp);
        let sub_m = if idx + 1 == comps.len() {
            let (m, sub_stats) = solve_with_stats(&r.sub, remaining, tracer)?;
            stats.merge(sub_stats);
            m
        } else {
            trace_event!(
                tracer,
                "solve",
                "peel component_size={} budgets={},{},{}",
                comp.size(),
                remaining.0[0],
                remaining.0[1],
                remaining.0[2]
            );
            reduce_perfect(&r.sub, BudgetTriple(remaining.0))?
        };
        let counts = sub_m.counts();
        for e in sub_m.edges() {
            out.insert(inst, r.lift_edge(e))?;
        }
        for c in Color::ALL {
            remaining.0[c.index()] -= counts[c.index()];
        }
    }
    assert_eq!(remaining.0, [0, 0, 0], "budgets must be spent exactly");
    assert_eq!(out.counts(), target.0);
    Ok((out, stats))
}

fn solve_connected(
    inst: &Instance,
    target: TargetTriple,
    stats: &mut SolveStats,
    tracer: &mut Tracer<'_>,
) -> Result<Matching> {
    let n = inst.n();
    let nonzero = target.nonzero_colors();
    match nonzero.len() {
        0 => unreachable!("n - 1 >= 2 for n >= 3"),
        1 => {
            // subset of one perfect matching: smallest A-vertices first
            let c = nonzero[0];
            trace_event!(tracer, "solve", "fast_path=single color={c}");
            let edges: Vec<Edge> = (0..(n - 1) as u32).map(|u| Edge::new(u, c)).collect();
            Matching::from_edges(inst, &edges)
        }
        2 => {
            trace_event!(
                tracer,
                "solve",
                "fast_path=two_color colors={},{}",
                nonzero[0],
                nonzero[1]
            );
            solve_two_color(
                inst,
                nonzero[0],
                nonzero[1],
                target.get(nonzero[0]),
                target.get(nonzero[1]),
            )
        }
        _ => {
            // start from n-1 color-3 edges, then raise colors 1 and 2 one
            // switch at a time
            let a1 = target.get(Color::C1);
            let a2 = target.get(Color::C2);
            trace_event!(tracer, "solve", "schedule a1={a1} a2={a2}");
            let edges: Vec<Edge> = (0..(n - 1) as u32)
                .map(|u| Edge::new(u, Color::C3))
                .collect();
            let mut cur = Matching::from_edges(inst, &edges)?;
            for s in 0..a1 {
                let here = TargetTriple::new(s, 0, n - 1 - s);
                let (next, steps) =
                    switch_traced(inst, &cur, here, SwitchDirection::IncreaseC1, tracer)?;
                stats.absorb(steps);
                cur = next;
            }
            for s in 0..a2 {
                let here = TargetTriple::new(a1, s, n - 1 - a1 - s);
                let (next, steps) =
                    switch_traced(inst, &cur, here, SwitchDirection::IncreaseC2, tracer)?;
                stats.absorb(steps);
                cur = next;
            }
            assert_eq!(cur.counts(), target.0);
            Ok(cur)
        }
    }
}

/// Build a matching with `a_i` edges of color `ci` and `a_j` of color `cj`
/// (`a_i + a_j = n - 1`) by walking the 2-factor `M_ci ∪ M_cj`: fill whole
/// cycles with `ci`-edges, take a consecutive run in the first cycle where
/// the quota runs out, and saturate the rest with `cj`-edges.
pub fn solve_two_color(
    inst: &Instance,
    ci: Color,
    cj: Color,
    a_i: usize,
    a_j: usize,
) -> Result<Matching> {
    let n = inst.n();
    if a_i + a_j != n - 1 {
        return Err(Error::InvalidTargetSum {
            sum: a_i + a_j,
            expected: n - 1,
        });
    }
    let mut out = Matching::new(n);
    let mut quota = a_i;
    let mut deficient_done = false;
    for cycle in crate::structure::cycle_decomposition(inst, ci, cj)? {
        let s = cycle.half();
        if !deficient_done && quota >= s {
            for e in cycle.edges_of_color(ci) {
                out.insert(inst, e)?;
            }
            quota -= s;
        } else if !deficient_done {
            // this cycle absorbs the remaining quota: an oriented run of
            // quota ci-edges, then cj-edges on the remaining vertices,
            // leaving exactly two vertices free
            let oriented = cycle.oriented(cycle.vertices()[0], ci);
            for r in 0..quota {
                out.insert(inst, oriented.edge(2 * r))?; // 1-based odd: ci
            }
            // cj-edges strictly inside the remaining stretch
            let mut pos = 2 * quota + 2; // 1-based edge position, color cj
            while pos + 1 <= cycle.len() {
                out.insert(inst, oriented.edge(pos - 1))?;
                pos += 2;
            }
            quota = 0;
            deficient_done = true;
        } else {
            for e in cycle.edges_of_color(cj) {
                out.insert(inst, e)?;
            }
        }
    }
    assert!(deficient_done, "quota a_i <= n - 1 always leaves a deficient cycle");
    assert_eq!(out.count(ci), a_i);
    assert_eq!(out.count(cj), a_j);
    assert_eq!(out.size(), n - 1);
    Ok(out)
}
