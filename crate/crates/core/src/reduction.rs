//! Budgeted extension to perfect matchings: every component admits a perfect
//! matching using at most `b_i` edges of color `i` whenever
//! `b1 + b2 + b3 >= 2m - 1`, and the construction below finds one.

use crate::error::{Error, Result};
use crate::instance::{BudgetTriple, Color, Instance, Vertex};
use crate::matching::Matching;
use crate::structure::{alternating_walk, Cycle};

/// A perfect matching of `inst` with at most `b_i` edges of color `i`.
/// Requires `b1 + b2 + b3 >= 2m - 1` where `2m` is the vertex count.
pub fn reduce_perfect(inst: &Instance, b: BudgetTriple) -> Result<Matching> {
    let m = inst.n();
    if b.sum() < 2 * m - 1 {
        return Err(Error::BudgetTooSmall {
            sum: b.sum(),
            needed: 2 * m - 1,
        });
    }
    // Relabel colors so the two largest budgets act as the cycle pair; their
    // sum is then at least ceil(2(2m-1)/3) >= m.
    let mut order = Color::ALL;
    order.sort_by_key(|c| std::cmp::Reverse(b.get(*c)));
    let [ca, cb, cw] = order;
    assert!(
        b.get(ca) + b.get(cb) >= m,
        "two largest budgets always cover m"
    );
    extend_within_budgets(inst, b, Matching::new(m), ca, cb, cw)
}

/// Extend a seed matching `seed ⊆ M1 ∪ M2` to a perfect matching within all
/// three budgets. Preconditions: `(M1 ∪ M2) - V(seed)` is a disjoint union
/// of cycles, per-color seed counts respect `b1, b2`, and `b1 + b2 >= m`.
pub fn reduce_extend(inst: &Instance, b: BudgetTriple, seed: Matching) -> Result<Matching> {
    let m = inst.n();
    if seed.count(Color::C3) != 0 {
        return Err(Error::PreconditionViolated("seed must avoid color 3"));
    }
    if seed.count(Color::C1) > b.get(Color::C1) || seed.count(Color::C2) > b.get(Color::C2) {
        return Err(Error::PreconditionViolated("seed exceeds a budget"));
    }
    if b.get(Color::C1) + b.get(Color::C2) < m {
        return Err(Error::PreconditionViolated("b1 + b2 must be at least m"));
    }
    if b.sum() < 2 * m - 1 {
        return Err(Error::BudgetTooSmall {
            sum: b.sum(),
            needed: 2 * m - 1,
        });
    }
    // The seed must leave whole cycles: every unsaturated vertex's color-1
    // and color-2 partners must also be unsaturated.
    for u in 0..m as u32 {
        for v in [Vertex::A(u), Vertex::B(u)] {
            if seed.is_saturated(v) {
                continue;
            }
            for c in [Color::C1, Color::C2] {
                if seed.is_saturated(inst.partner(c, v)) {
                    return Err(Error::PreconditionViolated(
                        "seed does not leave whole cycles uncovered",
                    ));
                }
            }
        }
    }
    extend_within_budgets(inst, b, seed, Color::C1, Color::C2, Color::C3)
}

/// Cycles of `M_ca ∪ M_cb` avoiding the vertices saturated by `m`.
fn remaining_cycles(inst: &Instance, m: &Matching, ca: Color, cb: Color) -> Vec<Cycle> {
    crate::structure::cycle_decomposition(inst, ca, cb)
        .expect("distinct colors")
        .into_iter()
        .filter(|cy| !m.is_saturated(cy.vertices()[0]))
        .inspect(|cy| {
            debug_assert!(cy.vertices().iter().all(|&v| !m.is_saturated(v)));
        })
        .collect()
}

/// Core loop. `ca, cb` are the colors whose union carries the cycles and
/// `cw` is the walk color; the caller fixes this role assignment, everything
/// downstream sees original colors.
fn extend_within_budgets(
    inst: &Instance,
    b: BudgetTriple,
    mut m: Matching,
    ca: Color,
    cb: Color,
    cw: Color,
) -> Result<Matching> {
    let half = inst.n();
    loop {
        let mut cycles = remaining_cycles(inst, &m, ca, cb);
        if cycles.is_empty() {
            break;
        }
        // Within a level the color with the larger remaining budget plays
        // the leading role.
        let (c1, c2) = {
            let ra = b.get(ca) - m.count(ca);
            let rb = b.get(cb) - m.count(cb);
            if ra >= rb {
                (ca, cb)
            } else {
                (cb, ca)
            }
        };
        let b1p = b.get(c1) - m.count(c1);
        let b2p = b.get(c2) - m.count(c2);
        let m_prime = half - m.size();
        // budget slack: 2*b1' >= b1' + b2' >= m'
        assert!(b1p >= b2p && b1p + b2p >= m_prime, "budget slack violated");

        cycles.sort_by_key(|cy| {
            (
                cy.len(),
                cy.vertices().iter().copied().min().unwrap(),
            )
        });
        let cycle = &cycles[0];
        if cycles.len() > 1 {
            // shortest cycle fits entirely in the leading budget
            let ell = cycle.half();
            assert!(ell <= b1p, "shortest cycle exceeds leading budget");
            for e in cycle.edges_of_color(c1) {
                m.insert(inst, e)?;
            }
            continue;
        }
        base_case(inst, &b, &mut m, cycle, c1, c2, cw)?;
        break;
    }
    debug_assert_eq!(m.size(), inst.n());
    debug_assert!(Color::ALL.iter().all(|&c| m.count(c) <= b.get(c)));
    Ok(m)
}

/// Single remaining cycle. Either the leading budget swallows its whole
/// `c1` side, or we leave two gaps, walk a `cw`-alternating path between
/// them, and flip it to close the matching without overspending color `cw`.
fn base_case(
    inst: &Instance,
    b: &BudgetTriple,
    m: &mut Matching,
    cycle: &Cycle,
    c1: Color,
    c2: Color,
    cw: Color,
) -> Result<()> {
    let m_prime = cycle.half();
    let b1p = b.get(c1) - m.count(c1);
    let b2p = b.get(c2) - m.count(c2);
    if b1p >= m_prime {
        for e in cycle.edges_of_color(c1) {
            m.insert(inst, e)?;
        }
        return Ok(());
    }
    // Orient the cycle from its lowest A-vertex with a leading-color first
    // edge: v1 v2 ∈ M_c1 and v_{2m'} v1 ∈ M_c2.
    let v1 = cycle
        .vertices()
        .iter()
        .copied()
        .filter(|v| v.is_a())
        .min()
        .unwrap();
    let oriented = cycle.oriented(v1, c1);
    // Partial fill: the first m'-b1'-1 edges of c2 and the last m'-b2'-1
    // edges of c1 along the orientation. Edge t (0-based) joins vertices
    // t+1, t+2 (1-based); odd 1-based edges are c1, even are c2.
    let mut m_partial = m.clone();
    for i in 1..=(m_prime - b1p - 1) {
        // 1-based edge position 2i joins v_{2i}, v_{2i+1}
        m_partial.insert(inst, oriented.edge(2 * i - 1))?;
    }
    for j in 0..=(m_prime as i64 - b2p as i64 - 2) {
        // 1-based edge position 2(m'-j)-1 joins v_{2(m'-j)-1}, v_{2(m'-j)}
        let pos = 2 * (m_prime - j as usize) - 1;
        m_partial.insert(inst, oriented.edge(pos - 1))?;
    }
    let walk = alternating_walk(inst, &m_partial, v1, cw)?;
    let vk = walk.last();
    let k = oriented
        .position_of(vk)
        .expect("walk ends on the remaining cycle")
        + 1; // 1-based
    assert!(
        k % 2 == 0 && k >= 2 * (m_prime - b1p) && k <= 2 * b2p + 2,
        "walk endpoint out of the budget window: k = {k}"
    );
    let m3_on_walk = (1..=walk.num_edges())
        .filter(|&p| walk.color(p) == cw)
        .count();
    assert!(m3_on_walk <= b.get(cw) - m.count(cw), "walk overspends the walk color");
    // Saturate everything except v1 and v_k: c2-edges before v_k, c1-edges
    // after it.
    for pos in 1..k {
        if oriented.color(pos - 1) == c2 {
            m.insert(inst, oriented.edge(pos - 1))?;
        }
    }
    for pos in k..=oriented.len() {
        if oriented.color(pos - 1) == c1 {
            m.insert(inst, oriented.edge(pos - 1))?;
        }
    }
    debug_assert!(!m.is_saturated(v1) && !m.is_saturated(vk));
    // Flip the walk: its non-matching edges all carry the walk color.
    m.symmetric_difference(inst, &walk.edges())?;
    Ok(())
}
