//! Matchings in the union graph, keyed by `(A-vertex, color)`, plus the
//! standalone verifier for externally supplied edge lists.

use crate::error::{Error, Result};
use crate::instance::{Color, Edge, Instance, TargetTriple, Vertex};

/// A matching of the instance. The representation stores, per vertex of each
/// side, the color of its matched edge; the partner itself is derived from
/// the instance. This makes A-side disjointness structural and keeps
/// per-color counts exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    n: usize,
    by_a: Vec<Option<Color>>,
    by_b: Vec<Option<Color>>,
    counts: [usize; 3],
}

impl Matching {
    pub fn new(n: usize) -> Matching {
        Matching {
            n,
            by_a: vec![None; n],
            by_b: vec![None; n],
            counts: [0; 3],
        }
    }

    pub fn from_edges(inst: &Instance, edges: &[Edge]) -> Result<Matching> {
        let mut m = Matching::new(inst.n());
        for &e in edges {
            m.insert(inst, e)?;
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `(|M ∩ M1|, |M ∩ M2|, |M ∩ M3|)`.
    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn count(&self, c: Color) -> usize {
        self.counts[c.index()]
    }

    pub fn counts_triple(&self) -> TargetTriple {
        TargetTriple(self.counts)
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.by_a[e.u as usize] == Some(e.color)
    }

    pub fn is_saturated(&self, v: Vertex) -> bool {
        match v {
            Vertex::A(u) => self.by_a[u as usize].is_some(),
            Vertex::B(b) => self.by_b[b as usize].is_some(),
        }
    }

    /// The color of the matched edge at `v`, if any.
    pub fn color_at(&self, v: Vertex) -> Option<Color> {
        match v {
            Vertex::A(u) => self.by_a[u as usize],
            Vertex::B(b) => self.by_b[b as usize],
        }
    }

    /// The matched edge at `v`, if any.
    pub fn edge_at(&self, inst: &Instance, v: Vertex) -> Option<Edge> {
        let c = self.color_at(v)?;
        let u = match v {
            Vertex::A(u) => u,
            Vertex::B(_) => match inst.partner(c, v) {
                Vertex::A(u) => u,
                Vertex::B(_) => unreachable!(),
            },
        };
        Some(Edge::new(u, c))
    }

    /// The matching partner of `v`, if `v` is saturated.
    pub fn partner(&self, inst: &Instance, v: Vertex) -> Option<Vertex> {
        self.color_at(v).map(|c| inst.partner(c, v))
    }

    pub fn insert(&mut self, inst: &Instance, e: Edge) -> Result<()> {
        let (a, b) = inst.endpoints(e);
        if self.is_saturated(a) || self.is_saturated(b) {
            return Err(Error::PreconditionViolated(
                "edge insertion would violate disjointness",
            ));
        }
        self.by_a[a.index()] = Some(e.color);
        self.by_b[b.index()] = Some(e.color);
        self.counts[e.color.index()] += 1;
        Ok(())
    }

    /// Remove `e`; returns whether it was present.
    pub fn remove(&mut self, inst: &Instance, e: Edge) -> bool {
        if !self.contains(e) {
            return false;
        }
        let (a, b) = inst.endpoints(e);
        self.by_a[a.index()] = None;
        self.by_b[b.index()] = None;
        self.counts[e.color.index()] -= 1;
        true
    }

    /// Symmetric difference with an edge set: members are removed first, the
    /// rest inserted. The usual way to flip an alternating path or cycle.
    pub fn symmetric_difference(&mut self, inst: &Instance, edges: &[Edge]) -> Result<()> {
        let (members, rest): (Vec<Edge>, Vec<Edge>) =
            edges.iter().partition(|&&e| self.contains(e));
        for e in members {
            self.remove(inst, e);
        }
        for e in rest {
            self.insert(inst, e)?;
        }
        Ok(())
    }

    /// All edges, sorted by A-vertex.
    pub fn edges(&self) -> Vec<Edge> {
        self.by_a
            .iter()
            .enumerate()
            .filter_map(|(u, c)| c.map(|c| Edge::new(u as u32, c)))
            .collect()
    }

    /// The unsaturated A-side and B-side vertices. For a matching of size
    /// `n-1` each side has exactly one.
    pub fn unsaturated_pair(&self) -> Option<(Vertex, Vertex)> {
        let a = self.by_a.iter().position(|c| c.is_none())?;
        let b = self.by_b.iter().position(|c| c.is_none())?;
        Some((Vertex::A(a as u32), Vertex::B(b as u32)))
    }

    /// Internal consistency check: the two side tables describe the same
    /// edge set and the counts match.
    pub fn assert_consistent(&self, inst: &Instance) {
        let mut counts = [0usize; 3];
        for (u, &c) in self.by_a.iter().enumerate() {
            if let Some(c) = c {
                let b = inst.partner(c, Vertex::A(u as u32));
                assert_eq!(
                    self.by_b[b.index()],
                    Some(c),
                    "B-side table out of sync at A-vertex {u}"
                );
                counts[c.index()] += 1;
            }
        }
        let b_set = self.by_b.iter().filter(|c| c.is_some()).count();
        assert_eq!(b_set, counts.iter().sum::<usize>(), "B-side table too large");
        assert_eq!(counts, self.counts, "cached counts out of sync");
    }
}

/// Why an external matching failed verification. The first violated
/// condition wins, checked in the order: edge validity, disjointness,
/// exact counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BadEdge { u: i64, color: i64 },
    Disjoint { u1: u32, u2: u32 },
    Counts { got: [usize; 3], want: [usize; 3] },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::BadEdge { u, color } => {
                write!(f, "edge ({u}, {color}) is not an edge of the instance")
            }
            Violation::Disjoint { u1, u2 } => write!(
                f,
                "edges at A-vertices {u1} and {u2} share a B-side endpoint"
            ),
            Violation::Counts { got, want } => write!(
                f,
                "per-color counts ({},{},{}) differ from target ({},{},{})",
                got[0], got[1], got[2], want[0], want[1], want[2]
            ),
        }
    }
}

/// Outcome of verifying a raw edge list against an instance and target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyReport {
    Pass { counts: [usize; 3] },
    Fail(Violation),
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        matches!(self, VerifyReport::Pass { .. })
    }
}

/// Check that a raw edge list is a matching of the instance with exactly the
/// target per-color counts. Works on raw `(A-vertex, color-label)` pairs so
/// that malformed input can be diagnosed rather than rejected at parse time.
pub fn verify_matching(inst: &Instance, edges: &[(i64, i64)], target: TargetTriple) -> VerifyReport {
    let n = inst.n();
    let mut parsed = Vec::with_capacity(edges.len());
    for &(u, color) in edges {
        let c = if (1..=3).contains(&color) {
            Color::from_label(color as u8).unwrap()
        } else {
            return VerifyReport::Fail(Violation::BadEdge { u, color });
        };
        if u < 0 || u >= n as i64 {
            return VerifyReport::Fail(Violation::BadEdge { u, color });
        }
        parsed.push(Edge::new(u as u32, c));
    }
    let mut a_owner: Vec<Option<u32>> = vec![None; n];
    let mut b_owner: Vec<Option<u32>> = vec![None; n];
    let mut counts = [0usize; 3];
    for e in parsed {
        let (a, b) = inst.endpoints(e);
        if let Some(prev) = a_owner[a.index()] {
            return VerifyReport::Fail(Violation::Disjoint { u1: prev, u2: e.u });
        }
        if let Some(prev) = b_owner[b.index()] {
            return VerifyReport::Fail(Violation::Disjoint { u1: prev, u2: e.u });
        }
        a_owner[a.index()] = Some(e.u);
        b_owner[b.index()] = Some(e.u);
        counts[e.color.index()] += 1;
    }
    if counts != target.0 {
        return VerifyReport::Fail(Violation::Counts {
            got: counts,
            want: target.0,
        });
    }
    VerifyReport::Pass { counts }
}

/// Convenience wrapper for matchings built in-process.
pub fn verify(inst: &Instance, m: &Matching, target: TargetTriple) -> VerifyReport {
    let edges: Vec<(i64, i64)> = m
        .edges()
        .iter()
        .map(|e| (e.u as i64, e.color.label() as i64))
        .collect();
    verify_matching(inst, &edges, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic3() -> Instance {
        Instance::cyclic(3)
    }

    #[test]
    fn two_c3_edges_pass() {
        let inst = cyclic3();
        // (0,3) and (1,3): A0-B2 and A1-B0.
        let report = verify_matching(&inst, &[(0, 3), (1, 3)], TargetTriple::new(0, 0, 2));
        assert!(report.passed());
    }

    #[test]
    fn wrong_counts_fail() {
        let inst = cyclic3();
        let report = verify_matching(&inst, &[(0, 3), (1, 3)], TargetTriple::new(1, 0, 1));
        assert_eq!(
            report,
            VerifyReport::Fail(Violation::Counts {
                got: [0, 0, 2],
                want: [1, 0, 1]
            })
        );
    }

    #[test]
    fn shared_b_vertex_fails() {
        let inst = cyclic3();
        // (0,1) is A0-B0 and (2,2) is A2-B(2+2 mod 3)=B1... use (1,3): A1-B0.
        let report = verify_matching(&inst, &[(0, 1), (1, 3)], TargetTriple::new(1, 0, 1));
        assert_eq!(
            report,
            VerifyReport::Fail(Violation::Disjoint { u1: 0, u2: 1 })
        );
    }

    #[test]
    fn bad_edge_fails() {
        let inst = cyclic3();
        let report = verify_matching(&inst, &[(0, 4)], TargetTriple::new(0, 0, 0));
        assert_eq!(
            report,
            VerifyReport::Fail(Violation::BadEdge { u: 0, color: 4 })
        );
        let report = verify_matching(&inst, &[(7, 1)], TargetTriple::new(1, 0, 0));
        assert_eq!(
            report,
            VerifyReport::Fail(Violation::BadEdge { u: 7, color: 1 })
        );
    }

    #[test]
    fn matching_insert_remove_roundtrip() {
        let inst = cyclic3();
        let mut m = Matching::new(3);
        m.insert(&inst, Edge::new(0, Color::C1)).unwrap();
        m.insert(&inst, Edge::new(1, Color::C2)).unwrap();
        assert_eq!(m.counts(), [1, 1, 0]);
        assert!(m.insert(&inst, Edge::new(1, Color::C1)).is_err());
        // A1's C2-edge is A1-B2; A0's C3 edge is A0-B2: conflict on B2.
        assert!(m.insert(&inst, Edge::new(0, Color::C3)).is_err());
        m.assert_consistent(&inst);
        assert!(m.remove(&inst, Edge::new(1, Color::C2)));
        assert!(!m.remove(&inst, Edge::new(1, Color::C2)));
        assert_eq!(m.size(), 1);
        m.assert_consistent(&inst);
    }

    #[test]
    fn unsaturated_pair_found() {
        let inst = cyclic3();
        let m = Matching::from_edges(
            &inst,
            &[Edge::new(0, Color::C1), Edge::new(1, Color::C1)],
        )
        .unwrap();
        assert_eq!(
            m.unsaturated_pair(),
            Some((Vertex::A(2), Vertex::B(2)))
        );
    }
}
