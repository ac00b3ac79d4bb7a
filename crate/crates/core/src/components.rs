//! Connected components of the union graph and restriction to a component.

use std::collections::VecDeque;

use crate::error::Result;
use crate::instance::{Color, Edge, Instance, Vertex};
use crate::matching::Matching;

/// One connected component of `M1 ∪ M2 ∪ M3`, as sorted vertex lists per
/// side. Components always have equally many vertices on each side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub a_vertices: Vec<u32>,
    pub b_vertices: Vec<u32>,
}

impl Component {
    /// Total vertex count (both sides).
    pub fn size(&self) -> usize {
        self.a_vertices.len() + self.b_vertices.len()
    }
}

/// Connected components of the union graph, smallest first (ties broken by
/// smallest A-vertex) so downstream peeling is deterministic.
pub fn components(inst: &Instance) -> Vec<Component> {
    let n = inst.n();
    let mut seen = vec![false; 2 * n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut a_vertices = Vec::new();
        let mut b_vertices = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back(Vertex::A(start as u32));
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            match v {
                Vertex::A(i) => a_vertices.push(i),
                Vertex::B(i) => b_vertices.push(i),
            }
            for c in Color::ALL {
                let w = inst.partner(c, v);
                if !seen[w.flat(n)] {
                    seen[w.flat(n)] = true;
                    queue.push_back(w);
                }
            }
        }
        a_vertices.sort_unstable();
        b_vertices.sort_unstable();
        out.push(Component {
            a_vertices,
            b_vertices,
        });
    }
    out.sort_by_key(|comp| (comp.size(), comp.a_vertices[0]));
    out
}

/// A component re-indexed as a standalone instance, with maps back to the
/// parent's vertex numbering.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub sub: Instance,
    a_to_parent: Vec<u32>,
    b_to_parent: Vec<u32>,
}

impl Restriction {
    pub fn lift_edge(&self, e: Edge) -> Edge {
        Edge::new(self.a_to_parent[e.u as usize], e.color)
    }

    pub fn lift_vertex(&self, v: Vertex) -> Vertex {
        match v {
            Vertex::A(i) => Vertex::A(self.a_to_parent[i as usize]),
            Vertex::B(i) => Vertex::B(self.b_to_parent[i as usize]),
        }
    }

    /// Lift a matching of the sub-instance into a matching of the parent.
    pub fn lift_matching(&self, parent: &Instance, m: &Matching) -> Result<Matching> {
        let edges: Vec<Edge> = m.edges().iter().map(|&e| self.lift_edge(e)).collect();
        Matching::from_edges(parent, &edges)
    }
}

/// Restrict `inst` to one of its components. The three matchings are perfect
/// matchings of every component, so the result is again a valid instance.
pub fn restrict(inst: &Instance, comp: &Component) -> Restriction {
    let m = comp.a_vertices.len();
    let mut a_index = vec![u32::MAX; inst.n()];
    let mut b_index = vec![u32::MAX; inst.n()];
    for (i, &a) in comp.a_vertices.iter().enumerate() {
        a_index[a as usize] = i as u32;
    }
    for (i, &b) in comp.b_vertices.iter().enumerate() {
        b_index[b as usize] = i as u32;
    }
    let mut perms: Vec<Vec<i64>> = vec![vec![0; m]; 3];
    for c in Color::ALL {
        for (i, &a) in comp.a_vertices.iter().enumerate() {
            let b = inst.partner(c, Vertex::A(a)).index();
            let bi = b_index[b];
            debug_assert_ne!(bi, u32::MAX, "component is not closed under matchings");
            perms[c.index()][i] = bi as i64;
        }
    }
    let sub = crate::instance::validate_instance(m, &perms)
        .expect("a component of a valid instance is a valid instance");
    Restriction {
        sub,
        a_to_parent: comp.a_vertices.clone(),
        b_to_parent: comp.b_vertices.clone(),
    }
}

/// Build a block-diagonal instance from smaller ones; the blocks become the
/// connected components (test and generator helper).
pub fn block_instance(blocks: &[Instance]) -> Instance {
    let n: usize = blocks.iter().map(|b| b.n()).sum();
    let mut perms: Vec<Vec<i64>> = vec![Vec::with_capacity(n); 3];
    let mut offset = 0i64;
    for b in blocks {
        for c in Color::ALL {
            perms[c.index()].extend(b.perm(c).iter().map(|&x| x as i64 + offset));
        }
        offset += b.n() as i64;
    }
    crate::instance::validate_instance(n, &perms)
        .expect("block union of valid instances is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::TargetTriple;
    use crate::matching::verify;

    #[test]
    fn cyclic3_is_one_component() {
        let inst = Instance::cyclic(3);
        let comps = components(&inst);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].size(), 6);
    }

    #[test]
    fn two_blocks_are_two_components() {
        let inst = block_instance(&[Instance::cyclic(3), Instance::cyclic(3)]);
        let comps = components(&inst);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].size(), 6);
        assert_eq!(comps[1].size(), 6);
        assert_eq!(comps[0].a_vertices, vec![0, 1, 2]);
        assert_eq!(comps[1].a_vertices, vec![3, 4, 5]);
    }

    #[test]
    fn components_partition_vertices() {
        for n in [3usize, 4, 5, 7] {
            let inst = Instance::cyclic(n);
            let comps = components(&inst);
            let total: usize = comps.iter().map(|c| c.size()).sum();
            assert_eq!(total, 2 * n);
        }
        let inst = block_instance(&[
            Instance::cyclic(3),
            Instance::cyclic(4),
            Instance::cyclic(5),
        ]);
        let comps = components(&inst);
        let total: usize = comps.iter().map(|c| c.size()).sum();
        assert_eq!(total, 2 * inst.n());
        // smallest-first order
        assert_eq!(
            comps.iter().map(|c| c.size()).collect::<Vec<_>>(),
            vec![6, 8, 10]
        );
    }

    #[test]
    fn restrict_single_component_is_identity() {
        let inst = Instance::cyclic(4);
        let comps = components(&inst);
        let r = restrict(&inst, &comps[0]);
        assert_eq!(r.sub, inst);
    }

    #[test]
    fn restrict_first_block_is_cyclic3() {
        let inst = block_instance(&[Instance::cyclic(3), Instance::cyclic(3)]);
        let comps = components(&inst);
        let r = restrict(&inst, &comps[0]);
        assert_eq!(r.sub, Instance::cyclic(3));
    }

    #[test]
    fn lift_roundtrips_into_parent() {
        let inst = block_instance(&[Instance::cyclic(3), Instance::cyclic(4)]);
        let comps = components(&inst);
        let r = restrict(&inst, &comps[1]);
        // A perfect matching of the sub-instance lifts to parent edges.
        let m = Matching::from_edges(
            &r.sub,
            &(0..4).map(|u| Edge::new(u, Color::C2)).collect::<Vec<_>>(),
        )
        .unwrap();
        let lifted = r.lift_matching(&inst, &m).unwrap();
        assert_eq!(lifted.counts(), [0, 4, 0]);
        let report = verify(&inst, &lifted, TargetTriple::new(0, 4, 0));
        assert!(report.passed());
    }
}
