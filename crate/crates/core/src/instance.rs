//! Instance model: a bipartite graph on `2n` vertices given as the union of
//! three pairwise disjoint perfect matchings, each encoded as a permutation
//! of the A-side onto the B-side.

use crate::error::{Error, Result};

/// A vertex of the bipartite graph. Sides are indexed independently, each
/// from `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    A(u32),
    B(u32),
}

impl Vertex {
    pub fn index(self) -> usize {
        match self {
            Vertex::A(i) | Vertex::B(i) => i as usize,
        }
    }

    pub fn is_a(self) -> bool {
        matches!(self, Vertex::A(_))
    }

    /// Flat id in `0..2n`, A-side first. Used for dense per-vertex tables.
    pub fn flat(self, n: usize) -> usize {
        match self {
            Vertex::A(i) => i as usize,
            Vertex::B(i) => n + i as usize,
        }
    }

    pub fn from_flat(id: usize, n: usize) -> Vertex {
        if id < n {
            Vertex::A(id as u32)
        } else {
            Vertex::B((id - n) as u32)
        }
    }
}

/// One of the three matchings, used as an edge color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    C1,
    C2,
    C3,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::C1, Color::C2, Color::C3];

    pub fn index(self) -> usize {
        match self {
            Color::C1 => 0,
            Color::C2 => 1,
            Color::C3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Color {
        Color::ALL[i]
    }

    /// External 1-based label, as used in files and reports.
    pub fn label(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_label(l: u8) -> Option<Color> {
        match l {
            1 => Some(Color::C1),
            2 => Some(Color::C2),
            3 => Some(Color::C3),
            _ => None,
        }
    }

    /// The other color of the pair `{C1, C2}`.
    pub fn bar(self) -> Color {
        match self {
            Color::C1 => Color::C2,
            Color::C2 => Color::C1,
            Color::C3 => panic!("bar() is only defined on colors 1 and 2"),
        }
    }
}

impl std::fmt::Display for Color {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// An edge, canonically keyed by its A-side endpoint and color. The B-side
/// endpoint is always derived from the instance, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: u32,
    pub color: Color,
}

impl Edge {
    pub fn new(u: u32, color: Color) -> Edge {
        Edge { u, color }
    }
}

/// Exact per-color multiplicity target `(a1, a2, a3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetTriple(pub [usize; 3]);

impl TargetTriple {
    pub fn new(a1: usize, a2: usize, a3: usize) -> TargetTriple {
        TargetTriple([a1, a2, a3])
    }

    pub fn sum(self) -> usize {
        self.0.iter().sum()
    }

    pub fn get(self, c: Color) -> usize {
        self.0[c.index()]
    }

    pub fn nonzero_colors(self) -> Vec<Color> {
        Color::ALL.iter().copied().filter(|c| self.get(*c) > 0).collect()
    }

    /// Swap the roles of colors 1 and 2.
    pub fn swap12(self) -> TargetTriple {
        TargetTriple([self.0[1], self.0[0], self.0[2]])
    }
}

impl std::fmt::Display for TargetTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Per-color upper bounds `(b1, b2, b3)` used by the reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetTriple(pub [usize; 3]);

impl BudgetTriple {
    pub fn new(b1: usize, b2: usize, b3: usize) -> BudgetTriple {
        BudgetTriple([b1, b2, b3])
    }

    pub fn sum(self) -> usize {
        self.0.iter().sum()
    }

    pub fn get(self, c: Color) -> usize {
        self.0[c.index()]
    }
}

/// A validated instance: `n` plus three pairwise discordant permutations.
/// `perm(c)[u]` is the B-side partner of A-side vertex `u` in matching `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    perms: [Vec<u32>; 3],
    invs: [Vec<u32>; 3],
}

impl Instance {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn perm(&self, c: Color) -> &[u32] {
        &self.perms[c.index()]
    }

    /// The partner of `v` under matching `c`.
    pub fn partner(&self, c: Color, v: Vertex) -> Vertex {
        match v {
            Vertex::A(u) => Vertex::B(self.perms[c.index()][u as usize]),
            Vertex::B(b) => Vertex::A(self.invs[c.index()][b as usize]),
        }
    }

    /// The color of the edge between `v` and `w`, if the graph has one.
    /// Disjointness guarantees at most one edge per vertex pair.
    pub fn edge_color_between(&self, v: Vertex, w: Vertex) -> Option<Color> {
        Color::ALL
            .iter()
            .copied()
            .find(|&c| self.partner(c, v) == w)
    }

    /// Canonical `Edge` for the pair `(v, w)`; panics if they are not
    /// adjacent.
    pub fn edge_between(&self, v: Vertex, w: Vertex) -> Edge {
        let color = self
            .edge_color_between(v, w)
            .unwrap_or_else(|| panic!("no edge between {v:?} and {w:?}"));
        let u = if v.is_a() { v } else { w };
        Edge::new(u.index() as u32, color)
    }

    pub fn endpoints(&self, e: Edge) -> (Vertex, Vertex) {
        let a = Vertex::A(e.u);
        (a, self.partner(e.color, a))
    }

    /// Swap the roles of colors 1 and 2. Used to run color-symmetric
    /// arguments in one fixed direction.
    pub fn swap12(&self) -> Instance {
        Instance {
            n: self.n,
            perms: [
                self.perms[1].clone(),
                self.perms[0].clone(),
                self.perms[2].clone(),
            ],
            invs: [
                self.invs[1].clone(),
                self.invs[0].clone(),
                self.invs[2].clone(),
            ],
        }
    }

    /// The instance on `n >= 3` vertices per side whose matchings are the
    /// shifts `u -> u`, `u -> u+1`, `u -> u+2` (mod n).
    pub fn cyclic(n: usize) -> Instance {
        let perms: Vec<Vec<i64>> = (0..3)
            .map(|s| (0..n).map(|u| ((u + s) % n) as i64).collect())
            .collect();
        validate_instance(n, &perms).expect("cyclic shifts are pairwise discordant for n >= 3")
    }
}

/// Validate raw input into an [`Instance`].
///
/// Checks, in order: `n >= 3`, permutation lengths, that each row is a
/// bijection on `0..n`, and pairwise discordance (no two matchings share an
/// edge).
pub fn validate_instance(n: usize, perms: &[Vec<i64>]) -> Result<Instance> {
    if n < 3 {
        return Err(Error::NTooSmall(n));
    }
    if perms.len() != 3 {
        return Err(Error::LengthMismatch {
            c: perms.len().min(3),
            expected: 3,
            got: perms.len(),
        });
    }
    let mut rows: [Vec<u32>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut invs: [Vec<u32>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (c, perm) in perms.iter().enumerate() {
        if perm.len() != n {
            return Err(Error::LengthMismatch {
                c,
                expected: n,
                got: perm.len(),
            });
        }
        let mut row = Vec::with_capacity(n);
        let mut inv = vec![u32::MAX; n];
        for &x in perm {
            if x < 0 || x >= n as i64 {
                return Err(Error::NotABijection(c));
            }
            row.push(x as u32);
        }
        for (u, &b) in row.iter().enumerate() {
            if inv[b as usize] != u32::MAX {
                return Err(Error::NotABijection(c));
            }
            inv[b as usize] = u as u32;
        }
        rows[c] = row;
        invs[c] = inv;
    }
    for c1 in 0..3 {
        for c2 in c1 + 1..3 {
            for u in 0..n {
                if rows[c1][u] == rows[c2][u] {
                    return Err(Error::MatchingsOverlap {
                        u: u as u32,
                        c1,
                        c2,
                    });
                }
            }
        }
    }
    Ok(Instance {
        n,
        perms: rows,
        invs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_3_is_valid() {
        let inst = Instance::cyclic(3);
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.partner(Color::C2, Vertex::A(2)), Vertex::B(0));
        assert_eq!(inst.partner(Color::C2, Vertex::B(0)), Vertex::A(2));
    }

    #[test]
    fn overlapping_matchings_rejected() {
        let perms = vec![vec![0, 1, 2], vec![0, 1, 2], vec![1, 2, 0]];
        assert_eq!(
            validate_instance(3, &perms),
            Err(Error::MatchingsOverlap { u: 0, c1: 0, c2: 1 })
        );
    }

    #[test]
    fn n_too_small_rejected() {
        let perms = vec![vec![0, 1], vec![1, 0], vec![0, 1]];
        assert_eq!(validate_instance(2, &perms), Err(Error::NTooSmall(2)));
    }

    #[test]
    fn non_bijection_rejected() {
        let perms = vec![vec![0, 0, 2], vec![1, 2, 0], vec![2, 0, 1]];
        assert_eq!(validate_instance(3, &perms), Err(Error::NotABijection(0)));
        let perms = vec![vec![0, 1, 3], vec![1, 2, 0], vec![2, 0, 1]];
        assert_eq!(validate_instance(3, &perms), Err(Error::NotABijection(0)));
    }

    #[test]
    fn length_mismatch_rejected() {
        let perms = vec![vec![0, 1, 2], vec![1, 2], vec![2, 0, 1]];
        assert_eq!(
            validate_instance(3, &perms),
            Err(Error::LengthMismatch {
                c: 1,
                expected: 3,
                got: 2
            })
        );
    }

    #[test]
    fn every_pair_has_at_most_one_edge() {
        let inst = Instance::cyclic(5);
        for u in 0..5u32 {
            for b in 0..5u32 {
                let colors: Vec<_> = Color::ALL
                    .iter()
                    .filter(|&&c| inst.partner(c, Vertex::A(u)) == Vertex::B(b))
                    .collect();
                assert!(colors.len() <= 1);
            }
        }
    }
}
