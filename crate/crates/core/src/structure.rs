//! Alternating-structure toolkit: cycle decompositions of two-matching
//! unions, alternating and nearly-alternating paths, shift matchings, the
//! signed bookkeeping function `f_c`, and alternating reachability.
//!
//! Path positions are 1-based throughout this module so that parity
//! statements ("the left unsaturated position is odd") hold verbatim;
//! conversion to 0-based indexing happens only at the storage boundary.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::instance::{Color, Edge, Instance, Vertex};
use crate::matching::Matching;

/// A simple path in the union graph with per-edge colors. Edge `p` (1-based)
/// joins `vertex(p)` and `vertex(p+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltPath {
    verts: Vec<Vertex>,
    colors: Vec<Color>,
}

impl AltPath {
    /// Build a path from a vertex walk, deriving and checking edge colors.
    pub fn from_walk(inst: &Instance, verts: Vec<Vertex>) -> Result<AltPath> {
        if verts.is_empty() {
            return Err(Error::PreconditionViolated("path needs at least one vertex"));
        }
        let mut colors = Vec::with_capacity(verts.len() - 1);
        for w in verts.windows(2) {
            let c = inst
                .edge_color_between(w[0], w[1])
                .ok_or(Error::PreconditionViolated("walk step is not an edge"))?;
            colors.push(c);
        }
        let mut seen = std::collections::HashSet::new();
        for &v in &verts {
            if !seen.insert(v) {
                return Err(Error::PreconditionViolated("path repeats a vertex"));
            }
        }
        Ok(AltPath { verts, colors })
    }

    pub fn num_vertices(&self) -> usize {
        self.verts.len()
    }

    pub fn num_edges(&self) -> usize {
        self.colors.len()
    }

    /// Vertex at 1-based position `pos`.
    pub fn vertex(&self, pos: usize) -> Vertex {
        self.verts[pos - 1]
    }

    /// Color of the 1-based edge position `pos`.
    pub fn color(&self, pos: usize) -> Color {
        self.colors[pos - 1]
    }

    /// Canonical edge at 1-based position `pos`.
    pub fn edge(&self, pos: usize) -> Edge {
        let (v, w) = (self.verts[pos - 1], self.verts[pos]);
        let u = if v.is_a() { v } else { w };
        Edge::new(u.index() as u32, self.color(pos))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn first(&self) -> Vertex {
        self.verts[0]
    }

    pub fn last(&self) -> Vertex {
        *self.verts.last().unwrap()
    }

    pub fn position_of(&self, v: Vertex) -> Option<usize> {
        self.verts.iter().position(|&w| w == v).map(|p| p + 1)
    }

    pub fn edges(&self) -> Vec<Edge> {
        (1..=self.num_edges()).map(|p| self.edge(p)).collect()
    }

    pub fn has_color(&self, c: Color) -> bool {
        self.colors.contains(&c)
    }

    /// Prefix keeping the first `take` vertices.
    pub fn prefix(&self, take: usize) -> AltPath {
        AltPath {
            verts: self.verts[..take].to_vec(),
            colors: self.colors[..take - 1].to_vec(),
        }
    }

    /// Suffix starting at 1-based vertex position `from`.
    pub fn suffix(&self, from: usize) -> AltPath {
        AltPath {
            verts: self.verts[from - 1..].to_vec(),
            colors: self.colors[from - 1..].to_vec(),
        }
    }

    pub fn reversed(&self) -> AltPath {
        let mut verts = self.verts.clone();
        let mut colors = self.colors.clone();
        verts.reverse();
        colors.reverse();
        AltPath { verts, colors }
    }

    /// Concatenate with `other`, whose first vertex must equal our last.
    pub fn concat(&self, other: &AltPath) -> Result<AltPath> {
        if self.last() != other.first() {
            return Err(Error::PreconditionViolated(
                "concatenation endpoints do not meet",
            ));
        }
        let mut verts = self.verts.clone();
        verts.extend_from_slice(&other.verts[1..]);
        let mut colors = self.colors.clone();
        colors.extend_from_slice(&other.colors);
        let mut seen = std::collections::HashSet::new();
        for &v in &verts {
            if !seen.insert(v) {
                return Err(Error::PreconditionViolated("concatenation repeats a vertex"));
            }
        }
        Ok(AltPath { verts, colors })
    }
}

/// Is the path `c`-good for some `c` in `{1, 2}`: all `M_c`-edges at odd
/// positions and all `M_{3-c}`-edges at even positions (color-3 edges are
/// unrestricted)? An all-color-3 path is good for both colors; ties resolve
/// to color 1.
pub fn is_good(path: &AltPath) -> Option<Color> {
    'next: for c in [Color::C1, Color::C2] {
        for pos in 1..=path.num_edges() {
            let col = path.color(pos);
            if col == c && pos % 2 == 0 {
                continue 'next;
            }
            if col == c.bar() && pos % 2 == 1 {
                continue 'next;
            }
        }
        return Some(c);
    }
    None
}

/// A path carrying a reference matching of size `n-1` whose two unsaturated
/// vertices sit on the path at positions `i` (odd) and `j` (even), with the
/// matching saturating every other path vertex through path edges.
#[derive(Debug, Clone)]
pub struct NearlyAltPath {
    path: AltPath,
    i: usize,
    j: usize,
    m: Matching,
}

impl NearlyAltPath {
    pub fn new(inst: &Instance, path: AltPath, m: Matching) -> Result<NearlyAltPath> {
        let n = inst.n();
        if m.size() != n - 1 {
            return Err(Error::MatchingWrongSize {
                expected: n - 1,
                got: m.size(),
            });
        }
        let (ua, ub) = m.unsaturated_pair().expect("size n-1 leaves one vertex per side");
        let pa = path
            .position_of(ua)
            .ok_or(Error::PreconditionViolated("unsaturated vertex not on path"))?;
        let pb = path
            .position_of(ub)
            .ok_or(Error::PreconditionViolated("unsaturated vertex not on path"))?;
        let (i, j) = (pa.min(pb), pa.max(pb));
        if i % 2 != 1 || j % 2 != 0 {
            return Err(Error::BadParity { i, j });
        }
        if path.num_edges() % 2 != 1 {
            return Err(Error::PreconditionViolated("path edge count must be odd"));
        }
        // Every other path vertex must be matched along the path itself.
        for pos in 1..=path.num_vertices() {
            if pos == i || pos == j {
                continue;
            }
            let v = path.vertex(pos);
            let partner = m
                .partner(inst, v)
                .ok_or(Error::PreconditionViolated("path vertex unsaturated"))?;
            let prev = (pos > 1).then(|| path.vertex(pos - 1));
            let next = (pos < path.num_vertices()).then(|| path.vertex(pos + 1));
            if Some(partner) != prev && Some(partner) != next {
                return Err(Error::PreconditionViolated(
                    "path vertex matched off the path",
                ));
            }
        }
        let nearly = NearlyAltPath { path, i, j, m };
        debug_assert!(nearly.membership_consistent());
        Ok(nearly)
    }

    pub fn path(&self) -> &AltPath {
        &self.path
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn matching(&self) -> &Matching {
        &self.m
    }

    pub fn into_matching(self) -> Matching {
        self.m
    }

    /// Whether the edge at 1-based position `pos` belongs to the reference
    /// matching. Follows from the unsaturated positions alone: inside the
    /// window `[i, j-1]` the matched edges sit at even positions, outside at
    /// odd positions.
    pub fn edge_in_matching(&self, pos: usize) -> bool {
        Self::rule(self.i, self.j, pos)
    }

    fn rule(i: usize, j: usize, pos: usize) -> bool {
        let inside = pos >= i && pos < j;
        (pos % 2 == 0) == inside
    }

    fn membership_consistent(&self) -> bool {
        (1..=self.path.num_edges()).all(|p| self.m.contains(self.path.edge(p)) == self.edge_in_matching(p))
    }

    /// The matching that relocates the unsaturated vertices to positions
    /// `(i2, j2)`: flip the path's own perfect matching against the sub-path
    /// between the new positions and keep everything off the path.
    pub fn shift_matching(&self, inst: &Instance, i2: usize, j2: usize) -> Result<Matching> {
        let len = self.path.num_vertices();
        if i2 < 1 || j2 > len {
            return Err(Error::OutOfRange {
                pos: if i2 < 1 { i2 } else { j2 },
                max: len,
            });
        }
        if i2 % 2 != 1 || j2 % 2 != 0 || i2 >= j2 {
            return Err(Error::BadParity { i: i2, j: j2 });
        }
        let mut m = self.m.clone();
        let mut to_add = Vec::new();
        for pos in 1..=self.path.num_edges() {
            let old = Self::rule(self.i, self.j, pos);
            let new = Self::rule(i2, j2, pos);
            if old && !new {
                m.remove(inst, self.path.edge(pos));
            } else if !old && new {
                to_add.push(self.path.edge(pos));
            }
        }
        for e in to_add {
            m.insert(inst, e)?;
        }
        Ok(m)
    }

    /// Shift and rewrap as a nearly-alternating path at the new positions.
    pub fn shifted(&self, inst: &Instance, i2: usize, j2: usize) -> Result<NearlyAltPath> {
        let m = self.shift_matching(inst, i2, j2)?;
        NearlyAltPath::new(inst, self.path.clone(), m)
    }

    /// Signed count of color-`c` edges strictly between the unsaturated
    /// positions: matched ones count +1, unmatched -1.
    pub fn f(&self, c: Color) -> i64 {
        let mut total = 0i64;
        for pos in self.i..self.j {
            if self.path.color(pos) == c {
                total += if self.edge_in_matching(pos) { 1 } else { -1 };
            }
        }
        total
    }
}

/// `f_c` evaluated on a nearly-alternating path (free-function form).
pub fn f_c(p: &NearlyAltPath, c: Color) -> i64 {
    p.f(c)
}

/// A cycle in the union of two matchings: cyclically ordered vertices where
/// edge `t` (0-based) joins `verts[t]` and `verts[(t+1) % len]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    verts: Vec<Vertex>,
    colors: Vec<Color>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn half(&self) -> usize {
        self.verts.len() / 2
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn vertex(&self, t: usize) -> Vertex {
        self.verts[t % self.len()]
    }

    pub fn color(&self, t: usize) -> Color {
        self.colors[t % self.len()]
    }

    pub fn edge(&self, t: usize) -> Edge {
        let v = self.vertex(t);
        let w = self.vertex(t + 1);
        let u = if v.is_a() { v } else { w };
        Edge::new(u.index() as u32, self.color(t))
    }

    pub fn edges(&self) -> Vec<Edge> {
        (0..self.len()).map(|t| self.edge(t)).collect()
    }

    pub fn edges_of_color(&self, c: Color) -> Vec<Edge> {
        (0..self.len())
            .filter(|&t| self.color(t) == c)
            .map(|t| self.edge(t))
            .collect()
    }

    pub fn position_of(&self, v: Vertex) -> Option<usize> {
        self.verts.iter().position(|&w| w == v)
    }

    /// Reorient the cycle to start at `v` with a first edge of color
    /// `first`. Every vertex has exactly one incident edge of each of the
    /// two cycle colors, so the orientation is unique.
    pub fn oriented(&self, v: Vertex, first: Color) -> Cycle {
        let len = self.len();
        let pos = self.position_of(v).expect("vertex not on cycle");
        let forward_color = self.color(pos);
        let mut verts = Vec::with_capacity(len);
        let mut colors = Vec::with_capacity(len);
        if forward_color == first {
            for t in 0..len {
                verts.push(self.vertex(pos + t));
                colors.push(self.color(pos + t));
            }
        } else {
            // walk backwards: edge into position pos has the other color
            for t in 0..len {
                verts.push(self.vertex((pos + len - t) % len));
                colors.push(self.color((pos + 2 * len - t - 1) % len));
            }
        }
        debug_assert_eq!(colors[0], first);
        Cycle { verts, colors }
    }

    /// The arc from `v` to `w` whose first edge at `v` has color `first`,
    /// as a path.
    pub fn arc(&self, v: Vertex, w: Vertex, first: Color) -> AltPath {
        let oriented = self.oriented(v, first);
        let end = oriented.position_of(w).expect("arc endpoint not on cycle");
        AltPath {
            verts: oriented.verts[..=end].to_vec(),
            colors: oriented.colors[..end].to_vec(),
        }
    }
}

/// All cycles of `M_c ∪ M_c'`, each starting at its smallest A-vertex with
/// a first edge of color `c`. The two perfect matchings are disjoint, so
/// their union is a 2-factor of even cycles covering every vertex once.
pub fn cycle_decomposition(inst: &Instance, c: Color, cp: Color) -> Result<Vec<Cycle>> {
    if c == cp {
        return Err(Error::PreconditionViolated(
            "cycle decomposition needs two distinct colors",
        ));
    }
    let n = inst.n();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut verts = Vec::new();
        let mut colors = Vec::new();
        let mut v = Vertex::A(start as u32);
        let mut color = c;
        loop {
            if let Vertex::A(u) = v {
                seen[u as usize] = true;
            }
            verts.push(v);
            colors.push(color);
            v = inst.partner(color, v);
            color = if color == c { cp } else { c };
            if v == Vertex::A(start as u32) {
                break;
            }
        }
        cycles.push(Cycle { verts, colors });
    }
    Ok(cycles)
}

/// The derived objects for a matching of size `n-1`: the components of
/// `M ∪ M1` and `M ∪ M2` through the unsaturated pair, whether their union
/// is a color-1/color-2 alternating cycle, and the alternating cycles of
/// `M1 ∪ M2`.
#[derive(Debug, Clone)]
pub struct StructureView {
    pub p1: AltPath,
    pub p2: AltPath,
    pub c0_is_cycle: bool,
    pub alt_cycles: Vec<Cycle>,
}

impl StructureView {
    /// Vertices of `P1 ∪ P2`, deduplicated.
    pub fn c0_vertices(&self) -> Vec<Vertex> {
        let mut verts: Vec<Vertex> = self
            .p1
            .vertices()
            .iter()
            .chain(self.p2.vertices())
            .copied()
            .collect();
        verts.sort_unstable();
        verts.dedup();
        verts
    }
}

/// Walk the component of `M ∪ M_color` starting at an unsaturated vertex.
/// Starts with the `M_color`-edge and alternates; ends at the other
/// unsaturated vertex.
pub(crate) fn unsaturated_component_walk(
    inst: &Instance,
    m: &Matching,
    color: Color,
    from: Vertex,
) -> AltPath {
    let mut verts = vec![from];
    let mut cur = from;
    loop {
        // matching-color step
        cur = inst.partner(color, cur);
        verts.push(cur);
        if !m.is_saturated(cur) {
            break;
        }
        // reference-matching step
        cur = m.partner(inst, cur).unwrap();
        verts.push(cur);
    }
    AltPath::from_walk(inst, verts).expect("component walk is a simple path")
}

/// Compute the structure view for a matching of size `n-1`.
pub fn structure_view(inst: &Instance, m: &Matching) -> Result<StructureView> {
    let n = inst.n();
    if m.size() != n - 1 {
        return Err(Error::MatchingWrongSize {
            expected: n - 1,
            got: m.size(),
        });
    }
    let (ua, ub) = m.unsaturated_pair().unwrap();
    let p1 = unsaturated_component_walk(inst, m, Color::C1, ua);
    let p2 = unsaturated_component_walk(inst, m, Color::C2, ub);
    debug_assert_eq!(p1.last(), ub);
    debug_assert_eq!(p2.last(), ua);
    let c0_is_cycle = !p1.has_color(Color::C3) && !p2.has_color(Color::C3);
    if c0_is_cycle {
        // the interiors are then saturated by different colors of M, so the
        // paths can only meet at their endpoints
        debug_assert!({
            let shared = p1
                .vertices()
                .iter()
                .filter(|v| p2.vertices().contains(v))
                .count();
            shared == 2
        });
    }
    let mut alt_cycles = Vec::new();
    for cycle in cycle_decomposition(inst, Color::C1, Color::C2)? {
        let mut in1 = 0usize;
        let mut out1 = 0usize;
        let mut in2 = 0usize;
        let mut out2 = 0usize;
        for t in 0..cycle.len() {
            let e = cycle.edge(t);
            match (e.color, m.contains(e)) {
                (Color::C1, true) => in1 += 1,
                (Color::C1, false) => out1 += 1,
                (Color::C2, true) => in2 += 1,
                (Color::C2, false) => out2 += 1,
                _ => unreachable!("cycle of M1 ∪ M2 has a color-3 edge"),
            }
        }
        if (in1 == cycle.half() && in2 == 0 && out1 == 0)
            || (in2 == cycle.half() && in1 == 0 && out2 == 0)
        {
            alt_cycles.push(cycle);
        }
    }
    Ok(StructureView {
        p1,
        p2,
        c0_is_cycle,
        alt_cycles,
    })
}

/// Alternating-path reachability from an unsaturated vertex. Vertices on the
/// far side are reached through non-matching edges, vertices on the start's
/// side through matching edges; a predecessor table reconstructs the paths.
#[derive(Debug, Clone)]
pub struct AltReachability {
    start: Vertex,
    pred: Vec<Option<Vertex>>,
    dist: Vec<u32>,
    n: usize,
}

impl AltReachability {
    pub fn start(&self) -> Vertex {
        self.start
    }

    pub fn distance(&self, v: Vertex) -> u32 {
        self.dist[v.flat(self.n)]
    }

    /// The alternating path from the start to `w`.
    pub fn path_to(&self, inst: &Instance, w: Vertex) -> AltPath {
        let mut verts = vec![w];
        let mut cur = w;
        while cur != self.start {
            cur = self.pred[cur.flat(self.n)].expect("vertex was reached");
            verts.push(cur);
        }
        verts.reverse();
        AltPath::from_walk(inst, verts).expect("predecessor chain is a simple path")
    }
}

/// Breadth-first search over alternating paths from `v`, which must be
/// unsaturated. On a connected instance this reaches every vertex.
pub fn alternating_reachability(
    inst: &Instance,
    m: &Matching,
    v: Vertex,
) -> Result<AltReachability> {
    if m.is_saturated(v) {
        return Err(Error::VertexSaturated);
    }
    let n = inst.n();
    let mut pred: Vec<Option<Vertex>> = vec![None; 2 * n];
    let mut dist = vec![u32::MAX; 2 * n];
    let mut visited = vec![false; 2 * n];
    visited[v.flat(n)] = true;
    dist[v.flat(n)] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(v);
    while let Some(x) = queue.pop_front() {
        for c in Color::ALL {
            if m.color_at(x) == Some(c) {
                continue; // outgoing steps from this side use non-matching edges
            }
            let w = inst.partner(c, x);
            if visited[w.flat(n)] {
                continue;
            }
            visited[w.flat(n)] = true;
            dist[w.flat(n)] = dist[x.flat(n)] + 1;
            pred[w.flat(n)] = Some(x);
            if let Some(y) = m.partner(inst, w) {
                if !visited[y.flat(n)] {
                    visited[y.flat(n)] = true;
                    dist[y.flat(n)] = dist[w.flat(n)] + 1;
                    pred[y.flat(n)] = Some(w);
                    queue.push_back(y);
                }
            }
        }
    }
    if visited.iter().any(|&b| !b) {
        return Err(Error::Disconnected);
    }
    Ok(AltReachability {
        start: v,
        pred,
        dist,
        n,
    })
}

/// The maximal walk from `start` alternating edges of `walk_color` and edges
/// of `m`. Both edge classes are matchings, so the walk is deterministic; it
/// ends with a `walk_color` edge at an `m`-unsaturated vertex and has odd
/// length.
pub fn alternating_walk(
    inst: &Instance,
    m: &Matching,
    start: Vertex,
    walk_color: Color,
) -> Result<AltPath> {
    if m.is_saturated(start) {
        return Err(Error::StartSaturated);
    }
    if m.count(walk_color) != 0 {
        return Err(Error::PreconditionViolated(
            "walk matching must not use the walk color",
        ));
    }
    let mut verts = vec![start];
    let mut cur = start;
    loop {
        cur = inst.partner(walk_color, cur);
        verts.push(cur);
        if !m.is_saturated(cur) {
            break;
        }
        cur = m.partner(inst, cur).unwrap();
        verts.push(cur);
    }
    let path = AltPath::from_walk(inst, verts).expect("alternating walk is a simple path");
    debug_assert_eq!(path.num_edges() % 2, 1);
    Ok(path)
}

/// The maximal walk alternating color-3 edges and `m`-edges.
pub fn max_alt_walk(inst: &Instance, m: &Matching, start: Vertex) -> Result<AltPath> {
    alternating_walk(inst, m, start, Color::C3)
}
