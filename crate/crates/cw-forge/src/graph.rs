//! Colored graphs, flips, connected components and partition rank.
//!
//! Everything downstream builds on the types here. Graphs are finite and
//! simple, every vertex carries exactly one color from `[k]`, and vertex ids
//! are stable opaque integers that survive every transformation so that
//! equality checks can be by identity rather than isomorphism search.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// 1-based color, always in `[k]` for the carrying structure's `k`.
pub type Color = u32;

/// Stable opaque vertex identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A subset of `[k]` stored as a bitmask (bit `i-1` set means color `i` is a
/// member). Supports k up to 64.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ColorSet(pub u64);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);

    pub fn singleton(c: Color) -> Self {
        ColorSet(1u64 << (c - 1))
    }

    pub fn contains(&self, c: Color) -> bool {
        c >= 1 && c <= 64 && self.0 & (1u64 << (c - 1)) != 0
    }

    pub fn insert(&mut self, c: Color) {
        self.0 |= 1u64 << (c - 1);
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = Color> + '_ {
        (1..=64u32).filter(move |c| self.contains(*c))
    }

    pub fn is_subset_of_range(&self, k: u32) -> bool {
        if k >= 64 {
            return true;
        }
        self.0 >> k == 0
    }

    /// Renders as a comma list, with `-` for the empty set.
    pub fn to_text(&self) -> String {
        if self.is_empty() {
            "-".to_string()
        } else {
            self.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    pub fn parse_text(s: &str) -> std::result::Result<Self, String> {
        let mut set = ColorSet::EMPTY;
        if s == "-" {
            return Ok(set);
        }
        for part in s.split(',') {
            let c: u32 = part.trim().parse().map_err(|_| format!("bad color `{part}`"))?;
            if c == 0 || c > 64 {
                return Err(format!("color {c} out of supported range"));
            }
            set.insert(c);
        }
        Ok(set)
    }
}

impl FromIterator<Color> for ColorSet {
    fn from_iter<T: IntoIterator<Item = Color>>(iter: T) -> Self {
        let mut s = ColorSet::EMPTY;
        for c in iter {
            s.insert(c);
        }
        s
    }
}

/// A total recoloring function `[k] -> [k]`, stored densely: entry `i-1`
/// holds the image of color `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Recoloring(pub Vec<Color>);

impl Recoloring {
    pub fn identity(k: u32) -> Self {
        Recoloring((1..=k).collect())
    }

    pub fn k(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn apply(&self, c: Color) -> Color {
        self.0[(c - 1) as usize]
    }

    /// `outer ∘ inner`: applies `inner` first.
    pub fn compose(outer: &Recoloring, inner: &Recoloring) -> Recoloring {
        Recoloring(inner.0.iter().map(|&c| outer.apply(c)).collect())
    }

    pub fn preimage(&self, set: ColorSet) -> ColorSet {
        (1..=self.k()).filter(|&c| set.contains(self.apply(c))).collect()
    }

    pub fn image(&self) -> ColorSet {
        self.0.iter().copied().collect()
    }

    /// True iff every color in the image is a fixed point. For total maps on
    /// a finite range this coincides with `φ∘φ = φ`.
    pub fn is_idempotent(&self) -> bool {
        self.image().iter().all(|c| self.apply(c) == c)
    }

    pub fn is_valid(&self) -> bool {
        let k = self.k();
        self.0.iter().all(|&c| c >= 1 && c <= k)
    }
}

/// A finite simple graph with a color in `[k]` on every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    k: u32,
    colors: BTreeMap<VertexId, Color>,
    edges: BTreeSet<(VertexId, VertexId)>,
}

fn ordered(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ColoredGraph {
    pub fn empty(k: u32) -> Self {
        ColoredGraph { k, colors: BTreeMap::new(), edges: BTreeSet::new() }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.colors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.colors.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.colors.keys().copied().collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.colors.contains_key(&v)
    }

    pub fn color(&self, v: VertexId) -> Color {
        self.colors[&v]
    }

    pub fn try_color(&self, v: VertexId) -> Option<Color> {
        self.colors.get(&v).copied()
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains(&ordered(a, b))
    }

    pub fn add_vertex(&mut self, v: VertexId, color: Color) -> Result<()> {
        if color == 0 || color > self.k {
            return Err(Error::input(format!("color {color} out of range [1,{}]", self.k)));
        }
        if self.colors.insert(v, color).is_some() {
            return Err(Error::input(format!("duplicate vertex id {v}")));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<()> {
        if a == b {
            return Err(Error::input(format!("self-loop at vertex {a}")));
        }
        if !self.contains_vertex(a) || !self.contains_vertex(b) {
            return Err(Error::input(format!("edge {a}-{b} references unknown vertex")));
        }
        self.edges.insert(ordered(a, b));
        Ok(())
    }

    pub fn toggle_edge(&mut self, a: VertexId, b: VertexId) {
        debug_assert!(a != b);
        let e = ordered(a, b);
        if !self.edges.remove(&e) {
            self.edges.insert(e);
        }
    }

    pub fn set_color(&mut self, v: VertexId, color: Color) {
        debug_assert!(color >= 1 && color <= self.k);
        self.colors.insert(v, color);
    }

    pub fn recolor(&self, phi: &Recoloring) -> ColoredGraph {
        let mut g = self.clone();
        for c in g.colors.values_mut() {
            *c = phi.apply(*c);
        }
        g
    }

    /// Adjacency lists, built on demand.
    pub fn adjacency(&self) -> BTreeMap<VertexId, BTreeSet<VertexId>> {
        let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> =
            self.vertices().map(|v| (v, BTreeSet::new())).collect();
        for &(a, b) in &self.edges {
            adj.get_mut(&a).unwrap().insert(b);
            adj.get_mut(&b).unwrap().insert(a);
        }
        adj
    }

    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut n = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a == v {
                n.insert(b);
            } else if b == v {
                n.insert(a);
            }
        }
        n
    }

    /// Toggles the adjacency of every unordered pair `{x,y}` with `x ∈ X`,
    /// `y ∈ Y`, `x ≠ y`. Each qualifying pair is toggled exactly once even
    /// when `X` and `Y` overlap. Colors are unchanged.
    pub fn flip(&self, xs: &BTreeSet<VertexId>, ys: &BTreeSet<VertexId>) -> Result<ColoredGraph> {
        for v in xs.iter().chain(ys.iter()) {
            if !self.contains_vertex(*v) {
                return Err(Error::input(format!("flip references unknown vertex {v}")));
            }
        }
        let mut pairs = BTreeSet::new();
        for &x in xs {
            for &y in ys {
                if x != y {
                    pairs.insert(ordered(x, y));
                }
            }
        }
        let mut g = self.clone();
        for (a, b) in pairs {
            g.toggle_edge(a, b);
        }
        Ok(g)
    }

    /// Connectivity partition; classes are ordered by their smallest vertex id.
    pub fn connected_components(&self) -> Vec<BTreeSet<VertexId>> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::new();
        let mut classes = Vec::new();
        for v in self.vertices() {
            if seen.contains(&v) {
                continue;
            }
            let mut class = BTreeSet::new();
            let mut queue = VecDeque::from([v]);
            seen.insert(v);
            while let Some(u) = queue.pop_front() {
                class.insert(u);
                for &w in &adj[&u] {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            classes.push(class);
        }
        classes
    }

    /// Number of classes of the relation "same side of the cut and equal
    /// neighborhood on the other side", for the cut `(v0, complement)`.
    pub fn partition_rank(&self, v0: &BTreeSet<VertexId>) -> usize {
        let mut keys: BTreeSet<(bool, Vec<VertexId>)> = BTreeSet::new();
        for v in self.vertices() {
            let side = v0.contains(&v);
            let nbhd: Vec<VertexId> = self
                .neighbors(v)
                .into_iter()
                .filter(|w| v0.contains(w) != side)
                .collect();
            keys.insert((side, nbhd));
        }
        keys.len()
    }

    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> ColoredGraph {
        let colors = self
            .colors
            .iter()
            .filter(|(v, _)| keep.contains(v))
            .map(|(v, c)| (*v, *c))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .copied()
            .collect();
        ColoredGraph { k: self.k, colors, edges }
    }

    /// Identity comparison of vertex ids, colors and edges; the width context
    /// `k` is allowed to differ.
    pub fn same_labeled_graph(&self, other: &ColoredGraph) -> bool {
        self.colors == other.colors && self.edges == other.edges
    }

    /// Identity comparison ignoring colors entirely.
    pub fn same_unlabeled_graph(&self, other: &ColoredGraph) -> bool {
        self.vertex_set() == other.vertex_set() && self.edges == other.edges
    }

    /// Brute-force isomorphism test ignoring colors, with degree pruning.
    /// Guarded to small graphs; returns an error above 16 vertices.
    pub fn isomorphic_unlabeled(&self, other: &ColoredGraph) -> Result<bool> {
        if self.vertex_count() > 16 || other.vertex_count() > 16 {
            return Err(Error::input("isomorphism search limited to 16 vertices".to_string()));
        }
        if self.vertex_count() != other.vertex_count() || self.edge_count() != other.edge_count() {
            return Ok(false);
        }
        let a: Vec<VertexId> = self.vertices().collect();
        let b: Vec<VertexId> = other.vertices().collect();
        let mut deg_a: Vec<usize> = Vec::new();
        let adj_a = self.adjacency();
        let adj_b = other.adjacency();
        for v in &a {
            deg_a.push(adj_a[v].len());
        }
        let deg_b: Vec<usize> = b.iter().map(|v| adj_b[v].len()).collect();
        {
            let mut da = deg_a.clone();
            let mut db = deg_b.clone();
            da.sort_unstable();
            db.sort_unstable();
            if da != db {
                return Ok(false);
            }
        }

        fn extend(
            idx: usize,
            a: &[VertexId],
            b: &[VertexId],
            deg_a: &[usize],
            deg_b: &[usize],
            g1: &ColoredGraph,
            g2: &ColoredGraph,
            assigned: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            if idx == a.len() {
                return true;
            }
            for j in 0..b.len() {
                if used[j] || deg_a[idx] != deg_b[j] {
                    continue;
                }
                let ok = (0..idx).all(|p| {
                    g1.has_edge(a[p], a[idx]) == g2.has_edge(b[assigned[p]], b[j])
                });
                if ok {
                    assigned.push(j);
                    used[j] = true;
                    if extend(idx + 1, a, b, deg_a, deg_b, g1, g2, assigned, used) {
                        return true;
                    }
                    used[j] = false;
                    assigned.pop();
                }
            }
            false
        }

        let mut assigned = Vec::new();
        let mut used = vec![false; b.len()];
        Ok(extend(0, &a, &b, &deg_a, &deg_b, self, other, &mut assigned, &mut used))
    }

    /// Serializes to the line-based text format:
    /// `graph k=<k>`, then `v <id> <color>` lines sorted by id, then
    /// `e <id1> <id2>` lines with id1 < id2, sorted.
    pub fn to_text(&self) -> String {
        let mut out = format!("graph k={}\n", self.k);
        for (v, c) in &self.colors {
            out.push_str(&format!("v {} {}\n", v, c));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("e {} {}\n", a, b));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<ColoredGraph> {
        let mut graph: Option<ColoredGraph> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let n = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "graph" => {
                    if graph.is_some() {
                        return Err(Error::parse(n, "duplicate graph header"));
                    }
                    let k = fields
                        .get(1)
                        .and_then(|f| f.strip_prefix("k="))
                        .and_then(|s| s.parse::<u32>().ok())
                        .ok_or_else(|| Error::parse(n, "expected `graph k=<k>`"))?;
                    graph = Some(ColoredGraph::empty(k));
                }
                "v" => {
                    let g = graph.as_mut().ok_or_else(|| Error::parse(n, "missing graph header"))?;
                    if fields.len() != 3 {
                        return Err(Error::parse(n, "expected `v <id> <color>`"));
                    }
                    let id: u32 =
                        fields[1].parse().map_err(|_| Error::parse(n, "bad vertex id"))?;
                    let color: u32 =
                        fields[2].parse().map_err(|_| Error::parse(n, "bad color"))?;
                    g.add_vertex(VertexId(id), color)
                        .map_err(|e| Error::parse(n, e.to_string()))?;
                }
                "e" => {
                    let g = graph.as_mut().ok_or_else(|| Error::parse(n, "missing graph header"))?;
                    if fields.len() != 3 {
                        return Err(Error::parse(n, "expected `e <id> <id>`"));
                    }
                    let a: u32 = fields[1].parse().map_err(|_| Error::parse(n, "bad vertex id"))?;
                    let b: u32 = fields[2].parse().map_err(|_| Error::parse(n, "bad vertex id"))?;
                    g.add_edge(VertexId(a), VertexId(b))
                        .map_err(|e| Error::parse(n, e.to_string()))?;
                }
                other => return Err(Error::parse(n, format!("unknown line kind `{other}`"))),
            }
        }
        graph.ok_or_else(|| Error::parse(0, "empty graph file"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vset(ids: &[u32]) -> BTreeSet<VertexId> {
        ids.iter().map(|&i| VertexId(i)).collect()
    }

    fn two_isolated() -> ColoredGraph {
        let mut g = ColoredGraph::empty(2);
        g.add_vertex(VertexId(1), 1).unwrap();
        g.add_vertex(VertexId(2), 2).unwrap();
        g
    }

    fn path_abc() -> ColoredGraph {
        let mut g = ColoredGraph::empty(1);
        for i in 1..=3 {
            g.add_vertex(VertexId(i), 1).unwrap();
        }
        g.add_edge(VertexId(1), VertexId(2)).unwrap();
        g.add_edge(VertexId(2), VertexId(3)).unwrap();
        g
    }

    #[test]
    fn flip_empty_set_is_identity() {
        let g = path_abc();
        assert_eq!(g.flip(&BTreeSet::new(), &vset(&[1, 2, 3])).unwrap(), g);
    }

    #[test]
    fn flip_single_pair_adds_edge() {
        let g = two_isolated();
        let f = g.flip(&vset(&[1]), &vset(&[2])).unwrap();
        assert!(f.has_edge(VertexId(1), VertexId(2)));
        assert_eq!(f.edge_count(), 1);
    }

    #[test]
    fn flip_is_involution() {
        let g = path_abc();
        let x = vset(&[1, 2]);
        let y = vset(&[2, 3]);
        let f = g.flip(&x, &y).unwrap().flip(&x, &y).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn flip_overlapping_sets_toggle_once() {
        // both endpoints in X ∩ Y: the pair {1,2} must toggle exactly once
        let g = two_isolated();
        let s = vset(&[1, 2]);
        let f = g.flip(&s, &s).unwrap();
        assert!(f.has_edge(VertexId(1), VertexId(2)));
    }

    #[test]
    fn flip_unknown_vertex_is_input_error() {
        let g = two_isolated();
        assert!(g.flip(&vset(&[7]), &vset(&[1])).is_err());
    }

    #[test]
    fn components_empty_and_edgeless() {
        let g = ColoredGraph::empty(1);
        assert!(g.connected_components().is_empty());
        let g = two_isolated();
        assert_eq!(g.connected_components().len(), 2);
    }

    #[test]
    fn components_path() {
        let g = path_abc();
        let comps = g.connected_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0], vset(&[1, 2, 3]));
    }

    #[test]
    fn partition_rank_edgeless_two_sides() {
        let g = two_isolated();
        assert_eq!(g.partition_rank(&vset(&[1])), 2);
    }

    #[test]
    fn partition_rank_complete_bipartite() {
        // K_{2,3} cut along its sides: every same-side neighborhood identical
        let mut g = ColoredGraph::empty(1);
        for i in 1..=5 {
            g.add_vertex(VertexId(i), 1).unwrap();
        }
        for a in 1..=2 {
            for b in 3..=5 {
                g.add_edge(VertexId(a), VertexId(b)).unwrap();
            }
        }
        assert_eq!(g.partition_rank(&vset(&[1, 2])), 2);
    }

    #[test]
    fn partition_rank_path_middle_cut() {
        let g = path_abc();
        // classes {2} and {1,3}: both endpoints see exactly {2}
        assert_eq!(g.partition_rank(&vset(&[2])), 2);
    }

    #[test]
    fn text_round_trip() {
        let g = path_abc();
        let parsed = ColoredGraph::from_text(&g.to_text()).unwrap();
        assert_eq!(parsed, g);
    }

    #[test]
    fn text_comments_and_blanks_ignored() {
        let text = "# a comment\n\ngraph k=1\nv 1 1\n";
        let g = ColoredGraph::from_text(text).unwrap();
        assert_eq!(g.vertex_count(), 1);
    }

    #[test]
    fn isomorphism_detects_relabeling() {
        let g = path_abc();
        let mut h = ColoredGraph::empty(1);
        for i in [10, 20, 30] {
            h.add_vertex(VertexId(i), 1).unwrap();
        }
        h.add_edge(VertexId(10), VertexId(30)).unwrap();
        h.add_edge(VertexId(30), VertexId(20)).unwrap();
        assert!(g.isomorphic_unlabeled(&h).unwrap());
        let mut tri = h.clone();
        tri.add_edge(VertexId(10), VertexId(20)).unwrap();
        assert!(!g.isomorphic_unlabeled(&tri).unwrap());
    }

    fn arb_graph(max_n: u32) -> impl Strategy<Value = ColoredGraph> {
        (1..=max_n, any::<u64>()).prop_map(move |(n, bits)| {
            let mut g = ColoredGraph::empty(2);
            for i in 1..=n {
                g.add_vertex(VertexId(i), 1 + (bits >> i & 1) as u32).unwrap();
            }
            let mut b = bits;
            for i in 1..=n {
                for j in (i + 1)..=n {
                    if b & 1 == 1 {
                        g.add_edge(VertexId(i), VertexId(j)).unwrap();
                    }
                    b = b.rotate_right(1);
                }
            }
            g
        })
    }

    proptest! {
        #[test]
        fn components_agree_with_transitive_closure(g in arb_graph(8)) {
            // oracle: reflexive-transitive closure of the adjacency matrix
            let vs: Vec<VertexId> = g.vertices().collect();
            let n = vs.len();
            let mut reach = vec![vec![false; n]; n];
            for i in 0..n {
                reach[i][i] = true;
                for j in 0..n {
                    if g.has_edge(vs[i], vs[j]) {
                        reach[i][j] = true;
                    }
                }
            }
            for m in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if reach[i][m] && reach[m][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
            let comps = g.connected_components();
            for i in 0..n {
                for j in 0..n {
                    let same = comps.iter().any(|c| c.contains(&vs[i]) && c.contains(&vs[j]));
                    prop_assert_eq!(same, reach[i][j]);
                }
            }
        }

        #[test]
        fn partition_rank_is_side_symmetric(g in arb_graph(7), mask in any::<u64>()) {
            let v0: BTreeSet<VertexId> = g.vertices().filter(|v| mask >> v.0 & 1 == 1).collect();
            let v1: BTreeSet<VertexId> = g.vertices().filter(|v| !v0.contains(v)).collect();
            prop_assert_eq!(g.partition_rank(&v0), g.partition_rank(&v1));
            if g.vertex_count() > 0 {
                let r = g.partition_rank(&v0);
                prop_assert!(r >= 1 && r <= g.vertex_count());
            }
        }

        #[test]
        fn disjoint_flips_commute(g in arb_graph(8)) {
            let vs: Vec<VertexId> = g.vertices().collect();
            if vs.len() >= 4 {
                let (x, y): (BTreeSet<_>, BTreeSet<_>) =
                    (vset(&[vs[0].0]), vset(&[vs[1].0]));
                let (z, w): (BTreeSet<_>, BTreeSet<_>) =
                    (vset(&[vs[2].0]), vset(&[vs[3].0]));
                let a = g.flip(&x, &y).unwrap().flip(&z, &w).unwrap();
                let b = g.flip(&z, &w).unwrap().flip(&x, &y).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }
}
