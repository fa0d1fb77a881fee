//! The semigroup of graph-building derivations.
//!
//! A derivation is a colored graph together with a profile for each vertex
//! (the colors of earlier vertices it would attach to) and a recoloring that
//! is applied to everything built before it. Composition glues two
//! derivations: the left graph is recolored by the right recoloring, cross
//! edges follow the right side's profiles, and profiles of the right side are
//! pulled back through the left recoloring.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Color, ColorSet, ColoredGraph, Recoloring, VertexId};
use crate::word::{Instruction, LinearWord};

/// A (color, profile) pair indexing one cell of a derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub color: Color,
    pub profile: ColorSet,
}

impl Cell {
    pub fn new(color: Color, profile: ColorSet) -> Self {
        Cell { color, profile }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.color, self.profile.to_text())
    }
}

/// All cells for a given width: every color paired with every profile subset.
pub fn all_cells(k: u32) -> Vec<Cell> {
    let mut out = Vec::new();
    for color in 1..=k {
        for bits in 0..(1u64 << k) {
            out.push(Cell::new(color, ColorSet(bits)));
        }
    }
    out.sort();
    out
}

/// Unordered pair of cells, possibly equal (a singleton).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellPair {
    pub lo: Cell,
    pub hi: Cell,
}

impl CellPair {
    pub fn new(a: Cell, b: Cell) -> Self {
        if a <= b {
            CellPair { lo: a, hi: b }
        } else {
            CellPair { lo: b, hi: a }
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, c: &Cell) -> bool {
        self.lo == *c || self.hi == *c
    }
}

impl fmt::Display for CellPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() {
            write!(f, "{{{}}}", self.lo)
        } else {
            write!(f, "{{{},{}}}", self.lo, self.hi)
        }
    }
}

/// A set of cell pairs selecting which cell adjacencies to complement.
pub type ZSet = BTreeSet<CellPair>;

pub fn zset_to_text(z: &ZSet) -> String {
    if z.is_empty() {
        "-".to_string()
    } else {
        z.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    graph: ColoredGraph,
    profiles: BTreeMap<VertexId, ColorSet>,
    phi: Recoloring,
}

impl Derivation {
    pub fn new(
        graph: ColoredGraph,
        profiles: BTreeMap<VertexId, ColorSet>,
        phi: Recoloring,
    ) -> Result<Self> {
        let k = graph.k();
        if phi.k() != k || !phi.is_valid() {
            return Err(Error::input("recoloring does not map [k] to [k]".to_string()));
        }
        for v in graph.vertices() {
            match profiles.get(&v) {
                None => return Err(Error::input(format!("vertex {v} has no profile"))),
                Some(p) if !p.is_subset_of_range(k) => {
                    return Err(Error::input(format!("profile of {v} not a subset of [1,{k}]")))
                }
                _ => {}
            }
        }
        if profiles.len() != graph.vertex_count() {
            return Err(Error::input("profiles mention unknown vertices".to_string()));
        }
        Ok(Derivation { graph, profiles, phi })
    }

    /// Zero-vertex derivation carrying only a recoloring.
    pub fn atomic_recolor(phi: Recoloring) -> Self {
        let k = phi.k();
        Derivation { graph: ColoredGraph::empty(k), profiles: BTreeMap::new(), phi }
    }

    /// One-vertex derivation with an explicit color, profile and id.
    pub fn atomic_vertex(
        k: u32,
        color: Color,
        profile: ColorSet,
        phi: Recoloring,
        id: VertexId,
    ) -> Result<Self> {
        let mut g = ColoredGraph::empty(k);
        g.add_vertex(id, color)?;
        Derivation::new(g, [(id, profile)].into_iter().collect(), phi)
    }

    pub fn k(&self) -> u32 {
        self.graph.k()
    }

    pub fn graph(&self) -> &ColoredGraph {
        &self.graph
    }

    pub fn phi(&self) -> &Recoloring {
        &self.phi
    }

    pub fn profile(&self, v: VertexId) -> ColorSet {
        self.profiles[&v]
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn cell_of(&self, v: VertexId) -> Cell {
        Cell::new(self.graph.color(v), self.profiles[&v])
    }

    /// The nonempty cells with their vertex sets; together they partition the
    /// vertex set.
    pub fn cells(&self) -> BTreeMap<Cell, BTreeSet<VertexId>> {
        let mut out: BTreeMap<Cell, BTreeSet<VertexId>> = BTreeMap::new();
        for v in self.graph.vertices() {
            out.entry(self.cell_of(v)).or_default().insert(v);
        }
        out
    }

    pub fn cell_vertices(&self, c: &Cell) -> BTreeSet<VertexId> {
        self.graph
            .vertices()
            .filter(|&v| self.cell_of(v) == *c)
            .collect()
    }

    pub fn compose(left: &Derivation, right: &Derivation) -> Result<Derivation> {
        if left.k() != right.k() {
            return Err(Error::input(format!(
                "cannot compose widths {} and {}",
                left.k(),
                right.k()
            )));
        }
        let k = left.k();
        let mut graph = ColoredGraph::empty(k);
        for v in left.graph.vertices() {
            let c = right.phi.apply(left.graph.color(v));
            graph.add_vertex(v, c)?;
        }
        for v in right.graph.vertices() {
            graph.add_vertex(v, right.graph.color(v)).map_err(|_| {
                Error::input(format!("vertex id {v} appears on both sides of a composition"))
            })?;
        }
        for (a, b) in left.graph.edges().chain(right.graph.edges()) {
            graph.add_edge(a, b)?;
        }
        for u in left.graph.vertices() {
            let cu = left.graph.color(u);
            for v in right.graph.vertices() {
                if right.profiles[&v].contains(cu) {
                    graph.add_edge(u, v)?;
                }
            }
        }
        let mut profiles = left.profiles.clone();
        for v in right.graph.vertices() {
            profiles.insert(v, left.phi.preimage(right.profiles[&v]));
        }
        let phi = Recoloring::compose(&right.phi, &left.phi);
        Ok(Derivation { graph, profiles, phi })
    }

    /// Product of the word's per-instruction atomic derivations, left to
    /// right. The underlying graph equals the word's evaluation. Empty words
    /// are rejected: the derivation semigroup has no unit.
    pub fn from_word(word: &LinearWord) -> Result<Derivation> {
        if word.is_empty() {
            return Err(Error::input("cannot build a derivation from an empty word"));
        }
        word.validate()?;
        let mut acc: Option<Derivation> = None;
        for ins in &word.instructions {
            let atom = match ins {
                Instruction::AddVertex { color, profile, id } => Derivation::atomic_vertex(
                    word.k,
                    *color,
                    *profile,
                    Recoloring::identity(word.k),
                    *id,
                )?,
                Instruction::Recolor(phi) => Derivation::atomic_recolor(phi.clone()),
            };
            acc = Some(match acc {
                None => atom,
                Some(prev) => Derivation::compose(&prev, &atom)?,
            });
        }
        Ok(acc.expect("nonempty word"))
    }

    /// Complements adjacency between the vertex sets of each selected cell
    /// pair (a singleton pair complements within the cell). Returns the
    /// resulting graph; the derivation itself is unchanged.
    pub fn zflip(&self, z: &ZSet) -> ColoredGraph {
        let cells = self.cells();
        let empty = BTreeSet::new();
        let mut g = self.graph.clone();
        for pair in z {
            let xs = cells.get(&pair.lo).unwrap_or(&empty);
            let ys = cells.get(&pair.hi).unwrap_or(&empty);
            g = g.flip(xs, ys).expect("cells are subsets of the vertex set");
        }
        g
    }

    pub fn restrict(&self, keep: &BTreeSet<VertexId>) -> Derivation {
        let graph = self.graph.induced(keep);
        let profiles = self
            .profiles
            .iter()
            .filter(|(v, _)| keep.contains(v))
            .map(|(v, p)| (*v, *p))
            .collect();
        Derivation { graph, profiles, phi: self.phi.clone() }
    }

    /// Structural copy with every vertex id shifted; all summaries are
    /// id-independent, so the copy has the same abstraction.
    pub fn with_id_offset(&self, offset: u32) -> Derivation {
        let mut graph = ColoredGraph::empty(self.k());
        for v in self.graph.vertices() {
            graph
                .add_vertex(VertexId(v.0 + offset), self.graph.color(v))
                .expect("shifted ids stay distinct");
        }
        for (a, b) in self.graph.edges() {
            graph
                .add_edge(VertexId(a.0 + offset), VertexId(b.0 + offset))
                .expect("edges survive the shift");
        }
        let profiles = self
            .profiles
            .iter()
            .map(|(v, p)| (VertexId(v.0 + offset), *p))
            .collect();
        Derivation { graph, profiles, phi: self.phi.clone() }
    }

    /// Text format: the graph block followed by `p <id> <profile>` lines and
    /// one `phi <image...>` line.
    pub fn to_text(&self) -> String {
        let mut out = self.graph.to_text();
        for (v, p) in &self.profiles {
            out.push_str(&format!("p {} {}\n", v, p.to_text()));
        }
        let images: Vec<String> = self.phi.0.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("phi {}\n", images.join(" ")));
        out
    }

    pub fn from_text(text: &str) -> Result<Derivation> {
        let mut graph_lines = String::new();
        let mut profiles: BTreeMap<VertexId, ColorSet> = BTreeMap::new();
        let mut phi: Option<Recoloring> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let n = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "graph" | "v" | "e" => {
                    graph_lines.push_str(line);
                    graph_lines.push('\n');
                }
                "p" => {
                    if fields.len() != 3 {
                        return Err(Error::parse(n, "expected `p <id> <profile|->`"));
                    }
                    let id: u32 = fields[1].parse().map_err(|_| Error::parse(n, "bad id"))?;
                    let profile =
                        ColorSet::parse_text(fields[2]).map_err(|msg| Error::parse(n, msg))?;
                    profiles.insert(VertexId(id), profile);
                }
                "phi" => {
                    let images: Vec<u32> = fields[1..]
                        .iter()
                        .map(|f| f.parse::<u32>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::parse(n, "bad recolor image"))?;
                    phi = Some(Recoloring(images));
                }
                other => return Err(Error::parse(n, format!("unknown line kind `{other}`"))),
            }
        }
        let graph = ColoredGraph::from_text(&graph_lines)?;
        let phi = phi.ok_or_else(|| Error::parse(0, "missing phi line"))?;
        Derivation::new(graph, profiles, phi)
    }
}

/// A sequence of derivations remembered together with their composition and
/// per-vertex block bookkeeping: which factor introduced each vertex, the
/// union of each cell across factors, and block indices reduced mod 7.
#[derive(Debug, Clone)]
pub struct BlockProduct {
    factors: Vec<Derivation>,
    composed: Derivation,
    block_of: BTreeMap<VertexId, usize>,
    cell_union: BTreeMap<Cell, BTreeSet<VertexId>>,
}

pub const MODULUS: usize = 7;

impl BlockProduct {
    pub fn new(factors: Vec<Derivation>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::input("block product needs at least one factor"));
        }
        let k = factors[0].k();
        if factors.iter().any(|f| f.k() != k) {
            return Err(Error::input("block product factors must share k"));
        }
        let mut composed = factors[0].clone();
        for f in &factors[1..] {
            composed = Derivation::compose(&composed, f)?;
        }
        let mut block_of = BTreeMap::new();
        let mut cell_union: BTreeMap<Cell, BTreeSet<VertexId>> = BTreeMap::new();
        for (i, f) in factors.iter().enumerate() {
            for v in f.graph().vertices() {
                block_of.insert(v, i + 1);
            }
            for (cell, vs) in f.cells() {
                cell_union.entry(cell).or_default().extend(vs);
            }
        }
        Ok(BlockProduct { factors, composed, block_of, cell_union })
    }

    /// Reassembles the bookkeeping around a replacement composed derivation
    /// over the same vertex set. Only the corruption hook of the order lab
    /// uses this; the block structure is taken from the factors as usual.
    pub(crate) fn with_composed(factors: Vec<Derivation>, composed: Derivation) -> BlockProduct {
        let mut block_of = BTreeMap::new();
        let mut cell_union: BTreeMap<Cell, BTreeSet<VertexId>> = BTreeMap::new();
        for (i, f) in factors.iter().enumerate() {
            for v in f.graph().vertices() {
                block_of.insert(v, i + 1);
            }
            for (cell, vs) in f.cells() {
                cell_union.entry(cell).or_default().extend(vs);
            }
        }
        BlockProduct { factors, composed, block_of, cell_union }
    }

    pub fn factors(&self) -> &[Derivation] {
        &self.factors
    }

    pub fn composed(&self) -> &Derivation {
        &self.composed
    }

    pub fn n_blocks(&self) -> usize {
        self.factors.len()
    }

    /// 1-based index of the factor that introduced `v`.
    pub fn block_of(&self, v: VertexId) -> usize {
        self.block_of[&v]
    }

    pub fn modulus_of(&self, v: VertexId) -> usize {
        self.block_of(v) % MODULUS
    }

    /// `U_c`: the union over factors of the cell's vertices. May differ from
    /// the composed derivation's own cell.
    pub fn cell_union(&self, c: &Cell) -> BTreeSet<VertexId> {
        self.cell_union.get(c).cloned().unwrap_or_default()
    }

    pub fn nonempty_union_cells(&self) -> Vec<Cell> {
        self.cell_union.keys().copied().collect()
    }

    pub fn block_vertices(&self, i: usize) -> BTreeSet<VertexId> {
        self.factors[i - 1].graph().vertex_set()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::gen::{gen_word, GenSpec};

    pub(crate) fn id_phi(k: u32) -> Recoloring {
        Recoloring::identity(k)
    }

    #[test]
    fn compose_with_recolor_only_identity_is_neutral() {
        let w = crate::word::example_word();
        let sigma = Derivation::from_word(&w).unwrap();
        let eps = Derivation::atomic_recolor(id_phi(3));
        assert_eq!(Derivation::compose(&sigma, &eps).unwrap(), sigma);
        assert_eq!(Derivation::compose(&eps, &sigma).unwrap(), sigma);
    }

    #[test]
    fn compose_adds_edge_by_profile() {
        let u = Derivation::atomic_vertex(2, 1, ColorSet::EMPTY, id_phi(2), VertexId(1)).unwrap();
        let v =
            Derivation::atomic_vertex(2, 2, ColorSet::singleton(1), id_phi(2), VertexId(2))
                .unwrap();
        let c = Derivation::compose(&u, &v).unwrap();
        assert!(c.graph().has_edge(VertexId(1), VertexId(2)));
    }

    #[test]
    fn compose_pulls_profiles_through_preimage() {
        let k = 3;
        // left recoloring collapses everything to color 1
        let phi1 = Recoloring(vec![1, 1, 1]);
        let left = Derivation::atomic_vertex(k, 2, ColorSet::EMPTY, phi1, VertexId(1)).unwrap();
        let right =
            Derivation::atomic_vertex(k, 1, ColorSet::singleton(1), id_phi(k), VertexId(2))
                .unwrap();
        let c = Derivation::compose(&left, &right).unwrap();
        let full: ColorSet = (1..=k).collect();
        assert_eq!(c.profile(VertexId(2)), full);
    }

    #[test]
    fn vertex_collision_is_input_error() {
        let a = Derivation::atomic_vertex(1, 1, ColorSet::EMPTY, id_phi(1), VertexId(1)).unwrap();
        assert!(Derivation::compose(&a, &a).is_err());
    }

    #[test]
    fn from_word_empty_is_error() {
        let w = LinearWord::new(2, vec![]).unwrap();
        assert!(Derivation::from_word(&w).is_err());
    }

    #[test]
    fn from_word_matches_eval() {
        let w = crate::word::example_word();
        let sigma = Derivation::from_word(&w).unwrap();
        assert_eq!(sigma.graph(), &w.eval());
    }

    #[test]
    fn from_word_splits_associatively() {
        let mut rng_seed = 0u64;
        for _ in 0..100 {
            rng_seed += 1;
            let w = gen_word(&GenSpec { k: 3, length: 8, seed: rng_seed, ..GenSpec::default() });
            for split in 1..w.len() {
                let left = LinearWord::new(w.k, w.instructions[..split].to_vec()).unwrap();
                let right = LinearWord::new(w.k, w.instructions[split..].to_vec()).unwrap();
                let whole = Derivation::from_word(&w).unwrap();
                let parts = Derivation::compose(
                    &Derivation::from_word(&left).unwrap(),
                    &Derivation::from_word(&right).unwrap(),
                )
                .unwrap();
                assert_eq!(whole, parts);
            }
        }
    }

    #[test]
    fn cells_partition_vertices() {
        let w = crate::word::example_word();
        let sigma = Derivation::from_word(&w).unwrap();
        let cells = sigma.cells();
        let total: usize = cells.values().map(|s| s.len()).sum();
        assert_eq!(total, sigma.vertex_count());
    }

    #[test]
    fn zflip_empty_is_identity_and_double_flip_restores() {
        let w = crate::word::example_word();
        let sigma = Derivation::from_word(&w).unwrap();
        assert_eq!(&sigma.zflip(&ZSet::new()), sigma.graph());
        let cells: Vec<Cell> = sigma.cells().keys().copied().collect();
        let z: ZSet = [CellPair::new(cells[0], cells[1])].into_iter().collect();
        let once = sigma.zflip(&z);
        let cellmap = sigma.cells();
        let twice = once.flip(&cellmap[&cells[0]], &cellmap[&cells[1]]).unwrap();
        assert_eq!(&twice, sigma.graph());
    }

    #[test]
    fn zflip_singleton_cell() {
        // one vertex alone: nothing to toggle
        let a = Derivation::atomic_vertex(1, 1, ColorSet::singleton(1), id_phi(1), VertexId(1))
            .unwrap();
        let c = a.cell_of(VertexId(1));
        let z: ZSet = [CellPair::new(c, c)].into_iter().collect();
        assert_eq!(&a.zflip(&z), a.graph());
        // two adjacent same-cell vertices: the edge toggles off
        let b = Derivation::atomic_vertex(1, 1, ColorSet::singleton(1), id_phi(1), VertexId(2))
            .unwrap();
        let two = Derivation::compose(&a, &b).unwrap();
        assert!(two.graph().has_edge(VertexId(1), VertexId(2)));
        let flipped = two.zflip(&z);
        assert!(!flipped.has_edge(VertexId(1), VertexId(2)));
    }

    #[test]
    fn restrict_keep_all_and_none() {
        let w = crate::word::example_word();
        let sigma = Derivation::from_word(&w).unwrap();
        assert_eq!(sigma.restrict(&sigma.graph().vertex_set()), sigma);
        let none = sigma.restrict(&BTreeSet::new());
        assert_eq!(none.vertex_count(), 0);
        assert_eq!(none.phi(), sigma.phi());
    }

    #[test]
    fn restriction_commutes_with_composition() {
        for seed in 0..100 {
            let w1 = gen_word(&GenSpec { k: 2, length: 5, seed, ..GenSpec::default() });
            let w2 = gen_word(&GenSpec {
                k: 2,
                length: 5,
                seed: seed + 1000,
                id_offset: 100,
                ..GenSpec::default()
            });
            let s1 = Derivation::from_word(&w1).unwrap();
            let s2 = Derivation::from_word(&w2).unwrap();
            let prod = Derivation::compose(&s1, &s2).unwrap();
            let keep: BTreeSet<VertexId> =
                prod.graph().vertices().filter(|v| v.0 % 2 == seed as u32 % 2).collect();
            let lhs = prod.restrict(&keep);
            let k1: BTreeSet<VertexId> =
                keep.iter().filter(|v| s1.graph().contains_vertex(**v)).copied().collect();
            let k2: BTreeSet<VertexId> =
                keep.iter().filter(|v| s2.graph().contains_vertex(**v)).copied().collect();
            let rhs = Derivation::compose(&s1.restrict(&k1), &s2.restrict(&k2)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn block_product_bookkeeping() {
        let w = crate::word::example_word();
        let sigma = Derivation::from_word(&w).unwrap();
        let single = BlockProduct::new(vec![sigma.clone()]).unwrap();
        assert!(single.composed().graph().vertices().all(|v| single.block_of(v) == 1));

        // rename ids for the second factor to avoid collisions
        let mut w2 = w.clone();
        for ins in &mut w2.instructions {
            if let Instruction::AddVertex { id, .. } = ins {
                *id = VertexId(id.0 + 100);
            }
        }
        let sigma2 = Derivation::from_word(&w2).unwrap();
        let bp = BlockProduct::new(vec![sigma.clone(), sigma2.clone()]).unwrap();
        assert_eq!(bp.block_of(VertexId(1)), 1);
        assert_eq!(bp.block_of(VertexId(101)), 2);
        assert_eq!(bp.modulus_of(VertexId(101)), 2);

        // union cells recomputed from scratch
        for cell in bp.nonempty_union_cells() {
            let direct: BTreeSet<VertexId> = sigma
                .cell_vertices(&cell)
                .into_iter()
                .chain(sigma2.cell_vertices(&cell))
                .collect();
            assert_eq!(bp.cell_union(&cell), direct);
        }
    }

    #[test]
    fn text_round_trip() {
        let w = crate::word::example_word();
        let sigma = Derivation::from_word(&w).unwrap();
        let parsed = Derivation::from_text(&sigma.to_text()).unwrap();
        assert_eq!(parsed, sigma);
    }
}
