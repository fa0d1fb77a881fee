//! Finite summaries of derivations and the homomorphism used to factorize
//! instruction words.
//!
//! The full summary keeps the nonempty cells, the recoloring, and a
//! connectivity registry: for each flip selection `Z` in a configurable
//! family, every triple `(c, d, W)` such that the `Z`-flipped graph contains
//! a path from cell `c` to cell `d` whose internal vertices stay inside the
//! cells of `W`. Enumerating the registry over every conceivable `Z` is
//! hopeless (the `Z` space is doubly exponential), so a family is always
//! declared explicitly; the flip-assembly pipeline only ever consults the
//! positive-pair selection of its own derivation.
//!
//! The reduced summary `(L, φ)` drops the registry. It composes by a closed
//! formula, which makes it the homomorphism of choice for factorization
//! forests: composing summaries never needs registries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::hash::Hasher;

use crate::derivation::{Cell, CellPair, Derivation, ZSet};
use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Recoloring, VertexId};

/// Upper bound on `|L|` for registry enumeration: the candidate `W` space is
/// `2^|L|`, so larger summaries are rejected rather than silently stalling.
const MAX_REGISTRY_CELLS: usize = 16;

/// One registry entry: in the `z`-flip there is a path from a vertex of cell
/// `from` to a vertex of cell `to` whose internal vertices lie in `∪ support`.
/// Supports are stored canonically as subsets of the essential cells; a
/// one-vertex path contributes `(z, c, c, ∅)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegistryEntry {
    pub z: ZSet,
    pub from: Cell,
    pub to: Cell,
    pub support: BTreeSet<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abstraction {
    pub essential: BTreeSet<Cell>,
    pub registry: BTreeSet<RegistryEntry>,
    pub phi: Recoloring,
    pub zfamily: BTreeSet<ZSet>,
}

/// The registry-free projection `(L, φ)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedAbstraction {
    pub essential: BTreeSet<Cell>,
    pub phi: Recoloring,
}

/// Bitset reachability: computes, for every candidate support `W ⊆ L`, which
/// ordered cell pairs are path-connected in `graph` with internal vertices
/// confined to `∪W`.
fn registry_for_flip(
    graph: &ColoredGraph,
    cells: &BTreeMap<Cell, BTreeSet<VertexId>>,
    z: &ZSet,
) -> BTreeSet<RegistryEntry> {
    let vs: Vec<VertexId> = graph.vertices().collect();
    let n = vs.len();
    let words = n.div_ceil(64).max(1);
    let index: BTreeMap<VertexId, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut adj = vec![vec![0u64; words]; n];
    for (a, b) in graph.edges() {
        let (i, j) = (index[&a], index[&b]);
        adj[i][j / 64] |= 1 << (j % 64);
        adj[j][i / 64] |= 1 << (i % 64);
    }

    let cell_list: Vec<&Cell> = cells.keys().collect();
    let cell_masks: Vec<Vec<u64>> = cell_list
        .iter()
        .map(|c| {
            let mut m = vec![0u64; words];
            for v in &cells[*c] {
                let i = index[v];
                m[i / 64] |= 1 << (i % 64);
            }
            m
        })
        .collect();

    let neighbors_of = |set: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; words];
        for i in 0..n {
            if set[i / 64] >> (i % 64) & 1 == 1 {
                for w in 0..words {
                    out[w] |= adj[i][w];
                }
            }
        }
        out
    };

    let mut out = BTreeSet::new();
    let m = cell_list.len();
    for wbits in 0u64..(1u64 << m) {
        let support: BTreeSet<Cell> = (0..m)
            .filter(|i| wbits >> i & 1 == 1)
            .map(|i| *cell_list[i])
            .collect();
        let mut interior = vec![0u64; words];
        for i in 0..m {
            if wbits >> i & 1 == 1 {
                for w in 0..words {
                    interior[w] |= cell_masks[i][w];
                }
            }
        }
        for (ci, from) in cell_list.iter().enumerate() {
            // grow the set of interior vertices reachable from `from` while
            // staying inside the support, then look one step outward
            let start_nb = neighbors_of(&cell_masks[ci]);
            let mut inside: Vec<u64> = (0..words).map(|w| start_nb[w] & interior[w]).collect();
            loop {
                let nb = neighbors_of(&inside);
                let mut changed = false;
                for w in 0..words {
                    let add = nb[w] & interior[w] & !inside[w];
                    if add != 0 {
                        inside[w] |= add;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            let inside_nb = neighbors_of(&inside);
            // every vertex reachable as a path endpoint: one hop from the
            // start cell, or one hop out of the interior set
            let endpoints: Vec<u64> = (0..words).map(|w| start_nb[w] | inside_nb[w]).collect();
            for (cj, to) in cell_list.iter().enumerate() {
                let reachable = if ci == cj {
                    // a single vertex is a path from the cell to itself
                    true
                } else {
                    (0..words).any(|w| endpoints[w] & cell_masks[cj][w] != 0)
                };
                if reachable {
                    out.insert(RegistryEntry {
                        z: z.clone(),
                        from: **from,
                        to: **to,
                        support: support.clone(),
                    });
                }
            }
        }
    }
    out
}

impl Abstraction {
    /// Computes the summary of `sigma` with registries for every `Z` in the
    /// family.
    pub fn of(sigma: &Derivation, zfamily: &BTreeSet<ZSet>) -> Result<Abstraction> {
        if zfamily.is_empty() {
            return Err(Error::input("abstraction requires a nonempty Z family"));
        }
        let cells = sigma.cells();
        if cells.len() > MAX_REGISTRY_CELLS {
            return Err(Error::input(format!(
                "registry enumeration over {} essential cells exceeds the {MAX_REGISTRY_CELLS}-cell cap",
                cells.len()
            )));
        }
        let mut registry = BTreeSet::new();
        for z in zfamily {
            let flipped = sigma.zflip(z);
            registry.extend(registry_for_flip(&flipped, &cells, z));
        }
        Ok(Abstraction {
            essential: cells.keys().copied().collect(),
            registry,
            phi: sigma.phi().clone(),
            zfamily: zfamily.clone(),
        })
    }

    /// Membership query with the canonical-support convention: supports are
    /// intersected with the essential cells, since empty cells contribute no
    /// internal vertices.
    pub fn registry_contains(&self, z: &ZSet, from: Cell, to: Cell, support: &BTreeSet<Cell>) -> bool {
        let canon: BTreeSet<Cell> = support.intersection(&self.essential).copied().collect();
        self.registry.contains(&RegistryEntry { z: z.clone(), from, to, support: canon })
    }

    pub fn reduced(&self) -> ReducedAbstraction {
        ReducedAbstraction { essential: self.essential.clone(), phi: self.phi.clone() }
    }

    /// Dump format: `L:` cells, `phi:` images, `rho:` one `(Z|c|d|W)` line
    /// per entry in canonical order.
    pub fn to_text(&self) -> String {
        let mut out = String::from("L:");
        for c in &self.essential {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
        out.push_str("phi:");
        for im in &self.phi.0 {
            let _ = write!(out, " {im}");
        }
        out.push('\n');
        for e in &self.registry {
            let w = if e.support.is_empty() {
                "-".to_string()
            } else {
                e.support.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
            };
            let _ = writeln!(
                out,
                "rho: ({}|{}|{}|{})",
                crate::derivation::zset_to_text(&e.z),
                e.from,
                e.to,
                w
            );
        }
        out
    }
}

impl ReducedAbstraction {
    pub fn of(sigma: &Derivation) -> ReducedAbstraction {
        ReducedAbstraction {
            essential: sigma.cells().keys().copied().collect(),
            phi: sigma.phi().clone(),
        }
    }

    pub fn k(&self) -> u32 {
        self.phi.k()
    }

    /// Semigroup product mirroring derivation composition: left cells are
    /// recolored by the right map, right profiles are pulled back through the
    /// left map, and the recolorings compose.
    pub fn compose(left: &ReducedAbstraction, right: &ReducedAbstraction) -> ReducedAbstraction {
        debug_assert_eq!(left.k(), right.k());
        let mut essential = BTreeSet::new();
        for c in &left.essential {
            essential.insert(Cell::new(right.phi.apply(c.color), c.profile));
        }
        for c in &right.essential {
            essential.insert(Cell::new(c.color, left.phi.preimage(c.profile)));
        }
        ReducedAbstraction { essential, phi: Recoloring::compose(&right.phi, &left.phi) }
    }

    pub fn is_idempotent(&self) -> bool {
        ReducedAbstraction::compose(self, self) == *self
    }

    /// Stable 64-bit fingerprint (FNV-1a over the canonical rendering);
    /// used by forest dumps.
    pub fn stable_hash(&self) -> u64 {
        let mut repr = String::new();
        for c in &self.essential {
            let _ = write!(repr, "{c};");
        }
        let _ = write!(repr, "|{:?}", self.phi.0);
        let mut h = Fnv1a::default();
        h.write(repr.as_bytes());
        h.finish()
    }
}

/// Minimal FNV-1a, kept local so fingerprints are stable across runs.
#[derive(Default)]
struct Fnv1a(u64);

impl Hasher for Fnv1a {
    fn finish(&self) -> u64 {
        if self.0 == 0 {
            0xcbf29ce484222325
        } else {
            self.0
        }
    }

    fn write(&mut self, bytes: &[u8]) {
        let mut h = if self.0 == 0 { 0xcbf29ce484222325u64 } else { self.0 };
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        self.0 = h;
    }
}

/// Every flip selection over the cells of width `k`; only tractable for
/// `k = 1` (8 selections) and used by the exhaustive congruence check.
pub fn all_zsets(k: u32) -> BTreeSet<ZSet> {
    let cells = crate::derivation::all_cells(k);
    let mut pairs = Vec::new();
    for (i, a) in cells.iter().enumerate() {
        for b in &cells[i..] {
            pairs.push(CellPair::new(*a, *b));
        }
    }
    let mut out = BTreeSet::new();
    for bits in 0u64..(1u64 << pairs.len()) {
        let z: ZSet = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .map(|(_, p)| *p)
            .collect();
        out.insert(z);
    }
    out
}
