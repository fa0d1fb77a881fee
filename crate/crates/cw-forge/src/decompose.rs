//! The main pipeline: an instruction word becomes per-instruction atomic
//! derivations, a factorization forest over their reduced summaries, and a
//! recursive assembly of tree terms whose width depends on the forest depth
//! but not on the word length.
//!
//! Binary forest nodes join two sides after enforcing color classes on the
//! left and profile classes on the right. Idempotent nodes flip the composed
//! graph along its positive cell pairs, assemble every connected component of
//! the flipped graph block by block along a spine of alternating joins and
//! recolorings, and reconnect the components with one top join indexed by the
//! positive pairs — which is exactly the set of edges the flip removed.

use std::collections::{BTreeMap, BTreeSet};

use crate::abstraction::ReducedAbstraction;
use crate::derivation::{all_cells, BlockProduct, Cell, Derivation};
use crate::error::{Error, Result};
use crate::forest::{build_forest, ForestNode};
use crate::graph::{Color, ColoredGraph, VertexId};
use crate::orderlab::positive_pairs;
use crate::semigroup::Semigroup;
use crate::term::{CliqueTerm, ColorMap, JoinPair};
use crate::word::{Instruction, LinearWord};

#[derive(Debug, Clone, Default)]
pub struct IdempotentNodeStats {
    pub total: usize,
    /// Children whose registries over the operative flip selection were
    /// compared and found equal.
    pub registry_checked_equal: usize,
    /// Compared and found different: assembly is still sound, only the
    /// width-bound pedigree weakens.
    pub registry_divergent: usize,
    /// Too large to compare cheaply.
    pub registry_unchecked: usize,
}

#[derive(Debug, Clone)]
pub struct DecomposeResult {
    pub term: CliqueTerm,
    pub width: usize,
    pub forest_depth: usize,
    pub forest_bound: usize,
    /// Maximum term width produced at each forest level, root first.
    pub per_level_widths: Vec<usize>,
    pub idempotent_nodes: IdempotentNodeStats,
}

struct ReducedSg;

impl Semigroup<ReducedAbstraction> for ReducedSg {
    fn mul(&self, a: &ReducedAbstraction, b: &ReducedAbstraction) -> ReducedAbstraction {
        ReducedAbstraction::compose(a, b)
    }
}

/// Removes label entries that no vertex below can realize: join pairs whose
/// colors nothing carries and recolor entries with unrealized keys. Labels
/// written by repeated class enforcement otherwise grow multiplicatively
/// with nesting depth. Realized color values are preserved exactly, so the
/// pruned term can still feed label constructions that reference them.
fn prune(term: CliqueTerm) -> CliqueTerm {
    fn rec(term: CliqueTerm) -> (CliqueTerm, BTreeSet<Color>) {
        match term {
            CliqueTerm::Empty => (CliqueTerm::Empty, BTreeSet::new()),
            CliqueTerm::Constant { color, id } => {
                let realized = [color].into_iter().collect();
                (CliqueTerm::Constant { color, id }, realized)
            }
            CliqueTerm::Recolor { map, child } => {
                let (child, realized) = rec(*child);
                let map: ColorMap =
                    map.into_iter().filter(|(from, _)| realized.contains(from)).collect();
                let out: BTreeSet<Color> = realized
                    .iter()
                    .map(|c| map.get(c).copied().unwrap_or(*c))
                    .collect();
                (CliqueTerm::recolor(map, child), out)
            }
            CliqueTerm::Join { pairs, children } => {
                let mut kids = Vec::with_capacity(children.len());
                let mut union: BTreeSet<Color> = BTreeSet::new();
                for c in children {
                    let (kid, r) = rec(c);
                    union.extend(&r);
                    kids.push(kid);
                }
                let pairs = pairs
                    .into_iter()
                    .filter(|p| union.contains(&p.lo) && union.contains(&p.hi))
                    .collect();
                (CliqueTerm::Join { pairs, children: kids }, union)
            }
        }
    }
    rec(term).0
}

/// Prune plus color compaction; only sound on finished assembly outputs,
/// whose color values no later label construction relies on.
fn tidy(term: CliqueTerm) -> CliqueTerm {
    prune(term).normalize_colors()
}

fn check_matches(term: &CliqueTerm, graph: &ColoredGraph, side: &str) -> Result<()> {
    let eval = term.eval()?;
    if !eval.same_unlabeled_graph(graph) {
        return Err(Error::input(format!(
            "{side} term does not evaluate to the {side} derivation's graph"
        )));
    }
    Ok(())
}

/// Joins two assembled sides: the left gets its color partition enforced,
/// the right its profile partition, one join wires the cross edges the
/// composition adds, and a recoloring settles the final colors.
pub fn assemble_binary(
    left: &Derivation,
    right: &Derivation,
    left_term: CliqueTerm,
    right_term: CliqueTerm,
) -> Result<CliqueTerm> {
    check_matches(&left_term, left.graph(), "left")?;
    check_matches(&right_term, right.graph(), "right")?;
    if right.graph().is_empty() {
        return Ok(left_term);
    }
    if left.graph().is_empty() {
        return Ok(right_term);
    }

    // classes 1..p over the colors present on the left
    let left_colors: Vec<Color> = {
        let cs: BTreeSet<Color> =
            left.graph().vertices().map(|v| left.graph().color(v)).collect();
        cs.into_iter().collect()
    };
    let color_class: BTreeMap<Color, u32> = left_colors
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i as u32 + 1))
        .collect();
    let p_color = left_colors.len() as u32;
    let left_parts: BTreeMap<VertexId, u32> = left
        .graph()
        .vertices()
        .map(|v| (v, color_class[&left.graph().color(v)]))
        .collect();
    let enforced_left = prune(left_term.enforce_colors(&left_parts, p_color)?);

    // classes 1..q over the profiles present on the right
    let right_profiles: Vec<crate::graph::ColorSet> = {
        let ps: BTreeSet<crate::graph::ColorSet> =
            right.graph().vertices().map(|v| right.profile(v)).collect();
        ps.into_iter().collect()
    };
    let profile_class: BTreeMap<crate::graph::ColorSet, u32> = right_profiles
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as u32 + 1))
        .collect();
    let p_profile = right_profiles.len() as u32;
    let right_parts: BTreeMap<VertexId, u32> = right
        .graph()
        .vertices()
        .map(|v| (v, profile_class[&right.profile(v)]))
        .collect();
    let enforced_right = prune(right_term.enforce_colors(&right_parts, p_profile)?);
    let shift: ColorMap = (1..=p_profile).map(|q| (q, q + p_color)).collect();
    let shifted_right = CliqueTerm::recolor(shift, enforced_right);

    // cross edges: left color class a meets right profile class b whenever
    // the class color belongs to the class profile
    let mut pairs: BTreeSet<JoinPair> = BTreeSet::new();
    for (&color, &a) in &color_class {
        for (&profile, &b) in &profile_class {
            if profile.contains(color) {
                pairs.insert(JoinPair::new(a, p_color + b));
            }
        }
    }
    let joined = CliqueTerm::Join {
        pairs,
        children: vec![enforced_left, shifted_right],
    };

    // settle colors: left classes recolor through the right derivation's
    // map; right profile classes take a representative member color
    let mut final_map: ColorMap = BTreeMap::new();
    for (&color, &a) in &color_class {
        let target = right.phi().apply(color);
        if a != target {
            final_map.insert(a, target);
        }
    }
    for (&profile, &b) in &profile_class {
        let repr = right
            .graph()
            .vertices()
            .filter(|v| right.profile(*v) == profile)
            .map(|v| right.graph().color(v))
            .min()
            .expect("profile class is inhabited");
        if p_color + b != repr {
            final_map.insert(p_color + b, repr);
        }
    }
    Ok(tidy(CliqueTerm::recolor(final_map, joined)))
}

/// Index of each cell in the canonical enumeration, 1-based so it can be a
/// color class directly.
fn cell_codes(k: u32) -> BTreeMap<Cell, u32> {
    all_cells(k)
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, i as u32 + 1))
        .collect()
}

/// Assembles factors with one shared idempotent reduced summary. Components
/// of the positive flip are built separately along block spines and rejoined
/// at the root by the positive pairs themselves.
pub fn assemble_idempotent(
    factors: &[Derivation],
    terms: Vec<CliqueTerm>,
    stats: &mut IdempotentNodeStats,
) -> Result<(Derivation, CliqueTerm)> {
    if factors.is_empty() || factors.len() != terms.len() {
        return Err(Error::input("factor and term counts must match and be nonzero"));
    }
    for (f, t) in factors.iter().zip(&terms) {
        check_matches(t, f.graph(), "factor")?;
    }
    let reduced = ReducedAbstraction::of(&factors[0]);
    for f in &factors[1..] {
        if ReducedAbstraction::of(f) != reduced {
            return Err(Error::input("factors must share one reduced abstraction".to_string()));
        }
    }
    if !reduced.is_idempotent() {
        return Err(Error::input("shared reduced abstraction must be idempotent".to_string()));
    }
    let product = BlockProduct::new(factors.to_vec())?;
    if factors.len() == 1 {
        return Ok((product.composed().clone(), terms.into_iter().next().unwrap()));
    }
    stats.total += 1;
    audit_registries(factors, &reduced, stats);

    let k = reduced.k();
    let codes = cell_codes(k);
    let m = codes.len() as u32;
    let phi = &reduced.phi;
    let zset = positive_pairs(&reduced.essential, phi);

    // the flipped graph and its components
    let mut h = product.composed().graph().clone();
    for pair in &zset {
        let xs = product.cell_union(&pair.lo);
        let ys = product.cell_union(&pair.hi);
        h = h.flip(&xs, &ys)?;
    }
    let components = h.connected_components();

    // spine join: accumulated side keeps bare cell codes, fresh side comes in
    // shifted by m; an edge appears when the accumulated color belongs to
    // the fresh vertex's profile
    let mut spine_pairs: BTreeSet<JoinPair> = BTreeSet::new();
    for (ca, &code_a) in &codes {
        for (cb, &code_b) in &codes {
            if cb.profile.contains(ca.color) {
                spine_pairs.insert(JoinPair::new(code_a, m + code_b));
            }
        }
    }
    // afterwards the accumulated side recolors through phi and the fresh side
    // drops its shift
    let mut spine_recolor: ColorMap = BTreeMap::new();
    for (c, &code) in &codes {
        let target = codes[&Cell::new(phi.apply(c.color), c.profile)];
        if code != target {
            spine_recolor.insert(code, target);
        }
        if m + code != code {
            spine_recolor.insert(m + code, code);
        }
    }
    let phi_recolor: ColorMap = codes
        .iter()
        .filter_map(|(c, &code)| {
            let target = codes[&Cell::new(phi.apply(c.color), c.profile)];
            (code != target).then_some((code, target))
        })
        .collect();

    let n = factors.len();
    let mut component_terms: Vec<CliqueTerm> = Vec::new();
    for comp in &components {
        let mut acc: Option<CliqueTerm> = None;
        let mut last_block = 0usize;
        for (i, factor) in factors.iter().enumerate() {
            let keep: BTreeSet<VertexId> = factor
                .graph()
                .vertices()
                .filter(|v| comp.contains(v))
                .collect();
            if keep.is_empty() {
                continue;
            }
            let restricted = prune(terms[i].restrict(&keep)?);
            let parts: BTreeMap<VertexId, u32> =
                keep.iter().map(|&v| (v, codes[&factor.cell_of(v)])).collect();
            let enforced = prune(restricted.enforce_colors(&parts, m)?);
            acc = Some(match acc {
                None => enforced,
                Some(prev) => {
                    let shift: ColorMap = (1..=m).map(|q| (q, q + m)).collect();
                    let joined = CliqueTerm::Join {
                        pairs: spine_pairs.clone(),
                        children: vec![prev, CliqueTerm::recolor(shift, enforced)],
                    };
                    prune(CliqueTerm::recolor(spine_recolor.clone(), joined))
                }
            });
            last_block = i + 1;
        }
        let mut term = match acc {
            None => continue,
            Some(t) => t,
        };
        if last_block < n {
            // later factors still recolor everything built so far
            term = CliqueTerm::recolor(phi_recolor.clone(), term);
        }
        // settle the component on composed-cell codes for the top join
        let composed = product.composed();
        let parts: BTreeMap<VertexId, u32> =
            comp.iter().map(|&v| (v, codes[&composed.cell_of(v)])).collect();
        component_terms.push(prune(term.enforce_colors(&parts, m)?));
    }

    cross_component_audit(&product, &components, &zset)?;

    let top_pairs: BTreeSet<JoinPair> = zset
        .iter()
        .map(|p| JoinPair::new(codes[&p.lo], codes[&p.hi]))
        .collect();
    let with_cross = match component_terms.len() {
        0 => CliqueTerm::Empty,
        1 => component_terms.into_iter().next().unwrap(),
        _ => CliqueTerm::Join { pairs: top_pairs, children: component_terms },
    };
    // composed-cell codes back to real colors
    let settle: ColorMap = codes
        .iter()
        .filter_map(|(c, &code)| (code != c.color).then_some((code, c.color)))
        .collect();
    let term = tidy(CliqueTerm::recolor(settle, with_cross));
    Ok((product.composed().clone(), term))
}

/// The edges between different components of the flipped graph must be
/// exactly the pairs the positive flip complemented; the top join relies on
/// it, so it is recounted here.
fn cross_component_audit(
    product: &BlockProduct,
    components: &[BTreeSet<VertexId>],
    zset: &crate::derivation::ZSet,
) -> Result<()> {
    let composed = product.composed();
    let comp_of: BTreeMap<VertexId, usize> = components
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&v| (v, i)))
        .collect();
    let mut expected: u64 = 0;
    for pair in zset {
        let xs = composed.cell_vertices(&pair.lo);
        let ys = composed.cell_vertices(&pair.hi);
        if pair.is_singleton() {
            let total = xs.len() as u64;
            let mut same: u64 = 0;
            for comp in components {
                let inside = xs.iter().filter(|v| comp.contains(v)).count() as u64;
                same += inside * inside.saturating_sub(1) / 2;
            }
            expected += total * total.saturating_sub(1) / 2 - same;
        } else {
            let mut same: u64 = 0;
            for comp in components {
                let xi = xs.iter().filter(|v| comp.contains(v)).count() as u64;
                let yi = ys.iter().filter(|v| comp.contains(v)).count() as u64;
                same += xi * yi;
            }
            expected += xs.len() as u64 * ys.len() as u64 - same;
        }
    }
    let mut actual: u64 = 0;
    for (u, v) in composed.graph().edges() {
        if comp_of[&u] != comp_of[&v] {
            let pair =
                crate::derivation::CellPair::new(composed.cell_of(u), composed.cell_of(v));
            if !zset.contains(&pair) {
                return Err(Error::internal(format!(
                    "cross-component edge {u}-{v} is not a positive pair"
                )));
            }
            actual += 1;
        }
    }
    if actual != expected {
        return Err(Error::internal(format!(
            "cross-component edge count {actual} differs from the flip complement {expected}"
        )));
    }
    Ok(())
}

/// Compares the children's registries over the operative flip selection when
/// the instance is small enough; assembly correctness does not depend on the
/// outcome, only the width-bound pedigree does.
fn audit_registries(
    factors: &[Derivation],
    reduced: &ReducedAbstraction,
    stats: &mut IdempotentNodeStats,
) {
    let total_vertices: usize = factors.iter().map(|f| f.vertex_count()).sum();
    let cells = reduced.essential.len();
    if total_vertices > 160 || cells > 10 {
        stats.registry_unchecked += 1;
        return;
    }
    let zfam: BTreeSet<crate::derivation::ZSet> =
        [positive_pairs(&reduced.essential, &reduced.phi)].into_iter().collect();
    let mut first: Option<crate::abstraction::Abstraction> = None;
    for f in factors {
        match crate::abstraction::Abstraction::of(f, &zfam) {
            Ok(a) => match &first {
                None => first = Some(a),
                Some(b) => {
                    if a.registry != b.registry {
                        stats.registry_divergent += 1;
                        return;
                    }
                }
            },
            Err(_) => {
                stats.registry_unchecked += 1;
                return;
            }
        }
    }
    stats.registry_checked_equal += 1;
}

pub fn decompose(word: &LinearWord) -> Result<DecomposeResult> {
    if word.is_empty() {
        return Err(Error::input("cannot decompose an empty word"));
    }
    word.validate()?;
    let atoms: Vec<Derivation> = word
        .instructions
        .iter()
        .map(|ins| match ins {
            Instruction::AddVertex { color, profile, id } => Derivation::atomic_vertex(
                word.k,
                *color,
                *profile,
                crate::graph::Recoloring::identity(word.k),
                *id,
            ),
            Instruction::Recolor(phi) => Ok(Derivation::atomic_recolor(phi.clone())),
        })
        .collect::<Result<_>>()?;
    let images: Vec<ReducedAbstraction> = atoms.iter().map(ReducedAbstraction::of).collect();
    let forest = build_forest(&images, &ReducedSg)?;

    let mut stats = IdempotentNodeStats::default();
    let mut level_widths: Vec<usize> = Vec::new();
    let (_, term) = assemble_node(
        &forest.root,
        &atoms,
        word,
        0,
        &mut level_widths,
        &mut stats,
    )?;
    let term = tidy(term);
    Ok(DecomposeResult {
        width: term.width(),
        term,
        forest_depth: forest.depth,
        forest_bound: forest.bound,
        per_level_widths: level_widths,
        idempotent_nodes: stats,
    })
}

fn assemble_node(
    node: &ForestNode,
    atoms: &[Derivation],
    word: &LinearWord,
    level: usize,
    level_widths: &mut Vec<usize>,
    stats: &mut IdempotentNodeStats,
) -> Result<(Derivation, CliqueTerm)> {
    let (sigma, term) = match node {
        ForestNode::Leaf(pos) => {
            let term = match &word.instructions[*pos] {
                Instruction::AddVertex { color, id, .. } => CliqueTerm::constant(*color, *id),
                Instruction::Recolor(_) => CliqueTerm::Empty,
            };
            (atoms[*pos].clone(), term)
        }
        ForestNode::Binary(l, r) => {
            let (sl, tl) = assemble_node(l, atoms, word, level + 1, level_widths, stats)?;
            let (sr, tr) = assemble_node(r, atoms, word, level + 1, level_widths, stats)?;
            let term = assemble_binary(&sl, &sr, tl, tr)?;
            (Derivation::compose(&sl, &sr)?, term)
        }
        ForestNode::Idempotent(children) => {
            let mut factors = Vec::with_capacity(children.len());
            let mut terms = Vec::with_capacity(children.len());
            for c in children {
                let (s, t) = assemble_node(c, atoms, word, level + 1, level_widths, stats)?;
                factors.push(s);
                terms.push(t);
            }
            assemble_idempotent(&factors, terms, stats)?
        }
    };
    if level_widths.len() <= level {
        level_widths.resize(level + 1, 0);
    }
    level_widths[level] = level_widths[level].max(term.width());
    Ok((sigma, term))
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub ok: bool,
    pub detail: Option<String>,
}

/// Leaf-identity check of a decomposition against its word: same vertex ids
/// and exactly the same edges; colors are not compared.
pub fn verify_decomposition(word: &LinearWord, result: &DecomposeResult) -> VerifyReport {
    let expect = word.eval();
    let got = match result.term.eval() {
        Ok(g) => g,
        Err(e) => return VerifyReport { ok: false, detail: Some(e.to_string()) },
    };
    if got.vertex_set() != expect.vertex_set() {
        return VerifyReport {
            ok: false,
            detail: Some("vertex ids differ from the word's vertices".to_string()),
        };
    }
    let got_edges: BTreeSet<_> = got.edges().collect();
    let expect_edges: BTreeSet<_> = expect.edges().collect();
    if got_edges != expect_edges {
        let diff = got_edges.symmetric_difference(&expect_edges).next();
        return VerifyReport {
            ok: false,
            detail: diff.map(|(a, b)| format!("edge {a}-{b} differs")),
        };
    }
    VerifyReport { ok: true, detail: None }
}
