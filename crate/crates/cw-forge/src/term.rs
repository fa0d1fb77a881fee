//! Tree-shaped decomposition terms over Join / Recolor / Constant and the
//! transformations the assembly pipeline needs: evaluation, width accounting,
//! color-partition enforcement and leaf restriction.
//!
//! A term has no declared color budget; its width is the number of distinct
//! colors mentioned anywhere in it. Recolor maps are stored sparsely (only
//! the non-identity entries), so untouched colors do not count as mentioned.
//! Leaves carry stable vertex ids so that evaluation results can be compared
//! with other constructions by identity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Color, ColoredGraph, VertexId};

/// Sparse recoloring for terms: maps absent from the table are identity.
pub type ColorMap = BTreeMap<Color, Color>;

fn apply_map(map: &ColorMap, c: Color) -> Color {
    map.get(&c).copied().unwrap_or(c)
}

/// Unordered pair of colors with `0 ≤ lo ≤ hi`; singletons have `lo == hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JoinPair {
    pub lo: Color,
    pub hi: Color,
}

impl JoinPair {
    pub fn new(a: Color, b: Color) -> Self {
        if a <= b {
            JoinPair { lo: a, hi: b }
        } else {
            JoinPair { lo: b, hi: a }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliqueTerm {
    /// Sentinel for the empty decomposition; evaluates to the empty graph.
    Empty,
    Constant { color: Color, id: VertexId },
    Recolor { map: ColorMap, child: Box<CliqueTerm> },
    Join { pairs: BTreeSet<JoinPair>, children: Vec<CliqueTerm> },
}

impl CliqueTerm {
    pub fn constant(color: Color, id: VertexId) -> Self {
        CliqueTerm::Constant { color, id }
    }

    pub fn recolor(map: ColorMap, child: CliqueTerm) -> Self {
        let map: ColorMap = map.into_iter().filter(|(a, b)| a != b).collect();
        CliqueTerm::Recolor { map, child: Box::new(child) }
    }

    pub fn join(pairs: BTreeSet<JoinPair>, children: Vec<CliqueTerm>) -> Result<Self> {
        if children.is_empty() {
            return Err(Error::input("join requires at least one child"));
        }
        Ok(CliqueTerm::Join { pairs, children })
    }

    pub fn is_empty_term(&self) -> bool {
        matches!(self, CliqueTerm::Empty)
    }

    /// Leaf vertex ids in depth-first order.
    pub fn leaves(&self) -> Vec<VertexId> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<VertexId>) {
        match self {
            CliqueTerm::Empty => {}
            CliqueTerm::Constant { id, .. } => out.push(*id),
            CliqueTerm::Recolor { child, .. } => child.collect_leaves(out),
            CliqueTerm::Join { children, .. } => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
        }
    }

    pub fn leaf_set(&self) -> BTreeSet<VertexId> {
        self.leaves().into_iter().collect()
    }

    /// Every color appearing in a constant, a join pair, or a non-identity
    /// recolor entry (key or value).
    pub fn mentioned_colors(&self) -> BTreeSet<Color> {
        let mut out = BTreeSet::new();
        self.collect_colors(&mut out);
        out
    }

    fn collect_colors(&self, out: &mut BTreeSet<Color>) {
        match self {
            CliqueTerm::Empty => {}
            CliqueTerm::Constant { color, .. } => {
                out.insert(*color);
            }
            CliqueTerm::Recolor { map, child } => {
                for (a, b) in map {
                    out.insert(*a);
                    out.insert(*b);
                }
                child.collect_colors(out);
            }
            CliqueTerm::Join { pairs, children } => {
                for p in pairs {
                    out.insert(p.lo);
                    out.insert(p.hi);
                }
                for c in children {
                    c.collect_colors(out);
                }
            }
        }
    }

    pub fn width(&self) -> usize {
        self.mentioned_colors().len()
    }

    pub fn eval(&self) -> Result<ColoredGraph> {
        let k = self.mentioned_colors().into_iter().max().unwrap_or(0);
        let mut g = ColoredGraph::empty(k);
        self.eval_into(&mut g)?;
        Ok(g)
    }

    fn eval_into(&self, acc: &mut ColoredGraph) -> Result<()> {
        match self {
            CliqueTerm::Empty => Ok(()),
            CliqueTerm::Constant { color, id } => {
                if *color == 0 {
                    return Err(Error::input("constant color must be positive".to_string()));
                }
                acc.add_vertex(*id, *color)
            }
            CliqueTerm::Recolor { map, child } => {
                let before = acc.vertex_set();
                child.eval_into(acc)?;
                for v in acc.vertex_set() {
                    if !before.contains(&v) {
                        let c = acc.color(v);
                        acc.set_color(v, apply_map(map, c));
                    }
                }
                Ok(())
            }
            CliqueTerm::Join { pairs, children } => {
                let mut groups: Vec<BTreeSet<VertexId>> = Vec::with_capacity(children.len());
                for child in children {
                    let before = acc.vertex_set();
                    child.eval_into(acc)?;
                    groups.push(acc.vertex_set().difference(&before).copied().collect());
                }
                // by-color index per child group
                let by_color: Vec<BTreeMap<Color, Vec<VertexId>>> = groups
                    .iter()
                    .map(|g| {
                        let mut m: BTreeMap<Color, Vec<VertexId>> = BTreeMap::new();
                        for &v in g {
                            m.entry(acc.color(v)).or_default().push(v);
                        }
                        m
                    })
                    .collect();
                for pair in pairs {
                    for i in 0..groups.len() {
                        for j in (i + 1)..groups.len() {
                            let mut link = |c: Color, d: Color| -> Result<()> {
                                if let (Some(xs), Some(ys)) =
                                    (by_color[i].get(&c), by_color[j].get(&d))
                                {
                                    for &x in xs {
                                        for &y in ys {
                                            acc.add_edge(x, y)?;
                                        }
                                    }
                                }
                                Ok(())
                            };
                            link(pair.lo, pair.hi)?;
                            if pair.lo != pair.hi {
                                link(pair.hi, pair.lo)?;
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Rebuilds the term so that the final color of each leaf is its class
    /// index under `parts` (classes `1..=p`), without changing vertices or
    /// edges. Interior colors become `(class, color)` pairs, encoded as
    /// `(class-1)*base + color`, and one recoloring on top projects to the
    /// class index. `parts` must cover every leaf.
    pub fn enforce_colors(&self, parts: &BTreeMap<VertexId, u32>, p: u32) -> Result<CliqueTerm> {
        if p == 0 {
            return Err(Error::input("enforce_colors requires p >= 1"));
        }
        for id in self.leaves() {
            match parts.get(&id) {
                None => {
                    return Err(Error::input(format!(
                        "leaf {id} missing from the partition"
                    )))
                }
                Some(&q) if q == 0 || q > p => {
                    return Err(Error::input(format!("class {q} for leaf {id} out of [1,{p}]")))
                }
                _ => {}
            }
        }
        let base = self.mentioned_colors().into_iter().max().unwrap_or(0).max(1);
        let enc = |c: Color, q: u32| -> Color { (q - 1) * base + c };
        let body = self.enforce_rec(parts, p, base)?;
        let mut top: ColorMap = BTreeMap::new();
        for q in 1..=p {
            for c in 1..=base {
                let from = enc(c, q);
                if from != q {
                    top.insert(from, q);
                }
            }
        }
        Ok(CliqueTerm::recolor(top, body))
    }

    fn enforce_rec(&self, parts: &BTreeMap<VertexId, u32>, p: u32, base: Color) -> Result<CliqueTerm> {
        let enc = |c: Color, q: u32| -> Color { (q - 1) * base + c };
        match self {
            CliqueTerm::Empty => Ok(CliqueTerm::Empty),
            CliqueTerm::Constant { color, id } => {
                Ok(CliqueTerm::Constant { color: enc(*color, parts[id]), id: *id })
            }
            CliqueTerm::Recolor { map, child } => {
                let mut map2: ColorMap = BTreeMap::new();
                for (&from, &to) in map {
                    for q in 1..=p {
                        map2.insert(enc(from, q), enc(to, q));
                    }
                }
                Ok(CliqueTerm::recolor(map2, child.enforce_rec(parts, p, base)?))
            }
            CliqueTerm::Join { pairs, children } => {
                let mut pairs2 = BTreeSet::new();
                for pair in pairs {
                    for qi in 1..=p {
                        for qj in 1..=p {
                            pairs2.insert(JoinPair::new(enc(pair.lo, qi), enc(pair.hi, qj)));
                        }
                    }
                }
                let children2 = children
                    .iter()
                    .map(|c| c.enforce_rec(parts, p, base))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CliqueTerm::Join { pairs: pairs2, children: children2 })
            }
        }
    }

    /// Drops every leaf outside `keep`, pruning joins that lose all children.
    /// The result evaluates to the induced subgraph on `keep`.
    pub fn restrict(&self, keep: &BTreeSet<VertexId>) -> Result<CliqueTerm> {
        let leaves = self.leaf_set();
        for v in keep {
            if !leaves.contains(v) {
                return Err(Error::input(format!("restrict keeps unknown leaf {v}")));
            }
        }
        Ok(self.restrict_rec(keep).unwrap_or(CliqueTerm::Empty))
    }

    fn restrict_rec(&self, keep: &BTreeSet<VertexId>) -> Option<CliqueTerm> {
        match self {
            CliqueTerm::Empty => None,
            CliqueTerm::Constant { id, .. } => {
                if keep.contains(id) {
                    Some(self.clone())
                } else {
                    None
                }
            }
            CliqueTerm::Recolor { map, child } => child
                .restrict_rec(keep)
                .map(|c| CliqueTerm::recolor(map.clone(), c)),
            CliqueTerm::Join { pairs, children } => {
                let kept: Vec<CliqueTerm> =
                    children.iter().filter_map(|c| c.restrict_rec(keep)).collect();
                if kept.is_empty() {
                    None
                } else {
                    Some(CliqueTerm::Join { pairs: pairs.clone(), children: kept })
                }
            }
        }
    }

    /// Renumbers mentioned colors to the compact range `1..=width`,
    /// preserving their relative order.
    pub fn normalize_colors(&self) -> CliqueTerm {
        let mentioned = self.mentioned_colors();
        let rename: BTreeMap<Color, Color> = mentioned
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, (i + 1) as Color))
            .collect();
        self.rename_colors(&rename)
    }

    fn rename_colors(&self, rename: &BTreeMap<Color, Color>) -> CliqueTerm {
        let get = |c: Color| -> Color { rename.get(&c).copied().unwrap_or(c) };
        match self {
            CliqueTerm::Empty => CliqueTerm::Empty,
            CliqueTerm::Constant { color, id } => {
                CliqueTerm::Constant { color: get(*color), id: *id }
            }
            CliqueTerm::Recolor { map, child } => {
                let map2 = map.iter().map(|(a, b)| (get(*a), get(*b))).collect();
                CliqueTerm::recolor(map2, child.rename_colors(rename))
            }
            CliqueTerm::Join { pairs, children } => CliqueTerm::Join {
                pairs: pairs.iter().map(|p| JoinPair::new(get(p.lo), get(p.hi))).collect(),
                children: children.iter().map(|c| c.rename_colors(rename)).collect(),
            },
        }
    }

    /// S-expression serialization. Recolor maps are written densely over the
    /// term's maximum mentioned color; constants carry their leaf id.
    pub fn to_text(&self) -> String {
        let k = self.mentioned_colors().into_iter().max().unwrap_or(0).max(1);
        let mut out = String::new();
        self.write_sexpr(k, &mut out);
        out.push('\n');
        out
    }

    fn write_sexpr(&self, k: Color, out: &mut String) {
        match self {
            CliqueTerm::Empty => out.push_str("(empty)"),
            CliqueTerm::Constant { color, id } => {
                let _ = write!(out, "(const {} {})", color, id);
            }
            CliqueTerm::Recolor { map, child } => {
                out.push_str("(recolor (");
                for c in 1..=k {
                    if c > 1 {
                        out.push(' ');
                    }
                    let _ = write!(out, "{}", apply_map(map, c));
                }
                out.push_str(") ");
                child.write_sexpr(k, out);
                out.push(')');
            }
            CliqueTerm::Join { pairs, children } => {
                out.push_str("(join (");
                for (i, p) in pairs.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "({} {})", p.lo, p.hi);
                }
                out.push(')');
                for c in children {
                    out.push(' ');
                    c.write_sexpr(k, out);
                }
                out.push(')');
            }
        }
    }

    pub fn from_text(text: &str) -> Result<CliqueTerm> {
        let tokens = tokenize(text)?;
        let mut pos = 0;
        let mut next_leaf = 0u32;
        let term = parse_term(&tokens, &mut pos, &mut next_leaf)?;
        if pos != tokens.len() {
            let (line, tok) = &tokens[pos];
            return Err(Error::parse(*line, format!("unexpected trailing token `{tok}`")));
        }
        Ok(term)
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut cur = String::new();
    let mut in_comment = false;
    for ch in text.chars() {
        if ch == '\n' {
            in_comment = false;
        }
        if in_comment {
            if ch == '\n' {
                line += 1;
            }
            continue;
        }
        match ch {
            '#' => {
                if !cur.is_empty() {
                    out.push((line, std::mem::take(&mut cur)));
                }
                in_comment = true;
            }
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push((line, std::mem::take(&mut cur)));
                }
                out.push((line, ch.to_string()));
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push((line, std::mem::take(&mut cur)));
                }
                if c == '\n' {
                    line += 1;
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push((line, cur));
    }
    Ok(out)
}

fn expect(tokens: &[(usize, String)], pos: &mut usize, what: &str) -> Result<(usize, String)> {
    match tokens.get(*pos) {
        Some((line, tok)) => {
            *pos += 1;
            if what != "*" && tok != what {
                return Err(Error::parse(*line, format!("expected `{what}`, found `{tok}`")));
            }
            Ok((*line, tok.clone()))
        }
        None => Err(Error::parse(0, format!("unexpected end of input, expected `{what}`"))),
    }
}

fn parse_u32(tok: &(usize, String)) -> Result<u32> {
    tok.1
        .parse::<u32>()
        .map_err(|_| Error::parse(tok.0, format!("expected a number, found `{}`", tok.1)))
}

fn parse_term(
    tokens: &[(usize, String)],
    pos: &mut usize,
    next_leaf: &mut u32,
) -> Result<CliqueTerm> {
    expect(tokens, pos, "(")?;
    let (line, head) = expect(tokens, pos, "*")?;
    match head.as_str() {
        "empty" => {
            expect(tokens, pos, ")")?;
            Ok(CliqueTerm::Empty)
        }
        "const" => {
            let color = parse_u32(&expect(tokens, pos, "*")?)?;
            if color == 0 {
                return Err(Error::parse(line, format!("color {color} out of range")));
            }
            // leaf id is optional; defaults to the depth-first leaf counter
            let next = expect(tokens, pos, "*")?;
            let id = if next.1 == ")" {
                *next_leaf += 1;
                return Ok(CliqueTerm::Constant { color, id: VertexId(*next_leaf) });
            } else {
                parse_u32(&next)?
            };
            *next_leaf += 1;
            expect(tokens, pos, ")")?;
            Ok(CliqueTerm::Constant { color, id: VertexId(id) })
        }
        "recolor" => {
            expect(tokens, pos, "(")?;
            let mut images = Vec::new();
            loop {
                let tok = expect(tokens, pos, "*")?;
                if tok.1 == ")" {
                    break;
                }
                images.push(parse_u32(&tok)?);
            }
            if images.is_empty() {
                return Err(Error::parse(line, "recolor needs at least one image"));
            }
            let mut map: ColorMap = BTreeMap::new();
            for (i, &img) in images.iter().enumerate() {
                let from = (i + 1) as Color;
                if img == 0 {
                    return Err(Error::parse(line, format!("image {img} out of range")));
                }
                if img != from {
                    map.insert(from, img);
                }
            }
            let child = parse_term(tokens, pos, next_leaf)?;
            expect(tokens, pos, ")")?;
            Ok(CliqueTerm::recolor(map, child))
        }
        "join" => {
            expect(tokens, pos, "(")?;
            let mut pairs = BTreeSet::new();
            loop {
                let tok = expect(tokens, pos, "*")?;
                if tok.1 == ")" {
                    break;
                }
                if tok.1 != "(" {
                    return Err(Error::parse(tok.0, "expected a (c d) pair"));
                }
                let c = parse_u32(&expect(tokens, pos, "*")?)?;
                let d = parse_u32(&expect(tokens, pos, "*")?)?;
                if c == 0 || d == 0 {
                    return Err(Error::parse(tok.0, "join pair color out of range"));
                }
                expect(tokens, pos, ")")?;
                pairs.insert(JoinPair::new(c, d));
            }
            let mut children = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some((_, t)) if t == "(" => children.push(parse_term(tokens, pos, next_leaf)?),
                    _ => break,
                }
            }
            expect(tokens, pos, ")")?;
            if children.is_empty() {
                return Err(Error::parse(line, "join requires at least one child"));
            }
            Ok(CliqueTerm::Join { pairs, children })
        }
        other => Err(Error::parse(line, format!("unknown term head `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: Color, b: Color) -> JoinPair {
        JoinPair::new(a, b)
    }

    /// First 4-clique of the worked example: three color-1 vertices and one
    /// color-2 vertex, all pairwise joined.
    pub(crate) fn theta1() -> CliqueTerm {
        CliqueTerm::Join {
            pairs: [pair(1, 1), pair(1, 2)].into_iter().collect(),
            children: vec![
                CliqueTerm::constant(1, VertexId(1)),
                CliqueTerm::constant(1, VertexId(2)),
                CliqueTerm::constant(1, VertexId(3)),
                CliqueTerm::constant(2, VertexId(4)),
            ],
        }
    }

    #[test]
    fn constant_evaluates_to_single_vertex() {
        let g = CliqueTerm::constant(3, VertexId(7)).eval().unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.color(VertexId(7)), 3);
    }

    #[test]
    fn theta1_is_a_4_clique() {
        let g = theta1().eval().unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 6);
        let colors: Vec<Color> = g.vertices().map(|v| g.color(v)).collect();
        assert_eq!(colors, vec![1, 1, 1, 2]);
    }

    #[test]
    fn join_inter_child_edges_only() {
        // two children, each one color-1 vertex; a self-pair {1} joins across
        let t = CliqueTerm::Join {
            pairs: [pair(1, 1)].into_iter().collect(),
            children: vec![
                CliqueTerm::constant(1, VertexId(1)),
                CliqueTerm::constant(1, VertexId(2)),
            ],
        };
        assert_eq!(t.eval().unwrap().edge_count(), 1);
        // a single child with two nested vertices gets no edge from the join
        let inner = CliqueTerm::Join {
            pairs: BTreeSet::new(),
            children: vec![
                CliqueTerm::constant(1, VertexId(1)),
                CliqueTerm::constant(1, VertexId(2)),
            ],
        };
        let t = CliqueTerm::Join { pairs: [pair(1, 1)].into_iter().collect(), children: vec![inner] };
        assert_eq!(t.eval().unwrap().edge_count(), 0);
    }

    #[test]
    fn join_children_commute_under_eval() {
        let t1 = CliqueTerm::Join {
            pairs: [pair(1, 2)].into_iter().collect(),
            children: vec![
                CliqueTerm::constant(1, VertexId(1)),
                CliqueTerm::constant(2, VertexId(2)),
                CliqueTerm::constant(1, VertexId(3)),
            ],
        };
        let t2 = CliqueTerm::Join {
            pairs: [pair(1, 2)].into_iter().collect(),
            children: vec![
                CliqueTerm::constant(1, VertexId(3)),
                CliqueTerm::constant(2, VertexId(2)),
                CliqueTerm::constant(1, VertexId(1)),
            ],
        };
        assert_eq!(t1.eval().unwrap(), t2.eval().unwrap());
    }

    #[test]
    fn enforce_colors_single_class_keeps_graph() {
        let t = theta1();
        let parts: BTreeMap<VertexId, u32> =
            t.leaves().into_iter().map(|v| (v, 1)).collect();
        let t2 = t.enforce_colors(&parts, 1).unwrap();
        let g = t2.eval().unwrap();
        assert!(g.same_unlabeled_graph(&t.eval().unwrap()));
        assert!(g.vertices().all(|v| g.color(v) == 1));
    }

    #[test]
    fn enforce_colors_two_classes() {
        let t = theta1();
        let parts: BTreeMap<VertexId, u32> = [
            (VertexId(1), 1),
            (VertexId(2), 1),
            (VertexId(3), 1),
            (VertexId(4), 2),
        ]
        .into_iter()
        .collect();
        let t2 = t.enforce_colors(&parts, 2).unwrap();
        assert!(t2.width() <= 2 * t.width() + 2);
        let g = t2.eval().unwrap();
        assert!(g.same_unlabeled_graph(&t.eval().unwrap()));
        assert_eq!(g.color(VertexId(1)), 1);
        assert_eq!(g.color(VertexId(4)), 2);
    }

    #[test]
    fn enforce_colors_partial_partition_is_error() {
        let t = theta1();
        let parts: BTreeMap<VertexId, u32> = [(VertexId(1), 1)].into_iter().collect();
        assert!(t.enforce_colors(&parts, 1).is_err());
    }

    #[test]
    fn restrict_to_all_leaves_is_identity_eval() {
        let t = theta1();
        let r = t.restrict(&t.leaf_set()).unwrap();
        assert_eq!(r.eval().unwrap(), t.eval().unwrap());
    }

    #[test]
    fn restrict_to_empty_gives_sentinel() {
        let t = theta1();
        let r = t.restrict(&BTreeSet::new()).unwrap();
        assert!(r.is_empty_term());
        assert!(r.eval().unwrap().is_empty());
    }

    #[test]
    fn restrict_gives_induced_subgraph() {
        let t = theta1();
        let keep: BTreeSet<VertexId> = [VertexId(1), VertexId(4)].into_iter().collect();
        let r = t.restrict(&keep).unwrap();
        assert_eq!(r.eval().unwrap(), t.eval().unwrap().induced(&keep));
        assert!(r.width() <= t.width());
    }

    #[test]
    fn restrict_unknown_leaf_is_error() {
        let t = theta1();
        let keep: BTreeSet<VertexId> = [VertexId(99)].into_iter().collect();
        assert!(t.restrict(&keep).is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = CliqueTerm::recolor(
            [(2u32, 1u32)].into_iter().collect(),
            theta1(),
        );
        let parsed = CliqueTerm::from_text(&t.to_text()).unwrap();
        assert_eq!(parsed, t);
    }

    #[test]
    fn parse_assigns_sequential_ids_when_missing() {
        let t = CliqueTerm::from_text("(join ((1 2)) (const 1) (const 2))").unwrap();
        assert_eq!(t.leaves(), vec![VertexId(1), VertexId(2)]);
    }

    #[test]
    fn zero_child_join_rejected() {
        assert!(CliqueTerm::from_text("(join ((1 1)))").is_err());
        assert!(CliqueTerm::join([JoinPair::new(1, 1)].into_iter().collect(), vec![]).is_err());
    }

    #[test]
    fn normalize_compacts_colors() {
        let t = CliqueTerm::Join {
            pairs: [pair(5, 9)].into_iter().collect(),
            children: vec![
                CliqueTerm::constant(5, VertexId(1)),
                CliqueTerm::constant(9, VertexId(2)),
            ],
        };
        let n = t.normalize_colors();
        assert_eq!(n.mentioned_colors(), [1, 2].into_iter().collect());
        assert!(n.eval().unwrap().same_unlabeled_graph(&t.eval().unwrap()));
    }
}
