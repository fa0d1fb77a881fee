//! Straight-line build instructions for colored graphs and their embedding
//! into tree terms.
//!
//! A word of width `k` is a sequence of AddVertex and Recolor instructions
//! evaluated left to right over the empty graph. AddVertex instructions carry
//! explicit fresh vertex ids so evaluation is reproducible and later
//! transformations can be compared by vertex identity.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Color, ColorSet, ColoredGraph, Recoloring, VertexId};
use crate::term::{CliqueTerm, ColorMap, JoinPair};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    /// Adds a fresh vertex of the given color, adjacent to exactly the
    /// existing vertices whose color lies in `profile`.
    AddVertex { color: Color, profile: ColorSet, id: VertexId },
    Recolor(Recoloring),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearWord {
    pub k: u32,
    pub instructions: Vec<Instruction>,
}

impl LinearWord {
    pub fn new(k: u32, instructions: Vec<Instruction>) -> Result<Self> {
        let w = LinearWord { k, instructions };
        w.validate()?;
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > 60 {
            return Err(Error::input(format!("width k={} out of supported range", self.k)));
        }
        let mut ids = BTreeSet::new();
        for ins in &self.instructions {
            match ins {
                Instruction::AddVertex { color, profile, id } => {
                    if *color == 0 || *color > self.k {
                        return Err(Error::input(format!(
                            "vertex color {color} out of [1,{}]",
                            self.k
                        )));
                    }
                    if !profile.is_subset_of_range(self.k) {
                        return Err(Error::input(format!(
                            "profile {} not a subset of [1,{}]",
                            profile.to_text(),
                            self.k
                        )));
                    }
                    if !ids.insert(*id) {
                        return Err(Error::input(format!("duplicate vertex id {id}")));
                    }
                }
                Instruction::Recolor(phi) => {
                    if phi.k() != self.k || !phi.is_valid() {
                        return Err(Error::input("recoloring does not map [k] to [k]".to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Left-to-right evaluation over the empty graph.
    pub fn eval(&self) -> ColoredGraph {
        let mut g = ColoredGraph::empty(self.k);
        for ins in &self.instructions {
            match ins {
                Instruction::AddVertex { color, profile, id } => {
                    let targets: Vec<VertexId> =
                        g.vertices().filter(|&v| profile.contains(g.color(v))).collect();
                    g.add_vertex(*id, *color).expect("validated word");
                    for t in targets {
                        g.add_edge(*id, t).expect("validated word");
                    }
                }
                Instruction::Recolor(phi) => {
                    g = g.recolor(phi);
                }
            }
        }
        g
    }

    /// Embeds the word into a tree term of width at most `k+1` using one
    /// spare color: each AddVertex becomes a join with a fresh constant on
    /// the spare color, recolored to the requested color on top. The result
    /// evaluates to exactly `self.eval()` (same ids, colors, edges).
    pub fn to_term(&self) -> CliqueTerm {
        let spare: Color = self.k + 1;
        let mut term = CliqueTerm::Empty;
        for ins in &self.instructions {
            match ins {
                Instruction::AddVertex { color, profile, id } => {
                    let pairs: BTreeSet<JoinPair> =
                        profile.iter().map(|x| JoinPair::new(spare, x)).collect();
                    let mut children = Vec::new();
                    if !term.is_empty_term() {
                        children.push(term);
                    }
                    children.push(CliqueTerm::constant(spare, *id));
                    let joined = CliqueTerm::Join { pairs, children };
                    let map: ColorMap = [(spare, *color)].into_iter().collect();
                    term = CliqueTerm::recolor(map, joined);
                }
                Instruction::Recolor(phi) => {
                    if !term.is_empty_term() {
                        let map: ColorMap = (1..=self.k)
                            .filter(|&c| phi.apply(c) != c)
                            .map(|c| (c, phi.apply(c)))
                            .collect();
                        term = CliqueTerm::recolor(map, term);
                    }
                }
            }
        }
        term
    }

    /// Line-based text format: `word k=<k>` header, then one instruction per
    /// line: `a <color> <profile|-> <id>` or `r <image...>` (k images).
    pub fn to_text(&self) -> String {
        let mut out = format!("word k={}\n", self.k);
        for ins in &self.instructions {
            match ins {
                Instruction::AddVertex { color, profile, id } => {
                    let _ = writeln!(out, "a {} {} {}", color, profile.to_text(), id);
                }
                Instruction::Recolor(phi) => {
                    let images: Vec<String> = phi.0.iter().map(|c| c.to_string()).collect();
                    let _ = writeln!(out, "r {}", images.join(" "));
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<LinearWord> {
        let mut k: Option<u32> = None;
        let mut instructions = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let n = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "word" => {
                    if k.is_some() {
                        return Err(Error::parse(n, "duplicate word header"));
                    }
                    k = Some(
                        fields
                            .get(1)
                            .and_then(|f| f.strip_prefix("k="))
                            .and_then(|s| s.parse::<u32>().ok())
                            .ok_or_else(|| Error::parse(n, "expected `word k=<k>`"))?,
                    );
                }
                "a" => {
                    if k.is_none() {
                        return Err(Error::parse(n, "missing word header"));
                    }
                    if fields.len() != 4 {
                        return Err(Error::parse(n, "expected `a <color> <profile|-> <id>`"));
                    }
                    let color: u32 =
                        fields[1].parse().map_err(|_| Error::parse(n, "bad color"))?;
                    let profile = ColorSet::parse_text(fields[2])
                        .map_err(|msg| Error::parse(n, msg))?;
                    let id: u32 = fields[3].parse().map_err(|_| Error::parse(n, "bad id"))?;
                    instructions.push(Instruction::AddVertex {
                        color,
                        profile,
                        id: VertexId(id),
                    });
                }
                "r" => {
                    let k = k.ok_or_else(|| Error::parse(n, "missing word header"))?;
                    let images: Vec<u32> = fields[1..]
                        .iter()
                        .map(|f| f.parse::<u32>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::parse(n, "bad recolor image"))?;
                    if images.len() != k as usize {
                        return Err(Error::parse(n, format!("expected {k} recolor images")));
                    }
                    instructions.push(Instruction::Recolor(Recoloring(images)));
                }
                other => return Err(Error::parse(n, format!("unknown line kind `{other}`"))),
            }
        }
        match k {
            Some(k) => LinearWord::new(k, instructions),
            None => Err(Error::parse(0, "empty word file")),
        }
    }
}

/// The width-3 worked example used across the test suite: three 4-cliques
/// chained by single edges (12 vertices, 20 edges).
pub fn example_word() -> LinearWord {
    let a = |color: u32, profile: &[u32], id: u32| Instruction::AddVertex {
        color,
        profile: profile.iter().copied().collect(),
        id: VertexId(id),
    };
    let r = |images: &[u32]| Instruction::Recolor(Recoloring(images.to_vec()));
    LinearWord::new(
        3,
        vec![
            a(1, &[], 1),
            a(1, &[1], 2),
            a(1, &[1], 3),
            a(2, &[1], 4),
            a(3, &[2], 5),
            r(&[1, 1, 2]),
            a(2, &[2], 6),
            a(2, &[2], 7),
            a(3, &[2], 8),
            r(&[1, 1, 2]),
            a(3, &[2], 9),
            a(3, &[3], 10),
            a(3, &[3], 11),
            a(3, &[3], 12),
        ],
    )
    .expect("example word is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_word_evaluates_to_empty_graph() {
        let w = LinearWord::new(2, vec![]).unwrap();
        assert!(w.eval().is_empty());
    }

    #[test]
    fn single_add_vertex() {
        let w = LinearWord::new(
            1,
            vec![Instruction::AddVertex {
                color: 1,
                profile: ColorSet::EMPTY,
                id: VertexId(1),
            }],
        )
        .unwrap();
        let g = w.eval();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.color(VertexId(1)), 1);
    }

    #[test]
    fn example_word_builds_twelve_vertices_twenty_edges() {
        let g = example_word().eval();
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.edge_count(), 20);
    }

    #[test]
    fn single_add_vertex_term_shape() {
        let w = LinearWord::new(
            2,
            vec![Instruction::AddVertex {
                color: 2,
                profile: ColorSet::EMPTY,
                id: VertexId(5),
            }],
        )
        .unwrap();
        let t = w.to_term();
        // recolor over join over constant
        match &t {
            CliqueTerm::Recolor { child, .. } => match child.as_ref() {
                CliqueTerm::Join { children, .. } => {
                    assert_eq!(children.len(), 1);
                    assert!(matches!(children[0], CliqueTerm::Constant { .. }));
                }
                other => panic!("expected join, got {other:?}"),
            },
            other => panic!("expected recolor, got {other:?}"),
        }
        assert!(t.eval().unwrap().same_labeled_graph(&w.eval()));
    }

    #[test]
    fn example_word_embeds_exactly_with_small_width() {
        let w = example_word();
        let t = w.to_term();
        assert!(t.width() <= w.k as usize + 1);
        let g = t.eval().unwrap();
        assert!(g.same_labeled_graph(&w.eval()));
    }

    #[test]
    fn empty_word_embeds_to_empty_sentinel() {
        let w = LinearWord::new(2, vec![]).unwrap();
        assert!(w.to_term().is_empty_term());
    }

    #[test]
    fn text_round_trip() {
        let w = example_word();
        assert_eq!(LinearWord::from_text(&w.to_text()).unwrap(), w);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mk = |id| Instruction::AddVertex {
            color: 1,
            profile: ColorSet::EMPTY,
            id: VertexId(id),
        };
        assert!(LinearWord::new(1, vec![mk(1), mk(1)]).is_err());
    }
}
