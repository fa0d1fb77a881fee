//! Bottom-up automata over decomposition terms.
//!
//! States propagate from constants through recolorings and joins; join
//! aggregation must be order-independent because term siblings carry no
//! order. Two built-in automata demonstrate the approach: a leaf counter
//! modulo p, and a connectivity recognizer.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::Color;
use crate::term::{CliqueTerm, ColorMap, JoinPair};

pub trait TermAutomaton {
    type State: Clone + Eq + std::fmt::Debug;

    /// Largest color the automaton understands; terms mentioning more are
    /// rejected. `None` means any color is fine.
    fn color_limit(&self) -> Option<Color>;
    fn empty_state(&self) -> Self::State;
    fn on_constant(&self, color: Color) -> Self::State;
    fn on_recolor(&self, map: &ColorMap, state: Self::State) -> Self::State;
    /// Must be invariant under permutations of `states`.
    fn on_join(&self, pairs: &BTreeSet<JoinPair>, states: Vec<Self::State>) -> Self::State;
    fn accepts(&self, state: &Self::State) -> bool;
}

pub fn run<A: TermAutomaton>(automaton: &A, term: &CliqueTerm) -> Result<(A::State, bool)> {
    if let Some(limit) = automaton.color_limit() {
        if let Some(&max) = term.mentioned_colors().iter().next_back() {
            if max > limit {
                return Err(Error::input(format!(
                    "term mentions color {max}, automaton handles up to {limit}"
                )));
            }
        }
    }
    let state = eval_state(automaton, term);
    let accept = automaton.accepts(&state);
    Ok((state, accept))
}

fn eval_state<A: TermAutomaton>(a: &A, term: &CliqueTerm) -> A::State {
    match term {
        CliqueTerm::Empty => a.empty_state(),
        CliqueTerm::Constant { color, .. } => a.on_constant(*color),
        CliqueTerm::Recolor { map, child } => {
            let s = eval_state(a, child);
            a.on_recolor(map, s)
        }
        CliqueTerm::Join { pairs, children } => {
            let states = children.iter().map(|c| eval_state(a, c)).collect();
            a.on_join(pairs, states)
        }
    }
}

/// Counts leaves modulo `p`; accepts counts divisible by `p`.
pub struct ModPAutomaton {
    p: u64,
}

pub fn automaton_mod_p(p: u64) -> Result<ModPAutomaton> {
    if p == 0 {
        return Err(Error::input("modulus must be at least 1"));
    }
    Ok(ModPAutomaton { p })
}

impl TermAutomaton for ModPAutomaton {
    type State = u64;

    fn color_limit(&self) -> Option<Color> {
        None
    }

    fn empty_state(&self) -> u64 {
        0
    }

    fn on_constant(&self, _color: Color) -> u64 {
        1 % self.p
    }

    fn on_recolor(&self, _map: &ColorMap, state: u64) -> u64 {
        state
    }

    fn on_join(&self, _pairs: &BTreeSet<JoinPair>, states: Vec<u64>) -> u64 {
        states.into_iter().fold(0, |a, b| (a + b) % self.p)
    }

    fn accepts(&self, state: &u64) -> bool {
        *state == 0
    }
}

/// Component signature: the set of colors present in one connected component.
type Signature = BTreeSet<Color>;

/// Multiset of component signatures with multiplicities capped at two.
/// The cap is sound: a join can only merge components from different
/// children, and whether such merges leave one component in the end depends
/// only on which signatures exist and whether a signature occurs once or
/// more — never on counts above two, since components sharing a signature
/// merge together or stay apart together.
pub type ConnectivityState = BTreeMap<Signature, u8>;

pub struct ConnectivityAutomaton {
    k: Color,
}

pub fn automaton_connectivity(k: Color) -> Result<ConnectivityAutomaton> {
    if k == 0 {
        return Err(Error::input("connectivity automaton needs k >= 1"));
    }
    Ok(ConnectivityAutomaton { k })
}

fn add_sig(state: &mut ConnectivityState, sig: Signature, count: u8) {
    let entry = state.entry(sig).or_insert(0);
    *entry = (*entry + count).min(2);
}

impl TermAutomaton for ConnectivityAutomaton {
    type State = ConnectivityState;

    fn color_limit(&self) -> Option<Color> {
        Some(self.k)
    }

    fn empty_state(&self) -> ConnectivityState {
        BTreeMap::new()
    }

    fn on_constant(&self, color: Color) -> ConnectivityState {
        [([color].into_iter().collect(), 1)].into_iter().collect()
    }

    fn on_recolor(&self, map: &ColorMap, state: ConnectivityState) -> ConnectivityState {
        let mut out = ConnectivityState::new();
        for (sig, count) in state {
            let mapped: Signature =
                sig.into_iter().map(|c| map.get(&c).copied().unwrap_or(c)).collect();
            add_sig(&mut out, mapped, count);
        }
        out
    }

    fn on_join(&self, pairs: &BTreeSet<JoinPair>, states: Vec<ConnectivityState>) -> ConnectivityState {
        let linked = |a: &Signature, b: &Signature| {
            pairs.iter().any(|p| {
                (a.contains(&p.lo) && b.contains(&p.hi))
                    || (a.contains(&p.hi) && b.contains(&p.lo))
            })
        };
        let mut acc = ConnectivityState::new();
        for child in states {
            if acc.is_empty() {
                acc = child;
                continue;
            }
            if child.is_empty() {
                continue;
            }
            // bipartite closure between accumulated components and the new
            // child's components; everything in one closure class merges
            let left: Vec<(Signature, u8)> = acc.into_iter().collect();
            let right: Vec<(Signature, u8)> = child.into_iter().collect();
            let n = left.len() + right.len();
            let mut class: Vec<usize> = (0..n).collect();
            fn find(class: &mut Vec<usize>, mut x: usize) -> usize {
                while class[x] != x {
                    class[x] = class[class[x]];
                    x = class[x];
                }
                x
            }
            for (i, (a, _)) in left.iter().enumerate() {
                for (j, (b, _)) in right.iter().enumerate() {
                    if linked(a, b) {
                        let (ra, rb) = (find(&mut class, i), find(&mut class, left.len() + j));
                        if ra != rb {
                            class[ra] = rb;
                        }
                    }
                }
            }
            let mut merged: BTreeMap<usize, (Signature, u8, usize)> = BTreeMap::new();
            for (idx, (sig, count)) in
                left.iter().chain(right.iter()).enumerate()
            {
                let root = find(&mut class, idx);
                let entry = merged.entry(root).or_insert((Signature::new(), 0, 0));
                entry.0.extend(sig.iter().copied());
                entry.1 = entry.1.max(*count);
                entry.2 += 1;
            }
            let mut next = ConnectivityState::new();
            for (_, (sig, count, members)) in merged {
                // a class with several members collapses to one component
                let c = if members > 1 { 1 } else { count };
                add_sig(&mut next, sig, c);
            }
            acc = next;
        }
        acc
    }

    fn accepts(&self, state: &ConnectivityState) -> bool {
        state.values().map(|&c| c as u32).sum::<u32>() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_term, GenTermSpec};
    use crate::graph::VertexId;

    #[test]
    fn mod2_on_single_constant_rejects() {
        let a = automaton_mod_p(2).unwrap();
        let (state, accept) = run(&a, &CliqueTerm::constant(1, VertexId(1))).unwrap();
        assert_eq!(state, 1);
        assert!(!accept);
    }

    #[test]
    fn mod_p_empty_term_accepts() {
        let a = automaton_mod_p(3).unwrap();
        assert!(run(&a, &CliqueTerm::Empty).unwrap().1);
    }

    #[test]
    fn zero_modulus_rejected() {
        assert!(automaton_mod_p(0).is_err());
    }

    #[test]
    fn mod2_accepts_the_example_graph_term() {
        // twelve vertices
        let t = crate::word::example_word().to_term();
        let a = automaton_mod_p(2).unwrap();
        assert!(run(&a, &t).unwrap().1);
    }

    #[test]
    fn connectivity_single_vertex_accepts() {
        let a = automaton_connectivity(2).unwrap();
        assert!(run(&a, &CliqueTerm::constant(1, VertexId(1))).unwrap().1);
    }

    #[test]
    fn connectivity_join_without_pairs_rejects() {
        let a = automaton_connectivity(2).unwrap();
        let t = CliqueTerm::Join {
            pairs: BTreeSet::new(),
            children: vec![
                CliqueTerm::constant(1, VertexId(1)),
                CliqueTerm::constant(2, VertexId(2)),
            ],
        };
        assert!(!run(&a, &t).unwrap().1);
    }

    #[test]
    fn connectivity_accepts_the_example_graph_term() {
        let t = crate::word::example_word().to_term();
        let a = automaton_connectivity(4).unwrap();
        let (_, accept) = run(&a, &t).unwrap();
        let connected =
            t.eval().unwrap().connected_components().len() == 1;
        assert!(connected);
        assert!(accept);
    }

    #[test]
    fn color_limit_is_enforced() {
        let a = automaton_connectivity(1).unwrap();
        assert!(run(&a, &CliqueTerm::constant(2, VertexId(1))).is_err());
    }

    #[test]
    fn automata_agree_with_direct_computation() {
        for seed in 0..300u64 {
            let t = gen_term(&GenTermSpec { k: 3, size: 14, seed });
            let g = t.eval().unwrap();
            for p in [1u64, 2, 3, 5] {
                let a = automaton_mod_p(p).unwrap();
                assert_eq!(
                    run(&a, &t).unwrap().1,
                    g.vertex_count() as u64 % p == 0,
                    "mod {p} seed {seed}"
                );
            }
            let a = automaton_connectivity(3).unwrap();
            assert_eq!(
                run(&a, &t).unwrap().1,
                g.connected_components().len() == 1,
                "connectivity seed {seed}"
            );
        }
    }

    #[test]
    fn verdict_is_stable_under_child_shuffles() {
        use rand::seq::SliceRandom;
        for seed in 0..60u64 {
            let t = gen_term(&GenTermSpec { k: 3, size: 12, seed });
            let conn = automaton_connectivity(3).unwrap();
            let modp = automaton_mod_p(3).unwrap();
            let base_conn = run(&conn, &t).unwrap();
            let base_mod = run(&modp, &t).unwrap();
            let mut rng = crate::gen::rng_for(seed, 99);
            for _ in 0..5 {
                let mut shuffled = t.clone();
                fn shuffle(t: &mut CliqueTerm, rng: &mut rand_chacha::ChaCha8Rng) {
                    match t {
                        CliqueTerm::Join { children, .. } => {
                            children.shuffle(rng);
                            for c in children {
                                shuffle(c, rng);
                            }
                        }
                        CliqueTerm::Recolor { child, .. } => shuffle(child, rng),
                        _ => {}
                    }
                }
                shuffle(&mut shuffled, &mut rng);
                assert_eq!(run(&conn, &shuffled).unwrap(), base_conn);
                assert_eq!(run(&modp, &shuffled).unwrap(), base_mod);
            }
        }
    }
}
