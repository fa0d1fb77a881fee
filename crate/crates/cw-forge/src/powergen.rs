//! Seeded generation of order-lab contexts.
//!
//! The lab's hypotheses ask for factors with one shared summary that is
//! idempotent including its connectivity registries. Products of renamed
//! copies of a single derivation satisfy the sharing for free; idempotency is
//! arranged by raising a random base derivation to a power and verifying that
//! the summary, with registries over the operative flip selection, no longer
//! changes under further squaring.

use rand::Rng;
use std::collections::BTreeSet;

use crate::abstraction::{Abstraction, ReducedAbstraction};
use crate::derivation::{Derivation, ZSet};
use crate::error::{Error, Result};
use crate::gen::rng_for;
use crate::graph::{ColorSet, Recoloring, VertexId};
use crate::orderlab::{positive_pairs, OrderLabContext};
use crate::word::{Instruction, LinearWord};

/// Repeats a word `times` times with id-disjoint copies: the j-th copy's
/// fresh vertices get ids `base + j*stride + rank`.
pub fn repeat_word(word: &LinearWord, times: usize, base: u32) -> LinearWord {
    let ids: Vec<VertexId> = word
        .instructions
        .iter()
        .filter_map(|i| match i {
            Instruction::AddVertex { id, .. } => Some(*id),
            _ => None,
        })
        .collect();
    let stride = ids.len() as u32;
    let rank_of = |id: VertexId| ids.iter().position(|x| *x == id).unwrap() as u32;
    let mut instructions = Vec::with_capacity(word.len() * times);
    for j in 0..times as u32 {
        for ins in &word.instructions {
            instructions.push(match ins {
                Instruction::AddVertex { color, profile, id } => Instruction::AddVertex {
                    color: *color,
                    profile: *profile,
                    id: VertexId(base + j * stride + rank_of(*id)),
                },
                Instruction::Recolor(phi) => Instruction::Recolor(phi.clone()),
            });
        }
    }
    LinearWord::new(word.k, instructions).expect("renamed repetition stays well-formed")
}

fn operative_zfamily(reduced: &ReducedAbstraction) -> BTreeSet<ZSet> {
    [positive_pairs(&reduced.essential, &reduced.phi)].into_iter().collect()
}

/// Searches for a base derivation whose summary is idempotent with
/// registries over its own positive flip selection, then builds the context
/// of `n` renamed copies. Deterministic in `(k, n, seed)`.
pub fn power_context(k: u32, n: usize, seed: u64) -> Result<OrderLabContext> {
    let (_base, factors) = power_factors(k, n, seed)?;
    OrderLabContext::build(factors)
}

/// As `power_context`, also exposing the base word the factors repeat.
pub fn power_factors(k: u32, n: usize, seed: u64) -> Result<(LinearWord, Vec<Derivation>)> {
    if n == 0 {
        return Err(Error::input("need at least one factor"));
    }
    let mut rng = rng_for(seed, 1);
    for _attempt in 0..200 {
        let len = rng.gen_range(2..=4usize);
        let mut instructions = Vec::new();
        let mut next_id = 1u32;
        for pos in 0..len {
            if pos == 0 || rng.gen_bool(0.8) {
                let color = rng.gen_range(1..=k);
                let profile: ColorSet = (1..=k).filter(|_| rng.gen_bool(0.5)).collect();
                instructions.push(Instruction::AddVertex {
                    color,
                    profile,
                    id: VertexId(next_id),
                });
                next_id += 1;
            } else {
                let images: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=k)).collect();
                instructions.push(Instruction::Recolor(Recoloring(images)));
            }
        }
        let word = LinearWord::new(k, instructions).expect("generated word is well-formed");

        for m in 1..=6usize {
            let base_m = repeat_word(&word, m, 0);
            let sigma = Derivation::from_word(&base_m)?;
            let reduced = ReducedAbstraction::of(&sigma);
            if !reduced.phi.is_idempotent() || !reduced.is_idempotent() {
                continue;
            }
            let zfam = operative_zfamily(&reduced);
            let a1 = Abstraction::of(&sigma, &zfam)?;
            let stable = [2usize, 3].iter().all(|&j| {
                let rep = repeat_word(&word, m * j, 0);
                let sig_j = Derivation::from_word(&rep).expect("repetition composes");
                match Abstraction::of(&sig_j, &zfam) {
                    Ok(aj) => aj.essential == a1.essential && aj.registry == a1.registry,
                    Err(_) => false,
                }
            });
            if !stable {
                continue;
            }
            // id-disjoint factors: copy i repeats the stabilized base
            let verts = base_m
                .instructions
                .iter()
                .filter(|i| matches!(i, Instruction::AddVertex { .. }))
                .count() as u32;
            let factors: Vec<Derivation> = (0..n)
                .map(|i| {
                    let w = repeat_word(&word, m, i as u32 * verts);
                    Derivation::from_word(&w).expect("factor word composes")
                })
                .collect();
            return Ok((word, factors));
        }
    }
    Err(Error::input(format!(
        "no idempotent power base found for k={k} seed={seed}"
    )))
}
