//! Seeded instruction-word generators for tests, benchmarks and the CLI.
//!
//! All randomness flows from one counter-based generator keyed by the seed;
//! independent cases use separate streams of the same generator, so corpus
//! results are reproducible regardless of scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{ColorSet, Recoloring, VertexId};
use crate::word::{Instruction, LinearWord};

#[derive(Debug, Clone)]
pub struct GenSpec {
    pub k: u32,
    pub length: usize,
    pub seed: u64,
    /// Relative weight of AddVertex instructions.
    pub add_weight: f64,
    /// Relative weight of Recolor instructions.
    pub recolor_weight: f64,
    /// Probability that each color belongs to a fresh vertex's profile.
    pub profile_density: f64,
    /// Added to every generated vertex id; lets callers build id-disjoint words.
    pub id_offset: u32,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            k: 2,
            length: 10,
            seed: 0,
            add_weight: 0.8,
            recolor_weight: 0.2,
            profile_density: 0.5,
            id_offset: 0,
        }
    }
}

/// One ChaCha stream per (seed, stream) pair.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deterministic word generation. The first instruction is always an
/// AddVertex so generated words build nonempty graphs; subsequent
/// instructions follow the weight mix.
pub fn gen_word(spec: &GenSpec) -> LinearWord {
    assert!(spec.length >= 1, "gen_word requires length >= 1");
    assert!(
        spec.add_weight >= 0.0 && spec.recolor_weight >= 0.0,
        "weights must be nonnegative"
    );
    assert!(spec.add_weight + spec.recolor_weight > 0.0, "weights must not both be zero");
    let mut rng = rng_for(spec.seed, 0);
    let add_prob = spec.add_weight / (spec.add_weight + spec.recolor_weight);
    let mut instructions = Vec::with_capacity(spec.length);
    let mut next_id = spec.id_offset + 1;
    for pos in 0..spec.length {
        let add = pos == 0 || rng.gen_bool(add_prob);
        if add {
            let color = rng.gen_range(1..=spec.k);
            let profile: ColorSet = (1..=spec.k)
                .filter(|_| rng.gen_bool(spec.profile_density))
                .collect();
            instructions.push(Instruction::AddVertex {
                color,
                profile,
                id: VertexId(next_id),
            });
            next_id += 1;
        } else {
            let images: Vec<u32> = (0..spec.k).map(|_| rng.gen_range(1..=spec.k)).collect();
            instructions.push(Instruction::Recolor(Recoloring(images)));
        }
    }
    LinearWord::new(spec.k, instructions).expect("generated word is well-formed")
}

#[derive(Debug, Clone)]
pub struct GenTermSpec {
    pub k: u32,
    /// Number of leaves.
    pub size: usize,
    pub seed: u64,
}

/// Deterministic random decomposition term with `size` leaves, colors in
/// `[k]`, sequential leaf ids.
pub fn gen_term(spec: &GenTermSpec) -> crate::term::CliqueTerm {
    use crate::term::{CliqueTerm, ColorMap, JoinPair};
    assert!(spec.size >= 1 && spec.k >= 1);
    let mut rng = rng_for(spec.seed, 7);
    let mut next_id = 0u32;
    fn build(
        rng: &mut ChaCha8Rng,
        k: u32,
        budget: usize,
        next_id: &mut u32,
    ) -> crate::term::CliqueTerm {
        use crate::term::CliqueTerm;
        if budget == 1 {
            *next_id += 1;
            return CliqueTerm::constant(rng.gen_range(1..=k), VertexId(*next_id));
        }
        if rng.gen_bool(0.3) {
            let map: ColorMap = (1..=k)
                .filter(|_| rng.gen_bool(0.5))
                .map(|c| (c, rng.gen_range(1..=k)))
                .collect();
            return CliqueTerm::recolor(map, build(rng, k, budget, next_id));
        }
        let parts = rng.gen_range(2..=budget.min(4));
        let mut sizes = vec![1usize; parts];
        for _ in 0..budget - parts {
            let i = rng.gen_range(0..parts);
            sizes[i] += 1;
        }
        let mut pairs: std::collections::BTreeSet<JoinPair> = Default::default();
        for c in 1..=k {
            for d in c..=k {
                if rng.gen_bool(0.4) {
                    pairs.insert(JoinPair::new(c, d));
                }
            }
        }
        let children = sizes.into_iter().map(|s| build(rng, k, s, next_id)).collect();
        CliqueTerm::Join { pairs, children }
    }
    build(&mut rng, spec.k, spec.size, &mut next_id)
}

use crate::term::ColorMap;
use rand_chacha::ChaCha8Rng as _ChaCha8RngAlias;
