//! Factorization forests: bounded-depth recursive factorizations of a
//! sequence over a finite semigroup, with binary nodes and idempotent nodes
//! whose children all share one idempotent image.
//!
//! The builder is deterministic and guarantees a depth linear in the size of
//! the subsemigroup generated by the input images (reported as `bound`),
//! independent of the sequence length. It descends through the two-sided
//! reachability classes of that subsemigroup: a greedy pass splits the word
//! into maximal pieces whose products avoid the bottom class, pieces are
//! paired so that every pairwise product lands in the bottom class, and
//! within the bottom class cuts are keyed by (prefix product, right class of
//! the next letter) — cuts sharing a key bound equal idempotent infixes,
//! which become idempotent nodes.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::semigroup::{Closure, GreenClasses, Semigroup, DEFAULT_CLOSURE_CAP};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForestNode {
    /// 0-based position into the input sequence.
    Leaf(usize),
    Binary(Box<ForestNode>, Box<ForestNode>),
    Idempotent(Vec<ForestNode>),
}

impl ForestNode {
    pub fn depth(&self) -> usize {
        match self {
            ForestNode::Leaf(_) => 1,
            ForestNode::Binary(l, r) => 1 + l.depth().max(r.depth()),
            ForestNode::Idempotent(cs) => 1 + cs.iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }

    fn leaves_in_order(&self, out: &mut Vec<usize>) {
        match self {
            ForestNode::Leaf(p) => out.push(*p),
            ForestNode::Binary(l, r) => {
                l.leaves_in_order(out);
                r.leaves_in_order(out);
            }
            ForestNode::Idempotent(cs) => {
                for c in cs {
                    c.leaves_in_order(out);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ForestBuild {
    pub root: ForestNode,
    pub depth: usize,
    /// Guaranteed depth bound for this input: 5 times the generated
    /// subsemigroup size.
    pub bound: usize,
    pub subsemigroup_size: usize,
}

struct Builder<'a, T, S: Semigroup<T>> {
    sg: &'a S,
    closure: Closure<T>,
    greens: GreenClasses,
    /// image element id per input position
    pos_elem: Vec<usize>,
    mul_memo: HashMap<(usize, usize), usize>,
}

impl<'a, T: Clone + Eq + Hash, S: Semigroup<T>> Builder<'a, T, S> {
    fn mul(&mut self, a: usize, b: usize) -> usize {
        if let Some(&m) = self.mul_memo.get(&(a, b)) {
            return m;
        }
        let m = self.closure.mul_ids(a, b, self.sg);
        self.mul_memo.insert((a, b), m);
        m
    }

    fn product_of(&mut self, range: std::ops::Range<usize>) -> usize {
        let mut acc = self.pos_elem[range.start];
        for p in range.start + 1..range.end {
            acc = self.mul(acc, self.pos_elem[p]);
        }
        acc
    }

    fn is_idempotent(&mut self, e: usize) -> bool {
        self.mul(e, e) == e
    }

    fn build(&mut self, lo: usize, hi: usize) -> ForestNode {
        let n = hi - lo;
        debug_assert!(n >= 1);
        if n == 1 {
            return ForestNode::Leaf(lo);
        }
        let first = self.pos_elem[lo];
        if (lo..hi).all(|p| self.pos_elem[p] == first) && self.is_idempotent(first) {
            return ForestNode::Idempotent((lo..hi).map(ForestNode::Leaf).collect());
        }
        if n == 2 {
            return ForestNode::Binary(
                Box::new(ForestNode::Leaf(lo)),
                Box::new(ForestNode::Leaf(lo + 1)),
            );
        }

        // greedy split into maximal pieces whose product avoids the class of
        // the total product, interleaved with single letters already in it
        let total = self.product_of(lo..hi);
        let bottom = self.greens.two_sided[total];
        let mut pieces: Vec<(usize, usize, usize)> = Vec::new(); // (lo, hi, product id)
        let mut t = lo;
        while t < hi {
            let mut prod = self.pos_elem[t];
            let mut end = t + 1;
            if self.greens.two_sided[prod] != bottom {
                while end < hi {
                    let next = self.mul(prod, self.pos_elem[end]);
                    if self.greens.two_sided[next] == bottom {
                        break;
                    }
                    prod = next;
                    end += 1;
                }
            }
            pieces.push((t, end, prod));
            t = end;
        }
        debug_assert!(pieces.len() >= 2, "whole word cannot avoid its own product class");
        if pieces.len() == 1 {
            // defensive fallback; not reachable when class data is sound
            let mid = lo + n / 2;
            return ForestNode::Binary(
                Box::new(self.build(lo, mid)),
                Box::new(self.build(mid, hi)),
            );
        }
        if pieces.len() == 2 {
            return ForestNode::Binary(
                Box::new(self.build(pieces[0].0, pieces[0].1)),
                Box::new(self.build(pieces[1].0, pieces[1].1)),
            );
        }

        // pair consecutive pieces; every pairwise product now lies in the
        // bottom class, so the paired word lives inside a single class
        let paired = pieces.len() / 2;
        let leftover = if pieces.len() % 2 == 1 { pieces.last().copied() } else { None };
        let mut item_prod = Vec::with_capacity(paired);
        let mut item_range = Vec::with_capacity(paired);
        for i in 0..paired {
            let (alo, _, ap) = pieces[2 * i];
            let (_, bhi, bp) = pieces[2 * i + 1];
            item_prod.push(self.mul(ap, bp));
            item_range.push((pieces[2 * i], pieces[2 * i + 1], alo, bhi));
        }
        let mut pref = Vec::with_capacity(paired);
        let mut acc = item_prod[0];
        pref.push(acc);
        for &p in &item_prod[1..] {
            acc = self.mul(acc, p);
            pref.push(acc);
        }

        let core = self.single_class(0, paired, &item_prod, &pref, &item_range);
        match leftover {
            None => core,
            Some((llo, lhi, _)) => {
                ForestNode::Binary(Box::new(core), Box::new(self.build(llo, lhi)))
            }
        }
    }

    /// Expands super-item `j` into a binary node over its two pieces.
    fn expand_item(
        &mut self,
        j: usize,
        item_range: &[((usize, usize, usize), (usize, usize, usize), usize, usize)],
    ) -> ForestNode {
        let ((alo, ahi, _), (blo, bhi, _), _, _) = item_range[j];
        ForestNode::Binary(Box::new(self.build(alo, ahi)), Box::new(self.build(blo, bhi)))
    }

    /// Factorizes a run of super-items all of whose infix products share one
    /// two-sided class. Cuts are keyed by (prefix product, right class of the
    /// next item); equal keys bound equal idempotent infixes.
    fn single_class(
        &mut self,
        a: usize,
        b: usize,
        item_prod: &[usize],
        pref: &[usize],
        item_range: &[((usize, usize, usize), (usize, usize, usize), usize, usize)],
    ) -> ForestNode {
        let n = b - a;
        debug_assert!(n >= 1);
        if n == 1 {
            return self.expand_item(a, item_range);
        }
        let first = item_prod[a];
        if (a..b).all(|j| item_prod[j] == first) && self.is_idempotent(first) {
            let children = (a..b).map(|j| self.expand_item(j, item_range)).collect();
            return ForestNode::Idempotent(children);
        }
        if n == 2 {
            return ForestNode::Binary(
                Box::new(self.expand_item(a, item_range)),
                Box::new(self.expand_item(a + 1, item_range)),
            );
        }

        // most frequent key wins; ties break to the smallest key
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for t in a..b - 1 {
            let key = (pref[t], self.greens.right[item_prod[t + 1]]);
            *counts.entry(key).or_default() += 1;
        }
        let kappa = *counts
            .iter()
            .max_by(|(k1, c1), (k2, c2)| c1.cmp(c2).then(k2.cmp(k1)))
            .map(|(k, _)| k)
            .expect("at least one cut");
        let cuts: Vec<usize> = (a..b - 1)
            .filter(|&t| (pref[t], self.greens.right[item_prod[t + 1]]) == kappa)
            .collect();
        debug_assert!(!cuts.is_empty());

        let head = self.single_class(a, cuts[0] + 1, item_prod, pref, item_range);
        let tail = self.single_class(cuts[cuts.len() - 1] + 1, b, item_prod, pref, item_range);
        let middle: Vec<ForestNode> = cuts
            .windows(2)
            .map(|w| self.single_class(w[0] + 1, w[1] + 1, item_prod, pref, item_range))
            .collect();
        let combined = match middle.len() {
            0 => tail,
            1 => {
                let m = middle.into_iter().next().unwrap();
                ForestNode::Binary(Box::new(m), Box::new(tail))
            }
            _ => ForestNode::Binary(
                Box::new(ForestNode::Idempotent(middle)),
                Box::new(tail),
            ),
        };
        ForestNode::Binary(Box::new(head), Box::new(combined))
    }
}

/// Builds a factorization forest over `images`. The product is spot-tested
/// for associativity; the generated subsemigroup is materialized up to a cap.
pub fn build_forest<T: Clone + Eq + Hash>(
    images: &[T],
    sg: &impl Semigroup<T>,
) -> Result<ForestBuild> {
    build_forest_capped(images, sg, DEFAULT_CLOSURE_CAP)
}

pub fn build_forest_capped<T: Clone + Eq + Hash>(
    images: &[T],
    sg: &impl Semigroup<T>,
    cap: usize,
) -> Result<ForestBuild> {
    if images.is_empty() {
        return Err(Error::input("cannot factorize an empty sequence"));
    }
    // associativity spot test over a few image triples
    let m = images.len().min(5);
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                let ab_c = sg.mul(&sg.mul(&images[i], &images[j]), &images[l]);
                let a_bc = sg.mul(&images[i], &sg.mul(&images[j], &images[l]));
                if ab_c != a_bc {
                    return Err(Error::input("product is not associative".to_string()));
                }
            }
        }
    }
    let closure = Closure::generate(images, sg, cap)?;
    let greens = closure.green_classes(sg);
    let pos_elem: Vec<usize> = images
        .iter()
        .map(|t| closure.id_of(t).expect("images are generators"))
        .collect();
    let subsemigroup_size = closure.len();
    let mut builder = Builder { sg, closure, greens, pos_elem, mul_memo: HashMap::new() };
    let root = builder.build(0, images.len());
    let depth = root.depth();
    Ok(ForestBuild { root, depth, bound: 5 * subsemigroup_size, subsemigroup_size })
}

/// Structural check: in-order leaves are `0..n` exactly once, binary images
/// multiply, idempotent nodes have at least two children with one shared
/// idempotent image. On violation returns a path of child indices from the
/// root and a message.
pub fn verify_forest<T: Clone + Eq>(
    root: &ForestNode,
    images: &[T],
    sg: &impl Semigroup<T>,
) -> std::result::Result<(), String> {
    let mut leaves = Vec::new();
    root.leaves_in_order(&mut leaves);
    if leaves != (0..images.len()).collect::<Vec<_>>() {
        return Err("leaves are not 0..n in order".to_string());
    }

    fn image_of<T: Clone + Eq>(
        node: &ForestNode,
        images: &[T],
        sg: &impl Semigroup<T>,
        path: &mut Vec<usize>,
    ) -> std::result::Result<T, String> {
        match node {
            ForestNode::Leaf(p) => Ok(images[*p].clone()),
            ForestNode::Binary(l, r) => {
                path.push(0);
                let li = image_of(l, images, sg, path)?;
                path.pop();
                path.push(1);
                let ri = image_of(r, images, sg, path)?;
                path.pop();
                Ok(sg.mul(&li, &ri))
            }
            ForestNode::Idempotent(cs) => {
                if cs.len() < 2 {
                    return Err(format!("idempotent node at {path:?} has {} children", cs.len()));
                }
                let mut imgs = Vec::with_capacity(cs.len());
                for (i, c) in cs.iter().enumerate() {
                    path.push(i);
                    imgs.push(image_of(c, images, sg, path)?);
                    path.pop();
                }
                let e = imgs[0].clone();
                if imgs.iter().any(|x| *x != e) {
                    return Err(format!("idempotent node at {path:?} has unequal child images"));
                }
                if sg.mul(&e, &e) != e {
                    return Err(format!("idempotent node at {path:?} has a non-idempotent image"));
                }
                Ok(e)
            }
        }
    }

    let mut path = Vec::new();
    image_of(root, images, sg, &mut path).map(|_| ())
}

/// Root image: the product of the whole sequence, recomputed through the tree.
pub fn root_image<T: Clone + Eq>(
    root: &ForestNode,
    images: &[T],
    sg: &impl Semigroup<T>,
) -> T {
    match root {
        ForestNode::Leaf(p) => images[*p].clone(),
        ForestNode::Binary(l, r) => sg.mul(
            &root_image(l, images, sg),
            &root_image(r, images, sg),
        ),
        ForestNode::Idempotent(cs) => {
            let mut acc = root_image(&cs[0], images, sg);
            for c in &cs[1..] {
                let x = root_image(c, images, sg);
                acc = sg.mul(&acc, &x);
            }
            acc
        }
    }
}

/// Indented dump: `L <pos>` (1-based), `B`, `I <image-hash>`.
pub fn dump_forest<T>(
    root: &ForestNode,
    images: &[T],
    hash_of: &impl Fn(&T) -> u64,
    sg: &impl Semigroup<T>,
) -> String
where
    T: Clone + Eq,
{
    let mut out = String::new();
    fn rec<T: Clone + Eq>(
        node: &ForestNode,
        depth: usize,
        out: &mut String,
        images: &[T],
        hash_of: &impl Fn(&T) -> u64,
        sg: &impl Semigroup<T>,
    ) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        match node {
            ForestNode::Leaf(p) => {
                let _ = writeln!(out, "L {}", p + 1);
            }
            ForestNode::Binary(l, r) => {
                out.push_str("B\n");
                rec(l, depth + 1, out, images, hash_of, sg);
                rec(r, depth + 1, out, images, hash_of, sg);
            }
            ForestNode::Idempotent(cs) => {
                let img = root_image(&cs[0], images, sg);
                let _ = writeln!(out, "I {:016x}", hash_of(&img));
                for c in cs {
                    rec(c, depth + 1, out, images, hash_of, sg);
                }
            }
        }
    }
    rec(root, 0, &mut out, images, hash_of, sg);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    type Map2 = [u8; 2];
    type Map2Mul = fn(&Map2, &Map2) -> Map2;

    /// Composition of maps on two points; three elements, all idempotent.
    fn maps2() -> (Vec<Map2>, Map2Mul) {
        let gens = vec![[0u8, 1u8], [0, 0], [1, 1]];
        fn mul(a: &Map2, b: &Map2) -> Map2 {
            [b[a[0] as usize], b[a[1] as usize]]
        }
        (gens, mul)
    }

    /// Exponential-time minimal-depth oracle over all factorizations.
    fn min_rank<T: Clone + Eq + Hash>(images: &[T], sg: &impl Semigroup<T>) -> usize {
        fn product<T: Clone>(images: &[T], sg: &impl Semigroup<T>) -> T {
            let mut acc = images[0].clone();
            for x in &images[1..] {
                acc = sg.mul(&acc, x);
            }
            acc
        }
        fn go<T: Clone + Eq + Hash>(
            images: &[T],
            sg: &impl Semigroup<T>,
            memo: &mut HashMap<Vec<usize>, usize>,
            ids: &[usize],
        ) -> usize {
            if ids.len() == 1 {
                return 1;
            }
            if let Some(&r) = memo.get(&ids.to_vec()) {
                return r;
            }
            let n = ids.len();
            let mut best = usize::MAX;
            // binary splits
            for m in 1..n {
                let l = go(images, sg, memo, &ids[..m]);
                let r = go(images, sg, memo, &ids[m..]);
                best = best.min(1 + l.max(r));
            }
            // idempotent multi-splits: enumerate all compositions via bitmask
            for mask in 0u32..(1 << (n - 1)) {
                if mask.count_ones() < 1 {
                    continue; // need >= 2 parts
                }
                let mut parts: Vec<&[usize]> = Vec::new();
                let mut start = 0;
                for cut in 0..n - 1 {
                    if mask >> cut & 1 == 1 {
                        parts.push(&ids[start..cut + 1]);
                        start = cut + 1;
                    }
                }
                parts.push(&ids[start..]);
                let vals: Vec<T> = parts
                    .iter()
                    .map(|p| {
                        let xs: Vec<T> = p.iter().map(|&i| images[i].clone()).collect();
                        product(&xs, sg)
                    })
                    .collect();
                let e = vals[0].clone();
                if vals.iter().any(|v| *v != e) || sg.mul(&e, &e) != e {
                    continue;
                }
                let depths: Vec<usize> = parts.iter().map(|p| go(images, sg, memo, p)).collect();
                best = best.min(1 + depths.into_iter().max().unwrap());
            }
            memo.insert(ids.to_vec(), best);
            best
        }
        let ids: Vec<usize> = (0..images.len()).collect();
        let mut memo = HashMap::new();
        go(images, sg, &mut memo, &ids)
    }

    #[test]
    fn length_one_is_a_leaf_of_depth_one() {
        let (gens, mul) = maps2();
        let b = build_forest(&gens[..1], &mul).unwrap();
        assert_eq!(b.root, ForestNode::Leaf(0));
        assert_eq!(b.depth, 1);
    }

    #[test]
    fn constant_idempotent_sequence_is_one_wide_node() {
        let (_, mul) = maps2();
        let seq = vec![[0u8, 0u8]; 17];
        let b = build_forest(&seq, &mul).unwrap();
        assert_eq!(b.depth, 2);
        assert!(matches!(b.root, ForestNode::Idempotent(ref cs) if cs.len() == 17));
        verify_forest(&b.root, &seq, &mul).unwrap();
    }

    #[test]
    fn equal_idempotent_pair_prefers_idempotent_node() {
        let (_, mul) = maps2();
        let seq = vec![[0u8, 0u8]; 2];
        let b = build_forest(&seq, &mul).unwrap();
        assert!(matches!(b.root, ForestNode::Idempotent(_)));
    }

    #[test]
    fn all_short_words_meet_oracle_and_bound() {
        let (gens, mul) = maps2();
        for n in 1..=8usize {
            let mut counters = vec![0usize; n];
            loop {
                let seq: Vec<[u8; 2]> = counters.iter().map(|&c| gens[c]).collect();
                let b = build_forest(&seq, &mul).unwrap();
                verify_forest(&b.root, &seq, &mul).unwrap();
                let oracle = min_rank(&seq, &mul);
                assert!(b.depth >= oracle, "depth below the optimum is impossible");
                assert!(b.depth <= b.bound, "depth {} exceeds bound {}", b.depth, b.bound);
                // advance the odometer
                let mut i = 0;
                loop {
                    if i == n {
                        break;
                    }
                    counters[i] += 1;
                    if counters[i] < gens.len() {
                        break;
                    }
                    counters[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
    }

    #[test]
    fn depth_plateaus_as_length_grows() {
        let (gens, mul) = maps2();
        let mut rng = crate::gen::rng_for(42, 0);
        let max_depth_at = |n: usize, rng: &mut rand_chacha::ChaCha8Rng| -> usize {
            (0..20)
                .map(|_| {
                    let seq: Vec<[u8; 2]> =
                        (0..n).map(|_| gens[rng.gen_range(0..gens.len())]).collect();
                    let b = build_forest(&seq, &mul).unwrap();
                    verify_forest(&b.root, &seq, &mul).unwrap();
                    b.depth
                })
                .max()
                .unwrap()
        };
        let d_small = max_depth_at(64, &mut rng);
        let d_large = max_depth_at(640, &mut rng);
        let bound = build_forest(&gens, &mul).unwrap().bound;
        assert!(d_large <= bound);
        assert!(d_large <= d_small, "depth grew from {d_small} to {d_large}");
    }

    #[test]
    fn root_image_is_total_product() {
        let (gens, mul) = maps2();
        let mut rng = crate::gen::rng_for(7, 0);
        for _ in 0..50 {
            let n = rng.gen_range(1..40);
            let seq: Vec<[u8; 2]> = (0..n).map(|_| gens[rng.gen_range(0..3)]).collect();
            let b = build_forest(&seq, &mul).unwrap();
            let mut acc = seq[0];
            for x in &seq[1..] {
                acc = mul(&acc, x);
            }
            assert_eq!(root_image(&b.root, &seq, &mul), acc);
        }
    }

    #[test]
    fn verify_rejects_swapped_leaves_and_bad_idempotents() {
        let (gens, mul) = maps2();
        let seq = vec![gens[0], gens[1], gens[2]];
        let b = build_forest(&seq, &mul).unwrap();
        verify_forest(&b.root, &seq, &mul).unwrap();

        // swap two leaves
        let bad = ForestNode::Binary(
            Box::new(ForestNode::Leaf(1)),
            Box::new(ForestNode::Binary(
                Box::new(ForestNode::Leaf(0)),
                Box::new(ForestNode::Leaf(2)),
            )),
        );
        assert!(verify_forest(&bad, &seq, &mul).is_err());

        // idempotent node over unequal images
        let bad = ForestNode::Idempotent(vec![
            ForestNode::Leaf(0),
            ForestNode::Leaf(1),
            ForestNode::Leaf(2),
        ]);
        assert!(verify_forest(&bad, &seq, &mul).is_err());

        // idempotent node with a non-idempotent image: a 2-cycle
        let swap = [1u8, 0u8];
        let seq2 = vec![swap, swap];
        let bad = ForestNode::Idempotent(vec![ForestNode::Leaf(0), ForestNode::Leaf(1)]);
        assert!(verify_forest(&bad, &seq2, &mul).is_err());
    }

    #[test]
    fn swap_only_sequences_still_factorize() {
        // the 2-cycle generates a group of order 2 with no idempotent letter
        fn mul(a: &[u8; 2], b: &[u8; 2]) -> [u8; 2] {
            [b[a[0] as usize], b[a[1] as usize]]
        }
        let swap = [1u8, 0u8];
        for n in 1..=40usize {
            let seq = vec![swap; n];
            let b = build_forest(&seq, &(mul as fn(&[u8; 2], &[u8; 2]) -> [u8; 2])).unwrap();
            verify_forest(&b.root, &seq, &mul).unwrap();
            assert!(b.depth <= b.bound);
        }
    }

    #[test]
    fn empty_sequence_is_error() {
        let (_, mul) = maps2();
        assert!(build_forest::<[u8; 2]>(&[], &mul).is_err());
    }

    #[test]
    fn non_associative_product_is_rejected() {
        let mul = |a: &i64, b: &i64| a - b;
        assert!(build_forest(&[3i64, 1, 4], &mul).is_err());
    }

    #[test]
    fn dump_contains_leaf_lines() {
        let (gens, mul) = maps2();
        let seq = vec![gens[1]; 3];
        let b = build_forest(&seq, &mul).unwrap();
        let dump = dump_forest(&b.root, &seq, &|x: &[u8; 2]| x[0] as u64 * 7 + x[1] as u64, &mul);
        assert!(dump.contains("L 1"));
        assert!(dump.contains("L 3"));
        assert!(dump.lines().next().unwrap().starts_with('I'));
    }
}
