//! Finite semigroup views: closure of a generating set, and the
//! left/right/two-sided reachability classes the forest builder steers by.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Binary associative product over `T`. Associativity is spot-tested at the
/// forest entry point rather than assumed.
pub trait Semigroup<T> {
    fn mul(&self, a: &T, b: &T) -> T;
}

impl<T, F: Fn(&T, &T) -> T> Semigroup<T> for F {
    fn mul(&self, a: &T, b: &T) -> T {
        self(a, b)
    }
}

/// Default cap on closure size; beyond it the build reports an error instead
/// of grinding on.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// The subsemigroup generated by a finite set, materialized element by
/// element, with product lookups by element index.
pub struct Closure<T> {
    pub elements: Vec<T>,
    index: HashMap<T, usize>,
    pub generators: Vec<usize>,
}

impl<T: Clone + Eq + Hash> Closure<T> {
    pub fn generate(gens: &[T], sg: &impl Semigroup<T>, cap: usize) -> Result<Closure<T>> {
        let mut elements: Vec<T> = Vec::new();
        let mut index: HashMap<T, usize> = HashMap::new();
        let mut generators = Vec::new();
        for g in gens {
            if !index.contains_key(g) {
                index.insert(g.clone(), elements.len());
                generators.push(elements.len());
                elements.push(g.clone());
            } else {
                generators.push(index[g]);
            }
        }
        generators.dedup();
        let mut frontier: Vec<usize> = (0..elements.len()).collect();
        while let Some(x) = frontier.pop() {
            for gi in 0..generators.len() {
                let g = generators[gi];
                let prod = sg.mul(&elements[x], &elements[g]);
                if !index.contains_key(&prod) {
                    if elements.len() >= cap {
                        return Err(Error::input(format!(
                            "generated subsemigroup exceeds the cap of {cap} elements"
                        )));
                    }
                    index.insert(prod.clone(), elements.len());
                    frontier.push(elements.len());
                    elements.push(prod);
                }
            }
        }
        Ok(Closure { elements, index, generators })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn id_of(&self, value: &T) -> Option<usize> {
        self.index.get(value).copied()
    }

    pub fn mul_ids(&self, a: usize, b: usize, sg: &impl Semigroup<T>) -> usize {
        let prod = sg.mul(&self.elements[a], &self.elements[b]);
        *self
            .index
            .get(&prod)
            .expect("closure is closed under products")
    }

    /// Class partitions by mutual reachability in the generator Cayley
    /// graphs: right steps for the right classes, left steps for the left
    /// classes, both for the two-sided classes.
    pub fn green_classes(&self, sg: &impl Semigroup<T>) -> GreenClasses {
        let n = self.len();
        let mut right_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut left_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut both_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            for &g in &self.generators {
                let r = self.mul_ids(x, g, sg);
                let l = self.mul_ids(g, x, sg);
                right_edges[x].push(r);
                left_edges[x].push(l);
                both_edges[x].push(r);
                both_edges[x].push(l);
            }
        }
        GreenClasses {
            right: scc_ids(&right_edges),
            left: scc_ids(&left_edges),
            two_sided: scc_ids(&both_edges),
        }
    }
}

/// Per-element class ids. Equal id means same class; ids carry no order.
pub struct GreenClasses {
    pub right: Vec<usize>,
    pub left: Vec<usize>,
    pub two_sided: Vec<usize>,
}

/// Iterative Tarjan strongly-connected components; returns a component id
/// per node.
fn scc_ids(edges: &[Vec<usize>]) -> Vec<usize> {
    let n = edges.len();
    let mut ids = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut num = vec![usize::MAX; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut counter = 0usize;
    let mut comp = 0usize;

    for start in 0..n {
        if num[start] != usize::MAX {
            continue;
        }
        // call stack entries: (node, next edge index)
        let mut calls: Vec<(usize, usize)> = vec![(start, 0)];
        num[start] = counter;
        low[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut ei)) = calls.last_mut() {
            if *ei < edges[v].len() {
                let w = edges[v][*ei];
                *ei += 1;
                if num[w] == usize::MAX {
                    num[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(num[w]);
                }
            } else {
                if low[v] == num[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        ids[w] = comp;
                        if w == v {
                            break;
                        }
                    }
                    comp += 1;
                }
                calls.pop();
                if let Some(&mut (u, _)) = calls.last_mut() {
                    low[u] = low[u].min(low[v]);
                }
            }
        }
    }
    ids
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Transformations of a 2-point set under composition: identity and the
    /// two constant maps.
    fn three_maps() -> (Vec<[u8; 2]>, impl Semigroup<[u8; 2]>) {
        let gens = vec![[0u8, 1u8], [0, 0], [1, 1]];
        let mul = |a: &[u8; 2], b: &[u8; 2]| [b[a[0] as usize], b[a[1] as usize]];
        (gens, mul)
    }

    #[test]
    fn closure_of_transformations() {
        let (gens, mul) = three_maps();
        let c = Closure::generate(&gens, &mul, 100).unwrap();
        assert_eq!(c.len(), 3);
        let id = c.id_of(&[0, 1]).unwrap();
        let c0 = c.id_of(&[0, 0]).unwrap();
        assert_eq!(c.mul_ids(id, c0, &mul), c0);
        assert_eq!(c.mul_ids(c0, id, &mul), c0);
    }

    #[test]
    fn green_classes_of_transformations() {
        let (gens, mul) = three_maps();
        let c = Closure::generate(&gens, &mul, 100).unwrap();
        let g = c.green_classes(&mul);
        let id = c.id_of(&[0, 1]).unwrap();
        let c0 = c.id_of(&[0, 0]).unwrap();
        let c1 = c.id_of(&[1, 1]).unwrap();
        // the two constants are left-reachable from each other (g·x reaches
        // them both) and form one two-sided class below the identity
        assert_eq!(g.two_sided[c0], g.two_sided[c1]);
        assert_ne!(g.two_sided[id], g.two_sided[c0]);
        // right multiplication by a constant leaves any starting point, so
        // the constants are right-equivalent too (c0·c1 = c1, c1·c0 = c0)
        assert_eq!(g.right[c0], g.right[c1]);
    }

    #[test]
    fn closure_cap_is_enforced() {
        // free-ish growth: concatenation capped at length 20 keeps growing
        let mul = |a: &Vec<u8>, b: &Vec<u8>| {
            let mut v = a.clone();
            v.extend(b);
            v.truncate(20);
            v
        };
        let gens = vec![vec![0u8], vec![1u8]];
        assert!(Closure::generate(&gens, &mul, 50).is_err());
    }
}
