//! Seeded random elements.
//!
//! The generator is ChaCha8 seeded from the 64-bit seed. A tree with `size`
//! leaves is grown from a single leaf by `size - 1` splits; each split picks
//! a leaf uniformly and a caret with probability one half. The domain tree is
//! drawn before the range tree, then the shift (uniform in `0..size`, or zero
//! for `F_tau`), then for lifts the integer part (uniform in `-1..=1`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::{c_from_subdivision_pair, interval_map_from_trees, Caret, SubdivisionTree};
use crate::element::Element;
use crate::lift::l_lift;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RandomFlavor {
    Ftau,
    Ttau,
    Lift,
}

impl std::str::FromStr for RandomFlavor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "f_tau" | "ftau" | "f" => Ok(RandomFlavor::Ftau),
            "t_tau" | "ttau" | "t" => Ok(RandomFlavor::Ttau),
            "lift" => Ok(RandomFlavor::Lift),
            other => Err(format!("unknown flavor {other:?} (F_tau, T_tau or lift)")),
        }
    }
}

pub fn random_tree<R: Rng>(rng: &mut R, size: usize) -> SubdivisionTree {
    let mut tree = SubdivisionTree::Leaf;
    for leaves in 1..size.max(1) {
        let i = rng.gen_range(0..leaves);
        let caret = if rng.gen::<bool>() {
            Caret::Plus
        } else {
            Caret::Minus
        };
        split_leaf(&mut tree, i, caret);
    }
    tree
}

fn split_leaf(tree: &mut SubdivisionTree, i: usize, caret: Caret) {
    match tree {
        SubdivisionTree::Leaf => {
            *tree = SubdivisionTree::split(caret, SubdivisionTree::Leaf, SubdivisionTree::Leaf);
        }
        SubdivisionTree::Split(_, l, r) => {
            let n = l.leaf_count();
            if i < n {
                split_leaf(l, i, caret);
            } else {
                split_leaf(r, i - n, caret);
            }
        }
    }
}

/// Deterministic in `(seed, size, flavor)`. A `size` of zero is treated as one.
pub fn random_element(seed: u64, size: usize, flavor: RandomFlavor) -> Element {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_element_with(&mut rng, size, flavor)
}

pub fn random_element_with<R: Rng>(rng: &mut R, size: usize, flavor: RandomFlavor) -> Element {
    let size = size.max(1);
    let p = random_tree(rng, size);
    let q = random_tree(rng, size);
    if flavor == RandomFlavor::Ftau {
        return Element::Interval(interval_map_from_trees(&p, &q).expect("equal leaf counts"));
    }
    let shift = rng.gen_range(0..size) as i64;
    let g = c_from_subdivision_pair(&p, &q, shift).expect("valid tree pair");
    match flavor {
        RandomFlavor::Lift => Element::Lift(l_lift(&g, rng.gen_range(-1i64..=1))),
        _ => Element::Circle(g),
    }
}
