//! Set partitions of `{1..n}` under reverse refinement, the permutation
//! action on them, and the non-crossing ones.
//!
//! Everything visible from outside is 1-based. A [`Partition`] is always
//! stored in canonical form (blocks sorted by minimum, elements ascending), so
//! derived equality and ordering are structural.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

/// Largest `n` accepted by [`enumerate_partitions`] (Bell(10) = 115975).
pub const MAX_PARTITION_N: usize = 10;

/// Largest `n` accepted by the Catalan-sized enumerations (NC(n), Luk(n),
/// P^(chi)(n)). C_12 = 208012.
pub const MAX_CATALAN_N: usize = 12;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition of `{1..n}` from arbitrary blocks, validating and
    /// canonicalizing them.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return invalid("partitions of the empty set are not supported (n must be >= 1)");
        }
        let mut seen = vec![false; n + 1];
        for block in &blocks {
            if block.is_empty() {
                return invalid("partition blocks must be non-empty");
            }
            for &x in block {
                if x == 0 || x > n {
                    return invalid(format!("element {x} outside 1..={n}"));
                }
                if seen[x] {
                    return invalid(format!("element {x} appears in more than one block"));
                }
                seen[x] = true;
            }
        }
        if let Some(missing) = (1..=n).find(|&x| !seen[x]) {
            return invalid(format!("element {missing} is not covered by any block"));
        }
        Ok(Self::canonical(n, blocks))
    }

    /// Canonicalizes blocks that are already known to partition `{1..n}`.
    pub(crate) fn canonical(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for block in &mut blocks {
            block.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Partition { n, blocks }
    }

    /// Builds a partition from a block label per element (`labels[m-1]` is the
    /// label of `m`). Labels are arbitrary.
    pub(crate) fn from_labels(labels: &[usize]) -> Self {
        let n = labels.len();
        let mut order: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (idx, &label) in labels.iter().enumerate() {
            match order.iter().position(|&l| l == label) {
                Some(b) => blocks[b].push(idx + 1),
                None => {
                    order.push(label);
                    blocks.push(vec![idx + 1]);
                }
            }
        }
        // First-occurrence order already sorts blocks by minimum.
        Partition { n, blocks }
    }

    /// `0_n`: all singletons.
    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, (1..=n).map(|m| vec![m]).collect())
    }

    /// `1_n`: a single block.
    pub fn one(n: usize) -> Result<Self> {
        Self::new(n, vec![(1..=n).collect()])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block index (into [`Partition::blocks`]) per element, 0-based by element.
    pub fn block_labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                labels[x - 1] = b;
            }
        }
        labels
    }

    /// The block containing `m`.
    pub fn block_of(&self, m: usize) -> Option<&[usize]> {
        self.blocks.iter().find(|b| b.contains(&m)).map(Vec::as_slice)
    }

    pub fn is_noncrossing(&self) -> bool {
        is_noncrossing(self)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (b, block) in self.blocks.iter().enumerate() {
            if b > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (k, x) in block.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(deserializer)?;
        let n = blocks.iter().map(Vec::len).sum();
        Partition::new(n, blocks).map_err(serde::de::Error::custom)
    }
}

/// A permutation of `{1..n}` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return invalid("permutations of the empty set are not supported");
        }
        let mut seen = vec![false; n + 1];
        for &m in &images {
            if m == 0 || m > n || seen[m] {
                return invalid(format!("{images:?} is not a permutation of 1..={n}"));
            }
            seen[m] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(images.clone()).is_ok());
        Permutation { images }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((1..=n).collect())
    }

    /// `tau_o`, the order-reversing permutation `m -> n+1-m`.
    pub fn reversal(n: usize) -> Result<Self> {
        Self::new((1..=n).rev().collect())
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of `m` (1-based).
    pub fn apply(&self, m: usize) -> usize {
        self.images[m - 1]
    }

    /// `self ∘ other`, i.e. `m -> self(other(m))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.n() != other.n() {
            return invalid(format!(
                "cannot compose permutations of sizes {} and {}",
                self.n(),
                other.n()
            ));
        }
        Ok(Permutation {
            images: other.images.iter().map(|&m| self.apply(m)).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (idx, &m) in self.images.iter().enumerate() {
            inv[m - 1] = idx + 1;
        }
        Permutation { images: inv }
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.images.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(deserializer)?;
        Permutation::new(images).map_err(serde::de::Error::custom)
    }
}

fn check_n(n: usize, limit: usize) -> Result<()> {
    if n == 0 || n > limit {
        return invalid(format!("n = {n} outside the supported range 1..={limit}"));
    }
    Ok(())
}

/// All partitions of `{1..n}`, sorted.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    check_n(n, MAX_PARTITION_N)?;
    // Restricted growth strings: labels[0] = 0, labels[k] <= 1 + max(labels[..k]).
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn rec(k: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if k == labels.len() {
            out.push(Partition::from_labels(labels));
            return;
        }
        for label in 0..=max + 1 {
            labels[k] = label;
            rec(k + 1, max.max(label), labels, out);
        }
    }
    if n == 1 {
        out.push(Partition::from_labels(&labels));
    } else {
        rec(1, 0, &mut labels, &mut out);
    }
    out.sort();
    Ok(out)
}

/// All non-crossing partitions of `{1..n}`, sorted.
///
/// Generated directly: the block of the smallest element `{a_1 < ... < a_k}`
/// splits the remaining elements into the gaps `(a_j, a_{j+1})` and the tail
/// after `a_k`, each filled independently with a non-crossing partition.
pub fn enumerate_noncrossing(n: usize) -> Result<Vec<Partition>> {
    check_n(n, MAX_CATALAN_N)?;
    let mut out: Vec<Partition> = nc_blocks(1, n)
        .into_iter()
        .map(|blocks| Partition::canonical(n, blocks))
        .collect();
    out.sort();
    Ok(out)
}

/// Non-crossing block systems on the interval `lo..=hi` (empty when `lo > hi`).
fn nc_blocks(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo > hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // Choose the rest of the block containing `lo` as a subset of (lo, hi].
    let rest: Vec<usize> = (lo + 1..=hi).collect();
    for mask in 0u32..(1u32 << rest.len()) {
        let mut block = vec![lo];
        block.extend(
            rest.iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &x)| x),
        );
        // Gaps between consecutive elements, plus the tail.
        let mut gaps: Vec<(usize, usize)> = block.windows(2).map(|w| (w[0] + 1, w[1] - 1)).collect();
        gaps.push((block[block.len() - 1] + 1, hi));
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for (a, b) in gaps {
            let fills = nc_blocks(a, b);
            partial = partial
                .iter()
                .flat_map(|p| {
                    fills.iter().map(move |f| {
                        let mut q = p.clone();
                        q.extend(f.iter().cloned());
                        q
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

pub fn is_noncrossing(p: &Partition) -> bool {
    let labels = p.block_labels();
    // A crossing exists iff, for two consecutive elements a < c of some block,
    // another block has elements both strictly inside (a, c) and outside [a, c].
    for (b, block) in p.blocks.iter().enumerate() {
        for w in block.windows(2) {
            let (a, c) = (w[0], w[1]);
            for inner in a + 1..c {
                let other = labels[inner - 1];
                if other == b {
                    continue;
                }
                if p.blocks[other].iter().any(|&x| x < a || x > c) {
                    return false;
                }
            }
        }
    }
    true
}

fn same_n(p: &Partition, q: &Partition) -> Result<()> {
    if p.n != q.n {
        return invalid(format!("partitions of different sets: n = {} vs {}", p.n, q.n));
    }
    Ok(())
}

/// Reverse refinement: every block of `p` lies inside a block of `q`.
pub fn leq(p: &Partition, q: &Partition) -> Result<bool> {
    same_n(p, q)?;
    let labels = q.block_labels();
    Ok(p
        .blocks
        .iter()
        .all(|block| block.iter().all(|&x| labels[x - 1] == labels[block[0] - 1])))
}

/// Greatest lower bound: the non-empty block intersections.
pub fn meet(p: &Partition, q: &Partition) -> Result<Partition> {
    same_n(p, q)?;
    let lp = p.block_labels();
    let lq = q.block_labels();
    let pairs: Vec<usize> = lp.iter().zip(&lq).map(|(a, b)| a * q.n + b).collect();
    Ok(Partition::from_labels(&pairs))
}

/// `t · p = { t(V) : V ∈ p }`.
pub fn act(t: &Permutation, p: &Partition) -> Result<Partition> {
    if t.n() != p.n {
        return invalid(format!(
            "permutation of size {} cannot act on a partition of size {}",
            t.n(),
            p.n
        ));
    }
    let blocks = p
        .blocks
        .iter()
        .map(|block| block.iter().map(|&x| t.apply(x)).collect())
        .collect();
    Ok(Partition::canonical(p.n, blocks))
}

/// The image of `p` under `m -> n+1-m`.
pub fn opposite(p: &Partition) -> Partition {
    let n = p.n;
    let blocks = p
        .blocks
        .iter()
        .map(|block| block.iter().map(|&x| n + 1 - x).collect())
        .collect();
    Partition::canonical(n, blocks)
}

/// Restriction of a tuple to the positions in `positions` (1-based, ascending).
pub fn restrict<T: Clone>(items: &[T], positions: &[usize]) -> Vec<T> {
    positions.iter().map(|&m| items[m - 1].clone()).collect()
}

/// The n-th Catalan number `(2n)! / (n! (n+1)!)`.
pub fn catalan(n: usize) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for k in 1..=n {
        num *= BigUint::from(n + k);
        den *= BigUint::from(k);
    }
    num / den / BigUint::from(n + 1)
}

/// The n-th Bell number, via the Bell triangle.
pub fn bell(n: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for _ in 1..n.max(1) {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().cloned().unwrap_or_else(BigUint::one));
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    if n == 0 {
        BigUint::one()
    } else {
        row.last().cloned().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(n: usize, blocks: &[&[usize]]) -> Partition {
        Partition::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    /// Oracle: the literal quadruple definition of a crossing.
    fn crosses_brute(part: &Partition) -> bool {
        let labels = part.block_labels();
        let n = part.n();
        for a in 1..=n {
            for b in a + 1..=n {
                for c in b + 1..=n {
                    for d in c + 1..=n {
                        let (la, lb, lc, ld) = (labels[a - 1], labels[b - 1], labels[c - 1], labels[d - 1]);
                        if la == lc && lb == ld && la != lb {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_partitions(1).unwrap(), vec![p(1, &[&[1]])]);
        assert_eq!(enumerate_partitions(3).unwrap().len(), 5);
        assert_eq!(enumerate_partitions(4).unwrap().len(), 15);
        assert_eq!(enumerate_noncrossing(4).unwrap().len(), 14);
        assert_eq!(enumerate_noncrossing(3).unwrap(), enumerate_partitions(3).unwrap());
        for n in 1..=8 {
            assert_eq!(BigUint::from(enumerate_partitions(n).unwrap().len()), bell(n), "n={n}");
        }
    }

    #[test]
    fn noncrossing_matches_filter_and_catalan() {
        for n in 1..=8 {
            let nc = enumerate_noncrossing(n).unwrap();
            assert_eq!(BigUint::from(nc.len()), catalan(n));
            let filtered: Vec<_> = enumerate_partitions(n)
                .unwrap()
                .into_iter()
                .filter(|q| !crosses_brute(q))
                .collect();
            assert_eq!(nc, filtered, "n={n}");
        }
        assert_eq!(enumerate_noncrossing(5).unwrap().len(), 42);
    }

    #[test]
    fn catalan_and_bell_values() {
        let cat: Vec<u64> = (0..=8).map(|n| catalan(n).try_into().unwrap()).collect();
        assert_eq!(cat, vec![1, 1, 2, 5, 14, 42, 132, 429, 1430]);
        let bells: Vec<u64> = (0..=7).map(|n| bell(n).try_into().unwrap()).collect();
        assert_eq!(bells, vec![1, 1, 2, 5, 15, 52, 203, 877]);
    }

    #[test]
    fn out_of_range_n_is_rejected() {
        assert!(enumerate_partitions(0).is_err());
        assert!(enumerate_partitions(MAX_PARTITION_N + 1).is_err());
        assert!(enumerate_noncrossing(0).is_err());
    }

    #[test]
    fn construction_validates_and_canonicalizes() {
        let q = Partition::new(5, vec![vec![5, 3], vec![4, 1, 2]]).unwrap();
        assert_eq!(q.blocks(), &[vec![1, 2, 4], vec![3, 5]]);
        assert!(Partition::new(0, vec![]).is_err());
        assert!(Partition::new(3, vec![vec![1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![1, 2], vec![2, 3]]).is_err());
        assert!(Partition::new(3, vec![vec![1, 2, 3], vec![]]).is_err());
        assert!(Partition::new(2, vec![vec![1, 3]]).is_err());
    }

    #[test]
    fn noncrossing_examples() {
        assert!(!is_noncrossing(&p(4, &[&[1, 3], &[2, 4]])));
        assert!(is_noncrossing(&p(5, &[&[1, 2, 5], &[3, 4]])));
        assert!(is_noncrossing(&Partition::one(6).unwrap()));
        // {1,2,4},{3,5}: 2 < 3 < 4 < 5 crosses.
        assert!(!is_noncrossing(&p(5, &[&[1, 2, 4], &[3, 5]])));
    }

    #[test]
    fn noncrossing_agrees_with_quadruple_scan() {
        for n in 1..=7 {
            for q in enumerate_partitions(n).unwrap() {
                assert_eq!(is_noncrossing(&q), !crosses_brute(&q), "{q}");
            }
        }
    }

    #[test]
    fn leq_examples_and_errors() {
        let zero = Partition::zero(3).unwrap();
        let one = Partition::one(3).unwrap();
        for q in enumerate_partitions(3).unwrap() {
            assert!(leq(&zero, &q).unwrap());
            assert!(leq(&q, &one).unwrap());
        }
        assert!(!leq(&p(3, &[&[1, 2], &[3]]), &p(3, &[&[1, 3], &[2]])).unwrap());
        assert!(leq(&zero, &Partition::zero(4).unwrap()).is_err());
    }

    #[test]
    fn refinement_is_a_partial_order() {
        for n in 1..=5 {
            let all = enumerate_partitions(n).unwrap();
            for a in &all {
                assert!(leq(a, a).unwrap());
                for b in &all {
                    let ab = leq(a, b).unwrap();
                    if ab && leq(b, a).unwrap() {
                        assert_eq!(a, b);
                    }
                    if ab {
                        for c in &all {
                            if leq(b, c).unwrap() {
                                assert!(leq(a, c).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn meet_examples() {
        let a = p(5, &[&[1, 2, 4], &[3, 5]]);
        let b = p(5, &[&[1, 2, 3], &[4, 5]]);
        assert_eq!(meet(&a, &b).unwrap(), p(5, &[&[1, 2], &[3], &[4], &[5]]));
        assert_eq!(meet(&a, &Partition::one(5).unwrap()).unwrap(), a);
        assert_eq!(meet(&a, &a).unwrap(), a);
        assert!(meet(&a, &Partition::one(4).unwrap()).is_err());
    }

    #[test]
    fn meet_is_the_greatest_lower_bound() {
        for n in 1..=5 {
            let all = enumerate_partitions(n).unwrap();
            for x in &all {
                for y in &all {
                    let m = meet(x, y).unwrap();
                    assert_eq!(m, meet(y, x).unwrap());
                    assert!(leq(&m, x).unwrap() && leq(&m, y).unwrap());
                    for r in &all {
                        if leq(r, x).unwrap() && leq(r, y).unwrap() {
                            assert!(leq(r, &m).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn action_examples() {
        let q = p(5, &[&[1, 4, 5], &[2, 3]]);
        assert_eq!(act(&Permutation::identity(5).unwrap(), &q).unwrap(), q);
        let sigma = Permutation::new(vec![2, 3, 5, 4, 1]).unwrap();
        assert_eq!(act(&sigma, &q).unwrap(), p(5, &[&[1, 2, 4], &[3, 5]]));
        let tau_o = Permutation::reversal(3).unwrap();
        assert_eq!(act(&tau_o, &p(3, &[&[1, 2], &[3]])).unwrap(), p(3, &[&[1], &[2, 3]]));
        assert!(act(&tau_o, &q).is_err());
    }

    #[test]
    fn action_is_a_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=7 {
            let all = enumerate_partitions(n).unwrap();
            for _ in 0..40 {
                let mut s: Vec<usize> = (1..=n).collect();
                let mut t: Vec<usize> = (1..=n).collect();
                s.shuffle(&mut rng);
                t.shuffle(&mut rng);
                let s = Permutation::new(s).unwrap();
                let t = Permutation::new(t).unwrap();
                let q = all.choose(&mut rng).unwrap();
                let lhs = act(&s, &act(&t, q).unwrap()).unwrap();
                let rhs = act(&s.compose(&t).unwrap(), q).unwrap();
                assert_eq!(lhs, rhs);
                assert_eq!(act(&t.inverse(), &act(&t, q).unwrap()).unwrap(), *q);
            }
        }
    }

    #[test]
    fn opposite_examples() {
        let one = Partition::one(4).unwrap();
        assert_eq!(opposite(&one), one);
        let a = p(5, &[&[1, 2, 4], &[3, 5]]);
        assert_eq!(opposite(&a), p(5, &[&[2, 4, 5], &[1, 3]]));
        assert_eq!(opposite(&opposite(&a)), a);
        assert_eq!(opposite(&a), act(&Permutation::reversal(5).unwrap(), &a).unwrap());
    }

    #[test]
    fn opposite_preserves_noncrossing() {
        for n in 1..=6 {
            for q in enumerate_partitions(n).unwrap() {
                assert_eq!(is_noncrossing(&q), is_noncrossing(&opposite(&q)));
            }
        }
    }

    #[test]
    fn json_shapes() {
        let a = p(5, &[&[1, 2, 4], &[3, 5]]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[[1,2,4],[3,5]]");
        let back: Partition = serde_json::from_str("[[3,5],[4,2,1]]").unwrap();
        assert_eq!(back, a);
        let sigma = Permutation::new(vec![2, 3, 5, 4, 1]).unwrap();
        assert_eq!(serde_json::to_string(&sigma).unwrap(), "[2,3,5,4,1]");
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
    }
}
