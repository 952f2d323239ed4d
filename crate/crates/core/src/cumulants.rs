//! `(l,r)`-cumulants of an abstract moment functional.
//!
//! `κ_chi(a_1..a_n) = φ(a_1⋯a_n) − Σ_{π ∈ P^(chi)(n), π ≠ 1_n} Π_{V ∈ π} κ_{chi|V}(a|V)`
//! with `κ_(l) = κ_(r) = φ`. Elements are opaque identifiers; the recursion is
//! generic over the scalar ring so rational and symbolic evaluations share a
//! single code path.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use dashmap::DashMap;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::deque::{pchi_by_enumeration, ChiWord, Side};
use crate::error::{invalid, Error, Result};
use crate::exec::{self, Execution};
use crate::partitions::{restrict, Partition};
use crate::scalar::{rational, Scalar};

/// `φ` on words of element identifiers.
pub trait MomentFunctional: Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;
    type Scalar: Scalar;

    /// `φ(a_1 ⋯ a_n)` for a non-empty word.
    fn moment(&self, word: &[Self::Elem]) -> Self::Scalar;
}

impl<F: MomentFunctional> MomentFunctional for &F {
    type Elem = F::Elem;
    type Scalar = F::Scalar;

    fn moment(&self, word: &[Self::Elem]) -> Self::Scalar {
        (**self).moment(word)
    }
}

/// Memoized `chi -> P^(chi)(n)`.
#[derive(Default)]
pub struct PchiCache {
    sets: DashMap<ChiWord, Arc<Vec<Partition>>>,
}

impl PchiCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, chi: &ChiWord) -> Result<Arc<Vec<Partition>>> {
        if let Some(hit) = self.sets.get(chi) {
            return Ok(Arc::clone(hit.value()));
        }
        let set = Arc::new(pchi_by_enumeration(chi)?);
        self.sets.insert(chi.clone(), Arc::clone(&set));
        Ok(set)
    }
}

fn check_lengths(chi: &ChiWord, n: usize) -> Result<()> {
    if chi.len() != n {
        return invalid(format!("chi has {} letters but the word has {n} elements", chi.len()));
    }
    Ok(())
}

/// Cumulant evaluator with a shared memo on `(chi|V, word|V)`.
///
/// Safe to share across threads; concurrent callers may compute the same
/// entry twice but always store identical values.
pub struct LrCumulants<F: MomentFunctional> {
    phi: F,
    pchi: PchiCache,
    memo: DashMap<(ChiWord, Vec<F::Elem>), F::Scalar>,
}

impl<F: MomentFunctional> LrCumulants<F> {
    pub fn new(phi: F) -> Self {
        LrCumulants {
            phi,
            pchi: PchiCache::new(),
            memo: DashMap::new(),
        }
    }

    pub fn functional(&self) -> &F {
        &self.phi
    }

    pub fn pchi(&self, chi: &ChiWord) -> Result<Arc<Vec<Partition>>> {
        self.pchi.get(chi)
    }

    /// `κ_chi(word)`.
    pub fn cumulant(&self, chi: &ChiWord, word: &[F::Elem]) -> Result<F::Scalar> {
        check_lengths(chi, word.len())?;
        self.kappa(chi, word)
    }

    fn kappa(&self, chi: &ChiWord, word: &[F::Elem]) -> Result<F::Scalar> {
        if word.len() == 1 {
            return Ok(self.phi.moment(word));
        }
        let key = (chi.clone(), word.to_vec());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.value().clone());
        }
        let mut value = self.phi.moment(word);
        for pi in self.pchi.get(chi)?.iter().filter(|p| p.num_blocks() > 1) {
            value.sub_assign_ref(&self.product_over_blocks(chi, word, pi)?);
        }
        self.memo.insert(key, value.clone());
        Ok(value)
    }

    fn product_over_blocks(
        &self,
        chi: &ChiWord,
        word: &[F::Elem],
        pi: &Partition,
    ) -> Result<F::Scalar> {
        let mut prod = F::Scalar::one();
        for block in pi.blocks() {
            let k = self.kappa(&chi.restrict(block), &restrict(word, block))?;
            if k.is_zero() {
                return Ok(F::Scalar::zero());
            }
            prod = prod.mul_ref(&k);
        }
        Ok(prod)
    }

    /// `Σ_{π ∈ P^(chi)(n)} Π_V κ_{chi|V}(word|V)` using this evaluator's own
    /// cumulants; equals `φ(word)` by construction.
    pub fn moment_from_own_cumulants(&self, chi: &ChiWord, word: &[F::Elem]) -> Result<F::Scalar> {
        check_lengths(chi, word.len())?;
        moment_from_cumulants(&self.pchi, chi, word, |c, w| self.kappa(c, w))
    }
}

/// `κ_chi(word)` with a fresh per-call memo.
pub fn lr_cumulant<F: MomentFunctional>(
    chi: &ChiWord,
    word: &[F::Elem],
    phi: &F,
) -> Result<F::Scalar> {
    LrCumulants::new(phi).cumulant(chi, word)
}

/// The moment-cumulant formula: `Σ_{π ∈ P^(chi)(n)} Π_{V ∈ π} κ(chi|V, word|V)`.
pub fn moment_from_cumulants<E, S, K>(
    pchi: &PchiCache,
    chi: &ChiWord,
    word: &[E],
    mut kappa: K,
) -> Result<S>
where
    E: Clone,
    S: Scalar,
    K: FnMut(&ChiWord, &[E]) -> Result<S>,
{
    check_lengths(chi, word.len())?;
    let mut total = S::zero();
    for pi in pchi.get(chi)?.iter() {
        let mut prod = S::one();
        for block in pi.blocks() {
            prod = prod.mul_ref(&kappa(&chi.restrict(block), &restrict(word, block))?);
        }
        total.add_assign_ref(&prod);
    }
    Ok(total)
}

/// The free cumulant `κ_n`, computed as `κ_(l..l)` and cross-checked against
/// `κ_(r..r)`.
pub fn free_cumulant<F: MomentFunctional>(word: &[F::Elem], phi: &F) -> Result<F::Scalar> {
    let n = word.len();
    if n == 0 {
        return invalid("free cumulants need a non-empty word");
    }
    let eval = LrCumulants::new(phi);
    let left = eval.cumulant(&ChiWord::constant(Side::Left, n)?, word)?;
    let right = eval.cumulant(&ChiWord::constant(Side::Right, n)?, word)?;
    if left != right {
        return Err(Error::InvariantViolation(format!(
            "κ_(l..l) = {left} differs from κ_(r..r) = {right} on {word:?}"
        )));
    }
    Ok(left)
}

/// A non-vanishing mixed cumulant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BifreeViolation<S> {
    pub chi: ChiWord,
    /// The pair indices `i_1..i_n` (1-based).
    pub indices: Vec<usize>,
    pub value: S,
}

#[derive(Clone, Debug, Serialize)]
pub struct BifreeReport<S> {
    pub holds: bool,
    /// Number of `(chi, index word)` instances examined.
    pub checked: usize,
    pub violations: Vec<BifreeViolation<S>>,
}

/// Checks that every mixed `(l,r)`-cumulant of `c_{i;l} = a_i`, `c_{i;r} = b_i`
/// vanishes, for lengths `2..=max_n`.
pub fn is_combinatorially_bifree_upto<F: MomentFunctional>(
    pairs: &[(F::Elem, F::Elem)],
    phi: &F,
    max_n: usize,
    exec: Execution,
) -> Result<BifreeReport<F::Scalar>> {
    if max_n < 2 {
        return invalid("max_n must be at least 2");
    }
    let d = pairs.len();
    let eval = LrCumulants::new(phi);
    let mut instances = Vec::new();
    for n in 2..=max_n {
        for indices in index_words(d, n) {
            if indices.iter().all(|&i| i == indices[0]) {
                continue;
            }
            for chi in ChiWord::all(n)? {
                instances.push((chi, indices.clone()));
            }
        }
    }
    let results = exec::map(exec, &instances, |(chi, indices)| {
        let word: Vec<F::Elem> = indices
            .iter()
            .zip(chi.letters())
            .map(|(&i, h)| match h {
                Side::Left => pairs[i - 1].0.clone(),
                Side::Right => pairs[i - 1].1.clone(),
            })
            .collect();
        eval.cumulant(chi, &word)
    });
    let mut violations = Vec::new();
    for ((chi, indices), value) in instances.iter().zip(results) {
        let value = value?;
        if !value.is_zero() {
            violations.push(BifreeViolation {
                chi: chi.clone(),
                indices: indices.clone(),
                value,
            });
        }
    }
    Ok(BifreeReport {
        holds: violations.is_empty(),
        checked: instances.len(),
        violations,
    })
}

/// All words in `{1..d}^n`, lexicographic.
pub fn index_words(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=d).map(move |i| {
                    let mut w = w.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

/// A moment functional given by an explicit table of values.
#[derive(Clone, Debug)]
pub struct TabulatedFunctional<S> {
    values: BTreeMap<Vec<usize>, S>,
}

impl<S: Scalar> TabulatedFunctional<S> {
    pub fn new(values: BTreeMap<Vec<usize>, S>) -> Self {
        TabulatedFunctional { values }
    }
}

impl TabulatedFunctional<BigRational> {
    /// Seeded random values `p/q` with `p ∈ -5..=5`, `q ∈ 1..=4` on every word
    /// over `1..=alphabet` of length `1..=max_len`, drawn in length-then-
    /// lexicographic order.
    pub fn random(alphabet: usize, max_len: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = BTreeMap::new();
        for len in 1..=max_len {
            for w in index_words(alphabet, len) {
                let p: i64 = rng.gen_range(-5..=5);
                let q: i64 = rng.gen_range(1..=4);
                values.insert(w, rational(p, q));
            }
        }
        TabulatedFunctional { values }
    }
}

impl<S: Scalar> MomentFunctional for TabulatedFunctional<S> {
    type Elem = usize;
    type Scalar = S;

    fn moment(&self, word: &[usize]) -> S {
        self.values
            .get(word)
            .cloned()
            .unwrap_or_else(|| panic!("functional not tabulated on {word:?}"))
    }
}
