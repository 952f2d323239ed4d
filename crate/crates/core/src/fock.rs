//! Full Fock space over `C^d`, left/right creation and annihilation, and the
//! canonical operators `A_i = C_{i;l}`, `B_i = C_{i;r}`.
//!
//! Two independent application routes exist:
//!
//! * [`OperatorExpr`] is a formal sum of generator products, applied one
//!   generator at a time. It handles arbitrary expressions (including
//!   adjoints) and is the reference route.
//! * [`FockEngine`] applies `C_{i;h} = S_{i;h}^* Σ_p X_{p;h}` in a single
//!   pass, enumerating only the creation words whose last letter survives the
//!   annihilator. When a moment is being computed it also drops basis words
//!   longer than the number of operators still to be applied: every canonical
//!   operator annihilates exactly one letter, so such words can never return
//!   to the vacuum. The drop is exact.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::cumulants::{index_words, MomentFunctional, PchiCache};
use crate::deque::{output_partition, ChiWord, Side};
use crate::error::{invalid, Error, Result};
use crate::exec::{self, Execution};
use crate::lukasiewicz::LukPath;
use crate::partitions::{restrict, Partition};
use crate::poly::{PolyScalar, SymbolId, SymbolKind};
use crate::scalar::{format_rational, parse_rational, rational, Scalar};

/// A basis tensor `e_{i_1} ⊗ … ⊗ e_{i_n}`; the empty word is the vacuum.
pub type FockWord = Vec<usize>;

/// A finitely supported vector. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<S> {
    terms: BTreeMap<FockWord, S>,
}

impl<S: Scalar> FockVector<S> {
    pub fn zero() -> Self {
        FockVector { terms: BTreeMap::new() }
    }

    pub fn vacuum() -> Self {
        Self::basis(Vec::new())
    }

    pub fn basis(word: FockWord) -> Self {
        let mut v = Self::zero();
        v.add_term(word, S::one());
        v
    }

    pub fn add_term(&mut self, word: FockWord, coeff: S) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&coeff);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_vector(&mut self, other: &FockVector<S>) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn scaled(&self, c: &S) -> Self {
        let mut out = Self::zero();
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x.mul_ref(c));
        }
        out
    }

    pub fn coefficient(&self, word: &[usize]) -> S {
        self.terms.get(word).cloned().unwrap_or_else(S::zero)
    }

    /// `<v, ξ_vac>`.
    pub fn vacuum_coefficient(&self) -> S {
        self.coefficient(&[])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockWord, &S)> {
        self.terms.iter()
    }

    /// Number of basis words with a nonzero coefficient.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the vector is `c · ξ_vac` (including `c = 0`).
    pub fn as_vacuum_multiple(&self) -> Option<S> {
        match self.terms.len() {
            0 => Some(S::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// The inner product `<self, other>`, bilinear (conjugation is trivial).
    pub fn inner(&self, other: &FockVector<S>) -> S {
        let mut total = S::zero();
        for (w, c) in &self.terms {
            if let Some(d) = other.terms.get(w) {
                total.add_assign_ref(&c.mul_ref(d));
            }
        }
        total
    }
}

impl<S: Scalar> Serialize for FockVector<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let rows: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(w, c)| serde_json::json!({ "word": w, "coeff": c.to_json() }))
            .collect();
        rows.serialize(s)
    }
}

impl<S: Scalar> fmt::Display for FockVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let word: Vec<String> = w.iter().map(|i| i.to_string()).collect();
            if w.is_empty() {
                write!(f, "({c})·vac")?;
            } else {
                write!(f, "({c})·e[{}]", word.join(","))?;
            }
        }
        Ok(())
    }
}

/// `L_i`, `R_i` (creation) and `L_i^*`, `R_i^*` (annihilation).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Generator {
    Create(Side, usize),
    Annihilate(Side, usize),
}

impl Generator {
    pub fn adjoint(self) -> Generator {
        match self {
            Generator::Create(h, i) => Generator::Annihilate(h, i),
            Generator::Annihilate(h, i) => Generator::Create(h, i),
        }
    }

    /// The image of a basis word, or `None` when it is killed.
    pub fn apply_word(self, word: &[usize]) -> Option<FockWord> {
        match self {
            Generator::Create(Side::Left, i) => {
                let mut w = Vec::with_capacity(word.len() + 1);
                w.push(i);
                w.extend_from_slice(word);
                Some(w)
            }
            Generator::Create(Side::Right, i) => {
                let mut w = word.to_vec();
                w.push(i);
                Some(w)
            }
            Generator::Annihilate(Side::Left, i) => match word.first() {
                Some(&j) if j == i => Some(word[1..].to_vec()),
                _ => None,
            },
            Generator::Annihilate(Side::Right, i) => match word.last() {
                Some(&j) if j == i => Some(word[..word.len() - 1].to_vec()),
                _ => None,
            },
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (h, i, star) = match *self {
            Generator::Create(h, i) => (h, i, ""),
            Generator::Annihilate(h, i) => (h, i, "*"),
        };
        let name = match h {
            Side::Left => 'L',
            Side::Right => 'R',
        };
        write!(f, "{name}{i}{star}")
    }
}

/// Applies one generator, extended linearly.
pub fn apply_generator<S: Scalar>(g: Generator, v: &FockVector<S>) -> FockVector<S> {
    let mut out = FockVector::zero();
    for (w, c) in v.terms() {
        if let Some(image) = g.apply_word(w) {
            out.add_term(image, c.clone());
        }
    }
    out
}

/// A formal sum `Σ c_k · g_{k,1} g_{k,2} ⋯ g_{k,m}`; each product acts
/// right-to-left.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorExpr<S> {
    terms: Vec<(S, Vec<Generator>)>,
}

impl<S: Scalar> OperatorExpr<S> {
    pub fn zero() -> Self {
        OperatorExpr { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        OperatorExpr { terms: vec![(S::one(), Vec::new())] }
    }

    pub fn generator(g: Generator) -> Self {
        OperatorExpr { terms: vec![(S::one(), vec![g])] }
    }

    pub fn from_terms(terms: Vec<(S, Vec<Generator>)>) -> Self {
        OperatorExpr {
            terms: terms.into_iter().filter(|(c, _)| !c.is_zero()).collect(),
        }
    }

    pub fn terms(&self) -> &[(S, Vec<Generator>)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, other: &OperatorExpr<S>) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        OperatorExpr { terms }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &OperatorExpr<S>) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c, g) in &self.terms {
            for (d, h) in &other.terms {
                let coeff = c.mul_ref(d);
                if coeff.is_zero() {
                    continue;
                }
                let mut gens = g.clone();
                gens.extend_from_slice(h);
                terms.push((coeff, gens));
            }
        }
        OperatorExpr { terms }
    }

    /// The largest length drop any single term can cause, floored at zero.
    pub fn max_net_annihilation(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, gens)| {
                let ann = gens.iter().filter(|g| matches!(g, Generator::Annihilate(..))).count();
                ann.saturating_sub(gens.len() - ann)
            })
            .max()
            .unwrap_or(0)
    }

    pub fn apply(&self, v: &FockVector<S>) -> FockVector<S> {
        let mut out = FockVector::zero();
        for (w, c) in v.terms() {
            for (coeff, gens) in &self.terms {
                let mut word = Some(w.clone());
                for g in gens.iter().rev() {
                    word = word.and_then(|x| g.apply_word(&x));
                    if word.is_none() {
                        break;
                    }
                }
                if let Some(image) = word {
                    out.add_term(image, c.mul_ref(coeff));
                }
            }
        }
        out
    }
}

impl<S: Scalar> fmt::Display for OperatorExpr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, gens)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if gens.is_empty() {
                write!(f, "·I")?;
            }
            for g in gens {
                write!(f, "·{g}")?;
            }
        }
        Ok(())
    }
}

/// Reverses each product and stars each generator. Coefficients are left as
/// they are: every scalar ring here is fixed by complex conjugation.
pub fn adjoint<S: Scalar>(op: &OperatorExpr<S>) -> OperatorExpr<S> {
    OperatorExpr {
        terms: op
            .terms
            .iter()
            .map(|(c, gens)| (c.clone(), gens.iter().rev().map(|g| g.adjoint()).collect()))
            .collect(),
    }
}

/// `φ_vac(op_1 ∘ ⋯ ∘ op_n)`; the empty product gives 1.
///
/// After each step, basis words longer than the total number of letters the
/// remaining operators can remove are dropped; they cannot reach the vacuum.
pub fn vacuum_expectation<S: Scalar>(ops: &[OperatorExpr<S>]) -> S {
    // budget[k] = letters removable by ops[..k].
    let mut budget = vec![0usize; ops.len() + 1];
    for (k, op) in ops.iter().enumerate() {
        budget[k + 1] = budget[k] + op.max_net_annihilation();
    }
    let mut v = FockVector::vacuum();
    for (k, op) in ops.iter().enumerate().rev() {
        v = op.apply(&v);
        v.terms.retain(|w, _| w.len() <= budget[k]);
        if v.is_zero() {
            return S::zero();
        }
    }
    v.vacuum_coefficient()
}

/// Coefficients `α_w` (of `f`) and `β_w` (of `g`) in some scalar ring.
pub trait CoefficientSource: Sync {
    type Scalar: Scalar;

    fn d(&self) -> usize;

    /// Degree bound: all coefficients on longer words vanish.
    fn n_o(&self) -> usize;

    /// The value of `α_w` / `β_w`. Must return zero for `|w| > n_o`.
    fn coefficient(&self, symbol: &SymbolId) -> Self::Scalar;
}

impl<C: CoefficientSource> CoefficientSource for &C {
    type Scalar = C::Scalar;

    fn d(&self) -> usize {
        (**self).d()
    }

    fn n_o(&self) -> usize {
        (**self).n_o()
    }

    fn coefficient(&self, symbol: &SymbolId) -> Self::Scalar {
        (**self).coefficient(symbol)
    }
}

fn kind_of(side: Side) -> SymbolKind {
    match side {
        Side::Left => SymbolKind::Alpha,
        Side::Right => SymbolKind::Beta,
    }
}

fn check_table_shape(d: usize, n_o: usize) -> Result<()> {
    if d == 0 || n_o == 0 {
        return invalid(format!("coefficient tables need d >= 1 and n_o >= 1 (got d = {d}, n_o = {n_o})"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
enum Support {
    All,
    /// Only constant words `(i, …, i)` carry a symbol, plus the listed extras.
    Separated(Vec<SymbolId>),
}

/// Every coefficient is an independent formal symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicTable {
    d: usize,
    n_o: usize,
    support: Support,
}

impl SymbolicTable {
    pub fn new(d: usize, n_o: usize) -> Result<Self> {
        check_table_shape(d, n_o)?;
        Ok(SymbolicTable { d, n_o, support: Support::All })
    }

    /// `f = f_1(z_1) + … + f_d(z_d)` and likewise `g`: mixed coefficients vanish.
    pub fn separated(d: usize, n_o: usize) -> Result<Self> {
        check_table_shape(d, n_o)?;
        Ok(SymbolicTable { d, n_o, support: Support::Separated(Vec::new()) })
    }

    /// Re-enables a single symbol on a separated table.
    pub fn with_symbol(mut self, symbol: SymbolId) -> Result<Self> {
        if symbol.word.len() > self.n_o || symbol.word.iter().any(|&i| i == 0 || i > self.d) {
            return invalid(format!("{symbol} does not fit d = {}, n_o = {}", self.d, self.n_o));
        }
        if let Support::Separated(extra) = &mut self.support {
            extra.push(symbol);
        }
        Ok(self)
    }
}

impl CoefficientSource for SymbolicTable {
    type Scalar = PolyScalar;

    fn d(&self) -> usize {
        self.d
    }

    fn n_o(&self) -> usize {
        self.n_o
    }

    fn coefficient(&self, symbol: &SymbolId) -> PolyScalar {
        if symbol.word.len() > self.n_o {
            return PolyScalar::zero();
        }
        let live = match &self.support {
            Support::All => true,
            Support::Separated(extra) => {
                symbol.word.iter().all(|&i| i == symbol.word[0]) || extra.contains(symbol)
            }
        };
        if live {
            PolyScalar::symbol(symbol.clone())
        } else {
            PolyScalar::zero()
        }
    }
}

/// Concrete rational coefficients; unlisted words are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalTable {
    d: usize,
    n_o: usize,
    alpha: HashMap<Vec<usize>, BigRational>,
    beta: HashMap<Vec<usize>, BigRational>,
}

/// On-disk form: `{"d": 2, "n_o": 3, "alpha": {"1,2": "3/4"}, "beta": {...}}`.
#[derive(Serialize, Deserialize)]
struct TableFile {
    d: usize,
    n_o: usize,
    #[serde(default)]
    alpha: BTreeMap<String, String>,
    #[serde(default)]
    beta: BTreeMap<String, String>,
}

impl RationalTable {
    pub fn new(
        d: usize,
        n_o: usize,
        alpha: HashMap<Vec<usize>, BigRational>,
        beta: HashMap<Vec<usize>, BigRational>,
    ) -> Result<Self> {
        check_table_shape(d, n_o)?;
        for (name, map) in [("alpha", &alpha), ("beta", &beta)] {
            for w in map.keys() {
                if w.is_empty() || w.len() > n_o || w.iter().any(|&i| i == 0 || i > d) {
                    return invalid(format!(
                        "{name} entry on word {w:?} is outside d = {d}, 1 <= length <= n_o = {n_o}"
                    ));
                }
            }
        }
        Ok(RationalTable { d, n_o, alpha, beta })
    }

    /// Every `α_w`, `β_w` with `|w| <= n_o` drawn as `p/q`, `p ∈ -5..=5`,
    /// `q ∈ 1..=4`: first all `α` then all `β`, each by length then
    /// lexicographically.
    pub fn random(d: usize, n_o: usize, seed: u64) -> Result<Self> {
        check_table_shape(d, n_o)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |map: &mut HashMap<Vec<usize>, BigRational>| {
            for len in 1..=n_o {
                for w in index_words(d, len) {
                    let p: i64 = rng.gen_range(-5..=5);
                    let q: i64 = rng.gen_range(1..=4);
                    map.insert(w, rational(p, q));
                }
            }
        };
        let mut alpha = HashMap::new();
        let mut beta = HashMap::new();
        draw(&mut alpha);
        draw(&mut beta);
        Self::new(d, n_o, alpha, beta)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TableFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("coefficient table: {e}")))?;
        let parse_map = |m: &BTreeMap<String, String>| -> Result<HashMap<Vec<usize>, BigRational>> {
            m.iter()
                .map(|(k, v)| Ok((parse_index_word(k)?, parse_rational(v)?)))
                .collect()
        };
        Self::new(file.d, file.n_o, parse_map(&file.alpha)?, parse_map(&file.beta)?)
    }

    pub fn to_json(&self) -> String {
        let render = |m: &HashMap<Vec<usize>, BigRational>| -> BTreeMap<String, String> {
            m.iter()
                .map(|(w, c)| (format_index_word(w), format_rational(c)))
                .collect()
        };
        let file = TableFile {
            d: self.d,
            n_o: self.n_o,
            alpha: render(&self.alpha),
            beta: render(&self.beta),
        };
        serde_json::to_string_pretty(&file).expect("table serializes")
    }
}

impl CoefficientSource for RationalTable {
    type Scalar = BigRational;

    fn d(&self) -> usize {
        self.d
    }

    fn n_o(&self) -> usize {
        self.n_o
    }

    fn coefficient(&self, symbol: &SymbolId) -> BigRational {
        let map = match symbol.kind {
            SymbolKind::Alpha => &self.alpha,
            SymbolKind::Beta => &self.beta,
        };
        map.get(&symbol.word).cloned().unwrap_or_else(<BigRational as Scalar>::zero)
    }
}

/// `"1,2,1"` → `[1, 2, 1]`.
pub fn parse_index_word(s: &str) -> Result<Vec<usize>> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.trim().is_empty() {
        return Err(Error::Parse("empty index word".into()));
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i),
                _ => Err(Error::Parse(format!("{t:?} is not a positive index"))),
            }
        })
        .collect()
}

pub fn format_index_word(w: &[usize]) -> String {
    w.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

fn check_index(i: usize, d: usize) -> Result<()> {
    if i == 0 || i > d {
        return invalid(format!("index {i} is outside 1..={d}"));
    }
    Ok(())
}

/// `X_{p;h}`: the identity for `p = 0`, zero beyond `n_o`.
pub fn x_op<C: CoefficientSource>(p: usize, side: Side, table: &C) -> OperatorExpr<C::Scalar> {
    if p == 0 {
        return OperatorExpr::identity();
    }
    if p > table.n_o() {
        return OperatorExpr::zero();
    }
    let terms = index_words(table.d(), p)
        .into_iter()
        .map(|w| {
            let c = table.coefficient(&SymbolId { kind: kind_of(side), word: w.clone() });
            let gens = w.iter().rev().map(|&i| Generator::Create(side, i)).collect();
            (c, gens)
        })
        .collect();
    OperatorExpr::from_terms(terms)
}

/// `C_{i;h} = S_{i;h}^* Σ_{p=0}^{n_o} X_{p;h}` as a formal expression.
pub fn canonical_operator<C: CoefficientSource>(
    i: usize,
    side: Side,
    table: &C,
) -> Result<OperatorExpr<C::Scalar>> {
    check_index(i, table.d())?;
    let mut sum = OperatorExpr::zero();
    for p in 0..=table.n_o() {
        sum = sum.plus(&x_op(p, side, table));
    }
    Ok(OperatorExpr::generator(Generator::Annihilate(side, i)).compose(&sum))
}

/// `γ̃(ω; chi)`, the reverse bi-mixture symbol.
pub fn reverse_bimixture_symbol(omega: &[usize], chi: &ChiWord) -> Result<SymbolId> {
    check_word_lengths(omega, chi)?;
    let at = |ms: &[usize]| -> Vec<usize> { ms.iter().map(|&m| omega[m - 1]).collect() };
    let left = at(&chi.left_times());
    let right = at(&chi.right_times());
    Ok(match chi.at(1) {
        Side::Left => {
            let mut w = right;
            w.extend(left.iter().rev());
            SymbolId::alpha(w)
        }
        Side::Right => {
            let mut w = left;
            w.extend(right.iter().rev());
            SymbolId::beta(w)
        }
    })
}

/// `γ(ω; chi)`, the bi-mixture symbol.
pub fn bimixture_symbol(omega: &[usize], chi: &ChiWord) -> Result<SymbolId> {
    check_word_lengths(omega, chi)?;
    let at = |ms: &[usize]| -> Vec<usize> { ms.iter().map(|&m| omega[m - 1]).collect() };
    let left = at(&chi.left_times());
    let right = at(&chi.right_times());
    Ok(match chi.at(chi.len()) {
        Side::Left => {
            let mut w: Vec<usize> = right.into_iter().rev().collect();
            w.extend(left);
            SymbolId::alpha(w)
        }
        Side::Right => {
            let mut w: Vec<usize> = left.into_iter().rev().collect();
            w.extend(right);
            SymbolId::beta(w)
        }
    })
}

pub fn reverse_bimixture(omega: &[usize], chi: &ChiWord) -> Result<PolyScalar> {
    Ok(PolyScalar::symbol(reverse_bimixture_symbol(omega, chi)?))
}

pub fn bimixture(omega: &[usize], chi: &ChiWord) -> Result<PolyScalar> {
    Ok(PolyScalar::symbol(bimixture_symbol(omega, chi)?))
}

fn check_word_lengths(omega: &[usize], chi: &ChiWord) -> Result<()> {
    if omega.len() != chi.len() {
        return invalid(format!(
            "omega has {} indices but chi has {} letters",
            omega.len(),
            chi.len()
        ));
    }
    Ok(())
}

/// `C_{i;h}` as an element identifier for the moment functional.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct CanonicalElem {
    pub index: usize,
    pub side: Side,
}

impl fmt::Display for CanonicalElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Left => write!(f, "A{}", self.index),
            Side::Right => write!(f, "B{}", self.index),
        }
    }
}

/// `(C_{i_1;h_1}, …, C_{i_n;h_n})`.
pub fn c_word(omega: &[usize], chi: &ChiWord) -> Result<Vec<CanonicalElem>> {
    check_word_lengths(omega, chi)?;
    Ok(omega
        .iter()
        .zip(chi.letters())
        .map(|(&index, &side)| CanonicalElem { index, side })
        .collect())
}

fn side_slot(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

/// Creation words left behind by `S_{i;h}^* X_{p;h}` for `p >= 1`, with the
/// letters already in their final order: for `h = l` the word `(w_{p-1}, …, w_1)`
/// is prepended, for `h = r` the word `(w_1, …, w_{p-1})` is appended, where
/// `w_p = i`.
type CreationTable<S> = Vec<Vec<(Vec<usize>, S)>>;

/// Sequential-application engine for the canonical operators, with a moment
/// cache shared across threads.
pub struct FockEngine<C: CoefficientSource> {
    table: C,
    creation: [Vec<CreationTable<C::Scalar>>; 2],
    moments: DashMap<Vec<CanonicalElem>, C::Scalar>,
}

impl<C: CoefficientSource> FockEngine<C> {
    pub fn new(table: C) -> Self {
        let d = table.d();
        let build = |side: Side| -> Vec<CreationTable<C::Scalar>> {
            (1..=d)
                .map(|i| {
                    (1..=table.n_o())
                        .map(|p| {
                            index_words(d, p - 1)
                                .into_iter()
                                .filter_map(|prefix| {
                                    let mut w = prefix.clone();
                                    w.push(i);
                                    let c = table.coefficient(&SymbolId { kind: kind_of(side), word: w });
                                    if c.is_zero() {
                                        return None;
                                    }
                                    let letters = match side {
                                        Side::Left => prefix.into_iter().rev().collect(),
                                        Side::Right => prefix,
                                    };
                                    Some((letters, c))
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        };
        let creation = [build(Side::Left), build(Side::Right)];
        FockEngine { table, creation, moments: DashMap::new() }
    }

    pub fn table(&self) -> &C {
        &self.table
    }

    pub fn d(&self) -> usize {
        self.table.d()
    }

    /// All `2d` canonical operators, `A_1..A_d` then `B_1..B_d`.
    pub fn elements(&self) -> Vec<CanonicalElem> {
        [Side::Left, Side::Right]
            .into_iter()
            .flat_map(|side| (1..=self.d()).map(move |index| CanonicalElem { index, side }))
            .collect()
    }

    fn check_elem(&self, e: CanonicalElem) -> Result<()> {
        check_index(e.index, self.d())
    }

    /// `C_{i;h} v`, dropping output words longer than `max_len`.
    pub fn apply_canonical(
        &self,
        e: CanonicalElem,
        v: &FockVector<C::Scalar>,
        max_len: usize,
    ) -> FockVector<C::Scalar> {
        assert!(e.index >= 1 && e.index <= self.d(), "{e} is outside 1..={}", self.d());
        let creations = &self.creation[side_slot(e.side)][e.index - 1];
        let mut out = FockVector::zero();
        for (word, c) in v.terms() {
            // p = 0: the annihilator acts on the word itself.
            if word.len() <= max_len.saturating_add(1) {
                let kept = match e.side {
                    Side::Left => (word.first() == Some(&e.index)).then(|| word[1..].to_vec()),
                    Side::Right => {
                        (word.last() == Some(&e.index)).then(|| word[..word.len() - 1].to_vec())
                    }
                };
                if let Some(w) = kept {
                    out.add_term(w, c.clone());
                }
            }
            for (extra, terms) in creations.iter().enumerate() {
                let new_len = word.len() + extra;
                if new_len > max_len {
                    break;
                }
                for (letters, coeff) in terms {
                    let mut w = Vec::with_capacity(new_len);
                    match e.side {
                        Side::Left => {
                            w.extend_from_slice(letters);
                            w.extend_from_slice(word);
                        }
                        Side::Right => {
                            w.extend_from_slice(word);
                            w.extend_from_slice(letters);
                        }
                    }
                    out.add_term(w, c.mul_ref(coeff));
                }
            }
        }
        out
    }

    /// `C_{i_1;h_1} ⋯ C_{i_n;h_n} ξ_vac` with no length cut.
    pub fn apply_word(&self, word: &[CanonicalElem]) -> Result<FockVector<C::Scalar>> {
        let mut v = FockVector::vacuum();
        for &e in word.iter().rev() {
            self.check_elem(e)?;
            v = self.apply_canonical(e, &v, usize::MAX);
        }
        Ok(v)
    }

    fn compute_moment(&self, word: &[CanonicalElem]) -> C::Scalar {
        let mut v = FockVector::vacuum();
        for (k, &e) in word.iter().enumerate().rev() {
            // k operators remain to the left of this one.
            v = self.apply_canonical(e, &v, k);
            if v.is_zero() {
                return C::Scalar::zero();
            }
        }
        v.vacuum_coefficient()
    }

    /// `φ_vac(C_{i_1;h_1} ⋯ C_{i_n;h_n})`.
    pub fn moment_of(&self, word: &[CanonicalElem]) -> Result<C::Scalar> {
        for &e in word {
            self.check_elem(e)?;
        }
        Ok(self.moment(word))
    }

    /// Fills the moment cache for every word of length `1..=max_n` by walking
    /// suffixes, so each suffix vector is computed once.
    pub fn prefill(&self, max_n: usize, exec: Execution) {
        if max_n == 0 {
            return;
        }
        let elems = self.elements();
        let roots: Vec<CanonicalElem> = elems.clone();
        exec::map(exec, &roots, |&e| {
            let v = self.apply_canonical(e, &FockVector::vacuum(), max_n - 1);
            let mut suffix = vec![e];
            self.walk(&mut suffix, &v, max_n, &elems);
        });
    }

    fn walk(
        &self,
        suffix: &mut Vec<CanonicalElem>,
        v: &FockVector<C::Scalar>,
        max_n: usize,
        elems: &[CanonicalElem],
    ) {
        let key: Vec<CanonicalElem> = suffix.iter().rev().copied().collect();
        self.moments.insert(key, v.vacuum_coefficient());
        let k = suffix.len();
        if k == max_n {
            return;
        }
        if v.is_zero() {
            // Every extension vanishes; record them without further work.
            self.record_zero_extensions(suffix, max_n, elems);
            return;
        }
        for &e in elems {
            let next = self.apply_canonical(e, v, max_n - k - 1);
            suffix.push(e);
            self.walk(suffix, &next, max_n, elems);
            suffix.pop();
        }
    }

    fn record_zero_extensions(&self, suffix: &mut Vec<CanonicalElem>, max_n: usize, elems: &[CanonicalElem]) {
        if suffix.len() == max_n {
            return;
        }
        for &e in elems {
            suffix.push(e);
            let key: Vec<CanonicalElem> = suffix.iter().rev().copied().collect();
            self.moments.insert(key, C::Scalar::zero());
            self.record_zero_extensions(suffix, max_n, elems);
            suffix.pop();
        }
    }

    pub fn cached_moments(&self) -> usize {
        self.moments.len()
    }
}

impl<C: CoefficientSource> MomentFunctional for FockEngine<C> {
    type Elem = CanonicalElem;
    type Scalar = C::Scalar;

    fn moment(&self, word: &[CanonicalElem]) -> C::Scalar {
        if let Some(hit) = self.moments.get(word) {
            return hit.value().clone();
        }
        let value = self.compute_moment(word);
        self.moments.insert(word.to_vec(), value.clone());
        value
    }
}

/// `φ_vac` on products of arbitrary operator expressions, identified by their
/// position in a list. Uses the generator-by-generator route.
pub struct ExprFunctional<S> {
    ops: Vec<OperatorExpr<S>>,
    moments: DashMap<Vec<usize>, S>,
}

impl<S: Scalar> ExprFunctional<S> {
    pub fn new(ops: Vec<OperatorExpr<S>>) -> Self {
        ExprFunctional { ops, moments: DashMap::new() }
    }

    pub fn ops(&self) -> &[OperatorExpr<S>] {
        &self.ops
    }
}

impl<S: Scalar> MomentFunctional for ExprFunctional<S> {
    type Elem = usize;
    type Scalar = S;

    fn moment(&self, word: &[usize]) -> S {
        if let Some(hit) = self.moments.get(word) {
            return hit.value().clone();
        }
        let ops: Vec<OperatorExpr<S>> = word.iter().map(|&k| self.ops[k].clone()).collect();
        let value = vacuum_expectation(&ops);
        self.moments.insert(word.to_vec(), value.clone());
        value
    }
}

/// `X_{p;h}^* S_{i;h}` applied to a single basis word, staying a single basis
/// word (or vanishing).
fn adjoint_step<C: CoefficientSource>(
    table: &C,
    p: usize,
    side: Side,
    i: usize,
    word: &mut FockWord,
) -> Option<C::Scalar> {
    match side {
        Side::Left => word.insert(0, i),
        Side::Right => word.push(i),
    }
    if p == 0 {
        return Some(C::Scalar::one());
    }
    if p > table.n_o() || p > word.len() {
        return None;
    }
    // X_{p;l}^* = Σ α_w L_{w_1}^* ⋯ L_{w_p}^* needs the word to open with
    // (w_p, …, w_1); X_{p;r}^* = Σ β_w R_{w_1}^* ⋯ R_{w_p}^* needs it to close
    // with (w_1, …, w_p).
    let w: Vec<usize> = match side {
        Side::Left => word.drain(..p).rev().collect(),
        Side::Right => word.drain(word.len() - p..).collect(),
    };
    let c = table.coefficient(&SymbolId { kind: kind_of(side), word: w });
    (!c.is_zero()).then_some(c)
}

/// `X_{p_1;h_1}^* S_{i_1;h_1} ⋯ X_{p_n;h_n}^* S_{i_n;h_n} ξ_vac`, by direct
/// manipulation of basis words.
pub fn scenario_vector<C: CoefficientSource>(
    path: &LukPath,
    chi: &ChiWord,
    omega: &[usize],
    table: &C,
) -> Result<FockVector<C::Scalar>> {
    check_lemma_inputs(path, chi, omega, table.d())?;
    let batches = path.batch_sizes();
    let mut word = Vec::new();
    let mut coeff = C::Scalar::one();
    for m in (0..omega.len()).rev() {
        match adjoint_step(table, batches[m], chi.at(m + 1), omega[m], &mut word) {
            Some(c) => coeff = coeff.mul_ref(&c),
            None => return Ok(FockVector::zero()),
        }
    }
    let mut v = FockVector::zero();
    v.add_term(word, coeff);
    Ok(v)
}

/// The same product built from [`x_op`], [`adjoint`] and generators, applied
/// through [`OperatorExpr::apply`].
pub fn scenario_vector_by_expr<C: CoefficientSource>(
    path: &LukPath,
    chi: &ChiWord,
    omega: &[usize],
    table: &C,
) -> Result<FockVector<C::Scalar>> {
    check_lemma_inputs(path, chi, omega, table.d())?;
    let batches = path.batch_sizes();
    let mut v = FockVector::vacuum();
    for m in (0..omega.len()).rev() {
        let side = chi.at(m + 1);
        v = apply_generator(Generator::Create(side, omega[m]), &v);
        v = adjoint(&x_op(batches[m], side, table)).apply(&v);
    }
    Ok(v)
}

fn check_lemma_inputs(path: &LukPath, chi: &ChiWord, omega: &[usize], d: usize) -> Result<()> {
    check_word_lengths(omega, chi)?;
    if path.n() != chi.len() {
        return invalid(format!("path has {} steps but chi has {} letters", path.n(), chi.len()));
    }
    for &i in omega {
        check_index(i, d)?;
    }
    Ok(())
}

/// `Π_{T ∈ π} γ̃((ω; chi)|T)` over the output-time partition `π` of
/// `(path, chi)`.
pub fn scenario_scalar<C: CoefficientSource>(
    path: &LukPath,
    chi: &ChiWord,
    omega: &[usize],
    table: &C,
) -> Result<C::Scalar> {
    check_lemma_inputs(path, chi, omega, table.d())?;
    let pi = output_partition(path, chi)?;
    block_product(&pi, chi, omega, table, reverse_bimixture_symbol)
}

fn block_product<C: CoefficientSource>(
    pi: &Partition,
    chi: &ChiWord,
    omega: &[usize],
    table: &C,
    symbol: fn(&[usize], &ChiWord) -> Result<SymbolId>,
) -> Result<C::Scalar> {
    let mut prod = C::Scalar::one();
    for block in pi.blocks() {
        let c = table.coefficient(&symbol(&restrict(omega, block), &chi.restrict(block))?);
        if c.is_zero() {
            return Ok(C::Scalar::zero());
        }
        prod = prod.mul_ref(&c);
    }
    Ok(prod)
}

/// `Π_{T ∈ π} γ̃((ω; chi)|T)` for a given partition.
pub fn reverse_bimixture_product<C: CoefficientSource>(
    pi: &Partition,
    chi: &ChiWord,
    omega: &[usize],
    table: &C,
) -> Result<C::Scalar> {
    check_word_lengths(omega, chi)?;
    block_product(pi, chi, omega, table, reverse_bimixture_symbol)
}

/// `Π_{T ∈ π} γ((ω; chi)|T)` for a given partition.
pub fn bimixture_product<C: CoefficientSource>(
    pi: &Partition,
    chi: &ChiWord,
    omega: &[usize],
    table: &C,
) -> Result<C::Scalar> {
    check_word_lengths(omega, chi)?;
    block_product(pi, chi, omega, table, bimixture_symbol)
}

/// `Σ_{π ∈ P^(chi)(n)} Π_{T ∈ π} γ((ω; chi)|T)`.
pub fn moment_via_pchi<C: CoefficientSource>(
    omega: &[usize],
    chi: &ChiWord,
    table: &C,
) -> Result<C::Scalar> {
    moment_via_pchi_cached(omega, chi, table, &PchiCache::new())
}

pub fn moment_via_pchi_cached<C: CoefficientSource>(
    omega: &[usize],
    chi: &ChiWord,
    table: &C,
    pchi: &PchiCache,
) -> Result<C::Scalar> {
    check_word_lengths(omega, chi)?;
    for &i in omega {
        check_index(i, table.d())?;
    }
    let set: Arc<Vec<Partition>> = pchi.get(chi)?;
    let mut total = C::Scalar::zero();
    for pi in set.iter() {
        total.add_assign_ref(&block_product(pi, chi, omega, table, bimixture_symbol)?);
    }
    Ok(total)
}
