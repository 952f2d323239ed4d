//! Sparse commutative polynomials with rational coefficients in the formal
//! symbols `α_w`, `β_w`.
//!
//! Symbols order by kind (`α` first), then word length, then the word
//! lexicographically. Monomials are sorted symbol lists compared
//! lexicographically; the constant monomial is the empty list.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Scalar};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum SymbolKind {
    Alpha,
    Beta,
}

/// `α_w` or `β_w` for a non-empty index word `w` over `1..=d`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymbolId {
    pub kind: SymbolKind,
    pub word: Vec<usize>,
}

impl SymbolId {
    pub fn alpha(word: Vec<usize>) -> Self {
        SymbolId { kind: SymbolKind::Alpha, word }
    }

    pub fn beta(word: Vec<usize>) -> Self {
        SymbolId { kind: SymbolKind::Beta, word }
    }
}

impl Ord for SymbolId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then(self.word.len().cmp(&other.word.len()))
            .then_with(|| self.word.cmp(&other.word))
    }
}

impl PartialOrd for SymbolId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            SymbolKind::Alpha => 'a',
            SymbolKind::Beta => 'b',
        };
        write!(f, "{prefix}[")?;
        for (k, i) in self.word.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for SymbolId {
    type Err = Error;

    /// Parses `a[1,2]` / `b[3]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("{s:?} is not a symbol like a[1,2] or b[3]"));
        let kind = match s.chars().next() {
            Some('a') => SymbolKind::Alpha,
            Some('b') => SymbolKind::Beta,
            _ => return Err(bad()),
        };
        let inner = s[1..]
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let word = inner
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        if word.is_empty() || word.contains(&0) {
            return Err(bad());
        }
        Ok(SymbolId { kind, word })
    }
}

/// A product of symbols, kept sorted (a multiset).
pub type Monomial = Vec<SymbolId>;

fn merge_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i].clone());
            i += 1;
        } else {
            out.push(b[j].clone());
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PolyScalar {
    terms: BTreeMap<Monomial, BigRational>,
}

impl PolyScalar {
    pub fn symbol(id: SymbolId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![id], BigRational::one());
        PolyScalar { terms }
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        PolyScalar { terms }
    }

    /// `coeff * s_1 * ... * s_k` (the symbols need not be sorted).
    pub fn monomial(coeff: BigRational, mut symbols: Vec<SymbolId>) -> Self {
        symbols.sort();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(symbols, coeff);
        }
        PolyScalar { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `Some(id)` when the polynomial is exactly one symbol with coefficient 1.
    pub fn as_single_symbol(&self) -> Option<&SymbolId> {
        match self.terms.iter().next() {
            Some((m, c)) if self.terms.len() == 1 && m.len() == 1 && num_traits::One::is_one(c) => Some(&m[0]),
            _ => None,
        }
    }

    fn add_term(&mut self, monomial: Monomial, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        PolyScalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    /// Substitutes a rational value for every symbol.
    pub fn evaluate(&self, mut value: impl FnMut(&SymbolId) -> BigRational) -> BigRational {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for s in m {
                term *= value(s);
            }
            total += term;
        }
        total
    }
}

impl Scalar for PolyScalar {
    fn zero() -> Self {
        PolyScalar::default()
    }

    fn one() -> Self {
        PolyScalar::constant(BigRational::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), -c);
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = PolyScalar::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(merge_monomials(ma, mb), ca * cb);
            }
        }
        out
    }

    fn from_rational(r: &BigRational) -> Self {
        PolyScalar::constant(r.clone())
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polynomials always serialize")
    }
}

impl fmt::Display for PolyScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let show_coeff = !num_traits::One::is_one(&abs) || m.is_empty();
            if show_coeff {
                write!(f, "{}", format_rational(&abs))?;
            }
            for (j, s) in m.iter().enumerate() {
                if j > 0 || show_coeff {
                    write!(f, "*")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: String,
    monomial: Vec<String>,
}

impl Serialize for PolyScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(m, c)| TermRepr {
                coeff: format_rational(c),
                monomial: m.iter().map(ToString::to_string).collect(),
            })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(deserializer)?;
        let mut out = PolyScalar::default();
        for t in terms {
            let coeff = parse_rational(&t.coeff).map_err(serde::de::Error::custom)?;
            let mut symbols = t
                .monomial
                .iter()
                .map(|s| s.parse::<SymbolId>())
                .collect::<Result<Vec<_>>>()
                .map_err(serde::de::Error::custom)?;
            symbols.sort();
            out.add_term(symbols, coeff);
        }
        Ok(out)
    }
}
