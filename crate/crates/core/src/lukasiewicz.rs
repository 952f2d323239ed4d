//! Lukasiewicz paths, stored as rise-vectors, and the maps `Ψ: P(n) → Luk(n)`
//! and `Φ: Luk(n) → NC(n)`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::partitions::{Partition, MAX_CATALAN_N};

/// A Lukasiewicz path with `n` steps, given by its rise-vector `q_1..q_n`:
/// every `q_m >= -1`, every partial sum is non-negative and the total is zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LukPath {
    rise: Vec<i64>,
}

impl LukPath {
    pub fn n(&self) -> usize {
        self.rise.len()
    }

    pub fn rise(&self) -> &[i64] {
        &self.rise
    }

    /// Batch sizes `p_m = q_m + 1` of the matching deque scenario.
    pub fn batch_sizes(&self) -> Vec<usize> {
        self.rise.iter().map(|&q| (q + 1) as usize).collect()
    }

    /// Heights `j_1..j_n` of the lattice-point form `(m, j_m)`.
    pub fn heights(&self) -> Vec<i64> {
        self.rise
            .iter()
            .scan(0i64, |h, &q| {
                *h += q;
                Some(*h)
            })
            .collect()
    }

    /// The flat path `(0, ..., 0)`.
    pub fn flat(n: usize) -> Result<Self> {
        validate_rise(&vec![0; n])
    }

    /// The single-insertion path `(n-1, -1, ..., -1)`.
    pub fn single_insertion(n: usize) -> Result<Self> {
        let mut rise = vec![-1; n];
        if n > 0 {
            rise[0] = n as i64 - 1;
        }
        validate_rise(&rise)
    }
}

impl fmt::Display for LukPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, q) in self.rise.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for LukPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rise.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LukPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rise = Vec::<i64>::deserialize(deserializer)?;
        validate_rise(&rise).map_err(serde::de::Error::custom)
    }
}

pub fn validate_rise(q: &[i64]) -> Result<LukPath> {
    if q.is_empty() {
        return invalid("a rise-vector must have at least one step");
    }
    if let Some(pos) = q.iter().position(|&x| x < -1) {
        return Err(Error::NotAPath(format!(
            "step {} has rise {} < -1",
            pos + 1,
            q[pos]
        )));
    }
    let mut sum = 0i64;
    for (m, &x) in q.iter().enumerate() {
        sum += x;
        if sum < 0 {
            return Err(Error::NotAPath(format!(
                "partial sum over the first {} step(s) is {sum} < 0",
                m + 1
            )));
        }
    }
    if sum != 0 {
        return Err(Error::NotAPath(format!("total rise is {sum}, expected 0")));
    }
    Ok(LukPath { rise: q.to_vec() })
}

/// All Lukasiewicz paths with `n` steps, in lexicographic order of rise-vectors.
pub fn enumerate_luk(n: usize) -> Result<Vec<LukPath>> {
    if n == 0 || n > MAX_CATALAN_N {
        return invalid(format!("n = {n} outside the supported range 1..={MAX_CATALAN_N}"));
    }
    let mut out = Vec::new();
    let mut rise = Vec::with_capacity(n);
    fn rec(n: usize, height: i64, rise: &mut Vec<i64>, out: &mut Vec<LukPath>) {
        let remaining = (n - rise.len()) as i64;
        if remaining == 0 {
            if height == 0 {
                out.push(LukPath { rise: rise.clone() });
            }
            return;
        }
        // Each later step can descend by at most one.
        let max_up = remaining - 1 - height;
        for q in -1..=max_up {
            if height + q < 0 {
                continue;
            }
            rise.push(q);
            rec(n, height + q, rise, out);
            rise.pop();
        }
    }
    rec(n, 0, &mut rise, &mut out);
    Ok(out)
}

/// `Ψ`: rise `|V| - 1` at the minimum of each block `V`, `-1` elsewhere.
pub fn psi(p: &Partition) -> LukPath {
    let mut rise = vec![-1i64; p.n()];
    for block in p.blocks() {
        rise[block[0] - 1] = block.len() as i64 - 1;
    }
    LukPath { rise }
}

/// `Φ`: the unique non-crossing partition with `psi(phi(l)) == l`.
///
/// Runs the last-in-first-out process directly: at time `t` the batch of
/// `p_t` balls is pushed and the top ball leaves. Exit times sharing a batch
/// form a block. Kept independent of the deque simulator so each can check
/// the other.
pub fn phi(l: &LukPath) -> Partition {
    let mut stack: Vec<usize> = Vec::new();
    let mut batch_of_time = Vec::with_capacity(l.n());
    for (t, p) in l.batch_sizes().into_iter().enumerate() {
        stack.extend(std::iter::repeat_n(t, p));
        let batch = stack.pop().expect("Lukasiewicz condition keeps the stack non-empty");
        batch_of_time.push(batch);
    }
    Partition::from_labels(&batch_of_time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{enumerate_noncrossing, enumerate_partitions, is_noncrossing};
    use std::collections::BTreeSet;

    #[test]
    fn validate_examples() {
        let l = validate_rise(&[2, -1, 1, -1, -1]).unwrap();
        assert_eq!(l.n(), 5);
        assert_eq!(l.heights(), vec![2, 1, 2, 1, 0]);
        assert!(validate_rise(&[0, 0, 0, 0]).is_ok());
        let err = validate_rise(&[-1, 1]).unwrap_err();
        assert!(matches!(err, Error::NotAPath(_)));
        assert!(err.to_string().contains("first 1 step"), "{err}");
        assert!(matches!(validate_rise(&[1, 0]), Err(Error::NotAPath(_))));
        assert!(matches!(validate_rise(&[2, -2, 0]), Err(Error::NotAPath(_))));
        assert!(validate_rise(&[]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_luk(1).unwrap(), vec![validate_rise(&[0]).unwrap()]);
        assert_eq!(enumerate_luk(4).unwrap().len(), 14);
        assert!(enumerate_luk(0).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force_filter() {
        for n in 1..=6usize {
            // All vectors in {-1..n-1}^n, filtered by the path conditions.
            let mut brute = BTreeSet::new();
            let base = n as i64 + 1;
            let total = (base as u64).pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let q: Vec<i64> = (0..n)
                    .map(|_| {
                        let d = (c % base as u64) as i64 - 1;
                        c /= base as u64;
                        d
                    })
                    .collect();
                if let Ok(l) = validate_rise(&q) {
                    brute.insert(l);
                }
            }
            let got: BTreeSet<_> = enumerate_luk(n).unwrap().into_iter().collect();
            assert_eq!(got, brute, "n={n}");
        }
        assert_eq!(enumerate_luk(5).unwrap().len(), 42);
    }

    #[test]
    fn psi_examples() {
        let p = Partition::new(5, vec![vec![1, 2, 4], vec![3, 5]]).unwrap();
        assert_eq!(psi(&p).rise(), &[2, -1, 1, -1, -1]);
        assert_eq!(psi(&Partition::zero(4).unwrap()).rise(), &[0, 0, 0, 0]);
        assert_eq!(psi(&Partition::one(4).unwrap()).rise(), &[3, -1, -1, -1]);
    }

    #[test]
    fn phi_examples() {
        let l = validate_rise(&[2, -1, 1, -1, -1]).unwrap();
        assert_eq!(
            phi(&l),
            Partition::new(5, vec![vec![1, 2, 5], vec![3, 4]]).unwrap()
        );
        assert_eq!(phi(&LukPath::flat(5).unwrap()), Partition::zero(5).unwrap());
        assert_eq!(phi(&LukPath::single_insertion(5).unwrap()), Partition::one(5).unwrap());
    }

    #[test]
    fn phi_psi_bijection() {
        for n in 1..=7 {
            for l in enumerate_luk(n).unwrap() {
                let p = phi(&l);
                assert!(is_noncrossing(&p));
                assert_eq!(psi(&p), l);
            }
            for p in enumerate_noncrossing(n).unwrap() {
                assert_eq!(phi(&psi(&p)), p);
            }
        }
    }

    #[test]
    fn psi_is_surjective() {
        for n in 1..=6 {
            let image: BTreeSet<_> = enumerate_partitions(n).unwrap().iter().map(psi).collect();
            let all: BTreeSet<_> = enumerate_luk(n).unwrap().into_iter().collect();
            assert_eq!(image, all);
        }
    }

    #[test]
    fn json_shape() {
        let l = validate_rise(&[2, -1, 1, -1, -1]).unwrap();
        assert_eq!(serde_json::to_string(&l).unwrap(), "[2,-1,1,-1,-1]");
        assert!(serde_json::from_str::<LukPath>("[-1,1]").is_err());
    }
}
