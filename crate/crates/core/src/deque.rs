//! Double-ended queue scenarios and the partition families `P^(chi)(n)`.
//!
//! A scenario is a pair `(path, chi)`: at time `i` the device takes the next
//! `p_i = rise_i + 1` balls from the input pipe, inserts them one at a time
//! from the side `h_i`, then emits the ball sitting at that same end. The
//! output-time partition groups exit times by insertion batch.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::lukasiewicz::{enumerate_luk, LukPath};
use crate::partitions::{act, enumerate_noncrossing, Partition, Permutation, MAX_CATALAN_N};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "l")]
    Left,
    #[serde(rename = "r")]
    Right,
}

impl Side {
    pub fn as_char(self) -> char {
        match self {
            Side::Left => 'l',
            Side::Right => 'r',
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A word `chi = (h_1, ..., h_n)` over `{l, r}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ChiWord {
    letters: Vec<Side>,
}

impl ChiWord {
    pub fn new(letters: Vec<Side>) -> Result<Self> {
        if letters.is_empty() {
            return invalid("a chi-word must have at least one letter");
        }
        Ok(ChiWord { letters })
    }

    pub fn constant(side: Side, n: usize) -> Result<Self> {
        Self::new(vec![side; n])
    }

    /// Every word in `{l, r}^n`, in lexicographic order with `l < r`.
    pub fn all(n: usize) -> Result<Vec<ChiWord>> {
        if n == 0 || n > 30 {
            return invalid(format!("chi-word length {n} outside 1..=30"));
        }
        Ok((0u32..(1 << n))
            .map(|mask| ChiWord {
                letters: (0..n)
                    .map(|k| {
                        if mask & (1 << (n - 1 - k)) != 0 {
                            Side::Right
                        } else {
                            Side::Left
                        }
                    })
                    .collect(),
            })
            .collect())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Side] {
        &self.letters
    }

    /// `h_m` for 1-based `m`.
    pub fn at(&self, m: usize) -> Side {
        self.letters[m - 1]
    }

    /// `m_l(1) < ... < m_l(u)`: the positions holding `l`.
    pub fn left_times(&self) -> Vec<usize> {
        self.positions(Side::Left)
    }

    /// `m_r(1) < ... < m_r(v)`: the positions holding `r`.
    pub fn right_times(&self) -> Vec<usize> {
        self.positions(Side::Right)
    }

    fn positions(&self, side: Side) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &h)| h == side)
            .map(|(k, _)| k + 1)
            .collect()
    }

    /// Number of `l` letters.
    pub fn u(&self) -> usize {
        self.letters.iter().filter(|&&h| h == Side::Left).count()
    }

    /// `chi | V` for a non-empty ascending set of positions.
    pub fn restrict(&self, positions: &[usize]) -> ChiWord {
        ChiWord {
            letters: positions.iter().map(|&m| self.letters[m - 1]).collect(),
        }
    }
}

impl fmt::Display for ChiWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.letters {
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

impl FromStr for ChiWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'l' | 'L' | 'ℓ' => Ok(Side::Left),
                'r' | 'R' => Ok(Side::Right),
                other => Err(Error::Parse(format!(
                    "chi-word {s:?} contains {other:?}; only 'l' and 'r' are allowed"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::Parse("empty chi-word".into()));
        }
        ChiWord::new(letters)
    }
}

impl Serialize for ChiWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChiWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DequeScenario {
    path: LukPath,
    chi: ChiWord,
}

impl DequeScenario {
    pub fn new(path: LukPath, chi: ChiWord) -> Result<Self> {
        if path.n() != chi.len() {
            return invalid(format!(
                "path has {} steps but chi has {} letters",
                path.n(),
                chi.len()
            ));
        }
        Ok(DequeScenario { path, chi })
    }

    pub fn path(&self) -> &LukPath {
        &self.path
    }

    pub fn chi(&self) -> &ChiWord {
        &self.chi
    }

    pub fn n(&self) -> usize {
        self.chi.len()
    }
}

/// What a replayed scenario produced.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ScenarioTrace {
    /// `{T_i : i ∈ I}`.
    pub output_partition: Partition,
    /// Ball labels in the order they reached the output pipe.
    pub exit_order: Vec<usize>,
    /// The insertion times `I = {i : p_i > 0}`, ascending.
    pub insertion_times: Vec<usize>,
    /// `T_i` for each insertion time, aligned with `insertion_times`.
    pub output_blocks: Vec<Vec<usize>>,
}

/// Replays the scenario move by move on an explicit deque of ball labels.
pub fn simulate(s: &DequeScenario) -> ScenarioTrace {
    let n = s.n();
    let batches = s.path.batch_sizes();
    let mut deque: VecDeque<usize> = VecDeque::with_capacity(n);
    let mut next_ball = 1usize;
    // batch_of_ball[b - 1] = insertion time of ball b.
    let mut batch_of_ball = vec![0usize; n];
    let mut exit_order = Vec::with_capacity(n);
    let mut insertion_times = Vec::new();

    for (idx, (&p, &side)) in batches.iter().zip(s.chi.letters()).enumerate() {
        let time = idx + 1;
        assert!(
            next_ball + p <= n + 1,
            "move {time} asks for {p} balls but only {} remain in the input pipe",
            n + 1 - next_ball
        );
        if p > 0 {
            insertion_times.push(time);
        }
        for _ in 0..p {
            batch_of_ball[next_ball - 1] = time;
            match side {
                Side::Left => deque.push_front(next_ball),
                Side::Right => deque.push_back(next_ball),
            }
            next_ball += 1;
        }
        let ball = match side {
            Side::Left => deque.pop_front(),
            Side::Right => deque.pop_back(),
        }
        .unwrap_or_else(|| panic!("move {time} would emit from an empty deque pipe"));
        exit_order.push(ball);
    }
    assert!(deque.is_empty() && next_ball == n + 1);

    let labels: Vec<usize> = exit_order.iter().map(|&b| batch_of_ball[b - 1]).collect();
    let output_blocks = insertion_times
        .iter()
        .map(|&i| {
            labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == i)
                .map(|(t, _)| t + 1)
                .collect()
        })
        .collect();
    ScenarioTrace {
        output_partition: Partition::from_labels(&labels),
        exit_order,
        insertion_times,
        output_blocks,
    }
}

/// `Φ_chi(path)`.
pub fn output_partition(path: &LukPath, chi: &ChiWord) -> Result<Partition> {
    Ok(simulate(&DequeScenario::new(path.clone(), chi.clone())?).output_partition)
}

fn check_catalan_n(n: usize) -> Result<()> {
    if n > MAX_CATALAN_N {
        return invalid(format!("n = {n} exceeds the supported limit {MAX_CATALAN_N}"));
    }
    Ok(())
}

/// `P^(chi)(n)` as the set of output-time partitions over all paths, sorted.
pub fn pchi_by_enumeration(chi: &ChiWord) -> Result<Vec<Partition>> {
    check_catalan_n(chi.len())?;
    let mut seen = BTreeSet::new();
    for path in enumerate_luk(chi.len())? {
        let p = output_partition(&path, chi)?;
        if !seen.insert(p.clone()) {
            return Err(Error::InvariantViolation(format!(
                "Φ_{chi} is not injective: {p} produced twice (second time by {path})"
            )));
        }
    }
    Ok(seen.into_iter().collect())
}

/// `sigma_chi`: `q -> m_l(q)` for `q <= u`, then `u + j -> m_r(v + 1 - j)`.
pub fn sigma_chi(chi: &ChiWord) -> Permutation {
    let mut images = chi.left_times();
    images.extend(chi.right_times().into_iter().rev());
    Permutation::from_images_unchecked(images)
}

/// `P^(chi)(n)` as `{ sigma_chi · π : π ∈ NC(n) }`, sorted.
pub fn pchi_by_sigma(chi: &ChiWord) -> Result<Vec<Partition>> {
    check_catalan_n(chi.len())?;
    let sigma = sigma_chi(chi);
    let mut out = enumerate_noncrossing(chi.len())?
        .iter()
        .map(|p| act(&sigma, p))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Left- and right-standings partitions; `None` when `chi` has no letter of
/// that side.
pub fn standings_partitions(
    path: &LukPath,
    chi: &ChiWord,
) -> Result<(Option<Partition>, Option<Partition>)> {
    let pi = output_partition(path, chi)?;
    let labels = pi.block_labels();
    let side = |times: Vec<usize>| {
        if times.is_empty() {
            None
        } else {
            let restricted: Vec<usize> = times.iter().map(|&m| labels[m - 1]).collect();
            Some(Partition::from_labels(&restricted))
        }
    };
    Ok((side(chi.left_times()), side(chi.right_times())))
}

/// `rho_{path,chi}`: blocks `V_i ∪ ((n+1) - W_i)` over the insertion times.
pub fn combined_standings(path: &LukPath, chi: &ChiWord) -> Result<Partition> {
    let trace = simulate(&DequeScenario::new(path.clone(), chi.clone())?);
    let n = chi.len();
    let left = chi.left_times();
    let right = chi.right_times();
    let blocks = trace
        .output_blocks
        .iter()
        .map(|t_block| {
            let mut block: Vec<usize> = left
                .iter()
                .enumerate()
                .filter(|(_, m)| t_block.contains(m))
                .map(|(q, _)| q + 1)
                .collect();
            block.extend(
                right
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| t_block.contains(m))
                    .map(|(q, _)| n - q),
            );
            block
        })
        .collect();
    Partition::new(n, blocks)
}

/// `chi` read backwards.
pub fn chi_opposite(chi: &ChiWord) -> ChiWord {
    ChiWord {
        letters: chi.letters.iter().rev().copied().collect(),
    }
}

/// `tau_u`: `q -> u+1-q` for `q <= u`, `q -> n+u+1-q` for `q > u`.
pub fn tau_u(n: usize, u: usize) -> Result<Permutation> {
    if n == 0 || u > n {
        return invalid(format!("tau_u needs 0 <= u <= n and n >= 1, got n={n}, u={u}"));
    }
    Permutation::new(
        (1..=n)
            .map(|q| if q <= u { u + 1 - q } else { n + u + 1 - q })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lukasiewicz::{phi, validate_rise};
    use crate::partitions::enumerate_partitions;

    fn chi(s: &str) -> ChiWord {
        s.parse().unwrap()
    }

    fn part(n: usize, blocks: &[&[usize]]) -> Partition {
        Partition::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    fn example_path() -> LukPath {
        validate_rise(&[2, -1, 1, -1, -1]).unwrap()
    }

    #[test]
    fn chi_word_parsing_and_positions() {
        let c = chi("rllrl");
        assert_eq!(c.left_times(), vec![2, 3, 5]);
        assert_eq!(c.right_times(), vec![1, 4]);
        assert_eq!(c.u(), 3);
        assert_eq!(c.to_string(), "rllrl");
        assert!("rlx".parse::<ChiWord>().is_err());
        assert!("".parse::<ChiWord>().is_err());
        assert_eq!(serde_json::to_string(&c).unwrap(), "\"rllrl\"");
        assert_eq!(ChiWord::all(3).unwrap().len(), 8);
        assert_eq!(ChiWord::all(2).unwrap()[1].to_string(), "lr");
    }

    #[test]
    fn simulate_worked_example() {
        let trace = simulate(&DequeScenario::new(example_path(), chi("rllrl")).unwrap());
        assert_eq!(trace.exit_order, vec![3, 1, 5, 2, 4]);
        assert_eq!(trace.output_partition, part(5, &[&[1, 2, 4], &[3, 5]]));
        assert_eq!(trace.insertion_times, vec![1, 3]);
        assert_eq!(trace.output_blocks, vec![vec![1, 2, 4], vec![3, 5]]);
    }

    #[test]
    fn simulate_flat_path() {
        for c in ChiWord::all(4).unwrap() {
            let trace = simulate(&DequeScenario::new(LukPath::flat(4).unwrap(), c).unwrap());
            assert_eq!(trace.output_partition, Partition::zero(4).unwrap());
            assert_eq!(trace.exit_order, vec![1, 2, 3, 4]);
        }
    }

    #[test]
    fn all_left_and_all_right_give_phi() {
        for n in 1..=6 {
            let ls = ChiWord::constant(Side::Left, n).unwrap();
            let rs = ChiWord::constant(Side::Right, n).unwrap();
            for path in enumerate_luk(n).unwrap() {
                assert_eq!(output_partition(&path, &ls).unwrap(), phi(&path));
                assert_eq!(output_partition(&path, &rs).unwrap(), phi(&path));
            }
        }
    }

    #[test]
    fn trace_invariants() {
        for n in 1..=5 {
            for c in ChiWord::all(n).unwrap() {
                for path in enumerate_luk(n).unwrap() {
                    let trace = simulate(&DequeScenario::new(path.clone(), c.clone()).unwrap());
                    let p = path.batch_sizes();
                    for (&i, block) in trace.insertion_times.iter().zip(&trace.output_blocks) {
                        assert_eq!(block.len(), p[i - 1]);
                        assert_eq!(block[0], i);
                    }
                    let mut order = trace.exit_order.clone();
                    order.sort();
                    assert_eq!(order, (1..=n).collect::<Vec<_>>());
                }
            }
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(output_partition(&example_path(), &chi("rl")).is_err());
        assert!(combined_standings(&example_path(), &chi("rl")).is_err());
    }

    #[test]
    fn pchi_examples() {
        let lrlr = pchi_by_enumeration(&chi("lrlr")).unwrap();
        let all4 = enumerate_partitions(4).unwrap();
        let excluded = part(4, &[&[1, 4], &[2, 3]]);
        let expected: Vec<_> = all4.iter().filter(|&p| *p != excluded).cloned().collect();
        assert_eq!(lrlr, expected);
        assert!(lrlr.contains(&part(4, &[&[1, 3], &[2, 4]])));
        assert_eq!(pchi_by_sigma(&chi("lrlr")).unwrap(), lrlr);

        assert_eq!(
            pchi_by_enumeration(&chi("llll")).unwrap(),
            enumerate_noncrossing(4).unwrap()
        );
        for n in 1..=3 {
            for c in ChiWord::all(n).unwrap() {
                assert_eq!(pchi_by_enumeration(&c).unwrap(), enumerate_partitions(n).unwrap());
            }
        }
        assert_eq!(pchi_by_sigma(&chi("lll")).unwrap(), enumerate_noncrossing(3).unwrap());
        assert!(pchi_by_sigma(&chi("rllrl"))
            .unwrap()
            .contains(&part(5, &[&[1, 2, 4], &[3, 5]])));
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_chi(&chi("rllrl")).images(), &[2, 3, 5, 4, 1]);
        assert_eq!(sigma_chi(&chi("lrlr")).images(), &[1, 3, 4, 2]);
        assert_eq!(sigma_chi(&chi("llll")), Permutation::identity(4).unwrap());
        assert_eq!(sigma_chi(&chi("rrrr")), Permutation::reversal(4).unwrap());
    }

    #[test]
    fn standings_examples() {
        let (left, right) = standings_partitions(&example_path(), &chi("rllrl")).unwrap();
        assert_eq!(left, Some(part(3, &[&[1], &[2, 3]])));
        assert_eq!(right, Some(part(2, &[&[1, 2]])));

        let path = validate_rise(&[1, 0, -1, 0]).unwrap();
        let (left, right) = standings_partitions(&path, &chi("llll")).unwrap();
        assert_eq!(left, Some(output_partition(&path, &chi("llll")).unwrap()));
        assert_eq!(right, None);

        let (left, right) = standings_partitions(&LukPath::flat(5).unwrap(), &chi("rllrl")).unwrap();
        assert_eq!(left, Some(Partition::zero(3).unwrap()));
        assert_eq!(right, Some(Partition::zero(2).unwrap()));
    }

    #[test]
    fn combined_standings_examples() {
        assert_eq!(
            combined_standings(&example_path(), &chi("rllrl")).unwrap(),
            part(5, &[&[1, 4, 5], &[2, 3]])
        );
        for n in 1..=6 {
            let ls = ChiWord::constant(Side::Left, n).unwrap();
            for path in enumerate_luk(n).unwrap() {
                assert_eq!(combined_standings(&path, &ls).unwrap(), phi(&path));
            }
            for c in ChiWord::all(n).unwrap() {
                assert_eq!(
                    combined_standings(&LukPath::single_insertion(n).unwrap(), &c).unwrap(),
                    Partition::one(n).unwrap()
                );
            }
        }
    }

    #[test]
    fn chi_opposite_examples() {
        assert_eq!(chi_opposite(&chi("rllrl")), chi("lrllr"));
        assert_eq!(chi_opposite(&chi("llll")), chi("llll"));
        for c in ChiWord::all(5).unwrap() {
            assert_eq!(chi_opposite(&chi_opposite(&c)), c);
        }
    }

    #[test]
    fn tau_u_examples() {
        assert_eq!(tau_u(5, 0).unwrap(), Permutation::reversal(5).unwrap());
        assert_eq!(tau_u(5, 5).unwrap(), Permutation::reversal(5).unwrap());
        assert_eq!(tau_u(5, 3).unwrap().images(), &[3, 2, 1, 5, 4]);
        assert!(tau_u(3, 4).is_err());
    }
}
