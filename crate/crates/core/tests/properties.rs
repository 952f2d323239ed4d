//! Randomized properties, mostly at sizes beyond the exhaustive suites.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_rational::BigRational;
use proptest::prelude::*;

use lr_cumulants::cumulants::{LrCumulants, MomentFunctional, TabulatedFunctional};
use lr_cumulants::deque::{
    chi_opposite, combined_standings, output_partition, sigma_chi, ChiWord, Side,
};
use lr_cumulants::fock::{
    adjoint, bimixture_symbol, c_word, canonical_operator, reverse_bimixture_symbol, CoefficientSource, FockEngine,
    FockVector, RationalTable,
};
use lr_cumulants::lukasiewicz::{enumerate_luk, phi, psi, LukPath};
use lr_cumulants::partitions::{act, enumerate_noncrossing, leq, meet, opposite, Partition, Permutation};
use lr_cumulants::scalar::rational;

fn luk_paths(n: usize) -> &'static [LukPath] {
    static CACHE: OnceLock<Vec<Vec<LukPath>>> = OnceLock::new();
    &CACHE.get_or_init(|| (0..=10).map(|n| if n == 0 { Vec::new() } else { enumerate_luk(n).unwrap() }).collect())[n]
}

fn noncrossing(n: usize) -> &'static [Partition] {
    static CACHE: OnceLock<Vec<Vec<Partition>>> = OnceLock::new();
    &CACHE.get_or_init(|| (0..=9).map(|n| if n == 0 { Vec::new() } else { enumerate_noncrossing(n).unwrap() }).collect())
        [n]
}

fn from_labels(labels: &[usize]) -> Partition {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(k + 1);
    }
    Partition::new(labels.len(), groups.into_values().collect()).unwrap()
}

fn chi_from_bits(bits: &[bool]) -> ChiWord {
    ChiWord::new(bits.iter().map(|&b| if b { Side::Right } else { Side::Left }).collect()).unwrap()
}

fn partition(max_n: usize) -> impl Strategy<Value = Partition> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(0..n, n)).prop_map(|l| from_labels(&l))
}

fn partition_pair(max_n: usize) -> impl Strategy<Value = (Partition, Partition)> {
    (1..=max_n)
        .prop_flat_map(|n| (prop::collection::vec(0..n, n), prop::collection::vec(0..n, n)))
        .prop_map(|(a, b)| (from_labels(&a), from_labels(&b)))
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::new(images).unwrap())
}

/// A Lukasiewicz path and a chi-word of the same length `n` in `lo..=hi`.
fn scenario(lo: usize, hi: usize) -> impl Strategy<Value = (LukPath, ChiWord)> {
    (lo..=hi).prop_flat_map(|n| {
        (0..luk_paths(n).len(), prop::collection::vec(any::<bool>(), n))
            .prop_map(move |(k, bits)| (luk_paths(n)[k].clone(), chi_from_bits(&bits)))
    })
}

fn crossing(p: &Partition) -> bool {
    let n = p.n();
    let label = |m: usize| p.blocks().iter().position(|b| b.contains(&m)).unwrap();
    (1..=n).any(|a| {
        (a + 1..=n).any(|b| {
            (b + 1..=n).any(|c| {
                (c + 1..=n).any(|d| label(a) == label(c) && label(b) == label(d) && label(a) != label(b))
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn meet_is_the_greatest_lower_bound((a, b) in partition_pair(9)) {
        let m = meet(&a, &b).unwrap();
        prop_assert!(leq(&m, &a).unwrap() && leq(&m, &b).unwrap());
        prop_assert_eq!(meet(&b, &a).unwrap(), m.clone());
        prop_assert_eq!(leq(&a, &b).unwrap(), m == a);
    }

    #[test]
    fn noncrossing_matches_the_four_point_definition(p in partition(9)) {
        prop_assert_eq!(p.is_noncrossing(), !crossing(&p));
    }

    #[test]
    fn opposite_is_an_involution_preserving_crossings(p in partition(9)) {
        let o = opposite(&p);
        prop_assert_eq!(opposite(&o), p.clone());
        prop_assert_eq!(o.is_noncrossing(), p.is_noncrossing());
    }

    #[test]
    fn action_respects_composition_and_inverse(
        (p, s, t) in (1usize..=8).prop_flat_map(|n| {
            (prop::collection::vec(0..n, n).prop_map(|l| from_labels(&l)), permutation(n), permutation(n))
        })
    ) {
        let moved = act(&s, &act(&t, &p).unwrap()).unwrap();
        prop_assert_eq!(moved, act(&s.compose(&t).unwrap(), &p).unwrap());
        prop_assert_eq!(act(&s.inverse(), &act(&s, &p).unwrap()).unwrap(), p);
    }

    #[test]
    fn psi_and_phi_are_inverse_on_noncrossing(
        p in (1usize..=9).prop_flat_map(|n| (0..noncrossing(n).len()).prop_map(move |k| noncrossing(n)[k].clone()))
    ) {
        let path = psi(&p);
        prop_assert_eq!(phi(&path), p);
        prop_assert_eq!(psi(&phi(&path)), path);
    }

    #[test]
    fn psi_of_any_partition_is_a_path(p in partition(9)) {
        let path = psi(&p);
        let mut height = 0i64;
        for &q in path.rise() {
            prop_assert!(q >= -1);
            height += q;
            prop_assert!(height >= 0);
        }
        prop_assert_eq!(height, 0);
    }

    #[test]
    fn scenario_lemmas_beyond_the_exhaustive_range((path, chi) in scenario(7, 10)) {
        let pi = output_partition(&path, &chi).unwrap();
        let rho = combined_standings(&path, &chi).unwrap();
        let sigma = sigma_chi(&chi);
        prop_assert!(rho.is_noncrossing());
        prop_assert_eq!(act(&sigma, &rho).unwrap(), pi.clone());
        prop_assert!(act(&sigma.inverse(), &pi).unwrap().is_noncrossing());
        prop_assert_eq!(psi(&pi), path);
    }

    #[test]
    fn double_opposite_word_is_the_word(bits in prop::collection::vec(any::<bool>(), 1..=12)) {
        let chi = chi_from_bits(&bits);
        prop_assert_eq!(chi_opposite(&chi_opposite(&chi)), chi.clone());
        prop_assert_eq!(chi_opposite(&chi).u(), chi.u());
    }

    #[test]
    fn mirroring_the_deque_swaps_sides_without_changing_the_output((path, chi) in scenario(1, 10)) {
        let swapped = ChiWord::new(
            chi.letters().iter().map(|&h| if h == Side::Left { Side::Right } else { Side::Left }).collect(),
        )
        .unwrap();
        prop_assert_eq!(output_partition(&path, &swapped).unwrap(), output_partition(&path, &chi).unwrap());
    }
}

fn word_and_chi(max_n: usize, d: usize) -> impl Strategy<Value = (Vec<usize>, ChiWord)> {
    (1..=max_n).prop_flat_map(move |n| {
        (prop::collection::vec(1..=d, n), prop::collection::vec(any::<bool>(), n))
            .prop_map(|(w, bits)| (w, chi_from_bits(&bits)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_are_recovered_from_cumulants(seed in any::<u64>(), (w, chi) in word_and_chi(5, 3)) {
        let phi: TabulatedFunctional<BigRational> = TabulatedFunctional::random(3, 5, seed);
        let eval = LrCumulants::new(&phi);
        prop_assert_eq!(eval.moment_from_own_cumulants(&chi, &w).unwrap(), phi.moment(&w));
    }

    #[test]
    fn all_left_and_all_right_cumulants_agree(seed in any::<u64>(), (w, _) in word_and_chi(5, 3)) {
        let phi: TabulatedFunctional<BigRational> = TabulatedFunctional::random(3, 5, seed);
        let eval = LrCumulants::new(&phi);
        let n = w.len();
        let left = eval.cumulant(&ChiWord::constant(Side::Left, n).unwrap(), &w).unwrap();
        let right = eval.cumulant(&ChiWord::constant(Side::Right, n).unwrap(), &w).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn cumulant_of_canonical_operators_is_a_table_entry(seed in any::<u64>(), (w, chi) in word_and_chi(5, 3)) {
        let table = RationalTable::random(3, w.len(), seed).unwrap();
        let engine = FockEngine::new(&table);
        let kappa = LrCumulants::new(&engine).cumulant(&chi, &c_word(&w, &chi).unwrap()).unwrap();
        prop_assert_eq!(kappa, table.coefficient(&bimixture_symbol(&w, &chi).unwrap()));
    }

    #[test]
    fn bimixture_is_the_reversed_reverse_bimixture((w, chi) in word_and_chi(8, 4)) {
        let rev_w: Vec<usize> = w.iter().rev().copied().collect();
        let rev_chi = ChiWord::new(chi.letters().iter().rev().copied().collect()).unwrap();
        prop_assert_eq!(
            bimixture_symbol(&w, &chi).unwrap(),
            reverse_bimixture_symbol(&rev_w, &rev_chi).unwrap()
        );
    }

    #[test]
    fn canonical_operator_adjoint_is_the_hilbert_adjoint(
        seed in any::<u64>(),
        i in 1usize..=2,
        right in any::<bool>(),
        x in sparse_vector(),
        y in sparse_vector(),
    ) {
        let table = RationalTable::random(2, 3, seed).unwrap();
        let side = if right { Side::Right } else { Side::Left };
        let op = canonical_operator(i, side, &table).unwrap();
        let star = adjoint(&op);
        prop_assert_eq!(op.apply(&x).inner(&y), x.inner(&star.apply(&y)));
    }

    #[test]
    fn engine_moments_round_trip_through_cumulants(seed in any::<u64>(), (w, chi) in word_and_chi(4, 2)) {
        let table = RationalTable::random(2, 4, seed).unwrap();
        let engine = FockEngine::new(&table);
        let via_engine = engine.moment_of(&c_word(&w, &chi).unwrap()).unwrap();
        let via_cumulants = LrCumulants::new(&engine)
            .moment_from_own_cumulants(&chi, &c_word(&w, &chi).unwrap())
            .unwrap();
        prop_assert_eq!(via_engine, via_cumulants);
    }
}

fn sparse_vector() -> impl Strategy<Value = FockVector<BigRational>> {
    prop::collection::vec((prop::collection::vec(1usize..=2, 0..=3), -4i64..=4), 0..6).prop_map(|terms| {
        let mut v = FockVector::zero();
        for (word, c) in terms {
            v.add_term(word, rational(c, 1));
        }
        v
    })
}
