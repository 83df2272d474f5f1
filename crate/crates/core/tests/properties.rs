//! Cross-module invariants exercised through the public API, at the sizes
//! the library promises.

use annular_core::annular_nc::{
    enumerate_ann_nc, gammas, is_connected, kreweras, AnnulusShape, ConnectivityFilter,
};
use annular_core::moments::{
    classical_cumulant_exact, connected_cumulant_exact, finite_n_covariance_identity,
    gue_trace_product_exact, wishart_limit_covariance, wishart_limit_moment,
    wishart_trace_product_exact, Word,
};
use annular_core::permcore::{symmetric_group, GroundSet, Permutation};
use annular_core::BigRational;
use num_traits::{Signed, Zero};

#[test]
fn joint_orbit_bound_exhaustive_s6() {
    // #τ + #(τ⁻¹σ) + #σ ≤ n + 2·#(τ ∨ σ) over all of S(6) × S(6).
    let ground = GroundSet::contiguous(6);
    let all: Vec<Permutation> = symmetric_group(&ground).collect();
    for tau in &all {
        for sigma in &all {
            let prod = tau.inverse().compose(sigma).unwrap();
            let lhs = tau.orbit_count() + prod.orbit_count() + sigma.orbit_count();
            assert!(lhs <= 6 + 2 * tau.joint_orbit_count(sigma).unwrap());
        }
    }
}

#[test]
fn cayley_distance_is_a_metric_on_s4() {
    let ground = GroundSet::contiguous(4);
    let all: Vec<Permutation> = symmetric_group(&ground).collect();
    for a in &all {
        for b in &all {
            let d = a.cayley_distance(b).unwrap();
            assert_eq!(d == 0, a == b);
            assert_eq!(d, b.cayley_distance(a).unwrap());
            for c in &all {
                assert!(d + b.cayley_distance(c).unwrap() >= a.cayley_distance(c).unwrap());
            }
        }
    }
}

#[test]
fn kreweras_complements_orbit_counts() {
    // #τ + #K(τ) is p+q on connected members and p+q+2 on disconnected
    // ones, and K preserves connectivity.
    for n in 2..=7u32 {
        for p in 1..n {
            let shape = AnnulusShape::two(p, n - p);
            for tau in enumerate_ann_nc(&shape, ConnectivityFilter::All).unwrap() {
                let k = kreweras(&tau, &shape).unwrap();
                let connected = is_connected(&tau, &shape).unwrap();
                assert_eq!(is_connected(&k, &shape).unwrap(), connected);
                let expected = if connected { n } else { n + 2 } as usize;
                assert_eq!(tau.orbit_count() + k.orbit_count(), expected);
            }
        }
    }
}

#[test]
fn pair_members_biject_with_matching_partitions_at_n8() {
    use std::collections::HashSet;
    for p in 1..8u32 {
        let shape = AnnulusShape::two(p, 8 - p);
        let members = enumerate_ann_nc(&shape, ConnectivityFilter::All).unwrap();
        let pair_perms: Vec<&Permutation> = members
            .iter()
            .filter(|t| t.cycles().iter().all(|c| c.len() == 2))
            .collect();
        let matching_partitions: HashSet<Vec<u32>> = members
            .iter()
            .map(|t| t.orbit_partition())
            .filter(|pi| pi.is_complete_matching())
            .map(|pi| pi.rgs_key())
            .collect();
        let images: HashSet<Vec<u32>> = pair_perms
            .iter()
            .map(|t| t.orbit_partition().rgs_key())
            .collect();
        assert_eq!(images.len(), pair_perms.len(), "injective at p = {p}");
        assert_eq!(images, matching_partitions, "onto at p = {p}");
    }
}

#[test]
fn cumulant_identity_over_all_tuples_up_to_total_seven() {
    // Möbius-inversion cumulants equal connected-sum cumulants for every
    // composition of every total length ≤ 7, every lettering over {1, 2},
    // and every M, N ≤ 3.
    fn compositions(total: u32) -> Vec<Vec<u32>> {
        if total == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for first in 1..=total {
            for mut rest in compositions(total - first) {
                let mut comp = vec![first];
                comp.append(&mut rest);
                out.push(comp);
            }
        }
        out
    }
    let mut cases = 0u64;
    for total in 1..=7u32 {
        for lengths in compositions(total) {
            for mask in 0u32..(1 << total) {
                let mut words = Vec::with_capacity(lengths.len());
                let mut bit = 0;
                for &len in &lengths {
                    let letters: Vec<u32> = (0..len)
                        .map(|_| {
                            let letter = 1 + ((mask >> bit) & 1);
                            bit += 1;
                            letter
                        })
                        .collect();
                    words.push(Word::new(letters, 2).unwrap());
                }
                for m in 1..=3u64 {
                    for n in 1..=3u64 {
                        assert_eq!(
                            classical_cumulant_exact(&words, m, n).unwrap(),
                            connected_cumulant_exact(&words, m, n).unwrap(),
                            "words {words:?}, M={m}, N={n}"
                        );
                        cases += 1;
                    }
                }
            }
        }
    }
    println!("cumulant identity verified on {cases} cases");
}

#[test]
fn finite_moments_shrink_toward_the_limit() {
    // With M = cN the exact finite moment approaches the polynomial value;
    // the gap shrinks monotonically along N = 4, 8, 16, 32.
    let words = [
        Word::from_letters(vec![1]).unwrap(),
        Word::from_letters(vec![1, 1]).unwrap(),
        Word::from_letters(vec![1, 2, 1]).unwrap(),
    ];
    for w in &words {
        let poly = wishart_limit_moment(w).unwrap();
        for c in [1u64, 2] {
            let target = poly.eval(&BigRational::from_integer(c.into()));
            let mut previous: Option<BigRational> = None;
            for n in [4u64, 8, 16, 32] {
                let finite = wishart_trace_product_exact(std::slice::from_ref(w), c * n, n).unwrap();
                let gap = (finite - &target).abs();
                if let Some(prev) = previous {
                    if prev.is_zero() {
                        assert!(gap.is_zero());
                    } else {
                        assert!(gap < prev, "word {w}, c = {c}, N = {n}");
                    }
                }
                previous = Some(gap);
            }
        }
    }
}

#[test]
fn scaled_covariances_shrink_toward_the_limit() {
    let pairs = [
        (
            Word::from_letters(vec![1]).unwrap(),
            Word::from_letters(vec![1]).unwrap(),
        ),
        (
            Word::from_letters(vec![1, 1]).unwrap(),
            Word::from_letters(vec![1]).unwrap(),
        ),
        (
            Word::from_letters(vec![1, 2]).unwrap(),
            Word::from_letters(vec![2, 1]).unwrap(),
        ),
    ];
    for (v, w) in &pairs {
        let poly = wishart_limit_covariance(v, w).unwrap();
        for c in [1u64, 2] {
            let target = poly.eval(&BigRational::from_integer(c.into()));
            let mut previous: Option<BigRational> = None;
            for n in [4u64, 8, 16, 32] {
                let (lhs, rhs) = finite_n_covariance_identity(v, w, c * n, n).unwrap();
                assert_eq!(lhs, rhs);
                let gap = (lhs - &target).abs();
                if let Some(prev) = previous {
                    if prev.is_zero() {
                        assert!(gap.is_zero());
                    } else {
                        assert!(gap < prev, "pair ({v}; {w}), c = {c}, N = {n}");
                    }
                }
                previous = Some(gap);
            }
        }
    }
}

#[test]
fn gue_odd_moments_vanish_exactly() {
    let odd_singles = [vec![1u32], vec![1, 1, 1], vec![1, 2, 1, 2, 1]];
    for letters in &odd_singles {
        let w = Word::from_letters(letters.clone()).unwrap();
        for n in [1u64, 3, 7] {
            assert!(gue_trace_product_exact(std::slice::from_ref(&w), n)
                .unwrap()
                .is_zero());
        }
    }
    let v = Word::from_letters(vec![1, 1]).unwrap();
    let w = Word::from_letters(vec![1, 1, 1]).unwrap();
    assert!(gue_trace_product_exact(&[v, w], 4).unwrap().is_zero());
}

#[test]
fn limit_covariance_is_symmetric_for_all_short_words() {
    // Swapping the two circles relabels the annulus, so the polynomial
    // cannot change. All words of length ≤ 3 over two letters.
    let mut words = Vec::new();
    for len in 1..=3u32 {
        for mask in 0u32..(1 << len) {
            let letters: Vec<u32> = (0..len).map(|b| 1 + ((mask >> b) & 1)).collect();
            words.push(Word::new(letters, 2).unwrap());
        }
    }
    for v in &words {
        for w in &words {
            assert_eq!(
                wishart_limit_covariance(v, w).unwrap(),
                wishart_limit_covariance(w, v).unwrap(),
                "{v} vs {w}"
            );
        }
    }
}

#[test]
fn gamma_rotations_commute() {
    for shape in [
        AnnulusShape::two(5, 3),
        AnnulusShape::two(1, 4),
        AnnulusShape::new(vec![3, 2, 2]).unwrap(),
    ] {
        let (per, product) = gammas(&shape);
        let mut left = per[0].clone();
        for rho in &per[1..] {
            left = left.compose(rho).unwrap();
        }
        let mut right = per.last().unwrap().clone();
        for rho in per[..per.len() - 1].iter().rev() {
            right = right.compose(rho).unwrap();
        }
        assert_eq!(left, product);
        assert_eq!(right, product);
    }
}
