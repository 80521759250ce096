//! Bound calculator and slice-cover properties.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;

use subrank_core::bounds::{
    border_subrank_generic_upper, d3_lower, dmz_interval, formula_dim_upper, formula_equal_dims_simplified,
    generic_subrank, isqrt, max_locus_bounds,
};
use subrank_core::slices::{covers, downward_closed_subsets_3d, hypercube_dichotomy, min_slice_cover, Dichotomy};

#[test]
fn lower_bound_below_upper_bound() {
    for n in 4..=10_000 {
        let upper = border_subrank_generic_upper(3, n).unwrap();
        assert!(d3_lower(n) <= upper, "n = {n}");
        assert!(upper <= n);
    }
}

#[test]
fn border_upper_grows_like_sqrt() {
    // r / sqrt(n) stays inside a fixed band, approaching sqrt(135) from below
    for n in [1_000u64, 5_000, 20_000, 50_000, 100_000] {
        let r = border_subrank_generic_upper(3, n).unwrap();
        assert!(r * r <= 135 * n && r * r >= 125 * n, "n = {n}: r = {r}");
    }
}

#[test]
fn max_locus_bounds_are_ordered() {
    for n in (3..=99).step_by(3) {
        let (lo, hi) = max_locus_bounds(n).unwrap();
        assert!(lo <= hi, "n = {n}");
    }
}

#[test]
fn downward_closed_dichotomy_soundness() {
    for p in downward_closed_subsets_3d(3) {
        for s in 1..=3 {
            match hypercube_dichotomy(&p, s, 3).unwrap() {
                Dichotomy::Hypercube { s } => assert!(p.contains(&vec![s; 3])),
                Dichotomy::Cover(c) => {
                    assert!(covers(&c, &p));
                    assert!(min_slice_cover(&p, &[3, 3, 3]).unwrap() <= c.len());
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn isqrt_is_the_floor_root(v in 0u128..u128::MAX / 4) {
        let r = isqrt(&BigInt::from(v));
        prop_assert!(&r * &r <= BigInt::from(v));
        prop_assert!((&r + 1u32) * (&r + 1u32) > BigInt::from(v));
    }

    #[test]
    fn simplified_form_matches(d in 2usize..=6, n in 1u64..=300, k in 0u64..=60) {
        let r = (k * d as u64).min(n - n % d as u64);
        prop_assert_eq!(formula_equal_dims_simplified(d, n, r).unwrap(), formula_dim_upper(d, &vec![n; d], r).unwrap());
    }

    #[test]
    fn dmz_interval_is_ordered(n in 1u64..=1_000_000) {
        let (lo, hi) = dmz_interval(n);
        prop_assert!(lo <= hi);
        prop_assert_eq!(hi, generic_subrank(n));
        prop_assert_eq!(lo % 3, 0);
    }

    #[test]
    fn min_cover_never_beats_a_single_axis(points in prop::collection::btree_set(prop::collection::vec(1usize..=4, 3), 0..12)) {
        let points: BTreeSet<Vec<usize>> = points;
        let m = min_slice_cover(&points, &[4, 4, 4]).unwrap();
        for axis in 0..3 {
            let values: BTreeSet<usize> = points.iter().map(|p| p[axis]).collect();
            prop_assert!(m <= values.len());
        }
        prop_assert!(m <= points.len());
    }
}
