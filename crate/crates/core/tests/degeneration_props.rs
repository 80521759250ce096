//! Pyramid, placement, limit and dominance properties of the lower-bound construction.

use subrank_core::degeneration::{
    build_pyramid, build_s, build_t_tilde, build_weight_profile, fits, jacobian_dominance_rank, place_blocks,
    pyramid_closed_form, pyramid_size, Parity,
};
use subrank_core::subgroup::Direction;
use subrank_core::Field;

#[test]
fn enumerated_pyramid_matches_closed_form() {
    for n in 1..=64 {
        for r in 1..=n {
            let p = build_pyramid(&build_weight_profile(n, r).unwrap());
            let c = pyramid_closed_form(n, r);
            assert_eq!(p.points, c.points, "n = {n}, r = {r}");
            assert_eq!(p.len(), pyramid_size(r), "n = {n}, r = {r}");
        }
    }
}

#[test]
fn planted_tensor_degenerates_to_s() {
    let f = Field::Rationals;
    for n in 4..=40 {
        for r in (1..=n).filter(|&r| fits(n, r)) {
            let profile = build_weight_profile(n, r).unwrap();
            let (t, _) = build_t_tilde(&f, n, r).unwrap();
            let s = build_s(&f, n, r).unwrap();
            let lam = profile.subgroup(&f);
            assert_eq!(lam.limit(&t, Direction::ToZero).unwrap(), s, "n = {n}, r = {r}");
            assert_eq!(s.is_diagonal_unit_equivalent(), Some(r));
        }
    }
}

#[test]
fn placement_intervals_are_disjoint_and_ordered() {
    for r in 1..=30 {
        let n = (r + 3) * (r + 3) / 4 + 1;
        let pls = place_blocks(n, r).unwrap();
        assert_eq!(pls.len(), r);
        for parity in [Parity::Even, Parity::Odd] {
            let spans: Vec<(usize, usize)> = pls
                .iter()
                .filter(|p| p.parity == parity)
                .map(|p| if parity == Parity::Even { p.rows } else { p.cols })
                .collect();
            assert!(spans.first().is_none_or(|s| s.0 == r + 1));
            for w in spans.windows(2) {
                assert_eq!(w[0].1 + 1, w[1].0, "r = {r}: {spans:?}");
            }
        }
        for p in &pls {
            assert_eq!(p.layer + p.size() - 1, r);
        }
    }
}

#[test]
fn placement_succeeds_on_the_fit_boundary() {
    for r in 1..=60usize {
        let n = ((r + 3) * (r + 3)).div_ceil(4);
        assert!(fits(n, r));
        assert!(place_blocks(n, r).is_ok(), "r = {r}, n = {n}");
    }
}

#[test]
fn dominance_at_default_sizes() {
    let fp = Field::prime_u64(4_611_686_018_427_387_847).unwrap();
    for (n, r) in [(4, 1), (8, 2), (9, 3), (16, 5), (25, 7), (36, 9), (49, 11), (64, 13)] {
        let pattern = build_pyramid(&build_weight_profile(n, r).unwrap());
        let (t, _) = build_t_tilde(&Field::Rationals, n, r).unwrap();
        assert_eq!(jacobian_dominance_rank(&t, &pattern, &fp).unwrap(), pyramid_size(r), "n = {n}");
    }
}

#[test]
fn some_single_block_deletion_loses_rank() {
    let q = Field::Rationals;
    let fp = Field::prime_u64(1_000_000_007).unwrap();
    for (n, r) in [(8, 2), (9, 3), (16, 5), (25, 7)] {
        let pattern = build_pyramid(&build_weight_profile(n, r).unwrap());
        let (t, placements) = build_t_tilde(&q, n, r).unwrap();
        let mut lost = 0;
        for pl in &placements {
            let mut t2 = t.clone();
            for a in 0..pl.size() {
                t2.set(&[pl.rows.0 - 1 + a, pl.cols.0 - 1 + a, pl.layer - 1], q.zero());
            }
            if jacobian_dominance_rank(&t2, &pattern, &fp).unwrap() < pyramid_size(r) {
                lost += 1;
            }
        }
        assert!(lost > 0, "n = {n}: every block is redundant");
    }
}
