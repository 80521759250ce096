//! Coordinate slices covering index sets: the hypercube/slice dichotomy for
//! downward-closed sets and exact minimum slice covers.
//!
//! Index tuples are 1-based.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// The coordinate slice `{x : x[axis] = value}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slice {
    pub axis: usize,
    pub value: usize,
}

impl Slice {
    pub fn contains(&self, idx: &[usize]) -> bool {
        idx[self.axis] == self.value
    }
}

pub fn covers(slices: &[Slice], points: &BTreeSet<Vec<usize>>) -> bool {
    points.iter().all(|p| slices.iter().any(|s| s.contains(p)))
}

/// Checks that every point has order `d`, positive coordinates, and that all
/// its unit decrements stay in the set.
pub fn check_downward_closed(points: &BTreeSet<Vec<usize>>, d: usize) -> Result<()> {
    for p in points {
        if p.len() != d || p.contains(&0) {
            return Err(Error::InvalidParameter(format!("{p:?} is not a 1-based index of order {d}")));
        }
        for i in 0..d {
            if p[i] > 1 {
                let mut q = p.clone();
                q[i] -= 1;
                if !points.contains(&q) {
                    return Err(Error::NotDownwardClosed(q));
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dichotomy {
    /// `[s]^d` is contained in the set.
    Hypercube { s: usize },
    /// The `d (s - 1)` slices `x_i = c`, `c < s`, cover the set.
    Cover(Vec<Slice>),
}

/// Every index tuple in `[s]^d`.
pub fn hypercube(s: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..=s).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

/// Either `[s]^d` sits inside the downward-closed `points`, or `points` has no
/// point with all coordinates `>= s` and the `d (s - 1)` low slices cover it.
/// Both outcomes are checked by enumeration before returning.
pub fn hypercube_dichotomy(points: &BTreeSet<Vec<usize>>, s: usize, d: usize) -> Result<Dichotomy> {
    if s == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!("need s, d >= 1, got s = {s}, d = {d}")));
    }
    check_downward_closed(points, d)?;
    if points.contains(&vec![s; d]) {
        if let Some(missing) = hypercube(s, d).into_iter().find(|p| !points.contains(p)) {
            return Err(Error::NotDownwardClosed(missing));
        }
        return Ok(Dichotomy::Hypercube { s });
    }
    let cover: Vec<Slice> = (0..d)
        .flat_map(|axis| (1..s).map(move |value| Slice { axis, value }))
        .collect();
    if let Some(p) = points.iter().find(|p| !cover.iter().any(|s| s.contains(p))) {
        // only reachable for sets that are not downward closed
        return Err(Error::NotDownwardClosed(p.iter().map(|&x| x.min(s)).collect()));
    }
    Ok(Dichotomy::Cover(cover))
}

/// Upper limit on the branch-and-bound search tree.
pub const SEARCH_GUARD: u128 = 50_000_000;

/// Minimum number of coordinate slices covering `support`.
///
/// Some slice through any uncovered point must be chosen, so branching over
/// the `d` slices of the first uncovered point is exhaustive. The search is
/// bounded by the best cover found so far; `d^depth` is guarded up front with
/// `depth` the trivial bound `min_i n_i`.
pub fn min_slice_cover(support: &BTreeSet<Vec<usize>>, dims: &[usize]) -> Result<usize> {
    let d = dims.len();
    if let Some(p) = support.iter().find(|p| p.len() != d || p.iter().zip(dims).any(|(&x, &n)| x == 0 || x > n)) {
        return Err(Error::InvalidParameter(format!("{p:?} lies outside dims {dims:?}")));
    }
    if support.is_empty() {
        return Ok(0);
    }
    // one slice per value of the smallest axis always suffices
    let (best_axis, &depth) = dims.iter().enumerate().min_by_key(|(_, &n)| n).expect("d >= 1");
    let tree = (d as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
    if tree > SEARCH_GUARD {
        return Err(Error::SizeGuard(format!("search tree {d}^{depth} exceeds {SEARCH_GUARD}")));
    }
    let points: Vec<&Vec<usize>> = support.iter().collect();
    let used_values: BTreeSet<usize> = points.iter().map(|p| p[best_axis]).collect();
    let mut best = used_values.len();
    let mut chosen: Vec<Slice> = Vec::new();
    search(&points, &mut chosen, &mut best);
    Ok(best)
}

fn search(points: &[&Vec<usize>], chosen: &mut Vec<Slice>, best: &mut usize) {
    if chosen.len() >= *best {
        return;
    }
    let Some(p) = points.iter().find(|p| !chosen.iter().any(|s| s.contains(p))) else {
        *best = chosen.len();
        return;
    };
    if chosen.len() + 1 >= *best {
        return;
    }
    for axis in 0..p.len() {
        chosen.push(Slice { axis, value: p[axis] });
        search(points, chosen, best);
        chosen.pop();
    }
}

/// All downward-closed subsets of `[m]^3`, as monotone height functions on `[m]^2`.
pub fn downward_closed_subsets_3d(m: usize) -> Vec<BTreeSet<Vec<usize>>> {
    fn fill(m: usize, cell: usize, heights: &mut Vec<usize>, out: &mut Vec<BTreeSet<Vec<usize>>>) {
        if cell == m * m {
            let mut set = BTreeSet::new();
            for j in 0..m {
                for k in 0..m {
                    for l in 1..=heights[j * m + k] {
                        set.insert(vec![j + 1, k + 1, l]);
                    }
                }
            }
            out.push(set);
            return;
        }
        let (j, k) = (cell / m, cell % m);
        let mut cap = m;
        if j > 0 {
            cap = cap.min(heights[(j - 1) * m + k]);
        }
        if k > 0 {
            cap = cap.min(heights[j * m + k - 1]);
        }
        for h in 0..=cap {
            heights.push(h);
            fill(m, cell + 1, heights, out);
            heights.pop();
        }
    }
    let mut out = Vec::new();
    fill(m, 0, &mut Vec::new(), &mut out);
    out
}
