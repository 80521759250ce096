//! Closed-form subrank and border-subrank bounds, in exact integer arithmetic.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// `floor(sqrt(v))` by binary search.
pub fn isqrt(v: &BigInt) -> BigInt {
    assert!(!v.is_negative(), "square root of a negative number");
    let mut lo = BigInt::zero();
    let mut hi = BigInt::one() << (v.bits() / 2 + 1);
    // invariant: lo^2 <= v < hi^2
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if &mid * &mid <= *v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn isqrt_u64(v: u64) -> u64 {
    isqrt(&BigInt::from(v)).to_u64().expect("fits")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formula {
    /// Dimension bound for tensors of border subrank at least `r`.
    DimUpper,
    /// The same bound on equal dimensions with `d | r`.
    DimUpperEqualDims,
    GenericBorderUpper,
    D3Lower,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub d: usize,
    pub dims: Vec<u64>,
    pub r: u64,
    /// `floor(r / d)`, always recomputed.
    pub s: u64,
    pub value: BigInt,
    pub formula: Formula,
}

/// `prod n_i - s^d + sum 2 s (n_i - s) + r (1 + d (r - 1) + sum (n_i - r))` with `s = floor(r/d)`.
pub fn formula_dim_upper(d: usize, dims: &[u64], r: u64) -> Result<BigInt> {
    if d < 2 || dims.len() != d || dims.iter().any(|&n| n == 0) {
        return Err(Error::InvalidParameter(format!("need d >= 2 and d positive dimensions, got d = {d}, dims = {dims:?}")));
    }
    let s = BigInt::from(r / d as u64);
    let r = BigInt::from(r);
    let d_big = BigInt::from(d);
    let prod: BigInt = dims.iter().map(|&n| BigInt::from(n)).product();
    let s_pow = num_traits::pow(s.clone(), d);
    let two_s: BigInt = dims.iter().map(|&n| 2 * &s * (BigInt::from(n) - &s)).sum();
    let excess: BigInt = dims.iter().map(|&n| BigInt::from(n) - &r).sum();
    Ok(prod - s_pow + two_s + &r * (BigInt::one() + d_big * (&r - 1) + excess))
}

pub fn dim_upper_report(d: usize, dims: &[u64], r: u64) -> Result<BoundReport> {
    Ok(BoundReport {
        d,
        dims: dims.to_vec(),
        r,
        s: r / d as u64,
        value: formula_dim_upper(d, dims, r)?,
        formula: Formula::DimUpper,
    })
}

/// `n^d - (r/d)^d + r (2 (n - r/d) + d (n - 1) + 1)` for `d | r`.
pub fn formula_equal_dims_simplified(d: usize, n: u64, r: u64) -> Result<BigInt> {
    if d < 2 || r % d as u64 != 0 {
        return Err(Error::InvalidParameter(format!("need d >= 2 dividing r, got d = {d}, r = {r}")));
    }
    let n = BigInt::from(n);
    let q = BigInt::from(r / d as u64);
    let r = BigInt::from(r);
    Ok(num_traits::pow(n.clone(), d) - num_traits::pow(q.clone(), d)
        + &r * (2 * (&n - &q) + BigInt::from(d) * (&n - 1) + 1))
}

/// Largest `r <= n` whose dimension bound still reaches `n^d`; every `r` is tested.
pub fn border_subrank_generic_upper(d: usize, n: u64) -> Result<u64> {
    let dims = vec![n; d];
    let full = num_traits::pow(BigInt::from(n), d);
    for r in (0..=n).rev() {
        if formula_dim_upper(d, &dims, r)? >= full {
            return Ok(r);
        }
    }
    Ok(0)
}

/// `floor(sqrt(4n)) - 3`, reported as 0 when not positive.
pub fn d3_lower(n: u64) -> u64 {
    isqrt(&(BigInt::from(n) * 4)).to_u64().expect("fits").saturating_sub(3)
}

/// Generic subrank of `(K^n)^{(x)3}`: `floor(sqrt(3n - 2))`.
pub fn generic_subrank(n: u64) -> u64 {
    assert!(n >= 1);
    isqrt(&(BigInt::from(n) * 3 - 2)).to_u64().expect("fits")
}

/// `(3 floor(sqrt(n/3 + 1/4) - 1/2), floor(sqrt(3n - 2)))`.
///
/// `floor(sqrt(n/3 + 1/4) - 1/2)` is the largest `m >= 0` with `3 m (m + 1) <= n`,
/// since `(m + 1/2)^2 <= n/3 + 1/4` iff `m^2 + m <= n/3`.
pub fn dmz_interval(n: u64) -> (u64, u64) {
    assert!(n >= 1);
    // 3m^2 + 3m - n <= 0; start from the root estimate and correct
    let mut m = isqrt(&(BigInt::from(n) * 12 + 9)).to_u64().expect("fits").saturating_sub(3) / 6;
    while 3 * (m + 1) * (m + 2) <= n {
        m += 1;
    }
    while m > 0 && 3 * m * (m + 1) > n {
        m -= 1;
    }
    (3 * m, generic_subrank(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossoverRow {
    pub n: u64,
    pub d3_lower: u64,
    pub generic_subrank: u64,
    pub dmz_lo: u64,
    pub border_upper: u64,
    pub excess: bool,
}

/// One row per `n` in `[n_min, n_max]`; `border_upper` is for order `d`.
pub fn crossover_scan(d: usize, n_min: u64, n_max: u64) -> Result<Vec<CrossoverRow>> {
    (n_min.max(1)..=n_max)
        .map(|n| {
            let lower = d3_lower(n);
            let gen = generic_subrank(n);
            Ok(CrossoverRow {
                n,
                d3_lower: lower,
                generic_subrank: gen,
                dmz_lo: dmz_interval(n).0,
                border_upper: border_subrank_generic_upper(d, n)?,
                excess: lower > gen,
            })
        })
        .collect()
}

pub fn first_excess(rows: &[CrossoverRow]) -> Option<u64> {
    rows.iter().find(|r| r.excess).map(|r| r.n)
}

pub const TABLE_COLUMNS: [&str; 6] = ["n", "d3_lower", "generic_subrank", "dmz_lo", "border_upper", "excess_flag"];

pub fn table_csv(rows: &[CrossoverRow]) -> String {
    let mut out = TABLE_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n, r.d3_lower, r.generic_subrank, r.dmz_lo, r.border_upper, r.excess
        )
        .expect("write to string");
    }
    out
}

pub fn table_json(d: usize, rows: &[CrossoverRow]) -> Value {
    json!({
        "d": d,
        "columns": TABLE_COLUMNS,
        "first_excess": first_excess(rows),
        "rows": rows.iter().map(|r| json!({
            "n": r.n,
            "d3_lower": r.d3_lower,
            "generic_subrank": r.generic_subrank,
            "dmz_lo": r.dmz_lo,
            "border_upper": r.border_upper,
            "excess_flag": r.excess,
        })).collect::<Vec<_>>(),
    })
}

/// Lower and upper bounds on the dimension of the locus of maximal border
/// subrank in `(K^n)^{(x)3}`; `n` must be a multiple of 3.
pub fn max_locus_bounds(n: u64) -> Result<(BigRational, BigRational)> {
    if n == 0 || n % 3 != 0 {
        return Err(Error::InvalidParameter(format!("n must be a positive multiple of 3, got {n}")));
    }
    let nb = BigInt::from(n);
    let n2 = &nb * &nb;
    let n3 = &n2 * &nb;
    let lower = BigRational::new(2 * &n3 + 3 * &n2 - 2 * &nb - 3, BigInt::from(3));
    let upper = BigRational::new(BigInt::from(26) * &n3, BigInt::from(27))
        + BigRational::new(BigInt::from(13) * &n2, BigInt::from(3))
        - BigRational::from_integer(2 * &nb);
    let general = formula_dim_upper(3, &[n, n, n], n)?;
    assert_eq!(upper, BigRational::from_integer(general), "closed form disagrees with the general bound");
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Roots;

    #[test]
    fn isqrt_matches_roots() {
        for v in 0u64..5000 {
            assert_eq!(isqrt_u64(v), v.sqrt());
        }
        let big = BigInt::from(10u32).pow(40) + 17;
        assert_eq!(isqrt(&big), big.sqrt());
    }

    #[test]
    fn dim_upper_examples() {
        assert_eq!(formula_dim_upper(3, &[9, 9, 9], 3).unwrap(), BigInt::from(851));
        assert_eq!(formula_dim_upper(3, &[3, 3, 3], 3).unwrap(), BigInt::from(59));
        assert_eq!(formula_dim_upper(4, &[2, 3, 4, 5], 0).unwrap(), BigInt::from(120));
        assert_eq!(dim_upper_report(3, &[9, 9, 9], 7).unwrap().s, 2);
    }

    #[test]
    fn simplified_examples() {
        assert_eq!(formula_equal_dims_simplified(3, 9, 3).unwrap(), BigInt::from(851));
        assert_eq!(formula_equal_dims_simplified(3, 7, 0).unwrap(), BigInt::from(343));
        assert_eq!(
            formula_equal_dims_simplified(4, 8, 8).unwrap(),
            formula_dim_upper(4, &[8; 4], 8).unwrap()
        );
        assert!(formula_equal_dims_simplified(3, 9, 4).is_err());
    }

    #[test]
    fn generic_upper_examples() {
        assert_eq!(border_subrank_generic_upper(3, 1000).unwrap(), 359);
        let full = BigInt::from(1000u64).pow(3);
        assert!(formula_dim_upper(3, &[1000; 3], 359).unwrap() >= full);
        assert!(formula_dim_upper(3, &[1000; 3], 360).unwrap() < full);
        assert_eq!(border_subrank_generic_upper(3, 9).unwrap(), 9);
        for d in 2..6 {
            assert_eq!(border_subrank_generic_upper(d, 1).unwrap(), 1);
        }
    }

    #[test]
    fn small_n_values() {
        assert_eq!(d3_lower(9), 3);
        assert_eq!(d3_lower(200), 25);
        assert_eq!(d3_lower(4), 1);
        assert_eq!(d3_lower(2), 0);
        assert_eq!(dmz_interval(9), (3, 5));
        assert_eq!(dmz_interval(200).1, 24);
        assert_eq!(dmz_interval(1), (0, 1));
    }

    #[test]
    fn dmz_lower_against_rational_definition() {
        // floor(sqrt(x) - 1/2) = largest m with (m + 1/2)^2 <= x, x = n/3 + 1/4
        for n in 1u64..3000 {
            let x = BigRational::new(BigInt::from(4 * n + 3), BigInt::from(12));
            let mut m = 0u64;
            while BigRational::new(BigInt::from(2 * m + 3).pow(2), BigInt::from(4)) <= x {
                m += 1;
            }
            assert_eq!(dmz_interval(n).0, 3 * m, "n = {n}");
        }
    }

    #[test]
    fn crossover_rows() {
        let rows = crossover_scan(3, 1, 200).unwrap();
        let r200 = rows.last().unwrap();
        assert_eq!((r200.d3_lower, r200.generic_subrank, r200.excess), (25, 24, true));
        let r9 = &rows[8];
        assert_eq!((r9.d3_lower, r9.generic_subrank, r9.excess), (3, 5, false));
        assert!(rows.iter().all(|r| r.d3_lower <= r.border_upper));
        assert!(crossover_scan(3, 1, 0).unwrap().is_empty());
        assert_eq!(table_csv(&[]), "n,d3_lower,generic_subrank,dmz_lo,border_upper,excess_flag\n");
    }

    #[test]
    fn max_locus_examples() {
        let (lo, hi) = max_locus_bounds(3).unwrap();
        assert_eq!(lo, BigRational::from_integer(24.into()));
        assert_eq!(hi, BigRational::from_integer(59.into()));
        for n in (3..=99).step_by(3) {
            let (lo, hi) = max_locus_bounds(n).unwrap();
            assert!(lo <= hi);
        }
        assert!(max_locus_bounds(4).is_err());
    }
}
