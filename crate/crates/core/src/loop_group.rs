//! Smith normal form over `K[[t]]` and the Cartan-Iwahori-Matsumoto
//! decomposition `g = h1 * diag(t^w) * h2^-1` of elements of `GL_n(K((t)))`.
//!
//! Elimination pivots on the entry of least valuation (ties in row-major
//! order). Every elementary operation applied to the working matrix is
//! mirrored on the transformation matrices, so `V` and `V^-1` are both
//! accumulated and no matrix inversion is needed at the end.

use crate::error::{Error, Result};
use crate::series::LaurentSeries;
use crate::series_matrix::SeriesMatrix;

const MAX_PRECISION_FACTOR: i64 = 64;

/// `M == u * diag(t^exponents) * v mod t^precision`, with `u(0)`, `v(0)` invertible.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: SeriesMatrix,
    pub exponents: Vec<i64>,
    pub v: SeriesMatrix,
    pub v_inv: SeriesMatrix,
    pub precision: i64,
}

/// `g == h1 * diag(t^weights) * h2^-1 mod t^precision`.
#[derive(Clone, Debug, PartialEq)]
pub struct CimDecomposition {
    pub h1: SeriesMatrix,
    pub weights: Vec<i64>,
    pub h2: SeriesMatrix,
    pub precision: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CimVerdict {
    Pass,
    Fail { reason: String, residual: Option<SeriesMatrix> },
}

impl CimVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, CimVerdict::Pass)
    }
}

/// Smith normal form of a square matrix over `K[[t]]`, certified modulo `t^n`.
pub fn smith_over_power_series(m: &SeriesMatrix, n: i64) -> Result<SmithForm> {
    if !m.is_square() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", m.rows(), m.cols())));
    }
    if let Some(v) = m.min_valuation() {
        if v < 0 {
            return Err(Error::InvalidParameter(format!(
                "entries must be power series; found valuation {v}"
            )));
        }
    }
    let mut work = n.max(1) + 8;
    loop {
        match smith_at(m, work) {
            Ok(mut form) => {
                let d = SeriesMatrix::diag_t_pow(m.field(), &form.exponents);
                let rebuilt = form.u.mul(&d)?.mul(&form.v)?;
                if rebuilt.congruent_mod(m, n)? {
                    form.precision = n;
                    return Ok(form);
                }
            }
            Err(Error::Precision(msg)) if work > MAX_PRECISION_FACTOR * n.max(1) => {
                return Err(Error::Precision(msg));
            }
            Err(Error::Precision(_)) => {}
            Err(e) => return Err(e),
        }
        if work > MAX_PRECISION_FACTOR * n.max(1) {
            return Err(Error::Precision(format!(
                "Smith form not certified mod t^{n} at working precision {work}"
            )));
        }
        work *= 2;
    }
}

fn smith_at(m: &SeriesMatrix, work: i64) -> Result<SmithForm> {
    let f = m.field();
    let size = m.rows();
    let mut a = m.clone();
    let mut u = SeriesMatrix::identity(f, size);
    let mut v = SeriesMatrix::identity(f, size);
    let mut v_inv = SeriesMatrix::identity(f, size);
    let mut exponents = Vec::with_capacity(size);
    let mut units = Vec::with_capacity(size);

    for k in 0..size {
        let (pr, pc, e) = choose_pivot(&a, k)?;
        a.swap_rows(k, pr);
        u.swap_cols(k, pr);
        a.swap_cols(k, pc);
        v.swap_rows(k, pc);
        v_inv.swap_cols(k, pc);

        let pivot_inv = a.get(k, k).invert_unit(work)?;
        for r in k + 1..size {
            if a.get(r, k).is_exact_zero() {
                continue;
            }
            let c = a.get(r, k).mul_unchecked(&pivot_inv);
            a.add_row_multiple(r, k, &c.neg());
            a.set(r, k, LaurentSeries::zero(f));
            u.add_col_multiple(k, r, &c);
        }
        for l in k + 1..size {
            if a.get(k, l).is_exact_zero() {
                continue;
            }
            let c = a.get(k, l).mul_unchecked(&pivot_inv);
            a.set(k, l, LaurentSeries::zero(f));
            v.add_row_multiple(k, l, &c);
            v_inv.add_col_multiple(l, k, &c.neg());
        }
        exponents.push(e);
        units.push(a.get(k, k).shift(-e));
    }
    for (k, unit) in units.iter().enumerate() {
        u.scale_col(k, unit);
    }
    Ok(SmithForm {
        u,
        exponents,
        v,
        v_inv,
        precision: work,
    })
}

/// Entry of least certified valuation in the trailing block starting at `(k, k)`.
fn choose_pivot(a: &SeriesMatrix, k: usize) -> Result<(usize, usize, i64)> {
    let size = a.rows();
    let mut best: Option<(usize, usize, i64)> = None;
    let mut fuzzy_floor: Option<i64> = None;
    for i in k..size {
        for j in k..size {
            let e = a.get(i, j);
            match e.valuation() {
                Some(v) => {
                    if best.map_or(true, |(_, _, b)| v < b) {
                        best = Some((i, j, v));
                    }
                }
                None if e.is_zero_to_precision() => {
                    let t = e.trunc().expect("truncated");
                    fuzzy_floor = Some(fuzzy_floor.map_or(t, |x: i64| x.min(t)));
                }
                None => {}
            }
        }
    }
    match (best, fuzzy_floor) {
        (Some((_, _, v)), Some(t)) if t < v => Err(Error::Precision(format!(
            "pivot ambiguous: an entry is zero to t^{t} while the best certified valuation is {v}"
        ))),
        (Some(b), _) => Ok(b),
        (None, Some(t)) => Err(Error::Precision(format!(
            "remaining block is zero to t^{t}; valuation of the determinant not certifiable"
        ))),
        (None, None) => Err(Error::Singular("determinant is exactly zero".into())),
    }
}

/// Decomposes `g` as `h1 * diag(t^weights) * h2^-1` modulo `t^n`, weights weakly increasing.
pub fn cim_decompose(g: &SeriesMatrix, n: i64) -> Result<CimDecomposition> {
    if !g.is_square() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", g.rows(), g.cols())));
    }
    let shift = match g.min_valuation() {
        Some(v) => (-v).max(0),
        None => return Err(Error::Singular("zero matrix".into())),
    };
    let target = n + shift;
    let form = smith_over_power_series(&g.shift(shift), target)?;
    Ok(CimDecomposition {
        h1: form.u.truncate_to(target),
        weights: form.exponents.iter().map(|e| e - shift).collect(),
        h2: form.v_inv.truncate_to(target),
        precision: n,
    })
}

/// Checks `g == h1 * diag(t^w) * h2^-1 mod t^N` and invertibility of `h1(0)`, `h2(0)`.
pub fn verify_cim(g: &SeriesMatrix, dec: &CimDecomposition) -> CimVerdict {
    match verify_inner(g, dec) {
        Ok(v) => v,
        Err(e) => CimVerdict::Fail {
            reason: e.to_string(),
            residual: None,
        },
    }
}

fn verify_inner(g: &SeriesMatrix, dec: &CimDecomposition) -> Result<CimVerdict> {
    let size = g.rows();
    let shapes_ok = g.is_square()
        && dec.weights.len() == size
        && [&dec.h1, &dec.h2]
            .iter()
            .all(|h| h.rows() == size && h.cols() == size);
    if !shapes_ok {
        return Err(Error::Shape("decomposition does not match g".into()));
    }
    for (name, h) in [("h1", &dec.h1), ("h2", &dec.h2)] {
        let c = h.constant_term()?;
        if !c.is_invertible() {
            return Ok(CimVerdict::Fail {
                reason: format!("{name}(0) is not invertible"),
                residual: None,
            });
        }
    }
    let shift = dec.weights.iter().copied().min().map_or(0, |w| (-w).max(0));
    let n = dec.precision;
    let h2_inv = dec.h2.invert(n + shift)?;
    let d = SeriesMatrix::diag_t_pow(g.field(), &dec.weights);
    let rebuilt = dec.h1.mul(&d)?.mul(&h2_inv)?;
    let residual = g.sub(&rebuilt)?;
    if residual.vanishes_mod(n) {
        Ok(CimVerdict::Pass)
    } else {
        Ok(CimVerdict::Fail {
            reason: format!("g - h1*diag(t^w)*h2^-1 does not vanish mod t^{n}"),
            residual: Some(residual),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn q() -> Field {
        Field::Rationals
    }

    fn m(rows: &[&[&str]]) -> SeriesMatrix {
        SeriesMatrix::parse(&q(), rows).unwrap()
    }

    #[test]
    fn smith_of_diagonal() {
        let form = smith_over_power_series(&m(&[&["t", "0"], &["0", "t^3"]]), 8).unwrap();
        assert_eq!(form.exponents, vec![1, 3]);
        assert_eq!(form.u, SeriesMatrix::identity(&q(), 2));
        assert_eq!(form.v, SeriesMatrix::identity(&q(), 2));
    }

    #[test]
    fn smith_of_antidiagonal() {
        let form = smith_over_power_series(&m(&[&["0", "t"], &["t^2", "0"]]), 8).unwrap();
        assert_eq!(form.exponents, vec![1, 2]);
        // permutation-type factors: constant terms are permutation matrices
        let u0 = form.u.constant_term().unwrap();
        let v0 = form.v.constant_term().unwrap();
        assert!(u0.is_identity());
        assert_eq!(v0, crate::matrix::Matrix::from_i64(&q(), &[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn smith_with_unit_pivot() {
        let form = smith_over_power_series(&m(&[&["t", "0"], &["-1", "t^3"]]), 8).unwrap();
        assert_eq!(form.exponents, vec![0, 4]);
    }

    #[test]
    fn smith_rejects_poles_and_singular() {
        assert!(matches!(
            smith_over_power_series(&m(&[&["t^-1", "0"], &["0", "1"]]), 4),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            smith_over_power_series(&m(&[&["1", "t"], &["t", "t^2"]]), 4),
            Err(Error::Singular(_))
        ));
        assert!(matches!(
            smith_over_power_series(&m(&[&["1", "0"], &["0", "O(t^2)"]]), 4),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn cim_of_identity() {
        let dec = cim_decompose(&SeriesMatrix::identity(&q(), 2), 8).unwrap();
        assert_eq!(dec.weights, vec![0, 0]);
        assert!(dec.h1.congruent_mod(&SeriesMatrix::identity(&q(), 2), 8).unwrap());
        assert!(dec.h2.congruent_mod(&SeriesMatrix::identity(&q(), 2), 8).unwrap());
    }

    #[test]
    fn cim_of_shifted_diagonal() {
        let g = m(&[&["t^3", "0"], &["0", "t^-1"]]);
        let dec = cim_decompose(&g, 8).unwrap();
        assert_eq!(dec.weights, vec![-1, 3]);
        assert!(verify_cim(&g, &dec).is_pass());
        let p = crate::matrix::Matrix::from_i64(&q(), &[&[0, 1], &[1, 0]]);
        assert_eq!(dec.h1.constant_term().unwrap(), p);
    }

    #[test]
    fn sl2_example_weights_and_factors() {
        let g = m(&[&["t^-1", "0"], &["-t^-2", "t"]]);
        let dec = cim_decompose(&g, 16).unwrap();
        assert_eq!(dec.weights, vec![-2, 2]);
        assert!(verify_cim(&g, &dec).is_pass());
        // the deterministic pivot rule happens to land on the textbook factors
        assert!(dec.h1.congruent_mod(&m(&[&["t", "1"], &["-1", "0"]]), 18).unwrap());
        assert!(dec.h2.congruent_mod(&m(&[&["1", "t^3"], &["0", "1"]]), 18).unwrap());
    }

    #[test]
    fn displayed_factors_verify_and_permuted_weights_fail() {
        let g = m(&[&["t^-1", "0"], &["-t^-2", "t"]]);
        let mut dec = CimDecomposition {
            h1: m(&[&["t", "1"], &["-1", "0"]]),
            weights: vec![-2, 2],
            h2: m(&[&["1", "t^3"], &["0", "1"]]),
            precision: 16,
        };
        assert!(verify_cim(&g, &dec).is_pass());
        dec.weights = vec![2, -2];
        match verify_cim(&g, &dec) {
            CimVerdict::Fail { residual: Some(r), .. } => assert!(!r.vanishes_mod(16)),
            other => panic!("expected failure with residual, got {other:?}"),
        }
    }

    #[test]
    fn doubled_precision_still_verifies() {
        let g = m(&[&["1 + t", "t^-1"], &["2", "t^-2 - t"]]);
        let dec = cim_decompose(&g, 8).unwrap();
        assert!(verify_cim(&g, &dec).is_pass());
        let dec2 = cim_decompose(&g, 16).unwrap();
        assert!(verify_cim(&g, &dec2).is_pass());
        assert_eq!(dec.weights, dec2.weights);
    }

    #[test]
    fn non_invertible_constant_term_fails() {
        let g = SeriesMatrix::identity(&q(), 2);
        let dec = CimDecomposition {
            h1: m(&[&["t", "0"], &["0", "1"]]),
            weights: vec![0, 0],
            h2: SeriesMatrix::identity(&q(), 2),
            precision: 4,
        };
        assert!(!verify_cim(&g, &dec).is_pass());
    }
}
