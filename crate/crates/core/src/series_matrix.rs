//! Matrices with Laurent-series entries: elements of `GL_n(K((t)))` and
//! `GL_n(K[[t]])`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::series::LaurentSeries;

/// Cap on working-precision growth inside [`SeriesMatrix::invert`], as a multiple of the target.
const MAX_PRECISION_FACTOR: i64 = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct SeriesMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<LaurentSeries>,
}

impl SeriesMatrix {
    pub fn from_rows(field: &Field, rows: Vec<Vec<LaurentSeries>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::Shape("series matrix must be nonempty".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged series matrix rows".into()));
        }
        for s in rows.iter().flatten() {
            field.ensure_same(s.field())?;
        }
        Ok(SeriesMatrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Parses each entry with [`LaurentSeries::parse`].
    pub fn parse(field: &Field, rows: &[&[&str]]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|e| LaurentSeries::parse(field, e)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Self::from_rows(field, parsed)
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        SeriesMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![LaurentSeries::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, LaurentSeries::one(field));
        }
        m
    }

    /// `diag(t^w_1, ..., t^w_n)`.
    pub fn diag_t_pow(field: &Field, weights: &[i64]) -> Self {
        let mut m = Self::zeros(field, weights.len(), weights.len());
        for (i, &w) in weights.iter().enumerate() {
            m.set(i, i, LaurentSeries::t_pow(field, w));
        }
        m
    }

    /// Embeds a constant matrix as exact series.
    pub fn from_constant(m: &Matrix) -> Self {
        let f = m.field();
        let rows = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| LaurentSeries::constant(f, m.get(i, j).clone()))
                    .collect()
            })
            .collect();
        Self::from_rows(f, rows).expect("constant matrix is rectangular")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentSeries {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentSeries) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[LaurentSeries] {
        &self.data
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(LaurentSeries::is_exact)
    }

    /// Smallest truncation order among the entries (`None` if all are exact).
    pub fn precision(&self) -> Option<i64> {
        self.data.iter().filter_map(LaurentSeries::trunc).min()
    }

    /// Smallest valuation bound among entries; `None` for the exact zero matrix.
    pub fn min_valuation(&self) -> Option<i64> {
        self.data.iter().filter_map(LaurentSeries::valuation_bound).min()
    }

    pub fn map(&self, f: impl Fn(&LaurentSeries) -> LaurentSeries) -> Self {
        SeriesMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn truncate_to(&self, n: i64) -> Self {
        self.map(|s| s.truncate_to(n))
    }

    /// Multiplies every entry by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        self.map(|s| s.shift(k))
    }

    /// Constant term `M(0)` of a matrix over `K[[t]]`.
    pub fn constant_term(&self) -> Result<Matrix> {
        let rows = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).constant_term()).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Matrix::from_rows(&self.field, rows)
    }

    pub fn add(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.field.ensure_same(&other.field)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape("adding matrices of different shapes".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add_unchecked(b))
            .collect();
        Ok(SeriesMatrix { data, ..self.clone() })
    }

    pub fn sub(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.add(&other.map(LaurentSeries::neg))
    }

    pub fn mul(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.field.ensure_same(&other.field)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = SeriesMatrix::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = LaurentSeries::zero(&self.field);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_exact_zero() || b.is_exact_zero() {
                        continue;
                    }
                    acc = acc.add_unchecked(&a.mul_unchecked(b));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// True when every entry vanishes modulo `t^n` with certified precision.
    pub fn vanishes_mod(&self, n: i64) -> bool {
        self.data.iter().all(|s| s.vanishes_mod(n))
    }

    /// True when `self == other mod t^n`.
    pub fn congruent_mod(&self, other: &SeriesMatrix, n: i64) -> Result<bool> {
        Ok(self.sub(other)?.vanishes_mod(n))
    }

    /// Inverse with `self * inverse == I mod t^n`.
    ///
    /// Gauss-Jordan elimination over `K((t))`, pivoting on the entry of least
    /// certified valuation. The working precision doubles until the residual
    /// certifies, up to a fixed multiple of `n`.
    pub fn invert(&self, n: i64) -> Result<SeriesMatrix> {
        if !self.is_square() {
            return Err(Error::Shape(format!("{}x{} matrix has no inverse", self.rows, self.cols)));
        }
        let ident = SeriesMatrix::identity(&self.field, self.rows);
        let mut work = n.max(1) + 8;
        loop {
            match self.invert_at(work) {
                Ok(inv) => {
                    if self.mul(&inv)?.congruent_mod(&ident, n)? {
                        return Ok(inv);
                    }
                }
                Err(Error::Precision(_)) => {}
                Err(e) => return Err(e),
            }
            if work > MAX_PRECISION_FACTOR * n.max(1) {
                return Err(Error::Precision(format!(
                    "inverse not certified mod t^{n} at working precision {work}"
                )));
            }
            work *= 2;
        }
    }

    fn invert_at(&self, work: i64) -> Result<SeriesMatrix> {
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = SeriesMatrix::identity(&self.field, n);
        for col in 0..n {
            let mut best: Option<(usize, i64)> = None;
            let mut uncertain = false;
            for r in col..n {
                let e = a.get(r, col);
                match e.valuation() {
                    Some(v) if best.map_or(true, |(_, bv)| v < bv) => best = Some((r, v)),
                    Some(_) => {}
                    None => uncertain |= e.is_zero_to_precision(),
                }
            }
            let (prow, _) = match best {
                Some(b) => b,
                None if uncertain => {
                    return Err(Error::Precision(format!(
                        "column {col} is zero to precision; pivot not certifiable"
                    )))
                }
                None => return Err(Error::Singular("determinant is exactly zero".into())),
            };
            a.swap_rows(col, prow);
            inv.swap_rows(col, prow);
            let p_inv = a.get(col, col).invert_unit(work)?;
            a.scale_row(col, &p_inv);
            inv.scale_row(col, &p_inv);
            for r in 0..n {
                if r == col || a.get(r, col).is_exact_zero() {
                    continue;
                }
                let factor = a.get(r, col).neg();
                a.add_row_multiple(r, col, &factor);
                inv.add_row_multiple(r, col, &factor);
            }
        }
        Ok(inv)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    pub(crate) fn scale_row(&mut self, i: usize, c: &LaurentSeries) {
        for j in 0..self.cols {
            let v = self.get(i, j).mul_unchecked(c);
            self.set(i, j, v);
        }
    }

    pub(crate) fn scale_col(&mut self, j: usize, c: &LaurentSeries) {
        for i in 0..self.rows {
            let v = self.get(i, j).mul_unchecked(c);
            self.set(i, j, v);
        }
    }

    /// `row[target] += c * row[source]`.
    pub(crate) fn add_row_multiple(&mut self, target: usize, source: usize, c: &LaurentSeries) {
        for j in 0..self.cols {
            let s = self.get(source, j);
            if s.is_exact_zero() {
                continue;
            }
            let v = self.get(target, j).add_unchecked(&s.mul_unchecked(c));
            self.set(target, j, v);
        }
    }

    /// `col[target] += c * col[source]`.
    pub(crate) fn add_col_multiple(&mut self, target: usize, source: usize, c: &LaurentSeries) {
        for i in 0..self.rows {
            let s = self.get(i, source);
            if s.is_exact_zero() {
                continue;
            }
            let v = self.get(i, target).add_unchecked(&s.mul_unchecked(c));
            self.set(i, target, v);
        }
    }
}

impl fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}
