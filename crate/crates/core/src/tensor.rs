//! Dense order-`d` tensors with exact or Laurent-series entries, and the
//! action of `GL(V_1) x ... x GL(V_d)` on them.
//!
//! Indices are 0-based in memory and in this API; the JSON encoding uses
//! 1-based index tuples.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::series::LaurentSeries;
use crate::series_matrix::SeriesMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    field: Field,
    dims: Vec<usize>,
    data: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTensor {
    field: Field,
    dims: Vec<usize>,
    data: Vec<LaurentSeries>,
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.len() < 2 {
        return Err(Error::Shape(format!("tensor order must be at least 2, got {}", dims.len())));
    }
    dims.iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .ok_or_else(|| Error::Shape("tensor too large".into()))
}

fn offset_of(dims: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &n)| {
        debug_assert!(i < n, "index out of range");
        acc * n + i
    })
}

fn index_of(dims: &[usize], mut off: usize) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for (slot, &n) in idx.iter_mut().zip(dims).rev() {
        *slot = off % n;
        off /= n;
    }
    idx
}

impl Tensor {
    pub fn zeros(field: &Field, dims: &[usize]) -> Result<Self> {
        let len = check_dims(dims)?;
        Ok(Tensor {
            field: field.clone(),
            dims: dims.to_vec(),
            data: vec![field.zero(); len],
        })
    }

    /// Builds a tensor from `(index, value)` pairs; later pairs overwrite earlier ones.
    pub fn from_entries(field: &Field, dims: &[usize], entries: Vec<(Vec<usize>, Scalar)>) -> Result<Self> {
        let mut t = Self::zeros(field, dims)?;
        for (idx, v) in entries {
            t.check_index(&idx)?;
            t.set(&idx, v);
        }
        Ok(t)
    }

    /// `I_r = sum_i e_i^{(x)d}` in `(K^r)^{(x)d}`.
    pub fn unit(field: &Field, r: usize, d: usize) -> Result<Self> {
        let mut t = Self::zeros(field, &vec![r; d])?;
        for i in 0..r {
            t.set(&vec![i; d], field.one());
        }
        Ok(t)
    }

    fn check_index(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.dims.len() || idx.iter().zip(&self.dims).any(|(&i, &n)| i >= n) {
            return Err(Error::Shape(format!("index {idx:?} outside dims {:?}", self.dims)));
        }
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn get(&self, idx: &[usize]) -> &Scalar {
        &self.data[offset_of(&self.dims, idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Scalar) {
        let off = offset_of(&self.dims, idx);
        self.data[off] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| self.field.is_zero(v))
    }

    /// Nonzero entries in row-major order.
    pub fn support(&self) -> impl Iterator<Item = (Vec<usize>, &Scalar)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !self.field.is_zero(v))
            .map(|(off, v)| (index_of(&self.dims, off), v))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| !self.field.is_zero(v)).count()
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.field.ensure_same(&other.field)?;
        if self.dims != other.dims {
            return Err(Error::Shape(format!("dims {:?} vs {:?}", self.dims, other.dims)));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.field.add(a, b))
            .collect();
        Ok(Tensor { data, ..self.clone() })
    }

    /// Keeps the entries at the given positions and zeroes the rest.
    pub fn restrict<'a>(&self, positions: impl IntoIterator<Item = &'a [usize]>) -> Tensor {
        let mut out = Tensor {
            data: vec![self.field.zero(); self.data.len()],
            ..self.clone()
        };
        for idx in positions {
            out.set(idx, self.get(idx).clone());
        }
        out
    }

    /// Applies `matrix` along `axis`: `T'[.., a, ..] = sum_b M[a][b] T[.., b, ..]`.
    fn mode_product(&self, axis: usize, m: &Matrix) -> Result<Tensor> {
        if m.cols() != self.dims[axis] {
            return Err(Error::Shape(format!(
                "factor {axis}: matrix has {} columns, tensor dimension is {}",
                m.cols(),
                self.dims[axis]
            )));
        }
        let f = &self.field;
        let mut dims = self.dims.clone();
        dims[axis] = m.rows();
        let mut out = Tensor::zeros(f, &dims)?;
        for (mut idx, v) in self.support() {
            let b = idx[axis];
            for a in 0..m.rows() {
                let c = m.get(a, b);
                if f.is_zero(c) {
                    continue;
                }
                idx[axis] = a;
                let off = offset_of(&dims, &idx);
                out.data[off] = f.add(&out.data[off], &f.mul(c, v));
            }
        }
        Ok(out)
    }

    /// `(g_1 (x) ... (x) g_d) T`; rectangular factors are allowed.
    pub fn act(&self, gs: &[Matrix]) -> Result<Tensor> {
        if gs.len() != self.order() {
            return Err(Error::Shape(format!("{} matrices for an order-{} tensor", gs.len(), self.order())));
        }
        let mut t = self.clone();
        for (axis, g) in gs.iter().enumerate() {
            self.field.ensure_same(g.field())?;
            t = t.mode_product(axis, g)?;
        }
        Ok(t)
    }

    /// `g(t) . T` with Laurent-series factors.
    pub fn act_series(&self, gs: &[SeriesMatrix]) -> Result<SeriesTensor> {
        if gs.len() != self.order() {
            return Err(Error::Shape(format!("{} matrices for an order-{} tensor", gs.len(), self.order())));
        }
        let mut t = SeriesTensor::from_constant(self);
        for (axis, g) in gs.iter().enumerate() {
            self.field.ensure_same(g.field())?;
            t = t.mode_product(axis, g)?;
        }
        Ok(t)
    }

    /// `Some(r)` when the support has `r` points whose coordinates are pairwise
    /// distinct in every factor (so the tensor is in the orbit of `I_r` up to
    /// coordinate injections); `None` otherwise.
    pub fn is_diagonal_unit_equivalent(&self) -> Option<usize> {
        let support: Vec<Vec<usize>> = self.support().map(|(idx, _)| idx).collect();
        for axis in 0..self.order() {
            let mut seen = HashSet::new();
            if !support.iter().all(|idx| seen.insert(idx[axis])) {
                return None;
            }
        }
        Some(support.len())
    }
}

impl SeriesTensor {
    pub fn from_constant(t: &Tensor) -> Self {
        SeriesTensor {
            field: t.field.clone(),
            dims: t.dims.clone(),
            data: t.data.iter().map(|v| LaurentSeries::constant(&t.field, v.clone())).collect(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn get(&self, idx: &[usize]) -> &LaurentSeries {
        &self.data[offset_of(&self.dims, idx)]
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(LaurentSeries::is_exact)
    }

    /// Entries in row-major order with their indices.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &LaurentSeries)> + '_ {
        self.data
            .iter()
            .enumerate()
            .map(|(off, s)| (index_of(&self.dims, off), s))
    }

    /// Value at `t = 0`; fails with `NoLimit` at the first entry with a pole.
    pub fn limit_at_zero(&self) -> Result<Tensor> {
        let mut data = Vec::with_capacity(self.data.len());
        for (idx, s) in self.entries() {
            if let Some(v) = s.valuation() {
                if v < 0 {
                    return Err(Error::NoLimit {
                        position: idx,
                        exponent: v.into(),
                    });
                }
            }
            data.push(s.constant_term()?);
        }
        Ok(Tensor {
            field: self.field.clone(),
            dims: self.dims.clone(),
            data,
        })
    }

    fn mode_product(&self, axis: usize, m: &SeriesMatrix) -> Result<SeriesTensor> {
        if m.cols() != self.dims[axis] {
            return Err(Error::Shape(format!(
                "factor {axis}: matrix has {} columns, tensor dimension is {}",
                m.cols(),
                self.dims[axis]
            )));
        }
        let mut dims = self.dims.clone();
        dims[axis] = m.rows();
        let len = check_dims(&dims)?;
        let mut data = vec![LaurentSeries::zero(&self.field); len];
        for (off, s) in self.data.iter().enumerate() {
            if s.is_exact_zero() {
                continue;
            }
            let mut idx = index_of(&self.dims, off);
            let b = idx[axis];
            for a in 0..m.rows() {
                let c = m.get(a, b);
                if c.is_exact_zero() {
                    continue;
                }
                idx[axis] = a;
                let o = offset_of(&dims, &idx);
                data[o] = data[o].add_unchecked(&c.mul_unchecked(s));
            }
        }
        Ok(SeriesTensor {
            field: self.field.clone(),
            dims,
            data,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn unit_tensors() {
        let f = q();
        let empty = Tensor::unit(&f, 0, 3).unwrap();
        assert_eq!(empty.dims(), &[0, 0, 0]);
        assert_eq!(empty.nnz(), 0);
        let i2 = Tensor::unit(&f, 2, 3).unwrap();
        let support: Vec<_> = i2.support().map(|(i, _)| i).collect();
        assert_eq!(support, vec![vec![0, 0, 0], vec![1, 1, 1]]);
        let i3 = Tensor::unit(&f, 3, 2).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(f.is_one(i3.get(&[a, b])), a == b);
            }
        }
    }

    #[test]
    fn unit_tensor_is_permutation_symmetric() {
        let f = q();
        let i4 = Tensor::unit(&f, 4, 3).unwrap();
        let p = Matrix::permutation(&f, &[2, 0, 3, 1]);
        assert_eq!(i4.act(&[p.clone(), p.clone(), p]).unwrap(), i4);
    }

    #[test]
    fn diagonal_scaling() {
        let f = q();
        let i3 = Tensor::unit(&f, 3, 3).unwrap();
        let c: Vec<Scalar> = [2, -1, 5].iter().map(|&v| f.from_i64(v)).collect();
        let id = Matrix::identity(&f, 3);
        let out = i3.act(&[Matrix::diagonal(&f, &c), id.clone(), id]).unwrap();
        for i in 0..3 {
            assert_eq!(out.get(&[i, i, i]), &c[i]);
        }
        assert_eq!(out.nnz(), 3);
    }

    #[test]
    fn projections_recover_padded_unit_tensor() {
        let f = q();
        let mut padded = Tensor::zeros(&f, &[4, 5, 3]).unwrap();
        for i in 0..2 {
            padded.set(&[i, i, i], f.one());
        }
        // junk outside the first two coordinates is projected away
        padded.set(&[3, 4, 2], f.from_i64(7));
        padded.set(&[0, 3, 1], f.from_i64(-2));
        let proj = |n: usize| {
            let mut m = Matrix::zeros(&f, 2, n);
            m.set(0, 0, f.one());
            m.set(1, 1, f.one());
            m
        };
        let out = padded.act(&[proj(4), proj(5), proj(3)]).unwrap();
        assert_eq!(out, Tensor::unit(&f, 2, 3).unwrap());
    }

    #[test]
    fn act_shape_mismatch() {
        let f = q();
        let t = Tensor::unit(&f, 2, 3).unwrap();
        let id = Matrix::identity(&f, 2);
        assert!(matches!(t.act(&[id.clone(), id]), Err(Error::Shape(_))));
        let wide = Matrix::identity(&f, 3);
        let id = Matrix::identity(&f, 2);
        assert!(matches!(t.act(&[wide, id.clone(), id]), Err(Error::Shape(_))));
    }

    #[test]
    fn act_series_identity_gives_constants() {
        let f = q();
        let t = Tensor::from_entries(&f, &[2, 2], vec![(vec![0, 1], f.from_i64(3))]).unwrap();
        let id = SeriesMatrix::identity(&f, 2);
        let st = t.act_series(&[id.clone(), id]).unwrap();
        assert!(st.is_exact());
        assert_eq!(st.limit_at_zero().unwrap(), t);
    }

    #[test]
    fn recognizer() {
        let f = q();
        assert_eq!(Tensor::unit(&f, 4, 3).unwrap().is_diagonal_unit_equivalent(), Some(4));
        let bad = Tensor::from_entries(
            &f,
            &[2, 2, 2],
            vec![(vec![0, 0, 0], f.one()), (vec![0, 1, 1], f.one())],
        )
        .unwrap();
        assert_eq!(bad.is_diagonal_unit_equivalent(), None);
        let scattered = Tensor::from_entries(
            &f,
            &[3, 3, 3],
            vec![(vec![2, 2, 0], f.from_i64(5)), (vec![1, 1, 1], f.one()), (vec![0, 0, 2], f.one())],
        )
        .unwrap();
        assert_eq!(scattered.is_diagonal_unit_equivalent(), Some(3));
    }
}
