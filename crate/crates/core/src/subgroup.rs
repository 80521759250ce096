//! One-parameter subgroups `lambda(t) = (h_i diag(t^a_i1, ...) h_i^-1)_i`,
//! weight-space decompositions and limits at `t -> 0` and `t -> infinity`.
//!
//! Limits are decided by the sign of weight sums, never by expanding powers
//! of `t`, so weights may be arbitrarily large integers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::series_matrix::SeriesMatrix;
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    ToZero,
    ToInfinity,
}

/// One tensor factor of a one-parameter subgroup. `basis == None` means the
/// standard basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupFactor {
    basis: Option<(Matrix, Matrix)>,
    weights: Vec<BigInt>,
}

impl SubgroupFactor {
    pub fn standard(weights: Vec<BigInt>) -> Self {
        SubgroupFactor { basis: None, weights }
    }

    /// Eigenbasis given by the columns of `basis`; fails if it is singular.
    pub fn with_basis(basis: Matrix, weights: Vec<BigInt>) -> Result<Self> {
        if basis.rows() != weights.len() {
            return Err(Error::Shape(format!(
                "basis is {}x{} but {} weights were given",
                basis.rows(),
                basis.cols(),
                weights.len()
            )));
        }
        let inv = basis.inverse()?;
        Ok(SubgroupFactor {
            basis: Some((basis, inv)),
            weights,
        })
    }

    pub fn basis(&self) -> Option<&Matrix> {
        self.basis.as_ref().map(|(b, _)| b)
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneParamSubgroup {
    field: Field,
    factors: Vec<SubgroupFactor>,
}

/// Components of a tensor in the weight spaces `V_a(lambda)`, in eigenbasis
/// coordinates. Only weights carried by nonzero entries are listed.
#[derive(Clone, Debug)]
pub struct WeightDecomposition {
    pub base: OneParamSubgroup,
    pub components: BTreeMap<BigInt, Tensor>,
}

impl OneParamSubgroup {
    pub fn new(field: &Field, factors: Vec<SubgroupFactor>) -> Result<Self> {
        for fac in &factors {
            if let Some((b, _)) = &fac.basis {
                field.ensure_same(b.field())?;
            }
        }
        Ok(OneParamSubgroup {
            field: field.clone(),
            factors,
        })
    }

    /// Standard-basis subgroup from per-factor weight lists.
    pub fn standard(field: &Field, weights: Vec<Vec<BigInt>>) -> Self {
        OneParamSubgroup {
            field: field.clone(),
            factors: weights.into_iter().map(SubgroupFactor::standard).collect(),
        }
    }

    /// The trivial subgroup on the given dimensions.
    pub fn trivial(field: &Field, dims: &[usize]) -> Self {
        Self::standard(field, dims.iter().map(|&n| vec![BigInt::zero(); n]).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn factors(&self) -> &[SubgroupFactor] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(SubgroupFactor::dim).collect()
    }

    /// `t -> lambda(t^-1)`: same bases, negated weights.
    pub fn inverted(&self) -> Self {
        OneParamSubgroup {
            field: self.field.clone(),
            factors: self
                .factors
                .iter()
                .map(|f| SubgroupFactor {
                    basis: f.basis.clone(),
                    weights: f.weights.iter().map(|w| -w).collect(),
                })
                .collect(),
        }
    }

    /// `lambda(t)` as explicit series matrices; weights must fit in `i64`.
    pub fn to_series_matrices(&self) -> Result<Vec<SeriesMatrix>> {
        self.factors
            .iter()
            .map(|fac| {
                let w = fac
                    .weights
                    .iter()
                    .map(|w| w.to_i64().ok_or_else(|| Error::InvalidParameter(format!("weight {w} too large to expand"))))
                    .collect::<Result<Vec<i64>>>()?;
                let diag = SeriesMatrix::diag_t_pow(&self.field, &w);
                match &fac.basis {
                    None => Ok(diag),
                    Some((b, inv)) => SeriesMatrix::from_constant(b)
                        .mul(&diag)?
                        .mul(&SeriesMatrix::from_constant(inv)),
                }
            })
            .collect()
    }

    fn check_tensor(&self, t: &Tensor) -> Result<()> {
        self.field.ensure_same(t.field())?;
        if t.dims() != self.dims().as_slice() {
            return Err(Error::Shape(format!(
                "subgroup acts on {:?}, tensor has dims {:?}",
                self.dims(),
                t.dims()
            )));
        }
        Ok(())
    }

    /// Coordinates of `t` in the eigenbasis.
    pub fn to_eigen(&self, t: &Tensor) -> Result<Tensor> {
        self.check_tensor(t)?;
        if self.factors.iter().all(|f| f.basis.is_none()) {
            return Ok(t.clone());
        }
        let gs: Vec<Matrix> = self
            .factors
            .iter()
            .map(|f| match &f.basis {
                Some((_, inv)) => inv.clone(),
                None => Matrix::identity(&self.field, f.dim()),
            })
            .collect();
        t.act(&gs)
    }

    /// Inverse of [`Self::to_eigen`].
    pub fn from_eigen(&self, t: &Tensor) -> Result<Tensor> {
        self.check_tensor(t)?;
        if self.factors.iter().all(|f| f.basis.is_none()) {
            return Ok(t.clone());
        }
        let gs: Vec<Matrix> = self
            .factors
            .iter()
            .map(|f| match &f.basis {
                Some((b, _)) => b.clone(),
                None => Matrix::identity(&self.field, f.dim()),
            })
            .collect();
        t.act(&gs)
    }

    /// Weight of the eigenbasis tensor `v_{1 j_1} (x) ... (x) v_{d j_d}`.
    pub fn weight_of(&self, idx: &[usize]) -> BigInt {
        self.factors
            .iter()
            .zip(idx)
            .map(|(f, &j)| &f.weights[j])
            .sum()
    }

    pub fn weight_decompose(&self, t: &Tensor) -> Result<WeightDecomposition> {
        let eigen = self.to_eigen(t)?;
        let mut components: BTreeMap<BigInt, Tensor> = BTreeMap::new();
        for (idx, v) in eigen.support() {
            let w = self.weight_of(&idx);
            if !components.contains_key(&w) {
                components.insert(w.clone(), Tensor::zeros(&self.field, t.dims())?);
            }
            components.get_mut(&w).expect("inserted above").set(&idx, v.clone());
        }
        Ok(WeightDecomposition {
            base: self.clone(),
            components,
        })
    }

    /// `lim lambda(t) . t` in the given direction.
    ///
    /// The limit at zero exists iff no nonzero eigen-coordinate has negative
    /// weight; it is then the weight-zero component. The limit at infinity is
    /// the limit at zero of the inverted subgroup.
    pub fn limit(&self, t: &Tensor, direction: Direction) -> Result<Tensor> {
        match direction {
            Direction::ToInfinity => self.inverted().limit(t, Direction::ToZero),
            Direction::ToZero => {
                let eigen = self.to_eigen(t)?;
                let mut kept = Vec::new();
                for (idx, v) in eigen.support() {
                    let w = self.weight_of(&idx);
                    if w.is_negative() {
                        return Err(Error::NoLimit {
                            position: idx,
                            exponent: w,
                        });
                    }
                    if w.is_zero() {
                        kept.push((idx, v.clone()));
                    }
                }
                let zero_part = Tensor::from_entries(&self.field, t.dims(), kept)?;
                self.from_eigen(&zero_part)
            }
        }
    }
}

impl WeightDecomposition {
    /// `sum_a component_a`, mapped back to the original coordinates.
    pub fn reconstruct(&self) -> Result<Tensor> {
        let dims = self.base.dims();
        let mut acc = Tensor::zeros(self.base.field(), &dims)?;
        for comp in self.components.values() {
            acc = acc.add(comp)?;
        }
        self.base.from_eigen(&acc)
    }

    pub fn has_negative_weights(&self) -> bool {
        self.components.keys().any(Signed::is_negative)
    }

    pub fn has_positive_weights(&self) -> bool {
        self.components.keys().any(Signed::is_positive)
    }

    /// Weight-zero component in original coordinates (zero tensor if absent).
    pub fn zero_component(&self) -> Result<Tensor> {
        match self.components.get(&BigInt::zero()) {
            Some(c) => self.base.from_eigen(c),
            None => Tensor::zeros(self.base.field(), &self.base.dims()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn ones(dims: &[usize]) -> Tensor {
        let f = q();
        let mut t = Tensor::zeros(&f, dims).unwrap();
        for a in 0..dims[0] {
            for b in 0..dims[1] {
                for c in 0..dims[2] {
                    t.set(&[a, b, c], f.one());
                }
            }
        }
        t
    }

    #[test]
    fn trivial_subgroup_single_component() {
        let t = ones(&[2, 3, 2]);
        let lam = OneParamSubgroup::trivial(&q(), &[2, 3, 2]);
        let dec = lam.weight_decompose(&t).unwrap();
        assert_eq!(dec.components.len(), 1);
        assert_eq!(dec.components[&BigInt::zero()], t);
        assert_eq!(lam.limit(&t, Direction::ToZero).unwrap(), t);
        assert_eq!(lam.limit(&t, Direction::ToInfinity).unwrap(), t);
    }

    #[test]
    fn all_ones_cube_components() {
        let t = ones(&[2, 2, 2]);
        let lam = OneParamSubgroup::standard(&q(), vec![ints(&[1, 2]), ints(&[1, 2]), ints(&[-2, -2])]);
        let dec = lam.weight_decompose(&t).unwrap();
        let keys: Vec<i64> = dec.components.keys().map(|k| k.to_i64().unwrap()).collect();
        assert_eq!(keys, vec![0, 1, 2]);
        let supp = |w: i64| -> Vec<Vec<usize>> {
            dec.components[&BigInt::from(w)].support().map(|(i, _)| i).collect()
        };
        assert_eq!(supp(0), vec![vec![0, 0, 0], vec![0, 0, 1]]);
        assert_eq!(supp(1), vec![vec![0, 1, 0], vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 1]]);
        assert_eq!(supp(2), vec![vec![1, 1, 0], vec![1, 1, 1]]);
        assert_eq!(dec.reconstruct().unwrap(), t);
    }

    #[test]
    fn no_limit_reports_witness() {
        let f = q();
        let lam = OneParamSubgroup::standard(&f, vec![ints(&[-1, 1]), ints(&[0, 0])]);
        let t = Tensor::from_entries(&f, &[2, 2], vec![(vec![0, 1], f.one())]).unwrap();
        match lam.limit(&t, Direction::ToZero) {
            Err(Error::NoLimit { position, exponent }) => {
                assert_eq!(position, vec![0, 1]);
                assert_eq!(exponent, BigInt::from(-1));
            }
            other => panic!("expected NoLimit, got {other:?}"),
        }
        assert!(lam.limit(&t, Direction::ToInfinity).unwrap().is_zero());
    }

    #[test]
    fn huge_weights_are_fine() {
        let f = q();
        let big = BigInt::from(2).pow(300);
        let lam = OneParamSubgroup::standard(&f, vec![vec![big.clone(), BigInt::zero()], vec![-big.clone(), BigInt::zero()]]);
        let mut t = Tensor::zeros(&f, &[2, 2]).unwrap();
        t.set(&[0, 0], f.one());
        t.set(&[0, 1], f.one());
        assert_eq!(lam.limit(&t, Direction::ToZero).unwrap(), t.restrict([&[0usize, 0][..]]));
        assert!(lam.to_series_matrices().is_err());
    }

    #[test]
    fn non_standard_basis_round_trip() {
        let f = q();
        let h = Matrix::from_i64(&f, &[&[1, 1], &[0, 1]]);
        let lam = OneParamSubgroup::new(
            &f,
            vec![
                SubgroupFactor::with_basis(h, ints(&[0, 1])).unwrap(),
                SubgroupFactor::standard(ints(&[0, 0])),
            ],
        )
        .unwrap();
        let t = Tensor::from_entries(&f, &[2, 2], vec![(vec![0, 0], f.one()), (vec![1, 1], f.from_i64(3))]).unwrap();
        let dec = lam.weight_decompose(&t).unwrap();
        assert_eq!(dec.reconstruct().unwrap(), t);
        // e_1 = v_1 has weight 0, e_2 = v_2 - v_1 mixes weights 1 and 0
        let lim = lam.limit(&t, Direction::ToZero).unwrap();
        assert_eq!(lim, dec.zero_component().unwrap());
    }

    #[test]
    fn singular_basis_rejected() {
        let f = q();
        let h = Matrix::from_i64(&f, &[&[1, 2], &[2, 4]]);
        assert!(matches!(SubgroupFactor::with_basis(h, ints(&[0, 1])), Err(Error::Singular(_))));
    }
}
