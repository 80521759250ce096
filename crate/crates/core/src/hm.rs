//! Executable generalized Hilbert-Mumford criterion.
//!
//! Given a curve `g(t)` in `G(K((t)))` with `lim_{t->0} g(t).p = q`, decompose
//! each factor as `g = h1 mu h2^-1`, set `lambda = h2(0) mu h2(0)^-1` and
//! `q~ = h2(0) h1(0)^-1 . q`. Then both `lim_{t->0} lambda(t).p` and
//! `lim_{t->inf} lambda(t).q~` exist and agree; the witness records both
//! limits and is only returned after they have been checked.

use num_bigint::BigInt;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::loop_group::{cim_decompose, CimDecomposition};
use crate::matrix::Matrix;
use crate::series::LaurentSeries;
use crate::series_matrix::SeriesMatrix;
use crate::subgroup::{Direction, OneParamSubgroup, SubgroupFactor};
use crate::tensor::Tensor;

/// How a group factor acts on its tensor factor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Representation {
    /// `GL_n` on `K^n`.
    #[default]
    Standard,
    /// `GL_2` on binary cubic forms, basis `(x^3, x^2 y, x y^2, y^3)`,
    /// via `g . f(x, y) = f(d x - b y, -c x + a y)`.
    Sym3,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Standard => "standard",
            Representation::Sym3 => "sym3",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Representation::Standard),
            "sym3" => Ok(Representation::Sym3),
            _ => Err(Error::Parse(format!("unknown representation {s:?}"))),
        }
    }

    /// Dimension of the group matrices acting on a tensor factor of size `n`.
    pub fn group_dim(self, n: usize) -> Result<usize> {
        match self {
            Representation::Standard => Ok(n),
            Representation::Sym3 if n == 4 => Ok(2),
            Representation::Sym3 => Err(Error::Shape(format!("binary cubics need a factor of size 4, got {n}"))),
        }
    }

    pub fn lift_series(self, g: &SeriesMatrix) -> Result<SeriesMatrix> {
        match self {
            Representation::Standard => Ok(g.clone()),
            Representation::Sym3 => sym3_lift(g),
        }
    }

    pub fn lift_constant(self, g: &Matrix) -> Result<Matrix> {
        match self {
            Representation::Standard => Ok(g.clone()),
            Representation::Sym3 => sym3_lift(&SeriesMatrix::from_constant(g))?.constant_term(),
        }
    }

    /// Tensor-level factor of the one-parameter subgroup `basis diag(t^w) basis^-1`.
    pub fn lift_subgroup_factor(self, fac: &SubgroupFactor) -> Result<SubgroupFactor> {
        match self {
            Representation::Standard => Ok(fac.clone()),
            Representation::Sym3 => {
                let w = fac.weights();
                if w.len() != 2 {
                    return Err(Error::Shape("binary cubics need a 2x2 group factor".into()));
                }
                // diag(t^a1, t^a2) sends x^(3-i) y^i to t^((3-i) a2 + i a1) x^(3-i) y^i
                let lifted: Vec<BigInt> = (0..4i64).map(|i| (3 - i) * &w[1] + i * &w[0]).collect();
                match fac.basis() {
                    None => Ok(SubgroupFactor::standard(lifted)),
                    Some(b) => SubgroupFactor::with_basis(self.lift_constant(b)?, lifted),
                }
            }
        }
    }
}

/// Matrix of `f(x, y) -> f(d x - b y, -c x + a y)` on `(x^3, x^2 y, x y^2, y^3)`.
pub fn sym3_lift(g: &SeriesMatrix) -> Result<SeriesMatrix> {
    if g.rows() != 2 || g.cols() != 2 {
        return Err(Error::Shape(format!("sym3 lift needs a 2x2 matrix, got {}x{}", g.rows(), g.cols())));
    }
    let f = g.field();
    let (a, b, c, d) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
    // linear forms as (coefficient of x, coefficient of y)
    let first = [d.clone(), b.neg()];
    let second = [c.neg(), a.clone()];
    let mut out = SeriesMatrix::zeros(f, 4, 4);
    for i in 0..4 {
        // coefficients indexed by the power of y
        let mut poly = vec![LaurentSeries::one(f)];
        let factors = std::iter::repeat(&first).take(3 - i).chain(std::iter::repeat(&second).take(i));
        for lin in factors {
            let mut next = vec![LaurentSeries::zero(f); poly.len() + 1];
            for (k, coeff) in poly.iter().enumerate() {
                next[k] = next[k].add_unchecked(&coeff.mul_unchecked(&lin[0]));
                next[k + 1] = next[k + 1].add_unchecked(&coeff.mul_unchecked(&lin[1]));
            }
            poly = next;
        }
        for (j, coeff) in poly.into_iter().enumerate() {
            out.set(j, i, coeff);
        }
    }
    Ok(out)
}

/// A curve `g(t)` in a product of general linear groups, each factor acting
/// through a [`Representation`].
#[derive(Clone, Debug)]
pub struct GroupCurve {
    pub factors: Vec<SeriesMatrix>,
    pub reps: Vec<Representation>,
}

impl GroupCurve {
    pub fn standard(factors: Vec<SeriesMatrix>) -> Self {
        let reps = vec![Representation::Standard; factors.len()];
        GroupCurve { factors, reps }
    }

    fn check(&self, p: &Tensor) -> Result<()> {
        if self.factors.len() != p.order() || self.reps.len() != p.order() {
            return Err(Error::Shape(format!(
                "{} group factors for an order-{} tensor",
                self.factors.len(),
                p.order()
            )));
        }
        for ((g, rep), &n) in self.factors.iter().zip(&self.reps).zip(p.dims()) {
            p.field().ensure_same(g.field())?;
            let m = rep.group_dim(n)?;
            if g.rows() != m || g.cols() != m {
                return Err(Error::Shape(format!(
                    "group factor is {}x{}, expected {m}x{m}",
                    g.rows(),
                    g.cols()
                )));
            }
        }
        Ok(())
    }

    /// The matrices acting on the tensor factors.
    pub fn lifted(&self) -> Result<Vec<SeriesMatrix>> {
        self.factors
            .iter()
            .zip(&self.reps)
            .map(|(g, rep)| rep.lift_series(g))
            .collect()
    }
}

/// `q = lim_{t->0} g(t).p`, or `NoLimit` naming an entry with a pole.
pub fn check_specialization(g: &GroupCurve, p: &Tensor) -> Result<Tensor> {
    g.check(p)?;
    p.act_series(&g.lifted()?)?.limit_at_zero()
}

#[derive(Clone, Debug)]
pub struct HmWitness {
    /// Group-level subgroup: basis `h2(0)` and the decomposition weights per factor.
    pub lambda: OneParamSubgroup,
    pub reps: Vec<Representation>,
    pub q: Tensor,
    pub q_tilde: Tensor,
    pub shared_limit: Tensor,
    /// `h2(0) h1(0)^-1` per factor, so that `q~ = translation . q`.
    pub translation: Vec<Matrix>,
    pub cim: Vec<CimDecomposition>,
}

impl HmWitness {
    /// The subgroup acting on the tensor space.
    pub fn tensor_subgroup(&self) -> Result<OneParamSubgroup> {
        lift_subgroup(&self.lambda, &self.reps)
    }
}

pub fn lift_subgroup(lambda: &OneParamSubgroup, reps: &[Representation]) -> Result<OneParamSubgroup> {
    let factors = lambda
        .factors()
        .iter()
        .zip(reps)
        .map(|(f, rep)| rep.lift_subgroup_factor(f))
        .collect::<Result<Vec<_>>>()?;
    OneParamSubgroup::new(lambda.field(), factors)
}

/// Builds and verifies the witness for `lim_{t->0} g(t).p`.
pub fn hm_witness(g: &GroupCurve, p: &Tensor, precision: i64) -> Result<HmWitness> {
    let q = check_specialization(g, p)?;
    let field = p.field();
    let mut cim = Vec::with_capacity(g.factors.len());
    let mut group_factors = Vec::with_capacity(g.factors.len());
    let mut translation = Vec::with_capacity(g.factors.len());
    let mut lifted_translation = Vec::with_capacity(g.factors.len());
    for (gi, rep) in g.factors.iter().zip(&g.reps) {
        let dec = cim_decompose(gi, precision)?;
        let h1_0 = dec.h1.constant_term()?;
        let h2_0 = dec.h2.constant_term()?;
        let tr = h2_0.mul(&h1_0.inverse()?)?;
        let weights = dec.weights.iter().map(|&w| BigInt::from(w)).collect();
        group_factors.push(SubgroupFactor::with_basis(h2_0, weights)?);
        lifted_translation.push(rep.lift_constant(&tr)?);
        translation.push(tr);
        cim.push(dec);
    }
    let lambda = OneParamSubgroup::new(field, group_factors)?;
    let q_tilde = q.act(&lifted_translation)?;
    let lifted = lift_subgroup(&lambda, &g.reps)?;
    let at_zero = lifted
        .limit(p, Direction::ToZero)
        .map_err(|e| Error::WitnessVerification(format!("lim_(t->0) lambda(t).p: {e}")))?;
    let at_inf = lifted
        .limit(&q_tilde, Direction::ToInfinity)
        .map_err(|e| Error::WitnessVerification(format!("lim_(t->inf) lambda(t).q~: {e}")))?;
    if at_zero != at_inf {
        return Err(Error::WitnessVerification("the two limits differ".into()));
    }
    Ok(HmWitness {
        lambda,
        reps: g.reps.clone(),
        q,
        q_tilde,
        shared_limit: at_zero,
        translation,
        cim,
    })
}

/// Re-derives every claim of a witness against the curve and point it was built from.
pub fn verify_witness(g: &GroupCurve, p: &Tensor, w: &HmWitness) -> std::result::Result<(), String> {
    let q = check_specialization(g, p).map_err(|e| format!("specialization: {e}"))?;
    if q != w.q {
        return Err("specialization: stored q differs from lim g(t).p".into());
    }
    if w.cim.len() != g.factors.len() || w.translation.len() != g.factors.len() {
        return Err("cim: one decomposition per factor expected".into());
    }
    for (i, (gi, dec)) in g.factors.iter().zip(&w.cim).enumerate() {
        if let crate::loop_group::CimVerdict::Fail { reason, .. } = crate::loop_group::verify_cim(gi, dec) {
            return Err(format!("cim[{i}]: {reason}"));
        }
        let h1_0 = dec.h1.constant_term().map_err(|e| format!("cim[{i}]: {e}"))?;
        let h2_0 = dec.h2.constant_term().map_err(|e| format!("cim[{i}]: {e}"))?;
        let fac = &w.lambda.factors()[i];
        if fac.basis() != Some(&h2_0) || fac.weights().iter().cloned().ne(dec.weights.iter().map(|&x| BigInt::from(x))) {
            return Err(format!("lambda[{i}]: basis or weights do not match h2(0) and the decomposition"));
        }
        let tr = h1_0
            .inverse()
            .and_then(|inv| h2_0.mul(&inv))
            .map_err(|e| format!("translation[{i}]: {e}"))?;
        if tr != w.translation[i] {
            return Err(format!("translation[{i}]: not h2(0) h1(0)^-1"));
        }
    }
    let lifted: Vec<Matrix> = w
        .translation
        .iter()
        .zip(&w.reps)
        .map(|(m, rep)| rep.lift_constant(m))
        .collect::<Result<_>>()
        .map_err(|e| format!("translation: {e}"))?;
    let q_tilde = w.q.act(&lifted).map_err(|e| format!("qTilde: {e}"))?;
    if q_tilde != w.q_tilde {
        return Err("qTilde: not the translate of q".into());
    }
    let lam = w.tensor_subgroup().map_err(|e| format!("lambda: {e}"))?;
    let at_zero = lam.limit(p, Direction::ToZero).map_err(|e| format!("limit at zero: {e}"))?;
    let at_inf = lam
        .limit(&w.q_tilde, Direction::ToInfinity)
        .map_err(|e| format!("limit at infinity: {e}"))?;
    if at_zero != w.shared_limit || at_inf != w.shared_limit {
        return Err("sharedLimit: limits do not both equal the stored shared limit".into());
    }
    Ok(())
}

/// Random element of `GL_n(K[t])` with constant determinant, together with its
/// (polynomial) inverse: a product of elementary matrices with polynomial
/// entries, a permutation and a constant diagonal.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, field: &Field, n: usize) -> (SeriesMatrix, SeriesMatrix) {
    let mut m = SeriesMatrix::identity(field, n);
    let mut inv = SeriesMatrix::identity(field, n);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let p = Matrix::permutation(field, &perm);
    let p_inv = p.transpose();
    let diag: Vec<Scalar> = (0..n).map(|_| field.random_nonzero(rng, 3)).collect();
    let dm = Matrix::diagonal(field, &diag);
    let dm_inv = dm.inverse().expect("nonzero diagonal");
    m = m.mul(&SeriesMatrix::from_constant(&p.mul(&dm).expect("square"))).expect("square");
    inv = SeriesMatrix::from_constant(&dm_inv.mul(&p_inv).expect("square")).mul(&inv).expect("square");
    if n > 1 {
        for _ in 0..2 * n {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let c = field.random_nonzero(rng, 2);
            let e = rng.gen_range(0..3);
            let entry = LaurentSeries::monomial(field, c, e);
            // m <- m (I + entry E_ij); inv <- (I - entry E_ij) inv
            m.add_col_multiple(j, i, &entry);
            inv.add_row_multiple(i, j, &entry.neg());
        }
    }
    (m, inv)
}

/// A random curve with a known limit: `g_i = h1_i diag(t^w_i) h2_i^-1` with
/// polynomial unimodular `h1_i, h2_i`, a random `p`, and the first factor
/// rescaled by a power of `t` so that `g(t).p` has no poles and a nonzero value at `t = 0`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, field: &Field, dims: &[usize]) -> Result<(GroupCurve, Tensor)> {
    let mut factors = Vec::with_capacity(dims.len());
    for &n in dims {
        let (h1, _) = random_unimodular(rng, field, n);
        let (_, h2_inv) = random_unimodular(rng, field, n);
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        factors.push(h1.mul(&SeriesMatrix::diag_t_pow(field, &w))?.mul(&h2_inv)?);
    }
    let mut p = Tensor::zeros(field, dims)?;
    let total: usize = dims.iter().product();
    let mut idx = vec![0usize; dims.len()];
    for _ in 0..total {
        if rng.gen_bool(0.6) {
            p.set(&idx, field.random(rng, 3));
        }
        for (slot, &n) in idx.iter_mut().zip(dims).rev() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
    if p.is_zero() {
        p.set(&vec![0; dims.len()], field.one());
    }
    let image = p.act_series(&factors)?;
    let min_val = image
        .entries()
        .filter_map(|(_, s)| s.valuation())
        .min()
        .expect("g(t) is invertible and p is nonzero");
    factors[0] = factors[0].shift(-min_val);
    Ok((GroupCurve::standard(factors), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> Field {
        Field::Rationals
    }

    fn cubic(coeffs: [i64; 4]) -> Tensor {
        let f = q();
        let entries = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (vec![i, 0], f.from_i64(c)))
            .collect();
        Tensor::from_entries(&f, &[4, 1], entries).unwrap()
    }

    fn sl2_curve() -> GroupCurve {
        let f = q();
        GroupCurve {
            factors: vec![
                SeriesMatrix::parse(&f, &[&["t^-1", "0"], &["-t^-2", "t"]]).unwrap(),
                SeriesMatrix::identity(&f, 1),
            ],
            reps: vec![Representation::Sym3, Representation::Standard],
        }
    }

    #[test]
    fn sym3_identity_and_torus() {
        let f = q();
        let id = sym3_lift(&SeriesMatrix::identity(&f, 2)).unwrap();
        assert_eq!(id, SeriesMatrix::identity(&f, 4));
        let lifted = sym3_lift(&SeriesMatrix::diag_t_pow(&f, &[-2, 2])).unwrap();
        assert_eq!(lifted, SeriesMatrix::diag_t_pow(&f, &[6, 2, -2, -6]));
    }

    #[test]
    fn sym3_is_multiplicative_on_rotation() {
        let f = q();
        let g = Matrix::from_i64(&f, &[&[0, 1], &[-1, 0]]);
        let lg = Representation::Sym3.lift_constant(&g).unwrap();
        let g4 = g.mul(&g).unwrap().mul(&g).unwrap().mul(&g).unwrap();
        assert!(g4.is_identity());
        let lg4 = lg.mul(&lg).unwrap().mul(&lg).unwrap().mul(&lg).unwrap();
        assert!(lg4.is_identity());
        let lg2 = lg.mul(&lg).unwrap();
        assert_eq!(lg2, Representation::Sym3.lift_constant(&g.mul(&g).unwrap()).unwrap());
    }

    #[test]
    fn sl2_curve_specializes_to_x_cubed() {
        let p = cubic([0, 1, 0, 0]);
        let image = p.act_series(&sl2_curve().lifted().unwrap()).unwrap();
        let f = q();
        assert_eq!(image.get(&[0, 0]), &LaurentSeries::one(&f));
        assert_eq!(image.get(&[1, 0]), &LaurentSeries::t_pow(&f, 1));
        assert_eq!(check_specialization(&sl2_curve(), &p).unwrap(), cubic([1, 0, 0, 0]));
    }

    #[test]
    fn sl2_witness() {
        let p = cubic([0, 1, 0, 0]);
        let w = hm_witness(&sl2_curve(), &p, 16).unwrap();
        assert_eq!(w.cim[0].weights, vec![-2, 2]);
        assert_eq!(w.q, cubic([1, 0, 0, 0]));
        assert_eq!(w.q_tilde, cubic([0, 0, 0, 1]));
        assert!(w.shared_limit.is_zero());
        assert!(!w.q.is_zero());
        assert!(verify_witness(&sl2_curve(), &p, &w).is_ok());
    }

    #[test]
    fn identity_curve() {
        let f = q();
        let p = Tensor::from_entries(&f, &[2, 3], vec![(vec![0, 2], f.from_i64(4)), (vec![1, 0], f.one())]).unwrap();
        let g = GroupCurve::standard(vec![SeriesMatrix::identity(&f, 2), SeriesMatrix::identity(&f, 3)]);
        let w = hm_witness(&g, &p, 8).unwrap();
        assert!(w.lambda.factors().iter().all(|fac| fac.weights().iter().all(|x| x == &BigInt::from(0))));
        assert_eq!(w.shared_limit, p);
        assert_eq!(w.q_tilde, p);
    }

    #[test]
    fn positive_scalar_curve_gives_zero() {
        let f = q();
        let mut t = SeriesMatrix::identity(&f, 2);
        t = t.shift(1);
        let g = GroupCurve::standard(vec![t, SeriesMatrix::identity(&f, 2), SeriesMatrix::identity(&f, 2)]);
        let p = Tensor::unit(&f, 2, 3).unwrap();
        assert!(check_specialization(&g, &p).unwrap().is_zero());
    }

    #[test]
    fn pole_is_reported() {
        let f = q();
        let g = GroupCurve::standard(vec![SeriesMatrix::diag_t_pow(&f, &[-1, 0]), SeriesMatrix::identity(&f, 2)]);
        let p = Tensor::unit(&f, 2, 2).unwrap();
        match check_specialization(&g, &p) {
            Err(Error::NoLimit { position, exponent }) => {
                assert_eq!(position, vec![0, 0]);
                assert_eq!(exponent, BigInt::from(-1));
            }
            other => panic!("expected NoLimit, got {other:?}"),
        }
    }

    #[test]
    fn random_unimodular_inverse_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for field in [q(), Field::prime_u64(101).unwrap()] {
            for n in 1..=4 {
                let (m, inv) = random_unimodular(&mut rng, &field, n);
                assert!(m.is_exact() && inv.is_exact());
                assert_eq!(m.mul(&inv).unwrap(), SeriesMatrix::identity(&field, n));
            }
        }
    }

    #[test]
    fn random_instances_have_limits_and_witnesses() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dims in [vec![3, 3], vec![2, 3, 2]] {
            let (g, p) = random_instance(&mut rng, &q(), &dims).unwrap();
            let w = hm_witness(&g, &p, 16).unwrap();
            assert!(verify_witness(&g, &p, &w).is_ok());
        }
    }
}
