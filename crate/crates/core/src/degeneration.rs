//! The explicit order-3 degeneration behind the lower bound
//! `border subrank >= floor(sqrt(4n)) - 3`.
//!
//! Weights `a_1j = a_2j = 2^j`, `a_3l = -2^(r-l+2)` (`l <= r`) and `0` otherwise
//! cut out a pyramid `P` of nonpositive total weight. `S` is the unit tensor
//! on the weight-zero diagonal of `P`; `T~` extends `S` by identity blocks
//! planted outside `P`. The certificate checks `lim lambda(t).T~ = S` and that
//! the derivative of `(A, B, C, T) -> (A, B, C).T` restricted to `P` has full
//! rank `|P|` at `T~`, which makes the orbit map dominant.
//!
//! Index tuples are 1-based in this module's public types (they mirror the
//! combinatorics), and converted to 0-based only when touching tensors.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{random_prime, Field, Scalar};
use crate::matrix::{row_echelon_rank, Matrix};
use crate::modp::{IncrementalRank, ModP};
use crate::subgroup::{Direction, OneParamSubgroup};
use crate::tensor::Tensor;

/// Weakly increasing integer weights per tensor factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightProfile {
    pub weights: Vec<Vec<BigInt>>,
}

impl WeightProfile {
    pub fn new(weights: Vec<Vec<BigInt>>) -> Result<Self> {
        for (i, w) in weights.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::InvalidParameter(format!("factor {} has no weights", i + 1)));
            }
            if let Some(j) = w.windows(2).position(|p| p[0] > p[1]) {
                return Err(Error::InvalidParameter(format!(
                    "factor {} weights decrease at position {}",
                    i + 1,
                    j + 2
                )));
            }
        }
        Ok(WeightProfile { weights })
    }

    pub fn order(&self) -> usize {
        self.weights.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.weights.iter().map(Vec::len).collect()
    }

    /// Total weight of a 1-based index tuple.
    pub fn weight_of(&self, idx: &[usize]) -> BigInt {
        self.weights.iter().zip(idx).map(|(w, &j)| &w[j - 1]).sum()
    }

    pub fn subgroup(&self, field: &Field) -> OneParamSubgroup {
        OneParamSubgroup::standard(field, self.weights.clone())
    }
}

pub fn build_weight_profile(n: usize, r: usize) -> Result<WeightProfile> {
    if r == 0 || r > n {
        return Err(Error::InvalidParameter(format!("need 1 <= r <= n, got n = {n}, r = {r}")));
    }
    let pow2 = |e: usize| BigInt::one() << e;
    let ab: Vec<BigInt> = (1..=n).map(pow2).collect();
    let c: Vec<BigInt> = (1..=n)
        .map(|l| if l <= r { -pow2(r - l + 2) } else { BigInt::zero() })
        .collect();
    WeightProfile::new(vec![ab.clone(), ab, c])
}

/// The downward-closed set of nonpositive total weight and its weight-zero part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PyramidPattern {
    pub dims: Vec<usize>,
    pub points: BTreeSet<Vec<usize>>,
    pub zero_set: BTreeSet<Vec<usize>>,
}

impl PyramidPattern {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, idx: &[usize]) -> bool {
        self.points.contains(idx)
    }
}

/// Enumerates `{idx : sum_i a_{i idx_i} <= 0}`. Weights are sorted, so each
/// coordinate loop stops at the first index that already overshoots.
pub fn build_pyramid(profile: &WeightProfile) -> PyramidPattern {
    fn walk(
        profile: &WeightProfile,
        mins: &[BigInt],
        axis: usize,
        partial: BigInt,
        idx: &mut Vec<usize>,
        out: &mut PyramidPattern,
    ) {
        let rest: BigInt = mins[axis + 1..].iter().sum();
        for (j, w) in profile.weights[axis].iter().enumerate() {
            let s = &partial + w;
            if &s + &rest > BigInt::zero() {
                break;
            }
            idx.push(j + 1);
            if axis + 1 == profile.order() {
                if s.is_zero() {
                    out.zero_set.insert(idx.clone());
                }
                out.points.insert(idx.clone());
            } else {
                walk(profile, mins, axis + 1, s, idx, out);
            }
            idx.pop();
        }
    }
    let mins: Vec<BigInt> = profile.weights.iter().map(|w| w[0].clone()).collect();
    let mut out = PyramidPattern {
        dims: profile.dims(),
        points: BTreeSet::new(),
        zero_set: BTreeSet::new(),
    };
    walk(profile, &mins, 0, BigInt::zero(), &mut Vec::new(), &mut out);
    out
}

/// `{(j, k, l) : l <= r, j, k <= r - l + 1}` and its corners `(r-l+1, r-l+1, l)`.
pub fn pyramid_closed_form(n: usize, r: usize) -> PyramidPattern {
    let mut points = BTreeSet::new();
    let mut zero_set = BTreeSet::new();
    for l in 1..=r {
        let m = r - l + 1;
        for j in 1..=m {
            for k in 1..=m {
                points.insert(vec![j, k, l]);
            }
        }
        zero_set.insert(vec![m, m, l]);
    }
    PyramidPattern {
        dims: vec![n; 3],
        points,
        zero_set,
    }
}

pub fn pyramid_size(r: usize) -> usize {
    r * (r + 1) * (2 * r + 1) / 6
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// An `(s+1) x (s+1)` block planted in layer `l = r - s`, 1-based inclusive intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub parity: Parity,
    pub layer: usize,
    pub rows: (usize, usize),
    pub cols: (usize, usize),
}

impl Placement {
    pub fn size(&self) -> usize {
        self.rows.1 - self.rows.0 + 1
    }
}

/// `4n >= (r+3)^2`.
pub fn fits(n: usize, r: usize) -> bool {
    4 * n as u128 >= ((r + 3) as u128).pow(2)
}

/// Greedy placement: even `s` take row intervals `[j_s, j_s + s]` against
/// columns `[1, s+1]`, odd `s` take column intervals against rows `[1, s+1]`;
/// both kinds are packed upward from `r + 1` in increasing `s`.
pub fn place_blocks(n: usize, r: usize) -> Result<Vec<Placement>> {
    if r == 0 || r > n {
        return Err(Error::InvalidParameter(format!("need 1 <= r <= n, got n = {n}, r = {r}")));
    }
    let mut next_row = r + 1;
    let mut next_col = r + 1;
    let mut out = Vec::with_capacity(r);
    for s in 0..r {
        let layer = r - s;
        let (parity, cursor) = if s % 2 == 0 {
            (Parity::Even, &mut next_row)
        } else {
            (Parity::Odd, &mut next_col)
        };
        let span = (*cursor, *cursor + s);
        if span.1 > n {
            return Err(Error::Placement(format!(
                "{} block for layer {layer} needs [{}, {}] but n = {n}",
                parity.name(),
                span.0,
                span.1
            )));
        }
        *cursor += s + 1;
        let fixed = (1, s + 1);
        let (rows, cols) = match parity {
            Parity::Even => (span, fixed),
            Parity::Odd => (fixed, span),
        };
        out.push(Placement { parity, layer, rows, cols });
    }
    Ok(out)
}

/// `S`: ones on the weight-zero corners of the pyramid.
pub fn build_s(field: &Field, n: usize, r: usize) -> Result<Tensor> {
    let entries = (1..=r)
        .map(|l| (vec![r - l, r - l, l - 1], field.one()))
        .collect();
    Tensor::from_entries(field, &[n, n, n], entries)
}

/// `T~ = S` plus the planted blocks, each `blocks[i]` filling `placements[i]`.
pub fn assemble_t_tilde(field: &Field, n: usize, r: usize, placements: &[Placement], blocks: &[Matrix]) -> Result<Tensor> {
    let mut t = build_s(field, n, r)?;
    for (pl, b) in placements.iter().zip(blocks) {
        for a in 0..pl.size() {
            for c in 0..pl.size() {
                let v = b.get(a, c);
                if !field.is_zero(v) {
                    t.set(&[pl.rows.0 - 1 + a, pl.cols.0 - 1 + c, pl.layer - 1], v.clone());
                }
            }
        }
    }
    Ok(t)
}

/// `T~` with identity blocks. Rejects `(n, r)` outside the fit condition, then
/// runs (and so verifies) the greedy placement.
pub fn build_t_tilde(field: &Field, n: usize, r: usize) -> Result<(Tensor, Vec<Placement>)> {
    if r == 0 || r > n {
        return Err(Error::InvalidParameter(format!("need 1 <= r <= n, got n = {n}, r = {r}")));
    }
    if !fits(n, r) {
        return Err(Error::FitCondition { n, r });
    }
    let placements = place_blocks(n, r)?;
    let blocks: Vec<Matrix> = placements.iter().map(|p| Matrix::identity(field, p.size())).collect();
    Ok((assemble_t_tilde(field, n, r, &placements, &blocks)?, placements))
}

/// Columns of the restricted Jacobian: for `E_ab` (`a <= b`) in factor 1 the
/// entry at `(a, k, l) in P` is `T~[b, k, l]`; factor 2 likewise on the
/// second coordinate. Zero columns are dropped. Rows are positions in `P`'s
/// sorted order.
fn jacobian_columns(t: &Tensor, pattern: &PyramidPattern) -> Vec<Vec<(usize, Scalar)>> {
    let f = t.field();
    let n = [t.dims()[0], t.dims()[1]];
    let row_of: HashMap<&Vec<usize>, usize> = pattern.points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut by_coord: [HashMap<usize, Vec<&Vec<usize>>>; 2] = [HashMap::new(), HashMap::new()];
    for p in &pattern.points {
        by_coord[0].entry(p[0]).or_default().push(p);
        by_coord[1].entry(p[1]).or_default().push(p);
    }
    let mut cols = Vec::new();
    for axis in 0..2 {
        for a in 1..=n[axis] {
            let Some(pts) = by_coord[axis].get(&a) else { continue };
            for b in a..=n[axis] {
                let mut col = Vec::new();
                for p in pts {
                    let mut src: Vec<usize> = p.iter().map(|&x| x - 1).collect();
                    src[axis] = b - 1;
                    let v = t.get(&src);
                    if !f.is_zero(v) {
                        col.push((row_of[p], v.clone()));
                    }
                }
                if !col.is_empty() {
                    cols.push(col);
                }
            }
        }
    }
    cols
}

fn scalar_mod(field: &Field, v: &Scalar, target: &Field) -> Result<u64> {
    let s = match (field, v) {
        (Field::Rationals, Scalar::Rat(x)) => target.from_rational(x)?,
        _ => {
            field.ensure_same(target)?;
            v.clone()
        }
    };
    match s {
        Scalar::Mod(x) => Ok(x.to_u64().expect("residue below a word-size modulus")),
        Scalar::Rat(_) => unreachable!("target is a prime field"),
    }
}

/// Exact rank of the restricted Jacobian over `field`. `T~` must live over
/// `field`, or over `Q` when `field` is a prime field (entries are reduced).
pub fn jacobian_dominance_rank(t: &Tensor, pattern: &PyramidPattern, field: &Field) -> Result<usize> {
    if t.order() != 3 {
        return Err(Error::Shape(format!("order-3 tensor expected, got order {}", t.order())));
    }
    let cols = jacobian_columns(t, pattern);
    let m = pattern.len();
    if let Some(p) = field.small_modulus() {
        let fp = ModP::new(p);
        let mut acc = IncrementalRank::new(fp, m);
        for col in &cols {
            if acc.is_full() {
                break;
            }
            let sparse = col
                .iter()
                .map(|(i, v)| Ok((*i, scalar_mod(t.field(), v, field)?)))
                .collect::<Result<Vec<_>>>()?;
            acc.push_sparse(&sparse);
        }
        return Ok(acc.rank());
    }
    field.ensure_same(t.field())?;
    let dense: Vec<Vec<Scalar>> = cols
        .iter()
        .map(|col| {
            let mut v = vec![field.zero(); m];
            for (i, x) in col {
                v[*i] = x.clone();
            }
            v
        })
        .collect();
    Ok(row_echelon_rank(field, dense))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Certified => "Certified",
            Verdict::Refuted => "Refuted",
            Verdict::Inconclusive => "Inconclusive",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "Certified" => Ok(Verdict::Certified),
            "Refuted" => Ok(Verdict::Refuted),
            "Inconclusive" => Ok(Verdict::Inconclusive),
            _ => Err(Error::Parse(format!("unknown verdict {s:?}"))),
        }
    }
}

/// Where the Jacobian rank was computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankField {
    /// Reduction of the rational Jacobian modulo a word-size prime.
    Prime(u64),
    /// The run field itself (`Q` in exact mode, or the given `F_p`).
    Exact,
}

#[derive(Clone, Debug)]
pub struct DegenerationCertificate {
    pub field: Field,
    pub n: usize,
    pub r: usize,
    pub profile: WeightProfile,
    pub s: Tensor,
    pub t_tilde: Tensor,
    pub placements: Vec<Placement>,
    /// Identity blocks, or the random invertible ones used as a fallback.
    pub random_blocks: bool,
    pub limit_check: bool,
    pub unit_rank: Option<usize>,
    pub jacobian_rank: usize,
    pub pyramid_size: usize,
    pub rank_field: RankField,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// Rank over the run field instead of modulo a random prime.
    pub exact_rank: bool,
    /// Additional primes tried after a rank deficiency.
    pub max_prime_retries: usize,
    /// Rounds of random invertible blocks tried after the identity blocks.
    pub max_block_retries: usize,
    /// Largest `|P|` for which a deficiency over `Q` is confirmed exactly
    /// (which turns Inconclusive into Refuted).
    pub exact_confirm_limit: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            exact_rank: false,
            max_prime_retries: 3,
            max_block_retries: 3,
            exact_confirm_limit: 200,
        }
    }
}

/// `floor(sqrt(4n)) - 3`, the default size; 0 when that is not positive.
pub fn default_r(n: usize) -> usize {
    crate::bounds::d3_lower(n as u64) as usize
}

fn random_invertible<R: Rng + ?Sized>(rng: &mut R, field: &Field, k: usize) -> Matrix {
    loop {
        let rows = (0..k)
            .map(|_| (0..k).map(|_| field.from_i64(rng.gen_range(-5..=5))).collect())
            .collect();
        let m = Matrix::from_rows(field, rows).expect("square rows");
        if m.is_invertible() {
            return m;
        }
    }
}

/// Checks every structural claim of the construction on `T~` and returns the
/// limit verdict and the unit size of `S`.
fn structural_checks(profile: &WeightProfile, s: &Tensor, t: &Tensor) -> Result<(bool, Option<usize>)> {
    let lam = profile.subgroup(t.field());
    let limit_ok = match lam.limit(t, Direction::ToZero) {
        Ok(l) => &l == s,
        Err(Error::NoLimit { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok((limit_ok, s.is_diagonal_unit_equivalent()))
}

fn rank_over<R: Rng + ?Sized>(
    rng: &mut R,
    t: &Tensor,
    pattern: &PyramidPattern,
    opts: &CertifyOptions,
    used: &mut Vec<u64>,
) -> Result<(usize, RankField)> {
    let field = t.field();
    if opts.exact_rank || !matches!(field, Field::Rationals) {
        return Ok((jacobian_dominance_rank(t, pattern, field)?, RankField::Exact));
    }
    let p = loop {
        let p = random_prime(rng, 62);
        if !used.contains(&p) {
            break p;
        }
    };
    used.push(p);
    Ok((jacobian_dominance_rank(t, pattern, &Field::prime_u64(p)?)?, RankField::Prime(p)))
}

/// Runs the whole construction for `(n, r)` and reports whether it certifies
/// that tensors of border subrank at least `r` are dense in `(K^n)^{(x)3}`.
pub fn certify_generic_lower_bound<R: Rng + ?Sized>(
    rng: &mut R,
    field: &Field,
    n: usize,
    r: Option<usize>,
    opts: &CertifyOptions,
) -> Result<DegenerationCertificate> {
    let r = r.unwrap_or_else(|| default_r(n));
    if r == 0 {
        return Err(Error::InvalidParameter(format!("r = floor(sqrt(4n)) - 3 is below 1 for n = {n}")));
    }
    let profile = build_weight_profile(n, r)?;
    let pattern = build_pyramid(&profile);
    let closed = pyramid_closed_form(n, r);
    if pattern.points != closed.points || pattern.zero_set != closed.zero_set {
        return Err(Error::InvalidParameter("enumerated pyramid differs from its closed form".into()));
    }
    let (mut t, placements) = build_t_tilde(field, n, r)?;
    let s = build_s(field, n, r)?;
    let target = pyramid_size(r);
    let mut used = Vec::new();
    let (limit_check, unit_rank) = structural_checks(&profile, &s, &t)?;
    let mut cert = DegenerationCertificate {
        field: field.clone(),
        n,
        r,
        profile,
        s,
        t_tilde: t.clone(),
        placements,
        random_blocks: false,
        limit_check,
        unit_rank,
        jacobian_rank: 0,
        pyramid_size: pattern.len(),
        rank_field: RankField::Exact,
        verdict: Verdict::Refuted,
    };
    if !limit_check || unit_rank != Some(r) || pattern.len() != target {
        return Ok(cert);
    }
    // identity blocks first, then a few primes, then random blocks
    let (rank, rf) = rank_over(rng, &t, &pattern, opts, &mut used)?;
    cert.jacobian_rank = rank;
    cert.rank_field = rf;
    if rank == target {
        cert.verdict = Verdict::Certified;
        return Ok(cert);
    }
    if cert.rank_field != RankField::Exact {
        for _ in 0..opts.max_prime_retries {
            let (rank, rf) = rank_over(rng, &t, &pattern, opts, &mut used)?;
            if rank > cert.jacobian_rank {
                cert.jacobian_rank = rank;
                cert.rank_field = rf;
            }
            if rank == target {
                cert.verdict = Verdict::Certified;
                return Ok(cert);
            }
        }
    }
    let identity_rank_exact = if matches!(field, Field::Rationals) && pattern.len() <= opts.exact_confirm_limit {
        Some(jacobian_dominance_rank(&t, &pattern, field)?)
    } else {
        None
    };
    for _ in 0..opts.max_block_retries {
        let blocks: Vec<Matrix> = cert.placements.iter().map(|p| random_invertible(rng, field, p.size())).collect();
        t = assemble_t_tilde(field, n, r, &cert.placements, &blocks)?;
        let (limit_ok, unit) = structural_checks(&cert.profile, &cert.s, &t)?;
        if !limit_ok || unit != Some(r) {
            continue;
        }
        let (rank, rf) = rank_over(rng, &t, &pattern, opts, &mut used)?;
        if rank == target {
            cert.t_tilde = t;
            cert.random_blocks = true;
            cert.jacobian_rank = rank;
            cert.rank_field = rf;
            cert.verdict = Verdict::Certified;
            return Ok(cert);
        }
    }
    // A deficiency is only a refutation of the construction when it is exact over Q.
    cert.verdict = match identity_rank_exact {
        Some(k) if k < target => Verdict::Refuted,
        _ => Verdict::Inconclusive,
    };
    Ok(cert)
}

/// Named clause that failed during re-verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseFailure {
    pub clause: &'static str,
    pub detail: String,
}

fn fail(clause: &'static str, detail: impl Into<String>) -> ClauseFailure {
    ClauseFailure {
        clause,
        detail: detail.into(),
    }
}

/// Re-derives a certificate from `(n, r)` and the stored tensors. The Jacobian
/// rank is recomputed modulo `fresh_prime` when the run field is `Q`.
pub fn verify_certificate(cert: &DegenerationCertificate, fresh_prime: u64) -> std::result::Result<(), ClauseFailure> {
    let (n, r) = (cert.n, cert.r);
    let field = &cert.field;
    let profile = build_weight_profile(n, r).map_err(|e| fail("profile", e.to_string()))?;
    if profile != cert.profile {
        return Err(fail("profile", "weights differ from the profile rebuilt from (n, r)"));
    }
    let pattern = build_pyramid(&profile);
    if pattern.len() != cert.pyramid_size || pattern.len() != pyramid_size(r) {
        return Err(fail(
            "pyramid-size",
            format!("stored {}, enumerated {}, closed form {}", cert.pyramid_size, pattern.len(), pyramid_size(r)),
        ));
    }
    let placements = if fits(n, r) {
        place_blocks(n, r).map_err(|e| fail("placements", e.to_string()))?
    } else {
        return Err(fail("placements", Error::FitCondition { n, r }.to_string()));
    };
    if placements != cert.placements {
        return Err(fail("placements", "stored placements differ from the greedy placement"));
    }
    if cert.t_tilde.dims() != [n, n, n] || cert.s.dims() != [n, n, n] {
        return Err(fail("T|_P = S|_P", "tensor dimensions differ from (n, n, n)"));
    }
    let expected_s = build_s(field, n, r).map_err(|e| fail("unit-equivalence", e.to_string()))?;
    for p in &pattern.points {
        let idx: Vec<usize> = p.iter().map(|x| x - 1).collect();
        if cert.t_tilde.get(&idx) != cert.s.get(&idx) || cert.s.get(&idx) != expected_s.get(&idx) {
            return Err(fail("T|_P = S|_P", format!("entries differ at {p:?}")));
        }
    }
    // off P, T~ may only be supported inside planted blocks
    for (idx, _) in cert.t_tilde.support() {
        let one_based: Vec<usize> = idx.iter().map(|x| x + 1).collect();
        if pattern.contains(&one_based) {
            continue;
        }
        let inside = placements.iter().any(|pl| {
            one_based[2] == pl.layer
                && (pl.rows.0..=pl.rows.1).contains(&one_based[0])
                && (pl.cols.0..=pl.cols.1).contains(&one_based[1])
        });
        if !inside {
            return Err(fail("placements", format!("entry at {one_based:?} lies outside P and every block")));
        }
    }
    let lam = profile.subgroup(field);
    match lam.limit(&cert.t_tilde, Direction::ToZero) {
        Ok(l) if l == cert.s => {}
        Ok(_) => return Err(fail("limit", "lim lambda(t).T~ differs from S")),
        Err(e) => return Err(fail("limit", e.to_string())),
    }
    if !cert.limit_check {
        return Err(fail("limit", "stored limit check is false but the limit holds"));
    }
    if cert.s != expected_s || cert.s.is_diagonal_unit_equivalent() != Some(r) || cert.unit_rank != Some(r) {
        return Err(fail("unit-equivalence", format!("S is not a unit tensor of size {r}")));
    }
    let rank = match field {
        Field::Rationals => {
            let fp = Field::prime_u64(fresh_prime).map_err(|e| fail("jacobian-rank", e.to_string()))?;
            jacobian_dominance_rank(&cert.t_tilde, &pattern, &fp)
        }
        _ => jacobian_dominance_rank(&cert.t_tilde, &pattern, field),
    }
    .map_err(|e| fail("jacobian-rank", e.to_string()))?;
    if cert.verdict == Verdict::Certified {
        if rank != pattern.len() {
            return Err(fail("jacobian-rank", format!("rank {rank} below |P| = {}", pattern.len())));
        }
        if cert.jacobian_rank != pattern.len() {
            return Err(fail("jacobian-rank", format!("stored rank {} is not |P|", cert.jacobian_rank)));
        }
    } else if rank == pattern.len() {
        return Err(fail("verdict", format!("stored verdict {} but the rank is full", cert.verdict.name())));
    }
    Ok(())
}
