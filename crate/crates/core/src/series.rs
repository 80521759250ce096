//! Truncated Laurent series over an exact field.
//!
//! A series stores the coefficients of `t^val, t^(val+1), ...` together with
//! its precision: either exact (a Laurent polynomial) or known modulo `t^N`.
//! Arithmetic propagates precision conservatively, so every coefficient a
//! series reports below its truncation order is correct.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

/// Default truncation order for computations that do not ask for one.
pub const DEFAULT_PRECISION: i64 = 32;

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    field: Field,
    val: i64,
    coeffs: Vec<Scalar>,
    /// `None` for exact series; otherwise terms `t^N` and above are unknown.
    trunc: Option<i64>,
}

impl LaurentSeries {
    /// Laurent polynomial `sum coeffs[i] t^(val+i)`.
    pub fn exact(field: &Field, val: i64, coeffs: Vec<Scalar>) -> Self {
        Self::build(field, val, coeffs, None)
    }

    /// Series known modulo `t^trunc`; coefficients at or past `trunc` are dropped.
    pub fn truncated(field: &Field, val: i64, coeffs: Vec<Scalar>, trunc: i64) -> Self {
        Self::build(field, val, coeffs, Some(trunc))
    }

    fn build(field: &Field, val: i64, coeffs: Vec<Scalar>, trunc: Option<i64>) -> Self {
        let mut s = LaurentSeries {
            field: field.clone(),
            val,
            coeffs,
            trunc,
        };
        s.normalize();
        s
    }

    pub fn zero(field: &Field) -> Self {
        Self::exact(field, 0, Vec::new())
    }

    /// `O(t^trunc)`: zero to the stated precision, valuation unknown.
    pub fn zero_to_precision(field: &Field, trunc: i64) -> Self {
        Self::truncated(field, trunc, Vec::new(), trunc)
    }

    pub fn one(field: &Field) -> Self {
        Self::constant(field, field.one())
    }

    pub fn constant(field: &Field, c: Scalar) -> Self {
        Self::exact(field, 0, vec![c])
    }

    /// `c * t^exp`.
    pub fn monomial(field: &Field, c: Scalar, exp: i64) -> Self {
        Self::exact(field, exp, vec![c])
    }

    /// `t^exp`.
    pub fn t_pow(field: &Field, exp: i64) -> Self {
        Self::monomial(field, field.one(), exp)
    }

    fn normalize(&mut self) {
        if let Some(n) = self.trunc {
            let keep = (n - self.val).clamp(0, self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self
            .coeffs
            .iter()
            .position(|c| !self.field.is_zero(c))
            .unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
        while self.coeffs.last().is_some_and(|c| self.field.is_zero(c)) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.val = self.trunc.unwrap_or(0);
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// Truncation order `N`, or `None` for an exact series.
    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    /// Exponent of the first stored coefficient (meaningless for zero series).
    pub fn val_offset(&self) -> i64 {
        self.val
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Certified valuation: `None` when the series is zero, exactly or to precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    /// A lower bound on the true valuation; `None` only for the exact zero series.
    pub fn valuation_bound(&self) -> Option<i64> {
        match (self.coeffs.is_empty(), self.trunc) {
            (false, _) => Some(self.val),
            (true, Some(n)) => Some(n),
            (true, None) => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.trunc.is_none()
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.is_empty() && self.trunc.is_some()
    }

    /// Coefficient of `t^e`, or `None` if `e` is at or past the truncation order.
    pub fn coeff(&self, e: i64) -> Option<Scalar> {
        if self.trunc.is_some_and(|n| e >= n) {
            return None;
        }
        let i = e - self.val;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Some(self.field.zero())
        } else {
            Some(self.coeffs[i as usize].clone())
        }
    }

    /// Iterates over the nonzero terms `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.field.is_zero(c))
            .map(move |(i, c)| (self.val + i as i64, c))
    }

    /// Lowers the precision to `t^n` (no-op if already coarser).
    pub fn truncate_to(&self, n: i64) -> Self {
        let trunc = Some(self.trunc.map_or(n, |m| m.min(n)));
        Self::build(&self.field, self.val, self.coeffs.clone(), trunc)
    }

    /// Forgets the truncation order; only sound when the caller knows the
    /// omitted tail is zero.
    pub fn assume_exact(&self) -> Self {
        Self::build(&self.field, self.val, self.coeffs.clone(), None)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.field.ensure_same(&other.field)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.field.ensure_same(&other.field)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.field.ensure_same(&other.field)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let f = &self.field;
        let trunc = match (self.trunc, other.trunc) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a),
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        if self.coeffs.is_empty() {
            return Self::build(f, other.val, other.coeffs.clone(), trunc);
        }
        if other.coeffs.is_empty() {
            return Self::build(f, self.val, self.coeffs.clone(), trunc);
        }
        let lo = self.val.min(other.val);
        let mut hi = (self.val + self.coeffs.len() as i64).max(other.val + other.coeffs.len() as i64);
        if let Some(n) = trunc {
            hi = hi.min(n);
        }
        if hi <= lo {
            return Self::build(f, lo, Vec::new(), trunc);
        }
        let mut out = vec![f.zero(); (hi - lo) as usize];
        for s in [self, other] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let e = s.val + i as i64;
                if e < hi {
                    let slot = &mut out[(e - lo) as usize];
                    *slot = f.add(slot, c);
                }
            }
        }
        Self::build(f, lo, out, trunc)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.field.neg(c)).collect();
        Self::build(&self.field, self.val, coeffs, self.trunc)
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let f = &self.field;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(f);
        }
        let trunc = match (self.trunc, other.trunc) {
            (None, None) => None,
            (Some(na), None) => Some(na + other.val),
            (None, Some(nb)) => Some(nb + self.val),
            (Some(na), Some(nb)) => {
                let va = self.valuation_bound().expect("nonzero bound");
                let vb = other.valuation_bound().expect("nonzero bound");
                Some((va + nb).min(vb + na))
            }
        };
        let lo = self.val + other.val;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::build(f, lo, Vec::new(), trunc);
        }
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Some(n) = trunc {
            len = len.min((n - lo).max(0) as usize);
        }
        let mut out = vec![f.zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !f.is_zero(b) {
                    out[i + j] = f.add(&out[i + j], &f.mul(a, b));
                }
            }
        }
        Self::build(f, lo, out, trunc)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if self.field.is_zero(c) && self.is_exact() {
            return Self::zero(&self.field);
        }
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        Self::build(&self.field, self.val, coeffs, self.trunc)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut s = self.clone();
        if !s.coeffs.is_empty() || s.trunc.is_some() {
            s.val += k;
        }
        s.trunc = s.trunc.map(|n| n + k);
        s
    }

    /// Inverse of a series with certifiable valuation `v`, accurate so that
    /// `self * inverse == 1 mod t^n`; the inverse is known modulo `t^(n - v)`.
    ///
    /// Exact only when `self` is an exact monomial.
    pub fn invert_unit(&self, n: i64) -> Result<Self> {
        let f = &self.field;
        let v = match self.valuation() {
            Some(v) => v,
            None if self.is_exact() => return Err(Error::Singular("inverting the zero series".into())),
            None => {
                return Err(Error::Precision(format!(
                    "series is zero to precision t^{}, valuation not certifiable",
                    self.trunc.unwrap_or_default()
                )))
            }
        };
        let lead_inv = f.inv(&self.coeffs[0]).expect("leading coefficient is nonzero");
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(Self::monomial(f, lead_inv, -v));
        }
        // relative precision of the unit part u = t^-v * self
        let mut rel = n;
        if let Some(ns) = self.trunc {
            rel = rel.min(ns - v);
        }
        if rel <= 0 {
            return Ok(Self::zero_to_precision(f, -v + rel));
        }
        let rel = rel as usize;
        let mut inv: Vec<Scalar> = Vec::with_capacity(rel);
        inv.push(lead_inv.clone());
        for k in 1..rel {
            let mut acc = f.zero();
            for i in 1..=k.min(self.coeffs.len() - 1) {
                acc = f.add(&acc, &f.mul(&self.coeffs[i], &inv[k - i]));
            }
            inv.push(f.neg(&f.mul(&lead_inv, &acc)));
        }
        Ok(Self::truncated(f, -v, inv, -v + rel as i64))
    }

    /// Constant coefficient of a series without negative-exponent terms.
    pub fn constant_term(&self) -> Result<Scalar> {
        if let Some((e, _)) = self.terms().next() {
            if e < 0 {
                return Err(Error::InvalidParameter(format!(
                    "series {self} has a pole of order {}",
                    -e
                )));
            }
        }
        self.coeff(0).ok_or_else(|| {
            Error::Precision(format!("constant term of {self} is beyond its precision"))
        })
    }

    /// True when every coefficient below `t^n` is known and zero.
    pub fn vanishes_mod(&self, n: i64) -> bool {
        if self.trunc.is_some_and(|m| m < n) {
            return false;
        }
        self.terms().all(|(e, _)| e >= n)
    }

    /// Parses a Laurent polynomial such as `"t^-1 - 2t + 3/2 t^2 + O(t^5)"`.
    ///
    /// An `O(t^N)` term marks the series as truncated at `N`.
    pub fn parse(field: &Field, text: &str) -> Result<Self> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty series".into()));
        }
        let mut terms: Vec<(i64, Scalar)> = Vec::new();
        let mut trunc = None;
        let mut pieces = Vec::new();
        let mut start = 0;
        let bytes = cleaned.as_bytes();
        for i in 1..bytes.len() {
            let c = bytes[i];
            let prev = bytes[i - 1];
            if (c == b'+' || c == b'-') && prev != b'^' && prev != b'(' && prev != b'/' {
                pieces.push(&cleaned[start..i]);
                start = i;
            }
        }
        pieces.push(&cleaned[start..]);
        for piece in pieces {
            let (sign, body) = match piece.as_bytes()[0] {
                b'+' => ("", &piece[1..]),
                b'-' => ("-", &piece[1..]),
                _ => ("", piece),
            };
            if let Some(inner) = body.strip_prefix("O(").and_then(|b| b.strip_suffix(')')) {
                let n = match inner.strip_prefix("t^") {
                    Some(e) => e.parse::<i64>(),
                    None if inner == "t" => Ok(1),
                    None if inner == "1" => Ok(0),
                    None => inner.parse::<i64>().map(|_| i64::MIN),
                }
                .ok()
                .filter(|&n| n != i64::MIN)
                .ok_or_else(|| Error::Parse(format!("malformed order term {piece:?}")))?;
                trunc = Some(n);
                continue;
            }
            let (coeff_txt, exp) = match body.find('t') {
                Some(pos) => {
                    let rest = &body[pos + 1..];
                    let exp = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .and_then(|e| e.trim_matches(|c| c == '(' || c == ')').parse::<i64>().ok())
                            .ok_or_else(|| Error::Parse(format!("malformed exponent in {piece:?}")))?
                    };
                    (body[..pos].trim_end_matches('*'), exp)
                }
                None => (body, 0),
            };
            let coeff = if coeff_txt.is_empty() {
                field.parse(&format!("{sign}1"))?
            } else {
                field.parse(&format!("{sign}{coeff_txt}"))?
            };
            terms.push((exp, coeff));
        }
        Ok(Self::from_terms(field, &terms, trunc))
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms(field: &Field, terms: &[(i64, Scalar)], trunc: Option<i64>) -> Self {
        if terms.is_empty() {
            return match trunc {
                Some(n) => Self::zero_to_precision(field, n),
                None => Self::zero(field),
            };
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![field.zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            let slot = &mut coeffs[(e - lo) as usize];
            *slot = field.add(slot, c);
        }
        Self::build(field, lo, coeffs, trunc)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let s = self.field.format(c);
            let (neg, mag) = match s.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(out, "-")?;
                }
            } else {
                write!(out, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (e, mag.as_str()) {
                (0, m) => write!(out, "{m}")?,
                (1, "1") => write!(out, "t")?,
                (e, "1") => write!(out, "t^{e}")?,
                (1, m) => write!(out, "{m}*t")?,
                (e, m) => write!(out, "{m}*t^{e}")?,
            }
        }
        match (first, self.trunc) {
            (true, None) => write!(out, "0"),
            (true, Some(n)) => write!(out, "O(t^{n})"),
            (false, Some(n)) => write!(out, " + O(t^{n})"),
            (false, None) => Ok(()),
        }
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
