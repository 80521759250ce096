//! JSON encodings of every object that crosses the command line.
//!
//! Values are built as `serde_json::Value`, whose maps keep keys sorted, so
//! equal objects always serialize to identical bytes. Scalars are strings
//! (`"3"`, `"-1/2"`), integers that may exceed 64 bits are strings, and tensor
//! indices are 1-based.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::degeneration::{DegenerationCertificate, Parity, Placement, RankField, Verdict, WeightProfile};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::hm::{GroupCurve, HmWitness, Representation};
use crate::loop_group::CimDecomposition;
use crate::matrix::Matrix;
use crate::series::LaurentSeries;
use crate::series_matrix::SeriesMatrix;
use crate::subgroup::{OneParamSubgroup, SubgroupFactor};
use crate::tensor::Tensor;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn bad(what: &str) -> Error {
    Error::Parse(format!("malformed {what}"))
}

pub fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(what))
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    match v {
        Value::Number(n) => n.as_i64().ok_or_else(|| bad(what)),
        Value::String(s) => s.trim().parse().map_err(|_| bad(what)),
        _ => Err(bad(what)),
    }
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    usize::try_from(as_i64(v, what)?).map_err(|_| bad(what))
}

fn as_bigint(v: &Value, what: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| bad(what)),
        Value::String(s) => s.trim().parse().map_err(|_| bad(what)),
        _ => Err(bad(what)),
    }
}

fn as_bool(v: &Value, what: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| bad(what))
}

pub fn field_to_json(f: &Field) -> Value {
    match f.modulus() {
        None => json!({"kind": "Q"}),
        Some(p) => json!({"kind": "Fp", "p": p.to_string()}),
    }
}

pub fn field_from_json(v: &Value) -> Result<Field> {
    match get(v, "kind")?.as_str() {
        Some("Q") => Ok(Field::Rationals),
        Some("Fp") => {
            let p = get(v, "p")?;
            let text = match p {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(bad("prime")),
            };
            Field::prime(text.trim().parse().map_err(|_| bad("prime"))?)
        }
        _ => Err(bad("field kind")),
    }
}

/// The field of a document: its own `"field"` if present (which must agree
/// with `fallback` when both are given), else `fallback`, else `Q`.
pub fn document_field(doc: &Value, fallback: Option<&Field>) -> Result<Field> {
    match (doc.get("field"), fallback) {
        (Some(v), Some(f)) => {
            let own = field_from_json(v)?;
            own.ensure_same(f)?;
            Ok(own)
        }
        (Some(v), None) => field_from_json(v),
        (None, Some(f)) => Ok(f.clone()),
        (None, None) => Ok(Field::Rationals),
    }
}

pub fn scalar_to_json(f: &Field, s: &Scalar) -> Value {
    Value::String(f.format(s))
}

pub fn scalar_from_json(f: &Field, v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => f.parse(s),
        Value::Number(n) => f.parse(&n.to_string()),
        _ => Err(bad("scalar")),
    }
}

/// `{"val", "coeffs", "trunc", "exact"}`; exact series report `trunc = val + len`.
pub fn series_to_json(s: &LaurentSeries) -> Value {
    let f = s.field();
    let coeffs: Vec<Value> = s.coeffs().iter().map(|c| scalar_to_json(f, c)).collect();
    let trunc = s.trunc().unwrap_or(s.val_offset() + coeffs.len() as i64);
    json!({
        "val": s.val_offset(),
        "coeffs": coeffs,
        "trunc": trunc,
        "exact": s.is_exact(),
    })
}

/// Accepts the object form or a text form such as `"t^-1 + 2*t + O(t^4)"`.
pub fn series_from_json(f: &Field, v: &Value) -> Result<LaurentSeries> {
    match v {
        Value::String(s) => LaurentSeries::parse(f, s),
        Value::Number(n) => LaurentSeries::parse(f, &n.to_string()),
        Value::Object(_) => {
            let val = as_i64(get(v, "val")?, "series val")?;
            let coeffs = as_array(get(v, "coeffs")?, "series coeffs")?
                .iter()
                .map(|c| scalar_from_json(f, c))
                .collect::<Result<Vec<_>>>()?;
            let exact = match v.get("exact") {
                Some(e) => as_bool(e, "series exact flag")?,
                None => v.get("trunc").is_none(),
            };
            if exact {
                Ok(LaurentSeries::exact(f, val, coeffs))
            } else {
                let trunc = as_i64(get(v, "trunc")?, "series trunc")?;
                if trunc < val + coeffs.len() as i64 {
                    return Err(Error::Parse(format!("series coefficients run past its truncation order {trunc}")));
                }
                Ok(LaurentSeries::truncated(f, val, coeffs, trunc))
            }
        }
        _ => Err(bad("series")),
    }
}

pub fn series_matrix_to_json(m: &SeriesMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| series_to_json(m.get(i, j))).collect()))
            .collect(),
    )
}

pub fn series_matrix_from_json(f: &Field, v: &Value) -> Result<SeriesMatrix> {
    let rows = as_array(v, "series matrix")?
        .iter()
        .map(|row| {
            as_array(row, "series matrix row")?
                .iter()
                .map(|e| series_from_json(f, e))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SeriesMatrix::from_rows(f, rows)
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|x| scalar_to_json(m.field(), x)).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(f: &Field, v: &Value) -> Result<Matrix> {
    let rows = as_array(v, "matrix")?
        .iter()
        .map(|row| {
            as_array(row, "matrix row")?
                .iter()
                .map(|e| scalar_from_json(f, e))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(f, rows)
}

/// `{"dims", "entries": [{"idx": 1-based, "value"}]}`, nonzero entries in row-major order.
pub fn tensor_to_json(t: &Tensor) -> Value {
    let entries: Vec<Value> = t
        .support()
        .map(|(idx, v)| {
            json!({
                "idx": idx.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "value": scalar_to_json(t.field(), v),
            })
        })
        .collect();
    json!({"dims": t.dims(), "entries": entries})
}

pub fn tensor_from_json(f: &Field, v: &Value) -> Result<Tensor> {
    let dims = as_array(get(v, "dims")?, "tensor dims")?
        .iter()
        .map(|d| as_usize(d, "tensor dimension"))
        .collect::<Result<Vec<_>>>()?;
    let entries = as_array(get(v, "entries")?, "tensor entries")?
        .iter()
        .map(|e| {
            let idx = as_array(get(e, "idx")?, "tensor index")?
                .iter()
                .map(|i| match as_usize(i, "tensor index")? {
                    0 => Err(Error::Parse("tensor indices are 1-based".into())),
                    k => Ok(k - 1),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((idx, scalar_from_json(f, get(e, "value")?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Tensor::from_entries(f, &dims, entries)
}

pub fn subgroup_to_json(l: &OneParamSubgroup) -> Value {
    let factors: Vec<Value> = l
        .factors()
        .iter()
        .map(|fac| {
            json!({
                "basis": fac.basis().map_or(Value::String("standard".into()), matrix_to_json),
                "weights": fac.weights().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"factors": factors})
}

pub fn subgroup_from_json(f: &Field, v: &Value) -> Result<OneParamSubgroup> {
    let factors = as_array(get(v, "factors")?, "subgroup factors")?
        .iter()
        .map(|fac| {
            let weights = as_array(get(fac, "weights")?, "weights")?
                .iter()
                .map(|w| as_bigint(w, "weight"))
                .collect::<Result<Vec<_>>>()?;
            match get(fac, "basis")? {
                Value::String(s) if s == "standard" => Ok(SubgroupFactor::standard(weights)),
                b => SubgroupFactor::with_basis(matrix_from_json(f, b)?, weights),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    OneParamSubgroup::new(f, factors)
}

pub fn cim_to_json(d: &CimDecomposition) -> Value {
    json!({
        "h1": series_matrix_to_json(&d.h1),
        "weights": d.weights,
        "h2": series_matrix_to_json(&d.h2),
        "precision": d.precision,
    })
}

pub fn cim_from_json(f: &Field, v: &Value) -> Result<CimDecomposition> {
    Ok(CimDecomposition {
        h1: series_matrix_from_json(f, get(v, "h1")?)?,
        weights: as_array(get(v, "weights")?, "weights")?
            .iter()
            .map(|w| as_i64(w, "weight"))
            .collect::<Result<_>>()?,
        h2: series_matrix_from_json(f, get(v, "h2")?)?,
        precision: as_i64(get(v, "precision")?, "precision")?,
    })
}

/// Group-element input: a bare matrix, `{"matrix": m}`, or `{"g": [m, ...]}`.
pub fn group_elements_from_json(f: &Field, v: &Value) -> Result<Vec<SeriesMatrix>> {
    if v.is_array() {
        return Ok(vec![series_matrix_from_json(f, v)?]);
    }
    if let Some(m) = v.get("matrix") {
        return Ok(vec![series_matrix_from_json(f, m)?]);
    }
    let list = v.get("g").or_else(|| v.get("factors")).ok_or_else(|| bad("group element file"))?;
    as_array(list, "group element list")?
        .iter()
        .map(|m| series_matrix_from_json(f, m))
        .collect()
}

/// A curve `{"g": [...], "actions": ["sym3", "standard", ...]}`; actions default to standard.
pub fn curve_from_json(f: &Field, v: &Value) -> Result<GroupCurve> {
    let factors = group_elements_from_json(f, v)?;
    let reps = match v.get("actions") {
        None => vec![Representation::Standard; factors.len()],
        Some(a) => as_array(a, "actions")?
            .iter()
            .map(|x| Representation::from_name(x.as_str().ok_or_else(|| bad("action"))?))
            .collect::<Result<Vec<_>>>()?,
    };
    if reps.len() != factors.len() {
        return Err(Error::Parse(format!("{} actions for {} group factors", reps.len(), factors.len())));
    }
    Ok(GroupCurve { factors, reps })
}

pub fn curve_to_json(g: &GroupCurve) -> Value {
    json!({
        "g": g.factors.iter().map(series_matrix_to_json).collect::<Vec<_>>(),
        "actions": g.reps.iter().map(|r| r.name()).collect::<Vec<_>>(),
    })
}

pub fn instance_to_json(f: &Field, g: &GroupCurve, p: &Tensor) -> Value {
    let mut doc = curve_to_json(g);
    doc["field"] = field_to_json(f);
    doc["p"] = tensor_to_json(p);
    doc
}

pub fn witness_to_json(field: &Field, precision: i64, g: &GroupCurve, p: &Tensor, w: &HmWitness) -> Value {
    json!({
        "kind": "witness",
        "version": TOOL_VERSION,
        "field": field_to_json(field),
        "precision": precision,
        "input": curve_to_json(g),
        "p": tensor_to_json(p),
        "lambda": subgroup_to_json(&w.lambda),
        "q": tensor_to_json(&w.q),
        "qTilde": tensor_to_json(&w.q_tilde),
        "sharedLimit": tensor_to_json(&w.shared_limit),
        "limitAtZero": tensor_to_json(&w.shared_limit),
        "limitAtInfinity": tensor_to_json(&w.shared_limit),
        "translation": w.translation.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "cim": w.cim.iter().map(cim_to_json).collect::<Vec<_>>(),
    })
}

pub fn witness_from_json(v: &Value) -> Result<(Field, GroupCurve, Tensor, HmWitness)> {
    let field = document_field(v, None)?;
    let g = curve_from_json(&field, get(v, "input")?)?;
    let p = tensor_from_json(&field, get(v, "p")?)?;
    let w = HmWitness {
        lambda: subgroup_from_json(&field, get(v, "lambda")?)?,
        reps: g.reps.clone(),
        q: tensor_from_json(&field, get(v, "q")?)?,
        q_tilde: tensor_from_json(&field, get(v, "qTilde")?)?,
        shared_limit: tensor_from_json(&field, get(v, "sharedLimit")?)?,
        translation: as_array(get(v, "translation")?, "translation")?
            .iter()
            .map(|m| matrix_from_json(&field, m))
            .collect::<Result<_>>()?,
        cim: as_array(get(v, "cim")?, "cim")?
            .iter()
            .map(|d| cim_from_json(&field, d))
            .collect::<Result<_>>()?,
    };
    for key in ["limitAtZero", "limitAtInfinity"] {
        if let Some(t) = v.get(key) {
            if tensor_from_json(&field, t)? != w.shared_limit {
                return Err(Error::Parse(format!("{key} differs from sharedLimit")));
            }
        }
    }
    Ok((field, g, p, w))
}

fn interval(v: &Value, what: &str) -> Result<(usize, usize)> {
    match as_array(v, what)?.as_slice() {
        [a, b] => Ok((as_usize(a, what)?, as_usize(b, what)?)),
        _ => Err(bad(what)),
    }
}

pub fn placement_to_json(p: &Placement) -> Value {
    json!({
        "parity": p.parity.name(),
        "layer": p.layer,
        "rows": [p.rows.0, p.rows.1],
        "cols": [p.cols.0, p.cols.1],
    })
}

pub fn placement_from_json(v: &Value) -> Result<Placement> {
    let parity = match get(v, "parity")?.as_str() {
        Some("even") => Parity::Even,
        Some("odd") => Parity::Odd,
        _ => return Err(bad("placement parity")),
    };
    let p = Placement {
        parity,
        layer: as_usize(get(v, "layer")?, "placement layer")?,
        rows: interval(get(v, "rows")?, "placement rows")?,
        cols: interval(get(v, "cols")?, "placement cols")?,
    };
    if p.rows.1 < p.rows.0 || p.rows.1 - p.rows.0 != p.cols.1.wrapping_sub(p.cols.0) {
        return Err(bad("placement intervals"));
    }
    Ok(p)
}

pub fn certificate_to_json(c: &DegenerationCertificate) -> Value {
    let (prime, rank_field) = match c.rank_field {
        RankField::Prime(p) => (Value::String(p.to_string()), format!("F_{p}")),
        RankField::Exact => (
            c.field.modulus().map_or(Value::Null, |p| Value::String(p.to_string())),
            format!("{}", c.field),
        ),
    };
    json!({
        "kind": "degeneration",
        "version": TOOL_VERSION,
        "field": field_to_json(&c.field),
        "n": c.n,
        "r": c.r,
        "profile": {
            "weights": c.profile.weights.iter()
                .map(|w| w.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        },
        "S": tensor_to_json(&c.s),
        "TTilde": tensor_to_json(&c.t_tilde),
        "placements": c.placements.iter().map(placement_to_json).collect::<Vec<_>>(),
        "blocks": if c.random_blocks { "random" } else { "identity" },
        "limitCheck": if c.limit_check { "Pass" } else { "Fail" },
        "unitRank": c.unit_rank,
        "jacobianRank": c.jacobian_rank,
        "pyramidSize": c.pyramid_size,
        "prime": prime,
        "rankField": rank_field,
        "verdict": c.verdict.name(),
    })
}

pub fn certificate_from_json(v: &Value) -> Result<DegenerationCertificate> {
    let field = document_field(v, None)?;
    let weights = as_array(get(get(v, "profile")?, "weights")?, "profile weights")?
        .iter()
        .map(|w| as_array(w, "profile weights")?.iter().map(|x| as_bigint(x, "weight")).collect())
        .collect::<Result<Vec<Vec<BigInt>>>>()?;
    let rank_field = match (get(v, "prime")?, &field) {
        (Value::Null, _) => RankField::Exact,
        (p, Field::Rationals) => RankField::Prime(as_bigint(p, "prime")?.try_into().map_err(|_| bad("prime"))?),
        (_, _) => RankField::Exact,
    };
    Ok(DegenerationCertificate {
        n: as_usize(get(v, "n")?, "n")?,
        r: as_usize(get(v, "r")?, "r")?,
        profile: WeightProfile::new(weights)?,
        s: tensor_from_json(&field, get(v, "S")?)?,
        t_tilde: tensor_from_json(&field, get(v, "TTilde")?)?,
        placements: as_array(get(v, "placements")?, "placements")?
            .iter()
            .map(placement_from_json)
            .collect::<Result<_>>()?,
        random_blocks: get(v, "blocks")?.as_str() == Some("random"),
        limit_check: match get(v, "limitCheck")?.as_str() {
            Some("Pass") => true,
            Some("Fail") => false,
            _ => return Err(bad("limitCheck")),
        },
        unit_rank: match get(v, "unitRank")? {
            Value::Null => None,
            x => Some(as_usize(x, "unitRank")?),
        },
        jacobian_rank: as_usize(get(v, "jacobianRank")?, "jacobianRank")?,
        pyramid_size: as_usize(get(v, "pyramidSize")?, "pyramidSize")?,
        rank_field,
        verdict: Verdict::from_name(get(v, "verdict")?.as_str().ok_or_else(|| bad("verdict"))?)?,
        field,
    })
}

pub fn cim_certificate_to_json(field: &Field, inputs: &[SeriesMatrix], decs: &[CimDecomposition], verdict: &str) -> Value {
    json!({
        "kind": "cim",
        "version": TOOL_VERSION,
        "field": field_to_json(field),
        "input": inputs.iter().map(series_matrix_to_json).collect::<Vec<_>>(),
        "decompositions": decs.iter().map(cim_to_json).collect::<Vec<_>>(),
        "verdict": verdict,
    })
}

pub fn cim_certificate_from_json(v: &Value) -> Result<(Field, Vec<SeriesMatrix>, Vec<CimDecomposition>)> {
    let field = document_field(v, None)?;
    let inputs = as_array(get(v, "input")?, "input")?
        .iter()
        .map(|m| series_matrix_from_json(&field, m))
        .collect::<Result<Vec<_>>>()?;
    let decs = as_array(get(v, "decompositions")?, "decompositions")?
        .iter()
        .map(|d| cim_from_json(&field, d))
        .collect::<Result<Vec<_>>>()?;
    Ok((field, inputs, decs))
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_round_trip() {
        let f = Field::Rationals;
        for text in ["t^-1 - 2*t + 3/2*t^2 + O(t^5)", "0", "O(t^3)", "t^7", "1 + t"] {
            let s = LaurentSeries::parse(&f, text).unwrap();
            let v = series_to_json(&s);
            assert_eq!(series_from_json(&f, &v).unwrap(), s, "{text}");
        }
        let exact_zero = series_to_json(&LaurentSeries::zero(&f));
        assert_eq!(exact_zero, json!({"val": 0, "coeffs": [], "trunc": 0, "exact": true}));
        assert_ne!(
            series_from_json(&f, &exact_zero).unwrap(),
            LaurentSeries::zero_to_precision(&f, 0)
        );
    }

    #[test]
    fn tensor_round_trip_uses_one_based_indices() {
        let f = Field::prime_u64(7).unwrap();
        let t = Tensor::from_entries(&f, &[2, 3], vec![(vec![1, 2], f.from_i64(-1))]).unwrap();
        let v = tensor_to_json(&t);
        assert_eq!(v, json!({"dims": [2, 3], "entries": [{"idx": [2, 3], "value": "6"}]}));
        assert_eq!(tensor_from_json(&f, &v).unwrap(), t);
        let zero_based = json!({"dims": [2, 2], "entries": [{"idx": [0, 1], "value": "1"}]});
        assert!(tensor_from_json(&f, &zero_based).is_err());
    }

    #[test]
    fn field_agreement() {
        let doc = json!({"field": {"kind": "Fp", "p": "7"}});
        assert!(document_field(&doc, Some(&Field::Rationals)).is_err());
        assert_eq!(document_field(&doc, None).unwrap(), Field::prime_u64(7).unwrap());
        assert!(field_from_json(&json!({"kind": "Fp", "p": "9"})).is_err());
    }

    #[test]
    fn subgroup_round_trip() {
        let f = Field::Rationals;
        let l = OneParamSubgroup::new(
            &f,
            vec![
                SubgroupFactor::with_basis(Matrix::from_i64(&f, &[&[1, 1], &[0, 1]]), vec![BigInt::from(-2), BigInt::from(5)]).unwrap(),
                SubgroupFactor::standard(vec![BigInt::from(1) << 100]),
            ],
        )
        .unwrap();
        assert_eq!(subgroup_from_json(&f, &subgroup_to_json(&l)).unwrap(), l);
    }
}
