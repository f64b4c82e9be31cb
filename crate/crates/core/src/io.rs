//! JSON documents for algebras and modules.
//!
//! Matrix entries are `[from, to, num]` or `[from, to, num, den]`: the entry in
//! row `to`, column `from`. Algebra elements are lists of `[tpow, basis, num, den?]`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::{validate_algebra, AlgebraData, AlgebraElement, AlgebraError, DeformedAlgebra};
use crate::field::{Field, FieldKind};
use crate::graded::{GradedSpace, Grading};
use crate::linalg::Matrix;
use crate::module::{validate_module, CdgModule, ModuleData, ModuleError, Morphism};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("parse error at `{path}`: {message}")]
    Field { path: String, message: String },
    #[error("invalid algebra: {0}")]
    Algebra(#[from] AlgebraError),
    #[error("invalid module: {0}")]
    Module(#[from] ModuleError),
    #[error("cannot read {0}: {1}")]
    Read(String, String),
}

fn bad(path: &str, message: impl Into<String>) -> IoError {
    IoError::Field { path: path.to_string(), message: message.into() }
}

pub fn parse_json(text: &str) -> Result<Value, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Syntax { line: e.line(), column: e.column(), message: e.to_string() })
}

/// Canonical rendering: sorted keys, two-space indentation, trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialise");
    s.push('\n');
    s
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, IoError> {
    obj.get(key).ok_or_else(|| bad(path, format!("missing field `{key}`")))
}

fn as_obj<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object().ok_or_else(|| bad(path, "expected an object"))
}

fn as_arr<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize, IoError> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(path, "expected a non-negative integer"))
}

fn as_i64(v: &Value, path: &str) -> Result<i64, IoError> {
    v.as_i64().ok_or_else(|| bad(path, "expected an integer"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, IoError> {
    v.as_str().ok_or_else(|| bad(path, "expected a string"))
}

fn as_bigint(v: &Value, path: &str) -> Result<BigInt, IoError> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| bad(path, "expected an integer")),
        Value::String(s) => s.parse().map_err(|_| bad(path, "expected an integer string")),
        _ => Err(bad(path, "expected an integer")),
    }
}

fn bigint_value(b: &BigInt) -> Value {
    match b.to_i64() {
        Some(x) => json!(x),
        None => json!(b.to_string()),
    }
}

fn coeff<K: Field>(k: &K, items: &[Value], at: usize, path: &str) -> Result<K::Elem, IoError> {
    let num = as_bigint(items.get(at).ok_or_else(|| bad(path, "missing numerator"))?, path)?;
    let den = match items.get(at + 1) {
        Some(d) => as_bigint(d, path)?,
        None => BigInt::one(),
    };
    if items.len() > at + 2 {
        return Err(bad(path, "too many components"));
    }
    k.from_ratio(&num, &den).map_err(|e| bad(path, e.to_string()))
}

fn coeff_values<K: Field>(k: &K, c: &K::Elem) -> Vec<Value> {
    let (num, den) = k.to_ratio(c);
    if den.is_one() {
        vec![bigint_value(&num)]
    } else {
        vec![bigint_value(&num), bigint_value(&den)]
    }
}

fn parse_matrix<K: Field>(k: K, v: &Value, n: usize, path: &str) -> Result<Matrix<K>, IoError> {
    parse_rect(k, v, n, n, path)
}

fn parse_rect<K: Field>(k: K, v: &Value, rows: usize, cols: usize, path: &str) -> Result<Matrix<K>, IoError> {
    let mut triples = Vec::new();
    for (e, item) in as_arr(v, path)?.iter().enumerate() {
        let p = format!("{path}[{e}]");
        let items = as_arr(item, &p)?;
        if items.len() < 3 {
            return Err(bad(&p, "expected [from, to, num, den?]"));
        }
        let from = as_usize(&items[0], &p)?;
        let to = as_usize(&items[1], &p)?;
        if from >= cols || to >= rows {
            return Err(bad(&p, format!("index out of range for a {rows}x{cols} matrix")));
        }
        triples.push((to, from, coeff(&k, items, 2, &p)?));
    }
    Ok(Matrix::from_triples(k, rows, cols, triples))
}

fn matrix_value<K: Field>(m: &Matrix<K>, space: &GradedSpace) -> Value {
    let k = m.field();
    let mut entries: Vec<(i64, usize, usize, Vec<Value>)> =
        m.triples().map(|(r, c, x)| (space.degree(c), c, r, coeff_values(&k, x))).collect();
    entries.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    Value::Array(
        entries
            .into_iter()
            .map(|(_, c, r, x)| {
                let mut v = vec![json!(c), json!(r)];
                v.extend(x);
                Value::Array(v)
            })
            .collect(),
    )
}

fn parse_element<K: Field>(k: K, v: &Value, nb: usize, path: &str) -> Result<AlgebraElement<K>, IoError> {
    let mut out = AlgebraElement::zero(k);
    for (e, item) in as_arr(v, path)?.iter().enumerate() {
        let p = format!("{path}[{e}]");
        let items = as_arr(item, &p)?;
        if items.len() < 3 {
            return Err(bad(&p, "expected [tpow, basis, num, den?]"));
        }
        let s = as_usize(&items[0], &p)?;
        let b = as_usize(&items[1], &p)?;
        if b >= nb {
            return Err(bad(&p, format!("basis index {b} out of range")));
        }
        out.add_term(s, b, &coeff(&k, items, 2, &p)?);
    }
    Ok(out)
}

fn element_value<K: Field>(k: &K, x: &AlgebraElement<K>) -> Value {
    Value::Array(
        x.terms()
            .map(|(s, c, b)| {
                let mut v = vec![json!(s), json!(b)];
                v.extend(coeff_values(k, c));
                Value::Array(v)
            })
            .collect(),
    )
}

fn parse_grading(v: &Value, path: &str) -> Result<Grading, IoError> {
    match as_str(v, path)? {
        "Z" => Ok(Grading::Integers),
        "Z/2" => Ok(Grading::Parity),
        other => Err(bad(path, format!("unknown grading `{other}`"))),
    }
}

fn grading_str(g: Grading) -> &'static str {
    match g {
        Grading::Integers => "Z",
        Grading::Parity => "Z/2",
    }
}

fn parse_basis(v: &Value, path: &str) -> Result<(Vec<String>, Vec<i64>), IoError> {
    let mut names = Vec::new();
    let mut degrees = Vec::new();
    for (e, item) in as_arr(v, path)?.iter().enumerate() {
        let p = format!("{path}[{e}]");
        let o = as_obj(item, &p)?;
        names.push(as_str(get(o, "name", &p)?, &format!("{p}.name"))?.to_string());
        degrees.push(as_i64(get(o, "degree", &p)?, &format!("{p}.degree"))?);
    }
    Ok((names, degrees))
}

fn basis_value(names: &[String], degrees: &[i64]) -> Value {
    Value::Array(names.iter().zip(degrees).map(|(n, d)| json!({"name": n, "degree": d})).collect())
}

/// The field named in a document.
pub fn document_field(v: &Value) -> Result<FieldKind, IoError> {
    let o = as_obj(v, "$")?;
    let o = match o.get("algebra") {
        Some(Value::Object(a)) => a,
        _ => o,
    };
    FieldKind::parse(as_str(get(o, "field", "$")?, "$.field")?).map_err(|e| bad("$.field", e.to_string()))
}

pub fn parse_algebra<K: Field>(k: K, v: &Value) -> Result<DeformedAlgebra<K>, IoError> {
    let o = as_obj(v, "$")?;
    let grading = parse_grading(get(o, "grading", "$")?, "$.grading")?;
    let order = as_usize(get(o, "order", "$")?, "$.order")?;
    let (names, degrees) = parse_basis(get(o, "basis", "$")?, "$.basis")?;
    let nb = names.len();
    let unit = as_usize(get(o, "unit", "$")?, "$.unit")?;
    if unit >= nb {
        return Err(bad("$.unit", "unit index out of range"));
    }
    let mut mult = vec![vec![AlgebraElement::zero(k); nb]; nb];
    let mut seen = vec![vec![false; nb]; nb];
    for (e, item) in as_arr(get(o, "mult", "$")?, "$.mult")?.iter().enumerate() {
        let p = format!("$.mult[{e}]");
        let mo = as_obj(item, &p)?;
        let l = as_usize(get(mo, "left", &p)?, &format!("{p}.left"))?;
        let r = as_usize(get(mo, "right", &p)?, &format!("{p}.right"))?;
        if l >= nb || r >= nb {
            return Err(bad(&p, "basis index out of range"));
        }
        if seen[l][r] {
            return Err(bad(&p, "duplicate product"));
        }
        seen[l][r] = true;
        mult[l][r] = parse_element(k, get(mo, "value", &p)?, nb, &format!("{p}.value"))?;
    }
    for b in 0..nb {
        if !seen[unit][b] {
            mult[unit][b] = AlgebraElement::monomial(k, 0, b);
        }
        if !seen[b][unit] {
            mult[b][unit] = AlgebraElement::monomial(k, 0, b);
        }
    }
    let mut diff = vec![AlgebraElement::zero(k); nb];
    for (e, item) in as_arr(get(o, "diff", "$")?, "$.diff")?.iter().enumerate() {
        let p = format!("$.diff[{e}]");
        let mo = as_obj(item, &p)?;
        let b = as_usize(get(mo, "of", &p)?, &format!("{p}.of"))?;
        if b >= nb {
            return Err(bad(&p, "basis index out of range"));
        }
        diff[b] = parse_element(k, get(mo, "value", &p)?, nb, &format!("{p}.value"))?;
    }
    let curvature = parse_element(k, get(o, "curvature", "$")?, nb, "$.curvature")?;
    Ok(validate_algebra(AlgebraData { field: k, grading, order, names, degrees, unit, mult, diff, curvature })?)
}

pub fn algebra_value<K: Field>(a: &DeformedAlgebra<K>) -> Value {
    let k = a.field();
    let d = a.data();
    let mut mult = Vec::new();
    for l in 0..a.dim() {
        for r in 0..a.dim() {
            if l == a.unit() || r == a.unit() || a.mult(l, r).is_zero() {
                continue;
            }
            mult.push(json!({"left": l, "right": r, "value": element_value(&k, a.mult(l, r))}));
        }
    }
    let diff: Vec<Value> = (0..a.dim())
        .filter(|b| !a.diff(*b).is_zero())
        .map(|b| json!({"of": b, "value": element_value(&k, a.diff(b))}))
        .collect();
    json!({
        "field": k.kind().descriptor(),
        "grading": grading_str(a.grading()),
        "order": a.order(),
        "basis": basis_value(&d.names, &d.degrees),
        "unit": a.unit(),
        "mult": mult,
        "diff": diff,
        "curvature": element_value(&k, a.curvature()),
    })
}

/// Parse a module; `algebra` is used when the document only names its algebra by path.
pub fn parse_module<K: Field>(k: K, v: &Value, algebra: Option<Arc<DeformedAlgebra<K>>>) -> Result<CdgModule<K>, IoError> {
    let o = as_obj(v, "$")?;
    let a = match o.get("algebra") {
        Some(av @ Value::Object(_)) => Arc::new(parse_algebra(k, av)?),
        _ => algebra.ok_or_else(|| bad("$.algebra", "no algebra given"))?,
    };
    let (names, degrees) = parse_basis(get(o, "basis", "$")?, "$.basis")?;
    let n = names.len();
    let space = GradedSpace::new(a.grading(), degrees);
    let t = parse_matrix(k, get(o, "t", "$")?, n, "$.t")?;
    let d = parse_matrix(k, get(o, "diff", "$")?, n, "$.diff")?;
    let mut action: Vec<Option<Matrix<K>>> = vec![None; a.dim()];
    if let Some(av) = o.get("action") {
        for (name, m) in as_obj(av, "$.action")? {
            let p = format!("$.action.{name}");
            let b = a.index_of(name).ok_or_else(|| bad(&p, "unknown basis element"))?;
            action[b] = Some(parse_matrix(k, m, n, &p)?);
        }
    }
    let action = action
        .into_iter()
        .enumerate()
        .map(|(b, m)| m.unwrap_or_else(|| if b == a.unit() { Matrix::identity(k, n) } else { Matrix::zero(k, n, n) }))
        .collect();
    Ok(validate_module(ModuleData { names, space, t, d, action }, a)?)
}

pub fn module_value<K: Field>(m: &CdgModule<K>) -> Value {
    let a = m.algebra();
    let sp = m.space();
    let mut action = Map::new();
    for b in 0..a.dim() {
        if b != a.unit() {
            action.insert(a.name(b).to_string(), matrix_value(m.action(b), sp));
        }
    }
    json!({
        "algebra": algebra_value(a),
        "basis": basis_value(m.names(), sp.degrees()),
        "t": matrix_value(m.t(), sp),
        "diff": matrix_value(m.d(), sp),
        "action": Value::Object(action),
    })
}

pub fn dims_value(d: &BTreeMap<i64, usize>) -> Value {
    Value::Object(d.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

pub fn read_file(path: &str) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Read(path.to_string(), e.to_string()))
}

/// Parse an algebra file or a module file's embedded algebra.
pub fn load_algebra<K: Field>(k: K, path: &str) -> Result<DeformedAlgebra<K>, IoError> {
    let v = parse_json(&read_file(path)?)?;
    match v.get("algebra") {
        Some(av @ Value::Object(_)) => parse_algebra(k, av),
        _ => parse_algebra(k, &v),
    }
}

/// Parse a module file; a string `algebra` field is a path relative to the module file.
pub fn load_module<K: Field>(k: K, path: &str, algebra: Option<Arc<DeformedAlgebra<K>>>) -> Result<CdgModule<K>, IoError> {
    let v = parse_json(&read_file(path)?)?;
    let algebra = match (algebra, v.get("algebra")) {
        (Some(a), _) => Some(a),
        (None, Some(Value::String(rel))) => {
            let base = std::path::Path::new(path).parent().unwrap_or(std::path::Path::new("."));
            let p = base.join(rel);
            Some(Arc::new(load_algebra(k, &p.to_string_lossy())?))
        }
        _ => None,
    };
    parse_module(k, &v, algebra)
}

fn load_side<K: Field>(k: K, v: &Value, key: &str, base: &std::path::Path) -> Result<CdgModule<K>, IoError> {
    let p = format!("$.{key}");
    match v.get(key) {
        Some(Value::String(rel)) => load_module(k, &base.join(rel).to_string_lossy(), None),
        Some(m @ Value::Object(_)) => parse_module(k, m, None),
        _ => Err(bad(&p, "expected a module path or object")),
    }
}

/// Morphism document `{source, target, degree?, matrix}`; modules inline or by relative path.
pub fn load_morphism<K: Field>(k: K, path: &str) -> Result<Morphism<K>, IoError> {
    let v = parse_json(&read_file(path)?)?;
    let base = std::path::Path::new(path).parent().unwrap_or(std::path::Path::new("."));
    let source = load_side(k, &v, "source", base)?;
    let target = load_side(k, &v, "target", base)?;
    let target = if target.algebra() == source.algebra() {
        target
    } else if **target.algebra() == **source.algebra() {
        validate_module(target.data().clone(), source.algebra().clone())?
    } else {
        return Err(IoError::Module(ModuleError::AlgebraMismatch));
    };
    let degree = match v.get("degree") {
        Some(d) => as_i64(d, "$.degree")?,
        None => 0,
    };
    let o = as_obj(&v, "$")?;
    let matrix = parse_rect(k, get(o, "matrix", "$")?, target.dim(), source.dim(), "$.matrix")?;
    Ok(Morphism::new(source, target, degree, matrix)?)
}

pub fn morphism_value<K: Field>(f: &Morphism<K>) -> Value {
    json!({
        "source": module_value(&f.source),
        "target": module_value(&f.target),
        "degree": f.degree,
        "matrix": matrix_value(&f.matrix, f.source.space()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::graded_field_model;
    use crate::field::{PrimeField, Rationals};
    use crate::generators::gamma;

    #[test]
    fn algebra_round_trip() {
        let a = graded_field_model(Rationals);
        let v = algebra_value(&a);
        let b = parse_algebra(Rationals, &v).unwrap();
        assert_eq!(a, b);
        assert_eq!(render(&algebra_value(&b)), render(&v));
        assert_eq!(document_field(&v).unwrap(), FieldKind::Rationals);
    }

    #[test]
    fn module_round_trip() {
        let k = PrimeField::default();
        let a = Arc::new(graded_field_model(k));
        let g = gamma(&a, 1).unwrap();
        let s = render(&module_value(&g));
        let back = parse_module(k, &parse_json(&s).unwrap(), None).unwrap();
        assert_eq!(render(&module_value(&back)), s);
        assert_eq!(back.data(), g.data());
    }

    #[test]
    fn diagnostics() {
        let k = PrimeField::default();
        assert!(matches!(parse_json("{\"a\": }"), Err(IoError::Syntax { line: 1, .. })));
        let a = Arc::new(graded_field_model(k));
        let mut v = module_value(&gamma(&a, 1).unwrap());
        v["t"] = json!([[0, 9, 1]]);
        match parse_module(k, &v, None) {
            Err(IoError::Field { path, .. }) => assert_eq!(path, "$.t[0]"),
            other => panic!("{other:?}"),
        }
        // t = identity is not nilpotent
        v["t"] = json!([[0, 0, 1], [1, 1, 1], [2, 2, 1]]);
        assert!(matches!(parse_module(k, &v, None), Err(IoError::Module(ModuleError::TNotNilpotent(_)))));
    }

    #[test]
    fn fractions() {
        let v = json!([[0, 0, 3, 4], [0, 0, "123456789012345678901234567890"]]);
        let m = parse_matrix(Rationals, &v, 1, "$").unwrap();
        let sp = GradedSpace::new(Grading::Integers, vec![0]);
        let back = matrix_value(&m, &sp);
        assert_eq!(back[0][3], json!(4));
        assert!(back[0][2].is_string());
    }
}
