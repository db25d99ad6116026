//! JSON encodings of elements, frames, matrices and tuples.
//!
//! An element is a list of blocks, a block is an `n_i x n_i` array of
//! `[re, im]` pairs. Frames are `{"signature", "d", "vectors"}`, matrices
//! `{"signature", "rows", "cols", "entries"}` with `entries` a list of rows,
//! tuples `{"signature", "rows", "cols", "matrices"}` with one entries array
//! per matrix. Shape errors carry the JSON path of the offending value.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::cstar::{AlgebraSignature, CStarElement};
use crate::error::{Error, Result};
use crate::frames::{build_frame, FrameSystem};
use crate::module::{ModuleMatrix, ModuleVector};
use crate::opscale::MatrixTuple;

fn err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: if path.is_empty() { "$".into() } else { path.into() },
        message: message.into(),
    }
}

pub fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| err(&format!("line {}, column {}", e.line(), e.column()), e.to_string()))
}

fn field<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    let map = obj.as_object().ok_or_else(|| err(path, "expected an object"))?;
    map.get(key).ok_or_else(|| err(path, format!("missing key \"{key}\"")))
}

fn array<'a>(v: &'a Value, path: &str, len: Option<usize>) -> Result<&'a [Value]> {
    let a = v.as_array().ok_or_else(|| err(path, "expected an array"))?;
    if let Some(n) = len {
        if a.len() != n {
            return Err(err(path, format!("expected {n} items, found {}", a.len())));
        }
    }
    Ok(a)
}

fn count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .filter(|&x| x > 0)
        .map(|x| x as usize)
        .ok_or_else(|| err(path, "expected a positive integer"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| err(path, "expected a number"))
}

pub fn parse_signature(v: &Value, path: &str) -> Result<AlgebraSignature> {
    let sizes = array(v, path, None)?
        .iter()
        .enumerate()
        .map(|(i, x)| count(x, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    AlgebraSignature::new(sizes).map_err(|e| err(path, e.to_string()))
}

pub fn parse_element(v: &Value, signature: &AlgebraSignature, path: &str) -> Result<CStarElement> {
    let blocks = array(v, path, Some(signature.num_blocks()))?;
    let mut out = Vec::with_capacity(blocks.len());
    for (i, (b, &ni)) in blocks.iter().zip(signature.sizes()).enumerate() {
        let bpath = format!("{path}[{i}]");
        let rows = array(b, &bpath, Some(ni))?;
        let mut m = DMatrix::zeros(ni, ni);
        for (r, row) in rows.iter().enumerate() {
            let rpath = format!("{bpath}[{r}]");
            for (c, z) in array(row, &rpath, Some(ni))?.iter().enumerate() {
                let zpath = format!("{rpath}[{c}]");
                let pair = array(z, &zpath, Some(2)).map_err(|_| err(&zpath, "expected a [re, im] pair"))?;
                m[(r, c)] = Complex64::new(number(&pair[0], &format!("{zpath}[0]"))?, number(&pair[1], &format!("{zpath}[1]"))?);
            }
        }
        out.push(m);
    }
    CStarElement::from_blocks(signature.clone(), out).map_err(|e| err(path, e.to_string()))
}

fn parse_row(v: &Value, signature: &AlgebraSignature, len: usize, path: &str) -> Result<Vec<CStarElement>> {
    array(v, path, Some(len))?
        .iter()
        .enumerate()
        .map(|(k, e)| parse_element(e, signature, &format!("{path}[{k}]")))
        .collect()
}

pub fn frame_from_value(v: &Value) -> Result<FrameSystem> {
    let sig = parse_signature(field(v, "signature", "")?, "$.signature")?;
    let d = count(field(v, "d", "")?, "$.d")?;
    let vectors = array(field(v, "vectors", "")?, "$.vectors", None)?;
    if vectors.is_empty() {
        return Err(err("$.vectors", "frame needs at least one vector"));
    }
    let parsed = vectors
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let path = format!("$.vectors[{j}]");
            ModuleVector::new(parse_row(x, &sig, d, &path)?).map_err(|e| err(&path, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    build_frame(parsed)
}

fn entries_from_value(v: &Value, sig: &AlgebraSignature, rows: usize, cols: usize, path: &str) -> Result<ModuleMatrix> {
    let mut flat = Vec::with_capacity(rows * cols);
    for (j, row) in array(v, path, Some(rows))?.iter().enumerate() {
        flat.extend(parse_row(row, sig, cols, &format!("{path}[{j}]"))?);
    }
    ModuleMatrix::from_entries(sig, rows, cols, &flat).map_err(|e| err(path, e.to_string()))
}

pub fn matrix_from_value(v: &Value) -> Result<ModuleMatrix> {
    let sig = parse_signature(field(v, "signature", "")?, "$.signature")?;
    let rows = count(field(v, "rows", "")?, "$.rows")?;
    let cols = count(field(v, "cols", "")?, "$.cols")?;
    entries_from_value(field(v, "entries", "")?, &sig, rows, cols, "$.entries")
}

pub fn tuple_from_value(v: &Value) -> Result<MatrixTuple> {
    let sig = parse_signature(field(v, "signature", "")?, "$.signature")?;
    let rows = count(field(v, "rows", "")?, "$.rows")?;
    let cols = count(field(v, "cols", "")?, "$.cols")?;
    let mats = array(field(v, "matrices", "")?, "$.matrices", None)?;
    if mats.is_empty() {
        return Err(err("$.matrices", "tuple needs at least one matrix"));
    }
    let parsed = mats
        .iter()
        .enumerate()
        .map(|(j, m)| entries_from_value(m, &sig, rows, cols, &format!("$.matrices[{j}]")))
        .collect::<Result<Vec<_>>>()?;
    MatrixTuple::new(parsed)
}

pub fn parse_frame(text: &str) -> Result<FrameSystem> {
    frame_from_value(&parse_value(text)?)
}

pub fn parse_matrix(text: &str) -> Result<ModuleMatrix> {
    matrix_from_value(&parse_value(text)?)
}

pub fn parse_tuple(text: &str) -> Result<MatrixTuple> {
    tuple_from_value(&parse_value(text)?)
}

pub fn element_to_value(e: &CStarElement) -> Value {
    Value::Array(
        e.blocks()
            .iter()
            .map(|b| {
                Value::Array(
                    (0..b.nrows())
                        .map(|r| Value::Array((0..b.ncols()).map(|c| json!([b[(r, c)].re, b[(r, c)].im])).collect()))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn row_to_value(entries: &[CStarElement]) -> Value {
    Value::Array(entries.iter().map(element_to_value).collect())
}

fn entries_to_value(m: &ModuleMatrix) -> Value {
    Value::Array((0..m.rows()).map(|j| row_to_value(m.row(j).entries())).collect())
}

pub fn frame_to_value(f: &FrameSystem) -> Value {
    json!({
        "signature": f.signature().sizes(),
        "d": f.d(),
        "vectors": f.vectors().iter().map(|v| row_to_value(v.entries())).collect::<Vec<_>>(),
    })
}

pub fn matrix_to_value(m: &ModuleMatrix) -> Value {
    json!({
        "signature": m.signature().sizes(),
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": entries_to_value(m),
    })
}

pub fn tuple_to_value(t: &MatrixTuple) -> Value {
    json!({
        "signature": t.signature().sizes(),
        "rows": t.m(),
        "cols": t.n(),
        "matrices": t.matrices().iter().map(entries_to_value).collect::<Vec<_>>(),
    })
}

pub fn read_to_string(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::tests::mercedes_benz;

    #[test]
    fn frame_round_trip() {
        let f = mercedes_benz();
        let text = frame_to_value(&f).to_string();
        assert_eq!(parse_frame(&text).unwrap(), f);
    }

    #[test]
    fn matrix_and_tuple_round_trip() {
        let sig = AlgebraSignature::new(vec![2, 1]).unwrap();
        let m = ModuleMatrix::identity(&sig, 2).scale(0.5);
        assert_eq!(parse_matrix(&matrix_to_value(&m).to_string()).unwrap(), m);
        let t = MatrixTuple::new(vec![m.clone(), m.scale(2.0)]).unwrap();
        assert_eq!(parse_tuple(&tuple_to_value(&t).to_string()).unwrap(), t);
    }

    #[test]
    fn positioned_errors() {
        let e = parse_frame("{\"signature\": [1], \"d\": 2,\n \"vectors\": [[[[[[1, 0]]]], [[[[0]]]]]]}").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                path: "$.vectors[0][1][0][0][0]".into(),
                message: "expected a [re, im] pair".into()
            }
        );
        let e = parse_frame("{\"signature\": [1], \"d\": 2, \"vectors\": [[[[[1, 0]]]]]}").unwrap_err();
        assert!(matches!(e, Error::Parse { ref path, .. } if path == "$.vectors[0]"));
        let e = parse_frame("{\"signature\": [0], \"d\": 2, \"vectors\": []}").unwrap_err();
        assert!(matches!(e, Error::Parse { ref path, .. } if path == "$.signature[0]"));
        let e = parse_frame("{\"signature\": [1],\n \"d\": }").unwrap_err();
        assert!(matches!(e, Error::Parse { ref path, .. } if path.starts_with("line 2")));
        let e = parse_matrix("{\"signature\": [1], \"rows\": 1, \"cols\": 1}").unwrap_err();
        assert!(matches!(e, Error::Parse { ref message, .. } if message.contains("entries")));
    }
}
