//! Matrix files: JSON objects with `rows`, `cols`, `re`, `im` (row-major,
//! flat or nested by rows) and an optional exact `rational` payload of
//! `[numerator, denominator]` pairs.

use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::groups::{Mat, CQ};
use crate::linalg::{c, CMat};

/// A loaded matrix; `exact` is present when the file carries rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixData {
    pub float: CMat,
    pub exact: Option<Mat<CQ>>,
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Flatten `[a, b, …]` or `[[a, b], [c, d]]` (rows) into a row-major list.
fn flatten<'a>(v: &'a Value, rows: usize, cols: usize, what: &str) -> Result<Vec<&'a Value>> {
    let arr = v.as_array().ok_or_else(|| perr(format!("{what} must be an array")))?;
    let nested = arr.len() == rows && arr.iter().all(|r| r.is_array());
    let out: Vec<&Value> = if nested {
        let mut out = Vec::with_capacity(rows * cols);
        for r in arr {
            let row = r.as_array().unwrap();
            if row.len() != cols {
                return Err(perr(format!("{what}: row of length {} but cols = {cols}", row.len())));
            }
            out.extend(row.iter());
        }
        out
    } else {
        arr.iter().collect()
    };
    if out.len() != rows * cols {
        return Err(perr(format!("{what}: {} entries for a {rows}x{cols} matrix", out.len())));
    }
    Ok(out)
}

fn number(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| perr(format!("{what}: expected a number, got {v}")))
}

fn big(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| perr(format!("rational entries must be integers, got {n}"))),
        Value::String(s) => s.parse().map_err(|_| perr(format!("bad integer {s:?}"))),
        _ => Err(perr(format!("bad integer {v}"))),
    }
}

fn rational_list(v: &Value, rows: usize, cols: usize, what: &str) -> Result<Vec<BigRational>> {
    let arr = v.as_array().ok_or_else(|| perr(format!("{what} must be an array")))?;
    let pairs: Vec<&Value> = if arr.len() == rows && arr.iter().all(|r| r.as_array().is_some_and(|x| x.iter().all(Value::is_array))) {
        arr.iter().flat_map(|r| r.as_array().unwrap().iter()).collect()
    } else {
        arr.iter().collect()
    };
    if pairs.len() != rows * cols {
        return Err(perr(format!("{what}: {} entries for a {rows}x{cols} matrix", pairs.len())));
    }
    pairs
        .into_iter()
        .map(|p| {
            let pr = p.as_array().filter(|x| x.len() == 2).ok_or_else(|| perr(format!("{what}: expected [num, den] pairs")))?;
            let den = big(&pr[1])?;
            if den.is_zero() {
                return Err(perr(format!("{what}: zero denominator")));
            }
            Ok(BigRational::new(big(&pr[0])?, den))
        })
        .collect()
}

pub fn parse_matrix(text: &str) -> Result<MatrixData> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr(format!("invalid JSON: {e}")))?;
    matrix_from_value(&v)
}

pub fn matrix_from_value(v: &Value) -> Result<MatrixData> {
    let dim = |k: &str| -> Result<usize> {
        v.get(k)
            .and_then(Value::as_u64)
            .map(|x| x as usize)
            .ok_or_else(|| perr(format!("missing or invalid `{k}`")))
    };
    let (rows, cols) = (dim("rows")?, dim("cols")?);
    let exact = match v.get("rational") {
        None | Some(Value::Null) => None,
        Some(r) => {
            let (re, im) = if let Some(obj) = r.as_object() {
                let re = rational_list(obj.get("re").ok_or_else(|| perr("rational.re missing"))?, rows, cols, "rational.re")?;
                let im = match obj.get("im") {
                    Some(x) => rational_list(x, rows, cols, "rational.im")?,
                    None => vec![BigRational::zero(); rows * cols],
                };
                (re, im)
            } else {
                (rational_list(r, rows, cols, "rational")?, vec![BigRational::zero(); rows * cols])
            };
            let data: Vec<CQ> = re.into_iter().zip(im).map(|(a, b)| Complex::new(a, b)).collect();
            Some(Mat::from_row_major(rows, cols, data))
        }
    };
    let float = match (v.get("re"), &exact) {
        (Some(re), _) => {
            let re = flatten(re, rows, cols, "re")?;
            let im = match v.get("im") {
                Some(im) => flatten(im, rows, cols, "im")?.into_iter().map(|x| number(x, "im")).collect::<Result<Vec<_>>>()?,
                None => vec![0.0; rows * cols],
            };
            let re = re.into_iter().map(|x| number(x, "re")).collect::<Result<Vec<_>>>()?;
            CMat::from_fn(rows, cols, |i, j| c(re[i * cols + j], im[i * cols + j]))
        }
        (None, Some(e)) => CMat::from_fn(rows, cols, |i, j| {
            let z = e.get(i, j);
            c(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
        }),
        (None, None) => return Err(perr("need `re` (and `im`) or `rational`")),
    };
    if let Some(e) = &exact {
        let diff = crate::linalg::max_abs_diff(&e.to_cmat(), &float);
        if diff > 1e-12 * (1.0 + crate::linalg::max_abs(&float)) {
            return Err(perr(format!("rational payload disagrees with re/im by {diff:.3e}")));
        }
    }
    Ok(MatrixData { float, exact })
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<MatrixData> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| perr(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

/// Row-major JSON form of a matrix, with the exact payload when given.
pub fn matrix_value(m: &CMat, exact: Option<&Mat<CQ>>) -> Value {
    let mut v = crate::linalg::matrix_json(m);
    if let Some(e) = exact {
        let pair = |q: &BigRational| json!([q.numer().to_string(), q.denom().to_string()]);
        let (r, cc) = (e.rows(), e.cols());
        let re: Vec<Value> = (0..r * cc).map(|k| pair(&e.get(k / cc, k % cc).re)).collect();
        let im: Vec<Value> = (0..r * cc).map(|k| pair(&e.get(k / cc, k % cc).im)).collect();
        v["rational"] = json!({"re": re, "im": im});
    }
    v
}

pub fn save_matrix(path: impl AsRef<Path>, m: &CMat, exact: Option<&Mat<CQ>>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&matrix_value(m, exact)).expect("matrix JSON");
    std::fs::write(path, text).map_err(|e| perr(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::cq;

    #[test]
    fn nested_scalar() {
        let m = parse_matrix(r#"{"rows": 1, "cols": 1, "re": [[2]], "im": [[0]]}"#).unwrap();
        assert_eq!(m.float, CMat::from_element(1, 1, c(2.0, 0.0)));
        assert!(m.exact.is_none());
    }

    #[test]
    fn flat_two_by_two() {
        let m = parse_matrix(r#"{"rows": 2, "cols": 2, "re": [1, 2, 3, 4], "im": [0, 0, 1, 0]}"#).unwrap();
        assert_eq!(m.float[(0, 1)], c(2.0, 0.0));
        assert_eq!(m.float[(1, 0)], c(3.0, 1.0));
        let n = parse_matrix(r#"{"rows": 1, "cols": 2, "re": [[1, 2]], "im": [[0, 0]]}"#).unwrap();
        assert_eq!(n.float[(0, 1)], c(2.0, 0.0));
    }

    #[test]
    fn rational_kept_exactly() {
        let m = parse_matrix(r#"{"rows": 1, "cols": 1, "rational": [[1, 3]]}"#).unwrap();
        assert_eq!(m.exact.unwrap().get(0, 0), &cq(1, 3));
        assert!((m.float[(0, 0)].re - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(parse_matrix(r#"{"rows": 1, "cols": 2, "re": [[1, 2]], "im": [[0]]}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix(r#"{"rows": 2, "cols": 2, "re": [1, 2, 3]}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix("not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn round_trip() {
        let e = Mat::from_row_major(1, 2, vec![cq(-2, 7), cq(5, 1)]);
        let v = matrix_value(&e.to_cmat(), Some(&e));
        let back = matrix_from_value(&v).unwrap();
        assert_eq!(back.exact.unwrap(), e);
    }
}
