//! Text and JSON front-end formats: matrices as `{"matrix": [[...]]}`
//! (entries as numbers or decimal strings), polynomials as coefficient
//! lists `[-1,-6,1]` or expressions like `t^2-6*t-1`, prime-set specs
//! (`all`, `none`, `{2,3}`, `all-{5}`), and elements `(i; x1,...,xd)`.

use crate::matrix::IntMatrix;
use crate::poly::IntPoly;
use crate::primes::PrimeSet;
use crate::torus::MTElement;
use crate::{Error, Result};
use num_bigint::BigInt;
use serde_json::Value;
use std::str::FromStr;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn value_to_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else {
                Err(parse_err(format!("entry {} is not an integer", n)))
            }
        }
        Value::String(s) => {
            BigInt::from_str(s.trim()).map_err(|_| parse_err(format!("bad integer string {:?}", s)))
        }
        other => Err(parse_err(format!("expected integer, got {}", other))),
    }
}

/// `{"matrix": [[...], ...]}`, square, entries as JSON numbers or
/// decimal strings (for values beyond i64).
pub fn parse_matrix_json(input: &str) -> Result<IntMatrix> {
    let root: Value =
        serde_json::from_str(input).map_err(|e| parse_err(format!("matrix JSON: {}", e)))?;
    let rows = root
        .get("matrix")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("missing \"matrix\" array"))?;
    let dim = rows.len();
    if dim == 0 {
        return Err(parse_err("matrix is empty"));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| parse_err("matrix rows must be arrays"))?;
        if row.len() != dim {
            return Err(parse_err(format!(
                "matrix is not square: {} rows but a row of length {}",
                dim,
                row.len()
            )));
        }
        for v in row {
            entries.push(value_to_bigint(v)?);
        }
    }
    Ok(IntMatrix::new(dim, entries))
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    let rows: Vec<Value> = m
        .rows()
        .iter()
        .map(|row| {
            Value::Array(
                row.iter()
                    .map(|v| {
                        // stay numeric when the entry fits
                        match i64::try_from(v.clone()) {
                            Ok(i) => Value::from(i),
                            Err(_) => Value::from(v.to_string()),
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    serde_json::json!({ "matrix": rows })
}

/// Coefficient-list form `[-1,-6,1]` (constant term first) or an
/// expression in t such as `t^2-6*t-1` or `2*t^3 + t - 5`.
pub fn parse_poly(input: &str) -> Result<IntPoly> {
    let s = input.trim();
    if s.starts_with('[') {
        let coeffs: Vec<Value> =
            serde_json::from_str(s).map_err(|e| parse_err(format!("coefficient list: {}", e)))?;
        let coeffs = coeffs
            .iter()
            .map(value_to_bigint)
            .collect::<Result<Vec<_>>>()?;
        return Ok(IntPoly::new(coeffs));
    }
    parse_poly_expr(s)
}

fn parse_poly_expr(s: &str) -> Result<IntPoly> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(parse_err("empty polynomial"));
    }
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut chars = compact.chars().peekable();
    if let Some(&c) = chars.peek() {
        if c == '+' || c == '-' {
            negative = c == '-';
            chars.next();
        }
    }
    for c in chars {
        if c == '+' || c == '-' {
            terms.push((negative, std::mem::take(&mut current)));
            negative = c == '-';
        } else {
            current.push(c);
        }
    }
    terms.push((negative, current));

    let mut result = IntPoly::zero();
    for (neg, term) in terms {
        let (coeff, exp) = parse_term(&term)?;
        let coeff = if neg { -coeff } else { coeff };
        result = result.add(&IntPoly::monomial(exp).scale(&coeff));
    }
    Ok(result)
}

fn parse_term(term: &str) -> Result<(BigInt, usize)> {
    if term.is_empty() {
        return Err(parse_err("empty term in polynomial"));
    }
    let (coeff_str, var_part) = match term.find('t') {
        None => (term, ""),
        Some(idx) => (&term[..idx], &term[idx..]),
    };
    let coeff_str = coeff_str.strip_suffix('*').unwrap_or(coeff_str);
    let coeff = if coeff_str.is_empty() {
        BigInt::from(1)
    } else {
        BigInt::from_str(coeff_str).map_err(|_| parse_err(format!("bad coefficient in {:?}", term)))?
    };
    let exp = match var_part {
        "" => 0,
        "t" => 1,
        _ => {
            let e = var_part
                .strip_prefix("t^")
                .ok_or_else(|| parse_err(format!("bad term {:?}", term)))?;
            e.parse::<usize>()
                .map_err(|_| parse_err(format!("bad exponent in {:?}", term)))?
        }
    };
    Ok((coeff, exp))
}

/// `all` | `none` | `{2,3}` | `all-{5}`.
pub fn parse_pi_spec(input: &str) -> Result<PrimeSet> {
    let s = input.trim();
    match s {
        "all" => return Ok(PrimeSet::All),
        "none" => return Ok(PrimeSet::Empty),
        _ => {}
    }
    let (cofinite, body) = match s.strip_prefix("all-") {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let body = body
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(|| {
            parse_err(format!(
                "bad prime set {:?}; expected all, none, {{2,3}} or all-{{5}}",
                s
            ))
        })?;
    let mut primes = Vec::new();
    for part in body.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let p: u64 = part
            .parse()
            .map_err(|_| parse_err(format!("bad prime {:?}", part)))?;
        if !crate::primes::is_prime_u64(p) {
            return Err(parse_err(format!("{} is not prime", p)));
        }
        primes.push(p);
    }
    Ok(if cofinite {
        PrimeSet::cofinite(primes)
    } else {
        PrimeSet::finite(primes)
    })
}

/// `(i; x1,...,xd)`.
pub fn parse_element(input: &str, d: usize) -> Result<MTElement> {
    let s = input.trim();
    let body = s
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| parse_err(format!("element {:?} must look like (i; x1,...,xd)", s)))?;
    let (i_part, x_part) = body
        .split_once(';')
        .ok_or_else(|| parse_err("element needs a ';' between i and the vector"))?;
    let i = BigInt::from_str(i_part.trim())
        .map_err(|_| parse_err(format!("bad Z-coordinate {:?}", i_part.trim())))?;
    let x = x_part
        .split(',')
        .map(|c| {
            BigInt::from_str(c.trim()).map_err(|_| parse_err(format!("bad coordinate {:?}", c.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    if x.len() != d {
        return Err(parse_err(format!(
            "element has {} coordinates, expected {}",
            x.len(),
            d
        )));
    }
    Ok(MTElement { i, x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip() {
        let m = parse_matrix_json(r#"{"matrix": [[0, 1], [1, 6]]}"#).unwrap();
        assert_eq!(m, IntMatrix::from_rows(&[vec![0, 1], vec![1, 6]]));
        let back = matrix_to_json(&m).to_string();
        assert_eq!(parse_matrix_json(&back).unwrap(), m);
    }

    #[test]
    fn matrix_accepts_string_entries() {
        let m = parse_matrix_json(r#"{"matrix": [["123456789012345678901", "0"], ["0", "1"]]}"#)
            .unwrap();
        assert_eq!(
            *m.get(0, 0),
            BigInt::from_str("123456789012345678901").unwrap()
        );
    }

    #[test]
    fn matrix_rejects_bad_input() {
        assert!(parse_matrix_json(r#"{"matrix": [[1, 2]]}"#).is_err());
        assert!(parse_matrix_json(r#"{"matrix": [[1.5]]}"#).is_err());
        assert!(parse_matrix_json(r#"{}"#).is_err());
    }

    #[test]
    fn poly_forms() {
        let p = IntPoly::from_i64(&[-1, -6, 1]);
        assert_eq!(parse_poly("[-1,-6,1]").unwrap(), p);
        assert_eq!(parse_poly("t^2-6*t-1").unwrap(), p);
        assert_eq!(parse_poly(" t^2 - 6*t - 1 ").unwrap(), p);
        assert_eq!(parse_poly("-1 - 6t + t^2").unwrap(), p);
        assert_eq!(parse_poly("t").unwrap(), IntPoly::from_i64(&[0, 1]));
        assert_eq!(parse_poly("7").unwrap(), IntPoly::from_i64(&[7]));
        // display round-trips
        assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn pi_specs() {
        assert_eq!(parse_pi_spec("all").unwrap(), PrimeSet::All);
        assert_eq!(parse_pi_spec("none").unwrap(), PrimeSet::Empty);
        assert_eq!(parse_pi_spec("{2,3}").unwrap(), PrimeSet::finite([2, 3]));
        assert_eq!(parse_pi_spec("all-{5}").unwrap(), PrimeSet::all_but(5));
        assert!(parse_pi_spec("{4}").is_err());
        assert!(parse_pi_spec("everything").is_err());
    }

    #[test]
    fn elements() {
        let g = parse_element("(2; 1, -3)", 2).unwrap();
        assert_eq!(g, MTElement::from_i64(2, &[1, -3]));
        // display round-trips
        assert_eq!(parse_element(&g.to_string(), 2).unwrap(), g);
        assert!(parse_element("(2; 1)", 2).is_err());
        assert!(parse_element("2; 1, 3", 2).is_err());
    }
}
