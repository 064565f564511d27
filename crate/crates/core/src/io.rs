//! Parsing of command-line operands and file formats.
//!
//! Every operand may be given inline or as `@path`, in which case the file
//! contents are used.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Poly, C64};
use crate::potential::AtomicMeasure;

/// Inline text, or the contents of the file after `@`.
pub fn read_operand(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(path) => Ok(std::fs::read_to_string(path)?),
        None => Ok(s.to_string()),
    }
}

pub fn parse_json<T: DeserializeOwned>(s: &str) -> Result<T> {
    Ok(serde_json::from_str(&read_operand(s)?)?)
}

/// `[[re,im],…]` (ascending), a list of reals, or `{"coeffs": …}`.
pub fn parse_poly(s: &str) -> Result<Poly> {
    let text = read_operand(s)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let v = match v {
        serde_json::Value::Object(mut m) => m
            .remove("coeffs")
            .ok_or_else(|| Error::Invalid("polynomial object without \"coeffs\"".into()))?,
        other => other,
    };
    let items = v
        .as_array()
        .ok_or_else(|| Error::Invalid("polynomial must be a JSON array".into()))?;
    let coeffs = items
        .iter()
        .map(|c| complex_from_value(c).ok_or_else(|| Error::Invalid(format!("bad coefficient {c}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(coeffs))
}

fn complex_from_value(v: &serde_json::Value) -> Option<C64> {
    if let Some(x) = v.as_f64() {
        return Some(C64::new(x, 0.0));
    }
    let a = v.as_array()?;
    match a.as_slice() {
        [re, im] => Some(C64::new(re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}

/// `re`, `re,im` or `[re,im]`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let text = read_operand(s)?;
    let t = text.trim();
    if t.starts_with('[') {
        let v: serde_json::Value = serde_json::from_str(t)?;
        return complex_from_value(&v).ok_or_else(|| Error::Invalid(format!("bad complex number {t}")));
    }
    let parts: Vec<&str> = t.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| Error::Invalid(format!("bad complex number {t}")))
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(Error::Invalid(format!("bad complex number {t}"))),
    }
}

/// CSV rows `re,im,weight`, or JSON `{"atoms": [[[re,im],w],…]}`.
pub fn parse_measure(s: &str) -> Result<AtomicMeasure> {
    let text = read_operand(s)?;
    let t = text.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        let m: AtomicMeasure = if t.starts_with('{') {
            serde_json::from_str(t)?
        } else {
            AtomicMeasure::new(serde_json::from_str(t)?)
        };
        m.validate()?;
        Ok(m)
    } else {
        AtomicMeasure::read_csv(t.as_bytes())
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

/// Writes `text` to `path`, or to stdout without a path.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operands() {
        assert_eq!(parse_poly("[1, 0, 1]").unwrap(), Poly::from_real(&[1.0, 0.0, 1.0]));
        assert_eq!(
            parse_poly(r#"{"coeffs": [[1.0, 0.0], [0.0, -2.0]]}"#).unwrap(),
            Poly::new(vec![C64::new(1.0, 0.0), C64::new(0.0, -2.0)])
        );
        assert_eq!(parse_complex("0.5,-1").unwrap(), C64::new(0.5, -1.0));
        assert_eq!(parse_complex("[2,3]").unwrap(), C64::new(2.0, 3.0));
        let m = parse_measure("0,0,0.5\n1,0,0.5\n").unwrap();
        assert_eq!(m.len(), 2);
        let m = parse_measure(r#"[[[0.0,0.0],1.0]]"#).unwrap();
        assert_eq!(m.mass(), 1.0);
    }
}
