//! Binary field dumps.
//!
//! Layout: an 8-byte little-endian `u64` header length `L`, then `L` bytes
//! of UTF-8 JSON header, then `N²` little-endian `f64` node values in flat
//! index order.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TodaError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheHeader {
    #[serde(rename = "N")]
    pub n: usize,
    /// Source location for Green's functions, absent for plain fields.
    pub p: Option<[f64; 2]>,
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub boundary_constant: f64,
}

pub fn write_field<W: Write>(mut w: W, header: &CacheHeader, values: &[f64]) -> Result<()> {
    if values.len() != header.n * header.n {
        return Err(TodaError::Cache(format!(
            "{} values do not match N = {}",
            values.len(),
            header.n
        )));
    }
    let json = serde_json::to_vec(header).map_err(|e| TodaError::Cache(e.to_string()))?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<(CacheHeader, Vec<f64>)> {
    let mut len = [0u8; 8];
    r.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len);
    if len > 1 << 20 {
        return Err(TodaError::Cache(format!("implausible header length {len}")));
    }
    let mut json = vec![0u8; len as usize];
    r.read_exact(&mut json)?;
    let header: CacheHeader =
        serde_json::from_slice(&json).map_err(|e| TodaError::Cache(e.to_string()))?;
    let count = header.n * header.n;
    let mut buf = vec![0u8; count * 8];
    r.read_exact(&mut buf)?;
    let values = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(TodaError::Cache("trailing bytes after field data".into()));
    }
    Ok((header, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn roundtrip(n in 1usize..6, seed in any::<u64>(), alpha in proptest::option::of(0.01f64..10.0)) {
            let values: Vec<f64> = (0..n * n).map(|k| (seed as f64 + k as f64).sin()).collect();
            let header = CacheHeader { n, p: Some([0.5, 0.25]), alpha, name: None, boundary_constant: 0.0 };
            let mut buf = Vec::new();
            write_field(&mut buf, &header, &values).unwrap();
            let (h2, v2) = read_field(buf.as_slice()).unwrap();
            prop_assert_eq!(h2, header);
            prop_assert_eq!(v2, values);
        }
    }

    #[test]
    fn byte_layout() {
        let header = CacheHeader { n: 1, p: None, alpha: None, name: None, boundary_constant: 0.0 };
        let mut buf = Vec::new();
        write_field(&mut buf, &header, &[1.5]).unwrap();
        let len = u64::from_le_bytes(buf[..8].try_into().unwrap()) as usize;
        let json: serde_json::Value = serde_json::from_slice(&buf[8..8 + len]).unwrap();
        assert_eq!(json["N"], 1);
        assert!(json["p"].is_null());
        assert_eq!(&buf[8 + len..], &1.5f64.to_le_bytes());
    }

    #[test]
    fn truncated_rejected() {
        let header = CacheHeader { n: 2, p: None, alpha: None, name: None, boundary_constant: 0.0 };
        let mut buf = Vec::new();
        write_field(&mut buf, &header, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_field(buf.as_slice()).is_err());
    }
}
