//! QPCS: binary dump of the compressed operator's triple list.
//!
//! Layout, all little-endian: a 32-byte header (magic "QPCS", version u32,
//! D u64, entry count u64, 8 reserved bytes), then one 32-byte record per
//! entry: u64 row, u64 col, f64 re, f64 im.

use crate::assembly::CompressedStiffness;
use crate::error::{QpError, Result};
use num_complex::Complex64;
use std::io::{Read, Write};

pub const MAGIC: &[u8; 4] = b"QPCS";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 32;
const RECORD_LEN: usize = 32;

/// Raw triples read back from a QPCS stream.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleDump {
    pub dim: u64,
    pub entries: Vec<(u64, u64, Complex64)>,
}

pub fn write_qpcs<W: Write>(q: &CompressedStiffness, mut out: W) -> Result<()> {
    let mut header = [0u8; HEADER_LEN];
    header[0..4].copy_from_slice(MAGIC);
    header[4..8].copy_from_slice(&VERSION.to_le_bytes());
    header[8..16].copy_from_slice(&(q.dim() as u64).to_le_bytes());
    header[16..24].copy_from_slice(&(q.nnz() as u64).to_le_bytes());
    out.write_all(&header)?;
    let mut record = [0u8; RECORD_LEN];
    for (row, col, v) in q.entries() {
        record[0..8].copy_from_slice(&(row as u64).to_le_bytes());
        record[8..16].copy_from_slice(&(col as u64).to_le_bytes());
        record[16..24].copy_from_slice(&v.re.to_le_bytes());
        record[24..32].copy_from_slice(&v.im.to_le_bytes());
        out.write_all(&record)?;
    }
    Ok(())
}

pub fn read_qpcs<R: Read>(mut input: R) -> Result<TripleDump> {
    let mut header = [0u8; HEADER_LEN];
    input
        .read_exact(&mut header)
        .map_err(|_| QpError::QpcsFormat("truncated header".into()))?;
    if &header[0..4] != MAGIC {
        return Err(QpError::QpcsFormat("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(QpError::QpcsFormat(format!("unsupported version {version}")));
    }
    let dim = u64::from_le_bytes(header[8..16].try_into().unwrap());
    let count = u64::from_le_bytes(header[16..24].try_into().unwrap());
    if count > dim.saturating_mul(dim) {
        return Err(QpError::QpcsFormat(format!(
            "entry count {count} exceeds {dim}^2"
        )));
    }
    // cap the upfront allocation; the loop grows as records actually arrive
    let mut entries = Vec::with_capacity(count.min(1 << 20) as usize);
    let mut record = [0u8; RECORD_LEN];
    for i in 0..count {
        input
            .read_exact(&mut record)
            .map_err(|_| QpError::QpcsFormat(format!("truncated at record {i} of {count}")))?;
        let row = u64::from_le_bytes(record[0..8].try_into().unwrap());
        let col = u64::from_le_bytes(record[8..16].try_into().unwrap());
        if row >= dim || col >= dim {
            return Err(QpError::QpcsFormat(format!(
                "record {i}: index ({row},{col}) out of range for D = {dim}"
            )));
        }
        let re = f64::from_le_bytes(record[16..24].try_into().unwrap());
        let im = f64::from_le_bytes(record[24..32].try_into().unwrap());
        if !re.is_finite() || !im.is_finite() {
            return Err(QpError::QpcsFormat(format!("record {i}: non-finite value")));
        }
        entries.push((row, col, Complex64::new(re, im)));
    }
    let mut tail = [0u8; 1];
    if input.read(&mut tail)? != 0 {
        return Err(QpError::QpcsFormat("trailing bytes after records".into()));
    }
    Ok(TripleDump { dim, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_compressed, DEFAULT_DROP_TOL};
    use crate::lattice::{ProjectionMatrix, SizeVector};
    use crate::qpfield::{SpectralField, TermList};

    fn sample_operator() -> CompressedStiffness {
        let tau = std::f64::consts::TAU;
        let p = ProjectionMatrix::new(vec![vec![tau, tau * 2f64.sqrt()]]).unwrap();
        let t = TermList::constant(p.clone(), Complex64::new(6.0, 0.0))
            .unwrap()
            .add(&TermList::cosine(p, vec![1, 0], 1.0).unwrap())
            .unwrap();
        let f =
            SpectralField::fold_terms(&t, &SizeVector::new(vec![4, 4]).unwrap()).unwrap();
        assemble_compressed(&f, DEFAULT_DROP_TOL).unwrap()
    }

    #[test]
    fn round_trip() {
        let q = sample_operator();
        let mut buf = Vec::new();
        write_qpcs(&q, &mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 32 * q.nnz());
        let dump = read_qpcs(buf.as_slice()).unwrap();
        assert_eq!(dump.dim, q.dim() as u64);
        assert_eq!(dump.entries.len(), q.nnz());
        for ((r1, c1, v1), (r2, c2, v2)) in q.entries().zip(dump.entries) {
            assert_eq!((r1 as u64, c1 as u64), (r2, c2));
            assert_eq!(Complex64::new(v1.re, v1.im), v2);
        }
    }

    #[test]
    fn rejects_malformed_streams() {
        let q = sample_operator();
        let mut buf = Vec::new();
        write_qpcs(&q, &mut buf).unwrap();

        let mut bad_magic = buf.clone();
        bad_magic[0] = b'X';
        assert!(read_qpcs(bad_magic.as_slice()).is_err());

        let mut bad_version = buf.clone();
        bad_version[4] = 9;
        assert!(read_qpcs(bad_version.as_slice()).is_err());

        let truncated = &buf[..buf.len() - 7];
        assert!(read_qpcs(truncated).is_err());

        let mut trailing = buf.clone();
        trailing.push(0);
        assert!(read_qpcs(trailing.as_slice()).is_err());

        let mut bad_index = buf.clone();
        // row of first record = D
        let d = q.dim() as u64;
        bad_index[32..40].copy_from_slice(&d.to_le_bytes());
        assert!(read_qpcs(bad_index.as_slice()).is_err());

        assert!(read_qpcs(&b"QP"[..]).is_err());
    }
}
