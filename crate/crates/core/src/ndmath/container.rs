//! Flat binary tensor container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   4 bytes  "RSQ1"
//! hlen    u32      header byte count (may be 0)
//! header  hlen bytes, UTF-8 key=value lines
//! record* repeated until EOF:
//!   nlen  u32      tensor name byte count
//!   name  nlen bytes, UTF-8
//!   rank  u8       1 (vector) or 2 (matrix)
//!   dims  rank x u64
//!   data  prod(dims) x f64, raw IEEE-754 bits
//! ```
//!
//! Round-trips are bit-exact: values are written and read as raw bit
//! patterns. Non-finite payloads are rejected on read.

use crate::error::{Error, Result};
use crate::ndmath::tensor::{Tensor1, Tensor2};
use std::io::{Read, Write};

const MAGIC: &[u8; 4] = b"RSQ1";

#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    Vector(Tensor1),
    Matrix(Tensor2),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorRecord {
    pub name: String,
    pub data: TensorData,
}

impl TensorRecord {
    pub fn vector(name: &str, t: Tensor1) -> Self {
        TensorRecord { name: name.to_string(), data: TensorData::Vector(t) }
    }

    pub fn matrix(name: &str, t: Tensor2) -> Self {
        TensorRecord { name: name.to_string(), data: TensorData::Matrix(t) }
    }
}

pub fn write_container<W: Write>(mut w: W, header: &str, records: &[TensorRecord]) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(header.as_bytes())?;
    for rec in records {
        w.write_all(&(rec.name.len() as u32).to_le_bytes())?;
        w.write_all(rec.name.as_bytes())?;
        match &rec.data {
            TensorData::Vector(t) => {
                w.write_all(&[1u8])?;
                w.write_all(&(t.len() as u64).to_le_bytes())?;
                for v in t.as_slice() {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
            TensorData::Matrix(t) => {
                w.write_all(&[2u8])?;
                w.write_all(&(t.rows() as u64).to_le_bytes())?;
                w.write_all(&(t.cols() as u64).to_le_bytes())?;
                for v in t.as_slice() {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        }
    }
    Ok(())
}

pub fn read_container<R: Read>(mut r: R) -> Result<(String, Vec<TensorRecord>)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| Error::Format("missing container magic".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format("bad container magic".into()));
    }
    let hlen = read_u32(&mut r)? as usize;
    let mut hbuf = vec![0u8; hlen];
    r.read_exact(&mut hbuf).map_err(|_| Error::Format("truncated header".into()))?;
    let header =
        String::from_utf8(hbuf).map_err(|_| Error::Format("header is not UTF-8".into()))?;

    let mut records = Vec::new();
    loop {
        let mut nbuf = [0u8; 4];
        match r.read(&mut nbuf)? {
            0 => break,
            4 => {}
            n => {
                // partial length prefix; try to complete it
                r.read_exact(&mut nbuf[n..])
                    .map_err(|_| Error::Format("truncated record header".into()))?;
            }
        }
        let nlen = u32::from_le_bytes(nbuf) as usize;
        let mut name_buf = vec![0u8; nlen];
        r.read_exact(&mut name_buf).map_err(|_| Error::Format("truncated tensor name".into()))?;
        let name = String::from_utf8(name_buf)
            .map_err(|_| Error::Format("tensor name is not UTF-8".into()))?;
        let mut rank = [0u8; 1];
        r.read_exact(&mut rank).map_err(|_| Error::Format("truncated rank".into()))?;
        let data = match rank[0] {
            1 => {
                let len = read_u64(&mut r)? as usize;
                TensorData::Vector(read_tensor1(&mut r, len, &name)?)
            }
            2 => {
                let rows = read_u64(&mut r)? as usize;
                let cols = read_u64(&mut r)? as usize;
                let flat = read_values(&mut r, rows.checked_mul(cols).ok_or_else(|| {
                    Error::Format(format!("tensor `{name}` dimensions overflow"))
                })?, &name)?;
                TensorData::Matrix(
                    Tensor2::from_vec(rows, cols, flat)
                        .map_err(|_| Error::Format(format!("tensor `{name}` has non-finite values")))?,
                )
            }
            k => return Err(Error::Format(format!("tensor `{name}` has unsupported rank {k}"))),
        };
        records.push(TensorRecord { name, data });
    }
    Ok((header, records))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|_| Error::Format("truncated u32 field".into()))?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| Error::Format("truncated u64 field".into()))?;
    Ok(u64::from_le_bytes(b))
}

fn read_values<R: Read>(r: &mut R, n: usize, name: &str) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    let mut b = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut b)
            .map_err(|_| Error::Format(format!("truncated data for tensor `{name}`")))?;
        out.push(f64::from_le_bytes(b));
    }
    Ok(out)
}

fn read_tensor1<R: Read>(r: &mut R, len: usize, name: &str) -> Result<Tensor1> {
    let flat = read_values(r, len, name)?;
    Tensor1::from_vec(flat)
        .map_err(|_| Error::Format(format!("tensor `{name}` has non-finite values")))
}
