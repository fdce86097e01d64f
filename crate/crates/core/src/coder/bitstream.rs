//! Container format.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "RCMI"
//! 4       1     version (1)
//! 5       1     scheme id (0 model 0-sided, 1 model 1-sided, 2 RCC 0/2-sided, 3 empirical 1-sided)
//! 6       4     M, rows (u32 LE)
//! 10      4     W, columns (u32 LE)
//! 14      1     N_b (N_L for RCC)
//! 15      1     c, context size (N_S for RCC)
//! 16      8     theta, source parameter (f64 LE)
//! 24      8     theta*_0 (f64 LE)
//! 32      8     theta*_1 (f64 LE)
//! 40      8     theta*_2 (f64 LE)
//! 48            payload
//! ```
//!
//! Payload:
//!
//! ```text
//! 1       count T of extra parameters
//! 8*T     extra parameters (f64 LE), e.g. theta* of a short final block
//! 4       L, coded length in bytes (u32 LE)
//! L       range coder output
//! rest    optional embedded context table (see `schemes::empirical`)
//! ```

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"RCMI";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum SchemeId {
    Model0 = 0,
    Model1 = 1,
    Rcc02 = 2,
    Empirical1 = 3,
}

impl SchemeId {
    pub fn from_u8(v: u8) -> Result<Self> {
        Ok(match v {
            0 => SchemeId::Model0,
            1 => SchemeId::Model1,
            2 => SchemeId::Rcc02,
            3 => SchemeId::Empirical1,
            _ => return Err(Error::Bitstream(format!("unknown scheme id {v}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub scheme: SchemeId,
    pub height: u32,
    pub width: u32,
    pub n_rows: u8,
    pub context: u8,
    pub theta: f64,
    pub theta_star: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bitstream {
    pub header: Header,
    pub extra_params: Vec<f64>,
    pub coded: Vec<u8>,
    pub table: Option<Vec<u8>>,
}

impl Bitstream {
    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = Vec::with_capacity(HEADER_LEN + 5 + self.coded.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(h.scheme as u8);
        out.extend_from_slice(&h.height.to_le_bytes());
        out.extend_from_slice(&h.width.to_le_bytes());
        out.push(h.n_rows);
        out.push(h.context);
        out.extend_from_slice(&h.theta.to_le_bytes());
        for t in h.theta_star {
            out.extend_from_slice(&t.to_le_bytes());
        }
        out.push(self.extra_params.len() as u8);
        for p in &self.extra_params {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out.extend_from_slice(&(self.coded.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.coded);
        if let Some(table) = &self.table {
            out.extend_from_slice(table);
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut r = Reader { data, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Bitstream("bad magic".into()));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::Bitstream(format!("unsupported version {version}")));
        }
        let scheme = SchemeId::from_u8(r.u8()?)?;
        let height = r.u32()?;
        let width = r.u32()?;
        let n_rows = r.u8()?;
        let context = r.u8()?;
        let theta = r.f64()?;
        let theta_star = [r.f64()?, r.f64()?, r.f64()?];
        let extra = r.u8()? as usize;
        let extra_params = (0..extra).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let len = r.u32()? as usize;
        let coded = r.take(len)?.to_vec();
        let rest = &data[r.pos..];
        let table = (!rest.is_empty()).then(|| rest.to_vec());
        Ok(Self {
            header: Header { scheme, height, width, n_rows, context, theta, theta_star },
            extra_params,
            coded,
            table,
        })
    }

    /// Size of the range coder output in bits; the rate excludes header and
    /// embedded table.
    pub fn payload_bits(&self) -> usize {
        self.coded.len() * 8
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        match end {
            Some(end) => {
                let s = &self.data[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::Bitstream(format!("truncated at byte {}", self.pos))),
        }
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
