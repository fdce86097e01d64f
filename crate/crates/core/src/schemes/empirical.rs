//! Context-table (conventional context-based) coding distributions.
//!
//! The context of pixel `(r, i)` is `c` bits: bit 0 is the left neighbor, bits
//! `1..c` are pixels `i..=i+c-2` of row `r-1`. Positions outside the image
//! read as `-1`. With `c = 1` only the left neighbor is used.

use std::io::Read;

use crate::error::{Error, Result};
use crate::grid::BinaryImage;

pub const MAX_CONTEXT: usize = 16;

/// Pad value for context positions outside the image.
pub const PAD_SPIN: i8 = -1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextTable {
    context: usize,
    counts: Vec<[u64; 2]>,
}

pub fn check_context_size(context: usize) -> Result<()> {
    if !(1..=MAX_CONTEXT).contains(&context) {
        return Err(Error::Scheme(format!("context size {context} outside 1..={MAX_CONTEXT}")));
    }
    Ok(())
}

/// Packs the context of `(row, col)`. `pixel(r, c)` must only be asked for
/// positions that precede `(row, col)` in raster order.
pub fn context_index(
    width: usize,
    context: usize,
    row: usize,
    col: usize,
    pixel: impl Fn(usize, usize) -> i8,
) -> usize {
    let bit = |s: i8| (s == 1) as usize;
    let mut idx = bit(if col > 0 { pixel(row, col - 1) } else { PAD_SPIN });
    for j in 1..context {
        let c = col + j - 1;
        let s = if row > 0 && c < width { pixel(row - 1, c) } else { PAD_SPIN };
        idx |= bit(s) << j;
    }
    idx
}

impl ContextTable {
    pub fn empty(context: usize) -> Result<Self> {
        check_context_size(context)?;
        Ok(Self { context, counts: vec![[0, 0]; 1 << context] })
    }

    pub fn context_size(&self) -> usize {
        self.context
    }

    pub fn counts(&self, ctx: usize) -> [u64; 2] {
        self.counts[ctx]
    }

    pub fn add_image(&mut self, img: &BinaryImage) {
        let w = img.width();
        for r in 0..img.height() {
            for c in 0..w {
                let ctx = context_index(w, self.context, r, c, |rr, cc| img.get(rr, cc));
                self.counts[ctx][(img.get(r, c) == 1) as usize] += 1;
            }
        }
    }

    /// Coding distribution `[P(-1), P(+1)]` with add-one smoothing.
    pub fn conditional(&self, ctx: usize) -> [f64; 2] {
        let [n0, n1] = self.counts[ctx];
        let total = (n0 + n1 + 2) as f64;
        [(n0 + 1) as f64 / total, (n1 + 1) as f64 / total]
    }

    /// `c` as one byte, then `2^c` little-endian `u64` count pairs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + 16 * self.counts.len());
        out.push(self.context as u8);
        for [a, b] in &self.counts {
            out.extend_from_slice(&a.to_le_bytes());
            out.extend_from_slice(&b.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut reader = data;
        Self::read_from(&mut reader).and_then(|t| {
            if reader.is_empty() {
                Ok(t)
            } else {
                Err(Error::Table("trailing bytes after table".into()))
            }
        })
    }

    pub fn read_from(reader: &mut impl Read) -> Result<Self> {
        let mut c = [0u8; 1];
        reader.read_exact(&mut c).map_err(|_| Error::Table("missing context size".into()))?;
        let mut table = Self::empty(c[0] as usize).map_err(|e| Error::Table(e.to_string()))?;
        let mut buf = [0u8; 8];
        for pair in table.counts.iter_mut() {
            for slot in pair.iter_mut() {
                reader.read_exact(&mut buf).map_err(|_| Error::Table("truncated counts".into()))?;
                *slot = u64::from_le_bytes(buf);
            }
        }
        Ok(table)
    }
}

pub fn train_context_table<'a>(corpus: impl IntoIterator<Item = &'a BinaryImage>, context: usize) -> Result<ContextTable> {
    let mut table = ContextTable::empty(context)?;
    let mut any = false;
    for img in corpus {
        table.add_image(img);
        any = true;
    }
    if !any {
        return Err(Error::Scheme("training corpus is empty".into()));
    }
    Ok(table)
}
