//! Binary PBM (`P4`) reading and writing.
//!
//! Bit 1 maps to spin `+1` and bit 0 to spin `-1`. Rows are packed
//! most-significant bit first and padded to a whole byte.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{BinaryImage, ImageDims};

pub fn encode_pbm(img: &BinaryImage) -> Vec<u8> {
    let (h, w) = (img.height(), img.width());
    let row_bytes = w.div_ceil(8);
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    out.reserve(row_bytes * h);
    for r in 0..h {
        let mut packed = vec![0u8; row_bytes];
        for (c, &s) in img.row(r).iter().enumerate() {
            if s == 1 {
                packed[c / 8] |= 0x80 >> (c % 8);
            }
        }
        out.extend_from_slice(&packed);
    }
    out
}

fn header_token(data: &[u8], pos: &mut usize) -> Result<usize> {
    loop {
        match data.get(*pos) {
            Some(b'#') => {
                while let Some(&b) = data.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(Error::Image("truncated header".into())),
        }
    }
    let start = *pos;
    while data.get(*pos).is_some_and(|b| b.is_ascii_digit()) {
        *pos += 1;
    }
    std::str::from_utf8(&data[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Image("expected a decimal dimension".into()))
}

pub fn decode_pbm(data: &[u8]) -> Result<BinaryImage> {
    if data.len() < 2 || &data[..2] != b"P4" {
        return Err(Error::Image("missing P4 magic".into()));
    }
    let mut pos = 2;
    let width = header_token(data, &mut pos)?;
    let height = header_token(data, &mut pos)?;
    // exactly one whitespace byte separates the header from the raster
    match data.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Image("missing raster separator".into())),
    }
    let dims = ImageDims::new(height, width).map_err(|e| Error::Image(e.to_string()))?;
    let row_bytes = width.div_ceil(8);
    let raster = &data[pos..];
    if raster.len() < row_bytes * height {
        return Err(Error::Image(format!(
            "raster has {} bytes, expected {}",
            raster.len(),
            row_bytes * height
        )));
    }
    let mut pixels = Vec::with_capacity(dims.sites());
    for r in 0..height {
        let row = &raster[r * row_bytes..(r + 1) * row_bytes];
        pixels.extend((0..width).map(|c| if row[c / 8] & (0x80 >> (c % 8)) != 0 { 1i8 } else { -1 }));
    }
    BinaryImage::from_spins(dims, pixels)
}

pub fn write_pbm(path: impl AsRef<Path>, img: &BinaryImage) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode_pbm(img))?;
    Ok(())
}

pub fn read_pbm(path: impl AsRef<Path>) -> Result<BinaryImage> {
    let mut data = Vec::new();
    fs::File::open(path)?.read_to_end(&mut data)?;
    decode_pbm(&data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_bytes() {
        let img = BinaryImage::from_spins(ImageDims::new(2, 3).unwrap(), vec![1, -1, 1, -1, -1, 1]).unwrap();
        let bytes = encode_pbm(&img);
        assert_eq!(bytes, b"P4\n3 2\n\xa0\x20".to_vec());
    }

    #[test]
    fn header_comments() {
        let data = b"P4 # made by hand\n9\n# rows next\n1\n\xff\x80";
        let img = decode_pbm(data).unwrap();
        assert_eq!(img.width(), 9);
        assert!(img.pixels().iter().all(|&s| s == 1));
    }

    #[test]
    fn truncated_raster() {
        assert!(decode_pbm(b"P4\n16 2\n\x00\x00\x00").is_err());
        assert!(decode_pbm(b"P1\n1 1\n1").is_err());
        assert!(decode_pbm(b"P4\n0 1\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(h in 1usize..20, w in 1usize..20, seed in any::<u64>()) {
            let dims = ImageDims::new(h, w).unwrap();
            let pixels = (0..dims.sites()).map(|k| if (seed.rotate_left(k as u32 % 64) ^ k as u64) & 1 == 1 { 1 } else { -1 }).collect();
            let img = BinaryImage::from_spins(dims, pixels).unwrap();
            prop_assert_eq!(decode_pbm(&encode_pbm(&img)).unwrap(), img);
        }
    }
}
