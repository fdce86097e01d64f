//! 64-bit range coder with carry propagation.
//!
//! `low` and `range` are 64-bit registers. A byte is shifted out whenever the
//! range falls below `2^56`, so every symbol is coded with at least 40 bits of
//! range per frequency unit and truncation loss is negligible. A carry out of
//! `low` is propagated into the bytes already written.
//!
//! The stream ends with one byte that pins a value inside the final interval
//! (the range is at least `2^56` there); the decoder reads zero bytes past the
//! end of the buffer.

use crate::coder::quantize::QuantizedDistribution;
use crate::error::{Error, Result};

const SHIFT_THRESHOLD: u64 = 1 << 56;

#[derive(Debug)]
pub struct RangeEncoder {
    low: u64,
    range: u64,
    out: Vec<u8>,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        Self { low: 0, range: u64::MAX, out: Vec::new() }
    }

    fn propagate_carry(&mut self) {
        for byte in self.out.iter_mut().rev() {
            let (v, overflow) = byte.overflowing_add(1);
            *byte = v;
            if !overflow {
                return;
            }
        }
        unreachable!("carry past the start of the stream");
    }

    fn add_to_low(&mut self, x: u64) {
        let (v, carry) = self.low.overflowing_add(x);
        self.low = v;
        if carry {
            self.propagate_carry();
        }
    }

    pub fn encode(&mut self, dist: &QuantizedDistribution, symbol: usize) {
        let total = dist.total() as u64;
        let (start, freq) = dist.range(symbol);
        let r = self.range / total;
        let offset = r * start as u64;
        self.add_to_low(offset);
        self.range = if start as u64 + freq as u64 == total { self.range - offset } else { r * freq as u64 };
        while self.range < SHIFT_THRESHOLD {
            self.out.push((self.low >> 56) as u8);
            self.low <<= 8;
            self.range <<= 8;
        }
    }

    /// Bytes written so far, excluding the final flush.
    pub fn pending_len(&self) -> usize {
        self.out.len()
    }

    pub fn finish(mut self) -> Vec<u8> {
        // smallest k such that a value with k significant bytes lies in
        // [low, low + range)
        let low = self.low as u128;
        let end = low + self.range as u128;
        for k in 1..=8u32 {
            let unit = 1u128 << (64 - 8 * k);
            let v = (low + unit - 1) & !(unit - 1);
            if v < end {
                if v >> 64 != 0 {
                    self.propagate_carry();
                }
                let v = v as u64;
                for b in 0..k {
                    self.out.push((v >> (56 - 8 * b)) as u8);
                }
                break;
            }
        }
        self.out
    }
}

#[derive(Debug)]
pub struct RangeDecoder<'a> {
    data: &'a [u8],
    pos: usize,
    // value - low
    code: u64,
    range: u64,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        let mut dec = Self { data, pos: 0, code: 0, range: u64::MAX };
        for _ in 0..8 {
            dec.code = dec.code << 8 | dec.next_byte() as u64;
        }
        dec
    }

    fn next_byte(&mut self) -> u8 {
        let b = self.data.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b
    }

    pub fn decode(&mut self, dist: &QuantizedDistribution) -> Result<usize> {
        let total = dist.total() as u64;
        let r = self.range / total;
        let target = (self.code / r).min(total - 1) as u32;
        let symbol = dist.symbol_at(target);
        let (start, freq) = dist.range(symbol);
        let offset = r * start as u64;
        let width = if start as u64 + freq as u64 == total { self.range - offset } else { r * freq as u64 };
        if self.code < offset || self.code - offset >= width {
            return Err(Error::CorruptStream("code value outside the coding interval"));
        }
        self.code -= offset;
        self.range = width;
        while self.range < SHIFT_THRESHOLD {
            self.code = self.code << 8 | self.next_byte() as u64;
            self.range <<= 8;
        }
        Ok(symbol)
    }

    /// Bytes consumed beyond the end of the buffer.
    pub fn overrun(&self) -> usize {
        self.pos.saturating_sub(self.data.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coder::quantize::quantize;
    use proptest::prelude::*;

    fn code_bits(dists: &[QuantizedDistribution], symbols: &[usize]) -> f64 {
        dists.iter().zip(symbols).map(|(d, &s)| -d.probability(s).log2()).sum()
    }

    #[test]
    fn empty_stream() {
        let bytes = RangeEncoder::new().finish();
        assert_eq!(bytes.len(), 1);
    }

    #[test]
    fn fair_coin() {
        let fair = quantize(&[0.5, 0.5]);
        let mut seed = 1u64;
        let symbols: Vec<usize> = (0..10_000)
            .map(|_| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (seed >> 63) as usize
            })
            .collect();
        let mut enc = RangeEncoder::new();
        for &s in &symbols {
            enc.encode(&fair, s);
        }
        let bytes = enc.finish();
        let bits = bytes.len() as i64 * 8;
        assert!((bits - 10_000).abs() <= 40, "{bits}");
        let mut dec = RangeDecoder::new(&bytes);
        for &s in &symbols {
            assert_eq!(dec.decode(&fair).unwrap(), s);
        }
    }

    #[test]
    fn skewed_source_rate() {
        let q = quantize(&[0.1, 0.9]);
        let mut seed = 42u64;
        let n = 100_000;
        let symbols: Vec<usize> = (0..n)
            .map(|_| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((seed >> 11) as f64 / (1u64 << 53) as f64 >= 0.1) as usize
            })
            .collect();
        let mut enc = RangeEncoder::new();
        for &s in &symbols {
            enc.encode(&q, s);
        }
        let bytes = enc.finish();
        let rate = bytes.len() as f64 * 8.0 / n as f64;
        let h = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
        assert!((rate - h).abs() < 0.005, "{rate} vs {h}");
    }

    #[test]
    fn corrupt_stream_detected() {
        // an all-ones code value sits exactly at the top of the initial range
        let q = quantize(&[0.5, 0.5]);
        let garbage = [0xffu8; 8];
        let mut dec = RangeDecoder::new(&garbage);
        assert!(matches!(dec.decode(&q), Err(Error::CorruptStream(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn round_trip(
            raw in proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, 2..9), 1..60),
            picks in proptest::collection::vec(any::<u32>(), 60),
            skew in 0.0f64..60.0,
        ) {
            let dists: Vec<QuantizedDistribution> = raw
                .iter()
                .map(|r| {
                    let w: Vec<f64> = r.iter().enumerate().map(|(i, x)| x * (-(i as f64) * skew).exp()).collect();
                    let s: f64 = w.iter().sum();
                    if s > 0.0 { quantize(&w.iter().map(|x| x / s).collect::<Vec<_>>()) } else { quantize(&vec![1.0 / r.len() as f64; r.len()]) }
                })
                .collect();
            let symbols: Vec<usize> = dists.iter().zip(&picks).map(|(d, &p)| p as usize % d.symbols()).collect();
            let mut enc = RangeEncoder::new();
            for (d, &s) in dists.iter().zip(&symbols) {
                enc.encode(d, s);
            }
            let bytes = enc.finish();
            let ideal = code_bits(&dists, &symbols);
            let actual = bytes.len() as f64 * 8.0;
            prop_assert!(actual <= ideal + 32.0, "actual {} ideal {}", actual, ideal);
            prop_assert!(actual >= ideal);
            let mut dec = RangeDecoder::new(&bytes);
            for (d, &s) in dists.iter().zip(&symbols) {
                prop_assert_eq!(dec.decode(d).unwrap(), s);
            }
        }
    }
}
