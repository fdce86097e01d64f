//! Arithmetic coding of column states and pixels.

pub mod bitstream;
pub mod quantize;
pub mod range;

pub use bitstream::{Bitstream, Header, SchemeId};
pub use quantize::{quantize, QuantizedDistribution, FREQ_TOTAL};
pub use range::{RangeDecoder, RangeEncoder};

use crate::error::{Error, Result};

/// `sum -log2 p(symbol)` over aligned symbols and distributions.
pub fn measure_ideal_bits<'a, I>(pairs: I) -> Result<f64>
where
    I: IntoIterator<Item = (usize, &'a [f64])>,
{
    let mut bits = 0.0;
    for (symbol, dist) in pairs {
        let p = dist[symbol];
        if p <= 0.0 {
            return Err(Error::ZeroProbability { symbol });
        }
        bits -= p.log2();
    }
    Ok(bits)
}

/// Running totals of a coding pass.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BitTally {
    /// `-log2` of the model probabilities.
    pub model_bits: f64,
    /// `-log2` of the quantized probabilities actually handed to the coder.
    pub quantized_bits: f64,
    pub symbols: usize,
}

impl BitTally {
    pub fn add(&mut self, other: &BitTally) {
        self.model_bits += other.model_bits;
        self.quantized_bits += other.quantized_bits;
        self.symbols += other.symbols;
    }
}

/// One side of the coding channel. The encoder reads the true symbol from the
/// closure; the decoder ignores it and returns what it parses.
pub trait SymbolCoder {
    fn code(&mut self, probs: &[f64], actual: &dyn Fn() -> usize) -> Result<usize>;
    fn tally(&self) -> &BitTally;
}

fn account(tally: &mut BitTally, probs: &[f64], q: &QuantizedDistribution, symbol: usize) -> Result<()> {
    let p = probs[symbol];
    if p <= 0.0 {
        return Err(Error::ZeroProbability { symbol });
    }
    tally.model_bits -= p.log2();
    tally.quantized_bits -= q.probability(symbol).log2();
    tally.symbols += 1;
    Ok(())
}

#[derive(Default)]
pub struct EncodingCoder {
    encoder: RangeEncoder,
    tally: BitTally,
}

impl EncodingCoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn finish(self) -> (Vec<u8>, BitTally) {
        (self.encoder.finish(), self.tally)
    }
}

impl SymbolCoder for EncodingCoder {
    fn code(&mut self, probs: &[f64], actual: &dyn Fn() -> usize) -> Result<usize> {
        let symbol = actual();
        let q = quantize(probs);
        account(&mut self.tally, probs, &q, symbol)?;
        self.encoder.encode(&q, symbol);
        Ok(symbol)
    }

    fn tally(&self) -> &BitTally {
        &self.tally
    }
}

pub struct DecodingCoder<'a> {
    decoder: RangeDecoder<'a>,
    tally: BitTally,
}

impl<'a> DecodingCoder<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { decoder: RangeDecoder::new(data), tally: BitTally::default() }
    }

    /// Fails if the decoder needed more than the implicit zero padding that
    /// an intact stream can require.
    pub fn finish(self) -> Result<BitTally> {
        if self.decoder.overrun() > 8 {
            return Err(Error::CorruptStream("stream ended before the last symbol"));
        }
        Ok(self.tally)
    }
}

impl SymbolCoder for DecodingCoder<'_> {
    fn code(&mut self, probs: &[f64], _actual: &dyn Fn() -> usize) -> Result<usize> {
        let q = quantize(probs);
        let symbol = self.decoder.decode(&q)?;
        account(&mut self.tally, probs, &q, symbol)?;
        Ok(symbol)
    }

    fn tally(&self) -> &BitTally {
        &self.tally
    }
}

/// Computes model bits without running the range coder.
#[derive(Default)]
pub struct MeasuringCoder {
    tally: BitTally,
}

impl MeasuringCoder {
    pub fn new() -> Self {
        Self::default()
    }
}

impl SymbolCoder for MeasuringCoder {
    fn code(&mut self, probs: &[f64], actual: &dyn Fn() -> usize) -> Result<usize> {
        let symbol = actual();
        let p = probs[symbol];
        if p <= 0.0 {
            return Err(Error::ZeroProbability { symbol });
        }
        self.tally.model_bits -= p.log2();
        self.tally.symbols += 1;
        Ok(symbol)
    }

    fn tally(&self) -> &BitTally {
        &self.tally
    }
}
