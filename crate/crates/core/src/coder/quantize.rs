use std::cmp::Ordering;

/// Frequency precision of every coding distribution handed to the range coder.
pub const FREQ_BITS: u32 = 16;
pub const FREQ_TOTAL: u32 = 1 << FREQ_BITS;

/// Integer cumulative frequencies; symbol `s` owns `cum[s]..cum[s+1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantizedDistribution {
    cum: Vec<u32>,
}

impl QuantizedDistribution {
    pub fn from_frequencies(freqs: &[u32]) -> Self {
        let mut cum = Vec::with_capacity(freqs.len() + 1);
        let mut acc = 0u32;
        cum.push(0);
        for &f in freqs {
            assert!(f >= 1, "every symbol needs a nonzero frequency");
            acc += f;
            cum.push(acc);
        }
        assert!(acc <= FREQ_TOTAL);
        Self { cum }
    }

    pub fn symbols(&self) -> usize {
        self.cum.len() - 1
    }

    pub fn total(&self) -> u32 {
        *self.cum.last().unwrap()
    }

    #[inline]
    pub fn range(&self, symbol: usize) -> (u32, u32) {
        (self.cum[symbol], self.cum[symbol + 1] - self.cum[symbol])
    }

    pub fn frequency(&self, symbol: usize) -> u32 {
        self.cum[symbol + 1] - self.cum[symbol]
    }

    pub fn probability(&self, symbol: usize) -> f64 {
        self.frequency(symbol) as f64 / self.total() as f64
    }

    /// Symbol whose cumulative range contains `target`.
    pub fn symbol_at(&self, target: u32) -> usize {
        // last index with cum[idx] <= target
        self.cum.partition_point(|&c| c <= target) - 1
    }

    pub fn entropy_bits(&self) -> f64 {
        (0..self.symbols()).map(|s| self.probability(s)).map(|p| -p * p.log2()).sum()
    }
}

/// Rounds a probability vector to frequencies summing to `2^16`.
///
/// Each symbol gets `floor(p * total)` floored at 1. A remaining deficit is
/// handed out by largest fractional remainder; a surplus (from the floor rule)
/// is taken back from the symbols with the smallest remainders among those
/// above frequency 1.
pub fn quantize(probs: &[f64]) -> QuantizedDistribution {
    let k = probs.len();
    assert!(k >= 1 && k <= FREQ_TOTAL as usize, "alphabet size out of range");
    let total = FREQ_TOTAL as i64;
    let scaled: Vec<f64> = probs.iter().map(|&p| p.max(0.0) * total as f64).collect();
    let mut freqs: Vec<i64> = scaled.iter().map(|&s| (s.floor() as i64).max(1)).collect();
    let remainder = |i: usize| scaled[i] - scaled[i].floor();
    let mut diff = total - freqs.iter().sum::<i64>();

    if diff != 0 {
        let mut order: Vec<usize> = (0..k).collect();
        if diff > 0 {
            order.sort_by(|&a, &b| remainder(b).partial_cmp(&remainder(a)).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
            let mut idx = 0;
            while diff > 0 {
                freqs[order[idx % k]] += 1;
                diff -= 1;
                idx += 1;
            }
        } else {
            order.sort_by(|&a, &b| {
                remainder(a)
                    .partial_cmp(&remainder(b))
                    .unwrap_or(Ordering::Equal)
                    .then(freqs[b].cmp(&freqs[a]))
                    .then(a.cmp(&b))
            });
            while diff < 0 {
                let mut progressed = false;
                for &i in &order {
                    if diff == 0 {
                        break;
                    }
                    if freqs[i] > 1 {
                        freqs[i] -= 1;
                        diff += 1;
                        progressed = true;
                    }
                }
                assert!(progressed, "cannot reduce below one count per symbol");
            }
        }
    }
    let freqs: Vec<u32> = freqs.into_iter().map(|f| f as u32).collect();
    QuantizedDistribution::from_frequencies(&freqs)
}
