//! Exact row-level information quantities for narrow grids.
//!
//! The joint law of three consecutive rows `(R0, R1, R2)` in the middle of a
//! tall free-boundary grid is computed with a row transfer matrix. With a
//! margin of a few hundred rows on each side the law is stationary to machine
//! precision, so it stands in for the infinitely tall source. All entropies
//! are derived from this joint by marginalization, and all coding rates from
//! the actual coding distributions weighted by exact probabilities, so the
//! rate identities below are genuine checks rather than rearrangements.

use crate::bp::{backward_pass, build_block_model, next_column_distribution, ColumnState};
use crate::error::{Error, Result};
use crate::grid::IsingParams;
use crate::harness::lemma::{decomposed_divergence, ContextChain};
use crate::schemes::empirical::PAD_SPIN;

pub const MAX_EXACT_WIDTH: usize = 8;
pub const DEFAULT_MARGIN: usize = 400;

fn spin(state: usize, i: usize) -> i8 {
    if state >> i & 1 == 1 {
        1
    } else {
        -1
    }
}

fn spins(state: usize, width: usize) -> Vec<i8> {
    (0..width).map(|i| spin(state, i)).collect()
}

fn plogp_bits(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

fn entropy_bits(ps: &[f64]) -> f64 {
    ps.iter().map(|&p| plogp_bits(p)).sum()
}

/// Stationary three-row law of the Ising source on a `W`-column strip.
pub struct RowProcess {
    pub width: usize,
    pub theta: f64,
    states: usize,
    // symmetric T(a, b) = exp(theta (h(a)/2 + v(a, b) + h(b)/2))
    transfer: Vec<f64>,
    // boundary vector seen from `margin` rows away, normalized
    edge: Vec<f64>,
    norm: f64,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub p01: Vec<f64>,
    pub p12: Vec<f64>,
    pub p02: Vec<f64>,
    h3: f64,
}

impl RowProcess {
    pub fn new(width: usize, params: IsingParams, margin: usize) -> Result<Self> {
        if width == 0 || width > MAX_EXACT_WIDTH {
            return Err(Error::DimsTooLarge { sites: width, cap: MAX_EXACT_WIDTH });
        }
        let s = 1usize << width;
        let theta = params.theta;
        let h = |a: usize| -> f64 { (0..width - 1).map(|i| (spin(a, i) * spin(a, i + 1)) as f64).sum() };
        let v = |a: usize, b: usize| -> f64 { width as f64 - 2.0 * (a ^ b).count_ones() as f64 };
        let mut transfer = vec![0.0; s * s];
        for a in 0..s {
            for b in 0..s {
                transfer[a * s + b] = (theta * (0.5 * h(a) + v(a, b) + 0.5 * h(b))).exp();
            }
        }
        let mut edge: Vec<f64> = (0..s).map(|a| (0.5 * theta * h(a)).exp()).collect();
        for _ in 0..margin {
            let mut next = vec![0.0; s];
            for a in 0..s {
                let ea = edge[a];
                for b in 0..s {
                    next[b] += ea * transfer[a * s + b];
                }
            }
            let z: f64 = next.iter().sum();
            edge = next.into_iter().map(|x| x / z).collect();
        }
        let mut this = Self {
            width,
            theta,
            states: s,
            transfer,
            edge,
            norm: 1.0,
            p0: vec![0.0; s],
            p1: vec![0.0; s],
            p2: vec![0.0; s],
            p01: vec![0.0; s * s],
            p12: vec![0.0; s * s],
            p02: vec![0.0; s * s],
            h3: 0.0,
        };
        this.norm = (0..s).flat_map(|a| (0..s).flat_map(move |b| (0..s).map(move |c| (a, b, c)))).map(|(a, b, c)| this.unnormalized(a, b, c)).sum();
        let mut h3 = 0.0;
        for a in 0..s {
            for b in 0..s {
                for c in 0..s {
                    let p = this.p3(a, b, c);
                    h3 += plogp_bits(p);
                    this.p01[a * s + b] += p;
                    this.p12[b * s + c] += p;
                    this.p02[a * s + c] += p;
                    this.p0[a] += p;
                    this.p1[b] += p;
                    this.p2[c] += p;
                }
            }
        }
        this.h3 = h3;
        Ok(this)
    }

    fn unnormalized(&self, a: usize, b: usize, c: usize) -> f64 {
        let s = self.states;
        self.edge[a] * self.transfer[a * s + b] * self.transfer[b * s + c] * self.edge[c]
    }

    pub fn states(&self) -> usize {
        self.states
    }

    /// `P(R0 = a, R1 = b, R2 = c)`.
    pub fn p3(&self, a: usize, b: usize, c: usize) -> f64 {
        self.unnormalized(a, b, c) / self.norm
    }

    pub fn entropy(&self) -> InfoQuantities {
        let w = self.width as f64;
        let h0 = entropy_bits(&self.p0);
        let h1 = entropy_bits(&self.p1);
        let h2 = entropy_bits(&self.p2);
        let h01 = entropy_bits(&self.p01);
        let h12 = entropy_bits(&self.p12);
        let h02 = entropy_bits(&self.p02);
        InfoQuantities {
            h_inf: (h01 - h0) / w,
            h_row: h1,
            h_row_next: h2,
            h_next_given_prev: h12 - h1,
            h2_given_01: self.h3 - h01,
            h1_given_02: self.h3 - h02,
            info_adjacent: h0 + h1 - h01,
            info_two_apart: h0 + h2 - h02,
            cond_info_12_given_0: h01 + h02 - self.h3 - h0,
        }
    }
}

/// Exact entropies (bits) of the stationary row process.
#[derive(Clone, Copy, Debug)]
pub struct InfoQuantities {
    /// `H(R1 | R0) / W`.
    pub h_inf: f64,
    pub h_row: f64,
    pub h_row_next: f64,
    /// `H(R2 | R1)`.
    pub h_next_given_prev: f64,
    /// `H(R2 | R0, R1)`.
    pub h2_given_01: f64,
    /// `H(R1 | R0, R2)`.
    pub h1_given_02: f64,
    /// `I(R1; R0)`.
    pub info_adjacent: f64,
    /// `I(R2; R0)`.
    pub info_two_apart: f64,
    /// `I(R1; R2 | R0)`.
    pub cond_info_12_given_0: f64,
}

/// Sequential chain of a row's pixels with the full left context, optionally
/// given a fixed previous row.
fn row_chain(width: usize, row_probs: impl Fn(usize) -> f64) -> ContextChain {
    let s = 1usize << width;
    // prefix[i][k] = P(first i pixels = k)
    let mut prefix: Vec<Vec<f64>> = (0..=width).map(|i| vec![0.0; 1 << i]).collect();
    for b in 0..s {
        let p = row_probs(b);
        for (i, m) in prefix.iter_mut().enumerate() {
            m[b & ((1 << i) - 1)] += p;
        }
    }
    let tables = (0..width)
        .map(|i| {
            (0..1usize << i)
                .map(|ctx| {
                    let m = prefix[i][ctx];
                    if m > 0.0 {
                        vec![prefix[i + 1][ctx] / m, prefix[i + 1][ctx | 1 << i] / m]
                    } else {
                        vec![0.5, 0.5]
                    }
                })
                .collect()
        })
        .collect();
    ContextChain { sizes: vec![2; width], contexts: (0..width).map(|i| (0..i).collect()).collect(), tables }
}

/// Chain whose pixel `i` depends on pixel `i-1` only, with
/// `table(i, left)` giving `[P(-1), P(+1)]` (`left` is `None` for `i = 0`).
fn left_chain(width: usize, table: impl Fn(usize, Option<usize>) -> [f64; 2]) -> ContextChain {
    let contexts = (0..width).map(|i| if i == 0 { vec![] } else { vec![i - 1] }).collect();
    let tables = (0..width)
        .map(|i| {
            if i == 0 {
                vec![table(0, None).to_vec()]
            } else {
                (0..2).map(|l| table(i, Some(l)).to_vec()).collect()
            }
        })
        .collect();
    ContextChain { sizes: vec![2; width], contexts, tables }
}

fn chain_code_length(chain: &ContextChain, b: usize) -> f64 {
    let x: Vec<usize> = (0..chain.len()).map(|i| b >> i & 1).collect();
    (0..chain.len()).map(|i| -chain.conditional(i, &x)[x[i]].log2()).sum()
}

/// Pixel conditionals of a single-row block model as a left chain.
fn block_chain(width: usize, theta_star: f64, top: Option<&[i8]>, bottom: Option<&[i8]>) -> Result<ContextChain> {
    let model = build_block_model(1, width, theta_star, top, bottom)?;
    let messages = backward_pass(&model);
    let mut tables = Vec::with_capacity(width);
    for i in 0..width {
        if i == 0 {
            let d = next_column_distribution(&model, &messages, 0, None)?;
            tables.push(vec![d.probs.clone()]);
        } else {
            let rows = (0..2)
                .map(|l| next_column_distribution(&model, &messages, i, Some(ColumnState(l as u16))).map(|d| d.probs))
                .collect::<Result<Vec<_>>>()?;
            tables.push(rows);
        }
    }
    let contexts = (0..width).map(|i| if i == 0 { vec![] } else { vec![i - 1] }).collect();
    Ok(ContextChain { sizes: vec![2; width], contexts, tables })
}

/// Context index of pixel `i` as the context-table coder forms it, for a row
/// `b` below row `a` (`a = None` codes the first image row).
fn table_context(width: usize, context: usize, a: Option<usize>, b: usize, i: usize) -> usize {
    let bit = |s: i8| (s == 1) as usize;
    let mut idx = bit(if i > 0 { spin(b, i - 1) } else { PAD_SPIN });
    for j in 1..context {
        let c = i + j - 1;
        let s = match a {
            Some(a) if c < width => spin(a, c),
            _ => PAD_SPIN,
        };
        idx |= bit(s) << j;
    }
    idx
}

/// Pooled conditional `[P(-1), P(+1)]` per context, as an infinitely trained
/// context table would hold for rows in the bulk of the source.
pub fn pooled_context_table(process: &RowProcess, context: usize) -> Vec<[f64; 2]> {
    let (s, w) = (process.states(), process.width);
    let mut counts = vec![[0.0f64; 2]; 1 << context];
    for a in 0..s {
        for b in 0..s {
            let p = process.p01[a * s + b];
            for i in 0..w {
                counts[table_context(w, context, Some(a), b, i)][b >> i & 1] += p;
            }
        }
    }
    counts
        .into_iter()
        .map(|[n0, n1]| if n0 + n1 > 0.0 { [n0 / (n0 + n1), n1 / (n0 + n1)] } else { [0.5, 0.5] })
        .collect()
}

/// Rates (bits per pixel) of single-row coding under the exact source, and
/// the divergence sums of the redundancy decompositions (bits per row).
#[derive(Clone, Debug)]
pub struct ExactRates {
    pub info: InfoQuantities,
    pub theta_star_0: f64,
    pub theta_star_1: f64,
    pub context: usize,
    pub r0m: f64,
    pub r0e: f64,
    pub r1m: f64,
    pub r1e: f64,
    pub r2m: f64,
    /// 0-sided rate of a pooled context table with the left pixel only.
    pub r0e_left_only: f64,
    pub div_0m: f64,
    pub div_1m: f64,
    pub div_1e: f64,
}

impl ExactRates {
    pub fn compute(process: &RowProcess, theta_star_0: f64, theta_star_1: f64, context: usize) -> Result<Self> {
        let (s, w) = (process.states(), process.width);
        let wf = w as f64;
        let info = process.entropy();
        let ln2 = std::f64::consts::LN_2;

        // 0-sided: row marginal against the block model and the true chain
        let truth0 = row_chain(w, |b| process.p1[b]);
        let model0 = block_chain(w, theta_star_0, None, None)?;
        let left_table = pooled_context_table(process, 1);
        let left_only = left_chain(w, |i, l| {
            let b = l.map_or(0, |l| l << (i - 1));
            left_table[table_context(w, 1, None, b, i)]
        });
        let mut r0m = 0.0;
        let mut r0e = 0.0;
        let mut r0e_left_only = 0.0;
        for b in 0..s {
            let p = process.p1[b];
            r0m += p * chain_code_length(&model0, b);
            r0e += p * chain_code_length(&truth0, b);
            r0e_left_only += p * chain_code_length(&left_only, b);
        }
        let div_0m = decomposed_divergence(&truth0, &model0) / ln2;

        // 1-sided: rows given the previous row
        let table = pooled_context_table(process, context);
        let (mut r1m, mut r1e, mut div_1m, mut div_1e) = (0.0, 0.0, 0.0, 0.0);
        for a in 0..s {
            let pa = process.p0[a];
            if pa <= 0.0 {
                continue;
            }
            let truth = row_chain(w, |b| process.p01[a * s + b] / pa);
            let top = spins(a, w);
            let model = block_chain(w, theta_star_1, Some(&top), None)?;
            let empirical = left_chain(w, |i, l| {
                let b = l.map_or(0, |l| l << (i - 1));
                table[table_context(w, context, Some(a), b, i)]
            });
            for b in 0..s {
                let p = process.p01[a * s + b];
                r1m += p * chain_code_length(&model, b);
                r1e += p * chain_code_length(&empirical, b);
            }
            div_1m += pa * decomposed_divergence(&truth, &model) / ln2;
            div_1e += pa * decomposed_divergence(&truth, &empirical) / ln2;
        }

        // 2-sided at the source parameter
        let mut r2m = 0.0;
        for a in 0..s {
            let top = spins(a, w);
            for c in 0..s {
                let bottom = spins(c, w);
                let model = block_chain(w, process.theta, Some(&top), Some(&bottom))?;
                for b in 0..s {
                    r2m += process.p3(a, b, c) * chain_code_length(&model, b);
                }
            }
        }

        Ok(Self {
            info,
            theta_star_0,
            theta_star_1,
            context,
            r0m: r0m / wf,
            r0e: r0e / wf,
            r1m: r1m / wf,
            r1e: r1e / wf,
            r2m: r2m / wf,
            r0e_left_only: r0e_left_only / wf,
            div_0m,
            div_1m,
            div_1e,
        })
    }
}

/// One line of the identity ledger.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self { name: name.into(), lhs, rhs, tolerance }
    }

    pub fn passed(&self) -> bool {
        (self.lhs - self.rhs).abs() <= self.tolerance
    }
}

/// Redundancy identities of single-row coding checked on the exact source.
pub fn identity_checks(r: &ExactRates, width: usize, tolerance: f64) -> Vec<IdentityCheck> {
    let w = width as f64;
    let i = &r.info;
    let tag = |s: &str| format!("W={width} {s}");
    vec![
        IdentityCheck::new(tag("0-sided model: R0M = H + (D0M + I(R1;R0))/W"), r.r0m, i.h_inf + (r.div_0m + i.info_adjacent) / w, tolerance),
        IdentityCheck::new(tag("0-sided full-context: R0E = H + I(R1;R0)/W"), r.r0e, i.h_inf + i.info_adjacent / w, tolerance),
        IdentityCheck::new(tag("2-sided: R2M = H - I(R1;R2|R0)/W"), r.r2m, i.h_inf - i.cond_info_12_given_0 / w, tolerance),
        IdentityCheck::new(tag("Markov step: H(R2|R0,R1) = H(R2|R1)"), i.h2_given_01, i.h_next_given_prev, tolerance),
        IdentityCheck::new(tag("stationarity: H(R1) = H(R2)"), i.h_row, i.h_row_next, tolerance),
        IdentityCheck::new(
            tag("alternating: (R0M + R2M)/2 = H + D0M/2W + I(R2;R0)/2W"),
            0.5 * (r.r0m + r.r2m),
            i.h_inf + (r.div_0m + i.info_two_apart) / (2.0 * w),
            tolerance,
        ),
        IdentityCheck::new(tag("1-sided model: R1M = H + D1M/W"), r.r1m, i.h_inf + r.div_1m / w, tolerance),
        IdentityCheck::new(tag(&format!("1-sided table c={}: R1E = H + D1E/W", r.context)), r.r1e, i.h_inf + r.div_1e / w, tolerance),
    ]
}

/// `I(R0; R_{k+1}) / W` in bits per pixel for `k = 1..=max_gap`: the
/// information penalty across a 2-sided strip of `k` rows.
pub fn strip_information_curve(width: usize, params: IsingParams, max_gap: usize, margin: usize) -> Result<Vec<f64>> {
    let p = RowProcess::new(width, params, margin)?;
    let s = p.states();
    let mut out = Vec::with_capacity(max_gap);
    // row distribution after k+1 transfer steps from each starting row
    let mut reach: Vec<f64> = (0..s * s).map(|i| if i / s == i % s { 1.0 } else { 0.0 }).collect();
    for k in 1..=max_gap + 1 {
        let mut next = vec![0.0; s * s];
        for a in 0..s {
            for m in 0..s {
                let r = reach[a * s + m];
                if r == 0.0 {
                    continue;
                }
                for c in 0..s {
                    next[a * s + c] += r * p.transfer[m * s + c];
                }
            }
        }
        let z: f64 = next.iter().sum();
        reach = next.into_iter().map(|x| x / z).collect();
        if k >= 2 {
            let mut joint: Vec<f64> = (0..s * s).map(|i| p.edge[i / s] * reach[i] * p.edge[i % s]).collect();
            let z: f64 = joint.iter().sum();
            joint.iter_mut().for_each(|x| *x /= z);
            let mut ma = vec![0.0; s];
            let mut mc = vec![0.0; s];
            for a in 0..s {
                for c in 0..s {
                    ma[a] += joint[a * s + c];
                    mc[c] += joint[a * s + c];
                }
            }
            out.push((entropy_bits(&ma) + entropy_bits(&mc) - entropy_bits(&joint)) / width as f64);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{enumerate_exact, ImageDims};

    #[test]
    fn independent_source() {
        let p = RowProcess::new(3, IsingParams::new(0.0).unwrap(), 5).unwrap();
        let q = p.entropy();
        assert!((q.h_inf - 1.0).abs() < 1e-12);
        assert!(q.info_adjacent.abs() < 1e-12);
        let r = ExactRates::compute(&p, 0.0, 0.0, 3).unwrap();
        for v in [r.r0m, r.r0e, r.r1m, r.r1e, r.r2m, r.r0e_left_only] {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_enumeration_with_no_margin() {
        // zero margin: the three rows are the whole grid
        let params = IsingParams::new(0.6).unwrap();
        let p = RowProcess::new(2, params, 0).unwrap();
        let exact = enumerate_exact(ImageDims::new(3, 2).unwrap(), params).unwrap();
        for (k, &pk) in exact.probs.iter().enumerate() {
            let img = exact.image(k);
            let row = |r: usize| (0..2).map(|c| ((img.get(r, c) == 1) as usize) << c).sum::<usize>();
            assert!((p.p3(row(0), row(1), row(2)) - pk).abs() < 1e-14);
        }
    }

    #[test]
    fn identities_hold_on_narrow_strips() {
        for w in [2, 3, 4] {
            let p = RowProcess::new(w, IsingParams::new(0.4).unwrap(), DEFAULT_MARGIN).unwrap();
            let r = ExactRates::compute(&p, 0.55, 0.45, 3).unwrap();
            for c in identity_checks(&r, w, 1e-8) {
                assert!(c.passed(), "{}: {} vs {}", c.name, c.lhs, c.rhs);
            }
            assert!(r.r2m < r.info.h_inf && r.info.h_inf < r.r1m && r.r1m < r.r0m);
        }
    }

    #[test]
    fn strip_information_decreases() {
        let curve = strip_information_curve(3, IsingParams::new(0.4).unwrap(), 4, DEFAULT_MARGIN).unwrap();
        let p = RowProcess::new(3, IsingParams::new(0.4).unwrap(), DEFAULT_MARGIN).unwrap();
        assert!((curve[0] - p.entropy().info_two_apart / 3.0).abs() < 1e-10);
        assert!(curve.windows(2).all(|w| w[1] < w[0]));
    }
}
