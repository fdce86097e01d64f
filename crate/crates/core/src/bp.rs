//! Exact inference on an `N_b x W` block of rows treated as a chain of column
//! super-pixels.
//!
//! A column of `N_b` spins is one state in `0..2^N_b`; bit `k` holds the spin
//! of block row `k` (1 means `+1`). The block density factors over the chain
//! as
//!
//! ```text
//! u_0(x_0) * prod_{i>=1} K(x_{i-1}, x_i) u_i(x_i)
//! ```
//!
//! where `K` carries the horizontal couplings and `u_i` carries the vertical
//! couplings inside column `i` plus the boundary fields on its top and bottom
//! pixel. `column_pair_weight` is `K * u_i`, so every term is counted once.
//!
//! `K` is a tensor product of one 2x2 kernel per row, which lets a
//! matrix-vector product run in `O(N_b 2^N_b)` instead of `O(4^N_b)`.

use crate::error::{Error, Result};

pub const MAX_BLOCK_ROWS: usize = 16;

/// Spins of one block column packed into bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnState(pub u16);

impl ColumnState {
    pub fn from_spins(spins: impl IntoIterator<Item = i8>) -> Self {
        let mut bits = 0u16;
        for (k, s) in spins.into_iter().enumerate() {
            if s == 1 {
                bits |= 1 << k;
            }
        }
        ColumnState(bits)
    }

    #[inline]
    pub fn spin(self, row: usize) -> i8 {
        if self.0 >> row & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn complement(self, n_rows: usize) -> Self {
        ColumnState(!self.0 & ((1u32 << n_rows) - 1) as u16)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[inline]
fn spin_of(state: usize, row: usize) -> f64 {
    if state >> row & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Ising model restricted to a block of rows, with boundary rows absorbed as
/// per-site fields on the first and last block row.
#[derive(Clone, Debug)]
pub struct BlockModel {
    n_rows: usize,
    width: usize,
    theta_star: f64,
    top_field: Vec<f64>,
    bottom_field: Vec<f64>,
    // sum_k x_k x_{k+1} per state
    vertical_agreement: Vec<i32>,
    // exp(theta* (N_b - 2d)) for Hamming distance d
    horizontal_by_distance: Vec<f64>,
}

impl BlockModel {
    pub fn new(
        n_rows: usize,
        width: usize,
        theta_star: f64,
        top_field: Vec<f64>,
        bottom_field: Vec<f64>,
    ) -> Result<Self> {
        if n_rows == 0 || width == 0 {
            return Err(Error::InvalidDims { height: n_rows, width });
        }
        if n_rows > MAX_BLOCK_ROWS {
            return Err(Error::TooManyRows(n_rows));
        }
        for field in [&top_field, &bottom_field] {
            if field.len() != width {
                return Err(Error::BoundaryLength { expected: width, got: field.len() });
            }
        }
        let states = 1usize << n_rows;
        let vertical_agreement = (0..states)
            .map(|s| (0..n_rows.saturating_sub(1)).map(|k| (spin_of(s, k) * spin_of(s, k + 1)) as i32).sum())
            .collect();
        let horizontal_by_distance = (0..=n_rows)
            .map(|d| (theta_star * (n_rows as f64 - 2.0 * d as f64)).exp())
            .collect();
        Ok(Self { n_rows, width, theta_star, top_field, bottom_field, vertical_agreement, horizontal_by_distance })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn theta_star(&self) -> f64 {
        self.theta_star
    }

    pub fn top_field(&self) -> &[f64] {
        &self.top_field
    }

    pub fn bottom_field(&self) -> &[f64] {
        &self.bottom_field
    }

    pub fn states(&self) -> usize {
        1 << self.n_rows
    }

    /// Number of edges with both endpoints in the block.
    pub fn edge_count(&self) -> usize {
        self.n_rows * (self.width - 1) + (self.n_rows - 1) * self.width
    }

    /// Log of the unary factor of column `col`: vertical couplings plus fields.
    #[inline]
    fn unary_log(&self, col: usize, state: usize) -> f64 {
        self.theta_star * self.vertical_agreement[state] as f64
            + self.top_field[col] * spin_of(state, 0)
            + self.bottom_field[col] * spin_of(state, self.n_rows - 1)
    }

    /// Unary factors of a column, scaled so the largest is 1; returns the
    /// log of the scale removed.
    fn unary_vector(&self, col: usize) -> (Vec<f64>, f64) {
        let logs: Vec<f64> = (0..self.states()).map(|s| self.unary_log(col, s)).collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (logs.into_iter().map(|l| (l - max).exp()).collect(), max)
    }

    #[inline]
    fn horizontal(&self, left: usize, right: usize) -> f64 {
        self.horizontal_by_distance[(left ^ right).count_ones() as usize]
    }

    /// The standalone factor of column 0.
    pub fn unary_weight(&self, state: ColumnState) -> f64 {
        self.unary_log(0, state.index()).exp()
    }

    pub fn column_pair_weight(&self, col: usize, left: ColumnState, right: ColumnState) -> Result<f64> {
        if col == 0 || col >= self.width {
            return Err(Error::ColumnOutOfRange { index: col, width: self.width });
        }
        Ok(self.horizontal(left.index(), right.index()) * self.unary_log(col, right.index()).exp())
    }

    /// In-place `v <- K v`.
    fn apply_horizontal(&self, v: &mut [f64]) {
        let (e, f) = (self.theta_star.exp(), (-self.theta_star).exp());
        for k in 0..self.n_rows {
            let bit = 1 << k;
            for s in 0..v.len() {
                if s & bit == 0 {
                    let (a, b) = (v[s], v[s | bit]);
                    v[s] = e * a + f * b;
                    v[s | bit] = f * a + e * b;
                }
            }
        }
    }

    /// In-place `(v, d) <- (K v, dK/dtheta* v)`; `d` must start at zero.
    fn apply_horizontal_with_derivative(&self, v: &mut [f64], d: &mut [f64]) {
        let (e, f) = (self.theta_star.exp(), (-self.theta_star).exp());
        for k in 0..self.n_rows {
            let bit = 1 << k;
            for s in 0..v.len() {
                if s & bit == 0 {
                    let (a, b) = (v[s], v[s | bit]);
                    let (da, db) = (d[s], d[s | bit]);
                    v[s] = e * a + f * b;
                    v[s | bit] = f * a + e * b;
                    d[s] = e * da + f * db + e * a - f * b;
                    d[s | bit] = f * da + e * db - f * a + e * b;
                }
            }
        }
    }
}

/// Builds the block model for 0-sided (no rows), 1-sided (top row) or
/// 2-sided (both rows) conditioning. A boundary spin `s` adds `theta* * s`
/// to the field of the adjacent block pixel.
pub fn build_block_model(
    n_rows: usize,
    width: usize,
    theta_star: f64,
    top_row: Option<&[i8]>,
    bottom_row: Option<&[i8]>,
) -> Result<BlockModel> {
    let field = |row: Option<&[i8]>| -> Result<Vec<f64>> {
        match row {
            None => Ok(vec![0.0; width]),
            Some(r) if r.len() != width => Err(Error::BoundaryLength { expected: width, got: r.len() }),
            Some(r) => Ok(r.iter().map(|&s| theta_star * s as f64).collect()),
        }
    };
    BlockModel::new(n_rows, width, theta_star, field(top_row)?, field(bottom_row)?)
}

/// Right-to-left messages: `message(i)` summarizes columns `i+1..W` and is
/// normalized to sum 1.
#[derive(Clone, Debug)]
pub struct MessageSet {
    states: usize,
    data: Vec<f64>,
}

impl MessageSet {
    pub fn message(&self, col: usize) -> &[f64] {
        &self.data[col * self.states..(col + 1) * self.states]
    }

    pub fn width(&self) -> usize {
        self.data.len() / self.states
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let sum: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= sum;
    }
    sum
}

pub fn backward_pass(model: &BlockModel) -> MessageSet {
    let (states, width) = (model.states(), model.width);
    let mut data = vec![0.0; states * width];
    let uniform = 1.0 / states as f64;
    data[(width - 1) * states..].fill(uniform);
    let mut buf = vec![0.0; states];
    for col in (1..width).rev() {
        let (unary, _) = model.unary_vector(col);
        let msg = &data[col * states..(col + 1) * states];
        for ((b, u), m) in buf.iter_mut().zip(&unary).zip(msg) {
            *b = u * m;
        }
        model.apply_horizontal(&mut buf);
        normalize(&mut buf);
        data[(col - 1) * states..col * states].copy_from_slice(&buf);
    }
    MessageSet { states, data }
}

/// Coding distribution of one column given its context.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnDistribution {
    pub probs: Vec<f64>,
}

impl ColumnDistribution {
    pub fn prob(&self, state: ColumnState) -> f64 {
        self.probs[state.index()]
    }
}

/// Exact conditional distribution of column `col` given the realized previous
/// column and the boundary conditioning built into the model.
pub fn next_column_distribution(
    model: &BlockModel,
    messages: &MessageSet,
    col: usize,
    prev_state: Option<ColumnState>,
) -> Result<ColumnDistribution> {
    if col >= model.width {
        return Err(Error::ColumnOutOfRange { index: col, width: model.width });
    }
    if (col > 0) != prev_state.is_some() {
        return Err(Error::PrevStateMismatch);
    }
    let (unary, _) = model.unary_vector(col);
    let msg = messages.message(col);
    let mut probs: Vec<f64> = match prev_state {
        None => unary.iter().zip(msg).map(|(u, m)| u * m).collect(),
        Some(prev) => {
            let l = prev.index();
            unary
                .iter()
                .zip(msg)
                .enumerate()
                .map(|(r, (u, m))| model.horizontal(l, r) * u * m)
                .collect()
        }
    };
    normalize(&mut probs);
    Ok(ColumnDistribution { probs })
}

/// Exact expectations of the block model.
#[derive(Clone, Debug)]
pub struct BlockStatistics {
    /// Natural log of the partition function.
    pub log_partition: f64,
    pub horizontal_moment: f64,
    pub vertical_moment: f64,
    /// `E[x]` of block row 0, per column.
    pub top_magnetization: Vec<f64>,
    /// `E[x]` of the last block row, per column.
    pub bottom_magnetization: Vec<f64>,
}

impl BlockStatistics {
    /// `E[sum over in-block edges of x_i x_j]`.
    pub fn edge_moment(&self) -> f64 {
        self.horizontal_moment + self.vertical_moment
    }
}

pub fn block_statistics(model: &BlockModel) -> BlockStatistics {
    let (states, width, n) = (model.states(), model.width, model.n_rows);
    let messages = backward_pass(model);

    let mut log_partition = 0.0;
    let mut horizontal_moment = 0.0;
    let mut vertical_moment = 0.0;
    let mut top_magnetization = vec![0.0; width];
    let mut bottom_magnetization = vec![0.0; width];

    let mut alpha = vec![0.0; states];
    let mut deriv = vec![0.0; states];
    for col in 0..width {
        let (unary, scale) = model.unary_vector(col);
        let msg = messages.message(col);
        if col == 0 {
            alpha.copy_from_slice(&unary);
        } else {
            deriv.fill(0.0);
            model.apply_horizontal_with_derivative(&mut alpha, &mut deriv);
            let (mut num, mut den) = (0.0, 0.0);
            for r in 0..states {
                let w = unary[r] * msg[r];
                num += w * deriv[r];
                den += w * alpha[r];
            }
            horizontal_moment += num / den;
            for (a, u) in alpha.iter_mut().zip(&unary) {
                *a *= u;
            }
        }
        log_partition += normalize(&mut alpha).ln() + scale;

        let mut z = 0.0;
        let (mut vert, mut top, mut bottom) = (0.0, 0.0, 0.0);
        for r in 0..states {
            let mu = alpha[r] * msg[r];
            z += mu;
            vert += mu * model.vertical_agreement[r] as f64;
            top += mu * spin_of(r, 0);
            bottom += mu * spin_of(r, n - 1);
        }
        vertical_moment += vert / z;
        top_magnetization[col] = top / z;
        bottom_magnetization[col] = bottom / z;
    }
    BlockStatistics { log_partition, horizontal_moment, vertical_moment, top_magnetization, bottom_magnetization }
}

/// Exact expected in-block edge agreement sum.
pub fn block_moment(model: &BlockModel) -> f64 {
    block_statistics(model).edge_moment()
}

/// Exact entropy of the block model in nats.
pub fn block_conditional_entropy(model: &BlockModel) -> f64 {
    let stats = block_statistics(model);
    let field_energy: f64 = model
        .top_field
        .iter()
        .zip(&stats.top_magnetization)
        .chain(model.bottom_field.iter().zip(&stats.bottom_magnetization))
        .map(|(f, m)| f * m)
        .sum();
    let h = stats.log_partition - model.theta_star * stats.edge_moment() - field_energy;
    h.max(0.0)
}
