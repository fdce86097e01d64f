//! End-to-end row-centric coders.
//!
//! Every scheme runs through one routine for both directions: the encoder
//! works on a fully known [`Canvas`], the decoder on an empty one that panics
//! on any read of a pixel not yet decoded.
//!
//! Block layouts (rows top to bottom):
//!
//! * model 0-/1-sided: blocks of `N_b` rows; a short final block keeps the
//!   remaining rows and uses the parameter calibrated for its own height.
//! * RCC 0/2-sided: line (`N_L`), strip (`N_S`), line, ... A strip is only
//!   placed when at least one row remains below it; otherwise the remaining
//!   rows form a final, possibly short, line. All lines are coded first, then
//!   all strips.
//! * empirical: raster order, one pixel at a time.

pub mod empirical;

use std::collections::BTreeMap;

use crate::bp::{backward_pass, build_block_model, next_column_distribution, ColumnState, MAX_BLOCK_ROWS};
use crate::coder::{BitTally, Bitstream, DecodingCoder, EncodingCoder, Header, MeasuringCoder, SchemeId, SymbolCoder};
use crate::error::{Error, Result};
use crate::grid::{BinaryImage, ImageDims};

pub use empirical::{check_context_size, context_index, train_context_table, ContextTable, MAX_CONTEXT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeSpec {
    Model0 { n_rows: usize },
    Model1 { n_rows: usize },
    Rcc02 { line_rows: usize, strip_rows: usize },
    Empirical1 { context: usize },
}

impl SchemeSpec {
    pub fn validate(&self) -> Result<()> {
        let rows_ok = |n: usize| (1..=MAX_BLOCK_ROWS).contains(&n);
        let ok = match *self {
            SchemeSpec::Model0 { n_rows } | SchemeSpec::Model1 { n_rows } => rows_ok(n_rows),
            SchemeSpec::Rcc02 { line_rows, strip_rows } => rows_ok(line_rows) && rows_ok(strip_rows),
            SchemeSpec::Empirical1 { context } => return check_context_size(context),
        };
        if !ok {
            return Err(Error::Scheme(format!("{self:?}: block heights must be in 1..={MAX_BLOCK_ROWS}")));
        }
        Ok(())
    }

    pub fn id(&self) -> SchemeId {
        match self {
            SchemeSpec::Model0 { .. } => SchemeId::Model0,
            SchemeSpec::Model1 { .. } => SchemeId::Model1,
            SchemeSpec::Rcc02 { .. } => SchemeId::Rcc02,
            SchemeSpec::Empirical1 { .. } => SchemeId::Empirical1,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            SchemeSpec::Model0 { n_rows } => format!("model0/n={n_rows}"),
            SchemeSpec::Model1 { n_rows } => format!("model1/n={n_rows}"),
            SchemeSpec::Rcc02 { line_rows, strip_rows } => format!("rcc02/nl={line_rows},ns={strip_rows}"),
            SchemeSpec::Empirical1 { context } => format!("empirical1/c={context}"),
        }
    }

    fn header_fields(&self) -> (u8, u8) {
        match *self {
            SchemeSpec::Model0 { n_rows } | SchemeSpec::Model1 { n_rows } => (n_rows as u8, 0),
            SchemeSpec::Rcc02 { line_rows, strip_rows } => (line_rows as u8, strip_rows as u8),
            SchemeSpec::Empirical1 { context } => (1, context as u8),
        }
    }

    fn from_header(h: &Header) -> Result<Self> {
        let spec = match h.scheme {
            SchemeId::Model0 => SchemeSpec::Model0 { n_rows: h.n_rows as usize },
            SchemeId::Model1 => SchemeSpec::Model1 { n_rows: h.n_rows as usize },
            SchemeId::Rcc02 => SchemeSpec::Rcc02 { line_rows: h.n_rows as usize, strip_rows: h.context as usize },
            SchemeId::Empirical1 => SchemeSpec::Empirical1 { context: h.context as usize },
        };
        spec.validate().map_err(|e| Error::Bitstream(e.to_string()))?;
        Ok(spec)
    }
}

/// How many boundary rows condition a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sidedness {
    Zero = 0,
    One = 1,
    Two = 2,
}

impl Sidedness {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            0 => Ok(Sidedness::Zero),
            1 => Ok(Sidedness::One),
            2 => Ok(Sidedness::Two),
            _ => Err(Error::Scheme(format!("sidedness {i} not in 0..=2"))),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Supplies `theta*` for a block of given sidedness and height.
pub trait ParamSource {
    fn theta_star(&self, sidedness: Sidedness, n_rows: usize) -> Result<f64>;
}

/// The same parameter for every block.
#[derive(Clone, Copy, Debug)]
pub struct FixedTheta(pub f64);

impl ParamSource for FixedTheta {
    fn theta_star(&self, _: Sidedness, _: usize) -> Result<f64> {
        Ok(self.0)
    }
}

impl<F: Fn(Sidedness, usize) -> Result<f64>> ParamSource for F {
    fn theta_star(&self, sidedness: Sidedness, n_rows: usize) -> Result<f64> {
        self(sidedness, n_rows)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub first_row: usize,
    pub n_rows: usize,
    pub sidedness: Sidedness,
}

impl Block {
    pub fn rows(&self) -> std::ops::Range<usize> {
        self.first_row..self.first_row + self.n_rows
    }
}

/// Blocks in coding order. Empty for the empirical scheme.
pub fn block_layout(spec: SchemeSpec, height: usize) -> Vec<Block> {
    match spec {
        SchemeSpec::Model0 { n_rows } | SchemeSpec::Model1 { n_rows } => {
            let sidedness = if matches!(spec, SchemeSpec::Model0 { .. }) { Sidedness::Zero } else { Sidedness::One };
            (0..height)
                .step_by(n_rows)
                .map(|first_row| Block { first_row, n_rows: n_rows.min(height - first_row), sidedness })
                .collect()
        }
        SchemeSpec::Rcc02 { line_rows, strip_rows } => {
            let mut lines = Vec::new();
            let mut strips = Vec::new();
            let mut row = 0;
            while row < height {
                let n = line_rows.min(height - row);
                lines.push(Block { first_row: row, n_rows: n, sidedness: Sidedness::Zero });
                row += n;
                let remaining = height - row;
                if remaining == 0 {
                    break;
                }
                if remaining > strip_rows {
                    strips.push(Block { first_row: row, n_rows: strip_rows, sidedness: Sidedness::Two });
                    row += strip_rows;
                } else {
                    lines.push(Block { first_row: row, n_rows: remaining, sidedness: Sidedness::Zero });
                    row = height;
                }
            }
            lines.extend(strips);
            lines
        }
        SchemeSpec::Empirical1 { .. } => Vec::new(),
    }
}

/// Parameter slots of a layout: the distinct `(sidedness, height)` pairs in
/// coding order. The first slot of each sidedness goes in the header, the
/// rest travel as extra parameters.
fn param_slots(layout: &[Block]) -> (Vec<(Sidedness, usize)>, Vec<(Sidedness, usize)>) {
    let mut primary: Vec<(Sidedness, usize)> = Vec::new();
    let mut extra = Vec::new();
    for b in layout {
        let key = (b.sidedness, b.n_rows);
        if primary.contains(&key) || extra.contains(&key) {
            continue;
        }
        if primary.iter().any(|(s, _)| *s == b.sidedness) {
            extra.push(key);
        } else {
            primary.push(key);
        }
    }
    (primary, extra)
}

/// Image under construction. Reads of pixels that are not yet known panic.
#[derive(Clone, Debug)]
pub struct Canvas {
    img: BinaryImage,
    known: Vec<bool>,
}

impl Canvas {
    pub fn known(img: BinaryImage) -> Self {
        let known = vec![true; img.dims().sites()];
        Self { img, known }
    }

    pub fn blank(dims: ImageDims) -> Self {
        Self { img: BinaryImage::filled(dims, -1), known: vec![false; dims.sites()] }
    }

    pub fn width(&self) -> usize {
        self.img.width()
    }

    pub fn height(&self) -> usize {
        self.img.height()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i8 {
        assert!(self.known[row * self.img.width() + col], "forward reference to pixel ({row}, {col})");
        self.img.get(row, col)
    }

    pub fn row(&self, row: usize) -> Vec<i8> {
        (0..self.width()).map(|c| self.get(row, c)).collect()
    }

    pub fn set(&mut self, row: usize, col: usize, spin: i8) {
        self.img.set(row, col, spin);
        self.known[row * self.img.width() + col] = true;
    }

    pub fn is_complete(&self) -> bool {
        self.known.iter().all(|&k| k)
    }

    pub fn into_image(self) -> BinaryImage {
        self.img
    }
}

/// Bits and pixels of one class of blocks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassTally {
    pub tally: BitTally,
    pub pixels: usize,
}

impl ClassTally {
    pub fn model_bpp(&self) -> f64 {
        self.tally.model_bits / self.pixels as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodingReport {
    pub spec: SchemeSpec,
    pub pixels: usize,
    pub tally: BitTally,
    /// Range coder output size; zero when only measuring.
    pub coded_bits: usize,
    /// Tallies of 0-, 1- and 2-sided blocks.
    pub by_sidedness: [ClassTally; 3],
}

impl CodingReport {
    pub fn ideal_bpp(&self) -> f64 {
        self.tally.model_bits / self.pixels as f64
    }

    pub fn actual_bpp(&self) -> f64 {
        self.coded_bits as f64 / self.pixels as f64
    }
}

fn code_block(
    canvas: &mut Canvas,
    coder: &mut dyn SymbolCoder,
    block: Block,
    theta_star: f64,
) -> Result<()> {
    let width = canvas.width();
    let top = match block.sidedness {
        Sidedness::Zero => None,
        _ if block.first_row == 0 => None,
        _ => Some(canvas.row(block.first_row - 1)),
    };
    let bottom = match block.sidedness {
        Sidedness::Two => Some(canvas.row(block.first_row + block.n_rows)),
        _ => None,
    };
    let model = build_block_model(block.n_rows, width, theta_star, top.as_deref(), bottom.as_deref())?;
    let messages = backward_pass(&model);
    let mut prev = None;
    for col in 0..width {
        let dist = next_column_distribution(&model, &messages, col, prev)?;
        let symbol = {
            let view = &*canvas;
            coder.code(&dist.probs, &|| ColumnState::from_spins(block.rows().map(|r| view.get(r, col))).index())?
        };
        let state = ColumnState(symbol as u16);
        for (k, r) in block.rows().enumerate() {
            canvas.set(r, col, state.spin(k));
        }
        prev = Some(state);
    }
    Ok(())
}

fn code_empirical(canvas: &mut Canvas, coder: &mut dyn SymbolCoder, table: &ContextTable) -> Result<()> {
    let (h, w, c) = (canvas.height(), canvas.width(), table.context_size());
    for r in 0..h {
        for col in 0..w {
            let ctx = context_index(w, c, r, col, |rr, cc| canvas.get(rr, cc));
            let probs = table.conditional(ctx);
            let symbol = {
                let view = &*canvas;
                coder.code(&probs, &|| (view.get(r, col) == 1) as usize)?
            };
            canvas.set(r, col, if symbol == 1 { 1 } else { -1 });
        }
    }
    Ok(())
}

/// Block-level tallies are taken as differences of the coder's running tally.
fn run_scheme(
    canvas: &mut Canvas,
    coder: &mut dyn SymbolCoder,
    spec: SchemeSpec,
    thetas: &BTreeMap<(Sidedness, usize), f64>,
    table: Option<&ContextTable>,
) -> Result<[ClassTally; 3]> {
    let mut classes: [ClassTally; 3] = Default::default();
    if let SchemeSpec::Empirical1 { context } = spec {
        let table = table.ok_or_else(|| Error::Scheme("empirical coding needs a context table".into()))?;
        if table.context_size() != context {
            return Err(Error::Scheme(format!(
                "table context size {} does not match scheme context {context}",
                table.context_size()
            )));
        }
        code_empirical(canvas, coder, table)?;
        classes[Sidedness::One.index()] =
            ClassTally { tally: coder.tally().clone(), pixels: canvas.width() * canvas.height() };
        return Ok(classes);
    }
    for block in block_layout(spec, canvas.height()) {
        let before = coder.tally().clone();
        code_block(canvas, coder, block, thetas[&(block.sidedness, block.n_rows)])?;
        let after = coder.tally();
        let class = &mut classes[block.sidedness.index()];
        class.tally.model_bits += after.model_bits - before.model_bits;
        class.tally.quantized_bits += after.quantized_bits - before.quantized_bits;
        class.tally.symbols += after.symbols - before.symbols;
        class.pixels += block.n_rows * canvas.width();
    }
    Ok(classes)
}

fn resolve_thetas(spec: SchemeSpec, height: usize, params: &dyn ParamSource) -> Result<BTreeMap<(Sidedness, usize), f64>> {
    block_layout(spec, height)
        .iter()
        .map(|b| Ok(((b.sidedness, b.n_rows), params.theta_star(b.sidedness, b.n_rows)?)))
        .collect()
}

pub struct Encoded {
    pub bitstream: Bitstream,
    pub report: CodingReport,
}

impl Encoded {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bitstream.to_bytes()
    }
}

/// Encodes an image. `theta` is the source parameter, recorded for
/// provenance. With `embed_table`, the context table is appended to the
/// payload; its size is not counted in the rate.
pub fn encode(
    img: &BinaryImage,
    spec: SchemeSpec,
    theta: f64,
    params: &dyn ParamSource,
    table: Option<&ContextTable>,
    embed_table: bool,
) -> Result<Encoded> {
    spec.validate()?;
    let thetas = resolve_thetas(spec, img.height(), params)?;
    let mut canvas = Canvas::known(img.clone());
    let mut coder = EncodingCoder::new();
    let by_sidedness = run_scheme(&mut canvas, &mut coder, spec, &thetas, table)?;
    let (coded, tally) = coder.finish();

    let layout = block_layout(spec, img.height());
    let (primary, extra) = param_slots(&layout);
    let mut theta_star = [0.0; 3];
    for key in &primary {
        theta_star[key.0.index()] = thetas[key];
    }
    let (n_rows, context) = spec.header_fields();
    let bitstream = Bitstream {
        header: Header {
            scheme: spec.id(),
            height: img.height() as u32,
            width: img.width() as u32,
            n_rows,
            context,
            theta,
            theta_star,
        },
        extra_params: extra.iter().map(|k| thetas[k]).collect(),
        table: (embed_table && table.is_some()).then(|| table.unwrap().to_bytes()),
        coded,
    };
    let report = CodingReport {
        spec,
        pixels: img.dims().sites(),
        tally,
        coded_bits: bitstream.payload_bits(),
        by_sidedness,
    };
    Ok(Encoded { bitstream, report })
}

/// Decodes a container. The context table comes from the stream when
/// embedded, otherwise from `table`.
pub fn decode(data: &[u8], table: Option<&ContextTable>) -> Result<(BinaryImage, CodingReport)> {
    let bitstream = Bitstream::from_bytes(data)?;
    let h = &bitstream.header;
    let spec = SchemeSpec::from_header(h)?;
    let dims = ImageDims::new(h.height as usize, h.width as usize).map_err(|e| Error::Bitstream(e.to_string()))?;

    let layout = block_layout(spec, dims.height);
    let (primary, extra) = param_slots(&layout);
    if extra.len() != bitstream.extra_params.len() {
        return Err(Error::Bitstream(format!(
            "expected {} extra parameters, found {}",
            extra.len(),
            bitstream.extra_params.len()
        )));
    }
    let mut thetas = BTreeMap::new();
    for key in primary {
        thetas.insert(key, h.theta_star[key.0.index()]);
    }
    for (key, &v) in extra.into_iter().zip(&bitstream.extra_params) {
        thetas.insert(key, v);
    }

    let embedded = bitstream.table.as_deref().map(ContextTable::from_bytes).transpose()?;
    let table = embedded.as_ref().or(table);

    let mut canvas = Canvas::blank(dims);
    let mut coder = DecodingCoder::new(&bitstream.coded);
    let by_sidedness = run_scheme(&mut canvas, &mut coder, spec, &thetas, table)?;
    let tally = coder.finish()?;
    debug_assert!(canvas.is_complete());
    let report = CodingReport { spec, pixels: dims.sites(), tally, coded_bits: bitstream.payload_bits(), by_sidedness };
    Ok((canvas.into_image(), report))
}

/// Ideal code length only, without running the range coder.
pub fn measure(
    img: &BinaryImage,
    spec: SchemeSpec,
    params: &dyn ParamSource,
    table: Option<&ContextTable>,
) -> Result<CodingReport> {
    spec.validate()?;
    let thetas = resolve_thetas(spec, img.height(), params)?;
    let mut canvas = Canvas::known(img.clone());
    let mut coder = MeasuringCoder::new();
    let by_sidedness = run_scheme(&mut canvas, &mut coder, spec, &thetas, table)?;
    Ok(CodingReport { spec, pixels: img.dims().sites(), tally: coder.tally().clone(), coded_bits: 0, by_sidedness })
}

pub fn encode_model_0sided(img: &BinaryImage, n_rows: usize, theta_star: f64) -> Result<Encoded> {
    encode(img, SchemeSpec::Model0 { n_rows }, theta_star, &FixedTheta(theta_star), None, false)
}

pub fn encode_model_1sided(img: &BinaryImage, n_rows: usize, theta_star: f64) -> Result<Encoded> {
    encode(img, SchemeSpec::Model1 { n_rows }, theta_star, &FixedTheta(theta_star), None, false)
}

/// Lines use `theta_line` (0-sided); strips use `theta_strip` (2-sided).
pub fn encode_rcc(
    img: &BinaryImage,
    line_rows: usize,
    strip_rows: usize,
    theta_line: f64,
    theta_strip: f64,
) -> Result<Encoded> {
    let params = move |s: Sidedness, _: usize| Ok(if s == Sidedness::Two { theta_strip } else { theta_line });
    encode(img, SchemeSpec::Rcc02 { line_rows, strip_rows }, theta_strip, &params, None, false)
}

pub fn encode_empirical_1sided(img: &BinaryImage, table: &ContextTable, embed_table: bool) -> Result<Encoded> {
    let spec = SchemeSpec::Empirical1 { context: table.context_size() };
    encode(img, spec, 0.0, &FixedTheta(0.0), Some(table), embed_table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::{gibbs_sample, GibbsSettings};
    use crate::grid::IsingParams;

    fn sample(h: usize, w: usize, theta: f64, seed: u64) -> BinaryImage {
        let s = GibbsSettings { burn_in_sweeps: 30, sweeps_between_samples: 1, rng_seed: seed };
        gibbs_sample(ImageDims::new(h, w).unwrap(), IsingParams::new(theta).unwrap(), s, 1).remove(0)
    }

    #[test]
    fn model_layout_tail() {
        let l = block_layout(SchemeSpec::Model0 { n_rows: 3 }, 10);
        assert_eq!(l.len(), 4);
        assert_eq!(l[3], Block { first_row: 9, n_rows: 1, sidedness: Sidedness::Zero });
        let (primary, extra) = param_slots(&l);
        assert_eq!(primary, vec![(Sidedness::Zero, 3)]);
        assert_eq!(extra, vec![(Sidedness::Zero, 1)]);
        assert!(param_slots(&block_layout(SchemeSpec::Model1 { n_rows: 2 }, 10)).1.is_empty());
    }

    #[test]
    fn rcc_layout_rules() {
        let heights = |l: &[Block]| l.iter().map(|b| (b.first_row, b.n_rows, b.sidedness.index())).collect::<Vec<_>>();
        // 7 rows, lines and strips of 2: one row is left after the second line,
        // too few for a strip with a row below it, so it becomes a short line
        let l = block_layout(SchemeSpec::Rcc02 { line_rows: 2, strip_rows: 2 }, 7);
        assert_eq!(heights(&l), vec![(0, 2, 0), (4, 2, 0), (6, 1, 0), (2, 2, 2)]);
        // strips never touch the last row
        for h in 1..40 {
            for (nl, ns) in [(1, 1), (2, 3), (3, 2), (4, 4)] {
                let l = block_layout(SchemeSpec::Rcc02 { line_rows: nl, strip_rows: ns }, h);
                let mut covered = vec![0; h];
                for b in &l {
                    for r in b.rows() {
                        covered[r] += 1;
                    }
                    if b.sidedness == Sidedness::Two {
                        assert!(b.first_row > 0 && b.first_row + b.n_rows < h);
                        assert_eq!(b.n_rows, ns);
                    } else {
                        assert!(b.n_rows <= nl.max(ns));
                    }
                }
                assert!(covered.iter().all(|&c| c == 1));
                // lines come before strips
                let first_strip = l.iter().position(|b| b.sidedness == Sidedness::Two).unwrap_or(l.len());
                assert!(l[first_strip..].iter().all(|b| b.sidedness == Sidedness::Two));
            }
        }
    }

    #[test]
    fn uniform_source_costs_one_bit() {
        let img = sample(12, 9, 0.0, 1);
        for spec in [SchemeSpec::Model0 { n_rows: 3 }, SchemeSpec::Model1 { n_rows: 2 }, SchemeSpec::Rcc02 { line_rows: 2, strip_rows: 1 }] {
            let r = measure(&img, spec, &FixedTheta(0.0), None).unwrap();
            assert!((r.ideal_bpp() - 1.0).abs() < 1e-12, "{spec:?}");
        }
    }

    #[test]
    fn round_trips_all_schemes() {
        for (theta, seed) in [(0.0, 1), (0.4, 2), (0.8, 3)] {
            let img = sample(23, 17, theta, seed);
            let table = train_context_table([&img], 4).unwrap();
            let specs = [
                SchemeSpec::Model0 { n_rows: 4 },
                SchemeSpec::Model1 { n_rows: 3 },
                SchemeSpec::Rcc02 { line_rows: 2, strip_rows: 3 },
                SchemeSpec::Empirical1 { context: 4 },
            ];
            for spec in specs {
                let params = |s: Sidedness, n: usize| Ok(theta + 0.01 * n as f64 + 0.1 * s.index() as f64);
                let enc = encode(&img, spec, theta, &params, Some(&table), false).unwrap();
                let bytes = enc.to_bytes();
                let (back, report) = decode(&bytes, Some(&table)).unwrap();
                assert_eq!(back, img, "{spec:?}");
                assert_eq!(report.tally, enc.report.tally);
                let m = measure(&img, spec, &params, Some(&table)).unwrap();
                assert_eq!(m.tally.model_bits, enc.report.tally.model_bits);
                assert!(enc.report.coded_bits as f64 >= enc.report.tally.quantized_bits);
            }
        }
    }

    #[test]
    fn embedded_table() {
        let img = sample(10, 10, 0.4, 5);
        let table = train_context_table([&img], 3).unwrap();
        let enc = encode_empirical_1sided(&img, &table, true).unwrap();
        let (back, _) = decode(&enc.to_bytes(), None).unwrap();
        assert_eq!(back, img);
        let plain = encode_empirical_1sided(&img, &table, false).unwrap();
        assert!(decode(&plain.to_bytes(), None).is_err());
        let other = train_context_table([&img], 2).unwrap();
        assert!(decode(&plain.to_bytes(), Some(&other)).is_err());
    }

    #[test]
    fn truncated_stream_is_an_error() {
        let img = sample(16, 16, 0.4, 6);
        let bytes = encode_model_1sided(&img, 2, 0.45).unwrap().to_bytes();
        for cut in [10, 48, bytes.len() / 2, bytes.len() - 1] {
            assert!(decode(&bytes[..cut], None).is_err());
        }
    }

    #[test]
    fn one_sided_with_zero_field_matches_zero_sided_single_block() {
        // a single block has no row above, so both schemes code it identically
        let img = sample(3, 20, 0.4, 7);
        let a = encode_model_0sided(&img, 3, 0.5).unwrap();
        let b = encode_model_1sided(&img, 3, 0.5).unwrap();
        assert_eq!(a.bitstream.coded, b.bitstream.coded);
        assert_eq!(a.report.tally, b.report.tally);
    }

    #[test]
    #[should_panic(expected = "forward reference")]
    fn canvas_rejects_forward_reads() {
        let mut c = Canvas::blank(ImageDims::new(2, 2).unwrap());
        c.set(0, 0, 1);
        c.get(0, 1);
    }
}
