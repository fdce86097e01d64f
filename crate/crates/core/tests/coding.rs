//! End-to-end coding: ideal code lengths against an enumeration oracle,
//! round trips on arbitrary images, and stream error paths.

use proptest::prelude::*;

use rowcode::bp::build_block_model;
use rowcode::gibbs::{gibbs_sample, GibbsSettings};
use rowcode::oracle::brute_force_block;
use rowcode::schemes::empirical::train_context_table;
use rowcode::schemes::{decode, encode, measure, FixedTheta, SchemeSpec, Sidedness};
use rowcode::{BinaryImage, Error, ImageDims, IsingParams};

/// Probability of rows `first..first+n` under the brute-force block law.
fn block_prob(img: &BinaryImage, first: usize, n: usize, theta_star: f64, top: bool, bottom: bool) -> f64 {
    let w = img.width();
    let top_row = (top && first > 0).then(|| img.row(first - 1));
    let bottom_row = bottom.then(|| img.row(first + n));
    let model = build_block_model(n, w, theta_star, top_row, bottom_row).unwrap();
    let mut cfg = 0usize;
    for c in 0..w {
        for j in 0..n {
            if img.get(first + j, c) == 1 {
                cfg |= 1 << (c * n + j);
            }
        }
    }
    brute_force_block(&model).probs[cfg]
}

fn all_images(h: usize, w: usize) -> impl Iterator<Item = BinaryImage> {
    let dims = ImageDims::new(h, w).unwrap();
    (0..1u64 << (h * w)).map(move |b| BinaryImage::from_bits(dims, b))
}

#[test]
fn zero_sided_bits_match_oracle_and_sum_to_one() {
    let mut kraft = 0.0;
    for img in all_images(4, 4) {
        let bits = measure(&img, SchemeSpec::Model0 { n_rows: 2 }, &FixedTheta(0.5), None).unwrap().tally.model_bits;
        let p = block_prob(&img, 0, 2, 0.5, false, false) * block_prob(&img, 2, 2, 0.5, false, false);
        assert!((bits + p.log2()).abs() < 1e-9);
        kraft += (-bits).exp2();
    }
    assert!((kraft - 1.0).abs() < 1e-9);
}

#[test]
fn one_sided_bits_match_oracle_and_sum_to_one() {
    let mut kraft = 0.0;
    for img in all_images(4, 4) {
        let bits = measure(&img, SchemeSpec::Model1 { n_rows: 2 }, &FixedTheta(0.45), None).unwrap().tally.model_bits;
        let p = block_prob(&img, 0, 2, 0.45, true, false) * block_prob(&img, 2, 2, 0.45, true, false);
        assert!((bits + p.log2()).abs() < 1e-9);
        kraft += (-bits).exp2();
    }
    assert!((kraft - 1.0).abs() < 1e-9);
}

#[test]
fn zero_two_sided_bits_match_oracle_and_sum_to_one() {
    // lines at rows 0, 2, 4; strips at rows 1 and 3
    let params = |s: Sidedness, _: usize| Ok(if s == Sidedness::Two { 0.4 } else { 0.6 });
    let mut kraft = 0.0;
    for img in all_images(5, 3) {
        let bits = measure(&img, SchemeSpec::Rcc02 { line_rows: 1, strip_rows: 1 }, &params, None).unwrap().tally.model_bits;
        let lines: f64 = [0, 2, 4].iter().map(|&r| block_prob(&img, r, 1, 0.6, false, false)).product();
        let strips: f64 = [1, 3].iter().map(|&r| block_prob(&img, r, 1, 0.4, true, true)).product();
        assert!((bits + (lines * strips).log2()).abs() < 1e-9);
        kraft += (-bits).exp2();
    }
    assert!((kraft - 1.0).abs() < 1e-9);
}

#[test]
fn independent_source_costs_one_bit_per_pixel() {
    let settings = GibbsSettings { burn_in_sweeps: 10, sweeps_between_samples: 2, rng_seed: 41 };
    let images = gibbs_sample(ImageDims::new(64, 64).unwrap(), IsingParams::new(0.0).unwrap(), settings, 4);
    let table = train_context_table(&images, 4).unwrap();
    for spec in [
        SchemeSpec::Model0 { n_rows: 3 },
        SchemeSpec::Model1 { n_rows: 5 },
        SchemeSpec::Rcc02 { line_rows: 2, strip_rows: 3 },
    ] {
        for img in &images {
            assert!((measure(img, spec, &FixedTheta(0.0), None).unwrap().ideal_bpp() - 1.0).abs() < 1e-12);
        }
    }
    let mean: f64 = images
        .iter()
        .map(|im| measure(im, SchemeSpec::Empirical1 { context: 4 }, &FixedTheta(0.0), Some(&table)).unwrap().ideal_bpp())
        .sum::<f64>()
        / images.len() as f64;
    assert!((mean - 1.0).abs() < 0.01, "{mean}");
}

#[test]
fn damaged_streams_are_errors() {
    let settings = GibbsSettings { burn_in_sweeps: 50, sweeps_between_samples: 5, rng_seed: 42 };
    let img = &gibbs_sample(ImageDims::new(40, 30).unwrap(), IsingParams::new(0.4).unwrap(), settings, 1)[0];
    let bytes = encode(img, SchemeSpec::Model1 { n_rows: 3 }, 0.4, &FixedTheta(0.45), None, false).unwrap().to_bytes();
    for cut in [0, 4, 20, 47, bytes.len() / 2, bytes.len() - 1] {
        assert!(decode(&bytes[..cut], None).is_err(), "cut at {cut}");
    }
    let mut bad_magic = bytes.clone();
    bad_magic[0] ^= 0xff;
    assert!(matches!(decode(&bad_magic, None), Err(Error::Bitstream(_))));
    // an empirical stream without a table, embedded or supplied
    let table = train_context_table([img], 2).unwrap();
    let bare = encode(img, SchemeSpec::Empirical1 { context: 2 }, 0.4, &FixedTheta(0.0), Some(&table), false).unwrap().to_bytes();
    assert!(decode(&bare, None).is_err());
    assert_eq!(decode(&bare, Some(&table)).unwrap().0, *img);
}

fn spec_strategy() -> impl Strategy<Value = SchemeSpec> {
    prop_oneof![
        (1usize..=6).prop_map(|n| SchemeSpec::Model0 { n_rows: n }),
        (1usize..=6).prop_map(|n| SchemeSpec::Model1 { n_rows: n }),
        (1usize..=5, 1usize..=5).prop_map(|(l, s)| SchemeSpec::Rcc02 { line_rows: l, strip_rows: s }),
        (1usize..=8).prop_map(|c| SchemeSpec::Empirical1 { context: c }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_image_round_trips(
        h in 1usize..=14,
        w in 1usize..=14,
        seed in any::<u64>(),
        spec in spec_strategy(),
        theta_star in 0.0f64..2.0,
        embed in any::<bool>(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dims = ImageDims::new(h, w).unwrap();
        let pixels = (0..h * w).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        let img = BinaryImage::from_spins(dims, pixels).unwrap();
        let table = match spec {
            SchemeSpec::Empirical1 { context } => Some(train_context_table([&img], context).unwrap()),
            _ => None,
        };
        let enc = encode(&img, spec, 0.3, &FixedTheta(theta_star), table.as_ref(), embed).unwrap();
        let (back, report) = decode(&enc.to_bytes(), table.as_ref()).unwrap();
        prop_assert_eq!(&back, &img);
        prop_assert!((report.tally.model_bits - enc.report.tally.model_bits).abs() < 1e-9);
        // the shortest terminating value may undercut the quantized code
        // length by less than a byte
        prop_assert!(report.coded_bits as f64 + 8.0 >= report.tally.quantized_bits);
    }
}
