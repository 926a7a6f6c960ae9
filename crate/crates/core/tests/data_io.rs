mod common;

use std::io::Write;

use proptest::prelude::*;
use qfl::data::{
    downsample, load_mnist, load_wdbc, mnist_binary, mnist_dataset, mnist_selection, parse_idx, parse_wdbc,
    read_cache, wdbc_dataset, write_cache, write_idx, write_wdbc, Diagnosis, Downsample, IdxArray, RawImage,
    WdbcRecord, WdbcScaler, IMAGES_MAGIC, LABELS_MAGIC, N_FEATURES, PIXELS,
};
use qfl::Error;

fn idx_bytes(magic: u32, dims: &[u32], payload: &[u8]) -> Vec<u8> {
    let mut b = magic.to_be_bytes().to_vec();
    for d in dims {
        b.extend_from_slice(&d.to_be_bytes());
    }
    b.extend_from_slice(payload);
    b
}

fn gzip(bytes: &[u8]) -> Vec<u8> {
    let mut e = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
    e.write_all(bytes).unwrap();
    e.finish().unwrap()
}

#[test]
fn scripted_idx_files_load() {
    let dir = tempfile::tempdir().unwrap();
    let mut pixels = vec![0u8; 2 * PIXELS];
    pixels[0] = 255;
    pixels[PIXELS + 783] = 17;
    let images = idx_bytes(IMAGES_MAGIC, &[2, 28, 28], &pixels);
    let labels = idx_bytes(LABELS_MAGIC, &[2], &[1, 9]);
    std::fs::write(dir.path().join("img"), &images).unwrap();
    std::fs::write(dir.path().join("lbl.gz"), gzip(&labels)).unwrap();
    let loaded = load_mnist(&dir.path().join("img"), &dir.path().join("lbl.gz")).unwrap();
    assert_eq!(loaded.len(), 2);
    assert_eq!((loaded[0].label, loaded[1].label), (1, 9));
    assert_eq!(loaded[0].pixels()[0], 255);
    assert_eq!(loaded[1].pixels()[783], 17);
}

#[test]
fn malformed_idx_is_rejected() {
    let p = std::path::Path::new("x");
    let good = idx_bytes(LABELS_MAGIC, &[3], &[1, 2, 3]);
    assert!(parse_idx(&good, LABELS_MAGIC, p).is_ok());
    assert!(matches!(parse_idx(&good, IMAGES_MAGIC, p), Err(Error::Idx { .. })));
    assert!(matches!(parse_idx(&good[..good.len() - 1], LABELS_MAGIC, p), Err(Error::Idx { .. })));
    assert!(matches!(parse_idx(&good[..6], LABELS_MAGIC, p), Err(Error::Idx { .. })));
    let long = idx_bytes(LABELS_MAGIC, &[3], &[1, 2, 3, 4]);
    assert!(matches!(parse_idx(&long, LABELS_MAGIC, p), Err(Error::Idx { .. })));
}

proptest! {
    #[test]
    fn idx_round_trip(dims in prop::collection::vec(1usize..5, 1..4), seed in any::<u8>()) {
        let n: usize = dims.iter().product();
        let data: Vec<u8> = (0..n).map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed)).collect();
        let array = IdxArray { dims: dims.clone(), data };
        let mut bytes = Vec::new();
        write_idx(&mut bytes, &array).unwrap();
        let magic = 0x0800 | dims.len() as u32;
        prop_assert_eq!(parse_idx(&bytes, magic, std::path::Path::new("x")).unwrap(), array);
    }

    #[test]
    fn area_average_matches_supersampling(pixels in prop::collection::vec(any::<u8>(), PIXELS)) {
        let img = RawImage::new(pixels.clone(), 1).unwrap();
        let got = downsample(&img, Downsample::AreaAverage);
        // 28·4 = 16·7: each output pixel is the mean of a 7×7 block of the 4× upsampled image.
        let fine = |r: usize, c: usize| pixels[(r / 4) * 28 + c / 4] as f64 / 255.0;
        for orow in 0..16 {
            for ocol in 0..16 {
                let mut acc = 0.0;
                for r in 7 * orow..7 * orow + 7 {
                    for c in 7 * ocol..7 * ocol + 7 {
                        acc += fine(r, c);
                    }
                }
                prop_assert!((got[orow * 16 + ocol] - acc / 49.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pool_pad_matches_block_means(pixels in prop::collection::vec(any::<u8>(), PIXELS)) {
        let img = RawImage::new(pixels.clone(), 9).unwrap();
        let got = downsample(&img, Downsample::PoolPad);
        for r in 0..16 {
            for c in 0..16 {
                let want = if r == 0 || c == 0 || r == 15 || c == 15 {
                    0.0
                } else {
                    let (r0, c0) = (2 * (r - 1), 2 * (c - 1));
                    [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|(a, b)| pixels[(r0 + a) * 28 + c0 + b] as f64).sum::<f64>() / (4.0 * 255.0)
                };
                prop_assert!((got[r * 16 + c] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wdbc_text_round_trip(rows in prop::collection::vec((any::<bool>(), prop::collection::vec(0.0f64..5000.0, N_FEATURES)), 1..8)) {
        let records: Vec<WdbcRecord> = rows
            .iter()
            .enumerate()
            .map(|(i, (m, f))| WdbcRecord {
                id: format!("{}", 842302 + i),
                diagnosis: if *m { Diagnosis::Malignant } else { Diagnosis::Benign },
                features: f.clone().try_into().unwrap(),
            })
            .collect();
        let mut text = Vec::new();
        write_wdbc(&mut text, &records).unwrap();
        prop_assert_eq!(parse_wdbc(text.as_slice()).unwrap(), records.clone());
        let scaler = WdbcScaler::fit(&records).unwrap();
        for r in &records {
            prop_assert!(scaler.scale(r).iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}

#[test]
fn wdbc_errors_name_the_line() {
    let good = format!("1,M{}\n", ",1.0".repeat(N_FEATURES));
    let bad = format!("{good}\n2,X{}\n", ",1.0".repeat(N_FEATURES));
    match parse_wdbc(bad.as_bytes()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
    let short = "3,B,1.0,2.0\n";
    assert!(matches!(parse_wdbc(short.as_bytes()), Err(Error::Parse { line: 1, .. })));
}

#[test]
fn bundled_files_have_the_canonical_counts() {
    let dir = common::data_dir();
    let records = load_wdbc(&dir.join("wdbc.data")).unwrap();
    assert_eq!(records.len(), 569);
    assert_eq!(records.iter().filter(|r| r.diagnosis == Diagnosis::Malignant).count(), 212);
    let mnist = dir.join("mnist");
    let test = load_mnist(
        &mnist.join("t10k-images-idx3-ubyte.gz"),
        &mnist.join("t10k-labels-idx1-ubyte.gz"),
    )
    .unwrap();
    assert_eq!(test.len(), 10000);
}

#[test]
fn mnist_split_is_balanced_and_cached_exactly() {
    let mnist = common::data_dir().join("mnist");
    let test = load_mnist(
        &mnist.join("t10k-images-idx3-ubyte.gz"),
        &mnist.join("t10k-labels-idx1-ubyte.gz"),
    )
    .unwrap();
    let (train_part, test_part) = test.split_at(5000);
    let ds = mnist_dataset(train_part, test_part, 101, 40, Downsample::AreaAverage, 3).unwrap();
    let count = |idx: &[usize], c| idx.iter().filter(|&&i| ds.samples[i].class() == c).count() as i64;
    assert_eq!(ds.train.len(), 101);
    assert!((count(&ds.train, 0) - count(&ds.train, 1)).abs() <= 1);
    assert_eq!(count(&ds.validation, 0), count(&ds.validation, 1));

    let (tr, va) = mnist_selection(train_part, test_part, 101, 40, Downsample::AreaAverage, 3).unwrap();
    assert_eq!(mnist_binary(&tr, Downsample::AreaAverage).unwrap(), ds.train_samples());
    assert_eq!(mnist_binary(&va, Downsample::AreaAverage).unwrap(), ds.validation_samples());

    let mut bytes = Vec::new();
    write_cache(&mut bytes, &ds).unwrap();
    assert_eq!(read_cache(bytes.as_slice()).unwrap(), ds);
    bytes.truncate(bytes.len() - 3);
    assert!(read_cache(bytes.as_slice()).is_err());
}

#[test]
fn wdbc_scaler_uses_training_rows_only() {
    let records = load_wdbc(&common::data_dir().join("wdbc.data")).unwrap();
    let ds = wdbc_dataset(&records, 0.8, 0).unwrap();
    assert_eq!((ds.train.len(), ds.validation.len()), (455, 114));
    assert_eq!(ds.n_qubits(), 6);
    // Every sample is a unit vector whose last 34 amplitudes are padding.
    for s in &ds.samples {
        let a = s.input.amplitudes();
        assert!(a[N_FEATURES..].iter().all(|x| x.norm() == 0.0));
        assert!(a.iter().all(|x| x.re >= 0.0 && x.im == 0.0));
    }
}
