/*
Copyright 2026 The distpd Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

use distpd::data::{
    parse_libsvm_str, partition, write_libsvm, ParseOptions, PartitionMode, Regime, SyntheticConfig,
    Target,
};
use distpd::linalg::FeatureMatrix;
use distpd::Error;
use proptest::prelude::*;

fn round_trip(x: &FeatureMatrix<f64>, y: &[f64]) -> (FeatureMatrix<f64>, Vec<f64>) {
    let mut buf = Vec::new();
    write_libsvm(&mut buf, x, y).unwrap();
    let opts = ParseOptions {
        dim: Some(x.rows()),
        normalize_labels: false,
    };
    let d = parse_libsvm_str(std::str::from_utf8(&buf).unwrap(), opts).unwrap();
    (d.x, d.labels)
}

fn sparse_value() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), any::<f64>().prop_filter("finite", |v| v.is_finite())]
}

proptest! {
    #[test]
    fn libsvm_round_trip_is_exact(
        (d, n, data, y) in (1usize..8, 1usize..10).prop_flat_map(|(d, n)| (
            Just(d),
            Just(n),
            prop::collection::vec(sparse_value(), d * n),
            prop::collection::vec(-1e6f64..1e6, n),
        ))
    ) {
        let x = FeatureMatrix::from_col_major(d, n, data).unwrap();
        let (x2, y2) = round_trip(&x, &y);
        prop_assert_eq!(x.as_col_major(), x2.as_col_major());
        prop_assert_eq!(y, y2);
    }

    #[test]
    fn partitions_cover_evenly(n in 1usize..200, k in 1usize..20, seed in any::<u64>(), shuffled in any::<bool>()) {
        prop_assume!(n >= k);
        let mode = if shuffled { PartitionMode::Shuffled } else { PartitionMode::Contiguous };
        let p = partition(n, k, seed, mode).unwrap();
        let mut all: Vec<usize> = p.blocks().iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let sizes = p.sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }
}

#[test]
fn synthetic_export_round_trips() {
    let ds = SyntheticConfig {
        n: 50,
        d: 7,
        workers: 5,
        regime: Regime::NonIid,
        target: Target::Dense,
        noise_std: 1.0,
        seed: 3,
    }
    .generate::<f64>()
    .unwrap();
    let (x, y) = round_trip(&ds.x, &ds.labels);
    assert_eq!(x, ds.x);
    assert_eq!(y, ds.labels);
}

#[test]
fn parse_examples() {
    let d = parse_libsvm_str("+1 1:0.5 3:2", ParseOptions::default()).unwrap();
    assert_eq!((d.x.rows(), d.x.cols()), (3, 1));
    assert_eq!(d.x.col(0), &[0.5, 0.0, 2.0]);
    let d = parse_libsvm_str("\u{2212}1\n+1 1:1\n", ParseOptions::default()).unwrap();
    assert_eq!(d.x.col(0), &[0.0]);
    assert_eq!(d.labels, vec![-1.0, 1.0]);
    let d = parse_libsvm_str("0 1:1\n1 2:1\n", ParseOptions::default()).unwrap();
    assert_eq!(d.labels, vec![-1.0, 1.0]);
    assert!(d.binary);
    let d = parse_libsvm_str("2.5 1:1\n-0.5 2:1\n", ParseOptions::default()).unwrap();
    assert_eq!(d.labels, vec![2.5, -0.5]);
    assert!(!d.binary);
    let d = parse_libsvm_str("1 2:1\n", ParseOptions { dim: Some(5), normalize_labels: true }).unwrap();
    assert_eq!(d.x.rows(), 5);
}

#[test]
fn malformed_lines_carry_line_numbers() {
    let cases = [
        ("1 1:1\n1 0:2\n", 2),
        ("1 1:1\n\n1 3:1 2:1\n", 3),
        ("1 2:1 2:1\n", 1),
        ("abc 1:1\n", 1),
        ("1 1:1\n1 1:x\n", 2),
        ("1 1:1\n1 1:1\n1 2\n", 3),
        ("1 1:nan\n", 1),
    ];
    for (text, line) in cases {
        match parse_libsvm_str(text, ParseOptions::default()) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: expected parse error, got {other:?}"),
        }
    }
    // an override below the largest index is rejected, as a whole-file error
    let r = parse_libsvm_str("1 4:1\n", ParseOptions { dim: Some(3), normalize_labels: true });
    assert!(matches!(r, Err(Error::InvalidData(_))));
}

#[test]
fn partition_examples() {
    let p = partition(10, 3, 0, PartitionMode::Contiguous).unwrap();
    assert_eq!(p.sizes(), vec![4, 3, 3]);
    let p = partition(6, 6, 0, PartitionMode::Shuffled).unwrap();
    assert!(p.sizes().iter().all(|&s| s == 1));
    assert!(partition(2, 3, 0, PartitionMode::Contiguous).is_err());
}

#[test]
fn synthetic_generation_is_reproducible() {
    let cfg = SyntheticConfig {
        n: 200,
        d: 20,
        workers: 4,
        regime: Regime::NonIid,
        target: Target::Sparse,
        noise_std: 1.0,
        seed: 99,
    };
    let a = cfg.generate::<f64>().unwrap();
    let b = cfg.generate::<f64>().unwrap();
    assert_eq!(a.x, b.x);
    assert_eq!(a.labels, b.labels);
    let c = SyntheticConfig { seed: 100, ..cfg }.generate::<f64>().unwrap();
    assert_ne!(a.x, c.x);
    // d < 100 shrinks the sparse support, with a warning
    assert!(a.w_star.iter().all(|&w| w == 1.0));
    assert!(!a.warnings.is_empty());
}

#[test]
fn iid_feature_variance_decays_quadratically() {
    let ds = SyntheticConfig {
        n: 100_000,
        d: 6,
        workers: 1,
        regime: Regime::Iid,
        target: Target::Dense,
        noise_std: 1.0,
        seed: 5,
    }
    .generate::<f64>()
    .unwrap();
    let n = 100_000.0;
    for j in 0..6 {
        let var: f64 = (0..100_000).map(|i| ds.x.get(j, i).powi(2)).sum::<f64>() / n;
        let scaled = var * ((j + 1) as f64).powi(2);
        assert!((scaled - 1.0).abs() < 0.1, "feature {j}: {scaled}");
    }
}

#[test]
fn non_iid_mixture_has_expected_second_moment() {
    // thirds of N(0,1), t(5) and U[−5,5]: variances 1, 5/3 and 25/3
    let ds = SyntheticConfig {
        n: 60_000,
        d: 3,
        workers: 3,
        regime: Regime::NonIid,
        target: Target::Dense,
        noise_std: 1.0,
        seed: 6,
    }
    .generate::<f64>()
    .unwrap();
    let want = (1.0 + 5.0 / 3.0 + 25.0 / 3.0) / 3.0;
    let all = ds.x.as_col_major();
    let m2 = all.iter().map(|v| v * v).sum::<f64>() / all.len() as f64;
    assert!((m2 / want - 1.0).abs() < 0.1, "{m2} vs {want}");
    // the residual noise has unit variance
    let res: f64 = (0..60_000)
        .map(|i| {
            let fit: f64 = ds.x.col(i).iter().zip(&ds.w_star).map(|(a, b)| a * b).sum();
            (ds.labels[i] - fit).powi(2)
        })
        .sum::<f64>()
        / 60_000.0;
    assert!((res - 1.0).abs() < 0.05);
}

#[test]
fn full_scale_configuration_builds_and_splits_evenly() {
    let ds = SyntheticConfig::default().generate::<f64>().unwrap();
    assert_eq!((ds.meta.n, ds.meta.d, ds.meta.workers), (3000, 500, 30));
    let p = ds
        .instance(
            distpd::problems::LossKind::Squared,
            distpd::problems::RegularizerSpec::ridge(1.0 / 3000.0).unwrap(),
        )
        .unwrap();
    assert!(p.partition().sizes().iter().all(|&s| s == 100));
}

#[test]
fn invalid_synthetic_configs_are_rejected() {
    let base = SyntheticConfig::default();
    assert!(SyntheticConfig { d: 0, ..base }.generate::<f64>().is_err());
    assert!(SyntheticConfig { n: 5, workers: 6, ..base }.generate::<f64>().is_err());
    assert!(SyntheticConfig { noise_std: -1.0, ..base }.generate::<f64>().is_err());
}
