mod common;

use common::*;
use wvrecon::bins::BinLayout;
use wvrecon::coupler::ExactStatistics;
use wvrecon::sampler::{bin_records, detect_gaps, sample_joint, JointSampler};
use wvrecon::state::StateDescriptor;

fn pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .unwrap()
}

#[test]
fn zero_runs_and_determinism() {
    let joint = joint(&StateDescriptor::asymmetric_pair(), 0.05);
    assert!(sample_joint(&joint, 0, 7).is_empty());
    let a = sample_joint(&joint, 50_000, 7);
    let b = sample_joint(&joint, 50_000, 7);
    assert_eq!(a, b);
    assert_ne!(a, sample_joint(&joint, 50_000, 8));
}

#[test]
fn records_are_independent_of_thread_count() {
    let joint = joint(&StateDescriptor::asymmetric_pair(), 0.05);
    let sampler = JointSampler::new(&joint);
    let n = 3 * (1 << 14) + 123;
    let one = pool(1).install(|| sampler.sample(n, 42));
    let four = pool(4).install(|| sampler.sample(n, 42));
    assert_eq!(one, four);
    let prefix = sampler.sample(1 << 14, 42);
    assert_eq!(&one[..prefix.len()], &prefix[..]);
}

#[test]
fn records_stay_inside_the_grid() {
    let joint = joint(&StateDescriptor::odd_cat(), 0.05);
    let g = grid();
    for r in sample_joint(&joint, 100_000, 3) {
        assert!(r.p >= g.x_min() && r.p <= g.x_max());
        assert!(r.x >= g.x_min() && r.x <= g.x_max());
    }
}

#[test]
fn vacuum_moments() {
    let joint = joint(&StateDescriptor::vacuum(), 0.05);
    let n = 1_000_000;
    let recs = sample_joint(&joint, n, 11);
    let nf = n as f64;
    let mean = recs.iter().map(|r| r.p).sum::<f64>() / nf;
    let var = recs.iter().map(|r| (r.p - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let sigma = 0.5f64.sqrt();
    assert!(mean.abs() < 4.0 * sigma / nf.sqrt(), "mean {mean}");
    assert!((var - 0.5).abs() < 0.01, "variance {var}");
}

#[test]
fn estimators_are_consistent_with_exact_statistics() {
    let joint = joint(&StateDescriptor::asymmetric_pair(), 0.05);
    let exact = ExactStatistics::new(&joint);
    let n = 1_000_000;
    let binned = bin_records(&sample_joint(&joint, n, 19), 0.1, 0.0, &grid()).unwrap();
    assert_eq!(binned.counts.iter().sum::<u64>(), n as u64);
    let layout = &binned.layout;
    let w = layout.width();
    let mut tested = 0;
    for k in 0..layout.len() {
        let (lo, hi) = (layout.lower_edge(k), layout.upper_edge(k));
        let prob = exact.bin_probability(lo, hi);
        let expected = prob * n as f64;
        if expected < 100.0 {
            continue;
        }
        tested += 1;
        let count = binned.counts[k] as f64;
        let z = (count - expected) / (expected * (1.0 - prob)).sqrt();
        assert!(z.abs() < 5.0, "bin {k}: count z = {z}");
        assert!((binned.p_hat[k] - count / (n as f64 * w)).abs() < 1e-15);

        let e_exact = exact.meter_mean(lo, hi).unwrap();
        let e = binned.e_hat[k].unwrap();
        let se = binned.stderr[k].unwrap();
        assert!(
            ((e - e_exact) / se).abs() < 5.0,
            "bin {k}: mean z = {}",
            (e - e_exact) / se
        );
        if expected >= 1e4 {
            assert!((binned.p_hat[k] * w / prob - 1.0).abs() < 0.05);
        }
    }
    assert!(tested > 30);
}

#[test]
fn stderr_scaling() {
    let joint = joint(&StateDescriptor::asymmetric_pair(), 0.05);
    let exact = ExactStatistics::new(&joint);
    let binned = bin_records(&sample_joint(&joint, 1_000_000, 5), 0.1, 0.0, &grid()).unwrap();
    let layout = &binned.layout;
    let (mut low, mut n_low, mut high, mut n_high) = (0.0, 0, 0.0, 0);
    for k in 0..layout.len() {
        let c = binned.counts[k];
        if c < 10 {
            continue;
        }
        let se = binned.stderr[k].unwrap();
        if c >= 100 {
            // Conditional meter spread stays near the vacuum value 1/√2.
            let s = se * (c as f64).sqrt();
            assert!((s - 0.5f64.sqrt()).abs() < 0.1, "bin {k}: {s}");
        }
        let dev = (binned.e_hat[k].unwrap()
            - exact
                .meter_mean(layout.lower_edge(k), layout.upper_edge(k))
                .unwrap())
        .abs();
        if c < 1000 {
            low += dev;
            n_low += 1;
        } else if c >= 10_000 {
            high += dev;
            n_high += 1;
        }
    }
    assert!(n_low > 0 && n_high > 0);
    assert!(low / n_low as f64 > high / n_high as f64);
}

#[test]
fn asymmetric_pair_has_no_central_gaps() {
    let d = StateDescriptor::asymmetric_pair();
    let joint = joint(&d, 0.05);
    let exact = ExactStatistics::new(&joint);
    let layout = BinLayout::covering(&grid(), 0.1, 0.0).unwrap();
    for seed in 0..5 {
        let binned = bin_records(&sample_joint(&joint, 100_000, seed), 0.1, 0.0, &grid()).unwrap();
        for k in 0..layout.len() {
            let centre = layout.center(k);
            if centre.abs() <= 2.5 {
                let expected =
                    exact.bin_probability(layout.lower_edge(k), layout.upper_edge(k)) * 1e5;
                assert!(expected > 5.0, "P = {centre}");
                assert!(!binned.gap_flags[k], "seed {seed}: gap at {centre}");
                assert!(binned.counts[k] > 0);
            }
        }
    }
}

#[test]
fn odd_cat_splits_into_two_half_axes() {
    let joint = joint(&StateDescriptor::odd_cat(), 0.05);
    let n = 100_000;
    for seed in 0..5 {
        let binned = bin_records(&sample_joint(&joint, n, seed), 0.1, 0.0, &grid()).unwrap();
        let layout = &binned.layout;
        assert!(
            (0..layout.len()).any(|k| binned.gap_flags[k] && layout.center(k).abs() < 0.3),
            "seed {seed}: no gap near the origin"
        );
        let macroscopic: Vec<_> = detect_gaps(&binned)
            .into_iter()
            .filter(|s| {
                let c: u64 = binned.counts[s.first..=s.last].iter().sum();
                c as f64 >= 0.01 * n as f64
            })
            .collect();
        assert_eq!(macroscopic.len(), 2, "seed {seed}");
        assert!(layout.upper_edge(macroscopic[0].last) <= 1e-12);
        assert!(layout.lower_edge(macroscopic[1].first) >= -1e-12);
    }
}

#[test]
fn empty_input_has_no_segments() {
    let binned = bin_records(&[], 0.1, 0.0, &grid()).unwrap();
    assert!(binned.counts.iter().all(|&c| c == 0));
    assert!(binned.p_hat.iter().all(|&p| p == 0.0));
    assert!(binned.e_hat.iter().all(Option::is_none));
    assert!(detect_gaps(&binned).is_empty());
}
