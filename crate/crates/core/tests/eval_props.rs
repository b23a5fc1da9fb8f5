use eegpnn_core::ensemble::TiePolicy;
use eegpnn_core::eval::{
    build_dataset, config_sweep, feature_study, fold_model, loocv_channel, loocv_voted,
    FeatureDataset, FeatureSelection, FrameFeatures,
};
use eegpnn_core::features::{ExtractionConfig, FeatureVector, Normalizer, SpectralBandSpec};
use eegpnn_core::ingest::{synthesize, SynthSpec};
use eegpnn_core::signal::Label;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Dataset of hand-made feature vectors. `make(rng, channel, class)` fills
/// one channel's vector for a frame of the given class.
fn fake_dataset(
    seed: u64,
    n_channels: usize,
    per_class: usize,
    mut make: impl FnMut(&mut ChaCha8Rng, usize, usize) -> (Vec<f64>, [f64; 4]),
) -> FeatureDataset {
    let config = ExtractionConfig::default();
    let id = config.fingerprint();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frames = Vec::new();
    for class in [0, 1] {
        let label = Label::from_class_index(class).unwrap();
        for i in 0..per_class {
            let vectors = (0..n_channels)
                .map(|c| {
                    let (rir, [pfd, hfd, mobility, complexity]) = make(&mut rng, c, class);
                    FeatureVector {
                        rir,
                        pfd,
                        hfd,
                        mobility,
                        complexity,
                        config_id: id.clone(),
                    }
                })
                .collect();
            frames.push(FrameFeatures {
                subject_id: format!("{label}-{i}"),
                frame_index: 0,
                label,
                vectors,
            });
        }
    }
    FeatureDataset {
        channels: (0..n_channels).map(|c| format!("ch{c}")).collect(),
        config,
        sample_rate_hz: 200.0,
        frames,
    }
}

fn noise_rir(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..30).map(|_| gauss(rng)).collect()
}

#[test]
fn folds_exclude_the_held_out_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<Vec<f64>> = (0..25)
        .map(|_| (0..4).map(|_| gauss(&mut rng)).collect())
        .collect();
    let y: Vec<usize> = (0..25).map(|i| i % 2).collect();
    for i in 0..x.len() {
        let model = fold_model(&x, &y, i, 0.5).unwrap();
        assert_eq!(model.n_exemplars(), 24);
        let others: Vec<&Vec<f64>> = x
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|p| p.1)
            .collect();
        assert_eq!(model.normalizer(), &Normalizer::fit(&others).unwrap());
        assert!(!model
            .weights()
            .contains(&model.normalizer().apply(&x[i]).unwrap()));
    }
}

#[test]
fn pure_noise_scores_chance() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let x: Vec<Vec<f64>> = (0..200)
        .map(|_| (0..6).map(|_| gauss(&mut rng)).collect())
        .collect();
    let mut y: Vec<usize> = (0..200).map(|i| i % 2).collect();
    let mut total = 0.0;
    for _ in 0..20 {
        y.shuffle(&mut rng);
        total += loocv_channel(&x, &y, 0.5).unwrap().accuracy;
    }
    let mean = total / 20.0;
    assert!((mean - 0.5).abs() <= 0.1, "mean accuracy {mean}");
}

#[test]
fn vote_beats_average_channel() {
    for seed in 0..10 {
        // 12 channels carry a unit mean shift in PFD, 10 carry nothing
        let data = fake_dataset(seed, 22, 30, |rng, c, class| {
            let shift = if c < 12 { class as f64 } else { 0.0 };
            let fds = [gauss(rng) + shift, gauss(rng), gauss(rng), gauss(rng)];
            (noise_rir(rng), fds)
        });
        let result = loocv_voted(
            &data,
            FeatureSelection::new(false, true, false),
            1.0,
            TiePolicy::default(),
        )
        .unwrap();
        let report = &result.report;
        assert!(
            report.voted_accuracy > report.mean_channel_accuracy(),
            "seed {seed}: voted {} vs mean {}",
            report.voted_accuracy,
            report.mean_channel_accuracy()
        );
    }
}

#[test]
fn unanimous_channels_are_perfect_under_any_tie_policy() {
    let data = fake_dataset(5, 4, 10, |rng, _, class| {
        let v = 10.0 * class as f64 + 0.1 * gauss(rng);
        (vec![1.0 / 30.0; 30], [v, v, v, v])
    });
    for tie in [
        TiePolicy::FavorPositive,
        TiePolicy::FavorNegative,
        TiePolicy::LowestIndex,
    ] {
        let r = loocv_voted(&data, FeatureSelection::ALL, 0.1, tie).unwrap();
        assert_eq!(r.report.voted_accuracy, 1.0);
        assert_eq!(r.report.sensitivity, 1.0);
        assert_eq!(r.report.specificity, 1.0);
        assert_eq!(r.report.confusion.total(), 20);
    }
}

#[test]
fn spectral_difference_favours_rir_columns() {
    let data = fake_dataset(9, 3, 20, |rng, _, class| {
        let mut rir: Vec<f64> = (0..30).map(|_| 1.0 + 0.2 * gauss(rng)).collect();
        rir[8 + class * 10] += 1.5;
        let total: f64 = rir.iter().sum();
        rir.iter_mut().for_each(|v| *v /= total);
        (rir, [gauss(rng), gauss(rng), gauss(rng), gauss(rng)])
    });
    let combos = FeatureSelection::all_combinations();
    let study = feature_study(&data, &combos, 0.5).unwrap();
    assert_eq!(study.accuracy.len(), 3);
    assert!(study.accuracy.iter().all(|row| row.len() == 7));
    let col = |s: FeatureSelection| combos.iter().position(|&c| c == s).unwrap();
    let rir = study.column_means[col(FeatureSelection::new(true, false, false))];
    let hjorth = study.column_means[col(FeatureSelection::new(false, false, true))];
    assert!(rir > hjorth + 0.2, "rir {rir} hjorth {hjorth}");
}

fn small_cohort(spike_band: (f64, f64)) -> Vec<eegpnn_core::Recording> {
    let mut out = Vec::new();
    for s in 0..3u64 {
        for spec in [
            SynthSpec::healthy(100 + s),
            SynthSpec::epileptic(200 + s, 0.5),
        ] {
            let spec = SynthSpec {
                duration_s: 90.0,
                n_channels: 3,
                spike_band_hz: spike_band,
                ..spec
            };
            out.push(synthesize(&spec).unwrap());
        }
    }
    out
}

#[test]
fn sweep_is_deterministic_and_records_failures() {
    let recordings = small_cohort((15.0, 50.0));
    let band = SpectralBandSpec::new(2.0, 32.0, 1.0);
    let configs = vec![
        ExtractionConfig::new(4096, 40.0, band),
        ExtractionConfig::new(4096, 120.0, band),
        ExtractionConfig::new(8192, 56.0, band),
    ];
    let a = config_sweep(
        &recordings,
        &configs,
        FeatureSelection::ALL,
        0.1,
        TiePolicy::default(),
    );
    let b = config_sweep(
        &recordings,
        &configs,
        FeatureSelection::ALL,
        0.1,
        TiePolicy::default(),
    );
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    assert_eq!(a.reports.len(), 2);
    assert_eq!(a.failures.len(), 1);
    assert_eq!(a.failures[0].config.filter.cutoff_hz, 120.0);
    assert_eq!(a.grid, configs);
}

#[test]
fn cutoff_above_spike_band_barely_matters() {
    let recordings = small_cohort((15.0, 28.0));
    let band = SpectralBandSpec::new(2.0, 32.0, 1.0);
    let acc = |cutoff| {
        let data = build_dataset(&recordings, &ExtractionConfig::new(4096, cutoff, band)).unwrap();
        loocv_voted(&data, FeatureSelection::ALL, 0.1, TiePolicy::default())
            .unwrap()
            .report
            .voted_accuracy
    };
    let (low, high) = (acc(40.0), acc(66.0));
    assert!((low - high).abs() <= 0.03, "40 Hz: {low}, 66 Hz: {high}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn masked_loocv_matches_naive_retraining(
        seed in 0u64..10_000,
        q in 4usize..=60,
        r in 1usize..6,
        spread in 0.05f64..2.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Vec<f64>> = (0..q).map(|_| (0..r).map(|_| gauss(&mut rng)).collect()).collect();
        let mut y: Vec<usize> = (0..q).map(|i| i % 2).collect();
        y.shuffle(&mut rng);
        let fast = loocv_channel(&x, &y, spread).unwrap();
        for i in 0..q {
            let naive = fold_model(&x, &y, i, spread).unwrap().classify(&x[i]).unwrap().class;
            prop_assert_eq!(fast.predictions[i], naive, "fold {}", i);
        }
        let correct = y.iter().zip(&fast.predictions).filter(|(a, b)| a == b).count();
        prop_assert_eq!(fast.accuracy, correct as f64 / q as f64);
    }
}
