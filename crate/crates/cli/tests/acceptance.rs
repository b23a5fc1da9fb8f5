//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p eegpnn-cli --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use common::{ok, s};
use eegpnn_core::eval::{fold_model, loocv_channel};
use eegpnn_core::features::{
    fft_magnitudes, higuchi_fd, hjorth_params, petrosian_fd, power_spectral_intensity,
    relative_intensity_ratio, SpectralBandSpec,
};
use eegpnn_core::{ChannelEnsemble, PnnModel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn check(cond: bool, detail: String) -> Verdict {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: u64, detail: String) -> Verdict {
    check(
        elapsed.as_secs_f64() < limit_s as f64,
        format!(
            "{detail}; {:.1} s (limit {limit_s} s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

// ---- 1 ----------------------------------------------------------------

fn naive_dft(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &v) in x.iter().enumerate() {
                let a = -2.0 * PI * ((k * t) % n) as f64 / n as f64;
                re += v * a.cos();
                im += v * a.sin();
            }
            re.hypot(im)
        })
        .collect()
}

fn fft_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = 2 + i % 127;
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let scale: f64 = x.iter().map(|v| v.abs()).sum();
        for (a, b) in fft_magnitudes(&x).unwrap().iter().zip(naive_dft(&x)) {
            worst = worst.max((a - b).abs() / b.max(scale));
        }
    }
    let detail = format!("200 signals, N in 2..=128, worst relative error {worst:.1e}");
    check(worst <= 1e-9, detail.clone()).and_then(|d| within(start.elapsed(), 10, d))
}

// ---- 2 ----------------------------------------------------------------

fn fractal_oracles() -> Verdict {
    let start = Instant::now();
    let constant = vec![3.5; 4096];
    let ramp: Vec<f64> = (0..4096).map(|i| 0.25 * i as f64 - 7.0).collect();
    let mut failures = Vec::new();
    for (name, x) in [("constant", &constant), ("ramp", &ramp)] {
        let pfd = petrosian_fd(x).unwrap();
        let hfd = higuchi_fd(x, 5).unwrap();
        if pfd != 1.0 {
            failures.push(format!("{name} PFD {pfd}"));
        }
        if (hfd - 1.0).abs() > 1e-3 {
            failures.push(format!("{name} HFD {hfd}"));
        }
    }
    let mean = (0..100u64)
        .map(|seed| higuchi_fd(&gaussian(&mut ChaCha8Rng::seed_from_u64(seed), 4096), 5).unwrap())
        .sum::<f64>()
        / 100.0;
    if (mean - 2.0).abs() > 0.1 {
        failures.push(format!("white-noise HFD {mean}"));
    }
    let detail = format!("constant/ramp PFD = 1, HFD = 1; white-noise mean HFD {mean:.4}");
    if failures.is_empty() {
        within(start.elapsed(), 30, detail)
    } else {
        Err(failures.join("; "))
    }
}

// ---- 3 ----------------------------------------------------------------

fn hjorth_oracle() -> Verdict {
    let mut lines = Vec::new();
    let mut pass = true;
    for r in [0.01, 0.05, 0.1] {
        let x: Vec<f64> = (0..8192)
            .map(|i| (2.0 * PI * r * i as f64 + 0.4).sin())
            .collect();
        let (m, c) = hjorth_params(&x).unwrap();
        let expected = 2.0 * (PI * r).sin();
        let (em, ec) = ((m / expected - 1.0).abs(), (c - 1.0).abs());
        pass &= em < 0.01 && ec < 0.02;
        lines.push(format!(
            "f/fs={r}: mobility err {:.3}%, complexity err {:.3}%",
            100.0 * em,
            100.0 * ec
        ));
    }
    check(pass, lines.join(", "))
}

// ---- 4 ----------------------------------------------------------------

fn rir_normalization() -> Verdict {
    let bands: Vec<SpectralBandSpec> = ["2:32:1", "2:34:2", "2:34.5:2.5"]
        .iter()
        .map(|b| b.parse().unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut dims = [0usize; 3];
    for _ in 0..1000 {
        let x = gaussian(&mut rng, 4096);
        let mags = fft_magnitudes(&x).unwrap();
        for (i, band) in bands.iter().enumerate() {
            let rir =
                relative_intensity_ratio(&power_spectral_intensity(&mags, band, 200.0).unwrap())
                    .unwrap();
            worst = worst.max((rir.iter().sum::<f64>() - 1.0).abs());
            dims[i] = rir.len();
        }
    }
    check(
        worst <= 1e-9 && dims == [30, 16, 13],
        format!("1000 segments x 3 settings, max |sum - 1| {worst:.1e}, dimensions {dims:?}"),
    )
}

// ---- 5, 6 -------------------------------------------------------------

fn blobs(rng: &mut ChaCha8Rng, q: usize, r: usize, k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let centres: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..r).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let labels: Vec<usize> = (0..q).map(|_| rng.random_range(0..k)).collect();
    let x = labels
        .iter()
        .map(|&c| {
            centres[c]
                .iter()
                .map(|m| m + 1.5 * rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    (x, labels)
}

/// Brute-force Gaussian-kernel Bayes classifier on z-scored data.
fn parzen(x: &[Vec<f64>], y: &[usize], k: usize, spread: f64, probe: &[f64]) -> usize {
    let n = x.len() as f64;
    let r = x[0].len();
    let mean: Vec<f64> = (0..r)
        .map(|j| x.iter().map(|v| v[j]).sum::<f64>() / n)
        .collect();
    let sd: Vec<f64> = (0..r)
        .map(|j| (x.iter().map(|v| (v[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt())
        .collect();
    let z = |v: &[f64]| -> Vec<f64> { (0..r).map(|j| (v[j] - mean[j]) / sd[j]).collect() };
    let p = z(probe);
    let mut density = vec![0.0; k];
    let mut nearest = (f64::INFINITY, 0);
    for (v, &c) in x.iter().zip(y) {
        let d2: f64 = z(v).iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum();
        density[c] += (-d2 * std::f64::consts::LN_2 / (spread * spread)).exp();
        if d2 < nearest.0 || (d2 == nearest.0 && c < nearest.1) {
            nearest = (d2, c);
        }
    }
    if density.iter().all(|&d| d == 0.0) {
        return nearest.1;
    }
    (0..k).fold(0, |b, c| if density[c] > density[b] { c } else { b })
}

fn names(k: usize) -> Vec<String> {
    (0..k).map(|c| format!("c{c}")).collect()
}

fn parzen_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut agree, mut total) = (0, 0);
    let (mut nn_agree, mut nn_total) = (0, 0);
    for _ in 0..20 {
        let (x, y) = blobs(&mut rng, 50, 5, 3);
        let spread = rng.random_range(0.4..1.2);
        let model = PnnModel::train(&x, &y, names(3), spread).unwrap();
        let nn = PnnModel::train(&x, &y, names(3), 1e-3).unwrap();
        for _ in 0..100 {
            let probe: Vec<f64> = (0..5).map(|_| rng.random_range(-4.0..4.0)).collect();
            total += 1;
            agree += usize::from(
                model.classify(&probe).unwrap().class == parzen(&x, &y, 3, spread, &probe),
            );
            nn_total += 1;
            // spread -> 0 leaves only the nearest exemplar
            nn_agree += usize::from(
                nn.classify(&probe).unwrap().class == parzen(&x, &y, 3, 1e-300, &probe),
            );
        }
    }
    check(
        agree == total && nn_agree == nn_total,
        format!("Parzen agreement {agree}/{total}; nearest-neighbour limit {nn_agree}/{nn_total}"),
    )
}

fn incremental_update() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut agree, mut total) = (0, 0);
    let mut identical = true;
    for _ in 0..20 {
        let (x, y) = blobs(&mut rng, 40, 5, 3);
        let (extra, extra_y) = blobs(&mut rng, 5, 5, 3);
        let mut model = PnnModel::train(&x, &y, names(3), 0.7).unwrap();
        let (mut all_x, mut all_y) = (x.clone(), y.clone());
        for (v, &c) in extra.iter().zip(&extra_y) {
            model = model.add_exemplar(v, &format!("c{c}")).unwrap();
            all_x.push(v.clone());
            all_y.push(c);
        }
        let fresh = PnnModel::train(&all_x, &all_y, names(3), 0.7).unwrap();
        identical &= model == fresh;
        for _ in 0..5 {
            let probe: Vec<f64> = (0..5).map(|_| rng.random_range(-4.0..4.0)).collect();
            total += 1;
            agree +=
                usize::from(model.classify(&probe).unwrap() == fresh.classify(&probe).unwrap());
        }
    }
    check(
        agree == total && identical,
        format!("{agree}/{total} probe classifications identical; models identical: {identical}"),
    )
}

// ---- 7 ----------------------------------------------------------------

fn loocv_integrity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut same, mut folds) = (0, 0);
    for inst in 0..20 {
        let q = 4 + inst * 56 / 19;
        let x: Vec<Vec<f64>> = (0..q).map(|_| gaussian(&mut rng, 4)).collect();
        let mut y: Vec<usize> = (0..q).map(|i| i % 2).collect();
        y.shuffle(&mut rng);
        let spread = rng.random_range(0.1..1.5);
        let fast = loocv_channel(&x, &y, spread).unwrap();
        for i in 0..q {
            folds += 1;
            let naive = fold_model(&x, &y, i, spread)
                .unwrap()
                .classify(&x[i])
                .unwrap()
                .class;
            same += usize::from(naive == fast.predictions[i]);
        }
    }
    let x: Vec<Vec<f64>> = (0..200).map(|_| gaussian(&mut rng, 6)).collect();
    let mut y: Vec<usize> = (0..200).map(|i| i % 2).collect();
    let mut acc = 0.0;
    for _ in 0..20 {
        y.shuffle(&mut rng);
        acc += loocv_channel(&x, &y, 0.5).unwrap().accuracy / 20.0;
    }
    check(
        same == folds && (acc - 0.5).abs() <= 0.1,
        format!("{same}/{folds} folds identical to naive retraining; permutation-null accuracy {acc:.3}"),
    )
}

// ---- 8 ----------------------------------------------------------------

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn end_to_end(work: &Path) -> Verdict {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for seed in 1..=5u64 {
        let data = work.join(format!("e2e-{seed}"));
        let run = work.join(format!("e2e-{seed}-loocv"));
        ok(&[
            "gen",
            "--subjects",
            "6",
            "--classes",
            "both",
            "--seed",
            &seed.to_string(),
            "--out",
            s(&data),
        ]);
        ok(&[
            "loocv",
            "--manifest",
            s(&data.join("manifest.json")),
            "--out",
            s(&run),
            "--segment-length",
            "8192",
            "--cutoff",
            "56",
            "--band",
            "2:32:1",
            "--spread",
            "0.1",
        ]);
        let r = read_json(&run.join("loocv.json"));
        let voted = r["voted_accuracy"].as_f64().unwrap();
        let best = r["per_channel"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["accuracy"].as_f64().unwrap())
            .fold(0.0, f64::max);
        pass &= voted >= 0.95 && voted >= best - 0.02;
        lines.push(format!(
            "seed {seed}: voted {voted:.4}, best channel {best:.4}"
        ));
    }
    let detail = lines.join("; ");
    check(pass, detail).and_then(|d| within(start.elapsed(), 600, d))
}

// ---- 9 ----------------------------------------------------------------

fn sweep_reproduction(work: &Path) -> Verdict {
    let data = work.join("e2e-1");
    let manifest = data.join("manifest.json");
    let mut outputs = Vec::new();
    for jobs in ["1", "4"] {
        let out = work.join(format!("sweep-j{jobs}"));
        let stdout = ok(&[
            "--jobs",
            jobs,
            "sweep",
            "--manifest",
            s(&manifest),
            "--out",
            s(&out),
        ]);
        outputs.push((
            stdout,
            fs::read(out.join("sweep.json")).unwrap(),
            fs::read(out.join("sweep.txt")).unwrap(),
        ));
    }
    let doc: Value = serde_json::from_slice(&outputs[0].1).unwrap();
    let grid = doc["grid"].as_array().unwrap().len();
    let reports = doc["reports"].as_array().unwrap().len();
    let text = String::from_utf8(outputs[0].2.clone()).unwrap();
    let rows = text.lines().skip(1).filter(|l| l.contains('|')).count();
    let flagged = text.matches('*').count();
    check(
        outputs[0] == outputs[1] && grid == 18 && reports == 18 && rows == 6 && flagged == 1,
        format!(
            "{grid} configurations, {reports} completed, {rows} table rows x 3 band columns, best flagged {flagged}x; --jobs 1 and 4 byte-identical: {}",
            outputs[0] == outputs[1]
        ),
    )
}

// ---- 10 ---------------------------------------------------------------

fn determinism_and_serialization(work: &Path) -> Verdict {
    let mut notes = Vec::new();
    let mut pass = true;

    // persisted models
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (x, y) = blobs(&mut rng, 30, 6, 2);
    let model = PnnModel::train(&x, &y, names(2), 0.3)
        .unwrap()
        .with_config_id("id");
    let text = model.to_json().unwrap();
    let back = PnnModel::from_json(&text).unwrap();
    let exact = back == model && back.to_json().unwrap() == text;
    pass &= exact;
    notes.push(format!("PNN round trip exact: {exact}"));

    // every command, run twice into separate directories
    let mut runs = Vec::new();
    for round in ["a", "b"] {
        let base = work.join(format!("det-{round}"));
        let data = base.join("data");
        let mut captured = Vec::new();
        captured.push(ok(&[
            "gen",
            "--subjects",
            "3",
            "--seed",
            "11",
            "--duration",
            "90",
            "--channels",
            "4",
            "--out",
            s(&data),
        ]));
        let m = data.join("manifest.json");
        captured.push(ok(&[
            "extract",
            "--manifest",
            s(&m),
            "--segment-length",
            "4096",
            "--out",
            s(&base.join("x")),
        ]));
        captured.push(ok(&[
            "loocv",
            "--manifest",
            s(&m),
            "--segment-length",
            "4096",
            "--study",
            "--out",
            s(&base.join("l")),
        ]));
        captured.push(ok(&[
            "sweep",
            "--manifest",
            s(&m),
            "--grid",
            "custom",
            "--lengths",
            "4096",
            "--cutoffs",
            "40,46",
            "--bands",
            "2:32:1,2:34:2",
            "--out",
            s(&base.join("s")),
        ]));
        captured.push(ok(&[
            "train",
            "--manifest",
            s(&m),
            "--segment-length",
            "4096",
            "--out",
            s(&base.join("t")),
        ]));
        let model_path = base.join("t/model.json");
        captured.push(ok(&[
            "classify",
            "--model",
            s(&model_path),
            "--recording",
            s(&data.join("epileptic-01.csv")),
        ]));
        captured.push(ok(&[
            "classify",
            "--model",
            s(&model_path),
            "--recording",
            s(&data.join("healthy-02.csv")),
            "--json",
        ]));
        captured.push(ok(&["report", s(&base.join("s/sweep.json"))]));
        let mut files = Vec::new();
        for sub in ["data", "x", "l", "s", "t"] {
            let mut entries: Vec<_> = fs::read_dir(base.join(sub))
                .unwrap()
                .map(|e| e.unwrap().path())
                .collect();
            entries.sort();
            for p in entries {
                files.push((p.file_name().unwrap().to_owned(), fs::read(&p).unwrap()));
            }
        }
        runs.push((captured, files));
    }
    let same_stdout = runs[0].0 == runs[1].0;
    let same_files = runs[0].1 == runs[1].1;
    pass &= same_stdout && same_files;
    notes.push(format!(
        "gen/extract/loocv/sweep/train/classify/report: stdout identical {same_stdout}, {} files identical {same_files}",
        runs[0].1.len()
    ));

    // the saved ensemble reloads to the same bytes
    let saved = fs::read_to_string(work.join("det-a/t/model.json")).unwrap();
    let reloaded = ChannelEnsemble::from_json(&saved)
        .unwrap()
        .to_json()
        .unwrap()
        + "\n";
    pass &= reloaded == saved;
    notes.push(format!("ensemble round trip exact: {}", reloaded == saved));
    check(pass, notes.join("; "))
}

fn main() {
    let work = tempfile::tempdir().expect("temporary directory");
    let work = work.path();
    let criteria: Vec<Criterion> = vec![
        ("FFT oracle", Box::new(fft_oracle)),
        ("fractal-dimension oracles", Box::new(fractal_oracles)),
        ("Hjorth oracle", Box::new(hjorth_oracle)),
        ("RIR normalization", Box::new(rir_normalization)),
        ("PNN-Parzen equivalence", Box::new(parzen_equivalence)),
        (
            "incremental-update equivalence",
            Box::new(incremental_update),
        ),
        ("LOOCV integrity", Box::new(loocv_integrity)),
        (
            "end-to-end synthetic separation",
            Box::new(move || end_to_end(work)),
        ),
        (
            "sweep reproduction",
            Box::new(move || sweep_reproduction(work)),
        ),
        (
            "determinism and serialization",
            Box::new(move || determinism_and_serialization(work)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let verdict = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
