//! Plain-text tables for reports.

use std::fmt::Write;

use super::{EvalReport, FeatureStudy, SweepOutcome};
use crate::features::SpectralBandSpec;

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

pub fn render_report(report: &EvalReport) -> String {
    let mut out = String::new();
    let c = &report.config;
    let _ = writeln!(
        out,
        "configuration: segment length {}, cutoff {} Hz (order {}), band {}-{} Hz, bin {} Hz, k_max {}",
        c.segment_length,
        c.filter.cutoff_hz,
        c.filter.order,
        c.band.f_low_hz,
        c.band.f_up_hz,
        c.band.f_step_hz,
        c.k_max
    );
    let _ = writeln!(
        out,
        "features: {} (dimension {}), spread {}, tie policy {}",
        report.selection.heading(),
        report.feature_dim,
        report.spread,
        report.tie_policy.as_str()
    );
    let counts: Vec<String> = report
        .sample_counts
        .iter()
        .map(|(l, n)| format!("{l} {n}"))
        .collect();
    let _ = writeln!(out, "frames: {}", counts.join(", "));
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<8} {:>10}", "channel", "accuracy");
    for ch in &report.per_channel {
        let _ = writeln!(out, "{:<8} {:>10}", ch.channel, pct(ch.accuracy));
    }
    let _ = writeln!(out);
    let m = &report.confusion;
    let _ = writeln!(out, "voted accuracy      {}", pct(report.voted_accuracy));
    let _ = writeln!(
        out,
        "true positive rate  {}",
        pct(report.true_positive_rate)
    );
    let _ = writeln!(
        out,
        "false positive rate {}",
        pct(report.false_positive_rate)
    );
    let _ = writeln!(out, "sensitivity         {}", pct(report.sensitivity));
    let _ = writeln!(out, "specificity         {}", pct(report.specificity));
    let _ = writeln!(
        out,
        "confusion           TP {} FN {} FP {} TN {}",
        m.tp, m.fn_, m.fp, m.tn
    );
    out
}

/// Channels as rows, feature combinations as columns.
pub fn render_feature_study(study: &FeatureStudy) -> String {
    let mut out = String::new();
    let headings: Vec<String> = study.selections.iter().map(|s| s.heading()).collect();
    let width = headings.iter().map(String::len).max().unwrap_or(8).max(8);
    let _ = write!(out, "{:<8}", "channel");
    for h in &headings {
        let _ = write!(out, " | {h:>width$}");
    }
    let _ = writeln!(out);
    for (name, row) in study.channels.iter().zip(&study.accuracy) {
        let _ = write!(out, "{name:<8}");
        for &a in row {
            let _ = write!(out, " | {:>width$}", pct(a));
        }
        let _ = writeln!(out);
    }
    let _ = write!(out, "{:<8}", "mean");
    for (i, &m) in study.column_means.iter().enumerate() {
        let cell = if i == study.best {
            format!("*{}", pct(m))
        } else {
            pct(m)
        };
        let _ = write!(out, " | {cell:>width$}");
    }
    let _ = writeln!(out);
    out
}

fn band_heading(b: &SpectralBandSpec) -> String {
    format!("{}-{}, {}", b.f_low_hz, b.f_up_hz, b.f_step_hz)
}

/// Voted accuracy by (segment length, cutoff) row and band/bin column.
pub fn render_sweep(outcome: &SweepOutcome) -> String {
    let mut rows: Vec<(usize, f64)> = Vec::new();
    let mut bands: Vec<SpectralBandSpec> = Vec::new();
    for c in &outcome.grid {
        let row = (c.segment_length, c.filter.cutoff_hz);
        if !rows.contains(&row) {
            rows.push(row);
        }
        if !bands.contains(&c.band) {
            bands.push(c.band);
        }
    }
    let best_id = outcome.best().map(|r| r.config_id.clone());
    let headings: Vec<String> = bands.iter().map(band_heading).collect();
    let width = headings.iter().map(String::len).max().unwrap_or(6).max(7);
    let mut out = String::new();
    let _ = write!(out, "{:>6} | {:>7}", "length", "cut-off");
    for h in &headings {
        let _ = write!(out, " | {h:>width$}");
    }
    let _ = writeln!(out);
    for &(length, cutoff) in &rows {
        let _ = write!(out, "{length:>6} | {cutoff:>7}");
        for band in &bands {
            let matches = |c: &crate::features::ExtractionConfig| {
                c.segment_length == length && c.filter.cutoff_hz == cutoff && c.band == *band
            };
            let cell = if let Some(r) = outcome.reports.iter().find(|r| matches(&r.config)) {
                let mark = if Some(&r.config_id) == best_id.as_ref() {
                    "*"
                } else {
                    ""
                };
                format!("{mark}{}", pct(r.voted_accuracy))
            } else if outcome.failures.iter().any(|f| matches(&f.config)) {
                "error".to_string()
            } else {
                "-".to_string()
            };
            let _ = write!(out, " | {cell:>width$}");
        }
        let _ = writeln!(out);
    }
    for f in &outcome.failures {
        let _ = writeln!(out, "failed {}: {}", f.config_id, f.error);
    }
    out
}
