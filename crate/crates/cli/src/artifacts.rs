//! Plot-ready output files. Every CSV gets a header row; floats use Rust's
//! shortest round-trip formatting so reruns are byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use convograph::activity::{ActivityFit, CompletionCurve};
use convograph::hijack::{HijackReport, TakeoverHistogram};
use convograph::ingest::Conversation;
use convograph::wiener::WienerSeries;

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| {
        format!("creating artifact `{}`", path.display())
    })?))
}

/// RFC 4180 quoting for fields that need it; our numeric fields never do.
fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

pub fn write_conversations_csv(path: &Path, convs: &[Conversation]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(
        w,
        "conversation_id,posts,hashtags,seed_id,t_first,t_last,flags"
    )?;
    for conv in convs {
        let flags = conv
            .flags()
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join(";");
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            csv_field(conv.id()),
            conv.post_count(),
            conv.hashtag_count(),
            csv_field(conv.seed_id()),
            conv.t_first(),
            conv.t_last(),
            flags
        )?;
    }
    Ok(w.flush()?)
}

pub fn write_curve_csv(path: &Path, curve: &CompletionCurve) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "lambda_time,mean,sd,n")?;
    for p in &curve.points {
        writeln!(w, "{},{},{},{}", p.lambda_time, p.mean, p.sd, p.n)?;
    }
    Ok(w.flush()?)
}

pub fn write_fit_json(path: &Path, fit: &ActivityFit) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, fit)?;
    writeln!(w)?;
    Ok(w.flush()?)
}

pub fn write_wiener_series_csv(path: &Path, series: &[(String, WienerSeries)]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "conversation_id,completion_rate,wiener")?;
    for (conv_id, series) in series {
        for (rate, value) in &series.values {
            writeln!(w, "{},{},{}", csv_field(conv_id), rate, value)?;
        }
    }
    Ok(w.flush()?)
}

/// Quartile summary of wiener values per completion-rate bin, one row per
/// bin; empty bins keep the row with blank statistics.
pub fn write_wiener_summary_csv(
    path: &Path,
    series: &[(String, WienerSeries)],
    bins: usize,
) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "bin_lo,bin_hi,n,min,q1,median,q3,max")?;
    let mut grouped: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for (_, series) in series {
        for &(rate, value) in &series.values {
            let slot = ((rate * bins as f64) as usize).min(bins - 1);
            grouped[slot].push(value);
        }
    }
    for (slot, values) in grouped.iter_mut().enumerate() {
        let lo = slot as f64 / bins as f64;
        let hi = (slot + 1) as f64 / bins as f64;
        if values.is_empty() {
            writeln!(w, "{lo},{hi},0,,,,,")?;
            continue;
        }
        values.sort_by(f64::total_cmp);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            lo,
            hi,
            values.len(),
            values[0],
            quantile(values, 0.25),
            quantile(values, 0.5),
            quantile(values, 0.75),
            values[values.len() - 1],
        )?;
    }
    Ok(w.flush()?)
}

/// Linear-interpolation quantile over sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn write_hijack_reports_jsonl(path: &Path, reports: &[HijackReport]) -> Result<()> {
    let mut w = create(path)?;
    for report in reports {
        serde_json::to_writer(&mut w, report)?;
        writeln!(w)?;
    }
    Ok(w.flush()?)
}

pub fn write_histogram_csv(path: &Path, hist: &TakeoverHistogram) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "row,bin_lo,bin_hi,probability")?;
    for (label, row) in hist.rows() {
        for (slot, p) in row.probabilities.iter().enumerate() {
            let lo = slot as f64 / hist.bins as f64;
            let hi = (slot + 1) as f64 / hist.bins as f64;
            writeln!(w, "{label},{lo},{hi},{p}")?;
        }
    }
    Ok(w.flush()?)
}

pub fn write_json_pretty<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(w.flush()?)
}
