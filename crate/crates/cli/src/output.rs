//! CSV and JSON renderings of analysis results.
//!
//! Floats are written in their shortest round-trip decimal form (Rust's
//! `Display` for CSV, serde_json for JSON), so identical results always
//! produce identical bytes.

use std::fmt::Write as _;

use serde::Serialize;
use specrank::{DescriptorSet64, EigenSpectrum, MonitorTrace64, NullDistributionSummary64, PairwiseTable};

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Pretty JSON followed by a newline.
pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub input: String,
    pub samples: usize,
    #[serde(flatten)]
    pub descriptors: DescriptorSet64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalue_partial_sums: Option<Vec<f64>>,
}

impl AnalyzeReport {
    pub fn new(input: String, samples: usize, descriptors: DescriptorSet64, eigen: Option<EigenSpectrum<f64>>) -> Self {
        let (eigenvalues, eigenvalue_partial_sums) = match eigen {
            Some(e) => (Some(e.values), Some(e.partial_sums)),
            None => (None, None),
        };
        Self { input, samples, descriptors, eigenvalues, eigenvalue_partial_sums }
    }
}

pub fn analyze_csv(reports: &[AnalyzeReport]) -> String {
    let mut out = String::from("input,samples,n,cid,cod,spectral_entropy,l_used,q_used\n");
    for r in reports {
        let d = &r.descriptors;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.input, r.samples, d.n, d.cid, d.cod, d.spectral_entropy, d.l_used, d.q_used
        );
    }
    out
}

#[derive(Debug, Serialize)]
struct MonitorRow {
    start_index: usize,
    cid: Option<f64>,
    cod: Option<f64>,
    entropy: Option<f64>,
    l_used: Option<usize>,
    local_energy: f64,
    combined_cid: Option<f64>,
    combined_cod: Option<f64>,
}

fn monitor_rows(trace: &MonitorTrace64) -> Vec<MonitorRow> {
    trace
        .frames
        .iter()
        .map(|f| MonitorRow {
            start_index: f.start,
            cid: f.descriptors.as_ref().map(|d| d.cid),
            cod: f.descriptors.as_ref().map(|d| d.cod),
            entropy: f.descriptors.as_ref().map(|d| d.spectral_entropy),
            l_used: f.descriptors.as_ref().map(|d| d.l_used),
            local_energy: f.local_energy,
            combined_cid: f.combined_cid,
            combined_cod: f.combined_cod,
        })
        .collect()
}

/// One row per frame; undefined values are empty fields.
pub fn monitor_csv(trace: &MonitorTrace64) -> String {
    let mut out = String::from("start_index,cid,cod,entropy,local_energy,combined_cid,combined_cod\n");
    for r in monitor_rows(trace) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.start_index,
            opt(r.cid),
            opt(r.cod),
            opt(r.entropy),
            r.local_energy,
            opt(r.combined_cid),
            opt(r.combined_cod)
        );
    }
    out
}

/// Undefined values are `null`.
pub fn monitor_json(trace: &MonitorTrace64) -> String {
    #[derive(Serialize)]
    struct Doc {
        window: usize,
        step: usize,
        le_window: usize,
        frames: Vec<MonitorRow>,
    }
    to_json(&Doc { window: trace.window, step: trace.step, le_window: trace.le_window, frames: monitor_rows(trace) })
}

pub fn histogram_csv(summary: &NullDistributionSummary64) -> String {
    let mut out = String::from("bin_lower,bin_upper,count\n");
    let h = &summary.histogram;
    for (i, c) in h.counts.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", h.edges[i], h.edges[i + 1], c);
    }
    out
}

pub fn pairwise_csv(tables: &[PairwiseTable]) -> String {
    let mut out = String::from("metric,group_a,group_b,n_a,n_b,median_a,median_b,u_statistic,p_two_sided,method\n");
    for t in tables {
        let median = |name: &str| t.groups.iter().find(|g| g.name == name).map_or(f64::NAN, |g| g.median);
        for p in &t.pairs {
            let method = match p.result.method {
                specrank::RankSumMethod::Exact => "exact",
                specrank::RankSumMethod::NormalApprox => "normal_approx",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                t.metric.name(),
                p.first,
                p.second,
                p.result.n1,
                p.result.n2,
                median(&p.first),
                median(&p.second),
                p.result.u_statistic,
                p.result.p_two_sided,
                method
            );
        }
    }
    out
}
