use std::collections::BTreeMap;

use serde::Serialize;

use super::ManifestEntry;
use crate::geometry::enlarge_unclamped;

pub const HISTOGRAM_BINS: usize = 16;

/// Log-spaced histogram. Bin `k` holds values in `[base^k, base^(k+1))`;
/// the last bin is open-ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogHistogram {
    pub base: u64,
    pub lower_edges: Vec<u64>,
    pub counts: Vec<u64>,
}

impl LogHistogram {
    fn new(base: u64) -> Self {
        LogHistogram {
            base,
            lower_edges: (0..HISTOGRAM_BINS as u32).map(|k| base.pow(k)).collect(),
            counts: vec![0; HISTOGRAM_BINS],
        }
    }

    fn add(&mut self, v: u64) {
        let bin = self.lower_edges.iter().rposition(|&e| v >= e).unwrap_or(0);
        self.counts[bin] += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InspectReport {
    pub entries: u64,
    pub per_class: BTreeMap<String, u64>,
    /// Original box widths, bins of factor 2.
    pub width_histogram: LogHistogram,
    pub height_histogram: LogHistogram,
    /// Original box areas, bins of factor 4.
    pub area_histogram: LogHistogram,
    pub enlarge_factor: f64,
    /// Entries whose enlarged box was cut by the image border.
    pub clamped: u64,
    pub clamp_rate: f64,
}

/// Summarises a crop manifest. An entry counts as clamped when its
/// `box_enlarged` differs from the unclamped enlargement of `box_original`
/// by `enlarge_factor`.
pub fn inspect(entries: &[ManifestEntry], enlarge_factor: f64) -> InspectReport {
    let mut report = InspectReport {
        entries: entries.len() as u64,
        per_class: BTreeMap::new(),
        width_histogram: LogHistogram::new(2),
        height_histogram: LogHistogram::new(2),
        area_histogram: LogHistogram::new(4),
        enlarge_factor,
        clamped: 0,
        clamp_rate: 0.0,
    };
    for e in entries {
        *report.per_class.entry(e.class_label.clone()).or_default() += 1;
        let b = e.box_original;
        report.width_histogram.add(b.width() as u64);
        report.height_histogram.add(b.height() as u64);
        report.area_histogram.add(b.area());
        let grown = enlarge_unclamped(&b, enlarge_factor);
        let actual = e.box_enlarged;
        if grown != [actual.xmin, actual.ymin, actual.xmax, actual.ymax].map(i64::from) {
            report.clamped += 1;
        }
    }
    if !entries.is_empty() {
        report.clamp_rate = report.clamped as f64 / entries.len() as f64;
    }
    report
}
