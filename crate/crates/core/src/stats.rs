//! Weighted empirical distributions, Kolmogorov-Smirnov distances,
//! tail-exponent fitting, and CSV/SVG report emission.

use std::fs;
use std::ops::Range;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exec::KahanSum;

/// Importance-weighted sample set over `dims`-dimensional points.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    samples: Vec<(Vec<f64>, f64)>,
    dims: usize,
    total_weight: f64,
}

impl EmpiricalDistribution {
    pub fn new(samples: Vec<(Vec<f64>, f64)>, dims: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyDistribution("no samples".into()));
        }
        let mut total = KahanSum::new();
        for (v, w) in &samples {
            if v.len() != dims {
                return Err(Error::InvalidParameter(format!(
                    "sample has {} coordinates, expected {dims}",
                    v.len()
                )));
            }
            if !(*w >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative weight {w}")));
            }
            total.add(*w);
        }
        if !(total.value() > 0.0) {
            return Err(Error::EmptyDistribution("all weights are zero".into()));
        }
        Ok(Self {
            samples,
            dims,
            total_weight: total.value(),
        })
    }

    /// Unweighted convenience constructor for 1-d data.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values.into_iter().map(|v| (vec![v], 1.0)).collect(), 1)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn samples(&self) -> &[(Vec<f64>, f64)] {
        &self.samples
    }

    /// 1-d projection, sorted by value, weights kept.
    pub fn projection(&self, dim: usize) -> Result<Vec<(f64, f64)>> {
        if dim >= self.dims {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} out of range 0..{}",
                self.dims
            )));
        }
        let mut proj: Vec<(f64, f64)> = self
            .samples
            .iter()
            .map(|(v, w)| (v[dim], *w))
            .collect();
        proj.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(proj)
    }

    /// Kolmogorov distance between the self-normalized weighted ECDF of the
    /// `dim`-th coordinate and `cdf`, evaluated at both one-sided limits of
    /// every sample point.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, dim: usize, cdf: F) -> Result<f64> {
        if self.samples.len() < 10 {
            return Err(Error::Precondition(format!(
                "KS distance needs at least 10 samples, got {}",
                self.samples.len()
            )));
        }
        let proj = self.projection(dim)?;
        let mut acc = KahanSum::new();
        let mut sup: f64 = 0.0;
        let mut i = 0;
        while i < proj.len() {
            let x = proj[i].0;
            let below = acc.value() / self.total_weight;
            // absorb ties in one jump
            while i < proj.len() && proj[i].0 == x {
                acc.add(proj[i].1);
                i += 1;
            }
            let above = acc.value() / self.total_weight;
            // left limit of the target via the next-lower float, so that a
            // discontinuous target CDF is compared against the pre-jump ECDF
            // value on the correct side of its own jump
            sup = sup
                .max((below - cdf(x.next_down())).abs())
                .max((above - cdf(x)).abs());
        }
        Ok(sup)
    }

    /// Two-sample Kolmogorov distance between 1-d projections.
    pub fn ks_two_sample(&self, dim: usize, other: &Self, other_dim: usize) -> Result<f64> {
        let a = self.projection(dim)?;
        let b = other.projection(other_dim)?;
        let (wa, wb) = (self.total_weight, other.total_weight);
        let mut ia = 0;
        let mut ib = 0;
        let mut ca = KahanSum::new();
        let mut cb = KahanSum::new();
        let mut sup: f64 = 0.0;
        while ia < a.len() || ib < b.len() {
            let xa = a.get(ia).map_or(f64::INFINITY, |p| p.0);
            let xb = b.get(ib).map_or(f64::INFINITY, |p| p.0);
            let x = xa.min(xb);
            while ia < a.len() && a[ia].0 == x {
                ca.add(a[ia].1);
                ia += 1;
            }
            while ib < b.len() && b[ib].0 == x {
                cb.add(b[ib].1);
                ib += 1;
            }
            sup = sup.max((ca.value() / wa - cb.value() / wb).abs());
        }
        Ok(sup)
    }
}

/// Least-squares slope of `log(tail[n])` against `log n` over the window,
/// negated, so a pure power law `n^{-alpha}` returns `alpha` exactly.
pub fn fit_tail_exponent(tail: &[f64], window: Range<usize>) -> Result<f64> {
    if window.start == 0 || window.end > tail.len() || window.len() < 2 {
        return Err(Error::Precondition(format!(
            "window {window:?} invalid for a sequence of length {}",
            tail.len()
        )));
    }
    let mut xs = Vec::with_capacity(window.len());
    let mut ys = Vec::with_capacity(window.len());
    for n in window {
        if !(tail[n] > 0.0) {
            return Err(Error::NonpositiveValue(n));
        }
        xs.push((n as f64).ln());
        ys.push(tail[n].ln());
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    Ok(-sxy / sxx)
}

/// A rectangular table with a fixed header; all report CSVs go through this.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn emit(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn parse(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::parse_bytes(&bytes).map_err(|m| Error::parse(path, m))
    }

    pub fn parse_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut r = csv::Reader::from_reader(bytes);
        let header = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            rows.push(rec.iter().map(|s| s.to_string()).collect());
        }
        Ok(Self { header, rows })
    }
}

/// Shortest round-trip decimal formatting; used for every numeric CSV cell so
/// that identical inputs give identical bytes.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Exact column schemas for the report files.
pub mod schema {
    use super::CsvTable;

    pub fn bpy_samples(d: usize) -> CsvTable {
        let mut h: Vec<String> = (1..=d).map(|j| format!("u{j}")).collect();
        h.push("w".into());
        h.push("weight".into());
        CsvTable {
            header: h,
            rows: Vec::new(),
        }
    }

    pub fn bridge(d: usize) -> CsvTable {
        let mut h = vec!["n".to_string(), "k".to_string()];
        h.extend((1..=d).map(|j| format!("n{j}")));
        CsvTable {
            header: h,
            rows: Vec::new(),
        }
    }

    pub fn map_accept(d: usize) -> CsvTable {
        let mut h = vec!["x0".to_string(), "n".to_string()];
        h.extend((1..=d).map(|j| format!("sa{j}")));
        h.push("sy".into());
        CsvTable {
            header: h,
            rows: Vec::new(),
        }
    }

    pub fn llt(d: usize) -> CsvTable {
        let mut h = vec!["k".to_string()];
        h.extend((1..=d).map(|j| format!("y{j}")));
        h.push("deviation".into());
        CsvTable {
            header: h,
            rows: Vec::new(),
        }
    }

    pub fn lld() -> CsvTable {
        CsvTable::new(&["n", "k", "ratio"])
    }

    pub fn summary() -> CsvTable {
        CsvTable::new(&["experiment", "n", "metric", "value", "tolerance", "pass"])
    }
}

/// One plottable series of (x, y) points.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const SVG_PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Deterministic line plot: fixed 800x560 canvas, axes with min/max labels,
/// one polyline per series plus a legend.
pub fn render_svg(title: &str, series: &[Series]) -> String {
    let (w, h) = (800.0, 560.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if xmax == xmin {
        xmax = xmin + 1.0;
    }
    if ymax == ymin {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        w / 2.0,
        xml_escape(title)
    ));
    // axes
    out.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
        h - mb,
        w - mr
    ));
    out.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb
    ));
    for (label, x, y, anchor) in [
        (fmt_f64(xmin), ml, h - mb + 20.0, "middle"),
        (fmt_f64(xmax), w - mr, h - mb + 20.0, "middle"),
        (fmt_f64(ymin), ml - 8.0, h - mb, "end"),
        (fmt_f64(ymax), ml - 8.0, mt + 4.0, "end"),
    ] {
        out.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"{anchor}\">{label}</text>\n"
        ));
    }
    for (i, s) in series.iter().enumerate() {
        let color = SVG_PALETTE[i % SVG_PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt_f64(sx(x)), fmt_f64(sy(y))))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            w - mr - 180.0,
            mt + 16.0 * (i as f64 + 1.0),
            xml_escape(&s.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_svg(path: &Path, title: &str, series: &[Series]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, render_svg(title, series)).map_err(|e| Error::io(path, e))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
