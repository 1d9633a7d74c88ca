//! Maass-form spectral data: ingestion, the explicit spectral series for
//! the smoothed fourth moment, and counting statistics.
//!
//! The crate never computes eigendata.  A dataset is a text file, one
//! `kappa  alphaH3` pair per line ('#' starts a comment), where `alphaH3`
//! denotes alpha_j H_j^3(1/2) in the normalization of the supplier's
//! table; the file should state its source and normalization in comments,
//! and the loader records the path as provenance.

use crate::error::{Error, Result};
use crate::smoothed::{Method, SmoothedMoment};
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralDatum {
    pub kappa: f64,
    pub alpha_h3: f64,
}

#[derive(Clone, Debug)]
pub struct SpectralDataset {
    data: Vec<SpectralDatum>,
    pub source: String,
    pub max_kappa: f64,
}

impl SpectralDataset {
    /// Validate and wrap a list of points: kappa strictly increasing and
    /// positive, values finite.  `line_base` shifts error line numbers when
    /// the data came from a file.
    fn from_rows(rows: Vec<(usize, SpectralDatum)>, source: String) -> Result<Self> {
        let mut prev = 0.0f64;
        for &(line, d) in &rows {
            if !d.kappa.is_finite() || d.kappa <= 0.0 {
                return Err(Error::SpectralParse {
                    path: source,
                    line,
                    message: format!("kappa = {} must be finite and positive", d.kappa),
                });
            }
            if d.kappa <= prev {
                return Err(Error::SpectralParse {
                    path: source,
                    line,
                    message: format!(
                        "kappa values must be strictly increasing ({} after {})",
                        d.kappa, prev
                    ),
                });
            }
            if !d.alpha_h3.is_finite() {
                return Err(Error::SpectralParse {
                    path: source,
                    line,
                    message: "alphaH3 is not finite".into(),
                });
            }
            prev = d.kappa;
        }
        let max_kappa = rows.last().map(|&(_, d)| d.kappa).unwrap_or(0.0);
        Ok(SpectralDataset {
            data: rows.into_iter().map(|(_, d)| d).collect(),
            source,
            max_kappa,
        })
    }

    pub fn from_data(data: Vec<SpectralDatum>, source: impl Into<String>) -> Result<Self> {
        Self::from_rows(
            data.into_iter().enumerate().map(|(i, d)| (i + 1, d)).collect(),
            source.into(),
        )
    }

    pub fn data(&self) -> &[SpectralDatum] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Indices with kappa in [lo, hi].
    fn range(&self, lo: f64, hi: f64) -> &[SpectralDatum] {
        let start = self.data.partition_point(|d| d.kappa < lo);
        let end = self.data.partition_point(|d| d.kappa <= hi);
        &self.data[start..end]
    }

    /// Write in the loadable format, full double precision.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        writeln!(out, "# source: {}", self.source).unwrap();
        writeln!(out, "# columns: kappa  alphaH3").unwrap();
        for d in &self.data {
            writeln!(out, "{:.16e} {:.16e}", d.kappa, d.alpha_h3).unwrap();
        }
        std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// Load a dataset; parse failures carry the line number.
pub fn load_spectral(path: &Path) -> Result<SpectralDataset> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let name = path.display().to_string();
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let kappa: f64 = parts
            .next()
            .unwrap()
            .parse()
            .map_err(|e| Error::SpectralParse {
                path: name.clone(),
                line,
                message: format!("bad kappa: {e}"),
            })?;
        let alpha_h3: f64 = parts
            .next()
            .ok_or_else(|| Error::SpectralParse {
                path: name.clone(),
                line,
                message: "expected two columns: kappa alphaH3".into(),
            })?
            .parse()
            .map_err(|e| Error::SpectralParse {
                path: name.clone(),
                line,
                message: format!("bad alphaH3: {e}"),
            })?;
        if parts.next().is_some() {
            return Err(Error::SpectralParse {
                path: name,
                line,
                message: "more than two columns".into(),
            });
        }
        rows.push((line, SpectralDatum { kappa, alpha_h3 }));
    }
    SpectralDataset::from_rows(rows, name)
}

/// Truncation rule for the spectral series: kappa <= t G^{-1} log t.
#[inline]
pub fn spectral_cutoff(t: f64, g: f64) -> f64 {
    t / g * t.ln()
}

/// The explicit spectral series for the smoothed fourth moment,
/// (pi / sqrt(2t)) sum_j alphaH3_j kappa_j^{-1/2}
///     sin(kappa_j log(kappa_j/(4 e t))) exp(-(G kappa_j / t)^2 / 4),
/// truncated at kappa = t G^{-1} log t.  Valid for
/// sqrt(t)/log^D t <= G <= t/log t; the O(log^{3D+9} t) offset is NOT
/// included.  An empty dataset is the empty sum.
pub fn j2_spectral(
    t: f64,
    g: f64,
    data: &SpectralDataset,
    d_exponent: f64,
) -> Result<SmoothedMoment> {
    let cutoff = spectral_cutoff(t, g);
    j2_spectral_with_cutoff(t, g, data, d_exponent, cutoff)
}

/// Same series with an explicit kappa cutoff (the truncation-stability
/// experiments extend it beyond the rule).
pub fn j2_spectral_with_cutoff(
    t: f64,
    g: f64,
    data: &SpectralDataset,
    d_exponent: f64,
    cutoff: f64,
) -> Result<SmoothedMoment> {
    let lo = t.sqrt() / t.ln().powf(d_exponent);
    let hi = t / t.ln();
    if !(g >= lo && g <= hi) {
        return Err(Error::SmoothingWindow { g, lo, hi });
    }
    if data.is_empty() {
        return Ok(SmoothedMoment {
            k: 2,
            t,
            g,
            value: 0.0,
            method: Method::Spectral,
            truncation: 0,
            reflected: false,
        });
    }
    if data.max_kappa < cutoff {
        return Err(Error::SpectralCoverage {
            required: cutoff,
            available: data.max_kappa,
        });
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut used = 0u64;
    for d in data.range(0.0, cutoff) {
        let kappa = d.kappa;
        let damp = (-(g * kappa / t).powi(2) / 4.0).exp();
        let term = d.alpha_h3 / kappa.sqrt()
            * (kappa * (kappa / (4.0 * std::f64::consts::E * t)).ln()).sin()
            * damp;
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        used += 1;
    }
    Ok(SmoothedMoment {
        k: 2,
        t,
        g,
        value: PI / (2.0 * t).sqrt() * sum,
        method: Method::Spectral,
        truncation: used,
        reflected: false,
    })
}

/// Short spectral window sum: sum of alphaH3 over K-1 <= kappa <= K+1.
pub fn spectral_window_sum(data: &SpectralDataset, k: f64) -> f64 {
    data.range(k - 1.0, k + 1.0)
        .iter()
        .map(|d| d.alpha_h3)
        .sum()
}

/// Number of ordered quadruples with kappas in (K, 2K] satisfying
/// |sqrt(lam_j) + sqrt(lam_m) - sqrt(lam_l) - sqrt(lam_n)| < delta,
/// lam = kappa^2 + 1/4.  Brute force.
pub fn count_spectral_quadruples(data: &SpectralDataset, k: f64, delta: f64) -> u64 {
    let window = data.range(k + f64::MIN_POSITIVE, 2.0 * k);
    let roots: Vec<f64> = window
        .iter()
        .map(|d| (d.kappa * d.kappa + 0.25).sqrt())
        .collect();
    let mut count = 0u64;
    for &a in &roots {
        for &b in &roots {
            let left = a + b;
            for &c in &roots {
                for &d in &roots {
                    if (left - c - d).abs() < delta {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Fitted constants and trend flags for the growth shapes the spectral
/// sums must obey; violations indicate a bad table rather than mathematics.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralShapeReport {
    /// max over the K-grid of partial_sum(K) / (K^2 log^3 K)
    pub partial_sum_c: f64,
    /// least-squares slope of that ratio against log K (upward trend = bad)
    pub partial_sum_trend: f64,
    /// max over the K-grid of window_sum(K) / K^{1.1}
    pub window_sum_c: f64,
    pub flagged: bool,
}

pub fn shape_report(data: &SpectralDataset, k_grid: &[f64]) -> SpectralShapeReport {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut c_partial: f64 = 0.0;
    let mut c_window: f64 = 0.0;
    for &k in k_grid {
        if k < 2.0 {
            continue;
        }
        let partial: f64 = data.range(0.0, k).iter().map(|d| d.alpha_h3).sum();
        let ratio = partial / (k * k * k.ln().powi(3));
        c_partial = c_partial.max(ratio);
        xs.push(k.ln());
        ys.push(ratio);
        c_window = c_window.max(spectral_window_sum(data, k) / k.powf(1.1));
    }
    let trend = crate::smoothed::least_squares_slope(&xs, &ys);
    SpectralShapeReport {
        partial_sum_c: c_partial,
        partial_sum_trend: trend,
        window_sum_c: c_window,
        flagged: trend > 0.05 * c_partial.max(1e-300),
    }
}

/// Deterministic synthetic table with the coarse growth of real spectral
/// data (Weyl-law density, bounded window sums).  For exercising the
/// machinery and the file contract only; NOT eigendata.
pub fn synthetic_dataset(n_points: usize) -> SpectralDataset {
    let mut data = Vec::with_capacity(n_points);
    for j in 1..=n_points {
        let jf = j as f64;
        let kappa = (12.0 * jf + 79.0).sqrt() + 0.005 * (2.7 * jf).sin();
        let alpha_h3 = 12.0 * (kappa + std::f64::consts::E).ln().powi(3)
            * (1.0 + 0.5 * (1.9 * jf).sin());
        data.push(SpectralDatum { kappa, alpha_h3 });
    }
    SpectralDataset::from_data(data, "synthetic").expect("generator is monotone")
}
