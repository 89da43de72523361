//! T-statistics over per-subsample F1 vectors and Gaussian kernel density
//! estimates of importance distributions.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TTestKind {
    #[default]
    Paired,
    Welch,
}

/// Index-aligned mean-F1 vectors of the GS and GS(LBL) attacks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedScoreVectors {
    pub gs: Vec<f64>,
    pub gs_lbl: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub kind: TTestKind,
    pub t_statistic: f64,
    pub df: f64,
    /// `mean(gs_lbl) − mean(gs)`.
    pub mean_difference: f64,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with `n − 1` denominator.
fn variance(x: &[f64], m: f64) -> f64 {
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

fn check(v: &PairedScoreVectors) -> Result<usize> {
    if v.gs.len() != v.gs_lbl.len() {
        return Err(Error::invalid(format!(
            "score vectors differ in length ({} vs {})",
            v.gs.len(),
            v.gs_lbl.len()
        )));
    }
    if v.gs.len() < 2 {
        return Err(Error::invalid("t-test needs at least two scores per vector"));
    }
    Ok(v.gs.len())
}

/// `t = mean(d) / (sd(d)/√n)` with `d_i = gs_lbl_i − gs_i`.
pub fn paired_t_statistic(v: &PairedScoreVectors) -> Result<TTestResult> {
    let n = check(v)?;
    let d: Vec<f64> = v.gs_lbl.iter().zip(&v.gs).map(|(b, a)| b - a).collect();
    let m = mean(&d);
    let var = variance(&d, m);
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(TTestResult {
        kind: TTestKind::Paired,
        t_statistic: m / (var / n as f64).sqrt(),
        df: (n - 1) as f64,
        mean_difference: m,
    })
}

/// Unequal-variance two-sample t with Welch–Satterthwaite degrees of freedom.
pub fn welch_t_statistic(v: &PairedScoreVectors) -> Result<TTestResult> {
    let n = check(v)? as f64;
    let (ma, mb) = (mean(&v.gs), mean(&v.gs_lbl));
    let (sa, sb) = (variance(&v.gs, ma) / n, variance(&v.gs_lbl, mb) / n);
    if sa + sb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let df = (sa + sb).powi(2) / (sa * sa / (n - 1.0) + sb * sb / (n - 1.0));
    Ok(TTestResult {
        kind: TTestKind::Welch,
        t_statistic: (mb - ma) / (sa + sb).sqrt(),
        df,
        mean_difference: mb - ma,
    })
}

pub fn t_statistic(v: &PairedScoreVectors, kind: TTestKind) -> Result<TTestResult> {
    match kind {
        TTestKind::Paired => paired_t_statistic(v),
        TTestKind::Welch => welch_t_statistic(v),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeCurve {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl KdeCurve {
    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
            .sum()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,density")?;
        for (x, d) in self.grid.iter().zip(&self.density) {
            writeln!(w, "{x},{d}")?;
        }
        Ok(())
    }
}

/// Scott's rule, `n^(−1/5)·sd`.
pub fn scott_bandwidth(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::invalid("density estimate needs at least two samples"));
    }
    let m = mean(samples);
    let sd = variance(samples, m).sqrt();
    if sd == 0.0 {
        return Err(Error::PointMass { at: m });
    }
    Ok((samples.len() as f64).powf(-0.2) * sd)
}

/// Gaussian KDE on `grid_points` uniform points over `[min − 3h, max + 3h]`.
pub fn gaussian_kde(samples: &[f64], grid_points: usize) -> Result<KdeCurve> {
    let h = scott_bandwidth(samples)?;
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min) - 3.0 * h;
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
    gaussian_kde_on(samples, h, &linspace(lo, hi, grid_points))
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![(lo + hi) / 2.0],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|i| if i == points - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Evaluates the KDE with a fixed bandwidth at the given abscissae.
pub fn gaussian_kde_on(samples: &[f64], bandwidth: f64, grid: &[f64]) -> Result<KdeCurve> {
    if samples.is_empty() || !(bandwidth > 0.0) {
        return Err(Error::invalid("KDE needs samples and a positive bandwidth"));
    }
    let norm = 1.0 / (samples.len() as f64 * bandwidth * (2.0 * PI).sqrt());
    let density = grid
        .iter()
        .map(|&x| {
            norm * samples
                .iter()
                .map(|&s| {
                    let z = (x - s) / bandwidth;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
        })
        .collect();
    Ok(KdeCurve {
        grid: grid.to_vec(),
        density,
        bandwidth,
    })
}
