//! Replicate-based normality diagnostics for window functionals.
//!
//! The harness draws independent configurations, evaluates the functional on
//! a ball window, standardizes, and reports moments plus the one-sample
//! Kolmogorov–Smirnov distance to the standard normal. Replicate i always
//! uses master_seed + i (wrapping), so a run is reproducible regardless of
//! how the replicates are scheduled.

use crate::error::{Error, Result};
use crate::functionals::{evaluate, FunctionalSpec};
use crate::geometry::{Ball, EdgeUniverse, Window};
use crate::group::GroupModel;
use crate::normal::normal_cdf;
use crate::par::{map_indexed, ExecMode};
use crate::percolation::Configuration;

/// Asymptotic 1% critical point of the Kolmogorov distribution: reject
/// normality at α = 0.01 when D·√n exceeds this.
pub const KS_COEFF_1PCT: f64 = 1.628;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Standardization {
    /// z = (F − mean)/std with both moments empirical.
    ByEmpiricalStd,
    /// z = (F − mean)/√(σ²·|B_r|) for an externally estimated σ².
    ByVolume { sigma2: f64 },
}

#[derive(Clone, Debug)]
pub struct CltReport {
    pub n: u32,
    pub radius: u32,
    pub volume: usize,
    pub mean: f64,
    /// Sample variance of the raw functional values.
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks: f64,
    pub ks_critical: f64,
    /// Variance too small to standardize; KS fields are NaN.
    pub degenerate: bool,
    pub values: Vec<i64>,
    pub zscores: Vec<f64>,
}

/// F(ω_i, B_radius) for i = 0..replicates, ω_i seeded with seed + i.
pub fn replicate_values(
    model: &GroupModel,
    spec: &FunctionalSpec,
    p: f64,
    radius: u32,
    replicates: u32,
    seed: u64,
    mode: ExecMode,
) -> Result<Vec<i64>> {
    let uni = EdgeUniverse::build(model, Ball::build(model, radius))?;
    let window = Window::ball(&uni, radius)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter {
            key: "p".into(),
            reason: format!("{p} outside [0,1]"),
        });
    }
    Ok(map_indexed(mode, replicates as usize, |i| {
        let cfg = Configuration::sample(&uni, p, seed.wrapping_add(i as u64))
            .expect("p validated above");
        evaluate(spec, &cfg, &window).expect("window functional")
    }))
}

/// One-sample KS distance of a sorted sample to the standard normal.
pub fn ks_statistic(sorted_z: &[f64]) -> f64 {
    let n = sorted_z.len() as f64;
    let mut d = 0.0f64;
    for (i, &z) in sorted_z.iter().enumerate() {
        let phi = normal_cdf(z);
        let hi = (i + 1) as f64 / n - phi;
        let lo = phi - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

// the experiment really does have this many independent knobs
#[allow(clippy::too_many_arguments)]
pub fn clt_harness(
    model: &GroupModel,
    spec: &FunctionalSpec,
    p: f64,
    radius: u32,
    replicates: u32,
    seed: u64,
    standardization: Standardization,
    mode: ExecMode,
) -> Result<CltReport> {
    if replicates < 8 {
        return Err(Error::Parameter {
            key: "replicates".into(),
            reason: "need at least 8 for the harness".into(),
        });
    }
    let values = replicate_values(model, spec, p, radius, replicates, seed, mode)?;
    let volume = Ball::build(model, radius).len();
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let m2 = values
        .iter()
        .map(|&v| (v as f64 - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    let degenerate = m2 <= f64::EPSILON * mean.abs().max(1.0);
    let scale = match standardization {
        Standardization::ByEmpiricalStd => m2.sqrt(),
        Standardization::ByVolume { sigma2 } => (sigma2 * volume as f64).sqrt(),
    };
    let (zscores, skewness, excess_kurtosis, ks) = if degenerate || scale == 0.0 {
        (vec![f64::NAN; values.len()], f64::NAN, f64::NAN, f64::NAN)
    } else {
        let z: Vec<f64> = values.iter().map(|&v| (v as f64 - mean) / scale).collect();
        // central moments of the standardized sample
        let zm = z.iter().sum::<f64>() / n;
        let c2 = z.iter().map(|x| (x - zm).powi(2)).sum::<f64>() / n;
        let c3 = z.iter().map(|x| (x - zm).powi(3)).sum::<f64>() / n;
        let c4 = z.iter().map(|x| (x - zm).powi(4)).sum::<f64>() / n;
        let skew = c3 / c2.powf(1.5);
        let kurt = c4 / (c2 * c2) - 3.0;
        let mut sorted = z.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite z-scores"));
        let ks = ks_statistic(&sorted);
        (z, skew, kurt, ks)
    };
    Ok(CltReport {
        n: replicates,
        radius,
        volume,
        mean,
        variance: m2,
        skewness,
        excess_kurtosis,
        ks,
        ks_critical: KS_COEFF_1PCT / n.sqrt(),
        degenerate,
        values,
        zscores,
    })
}

/// Empirical variance of the functional across nested ball windows, with
/// the vertex and edge normalizations side by side.
#[derive(Clone, Debug)]
pub struct ScalingRow {
    pub radius: u32,
    pub volume: usize,
    pub edges: usize,
    pub mean: f64,
    pub variance: f64,
    pub var_per_vertex: f64,
    pub var_per_edge: f64,
}

pub fn variance_scaling(
    model: &GroupModel,
    spec: &FunctionalSpec,
    p: f64,
    radii: &[u32],
    replicates: u32,
    seed: u64,
    mode: ExecMode,
) -> Result<Vec<ScalingRow>> {
    if radii.is_empty() || replicates < 2 {
        return Err(Error::Parameter {
            key: "radii/replicates".into(),
            reason: "need at least one radius and two replicates".into(),
        });
    }
    let r_max = *radii.iter().max().unwrap();
    let uni = EdgeUniverse::build(model, Ball::build(model, r_max))?;
    let windows: Vec<Window> = radii
        .iter()
        .map(|&r| Window::ball(&uni, r))
        .collect::<Result<_>>()?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter {
            key: "p".into(),
            reason: format!("{p} outside [0,1]"),
        });
    }
    // each replicate evaluates every window on one shared draw
    let per_replicate: Vec<Vec<i64>> = map_indexed(mode, replicates as usize, |i| {
        let cfg = Configuration::sample(&uni, p, seed.wrapping_add(i as u64))
            .expect("p validated above");
        windows
            .iter()
            .map(|w| evaluate(spec, &cfg, w).expect("window functional"))
            .collect()
    });
    let n = replicates as f64;
    Ok(radii
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let vals = per_replicate.iter().map(|row| row[k] as f64);
            let mean = vals.clone().sum::<f64>() / n;
            let variance =
                vals.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let volume = windows[k].vertex_count();
            let edges = windows[k].edges.len();
            ScalingRow {
                radius: r,
                volume,
                edges,
                mean,
                variance,
                var_per_vertex: variance / volume as f64,
                var_per_edge: variance / edges as f64,
            }
        })
        .collect())
}
