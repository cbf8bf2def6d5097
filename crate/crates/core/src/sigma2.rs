//! Monte-Carlo estimator for the asymptotic variance
//!
//! ```text
//! σ² = (1/2n) Σ_{ẽ ∈ Ẽ} E[ E[D_ẽ | F_ẽ]² ],
//! ```
//!
//! where Ẽ runs over the n·|S| fundamental entries, F_ẽ is generated by the
//! states of edges ≼ ẽ in the invariant edge order, and D_ẽ is the
//! resampling difference of the functional on a ball window large enough
//! for the difference to have stabilized.
//!
//! The inner conditional expectation is estimated by redrawing the strict
//! future (and the resampled copy of ẽ) with the past frozen; squaring the
//! inner mean gives a plain plug-in estimator whose bias is Var(D|F)/inner —
//! the inner counts used by the callers keep that far below the reported
//! standard error.

use crate::error::{Error, Result};
use crate::functionals::{evaluate, FunctionalSpec};
use crate::geometry::{Ball, EdgeUniverse, Window};
use crate::group::{GroupModel, ModelKind};
use crate::order::{edge_cmp, fundamental_set};
use crate::par::{map_indexed, ExecMode};
use crate::percolation::Configuration;
use crate::rng::{bernoulli, bernoulli_threshold, derive_seed, salt};

#[derive(Clone, Copy, Debug)]
pub struct Sigma2Options {
    pub outer: u32,
    pub inner: u32,
    /// Radius of the evaluation window (the stabilization proxy for D^∞).
    pub radius: u32,
    pub seed: u64,
    pub mode: ExecMode,
}

#[derive(Clone, Debug)]
pub struct EntryEstimate {
    pub entry: usize,
    pub coset: usize,
    pub generator: String,
    /// Estimate of E[E[D|F]²] for this entry.
    pub mean_sq: f64,
    pub se: f64,
}

#[derive(Clone, Debug)]
pub struct Sigma2Estimate {
    pub per_entry: Vec<EntryEstimate>,
    /// Normalized so that Var F(ω, B_r) ≈ σ²·|B_r|.
    pub sigma2: f64,
    pub se: f64,
    /// Per-edge normalization: Var F(ω, B_r) ≈ σ_b²·|E(B_r)|.
    pub sigma2_b: f64,
    pub se_b: f64,
    pub outer: u32,
    pub inner: u32,
    pub radius: u32,
}

/// How far the coset representatives reach from the origin; the universe
/// needs this much headroom beyond the window so every fundamental entry is
/// an actual universe edge.
fn rep_reach(model: &GroupModel) -> u32 {
    match model.kind {
        ModelKind::Zd { .. } | ModelKind::Heisenberg => 0,
        ModelKind::ZdTimesCyclic { m, .. } => m / 2,
    }
}

pub fn estimate_sigma2(
    model: &GroupModel,
    spec: &FunctionalSpec,
    p: f64,
    opts: Sigma2Options,
) -> Result<Sigma2Estimate> {
    if opts.outer < 2 || opts.inner < 1 {
        return Err(Error::Parameter {
            key: "outer/inner".into(),
            reason: "need outer ≥ 2 and inner ≥ 1".into(),
        });
    }
    let fs = fundamental_set(model)?;
    let universe_radius = opts.radius + rep_reach(model) + 1;
    let uni = EdgeUniverse::build(model, Ball::build(model, universe_radius))?;
    let window = Window::ball(&uni, opts.radius)?;
    let threshold = bernoulli_threshold(p);
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter {
            key: "p".into(),
            reason: format!("{p} outside [0,1]"),
        });
    }

    let entry_edges: Vec<u32> = fs
        .entries
        .iter()
        .map(|en| {
            uni.edge_between(&en.u, &en.v).ok_or_else(|| {
                Error::Contract(format!(
                    "fundamental entry ({:?},{:?}) missing from the universe",
                    en.u, en.v
                ))
            })
        })
        .collect::<Result<_>>()?;

    // per entry: which universe edges are in its past (≼ entry edge,
    // including the entry itself)
    let pasts: Vec<Vec<bool>> = entry_edges
        .iter()
        .map(|&ee| {
            let e = &uni.edges[ee as usize];
            let eu = &uni.ball.vertices[e.a as usize];
            let ev = &uni.ball.vertices[e.b as usize];
            uni.edges
                .iter()
                .map(|f| {
                    let fu = &uni.ball.vertices[f.a as usize];
                    let fv = &uni.ball.vertices[f.b as usize];
                    edge_cmp(model, (fu, fv), (eu, ev)) != std::cmp::Ordering::Greater
                })
                .collect()
        })
        .collect();

    let entries_n = fs.entries.len();
    let tasks = entries_n * opts.outer as usize;
    // one task per (entry, outer draw): freeze the past, average the
    // difference over `inner` redraws of the future
    let inner_means: Vec<f64> = map_indexed(opts.mode, tasks, |task| {
        let entry = task / opts.outer as usize;
        let ee = entry_edges[entry];
        let past = &pasts[entry];
        let outer_seed = derive_seed(opts.seed, salt::SIGMA_OUTER, task as u64);
        let past_states: Vec<bool> = uni
            .edges
            .iter()
            .enumerate()
            .map(|(fi, f)| past[fi] && bernoulli(outer_seed, f.key, salt::EDGE_STATE, threshold))
            .collect();
        let mut sum = 0i64;
        for i in 0..opts.inner {
            let inner_seed = derive_seed(outer_seed, salt::SIGMA_INNER, i as u64);
            let states: Vec<bool> = uni
                .edges
                .iter()
                .enumerate()
                .map(|(fi, f)| {
                    if past[fi] {
                        past_states[fi]
                    } else {
                        bernoulli(inner_seed, f.key, salt::EDGE_STATE, threshold)
                    }
                })
                .collect();
            let omega = Configuration::from_states(&uni, p, inner_seed, states)
                .expect("state vector sized to the universe");
            let omega_e = omega
                .resample_edge(ee, inner_seed)
                .expect("entry edge is in the universe");
            let d = evaluate(spec, &omega, &window).expect("window functional")
                - evaluate(spec, &omega_e, &window).expect("window functional");
            sum += d;
        }
        sum as f64 / opts.inner as f64
    });

    let mut per_entry = Vec::with_capacity(entries_n);
    let mut total = 0.0f64;
    let mut var_sum = 0.0f64;
    for (entry, fe) in fs.entries.iter().enumerate() {
        let chunk = &inner_means[entry * opts.outer as usize..(entry + 1) * opts.outer as usize];
        let sq: Vec<f64> = chunk.iter().map(|m| m * m).collect();
        let mean_sq = sq.iter().sum::<f64>() / sq.len() as f64;
        let var = sq.iter().map(|x| (x - mean_sq).powi(2)).sum::<f64>()
            / (sq.len() as f64 - 1.0);
        let se = (var / sq.len() as f64).sqrt();
        total += mean_sq;
        var_sum += se * se;
        per_entry.push(EntryEstimate {
            entry,
            coset: fe.coset,
            generator: model.generator_label(fe.gen).to_string(),
            mean_sq,
            se,
        });
    }
    let norm = 1.0 / (2.0 * model.index_n() as f64);
    let sigma2 = norm * total;
    let se = norm * var_sum.sqrt();
    let edge_factor = 2.0 / model.degree() as f64;
    Ok(Sigma2Estimate {
        per_entry,
        sigma2,
        se,
        sigma2_b: sigma2 * edge_factor,
        se_b: se * edge_factor,
        outer: opts.outer,
        inner: opts.inner,
        radius: opts.radius,
    })
}
