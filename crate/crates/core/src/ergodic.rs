//! Spatial averages of local observables over a window.
//!
//! A local observable may be undefined at vertices whose neighborhood pokes
//! out of the window; those are skipped and the average renormalized over
//! the vertices that remain, so the reported mean is always an honest
//! average of fully evaluated terms.

use crate::error::Result;
use crate::geometry::Window;
use crate::group::GroupModel;
use crate::percolation::{clusters, Configuration};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalObservable {
    /// ψ ≡ 1; the average is exactly 1.
    Constant,
    /// Fraction of the |S| incident edges that are open. Undefined on
    /// vertices with incident edges outside the window. Mean → p.
    IncidentOpenFraction,
    /// 1/|C(x) ∩ W|; summing over the window recovers the cluster count.
    InverseClusterSize,
}

impl LocalObservable {
    pub fn label(&self) -> &'static str {
        match self {
            LocalObservable::Constant => "constant",
            LocalObservable::IncidentOpenFraction => "incident_open_fraction",
            LocalObservable::InverseClusterSize => "inverse_cluster_size",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "constant" => Some(LocalObservable::Constant),
            "incident_open_fraction" => Some(LocalObservable::IncidentOpenFraction),
            "inverse_cluster_size" => Some(LocalObservable::InverseClusterSize),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ErgodicAverage {
    pub observable: LocalObservable,
    /// Vertices that entered the average.
    pub counted: usize,
    /// Window vertices skipped for lack of headroom.
    pub skipped: usize,
    pub mean: f64,
}

pub fn ergodic_average(
    model: &GroupModel,
    config: &Configuration,
    window: &Window,
    observable: LocalObservable,
) -> Result<ErgodicAverage> {
    let uni = config.universe;
    let part = match observable {
        LocalObservable::InverseClusterSize => Some(clusters(config, window)),
        _ => None,
    };
    let mut sum = 0.0f64;
    let mut counted = 0usize;
    let mut skipped = 0usize;
    for &v in &window.vertices {
        let value: Option<f64> = match observable {
            LocalObservable::Constant => Some(1.0),
            LocalObservable::InverseClusterSize => {
                let part = part.as_ref().expect("partition prepared");
                let c = part.component_of[v as usize].expect("window vertex");
                Some(1.0 / part.sizes[c as usize] as f64)
            }
            LocalObservable::IncidentOpenFraction => {
                let g = &uni.ball.vertices[v as usize];
                let mut open = 0usize;
                let mut complete = true;
                for s in model.generators() {
                    let w = model.multiply_unchecked(g, s);
                    let Some(wi) = uni.ball.index_of(&w) else {
                        complete = false;
                        break;
                    };
                    if !window.in_window[wi as usize] {
                        complete = false;
                        break;
                    }
                    let e = uni
                        .edge_between(g, &w)
                        .expect("both endpoints in the universe");
                    if config.state(e) {
                        open += 1;
                    }
                }
                if complete {
                    Some(open as f64 / model.degree() as f64)
                } else {
                    None
                }
            }
        };
        match value {
            Some(x) => {
                sum += x;
                counted += 1;
            }
            None => skipped += 1,
        }
    }
    Ok(ErgodicAverage {
        observable,
        counted,
        skipped,
        mean: if counted > 0 {
            sum / counted as f64
        } else {
            f64::NAN
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ball, EdgeUniverse};

    fn setup(r: u32, p: f64, seed: u64) -> (GroupModel, EdgeUniverse, f64, u64) {
        let model = GroupModel::zd(2).unwrap();
        let uni = EdgeUniverse::build(&model, Ball::build(&model, r)).unwrap();
        (model, uni, p, seed)
    }

    #[test]
    fn constant_is_one() {
        let (model, uni, p, seed) = setup(5, 0.5, 3);
        let cfg = Configuration::sample(&uni, p, seed).unwrap();
        let w = Window::ball(&uni, 5).unwrap();
        let avg = ergodic_average(&model, &cfg, &w, LocalObservable::Constant).unwrap();
        assert_eq!(avg.mean, 1.0);
        assert_eq!(avg.counted, w.vertex_count());
        assert_eq!(avg.skipped, 0);
    }

    #[test]
    fn inverse_cluster_size_all_closed_is_one() {
        let (model, uni, _, _) = setup(5, 0.0, 1);
        let cfg = Configuration::sample(&uni, 0.0, 1).unwrap();
        let w = Window::ball(&uni, 5).unwrap();
        let avg =
            ergodic_average(&model, &cfg, &w, LocalObservable::InverseClusterSize).unwrap();
        assert_eq!(avg.mean, 1.0);
    }

    #[test]
    fn inverse_cluster_size_sums_to_cluster_count() {
        let (model, uni, _, _) = setup(6, 0.5, 11);
        let cfg = Configuration::sample(&uni, 0.5, 11).unwrap();
        let w = Window::ball(&uni, 6).unwrap();
        let avg =
            ergodic_average(&model, &cfg, &w, LocalObservable::InverseClusterSize).unwrap();
        let k = clusters(&cfg, &w).count() as f64;
        assert!((avg.mean * avg.counted as f64 - k).abs() < 1.0e-9);
    }

    #[test]
    fn incident_fraction_tends_to_p() {
        let (model, uni, p, seed) = setup(30, 0.37, 99);
        let cfg = Configuration::sample(&uni, p, seed).unwrap();
        let w = Window::ball(&uni, 30).unwrap();
        let avg =
            ergodic_average(&model, &cfg, &w, LocalObservable::IncidentOpenFraction).unwrap();
        // exactly the interior B_29 qualifies
        assert_eq!(avg.counted, uni.ball.count_within(29));
        assert_eq!(avg.skipped, w.vertex_count() - avg.counted);
        assert!(
            (avg.mean - p).abs() < 0.03,
            "mean {} vs p {p}",
            avg.mean
        );
    }
}
