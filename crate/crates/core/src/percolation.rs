//! Bernoulli bond percolation on a materialized edge universe.
//!
//! The open/closed state of an edge is a pure function of the master seed,
//! the edge's content key, and a sparse override map. Nothing depends on
//! enumeration order, so a configuration restricted to a nested sub-ball is
//! literally the same randomness, and replicate sweeps can run on any number
//! of workers without changing a single bit.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::geometry::{bfs_distances, EdgeUniverse, Window};
use crate::group::GroupModel;
use crate::order::designated_endpoint;
use crate::rng::{bernoulli, bernoulli_threshold, salt};

/// One percolation configuration ω on a universe.
#[derive(Clone)]
pub struct Configuration<'u> {
    pub universe: &'u EdgeUniverse,
    pub master_seed: u64,
    pub p: f64,
    threshold: u64,
    states: Vec<bool>,
    overrides: BTreeMap<u32, bool>,
}

impl<'u> Configuration<'u> {
    /// Sample ω: every edge keys its own Bernoulli draw.
    pub fn sample(universe: &'u EdgeUniverse, p: f64, master_seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter {
                key: "p".into(),
                reason: format!("probability {p} outside [0, 1]"),
            });
        }
        let threshold = bernoulli_threshold(p);
        let states = universe
            .edges
            .iter()
            .map(|e| bernoulli(master_seed, e.key, salt::EDGE_STATE, threshold))
            .collect();
        Ok(Configuration {
            universe,
            master_seed,
            p,
            threshold,
            states,
            overrides: BTreeMap::new(),
        })
    }

    /// Build from explicit per-edge states (translated views, conditioned
    /// draws, tests).
    pub fn from_states(
        universe: &'u EdgeUniverse,
        p: f64,
        master_seed: u64,
        states: Vec<bool>,
    ) -> Result<Self> {
        if states.len() != universe.edge_count() {
            return Err(Error::Domain(format!(
                "state vector length {} does not match universe edge count {}",
                states.len(),
                universe.edge_count()
            )));
        }
        Ok(Configuration {
            universe,
            master_seed,
            p,
            threshold: bernoulli_threshold(p),
            states,
            overrides: BTreeMap::new(),
        })
    }

    #[inline]
    pub fn state(&self, edge: u32) -> bool {
        match self.overrides.get(&edge) {
            Some(&s) => s,
            None => self.states[edge as usize],
        }
    }

    /// ω^e: identical to self except edge e carries an independent resample
    /// keyed by `aux_seed`. Pure in (self, e, aux_seed).
    pub fn resample_edge(&self, edge: u32, aux_seed: u64) -> Result<Self> {
        if edge as usize >= self.universe.edge_count() {
            return Err(Error::Domain(format!("edge {edge} outside universe")));
        }
        let key = self.universe.edges[edge as usize].key;
        let fresh = bernoulli(aux_seed, key, salt::RESAMPLE, self.threshold);
        let mut out = self.clone();
        out.overrides.insert(edge, fresh);
        Ok(out)
    }

    /// Flip a single edge deterministically (the |D| ≤ 1 diagnostics use
    /// this; the resampled variant is the one the theory is stated for).
    pub fn flip_edge(&self, edge: u32) -> Result<Self> {
        if edge as usize >= self.universe.edge_count() {
            return Err(Error::Domain(format!("edge {edge} outside universe")));
        }
        let mut out = self.clone();
        out.overrides.insert(edge, !self.state(edge));
        Ok(out)
    }

    /// Force a single edge to a chosen state.
    pub fn set_edge(&self, edge: u32, open: bool) -> Result<Self> {
        if edge as usize >= self.universe.edge_count() {
            return Err(Error::Domain(format!("edge {edge} outside universe")));
        }
        let mut out = self.clone();
        out.overrides.insert(edge, open);
        Ok(out)
    }

    pub fn overrides(&self) -> &BTreeMap<u32, bool> {
        &self.overrides
    }

    pub fn open_edge_count(&self, window: &Window) -> u64 {
        window.edges.iter().filter(|&&e| self.state(e)).count() as u64
    }
}

/// Cluster decomposition of a window under a configuration.
#[derive(Clone, Debug)]
pub struct ClusterPartition {
    /// Component id per universe vertex; `None` outside the window.
    /// Ids are assigned by first appearance in ascending vertex order.
    pub component_of: Vec<Option<u32>>,
    /// Component sizes, indexed by component id.
    pub sizes: Vec<u32>,
}

impl ClusterPartition {
    pub fn count(&self) -> u64 {
        self.sizes.len() as u64
    }

    pub fn largest(&self) -> u32 {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    /// Σ_x 1/|C(x)| as an exact rational; equals the cluster count.
    pub fn identity_sum(&self) -> BigRational {
        let mut sum = BigRational::from_integer(BigInt::from(0));
        for c in self.component_of.iter().flatten() {
            sum += BigRational::new(BigInt::from(1), BigInt::from(self.sizes[*c as usize]));
        }
        sum
    }
}

/// Union-find clusters of the open subgraph on a window.
pub fn clusters(config: &Configuration, window: &Window) -> ClusterPartition {
    let n = config.universe.ball.len();
    let mut parent: Vec<u32> = (0..n as u32).collect();

    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }

    for &ei in &window.edges {
        if config.state(ei) {
            let e = &config.universe.edges[ei as usize];
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            if ra != rb {
                parent[ra as usize] = rb;
            }
        }
    }

    let mut component_of = vec![None; n];
    let mut sizes = Vec::new();
    let mut id_of_root: BTreeMap<u32, u32> = BTreeMap::new();
    for &v in &window.vertices {
        let root = find(&mut parent, v);
        let id = *id_of_root.entry(root).or_insert_with(|| {
            sizes.push(0);
            (sizes.len() - 1) as u32
        });
        sizes[id as usize] += 1;
        component_of[v as usize] = Some(id);
    }
    ClusterPartition {
        component_of,
        sizes,
    }
}

/// Exhaustive classification of the local geometry of an edge at probe
/// radius m, based on the two endpoint clusters restricted to B_m(x₁(e))
/// with e itself removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeEvent {
    /// The restricted clusters intersect (the endpoints are joined off e).
    Linked,
    /// Disjoint, and at least one endpoint's cluster never reaches distance
    /// exactly m from its own endpoint.
    Confined,
    /// Disjoint, and both clusters reach distance exactly m from their own
    /// endpoints.
    BothReach,
}

/// Classify the edge event at probe radius m ≥ 1.
///
/// Needs headroom dist(origin, x₁) + m + 1 ≤ universe radius so that graph
/// distances from both endpoints are exact inside the probe ball.
pub fn classify_edge_event(
    model: &GroupModel,
    config: &Configuration,
    edge: u32,
    m: u32,
) -> Result<EdgeEvent> {
    if m == 0 {
        return Err(Error::Parameter {
            key: "m".into(),
            reason: "probe radius must be at least 1".into(),
        });
    }
    let universe = config.universe;
    let x1 = designated_endpoint(model, universe, edge);
    let e = &universe.edges[edge as usize];
    let x2 = if x1 == e.a { e.b } else { e.a };
    let d0 = universe.ball.dist[x1 as usize];
    if d0 + m + 1 > universe.ball.radius {
        return Err(Error::Domain(format!(
            "probe ball B_{m} around x1 (distance {d0}) does not fit in universe radius {}",
            universe.ball.radius
        )));
    }
    let dist_x1 = bfs_distances(universe, x1, m);

    // restricted cluster: open edges except e, both endpoints inside B_m(x1)
    let restricted_cluster = |start: u32| -> Vec<u32> {
        let mut seen = vec![false; universe.ball.len()];
        seen[start as usize] = true;
        let mut stack = vec![start];
        let mut out = vec![start];
        while let Some(v) = stack.pop() {
            for &(ei, w) in &universe.adj[v as usize] {
                if ei == edge || !config.state(ei) {
                    continue;
                }
                if dist_x1[w as usize].is_none() || seen[w as usize] {
                    continue;
                }
                seen[w as usize] = true;
                stack.push(w);
                out.push(w);
            }
        }
        out
    };

    let c1 = restricted_cluster(x1);
    let c2 = restricted_cluster(x2);
    let mut in_c1 = vec![false; universe.ball.len()];
    for &v in &c1 {
        in_c1[v as usize] = true;
    }
    if c2.iter().any(|&v| in_c1[v as usize]) {
        return Ok(EdgeEvent::Linked);
    }
    // both clusters live in the same probe ball; "reach" is touching its
    // inner vertex boundary
    let reach1 = c1.iter().any(|&v| dist_x1[v as usize] == Some(m));
    let reach2 = c2.iter().any(|&v| dist_x1[v as usize] == Some(m));
    if reach1 && reach2 {
        Ok(EdgeEvent::BothReach)
    } else {
        Ok(EdgeEvent::Confined)
    }
}

/// Exact rational lower bound τ(p) = ¼·c_min²·(1−p)^d_max on the per-site
/// variance contribution, with c_min = 1 − (1−p)^|S| and d_max = |S|.
#[derive(Clone, Debug)]
pub struct TauBound {
    pub tau: BigRational,
    pub c_min: BigRational,
    pub d_max: u32,
}

pub fn tau_lower_bound(model: &GroupModel, p: f64) -> Result<TauBound> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::Parameter {
            key: "p".into(),
            reason: "tau bound needs 0 < p < 1".into(),
        });
    }
    // f64 probabilities are dyadic rationals, so this conversion is exact
    let p_exact = BigRational::from_float(p).expect("finite probability");
    let one = BigRational::from_integer(BigInt::from(1));
    let q = one.clone() - p_exact;
    let deg = model.degree() as i32;
    let mut q_pow = one.clone();
    for _ in 0..deg {
        q_pow *= q.clone();
    }
    let c_min = one - q_pow.clone();
    let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
    Ok(TauBound {
        tau: quarter * c_min.clone() * c_min.clone() * q_pow,
        c_min,
        d_max: deg as u32,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Ball;
    use crate::group::GroupElement;

    fn z2_universe(r: u32) -> (GroupModel, EdgeUniverse) {
        let model = GroupModel::zd(2).unwrap();
        let uni = EdgeUniverse::build(&model, Ball::build(&model, r)).unwrap();
        (model, uni)
    }

    #[test]
    fn states_are_pure_and_order_free() {
        let (_, uni) = z2_universe(5);
        let a = Configuration::sample(&uni, 0.4, 99).unwrap();
        let b = Configuration::sample(&uni, 0.4, 99).unwrap();
        for e in 0..uni.edge_count() as u32 {
            assert_eq!(a.state(e), b.state(e));
        }
        let c = Configuration::sample(&uni, 0.4, 100).unwrap();
        assert!((0..uni.edge_count() as u32).any(|e| a.state(e) != c.state(e)));
    }

    #[test]
    fn nested_universe_restriction_is_identical() {
        let model = GroupModel::zd(2).unwrap();
        let small = EdgeUniverse::build(&model, Ball::build(&model, 4)).unwrap();
        let large = EdgeUniverse::build(&model, Ball::build(&model, 9)).unwrap();
        let cs = Configuration::sample(&small, 0.3, 7).unwrap();
        let cl = Configuration::sample(&large, 0.3, 7).unwrap();
        for (i, e) in small.edges.iter().enumerate() {
            let g = &small.ball.vertices[e.a as usize];
            let h = &small.ball.vertices[e.b as usize];
            let j = cl.universe.edge_between(g, h).unwrap();
            assert_eq!(cs.state(i as u32), cl.state(j));
        }
    }

    #[test]
    fn resample_is_idempotent_and_local() {
        let (_, uni) = z2_universe(4);
        let base = Configuration::sample(&uni, 0.5, 11).unwrap();
        let r1 = base.resample_edge(3, 1234).unwrap();
        let r2 = base.resample_edge(3, 1234).unwrap();
        assert_eq!(r1.state(3), r2.state(3));
        for e in 0..uni.edge_count() as u32 {
            if e != 3 {
                assert_eq!(base.state(e), r1.state(e));
            }
        }
        let flipped = base.flip_edge(3).unwrap();
        assert_ne!(flipped.state(3), base.state(3));
    }

    #[test]
    fn all_closed_clusters_are_singletons() {
        let (_, uni) = z2_universe(4);
        let cfg = Configuration::sample(&uni, 0.0, 1).unwrap();
        let w = Window::ball(&uni, 4).unwrap();
        let part = clusters(&cfg, &w);
        assert_eq!(part.count(), w.vertex_count() as u64);
        assert_eq!(part.largest(), 1);
        assert_eq!(
            part.identity_sum(),
            BigRational::from_integer(BigInt::from(w.vertex_count()))
        );
    }

    #[test]
    fn all_open_is_one_cluster() {
        let (_, uni) = z2_universe(4);
        let cfg = Configuration::sample(&uni, 1.0, 1).unwrap();
        let w = Window::ball(&uni, 4).unwrap();
        let part = clusters(&cfg, &w);
        assert_eq!(part.count(), 1);
        assert_eq!(part.largest(), w.vertex_count() as u32);
    }

    #[test]
    fn cluster_identity_matches_count_on_random_draws() {
        let (_, uni) = z2_universe(5);
        let w = Window::ball(&uni, 5).unwrap();
        for seed in 0..30u64 {
            let cfg = Configuration::sample(&uni, 0.45, seed).unwrap();
            let part = clusters(&cfg, &w);
            assert_eq!(
                part.identity_sum(),
                BigRational::from_integer(BigInt::from(part.count()))
            );
        }
    }

    #[test]
    fn clusters_respect_window_not_universe() {
        // an open path leaving the window must not merge clusters inside
        let (_, uni) = z2_universe(6);
        let w = Window::ball(&uni, 2).unwrap();
        let cfg = Configuration::sample(&uni, 1.0, 5).unwrap();
        let part = clusters(&cfg, &w);
        assert_eq!(part.count(), 1);
        assert_eq!(part.sizes.iter().sum::<u32>() as usize, w.vertex_count());
        for (v, c) in part.component_of.iter().enumerate() {
            assert_eq!(c.is_some(), w.in_window[v]);
        }
    }

    /// Edge named by its Z² endpoint coordinates.
    type CoordEdge = ((i64, i64), (i64, i64));

    /// Build a configuration with exactly the given open edges (by endpoint
    /// coordinates).
    fn handmade<'u>(
        model: &GroupModel,
        uni: &'u EdgeUniverse,
        open: &[CoordEdge],
    ) -> Configuration<'u> {
        let mut states = vec![false; uni.edge_count()];
        for ((ax, ay), (bx, by)) in open {
            let g = GroupElement::new(vec![*ax, *ay], 0);
            let h = GroupElement::new(vec![*bx, *by], 0);
            let e = uni.edge_between(&g, &h).unwrap_or_else(|| {
                panic!("no edge between {g:?} and {h:?}");
            });
            states[e as usize] = true;
        }
        let _ = model;
        Configuration::from_states(uni, 0.5, 0, states).unwrap()
    }

    #[test]
    fn edge_event_confined_when_all_closed() {
        let (model, uni) = z2_universe(6);
        let cfg = handmade(&model, &uni, &[]);
        let e = uni
            .edge_between(
                &GroupElement::new(vec![0, 0], 0),
                &GroupElement::new(vec![1, 0], 0),
            )
            .unwrap();
        assert_eq!(
            classify_edge_event(&model, &cfg, e, 3).unwrap(),
            EdgeEvent::Confined
        );
    }

    #[test]
    fn edge_event_linked_by_detour() {
        let (model, uni) = z2_universe(6);
        // open square detour around e = {(0,0),(1,0)}
        let cfg = handmade(
            &model,
            &uni,
            &[
                ((0, 0), (0, 1)),
                ((0, 1), (1, 1)),
                ((1, 1), (1, 0)),
            ],
        );
        let e = uni
            .edge_between(
                &GroupElement::new(vec![0, 0], 0),
                &GroupElement::new(vec![1, 0], 0),
            )
            .unwrap();
        assert_eq!(
            classify_edge_event(&model, &cfg, e, 3).unwrap(),
            EdgeEvent::Linked
        );
    }

    #[test]
    fn edge_event_both_reach_on_straight_arms() {
        let (model, uni) = z2_universe(8);
        // arms going away from both endpoints of e = {(0,0),(1,0)}, length 3
        let cfg = handmade(
            &model,
            &uni,
            &[
                ((0, 0), (-1, 0)),
                ((-1, 0), (-2, 0)),
                ((-2, 0), (-3, 0)),
                ((1, 0), (2, 0)),
                ((2, 0), (3, 0)),
                ((3, 0), (4, 0)),
            ],
        );
        let e = uni
            .edge_between(
                &GroupElement::new(vec![0, 0], 0),
                &GroupElement::new(vec![1, 0], 0),
            )
            .unwrap();
        assert_eq!(
            classify_edge_event(&model, &cfg, e, 3).unwrap(),
            EdgeEvent::BothReach
        );
        // one arm too short → confined
        let cfg = handmade(
            &model,
            &uni,
            &[
                ((0, 0), (-1, 0)),
                ((-1, 0), (-2, 0)),
                ((-2, 0), (-3, 0)),
                ((1, 0), (2, 0)),
            ],
        );
        assert_eq!(
            classify_edge_event(&model, &cfg, e, 3).unwrap(),
            EdgeEvent::Confined
        );
    }

    #[test]
    fn edge_events_partition_on_random_draws() {
        let (model, uni) = z2_universe(8);
        let e = uni
            .edge_between(
                &GroupElement::new(vec![0, 0], 0),
                &GroupElement::new(vec![1, 0], 0),
            )
            .unwrap();
        let mut seen = [0u32; 3];
        for seed in 0..1000u64 {
            let cfg = Configuration::sample(&uni, 0.5, seed).unwrap();
            // classification is total: exactly one class per draw
            match classify_edge_event(&model, &cfg, e, 3).unwrap() {
                EdgeEvent::Linked => seen[0] += 1,
                EdgeEvent::Confined => seen[1] += 1,
                EdgeEvent::BothReach => seen[2] += 1,
            }
        }
        assert_eq!(seen.iter().sum::<u32>(), 1000);
        assert!(seen.iter().all(|&c| c > 0), "all classes should occur: {seen:?}");
    }

    #[test]
    fn tau_bound_z2_half() {
        let model = GroupModel::zd(2).unwrap();
        let t = tau_lower_bound(&model, 0.5).unwrap();
        assert_eq!(
            t.tau,
            BigRational::new(BigInt::from(225), BigInt::from(16384))
        );
        assert_eq!(
            t.c_min,
            BigRational::new(BigInt::from(15), BigInt::from(16))
        );
        assert_eq!(t.d_max, 4);
    }
}
