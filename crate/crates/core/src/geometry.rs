//! Cayley-graph geometry at desk scale.
//!
//! Balls are materialized by breadth-first search in canonical order: layer by
//! layer, lexicographically by normal form within a layer. Everything
//! downstream (edge enumeration, per-edge randomness, CSV output) inherits its
//! determinism from that order together with content-derived edge keys.

use std::collections::HashMap;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupModel};
use crate::rng::hash_words;

/// Exact rational used for geometry diagnostics.
pub type Rat = Ratio<i128>;

/// Closed ball B_r around the identity, in canonical BFS order.
#[derive(Clone, Debug)]
pub struct Ball {
    pub radius: u32,
    /// Vertices in layer order; ties within a layer broken lexicographically
    /// by normal form.
    pub vertices: Vec<GroupElement>,
    /// Graph distance from the identity, aligned with `vertices`.
    pub dist: Vec<u32>,
    /// `layer_offsets[k]..layer_offsets[k+1]` indexes layer k.
    pub layer_offsets: Vec<usize>,
    index: HashMap<GroupElement, u32>,
}

impl Ball {
    /// BFS enumeration of B_radius.
    pub fn build(model: &GroupModel, radius: u32) -> Ball {
        let origin = model.identity();
        let mut vertices = vec![origin.clone()];
        let mut dist = vec![0u32];
        let mut index = HashMap::new();
        index.insert(origin, 0u32);
        let mut layer_offsets = vec![0usize, 1];
        let mut frontier_start = 0usize;
        for r in 1..=radius {
            let mut layer: Vec<GroupElement> = Vec::new();
            for v in &vertices[frontier_start..] {
                for s in model.generators() {
                    let w = model.multiply_unchecked(v, s);
                    if !index.contains_key(&w) {
                        // reserve the slot now to dedup within the layer;
                        // final indices are assigned after sorting
                        index.insert(w.clone(), u32::MAX);
                        layer.push(w);
                    }
                }
            }
            layer.sort();
            frontier_start = vertices.len();
            for w in layer {
                index.insert(w.clone(), vertices.len() as u32);
                vertices.push(w);
                dist.push(r);
            }
            layer_offsets.push(vertices.len());
        }
        Ball {
            radius,
            vertices,
            dist,
            layer_offsets,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<u32> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    /// f(r) = |B_r| for r ≤ radius.
    pub fn count_within(&self, r: u32) -> usize {
        self.layer_offsets[(r as usize + 1).min(self.layer_offsets.len() - 1)]
    }
}

/// One undirected edge of an edge universe.
#[derive(Clone, Copy, Debug)]
pub struct Edge {
    /// Endpoint vertex indices into the owning ball, `a < b`.
    pub a: u32,
    pub b: u32,
    /// Stable content key derived from the endpoints' normal forms. Identical
    /// for the same group-theoretic edge in any universe, which is what lets
    /// a configuration extend consistently across nested balls.
    pub key: u64,
    /// max(dist(a), dist(b)); the edge belongs to E(B_r) iff this is ≤ r.
    pub max_dist: u32,
}

/// The edge set E(A) of a ball, with adjacency.
#[derive(Clone, Debug)]
pub struct EdgeUniverse {
    pub ball: Ball,
    pub edges: Vec<Edge>,
    /// Per vertex: (edge index, other endpoint).
    pub adj: Vec<Vec<(u32, u32)>>,
}

/// Stable key of the undirected edge {g, h}.
pub fn edge_content_key(g: &GroupElement, h: &GroupElement) -> u64 {
    let (ka, kb) = (g.content_key(), h.content_key());
    hash_words(&[ka.min(kb), ka.max(kb)])
}

impl EdgeUniverse {
    pub fn build(model: &GroupModel, ball: Ball) -> Result<EdgeUniverse> {
        let mut edges = Vec::new();
        let mut adj = vec![Vec::new(); ball.len()];
        for (ai, g) in ball.vertices.iter().enumerate() {
            for s in model.generators() {
                let w = model.multiply_unchecked(g, s);
                if let Some(bi) = ball.index_of(&w) {
                    if (ai as u32) < bi {
                        let key = edge_content_key(g, &w);
                        let e = Edge {
                            a: ai as u32,
                            b: bi,
                            key,
                            max_dist: ball.dist[ai].max(ball.dist[bi as usize]),
                        };
                        let idx = edges.len() as u32;
                        edges.push(e);
                        adj[ai].push((idx, bi));
                        adj[bi as usize].push((idx, ai as u32));
                    }
                }
            }
        }
        // 64-bit content keys must be unique within a universe; a collision
        // would silently correlate two edges' randomness.
        let mut keys: Vec<u64> = edges.iter().map(|e| e.key).collect();
        keys.sort_unstable();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Contract(
                "edge content key collision inside a universe".into(),
            ));
        }
        Ok(EdgeUniverse { ball, edges, adj })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Locate the edge {g, h}, if both endpoints and the edge lie in the
    /// universe.
    pub fn edge_between(&self, g: &GroupElement, h: &GroupElement) -> Option<u32> {
        let gi = self.ball.index_of(g)?;
        let hi = self.ball.index_of(h)?;
        self.adj[gi as usize]
            .iter()
            .find(|(_, other)| *other == hi)
            .map(|(e, _)| *e)
    }
}

/// A vertex window A inside a universe: a sub-ball (around the origin or a
/// shifted center) together with its induced edges E(A).
#[derive(Clone, Debug)]
pub struct Window {
    pub center: u32,
    pub radius: u32,
    pub in_window: Vec<bool>,
    /// Window vertices as universe indices, ascending.
    pub vertices: Vec<u32>,
    /// Universe edge indices with both endpoints in the window, ascending.
    pub edges: Vec<u32>,
}

impl Window {
    /// B_r around the identity inside the universe.
    pub fn ball(universe: &EdgeUniverse, radius: u32) -> Result<Window> {
        if radius > universe.ball.radius {
            return Err(Error::Domain(format!(
                "window radius {radius} exceeds universe radius {}",
                universe.ball.radius
            )));
        }
        let n = universe.ball.count_within(radius);
        let mut in_window = vec![false; universe.ball.len()];
        for slot in in_window.iter_mut().take(n) {
            *slot = true;
        }
        let vertices = (0..n as u32).collect();
        let edges = universe
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.max_dist <= radius)
            .map(|(i, _)| i as u32)
            .collect();
        Ok(Window {
            center: 0,
            radius,
            in_window,
            vertices,
            edges,
        })
    }

    /// B_r around an arbitrary center vertex. Requires dist(origin, center) +
    /// r to fit inside the universe so that graph distances are exact.
    pub fn centered(universe: &EdgeUniverse, center: u32, radius: u32) -> Result<Window> {
        let d0 = universe.ball.dist[center as usize];
        if d0 + radius > universe.ball.radius {
            return Err(Error::Domain(format!(
                "centered window (center distance {d0}, radius {radius}) does not fit in universe radius {}",
                universe.ball.radius
            )));
        }
        let dist = bfs_distances(universe, center, radius);
        let mut in_window = vec![false; universe.ball.len()];
        let mut vertices = Vec::new();
        for (v, d) in dist.iter().enumerate() {
            if d.is_some() {
                in_window[v] = true;
                vertices.push(v as u32);
            }
        }
        let edges = universe
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| in_window[e.a as usize] && in_window[e.b as usize])
            .map(|(i, _)| i as u32)
            .collect();
        Ok(Window {
            center,
            radius,
            in_window,
            vertices,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
}

/// BFS distances from `start` out to `max_dist`, within the universe graph.
/// Exact graph distances as long as the ball of that radius around `start`
/// fits inside the universe.
pub fn bfs_distances(universe: &EdgeUniverse, start: u32, max_dist: u32) -> Vec<Option<u32>> {
    let mut dist = vec![None; universe.ball.len()];
    dist[start as usize] = Some(0);
    let mut frontier = vec![start];
    for d in 1..=max_dist {
        let mut next = Vec::new();
        for &v in &frontier {
            for &(_, w) in &universe.adj[v as usize] {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(d);
                    next.push(w);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    dist
}

/// Vertex and edge boundaries of a window, taken in the ambient Cayley graph
/// (neighbors outside the universe count as outside the window).
#[derive(Clone, Debug)]
pub struct Boundaries {
    /// Universe indices of window vertices with at least one neighbor outside.
    pub vertex_boundary: Vec<u32>,
    /// Number of ambient edges with exactly one endpoint in the window.
    pub edge_boundary: u64,
}

pub fn boundaries(model: &GroupModel, universe: &EdgeUniverse, window: &Window) -> Boundaries {
    let mut vertex_boundary = Vec::new();
    let mut edge_boundary = 0u64;
    for &v in &window.vertices {
        let g = &universe.ball.vertices[v as usize];
        let mut outside = 0u64;
        for s in model.generators() {
            let w = model.multiply_unchecked(g, s);
            let inside = universe
                .ball
                .index_of(&w)
                .map(|wi| window.in_window[wi as usize])
                .unwrap_or(false);
            if !inside {
                outside += 1;
            }
        }
        if outside > 0 {
            vertex_boundary.push(v);
            edge_boundary += outside;
        }
    }
    Boundaries {
        vertex_boundary,
        edge_boundary,
    }
}

/// |∂_V A| / |A| as an exact rational.
pub fn folner_deficiency(model: &GroupModel, universe: &EdgeUniverse, window: &Window) -> Rat {
    let b = boundaries(model, universe, window);
    Rat::new(b.vertex_boundary.len() as i128, window.vertex_count() as i128)
}

/// |H_{i,s}(A)|: translations h ∈ H with both h·x_i and h·x_i·s in A.
/// `coset` and `gen` are zero-based indices into the model's coset
/// representatives and generators.
pub fn coset_window_count(
    model: &GroupModel,
    universe: &EdgeUniverse,
    window: &Window,
    coset: usize,
    gen: usize,
) -> Result<u64> {
    if coset >= model.index_n() {
        return Err(Error::Parameter {
            key: "coset".into(),
            reason: format!("index {coset} out of range (n = {})", model.index_n()),
        });
    }
    let s = &model.generators()[gen];
    let mut count = 0u64;
    for &v in &window.vertices {
        let g = &universe.ball.vertices[v as usize];
        let (_, i) = model.coset_decompose(g)?;
        if i != coset {
            continue;
        }
        let gs = model.multiply_unchecked(g, s);
        let inside = universe
            .ball
            .index_of(&gs)
            .map(|wi| window.in_window[wi as usize])
            .unwrap_or(false);
        if inside {
            count += 1;
        }
    }
    Ok(count)
}

/// Growth and regularity profile of a model, computed exactly on 0..=r_max.
///
/// `m_tail[R]` is the supremum of `nabla` over the *computed* window
/// R..=r_max only; the table is therefore always partial and carries
/// `truncated_at` so downstream users can see the window.
#[derive(Clone, Debug)]
pub struct GrowthTable {
    pub r_max: u32,
    /// f(r) = |B_r|.
    pub f: Vec<u64>,
    /// b(r) = |E(B_r)|.
    pub b: Vec<u64>,
    /// |∂_E B_r|.
    pub edge_boundary: Vec<u64>,
    /// |∂_V B_r|.
    pub vertex_boundary: Vec<u64>,
    /// ∇(r) = (f(r) − f(r−1)) / f(r−1), for r ≥ 1; entry 0 is 0.
    pub nabla: Vec<Rat>,
    /// M(R) = max over computed r ≥ R of ∇(r), for R ≥ 1; entry 0 is 0.
    pub m_tail: Vec<Rat>,
    /// Probe radius g(r) = min{⌊r/2⌋, ⌊¼·log_c r⌋, ⌊M(⌊r/2⌋)^{-1/2}⌋}.
    pub g: Vec<u32>,
    /// |∂_V B_r| / |B_r|.
    pub folner: Vec<Rat>,
    /// The M window stops here (always r_max: the true sup is over all r).
    pub truncated_at: u32,
}

pub fn growth_profile(model: &GroupModel, r_max: u32) -> Result<GrowthTable> {
    if r_max < 2 {
        return Err(Error::Parameter {
            key: "r_max".into(),
            reason: "growth profile needs r_max ≥ 2".into(),
        });
    }
    let ball = Ball::build(model, r_max);
    let universe = EdgeUniverse::build(model, ball)?;
    let ball = &universe.ball;
    let degree = model.degree() as u64;

    let f: Vec<u64> = (0..=r_max).map(|r| ball.count_within(r) as u64).collect();

    let mut b = vec![0u64; (r_max + 1) as usize];
    for e in &universe.edges {
        b[e.max_dist as usize] += 1;
    }
    for r in 1..=r_max as usize {
        b[r] += b[r - 1];
    }

    // Boundary counts: only the outermost layer of each sub-ball can touch
    // the complement.
    let mut edge_boundary = vec![0u64; (r_max + 1) as usize];
    let mut vertex_boundary = vec![0u64; (r_max + 1) as usize];
    for r in 0..=r_max {
        let (lo, hi) = (
            ball.layer_offsets[r as usize],
            ball.layer_offsets[r as usize + 1],
        );
        let mut eb = 0u64;
        let mut vb = 0u64;
        for vi in lo..hi {
            let g = &ball.vertices[vi];
            let mut outside = 0u64;
            for s in model.generators() {
                let w = model.multiply_unchecked(g, s);
                let inside = ball.index_of(&w).map(|wi| ball.dist[wi as usize] <= r).unwrap_or(false);
                if !inside {
                    outside += 1;
                }
            }
            if outside > 0 {
                vb += 1;
                eb += outside;
            }
        }
        edge_boundary[r as usize] = eb;
        vertex_boundary[r as usize] = vb;
    }

    // Degree double-count: 2·b(r) = |S|·f(r) − |∂_E B_r| at every radius.
    for r in 0..=r_max as usize {
        if 2 * b[r] != degree * f[r] - edge_boundary[r] {
            return Err(Error::Contract(format!(
                "edge double-count identity failed at r = {r}: 2·{} ≠ {}·{} − {}",
                b[r], degree, f[r], edge_boundary[r]
            )));
        }
    }

    let mut nabla = vec![Rat::from_integer(0); (r_max + 1) as usize];
    for r in 1..=r_max as usize {
        nabla[r] = Rat::new((f[r] - f[r - 1]) as i128, f[r - 1] as i128);
    }
    let mut m_tail = vec![Rat::from_integer(0); (r_max + 1) as usize];
    m_tail[r_max as usize] = nabla[r_max as usize];
    for r in (1..r_max as usize).rev() {
        m_tail[r] = nabla[r].max(m_tail[r + 1]);
    }

    let c = 2u64.max(degree);
    let mut g = vec![0u32; (r_max + 1) as usize];
    for r in 2..=r_max {
        let half = r / 2;
        let log_term = quarter_log_floor(c, r as u64);
        let m = m_tail[half as usize];
        let m_term = inverse_sqrt_floor(m);
        g[r as usize] = half.min(log_term).min(m_term);
    }

    let folner: Vec<Rat> = (0..=r_max as usize)
        .map(|r| Rat::new(vertex_boundary[r] as i128, f[r] as i128))
        .collect();

    Ok(GrowthTable {
        r_max,
        f,
        b,
        edge_boundary,
        vertex_boundary,
        nabla,
        m_tail,
        g,
        folner,
        truncated_at: r_max,
    })
}

/// ⌊¼·log_c r⌋ by exact integer comparison: the largest k ≥ 0 with c^(4k) ≤ r.
fn quarter_log_floor(c: u64, r: u64) -> u32 {
    let mut k = 0u32;
    let mut power = 1u128;
    let c4 = (c as u128).pow(4);
    loop {
        match power.checked_mul(c4) {
            Some(next) if next <= r as u128 => {
                power = next;
                k += 1;
            }
            _ => return k,
        }
    }
}

/// ⌊m^(−1/2)⌋ for a positive rational m = num/den: the largest t ≥ 0 with
/// t²·num ≤ den.
fn inverse_sqrt_floor(m: Rat) -> u32 {
    let (num, den) = (*m.numer(), *m.denom());
    if num <= 0 {
        return 0;
    }
    let guess = ((den as f64) / (num as f64)).sqrt().floor() as i128;
    let mut t = guess.max(0);
    while t > 0 && t * t * num > den {
        t -= 1;
    }
    while (t + 1) * (t + 1) * num <= den {
        t += 1;
    }
    t as u32
}

impl GrowthTable {
    /// Exact check of the radius-doubling inequality
    /// (f(r) − f(r − g(r))) / f(r) ≤ M(⌊r/2⌋)^{1/2} at every r with g(r) ≥ 1.
    /// Returns the list of radii checked.
    pub fn verify_radius_inequality(&self) -> Result<Vec<u32>> {
        let mut checked = Vec::new();
        for r in 2..=self.r_max {
            let g = self.g[r as usize];
            if g == 0 {
                continue;
            }
            let m = self.m_tail[(r / 2) as usize];
            let (num, den) = (*m.numer(), *m.denom());
            let fr = self.f[r as usize] as i128;
            let fr_inner = self.f[(r - g) as usize] as i128;
            let lhs = fr - fr_inner;
            // (lhs/fr)² ≤ num/den  ⇔  lhs²·den ≤ num·fr²
            if lhs * lhs * den > num * fr * fr {
                return Err(Error::Contract(format!(
                    "radius-doubling inequality failed at r = {r} (g = {g})"
                )));
            }
            checked.push(r);
        }
        Ok(checked)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1() -> GroupModel {
        GroupModel::zd(1).unwrap()
    }
    fn z2() -> GroupModel {
        GroupModel::zd(2).unwrap()
    }

    /// Independent ball oracle: multiply out all words of length ≤ r.
    fn word_ball(model: &GroupModel, r: u32) -> Vec<GroupElement> {
        let mut current = vec![model.identity()];
        let mut seen: std::collections::HashSet<GroupElement> = current.iter().cloned().collect();
        for _ in 0..r {
            let mut next = Vec::new();
            for g in &current {
                for s in model.generators() {
                    let w = model.multiply_unchecked(g, s);
                    if seen.insert(w.clone()) {
                        next.push(w);
                    }
                }
            }
            current = next;
        }
        let mut out: Vec<GroupElement> = seen.into_iter().collect();
        out.sort();
        out
    }

    #[test]
    fn ball_sizes_match_closed_forms() {
        let b = Ball::build(&z1(), 7);
        assert_eq!(b.len(), 15); // 2r+1
        let b = Ball::build(&z2(), 6);
        assert_eq!(b.len(), 85); // 2r²+2r+1
        let z3 = GroupModel::zd(3).unwrap();
        let b = Ball::build(&z3, 4);
        // (4r³ + 6r² + 8r + 3)/3
        assert_eq!(b.len(), (4 * 64 + 6 * 16 + 8 * 4 + 3) / 3);
        let zc = GroupModel::zd_times_cyclic(1, 2).unwrap();
        let b = Ball::build(&zc, 5);
        assert_eq!(b.len(), 4 * 5); // (2r+1) + (2r−1)
    }

    #[test]
    fn balls_match_word_enumeration_oracle() {
        for model in [
            z2(),
            GroupModel::zd_times_cyclic(1, 3).unwrap(),
            GroupModel::heisenberg(),
        ] {
            let r = 4;
            let ball = Ball::build(&model, r);
            let mut got = ball.vertices.clone();
            got.sort();
            assert_eq!(got, word_ball(&model, r), "model {}", model.name());
        }
    }

    #[test]
    fn layers_are_sorted_and_distances_correct() {
        let model = GroupModel::heisenberg();
        let ball = Ball::build(&model, 4);
        for r in 0..=4usize {
            let layer = &ball.vertices[ball.layer_offsets[r]..ball.layer_offsets[r + 1]];
            assert!(layer.windows(2).all(|w| w[0] < w[1]));
            for v in layer {
                assert_eq!(ball.dist[ball.index_of(v).unwrap() as usize], r as u32);
            }
        }
        // distance is a word metric: d(xy) = 2
        let xy = GroupElement::new(vec![1, 1, 0], 0);
        assert_eq!(ball.dist[ball.index_of(&xy).unwrap() as usize], 2);
        // z = [x,y] needs 4 letters
        let z = GroupElement::new(vec![0, 0, 1], 0);
        assert_eq!(ball.dist[ball.index_of(&z).unwrap() as usize], 4);
    }

    #[test]
    fn edge_universe_counts_z2() {
        let model = z2();
        let ball = Ball::build(&model, 6);
        let uni = EdgeUniverse::build(&model, ball).unwrap();
        assert_eq!(uni.edge_count(), 4 * 36); // b_r = 4r² on Z²
        for e in &uni.edges {
            assert!(e.a < e.b);
        }
        // adjacency degree never exceeds |S|
        assert!(uni.adj.iter().all(|a| a.len() <= model.degree()));
    }

    #[test]
    fn edge_keys_are_content_derived_across_universes() {
        let model = z2();
        let small = EdgeUniverse::build(&model, Ball::build(&model, 3)).unwrap();
        let large = EdgeUniverse::build(&model, Ball::build(&model, 7)).unwrap();
        for e in &small.edges {
            let g = &small.ball.vertices[e.a as usize];
            let h = &small.ball.vertices[e.b as usize];
            let in_large = large.edge_between(g, h).unwrap();
            assert_eq!(large.edges[in_large as usize].key, e.key);
        }
    }

    #[test]
    fn window_ball_and_centered_agree_at_origin() {
        let model = z2();
        let uni = EdgeUniverse::build(&model, Ball::build(&model, 8)).unwrap();
        let a = Window::ball(&uni, 3).unwrap();
        let b = Window::centered(&uni, 0, 3).unwrap();
        assert_eq!(a.vertices, b.vertices);
        assert_eq!(a.edges, b.edges);
        assert_eq!(a.vertex_count(), 25);
    }

    #[test]
    fn centered_window_is_translated_ball() {
        let model = z2();
        let uni = EdgeUniverse::build(&model, Ball::build(&model, 8)).unwrap();
        let center_el = GroupElement::new(vec![2, -1], 0);
        let center = uni.ball.index_of(&center_el).unwrap();
        let w = Window::centered(&uni, center, 3).unwrap();
        assert_eq!(w.vertex_count(), 25);
        // every window vertex is center·v for v in B_3
        let b3 = Ball::build(&model, 3);
        let mut expect: Vec<GroupElement> = b3
            .vertices
            .iter()
            .map(|v| model.multiply_unchecked(&center_el, v))
            .collect();
        expect.sort();
        let mut got: Vec<GroupElement> = w
            .vertices
            .iter()
            .map(|&vi| uni.ball.vertices[vi as usize].clone())
            .collect();
        got.sort();
        assert_eq!(got, expect);
    }

    #[test]
    fn centered_window_requires_headroom() {
        let model = z2();
        let uni = EdgeUniverse::build(&model, Ball::build(&model, 4)).unwrap();
        let far = uni
            .ball
            .index_of(&GroupElement::new(vec![4, 0], 0))
            .unwrap();
        assert!(Window::centered(&uni, far, 1).is_err());
    }

    #[test]
    fn boundary_counts_z2() {
        let model = z2();
        let uni = EdgeUniverse::build(&model, Ball::build(&model, 6)).unwrap();
        let w = Window::ball(&uni, 4).unwrap();
        let b = boundaries(&model, &uni, &w);
        // ∂_V B_r is the outermost layer (4r vertices on Z²)
        assert_eq!(b.vertex_boundary.len(), 16);
        // 2·b_r = |S|·f(r) − |∂_E B_r|
        assert_eq!(2 * 64, 4 * 41 - b.edge_boundary as usize);
    }

    #[test]
    fn growth_profile_z2_values() {
        let model = z2();
        let t = growth_profile(&model, 20).unwrap();
        assert_eq!(t.f[5], 61);
        assert_eq!(t.b[5], 100);
        assert_eq!(t.nabla[5], Rat::new(61 - 41, 41));
        // Følner deficiency strictly decreasing on 2..=20
        for r in 3..=20usize {
            assert!(t.folner[r] < t.folner[r - 1], "deficiency not strict at {r}");
        }
        t.verify_radius_inequality().unwrap();
    }

    #[test]
    fn growth_g_is_capped_by_half_radius() {
        for model in [z1(), z2(), GroupModel::heisenberg()] {
            let t = growth_profile(&model, 16).unwrap();
            for r in 0..=16usize {
                assert!(t.g[r] <= (r / 2) as u32);
            }
        }
    }

    #[test]
    fn quarter_log_floor_integer_comparisons() {
        assert_eq!(quarter_log_floor(2, 15), 0);
        assert_eq!(quarter_log_floor(2, 16), 1);
        assert_eq!(quarter_log_floor(2, 255), 1);
        assert_eq!(quarter_log_floor(2, 256), 2);
        assert_eq!(quarter_log_floor(4, 255), 0);
        assert_eq!(quarter_log_floor(4, 256), 1);
    }

    #[test]
    fn inverse_sqrt_floor_exact() {
        assert_eq!(inverse_sqrt_floor(Rat::new(1, 4)), 2);
        assert_eq!(inverse_sqrt_floor(Rat::new(1, 5)), 2);
        assert_eq!(inverse_sqrt_floor(Rat::new(1, 9)), 3);
        assert_eq!(inverse_sqrt_floor(Rat::new(2, 9)), 2);
        assert_eq!(inverse_sqrt_floor(Rat::new(5, 1)), 0);
    }

    #[test]
    fn coset_window_counts_z_times_c2() {
        let model = GroupModel::zd_times_cyclic(1, 2).unwrap();
        let uni = EdgeUniverse::build(&model, Ball::build(&model, 12)).unwrap();
        let w = Window::ball(&uni, 10).unwrap();
        // |B_10| = 40; coset 0 with the +shift: k ∈ [−10, 9] → 20
        assert_eq!(w.vertex_count(), 40);
        let c = coset_window_count(&model, &uni, &w, 0, 0).unwrap();
        assert_eq!(c, 20);
        // coset 1 with the +shift: k ∈ [−9, 8] → 18
        let c = coset_window_count(&model, &uni, &w, 1, 0).unwrap();
        assert_eq!(c, 18);
    }
}
