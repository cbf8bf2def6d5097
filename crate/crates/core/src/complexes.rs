//! Simplicial complexes generated from the open subgraph of a window.
//!
//! Three rules are built in:
//! * `Clique` — complete subgraphs of the open subgraph (basic diameter 1);
//! * `Neighbor` — subsets of a closed neighborhood {v} ∪ N(v), with N taken
//!   in the open subgraph (basic diameter 2);
//! * `Path(k)` — downward closure of vertex sets of simple open paths with
//!   at most k edges (basic diameter k).
//!
//! Every build verifies downward closure and per-simplex connectivity before
//! returning; rule-level guarantees (monotonicity, equivariance, confinement
//! radius) are exercised by the audits at the bottom of the module.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::{bfs_distances, EdgeUniverse, Window};
use crate::group::{GroupElement, GroupModel};
use crate::percolation::{clusters, Configuration};
use crate::rng::{bernoulli, bernoulli_threshold, derive_seed, hash_words, salt};

/// A simplex as a sorted list of universe vertex indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(pub Vec<u32>);

impl Simplex {
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }
}

impl std::fmt::Debug for Simplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "⟨")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "⟩")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Clique,
    Neighbor,
    /// Simple open paths with at most this many edges.
    Path(u32),
}

/// A complex rule plus its dimension cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleDescriptor {
    pub kind: RuleKind,
    /// Simplices above this dimension are not generated.
    pub dim_cap: usize,
}

impl RuleDescriptor {
    pub fn new(kind: RuleKind, dim_cap: usize) -> Self {
        RuleDescriptor { kind, dim_cap }
    }

    /// The radius T that confines any simplex's generating subgraph.
    pub fn basic_diameter(&self) -> u32 {
        match self.kind {
            RuleKind::Clique => 1,
            RuleKind::Neighbor => 2,
            RuleKind::Path(k) => k,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            RuleKind::Clique => "clique".into(),
            RuleKind::Neighbor => "neighbor".into(),
            RuleKind::Path(k) => format!("path_{k}"),
        }
    }
}

/// Default cap on the total number of simplices a build may produce.
pub const DEFAULT_SIMPLEX_CAP: usize = 2_000_000;

/// A finite simplicial complex, simplices bucketed and sorted by dimension.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    pub by_dim: Vec<Vec<Simplex>>,
    pub dim_cap: usize,
}

impl SimplicialComplex {
    pub fn count(&self, dim: usize) -> usize {
        self.by_dim.get(dim).map(|v| v.len()).unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.by_dim.iter().map(|v| v.len()).sum()
    }

    /// Position of a simplex among its dimension bucket.
    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        let bucket = self.by_dim.get(s.dim())?;
        bucket.binary_search(s).ok()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Is `self` a subcomplex of `other`?
    pub fn subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.by_dim
            .iter()
            .flatten()
            .all(|s| other.contains(s))
    }
}

/// Sorted open-neighbor lists on a window.
fn open_adjacency(config: &Configuration, window: &Window) -> Vec<Vec<u32>> {
    let n = config.universe.ball.len();
    let mut adj = vec![Vec::new(); n];
    for &ei in &window.edges {
        if config.state(ei) {
            let e = &config.universe.edges[ei as usize];
            adj[e.a as usize].push(e.b);
            adj[e.b as usize].push(e.a);
        }
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    adj
}

/// Build the complex of `rule` on the open subgraph of `window`.
pub fn build(
    rule: RuleDescriptor,
    config: &Configuration,
    window: &Window,
) -> Result<SimplicialComplex> {
    build_capped(rule, config, window, DEFAULT_SIMPLEX_CAP)
}

pub fn build_capped(
    rule: RuleDescriptor,
    config: &Configuration,
    window: &Window,
    cap: usize,
) -> Result<SimplicialComplex> {
    let adj = open_adjacency(config, window);
    let mut set: BTreeSet<Simplex> = BTreeSet::new();
    for &v in &window.vertices {
        set.insert(Simplex(vec![v]));
    }

    match rule.kind {
        RuleKind::Clique => {
            // extend cliques one vertex at a time, always past the maximum
            let mut current: Vec<Vec<u32>> =
                window.vertices.iter().map(|&v| vec![v]).collect();
            for _dim in 1..=rule.dim_cap {
                let mut next: Vec<Vec<u32>> = Vec::new();
                for c in &current {
                    let last = *c.last().unwrap();
                    for &w in &adj[last as usize] {
                        if w <= last {
                            continue;
                        }
                        if c.iter().all(|&u| adj[u as usize].binary_search(&w).is_ok()) {
                            let mut ext = c.clone();
                            ext.push(w);
                            next.push(ext);
                        }
                    }
                }
                if next.is_empty() {
                    break;
                }
                for c in &next {
                    set.insert(Simplex(c.clone()));
                    check_cap(set.len(), cap)?;
                }
                current = next;
            }
        }
        RuleKind::Neighbor => {
            let max_size = rule.dim_cap + 1;
            for &v in &window.vertices {
                let mut hood = adj[v as usize].clone();
                hood.push(v);
                hood.sort_unstable();
                insert_subsets(&hood, max_size, &mut set, cap)?;
            }
        }
        RuleKind::Path(k) => {
            let max_size = rule.dim_cap + 1;
            // DFS over simple paths of ≤ k edges; close each vertex set
            for &v in &window.vertices {
                let mut path = vec![v];
                dfs_paths(&adj, k, &mut path, &mut |p: &[u32]| {
                    let mut sorted = p.to_vec();
                    sorted.sort_unstable();
                    insert_subsets(&sorted, max_size, &mut set, cap)
                })?;
            }
        }
    }

    // bucket by dimension
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); rule.dim_cap + 1];
    for s in set {
        by_dim[s.dim()].push(s);
    }
    // BTreeSet iteration is globally sorted, and sortedness is preserved per
    // bucket; keep the invariant explicit anyway
    debug_assert!(by_dim
        .iter()
        .all(|b| b.windows(2).all(|w| w[0] < w[1])));
    let complex = SimplicialComplex {
        by_dim,
        dim_cap: rule.dim_cap,
    };
    verify_complex(&complex, config, window)?;
    Ok(complex)
}

fn check_cap(len: usize, cap: usize) -> Result<()> {
    if len > cap {
        return Err(Error::SizeLimit {
            what: "simplex count".into(),
            reached: len,
            cap,
        });
    }
    Ok(())
}

fn insert_subsets(
    sorted: &[u32],
    max_size: usize,
    set: &mut BTreeSet<Simplex>,
    cap: usize,
) -> Result<()> {
    let n = sorted.len();
    // all non-empty subsets up to max_size; n stays small (≤ degree+1 or k+1)
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() as usize > max_size {
            continue;
        }
        let subset: Vec<u32> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| sorted[i])
            .collect();
        set.insert(Simplex(subset));
        check_cap(set.len(), cap)?;
    }
    Ok(())
}

fn dfs_paths(
    adj: &[Vec<u32>],
    budget: u32,
    path: &mut Vec<u32>,
    visit: &mut impl FnMut(&[u32]) -> Result<()>,
) -> Result<()> {
    visit(path)?;
    if budget == 0 {
        return Ok(());
    }
    let tip = *path.last().unwrap();
    for &w in &adj[tip as usize] {
        if path.contains(&w) {
            continue;
        }
        path.push(w);
        dfs_paths(adj, budget - 1, path, visit)?;
        path.pop();
    }
    Ok(())
}

/// Downward closure and per-simplex connectivity, checked on every build.
fn verify_complex(
    complex: &SimplicialComplex,
    config: &Configuration,
    window: &Window,
) -> Result<()> {
    for dim in 1..complex.by_dim.len() {
        for s in &complex.by_dim[dim] {
            for drop in 0..s.0.len() {
                let mut face = s.0.clone();
                face.remove(drop);
                if !complex.contains(&Simplex(face)) {
                    return Err(Error::Contract(format!(
                        "downward closure violated at {s:?}"
                    )));
                }
            }
        }
    }
    let part = clusters(config, window);
    for bucket in &complex.by_dim {
        for s in bucket {
            let c0 = part.component_of[s.0[0] as usize];
            if s.0.iter().any(|&v| part.component_of[v as usize] != c0) {
                return Err(Error::Contract(format!(
                    "simplex {s:?} spans several open components"
                )));
            }
        }
    }
    Ok(())
}

/// Simplices of a complex as sorted lists of group elements — the
/// representation used to compare complexes across different windows.
pub fn simplices_as_elements(
    complex: &SimplicialComplex,
    universe: &EdgeUniverse,
) -> Vec<Vec<GroupElement>> {
    let mut out: Vec<Vec<GroupElement>> = complex
        .by_dim
        .iter()
        .flatten()
        .map(|s| {
            let mut els: Vec<GroupElement> = s
                .0
                .iter()
                .map(|&v| universe.ball.vertices[v as usize].clone())
                .collect();
            els.sort();
            els
        })
        .collect();
    out.sort();
    out
}

/// Options for the rule audits.
#[derive(Clone, Copy, Debug)]
pub struct AuditOptions {
    pub trials: u32,
    pub p: f64,
    /// Radius of the audit window; the universe adds enough headroom for
    /// exact pairwise distances.
    pub window_radius: u32,
    pub seed: u64,
    /// The generic witness search enumerates all vertex subsets; refuse
    /// windows larger than this.
    pub max_enum_vertices: usize,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            trials: 12,
            p: 0.5,
            window_radius: 2,
            seed: 0x10ca_117e,
            max_enum_vertices: 14,
        }
    }
}

/// Result of a locality audit over several random draws.
#[derive(Clone, Debug)]
pub struct AuditReport {
    pub rule: RuleDescriptor,
    pub trials: u32,
    /// Largest minimal generating-subgraph diameter observed over all
    /// simplices and trials.
    pub measured_t: u32,
    /// Simplices whose minimal diameter equals the declared basic diameter.
    pub witnesses: u64,
    /// Δ(H') ⊆ Δ(H) whenever H' deletes open edges from H.
    pub monotone_ok: bool,
    /// Every simplex lies in one open component.
    pub connectivity_ok: bool,
    /// Every simplex admits a generating subgraph of diameter ≤ declared T.
    pub confinement_ok: bool,
}

/// Measure, for every simplex of every draw, the minimal diameter of an
/// induced open subgraph that still generates it, by enumerating all vertex
/// subsets of a small window. Checks monotonicity under edge deletion and
/// per-simplex connectivity along the way.
pub fn locality_audit(
    model: &GroupModel,
    rule: RuleDescriptor,
    opts: AuditOptions,
) -> Result<AuditReport> {
    let universe_radius = opts.window_radius * 3;
    let uni = EdgeUniverse::build(model, crate::geometry::Ball::build(model, universe_radius))?;
    let window = Window::ball(&uni, opts.window_radius)?;
    let nv = window.vertex_count();
    if nv > opts.max_enum_vertices {
        return Err(Error::SizeLimit {
            what: "audit window vertices".into(),
            reached: nv,
            cap: opts.max_enum_vertices,
        });
    }
    // exact pairwise Cayley distances inside the window
    let mut pair_dist = vec![vec![0u32; nv]; nv];
    for (i, &v) in window.vertices.iter().enumerate() {
        let d = bfs_distances(&uni, v, 2 * opts.window_radius);
        for (j, &w) in window.vertices.iter().enumerate() {
            pair_dist[i][j] = d[w as usize].expect("window pair within distance 2R");
        }
    }
    let mut measured_t = 0u32;
    let mut witnesses = 0u64;
    let mut monotone_ok = true;
    let mut connectivity_ok = true;
    let mut confinement_ok = true;

    for trial in 0..opts.trials {
        let seed = derive_seed(opts.seed, salt::AUDIT, trial as u64);
        let cfg = Configuration::sample(&uni, opts.p, seed)?;
        let complex = build(rule, &cfg, &window)?;

        // connectivity, independently of the build-time check
        let part = clusters(&cfg, &window);
        for s in complex.by_dim.iter().flatten() {
            let c0 = part.component_of[s.0[0] as usize];
            if s.0.iter().any(|&v| part.component_of[v as usize] != c0) {
                connectivity_ok = false;
            }
        }

        // monotonicity: delete ~30% of open edges
        let thr = bernoulli_threshold(0.3);
        let states: Vec<bool> = window
            .edges
            .iter()
            .map(|&ei| {
                cfg.state(ei) && !bernoulli(seed, uni.edges[ei as usize].key, salt::AUDIT, thr)
            })
            .collect();
        let mut full_states = vec![false; uni.edge_count()];
        for (k, &ei) in window.edges.iter().enumerate() {
            full_states[ei as usize] = states[k];
        }
        let sub_cfg = Configuration::from_states(&uni, opts.p, seed, full_states)?;
        let sub_complex = build(rule, &sub_cfg, &window)?;
        if !sub_complex.subcomplex_of(&complex) {
            monotone_ok = false;
        }

        // minimal generating diameter per simplex, by exhaustive enumeration
        // of induced subgraph vertex sets
        let mut best: std::collections::HashMap<&Simplex, u32> = std::collections::HashMap::new();
        for mask in 1u32..(1u32 << nv) {
            let members: Vec<usize> =
                (0..nv).filter(|i| mask & (1 << i) != 0).collect();
            let mut diam = 0u32;
            for (ai, &a) in members.iter().enumerate() {
                for &b in &members[ai + 1..] {
                    diam = diam.max(pair_dist[a][b]);
                }
            }
            let sub = induced_complex(rule, &cfg, &uni, &window, mask)?;
            for s in sub.by_dim.iter().flatten() {
                if let Some(ours) = complex.by_dim[s.dim()]
                    .binary_search(s)
                    .ok()
                    .map(|i| &complex.by_dim[s.dim()][i])
                {
                    best.entry(ours)
                        .and_modify(|d| *d = (*d).min(diam))
                        .or_insert(diam);
                }
            }
        }
        for s in complex.by_dim.iter().flatten() {
            let d = *best.get(s).unwrap_or(&u32::MAX);
            if d == u32::MAX || d > rule.basic_diameter() {
                confinement_ok = false;
            } else {
                measured_t = measured_t.max(d);
                if d == rule.basic_diameter() {
                    witnesses += 1;
                }
            }
        }
    }

    Ok(AuditReport {
        rule,
        trials: opts.trials,
        measured_t,
        witnesses,
        monotone_ok,
        connectivity_ok,
        confinement_ok,
    })
}

/// Complex of the open subgraph induced on the masked window vertices.
fn induced_complex(
    rule: RuleDescriptor,
    cfg: &Configuration,
    uni: &EdgeUniverse,
    window: &Window,
    mask: u32,
) -> Result<SimplicialComplex> {
    let mut in_sub = vec![false; uni.ball.len()];
    let mut vertices = Vec::new();
    for (i, &v) in window.vertices.iter().enumerate() {
        if mask & (1 << i) != 0 {
            in_sub[v as usize] = true;
            vertices.push(v);
        }
    }
    let edges: Vec<u32> = window
        .edges
        .iter()
        .copied()
        .filter(|&ei| {
            let e = &uni.edges[ei as usize];
            in_sub[e.a as usize] && in_sub[e.b as usize]
        })
        .collect();
    let sub_window = Window {
        center: window.center,
        radius: window.radius,
        in_window: in_sub,
        vertices,
        edges,
    };
    build(rule, cfg, &sub_window)
}

/// Translation equivariance: building on a translated window from the
/// translated configuration must give the translated complex. Returns the
/// number of translations exercised.
pub fn equivariance_check(
    model: &GroupModel,
    rule: RuleDescriptor,
    radius: u32,
    p: f64,
    trials: u32,
    seed: u64,
) -> Result<u32> {
    let shift_radius = 2u32;
    let uni = EdgeUniverse::build(
        model,
        crate::geometry::Ball::build(model, radius + shift_radius),
    )?;
    let base_window = Window::ball(&uni, radius)?;
    let shifts: Vec<GroupElement> = crate::geometry::Ball::build(model, shift_radius)
        .vertices
        .iter()
        .filter(|g| **g != model.identity())
        .cloned()
        .collect();
    let mut checked = 0u32;
    for t in 0..trials {
        let cfg_seed = derive_seed(seed, salt::AUDIT, t as u64);
        let cfg = Configuration::sample(&uni, p, cfg_seed)?;
        let u = &shifts[(hash_words(&[seed, t as u64]) % shifts.len() as u64) as usize];
        let u_inv = model.inverse_unchecked(u);
        let u_idx = uni.ball.index_of(u).expect("shift inside universe");

        // translated configuration: ω'(e) = ω(u⁻¹ e)
        let states: Vec<bool> = uni
            .edges
            .iter()
            .map(|e| {
                let a = &uni.ball.vertices[e.a as usize];
                let b = &uni.ball.vertices[e.b as usize];
                let pa = model.multiply_unchecked(&u_inv, a);
                let pb = model.multiply_unchecked(&u_inv, b);
                uni.edge_between(&pa, &pb)
                    .map(|ei| cfg.state(ei))
                    .unwrap_or(false)
            })
            .collect();
        let translated = Configuration::from_states(&uni, p, cfg_seed, states)?;

        let base = build(rule, &cfg, &base_window)?;
        let moved_window = Window::centered(&uni, u_idx, radius)?;
        let moved = build(rule, &translated, &moved_window)?;

        // compare as element sets: φ_u(base) must equal moved
        let mut base_els: Vec<Vec<GroupElement>> = simplices_as_elements(&base, &uni)
            .into_iter()
            .map(|simplex| {
                let mut moved: Vec<GroupElement> = simplex
                    .iter()
                    .map(|g| model.multiply_unchecked(u, g))
                    .collect();
                moved.sort();
                moved
            })
            .collect();
        base_els.sort();
        let moved_els = simplices_as_elements(&moved, &uni);
        if base_els != moved_els {
            return Err(Error::Contract(format!(
                "equivariance failed for rule {} under shift {u:?}",
                rule.label()
            )));
        }
        checked += 1;
    }
    Ok(checked)
}
