//! Translation-invariant vertex and edge orders, the fundamental edge set,
//! and the connected-prefix edge enumeration.
//!
//! The vertex order compares coset indices first, then the H-parts through
//! the positive cone of the Mal'cev coordinates: h < h' iff the first
//! non-vanishing coordinate of h⁻¹h' is positive. Left translation by H fixes
//! coset indices and the difference h⁻¹h', so the order is H-invariant by
//! construction; the tests exercise that anyway.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geometry::EdgeUniverse;
use crate::group::{GroupElement, GroupModel};

/// Compare two subgroup elements through the positive cone.
pub fn h_cmp(model: &GroupModel, h: &GroupElement, h2: &GroupElement) -> Ordering {
    let delta = model.multiply_unchecked(&model.inverse_unchecked(h), h2);
    for &c in &delta.coords {
        match c.cmp(&0) {
            Ordering::Equal => continue,
            // first non-vanishing coordinate positive ⇒ h < h2
            Ordering::Greater => return Ordering::Less,
            Ordering::Less => return Ordering::Greater,
        }
    }
    Ordering::Equal
}

/// Invariant total order on vertices: coset index first, then the H-part.
pub fn vertex_cmp(model: &GroupModel, g: &GroupElement, g2: &GroupElement) -> Ordering {
    let i = g.finite;
    let j = g2.finite;
    match i.cmp(&j) {
        Ordering::Equal => {
            let h = GroupElement::new(g.coords.clone(), 0);
            let h2 = GroupElement::new(g2.coords.clone(), 0);
            h_cmp(model, &h, &h2)
        }
        other => other,
    }
}

/// Orient an edge so the ≼-smaller endpoint comes first.
pub fn orient_edge<'a>(
    model: &GroupModel,
    u: &'a GroupElement,
    v: &'a GroupElement,
) -> (&'a GroupElement, &'a GroupElement) {
    match vertex_cmp(model, u, v) {
        Ordering::Greater => (v, u),
        _ => (u, v),
    }
}

/// Invariant total order on unordered edges: lexicographic on the oriented
/// endpoint pair.
pub fn edge_cmp(
    model: &GroupModel,
    e1: (&GroupElement, &GroupElement),
    e2: (&GroupElement, &GroupElement),
) -> Ordering {
    let (a1, b1) = orient_edge(model, e1.0, e1.1);
    let (a2, b2) = orient_edge(model, e2.0, e2.1);
    vertex_cmp(model, a1, a2).then_with(|| vertex_cmp(model, b1, b2))
}

/// One entry of the fundamental edge family: the edge {x_i, x_i·s}.
#[derive(Clone, Debug)]
pub struct FundamentalEntry {
    /// Zero-based coset index i.
    pub coset: usize,
    /// Zero-based generator index of s.
    pub gen: usize,
    /// x_i.
    pub u: GroupElement,
    /// x_i · s.
    pub v: GroupElement,
}

/// The fundamental family Ẽ, indexed by (coset, generator) in row-major
/// order, together with the H-orbit identifier of each entry's edge.
#[derive(Clone, Debug)]
pub struct FundamentalSet {
    pub entries: Vec<FundamentalEntry>,
    /// For each entry, the index of the canonical entry of its edge's
    /// H-orbit. Two entries share an orbit id iff some h ∈ H translates one
    /// entry's edge onto the other's.
    pub orbit_of_entry: Vec<usize>,
}

impl FundamentalSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn entry_index(model: &GroupModel, coset: usize, gen: usize) -> usize {
    coset * model.degree() + gen
}

/// Build Ẽ = {{x_i, x_i·s} : i ≤ n, s ∈ S} and verify the 2-to-1 covering
/// property of φ(h, x_i, s) = {h·x_i, h·x_i·s} on a radius-6 ball.
pub fn fundamental_set(model: &GroupModel) -> Result<FundamentalSet> {
    let mut entries = Vec::with_capacity(model.index_n() * model.degree());
    for (i, x) in model.coset_reps().iter().enumerate() {
        for (k, s) in model.generators().iter().enumerate() {
            entries.push(FundamentalEntry {
                coset: i,
                gen: k,
                u: x.clone(),
                v: model.multiply_unchecked(x, s),
            });
        }
    }
    let orbit_of_entry = entries
        .iter()
        .map(|e| canonicalize(model, (&e.u, &e.v)).map(|(_, idx)| idx))
        .collect::<Result<Vec<_>>>()?;
    let set = FundamentalSet {
        entries,
        orbit_of_entry,
    };
    verify_two_to_one(model, &set, 6)?;
    Ok(set)
}

/// Every Cayley edge {g, g·s} has exactly two φ-preimages: one per
/// orientation. Check both explicitly for every edge of B_radius.
pub fn verify_two_to_one(model: &GroupModel, set: &FundamentalSet, radius: u32) -> Result<()> {
    let ball = crate::geometry::Ball::build(model, radius);
    let universe = EdgeUniverse::build(model, ball)?;
    for e in &universe.edges {
        let u = &universe.ball.vertices[e.a as usize];
        let v = &universe.ball.vertices[e.b as usize];
        let mut preimages = Vec::new();
        for (first, second) in [(u, v), (v, u)] {
            let (h_inv, entry) = orientation_preimage(model, first, second)?;
            // reconstruct φ(h, x_i, s) and require it to be exactly {u, v}
            let fe = &set.entries[entry];
            let h = model.inverse_unchecked(&h_inv);
            let p = model.multiply_unchecked(&h, &fe.u);
            let q = model.multiply_unchecked(&h, &fe.v);
            if !((p == *u && q == *v) || (p == *v && q == *u)) {
                return Err(Error::Contract(format!(
                    "phi preimage does not reconstruct edge {{{u:?},{v:?}}}"
                )));
            }
            preimages.push((h_inv, entry));
        }
        if preimages[0] == preimages[1] {
            return Err(Error::Contract(format!(
                "edge {{{u:?},{v:?}}} has fewer than two phi-preimages"
            )));
        }
    }
    Ok(())
}

/// The unique preimage of the oriented edge (g, g·s): returns (h, entry)
/// where translating by h lands the edge on the entry's edge.
fn orientation_preimage(
    model: &GroupModel,
    g: &GroupElement,
    g2: &GroupElement,
) -> Result<(GroupElement, usize)> {
    let s = model.multiply_unchecked(&model.inverse_unchecked(g), g2);
    let gen = model
        .generators()
        .iter()
        .position(|t| *t == s)
        .ok_or_else(|| Error::Domain(format!("{g:?} and {g2:?} are not Cayley-adjacent")))?;
    let (h_part, coset) = model.coset_decompose(g)?;
    // g = h_part · x_i, so translating by h_part⁻¹ maps the edge onto
    // {x_i, x_i·s}.
    Ok((
        model.inverse_unchecked(&h_part),
        entry_index(model, coset, gen),
    ))
}

/// Canonical representative of an edge's H-orbit: the translation h and the
/// fundamental entry such that h·e is that entry's edge. Of the two
/// orientation preimages, the one with the smaller entry index wins; exact
/// ties fall back to the lexicographically smaller Mal'cev vector of h.
pub fn canonicalize(
    model: &GroupModel,
    e: (&GroupElement, &GroupElement),
) -> Result<(GroupElement, usize)> {
    let a = orientation_preimage(model, e.0, e.1)?;
    let b = orientation_preimage(model, e.1, e.0)?;
    Ok(match a.1.cmp(&b.1) {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal => {
            if a.0.coords <= b.0.coords {
                a
            } else {
                b
            }
        }
    })
}

/// Rank every universe vertex by the invariant order. The rank array lets
/// edge comparisons run on integer pairs in hot paths.
pub fn vertex_ranks(model: &GroupModel, universe: &EdgeUniverse) -> Vec<u32> {
    let n = universe.ball.len();
    let mut idx: Vec<u32> = (0..n as u32).collect();
    idx.sort_by(|&x, &y| {
        vertex_cmp(
            model,
            &universe.ball.vertices[x as usize],
            &universe.ball.vertices[y as usize],
        )
    });
    let mut rank = vec![0u32; n];
    for (r, &v) in idx.iter().enumerate() {
        rank[v as usize] = r as u32;
    }
    rank
}

/// Sort key of a universe edge under the invariant edge order, as a pair of
/// vertex ranks (smaller first).
pub fn edge_rank_key(rank: &[u32], universe: &EdgeUniverse, edge: u32) -> (u32, u32) {
    let e = &universe.edges[edge as usize];
    let (ra, rb) = (rank[e.a as usize], rank[e.b as usize]);
    (ra.min(rb), ra.max(rb))
}

/// Deterministic enumeration of E(B) such that every prefix induces a
/// connected subgraph on its endpoint set: grow from the origin, always
/// appending the ≼-smallest edge with at least one endpoint already touched.
pub fn connected_prefix_order(model: &GroupModel, universe: &EdgeUniverse) -> Result<Vec<u32>> {
    let origin = universe
        .ball
        .index_of(&model.identity())
        .ok_or_else(|| Error::Domain("universe does not contain the identity".into()))?;
    let rank = vertex_ranks(model, universe);
    let mut order = Vec::with_capacity(universe.edge_count());
    let mut vertex_seen = vec![false; universe.ball.len()];
    let mut edge_queued = vec![false; universe.edge_count()];
    // min-heap on the invariant edge key
    let mut heap: BinaryHeap<std::cmp::Reverse<(u32, u32, u32)>> = BinaryHeap::new();

    let touch = |v: u32,
                 vertex_seen: &mut Vec<bool>,
                 edge_queued: &mut Vec<bool>,
                 heap: &mut BinaryHeap<std::cmp::Reverse<(u32, u32, u32)>>| {
        if vertex_seen[v as usize] {
            return;
        }
        vertex_seen[v as usize] = true;
        for &(ei, _) in &universe.adj[v as usize] {
            if !edge_queued[ei as usize] {
                edge_queued[ei as usize] = true;
                let (lo, hi) = edge_rank_key(&rank, universe, ei);
                heap.push(std::cmp::Reverse((lo, hi, ei)));
            }
        }
    };

    touch(origin, &mut vertex_seen, &mut edge_queued, &mut heap);
    while let Some(std::cmp::Reverse((_, _, ei))) = heap.pop() {
        let e = &universe.edges[ei as usize];
        debug_assert!(vertex_seen[e.a as usize] || vertex_seen[e.b as usize]);
        order.push(ei);
        touch(e.a, &mut vertex_seen, &mut edge_queued, &mut heap);
        touch(e.b, &mut vertex_seen, &mut edge_queued, &mut heap);
    }

    if order.len() != universe.edge_count() {
        return Err(Error::Contract(
            "connected prefix enumeration did not cover the edge set".into(),
        ));
    }
    Ok(order)
}

/// The designated endpoint x₁(e): closer to the origin in graph distance,
/// ties broken by the invariant vertex order.
pub fn designated_endpoint(model: &GroupModel, universe: &EdgeUniverse, edge: u32) -> u32 {
    let e = &universe.edges[edge as usize];
    let (da, db) = (
        universe.ball.dist[e.a as usize],
        universe.ball.dist[e.b as usize],
    );
    match da.cmp(&db) {
        Ordering::Less => e.a,
        Ordering::Greater => e.b,
        Ordering::Equal => {
            match vertex_cmp(
                model,
                &universe.ball.vertices[e.a as usize],
                &universe.ball.vertices[e.b as usize],
            ) {
                Ordering::Greater => e.b,
                _ => e.a,
            }
        }
    }
}
