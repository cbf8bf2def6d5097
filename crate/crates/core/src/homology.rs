//! Simplicial homology with rational coefficients, computed exactly.
//!
//! Boundary matrices are sparse with entries ±1 (sorted-vertex orientation).
//! Ranks come from a sparse column reduction modulo the Mersenne prime
//! 2^61 − 1; small matrices are cross-checked against a fraction-free
//! Gaussian elimination over exact integers on every call. A Betti number
//! β_n needs ∂_{n+1}, so the complex must have been built with
//! `dim_cap ≥ n+1` — asking for more is a contract error, never a silent
//! zero.
//!
//! The edge-difference machinery at the bottom computes Δβ_n for a single
//! edge twice: globally (two full rank computations) and through the long
//! exact sequence of the pair (X, X∖R), where R is the set of simplices
//! that disappear when the edge closes. The second route only sees the
//! simplices near the edge plus the complex's boundary maps restricted to
//! them, and comes with the a-priori bound |Δβ_n| ≤ dim V_n + dim V_{n+1}
//! in terms of relative homology dimensions.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::complexes::{build, RuleDescriptor, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::geometry::Window;
use crate::percolation::{clusters, ClusterPartition, Configuration};

/// Modulus for the fast rank path: 2^61 − 1.
pub const MOD_P: u64 = (1u64 << 61) - 1;

/// Matrices at most this many cells run the exact engine too and must agree.
const CROSS_CHECK_CELLS: usize = 4096;

/// Column-major sparse matrix with small integer entries.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    pub rows: usize,
    /// Per column: (row, coefficient), sorted by row.
    pub columns: Vec<Vec<(u32, i8)>>,
}

impl SparseMatrix {
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    fn mod_p_columns(&self) -> Vec<Vec<(u32, u64)>> {
        self.columns
            .iter()
            .map(|col| {
                col.iter()
                    .map(|&(r, c)| (r, if c >= 0 { c as u64 } else { MOD_P - (-c) as u64 }))
                    .collect()
            })
            .collect()
    }
}

/// ∂_dim of the complex: columns are dim-simplices, rows (dim−1)-simplices.
/// The i-th face (dropping the i-th smallest vertex) carries sign (−1)^i.
pub fn boundary_matrix(complex: &SimplicialComplex, dim: usize) -> SparseMatrix {
    let cols_n = complex.count(dim);
    if dim == 0 {
        return SparseMatrix {
            rows: 0,
            columns: vec![Vec::new(); cols_n],
        };
    }
    let rows = complex.count(dim - 1);
    let mut columns = Vec::with_capacity(cols_n);
    for s in complex.by_dim.get(dim).map(|b| &b[..]).unwrap_or(&[]) {
        let mut col: Vec<(u32, i8)> = Vec::with_capacity(s.0.len());
        for drop in 0..s.0.len() {
            let mut face = s.0.clone();
            face.remove(drop);
            let row = complex
                .index_of(&Simplex(face))
                .expect("faces present: closure verified at build time");
            let sign = if drop % 2 == 0 { 1i8 } else { -1i8 };
            col.push((row as u32, sign));
        }
        col.sort_unstable_by_key(|&(r, _)| r);
        columns.push(col);
    }
    SparseMatrix { rows, columns }
}

// --- arithmetic mod 2^61 − 1 ---

fn mul_p(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MOD_P as u128) as u64
}

fn sub_p(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MOD_P - b
    }
}

fn inv_p(a: u64) -> u64 {
    // Fermat: a^(p−2) mod p
    let mut base = a % MOD_P;
    let mut exp = MOD_P - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_p(acc, base);
        }
        base = mul_p(base, base);
        exp >>= 1;
    }
    acc
}

/// c -= factor · pivot, columns sorted by row.
fn axpy_sub(c: &[(u32, u64)], pivot: &[(u32, u64)], factor: u64) -> Vec<(u32, u64)> {
    let mut out = Vec::with_capacity(c.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < c.len() || j < pivot.len() {
        if j >= pivot.len() || (i < c.len() && c[i].0 < pivot[j].0) {
            out.push(c[i]);
            i += 1;
        } else if i >= c.len() || pivot[j].0 < c[i].0 {
            let v = sub_p(0, mul_p(factor, pivot[j].1));
            if v != 0 {
                out.push((pivot[j].0, v));
            }
            j += 1;
        } else {
            let v = sub_p(c[i].1, mul_p(factor, pivot[j].1));
            if v != 0 {
                out.push((c[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Sparse column: (row, coefficient) pairs sorted by row, coefficients in F_p.
type Column = Vec<(u32, u64)>;

struct Reduction {
    rank: usize,
    /// Kernel basis, each vector sparse over original column indices.
    kernel: Vec<Column>,
}

/// Column reduction by lowest nonzero row ("low"), tracking the column
/// combinations so that vanished columns yield kernel vectors.
fn reduce_mod_p(columns: &[Column], track_kernel: bool) -> Reduction {
    use std::collections::HashMap;
    // low row → (normalized column, its combination)
    let mut pivots: HashMap<u32, (Column, Column)> = HashMap::new();
    let mut rank = 0usize;
    let mut kernel = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let mut c = col.clone();
        let mut combo: Vec<(u32, u64)> = if track_kernel {
            vec![(j as u32, 1)]
        } else {
            Vec::new()
        };
        loop {
            let Some(&(low, val)) = c.last() else {
                if track_kernel {
                    kernel.push(combo);
                }
                break;
            };
            match pivots.get(&low) {
                Some((pcol, pcombo)) => {
                    c = axpy_sub(&c, pcol, val);
                    if track_kernel {
                        combo = axpy_sub(&combo, pcombo, val);
                    }
                }
                None => {
                    let inv = inv_p(val);
                    for e in &mut c {
                        e.1 = mul_p(e.1, inv);
                    }
                    if track_kernel {
                        for e in &mut combo {
                            e.1 = mul_p(e.1, inv);
                        }
                    }
                    pivots.insert(low, (c, combo));
                    rank += 1;
                    break;
                }
            }
        }
    }
    Reduction { rank, kernel }
}

pub fn rank_mod_p(columns: &[Vec<(u32, u64)>]) -> usize {
    reduce_mod_p(columns, false).rank
}

pub fn kernel_mod_p(columns: &[Vec<(u32, u64)>]) -> Vec<Vec<(u32, u64)>> {
    reduce_mod_p(columns, true).kernel
}

// --- exact reference rank ---

/// Fraction-free (Bareiss) elimination over i128; falls back to BigInt when
/// an intermediate would overflow.
pub fn rank_exact(m: &SparseMatrix) -> usize {
    let rows = m.rows;
    let cols = m.cols();
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mut dense = vec![vec![0i128; cols]; rows];
    for (j, col) in m.columns.iter().enumerate() {
        for &(r, c) in col {
            dense[r as usize][j] = c as i128;
        }
    }
    match bareiss_i128(&mut dense) {
        Some(rank) => rank,
        None => {
            let mut big: Vec<Vec<BigInt>> = (0..rows)
                .map(|_| (0..cols).map(|_| BigInt::zero()).collect())
                .collect();
            for (j, col) in m.columns.iter().enumerate() {
                for &(r, c) in col {
                    big[r as usize][j] = BigInt::from(c);
                }
            }
            bareiss_big(&mut big)
        }
    }
}

fn bareiss_i128(m: &mut [Vec<i128>]) -> Option<usize> {
    let rows = m.len();
    let cols = m[0].len();
    let mut prev: i128 = 1;
    let mut pr = 0usize;
    for pc in 0..cols {
        let Some(hit) = (pr..rows).find(|&r| m[r][pc] != 0) else {
            continue;
        };
        m.swap(pr, hit);
        for r in pr + 1..rows {
            for c in pc + 1..cols {
                let a = m[pr][pc].checked_mul(m[r][c])?;
                let b = m[r][pc].checked_mul(m[pr][c])?;
                m[r][c] = a.checked_sub(b)? / prev;
            }
            m[r][pc] = 0;
        }
        prev = m[pr][pc];
        pr += 1;
        if pr == rows {
            break;
        }
    }
    Some(pr)
}

fn bareiss_big(m: &mut [Vec<BigInt>]) -> usize {
    let rows = m.len();
    let cols = m[0].len();
    let mut prev = BigInt::from(1);
    let mut pr = 0usize;
    for pc in 0..cols {
        let Some(hit) = (pr..rows).find(|&r| !m[r][pc].is_zero()) else {
            continue;
        };
        m.swap(pr, hit);
        for r in pr + 1..rows {
            for c in pc + 1..cols {
                let v = (&m[pr][pc] * &m[r][c] - &m[r][pc] * &m[pr][c]) / &prev;
                m[r][c] = v;
            }
            m[r][pc] = BigInt::zero();
        }
        prev = m[pr][pc].clone();
        pr += 1;
        if pr == rows {
            break;
        }
    }
    pr
}

/// Rank of a boundary-style matrix. Always computed mod 2^61 − 1; small
/// matrices are recomputed exactly and any disagreement is a contract error.
pub fn rank(m: &SparseMatrix) -> Result<usize> {
    let fast = rank_mod_p(&m.mod_p_columns());
    if m.rows * m.cols() <= CROSS_CHECK_CELLS {
        let exact = rank_exact(m);
        if exact != fast {
            return Err(Error::Contract(format!(
                "rank engines disagree: exact {exact}, mod-p {fast} on {}x{}",
                m.rows,
                m.cols()
            )));
        }
    }
    Ok(fast)
}

/// β_n = #C_n − rank ∂_n − rank ∂_{n+1}. Needs the complex built to
/// dimension n+1 at least.
pub fn betti(complex: &SimplicialComplex, n: usize) -> Result<i64> {
    if complex.dim_cap < n + 1 {
        return Err(Error::Contract(format!(
            "β_{n} needs simplices of dimension {} but the complex was built \
             with dim_cap {}",
            n + 1,
            complex.dim_cap
        )));
    }
    let rn = rank(&boundary_matrix(complex, n))?;
    let rn1 = rank(&boundary_matrix(complex, n + 1))?;
    Ok(complex.count(n) as i64 - rn as i64 - rn1 as i64)
}

/// β_0 … β_max_n computing each boundary rank once.
pub fn betti_vector(complex: &SimplicialComplex, max_n: usize) -> Result<Vec<i64>> {
    if complex.dim_cap < max_n + 1 {
        return Err(Error::Contract(format!(
            "β_{max_n} needs dim_cap ≥ {}, complex has {}",
            max_n + 1,
            complex.dim_cap
        )));
    }
    let ranks: Vec<usize> = (0..=max_n + 1)
        .map(|d| rank(&boundary_matrix(complex, d)))
        .collect::<Result<_>>()?;
    Ok((0..=max_n)
        .map(|n| complex.count(n) as i64 - ranks[n] as i64 - ranks[n + 1] as i64)
        .collect())
}

/// ∂_{k−1} ∘ ∂_k = 0, composed exactly over i64.
pub fn verify_boundary_squares_to_zero(complex: &SimplicialComplex) -> Result<()> {
    for k in 2..complex.by_dim.len() {
        let dk = boundary_matrix(complex, k);
        let dk1 = boundary_matrix(complex, k - 1);
        for (j, col) in dk.columns.iter().enumerate() {
            let mut acc: std::collections::BTreeMap<u32, i64> = Default::default();
            for &(mid, s) in col {
                for &(r, t) in &dk1.columns[mid as usize] {
                    *acc.entry(r).or_insert(0) += s as i64 * t as i64;
                }
            }
            if acc.values().any(|&v| v != 0) {
                return Err(Error::Contract(format!(
                    "∂∂ ≠ 0 at dimension {k}, column {j}"
                )));
            }
        }
    }
    Ok(())
}

/// Σ(−1)^k #C_k must equal Σ(−1)^n β_n. Returns the shared value.
pub fn verify_euler(complex: &SimplicialComplex) -> Result<i64> {
    let top = complex.by_dim.len().saturating_sub(1);
    // alternating simplex count
    let from_counts: i64 = (0..=top)
        .map(|k| {
            let c = complex.count(k) as i64;
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .sum();
    // alternating Betti sum: every β up to the top built dimension, with
    // ∂_{top+1} = 0 since nothing above was generated
    let mut ranks: Vec<usize> = Vec::with_capacity(top + 2);
    for d in 0..=top {
        ranks.push(rank(&boundary_matrix(complex, d))?);
    }
    ranks.push(0);
    let from_betti: i64 = (0..=top)
        .map(|n| {
            let b = complex.count(n) as i64 - ranks[n] as i64 - ranks[n + 1] as i64;
            if n % 2 == 0 {
                b
            } else {
                -b
            }
        })
        .sum();
    if from_counts != from_betti {
        return Err(Error::Contract(format!(
            "Euler characteristic mismatch: counts give {from_counts}, Betti \
             numbers give {from_betti}"
        )));
    }
    Ok(from_counts)
}

/// The subcomplex of simplices lying in one open component. Universe vertex
/// indices are kept, so faces remain resolvable.
pub fn restrict_to_component(
    complex: &SimplicialComplex,
    part: &ClusterPartition,
    component: u32,
) -> SimplicialComplex {
    let by_dim = complex
        .by_dim
        .iter()
        .map(|bucket| {
            bucket
                .iter()
                .filter(|s| part.component_of[s.0[0] as usize] == Some(component))
                .cloned()
                .collect()
        })
        .collect();
    SimplicialComplex {
        by_dim,
        dim_cap: complex.dim_cap,
    }
}

/// β_n computed globally must equal the sum over open components.
pub fn verify_component_additivity(
    complex: &SimplicialComplex,
    config: &Configuration,
    window: &Window,
    n: usize,
) -> Result<i64> {
    let whole = betti(complex, n)?;
    let part = clusters(config, window);
    let mut sum = 0i64;
    for comp in 0..part.count() as u32 {
        let sub = restrict_to_component(complex, &part, comp);
        sum += betti(&sub, n)?;
    }
    if whole != sum {
        return Err(Error::Contract(format!(
            "β_{n} not additive over components: whole {whole}, sum {sum}"
        )));
    }
    Ok(whole)
}

// --- single-edge differences, global and localized ---

/// Both routes to Δβ_n for one edge, plus the relative-homology bound.
#[derive(Clone, Copy, Debug)]
pub struct EdgeDelta {
    pub n: usize,
    /// β_n(edge open) − β_n(edge closed), two full computations.
    pub global: i64,
    /// The same difference assembled from the pair (X, X∖R) through the
    /// long exact sequence; only simplices touching the edge enter beyond
    /// the closed complex's boundary maps.
    pub localized: i64,
    /// dim V_n + dim V_{n+1}, always ≥ |Δβ_n|.
    pub bound: i64,
}

impl EdgeDelta {
    pub fn consistent(&self) -> bool {
        self.global == self.localized && self.global.abs() <= self.bound
    }
}

/// Split data of ∂_k(X⁺) under C_k(X⁺) = C_k(X⁻) ⊕ span(R_k).
struct PairBlocks {
    /// |R_k|
    rel: usize,
    /// D_k: R_k → R_{k−1} (quotient boundary)
    d: Vec<Vec<(u32, u64)>>,
    /// B_k: R_k → C_{k−1}(X⁻)
    b: Vec<Vec<(u32, u64)>>,
}

fn pair_blocks(
    plus: &SimplicialComplex,
    minus: &SimplicialComplex,
    rel_index: &[std::collections::HashMap<Simplex, u32>],
    k: usize,
) -> PairBlocks {
    let mut d = Vec::new();
    let mut b = Vec::new();
    let empty = Vec::new();
    let bucket = plus.by_dim.get(k).unwrap_or(&empty);
    for s in bucket {
        if minus.contains(s) {
            continue;
        }
        let mut dcol: Vec<(u32, u64)> = Vec::new();
        let mut bcol: Vec<(u32, u64)> = Vec::new();
        if k > 0 {
            for drop in 0..s.0.len() {
                let mut face = s.0.clone();
                face.remove(drop);
                let face = Simplex(face);
                let sign = if drop % 2 == 0 { 1u64 } else { MOD_P - 1 };
                if let Some(r) = minus.index_of(&face) {
                    bcol.push((r as u32, sign));
                } else {
                    let r = rel_index[k - 1][&face];
                    dcol.push((r, sign));
                }
            }
            dcol.sort_unstable_by_key(|&(r, _)| r);
            bcol.sort_unstable_by_key(|&(r, _)| r);
        }
        d.push(dcol);
        b.push(bcol);
    }
    PairBlocks {
        rel: bucket.len() - minus.count(k),
        d,
        b,
    }
}

/// Δβ_n for a single edge of the window: global recomputation, the
/// localized long-exact-sequence route, and the relative bound.
pub fn edge_delta_betti(
    rule: RuleDescriptor,
    config: &Configuration,
    window: &Window,
    edge: u32,
    n: usize,
) -> Result<EdgeDelta> {
    let open = config.set_edge(edge, true)?;
    let closed = config.set_edge(edge, false)?;
    let plus = build(rule, &open, window)?;
    let minus = build(rule, &closed, window)?;
    if !minus.subcomplex_of(&plus) {
        return Err(Error::Contract(
            "closing an edge must shrink the complex".into(),
        ));
    }
    let global = betti(&plus, n)? - betti(&minus, n)?;

    // index the relative simplices per dimension
    let dims = plus.by_dim.len();
    let mut rel_index: Vec<std::collections::HashMap<Simplex, u32>> = vec![Default::default(); dims];
    for (k, bucket) in plus.by_dim.iter().enumerate() {
        let mut next = 0u32;
        for s in bucket {
            if !minus.contains(s) {
                rel_index[k].insert(s.clone(), next);
                next += 1;
            }
        }
    }
    let blocks: Vec<PairBlocks> = (0..dims)
        .map(|k| pair_blocks(&plus, &minus, &rel_index, k))
        .collect();
    let rel_count = |k: usize| blocks.get(k).map(|b| b.rel).unwrap_or(0);
    let rank_d = |k: usize| -> usize {
        blocks
            .get(k)
            .map(|b| rank_mod_p(&b.d))
            .unwrap_or(0)
    };

    // V_k = |R_k| − rank D_k − rank D_{k+1}
    let v = |k: usize| rel_count(k) as i64 - rank_d(k) as i64 - rank_d(k + 1) as i64;

    // rank of the connecting map H_k(X,A) → H_{k−1}(A):
    // rank([∂_k(A) | B_k·ker D_k]) − rank ∂_k(A)
    let conn = |k: usize| -> Result<i64> {
        let Some(bl) = blocks.get(k) else {
            return Ok(0);
        };
        if bl.rel == 0 {
            return Ok(0);
        }
        let kernel = kernel_mod_p(&bl.d);
        if kernel.is_empty() {
            return Ok(0);
        }
        let a_k = boundary_matrix(&minus, k).mod_p_columns();
        let rank_a = rank_mod_p(&a_k);
        let mut joint = a_k;
        for kv in &kernel {
            // B_k · kv
            let mut acc: std::collections::BTreeMap<u32, u64> = Default::default();
            for &(col, coef) in kv {
                for &(r, val) in &bl.b[col as usize] {
                    let e = acc.entry(r).or_insert(0);
                    *e = (*e + mul_p(coef, val)) % MOD_P;
                }
            }
            let col: Vec<(u32, u64)> = acc.into_iter().filter(|&(_, v)| v != 0).collect();
            joint.push(col);
        }
        Ok(rank_mod_p(&joint) as i64 - rank_a as i64)
    };

    let localized = v(n) - conn(n)? - conn(n + 1)?;
    let bound = v(n).max(0) + v(n + 1).max(0);
    Ok(EdgeDelta {
        n,
        global,
        localized,
        bound,
    })
}
