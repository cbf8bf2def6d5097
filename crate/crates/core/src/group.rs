//! Group models.
//!
//! A model packages a finitely generated group Γ with a fixed symmetric
//! generating set S, a finite-index normal-form machine, and the data needed
//! by the rest of the workspace: a finite-index subgroup H with coset
//! representatives X = {x_1, ..., x_n} (x_1 is always the identity) and
//! Mal'cev coordinates on H.
//!
//! Built-ins: Z^d, Z^d × C_m, and the discrete Heisenberg group with normal
//! form x^a y^b z^c, stored as coordinates (a, b, c).

use crate::error::{Error, Result};
use crate::rng::hash_words;

/// Group element in normal form: integer coordinates plus a finite part.
///
/// * `Zd(d)`: `coords` has length d, `finite` is 0.
/// * `ZdTimesCyclic(d, m)`: `coords` has length d, `finite` in 0..m.
/// * `Heisenberg`: `coords` = (a, b, c) of x^a y^b z^c, `finite` is 0.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub coords: Vec<i64>,
    pub finite: u32,
}

impl GroupElement {
    pub fn new(coords: Vec<i64>, finite: u32) -> Self {
        GroupElement { coords, finite }
    }

    /// Stable content hash, used to key per-edge randomness. Depends only on
    /// the normal form, never on any enumeration index.
    pub fn content_key(&self) -> u64 {
        let mut words: Vec<u64> = Vec::with_capacity(self.coords.len() + 1);
        for &c in &self.coords {
            words.push(c as u64);
        }
        words.push(self.finite as u64);
        hash_words(&words)
    }
}

impl std::fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        if self.finite != 0 || f.alternate() {
            write!(f, "|{}", self.finite)?;
        }
        write!(f, ")")
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// Which built-in group a model instantiates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// Free abelian Z^d, generators ± the unit vectors.
    Zd { d: usize },
    /// Direct product Z^d × C_m, generators ± unit vectors plus the cyclic
    /// step (and its inverse when m > 2).
    ZdTimesCyclic { d: usize, m: u32 },
    /// Discrete Heisenberg group, generators x^±1, y^±1.
    Heisenberg,
}

/// A concrete group model: kind, generating set, subgroup/coset data.
#[derive(Clone, Debug)]
pub struct GroupModel {
    pub kind: ModelKind,
    /// Symmetric generating set S (no identity, closed under inverse).
    generators: Vec<GroupElement>,
    /// Human-readable label per generator, aligned with `generators`.
    generator_labels: Vec<String>,
    /// Coset representatives X of H; `coset_reps[0]` is the identity.
    coset_reps: Vec<GroupElement>,
    /// Rank of the Mal'cev coordinate vector on H.
    subgroup_rank: usize,
}

impl GroupModel {
    pub fn zd(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter {
                key: "model.d".into(),
                reason: "dimension must be at least 1".into(),
            });
        }
        let mut generators = Vec::new();
        let mut generator_labels = Vec::new();
        for i in 0..d {
            for sign in [1i64, -1] {
                let mut v = vec![0i64; d];
                v[i] = sign;
                generators.push(GroupElement::new(v, 0));
                generator_labels.push(format!("{}e{}", if sign > 0 { "+" } else { "-" }, i + 1));
            }
        }
        Ok(GroupModel {
            kind: ModelKind::Zd { d },
            generators,
            generator_labels,
            coset_reps: vec![GroupElement::new(vec![0; d], 0)],
            subgroup_rank: d,
        })
    }

    pub fn zd_times_cyclic(d: usize, m: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter {
                key: "model.d".into(),
                reason: "dimension must be at least 1".into(),
            });
        }
        if m < 2 {
            return Err(Error::Parameter {
                key: "model.m".into(),
                reason: "cyclic order must be at least 2".into(),
            });
        }
        let mut generators = Vec::new();
        let mut generator_labels = Vec::new();
        for i in 0..d {
            for sign in [1i64, -1] {
                let mut v = vec![0i64; d];
                v[i] = sign;
                generators.push(GroupElement::new(v, 0));
                generator_labels.push(format!("{}e{}", if sign > 0 { "+" } else { "-" }, i + 1));
            }
        }
        generators.push(GroupElement::new(vec![0; d], 1));
        generator_labels.push("c".into());
        if m > 2 {
            generators.push(GroupElement::new(vec![0; d], m - 1));
            generator_labels.push("c^-1".into());
        }
        let coset_reps = (0..m).map(|j| GroupElement::new(vec![0; d], j)).collect();
        Ok(GroupModel {
            kind: ModelKind::ZdTimesCyclic { d, m },
            generators,
            generator_labels,
            coset_reps,
            subgroup_rank: d,
        })
    }

    pub fn heisenberg() -> Self {
        let gen = |a: i64, b: i64| GroupElement::new(vec![a, b, 0], 0);
        GroupModel {
            kind: ModelKind::Heisenberg,
            generators: vec![gen(1, 0), gen(-1, 0), gen(0, 1), gen(0, -1)],
            generator_labels: vec!["x".into(), "x^-1".into(), "y".into(), "y^-1".into()],
            coset_reps: vec![GroupElement::new(vec![0, 0, 0], 0)],
            subgroup_rank: 3,
        }
    }

    /// Build a model from its config name and optional parameters.
    pub fn from_name(name: &str, d: Option<usize>, m: Option<u32>) -> Result<Self> {
        match name {
            "zd" => GroupModel::zd(d.ok_or_else(|| Error::Parameter {
                key: "model.d".into(),
                reason: "required for model `zd`".into(),
            })?),
            "zd_times_cyclic" => {
                let d = d.ok_or_else(|| Error::Parameter {
                    key: "model.d".into(),
                    reason: "required for model `zd_times_cyclic`".into(),
                })?;
                let m = m.ok_or_else(|| Error::Parameter {
                    key: "model.m".into(),
                    reason: "required for model `zd_times_cyclic`".into(),
                })?;
                GroupModel::zd_times_cyclic(d, m)
            }
            "heisenberg" => Ok(GroupModel::heisenberg()),
            other => Err(Error::Parameter {
                key: "model.name".into(),
                reason: format!("unknown model `{other}` (expected zd, zd_times_cyclic, heisenberg)"),
            }),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            ModelKind::Zd { d } | ModelKind::ZdTimesCyclic { d, .. } => {
                GroupElement::new(vec![0; *d], 0)
            }
            ModelKind::Heisenberg => GroupElement::new(vec![0, 0, 0], 0),
        }
    }

    /// The symmetric generating set S.
    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn generator_label(&self, idx: usize) -> &str {
        &self.generator_labels[idx]
    }

    /// |S|, which is also the vertex degree of the Cayley graph.
    pub fn degree(&self) -> usize {
        self.generators.len()
    }

    /// Coset representatives X; index 0 is the identity.
    pub fn coset_reps(&self) -> &[GroupElement] {
        &self.coset_reps
    }

    /// n = [Γ : H].
    pub fn index_n(&self) -> usize {
        self.coset_reps.len()
    }

    pub fn subgroup_rank(&self) -> usize {
        self.subgroup_rank
    }

    fn check_element(&self, g: &GroupElement) -> Result<()> {
        let (want_len, finite_bound) = match &self.kind {
            ModelKind::Zd { d } => (*d, 1),
            ModelKind::ZdTimesCyclic { d, m } => (*d, *m),
            ModelKind::Heisenberg => (3, 1),
        };
        if g.coords.len() != want_len || g.finite >= finite_bound {
            return Err(Error::ModelMismatch(format!(
                "element {g:?} does not belong to {:?}",
                self.kind
            )));
        }
        Ok(())
    }

    /// Group multiplication in normal form.
    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_element(a)?;
        self.check_element(b)?;
        Ok(self.multiply_unchecked(a, b))
    }

    /// Multiplication without the membership check; callers inside hot loops
    /// use this with elements the model itself produced.
    pub fn multiply_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match &self.kind {
            ModelKind::Zd { .. } => {
                let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
                GroupElement::new(coords, 0)
            }
            ModelKind::ZdTimesCyclic { m, .. } => {
                let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
                GroupElement::new(coords, (a.finite + b.finite) % m)
            }
            ModelKind::Heisenberg => {
                // x^a1 y^b1 z^c1 · x^a2 y^b2 z^c2 = x^(a1+a2) y^(b1+b2) z^(c1+c2-a2·b1)
                let (a1, b1, c1) = (a.coords[0], a.coords[1], a.coords[2]);
                let (a2, b2, c2) = (b.coords[0], b.coords[1], b.coords[2]);
                GroupElement::new(vec![a1 + a2, b1 + b2, c1 + c2 - a2 * b1], 0)
            }
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check_element(g)?;
        Ok(self.inverse_unchecked(g))
    }

    pub fn inverse_unchecked(&self, g: &GroupElement) -> GroupElement {
        match &self.kind {
            ModelKind::Zd { .. } => GroupElement::new(g.coords.iter().map(|x| -x).collect(), 0),
            ModelKind::ZdTimesCyclic { m, .. } => GroupElement::new(
                g.coords.iter().map(|x| -x).collect(),
                if g.finite == 0 { 0 } else { m - g.finite },
            ),
            ModelKind::Heisenberg => {
                let (a, b, c) = (g.coords[0], g.coords[1], g.coords[2]);
                GroupElement::new(vec![-a, -b, -c - a * b], 0)
            }
        }
    }

    /// True when g lies in the subgroup H (the carrier of the Mal'cev
    /// coordinates): all of Γ for Z^d and Heisenberg, the Z^d × {0} factor
    /// for Z^d × C_m.
    pub fn is_in_subgroup(&self, g: &GroupElement) -> bool {
        g.finite == 0
    }

    /// Decompose g = h · x_i with h in H; returns (h, i) with i zero-based
    /// into `coset_reps`.
    pub fn coset_decompose(&self, g: &GroupElement) -> Result<(GroupElement, usize)> {
        self.check_element(g)?;
        let i = g.finite as usize;
        // h = g · x_i^{-1}; for the built-ins this just zeroes the finite part.
        let h = GroupElement::new(g.coords.clone(), 0);
        debug_assert_eq!(
            self.multiply_unchecked(&h, &self.coset_reps[i]),
            *g,
            "coset decomposition must reassemble",
        );
        Ok((h, i))
    }

    /// Mal'cev coordinates of h ∈ H with respect to the model's fixed basis.
    /// For Z^d and Z^d × C_m this is the coordinate vector; for Heisenberg it
    /// is (a, b, c) of the normal form x^a y^b z^c.
    pub fn malcev_coordinates(&self, h: &GroupElement) -> Result<Vec<i64>> {
        self.check_element(h)?;
        if !self.is_in_subgroup(h) {
            return Err(Error::Domain(format!(
                "element {h:?} is not in the subgroup H"
            )));
        }
        Ok(h.coords.clone())
    }

    /// Short config-style name of the model.
    pub fn name(&self) -> String {
        match &self.kind {
            ModelKind::Zd { d } => format!("zd(d={d})"),
            ModelKind::ZdTimesCyclic { d, m } => format!("zd_times_cyclic(d={d},m={m})"),
            ModelKind::Heisenberg => "heisenberg".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle for the Heisenberg law: 3×3 upper-unitriangular
    /// integer matrices. x^a y^b z^c corresponds to rows
    /// [1 a ab+c; 0 1 b; 0 0 1].
    #[derive(Clone, Copy, Debug, PartialEq)]
    struct Uni3([[i64; 3]; 3]);

    fn heis_to_matrix(g: &GroupElement) -> Uni3 {
        let (a, b, c) = (g.coords[0], g.coords[1], g.coords[2]);
        Uni3([[1, a, a * b + c], [0, 1, b], [0, 0, 1]])
    }

    // textbook triple loop; iterator form would only obscure the oracle
    #[allow(clippy::needless_range_loop)]
    fn mat_mul(p: Uni3, q: Uni3) -> Uni3 {
        let mut out = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[i][j] += p.0[i][k] * q.0[k][j];
                }
            }
        }
        Uni3(out)
    }

    #[test]
    fn heisenberg_normal_form_against_matrix_oracle() {
        let h = GroupModel::heisenberg();
        let samples = [
            (0, 0, 0),
            (1, 0, 0),
            (0, 1, 0),
            (0, 0, 1),
            (2, 3, 1),
            (-1, 4, -2),
            (5, -5, 7),
            (-3, -3, -3),
        ];
        for &(a1, b1, c1) in &samples {
            for &(a2, b2, c2) in &samples {
                let g1 = GroupElement::new(vec![a1, b1, c1], 0);
                let g2 = GroupElement::new(vec![a2, b2, c2], 0);
                let prod = h.multiply(&g1, &g2).unwrap();
                assert_eq!(
                    heis_to_matrix(&prod),
                    mat_mul(heis_to_matrix(&g1), heis_to_matrix(&g2)),
                    "normal-form product disagrees with matrix oracle for {g1:?}·{g2:?}",
                );
            }
        }
    }

    #[test]
    fn heisenberg_commutator_is_central_z() {
        let h = GroupModel::heisenberg();
        let x = GroupElement::new(vec![1, 0, 0], 0);
        let y = GroupElement::new(vec![0, 1, 0], 0);
        let z = GroupElement::new(vec![0, 0, 1], 0);
        // [x, y] = x^{-1} y^{-1} x y = z
        let comm = h
            .multiply(
                &h.multiply(&h.inverse(&x).unwrap(), &h.inverse(&y).unwrap())
                    .unwrap(),
                &h.multiply(&x, &y).unwrap(),
            )
            .unwrap();
        assert_eq!(comm, z);
        // z commutes with both generators
        for g in [&x, &y] {
            assert_eq!(
                h.multiply(&z, g).unwrap(),
                h.multiply(g, &z).unwrap()
            );
        }
    }

    #[test]
    fn coset_structure_zd_times_cyclic() {
        let m = GroupModel::zd_times_cyclic(1, 3).unwrap();
        assert_eq!(m.index_n(), 3);
        assert_eq!(m.coset_reps()[0], m.identity());
        assert_eq!(m.degree(), 4); // ±shift, c, c^-1
        let g = GroupElement::new(vec![7], 2);
        let (h, i) = m.coset_decompose(&g).unwrap();
        assert_eq!(i, 2);
        assert!(m.is_in_subgroup(&h));
        assert_eq!(m.multiply(&h, &m.coset_reps()[i]).unwrap(), g);
    }

    #[test]
    fn involution_not_duplicated_for_m2() {
        let m = GroupModel::zd_times_cyclic(1, 2).unwrap();
        // ±shift plus a single self-inverse flip
        assert_eq!(m.degree(), 3);
        let flip = GroupElement::new(vec![0], 1);
        assert_eq!(m.inverse(&flip).unwrap(), flip);
    }

    #[test]
    fn generating_sets_are_symmetric_and_proper() {
        for model in [
            GroupModel::zd(1).unwrap(),
            GroupModel::zd(2).unwrap(),
            GroupModel::zd(3).unwrap(),
            GroupModel::zd_times_cyclic(1, 2).unwrap(),
            GroupModel::zd_times_cyclic(2, 3).unwrap(),
            GroupModel::heisenberg(),
        ] {
            let id = model.identity();
            for s in model.generators() {
                assert_ne!(*s, id, "identity in generating set of {}", model.name());
                let inv = model.inverse(s).unwrap();
                assert!(
                    model.generators().contains(&inv),
                    "generator inverse missing in {}",
                    model.name()
                );
            }
            // no duplicates
            let mut sorted = model.generators().to_vec();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), model.degree());
        }
    }

    #[test]
    fn model_mismatch_detected() {
        let z2 = GroupModel::zd(2).unwrap();
        let bad = GroupElement::new(vec![1, 2, 3], 0);
        assert!(z2.multiply(&bad, &z2.identity()).is_err());
        let zc = GroupModel::zd_times_cyclic(1, 2).unwrap();
        let bad_finite = GroupElement::new(vec![0], 5);
        assert!(zc.inverse(&bad_finite).is_err());
    }

    #[test]
    fn malcev_example_heisenberg() {
        let h = GroupModel::heisenberg();
        let g = GroupElement::new(vec![2, 3, 1], 0); // x^2 y^3 z
        assert_eq!(h.malcev_coordinates(&g).unwrap(), vec![2, 3, 1]);
    }

    #[test]
    fn malcev_requires_subgroup_membership() {
        let m = GroupModel::zd_times_cyclic(2, 2).unwrap();
        let g = GroupElement::new(vec![1, 1], 1);
        assert!(m.malcev_coordinates(&g).is_err());
    }

    fn heis_strategy() -> impl Strategy<Value = GroupElement> {
        (-20i64..=20, -20i64..=20, -50i64..=50)
            .prop_map(|(a, b, c)| GroupElement::new(vec![a, b, c], 0))
    }

    proptest! {
        #[test]
        fn heisenberg_group_axioms(g1 in heis_strategy(), g2 in heis_strategy(), g3 in heis_strategy()) {
            let h = GroupModel::heisenberg();
            let id = h.identity();
            // associativity
            let left = h.multiply(&h.multiply(&g1, &g2).unwrap(), &g3).unwrap();
            let right = h.multiply(&g1, &h.multiply(&g2, &g3).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            // inverses on both sides
            let inv = h.inverse(&g1).unwrap();
            prop_assert_eq!(h.multiply(&g1, &inv).unwrap(), id.clone());
            prop_assert_eq!(h.multiply(&inv, &g1).unwrap(), id);
        }

        #[test]
        fn cyclic_product_axioms(
            a in -30i64..=30, fa in 0u32..5, b in -30i64..=30, fb in 0u32..5
        ) {
            let m = GroupModel::zd_times_cyclic(1, 5).unwrap();
            let g1 = GroupElement::new(vec![a], fa);
            let g2 = GroupElement::new(vec![b], fb);
            let p = m.multiply(&g1, &g2).unwrap();
            prop_assert_eq!(p.finite, (fa + fb) % 5);
            let inv = m.inverse(&g1).unwrap();
            prop_assert_eq!(m.multiply(&g1, &inv).unwrap(), m.identity());
        }
    }
}
