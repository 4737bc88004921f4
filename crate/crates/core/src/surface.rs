//! Surface models of large degree with Galois data: virtual Néron-Severi
//! sets, their permutation characters, and the orbit sets of rational-curve
//! classes of fixed degree.
//!
//! Galois groups are finite permutation groups chosen by the caller; all
//! attached G-sets must live over the same group. No field arithmetic is
//! involved anywhere.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::gset::{
    burnside_canonicalize, is_isomorphic, same_group, BurnsideElement, GSet, GSetSpec,
};
use crate::nslattice::{adjoint_dual, rational_degree_classes, DivisorClass, PicardLattice};
use crate::permgrp::{Group, GroupSpec, Permutation};

/// A small dense integer matrix, acting on lattice coordinates as a column
/// vector map `v -> M v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntMatrix {
    rows: Vec<Vec<i64>>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<IntMatrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return validation("matrix is not square");
        }
        Ok(IntMatrix { rows })
    }

    pub fn identity(n: usize) -> IntMatrix {
        IntMatrix {
            rows: (0..n)
                .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut i64 {
        &mut self.rows[i][j]
    }

    pub fn apply(&self, v: &DivisorClass) -> DivisorClass {
        DivisorClass::new(
            self.rows
                .iter()
                .map(|row| row.iter().zip(v.coords()).map(|(a, x)| a * x).sum())
                .collect(),
        )
    }

    /// Plain matrix product `self · other`.
    pub fn matmul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.dim();
        IntMatrix {
            rows: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| self.rows[i][k] * other.rows[k][j]).sum())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim()).map(|i| self.rows[i][i]).sum()
    }

    fn column(&self, j: usize) -> DivisorClass {
        DivisorClass::new(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Reflection in a root `α` with `α² = -2` and `α·K = 0`:
/// `v -> v + (v·α) α`. Such reflections preserve the form and fix K.
pub fn weyl_reflection(lattice: &PicardLattice, root: &DivisorClass) -> Result<IntMatrix> {
    if lattice.intersection(root, root)? != -2 {
        return validation("reflection root must have self-intersection -2");
    }
    if lattice.intersection(root, &lattice.canonical_class())? != 0 {
        return validation("reflection root must be orthogonal to K");
    }
    let n = lattice.rank();
    let mut m = IntMatrix::identity(n);
    for j in 0..n {
        let mut basis = vec![0i64; n];
        basis[j] = 1;
        let e = DivisorClass::new(basis);
        let image = e.add(&scale(root, lattice.intersection(&e, root)?));
        for i in 0..n {
            m.rows[i][j] = image.coords()[i];
        }
    }
    Ok(m)
}

fn scale(d: &DivisorClass, c: i64) -> DivisorClass {
    DivisorClass::new(d.coords().iter().map(|x| c * x).collect())
}

/// The matrix permuting the exceptional classes `E_i` by a permutation of
/// the blown-up points, fixing `H`.
pub fn e_permutation_matrix(lattice: &PicardLattice, perm: &Permutation) -> Result<IntMatrix> {
    let r = match lattice {
        PicardLattice::BlowupP2 { r } => *r,
        PicardLattice::Quadric => {
            return validation("exceptional permutations live on blow-up lattices")
        }
    };
    if perm.degree() != r {
        return validation(format!(
            "permutation degree {} does not match r = {r}",
            perm.degree()
        ));
    }
    let mut m = IntMatrix::identity(r + 1);
    for i in 0..r {
        for j in 0..r {
            m.rows[1 + i][1 + j] = i64::from(perm.apply(j) == i);
        }
    }
    Ok(m)
}

/// A Galois action on a Picard lattice: one integer matrix per group
/// generator, each preserving the intersection form and fixing the
/// canonical class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeAction {
    matrices: Vec<IntMatrix>,
}

impl LatticeAction {
    pub fn new(matrices: Vec<IntMatrix>) -> LatticeAction {
        LatticeAction { matrices }
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        &self.matrices
    }

    /// Full validation against a group and lattice: shape, form preservation,
    /// K-fixing, and consistency with every relation of the group (all edges
    /// of the Cayley graph are checked on the extended element matrices).
    pub fn validate(&self, group: &Group, lattice: &PicardLattice) -> Result<()> {
        self.element_matrices(group, lattice).map(|_| ())
    }

    /// Extends the generator matrices to all group elements, validating along
    /// the way. Index i is the matrix of group element i.
    pub fn element_matrices(
        &self,
        group: &Group,
        lattice: &PicardLattice,
    ) -> Result<Vec<IntMatrix>> {
        let n = lattice.rank();
        if self.matrices.len() != group.generators().len() {
            return validation(format!(
                "expected {} matrices, got {}",
                group.generators().len(),
                self.matrices.len()
            ));
        }
        let k = lattice.canonical_class();
        for m in &self.matrices {
            if m.dim() != n {
                return validation(format!("matrix dimension {} != rank {n}", m.dim()));
            }
            for i in 0..n {
                for j in i..n {
                    let expected = {
                        let mut ei = vec![0i64; n];
                        ei[i] = 1;
                        let mut ej = vec![0i64; n];
                        ej[j] = 1;
                        lattice.intersection(&DivisorClass::new(ei), &DivisorClass::new(ej))?
                    };
                    if lattice.intersection(&m.column(i), &m.column(j))? != expected {
                        return validation("matrix does not preserve the intersection form");
                    }
                }
            }
            if m.apply(&k) != k {
                return validation("matrix does not fix the canonical class");
            }
        }
        // Extend along generator words; m(a then b) = m(b) · m(a).
        let mut mats = vec![IntMatrix::identity(n); group.order()];
        for &e in group.eval_order() {
            let (p, j) = group.word_edge(e);
            if j != usize::MAX as u32 {
                mats[e as usize] = self.matrices[j as usize].matmul(&mats[p as usize]);
            }
        }
        let gen_ix: Vec<u32> = group
            .generators()
            .iter()
            .map(|g| group.index_of(g).expect("generator in group"))
            .collect();
        for e in 0..group.order() as u32 {
            for (j, &gj) in gen_ix.iter().enumerate() {
                let target = group.mul(e, gj);
                if mats[target as usize] != self.matrices[j].matmul(&mats[e as usize]) {
                    return validation("lattice action does not respect the group relations");
                }
            }
        }
        Ok(mats)
    }
}

/// Model data per tag. The attached G-sets are the Galois sets of conic
/// pencils, cubic nets and rulings that generate the Néron-Severi lattice
/// of the model.
#[derive(Debug, Clone)]
pub enum SurfaceKind {
    DP9,
    DP8 {
        rulings: GSet,
    },
    C8,
    DP6 {
        conics: GSet,
        cubics: GSet,
    },
    DP5 {
        conics: GSet,
    },
    /// A blow-up model carrying its full lattice action. The lattice may
    /// also be the quadric, for rational-curve orbit computations there.
    P2Blowup {
        lattice: PicardLattice,
        action: LatticeAction,
    },
}

impl SurfaceKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SurfaceKind::DP9 => "dp9",
            SurfaceKind::DP8 { .. } => "dp8",
            SurfaceKind::C8 => "c8",
            SurfaceKind::DP6 { .. } => "dp6",
            SurfaceKind::DP5 { .. } => "dp5",
            SurfaceKind::P2Blowup { .. } => "p2_blowup",
        }
    }
}

/// A surface model: a large-degree minimal model with Galois data, plus a
/// stack of blown-up centers (outermost last).
#[derive(Debug, Clone)]
pub struct SurfaceModel {
    galois: Arc<Group>,
    kind: SurfaceKind,
    stack: Vec<GSet>,
}

impl SurfaceModel {
    pub fn new(galois: Arc<Group>, kind: SurfaceKind, stack: Vec<GSet>) -> Result<SurfaceModel> {
        let check = |set: &GSet, size: usize, what: &str| -> Result<()> {
            if !same_group(set.group(), &galois) {
                return validation(format!("{what} is not over the model's Galois group"));
            }
            if set.size() != size {
                return validation(format!("{what} must have size {size}, got {}", set.size()));
            }
            Ok(())
        };
        match &kind {
            SurfaceKind::DP9 | SurfaceKind::C8 => {}
            SurfaceKind::DP8 { rulings } => check(rulings, 2, "ruling set")?,
            SurfaceKind::DP6 { conics, cubics } => {
                check(conics, 3, "conic set")?;
                check(cubics, 2, "cubic set")?;
            }
            SurfaceKind::DP5 { conics } => check(conics, 5, "conic set")?,
            SurfaceKind::P2Blowup { lattice, action } => {
                action.validate(&galois, lattice)?;
            }
        }
        for (i, z) in stack.iter().enumerate() {
            if !same_group(z.group(), &galois) {
                return validation(format!("stack center {i} is not over the Galois group"));
            }
        }
        Ok(SurfaceModel {
            galois,
            kind,
            stack,
        })
    }

    pub fn galois(&self) -> &Arc<Group> {
        &self.galois
    }

    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    pub fn stack(&self) -> &[GSet] {
        &self.stack
    }

    pub fn tag(&self) -> &'static str {
        self.kind.tag()
    }

    /// Anticanonical degree of the underlying minimal model.
    pub fn base_degree(&self) -> Option<i64> {
        match &self.kind {
            SurfaceKind::DP9 => Some(9),
            SurfaceKind::DP8 { .. } | SurfaceKind::C8 => Some(8),
            SurfaceKind::DP6 { .. } => Some(6),
            SurfaceKind::DP5 { .. } => Some(5),
            SurfaceKind::P2Blowup { .. } => None,
        }
    }

    pub fn with_center_pushed(&self, center: GSet) -> Result<SurfaceModel> {
        if !same_group(center.group(), &self.galois) {
            return validation("center is not over the model's Galois group");
        }
        let mut stack = self.stack.clone();
        stack.push(center);
        Ok(SurfaceModel {
            galois: self.galois.clone(),
            kind: self.kind.clone(),
            stack,
        })
    }

    /// Removes one stack entry isomorphic to the given center.
    pub fn with_center_removed(&self, center: &GSet) -> Result<SurfaceModel> {
        for i in (0..self.stack.len()).rev() {
            if is_isomorphic(&self.stack[i], center)? {
                let mut stack = self.stack.clone();
                stack.remove(i);
                return Ok(SurfaceModel {
                    galois: self.galois.clone(),
                    kind: self.kind.clone(),
                    stack,
                });
            }
        }
        validation("no stack center isomorphic to the requested contraction")
    }

    /// Model isomorphism: equal tag, slotwise isomorphic Galois data, and
    /// stack multisets isomorphic.
    pub fn isomorphic_to(&self, other: &SurfaceModel) -> Result<bool> {
        if !same_group(&self.galois, &other.galois) {
            return Ok(false);
        }
        let data_match = match (&self.kind, &other.kind) {
            (SurfaceKind::DP9, SurfaceKind::DP9) => true,
            (SurfaceKind::C8, SurfaceKind::C8) => true,
            (SurfaceKind::DP8 { rulings: a }, SurfaceKind::DP8 { rulings: b }) => {
                is_isomorphic(a, b)?
            }
            (
                SurfaceKind::DP6 {
                    conics: a,
                    cubics: c,
                },
                SurfaceKind::DP6 {
                    conics: b,
                    cubics: d,
                },
            ) => is_isomorphic(a, b)? && is_isomorphic(c, d)?,
            (SurfaceKind::DP5 { conics: a }, SurfaceKind::DP5 { conics: b }) => {
                is_isomorphic(a, b)?
            }
            (
                SurfaceKind::P2Blowup {
                    lattice: la,
                    action: aa,
                },
                SurfaceKind::P2Blowup {
                    lattice: lb,
                    action: ab,
                },
            ) => la == lb && aa == ab,
            _ => false,
        };
        if !data_match {
            return Ok(false);
        }
        if self.stack.len() != other.stack.len() {
            return Ok(false);
        }
        // Greedy multiset matching; isomorphism is an equivalence relation.
        let mut rest: Vec<&GSet> = other.stack.iter().collect();
        for z in &self.stack {
            match rest
                .iter()
                .position(|w| is_isomorphic(z, w).unwrap_or(false))
            {
                Some(i) => {
                    rest.swap_remove(i);
                }
                None => return Ok(false),
            }
        }
        Ok(true)
    }

    /// The virtual Néron-Severi set of the minimal model underneath
    /// (the stack does not enter). Blow-up models carry a lattice action
    /// instead of a virtual set; use [`SurfaceModel::ns_character`] there.
    pub fn virtual_ns_set(&self) -> Result<BurnsideElement> {
        let g = &self.galois;
        let pt = GSet::point(g.clone());
        match &self.kind {
            SurfaceKind::DP9 => burnside_canonicalize(g, &[&pt], &[]),
            SurfaceKind::DP8 { rulings } => burnside_canonicalize(g, &[rulings], &[]),
            SurfaceKind::C8 => burnside_canonicalize(g, &[&pt, &pt], &[]),
            SurfaceKind::DP6 { conics, cubics } => {
                burnside_canonicalize(g, &[cubics, conics], &[&pt])
            }
            SurfaceKind::DP5 { conics } => burnside_canonicalize(g, &[conics], &[]),
            SurfaceKind::P2Blowup { .. } => {
                validation("blow-up models have no virtual Néron-Severi set; use ns_character")
            }
        }
    }

    /// Character of `NS ⊗ Q` as a virtual permutation object: the base model
    /// contribution plus the fixed-point characters of all stack centers.
    /// Indexed by the conjugacy classes of the Galois group.
    pub fn ns_character(&self) -> Result<Vec<i64>> {
        let n_classes = self.galois.conjugacy_classes().count();
        let ones = vec![1i64; n_classes];
        let chi = |set: &GSet| set.fixed_point_character().signed();
        let mut out = match &self.kind {
            SurfaceKind::DP9 => ones.clone(),
            SurfaceKind::DP8 { rulings } => chi(rulings),
            SurfaceKind::C8 => ones.iter().map(|x| 2 * x).collect(),
            SurfaceKind::DP6 { conics, cubics } => chi(conics)
                .iter()
                .zip(chi(cubics))
                .zip(&ones)
                .map(|((a, b), c)| a + b - c)
                .collect(),
            SurfaceKind::DP5 { conics } => chi(conics),
            SurfaceKind::P2Blowup { lattice, action } => {
                let mats = action.element_matrices(&self.galois, lattice)?;
                let table = self.galois.conjugacy_classes();
                (0..table.count() as u32)
                    .map(|c| mats[table.representative(c) as usize].trace())
                    .collect()
            }
        };
        for z in &self.stack {
            for (o, x) in out.iter_mut().zip(chi(z)) {
                *o += x;
            }
        }
        Ok(out)
    }

    /// The G-set of degree-j rational-curve classes under the lattice action.
    pub fn mj_set(&self, j: i64) -> Result<GSet> {
        let (lattice, action) = match &self.kind {
            SurfaceKind::P2Blowup { lattice, action } => (lattice, action),
            _ => return validation("mj_set needs a blow-up model with a lattice action"),
        };
        let list = rational_degree_classes(lattice, j)?;
        let mats = action.element_matrices(&self.galois, lattice)?;
        let gen_ix: Vec<u32> = self
            .galois
            .generators()
            .iter()
            .map(|g| self.galois.index_of(g).expect("generator in group"))
            .collect();
        let mut gen_actions = Vec::with_capacity(gen_ix.len());
        for &gi in &gen_ix {
            let m = &mats[gi as usize];
            let mut images = Vec::with_capacity(list.len());
            for c in &list.classes {
                let image = m.apply(c);
                match list.position(&image) {
                    Some(p) => images.push(p),
                    None => {
                        return validation("lattice action does not permute the degree class list")
                    }
                }
            }
            gen_actions.push(Permutation::from_images(images)?);
        }
        GSet::new(self.galois.clone(), list.len(), gen_actions)
    }

    /// True iff `|D| -> |-K - D|` induces a G-set isomorphism between the
    /// degree-j and degree-(d-j) class orbit sets.
    pub fn mj_duality_check(&self, j: i64) -> Result<bool> {
        let lattice = match &self.kind {
            SurfaceKind::P2Blowup { lattice, .. } => lattice,
            _ => return validation("duality check needs a blow-up model"),
        };
        let d = lattice.k_squared();
        let left = rational_degree_classes(lattice, j)?;
        let right = rational_degree_classes(lattice, d - j)?;
        let a = self.mj_set(j)?;
        let b = self.mj_set(d - j)?;
        // The dual positions give the candidate isomorphism.
        let mut map = Vec::with_capacity(left.len());
        for c in &left.classes {
            match right.position(&adjoint_dual(lattice, c)) {
                Some(p) => map.push(p),
                None => return Ok(false),
            }
        }
        let mut hit = vec![false; right.len()];
        for &p in &map {
            if hit[p] {
                return Ok(false);
            }
            hit[p] = true;
        }
        for (ga, gb) in a.gen_actions().iter().zip(b.gen_actions()) {
            for x in 0..left.len() {
                if map[ga.apply(x)] != gb.apply(map[x]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Rank of the Néron-Severi lattice over the base field: the signed
    /// orbit count of the virtual set plus one per orbit of each stack
    /// center.
    pub fn picard_rank(&self) -> Result<i64> {
        let base = self.virtual_ns_set()?.virtual_orbit_count();
        let stack: i64 = self.stack.iter().map(|z| z.orbits().len() as i64).sum();
        Ok(base + stack)
    }
}

/// `m = 8 - K²`: the number of geometric singular fibers of a conic bundle.
pub fn singular_fiber_count(k_squared: i64) -> Result<i64> {
    if k_squared > 8 {
        return validation(format!("conic bundles have K² <= 8, got {k_squared}"));
    }
    Ok(8 - k_squared)
}

/// Serialized model data, adjacently tagged as `{tag, data}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "tag", content = "data", rename_all = "snake_case")]
pub enum SurfaceKindSpec {
    Dp9,
    Dp8 {
        rulings: GSetSpec,
    },
    C8,
    Dp6 {
        conics: GSetSpec,
        cubics: GSetSpec,
    },
    Dp5 {
        conics: GSetSpec,
    },
    P2Blowup {
        lattice: PicardLattice,
        action: LatticeAction,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceModelSpec {
    pub galois: GroupSpec,
    #[serde(flatten)]
    pub kind: SurfaceKindSpec,
    #[serde(default)]
    pub stack: Vec<GSetSpec>,
}

impl SurfaceModelSpec {
    pub fn of(model: &SurfaceModel) -> SurfaceModelSpec {
        let kind = match model.kind() {
            SurfaceKind::DP9 => SurfaceKindSpec::Dp9,
            SurfaceKind::DP8 { rulings } => SurfaceKindSpec::Dp8 {
                rulings: GSetSpec::of(rulings),
            },
            SurfaceKind::C8 => SurfaceKindSpec::C8,
            SurfaceKind::DP6 { conics, cubics } => SurfaceKindSpec::Dp6 {
                conics: GSetSpec::of(conics),
                cubics: GSetSpec::of(cubics),
            },
            SurfaceKind::DP5 { conics } => SurfaceKindSpec::Dp5 {
                conics: GSetSpec::of(conics),
            },
            SurfaceKind::P2Blowup { lattice, action } => SurfaceKindSpec::P2Blowup {
                lattice: *lattice,
                action: action.clone(),
            },
        };
        SurfaceModelSpec {
            galois: GroupSpec::of(model.galois()),
            kind,
            stack: model.stack().iter().map(GSetSpec::of).collect(),
        }
    }

    pub fn build(self) -> Result<SurfaceModel> {
        let galois = Arc::new(self.galois.build()?);
        self.kind.build_with(&galois, self.stack)
    }

    pub fn build_limited(self, limits: crate::permgrp::Limits) -> Result<SurfaceModel> {
        let galois = Arc::new(self.galois.build_limited(limits)?);
        self.kind.build_with(&galois, self.stack)
    }
}

impl SurfaceKindSpec {
    pub fn build_with(self, galois: &Arc<Group>, stack: Vec<GSetSpec>) -> Result<SurfaceModel> {
        let kind = match self {
            SurfaceKindSpec::Dp9 => SurfaceKind::DP9,
            SurfaceKindSpec::Dp8 { rulings } => SurfaceKind::DP8 {
                rulings: rulings.bind(galois)?,
            },
            SurfaceKindSpec::C8 => SurfaceKind::C8,
            SurfaceKindSpec::Dp6 { conics, cubics } => SurfaceKind::DP6 {
                conics: conics.bind(galois)?,
                cubics: cubics.bind(galois)?,
            },
            SurfaceKindSpec::Dp5 { conics } => SurfaceKind::DP5 {
                conics: conics.bind(galois)?,
            },
            SurfaceKindSpec::P2Blowup { lattice, action } => {
                SurfaceKind::P2Blowup { lattice, action }
            }
        };
        let stack = stack
            .into_iter()
            .map(|s| s.bind(galois))
            .collect::<Result<Vec<_>>>()?;
        SurfaceModel::new(galois.clone(), kind, stack)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::gset::gset_from_subgroup;

    fn trivial_galois() -> Arc<Group> {
        Arc::new(Group::trivial(1))
    }

    fn klein_four() -> Arc<Group> {
        let a = Permutation::from_images(vec![1, 0, 2, 3]).unwrap();
        let b = Permutation::from_images(vec![0, 1, 3, 2]).unwrap();
        Arc::new(Group::from_generators(4, vec![a, b]).unwrap())
    }

    fn split_dp6(g: &Arc<Group>) -> SurfaceModel {
        SurfaceModel::new(
            g.clone(),
            SurfaceKind::DP6 {
                conics: GSet::trivial(g.clone(), 3),
                cubics: GSet::trivial(g.clone(), 2),
            },
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn virtual_ns_sets_of_the_model_families() {
        let g = trivial_galois();
        let dp9 = SurfaceModel::new(g.clone(), SurfaceKind::DP9, vec![]).unwrap();
        assert_eq!(dp9.virtual_ns_set().unwrap().virtual_orbit_count(), 1);
        let c8 = SurfaceModel::new(g.clone(), SurfaceKind::C8, vec![]).unwrap();
        let a = c8.virtual_ns_set().unwrap();
        assert_eq!(a.total_degree().unwrap(), 2);
        assert_eq!(a.mu().unwrap(), vec![2]);
        let dp6 = split_dp6(&g);
        let e = dp6.virtual_ns_set().unwrap();
        assert_eq!(e.mu().unwrap(), vec![4]);
        // Over the trivial group the -[pt] is absorbed; with both data sets
        // transitive the element is a genuinely virtual set.
        assert!(e.is_actual_set());
        let c6 = Arc::new(
            Group::from_generators(
                6,
                vec![Permutation::from_images(vec![1, 2, 3, 4, 5, 0]).unwrap()],
            )
            .unwrap(),
        );
        let subs = c6.subgroups_up_to_conjugacy().unwrap();
        let index3 = subs.iter().find(|s| s.index_in(&c6) == 3).unwrap();
        let index2 = subs.iter().find(|s| s.index_in(&c6) == 2).unwrap();
        let twisted = SurfaceModel::new(
            c6.clone(),
            SurfaceKind::DP6 {
                conics: gset_from_subgroup(&c6, index3),
                cubics: gset_from_subgroup(&c6, index2),
            },
            vec![],
        )
        .unwrap();
        let e = twisted.virtual_ns_set().unwrap();
        assert!(!e.is_actual_set());
        assert_eq!(e.virtual_orbit_count(), 1);
    }

    #[test]
    fn ns_character_equals_mu_of_virtual_set() {
        let g = klein_four();
        let subs = g.subgroups_up_to_conjugacy().unwrap();
        let z2 = gset_from_subgroup(&g, &subs[1]);
        let dp8 = SurfaceModel::new(
            g.clone(),
            SurfaceKind::DP8 {
                rulings: z2.clone(),
            },
            vec![],
        )
        .unwrap();
        assert_eq!(
            dp8.ns_character().unwrap(),
            dp8.virtual_ns_set().unwrap().mu().unwrap()
        );
        let dp6 = SurfaceModel::new(
            g.clone(),
            SurfaceKind::DP6 {
                conics: GSet::disjoint_union(&[z2.clone(), GSet::point(g.clone())]).unwrap(),
                cubics: z2.clone(),
            },
            vec![z2],
        )
        .unwrap();
        let mut mu = dp6.virtual_ns_set().unwrap().mu().unwrap();
        for (m, chi) in mu
            .iter_mut()
            .zip(dp6.stack()[0].fixed_point_character().signed())
        {
            *m += chi;
        }
        assert_eq!(dp6.ns_character().unwrap(), mu);
    }

    #[test]
    fn picard_ranks() {
        let g = klein_four();
        let dp9 = SurfaceModel::new(g.clone(), SurfaceKind::DP9, vec![]).unwrap();
        assert_eq!(dp9.picard_rank().unwrap(), 1);
        let subs = g.subgroups_up_to_conjugacy().unwrap();
        let z2 = gset_from_subgroup(&g, &subs[1]);
        let minimal_quadric =
            SurfaceModel::new(g.clone(), SurfaceKind::DP8 { rulings: z2 }, vec![]).unwrap();
        assert_eq!(minimal_quadric.picard_rank().unwrap(), 1);
        let split = split_dp6(&trivial_galois());
        assert_eq!(split.picard_rank().unwrap(), 4);
    }

    #[test]
    fn picard_rank_stack_push_pop_invariance() {
        let g = klein_four();
        let dp9 = SurfaceModel::new(g.clone(), SurfaceKind::DP9, vec![]).unwrap();
        let z = GSet::trivial(g.clone(), 2);
        let pushed = dp9.with_center_pushed(z.clone()).unwrap();
        assert_eq!(pushed.picard_rank().unwrap(), 3);
        let popped = pushed.with_center_removed(&z).unwrap();
        assert_eq!(popped.picard_rank().unwrap(), dp9.picard_rank().unwrap());
        assert!(popped.isomorphic_to(&dp9).unwrap());
    }

    #[test]
    fn singular_fibers() {
        assert_eq!(singular_fiber_count(8).unwrap(), 0);
        assert_eq!(singular_fiber_count(5).unwrap(), 3);
        assert_eq!(singular_fiber_count(0).unwrap(), 8);
        assert!(matches!(singular_fiber_count(9), Err(Error::Validation(_))));
    }

    fn split_blowup(g: &Arc<Group>, r: usize) -> SurfaceModel {
        let lattice = PicardLattice::blowup_p2(r).unwrap();
        let action = LatticeAction::new(
            g.generators()
                .iter()
                .map(|_| IntMatrix::identity(r + 1))
                .collect(),
        );
        SurfaceModel::new(g.clone(), SurfaceKind::P2Blowup { lattice, action }, vec![]).unwrap()
    }

    #[test]
    fn split_blowup_character_is_constant_rank() {
        let g = trivial_galois();
        let m = split_blowup(&g, 6);
        assert_eq!(m.ns_character().unwrap(), vec![7]);
    }

    #[test]
    fn mj_counts_for_split_models() {
        let g = trivial_galois();
        let dp6 = split_blowup(&g, 3);
        assert_eq!(dp6.mj_set(2).unwrap().orbits().len(), 3);
        assert_eq!(dp6.mj_set(3).unwrap().orbits().len(), 2);
        let dp5 = split_blowup(&g, 4);
        assert_eq!(dp5.mj_set(2).unwrap().orbits().len(), 5);
        assert_eq!(dp5.mj_set(3).unwrap().orbits().len(), 5);
        let quadric = SurfaceModel::new(
            g.clone(),
            SurfaceKind::P2Blowup {
                lattice: PicardLattice::Quadric,
                action: LatticeAction::new(vec![]),
            },
            vec![],
        )
        .unwrap();
        assert_eq!(quadric.mj_set(2).unwrap().size(), 2);
        assert_eq!(quadric.mj_set(4).unwrap().size(), 1);
        assert_eq!(quadric.mj_set(6).unwrap().size(), 2);
    }

    #[test]
    fn mj_duality_on_split_models() {
        let g = trivial_galois();
        for (r, j) in [(3usize, 2i64), (3, 3), (4, 2), (4, 3)] {
            let m = split_blowup(&g, r);
            assert!(m.mj_duality_check(j).unwrap(), "r = {r}, j = {j}");
        }
        let quadric = SurfaceModel::new(
            g.clone(),
            SurfaceKind::P2Blowup {
                lattice: PicardLattice::Quadric,
                action: LatticeAction::new(vec![]),
            },
            vec![],
        )
        .unwrap();
        assert!(quadric.mj_duality_check(2).unwrap());
    }

    /// A Coxeter element of the Weyl group on the dP5 lattice has order 5
    /// and permutes the five conic classes in a single cycle.
    #[test]
    fn coxeter_element_gives_a_five_cycle_on_conics() {
        let lattice = PicardLattice::blowup_p2(4).unwrap();
        let roots = [
            DivisorClass::new(vec![0, -1, 1, 0, 0]),
            DivisorClass::new(vec![0, 0, -1, 1, 0]),
            DivisorClass::new(vec![0, 0, 0, -1, 1]),
            DivisorClass::new(vec![1, 1, 1, 1, 0]),
        ];
        let mut cox = IntMatrix::identity(5);
        for root in &roots {
            cox = weyl_reflection(&lattice, root).unwrap().matmul(&cox);
        }
        let mut p = cox.clone();
        for _ in 0..4 {
            p = p.matmul(&cox);
        }
        assert_eq!(p, IntMatrix::identity(5));
        assert_ne!(cox, IntMatrix::identity(5));

        let c5 = Arc::new(
            Group::from_generators(
                5,
                vec![Permutation::from_images(vec![1, 2, 3, 4, 0]).unwrap()],
            )
            .unwrap(),
        );
        let model = SurfaceModel::new(
            c5.clone(),
            SurfaceKind::P2Blowup {
                lattice,
                action: LatticeAction::new(vec![cox]),
            },
            vec![],
        )
        .unwrap();
        let m2 = model.mj_set(2).unwrap();
        assert_eq!(m2.size(), 5);
        assert!(m2.is_transitive());
        assert!(model.mj_duality_check(2).unwrap());
    }

    #[test]
    fn corrupted_lattice_action_is_rejected() {
        let c2 = Arc::new(
            Group::from_generators(2, vec![Permutation::from_images(vec![1, 0]).unwrap()]).unwrap(),
        );
        let lattice = PicardLattice::blowup_p2(3).unwrap();
        let swap =
            e_permutation_matrix(&lattice, &Permutation::from_images(vec![1, 0, 2]).unwrap())
                .unwrap();
        assert!(LatticeAction::new(vec![swap.clone()])
            .validate(&c2, &lattice)
            .is_ok());
        let mut bad = swap;
        *bad.entry_mut(2, 2) += 1;
        assert!(matches!(
            LatticeAction::new(vec![bad]).validate(&c2, &lattice),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn blowup_models_have_no_virtual_set() {
        let g = trivial_galois();
        let m = split_blowup(&g, 3);
        assert!(matches!(m.virtual_ns_set(), Err(Error::Validation(_))));
        assert!(matches!(m.picard_rank(), Err(Error::Validation(_))));
    }

    #[test]
    fn wrong_data_sizes_are_rejected() {
        let g = trivial_galois();
        let bad = SurfaceModel::new(
            g.clone(),
            SurfaceKind::DP5 {
                conics: GSet::trivial(g.clone(), 4),
            },
            vec![],
        );
        assert!(matches!(bad, Err(Error::Validation(_))));
    }

    #[test]
    fn model_spec_round_trip() {
        let g = klein_four();
        let subs = g.subgroups_up_to_conjugacy().unwrap();
        let model = SurfaceModel::new(
            g.clone(),
            SurfaceKind::DP6 {
                conics: GSet::disjoint_union(&[
                    gset_from_subgroup(&g, &subs[1]),
                    GSet::point(g.clone()),
                ])
                .unwrap(),
                cubics: gset_from_subgroup(&g, &subs[2]),
            },
            vec![GSet::trivial(g.clone(), 2)],
        )
        .unwrap();
        let spec = SurfaceModelSpec::of(&model);
        let text = serde_json::to_string(&spec).unwrap();
        let back: SurfaceModelSpec = serde_json::from_str(&text).unwrap();
        let rebuilt = back.build().unwrap();
        assert!(rebuilt.isomorphic_to(&model).unwrap());
        assert_eq!(rebuilt.tag(), "dp6");
    }
}
