//! Finite G-sets, fixed-point characters, Burnside-ring elements and
//! Gassmann equivalence.
//!
//! A G-set is stored by its per-generator action; construction extends the
//! action to every group element and verifies the full multiplication table,
//! so a constructed `GSet` is always an actual action of its group.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{resource, validation, Error, Result};
use crate::permgrp::{Group, GroupSpec, Permutation, Subgroup};

pub(crate) fn same_group(a: &Arc<Group>, b: &Arc<Group>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A finite set with an action of a fixed group.
#[derive(Clone)]
pub struct GSet {
    group: Arc<Group>,
    size: usize,
    gen_actions: Vec<Permutation>,
    element_actions: Vec<Permutation>,
}

impl std::fmt::Debug for GSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GSet")
            .field("size", &self.size)
            .field("orbits", &self.orbits().len())
            .finish()
    }
}

impl PartialEq for GSet {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group)
            && self.size == other.size
            && self.gen_actions == other.gen_actions
    }
}
impl Eq for GSet {}

impl GSet {
    /// Builds a G-set from per-generator actions, extending along generator
    /// words and checking every edge of the Cayley graph. Consistency of all
    /// edges is a complete homomorphism check.
    pub fn new(group: Arc<Group>, size: usize, gen_actions: Vec<Permutation>) -> Result<GSet> {
        if gen_actions.len() != group.generators().len() {
            return validation(format!(
                "expected {} generator actions, got {}",
                group.generators().len(),
                gen_actions.len()
            ));
        }
        for a in &gen_actions {
            if a.degree() != size {
                return validation(format!(
                    "action degree {} does not match set size {size}",
                    a.degree()
                ));
            }
        }
        let mut element_actions = vec![Permutation::identity(size); group.order()];
        for &e in group.eval_order() {
            let (p, j) = group.word_edge(e);
            if j != usize::MAX as u32 {
                element_actions[e as usize] =
                    element_actions[p as usize].then(&gen_actions[j as usize]);
            }
        }
        let gen_ix: Vec<u32> = group
            .generators()
            .iter()
            .map(|g| group.index_of(g).expect("generator in own group"))
            .collect();
        for e in 0..group.order() as u32 {
            for (j, &gj) in gen_ix.iter().enumerate() {
                let target = group.mul(e, gj);
                if element_actions[target as usize]
                    != element_actions[e as usize].then(&gen_actions[j])
                {
                    return validation("generator actions do not respect the group relations");
                }
            }
        }
        Ok(GSet {
            group,
            size,
            gen_actions,
            element_actions,
        })
    }

    /// The set of given size with every generator acting trivially.
    pub fn trivial(group: Arc<Group>, size: usize) -> GSet {
        let gen_actions = group
            .generators()
            .iter()
            .map(|_| Permutation::identity(size))
            .collect();
        GSet {
            element_actions: vec![Permutation::identity(size); group.order()],
            group,
            size,
            gen_actions,
        }
    }

    /// A single point with the trivial action.
    pub fn point(group: Arc<Group>) -> GSet {
        GSet::trivial(group, 1)
    }

    /// The group acting on its own points through its defining permutations.
    pub fn natural(group: Arc<Group>) -> GSet {
        let gen_actions: Vec<Permutation> = group.generators().to_vec();
        let size = group.degree();
        GSet::new(group, size, gen_actions).expect("defining action is an action")
    }

    pub fn disjoint_union(parts: &[GSet]) -> Result<GSet> {
        let group = match parts.first() {
            Some(p) => p.group.clone(),
            None => return validation("disjoint union of zero G-sets needs a group"),
        };
        for p in parts {
            if !same_group(&group, &p.group) {
                return validation("disjoint union across different groups");
            }
        }
        let size = parts.iter().map(|p| p.size).sum();
        let mut gen_actions = Vec::with_capacity(group.generators().len());
        for j in 0..group.generators().len() {
            let mut images = Vec::with_capacity(size);
            let mut offset = 0;
            for p in parts {
                images.extend(p.gen_actions[j].images().iter().map(|&x| x + offset));
                offset += p.size;
            }
            gen_actions.push(Permutation::from_images(images)?);
        }
        GSet::new(group, size, gen_actions)
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn gen_actions(&self) -> &[Permutation] {
        &self.gen_actions
    }

    /// Action of the group element with the given index.
    pub fn action_of(&self, element: u32) -> &Permutation {
        &self.element_actions[element as usize]
    }

    /// Orbit partition, ordered by least point; each orbit sorted.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size];
        let mut orbits = Vec::new();
        for start in 0..self.size {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < orbit.len() {
                let x = orbit[head];
                head += 1;
                for a in &self.gen_actions {
                    let y = a.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        orbit.push(y);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        // Burnside cross-check: orbit count equals the multiplicity of the
        // trivial character in the permutation character.
        debug_assert_eq!(
            orbits.len() * self.group.order(),
            (0..self.group.order() as u32)
                .map(|e| self.element_actions[e as usize].fixed_points())
                .sum::<usize>()
        );
        orbits
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() == 1
    }

    pub fn stabilizer(&self, point: usize) -> Subgroup {
        self.group
            .subgroup_where(|g| self.element_actions[g as usize].apply(point) == point)
    }

    /// Kernel of the action.
    pub fn kernel(&self) -> Subgroup {
        self.group
            .subgroup_where(|g| self.element_actions[g as usize].is_identity())
    }

    pub fn is_faithful(&self) -> bool {
        self.kernel().order() == 1
    }

    /// Points fixed by the whole group.
    pub fn globally_fixed_points(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&p| self.gen_actions.iter().all(|a| a.apply(p) == p))
            .collect()
    }

    /// Removes one globally fixed point, relabeling the rest downward.
    pub fn without_point(&self, point: usize) -> Result<GSet> {
        if point >= self.size || self.gen_actions.iter().any(|a| a.apply(point) != point) {
            return validation("only a globally fixed point can be removed");
        }
        let relabel = |x: usize| if x > point { x - 1 } else { x };
        let gen_actions = self
            .gen_actions
            .iter()
            .map(|a| {
                let images = (0..self.size)
                    .filter(|&x| x != point)
                    .map(|x| relabel(a.apply(x)))
                    .collect();
                Permutation::from_images(images)
            })
            .collect::<Result<Vec<_>>>()?;
        GSet::new(self.group.clone(), self.size - 1, gen_actions)
    }

    /// Fixed-point counts per conjugacy class.
    pub fn fixed_point_character(&self) -> FixedPointCharacter {
        let table = self.group.conjugacy_classes();
        let counts = (0..table.count() as u32)
            .map(|c| self.element_actions[table.representative(c) as usize].fixed_points())
            .collect();
        FixedPointCharacter { counts }
    }

    /// The image group acting faithfully, together with the induced set.
    /// The kernel is divided out; the returned group has the set itself as
    /// its permutation domain.
    pub fn faithful_quotient(&self) -> Result<(Arc<Group>, GSet)> {
        let image = Arc::new(Group::from_generators_limited(
            self.size,
            self.gen_actions.clone(),
            *self.group.limits(),
        )?);
        let induced = GSet::new(image.clone(), self.size, self.gen_actions.clone())?;
        Ok((image, induced))
    }

    /// Multiset of stabilizer conjugacy-class ids, one per orbit, sorted.
    pub fn orbit_stabilizer_classes(&self) -> Result<Vec<u32>> {
        let lattice = self.group.subgroup_lattice()?;
        let mut out = Vec::new();
        for orbit in self.orbits() {
            let stab = self.stabilizer(orbit[0]);
            let class = lattice
                .class_of_set(stab.elements())
                .expect("stabilizer is a subgroup of the lattice");
            out.push(class);
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// Transitive coset action of a group on `G/H`. Points are right cosets,
/// ordered by least member; point 0 is `H` itself, so the stabilizer of the
/// base point is exactly `H`.
pub fn gset_from_subgroup(group: &Arc<Group>, h: &Subgroup) -> GSet {
    let n = group.order();
    let mut coset_id = vec![u32::MAX; n];
    let mut reps: Vec<u32> = Vec::new();
    for x in 0..n as u32 {
        if coset_id[x as usize] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        reps.push(x);
        for &hh in h.elements() {
            coset_id[group.mul(hh, x) as usize] = id;
        }
    }
    let size = reps.len();
    let gen_actions: Vec<Permutation> = group
        .generators()
        .iter()
        .map(|g| {
            let gi = group.index_of(g).expect("generator in group");
            let images = reps
                .iter()
                .map(|&r| coset_id[group.mul(r, gi) as usize] as usize)
                .collect();
            Permutation::from_images(images).expect("coset action is a bijection")
        })
        .collect();
    GSet::new(group.clone(), size, gen_actions).expect("coset action is an action")
}

/// Induction of an H-set to a G-set along a subgroup `H <= G`: the balanced
/// product `G x_H A`, of size `[G:H] · |A|`. The subgroup action is given as
/// a G-set over the subgroup realized as a group in its own right (same
/// degree, elements drawn from the parent).
pub fn induced_gset(group: &Arc<Group>, h: &Subgroup, set: &GSet) -> Result<GSet> {
    let hg = set.group();
    if hg.degree() != group.degree() || hg.order() != h.order() {
        return validation("the acting group does not realize the subgroup");
    }
    // Element correspondence is literal: the subgroup's elements are
    // permutations of the parent domain.
    let h_index = |g_elem: u32| -> Result<u32> {
        hg.index_of(group.element(g_elem)).ok_or_else(|| {
            Error::Validation("the acting group does not realize the subgroup".into())
        })
    };
    for &e in h.elements() {
        h_index(e)?;
    }
    // Transversal of right cosets Hx, by least member.
    let n = group.order();
    let mut coset_id = vec![u32::MAX; n];
    let mut reps: Vec<u32> = Vec::new();
    for x in 0..n as u32 {
        if coset_id[x as usize] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        reps.push(x);
        for &hh in h.elements() {
            coset_id[group.mul(hh, x) as usize] = id;
        }
    }
    let k = reps.len();
    let m = set.size();
    // Point (i, a) -> i * m + a. A generator g sends (i, a) to (j, a · h)
    // with H r_i g = H r_j and h = r_i g r_j^{-1} in H.
    let gen_actions = group
        .generators()
        .iter()
        .map(|g| {
            let gi = group.index_of(g).expect("generator in group");
            let mut images = Vec::with_capacity(k * m);
            for &r in &reps {
                let rg = group.mul(r, gi);
                let j = coset_id[rg as usize] as usize;
                let hh = group.mul(rg, group.inv(reps[j]));
                debug_assert!(h.contains(hh));
                let act = set.action_of(h_index(hh)?);
                for a in 0..m {
                    images.push(j * m + act.apply(a));
                }
            }
            Permutation::from_images(images)
        })
        .collect::<Result<Vec<_>>>()?;
    GSet::new(group.clone(), k * m, gen_actions)
}

/// Fixed-point counts of a G-set, indexed by the conjugacy class table order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedPointCharacter {
    counts: Vec<usize>,
}

impl FixedPointCharacter {
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn signed(&self) -> Vec<i64> {
        self.counts.iter().map(|&c| c as i64).collect()
    }
}

/// Fixed-point counts of the coset set `G/H`, computed from class
/// intersections: the number of fixed cosets of a class `T` is
/// `|T ∩ H| · |G| / (|T| · |H|)`.
pub fn coset_character(group: &Group, h: &Subgroup) -> Vec<usize> {
    let table = group.conjugacy_classes();
    let mut intersections = vec![0usize; table.count()];
    for &x in h.elements() {
        intersections[table.class_of(x) as usize] += 1;
    }
    (0..table.count())
        .map(|c| {
            let t = table.members(c as u32).len();
            let num = intersections[c] * group.order();
            debug_assert_eq!(num % (t * h.order()), 0);
            num / (t * h.order())
        })
        .collect()
}

/// True iff the two sets have equal fixed-point counts for every group
/// element, i.e. equal permutation characters. Requires both sets to share
/// the same group.
pub fn is_gassmann(a: &GSet, b: &GSet) -> Result<bool> {
    if !same_group(a.group(), b.group()) {
        return validation("Gassmann test across different groups");
    }
    Ok(a.fixed_point_character() == b.fixed_point_character())
}

/// True iff the orbits can be matched bijectively with conjugate stabilizers.
pub fn is_isomorphic(a: &GSet, b: &GSet) -> Result<bool> {
    if !same_group(a.group(), b.group()) {
        return validation("isomorphism test across different groups");
    }
    if a.size() != b.size() {
        return Ok(false);
    }
    let group = a.group();
    let stabs_a: Vec<Subgroup> = a.orbits().iter().map(|o| a.stabilizer(o[0])).collect();
    let mut stabs_b: Vec<Subgroup> = b.orbits().iter().map(|o| b.stabilizer(o[0])).collect();
    if stabs_a.len() != stabs_b.len() {
        return Ok(false);
    }
    // Conjugacy is an equivalence relation, so greedy matching is exact.
    for sa in &stabs_a {
        match stabs_b.iter().position(|sb| group.are_conjugate(sa, sb)) {
            Some(i) => {
                stabs_b.swap_remove(i);
            }
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// An integer combination of isomorphism classes of transitive G-sets,
/// keyed by subgroup conjugacy-class id. Zero coefficients are never stored.
///
/// No minimal presentation as a difference of two small G-sets is computed;
/// elements are always kept in canonical stabilizer-class form.
#[derive(Clone)]
pub struct BurnsideElement {
    group: Arc<Group>,
    coeffs: BTreeMap<u32, i64>,
}

impl std::fmt::Debug for BurnsideElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&k, &c) in &self.coeffs {
            if !first {
                write!(f, " ")?;
            }
            if c >= 0 && !first {
                write!(f, "+ ")?;
            } else if c < 0 {
                write!(f, "- ")?;
            }
            write!(f, "{}*[class {}]", c.abs(), k)?;
            first = false;
        }
        Ok(())
    }
}

impl PartialEq for BurnsideElement {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group) && self.coeffs == other.coeffs
    }
}
impl Eq for BurnsideElement {}

impl BurnsideElement {
    pub fn zero(group: Arc<Group>) -> BurnsideElement {
        BurnsideElement {
            group,
            coeffs: BTreeMap::new(),
        }
    }

    /// The class `[Spec k]` of the one-point set.
    pub fn one_point(group: Arc<Group>) -> Result<BurnsideElement> {
        let full = group.full_subgroup();
        let class = group.subgroup_class_of(&full)?;
        let mut coeffs = BTreeMap::new();
        coeffs.insert(class, 1);
        Ok(BurnsideElement { group, coeffs })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, i64> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The element is an actual G-set iff all coefficients are nonnegative.
    pub fn is_actual_set(&self) -> bool {
        self.coeffs.values().all(|&c| c >= 0)
    }

    pub fn add_class(&mut self, class: u32, c: i64) {
        let entry = self.coeffs.entry(class).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.coeffs.remove(&class);
        }
    }

    pub fn add_gset(&mut self, set: &GSet, sign: i64) -> Result<()> {
        if !same_group(&self.group, set.group()) {
            return validation("Burnside arithmetic across different groups");
        }
        for class in set.orbit_stabilizer_classes()? {
            self.add_class(class, sign);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &BurnsideElement) -> Result<BurnsideElement> {
        if !same_group(&self.group, &other.group) {
            return validation("Burnside arithmetic across different groups");
        }
        let mut out = self.clone();
        for (&k, &c) in &other.coeffs {
            out.add_class(k, c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &BurnsideElement) -> Result<BurnsideElement> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> BurnsideElement {
        BurnsideElement {
            group: self.group.clone(),
            coeffs: self.coeffs.iter().map(|(&k, &c)| (k, -c)).collect(),
        }
    }

    /// Size of the virtual set: sum of coefficients weighted by coset count.
    pub fn total_degree(&self) -> Result<i64> {
        let lattice = self.group.subgroup_lattice()?;
        Ok(self
            .coeffs
            .iter()
            .map(|(&k, &c)| c * (self.group.order() / lattice.representative(k).order()) as i64)
            .sum())
    }

    /// Signed number of virtual orbits: each transitive class counts once.
    pub fn virtual_orbit_count(&self) -> i64 {
        self.coeffs.values().sum()
    }

    /// A serializable description of the element: one term per stabilizer
    /// class with its subgroup order and coset size, plus the character.
    pub fn report(&self) -> Result<BurnsideReport> {
        let lattice = self.group.subgroup_lattice()?;
        let terms = self
            .coeffs
            .iter()
            .map(|(&k, &c)| {
                let h = lattice.representative(k);
                BurnsideTerm {
                    class: k,
                    subgroup_order: h.order(),
                    coset_size: self.group.order() / h.order(),
                    coefficient: c,
                }
            })
            .collect();
        Ok(BurnsideReport {
            zero: self.is_zero(),
            total_degree: self.total_degree()?,
            virtual_orbits: self.virtual_orbit_count(),
            mu: self.mu()?,
            terms,
        })
    }

    /// The virtual permutation character: signed fixed-point counts per
    /// conjugacy class. Additive in the element; on an actual set it equals
    /// the fixed-point character.
    pub fn mu(&self) -> Result<Vec<i64>> {
        let lattice = self.group.subgroup_lattice()?;
        let n_classes = self.group.conjugacy_classes().count();
        let mut out = vec![0i64; n_classes];
        for (&k, &c) in &self.coeffs {
            let chi = coset_character(&self.group, lattice.representative(k));
            for (o, &x) in out.iter_mut().zip(chi.iter()) {
                *o += c * x as i64;
            }
        }
        Ok(out)
    }
}

/// One term of a serialized Burnside element.
#[derive(Debug, Clone, Serialize)]
pub struct BurnsideTerm {
    pub class: u32,
    pub subgroup_order: usize,
    pub coset_size: usize,
    pub coefficient: i64,
}

/// Serializable description of a Burnside element.
#[derive(Debug, Clone, Serialize)]
pub struct BurnsideReport {
    pub zero: bool,
    pub total_degree: i64,
    pub virtual_orbits: i64,
    pub mu: Vec<i64>,
    pub terms: Vec<BurnsideTerm>,
}

/// Decomposes formal differences of G-sets into canonical sparse form over
/// stabilizer classes.
pub fn burnside_canonicalize(
    group: &Arc<Group>,
    pos: &[&GSet],
    neg: &[&GSet],
) -> Result<BurnsideElement> {
    let mut out = BurnsideElement::zero(group.clone());
    for set in pos {
        out.add_gset(set, 1)?;
    }
    for set in neg {
        out.add_gset(set, -1)?;
    }
    Ok(out)
}

/// A pair of Gassmann-equivalent G-sets found by the search, reported with
/// the shared character and the stabilizer-class multisets witnessing
/// non-isomorphism.
#[derive(Debug, Clone)]
pub struct GassmannPair {
    pub a: GSet,
    pub b: GSet,
    pub character: FixedPointCharacter,
    pub a_stabilizer_classes: Vec<u32>,
    pub b_stabilizer_classes: Vec<u32>,
    pub isomorphic: bool,
}

/// Exhaustive search for non-isomorphic Gassmann-equivalent pairs of G-sets
/// of size at most `max_degree`.
///
/// Pairs are reported up to isomorphism and swap, and modulo simultaneous
/// addition of identical orbits: common stabilizer classes are stripped
/// before canonicalization. With `transitive_only`, only coset sets are
/// considered.
pub fn gassmann_search(
    group: &Arc<Group>,
    max_degree: usize,
    transitive_only: bool,
) -> Result<Vec<GassmannPair>> {
    if max_degree > group.limits().max_search_degree {
        return resource(format!(
            "max_degree {max_degree} exceeds search cap {}",
            group.limits().max_search_degree
        ));
    }
    let lattice = group.subgroup_lattice()?;
    // Candidate stabilizer classes, with coset characters.
    struct Candidate {
        class: u32,
        index: usize,
        chi: Vec<usize>,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    for (k, class) in lattice.classes.iter().enumerate() {
        let index = group.order() / class.representative.order();
        if index <= max_degree {
            candidates.push(Candidate {
                class: k as u32,
                index,
                chi: coset_character(group, &class.representative),
            });
        }
    }

    let mut raw_pairs: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    if transitive_only {
        for i in 0..candidates.len() {
            for j in i + 1..candidates.len() {
                if candidates[i].chi == candidates[j].chi {
                    raw_pairs.push((vec![candidates[i].class], vec![candidates[j].class]));
                }
            }
        }
    } else {
        // Enumerate multisets of candidate classes with total degree bounded
        // by max_degree, bucketed by summed character.
        let mut buckets: HashMap<Vec<usize>, Vec<Vec<u32>>> = HashMap::new();
        let mut stack: Vec<u32> = Vec::new();
        let mut chi_acc = vec![0usize; group.conjugacy_classes().count()];
        let mut emitted = 0usize;
        fn rec(
            candidates: &[Candidate],
            from: usize,
            remaining: usize,
            stack: &mut Vec<u32>,
            chi_acc: &mut Vec<usize>,
            buckets: &mut HashMap<Vec<usize>, Vec<Vec<u32>>>,
            emitted: &mut usize,
        ) -> Result<()> {
            if !stack.is_empty() {
                *emitted += 1;
                if *emitted > 2_000_000 {
                    return resource("Gassmann search multiset enumeration exceeds cap");
                }
                buckets
                    .entry(chi_acc.clone())
                    .or_default()
                    .push(stack.clone());
            }
            for (i, cand) in candidates.iter().enumerate().skip(from) {
                if cand.index > remaining {
                    continue;
                }
                stack.push(cand.class);
                for (acc, &x) in chi_acc.iter_mut().zip(cand.chi.iter()) {
                    *acc += x;
                }
                rec(
                    candidates,
                    i,
                    remaining - cand.index,
                    stack,
                    chi_acc,
                    buckets,
                    emitted,
                )?;
                stack.pop();
                for (acc, &x) in chi_acc.iter_mut().zip(cand.chi.iter()) {
                    *acc -= x;
                }
            }
            Ok(())
        }
        rec(
            &candidates,
            0,
            max_degree,
            &mut stack,
            &mut chi_acc,
            &mut buckets,
            &mut emitted,
        )?;

        let mut seen: BTreeMap<(Vec<u32>, Vec<u32>), ()> = BTreeMap::new();
        for multisets in buckets.values() {
            for i in 0..multisets.len() {
                for j in i + 1..multisets.len() {
                    if let Some(pair) = strip_common(&multisets[i], &multisets[j]) {
                        seen.entry(pair).or_insert(());
                    }
                }
            }
        }
        raw_pairs.extend(seen.into_keys());
    }

    raw_pairs.sort();
    raw_pairs.dedup();
    let mut out = Vec::new();
    for (ka, kb) in raw_pairs {
        let build = |classes: &[u32]| -> Result<GSet> {
            let parts: Vec<GSet> = classes
                .iter()
                .map(|&k| gset_from_subgroup(group, lattice.representative(k)))
                .collect();
            GSet::disjoint_union(&parts)
        };
        let a = build(&ka)?;
        let b = build(&kb)?;
        debug_assert!(is_gassmann(&a, &b)?);
        debug_assert!(!is_isomorphic(&a, &b)?);
        out.push(GassmannPair {
            character: a.fixed_point_character(),
            a,
            b,
            a_stabilizer_classes: ka,
            b_stabilizer_classes: kb,
            isomorphic: false,
        });
    }
    Ok(out)
}

/// Survey entry for one subgroup class of the ambient symmetric group that
/// carries Gassmann pairs.
#[derive(Debug)]
pub struct SurveyEntry {
    pub group_order: usize,
    pub pairs: Vec<GassmannPair>,
}

/// Result of scanning the subgroup classes of a symmetric group for
/// Gassmann pairs.
#[derive(Debug)]
pub struct SurveyReport {
    pub degree: usize,
    pub transitive_only: bool,
    pub max_degree: usize,
    pub classes_scanned: usize,
    pub total_pairs: usize,
    pub entries: Vec<SurveyEntry>,
}

/// Scans every subgroup class of `Sym(degree)` (only the transitive ones
/// when `transitive_only`) for non-isomorphic Gassmann-equivalent pairs of
/// G-sets of size up to `max_degree`; with `transitive_only`, the search in
/// each group is also restricted to transitive sets.
pub fn gassmann_survey(
    degree: usize,
    transitive_only: bool,
    max_degree: usize,
) -> Result<SurveyReport> {
    let mut tr: Vec<usize> = (0..degree).collect();
    if degree >= 2 {
        tr.swap(0, 1);
    }
    let cyc: Vec<usize> = (0..degree).map(|i| (i + 1) % degree.max(1)).collect();
    let sym = Arc::new(Group::from_generators(
        degree,
        vec![
            Permutation::from_images(tr)?,
            Permutation::from_images(cyc)?,
        ],
    )?);
    let mut classes_scanned = 0;
    let mut total_pairs = 0;
    let mut entries = Vec::new();
    for class in &sym.subgroup_lattice()?.classes {
        if transitive_only && !class.representative.is_transitive_in(&sym) {
            continue;
        }
        classes_scanned += 1;
        let g = Arc::new(sym.subgroup_as_group(&class.representative)?);
        let pairs = gassmann_search(&g, max_degree, transitive_only)?;
        total_pairs += pairs.len();
        if !pairs.is_empty() {
            entries.push(SurveyEntry {
                group_order: g.order(),
                pairs,
            });
        }
    }
    Ok(SurveyReport {
        degree,
        transitive_only,
        max_degree,
        classes_scanned,
        total_pairs,
        entries,
    })
}

/// Removes the common part of two stabilizer-class multisets; returns the
/// canonically ordered pair, or None if they strip to equality.
fn strip_common(a: &[u32], b: &[u32]) -> Option<(Vec<u32>, Vec<u32>)> {
    let mut counts: BTreeMap<u32, i64> = BTreeMap::new();
    for &x in a {
        *counts.entry(x).or_insert(0) += 1;
    }
    for &x in b {
        *counts.entry(x).or_insert(0) -= 1;
    }
    let mut ra = Vec::new();
    let mut rb = Vec::new();
    for (&k, &c) in &counts {
        for _ in 0..c.max(0) {
            ra.push(k);
        }
        for _ in 0..(-c).max(0) {
            rb.push(k);
        }
    }
    if ra.is_empty() && rb.is_empty() {
        return None;
    }
    debug_assert!(!ra.is_empty() && !rb.is_empty());
    if ra <= rb {
        Some((ra, rb))
    } else {
        Some((rb, ra))
    }
}

/// Serialized form of a G-set bound to an ambient group.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GSetSpec {
    pub size: usize,
    pub action: Vec<Permutation>,
}

impl GSetSpec {
    pub fn of(set: &GSet) -> GSetSpec {
        GSetSpec {
            size: set.size(),
            action: set.gen_actions().to_vec(),
        }
    }

    pub fn bind(self, group: &Arc<Group>) -> Result<GSet> {
        GSet::new(group.clone(), self.size, self.action)
    }
}

/// Standalone serialized G-set carrying its own group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GSetFile {
    pub group: GroupSpec,
    pub size: usize,
    pub action: Vec<Permutation>,
}

impl GSetFile {
    pub fn of(set: &GSet) -> GSetFile {
        GSetFile {
            group: GroupSpec::of(set.group()),
            size: set.size(),
            action: set.gen_actions().to_vec(),
        }
    }

    pub fn build(self) -> Result<(Arc<Group>, GSet)> {
        let group = Arc::new(self.group.build()?);
        let set = GSet::new(group.clone(), self.size, self.action)?;
        Ok((group, set))
    }

    pub fn build_limited(self, limits: crate::permgrp::Limits) -> Result<(Arc<Group>, GSet)> {
        let group = Arc::new(self.group.build_limited(limits)?);
        let set = GSet::new(group.clone(), self.size, self.action)?;
        Ok((group, set))
    }

    pub fn build_into(self, group: &Arc<Group>) -> Result<GSet> {
        let own = self.group.build()?;
        if !(own == **group) {
            return validation("G-set group does not match the ambient group");
        }
        GSet::new(group.clone(), self.size, self.action)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgrp::Limits;

    fn klein_four() -> Arc<Group> {
        let a = Permutation::from_images(vec![1, 0, 2, 3]).unwrap();
        let b = Permutation::from_images(vec![0, 1, 3, 2]).unwrap();
        Arc::new(Group::from_generators(4, vec![a, b]).unwrap())
    }

    fn psl_3_2() -> Arc<Group> {
        let seven = Permutation::from_images(vec![1, 2, 3, 4, 5, 6, 0]).unwrap();
        let invol = Permutation::from_images(vec![0, 2, 1, 6, 4, 5, 3]).unwrap();
        Arc::new(Group::from_generators(7, vec![seven, invol]).unwrap())
    }

    fn cyclic(n: usize) -> Arc<Group> {
        let c = Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap();
        Arc::new(Group::from_generators(n, vec![c]).unwrap())
    }

    /// Klein-four subgroup classes come out sorted by (order, elements):
    /// class 0 = trivial, classes 1..=3 = the three order-2 subgroups,
    /// class 4 = the whole group.
    fn klein_sets(g: &Arc<Group>) -> (GSet, GSet) {
        let subs = g.subgroups_up_to_conjugacy().unwrap();
        let a = GSet::disjoint_union(&[
            gset_from_subgroup(g, &subs[1]),
            gset_from_subgroup(g, &subs[2]),
            gset_from_subgroup(g, &subs[3]),
        ])
        .unwrap();
        let b = GSet::disjoint_union(&[
            gset_from_subgroup(g, &subs[0]),
            gset_from_subgroup(g, &subs[4]),
            gset_from_subgroup(g, &subs[4]),
        ])
        .unwrap();
        (a, b)
    }

    #[test]
    fn coset_set_of_whole_group_is_a_point() {
        let g = klein_four();
        let set = gset_from_subgroup(&g, &g.full_subgroup());
        assert_eq!(set.size(), 1);
        assert!(set.is_transitive());
    }

    #[test]
    fn coset_set_base_stabilizer_is_the_subgroup() {
        let g = klein_four();
        for h in g.subgroups_up_to_conjugacy().unwrap() {
            let set = gset_from_subgroup(&g, &h);
            assert_eq!(set.size(), h.index_in(&g));
            assert!(set.is_transitive());
            assert_eq!(set.stabilizer(0), h);
        }
    }

    #[test]
    fn fano_point_action_has_size_seven() {
        let g = psl_3_2();
        let lattice = g.subgroup_lattice().unwrap();
        let points = GSet::natural(g.clone());
        assert!(points.is_transitive());
        let stab = points.stabilizer(0);
        assert_eq!(stab.order(), 24);
        assert!(lattice.class_of_set(stab.elements()).is_some());
    }

    #[test]
    fn orbit_shapes_of_the_klein_pair() {
        let g = klein_four();
        let (a, b) = klein_sets(&g);
        let sizes = |s: &GSet| {
            let mut v: Vec<usize> = s.orbits().iter().map(|o| o.len()).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(sizes(&a), vec![2, 2, 2]);
        assert_eq!(sizes(&b), vec![1, 1, 4]);
    }

    #[test]
    fn trivial_action_has_all_orbits_singletons() {
        let g = klein_four();
        let t = GSet::trivial(g, 3);
        assert_eq!(t.orbits().len(), 3);
    }

    #[test]
    fn regular_set_of_z2_has_character_2_0() {
        let g = cyclic(2);
        let reg = gset_from_subgroup(&g, &g.trivial_subgroup());
        assert_eq!(reg.fixed_point_character().counts(), &[2, 0]);
    }

    /// Brute-force oracle: count fixed points of every element directly on
    /// the union action, independent of the class machinery.
    #[test]
    fn klein_pair_characters_match_brute_force() {
        let g = klein_four();
        let (a, b) = klein_sets(&g);
        for set in [&a, &b] {
            let table = g.conjugacy_classes();
            let chi = set.fixed_point_character();
            for c in 0..table.count() as u32 {
                for &e in table.members(c) {
                    assert_eq!(
                        set.action_of(e).fixed_points(),
                        chi.counts()[c as usize],
                        "character constant on classes"
                    );
                }
            }
        }
        assert_eq!(a.fixed_point_character().counts(), &[6, 2, 2, 2]);
        assert_eq!(a.fixed_point_character(), b.fixed_point_character());
    }

    #[test]
    fn klein_pair_is_gassmann_not_isomorphic() {
        let g = klein_four();
        let (a, b) = klein_sets(&g);
        assert!(is_gassmann(&a, &b).unwrap());
        assert!(!is_isomorphic(&a, &b).unwrap());
        assert!(is_gassmann(&a, &a).unwrap());
        assert!(is_isomorphic(&a, &a).unwrap());
    }

    #[test]
    fn gassmann_across_groups_is_an_error() {
        let g = klein_four();
        let h = cyclic(2);
        let a = GSet::trivial(g, 2);
        let b = GSet::trivial(h, 2);
        assert!(matches!(is_gassmann(&a, &b), Err(Error::Validation(_))));
    }

    #[test]
    fn fano_points_vs_lines() {
        let g = psl_3_2();
        let lattice = g.subgroup_lattice().unwrap();
        let index7: Vec<_> = (0..lattice.class_count() as u32)
            .filter(|&k| lattice.representative(k).order() == 24)
            .collect();
        assert_eq!(index7.len(), 2);
        let points = gset_from_subgroup(&g, lattice.representative(index7[0]));
        let lines = gset_from_subgroup(&g, lattice.representative(index7[1]));
        assert!(is_gassmann(&points, &lines).unwrap());
        assert!(!is_isomorphic(&points, &lines).unwrap());
        let trivial7 = GSet::trivial(g.clone(), 7);
        assert!(!is_gassmann(&points, &trivial7).unwrap());
    }

    #[test]
    fn faithful_quotient_of_faithful_action_keeps_order() {
        let g = psl_3_2();
        let points = GSet::natural(g.clone());
        let (image, induced) = points.faithful_quotient().unwrap();
        assert_eq!(image.order(), g.order());
        assert_eq!(induced.size(), 7);
    }

    #[test]
    fn faithful_quotient_of_trivial_action_is_trivial_group() {
        let g = klein_four();
        let t = GSet::trivial(g, 3);
        let (image, _) = t.faithful_quotient().unwrap();
        assert_eq!(image.order(), 1);
    }

    #[test]
    fn faithful_quotient_divides_out_the_kernel() {
        let g = klein_four();
        let subs = g.subgroups_up_to_conjugacy().unwrap();
        let set = gset_from_subgroup(&g, &subs[1]);
        assert_eq!(set.kernel().elements(), subs[1].elements());
        let (image, _) = set.faithful_quotient().unwrap();
        assert_eq!(image.order(), 2);
    }

    #[test]
    fn burnside_cancellation_and_degree() {
        let g = klein_four();
        let (a, b) = klein_sets(&g);
        let zero = burnside_canonicalize(&g, &[&a], &[&a]).unwrap();
        assert!(zero.is_zero());
        let e = burnside_canonicalize(&g, &[&a], &[&b]).unwrap();
        assert!(!e.is_zero());
        // Five distinct transitive classes carry nonzero coefficients, six
        // orbit terms counted with multiplicity; total degree cancels.
        assert_eq!(e.coefficients().len(), 5);
        let term_count: i64 = e.coefficients().values().map(|c| c.abs()).sum();
        assert_eq!(term_count, 6);
        assert_eq!(e.total_degree().unwrap(), 0);
    }

    #[test]
    fn mu_of_the_klein_pair_difference_is_zero() {
        let g = klein_four();
        let (a, b) = klein_sets(&g);
        let e = burnside_canonicalize(&g, &[&a], &[&b]).unwrap();
        assert_eq!(e.mu().unwrap(), vec![0, 0, 0, 0]);
        assert!(!e.is_zero());
    }

    #[test]
    fn mu_is_additive_and_counts_points_at_identity() {
        let g = klein_four();
        let (a, b) = klein_sets(&g);
        let ea = burnside_canonicalize(&g, &[&a], &[]).unwrap();
        let eb = burnside_canonicalize(&g, &[&b], &[]).unwrap();
        let sum = ea.checked_add(&eb).unwrap();
        let mu_sum: Vec<i64> = ea
            .mu()
            .unwrap()
            .iter()
            .zip(eb.mu().unwrap())
            .map(|(x, y)| x + y)
            .collect();
        assert_eq!(sum.mu().unwrap(), mu_sum);
        assert_eq!(ea.mu().unwrap()[0], a.size() as i64);
        assert_eq!(ea.mu().unwrap(), a.fixed_point_character().signed());
    }

    /// Rank bookkeeping for a split degree-6 model: 2 + 3 - 1 = 4.
    #[test]
    fn mu_of_z2_plus_z3_minus_point_over_trivial_group() {
        let g = Arc::new(Group::trivial(1));
        let z2 = GSet::trivial(g.clone(), 2);
        let z3 = GSet::trivial(g.clone(), 3);
        let pt = GSet::point(g.clone());
        let e = burnside_canonicalize(&g, &[&z2, &z3], &[&pt]).unwrap();
        assert_eq!(e.mu().unwrap(), vec![4]);
        assert_eq!(e.virtual_orbit_count(), 4);
    }

    #[test]
    fn search_on_cyclic_groups_is_empty() {
        for n in [1, 2, 3, 4, 6, 8, 12] {
            let g = cyclic(n);
            assert!(gassmann_search(&g, 12.min(n + 4), false)
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn search_finds_exactly_the_klein_pair() {
        let g = klein_four();
        let pairs = gassmann_search(&g, 6, false).unwrap();
        assert_eq!(pairs.len(), 1);
        let p = &pairs[0];
        let mut sa: Vec<usize> = p.a.orbits().iter().map(|o| o.len()).collect();
        let mut sb: Vec<usize> = p.b.orbits().iter().map(|o| o.len()).collect();
        sa.sort_unstable();
        sb.sort_unstable();
        let mut shapes = [sa, sb];
        shapes.sort();
        assert_eq!(shapes, [vec![1, 1, 4], vec![2, 2, 2]]);
        assert!(is_gassmann(&p.a, &p.b).unwrap());
        assert!(!is_isomorphic(&p.a, &p.b).unwrap());
    }

    #[test]
    fn search_on_fano_group_finds_points_vs_lines() {
        let g = psl_3_2();
        let pairs = gassmann_search(&g, 7, true).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].a.size(), 7);
        assert!(pairs[0].a.is_transitive());
        assert!(pairs[0].b.is_transitive());
    }

    #[test]
    fn search_degree_cap_is_enforced() {
        let g = klein_four();
        assert!(matches!(
            gassmann_search(&g, 40, false),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn gassmann_implies_equal_orbit_counts() {
        let g = klein_four();
        let (a, b) = klein_sets(&g);
        assert!(is_gassmann(&a, &b).unwrap());
        assert_eq!(a.orbits().len(), b.orbits().len());
    }

    #[test]
    fn normal_stabilizer_transitive_gassmann_implies_isomorphic() {
        // In an abelian group every subgroup is normal: any two Gassmann
        // equivalent transitive sets must be isomorphic, i.e. no transitive
        // pairs exist at all.
        let g = klein_four();
        assert!(gassmann_search(&g, 12, true).unwrap().is_empty());
    }

    #[test]
    fn gset_rejects_inconsistent_action() {
        // On the cyclic group of order 4, sending the generator to a
        // transposition does not respect the relation g^4 = e at... it does
        // (order 2 divides 4). Sending it to a 3-cycle on 3 points does not.
        let g = cyclic(4);
        let bad = GSet::new(g, 3, vec![Permutation::from_images(vec![1, 2, 0]).unwrap()]);
        assert!(matches!(bad, Err(Error::Validation(_))));
    }

    #[test]
    fn gset_spec_round_trip() {
        let g = klein_four();
        let (a, _) = klein_sets(&g);
        let spec = GSetSpec::of(&a);
        let text = serde_json::to_string(&spec).unwrap();
        let back: GSetSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.bind(&g).unwrap(), a);
    }

    /// Induction smoke tests: the induced trivial point is the coset set,
    /// and the induced regular set is the regular set.
    #[test]
    fn induction_from_a_subgroup() {
        let g = klein_four();
        let subs = g.subgroups_up_to_conjugacy().unwrap();
        let h = &subs[1];
        let hg = Arc::new(g.subgroup_as_group(h).unwrap());
        let point = GSet::point(hg.clone());
        let induced = induced_gset(&g, h, &point).unwrap();
        assert!(is_isomorphic(&induced, &gset_from_subgroup(&g, h)).unwrap());

        let regular_h = gset_from_subgroup(&hg, &hg.trivial_subgroup());
        let induced_reg = induced_gset(&g, h, &regular_h).unwrap();
        let regular_g = gset_from_subgroup(&g, &g.trivial_subgroup());
        assert!(is_isomorphic(&induced_reg, &regular_g).unwrap());
    }

    /// Two routes to the coset character: the class-intersection formula
    /// used by the search, and direct fixed-point counting on the built
    /// coset action. Checked across all subgroup classes of a nonabelian
    /// group.
    #[test]
    fn coset_character_matches_direct_counting() {
        let s4 = {
            let a = Permutation::from_images(vec![1, 0, 2, 3]).unwrap();
            let b = Permutation::from_images(vec![1, 2, 3, 0]).unwrap();
            Arc::new(Group::from_generators(4, vec![a, b]).unwrap())
        };
        for h in s4.subgroups_up_to_conjugacy().unwrap() {
            let set = gset_from_subgroup(&s4, &h);
            assert_eq!(
                coset_character(&s4, &h),
                set.fixed_point_character().counts().to_vec(),
                "character routes disagree for a subgroup of order {}",
                h.order()
            );
        }
    }

    #[test]
    fn survey_of_sym4_is_empty() {
        let report = gassmann_survey(4, false, 4).unwrap();
        assert_eq!(report.classes_scanned, 11);
        assert_eq!(report.total_pairs, 0);
    }

    #[test]
    fn group_order_limit_propagates_to_quotient() {
        let g = Arc::new(
            Group::from_generators_limited(
                2,
                vec![Permutation::from_images(vec![1, 0]).unwrap()],
                Limits {
                    max_group_order: 2,
                    ..Limits::default()
                },
            )
            .unwrap(),
        );
        let set = GSet::natural(g);
        assert!(set.faithful_quotient().is_ok());
    }
}
