//! Finite permutation groups: element enumeration, conjugacy classes and
//! subgroups up to conjugacy.
//!
//! Composition convention, fixed here once for the whole crate: products are
//! read left to right, `(p * q)(x) = q(p(x))`, exposed as [`Permutation::then`].
//! The conjugate of `h` by `g` is `g^-1 h g` in that convention.
//! Points are 0-based.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{resource, validation, Error, Result};

/// A permutation of `{0, …, n-1}`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from an image array, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return validation(format!("image array {images:?} is not a bijection"));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    /// Apply `self`, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i == x)
            .count()
    }

    /// Multiplicative order.
    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.then(self);
            k += 1;
        }
        k
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.images.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(d)?;
        Permutation::from_images(images).map_err(serde::de::Error::custom)
    }
}

/// Caps for the enumerative machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Upper bound on group order at closure time.
    pub max_group_order: usize,
    /// Upper bound on the total number of subgroups during lattice enumeration.
    pub max_subgroups: usize,
    /// Upper bound on the `max_degree` argument of the Gassmann search.
    pub max_search_degree: usize,
}

impl Default for Limits {
    fn default() -> Self {
        // 10080 covers Sym(7) = 5040 and PSL(3,2) = 168 with slack.
        Limits {
            max_group_order: 10080,
            max_subgroups: 40_000,
            max_search_degree: 12,
        }
    }
}

/// A finite permutation group, materialized as its full element list.
///
/// Elements are stored in lexicographic order of their image arrays; index 0
/// is always the identity. All downstream determinism (conjugacy class order,
/// subgroup class order, coset point order) flows from this canonical order.
pub struct Group {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, u32>,
    inverses: Vec<u32>,
    /// For each element (except the identity): `(parent, gen)` with
    /// `element = parent.then(generators[gen])`. Identity stores `(0, usize::MAX)`.
    words: Vec<(u32, u32)>,
    /// Element indices in an order where each parent precedes its children.
    eval_order: Vec<u32>,
    limits: Limits,
    classes: OnceLock<ConjugacyClassTable>,
    lattice: OnceLock<Result<SubgroupLattice>>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .finish()
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}
impl Eq for Group {}

impl Group {
    pub fn from_generators(degree: usize, generators: Vec<Permutation>) -> Result<Group> {
        Group::from_generators_limited(degree, generators, Limits::default())
    }

    pub fn trivial(degree: usize) -> Group {
        Group::from_generators(degree, vec![]).expect("trivial group")
    }

    pub fn from_generators_limited(
        degree: usize,
        generators: Vec<Permutation>,
        limits: Limits,
    ) -> Result<Group> {
        for g in &generators {
            if g.degree() != degree {
                return validation(format!(
                    "generator degree {} does not match group degree {degree}",
                    g.degree()
                ));
            }
        }
        // BFS closure from the identity along right multiplication.
        let id = Permutation::identity(degree);
        let mut discovered: Vec<Permutation> = vec![id.clone()];
        let mut parent: Vec<(u32, u32)> = vec![(0, usize::MAX as u32)];
        let mut seen: HashMap<Permutation, u32> = HashMap::new();
        seen.insert(id, 0);
        let mut head = 0usize;
        while head < discovered.len() {
            let cur = discovered[head].clone();
            for (j, g) in generators.iter().enumerate() {
                let next = cur.then(g);
                if !seen.contains_key(&next) {
                    if discovered.len() >= limits.max_group_order {
                        return resource(format!(
                            "group order exceeds bound {}",
                            limits.max_group_order
                        ));
                    }
                    seen.insert(next.clone(), discovered.len() as u32);
                    parent.push((head as u32, j as u32));
                    discovered.push(next);
                }
            }
            head += 1;
        }

        // Re-index into canonical lexicographic order.
        let mut order_ix: Vec<u32> = (0..discovered.len() as u32).collect();
        order_ix.sort_by(|&a, &b| discovered[a as usize].cmp(&discovered[b as usize]));
        let mut new_of_old = vec![0u32; discovered.len()];
        for (new, &old) in order_ix.iter().enumerate() {
            new_of_old[old as usize] = new as u32;
        }
        let elements: Vec<Permutation> = order_ix
            .iter()
            .map(|&old| discovered[old as usize].clone())
            .collect();
        let mut words = vec![(0u32, usize::MAX as u32); elements.len()];
        for (old, &(p, j)) in parent.iter().enumerate() {
            if j != usize::MAX as u32 {
                words[new_of_old[old] as usize] = (new_of_old[p as usize], j);
            }
        }
        let eval_order: Vec<u32> = (0..discovered.len() as u32)
            .map(|old| new_of_old[old as usize])
            .collect();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, p) in elements.iter().enumerate() {
            index.insert(p.clone(), i as u32);
        }
        let inverses = elements.iter().map(|p| index[&p.inverse()]).collect();
        Ok(Group {
            degree,
            generators,
            elements,
            index,
            inverses,
            words,
            eval_order,
            limits,
            classes: OnceLock::new(),
            lattice: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn element(&self, i: u32) -> &Permutation {
        &self.elements[i as usize]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<u32> {
        self.index.get(p).copied()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let p = self.elements[a as usize].then(&self.elements[b as usize]);
        self.index[&p]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    /// `g^-1 a g`.
    pub fn conj(&self, a: u32, g: u32) -> u32 {
        self.mul(self.mul(self.inv(g), a), g)
    }

    pub fn is_abelian(&self) -> bool {
        let gens: Vec<u32> = self.generators.iter().map(|g| self.index[g]).collect();
        gens.iter()
            .all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        self.elements.iter().any(|p| p.order() == self.order())
    }

    /// Evaluates `f` over the generator word of element `i`, in application
    /// order. Used to extend a generator-level action to the whole group.
    pub(crate) fn eval_order(&self) -> &[u32] {
        &self.eval_order
    }

    pub(crate) fn word_edge(&self, i: u32) -> (u32, u32) {
        self.words[i as usize]
    }

    pub fn conjugacy_classes(&self) -> &ConjugacyClassTable {
        self.classes.get_or_init(|| self.compute_classes())
    }

    fn compute_classes(&self) -> ConjugacyClassTable {
        let n = self.order();
        // Conjugation by each generator, as a map on element indices.
        let gen_conj: Vec<Vec<u32>> = self
            .generators
            .iter()
            .map(|g| {
                let gi = self.index[g];
                (0..n as u32).map(|x| self.conj(x, gi)).collect()
            })
            .collect();
        let mut class_of = vec![u32::MAX; n];
        let mut classes: Vec<Vec<u32>> = Vec::new();
        for start in 0..n as u32 {
            if class_of[start as usize] != u32::MAX {
                continue;
            }
            let id = classes.len() as u32;
            let mut members = vec![start];
            class_of[start as usize] = id;
            let mut head = 0;
            while head < members.len() {
                let x = members[head];
                head += 1;
                for conj in &gen_conj {
                    let y = conj[x as usize];
                    if class_of[y as usize] == u32::MAX {
                        class_of[y as usize] = id;
                        members.push(y);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        let reps = classes.iter().map(|c| c[0]).collect();
        ConjugacyClassTable {
            class_of,
            classes,
            reps,
        }
    }

    /// One representative per conjugacy class of subgroups, sorted by
    /// (order, element list). See [`SubgroupLattice`] for the full map.
    pub fn subgroups_up_to_conjugacy(&self) -> Result<Vec<Subgroup>> {
        Ok(self
            .subgroup_lattice()?
            .classes
            .iter()
            .map(|c| c.representative.clone())
            .collect())
    }

    pub fn subgroup_lattice(&self) -> Result<&SubgroupLattice> {
        self.lattice
            .get_or_init(|| self.compute_lattice())
            .as_ref()
            .map_err(Error::clone)
    }

    /// Layered closure enumeration:
    /// seed with all cyclic subgroups, then repeatedly extend each class
    /// representative by a double-coset representative and close. Dedupe is
    /// by element set across the whole conjugation orbit of every discovered
    /// subgroup, so each class is extended exactly once.
    fn compute_lattice(&self) -> Result<SubgroupLattice> {
        let n = self.order();
        let gen_ix: Vec<u32> = self.generators.iter().map(|g| self.index[g]).collect();
        let gen_conj: Vec<Vec<u32>> = gen_ix
            .iter()
            .map(|&gi| (0..n as u32).map(|x| self.conj(x, gi)).collect())
            .collect();

        struct Pending {
            elements: Vec<u32>,
            gens: Vec<u32>,
        }
        let mut member_class: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut pending: Vec<Pending> = Vec::new();
        let mut total_subgroups = 0usize;

        let mut register = |elements: Vec<u32>,
                            gens: Vec<u32>,
                            member_class: &mut HashMap<Vec<u32>, u32>,
                            pending: &mut Vec<Pending>|
         -> Result<()> {
            if member_class.contains_key(&elements) {
                return Ok(());
            }
            let id = pending.len() as u32;
            // Conjugation orbit of the subgroup under the group generators.
            let mut orbit: Vec<(Vec<u32>, u32)> = vec![(elements.clone(), 0)];
            member_class.insert(elements.clone(), id);
            let mut head = 0;
            while head < orbit.len() {
                let (set, conjor) = orbit[head].clone();
                head += 1;
                for (j, conj) in gen_conj.iter().enumerate() {
                    let mut image: Vec<u32> = set.iter().map(|&x| conj[x as usize]).collect();
                    image.sort_unstable();
                    if !member_class.contains_key(&image) {
                        member_class.insert(image.clone(), id);
                        orbit.push((image, self.mul(conjor, gen_ix[j])));
                    }
                }
            }
            total_subgroups += orbit.len();
            if total_subgroups > self.limits.max_subgroups {
                return resource(format!(
                    "subgroup count exceeds cap {}",
                    self.limits.max_subgroups
                ));
            }
            // Canonical representative: lexicographically least element set
            // in the orbit; its generators are the conjugated seed generators.
            let (rep_set, rep_conjor) = orbit
                .iter()
                .min_by(|a, b| a.0.cmp(&b.0))
                .expect("orbit nonempty")
                .clone();
            let rep_gens: Vec<u32> = gens.iter().map(|&s| self.conj(s, rep_conjor)).collect();
            pending.push(Pending {
                elements: rep_set,
                gens: rep_gens,
            });
            Ok(())
        };

        register(vec![0], vec![], &mut member_class, &mut pending)?;
        for g in 1..n as u32 {
            let cyc = self.cyclic_set(g);
            register(cyc, vec![g], &mut member_class, &mut pending)?;
        }

        let mut next = 0usize;
        while next < pending.len() {
            let (h_elems, h_gens) = {
                let p = &pending[next];
                (p.elements.clone(), p.gens.clone())
            };
            next += 1;
            if h_elems.len() == n || h_elems.len() == 1 {
                // The whole group has no extensions; the trivial group's
                // extensions are exactly the cyclic seeds.
                continue;
            }
            let mut visited = vec![false; n];
            for &h in &h_elems {
                visited[h as usize] = true;
            }
            for g in 0..n as u32 {
                if visited[g as usize] {
                    continue;
                }
                // Mark the double coset H g H; any member generates the same
                // extension <H, g> as g itself.
                let left: Vec<u32> = h_elems.iter().map(|&h| self.mul(h, g)).collect();
                for &x in &left {
                    for &h2 in &h_elems {
                        visited[self.mul(x, h2) as usize] = true;
                    }
                }
                let mut gens = h_gens.clone();
                gens.push(g);
                let closure = self.closure_of(&gens);
                register(closure, gens, &mut member_class, &mut pending)?;
            }
        }

        // Canonical final order: by (order, representative element list).
        let mut order_ix: Vec<u32> = (0..pending.len() as u32).collect();
        order_ix.sort_by(|&a, &b| {
            let pa = &pending[a as usize];
            let pb = &pending[b as usize];
            (pa.elements.len(), &pa.elements).cmp(&(pb.elements.len(), &pb.elements))
        });
        let mut new_of_old = vec![0u32; pending.len()];
        for (new, &old) in order_ix.iter().enumerate() {
            new_of_old[old as usize] = new as u32;
        }
        let classes: Vec<SubgroupClass> = order_ix
            .iter()
            .map(|&old| {
                let p = &pending[old as usize];
                SubgroupClass {
                    representative: Subgroup {
                        elements: p.elements.clone(),
                        generators: p.gens.clone(),
                    },
                }
            })
            .collect();
        let mut member_class_final = HashMap::with_capacity(member_class.len());
        for (set, old) in member_class {
            member_class_final.insert(set, new_of_old[old as usize]);
        }
        Ok(SubgroupLattice {
            classes,
            member_class: member_class_final,
        })
    }

    fn cyclic_set(&self, g: u32) -> Vec<u32> {
        let mut set = vec![0u32];
        let mut cur = g;
        while cur != 0 {
            set.push(cur);
            cur = self.mul(cur, g);
        }
        set.sort_unstable();
        set
    }

    /// Subgroup generated by the given element indices.
    pub fn closure_of(&self, gens: &[u32]) -> Vec<u32> {
        let mut in_set = vec![false; self.order()];
        in_set[0] = true;
        let mut set = vec![0u32];
        let mut queue = VecDeque::from([0u32]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !in_set[y as usize] {
                    in_set[y as usize] = true;
                    set.push(y);
                    queue.push_back(y);
                }
            }
        }
        set.sort_unstable();
        set
    }

    /// Builds a subgroup from an element index set, validating closure,
    /// identity membership and Lagrange divisibility.
    pub fn subgroup_from_elements(&self, mut elements: Vec<u32>) -> Result<Subgroup> {
        elements.sort_unstable();
        elements.dedup();
        if elements.binary_search(&0).is_err() {
            return validation("subgroup does not contain the identity");
        }
        if elements.iter().any(|&x| x as usize >= self.order()) {
            return validation("subgroup element index out of range");
        }
        for &a in &elements {
            for &b in &elements {
                if elements.binary_search(&self.mul(a, b)).is_err() {
                    return validation("subgroup is not closed under composition");
                }
            }
            if elements.binary_search(&self.inv(a)).is_err() {
                return validation("subgroup is not closed under inverse");
            }
        }
        if !self.order().is_multiple_of(elements.len()) {
            return validation("subgroup order does not divide group order");
        }
        Ok(Subgroup {
            generators: self.small_generating_set(&elements),
            elements,
        })
    }

    /// Subgroup of all elements fixing each point of a set, given a predicate.
    pub(crate) fn subgroup_where(&self, mut pred: impl FnMut(u32) -> bool) -> Subgroup {
        let elements: Vec<u32> = (0..self.order() as u32).filter(|&x| pred(x)).collect();
        Subgroup {
            generators: self.small_generating_set(&elements),
            elements,
        }
    }

    fn small_generating_set(&self, elements: &[u32]) -> Vec<u32> {
        let mut gens: Vec<u32> = Vec::new();
        let mut have: Vec<u32> = vec![0];
        for &x in elements {
            if have.binary_search(&x).is_err() {
                gens.push(x);
                have = self.closure_of(&gens);
                if have.len() == elements.len() {
                    break;
                }
            }
        }
        gens
    }

    pub fn full_subgroup(&self) -> Subgroup {
        Subgroup {
            elements: (0..self.order() as u32).collect(),
            generators: self.generators.iter().map(|g| self.index[g]).collect(),
        }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup {
            elements: vec![0],
            generators: vec![],
        }
    }

    /// True iff `h` and `k` are conjugate subgroups.
    pub fn are_conjugate(&self, h: &Subgroup, k: &Subgroup) -> bool {
        if h.order() != k.order() {
            return false;
        }
        if h.elements == k.elements {
            return true;
        }
        (0..self.order() as u32).any(|g| {
            let mut image: Vec<u32> = h.elements.iter().map(|&x| self.conj(x, g)).collect();
            image.sort_unstable();
            image == k.elements
        })
    }

    /// Realizes a subgroup as a group in its own right, acting on the same
    /// points through its generators.
    pub fn subgroup_as_group(&self, sub: &Subgroup) -> Result<Group> {
        let gens = sub
            .generators()
            .iter()
            .map(|&i| self.elements[i as usize].clone())
            .collect();
        let g = Group::from_generators_limited(self.degree, gens, self.limits)?;
        debug_assert_eq!(g.order(), sub.order());
        Ok(g)
    }

    /// Conjugacy class id of a subgroup within the lattice.
    pub fn subgroup_class_of(&self, h: &Subgroup) -> Result<u32> {
        let lattice = self.subgroup_lattice()?;
        lattice
            .member_class
            .get(&h.elements)
            .copied()
            .ok_or_else(|| Error::Validation("subgroup not found in lattice".into()))
    }
}

/// Conjugacy classes of group elements, ordered by least member; class 0 is
/// always the singleton class of the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClassTable {
    class_of: Vec<u32>,
    classes: Vec<Vec<u32>>,
    reps: Vec<u32>,
}

impl ConjugacyClassTable {
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, element: u32) -> u32 {
        self.class_of[element as usize]
    }

    pub fn members(&self, class: u32) -> &[u32] {
        &self.classes[class as usize]
    }

    pub fn representative(&self, class: u32) -> u32 {
        self.reps[class as usize]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.len()).collect()
    }
}

/// A subgroup of a parent [`Group`], stored as a sorted element index set
/// plus a small generating set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subgroup {
    elements: Vec<u32>,
    generators: Vec<u32>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn contains(&self, element: u32) -> bool {
        self.elements.binary_search(&element).is_ok()
    }

    pub fn index_in(&self, group: &Group) -> usize {
        group.order() / self.order()
    }

    pub fn is_normal_in(&self, group: &Group) -> bool {
        group.generators().iter().all(|g| {
            let gi = group.index_of(g).expect("generator in group");
            self.elements
                .iter()
                .all(|&x| self.contains(group.conj(x, gi)))
        })
    }

    /// True iff the subgroup acts transitively on the parent's points.
    pub fn is_transitive_in(&self, group: &Group) -> bool {
        let n = group.degree();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            for &e in &self.generators {
                let y = group.element(e).apply(x);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }
}

/// One conjugacy class of subgroups.
#[derive(Debug, Clone)]
pub struct SubgroupClass {
    pub representative: Subgroup,
}

/// All subgroups of a group, organized by conjugacy class. `member_class`
/// maps every subgroup (as an element set) to its class id; class ids are
/// sorted by (order, representative element list).
pub struct SubgroupLattice {
    pub classes: Vec<SubgroupClass>,
    member_class: HashMap<Vec<u32>, u32>,
}

impl SubgroupLattice {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn subgroup_count(&self) -> usize {
        self.member_class.len()
    }

    pub fn representative(&self, class: u32) -> &Subgroup {
        &self.classes[class as usize].representative
    }

    pub fn class_of_set(&self, elements: &[u32]) -> Option<u32> {
        self.member_class.get(elements).copied()
    }
}

/// Serialized form of a group: degree plus generator image arrays.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupSpec {
    pub degree: usize,
    pub generators: Vec<Permutation>,
}

impl GroupSpec {
    pub fn of(group: &Group) -> GroupSpec {
        GroupSpec {
            degree: group.degree(),
            generators: group.generators().to_vec(),
        }
    }

    pub fn build(self) -> Result<Group> {
        Group::from_generators(self.degree, self.generators)
    }

    pub fn build_limited(self, limits: Limits) -> Result<Group> {
        Group::from_generators_limited(self.degree, self.generators, limits)
    }
}
