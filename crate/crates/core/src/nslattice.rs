//! Picard lattices of blow-ups of the plane and of the quadric, with exact
//! enumeration of rational-curve classes of given anticanonical degree and
//! of (-1)-classes.
//!
//! Coordinates on a blow-up lattice are `(a, b_1, …, b_r)` for the class
//! `a·H - Σ b_i·E_i`; on the quadric they are `(a, b)` in the two rulings.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};

/// The two lattice shapes in play. The quadric is always its own kind, never
/// a rank-2 blow-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PicardLattice {
    /// `Z·H ⊕ Z·E_1 ⊕ … ⊕ Z·E_r` with form `diag(1, -1, …, -1)`.
    BlowupP2 { r: usize },
    /// `Z^2` with the hyperbolic form `[[0,1],[1,0]]`.
    Quadric,
}

impl PicardLattice {
    pub fn blowup_p2(r: usize) -> Result<PicardLattice> {
        if r > 8 {
            return validation(format!("blow-up lattice needs r <= 8, got {r}"));
        }
        Ok(PicardLattice::BlowupP2 { r })
    }

    pub fn rank(&self) -> usize {
        match self {
            PicardLattice::BlowupP2 { r } => r + 1,
            PicardLattice::Quadric => 2,
        }
    }

    /// Self-intersection of the canonical class: `9 - r`, or 8 on the quadric.
    pub fn k_squared(&self) -> i64 {
        match self {
            PicardLattice::BlowupP2 { r } => 9 - *r as i64,
            PicardLattice::Quadric => 8,
        }
    }

    pub fn canonical_class(&self) -> DivisorClass {
        match self {
            PicardLattice::BlowupP2 { r } => {
                let mut coords = vec![-1i64; r + 1];
                coords[0] = -3;
                DivisorClass { coords }
            }
            PicardLattice::Quadric => DivisorClass {
                coords: vec![-2, -2],
            },
        }
    }

    pub fn intersection(&self, d: &DivisorClass, e: &DivisorClass) -> Result<i64> {
        if d.coords.len() != self.rank() || e.coords.len() != self.rank() {
            return validation(format!(
                "divisor rank mismatch: lattice rank {}, got {} and {}",
                self.rank(),
                d.coords.len(),
                e.coords.len()
            ));
        }
        Ok(match self {
            PicardLattice::BlowupP2 { .. } => {
                d.coords[0] * e.coords[0]
                    - d.coords[1..]
                        .iter()
                        .zip(&e.coords[1..])
                        .map(|(x, y)| x * y)
                        .sum::<i64>()
            }
            PicardLattice::Quadric => d.coords[0] * e.coords[1] + d.coords[1] * e.coords[0],
        })
    }

    /// Anticanonical degree `(-K)·D`.
    pub fn degree(&self, d: &DivisorClass) -> Result<i64> {
        let k = self.canonical_class();
        Ok(-self.intersection(&k, d)?)
    }
}

/// An integral divisor class in lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivisorClass {
    coords: Vec<i64>,
}

impl DivisorClass {
    pub fn new(coords: Vec<i64>) -> DivisorClass {
        DivisorClass { coords }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// Multiplicity `b_i` at the i-th blown-up point (1-based).
    pub fn multiplicity(&self, point: usize) -> i64 {
        self.coords[point]
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }
}

/// A canonically sorted list of classes of one anticanonical degree, each
/// satisfying `D² = j - 2` and `(-K)·D = j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassList {
    pub lattice: PicardLattice,
    pub j: i64,
    pub classes: Vec<DivisorClass>,
}

impl ClassList {
    fn checked(lattice: PicardLattice, j: i64, mut classes: Vec<DivisorClass>) -> ClassList {
        classes.sort();
        classes.dedup();
        for d in &classes {
            debug_assert_eq!(lattice.intersection(d, d).unwrap(), j - 2);
            debug_assert_eq!(lattice.degree(d).unwrap(), j);
        }
        ClassList {
            lattice,
            j,
            classes,
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn position(&self, d: &DivisorClass) -> Option<usize> {
        self.classes.binary_search(d).ok()
    }
}

/// All integer vectors `(b_1, …, b_len)` with `Σ b_i = sum` and
/// `Σ b_i² = sum_sq`, by exact recursive enumeration with Cauchy-Schwarz
/// pruning. Exhaustive: per-coordinate bounds are derived, not assumed.
fn solve_sum_sumsq(len: usize, sum: i64, sum_sq: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut acc = Vec::with_capacity(len);
    fn rec(acc: &mut Vec<i64>, left: usize, sum: i64, sum_sq: i64, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            if sum == 0 && sum_sq == 0 {
                out.push(acc.clone());
            }
            return;
        }
        if sum_sq < 0 || sum * sum > sum_sq * left as i64 {
            return;
        }
        let bound = (sum_sq as f64).sqrt() as i64 + 1;
        for b in -bound..=bound {
            if b * b > sum_sq {
                continue;
            }
            acc.push(b);
            rec(acc, left - 1, sum - b, sum_sq - b * b, out);
            acc.pop();
        }
    }
    rec(&mut acc, len, sum, sum_sq, &mut out);
    out
}

/// Solutions of `D² = j - 2`, `(-K)·D = j` on a blow-up lattice, scanning an
/// `a`-range that provably contains all solutions (Cauchy-Schwarz bound on
/// `Σ b_i` against `Σ b_i²`, widened by `widen` for oracle scans).
fn blowup_degree_solutions(r: usize, j: i64, widen: i64) -> Vec<DivisorClass> {
    let mut out = Vec::new();
    // For a solution, sum = 3a - j and sum_sq = a² - j + 2 ≥ 0 with
    // sum² ≤ r · sum_sq; both fail outside a bounded a-range.
    let lo = -(j.abs() + 12) - widen;
    let hi = j.abs() + 12 + widen;
    for a in lo..=hi {
        let sum = 3 * a - j;
        let sum_sq = a * a - j + 2;
        if sum_sq < 0 {
            continue;
        }
        if r == 0 {
            if sum == 0 && sum_sq == 0 {
                out.push(DivisorClass { coords: vec![a] });
            }
            continue;
        }
        if sum * sum > sum_sq * r as i64 {
            continue;
        }
        for b in solve_sum_sumsq(r, sum, sum_sq) {
            let mut coords = Vec::with_capacity(r + 1);
            coords.push(a);
            coords.extend(b);
            out.push(DivisorClass { coords });
        }
    }
    out
}

/// All classes of rational curves of anticanonical degree `j`.
///
/// On a blow-up lattice the range `1 ≤ j ≤ d-1` (with `d = K²`) is required:
/// inside it every numerical solution is a class of rational curves. On
/// the quadric `j` must be even and at least 2, and the solutions are the
/// pencil classes `(1, j/2 - 1)` and `(j/2 - 1, 1)`.
pub fn rational_degree_classes(lattice: &PicardLattice, j: i64) -> Result<ClassList> {
    match lattice {
        PicardLattice::BlowupP2 { r } => {
            let d = lattice.k_squared();
            if !(1 <= j && j < d) {
                return validation(format!("degree {j} outside 1..={} for r = {r}", d - 1));
            }
            Ok(ClassList::checked(
                *lattice,
                j,
                blowup_degree_solutions(*r, j, 0),
            ))
        }
        PicardLattice::Quadric => {
            if j < 2 || j % 2 != 0 {
                return validation(format!("quadric degrees are even and >= 2, got {j}"));
            }
            let mut classes = Vec::new();
            for a in 0..=j / 2 {
                let b = j / 2 - a;
                if 2 * a * b == j - 2 {
                    classes.push(DivisorClass { coords: vec![a, b] });
                }
            }
            Ok(ClassList::checked(*lattice, j, classes))
        }
    }
}

/// All (-1)-classes: `D² = -1`, `D·K = -1`. Blow-up lattices only.
pub fn neg_one_classes(lattice: &PicardLattice) -> Result<ClassList> {
    neg_one_classes_widened(lattice, 0)
}

/// Same enumeration with the `a`-scan range widened; used as a regression
/// oracle that a wider scan finds nothing new.
pub fn neg_one_classes_widened(lattice: &PicardLattice, widen: i64) -> Result<ClassList> {
    match lattice {
        PicardLattice::BlowupP2 { r } => Ok(ClassList::checked(
            *lattice,
            1,
            blowup_degree_solutions(*r, 1, widen),
        )),
        PicardLattice::Quadric => validation("(-1)-classes live on blow-up lattices"),
    }
}

/// `|D| -> |-K - D|`: the adjunction involution, swapping degrees j and d-j.
pub fn adjoint_dual(lattice: &PicardLattice, d: &DivisorClass) -> DivisorClass {
    lattice.canonical_class().neg().sub(d)
}

impl DivisorClass {
    fn neg(&self) -> DivisorClass {
        DivisorClass {
            coords: self.coords.iter().map(|x| -x).collect(),
        }
    }
}

/// Filters the classes passing through all the given blown-up points
/// (1-based indices), i.e. `b_i >= 1`, or `b_i == 1` when `multiplicity_exact`.
pub fn classes_through(
    list: &ClassList,
    points: &[usize],
    multiplicity_exact: bool,
) -> Result<ClassList> {
    let r = match list.lattice {
        PicardLattice::BlowupP2 { r } => r,
        PicardLattice::Quadric => return validation("point filters live on blow-up lattices"),
    };
    for &p in points {
        if p == 0 || p > r {
            return validation(format!("point index {p} outside 1..={r}"));
        }
    }
    let classes = list
        .classes
        .iter()
        .filter(|d| {
            points.iter().all(|&p| {
                let b = d.multiplicity(p);
                if multiplicity_exact {
                    b == 1
                } else {
                    b >= 1
                }
            })
        })
        .cloned()
        .collect();
    Ok(ClassList {
        lattice: list.lattice,
        j: list.j,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h_minus(r: usize, points: &[usize]) -> DivisorClass {
        let mut coords = vec![0i64; r + 1];
        coords[0] = 1;
        for &p in points {
            coords[p] = 1;
        }
        DivisorClass::new(coords)
    }

    #[test]
    fn form_on_blowup_basis_vectors() {
        let l = PicardLattice::blowup_p2(3).unwrap();
        let h = DivisorClass::new(vec![1, 0, 0, 0]);
        let e1 = DivisorClass::new(vec![0, -1, 0, 0]);
        let e2 = DivisorClass::new(vec![0, 0, -1, 0]);
        assert_eq!(l.intersection(&h, &h).unwrap(), 1);
        assert_eq!(l.intersection(&e1, &e1).unwrap(), -1);
        assert_eq!(l.intersection(&e1, &e2).unwrap(), 0);
        assert_eq!(l.intersection(&h, &e1).unwrap(), 0);
    }

    #[test]
    fn canonical_self_intersection() {
        for r in 0..=8 {
            let l = PicardLattice::blowup_p2(r).unwrap();
            let k = l.canonical_class();
            assert_eq!(l.intersection(&k, &k).unwrap(), 9 - r as i64);
        }
        let q = PicardLattice::Quadric;
        let k = q.canonical_class();
        assert_eq!(q.intersection(&k, &k).unwrap(), 8);
    }

    #[test]
    fn quadric_form_is_hyperbolic() {
        let q = PicardLattice::Quadric;
        let f1 = DivisorClass::new(vec![1, 0]);
        let f2 = DivisorClass::new(vec![0, 1]);
        assert_eq!(q.intersection(&f1, &f2).unwrap(), 1);
        assert_eq!(q.intersection(&f1, &f1).unwrap(), 0);
    }

    #[test]
    fn rank_mismatch_is_an_error() {
        let l = PicardLattice::blowup_p2(2).unwrap();
        let short = DivisorClass::new(vec![1, 0]);
        assert!(l.intersection(&short, &short).is_err());
    }

    #[test]
    fn conics_on_degree_six() {
        let l = PicardLattice::blowup_p2(3).unwrap();
        let list = rational_degree_classes(&l, 2).unwrap();
        let mut expected: Vec<DivisorClass> = (1..=3).map(|i| h_minus(3, &[i])).collect();
        expected.sort();
        assert_eq!(list.classes, expected);
    }

    #[test]
    fn cubics_on_degree_six() {
        let l = PicardLattice::blowup_p2(3).unwrap();
        let list = rational_degree_classes(&l, 3).unwrap();
        assert_eq!(list.len(), 2);
        assert!(list
            .position(&DivisorClass::new(vec![1, 0, 0, 0]))
            .is_some());
        assert!(list
            .position(&DivisorClass::new(vec![2, 1, 1, 1]))
            .is_some());
    }

    #[test]
    fn conics_on_degree_five_and_on_the_quadric() {
        let l = PicardLattice::blowup_p2(4).unwrap();
        assert_eq!(rational_degree_classes(&l, 2).unwrap().len(), 5);
        let q = PicardLattice::Quadric;
        let list = rational_degree_classes(&q, 2).unwrap();
        assert_eq!(
            list.classes,
            vec![DivisorClass::new(vec![0, 1]), DivisorClass::new(vec![1, 0])]
        );
        assert_eq!(rational_degree_classes(&q, 4).unwrap().len(), 1);
        assert_eq!(rational_degree_classes(&q, 6).unwrap().len(), 2);
    }

    #[test]
    fn degree_out_of_range_is_an_error() {
        let l = PicardLattice::blowup_p2(3).unwrap();
        assert!(rational_degree_classes(&l, 0).is_err());
        assert!(rational_degree_classes(&l, 6).is_err());
        assert!(rational_degree_classes(&PicardLattice::Quadric, 3).is_err());
    }

    #[test]
    fn neg_one_counts_up_to_six_points() {
        let expected = [0usize, 1, 3, 6, 10, 16, 27];
        for (r, &count) in expected.iter().enumerate() {
            let l = PicardLattice::blowup_p2(r).unwrap();
            assert_eq!(neg_one_classes(&l).unwrap().len(), count, "r = {r}");
        }
    }

    #[test]
    fn neg_one_families_for_r_le_6() {
        // E_i, H - E_i - E_j, and (r = 6 only) -K - H + E_i.
        let l = PicardLattice::blowup_p2(6).unwrap();
        let list = neg_one_classes(&l).unwrap();
        let mut expected = Vec::new();
        for i in 1..=6 {
            let mut c = vec![0i64; 7];
            c[i] = -1;
            expected.push(DivisorClass::new(c));
        }
        for i in 1..=6 {
            for j in (i + 1)..=6 {
                expected.push(h_minus(6, &[i, j]));
            }
        }
        for i in 1..=6 {
            let mut c = vec![1i64; 7];
            c[0] = 2;
            c[i] = 0;
            expected.push(DivisorClass::new(c));
        }
        expected.sort();
        assert_eq!(list.classes, expected);
    }

    #[test]
    fn widened_scan_finds_nothing_new() {
        for r in 0..=8 {
            let l = PicardLattice::blowup_p2(r).unwrap();
            let base = neg_one_classes(&l).unwrap();
            let wide = neg_one_classes_widened(&l, 5).unwrap();
            assert_eq!(base, wide, "r = {r}");
        }
    }

    #[test]
    fn neg_one_count_r7_r8() {
        // 56 lines on the degree-2 surface, 240 on degree 1.
        assert_eq!(
            neg_one_classes(&PicardLattice::blowup_p2(7).unwrap())
                .unwrap()
                .len(),
            56
        );
        assert_eq!(
            neg_one_classes(&PicardLattice::blowup_p2(8).unwrap())
                .unwrap()
                .len(),
            240
        );
    }

    #[test]
    fn pairs_of_neg_one_classes_meet_at_most_once_for_r_le_6() {
        for r in 0..=6 {
            let l = PicardLattice::blowup_p2(r).unwrap();
            let list = neg_one_classes(&l).unwrap();
            for (i, a) in list.classes.iter().enumerate() {
                for b in &list.classes[i + 1..] {
                    assert!(l.intersection(a, b).unwrap() <= 1);
                }
            }
        }
    }

    #[test]
    fn adjoint_dual_examples() {
        let l = PicardLattice::blowup_p2(3).unwrap();
        let d = h_minus(3, &[1]);
        let dual = adjoint_dual(&l, &d);
        assert_eq!(dual, DivisorClass::new(vec![2, 0, 1, 1]));
        assert_eq!(adjoint_dual(&l, &dual), d);
        let q = PicardLattice::Quadric;
        assert_eq!(
            adjoint_dual(&q, &DivisorClass::new(vec![1, 0])),
            DivisorClass::new(vec![1, 2])
        );
    }

    #[test]
    fn duality_is_a_degree_bijection() {
        for r in 0..=6usize {
            let l = PicardLattice::blowup_p2(r).unwrap();
            let d = l.k_squared();
            for j in 1..d {
                let left = rational_degree_classes(&l, j).unwrap();
                let right = rational_degree_classes(&l, d - j).unwrap();
                assert_eq!(left.len(), right.len());
                for c in &left.classes {
                    let dual = adjoint_dual(&l, c);
                    assert!(right.position(&dual).is_some());
                }
            }
        }
    }

    #[test]
    fn all_enumerated_solutions_satisfy_the_system_and_the_a_bound() {
        for r in 0..=6usize {
            let l = PicardLattice::blowup_p2(r).unwrap();
            let d = l.k_squared();
            for j in 1..d {
                for c in rational_degree_classes(&l, j).unwrap().classes {
                    let a = c.coords()[0];
                    assert!((0..=3).contains(&a), "a = {a} outside the proven range");
                    let sum: i64 = c.coords()[1..].iter().sum();
                    let sum_sq: i64 = c.coords()[1..].iter().map(|b| b * b).sum();
                    assert_eq!(sum, 3 * a - j);
                    assert_eq!(sum_sq, a * a - j + 2);
                }
            }
        }
    }

    #[test]
    fn classes_through_filters() {
        let l = PicardLattice::blowup_p2(6).unwrap();
        let lines = neg_one_classes(&l).unwrap();
        let all = classes_through(&lines, &[], false).unwrap();
        assert_eq!(all.len(), lines.len());
        // Through points 1 and 2: the line H - E_1 - E_2 plus the four
        // proper conic transforms that omit one of the points 3..=6.
        let through12 = classes_through(&lines, &[1, 2], false).unwrap();
        assert_eq!(through12.len(), 5);
        assert!(through12.position(&h_minus(6, &[1, 2])).is_some());
        // One conic transform per omitted point: through five of the six
        // points there is exactly one class, across six choices.
        for omitted in 1..=6usize {
            let five: Vec<usize> = (1..=6).filter(|&p| p != omitted).collect();
            let picked = classes_through(&lines, &five, true).unwrap();
            assert_eq!(picked.len(), 1);
            let mut c = vec![1i64; 7];
            c[0] = 2;
            c[omitted] = 0;
            assert_eq!(picked.classes[0], DivisorClass::new(c));
        }
    }

    #[test]
    fn proper_transform_arithmetic() {
        // For C of degree delta and S of size delta - 1:
        // (C - Σ E_i)² = -1 and (C - Σ E_i)·(-K) = 1.
        let l = PicardLattice::blowup_p2(6).unwrap();
        for delta in 1..=5i64 {
            if let Ok(list) = rational_degree_classes(&l, delta) {
                for c in &list.classes {
                    let take = (delta - 1) as usize;
                    // Use new points among those with multiplicity 0.
                    let free: Vec<usize> = (1..=6)
                        .filter(|&p| c.multiplicity(p) == 0)
                        .take(take)
                        .collect();
                    if free.len() < take {
                        continue;
                    }
                    let mut t = c.clone();
                    for &p in &free {
                        let mut coords = t.coords().to_vec();
                        coords[p] += 1;
                        t = DivisorClass::new(coords);
                    }
                    assert_eq!(l.intersection(&t, &t).unwrap(), -1);
                    assert_eq!(l.degree(&t).unwrap(), 1);
                }
            }
        }
    }
}
