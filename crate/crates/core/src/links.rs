//! The factorization-center calculus: moves, Sarkisov links with their
//! center-transfer semantics, the invariant `c` of a word of moves, the
//! degree table of contracted curves per two-sided link, loop invariance,
//! and rationality centers.
//!
//! Link semantics is a closed, hand-encoded table keyed by type and the
//! degree triple `(a, d, b)`; the engine never discovers links. The table
//! rows carry the center sizes `(a-d, b-d)` and the data-transfer rule.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::gset::{
    burnside_canonicalize, gset_from_subgroup, is_isomorphic, same_group, BurnsideElement, GSet,
    GSetSpec,
};
use crate::nslattice::{rational_degree_classes, DivisorClass, PicardLattice};
use crate::permgrp::{Group, Permutation};
use crate::surface::{SurfaceKind, SurfaceModel, SurfaceModelSpec};

/// A Sarkisov link shape. Two-sided links carry the degree triple
/// `(a, d, b)` of source, middle and target; `d = 1` is a Bertini
/// involution and `d = 2` a Geiser involution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LinkTag {
    /// Blow-up of a del Pezzo model onto a conic-bundle model.
    I { source: i64, target: i64 },
    /// Elementary transformation of a conic bundle.
    IiC,
    /// Two-sided link between del Pezzo models.
    IiD { a: i64, d: i64, b: i64 },
    /// Inverse of type I.
    Iii { source: i64, target: i64 },
    /// Isomorphism of conic-bundle models not respecting the fibrations.
    Iv,
}

impl LinkTag {
    pub fn bertini(a: i64) -> LinkTag {
        LinkTag::IiD { a, d: 1, b: a }
    }

    pub fn geiser(a: i64) -> LinkTag {
        LinkTag::IiD { a, d: 2, b: a }
    }

    pub fn is_bertini(&self) -> bool {
        matches!(self, LinkTag::IiD { d: 1, .. })
    }

    pub fn is_geiser(&self) -> bool {
        matches!(self, LinkTag::IiD { d: 2, .. })
    }

    /// All rows of the closed link table, up to payload choices.
    pub fn table() -> Vec<LinkTag> {
        let mut rows = vec![
            LinkTag::I {
                source: 9,
                target: 8,
            },
            LinkTag::I {
                source: 9,
                target: 5,
            },
            LinkTag::I {
                source: 8,
                target: 6,
            },
            LinkTag::Iii {
                source: 8,
                target: 9,
            },
            LinkTag::Iii {
                source: 5,
                target: 9,
            },
            LinkTag::Iii {
                source: 6,
                target: 8,
            },
            LinkTag::IiC,
            LinkTag::Iv,
        ];
        for (a, d, b) in IID_ROWS {
            rows.push(LinkTag::IiD {
                a: *a,
                d: *d,
                b: *b,
            });
        }
        for a in [9i64, 8, 6, 5] {
            rows.push(LinkTag::bertini(a));
            rows.push(LinkTag::geiser(a));
        }
        rows
    }
}

/// Two-sided rows with middle degree 3, 4 or 7. Bertini and Geiser rows
/// `(a, 1, a)` and `(a, 2, a)` are admitted separately for the del Pezzo
/// degrees 9, 8, 6, 5.
const IID_ROWS: &[(i64, i64, i64)] = &[
    (9, 3, 9),
    (9, 4, 5),
    (5, 4, 9),
    (8, 4, 8),
    (8, 3, 5),
    (5, 3, 8),
    (6, 3, 6),
    (6, 4, 6),
    (9, 7, 8),
    (8, 7, 9),
];

fn is_table_iid(a: i64, d: i64, b: i64) -> bool {
    IID_ROWS.contains(&(a, d, b))
        || (a == b && (d == 1 || d == 2) && matches!(a, 9 | 8 | 6 | 5) && a - d >= 1)
}

/// One step of a word of birational moves.
#[derive(Debug, Clone)]
pub enum Move {
    BlowUp { center: GSet },
    BlowDown { center: GSet },
    Link { tag: LinkTag, center: Option<GSet> },
    Isom,
}

/// A word of moves evaluated against a running surface model.
#[derive(Debug, Clone)]
pub struct MoveWord {
    pub source: SurfaceModel,
    pub moves: Vec<Move>,
}

/// The blow-up and blow-down centers accumulated along a word;
/// `c = Σ [blowups] - Σ [blowdowns]` after canonicalization.
#[derive(Debug, Clone, Default)]
pub struct CenterLedger {
    pub blowups: Vec<GSet>,
    pub blowdowns: Vec<GSet>,
}

/// Result of applying one link: the target model and the centers blown up
/// and down (when present).
pub struct LinkOutcome {
    pub target: SurfaceModel,
    pub blowup: Option<GSet>,
    pub blowdown: Option<GSet>,
}

/// What payload a link expects, as decided by the table row.
enum PayloadRule {
    /// No free data; any provided payload is rejected.
    NoPayload,
    /// A G-set of exactly this size; defaults to the trivial action.
    Fixed(usize),
    /// Any nonempty G-set; defaults to one point.
    AnySize,
}

fn payload_rule(model: &SurfaceModel, tag: &LinkTag) -> Result<PayloadRule> {
    let deg = model.base_degree();
    let need = |want: i64| -> Result<()> {
        if deg != Some(want) {
            return validation(format!(
                "link {:?} needs a degree-{want} source, got tag {}",
                tag,
                model.tag()
            ));
        }
        Ok(())
    };
    Ok(match tag {
        LinkTag::I {
            source: 9,
            target: 8,
        } => {
            need(9)?;
            PayloadRule::NoPayload
        }
        LinkTag::I {
            source: 9,
            target: 5,
        } => {
            need(9)?;
            PayloadRule::Fixed(4)
        }
        LinkTag::I {
            source: 8,
            target: 6,
        } => {
            need(8)?;
            if !matches!(model.kind(), SurfaceKind::DP8 { .. }) {
                return validation("link I 8->6 starts from a minimal quadric model");
            }
            PayloadRule::Fixed(2)
        }
        LinkTag::I { source, target } => {
            return validation(format!(
                "type I link {source}<-...->{target} is not in the table"
            ))
        }
        LinkTag::Iii {
            source: 8,
            target: 9,
        } => {
            if !matches!(model.kind(), SurfaceKind::C8) {
                return validation("link III 8->9 starts from a conic-bundle model");
            }
            PayloadRule::NoPayload
        }
        LinkTag::Iii {
            source: 5,
            target: 9,
        } => {
            need(5)?;
            PayloadRule::NoPayload
        }
        LinkTag::Iii {
            source: 6,
            target: 8,
        } => {
            need(6)?;
            PayloadRule::NoPayload
        }
        LinkTag::Iii { source, target } => {
            return validation(format!(
                "type III link {source}->{target} is not in the table"
            ))
        }
        LinkTag::IiC => {
            if !matches!(model.kind(), SurfaceKind::C8) {
                return validation("type IIC links act on conic-bundle models");
            }
            PayloadRule::AnySize
        }
        LinkTag::Iv => {
            if !matches!(model.kind(), SurfaceKind::C8 | SurfaceKind::DP8 { .. }) {
                return validation("type IV links act on conic-bundle models");
            }
            PayloadRule::NoPayload
        }
        LinkTag::IiD { a, d, b } => {
            if !is_table_iid(*a, *d, *b) {
                return validation(format!(
                    "type IID degrees ({a},{d},{b}) are not in the table"
                ));
            }
            need(*a)?;
            if *a == 8 && !matches!(model.kind(), SurfaceKind::DP8 { .. }) {
                return validation("degree-8 two-sided links start from a minimal quadric model");
            }
            match (*a, *d, *b) {
                (_, 1, _) | (_, 2, _) => PayloadRule::Fixed((a - d) as usize),
                (9, 3, 9) => PayloadRule::Fixed(6),
                (9, 4, 5) => PayloadRule::Fixed(5),
                (5, 4, 9) => PayloadRule::NoPayload,
                (8, 4, 8) => PayloadRule::Fixed(4),
                (8, 3, 5) => PayloadRule::Fixed(5),
                (5, 3, 8) => PayloadRule::Fixed(2),
                (6, 3, 6) => PayloadRule::Fixed(3),
                (6, 4, 6) => PayloadRule::Fixed(2),
                (9, 7, 8) => PayloadRule::Fixed(2),
                (8, 7, 9) => PayloadRule::NoPayload,
                _ => unreachable!("covered by is_table_iid"),
            }
        }
    })
}

fn resolve_payload(
    model: &SurfaceModel,
    tag: &LinkTag,
    center: Option<&GSet>,
) -> Result<Option<GSet>> {
    let g = model.galois();
    match payload_rule(model, tag)? {
        PayloadRule::NoPayload => {
            if center.is_some() {
                return validation(format!("link {tag:?} takes no center payload"));
            }
            Ok(None)
        }
        PayloadRule::Fixed(n) => match center {
            Some(z) => {
                if !same_group(z.group(), g) {
                    return validation("link center is not over the model's Galois group");
                }
                if z.size() != n {
                    return validation(format!(
                        "link {tag:?} needs a center of size {n}, got {}",
                        z.size()
                    ));
                }
                Ok(Some(z.clone()))
            }
            None => Ok(Some(GSet::trivial(g.clone(), n))),
        },
        PayloadRule::AnySize => match center {
            Some(z) => {
                if !same_group(z.group(), g) {
                    return validation("link center is not over the model's Galois group");
                }
                if z.size() == 0 {
                    return validation("elementary transformation centers are nonempty");
                }
                Ok(Some(z.clone()))
            }
            None => Ok(Some(GSet::point(g.clone()))),
        },
    }
}

/// Splits off one globally fixed point of a conic set, for contractions
/// whose target keeps the remaining family.
fn split_fixed_point(set: &GSet, what: &str) -> Result<GSet> {
    match set.globally_fixed_points().first() {
        Some(&p) => set.without_point(p),
        None => validation(format!(
            "{what} has no rational member to split off, so this contraction is not defined"
        )),
    }
}

/// Applies one Sarkisov link to a model, per the closed transfer table.
/// Returns the target model together with the blown-up and blown-down
/// centers. The blow-up stack is carried through unchanged.
pub fn apply_link(
    model: &SurfaceModel,
    tag: &LinkTag,
    center: Option<&GSet>,
) -> Result<LinkOutcome> {
    let g = model.galois().clone();
    let payload = resolve_payload(model, tag, center)?;
    let pt = || GSet::point(g.clone());
    let remodel = |kind: SurfaceKind| SurfaceModel::new(g.clone(), kind, model.stack().to_vec());

    let (target, blowup, blowdown) = match tag {
        LinkTag::I {
            source: 9,
            target: 8,
        } => (remodel(SurfaceKind::C8)?, Some(pt()), None),
        LinkTag::I {
            source: 9,
            target: 5,
        } => {
            let z4 = payload.expect("fixed payload");
            let conics = GSet::disjoint_union(&[z4.clone(), pt()])?;
            (remodel(SurfaceKind::DP5 { conics })?, Some(z4), None)
        }
        LinkTag::I {
            source: 8,
            target: 6,
        } => {
            let rulings = match model.kind() {
                SurfaceKind::DP8 { rulings } => rulings.clone(),
                _ => unreachable!("checked by payload_rule"),
            };
            let z2 = payload.expect("fixed payload");
            let conics = GSet::disjoint_union(&[rulings, pt()])?;
            (
                remodel(SurfaceKind::DP6 {
                    conics,
                    cubics: z2.clone(),
                })?,
                Some(z2),
                None,
            )
        }
        LinkTag::Iii {
            source: 8,
            target: 9,
        } => (remodel(SurfaceKind::DP9)?, None, Some(pt())),
        LinkTag::Iii {
            source: 5,
            target: 9,
        } => {
            let conics = match model.kind() {
                SurfaceKind::DP5 { conics } => conics,
                _ => unreachable!("degree checked"),
            };
            let z4 = split_fixed_point(conics, "the conic family")?;
            (remodel(SurfaceKind::DP9)?, None, Some(z4))
        }
        LinkTag::Iii {
            source: 6,
            target: 8,
        } => {
            let (conics, cubics) = match model.kind() {
                SurfaceKind::DP6 { conics, cubics } => (conics, cubics.clone()),
                _ => unreachable!("degree checked"),
            };
            let rulings = split_fixed_point(conics, "the conic family")?;
            (remodel(SurfaceKind::DP8 { rulings })?, None, Some(cubics))
        }
        LinkTag::I { .. } | LinkTag::Iii { .. } => unreachable!("rejected by payload_rule"),
        LinkTag::IiC => {
            let z = payload.expect("any-size payload");
            (model.clone(), Some(z.clone()), Some(z))
        }
        LinkTag::Iv => (model.clone(), None, None),
        LinkTag::IiD { a, d, b } => match (*a, *d, *b) {
            (_, 1, _) | (_, 2, _) => {
                let z = payload.expect("fixed payload");
                (model.clone(), Some(z.clone()), Some(z))
            }
            (9, 3, 9) => {
                let z6 = payload.expect("fixed payload");
                (remodel(SurfaceKind::DP9)?, Some(z6.clone()), Some(z6))
            }
            (9, 4, 5) => {
                let z5 = payload.expect("fixed payload");
                (
                    remodel(SurfaceKind::DP5 { conics: z5.clone() })?,
                    Some(z5),
                    Some(pt()),
                )
            }
            (5, 4, 9) => {
                let conics = match model.kind() {
                    SurfaceKind::DP5 { conics } => conics.clone(),
                    _ => unreachable!("degree checked"),
                };
                (remodel(SurfaceKind::DP9)?, Some(pt()), Some(conics))
            }
            (9, 7, 8) => {
                let z2 = payload.expect("fixed payload");
                (
                    remodel(SurfaceKind::DP8 {
                        rulings: z2.clone(),
                    })?,
                    Some(z2),
                    Some(pt()),
                )
            }
            (8, 7, 9) => {
                let rulings = match model.kind() {
                    SurfaceKind::DP8 { rulings } => rulings.clone(),
                    _ => unreachable!("kind checked"),
                };
                (remodel(SurfaceKind::DP9)?, Some(pt()), Some(rulings))
            }
            (8, 4, 8) => {
                let z4 = payload.expect("fixed payload");
                (model.clone(), Some(z4.clone()), Some(z4))
            }
            (8, 3, 5) => {
                let rulings = match model.kind() {
                    SurfaceKind::DP8 { rulings } => rulings.clone(),
                    _ => unreachable!("kind checked"),
                };
                let z5 = payload.expect("fixed payload");
                (
                    remodel(SurfaceKind::DP5 { conics: z5.clone() })?,
                    Some(z5),
                    Some(rulings),
                )
            }
            (5, 3, 8) => {
                let conics = match model.kind() {
                    SurfaceKind::DP5 { conics } => conics.clone(),
                    _ => unreachable!("degree checked"),
                };
                let z2 = payload.expect("fixed payload");
                (
                    remodel(SurfaceKind::DP8 {
                        rulings: z2.clone(),
                    })?,
                    Some(z2),
                    Some(conics),
                )
            }
            (6, 3, 6) => {
                let (conics, cubics) = match model.kind() {
                    SurfaceKind::DP6 { conics, cubics } => (conics.clone(), cubics.clone()),
                    _ => unreachable!("degree checked"),
                };
                let z3 = payload.expect("fixed payload");
                (
                    remodel(SurfaceKind::DP6 {
                        conics: z3.clone(),
                        cubics,
                    })?,
                    Some(z3),
                    Some(conics),
                )
            }
            (6, 4, 6) => {
                let (conics, cubics) = match model.kind() {
                    SurfaceKind::DP6 { conics, cubics } => (conics.clone(), cubics.clone()),
                    _ => unreachable!("degree checked"),
                };
                let z2 = payload.expect("fixed payload");
                (
                    remodel(SurfaceKind::DP6 {
                        conics,
                        cubics: z2.clone(),
                    })?,
                    Some(z2),
                    Some(cubics),
                )
            }
            _ => unreachable!("covered by is_table_iid"),
        },
    };
    Ok(LinkOutcome {
        target,
        blowup,
        blowdown,
    })
}

/// The inverse of a link move, with the payload the forward application
/// consumed. Applying it to the forward target returns to a model
/// isomorphic to the forward source and cancels the ledger.
fn inverse_link(tag: &LinkTag, outcome: &LinkOutcome) -> (LinkTag, Option<GSet>) {
    let inv_tag = match tag {
        LinkTag::I { source, target } => LinkTag::Iii {
            source: *target,
            target: *source,
        },
        LinkTag::Iii { source, target } => LinkTag::I {
            source: *target,
            target: *source,
        },
        LinkTag::IiC => LinkTag::IiC,
        LinkTag::Iv => LinkTag::Iv,
        LinkTag::IiD { a, d, b } => LinkTag::IiD {
            a: *b,
            d: *d,
            b: *a,
        },
    };
    // The inverse blows up what the forward move blew down; links whose rule
    // takes no payload reconstruct it from the model data instead.
    let payload = match inv_tag {
        LinkTag::Iii { .. } | LinkTag::Iv => None,
        LinkTag::I {
            source: 9,
            target: 8,
        } => None,
        LinkTag::IiD { a, d, b } if matches!((a, d, b), (5, 4, 9) | (8, 7, 9)) => None,
        _ => outcome.blowdown.clone(),
    };
    (inv_tag, payload)
}

/// Runs a word against its source model, accumulating the center ledger.
pub struct WordOutcome {
    pub final_model: SurfaceModel,
    pub ledger: CenterLedger,
    pub c: BurnsideElement,
    /// The inverse word, legal from the final model.
    pub inverse_moves: Vec<Move>,
}

pub fn evaluate_word(word: &MoveWord) -> Result<WordOutcome> {
    let mut model = word.source.clone();
    let mut ledger = CenterLedger::default();
    let mut inverse_moves = Vec::with_capacity(word.moves.len());
    for (i, mv) in word.moves.iter().enumerate() {
        let step =
            |e: crate::error::Error| crate::error::Error::Validation(format!("move {i}: {e}"));
        match mv {
            Move::Isom => inverse_moves.push(Move::Isom),
            Move::BlowUp { center } => {
                model = model.with_center_pushed(center.clone()).map_err(step)?;
                ledger.blowups.push(center.clone());
                inverse_moves.push(Move::BlowDown {
                    center: center.clone(),
                });
            }
            Move::BlowDown { center } => {
                model = model.with_center_removed(center).map_err(step)?;
                ledger.blowdowns.push(center.clone());
                inverse_moves.push(Move::BlowUp {
                    center: center.clone(),
                });
            }
            Move::Link { tag, center } => {
                let outcome = apply_link(&model, tag, center.as_ref()).map_err(step)?;
                if let Some(z) = &outcome.blowup {
                    ledger.blowups.push(z.clone());
                }
                if let Some(z) = &outcome.blowdown {
                    ledger.blowdowns.push(z.clone());
                }
                let (inv_tag, inv_payload) = inverse_link(tag, &outcome);
                inverse_moves.push(Move::Link {
                    tag: inv_tag,
                    center: inv_payload,
                });
                model = outcome.target;
            }
        }
    }
    inverse_moves.reverse();
    let pos: Vec<&GSet> = ledger.blowups.iter().collect();
    let neg: Vec<&GSet> = ledger.blowdowns.iter().collect();
    let c = burnside_canonicalize(word.source.galois(), &pos, &neg)?;
    Ok(WordOutcome {
        final_model: model,
        ledger,
        c,
        inverse_moves,
    })
}

/// The factorization center of a word: `Σ [blow-ups] - Σ [blow-downs]`,
/// canonicalized.
pub fn c_of_word(word: &MoveWord) -> Result<BurnsideElement> {
    Ok(evaluate_word(word)?.c)
}

/// Extends a word by its own inverse, producing a loop back to the source.
pub fn closed_loop(word: &MoveWord) -> Result<MoveWord> {
    let outcome = evaluate_word(word)?;
    let mut moves = word.moves.clone();
    moves.extend(outcome.inverse_moves);
    Ok(MoveWord {
        source: word.source.clone(),
        moves,
    })
}

/// Character-level consistency of one blow-up/blow-down exchange between
/// models: `μ(A_target) + χ(blowdown) = μ(A_source) + χ(blowup)` entrywise.
pub fn mu_equation_holds(
    source: &SurfaceModel,
    target: &SurfaceModel,
    blowup: Option<&GSet>,
    blowdown: Option<&GSet>,
) -> Result<bool> {
    let chi = |z: Option<&GSet>| -> Vec<i64> {
        match z {
            Some(set) => set.fixed_point_character().signed(),
            None => vec![0; source.galois().conjugacy_classes().count()],
        }
    };
    let left: Vec<i64> = target
        .virtual_ns_set()?
        .mu()?
        .iter()
        .zip(chi(blowdown))
        .map(|(m, x)| m + x)
        .collect();
    let right: Vec<i64> = source
        .virtual_ns_set()?
        .mu()?
        .iter()
        .zip(chi(blowup))
        .map(|(m, x)| m + x)
        .collect();
    Ok(left == right)
}

/// Applies the link and checks the character-level equation for it.
pub fn verify_link_mu(model: &SurfaceModel, tag: &LinkTag, center: Option<&GSet>) -> Result<bool> {
    let outcome = apply_link(model, tag, center)?;
    mu_equation_holds(
        model,
        &outcome.target,
        outcome.blowup.as_ref(),
        outcome.blowdown.as_ref(),
    )
}

/// The anticanonical degree of the contracted curve classes for each
/// two-sided table row with middle degree 3 or 4.
pub fn delta_of_row(a: i64, d: i64, b: i64) -> Option<i64> {
    match (a, d, b) {
        (9, 4, 5) | (9, 3, 9) | (8, 3, 5) => Some(6),
        (8, 4, 8) => Some(4),
        (6, 4, 6) => Some(3),
        (6, 3, 6) => Some(4),
        (5, 4, 9) => Some(2),
        (5, 3, 8) => Some(3),
        _ => None,
    }
}

/// One contracted component of a delta-row certificate: a source class and
/// the set of new points its proper transform passes through.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaComponent {
    pub class: DivisorClass,
    pub through: Vec<usize>,
}

/// Lattice-level certificate for one row of the delta table.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaRowReport {
    pub a: i64,
    pub d: i64,
    pub b: i64,
    pub delta: i64,
    pub new_points: usize,
    pub expected_components: usize,
    pub candidate_count: usize,
    pub pairwise_disjoint: bool,
    pub components: Vec<DeltaComponent>,
    pub verdict: bool,
}

fn source_lattice_of_degree(a: i64) -> Result<PicardLattice> {
    match a {
        9 => PicardLattice::blowup_p2(0),
        8 => Ok(PicardLattice::Quadric),
        6 => PicardLattice::blowup_p2(3),
        5 => PicardLattice::blowup_p2(4),
        _ => validation(format!("no large-degree source of degree {a}")),
    }
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(from: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Checks the certificate for a row `(a, d, b)` against a candidate curve
/// degree: on the blow-up of the source at `a - d` points, the proper
/// transforms of source classes of degree `delta` through `delta - 1` of
/// the new points must form exactly `b - d` pairwise-disjoint (-1)-classes.
///
/// Exposed with a free `delta` so mutated degrees can be shown to fail.
pub fn delta_row_certificate(a: i64, d: i64, b: i64, delta: i64) -> Result<DeltaRowReport> {
    if delta_of_row(a, d, b).is_none() {
        return validation(format!("({a},{d},{b}) is not a row of the delta table"));
    }
    let lattice = source_lattice_of_degree(a)?;
    let new_points = (a - d) as usize;
    let expected = (b - d) as usize;
    // Candidate classes; a failed enumeration (degree out of range on this
    // lattice) simply means no candidates.
    let classes = rational_degree_classes(&lattice, delta)
        .map(|l| l.classes)
        .unwrap_or_default();
    let take = (delta - 1).max(0) as usize;
    let mut components = Vec::new();
    if take <= new_points {
        for c in &classes {
            for s in subsets_of_size(new_points, take) {
                components.push(DeltaComponent {
                    class: c.clone(),
                    through: s.iter().map(|i| i + 1).collect(),
                });
            }
        }
    }
    // Proper transforms: (C - Σ E_s)·(C' - Σ E_s') = C·C' - |S ∩ S'|, and
    // each transform must be a (-1)-class of degree 1.
    let mut all_neg_one = true;
    for comp in &components {
        let self_int = lattice.intersection(&comp.class, &comp.class)? - comp.through.len() as i64;
        let deg = lattice.degree(&comp.class)? - comp.through.len() as i64;
        if self_int != -1 || deg != 1 {
            all_neg_one = false;
        }
    }
    let mut pairwise_disjoint = true;
    for i in 0..components.len() {
        for j in i + 1..components.len() {
            let common = components[i]
                .through
                .iter()
                .filter(|p| components[j].through.contains(p))
                .count() as i64;
            let int = lattice.intersection(&components[i].class, &components[j].class)? - common;
            if int != 0 {
                pairwise_disjoint = false;
            }
        }
    }
    let verdict = components.len() == expected && pairwise_disjoint && all_neg_one && expected > 0;
    Ok(DeltaRowReport {
        a,
        d,
        b,
        delta,
        new_points,
        expected_components: expected,
        candidate_count: components.len(),
        pairwise_disjoint,
        components,
        verdict,
    })
}

/// Certificate for a table row at its claimed delta.
pub fn verify_delta_row(tag: &LinkTag) -> Result<DeltaRowReport> {
    match tag {
        LinkTag::IiD { a, d, b } => match delta_of_row(*a, *d, *b) {
            Some(delta) => delta_row_certificate(*a, *d, *b, delta),
            None => validation(format!("({a},{d},{b}) is not a row of the delta table")),
        },
        _ => validation("delta rows are two-sided links"),
    }
}

/// All rows of the delta table, as link tags.
pub fn delta_table_rows() -> Vec<LinkTag> {
    [
        (9, 4, 5),
        (9, 3, 9),
        (8, 4, 8),
        (8, 3, 5),
        (6, 4, 6),
        (6, 3, 6),
        (5, 4, 9),
        (5, 3, 8),
    ]
    .iter()
    .map(|&(a, d, b)| LinkTag::IiD { a, d, b })
    .collect()
}

/// Small permutation groups used for seeded Galois assignments.
pub fn group_pool() -> Result<Vec<Arc<Group>>> {
    let perm = |v: Vec<usize>| Permutation::from_images(v);
    let groups = vec![
        Group::trivial(1),
        Group::from_generators(2, vec![perm(vec![1, 0])?])?,
        Group::from_generators(3, vec![perm(vec![1, 2, 0])?])?,
        Group::from_generators(4, vec![perm(vec![1, 2, 3, 0])?])?,
        // Klein four
        Group::from_generators(4, vec![perm(vec![1, 0, 2, 3])?, perm(vec![0, 1, 3, 2])?])?,
        Group::from_generators(5, vec![perm(vec![1, 2, 3, 4, 0])?])?,
        // Sym(3)
        Group::from_generators(3, vec![perm(vec![1, 0, 2])?, perm(vec![1, 2, 0])?])?,
        Group::from_generators(6, vec![perm(vec![1, 2, 3, 4, 5, 0])?])?,
        // Dihedral of order 8
        Group::from_generators(4, vec![perm(vec![1, 2, 3, 0])?, perm(vec![3, 2, 1, 0])?])?,
        // Metacyclic of order 20
        Group::from_generators(
            5,
            vec![perm(vec![1, 2, 3, 4, 0])?, perm(vec![0, 2, 4, 1, 3])?],
        )?,
    ];
    Ok(groups.into_iter().map(Arc::new).collect())
}

/// A random source model of the right shape for a link tag, over the group.
fn random_source_for(tag: &LinkTag, g: &Arc<Group>, rng: &mut ChaCha8Rng) -> Result<SurfaceModel> {
    let model = |kind| SurfaceModel::new(g.clone(), kind, vec![]);
    match tag {
        LinkTag::I { source: 9, .. } => model(SurfaceKind::DP9),
        LinkTag::I { .. } => model(SurfaceKind::DP8 {
            rulings: random_gset(g, 2, rng)?,
        }),
        LinkTag::IiC | LinkTag::Iv | LinkTag::Iii { source: 8, .. } => model(SurfaceKind::C8),
        LinkTag::Iii { source: 5, .. } => {
            // The conic family must have a rational member to contract.
            let z4 = random_gset(g, 4, rng)?;
            model(SurfaceKind::DP5 {
                conics: GSet::disjoint_union(&[z4, GSet::point(g.clone())])?,
            })
        }
        LinkTag::Iii { .. } => {
            let z2 = random_gset(g, 2, rng)?;
            model(SurfaceKind::DP6 {
                conics: GSet::disjoint_union(&[z2, GSet::point(g.clone())])?,
                cubics: random_gset(g, 2, rng)?,
            })
        }
        LinkTag::IiD { a, .. } => match a {
            9 => model(SurfaceKind::DP9),
            8 => model(SurfaceKind::DP8 {
                rulings: random_gset(g, 2, rng)?,
            }),
            6 => model(SurfaceKind::DP6 {
                conics: random_gset(g, 3, rng)?,
                cubics: random_gset(g, 2, rng)?,
            }),
            _ => model(SurfaceKind::DP5 {
                conics: random_gset(g, 5, rng)?,
            }),
        },
    }
}

fn random_payload_for(
    model: &SurfaceModel,
    tag: &LinkTag,
    rng: &mut ChaCha8Rng,
) -> Result<Option<GSet>> {
    match payload_rule(model, tag)? {
        PayloadRule::NoPayload => Ok(None),
        PayloadRule::Fixed(n) => Ok(Some(random_gset(model.galois(), n, rng)?)),
        PayloadRule::AnySize => Ok(Some(random_gset(
            model.galois(),
            rng.gen_range(1..=3),
            rng,
        )?)),
    }
}

/// Character-level check results for one table link across seeded
/// assignments.
#[derive(Debug, Clone, Serialize)]
pub struct MuCheckReport {
    pub tag: LinkTag,
    pub assignments: u32,
    pub passed: u32,
    pub verdict: bool,
}

/// Bundled verification of the whole link table: the delta certificates
/// with their mutation controls, the character-level equation for every
/// link over seeded Galois assignments, and the agreement of the two
/// character routes on every model family.
#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub delta_rows: Vec<DeltaRowReport>,
    pub delta_mutations_killed: bool,
    pub mu_checks: Vec<MuCheckReport>,
    pub ns_character_consistent: bool,
    pub verdict: bool,
}

pub fn verify_table(seed: u64, assignments: u32) -> Result<TableReport> {
    let mut delta_rows = Vec::new();
    let mut delta_mutations_killed = true;
    for tag in delta_table_rows() {
        let report = verify_delta_row(&tag)?;
        if let LinkTag::IiD { a, d, b } = tag {
            for wrong in [report.delta - 1, report.delta + 1] {
                if delta_row_certificate(a, d, b, wrong)?.verdict {
                    delta_mutations_killed = false;
                }
            }
        }
        delta_rows.push(report);
    }

    let pool = group_pool()?;
    let mut mu_checks = Vec::new();
    let mut ns_character_consistent = true;
    for tag in LinkTag::table() {
        let mut passed = 0;
        for i in 0..assignments {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            );
            let g = pool[rng.gen_range(0..pool.len())].clone();
            let source = random_source_for(&tag, &g, &mut rng)?;
            // Route agreement on the source model itself.
            if source.ns_character()? != source.virtual_ns_set()?.mu()? {
                ns_character_consistent = false;
            }
            let payload = random_payload_for(&source, &tag, &mut rng)?;
            if verify_link_mu(&source, &tag, payload.as_ref())? {
                passed += 1;
            }
        }
        mu_checks.push(MuCheckReport {
            tag,
            assignments,
            passed,
            verdict: passed == assignments,
        });
    }
    let verdict = delta_rows.iter().all(|r| r.verdict)
        && delta_mutations_killed
        && mu_checks.iter().all(|m| m.verdict)
        && ns_character_consistent;
    Ok(TableReport {
        delta_rows,
        delta_mutations_killed,
        mu_checks,
        ns_character_consistent,
        verdict,
    })
}

/// A seeded random G-set of the given size: a random multiset of coset sets.
pub fn random_gset(group: &Arc<Group>, size: usize, rng: &mut ChaCha8Rng) -> Result<GSet> {
    let lattice = group.subgroup_lattice()?;
    let mut parts: Vec<GSet> = Vec::new();
    let mut remaining = size;
    while remaining > 0 {
        let eligible: Vec<u32> = (0..lattice.class_count() as u32)
            .filter(|&k| group.order() / lattice.representative(k).order() <= remaining)
            .collect();
        let k = eligible[rng.gen_range(0..eligible.len())];
        let part = gset_from_subgroup(group, lattice.representative(k));
        remaining -= part.size();
        parts.push(part);
    }
    GSet::disjoint_union(&parts)
}

/// Candidate link moves legal from the given model, with payload sizes.
fn link_menu(model: &SurfaceModel) -> Vec<(LinkTag, Option<usize>)> {
    let mut out: Vec<(LinkTag, Option<usize>)> = Vec::new();
    match model.kind() {
        SurfaceKind::DP9 => {
            out.push((LinkTag::bertini(9), Some(8)));
            out.push((LinkTag::geiser(9), Some(7)));
            out.push((LinkTag::IiD { a: 9, d: 3, b: 9 }, Some(6)));
            out.push((LinkTag::IiD { a: 9, d: 4, b: 5 }, Some(5)));
            out.push((LinkTag::IiD { a: 9, d: 7, b: 8 }, Some(2)));
            out.push((
                LinkTag::I {
                    source: 9,
                    target: 8,
                },
                None,
            ));
            out.push((
                LinkTag::I {
                    source: 9,
                    target: 5,
                },
                Some(4),
            ));
        }
        SurfaceKind::DP8 { .. } => {
            out.push((LinkTag::bertini(8), Some(7)));
            out.push((LinkTag::geiser(8), Some(6)));
            out.push((LinkTag::IiD { a: 8, d: 4, b: 8 }, Some(4)));
            out.push((LinkTag::IiD { a: 8, d: 3, b: 5 }, Some(5)));
            out.push((LinkTag::IiD { a: 8, d: 7, b: 9 }, None));
            out.push((
                LinkTag::I {
                    source: 8,
                    target: 6,
                },
                Some(2),
            ));
            out.push((LinkTag::Iv, None));
        }
        SurfaceKind::C8 => {
            out.push((LinkTag::IiC, Some(1)));
            out.push((LinkTag::IiC, Some(2)));
            out.push((LinkTag::Iv, None));
            out.push((
                LinkTag::Iii {
                    source: 8,
                    target: 9,
                },
                None,
            ));
        }
        SurfaceKind::DP6 { conics, .. } => {
            out.push((LinkTag::bertini(6), Some(5)));
            out.push((LinkTag::geiser(6), Some(4)));
            out.push((LinkTag::IiD { a: 6, d: 3, b: 6 }, Some(3)));
            out.push((LinkTag::IiD { a: 6, d: 4, b: 6 }, Some(2)));
            if !conics.globally_fixed_points().is_empty() {
                out.push((
                    LinkTag::Iii {
                        source: 6,
                        target: 8,
                    },
                    None,
                ));
            }
        }
        SurfaceKind::DP5 { conics } => {
            out.push((LinkTag::bertini(5), Some(4)));
            out.push((LinkTag::geiser(5), Some(3)));
            out.push((LinkTag::IiD { a: 5, d: 4, b: 9 }, None));
            out.push((LinkTag::IiD { a: 5, d: 3, b: 8 }, Some(2)));
            if !conics.globally_fixed_points().is_empty() {
                out.push((
                    LinkTag::Iii {
                        source: 5,
                        target: 9,
                    },
                    None,
                ));
            }
        }
        SurfaceKind::P2Blowup { .. } => {}
    }
    out
}

/// A seeded random legal word from the source model.
pub fn random_word(source: &SurfaceModel, len: usize, rng: &mut ChaCha8Rng) -> Result<MoveWord> {
    let g = source.galois().clone();
    let mut model = source.clone();
    let mut moves = Vec::with_capacity(len);
    for _ in 0..len {
        let menu = link_menu(&model);
        // Mostly links; occasionally stack moves for coverage.
        let roll = rng.gen_range(0..10);
        let mv = if roll < 2 || menu.is_empty() {
            if roll == 0 || model.stack().is_empty() {
                Move::BlowUp {
                    center: random_gset(&g, rng.gen_range(1..=3), rng)?,
                }
            } else {
                let i = rng.gen_range(0..model.stack().len());
                Move::BlowDown {
                    center: model.stack()[i].clone(),
                }
            }
        } else {
            let (tag, size) = menu[rng.gen_range(0..menu.len())];
            let center = match size {
                Some(n) => Some(random_gset(&g, n, rng)?),
                None => None,
            };
            Move::Link { tag, center }
        };
        let probe = MoveWord {
            source: model.clone(),
            moves: vec![mv.clone()],
        };
        let outcome = evaluate_word(&probe)?;
        model = outcome.final_model;
        moves.push(mv);
    }
    Ok(MoveWord {
        source: source.clone(),
        moves,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopFailure {
    pub trial: u64,
    pub c_terms: usize,
}

/// Report of the randomized loop-invariance run: every generated loop word
/// must have zero factorization center.
#[derive(Debug, Clone, Serialize)]
pub struct LoopReport {
    pub trials: u64,
    pub loops_checked: u64,
    pub natural_returns: u64,
    pub failures: Vec<LoopFailure>,
    pub verdict: bool,
}

/// Generates seeded random loop words from the model and asserts `c = 0` on
/// each. Walks either close on their own (the running model becomes
/// isomorphic to the source) or are closed by appending the inverse word.
pub fn loop_invariance_check(
    source: &SurfaceModel,
    n_trials: u64,
    max_len: usize,
    seed: u64,
) -> Result<LoopReport> {
    let mut failures = Vec::new();
    let mut natural_returns = 0;
    for trial in 0..n_trials {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let forward_len = rng.gen_range(1..=max_len.div_ceil(2).max(1));
        let word = random_word(source, forward_len, &mut rng)?;
        // Stop at a natural return when one shows up; otherwise close the
        // walk with the inverse word.
        let mut closed: Option<MoveWord> = None;
        for cut in 1..=word.moves.len() {
            let prefix = MoveWord {
                source: word.source.clone(),
                moves: word.moves[..cut].to_vec(),
            };
            let out = evaluate_word(&prefix)?;
            if out.final_model.isomorphic_to(source)? {
                natural_returns += 1;
                closed = Some(prefix);
                break;
            }
        }
        let loop_word = match closed {
            Some(w) => w,
            None => closed_loop(&word)?,
        };
        let outcome = evaluate_word(&loop_word)?;
        debug_assert!(outcome.final_model.isomorphic_to(source)?);
        if !outcome.c.is_zero() {
            failures.push(LoopFailure {
                trial,
                c_terms: outcome.c.coefficients().len(),
            });
        }
    }
    Ok(LoopReport {
        trials: n_trials,
        loops_checked: n_trials,
        natural_returns,
        failures: failures.clone(),
        verdict: failures.is_empty(),
    })
}

/// The rationality center of the target of a word from a plane model:
/// `c(word) + [Spec k]`. Word-independence for a fixed target is the
/// content of the loop invariance.
pub fn rationality_center(word: &MoveWord) -> Result<BurnsideElement> {
    if !matches!(word.source.kind(), SurfaceKind::DP9) || !word.source.stack().is_empty() {
        return validation("rationality centers are computed from a plane source model");
    }
    let c = c_of_word(word)?;
    let one = BurnsideElement::one_point(word.source.galois().clone())?;
    c.checked_add(&one)
}

/// Expected center between minimal models outside the large-degree range:
/// `(rk NS(target) - rk NS(source)) · [Spec k]`.
pub fn low_degree_expected_c(
    group: &Arc<Group>,
    rk_source: i64,
    rk_target: i64,
) -> Result<BurnsideElement> {
    let one = BurnsideElement::one_point(group.clone())?;
    let mut out = BurnsideElement::zero(group.clone());
    let diff = rk_target - rk_source;
    for (&k, &c) in one.coefficients() {
        out.add_class(k, c * diff);
    }
    Ok(out)
}

/// Report of the two-cubic-surfaces example: equal Néron-Severi characters,
/// Gassmann-equivalent but non-isomorphic centers, distinguished by their
/// rationality centers and rational line counts.
#[derive(Debug, Clone, Serialize)]
pub struct CubicSuiteReport {
    pub gassmann: bool,
    pub isomorphic_centers: bool,
    pub ns_characters_equal: bool,
    pub centers_differ: bool,
    pub fixed_lines_first: usize,
    pub fixed_lines_second: usize,
    pub verdict: bool,
}

/// Builds the two Gassmann-equivalent degree-6 centers over the Klein four
/// group, blows them up into cubic-surface models, and verifies: equal NS
/// characters, distinct rationality centers, and 3 vs 5 rational lines
/// among the 27 (-1)-classes.
pub fn cubic_example_suite() -> Result<CubicSuiteReport> {
    let a = Permutation::from_images(vec![1, 0, 2, 3])?;
    let b = Permutation::from_images(vec![0, 1, 3, 2])?;
    let g = Arc::new(Group::from_generators(4, vec![a, b])?);
    let subs = g.subgroups_up_to_conjugacy()?;
    let z = GSet::disjoint_union(&[
        gset_from_subgroup(&g, &subs[1]),
        gset_from_subgroup(&g, &subs[2]),
        gset_from_subgroup(&g, &subs[3]),
    ])?;
    let z_prime = GSet::disjoint_union(&[
        gset_from_subgroup(&g, &subs[0]),
        gset_from_subgroup(&g, &subs[4]),
        gset_from_subgroup(&g, &subs[4]),
    ])?;

    let gassmann = crate::gset::is_gassmann(&z, &z_prime)?;
    let isomorphic_centers = is_isomorphic(&z, &z_prime)?;

    let plane = SurfaceModel::new(g.clone(), SurfaceKind::DP9, vec![])?;
    let cubic =
        |center: &GSet| -> Result<SurfaceModel> { plane.with_center_pushed(center.clone()) };
    let x = cubic(&z)?;
    let x_prime = cubic(&z_prime)?;
    let ns_characters_equal = x.ns_character()? == x_prime.ns_character()?;

    let word = |center: &GSet| MoveWord {
        source: plane.clone(),
        moves: vec![Move::BlowUp {
            center: center.clone(),
        }],
    };
    let m_x = rationality_center(&word(&z))?;
    let m_x_prime = rationality_center(&word(&z_prime))?;
    let centers_differ = m_x != m_x_prime;

    let count_fixed_lines = |center: &GSet| -> Result<usize> {
        let lattice = PicardLattice::blowup_p2(6)?;
        let lines = crate::nslattice::neg_one_classes(&lattice)?;
        let mats = center
            .gen_actions()
            .iter()
            .map(|p| crate::surface::e_permutation_matrix(&lattice, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(lines
            .classes
            .iter()
            .filter(|c| mats.iter().all(|m| &m.apply(c) == *c))
            .count())
    };
    let fixed_lines_first = count_fixed_lines(&z)?;
    let fixed_lines_second = count_fixed_lines(&z_prime)?;

    let verdict = gassmann
        && !isomorphic_centers
        && ns_characters_equal
        && centers_differ
        && fixed_lines_first == 3
        && fixed_lines_second == 5;
    Ok(CubicSuiteReport {
        gassmann,
        isomorphic_centers,
        ns_characters_equal,
        centers_differ,
        fixed_lines_first,
        fixed_lines_second,
        verdict,
    })
}

/// Summary of the plane -> quadric -> quintic -> plane chain of two-sided
/// links, with its center ledger and the canonical value of c.
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub blowups: Vec<String>,
    pub blowdowns: Vec<String>,
    pub c_is_zero: bool,
    pub verdict: bool,
}

/// The composite of three two-sided links from the plane back to the plane,
/// blowing up a degree-2 orbit and a degree-5 orbit on the way. The chain
/// returns with c = 0: the intermediate centers cancel in pairs.
pub fn dp5_chain_example() -> Result<ChainReport> {
    // Metacyclic group of order 20 acting on 5 points; the 5-cycle and the
    // multiplication-by-2 map. Z2 is the quotient action on 2 points.
    let five = Permutation::from_images(vec![1, 2, 3, 4, 0])?;
    let double = Permutation::from_images(vec![0, 2, 4, 1, 3])?;
    let g = Arc::new(Group::from_generators(5, vec![five, double])?);
    let z2 = GSet::new(
        g.clone(),
        2,
        vec![
            Permutation::identity(2),
            Permutation::from_images(vec![1, 0])?,
        ],
    )?;
    let z5 = GSet::natural(g.clone());

    let plane = SurfaceModel::new(g.clone(), SurfaceKind::DP9, vec![])?;
    let word = MoveWord {
        source: plane.clone(),
        moves: vec![
            Move::Link {
                tag: LinkTag::IiD { a: 9, d: 7, b: 8 },
                center: Some(z2),
            },
            Move::Link {
                tag: LinkTag::IiD { a: 8, d: 3, b: 5 },
                center: Some(z5),
            },
            Move::Link {
                tag: LinkTag::IiD { a: 5, d: 4, b: 9 },
                center: None,
            },
        ],
    };
    let outcome = evaluate_word(&word)?;
    let describe = |sets: &[GSet]| {
        sets.iter()
            .map(|z| {
                let orbits: Vec<String> = z.orbits().iter().map(|o| o.len().to_string()).collect();
                format!("Z{} (orbits {})", z.size(), orbits.join("+"))
            })
            .collect()
    };
    let returned = outcome.final_model.isomorphic_to(&plane)?;
    Ok(ChainReport {
        blowups: describe(&outcome.ledger.blowups),
        blowdowns: describe(&outcome.ledger.blowdowns),
        c_is_zero: outcome.c.is_zero(),
        verdict: outcome.c.is_zero() && returned,
    })
}

/// Serialized moves.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoveSpec {
    BlowUp {
        center: GSetSpec,
    },
    BlowDown {
        center: GSetSpec,
    },
    Link {
        tag: LinkTag,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<GSetSpec>,
    },
    Isom,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoveWordSpec {
    pub source: SurfaceModelSpec,
    pub moves: Vec<MoveSpec>,
}

impl MoveWordSpec {
    pub fn of(word: &MoveWord) -> MoveWordSpec {
        MoveWordSpec {
            source: SurfaceModelSpec::of(&word.source),
            moves: word
                .moves
                .iter()
                .map(|m| match m {
                    Move::BlowUp { center } => MoveSpec::BlowUp {
                        center: GSetSpec::of(center),
                    },
                    Move::BlowDown { center } => MoveSpec::BlowDown {
                        center: GSetSpec::of(center),
                    },
                    Move::Link { tag, center } => MoveSpec::Link {
                        tag: *tag,
                        center: center.as_ref().map(GSetSpec::of),
                    },
                    Move::Isom => MoveSpec::Isom,
                })
                .collect(),
        }
    }

    pub fn build(self) -> Result<MoveWord> {
        let MoveWordSpec { source, moves } = self;
        Self::bind_moves(source.build()?, moves)
    }

    pub fn build_limited(self, limits: crate::permgrp::Limits) -> Result<MoveWord> {
        let MoveWordSpec { source, moves } = self;
        Self::bind_moves(source.build_limited(limits)?, moves)
    }

    fn bind_moves(source: SurfaceModel, moves: Vec<MoveSpec>) -> Result<MoveWord> {
        let galois = source.galois().clone();
        let moves = moves
            .into_iter()
            .map(|m| {
                Ok(match m {
                    MoveSpec::BlowUp { center } => Move::BlowUp {
                        center: center.bind(&galois)?,
                    },
                    MoveSpec::BlowDown { center } => Move::BlowDown {
                        center: center.bind(&galois)?,
                    },
                    MoveSpec::Link { tag, center } => Move::Link {
                        tag,
                        center: center.map(|c| c.bind(&galois)).transpose()?,
                    },
                    MoveSpec::Isom => Move::Isom,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MoveWord { source, moves })
    }
}
