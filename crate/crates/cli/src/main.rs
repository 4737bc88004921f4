//! Batch front end for the factorcenter engine. Every subcommand reads and
//! writes JSON, prints the result to stdout (or `--output`), and encodes its
//! verdict in the exit code:
//!
//!   0  success / verified
//!   1  verified false (e.g. the two sets are not Gassmann equivalent)
//!   2  validation error (malformed or inconsistent input)
//!   3  resource cap exceeded
//!
//! Errors are reported as a JSON body on stderr. The environment variable
//! `FACTORCENTER_MAX_GROUP_ORDER` overrides the group-order bound.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use factorcenter::gset::{
    gassmann_search, gassmann_survey, is_gassmann, is_isomorphic, GSetFile, GassmannPair,
};
use factorcenter::links::{
    cubic_example_suite, dp5_chain_example, evaluate_word, loop_invariance_check,
    rationality_center, verify_table, MoveWordSpec,
};
use factorcenter::nslattice::{neg_one_classes, rational_degree_classes, PicardLattice};
use factorcenter::permgrp::{Group, GroupSpec, Limits, Permutation};
use factorcenter::surface::SurfaceModelSpec;

#[derive(Parser)]
#[command(
    name = "factorcenter",
    version,
    about = "Gassmann equivalence, del Pezzo class lattices, and the factorization-center calculus"
)]
struct Cli {
    /// Write the JSON result to this path instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gassmann equivalence checks and searches.
    #[command(subcommand)]
    Gassmann(GassmannCmd),
    /// Picard lattice class enumeration.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Surface model computations.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// The factorization-center calculus.
    #[command(subcommand)]
    Links(LinksCmd),
    /// Worked examples.
    #[command(subcommand)]
    Examples(ExamplesCmd),
    /// Group construction helpers.
    #[command(subcommand)]
    Group(GroupCmd),
}

#[derive(Subcommand)]
enum GassmannCmd {
    /// Check two G-set files for Gassmann equivalence.
    Check { a: PathBuf, b: PathBuf },
    /// Search a group for non-isomorphic Gassmann-equivalent pairs.
    Search {
        group: PathBuf,
        #[arg(long)]
        max_degree: usize,
        /// Restrict the search to transitive sets.
        #[arg(long)]
        transitive: bool,
    },
    /// Scan every subgroup class of a symmetric group for Gassmann pairs.
    Survey {
        /// Degree of the ambient symmetric group.
        #[arg(long)]
        sym: usize,
        #[arg(long)]
        max_degree: usize,
        /// Scan only transitive subgroups, for transitive pairs.
        #[arg(long)]
        transitive: bool,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Enumerate rational-curve classes of one degree.
    Enumerate {
        /// Lattice kind: `blowup:R` or `quadric`.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        j: i64,
    },
    /// Enumerate the (-1)-classes of a blow-up lattice.
    NegCurves {
        #[arg(long)]
        r: usize,
    },
}

#[derive(Subcommand)]
enum SurfaceCmd {
    /// Néron-Severi character of a surface model.
    NsChar { model: PathBuf },
    /// The G-set of degree-j rational-curve classes of a blow-up model.
    Mj {
        model: PathBuf,
        #[arg(long)]
        j: i64,
    },
}

#[derive(Subcommand)]
enum LinksCmd {
    /// Factorization center of a word of moves.
    C { word: PathBuf },
    /// Verify the whole link table: delta rows, mutation controls, and
    /// character-level checks over seeded Galois assignments.
    VerifyTable {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        assignments: u32,
    },
    /// Random loop words from a model must all have zero center.
    Loops {
        model: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rationality center of the target of a word from a plane model.
    RationalityCenter { word: PathBuf },
}

#[derive(Subcommand)]
enum ExamplesCmd {
    /// The two cubic surfaces with equal NS characters but different centers.
    Cubic,
    /// The plane -> quadric -> quintic -> plane chain with c = 0.
    Dp5Chain,
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Build a group JSON file from generators in cycle notation.
    Make(MakeArgs),
}

#[derive(Args)]
struct MakeArgs {
    #[arg(long)]
    degree: usize,
    /// Generator, either cycle notation `(0 1 2)(3 4)` or a JSON image
    /// array `[1,2,0]`. Repeat for several generators.
    #[arg(long = "gens")]
    gens: Vec<String>,
}

enum Verdict {
    Verified(Value),
    Refuted(Value),
}

fn limits_from_env() -> Result<Limits, String> {
    let mut limits = Limits::default();
    if let Ok(raw) = std::env::var("FACTORCENTER_MAX_GROUP_ORDER") {
        let bound: usize = raw
            .parse()
            .map_err(|_| format!("FACTORCENTER_MAX_GROUP_ORDER is not a number: {raw}"))?;
        limits.max_group_order = bound;
    }
    Ok(limits)
}

fn read_json<T: DeserializeOwned>(path: &PathBuf) -> Result<T, factorcenter::Error> {
    let text = fs::read_to_string(path).map_err(|e| {
        factorcenter::Error::Validation(format!("cannot read {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text).map_err(|e| {
        factorcenter::Error::Validation(format!("cannot parse {}: {e}", path.display()))
    })
}

/// Parse `(0 1 2)(3 4)`-style cycle notation, or a JSON image array.
fn parse_generator(raw: &str, degree: usize) -> Result<Permutation, factorcenter::Error> {
    let raw = raw.trim();
    if raw.starts_with('[') {
        let images: Vec<usize> = serde_json::from_str(raw)
            .map_err(|e| factorcenter::Error::Validation(format!("bad image array: {e}")))?;
        return Permutation::from_images(images);
    }
    let mut images: Vec<usize> = (0..degree).collect();
    let mut rest = raw;
    while let Some(open) = rest.find('(') {
        let close = rest[open..].find(')').ok_or_else(|| {
            factorcenter::Error::Validation("unbalanced parenthesis in cycle notation".into())
        })? + open;
        let body = &rest[open + 1..close];
        let points: Vec<usize> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<usize>().map_err(|_| {
                    factorcenter::Error::Validation(format!("bad point `{s}` in cycle"))
                })
            })
            .collect::<Result<_, _>>()?;
        for &p in &points {
            if p >= degree {
                return Err(factorcenter::Error::Validation(format!(
                    "point {p} outside degree {degree}"
                )));
            }
        }
        // Compose the cycle after what we have so far.
        let mut cycle: Vec<usize> = (0..degree).collect();
        for w in points.windows(2) {
            cycle[w[0]] = w[1];
        }
        if let (Some(&first), Some(&last)) = (points.first(), points.last()) {
            cycle[last] = first;
        }
        for img in images.iter_mut() {
            *img = cycle[*img];
        }
        rest = &rest[close + 1..];
    }
    Permutation::from_images(images)
}

fn pair_value(pair: &GassmannPair) -> Value {
    let orbit_shape = |s: &factorcenter::gset::GSet| {
        let mut v: Vec<usize> = s.orbits().iter().map(|o| o.len()).collect();
        v.sort_unstable();
        v
    };
    json!({
        "a": GSetFile::of(&pair.a),
        "b": GSetFile::of(&pair.b),
        "a_orbit_shape": orbit_shape(&pair.a),
        "b_orbit_shape": orbit_shape(&pair.b),
        "a_stabilizer_classes": pair.a_stabilizer_classes,
        "b_stabilizer_classes": pair.b_stabilizer_classes,
        "character": pair.character.counts(),
        "isomorphic": pair.isomorphic,
    })
}

fn run(cli: &Cli) -> Result<Verdict, factorcenter::Error> {
    let limits = limits_from_env().map_err(factorcenter::Error::Validation)?;
    match &cli.command {
        Command::Gassmann(GassmannCmd::Check { a, b }) => {
            let file_a: GSetFile = read_json(a)?;
            let file_b: GSetFile = read_json(b)?;
            let (group, set_a) = file_a.build_limited(limits)?;
            let set_b = file_b.build_into(&group)?;
            let equivalent = is_gassmann(&set_a, &set_b)?;
            let isomorphic = is_isomorphic(&set_a, &set_b)?;
            let body = json!({
                "gassmann": equivalent,
                "isomorphic": isomorphic,
                "a_character": set_a.fixed_point_character().counts(),
                "b_character": set_b.fixed_point_character().counts(),
                "a_orbits": set_a.orbits().len(),
                "b_orbits": set_b.orbits().len(),
            });
            Ok(if equivalent {
                Verdict::Verified(body)
            } else {
                Verdict::Refuted(body)
            })
        }
        Command::Gassmann(GassmannCmd::Search {
            group,
            max_degree,
            transitive,
        }) => {
            let spec: GroupSpec = read_json(group)?;
            let group = Arc::new(spec.build_limited(limits)?);
            let pairs = gassmann_search(&group, *max_degree, *transitive)?;
            let body = json!({
                "group_order": group.order(),
                "max_degree": max_degree,
                "transitive_only": transitive,
                "pair_count": pairs.len(),
                "pairs": pairs.iter().map(pair_value).collect::<Vec<_>>(),
            });
            Ok(Verdict::Verified(body))
        }
        Command::Gassmann(GassmannCmd::Survey {
            sym,
            max_degree,
            transitive,
        }) => {
            let report = gassmann_survey(*sym, *transitive, *max_degree)?;
            let body = json!({
                "degree": report.degree,
                "transitive_only": report.transitive_only,
                "max_degree": report.max_degree,
                "classes_scanned": report.classes_scanned,
                "total_pairs": report.total_pairs,
                "entries": report
                    .entries
                    .iter()
                    .map(|e| json!({
                        "group_order": e.group_order,
                        "pairs": e.pairs.iter().map(pair_value).collect::<Vec<_>>(),
                    }))
                    .collect::<Vec<_>>(),
            });
            Ok(Verdict::Verified(body))
        }
        Command::Lattice(LatticeCmd::Enumerate { kind, j }) => {
            let lattice = parse_lattice_kind(kind)?;
            let list = rational_degree_classes(&lattice, *j)?;
            Ok(Verdict::Verified(serde_json::to_value(&list).unwrap()))
        }
        Command::Lattice(LatticeCmd::NegCurves { r }) => {
            let lattice = PicardLattice::blowup_p2(*r)?;
            let list = neg_one_classes(&lattice)?;
            Ok(Verdict::Verified(json!({
                "count": list.len(),
                "classes": list.classes,
            })))
        }
        Command::Surface(SurfaceCmd::NsChar { model }) => {
            let spec: SurfaceModelSpec = read_json(model)?;
            let model = spec.build_limited(limits)?;
            let character = model.ns_character()?;
            let rank = model.picard_rank().ok();
            let virtual_set = model.virtual_ns_set().ok();
            let body = json!({
                "tag": model.tag(),
                "ns_character": character,
                "picard_rank": rank,
                "virtual_ns_set": virtual_set.map(|v| v.report()).transpose()?,
            });
            Ok(Verdict::Verified(body))
        }
        Command::Surface(SurfaceCmd::Mj { model, j }) => {
            let spec: SurfaceModelSpec = read_json(model)?;
            let model = spec.build_limited(limits)?;
            let set = model.mj_set(*j)?;
            let duality = model.mj_duality_check(*j)?;
            Ok(Verdict::Verified(json!({
                "j": j,
                "set": GSetFile::of(&set),
                "orbits": set.orbits(),
                "duality": duality,
            })))
        }
        Command::Links(LinksCmd::C { word }) => {
            let spec: MoveWordSpec = read_json(word)?;
            let word = spec.build_limited(limits)?;
            let outcome = evaluate_word(&word)?;
            Ok(Verdict::Verified(json!({
                "c": outcome.c.report()?,
                "final_tag": outcome.final_model.tag(),
                "blowups": outcome.ledger.blowups.iter().map(GSetFile::of).collect::<Vec<_>>(),
                "blowdowns": outcome.ledger.blowdowns.iter().map(GSetFile::of).collect::<Vec<_>>(),
            })))
        }
        Command::Links(LinksCmd::VerifyTable { seed, assignments }) => {
            let report = verify_table(*seed, *assignments)?;
            let verdict = report.verdict;
            let body = serde_json::to_value(&report).unwrap();
            Ok(if verdict {
                Verdict::Verified(body)
            } else {
                Verdict::Refuted(body)
            })
        }
        Command::Links(LinksCmd::Loops {
            model,
            trials,
            max_len,
            seed,
        }) => {
            let spec: SurfaceModelSpec = read_json(model)?;
            let model = spec.build_limited(limits)?;
            let report = loop_invariance_check(&model, *trials, *max_len, *seed)?;
            let verdict = report.verdict;
            let body = serde_json::to_value(&report).unwrap();
            Ok(if verdict {
                Verdict::Verified(body)
            } else {
                Verdict::Refuted(body)
            })
        }
        Command::Links(LinksCmd::RationalityCenter { word }) => {
            let spec: MoveWordSpec = read_json(word)?;
            let word = spec.build_limited(limits)?;
            let center = rationality_center(&word)?;
            Ok(Verdict::Verified(json!({
                "rationality_center": center.report()?,
            })))
        }
        Command::Examples(ExamplesCmd::Cubic) => {
            let report = cubic_example_suite()?;
            let verdict = report.verdict;
            let body = serde_json::to_value(&report).unwrap();
            Ok(if verdict {
                Verdict::Verified(body)
            } else {
                Verdict::Refuted(body)
            })
        }
        Command::Examples(ExamplesCmd::Dp5Chain) => {
            let report = dp5_chain_example()?;
            let verdict = report.verdict;
            let body = serde_json::to_value(&report).unwrap();
            Ok(if verdict {
                Verdict::Verified(body)
            } else {
                Verdict::Refuted(body)
            })
        }
        Command::Group(GroupCmd::Make(args)) => {
            let gens = args
                .gens
                .iter()
                .map(|raw| parse_generator(raw, args.degree))
                .collect::<Result<Vec<_>, _>>()?;
            let group = Group::from_generators_limited(args.degree, gens, limits)?;
            let body = json!({
                "group": GroupSpec::of(&group),
                "order": group.order(),
                "conjugacy_classes": group.conjugacy_classes().count(),
            });
            Ok(Verdict::Verified(body))
        }
    }
}

fn parse_lattice_kind(kind: &str) -> Result<PicardLattice, factorcenter::Error> {
    if kind == "quadric" {
        return Ok(PicardLattice::Quadric);
    }
    if let Some(r) = kind.strip_prefix("blowup:") {
        let r: usize = r.parse().map_err(|_| {
            factorcenter::Error::Validation(format!("bad blow-up point count in `{kind}`"))
        })?;
        return PicardLattice::blowup_p2(r);
    }
    Err(factorcenter::Error::Validation(format!(
        "unknown lattice kind `{kind}`; use `blowup:R` or `quadric`"
    )))
}

fn emit(cli: &Cli, value: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    match &cli.output {
        Some(path) => fs::write(path, text + "\n"),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Verdict::Verified(body)) => {
            if emit(&cli, &body).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Ok(Verdict::Refuted(body)) => {
            if emit(&cli, &body).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(1)
        }
        Err(err) => {
            let (kind, code) = match &err {
                factorcenter::Error::Validation(_) => ("validation", 2),
                factorcenter::Error::Resource(_) => ("resource", 3),
            };
            let body = json!({
                "error": { "kind": kind, "message": err.to_string() }
            });
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&body).expect("error body")
            );
            ExitCode::from(code)
        }
    }
}
