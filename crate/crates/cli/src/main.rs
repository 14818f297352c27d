//! `conjrank` — batch front end for the exact rank-certificate toolkit.
//!
//! Exit codes: 0 verified/success, 1 refuted or step/bound failure,
//! 2 data or usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::json;

use conjrank::certify::{self, CharSelector, Claim, Step};
use conjrank::chartab::CharacterTable;
use conjrank::dataio::{self, ClaimOutcome, DataBundle};
use conjrank::permgrp::{
    brute_alpha, brute_struct_const, classify_two_generated, pair_orbit_count, GroupFile,
    PermGroup, Permutation, DEFAULT_ENUMERATION_BOUND,
};

#[derive(Parser)]
#[command(name = "conjrank", version, about = "Exact verification of conjugate-generation rank certificates")]
struct Cli {
    /// Data bundle directory (tables/, fusions/, groups/, claims/, maxdata/)
    #[arg(long, global = true, default_value = "./data")]
    data: PathBuf,

    /// Emit machine-readable JSON on stdout
    #[arg(long, global = true)]
    json: bool,

    /// Also write the JSON result to this file
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Element-enumeration bound for brute-force strategies
    #[arg(long, global = true)]
    bound: Option<u64>,

    /// Allow full-scale runs (removes the enumeration bound unless --bound is given)
    #[arg(long, global = true)]
    extended: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify one claim file, a named bundle claim, or the whole suite
    Verify {
        /// Path to a .claim.json file or the name of a bundled claim
        claim: Option<String>,
        /// Verify every claim in the bundle
        #[arg(long)]
        all: bool,
    },
    /// Class multiplication coefficient m(a,b,c) from a table
    Structconst { table: String, a: String, b: String, c: String },
    /// All classes c with m(a,b,c) > 0, with coefficients
    Products { table: String, a: String, b: String },
    /// Brauer inequality (χ_A,1_A) + (χ_B,1_B) > (χ_{A∩B},1_{A∩B})
    Brauer {
        table: String,
        /// Character degree
        #[arg(long)]
        degree: String,
        /// Classes the character must be positive on
        #[arg(long = "positive-on")]
        positive_on: Vec<String>,
        /// Classes the character must be negative on
        #[arg(long = "negative-on")]
        negative_on: Vec<String>,
        #[arg(long = "a-fusion")]
        a_fusion: String,
        #[arg(long = "b-fusion")]
        b_fusion: String,
        /// Fusion for A∩B; trivial intersection when omitted
        #[arg(long = "ab-fusion")]
        ab_fusion: Option<String>,
    },
    /// Multiplicity of the principal character in a restriction
    Restriction {
        table: String,
        #[arg(long)]
        degree: String,
        #[arg(long = "positive-on")]
        positive_on: Vec<String>,
        #[arg(long = "negative-on")]
        negative_on: Vec<String>,
        #[arg(long)]
        fusion: String,
    },
    /// Check that products of two class elements have order ≤ k
    TranspositionBound { table: String, class: String, k: u32 },
    /// Brute-force permutation-group oracles
    Brute {
        #[command(subcommand)]
        sub: BruteCommand,
    },
    /// Load and validate the whole data bundle
    CheckData,
}

#[derive(Subcommand)]
enum BruteCommand {
    /// Count pairs (u,v) from the classes of a and b with uv = c
    M {
        group: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
    },
    /// Minimum number of conjugates of an element generating ⊇ socle
    Alpha {
        group: PathBuf,
        /// "self" or a path to the socle's .grp file
        #[arg(long, default_value = "self")]
        socle: String,
        #[arg(long)]
        element: String,
        #[arg(long = "max-k", default_value_t = 6)]
        max_k: u32,
    },
    /// Classify subgroups generated by pairs from an order-3 class
    ClassifyPairs {
        group: PathBuf,
        #[arg(long = "class-rep")]
        class_rep: String,
    },
    /// Count centraliser orbits on the class of the given element
    PairOrbits {
        group: PathBuf,
        #[arg(long = "class-rep")]
        class_rep: String,
    },
    /// Group order via the stabiliser chain
    Order { group: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

struct Output {
    json: bool,
    out: Option<PathBuf>,
}

impl Output {
    fn emit(&self, human: &str, machine: serde_json::Value) -> anyhow::Result<()> {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&machine)?);
        } else {
            println!("{human}");
        }
        if let Some(path) = &self.out {
            std::fs::write(path, serde_json::to_string_pretty(&machine)?)?;
        }
        Ok(())
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let bound = cli.bound.unwrap_or(if cli.extended { u64::MAX } else { DEFAULT_ENUMERATION_BOUND });
    let output = Output { json: cli.json, out: cli.out.clone() };
    match &cli.command {
        Command::Verify { claim, all } => cmd_verify(cli, &output, claim.as_deref(), *all),
        Command::Structconst { table, a, b, c } => {
            let table = resolve_table(cli, table)?;
            let m = table.struct_const_by_name(a, b, c)?;
            output.emit(
                &format!("m({a},{b},{c}) = {m} in {}", table.group_name),
                json!({"command": "structconst", "table": table.group_name,
                       "a": a, "b": b, "c": c, "value": m.to_string()}),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Products { table, a, b } => {
            let table = resolve_table(cli, table)?;
            let products = table.product_classes_by_name(a, b)?;
            let mut lines = Vec::new();
            let mut entries = Vec::new();
            for (c, m) in &products {
                lines.push(format!("{}: {}", table.classes[*c].name, m));
                entries.push(json!({"class": table.classes[*c].name, "coefficient": m.to_string()}));
            }
            output.emit(
                &format!(
                    "product classes of ({a},{b}) in {}:\n{}",
                    table.group_name,
                    lines.join("\n")
                ),
                json!({"command": "products", "table": table.group_name,
                       "a": a, "b": b, "classes": entries}),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Brauer { table, degree, positive_on, negative_on, a_fusion, b_fusion, ab_fusion } => {
            let bundle = load_bundle(cli)?;
            let table = bundle_table(&bundle, table)?;
            let ctx = bundle.verify_context(&table.group_name).expect("table present");
            let selector = selector(degree, positive_on, negative_on)?;
            let step = certify::Step::BrauerProper {
                character: selector,
                a_fusion: a_fusion.clone(),
                b_fusion: b_fusion.clone(),
                intersection_fusion: ab_fusion.clone(),
            };
            let claim = single_step_probe(&table.group_name, table, step);
            let verdict = certify::verify_claim(&claim, &ctx)?;
            let record = &verdict.verified_steps[0];
            output.emit(
                &format!("{}: {}", if record.passed { "holds" } else { "fails" }, record.detail),
                json!({"command": "brauer", "table": table.group_name,
                       "passed": record.passed, "detail": record.detail,
                       "recorded": record.recorded}),
            )?;
            Ok(if record.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Restriction { table, degree, positive_on, negative_on, fusion } => {
            let bundle = load_bundle(cli)?;
            let table = bundle_table(&bundle, table)?;
            let selector = selector(degree, positive_on, negative_on)?;
            let chi = table.find_character(&selector.degree, &selector_constraints(&selector))?;
            let f = bundle
                .fusions
                .get(fusion)
                .ok_or_else(|| anyhow::anyhow!("unknown fusion `{fusion}`"))?;
            let value = table.restriction_inner_product(chi, f)?;
            output.emit(
                &format!("(chi_{fusion}, 1) = {value}"),
                json!({"command": "restriction", "table": table.group_name,
                       "fusion": fusion, "value": value.to_string()}),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::TranspositionBound { table, class, k } => {
            let table = resolve_table(cli, table)?;
            let outcome = certify::check_transposition_bound(&table, class, *k)?;
            output.emit(
                &format!("{}: {}", if outcome.passed { "pass" } else { "fail" }, outcome.detail),
                json!({"command": "transposition-bound", "table": table.group_name,
                       "class": class, "k": k, "passed": outcome.passed,
                       "detail": outcome.detail}),
            )?;
            Ok(if outcome.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Brute { sub } => cmd_brute(&output, sub, bound),
        Command::CheckData => {
            match dataio::load_bundle(&cli.data) {
                Ok(bundle) => {
                    let mut lines = vec![format!(
                        "bundle ok: {} tables, {} fusions, {} groups, {} claims, {} max-data files",
                        bundle.tables.len(),
                        bundle.fusions.len(),
                        bundle.groups.len(),
                        bundle.claims.len(),
                        bundle.max_data.len()
                    )];
                    for w in &bundle.warnings {
                        lines.push(format!("warning: {w}"));
                    }
                    output.emit(
                        &lines.join("\n"),
                        json!({"command": "check-data", "ok": true,
                               "tables": bundle.tables.keys().collect::<Vec<_>>(),
                               "claims": bundle.claims.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
                               "warnings": bundle.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>()}),
                    )?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(errors) => {
                    for e in &errors {
                        eprintln!("error: {e}");
                    }
                    eprintln!("{} error(s) in data bundle", errors.len());
                    Ok(ExitCode::from(2))
                }
            }
        }
    }
}

fn selector(degree: &str, positive_on: &[String], negative_on: &[String]) -> anyhow::Result<CharSelector> {
    let degree: BigUint = degree
        .parse()
        .map_err(|_| anyhow::anyhow!("bad degree `{degree}`"))?;
    Ok(CharSelector {
        degree,
        positive_on: positive_on.to_vec(),
        negative_on: negative_on.to_vec(),
    })
}

fn selector_constraints(s: &CharSelector) -> Vec<(String, conjrank::chartab::CharConstraint)> {
    let mut out = Vec::new();
    for c in &s.positive_on {
        out.push((c.clone(), conjrank::chartab::CharConstraint::Positive));
    }
    for c in &s.negative_on {
        out.push((c.clone(), conjrank::chartab::CharConstraint::Negative));
    }
    out
}

fn single_step_probe(group: &str, table: &CharacterTable, step: Step) -> Claim {
    // probe claims reuse the verifier on one step; only the step record is
    // read back, never the status
    Claim {
        schema: dataio::SCHEMA_VERSION,
        group: group.to_string(),
        socle_class: table.classes[0].name.clone(),
        asserted_alpha: certify::AlphaAssertion::Interval([2, u32::MAX]),
        steps: vec![step],
    }
}

fn load_bundle(cli: &Cli) -> anyhow::Result<DataBundle> {
    dataio::load_bundle(&cli.data).map_err(|errors| {
        for e in &errors {
            eprintln!("error: {e}");
        }
        anyhow::anyhow!("{} error(s) loading data bundle from {}", errors.len(), cli.data.display())
    })
}

fn bundle_table<'a>(bundle: &'a DataBundle, name: &str) -> anyhow::Result<&'a CharacterTable> {
    bundle
        .tables
        .get(name)
        .ok_or_else(|| anyhow::anyhow!("table `{name}` is not in the bundle"))
}

/// A table argument may be a bundle name ("HS.2") or a file path.
fn resolve_table(cli: &Cli, arg: &str) -> anyhow::Result<CharacterTable> {
    let path = Path::new(arg);
    if path.is_file() {
        return dataio::load_table_file(path)
            .map(|(table, _)| table)
            .map_err(|errors| {
                for e in &errors {
                    eprintln!("error: {e}");
                }
                anyhow::anyhow!("table file {arg} failed to load")
            });
    }
    let mut bundle = load_bundle(cli)?;
    bundle
        .tables
        .remove(arg)
        .ok_or_else(|| anyhow::anyhow!("table `{arg}` is neither a file nor in the bundle"))
}

fn cmd_verify(cli: &Cli, output: &Output, claim: Option<&str>, all: bool) -> anyhow::Result<ExitCode> {
    let bundle = load_bundle(cli)?;
    if all || claim.is_none() {
        let mut results = Vec::new();
        let mut any_failed = false;
        for entry in &bundle.claims {
            match bundle.verify_claim(entry)? {
                ClaimOutcome::Verdict(v) => {
                    let ok = v.status == certify::Status::Verified;
                    any_failed |= !ok;
                    results.push((entry.name.clone(), format!("{}", v.status), Some(v)));
                }
                ClaimOutcome::Skipped { reason } => {
                    results.push((entry.name.clone(), format!("skipped: {reason}"), None));
                }
            }
        }
        let human: Vec<String> = results
            .iter()
            .map(|(name, status, v)| match v {
                Some(v) => format!(
                    "{name}: {status} (alpha in [{}, {}], axioms: {})",
                    v.alpha_lower,
                    v.alpha_upper.map_or("inf".into(), |u| u.to_string()),
                    if v.axioms_assumed.is_empty() { "none".into() } else { v.axioms_assumed.join("; ") }
                ),
                None => format!("{name}: {status}"),
            })
            .collect();
        let machine = json!({
            "command": "verify",
            "results": results.iter().map(|(name, status, v)| json!({
                "claim": name,
                "status": status,
                "verdict": v.as_ref().map(|v| serde_json::to_value(v).unwrap()),
            })).collect::<Vec<_>>(),
        });
        output.emit(&human.join("\n"), machine)?;
        return Ok(if any_failed { ExitCode::from(1) } else { ExitCode::SUCCESS });
    }

    let claim_arg = claim.unwrap();
    let (name, claim) = if Path::new(claim_arg).is_file() {
        let text = std::fs::read_to_string(claim_arg)?;
        let claim: Claim = serde_json::from_str(&text)?;
        (claim_arg.to_string(), claim)
    } else if let Some(entry) = bundle.claim(claim_arg) {
        (entry.name.clone(), entry.claim.clone())
    } else {
        anyhow::bail!("`{claim_arg}` is neither a claim file nor a bundled claim name");
    };
    let Some(ctx) = bundle.verify_context(&claim.group) else {
        anyhow::bail!("table `{}` required by claim `{name}` is not in the bundle", claim.group);
    };
    let verdict = certify::verify_claim(&claim, &ctx)?;
    let alpha_line = match (verdict.alpha_lower, verdict.alpha_upper) {
        (lo, Some(hi)) if lo == hi => format!("alpha = {lo}"),
        (lo, Some(hi)) => format!("alpha in [{lo}, {hi}]"),
        (lo, None) => format!("alpha >= {lo}"),
    };
    output.emit(
        &format!("{verdict}\n{alpha_line}"),
        serde_json::to_value(&verdict)?,
    )?;
    Ok(match verdict.status {
        certify::Status::Verified => ExitCode::SUCCESS,
        _ => ExitCode::from(1),
    })
}

fn parse_element(gf: &GroupFile, text: &str) -> anyhow::Result<Permutation> {
    if text.trim_start().starts_with('(') {
        Ok(Permutation::parse_cycles(gf.degree, text)?)
    } else {
        Ok(gf.element(text.trim())?)
    }
}

fn cmd_brute(output: &Output, sub: &BruteCommand, bound: u64) -> anyhow::Result<ExitCode> {
    let load = |path: &PathBuf| -> anyhow::Result<(GroupFile, PermGroup)> {
        let text = std::fs::read_to_string(path)?;
        let gf = GroupFile::parse(&text)?;
        let group = gf.group()?;
        Ok((gf, group))
    };
    match sub {
        BruteCommand::M { group, a, b, c } => {
            let (gf, g) = load(group)?;
            let a = parse_element(&gf, a)?;
            let b = parse_element(&gf, b)?;
            let c = parse_element(&gf, c)?;
            let ca = g.class_of(&a, bound)?;
            let cb = g.class_of(&b, bound)?;
            let m = brute_struct_const(&ca, &cb, &c);
            output.emit(
                &format!("m = {m} (|a^G| = {}, |b^G| = {})", ca.size(), cb.size()),
                json!({"command": "brute m", "value": m.to_string(),
                       "class_a_size": ca.size(), "class_b_size": cb.size()}),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        BruteCommand::Alpha { group, socle, element, max_k } => {
            let (gf, g) = load(group)?;
            let socle_group = if socle == "self" {
                gf.group()?
            } else {
                let text = std::fs::read_to_string(socle)?;
                GroupFile::parse(&text)?.group()?
            };
            let x = parse_element(&gf, element)?;
            match brute_alpha(&g, &socle_group, &x, *max_k, bound)? {
                Some(k) => {
                    output.emit(
                        &format!("alpha = {k}"),
                        json!({"command": "brute alpha", "value": k}),
                    )?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    output.emit(
                        &format!("exceeded: no generating tuple of size <= {max_k}"),
                        json!({"command": "brute alpha", "exceeded": max_k}),
                    )?;
                    Ok(ExitCode::from(1))
                }
            }
        }
        BruteCommand::ClassifyPairs { group, class_rep } => {
            let (gf, g) = load(group)?;
            let rep = parse_element(&gf, class_rep)?;
            let class = g.class_of(&rep, bound)?;
            let labels = classify_two_generated(&g, &class, None, bound)?;
            let human: Vec<String> =
                labels.iter().map(|(l, n)| format!("{l}: {n}")).collect();
            output.emit(
                &format!("pair-generated subgroups (one per orbit):\n{}", human.join("\n")),
                json!({"command": "brute classify-pairs",
                       "labels": labels.iter().map(|(l, n)| json!({"label": l.to_string(), "count": n})).collect::<Vec<_>>()}),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        BruteCommand::PairOrbits { group, class_rep } => {
            let (gf, g) = load(group)?;
            let rep = parse_element(&gf, class_rep)?;
            let class = g.class_of(&rep, bound)?;
            let n = pair_orbit_count(&g, &class, &rep, None, bound)?;
            output.emit(
                &format!("{n} centraliser orbits on the class (size {})", class.size()),
                json!({"command": "brute pair-orbits", "value": n, "class_size": class.size()}),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        BruteCommand::Order { group } => {
            let (_, g) = load(group)?;
            let order = g.order();
            output.emit(
                &format!(
                    "order = {order} (base {:?}, orbit lengths {:?})",
                    g.base().iter().map(|p| p + 1).collect::<Vec<_>>(),
                    g.basic_orbit_lengths()
                ),
                json!({"command": "brute order", "value": order.to_string(),
                       "base": g.base().iter().map(|p| p + 1).collect::<Vec<_>>(),
                       "orbit_lengths": g.basic_orbit_lengths()}),
            )?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
