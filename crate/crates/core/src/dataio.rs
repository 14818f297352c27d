//! Loading, validating and cross-referencing the on-disk data bundle.
//!
//! Layout under the data root (discovery is by extension, no manifest):
//!
//! ```text
//! tables/*.ctab.json    character tables
//! fusions/*.fus.json    subgroup-class fusions into a table
//! groups/*.grp          permutation-group generator files
//! claims/*.claim.json   rank claims
//! maxdata/*.max.json    maximal-subgroup order/exclusion data
//! ```
//!
//! Loading either returns a fully validated bundle (plus non-fatal
//! warnings) or the complete list of located errors; a partially valid
//! bundle is never handed out as success. Big integers travel as decimal
//! strings in every JSON document, and each document carries a `schema`
//! version field.
//!
//! Tables named by a claim may legitimately be absent from a bundle (the
//! large published tables are redistributable but not rederivable here);
//! such claims load fine and are reported "skipped: data unavailable" at
//! verification time rather than failing the bundle.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::certify::{self, Claim, MaximalSubgroupData, Step, VerifyContext, Verdict};
use crate::chartab::{CharacterTable, ClassInfo, FusionMap, SubgroupClass};
use crate::cyclo::CycloValue;
use crate::permgrp::GroupFile;

pub const SCHEMA_VERSION: u32 = 1;

/// serde adapters for arbitrary-precision integers as decimal strings.
pub mod serde_util {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub mod biguint_string {
        use super::*;

        pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
            s.collect_str(v)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
            let text = String::deserialize(d)?;
            text.parse().map_err(|_| serde::de::Error::custom(format!("bad decimal integer `{text}`")))
        }
    }

    pub mod option_biguint_string {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.serialize_some(&v.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
            let text = Option::<String>::deserialize(d)?;
            match text {
                None => Ok(None),
                Some(text) => text
                    .parse()
                    .map(Some)
                    .map_err(|_| serde::de::Error::custom(format!("bad decimal integer `{text}`"))),
            }
        }
    }
}

use serde_util::biguint_string;

// ---------------------------------------------------------------------------
// raw file schemas
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RawClass {
    name: String,
    #[serde(default)]
    aliases: Vec<String>,
    element_order: u32,
    #[serde(with = "biguint_string")]
    centralizer_order: BigUint,
    #[serde(default)]
    power_maps: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    schema: u32,
    group_name: String,
    #[serde(with = "biguint_string")]
    group_order: BigUint,
    socle_index: u32,
    classes: Vec<RawClass>,
    characters: Vec<Vec<CycloValue>>,
}

#[derive(Serialize, Deserialize)]
struct RawFusionClass {
    name: String,
    #[serde(with = "biguint_string")]
    size: BigUint,
    element_order: u32,
}

#[derive(Serialize, Deserialize)]
struct RawFusion {
    schema: u32,
    ambient_group: String,
    subgroup_name: String,
    #[serde(with = "biguint_string")]
    subgroup_order: BigUint,
    classes: Vec<RawFusionClass>,
    assignment: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct RawMaxData {
    schema: u32,
    #[serde(flatten)]
    data: MaximalSubgroupData,
}

// ---------------------------------------------------------------------------
// errors and warnings
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct LoadError {
    pub file: PathBuf,
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.file.display(), self.pointer, self.message)
    }
}

#[derive(Clone, Debug)]
pub struct LoadWarning {
    pub file: PathBuf,
    pub message: String,
}

impl fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.file.display(), self.message)
    }
}

// ---------------------------------------------------------------------------
// bundle
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ClaimEntry {
    /// file stem, e.g. "mcl_2b"
    pub name: String,
    pub file: PathBuf,
    pub claim: Claim,
    /// false when the referenced table is not in the bundle
    pub table_available: bool,
}

/// Everything loaded from a data root, fully cross-validated.
#[derive(Debug)]
pub struct DataBundle {
    pub tables: BTreeMap<String, CharacterTable>,
    pub fusions: BTreeMap<String, FusionMap>,
    pub groups: BTreeMap<String, GroupFile>,
    pub max_data: BTreeMap<String, MaximalSubgroupData>,
    pub claims: Vec<ClaimEntry>,
    pub warnings: Vec<LoadWarning>,
}

/// Result of verifying one bundle claim.
pub enum ClaimOutcome {
    Verdict(Box<Verdict>),
    Skipped { reason: String },
}

impl DataBundle {
    pub fn verify_context(&self, group: &str) -> Option<VerifyContext<'_>> {
        let table = self.tables.get(group)?;
        Some(VerifyContext { table, fusions: &self.fusions, max_data: &self.max_data })
    }

    /// Verifies a claim, skipping with notice when its table is absent.
    pub fn verify_claim(&self, entry: &ClaimEntry) -> Result<ClaimOutcome, certify::CertifyError> {
        if !entry.table_available {
            return Ok(ClaimOutcome::Skipped {
                reason: format!("data unavailable: table `{}` is not shipped", entry.claim.group),
            });
        }
        let ctx = self.verify_context(&entry.claim.group).expect("availability checked");
        certify::verify_claim(&entry.claim, &ctx).map(|v| ClaimOutcome::Verdict(Box::new(v)))
    }

    pub fn claim(&self, name: &str) -> Option<&ClaimEntry> {
        self.claims.iter().find(|c| c.name == name)
    }
}

// ---------------------------------------------------------------------------
// loading
// ---------------------------------------------------------------------------

fn sorted_files(dir: &Path, suffix: &str) -> Vec<PathBuf> {
    let mut out = Vec::new();
    if let Ok(entries) = fs::read_dir(dir) {
        for entry in entries.flatten() {
            let path = entry.path();
            if path.is_file() && path.file_name().is_some_and(|n| n.to_string_lossy().ends_with(suffix))
            {
                out.push(path);
            }
        }
    }
    out.sort();
    out
}

fn stem(path: &Path, suffix: &str) -> String {
    let name = path.file_name().unwrap_or_default().to_string_lossy();
    name.strip_suffix(suffix).unwrap_or(&name).to_string()
}

fn parse_json<T: serde::de::DeserializeOwned>(
    path: &Path,
    text: &str,
    errors: &mut Vec<LoadError>,
) -> Option<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    match serde_path_to_error::deserialize(de) {
        Ok(v) => Some(v),
        Err(err) => {
            errors.push(LoadError {
                file: path.to_path_buf(),
                pointer: format!("/{}", err.path().to_string().replace('.', "/")),
                message: err.inner().to_string(),
            });
            None
        }
    }
}

fn check_schema(schema: u32, path: &Path, errors: &mut Vec<LoadError>) -> bool {
    if schema != SCHEMA_VERSION {
        errors.push(LoadError {
            file: path.to_path_buf(),
            pointer: "/schema".into(),
            message: format!("unsupported schema version {schema} (expected {SCHEMA_VERSION})"),
        });
        false
    } else {
        true
    }
}

/// Loads one `.ctab.json` file into a validated table. Orthogonality and
/// other invariant violations are hard errors; missing power maps are
/// warnings.
pub fn load_table_file(path: &Path) -> Result<(CharacterTable, Vec<LoadWarning>), Vec<LoadError>> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            return Err(vec![LoadError {
                file: path.to_path_buf(),
                pointer: "/".into(),
                message: format!("cannot read file: {e}"),
            }])
        }
    };
    let Some(raw) = parse_json::<RawTable>(path, &text, &mut errors) else {
        return Err(errors);
    };
    if !check_schema(raw.schema, path, &mut errors) {
        return Err(errors);
    }
    let classes: Vec<ClassInfo> = raw
        .classes
        .into_iter()
        .map(|c| ClassInfo {
            name: c.name,
            aliases: c.aliases,
            element_order: c.element_order,
            centralizer_order: c.centralizer_order,
            power_maps: c
                .power_maps
                .into_iter()
                .filter_map(|(p, target)| p.parse::<u32>().ok().map(|p| (p, target)))
                .collect(),
        })
        .collect();
    if classes.iter().all(|c| c.power_maps.is_empty()) {
        warnings.push(LoadWarning {
            file: path.to_path_buf(),
            message: format!("table `{}` ships no power maps", raw.group_name),
        });
    }
    match CharacterTable::new(
        raw.group_name.clone(),
        raw.group_order,
        raw.socle_index,
        classes,
        raw.characters,
    ) {
        Ok(table) => {
            let report = table.validate();
            if report.is_empty() {
                Ok((table, warnings))
            } else {
                Err(report
                    .issues
                    .into_iter()
                    .map(|issue| LoadError {
                        file: path.to_path_buf(),
                        pointer: "/".into(),
                        message: issue.to_string(),
                    })
                    .collect())
            }
        }
        Err(e) => Err(vec![LoadError {
            file: path.to_path_buf(),
            pointer: "/".into(),
            message: e.to_string(),
        }]),
    }
}

/// Loads and fully validates a data directory. Deterministic and
/// independent of directory listing order.
pub fn load_bundle(root: &Path) -> Result<DataBundle, Vec<LoadError>> {
    let mut errors: Vec<LoadError> = Vec::new();
    let mut warnings: Vec<LoadWarning> = Vec::new();

    let read = |path: &Path, errors: &mut Vec<LoadError>| -> Option<String> {
        match fs::read_to_string(path) {
            Ok(text) => Some(text),
            Err(e) => {
                errors.push(LoadError {
                    file: path.to_path_buf(),
                    pointer: "/".into(),
                    message: format!("cannot read file: {e}"),
                });
                None
            }
        }
    };

    // tables
    let mut tables: BTreeMap<String, CharacterTable> = BTreeMap::new();
    for path in sorted_files(&root.join("tables"), ".ctab.json") {
        match load_table_file(&path) {
            Ok((table, mut file_warnings)) => {
                warnings.append(&mut file_warnings);
                let name = table.group_name.clone();
                if tables.insert(name.clone(), table).is_some() {
                    errors.push(LoadError {
                        file: path.clone(),
                        pointer: "/group_name".into(),
                        message: format!("duplicate table for group `{name}`"),
                    });
                }
            }
            Err(mut file_errors) => errors.append(&mut file_errors),
        }
    }

    // fusions
    let mut fusions: BTreeMap<String, FusionMap> = BTreeMap::new();
    for path in sorted_files(&root.join("fusions"), ".fus.json") {
        let name = stem(&path, ".fus.json");
        let Some(text) = read(&path, &mut errors) else { continue };
        let Some(raw) = parse_json::<RawFusion>(&path, &text, &mut errors) else { continue };
        if !check_schema(raw.schema, &path, &mut errors) {
            continue;
        }
        let Some(table) = tables.get(&raw.ambient_group) else {
            warnings.push(LoadWarning {
                file: path.clone(),
                message: format!(
                    "fusion `{name}` targets table `{}` which is not shipped; fusion skipped",
                    raw.ambient_group
                ),
            });
            continue;
        };
        let classes: Vec<SubgroupClass> = raw
            .classes
            .into_iter()
            .map(|c| SubgroupClass { name: c.name, size: c.size, element_order: c.element_order })
            .collect();
        match FusionMap::resolve(
            name.clone(),
            raw.subgroup_name,
            raw.subgroup_order,
            classes,
            &raw.assignment,
            table,
        ) {
            Ok(f) => {
                fusions.insert(name, f);
            }
            Err(e) => errors.push(LoadError {
                file: path.clone(),
                pointer: "/assignment".into(),
                message: e.to_string(),
            }),
        }
    }

    // maximal subgroup data
    let mut max_data: BTreeMap<String, MaximalSubgroupData> = BTreeMap::new();
    for path in sorted_files(&root.join("maxdata"), ".max.json") {
        let name = stem(&path, ".max.json");
        let Some(text) = read(&path, &mut errors) else { continue };
        let Some(raw) = parse_json::<RawMaxData>(&path, &text, &mut errors) else { continue };
        if !check_schema(raw.schema, &path, &mut errors) {
            continue;
        }
        if let Some(table) = tables.get(&raw.data.group_name) {
            for (i, entry) in raw.data.entries.iter().enumerate() {
                if entry.order.is_zero() || !(&table.group_order % &entry.order).is_zero() {
                    errors.push(LoadError {
                        file: path.clone(),
                        pointer: format!("/entries/{i}/order"),
                        message: format!(
                            "order {} of `{}` does not divide |{}| = {}",
                            entry.order, entry.description, table.group_name, table.group_order
                        ),
                    });
                }
                if entry.excluded_element_orders.iter().any(|&o| o <= 1) {
                    errors.push(LoadError {
                        file: path.clone(),
                        pointer: format!("/entries/{i}/excluded_element_orders"),
                        message: "excluded element orders must be > 1".into(),
                    });
                }
            }
        } else {
            warnings.push(LoadWarning {
                file: path.clone(),
                message: format!(
                    "maximal-subgroup data `{name}` is for table `{}` which is not shipped",
                    raw.data.group_name
                ),
            });
        }
        max_data.insert(name, raw.data);
    }

    // permutation group files
    let mut groups: BTreeMap<String, GroupFile> = BTreeMap::new();
    for path in sorted_files(&root.join("groups"), ".grp") {
        let name = stem(&path, ".grp");
        let Some(text) = read(&path, &mut errors) else { continue };
        match GroupFile::parse(&text) {
            Ok(gf) => {
                groups.insert(name, gf);
            }
            Err(e) => errors.push(LoadError {
                file: path.clone(),
                pointer: "/".into(),
                message: e.to_string(),
            }),
        }
    }

    // claims
    let mut claims: Vec<ClaimEntry> = Vec::new();
    for path in sorted_files(&root.join("claims"), ".claim.json") {
        let name = stem(&path, ".claim.json");
        let Some(text) = read(&path, &mut errors) else { continue };
        let Some(claim) = parse_json::<Claim>(&path, &text, &mut errors) else { continue };
        if !check_schema(claim.schema, &path, &mut errors) {
            continue;
        }
        let (lo, hi) = claim.asserted_alpha.bounds();
        if lo > hi {
            errors.push(LoadError {
                file: path.clone(),
                pointer: "/asserted_alpha".into(),
                message: format!("bounds [{lo},{hi}] are inverted"),
            });
            continue;
        }
        let table_available = tables.contains_key(&claim.group);
        if table_available {
            // a loadable claim never produces unknown-name errors downstream
            let table = &tables[&claim.group];
            if let Err(e) = table.class_index(&claim.socle_class) {
                errors.push(LoadError {
                    file: path.clone(),
                    pointer: "/socle_class".into(),
                    message: e.to_string(),
                });
                continue;
            }
            for (i, step) in claim.steps.iter().enumerate() {
                let mut missing: Vec<String> = Vec::new();
                match step {
                    Step::BrauerProper { a_fusion, b_fusion, intersection_fusion, .. } => {
                        for f in [Some(a_fusion), Some(b_fusion), intersection_fusion.as_ref()]
                            .into_iter()
                            .flatten()
                        {
                            if !fusions.contains_key(f) {
                                missing.push(format!("fusion `{f}`"));
                            }
                        }
                    }
                    Step::BrauerCaseAnalysis { b_fusion, cases, .. } => {
                        if !fusions.contains_key(b_fusion) {
                            missing.push(format!("fusion `{b_fusion}`"));
                        }
                        for case in cases {
                            if !fusions.contains_key(&case.a_fusion) {
                                missing.push(format!("fusion `{}`", case.a_fusion));
                            }
                        }
                    }
                    Step::ChainGeneration { max_data: m, .. } => {
                        if !max_data.contains_key(m) {
                            missing.push(format!("maximal-subgroup data `{m}`"));
                        }
                    }
                    _ => {}
                }
                for m in missing {
                    errors.push(LoadError {
                        file: path.clone(),
                        pointer: format!("/steps/{i}"),
                        message: format!("dangling reference: {m}"),
                    });
                }
            }
        } else {
            warnings.push(LoadWarning {
                file: path.clone(),
                message: format!(
                    "claim `{name}` references table `{}` which is not shipped; it will be reported as skipped",
                    claim.group
                ),
            });
        }
        claims.push(ClaimEntry { name, file: path, claim, table_available });
    }

    if errors.is_empty() {
        Ok(DataBundle { tables, fusions, groups, max_data, claims, warnings })
    } else {
        Err(errors)
    }
}

// ---------------------------------------------------------------------------
// traces
// ---------------------------------------------------------------------------

/// Writes a verdict as a round-trippable JSON trace.
pub fn export_trace(verdict: &Verdict, path: &Path) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(verdict).expect("verdicts always serialize");
    fs::write(path, json)
}

/// Reads a verdict trace back.
pub fn read_trace(path: &Path) -> std::io::Result<Verdict> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))
}

/// Serialises a table back to the `.ctab.json` schema (used by exporters
/// and the perturbation tests).
pub fn table_to_json(table: &CharacterTable) -> serde_json::Value {
    let classes: Vec<serde_json::Value> = table
        .classes
        .iter()
        .map(|c| {
            serde_json::json!({
                "name": c.name,
                "aliases": c.aliases,
                "element_order": c.element_order,
                "centralizer_order": c.centralizer_order.to_string(),
                "power_maps": c.power_maps.iter().map(|(p, t)| (p.to_string(), t.clone())).collect::<BTreeMap<_,_>>(),
            })
        })
        .collect();
    let characters: Vec<Vec<String>> = table
        .characters
        .iter()
        .map(|row| row.iter().map(|v| v.to_string()).collect())
        .collect();
    serde_json::json!({
        "schema": SCHEMA_VERSION,
        "group_name": table.group_name,
        "group_order": table.group_order.to_string(),
        "socle_index": table.socle_index,
        "classes": classes,
        "characters": characters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(path: &Path, text: &str) {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, text).unwrap();
    }

    fn s3_table_json() -> String {
        r#"{
  "schema": 1,
  "group_name": "S3",
  "group_order": "6",
  "socle_index": 1,
  "classes": [
    {"name": "1A", "element_order": 1, "centralizer_order": "6"},
    {"name": "2A", "element_order": 2, "centralizer_order": "2"},
    {"name": "3A", "element_order": 3, "centralizer_order": "3", "power_maps": {"2": "3A", "3": "1A"}}
  ],
  "characters": [
    ["1", "1", "1"],
    ["1", "-1", "1"],
    ["2", "0", "-1"]
  ]
}"#
        .to_string()
    }

    fn temp_root(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("conjrank-dataio-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn loads_a_minimal_bundle() {
        let root = temp_root("ok");
        write(&root.join("tables/s3.ctab.json"), &s3_table_json());
        write(&root.join("groups/s3.grp"), "degree := 3\na := (1,2)\nb := (1,2,3)\n");
        write(
            &root.join("claims/s3_2a.claim.json"),
            r#"{"schema":1,"group":"S3","socle_class":"2A","asserted_alpha":[2,3],
                "steps":[{"type":"struct_const_positive","a":"2A","b":"2A","c":"3A"}]}"#,
        );
        let bundle = load_bundle(&root).unwrap();
        assert_eq!(bundle.tables.len(), 1);
        assert_eq!(bundle.groups.len(), 1);
        assert_eq!(bundle.claims.len(), 1);
        assert!(bundle.claims[0].table_available);
        let outcome = bundle.verify_claim(&bundle.claims[0]).unwrap();
        assert!(matches!(outcome, ClaimOutcome::Verdict(_)));
    }

    #[test]
    fn claim_for_missing_table_is_skipped_with_notice() {
        let root = temp_root("missing-table");
        write(&root.join("tables/s3.ctab.json"), &s3_table_json());
        write(
            &root.join("claims/ghost.claim.json"),
            r#"{"schema":1,"group":"Ghost.2","socle_class":"2A","asserted_alpha":3,"steps":[]}"#,
        );
        let bundle = load_bundle(&root).unwrap();
        assert!(bundle
            .warnings
            .iter()
            .any(|w| w.file.ends_with("ghost.claim.json") && w.message.contains("Ghost.2")));
        let outcome = bundle.verify_claim(&bundle.claims[0]).unwrap();
        match outcome {
            ClaimOutcome::Skipped { reason } => assert!(reason.contains("data unavailable")),
            ClaimOutcome::Verdict(_) => panic!("should skip"),
        }
    }

    #[test]
    fn dangling_fusion_reference_is_an_error() {
        let root = temp_root("dangling");
        write(&root.join("tables/s3.ctab.json"), &s3_table_json());
        write(
            &root.join("claims/s3_2a.claim.json"),
            r#"{"schema":1,"group":"S3","socle_class":"2A","asserted_alpha":3,
                "steps":[{"type":"brauer_proper",
                          "character":{"degree":"2"},
                          "a_fusion":"nope","b_fusion":"nope"}]}"#,
        );
        let errors = load_bundle(&root).unwrap_err();
        assert!(errors
            .iter()
            .any(|e| e.file.ends_with("s3_2a.claim.json") && e.message.contains("nope")));
    }

    #[test]
    fn corrupted_value_is_located() {
        let root = temp_root("corrupt");
        let bad = s3_table_json().replace("\"2\", \"0\", \"-1\"", "\"2\", \"E(\", \"-1\"");
        write(&root.join("tables/s3.ctab.json"), &bad);
        let errors = load_bundle(&root).unwrap_err();
        assert_eq!(errors.len(), 1);
        assert!(errors[0].pointer.contains("characters"), "pointer: {}", errors[0].pointer);
    }

    #[test]
    fn orthogonality_violation_is_a_hard_error() {
        let root = temp_root("orth");
        let bad = s3_table_json().replace("[\"1\", \"-1\", \"1\"]", "[\"1\", \"-1\", \"2\"]");
        write(&root.join("tables/s3.ctab.json"), &bad);
        let errors = load_bundle(&root).unwrap_err();
        assert!(errors.iter().any(|e| e.message.contains("orthogonality")));
    }

    #[test]
    fn non_integral_centralizer_division_is_reported() {
        let root = temp_root("centralizer");
        let bad = s3_table_json().replace("{\"name\": \"2A\", \"element_order\": 2, \"centralizer_order\": \"2\"}",
            "{\"name\": \"2A\", \"element_order\": 2, \"centralizer_order\": \"4\"}");
        write(&root.join("tables/s3.ctab.json"), &bad);
        let errors = load_bundle(&root).unwrap_err();
        assert!(!errors.is_empty());
    }

    #[test]
    fn trace_round_trip() {
        let root = temp_root("trace");
        write(&root.join("tables/s3.ctab.json"), &s3_table_json());
        write(
            &root.join("claims/s3_2a.claim.json"),
            r#"{"schema":1,"group":"S3","socle_class":"2A","asserted_alpha":[2,3],
                "steps":[{"type":"struct_const_positive","a":"2A","b":"2A","c":"3A","expected":"3"}]}"#,
        );
        let bundle = load_bundle(&root).unwrap();
        let ClaimOutcome::Verdict(verdict) = bundle.verify_claim(&bundle.claims[0]).unwrap() else {
            panic!("expected a verdict");
        };
        let path = root.join("trace.json");
        export_trace(&verdict, &path).unwrap();
        let back = read_trace(&path).unwrap();
        assert_eq!(*verdict, back);
        // replaying reproduces the identical verdict
        let ClaimOutcome::Verdict(again) = bundle.verify_claim(&bundle.claims[0]).unwrap() else {
            panic!("expected a verdict");
        };
        assert_eq!(*verdict, *again);
        // unwritable path is an I/O error
        assert!(export_trace(&verdict, Path::new("/nonexistent-dir/x.json")).is_err());
    }
}
