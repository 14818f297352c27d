//! Machine-checkable certificates for conjugate-generation rank claims.
//!
//! A claim asserts the rank α of one outer class and carries an ordered
//! list of steps. Each step either verifies something exactly from table
//! data (structure-constant positivity, a generation chain against
//! maximal-subgroup data, a Brauer-trick case analysis, a k-transposition
//! bound) or cites an external theorem as a named axiom. The verdict
//! combines the step conclusions into an interval for α and lists every
//! assumption taken on faith — honesty about axioms is the point.
//!
//! Structural problems (unresolvable classes, missing fusions, a principal
//! character where a nonprincipal one is required) abort verification with
//! an error; a step whose verified condition is simply false records a
//! failure in the verdict instead.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chartab::{CharConstraint, CharacterTable, ChartabError, FusionMap};
use crate::dataio::serde_util::{biguint_string, option_biguint_string};

/// Citations accepted for axiom steps in the shipped claim suite.
pub const CITATION_WHITELIST: [&str; 7] = [
    "[GK] Prop 6.2",
    "[BGK] Table 9",
    "[HS]",
    "[KMS]/[K]",
    "[S]",
    "[RZ2] Thm 2",
    "[LW] Thm 1.1",
];

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Chartab(#[from] ChartabError),
    #[error("unknown fusion `{0}`")]
    UnknownFusion(String),
    #[error("fusion `{fusion}` targets `{target}`, not table `{table}`")]
    FusionTargetMismatch { fusion: String, target: String, table: String },
    #[error("unknown maximal-subgroup data `{0}`")]
    UnknownMaxData(String),
    #[error("maximal-subgroup data is for `{got}`, not `{expected}`")]
    MaxDataGroupMismatch { expected: String, got: String },
    #[error("the selected character is principal; Brauer's trick needs a nonprincipal one")]
    PrincipalCharacterSelected,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse conclusion `{0}` (expected e.g. `alpha > 3` or `alpha <= 4`)")]
    BadConclusion(String),
    #[error("axiom step carries an empty citation")]
    EmptyCitation,
    #[error("claim is malformed: {0}")]
    MalformedClaim(String),
}

// ---------------------------------------------------------------------------
// claim data model
// ---------------------------------------------------------------------------

/// One maximal subgroup: its order, whether it lies inside the socle, and
/// the element orders it is known to exclude (with sources carried by the
/// surrounding data file).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MaxSubgroupEntry {
    pub description: String,
    #[serde(with = "biguint_string")]
    pub order: BigUint,
    pub inside_socle: bool,
    #[serde(default)]
    pub excluded_element_orders: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MaximalSubgroupData {
    pub group_name: String,
    pub entries: Vec<MaxSubgroupEntry>,
}

/// Selects one character row: a degree plus sign/value constraints.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CharSelector {
    #[serde(with = "biguint_string")]
    pub degree: BigUint,
    #[serde(default)]
    pub positive_on: Vec<String>,
    #[serde(default)]
    pub negative_on: Vec<String>,
}

impl CharSelector {
    fn constraints(&self) -> Vec<(String, CharConstraint)> {
        let mut out = Vec::new();
        for c in &self.positive_on {
            out.push((c.clone(), CharConstraint::Positive));
        }
        for c in &self.negative_on {
            out.push((c.clone(), CharConstraint::Negative));
        }
        out
    }
}

/// One Brauer case: the class of `x1·x2` and the fusion of `A = ⟨x1,x2⟩`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BrauerCase {
    pub product_class: String,
    pub a_fusion: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Step {
    /// Verifies m(a,b,c) > 0, and equality when `expected` is given.
    StructConstPositive {
        a: String,
        b: String,
        c: String,
        #[serde(default, with = "option_biguint_string", skip_serializing_if = "Option::is_none")]
        expected: Option<BigUint>,
    },
    /// Three-element generation: positive chain coefficients produce a
    /// subgroup (not inside the socle) whose order is divisible by the
    /// required primes and which contains the required element orders;
    /// maximal-subgroup data then excludes every proper overgroup.
    ChainGeneration {
        seed_class: String,
        intermediate_classes: Vec<String>,
        required_prime_divisors: Vec<u64>,
        required_element_orders: Vec<u32>,
        max_data: String,
    },
    /// Cyclic-Sylow spread fact: the verifiable part is that p divides the
    /// socle order exactly once and m(nX,nX,c) > 0 for an order-p class;
    /// the existence of a completing partner is the cited axiom.
    SpreadAxiom { prime: u64, citation: String },
    /// Two-element generation from an outer element and a member of the
    /// given class, taken on faith; the verifiable part is
    /// m(nX,nX,class) > 0.
    BeamableAxiom { class: String, citation: String },
    /// Brauer's trick: (χ_A,1_A) + (χ_B,1_B) > (χ_{A∩B},1_{A∩B}) for a
    /// nonprincipal irreducible χ forces ⟨A,B⟩ < G. `intersection_fusion`
    /// defaults to the trivial subgroup.
    BrauerProper {
        character: CharSelector,
        a_fusion: String,
        b_fusion: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        intersection_fusion: Option<String>,
    },
    /// One Brauer check per class in product_classes(nX,nX) \ {1A},
    /// with A ≅ the dihedral group generated by the two class elements and
    /// B cyclic of order 2; exact coverage is required. Concludes α ≥ 4.
    BrauerCaseAnalysis {
        character: CharSelector,
        b_fusion: String,
        cases: Vec<BrauerCase>,
    },
    /// α ≥ 3 for involution classes: two conjugate involutions generate a
    /// dihedral group, which cannot contain a nonabelian simple socle.
    InvolutionLowerBound {},
    /// Verifies that products of two class members only reach element
    /// orders ≤ k (the k-transposition property).
    TranspositionBound { k: u32 },
    /// A bound imported from the literature, recorded as an axiom.
    ClassificationAxiom { citation: String, conclusion: String },
}

impl Step {
    pub fn kind(&self) -> &'static str {
        match self {
            Step::StructConstPositive { .. } => "struct_const_positive",
            Step::ChainGeneration { .. } => "chain_generation",
            Step::SpreadAxiom { .. } => "spread_axiom",
            Step::BeamableAxiom { .. } => "beamable_axiom",
            Step::BrauerProper { .. } => "brauer_proper",
            Step::BrauerCaseAnalysis { .. } => "brauer_case_analysis",
            Step::InvolutionLowerBound {} => "involution_lower_bound",
            Step::TranspositionBound { .. } => "transposition_bound",
            Step::ClassificationAxiom { .. } => "classification_axiom",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum AlphaAssertion {
    Exact(u32),
    Interval([u32; 2]),
}

impl AlphaAssertion {
    pub fn bounds(&self) -> (u32, u32) {
        match self {
            AlphaAssertion::Exact(a) => (*a, *a),
            AlphaAssertion::Interval([lo, hi]) => (*lo, *hi),
        }
    }
}

impl fmt::Display for AlphaAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaAssertion::Exact(a) => write!(f, "{a}"),
            AlphaAssertion::Interval([lo, hi]) => write!(f, "[{lo},{hi}]"),
        }
    }
}

/// A rank claim for one class, as stored in a `.claim.json` file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Claim {
    pub schema: u32,
    /// character-table name, e.g. "McL.2"
    pub group: String,
    /// the class nX of x, outer for socle index 2
    pub socle_class: String,
    pub asserted_alpha: AlphaAssertion,
    pub steps: Vec<Step>,
}

// ---------------------------------------------------------------------------
// verdicts
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Refuted,
    Incomplete,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Verified => write!(f, "verified"),
            Status::Refuted => write!(f, "refuted"),
            Status::Incomplete => write!(f, "incomplete"),
        }
    }
}

/// Trace of one executed step: every computed integer is recorded as a
/// decimal string so replays can compare traces exactly.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StepRecord {
    pub index: usize,
    pub kind: String,
    pub passed: bool,
    pub detail: String,
    #[serde(default)]
    pub recorded: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub applied_lower: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub applied_upper: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axiom: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Verdict {
    pub group: String,
    pub socle_class: String,
    pub asserted_alpha: AlphaAssertion,
    pub alpha_lower: u32,
    /// `None` means no upper bound was established
    pub alpha_upper: Option<u32>,
    pub status: Status,
    pub verified_steps: Vec<StepRecord>,
    pub axioms_assumed: Vec<String>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "claim {} {}: asserted alpha = {}",
            self.group, self.socle_class, self.asserted_alpha
        )?;
        for s in &self.verified_steps {
            let mark = if s.passed { "ok " } else { "FAIL" };
            writeln!(f, "  [{mark}] step {} {}: {}", s.index, s.kind, s.detail)?;
        }
        match self.alpha_upper {
            Some(hi) => writeln!(f, "  combined bounds: {} <= alpha <= {}", self.alpha_lower, hi)?,
            None => writeln!(f, "  combined bounds: alpha >= {}", self.alpha_lower)?,
        }
        if self.axioms_assumed.is_empty() {
            writeln!(f, "  axioms assumed: none")?;
        } else {
            writeln!(f, "  axioms assumed: {}", self.axioms_assumed.join("; "))?;
        }
        write!(f, "  status: {}", self.status)
    }
}

// ---------------------------------------------------------------------------
// verification context
// ---------------------------------------------------------------------------

/// Everything a claim's steps may reference.
pub struct VerifyContext<'a> {
    pub table: &'a CharacterTable,
    pub fusions: &'a BTreeMap<String, FusionMap>,
    pub max_data: &'a BTreeMap<String, MaximalSubgroupData>,
}

impl<'a> VerifyContext<'a> {
    fn fusion(&self, name: &str) -> Result<&'a FusionMap, CertifyError> {
        let f = self
            .fusions
            .get(name)
            .ok_or_else(|| CertifyError::UnknownFusion(name.to_string()))?;
        if f.ambient_group != self.table.group_name {
            return Err(CertifyError::FusionTargetMismatch {
                fusion: name.to_string(),
                target: f.ambient_group.clone(),
                table: self.table.group_name.clone(),
            });
        }
        Ok(f)
    }

    fn max_data(&self, name: &str) -> Result<&'a MaximalSubgroupData, CertifyError> {
        let m = self
            .max_data
            .get(name)
            .ok_or_else(|| CertifyError::UnknownMaxData(name.to_string()))?;
        if m.group_name != self.table.group_name {
            return Err(CertifyError::MaxDataGroupMismatch {
                expected: self.table.group_name.clone(),
                got: m.group_name.clone(),
            });
        }
        Ok(m)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_divides_exactly_once(p: u64, n: &BigUint) -> (bool, bool) {
    let p = BigUint::from(p);
    let divides = (n % &p).is_zero();
    let twice = divides && ((n / &p) % &p).is_zero();
    (divides, twice)
}

// ---------------------------------------------------------------------------
// step checkers
// ---------------------------------------------------------------------------

/// Outcome of one step check; bounds and axiom stay internal to the
/// verdict assembly.
pub struct StepOutcome {
    pub passed: bool,
    pub detail: String,
    pub recorded: BTreeMap<String, String>,
    lower: Option<u32>,
    upper: Option<u32>,
    axiom: Option<String>,
}

impl StepOutcome {
    fn pass(detail: String) -> Self {
        StepOutcome {
            passed: true,
            detail,
            recorded: BTreeMap::new(),
            lower: None,
            upper: None,
            axiom: None,
        }
    }

    fn fail(detail: String) -> Self {
        StepOutcome {
            passed: false,
            detail,
            recorded: BTreeMap::new(),
            lower: None,
            upper: None,
            axiom: None,
        }
    }
}

pub fn check_struct_positive(
    table: &CharacterTable,
    a: &str,
    b: &str,
    c: &str,
    expected: Option<&BigUint>,
) -> Result<StepOutcome, CertifyError> {
    let m = table.struct_const_by_name(a, b, c)?;
    let mut out = if m.is_zero() {
        StepOutcome::fail(format!("m({a},{b},{c}) = 0"))
    } else {
        match expected {
            Some(e) if *e != m => {
                StepOutcome::fail(format!("m({a},{b},{c}) = {m}, expected {e}"))
            }
            _ => StepOutcome::pass(format!("m({a},{b},{c}) = {m} > 0")),
        }
    };
    out.recorded.insert(format!("m({a},{b},{c})"), m.to_string());
    Ok(out)
}

fn check_chain_generation(
    ctx: &VerifyContext,
    socle_class: usize,
    seed_class: &str,
    intermediates: &[String],
    primes: &[u64],
    element_orders: &[u32],
    max_data_name: &str,
) -> Result<StepOutcome, CertifyError> {
    let table = ctx.table;
    let max = ctx.max_data(max_data_name)?;
    let seed = table.class_index(seed_class)?;
    if seed != socle_class {
        return Err(CertifyError::MalformedClaim(format!(
            "chain seed `{seed_class}` differs from the claim's class"
        )));
    }
    if intermediates.is_empty() {
        return Err(CertifyError::MalformedClaim("chain has no intermediate classes".into()));
    }
    let mut recorded = BTreeMap::new();

    // the generated subgroup is not inside the socle because the seed class is outer
    if table.socle_index > 1 && !table.is_outer_class(seed)? {
        return Ok(StepOutcome::fail(format!(
            "seed class `{seed_class}` lies inside the socle; the chain cannot leave it"
        )));
    }

    // chain coefficients: m(seed,seed,i0) then m(seed,i_{j},i_{j+1})
    let mut produced_orders: Vec<u32> = Vec::new();
    let mut prev = seed;
    for (j, inter) in intermediates.iter().enumerate() {
        let ci = table.class_index(inter)?;
        let (a, b) = if j == 0 { (seed, seed) } else { (seed, prev) };
        let m = table.struct_const(a, b, ci)?;
        let label = format!(
            "m({},{},{})",
            table.classes[a].name, table.classes[b].name, table.classes[ci].name
        );
        recorded.insert(label.clone(), m.to_string());
        if m.is_zero() {
            let mut out = StepOutcome::fail(format!("{label} = 0; chain breaks"));
            out.recorded = recorded;
            return Ok(out);
        }
        produced_orders.push(table.classes[ci].element_order);
        prev = ci;
    }

    // arithmetic: required primes and element orders really are forced
    for &p in primes {
        if !produced_orders.iter().any(|&o| o as u64 % p == 0) {
            let mut out = StepOutcome::fail(format!(
                "required prime {p} does not divide any produced element order {produced_orders:?}"
            ));
            out.recorded = recorded;
            return Ok(out);
        }
    }
    for &r in element_orders {
        if !produced_orders.iter().any(|&o| o % r == 0) {
            let mut out = StepOutcome::fail(format!(
                "required element order {r} does not divide any produced element order {produced_orders:?}"
            ));
            out.recorded = recorded;
            return Ok(out);
        }
    }
    recorded.insert(
        "constraints".into(),
        format!("primes {primes:?} and element orders {element_orders:?} from orders {produced_orders:?}"),
    );

    // exclusion: every maximal subgroup not inside the socle must fail a requirement
    for entry in &max.entries {
        if entry.inside_socle {
            continue;
        }
        let fails_prime = primes.iter().any(|&p| !(&entry.order % BigUint::from(p)).is_zero());
        let fails_order = element_orders
            .iter()
            .any(|r| entry.excluded_element_orders.contains(r));
        if !fails_prime && !fails_order {
            let mut out = StepOutcome::fail(format!(
                "maximal subgroup `{}` (order {}) survives every requirement",
                entry.description, entry.order
            ));
            out.recorded = recorded;
            return Ok(out);
        }
    }

    let k = intermediates.len() as u32 + 1;
    let mut out = StepOutcome::pass(format!(
        "{k} class elements generate past every maximal subgroup outside the socle; alpha <= {k}"
    ));
    out.recorded = recorded;
    out.upper = Some(k);
    Ok(out)
}

fn check_spread_step(
    ctx: &VerifyContext,
    socle_class: usize,
    prime: u64,
    citation: &str,
) -> Result<StepOutcome, CertifyError> {
    if citation.trim().is_empty() {
        return Err(CertifyError::EmptyCitation);
    }
    if !is_prime(prime) {
        return Err(CertifyError::NotPrime(prime));
    }
    let table = ctx.table;
    let socle_order = table.socle_order();
    let (divides, twice) = prime_divides_exactly_once(prime, &socle_order);
    if !divides || twice {
        return Ok(StepOutcome::fail(format!(
            "{prime} does not divide the socle order exactly once; a Sylow {prime}-subgroup of the socle is not of order {prime}"
        )));
    }
    let nx = &table.classes[socle_class].name;
    let order_p: Vec<usize> = (0..table.class_count())
        .filter(|&c| table.classes[c].element_order as u64 == prime)
        .collect();
    if order_p.is_empty() {
        return Ok(StepOutcome::fail(format!("table has no class of element order {prime}")));
    }

    // one positive coefficient suffices when the order-p classes are all
    // related by power maps (conjugate cyclic Sylow subgroups); otherwise
    // every order-p class must be positive
    let related = power_map_connected(table, &order_p);
    let mut recorded = BTreeMap::new();
    let mut positives = 0usize;
    for &c in &order_p {
        let m = table.struct_const(socle_class, socle_class, c)?;
        recorded.insert(
            format!("m({nx},{nx},{})", table.classes[c].name),
            m.to_string(),
        );
        if !m.is_zero() {
            positives += 1;
        }
    }
    let enough = if related { positives >= 1 } else { positives == order_p.len() };
    if !enough {
        let mut out = StepOutcome::fail(format!(
            "positivity holds for {positives} of {} order-{prime} classes (power-map related: {related})",
            order_p.len()
        ));
        out.recorded = recorded;
        return Ok(out);
    }
    let mut out = StepOutcome::pass(format!(
        "Sylow {prime} of the socle is cyclic of order {prime} and m({nx},{nx},p-class) > 0; partner existence per {citation}; alpha <= 3"
    ));
    out.recorded = recorded;
    out.upper = Some(3);
    out.axiom = Some(citation.to_string());
    Ok(out)
}

/// Whether the given classes form one component under stored power maps.
fn power_map_connected(table: &CharacterTable, classes: &[usize]) -> bool {
    if classes.len() <= 1 {
        return true;
    }
    let set: BTreeSet<usize> = classes.iter().copied().collect();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &c in classes {
        for target in table.classes[c].power_maps.values() {
            if let Ok(t) = table.class_index(target) {
                if set.contains(&t) && t != c {
                    adj.entry(c).or_default().push(t);
                    adj.entry(t).or_default().push(c);
                }
            }
        }
    }
    let mut seen = BTreeSet::from([classes[0]]);
    let mut stack = vec![classes[0]];
    while let Some(c) = stack.pop() {
        for &t in adj.get(&c).into_iter().flatten() {
            if seen.insert(t) {
                stack.push(t);
            }
        }
    }
    seen.len() == classes.len()
}

fn check_beamable(
    ctx: &VerifyContext,
    socle_class: usize,
    class: &str,
    citation: &str,
) -> Result<StepOutcome, CertifyError> {
    if citation.trim().is_empty() {
        return Err(CertifyError::EmptyCitation);
    }
    let table = ctx.table;
    let target = table.class_index(class)?;
    if table.socle_index > 1 && !table.is_outer_class(socle_class)? {
        return Ok(StepOutcome::fail(
            "the claim class lies inside the socle, but the cited fact pairs partners with outer elements".into(),
        ));
    }
    let nx = &table.classes[socle_class].name;
    let m = table.struct_const(socle_class, socle_class, target)?;
    let mut recorded = BTreeMap::new();
    recorded.insert(format!("m({nx},{nx},{class})"), m.to_string());
    if m.is_zero() {
        let mut out = StepOutcome::fail(format!("m({nx},{nx},{class}) = 0"));
        out.recorded = recorded;
        return Ok(out);
    }
    let mut out = StepOutcome::pass(format!(
        "m({nx},{nx},{class}) = {m} > 0 and `{class}` completes any outer element to a generating pair per {citation}; alpha <= 3"
    ));
    out.recorded = recorded;
    out.upper = Some(3);
    out.axiom = Some(citation.to_string());
    Ok(out)
}

fn brauer_inner_products(
    ctx: &VerifyContext,
    selector: &CharSelector,
    a_fusion: &str,
    b_fusion: &str,
    intersection_fusion: Option<&str>,
) -> Result<(BigUint, BigUint, BigUint, usize), CertifyError> {
    let table = ctx.table;
    let chi = table.find_character(&selector.degree, &selector.constraints())?;
    if table.principal_index() == Some(chi) {
        return Err(CertifyError::PrincipalCharacterSelected);
    }
    let fa = ctx.fusion(a_fusion)?;
    let fb = ctx.fusion(b_fusion)?;
    let pa = table.restriction_inner_product(chi, fa)?;
    let pb = table.restriction_inner_product(chi, fb)?;
    let pab = match intersection_fusion {
        Some(name) => {
            let fab = ctx.fusion(name)?;
            table.restriction_inner_product(chi, fab)?
        }
        // trivial intersection: (χ_1, 1_1) = χ(1)
        None => table.degree(chi)?,
    };
    Ok((pa, pb, pab, chi))
}

fn check_brauer(
    ctx: &VerifyContext,
    selector: &CharSelector,
    a_fusion: &str,
    b_fusion: &str,
    intersection_fusion: Option<&str>,
) -> Result<StepOutcome, CertifyError> {
    let (pa, pb, pab, chi) =
        brauer_inner_products(ctx, selector, a_fusion, b_fusion, intersection_fusion)?;
    let holds = &pa + &pb > pab;
    let detail = format!(
        "character {} of degree {}: ({a_fusion}: {pa}) + ({b_fusion}: {pb}) {} {pab}",
        chi,
        selector.degree,
        if holds { ">" } else { "<=" },
    );
    let mut out = if holds { StepOutcome::pass(detail) } else { StepOutcome::fail(detail) };
    out.recorded.insert(format!("(chi_{a_fusion},1)"), pa.to_string());
    out.recorded.insert(format!("(chi_{b_fusion},1)"), pb.to_string());
    out.recorded.insert("(chi_intersection,1)".into(), pab.to_string());
    Ok(out)
}

fn check_brauer_case_analysis(
    ctx: &VerifyContext,
    socle_class: usize,
    selector: &CharSelector,
    b_fusion: &str,
    cases: &[BrauerCase],
) -> Result<StepOutcome, CertifyError> {
    let table = ctx.table;
    let nx_name = table.classes[socle_class].name.clone();
    let identity = table.identity_class()?;

    // the B = ⟨x3⟩ fusion must be a cyclic group of order 2 whose
    // involution class fuses to nX
    let fb = ctx.fusion(b_fusion)?;
    if fb.subgroup_order != BigUint::from(2u32) {
        return Ok(StepOutcome::fail(format!(
            "B fusion `{b_fusion}` has order {}, expected the cyclic group generated by one class element",
            fb.subgroup_order
        )));
    }
    let b_fused_to_nx = fb
        .classes
        .iter()
        .enumerate()
        .any(|(k, cl)| cl.element_order == 2 && fb.assignment[k] == socle_class);
    if !b_fused_to_nx {
        return Ok(StepOutcome::fail(format!(
            "B fusion `{b_fusion}` does not fuse its involution into `{nx_name}`"
        )));
    }

    // exact coverage of product_classes(nX,nX) \ {identity}
    let products = table.product_classes(socle_class, socle_class)?;
    let mut expected: BTreeMap<usize, BigUint> = BTreeMap::new();
    for (c, m) in products {
        if c != identity {
            expected.insert(c, m);
        }
    }
    let mut recorded = BTreeMap::new();
    for (&c, m) in &expected {
        recorded.insert(
            format!("m({nx_name},{nx_name},{})", table.classes[c].name),
            m.to_string(),
        );
    }
    let mut case_classes: BTreeSet<usize> = BTreeSet::new();
    for case in cases {
        let c = table.class_index(&case.product_class)?;
        if !case_classes.insert(c) {
            let mut out = StepOutcome::fail(format!(
                "duplicate case for product class `{}`",
                case.product_class
            ));
            out.recorded = recorded;
            return Ok(out);
        }
    }
    let missing: Vec<&str> = expected
        .keys()
        .filter(|c| !case_classes.contains(c))
        .map(|&c| table.classes[c].name.as_str())
        .collect();
    if !missing.is_empty() {
        let mut out = StepOutcome::fail(format!("coverage gap: no case for {}", missing.join(", ")));
        out.recorded = recorded;
        return Ok(out);
    }
    let extra: Vec<&str> = case_classes
        .iter()
        .filter(|c| !expected.contains_key(c))
        .map(|&c| table.classes[c].name.as_str())
        .collect();
    if !extra.is_empty() {
        let mut out = StepOutcome::fail(format!(
            "cases {} are not product classes of ({nx_name},{nx_name})",
            extra.join(", ")
        ));
        out.recorded = recorded;
        return Ok(out);
    }

    // each case: A is the dihedral group on the two generators, so its
    // order is 2·|x1x2| and its classes fused to nX have total size |x1x2|
    for case in cases {
        let c = table.class_index(&case.product_class)?;
        let m = table.classes[c].element_order;
        let fa = ctx.fusion(&case.a_fusion)?;
        if fa.subgroup_order != BigUint::from(2 * m) {
            let mut out = StepOutcome::fail(format!(
                "case `{}`: A fusion `{}` has order {}, expected {} for the dihedral group on two generators with product of order {m}",
                case.product_class, case.a_fusion, fa.subgroup_order, 2 * m
            ));
            out.recorded = recorded;
            return Ok(out);
        }
        let generator_count: BigUint = fa
            .classes
            .iter()
            .enumerate()
            .filter(|(k, _)| fa.assignment[*k] == socle_class)
            .map(|(_, cl)| cl.size.clone())
            .sum();
        if generator_count != BigUint::from(m) {
            let mut out = StepOutcome::fail(format!(
                "case `{}`: A fusion `{}` fuses total size {generator_count} into `{nx_name}`, expected {m} reflections",
                case.product_class, case.a_fusion
            ));
            out.recorded = recorded;
            return Ok(out);
        }
        let (pa, pb, pab, _) =
            brauer_inner_products(ctx, selector, &case.a_fusion, b_fusion, None)?;
        recorded.insert(
            format!("case {}: (chi_A,1)+(chi_B,1) vs chi(1)", case.product_class),
            format!("{pa}+{pb} vs {pab}"),
        );
        if &pa + &pb <= pab {
            let mut out = StepOutcome::fail(format!(
                "case `{}`: {pa} + {pb} <= {pab}; Brauer inequality fails",
                case.product_class
            ));
            out.recorded = recorded;
            return Ok(out);
        }
    }

    let mut out = StepOutcome::pass(format!(
        "all {} product cases satisfy the Brauer inequality; three class elements cannot generate; alpha >= 4",
        cases.len()
    ));
    out.recorded = recorded;
    out.lower = Some(4);
    Ok(out)
}

fn check_involution_lower_bound(
    table: &CharacterTable,
    socle_class: usize,
) -> Result<StepOutcome, CertifyError> {
    let order = table.classes[socle_class].element_order;
    if order != 2 {
        return Ok(StepOutcome::fail(format!(
            "class has element order {order}; the dihedral argument needs involutions"
        )));
    }
    let mut out = StepOutcome::pass(
        "two conjugate involutions generate a dihedral group, never one containing the socle; alpha >= 3".into(),
    );
    out.lower = Some(3);
    Ok(out)
}

pub fn check_transposition_bound(
    table: &CharacterTable,
    class: &str,
    k: u32,
) -> Result<StepOutcome, CertifyError> {
    let c = table.class_index(class)?;
    let products = table.product_classes(c, c)?;
    let witnesses: Vec<String> = products
        .iter()
        .map(|(i, _)| table.classes[*i].name.clone())
        .collect();
    let offenders: Vec<String> = products
        .iter()
        .filter(|(i, _)| table.classes[*i].element_order > k)
        .map(|(i, _)| {
            format!("{} (order {})", table.classes[*i].name, table.classes[*i].element_order)
        })
        .collect();
    let mut out = if offenders.is_empty() {
        StepOutcome::pass(format!(
            "every product of two `{class}` elements has order <= {k}; witnesses: {}",
            witnesses.join(", ")
        ))
    } else {
        StepOutcome::fail(format!(
            "products of two `{class}` elements reach {}",
            offenders.join(", ")
        ))
    };
    out.recorded.insert("witnesses".into(), witnesses.join(","));
    Ok(out)
}

fn parse_conclusion(text: &str) -> Result<(Option<u32>, Option<u32>), CertifyError> {
    let bad = || CertifyError::BadConclusion(text.to_string());
    let rest = text.trim().strip_prefix("alpha").ok_or_else(bad)?.trim_start();
    let (op, rest) = if let Some(r) = rest.strip_prefix(">=") {
        (">=", r)
    } else if let Some(r) = rest.strip_prefix("<=") {
        ("<=", r)
    } else if let Some(r) = rest.strip_prefix('>') {
        (">", r)
    } else if let Some(r) = rest.strip_prefix('<') {
        ("<", r)
    } else {
        return Err(bad());
    };
    let n: u32 = rest.trim().parse().map_err(|_| bad())?;
    Ok(match op {
        ">" => (Some(n + 1), None),
        ">=" => (Some(n), None),
        "<=" => (None, Some(n)),
        "<" => {
            if n == 0 {
                return Err(bad());
            }
            (None, Some(n - 1))
        }
        _ => unreachable!(),
    })
}

fn check_classification_axiom(
    citation: &str,
    conclusion: &str,
) -> Result<StepOutcome, CertifyError> {
    if citation.trim().is_empty() {
        return Err(CertifyError::EmptyCitation);
    }
    let (lower, upper) = parse_conclusion(conclusion)?;
    let mut out = StepOutcome::pass(format!("`{conclusion}` assumed per {citation}"));
    out.lower = lower;
    out.upper = upper;
    out.axiom = Some(citation.to_string());
    Ok(out)
}

// ---------------------------------------------------------------------------
// claim verification
// ---------------------------------------------------------------------------

/// Runs every step in order, combines the surviving conclusions into an
/// interval for α, and reports the verdict with the full assumption trace.
pub fn verify_claim(claim: &Claim, ctx: &VerifyContext) -> Result<Verdict, CertifyError> {
    let (asserted_lo, asserted_hi) = claim.asserted_alpha.bounds();
    if asserted_lo > asserted_hi {
        return Err(CertifyError::MalformedClaim(format!(
            "asserted alpha bounds [{asserted_lo},{asserted_hi}] are inverted"
        )));
    }
    let socle_class = ctx.table.class_index(&claim.socle_class)?;

    // analytic floor: conjugates of one nonidentity element generate a
    // subgroup normalised by nothing useful — a single cyclic group never
    // contains a nonabelian simple socle
    let mut lower: u32 = 2;
    let mut upper: Option<u32> = None;
    let mut records = Vec::new();
    let mut axioms: Vec<String> = Vec::new();
    let mut any_failed = false;

    for (index, step) in claim.steps.iter().enumerate() {
        let outcome = match step {
            Step::StructConstPositive { a, b, c, expected } => {
                check_struct_positive(ctx.table, a, b, c, expected.as_ref())?
            }
            Step::ChainGeneration {
                seed_class,
                intermediate_classes,
                required_prime_divisors,
                required_element_orders,
                max_data,
            } => check_chain_generation(
                ctx,
                socle_class,
                seed_class,
                intermediate_classes,
                required_prime_divisors,
                required_element_orders,
                max_data,
            )?,
            Step::SpreadAxiom { prime, citation } => {
                check_spread_step(ctx, socle_class, *prime, citation)?
            }
            Step::BeamableAxiom { class, citation } => {
                check_beamable(ctx, socle_class, class, citation)?
            }
            Step::BrauerProper { character, a_fusion, b_fusion, intersection_fusion } => {
                check_brauer(ctx, character, a_fusion, b_fusion, intersection_fusion.as_deref())?
            }
            Step::BrauerCaseAnalysis { character, b_fusion, cases } => {
                check_brauer_case_analysis(ctx, socle_class, character, b_fusion, cases)?
            }
            Step::InvolutionLowerBound {} => {
                check_involution_lower_bound(ctx.table, socle_class)?
            }
            Step::TranspositionBound { k } => {
                check_transposition_bound(ctx.table, &claim.socle_class, *k)?
            }
            Step::ClassificationAxiom { citation, conclusion } => {
                check_classification_axiom(citation, conclusion)?
            }
        };
        if outcome.passed {
            if let Some(lo) = outcome.lower {
                lower = lower.max(lo);
            }
            if let Some(hi) = outcome.upper {
                upper = Some(upper.map_or(hi, |u| u.min(hi)));
            }
            if let Some(a) = &outcome.axiom {
                if !axioms.contains(a) {
                    axioms.push(a.clone());
                }
            }
        } else {
            any_failed = true;
        }
        records.push(StepRecord {
            index,
            kind: step.kind().to_string(),
            passed: outcome.passed,
            detail: outcome.detail,
            recorded: outcome.recorded,
            applied_lower: outcome.lower.filter(|_| outcome.passed),
            applied_upper: outcome.upper.filter(|_| outcome.passed),
            axiom: outcome.axiom,
        });
    }

    let status = if any_failed {
        Status::Refuted
    } else {
        let pinned = upper == Some(lower) && lower == asserted_lo && asserted_lo == asserted_hi;
        let interval_matches =
            lower == asserted_lo && upper == Some(asserted_hi);
        if pinned || interval_matches {
            Status::Verified
        } else {
            // disjoint from the asserted range contradicts the claim
            let disjoint = lower > asserted_hi || upper.is_some_and(|u| u < asserted_lo);
            if disjoint {
                Status::Refuted
            } else {
                Status::Incomplete
            }
        }
    };

    Ok(Verdict {
        group: claim.group.clone(),
        socle_class: claim.socle_class.clone(),
        asserted_alpha: claim.asserted_alpha.clone(),
        alpha_lower: lower,
        alpha_upper: upper,
        status,
        verified_steps: records,
        axioms_assumed: axioms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartab::test_tables::s3;
    use crate::chartab::SubgroupClass;
    use num_traits::One;

    fn ctx_parts() -> (CharacterTable, BTreeMap<String, FusionMap>, BTreeMap<String, MaximalSubgroupData>) {
        // S3 viewed as A3.2: transpositions are the outer class
        let mut t = s3();
        t.socle_index = 2;
        let t = CharacterTable::new("S3".into(), t.group_order, 2, t.classes, t.characters).unwrap();
        let mut fusions = BTreeMap::new();
        let z2 = FusionMap::resolve(
            "z2".into(),
            "Z2".into(),
            BigUint::from(2u32),
            vec![
                SubgroupClass { name: "1A".into(), size: BigUint::one(), element_order: 1 },
                SubgroupClass { name: "2A".into(), size: BigUint::one(), element_order: 2 },
            ],
            &BTreeMap::from([
                ("1A".to_string(), "1A".to_string()),
                ("2A".to_string(), "2A".to_string()),
            ]),
            &t,
        )
        .unwrap();
        fusions.insert("z2".to_string(), z2);
        let s3f = FusionMap::resolve(
            "s3_whole".into(),
            "S3".into(),
            BigUint::from(6u32),
            vec![
                SubgroupClass { name: "1A".into(), size: BigUint::one(), element_order: 1 },
                SubgroupClass { name: "2A".into(), size: BigUint::from(3u32), element_order: 2 },
                SubgroupClass { name: "3A".into(), size: BigUint::from(2u32), element_order: 3 },
            ],
            &BTreeMap::from([
                ("1A".to_string(), "1A".to_string()),
                ("2A".to_string(), "2A".to_string()),
                ("3A".to_string(), "3A".to_string()),
            ]),
            &t,
        )
        .unwrap();
        fusions.insert("s3_whole".to_string(), s3f);
        let max = MaximalSubgroupData {
            group_name: "S3".into(),
            entries: vec![
                MaxSubgroupEntry {
                    description: "A3".into(),
                    order: BigUint::from(3u32),
                    inside_socle: true,
                    excluded_element_orders: vec![],
                },
                MaxSubgroupEntry {
                    description: "Z2".into(),
                    order: BigUint::from(2u32),
                    inside_socle: false,
                    excluded_element_orders: vec![],
                },
            ],
        };
        (t, fusions, BTreeMap::from([("s3_max".to_string(), max)]))
    }

    #[test]
    fn spread_step_on_s3() {
        let (t, fusions, max) = ctx_parts();
        let ctx = VerifyContext { table: &t, fusions: &fusions, max_data: &max };
        let socle = t.class_index("2A").unwrap();
        // p = 3 divides |A3| = 3 exactly once and m(2A,2A,3A) = 3 > 0
        let out = check_spread_step(&ctx, socle, 3, "[GK] Prop 6.2").unwrap();
        assert!(out.passed);
        assert_eq!(out.upper, Some(3));
        assert_eq!(out.axiom.as_deref(), Some("[GK] Prop 6.2"));
        // p = 2 divides |A3|? no
        let out = check_spread_step(&ctx, socle, 2, "[GK] Prop 6.2").unwrap();
        assert!(!out.passed);
        assert!(matches!(
            check_spread_step(&ctx, socle, 4, "x"),
            Err(CertifyError::NotPrime(4))
        ));
    }

    #[test]
    fn chain_generation_on_s3() {
        let (t, fusions, max) = ctx_parts();
        let ctx = VerifyContext { table: &t, fusions: &fusions, max_data: &max };
        let socle = t.class_index("2A").unwrap();
        let out = check_chain_generation(&ctx, socle, "2A", &["3A".into()], &[3], &[], "s3_max")
            .unwrap();
        assert!(out.passed, "{}", out.detail);
        assert_eq!(out.upper, Some(2));

        // an adversarial maximal subgroup of order divisible by 3 defeats the exclusion
        let mut bad_max = max.clone();
        bad_max.get_mut("s3_max").unwrap().entries.push(MaxSubgroupEntry {
            description: "adversarial".into(),
            order: BigUint::from(6u32),
            inside_socle: false,
            excluded_element_orders: vec![],
        });
        let ctx = VerifyContext { table: &t, fusions: &fusions, max_data: &bad_max };
        let out = check_chain_generation(&ctx, socle, "2A", &["3A".into()], &[3], &[], "s3_max")
            .unwrap();
        assert!(!out.passed);
        assert!(out.detail.contains("adversarial"));
    }

    #[test]
    fn transposition_bound_on_s3() {
        let (t, ..) = ctx_parts();
        let out = check_transposition_bound(&t, "2A", 4).unwrap();
        assert!(out.passed);
        let out = check_transposition_bound(&t, "2A", 2).unwrap();
        assert!(!out.passed, "product reaches 3A");
    }

    #[test]
    fn brauer_identity_fusion_fails() {
        // A = B = whole group: (χ_G,1) = 0 for nonprincipal χ, never > χ(1)
        let (t, fusions, max) = ctx_parts();
        let ctx = VerifyContext { table: &t, fusions: &fusions, max_data: &max };
        let selector = CharSelector {
            degree: BigUint::from(2u32),
            positive_on: vec![],
            negative_on: vec![],
        };
        let out = check_brauer(&ctx, &selector, "s3_whole", "s3_whole", None).unwrap();
        assert!(!out.passed);
        // principal character is a structural error
        let principal = CharSelector {
            degree: BigUint::one(),
            positive_on: vec!["2A".into()],
            negative_on: vec![],
        };
        assert!(matches!(
            check_brauer(&ctx, &principal, "z2", "z2", None),
            Err(CertifyError::PrincipalCharacterSelected)
        ));
    }

    #[test]
    fn conclusion_parsing() {
        assert_eq!(parse_conclusion("alpha > 3").unwrap(), (Some(4), None));
        assert_eq!(parse_conclusion("alpha >= 4").unwrap(), (Some(4), None));
        assert_eq!(parse_conclusion("alpha <= 4").unwrap(), (None, Some(4)));
        assert_eq!(parse_conclusion("alpha < 5").unwrap(), (None, Some(4)));
        assert!(parse_conclusion("beta > 3").is_err());
        assert!(parse_conclusion("alpha = 3").is_err());
    }

    #[test]
    fn verify_claim_end_to_end() {
        let (t, fusions, max) = ctx_parts();
        let ctx = VerifyContext { table: &t, fusions: &fusions, max_data: &max };
        let claim = Claim {
            schema: 1,
            group: "S3".into(),
            socle_class: "2A".into(),
            asserted_alpha: AlphaAssertion::Exact(3),
            steps: vec![
                Step::StructConstPositive {
                    a: "2A".into(),
                    b: "2A".into(),
                    c: "3A".into(),
                    expected: Some(BigUint::from(3u32)),
                },
                Step::SpreadAxiom { prime: 3, citation: "[GK] Prop 6.2".into() },
                Step::InvolutionLowerBound {},
            ],
        };
        let verdict = verify_claim(&claim, &ctx).unwrap();
        assert_eq!(verdict.status, Status::Verified);
        assert_eq!(verdict.alpha_lower, 3);
        assert_eq!(verdict.alpha_upper, Some(3));
        assert_eq!(verdict.axioms_assumed, vec!["[GK] Prop 6.2".to_string()]);
        assert!(verdict.verified_steps.iter().all(|s| s.passed));

        // a wrong expected value refutes
        let mut bad = claim.clone();
        bad.steps[0] = Step::StructConstPositive {
            a: "2A".into(),
            b: "2A".into(),
            c: "3A".into(),
            expected: Some(BigUint::from(7u32)),
        };
        let verdict = verify_claim(&bad, &ctx).unwrap();
        assert_eq!(verdict.status, Status::Refuted);
        assert!(!verdict.verified_steps[0].passed);

        // dropping the upper-bound step leaves the claim incomplete
        let mut partial = claim.clone();
        partial.steps.remove(1);
        let verdict = verify_claim(&partial, &ctx).unwrap();
        assert_eq!(verdict.status, Status::Incomplete);

        // never verified with a failed step, even if bounds match
        let mut mixed = claim;
        mixed.steps.push(Step::StructConstPositive {
            a: "2A".into(),
            b: "2A".into(),
            c: "2A".into(),
            expected: None,
        });
        let verdict = verify_claim(&mixed, &ctx).unwrap();
        assert_eq!(verdict.status, Status::Refuted);
        assert!(verdict.verified_steps.iter().any(|s| !s.passed));
    }

    #[test]
    fn bound_composition_is_monotone() {
        // adding a passing step never widens the verdict interval
        let (t, fusions, max) = ctx_parts();
        let ctx = VerifyContext { table: &t, fusions: &fusions, max_data: &max };
        let base = Claim {
            schema: 1,
            group: "S3".into(),
            socle_class: "2A".into(),
            asserted_alpha: AlphaAssertion::Interval([2, 3]),
            steps: vec![Step::SpreadAxiom { prime: 3, citation: "[GK] Prop 6.2".into() }],
        };
        let v1 = verify_claim(&base, &ctx).unwrap();
        let mut more = base.clone();
        more.steps.push(Step::InvolutionLowerBound {});
        more.steps.push(Step::ClassificationAxiom {
            citation: "[RZ2] Thm 2".into(),
            conclusion: "alpha <= 4".into(),
        });
        let v2 = verify_claim(&more, &ctx).unwrap();
        assert!(v2.alpha_lower >= v1.alpha_lower);
        assert!(v2.alpha_upper.unwrap() <= v1.alpha_upper.unwrap());
    }

    #[test]
    fn claim_json_round_trip() {
        let claim = Claim {
            schema: 1,
            group: "HS.2".into(),
            socle_class: "2C".into(),
            asserted_alpha: AlphaAssertion::Exact(4),
            steps: vec![
                Step::TranspositionBound { k: 4 },
                Step::BrauerCaseAnalysis {
                    character: CharSelector {
                        degree: BigUint::from(22u32),
                        positive_on: vec!["2C".into()],
                        negative_on: vec![],
                    },
                    b_fusion: "hs2_z2_2c".into(),
                    cases: vec![BrauerCase {
                        product_class: "2A".into(),
                        a_fusion: "hs2_v4_2a".into(),
                    }],
                },
                Step::ClassificationAxiom {
                    citation: "[RZ2] Thm 2".into(),
                    conclusion: "alpha <= 4".into(),
                },
            ],
        };
        let json = serde_json::to_string_pretty(&claim).unwrap();
        let back: Claim = serde_json::from_str(&json).unwrap();
        assert_eq!(claim, back);
        assert!(json.contains("\"type\": \"transposition_bound\""));
    }
}
