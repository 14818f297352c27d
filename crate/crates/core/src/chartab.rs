//! Character tables: the data model, exact consistency validation, class
//! multiplication coefficients, and restriction inner products via fusion
//! maps.
//!
//! Tables are ingested from published sources and never derived here; the
//! validation battery (orthogonality relations, centralizer divisibility,
//! power-map sanity) is what stands between a corrupted data file and a
//! wrong certificate. All checks are exact — any discrepancy is data
//! corruption, so there are no tolerances.
//!
//! The class multiplication coefficient
//! `m(a,b,c) = |G|/(|C(a)||C(b)|) · Σ_χ χ(a)χ(b)χ̄(c)/χ(1)`
//! counts pairs `(u,v)` with `u ∈ a`, `v ∈ b` and `uv` a fixed
//! representative of `c`; the sum runs over the irreducible characters.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cyclo::CycloValue;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChartabError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("character index {0} out of range")]
    UnknownCharacter(usize),
    #[error("table `{table}` is structurally malformed: {message}")]
    Malformed { table: String, message: String },
    #[error("m({a},{b},{c}) is not a nonnegative integer (got {value}); table data is corrupt")]
    CorruptStructConst { a: String, b: String, c: String, value: String },
    #[error("character sum for m({a},{b},{c}) did not reduce to a rational")]
    IrrationalStructConstSum { a: String, b: String, c: String },
    #[error("inner product did not reduce to a rational")]
    IrrationalInnerProduct,
    #[error("restriction inner product is not a nonnegative integer (got {value}); fusion `{fusion}` is invalid")]
    NonIntegralRestriction { fusion: String, value: String },
    #[error("fusion `{fusion}`: subgroup class `{sub_class}` has order {sub_order} but ambient class `{ambient_class}` has order {ambient_order}")]
    FusionOrderMismatch {
        fusion: String,
        sub_class: String,
        sub_order: u32,
        ambient_class: String,
        ambient_order: u32,
    },
    #[error("fusion `{fusion}`: class sizes sum to {got}, expected subgroup order {expected}")]
    FusionSizeSum { fusion: String, got: BigUint, expected: BigUint },
    #[error("no character matches degree {degree} with the given constraints")]
    NoMatchingCharacter { degree: String },
    #[error("{count} characters match degree {degree} with the given constraints")]
    AmbiguousCharacter { degree: String, count: usize },
    #[error("class size of `{class}` is not integral")]
    NonIntegralClassSize { class: String },
    #[error("table has no unique identity class")]
    NoIdentityClass,
    #[error("table `{0}` has no sign character; cannot distinguish outer classes")]
    SignCharacterMissing(String),
    #[error("socle index {0} is not supported here (expected 1 or 2)")]
    UnsupportedSocleIndex(u32),
}

/// One conjugacy class of the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub name: String,
    /// alternative names from other published sources, e.g. "14B" for "14CD"
    pub aliases: Vec<String>,
    pub element_order: u32,
    pub centralizer_order: BigUint,
    /// prime → class name of p-th powers, when the source provides it
    pub power_maps: BTreeMap<u32, String>,
}

/// A character table with classes in source order.
#[derive(Debug)]
pub struct CharacterTable {
    pub group_name: String,
    pub group_order: BigUint,
    /// index |G : S| of the socle; 1 for simple groups
    pub socle_index: u32,
    pub classes: Vec<ClassInfo>,
    /// rows; `characters[i][j]` is the i-th irreducible on the j-th class
    pub characters: Vec<Vec<CycloValue>>,
    name_index: HashMap<String, usize>,
}

impl CharacterTable {
    pub fn new(
        group_name: String,
        group_order: BigUint,
        socle_index: u32,
        classes: Vec<ClassInfo>,
        characters: Vec<Vec<CycloValue>>,
    ) -> Result<Self, ChartabError> {
        let malformed = |message: String| ChartabError::Malformed {
            table: group_name.clone(),
            message,
        };
        if classes.is_empty() {
            return Err(malformed("table has no classes".into()));
        }
        if group_order.is_zero() {
            return Err(malformed("group order must be positive".into()));
        }
        if socle_index == 0 {
            return Err(malformed("socle index must be positive".into()));
        }
        for (i, row) in characters.iter().enumerate() {
            if row.len() != classes.len() {
                return Err(malformed(format!(
                    "character {} has {} values for {} classes",
                    i,
                    row.len(),
                    classes.len()
                )));
            }
        }
        let mut name_index = HashMap::new();
        for (j, class) in classes.iter().enumerate() {
            for name in std::iter::once(&class.name).chain(class.aliases.iter()) {
                if name_index.insert(name.clone(), j).is_some() {
                    return Err(malformed(format!("duplicate class name `{name}`")));
                }
            }
        }
        Ok(CharacterTable { group_name, group_order, socle_index, classes, characters, name_index })
    }

    /// Resolves a class name or alias.
    pub fn class_index(&self, name: &str) -> Result<usize, ChartabError> {
        self.name_index
            .get(name)
            .copied()
            .ok_or_else(|| ChartabError::UnknownClass(name.to_string()))
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_size(&self, idx: usize) -> Result<BigUint, ChartabError> {
        let class = &self.classes[idx];
        let (q, r) = self.group_order.div_rem(&class.centralizer_order);
        if !r.is_zero() {
            return Err(ChartabError::NonIntegralClassSize { class: class.name.clone() });
        }
        Ok(q)
    }

    pub fn class_size_by_name(&self, name: &str) -> Result<BigUint, ChartabError> {
        self.class_size(self.class_index(name)?)
    }

    /// The unique class of element order 1.
    pub fn identity_class(&self) -> Result<usize, ChartabError> {
        let mut it = self.classes.iter().enumerate().filter(|(_, c)| c.element_order == 1);
        match (it.next(), it.next()) {
            (Some((i, _)), None) => Ok(i),
            _ => Err(ChartabError::NoIdentityClass),
        }
    }

    /// χ(1) as a positive integer.
    pub fn degree(&self, char_idx: usize) -> Result<BigUint, ChartabError> {
        let id = self.identity_class()?;
        let row = self.characters.get(char_idx).ok_or(ChartabError::UnknownCharacter(char_idx))?;
        row[id]
            .to_integer()
            .filter(|d| d.is_positive())
            .map(|d| d.to_biguint().unwrap())
            .ok_or_else(|| ChartabError::Malformed {
                table: self.group_name.clone(),
                message: format!("character {char_idx} has a non-positive-integer degree"),
            })
    }

    /// Index of the all-ones row, if present.
    pub fn principal_index(&self) -> Option<usize> {
        let one = CycloValue::one();
        self.characters.iter().position(|row| row.iter().all(|v| *v == one))
    }

    /// Whether a class lies outside the socle. For socle index 2 the outer
    /// classes are exactly those where the sign character (the unique
    /// nonprincipal degree-1 row) takes the value −1.
    pub fn is_outer_class(&self, idx: usize) -> Result<bool, ChartabError> {
        match self.socle_index {
            1 => Ok(false),
            2 => {
                let id = self.identity_class()?;
                let minus_one = CycloValue::from_integer(-1);
                let one = CycloValue::one();
                let sign_row = self
                    .characters
                    .iter()
                    .find(|row| {
                        row[id] == one
                            && row.iter().all(|v| *v == one || *v == minus_one)
                            && row.iter().any(|v| *v == minus_one)
                    })
                    .ok_or_else(|| ChartabError::SignCharacterMissing(self.group_name.clone()))?;
                Ok(sign_row[idx] == minus_one)
            }
            other => Err(ChartabError::UnsupportedSocleIndex(other)),
        }
    }

    pub fn socle_order(&self) -> BigUint {
        &self.group_order / BigUint::from(self.socle_index)
    }

    // -- validation ---------------------------------------------------------

    /// Exact consistency report; empty iff the table satisfies every
    /// invariant. Violations are report entries, never panics or errors.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let n = self.classes.len();

        if self.characters.len() != n {
            issues.push(ValidationIssue::CharacterCount {
                characters: self.characters.len(),
                classes: n,
            });
        }

        if !(&self.group_order % BigUint::from(self.socle_index)).is_zero() {
            issues.push(ValidationIssue::SocleIndexDoesNotDivide { socle_index: self.socle_index });
        }

        for class in &self.classes {
            if class.element_order == 0
                || !(&self.group_order % BigUint::from(class.element_order)).is_zero()
            {
                issues.push(ValidationIssue::ElementOrder { class: class.name.clone() });
            }
            if class.centralizer_order.is_zero()
                || !(&self.group_order % &class.centralizer_order).is_zero()
            {
                issues.push(ValidationIssue::CentralizerOrder { class: class.name.clone() });
            }
            for (&p, target) in &class.power_maps {
                match self.name_index.get(target) {
                    None => issues.push(ValidationIssue::PowerMapTarget {
                        class: class.name.clone(),
                        prime: p,
                        target: target.clone(),
                    }),
                    Some(&t) => {
                        let m = class.element_order;
                        let expected = m / m.gcd(&p);
                        let got = self.classes[t].element_order;
                        if got != expected {
                            issues.push(ValidationIssue::PowerMapOrder {
                                class: class.name.clone(),
                                prime: p,
                                target: target.clone(),
                                expected_order: expected,
                                got_order: got,
                            });
                        }
                    }
                }
            }
        }

        let ident_count = self.classes.iter().filter(|c| c.element_order == 1).count();
        if ident_count != 1 {
            issues.push(ValidationIssue::IdentityClassCount { count: ident_count });
        }

        // class sizes integral and summing to |G|
        let mut size_sum = BigUint::zero();
        let mut sizes_ok = true;
        for (j, class) in self.classes.iter().enumerate() {
            match self.class_size(j) {
                Ok(s) => size_sum += s,
                Err(_) => {
                    sizes_ok = false;
                    issues.push(ValidationIssue::ClassSizeNotIntegral { class: class.name.clone() });
                }
            }
        }
        if sizes_ok && size_sum != self.group_order {
            issues.push(ValidationIssue::ClassSizeSum { sum: size_sum });
        }

        // principal character and degree sum
        if self.characters.len() == n {
            let principal_count = {
                let one = CycloValue::one();
                self.characters.iter().filter(|row| row.iter().all(|v| *v == one)).count()
            };
            if principal_count != 1 {
                issues.push(ValidationIssue::PrincipalCharacterCount { count: principal_count });
            }
            if let Ok(id) = self.identity_class() {
                let mut sum = BigUint::zero();
                let mut degrees_ok = true;
                for (i, row) in self.characters.iter().enumerate() {
                    match row[id].to_integer().filter(|d| d.is_positive()) {
                        Some(d) => {
                            let d = d.to_biguint().unwrap();
                            sum += &d * &d;
                        }
                        None => {
                            degrees_ok = false;
                            issues.push(ValidationIssue::DegreeNotPositiveInteger { char_index: i });
                        }
                    }
                }
                if degrees_ok && sum != self.group_order {
                    issues.push(ValidationIssue::DegreeSquareSum { sum });
                }
            }

            // column orthogonality: Σ_χ χ(a)·conj(χ(b)) = δ_{ab}·|C(a)|
            for a in 0..n {
                for b in a..n {
                    let mut sum = CycloValue::zero();
                    for row in &self.characters {
                        sum = sum.add(&row[a].mul(&row[b].conjugate()));
                    }
                    let expected = if a == b {
                        CycloValue::from_bigint(BigInt::from(self.classes[a].centralizer_order.clone()))
                    } else {
                        CycloValue::zero()
                    };
                    if sum != expected {
                        issues.push(ValidationIssue::ColumnOrthogonality {
                            class_a: self.classes[a].name.clone(),
                            class_b: self.classes[b].name.clone(),
                            got: sum.to_string(),
                        });
                    }
                }
            }

            // row orthogonality: Σ_c |c^G|·χ(c)·conj(ψ(c)) = δ_{χψ}·|G|
            if sizes_ok {
                let sizes: Vec<CycloValue> = (0..n)
                    .map(|j| CycloValue::from_bigint(BigInt::from(self.class_size(j).unwrap())))
                    .collect();
                for i in 0..self.characters.len() {
                    for j in i..self.characters.len() {
                        let mut sum = CycloValue::zero();
                        for c in 0..n {
                            let term = self.characters[i][c]
                                .mul(&self.characters[j][c].conjugate())
                                .mul(&sizes[c]);
                            sum = sum.add(&term);
                        }
                        let expected = if i == j {
                            CycloValue::from_bigint(BigInt::from(self.group_order.clone()))
                        } else {
                            CycloValue::zero()
                        };
                        if sum != expected {
                            issues.push(ValidationIssue::RowOrthogonality {
                                char_a: i,
                                char_b: j,
                                got: sum.to_string(),
                            });
                        }
                    }
                }
            }
        }

        ValidationReport { issues }
    }

    // -- structure constants -------------------------------------------------

    fn scaled_count(
        &self,
        a: usize,
        b: usize,
        c: usize,
        sum: &CycloValue,
    ) -> Result<BigUint, ChartabError> {
        let names = || {
            (
                self.classes[a].name.clone(),
                self.classes[b].name.clone(),
                self.classes[c].name.clone(),
            )
        };
        let Some(sum) = sum.to_rational() else {
            let (a, b, c) = names();
            return Err(ChartabError::IrrationalStructConstSum { a, b, c });
        };
        let g = BigRational::from(BigInt::from(self.group_order.clone()));
        let ca = BigInt::from(self.classes[a].centralizer_order.clone());
        let cb = BigInt::from(self.classes[b].centralizer_order.clone());
        let m = sum * g / BigRational::from(ca * cb);
        if !m.is_integer() || m.is_negative() {
            let (a, b, c) = names();
            return Err(ChartabError::CorruptStructConst { a, b, c, value: m.to_string() });
        }
        Ok(m.to_integer().to_biguint().unwrap())
    }

    /// Exact class multiplication coefficient `m(a,b,c)`.
    pub fn struct_const(&self, a: usize, b: usize, c: usize) -> Result<BigUint, ChartabError> {
        let mut sum = CycloValue::zero();
        let id = self.identity_class()?;
        for row in &self.characters {
            let term = row[a].mul(&row[b]).mul(&row[c].conjugate());
            let deg = row[id].to_rational().ok_or_else(|| ChartabError::Malformed {
                table: self.group_name.clone(),
                message: "non-rational character degree".into(),
            })?;
            sum = sum.add(&term.mul(&CycloValue::from_rational(deg.recip())));
        }
        self.scaled_count(a, b, c, &sum)
    }

    pub fn struct_const_by_name(&self, a: &str, b: &str, c: &str) -> Result<BigUint, ChartabError> {
        self.struct_const(self.class_index(a)?, self.class_index(b)?, self.class_index(c)?)
    }

    /// `m(a,b,c)` for all classes `b` at once, sharing the per-character
    /// weight `χ(a)·χ̄(c)/χ(1)` across the row.
    pub fn struct_const_row(&self, a: usize, c: usize) -> Result<Vec<BigUint>, ChartabError> {
        let id = self.identity_class()?;
        let weights: Vec<CycloValue> = self
            .characters
            .iter()
            .map(|row| {
                let deg = row[id].to_rational().expect("validated degree");
                row[a]
                    .mul(&row[c].conjugate())
                    .mul(&CycloValue::from_rational(deg.recip()))
            })
            .collect();
        (0..self.classes.len())
            .map(|b| {
                let mut sum = CycloValue::zero();
                for (row, w) in self.characters.iter().zip(&weights) {
                    sum = sum.add(&w.mul(&row[b]));
                }
                self.scaled_count(a, b, c, &sum)
            })
            .collect()
    }

    /// All classes `c` with `m(a,b,c) > 0`, with their exact coefficients.
    pub fn product_classes(&self, a: usize, b: usize) -> Result<Vec<(usize, BigUint)>, ChartabError> {
        let id = self.identity_class()?;
        let weights: Vec<CycloValue> = self
            .characters
            .iter()
            .map(|row| {
                let deg = row[id].to_rational().expect("validated degree");
                row[a].mul(&row[b]).mul(&CycloValue::from_rational(deg.recip()))
            })
            .collect();
        let mut out = Vec::new();
        for c in 0..self.classes.len() {
            let mut sum = CycloValue::zero();
            for (row, w) in self.characters.iter().zip(&weights) {
                sum = sum.add(&w.mul(&row[c].conjugate()));
            }
            let m = self.scaled_count(a, b, c, &sum)?;
            if !m.is_zero() {
                out.push((c, m));
            }
        }
        Ok(out)
    }

    pub fn product_classes_by_name(&self, a: &str, b: &str) -> Result<Vec<(usize, BigUint)>, ChartabError> {
        self.product_classes(self.class_index(a)?, self.class_index(b)?)
    }

    // -- inner products ------------------------------------------------------

    /// `(χ, ψ) = (1/|G|) Σ_c |c^G|·χ(c)·conj(ψ(c))`, as an exact rational.
    pub fn inner_product(&self, chi: usize, psi: usize) -> Result<BigRational, ChartabError> {
        let chi_row = self.characters.get(chi).ok_or(ChartabError::UnknownCharacter(chi))?;
        let psi_row = self.characters.get(psi).ok_or(ChartabError::UnknownCharacter(psi))?;
        self.inner_product_rows(chi_row, psi_row)
    }

    /// Inner product of two arbitrary class functions given as value rows.
    pub fn inner_product_rows(
        &self,
        chi: &[CycloValue],
        psi: &[CycloValue],
    ) -> Result<BigRational, ChartabError> {
        let mut sum = CycloValue::zero();
        for c in 0..self.classes.len() {
            let size = CycloValue::from_bigint(BigInt::from(self.class_size(c)?));
            sum = sum.add(&chi[c].mul(&psi[c].conjugate()).mul(&size));
        }
        let q = sum.to_rational().ok_or(ChartabError::IrrationalInnerProduct)?;
        Ok(q / BigRational::from(BigInt::from(self.group_order.clone())))
    }

    /// Multiplicity of the principal character in the restriction of `χ`
    /// along a fusion: `(χ_A, 1_A) = (1/|A|) Σ_k |k|·χ(f(k))`.
    pub fn restriction_inner_product(
        &self,
        char_idx: usize,
        fusion: &FusionMap,
    ) -> Result<BigUint, ChartabError> {
        let row = self.characters.get(char_idx).ok_or(ChartabError::UnknownCharacter(char_idx))?;
        let mut sum = CycloValue::zero();
        for (k, class) in fusion.classes.iter().enumerate() {
            let size = CycloValue::from_bigint(BigInt::from(class.size.clone()));
            sum = sum.add(&row[fusion.assignment[k]].mul(&size));
        }
        let non_integral = |value: String| ChartabError::NonIntegralRestriction {
            fusion: fusion.name.clone(),
            value,
        };
        let q = sum.to_rational().ok_or_else(|| non_integral(sum.to_string()))?;
        let q = q / BigRational::from(BigInt::from(fusion.subgroup_order.clone()));
        if !q.is_integer() || q.is_negative() {
            return Err(non_integral(q.to_string()));
        }
        Ok(q.to_integer().to_biguint().unwrap())
    }

    // -- character selection --------------------------------------------------

    /// The unique row with the given degree satisfying all constraints.
    /// Sign constraints match only rational values.
    pub fn find_character(
        &self,
        degree: &BigUint,
        constraints: &[(String, CharConstraint)],
    ) -> Result<usize, ChartabError> {
        let id = self.identity_class()?;
        let degree_value = CycloValue::from_bigint(BigInt::from(degree.clone()));
        let mut resolved = Vec::with_capacity(constraints.len());
        for (name, c) in constraints {
            resolved.push((self.class_index(name)?, c));
        }
        let matches: Vec<usize> = (0..self.characters.len())
            .filter(|&i| {
                let row = &self.characters[i];
                if row[id] != degree_value {
                    return false;
                }
                resolved.iter().all(|&(j, c)| match c {
                    CharConstraint::Positive => {
                        row[j].to_rational().is_some_and(|q| q.is_positive())
                    }
                    CharConstraint::Negative => {
                        row[j].to_rational().is_some_and(|q| q.is_negative())
                    }
                    CharConstraint::Value(v) => row[j] == *v,
                })
            })
            .collect();
        match matches.len() {
            0 => Err(ChartabError::NoMatchingCharacter { degree: degree.to_string() }),
            1 => Ok(matches[0]),
            count => Err(ChartabError::AmbiguousCharacter { degree: degree.to_string(), count }),
        }
    }
}

/// Constraint on a character value at a named class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharConstraint {
    Positive,
    Negative,
    Value(CycloValue),
}

// ---------------------------------------------------------------------------
// validation report
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationIssue {
    CharacterCount { characters: usize, classes: usize },
    SocleIndexDoesNotDivide { socle_index: u32 },
    ElementOrder { class: String },
    CentralizerOrder { class: String },
    PowerMapTarget { class: String, prime: u32, target: String },
    PowerMapOrder { class: String, prime: u32, target: String, expected_order: u32, got_order: u32 },
    IdentityClassCount { count: usize },
    ClassSizeNotIntegral { class: String },
    ClassSizeSum { sum: BigUint },
    PrincipalCharacterCount { count: usize },
    DegreeNotPositiveInteger { char_index: usize },
    DegreeSquareSum { sum: BigUint },
    ColumnOrthogonality { class_a: String, class_b: String, got: String },
    RowOrthogonality { char_a: usize, char_b: usize, got: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::CharacterCount { characters, classes } => {
                write!(f, "{characters} characters for {classes} classes")
            }
            ValidationIssue::SocleIndexDoesNotDivide { socle_index } => {
                write!(f, "socle index {socle_index} does not divide the group order")
            }
            ValidationIssue::ElementOrder { class } => {
                write!(f, "element order of `{class}` does not divide the group order")
            }
            ValidationIssue::CentralizerOrder { class } => {
                write!(f, "centralizer order of `{class}` does not divide the group order")
            }
            ValidationIssue::PowerMapTarget { class, prime, target } => {
                write!(f, "power map {prime} of `{class}` names missing class `{target}`")
            }
            ValidationIssue::PowerMapOrder { class, prime, target, expected_order, got_order } => {
                write!(
                    f,
                    "power map {prime} of `{class}` targets `{target}` of order {got_order}, expected {expected_order}"
                )
            }
            ValidationIssue::IdentityClassCount { count } => {
                write!(f, "{count} classes of element order 1")
            }
            ValidationIssue::ClassSizeNotIntegral { class } => {
                write!(f, "centralizer order of `{class}` does not divide the group order exactly")
            }
            ValidationIssue::ClassSizeSum { sum } => {
                write!(f, "class sizes sum to {sum}, not the group order")
            }
            ValidationIssue::PrincipalCharacterCount { count } => {
                write!(f, "{count} principal (all-ones) characters")
            }
            ValidationIssue::DegreeNotPositiveInteger { char_index } => {
                write!(f, "character {char_index} has a non-positive-integer degree")
            }
            ValidationIssue::DegreeSquareSum { sum } => {
                write!(f, "degrees square-sum to {sum}, not the group order")
            }
            ValidationIssue::ColumnOrthogonality { class_a, class_b, got } => {
                write!(f, "column orthogonality fails for ({class_a},{class_b}): got {got}")
            }
            ValidationIssue::RowOrthogonality { char_a, char_b, got } => {
                write!(f, "row orthogonality fails for characters ({char_a},{char_b}): got {got}")
            }
        }
    }
}

/// Outcome of [`CharacterTable::validate`]; empty iff consistent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "consistent");
        }
        for issue in &self.issues {
            writeln!(f, "- {issue}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// fusion maps
// ---------------------------------------------------------------------------

/// One conjugacy class of a subgroup given without characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupClass {
    pub name: String,
    pub size: BigUint,
    pub element_order: u32,
}

/// Assignment of a subgroup's classes to ambient-group classes. Only the
/// subgroup's class sizes and element orders are needed to compute
/// restriction inner products, so no subgroup characters are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionMap {
    pub name: String,
    pub ambient_group: String,
    pub subgroup_name: String,
    pub subgroup_order: BigUint,
    pub classes: Vec<SubgroupClass>,
    /// per subgroup class, the ambient class index
    pub assignment: Vec<usize>,
}

impl FusionMap {
    /// Resolves named assignments against a table, checking that element
    /// orders are preserved and class sizes sum to the subgroup order.
    pub fn resolve(
        name: String,
        subgroup_name: String,
        subgroup_order: BigUint,
        classes: Vec<SubgroupClass>,
        assignment_by_name: &BTreeMap<String, String>,
        table: &CharacterTable,
    ) -> Result<Self, ChartabError> {
        let mut assignment = Vec::with_capacity(classes.len());
        let mut size_sum = BigUint::zero();
        for class in &classes {
            let target_name = assignment_by_name.get(&class.name).ok_or_else(|| {
                ChartabError::Malformed {
                    table: name.clone(),
                    message: format!("fusion has no assignment for subgroup class `{}`", class.name),
                }
            })?;
            let target = table.class_index(target_name)?;
            if table.classes[target].element_order != class.element_order {
                return Err(ChartabError::FusionOrderMismatch {
                    fusion: name,
                    sub_class: class.name.clone(),
                    sub_order: class.element_order,
                    ambient_class: table.classes[target].name.clone(),
                    ambient_order: table.classes[target].element_order,
                });
            }
            size_sum += &class.size;
            assignment.push(target);
        }
        if size_sum != subgroup_order {
            return Err(ChartabError::FusionSizeSum {
                fusion: name,
                got: size_sum,
                expected: subgroup_order,
            });
        }
        Ok(FusionMap {
            name,
            ambient_group: table.group_name.clone(),
            subgroup_name,
            subgroup_order,
            classes,
            assignment,
        })
    }

    /// The identity fusion of a table into itself.
    pub fn identity(table: &CharacterTable) -> Result<Self, ChartabError> {
        let mut classes = Vec::new();
        let mut assignment = Vec::new();
        for (j, class) in table.classes.iter().enumerate() {
            classes.push(SubgroupClass {
                name: class.name.clone(),
                size: table.class_size(j)?,
                element_order: class.element_order,
            });
            assignment.push(j);
        }
        Ok(FusionMap {
            name: format!("identity:{}", table.group_name),
            ambient_group: table.group_name.clone(),
            subgroup_name: table.group_name.clone(),
            subgroup_order: table.group_order.clone(),
            classes,
            assignment,
        })
    }

    /// The fusion of the trivial subgroup.
    pub fn trivial(table: &CharacterTable) -> Result<Self, ChartabError> {
        let id = table.identity_class()?;
        Ok(FusionMap {
            name: format!("trivial:{}", table.group_name),
            ambient_group: table.group_name.clone(),
            subgroup_name: "1".into(),
            subgroup_order: BigUint::one(),
            classes: vec![SubgroupClass {
                name: "1A".into(),
                size: BigUint::one(),
                element_order: 1,
            }],
            assignment: vec![id],
        })
    }
}

#[cfg(test)]
pub(crate) mod test_tables {
    use super::*;

    fn cy(s: &str) -> CycloValue {
        CycloValue::parse(s).unwrap()
    }

    /// Hand-written textbook table of S3: classes 1A, 2A, 3A; degrees 1, 1, 2.
    pub fn s3() -> CharacterTable {
        CharacterTable::new(
            "S3".into(),
            BigUint::from(6u32),
            1,
            vec![
                ClassInfo {
                    name: "1A".into(),
                    aliases: vec![],
                    element_order: 1,
                    centralizer_order: BigUint::from(6u32),
                    power_maps: BTreeMap::new(),
                },
                ClassInfo {
                    name: "2A".into(),
                    aliases: vec![],
                    element_order: 2,
                    centralizer_order: BigUint::from(2u32),
                    power_maps: BTreeMap::from([(2, "1A".into()), (3, "2A".into())]),
                },
                ClassInfo {
                    name: "3A".into(),
                    aliases: vec![],
                    element_order: 3,
                    centralizer_order: BigUint::from(3u32),
                    power_maps: BTreeMap::from([(2, "3A".into()), (3, "1A".into())]),
                },
            ],
            vec![
                vec![cy("1"), cy("1"), cy("1")],
                vec![cy("1"), cy("-1"), cy("1")],
                vec![cy("2"), cy("0"), cy("-1")],
            ],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_tables::s3;
    use super::*;

    fn cy(s: &str) -> CycloValue {
        CycloValue::parse(s).unwrap()
    }

    #[test]
    fn s3_is_consistent() {
        let t = s3();
        let report = t.validate();
        assert!(report.is_empty(), "unexpected issues:\n{report}");
    }

    #[test]
    fn perturbation_is_detected_and_named() {
        let mut t = s3();
        // bump χ₂(2A) by +1
        t.characters[2][1] = t.characters[2][1].add(&CycloValue::one());
        let report = t.validate();
        assert!(!report.is_empty());
        assert!(report.issues.iter().any(|i| matches!(
            i,
            ValidationIssue::ColumnOrthogonality { class_a, class_b, .. }
                if class_a == "2A" || class_b == "2A"
        )));
    }

    #[test]
    fn class_sizes() {
        let t = s3();
        assert_eq!(t.class_size_by_name("2A").unwrap(), BigUint::from(3u32));
        assert_eq!(t.class_size_by_name("1A").unwrap(), BigUint::from(1u32));
        assert!(matches!(
            t.class_size_by_name("5X"),
            Err(ChartabError::UnknownClass(_))
        ));
    }

    #[test]
    fn struct_consts_on_s3() {
        let t = s3();
        assert_eq!(t.struct_const_by_name("2A", "2A", "3A").unwrap(), BigUint::from(3u32));
        // with u forced to the identity, v is pinned to the fixed
        // representative: m(1A, b, c) = 1 iff b = c else 0
        assert_eq!(t.struct_const_by_name("1A", "2A", "2A").unwrap(), BigUint::one());
        assert_eq!(t.struct_const_by_name("1A", "2A", "3A").unwrap(), BigUint::zero());
        // symmetry in the first two arguments
        assert_eq!(
            t.struct_const_by_name("2A", "3A", "2A").unwrap(),
            t.struct_const_by_name("3A", "2A", "2A").unwrap()
        );
    }

    #[test]
    fn struct_const_row_sums_to_class_size() {
        let t = s3();
        for a in 0..3 {
            for c in 0..3 {
                let row = t.struct_const_row(a, c).unwrap();
                let sum: BigUint = row.into_iter().sum();
                assert_eq!(sum, t.class_size(a).unwrap());
            }
        }
    }

    #[test]
    fn product_classes_on_s3() {
        let t = s3();
        let products = t.product_classes_by_name("3A", "3A").unwrap();
        let named: Vec<(String, BigUint)> = products
            .into_iter()
            .map(|(c, m)| (t.classes[c].name.clone(), m))
            .collect();
        // (xy) for x,y 3-cycles: 2 pairs hit identity, 1 pair per 3A rep
        assert_eq!(
            named,
            vec![("1A".to_string(), BigUint::from(2u32)), ("3A".to_string(), BigUint::from(1u32))]
        );
        let prod_1a = t.product_classes_by_name("1A", "2A").unwrap();
        assert_eq!(prod_1a, vec![(1, BigUint::one())]);
    }

    #[test]
    fn inner_products_orthonormal() {
        let t = s3();
        for i in 0..3 {
            for j in 0..3 {
                let got = t.inner_product(i, j).unwrap();
                let expected = if i == j { BigRational::one() } else { BigRational::zero() };
                assert_eq!(got, expected);
            }
        }
        // linearity: regular character = Σ deg·χ has (reg, 1) = 1
        let reg: Vec<CycloValue> = (0..3)
            .map(|c| {
                let mut sum = CycloValue::zero();
                for row in &t.characters {
                    let deg = row[0].clone();
                    sum = sum.add(&deg.mul(&row[c]));
                }
                sum
            })
            .collect();
        assert_eq!(t.inner_product_rows(&reg, &t.characters[0]).unwrap(), BigRational::one());
    }

    #[test]
    fn find_character_on_s3() {
        let t = s3();
        assert_eq!(t.find_character(&BigUint::from(2u32), &[]).unwrap(), 2);
        assert!(matches!(
            t.find_character(&BigUint::from(1u32), &[]),
            Err(ChartabError::AmbiguousCharacter { count: 2, .. })
        ));
        assert!(matches!(
            t.find_character(&BigUint::from(7u32), &[]),
            Err(ChartabError::NoMatchingCharacter { .. })
        ));
        let idx = t
            .find_character(
                &BigUint::from(1u32),
                &[("2A".into(), CharConstraint::Negative)],
            )
            .unwrap();
        assert_eq!(idx, 1);
        let idx = t
            .find_character(
                &BigUint::from(2u32),
                &[("3A".into(), CharConstraint::Value(cy("-1")))],
            )
            .unwrap();
        assert_eq!(idx, 2);
    }

    #[test]
    fn identity_fusion_restriction() {
        let t = s3();
        let f = FusionMap::identity(&t).unwrap();
        assert_eq!(
            t.restriction_inner_product(0, &f).unwrap(),
            BigUint::one()
        );
        // nonprincipal characters restrict with multiplicity 0
        assert_eq!(t.restriction_inner_product(2, &f).unwrap(), BigUint::zero());
    }

    #[test]
    fn fusion_validation() {
        let t = s3();
        // Z2 = ⟨transposition⟩ fused into S3
        let classes = vec![
            SubgroupClass { name: "1A".into(), size: BigUint::one(), element_order: 1 },
            SubgroupClass { name: "2A".into(), size: BigUint::one(), element_order: 2 },
        ];
        let assignment =
            BTreeMap::from([("1A".to_string(), "1A".to_string()), ("2A".to_string(), "2A".to_string())]);
        let f = FusionMap::resolve(
            "z2".into(),
            "Z2".into(),
            BigUint::from(2u32),
            classes.clone(),
            &assignment,
            &t,
        )
        .unwrap();
        // (χ_2 restricted to Z2, 1) = (2 + 0)/2 = 1
        assert_eq!(t.restriction_inner_product(2, &f).unwrap(), BigUint::one());

        // element-order mismatch is rejected
        let bad = BTreeMap::from([("1A".to_string(), "1A".to_string()), ("2A".to_string(), "3A".to_string())]);
        assert!(matches!(
            FusionMap::resolve("z2".into(), "Z2".into(), BigUint::from(2u32), classes.clone(), &bad, &t),
            Err(ChartabError::FusionOrderMismatch { .. })
        ));

        // size sum mismatch is rejected
        let shrunk = vec![classes[0].clone()];
        let partial = BTreeMap::from([("1A".to_string(), "1A".to_string())]);
        assert!(matches!(
            FusionMap::resolve("z2".into(), "Z2".into(), BigUint::from(2u32), shrunk, &partial, &t),
            Err(ChartabError::FusionSizeSum { .. })
        ));
    }

    #[test]
    fn outer_class_detection() {
        // S3 with socle A3: the sign character marks transpositions as outer
        let mut t = s3();
        t.socle_index = 2;
        assert!(!t.is_outer_class(0).unwrap());
        assert!(t.is_outer_class(1).unwrap());
        assert!(!t.is_outer_class(2).unwrap());
        assert_eq!(t.socle_order(), BigUint::from(3u32));
    }

    #[test]
    fn alias_resolution() {
        let mut t = s3();
        t.classes[2].aliases.push("3X".into());
        let t = CharacterTable::new(
            t.group_name,
            t.group_order,
            t.socle_index,
            t.classes,
            t.characters,
        )
        .unwrap();
        assert_eq!(t.class_index("3X").unwrap(), 2);
        assert_eq!(t.class_index("3A").unwrap(), 2);
    }
}
