//! Permutation-group engine: base/strong-generating-set machinery and the
//! brute-force oracles built on it.
//!
//! Everything here is exact. Group order and membership come from a
//! deterministic Schreier–Sims stabiliser chain; conjugacy classes, class
//! multiplication counts, rank searches and two-generated-subgroup
//! classification work by explicit enumeration below a configurable bound
//! (default 10^7 elements).
//!
//! Permutations act on `{1..degree}` in cycle notation at the boundary and
//! on `0..degree` internally. Products compose left to right: `(a·b)(x) =
//! b(a(x))`, matching the convention of published generator listings.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

/// Default ceiling for element-indexed strategies.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: u32, got: u32 },
    #[error("images do not form a permutation of 1..{degree}")]
    NotAPermutation { degree: u32 },
    #[error("cycle parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("group file error on line {line}: {message}")]
    GroupFile { line: usize, message: String },
    #[error("word syntax error at byte {position}: {message}")]
    WordSyntax { position: usize, message: String },
    #[error("unknown generator name `{0}`")]
    UnknownGenerator(String),
    #[error("enumeration bound {bound} exceeded (order {order})")]
    ResourceBound { bound: u64, order: BigUint },
    #[error("class has element order {got}, expected {expected}")]
    WrongElementOrder { expected: u32, got: u32 },
    #[error("element is the identity")]
    IdentityElement,
    #[error("element is not in the given class")]
    NotInClass,
    #[error("socle is not contained in the group")]
    SocleNotContained,
}

// ---------------------------------------------------------------------------
// permutations
// ---------------------------------------------------------------------------

/// A permutation of `{1..degree}`, stored as an image table on `0..degree`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: u32) -> Self {
        Permutation { images: (0..degree).collect() }
    }

    /// Builds from an image table on `0..degree`; validates bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let degree = images.len() as u32;
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= degree || seen[i as usize] {
                return Err(PermError::NotAPermutation { degree });
            }
            seen[i as usize] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> u32 {
        self.images.len() as u32
    }

    #[inline]
    pub fn apply(&self, point: u32) -> u32 {
        self.images[point as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| i as u32 == im)
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (i, &im) in self.images.iter().enumerate() {
            images[im as usize] = i as u32;
        }
        Permutation { images }
    }

    /// `h^{-1}·self·h`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        // (h^{-1} g h)(x) = h(g(h^{-1}(x)))
        let hinv = h.inverse();
        Permutation {
            images: (0..self.degree())
                .map(|x| h.apply(self.apply(hinv.apply(x))))
                .collect(),
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// Order as the lcm of cycle lengths.
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.images.len()];
        let mut ord: u64 = 1;
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p] as usize;
                len += 1;
            }
            ord = num_integer::lcm(ord, len);
        }
        ord
    }

    /// Nontrivial cycles, 0-based, each rotated to start at its minimum.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                seen[start] = true;
                continue;
            }
            let mut cyc = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cyc.push(p as u32);
                p = self.images[p] as usize;
            }
            out.push(cyc);
        }
        out
    }

    /// Multiset of cycle lengths (length → count), fixed points included.
    pub fn cycle_type(&self) -> BTreeMap<u32, u32> {
        let mut seen = vec![false; self.images.len()];
        let mut ct = BTreeMap::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u32;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p] as usize;
                len += 1;
            }
            *ct.entry(len).or_insert(0) += 1;
        }
        ct
    }

    /// Parses whitespace-separated disjoint cycles like `(1,2,3)(4,5)`,
    /// 1-based. `()` denotes the identity.
    pub fn parse_cycles(degree: u32, text: &str) -> Result<Self, PermError> {
        let bytes = text.as_bytes();
        let mut pos = 0;
        let mut images: Vec<u32> = (0..degree).collect();
        let mut touched = vec![false; degree as usize];
        let err = |pos: usize, message: &str| PermError::Parse { position: pos, message: message.into() };
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
                continue;
            }
            if bytes[pos] != b'(' {
                return Err(err(pos, "expected '('"));
            }
            pos += 1;
            let mut cycle: Vec<u32> = Vec::new();
            loop {
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b')' {
                    pos += 1;
                    break;
                }
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos == start {
                    return Err(err(pos, "expected point"));
                }
                let val: u64 = std::str::from_utf8(&bytes[start..pos]).unwrap().parse().unwrap_or(0);
                if val < 1 || val > degree as u64 {
                    return Err(err(start, "point out of range"));
                }
                let p = (val - 1) as u32;
                if touched[p as usize] {
                    return Err(err(start, "point repeated"));
                }
                touched[p as usize] = true;
                cycle.push(p);
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b',' {
                    pos += 1;
                }
            }
            if cycle.len() >= 2 {
                for i in 0..cycle.len() {
                    images[cycle[i] as usize] = cycle[(i + 1) % cycle.len()];
                }
            }
        }
        Ok(Permutation { images })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cyc in cycles {
            write!(f, "(")?;
            for (i, p) in cyc.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({self})")
    }
}

// ---------------------------------------------------------------------------
// stabiliser chains
// ---------------------------------------------------------------------------

struct Level {
    base_point: u32,
    gens: Vec<Permutation>,
    /// orbit point → transversal element mapping base_point to that point
    transversal: HashMap<u32, Permutation>,
}

impl Level {
    fn new(degree: u32, base_point: u32) -> Self {
        let mut transversal = HashMap::new();
        transversal.insert(base_point, Permutation::identity(degree));
        Level { base_point, gens: Vec::new(), transversal }
    }

    /// Recomputes the basic orbit under the full stabiliser generating set
    /// (this level's generators and every deeper level's, which fix the
    /// base point but can still move other orbit points).
    fn recompute_orbit(&mut self, gens: &[Permutation], degree: u32) {
        self.transversal.clear();
        self.transversal.insert(self.base_point, Permutation::identity(degree));
        let mut queue = VecDeque::from([self.base_point]);
        while let Some(p) = queue.pop_front() {
            let t_p = self.transversal[&p].clone();
            for s in gens {
                let q = s.apply(p);
                if !self.transversal.contains_key(&q) {
                    self.transversal.insert(q, t_p.compose(s));
                    queue.push_back(q);
                }
            }
        }
    }
}

/// A permutation group with a verified base and strong generating set.
pub struct PermGroup {
    degree: u32,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn trivial(degree: u32) -> Self {
        PermGroup { degree, generators: Vec::new(), levels: Vec::new() }
    }

    /// Deterministic Schreier–Sims construction.
    pub fn new(degree: u32, generators: Vec<Permutation>) -> Result<Self, PermError> {
        for g in &generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch { expected: degree, got: g.degree() });
            }
        }
        let mut group = PermGroup { degree, generators: Vec::new(), levels: Vec::new() };
        for g in &generators {
            group.extend(g.clone());
        }
        group.generators = generators.into_iter().filter(|g| !g.is_identity()).collect();
        debug_assert!(group.verify_chain());
        Ok(group)
    }

    /// Adds one generator and restores the stabiliser-chain property.
    fn extend(&mut self, g: Permutation) {
        if self.sift(&g).is_none() {
            return;
        }
        self.insert_at(0, g);
    }

    /// Generators acting at level `i`: everything registered at this level
    /// or deeper (deeper strong generators fix `base[0..i]`).
    fn gens_from(&self, i: usize) -> Vec<Permutation> {
        self.levels[i..]
            .iter()
            .flat_map(|l| l.gens.iter().cloned())
            .collect()
    }

    fn insert_at(&mut self, level: usize, g: Permutation) {
        if g.is_identity() {
            return;
        }
        if level == self.levels.len() {
            let moved = (0..self.degree).find(|&p| g.apply(p) != p).expect("non-identity");
            self.levels.push(Level::new(self.degree, moved));
        }
        self.levels[level].gens.push(g);
        // process Schreier generators until every level from the bottom of
        // the change back up to `level` is closed
        let mut i = level;
        loop {
            let gens = self.gens_from(i);
            self.levels[i].recompute_orbit(&gens, self.degree);
            let mut dirty: Option<(usize, Permutation)> = None;
            let mut points: Vec<u32> = self.levels[i].transversal.keys().copied().collect();
            points.sort_unstable();
            'outer: for p in points {
                let t_p = self.levels[i].transversal[&p].clone();
                for s in &gens {
                    let q = s.apply(p);
                    let t_q = self.levels[i].transversal[&q].clone();
                    let schreier = t_p.compose(s).compose(&t_q.inverse());
                    if let Some((residue, j)) = self.sift_from(&schreier, i + 1) {
                        dirty = Some((j, residue));
                        break 'outer;
                    }
                }
            }
            match dirty {
                Some((j, residue)) => {
                    if j == self.levels.len() {
                        let moved =
                            (0..self.degree).find(|&p| residue.apply(p) != p).expect("non-identity");
                        self.levels.push(Level::new(self.degree, moved));
                    }
                    self.levels[j].gens.push(residue);
                    i = j;
                }
                None => {
                    if i == level {
                        break;
                    }
                    i -= 1;
                }
            }
        }
    }

    /// Sifts from the top; `None` means membership.
    fn sift(&self, g: &Permutation) -> Option<(Permutation, usize)> {
        self.sift_from(g, 0)
    }

    /// Returns the residue and the level where sifting got stuck, or `None`
    /// if the element sifts to the identity.
    fn sift_from(&self, g: &Permutation, start: usize) -> Option<(Permutation, usize)> {
        let mut h = g.clone();
        for i in start..self.levels.len() {
            let level = &self.levels[i];
            let image = h.apply(level.base_point);
            match level.transversal.get(&image) {
                Some(t) => h = h.compose(&t.inverse()),
                None => return Some((h, i)),
            }
        }
        if h.is_identity() {
            None
        } else {
            Some((h, self.levels.len()))
        }
    }

    fn verify_chain(&self) -> bool {
        // the chain is valid iff at every level each generator fixes all
        // earlier base points and every Schreier generator sifts to the
        // identity through the deeper levels (Schreier's lemma)
        for (i, level) in self.levels.iter().enumerate() {
            for g in &level.gens {
                if self.levels[..i].iter().any(|prev| g.apply(prev.base_point) != prev.base_point) {
                    return false;
                }
            }
            let gens = self.gens_from(i);
            for (&p, t_p) in &level.transversal {
                for s in &gens {
                    let q = s.apply(p);
                    let Some(t_q) = level.transversal.get(&q) else {
                        return false;
                    };
                    let schreier = t_p.compose(s).compose(&t_q.inverse());
                    if self.sift_from(&schreier, i + 1).is_some() {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        let mut out = Vec::new();
        for level in &self.levels {
            for g in &level.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    pub fn basic_orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.transversal.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        let mut ord = BigUint::one();
        for level in &self.levels {
            ord *= BigUint::from(level.transversal.len());
        }
        ord
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool, PermError> {
        if p.degree() != self.degree {
            return Err(PermError::DegreeMismatch { expected: self.degree, got: p.degree() });
        }
        Ok(self.sift(p).is_none())
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> Result<bool, PermError> {
        for g in self.strong_generators() {
            if !other.contains(&g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All elements, via the unique transversal factorisation. Errors when
    /// the order exceeds `bound`.
    pub fn elements(&self, bound: u64) -> Result<Vec<Permutation>, PermError> {
        let order = self.order();
        if order > BigUint::from(bound) {
            return Err(PermError::ResourceBound { bound, order });
        }
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.transversal.len());
            let mut trans: Vec<&Permutation> = level.transversal.values().collect();
            trans.sort_unstable();
            for t in trans {
                for h in &out {
                    next.push(h.compose(t));
                }
            }
            out = next;
        }
        debug_assert_eq!(BigUint::from(out.len()), order);
        Ok(out)
    }

    /// The conjugacy class of `rep`, as an explicit conjugation orbit.
    pub fn class_of(&self, rep: &Permutation, bound: u64) -> Result<ConjClass, PermError> {
        if rep.degree() != self.degree {
            return Err(PermError::DegreeMismatch { expected: self.degree, got: rep.degree() });
        }
        let mut seen: HashSet<Permutation> = HashSet::new();
        seen.insert(rep.clone());
        let mut queue = VecDeque::from([rep.clone()]);
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let q = p.conjugate_by(g);
                if seen.insert(q.clone()) {
                    if seen.len() as u64 > bound {
                        return Err(PermError::ResourceBound { bound, order: self.order() });
                    }
                    queue.push_back(q);
                }
            }
        }
        let mut members: Vec<Permutation> = seen.into_iter().collect();
        members.sort_unstable();
        Ok(ConjClass { representative: members[0].clone(), members })
    }

    /// Full class partition by the element-indexed strategy.
    pub fn conjugacy_classes(&self, bound: u64) -> Result<Vec<ConjClass>, PermError> {
        let elements = self.elements(bound)?;
        let index: HashMap<&Permutation, usize> =
            elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut assigned = vec![false; elements.len()];
        let mut classes = Vec::new();
        let mut sorted: Vec<usize> = (0..elements.len()).collect();
        sorted.sort_unstable_by(|&a, &b| elements[a].cmp(&elements[b]));
        for start in sorted {
            if assigned[start] {
                continue;
            }
            let mut member_idx = vec![start];
            assigned[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for g in &self.generators {
                    let q = elements[i].conjugate_by(g);
                    let j = index[&q];
                    if !assigned[j] {
                        assigned[j] = true;
                        member_idx.push(j);
                        queue.push_back(j);
                    }
                }
            }
            let mut members: Vec<Permutation> =
                member_idx.into_iter().map(|i| elements[i].clone()).collect();
            members.sort_unstable();
            classes.push(ConjClass { representative: members[0].clone(), members });
        }
        classes.sort_by(|a, b| {
            (a.element_order(), a.size(), &a.representative)
                .cmp(&(b.element_order(), b.size(), &b.representative))
        });
        Ok(classes)
    }

    /// Elements commuting with `x`, as a (reduced) generator list.
    pub fn centralizer_generators(
        &self,
        x: &Permutation,
        bound: u64,
    ) -> Result<Vec<Permutation>, PermError> {
        let elements = self.elements(bound)?;
        let mut sub = PermGroup::trivial(self.degree);
        let mut gens = Vec::new();
        for e in elements {
            if e.compose(x) == x.compose(&e) && !sub.contains(&e)? {
                sub.extend(e.clone());
                gens.push(e);
            }
        }
        Ok(gens)
    }
}

// ---------------------------------------------------------------------------
// conjugacy classes
// ---------------------------------------------------------------------------

/// A conjugacy class with explicit members (sorted).
#[derive(Clone, Debug)]
pub struct ConjClass {
    pub representative: Permutation,
    pub members: Vec<Permutation>,
}

impl ConjClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn element_order(&self) -> u64 {
        self.representative.order()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.members.binary_search(p).is_ok()
    }
}

/// Exact count of pairs `(u, v)` with `u ∈ a`, `v ∈ b`, `uv = c_rep`.
pub fn brute_struct_const(a: &ConjClass, b: &ConjClass, c_rep: &Permutation) -> u64 {
    let mut count = 0;
    for u in &a.members {
        let v = u.inverse().compose(c_rep);
        if b.contains(&v) {
            count += 1;
        }
    }
    count
}

// ---------------------------------------------------------------------------
// alpha search
// ---------------------------------------------------------------------------

fn contains_socle(h: &PermGroup, socle: &PermGroup) -> bool {
    socle
        .generators()
        .iter()
        .all(|s| h.contains(s).unwrap_or(false))
}

/// Smallest `k ≤ max_k` such that some `k` conjugates of `x` in `g`
/// generate a subgroup containing `socle`; `Ok(None)` when no such `k`
/// exists within `max_k`.
///
/// The search is breadth-first over `k`. The first conjugate is fixed to
/// `x` and partial tuples are deduplicated by the generated subgroup's
/// sorted element set, the only quotient safe under the definition's
/// conjugation symmetry.
pub fn brute_alpha(
    g: &PermGroup,
    socle: &PermGroup,
    x: &Permutation,
    max_k: u32,
    bound: u64,
) -> Result<Option<u32>, PermError> {
    if x.is_identity() {
        return Err(PermError::IdentityElement);
    }
    if !contains_socle(g, socle) {
        return Err(PermError::SocleNotContained);
    }
    let class = g.class_of(x, bound)?;
    let start = PermGroup::new(g.degree(), vec![x.clone()])?;
    if contains_socle(&start, socle) {
        return Ok(Some(1));
    }
    // state: generating tuple's subgroup + its generator list
    let mut states: Vec<(PermGroup, Vec<Permutation>)> = vec![(start, vec![x.clone()])];
    let mut seen: HashSet<Vec<Permutation>> = HashSet::new();
    for k in 2..=max_k {
        let mut next: Vec<(PermGroup, Vec<Permutation>)> = Vec::new();
        for (h, gens) in &states {
            for c in &class.members {
                if h.contains(c)? {
                    continue; // adds nothing to the generated subgroup
                }
                let mut new_gens = gens.clone();
                new_gens.push(c.clone());
                let h2 = PermGroup::new(g.degree(), new_gens.clone())?;
                if contains_socle(&h2, socle) {
                    return Ok(Some(k));
                }
                let key = {
                    let mut els = h2.elements(bound)?;
                    els.sort_unstable();
                    els
                };
                if seen.insert(key) {
                    next.push((h2, new_gens));
                }
            }
        }
        states = next;
        if states.is_empty() {
            break;
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// pair machinery
// ---------------------------------------------------------------------------

fn resolve_centralizer(
    g: &PermGroup,
    fixed: &Permutation,
    supplied: Option<&[Permutation]>,
    bound: u64,
) -> Result<Vec<Permutation>, PermError> {
    match supplied {
        Some(gens) => Ok(gens.to_vec()),
        None => g.centralizer_generators(fixed, bound),
    }
}

fn centralizer_orbits(
    class: &ConjClass,
    cgens: &[Permutation],
) -> Vec<Vec<usize>> {
    let index: HashMap<&Permutation, usize> =
        class.members.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut assigned = vec![false; class.members.len()];
    let mut orbits = Vec::new();
    for start in 0..class.members.len() {
        if assigned[start] {
            continue;
        }
        assigned[start] = true;
        let mut orbit = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for c in cgens {
                let q = class.members[i].conjugate_by(c);
                let j = index[&q];
                if !assigned[j] {
                    assigned[j] = true;
                    orbit.push(j);
                    queue.push_back(j);
                }
            }
        }
        orbits.push(orbit);
    }
    orbits
}

/// Number of orbits of the centraliser of `fixed` on `class`, i.e. the
/// number of simultaneous-conjugation orbits of pairs with first entry in
/// the class.
pub fn pair_orbit_count(
    g: &PermGroup,
    class: &ConjClass,
    fixed: &Permutation,
    centralizer: Option<&[Permutation]>,
    bound: u64,
) -> Result<usize, PermError> {
    if !class.contains(fixed) {
        return Err(PermError::NotInClass);
    }
    let cgens = resolve_centralizer(g, fixed, centralizer, bound)?;
    Ok(centralizer_orbits(class, &cgens).len())
}

/// Isomorphism labels for subgroups generated by two order-3 class
/// elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairLabel {
    Z3,
    Z3xZ3,
    A4,
    SL2_3,
    A5,
    Other(u64),
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairLabel::Z3 => write!(f, "Z3"),
            PairLabel::Z3xZ3 => write!(f, "Z3xZ3"),
            PairLabel::A4 => write!(f, "A4"),
            PairLabel::SL2_3 => write!(f, "SL2(3)"),
            PairLabel::A5 => write!(f, "A5"),
            PairLabel::Other(n) => write!(f, "other({n})"),
        }
    }
}

fn order_statistics(elements: &[Permutation]) -> BTreeMap<u64, usize> {
    let mut stats = BTreeMap::new();
    for e in elements {
        *stats.entry(e.order()).or_insert(0) += 1;
    }
    stats
}

fn label_subgroup(h: &PermGroup, bound: u64) -> Result<PairLabel, PermError> {
    let order = h.order();
    let Some(n) = order.to_u64() else {
        return Err(PermError::ResourceBound { bound, order });
    };
    let label = match n {
        3 => PairLabel::Z3,
        9 => {
            // the two order-3 generators commute exactly when the subgroup
            // is elementary abelian of order 9
            if is_abelian(h) {
                PairLabel::Z3xZ3
            } else {
                PairLabel::Other(9)
            }
        }
        12 | 24 | 60 => {
            let elements = h.elements(bound)?;
            let stats = order_statistics(&elements);
            let involutions = stats.get(&2).copied().unwrap_or(0);
            let order3 = stats.get(&3).copied().unwrap_or(0);
            match n {
                12 if involutions == 3 && order3 == 8 => PairLabel::A4,
                24 if involutions == 1 && order3 == 8 => PairLabel::SL2_3,
                60 if !is_abelian(h) && center_size(h, &elements) == 1 => PairLabel::A5,
                _ => PairLabel::Other(n),
            }
        }
        other => PairLabel::Other(other),
    };
    Ok(label)
}

fn is_abelian(h: &PermGroup) -> bool {
    let gens = h.generators();
    gens.iter().enumerate().all(|(i, a)| {
        gens[i + 1..]
            .iter()
            .all(|b| a.compose(b) == b.compose(a))
    })
}

fn center_size(h: &PermGroup, elements: &[Permutation]) -> usize {
    elements
        .iter()
        .filter(|e| h.generators().iter().all(|g| e.compose(g) == g.compose(e)))
        .count()
}

/// Classifies `⟨d1, d2⟩` over one representative per pair orbit, with the
/// first coordinate fixed to the class representative. Pairs with
/// `d2 = d1^{-1}` are excluded; `d2 = d1` is kept (it contributes `Z3`).
pub fn classify_two_generated(
    g: &PermGroup,
    class: &ConjClass,
    centralizer: Option<&[Permutation]>,
    bound: u64,
) -> Result<BTreeMap<PairLabel, usize>, PermError> {
    let rep_order = class.element_order();
    if rep_order != 3 {
        return Err(PermError::WrongElementOrder { expected: 3, got: rep_order as u32 });
    }
    let t = &class.representative;
    let t_inv = t.inverse();
    let cgens = resolve_centralizer(g, t, centralizer, bound)?;
    let mut labels: BTreeMap<PairLabel, usize> = BTreeMap::new();
    for orbit in centralizer_orbits(class, &cgens) {
        let s = orbit
            .iter()
            .map(|&i| &class.members[i])
            .min()
            .expect("orbits are nonempty");
        if *s == t_inv {
            continue;
        }
        let h = PermGroup::new(g.degree(), vec![t.clone(), s.clone()])?;
        *labels.entry(label_subgroup(&h, bound)?).or_insert(0) += 1;
    }
    Ok(labels)
}

// ---------------------------------------------------------------------------
// generator words
// ---------------------------------------------------------------------------

/// Evaluates a word like `((ab^2)^3ab)^7` over named generators.
/// Juxtaposition is composition (left to right), `^` takes integer powers,
/// `*` is accepted as an explicit product sign. Names are matched longest
/// first.
pub fn word_evaluate(
    gens: &[(String, Permutation)],
    word: &str,
) -> Result<Permutation, PermError> {
    if gens.is_empty() {
        return Err(PermError::WordSyntax { position: 0, message: "no generators declared".into() });
    }
    let degree = gens[0].1.degree();
    for (_, p) in gens {
        if p.degree() != degree {
            return Err(PermError::DegreeMismatch { expected: degree, got: p.degree() });
        }
    }
    let mut names: Vec<(&str, &Permutation)> =
        gens.iter().map(|(n, p)| (n.as_str(), p)).collect();
    names.sort_by_key(|(n, _)| std::cmp::Reverse(n.len()));
    let mut parser = WordParser { bytes: word.as_bytes(), pos: 0, names: &names, degree };
    let result = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(PermError::WordSyntax { position: parser.pos, message: "unexpected input".into() });
    }
    Ok(result)
}

struct WordParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    names: &'a [(&'a str, &'a Permutation)],
    degree: u32,
}

impl<'a> WordParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_whitespace() || self.bytes[self.pos] == b'*')
        {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<Permutation, PermError> {
        let mut acc = Permutation::identity(self.degree);
        let mut any = false;
        loop {
            self.skip_ws();
            match self.bytes.get(self.pos) {
                Some(b'(') => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    self.skip_ws();
                    if self.bytes.get(self.pos) != Some(&b')') {
                        return Err(PermError::WordSyntax { position: self.pos, message: "expected ')'".into() });
                    }
                    self.pos += 1;
                    acc = acc.compose(&self.maybe_power(inner)?);
                    any = true;
                }
                Some(b')') | None => break,
                Some(_) => {
                    let name = self.match_name()?;
                    acc = acc.compose(&self.maybe_power(name)?);
                    any = true;
                }
            }
        }
        if !any {
            return Err(PermError::WordSyntax { position: self.pos, message: "empty word".into() });
        }
        Ok(acc)
    }

    fn match_name(&mut self) -> Result<Permutation, PermError> {
        for (name, perm) in self.names {
            if self.bytes[self.pos..].starts_with(name.as_bytes()) {
                self.pos += name.len();
                return Ok((*perm).clone());
            }
        }
        let rest = String::from_utf8_lossy(&self.bytes[self.pos..self.bytes.len().min(self.pos + 8)]);
        Err(PermError::WordSyntax {
            position: self.pos,
            message: format!("unknown generator at `{rest}`"),
        })
    }

    fn maybe_power(&mut self, base: Permutation) -> Result<Permutation, PermError> {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            if matches!(self.bytes.get(self.pos), Some(b'-')) {
                self.pos += 1;
            }
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == start || (self.pos == start + 1 && self.bytes[start] == b'-') {
                return Err(PermError::WordSyntax { position: self.pos, message: "expected exponent".into() });
            }
            let e: i64 = std::str::from_utf8(&self.bytes[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| PermError::WordSyntax { position: start, message: "exponent out of range".into() })?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }
}

// ---------------------------------------------------------------------------
// group files
// ---------------------------------------------------------------------------

/// Parsed `.grp` file: a `degree := n` header, `name := cycles` generator
/// lines, and optional `word name := expr` lines.
#[derive(Clone, Debug)]
pub struct GroupFile {
    pub degree: u32,
    pub generators: Vec<(String, Permutation)>,
    pub words: Vec<(String, String)>,
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self, PermError> {
        let mut degree: Option<u32> = None;
        let mut generators: Vec<(String, Permutation)> = Vec::new();
        let mut words = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((lhs, rhs)) = line.split_once(":=") else {
                return Err(PermError::GroupFile {
                    line: lineno,
                    message: "expected `name := value`".into(),
                });
            };
            let lhs = lhs.trim();
            let rhs = rhs.trim();
            if lhs == "degree" {
                let d: u32 = rhs.parse().map_err(|_| PermError::GroupFile {
                    line: lineno,
                    message: "bad degree".into(),
                })?;
                degree = Some(d);
            } else if let Some(word_name) = lhs.strip_prefix("word ") {
                words.push((word_name.trim().to_string(), rhs.to_string()));
            } else {
                let Some(d) = degree else {
                    return Err(PermError::GroupFile {
                        line: lineno,
                        message: "degree must be declared before generators".into(),
                    });
                };
                if lhs.is_empty() || !lhs.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(PermError::GroupFile {
                        line: lineno,
                        message: format!("bad generator name `{lhs}`"),
                    });
                }
                let perm = Permutation::parse_cycles(d, rhs).map_err(|e| PermError::GroupFile {
                    line: lineno,
                    message: e.to_string(),
                })?;
                generators.push((lhs.to_string(), perm));
            }
        }
        let Some(degree) = degree else {
            return Err(PermError::GroupFile { line: 0, message: "missing `degree := n` header".into() });
        };
        Ok(GroupFile { degree, generators, words })
    }

    pub fn group(&self) -> Result<PermGroup, PermError> {
        PermGroup::new(self.degree, self.generators.iter().map(|(_, p)| p.clone()).collect())
    }

    /// A named generator or declared word, evaluated.
    pub fn element(&self, name: &str) -> Result<Permutation, PermError> {
        if let Some((_, p)) = self.generators.iter().find(|(n, _)| n == name) {
            return Ok(p.clone());
        }
        if let Some((_, expr)) = self.words.iter().find(|(n, _)| n == name) {
            return word_evaluate(&self.generators, expr);
        }
        Err(PermError::UnknownGenerator(name.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(degree: u32, s: &str) -> Permutation {
        Permutation::parse_cycles(degree, s).unwrap()
    }

    fn group(degree: u32, gens: &[&str]) -> PermGroup {
        PermGroup::new(degree, gens.iter().map(|s| perm(degree, s)).collect()).unwrap()
    }

    fn s5() -> PermGroup {
        group(5, &["(1,2)", "(1,2,3,4,5)"])
    }

    fn a5() -> PermGroup {
        group(5, &["(1,2,3)", "(3,4,5)"])
    }

    #[test]
    fn cycle_round_trip() {
        let p = perm(6, "(1,2,3)(4,5)");
        assert_eq!(p.to_string(), "(1,2,3)(4,5)");
        assert_eq!(p.order(), 6);
        let q = Permutation::parse_cycles(6, &p.to_string()).unwrap();
        assert_eq!(p, q);
        assert_eq!(Permutation::identity(4).to_string(), "()");
        assert_eq!(perm(4, "()"), Permutation::identity(4));
    }

    #[test]
    fn parse_rejects_bad_cycles() {
        assert!(matches!(
            Permutation::parse_cycles(3, "(1,4)"),
            Err(PermError::Parse { .. })
        ));
        assert!(matches!(
            Permutation::parse_cycles(3, "(1,2)(2,3)"),
            Err(PermError::Parse { .. })
        ));
    }

    #[test]
    fn compose_convention() {
        // (1,2) then (2,3): 1 → 2 → 3
        let a = perm(3, "(1,2)");
        let b = perm(3, "(2,3)");
        assert_eq!(a.compose(&b).apply(0), 2);
        let c = a.conjugate_by(&b); // (1,2)^(2,3) = (1,3)
        assert_eq!(c, perm(3, "(1,3)"));
    }

    #[test]
    fn group_orders() {
        assert_eq!(s5().order(), BigUint::from(120u32));
        assert_eq!(a5().order(), BigUint::from(60u32));
        assert_eq!(group(3, &["(1,2,3)"]).order(), BigUint::from(3u32));
        assert_eq!(PermGroup::trivial(5).order(), BigUint::one());
    }

    #[test]
    fn degree_mismatch_rejected() {
        let gens = vec![perm(3, "(1,2)"), perm(4, "(1,2,3,4)")];
        assert!(matches!(
            PermGroup::new(3, gens),
            Err(PermError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn membership() {
        let a5 = a5();
        assert!(!a5.contains(&perm(5, "(1,2)")).unwrap());
        assert!(a5.contains(&perm(5, "(1,2)(3,4)")).unwrap());
        assert!(a5.contains(&perm(5, "(1,2,3,4,5)")).unwrap());
        let s5 = s5();
        assert!(s5.contains(&perm(5, "(1,2)")).unwrap());
    }

    #[test]
    fn order_equals_element_count() {
        for g in [s5(), a5(), group(4, &["(1,2)", "(3,4)"]), group(6, &["(1,2,3)(4,5,6)", "(1,4)(2,5)(3,6)"])] {
            let els = g.elements(1_000_000).unwrap();
            let distinct: HashSet<_> = els.iter().cloned().collect();
            assert_eq!(BigUint::from(distinct.len()), g.order());
        }
    }

    #[test]
    fn contains_agrees_with_enumeration_on_random_words() {
        let g = group(6, &["(1,2,3,4,5)", "(5,6)(1,2)"]);
        let els: HashSet<Permutation> = g.elements(10_000_000).unwrap().into_iter().collect();
        // deterministic pseudo-random words over the generators of S6-ish group
        let gens = [perm(6, "(1,2,3,4,5)"), perm(6, "(5,6)(1,2)"), perm(6, "(1,6)")];
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..1000 {
            let mut w = Permutation::identity(6);
            for _ in 0..8 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                w = w.compose(&gens[(state >> 33) as usize % 3]);
            }
            assert_eq!(g.contains(&w).unwrap(), els.contains(&w));
        }
    }

    #[test]
    fn conjugacy_class_sizes() {
        let s3 = group(3, &["(1,2)", "(1,2,3)"]);
        let sizes: Vec<usize> = s3.conjugacy_classes(1000).unwrap().iter().map(|c| c.size()).collect();
        assert_eq!(sizes, vec![1, 3, 2]);

        let a5 = a5();
        let mut sizes: Vec<usize> = a5.conjugacy_classes(1000).unwrap().iter().map(|c| c.size()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 12, 12, 15, 20]);
    }

    #[test]
    fn brute_struct_const_examples() {
        let s3 = group(3, &["(1,2)", "(1,2,3)"]);
        let classes = s3.conjugacy_classes(1000).unwrap();
        let c2 = classes.iter().find(|c| c.element_order() == 2).unwrap();
        let c3 = classes.iter().find(|c| c.element_order() == 3).unwrap();
        assert_eq!(brute_struct_const(c2, c2, &c3.representative), 3);

        // identity class: m(1, b, c) = [c ∈ b]
        let c1 = classes.iter().find(|c| c.element_order() == 1).unwrap();
        assert_eq!(brute_struct_const(c1, c3, &c3.representative), 1);
        assert_eq!(brute_struct_const(c1, c2, &c3.representative), 0);

        // A5: m(5A, 5A, 1) = |5A| exactly when 5A is closed under inverses
        let a5 = a5();
        let classes = a5.conjugacy_classes(100_000).unwrap();
        let fives: Vec<&ConjClass> = classes.iter().filter(|c| c.element_order() == 5).collect();
        let id = Permutation::identity(5);
        let m = brute_struct_const(fives[0], fives[0], &id);
        assert_eq!(m, 12);
    }

    #[test]
    fn word_evaluation() {
        let gens = vec![
            ("a".to_string(), perm(3, "(1,2)")),
            ("b".to_string(), perm(3, "(1,2,3)")),
        ];
        let ab2 = word_evaluate(&gens, "(ab)^2").unwrap();
        let ab = perm(3, "(1,2)").compose(&perm(3, "(1,2,3)"));
        assert_eq!(ab2, ab.compose(&ab));
        assert_eq!(word_evaluate(&gens, "a^0").unwrap(), Permutation::identity(3));
        assert_eq!(word_evaluate(&gens, "a^-1").unwrap(), perm(3, "(1,2)"));
        assert_eq!(word_evaluate(&gens, "a b").unwrap(), perm(3, "(1,2)").compose(&perm(3, "(1,2,3)")));
        assert!(matches!(word_evaluate(&gens, "ac"), Err(PermError::WordSyntax { .. })));
    }

    #[test]
    fn group_file_round_trip() {
        let text = "# sample\ndegree := 5\na := (1,2)\nb := (1,2,3,4,5)\nword t := (ab)^2\n";
        let gf = GroupFile::parse(text).unwrap();
        assert_eq!(gf.degree, 5);
        assert_eq!(gf.group().unwrap().order(), BigUint::from(120u32));
        let t = gf.element("t").unwrap();
        assert_eq!(t, gf.element("a").unwrap().compose(&gf.element("b").unwrap()).pow(2));
        assert!(matches!(gf.element("zz"), Err(PermError::UnknownGenerator(_))));
    }

    #[test]
    fn alpha_examples() {
        let a5 = a5();
        let x = perm(5, "(1,2)(3,4)");
        assert_eq!(brute_alpha(&a5, &a5, &x, 5, 100_000).unwrap(), Some(3));
        let c5 = perm(5, "(1,2,3,4,5)");
        assert_eq!(brute_alpha(&a5, &a5, &c5, 5, 100_000).unwrap(), Some(2));
        let s5 = s5();
        let t = perm(5, "(1,2)");
        assert_eq!(brute_alpha(&s5, &a5, &t, 5, 100_000).unwrap(), Some(4));
        assert!(matches!(
            brute_alpha(&a5, &a5, &Permutation::identity(5), 5, 1000),
            Err(PermError::IdentityElement)
        ));
    }

    #[test]
    fn alpha_monotone_under_powers() {
        // y a nonidentity power of x ⇒ alpha(x) ≤ alpha(y)
        let s5 = s5();
        let a5 = a5();
        let x = perm(5, "(1,2,3,4,5)");
        let ax = brute_alpha(&s5, &a5, &x, 6, 100_000).unwrap().unwrap();
        for e in [2i64, 3, 4] {
            let y = x.pow(e);
            let ay = brute_alpha(&s5, &a5, &y, 6, 100_000).unwrap().unwrap();
            assert!(ax <= ay);
        }
    }

    #[test]
    fn pair_orbits_on_a5() {
        let a5 = a5();
        let classes = a5.conjugacy_classes(100_000).unwrap();
        let c3 = classes.iter().find(|c| c.element_order() == 3).unwrap();
        let t = perm(5, "(1,2,3)");
        assert_eq!(pair_orbit_count(&a5, c3, &t, None, 100_000).unwrap(), 8);
        assert!(matches!(
            pair_orbit_count(&a5, c3, &perm(5, "(1,2)(3,4)"), None, 100_000),
            Err(PermError::NotInClass)
        ));
    }

    #[test]
    fn pair_orbits_on_s3() {
        let s3 = group(3, &["(1,2)", "(1,2,3)"]);
        let classes = s3.conjugacy_classes(1000).unwrap();
        let c3 = classes.iter().find(|c| c.element_order() == 3).unwrap();
        assert_eq!(pair_orbit_count(&s3, c3, &c3.representative, None, 1000).unwrap(), 2);
    }

    #[test]
    fn classify_pairs_a4_and_a5() {
        let a4 = group(4, &["(1,2,3)", "(2,3,4)"]);
        let classes = a4.conjugacy_classes(1000).unwrap();
        let c3 = classes.iter().find(|c| c.element_order() == 3).unwrap();
        let labels = classify_two_generated(&a4, c3, None, 1000).unwrap();
        assert!(labels.keys().all(|l| matches!(l, PairLabel::Z3 | PairLabel::A4)));

        let a5 = a5();
        let classes = a5.conjugacy_classes(100_000).unwrap();
        let c3 = classes.iter().find(|c| c.element_order() == 3).unwrap();
        let labels = classify_two_generated(&a5, c3, None, 100_000).unwrap();
        assert!(labels
            .keys()
            .all(|l| matches!(l, PairLabel::Z3 | PairLabel::A4 | PairLabel::A5)));
        assert!(labels.contains_key(&PairLabel::A5));
    }

    #[test]
    fn classify_pairs_z3xz3_degenerate() {
        // regular representation of Z3×Z3; merge all eight nontrivial
        // elements into one degenerate "class"
        let z33 = group(9, &["(1,2,3)(4,5,6)(7,8,9)", "(1,4,7)(2,5,8)(3,6,9)"]);
        let mut members: Vec<Permutation> = z33
            .elements(100)
            .unwrap()
            .into_iter()
            .filter(|p| !p.is_identity())
            .collect();
        members.sort_unstable();
        let class = ConjClass { representative: members[0].clone(), members };
        let labels = classify_two_generated(&z33, &class, None, 1000).unwrap();
        let keys: Vec<_> = labels.keys().copied().collect();
        assert_eq!(keys, vec![PairLabel::Z3, PairLabel::Z3xZ3]);

        // wrong element order is rejected
        let a4 = group(4, &["(1,2)(3,4)", "(1,3)(2,4)"]);
        let c2 = a4.conjugacy_classes(100).unwrap();
        let invol = c2.iter().find(|c| c.element_order() == 2).unwrap();
        assert!(matches!(
            classify_two_generated(&a4, invol, None, 100),
            Err(PermError::WrongElementOrder { .. })
        ));
    }

    #[test]
    fn involution_pairs_generate_dihedral() {
        // ⟨x, c⟩ for conjugate involutions is dihedral of order 2·|xc|
        let a5 = a5();
        let x = perm(5, "(1,2)(3,4)");
        let class = a5.class_of(&x, 1000).unwrap();
        for c in &class.members {
            let h = PermGroup::new(5, vec![x.clone(), c.clone()]).unwrap();
            let prod_order = x.compose(c).order();
            assert_eq!(h.order(), BigUint::from(2 * prod_order.max(1)));
        }
    }

    #[test]
    fn resource_bound_is_reported() {
        let s5 = s5();
        assert!(matches!(
            s5.elements(10),
            Err(PermError::ResourceBound { bound: 10, .. })
        ));
        assert!(matches!(
            s5.conjugacy_classes(10),
            Err(PermError::ResourceBound { .. })
        ));
    }
}
