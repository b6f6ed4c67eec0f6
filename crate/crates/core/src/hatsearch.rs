//! Search for hat systems: candidate bases satisfying (Q) inside the residue
//! universe, then (P) as an exact cover of that universe by quotient sets.
//!
//! Symmetry constraints come in three modes:
//! - `stabilize`: every generator α fixes each hat, α(D̂) = D̂. Such a D
//!   satisfies α(D) = D·d⁻¹ for some d ∈ D, i.e. D is a union of cycles of
//!   x ↦ α(x)·d, which is how these candidates are enumerated.
//! - `permute`: rows are orbits of hats of a given length under the
//!   generated group, with pairwise disjoint quotient sets.
//! - `stabilize-family`: every generator maps the family of quotient sets of
//!   a solution onto itself (checked on solutions).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::catalog::{self, CatalogError};
use crate::design::{build_affine_unital, hat, partition_report, verify_affine_unital, AffineUnital, HatSystem};
use crate::gf2e::{default_modulus, FieldParams};
use crate::morphisms::are_isomorphic_affine;
use crate::sl2q::{AutMap, SpecialLinearGroup, Subgroup};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("config: {0}")]
    Config(String),
    #[error("generator {0} does not stabilize S")]
    GeneratorOutsideStabilizer(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("writing results: {0}")]
    Io(#[from] std::io::Error),
}

fn config_err(msg: impl Into<String>) -> SearchError {
    SearchError::Config(msg.into())
}

/// A subset of `0..n` as packed words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet { words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = BitSet::new(n);
        (0..n).for_each(|i| s.insert(i));
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_disjoint(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn union_with(&mut self, other: &BitSet) {
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a |= b);
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                (word != 0).then(|| {
                    let bit = word.trailing_zeros() as usize;
                    word &= word - 1;
                    w * 64 + bit
                })
            })
        })
    }
}

const OUTSIDE: u32 = u32::MAX;

/// SL(2,q) minus 𝟙, S and every Sylow 2-subgroup: the elements the quotient
/// sets must partition.
#[derive(Debug, Clone)]
pub struct Universe {
    elements: Vec<u32>,
    position: Vec<u32>,
}

impl Universe {
    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, x: u32) -> Option<usize> {
        let p = self.position[x as usize];
        (p != OUTSIDE).then_some(p as usize)
    }

    pub fn contains(&self, x: u32) -> bool {
        self.position(x).is_some()
    }
}

pub fn residue_universe(group: &SpecialLinearGroup, s: &Subgroup) -> Universe {
    let mut excluded = vec![false; group.order()];
    excluded[0] = true;
    s.elements().iter().for_each(|&x| excluded[x as usize] = true);
    for t in group.sylow_subgroups() {
        t.elements().iter().for_each(|&x| excluded[x as usize] = true);
    }
    let mut position = vec![OUTSIDE; group.order()];
    let mut elements = Vec::new();
    for x in 0..group.order() as u32 {
        if !excluded[x as usize] {
            position[x as usize] = elements.len() as u32;
            elements.push(x);
        }
    }
    Universe { elements, position }
}

/// Why a partial block cannot be extended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prune {
    /// x·y⁻¹ (or x itself) is 𝟙, in S or in a Sylow subgroup.
    OutsideUniverse { depth: usize, element: u32 },
    /// a quotient occurs twice
    Repeat { depth: usize, element: u32 },
}

/// A block through 𝟙 under construction, with its quotients so far.
#[derive(Debug, Clone)]
pub struct PartialBlock<'a> {
    group: &'a SpecialLinearGroup,
    universe: &'a Universe,
    points: Vec<u32>,
    quotients: BitSet,
}

impl<'a> PartialBlock<'a> {
    pub fn new(group: &'a SpecialLinearGroup, universe: &'a Universe) -> Self {
        PartialBlock { group, universe, points: vec![0], quotients: BitSet::new(universe.len()) }
    }

    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn quotients(&self) -> &BitSet {
        &self.quotients
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Adds x, checking all new quotients x·y⁻¹ and y·x⁻¹.
    pub fn extend(&self, x: u32) -> Result<PartialBlock<'a>, Prune> {
        let depth = self.points.len();
        let mut quotients = self.quotients.clone();
        let xi = self.group.inv(x);
        for &y in &self.points {
            let yi = self.group.inv(y);
            for element in [self.group.mul(x, yi), self.group.mul(y, xi)] {
                let Some(pos) = self.universe.position(element) else {
                    return Err(Prune::OutsideUniverse { depth, element });
                };
                if quotients.contains(pos) {
                    return Err(Prune::Repeat { depth, element });
                }
                quotients.insert(pos);
            }
        }
        let mut points = self.points.clone();
        points.push(x);
        Ok(PartialBlock { group: self.group, universe: self.universe, points, quotients })
    }
}

/// The lexicographically smallest sorted member of the hat of D.
pub fn canonical_base(group: &SpecialLinearGroup, base: &[u32]) -> Vec<u32> {
    hat(group, base).into_iter().min().expect("nonempty base")
}

fn image(group: &SpecialLinearGroup, alpha: &AutMap, base: &[u32]) -> Vec<u32> {
    base.iter().map(|&x| group.apply_aut_idx(alpha, x)).collect()
}

/// True iff α maps the hat of D onto itself.
pub fn stabilizes_hat(group: &SpecialLinearGroup, alpha: &AutMap, base: &[u32]) -> bool {
    canonical_base(group, &image(group, alpha, base)) == canonical_base(group, base)
}

/// A base block in canonical form with its quotient set over the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub base: Vec<u32>,
    pub quotients: BitSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintMode {
    #[default]
    Stabilize,
    Permute,
    StabilizeFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub mode: ConstraintMode,
    /// "F", "U", "L", "C" (q = 8, S = C) or "conj a b c d", "frob k",
    /// "conj a b c d frob k"
    pub generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_length: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DedupMode {
    /// Keep one system per isomorphism class (equivalently per 𝔄_C-orbit
    /// when S = C).
    #[default]
    Isomorphism,
    /// Keep each distinct set of hats.
    Exact,
}

fn default_q() -> u32 {
    8
}

fn default_subgroup() -> String {
    "C".into()
}

fn default_threads() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default = "default_q")]
    pub q: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u32>,
    /// "C" or "gen a b c d"
    #[serde(default = "default_subgroup")]
    pub subgroup: String,
    #[serde(default, rename = "constraint")]
    pub constraints: Vec<ConstraintSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_limit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_limit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget_sec: Option<f64>,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub dedup: DedupMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            q: default_q(),
            modulus: None,
            subgroup: default_subgroup(),
            constraints: Vec::new(),
            candidate_limit: None,
            node_limit: None,
            time_budget_sec: None,
            threads: 1,
            dedup: DedupMode::default(),
        }
    }
}

impl SearchConfig {
    pub fn from_toml(text: &str) -> Result<Self, SearchError> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// sha256 of the normalized TOML, hex.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    /// "U stabilizes each hat, L permutes them in orbits of length 3".
    pub fn symmetric_q8() -> Self {
        SearchConfig {
            constraints: vec![
                ConstraintSpec { mode: ConstraintMode::Stabilize, generators: vec!["U".into()], orbit_length: None },
                ConstraintSpec { mode: ConstraintMode::Permute, generators: vec!["L".into()], orbit_length: Some(3) },
            ],
            ..SearchConfig::default()
        }
    }
}

/// A configuration with group, subgroup and generators resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub group: Arc<SpecialLinearGroup>,
    pub subgroup: Subgroup,
    pub universe: Universe,
    pub stabilize: Vec<AutMap>,
    /// elements of the generated group and the required orbit length
    pub permute: Option<(Vec<AutMap>, usize)>,
    pub family: Vec<AutMap>,
}

fn parse_codes<'a>(tokens: &mut impl Iterator<Item = &'a str>, what: &str) -> Result<[u32; 4], SearchError> {
    let mut codes = [0; 4];
    for c in codes.iter_mut() {
        *c = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| config_err(format!("malformed matrix in {what:?}")))?;
    }
    Ok(codes)
}

impl SearchConfig {
    pub fn resolve(&self) -> Result<Resolved, SearchError> {
        if !self.q.is_power_of_two() || self.q < 4 {
            return Err(config_err(format!("q = {} is not a power of 2 that is at least 4", self.q)));
        }
        let degree = self.q.trailing_zeros();
        let modulus = match self.modulus {
            Some(m) => m,
            None => default_modulus(degree).map_err(|e| config_err(e.to_string()))?,
        };
        let field = FieldParams::new(2, degree, modulus).map_err(|e| config_err(e.to_string()))?;
        let group = catalog::group_for(&field);
        let standard = group.standard_cyclic_subgroup().map_err(|e| config_err(e.to_string()))?;
        let subgroup = if self.subgroup == "C" {
            standard.clone()
        } else {
            let mut tokens = self.subgroup.split_whitespace();
            if tokens.next() != Some("gen") {
                return Err(config_err(format!("subgroup {:?}: expected \"C\" or \"gen a b c d\"", self.subgroup)));
            }
            let x = group
                .element_from_codes(parse_codes(&mut tokens, &self.subgroup)?)
                .map_err(|e| config_err(e.to_string()))?;
            group.generate(&[group.index_of(&x)])
        };
        if subgroup.len() != group.q() + 1 {
            return Err(config_err(format!("subgroup has order {}, expected {}", subgroup.len(), group.q() + 1)));
        }
        let named = (self.q == 8 && modulus == 11 && subgroup == standard).then(catalog::constants);
        let generator = |name: &str| -> Result<AutMap, SearchError> {
            let alpha = if let Some(c) = named.as_ref().and_then(|c| c.named_generator(&group, name)) {
                c
            } else {
                let mut alpha = AutMap::identity();
                let mut tokens = name.split_whitespace().peekable();
                if tokens.peek().is_none() {
                    return Err(config_err("empty generator"));
                }
                while let Some(t) = tokens.next() {
                    match t {
                        "conj" => {
                            let h = group
                                .element_from_codes(parse_codes(&mut tokens, name)?)
                                .map_err(|e| config_err(e.to_string()))?;
                            alpha = group.compose_aut(&alpha, &AutMap::conjugation(h));
                        }
                        "frob" => {
                            let k: u32 = tokens
                                .next()
                                .and_then(|k| k.parse().ok())
                                .ok_or_else(|| config_err(format!("malformed generator {name:?}")))?;
                            alpha = group.compose_aut(&alpha, &AutMap::frobenius(k));
                        }
                        _ => return Err(config_err(format!("unknown generator {name:?}"))),
                    }
                }
                alpha
            };
            if !group.maps_set_onto(&alpha, &subgroup, &subgroup) {
                return Err(SearchError::GeneratorOutsideStabilizer(name.to_string()));
            }
            Ok(alpha)
        };
        let mut stabilize = Vec::new();
        let mut permute = None;
        let mut family = Vec::new();
        for c in &self.constraints {
            let gens: Vec<AutMap> = c.generators.iter().map(|g| generator(g)).collect::<Result<_, _>>()?;
            match c.mode {
                ConstraintMode::Stabilize => stabilize.extend(gens),
                ConstraintMode::StabilizeFamily => family.extend(gens),
                ConstraintMode::Permute => {
                    if permute.is_some() {
                        return Err(config_err("at most one permute constraint is supported"));
                    }
                    let len = c.orbit_length.ok_or_else(|| config_err("permute constraint needs orbit_length"))?;
                    permute = Some((group.generate_auts(&gens), len));
                }
            }
        }
        Ok(Resolved { universe: residue_universe(&group, &subgroup), group, subgroup, stabilize, permute, family })
    }
}

/// Stops long runs: a deadline, a node budget and a cancellation flag.
#[derive(Debug, Default)]
pub struct Budget {
    deadline: Option<Instant>,
    node_limit: Option<u64>,
    nodes: AtomicU64,
    stopped: AtomicBool,
}

impl Budget {
    pub fn new(time: Option<Duration>, node_limit: Option<u64>) -> Self {
        Budget { deadline: time.map(|t| Instant::now() + t), node_limit, ..Budget::default() }
    }

    pub fn unlimited() -> Self {
        Budget::default()
    }

    /// Counts one node; false once the budget is exhausted.
    pub fn tick(&self) -> bool {
        if self.stopped.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over = self.node_limit.is_some_and(|l| n > l)
            || (n.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d));
        if over {
            self.stopped.store(true, Ordering::Relaxed);
        }
        !over
    }

    pub fn exhausted(&self) -> bool {
        self.stopped.load(Ordering::Relaxed)
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub candidates: Vec<Candidate>,
    pub complete: bool,
}

/// True iff D is a block through 𝟙 of size q+1 satisfying (Q) with D* inside
/// the universe and every stabilize constraint.
pub fn is_candidate(resolved: &Resolved, base: &[u32]) -> bool {
    let group = &resolved.group;
    let mut sorted = base.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != group.q() + 1 || sorted[0] != 0 {
        return false;
    }
    let mut partial = PartialBlock::new(group, &resolved.universe);
    for &x in &sorted[1..] {
        match partial.extend(x) {
            Ok(p) => partial = p,
            Err(_) => return false,
        }
    }
    resolved.stabilize.iter().all(|a| stabilizes_hat(group, a, &sorted))
}

fn make_candidate(resolved: &Resolved, base: Vec<u32>) -> Candidate {
    let mut partial = PartialBlock::new(&resolved.group, &resolved.universe);
    for &x in &base[1..] {
        partial = partial.extend(x).expect("candidate satisfies (Q)");
    }
    Candidate { base, quotients: partial.quotients }
}

/// Cycles of x ↦ α(x)·d.
fn cycles(group: &SpecialLinearGroup, perm: &[u32], d: u32) -> Vec<Vec<u32>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n as u32 {
        if seen[start as usize] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x as usize] {
            seen[x as usize] = true;
            cycle.push(x);
            x = group.mul(perm[x as usize], d);
        }
        out.push(cycle);
    }
    out
}

fn extend_all<'a>(partial: &PartialBlock<'a>, xs: &[u32]) -> Option<PartialBlock<'a>> {
    let mut p = partial.clone();
    for &x in xs {
        p = p.extend(x).ok()?;
    }
    Some(p)
}

/// The α-stable hats: unions of cycles of σ_d for every d ∈ {𝟙} ∪ universe.
fn stable_bases(resolved: &Resolved, alpha: &AutMap, budget: &Budget) -> Vec<Vec<u32>> {
    let group = &resolved.group;
    let universe = &resolved.universe;
    let size = group.q() + 1;
    let perm = group.aut_permutation(alpha);
    let ds: Vec<u32> = std::iter::once(0).chain(universe.elements().iter().copied()).collect();
    let per_d: Vec<Vec<Vec<u32>>> = ds
        .par_iter()
        .map(|&d| {
            let mut found = Vec::new();
            let all = cycles(group, &perm, d);
            let Some(first) = all.iter().find(|c| c.contains(&0)) else {
                return found;
            };
            if first.len() > size {
                return found;
            }
            let start = PartialBlock::new(group, universe);
            let rest: Vec<u32> = first.iter().copied().filter(|&x| x != 0).collect();
            let Some(root) = extend_all(&start, &rest) else {
                return found;
            };
            let pool: Vec<&Vec<u32>> = all
                .iter()
                .filter(|c| !c.contains(&0) && c.len() <= size - first.len() && c.iter().all(|&x| universe.contains(x)))
                .collect();
            fn dfs<'a>(
                pool: &[&Vec<u32>],
                from: usize,
                partial: &PartialBlock<'a>,
                size: usize,
                budget: &Budget,
                found: &mut Vec<Vec<u32>>,
            ) {
                if partial.len() == size {
                    found.push(partial.points().to_vec());
                    return;
                }
                if !budget.tick() {
                    return;
                }
                for (i, cycle) in pool.iter().enumerate().skip(from) {
                    if partial.len() + cycle.len() > size {
                        continue;
                    }
                    if let Some(next) = extend_all(partial, cycle) {
                        dfs(pool, i + 1, &next, size, budget, found);
                    }
                }
            }
            dfs(&pool, 0, &root, size, budget, &mut found);
            found
        })
        .collect();
    per_d.into_iter().flatten().collect()
}

/// Generic depth-first enumeration: D = {𝟙} ∪ increasing universe elements,
/// one canonical member per hat.
fn generic_bases(resolved: &Resolved, budget: &Budget, limit: Option<usize>) -> Vec<Vec<u32>> {
    fn dfs<'a>(
        resolved: &'a Resolved,
        partial: &PartialBlock<'a>,
        from: usize,
        budget: &Budget,
        limit: Option<usize>,
        found: &mut Vec<Vec<u32>>,
    ) -> bool {
        let group = &resolved.group;
        let size = group.q() + 1;
        if partial.len() == size {
            let mut base = partial.points().to_vec();
            base.sort_unstable();
            if canonical_base(group, &base) == base {
                found.push(base);
            }
            return limit.is_none_or(|l| found.len() < l);
        }
        if !budget.tick() {
            return false;
        }
        let elements = resolved.universe.elements();
        for i in from..elements.len() {
            if elements.len() - i < size - partial.len() {
                break;
            }
            if let Ok(next) = partial.extend(elements[i]) {
                if !dfs(resolved, &next, i + 1, budget, limit, found) {
                    return false;
                }
            }
        }
        true
    }
    let mut found = Vec::new();
    let root = PartialBlock::new(&resolved.group, &resolved.universe);
    dfs(resolved, &root, 0, budget, limit, &mut found);
    found
}

/// Every candidate base under the stabilize constraints, canonical and
/// sorted. Without a stabilize constraint the space is huge (~10¹¹ hats for
/// q = 8) and the run is normally cut short by the budget.
pub fn enumerate_candidates(resolved: &Resolved, budget: &Budget, limit: Option<usize>) -> CandidateSet {
    let group = &resolved.group;
    let mut complete = true;
    let bases: Vec<Vec<u32>> = match resolved.stabilize.first() {
        Some(alpha) => {
            let raw = stable_bases(resolved, alpha, budget);
            let set: BTreeSet<Vec<u32>> = raw
                .par_iter()
                .filter(|b| resolved.stabilize[1..].iter().all(|a| stabilizes_hat(group, a, b)))
                .map(|b| {
                    let mut b = b.clone();
                    b.sort_unstable();
                    canonical_base(group, &b)
                })
                .collect();
            set.into_iter().collect()
        }
        None => {
            let found = generic_bases(resolved, budget, limit);
            if limit.is_some_and(|l| found.len() >= l) {
                complete = false;
            }
            found
        }
    };
    complete &= !budget.exhausted();
    let mut candidates: Vec<Candidate> = bases.into_iter().map(|b| make_candidate(resolved, b)).collect();
    if let Some(l) = limit {
        if candidates.len() > l {
            candidates.truncate(l);
            complete = false;
        }
    }
    CandidateSet { candidates, complete }
}

/// One cover row: a bitset and the ways of realizing it by bases.
#[derive(Debug, Clone)]
pub struct Row {
    pub bits: BitSet,
    pub choices: Vec<Vec<Vec<u32>>>,
}

/// Rows from candidates: one per distinct quotient set, or, in permute mode,
/// one per admissible orbit of hats.
pub fn build_rows(resolved: &Resolved, candidates: &[Candidate]) -> Vec<Row> {
    let group = &resolved.group;
    let index: HashMap<&[u32], usize> = candidates.iter().enumerate().map(|(i, c)| (c.base.as_slice(), i)).collect();
    let mut rows: BTreeMap<BitSet, BTreeSet<Vec<Vec<u32>>>> = BTreeMap::new();
    match &resolved.permute {
        None => {
            for c in candidates {
                rows.entry(c.quotients.clone()).or_default().insert(vec![c.base.clone()]);
            }
        }
        Some((maps, len)) => {
            let orbits: Vec<Option<(BitSet, Vec<Vec<u32>>)>> = candidates
                .par_iter()
                .map(|c| {
                    let orbit: BTreeSet<Vec<u32>> = maps
                        .iter()
                        .map(|a| {
                            let mut img = image(group, a, &c.base);
                            img.sort_unstable();
                            canonical_base(group, &img)
                        })
                        .collect();
                    if orbit.len() != *len || orbit.first() != Some(&c.base) {
                        return None;
                    }
                    let mut bits = BitSet::new(resolved.universe.len());
                    for member in &orbit {
                        let q = &candidates[*index.get(member.as_slice())?].quotients;
                        if !bits.is_disjoint(q) {
                            return None;
                        }
                        bits.union_with(q);
                    }
                    Some((bits, orbit.into_iter().collect()))
                })
                .collect();
            for (bits, orbit) in orbits.into_iter().flatten() {
                rows.entry(bits).or_default().insert(orbit);
            }
        }
    }
    rows.into_iter().map(|(bits, choices)| Row { bits, choices: choices.into_iter().collect() }).collect()
}

#[derive(Debug, Clone)]
pub struct CoverInstance {
    pub universe_size: usize,
    pub rows: Vec<BitSet>,
}

/// Row choices along the DFS path to the first unexplored node.
pub type ResumeToken = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverResult {
    /// each solution lists row indices in the order chosen
    pub solutions: Vec<Vec<usize>>,
    pub complete: bool,
    pub resume: Option<ResumeToken>,
}

struct Solver<'a> {
    instance: &'a CoverInstance,
    budget: &'a Budget,
}

enum Step {
    Done,
    Stopped(ResumeToken),
}

impl Solver<'_> {
    /// Minimum-remaining-values column among the uncovered ones, smallest
    /// column on ties, and the live rows that contain it.
    fn choose(&self, covered: &BitSet, live: &[usize]) -> Option<(usize, Vec<usize>)> {
        let n = self.instance.universe_size;
        let mut counts = vec![0usize; n];
        for &r in live {
            for c in self.instance.rows[r].ones() {
                counts[c] += 1;
            }
        }
        let column = (0..n).filter(|&c| !covered.contains(c)).min_by_key(|&c| (counts[c], c))?;
        let rows = live.iter().copied().filter(|&r| self.instance.rows[r].contains(column)).collect();
        Some((column, rows))
    }

    fn dfs(
        &self,
        covered: &BitSet,
        live: &[usize],
        path: &mut Vec<usize>,
        resume: &mut Option<&[usize]>,
        out: &mut Vec<Vec<usize>>,
    ) -> Step {
        if resume.is_some_and(|r| r.len() == path.len()) {
            *resume = None;
        }
        if resume.is_none() && !self.budget.tick() {
            return Step::Stopped(path.clone());
        }
        let Some((_, branch)) = self.choose(covered, live) else {
            out.push(path.clone());
            return Step::Done;
        };
        for r in branch {
            if let Some(token) = *resume {
                if r < token[path.len()] {
                    continue;
                }
            }
            let row = &self.instance.rows[r];
            let mut next = covered.clone();
            next.union_with(row);
            let next_live: Vec<usize> =
                live.iter().copied().filter(|&s| s != r && self.instance.rows[s].is_disjoint(row)).collect();
            path.push(r);
            let step = self.dfs(&next, &next_live, path, resume, out);
            path.pop();
            if let Step::Stopped(t) = step {
                return Step::Stopped(t);
            }
        }
        Step::Done
    }
}

/// All exact covers of the universe by rows, in DFS order. `threads` > 1
/// splits the tree at the first branching; the result is identical.
pub fn exact_cover(instance: &CoverInstance, budget: &Budget, resume: Option<&[usize]>, threads: usize) -> CoverResult {
    let solver = Solver { instance, budget };
    let covered = BitSet::new(instance.universe_size);
    let live: Vec<usize> = (0..instance.rows.len()).filter(|&r| instance.rows[r].count() > 0).collect();
    let finish = |solutions, step| match step {
        Step::Done => CoverResult { solutions, complete: true, resume: None },
        Step::Stopped(t) => CoverResult { solutions, complete: false, resume: Some(t) },
    };
    if threads <= 1 || resume.is_some() {
        let mut out = Vec::new();
        let mut resume = resume;
        let step = solver.dfs(&covered, &live, &mut Vec::new(), &mut resume, &mut out);
        return finish(out, step);
    }
    let Some((_, branch)) = solver.choose(&covered, &live) else {
        return CoverResult { solutions: vec![Vec::new()], complete: true, resume: None };
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    let parts: Vec<(Vec<Vec<usize>>, Step)> = pool.install(|| {
        branch
            .par_iter()
            .map(|&r| {
                let row = &instance.rows[r];
                let mut next = covered.clone();
                next.union_with(row);
                let next_live: Vec<usize> =
                    live.iter().copied().filter(|&s| s != r && instance.rows[s].is_disjoint(row)).collect();
                let mut out = Vec::new();
                let mut path = vec![r];
                let step = solver.dfs(&next, &next_live, &mut path, &mut None, &mut out);
                (out, step)
            })
            .collect()
    });
    let mut solutions = Vec::new();
    for (out, step) in parts {
        solutions.extend(out);
        if let Step::Stopped(t) = step {
            return finish(solutions, Step::Stopped(t));
        }
    }
    finish(solutions, Step::Done)
}

/// Outcome of a full search.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub systems: Vec<HatSystem>,
    pub candidates: usize,
    pub rows: usize,
    pub cover_solutions: usize,
    /// solutions dropped by verification or family constraints
    pub rejected: usize,
    pub complete: bool,
    pub resume: Option<ResumeToken>,
    pub elapsed: Duration,
}

/// Independent check of a search result: (Q), (P) and (AU1)–(AU5).
pub fn verify_system(system: &HatSystem) -> Option<AffineUnital> {
    partition_report(system).ok()?;
    let unital = build_affine_unital(system).ok()?;
    verify_affine_unital(&unital).passed().then_some(unital)
}

fn maps_family(group: &SpecialLinearGroup, alpha: &AutMap, bases: &[Vec<u32>]) -> bool {
    let canon = |b: &[u32]| {
        let mut b = b.to_vec();
        b.sort_unstable();
        canonical_base(group, &b)
    };
    let family: BTreeSet<Vec<u32>> = bases.iter().map(|b| canon(b)).collect();
    let moved: BTreeSet<Vec<u32>> = bases.iter().map(|b| canon(&image(group, alpha, b))).collect();
    family == moved
}

fn expand(rows: &[Row], solution: &[usize]) -> Vec<Vec<Vec<u32>>> {
    let mut partial: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
    for &r in solution {
        partial = partial
            .into_iter()
            .flat_map(|prefix| {
                rows[r].choices.iter().map(move |choice| {
                    let mut next = prefix.clone();
                    next.extend(choice.iter().cloned());
                    next
                })
            })
            .collect();
    }
    partial
}

pub fn search(config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let start = Instant::now();
    let resolved = config.resolve()?;
    let budget = Budget::new(config.time_budget_sec.map(Duration::from_secs_f64), config.node_limit);
    let threads = config.threads.max(1);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    let cands = pool.install(|| enumerate_candidates(&resolved, &budget, config.candidate_limit));
    let rows = pool.install(|| build_rows(&resolved, &cands.candidates));
    let instance = CoverInstance { universe_size: resolved.universe.len(), rows: rows.iter().map(|r| r.bits.clone()).collect() };
    let cover = exact_cover(&instance, &budget, None, threads);

    let group = &resolved.group;
    let mut kept: Vec<(HatSystem, AffineUnital)> = Vec::new();
    let mut seen_exact: BTreeSet<Vec<Vec<u32>>> = BTreeSet::new();
    let mut rejected = 0;
    for solution in &cover.solutions {
        for bases in expand(&rows, solution) {
            let Ok(system) = HatSystem::new(group.clone(), resolved.subgroup.clone(), bases) else {
                rejected += 1;
                continue;
            };
            if !resolved.family.iter().all(|a| maps_family(group, a, system.bases())) {
                rejected += 1;
                continue;
            }
            let Some(unital) = verify_system(&system) else {
                rejected += 1;
                continue;
            };
            let duplicate = match config.dedup {
                DedupMode::Exact => {
                    let key: BTreeSet<Vec<u32>> = system.bases().iter().map(|b| canonical_base(group, b)).collect();
                    !seen_exact.insert(key.into_iter().collect())
                }
                DedupMode::Isomorphism => kept.iter().any(|(_, u)| are_isomorphic_affine(&unital, u).is_some()),
            };
            if !duplicate {
                kept.push((system, unital));
            }
        }
    }
    Ok(SearchOutcome {
        systems: kept.into_iter().map(|(s, _)| s).collect(),
        candidates: cands.candidates.len(),
        rows: rows.len(),
        cover_solutions: cover.solutions.len(),
        rejected,
        complete: cands.complete && cover.complete,
        resume: cover.resume,
        elapsed: start.elapsed(),
    })
}

/// Manifest lines `@key value` for a run.
pub fn manifest(config: &SearchConfig, outcome: &SearchOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@config-hash {}", config.hash());
    let _ = writeln!(out, "@solutions {}", outcome.systems.len());
    let _ = writeln!(out, "@elapsed-ms {}", outcome.elapsed.as_millis());
    let _ = writeln!(out, "@candidates {}", outcome.candidates);
    let _ = writeln!(out, "@rows {}", outcome.rows);
    let _ = writeln!(out, "@covers {}", outcome.cover_solutions);
    let _ = writeln!(out, "@complete {}", outcome.complete);
    if let Some(token) = &outcome.resume {
        let t: Vec<String> = token.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "@resume {}", t.join(","));
    }
    out
}

/// Writes `system-NNN.unital` per result and `manifest.txt` into `dir`.
pub fn write_results(dir: &Path, config: &SearchConfig, outcome: &SearchOutcome) -> Result<(), SearchError> {
    std::fs::create_dir_all(dir)?;
    for (i, system) in outcome.systems.iter().enumerate() {
        std::fs::write(dir.join(format!("system-{:03}.unital", i + 1)), catalog::serialize(system))?;
    }
    std::fs::write(dir.join("manifest.txt"), manifest(config, outcome))?;
    Ok(())
}
