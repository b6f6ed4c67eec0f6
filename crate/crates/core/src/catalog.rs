//! The four hat systems of order 8 (classical, Weihnachts-, Oster- and
//! Pfingstunital), the named elements and subgroups of 𝔄_C, and the
//! line-oriented `unital v1` file format.
//!
//! Only the first and fourth base of each system are stored literally; the
//! others follow from the defining relations (entrywise Frobenius for the
//! classical and Weihnachts systems, conjugation by g for Oster and
//! Pfingst, conjugation by f for the second Pfingst triple). The expanded
//! systems also ship as data files; loading compares both.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::design::{DesignError, HatSystem, ParallelismKind};
use crate::gf2e::{FieldElement, FieldError, FieldParams};
use crate::sl2q::{AutMap, GroupElement, GroupError, SpecialLinearGroup, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0:?} (expected classical8, wu, ou or pu)")]
    UnknownName(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("embedded data for {entry} disagrees with the derived base D{base}")]
    Inconsistent { entry: &'static str, base: usize },
    #[error("bad literal {0:?}")]
    Literal(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Design(#[from] DesignError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn parse_err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entry {
    Classical8,
    Wu,
    Ou,
    Pu,
}

impl Entry {
    pub const ALL: [Entry; 4] = [Entry::Classical8, Entry::Wu, Entry::Ou, Entry::Pu];

    pub fn name(self) -> &'static str {
        match self {
            Entry::Classical8 => "classical8",
            Entry::Wu => "wu",
            Entry::Ou => "ou",
            Entry::Pu => "pu",
        }
    }

    pub fn parse(name: &str) -> Result<Entry, CatalogError> {
        Entry::ALL
            .into_iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| CatalogError::UnknownName(name.to_string()))
    }

    fn data(self) -> &'static str {
        match self {
            Entry::Classical8 => include_str!("../data/classical8.unital"),
            Entry::Wu => include_str!("../data/wu.unital"),
            Entry::Ou => include_str!("../data/ou.unital"),
            Entry::Pu => include_str!("../data/pu.unital"),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// Matrices (a b; c d) as "a b c d" with entries 0, 1, z, z2, ..., z6.
const H1: [&str; 8] = [
    "z5 1 z5 z6", "z4 z2 1 z2", "0 z z6 z5", "z3 z6 z4 z5",
    "z3 z z6 0", "1 z2 1 z6", "z4 1 z5 1", "z5 0 0 z2",
];
const H4: [&str; 8] = [
    "z5 0 z6 z2", "z z6 z4 1", "1 z5 z6 z5", "z z4 0 z6",
    "z5 z2 z4 z4", "0 z2 z5 z5", "0 z4 z3 z4", "z2 z5 z5 z6",
];
const WU1: [&str; 8] = [
    "z5 1 z5 z6", "z4 z2 1 z2", "0 z z6 z2", "1 z4 z2 z2",
    "1 z z6 0", "1 z2 1 z6", "z4 1 z5 1", "z5 0 0 z2",
];
const WU4: [&str; 8] = [
    "z5 0 z6 z2", "z z6 z4 1", "0 z z6 z5", "z4 0 z2 z3",
    "z5 z2 z3 z6", "0 z2 z5 z5", "0 z4 z3 z4", "z2 z5 z5 z6",
];
const OU1: [&str; 8] = [
    "z5 1 z5 z6", "z4 z2 1 z2", "1 z z6 0", "0 z z6 z2",
    "1 z4 z2 z2", "z3 z5 z3 1", "z5 z4 z2 z4", "z2 0 0 z5",
];
const OU4: [&str; 8] = [
    "z5 0 z6 z2", "z z6 z4 1", "z5 z2 z5 0", "z3 z4 z6 z5",
    "1 1 z3 z", "1 z 1 z3", "z z2 1 z5", "z 0 z z6",
];

/// g = (z², z⁴; z⁴, z), generator of C.
pub const G: &str = "z2 z4 z4 z";
/// f = (0, 1; 1, 0).
pub const F: &str = "0 1 1 0";

/// SL(2,8) over X³+X+1, built once.
pub fn gf8_group() -> Arc<SpecialLinearGroup> {
    static GROUP: OnceLock<Arc<SpecialLinearGroup>> = OnceLock::new();
    GROUP.get_or_init(|| group_for(&FieldParams::gf8())).clone()
}

type GroupCache = HashMap<(u32, u32), Arc<SpecialLinearGroup>>;

/// Shared group for a field, built on first use.
pub fn group_for(field: &FieldParams) -> Arc<SpecialLinearGroup> {
    static CACHE: OnceLock<Mutex<GroupCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("group cache poisoned");
    guard
        .entry((field.degree(), field.modulus()))
        .or_insert_with(|| Arc::new(SpecialLinearGroup::new(field.clone())))
        .clone()
}

fn field_literal(field: &FieldParams, token: &str) -> Option<FieldElement> {
    match token {
        "0" => Some(FieldElement::ZERO),
        "1" => Some(FieldElement::ONE),
        "z" => Some(field.z_power(1)),
        _ => token.strip_prefix('z')?.parse::<u64>().ok().map(|k| field.z_power(k)),
    }
}

/// Parses a matrix written as four z-power entries, e.g. "z5 1 z5 z6".
pub fn matrix_literal(group: &SpecialLinearGroup, text: &str) -> Result<GroupElement, CatalogError> {
    let entries: Option<Vec<FieldElement>> =
        text.split_whitespace().map(|t| field_literal(group.field(), t)).collect();
    match entries.as_deref() {
        Some(&[a, b, c, d]) => Ok(GroupElement::new(group.field(), [a, b, c, d])?),
        _ => Err(CatalogError::Literal(text.to_string())),
    }
}

fn literal_base(group: &SpecialLinearGroup, rows: &[&str]) -> Result<Vec<u32>, CatalogError> {
    let mut base = vec![0];
    for row in rows {
        base.push(group.index_of(&matrix_literal(group, row)?));
    }
    Ok(base)
}

fn map_base(base: &[u32], f: impl Fn(u32) -> u32) -> Vec<u32> {
    let mut out: Vec<u32> = base.iter().map(|&x| f(x)).collect();
    out.sort_unstable();
    out
}

/// Named elements and subgroups for q = 8.
#[derive(Debug, Clone)]
pub struct Constants {
    pub g: GroupElement,
    pub f: GroupElement,
    /// C = ⟨g⟩.
    pub c: Subgroup,
    /// F = ⟨γ_f⟩ ≅ C₂.
    pub f_group: Vec<AutMap>,
    /// U = ⟨γ_{g³}⟩ ≅ C₃.
    pub u_group: Vec<AutMap>,
    /// L = ⟨φ⟩ ≅ C₃.
    pub l_group: Vec<AutMap>,
    /// 𝔄_C = ⟨γ_g⟩ ⋊ ⟨γ_f·φ⟩.
    pub a_c: Vec<AutMap>,
}

impl Constants {
    pub fn gamma_g(&self) -> AutMap {
        AutMap::conjugation(self.g)
    }

    pub fn gamma_f(&self) -> AutMap {
        AutMap::conjugation(self.f)
    }

    pub fn gamma_g3(&self, group: &SpecialLinearGroup) -> AutMap {
        let g3 = group.multiply(&group.multiply(&self.g, &self.g), &self.g);
        AutMap::conjugation(g3)
    }

    pub fn phi(&self) -> AutMap {
        AutMap::frobenius(1)
    }

    /// Generator of F, U or L by name ("F", "U", "L"), or γ_g for "C".
    pub fn named_generator(&self, group: &SpecialLinearGroup, name: &str) -> Option<AutMap> {
        match name {
            "F" => Some(self.gamma_f()),
            "U" => Some(self.gamma_g3(group)),
            "L" => Some(self.phi()),
            "C" => Some(self.gamma_g()),
            _ => None,
        }
    }
}

pub fn constants() -> Constants {
    let group = gf8_group();
    let g = matrix_literal(&group, G).expect("g is in SL(2,8)");
    let f = matrix_literal(&group, F).expect("f is in SL(2,8)");
    let c = group.generate(&[group.index_of(&g)]);
    let gamma_g = AutMap::conjugation(g);
    let gamma_f = AutMap::conjugation(f);
    let g3 = group.multiply(&group.multiply(&g, &g), &g);
    let gamma_f_phi = group.compose_aut(&gamma_f, &AutMap::frobenius(1));
    Constants {
        g,
        f,
        f_group: group.generate_auts(&[gamma_f]),
        u_group: group.generate_auts(&[AutMap::conjugation(g3)]),
        l_group: group.generate_auts(&[AutMap::frobenius(1)]),
        a_c: group.generate_auts(&[gamma_g, gamma_f_phi]),
        c,
    }
}

/// Builds a system from the literal tables and the defining relations.
pub fn derive(entry: Entry) -> Result<HatSystem, CatalogError> {
    let group = gf8_group();
    let consts = constants();
    let gi = group.index_of(&consts.g);
    let fi = group.index_of(&consts.f);
    let g2 = group.mul(gi, gi);
    let phi = |base: &[u32], k: u32| map_base(base, |x| group.frob(x, k));
    let conj = |base: &[u32], h: u32| map_base(base, |x| group.conj(x, h));
    let (first, fourth) = match entry {
        Entry::Classical8 => (&H1, &H4),
        Entry::Wu => (&WU1, &WU4),
        Entry::Ou | Entry::Pu => (&OU1, &OU4),
    };
    let d1 = literal_base(&group, first)?;
    let mut d4 = literal_base(&group, fourth)?;
    let bases = match entry {
        Entry::Classical8 | Entry::Wu => {
            vec![d1.clone(), phi(&d1, 1), phi(&d1, 2), d4.clone(), phi(&d4, 1), phi(&d4, 2)]
        }
        Entry::Ou | Entry::Pu => {
            if entry == Entry::Pu {
                d4 = conj(&d4, fi);
            }
            vec![d1.clone(), conj(&d1, gi), conj(&d1, g2), d4.clone(), conj(&d4, gi), conj(&d4, g2)]
        }
    };
    Ok(HatSystem::new(group, consts.c, bases)?)
}

/// Loads a catalog system: parses the shipped data file and checks it
/// against the literal tables.
pub fn load(entry: Entry) -> Result<HatSystem, CatalogError> {
    let stored = parse(entry.data())?;
    let derived = derive(entry)?;
    if stored.subgroup() != derived.subgroup() {
        return Err(CatalogError::Inconsistent { entry: entry.name(), base: 0 });
    }
    if let Some(i) = (0..6).find(|&i| stored.bases().get(i) != derived.bases().get(i)) {
        return Err(CatalogError::Inconsistent { entry: entry.name(), base: i + 1 });
    }
    Ok(stored)
}

pub fn load_by_name(name: &str) -> Result<HatSystem, CatalogError> {
    load(Entry::parse(name)?)
}

/// A hat system file, optionally asking for a closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub system: HatSystem,
    pub closure: Option<ParallelismKind>,
}

fn write_element(out: &mut String, x: &GroupElement) {
    let [a, b, c, d] = x.codes();
    let _ = write!(out, "{a} {b} {c} {d}");
}

fn write_list(out: &mut String, group: &SpecialLinearGroup, items: &[u32]) {
    for (i, &x) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(" , ");
        }
        write_element(out, &group.element(x));
    }
}

pub fn serialize(system: &HatSystem) -> String {
    serialize_document(&Document { system: system.clone(), closure: None })
}

pub fn serialize_document(doc: &Document) -> String {
    let system = &doc.system;
    let group = system.group();
    let field = group.field();
    let mut out = String::new();
    let _ = writeln!(out, "unital v1");
    let _ = writeln!(out, "q {}", field.order());
    let _ = writeln!(out, "modulus {}", field.modulus());
    let s = system.subgroup();
    let generator = s.elements().iter().copied().find(|&x| group.generate(&[x]) == *s);
    match generator {
        Some(x) => {
            out.push_str("S gen ");
            write_element(&mut out, &group.element(x));
        }
        None => {
            out.push_str("S set ");
            write_list(&mut out, group, s.elements());
        }
    }
    out.push('\n');
    for (i, base) in system.bases().iter().enumerate() {
        let _ = write!(out, "D {} : ", i + 1);
        write_list(&mut out, group, base);
        out.push('\n');
    }
    if let Some(kind) = doc.closure {
        let _ = writeln!(out, "closure {kind}");
    }
    out
}

pub fn parse(text: &str) -> Result<HatSystem, ParseError> {
    Ok(parse_document(text)?.system)
}

fn parse_uint(line: usize, token: Option<&str>, what: &str) -> Result<u32, ParseError> {
    token
        .ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("malformed {what}")))
}

fn parse_element(line: usize, group: &SpecialLinearGroup, text: &str) -> Result<u32, ParseError> {
    let codes: Vec<&str> = text.split_whitespace().collect();
    if codes.len() != 4 {
        return Err(parse_err(line, format!("malformed matrix {:?}: expected four codes", text.trim())));
    }
    let mut parsed = [0u32; 4];
    for (slot, code) in parsed.iter_mut().zip(&codes) {
        *slot = code.parse().map_err(|_| parse_err(line, format!("malformed field code {code:?}")))?;
    }
    match group.element_from_codes(parsed) {
        Ok(x) => Ok(group.index_of(&x)),
        Err(GroupError::Determinant(..)) => Err(parse_err(
            line,
            format!("matrix ({}) does not have determinant 1", codes.join(" ")),
        )),
        Err(e) => Err(parse_err(line, e.to_string())),
    }
}

fn parse_list(line: usize, group: &SpecialLinearGroup, text: &str) -> Result<Vec<u32>, ParseError> {
    text.split(',').map(|m| parse_element(line, group, m)).collect()
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut expect = |key: &str| -> Result<(usize, &str), ParseError> {
        match lines.next() {
            Some((n, l)) if l.split_whitespace().next() == Some(key) => Ok((n, l)),
            Some((n, l)) => Err(parse_err(n, format!("expected `{key}` line, found {l:?}"))),
            None => Err(parse_err(text.lines().count() + 1, format!("missing `{key}` line"))),
        }
    };
    let (n, header) = expect("unital")?;
    if header.split_whitespace().collect::<Vec<_>>() != ["unital", "v1"] {
        return Err(parse_err(n, "unsupported header, expected `unital v1`"));
    }
    let (n, qline) = expect("q")?;
    let q = parse_uint(n, qline.split_whitespace().nth(1), "field order")?;
    if !q.is_power_of_two() || q < 2 {
        return Err(parse_err(n, format!("field order {q} is not a power of 2")));
    }
    let degree = q.trailing_zeros();
    let (n, mline) = expect("modulus")?;
    let modulus = parse_uint(n, mline.split_whitespace().nth(1), "modulus")?;
    let field = FieldParams::new(2, degree, modulus).map_err(|e: FieldError| parse_err(n, e.to_string()))?;
    let group = group_for(&field);

    let (n, sline) = expect("S")?;
    let rest = sline[1..].trim_start();
    let subgroup = if let Some(gen) = rest.strip_prefix("gen") {
        group.generate(&[parse_element(n, &group, gen)?])
    } else if let Some(set) = rest.strip_prefix("set") {
        Subgroup::from_indices(parse_list(n, &group, set)?)
    } else {
        return Err(parse_err(n, "expected `S gen` or `S set`"));
    };
    if subgroup.len() != group.q() + 1 {
        return Err(parse_err(n, format!("subgroup has {} elements, expected {}", subgroup.len(), group.q() + 1)));
    }
    let s_line = n;

    let mut bases = Vec::new();
    let mut closure = None;
    for (n, l) in lines {
        if closure.is_some() {
            return Err(parse_err(n, "content after `closure` line"));
        }
        if let Some(kind) = l.strip_prefix("closure") {
            let kind = kind.trim();
            closure = Some(
                ParallelismKind::parse(kind)
                    .ok_or_else(|| parse_err(n, format!("unknown parallelism {kind:?}")))?,
            );
            continue;
        }
        let Some(body) = l.strip_prefix('D') else {
            return Err(parse_err(n, format!("malformed line {l:?}")));
        };
        let (idx, list) = body
            .split_once(':')
            .ok_or_else(|| parse_err(n, "malformed base line: missing `:`"))?;
        let idx: usize = idx.trim().parse().map_err(|_| parse_err(n, "malformed base index"))?;
        if idx != bases.len() + 1 {
            return Err(parse_err(n, format!("base index {idx} out of sequence")));
        }
        let base = parse_list(n, &group, list)?;
        let mut distinct = base.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != group.q() + 1 {
            return Err(parse_err(
                n,
                format!("base D{idx} has {} distinct elements, expected {}", distinct.len(), group.q() + 1),
            ));
        }
        if distinct[0] != 0 {
            return Err(parse_err(n, format!("base D{idx} does not contain the identity")));
        }
        bases.push((n, distinct));
    }
    let lines_of: Vec<usize> = bases.iter().map(|(n, _)| *n).collect();
    let system = HatSystem::new(group, subgroup, bases.into_iter().map(|(_, b)| b).collect())
        .map_err(|e| match &e {
            DesignError::BadBase { index, .. } => parse_err(lines_of[index - 1], e.to_string()),
            _ => parse_err(s_line, e.to_string()),
        })?;
    Ok(Document { system, closure })
}

/// A configuration as printed: four blocks as explicit matrix lists and the
/// six points in the order (B1∩B2, B1∩B3, B2∩B3, B1∩B4, B2∩B4, B3∩B4).
#[derive(Debug, Clone)]
pub struct PrintedOnan {
    pub blocks: [Vec<GroupElement>; 4],
    pub points: [GroupElement; 6],
}

/// The two O'Nan configurations printed for the Weihnachts- and Osterunital.
pub fn printed_onan(entry: Entry) -> Option<PrintedOnan> {
    let group = gf8_group();
    let consts = constants();
    let m = |s: &str| matrix_literal(&group, s).expect("printed matrix");
    let list = |rows: &[&str]| rows.iter().map(|r| m(r)).collect::<Vec<_>>();
    let g_pow = |k: u64| group.element(group.power(group.index_of(&consts.g), k));
    let c: Vec<GroupElement> = (0..9).map(g_pow).collect();
    match entry {
        Entry::Wu => {
            let t: Vec<GroupElement> = group.unitriangular().elements().iter().map(|&x| group.element(x)).collect();
            Some(PrintedOnan {
                blocks: [
                    c,
                    t,
                    list(&[
                        "z4 1 1 0", "0 z3 z4 z3", "1 z 0 1", "z2 0 z z5", "z2 1 z2 z4",
                        "z 1 z2 z5", "0 1 1 1", "z4 z 0 z3", "1 z3 z4 0",
                    ]),
                    list(&[
                        "z z3 0 z6", "1 1 1 0", "z3 z4 z z", "0 z3 z4 z2", "z 1 z2 z5",
                        "z 0 z4 z6", "z z z z5", "z3 z 1 1", "1 z2 0 1",
                    ]),
                ],
                points: [
                    GroupElement::identity(),
                    g_pow(6),
                    m("1 z 0 1"),
                    g_pow(3),
                    m("1 z2 0 1"),
                    m("z 1 z2 z5"),
                ],
            })
        }
        Entry::Ou => {
            let mut d1 = vec![GroupElement::identity()];
            d1.extend(list(&OU1));
            let mut d2g = vec![consts.g];
            d2g.extend(list(&[
                "z4 z2 1 z2", "z3 0 z3 z4", "z5 z5 z3 z5", "z6 0 1 z",
                "z6 z z3 z6", "z5 z2 z6 z5", "1 z3 z4 0", "z2 z3 0 z5",
            ]));
            Some(PrintedOnan {
                blocks: [
                    c,
                    d1,
                    d2g,
                    list(&[
                        "z5 z2 z6 z5", "z2 0 0 z5", "z z2 z3 z3", "z2 1 z6 1", "z6 z z5 z3",
                        "z4 z3 z4 0", "z z4 z4 z2", "z3 z2 z5 0", "z3 z z4 z",
                    ]),
                ],
                points: [
                    GroupElement::identity(),
                    g_pow(1),
                    m("z4 z2 1 z2"),
                    g_pow(8),
                    m("z2 0 0 z5"),
                    m("z5 z2 z6 z5"),
                ],
            })
        }
        _ => None,
    }
}

/// The translating matrices of the printed blocks B3 = D_i·m, B4 = D_j·m'
/// as (base index, matrix).
pub fn printed_translates(entry: Entry) -> Vec<(usize, GroupElement)> {
    let group = gf8_group();
    let m = |s: &str| matrix_literal(&group, s).expect("printed matrix");
    match entry {
        Entry::Wu => vec![(1, m("z4 1 1 0")), (2, m("z z3 0 z6"))],
        Entry::Ou => vec![(1, m(G)), (2, m("z5 z2 z6 z5"))],
        _ => Vec::new(),
    }
}
