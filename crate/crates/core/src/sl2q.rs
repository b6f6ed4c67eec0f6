//! The group SL(2,q) for q = 2^e, its Sylow 2-subgroups, the cyclic
//! subgroups of order q+1 and the automorphisms γ_h∘φ^k.
//!
//! Group elements are numbered once per group: the identity gets index 0
//! and all other elements follow in lexicographic order of their entry
//! codes (a, b, c, d). Most of the crate works with these indices.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::gf2e::{FieldElement, FieldError, FieldParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("matrix ({0}, {1}; {2}, {3}) does not have determinant 1")]
    Determinant(u8, u8, u8, u8),
    #[error("not a quadratic non-residue setup: X^2 + {t}X + {d} has a root")]
    NotQuadraticNonResidue { d: u8, t: u8 },
    #[error("conjugator and Frobenius exponent {0} out of range")]
    BadFrobenius(u32),
}

/// A 2×2 matrix of determinant 1, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    entries: [FieldElement; 4],
}

impl GroupElement {
    pub fn new(field: &FieldParams, entries: [FieldElement; 4]) -> Result<Self, GroupError> {
        let [a, b, c, d] = entries;
        let det = field.add(field.mul(a, d), field.mul(b, c));
        if det != FieldElement::ONE {
            return Err(GroupError::Determinant(a.code(), b.code(), c.code(), d.code()));
        }
        Ok(GroupElement { entries })
    }

    pub fn from_codes(field: &FieldParams, codes: [u32; 4]) -> Result<Self, GroupError> {
        let mut entries = [FieldElement::ZERO; 4];
        for (slot, code) in entries.iter_mut().zip(codes) {
            *slot = field.element(code)?;
        }
        Self::new(field, entries)
    }

    pub fn identity() -> Self {
        GroupElement {
            entries: [FieldElement::ONE, FieldElement::ZERO, FieldElement::ZERO, FieldElement::ONE],
        }
    }

    pub fn entries(&self) -> [FieldElement; 4] {
        self.entries
    }

    pub fn codes(&self) -> [u8; 4] {
        self.entries.map(FieldElement::code)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.codes();
        write!(f, "({a},{b};{c},{d})")
    }
}

/// A subgroup (or any point set) stored as a sorted list of element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    elements: Vec<u32>,
}

impl Subgroup {
    pub fn from_indices(mut elements: Vec<u32>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        Subgroup { elements }
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, idx: u32) -> bool {
        self.elements.binary_search(&idx).is_ok()
    }
}

/// The automorphism x ↦ φ^frob(h⁻¹·x·h) of SL(2,q), with h the conjugator
/// and φ the entrywise Frobenius map. Conjugation is applied first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AutMap {
    pub conjugator: GroupElement,
    pub frob: u32,
}

impl AutMap {
    pub fn identity() -> Self {
        AutMap { conjugator: GroupElement::identity(), frob: 0 }
    }

    /// γ_h, conjugation by h.
    pub fn conjugation(h: GroupElement) -> Self {
        AutMap { conjugator: h, frob: 0 }
    }

    /// φ^k, entrywise Frobenius.
    pub fn frobenius(k: u32) -> Self {
        AutMap { conjugator: GroupElement::identity(), frob: k }
    }
}

impl fmt::Display for AutMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gamma{}*phi^{}", self.conjugator, self.frob)
    }
}

/// Cap on |SL(2,q)| for precomputing the full multiplication table.
const MUL_TABLE_LIMIT: usize = 1024;

pub struct SpecialLinearGroup {
    field: FieldParams,
    elements: Vec<GroupElement>,
    lookup: Vec<u16>,
    inverse: Vec<u16>,
    mul_table: Option<Vec<u16>>,
    frob: Vec<Vec<u16>>,
}

impl fmt::Debug for SpecialLinearGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpecialLinearGroup")
            .field("field", &self.field)
            .field("order", &self.elements.len())
            .finish()
    }
}

fn pack(field: &FieldParams, x: &GroupElement) -> usize {
    let e = field.degree();
    x.codes().iter().fold(0usize, |acc, &c| (acc << e) | c as usize)
}

impl SpecialLinearGroup {
    /// Enumerates all determinant-1 matrices over the field.
    pub fn new(field: FieldParams) -> Self {
        let q = field.order();
        let mut elements = Vec::with_capacity(q * (q * q - 1));
        for a in field.elements() {
            for b in field.elements() {
                for c in field.elements() {
                    for d in field.elements() {
                        if let Ok(x) = GroupElement::new(&field, [a, b, c, d]) {
                            elements.push(x);
                        }
                    }
                }
            }
        }
        let id = GroupElement::identity();
        elements.retain(|x| *x != id);
        elements.insert(0, id);

        let mut lookup = vec![u16::MAX; q.pow(4)];
        for (i, x) in elements.iter().enumerate() {
            lookup[pack(&field, x)] = i as u16;
        }
        let mut group = SpecialLinearGroup {
            field,
            elements,
            lookup,
            inverse: Vec::new(),
            mul_table: None,
            frob: Vec::new(),
        };
        group.inverse = (0..group.order())
            .map(|i| group.index_of(&group.inverse(&group.elements[i])) as u16)
            .collect();
        let e = group.field.degree();
        group.frob = (0..e)
            .map(|k| {
                group
                    .elements
                    .iter()
                    .map(|x| group.index_of(&group.frobenius(x, k)) as u16)
                    .collect()
            })
            .collect();
        let n = group.order();
        if n <= MUL_TABLE_LIMIT {
            let mut table = vec![0u16; n * n];
            for i in 0..n {
                for j in 0..n {
                    let p = group.multiply(&group.elements[i], &group.elements[j]);
                    table[i * n + j] = group.index_of(&p) as u16;
                }
            }
            group.mul_table = Some(table);
        }
        group
    }

    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    /// Field order q.
    pub fn q(&self) -> usize {
        self.field.order()
    }

    /// |SL(2,q)| = q(q²−1).
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, idx: u32) -> GroupElement {
        self.elements[idx as usize]
    }

    pub fn index_of(&self, x: &GroupElement) -> u32 {
        let i = self.lookup[pack(&self.field, x)];
        debug_assert!(i != u16::MAX);
        i as u32
    }

    pub fn element_from_codes(&self, codes: [u32; 4]) -> Result<GroupElement, GroupError> {
        GroupElement::from_codes(&self.field, codes)
    }

    pub fn multiply(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let f = &self.field;
        let [a, b, c, d] = x.entries;
        let [e, g, h, k] = y.entries;
        GroupElement {
            entries: [
                f.add(f.mul(a, e), f.mul(b, h)),
                f.add(f.mul(a, g), f.mul(b, k)),
                f.add(f.mul(c, e), f.mul(d, h)),
                f.add(f.mul(c, g), f.mul(d, k)),
            ],
        }
    }

    /// In characteristic 2 the inverse of (a,b;c,d) is (d,b;c,a).
    pub fn inverse(&self, x: &GroupElement) -> GroupElement {
        let [a, b, c, d] = x.entries;
        GroupElement { entries: [d, b, c, a] }
    }

    /// h⁻¹·x·h
    pub fn conjugate(&self, x: &GroupElement, h: &GroupElement) -> GroupElement {
        self.multiply(&self.multiply(&self.inverse(h), x), h)
    }

    pub fn frobenius(&self, x: &GroupElement, k: u32) -> GroupElement {
        GroupElement { entries: x.entries.map(|v| self.field.frobenius(v, k)) }
    }

    pub fn mul(&self, i: u32, j: u32) -> u32 {
        match &self.mul_table {
            Some(t) => t[i as usize * self.order() + j as usize] as u32,
            None => self.index_of(&self.multiply(&self.element(i), &self.element(j))),
        }
    }

    pub fn inv(&self, i: u32) -> u32 {
        self.inverse[i as usize] as u32
    }

    pub fn conj(&self, i: u32, h: u32) -> u32 {
        self.mul(self.mul(self.inv(h), i), h)
    }

    pub fn frob(&self, i: u32, k: u32) -> u32 {
        self.frob[(k % self.field.degree()) as usize][i as usize] as u32
    }

    pub fn power(&self, i: u32, n: u64) -> u32 {
        (0..n).fold(0, |acc, _| self.mul(acc, i))
    }

    pub fn element_order(&self, i: u32) -> usize {
        let mut x = i;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, i);
            n += 1;
        }
        n
    }

    /// Smallest subgroup containing the given elements.
    pub fn generate(&self, generators: &[u32]) -> Subgroup {
        let mut seen: BTreeSet<u32> = BTreeSet::from([0]);
        let mut frontier = vec![0u32];
        while let Some(x) = frontier.pop() {
            for &g in generators {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        Subgroup::from_indices(seen.into_iter().collect())
    }

    /// The set {h⁻¹·s·h : s ∈ S}.
    pub fn conjugate_set(&self, set: &Subgroup, h: u32) -> Subgroup {
        Subgroup::from_indices(set.elements().iter().map(|&s| self.conj(s, h)).collect())
    }

    /// The upper unitriangular subgroup {(1,b;0,1)}.
    pub fn unitriangular(&self) -> Subgroup {
        let one = FieldElement::ONE;
        let zero = FieldElement::ZERO;
        Subgroup::from_indices(
            self.field
                .elements()
                .map(|b| self.index_of(&GroupElement { entries: [one, b, zero, one] }))
                .collect(),
        )
    }

    /// All Sylow 2-subgroups, as the distinct conjugates of the unitriangular
    /// group, sorted.
    pub fn sylow_subgroups(&self) -> Vec<Subgroup> {
        let t = self.unitriangular();
        let all: BTreeSet<Subgroup> =
            (0..self.order() as u32).map(|h| self.conjugate_set(&t, h)).collect();
        all.into_iter().collect()
    }

    /// The norm-1 group {(a, b; db, a+tb) : a²+tab+db² = 1}, cyclic of order q+1.
    pub fn cyclic_subgroup(&self, d: FieldElement, t: FieldElement) -> Result<Subgroup, GroupError> {
        let f = &self.field;
        if !f.discriminant_check(d, t) {
            return Err(GroupError::NotQuadraticNonResidue { d: d.code(), t: t.code() });
        }
        let mut members = Vec::new();
        for a in f.elements() {
            for b in f.elements() {
                let norm = f.add(f.add(f.mul(a, a), f.mul(t, f.mul(a, b))), f.mul(d, f.mul(b, b)));
                if norm == FieldElement::ONE {
                    let x = GroupElement::new(f, [a, b, f.mul(d, b), f.add(a, f.mul(t, b))])?;
                    members.push(self.index_of(&x));
                }
            }
        }
        Ok(Subgroup::from_indices(members))
    }

    /// The subgroup C of order q+1 used throughout: d = 1, t = 1, which needs
    /// X²+X+1 to be irreducible (e odd).
    pub fn standard_cyclic_subgroup(&self) -> Result<Subgroup, GroupError> {
        self.cyclic_subgroup(FieldElement::ONE, FieldElement::ONE)
    }

    pub fn apply_aut(&self, alpha: &AutMap, x: &GroupElement) -> GroupElement {
        self.frobenius(&self.conjugate(x, &alpha.conjugator), alpha.frob)
    }

    pub fn apply_aut_idx(&self, alpha: &AutMap, i: u32) -> u32 {
        let h = self.index_of(&alpha.conjugator);
        self.frob(self.conj(i, h), alpha.frob)
    }

    /// The automorphism as a permutation of element indices.
    pub fn aut_permutation(&self, alpha: &AutMap) -> Vec<u32> {
        let h = self.index_of(&alpha.conjugator);
        (0..self.order() as u32).map(|i| self.frob(self.conj(i, h), alpha.frob)).collect()
    }

    fn normalize(&self, alpha: AutMap) -> AutMap {
        AutMap { conjugator: alpha.conjugator, frob: alpha.frob % self.field.degree() }
    }

    /// The map "first `first`, then `second`".
    pub fn compose_aut(&self, first: &AutMap, second: &AutMap) -> AutMap {
        let e = self.field.degree();
        let back = (e - first.frob % e) % e;
        let h = self.multiply(&first.conjugator, &self.frobenius(&second.conjugator, back));
        self.normalize(AutMap { conjugator: h, frob: first.frob + second.frob })
    }

    pub fn inverse_aut(&self, alpha: &AutMap) -> AutMap {
        let e = self.field.degree();
        let k = alpha.frob % e;
        let h = self.inverse(&self.frobenius(&alpha.conjugator, k));
        AutMap { conjugator: h, frob: (e - k) % e }
    }

    /// Order of an automorphism as a map.
    pub fn aut_order(&self, alpha: &AutMap) -> usize {
        let id = AutMap::identity();
        let mut x = self.normalize(*alpha);
        let mut n = 1;
        while x != id {
            x = self.compose_aut(&x, alpha);
            n += 1;
        }
        n
    }

    /// Every automorphism γ_h∘φ^k. For even q the center is trivial and these
    /// |SL(2,q)|·e pairs are pairwise distinct maps.
    pub fn all_automorphisms(&self) -> Vec<AutMap> {
        let mut out = Vec::with_capacity(self.order() * self.field.degree() as usize);
        for h in &self.elements {
            for k in 0..self.field.degree() {
                out.push(AutMap { conjugator: *h, frob: k });
            }
        }
        out
    }

    /// The setwise stabilizer 𝔄_S of a subset.
    pub fn aut_stabilizer_of_subgroup(&self, s: &Subgroup) -> Vec<AutMap> {
        self.all_automorphisms()
            .into_iter()
            .filter(|alpha| self.maps_set_onto(alpha, s, s))
            .collect()
    }

    /// True iff α maps the set `from` onto the set `to`.
    pub fn maps_set_onto(&self, alpha: &AutMap, from: &Subgroup, to: &Subgroup) -> bool {
        from.len() == to.len()
            && from.elements().iter().all(|&x| to.contains(self.apply_aut_idx(alpha, x)))
    }

    /// Closure of a set of automorphisms under composition.
    pub fn generate_auts(&self, generators: &[AutMap]) -> Vec<AutMap> {
        let mut seen: HashSet<AutMap> = HashSet::from([AutMap::identity()]);
        let mut frontier = vec![AutMap::identity()];
        while let Some(x) = frontier.pop() {
            for g in generators {
                let y = self.compose_aut(&x, g);
                if seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        let mut out: Vec<AutMap> = seen.into_iter().collect();
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf8_group() -> SpecialLinearGroup {
        SpecialLinearGroup::new(FieldParams::gf8())
    }

    fn m(group: &SpecialLinearGroup, codes: [u32; 4]) -> GroupElement {
        group.element_from_codes(codes).unwrap()
    }

    // g = (z², z⁴; z⁴, z)
    const G: [u32; 4] = [4, 6, 6, 2];
    const F: [u32; 4] = [0, 1, 1, 0];

    #[test]
    fn enumeration_sizes_match_brute_force() {
        for e in 1..=3 {
            let field = FieldParams::with_degree(e).unwrap();
            let q = field.order() as u32;
            let mut brute = 0;
            for code in 0..q.pow(4) {
                let c = [code / q.pow(3), code / q.pow(2) % q, code / q % q, code % q];
                if GroupElement::from_codes(&field, c).is_ok() {
                    brute += 1;
                }
            }
            let group = SpecialLinearGroup::new(field);
            assert_eq!(group.order(), brute);
        }
        assert_eq!(SpecialLinearGroup::new(FieldParams::with_degree(1).unwrap()).order(), 6);
        assert_eq!(SpecialLinearGroup::new(FieldParams::with_degree(2).unwrap()).order(), 60);
        assert_eq!(gf8_group().order(), 504);
    }

    #[test]
    fn index_is_identity_first_then_lexicographic() {
        let group = gf8_group();
        assert_eq!(group.element(0), GroupElement::identity());
        assert!(group.elements()[1..].windows(2).all(|w| w[0] < w[1]));
        for (i, x) in group.elements().iter().enumerate() {
            assert_eq!(group.index_of(x), i as u32);
        }
    }

    #[test]
    fn determinant_enforced() {
        let field = FieldParams::gf8();
        assert!(matches!(
            GroupElement::from_codes(&field, [1, 1, 1, 1]),
            Err(GroupError::Determinant(..))
        ));
    }

    #[test]
    fn multiply_examples() {
        let group = gf8_group();
        let id = GroupElement::identity();
        let f = m(&group, F);
        let g = m(&group, G);
        for x in group.elements() {
            assert_eq!(group.multiply(&id, x), *x);
        }
        assert_eq!(group.multiply(&f, &f), id);
        assert_eq!(group.element_order(group.index_of(&g)), 9);
    }

    #[test]
    fn inverse_examples() {
        let group = gf8_group();
        let id = GroupElement::identity();
        let g = m(&group, G);
        assert_eq!(group.inverse(&id), id);
        assert_eq!(group.multiply(&group.inverse(&g), &g), id);
        let u = m(&group, [1, 1, 0, 1]);
        assert_eq!(group.inverse(&u), u);
        assert_eq!(group.multiply(&u, &u), id);
        for i in 0..group.order() as u32 {
            assert_eq!(group.mul(i, group.inv(i)), 0);
        }
    }

    #[test]
    fn conjugate_examples() {
        let group = gf8_group();
        let id = GroupElement::identity();
        let g = m(&group, G);
        let g3 = group.multiply(&group.multiply(&g, &g), &g);
        for x in group.elements().iter().step_by(7) {
            assert_eq!(group.conjugate(x, &id), *x);
            assert_eq!(group.conjugate(&id, x), id);
        }
        assert_eq!(group.conjugate(&g3, &g), g3);
    }

    #[test]
    fn sylow_subgroups_partition_the_unipotents() {
        let group = gf8_group();
        let sylows = group.sylow_subgroups();
        assert_eq!(sylows.len(), 9);
        assert!(sylows.iter().all(|s| s.len() == 8));
        assert!(sylows.contains(&group.unitriangular()));
        for (i, a) in sylows.iter().enumerate() {
            for b in &sylows[i + 1..] {
                let common: Vec<_> = a.elements().iter().filter(|x| b.contains(**x)).collect();
                assert_eq!(common, vec![&0]);
            }
        }
        let union: BTreeSet<u32> =
            sylows.iter().flat_map(|s| s.elements().iter().copied()).filter(|&x| x != 0).collect();
        assert_eq!(union.len(), 63);

        let small = SpecialLinearGroup::new(FieldParams::with_degree(1).unwrap());
        let small_sylows = small.sylow_subgroups();
        assert_eq!(small_sylows.len(), 3);
        assert!(small_sylows.iter().all(|s| s.len() == 2));
    }

    #[test]
    fn cyclic_subgroup_contains_g() {
        let group = gf8_group();
        let c = group.standard_cyclic_subgroup().unwrap();
        assert_eq!(c.len(), 9);
        assert!(c.contains(0));
        let g = group.index_of(&m(&group, G));
        assert!(c.contains(g));
        assert_eq!(group.generate(&[g]), c);
        let err = group.cyclic_subgroup(FieldElement::ONE, FieldElement::ZERO).unwrap_err();
        assert!(err.to_string().starts_with("not a quadratic non-residue setup"));
    }

    #[test]
    fn subgroups_of_order_nine_are_conjugate_to_c() {
        let group = gf8_group();
        let c = group.standard_cyclic_subgroup().unwrap();
        let conjugates: HashSet<Subgroup> =
            (0..group.order() as u32).map(|h| group.conjugate_set(&c, h)).collect();
        // every element of order 9 generates one of them; in characteristic 2
        // an order-9 subgroup is cyclic, so this covers all of them
        for i in 0..group.order() as u32 {
            if group.element_order(i) == 9 {
                assert!(conjugates.contains(&group.generate(&[i])));
            }
        }
        assert_eq!(conjugates.len(), 28);
    }

    #[test]
    fn apply_aut_examples() {
        let group = gf8_group();
        let f = m(&group, F);
        let c = group.standard_cyclic_subgroup().unwrap();
        for x in group.elements() {
            assert_eq!(group.apply_aut(&AutMap::identity(), x), *x);
            let [a, b, cc, d] = x.entries();
            let swapped = group.apply_aut(&AutMap::conjugation(f), x);
            assert_eq!(swapped.entries(), [d, cc, b, a]);
        }
        let g = m(&group, G);
        let image = group.apply_aut(&AutMap::frobenius(1), &g);
        assert!(c.contains(group.index_of(&image)));
    }

    #[test]
    fn compose_matches_sequential_application() {
        let group = gf8_group();
        let g = m(&group, G);
        let f = m(&group, F);
        let maps = [
            AutMap::identity(),
            AutMap::conjugation(g),
            AutMap { conjugator: g, frob: 1 },
            AutMap { conjugator: f, frob: 2 },
            AutMap { conjugator: group.element(77), frob: 1 },
        ];
        for a in &maps {
            for b in &maps {
                let ab = group.compose_aut(a, b);
                for x in group.elements().iter().step_by(5) {
                    assert_eq!(group.apply_aut(&ab, x), group.apply_aut(b, &group.apply_aut(a, x)));
                }
            }
            let inv = group.inverse_aut(a);
            assert_eq!(group.compose_aut(a, &inv), AutMap::identity());
            assert_eq!(group.compose_aut(a, &AutMap::identity()), *a);
        }
        let gf = AutMap::conjugation(f);
        assert_eq!(group.compose_aut(&gf, &gf), AutMap::identity());
        let gphi = AutMap { conjugator: g, frob: 1 };
        let mut acc = AutMap::identity();
        for _ in 0..18 {
            acc = group.compose_aut(&acc, &gphi);
        }
        for x in group.elements() {
            assert_eq!(group.apply_aut(&acc, x), *x);
        }
    }

    #[test]
    fn automorphism_group_sizes() {
        let group = gf8_group();
        let all = group.all_automorphisms();
        assert_eq!(all.len(), 1512);
        // distinct pairs give distinct maps: compare images of generators
        let gens = [group.index_of(&m(&group, G)), group.index_of(&m(&group, F)), 9];
        let images: HashSet<Vec<u32>> = all
            .iter()
            .map(|a| gens.iter().map(|&x| group.apply_aut_idx(a, x)).collect())
            .collect();
        assert_eq!(images.len(), 1512);

        let c = group.standard_cyclic_subgroup().unwrap();
        let stab = group.aut_stabilizer_of_subgroup(&c);
        assert_eq!(stab.len(), 54);
        assert!(stab.contains(&AutMap::identity()));
        let set: HashSet<AutMap> = stab.iter().copied().collect();
        for a in &stab {
            assert!(set.contains(&group.inverse_aut(a)));
            for b in stab.iter().step_by(5) {
                assert!(set.contains(&group.compose_aut(a, b)));
            }
        }
    }

    #[test]
    fn automorphisms_are_homomorphisms_on_sl2_2() {
        let group = SpecialLinearGroup::new(FieldParams::with_degree(1).unwrap());
        for alpha in group.all_automorphisms() {
            for x in 0..6 {
                for y in 0..6 {
                    let lhs = group.apply_aut_idx(&alpha, group.mul(x, y));
                    let rhs = group.mul(group.apply_aut_idx(&alpha, x), group.apply_aut_idx(&alpha, y));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
