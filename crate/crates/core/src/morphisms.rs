//! Automorphisms and isomorphisms of affine SL(2,q)-unitals and their
//! closures.
//!
//! Every isomorphism between two such unitals (q ≥ 3) has the form αρ_h with
//! α an automorphism of SL(2,q) carrying S₁ to S₂ and ρ_h a right
//! translation. Right translations are automorphisms of every U_{S,𝒟} and
//! act transitively on points, so a map αρ_h sends the block set onto the
//! block set iff it does so for the 64 blocks through 𝟙: any block is
//! B₀·g with B₀ ∋ 𝟙, and ψ(B₀·g) = ψ(B₀)·(h⁻¹α(g)h).
//!
//! For closures, Aut(U^π) = Aut(U) is imported from the literature; what is
//! checked here is the inclusion Aut(U) ⊆ Aut(U^π) for parallelisms that
//! Aut(U) preserves.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::design::{AffineUnital, ClosedUnital, Incidence, Parallelism};
use crate::sl2q::{AutMap, GroupElement, SpecialLinearGroup, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("reduction not applicable: {0}")]
    ReductionNotApplicable(String),
}

/// The point map x ↦ α(x)·h.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnitalMap {
    pub alpha: AutMap,
    pub translator: GroupElement,
}

impl UnitalMap {
    pub fn identity() -> Self {
        UnitalMap { alpha: AutMap::identity(), translator: GroupElement::identity() }
    }

    pub fn translation(h: GroupElement) -> Self {
        UnitalMap { alpha: AutMap::identity(), translator: h }
    }

    pub fn automorphism(alpha: AutMap) -> Self {
        UnitalMap { alpha, translator: GroupElement::identity() }
    }

    pub fn apply(&self, group: &SpecialLinearGroup, x: u32) -> u32 {
        group.mul(group.apply_aut_idx(&self.alpha, x), group.index_of(&self.translator))
    }

    /// The point permutation.
    pub fn permutation(&self, group: &SpecialLinearGroup) -> Vec<u32> {
        let perm = group.aut_permutation(&self.alpha);
        let h = group.index_of(&self.translator);
        perm.into_iter().map(|x| group.mul(x, h)).collect()
    }

    /// "First `self`, then `second`": x ↦ α₂(α₁(x)·h₁)·h₂.
    pub fn then(&self, group: &SpecialLinearGroup, second: &UnitalMap) -> UnitalMap {
        let alpha = group.compose_aut(&self.alpha, &second.alpha);
        let h = group.multiply(&group.apply_aut(&second.alpha, &self.translator), &second.translator);
        UnitalMap { alpha, translator: h }
    }

    pub fn inverse(&self, group: &SpecialLinearGroup) -> UnitalMap {
        let alpha = group.inverse_aut(&self.alpha);
        let h = group.inverse(&group.apply_aut(&alpha, &self.translator));
        UnitalMap { alpha, translator: h }
    }
}

impl fmt::Display for UnitalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} then rho{}", self.alpha, self.translator)
    }
}

/// Which blocks `is_automorphism` inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scope {
    /// The blocks through 𝟙; sufficient because R acts transitively.
    #[default]
    ThroughIdentity,
    AllBlocks,
}

fn image_block(perm: &[u32], block: &[u32]) -> Vec<u32> {
    let mut image: Vec<u32> = block.iter().map(|&x| perm[x as usize]).collect();
    image.sort_unstable();
    image
}

/// True iff `perm` (a point permutation of `source`) carries the blocks
/// through 𝟙, or all blocks, onto blocks of `target`.
fn maps_blocks(source: &AffineUnital, target: &AffineUnital, perm: &[u32], scope: Scope) -> bool {
    let all: Vec<u32>;
    let blocks: &[u32] = match scope {
        Scope::ThroughIdentity => source.blocks_through_identity(),
        Scope::AllBlocks => {
            all = (0..source.n_blocks() as u32).collect();
            &all
        }
    };
    source.n_blocks() == target.n_blocks()
        && blocks.iter().all(|&b| {
            target.incidence().block_id(&image_block(perm, source.incidence().block(b))).is_some()
        })
}

pub fn is_automorphism(unital: &AffineUnital, psi: &UnitalMap) -> bool {
    is_automorphism_with(unital, psi, Scope::ThroughIdentity)
}

pub fn is_automorphism_with(unital: &AffineUnital, psi: &UnitalMap, scope: Scope) -> bool {
    maps_blocks(unital, unital, &psi.permutation(unital.group()), scope)
}

/// True iff ψ is an isomorphism from `source` onto `target`.
pub fn is_isomorphism(source: &AffineUnital, target: &AffineUnital, psi: &UnitalMap) -> bool {
    source.q() == target.q() && maps_blocks(source, target, &psi.permutation(source.group()), Scope::ThroughIdentity)
}

/// True iff the point set `points` (any order) is a block of `unital`.
pub fn is_block(unital: &AffineUnital, points: &[u32]) -> bool {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    unital.incidence().block_id(&sorted).is_some()
}

/// Order, element orders and a structure label for a small finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDescription {
    pub order: usize,
    /// element order → number of elements of that order
    pub order_histogram: BTreeMap<usize, usize>,
    pub cyclic: bool,
    pub abelian: bool,
    pub label: String,
}

impl GroupDescription {
    /// Describes the group given by its Cayley table (`table[i][j]` = i·j) and
    /// the index of its identity.
    pub fn from_table(table: &[Vec<usize>], identity: usize) -> Self {
        let n = table.len();
        let order_of = |x: usize| {
            let (mut y, mut k) = (x, 1);
            while y != identity {
                y = table[y][x];
                k += 1;
            }
            k
        };
        let orders: Vec<usize> = (0..n).map(order_of).collect();
        let mut order_histogram = BTreeMap::new();
        for &o in &orders {
            *order_histogram.entry(o).or_insert(0) += 1;
        }
        let abelian = (0..n).all(|i| (0..n).all(|j| table[i][j] == table[j][i]));
        let cyclic = orders.contains(&n);
        let label = if cyclic {
            format!("C{n}")
        } else if abelian {
            unlabeled(n)
        } else {
            [(9, 6), (3, 6), (9, 3)]
                .into_iter()
                .find(|&(a, b)| a * b == n && has_split_pattern(table, identity, &orders, a, b))
                .map(|(a, b)| format!("C{a}:C{b}"))
                .unwrap_or_else(|| unlabeled(n))
        };
        GroupDescription { order: n, order_histogram, cyclic, abelian, label }
    }
}

fn unlabeled(n: usize) -> String {
    format!("order {n}, unlabeled")
}

fn cyclic_span(table: &[Vec<usize>], identity: usize, x: usize) -> Vec<usize> {
    let mut out = vec![identity];
    let mut y = x;
    while y != identity {
        out.push(y);
        y = table[y][x];
    }
    out.sort_unstable();
    out
}

/// A normal cyclic subgroup of order a and a cyclic subgroup of order b
/// meeting trivially.
fn has_split_pattern(table: &[Vec<usize>], identity: usize, orders: &[usize], a: usize, b: usize) -> bool {
    let n = table.len();
    let inverse: Vec<usize> = (0..n).map(|x| (0..n).find(|&y| table[x][y] == identity).unwrap()).collect();
    let normal = |set: &[usize]| {
        (0..n).all(|g| set.iter().all(|&x| set.binary_search(&table[table[inverse[g]][x]][g]).is_ok()))
    };
    let normal_cyclic: Vec<Vec<usize>> = (0..n)
        .filter(|&x| orders[x] == a)
        .map(|x| cyclic_span(table, identity, x))
        .filter(|s| normal(s))
        .collect();
    normal_cyclic.iter().any(|nset| {
        (0..n).filter(|&y| orders[y] == b).any(|y| {
            cyclic_span(table, identity, y).iter().all(|z| *z == identity || nset.binary_search(z).is_err())
        })
    })
}

impl fmt::Display for GroupDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.order, self.label)
    }
}

/// Describes a finite group of automorphisms of SL(2,q).
pub fn describe_aut_group(group: &SpecialLinearGroup, maps: &[AutMap]) -> GroupDescription {
    let index: HashMap<AutMap, usize> = maps.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let table: Vec<Vec<usize>> = maps
        .iter()
        .map(|a| maps.iter().map(|b| index[&group.compose_aut(a, b)]).collect())
        .collect();
    GroupDescription::from_table(&table, index[&AutMap::identity()])
}

/// Aut(U)_𝟙 as a subgroup of 𝔄_S.
#[derive(Debug, Clone)]
pub struct Stabilizer {
    pub maps: Vec<AutMap>,
    pub description: GroupDescription,
    /// |𝔄_S|
    pub bound: usize,
    /// |SL(2,q)|
    pub translations: usize,
}

impl Stabilizer {
    pub fn order(&self) -> usize {
        self.maps.len()
    }

    /// |Aut(U)| = |Aut(U)_𝟙|·|SL(2,q)|.
    pub fn full_order(&self) -> usize {
        self.maps.len() * self.translations
    }

    /// Index of Aut(U) in 𝔄_S ⋉ R.
    pub fn index(&self) -> usize {
        self.bound / self.maps.len()
    }

    pub fn contains(&self, alpha: &AutMap) -> bool {
        self.maps.contains(alpha)
    }
}

/// All α ∈ 𝔄_S preserving the block set.
pub fn stabilizer_of_identity(unital: &AffineUnital) -> Stabilizer {
    let group = unital.group();
    let bound = group.aut_stabilizer_of_subgroup(unital.system().subgroup());
    let maps: Vec<AutMap> = bound
        .par_iter()
        .filter(|alpha| is_automorphism(unital, &UnitalMap::automorphism(**alpha)))
        .copied()
        .collect();
    Stabilizer {
        description: describe_aut_group(group, &maps),
        bound: bound.len(),
        translations: group.order(),
        maps,
    }
}

pub fn full_aut_order(stabilizer: &Stabilizer) -> usize {
    stabilizer.full_order()
}

/// An isomorphism U₁ → U₂ of the form α (followed by the trivial
/// translation), if one exists.
pub fn are_isomorphic_affine(source: &AffineUnital, target: &AffineUnital) -> Option<UnitalMap> {
    isomorphisms_affine(source, target).into_iter().next()
}

/// Every α ∈ 𝔄 with S₁α = S₂ that is an isomorphism; composing with R gives
/// all isomorphisms.
pub fn isomorphisms_affine(source: &AffineUnital, target: &AffineUnital) -> Vec<UnitalMap> {
    if source.q() != target.q() || source.group().field() != target.group().field() {
        return Vec::new();
    }
    let group = source.group();
    let (s1, s2) = (source.system().subgroup(), target.system().subgroup());
    group
        .all_automorphisms()
        .into_par_iter()
        .filter(|alpha| group.maps_set_onto(alpha, s1, s2))
        .map(UnitalMap::automorphism)
        .filter(|psi| is_isomorphism(source, target, psi))
        .collect()
}

/// Class index in `to` of the ψ-image of each short block of `source`, or
/// `None` if some image is not a block of `target`.
fn class_images(
    source: &AffineUnital,
    target: &AffineUnital,
    to: &Parallelism,
    perm: &[u32],
    class: &[u32],
) -> Option<Vec<usize>> {
    class
        .iter()
        .map(|&b| {
            let image = image_block(perm, source.incidence().block(b));
            target.incidence().block_id(&image).and_then(|id| to.class_of(id))
        })
        .collect()
}

fn transports(source: &AffineUnital, from: &Parallelism, target: &AffineUnital, to: &Parallelism, perm: &[u32]) -> bool {
    from.classes().iter().all(|class| match class_images(source, target, to, perm, class) {
        Some(images) => images.windows(2).all(|w| w[0] == w[1]),
        None => false,
    })
}

/// True iff ψ sends each class of `from` into a single class of `to`.
pub fn maps_parallelism(unital: &AffineUnital, psi: &UnitalMap, from: &Parallelism, to: &Parallelism) -> bool {
    transports(unital, from, unital, to, &psi.permutation(unital.group()))
}

/// Whether U₁^{π₁} ≅ U₂^{π₂}, witnessed by an affine isomorphism carrying π₁
/// to π₂. Both full automorphism groups fix [∞] for non-classical closures,
/// which reduces the question to the affine parts.
pub fn closures_isomorphic(
    u1: &AffineUnital,
    pi1: &Parallelism,
    u2: &AffineUnital,
    pi2: &Parallelism,
) -> Result<Option<UnitalMap>, MorphismError> {
    for (name, u) in [("first", u1), ("second", u2)] {
        if is_classical(u) {
            return Err(MorphismError::ReductionNotApplicable(format!(
                "{name} unital admits all of 𝔄_S ⋉ R (classical)"
            )));
        }
    }
    let group = u1.group();
    let elements: Vec<GroupElement> = group.elements().to_vec();
    for psi in isomorphisms_affine(u1, u2) {
        let found = elements.par_iter().find_map_first(|h| {
            let map = psi.then(group, &UnitalMap::translation(*h));
            transports(u1, pi1, u2, pi2, &map.permutation(group)).then_some(map)
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Classical detection: the stabilizer is all of 𝔄_S.
pub fn is_classical(unital: &AffineUnital) -> bool {
    let stab = stabilizer_of_identity(unital);
    stab.order() == stab.bound
}

/// Extends a map of the affine points to the closure: the ideal point of a
/// class goes to the ideal point of the class containing its image blocks.
/// `None` if ψ is not an automorphism of U or does not preserve π.
pub fn extend_to_closure(unital: &AffineUnital, closed: &ClosedUnital, psi: &UnitalMap) -> Option<Vec<u32>> {
    let group = unital.group();
    let mut perm = psi.permutation(group);
    if !maps_blocks(unital, unital, &perm, Scope::ThroughIdentity) {
        return None;
    }
    let pi = closed.parallelism();
    for class in pi.classes() {
        let images = class_images(unital, unital, pi, &perm[..unital.n_points()], class)?;
        if images.windows(2).any(|w| w[0] != w[1]) {
            return None;
        }
        perm.push(closed.ideal_point(images[0]));
    }
    Some(perm)
}

/// True iff `perm` maps every block of the incidence structure to a block.
pub fn is_incidence_automorphism(inc: &Incidence, perm: &[u32]) -> bool {
    perm.len() == inc.n_points()
        && inc.blocks().iter().all(|b| {
            let mut image: Vec<u32> = b.iter().map(|&x| perm[x as usize]).collect();
            image.sort_unstable();
            inc.block_id(&image).is_some()
        })
}

/// True iff every right translation ρ_t, t ∈ T, extends to the closure and
/// fixes each block through `center`.
pub fn verify_translation(unital: &AffineUnital, closed: &ClosedUnital, t: &Subgroup, center: u32) -> bool {
    let group = unital.group();
    let inc = closed.incidence();
    t.elements().iter().all(|&x| {
        let Some(perm) = extend_to_closure(unital, closed, &UnitalMap::translation(group.element(x))) else {
            return false;
        };
        inc.blocks_through(center).iter().all(|&b| {
            let mut image: Vec<u32> = inc.block(b).iter().map(|&p| perm[p as usize]).collect();
            image.sort_unstable();
            image == inc.block(b)
        })
    })
}

/// The ideal point whose class contains the short block T itself.
pub fn center_of(closed: &ClosedUnital, t: &Subgroup) -> Option<u32> {
    let inc = closed.incidence();
    closed
        .parallelism()
        .classes()
        .iter()
        .position(|class| class.iter().any(|&b| inc.block(b).iter().copied().filter(|&p| (p as usize) < closed.affine_points()).eq(t.elements().iter().copied())))
        .map(|class| closed.ideal_point(class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, constants, gf8_group, Entry};
    use crate::design::{build_affine_unital, close, flat_parallelism, natural_parallelism};
    use rand::{Rng, SeedableRng};
    use std::sync::OnceLock;

    fn unital(entry: Entry) -> &'static AffineUnital {
        static CACHE: OnceLock<Vec<AffineUnital>> = OnceLock::new();
        let all = CACHE.get_or_init(|| {
            Entry::ALL.iter().map(|&e| build_affine_unital(&catalog::load(e).unwrap()).unwrap()).collect()
        });
        &all[Entry::ALL.iter().position(|&e| e == entry).unwrap()]
    }

    #[test]
    fn translations_are_automorphisms() {
        let group = gf8_group();
        for entry in Entry::ALL {
            for h in [1u32, 77, 503] {
                let psi = UnitalMap::translation(group.element(h));
                assert!(is_automorphism(unital(entry), &psi));
                assert!(is_automorphism_with(unital(entry), &psi, Scope::AllBlocks));
            }
        }
    }

    #[test]
    fn named_conjugations() {
        let c = constants();
        let gf = UnitalMap::automorphism(c.gamma_f());
        let gg = UnitalMap::automorphism(c.gamma_g());
        assert!(is_automorphism(unital(Entry::Wu), &gf));
        assert!(!is_automorphism(unital(Entry::Ou), &gf));
        assert!(!is_automorphism(unital(Entry::Pu), &gf));
        assert!(!is_automorphism(unital(Entry::Wu), &gg));
        assert!(is_automorphism(unital(Entry::Ou), &gg));
        assert!(is_automorphism(unital(Entry::Wu), &UnitalMap::automorphism(c.gamma_g3(&gf8_group()))));
    }

    #[test]
    fn scopes_agree() {
        let group = gf8_group();
        let u = unital(Entry::Ou);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let all = group.aut_stabilizer_of_subgroup(u.system().subgroup());
        for _ in 0..20 {
            let alpha = all[rng.gen_range(0..all.len())];
            let psi = UnitalMap { alpha, translator: group.element(rng.gen_range(0..504)) };
            assert_eq!(is_automorphism(u, &psi), is_automorphism_with(u, &psi, Scope::AllBlocks));
        }
    }

    #[test]
    fn unital_map_composition_and_inverse() {
        let group = gf8_group();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let auts = group.all_automorphisms();
        for _ in 0..50 {
            let a = UnitalMap { alpha: auts[rng.gen_range(0..auts.len())], translator: group.element(rng.gen_range(0..504)) };
            let b = UnitalMap { alpha: auts[rng.gen_range(0..auts.len())], translator: group.element(rng.gen_range(0..504)) };
            let ab = a.then(&group, &b);
            let inv = a.inverse(&group);
            for x in [0u32, 5, 200, 450] {
                assert_eq!(ab.apply(&group, x), b.apply(&group, a.apply(&group, x)));
                assert_eq!(inv.apply(&group, a.apply(&group, x)), x);
            }
        }
    }

    #[test]
    fn stabilizers() {
        let expected = [
            (Entry::Classical8, 54, "C9:C6", 27216, 1),
            (Entry::Wu, 18, "C3:C6", 9072, 3),
            (Entry::Ou, 27, "C9:C3", 13608, 2),
            (Entry::Pu, 27, "C9:C3", 13608, 2),
        ];
        for (entry, order, label, full, index) in expected {
            let stab = stabilizer_of_identity(unital(entry));
            assert_eq!(stab.order(), order, "{entry}");
            assert_eq!(stab.description.label, label, "{entry}");
            assert_eq!(stab.description.order_histogram.values().sum::<usize>(), order);
            assert_eq!(full_aut_order(&stab), full);
            assert_eq!(stab.index(), index);
        }
    }

    #[test]
    fn stabilizer_is_closed_and_products_are_automorphisms() {
        let group = gf8_group();
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for entry in [Entry::Wu, Entry::Ou] {
            let u = unital(entry);
            let stab = stabilizer_of_identity(u);
            for a in &stab.maps {
                for b in &stab.maps {
                    assert!(stab.contains(&group.compose_aut(a, b)));
                }
                for _ in 0..10 {
                    let h = group.element(rng.gen_range(0..504));
                    let psi = UnitalMap { alpha: *a, translator: h };
                    assert!(is_automorphism(u, &psi.then(&group, &UnitalMap::automorphism(stab.maps[3]))));
                }
            }
        }
    }

    #[test]
    fn stabilizer_matches_brute_force_over_all_of_a() {
        let group = gf8_group();
        let u = unital(Entry::Wu);
        let brute: Vec<AutMap> = group
            .all_automorphisms()
            .into_iter()
            .filter(|a| is_automorphism_with(u, &UnitalMap::automorphism(*a), Scope::AllBlocks))
            .collect();
        let mut stab = stabilizer_of_identity(u).maps;
        stab.sort();
        let mut brute = brute;
        brute.sort();
        assert_eq!(stab, brute);
    }

    #[test]
    fn describe_small_groups() {
        let cyclic: Vec<Vec<usize>> = (0..9).map(|i| (0..9).map(|j| (i + j) % 9).collect()).collect();
        let d = GroupDescription::from_table(&cyclic, 0);
        assert_eq!(d.label, "C9");
        assert!(d.cyclic && d.abelian);
        // S3 is not among the recognized patterns
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|r| perms.iter().position(|s| (0..3).all(|i| s[i] == r[p[i]])).unwrap())
                    .collect()
            })
            .collect();
        let d = GroupDescription::from_table(&table, 0);
        assert_eq!(d.label, "order 6, unlabeled");
        assert!(!d.abelian);
    }

    #[test]
    fn isomorphism_classes() {
        for (i, &a) in Entry::ALL.iter().enumerate() {
            for &b in &Entry::ALL[i + 1..] {
                assert!(are_isomorphic_affine(unital(a), unital(b)).is_none(), "{a} vs {b}");
            }
            assert!(are_isomorphic_affine(unital(a), unital(a)).is_some());
        }
    }

    #[test]
    fn first_pfingst_candidate_block_is_not_a_block() {
        let group = gf8_group();
        let f = group.index_of(&constants().f);
        let ou = catalog::load(Entry::Ou).unwrap();
        let d1 = &ou.bases()[0];
        let image: Vec<u32> = d1.iter().map(|&x| group.conj(x, f)).collect();
        assert!(!is_block(unital(Entry::Pu), &image));
        assert!(is_block(unital(Entry::Ou), d1));
    }

    #[test]
    fn relabeled_copy_is_isomorphic() {
        let group = gf8_group();
        let c = constants();
        let ou = catalog::load(Entry::Ou).unwrap();
        // the image of OU under γ_g·φ is again an OU with S = C
        let alpha = group.compose_aut(&c.gamma_g(), &AutMap::frobenius(1));
        let bases = ou
            .bases()
            .iter()
            .map(|b| b.iter().map(|&x| group.apply_aut_idx(&alpha, x)).collect())
            .collect();
        let moved = build_affine_unital(&ou.with_bases(bases).unwrap()).unwrap();
        let psi = are_isomorphic_affine(unital(Entry::Ou), &moved).unwrap();
        let back = are_isomorphic_affine(&moved, unital(Entry::Ou)).unwrap();
        assert!(is_isomorphism(&moved, unital(Entry::Ou), &psi.inverse(&group)));
        assert!(is_isomorphism(unital(Entry::Ou), &moved, &back.inverse(&group)));
    }

    #[test]
    fn parallelism_transport() {
        let group = gf8_group();
        let u = unital(Entry::Wu);
        let flat = flat_parallelism(u);
        let natural = natural_parallelism(u);
        assert!(maps_parallelism(u, &UnitalMap::identity(), &flat, &flat));
        for h in [1u32, 100, 321] {
            let psi = UnitalMap::translation(group.element(h));
            assert!(maps_parallelism(u, &psi, &flat, &flat));
            assert!(maps_parallelism(u, &psi, &natural, &natural));
            assert!(!maps_parallelism(u, &psi, &flat, &natural));
        }
        for alpha in stabilizer_of_identity(u).maps {
            assert!(!maps_parallelism(u, &UnitalMap::automorphism(alpha), &flat, &natural));
            assert!(maps_parallelism(u, &UnitalMap::automorphism(alpha), &flat, &flat));
        }
    }

    #[test]
    fn closures() {
        let wu = unital(Entry::Wu);
        let flat = flat_parallelism(wu);
        let natural = natural_parallelism(wu);
        assert!(closures_isomorphic(wu, &flat, wu, &flat).unwrap().is_some());
        assert!(closures_isomorphic(wu, &flat, wu, &natural).unwrap().is_none());
        let classical = unital(Entry::Classical8);
        let cf = flat_parallelism(classical);
        assert!(matches!(
            closures_isomorphic(classical, &cf, wu, &flat),
            Err(MorphismError::ReductionNotApplicable(_))
        ));
    }

    #[test]
    fn translations_on_closures() {
        let group = gf8_group();
        let wu = unital(Entry::Wu);
        let natural = close(wu, &natural_parallelism(wu)).unwrap();
        for t in group.sylow_subgroups() {
            let center = center_of(&natural, &t).unwrap();
            assert!(verify_translation(wu, &natural, &t, center));
        }
        let trivial = Subgroup::from_indices(vec![0]);
        assert!(verify_translation(wu, &natural, &trivial, natural.ideal_point(0)));
        let flat = close(wu, &flat_parallelism(wu)).unwrap();
        let t = group.unitriangular();
        let center = center_of(&flat, &t).unwrap();
        assert!(!verify_translation(wu, &flat, &t, center));
    }

    #[test]
    fn automorphisms_extend_to_closures() {
        let group = gf8_group();
        let ou = unital(Entry::Ou);
        let stab = stabilizer_of_identity(ou);
        for pi in [flat_parallelism(ou), natural_parallelism(ou)] {
            let closed = close(ou, &pi).unwrap();
            for (i, alpha) in stab.maps.iter().enumerate().step_by(4) {
                let psi = UnitalMap { alpha: *alpha, translator: group.element(i as u32 * 17 % 504) };
                let perm = extend_to_closure(ou, &closed, &psi).unwrap();
                assert!(is_incidence_automorphism(closed.incidence(), &perm));
                assert_eq!(perm[closed.ideal_point(0) as usize..].len(), 9);
            }
        }
    }
}
