//! Objects and morphisms of the category of short exact sequences
//! `0 -> A -> B -> B/A -> 0` over finite abelian groups.
//!
//! An object is a group `B` with a distinguished subgroup `A`; the quotient
//! is always materialized as a canonical group with an explicit projection.
//! A morphism `(B, A) -> (B', A')` is a homomorphism `f: B -> B'` with
//! `f(A) ⊆ A'`.

use std::fmt;
use std::sync::Arc;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{enumerate_homs, is_uniserial, quotient, span_order, Element, Group, Hom, QuotientView, Subgroup};

/// Which of the full subcategories an object belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScopeFlags {
    /// `A` and `C` both nonzero uniserial.
    pub in_u: bool,
    /// `A = 0`, `C` nonzero uniserial.
    pub in_u_lower0: bool,
    /// `C = 0`, `A` nonzero uniserial.
    pub in_u_upper0: bool,
}

#[derive(Debug)]
struct ExtData {
    group: Group,
    sub: Subgroup,
    quot: QuotientView,
    flags: ScopeFlags,
    aggregate: bool,
}

/// An object of the extension category.
#[derive(Clone, Debug)]
pub struct ExtObject(Arc<ExtData>);

fn uniserial_or_zero(g: &Group) -> bool {
    g.is_zero() || is_uniserial(g)
}

impl ExtObject {
    fn build(group: Group, sub: Subgroup, aggregate: bool) -> Result<ExtObject> {
        let quot = quotient(&group, &sub)?;
        let a = sub.canonical_type();
        let c = quot.abstract_type();
        if !aggregate {
            if !uniserial_or_zero(a) {
                return Err(Error::ScopeViolation(format!(
                    "subgroup A of type {a} is neither zero nor uniserial"
                )));
            }
            if !uniserial_or_zero(c) {
                return Err(Error::ScopeViolation(format!(
                    "quotient B/A of type {c} is neither zero nor uniserial"
                )));
            }
        }
        let flags = ScopeFlags {
            in_u: is_uniserial(a) && is_uniserial(c),
            in_u_lower0: a.is_zero() && is_uniserial(c),
            in_u_upper0: c.is_zero() && is_uniserial(a),
        };
        Ok(ExtObject(Arc::new(ExtData {
            group,
            sub,
            quot,
            flags,
            aggregate,
        })))
    }

    /// The zero object `0 -> 0 -> 0 -> 0 -> 0`.
    pub fn zero() -> ExtObject {
        let g = Group::zero_group();
        let sub = Subgroup::trivial(&g);
        Self::build(g, sub, false).expect("zero object")
    }

    pub fn from_subgroup(b: &Group, a: Subgroup, caps: &Caps) -> Result<ExtObject> {
        b.check_enumerable(caps)?;
        if a.ambient() != b {
            return Err(Error::DomainMismatch("subgroup lives in a different group".into()));
        }
        Self::build(b.clone(), a, false)
    }

    pub fn group(&self) -> &Group {
        &self.0.group
    }

    /// The distinguished subgroup `A`.
    pub fn sub(&self) -> &Subgroup {
        &self.0.sub
    }

    /// `C = B/A`.
    pub fn quot(&self) -> &QuotientView {
        &self.0.quot
    }

    pub fn a_type(&self) -> &Group {
        self.0.sub.canonical_type()
    }

    pub fn c_type(&self) -> &Group {
        self.0.quot.abstract_type()
    }

    pub fn flags(&self) -> ScopeFlags {
        self.0.flags
    }

    pub fn in_u(&self) -> bool {
        self.0.flags.in_u
    }

    pub fn is_aggregate(&self) -> bool {
        self.0.aggregate
    }

    pub fn is_zero(&self) -> bool {
        self.0.group.is_zero()
    }

    /// Both end terms are zero or uniserial.
    pub fn has_uniserial_ends(&self) -> bool {
        uniserial_or_zero(self.a_type()) && uniserial_or_zero(self.c_type())
    }

    pub fn ptr_eq(&self, other: &ExtObject) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// `true` when `f: B -> target.B` carries `A` into `target.A`.
    pub fn carries(&self, target: &ExtObject, f: &Hom) -> bool {
        self.sub().basis().iter().all(|a| target.sub().contains(&f.apply(a)))
    }
}

impl fmt::Display for ExtObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0 -> {} -> {} -> {} -> 0", self.a_type(), self.group(), self.c_type())
    }
}

/// Builds `(B, <gens>)`, requiring both end terms to be zero or uniserial.
pub fn make_ext(b: &Group, gens_of_a: &[Element], caps: &Caps) -> Result<ExtObject> {
    b.check_enumerable(caps)?;
    let a = crate::group::subgroup_generated(b, gens_of_a)?;
    ExtObject::build(b.clone(), a, false)
}

/// A morphism of extensions.
#[derive(Clone, Debug)]
pub struct ExtMorphism {
    source: ExtObject,
    target: ExtObject,
    map: Hom,
}

impl ExtMorphism {
    /// Checks that `f(A) ⊆ A'`.
    pub fn new(source: &ExtObject, target: &ExtObject, map: Hom) -> Result<ExtMorphism> {
        if map.domain() != source.group() || map.codomain() != target.group() {
            return Err(Error::DomainMismatch(format!(
                "map {} -> {} does not join {} and {}",
                map.domain(),
                map.codomain(),
                source.group(),
                target.group()
            )));
        }
        if !source.carries(target, &map) {
            return Err(Error::InvalidInput("map does not carry A into A'".into()));
        }
        Ok(ExtMorphism {
            source: source.clone(),
            target: target.clone(),
            map,
        })
    }

    pub(crate) fn new_unchecked(source: &ExtObject, target: &ExtObject, map: Hom) -> ExtMorphism {
        ExtMorphism {
            source: source.clone(),
            target: target.clone(),
            map,
        }
    }

    pub fn identity(x: &ExtObject) -> ExtMorphism {
        Self::new_unchecked(x, x, Hom::identity(x.group().clone()))
    }

    pub fn zero(x: &ExtObject, y: &ExtObject) -> ExtMorphism {
        Self::new_unchecked(x, y, Hom::zero(x.group().clone(), y.group().clone()))
    }

    pub fn source(&self) -> &ExtObject {
        &self.source
    }

    pub fn target(&self) -> &ExtObject {
        &self.target
    }

    pub fn map(&self) -> &Hom {
        &self.map
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ExtMorphism) -> Result<ExtMorphism> {
        if !first.target.ptr_eq(&self.source)
            && !(first.target.group() == self.source.group() && first.target.sub().same_elements(self.source.sub()))
        {
            return Err(Error::DomainMismatch("composition of non-adjacent morphisms".into()));
        }
        let map = self.map.compose(&first.map)?;
        Ok(Self::new_unchecked(&first.source, &self.target, map))
    }

    /// Order of `f(A)`.
    pub fn lower_image_order(&self) -> u64 {
        let imgs: Vec<Element> = self.source.sub().basis().iter().map(|a| self.map.apply(a)).collect();
        span_order(self.target.group(), &imgs)
    }

    /// Order of `f̄(C)` inside `C'`.
    pub fn upper_image_order(&self) -> u64 {
        let tq = self.target.quot();
        let imgs: Vec<Element> = self
            .source
            .quot()
            .basis_reps()
            .iter()
            .map(|r| tq.project(&self.map.apply(r)))
            .collect();
        span_order(tq.abstract_type(), &imgs)
    }
}

/// Every morphism `x -> y`.
pub fn morphisms(x: &ExtObject, y: &ExtObject, caps: &Caps) -> Result<impl Iterator<Item = ExtMorphism>> {
    let homs = enumerate_homs(x.group(), y.group(), caps)?;
    let (x, y) = (x.clone(), y.clone());
    Ok(homs.filter_map(move |f| x.carries(&y, &f).then(|| ExtMorphism::new_unchecked(&x, &y, f))))
}

/// `f|_A : A_type -> A'_type` in basis coordinates.
pub fn restrict_lower(m: &ExtMorphism) -> Hom {
    let src = m.source.sub();
    let tgt = m.target.sub();
    let imgs: Vec<Element> = src
        .basis()
        .iter()
        .map(|a| tgt.coords_in_type(&m.map.apply(a)).expect("morphism carries A into A'"))
        .collect();
    Hom::from_images(src.canonical_type().clone(), tgt.canonical_type().clone(), &imgs).expect("restriction")
}

/// The induced map `C_type -> C'_type`.
pub fn induce_upper(m: &ExtMorphism) -> Hom {
    let tq = m.target.quot();
    let imgs: Vec<Element> = m
        .source
        .quot()
        .basis_reps()
        .iter()
        .map(|r| tq.project(&m.map.apply(r)))
        .collect();
    Hom::from_images(m.source.c_type().clone(), tq.abstract_type().clone(), &imgs).expect("induced map")
}

/// Isomorphism in the category: a group isomorphism with `f(A) = A'`.
pub fn is_iso_in_e(m: &ExtMorphism) -> bool {
    m.map.is_iso() && m.lower_image_order() == m.target.sub().order()
}

/// `⊕ B_i` with `A = ⊕ A_i`, remembering where each summand sits.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub object: ExtObject,
    pub summands: Vec<ExtObject>,
    /// `positions[k][j]`: canonical position in the sum of factor `j` of summand `k`.
    pub positions: Vec<Vec<usize>>,
}

impl DirectSum {
    /// `ε_k : B_k -> ⊕B`.
    pub fn embedding(&self, k: usize) -> Hom {
        let sum = self.object.group();
        let part = self.summands[k].group();
        let imgs: Vec<Element> = (0..part.rank())
            .map(|j| sum.unit(self.positions[k][j]))
            .collect();
        Hom::from_images(part.clone(), sum.clone(), &imgs).expect("embedding")
    }

    /// `π_k : ⊕B -> B_k`.
    pub fn projection(&self, k: usize) -> Hom {
        let sum = self.object.group();
        let part = self.summands[k].group();
        let mut rows = vec![vec![0u64; sum.rank()]; part.rank()];
        for (j, &pos) in self.positions[k].iter().enumerate() {
            rows[j][pos] = 1 % part.factors()[j];
        }
        Hom::new(sum.clone(), part.clone(), &rows).expect("projection")
    }

    /// Embeds an element of summand `k`.
    pub fn embed(&self, k: usize, x: &Element) -> Element {
        let mut coords = vec![0u64; self.object.group().rank()];
        for (j, &c) in x.coords().iter().enumerate() {
            coords[self.positions[k][j]] = c;
        }
        self.object.group().element_reduced(&coords)
    }
}

/// Direct sum in the category. The result is exempt from the uniserial scope
/// check, but its flags are computed from its actual end terms.
pub fn direct_sum(objects: &[ExtObject], caps: &Caps) -> Result<DirectSum> {
    if objects.is_empty() {
        return Err(Error::InvalidInput("direct sum of an empty list".into()));
    }
    let limit = caps.sum_order_limit();
    let mut order: u128 = 1;
    for o in objects {
        order = order.saturating_mul(o.group().order() as u128);
    }
    if order > limit as u128 {
        return Err(Error::cap("direct sum order", order, limit as u128));
    }
    let parts: Vec<Group> = objects.iter().map(|o| o.group().clone()).collect();
    let (group, positions) = Group::direct_sum(&parts);
    let mut gens = Vec::new();
    for (k, o) in objects.iter().enumerate() {
        for a in o.sub().basis() {
            let mut coords = vec![0u64; group.rank()];
            for (j, &c) in a.coords().iter().enumerate() {
                coords[positions[k][j]] = c;
            }
            gens.push(group.element_reduced(&coords));
        }
    }
    let sub = crate::group::subgroup_generated(&group, &gens)?;
    Ok(DirectSum {
        object: ExtObject::build(group, sub, true)?,
        summands: objects.to_vec(),
        positions,
    })
}

/// `(B, A)` splits when some `r: B -> A` restricts to the identity on `A`.
/// Returns such a retraction as a map `B -> A_type`.
pub fn splitting_retraction(x: &ExtObject, caps: &Caps) -> Result<Option<Hom>> {
    let a_type = x.a_type().clone();
    let incl = x.sub().inclusion();
    let id = Hom::identity(a_type.clone());
    for r in enumerate_homs(x.group(), &a_type, caps)? {
        if r.compose_unchecked(&incl) == id {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

pub fn is_split(x: &ExtObject, caps: &Caps) -> Result<bool> {
    Ok(splitting_retraction(x, caps)?.is_some())
}

/// For a split object, the two pieces `0 -> A -> A -> 0 -> 0` and
/// `0 -> 0 -> C -> C -> 0`, each over its canonical type.
pub fn split_parts(x: &ExtObject, caps: &Caps) -> Result<Option<(ExtObject, ExtObject)>> {
    if splitting_retraction(x, caps)?.is_none() {
        return Ok(None);
    }
    let a = x.a_type().clone();
    let c = x.c_type().clone();
    let lower = ExtObject::from_subgroup(&a, Subgroup::whole(&a), caps)?;
    let upper = ExtObject::from_subgroup(&c, Subgroup::trivial(&c), caps)?;
    Ok(Some((lower, upper)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(orders: &[u64]) -> Group {
        Group::canonicalize(orders).unwrap()
    }

    fn obj(orders: &[u64], gens: &[&[u64]]) -> ExtObject {
        let b = g(orders);
        let gens: Vec<Element> = gens.iter().map(|c| b.element(c).unwrap()).collect();
        make_ext(&b, &gens, &Caps::default()).unwrap()
    }

    #[test]
    fn make_ext_examples() {
        let x = obj(&[4], &[&[2]]);
        assert!(x.in_u());
        assert_eq!(x.c_type().factors(), &[2]);
        let y = obj(&[3], &[]);
        assert!(y.flags().in_u_lower0 && !y.in_u());
        let b = g(&[2, 2]);
        let gens = [b.element(&[1, 0]).unwrap(), b.element(&[0, 1]).unwrap()];
        assert!(matches!(
            make_ext(&b, &gens, &Caps::default()),
            Err(Error::ScopeViolation(_))
        ));
    }

    #[test]
    fn quotient_scope_violation() {
        // Z/2 + Z/6 over <(0,3)>: quotient Z/2 + Z/3 is not uniserial
        let b = g(&[2, 6]);
        let gen = b.element(&[0, 1, 0]).unwrap();
        assert!(matches!(
            make_ext(&b, &[gen], &Caps::default()),
            Err(Error::ScopeViolation(_))
        ));
    }

    #[test]
    fn morphism_counts() {
        let caps = Caps::default();
        let x = obj(&[4], &[&[2]]);
        assert_eq!(morphisms(&x, &x, &caps).unwrap().count(), 4);
        let z = ExtObject::zero();
        assert_eq!(morphisms(&z, &x, &caps).unwrap().count(), 1);
        // brute-force filter of the 8 group homs Z/2+Z/2 -> Z/4
        let v = obj(&[2, 2], &[&[1, 0]]);
        let brute = enumerate_homs(v.group(), x.group(), &caps)
            .unwrap()
            .filter(|f| v.sub().elements().all(|a| x.sub().contains(&f.apply(&a))))
            .count();
        assert_eq!(enumerate_homs(v.group(), x.group(), &caps).unwrap().count(), 4);
        assert_eq!(morphisms(&v, &x, &caps).unwrap().count(), brute);
        assert_eq!(brute, 4);
    }

    #[test]
    fn restrict_and_induce() {
        let x = obj(&[4], &[&[2]]);
        let id = ExtMorphism::identity(&x);
        assert_eq!(restrict_lower(&id), Hom::identity(x.a_type().clone()));
        assert_eq!(induce_upper(&id), Hom::identity(x.c_type().clone()));
        let double = ExtMorphism::new(&x, &x, Hom::new(x.group().clone(), x.group().clone(), &[vec![2]]).unwrap()).unwrap();
        assert!(restrict_lower(&double).is_zero());
        assert!(induce_upper(&double).is_zero());
        let zero = ExtMorphism::zero(&x, &x);
        assert!(restrict_lower(&zero).is_zero() && induce_upper(&zero).is_zero());
    }

    #[test]
    fn induced_map_commutes_with_projection() {
        let caps = Caps::default();
        let x = obj(&[8, 2], &[&[4, 1]]);
        for m in morphisms(&x, &x, &caps).unwrap() {
            let ind = induce_upper(&m);
            let proj = x.quot().projection_hom();
            let lhs = ind.compose(&proj).unwrap();
            let rhs = proj.compose(m.map()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn iso_examples() {
        let x = obj(&[4], &[&[2]]);
        assert!(is_iso_in_e(&ExtMorphism::identity(&x)));
        let y = obj(&[4], &[&[1]]);
        let f = ExtMorphism::new(&x, &y, Hom::identity(x.group().clone())).unwrap();
        assert!(!is_iso_in_e(&f));
        assert!(f.map().is_injective() && f.map().is_surjective());
        let z = obj(&[4], &[]);
        for m in morphisms(&x, &z, &Caps::default()).unwrap() {
            assert!(!is_iso_in_e(&m));
        }
    }

    #[test]
    fn direct_sum_examples() {
        let caps = Caps::default();
        let x = obj(&[4], &[&[2]]);
        let s = direct_sum(&[x.clone()], &caps).unwrap();
        assert_eq!(s.object.group(), x.group());
        assert!(s.object.sub().same_elements(x.sub()));
        let s = direct_sum(&[x.clone(), ExtObject::zero()], &caps).unwrap();
        assert_eq!(s.object.group(), x.group());
        assert!(s.object.sub().same_elements(x.sub()));
        let y = obj(&[2, 3], &[&[1, 0]]);
        let s = direct_sum(&[x.clone(), y.clone()], &caps).unwrap();
        assert_eq!(s.object.group().order(), 4 * 6);
        assert_eq!(s.object.a_type().order(), 4);
        assert_eq!(s.object.c_type().order(), 6);
        assert!(s.object.is_aggregate());
        let back = s.projection(1).compose(&s.embedding(1)).unwrap();
        assert_eq!(back, Hom::identity(y.group().clone()));
    }

    #[test]
    fn split_examples() {
        let caps = Caps::default();
        assert!(is_split(&obj(&[2, 2], &[&[1, 0]]), &caps).unwrap());
        assert!(!is_split(&obj(&[4], &[&[2]]), &caps).unwrap());
        assert!(is_split(&obj(&[2, 3], &[&[1, 0]]), &caps).unwrap());
    }
}
