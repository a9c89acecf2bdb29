//! The endomorphism ring `E_B` of an extension with nonzero uniserial end
//! terms, its four ideals `I_{B,a,b}` and the checks that they behave as
//! two-sided completely prime ideals whose maximal members cut out a product
//! of division rings.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::classes::{predicate, ClassLabel};
use crate::error::{Error, Result};
use crate::ext::{morphisms, ExtMorphism, ExtObject};
use crate::group::{enumerate_homs, Group, Hom};
use crate::par;

/// Dense view of an endomorphism set: matrices in a flat buffer plus the
/// lookup from matrix to position.
struct MatrixSet {
    factors: Vec<u64>,
    rank: usize,
    data: Vec<u64>,
    index: HashMap<Vec<u64>, usize>,
}

impl MatrixSet {
    fn new(g: &Group, homs: &[Hom]) -> MatrixSet {
        let rank = g.rank();
        let mut data = Vec::with_capacity(homs.len() * rank * rank);
        let mut index = HashMap::with_capacity(homs.len());
        for (i, h) in homs.iter().enumerate() {
            data.extend_from_slice(h.raw_matrix());
            index.insert(h.raw_matrix().to_vec(), i);
        }
        MatrixSet {
            factors: g.factors().to_vec(),
            rank,
            data,
            index,
        }
    }

    fn len(&self) -> usize {
        self.index.len()
    }

    fn get(&self, i: usize) -> &[u64] {
        let s = self.rank * self.rank;
        &self.data[i * s..(i + 1) * s]
    }

    /// `out = g ∘ f`.
    fn compose_into(&self, g: usize, f: usize, out: &mut [u64]) {
        let (g, f, r) = (self.get(g), self.get(f), self.rank);
        for i in 0..r {
            let e = self.factors[i];
            for k in 0..r {
                let mut s = 0u64;
                for j in 0..r {
                    s = (s + g[i * r + j] * f[j * r + k]) % e;
                }
                out[i * r + k] = s;
            }
        }
    }

    fn add_into(&self, a: usize, b: usize, out: &mut [u64]) {
        let (a, b, r) = (self.get(a), self.get(b), self.rank);
        for (k, o) in out.iter_mut().enumerate() {
            *o = (a[k] + b[k]) % self.factors[k / r];
        }
    }

    /// `m - 1` in place.
    fn sub_identity(&self, m: &mut [u64]) {
        let r = self.rank;
        for i in 0..r {
            let e = self.factors[i];
            m[i * r + i] = (m[i * r + i] + e - 1 % e) % e;
        }
    }

    fn lookup(&self, m: &[u64]) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// Indices of labels whose ideal is maximal: the ideal is not covered by the
/// union of the other *distinct* ideals among the four.
fn maximal_from_memberships(members: &[Vec<bool>]) -> Vec<bool> {
    let k = members.len();
    (0..k)
        .map(|a| {
            let others: Vec<usize> = (0..k).filter(|&b| members[b] != members[a]).collect();
            (0..members[a].len()).any(|f| members[a][f] && others.iter().all(|&b| !members[b][f]))
        })
        .collect()
}

fn distinct_count(members: &[Vec<bool>], keep: &[bool]) -> usize {
    let mut seen: Vec<&Vec<bool>> = Vec::new();
    for (m, &k) in members.iter().zip(keep) {
        if k && !seen.contains(&m) {
            seen.push(m);
        }
    }
    seen.len()
}

/// Every endomorphism of `x` in the extension category.
pub fn endomorphisms(x: &ExtObject, caps: &Caps) -> Result<Vec<ExtMorphism>> {
    Ok(morphisms(x, x, caps)?.collect())
}

fn require_u(x: &ExtObject) -> Result<()> {
    if x.in_u() {
        Ok(())
    } else {
        Err(Error::ScopeViolation(format!("{x} does not have nonzero uniserial end terms")))
    }
}

/// Maximality of the four ideals, without the full ring verification done by
/// [`analyze`].
pub fn maximal_labels(x: &ExtObject, caps: &Caps) -> Result<[bool; 4]> {
    require_u(x)?;
    let endos = endomorphisms(x, caps)?;
    let members: Vec<Vec<bool>> = ClassLabel::ALL
        .iter()
        .map(|&l| endos.iter().map(|m| !predicate(m, l)).collect())
        .collect();
    let max = maximal_from_memberships(&members);
    Ok([max[0], max[1], max[2], max[3]])
}

/// `E_B` with its four ideals, verified.
pub struct EndoRingAnalysis {
    object: ExtObject,
    endos: Vec<Hom>,
    set: MatrixSet,
    members: Vec<Vec<bool>>,
    automorphism: Vec<bool>,
    maximal: Vec<bool>,
    radical: Vec<bool>,
    type_count: usize,
    identity: usize,
}

/// Sizes and flags of an analysis, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndoSummary {
    pub endo_count: usize,
    pub automorphism_count: usize,
    pub ideal_sizes: [usize; 4],
    pub maximal: Vec<ClassLabel>,
    pub type_count: usize,
    pub radical_size: usize,
    /// `contained[a][b]`: `I_a ⊆ I_b`.
    pub contained: [[bool; 4]; 4],
    pub division_quotients: Vec<usize>,
}

impl EndoRingAnalysis {
    pub fn object(&self) -> &ExtObject {
        &self.object
    }

    pub fn len(&self) -> usize {
        self.endos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endos.is_empty()
    }

    pub fn endos(&self) -> &[Hom] {
        &self.endos
    }

    pub fn index_of(&self, h: &Hom) -> Option<usize> {
        if h.domain() != self.object.group() || h.codomain() != self.object.group() {
            return None;
        }
        self.set.lookup(h.raw_matrix())
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn contains(&self, label: ClassLabel, i: usize) -> bool {
        self.members[label.index()][i]
    }

    /// Membership of an arbitrary map in `I_label`; `None` when it is not an
    /// endomorphism of the object.
    pub fn member(&self, label: ClassLabel, h: &Hom) -> Option<bool> {
        self.index_of(h).map(|i| self.contains(label, i))
    }

    pub fn ideal(&self, label: ClassLabel) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.contains(label, i)).collect()
    }

    pub fn ideal_size(&self, label: ClassLabel) -> usize {
        self.members[label.index()].iter().filter(|&&b| b).count()
    }

    /// `I_a ⊆ I_b`.
    pub fn ideal_contained(&self, a: ClassLabel, b: ClassLabel) -> bool {
        let (x, y) = (&self.members[a.index()], &self.members[b.index()]);
        x.iter().zip(y).all(|(&p, &q)| !p || q)
    }

    pub fn ideals_equal(&self, a: ClassLabel, b: ClassLabel) -> bool {
        self.members[a.index()] == self.members[b.index()]
    }

    pub fn is_automorphism(&self, i: usize) -> bool {
        self.automorphism[i]
    }

    pub fn is_maximal(&self, label: ClassLabel) -> bool {
        self.maximal[label.index()]
    }

    pub fn maximal_labels(&self) -> Vec<ClassLabel> {
        ClassLabel::ALL.into_iter().filter(|&l| self.is_maximal(l)).collect()
    }

    pub fn radical(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.radical[i]).collect()
    }

    pub fn type_count(&self) -> usize {
        self.type_count
    }

    /// One representative label per distinct maximal ideal, lowest label first.
    fn distinct_maximal(&self) -> Vec<ClassLabel> {
        let mut out: Vec<ClassLabel> = Vec::new();
        for l in self.maximal_labels() {
            if !out.iter().any(|&o| self.ideals_equal(o, l)) {
                out.push(l);
            }
        }
        out
    }

    /// `|E / I|` for each distinct maximal ideal.
    pub fn division_quotients(&self) -> Vec<usize> {
        self.distinct_maximal()
            .into_iter()
            .map(|l| self.len() / self.ideal_size(l))
            .collect()
    }

    pub fn summary(&self) -> EndoSummary {
        let mut contained = [[false; 4]; 4];
        for a in ClassLabel::ALL {
            for b in ClassLabel::ALL {
                contained[a.index()][b.index()] = self.ideal_contained(a, b);
            }
        }
        EndoSummary {
            endo_count: self.len(),
            automorphism_count: self.automorphism.iter().filter(|&&b| b).count(),
            ideal_sizes: ClassLabel::ALL.map(|l| self.ideal_size(l)),
            maximal: self.maximal_labels(),
            type_count: self.type_count,
            radical_size: self.radical.iter().filter(|&&b| b).count(),
            contained,
            division_quotients: self.division_quotients(),
        }
    }

    /// Checks every ring-theoretic claim about the four ideals; the first
    /// failure is returned as a message.
    fn verify(&self) -> std::result::Result<(), String> {
        let n = self.len();
        let zero = (0..n)
            .find(|&i| self.set.get(i).iter().all(|&c| c == 0))
            .ok_or("zero map missing from E_B")?;
        for l in ClassLabel::ALL {
            if self.contains(l, self.identity) {
                return Err(format!("identity lies in I{l}"));
            }
            if !self.contains(l, zero) {
                return Err(format!("zero map is not in I{l}"));
            }
        }
        for i in 0..n {
            let in_some = ClassLabel::ALL.iter().any(|&l| self.contains(l, i));
            if in_some == self.automorphism[i] {
                return Err(format!(
                    "endomorphism {:?}: automorphism = {}, in some ideal = {in_some}",
                    self.endos[i], self.automorphism[i]
                ));
            }
        }
        let rows = par::map_range(n, |i| self.verify_row(i));
        if let Some(msg) = rows.into_iter().flatten().next() {
            return Err(msg);
        }
        let t = self.type_count;
        if !(1..=4).contains(&t) {
            return Err(format!("type {t} outside 1..=4"));
        }
        Ok(())
    }

    /// Products `f∘g` for the fixed `f = endos[i]`, and sums inside
    /// each ideal containing `f`.
    fn verify_row(&self, i: usize) -> Option<String> {
        let r = self.set.rank;
        let mut buf = vec![0u64; r * r];
        for j in 0..self.len() {
            {
                let (a, b) = (i, j);
                self.set.compose_into(a, b, &mut buf);
                let Some(p) = self.set.lookup(&buf) else {
                    return Some(format!("composition of {:?} and {:?} leaves E_B", self.endos[a], self.endos[b]));
                };
                for l in ClassLabel::ALL {
                    let lhs = self.contains(l, p);
                    let rhs = self.contains(l, a) || self.contains(l, b);
                    if lhs != rhs {
                        return Some(format!(
                            "I{l}: product of {:?} after {:?} is {}in the ideal, factors {}",
                            self.endos[a],
                            self.endos[b],
                            if lhs { "" } else { "not " },
                            if rhs { "are not both outside" } else { "both outside" }
                        ));
                    }
                }
            }
            for l in ClassLabel::ALL {
                if self.contains(l, i) && self.contains(l, j) {
                    self.set.add_into(i, j, &mut buf);
                    match self.set.lookup(&buf) {
                        Some(s) if self.contains(l, s) => {}
                        _ => {
                            return Some(format!(
                                "I{l} is not closed under the sum of {:?} and {:?}",
                                self.endos[i], self.endos[j]
                            ))
                        }
                    }
                }
            }
        }
        None
    }

    /// `E/J ≅ ∏ E/I` over the distinct maximal ideals, and each `E/I` is a
    /// division ring (every element outside `I` is invertible on both sides
    /// modulo `I`).
    pub fn verify_crt(&self) -> bool {
        let n = self.len();
        let j_size = self.radical.iter().filter(|&&b| b).count();
        let quotients = self.division_quotients();
        if j_size == 0 || !n.is_multiple_of(j_size) {
            return false;
        }
        let product: usize = quotients.iter().product();
        if n / j_size != product {
            return false;
        }
        self.distinct_maximal().into_iter().all(|l| {
            let rows = par::map_range(n, |f| self.contains(l, f) || self.has_inverse_mod(l, f));
            rows.into_iter().all(|b| b)
        })
    }

    fn has_inverse_mod(&self, l: ClassLabel, f: usize) -> bool {
        let r = self.set.rank;
        let mut buf = vec![0u64; r * r];
        (0..self.len()).any(|g| {
            if self.contains(l, g) {
                return false;
            }
            [(f, g), (g, f)].into_iter().all(|(a, b)| {
                self.set.compose_into(a, b, &mut buf);
                self.set.sub_identity(&mut buf);
                self.set.lookup(&buf).is_some_and(|p| self.contains(l, p))
            })
        })
    }
}

/// Enumerates `E_B`, computes the four ideals and verifies their ring
/// theory. Any failed check is a [`Error::TheoremViolation`].
pub fn analyze(x: &ExtObject, caps: &Caps) -> Result<EndoRingAnalysis> {
    require_u(x)?;
    let ext_endos = endomorphisms(x, caps)?;
    let members: Vec<Vec<bool>> = ClassLabel::ALL
        .iter()
        .map(|&l| ext_endos.iter().map(|m| !predicate(m, l)).collect())
        .collect();
    let automorphism: Vec<bool> = ext_endos.iter().map(crate::ext::is_iso_in_e).collect();
    let endos: Vec<Hom> = ext_endos.into_iter().map(|m| m.map().clone()).collect();
    let set = MatrixSet::new(x.group(), &endos);
    if set.len() != endos.len() {
        return Err(Error::TheoremViolation("endomorphism enumeration repeated a map".into()));
    }
    let identity = set
        .lookup(Hom::identity(x.group().clone()).raw_matrix())
        .ok_or_else(|| Error::TheoremViolation("identity missing from E_B".into()))?;
    let maximal = maximal_from_memberships(&members);
    let radical: Vec<bool> = (0..endos.len())
        .map(|f| (0..4).all(|k| !maximal[k] || members[k][f]))
        .collect();
    let type_count = distinct_count(&members, &maximal);
    let analysis = EndoRingAnalysis {
        object: x.clone(),
        endos,
        set,
        members,
        automorphism,
        maximal,
        radical,
        type_count,
        identity,
    };
    analysis
        .verify()
        .map_err(|msg| Error::TheoremViolation(format!("{x}: {msg}")))?;
    Ok(analysis)
}

/// Number of distinct maximal ideals among "not injective" and "not
/// surjective" in `End(g)`; 0 for the zero group.
pub fn module_type(g: &Group, caps: &Caps) -> Result<usize> {
    if g.is_zero() {
        return Ok(0);
    }
    let homs: Vec<Hom> = enumerate_homs(g, g, caps)?.collect();
    let members = vec![
        homs.iter().map(|h| !h.is_injective()).collect::<Vec<bool>>(),
        homs.iter().map(|h| !h.is_surjective()).collect(),
    ];
    let max = maximal_from_memberships(&members);
    Ok(distinct_count(&members, &max))
}

/// `type(E_B) ≤ type(End A) + type(End C)`.
pub fn type_bound_check(x: &ExtObject, caps: &Caps) -> Result<bool> {
    let a = analyze(x, caps)?;
    type_bound_holds(&a, caps)
}

pub fn type_bound_holds(a: &EndoRingAnalysis, caps: &Caps) -> Result<bool> {
    let x = a.object();
    let bound = module_type(x.a_type(), caps)? + module_type(x.c_type(), caps)?;
    Ok(a.type_count() <= bound)
}

/// Whether `m: X' -> Y'` lies in the ideal of the category associated to
/// `I_{base,label}`: `β ∘ m ∘ α ∈ I` for every `α: base -> X'` and
/// `β: Y' -> base`.
pub fn associated_ideal_membership(
    base: &EndoRingAnalysis,
    label: ClassLabel,
    m: &ExtMorphism,
    caps: &Caps,
) -> Result<bool> {
    let alphas: Vec<Hom> = morphisms(base.object(), m.source(), caps)?.map(|a| a.map().clone()).collect();
    let betas: Vec<Hom> = morphisms(m.target(), base.object(), caps)?.map(|b| b.map().clone()).collect();
    Ok(in_associated(base, label, m.map(), &alphas, &betas))
}

fn in_associated(base: &EndoRingAnalysis, label: ClassLabel, m: &Hom, alphas: &[Hom], betas: &[Hom]) -> bool {
    alphas.iter().all(|a| {
        let ma = m.compose(a).expect("adjacent maps");
        betas.iter().all(|b| {
            let h = b.compose(&ma).expect("adjacent maps");
            base.member(label, &h).expect("composite is an endomorphism of the base")
        })
    })
}

/// Membership in the associated ideal for every endomorphism of `other`,
/// indexed like `other.endos()`.
pub fn associated_ideal_on(
    base: &EndoRingAnalysis,
    label: ClassLabel,
    other: &EndoRingAnalysis,
    caps: &Caps,
) -> Result<Vec<bool>> {
    let alphas: Vec<Hom> = morphisms(base.object(), other.object(), caps)?.map(|a| a.map().clone()).collect();
    let betas: Vec<Hom> = morphisms(other.object(), base.object(), caps)?.map(|b| b.map().clone()).collect();
    Ok(par::map(other.endos(), |h| in_associated(base, label, h, &alphas, &betas)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::make_ext;
    use crate::group::Element;

    fn obj(orders: &[u64], gens: &[&[u64]]) -> ExtObject {
        let b = Group::canonicalize(orders).unwrap();
        let gens: Vec<Element> = gens.iter().map(|c| b.element(c).unwrap()).collect();
        make_ext(&b, &gens, &Caps::default()).unwrap()
    }

    #[test]
    fn z4_mod_2() {
        let a = analyze(&obj(&[4], &[&[2]]), &Caps::default()).unwrap();
        assert_eq!(a.len(), 4);
        for l in ClassLabel::ALL {
            assert_eq!(a.ideal_size(l), 2);
            assert!(a.is_maximal(l));
        }
        assert_eq!(a.type_count(), 1);
        assert!(a.verify_crt());
        assert_eq!(a.division_quotients(), vec![2]);
        assert!(type_bound_holds(&a, &Caps::default()).unwrap());
    }

    #[test]
    fn z6_example() {
        let a = analyze(&obj(&[2, 3], &[&[1, 0]]), &Caps::default()).unwrap();
        assert_eq!(a.len(), 6);
        assert!(a.ideals_equal(ClassLabel::MU, ClassLabel::EU));
        assert!(a.ideals_equal(ClassLabel::ML, ClassLabel::EL));
        assert!(!a.ideals_equal(ClassLabel::ML, ClassLabel::MU));
        assert_eq!(a.type_count(), 2);
        assert!(a.verify_crt());
        let mut q = a.division_quotients();
        q.sort();
        assert_eq!(q, vec![2, 3]);
    }

    #[test]
    fn split_z2_by_z2() {
        let a = analyze(&obj(&[2, 2], &[&[1, 0]]), &Caps::default()).unwrap();
        assert_eq!(a.len(), 8);
        assert_eq!(a.type_count(), 2);
        assert!(a.verify_crt());
        assert!(type_bound_holds(&a, &Caps::default()).unwrap());
    }

    #[test]
    fn cyclic_types() {
        let caps = Caps::default();
        assert_eq!(module_type(&Group::cyclic(8).unwrap(), &caps).unwrap(), 1);
        assert_eq!(module_type(&Group::zero_group(), &caps).unwrap(), 0);
    }

    #[test]
    fn scope_enforced() {
        assert!(matches!(
            analyze(&obj(&[3], &[]), &Caps::default()),
            Err(Error::ScopeViolation(_))
        ));
    }

    #[test]
    fn associated_identity() {
        let caps = Caps::default();
        let x = obj(&[4], &[&[2]]);
        let a = analyze(&x, &caps).unwrap();
        let id = ExtMorphism::identity(&x);
        for l in ClassLabel::ALL {
            assert!(!associated_ideal_membership(&a, l, &id, &caps).unwrap());
        }
        let y = obj(&[2, 2], &[&[1, 0]]);
        let idy = ExtMorphism::identity(&y);
        assert!(associated_ideal_membership(&a, ClassLabel::ML, &idy, &caps).unwrap());
    }
}
