//! Deciding isomorphism of finite direct sums from the class invariants of
//! the summands.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::classes::{predicate, ClassLabel, ClassTable};
use crate::digraph::BipartiteDigraph;
use crate::endo::maximal_labels;
use crate::error::{Error, Result};
use crate::ext::{DirectSum, ExtMorphism, ExtObject};
use crate::group::{Element, Hom};
use crate::oracle::oracle_iso;
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Parziale,
    Completo,
    CompletoPrime,
    BruteForce,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Parziale => "parziale",
            Method::Completo => "completo",
            Method::CompletoPrime => "completo_prime",
            Method::BruteForce => "brute_force",
        }
    }
}

/// The first label whose classes could not be matched.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub label: ClassLabel,
    /// Left indices of the offending block (or the whole index set when the
    /// index sets already differ in size).
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// An isomorphism of direct sums as a table of generator images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoWitness {
    pub source_orders: Vec<u64>,
    pub target_orders: Vec<u64>,
    /// `images[j]`: coordinates of the image of generator `j`.
    pub images: Vec<Vec<u64>>,
    pub nodes: u64,
}

impl IsoWitness {
    pub fn from_hom(f: &Hom, nodes: u64) -> IsoWitness {
        IsoWitness {
            source_orders: f.domain().factors().to_vec(),
            target_orders: f.codomain().factors().to_vec(),
            images: f.images().into_iter().map(Element::into_coords).collect(),
            nodes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub method: Method,
    pub verdict: bool,
    /// Class-preserving bijections, as (left index, right index) pairs. All
    /// four labels on success; the labels that did match on failure.
    pub witnesses: BTreeMap<ClassLabel, Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Mismatch>,
    /// For labels whose index sets have equal size but fail, the bijection
    /// pairing them in index order, which does not preserve classes.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub incompatible: BTreeMap<ClassLabel, Vec<(usize, usize)>>,
    pub index_sets: BTreeMap<String, Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iso: Option<IsoWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl DecisionReport {
    fn new(method: Method) -> DecisionReport {
        DecisionReport {
            method,
            verdict: true,
            witnesses: BTreeMap::new(),
            failure: None,
            incompatible: BTreeMap::new(),
            index_sets: BTreeMap::new(),
            iso: None,
            note: None,
        }
    }

    fn fail(&mut self, m: Mismatch) {
        if self.failure.is_none() {
            self.failure = Some(m);
        }
        self.verdict = false;
    }
}

/// Objects of both lists with their pairwise classes, shared by the deciders.
pub struct ObjectPool {
    objects: Vec<ExtObject>,
    table: ClassTable,
    maximal: Vec<Option<[bool; 4]>>,
}

impl ObjectPool {
    pub fn new(objects: Vec<ExtObject>, caps: &Caps) -> Result<ObjectPool> {
        let table = ClassTable::build(&objects, caps)?;
        let maximal = par::try_map(&objects, |o| {
            if o.in_u() {
                maximal_labels(o, caps).map(Some)
            } else {
                Ok(None)
            }
        })?;
        Ok(ObjectPool {
            objects,
            table,
            maximal,
        })
    }

    pub fn objects(&self) -> &[ExtObject] {
        &self.objects
    }

    pub fn table(&self) -> &ClassTable {
        &self.table
    }

    /// Maximal labels of an in-scope object.
    pub fn maximal(&self, i: usize) -> Option<[bool; 4]> {
        self.maximal[i]
    }

    fn require_u(&self, ids: &[usize]) -> Result<()> {
        for &i in ids {
            if !self.objects[i].in_u() {
                return Err(Error::ScopeViolation(format!(
                    "{} does not have nonzero uniserial end terms",
                    self.objects[i]
                )));
            }
        }
        Ok(())
    }

    /// Matches the selected left and right positions under one label. On
    /// success, returns pairs of positions into `left` and `right`.
    fn match_label(
        &self,
        label: ClassLabel,
        left: &[usize],
        lsel: &[usize],
        right: &[usize],
        rsel: &[usize],
    ) -> Result<std::result::Result<Vec<(usize, usize)>, Mismatch>> {
        let ids: Vec<usize> = lsel.iter().map(|&p| left[p]).chain(rsel.iter().map(|&p| right[p])).collect();
        let part = self.table.partition_of(label, &ids)?;
        let n = lsel.len();
        let mut pairs = Vec::new();
        let mut covered = 0;
        for block in &part.blocks {
            let l: Vec<usize> = block.iter().filter(|&&q| q < n).map(|&q| lsel[q]).collect();
            let r: Vec<usize> = block.iter().filter(|&&q| q >= n).map(|&q| rsel[q - n]).collect();
            covered += block.len();
            if l.len() != r.len() {
                return Ok(Err(Mismatch { label, left: l, right: r }));
            }
            pairs.extend(l.into_iter().zip(r));
        }
        if covered != ids.len() {
            return Err(Error::ScopeViolation(format!(
                "an object selected for {label} has a zero end term there"
            )));
        }
        pairs.sort_unstable();
        Ok(Ok(pairs))
    }

    fn run_labels(
        &self,
        report: &mut DecisionReport,
        left: &[usize],
        right: &[usize],
        select: impl Fn(ClassLabel) -> (Vec<usize>, Vec<usize>),
    ) -> Result<()> {
        for label in ClassLabel::ALL {
            let (lsel, rsel) = select(label);
            if lsel.len() != rsel.len() {
                report.fail(Mismatch {
                    label,
                    left: lsel,
                    right: rsel,
                });
                continue;
            }
            match self.match_label(label, left, &lsel, right, &rsel)? {
                Ok(pairs) => {
                    report.witnesses.insert(label, pairs);
                }
                Err(m) => {
                    report.incompatible.insert(label, lsel.into_iter().zip(rsel).collect());
                    report.fail(m);
                }
            }
        }
        Ok(())
    }

    /// Isomorphism test through the maximal ideals of the summands'
    /// endomorphism rings. `left` and `right` are pool indices.
    pub fn parziale(&self, left: &[usize], right: &[usize]) -> Result<DecisionReport> {
        self.require_u(left)?;
        self.require_u(right)?;
        let mut report = DecisionReport::new(Method::Parziale);
        let sel = |ids: &[usize], label: ClassLabel| -> Vec<usize> {
            (0..ids.len())
                .filter(|&p| self.maximal[ids[p]].expect("in scope")[label.index()])
                .collect()
        };
        for label in ClassLabel::ALL {
            report.index_sets.insert(format!("X_{}", label.name()), sel(left, label));
            report.index_sets.insert(format!("Y_{}", label.name()), sel(right, label));
        }
        self.run_labels(&mut report, left, right, |label| (sel(left, label), sel(right, label)))?;
        Ok(report)
    }

    /// Isomorphism test by matching all four classes over all summands.
    pub fn completo(&self, left: &[usize], right: &[usize]) -> Result<DecisionReport> {
        self.require_u(left)?;
        self.require_u(right)?;
        let mut report = DecisionReport::new(Method::Completo);
        if left.len() != right.len() {
            report.verdict = false;
            report.note = Some(format!("list lengths differ: {} and {}", left.len(), right.len()));
            return Ok(report);
        }
        let all: Vec<usize> = (0..left.len()).collect();
        self.run_labels(&mut report, left, right, |_| (all.clone(), all.clone()))?;
        Ok(report)
    }

    /// Isomorphism test for nonzero objects whose end terms are uniserial or
    /// zero, matching lower classes over the nonzero `A` and upper classes
    /// over the nonzero `C`.
    pub fn completo_prime(&self, left: &[usize], right: &[usize]) -> Result<DecisionReport> {
        for &i in left.iter().chain(right) {
            let o = &self.objects[i];
            if o.is_zero() {
                return Err(Error::ScopeViolation("zero object in a list".into()));
            }
            if !o.has_uniserial_ends() {
                return Err(Error::ScopeViolation(format!("{o} has an end term that is neither zero nor uniserial")));
            }
        }
        let mut report = DecisionReport::new(Method::CompletoPrime);
        let lower = |ids: &[usize]| -> Vec<usize> {
            (0..ids.len()).filter(|&p| !self.objects[ids[p]].sub().is_trivial()).collect()
        };
        let upper = |ids: &[usize]| -> Vec<usize> {
            (0..ids.len()).filter(|&p| !self.objects[ids[p]].c_type().is_zero()).collect()
        };
        report.index_sets.insert("X_l".into(), lower(left));
        report.index_sets.insert("X_u".into(), upper(left));
        report.index_sets.insert("X'_l".into(), lower(right));
        report.index_sets.insert("X'_u".into(), upper(right));
        self.run_labels(&mut report, left, right, |label| {
            if label.is_lower() {
                (lower(left), lower(right))
            } else {
                (upper(left), upper(right))
            }
        })?;
        Ok(report)
    }
}

fn pool_of(left: &[ExtObject], right: &[ExtObject], caps: &Caps) -> Result<(ObjectPool, Vec<usize>, Vec<usize>)> {
    let objects: Vec<ExtObject> = left.iter().chain(right).cloned().collect();
    let pool = ObjectPool::new(objects, caps)?;
    let l = (0..left.len()).collect();
    let r = (left.len()..left.len() + right.len()).collect();
    Ok((pool, l, r))
}

pub fn decide_parziale(left: &[ExtObject], right: &[ExtObject], caps: &Caps) -> Result<DecisionReport> {
    let (pool, l, r) = pool_of(left, right, caps)?;
    pool.parziale(&l, &r)
}

pub fn decide_completo(left: &[ExtObject], right: &[ExtObject], caps: &Caps) -> Result<DecisionReport> {
    let (pool, l, r) = pool_of(left, right, caps)?;
    pool.completo(&l, &r)
}

pub fn decide_completo_prime(left: &[ExtObject], right: &[ExtObject], caps: &Caps) -> Result<DecisionReport> {
    let (pool, l, r) = pool_of(left, right, caps)?;
    pool.completo_prime(&l, &r)
}

/// Exhaustive isomorphism search on the direct sums.
pub fn brute_force_iso(left: &[ExtObject], right: &[ExtObject], caps: &Caps) -> Result<DecisionReport> {
    let run = oracle_iso(left, right, caps)?;
    let mut report = DecisionReport::new(Method::BruteForce);
    report.verdict = run.search.iso.is_some();
    report.iso = run.search.iso.as_ref().map(|f| IsoWitness::from_hom(f, run.search.nodes));
    if !report.verdict {
        report.note = Some(format!("no isomorphism after {} search nodes", run.search.nodes));
    }
    Ok(report)
}

/// Inverse of a group isomorphism.
pub fn inverse(f: &Hom) -> Result<Hom> {
    if !f.is_iso() {
        return Err(Error::InvalidInput("map is not invertible".into()));
    }
    let g = f.domain();
    let h = f.codomain();
    let table = f.image_table();
    let mut pre = vec![0usize; h.size()];
    for (i, &t) in table.iter().enumerate() {
        pre[t] = i;
    }
    let images: Vec<Element> = (0..h.rank()).map(|j| g.element_at(pre[h.index_of(&h.unit(j))])).collect();
    Hom::from_images(h.clone(), g.clone(), &images)
}

/// The digraph read off an isomorphism `α: ⊕B_h -> ⊕B'_k`: an edge from
/// left summand `h` to right summand `k` when `π'_k α ε_h` satisfies the
/// label's predicate, and from `k` to `h` likewise for `α⁻¹`. Summands whose
/// labelled end term is zero are left out.
pub fn iso_digraph(
    left: &DirectSum,
    right: &DirectSum,
    alpha: &Hom,
    label: ClassLabel,
) -> Result<(BipartiteDigraph, Vec<usize>, Vec<usize>)> {
    let beta = inverse(alpha)?;
    let keep = |o: &ExtObject| {
        if label.is_lower() {
            !o.sub().is_trivial()
        } else {
            !o.c_type().is_zero()
        }
    };
    let xs: Vec<usize> = (0..left.summands.len()).filter(|&h| keep(&left.summands[h])).collect();
    let ys: Vec<usize> = (0..right.summands.len()).filter(|&k| keep(&right.summands[k])).collect();
    let piece = |from: &DirectSum, h: usize, to: &DirectSum, k: usize, map: &Hom| -> Result<ExtMorphism> {
        let f = to.projection(k).compose(&map.compose(&from.embedding(h))?)?;
        ExtMorphism::new(&from.summands[h], &to.summands[k], f)
    };
    let mut edges = Vec::new();
    for (a, &h) in xs.iter().enumerate() {
        for (b, &k) in ys.iter().enumerate() {
            if predicate(&piece(left, h, right, k, alpha)?, label) {
                edges.push((a, xs.len() + b));
            }
            if predicate(&piece(right, k, left, h, &beta)?, label) {
                edges.push((xs.len() + b, a));
            }
        }
    }
    Ok((BipartiteDigraph::from_ids(xs.len(), ys.len(), &edges)?, xs, ys))
}

/// Problems found when re-checking a report's witnesses against the lists.
/// Classes are re-derived by fresh morphism searches, not from a pool.
pub fn witness_problems(
    r: &DecisionReport,
    left: &[ExtObject],
    right: &[ExtObject],
    caps: &Caps,
) -> Result<Vec<String>> {
    let mut problems = Vec::new();
    let sets = |label: ClassLabel| -> Option<(Vec<usize>, Vec<usize>)> {
        let key = |side: &str| -> Option<Vec<usize>> {
            match r.method {
                Method::Parziale => r.index_sets.get(&format!("{side}_{}", label.name())).cloned(),
                Method::CompletoPrime => {
                    let b = if label.is_lower() { "l" } else { "u" };
                    let side = if side == "X" { "X" } else { "X'" };
                    r.index_sets.get(&format!("{side}_{b}")).cloned()
                }
                Method::Completo => Some(if side == "X" {
                    (0..left.len()).collect()
                } else {
                    (0..right.len()).collect()
                }),
                Method::BruteForce => None,
            }
        };
        Some((key("X")?, key("Y")?))
    };
    for (&label, pairs) in &r.witnesses {
        let mut dom: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let mut cod: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        dom.sort_unstable();
        cod.sort_unstable();
        if dom.windows(2).any(|w| w[0] == w[1]) || cod.windows(2).any(|w| w[0] == w[1]) {
            problems.push(format!("{label}: witness is not injective"));
        }
        if let Some((xs, ys)) = sets(label) {
            if dom != xs || cod != ys {
                problems.push(format!("{label}: witness does not cover the index sets"));
            }
        }
        for &(i, j) in pairs {
            let (Some(x), Some(y)) = (left.get(i), right.get(j)) else {
                problems.push(format!("{label}: index ({i}, {j}) out of range"));
                continue;
            };
            match crate::classes::same_class(x, y, label, caps)? {
                Some(w) if predicate(&w.forward, label) && predicate(&w.backward, label) => {}
                _ => problems.push(format!("{label}: left {i} and right {j} are in different classes")),
            }
        }
    }
    if r.verdict && r.method != Method::BruteForce && r.witnesses.len() != 4 {
        problems.push("true verdict without all four bijections".into());
    }
    if let Some(w) = &r.iso {
        let l = crate::oracle::sum_of(left, caps)?;
        let rs = crate::oracle::sum_of(right, caps)?;
        let (gl, gr) = (l.object.group(), rs.object.group());
        if w.source_orders != gl.factors() || w.target_orders != gr.factors() || w.images.len() != gl.rank() {
            problems.push("isomorphism table does not fit the sums".into());
        } else {
            let imgs: Result<Vec<Element>> = w.images.iter().map(|c| gr.element(c)).collect();
            let ok = imgs
                .and_then(|imgs| Hom::from_images(gl.clone(), gr.clone(), &imgs))
                .and_then(|f| ExtMorphism::new(&l.object, &rs.object, f))
                .map(|m| crate::ext::is_iso_in_e(&m));
            if !matches!(ok, Ok(true)) {
                problems.push("isomorphism table is not an isomorphism of the sums".into());
            }
        }
    } else if r.verdict && r.method == Method::BruteForce {
        problems.push("true oracle verdict without an isomorphism".into());
    }
    Ok(problems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::make_ext;
    use crate::group::Group;

    fn caps() -> Caps {
        Caps::default()
    }

    fn obj(orders: &[u64], gens: &[&[u64]]) -> ExtObject {
        let b = Group::canonicalize(orders).unwrap();
        let gens: Vec<Element> = gens.iter().map(|g| b.element(g).unwrap()).collect();
        make_ext(&b, &gens, &caps()).unwrap()
    }

    /// `0 -> Z/2 -> Z/6 -> Z/3 -> 0` and `0 -> Z/3 -> Z/6 -> Z/2 -> 0`.
    fn z6_pair() -> (ExtObject, ExtObject) {
        (obj(&[2, 3], &[&[1, 0]]), obj(&[2, 3], &[&[0, 1]]))
    }

    #[test]
    fn identical_lists() {
        let (x, y) = z6_pair();
        let l = vec![x, y];
        for r in [
            decide_parziale(&l, &l, &caps()).unwrap(),
            decide_completo(&l, &l, &caps()).unwrap(),
            decide_completo_prime(&l, &l, &caps()).unwrap(),
            brute_force_iso(&l, &l, &caps()).unwrap(),
        ] {
            assert!(r.verdict, "{:?}", r.method);
        }
    }

    #[test]
    fn z6_singletons_differ() {
        let (x, y) = z6_pair();
        let p = decide_parziale(&[x.clone()], &[y.clone()], &caps()).unwrap();
        assert!(!p.verdict);
        assert!(!p.incompatible.is_empty());
        for (_, pairs) in &p.incompatible {
            assert_eq!(pairs, &vec![(0, 0)]);
        }
        assert!(!decide_completo(&[x.clone()], &[y.clone()], &caps()).unwrap().verdict);
        assert!(!brute_force_iso(&[x], &[y], &caps()).unwrap().verdict);
    }

    #[test]
    fn permutation() {
        let (x, _) = z6_pair();
        let z = obj(&[4], &[&[2]]);
        let l = vec![x.clone(), z.clone()];
        let r = vec![z, x];
        assert!(decide_parziale(&l, &r, &caps()).unwrap().verdict);
        assert!(decide_completo(&l, &r, &caps()).unwrap().verdict);
    }

    #[test]
    fn length_mismatch() {
        let (x, _) = z6_pair();
        let r = decide_completo(&[x.clone()], &[x.clone(), x], &caps()).unwrap();
        assert!(!r.verdict);
        assert!(r.note.is_some());
    }

    fn exchange() -> (Vec<ExtObject>, Vec<ExtObject>) {
        let left = vec![obj(&[2, 3], &[&[1, 0]]), obj(&[2, 3], &[&[0, 1]])];
        let right = vec![obj(&[2, 2], &[&[1, 0]]), obj(&[3, 3], &[&[1, 0]])];
        (left, right)
    }

    #[test]
    fn exchange_family() {
        let (left, right) = exchange();
        assert!(left[1].sub().order() == 3);
        let c = caps();
        assert!(decide_completo(&left, &right, &c).unwrap().verdict);
        assert!(decide_parziale(&left, &right, &c).unwrap().verdict);
        assert!(decide_completo_prime(&left, &right, &c).unwrap().verdict);
        let o = brute_force_iso(&left, &right, &c).unwrap();
        assert!(o.verdict);
        for i in 0..2 {
            for j in 0..2 {
                assert!(!crate::classes::iso_via_classes(&left[i], &right[j], &c).unwrap());
            }
        }
    }

    #[test]
    fn degenerate_lists() {
        let c = caps();
        let top = obj(&[2], &[&[1]]);
        let bottom = obj(&[3], &[]);
        let whole = obj(&[2, 3], &[&[1, 0]]);
        let r = decide_completo_prime(&[top.clone(), bottom.clone()], &[whole.clone()], &c).unwrap();
        assert!(r.verdict, "{r:?}");
        assert!(brute_force_iso(&[top, bottom], &[whole], &c).unwrap().verdict);
        let c2 = obj(&[2], &[]);
        let c3 = obj(&[3], &[]);
        assert!(!decide_completo_prime(&[c2.clone()], &[c3.clone()], &c).unwrap().verdict);
        assert!(!brute_force_iso(&[c2], &[c3], &c).unwrap().verdict);
        assert!(matches!(
            decide_completo_prime(&[ExtObject::zero()], &[], &c),
            Err(Error::ScopeViolation(_))
        ));
    }

    #[test]
    fn witnesses_recheck() {
        let (left, right) = exchange();
        let c = caps();
        for r in [
            decide_parziale(&left, &right, &c).unwrap(),
            decide_completo(&left, &right, &c).unwrap(),
            decide_completo_prime(&left, &right, &c).unwrap(),
            brute_force_iso(&left, &right, &c).unwrap(),
        ] {
            assert!(witness_problems(&r, &left, &right, &c).unwrap().is_empty(), "{:?}", r.method);
        }
        let mut bad = decide_completo(&left, &right, &c).unwrap();
        let pairs = bad.witnesses.get_mut(&ClassLabel::ML).unwrap();
        pairs[0].1 = 1 - pairs[0].1;
        pairs[1].1 = 1 - pairs[1].1;
        assert!(!witness_problems(&bad, &left, &right, &c).unwrap().is_empty());
    }

    #[test]
    fn split_vs_nonsplit() {
        let split = obj(&[2, 2], &[&[1, 0]]);
        let nonsplit = obj(&[4], &[&[2]]);
        assert!(!brute_force_iso(&[split], &[nonsplit], &caps()).unwrap().verdict);
    }

    #[test]
    fn digraph_from_exchange_iso() {
        let (left, right) = exchange();
        let c = caps();
        let run = oracle_iso(&left, &right, &c).unwrap();
        let alpha = run.search.iso.clone().unwrap();
        for label in ClassLabel::ALL {
            let (d, _, _) = iso_digraph(&run.left, &run.right, &alpha, label).unwrap();
            let h = crate::digraph::hall_condition(&d, crate::digraph::HallMode::Matching, &c).unwrap();
            assert!(h.holds, "{label}");
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let g = Group::canonicalize(&[4, 2]).unwrap();
        let f = Hom::new(g.clone(), g.clone(), &[vec![1, 2], vec![1, 1]]).unwrap();
        let inv = inverse(&f).unwrap();
        assert_eq!(inv.compose(&f).unwrap(), Hom::identity(g));
    }
}
