//! Enumeration of extensions with uniserial end terms, one per isomorphism
//! class.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ext::{make_ext, ExtObject};
use crate::group::{factorize, Element, Group};
use crate::oracle::find_iso;
use crate::par;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSpec {
    pub max_order: u64,
    pub primes: Vec<u64>,
    /// Also include objects with `A = 0` or `C = 0`.
    pub degenerate: bool,
}

impl CorpusSpec {
    pub fn new(max_order: u64, primes: &[u64]) -> CorpusSpec {
        CorpusSpec {
            max_order,
            primes: primes.to_vec(),
            degenerate: false,
        }
    }

    pub fn with_degenerate(mut self) -> CorpusSpec {
        self.degenerate = true;
        self
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    /// Generator of `A`, or `None` when `A = 0`.
    pub generator: Option<Element>,
    pub object: ExtObject,
}

/// Canonical group types of order at most `max_order` over `primes`, with at
/// most `max_rank` cyclic factors, sorted by order and then factors.
pub fn group_types(max_order: u64, primes: &[u64], max_rank: usize) -> Vec<Group> {
    // exponent partitions per prime, as descending prime-power lists
    fn parts(p: u64, budget: u64, max_len: usize, largest: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        out.push(acc.clone());
        if acc.len() == max_len {
            return;
        }
        let mut q = p;
        while q <= largest && q <= budget {
            acc.push(q);
            parts(p, budget / q, max_len, q, acc, out);
            acc.pop();
            q *= p;
        }
    }
    let mut types: Vec<Vec<u64>> = vec![Vec::new()];
    let mut ps = primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    for &p in &ps {
        let mut next = Vec::new();
        for t in &types {
            let used: u64 = t.iter().product();
            let mut options = Vec::new();
            parts(p, max_order / used, max_rank, u64::MAX, &mut Vec::new(), &mut options);
            for o in options {
                // the rank bound applies to each primary part
                let mut merged = t.clone();
                merged.extend(o);
                next.push(merged);
            }
        }
        types = next;
    }
    let mut groups: Vec<Group> = types
        .into_iter()
        .filter(|t| t.iter().product::<u64>() <= max_order)
        .map(|t| Group::canonicalize(&t).expect("prime powers"))
        .collect();
    groups.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.factors().cmp(b.factors())));
    groups
}

fn entry_name(b: &Group, gen: Option<&Element>) -> String {
    let orders: Vec<String> = b.factors().iter().map(u64::to_string).collect();
    let a = match gen {
        None => "0".to_string(),
        Some(g) => g.coords().iter().map(u64::to_string).collect::<Vec<_>>().join("x"),
    };
    format!("B{}_A{}", orders.join("x"), a)
}

/// All objects on `b` with uniserial (or, if asked, zero) end terms, one per
/// isomorphism class, in a deterministic order.
pub fn objects_on(b: &Group, degenerate: bool, caps: &Caps) -> Result<Vec<CorpusEntry>> {
    let candidates = subgroups_on(b, degenerate, caps)?;
    let mut reps: Vec<(Option<Element>, ExtObject)> = Vec::new();
    for (g, x) in candidates {
        let mut fresh = true;
        for (_, r) in &reps {
            if r.sub().order() == x.sub().order() && find_iso(r, &x, caps)?.iso.is_some() {
                fresh = false;
                break;
            }
        }
        if fresh {
            reps.push((g, x));
        }
    }
    Ok(entries(b, reps))
}

fn entries(b: &Group, objects: Vec<(Option<Element>, ExtObject)>) -> Vec<CorpusEntry> {
    objects
        .into_iter()
        .map(|(g, x)| CorpusEntry {
            name: entry_name(b, g.as_ref()),
            generator: g,
            object: x,
        })
        .collect()
}

/// One object per in-scope subgroup of `b`, isomorphic copies included.
fn subgroups_on(b: &Group, degenerate: bool, caps: &Caps) -> Result<Vec<(Option<Element>, ExtObject)>> {
    b.check_enumerable(caps)?;
    let mut seen_subgroups: HashSet<Vec<usize>> = HashSet::new();
    let mut candidates: Vec<(Option<Element>, ExtObject)> = Vec::new();
    if degenerate {
        if let Ok(x) = make_ext(b, &[], caps) {
            seen_subgroups.insert(vec![0]);
            candidates.push((None, x));
        }
    }
    for i in 1..b.size() {
        if factorize(b.order_of_index(i)).len() != 1 {
            continue;
        }
        let g = b.element_at(i);
        let x = match make_ext(b, std::slice::from_ref(&g), caps) {
            Ok(x) => x,
            Err(Error::ScopeViolation(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut key = x.sub().element_indices().to_vec();
        key.sort_unstable();
        if !seen_subgroups.insert(key) {
            continue;
        }
        if x.in_u() || (degenerate && x.has_uniserial_ends()) {
            candidates.push((Some(g), x));
        }
    }
    Ok(candidates)
}

fn check_primes(primes: &[u64]) -> Result<()> {
    for &p in primes {
        if factorize(p) != vec![(p, 1)] {
            return Err(Error::InvalidInput(format!("{p} is not a prime")));
        }
    }
    Ok(())
}

/// The corpus for a bound: every in-scope object with `|B| <= max_order`.
pub fn corpus(spec: &CorpusSpec, caps: &Caps) -> Result<Vec<CorpusEntry>> {
    check_primes(&spec.primes)?;
    // with cyclic A and C, B has at most two cyclic factors
    let groups = group_types(spec.max_order, &spec.primes, 2);
    let groups: Vec<Group> = groups.into_iter().filter(|g| !g.is_zero() && g.rank() <= 2).collect();
    let per_group = par::try_map(&groups, |b| objects_on(b, spec.degenerate, caps))?;
    Ok(per_group.into_iter().flatten().collect())
}

/// Like [`corpus`], but with one object per subgroup instead of one per
/// isomorphism class.
pub fn subgroup_corpus(spec: &CorpusSpec, caps: &Caps) -> Result<Vec<CorpusEntry>> {
    check_primes(&spec.primes)?;
    let groups: Vec<Group> = group_types(spec.max_order, &spec.primes, 2)
        .into_iter()
        .filter(|g| !g.is_zero() && g.rank() <= 2)
        .collect();
    let per_group = par::try_map(&groups, |b| Ok(entries(b, subgroups_on(b, spec.degenerate, caps)?)))?;
    Ok(per_group.into_iter().flatten().collect())
}

/// A seeded sample of `k` entries, kept in corpus order.
pub fn sample(entries: &[CorpusEntry], k: usize, seed: u64) -> Vec<CorpusEntry> {
    let mut idx: Vec<usize> = (0..entries.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    idx.truncate(k);
    idx.sort_unstable();
    idx.into_iter().map(|i| entries[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn types_small() {
        let t: Vec<String> = group_types(8, &[2], 2).iter().map(|g| g.to_string()).collect();
        assert_eq!(t, vec!["0", "Z/2", "Z/2 + Z/2", "Z/4", "Z/4 + Z/2", "Z/8"]);
        let t = group_types(6, &[2, 3], 2);
        assert!(t.iter().any(|g| g.factors() == [2, 3]));
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn z4_objects() {
        let c = Caps::default();
        let b = Group::cyclic(4).unwrap();
        let e = objects_on(&b, false, &c).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].name, "B4_A2");
        let d = objects_on(&b, true, &c).unwrap();
        // A = 0, A = <2>, A = Z/4
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn klein_objects_dedupe() {
        // three order-2 subgroups, all equivalent under the automorphisms
        let b = Group::canonicalize(&[2, 2]).unwrap();
        let e = objects_on(&b, false, &Caps::default()).unwrap();
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn z4z2_objects() {
        // <(2,0)> has quotient Z/2+Z/2 and is out; <(1,0)>, <(0,1)>, <(2,1)>, <(1,1)> remain,
        // <(1,0)> ~ <(1,1)> and <(0,1)> ~ <(2,1)>
        let b = Group::canonicalize(&[4, 2]).unwrap();
        let e = objects_on(&b, false, &Caps::default()).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(subgroups_on(&b, false, &Caps::default()).unwrap().len(), 4);
    }

    #[test]
    fn sample_deterministic() {
        let c = Caps::default();
        let all = corpus(&CorpusSpec::new(16, &[2]), &c).unwrap();
        let a = sample(&all, 3, 7);
        let b = sample(&all, 3, 7);
        assert_eq!(
            a.iter().map(|e| &e.name).collect::<Vec<_>>(),
            b.iter().map(|e| &e.name).collect::<Vec<_>>()
        );
        assert_eq!(a.len(), 3.min(all.len()));
    }
}
