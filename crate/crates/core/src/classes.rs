//! The four `(a, b)`-class invariants of an extension and equality tests
//! between them.
//!
//! `a` is monogeny (`m`) or epigeny (`e`), `b` picks the lower term `A` or the
//! upper term `C`. Two objects share a class when there are morphisms both
//! ways whose action on the chosen end term is injective (`m`) or surjective
//! (`e`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ext::{morphisms, ExtMorphism, ExtObject};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    #[serde(rename = "m,l")]
    ML,
    #[serde(rename = "e,l")]
    EL,
    #[serde(rename = "m,u")]
    MU,
    #[serde(rename = "e,u")]
    EU,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 4] = [ClassLabel::ML, ClassLabel::EL, ClassLabel::MU, ClassLabel::EU];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_lower(self) -> bool {
        matches!(self, ClassLabel::ML | ClassLabel::EL)
    }

    pub fn is_mono(self) -> bool {
        matches!(self, ClassLabel::ML | ClassLabel::MU)
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::ML => "m,l",
            ClassLabel::EL => "e,l",
            ClassLabel::MU => "m,u",
            ClassLabel::EU => "e,u",
        }
    }

    /// Accepts `m,l`, `ml`, `(m,l)` and the like.
    pub fn parse(s: &str) -> Option<ClassLabel> {
        let t: String = s.chars().filter(|c| c.is_ascii_alphabetic()).collect();
        match t.to_ascii_lowercase().as_str() {
            "ml" => Some(ClassLabel::ML),
            "el" => Some(ClassLabel::EL),
            "mu" => Some(ClassLabel::MU),
            "eu" => Some(ClassLabel::EU),
            _ => None,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.name())
    }
}

/// Whether `m` acts on the labelled end term as the label requires:
///
/// * `(m,l)`: `ker f ∩ A = 0`
/// * `(e,l)`: `f(A) = A'`
/// * `(m,u)`: `f⁻¹(A') = A`, i.e. the induced map on quotients is injective
/// * `(e,u)`: `f(B) + A' = B'`, i.e. the induced map is surjective
///
/// All four are decided from image orders.
pub fn predicate(m: &ExtMorphism, label: ClassLabel) -> bool {
    let (src, tgt) = (m.source(), m.target());
    match label {
        ClassLabel::ML => m.lower_image_order() == src.sub().order(),
        ClassLabel::EL => m.lower_image_order() == tgt.sub().order(),
        ClassLabel::MU => m.upper_image_order() == src.c_type().order(),
        ClassLabel::EU => m.upper_image_order() == tgt.c_type().order(),
    }
}

/// Necessary condition for a shared class: the labelled end terms have the
/// same order (mutual injections or surjections between finite groups).
pub fn end_orders_match(x: &ExtObject, y: &ExtObject, label: ClassLabel) -> bool {
    if label.is_lower() {
        x.sub().order() == y.sub().order()
    } else {
        x.c_type().order() == y.c_type().order()
    }
}

/// A pair of morphisms `forward: X -> Y`, `backward: Y -> X` both satisfying
/// the label's predicate.
#[derive(Clone, Debug)]
pub struct ClassWitness {
    pub forward: ExtMorphism,
    pub backward: ExtMorphism,
}

/// First morphism `x -> y` (in enumeration order) satisfying each wanted
/// label. One pass over the hom set serves all labels.
pub fn first_witnesses(
    x: &ExtObject,
    y: &ExtObject,
    wanted: [bool; 4],
    caps: &Caps,
) -> Result<[Option<ExtMorphism>; 4]> {
    let mut found: [Option<ExtMorphism>; 4] = Default::default();
    let mut missing = wanted.iter().filter(|&&w| w).count();
    if missing == 0 {
        return Ok(found);
    }
    for m in morphisms(x, y, caps)? {
        for l in ClassLabel::ALL {
            let k = l.index();
            if wanted[k] && found[k].is_none() && predicate(&m, l) {
                found[k] = Some(m.clone());
                missing -= 1;
            }
        }
        if missing == 0 {
            break;
        }
    }
    Ok(found)
}

pub fn same_class(x: &ExtObject, y: &ExtObject, label: ClassLabel, caps: &Caps) -> Result<Option<ClassWitness>> {
    let mut wanted = [false; 4];
    wanted[label.index()] = end_orders_match(x, y, label);
    let mut p = class_profile_for(x, y, wanted, caps)?;
    Ok(p[label.index()].take())
}

fn class_profile_for(x: &ExtObject, y: &ExtObject, wanted: [bool; 4], caps: &Caps) -> Result<[Option<ClassWitness>; 4]> {
    let fwd = first_witnesses(x, y, wanted, caps)?;
    let back_wanted = [0, 1, 2, 3].map(|k| fwd[k].is_some());
    let bwd = first_witnesses(y, x, back_wanted, caps)?;
    let mut out: [Option<ClassWitness>; 4] = Default::default();
    for (k, (f, g)) in fwd.into_iter().zip(bwd).enumerate() {
        if let (Some(forward), Some(backward)) = (f, g) {
            out[k] = Some(ClassWitness { forward, backward });
        }
    }
    Ok(out)
}

/// All four class comparisons at once.
pub fn class_profile(x: &ExtObject, y: &ExtObject, caps: &Caps) -> Result<[Option<ClassWitness>; 4]> {
    let wanted = ClassLabel::ALL.map(|l| end_orders_match(x, y, l));
    class_profile_for(x, y, wanted, caps)
}

/// Isomorphism of two objects with nonzero uniserial end terms, decided by
/// comparing all four classes.
pub fn iso_via_classes(x: &ExtObject, y: &ExtObject, caps: &Caps) -> Result<bool> {
    for o in [x, y] {
        if !o.in_u() {
            return Err(Error::ScopeViolation(format!("{o} does not have nonzero uniserial end terms")));
        }
    }
    Ok(class_profile(x, y, caps)?.iter().all(Option::is_some))
}

/// Equivalence classes of one label over a list of objects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassPartition {
    pub label: ClassLabel,
    pub blocks: Vec<Vec<usize>>,
}

/// Pairwise class equality for every pair of a list, all four labels.
#[derive(Clone, Debug)]
pub struct ClassTable {
    n: usize,
    same: Vec<[bool; 4]>,
    lower_nonzero: Vec<bool>,
    upper_nonzero: Vec<bool>,
}

impl ClassTable {
    pub fn build(objects: &[ExtObject], caps: &Caps) -> Result<ClassTable> {
        let n = objects.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let results = par::try_map(&pairs, |&(i, j)| {
            let p = class_profile(&objects[i], &objects[j], caps)?;
            Ok(p.map(|w| w.is_some()))
        })?;
        let mut same = vec![[false; 4]; n * n];
        for i in 0..n {
            same[i * n + i] = [true; 4];
        }
        for (&(i, j), r) in pairs.iter().zip(results) {
            same[i * n + j] = r;
            same[j * n + i] = r;
        }
        Ok(ClassTable {
            n,
            same,
            lower_nonzero: objects.iter().map(|o| !o.sub().is_trivial()).collect(),
            upper_nonzero: objects.iter().map(|o| !o.c_type().is_zero()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn same(&self, i: usize, j: usize, label: ClassLabel) -> bool {
        self.same[i * self.n + j][label.index()]
    }

    /// Whether the labelled end term of object `i` is nonzero.
    pub fn eligible(&self, i: usize, label: ClassLabel) -> bool {
        if label.is_lower() {
            self.lower_nonzero[i]
        } else {
            self.upper_nonzero[i]
        }
    }

    /// Blocks of `indices` (kept in the given order, duplicates allowed)
    /// under the label, skipping entries whose labelled end term is zero.
    /// Block members are positions into `indices`.
    pub fn partition_of(&self, label: ClassLabel, indices: &[usize]) -> Result<ClassPartition> {
        let elig: Vec<usize> = (0..indices.len()).filter(|&p| self.eligible(indices[p], label)).collect();
        let mut assigned = vec![false; indices.len()];
        let mut blocks = Vec::new();
        for &p in &elig {
            if assigned[p] {
                continue;
            }
            let block: Vec<usize> = elig
                .iter()
                .copied()
                .filter(|&q| !assigned[q] && self.same(indices[p], indices[q], label))
                .collect();
            for &q in &block {
                assigned[q] = true;
            }
            blocks.push(block);
        }
        self.check_transitive(label, indices, &blocks)?;
        Ok(ClassPartition { label, blocks })
    }

    fn check_transitive(&self, label: ClassLabel, indices: &[usize], blocks: &[Vec<usize>]) -> Result<()> {
        let err = |i, j, k| Error::NonTransitive {
            label: label.name().to_string(),
            i,
            j,
            k,
        };
        for (b, block) in blocks.iter().enumerate() {
            let head = block[0];
            for &j in block {
                for &k in block {
                    if !self.same(indices[j], indices[k], label) {
                        return Err(err(j, head, k));
                    }
                }
            }
            for other in &blocks[b + 1..] {
                for &j in block {
                    for &k in other {
                        if self.same(indices[j], indices[k], label) {
                            // k ~ j ~ head but k was not put in head's block
                            return Err(err(k, j, head));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Partition of a list under one label.
pub fn partition(objects: &[ExtObject], label: ClassLabel, caps: &Caps) -> Result<ClassPartition> {
    let table = ClassTable::build(objects, caps)?;
    let idx: Vec<usize> = (0..objects.len()).collect();
    table.partition_of(label, &idx)
}
