//! The four predicates and the class relation against their set-theoretic
//! definitions, element by element.

use std::collections::HashSet;

use extcat::classes::{predicate, same_class, ClassLabel};
use extcat::corpus::{corpus, CorpusSpec};
use extcat::ext::{morphisms, ExtMorphism, ExtObject};
use extcat::Caps;

fn literal(m: &ExtMorphism, label: ClassLabel) -> bool {
    let (x, y) = (m.source(), m.target());
    let f = m.map();
    let (b, b2) = (x.group(), y.group());
    let a = x.sub();
    let a2 = y.sub();
    match label {
        ClassLabel::ML => a.element_indices().iter().all(|&i| i == 0 || f.apply_index(i) != 0),
        ClassLabel::EL => {
            let img: HashSet<usize> = a.element_indices().iter().map(|&i| f.apply_index(i)).collect();
            img.len() == a2.element_indices().len() && img.iter().all(|&j| a2.contains_index(j))
        }
        ClassLabel::MU => (0..b.size()).all(|i| a2.contains_index(f.apply_index(i)) == a.contains_index(i)),
        ClassLabel::EU => {
            let mut hit = vec![false; b2.size()];
            for i in 0..b.size() {
                let fi = f.apply_index(i);
                for &j in a2.element_indices() {
                    hit[b2.add_index(fi, j)] = true;
                }
            }
            hit.iter().all(|&h| h)
        }
    }
}

fn objects(bound: u64) -> Vec<ExtObject> {
    let spec = CorpusSpec::new(bound, &[2, 3]).with_degenerate();
    corpus(&spec, &Caps::default()).unwrap().into_iter().map(|e| e.object).collect()
}

#[test]
fn predicates_match_definitions() {
    let caps = Caps::default();
    let objs = objects(24);
    let mut checked = 0;
    for x in &objs {
        for y in &objs {
            for m in morphisms(x, y, &caps).unwrap() {
                for l in ClassLabel::ALL {
                    assert_eq!(predicate(&m, l), literal(&m, l), "{l} on {x} -> {y}: {:?}", m.map());
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 10_000, "{checked}");
}

#[test]
fn classes_match_literal_search() {
    let caps = Caps::default();
    let objs = objects(36);
    for x in &objs {
        for y in &objs {
            for l in ClassLabel::ALL {
                let there = morphisms(x, y, &caps).unwrap().any(|m| literal(&m, l));
                let back = morphisms(y, x, &caps).unwrap().any(|m| literal(&m, l));
                let got = same_class(x, y, l, &caps).unwrap().is_some();
                assert_eq!(got, there && back, "{l}: {x} vs {y}");
            }
        }
    }
}
