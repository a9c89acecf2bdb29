use proptest::prelude::*;
use proptest::sample::Index;

use extcat::classes::{predicate, ClassLabel};
use extcat::corpus::{corpus, CorpusSpec};
use extcat::decide::inverse;
use extcat::ext::{morphisms, ExtMorphism, ExtObject};
use extcat::format::{object_line, SpecFile};
use extcat::group::{enumerate_homs, Group, Hom};
use extcat::Caps;

fn objects() -> Vec<ExtObject> {
    let spec = CorpusSpec::new(24, &[2, 3]).with_degenerate();
    corpus(&spec, &Caps::default()).unwrap().into_iter().map(|e| e.object).collect()
}

fn pick<T: Clone>(v: &[T], i: &Index) -> T {
    v[i.index(v.len())].clone()
}

fn some_map(x: &ExtObject, y: &ExtObject, i: &Index) -> ExtMorphism {
    let all: Vec<ExtMorphism> = morphisms(x, y, &Caps::default()).unwrap().collect();
    pick(&all, i)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_ignores_order(mut orders in prop::collection::vec(prop::sample::select(vec![2u64, 3, 4, 6, 8, 9, 12]), 0..4), seed in any::<u64>()) {
        let g = Group::canonicalize(&orders).unwrap();
        let k = orders.len().max(1);
        orders.rotate_left((seed as usize) % k);
        let h = Group::canonicalize(&orders).unwrap();
        prop_assert_eq!(g.factors(), h.factors());
        prop_assert_eq!(g.order(), orders.iter().product::<u64>());
    }

    #[test]
    fn composition_is_associative(a in any::<Index>(), b in any::<Index>(), c in any::<Index>(), i in any::<Index>(), j in any::<Index>(), k in any::<Index>()) {
        let groups: Vec<Group> = [vec![4, 2], vec![6], vec![2, 2], vec![12]]
            .iter()
            .map(|o| Group::canonicalize(o).unwrap())
            .collect();
        let (g1, g2, g3) = (pick(&groups, &a), pick(&groups, &b), pick(&groups, &c));
        let caps = Caps::default();
        let homs = |x: &Group, y: &Group| -> Vec<Hom> { enumerate_homs(x, y, &caps).unwrap().collect() };
        let f = pick(&homs(&g1, &g2), &i);
        let g = pick(&homs(&g2, &g3), &j);
        let h = pick(&homs(&g3, &g1), &k);
        let left = h.compose(&g.compose(&f).unwrap()).unwrap();
        let right = h.compose(&g).unwrap().compose(&f).unwrap();
        prop_assert_eq!(left.raw_matrix(), right.raw_matrix());
        for x in g1.elements() {
            prop_assert_eq!(left.apply(&x), h.apply(&g.apply(&f.apply(&x))));
        }
    }

    #[test]
    fn predicates_closed_under_composition(a in any::<Index>(), b in any::<Index>(), c in any::<Index>(), i in any::<Index>(), j in any::<Index>()) {
        let objs = objects();
        let (x, y, z) = (pick(&objs, &a), pick(&objs, &b), pick(&objs, &c));
        let f = some_map(&x, &y, &i);
        let g = some_map(&y, &z, &j);
        let gf = g.compose(&f).unwrap();
        for l in ClassLabel::ALL {
            if predicate(&f, l) && predicate(&g, l) {
                prop_assert!(predicate(&gf, l), "{}", l);
            }
        }
    }

    #[test]
    fn automorphisms_invert(a in any::<Index>(), i in any::<Index>()) {
        let objs = objects();
        let x = pick(&objs, &a);
        let isos: Vec<Hom> = morphisms(&x, &x, &Caps::default())
            .unwrap()
            .map(|m| m.map().clone())
            .filter(Hom::is_iso)
            .collect();
        let f = pick(&isos, &i);
        let g = inverse(&f).unwrap();
        prop_assert_eq!(g.compose(&f).unwrap(), Hom::identity(x.group().clone()));
        prop_assert_eq!(f.compose(&g).unwrap(), Hom::identity(x.group().clone()));
    }

    #[test]
    fn spec_text_round_trips(picks in prop::collection::vec(any::<Index>(), 0..6)) {
        let spec = CorpusSpec::new(24, &[2, 3]).with_degenerate();
        let entries = corpus(&spec, &Caps::default()).unwrap();
        let mut text = String::new();
        for (k, p) in picks.iter().enumerate() {
            let e = pick(&entries, p);
            let gens: Vec<_> = e.generator.iter().cloned().collect();
            text.push_str(&object_line(&format!("o{k}"), e.object.group(), &gens));
            text.push('\n');
        }
        if !picks.is_empty() {
            text.push_str("list all");
            for k in 0..picks.len() {
                text.push_str(&format!(" o{k}"));
            }
            text.push('\n');
        }
        let caps = Caps::default();
        let once = SpecFile::parse(&text, &caps).unwrap();
        let twice = SpecFile::parse(&once.to_text(), &caps).unwrap();
        prop_assert_eq!(once.to_text(), twice.to_text());
        prop_assert_eq!(once.to_text(), text);
    }
}
