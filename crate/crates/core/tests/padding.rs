//! A second decision path for lists with degenerate members: merge objects
//! with `C = 0` and objects with `A = 0` into split sums, pad the rest with a
//! simple module, and decide the resulting lists of in-scope objects by
//! matching all four classes.

use extcat::corpus::{corpus, CorpusSpec};
use extcat::decide::{decide_completo, decide_completo_prime};
use extcat::ext::{direct_sum, make_ext, ExtObject};
use extcat::group::Group;
use extcat::oracle::oracle_iso;
use extcat::Caps;

struct Shape {
    lower: usize,
    upper: usize,
}

fn shape(list: &[ExtObject]) -> Shape {
    Shape {
        lower: list.iter().filter(|o| !o.sub().is_trivial()).count(),
        upper: list.iter().filter(|o| !o.c_type().is_zero()).count(),
    }
}

/// The list rewritten as in-scope objects.
fn padded(list: &[ExtObject], caps: &Caps) -> Vec<ExtObject> {
    let z2 = Group::cyclic(2).unwrap();
    let s_lower = make_ext(&z2, &[z2.unit(0)], caps).unwrap();
    let s_upper = make_ext(&z2, &[], caps).unwrap();
    let sum = |a: &ExtObject, b: &ExtObject| direct_sum(&[a.clone(), b.clone()], caps).unwrap().object;
    let mut out: Vec<ExtObject> = list.iter().filter(|o| o.in_u()).cloned().collect();
    let lows: Vec<&ExtObject> = list.iter().filter(|o| o.c_type().is_zero()).collect();
    let ups: Vec<&ExtObject> = list.iter().filter(|o| o.sub().is_trivial()).collect();
    let u = lows.len().min(ups.len());
    for k in 0..u {
        out.push(sum(lows[k], ups[k]));
    }
    for o in &ups[u..] {
        out.push(sum(o, &s_lower));
    }
    for o in &lows[u..] {
        out.push(sum(o, &s_upper));
    }
    assert!(out.iter().all(ExtObject::in_u));
    out
}

fn by_padding(left: &[ExtObject], right: &[ExtObject], caps: &Caps) -> bool {
    let (l, r) = (shape(left), shape(right));
    if l.lower != r.lower || l.upper != r.upper {
        return false;
    }
    decide_completo(&padded(left, caps), &padded(right, caps), caps).unwrap().verdict
}

#[test]
fn padding_agrees_with_direct_test() {
    let caps = Caps::default();
    let spec = CorpusSpec::new(16, &[2, 3]).with_degenerate();
    let objs: Vec<ExtObject> = corpus(&spec, &caps).unwrap().into_iter().map(|e| e.object).collect();
    let mut lists: Vec<Vec<ExtObject>> = vec![Vec::new()];
    for i in 0..objs.len() {
        lists.push(vec![objs[i].clone()]);
        for j in i..objs.len() {
            lists.push(vec![objs[i].clone(), objs[j].clone()]);
        }
    }
    let degenerate = |l: &[ExtObject]| l.iter().any(|o| !o.in_u());
    let mut agree_true = 0;
    let mut checked = 0;
    for (a, l) in lists.iter().enumerate() {
        for r in &lists[a..] {
            if !degenerate(l) && !degenerate(r) {
                continue;
            }
            let direct = decide_completo_prime(l, r, &caps).unwrap().verdict;
            let padded = by_padding(l, r, &caps);
            assert_eq!(direct, padded, "{l:?} vs {r:?}");
            checked += 1;
            if direct {
                agree_true += 1;
                assert!(oracle_iso(l, r, &caps).unwrap().search.iso.is_some());
            }
        }
    }
    assert!(checked > 1000 && agree_true > 20, "{checked} {agree_true}");
}

#[test]
fn degenerate_pair_against_split_object() {
    // Z/2 with A = Z/2 plus Z/3 with A = 0 is the split object on Z/6
    let caps = Caps::default();
    let z2 = Group::cyclic(2).unwrap();
    let z3 = Group::cyclic(3).unwrap();
    let left = vec![make_ext(&z2, &[z2.unit(0)], &caps).unwrap(), make_ext(&z3, &[], &caps).unwrap()];
    let z6 = Group::canonicalize(&[2, 3]).unwrap();
    let right = vec![make_ext(&z6, &[z6.element(&[1, 0]).unwrap()], &caps).unwrap()];
    assert!(by_padding(&left, &right, &caps));
    assert!(decide_completo_prime(&left, &right, &caps).unwrap().verdict);
}
