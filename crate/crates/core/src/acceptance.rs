//! The acceptance criteria. Each one runs a batch of exhaustive checks and
//! reports a single pass/fail line.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::classes::{iso_via_classes, same_class, ClassLabel, ClassTable};
use crate::corpus::{corpus, subgroup_corpus, CorpusSpec};
use crate::decide::{brute_force_iso, iso_digraph, witness_problems, DecisionReport, ObjectPool};
use crate::digraph::{hall_condition, is_violating_set, ks_relabel, validate_pairing, BipartiteDigraph, HallMode, KsOutcome};
use crate::endo::{analyze, associated_ideal_on, module_type, type_bound_holds, EndoRingAnalysis};
use crate::error::Result;
use crate::ext::{is_split, make_ext, split_parts, DirectSum, ExtObject};
use crate::group::{hom_count, Group};
use crate::oracle::{find_iso, oracle_iso, search_sums, sum_of};
use crate::par;
use crate::report::CriterionLine;

/// Largest `|B|` of the endomorphism-ring and lemma corpora.
pub const CORPUS_MAX_ORDER: u64 = 144;
pub const CORPUS_PRIMES: [u64; 2] = [2, 3];
/// Largest `|⊕B|` in the oracle comparison.
pub const SUM_MAX_ORDER: u64 = 1296;
pub const ENDO_TIME_LIMIT: Duration = Duration::from_secs(600);
pub const DIGRAPH_TIME_LIMIT: Duration = Duration::from_secs(120);
pub const DIGRAPH_MAX_SIDE: usize = 3;
/// Fewest checks each lemma must get.
pub const LEMMA_MIN_CHECKS: u64 = 500;
/// `|B|` bound for the associated-ideal checks, which compose every pair of
/// maps between two objects.
pub const ASSOCIATED_MAX_ORDER: u64 = 36;
/// Triples with different classes sampled for the associated-ideal checks.
pub const ASSOCIATED_SAMPLE: usize = 400;
/// `|B|` bound for the splitting criteria.
pub const SPLIT_MAX_ORDER: u64 = 576;
pub const SEED: u64 = 2024;

const MAX_REPORTED: usize = 3;

#[derive(Default)]
struct Tally {
    checks: u64,
    failures: u64,
    first: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(what());
        }
    }

    /// A failure that is not one of the counted checks (a time limit, say).
    fn fail(&mut self, msg: String) {
        self.failures += 1;
        if self.first.len() < MAX_REPORTED {
            self.first.push(msg);
        }
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.failures += other.failures;
        for m in other.first {
            if self.first.len() < MAX_REPORTED {
                self.first.push(m);
            }
        }
        self.notes.extend(other.notes);
    }
}

fn run(id: u32, name: &str, body: impl FnOnce(&mut Tally) -> Result<()>) -> CriterionLine {
    let start = Instant::now();
    let mut t = Tally::default();
    if let Err(e) = body(&mut t) {
        t.fail(format!("error: {e}"));
    }
    let mut detail = t.notes.join("; ");
    if t.failures > 0 {
        let head = format!("{} failures, first: {}", t.failures, t.first.join(" | "));
        detail = if detail.is_empty() { head } else { format!("{head}; {detail}") };
    }
    CriterionLine {
        id,
        name: name.to_string(),
        passed: t.failures == 0,
        checks: t.checks,
        detail,
        millis: start.elapsed().as_millis() as u64,
    }
}

fn obj(orders: &[u64], gens: &[&[u64]], caps: &Caps) -> Result<ExtObject> {
    let b = Group::canonicalize(orders)?;
    let gens = gens.iter().map(|c| b.element(c)).collect::<Result<Vec<_>>>()?;
    make_ext(&b, &gens, caps)
}

pub fn all(caps: &Caps) -> Vec<CriterionLine> {
    vec![
        endomorphism_rings(caps),
        oracle_agreement(caps),
        swapped_simples(caps),
        split_summands(caps),
        exchange_family(caps),
        digraph_exhaustion(caps),
        class_lemmas(caps),
    ]
}

/// Every in-scope object: the ring analysis with its internal invariants,
/// the CRT decomposition and the type bound.
pub fn endomorphism_rings(caps: &Caps) -> CriterionLine {
    run(1, "endomorphism rings", |t| {
        let start = Instant::now();
        let entries = corpus(&CorpusSpec::new(CORPUS_MAX_ORDER, &CORPUS_PRIMES), caps)?;
        let results = par::map(&entries, |e| -> Result<(bool, bool, bool, usize)> {
            let a = match analyze(&e.object, caps) {
                Ok(a) => a,
                Err(crate::Error::TheoremViolation(_)) => return Ok((false, false, false, 0)),
                Err(e) => return Err(e),
            };
            Ok((true, a.verify_crt(), type_bound_holds(&a, caps)?, a.type_count()))
        });
        let mut types = BTreeMap::new();
        for (e, r) in entries.iter().zip(results) {
            let (invariants, crt, bound, ty) = r?;
            t.check(invariants, || format!("{}: ring invariants", e.name));
            t.check(crt, || format!("{}: CRT decomposition", e.name));
            t.check(bound, || format!("{}: type bound", e.name));
            *types.entry(ty).or_insert(0usize) += 1;
        }
        let elapsed = start.elapsed();
        if elapsed > ENDO_TIME_LIMIT {
            t.fail(format!("took {:.0} s, limit {} s", elapsed.as_secs_f64(), ENDO_TIME_LIMIT.as_secs()));
        }
        let types: Vec<String> = types.iter().map(|(k, v)| format!("type {k}: {v}")).collect();
        t.note(format!("{} objects, {}", entries.len(), types.join(", ")));
        Ok(())
    })
}

/// Lists of at most two corpus objects, each pair decided by every
/// applicable decider and by the oracle.
pub fn oracle_agreement(caps: &Caps) -> CriterionLine {
    run(2, "oracle agreement", |t| {
        let spec = CorpusSpec::new(CORPUS_MAX_ORDER, &CORPUS_PRIMES).with_degenerate();
        let objects: Vec<ExtObject> = corpus(&spec, caps)?.into_iter().map(|e| e.object).collect();
        let n = objects.len();
        let mut lists: Vec<Vec<usize>> = vec![Vec::new()];
        lists.extend((0..n).map(|i| vec![i]));
        for i in 0..n {
            for j in i..n {
                if objects[i].group().order() * objects[j].group().order() <= SUM_MAX_ORDER {
                    lists.push(vec![i, j]);
                }
            }
        }
        let pool = ObjectPool::new(objects.clone(), caps)?;
        let members = |l: &[usize]| -> Vec<ExtObject> { l.iter().map(|&i| objects[i].clone()).collect() };
        let sums: Vec<DirectSum> = par::try_map(&lists, |l| sum_of(&members(l), caps))?;
        let in_u: Vec<bool> = lists.iter().map(|l| l.iter().all(|&i| objects[i].in_u())).collect();

        struct Row {
            tally: Tally,
            trues: Vec<usize>,
            searched: u64,
        }
        let rows = par::map_range(lists.len(), |a| -> Result<Row> {
            let mut row = Row {
                tally: Tally::default(),
                trues: Vec::new(),
                searched: 0,
            };
            for b in a..lists.len() {
                let search = search_sums(&sums[a], &sums[b].object, caps)?;
                if search.nodes > 0 {
                    row.searched += 1;
                }
                let truth = search.iso.is_some();
                if truth && a != b {
                    row.trues.push(b);
                }
                let show = |m: &str, v: bool| format!("{m} says {v} on {:?} vs {:?}, oracle {truth}", lists[a], lists[b]);
                let v = pool.completo_prime(&lists[a], &lists[b])?.verdict;
                row.tally.check(v == truth, || show("completo'", v));
                if in_u[a] && in_u[b] {
                    let v = pool.completo(&lists[a], &lists[b])?.verdict;
                    row.tally.check(v == truth, || show("completo", v));
                    let v = pool.parziale(&lists[a], &lists[b])?.verdict;
                    row.tally.check(v == truth, || show("parziale", v));
                }
            }
            Ok(row)
        });
        let mut positives = Vec::new();
        let mut searched = 0;
        for (a, row) in rows.into_iter().enumerate() {
            let row = row?;
            t.merge(row.tally);
            searched += row.searched;
            positives.extend(row.trues.into_iter().map(|b| (a, b)));
        }
        // witnesses of the distinct isomorphic pairs, re-derived from scratch
        let rechecks = par::try_map(&positives, |&(a, b)| -> Result<Vec<String>> {
            let (l, r) = (members(&lists[a]), members(&lists[b]));
            let mut problems = witness_problems(&pool.completo_prime(&lists[a], &lists[b])?, &l, &r, caps)?;
            problems.extend(witness_problems(&brute_force_iso(&l, &r, caps)?, &l, &r, caps)?);
            Ok(problems)
        })?;
        for (&(a, b), problems) in positives.iter().zip(rechecks) {
            t.check(problems.is_empty(), || format!("{:?} vs {:?}: {}", lists[a], lists[b], problems.join(", ")));
        }
        t.note(format!(
            "{n} objects, {} lists, {searched} oracle searches, {} isomorphic pairs of distinct lists",
            lists.len(),
            positives.len()
        ));
        Ok(())
    })
}

/// `0 -> Z/2 -> Z/6 -> Z/3 -> 0` against `0 -> Z/3 -> Z/6 -> Z/2 -> 0`.
pub fn swapped_simples(caps: &Caps) -> CriterionLine {
    use ClassLabel::*;
    run(3, "swapped simple modules over Z/6", |t| {
        let x = obj(&[2, 3], &[&[1, 0]], caps)?;
        let y = obj(&[2, 3], &[&[0, 1]], caps)?;
        let ax = analyze(&x, caps)?;
        let ay = analyze(&y, caps)?;
        let maps = |a: &EndoRingAnalysis, ids: &[usize]| -> Vec<Vec<u64>> {
            let mut v: Vec<Vec<u64>> = ids.iter().map(|&i| a.endos()[i].raw_matrix().to_vec()).collect();
            v.sort();
            v
        };
        let all = |a: &EndoRingAnalysis| maps(a, &(0..a.len()).collect::<Vec<_>>());
        for (name, a) in [("first", &ax), ("second", &ay)] {
            t.check(a.type_count() == 2, || format!("{name}: type {}", a.type_count()));
            t.check(a.ideals_equal(MU, EU), || format!("{name}: upper ideals differ"));
            t.check(a.ideals_equal(ML, EL), || format!("{name}: lower ideals differ"));
            t.check(!a.ideals_equal(ML, MU), || format!("{name}: lower equals upper"));
            for l in ClassLabel::ALL {
                t.check(a.is_maximal(l), || format!("{name}: {l} not maximal"));
            }
        }
        t.check(all(&ax) == all(&ay), || "the rings differ".into());
        t.check(maps(&ax, &ax.ideal(MU)) == maps(&ay, &ay.ideal(ML)), || {
            "upper ideal of the first is not the lower ideal of the second".into()
        });
        t.check(maps(&ax, &ax.ideal(ML)) == maps(&ay, &ay.ideal(MU)), || {
            "lower ideal of the first is not the upper ideal of the second".into()
        });
        for l in ClassLabel::ALL {
            t.check(same_class(&x, &y, l, caps)?.is_none(), || format!("{l}: classes agree"));
        }
        t.check(!iso_via_classes(&x, &y, caps)?, || "isomorphic by classes".into());
        let (l, r) = (vec![x.clone()], vec![y.clone()]);
        let reports = decide_all(&l, &r, caps)?;
        for rep in &reports {
            t.check(!rep.verdict, || format!("{} says isomorphic", rep.method.name()));
        }
        let p = &reports[0];
        for label in ClassLabel::ALL {
            t.check(p.index_sets[&format!("X_{}", label.name())] == [0], || format!("X_{label} not a singleton"));
            t.check(p.index_sets[&format!("Y_{}", label.name())] == [0], || format!("Y_{label} not a singleton"));
            t.check(p.incompatible.get(&label).map(Vec::as_slice) == Some(&[(0, 0)]), || {
                format!("{label}: the unique bijection is not reported as incompatible")
            });
        }
        t.check(p.witnesses.is_empty(), || "parziale reported class-preserving bijections".into());
        t.note("type 2 each, upper = lower of the other, every unique bijection fails".into());
        Ok(())
    })
}

/// `0 -> U -> U + V -> V -> 0` for several uniserial `U, V`.
pub fn split_summands(caps: &Caps) -> CriterionLine {
    const CHOICES: [(u64, u64); 10] = [(2, 3), (3, 2), (2, 2), (4, 2), (2, 4), (3, 9), (9, 3), (8, 4), (4, 9), (27, 2)];
    run(4, "split extension of V by U", |t| {
        for (u, v) in CHOICES {
            let gu = Group::cyclic(u)?;
            let gv = Group::cyclic(v)?;
            let (b, pos) = Group::direct_sum(&[gu.clone(), gv.clone()]);
            let (pu, pv) = (pos[0][0], pos[1][0]);
            let x = make_ext(&b, &[b.unit(pu)], caps)?;
            let a = analyze(&x, caps)?;
            let tag = format!("U = Z/{u}, V = Z/{v}");
            t.check(x.in_u(), || format!("{tag}: not in scope"));
            let expected = hom_count(&gu, &gu) * hom_count(&gv, &gv) * hom_count(&gv, &gu);
            t.check(a.len() as u128 == expected, || format!("{tag}: {} endomorphisms, expected {expected}", a.len()));
            let (p_u, p_v) = (crate::group::factorize(u)[0].0, crate::group::factorize(v)[0].0);
            for (i, f) in a.endos().iter().enumerate() {
                // f11 is the U-coordinate of f(U), f22 the V-coordinate of f(V)
                let f11 = f.entry(pu, pu);
                let f22 = f.entry(pv, pv);
                t.check(f.entry(pv, pu) == 0, || format!("{tag}: map does not keep U"));
                for l in ClassLabel::ALL {
                    let expect = if l.is_lower() { f11 % p_u == 0 } else { f22 % p_v == 0 };
                    t.check(a.contains(l, i) == expect, || format!("{tag}: {l} membership of {f:?}"));
                }
            }
            let sum = module_type(&gu, caps)? + module_type(&gv, caps)?;
            t.check(a.type_count() == sum, || format!("{tag}: type {} against {sum}", a.type_count()));
        }
        t.note(format!("{} choices of (U, V)", CHOICES.len()));
        Ok(())
    })
}

fn decide_all(left: &[ExtObject], right: &[ExtObject], caps: &Caps) -> Result<Vec<DecisionReport>> {
    Ok(vec![
        crate::decide::decide_parziale(left, right, caps)?,
        crate::decide::decide_completo(left, right, caps)?,
        crate::decide::decide_completo_prime(left, right, caps)?,
        brute_force_iso(left, right, caps)?,
    ])
}

/// Two lists of pairwise non-isomorphic objects over Z/6 with isomorphic
/// sums.
pub fn exchange_family(caps: &Caps) -> CriterionLine {
    run(5, "exchange family over Z/6", |t| {
        let left = vec![obj(&[2, 3], &[&[1, 0]], caps)?, obj(&[2, 3], &[&[0, 1]], caps)?];
        let right = vec![obj(&[2, 2], &[&[1, 0]], caps)?, obj(&[3, 3], &[&[1, 0]], caps)?];
        let all: Vec<&ExtObject> = left.iter().chain(&right).collect();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                t.check(!iso_via_classes(all[i], all[j], caps)?, || format!("summands {i}, {j} share all classes"));
                t.check(find_iso(all[i], all[j], caps)?.iso.is_none(), || format!("summands {i}, {j} are isomorphic"));
            }
        }
        for rep in decide_all(&left, &right, caps)? {
            t.check(rep.verdict, || format!("{} says not isomorphic", rep.method.name()));
            let problems = witness_problems(&rep, &left, &right, caps)?;
            t.check(problems.is_empty(), || format!("{}: {}", rep.method.name(), problems.join(", ")));
            if rep.method == crate::decide::Method::Completo {
                for l in ClassLabel::ALL {
                    let want: &[(usize, usize)] = if l.is_lower() { &[(0, 0), (1, 1)] } else { &[(0, 1), (1, 0)] };
                    t.check(rep.witnesses.get(&l).map(Vec::as_slice) == Some(want), || format!("{l}: bijection"));
                }
            }
        }
        let run = oracle_iso(&left, &right, caps)?;
        let Some(alpha) = run.search.iso.as_ref() else {
            t.fail("oracle found no isomorphism".into());
            return Ok(());
        };
        for l in ClassLabel::ALL {
            let (d, xs, ys) = iso_digraph(&run.left, &run.right, alpha, l)?;
            let hall = hall_condition(&d, HallMode::Matching, caps)?;
            t.check(hall.holds, || format!("{l}: digraph of the isomorphism fails the condition"));
            match ks_relabel(&d)? {
                KsOutcome::Pairing(pairs) => {
                    t.check(validate_pairing(&d, &pairs), || format!("{l}: pairing not valid"));
                    for (x, y) in pairs {
                        let (h, k) = (xs[x], ys[y - d.nx()]);
                        t.check(same_class(&left[h], &right[k], l, caps)?.is_some(), || {
                            format!("{l}: pairing joins {h} and {k} across classes")
                        });
                    }
                }
                KsOutcome::HallFailure(_) => t.fail(format!("{l}: no pairing")),
            }
        }
        t.note(format!("isomorphism found after {} nodes", run.search.nodes));
        Ok(())
    })
}

fn reach(d: &BipartiteDigraph, from: usize) -> Vec<bool> {
    let mut seen = vec![false; d.num_vertices()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        for &w in d.successors(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Every bipartite digraph with both sides of size `n`, for `n` up to the
/// bound.
pub fn digraph_exhaustion(caps: &Caps) -> CriterionLine {
    run(6, "digraph exhaustion", |t| {
        let start = Instant::now();
        let mut total = 0usize;
        let mut holding = 0usize;
        for n in 0..=DIGRAPH_MAX_SIDE {
            let slots: Vec<(usize, usize)> = (0..n)
                .flat_map(|x| (0..n).flat_map(move |y| [(x, n + y), (n + y, x)]))
                .collect();
            let count = 1usize << slots.len();
            let rows = par::map_range(count, |mask| -> Result<(Tally, bool)> {
                let mut t = Tally::default();
                let edges: Vec<(usize, usize)> =
                    (0..slots.len()).filter(|&k| mask >> k & 1 == 1).map(|k| slots[k]).collect();
                let d = BipartiteDigraph::from_ids(n, n, &edges)?;
                let brute = hall_condition(&d, HallMode::BruteForce, caps)?;
                let fast = hall_condition(&d, HallMode::Matching, caps)?;
                t.check(brute.holds == fast.holds, || format!("modes disagree on {edges:?}"));
                for w in [&brute.witness, &fast.witness].into_iter().flatten() {
                    t.check(is_violating_set(&d, w), || format!("bad witness {w:?} on {edges:?}"));
                }
                match ks_relabel(&d)? {
                    KsOutcome::Pairing(pairs) => {
                        t.check(brute.holds, || format!("pairing without the condition on {edges:?}"));
                        t.check(validate_pairing(&d, &pairs), || format!("invalid pairing on {edges:?}"));
                        let ok = pairs.iter().all(|&(x, y)| reach(&d, x)[y] && reach(&d, y)[x]);
                        t.check(ok, || format!("pair not mutually reachable on {edges:?}"));
                    }
                    KsOutcome::HallFailure(w) => {
                        t.check(!brute.holds, || format!("no pairing although the condition holds on {edges:?}"));
                        t.check(is_violating_set(&d, &w), || format!("bad witness {w:?} on {edges:?}"));
                    }
                }
                Ok((t, brute.holds))
            });
            for r in rows {
                let (row, holds) = r?;
                t.merge(row);
                holding += holds as usize;
            }
            total += count;
        }
        let elapsed = start.elapsed();
        if elapsed > DIGRAPH_TIME_LIMIT {
            t.fail(format!("took {:.0} s, limit {} s", elapsed.as_secs_f64(), DIGRAPH_TIME_LIMIT.as_secs()));
        }
        t.note(format!("{total} digraphs, {holding} satisfy the condition"));
        Ok(())
    })
}

/// The lemmas relating the four classes, the ideals and splitting, each on
/// every applicable pair of corpus objects.
pub fn class_lemmas(caps: &Caps) -> CriterionLine {
    run(7, "class lemmas", |t| {
        let spec = CorpusSpec::new(CORPUS_MAX_ORDER, &CORPUS_PRIMES);
        let objects: Vec<ExtObject> = subgroup_corpus(&spec, caps)?
            .into_iter()
            .map(|e| e.object)
            .filter(ExtObject::in_u)
            .collect();
        let rings = par::try_map(&objects, |x| analyze(x, caps))?;
        let table = ClassTable::build(&objects, caps)?;
        let n = objects.len();
        let mut parts: Vec<(&str, Tally)> = Vec::new();

        let mut containment = Tally::default();
        let mut class_transfer = Tally::default();
        let mut poset = Tally::default();
        let mut maximality = Tally::default();
        let mut equality = Tally::default();
        for i in 0..n {
            for j in 0..n {
                let (r, s) = (&rings[i], &rings[j]);
                let all_same = ClassLabel::ALL.iter().all(|&l| table.same(i, j, l));
                for ab in ClassLabel::ALL {
                    if all_same {
                        for cd in ClassLabel::ALL {
                            poset.check(r.ideal_contained(cd, ab) == s.ideal_contained(cd, ab), || {
                                format!("{i}, {j}: {cd} <= {ab} not preserved")
                            });
                        }
                    }
                    if !table.same(i, j, ab) {
                        continue;
                    }
                    maximality.check(r.is_maximal(ab) == s.is_maximal(ab), || format!("{i}, {j}: {ab} maximality"));
                    for cd in ClassLabel::ALL {
                        containment.check(r.ideal_contained(cd, ab) == s.ideal_contained(cd, ab), || {
                            format!("{i}, {j}: {cd} in {ab}")
                        });
                        if r.ideal_contained(cd, ab) {
                            class_transfer.check(table.same(i, j, cd), || format!("{i}, {j}: {cd} from {ab}"));
                        }
                        if r.is_maximal(ab) {
                            equality.check(r.ideals_equal(cd, ab) == s.ideals_equal(cd, ab), || {
                                format!("{i}, {j}: {cd} = {ab}")
                            });
                        }
                    }
                }
            }
        }

        let iso_rows = par::map_range(n, |i| -> Result<Tally> {
            let mut t = Tally::default();
            for j in 0..n {
                let all_same = ClassLabel::ALL.iter().all(|&l| table.same(i, j, l));
                let iso = find_iso(&objects[i], &objects[j], caps)?.iso.is_some();
                t.check(all_same == iso, || format!("{i}, {j}: classes {all_same}, isomorphic {iso}"));
            }
            Ok(t)
        });
        let mut propiso = Tally::default();
        for r in iso_rows {
            propiso.merge(r?);
        }

        let associated = associated_checks(&rings, &table, caps)?;

        let (split_criteria, split_classes) = split_checks(caps)?;

        parts.push(("containment", containment));
        parts.push(("class transfer", class_transfer));
        parts.push(("poset map", poset));
        parts.push(("iso iff classes", propiso));
        parts.push(("associated ideal", associated));
        parts.push(("maximality", maximality));
        parts.push(("ideal equality", equality));
        parts.push(("split criteria", split_criteria));
        parts.push(("split classes", split_classes));
        let mut counts = Vec::new();
        for (name, part) in parts {
            if part.checks < LEMMA_MIN_CHECKS {
                t.fail(format!("{name}: only {} checks", part.checks));
            }
            counts.push(format!("{name} {}", part.checks));
            t.merge(part);
        }
        t.note(format!("{n} objects; {}", counts.join(", ")));
        Ok(())
    })
}

/// The ideal of the category associated to a maximal `I_{B,a,b}`, evaluated
/// on `B'`: all of `E_{B'}` when the classes differ, `I_{B',a,b}` when they
/// agree, and never smaller than `I_{B',a,b}`.
fn associated_checks(rings: &[EndoRingAnalysis], table: &ClassTable, caps: &Caps) -> Result<Tally> {
    let small: Vec<usize> = (0..rings.len())
        .filter(|&i| rings[i].object().group().order() <= ASSOCIATED_MAX_ORDER)
        .collect();
    let mut same = Vec::new();
    let mut differ = Vec::new();
    for &i in &small {
        for ab in rings[i].maximal_labels() {
            for &j in &small {
                if table.same(i, j, ab) {
                    same.push((i, ab, j));
                } else {
                    differ.push((i, ab, j));
                }
            }
        }
    }
    differ.shuffle(&mut ChaCha8Rng::seed_from_u64(SEED));
    differ.truncate(ASSOCIATED_SAMPLE);
    same.extend(differ);
    let rows = par::try_map(&same, |&(i, ab, j)| -> Result<Tally> {
        let mut t = Tally::default();
        let ideal = associated_ideal_on(&rings[i], ab, &rings[j], caps)?;
        let mine: Vec<bool> = (0..rings[j].len()).map(|k| rings[j].contains(ab, k)).collect();
        t.check(mine.iter().zip(&ideal).all(|(&m, &a)| !m || a), || format!("{i} -> {j}, {ab}: not contained"));
        if table.same(i, j, ab) {
            t.check(ideal == mine, || format!("{i} -> {j}, {ab}: classes agree but ideals differ"));
        } else {
            t.check(ideal.iter().all(|&a| a), || format!("{i} -> {j}, {ab}: classes differ but ideal is proper"));
        }
        Ok(t)
    })?;
    let mut t = Tally::default();
    for r in rows {
        t.merge(r);
    }
    Ok(t)
}

/// Splitting against the classes of degenerate objects: an in-scope object
/// splits exactly when its lower classes are those of some `A' = B'`, and
/// exactly when its upper classes are those of some `A' = 0`. A split object
/// has the classes of its two pieces.
fn split_checks(caps: &Caps) -> Result<(Tally, Tally)> {
    let spec = CorpusSpec::new(SPLIT_MAX_ORDER, &CORPUS_PRIMES);
    let objects: Vec<ExtObject> = subgroup_corpus(&spec, caps)?
        .into_iter()
        .map(|e| e.object)
        .filter(ExtObject::in_u)
        .collect();
    let mut cyclic = Vec::new();
    for p in CORPUS_PRIMES {
        let mut q = p;
        while q <= SPLIT_MAX_ORDER {
            cyclic.push(Group::cyclic(q)?);
            q *= p;
        }
    }
    let full: Vec<ExtObject> = cyclic.iter().map(|g| make_ext(g, &[g.unit(0)], caps)).collect::<Result<_>>()?;
    let bare: Vec<ExtObject> = cyclic.iter().map(|g| make_ext(g, &[], caps)).collect::<Result<_>>()?;
    let rows = par::try_map(&objects, |x| -> Result<(Tally, Tally)> {
        let mut criteria = Tally::default();
        let mut classes = Tally::default();
        let split = is_split(x, caps)?;
        let matches = |others: &[ExtObject], labels: [ClassLabel; 2]| -> Result<bool> {
            for o in others {
                if same_class(x, o, labels[0], caps)?.is_some() && same_class(x, o, labels[1], caps)?.is_some() {
                    return Ok(true);
                }
            }
            Ok(false)
        };
        let lower = matches(&full, [ClassLabel::ML, ClassLabel::EL])?;
        let upper = matches(&bare, [ClassLabel::MU, ClassLabel::EU])?;
        criteria.check(split == lower, || format!("{x}: split {split}, lower match {lower}"));
        criteria.check(split == upper, || format!("{x}: split {split}, upper match {upper}"));
        if let Some((a, c)) = split_parts(x, caps)? {
            for l in ClassLabel::ALL {
                let piece = if l.is_lower() { &a } else { &c };
                classes.check(same_class(x, piece, l, caps)?.is_some(), || format!("{x}: {l} differs from its piece"));
            }
        }
        Ok((criteria, classes))
    })?;
    let mut criteria = Tally::default();
    let mut classes = Tally::default();
    for (a, b) in rows {
        criteria.merge(a);
        classes.merge(b);
    }
    Ok((criteria, classes))
}
