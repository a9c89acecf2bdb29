//! Structured results of the command-line operations, their text rendering
//! and re-validation against the input file.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::classes::{class_profile, iso_via_classes, predicate, ClassLabel};
use crate::decide::{
    brute_force_iso, decide_completo, decide_completo_prime, decide_parziale, witness_problems, DecisionReport,
    Method,
};
use crate::digraph::{hall_condition, is_violating_set, ks_relabel, validate_pairing, HallMode, HallResult, KsOutcome};
use crate::endo::{analyze, type_bound_holds, EndoSummary};
use crate::error::{Error, Result};
use crate::ext::{ExtMorphism, ExtObject};
use crate::format::SpecFile;
use crate::group::{Element, Hom};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectInfo {
    pub name: String,
    pub b: Vec<u64>,
    pub a: Vec<u64>,
    pub c: Vec<u64>,
    pub in_u: bool,
    pub in_u_lower0: bool,
    pub in_u_upper0: bool,
}

impl ObjectInfo {
    pub fn of(name: &str, x: &ExtObject) -> ObjectInfo {
        let f = x.flags();
        ObjectInfo {
            name: name.to_string(),
            b: x.group().factors().to_vec(),
            a: x.a_type().factors().to_vec(),
            c: x.c_type().factors().to_vec(),
            in_u: f.in_u,
            in_u_lower0: f.in_u_lower0,
            in_u_upper0: f.in_u_upper0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub objects: Vec<ObjectInfo>,
    pub lists: BTreeMap<String, Vec<String>>,
    pub digraphs: Vec<String>,
}

/// Generator images of a map between the `B` terms, in canonical coordinates.
pub type ImageTable = Vec<Vec<u64>>;

fn table(f: &Hom) -> ImageTable {
    f.images().into_iter().map(Element::into_coords).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub label: ClassLabel,
    pub same: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forward: Option<ImageTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backward: Option<ImageTable>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsReport {
    pub x: String,
    pub y: String,
    pub classes: Vec<ClassEntry>,
    /// Defined when both objects have nonzero uniserial end terms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isomorphic: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndoReport {
    pub object: String,
    pub summary: EndoSummary,
    pub crt: bool,
    pub type_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideReport {
    pub left: String,
    pub right: String,
    pub results: Vec<DecisionReport>,
    /// With several methods, whether all verdicts agree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigraphReport {
    pub digraph: String,
    pub vertices: Vec<String>,
    /// Skipped when the graph is over the brute-force cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hall_brute_force: Option<HallResult>,
    pub hall_matching: HallResult,
    pub relabel: KsOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionLine {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub checks: u64,
    pub detail: String,
    /// Wall time, shown in the text rendering only.
    #[serde(skip)]
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Check(CheckReport),
    Invariants(InvariantsReport),
    Endoring(EndoReport),
    Decide(DecideReport),
    Digraph(DigraphReport),
    Selftest { criteria: Vec<CriterionLine> },
}

pub fn check(file: &SpecFile) -> Report {
    Report::Check(CheckReport {
        objects: file.objects.iter().map(|o| ObjectInfo::of(&o.name, &o.object)).collect(),
        lists: file.lists.iter().map(|l| (l.name.clone(), l.members.clone())).collect(),
        digraphs: file.digraphs.iter().map(|d| d.name.clone()).collect(),
    })
}

pub fn invariants(file: &SpecFile, x: &str, y: &str, caps: &Caps) -> Result<Report> {
    let ox = &file.object(x)?.object;
    let oy = &file.object(y)?.object;
    let profile = class_profile(ox, oy, caps)?;
    let classes = ClassLabel::ALL
        .iter()
        .zip(profile)
        .map(|(&label, w)| ClassEntry {
            label,
            same: w.is_some(),
            forward: w.as_ref().map(|w| table(w.forward.map())),
            backward: w.as_ref().map(|w| table(w.backward.map())),
        })
        .collect();
    let isomorphic = if ox.in_u() && oy.in_u() {
        Some(iso_via_classes(ox, oy, caps)?)
    } else {
        None
    };
    Ok(Report::Invariants(InvariantsReport {
        x: x.to_string(),
        y: y.to_string(),
        classes,
        isomorphic,
    }))
}

pub fn endoring(file: &SpecFile, name: &str, caps: &Caps) -> Result<Report> {
    let x = &file.object(name)?.object;
    let a = analyze(x, caps)?;
    let crt = a.verify_crt();
    let type_bound = type_bound_holds(&a, caps)?;
    Ok(Report::Endoring(EndoReport {
        object: name.to_string(),
        summary: a.summary(),
        crt,
        type_bound,
    }))
}

pub fn run_method(method: Method, left: &[ExtObject], right: &[ExtObject], caps: &Caps) -> Result<DecisionReport> {
    match method {
        Method::Parziale => decide_parziale(left, right, caps),
        Method::Completo => decide_completo(left, right, caps),
        Method::CompletoPrime => decide_completo_prime(left, right, caps),
        Method::BruteForce => brute_force_iso(left, right, caps),
    }
}

/// The methods that apply to a pair of lists, in a fixed order.
pub fn applicable_methods(left: &[ExtObject], right: &[ExtObject]) -> Vec<Method> {
    let all: Vec<&ExtObject> = left.iter().chain(right).collect();
    let mut m = Vec::new();
    if all.iter().all(|o| o.in_u()) {
        m.push(Method::Parziale);
        m.push(Method::Completo);
    }
    if all.iter().all(|o| !o.is_zero() && o.has_uniserial_ends()) {
        m.push(Method::CompletoPrime);
    }
    m.push(Method::BruteForce);
    m
}

pub fn decide(file: &SpecFile, left: &str, right: &str, methods: &[Method], caps: &Caps) -> Result<Report> {
    let l = file.list(left)?;
    let r = file.list(right)?;
    let results = methods
        .iter()
        .map(|&m| run_method(m, &l, &r, caps))
        .collect::<Result<Vec<_>>>()?;
    let agree = (results.len() > 1).then(|| results.iter().all(|x| x.verdict == results[0].verdict));
    Ok(Report::Decide(DecideReport {
        left: left.to_string(),
        right: right.to_string(),
        results,
        agree,
    }))
}

pub fn digraph(file: &SpecFile, name: &str, caps: &Caps) -> Result<Report> {
    let d = &file.digraph(name)?.graph;
    let brute = match hall_condition(d, HallMode::BruteForce, caps) {
        Ok(h) => Some(h),
        Err(Error::CapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let matching = hall_condition(d, HallMode::Matching, caps)?;
    if let Some(b) = &brute {
        if b.holds != matching.holds {
            return Err(Error::TheoremViolation("brute-force and matching checks disagree".into()));
        }
    }
    Ok(Report::Digraph(DigraphReport {
        digraph: name.to_string(),
        vertices: (0..d.num_vertices()).map(|v| d.name(v).to_string()).collect(),
        hall_brute_force: brute,
        hall_matching: matching,
        relabel: ks_relabel(d)?,
    }))
}

/// Re-checks a loaded report against the file it was made from. Returns the
/// problems found; an empty list means everything re-validated.
pub fn revalidate(file: &SpecFile, report: &Report, caps: &Caps) -> Result<Vec<String>> {
    let mut problems = Vec::new();
    match report {
        Report::Check(c) => {
            if Report::Check(c.clone()) != check(file) {
                problems.push("object summary differs from the file".into());
            }
        }
        Report::Invariants(inv) => {
            let ox = &file.object(&inv.x)?.object;
            let oy = &file.object(&inv.y)?.object;
            for e in &inv.classes {
                let fresh = crate::classes::same_class(ox, oy, e.label, caps)?.is_some();
                if fresh != e.same {
                    problems.push(format!("{}: class equality differs", e.label));
                }
                for (tab, src, dst, dir) in [(&e.forward, ox, oy, "forward"), (&e.backward, oy, ox, "backward")] {
                    if let Some(t) = tab {
                        if !map_satisfies(t, src, dst, e.label) {
                            problems.push(format!("{}: {dir} map does not re-check", e.label));
                        }
                    }
                }
            }
        }
        Report::Endoring(e) => {
            let fresh = endoring(file, &e.object, caps)?;
            if &fresh != report {
                problems.push("endomorphism ring summary differs".into());
            }
        }
        Report::Decide(d) => {
            let l = file.list(&d.left)?;
            let r = file.list(&d.right)?;
            for res in &d.results {
                problems.extend(witness_problems(res, &l, &r, caps)?.into_iter().map(|p| format!("{}: {p}", res.method.name())));
                let fresh = run_method(res.method, &l, &r, caps)?;
                if fresh.verdict != res.verdict {
                    problems.push(format!("{}: verdict differs", res.method.name()));
                }
            }
        }
        Report::Digraph(g) => {
            let d = &file.digraph(&g.digraph)?.graph;
            for h in g.hall_brute_force.iter().chain([&g.hall_matching]) {
                match &h.witness {
                    Some(t) if !is_violating_set(d, t) => problems.push("Hall witness does not violate".into()),
                    None if h.holds != hall_condition(d, HallMode::Matching, caps)?.holds => {
                        problems.push("Hall verdict differs".into())
                    }
                    _ => {}
                }
            }
            match &g.relabel {
                KsOutcome::Pairing(p) if !validate_pairing(d, p) => problems.push("pairing does not validate".into()),
                KsOutcome::HallFailure(t) if !is_violating_set(d, t) => {
                    problems.push("relabel witness does not violate".into())
                }
                _ => {}
            }
        }
        Report::Selftest { .. } => {}
    }
    Ok(problems)
}

fn map_satisfies(t: &ImageTable, src: &ExtObject, dst: &ExtObject, label: ClassLabel) -> bool {
    let g = src.group();
    let h = dst.group();
    if t.len() != g.rank() {
        return false;
    }
    let Ok(imgs) = t.iter().map(|c| h.element(c)).collect::<Result<Vec<_>>>() else {
        return false;
    };
    Hom::from_images(g.clone(), h.clone(), &imgs)
        .and_then(|f| ExtMorphism::new(src, dst, f))
        .is_ok_and(|m| predicate(&m, label))
}

fn fmt_group(f: &[u64]) -> String {
    if f.is_empty() {
        "0".into()
    } else {
        f.iter().map(|q| format!("Z/{q}")).collect::<Vec<_>>().join(" + ")
    }
}

fn fmt_pairs(p: &[(usize, usize)]) -> String {
    p.iter().map(|(a, b)| format!("{a}->{b}")).collect::<Vec<_>>().join(" ")
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Report> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("report: {e}")))
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Check(c) => {
                let _ = writeln!(s, "{} objects", c.objects.len());
                for o in &c.objects {
                    let flag = if o.in_u {
                        "U"
                    } else if o.in_u_lower0 {
                        "U_0"
                    } else if o.in_u_upper0 {
                        "U^0"
                    } else {
                        "-"
                    };
                    let _ = writeln!(
                        s,
                        "  {}: 0 -> {} -> {} -> {} -> 0  [{flag}]",
                        o.name,
                        fmt_group(&o.a),
                        fmt_group(&o.b),
                        fmt_group(&o.c)
                    );
                }
                for (name, m) in &c.lists {
                    let _ = writeln!(s, "  list {name}: {}", m.join(" "));
                }
                for d in &c.digraphs {
                    let _ = writeln!(s, "  digraph {d}");
                }
            }
            Report::Invariants(inv) => {
                let _ = writeln!(s, "{} vs {}", inv.x, inv.y);
                for e in &inv.classes {
                    let _ = writeln!(s, "  {}: {}", e.label, if e.same { "same" } else { "different" });
                }
                if let Some(i) = inv.isomorphic {
                    let _ = writeln!(s, "  isomorphic: {i}");
                }
            }
            Report::Endoring(e) => {
                let m = &e.summary;
                let _ = writeln!(s, "End({}): {} maps, {} automorphisms", e.object, m.endo_count, m.automorphism_count);
                for (l, size) in ClassLabel::ALL.iter().zip(m.ideal_sizes) {
                    let _ = writeln!(
                        s,
                        "  I{l}: {size} elements{}",
                        if m.maximal.contains(l) { ", maximal" } else { "" }
                    );
                }
                let _ = writeln!(s, "  type {}, radical {}, quotients {:?}", m.type_count, m.radical_size, m.division_quotients);
                let _ = writeln!(s, "  crt: {}, type bound: {}", e.crt, e.type_bound);
            }
            Report::Decide(d) => {
                let _ = writeln!(s, "{} vs {}", d.left, d.right);
                for r in &d.results {
                    let _ = writeln!(s, "  {}: {}", r.method.name(), if r.verdict { "isomorphic" } else { "not isomorphic" });
                    for (l, p) in &r.witnesses {
                        let _ = writeln!(s, "    {l}: {}", fmt_pairs(p));
                    }
                    for (l, p) in &r.incompatible {
                        let _ = writeln!(s, "    {l}: {} does not preserve classes", fmt_pairs(p));
                    }
                    if let Some(f) = &r.failure {
                        let _ = writeln!(s, "    first mismatch at {}: left {:?}, right {:?}", f.label, f.left, f.right);
                    }
                    if let Some(n) = &r.note {
                        let _ = writeln!(s, "    {n}");
                    }
                    if let Some(w) = &r.iso {
                        let _ = writeln!(s, "    isomorphism images {:?} ({} nodes)", w.images, w.nodes);
                    }
                }
                if let Some(a) = d.agree {
                    let _ = writeln!(s, "  methods agree: {a}");
                }
            }
            Report::Digraph(g) => {
                let _ = writeln!(s, "digraph {}", g.digraph);
                let names = |t: &[usize]| t.iter().map(|&v| g.vertices[v].clone()).collect::<Vec<_>>().join(" ");
                let hall = |h: &HallResult| match &h.witness {
                    None => "holds".to_string(),
                    Some(t) => format!("fails on {{{}}}", names(t)),
                };
                if let Some(b) = &g.hall_brute_force {
                    let _ = writeln!(s, "  hall (subsets): {}", hall(b));
                }
                let _ = writeln!(s, "  hall (matching): {}", hall(&g.hall_matching));
                match &g.relabel {
                    KsOutcome::Pairing(p) => {
                        let pairs: Vec<String> =
                            p.iter().map(|&(x, y)| format!("{}~{}", g.vertices[x], g.vertices[y])).collect();
                        let _ = writeln!(s, "  pairing: {}", pairs.join(" "));
                    }
                    KsOutcome::HallFailure(t) => {
                        let _ = writeln!(s, "  no pairing, witness {{{}}}", names(t));
                    }
                }
            }
            Report::Selftest { criteria } => {
                for c in criteria {
                    let _ = writeln!(
                        s,
                        "[{}] {}. {} ({} checks, {:.1} s) {}",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.id,
                        c.name,
                        c.checks,
                        c.millis as f64 / 1000.0,
                        c.detail
                    );
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FILE: &str = "object x orders 2 3 gens 1,0\n\
                        object y orders 2 3 gens 0,1\n\
                        object p orders 2 2 gens 1,0\n\
                        object q orders 3 3 gens 1,0\n\
                        list l x y\n\
                        list r p q\n\
                        list lx x\n\
                        list ly y\n\
                        digraph d x a b y c e edges a>c b>c c>a c>b\n";

    fn file() -> SpecFile {
        SpecFile::parse(FILE, &Caps::default()).unwrap()
    }

    #[test]
    fn roundtrip_and_revalidate() {
        let c = Caps::default();
        let f = file();
        let reports = vec![
            check(&f),
            invariants(&f, "x", "y", &c).unwrap(),
            endoring(&f, "x", &c).unwrap(),
            decide(&f, "l", "r", &applicable_methods(&f.list("l").unwrap(), &f.list("r").unwrap()), &c).unwrap(),
            decide(&f, "lx", "ly", &[Method::Parziale, Method::BruteForce], &c).unwrap(),
            digraph(&f, "d", &c).unwrap(),
        ];
        for r in reports {
            let json = r.to_json();
            let back = Report::from_json(&json).unwrap();
            assert_eq!(back, r);
            assert_eq!(back.to_json(), json);
            assert!(revalidate(&f, &back, &c).unwrap().is_empty(), "{json}");
            assert!(!r.render_text().is_empty());
        }
    }

    #[test]
    fn tampered_reports_fail() {
        let c = Caps::default();
        let f = file();
        let Report::Decide(mut d) = decide(&f, "l", "r", &[Method::BruteForce], &c).unwrap() else {
            unreachable!()
        };
        let w = d.results[0].iso.as_mut().unwrap();
        w.images[0] = vec![0, 0, 0, 0];
        assert!(!revalidate(&f, &Report::Decide(d), &c).unwrap().is_empty());
        let Report::Invariants(mut inv) = invariants(&f, "x", "x", &c).unwrap() else {
            unreachable!()
        };
        inv.classes[0].forward = Some(vec![vec![0, 0]]);
        assert!(!revalidate(&f, &Report::Invariants(inv), &c).unwrap().is_empty());
    }

    #[test]
    fn decide_agreement() {
        let c = Caps::default();
        let f = file();
        let Report::Decide(d) = decide(&f, "l", "r", &applicable_methods(&f.list("l").unwrap(), &f.list("r").unwrap()), &c).unwrap() else {
            unreachable!()
        };
        assert_eq!(d.agree, Some(true));
        assert!(d.results.iter().all(|r| r.verdict));
    }
}
