//! The line-oriented object file format. See `docs/FORMAT.md` for the
//! grammar.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::caps::Caps;
use crate::digraph::BipartiteDigraph;
use crate::error::{Error, Result};
use crate::ext::{make_ext, ExtObject};
use crate::group::{Element, Group};

#[derive(Clone, Debug)]
pub struct ObjectDecl {
    pub name: String,
    /// Cyclic orders as written.
    pub orders: Vec<u64>,
    /// Generators of `A`, coordinates against `orders`.
    pub gens: Vec<Vec<u64>>,
    pub object: ExtObject,
    pub line: usize,
}

#[derive(Clone, Debug)]
pub struct ListDecl {
    pub name: String,
    pub members: Vec<String>,
    pub line: usize,
}

#[derive(Clone, Debug)]
pub struct DigraphDecl {
    pub name: String,
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub graph: BipartiteDigraph,
    pub line: usize,
}

#[derive(Clone, Debug, Default)]
pub struct SpecFile {
    pub objects: Vec<ObjectDecl>,
    pub lists: Vec<ListDecl>,
    pub digraphs: Vec<DigraphDecl>,
}

#[derive(Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let body = match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (k, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok {
                    text: &body[s..k],
                    col: body[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(k);
        }
    }
    if let Some(s) = start {
        out.push(Tok {
            text: &body[s..],
            col: body[..s].chars().count() + 1,
        });
    }
    out
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '\'' | '-'))
}

struct Cursor<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn err_at(&self, col: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            col,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<Tok<'a>> {
        let t = self.peek();
        self.pos += t.is_some() as usize;
        t
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        match self.next() {
            Some(t) if t.text == kw => Ok(()),
            Some(t) => Err(self.err_at(t.col, format!("expected `{kw}`, found `{}`", t.text))),
            None => Err(self.err_at(self.end_col, format!("expected `{kw}`"))),
        }
    }

    fn name(&mut self) -> Result<Tok<'a>> {
        match self.next() {
            Some(t) if is_name(t.text) => Ok(t),
            Some(t) => Err(self.err_at(t.col, format!("`{}` is not a valid name", t.text))),
            None => Err(self.err_at(self.end_col, "expected a name")),
        }
    }

    /// Tokens up to (not including) the next keyword in `stop`.
    fn until(&mut self, stop: &[&str]) -> Vec<Tok<'a>> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if stop.contains(&t.text) {
                break;
            }
            out.push(t);
            self.pos += 1;
        }
        out
    }
}

fn parse_int(c: &Cursor<'_>, text: &str, col: usize) -> Result<u64> {
    text.parse::<u64>()
        .map_err(|_| c.err_at(col, format!("`{text}` is not a nonnegative integer")))
}

impl SpecFile {
    pub fn parse(text: &str, caps: &Caps) -> Result<SpecFile> {
        let mut file = SpecFile::default();
        let mut object_names: HashMap<String, usize> = HashMap::new();
        let mut list_names: HashMap<String, usize> = HashMap::new();
        let mut digraph_names: HashMap<String, usize> = HashMap::new();
        for (k, raw) in text.lines().enumerate() {
            let mut c = Cursor {
                toks: tokens(raw),
                pos: 0,
                line: k + 1,
                end_col: raw.chars().count() + 1,
            };
            let Some(head) = c.next() else { continue };
            match head.text {
                "object" => {
                    let name = c.name()?;
                    if object_names.contains_key(name.text) {
                        return Err(c.err_at(name.col, format!("object `{}` declared twice", name.text)));
                    }
                    c.expect_keyword("orders")?;
                    let mut orders = Vec::new();
                    for t in c.until(&["gens"]) {
                        let q = parse_int(&c, t.text, t.col)?;
                        if q == 0 {
                            return Err(c.err_at(t.col, "cyclic order must be positive"));
                        }
                        orders.push(q);
                    }
                    let map = Group::from_orders_with_map(&orders).map_err(|e| c.err_at(head.col, e.to_string()))?;
                    let mut gens = Vec::new();
                    let mut elems: Vec<Element> = Vec::new();
                    if c.peek().is_some() {
                        c.expect_keyword("gens")?;
                        for t in c.until(&[]) {
                            let coords = t
                                .text
                                .split(',')
                                .map(|s| parse_int(&c, s, t.col))
                                .collect::<Result<Vec<u64>>>()?;
                            let e = map.map(&coords).map_err(|e| c.err_at(t.col, e.to_string()))?;
                            gens.push(coords);
                            elems.push(e);
                        }
                    }
                    let object = make_ext(map.group(), &elems, caps).map_err(|e| match e {
                        Error::ScopeViolation(m) => {
                            Error::ScopeViolation(format!("line {}, column {}: {m}", c.line, name.col))
                        }
                        Error::CapExceeded { .. } => e,
                        other => c.err_at(name.col, other.to_string()),
                    })?;
                    object_names.insert(name.text.to_string(), file.objects.len());
                    file.objects.push(ObjectDecl {
                        name: name.text.to_string(),
                        orders,
                        gens,
                        object,
                        line: c.line,
                    });
                }
                "list" => {
                    let name = c.name()?;
                    if list_names.contains_key(name.text) {
                        return Err(c.err_at(name.col, format!("list `{}` declared twice", name.text)));
                    }
                    let mut members = Vec::new();
                    while c.peek().is_some() {
                        let m = c.name()?;
                        if !object_names.contains_key(m.text) {
                            return Err(c.err_at(m.col, format!("unknown object `{}`", m.text)));
                        }
                        members.push(m.text.to_string());
                    }
                    list_names.insert(name.text.to_string(), file.lists.len());
                    file.lists.push(ListDecl {
                        name: name.text.to_string(),
                        members,
                        line: c.line,
                    });
                }
                "digraph" => {
                    let name = c.name()?;
                    if digraph_names.contains_key(name.text) {
                        return Err(c.err_at(name.col, format!("digraph `{}` declared twice", name.text)));
                    }
                    c.expect_keyword("x")?;
                    let mut side: HashMap<&str, bool> = HashMap::new();
                    let mut x = Vec::new();
                    let mut y = Vec::new();
                    for (is_x, kw_next) in [(true, "y"), (false, "edges")] {
                        for t in c.until(&[kw_next]) {
                            if !is_name(t.text) {
                                return Err(c.err_at(t.col, format!("`{}` is not a valid name", t.text)));
                            }
                            if side.insert(t.text, is_x).is_some() {
                                return Err(c.err_at(t.col, format!("vertex `{}` listed twice", t.text)));
                            }
                            if is_x { x.push(t.text.to_string()) } else { y.push(t.text.to_string()) }
                        }
                        if is_x {
                            c.expect_keyword("y")?;
                        }
                    }
                    let mut edges = Vec::new();
                    if c.peek().is_some() {
                        c.expect_keyword("edges")?;
                        for t in c.until(&[]) {
                            let Some((a, b)) = t.text.split_once('>') else {
                                return Err(c.err_at(t.col, format!("edge `{}` should look like `a>b`", t.text)));
                            };
                            for v in [a, b] {
                                if !side.contains_key(v) {
                                    return Err(c.err_at(t.col, format!("unknown vertex `{v}`")));
                                }
                            }
                            if side[a] == side[b] {
                                return Err(c.err_at(t.col, format!("edge `{}` joins two vertices on one side", t.text)));
                            }
                            edges.push((a.to_string(), b.to_string()));
                        }
                    }
                    let graph = BipartiteDigraph::new(&x, &y, &edges).map_err(|e| c.err_at(head.col, e.to_string()))?;
                    digraph_names.insert(name.text.to_string(), file.digraphs.len());
                    file.digraphs.push(DigraphDecl {
                        name: name.text.to_string(),
                        x,
                        y,
                        edges,
                        graph,
                        line: c.line,
                    });
                }
                other => {
                    return Err(c.err_at(head.col, format!("unknown statement `{other}`")));
                }
            }
            if let Some(t) = c.peek() {
                return Err(c.err_at(t.col, format!("unexpected `{}`", t.text)));
            }
        }
        Ok(file)
    }

    pub fn object(&self, name: &str) -> Result<&ObjectDecl> {
        self.objects
            .iter()
            .find(|o| o.name == name)
            .ok_or_else(|| Error::InvalidInput(format!("no object named `{name}`")))
    }

    pub fn list(&self, name: &str) -> Result<Vec<ExtObject>> {
        let l = self
            .lists
            .iter()
            .find(|l| l.name == name)
            .ok_or_else(|| Error::InvalidInput(format!("no list named `{name}`")))?;
        l.members.iter().map(|m| Ok(self.object(m)?.object.clone())).collect()
    }

    pub fn digraph(&self, name: &str) -> Result<&DigraphDecl> {
        self.digraphs
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::InvalidInput(format!("no digraph named `{name}`")))
    }

    /// Writes the declarations back out in the same format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for o in &self.objects {
            let _ = write!(s, "object {} orders", o.name);
            for q in &o.orders {
                let _ = write!(s, " {q}");
            }
            if !o.gens.is_empty() {
                s.push_str(" gens");
                for g in &o.gens {
                    let t: Vec<String> = g.iter().map(u64::to_string).collect();
                    let _ = write!(s, " {}", t.join(","));
                }
            }
            s.push('\n');
        }
        for l in &self.lists {
            let _ = writeln!(s, "list {}{}", l.name, l.members.iter().map(|m| format!(" {m}")).collect::<String>());
        }
        for d in &self.digraphs {
            let _ = write!(s, "digraph {} x", d.name);
            for v in &d.x {
                let _ = write!(s, " {v}");
            }
            s.push_str(" y");
            for v in &d.y {
                let _ = write!(s, " {v}");
            }
            if !d.edges.is_empty() {
                s.push_str(" edges");
                for (a, b) in &d.edges {
                    let _ = write!(s, " {a}>{b}");
                }
            }
            s.push('\n');
        }
        s
    }
}

/// One `object` line for an object given by canonical orders and generators.
pub fn object_line(name: &str, b: &Group, gens: &[Element]) -> String {
    let mut s = format!("object {name} orders");
    for q in b.factors() {
        let _ = write!(s, " {q}");
    }
    if !gens.is_empty() {
        s.push_str(" gens");
        for g in gens {
            let t: Vec<String> = g.coords().iter().map(u64::to_string).collect();
            let _ = write!(s, " {}", t.join(","));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<SpecFile> {
        SpecFile::parse(s, &Caps::default())
    }

    #[test]
    fn basic_file() {
        let f = parse(
            "# a comment\n\
             object x orders 4 gens 2\n\
             object y orders 6 gens 3   # Z/2 inside Z/6\n\
             list l x y\n\
             list empty\n\
             digraph d x x1 x2 y y1 edges x1>y1 y1>x2\n",
        )
        .unwrap();
        assert_eq!(f.objects.len(), 2);
        assert!(f.object("x").unwrap().object.in_u());
        let y = &f.object("y").unwrap().object;
        assert_eq!(y.sub().order(), 2);
        assert_eq!(f.list("l").unwrap().len(), 2);
        assert!(f.list("empty").unwrap().is_empty());
        assert_eq!(f.digraph("d").unwrap().graph.edges().len(), 2);
        let again = parse(&f.to_text()).unwrap();
        assert_eq!(again.to_text(), f.to_text());
    }

    #[test]
    fn empty_file() {
        let f = parse("").unwrap();
        assert!(f.objects.is_empty());
    }

    #[test]
    fn zero_and_degenerate() {
        let f = parse("object z orders\nobject top orders 2 gens 1\nobject bot orders 3\n").unwrap();
        assert!(f.object("z").unwrap().object.is_zero());
        assert!(f.object("top").unwrap().object.flags().in_u_upper0);
        assert!(f.object("bot").unwrap().object.flags().in_u_lower0);
    }

    #[test]
    fn errors_have_locations() {
        match parse("object x orders 4 gens 5\n") {
            Err(Error::Parse { line: 1, col: 24, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("\n  list l nothere\n") {
            Err(Error::Parse { line: 2, col: 10, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("object x orders two\n") {
            Err(Error::Parse { line: 1, col: 17, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("digraph d x a b y c edges a>b\n") {
            Err(Error::Parse { line: 1, col: 27, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("frobnicate\n") {
            Err(Error::Parse { line: 1, col: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scope_violation_located() {
        // A = Z/2 + Z/2 is not uniserial
        match parse("object ok orders 4 gens 2\nobject worse orders 4 2\n") {
            Err(Error::ScopeViolation(m)) => assert!(m.contains("line 2"), "{m}"),
            other => panic!("{other:?}"),
        }
        match parse("object bad orders 4 2 gens 2,0 0,1\n") {
            Err(Error::ScopeViolation(m)) => assert!(m.starts_with("line 1, column 8"), "{m}"),
            other => panic!("{other:?}"),
        }
    }
}
