//! Finite abelian groups in primary canonical form, their elements,
//! homomorphisms, subgroups and quotients.
//!
//! A [`Group`] is a direct sum `Z/q_1 + ... + Z/q_k` of cyclic groups of prime
//! power order, sorted by prime ascending and exponent descending. Two groups
//! are isomorphic exactly when their factor lists are equal.
//!
//! Everything here is exhaustive: subgroups cache their full element set and
//! kernels and images are found by evaluating maps on every element. Callers
//! are expected to keep groups within [`Caps`](crate::caps::Caps).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::caps::Caps;
use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `Some((p, e))` when `n = p^e` with `e >= 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    match factorize(n).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}

/// An element, as residues against the factors of its group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(Vec<u64>);

impl Element {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<u64> {
        self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct GroupData {
    factors: Vec<u64>,
    primes: Vec<u64>,
    strides: Vec<usize>,
    order: u64,
}

/// A finite abelian group in canonical primary decomposition.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Group(Arc<GroupData>);

/// Maps coordinates given against user-supplied cyclic orders onto the
/// canonical factors of the resulting group.
#[derive(Clone, Debug)]
pub struct CoordMap {
    input_orders: Vec<u64>,
    /// For each input order, the `(canonical position, modulus)` pairs it splits into.
    targets: Vec<Vec<(usize, u64)>>,
    group: Group,
}

impl CoordMap {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn map(&self, coords: &[u64]) -> Result<Element> {
        if coords.len() != self.input_orders.len() {
            return Err(Error::InvalidInput(format!(
                "tuple has {} coordinates, group has {} cyclic factors",
                coords.len(),
                self.input_orders.len()
            )));
        }
        let mut out = vec![0u64; self.group.rank()];
        for (k, &c) in coords.iter().enumerate() {
            if c >= self.input_orders[k] {
                return Err(Error::InvalidInput(format!(
                    "coordinate {c} out of range for Z/{}",
                    self.input_orders[k]
                )));
            }
            for &(pos, q) in &self.targets[k] {
                out[pos] = c % q;
            }
        }
        Ok(Element(out))
    }
}

impl Group {
    fn from_sorted(factors: Vec<u64>) -> Result<Group> {
        let mut primes = Vec::with_capacity(factors.len());
        let mut strides = Vec::with_capacity(factors.len());
        let mut order: u64 = 1;
        for &q in &factors {
            let (p, _) = prime_power(q)
                .ok_or_else(|| Error::InvalidInput(format!("factor {q} is not a prime power")))?;
            primes.push(p);
            strides.push(usize::try_from(order).unwrap_or(usize::MAX));
            order = order
                .checked_mul(q)
                .ok_or_else(|| Error::InvalidInput("group order overflows u64".into()))?;
        }
        Ok(Group(Arc::new(GroupData {
            factors,
            primes,
            strides,
            order,
        })))
    }

    fn sort_key(q: u64) -> (u64, std::cmp::Reverse<u32>) {
        let (p, e) = prime_power(q).expect("prime power");
        (p, std::cmp::Reverse(e))
    }

    /// Splits each order into prime powers and sorts them canonically.
    /// Orders equal to 1 contribute nothing.
    pub fn canonicalize(orders: &[u64]) -> Result<Group> {
        Ok(Self::from_orders_with_map(orders)?.group)
    }

    /// Like [`Group::canonicalize`], also returning the coordinate map from the
    /// input presentation.
    pub fn from_orders_with_map(orders: &[u64]) -> Result<CoordMap> {
        let mut pieces: Vec<(usize, u64)> = Vec::new();
        for (k, &n) in orders.iter().enumerate() {
            if n == 0 {
                return Err(Error::InvalidInput("cyclic order 0 is not finite".into()));
            }
            for (p, e) in factorize(n) {
                pieces.push((k, p.pow(e)));
            }
        }
        let mut order_idx: Vec<usize> = (0..pieces.len()).collect();
        order_idx.sort_by_key(|&i| Self::sort_key(pieces[i].1));
        let factors: Vec<u64> = order_idx.iter().map(|&i| pieces[i].1).collect();
        let mut targets = vec![Vec::new(); orders.len()];
        for (pos, &i) in order_idx.iter().enumerate() {
            targets[pieces[i].0].push((pos, pieces[i].1));
        }
        Ok(CoordMap {
            input_orders: orders.to_vec(),
            targets,
            group: Self::from_sorted(factors)?,
        })
    }

    pub fn zero_group() -> Group {
        Self::from_sorted(Vec::new()).expect("zero group")
    }

    pub fn cyclic(n: u64) -> Result<Group> {
        Self::canonicalize(&[n])
    }

    /// Direct sum of `parts`, with the canonical positions each part's factors
    /// occupy in the result (so `positions[k][j]` is where factor `j` of part
    /// `k` landed).
    pub fn direct_sum(parts: &[Group]) -> (Group, Vec<Vec<usize>>) {
        let mut pieces: Vec<(usize, usize, u64)> = Vec::new();
        for (k, g) in parts.iter().enumerate() {
            for (j, &q) in g.factors().iter().enumerate() {
                pieces.push((k, j, q));
            }
        }
        let mut idx: Vec<usize> = (0..pieces.len()).collect();
        idx.sort_by_key(|&i| Self::sort_key(pieces[i].2));
        let mut positions: Vec<Vec<usize>> = parts.iter().map(|g| vec![0; g.rank()]).collect();
        for (pos, &i) in idx.iter().enumerate() {
            positions[pieces[i].0][pieces[i].1] = pos;
        }
        let factors = idx.iter().map(|&i| pieces[i].2).collect();
        (Self::from_sorted(factors).expect("sum of canonical groups"), positions)
    }

    pub fn factors(&self) -> &[u64] {
        &self.0.factors
    }

    /// The prime of each factor.
    pub fn factor_primes(&self) -> &[u64] {
        &self.0.primes
    }

    /// Distinct primes dividing the order, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps = self.0.primes.clone();
        ps.dedup();
        ps
    }

    pub fn rank(&self) -> usize {
        self.0.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    /// Order as an enumeration size. Only meaningful for groups within caps.
    pub fn size(&self) -> usize {
        self.0.order as usize
    }

    pub fn is_zero(&self) -> bool {
        self.0.factors.is_empty()
    }

    pub fn exponent(&self) -> u64 {
        self.0.factors.iter().fold(1, |acc, &q| lcm(acc, q))
    }

    pub fn check_enumerable(&self, caps: &Caps) -> Result<()> {
        caps.check_order("group elements", self.0.order.min(usize::MAX as u64) as usize)
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    pub fn unit(&self, j: usize) -> Element {
        let mut c = vec![0; self.rank()];
        c[j] = 1 % self.0.factors[j];
        Element(c)
    }

    /// Builds an element, rejecting out-of-range residues.
    pub fn element(&self, coords: &[u64]) -> Result<Element> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidInput(format!(
                "element has {} coordinates, group {self} has rank {}",
                coords.len(),
                self.rank()
            )));
        }
        for (c, q) in coords.iter().zip(self.factors()) {
            if c >= q {
                return Err(Error::InvalidInput(format!("coordinate {c} out of range for Z/{q}")));
            }
        }
        Ok(Element(coords.to_vec()))
    }

    /// Builds an element, reducing each coordinate.
    pub fn element_reduced(&self, coords: &[u64]) -> Element {
        Element(coords.iter().zip(self.factors()).map(|(c, q)| c % q).collect())
    }

    pub fn contains(&self, x: &Element) -> bool {
        x.0.len() == self.rank() && x.0.iter().zip(self.factors()).all(|(c, q)| c < q)
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&y.0)
                .zip(self.factors())
                .map(|((a, b), q)| (a + b) % q)
                .collect(),
        )
    }

    pub fn neg(&self, x: &Element) -> Element {
        Element(x.0.iter().zip(self.factors()).map(|(a, q)| (q - a) % q).collect())
    }

    pub fn scale(&self, k: u64, x: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(self.factors())
                .map(|(&a, &q)| ((a as u128 * (k % q) as u128) % q as u128) as u64)
                .collect(),
        )
    }

    pub fn order_of(&self, x: &Element) -> u64 {
        x.0.iter()
            .zip(self.factors())
            .fold(1, |acc, (&a, &q)| lcm(acc, q / gcd(a, q)))
    }

    pub fn index_of(&self, x: &Element) -> usize {
        x.0.iter()
            .zip(&self.0.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum()
    }

    pub fn element_at(&self, idx: usize) -> Element {
        Element(
            self.0
                .strides
                .iter()
                .zip(self.factors())
                .map(|(&s, &q)| ((idx / s) as u64) % q)
                .collect(),
        )
    }

    pub fn add_index(&self, i: usize, j: usize) -> usize {
        let mut out = 0;
        for (&s, &q) in self.0.strides.iter().zip(self.factors()) {
            let q = q as usize;
            let a = (i / s) % q;
            let b = (j / s) % q;
            out += ((a + b) % q) * s;
        }
        out
    }

    pub fn neg_index(&self, i: usize) -> usize {
        let mut out = 0;
        for (&s, &q) in self.0.strides.iter().zip(self.factors()) {
            let q = q as usize;
            let a = (i / s) % q;
            out += ((q - a) % q) * s;
        }
        out
    }

    pub fn order_of_index(&self, i: usize) -> u64 {
        let mut o = 1;
        for (&s, &q) in self.0.strides.iter().zip(self.factors()) {
            let a = ((i / s) as u64) % q;
            o = lcm(o, q / gcd(a, q));
        }
        o
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.size()).map(move |i| self.element_at(i))
    }

    /// Positions of the factors belonging to prime `p`.
    pub fn primary_positions(&self, p: u64) -> Vec<usize> {
        (0..self.rank()).filter(|&j| self.0.primes[j] == p).collect()
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({self})")
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, q) in self.factors().iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "Z/{q}")?;
        }
        Ok(())
    }
}

/// Cyclic of prime power order. The zero group is not uniserial here.
pub fn is_uniserial(g: &Group) -> bool {
    g.rank() == 1
}

/// Canonical isomorphism type of a finite abelian group, read off from the
/// multiset of its element orders.
///
/// For each prime `p`, the number of elements whose order has `p`-adic
/// valuation at most `k` is `|G_{p'}| * p^(number of factors with exponent >= 1,...)`;
/// successive ratios give how many `p`-factors have exponent at least `k`.
pub fn type_from_orders(orders: &[u64]) -> Group {
    let size = orders.len() as u64;
    let mut factors = Vec::new();
    for (p, _) in factorize(size) {
        let vals: Vec<u32> = orders
            .iter()
            .map(|&o| {
                let mut v = 0;
                let mut o = o;
                while o % p == 0 {
                    o /= p;
                    v += 1;
                }
                v
            })
            .collect();
        let max_v = vals.iter().copied().max().unwrap_or(0);
        let counts: Vec<u64> = (0..=max_v)
            .map(|k| vals.iter().filter(|&&v| v <= k).count() as u64)
            .collect();
        // at_least[k] = number of factors with exponent >= k, for k >= 1
        let mut at_least = vec![0u32; max_v as usize + 2];
        for k in 1..=max_v as usize {
            let mut ratio = counts[k] / counts[k - 1];
            let mut r = 0;
            while ratio > 1 {
                ratio /= p;
                r += 1;
            }
            at_least[k] = r;
        }
        for k in (1..=max_v as usize).rev() {
            for _ in 0..(at_least[k] - at_least[k + 1]) {
                factors.push(p.pow(k as u32));
            }
        }
    }
    Group::from_sorted(factors).expect("canonical factor list")
}

/// Backtracking search for elements `g_1..g_k` with `ord(g_i) = target[i]`
/// spanning an internal direct sum. `n` is the size of the id space, `zero`
/// the identity id. Returns `None` when no such tuple exists among `candidates`.
pub(crate) fn find_basis(
    target: &[u64],
    candidates: &[usize],
    n: usize,
    zero: usize,
    order_of: &dyn Fn(usize) -> u64,
    add: &dyn Fn(usize, usize) -> usize,
) -> Option<Vec<usize>> {
    fn mul(k: u64, x: usize, zero: usize, add: &dyn Fn(usize, usize) -> usize) -> usize {
        let mut acc = zero;
        let mut base = x;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = add(acc, base);
            }
            base = add(base, base);
            k >>= 1;
        }
        acc
    }

    struct Ctx<'a> {
        target: &'a [u64],
        by_order: HashMap<u64, Vec<usize>>,
        zero: usize,
        add: &'a dyn Fn(usize, usize) -> usize,
    }

    fn rec(ctx: &Ctx, t: usize, span: &mut Vec<bool>, span_list: &mut Vec<usize>, chosen: &mut Vec<usize>) -> bool {
        if t == ctx.target.len() {
            return true;
        }
        let d = ctx.target[t];
        let (p, _) = prime_power(d).expect("prime power target");
        let Some(cands) = ctx.by_order.get(&d) else {
            return false;
        };
        for &x in cands {
            let socle = mul(d / p, x, ctx.zero, ctx.add);
            if span[socle] {
                continue;
            }
            let old_len = span_list.len();
            let mut mult = x;
            for _ in 1..d {
                for s in 0..old_len {
                    let y = (ctx.add)(span_list[s], mult);
                    span[y] = true;
                    span_list.push(y);
                }
                mult = (ctx.add)(mult, x);
            }
            chosen.push(x);
            if rec(ctx, t + 1, span, span_list, chosen) {
                return true;
            }
            chosen.pop();
            for &y in &span_list[old_len..] {
                span[y] = false;
            }
            span_list.truncate(old_len);
        }
        false
    }

    let mut by_order: HashMap<u64, Vec<usize>> = HashMap::new();
    for &c in candidates {
        let o = order_of(c);
        if target.contains(&o) {
            by_order.entry(o).or_default().push(c);
        }
    }
    let ctx = Ctx {
        target,
        by_order,
        zero,
        add,
    };
    let mut span = vec![false; n];
    span[zero] = true;
    let mut span_list = vec![zero];
    let mut chosen = Vec::new();
    rec(&ctx, 0, &mut span, &mut span_list, &mut chosen).then_some(chosen)
}

/// A homomorphism between canonical groups, stored as a residue matrix with
/// one row per codomain factor and one column per domain factor.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hom {
    domain: Group,
    codomain: Group,
    matrix: Vec<u64>,
}

impl fmt::Debug for Hom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hom({} -> {}, [", self.domain, self.codomain)?;
        for (j, img) in self.images().iter().enumerate() {
            if j > 0 {
                write!(f, " ")?;
            }
            write!(f, "{img}")?;
        }
        write!(f, "])")
    }
}

/// Number of homomorphisms `g -> h`: the product of `gcd(d_j, e_i)`.
pub fn hom_count(g: &Group, h: &Group) -> u128 {
    let mut n: u128 = 1;
    for &e in h.factors() {
        for &d in g.factors() {
            n = n.saturating_mul(gcd(d, e) as u128);
        }
    }
    n
}

impl Hom {
    /// From rows (one per codomain factor). Entries are reduced; a matrix that
    /// violates `d_j * m[i][j] = 0 mod e_i` is rejected.
    pub fn new(domain: Group, codomain: Group, rows: &[Vec<u64>]) -> Result<Hom> {
        if rows.len() != codomain.rank() || rows.iter().any(|r| r.len() != domain.rank()) {
            return Err(Error::DomainMismatch(format!(
                "matrix shape does not match {domain} -> {codomain}"
            )));
        }
        let mut matrix = Vec::with_capacity(domain.rank() * codomain.rank());
        for (i, row) in rows.iter().enumerate() {
            let e = codomain.factors()[i];
            for (j, &m) in row.iter().enumerate() {
                let m = m % e;
                let d = domain.factors()[j];
                if !(d as u128 * m as u128).is_multiple_of(e as u128) {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) = {m} is not well defined from Z/{d} to Z/{e}"
                    )));
                }
                matrix.push(m);
            }
        }
        Ok(Hom {
            domain,
            codomain,
            matrix,
        })
    }

    /// The homomorphism sending the `j`-th canonical generator to `images[j]`.
    pub fn from_images(domain: Group, codomain: Group, images: &[Element]) -> Result<Hom> {
        if images.len() != domain.rank() {
            return Err(Error::DomainMismatch(format!(
                "{} images given for {} generators",
                images.len(),
                domain.rank()
            )));
        }
        for img in images {
            if !codomain.contains(img) {
                return Err(Error::InvalidInput(format!("image {img} is not an element of {codomain}")));
            }
        }
        let rows: Vec<Vec<u64>> = (0..codomain.rank())
            .map(|i| images.iter().map(|img| img.0[i]).collect())
            .collect();
        Hom::new(domain, codomain, &rows)
    }

    pub(crate) fn from_raw(domain: Group, codomain: Group, matrix: Vec<u64>) -> Hom {
        debug_assert_eq!(matrix.len(), domain.rank() * codomain.rank());
        Hom {
            domain,
            codomain,
            matrix,
        }
    }

    pub fn zero(domain: Group, codomain: Group) -> Hom {
        let matrix = vec![0; domain.rank() * codomain.rank()];
        Hom {
            domain,
            codomain,
            matrix,
        }
    }

    pub fn identity(g: Group) -> Hom {
        let k = g.rank();
        let mut matrix = vec![0; k * k];
        for i in 0..k {
            matrix[i * k + i] = 1 % g.factors()[i];
        }
        Hom {
            domain: g.clone(),
            codomain: g,
            matrix,
        }
    }

    pub fn domain(&self) -> &Group {
        &self.domain
    }

    pub fn codomain(&self) -> &Group {
        &self.codomain
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.matrix[i * self.domain.rank() + j]
    }

    pub fn raw_matrix(&self) -> &[u64] {
        &self.matrix
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        let c = self.domain.rank();
        (0..self.codomain.rank())
            .map(|i| self.matrix[i * c..(i + 1) * c].to_vec())
            .collect()
    }

    /// Image of each canonical generator of the domain.
    pub fn images(&self) -> Vec<Element> {
        (0..self.domain.rank())
            .map(|j| Element((0..self.codomain.rank()).map(|i| self.entry(i, j)).collect()))
            .collect()
    }

    pub fn apply(&self, x: &Element) -> Element {
        let c = self.domain.rank();
        Element(
            self.codomain
                .factors()
                .iter()
                .enumerate()
                .map(|(i, &e)| {
                    let row = &self.matrix[i * c..(i + 1) * c];
                    let s: u128 = row.iter().zip(&x.0).map(|(&m, &a)| m as u128 * a as u128).sum();
                    (s % e as u128) as u64
                })
                .collect(),
        )
    }

    pub fn apply_index(&self, i: usize) -> usize {
        self.codomain.index_of(&self.apply(&self.domain.element_at(i)))
    }

    /// `table[i]` is the codomain index of the image of domain element `i`.
    pub fn image_table(&self) -> Vec<usize> {
        let n = self.domain.size();
        let mut table = vec![0usize; n];
        let cols: Vec<usize> = self.images().iter().map(|e| self.codomain.index_of(e)).collect();
        // index i = i' + stride_j with the lowest nonzero coordinate j decremented
        for i in 1..n {
            let mut j = 0;
            let strides = &self.domain.0.strides;
            while (i / strides[j]).is_multiple_of(self.domain.factors()[j] as usize) {
                j += 1;
            }
            let prev = i - strides[j];
            table[i] = self.codomain.add_index(table[prev], cols[j]);
        }
        table
    }

    /// `g.compose(f)` is `g ∘ f`.
    pub fn compose(&self, f: &Hom) -> Result<Hom> {
        if f.codomain != self.domain {
            return Err(Error::DomainMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.domain, self.codomain, f.domain, f.codomain
            )));
        }
        Ok(self.compose_unchecked(f))
    }

    pub(crate) fn compose_unchecked(&self, f: &Hom) -> Hom {
        let n = f.domain.rank();
        let mid = self.domain.rank();
        let mut matrix = vec![0u64; self.codomain.rank() * n];
        for (i, &e) in self.codomain.factors().iter().enumerate() {
            for k in 0..n {
                let mut s: u128 = 0;
                for j in 0..mid {
                    s += self.matrix[i * mid + j] as u128 * f.matrix[j * n + k] as u128;
                }
                matrix[i * n + k] = (s % e as u128) as u64;
            }
        }
        Hom {
            domain: f.domain.clone(),
            codomain: self.codomain.clone(),
            matrix,
        }
    }

    fn check_parallel(&self, other: &Hom) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::DomainMismatch("maps have different domain or codomain".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Hom) -> Result<Hom> {
        self.check_parallel(other)?;
        let c = self.domain.rank().max(1);
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .enumerate()
            .map(|(k, (a, b))| (a + b) % self.codomain.factors()[k / c])
            .collect();
        Ok(Hom::from_raw(self.domain.clone(), self.codomain.clone(), matrix))
    }

    pub fn neg(&self) -> Hom {
        let c = self.domain.rank().max(1);
        let matrix = self
            .matrix
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let e = self.codomain.factors()[k / c];
                (e - a) % e
            })
            .collect();
        Hom::from_raw(self.domain.clone(), self.codomain.clone(), matrix)
    }

    pub fn sub(&self, other: &Hom) -> Result<Hom> {
        self.add(&other.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|&m| m == 0)
    }

    pub fn kernel(&self) -> Subgroup {
        let table = self.image_table();
        let zero = 0usize;
        let mask: Vec<bool> = table.iter().map(|&t| t == zero).collect();
        Subgroup::from_mask(self.domain.clone(), mask, None)
    }

    pub fn image(&self) -> Subgroup {
        let mut mask = vec![false; self.codomain.size()];
        for t in self.image_table() {
            mask[t] = true;
        }
        Subgroup::from_mask(self.codomain.clone(), mask, Some(self.images()))
    }

    /// Size of the image, computed from the images of the generators.
    pub fn image_order(&self) -> u64 {
        span_order(&self.codomain, &self.images())
    }

    pub fn is_injective(&self) -> bool {
        self.image_order() == self.domain.order()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_order() == self.codomain.order()
    }

    pub fn is_iso(&self) -> bool {
        self.domain.order() == self.codomain.order() && self.is_surjective()
    }
}

/// Order of the subgroup generated by `gens`.
pub fn span_order(g: &Group, gens: &[Element]) -> u64 {
    let nonzero: Vec<&Element> = gens.iter().filter(|x| x.0.iter().any(|&c| c != 0)).collect();
    match nonzero.as_slice() {
        [] => 1,
        [x] => g.order_of(x),
        _ => {
            let owned: Vec<Element> = nonzero.into_iter().cloned().collect();
            span_mask(g, &owned).1.len() as u64
        }
    }
}

fn span_mask(g: &Group, gens: &[Element]) -> (Vec<bool>, Vec<usize>) {
    let mut mask = vec![false; g.size()];
    mask[0] = true;
    let mut list = vec![0usize];
    for x in gens {
        let xi = g.index_of(x);
        if mask[xi] {
            continue;
        }
        let old = list.len();
        let mut mult = xi;
        while !mask[mult] {
            for s in 0..old {
                let y = g.add_index(list[s], mult);
                mask[y] = true;
                list.push(y);
            }
            mult = g.add_index(mult, xi);
        }
    }
    list.sort_unstable();
    (mask, list)
}

/// Iterator over every homomorphism between two groups.
pub struct HomIter {
    domain: Group,
    codomain: Group,
    steps: Vec<u64>,
    limits: Vec<u64>,
    counter: Vec<u64>,
    done: bool,
}

impl Iterator for HomIter {
    type Item = Hom;

    fn next(&mut self) -> Option<Hom> {
        if self.done {
            return None;
        }
        let matrix: Vec<u64> = self.counter.iter().zip(&self.steps).map(|(k, s)| k * s).collect();
        let hom = Hom::from_raw(self.domain.clone(), self.codomain.clone(), matrix);
        let mut pos = 0;
        loop {
            if pos == self.counter.len() {
                self.done = true;
                break;
            }
            self.counter[pos] += 1;
            if self.counter[pos] < self.limits[pos] {
                break;
            }
            self.counter[pos] = 0;
            pos += 1;
        }
        Some(hom)
    }
}

/// Every homomorphism `g -> h`, each exactly once, starting with zero.
pub fn enumerate_homs(g: &Group, h: &Group, caps: &Caps) -> Result<HomIter> {
    let count = hom_count(g, h);
    if count > caps.max_hom_count {
        return Err(Error::cap("hom enumeration", count, caps.max_hom_count));
    }
    let mut steps = Vec::new();
    let mut limits = Vec::new();
    for &e in h.factors() {
        for &d in g.factors() {
            let k = gcd(d, e);
            steps.push(e / k);
            limits.push(k);
        }
    }
    Ok(HomIter {
        domain: g.clone(),
        codomain: h.clone(),
        counter: vec![0; steps.len()],
        steps,
        limits,
        done: false,
    })
}

#[derive(Debug)]
struct SubgroupData {
    ambient: Group,
    generators: Vec<Element>,
    mask: Vec<bool>,
    elements: Vec<usize>,
    canonical_type: Group,
    basis: Vec<Element>,
    type_index: Vec<u32>,
}

/// A subgroup with its full element set, abstract type and a basis realizing
/// an isomorphism from that type.
#[derive(Clone, Debug)]
pub struct Subgroup(Arc<SubgroupData>);

const NOT_MEMBER: u32 = u32::MAX;

impl Subgroup {
    fn from_mask(ambient: Group, mask: Vec<bool>, generators: Option<Vec<Element>>) -> Subgroup {
        let elements: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        let orders: Vec<u64> = elements.iter().map(|&i| ambient.order_of_index(i)).collect();
        let canonical_type = type_from_orders(&orders);
        let basis_idx = find_basis(
            canonical_type.factors(),
            &elements,
            ambient.size(),
            0,
            &|i| ambient.order_of_index(i),
            &|i, j| ambient.add_index(i, j),
        )
        .expect("a subgroup always has a basis of its own type");
        let basis: Vec<Element> = basis_idx.iter().map(|&i| ambient.element_at(i)).collect();
        let mut type_index = vec![NOT_MEMBER; ambient.size()];
        let incl = Hom::from_images(canonical_type.clone(), ambient.clone(), &basis).expect("basis inclusion");
        for (t, amb) in incl.image_table().into_iter().enumerate() {
            type_index[amb] = t as u32;
        }
        let generators = generators.unwrap_or_else(|| basis.clone());
        Subgroup(Arc::new(SubgroupData {
            ambient,
            generators,
            mask,
            elements,
            canonical_type,
            basis,
            type_index,
        }))
    }

    pub fn trivial(ambient: &Group) -> Subgroup {
        let mut mask = vec![false; ambient.size()];
        mask[0] = true;
        Subgroup::from_mask(ambient.clone(), mask, Some(Vec::new()))
    }

    pub fn whole(ambient: &Group) -> Subgroup {
        let gens = (0..ambient.rank()).map(|j| ambient.unit(j)).collect();
        Subgroup::from_mask(ambient.clone(), vec![true; ambient.size()], Some(gens))
    }

    pub fn ambient(&self) -> &Group {
        &self.0.ambient
    }

    pub fn generators(&self) -> &[Element] {
        &self.0.generators
    }

    pub fn order(&self) -> u64 {
        self.0.elements.len() as u64
    }

    pub fn is_trivial(&self) -> bool {
        self.0.elements.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.0.elements.len() == self.0.ambient.size()
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.0.ambient.contains(x) && self.0.mask[self.0.ambient.index_of(x)]
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.0.mask[i]
    }

    /// Ambient indices of the members, ascending.
    pub fn element_indices(&self) -> &[usize] {
        &self.0.elements
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.0.elements.iter().map(move |&i| self.0.ambient.element_at(i))
    }

    pub fn canonical_type(&self) -> &Group {
        &self.0.canonical_type
    }

    /// Members `b_1..b_k` with `ord(b_j)` the `j`-th factor of
    /// [`canonical_type`](Self::canonical_type), forming a basis.
    pub fn basis(&self) -> &[Element] {
        &self.0.basis
    }

    /// Coordinates of a member against the basis.
    pub fn coords_in_type(&self, x: &Element) -> Option<Element> {
        if !self.0.ambient.contains(x) {
            return None;
        }
        self.coords_of_index(self.0.ambient.index_of(x))
    }

    pub fn coords_of_index(&self, i: usize) -> Option<Element> {
        match self.0.type_index[i] {
            NOT_MEMBER => None,
            t => Some(self.0.canonical_type.element_at(t as usize)),
        }
    }

    /// The embedding `canonical_type -> ambient` given by the basis.
    pub fn inclusion(&self) -> Hom {
        Hom::from_images(self.0.canonical_type.clone(), self.0.ambient.clone(), &self.0.basis).expect("inclusion")
    }

    pub fn same_elements(&self, other: &Subgroup) -> bool {
        self.0.ambient == other.0.ambient && self.0.elements == other.0.elements
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.0.ambient == other.0.ambient && self.0.elements.iter().all(|&i| other.0.mask[i])
    }

    /// Image of this subgroup under `f`.
    pub fn map_under(&self, f: &Hom) -> Subgroup {
        let imgs: Vec<Element> = self.0.basis.iter().map(|b| f.apply(b)).collect();
        let (mask, _) = span_mask(f.codomain(), &imgs);
        Subgroup::from_mask(f.codomain().clone(), mask, Some(imgs))
    }

    /// Preimage of this subgroup under `f`.
    pub fn preimage_under(&self, f: &Hom) -> Subgroup {
        let mask: Vec<bool> = f.image_table().into_iter().map(|t| self.0.mask[t]).collect();
        Subgroup::from_mask(f.domain().clone(), mask, None)
    }

    /// Subgroup sum `self + other`.
    pub fn sum(&self, other: &Subgroup) -> Subgroup {
        let gens: Vec<Element> = self.0.basis.iter().chain(other.0.basis.iter()).cloned().collect();
        let (mask, _) = span_mask(&self.0.ambient, &gens);
        Subgroup::from_mask(self.0.ambient.clone(), mask, Some(gens))
    }
}

/// Closure of `gens` under addition.
pub fn subgroup_generated(b: &Group, gens: &[Element]) -> Result<Subgroup> {
    for g in gens {
        if !b.contains(g) {
            return Err(Error::InvalidInput(format!("{g} is not an element of {b}")));
        }
    }
    let (mask, _) = span_mask(b, gens);
    Ok(Subgroup::from_mask(b.clone(), mask, Some(gens.to_vec())))
}

#[derive(Debug)]
struct QuotientData {
    ambient: Group,
    kernel: Subgroup,
    coset_of: Vec<u32>,
    reps: Vec<usize>,
    abstract_type: Group,
    coset_to_abstract: Vec<usize>,
    basis_reps: Vec<Element>,
}

/// `B / A`, identified with a canonical group through an explicit projection.
#[derive(Clone, Debug)]
pub struct QuotientView(Arc<QuotientData>);

impl QuotientView {
    pub fn ambient(&self) -> &Group {
        &self.0.ambient
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.0.kernel
    }

    pub fn abstract_type(&self) -> &Group {
        &self.0.abstract_type
    }

    pub fn num_cosets(&self) -> usize {
        self.0.reps.len()
    }

    pub fn coset_id(&self, x: &Element) -> usize {
        self.0.coset_of[self.0.ambient.index_of(x)] as usize
    }

    /// Ambient index of the representative of each coset.
    pub fn representatives(&self) -> &[usize] {
        &self.0.reps
    }

    pub fn project(&self, x: &Element) -> Element {
        let idx = self.project_index(self.0.ambient.index_of(x));
        self.0.abstract_type.element_at(idx)
    }

    /// Abstract-type index of the image of ambient element `i`.
    pub fn project_index(&self, i: usize) -> usize {
        self.0.coset_to_abstract[self.0.coset_of[i] as usize]
    }

    /// The projection as a homomorphism `ambient -> abstract_type`.
    pub fn projection_hom(&self) -> Hom {
        let imgs: Vec<Element> = (0..self.0.ambient.rank())
            .map(|j| self.project(&self.0.ambient.unit(j)))
            .collect();
        Hom::from_images(self.0.ambient.clone(), self.0.abstract_type.clone(), &imgs).expect("projection")
    }

    /// Elements of the ambient group projecting onto the abstract basis.
    pub fn basis_reps(&self) -> &[Element] {
        &self.0.basis_reps
    }

    /// Some preimage of an abstract element.
    pub fn lift(&self, y: &Element) -> Element {
        let mut acc = self.0.ambient.zero();
        for (c, r) in y.coords().iter().zip(&self.0.basis_reps) {
            acc = self.0.ambient.add(&acc, &self.0.ambient.scale(*c, r));
        }
        acc
    }
}

/// Coset table of `b / a`, its abstract type and projection.
pub fn quotient(b: &Group, a: &Subgroup) -> Result<QuotientView> {
    if a.ambient() != b {
        return Err(Error::DomainMismatch(format!(
            "subgroup of {} used as a subgroup of {b}",
            a.ambient()
        )));
    }
    let n = b.size();
    let mut coset_of = vec![u32::MAX; n];
    let mut reps = Vec::new();
    for i in 0..n {
        if coset_of[i] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        reps.push(i);
        for &k in a.element_indices() {
            coset_of[b.add_index(i, k)] = id;
        }
    }
    let m = reps.len();
    let coset_add = |x: usize, y: usize| coset_of[b.add_index(reps[x], reps[y])] as usize;
    let coset_order = |x: usize| {
        let mut acc = x;
        let mut k = 1u64;
        while acc != 0 {
            acc = coset_add(acc, x);
            k += 1;
        }
        k
    };
    let orders: Vec<u64> = (0..m).map(coset_order).collect();
    let abstract_type = type_from_orders(&orders);
    let ids: Vec<usize> = (0..m).collect();
    let basis = find_basis(abstract_type.factors(), &ids, m, 0, &|x| orders[x], &coset_add)
        .expect("a quotient always has a basis of its own type");
    let basis_reps: Vec<Element> = basis.iter().map(|&c| b.element_at(reps[c])).collect();
    // abstract element t = sum t_j e_j  ->  coset sum t_j basis_j
    let mut coset_to_abstract = vec![0usize; m];
    let mut coords = vec![0u64; abstract_type.rank()];
    for t in 0..m {
        let mut acc = 0usize;
        for (j, &c) in coords.iter().enumerate() {
            for _ in 0..c {
                acc = coset_add(acc, basis[j]);
            }
        }
        coset_to_abstract[acc] = t;
        for (j, &q) in abstract_type.factors().iter().enumerate() {
            coords[j] += 1;
            if coords[j] < q {
                break;
            }
            coords[j] = 0;
        }
    }
    Ok(QuotientView(Arc::new(QuotientData {
        ambient: b.clone(),
        kernel: a.clone(),
        coset_of,
        reps,
        abstract_type,
        coset_to_abstract,
        basis_reps,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(orders: &[u64]) -> Group {
        Group::canonicalize(orders).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(g(&[6]).factors(), &[2, 3]);
        assert!(g(&[]).is_zero());
        assert_eq!(g(&[]).order(), 1);
        assert_eq!(g(&[4, 2]).factors(), &[4, 2]);
        assert_eq!(g(&[2, 4]).factors(), &[4, 2]);
        assert_eq!(g(&[1, 1]).factors(), &[] as &[u64]);
        assert_eq!(g(&[12, 9, 8]).factors(), &[8, 4, 9, 3]);
        assert!(Group::canonicalize(&[0]).is_err());
    }

    #[test]
    fn coord_map_follows_crt() {
        let map = Group::from_orders_with_map(&[6]).unwrap();
        assert_eq!(map.map(&[5]).unwrap().coords(), &[1, 2]);
        assert!(map.map(&[6]).is_err());
        assert!(map.map(&[1, 1]).is_err());
    }

    #[test]
    fn hom_count_examples() {
        let caps = Caps::default();
        // brute force over images of the generator with order dividing 2
        let z2 = g(&[2]);
        let z4 = g(&[4]);
        let brute = z4.elements().filter(|x| z4.order_of(x) <= 2).count();
        assert_eq!(brute, 2);
        assert_eq!(enumerate_homs(&z2, &z4, &caps).unwrap().count(), 2);
        assert_eq!(enumerate_homs(&Group::zero_group(), &z4, &caps).unwrap().count(), 1);
        let z6 = g(&[2, 3]);
        assert_eq!(enumerate_homs(&z6, &z6, &caps).unwrap().count(), 6);
    }

    #[test]
    fn hom_count_cap() {
        let caps = Caps {
            max_hom_count: 3,
            ..Caps::default()
        };
        let z4 = g(&[4]);
        assert!(matches!(
            enumerate_homs(&z4, &z4, &caps),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn kernel_image_examples() {
        let z4 = g(&[4]);
        let zero = Hom::zero(z4.clone(), z4.clone());
        assert!(zero.kernel().is_whole());
        let double = Hom::new(z4.clone(), z4.clone(), &[vec![2]]).unwrap();
        let img = double.image();
        assert_eq!(img.order(), 2);
        let id = Hom::identity(z4.clone());
        assert_eq!(double.compose(&id).unwrap(), double);
        assert_eq!(id.compose(&double).unwrap(), double);
        assert!(id.is_injective() && id.is_surjective());
        assert!(!double.is_injective());
        let z2 = g(&[2]);
        assert!(matches!(
            double.compose(&Hom::zero(z2.clone(), z2)),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn ill_defined_matrix_rejected() {
        let z2 = g(&[2]);
        let z4 = g(&[4]);
        assert!(Hom::new(z2, z4, &[vec![1]]).is_err());
    }

    #[test]
    fn subgroup_examples() {
        let b = g(&[4, 2]);
        let t = subgroup_generated(&b, &[]).unwrap();
        assert!(t.is_trivial());
        let s = subgroup_generated(&b, &[b.element(&[2, 0]).unwrap()]).unwrap();
        assert_eq!(s.order(), 2);
        assert_eq!(s.canonical_type().factors(), &[2]);
        let z4 = g(&[4]);
        let w = subgroup_generated(&z4, &[z4.element(&[1]).unwrap()]).unwrap();
        assert!(w.is_whole());
    }

    #[test]
    fn quotient_examples() {
        let b = g(&[4, 2]);
        let q = quotient(&b, &Subgroup::trivial(&b)).unwrap();
        assert_eq!(q.abstract_type(), &b);
        let z4 = g(&[4]);
        let a = subgroup_generated(&z4, &[z4.element(&[2]).unwrap()]).unwrap();
        let q = quotient(&z4, &a).unwrap();
        assert_eq!(q.abstract_type().factors(), &[2]);
        let v = g(&[2, 2]);
        let a = subgroup_generated(&v, &[v.element(&[1, 0]).unwrap()]).unwrap();
        let q = quotient(&v, &a).unwrap();
        assert_eq!(q.abstract_type().factors(), &[2]);
    }

    #[test]
    fn projection_is_homomorphic_with_kernel() {
        let b = g(&[8, 2, 3]);
        let a = subgroup_generated(&b, &[b.element(&[2, 1, 0]).unwrap()]).unwrap();
        let q = quotient(&b, &a).unwrap();
        let proj = q.projection_hom();
        for x in b.elements() {
            assert_eq!(proj.apply(&x), q.project(&x));
            assert_eq!(q.project(&x) == q.abstract_type().zero(), a.contains(&x));
        }
        assert!(proj.is_surjective());
        for y in q.abstract_type().elements() {
            assert_eq!(q.project(&q.lift(&y)), y);
        }
    }

    #[test]
    fn uniserial_examples() {
        assert!(is_uniserial(&g(&[9])));
        assert!(!is_uniserial(&g(&[2, 2])));
        assert!(!is_uniserial(&g(&[6])));
        assert!(!is_uniserial(&Group::zero_group()));
    }

    #[test]
    fn z6_has_incomparable_subgroups() {
        // oracle for the Z/6 case: enumerate subgroups generated by single
        // elements and look for an incomparable pair
        let z6 = g(&[6]);
        let subs: Vec<Subgroup> = z6.elements().map(|x| subgroup_generated(&z6, &[x]).unwrap()).collect();
        let incomparable = subs
            .iter()
            .any(|s| subs.iter().any(|t| !s.is_subset_of(t) && !t.is_subset_of(s)));
        assert!(incomparable);
    }

    #[test]
    fn type_from_orders_identifies_groups() {
        for orders in [&[8u64, 2][..], &[4, 4], &[2, 2, 2], &[9, 3, 4], &[27], &[]] {
            let grp = g(orders);
            let os: Vec<u64> = grp.elements().map(|x| grp.order_of(&x)).collect();
            assert_eq!(type_from_orders(&os), grp);
        }
    }

    #[test]
    fn direct_sum_positions() {
        let (s, pos) = Group::direct_sum(&[g(&[2, 3]), g(&[4])]);
        assert_eq!(s.factors(), &[4, 2, 3]);
        assert_eq!(pos, vec![vec![1, 2], vec![0]]);
    }

    #[test]
    fn image_table_matches_apply() {
        let b = g(&[4, 2, 9]);
        let f = Hom::new(b.clone(), b.clone(), &[vec![3, 2, 0], vec![1, 1, 0], vec![0, 0, 4]]).unwrap();
        let t = f.image_table();
        for (i, x) in b.elements().enumerate() {
            assert_eq!(t[i], b.index_of(&f.apply(&x)));
        }
    }
}
