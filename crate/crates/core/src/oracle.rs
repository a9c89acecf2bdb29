//! Exhaustive search for an isomorphism `⊕B_i -> ⊕B'_j` carrying `⊕A_i`
//! onto `⊕A'_j`.
//!
//! The search works one prime at a time. For a fixed prime it enumerates,
//! for every left summand, the injective maps of that summand's primary part
//! into the target that send its `A` into the target `A'` (generator images
//! of the right order and height zero, independent of earlier images). Only
//! the image subgroup of such a block map matters for the rest of the search,
//! so block maps are kept one per image. A full isomorphism is a choice of
//! one block map per summand whose images form a direct sum.

use std::collections::{HashMap, HashSet};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ext::{direct_sum, is_iso_in_e, DirectSum, ExtMorphism, ExtObject};
use crate::group::{Element, Group, Hom};

/// Outcome of one search.
#[derive(Clone, Debug)]
pub struct IsoSearch {
    /// An isomorphism in the category, from the left sum to the right sum.
    pub iso: Option<Hom>,
    /// Search nodes visited.
    pub nodes: u64,
}

/// The sums of both lists and the search result.
#[derive(Clone, Debug)]
pub struct OracleRun {
    pub left: DirectSum,
    pub right: DirectSum,
    pub search: IsoSearch,
}

/// Sum of a list, with the empty list read as the zero object.
pub fn sum_of(list: &[ExtObject], caps: &Caps) -> Result<DirectSum> {
    if list.is_empty() {
        direct_sum(&[ExtObject::zero()], caps)
    } else {
        direct_sum(list, caps)
    }
}

pub fn oracle_iso(left: &[ExtObject], right: &[ExtObject], caps: &Caps) -> Result<OracleRun> {
    let l = sum_of(left, caps)?;
    let r = sum_of(right, caps)?;
    let search = search_sums(&l, &r.object, caps)?;
    Ok(OracleRun {
        left: l,
        right: r,
        search,
    })
}

/// Isomorphism between two single objects.
pub fn find_iso(x: &ExtObject, y: &ExtObject, caps: &Caps) -> Result<IsoSearch> {
    let l = direct_sum(std::slice::from_ref(x), caps)?;
    let s = search_sums(&l, y, caps)?;
    // `l.object` has the same group and subgroup as `x`, so the map is valid for `x` too
    Ok(s)
}

struct Budget {
    nodes: u64,
    limit: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::cap("oracle search nodes", self.nodes as u128, self.limit as u128));
        }
        Ok(())
    }
}

/// Fixed-size bitset over the elements of a primary part.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    /// Only the zero element in common.
    fn meets_trivially(&self, other: &Bits) -> bool {
        let mut w = self.0.iter().zip(&other.0).map(|(a, b)| a & b);
        w.next().is_some_and(|first| first == 1) && w.all(|x| x == 0)
    }
}

/// The `p`-primary part of the target with its `A'`.
struct Target {
    g: Group,
    a_mask: Vec<bool>,
    /// Elements of each order that are not divisible by `p`, by order.
    candidates: HashMap<u64, Vec<usize>>,
}

impl Target {
    fn new(g: Group, a_mask: Vec<bool>, p: u64) -> Target {
        let n = g.size();
        let mut divisible = vec![false; n];
        for i in 0..n {
            divisible[times(&g, p, i)] = true;
        }
        let mut candidates: HashMap<u64, Vec<usize>> = HashMap::new();
        for i in 0..n {
            if !divisible[i] {
                candidates.entry(g.order_of_index(i)).or_default().push(i);
            }
        }
        Target { g, a_mask, candidates }
    }
}

/// `k * x` by repeated doubling on indices.
fn times(g: &Group, k: u64, x: usize) -> usize {
    let (mut acc, mut base, mut k) = (0usize, x, k);
    while k > 0 {
        if k & 1 == 1 {
            acc = g.add_index(acc, base);
        }
        base = g.add_index(base, base);
        k >>= 1;
    }
    acc
}

/// One left summand's `p`-part: generator orders and the `A`-basis elements
/// written in those generators.
struct Block {
    /// Positions of the generators in the left sum group.
    sum_positions: Vec<usize>,
    orders: Vec<u64>,
    a_coeffs: Vec<Vec<u64>>,
}

/// Image subgroups of admissible block maps, each with one map realizing it.
struct BlockImages {
    images: Vec<(Bits, Vec<usize>, Vec<usize>)>,
}

fn enumerate_block(block: &Block, t: &Target, p: u64, budget: &mut Budget) -> Result<BlockImages> {
    let n = t.g.size();
    let mut seen: HashSet<Bits> = HashSet::new();
    let mut out = BlockImages { images: Vec::new() };
    let mut span_mask = vec![false; n];
    span_mask[0] = true;
    let mut span_list = vec![0usize];
    let mut chosen = Vec::with_capacity(block.orders.len());
    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        block: &Block,
        t: &Target,
        p: u64,
        budget: &mut Budget,
        span_mask: &mut Vec<bool>,
        span_list: &mut Vec<usize>,
        chosen: &mut Vec<usize>,
        seen: &mut HashSet<Bits>,
        out: &mut BlockImages,
    ) -> Result<()> {
        if k == block.orders.len() {
            for c in &block.a_coeffs {
                let mut img = 0usize;
                for (&ck, &y) in c.iter().zip(chosen.iter()) {
                    img = t.g.add_index(img, times(&t.g, ck, y));
                }
                if !t.a_mask[img] {
                    return Ok(());
                }
            }
            let mut bits = Bits::new(t.g.size());
            for &s in span_list.iter() {
                bits.set(s);
            }
            if seen.insert(bits.clone()) {
                let mut list = span_list.clone();
                list.sort_unstable();
                out.images.push((bits, list, chosen.clone()));
            }
            return Ok(());
        }
        let d = block.orders[k];
        let Some(cands) = t.candidates.get(&d) else {
            return Ok(());
        };
        for &y in cands {
            budget.tick()?;
            if span_mask[times(&t.g, d / p, y)] {
                continue;
            }
            let old = span_list.len();
            let mut mult = y;
            for _ in 1..d {
                for s in 0..old {
                    let z = t.g.add_index(span_list[s], mult);
                    span_mask[z] = true;
                    span_list.push(z);
                }
                mult = t.g.add_index(mult, y);
            }
            chosen.push(y);
            rec(k + 1, block, t, p, budget, span_mask, span_list, chosen, seen, out)?;
            chosen.pop();
            for &z in &span_list[old..] {
                span_mask[z] = false;
            }
            span_list.truncate(old);
        }
        Ok(())
    }
    rec(0, block, t, p, budget, &mut span_mask, &mut span_list, &mut chosen, &mut seen, &mut out)?;
    Ok(out)
}

/// Picks one image per block so that the images form a direct sum. Returns
/// the chosen entry per block.
fn combine(
    blocks: &[BlockImages],
    t: &Target,
    budget: &mut Budget,
) -> Result<Option<Vec<usize>>> {
    let n = t.g.size();
    let mut current = Bits::new(n);
    current.set(0);
    let mut failed: HashSet<(usize, Bits)> = HashSet::new();
    let mut picks = Vec::new();
    fn rec(
        b: usize,
        blocks: &[BlockImages],
        t: &Target,
        budget: &mut Budget,
        current: &Bits,
        current_list: &[usize],
        failed: &mut HashSet<(usize, Bits)>,
        picks: &mut Vec<usize>,
    ) -> Result<bool> {
        if b == blocks.len() {
            return Ok(current_list.len() == t.g.size());
        }
        if failed.contains(&(b, current.clone())) {
            return Ok(false);
        }
        for (k, (bits, list, _)) in blocks[b].images.iter().enumerate() {
            budget.tick()?;
            if !bits.meets_trivially(current) {
                continue;
            }
            let mut next = current.clone();
            let mut next_list = Vec::with_capacity(current_list.len() * list.len());
            for &x in current_list {
                for &y in list {
                    let z = t.g.add_index(x, y);
                    next.set(z);
                    next_list.push(z);
                }
            }
            picks.push(k);
            if rec(b + 1, blocks, t, budget, &next, &next_list, failed, picks)? {
                return Ok(true);
            }
            picks.pop();
        }
        failed.insert((b, current.clone()));
        Ok(false)
    }
    let found = rec(0, blocks, t, budget, &current, &[0], &mut failed, &mut picks)?;
    Ok(found.then_some(picks))
}

/// Restriction of an element of `g` to the canonical positions `pos`, as an
/// index of the primary part `gp`.
fn restrict_index(gp: &Group, x: &Element, pos: &[usize]) -> usize {
    let coords: Vec<u64> = pos.iter().map(|&k| x.coords()[k]).collect();
    gp.index_of(&gp.element_reduced(&coords))
}

/// Searches for an isomorphism from a direct sum onto `right`. The block
/// structure of `left` drives the search; `right` may be any object.
pub fn search_sums(left: &DirectSum, right: &ExtObject, caps: &Caps) -> Result<IsoSearch> {
    let mut budget = Budget {
        nodes: 0,
        limit: caps.oracle_max_nodes,
    };
    let gl = left.object.group();
    let gr = right.group();
    let no = |budget: &Budget| IsoSearch {
        iso: None,
        nodes: budget.nodes,
    };
    let order = gl.order().max(gr.order()) as u128;
    if order > caps.oracle_max_order as u128 {
        return Err(Error::cap("oracle group order", order, caps.oracle_max_order as u128));
    }
    if gl != gr
        || left.object.a_type() != right.a_type()
        || left.object.c_type() != right.c_type()
    {
        return Ok(no(&budget));
    }
    let mut images: Vec<Element> = vec![gr.zero(); gl.rank()];
    for p in gl.primes() {
        let pos = gl.primary_positions(p);
        let gp = Group::canonicalize(&pos.iter().map(|&k| gl.factors()[k]).collect::<Vec<_>>())?;
        let outside_zero = |x: &Element| {
            x.coords()
                .iter()
                .enumerate()
                .all(|(k, &c)| c == 0 || pos.contains(&k))
        };
        let mut a_mask = vec![false; gp.size()];
        let mut a_count = 0;
        for x in right.sub().elements() {
            if outside_zero(&x) {
                a_mask[restrict_index(&gp, &x, &pos)] = true;
                a_count += 1;
            }
        }
        let left_a_count = left.object.sub().elements().filter(|x| outside_zero(x)).count();
        if a_count != left_a_count {
            return Ok(no(&budget));
        }
        let target = Target::new(gp.clone(), a_mask, p);
        let mut blocks = Vec::new();
        for (i, summand) in left.summands.iter().enumerate() {
            let sg = summand.group();
            let local: Vec<usize> = (0..sg.rank()).filter(|&j| sg.factor_primes()[j] == p).collect();
            if local.is_empty() {
                continue;
            }
            let a_coeffs = summand
                .sub()
                .basis()
                .iter()
                .filter(|a| sg.order_of(a) % p == 0)
                .map(|a| local.iter().map(|&j| a.coords()[j]).collect())
                .collect();
            blocks.push(Block {
                sum_positions: local.iter().map(|&j| left.positions[i][j]).collect(),
                orders: local.iter().map(|&j| sg.factors()[j]).collect(),
                a_coeffs,
            });
        }
        let mut enumerated = Vec::with_capacity(blocks.len());
        for b in &blocks {
            let imgs = enumerate_block(b, &target, p, &mut budget)?;
            if imgs.images.is_empty() {
                return Ok(no(&budget));
            }
            enumerated.push(imgs);
        }
        let Some(picks) = combine(&enumerated, &target, &mut budget)? else {
            return Ok(no(&budget));
        };
        for ((b, imgs), &k) in blocks.iter().zip(&enumerated).zip(&picks) {
            for (&sp, &y) in b.sum_positions.iter().zip(&imgs.images[k].2) {
                let local = gp.element_at(y);
                let mut coords = vec![0u64; gr.rank()];
                for (&q, &c) in pos.iter().zip(local.coords()) {
                    coords[q] = c;
                }
                images[sp] = gr.element_reduced(&coords);
            }
        }
    }
    let f = Hom::from_images(gl.clone(), gr.clone(), &images)?;
    let m = ExtMorphism::new(&left.object, right, f.clone())
        .map_err(|e| Error::TheoremViolation(format!("oracle produced a map outside the category: {e}")))?;
    if !is_iso_in_e(&m) {
        return Err(Error::TheoremViolation("oracle produced a non-isomorphism".into()));
    }
    Ok(IsoSearch {
        iso: Some(f),
        nodes: budget.nodes,
    })
}

/// Plain backtracking over all generator images with no block structure.
/// Exponential; kept as a cross-check for small groups.
pub fn naive_iso(x: &ExtObject, y: &ExtObject, caps: &Caps) -> Result<Option<Hom>> {
    if x.group() != y.group() || x.sub().order() != y.sub().order() {
        return Ok(None);
    }
    for m in crate::ext::morphisms(x, y, caps)? {
        if is_iso_in_e(&m) {
            return Ok(Some(m.map().clone()));
        }
    }
    Ok(None)
}
