//! Reference computations written independently of the library's solvers.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use gridtoll::model::{Driver, EdgeId, GridInstance, GridShape, Pricing, VertexId};
use gridtoll::money::Money;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn neighbours(p: &Pricing, v: VertexId) -> Vec<(VertexId, Money)> {
    let s = p.shape();
    let mut out = Vec::new();
    let mut push = |e: EdgeId| {
        let w = p.get(e);
        if !w.is_infinite() {
            let (a, b) = e.endpoints();
            out.push((if a == v { b } else { a }, w.clone()));
        }
    };
    if v.col + 1 < s.width {
        push(EdgeId::h(v.row, v.col));
    }
    if v.col > 0 {
        push(EdgeId::h(v.row, v.col - 1));
    }
    if v.row + 1 < s.length {
        push(EdgeId::v(v.row, v.col));
    }
    if v.row > 0 {
        push(EdgeId::v(v.row - 1, v.col));
    }
    out
}

/// Plain label-setting shortest paths over finite-priced edges.
pub fn distances_from(p: &Pricing, src: VertexId) -> BTreeMap<VertexId, Money> {
    let mut dist: BTreeMap<VertexId, Money> = BTreeMap::new();
    let mut frontier: BTreeSet<(Money, VertexId)> = BTreeSet::new();
    dist.insert(src, Money::zero());
    frontier.insert((Money::zero(), src));
    while let Some((d, v)) = frontier.pop_first() {
        if dist.get(&v) != Some(&d) {
            continue;
        }
        for (w, x) in neighbours(p, v) {
            let nd = &d + &x;
            if dist.get(&w).map_or(true, |old| nd < *old) {
                dist.insert(w, nd.clone());
                frontier.insert((nd, w));
            }
        }
    }
    dist
}

/// `pricing` with every missing edge of `g` forced to infinity.
fn effective(g: &GridInstance, pricing: &Pricing) -> Pricing {
    let mut p = pricing.clone();
    for e in g.missing_edges() {
        p.set(*e, Money::Infinity);
    }
    p
}

pub fn revenue(g: &GridInstance, pricing: &Pricing) -> Money {
    let p = effective(g, pricing);
    let mut total = Money::zero();
    let mut cache: BTreeMap<VertexId, BTreeMap<VertexId, Money>> = BTreeMap::new();
    for d in &g.drivers {
        let dist = cache.entry(d.u).or_insert_with(|| distances_from(&p, d.u));
        if let Some(c) = dist.get(&d.v) {
            if *c <= d.budget {
                total = &total + c;
            }
        }
    }
    total
}

/// Distances between every pair of first-row vertices.
pub fn first_row_apsp(p: &Pricing) -> BTreeMap<(usize, usize), Money> {
    let w = p.shape().width;
    let mut out = BTreeMap::new();
    for a in 0..w {
        let dist = distances_from(p, VertexId::new(0, a));
        for b in 0..w {
            out.insert((a, b), dist.get(&VertexId::new(0, b)).cloned().unwrap_or(Money::Infinity));
        }
    }
    out
}

/// Best revenue over every assignment of `values` to the present edges, and the
/// first pricing reaching it with edges in order and values ascending.
pub fn naive_opt(g: &GridInstance, values: &[Money]) -> (Money, Pricing) {
    let present: Vec<EdgeId> = g.present_edges().collect();
    let mut values = values.to_vec();
    values.sort();
    values.dedup();
    let mut p = Pricing::filled(g.shape(), Money::Infinity);
    let mut best = (Money::zero(), None);
    fn go(g: &GridInstance, present: &[EdgeId], values: &[Money], p: &mut Pricing, best: &mut (Money, Option<Pricing>)) {
        match present.split_first() {
            None => {
                let r = revenue(g, p);
                if best.1.is_none() || r > best.0 {
                    *best = (r, Some(p.clone()));
                }
            }
            Some((e, rest)) => {
                for x in values {
                    p.set(*e, x.clone());
                    go(g, rest, values, p, best);
                }
            }
        }
    }
    go(g, &present, &values, &mut p, &mut best);
    (best.0, best.1.expect("at least one assignment"))
}

/// The price set's values, rebuilt from the definition.
pub fn price_values(b_max: &Money, m: usize, n: usize) -> Vec<Money> {
    if b_max.is_zero() {
        return vec![Money::zero()];
    }
    let mut t = 0u32;
    while (1u64 << t) < 4 * m as u64 * n as u64 {
        t += 1;
    }
    let mut v: Vec<Money> = (0..=t).map(|k| b_max.div_int(1 << k)).collect();
    v.push(Money::zero());
    v
}

/// `k / q` for the largest `k` with `2^k <= x^q`: a rational lower bound on `log2 x`.
pub fn log2_lower(x: u64, q: u32) -> Money {
    assert!(x >= 1);
    let bits = BigUint::from(x).pow(q).bits();
    Money::from_ratio(bits as i64 - 1, q as i64)
}

pub fn random_grid(rng: &mut ChaCha8Rng, w: usize, m: usize, missing: f64) -> GridInstance {
    let mut g = GridInstance::new(w, m).unwrap();
    let edges: Vec<EdgeId> = g.shape().edges().collect();
    for e in edges {
        if rng.gen_bool(missing) {
            g.remove_edge(e).unwrap();
        }
    }
    g
}

pub fn random_vertex(rng: &mut ChaCha8Rng, s: GridShape) -> VertexId {
    VertexId::new(rng.gen_range(0..s.length), rng.gen_range(0..s.width))
}

/// Budget `8 / 2^k` for `k` in `0..=3`.
pub fn pow2_budget(rng: &mut ChaCha8Rng) -> Money {
    Money::from_integer(8 >> rng.gen_range(0..4))
}

/// Random instance with power-of-two budgets.
pub fn random_instance(rng: &mut ChaCha8Rng, w: usize, m: usize, drivers: usize, missing: f64) -> GridInstance {
    let mut g = random_grid(rng, w, m, missing);
    for _ in 0..drivers {
        let (u, v) = (random_vertex(rng, g.shape()), random_vertex(rng, g.shape()));
        let b = pow2_budget(rng);
        g.add_driver(Driver::new(u, v, b)).unwrap();
    }
    g
}

/// Random rationals in `[0, 2 b_max]`, a share below the smallest price, infinity on missing edges.
pub fn random_pricing(rng: &mut ChaCha8Rng, g: &GridInstance, b_max: &Money) -> Pricing {
    let mut p = Pricing::filled(g.shape(), Money::Infinity);
    let tiny = b_max.div_int(64 * (g.length() as u64) * (g.drivers.len().max(1) as u64));
    for e in g.present_edges() {
        let x = match rng.gen_range(0..4) {
            0 => tiny.times(rng.gen_range(0..8)),
            _ => b_max.times(rng.gen_range(0..=64)).div_int(32).div_int(rng.gen_range(1..=3)),
        };
        p.set(e, x);
    }
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    NotLaminar,
    Unbalanced,
    LongLastLevel,
    ExtensionsMeet,
    TooManyLevels,
}

/// Structural checks on the block decomposition of a `width x length` grid.
pub fn decomposition_violations(length: usize, width: usize) -> Vec<(Violation, String)> {
    use gridtoll::decomposition::build_levels;
    let levels = build_levels(length, width);
    let w5 = width.pow(5);
    let ext = w5.div_ceil(4);
    let mut out = Vec::new();
    let first = &levels[0];
    if first.len() != 1 || first[0].start != 0 || first[0].end != length - 1 {
        out.push((Violation::NotLaminar, format!("level 1 is not the whole grid: {first:?}")));
    }
    for (j, level) in levels.iter().enumerate() {
        let lens: Vec<usize> = level.iter().map(|b| b.end + 1 - b.start).collect();
        let (lo, hi) = (lens.iter().min().unwrap(), lens.iter().max().unwrap());
        if hi - lo > 1 {
            out.push((Violation::Unbalanced, format!("level {}: lengths {lo}..{hi}", j + 1)));
        }
        for pair in level.windows(2) {
            if pair[0].end >= pair[1].start {
                out.push((Violation::NotLaminar, format!("level {}: blocks overlap", j + 1)));
            }
        }
        for b in level {
            if !(b.start..=b.end).contains(&b.middle_row) {
                out.push((Violation::NotLaminar, format!("middle row {} outside its block", b.middle_row)));
            }
        }
        let extended = |k: usize| (level[k].start.saturating_sub(ext), (level[k].end + ext).min(length - 1));
        for k in 2..level.len() {
            if extended(k - 2).1 >= extended(k).0 {
                out.push((Violation::ExtensionsMeet, format!("level {}: blocks {} and {k}", j + 1, k - 2)));
            }
        }
        if j > 0 {
            for b in level {
                let parents: Vec<_> = levels[j - 1].iter().filter(|p| p.start <= b.start && b.end <= p.end).collect();
                let overlapping = levels[j - 1].iter().filter(|p| p.start <= b.end && b.start <= p.end).count();
                if parents.len() != 1 || overlapping != 1 {
                    out.push((Violation::NotLaminar, format!("level {}: block {:?} is not nested", j + 1, (b.start, b.end))));
                } else if (b.start..=b.end).contains(&parents[0].middle_row) {
                    out.push((Violation::NotLaminar, format!("level {}: child holds its parent's middle row", j + 1)));
                }
            }
        }
    }
    let longest = levels.last().unwrap().iter().map(|b| b.end + 1 - b.start).max().unwrap();
    if longest > w5 + 1 {
        out.push((Violation::LongLastLevel, format!("last-level block of {longest} rows")));
    }
    let floor_log = usize::BITS as usize - 1 - length.leading_zeros() as usize;
    if levels.len() > floor_log + 1 {
        out.push((Violation::TooManyLevels, format!("{} levels", levels.len())));
    }
    out
}
