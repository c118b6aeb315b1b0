//! Shortest-path costs and revenue under a pricing.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::model::{GridInstance, Pricing, VertexId};
use crate::money::Money;

/// Non-negative path weights with an absorbing infinity.
pub trait PathWeight: Clone + Ord {
    fn zero() -> Self;
    fn infinity() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn is_inf(&self) -> bool;
}

impl PathWeight for Money {
    fn zero() -> Self {
        Money::zero()
    }
    fn infinity() -> Self {
        Money::Infinity
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn is_inf(&self) -> bool {
        self.is_infinite()
    }
}

/// Integer multiples of a fixed unit; `u64::MAX` is infinity.
pub type Ticks = u64;

pub const INF_TICKS: Ticks = u64::MAX;

impl PathWeight for Ticks {
    fn zero() -> Self {
        0
    }
    fn infinity() -> Self {
        INF_TICKS
    }
    fn plus(&self, other: &Self) -> Self {
        if *self == INF_TICKS || *other == INF_TICKS {
            INF_TICKS
        } else {
            self.saturating_add(*other).min(INF_TICKS - 1)
        }
    }
    fn is_inf(&self) -> bool {
        *self == INF_TICKS
    }
}

/// Single-source Dijkstra over an adjacency list with per-edge weights.
pub fn dijkstra<W: PathWeight>(adj: &[Vec<(usize, usize)>], weights: &[W], src: usize) -> Vec<W> {
    let mut dist = vec![W::infinity(); adj.len()];
    let mut heap = BinaryHeap::new();
    dist[src] = W::zero();
    heap.push(Reverse((W::zero(), src)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(e, w) in &adj[v] {
            if weights[e].is_inf() {
                continue;
            }
            let nd = d.plus(&weights[e]);
            if nd < dist[w] {
                dist[w] = nd.clone();
                heap.push(Reverse((nd, w)));
            }
        }
    }
    dist
}

/// Dijkstra that also returns a predecessor `(edge, vertex)` for every reached vertex.
///
/// Among equal-cost relaxations the first one found wins, so the tree is
/// deterministic for a fixed adjacency order.
pub fn dijkstra_tree<W: PathWeight>(
    adj: &[Vec<(usize, usize)>],
    weights: &[W],
    src: usize,
) -> (Vec<W>, Vec<Option<(usize, usize)>>) {
    let mut dist = vec![W::infinity(); adj.len()];
    let mut pred = vec![None; adj.len()];
    let mut done = vec![false; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[src] = W::zero();
    heap.push(Reverse((W::zero(), src)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v] || d > dist[v] {
            continue;
        }
        done[v] = true;
        for &(e, w) in &adj[v] {
            if weights[e].is_inf() || done[w] {
                continue;
            }
            let nd = d.plus(&weights[e]);
            if nd < dist[w] {
                dist[w] = nd.clone();
                pred[w] = Some((e, v));
                heap.push(Reverse((nd, w)));
            }
        }
    }
    (dist, pred)
}

/// Cheapest `u`–`v` cost; `Infinity` when no finite path exists.
pub fn shortest_path_cost(instance: &GridInstance, pricing: &Pricing, u: VertexId, v: VertexId) -> Result<Money> {
    instance.check_vertex(u)?;
    instance.check_vertex(v)?;
    pricing.validate(instance)?;
    if u == v {
        return Ok(Money::zero());
    }
    let s = instance.shape();
    let dist = dijkstra(&instance.adjacency(), pricing.as_slice(), s.vertex_index(u));
    Ok(dist[s.vertex_index(v)].clone())
}

/// Per-driver payments: the cheapest path cost when it is within budget, else zero.
pub fn payments(instance: &GridInstance, pricing: &Pricing) -> Result<Vec<Money>> {
    pricing.validate(instance)?;
    let s = instance.shape();
    let adj = instance.adjacency();
    let mut by_source: std::collections::BTreeMap<usize, Vec<Money>> = Default::default();
    let mut out = Vec::with_capacity(instance.drivers.len());
    for d in &instance.drivers {
        if d.u == d.v {
            out.push(Money::zero());
            continue;
        }
        let src = s.vertex_index(d.u);
        let dist = by_source.entry(src).or_insert_with(|| dijkstra(&adj, pricing.as_slice(), src));
        let cost = &dist[s.vertex_index(d.v)];
        out.push(if *cost <= d.budget { cost.clone() } else { Money::zero() });
    }
    Ok(out)
}

/// Total revenue collected from all drivers of `instance`.
pub fn revenue(instance: &GridInstance, pricing: &Pricing) -> Result<Money> {
    Ok(payments(instance, pricing)?.into_iter().sum())
}
