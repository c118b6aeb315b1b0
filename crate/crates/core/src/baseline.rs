//! One price on every edge, chosen from the budget-per-hop ratios of the drivers.

use std::collections::{BTreeMap, VecDeque};

use crate::model::{GridInstance, Pricing, VertexId};
use crate::money::Money;

/// Hop distances over present edges, computed from each distinct driver source.
#[derive(Clone, Debug, Default)]
pub struct HopTable {
    from: BTreeMap<usize, Vec<Option<u64>>>,
    width: usize,
}

impl HopTable {
    pub fn for_drivers(instance: &GridInstance) -> HopTable {
        let s = instance.shape();
        let adj = instance.adjacency();
        let mut from = BTreeMap::new();
        for d in &instance.drivers {
            from.entry(s.vertex_index(d.u)).or_insert_with(|| bfs(&adj, s.vertex_index(d.u)));
        }
        HopTable { from, width: instance.width() }
    }

    /// Hops between `u` (a driver source) and `v`; `None` if unreachable.
    pub fn hops(&self, u: VertexId, v: VertexId) -> Option<u64> {
        let idx = |x: VertexId| x.row * self.width + x.col;
        self.from.get(&idx(u)).and_then(|d| d[idx(v)])
    }
}

fn bfs(adj: &[Vec<(usize, usize)>], src: usize) -> Vec<Option<u64>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].expect("queued vertices are reached");
        for &(_, w) in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SinglePrice {
    pub price: Money,
    pub revenue: Money,
}

impl SinglePrice {
    /// The price on every present edge; missing edges at infinity.
    pub fn pricing(&self, instance: &GridInstance) -> Pricing {
        Pricing::uniform(instance, self.price.clone())
    }
}

/// Revenue-maximizing uniform price among `{b / hop(u, v)}`, ties toward the larger price.
pub fn best_single_price(instance: &GridInstance) -> SinglePrice {
    let hops = HopTable::for_drivers(instance);
    let demand: Vec<(u64, &Money)> = instance
        .drivers
        .iter()
        .filter_map(|d| hops.hops(d.u, d.v).filter(|h| *h >= 1).map(|h| (h, &d.budget)))
        .collect();
    let mut candidates: Vec<Money> = demand.iter().map(|(h, b)| b.div_int(*h)).collect();
    candidates.sort();
    candidates.dedup();
    let mut best = SinglePrice { price: Money::zero(), revenue: Money::zero() };
    for p in candidates.into_iter().rev() {
        let revenue: Money = demand.iter().map(|(h, b)| (p.times(*h), *b)).filter(|(c, b)| c <= *b).map(|(c, _)| c).sum();
        if revenue > best.revenue {
            best = SinglePrice { price: p, revenue };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Driver;

    fn v(r: usize, c: usize) -> VertexId {
        VertexId::new(r, c)
    }

    #[test]
    fn one_driver_three_hops() {
        let mut g = GridInstance::new(2, 3).unwrap();
        g.add_driver(Driver::new(v(0, 0), v(2, 1), 6u64.into())).unwrap();
        let s = best_single_price(&g);
        assert_eq!(s.price, 2u64);
        assert_eq!(s.revenue, 6u64);
        assert_eq!(crate::eval::revenue(&g, &s.pricing(&g)).unwrap(), 6u64);
    }

    #[test]
    fn two_candidates() {
        let mut g = GridInstance::new(2, 1).unwrap();
        g.add_driver(Driver::new(v(0, 0), v(0, 1), 4u64.into())).unwrap();
        g.add_driver(Driver::new(v(0, 1), v(0, 0), 1u64.into())).unwrap();
        let s = best_single_price(&g);
        assert_eq!((s.price, s.revenue), (4u64.into(), 4u64.into()));
    }

    #[test]
    fn nothing_to_sell() {
        let mut g = GridInstance::new(1, 1).unwrap();
        g.add_driver(Driver::new(v(0, 0), v(0, 0), 4u64.into())).unwrap();
        assert_eq!(best_single_price(&g), SinglePrice { price: Money::zero(), revenue: Money::zero() });
    }

    #[test]
    fn ties_prefer_larger_price() {
        let mut g = GridInstance::new(2, 1).unwrap();
        g.add_driver(Driver::new(v(0, 0), v(0, 1), 2u64.into())).unwrap();
        g.add_driver(Driver::new(v(0, 0), v(0, 1), 1u64.into())).unwrap();
        // Both p = 2 and p = 1 earn 2.
        assert_eq!(best_single_price(&g), SinglePrice { price: 2u64.into(), revenue: 2u64.into() });
    }
}
