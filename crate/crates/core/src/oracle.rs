//! Exhaustive search over rounded pricings, for instances small enough to enumerate.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{PathWeight, Ticks, INF_TICKS};
use crate::model::{GridInstance, Pricing};
use crate::money::{common_denominator, to_u64_checked, Money};
use crate::rooted::RootedInstance;
use crate::rounding::PriceSet;

/// Largest number of present edges enumerated unless the caller raises it.
pub const DEFAULT_EDGE_GUARD: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleSolution {
    pub pricing: Pricing,
    pub revenue: Money,
}

/// Best pricing whose present-edge prices all come from `set`.
///
/// Among maximizers the lexicographically smallest pricing (present edges in
/// index order, smaller prices first) is returned.
pub fn brute_force_opt(instance: &GridInstance, set: &PriceSet, edge_guard: usize) -> Result<OracleSolution> {
    brute_force_over(instance, set.values(), edge_guard)
}

/// [`brute_force_opt`] restricted to the drivers of a rooted instance.
pub fn brute_force_rooted(inst: &RootedInstance, set: &PriceSet, edge_guard: usize) -> Result<OracleSolution> {
    brute_force_opt(&inst.as_instance(), set, edge_guard)
}

/// Exhaustive search with an arbitrary finite list of candidate prices.
pub fn brute_force_over(instance: &GridInstance, values: &[Money], edge_guard: usize) -> Result<OracleSolution> {
    let present: Vec<usize> = {
        let s = instance.shape();
        instance.present_edges().map(|e| s.edge_index(e)).collect()
    };
    if present.len() > edge_guard {
        return Err(Error::GuardExceeded { edges: present.len(), guard: edge_guard });
    }
    let mut values: Vec<Money> = values.to_vec();
    assert!(values.iter().all(|v| !v.is_infinite()), "candidate prices must be finite");
    values.sort();
    values.dedup();
    if values.is_empty() {
        values.push(Money::zero());
    }

    let scale = Scale::new(instance, &values);
    let problem = Problem::new(instance, &present, &scale);
    let ticks: Vec<Ticks> = values.iter().map(|v| scale.ticks(v)).collect();

    let radix = values.len() as u128;
    let total = radix.pow(present.len() as u32);
    let chunks = (rayon::current_num_threads() as u128 * 8).min(total).max(1);
    let step = total.div_ceil(chunks);
    let (best_rev, best_code) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * step;
            let hi = (lo + step).min(total);
            problem.best_in(lo, hi, &ticks)
        })
        .reduce(|| (0, u128::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });

    let mut pricing = Pricing::zero(instance);
    let code = if best_code == u128::MAX { 0 } else { best_code };
    for (k, d) in digits(code, radix, present.len()).into_iter().enumerate() {
        pricing.set(instance.shape().edge_at(present[k]), values[d].clone());
    }
    let revenue = scale.money(best_rev);
    debug_assert_eq!(crate::eval::revenue(instance, &pricing).ok(), Some(revenue.clone()));
    Ok(OracleSolution { pricing, revenue })
}

/// Mixed-radix digits of `code`, most significant first.
fn digits(mut code: u128, radix: u128, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = (code % radix) as usize;
        code /= radix;
    }
    out
}

/// Common integer scale for candidate prices and budgets.
struct Scale {
    den: BigInt,
}

impl Scale {
    fn new(instance: &GridInstance, values: &[Money]) -> Scale {
        let den = common_denominator(values.iter().chain(instance.drivers.iter().map(|d| &d.budget)));
        Scale { den }
    }

    fn ticks(&self, m: &Money) -> Ticks {
        let r = m.as_rational().expect("finite") * BigRational::from_integer(self.den.clone());
        to_u64_checked(&r.to_integer()).filter(|t| *t < 1 << 48).expect("prices too fine-grained for exhaustive search")
    }

    fn money(&self, t: u64) -> Money {
        Money::from_rational(BigRational::new(BigInt::from(t), self.den.clone()))
    }
}

/// The instance flattened for fast repeated evaluation.
struct Problem {
    n: usize,
    /// Free edges `(a, b)` in enumeration order.
    edges: Vec<(usize, usize)>,
    /// `(source, [(target, budget)])`, skipping `u = v` drivers.
    demand: Vec<(usize, Vec<(usize, Ticks)>)>,
}

impl Problem {
    fn new(instance: &GridInstance, present: &[usize], scale: &Scale) -> Problem {
        let s = instance.shape();
        let edges = present
            .iter()
            .map(|&i| {
                let (a, b) = s.edge_at(i).endpoints();
                (s.vertex_index(a), s.vertex_index(b))
            })
            .collect();
        let mut demand: Vec<(usize, Vec<(usize, Ticks)>)> = Vec::new();
        for d in &instance.drivers {
            if d.u == d.v {
                continue;
            }
            let (src, dst) = (s.vertex_index(d.u), s.vertex_index(d.v));
            let b = scale.ticks(&d.budget);
            match demand.iter_mut().find(|(x, _)| *x == src) {
                Some((_, t)) => t.push((dst, b)),
                None => demand.push((src, vec![(dst, b)])),
            }
        }
        Problem { n: s.num_vertices(), edges, demand }
    }

    /// First maximizer among codes `lo..hi`.
    fn best_in(&self, lo: u128, hi: u128, values: &[Ticks]) -> (u64, u128) {
        let radix = values.len() as u128;
        let mut digits = digits(lo, radix, self.edges.len());
        let mut best = (0u64, u128::MAX);
        let mut adj = vec![Vec::new(); self.n];
        let mut dist = vec![INF_TICKS; self.n];
        let mut done = vec![false; self.n];
        for code in lo..hi {
            for a in adj.iter_mut() {
                a.clear();
            }
            for (k, &(a, b)) in self.edges.iter().enumerate() {
                let w = values[digits[k]];
                adj[a].push((b, w));
                adj[b].push((a, w));
            }
            let rev = self.revenue(&adj, &mut dist, &mut done);
            if rev > best.0 || best.1 == u128::MAX {
                best = (rev, code);
            }
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if (digits[k] as u128) < radix {
                    break;
                }
                digits[k] = 0;
            }
        }
        best
    }

    fn revenue(&self, adj: &[Vec<(usize, Ticks)>], dist: &mut [Ticks], done: &mut [bool]) -> u64 {
        let mut total = 0;
        for (src, targets) in &self.demand {
            dist.fill(INF_TICKS);
            done.fill(false);
            dist[*src] = 0;
            // Array Dijkstra: the graphs here have a handful of vertices.
            loop {
                let mut v = usize::MAX;
                for i in 0..self.n {
                    if !done[i] && dist[i] != INF_TICKS && (v == usize::MAX || dist[i] < dist[v]) {
                        v = i;
                    }
                }
                if v == usize::MAX {
                    break;
                }
                done[v] = true;
                for &(w, c) in &adj[v] {
                    let nd = dist[v].plus(&c);
                    if nd < dist[w] {
                        dist[w] = nd;
                    }
                }
            }
            for &(dst, b) in targets {
                if dist[dst] <= b {
                    total += dist[dst];
                }
            }
        }
        total
    }
}
