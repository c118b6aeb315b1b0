//! Exact optimization of rooted instances over rounded pricings.
//!
//! Every driver of a rooted instance travels to a common root `r` on the top
//! row. The dynamic program sweeps rows bottom-up. A state at row `i` is a pair
//! `(L, U)`: `L` holds the distances among row `i` inside the already-priced
//! part of the grid (row `i` and below) and `U` holds the distances among row
//! `i` and `r` inside the part above row `i` (excluding row `i`'s own edges),
//! which is not priced yet. `U` is an assumption: a transition through the edge
//! set `G_i` between rows `i` and `i + 1` is only allowed if it turns `U` into
//! the assumption `U'` made one row below, so the final pricing realizes every
//! assumption on the chosen path. Knowing both `L` and `U` gives the exact
//! distance from `r` to each vertex of row `i`, which is what drivers there pay.
//!
//! All money is handled in integer multiples of `p_min`; distances above
//! `b_max` are collapsed to infinity since no driver can afford them.

use std::collections::HashMap;

use crate::distmatrix::{
    close_ticks, enumerate_local, local_spec, row_edges, row_vertices, transition_edges, DistanceMatrix, LocalEnumeration,
};
use crate::error::{Error, Result};
use crate::eval::{self, Ticks, INF_TICKS};
use crate::model::{Driver, EdgeId, GridInstance, Pricing, VertexId};
use crate::money::Money;
use crate::rounding::PriceSet;

/// Default cap on dynamic-program table sizes (per row).
pub const DEFAULT_STATE_BUDGET: usize = 4_000_000;

/// Drivers `(v, b)` all travelling between `v` and the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedInstance {
    grid: GridInstance,
    root: VertexId,
    drivers: Vec<(VertexId, Money)>,
}

impl RootedInstance {
    /// The grid's own driver list is ignored.
    pub fn new(grid: GridInstance, root: VertexId, drivers: Vec<(VertexId, Money)>) -> Result<Self> {
        grid.check_vertex(root)?;
        if root.row != 0 {
            return Err(Error::RootNotOnTopRow(root));
        }
        for (v, b) in &drivers {
            grid.check_vertex(*v)?;
            assert!(!b.is_infinite(), "budgets are finite");
        }
        let mut grid = grid;
        grid.drivers.clear();
        Ok(RootedInstance { grid, root, drivers })
    }

    pub fn grid(&self) -> &GridInstance {
        &self.grid
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn drivers(&self) -> &[(VertexId, Money)] {
        &self.drivers
    }

    pub fn b_max(&self) -> Money {
        self.drivers.iter().map(|(_, b)| b.clone()).max().unwrap_or_else(Money::zero)
    }

    /// The same demand as an ordinary instance with drivers `(v, r, b)`.
    pub fn as_instance(&self) -> GridInstance {
        let mut g = self.grid.clone();
        g.drivers = self.drivers.iter().map(|(v, b)| Driver::new(*v, self.root, b.clone())).collect();
        g
    }

    /// Default price set for this instance (its own `b_max`, length and driver count).
    pub fn price_set(&self) -> PriceSet {
        PriceSet::new(&self.b_max(), self.grid.length(), self.drivers.len().max(1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedSolution {
    pub pricing: Pricing,
    pub revenue: Money,
    /// `(L_i, U_i)` used at every row along the optimal backtrace, top to bottom.
    pub trace: Vec<(DistanceMatrix, DistanceMatrix)>,
    /// Largest per-row table encountered.
    pub peak_states: usize,
}

/// Matrices interned by value; ids follow first-insertion order.
#[derive(Default)]
struct Interner {
    items: Vec<Box<[Ticks]>>,
    ids: HashMap<Box<[Ticks]>, u32>,
}

impl Interner {
    fn from_sorted(items: Vec<Box<[Ticks]>>) -> Self {
        let ids = items.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        Interner { items, ids }
    }

    fn intern(&mut self, m: &[Ticks]) -> u32 {
        if let Some(&id) = self.ids.get(m) {
            return id;
        }
        let id = self.items.len() as u32;
        self.items.push(m.into());
        self.ids.insert(m.into(), id);
        id
    }

    fn id(&self, m: &[Ticks]) -> Option<u32> {
        self.ids.get(m).copied()
    }

    fn len(&self) -> usize {
        self.items.len()
    }
}

/// Scratch-buffer matrix products on the fixed local layouts used by the sweep.
struct Products {
    w: usize,
    cap: Ticks,
    buf: Vec<Ticks>,
}

impl Products {
    fn new(w: usize, cap: Ticks) -> Self {
        Products { w, cap, buf: vec![INF_TICKS; (2 * w + 1) * (2 * w + 1)] }
    }

    fn reset(&mut self, n: usize) {
        self.buf[..n * n].fill(INF_TICKS);
        for i in 0..n {
            self.buf[i * n + i] = 0;
        }
    }

    fn merge(&mut self, n: usize, m: &[Ticks], slots: impl Fn(usize) -> usize, k: usize) {
        for i in 0..k {
            for j in 0..k {
                let x = m[i * k + j];
                let cell = &mut self.buf[slots(i) * n + slots(j)];
                if x < *cell {
                    *cell = x;
                }
            }
        }
    }

    /// `U ⊗ W` restricted to `R_{i+1} ∪ {r}`.
    /// Layout: `0..w` row i, `w..2w` row i+1, `2w` root.
    fn upper_step(&mut self, u: &[Ticks], wm: &[Ticks]) -> Vec<Ticks> {
        let w = self.w;
        let n = 2 * w + 1;
        self.reset(n);
        self.merge(n, u, |a| if a < w { a } else { 2 * w }, w + 1);
        self.merge(n, wm, |a| a, 2 * w);
        close_ticks(n, &mut self.buf[..n * n], self.cap);
        let sel = |a: usize| if a < w { w + a } else { 2 * w };
        let mut out = vec![0; (w + 1) * (w + 1)];
        for i in 0..=w {
            for j in 0..=w {
                out[i * (w + 1) + j] = self.buf[sel(i) * n + sel(j)];
            }
        }
        out
    }

    /// `L' ⊗ W` restricted to `R_i`. Layout: `0..w` row i, `w..2w` row i+1.
    fn lower_step(&mut self, l: &[Ticks], wm: &[Ticks]) -> Vec<Ticks> {
        let w = self.w;
        let n = 2 * w;
        self.reset(n);
        self.merge(n, wm, |a| a, 2 * w);
        self.merge(n, l, |a| w + a, w);
        close_ticks(n, &mut self.buf[..n * n], self.cap);
        let mut out = vec![0; w * w];
        for i in 0..w {
            for j in 0..w {
                out[i * w + j] = self.buf[i * n + j];
            }
        }
        out
    }

    /// Distances from the root to row `i` in the whole grid, `(L ⊗ U)_{r, ·}`.
    fn root_distances(&mut self, l: &[Ticks], u: &[Ticks]) -> Vec<Ticks> {
        let w = self.w;
        let n = w + 1;
        self.reset(n);
        self.merge(n, u, |a| a, w + 1);
        self.merge(n, l, |a| a, w);
        close_ticks(n, &mut self.buf[..n * n], self.cap);
        (0..w).map(|c| self.buf[w * n + c]).collect()
    }
}

/// `U_∞` for the top row: the root slot coincides with its own column.
fn top_upper(w: usize, root_col: usize) -> Box<[Ticks]> {
    let n = w + 1;
    let mut m = vec![INF_TICKS; n * n];
    for i in 0..n {
        m[i * n + i] = 0;
    }
    m[w * n + root_col] = 0;
    m[root_col * n + w] = 0;
    m.into_boxed_slice()
}

struct UpperTables {
    sets: Vec<Interner>,
    /// `next[i][u * |W_i| + w]` is the id of `U ⊗ W` in `sets[i + 1]`.
    next: Vec<Vec<u32>>,
}

fn check_budget(size: usize, budget: usize) -> Result<()> {
    if size > budget {
        Err(Error::StateBudgetExceeded { budget })
    } else {
        Ok(())
    }
}

fn transitions(grid: &GridInstance, set: &PriceSet) -> Vec<LocalEnumeration> {
    let w = grid.width();
    (0..grid.length().saturating_sub(1))
        .map(|i| {
            let spec = local_spec(grid, &transition_edges(grid, i));
            enumerate_local(2 * w, &spec, &set.tick_values(), set.cap_ticks())
        })
        .collect()
}

fn upper_tables(grid: &GridInstance, root_col: usize, set: &PriceSet, ws: &[LocalEnumeration], budget: usize) -> Result<UpperTables> {
    let w = grid.width();
    let mut prod = Products::new(w, set.cap_ticks());
    let mut sets = vec![Interner::from_sorted(vec![top_upper(w, root_col)])];
    let mut next = Vec::with_capacity(ws.len());
    for wi in ws {
        let cur = sets.last().expect("non-empty");
        check_budget(cur.len().saturating_mul(wi.matrices.len()), budget)?;
        let mut found: std::collections::HashSet<Box<[Ticks]>> = Default::default();
        for u in &cur.items {
            for wm in &wi.matrices {
                found.insert(prod.upper_step(u, wm).into_boxed_slice());
            }
        }
        check_budget(found.len(), budget)?;
        let mut sorted: Vec<_> = found.into_iter().collect();
        sorted.sort();
        let nxt = Interner::from_sorted(sorted);
        let mut table = Vec::with_capacity(cur.len() * wi.matrices.len());
        for u in &cur.items {
            for wm in &wi.matrices {
                table.push(nxt.id(&prod.upper_step(u, wm)).expect("enumerated above"));
            }
        }
        next.push(table);
        sets.push(nxt);
    }
    Ok(UpperTables { sets, next })
}

fn upper_index(grid: &GridInstance, root: VertexId, row: usize) -> Vec<VertexId> {
    let mut idx = row_vertices(grid.width(), row);
    if row > 0 {
        idx.push(root);
    }
    idx
}

fn upper_to_matrix(grid: &GridInstance, root: VertexId, row: usize, m: &[Ticks], set: &PriceSet) -> DistanceMatrix {
    let w = grid.width();
    if row == 0 {
        // Drop the duplicate root slot.
        let t: Vec<Ticks> = (0..w).flat_map(|i| (0..w).map(move |j| m[i * (w + 1) + j])).collect();
        DistanceMatrix::from_ticks(upper_index(grid, root, 0), &t, set)
    } else {
        DistanceMatrix::from_ticks(upper_index(grid, root, row), m, set)
    }
}

/// The upper matrices that some rounded pricing of the rows above realizes,
/// row by row, starting from `U_∞` on the top row.
pub fn realizable_upper_sets(grid: &GridInstance, root: VertexId, set: &PriceSet, state_budget: usize) -> Result<Vec<Vec<DistanceMatrix>>> {
    grid.check_vertex(root)?;
    if root.row != 0 {
        return Err(Error::RootNotOnTopRow(root));
    }
    let ws = transitions(grid, set);
    let tables = upper_tables(grid, root.col, set, &ws, state_budget)?;
    Ok(tables
        .sets
        .iter()
        .enumerate()
        .map(|(row, s)| s.items.iter().map(|m| upper_to_matrix(grid, root, row, m, set)).collect())
        .collect())
}

#[derive(Clone, Copy)]
struct Entry {
    value: u64,
    /// `(W id, L' id, U' id)` one row below; for the bottom row `W id` is unused.
    back: (u32, u32, u32),
}

/// Maximum rooted revenue over all pricings drawn from `set`, with a pricing
/// achieving it. Missing edges stay at infinity.
pub fn solve_rooted(inst: &RootedInstance, set: &PriceSet, state_budget: usize) -> Result<RootedSolution> {
    let grid = &inst.grid;
    let (w, m) = (grid.width(), grid.length());
    if inst.drivers.iter().any(|(_, b)| b > set.b_max()) {
        return Err(Error::BudgetAboveMax);
    }
    if set.is_degenerate() {
        // Every budget is zero here, so no pricing earns anything.
        let pricing = Pricing::zero(grid);
        let trace = zero_trace(inst, set);
        return Ok(RootedSolution { pricing, revenue: Money::zero(), trace, peak_states: 0 });
    }
    let cap = set.cap_ticks();
    let mut by_row: Vec<Vec<(usize, Ticks)>> = vec![Vec::new(); m];
    for (v, b) in &inst.drivers {
        if *v != inst.root {
            by_row[v.row].push((v.col, set.budget_ticks(b)));
        }
    }

    let ws = transitions(grid, set);
    let uppers = upper_tables(grid, inst.root.col, set, &ws, state_budget)?;
    let mut prod = Products::new(w, cap);
    let mut peak = uppers.sets.iter().map(Interner::len).max().unwrap_or(0);

    let row_revenue = |prod: &mut Products, row: usize, l: &[Ticks], u: &[Ticks]| -> u64 {
        if by_row[row].is_empty() {
            return 0;
        }
        let d = prod.root_distances(l, u);
        by_row[row].iter().map(|&(c, b)| if d[c] != INF_TICKS && d[c] <= b { d[c] } else { 0 }).sum()
    };

    // Bottom row: every feasible single-row lower matrix against every upper matrix.
    let bottom = {
        let spec = local_spec(grid, &row_edges(grid, m - 1));
        enumerate_local(w, &spec, &set.tick_values(), cap)
    };
    let mut lowers: Vec<Interner> = (0..m).map(|_| Interner::default()).collect();
    let mut tables: Vec<HashMap<(u32, u32), Entry>> = (0..m).map(|_| HashMap::new()).collect();
    lowers[m - 1] = Interner::from_sorted(bottom.matrices.clone());
    check_budget(lowers[m - 1].len().saturating_mul(uppers.sets[m - 1].len()), state_budget)?;
    for (uid, u) in uppers.sets[m - 1].items.iter().enumerate() {
        for (lid, l) in bottom.matrices.iter().enumerate() {
            let value = row_revenue(&mut prod, m - 1, l, u);
            tables[m - 1].insert((lid as u32, uid as u32), Entry { value, back: (0, 0, 0) });
        }
    }

    for i in (0..m - 1).rev() {
        let wi = &ws[i];
        let nw = wi.matrices.len();
        // States one row below, grouped by their upper matrix.
        let mut groups: Vec<Vec<(u32, u64)>> = vec![Vec::new(); uppers.sets[i + 1].len()];
        let mut below: Vec<_> = tables[i + 1].iter().map(|(&(l, u), e)| (u, l, e.value)).collect();
        below.sort_unstable();
        for (u, l, v) in below {
            groups[u as usize].push((l, v));
        }
        let mut lower_cache: HashMap<(u32, u32), u32> = HashMap::new();
        let mut rev_cache: HashMap<(u32, u32), u64> = HashMap::new();
        let mut table: HashMap<(u32, u32), Entry> = HashMap::new();
        let (lower_rows, rest) = lowers.split_at_mut(i + 1);
        let (cur_lowers, prev_lowers) = (&mut lower_rows[i], &rest[0]);
        for (uid, u) in uppers.sets[i].items.iter().enumerate() {
            for wid in 0..nw {
                let up_next = uppers.next[i][uid * nw + wid];
                for &(lp, val) in &groups[up_next as usize] {
                    let lid = *lower_cache.entry((lp, wid as u32)).or_insert_with(|| {
                        let l = prod.lower_step(&prev_lowers.items[lp as usize], &wi.matrices[wid]);
                        cur_lowers.intern(&l)
                    });
                    let gain = *rev_cache.entry((lid, uid as u32)).or_insert_with(|| {
                        row_revenue(&mut prod, i, &cur_lowers.items[lid as usize], u)
                    });
                    let value = val + gain;
                    let cand = Entry { value, back: (wid as u32, lp, up_next) };
                    match table.entry((lid, uid as u32)) {
                        std::collections::hash_map::Entry::Occupied(mut o) => {
                            if value > o.get().value {
                                o.insert(cand);
                            }
                        }
                        std::collections::hash_map::Entry::Vacant(v) => {
                            v.insert(cand);
                        }
                    }
                }
            }
            check_budget(table.len(), state_budget)?;
        }
        peak = peak.max(table.len());
        tables[i] = table;
    }

    // Answer: the best lower matrix with the empty upper graph on the top row.
    let (mut state, best) = tables[0]
        .iter()
        .filter(|((_, u), _)| *u == 0)
        .map(|(&k, e)| (k, e.value))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .expect("the top row always has a state");

    let mut pricing = Pricing::zero(grid);
    let mut trace = Vec::with_capacity(m);
    for i in 0..m {
        let (lid, uid) = state;
        trace.push((
            DistanceMatrix::from_ticks(row_vertices(w, i), &lowers[i].items[lid as usize], set),
            upper_to_matrix(grid, inst.root, i, &uppers.sets[i].items[uid as usize], set),
        ));
        let entry = tables[i][&state];
        if i + 1 < m {
            let (wid, lp, up) = entry.back;
            let edges = transition_edges(grid, i);
            for ((e, _, _), t) in edges.iter().zip(&ws[i].witnesses[wid as usize]) {
                pricing.set(*e, set.ticks_to_money(*t));
            }
            state = (lp, up);
        } else {
            let edges = row_edges(grid, i);
            for ((e, _, _), t) in edges.iter().zip(&bottom.witnesses[lid as usize]) {
                pricing.set(*e, set.ticks_to_money(*t));
            }
        }
    }
    for e in grid.missing_edges() {
        pricing.set(*e, Money::Infinity);
    }

    let revenue = set.ticks_to_money(best);
    let check = eval::revenue(&inst.as_instance(), &pricing)?;
    if check != revenue {
        return Err(Error::SelfCheck(format!("dynamic program reported {revenue}, pricing earns {check}")));
    }
    Ok(RootedSolution { pricing, revenue, trace, peak_states: peak })
}

fn zero_trace(inst: &RootedInstance, set: &PriceSet) -> Vec<(DistanceMatrix, DistanceMatrix)> {
    (0..inst.grid.length())
        .map(|i| {
            let low = row_vertices(inst.grid.width(), i);
            let up = upper_index(&inst.grid, inst.root, i);
            let zeros = |n: usize| vec![set.ticks_to_money(0); n * n];
            (DistanceMatrix::new(low.clone(), zeros(low.len())), DistanceMatrix::new(up.clone(), zeros(up.len())))
        })
        .collect()
}

/// Pricing restricted to an edge list, as `(edge, price)` pairs.
pub fn priced_edges(p: &Pricing, edges: &[EdgeId]) -> Vec<(EdgeId, Money)> {
    edges.iter().map(|e| (*e, p.get(*e).clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(r: usize, c: usize) -> VertexId {
        VertexId::new(r, c)
    }

    #[test]
    fn single_edge_full_budget() {
        let g = GridInstance::new(2, 1).unwrap();
        let inst = RootedInstance::new(g, v(0, 0), vec![(v(0, 1), 4u64.into())]).unwrap();
        let sol = solve_rooted(&inst, &inst.price_set(), DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(sol.revenue, 4u64);
        assert_eq!(*sol.pricing.get(EdgeId::h(0, 0)), 4u64);
    }

    #[test]
    fn vertical_edge_full_budget() {
        let g = GridInstance::new(2, 2).unwrap();
        let inst = RootedInstance::new(g, v(0, 0), vec![(v(1, 0), 4u64.into())]).unwrap();
        let sol = solve_rooted(&inst, &inst.price_set(), DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(sol.revenue, 4u64);
    }

    #[test]
    fn root_must_be_on_top_row() {
        let g = GridInstance::new(2, 2).unwrap();
        assert_eq!(RootedInstance::new(g, v(1, 0), vec![]), Err(Error::RootNotOnTopRow(v(1, 0))));
    }

    #[test]
    fn unreachable_drivers_pay_nothing() {
        let g = GridInstance::with_parts(2, 3, (0..2).flat_map(|r| (0..2).map(move |c| EdgeId::v(r, c))), vec![]).unwrap();
        let inst = RootedInstance::new(g, v(0, 0), vec![(v(2, 1), 4u64.into()), (v(1, 0), 2u64.into())]).unwrap();
        let sol = solve_rooted(&inst, &inst.price_set(), DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(sol.revenue, 0u64);
        for e in inst.grid().missing_edges() {
            assert!(sol.pricing.get(*e).is_infinite());
        }
    }

    #[test]
    fn zero_budgets_give_zero() {
        let g = GridInstance::new(2, 2).unwrap();
        let inst = RootedInstance::new(g, v(0, 1), vec![(v(1, 0), Money::zero())]).unwrap();
        let sol = solve_rooted(&inst, &inst.price_set(), DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(sol.revenue, 0u64);
        assert_eq!(sol.trace.len(), 2);
    }

    #[test]
    fn top_row_upper_set_is_infinite_matrix() {
        let g = GridInstance::new(2, 2).unwrap();
        let set = PriceSet::new(&1u64.into(), 1, 1);
        let sets = realizable_upper_sets(&g, v(0, 0), &set, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(sets[0], vec![DistanceMatrix::infinite(row_vertices(2, 0))]);
        assert!(sets[1].len() <= 4usize.pow(3));
    }

    #[test]
    fn budget_knob_is_enforced() {
        let g = GridInstance::new(2, 3).unwrap();
        let inst = RootedInstance::new(g, v(0, 0), vec![(v(2, 1), 8u64.into())]).unwrap();
        let err = solve_rooted(&inst, &inst.price_set(), 10).unwrap_err();
        assert_eq!(err, Error::StateBudgetExceeded { budget: 10 });
    }
}
