use gridtoll::model::{EdgeId, GridInstance, VertexId};
use gridtoll::money::Money;
use gridtoll::oracle::{brute_force_rooted, DEFAULT_EDGE_GUARD};
use gridtoll::rooted::{realizable_upper_sets, solve_rooted, RootedInstance, DEFAULT_STATE_BUDGET};
use gridtoll::rounding::PriceSet;
use gridtoll::eval;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rooted(rng: &mut ChaCha8Rng, w: usize, m: usize, missing_rate: f64) -> RootedInstance {
    let mut g = GridInstance::new(w, m).unwrap();
    let edges: Vec<EdgeId> = g.shape().edges().collect();
    for e in edges {
        if rng.gen_bool(missing_rate) {
            g.remove_edge(e).unwrap();
        }
    }
    let root = VertexId::new(0, rng.gen_range(0..w));
    let n = rng.gen_range(1..=3);
    let drivers = (0..n)
        .map(|_| {
            let v = VertexId::new(rng.gen_range(0..m), rng.gen_range(0..w));
            (v, Money::from(1u64 << rng.gen_range(0..4)))
        })
        .collect();
    RootedInstance::new(g, root, drivers).unwrap()
}

#[test]
fn matches_oracle_on_small_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..120 {
        let m = 1 + case % 3;
        let inst = random_rooted(&mut rng, 2, m, if case % 4 == 3 { 0.2 } else { 0.0 });
        let set = inst.price_set();
        let dp = solve_rooted(&inst, &set, DEFAULT_STATE_BUDGET).unwrap();
        let brute = brute_force_rooted(&inst, &set, DEFAULT_EDGE_GUARD).unwrap();
        assert_eq!(dp.revenue, brute.revenue, "case {case}: {inst:?}");
        assert_eq!(eval::revenue(&inst.as_instance(), &dp.pricing).unwrap(), dp.revenue);
        for (e, p) in dp.pricing.iter() {
            if inst.grid().is_present(e) {
                assert!(set.ticks_of(p).is_some() && !p.is_infinite(), "{e} priced {p}");
            } else {
                assert!(p.is_infinite());
            }
        }
    }
}

#[test]
fn width_three_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let inst = random_rooted(&mut rng, 3, 2, 0.15);
        if inst.grid().num_present_edges() > 7 {
            continue;
        }
        let set = inst.price_set();
        let dp = solve_rooted(&inst, &set, DEFAULT_STATE_BUDGET).unwrap();
        let brute = brute_force_rooted(&inst, &set, 8).unwrap();
        assert_eq!(dp.revenue, brute.revenue);
    }
}

#[test]
fn upper_sets_start_infinite_and_stay_bounded() {
    let g = GridInstance::new(2, 2).unwrap();
    let root = VertexId::new(0, 0);
    let set = PriceSet::new(&1u64.into(), 1, 1);
    let sets = realizable_upper_sets(&g, root, &set, DEFAULT_STATE_BUDGET).unwrap();
    assert_eq!(sets[0].len(), 1);
    assert!(sets[0][0].entries().iter().enumerate().all(|(k, x)| (k % 3 == 0) == !x.is_infinite()));
    assert!(sets[1].len() <= 4usize.pow(3));
}
