use gridtoll::compression::{compress_grid, depth_bound, first_row_distances, reroute_shortest_paths, WeightedGraph};
use gridtoll::model::{GridShape, Pricing, VertexId};
use gridtoll::money::Money;
use gridtoll::rounding::PriceSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Weights drawn from a price set, with a fraction of edges absent.
fn random_weights(rng: &mut ChaCha8Rng, w: usize, m: usize, missing: f64) -> Pricing {
    let shape = GridShape::new(w, m).unwrap();
    let set = PriceSet::new(&8u64.into(), m, 4);
    let mut p = Pricing::filled(shape, Money::zero());
    for e in shape.edges() {
        let x = if rng.gen_bool(missing) { Money::Infinity } else { set.values()[rng.gen_range(0..set.values().len())].clone() };
        p.set(e, x);
    }
    p
}

fn binom2(n: usize) -> usize {
    n * (n - 1) / 2
}

#[test]
fn compression_keeps_first_row_distances() {
    for w in [2usize, 3] {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed * 31 + w as u64);
            let m = rng.gen_range(1..=200);
            let p = random_weights(&mut rng, w, m, if seed % 3 == 0 { 0.3 } else { 0.0 });
            let c = compress_grid(&p).unwrap_or_else(|e| panic!("w={w} seed={seed}: {e}"));
            assert_eq!(c.grid.shape().width, w);
            assert!(c.grid.shape().length <= depth_bound(w));
            assert_eq!(first_row_distances(&c.grid), first_row_distances(&p), "w={w} seed={seed} m={m}");
        }
    }
}

#[test]
fn rerouted_paths_are_shortest_with_few_crossings() {
    for w in [2usize, 3, 4] {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000 * w as u64);
            let m = rng.gen_range(1..=40);
            let p = random_weights(&mut rng, w, m, 0.1);
            let g = WeightedGraph::from_grid(&p);
            let s = p.shape();
            let terms: Vec<usize> = (0..w).map(|c| s.vertex_index(VertexId::new(0, c))).collect();
            let coll = reroute_shortest_paths(&g, &terms).unwrap();
            for ((a, b), path) in coll.pairs.iter().zip(&coll.paths) {
                assert_eq!(g.path_weight(path), g.distances(*a)[*b]);
            }
            for (k, n) in coll.crossings_history.iter().enumerate() {
                assert!(*n <= (k + 1) * k);
            }
            let bound = binom2(w) * (binom2(w).saturating_sub(1));
            assert!(coll.crossing_set().len() <= bound);
        }
    }
}
