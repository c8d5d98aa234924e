mod common;

use std::time::Instant;

use airrisk::planner::{dijkstra_risk, risk_a_star, validate_path, HeuristicInfo};
use airrisk::Error;
use common::{corners, dyadic_map, enumerate_min_cost};

#[test]
fn pruned_enumeration_agrees_with_full_enumeration() {
    for seed in 0..12 {
        let dims = [[4, 4, 1], [4, 3, 1], [2, 3, 2]][seed as usize % 3];
        let map = dyadic_map(seed, dims, 0.15);
        let (o, d) = corners(map.spec());
        let (full, n_full) = enumerate_min_cost(&map, o, d, false);
        let (pruned, n_pruned) = enumerate_min_cost(&map, o, d, true);
        assert_eq!(full, pruned, "seed {seed}");
        assert!(n_pruned <= n_full);
    }
}

#[test]
fn dijkstra_matches_enumeration_on_small_maps() {
    let start = Instant::now();
    for seed in 0..50u64 {
        let dims = [3 + (seed % 3) as usize, 3 + (seed / 3 % 3) as usize, 1 + (seed % 2) as usize];
        let map = dyadic_map(1000 + seed, dims, 0.2);
        let (o, d) = corners(map.spec());
        let (oracle, _) = enumerate_min_cost(&map, o, d, true);
        match (oracle, dijkstra_risk(&map, o, d)) {
            (Some(c), Ok(p)) => {
                assert_eq!(p.total_risk_cost, c, "seed {seed}");
                assert_eq!(validate_path(&p.vertices, map.spec(), map.occupancy()), Ok(()));
                let a = risk_a_star(&map, o, d, &HeuristicInfo::none()).unwrap();
                assert_eq!(a.total_risk_cost, c, "seed {seed}");
            }
            (None, Err(Error::NoPath { .. })) => {}
            (o, r) => panic!("seed {seed}: oracle {o:?}, dijkstra {r:?}"),
        }
    }
    assert!(start.elapsed().as_secs() < 60);
}
