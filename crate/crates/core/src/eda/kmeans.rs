use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::CellIndex;
use crate::planner::{HeuristicInfo, DEFAULT_DEVIATION_TOLERANCE};
use crate::risk::RiskMap;

const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centroids: Vec<[f64; 3]>,
    pub assignments: Vec<usize>,
    /// Within-cluster sum of squares after each assignment step.
    pub inertia: Vec<f64>,
    pub iterations: usize,
}

fn sq_dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

/// Lloyd's algorithm with k-means++ seeding. `k` is reduced to the number of
/// distinct points. Stops when assignments no longer change or after 100
/// refinement rounds. An empty cluster keeps its previous centroid.
pub fn kmeans<R: Rng + ?Sized>(points: &[[f64; 3]], k: usize, rng: &mut R) -> Result<KMeansResult> {
    if points.is_empty() {
        return Err(Error::EmptyOpenSet);
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    let mut distinct: Vec<[f64; 3]> = points.to_vec();
    distinct.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])).then(a[2].total_cmp(&b[2])));
    distinct.dedup();
    let k = k.min(distinct.len());

    let mut centroids = vec![points[rng.random_range(0..points.len())]];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(*p, centroids[0])).collect();
    while centroids.len() < k {
        // Points already chosen have weight zero, so a new distinct point is
        // always drawn while fewer than `distinct.len()` centers exist.
        let pick = WeightedIndex::new(&d2).map_err(|e| Error::DegenerateGroup(e.to_string()))?;
        let c = points[pick.sample(rng)];
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(*p, c));
        }
        centroids.push(c);
    }

    let mut assignments = vec![usize::MAX; points.len()];
    let mut inertia = Vec::new();
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut changed = false;
        let mut sse = 0.0;
        for (a, p) in assignments.iter_mut().zip(points) {
            let (best, d) = centroids
                .iter()
                .enumerate()
                .map(|(j, c)| (j, sq_dist(*p, *c)))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            if *a != best {
                *a = best;
                changed = true;
            }
            sse += d;
        }
        inertia.push(sse);
        if !changed {
            break;
        }
        let mut sums = vec![[0.0; 3]; k];
        let mut counts = vec![0usize; k];
        for (a, p) in assignments.iter().zip(points) {
            for i in 0..3 {
                sums[*a][i] += p[i];
            }
            counts[*a] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                let n = counts[j] as f64;
                centroids[j] = [sums[j][0] / n, sums[j][1] / n, sums[j][2] / n];
            }
        }
    }
    Ok(KMeansResult {
        centroids,
        assignments,
        inertia,
        iterations,
    })
}

/// Clusters the open points (in cell coordinates) and turns the result into
/// search guidance: a track from origin through the centroids, ordered by
/// their projection on the origin-destination axis, to the destination; and
/// a heuristic factor equal to the smaller of the mean cost over all open
/// points and the mean cost over the open points nearest each centroid.
pub fn kmeans_heuristic<R: Rng + ?Sized>(
    open_points: &[CellIndex],
    map: &RiskMap,
    k: usize,
    origin: CellIndex,
    destination: CellIndex,
    rng: &mut R,
) -> Result<HeuristicInfo> {
    let spec = *map.spec();
    let coords: Vec<[f64; 3]> = open_points.iter().map(|c| [c.x as f64, c.y as f64, c.z as f64]).collect();
    let result = kmeans(&coords, k, rng)?;

    let costs: Vec<f64> = open_points.iter().map(|c| map.total(*c)).filter(|c| c.is_finite()).collect();
    if costs.is_empty() {
        return Err(Error::EmptyOpenSet);
    }
    let mean_open = costs.iter().sum::<f64>() / costs.len() as f64;

    let mut near_sum = 0.0;
    let mut near_n = 0usize;
    for c in &result.centroids {
        let nearest = open_points
            .iter()
            .zip(&coords)
            .filter(|(p, _)| map.total(**p).is_finite())
            .min_by(|a, b| sq_dist(*a.1, *c).total_cmp(&sq_dist(*b.1, *c)))
            .map(|(p, _)| *p);
        if let Some(p) = nearest {
            near_sum += map.total(p);
            near_n += 1;
        }
    }
    let mean_near = near_sum / near_n as f64;

    let o = [origin.x as f64, origin.y as f64, origin.z as f64];
    let d = [destination.x as f64, destination.y as f64, destination.z as f64];
    let axis = [d[0] - o[0], d[1] - o[1], d[2] - o[2]];
    let project = |p: &[f64; 3]| (p[0] - o[0]) * axis[0] + (p[1] - o[1]) * axis[1] + (p[2] - o[2]) * axis[2];
    let mut ordered = result.centroids.clone();
    ordered.sort_by(|a, b| project(a).total_cmp(&project(b)));

    let to_world = |p: [f64; 3]| {
        [
            spec.ground_origin[0] + (p[0] + 0.5) * spec.unit_m[0],
            spec.ground_origin[1] + (p[1] + 0.5) * spec.unit_m[1],
            spec.ground_origin[2] + (p[2] + 0.5) * spec.unit_m[2],
        ]
    };
    let mut track = Vec::with_capacity(ordered.len() + 2);
    track.push(spec.centroid(origin));
    track.extend(ordered.into_iter().map(to_world));
    track.push(spec.centroid(destination));

    Ok(HeuristicInfo {
        heuristic_factor: mean_open.min(mean_near),
        centroid_track: track,
        deviation_tolerance: DEFAULT_DEVIATION_TOLERANCE,
        deviation_mode: Default::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, OccupancyGrid};
    use proptest::prelude::{prop_assert, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_cluster_is_the_mean() {
        let pts = [[0.0, 0.0, 0.0], [2.0, 4.0, 1.0], [4.0, 2.0, 2.0]];
        let r = kmeans(&pts, 1, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(r.centroids, vec![[2.0, 2.0, 1.0]]);
    }

    #[test]
    fn identical_points_collapse() {
        let pts = [[3.0, 1.0, 0.0]; 6];
        let r = kmeans(&pts, 4, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(r.centroids, vec![[3.0, 1.0, 0.0]]);
        assert_eq!(*r.inertia.last().unwrap(), 0.0);
        assert!(matches!(kmeans(&[], 2, &mut ChaCha8Rng::seed_from_u64(0)), Err(Error::EmptyOpenSet)));
    }

    #[test]
    fn separated_blobs_are_found() {
        let mut pts = Vec::new();
        for i in 0..5 {
            pts.push([i as f64 * 0.1, 0.0, 0.0]);
            pts.push([50.0 + i as f64 * 0.1, 50.0, 0.0]);
        }
        let r = kmeans(&pts, 2, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let mut xs: Vec<f64> = r.centroids.iter().map(|c| c[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] - 0.2).abs() < 1e-12 && (xs[1] - 50.2).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn inertia_never_increases(seed in 0u64..200, n in 5usize..60, k in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<[f64; 3]> = (0..n)
                .map(|_| [rng.random_range(0..20) as f64, rng.random_range(0..20) as f64, rng.random_range(0..4) as f64])
                .collect();
            let r = kmeans(&pts, k, &mut rng).unwrap();
            for w in r.inertia.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0));
            }
        }
    }

    #[test]
    fn factor_takes_the_minimum() {
        // Open points cost 0.2 and 0.6 alternately; one cluster centered
        // between them picks the nearest point.
        let spec = GridSpec::new(3, 1, 1, [100.0, 100.0, 30.0]).unwrap();
        let map = RiskMap::from_total_costs(OccupancyGrid::empty(spec), vec![0.2, 0.6, 0.4]).unwrap();
        let o = CellIndex::new(0, 0, 0);
        let d = CellIndex::new(2, 0, 0);
        let open = [o, CellIndex::new(1, 0, 0), d];
        let info = kmeans_heuristic(&open, &map, 1, o, d, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        // Mean open cost 0.4, nearest-to-centroid cell costs 0.6.
        assert!((info.heuristic_factor - 0.4).abs() < 1e-15);
        assert_eq!(info.centroid_track.len(), 3);
        assert_eq!(info.centroid_track[1], spec.centroid(CellIndex::new(1, 0, 0)));
        info.validate(&spec, o, d).unwrap();
    }

    #[test]
    fn track_follows_od_axis() {
        let spec = GridSpec::new(30, 30, 1, [100.0, 100.0, 30.0]).unwrap();
        let map = RiskMap::uniform(OccupancyGrid::empty(spec), 0.1).unwrap();
        let o = CellIndex::new(0, 0, 0);
        let d = CellIndex::new(29, 29, 0);
        let open: Vec<CellIndex> = (0..30).flat_map(|x| (0..30).map(move |y| CellIndex::new(x, y, 0))).collect();
        let info = kmeans_heuristic(&open, &map, 5, o, d, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let proj: Vec<f64> = info.centroid_track.iter().map(|p| p[0] + p[1]).collect();
        assert!(proj.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(info.centroid_track.len(), 7);
    }
}
