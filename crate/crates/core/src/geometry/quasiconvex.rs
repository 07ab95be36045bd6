use petgraph::algo::{astar, connected_components, dijkstra};
use petgraph::graph::{NodeIndex, UnGraph};
use petgraph::unionfind::UnionFind;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::cloud::Point;
use crate::geometry::domain::SpatialDomain;

/// Estimated quasi-convexity constant of a sampled domain.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiConvexity {
    /// `max graph-distance / Euclidean distance`, at least 1.
    pub k_hat: f64,
    /// Pair attaining `k_hat` (cloud indices), if any pair was sampled.
    pub worst_pair: Option<(usize, usize)>,
    pub pairs_sampled: usize,
}

fn graph(domain: &SpatialDomain) -> Result<UnGraph<(), f64>> {
    let edges = domain
        .edges()
        .ok_or_else(|| Error::Config("domain has no adjacency graph".into()))?;
    let cloud = domain.cloud();
    let mut g = UnGraph::<(), f64>::with_capacity(cloud.len(), edges.len());
    for _ in 0..cloud.len() {
        g.add_node(());
    }
    for &(i, j) in edges {
        g.add_edge(NodeIndex::new(i), NodeIndex::new(j), cloud.distance(i, j));
    }
    if connected_components(&g) > 1 {
        let mut uf = UnionFind::<usize>::new(cloud.len());
        for &(i, j) in edges {
            uf.union(i, j);
        }
        let labels = uf.into_labeling();
        let mut components: Vec<Vec<usize>> = Vec::new();
        let mut seen = std::collections::BTreeMap::new();
        for (i, l) in labels.into_iter().enumerate() {
            let slot = *seen.entry(l).or_insert_with(|| {
                components.push(Vec::new());
                components.len() - 1
            });
            components[slot].push(i);
        }
        let summary = components
            .iter()
            .map(|c| {
                let shown: Vec<String> = c.iter().take(4).map(|i| i.to_string()).collect();
                let more = if c.len() > 4 { ", …" } else { "" };
                format!("{} points {{{}{}}}", c.len(), shown.join(", "), more)
            })
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::Disconnected {
            count: components.len(),
            components: summary,
        });
    }
    Ok(g)
}

/// `K̂ = max graph-distance / Euclidean distance` over pairs from sampled
/// sources: `pair_budget` pairs are covered by running Dijkstra from
/// `⌈pair_budget / (N − 1)⌉` random sources against every target.
///
/// The graph metric dominates the continuum geodesic distance only up to the
/// graph's own dilation, so `K̂` overestimates `K` by at most that factor.
pub fn quasiconvexity_constant(
    domain: &SpatialDomain,
    pair_budget: usize,
    seed: u64,
) -> Result<QuasiConvexity> {
    let n = domain.len();
    if n == 1 {
        return Ok(QuasiConvexity {
            k_hat: 1.0,
            worst_pair: None,
            pairs_sampled: 0,
        });
    }
    let g = graph(domain)?;
    let cloud = domain.cloud();
    let sources = pair_budget.div_ceil(n - 1).clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = sample(&mut rng, n, sources).into_vec();
    chosen.sort_unstable();

    let mut k_hat = 1.0;
    let mut worst = None;
    let mut pairs = 0;
    for s in chosen {
        let dist = dijkstra(&g, NodeIndex::new(s), None, |e| *e.weight());
        let mut targets: Vec<_> = dist.into_iter().collect();
        targets.sort_by_key(|(v, _)| v.index());
        for (v, d) in targets {
            let e = cloud.distance(s, v.index());
            if e > 0.0 {
                pairs += 1;
                let r = d / e;
                if r > k_hat {
                    k_hat = r;
                    worst = Some((s, v.index()));
                }
            }
        }
    }
    Ok(QuasiConvexity {
        k_hat,
        worst_pair: worst,
        pairs_sampled: pairs,
    })
}

/// Shortest polyline through the adjacency graph from cloud point `i` to
/// cloud point `j`.
pub fn shortest_path(domain: &SpatialDomain, i: usize, j: usize) -> Result<Vec<Point>> {
    let g = graph(domain)?;
    let cloud = domain.cloud();
    let goal = NodeIndex::new(j);
    let (_, nodes) = astar(
        &g,
        NodeIndex::new(i),
        |v| v == goal,
        |e| *e.weight(),
        |v| cloud.distance(v.index(), j),
    )
    .ok_or_else(|| Error::Structural(format!("no path from {i} to {j}")))?;
    nodes
        .into_iter()
        .map(|v| Point::new(cloud.point(v.index()).to_vec()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointCloud;

    fn grid_square(m: usize) -> PointCloud {
        let mut pts = Vec::new();
        for a in 0..m {
            for b in 0..m {
                pts.push([a as f64 / (m - 1) as f64, b as f64 / (m - 1) as f64]);
            }
        }
        PointCloud::from_points(2, &pts).unwrap()
    }

    #[test]
    fn single_point_is_one() {
        let d = SpatialDomain::new(PointCloud::from_points(2, &[[0.0, 0.0]]).unwrap(), true).unwrap();
        assert_eq!(quasiconvexity_constant(&d, 10, 0).unwrap().k_hat, 1.0);
    }

    #[test]
    fn disconnected_graph_is_an_error() {
        let c = PointCloud::from_points(1, &[[0.0], [0.1], [5.0], [5.1]]).unwrap();
        let d = SpatialDomain::new(c, true).unwrap().with_knn_graph(1);
        match quasiconvexity_constant(&d, 10, 0) {
            Err(Error::Disconnected { components, .. }) => assert!(components.contains("2 points")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grid_square_is_nearly_convex() {
        let d = SpatialDomain::new(grid_square(15), true).unwrap().with_knn_graph(8);
        let q = quasiconvexity_constant(&d, 5000, 1).unwrap();
        // the 8-neighbour lattice metric has dilation ≤ 1/cos(π/8) ≈ 1.082
        assert!(q.k_hat <= 1.09, "{q:?}");
        let path = shortest_path(&d, 0, 224).unwrap();
        assert_eq!(path.first().unwrap().coords(), &[0.0, 0.0]);
        assert_eq!(path.last().unwrap().coords(), &[1.0, 1.0]);
    }
}
