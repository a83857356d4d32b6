//! Halton roadmaps on the unit square with random box obstacle fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Directedness, Graph, Query, Weight, INF};
use crate::problem::ProblemInstance;
use crate::search::distances_from;

use super::halton;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitSquareConfig {
    pub n_points: usize,
    /// Points closer than or exactly at this distance are connected.
    pub connection_radius: f64,
    pub n_query_pairs: usize,
    pub n_obstacle_fields: usize,
    pub boxes_per_field: usize,
    /// Box side lengths are uniform on `[low, high)`.
    pub box_dim_range: (f64, f64),
}

impl Default for UnitSquareConfig {
    fn default() -> Self {
        UnitSquareConfig {
            n_points: 100,
            connection_radius: 0.15,
            n_query_pairs: 30,
            n_obstacle_fields: 30,
            boxes_per_field: 10,
            box_dim_range: (0.1, 0.3),
        }
    }
}

/// Closed axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

/// Whether segment `p`-`q` meets the closed box (parametric slab clipping;
/// touching counts).
pub fn segment_hits_box(p: [f64; 2], q: [f64; 2], b: &Aabb) -> bool {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for axis in 0..2 {
        let d = q[axis] - p[axis];
        if d == 0.0 {
            if p[axis] < b.min[axis] || p[axis] > b.max[axis] {
                return false;
            }
            continue;
        }
        let mut ta = (b.min[axis] - p[axis]) / d;
        let mut tb = (b.max[axis] - p[axis]) / d;
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return false;
        }
    }
    true
}

/// The shared roadmap plus every query pair and obstacle field of one
/// benchmark class. Instance `i * n_obstacle_fields + j` pairs query `i`
/// with field `j`.
#[derive(Debug, Clone)]
pub struct UnitSquare {
    pub config: UnitSquareConfig,
    pub points: Vec<[f64; 2]>,
    pub graph: Graph,
    /// Euclidean edge lengths.
    pub estimates: Vec<Weight>,
    pub queries: Vec<Query>,
    pub fields: Vec<Vec<Aabb>>,
}

impl UnitSquare {
    pub fn generate(config: &UnitSquareConfig, query_seed: u64, obstacle_seed: u64) -> Result<Self> {
        let points: Vec<[f64; 2]> =
            (1..=config.n_points as u64).map(|i| [halton(i, 2), halton(i, 3)]).collect();
        let mut endpoints = Vec::new();
        let mut estimates = Vec::new();
        for u in 0..points.len() {
            for v in u + 1..points.len() {
                let d = distance(points[u], points[v]);
                if d <= config.connection_radius {
                    endpoints.push((u, v));
                    estimates.push(d);
                }
            }
        }
        let graph = Graph::new(points.len(), Directedness::Undirected, endpoints)?;
        if graph.num_edges() == 0 {
            return Err(Error::Config("roadmap has no edges; increase the radius or point count".into()));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(query_seed);
        let n = points.len();
        let mut queries = Vec::with_capacity(config.n_query_pairs);
        while queries.len() < config.n_query_pairs {
            let start = rng.gen_range(0..n);
            let goal = rng.gen_range(0..n);
            if start != goal && distances_from(&graph, start, &estimates)[goal] != INF {
                queries.push(Query { start, goal });
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(obstacle_seed);
        let (low, high) = config.box_dim_range;
        let fields = (0..config.n_obstacle_fields)
            .map(|_| {
                (0..config.boxes_per_field)
                    .map(|_| {
                        let corner = [rng.gen::<f64>(), rng.gen::<f64>()];
                        let size = [rng.gen_range(low..high), rng.gen_range(low..high)];
                        Aabb { min: corner, max: [corner[0] + size[0], corner[1] + size[1]] }
                    })
                    .collect()
            })
            .collect();

        Ok(UnitSquare { config: config.clone(), points, graph, estimates, queries, fields })
    }

    pub fn num_instances(&self) -> usize {
        self.queries.len() * self.fields.len()
    }

    /// Infinite for edges meeting a box, the Euclidean length otherwise.
    pub fn true_weights(&self, boxes: &[Aabb]) -> Vec<Weight> {
        self.graph
            .edges()
            .iter()
            .zip(&self.estimates)
            .map(|(edge, &len)| {
                let (p, q) = (self.points[edge.source], self.points[edge.target]);
                if boxes.iter().any(|b| segment_hits_box(p, q, b)) {
                    INF
                } else {
                    len
                }
            })
            .collect()
    }

    pub fn instance_with_boxes(&self, query: Query, boxes: &[Aabb]) -> Result<ProblemInstance> {
        ProblemInstance::new(self.graph.clone(), Some(query), self.estimates.clone(), self.true_weights(boxes))
    }

    pub fn instance(&self, id: usize) -> Result<ProblemInstance> {
        if id >= self.num_instances() {
            return Err(Error::Config(format!("instance {id} out of range")));
        }
        let per_query = self.fields.len();
        self.instance_with_boxes(self.queries[id / per_query], &self.fields[id % per_query])
    }
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slab_test_cases() {
        let b = Aabb { min: [0.4, 0.4], max: [0.6, 0.6] };
        assert!(segment_hits_box([0.0, 0.0], [1.0, 1.0], &b));
        assert!(!segment_hits_box([0.0, 0.0], [0.3, 0.3], &b));
        assert!(!segment_hits_box([0.0, 0.7], [1.0, 0.7], &b));
        // Touching the edge or a corner counts.
        assert!(segment_hits_box([0.0, 0.6], [1.0, 0.6], &b));
        let c = Aabb { min: [0.25, 0.25], max: [0.75, 0.75] };
        assert!(segment_hits_box([0.0, 1.0], [0.25, 0.75], &c));
        assert!(!segment_hits_box([0.0, 1.0], [0.25, 0.875], &c));
        assert!(!segment_hits_box([0.2, 0.6], [0.4, 0.8], &b));
        // Fully inside.
        assert!(segment_hits_box([0.45, 0.45], [0.5, 0.55], &b));
        // Vertical segment beside the box.
        assert!(!segment_hits_box([0.7, 0.0], [0.7, 1.0], &b));
    }

    #[test]
    fn roadmap_shape() {
        let us = UnitSquare::generate(&UnitSquareConfig::default(), 1, 2).unwrap();
        assert_eq!(us.points.len(), 100);
        assert_eq!(us.points[0], [0.5, 1.0 / 3.0]);
        assert_eq!(us.num_instances(), 900);
        assert!(us.estimates.iter().all(|&d| d <= 0.15 && d > 0.0));
        for p in 0..us.num_instances() {
            let inst = us.instance(p).unwrap();
            assert!(inst.estimates.iter().zip(&inst.true_weights).all(|(e, w)| e <= w));
        }
    }

    #[test]
    fn obstacle_free_and_fully_blocked_fields() {
        let us = UnitSquare::generate(&UnitSquareConfig::default(), 1, 2).unwrap();
        assert_eq!(us.true_weights(&[]), us.estimates);
        let all = Aabb { min: [-1.0, -1.0], max: [2.0, 2.0] };
        assert!(us.true_weights(&[all]).iter().all(|&w| w == INF));
    }
}
