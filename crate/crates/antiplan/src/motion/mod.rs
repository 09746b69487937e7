//! Move costs from a Lazy PRM over the 2D workspace. Region footprints,
//! inflated by the robot radius, are the obstacles; edge collision checks
//! are deferred until an edge shows up on a candidate shortest path.

mod prm;

pub use prm::{build_roadmap, lazy_query, Roadmap};

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blockworld::{Environment, Location};
use crate::geom::{Point, Rect};

/// Cost units charged per meter of robot travel. Keeps typical moves
/// commensurate with the constant pick/place cost of 100.
pub const COST_PER_METER: f64 = 25.0;

#[derive(Debug, Clone)]
pub struct MotionParams {
    pub n_samples: usize,
    pub k_neighbors: usize,
    pub scale: f64,
    /// Treat region footprints as obstacles. Disable to let the robot
    /// drive straight over furniture.
    pub use_obstacles: bool,
}

impl Default for MotionParams {
    fn default() -> Self {
        MotionParams {
            n_samples: 500,
            k_neighbors: 10,
            scale: COST_PER_METER,
            use_obstacles: true,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum MotionError {
    #[error("no collision-free path between vertices {0} and {1}")]
    NoPath(usize, usize),
    #[error("location {0} unreachable after {1} roadmap rebuilds")]
    UnreachableLocation(Location, usize),
    #[error("vertex index {0} not in roadmap")]
    UnknownVertex(usize),
}

/// Symmetric shortest-path costs between every pair of navigation
/// locations, in cost units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveCostTable {
    /// Sorted location labels; `costs` is indexed by position here.
    pub locations: Vec<Location>,
    /// Row-major `n x n` matrix of costs.
    pub costs: Vec<f64>,
}

impl MoveCostTable {
    pub fn cost(&self, a: &Location, b: &Location) -> Option<f64> {
        let i = self.locations.binary_search(a).ok()?;
        let j = self.locations.binary_search(b).ok()?;
        Some(self.costs[i * self.locations.len() + j])
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }
}

/// Inflated obstacle rectangles for an environment.
pub fn obstacles(env: &Environment, params: &MotionParams) -> Vec<Rect> {
    if !params.use_obstacles {
        return Vec::new();
    }
    env.regions
        .iter()
        .map(|r| r.footprint.inflate(env.robot_radius))
        .collect()
}

/// Collision predicate over the inflated obstacle set.
pub fn segment_collides(obstacles: &[Rect]) -> impl Fn(&Point, &Point) -> bool + '_ {
    move |a, b| obstacles.iter().any(|r| r.intersects_segment(a, b))
}

/// Builds the full move-cost table for an environment: one seeded roadmap,
/// then a lazy query per location pair. Rebuilds with double the samples
/// (up to 3 retries) if some pair stays disconnected.
pub fn compute_move_costs(
    env: &Environment,
    params: &MotionParams,
) -> Result<MoveCostTable, MotionError> {
    let locations = env.locations();
    let n = locations.len();
    let rects = obstacles(env, params);
    let collide = segment_collides(&rects);
    let mut n_samples = params.n_samples;
    let mut last_failure = None;
    for attempt in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(env.seed.wrapping_add(attempt as u64));
        let mut roadmap = build_roadmap(env, n_samples, params.k_neighbors, params, &mut rng);
        let mut dist = vec![0.0f64; n * n];
        let mut failed = None;
        'pairs: for i in 0..n {
            for j in (i + 1)..n {
                match lazy_query(&mut roadmap, i, j, &collide) {
                    Ok((_, len)) => {
                        dist[i * n + j] = len * params.scale;
                        dist[j * n + i] = len * params.scale;
                    }
                    Err(_) => {
                        failed = Some(locations[j].clone());
                        break 'pairs;
                    }
                }
            }
        }
        match failed {
            None => {
                return Ok(MoveCostTable {
                    locations,
                    costs: dist,
                })
            }
            Some(loc) => {
                last_failure = Some(loc);
                n_samples *= 2;
            }
        }
    }
    Err(MotionError::UnreachableLocation(
        last_failure.expect("retries imply a failure"),
        3,
    ))
}

/// Lookup table from location to roadmap vertex index for query call sites.
pub fn location_indices(env: &Environment) -> HashMap<Location, usize> {
    env.locations()
        .into_iter()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_region_env;

    #[test]
    fn table_is_symmetric_zero_diagonal() {
        let env = two_region_env();
        let table = compute_move_costs(&env, &MotionParams::default()).unwrap();
        let n = table.len();
        for i in 0..n {
            assert_eq!(table.costs[i * n + i], 0.0);
            for j in 0..n {
                assert_eq!(table.costs[i * n + j], table.costs[j * n + i]);
            }
        }
    }

    #[test]
    fn costs_respect_straight_line_lower_bound() {
        let env = two_region_env();
        let params = MotionParams::default();
        let table = compute_move_costs(&env, &params).unwrap();
        for a in &table.locations {
            for b in &table.locations {
                let pa = env.location_point(a).unwrap();
                let pb = env.location_point(b).unwrap();
                let cost = table.cost(a, b).unwrap();
                assert!(
                    cost >= params.scale * pa.dist(&pb) - 1e-6,
                    "cost {a}->{b} below metric lower bound"
                );
            }
        }
    }

    #[test]
    fn triangle_inequality_holds() {
        let env = two_region_env();
        let table = compute_move_costs(&env, &MotionParams::default()).unwrap();
        let n = table.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let direct = table.costs[i * n + j];
                    let via = table.costs[i * n + k] + table.costs[k * n + j];
                    assert!(direct <= via + 1e-6);
                }
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let env = two_region_env();
        let t1 = compute_move_costs(&env, &MotionParams::default()).unwrap();
        let t2 = compute_move_costs(&env, &MotionParams::default()).unwrap();
        assert_eq!(t1, t2);
    }
}
