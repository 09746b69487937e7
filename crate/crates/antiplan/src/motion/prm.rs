//! Roadmap construction and the lazy shortest-path query.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use rand::Rng;

use crate::blockworld::{Environment, Location};
use crate::geom::Point;

use super::{obstacles, MotionError, MotionParams};

/// A k-nearest-neighbor roadmap. Edges start unvalidated; queries validate
/// or discard them on demand and the results persist across queries.
#[derive(Debug, Clone)]
pub struct Roadmap {
    pub vertices: Vec<Point>,
    /// Labels for the first `labels.len()` vertices (the navigation
    /// locations); sampled filler vertices have no label.
    pub labels: Vec<Location>,
    pub adjacency: Vec<Vec<(u32, f64)>>,
    validated: HashSet<(u32, u32)>,
    dead: HashSet<(u32, u32)>,
    /// Collision checks performed so far (diagnostics for the lazy
    /// contract: checks only happen on candidate-path edges).
    pub checks: usize,
    /// Total edge count over all candidate paths examined so far.
    pub candidate_path_edges: usize,
}

impl Roadmap {
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn is_validated(&self, a: u32, b: u32) -> bool {
        self.validated.contains(&key(a, b))
    }

    fn is_dead(&self, a: u32, b: u32) -> bool {
        self.dead.contains(&key(a, b))
    }
}

fn key(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

/// Samples `n_samples` collision-free vertices plus all navigation
/// locations (which come first, in `env.locations()` order), and connects
/// each vertex to its `k` nearest neighbors. No collision checking happens
/// here; edges are validated lazily at query time.
pub fn build_roadmap(
    env: &Environment,
    n_samples: usize,
    k: usize,
    params: &MotionParams,
    rng: &mut impl Rng,
) -> Roadmap {
    let rects = obstacles(env, params);
    let labels = env.locations();
    let mut vertices: Vec<Point> = labels
        .iter()
        .map(|l| env.location_point(l).expect("location of this environment"))
        .collect();
    let mut guard = 0usize;
    while vertices.len() < labels.len() + n_samples {
        let p = Point::new(rng.gen::<f64>() * env.width, rng.gen::<f64>() * env.height);
        if rects.iter().all(|r| !r.contains(&p)) {
            vertices.push(p);
        }
        guard += 1;
        if guard > 1000 * (n_samples + 1) {
            break; // workspace almost fully blocked; keep what we have
        }
    }

    let n = vertices.len();
    let mut adjacency: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    let mut seen = HashSet::new();
    for i in 0..n {
        let mut dists: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (vertices[i].dist(&vertices[j]), j))
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        for &(d, j) in dists.iter().take(k) {
            if seen.insert(key(i as u32, j as u32)) {
                adjacency[i].push((j as u32, d));
                adjacency[j].push((i as u32, d));
            }
        }
    }

    Roadmap {
        vertices,
        labels,
        adjacency,
        validated: HashSet::new(),
        dead: HashSet::new(),
        checks: 0,
        candidate_path_edges: 0,
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (dist, vertex) for deterministic ties.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest valid path from vertex `a` to vertex `b`.
///
/// Repeatedly finds the shortest path over the not-yet-discarded edges and
/// collision-checks only that path's unvalidated edges; a failing edge is
/// dropped and the search repeats. The result equals the shortest path
/// over the fully validated roadmap.
pub fn lazy_query(
    rm: &mut Roadmap,
    a: usize,
    b: usize,
    collide: &impl Fn(&Point, &Point) -> bool,
) -> Result<(Vec<usize>, f64), MotionError> {
    let n = rm.vertices.len();
    if a >= n {
        return Err(MotionError::UnknownVertex(a));
    }
    if b >= n {
        return Err(MotionError::UnknownVertex(b));
    }
    if a == b {
        return Ok((vec![a], 0.0));
    }
    loop {
        let (path, length) = match dijkstra(rm, a, b) {
            Some(r) => r,
            None => return Err(MotionError::NoPath(a, b)),
        };
        rm.candidate_path_edges += path.len() - 1;
        let mut all_valid = true;
        for w in path.windows(2) {
            let (u, v) = (w[0] as u32, w[1] as u32);
            if rm.is_validated(u, v) {
                continue;
            }
            rm.checks += 1;
            if collide(&rm.vertices[u as usize], &rm.vertices[v as usize]) {
                rm.dead.insert(key(u, v));
                all_valid = false;
                break;
            }
            rm.validated.insert(key(u, v));
        }
        if all_valid {
            return Ok((path, length));
        }
    }
}

fn dijkstra(rm: &Roadmap, a: usize, b: usize) -> Option<(Vec<usize>, f64)> {
    let n = rm.vertices.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![u32::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[a] = 0.0;
    heap.push(HeapEntry { dist: 0.0, vertex: a as u32 });
    while let Some(HeapEntry { dist: d, vertex: u }) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        if u as usize == b {
            break;
        }
        for &(v, len) in &rm.adjacency[u as usize] {
            if rm.is_dead(u, v) {
                continue;
            }
            let nd = d + len;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                parent[v as usize] = u;
                heap.push(HeapEntry { dist: nd, vertex: v });
            }
        }
    }
    if dist[b].is_infinite() {
        return None;
    }
    let mut path = vec![b];
    let mut cur = b;
    while cur != a {
        cur = parent[cur] as usize;
        path.push(cur);
    }
    path.reverse();
    Some((path, dist[b]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{open_env, walled_env};
    use crate::motion::segment_collides;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn open_workspace_diagonal_close_to_straight_line() {
        // Vertices 0 and 1 are the two approach points at (0.5,0.5) and
        // (3.5,4.5): straight-line distance 5.0.
        let env = open_env();
        let params = MotionParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut rm = build_roadmap(&env, 800, 12, &params, &mut rng);
        let rects = crate::motion::obstacles(&env, &params);
        let collide = segment_collides(&rects);
        let ai = rm.labels.iter().position(|l| l.to_string() == "a").unwrap();
        let bi = rm.labels.iter().position(|l| l.to_string() == "b").unwrap();
        let (_, len) = lazy_query(&mut rm, ai, bi, &collide).unwrap();
        assert!((5.0..5.5).contains(&len), "length {len} outside [5.0, 5.5]");
    }

    #[test]
    fn query_same_vertex_is_zero() {
        let env = open_env();
        let params = MotionParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut rm = build_roadmap(&env, 50, 6, &params, &mut rng);
        let collide = |_: &Point, _: &Point| false;
        let (path, len) = lazy_query(&mut rm, 0, 0, &collide).unwrap();
        assert_eq!(path, vec![0]);
        assert_eq!(len, 0.0);
    }

    #[test]
    fn wall_disconnects_workspace() {
        let env = walled_env();
        let params = MotionParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rm = build_roadmap(&env, 400, 10, &params, &mut rng);
        let rects = crate::motion::obstacles(&env, &params);
        let collide = segment_collides(&rects);
        let ai = rm.labels.iter().position(|l| l.to_string() == "left").unwrap();
        let bi = rm.labels.iter().position(|l| l.to_string() == "right").unwrap();
        assert!(matches!(
            lazy_query(&mut rm, ai, bi, &collide),
            Err(MotionError::NoPath(..))
        ));
    }

    #[test]
    fn samples_avoid_inflated_obstacles() {
        let env = walled_env();
        let params = MotionParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rm = build_roadmap(&env, 300, 8, &params, &mut rng);
        let rects = crate::motion::obstacles(&env, &params);
        for p in &rm.vertices[rm.labels.len()..] {
            assert!(rects.iter().all(|r| !r.contains(p)));
        }
    }

    #[test]
    fn checks_stay_on_candidate_paths() {
        let env = walled_env();
        let params = MotionParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut rm = build_roadmap(&env, 300, 8, &params, &mut rng);
        let rects = crate::motion::obstacles(&env, &params);
        let collide = segment_collides(&rects);
        let _ = lazy_query(&mut rm, 0, 1, &collide);
        assert!(rm.checks <= rm.candidate_path_edges, "lazy contract violated");
    }

    #[test]
    fn deterministic_roadmap_per_seed() {
        let env = open_env();
        let params = MotionParams::default();
        let build = || {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            build_roadmap(&env, 200, 8, &params, &mut rng)
        };
        let (a, b) = (build(), build());
        assert_eq!(a.vertices.len(), b.vertices.len());
        assert!(a.vertices.iter().zip(&b.vertices).all(|(p, q)| p == q));
        assert_eq!(a.adjacency, b.adjacency);
    }
}
