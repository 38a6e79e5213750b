//! Kamada-Kawai spring embedding of a similarity graph.
//!
//! Target distances are all-pairs shortest paths over edge lengths
//! `1 - weight`. The energy `sum_{i<j} k_ij (|p_i - p_j| - d_ij)^2` with
//! `k_ij = 1 / d_ij^2` is minimised one node at a time: the node with the
//! largest gradient is relaxed by damped 2-D Newton steps, falling back to
//! gradient descent where the local Hessian is not positive definite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::similarity::SimilarityGraph;

pub type Point = [f64; 2];

/// Shortest edge length; keeps `r = 1` pairs from collapsing onto each other.
pub const MIN_EDGE_LENGTH: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    /// `f64::INFINITY` marks unreachable pairs.
    d: Mat,
}

impl DistanceMatrix {
    /// Wraps a symmetric matrix with zero diagonal and non-negative entries.
    pub fn new(d: Mat) -> Result<Self> {
        if !d.is_square() {
            return Err(Error::Dimension("distance matrix must be square".into()));
        }
        let n = d.rows();
        for i in 0..n {
            if d[(i, i)] != 0.0 {
                return Err(Error::Parameter(format!("d[{i}][{i}] must be zero")));
            }
            for j in 0..n {
                let v = d[(i, j)];
                if v.is_nan() || v < 0.0 || v != d[(j, i)] {
                    return Err(Error::Parameter(format!(
                        "d[{i}][{j}] = {v} is not a symmetric non-negative distance"
                    )));
                }
                if i != j && v == 0.0 {
                    return Err(Error::Parameter(format!(
                        "distinct nodes {i} and {j} at zero distance"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { d })
    }

    pub fn len(&self) -> usize {
        self.d.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.d.rows() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[(i, j)]
    }

    pub fn is_finite(&self, i: usize, j: usize) -> bool {
        self.d[(i, j)].is_finite()
    }

    pub fn as_mat(&self) -> &Mat {
        &self.d
    }

    pub fn max_finite(&self) -> f64 {
        self.d
            .as_slice()
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }

    /// Connected components (by finite distance), each sorted, ordered by first node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let comp: Vec<usize> = (0..n).filter(|&j| self.is_finite(start, j)).collect();
            for &j in &comp {
                seen[j] = true;
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn submatrix(&self, nodes: &[usize]) -> DistanceMatrix {
        DistanceMatrix {
            d: Mat::from_fn(nodes.len(), nodes.len(), |a, b| {
                self.d[(nodes[a], nodes[b])]
            }),
        }
    }

    fn ensure_connected(&self) -> Result<()> {
        let comps = self.components();
        if comps.len() > 1 {
            return Err(Error::Component(format!(
                "{} components; lay them out separately",
                comps.len()
            )));
        }
        Ok(())
    }
}

pub fn edge_length(weight: f64) -> f64 {
    (1.0 - weight).clamp(MIN_EDGE_LENGTH, 1.0)
}

/// All-pairs shortest paths (one Dijkstra per source) over `1 - weight` lengths.
pub fn build_distances(g: &SimilarityGraph) -> DistanceMatrix {
    let n = g.len();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(i, j, w) in &g.edges {
        let len = edge_length(w);
        adj[i].push((j, len));
        adj[j].push((i, len));
    }
    let mut d = Mat::from_fn(n, n, |_, _| f64::INFINITY);
    for s in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[s] = 0.0;
        for _ in 0..n {
            let u = match (0..n)
                .filter(|&v| !done[v] && dist[v].is_finite())
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            {
                Some(u) => u,
                None => break,
            };
            done[u] = true;
            for &(v, len) in &adj[u] {
                let alt = dist[u] + len;
                if alt < dist[v] {
                    dist[v] = alt;
                }
            }
        }
        for t in 0..n {
            d[(s, t)] = dist[t];
        }
    }
    // Symmetrise against floating-point path-order differences.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = d[(i, j)].min(d[(j, i)]);
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    DistanceMatrix { d }
}

fn spring(dij: f64) -> f64 {
    1.0 / (dij * dij)
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn kk_energy(coords: &[Point], d: &DistanceMatrix) -> Result<f64> {
    check_coords(coords, d)?;
    d.ensure_connected()?;
    Ok(energy_unchecked(coords, d))
}

fn check_coords(coords: &[Point], d: &DistanceMatrix) -> Result<()> {
    if coords.len() != d.len() {
        return Err(Error::Dimension(format!(
            "{} coordinates for {} nodes",
            coords.len(),
            d.len()
        )));
    }
    Ok(())
}

fn term(p: Point, q: Point, dij: f64) -> f64 {
    let diff = dist(p, q) - dij;
    spring(dij) * diff * diff
}

/// Correctly rounded sum of `values` (Shewchuk's exact partials). Makes the
/// energy independent of summation order, so a true decrease never shows up
/// as a rounding increase.
fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut kept = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    let Some(mut n) = partials.len().checked_sub(1) else {
        return 0.0;
    };
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        lo = y - (hi - x);
        if lo != 0.0 {
            break;
        }
    }
    // Round half to even across the remaining partials.
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

fn energy_unchecked(coords: &[Point], d: &DistanceMatrix) -> f64 {
    let n = coords.len();
    exact_sum(
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| term(coords[i], coords[j], d.get(i, j)))),
    )
}

/// Energy change when node `m` moves to `p`, summed term by term from
/// `k (a' - a)(a' + a - 2d)` so small changes are not lost to cancellation.
fn energy_change(coords: &[Point], d: &DistanceMatrix, m: usize, p: Point) -> f64 {
    let old = coords[m];
    let s = [p[0] - old[0], p[1] - old[1]];
    exact_sum(
        coords
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != m)
            .map(|(i, &q)| {
                let a0 = dist(old, q);
                let a1 = dist(p, q);
                if a0 + a1 == 0.0 {
                    return 0.0;
                }
                // a1^2 - a0^2 = s . ((p - q) + (old - q))
                let num = s[0] * ((p[0] - q[0]) + (old[0] - q[0]))
                    + s[1] * ((p[1] - q[1]) + (old[1] - q[1]));
                let dij = d.get(m, i);
                spring(dij) * (num / (a0 + a1)) * (a1 + a0 - 2.0 * dij)
            }),
    )
}

fn node_gradient(coords: &[Point], d: &DistanceMatrix, m: usize) -> Point {
    let p = coords[m];
    let mut g = [0.0; 2];
    for (i, &q) in coords.iter().enumerate() {
        if i == m {
            continue;
        }
        let dx = p[0] - q[0];
        let dy = p[1] - q[1];
        let r = dx.hypot(dy);
        if r == 0.0 {
            continue;
        }
        let dij = d.get(m, i);
        let f = 2.0 * spring(dij) * (1.0 - dij / r);
        g[0] += f * dx;
        g[1] += f * dy;
    }
    g
}

/// Returns `[hxx, hxy, hyy]`.
fn node_hessian(coords: &[Point], d: &DistanceMatrix, m: usize) -> [f64; 3] {
    let p = coords[m];
    let mut h = [0.0; 3];
    for (i, &q) in coords.iter().enumerate() {
        if i == m {
            continue;
        }
        let dx = p[0] - q[0];
        let dy = p[1] - q[1];
        let r = dx.hypot(dy);
        if r == 0.0 {
            continue;
        }
        let dij = d.get(m, i);
        let k2 = 2.0 * spring(dij);
        let r3 = r * r * r;
        h[0] += k2 * (1.0 - dij * dy * dy / r3);
        h[1] += k2 * dij * dx * dy / r3;
        h[2] += k2 * (1.0 - dij * dx * dx / r3);
    }
    h
}

/// Analytic gradient of [`kk_energy`] for every node.
pub fn kk_gradient(coords: &[Point], d: &DistanceMatrix) -> Result<Vec<Point>> {
    check_coords(coords, d)?;
    d.ensure_connected()?;
    Ok((0..coords.len())
        .map(|m| node_gradient(coords, d, m))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutOptions {
    pub seed: u64,
    /// Every node's gradient norm must fall below this.
    pub grad_tol: f64,
    /// Cap on node relaxations.
    pub max_outer: usize,
    /// Steps per node relaxation.
    pub max_inner: usize,
    /// `false` forces plain steepest descent.
    pub newton: bool,
    /// Independent circle starts; the lowest final energy wins. The first
    /// start uses `seed` itself.
    pub restarts: usize,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions {
            seed: 1989,
            grad_tol: 1e-9,
            max_outer: 20_000,
            max_inner: 50,
            newton: true,
            restarts: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutResult {
    pub coordinates: Vec<Point>,
    pub final_energy: f64,
    /// Node relaxations performed.
    pub iterations: usize,
    pub converged: bool,
    /// Energy at the start and after each relaxation.
    pub energy_trace: Vec<f64>,
}

/// Seeded starting configuration: nodes on a circle of radius `max(d) / 2`
/// in a shuffled order.
/// Angular jitter of the start positions, as a fraction of the slot spacing.
const JITTER: f64 = 0.05;

pub fn circle_start(d: &DistanceMatrix, seed: u64) -> Vec<Point> {
    let n = d.len();
    let radius = (d.max_finite() / 2.0).max(0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut coords = vec![[0.0; 2]; n];
    for (slot, &node) in order.iter().enumerate() {
        // A small angular jitter keeps symmetric metrics off symmetric saddles.
        let jitter = rng.random_range(-JITTER..JITTER);
        let angle = std::f64::consts::TAU * (slot as f64 + jitter) / n as f64;
        coords[node] = [radius * angle.cos(), radius * angle.sin()];
    }
    coords
}

/// Seed of the `k`-th start.
pub fn start_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Lays out a connected metric from `opts.restarts` seeded circle starts and
/// keeps the lowest-energy result (the earliest on ties). Spring energies
/// have local minima, e.g. a folded square, that a single start can land in.
pub fn kamada_kawai(d: &DistanceMatrix, opts: LayoutOptions) -> Result<LayoutResult> {
    d.ensure_connected()?;
    let mut best: Option<LayoutResult> = None;
    for k in 0..opts.restarts.max(1) {
        let run = kamada_kawai_from(d, circle_start(d, start_seed(opts.seed, k)), opts)?;
        if best
            .as_ref()
            .is_none_or(|b| run.final_energy < b.final_energy)
        {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one start"))
}

/// Runs the optimiser from explicit starting coordinates.
pub fn kamada_kawai_from(
    d: &DistanceMatrix,
    start: Vec<Point>,
    opts: LayoutOptions,
) -> Result<LayoutResult> {
    check_coords(&start, d)?;
    d.ensure_connected()?;
    let n = d.len();
    let mut coords = start;
    let mut energy = energy_unchecked(&coords, d);
    let mut trace = vec![energy];
    let mut converged = n < 2;
    let mut iterations = 0;

    // Nodes whose best step is lost in rounding; cleared whenever any node moves.
    let mut blocked = vec![false; n];
    while !converged && iterations < opts.max_outer {
        let grads: Vec<f64> = (0..n)
            .map(|m| {
                let g = node_gradient(&coords, d, m);
                g[0].hypot(g[1])
            })
            .collect();
        if grads.iter().all(|&g| g < opts.grad_tol) {
            converged = true;
            break;
        }
        let Some(m) = (0..n)
            .filter(|&m| !blocked[m] && grads[m] >= opts.grad_tol)
            .fold(None, |best: Option<usize>, m| match best {
                Some(b) if grads[b] >= grads[m] => Some(b),
                _ => Some(m),
            })
        else {
            // No node can descend at this precision.
            break;
        };
        iterations += 1;
        if relax_node(&mut coords, d, m, opts, &mut energy) {
            blocked.fill(false);
        } else {
            blocked[m] = true;
        }
        trace.push(energy);
    }
    Ok(LayoutResult {
        coordinates: coords,
        final_energy: energy,
        iterations,
        converged,
        energy_trace: trace,
    })
}

/// Moves node `m` while `energy` (kept equal to the total energy) decreases.
fn relax_node(
    coords: &mut [Point],
    d: &DistanceMatrix,
    m: usize,
    opts: LayoutOptions,
    energy: &mut f64,
) -> bool {
    let mut moved = false;
    for _ in 0..opts.max_inner {
        let g = node_gradient(coords, d, m);
        let gnorm = g[0].hypot(g[1]);
        if gnorm < opts.grad_tol {
            break;
        }
        let mut step = [-g[0], -g[1]];
        if opts.newton {
            let [hxx, hxy, hyy] = node_hessian(coords, d, m);
            let det = hxx * hyy - hxy * hxy;
            if hxx > 0.0 && det > 0.0 {
                step = [
                    -(hyy * g[0] - hxy * g[1]) / det,
                    -(hxx * g[1] - hxy * g[0]) / det,
                ];
            }
        }
        let slope = g[0] * step[0] + g[1] * step[1];
        let p = coords[m];
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = [p[0] + alpha * step[0], p[1] + alpha * step[1]];
            let armijo = 1e-4 * alpha * slope;
            alpha *= 0.5;
            if cand == p {
                break;
            }
            let delta = energy_change(coords, d, m, cand);
            if !(delta < 0.0 && delta <= armijo) {
                continue;
            }
            // Terms are rounded one by one, so a true decrease can still
            // evaluate a few ulps higher; the recorded total never goes up.
            coords[m] = cand;
            let total = energy_unchecked(coords, d);
            if total <= *energy {
                *energy = total;
                accepted = true;
                break;
            }
            coords[m] = p;
        }
        if !accepted {
            break;
        }
        moved = true;
    }
    moved
}

/// Layout of a possibly disconnected graph: each component is embedded on
/// its own and the components are packed on a square grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphLayout {
    pub coordinates: Vec<Point>,
    pub components: Vec<Vec<usize>>,
    pub results: Vec<LayoutResult>,
    /// Nodes without any edge.
    pub isolated: Vec<usize>,
}

impl GraphLayout {
    pub fn converged(&self) -> bool {
        self.results.iter().all(|r| r.converged)
    }
}

pub fn layout_components(d: &DistanceMatrix, opts: LayoutOptions) -> GraphLayout {
    let components = d.components();
    let mut placed: Vec<Vec<Point>> = Vec::with_capacity(components.len());
    let mut results = Vec::new();
    let mut isolated = Vec::new();
    for comp in &components {
        if comp.len() == 1 {
            isolated.push(comp[0]);
            placed.push(vec![[0.0, 0.0]]);
            continue;
        }
        let sub = d.submatrix(comp);
        let res = kamada_kawai(&sub, opts).expect("component is connected");
        placed.push(res.coordinates.clone());
        results.push(res);
    }

    let extent = placed
        .iter()
        .map(|pts| {
            let (lo, hi) = bounds(pts);
            (hi[0] - lo[0]).max(hi[1] - lo[1])
        })
        .fold(0.0, f64::max);
    let cell = extent + 1.0;
    let cols = (components.len() as f64).sqrt().ceil().max(1.0) as usize;
    let mut coordinates = vec![[0.0; 2]; d.len()];
    for (c, (comp, pts)) in components.iter().zip(&placed).enumerate() {
        let (lo, _) = bounds(pts);
        let ox = (c % cols) as f64 * cell;
        let oy = (c / cols) as f64 * cell;
        for (&node, p) in comp.iter().zip(pts) {
            coordinates[node] = [p[0] - lo[0] + ox, p[1] - lo[1] + oy];
        }
    }
    GraphLayout {
        coordinates,
        components,
        results,
        isolated,
    }
}

pub(crate) fn bounds(pts: &[Point]) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if pts.is_empty() {
        return ([0.0; 2], [0.0; 2]);
    }
    (lo, hi)
}
