//! Steering target for the velocity search.
//!
//! A Dijkstra search over the robot-centered map finds the cheapest route to
//! the goal; the point a fixed arc length along that route becomes the target
//! of the heading term. Goals outside the map are reached through the map
//! border, each border cell charged its straight-line distance to the goal.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::params::PlannerParams;
use crate::costmap::{is_inadmissible, CostMap, MapGeometry};
use crate::geometry::Point2;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    cell: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Squared Euclidean distance transform of a 1D sampled function
/// (lower envelope of parabolas).
fn edt_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    let mut k = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let mut started = false;
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        if !started {
            v[0] = q;
            started = true;
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0 and the new parabola dominates everywhere
                v[0] = q;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    if !started {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Distance (m) from every cell center to the nearest inadmissible cell
/// center; infinite when there is none.
pub fn clearance(map: &CostMap, threshold: f64) -> Vec<f64> {
    let g = map.geometry;
    let n = g.size;
    let mut grid: Vec<f64> = map
        .values()
        .iter()
        .map(|&v| if is_inadmissible(v, threshold) { 0.0 } else { f64::INFINITY })
        .collect();
    let mut col = vec![0.0; n];
    let mut res = vec![0.0; n];
    for ix in 0..n {
        for iy in 0..n {
            col[iy] = grid[iy * n + ix];
        }
        edt_1d(&col, &mut res);
        for iy in 0..n {
            grid[iy * n + ix] = res[iy];
        }
    }
    for iy in 0..n {
        let row = &mut grid[iy * n..(iy + 1) * n];
        col.copy_from_slice(row);
        edt_1d(&col, &mut res);
        row.copy_from_slice(&res);
    }
    grid.iter().map(|d2| d2.sqrt() * g.resolution).collect()
}

/// Map values with the shadow of every admissible hit filled in: a cell
/// that rays from the robot reach only through vegetation takes the value of
/// the last vegetation cell on the ray (the largest, when several rays
/// cross it). Shadows of inadmissible cells stay unknown (zero).
pub fn fill_shadows(map: &CostMap, threshold: f64) -> Vec<f64> {
    let g = map.geometry;
    let mut out = map.values().to_vec();
    let rays = 8 * g.size;
    let step = g.resolution * 0.5;
    let reach = g.resolution * g.size as f64;
    for k in 0..rays {
        let a = std::f64::consts::TAU * k as f64 / rays as f64;
        let (dx, dy) = (a.cos() * step, a.sin() * step);
        let mut carry = 0.0;
        let mut p = Point2::new(0.0, 0.0);
        for _ in 0..(reach / step) as usize {
            p = Point2::new(p.x + dx, p.y + dy);
            let Some((ix, iy)) = g.cell_of(p) else { break };
            let i = g.index(ix, iy);
            let v = map.values()[i];
            if is_inadmissible(v, threshold) {
                break;
            }
            if v > 0.0 {
                carry = v;
            } else if carry > out[i] {
                out[i] = carry;
            }
        }
    }
    out
}

/// Per-cell traversal charge used by the route search.
pub fn step_costs(map: &CostMap, threshold: f64, params: &PlannerParams) -> Vec<f64> {
    let g = map.geometry;
    // a cell is blocked when the swept disc around its center can touch an
    // inadmissible cell anywhere
    let r = params.footprint_radius + g.resolution * std::f64::consts::FRAC_1_SQRT_2;
    clearance(map, threshold)
        .iter()
        .zip(fill_shadows(map, threshold))
        .map(|(&d, v)| {
            if d <= r {
                // deeper is dearer, so a route starting inside leaves outward
                return 1.0 + params.guide_block_penalty * (2.0 - d / r);
            }
            let band = if d < r + params.guide_margin {
                params.guide_inflation * (1.0 - (d - r) / params.guide_margin)
            } else {
                0.0
            };
            1.0 + params.guide_cost_weight * v.min(100.0) / 100.0 + band
        })
        .collect()
}

/// Cost-to-goal of every cell and the next cell on its cheapest route
/// (`None` at the seeds).
pub fn cost_to_goal(map: &CostMap, goal: Point2, threshold: f64, params: &PlannerParams) -> (Vec<f64>, Vec<Option<usize>>) {
    let costs = step_costs(map, threshold, params);
    route(map, goal, &costs, &[])
}

/// Dijkstra from the goal. With a non-empty `settle` the search stops once
/// every listed cell has its final cost; routes from those cells are then
/// complete, other entries may not be.
fn route(map: &CostMap, goal: Point2, costs: &[f64], settle: &[usize]) -> (Vec<f64>, Vec<Option<usize>>) {
    let g = map.geometry;
    let step_cost = |i: usize| costs[i];

    let mut dist = vec![f64::INFINITY; g.len()];
    let mut next = vec![None; g.len()];
    let mut heap = BinaryHeap::new();
    match g.cell_of(goal) {
        Some((ix, iy)) => {
            let i = g.index(ix, iy);
            dist[i] = 0.0;
            heap.push(Entry { cost: 0.0, cell: i });
        }
        None => {
            for (ix, iy) in border(&g) {
                let i = g.index(ix, iy);
                let d = g.cell_center(ix, iy).distance(&goal) * step_cost(i);
                if d < dist[i] {
                    dist[i] = d;
                    heap.push(Entry { cost: d, cell: i });
                }
            }
        }
    }

    let n = g.size as i64;
    let mut pending = settle.len();
    let mut done = vec![false; g.len()];
    while let Some(Entry { cost, cell }) = heap.pop() {
        if cost > dist[cell] || done[cell] {
            continue;
        }
        done[cell] = true;
        if settle.contains(&cell) {
            pending -= 1;
            if pending == 0 {
                break;
            }
        }
        let (cx, cy) = ((cell % g.size) as i64, (cell / g.size) as i64);
        for (dx, dy) in NEIGHBORS {
            let (x, y) = (cx + dx, cy + dy);
            if !(0..n).contains(&x) || !(0..n).contains(&y) {
                continue;
            }
            let j = g.index(x as usize, y as usize);
            let len = if dx != 0 && dy != 0 { std::f64::consts::SQRT_2 } else { 1.0 };
            // entering `cell` from `j`: charge the average of both cells
            let d = cost + len * g.resolution * 0.5 * (step_cost(j) + step_cost(cell));
            if d < dist[j] {
                dist[j] = d;
                next[j] = Some(cell);
                heap.push(Entry { cost: d, cell: j });
            }
        }
    }
    (dist, next)
}

const NEIGHBORS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

fn border(g: &MapGeometry) -> impl Iterator<Item = (usize, usize)> + '_ {
    let last = g.size - 1;
    (0..g.size).flat_map(move |iy| {
        (0..g.size).filter_map(move |ix| (ix == 0 || iy == 0 || ix == last || iy == last).then_some((ix, iy)))
    })
}

/// Point `guide_lookahead` metres along the cheapest route from the robot
/// toward `goal` (both in the map's body frame). The goal itself is returned
/// when the route reaches it, or leaves the map, within that distance.
///
/// `previous` is the target chosen last cycle. While it is in straight view
/// and its route, plus the distance to it, costs at most `guide_hysteresis`
/// more than the best route, the route through it is kept, so near-ties
/// between the two sides of an obstacle do not flip every cycle.
pub fn steering_target(
    map: &CostMap,
    goal: Point2,
    previous: Option<Point2>,
    threshold: f64,
    params: &PlannerParams,
) -> Point2 {
    let g = map.geometry;
    let costs = step_costs(map, threshold, params);
    let c = g.center();
    let here = g.index(c, c);
    let kept_cell = previous.and_then(|p| g.cell_of(p)).map(|(x, y)| g.index(x, y));
    let settle: Vec<usize> = std::iter::once(here).chain(kept_cell.filter(|&k| k != here)).collect();
    let (dist, next) = route(map, goal, &costs, &settle);
    let sight = Sight {
        map,
        costs: &costs,
        blocked: 1.0 + params.guide_block_penalty,
        own: costs[here],
    };
    let origin = Point2::new(0.0, 0.0);
    if let Some(prev) = previous {
        if let Some((px, py)) = g.cell_of(prev) {
            let pc = g.index(px, py);
            let kept = dist[pc] + prev.distance(&origin);
            if kept <= dist[here] + params.guide_hysteresis && sight.sees(prev) {
                let start = g.cell_center(px, py);
                let budget = params.guide_lookahead - start.distance(&origin);
                return sight.walk(&next, pc, start, budget, goal);
            }
        }
    }
    sight.walk(&next, here, origin, params.guide_lookahead, goal)
}

/// Straight-line visibility from the robot: a segment is open when every
/// cell on it is charged below `blocked` or no more than the robot's own
/// cell, so a robot already inside a blocked band may still look outward.
struct Sight<'a> {
    map: &'a CostMap,
    costs: &'a [f64],
    blocked: f64,
    own: f64,
}

impl Sight<'_> {
    fn sees(&self, b: Point2) -> bool {
        let g = self.map.geometry;
        let n = (b.x.hypot(b.y) / g.resolution).ceil().max(1.0) as usize;
        (1..=n).all(|k| {
            let t = k as f64 / n as f64;
            let p = Point2::new(b.x * t, b.y * t);
            g.cell_of(p).is_none_or(|(ix, iy)| {
                let c = self.costs[g.index(ix, iy)];
                c < self.blocked || c <= self.own
            })
        })
    }

    /// Follows the route from `cell` for up to `budget` metres, stopping at
    /// the last point in sight.
    fn walk(&self, next: &[Option<usize>], mut cell: usize, mut here: Point2, budget: f64, goal: Point2) -> Point2 {
        let g = self.map.geometry;
        let mut travelled = 0.0;
        while travelled < budget {
            let Some(n) = next[cell] else {
                return if self.sees(goal) { goal } else { here };
            };
            let p = g.cell_center(n % g.size, n / g.size);
            if !self.sees(p) && here != Point2::new(0.0, 0.0) {
                return here;
            }
            travelled += p.distance(&here);
            here = p;
            cell = n;
        }
        here
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmap::{admissibility_threshold, ClearingWeights, MAX_COST};
    use crate::geometry::FrameTransform;

    fn thr() -> f64 {
        admissibility_threshold(&ClearingWeights::default())
    }

    fn empty() -> CostMap {
        CostMap::new(MapGeometry::default(), FrameTransform::identity())
    }

    #[test]
    fn open_map_steers_straight_at_the_goal() {
        let p = PlannerParams::default();
        let t = steering_target(&empty(), Point2::new(10.0, 0.0), None, thr(), &p);
        assert!(t.y.abs() < 1e-9 && (t.x - p.guide_lookahead).abs() <= 0.1 + 1e-9, "{t:?}");
        let near = Point2::new(1.0, 0.5);
        assert_eq!(steering_target(&empty(), near, None, thr(), &p), near);
    }

    #[test]
    fn unsafe_blob_ahead_is_skirted() {
        let p = PlannerParams::default();
        let mut m = empty();
        for iy in 36..=44 {
            for ix in 46..=54 {
                m.set(ix, iy, MAX_COST);
            }
        }
        let t = steering_target(&m, Point2::new(10.0, 0.0), None, thr(), &p);
        assert!(t.y.abs() > 0.5, "{t:?}");
    }

    #[test]
    fn a_tied_side_is_kept() {
        let p = PlannerParams::default();
        let mut m = empty();
        for iy in 37..=43 {
            for ix in 55..=58 {
                m.set(ix, iy, MAX_COST);
            }
        }
        for side in [1.0, -1.0] {
            let t = steering_target(&m, Point2::new(10.0, 0.0), Some(Point2::new(1.5, side)), thr(), &p);
            assert!(t.y * side > 0.3, "side {side}: {t:?}");
        }
    }

    #[test]
    fn a_wall_with_no_gap_is_crossed_rather_than_abandoned() {
        let p = PlannerParams::default();
        let mut m = empty();
        for iy in 0..81 {
            m.set(55, iy, 100.0);
        }
        let (dist, _) = cost_to_goal(&m, Point2::new(10.0, 0.0), thr(), &p);
        assert!(dist.iter().all(|d| d.is_finite()));
    }

    #[test]
    fn shadows_of_vegetation_inherit_its_cost() {
        let mut m = empty();
        for iy in 30..=50 {
            m.set(50, iy, 20.0);
        }
        m.set(40, 60, MAX_COST);
        let f = fill_shadows(&m, thr());
        assert_eq!(f[m.geometry.index(70, 40)], 20.0);
        assert_eq!(f[m.geometry.index(45, 40)], 0.0);
        assert_eq!(f[m.geometry.index(40, 70)], 0.0);
        assert_eq!(f[m.geometry.index(40, 60)], MAX_COST);
    }

    #[test]
    fn clearance_matches_brute_force() {
        use crate::rng::seeded_rng;
        use rand::Rng;
        let mut rng = seeded_rng(9);
        for fill in [0.0, 0.001, 0.02, 0.3] {
            let mut m = empty();
            let g = m.geometry;
            for iy in 0..g.size {
                for ix in 0..g.size {
                    if rng.random::<f64>() < fill {
                        m.set(ix, iy, if rng.random() { 100.0 } else { MAX_COST });
                    }
                }
            }
            let got = clearance(&m, thr());
            let hits: Vec<Point2> = (0..g.len())
                .filter(|&i| is_inadmissible(m.values()[i], thr()))
                .map(|i| g.cell_center(i % g.size, i / g.size))
                .collect();
            for i in 0..g.len() {
                let c = g.cell_center(i % g.size, i / g.size);
                let want = hits.iter().map(|h| h.distance(&c)).fold(f64::INFINITY, f64::min);
                assert!(want == got[i] || (want - got[i]).abs() < 1e-9, "fill {fill} cell {i}: {} vs {want}", got[i]);
            }
        }
    }
}
