//! Fast non-dominated sorting, crowding distance and two-objective
//! hypervolume. All objectives are minimised.

use std::cmp::Ordering;

pub type Objectives = [f64; 2];

/// `a` is no worse everywhere and strictly better somewhere.
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Fronts of point indices, best first. Indices inside a front are
/// ascending.
pub fn non_dominated_sort(points: &[Objectives]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&points[i], &points[j]) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each member of `front`, aligned with it.
///
/// Objectives with zero spread inside the front contribute nothing, so a
/// front of identical points has all distances zero. Otherwise the two
/// extremes of each objective get infinite distance.
pub fn crowding_distance(points: &[Objectives], front: &[usize]) -> Vec<f64> {
    let mut distance = vec![0.0; front.len()];
    if front.len() <= 2 {
        let spread = (0..2).any(|m| front.iter().any(|&i| points[i][m] != points[front[0]][m]));
        if spread || front.len() == 1 {
            distance.iter_mut().for_each(|d| *d = f64::INFINITY);
        }
        return distance;
    }
    #[allow(clippy::needless_range_loop)]
    for m in 0..2 {
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| {
            points[front[a]][m]
                .total_cmp(&points[front[b]][m])
                .then(front[a].cmp(&front[b]))
        });
        let lo = points[front[order[0]]][m];
        let hi = points[front[*order.last().unwrap()]][m];
        let range = hi - lo;
        if !(range > 0.0) {
            continue;
        }
        distance[order[0]] = f64::INFINITY;
        distance[*order.last().unwrap()] = f64::INFINITY;
        for w in order.windows(3) {
            let gap = points[front[w[2]]][m] - points[front[w[0]]][m];
            distance[w[1]] += gap / range;
        }
    }
    distance
}

/// Ranked selection result: `(index, rank, crowding)`, rank counted from 1.
pub fn select<F>(points: &[Objectives], n: usize, mut tie_break: F) -> Vec<(usize, usize, f64)>
where
    F: FnMut(usize, usize) -> Ordering,
{
    let mut chosen = Vec::with_capacity(n.min(points.len()));
    for (rank0, front) in non_dominated_sort(points).into_iter().enumerate() {
        if chosen.len() >= n {
            break;
        }
        let crowding = crowding_distance(points, &front);
        let mut members: Vec<(usize, f64)> = front.into_iter().zip(crowding).collect();
        members.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| tie_break(a.0, b.0)));
        let room = n - chosen.len();
        chosen.extend(members.into_iter().take(room).map(|(i, c)| (i, rank0 + 1, c)));
    }
    chosen
}

/// Area dominated by `points` and bounded by `reference`. Points not
/// strictly better than the reference in both objectives add nothing.
pub fn hypervolume(points: &[Objectives], reference: Objectives) -> f64 {
    let mut pts: Vec<Objectives> = points
        .iter()
        .copied()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    // Sweep along the first objective; each point that improves the second
    // adds the slab between its value and the previous best.
    let mut area = 0.0;
    let mut best_y = reference[1];
    for p in &pts {
        if p[1] < best_y {
            area += (reference[0] - p[0]) * (best_y - p[1]);
            best_y = p[1];
        }
    }
    area
}
