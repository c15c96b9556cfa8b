use super::{check_points, ClusterError, ClusterMethod, Clustering};

/// Converged K-medoids state. Medoids are point positions, ordered by value;
/// `assignment[i]` indexes into `medoids`.
#[derive(Debug, Clone, PartialEq)]
pub struct MedoidState {
    pub medoids: Vec<usize>,
    pub assignment: Vec<usize>,
    pub cost: f64,
    /// Cost after every assignment and every medoid update, in order.
    pub cost_history: Vec<f64>,
    pub iterations: usize,
}

impl MedoidState {
    pub fn medoid_values(&self, points: &[f64]) -> Vec<f64> {
        self.medoids.iter().map(|&m| points[m]).collect()
    }

    pub fn to_clustering(&self) -> Clustering {
        Clustering::from_raw_labels(&self.assignment, ClusterMethod::KMedoids)
    }
}

fn check_k(points: &[f64], k: usize) -> Result<(), ClusterError> {
    check_points(points)?;
    if k == 0 || k > points.len() {
        return Err(ClusterError::KOutOfRange {
            k,
            max: points.len(),
        });
    }
    Ok(())
}

/// The `k` most central points: smallest total distance to all other
/// points, ties to the smaller value. Points sharing a value are chosen at
/// most once. Returned positions are ordered by value.
pub fn park_jun_init(points: &[f64], k: usize) -> Result<Vec<usize>, ClusterError> {
    check_k(points, k)?;
    let totals: Vec<f64> = points
        .iter()
        .map(|a| points.iter().map(|b| (a - b).abs()).sum())
        .collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        totals[i]
            .total_cmp(&totals[j])
            .then(points[i].total_cmp(&points[j]))
            .then(i.cmp(&j))
    });
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for i in order {
        if chosen.iter().all(|&c| points[c] != points[i]) {
            chosen.push(i);
            if chosen.len() == k {
                break;
            }
        }
    }
    if chosen.len() < k {
        let mut distinct = points.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        return Err(ClusterError::KOutOfRange {
            k,
            max: distinct.len(),
        });
    }
    chosen.sort_by(|&i, &j| points[i].total_cmp(&points[j]));
    Ok(chosen)
}

/// Nearest medoid for every point; ties go to the lower medoid value.
fn assign(points: &[f64], medoids: &[usize]) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            let mut best = 0;
            for (j, &m) in medoids.iter().enumerate().skip(1) {
                let (d, bd) = ((p - points[m]).abs(), (p - points[medoids[best]]).abs());
                if d < bd || (d == bd && points[m] < points[medoids[best]]) {
                    best = j;
                }
            }
            best
        })
        .collect()
}

fn cost(points: &[f64], medoids: &[usize], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &a)| (p - points[medoids[a]]).abs())
        .sum()
}

/// Within each cluster, the member with the smallest summed distance to the
/// other members; ties to the lower value.
fn update(points: &[f64], assignment: &[usize], k: usize) -> Vec<usize> {
    let mut members = vec![Vec::new(); k];
    for (i, &a) in assignment.iter().enumerate() {
        members[a].push(i);
    }
    members
        .iter()
        .map(|group| {
            let within = |i: usize| -> f64 { group.iter().map(|&j| (points[i] - points[j]).abs()).sum() };
            let mut best = group[0];
            let mut best_sum = within(best);
            for &i in &group[1..] {
                let s = within(i);
                if s < best_sum || (s == best_sum && points[i] < points[best]) {
                    best = i;
                    best_sum = s;
                }
            }
            best
        })
        .collect()
}

/// K-medoids by alternating assignment and medoid update, seeded with
/// [`park_jun_init`]. Stops when the assignment no longer changes or the
/// cost stops strictly decreasing, and after at most `n * k` rounds.
pub fn kmedoids(points: &[f64], k: usize) -> Result<MedoidState, ClusterError> {
    let mut medoids = park_jun_init(points, k)?;
    let mut assignment = assign(points, &medoids);
    let mut current = cost(points, &medoids, &assignment);
    let mut cost_history = vec![current];
    let max_rounds = points.len() * k;
    let mut iterations = 0;

    while iterations < max_rounds {
        iterations += 1;
        let next_medoids = update(points, &assignment, k);
        let updated_cost = cost(points, &next_medoids, &assignment);
        let next_assignment = assign(points, &next_medoids);
        let next_cost = cost(points, &next_medoids, &next_assignment);
        let unchanged = next_assignment == assignment;
        if !unchanged && next_cost >= current {
            // a different assignment at equal cost: stop rather than cycle
            break;
        }
        cost_history.extend([updated_cost, next_cost]);
        medoids = next_medoids;
        assignment = next_assignment;
        current = next_cost;
        if unchanged {
            break;
        }
    }

    // order medoids by value and relabel
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| points[medoids[a]].total_cmp(&points[medoids[b]]));
    let mut rank = vec![0; k];
    for (r, &o) in order.iter().enumerate() {
        rank[o] = r;
    }
    Ok(MedoidState {
        medoids: order.iter().map(|&o| medoids[o]).collect(),
        assignment: assignment.iter().map(|&a| rank[a]).collect(),
        cost: current,
        cost_history,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: &[i64]) -> Vec<f64> {
        v.iter().map(|&x| x as f64).collect()
    }

    #[test]
    fn init_examples() {
        let p = f(&[1, 2, 3, 4, 5]);
        assert_eq!(park_jun_init(&p, 1).unwrap(), vec![2]);
        let p = f(&[1, 2, 3, 10, 11, 12]);
        let m = park_jun_init(&p, 2).unwrap();
        assert_eq!(m.iter().map(|&i| p[i]).collect::<Vec<_>>(), vec![3.0, 10.0]);
        assert_eq!(park_jun_init(&p, 6).unwrap(), vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn init_range_errors() {
        let p = f(&[1, 2]);
        assert_eq!(park_jun_init(&p, 0), Err(ClusterError::KOutOfRange { k: 0, max: 2 }));
        assert_eq!(park_jun_init(&p, 3), Err(ClusterError::KOutOfRange { k: 3, max: 2 }));
        assert_eq!(park_jun_init(&f(&[4, 4, 4]), 2), Err(ClusterError::KOutOfRange { k: 2, max: 1 }));
        assert_eq!(kmedoids(&[], 1), Err(ClusterError::Empty));
    }

    #[test]
    fn two_groups() {
        let p = f(&[1, 2, 3, 10, 11, 12]);
        let s = kmedoids(&p, 2).unwrap();
        assert_eq!(s.medoid_values(&p), vec![2.0, 11.0]);
        assert_eq!(s.assignment, vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(s.cost, 4.0);
    }

    #[test]
    fn k_equals_n_and_k_one() {
        let p = f(&[4, 9, 13, 40]);
        assert_eq!(kmedoids(&p, 4).unwrap().cost, 0.0);
        let p = f(&[1, 2, 3, 4, 5]);
        let s = kmedoids(&p, 1).unwrap();
        assert_eq!(s.medoid_values(&p), vec![3.0]);
        assert_eq!(s.cost, 6.0);
    }

    #[test]
    fn history_is_non_increasing() {
        let p = f(&[1, 5, 6, 7, 20, 22, 23, 40, 41, 90, 91, 92, 93]);
        for k in 1..=p.len() {
            let s = kmedoids(&p, k).unwrap();
            assert!(s.cost_history.windows(2).all(|w| w[1] <= w[0]), "k={k}");
            assert_eq!(*s.cost_history.last().unwrap(), s.cost);
            assert!(s.iterations <= p.len() * k);
            assert!(s.to_clustering().is_contiguous());
            assert_eq!(s.to_clustering().k, k);
        }
    }
}
