use super::{check_points, ClusterError, ClusterMethod, Clustering};

/// Default number of tree levels used by the inconsistency coefficient.
pub const DEFAULT_DEPTH: usize = 2;

/// One agglomeration step. Leaves are nodes `0..n`; merge `k` creates node `n + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkageTree {
    n_leaves: usize,
    merges: Vec<Merge>,
}

impl LinkageTree {
    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    fn children(&self, node: usize) -> Option<(usize, usize)> {
        node.checked_sub(self.n_leaves)
            .map(|k| (self.merges[k].left, self.merges[k].right))
    }
}

/// Average-linkage agglomerative clustering of 1-D points.
///
/// Each step merges the pair of clusters with the smallest mean pairwise
/// distance; ties go to the smaller `(left, right)` node-id pair. Pairwise
/// sums are accumulated rather than averaged, so integer inputs tie exactly.
pub fn linkage_average(points: &[f64]) -> Result<LinkageTree, ClusterError> {
    check_points(points)?;
    let n = points.len();
    // active clusters: node id, size, and summed distances to the others
    let mut ids: Vec<usize> = (0..n).collect();
    let mut sizes: Vec<usize> = vec![1; n];
    let mut sums: Vec<Vec<f64>> = points
        .iter()
        .map(|a| points.iter().map(|b| (a - b).abs()).collect())
        .collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                let d = sums[a][b] / (sizes[a] * sizes[b]) as f64;
                let (lo, hi) = (ids[a].min(ids[b]), ids[a].max(ids[b]));
                let better = match best {
                    None => true,
                    Some((bd, blo, bhi, _, _)) => d < bd || (d == bd && (lo, hi) < (blo, bhi)),
                };
                if better {
                    best = Some((d, lo, hi, a, b));
                }
            }
        }
        let (height, left, right, a, b) = best.expect("at least two active clusters");
        let size = sizes[a] + sizes[b];
        merges.push(Merge {
            left,
            right,
            height,
            size,
        });
        for c in (0..ids.len()).filter(|&c| c != a && c != b) {
            let s = sums[a][c] + sums[b][c];
            sums[a][c] = s;
            sums[c][a] = s;
        }
        ids[a] = n + step;
        sizes[a] = size;
        ids.swap_remove(b);
        sizes.swap_remove(b);
        sums.swap_remove(b);
        for row in &mut sums {
            row.swap_remove(b);
        }
    }
    Ok(LinkageTree {
        n_leaves: n,
        merges,
    })
}

/// Statistics behind one link's inconsistency coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inconsistency {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
    pub coefficient: f64,
}

/// Per-merge inconsistency coefficients.
///
/// For link `k`, the heights of `k` and of every link up to `depth - 1`
/// levels below it are collected; the coefficient is
/// `(height_k - mean) / std` with the sample standard deviation, and zero
/// when that deviation is zero.
pub fn inconsistency(tree: &LinkageTree, depth: usize) -> Result<Vec<Inconsistency>, ClusterError> {
    if depth == 0 {
        return Err(ClusterError::ZeroDepth);
    }
    let n = tree.n_leaves;
    let rows = tree
        .merges
        .iter()
        .enumerate()
        .map(|(k, merge)| {
            let mut heights = Vec::new();
            let mut frontier = vec![n + k];
            for _ in 0..depth {
                let mut next = Vec::new();
                for node in frontier {
                    if let Some((l, r)) = tree.children(node) {
                        heights.push(tree.merges[node - n].height);
                        next.push(l);
                        next.push(r);
                    }
                }
                frontier = next;
            }
            let count = heights.len();
            let mean = heights.iter().sum::<f64>() / count as f64;
            let std = if count > 1 {
                let ss: f64 = heights.iter().map(|h| (h - mean).powi(2)).sum();
                (ss / (count - 1) as f64).sqrt()
            } else {
                0.0
            };
            let coefficient = if std > 0.0 {
                (merge.height - mean) / std
            } else {
                0.0
            };
            Inconsistency {
                mean,
                std,
                count,
                coefficient,
            }
        })
        .collect();
    Ok(rows)
}

/// Flat clusters at `cutoff = floor(max coefficient)`.
pub fn cut_by_inconsistency(tree: &LinkageTree, depth: usize) -> Result<Clustering, ClusterError> {
    let rows = inconsistency(tree, depth)?;
    let max = rows
        .iter()
        .map(|r| r.coefficient)
        .fold(f64::NEG_INFINITY, f64::max);
    let cutoff = if max.is_finite() { max.floor() } else { 0.0 };
    Ok(cut_rows(tree, &rows, cutoff))
}

/// Flat clusters at an explicit cutoff: the maximal subtrees in which no
/// link has a coefficient above `cutoff`.
pub fn cut_at(tree: &LinkageTree, depth: usize, cutoff: f64) -> Result<Clustering, ClusterError> {
    let rows = inconsistency(tree, depth)?;
    Ok(cut_rows(tree, &rows, cutoff))
}

fn cut_rows(tree: &LinkageTree, rows: &[Inconsistency], cutoff: f64) -> Clustering {
    let n = tree.n_leaves;
    // largest coefficient within each merge's subtree; children precede parents
    let mut subtree_max = vec![f64::NEG_INFINITY; tree.merges.len()];
    for (k, m) in tree.merges.iter().enumerate() {
        let mut v = rows[k].coefficient;
        for child in [m.left, m.right] {
            if child >= n {
                v = v.max(subtree_max[child - n]);
            }
        }
        subtree_max[k] = v;
    }

    let mut raw = vec![0usize; n];
    let mut next_label = 0;
    let root = if tree.merges.is_empty() { 0 } else { n + tree.merges.len() - 1 };
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        let whole = node < n || subtree_max[node - n] <= cutoff;
        if whole {
            let mut leaves = vec![node];
            while let Some(x) = leaves.pop() {
                match tree.children(x) {
                    Some((l, r)) => {
                        leaves.push(l);
                        leaves.push(r);
                    }
                    None => raw[x] = next_label,
                }
            }
            next_label += 1;
        } else {
            let (l, r) = tree.children(node).expect("internal node");
            stack.push(r);
            stack.push(l);
        }
    }
    Clustering::from_raw_labels(&raw, ClusterMethod::Agglomerative)
}
