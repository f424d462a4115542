//! Convex-hull helpers: the Steiner-point selector and a barycentric
//! feasibility check for hull membership.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Steiner point of the convex hull of `rows`.
///
/// Dimension 1 is the interval midpoint. Dimension 2 averages the hull
/// vertices weighted by exterior angle. Higher dimensions use the
/// sphere-average of support points (the direction cone of each vertex has
/// measure proportional to its weight), estimated by seeded Monte Carlo.
pub(crate) fn steiner_point(rows: &[&[f64]], dim: usize, samples: u64, seed: u64) -> Vec<f64> {
    match dim {
        1 => {
            let lo = rows.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r[0]).fold(f64::NEG_INFINITY, f64::max);
            vec![0.5 * (lo + hi)]
        }
        2 => steiner_2d(rows),
        _ => steiner_monte_carlo(rows, dim, samples, seed),
    }
}

fn steiner_2d(rows: &[&[f64]]) -> Vec<f64> {
    let hull = convex_hull_2d(rows);
    match hull.len() {
        1 => rows[hull[0]].to_vec(),
        2 => {
            let (a, b) = (rows[hull[0]], rows[hull[1]]);
            vec![0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
        }
        m => {
            // exterior angles sum to 2*pi; they weight the vertices
            let mut out = vec![0.0; 2];
            let mut total = 0.0;
            for k in 0..m {
                let prev = rows[hull[(k + m - 1) % m]];
                let cur = rows[hull[k]];
                let next = rows[hull[(k + 1) % m]];
                let in_dir = (cur[0] - prev[0], cur[1] - prev[1]);
                let out_dir = (next[0] - cur[0], next[1] - cur[1]);
                let angle_in = in_dir.1.atan2(in_dir.0);
                let angle_out = out_dir.1.atan2(out_dir.0);
                let mut ext = angle_out - angle_in;
                while ext < 0.0 {
                    ext += std::f64::consts::TAU;
                }
                while ext >= std::f64::consts::TAU {
                    ext -= std::f64::consts::TAU;
                }
                out[0] += ext * cur[0];
                out[1] += ext * cur[1];
                total += ext;
            }
            vec![out[0] / total, out[1] / total]
        }
    }
}

/// Andrew's monotone chain; returns counterclockwise hull vertex indices.
/// Collinear sets collapse to their two extreme points.
pub(crate) fn convex_hull_2d(rows: &[&[f64]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    idx.sort_by(|&a, &b| {
        rows[a][0]
            .total_cmp(&rows[b][0])
            .then(rows[a][1].total_cmp(&rows[b][1]))
    });
    idx.dedup_by(|&mut a, &mut b| rows[a] == rows[b]);
    if idx.len() <= 2 {
        return idx;
    }
    let cross = |o: usize, a: usize, b: usize| -> f64 {
        (rows[a][0] - rows[o][0]) * (rows[b][1] - rows[o][1])
            - (rows[a][1] - rows[o][1]) * (rows[b][0] - rows[o][0])
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], i) <= 0.0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], i) <= 0.0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        // degenerate (collinear) input: keep the extremes
        let first = *idx.first().unwrap();
        let last = *idx.last().unwrap();
        return vec![first, last];
    }
    lower
}

fn steiner_monte_carlo(rows: &[&[f64]], dim: usize, samples: u64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = vec![0.0; dim];
    let mut dir = vec![0.0; dim];
    for _ in 0..samples {
        // uniform direction on the Euclidean sphere
        let mut norm_sq = 0.0;
        for d in dir.iter_mut() {
            *d = gaussian(&mut rng);
            norm_sq += *d * *d;
        }
        if norm_sq == 0.0 {
            continue;
        }
        let support = rows
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| dot(a, &dir).total_cmp(&dot(b, &dir)))
            .map(|(i, _)| i)
            .expect("nonempty");
        for (a, v) in acc.iter_mut().zip(rows[support]) {
            *a += v;
        }
    }
    for a in acc.iter_mut() {
        *a /= samples as f64;
    }
    acc
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    use rand::Rng;
    // Box-Muller
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean distance from `q` to the convex hull of `rows`, by exhausting
/// active sets: for each support subset solve the equality-constrained least
/// squares with weights summing to one, keep feasible (nonnegative) results.
///
/// By Carathéodory the projection of `q` onto the hull is a convex
/// combination of at most dim + 1 affinely independent generators, so
/// supports up to that size suffice for the exact residual. The acceptance
/// suites check hull invariance with it at tolerance 1e-8.
pub(crate) fn hull_membership_residual(q: &[f64], rows: &[&[f64]], dim: usize) -> f64 {
    let n = rows.len();
    debug_assert!(n <= 16, "active-set enumeration is exponential in n");
    let max_support = (dim + 1).min(n);
    let mut best = f64::INFINITY;
    for mask in 1u32..(1u32 << n) {
        if (mask.count_ones() as usize) > max_support {
            continue;
        }
        let support: Vec<usize> = (0..n).filter(|i| (mask >> i) & 1 == 1).collect();
        if let Some(lambda) = affine_weights(q, rows, &support) {
            if lambda.iter().all(|&l| l >= -1e-9) {
                let mut res_sq = 0.0;
                for d in 0..dim {
                    let mut v = -q[d];
                    for (k, &i) in support.iter().enumerate() {
                        v += lambda[k] * rows[i][d];
                    }
                    res_sq += v * v;
                }
                best = best.min(res_sq.sqrt());
                if best <= 1e-13 {
                    return best;
                }
            }
        }
    }
    best
}

/// Minimizes ||sum lambda_k p_k - q||^2 subject to sum lambda = 1 over the
/// given support, via the KKT system. None when the system is singular.
fn affine_weights(q: &[f64], rows: &[&[f64]], support: &[usize]) -> Option<Vec<f64>> {
    let k = support.len();
    // KKT: [G 1; 1^T 0] [lambda; mu] = [P^T q; 1], G = P^T P
    let m = k + 1;
    let mut aug = vec![vec![0.0; m + 1]; m];
    for a in 0..k {
        for b in 0..k {
            aug[a][b] = dot(rows[support[a]], rows[support[b]]);
        }
        aug[a][k] = 1.0;
        aug[a][m] = dot(rows[support[a]], q);
    }
    for b in 0..k {
        aug[k][b] = 1.0;
    }
    aug[k][m] = 1.0;

    // Gaussian elimination with partial pivoting
    let scale = aug
        .iter()
        .flat_map(|r| r[..m].iter())
        .fold(0.0f64, |mx, v| mx.max(v.abs()))
        .max(1.0);
    for col in 0..m {
        let (pivot_row, pivot) = (col..m)
            .map(|r| (r, aug[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if pivot <= 1e-13 * scale {
            return None;
        }
        aug.swap(col, pivot_row);
        for r in (col + 1)..m {
            let factor = aug[r][col] / aug[col][col];
            for c in col..=m {
                aug[r][c] -= factor * aug[col][c];
            }
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let mut acc = aug[row][m];
        for c in (row + 1)..m {
            acc -= aug[row][c] * x[c];
        }
        x[row] = acc / aug[row][row];
    }
    x.truncate(k);
    Some(x)
}
