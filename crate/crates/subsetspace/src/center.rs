//! Chebyshev centers (1-center problem) of small point sets under p-norms.
//!
//! The radius of the smallest ball covering a finite set, together with a
//! center attaining it. Exact routes exist in dimension 1 (interval
//! midpoint), for the max-norm (coordinate-wise midpoints), and for the
//! Euclidean norm (minimum enclosing ball by support-set enumeration); the
//! remaining p-norms fall back to smoothed convex minimization.

use crate::error::{Error, Result};
use crate::norms::{NormDescriptor, PExponent};

/// Center and radius of a smallest enclosing ball of `rows` under `norm`.
///
/// Intended for the small sets handled by the exact bipartition routines;
/// the caller bounds the cardinality.
pub(crate) fn chebyshev_center(rows: &[&[f64]], norm: &NormDescriptor) -> Result<(Vec<f64>, f64)> {
    norm.require_plain("chebyshev_center")?;
    if rows.is_empty() {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    let dim = norm.dim();
    if rows.len() == 1 {
        return Ok((rows[0].to_vec(), 0.0));
    }
    let (center, _) = match norm.p() {
        _ if dim == 1 => interval_center(rows),
        PExponent::Infinity => box_center(rows, dim),
        PExponent::Finite(p) if p == 2.0 => euclidean_meb(rows, dim)?,
        PExponent::Finite(_) => smoothed_min_center(rows, dim, norm),
    };
    let radius = covering_radius(&center, rows, norm);
    Ok((center, radius))
}

/// Exact max-distance from `center` to the rows under `norm`.
pub(crate) fn covering_radius(center: &[f64], rows: &[&[f64]], norm: &NormDescriptor) -> f64 {
    let mut diff = vec![0.0; center.len()];
    rows.iter().fold(0.0f64, |r, row| {
        for (k, d) in diff.iter_mut().enumerate() {
            *d = row[k] - center[k];
        }
        r.max(norm.norm_of(&diff))
    })
}

fn interval_center(rows: &[&[f64]]) -> (Vec<f64>, f64) {
    let lo = rows.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r[0]).fold(f64::NEG_INFINITY, f64::max);
    (vec![0.5 * (lo + hi)], 0.5 * (hi - lo))
}

fn box_center(rows: &[&[f64]], dim: usize) -> (Vec<f64>, f64) {
    let mut center = vec![0.0; dim];
    let mut radius = 0.0f64;
    for k in 0..dim {
        let lo = rows.iter().map(|r| r[k]).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|r| r[k]).fold(f64::NEG_INFINITY, f64::max);
        center[k] = 0.5 * (lo + hi);
        radius = radius.max(0.5 * (hi - lo));
    }
    (center, radius)
}

/// Minimum enclosing Euclidean ball by enumerating candidate support sets.
///
/// The optimal ball is the circumball of some affinely independent subset of
/// at most dim + 1 points, so the smallest circumball that covers everything
/// is the answer. Exponential in the subset size but exact, which is what the
/// bipartition enumeration above it needs.
fn euclidean_meb(rows: &[&[f64]], dim: usize) -> Result<(Vec<f64>, f64)> {
    let n = rows.len();
    let max_support = (dim + 1).min(n);
    let mut best: Option<(Vec<f64>, f64)> = None;

    let mut subset: Vec<usize> = Vec::with_capacity(max_support);
    enumerate_subsets(n, max_support, &mut subset, &mut |s| {
        if let Some((c, r)) = circumball(rows, s, dim) {
            let cover = covering_radius_euclid(&c, rows);
            // tiny slack; the circumball radius is recomputed as a cover below
            if cover <= r * (1.0 + 1e-10) + 1e-14 {
                let radius = cover;
                if best.as_ref().is_none_or(|(_, br)| radius < *br) {
                    best = Some((c, radius));
                }
            }
        }
    });

    best.ok_or_else(|| Error::InvalidInput("enclosing ball enumeration failed".into()))
}

fn covering_radius_euclid(center: &[f64], rows: &[&[f64]]) -> f64 {
    rows.iter()
        .map(|row| {
            row.iter()
                .zip(center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

fn enumerate_subsets(n: usize, max_len: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, max_len: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if !cur.is_empty() {
            f(cur);
        }
        if cur.len() == max_len {
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, max_len, cur, f);
            cur.pop();
        }
    }
    rec(0, n, max_len, cur, f);
}

/// Center equidistant from the subset points, constrained to their affine
/// hull. Returns None when the subset is affinely dependent.
fn circumball(rows: &[&[f64]], subset: &[usize], dim: usize) -> Option<(Vec<f64>, f64)> {
    let k = subset.len() - 1;
    let p0 = rows[subset[0]];
    if k == 0 {
        return Some((p0.to_vec(), 0.0));
    }
    // Gram system: 2 (p_i - p0) . (c - p0) = ||p_i - p0||^2, c = p0 + V beta.
    let mut v = vec![vec![0.0; dim]; k];
    for (i, &si) in subset[1..].iter().enumerate() {
        for d in 0..dim {
            v[i][d] = rows[si][d] - p0[d];
        }
    }
    let mut g = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            g[i][j] = dot(&v[i], &v[j]);
        }
        g[i][k] = 0.5 * dot(&v[i], &v[i]);
    }
    let beta = solve_linear(&mut g, k)?;
    let mut center = p0.to_vec();
    for i in 0..k {
        for d in 0..dim {
            center[d] += beta[i] * v[i][d];
        }
    }
    let r = center
        .iter()
        .zip(p0)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Some((center, r))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on an augmented k x (k+1) system.
fn solve_linear(aug: &mut [Vec<f64>], k: usize) -> Option<Vec<f64>> {
    let scale = aug
        .iter()
        .flat_map(|r| r[..k].iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..k {
        let (pivot_row, pivot) = (col..k)
            .map(|r| (r, aug[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if pivot <= 1e-12 * scale {
            return None;
        }
        aug.swap(col, pivot_row);
        for r in (col + 1)..k {
            let factor = aug[r][col] / aug[col][col];
            for c in col..=k {
                aug[r][c] -= factor * aug[col][c];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut acc = aug[row][k];
        for c in (row + 1)..k {
            acc -= aug[row][c] * x[c];
        }
        x[row] = acc / aug[row][row];
    }
    Some(x)
}

/// Smoothed minimization of `c -> max_i ||p_i - c||_p` for the p-norms with
/// no exact special case. Absolute values are Huber-smoothed and the max is
/// replaced by log-sum-exp; a continuation on both smoothing scales drives
/// the error below 1e-8 on the desk-scale inputs this crate enumerates.
fn smoothed_min_center(rows: &[&[f64]], dim: usize, norm: &NormDescriptor) -> (Vec<f64>, f64) {
    let n = rows.len();
    let p = norm.p().as_f64();
    let mut c: Vec<f64> = (0..dim)
        .map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / n as f64)
        .collect();
    let scale = covering_radius(&c, rows, norm).max(1e-12);

    let smooth_norm = |row: &[f64], c: &[f64], nu: f64, grad: Option<&mut [f64]>| -> f64 {
        let mut s = 0.0;
        let mut parts = vec![0.0; dim];
        for k in 0..dim {
            let v = row[k] - c[k];
            let h = (v * v + nu * nu).sqrt();
            parts[k] = h;
            s += h.powf(p);
        }
        let g = s.powf(1.0 / p);
        if let Some(grad) = grad {
            let outer = s.powf(1.0 / p - 1.0);
            for k in 0..dim {
                let v = row[k] - c[k];
                let h = parts[k];
                grad[k] = -outer * h.powf(p - 2.0) * v;
            }
        }
        g
    };

    let mut mu = 1e-2 * scale;
    let mut nu = 1e-3 * scale;
    let mut grad_i = vec![0.0; dim];
    for _stage in 0..6 {
        for _iter in 0..400 {
            // log-sum-exp weights over the per-point radii
            let vals: Vec<f64> = rows
                .iter()
                .map(|r| smooth_norm(r, &c, nu, None))
                .collect();
            let fmax = vals.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
            let weights: Vec<f64> = vals.iter().map(|v| ((v - fmax) / mu).exp()).collect();
            let wsum: f64 = weights.iter().sum();
            let mut grad = vec![0.0; dim];
            for (i, row) in rows.iter().enumerate() {
                smooth_norm(row, &c, nu, Some(&mut grad_i));
                for k in 0..dim {
                    grad[k] += weights[i] / wsum * grad_i[k];
                }
            }
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm < 1e-14 * (1.0 + scale) {
                break;
            }
            // backtracking line search on the smoothed objective
            let f0 = mu * wsum.ln() + fmax;
            let mut step = scale.min(1.0 + scale);
            let mut improved = false;
            for _ in 0..60 {
                let cand: Vec<f64> = c.iter().zip(&grad).map(|(ck, g)| ck - step * g / gnorm).collect();
                let vals: Vec<f64> = rows.iter().map(|r| smooth_norm(r, &cand, nu, None)).collect();
                let fm = vals.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
                let f1 = mu * vals.iter().map(|v| ((v - fm) / mu).exp()).sum::<f64>().ln() + fm;
                if f1 < f0 - 0.25 * step * gnorm {
                    c = cand;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        mu *= 0.04;
        nu *= 0.04;
    }
    let r = covering_radius(&c, rows, norm);
    (c, r)
}
