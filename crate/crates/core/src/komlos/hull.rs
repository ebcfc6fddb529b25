//! Minimum-norm point of the convex hull of finitely many points
//! (Wolfe's algorithm). Used to pick the convex combination of a block
//! that lies closest to the limit candidate.

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `min |Σ μ_i p_i|` subject to `Σ μ_i = 1` over the points in
/// `set`. Returns `None` when the points are affinely dependent.
fn affine_minimizer(points: &[Vec<f64>], set: &[usize]) -> Option<Vec<f64>> {
    let k = set.len();
    let n = k + 1;
    // Bordered system [G 1; 1ᵀ 0] [μ; ν] = [0; 1].
    let mut a = vec![vec![0.0; n + 1]; n];
    let mut scale = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let g = dot(&points[set[i]], &points[set[j]]);
            a[i][j] = g;
            scale = scale.max(g.abs());
        }
        a[i][k] = 1.0;
        a[k][i] = 1.0;
    }
    a[k][n] = 1.0;
    let scale = scale.max(1.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        a[row][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Some((0..k).map(|i| a[i][n] / a[i][i]).collect())
}

/// Convex weights (one per point) of the minimum-norm point of
/// `conv(points)`. Points must all have the same dimension.
pub(crate) fn min_norm_weights(points: &[Vec<f64>]) -> Vec<f64> {
    let m = points.len();
    let mut weights = vec![0.0; m];
    if m == 0 {
        return weights;
    }
    let norms: Vec<f64> = points.iter().map(|p| dot(p, p)).collect();
    let scale = norms.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let start = (0..m)
        .min_by(|&a, &b| norms[a].total_cmp(&norms[b]))
        .expect("non-empty");
    let mut set = vec![start];
    let mut lam = vec![1.0];
    let mut x = points[start].clone();
    let eps = 1e-14;

    for _ in 0..(50 * m + 100) {
        let xx = dot(&x, &x);
        if xx <= 1e-28 * scale {
            break;
        }
        let (j, xj) = (0..m)
            .map(|j| (j, dot(&x, &points[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if xx - xj <= 1e-12 * scale || set.contains(&j) {
            break;
        }
        set.push(j);
        lam.push(0.0);
        let mut stuck = false;
        loop {
            let Some(mu) = affine_minimizer(points, &set) else {
                set.pop();
                lam.pop();
                stuck = true;
                break;
            };
            if mu.iter().all(|&v| v > eps) {
                lam = mu;
                break;
            }
            let mut theta = 1.0f64;
            for (l, u) in lam.iter().zip(&mu) {
                if *u <= eps && l - u > 0.0 {
                    theta = theta.min(l / (l - u));
                }
            }
            for (l, u) in lam.iter_mut().zip(&mu) {
                *l = (1.0 - theta) * *l + theta * u;
            }
            let mut i = 0;
            while i < set.len() {
                if lam[i] <= eps {
                    set.remove(i);
                    lam.remove(i);
                } else {
                    i += 1;
                }
            }
            if set.is_empty() {
                set.push(start);
                lam.push(1.0);
                stuck = true;
                break;
            }
        }
        let total: f64 = lam.iter().sum();
        for l in &mut lam {
            *l /= total;
        }
        x = vec![0.0; points[0].len()];
        for (&i, &l) in set.iter().zip(&lam) {
            for (xc, pc) in x.iter_mut().zip(&points[i]) {
                *xc += l * pc;
            }
        }
        if stuck {
            break;
        }
    }
    for (&i, &l) in set.iter().zip(&lam) {
        weights[i] = l;
    }
    weights
}
