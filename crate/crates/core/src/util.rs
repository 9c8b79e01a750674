//! Small numeric helpers shared across modules.

/// Sum `values` in fixed-size chunks with a sequential combine.
///
/// Plain `fold` order already is deterministic, but pairwise chunking also
/// keeps rounding error O(sqrt(n)) instead of O(n) for the large nodal
/// reductions, and the fixed chunk size makes the result independent of
/// how callers later choose to split work.
pub fn chunked_sum(values: impl Iterator<Item = f64>) -> f64 {
    const CHUNK: usize = 4096;
    let mut partials: Vec<f64> = Vec::new();
    let mut acc = 0.0;
    let mut count = 0;
    for v in values {
        acc += v;
        count += 1;
        if count == CHUNK {
            partials.push(acc);
            acc = 0.0;
            count = 0;
        }
    }
    partials.push(acc);
    // pairwise reduction over the chunk partials
    while partials.len() > 1 {
        let mut next = Vec::with_capacity(partials.len() / 2 + 1);
        for pair in partials.chunks(2) {
            next.push(pair.iter().sum());
        }
        partials = next;
    }
    partials[0]
}

/// Least-squares fit of `y ~ sum_k c_k x^k` for `k = 0..=degree`.
/// Returns the coefficients (constant term first). Solved by normal
/// equations with Gaussian elimination; the systems here are tiny
/// (degree <= 3) and well scaled because x is O(1).
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Vec<f64> {
    assert_eq!(x.len(), y.len());
    assert!(x.len() > degree, "need more samples than coefficients");
    let m = degree + 1;
    let mut ata = vec![0.0; m * m];
    let mut atb = vec![0.0; m];
    for (&xi, &yi) in x.iter().zip(y) {
        let mut pow = vec![1.0; 2 * m - 1];
        for k in 1..2 * m - 1 {
            pow[k] = pow[k - 1] * xi;
        }
        for r in 0..m {
            for c in 0..m {
                ata[r * m + c] += pow[r + c];
            }
            atb[r] += pow[r] * yi;
        }
    }
    gauss_solve(&mut ata, &mut atb, m);
    atb
}

/// In-place Gaussian elimination with partial pivoting on an m-by-m system.
fn gauss_solve(a: &mut [f64], b: &mut [f64], m: usize) {
    for col in 0..m {
        let pivot_row = (col..m)
            .max_by(|&r1, &r2| a[r1 * m + col].abs().total_cmp(&a[r2 * m + col].abs()))
            .unwrap();
        if pivot_row != col {
            for k in 0..m {
                a.swap(col * m + k, pivot_row * m + k);
            }
            b.swap(col, pivot_row);
        }
        let p = a[col * m + col];
        assert!(p.abs() > 0.0, "singular least-squares system");
        for row in col + 1..m {
            let f = a[row * m + col] / p;
            for k in col..m {
                a[row * m + k] -= f * a[col * m + k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..m).rev() {
        let mut s = b[col];
        for k in col + 1..m {
            s -= a[col * m + k] * b[k];
        }
        b[col] = s / a[col * m + col];
    }
}

/// Evaluate a polynomial with coefficients `c` (constant term first).
pub fn polyval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

/// Trapezoid rule over samples `(x_k, y_k)` with `x` strictly increasing.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mut s = 0.0;
    for k in 1..x.len() {
        s += 0.5 * (y[k] + y[k - 1]) * (x[k] - x[k - 1]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_sum_matches_naive_on_smooth_data() {
        let vals: Vec<f64> = (0..20_000).map(|k| (k as f64 * 0.001).sin()).collect();
        let naive: f64 = vals.iter().sum();
        let det = chunked_sum(vals.iter().copied());
        assert!((naive - det).abs() < 1e-9 * naive.abs().max(1.0));
    }

    #[test]
    fn polyfit_recovers_exact_quadratic() {
        let x: Vec<f64> = (0..7).map(|k| 0.05 + 0.02 * k as f64).collect();
        let y: Vec<f64> = x.iter().map(|&xi| 3.0 - 2.0 * xi + 0.5 * xi * xi).collect();
        let c = polyfit(&x, &y, 2);
        assert!((c[0] - 3.0).abs() < 1e-10);
        assert!((c[1] + 2.0).abs() < 1e-9);
        assert!((c[2] - 0.5).abs() < 1e-8);
        assert!((polyval(&c, 0.1) - (3.0 - 0.2 + 0.005)).abs() < 1e-10);
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let x = [0.0, 0.3, 1.0];
        let y = [1.0, 1.6, 3.0];
        assert!((trapezoid(&x, &y) - 2.0).abs() < 1e-14);
    }
}
