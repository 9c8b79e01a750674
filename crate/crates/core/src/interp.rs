//! Trilinear interpolation of node fields at arbitrary chart points.

use crate::grid::GridChart;

/// Trilinear interpolation of component `comp` of a `comps`-component node
/// field at point `p`. Points outside the chart clamp to the boundary cell,
/// so callers that need strict containment must check it themselves.
pub fn trilinear(chart: &GridChart, data: &[f64], comps: usize, comp: usize, p: [f64; 3]) -> f64 {
    let n = chart.n();
    let h = chart.spacing();
    let mut cell = [0usize; 3];
    let mut frac = [0.0f64; 3];
    for axis in 0..3 {
        let s = (p[axis] + chart.half_width()) / h;
        let i = (s.floor() as isize).clamp(0, n as isize - 2) as usize;
        cell[axis] = i;
        frac[axis] = (s - i as f64).clamp(0.0, 1.0);
    }
    let mut value = 0.0;
    for di in 0..2 {
        for dj in 0..2 {
            for dk in 0..2 {
                let w = (if di == 0 { 1.0 - frac[0] } else { frac[0] })
                    * (if dj == 0 { 1.0 - frac[1] } else { frac[1] })
                    * (if dk == 0 { 1.0 - frac[2] } else { frac[2] });
                if w != 0.0 {
                    let idx = chart.index((cell[0] + di, cell[1] + dj, cell[2] + dk));
                    value += w * data[idx * comps + comp];
                }
            }
        }
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trilinear_reproduces_affine_fields_exactly() {
        let chart = GridChart::new(2.0, 17).unwrap();
        let f: Vec<f64> = chart
            .nodes()
            .map(|node| {
                let [x, y, z] = chart.position(node);
                1.0 + 2.0 * x - 0.5 * y + 3.0 * z
            })
            .collect();
        for p in [[0.13, -0.72, 1.9], [-1.99, 1.0, 0.0], [2.0, 2.0, 2.0]] {
            let want = 1.0 + 2.0 * p[0] - 0.5 * p[1] + 3.0 * p[2];
            assert_relative_eq!(trilinear(&chart, &f, 1, 0, p), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn trilinear_hits_node_values_exactly() {
        let chart = GridChart::new(1.0, 16).unwrap();
        let f: Vec<f64> = (0..chart.node_count()).map(|i| (i as f64).sin()).collect();
        let node = (3, 7, 11);
        let p = chart.position(node);
        assert_relative_eq!(
            trilinear(&chart, &f, 1, 0, p),
            f[chart.index(node)],
            epsilon = 1e-12
        );
    }
}
