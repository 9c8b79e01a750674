//! Fixed-size linear algebra for metric blocks (symmetric 3x3 real) and
//! spinor blocks (2x2 complex). These are hot-path types, so everything is
//! inlined, allocation-free, and closed-form.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Symmetric 3x3 matrix stored as `[xx, xy, xz, yy, yz, zz]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym3(pub [f64; 6]);

impl Sym3 {
    pub const IDENTITY: Sym3 = Sym3([1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);

    pub fn diagonal(d: f64) -> Self {
        Sym3([d, 0.0, 0.0, d, 0.0, d])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        const POS: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
        self.0[POS[i][j]]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        const POS: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
        self.0[POS[i][j]] = v;
    }

    pub fn det(&self) -> f64 {
        let [a, b, c, d, e, f] = self.0;
        a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c)
    }

    /// Inverse of a symmetric positive definite matrix via the adjugate.
    pub fn inverse(&self) -> Sym3 {
        let [a, b, c, d, e, f] = self.0;
        let det = self.det();
        let inv = 1.0 / det;
        Sym3([
            (d * f - e * e) * inv,
            (c * e - b * f) * inv,
            (b * e - c * d) * inv,
            (a * f - c * c) * inv,
            (b * c - a * e) * inv,
            (a * d - b * b) * inv,
        ])
    }

    /// Lower-triangular Cholesky factor `L` with `g = L L^T`.
    /// Returns the factor rows `[l00, l10, l11, l20, l21, l22]`.
    pub fn cholesky(&self, node: (usize, usize, usize)) -> Result<[f64; 6]> {
        let [a, b, c, d, e, f] = self.0;
        if a <= 0.0 {
            return Err(Error::NotPositiveDefinite { node, pivot: a });
        }
        let l00 = a.sqrt();
        let l10 = b / l00;
        let l20 = c / l00;
        let p1 = d - l10 * l10;
        if p1 <= 0.0 {
            return Err(Error::NotPositiveDefinite { node, pivot: p1 });
        }
        let l11 = p1.sqrt();
        let l21 = (e - l20 * l10) / l11;
        let p2 = f - l20 * l20 - l21 * l21;
        if p2 <= 0.0 {
            return Err(Error::NotPositiveDefinite { node, pivot: p2 });
        }
        let l22 = p2.sqrt();
        Ok([l00, l10, l11, l20, l21, l22])
    }

    /// Quadratic form `v^T g v`.
    #[inline]
    pub fn quad(&self, v: [f64; 3]) -> f64 {
        let [a, b, c, d, e, f] = self.0;
        a * v[0] * v[0] + d * v[1] * v[1] + f * v[2] * v[2]
            + 2.0 * (b * v[0] * v[1] + c * v[0] * v[2] + e * v[1] * v[2])
    }

    /// Matrix-vector product.
    #[inline]
    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let [a, b, c, d, e, f] = self.0;
        [
            a * v[0] + b * v[1] + c * v[2],
            b * v[0] + d * v[1] + e * v[2],
            c * v[0] + e * v[1] + f * v[2],
        ]
    }

    pub fn scale(&self, s: f64) -> Sym3 {
        let mut out = *self;
        for v in &mut out.0 {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &Sym3) -> Sym3 {
        let mut out = *self;
        for (v, w) in out.0.iter_mut().zip(other.0) {
            *v += w;
        }
        out
    }

    /// Max absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Sym3) -> f64 {
        self.0
            .iter()
            .zip(other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Dense 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [C64; 4]);

pub const C_ZERO: C64 = C64::new(0.0, 0.0);
pub const C_ONE: C64 = C64::new(1.0, 0.0);
pub const C_I: C64 = C64::new(0.0, 1.0);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([C_ZERO; 4]);
    pub const IDENTITY: Mat2 = Mat2([C_ONE, C_ZERO, C_ZERO, C_ONE]);

    #[inline]
    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    }

    #[inline]
    pub fn mul_vec(&self, v: [C64; 2]) -> [C64; 2] {
        [self.0[0] * v[0] + self.0[1] * v[1], self.0[2] * v[0] + self.0[3] * v[1]]
    }

    #[inline]
    pub fn add(&self, o: &Mat2) -> Mat2 {
        Mat2([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }

    #[inline]
    pub fn scale(&self, s: C64) -> Mat2 {
        Mat2([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }

    /// Conjugate transpose.
    #[inline]
    pub fn dagger(&self) -> Mat2 {
        Mat2([self.0[0].conj(), self.0[2].conj(), self.0[1].conj(), self.0[3].conj()])
    }

    pub fn trace(&self) -> C64 {
        self.0[0] + self.0[3]
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        self.0
            .iter()
            .zip(o.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of a Hermitian 2x2 matrix, ascending. The caller is
    /// responsible for Hermiticity; the imaginary parts of the diagonal
    /// are ignored.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0].re;
        let d = self.0[3].re;
        let b = self.0[1];
        let tr = a + d;
        let gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [0.5 * tr - gap, 0.5 * tr + gap]
    }
}

/// Generators of the real Clifford algebra on flat R^3 acting on C^2:
/// `sigma_a sigma_b + sigma_b sigma_a = -2 delta_ab`. These are `i` times
/// the Pauli matrices, hence anti-Hermitian; the Dirac operator built from
/// them is formally self-adjoint.
pub const SIGMA: [Mat2; 3] = [
    Mat2([C_ZERO, C_I, C_I, C_ZERO]),
    Mat2([C_ZERO, C_ONE, C64::new(-1.0, 0.0), C_ZERO]),
    Mat2([C_I, C_ZERO, C_ZERO, C64::new(0.0, -1.0)]),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_relations_hold() {
        for a in 0..3 {
            for b in 0..3 {
                let anti = SIGMA[a].mul(&SIGMA[b]).add(&SIGMA[b].mul(&SIGMA[a]));
                let expect = if a == b { Mat2::IDENTITY.scale(C64::new(-2.0, 0.0)) } else { Mat2::ZERO };
                assert!(anti.max_abs_diff(&expect) < 1e-15, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn sigma_is_anti_hermitian() {
        for s in &SIGMA {
            let sum = s.dagger().add(s);
            assert!(sum.max_abs_diff(&Mat2::ZERO) < 1e-15);
        }
    }

    #[test]
    fn cholesky_factors_a_known_spd_matrix() {
        let g = Sym3([4.0, 2.0, -1.0, 5.0, 0.5, 3.0]);
        let l = g.cholesky((0, 0, 0)).unwrap();
        // rebuild g = L L^T
        let lm = [[l[0], 0.0, 0.0], [l[1], l[2], 0.0], [l[3], l[4], l[5]]];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += lm[i][k] * lm[j][k];
                }
                assert!((s - g.get(i, j)).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let g = Sym3([1.0, 2.0, 0.0, 1.0, 0.0, 1.0]); // 2x2 leading minor negative
        assert!(matches!(
            g.cholesky((1, 2, 3)),
            Err(Error::NotPositiveDefinite { node: (1, 2, 3), .. })
        ));
    }

    #[test]
    fn inverse_times_self_is_identity() {
        let g = Sym3([4.0, 2.0, -1.0, 5.0, 0.5, 3.0]);
        let inv = g.inverse();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += inv.get(i, k) * g.get(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_eigenvalues_match_hand_computation() {
        // [[2, 1-i], [1+i, 3]] has eigenvalues (5 +- sqrt(9))/2 = 1, 4... check:
        // tr = 5, det = 6 - |1+i|^2 = 4, gap = sqrt(25/4 - 4) = 1.5 -> {1, 4}
        let m = Mat2([
            C64::new(2.0, 0.0),
            C64::new(1.0, -1.0),
            C64::new(1.0, 1.0),
            C64::new(3.0, 0.0),
        ]);
        let [lo, hi] = m.hermitian_eigenvalues();
        assert!((lo - 1.0).abs() < 1e-14);
        assert!((hi - 4.0).abs() < 1e-14);
    }
}
