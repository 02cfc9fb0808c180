use num_complex::Complex64;

use crate::linalg::{complete_basis, Lu, Matrix};
use crate::mc::overlaps::real_axis_threshold;
use crate::mc::{domain, eigen_overlaps, GinibreMatrix, McError};

/// Incomplete Schur decomposition of a real matrix with respect to one
/// complex eigenvalue `z = x + iy`, `y > 0`:
///
/// ```text
/// G = Q G̃ Qᵀ,   G̃ = [ x   b  | w₁ᵀ ]
///                     [ −c  x  | w₂ᵀ ]
///                     [ 0   0  | G₂  ]
/// ```
///
/// with `bc > 0`, `b ≥ c`, `y = √(bc)` and `δ = b − c`.
#[derive(Clone, Debug)]
pub struct SchurFrame {
    pub x: f64,
    pub y: f64,
    pub b: f64,
    pub c: f64,
    pub delta_schur: f64,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub g2: Matrix<f64>,
    /// The orthogonal change of basis `Q`.
    pub q: Matrix<f64>,
}

impl SchurFrame {
    /// Builds the frame for the eigenvalue of `g` closest to `target` (either
    /// member of the conjugate pair may be given).
    ///
    /// The invariant plane is found by complex inverse iteration at `target`,
    /// independently of the Schur/QR eigensolver.
    pub fn new(g: &Matrix<f64>, target: Complex64) -> Result<Self, McError> {
        if !g.is_square() || g.rows() < 2 {
            return Err(domain("the incomplete Schur frame needs a square matrix with N >= 2"));
        }
        let n = g.rows();
        if !(target.im.abs() > real_axis_threshold(n)) {
            return Err(domain(format!("target {target} is real; the frame needs a complex eigenvalue")));
        }
        let z = Complex64::new(target.re, target.im.abs());
        let scale = g.frobenius_norm().max(f64::MIN_POSITIVE);
        let u = inverse_iteration(g, z, scale)?;

        let (e1, e2) = orthonormal_plane(&u).ok_or_else(|| domain("eigenvector does not span a plane"))?;
        let (f1, f2) = standardize(g, e1, e2)?;

        let mut q = complete_basis(&Matrix::from_fn(n, 2, |i, j| if j == 0 { f1[i] } else { f2[i] }));
        for i in 0..n {
            q[(i, 0)] = f1[i];
            q[(i, 1)] = f2[i];
        }
        let gt = q.transpose().matmul(g).matmul(&q);
        let leak = (2..n).flat_map(|i| [gt[(i, 0)], gt[(i, 1)]]).fold(0.0f64, |m, v| m.max(v.abs()));
        if leak > 1e-8 * scale {
            return Err(domain(format!("2x2 block not isolated (residual {leak:e}); {target} is not an eigenvalue")));
        }
        let x = 0.5 * (gt[(0, 0)] + gt[(1, 1)]);
        let (b, c) = (gt[(0, 1)], -gt[(1, 0)]);
        Ok(Self {
            x,
            y: (b * c).sqrt(),
            b,
            c,
            delta_schur: b - c,
            w1: (2..n).map(|j| gt[(0, j)]).collect(),
            w2: (2..n).map(|j| gt[(1, j)]).collect(),
            g2: Matrix::from_fn(n - 2, n - 2, |i, j| gt[(i + 2, j + 2)]),
            q,
        })
    }

    pub fn eigenvalue(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// `√(b/c) = exp(arcsinh(δ/(2y)))`.
    fn ratio_root(&self) -> f64 {
        (self.delta_schur / (2.0 * self.y)).asinh().exp()
    }

    /// `c̃₁ = (2 + (δ² + 2y²)/y²)/4`.
    pub fn c1(&self) -> f64 {
        let (d, y) = (self.delta_schur, self.y);
        0.25 * (2.0 + (d * d + 2.0 * y * y) / (y * y))
    }

    /// `c̃₂ = (1 + exp(−2 arcsinh(δ/(2y))))/2`.
    pub fn c2(&self) -> f64 {
        let r = self.ratio_root();
        0.5 * (1.0 + 1.0 / (r * r))
    }

    /// `c̃₁` from `b` and `c` directly: `(2 + (b² + c²)/(bc))/4`.
    pub fn c1_bc(&self) -> f64 {
        0.25 * (2.0 + (self.b * self.b + self.c * self.c) / (self.b * self.c))
    }

    /// `c̃₂` from `b` and `c` directly: `(1 + c/b)/2`.
    pub fn c2_bc(&self) -> f64 {
        0.5 * (1.0 + self.c / self.b)
    }

    /// The vector `b_{N−2}` entering the left eigenvector, from
    /// `b_{N−2}† (z − G₂) = (w₁ᵀ − i√(b/c) w₂ᵀ)/√2`.
    pub fn b_vector(&self) -> Result<Vec<Complex64>, McError> {
        let m = self.g2.rows();
        if m == 0 {
            return Ok(Vec::new());
        }
        let z = self.eigenvalue();
        let shifted = Matrix::from_fn(m, m, |i, j| {
            let g = Complex64::new(-self.g2[(i, j)], 0.0);
            if i == j {
                g + z
            } else {
                g
            }
        });
        let r = self.ratio_root();
        let rhs: Vec<Complex64> = self
            .w1
            .iter()
            .zip(&self.w2)
            .map(|(&a, &b)| Complex64::new(a, -r * b) * std::f64::consts::FRAC_1_SQRT_2)
            .collect();
        // Row vector times (z − G₂)⁻¹ is a transposed solve; the result is b†.
        let b_dagger = Lu::new(shifted)?.solve_transpose(&rhs);
        Ok(b_dagger.into_iter().map(|v| v.conj()).collect())
    }

    /// `O_z = c̃₁ + c̃₂ ‖b_{N−2}‖²`.
    pub fn self_overlap(&self) -> Result<f64, McError> {
        let b = self.b_vector()?;
        let norm: f64 = b.iter().map(|v| v.norm_sqr()).sum();
        Ok(self.c1() + self.c2() * norm)
    }

    /// The block matrix `G̃` rebuilt from the frame's parameters.
    pub fn reassemble(&self) -> Matrix<f64> {
        let n = self.g2.rows() + 2;
        let mut gt = Matrix::zeros(n, n);
        gt[(0, 0)] = self.x;
        gt[(1, 1)] = self.x;
        gt[(0, 1)] = self.b;
        gt[(1, 0)] = -self.c;
        for j in 2..n {
            gt[(0, j)] = self.w1[j - 2];
            gt[(1, j)] = self.w2[j - 2];
            for i in 2..n {
                gt[(i, j)] = self.g2[(i - 2, j - 2)];
            }
        }
        gt
    }
}

fn inverse_iteration(g: &Matrix<f64>, z: Complex64, scale: f64) -> Result<Vec<Complex64>, McError> {
    let n = g.rows();
    let shifted = |shift: Complex64| {
        Matrix::from_fn(n, n, |i, j| {
            let v = Complex64::new(g[(i, j)], 0.0);
            if i == j {
                v - shift
            } else {
                v
            }
        })
    };
    let lu = match Lu::new(shifted(z)) {
        Ok(lu) => lu,
        Err(_) => Lu::new(shifted(z + Complex64::new(scale * f64::EPSILON, 0.0)))?,
    };
    let mut u: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.37 * i as f64, 0.11 * (i % 3) as f64)).collect();
    for _ in 0..3 {
        u = lu.solve(&u);
        let norm = u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(domain("inverse iteration broke down"));
        }
        u.iter_mut().for_each(|v| *v /= norm);
    }
    let gu = g.to_complex().matvec(&u);
    let resid = gu.iter().zip(&u).map(|(a, b)| (a - z * b).norm_sqr()).sum::<f64>().sqrt();
    if resid > 1e-6 * scale {
        return Err(domain(format!("{z} is not an eigenvalue (inverse-iteration residual {resid:e})")));
    }
    Ok(u)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalized(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = dot(&v, &v).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

/// Orthonormal basis of `span{Re u, Im u}` (Gram–Schmidt, applied twice).
fn orthonormal_plane(u: &[Complex64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let p: Vec<f64> = u.iter().map(|v| v.re).collect();
    let q: Vec<f64> = u.iter().map(|v| v.im).collect();
    let (p, q) = if dot(&p, &p) >= dot(&q, &q) { (p, q) } else { (q, p) };
    let e1 = normalized(p)?;
    let mut e2 = q;
    let q_norm = dot(&e2, &e2).sqrt();
    for _ in 0..2 {
        let s = dot(&e1, &e2);
        e2.iter_mut().zip(&e1).for_each(|(x, y)| *x -= s * y);
    }
    if dot(&e2, &e2).sqrt() <= 1e-10 * q_norm {
        return None;
    }
    Some((e1, normalized(e2)?))
}

fn restricted(g: &Matrix<f64>, e1: &[f64], e2: &[f64]) -> [[f64; 2]; 2] {
    let (g1, g2) = (g.matvec(e1), g.matvec(e2));
    [[dot(e1, &g1), dot(e1, &g2)], [dot(e2, &g1), dot(e2, &g2)]]
}

/// Rotates the plane so the restricted 2×2 block reads `[[x, b], [−c, x]]`
/// with `b ≥ c > 0`.
fn standardize(g: &Matrix<f64>, e1: Vec<f64>, e2: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>), McError> {
    let m = restricted(g, &e1, &e2);
    let theta = 0.5 * (-(m[0][0] - m[1][1])).atan2(m[0][1] + m[1][0]);
    let (sn, cs) = theta.sin_cos();
    let mut f1: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| cs * a + sn * b).collect();
    let mut f2: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| -sn * a + cs * b).collect();
    let m = restricted(g, &f1, &f2);
    let (mut b, mut c) = (m[0][1], -m[1][0]);
    if b < 0.0 {
        f2.iter_mut().for_each(|v| *v = -*v);
        b = -b;
        c = -c;
    }
    if !(b * c > 0.0) {
        return Err(domain("restricted block has real eigenvalues"));
    }
    if b < c {
        let neg_f1: Vec<f64> = f1.iter().map(|v| -v).collect();
        f1 = std::mem::replace(&mut f2, neg_f1);
    }
    Ok((f1, f2))
}

/// Self-overlap of a complex eigenvalue of a real matrix computed twice: via
/// the incomplete Schur frame and via the eigen_overlaps pipeline. Returns
/// `(overlap_schur, overlap_direct)`.
pub fn schur_cross_check(matrix: &Matrix<f64>, target: Complex64) -> Result<(f64, f64), McError> {
    let frame = SchurFrame::new(matrix, target)?;
    let schur = frame.self_overlap()?;
    let direct = eigen_overlaps(&GinibreMatrix::Real(matrix.clone()), f64::INFINITY)?;
    let k = (0..direct.eigenvalues.len())
        .min_by(|&i, &j| (direct.eigenvalues[i] - target).norm().total_cmp(&(direct.eigenvalues[j] - target).norm()))
        .expect("non-empty spectrum");
    Ok((schur, direct.self_overlaps[k]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_schur;
    use crate::mc::{sample_matrix, EnsembleConfig};
    use crate::theory::EnsembleKind;

    fn ginoe(n: usize, seed: u64, index: u64) -> Matrix<f64> {
        match sample_matrix(&EnsembleConfig::new(EnsembleKind::GinOE, n, 1, seed), index) {
            GinibreMatrix::Real(m) => m,
            GinibreMatrix::Complex(_) => unreachable!(),
        }
    }

    fn complex_eigenvalues(g: &Matrix<f64>) -> Vec<Complex64> {
        real_schur(g.clone(), false).unwrap().eigenvalues.into_iter().filter(|z| z.im > 1e-6).collect()
    }

    #[test]
    fn both_routes_agree_on_six_by_six() {
        let mut checked = 0;
        for index in 0..10 {
            let g = ginoe(6, 314, index);
            for z in complex_eigenvalues(&g) {
                let (schur, direct) = schur_cross_check(&g, z).unwrap();
                assert!((schur - direct).abs() <= 1e-8 * direct, "{schur} vs {direct}");
                let (schur_conj, _) = schur_cross_check(&g, z.conj()).unwrap();
                assert!((schur_conj - schur).abs() <= 1e-10 * schur);
                checked += 1;
            }
        }
        assert!(checked >= 10);
    }

    #[test]
    fn constructed_block_gives_closed_form() {
        let n = 6;
        let (x, b, c) = (0.3, 2.0, 0.5);
        let g2 = ginoe(n - 2, 1, 0);
        let block = Matrix::from_fn(n, n, |i, j| match (i, j) {
            (0, 0) | (1, 1) => x,
            (0, 1) => b,
            (1, 0) => -c,
            (i, j) if i >= 2 && j >= 2 => g2[(i - 2, j - 2)],
            _ => 0.0,
        });
        // Hide the block with a random orthogonal similarity.
        let q = complete_basis(&ginoe(n, 2, 0));
        let g = q.matmul(&block).matmul(&q.transpose());
        let frame = SchurFrame::new(&g, Complex64::new(x, 1.0)).unwrap();
        assert!((frame.b - 2.0).abs() < 1e-12 && (frame.c - 0.5).abs() < 1e-12);
        assert!((frame.y - 1.0).abs() < 1e-12 && (frame.delta_schur - 1.5).abs() < 1e-12);
        assert!(frame.w1.iter().chain(&frame.w2).all(|w| w.abs() < 1e-12));
        assert!((frame.self_overlap().unwrap() - 1.5625).abs() < 1e-12);
        assert!((frame.c1() - 1.5625).abs() < 1e-14);
        assert!((frame.c1() - frame.c1_bc()).abs() < 1e-14);
        assert!((frame.c2() - frame.c2_bc()).abs() < 1e-14);
    }

    #[test]
    fn frame_invariants_hold() {
        for index in 0..20 {
            let g = ginoe(10, 9, index);
            for z in complex_eigenvalues(&g) {
                let f = SchurFrame::new(&g, z).unwrap();
                assert!((f.y * f.y - f.b * f.c).abs() <= 1e-10 * f.b * f.c);
                assert!(f.b >= f.c && f.c > 0.0 && f.delta_schur >= 0.0);
                assert!((f.eigenvalue() - z).norm() < 1e-10);
                assert!((f.c2() - f.c2_bc()).abs() < 1e-12 && (f.c1() - f.c1_bc()).abs() <= 1e-12 * f.c1());
                // Q G̃ Qᵀ reproduces G.
                let back = f.q.matmul(&f.reassemble()).matmul(&f.q.transpose());
                let err = back.add(&g.scaled(-1.0)).max_abs();
                assert!(err < 1e-10, "reassembly error {err}");
                // and G̃ carries the same spectrum.
                let mut a = real_schur(f.reassemble(), false).unwrap().eigenvalues;
                let mut b = real_schur(g.clone(), false).unwrap().eigenvalues;
                let key = |z: &Complex64| (z.re, z.im);
                a.sort_by(|p, q| key(p).partial_cmp(&key(q)).unwrap());
                b.sort_by(|p, q| key(p).partial_cmp(&key(q)).unwrap());
                for (p, q) in a.iter().zip(&b) {
                    assert!((p - q).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn real_target_is_a_domain_error() {
        let g = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 3.0]]);
        assert!(matches!(SchurFrame::new(&g, Complex64::new(1.0, 0.0)), Err(McError::Domain(_))));
        let g = ginoe(6, 314, 0);
        assert!(matches!(SchurFrame::new(&g, Complex64::new(17.0, 9.0)), Err(McError::Domain(_))));
    }

    #[test]
    fn routes_agree_across_sizes() {
        let mut trials = 0;
        let mut index = 0;
        while trials < 100 {
            let n = [4, 6, 10][trials % 3];
            let g = ginoe(n, 2718, index);
            index += 1;
            let Some(&z) = complex_eigenvalues(&g).first() else { continue };
            let (schur, direct) = schur_cross_check(&g, z).unwrap();
            assert!((schur - direct).abs() <= 1e-8 * direct, "N = {n}: {schur} vs {direct}");
            trials += 1;
        }
    }
}
