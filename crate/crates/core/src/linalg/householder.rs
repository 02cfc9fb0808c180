use num_traits::{Float, Zero};
use crate::linalg::Matrix;
use crate::scalar::{Real, Scalar};

/// Generates an elementary reflector `H = I - τ v vᴴ`, `v = (1, x)`, with
/// `Hᴴ (α, x) = (β, 0)` and `β` real.
///
/// On return `alpha` holds `β` and `x` holds the tail of `v`; `τ` is returned.
pub(crate) fn make_reflector<S: Scalar>(alpha: &mut S, x: &mut [S]) -> S {
    let xnorm = x.iter().fold(S::Real::zero(), |acc, v| acc.hypot(v.modulus()));
    let (ar, ai) = (alpha.re(), alpha.im());
    if xnorm == S::Real::zero() && ai == S::Real::zero() {
        return S::zero();
    }
    let mut beta = ar.hypot(ai).hypot(xnorm);
    if ar >= S::Real::zero() {
        beta = -beta;
    }
    let tau = S::from_parts((beta - ar) / beta, -ai / beta);
    let inv = S::one() / (*alpha - S::from_real(beta));
    for v in x.iter_mut() {
        *v *= inv;
    }
    *alpha = S::from_real(beta);
    tau
}

/// Reduces a square matrix to upper Hessenberg form `A = Q H Qᴴ`.
///
/// Returns `H` and, when requested, the unitary (orthogonal for real input)
/// factor `Q`.
pub fn hessenberg<S: Scalar>(mut a: Matrix<S>, want_q: bool) -> (Matrix<S>, Option<Matrix<S>>) {
    assert!(a.is_square(), "Hessenberg reduction needs a square matrix");
    let n = a.rows();
    let mut q = want_q.then(|| Matrix::identity(n));
    let mut v = vec![S::zero(); n];
    let mut w = vec![S::zero(); n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut alpha = a[(k + 1, k)];
        let mut tail: Vec<S> = (k + 2..n).map(|i| a[(i, k)]).collect();
        let tau = make_reflector(&mut alpha, &mut tail);
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = S::zero();
        }
        if tau == S::zero() {
            continue;
        }
        v[0] = S::one();
        v[1..m].copy_from_slice(&tail);
        let v = &v[..m];

        // A[:, k+1..] <- A[:, k+1..] (I - τ v vᴴ)
        for r in 0..n {
            apply_right(&mut a.row_mut(r)[k + 1..], v, tau);
        }
        // A[k+1.., k+1..] <- (I - τ̄ v vᴴ) A[k+1.., k+1..]
        let w = &mut w[..m];
        w.fill(S::zero());
        for (i, &vi) in v.iter().enumerate() {
            let ci = vi.conj();
            for (wj, &x) in w.iter_mut().zip(&a.row(k + 1 + i)[k + 1..]) {
                *wj += ci * x;
            }
        }
        let tau_c = tau.conj();
        for (i, &vi) in v.iter().enumerate() {
            let f = tau_c * vi;
            for (x, &wj) in a.row_mut(k + 1 + i)[k + 1..].iter_mut().zip(w.iter()) {
                *x -= f * wj;
            }
        }
        if let Some(q) = q.as_mut() {
            for r in 0..n {
                apply_right(&mut q.row_mut(r)[k + 1..], v, tau);
            }
        }
    }
    (a, q)
}

/// `row <- row (I - τ v vᴴ)` for a single row segment.
#[inline]
fn apply_right<S: Scalar>(row: &mut [S], v: &[S], tau: S) {
    let s = row.iter().zip(v).fold(S::zero(), |acc, (&x, &vj)| acc + x * vj);
    let ts = tau * s;
    for (x, &vj) in row.iter_mut().zip(v) {
        *x -= ts * vj.conj();
    }
}

/// Orthonormal completion of a set of columns: returns a unitary `Q` whose
/// leading `k` columns span the same space as the columns of `basis`
/// (`n × k`, full column rank).
pub fn complete_basis<T: Real>(basis: &Matrix<T>) -> Matrix<T> {
    let (n, k) = (basis.rows(), basis.cols());
    let mut work = basis.clone();
    let mut q = Matrix::<T>::identity(n);
    for j in 0..k.min(n.saturating_sub(1)) {
        let mut alpha = work[(j, j)];
        let mut tail: Vec<T> = (j + 1..n).map(|i| work[(i, j)]).collect();
        let tau = make_reflector(&mut alpha, &mut tail);
        if tau == T::zero() {
            continue;
        }
        let mut v = vec![T::one()];
        v.extend_from_slice(&tail);
        // work[j.., j..] <- H work[j.., j..]
        for c in j..k {
            let s = (0..v.len()).fold(T::zero(), |acc, i| acc + v[i] * work[(j + i, c)]);
            for (i, &vi) in v.iter().enumerate() {
                work[(j + i, c)] -= tau * s * vi;
            }
        }
        // q <- q H
        for r in 0..n {
            apply_right(&mut q.row_mut(r)[j..], &v, tau);
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn residual<S: Scalar<Real = f64>>(a: &Matrix<S>, h: &Matrix<S>, q: &Matrix<S>) -> f64 {
        let back = q.matmul(h).matmul(&q.adjoint());
        let diff = Matrix::from_fn(a.rows(), a.cols(), |i, j| back[(i, j)] - a[(i, j)]);
        diff.frobenius_norm() / a.frobenius_norm()
    }

    #[test]
    fn reflector_annihilates_tail() {
        let mut alpha = Complex64::new(1.0, 2.0);
        let orig = [alpha, Complex64::new(-0.5, 0.25), Complex64::new(3.0, 0.0)];
        let mut x = [orig[1], orig[2]];
        let tau = make_reflector(&mut alpha, &mut x);
        // Hᴴ applied to the original vector gives (β, 0, 0).
        let v = [Complex64::new(1.0, 0.0), x[0], x[1]];
        let s: Complex64 = v.iter().zip(&orig).map(|(vi, oi)| vi.conj() * oi).sum();
        let out: Vec<Complex64> = orig.iter().zip(&v).map(|(&o, &vi)| o - tau.conj() * vi * s).collect();
        assert!((out[0] - alpha).norm() < 1e-14);
        assert!(out[1].norm() < 1e-14 && out[2].norm() < 1e-14);
        assert_eq!(alpha.im, 0.0);
    }

    #[test]
    fn real_hessenberg_is_similarity() {
        let n = 7;
        let a = Matrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0 + 0.1 * (i as f64));
        let (h, q) = hessenberg(a.clone(), true);
        let q = q.unwrap();
        for i in 2..n {
            for j in 0..i - 1 {
                assert_eq!(h[(i, j)], 0.0);
            }
        }
        assert!(residual(&a, &h, &q) < 1e-14);
        let qtq = q.transpose().matmul(&q);
        assert!((qtq.frobenius_norm() - (n as f64).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn complex_hessenberg_is_similarity() {
        let n = 6;
        let a = Matrix::from_fn(n, n, |i, j| Complex64::new((i as f64 - j as f64).sin(), (i * j) as f64 * 0.1 - 0.7));
        let (h, q) = hessenberg(a.clone(), true);
        let q = q.unwrap();
        assert!(residual(&a, &h, &q) < 1e-14);
    }

    #[test]
    fn completed_basis_spans_input() {
        let b = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 2.0], vec![1.0, -1.0]]);
        let q = complete_basis(&b);
        // Projection of each input column onto the trailing columns vanishes.
        for c in 0..2 {
            for j in 2..4 {
                let dot: f64 = (0..4).map(|i| q[(i, j)] * b[(i, c)]).sum();
                assert!(dot.abs() < 1e-14);
            }
        }
    }
}
