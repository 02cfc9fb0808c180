use num_complex::Complex;

use crate::linalg::householder::{hessenberg, make_reflector};
use crate::linalg::{LinalgError, Matrix};
use crate::scalar::{Real, Scalar};

/// Real Schur form `A = Z T Zᵀ` with `T` quasi-triangular.
///
/// Every 2×2 diagonal block of `T` is standardized: equal diagonal entries
/// and off-diagonal entries of opposite sign, so the block carries a
/// conjugate pair `t₀₀ ± i√(−t₀₁t₁₀)`.
#[derive(Clone, Debug)]
pub struct RealSchur<T> {
    pub t: Matrix<T>,
    pub z: Option<Matrix<T>>,
    /// Eigenvalues in diagonal order; pairs appear as `(λ, λ̄)` with `Im λ > 0` first.
    pub eigenvalues: Vec<Complex<T>>,
}

/// Complex Schur form `A = Z T Zᴴ` with `T` upper triangular.
#[derive(Clone, Debug)]
pub struct ComplexSchur<T> {
    pub t: Matrix<Complex<T>>,
    pub z: Option<Matrix<Complex<T>>>,
}

impl<T: Real> ComplexSchur<T> {
    pub fn eigenvalues(&self) -> Vec<Complex<T>> {
        (0..self.t.rows()).map(|i| self.t[(i, i)]).collect()
    }
}

/// Fortran `SIGN(a, b)`.
#[inline]
fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Schur factorization of a real 2×2 block `[[a, b], [c, d]]`.
///
/// Returns the standardized block, the eigenvalues `(rt1, rt2)` and the
/// rotation `(cs, sn)` with
/// `[[a, b], [c, d]]ₒₗ = [[cs, −sn], [sn, cs]] · new · [[cs, sn], [−sn, cs]]`.
#[allow(clippy::type_complexity)]
pub(crate) fn lanv2<T: Real>(mut a: T, mut b: T, mut c: T, mut d: T) -> ([T; 4], [Complex<T>; 2], T, T) {
    let zero = T::zero();
    let one = T::one();
    let half = T::lit(0.5);
    let multpl = T::lit(4.0);
    let eps = T::epsilon();
    let (mut cs, mut sn);

    if c == zero {
        cs = one;
        sn = zero;
    } else if b == zero {
        cs = zero;
        sn = one;
        std::mem::swap(&mut a, &mut d);
        b = -c;
        c = zero;
    } else if a - d == zero && sign(one, b) != sign(one, c) {
        cs = one;
        sn = zero;
    } else {
        let temp = a - d;
        let mut p = half * temp;
        let bcmax = b.abs().max(c.abs());
        let bcmis = b.abs().min(c.abs()) * sign(one, b) * sign(one, c);
        let scale = p.abs().max(bcmax);
        let mut z = (p / scale) * p + (bcmax / scale) * bcmis;
        if z >= multpl * eps {
            // Real eigenvalues.
            z = p + sign(scale.sqrt() * z.sqrt(), p);
            a = d + z;
            d -= (bcmax / z) * bcmis;
            let tau = c.hypot(z);
            cs = z / tau;
            sn = c / tau;
            b -= c;
            c = zero;
        } else {
            // Complex or nearly equal real eigenvalues: equalize the diagonal.
            let sigma = b + c;
            let tau = sigma.hypot(temp);
            cs = (half * (one + sigma.abs() / tau)).sqrt();
            sn = -(p / (tau * cs)) * sign(one, sigma);

            let aa = a * cs + b * sn;
            let bb = -a * sn + b * cs;
            let cc = c * cs + d * sn;
            let dd = -c * sn + d * cs;

            a = aa * cs + cc * sn;
            b = bb * cs + dd * sn;
            c = -aa * sn + cc * cs;
            d = -bb * sn + dd * cs;

            let temp = half * (a + d);
            a = temp;
            d = temp;

            if c != zero {
                if b != zero {
                    if sign(one, b) == sign(one, c) {
                        // Real eigenvalues after all.
                        let sab = b.abs().sqrt();
                        let sac = c.abs().sqrt();
                        p = sign(sab * sac, c);
                        let tau = one / (b + c).abs().sqrt();
                        a = temp + p;
                        d = temp - p;
                        b -= c;
                        c = zero;
                        let cs1 = sab * tau;
                        let sn1 = sac * tau;
                        let t = cs * cs1 - sn * sn1;
                        sn = cs * sn1 + sn * cs1;
                        cs = t;
                    }
                } else {
                    b = -c;
                    c = zero;
                    let t = cs;
                    cs = -sn;
                    sn = t;
                }
            }
        }
    }

    let (rt1, rt2) = if c == zero {
        (Complex::new(a, zero), Complex::new(d, zero))
    } else {
        let im = b.abs().sqrt() * c.abs().sqrt();
        (Complex::new(a, im), Complex::new(d, -im))
    };
    ([a, b, c, d], [rt1, rt2], cs, sn)
}

/// Real Schur decomposition by Householder reduction to Hessenberg form and
/// the double-shift Francis QR iteration.
pub fn real_schur<T: Real>(a: Matrix<T>, want_z: bool) -> Result<RealSchur<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if a.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let (mut h, mut z) = hessenberg(a, want_z);
    let eigenvalues = francis_qr(&mut h, z.as_mut())?;
    Ok(RealSchur { t: h, z, eigenvalues })
}

fn francis_qr<T: Real>(h: &mut Matrix<T>, mut z: Option<&mut Matrix<T>>) -> Result<Vec<Complex<T>>, LinalgError> {
    let n = h.rows();
    let mut eig = vec![Complex::new(T::zero(), T::zero()); n];
    if n == 0 {
        return Ok(eig);
    }
    if n == 1 {
        eig[0] = Complex::new(h[(0, 0)], T::zero());
        return Ok(eig);
    }
    for j in 0..n.saturating_sub(3) {
        h[(j + 2, j)] = T::zero();
        h[(j + 3, j)] = T::zero();
    }
    if n >= 3 {
        h[(n - 1, n - 3)] = T::zero();
    }

    let zero = T::zero();
    let ulp = T::epsilon();
    let smlnum = T::min_positive_value() * (T::from_count(n) / ulp);
    let dat1 = T::lit(0.75);
    let dat2 = T::lit(-0.4375);
    let itmax = 30 * n.max(10);
    let kexsh = 10;
    let mut kdefl = 0usize;

    // Active block is rows/cols l..=i; `i` counts down as eigenvalues deflate.
    let mut i = n as isize - 1;
    while i >= 0 {
        let iu = i as usize;
        let mut l = 0usize;
        let mut converged = false;

        for _its in 0..=itmax {
            // Look for a single small subdiagonal element.
            let mut k = iu;
            while k > l {
                if h[(k, k - 1)].abs() <= smlnum {
                    break;
                }
                let mut tst = h[(k - 1, k - 1)].abs() + h[(k, k)].abs();
                if tst == zero {
                    if k >= 2 {
                        tst += h[(k - 1, k - 2)].abs();
                    }
                    if k + 1 < n {
                        tst += h[(k + 1, k)].abs();
                    }
                }
                if h[(k, k - 1)].abs() <= ulp * tst {
                    let ab = h[(k, k - 1)].abs().max(h[(k - 1, k)].abs());
                    let ba = h[(k, k - 1)].abs().min(h[(k - 1, k)].abs());
                    let aa = h[(k, k)].abs().max((h[(k - 1, k - 1)] - h[(k, k)]).abs());
                    let bb = h[(k, k)].abs().min((h[(k - 1, k - 1)] - h[(k, k)]).abs());
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                h[(l, l - 1)] = zero;
            }
            if l + 1 >= iu {
                converged = true;
                break;
            }
            kdefl += 1;

            // Shifts.
            let (h11, h21, h12, h22);
            if kdefl % (2 * kexsh) == 0 {
                let s = h[(iu, iu - 1)].abs() + h[(iu - 1, iu - 2)].abs();
                h11 = dat1 * s + h[(iu, iu)];
                h12 = dat2 * s;
                h21 = s;
                h22 = h11;
            } else if kdefl % kexsh == 0 {
                let s = h[(l + 1, l)].abs() + h[(l + 2, l + 1)].abs();
                h11 = dat1 * s + h[(l, l)];
                h12 = dat2 * s;
                h21 = s;
                h22 = h11;
            } else {
                h11 = h[(iu - 1, iu - 1)];
                h21 = h[(iu, iu - 1)];
                h12 = h[(iu - 1, iu)];
                h22 = h[(iu, iu)];
            }
            let s = h11.abs() + h12.abs() + h21.abs() + h22.abs();
            let (rt1r, rt1i, rt2r, rt2i);
            if s == zero {
                rt1r = zero;
                rt1i = zero;
                rt2r = zero;
                rt2i = zero;
            } else {
                let (h11, h21, h12, h22) = (h11 / s, h21 / s, h12 / s, h22 / s);
                let tr = (h11 + h22) / T::lit(2.0);
                let det = (h11 - tr) * (h22 - tr) - h12 * h21;
                let rtdisc = det.abs().sqrt();
                if det >= zero {
                    rt1r = tr * s;
                    rt2r = rt1r;
                    rt1i = rtdisc * s;
                    rt2i = -rt1i;
                } else {
                    let a = tr + rtdisc;
                    let b = tr - rtdisc;
                    let pick = if (a - h22).abs() <= (b - h22).abs() { a * s } else { b * s };
                    rt1r = pick;
                    rt2r = pick;
                    rt1i = zero;
                    rt2i = zero;
                }
            }

            // Look for two consecutive small subdiagonal elements.
            let mut v = [zero; 3];
            let mut m = iu - 2;
            loop {
                let h21s = h[(m + 1, m)];
                let s = (h[(m, m)] - rt2r).abs() + rt2i.abs() + h21s.abs();
                let h21s = h[(m + 1, m)] / s;
                v[0] = h21s * h[(m, m + 1)] + (h[(m, m)] - rt1r) * ((h[(m, m)] - rt2r) / s) - rt1i * (rt2i / s);
                v[1] = h21s * (h[(m, m)] + h[(m + 1, m + 1)] - rt1r - rt2r);
                v[2] = h21s * h[(m + 2, m + 1)];
                let s = v[0].abs() + v[1].abs() + v[2].abs();
                for x in &mut v {
                    *x /= s;
                }
                if m == l {
                    break;
                }
                let h00 = h[(m, m - 1)].abs() * (v[1].abs() + v[2].abs());
                let h01 = v[0].abs() * (h[(m - 1, m - 1)].abs() + h[(m, m)].abs() + h[(m + 1, m + 1)].abs());
                if h00 <= ulp * h01 {
                    break;
                }
                m -= 1;
            }

            // Double-shift QR sweep.
            for k in m..iu {
                let nr = 3.min(iu - k + 1);
                if k > m {
                    for (j, x) in v.iter_mut().enumerate().take(nr) {
                        *x = h[(k + j, k - 1)];
                    }
                }
                let (head, tail) = v.split_at_mut(1);
                let t1 = make_reflector(&mut head[0], &mut tail[..nr - 1]);
                if k > m {
                    h[(k, k - 1)] = v[0];
                    h[(k + 1, k - 1)] = zero;
                    if k + 1 < iu {
                        h[(k + 2, k - 1)] = zero;
                    }
                } else if m > l {
                    // Rounding fix from LAPACK's dlahqr.
                    h[(k, k - 1)] *= T::one() - t1;
                }
                let v2 = v[1];
                let t2 = t1 * v2;
                if nr == 3 {
                    let v3 = v[2];
                    let t3 = t1 * v3;
                    for j in k..n {
                        let sum = h[(k, j)] + v2 * h[(k + 1, j)] + v3 * h[(k + 2, j)];
                        h[(k, j)] -= sum * t1;
                        h[(k + 1, j)] -= sum * t2;
                        h[(k + 2, j)] -= sum * t3;
                    }
                    for j in 0..=(k + 3).min(iu) {
                        let sum = h[(j, k)] + v2 * h[(j, k + 1)] + v3 * h[(j, k + 2)];
                        h[(j, k)] -= sum * t1;
                        h[(j, k + 1)] -= sum * t2;
                        h[(j, k + 2)] -= sum * t3;
                    }
                    if let Some(z) = z.as_deref_mut() {
                        for j in 0..n {
                            let row = z.row_mut(j);
                            let sum = row[k] + v2 * row[k + 1] + v3 * row[k + 2];
                            row[k] -= sum * t1;
                            row[k + 1] -= sum * t2;
                            row[k + 2] -= sum * t3;
                        }
                    }
                } else if nr == 2 {
                    for j in k..n {
                        let sum = h[(k, j)] + v2 * h[(k + 1, j)];
                        h[(k, j)] -= sum * t1;
                        h[(k + 1, j)] -= sum * t2;
                    }
                    for j in 0..=iu {
                        let sum = h[(j, k)] + v2 * h[(j, k + 1)];
                        h[(j, k)] -= sum * t1;
                        h[(j, k + 1)] -= sum * t2;
                    }
                    if let Some(z) = z.as_deref_mut() {
                        for j in 0..n {
                            let row = z.row_mut(j);
                            let sum = row[k] + v2 * row[k + 1];
                            row[k] -= sum * t1;
                            row[k + 1] -= sum * t2;
                        }
                    }
                }
            }
        }

        if !converged {
            return Err(LinalgError::NoConvergence { index: iu });
        }

        if l == iu {
            eig[iu] = Complex::new(h[(iu, iu)], zero);
        } else {
            // 2×2 block at rows iu-1, iu.
            let p = iu - 1;
            let ([a, b, c, d], [r1, r2], cs, sn) = lanv2(h[(p, p)], h[(p, iu)], h[(iu, p)], h[(iu, iu)]);
            h[(p, p)] = a;
            h[(p, iu)] = b;
            h[(iu, p)] = c;
            h[(iu, iu)] = d;
            eig[p] = r1;
            eig[iu] = r2;
            for j in iu + 1..n {
                let (x, y) = (h[(p, j)], h[(iu, j)]);
                h[(p, j)] = cs * x + sn * y;
                h[(iu, j)] = cs * y - sn * x;
            }
            for j in 0..p {
                let (x, y) = (h[(j, p)], h[(j, iu)]);
                h[(j, p)] = cs * x + sn * y;
                h[(j, iu)] = cs * y - sn * x;
            }
            if let Some(z) = z.as_deref_mut() {
                for j in 0..n {
                    let row = z.row_mut(j);
                    let (x, y) = (row[p], row[iu]);
                    row[p] = cs * x + sn * y;
                    row[iu] = cs * y - sn * x;
                }
            }
        }
        kdefl = 0;
        i = l as isize - 1;
    }
    Ok(eig)
}

impl<T: Real> RealSchur<T> {
    /// Unitary reduction of the standardized quasi-triangular form to a
    /// complex upper-triangular one with the same diagonal order.
    pub fn into_complex(self) -> ComplexSchur<T> {
        let n = self.t.rows();
        let mut t = self.t.to_complex();
        let mut z = self.z.map(|z| z.to_complex());
        let mut k = 0;
        while k < n {
            if k + 1 < n && self.t[(k + 1, k)] != T::zero() {
                let b = self.t[(k, k + 1)];
                let omega = self.eigenvalues[k].im;
                let nu = b.hypot(omega);
                let beta = b / nu;
                let gamma = Complex::new(T::zero(), omega / nu);
                // G = [[β, iγ], [iγ, β]] has first column ∝ (b, iω), the
                // eigenvector of the block for t₀₀ + iω.
                for j in k..n {
                    let (x, y) = (t[(k, j)], t[(k + 1, j)]);
                    t[(k, j)] = x.scale(beta) - gamma * y;
                    t[(k + 1, j)] = y.scale(beta) - gamma * x;
                }
                for j in 0..k + 2 {
                    let (x, y) = (t[(j, k)], t[(j, k + 1)]);
                    t[(j, k)] = x.scale(beta) + gamma * y;
                    t[(j, k + 1)] = y.scale(beta) + gamma * x;
                }
                if let Some(z) = z.as_mut() {
                    for j in 0..n {
                        let row = z.row_mut(j);
                        let (x, y) = (row[k], row[k + 1]);
                        row[k] = x.scale(beta) + gamma * y;
                        row[k + 1] = y.scale(beta) + gamma * x;
                    }
                }
                t[(k + 1, k)] = Complex::new(T::zero(), T::zero());
                t[(k, k)] = self.eigenvalues[k];
                t[(k + 1, k + 1)] = self.eigenvalues[k + 1];
                k += 2;
            } else {
                k += 1;
            }
        }
        ComplexSchur { t, z }
    }
}

/// Complex Schur decomposition by Householder reduction to Hessenberg form
/// and single-shift QR with Wilkinson shifts.
pub fn complex_schur<T: Real>(a: Matrix<Complex<T>>, want_z: bool) -> Result<ComplexSchur<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if a.as_slice().iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let (mut h, mut z) = hessenberg(a, want_z);
    single_shift_qr(&mut h, z.as_mut())?;
    Ok(ComplexSchur { t: h, z })
}

/// Givens rotation `[[c, s], [−s̄, c]]` with real `c` mapping `(x, y)` to `(r, 0)`.
#[inline]
fn givens<T: Real>(x: Complex<T>, y: Complex<T>) -> (T, Complex<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    if y == zero {
        return (T::one(), zero);
    }
    if x == zero {
        return (T::zero(), y.conj().scale(y.modulus().recip()));
    }
    let ax = x.modulus();
    let rho = ax.hypot(y.modulus());
    (ax / rho, x.scale(ax.recip()) * y.conj().scale(rho.recip()))
}

fn single_shift_qr<T: Real>(h: &mut Matrix<Complex<T>>, mut z: Option<&mut Matrix<Complex<T>>>) -> Result<(), LinalgError> {
    let n = h.rows();
    if n <= 1 {
        return Ok(());
    }
    for i in 2..n {
        for j in 0..i - 1 {
            h[(i, j)] = Complex::new(T::zero(), T::zero());
        }
    }
    let zero = T::zero();
    let czero = Complex::new(zero, zero);
    let half = T::lit(0.5);
    let ulp = T::epsilon();
    let smlnum = T::min_positive_value() * (T::from_count(n) / ulp);
    let itmax = 30 * n.max(10);
    let kexsh = 10;
    let mut kdefl = 0usize;

    let mut i = n as isize - 1;
    while i >= 0 {
        let iu = i as usize;
        let mut l = 0usize;
        let mut converged = false;
        for _its in 0..=itmax {
            let mut k = iu;
            while k > l {
                let sub = h[(k, k - 1)].abs1();
                if sub <= smlnum {
                    break;
                }
                let mut tst = h[(k - 1, k - 1)].abs1() + h[(k, k)].abs1();
                if tst == zero {
                    if k >= 2 {
                        tst += h[(k - 1, k - 2)].re.abs();
                    }
                    if k + 1 < n {
                        tst += h[(k + 1, k)].re.abs();
                    }
                }
                if sub <= ulp * tst {
                    let ab = sub.max(h[(k - 1, k)].abs1());
                    let ba = sub.min(h[(k - 1, k)].abs1());
                    let diff = (h[(k - 1, k - 1)] - h[(k, k)]).abs1();
                    let aa = h[(k, k)].abs1().max(diff);
                    let bb = h[(k, k)].abs1().min(diff);
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                h[(l, l - 1)] = czero;
            }
            if l >= iu {
                converged = true;
                break;
            }
            kdefl += 1;

            let shift = if kdefl % (2 * kexsh) == 0 {
                h[(iu, iu)] + Complex::new(T::lit(0.75) * h[(iu, iu - 1)].re.abs(), zero)
            } else if kdefl % kexsh == 0 {
                h[(l, l)] + Complex::new(T::lit(0.75) * h[(l + 1, l)].re.abs(), zero)
            } else {
                // Eigenvalue of the trailing 2×2 block closest to its last entry.
                let d = h[(iu, iu)];
                let u = h[(iu - 1, iu)].sqrt() * h[(iu, iu - 1)].sqrt();
                if u == czero {
                    d
                } else {
                    let x = (h[(iu - 1, iu - 1)] - d).scale(half);
                    let mut y = (x * x + u * u).sqrt();
                    if (x.conj() * y).re < zero {
                        y = -y;
                    }
                    let den = x + y;
                    if den == czero {
                        d
                    } else {
                        d - u * (u / den)
                    }
                }
            };

            let mut x = h[(l, l)] - shift;
            let mut y = h[(l + 1, l)];
            for k in l..iu {
                let (c, s) = givens(x, y);
                let sc = -s.conj();
                let start = if k > l { k - 1 } else { k };
                {
                    let (rk, rk1) = h.two_rows_mut(k, k + 1);
                    for j in start..n {
                        let (a, b) = (rk[j], rk1[j]);
                        rk[j] = a.scale(c) + s * b;
                        rk1[j] = sc * a + b.scale(c);
                    }
                }
                if k > l {
                    h[(k + 1, k - 1)] = czero;
                }
                let s_conj = s.conj();
                for r in 0..=(k + 2).min(iu) {
                    let row = h.row_mut(r);
                    let (a, b) = (row[k], row[k + 1]);
                    row[k] = a.scale(c) + s_conj * b;
                    row[k + 1] = b.scale(c) - s * a;
                }
                if let Some(z) = z.as_deref_mut() {
                    for r in 0..n {
                        let row = z.row_mut(r);
                        let (a, b) = (row[k], row[k + 1]);
                        row[k] = a.scale(c) + s_conj * b;
                        row[k + 1] = b.scale(c) - s * a;
                    }
                }
                if k + 1 < iu {
                    x = h[(k + 1, k)];
                    y = h[(k + 2, k)];
                }
            }
        }
        if !converged {
            return Err(LinalgError::NoConvergence { index: iu });
        }
        kdefl = 0;
        i = l as isize - 1;
    }
    Ok(())
}
