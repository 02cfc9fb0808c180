//! Scalar abstractions shared by the special functions, the closed-form
//! formulas and the dense linear algebra.
//!
//! [`Real`] is the floating-point type everything is generic over (`f32` or
//! `f64`); [`Scalar`] additionally covers `Complex<T>` so the Householder and
//! LU kernels can be written once for real and complex matrices.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Default + Debug + Display + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal (coefficients, tolerances) into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts an integer count into `Self`.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Field element of a dense matrix: a [`Real`] or a `Complex<Real>`.
pub trait Scalar: Copy + NumAssign + Neg<Output = Self> + PartialEq + Debug + Send + Sync + 'static {
    type Real: Real;

    fn from_real(r: Self::Real) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn conj(self) -> Self;
    /// `|x|²`.
    fn abs_sq(self) -> Self::Real;
    /// `|x|`, computed without intermediate overflow.
    fn modulus(self) -> Self::Real;
    /// `|Re x| + |Im x|`, the cheap norm LAPACK uses for convergence tests.
    fn abs1(self) -> Self::Real;
    fn scale(self, r: Self::Real) -> Self;
    fn to_complex(self) -> Complex<Self::Real>;
    /// Builds `re + i·im`; the imaginary part is dropped for real scalars.
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
}

impl<T: Real> Scalar for T {
    type Real = T;

    #[inline]
    fn from_real(r: T) -> Self {
        r
    }
    #[inline]
    fn re(self) -> T {
        self
    }
    #[inline]
    fn im(self) -> T {
        T::zero()
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs_sq(self) -> T {
        self * self
    }
    #[inline]
    fn modulus(self) -> T {
        self.abs()
    }
    #[inline]
    fn abs1(self) -> T {
        self.abs()
    }
    #[inline]
    fn scale(self, r: T) -> Self {
        self * r
    }
    #[inline]
    fn to_complex(self) -> Complex<T> {
        Complex::new(self, T::zero())
    }
    #[inline]
    fn from_parts(re: T, _im: T) -> Self {
        re
    }
}

impl<T: Real> Scalar for Complex<T> {
    type Real = T;

    #[inline]
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    #[inline]
    fn re(self) -> T {
        self.re
    }
    #[inline]
    fn im(self) -> T {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    #[inline]
    fn abs_sq(self) -> T {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn modulus(self) -> T {
        self.re.hypot(self.im)
    }
    #[inline]
    fn abs1(self) -> T {
        self.re.abs() + self.im.abs()
    }
    #[inline]
    fn scale(self, r: T) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
    #[inline]
    fn to_complex(self) -> Complex<T> {
        self
    }
    #[inline]
    fn from_parts(re: T, im: T) -> Self {
        Complex::new(re, im)
    }
}
