//! Scalar abstraction shared by every numerical module.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real field the link model is computed over (`f32` or `f64`).
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Default {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Conversion from a count or index.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest positive value that is safe to take a logarithm of.
    fn log_floor() -> Self {
        let floor = Self::lit(1e-300);
        if floor > Self::zero() {
            floor
        } else {
            Self::lit(f32::MIN_POSITIVE as f64)
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cx<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub fn real<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// `exp(j·theta)`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Cx<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn abs2<T: Real>(z: Cx<T>) -> T {
    z.re * z.re + z.im * z.im
}

/// Sum of squared magnitudes of all entries.
pub fn frob2<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + abs2(*z))
}

pub fn vec_norm2<T: Real>(v: &CVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + abs2(*z))
}
