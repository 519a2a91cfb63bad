//! Gray-mapped QPSK.

use rand::Rng;

use crate::scalar::{CVector, Cx, Real};

/// `00 → (1+j)/√2`; the first bit sets the sign of the real part, the
/// second the sign of the imaginary part.
pub fn qpsk_map<T: Real>(b0: bool, b1: bool) -> Cx<T> {
    let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    Cx::new(if b0 { -s } else { s }, if b1 { -s } else { s })
}

/// Hard decision, the inverse of [`qpsk_map`]. Zero maps to bit 0.
pub fn qpsk_demap<T: Real>(z: Cx<T>) -> (bool, bool) {
    (z.re < T::zero(), z.im < T::zero())
}

pub fn random_qpsk<T: Real, R: Rng + ?Sized>(len: usize, rng: &mut R) -> CVector<T> {
    CVector::from_fn(len, |_, _| qpsk_map(rng.random(), rng.random()))
}

/// Number of differing bits between the hard decisions on `a` and `b`.
pub fn bit_errors<T: Real>(a: Cx<T>, b: Cx<T>) -> usize {
    let (x, y) = (qpsk_demap(a), qpsk_demap(b));
    usize::from(x.0 != y.0) + usize::from(x.1 != y.1)
}
