use crate::scalar::{cis, real, Cx, Real};

/// Frequency-independent transmit IQ imbalance.
///
/// The transmitted baseband is `alpha·s + beta·conj(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IqImbalance<T: Real> {
    /// Amplitude mismatch between the I and Q branches.
    pub epsilon: T,
    /// Phase mismatch in radians.
    pub theta: T,
    pub alpha: Cx<T>,
    pub beta: Cx<T>,
}

impl<T: Real> IqImbalance<T> {
    pub fn new(epsilon: T, theta: T) -> Self {
        let (alpha, beta) = iq_params(epsilon, theta);
        Self {
            epsilon,
            theta,
            alpha,
            beta,
        }
    }

    pub fn ideal() -> Self {
        Self::new(T::one(), T::zero())
    }
}

/// `alpha = (1 + ε·e^{jθ})/2`, `beta = (1 − ε·e^{jθ})/2`.
pub fn iq_params<T: Real>(epsilon: T, theta: T) -> (Cx<T>, Cx<T>) {
    let half = T::lit(0.5);
    let mismatch = cis(theta) * epsilon;
    let alpha = (real(T::one()) + mismatch) * half;
    let beta = (real(T::one()) - mismatch) * half;
    (alpha, beta)
}
