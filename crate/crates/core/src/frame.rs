//! Random frames: QPSK payload with the pilot layout on symbol 1.

use rand::Rng;

use crate::channel::{FrameTruth, UserImpairment};
use crate::error::{input_err, Result};
use crate::estimator::PilotLayout;
use crate::modem::random_qpsk;
use crate::scalar::Real;
use crate::waveform::LinkModel;

pub fn draw_frame_truth<T: Real, R: Rng + ?Sized>(
    link: &LinkModel<T>,
    users: Vec<UserImpairment<T>>,
    layout: &PilotLayout,
    rng: &mut R,
) -> Result<FrameTruth<T>> {
    let c = &link.config;
    if c.symbols_per_frame == 0 {
        return input_err("frame without symbols");
    }
    let mut data: Vec<Vec<_>> = (0..c.symbols_per_frame)
        .map(|_| (0..link.users()).map(|_| random_qpsk(link.per_user(), rng)).collect())
        .collect();
    layout.apply(&mut data[0])?;
    Ok(FrameTruth { users, data })
}
