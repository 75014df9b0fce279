//! Zero-phase Butterworth low-pass filtering.
//!
//! An 8th-order Butterworth low-pass (four biquad sections from the
//! analog prototype via the bilinear transform with frequency
//! prewarping, -3 dB at the cutoff per pass) is run forward and then
//! backward over the signal. The two passes cancel each other's phase,
//! so fault signatures keep their position inside a window, at the cost
//! of squaring the magnitude response (an effective 16th-order roll-off,
//! -6 dB at the cutoff).
//!
//! Length and rate are unchanged. Before filtering, the signal is
//! extended by reflection at both ends by [`settle_len`] samples sized to
//! the slowest pole of the cascade, which keeps edge transients out of
//! the retained region for signals long enough to reflect that far.

use crate::error::{Error, Result};
use crate::signal::Signal;

const ORDER: usize = 8;

/// Second-order section in direct form II transposed.
#[derive(Debug, Clone, Copy)]
struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
}

impl Biquad {
    fn filter_in_place(&self, samples: &mut [f64]) {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for x in samples {
            let input = *x;
            let y = self.b0 * input + s1;
            s1 = self.b1 * input - self.a1 * y + s2;
            s2 = self.b2 * input - self.a2 * y;
            *x = y;
        }
    }
}

/// The four Butterworth sections for a cutoff, lowest-Q first.
fn design(cutoff_hz: f64, rate: f64) -> [Biquad; 4] {
    // Prewarped analog cutoff, normalised for the bilinear transform.
    let omega = (std::f64::consts::PI * cutoff_hz / rate).tan();
    let omega_sq = omega * omega;
    let mut sections = [Biquad {
        b0: 0.0,
        b1: 0.0,
        b2: 0.0,
        a1: 0.0,
        a2: 0.0,
    }; 4];
    for (k, section) in sections.iter_mut().enumerate() {
        // Conjugate pole pairs of the normalised analog prototype:
        // s^2 + 2*sin(phi_k)*s + 1 with phi_k = (2k + 1)*pi/(2*order).
        let q = ((2 * k + 1) as f64 * std::f64::consts::PI / (2.0 * ORDER as f64)).sin();
        let c = 1.0 + 2.0 * q * omega + omega_sq;
        *section = Biquad {
            b0: omega_sq / c,
            b1: 2.0 * omega_sq / c,
            b2: omega_sq / c,
            a1: 2.0 * (omega_sq - 1.0) / c,
            a2: (1.0 - 2.0 * q * omega + omega_sq) / c,
        };
    }
    sections
}

/// Samples of edge transient to allow on each side of a filtered signal.
///
/// Derived from the decay of the cascade's slowest pole (damping
/// `sin(pi/16)`), with margin; past this many samples the impulse
/// response has decayed below 1e-8.
pub fn settle_len(cutoff_hz: f64, rate: f64) -> usize {
    let omega = 2.0 * std::f64::consts::PI * cutoff_hz / rate;
    let slowest = (std::f64::consts::PI / (2.0 * ORDER as f64)).sin();
    (2.0 * 18.5 / (omega * slowest)).ceil() as usize
}

/// Zero-phase low-pass. Same length and rate as the input; requires
/// `0 < cutoff < rate / 2`.
pub fn lowpass(signal: &Signal, cutoff_hz: f64) -> Result<Signal> {
    let nyquist = signal.rate() / 2.0;
    if !cutoff_hz.is_finite() || cutoff_hz <= 0.0 || cutoff_hz >= nyquist {
        return Err(Error::CutoffOutOfRange {
            cutoff: cutoff_hz,
            nyquist,
        });
    }
    let n = signal.len();
    if n == 0 {
        return Signal::new(Vec::new(), signal.rate());
    }

    let sections = design(cutoff_hz, signal.rate());
    let pad = settle_len(cutoff_hz, signal.rate()).min(n - 1);

    // Reflection-extended copy: mirror without repeating the edge sample.
    let x = signal.samples();
    let mut extended = Vec::with_capacity(n + 2 * pad);
    extended.extend((0..pad).map(|i| x[pad - i]));
    extended.extend_from_slice(x);
    extended.extend((0..pad).map(|i| x[n - 2 - i]));

    for section in &sections {
        section.filter_in_place(&mut extended);
    }
    extended.reverse();
    for section in &sections {
        section.filter_in_place(&mut extended);
    }
    extended.reverse();

    Signal::new(extended[pad..pad + n].to_vec(), signal.rate())
}
