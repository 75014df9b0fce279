//! Integer-factor decimation with FIR anti-aliasing.
//!
//! The anti-aliasing filter is a windowed-sinc low-pass with a Kaiser
//! window sized for 80 dB of stopband rejection and a transition band
//! spanning 0.8–1.0 of the post-decimation Nyquist frequency. Taps are
//! normalised to unit DC gain. The filter is linear-phase and applied
//! centred over a reflection-extended signal, so the output is aligned
//! with the input and edge transients stay confined to roughly one
//! filter length at each end.

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Stopband attenuation the window is designed for, in dB.
const STOPBAND_DB: f64 = 80.0;

/// Length (taps, always odd) of the anti-aliasing filter for a factor.
pub fn filter_len(factor: usize) -> usize {
    assert!(factor >= 2, "resampling factor must be at least 2");
    // Kaiser's tap estimate N = (A - 7.95) / (2.285 * dw) with the
    // transition width dw = 2*pi*0.1/factor.
    let dw = 2.0 * std::f64::consts::PI * 0.1 / factor as f64;
    let required = (STOPBAND_DB - 7.95) / (2.285 * dw);
    let half = (required / 2.0).ceil() as usize;
    2 * half + 1
}

/// Decimates a signal by an integer factor, rejecting content above the
/// new Nyquist frequency first.
///
/// The output keeps every `factor`-th filtered sample starting at index
/// 0, so its length is exactly `floor(len / factor)` and its rate is
/// `rate / factor`.
pub fn resample(signal: &Signal, factor: usize) -> Result<Signal> {
    assert!(factor >= 2, "resampling factor must be at least 2");
    let n = signal.len();
    let taps = design_taps(factor);
    if n < taps.len() {
        return Err(Error::SignalTooShort {
            len: n,
            filter_len: taps.len(),
        });
    }

    let half = taps.len() / 2;
    let x = signal.samples();
    let reflect = |index: isize| -> f64 {
        let last = (n - 1) as isize;
        let j = if index < 0 {
            -index
        } else if index > last {
            2 * last - index
        } else {
            index
        };
        x[j as usize]
    };

    let out_len = n / factor;
    let mut out = Vec::with_capacity(out_len);
    for k in 0..out_len {
        let center = (k * factor) as isize;
        let mut acc = 0.0;
        for (j, tap) in taps.iter().enumerate() {
            acc += tap * reflect(center - half as isize + j as isize);
        }
        out.push(acc);
    }
    Signal::new(out, signal.rate() / factor as f64)
}

fn design_taps(factor: usize) -> Vec<f64> {
    let len = filter_len(factor);
    let half = (len / 2) as f64;
    let beta = 0.1102 * (STOPBAND_DB - 8.7);
    let i0_beta = bessel_i0(beta);
    // Cutoff at the middle of the transition band: 0.9 of the new
    // Nyquist, i.e. 0.45/factor cycles per input sample.
    let cutoff = 0.45 / factor as f64;

    let mut taps: Vec<f64> = (0..len)
        .map(|i| {
            let t = i as f64 - half;
            let sinc = if t == 0.0 {
                2.0 * cutoff
            } else {
                (2.0 * std::f64::consts::PI * cutoff * t).sin() / (std::f64::consts::PI * t)
            };
            let r = t / half;
            let window = bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / i0_beta;
            sinc * window
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    for tap in &mut taps {
        *tap /= sum;
    }
    taps
}

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half_x = x / 2.0;
    for k in 1..64 {
        term *= (half_x / k as f64) * (half_x / k as f64);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_signal_keeps_dc_and_shrinks_by_the_factor() {
        for factor in [2usize, 4, 8, 16] {
            let n = 10_000 + 3;
            let signal = Signal::new(vec![0.75; n], 48_000.0).unwrap();
            let out = resample(&signal, factor).unwrap();
            assert_eq!(out.len(), n / factor);
            assert_eq!(out.rate(), 48_000.0 / factor as f64);
            for &s in out.samples() {
                assert!((s - 0.75).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn output_length_is_the_floor_of_the_ratio() {
        for (n, factor) in [(4096usize, 2usize), (5000, 4), (1023, 8), (4097, 16)] {
            let signal = Signal::new(vec![0.0; n], 48_000.0).unwrap();
            let out = resample(&signal, factor).unwrap();
            assert_eq!(out.len(), n / factor);
        }
    }

    #[test]
    fn short_signals_are_rejected() {
        let signal = Signal::new(vec![0.0; 16], 48_000.0).unwrap();
        match resample(&signal, 4) {
            Err(Error::SignalTooShort {
                len: 16,
                filter_len,
            }) => {
                assert!(filter_len > 16);
            }
            other => panic!("expected SignalTooShort, got {other:?}"),
        }
    }

    #[test]
    fn filter_length_is_odd_and_grows_with_the_factor() {
        let mut previous = 0;
        for factor in [2usize, 4, 8, 16] {
            let len = filter_len(factor);
            assert_eq!(len % 2, 1);
            assert!(len > previous);
            previous = len;
        }
    }

    #[test]
    fn bessel_i0_matches_known_values() {
        assert!((bessel_i0(0.0) - 1.0).abs() < 1e-15);
        // I0(1) = 1.2660658777520083...
        assert!((bessel_i0(1.0) - 1.2660658777520083).abs() < 1e-12);
        // I0(5) = 27.239871823604442...
        assert!((bessel_i0(5.0) - 27.239871823604442).abs() < 1e-9);
    }
}
