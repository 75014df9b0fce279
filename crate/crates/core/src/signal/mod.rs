//! Raw vibration signals and the operations that manufacture dataset
//! variants from them: fixed-length windowing, integer-factor resampling
//! with anti-aliasing, zero-phase low-pass filtering, and
//! seed-deterministic stratified splitting.

pub mod io;
pub mod lowpass;
pub mod resample;

pub use lowpass::{lowpass, settle_len};
pub use resample::{filter_len, resample};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// A uniformly sampled, finite, real-valued time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    rate: f64,
}

impl Signal {
    /// Rejects non-positive rates and non-finite samples.
    pub fn new(samples: Vec<f64>, rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::InvalidSignal(format!(
                "sampling rate {rate} Hz is not positive"
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidSignal(format!("sample {i} is not finite")));
        }
        Ok(Signal { samples, rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Fixed-length windows cut from a signal, optionally labelled with a
/// class id each.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSet {
    windows: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
    length: usize,
    rate: f64,
}

impl WindowSet {
    pub fn new(windows: Vec<Vec<f64>>, length: usize, rate: f64) -> Result<Self> {
        if let Some(i) = windows.iter().position(|w| w.len() != length) {
            return Err(Error::InvalidSignal(format!(
                "window {i} has {} samples, expected {length}",
                windows[i].len()
            )));
        }
        Ok(WindowSet {
            windows,
            labels: None,
            length,
            rate,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.windows.len() {
            return Err(Error::InvalidSignal(format!(
                "{} labels for {} windows",
                labels.len(),
                self.windows.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn windows(&self) -> &[Vec<f64>] {
        &self.windows
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    fn select(&self, indices: &[usize]) -> WindowSet {
        WindowSet {
            windows: indices.iter().map(|&i| self.windows[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|labels| indices.iter().map(|&i| labels[i].clone()).collect()),
            length: self.length,
            rate: self.rate,
        }
    }
}

/// Cuts a signal into consecutive non-overlapping windows of `length`
/// samples; a trailing remainder shorter than `length` is discarded. An
/// empty result is fine.
pub fn window(signal: &Signal, length: usize) -> WindowSet {
    assert!(length >= 1, "window length must be at least 1");
    let windows: Vec<Vec<f64>> = signal
        .samples()
        .chunks_exact(length)
        .map(<[f64]>::to_vec)
        .collect();
    WindowSet {
        windows,
        labels: None,
        length,
        rate: signal.rate(),
    }
}

/// Stratified train/test split of a labelled window set.
///
/// Per class, `floor(train_fraction · count)` windows (at least 1) go to
/// the train side after a seeded shuffle; the rest go to the test side.
/// The partition is disjoint, exhaustive, and a pure function of the
/// seed. Classes with fewer than two windows are rejected.
pub fn split(set: &WindowSet, train_fraction: f64, seed: u64) -> Result<(WindowSet, WindowSet)> {
    assert!(
        train_fraction > 0.0 && train_fraction < 1.0,
        "train fraction must be strictly between 0 and 1"
    );
    let labels = set.labels().ok_or(Error::UnlabeledWindows)?;

    // Classes in first-appearance order keep the procedure deterministic.
    let mut classes: Vec<(&str, Vec<usize>)> = Vec::new();
    for (i, label) in labels.iter().enumerate() {
        match classes.iter_mut().find(|(name, _)| *name == label) {
            Some((_, members)) => members.push(i),
            None => classes.push((label, vec![i])),
        }
    }

    let mut rng = SplitMix64::new(seed);
    let mut train_indices = Vec::new();
    let mut test_indices = Vec::new();
    for (label, mut members) in classes {
        let count = members.len();
        if count < 2 {
            return Err(Error::ClassTooSmall {
                label: label.to_string(),
                count,
            });
        }
        // The nudge keeps clean fractions like 0.7 * 10 from landing
        // just below their integer.
        let ideal = (train_fraction * count as f64 + 1e-9).floor() as usize;
        let take = ideal.clamp(1, count - 1);
        rng.shuffle(&mut members);
        let (train, test) = members.split_at(take);
        train_indices.extend_from_slice(train);
        test_indices.extend_from_slice(test);
    }
    train_indices.sort_unstable();
    test_indices.sort_unstable();
    Ok((set.select(&train_indices), set.select(&test_indices)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_signal(len: usize, rate: f64) -> Signal {
        Signal::new((0..len).map(|i| i as f64).collect(), rate).unwrap()
    }

    fn labelled_windows(counts: &[(&str, usize)]) -> WindowSet {
        let mut windows = Vec::new();
        let mut labels = Vec::new();
        for (label, count) in counts {
            for i in 0..*count {
                windows.push(vec![i as f64; 4]);
                labels.push(label.to_string());
            }
        }
        WindowSet::new(windows, 4, 1000.0)
            .unwrap()
            .with_labels(labels)
            .unwrap()
    }

    #[test]
    fn signal_rejects_bad_inputs() {
        assert!(Signal::new(vec![0.0], 0.0).is_err());
        assert!(Signal::new(vec![0.0], -1.0).is_err());
        assert!(Signal::new(vec![f64::NAN], 1.0).is_err());
        assert!(Signal::new(vec![f64::INFINITY], 1.0).is_err());
    }

    #[test]
    fn exact_division_yields_all_windows() {
        let set = window(&ramp_signal(4096, 48000.0), 2048);
        assert_eq!(set.len(), 2);
        assert_eq!(set.length(), 2048);
        assert_eq!(set.rate(), 48000.0);
    }

    #[test]
    fn trailing_remainder_is_discarded() {
        let set = window(&ramp_signal(5000, 48000.0), 2048);
        assert_eq!(set.len(), 2);
        // 5000 - 2 * 2048 = 904 samples dropped.
        assert_eq!(set.windows()[1][2047], 4095.0);
    }

    #[test]
    fn short_signal_yields_no_windows() {
        let set = window(&ramp_signal(2047, 48000.0), 2048);
        assert!(set.is_empty());
    }

    #[test]
    fn windows_concatenate_back_to_the_retained_prefix() {
        let signal = ramp_signal(1000, 100.0);
        let set = window(&signal, 64);
        let concatenated: Vec<f64> = set.windows().concat();
        assert_eq!(&signal.samples()[..concatenated.len()], &concatenated[..]);
    }

    #[test]
    fn split_counts_follow_the_fraction() {
        let set = labelled_windows(&[("healthy", 10)]);
        let (train, test) = split(&set, 0.2, 7).unwrap();
        assert_eq!(train.len(), 2);
        assert_eq!(test.len(), 8);
    }

    #[test]
    fn split_is_seed_deterministic() {
        let set = labelled_windows(&[("a", 10), ("b", 6)]);
        let (train_1, test_1) = split(&set, 0.2, 42).unwrap();
        let (train_2, test_2) = split(&set, 0.2, 42).unwrap();
        assert_eq!(train_1, train_2);
        assert_eq!(test_1, test_2);

        let (train_3, _) = split(&set, 0.2, 43).unwrap();
        assert_ne!(train_1, train_3);
    }

    #[test]
    fn split_stratifies_per_class() {
        let set = labelled_windows(&[("a", 100), ("b", 100)]);
        let (train, test) = split(&set, 0.2, 1).unwrap();
        let count = |labels: &[String], class: &str| labels.iter().filter(|l| *l == class).count();
        assert_eq!(count(train.labels().unwrap(), "a"), 20);
        assert_eq!(count(train.labels().unwrap(), "b"), 20);
        assert_eq!(count(test.labels().unwrap(), "a"), 80);
        assert_eq!(count(test.labels().unwrap(), "b"), 80);
    }

    #[test]
    fn split_is_disjoint_and_exhaustive() {
        let set = labelled_windows(&[("a", 9), ("b", 5)]);
        let (train, test) = split(&set, 0.5, 3).unwrap();
        assert_eq!(train.len() + test.len(), set.len());
        // Window payloads are unique per (label, position) here, so a
        // window appearing on both sides would show up as a duplicate.
        let mut seen: Vec<(&[f64], &str)> = Vec::new();
        for (w, l) in train
            .windows()
            .iter()
            .zip(train.labels().unwrap())
            .chain(test.windows().iter().zip(test.labels().unwrap()))
        {
            let entry = (w.as_slice(), l.as_str());
            assert!(!seen.contains(&entry));
            seen.push(entry);
        }
    }

    #[test]
    fn tiny_class_still_contributes_one_train_window() {
        let set = labelled_windows(&[("a", 2), ("b", 10)]);
        let (train, _) = split(&set, 0.2, 5).unwrap();
        assert!(train.labels().unwrap().iter().any(|l| l == "a"));
    }

    #[test]
    fn split_rejects_unlabelled_and_tiny_classes() {
        let unlabelled = WindowSet::new(vec![vec![0.0; 4]; 4], 4, 1.0).unwrap();
        assert!(matches!(
            split(&unlabelled, 0.2, 0),
            Err(Error::UnlabeledWindows)
        ));

        let single = labelled_windows(&[("a", 1), ("b", 5)]);
        assert!(matches!(
            split(&single, 0.2, 0),
            Err(Error::ClassTooSmall { count: 1, .. })
        ));
    }
}
