//! Discrete approximation of the one-sided transform
//! X(Omega) = integral dt X(t) e^{i Omega t}, with peak and line-width
//! extraction for identifying harmonic content.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// No taper; exact line positions for integer-period spans.
    Rectangular,
    /// Hann taper for non-integer spans; amplitudes rescaled by the coherent
    /// gain so peak heights stay comparable.
    Hann,
}

/// One-sided spectrum on a uniform frequency grid.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub values: Vec<Complex64>,
    pub window: Window,
    pub sample_dt: f64,
}

/// A local maximum of |X|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub frequency: f64,
    pub amplitude: f64,
}

/// Spectrum of a uniformly sampled real signal. At least 16 samples.
pub fn spectrum(signal: &[f64], sample_dt: f64, window: Window) -> Result<Spectrum> {
    spectrum_padded(signal, sample_dt, window, 1)
}

/// Like [`spectrum`], zero-padding the windowed signal by `pad_factor` to
/// interpolate the frequency grid (line-width fits need the finer grid; line
/// positions of integer-period signals do not, so the default is 1).
pub fn spectrum_padded(
    signal: &[f64],
    sample_dt: f64,
    window: Window,
    pad_factor: usize,
) -> Result<Spectrum> {
    if signal.len() < 16 {
        return Err(Error::InvalidParameter {
            name: "signal",
            constraint: "at least 16 samples",
            got: signal.len() as f64,
        });
    }
    if !(sample_dt.is_finite() && sample_dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sample_dt",
            constraint: "sample_dt > 0",
            got: sample_dt,
        });
    }
    if pad_factor == 0 {
        return Err(Error::InvalidParameter {
            name: "pad_factor",
            constraint: "pad_factor >= 1",
            got: 0.0,
        });
    }
    let n = signal.len();
    let n_fft = n * pad_factor;

    let (tapered, gain): (Vec<f64>, f64) = match window {
        Window::Rectangular => (signal.to_vec(), 1.0),
        Window::Hann => {
            let w: Vec<f64> = (0..n)
                .map(|k| {
                    0.5 * (1.0
                        - (2.0 * std::f64::consts::PI * k as f64 / (n as f64 - 1.0)).cos())
                })
                .collect();
            let gain = w.iter().sum::<f64>() / n as f64;
            (
                signal.iter().zip(&w).map(|(&s, &wk)| s * wk).collect(),
                gain,
            )
        }
    };

    let mut buffer: Vec<Complex64> = tapered
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .chain(std::iter::repeat_n(Complex64::new(0.0, 0.0), n_fft - n))
        .collect();
    // The inverse transform carries the e^{+i Omega t} sign convention;
    // rustfft leaves it unnormalized, so dt alone rescales the sum into the
    // integral.
    FftPlanner::new()
        .plan_fft_inverse(n_fft)
        .process(&mut buffer);

    let keep = n_fft / 2 + 1;
    let scale = Complex64::new(sample_dt / gain, 0.0);
    let values: Vec<Complex64> = buffer[..keep].iter().map(|&z| z * scale).collect();
    let frequencies: Vec<f64> = (0..keep)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / (n_fft as f64 * sample_dt))
        .collect();
    Ok(Spectrum {
        frequencies,
        values,
        window,
        sample_dt,
    })
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// |X| at each bin.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// Local maxima of |X| with amplitude at least `relative_floor` times
    /// the global maximum, strongest first. The DC bin counts as a local
    /// maximum when it dominates its neighbor.
    pub fn peaks(&self, relative_floor: f64) -> Vec<Peak> {
        let amps = self.amplitudes();
        let max = amps.iter().cloned().fold(0.0, f64::max);
        if max <= 0.0 {
            return Vec::new();
        }
        let floor = relative_floor * max;
        let mut out = Vec::new();
        for i in 0..amps.len() {
            let left_ok = i == 0 || amps[i] >= amps[i - 1];
            let right_ok = i + 1 == amps.len() || amps[i] > amps[i + 1];
            if left_ok && right_ok && amps[i] >= floor {
                out.push(Peak {
                    index: i,
                    frequency: self.frequencies[i],
                    amplitude: amps[i],
                });
            }
        }
        out.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
        out
    }

    /// The strongest peak within `tolerance` of the target frequency.
    pub fn peak_near(&self, target: f64, tolerance: f64, relative_floor: f64) -> Option<Peak> {
        self.peaks(relative_floor)
            .into_iter()
            .find(|p| (p.frequency - target).abs() <= tolerance)
    }

    /// Local maxima of Re X, strongest first. For damped cosines the real
    /// part is the absorptive (Lorentzian) component, so overlapping lines
    /// separate much better here than in |X|, whose dispersive tails decay
    /// only as 1/Omega.
    pub fn real_part_peaks(&self, relative_floor: f64) -> Vec<Peak> {
        let re: Vec<f64> = self.values.iter().map(|z| z.re).collect();
        let max = re.iter().cloned().fold(0.0, f64::max);
        if max <= 0.0 {
            return Vec::new();
        }
        let floor = relative_floor * max;
        let mut out = Vec::new();
        for i in 0..re.len() {
            let left_ok = i == 0 || re[i] >= re[i - 1];
            let right_ok = i + 1 == re.len() || re[i] > re[i + 1];
            if left_ok && right_ok && re[i] >= floor {
                out.push(Peak {
                    index: i,
                    frequency: self.frequencies[i],
                    amplitude: re[i],
                });
            }
        }
        out.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
        out
    }

    /// The strongest real-part peak within `tolerance` of the target.
    pub fn real_part_peak_near(
        &self,
        target: f64,
        tolerance: f64,
        relative_floor: f64,
    ) -> Option<Peak> {
        self.real_part_peaks(relative_floor)
            .into_iter()
            .find(|p| (p.frequency - target).abs() <= tolerance)
    }

    /// Half-width at half maximum of the real part around the given peak,
    /// by linear interpolation of the half-maximum crossings. For a damped
    /// cosine e^{-t/tau} cos(omega0 t) the real part is Lorentzian with
    /// half-width 1/tau. A nearby stronger line biases the crossing walk;
    /// measure widths on well-separated lines (or per component).
    pub fn lorentzian_half_width(&self, peak_index: usize) -> Option<f64> {
        let re: Vec<f64> = self.values.iter().map(|z| z.re).collect();
        let peak = *re.get(peak_index)?;
        if peak <= 0.0 {
            return None;
        }
        let half = peak / 2.0;
        let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
            let mut prev = peak_index;
            for i in range {
                if re[i] <= half {
                    let f0 = self.frequencies[prev];
                    let f1 = self.frequencies[i];
                    let v0 = re[prev];
                    let v1 = re[i];
                    let t = (v0 - half) / (v0 - v1);
                    return Some(f0 + t * (f1 - f0));
                }
                prev = i;
            }
            None
        };
        let right = cross(&mut ((peak_index + 1)..re.len()))?;
        let left = cross(&mut (0..peak_index).rev())?;
        Some((right - left) / 2.0)
    }

    /// True when every bin outside `allowed` (indices) stays below
    /// `relative_floor` times the maximum power.
    pub fn power_confined_to(&self, allowed: &[usize], relative_floor: f64) -> bool {
        let power: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        let max = power.iter().cloned().fold(0.0, f64::max);
        if max <= 0.0 {
            return true;
        }
        power
            .iter()
            .enumerate()
            .all(|(i, &p)| allowed.contains(&i) || p <= relative_floor * max)
    }
}
