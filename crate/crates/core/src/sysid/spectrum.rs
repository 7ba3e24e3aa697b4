use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex;
#[allow(unused_imports)] // resolves to inherent methods when std is linked
use num_traits::Float;

use super::SysidError;
use crate::series::TimeSeries;

const MIN_SAMPLES: usize = 64;
const PAD_FACTOR: usize = 8;

/// In-place iterative radix-2 FFT. `buf.len()` must be a power of two.
fn fft(buf: &mut [Complex<f64>]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = -2.0 * PI / len as f64;
        let root = Complex::new(ang.cos(), ang.sin());
        for chunk in buf.chunks_mut(len) {
            let mut w = Complex::new(1.0, 0.0);
            let (lo, hi) = chunk.split_at_mut(len / 2);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let t = *b * w;
                *b = *a - t;
                *a += t;
                w *= root;
            }
        }
        len <<= 1;
    }
}

/// Frequency (rad/s) of the strongest non-DC component of `ts`.
///
/// The mean is removed and a Hann window applied before an 8x zero-padded
/// FFT; the peak bin is refined with a parabola through the log magnitudes
/// of its two neighbours.
pub fn peak_frequency(ts: &TimeSeries) -> Result<f64, SysidError> {
    let n = ts.len();
    if n < MIN_SAMPLES {
        return Err(SysidError::Config("spectral analysis needs at least 64 samples"));
    }
    let mean = ts.values().iter().sum::<f64>() / n as f64;
    let scale = ts.max_abs().max(mean.abs());
    let n_fft = (n * PAD_FACTOR).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = Vec::with_capacity(n_fft);
    for (k, &v) in ts.values().iter().enumerate() {
        let hann = 0.5 - 0.5 * (2.0 * PI * k as f64 / (n - 1) as f64).cos();
        buf.push(Complex::new((v - mean) * hann, 0.0));
    }
    buf.resize(n_fft, Complex::new(0.0, 0.0));
    fft(&mut buf);

    let half = n_fft / 2;
    let mags: Vec<f64> = buf[..=half].iter().map(|c| c.norm()).collect();
    let (peak, peak_mag) = mags
        .iter()
        .enumerate()
        .skip(1)
        .fold((0, 0.0), |best, (k, &m)| if m > best.1 { (k, m) } else { best });
    // relative to an amplitude-1 sine under the window, sum(hann) / 2 ~ n / 4
    if peak == 0 || scale == 0.0 || peak_mag <= 1e-9 * scale * n as f64 {
        return Err(SysidError::NoDominantFrequency);
    }

    let mut bin = peak as f64;
    if peak > 1 && peak < half {
        let (l, c, r) = (mags[peak - 1].ln(), mags[peak].ln(), mags[peak + 1].ln());
        let denom = l - 2.0 * c + r;
        if denom < 0.0 {
            bin += 0.5 * (l - r) / denom;
        }
    }
    let omega = 2.0 * PI * bin / (n_fft as f64 * ts.dt());
    if omega * ts.duration() < 4.0 * PI {
        return Err(SysidError::Config(
            "record shorter than two periods of the dominant component",
        ));
    }
    Ok(omega)
}
