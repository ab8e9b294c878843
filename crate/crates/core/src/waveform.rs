//! Beat-frequency arithmetic for a triangular FMCW chirp.
//!
//! The rising and falling beats share the range term and differ by twice the
//! Doppler shift, so their sum gives range and their difference gives radial
//! speed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light rounded the way the published sensor figures were computed.
pub const LIGHT_SPEED_ROUNDED: f64 = 3.0e8;
/// Speed of light in vacuum, exact by SI definition.
pub const LIGHT_SPEED_EXACT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveformParams {
    /// Chirp period T, seconds.
    pub period: f64,
    /// Modulation bandwidth B, hertz.
    pub bandwidth: f64,
    /// Optical carrier f, hertz.
    pub center_frequency: f64,
    /// Start frequency of the sweep. Not used by any formula.
    #[serde(default)]
    pub initial_frequency: f64,
    pub light_speed: f64,
}

impl Default for WaveformParams {
    /// 1550 nm carrier, 8–14 GHz sweep, 50 µs period.
    fn default() -> Self {
        Self::from_wavelength(1550e-9, 6.0e9, 50e-6, LIGHT_SPEED_ROUNDED).with_initial_frequency(8.0e9)
    }
}

impl WaveformParams {
    pub fn from_wavelength(wavelength: f64, bandwidth: f64, period: f64, light_speed: f64) -> Self {
        Self {
            period,
            bandwidth,
            center_frequency: light_speed / wavelength,
            initial_frequency: 0.0,
            light_speed,
        }
    }

    pub fn with_initial_frequency(mut self, f0: f64) -> Self {
        self.initial_frequency = f0;
        self
    }

    pub fn wavelength(&self) -> f64 {
        self.light_speed / self.center_frequency
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("waveform.period", self.period),
            ("waveform.bandwidth", self.bandwidth),
            ("waveform.center_frequency", self.center_frequency),
            ("waveform.light_speed", self.light_speed),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {value}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeatPair {
    /// Rising-band beat, hertz.
    pub f_bu: f64,
    /// Falling-band beat, hertz.
    pub f_bd: f64,
}

pub fn beat_to_range(params: &WaveformParams, beats: BeatPair) -> f64 {
    params.light_speed * params.period * (beats.f_bd + beats.f_bu) / (8.0 * params.bandwidth)
}

/// Positive when the falling beat exceeds the rising beat.
pub fn beat_to_velocity(params: &WaveformParams, beats: BeatPair) -> f64 {
    params.wavelength() * (beats.f_bd - beats.f_bu) / 4.0
}

pub fn range_resolution(params: &WaveformParams) -> f64 {
    params.light_speed / (2.0 * params.bandwidth)
}

pub fn velocity_resolution(params: &WaveformParams) -> f64 {
    params.wavelength() / params.period
}

/// Inverse of [`beat_to_range`] and [`beat_to_velocity`].
pub fn range_velocity_to_beats(params: &WaveformParams, distance: f64, radial_speed: f64) -> Result<BeatPair> {
    let range_beat = 4.0 * params.bandwidth * distance / (params.light_speed * params.period);
    let shift = 2.0 * radial_speed / params.wavelength();
    let beats = BeatPair {
        f_bu: range_beat - shift,
        f_bd: range_beat + shift,
    };
    if distance < 0.0 || beats.f_bu < 0.0 || beats.f_bd < 0.0 {
        return Err(Error::NegativeBeat {
            range_beat_hz: range_beat,
            shift_hz: shift,
        });
    }
    Ok(beats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference_params() -> WaveformParams {
        WaveformParams::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn range_from_symmetric_beats() {
        // f_b = 4 B D / (c T) = 4 * 6e9 * 100 / (3e8 * 50e-6) = 160 MHz
        let p = reference_params();
        let d = beat_to_range(
            &p,
            BeatPair {
                f_bu: 160e6,
                f_bd: 160e6,
            },
        );
        assert!(close(d, 100.0, 1e-9), "{d}");
        assert_eq!(beat_to_range(&p, BeatPair { f_bu: 0.0, f_bd: 0.0 }), 0.0);
    }

    #[test]
    fn doppler_shift_cancels_in_range() {
        let p = reference_params();
        let d = beat_to_range(
            &p,
            BeatPair {
                f_bu: 158e6,
                f_bd: 162e6,
            },
        );
        assert!(close(d, 100.0, 1e-9), "{d}");
    }

    #[test]
    fn velocity_from_beat_difference() {
        // df = 4 v / lambda = 4 * 10 / 1550e-9 = 25.806 MHz
        let p = reference_params();
        let v = beat_to_velocity(
            &p,
            BeatPair {
                f_bu: 100e6,
                f_bd: 100e6 + 25.806e6,
            },
        );
        assert!(close(v, 10.0, 1e-3), "{v}");
        let v = beat_to_velocity(
            &p,
            BeatPair {
                f_bu: 100e6 + 25.806e6,
                f_bd: 100e6,
            },
        );
        assert!(close(v, -10.0, 1e-3), "{v}");
        assert_eq!(beat_to_velocity(&p, BeatPair { f_bu: 5e6, f_bd: 5e6 }), 0.0);
    }

    #[test]
    fn resolutions_match_published_sensor() {
        let p = reference_params();
        assert!(close(range_resolution(&p), 0.025, 1e-12));
        assert!(close(velocity_resolution(&p), 0.031, 5e-4));

        let half_band = WaveformParams { bandwidth: 3.0e9, ..p };
        assert!(close(range_resolution(&half_band), 0.05, 1e-12));

        let unit = WaveformParams {
            bandwidth: p.light_speed / 2.0,
            ..p
        };
        assert!(close(range_resolution(&unit), 1.0, 1e-12));

        let long = WaveformParams { period: 100e-6, ..p };
        assert!(close(velocity_resolution(&long), 0.0155, 1e-12));
        assert!(close(velocity_resolution(&long) * 2.0, velocity_resolution(&p), 1e-15));
    }

    #[test]
    fn wavelength_consistent_with_carrier() {
        let p = reference_params();
        assert!(close(p.wavelength() * p.center_frequency, p.light_speed, 1e-6));
        assert!(close(p.wavelength(), 1550e-9, 1e-20));
    }

    #[test]
    fn beats_for_static_target() {
        let p = reference_params();
        let b = range_velocity_to_beats(&p, 100.0, 0.0).unwrap();
        assert!(close(b.f_bu, 160e6, 1e-3) && close(b.f_bd, 160e6, 1e-3));
        let b = range_velocity_to_beats(&p, 0.0, 0.0).unwrap();
        assert_eq!((b.f_bu, b.f_bd), (0.0, 0.0));
    }

    #[test]
    fn rejects_shift_larger_than_range_beat() {
        let p = reference_params();
        assert!(matches!(
            range_velocity_to_beats(&p, 0.0, 1.0),
            Err(Error::NegativeBeat { .. })
        ));
        assert!(range_velocity_to_beats(&p, -1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(d in 60.0f64..300.0, v in -60.0f64..60.0) {
            let p = reference_params();
            let b = range_velocity_to_beats(&p, d, v).unwrap();
            let d2 = beat_to_range(&p, b);
            let v2 = beat_to_velocity(&p, b);
            prop_assert!((d2 - d).abs() <= 1e-9 * d.abs());
            prop_assert!((v2 - v).abs() <= 1e-9 * v.abs().max(1e-3));
        }

        #[test]
        fn range_symmetric_velocity_antisymmetric(a in 0.0f64..1e9, b in 0.0f64..1e9) {
            let p = reference_params();
            let ab = BeatPair { f_bu: a, f_bd: b };
            let ba = BeatPair { f_bu: b, f_bd: a };
            prop_assert_eq!(beat_to_range(&p, ab), beat_to_range(&p, ba));
            prop_assert_eq!(beat_to_velocity(&p, ab), -beat_to_velocity(&p, ba));
        }
    }
}
