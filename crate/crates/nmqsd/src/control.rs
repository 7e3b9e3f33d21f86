//! Time-dependent coupling schedules `k(t)` for the controlled oscillator
//! pair.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ControlSchedule {
    Constant {
        k0: f64,
    },
    /// `k(t) = k0 + amplitude * sin(drive_freq * t + phase)`.
    Sinusoid {
        k0: f64,
        amplitude: f64,
        drive_freq: f64,
        phase: f64,
    },
    /// Left-closed segments: the value at a boundary comes from the segment
    /// starting there.
    Piecewise {
        segments: Vec<(f64, f64)>,
    },
}

impl ControlSchedule {
    pub fn constant(k0: f64) -> Self {
        ControlSchedule::Constant { k0 }
    }

    pub fn validate(&self) -> Result<()> {
        if let ControlSchedule::Piecewise { segments } = self {
            if segments.is_empty() {
                return Err(Error::Config("piecewise schedule has no segments".into()));
            }
            if segments[0].0 > 0.0 {
                return Err(Error::Config(
                    "piecewise schedule must start at t <= 0 to be total on [0, inf)".into(),
                ));
            }
            for w in segments.windows(2) {
                if w[1].0 <= w[0].0 {
                    return Err(Error::Config(
                        "piecewise segments must be sorted with strictly increasing starts".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        match self {
            ControlSchedule::Constant { k0 } => *k0,
            ControlSchedule::Sinusoid {
                k0,
                amplitude,
                drive_freq,
                phase,
            } => k0 + amplitude * (drive_freq * t + phase).sin(),
            ControlSchedule::Piecewise { segments } => {
                let mut k = segments[0].1;
                for &(start, value) in segments {
                    if t >= start {
                        k = value;
                    } else {
                        break;
                    }
                }
                k
            }
        }
    }

    /// True when `k(t)` is identically its `t = 0` value.
    pub fn is_static(&self) -> bool {
        match self {
            ControlSchedule::Constant { .. } => true,
            ControlSchedule::Sinusoid { amplitude, .. } => *amplitude == 0.0,
            ControlSchedule::Piecewise { segments } => segments.len() <= 1,
        }
    }
}

/// Per-frequency summary emitted by a resonance sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub drive_freq: f64,
    /// Mean over the final 10% of snapshots.
    pub late_energy: f64,
    pub late_log_negativity: f64,
    pub peak_log_negativity: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_everywhere() {
        let s = ControlSchedule::constant(0.1);
        for t in [0.0, 0.3, 17.0] {
            assert_relative_eq!(s.evaluate(t), 0.1);
        }
        assert!(s.is_static());
    }

    #[test]
    fn sinusoid_at_origin() {
        let s = ControlSchedule::Sinusoid {
            k0: 0.0,
            amplitude: 0.5,
            drive_freq: 2.0,
            phase: 0.0,
        };
        assert_relative_eq!(s.evaluate(0.0), 0.0);
        assert_relative_eq!(s.evaluate(1.0), 0.5 * 2.0f64.sin(), epsilon = 1e-15);
        assert!(!s.is_static());
    }

    #[test]
    fn piecewise_left_closed_boundary() {
        let s = ControlSchedule::Piecewise {
            segments: vec![(0.0, 0.1), (1.0, 0.2), (2.5, -0.05)],
        };
        s.validate().unwrap();
        assert_relative_eq!(s.evaluate(0.0), 0.1);
        assert_relative_eq!(s.evaluate(0.999), 0.1);
        assert_relative_eq!(s.evaluate(1.0), 0.2); // boundary takes the new segment
        assert_relative_eq!(s.evaluate(2.5), -0.05);
        assert_relative_eq!(s.evaluate(100.0), -0.05);
    }

    #[test]
    fn piecewise_validation() {
        assert!(ControlSchedule::Piecewise { segments: vec![] }
            .validate()
            .is_err());
        assert!(ControlSchedule::Piecewise {
            segments: vec![(0.5, 0.1)]
        }
        .validate()
        .is_err());
        assert!(ControlSchedule::Piecewise {
            segments: vec![(0.0, 0.1), (0.0, 0.2)]
        }
        .validate()
        .is_err());
    }
}
