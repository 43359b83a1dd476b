use crate::error::{Error, Result};

/// Segment boundaries are matched with this slack so that sample times
/// such as `200 * 0.01` land in the following segment.
const BOUNDARY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeaderSegment {
    /// Proportional cruise control `u = gain (v_ref - v)`.
    Cruise { v_ref: f64, gain: f64, duration: f64 },
    /// Open-loop acceleration command.
    Pulse { amplitude: f64, duration: f64 },
}

impl LeaderSegment {
    pub fn duration(&self) -> f64 {
        match *self {
            LeaderSegment::Cruise { duration, .. } | LeaderSegment::Pulse { duration, .. } => duration,
        }
    }
}

/// Contiguous sequence of leader segments starting at `t = 0`. After the
/// last segment the leader input is zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LeaderProfile {
    segments: Vec<LeaderSegment>,
}

impl LeaderProfile {
    pub fn new(segments: Vec<LeaderSegment>) -> Result<Self> {
        for s in &segments {
            let d = s.duration();
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "segment duration must be positive, got {d}"
                )));
            }
            match *s {
                LeaderSegment::Cruise { v_ref, gain, .. } => {
                    if !v_ref.is_finite() {
                        return Err(Error::NonFinite("cruise v_ref"));
                    }
                    if !(gain > 0.0) || !gain.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "cruise gain must be positive, got {gain}"
                        )));
                    }
                }
                LeaderSegment::Pulse { amplitude, .. } => {
                    if !amplitude.is_finite() {
                        return Err(Error::NonFinite("pulse amplitude"));
                    }
                }
            }
        }
        Ok(Self { segments })
    }

    /// Empty profile: the leader input is identically zero.
    pub fn idle() -> Self {
        Self::default()
    }

    /// `+amplitude` for `duration`, coast for `gap`, then `-amplitude` for
    /// `duration`.
    pub fn pulse_pair(amplitude: f64, duration: f64, gap: f64) -> Result<Self> {
        Self::new(vec![
            LeaderSegment::Pulse { amplitude, duration },
            LeaderSegment::Pulse {
                amplitude: 0.0,
                duration: gap,
            },
            LeaderSegment::Pulse {
                amplitude: -amplitude,
                duration,
            },
        ])
    }

    pub fn segments(&self) -> &[LeaderSegment] {
        &self.segments
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(LeaderSegment::duration).sum()
    }

    pub fn segment_at(&self, t: f64) -> Option<&LeaderSegment> {
        let mut end = 0.0;
        for s in &self.segments {
            end += s.duration();
            if t < end - BOUNDARY_SLACK * end.max(1.0) {
                return Some(s);
            }
        }
        None
    }
}

pub fn leader_input(profile: &LeaderProfile, t: f64, v_leader: f64) -> f64 {
    match profile.segment_at(t) {
        Some(LeaderSegment::Cruise { v_ref, gain, .. }) => gain * (v_ref - v_leader),
        Some(LeaderSegment::Pulse { amplitude, .. }) => *amplitude,
        None => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let cruise = LeaderProfile::new(vec![LeaderSegment::Cruise {
            v_ref: 5.0,
            gain: 0.5,
            duration: 10.0,
        }])
        .unwrap();
        assert_eq!(leader_input(&cruise, 1.0, 5.0), 0.0);
        assert_eq!(leader_input(&cruise, 1.0, 3.0), 1.0);
        let pulse = LeaderProfile::new(vec![LeaderSegment::Pulse {
            amplitude: 1.0,
            duration: 2.0,
        }])
        .unwrap();
        assert_eq!(leader_input(&pulse, 1.3, 0.0), 1.0);
        assert_eq!(leader_input(&pulse, 2.5, 0.0), 0.0);
    }

    #[test]
    fn boundaries_at_sample_times() {
        let p = LeaderProfile::pulse_pair(1.0, 2.0, 3.0).unwrap();
        assert_eq!(leader_input(&p, 199.0 * 0.01, 0.0), 1.0);
        assert_eq!(leader_input(&p, 200.0 * 0.01, 0.0), 0.0);
        assert_eq!(leader_input(&p, 500.0 * 0.01, 0.0), -1.0);
        assert_eq!(leader_input(&p, 700.0 * 0.01, 0.0), 0.0);
        assert!((p.duration() - 7.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_segments() {
        assert!(LeaderProfile::new(vec![LeaderSegment::Pulse {
            amplitude: 1.0,
            duration: 0.0
        }])
        .is_err());
        assert!(LeaderProfile::new(vec![LeaderSegment::Cruise {
            v_ref: 5.0,
            gain: -1.0,
            duration: 1.0
        }])
        .is_err());
        assert!(LeaderProfile::new(vec![LeaderSegment::Pulse {
            amplitude: f64::NAN,
            duration: 1.0
        }])
        .is_err());
    }
}
