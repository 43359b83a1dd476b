use crate::controllers::ControlInputs;

/// Sensor idealization. Both holds are off by default, giving exact
/// measurements.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasurementOptions {
    /// Radar refresh rate in Hz; range and range rate are held between
    /// refreshes.
    pub radar_hold: Option<f64>,
    /// V2V refresh rate in Hz; predecessor velocity, acceleration and
    /// delayed input are held between refreshes.
    pub v2v_hold: Option<f64>,
}

impl MeasurementOptions {
    pub const RADAR_RATE: f64 = 16.7;
    pub const V2V_RATE: f64 = 25.0;

    /// Radar at 16.7 Hz and V2V at 25 Hz.
    pub fn with_sensor_rates() -> Self {
        Self {
            radar_hold: Some(Self::RADAR_RATE),
            v2v_hold: Some(Self::V2V_RATE),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Held<T> {
    period: u64,
    value: T,
}

fn refresh<T: Copy>(slot: &mut Option<Held<T>>, rate: Option<f64>, t: f64, fresh: T) -> T {
    let Some(rate) = rate else { return fresh };
    let period = (t * rate + 1e-9).floor() as u64;
    match slot {
        Some(h) if h.period == period => h.value,
        _ => {
            *slot = Some(Held { period, value: fresh });
            fresh
        }
    }
}

type V2vSignals = (Option<f64>, Option<f64>, Option<f64>);

/// Per-follower sample-and-hold state.
#[derive(Debug, Clone, Default)]
pub struct MeasurementModel {
    options: MeasurementOptions,
    radar: Option<Held<(f64, f64)>>,
    v2v: Option<Held<V2vSignals>>,
}

impl MeasurementModel {
    pub fn new(options: MeasurementOptions) -> Self {
        Self {
            options,
            radar: None,
            v2v: None,
        }
    }

    pub fn options(&self) -> MeasurementOptions {
        self.options
    }

    /// Maps true signals at time `t` to what the follower observes.
    pub fn apply(&mut self, t: f64, truth: &ControlInputs) -> ControlInputs {
        let (delta, delta_dot) = refresh(
            &mut self.radar,
            self.options.radar_hold,
            t,
            (truth.delta, truth.delta_dot),
        );
        let (predecessor_v, predecessor_a, predecessor_u_delayed) = refresh(
            &mut self.v2v,
            self.options.v2v_hold,
            t,
            (truth.predecessor_v, truth.predecessor_a, truth.predecessor_u_delayed),
        );
        ControlInputs {
            delta,
            delta_dot,
            predecessor_v,
            predecessor_a,
            predecessor_u_delayed,
            ..*truth
        }
    }
}
