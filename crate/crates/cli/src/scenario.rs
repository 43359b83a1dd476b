//! Scenario files.
//!
//! Plain text, one `key = value` per line under a section header. `#` and
//! `;` start comments. All quantities are SI.
//!
//! ```text
//! [sim]
//! Ts = 0.01           # sample period, s
//! horizon = 30        # simulated time, s
//! radar_hold = 16.7   # optional radar refresh rate, Hz
//! v2v_hold = 25       # optional V2V refresh rate, Hz
//! clamp = false       # forbid reversing
//!
//! [vehicle.0]         # vehicle 0 is the leader
//! tau = 0.067         # engine lag, s
//! phi = 0.15          # actuation delay, s (multiple of Ts)
//! q0 = 0              # initial position, m
//! v0 = 0              # initial velocity, m/s
//! a0 = 0              # initial acceleration, m/s^2
//! u_init = 0          # input issued before t = 0, m/s^2
//!
//! [policy.1]          # one per follower
//! kind = ext          # dc | dch | ext
//! h_v = 1.2           # s
//! h_a = 0.25          # s^2
//! standstill = 0      # m
//!
//! [controller.1]
//! k_p = 0.2
//! k_d = 0
//! k_dd = 0
//!
//! [leader]            # segments run in order from t = 0
//! cruise = 5 1 10     # v_ref (m/s), gain (1/s), duration (s)
//! pulse = 1 2         # amplitude (m/s^2), duration (s)
//! ```

use std::collections::BTreeMap;

use platoon_core::dynamics::delay_steps;
use platoon_core::simulator::{
    LeaderProfile, LeaderSegment, MeasurementOptions, PlatoonConfig, VehicleSetup, DEFAULT_TS,
};
use platoon_core::{ControllerGains, ControllerSpec, SpacingPolicy, VehicleParams, VehicleState};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("{0}")]
    Invalid(String),
}

fn syntax(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Sim,
    Leader,
    Vehicle(usize),
    Policy(usize),
    Controller(usize),
}

impl Section {
    fn parse(name: &str, line: usize) -> Result<Self, ScenarioError> {
        let indexed = |prefix: &str| -> Option<Result<usize, ScenarioError>> {
            let rest = name.strip_prefix(prefix)?.strip_prefix('.')?;
            Some(
                rest.parse()
                    .map_err(|_| syntax(line, format!("bad section index in [{name}]"))),
            )
        };
        match name {
            "sim" => Ok(Section::Sim),
            "leader" => Ok(Section::Leader),
            _ => {
                if let Some(i) = indexed("vehicle") {
                    Ok(Section::Vehicle(i?))
                } else if let Some(i) = indexed("policy") {
                    Ok(Section::Policy(i?))
                } else if let Some(i) = indexed("controller") {
                    Ok(Section::Controller(i?))
                } else {
                    Err(syntax(line, format!("unknown section [{name}]")))
                }
            }
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Section::Sim => &["Ts", "horizon", "radar_hold", "v2v_hold", "clamp"],
            Section::Leader => &["cruise", "pulse"],
            Section::Vehicle(_) => &["tau", "phi", "q0", "v0", "a0", "u_init"],
            Section::Policy(_) => &["kind", "h_v", "h_a", "standstill"],
            Section::Controller(_) => &["k_p", "k_d", "k_dd"],
        }
    }

    fn label(self) -> String {
        match self {
            Section::Sim => "[sim]".into(),
            Section::Leader => "[leader]".into(),
            Section::Vehicle(i) => format!("[vehicle.{i}]"),
            Section::Policy(i) => format!("[policy.{i}]"),
            Section::Controller(i) => format!("[controller.{i}]"),
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Clone)]
struct Table {
    header_line: usize,
    entries: BTreeMap<&'static str, Entry>,
}

impl Table {
    fn number(&self, key: &str) -> Result<Option<f64>, ScenarioError> {
        let Some(entry) = self.entries.get(key) else {
            return Ok(None);
        };
        parse_number(&entry.value, entry.line, key).map(Some)
    }

    fn required(&self, key: &str, section: Section) -> Result<f64, ScenarioError> {
        self.number(key)?
            .ok_or_else(|| syntax(self.header_line, format!("{} is missing `{key}`", section.label())))
    }
}

fn parse_number(text: &str, line: usize, key: &str) -> Result<f64, ScenarioError> {
    let v: f64 = text
        .parse()
        .map_err(|_| syntax(line, format!("`{key}` expects a number, got `{text}`")))?;
    if !v.is_finite() {
        return Err(syntax(line, format!("`{key}` must be finite")));
    }
    Ok(v)
}

/// Parsed scenario: a ready-to-run platoon and leader profile.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: PlatoonConfig,
    pub leader: LeaderProfile,
}

impl Scenario {
    pub fn from_path(path: &std::path::Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }
}

impl std::str::FromStr for Scenario {
    type Err = ScenarioError;

    fn from_str(text: &str) -> Result<Self, ScenarioError> {
        let mut tables: BTreeMap<Section, Table> = BTreeMap::new();
        let mut segments = Vec::new();
        let mut current: Option<Section> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split(['#', ';']).next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| syntax(line, "unterminated section header"))?
                    .trim();
                let section = Section::parse(name, line)?;
                if tables.contains_key(&section) {
                    return Err(syntax(line, format!("duplicate section {}", section.label())));
                }
                tables.insert(
                    section,
                    Table {
                        header_line: line,
                        entries: BTreeMap::new(),
                    },
                );
                current = Some(section);
                continue;
            }
            let section = current.ok_or_else(|| syntax(line, "key outside any section"))?;
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| syntax(line, format!("expected `key = value`, got `{body}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = section.keys().iter().find(|k| **k == key) else {
                return Err(syntax(line, format!("unknown key `{key}` in {}", section.label())));
            };
            if section == Section::Leader {
                segments.push(parse_segment(known, value, line)?);
                continue;
            }
            let table = tables.get_mut(&section).expect("section registered at its header");
            if table
                .entries
                .insert(
                    known,
                    Entry {
                        value: value.to_string(),
                        line,
                    },
                )
                .is_some()
            {
                return Err(syntax(line, format!("duplicate key `{key}` in {}", section.label())));
            }
        }
        build(&tables, segments)
    }
}

fn parse_segment(key: &str, value: &str, line: usize) -> Result<LeaderSegment, ScenarioError> {
    let fields: Vec<&str> = value.split_whitespace().collect();
    let nums = |names: &[&str]| -> Result<Vec<f64>, ScenarioError> {
        if fields.len() != names.len() {
            return Err(syntax(
                line,
                format!("`{key}` expects {} values: {}", names.len(), names.join(" ")),
            ));
        }
        fields
            .iter()
            .zip(names)
            .map(|(f, n)| parse_number(f, line, n))
            .collect()
    };
    let segment = if key == "cruise" {
        let v = nums(&["v_ref", "gain", "duration"])?;
        LeaderSegment::Cruise {
            v_ref: v[0],
            gain: v[1],
            duration: v[2],
        }
    } else {
        let v = nums(&["amplitude", "duration"])?;
        LeaderSegment::Pulse {
            amplitude: v[0],
            duration: v[1],
        }
    };
    LeaderProfile::new(vec![segment]).map_err(|e| syntax(line, e.to_string()))?;
    Ok(segment)
}

fn parse_bool(entry: &Entry, key: &str) -> Result<bool, ScenarioError> {
    match entry.value.as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(syntax(
            entry.line,
            format!("`{key}` expects true or false, got `{other}`"),
        )),
    }
}

fn parse_policy(table: &Table, section: Section) -> Result<SpacingPolicy, ScenarioError> {
    let kind = table
        .entries
        .get("kind")
        .ok_or_else(|| syntax(table.header_line, format!("{} is missing `kind`", section.label())))?;
    let located = |e: platoon_core::Error| syntax(kind.line, format!("{}: {e}", section.label()));
    let policy = match kind.value.as_str() {
        "dc" => {
            for key in ["h_v", "h_a"] {
                if let Some(e) = table.entries.get(key) {
                    return Err(syntax(e.line, format!("`{key}` does not apply to the dc policy")));
                }
            }
            SpacingPolicy::delayed_constant()
        }
        "dch" => {
            if let Some(e) = table.entries.get("h_a") {
                return Err(syntax(e.line, "`h_a` does not apply to the dch policy"));
            }
            SpacingPolicy::delayed_constant_headway(table.required("h_v", section)?).map_err(located)?
        }
        "ext" => SpacingPolicy::delayed_extended(table.required("h_v", section)?, table.required("h_a", section)?)
            .map_err(located)?,
        other => {
            return Err(syntax(
                kind.line,
                format!("unknown policy kind `{other}` (dc, dch or ext)"),
            ))
        }
    };
    match table.number("standstill")? {
        Some(s) => policy.with_standstill(s).map_err(located),
        None => Ok(policy),
    }
}

fn build(tables: &BTreeMap<Section, Table>, segments: Vec<LeaderSegment>) -> Result<Scenario, ScenarioError> {
    let empty = Table {
        header_line: 0,
        entries: BTreeMap::new(),
    };
    let sim = tables.get(&Section::Sim).unwrap_or(&empty);
    let ts = sim.number("Ts")?.unwrap_or(DEFAULT_TS);
    let horizon = sim
        .number("horizon")?
        .ok_or_else(|| ScenarioError::Invalid("[sim] is missing `horizon`".into()))?;
    let measurement = MeasurementOptions {
        radar_hold: sim.number("radar_hold")?,
        v2v_hold: sim.number("v2v_hold")?,
    };
    let clamp = match sim.entries.get("clamp") {
        Some(e) => parse_bool(e, "clamp")?,
        None => false,
    };

    let n = tables.keys().filter(|s| matches!(s, Section::Vehicle(_))).count();
    if n == 0 {
        return Err(ScenarioError::Invalid("scenario defines no vehicles".into()));
    }
    for section in tables.keys() {
        let (Section::Vehicle(i) | Section::Policy(i) | Section::Controller(i)) = *section else {
            continue;
        };
        if i >= n {
            return Err(ScenarioError::Invalid(format!(
                "{} refers to vehicle {i}, but vehicles are numbered 0..{}",
                section.label(),
                n - 1
            )));
        }
        if i == 0 && !matches!(section, Section::Vehicle(_)) {
            return Err(ScenarioError::Invalid(format!(
                "{}: the leader has no policy or controller",
                section.label()
            )));
        }
    }

    let mut vehicles = Vec::with_capacity(n);
    for i in 0..n {
        let section = Section::Vehicle(i);
        let table = &tables[&section];
        let invalid = |e: platoon_core::Error| ScenarioError::Invalid(format!("vehicle {i}: {e}"));
        let params =
            VehicleParams::new(table.required("tau", section)?, table.required("phi", section)?).map_err(invalid)?;
        delay_steps(params.phi, ts).map_err(invalid)?;
        let get = |key| table.number(key).map(|v| v.unwrap_or(0.0));
        let initial = VehicleState::new(get("q0")?, get("v0")?, get("a0")?);
        vehicles.push(VehicleSetup::new(params, initial, get("u_init")?, ts).map_err(invalid)?);
    }

    let mut controllers = Vec::with_capacity(n - 1);
    for i in 1..n {
        let ps = Section::Policy(i);
        let cs = Section::Controller(i);
        let policy = parse_policy(
            tables
                .get(&ps)
                .ok_or_else(|| ScenarioError::Invalid(format!("vehicle {i} has no {}", ps.label())))?,
            ps,
        )?;
        let ct = tables
            .get(&cs)
            .ok_or_else(|| ScenarioError::Invalid(format!("vehicle {i} has no {}", cs.label())))?;
        let get = |key| ct.number(key).map(|v| v.unwrap_or(0.0));
        let gains = ControllerGains::new(get("k_p")?, get("k_d")?, get("k_dd")?);
        let spec = ControllerSpec::new(policy, gains, vehicles[i].params, Some(vehicles[i - 1].params))
            .map_err(|e| ScenarioError::Invalid(format!("{}: {e}", cs.label())))?;
        controllers.push(spec);
    }

    let mut config =
        PlatoonConfig::new(vehicles, controllers, ts, horizon).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    config.measurement = measurement;
    config.no_reverse = clamp;
    config.validate().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    let leader = LeaderProfile::new(segments).map_err(|e| ScenarioError::Invalid(format!("[leader]: {e}")))?;
    Ok(Scenario { config, leader })
}
