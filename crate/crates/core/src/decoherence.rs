//! Flip channels acting independently on both qubits.
//!
//! A flip channel keeps Bell-diagonal states Bell-diagonal: it leaves one correlation
//! component unchanged and multiplies the other two by a common factor `s`. With flip
//! probability `p` per qubit `s = (1 - 2p)²`; as a continuous-time process `s = exp(-Γt)`.
//! Trajectories are therefore straight lines towards the preserved axis, sampled here from
//! the exact solution.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{self, all_measures, CorrelationMeasures};
use crate::state::{self, CorrelationVector};

/// Bisection stops once the bracket in the scale factor is this narrow.
pub const BISECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    /// Random σz flips; preserves c3.
    Phase,
    /// Random σx flips; preserves c1.
    Bit,
    /// Random σy flips; preserves c2.
    BitPhase,
}

impl ChannelKind {
    /// Index of the correlation component the channel leaves unchanged.
    pub fn preserved_index(self) -> usize {
        match self {
            ChannelKind::Bit => 0,
            ChannelKind::BitPhase => 1,
            ChannelKind::Phase => 2,
        }
    }

    /// Indices of the two decaying components, in increasing order.
    pub fn decaying_indices(self) -> [usize; 2] {
        match self {
            ChannelKind::Bit => [1, 2],
            ChannelKind::BitPhase => [0, 2],
            ChannelKind::Phase => [0, 1],
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Phase => "phase",
            ChannelKind::Bit => "bit",
            ChannelKind::BitPhase => "bitphase",
        })
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phase" => Ok(ChannelKind::Phase),
            "bit" => Ok(ChannelKind::Bit),
            "bitphase" => Ok(ChannelKind::BitPhase),
            other => Err(Error::InvalidArgument(format!("unknown channel kind {other:?}"))),
        }
    }
}

/// A flip channel with its scale factor on the decaying components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipChannel {
    pub kind: ChannelKind,
    scale: f64,
}

impl FlipChannel {
    /// Flip probability `p ∈ [0, 1/2]` on each qubit.
    pub fn with_probability(kind: ChannelKind, p: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::Domain {
                name: "p",
                value: p,
                domain: "[0, 1/2]",
            });
        }
        let s = 1.0 - 2.0 * p;
        Ok(Self { kind, scale: s * s })
    }

    /// Continuous-time channel at rate `gamma` after time `t`.
    pub fn with_rate(kind: ChannelKind, gamma: f64, t: f64) -> Result<Self> {
        check_nonnegative("gamma", gamma)?;
        check_nonnegative("t", t)?;
        Ok(Self {
            kind,
            scale: (-gamma * t).exp(),
        })
    }

    /// Direct scale factor `s ∈ [0, 1]`.
    pub fn with_scale(kind: ChannelKind, scale: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&scale) {
            return Err(Error::Domain {
                name: "s",
                value: scale,
                domain: "[0, 1]",
            });
        }
        Ok(Self { kind, scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

fn check_nonnegative(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::Domain {
            name,
            value: v,
            domain: "[0, inf)",
        });
    }
    Ok(())
}

fn scaled(c: CorrelationVector, kind: ChannelKind, s: f64) -> CorrelationVector {
    let mut v = c.to_array();
    for i in kind.decaying_indices() {
        v[i] *= s;
    }
    CorrelationVector::from_array(v)
}

pub fn apply_channel(c: CorrelationVector, ch: &FlipChannel) -> Result<CorrelationVector> {
    let c = c.ensure_physical()?;
    Ok(scaled(c, ch.kind, ch.scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub c: CorrelationVector,
    pub measures: CorrelationMeasures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// Discord becomes nonanalytic: the largest decaying `|c_j|` meets the preserved one.
    DiscordKink,
    /// The state enters the separable octahedron.
    SuddenDeath,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::DiscordKink => "discord_kink",
            EventKind::SuddenDeath => "sudden_death",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEvent {
    pub kind: EventKind,
    pub t: f64,
    pub c_at_event: CorrelationVector,
}

/// Samples of a decohering state together with its transition events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelTrajectory {
    pub kind: ChannelKind,
    pub gamma: f64,
    pub samples: Vec<TrajectorySample>,
    /// All finite-time events, sorted by time (not limited to the sampled window).
    pub events: Vec<TrajectoryEvent>,
    /// Whether the state approaches the preserved axis as `t → ∞` (it never gets there
    /// in finite time).
    pub reaches_axis: bool,
}

fn check_trajectory_args(gamma: f64, t_max: f64, steps: usize) -> Result<()> {
    check_nonnegative("gamma", gamma)?;
    check_nonnegative("t_max", t_max)?;
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("steps = {steps}, need at least 2")));
    }
    Ok(())
}

/// Exact samples at `steps` uniform times in `[0, t_max]`.
pub fn trajectory(
    c0: CorrelationVector,
    kind: ChannelKind,
    gamma: f64,
    t_max: f64,
    steps: usize,
) -> Result<Vec<TrajectorySample>> {
    check_trajectory_args(gamma, t_max, steps)?;
    let c0 = c0.ensure_physical()?;
    (0..steps)
        .map(|i| {
            let t = t_max * i as f64 / (steps - 1) as f64;
            let c = scaled(c0, kind, (-gamma * t).exp());
            Ok(TrajectorySample {
                t,
                c,
                measures: all_measures(c)?,
            })
        })
        .collect()
}

/// Magnitudes `(largest decaying, sum of decaying, preserved)`.
fn decay_profile(c: CorrelationVector, kind: ChannelKind) -> (f64, f64, f64) {
    let v = c.to_array();
    let [i, j] = kind.decaying_indices();
    let (a, b) = (v[i].abs(), v[j].abs());
    (a.max(b), a + b, v[kind.preserved_index()].abs())
}

fn event_at(c0: CorrelationVector, kind: ChannelKind, gamma: f64, event: EventKind, s: f64) -> TrajectoryEvent {
    TrajectoryEvent {
        kind: event,
        t: -s.ln() / gamma,
        c_at_event: scaled(c0, kind, s),
    }
}

fn sort_events(events: &mut [TrajectoryEvent]) {
    events.sort_by(|x, y| x.t.total_cmp(&y.t));
}

/// Event times from the closed forms.
///
/// The separability and kink conditions are both linear in the scale factor `s`:
/// sudden death at `s = (1 - |c_p|)/(|c_i| + |c_j|)` and the kink at
/// `s = |c_p| / max(|c_i|, |c_j|)`, with `c_p` the preserved component. Events whose
/// scale factor falls outside `(0, 1)` do not happen in finite positive time.
pub fn analytic_event_times(c0: CorrelationVector, kind: ChannelKind, gamma: f64) -> Result<Vec<TrajectoryEvent>> {
    check_nonnegative("gamma", gamma)?;
    let c0 = c0.ensure_physical()?;
    if gamma == 0.0 {
        return Ok(Vec::new());
    }
    let (max_decaying, sum_decaying, preserved) = decay_profile(c0, kind);
    let mut events = Vec::new();
    if sum_decaying > 0.0 {
        let s = (1.0 - preserved) / sum_decaying;
        if s > 0.0 && s < 1.0 {
            events.push(event_at(c0, kind, gamma, EventKind::SuddenDeath, s));
        }
    }
    if max_decaying > 0.0 {
        let s = preserved / max_decaying;
        if s > 0.0 && s < 1.0 {
            events.push(event_at(c0, kind, gamma, EventKind::DiscordKink, s));
        }
    }
    sort_events(&mut events);
    Ok(events)
}

/// Bisection on `s ∈ (0, 1]` for the point where `pred` switches from true (at `s = 1`)
/// to false (as `s → 0`).
fn bisect_scale(pred: impl Fn(f64) -> bool) -> Option<f64> {
    if !pred(1.0) || pred(0.0) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // A bracket collapsed onto s = 0 means the switch only happens as t → ∞.
    Some(0.5 * (lo + hi)).filter(|&s| s > BISECTION_TOL)
}

/// Event times located by bisection on measured quantities along the trajectory:
/// positivity of the concurrence, and whether `max |c_j|` is attained by a decaying
/// component. Agrees with [`analytic_event_times`] to [`BISECTION_TOL`] in `s`.
pub fn bisect_event_times(c0: CorrelationVector, kind: ChannelKind, gamma: f64) -> Result<Vec<TrajectoryEvent>> {
    check_nonnegative("gamma", gamma)?;
    let c0 = c0.ensure_physical()?;
    if gamma == 0.0 {
        return Ok(Vec::new());
    }
    let p = kind.preserved_index();
    let mut events = Vec::new();

    let entangled = |s: f64| {
        measures::concurrence(scaled(c0, kind, s))
            .map(|x| x > 0.0)
            .unwrap_or(false)
    };
    if let Some(s) = bisect_scale(entangled) {
        events.push(event_at(c0, kind, gamma, EventKind::SuddenDeath, s));
    }

    let decaying_dominates = |s: f64| {
        let v = scaled(c0, kind, s).to_array();
        kind.decaying_indices().iter().any(|&i| v[i].abs() > v[p].abs())
    };
    if let Some(s) = bisect_scale(decaying_dominates) {
        events.push(event_at(c0, kind, gamma, EventKind::DiscordKink, s));
    }
    sort_events(&mut events);
    Ok(events)
}

/// Samples plus closed-form events.
pub fn simulate(
    c0: CorrelationVector,
    kind: ChannelKind,
    gamma: f64,
    t_max: f64,
    steps: usize,
) -> Result<ChannelTrajectory> {
    let samples = trajectory(c0, kind, gamma, t_max, steps)?;
    let events = analytic_event_times(c0, kind, gamma)?;
    let (max_decaying, _, _) = decay_profile(c0, kind);
    Ok(ChannelTrajectory {
        kind,
        gamma,
        samples,
        events,
        reaches_axis: gamma > 0.0 && max_decaying > 0.0,
    })
}

/// Discord along the phase-flip line `(c1, -c3·c1, c3)` through the edge of the tetrahedron:
/// frozen at `1 - H2((1 + c3)/2)` while `c1 ≥ c3`, then `1 - H2((1 + c1)/2)`.
pub fn trajectory_discord_closed_form(c1: f64, c3: f64) -> Result<f64> {
    for (name, v) in [("c1", c1), ("c3", c3)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain {
                name,
                value: v,
                domain: "[0, 1]",
            });
        }
    }
    let x = if c1 >= c3 { c3 } else { c1 };
    Ok(1.0 - measures::h2((1.0 + x) / 2.0))
}

/// The state `(c1, -c3·c1, c3)` on which [`trajectory_discord_closed_form`] is defined.
pub fn edge_trajectory_state(c1: f64, c3: f64) -> CorrelationVector {
    CorrelationVector::new(c1, -c3 * c1, c3)
}

/// Whether every sample stays inside the tetrahedron.
pub fn all_physical(samples: &[TrajectorySample]) -> bool {
    samples.iter().all(|s| state::is_physical(s.c, state::PHYSICAL_TOL))
}
