use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for comparing event times.
pub const TIME_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verifier {
    V0,
    V1,
}

impl Verifier {
    /// `V0` for `false`, `V1` for `true`.
    pub fn from_bit(b: bool) -> Self {
        if b {
            Verifier::V1
        } else {
            Verifier::V0
        }
    }

    pub fn other(self) -> Self {
        match self {
            Verifier::V0 => Verifier::V1,
            Verifier::V1 => Verifier::V0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verifier::V0 => "V0",
            Verifier::V1 => "V1",
        }
    }
}

/// Verifiers at 0 and 1 on a line, the prover in between, signals at unit speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub prover: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self { prover: 0.5 }
    }
}

impl Geometry {
    pub const SIGNAL_SPEED: f64 = 1.0;

    pub fn new(prover: f64) -> Result<Self> {
        if !(prover > 0.0 && prover < 1.0) {
            return Err(Error::OutOfRange {
                value: prover,
                expected: "(0, 1)",
            });
        }
        Ok(Self { prover })
    }

    pub fn position(&self, v: Verifier) -> f64 {
        match v {
            Verifier::V0 => 0.0,
            Verifier::V1 => 1.0,
        }
    }

    pub fn distance(&self, v: Verifier, at: f64) -> f64 {
        (self.position(v) - at).abs() / Self::SIGNAL_SPEED
    }

    /// When both challenges reach the prover.
    pub fn meeting_time(&self) -> f64 {
        self.prover.max(1.0 - self.prover) / Self::SIGNAL_SPEED
    }

    /// When `v` sends its challenge so that both meet at the prover.
    pub fn dispatch_time(&self, v: Verifier) -> f64 {
        self.meeting_time() - self.distance(v, self.prover)
    }

    /// When an answer sent from the prover on receipt reaches `v`.
    pub fn expected_arrival(&self, v: Verifier) -> f64 {
        self.meeting_time() + self.distance(v, self.prover)
    }

    /// Earliest moment a party at `at` holds both challenges.
    pub fn both_inputs_at(&self, at: f64) -> f64 {
        (self.dispatch_time(Verifier::V0) + self.distance(Verifier::V0, at))
            .max(self.dispatch_time(Verifier::V1) + self.distance(Verifier::V1, at))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventAction {
    /// A verifier sends its challenge.
    Dispatch,
    /// Someone receives a message.
    Receive,
    /// Someone sends a message.
    Send,
    /// An answer reaches a verifier.
    Arrive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeEvent {
    pub actor: String,
    pub action: EventAction,
    pub position: f64,
    pub time: f64,
    pub payload: String,
}

impl SpacetimeEvent {
    pub fn new(actor: &str, action: EventAction, position: f64, time: f64, payload: impl Into<String>) -> Self {
        Self {
            actor: actor.to_string(),
            action,
            position,
            time,
            payload: payload.into(),
        }
    }
}

/// True iff every answer reaches its verifier exactly when an answer sent
/// from the prover's position on receipt of both challenges would.
pub fn timing_check_events(geometry: &Geometry, events: &[SpacetimeEvent]) -> bool {
    events.iter().all(|e| {
        e.time >= 0.0
            && (e.action != EventAction::Arrive || {
                let v = if e.actor == Verifier::V0.label() { Verifier::V0 } else { Verifier::V1 };
                (e.time - geometry.expected_arrival(v)).abs() <= TIME_TOLERANCE
            })
    })
}

/// Events of a party at `at` that waits `delay` after holding both
/// challenges and then answers every verifier in `targets`.
pub fn responder_events(
    geometry: &Geometry,
    actor: &str,
    at: f64,
    delay: f64,
    targets: &[Verifier],
    payload: &str,
) -> Vec<SpacetimeEvent> {
    let recv = geometry.both_inputs_at(at);
    let send = recv + delay;
    let mut ev = vec![
        SpacetimeEvent::new(actor, EventAction::Receive, at, recv, "x, y"),
        SpacetimeEvent::new(actor, EventAction::Send, at, send, payload),
    ];
    for &v in targets {
        ev.push(SpacetimeEvent::new(
            v.label(),
            EventAction::Arrive,
            geometry.position(v),
            send + geometry.distance(v, at),
            payload,
        ));
    }
    ev
}

pub fn dispatch_events(geometry: &Geometry, x: usize, y: usize, quantum: &str) -> Vec<SpacetimeEvent> {
    vec![
        SpacetimeEvent::new(
            "V0",
            EventAction::Dispatch,
            0.0,
            geometry.dispatch_time(Verifier::V0),
            format!("x={x}{quantum}"),
        ),
        SpacetimeEvent::new("V1", EventAction::Dispatch, 1.0, geometry.dispatch_time(Verifier::V1), format!("y={y}")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honest_and_delayed() {
        let g = Geometry::new(0.3).unwrap();
        let mut ev = dispatch_events(&g, 0, 0, "");
        ev.extend(responder_events(&g, "P", 0.3, 0.0, &[Verifier::V0, Verifier::V1], "b"));
        assert!(timing_check_events(&g, &ev));
        let late = responder_events(&g, "P", 0.3, 0.1, &[Verifier::V0], "b");
        assert!(!timing_check_events(&g, &late));
    }

    #[test]
    fn displaced_prover_fails_one_side() {
        let g = Geometry::new(0.5).unwrap();
        let ev = responder_events(&g, "P", 0.4, 0.0, &[Verifier::V0], "b");
        assert!(timing_check_events(&g, &ev));
        let ev = responder_events(&g, "P", 0.4, 0.0, &[Verifier::V1], "b");
        assert!(!timing_check_events(&g, &ev));
        assert!(Geometry::new(1.0).is_err());
    }
}
