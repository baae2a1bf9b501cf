use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Gt => ">",
        }
    }

    /// Whether `lhs rel rhs` holds, allowing `tol` slack for the
    /// non-strict relations.
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tol,
            Relation::Ge => lhs >= rhs - tol,
            Relation::Lt => lhs < rhs,
            Relation::Gt => lhs > rhs,
        }
    }
}

/// Outcome of checking one inequality, with its extreme value over all
/// trials in `lhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    /// `rhs - lhs`.
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub trials: usize,
    pub worst_case: serde_json::Value,
}

impl BoundReport {
    pub fn new(name: &str, lhs: f64, relation: Relation, rhs: f64, tolerance: f64, trials: usize, worst_case: serde_json::Value) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            relation,
            margin: rhs - lhs,
            tolerance,
            pass: lhs.is_finite() && relation.holds(lhs, rhs, tolerance),
            trials,
            worst_case,
        }
    }

    /// Fails the report regardless of the numbers (e.g. a broken premise).
    pub fn fail_with(mut self, why: &str) -> Self {
        self.pass = false;
        if let serde_json::Value::Object(m) = &mut self.worst_case {
            m.insert("failure".into(), why.into());
        }
        self
    }

    pub fn to_jsonl(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Tracks the extreme value of a statistic together with its witness.
pub(crate) struct Extreme<W> {
    pub value: f64,
    pub witness: Option<W>,
    maximize: bool,
}

impl<W> Extreme<W> {
    pub fn max() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            witness: None,
            maximize: true,
        }
    }

    pub fn min() -> Self {
        Self {
            value: f64::INFINITY,
            witness: None,
            maximize: false,
        }
    }

    pub fn offer(&mut self, value: f64, witness: impl FnOnce() -> W) {
        let better = if self.maximize { value > self.value } else { value < self.value };
        if better || value.is_nan() {
            self.value = value;
            self.witness = Some(witness());
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        let better = if self.maximize {
            other.value > self.value
        } else {
            other.value < self.value
        };
        if better || other.value.is_nan() {
            self.value = other.value;
            self.witness = other.witness;
        }
        self
    }
}
