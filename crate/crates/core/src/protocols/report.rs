use crate::table::Table;
use serde::Serialize;
use std::collections::BTreeMap;

/// Result of one experiment: named tables, named scalar results (units in
/// the name), free-text notes and timing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    pub tables: BTreeMap<String, Table>,
    pub values: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    /// Set when the run finished but did not meet its quality bound.
    pub degraded: bool,
    /// Simulated laboratory time covered by the run, seconds.
    pub simulated_time_s: f64,
    /// Wall-clock time; excluded from serialized output so replays are identical.
    #[serde(skip)]
    pub wall_clock_s: f64,
}

impl ExperimentReport {
    pub fn new(experiment: &str, seed: u64) -> Self {
        Self {
            experiment: experiment.to_string(),
            seed,
            tables: BTreeMap::new(),
            values: BTreeMap::new(),
            notes: Vec::new(),
            degraded: false,
            simulated_time_s: 0.0,
            wall_clock_s: 0.0,
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.get(name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub(crate) fn with_table(mut self, name: &str, table: Table) -> Self {
        self.tables.insert(name.to_string(), table);
        self
    }

    pub(crate) fn set(&mut self, name: &str, v: f64) {
        self.values.insert(name.to_string(), v);
    }
}
