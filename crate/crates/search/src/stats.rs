//! Counters reported by the engines.

/// Run statistics. Violation counters belong to the instrumented checks
/// of the sequential search and stay zero for a correct run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchStats {
    pub expansions: u64,
    pub peak_nodes: u64,
    pub tt_entries_peak: u64,
    pub gn_count: u64,
    pub max_depth: u64,
    pub threads: u64,
    pub wall_time_seconds: f64,
    pub pushes: u64,
    pub pops: u64,
    pub push_violations: u64,
    pub pop_violations: u64,
    pub identity_violations: u64,
    pub nonneg_violations: u64,
    pub unwinds: u64,
}

impl SearchStats {
    /// Adds the counters of another thread.
    pub fn merge(&mut self, o: &SearchStats) {
        self.expansions += o.expansions;
        self.peak_nodes += o.peak_nodes;
        self.max_depth = self.max_depth.max(o.max_depth);
        self.pushes += o.pushes;
        self.pops += o.pops;
        self.push_violations += o.push_violations;
        self.pop_violations += o.pop_violations;
        self.identity_violations += o.identity_violations;
        self.nonneg_violations += o.nonneg_violations;
        self.unwinds += o.unwinds;
    }

    pub fn violations(&self) -> u64 {
        self.push_violations + self.pop_violations + self.identity_violations + self.nonneg_violations
    }
}
