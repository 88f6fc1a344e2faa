use parkplan_core::search::{PlanResult, PlanStatus};
use parkplan_core::Direction;

#[derive(Debug, Clone, PartialEq)]
pub struct KpiReport {
    pub expanded_states: usize,
    pub iterations: usize,
    pub execution_time_s: f64,
    pub path_length: f64,
    pub reverse_path_length: f64,
    pub direction_changes: usize,
    pub status: PlanStatus,
}

/// Path metrics of a plan. Each step between consecutive samples counts as
/// reverse when the sample it arrives at is tagged reverse.
pub fn compute_kpis(result: &PlanResult) -> KpiReport {
    let mut report = KpiReport {
        expanded_states: result.stats.expanded_states,
        iterations: result.stats.iterations,
        execution_time_s: result.stats.wall_time.as_secs_f64(),
        path_length: 0.0,
        reverse_path_length: 0.0,
        direction_changes: 0,
        status: result.status,
    };
    if result.status != PlanStatus::Found {
        return report;
    }
    for w in result.poses.windows(2) {
        let (a, _) = w[0];
        let (b, dir) = w[1];
        let step = a.distance(&b);
        report.path_length += step;
        if dir == Direction::Reverse {
            report.reverse_path_length += step;
        }
        if w[0].1 != dir {
            report.direction_changes += 1;
        }
    }
    report
}
