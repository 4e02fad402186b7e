//! Energy inequality checks on a finished trace.

use crate::body::io::TraceRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct SlackViolation {
    pub step: usize,
    /// "quasistatic", "descent", "time-delayed" or "inconsistent".
    pub kind: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub worst_qs: f64,
    pub worst_qs_step: usize,
    pub worst_td: f64,
    pub worst_td_step: usize,
    pub violations: Vec<SlackViolation>,
}

impl EnergyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the stored slacks, the per-step descent, and recomputes the
/// time-delayed slack from the energy columns so that a corrupted column
/// is caught at the step where it occurs. The time-delayed inequality is
/// only enforced for inertial runs.
pub fn energy_report(trace: &[TraceRecord], inertial: bool, tol: f64) -> EnergyReport {
    let mut rep = EnergyReport {
        worst_qs: f64::INFINITY,
        worst_qs_step: 0,
        worst_td: f64::INFINITY,
        worst_td_step: 0,
        violations: Vec::new(),
    };
    let Some(first) = trace.first() else { return rep };
    let base = first.energy + first.kinetic;
    let mut prev_qs = 0.0;
    for r in trace.iter().skip(1) {
        if r.slack_qs < rep.worst_qs {
            rep.worst_qs = r.slack_qs;
            rep.worst_qs_step = r.step;
        }
        if r.slack_td < rep.worst_td {
            rep.worst_td = r.slack_td;
            rep.worst_td_step = r.step;
        }
        let mut flag = |kind, value: f64| {
            rep.violations.push(SlackViolation { step: r.step, kind, value });
        };
        if !(r.slack_qs >= -tol) {
            flag("quasistatic", r.slack_qs);
        }
        if !(r.slack_qs - prev_qs >= -tol) {
            flag("descent", r.slack_qs - prev_qs);
        }
        prev_qs = r.slack_qs;
        if inertial && !(r.slack_td >= -tol) {
            flag("time-delayed", r.slack_td);
        }
        let recomputed = base + r.work - r.energy - r.kinetic - r.dissipation;
        if !((recomputed - r.slack_td).abs() <= tol) {
            flag("inconsistent", recomputed - r.slack_td);
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(n: usize) -> Vec<TraceRecord> {
        (0..n)
            .map(|k| TraceRecord { step: k, t: k as f64, energy: 1.0, ..Default::default() })
            .collect()
    }

    #[test]
    fn constant_trace_is_clean() {
        let r = energy_report(&flat(5), true, 1e-9);
        assert!(r.ok());
        assert_eq!(r.worst_qs, 0.0);
    }

    #[test]
    fn bumped_energy_is_flagged_at_its_step() {
        let mut t = flat(6);
        t[3].energy += 1e-3;
        let r = energy_report(&t, true, 1e-9);
        assert!(!r.ok());
        assert!(r.violations.iter().all(|v| v.step == 3));
    }
}
