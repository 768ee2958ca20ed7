use std::collections::HashSet;
use std::fmt;

use super::{Distribution, ModelError, SystemCase};

/// Every invariant violation found in a case, one line per issue.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    fn push(&mut self, field: impl fmt::Display, msg: impl fmt::Display) {
        self.issues.push(format!("{field}: {msg}"));
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(f, "  - {issue}")?;
        }
        Ok(())
    }
}

fn check_profile(report: &mut ValidationReport, field: &str, profile: &[f64], horizon: usize) {
    if profile.len() != horizon {
        report.push(
            field,
            format!("has {} entries, horizon is {horizon}", profile.len()),
        );
    }
    if let Some((t, v)) = profile
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        report.push(
            format!("{field}[{t}]"),
            format!("must be finite and >= 0, got {v}"),
        );
    }
}

pub(super) fn validate(case: &SystemCase) -> Result<(), ModelError> {
    let mut r = ValidationReport::default();
    let nt = case.horizon;
    if nt == 0 {
        r.push("horizon", "must be at least 1");
    }
    if case.buses.is_empty() {
        r.push("buses", "at least one bus is required");
    }
    let mut ids = HashSet::new();
    for (k, b) in case.buses.iter().enumerate() {
        if !ids.insert(b.id) {
            r.push(
                format!("buses[{k}].id"),
                format!("duplicate bus id {}", b.id),
            );
        }
    }
    let known = |id: u32| ids.contains(&id);
    if let Some(s) = case.slack_bus {
        if !known(s) {
            r.push("slack_bus", format!("bus {s} does not exist"));
        }
    }

    let mut line_ids = HashSet::new();
    for (k, l) in case.lines.iter().enumerate() {
        let f = format!("lines[{k}] (id {})", l.id);
        if !line_ids.insert(l.id) {
            r.push(&f, "duplicate line id");
        }
        if !known(l.from_bus) {
            r.push(
                format!("{f}.from_bus"),
                format!("bus {} does not exist", l.from_bus),
            );
        }
        if !known(l.to_bus) {
            r.push(
                format!("{f}.to_bus"),
                format!("bus {} does not exist", l.to_bus),
            );
        }
        if l.from_bus == l.to_bus {
            r.push(&f, "from_bus equals to_bus");
        }
        if !(l.reactance > 0.0) {
            r.push(
                format!("{f}.reactance"),
                format!("must be > 0, got {}", l.reactance),
            );
        }
        if !(l.flow_limit > 0.0) {
            r.push(
                format!("{f}.flow_limit"),
                format!("must be > 0, got {}", l.flow_limit),
            );
        }
    }

    let mut unit_ids = HashSet::new();
    for (k, u) in case.units.iter().enumerate() {
        let f = format!("units[{k}] (id {})", u.id);
        if !unit_ids.insert(u.id) {
            r.push(&f, "duplicate unit id");
        }
        if !known(u.bus) {
            r.push(format!("{f}.bus"), format!("bus {} does not exist", u.bus));
        }
        if !(u.p_min >= 0.0) {
            r.push(
                format!("{f}.p_min"),
                format!("must be >= 0, got {}", u.p_min),
            );
        }
        if !(u.p_min <= u.p_max) {
            r.push(
                format!("{f}.p_min"),
                format!("p_min {} exceeds p_max {}", u.p_min, u.p_max),
            );
        }
        if !(u.ramp_up > 0.0) {
            r.push(
                format!("{f}.ramp_up"),
                format!("must be > 0, got {}", u.ramp_up),
            );
        }
        if !(u.ramp_down > 0.0) {
            r.push(
                format!("{f}.ramp_down"),
                format!("must be > 0, got {}", u.ramp_down),
            );
        }
        if u.min_on < 1 {
            r.push(format!("{f}.min_on"), "must be >= 1 hour");
        }
        if u.min_off < 1 {
            r.push(format!("{f}.min_off"), "must be >= 1 hour");
        }
        if u.initial_status.hours == 0 {
            r.push(
                format!("{f}.initial_status.hours"),
                "must be nonzero (+on / -off)",
            );
        }
        let p0 = u.initial_status.output_mw;
        if u.initial_status.is_on() && !(p0 >= u.p_min && p0 <= u.p_max) {
            r.push(
                format!("{f}.initial_status.output_mw"),
                format!(
                    "{p0} outside [{}, {}] for a unit that is on",
                    u.p_min, u.p_max
                ),
            );
        }
        if !u.initial_status.is_on() && p0 != 0.0 {
            r.push(
                format!("{f}.initial_status.output_mw"),
                "must be 0 for a unit that is off",
            );
        }
        if u.cost_segments.is_empty() {
            r.push(
                format!("{f}.cost_segments"),
                "at least one segment is required",
            );
        }
        let mut prev_bp = 0.0;
        let mut prev_mc = f64::NEG_INFINITY;
        for (s, seg) in u.cost_segments.iter().enumerate() {
            if !(seg.breakpoint > prev_bp) {
                r.push(
                    format!("{f}.cost_segments[{s}].breakpoint"),
                    "breakpoints must increase from 0",
                );
            }
            if !(seg.marginal_cost >= prev_mc) || !seg.marginal_cost.is_finite() {
                r.push(
                    format!("{f}.cost_segments[{s}].marginal_cost"),
                    "marginal costs must be finite and non-decreasing (convex cost)",
                );
            }
            prev_bp = seg.breakpoint;
            prev_mc = seg.marginal_cost;
        }
        if let Some(last) = u.cost_segments.last() {
            if (last.breakpoint - u.p_max).abs() > 1e-9 {
                r.push(
                    format!("{f}.cost_segments"),
                    format!(
                        "last breakpoint {} must equal p_max {}",
                        last.breakpoint, u.p_max
                    ),
                );
            }
        }
        for (name, v) in [
            ("no_load_cost", u.no_load_cost),
            ("startup_cost", u.startup_cost),
            ("shutdown_cost", u.shutdown_cost),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                r.push(
                    format!("{f}.{name}"),
                    format!("must be finite and >= 0, got {v}"),
                );
            }
        }
        if !(u.corrective_up() >= 0.0 && u.corrective_up() <= u.ramp_up) {
            r.push(
                format!("{f}.corrective_up"),
                format!("must lie in [0, ramp_up={}]", u.ramp_up),
            );
        }
        if !(u.corrective_dn() >= 0.0 && u.corrective_dn() <= u.ramp_down) {
            r.push(
                format!("{f}.corrective_dn"),
                format!("must lie in [0, ramp_down={}]", u.ramp_down),
            );
        }
    }

    for (k, l) in case.loads.iter().enumerate() {
        let f = format!("loads[{k}]");
        if !known(l.bus) {
            r.push(format!("{f}.bus"), format!("bus {} does not exist", l.bus));
        }
        check_profile(&mut r, &format!("{f}.hourly_mean"), &l.hourly_mean, nt);
        check_sigma(&mut r, &f, l.sigma_fraction, l.distribution, l.skewness);
    }
    for (k, w) in case.wind.iter().enumerate() {
        let f = format!("wind[{k}]");
        if !known(w.bus) {
            r.push(format!("{f}.bus"), format!("bus {} does not exist", w.bus));
        }
        check_profile(&mut r, &format!("{f}.hourly_mean"), &w.hourly_mean, nt);
        check_sigma(&mut r, &f, w.sigma_fraction, w.distribution, w.skewness);
    }
    check_profile(&mut r, "reserves.spinning", &case.reserves.spinning, nt);
    check_profile(&mut r, "reserves.operating", &case.reserves.operating, nt);

    if !r.issues.is_empty() {
        return Err(ModelError::Validation(r));
    }

    let fleet: f64 = case.units.iter().map(|u| u.p_max).sum();
    for t in 0..nt {
        let net = case.net_load(t);
        if net > fleet + 1e-9 {
            r.push(
                format!("hour {}", t + 1),
                format!("net load {net:.3} MW exceeds total capacity {fleet:.3} MW"),
            );
        }
    }
    if !r.issues.is_empty() {
        return Err(ModelError::Validation(r));
    }

    super::network::check_connected(case)
}

fn check_sigma(r: &mut ValidationReport, f: &str, sigma: f64, dist: Distribution, skew: f64) {
    if !(0.0..1.0).contains(&sigma) {
        r.push(
            format!("{f}.sigma_fraction"),
            format!("must lie in [0, 1), got {sigma}"),
        );
    }
    if !skew.is_finite() {
        r.push(format!("{f}.skewness"), "must be finite");
    }
    if dist == Distribution::TruncatedNormal && skew != 0.0 {
        r.push(
            format!("{f}.skewness"),
            "is derived from the truncation for truncated-normal inputs; leave it 0",
        );
    }
}
