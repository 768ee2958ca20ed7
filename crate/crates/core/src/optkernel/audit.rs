//! Opt-in recording of optimality residuals for every LP solved through
//! [`super::solve_lp`]. Off by default; costs one residual pass per solve.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use super::problem::{kkt_residuals, KktResiduals, LinearProgram, Solution};

static ENABLED: AtomicBool = AtomicBool::new(false);
static STATE: Mutex<AuditReport> = Mutex::new(AuditReport {
    solves: 0,
    failures: 0,
    worst: KktResiduals {
        primal: 0.0,
        dual_sign: 0.0,
        complementarity: 0.0,
        gap: 0.0,
    },
});

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AuditReport {
    pub solves: usize,
    /// Solves outside [`KktResiduals::within_tolerance`].
    pub failures: usize,
    /// Component-wise maximum over all audited solves.
    pub worst: KktResiduals,
}

pub fn enable() {
    ENABLED.store(true, Ordering::SeqCst);
}

pub fn disable() {
    ENABLED.store(false, Ordering::SeqCst);
}

pub fn reset() {
    *STATE.lock().unwrap() = AuditReport::default();
}

pub fn report() -> AuditReport {
    *STATE.lock().unwrap()
}

pub(super) fn record(lp: &LinearProgram, sol: &Solution) {
    if !ENABLED.load(Ordering::Relaxed) {
        return;
    }
    let r = kkt_residuals(lp, sol);
    let ok = r.within_tolerance(sol.objective);
    let mut s = STATE.lock().unwrap();
    s.solves += 1;
    if !ok {
        s.failures += 1;
    }
    s.worst.primal = s.worst.primal.max(r.primal);
    s.worst.dual_sign = s.worst.dual_sign.max(r.dual_sign);
    s.worst.complementarity = s.worst.complementarity.max(r.complementarity);
    s.worst.gap = s.worst.gap.max(r.gap);
}
