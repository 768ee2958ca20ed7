use serde::{Deserialize, Serialize};

use crate::model::SystemCase;

/// Commitment and dispatch over the horizon, indexed `[unit][hour]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub committed: Vec<Vec<bool>>,
    pub dispatch: Vec<Vec<f64>>,
    pub spinning: Vec<Vec<f64>>,
    pub operating: Vec<Vec<f64>>,
    pub startup_cost: Vec<Vec<f64>>,
    pub shutdown_cost: Vec<Vec<f64>>,
    pub total_cost: f64,
}

impl Schedule {
    /// Builds a schedule from commitment and dispatch, deriving transition
    /// costs and the total from case data. Reserves default to zero spinning
    /// and full headroom operating.
    pub fn from_parts(
        case: &SystemCase,
        committed: Vec<Vec<bool>>,
        dispatch: Vec<Vec<f64>>,
    ) -> Self {
        let nt = case.num_hours();
        let spinning = vec![vec![0.0; nt]; case.num_units()];
        let operating = case
            .units
            .iter()
            .enumerate()
            .map(|(i, u)| {
                (0..nt)
                    .map(|t| {
                        if committed[i][t] {
                            u.p_max - dispatch[i][t]
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let mut s = Schedule {
            committed,
            dispatch,
            spinning,
            operating,
            startup_cost: vec![],
            shutdown_cost: vec![],
            total_cost: 0.0,
        };
        s.recompute_costs(case);
        s
    }

    pub fn recompute_costs(&mut self, case: &SystemCase) {
        let nt = case.num_hours();
        self.startup_cost = vec![vec![0.0; nt]; case.num_units()];
        self.shutdown_cost = vec![vec![0.0; nt]; case.num_units()];
        for (i, u) in case.units.iter().enumerate() {
            let mut prev = u.initial_status.is_on();
            for t in 0..nt {
                let on = self.committed[i][t];
                if on && !prev {
                    self.startup_cost[i][t] = u.startup_cost;
                }
                if !on && prev {
                    self.shutdown_cost[i][t] = u.shutdown_cost;
                }
                prev = on;
            }
        }
        self.total_cost =
            self.fixed_cost(case) + (0..nt).map(|t| self.energy_cost(case, t)).sum::<f64>();
    }

    /// No-load plus transition costs.
    pub fn fixed_cost(&self, case: &SystemCase) -> f64 {
        let mut c = 0.0;
        for (i, u) in case.units.iter().enumerate() {
            for t in 0..case.num_hours() {
                if self.committed[i][t] {
                    c += u.no_load_cost;
                }
                c += self.startup_cost[i][t] + self.shutdown_cost[i][t];
            }
        }
        c
    }

    pub fn energy_cost(&self, case: &SystemCase, t: usize) -> f64 {
        case.units
            .iter()
            .enumerate()
            .filter(|(i, _)| self.committed[*i][t])
            .map(|(i, u)| u.energy_cost(self.dispatch[i][t]))
            .sum()
    }

    pub fn dispatch_at(&self, t: usize) -> Vec<f64> {
        self.dispatch.iter().map(|row| row[t]).collect()
    }

    pub fn commitment_at(&self, t: usize) -> Vec<bool> {
        self.committed.iter().map(|row| row[t]).collect()
    }

    pub fn committed_unit_hours(&self) -> usize {
        self.committed.iter().flatten().filter(|&&c| c).count()
    }

    /// `unit,hour,committed,dispatch_mw` with 1-based hours and unit ids.
    pub fn to_csv(&self, case: &SystemCase) -> String {
        let mut out = String::from("unit,hour,committed,dispatch_mw\n");
        for (i, u) in case.units.iter().enumerate() {
            for t in 0..case.num_hours() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    u.id,
                    t + 1,
                    u8::from(self.committed[i][t]),
                    self.dispatch[i][t]
                ));
            }
        }
        out
    }

    /// Reads the table written by [`Schedule::to_csv`].
    pub fn from_csv(case: &SystemCase, text: &str) -> Result<Self, String> {
        let (ng, nt) = (case.num_units(), case.num_hours());
        let mut committed = vec![vec![None; nt]; ng];
        let mut dispatch = vec![vec![0.0; nt]; ng];
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| e.to_string())?;
            let line = row + 2;
            if rec.len() != 4 {
                return Err(format!("line {line}: expected 4 fields"));
            }
            let unit: u32 = rec[0]
                .trim()
                .parse()
                .map_err(|e| format!("line {line}: unit: {e}"))?;
            let hour: usize = rec[1]
                .trim()
                .parse()
                .map_err(|e| format!("line {line}: hour: {e}"))?;
            let on = match rec[2].trim() {
                "1" => true,
                "0" => false,
                v => return Err(format!("line {line}: committed must be 0 or 1, got {v:?}")),
            };
            let p: f64 = rec[3]
                .trim()
                .parse()
                .map_err(|e| format!("line {line}: dispatch_mw: {e}"))?;
            let i = case
                .units
                .iter()
                .position(|u| u.id == unit)
                .ok_or(format!("line {line}: unknown unit {unit}"))?;
            if hour == 0 || hour > nt {
                return Err(format!("line {line}: hour {hour} outside 1..={nt}"));
            }
            committed[i][hour - 1] = Some(on);
            dispatch[i][hour - 1] = p;
        }
        let mut full = vec![vec![false; nt]; ng];
        for i in 0..ng {
            for t in 0..nt {
                full[i][t] = committed[i][t].ok_or(format!(
                    "missing unit {} hour {}",
                    case.units[i].id,
                    t + 1
                ))?;
            }
        }
        Ok(Schedule::from_parts(case, full, dispatch))
    }
}
