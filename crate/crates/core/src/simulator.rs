//! Best simulator distributions `D` over `{0,1}^k ∪ {⊥, same}`.
//!
//! Each row is one conditioning event with a target message `s_a` and an
//! observed mass vector `P_a`. The row error for `D` is
//! `½ Σ_b |P_a(b) − D(b) − D(same)·[b = s_a]|`, and the fit minimises either
//! the worst row error or a weighted sum of row errors. Both are linear
//! programs, solved with `minilp`.

use std::collections::BTreeMap;

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::dist::FiniteDist;
use crate::symbol::Symbol;

/// One conditioning event.
#[derive(Clone, Debug)]
pub struct SimRow {
    /// Message that `same` resolves to in this row.
    pub target: Symbol,
    pub weight: f64,
    /// Observed mass per outcome; `same` is not allowed here.
    pub mass: BTreeMap<Symbol, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Minimise the largest row error.
    Worst,
    /// Minimise `Σ_a weight_a · error_a`.
    Weighted,
}

/// Optimal `D` and the objective it attains.
#[derive(Clone, Debug)]
pub struct SimulatorFit {
    pub distance: f64,
    pub d: FiniteDist,
}

/// Row error of a given simulator.
pub fn row_error(row: &SimRow, d: &BTreeMap<Symbol, f64>) -> f64 {
    let same = d.get(&Symbol::Same).copied().unwrap_or(0.0);
    let mut keys: Vec<&Symbol> = row.mass.keys().chain(d.keys()).collect();
    keys.push(&row.target);
    keys.sort();
    keys.dedup();
    let mut l1 = 0.0;
    for b in keys {
        if *b == Symbol::Same {
            continue;
        }
        let mut q = d.get(b).copied().unwrap_or(0.0);
        if *b == row.target {
            q += same;
        }
        l1 += (row.mass.get(b).copied().unwrap_or(0.0) - q).abs();
    }
    0.5 * l1
}

/// Objective value of a given simulator.
pub fn objective_value(rows: &[SimRow], objective: Objective, d: &BTreeMap<Symbol, f64>) -> f64 {
    match objective {
        Objective::Worst => rows.iter().map(|r| row_error(r, d)).fold(0.0, f64::max),
        Objective::Weighted => rows.iter().map(|r| r.weight * row_error(r, d)).sum(),
    }
}

/// Solves for the optimal simulator.
pub fn fit_simulator(rows: &[SimRow], objective: Objective, message_bits: usize) -> Result<SimulatorFit> {
    if rows.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut universe: Vec<Symbol> = Vec::new();
    for r in rows {
        if r.mass.contains_key(&Symbol::Same) || r.target == Symbol::Same {
            return Err(Error::InvalidParams("rows may not mention `same`".into()));
        }
        universe.extend(r.mass.keys().cloned());
        universe.push(r.target.clone());
    }
    universe.sort();
    universe.dedup();

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let worst = match objective {
        Objective::Worst => Some(lp.add_var(1.0, (0.0, f64::INFINITY))),
        Objective::Weighted => None,
    };
    let dvars: Vec<_> = universe.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let dsame = lp.add_var(0.0, (0.0, 1.0));
    let mut total: Vec<_> = dvars.iter().map(|&v| (v, 1.0)).collect();
    total.push((dsame, 1.0));
    lp.add_constraint(total.as_slice(), ComparisonOp::Eq, 1.0);

    for r in rows {
        let obj = match objective {
            Objective::Worst => 0.0,
            Objective::Weighted => 0.5 * r.weight,
        };
        let mut row_sum = Vec::with_capacity(universe.len() + 1);
        for (u, &dv) in universe.iter().zip(&dvars) {
            let p = r.mass.get(u).copied().unwrap_or(0.0);
            let e = lp.add_var(obj, (0.0, f64::INFINITY));
            let mut plus = vec![(e, 1.0), (dv, 1.0)];
            let mut minus = vec![(e, 1.0), (dv, -1.0)];
            if *u == r.target {
                plus.push((dsame, 1.0));
                minus.push((dsame, -1.0));
            }
            lp.add_constraint(plus.as_slice(), ComparisonOp::Ge, p);
            lp.add_constraint(minus.as_slice(), ComparisonOp::Ge, -p);
            row_sum.push((e, 0.5));
        }
        if let Some(w) = worst {
            row_sum.push((w, -1.0));
            lp.add_constraint(row_sum.as_slice(), ComparisonOp::Le, 0.0);
        }
    }

    let sol = lp.solve().map_err(|e| Error::Lp(e.to_string()))?;
    let mut d = BTreeMap::new();
    for (u, &dv) in universe.iter().zip(&dvars) {
        d.insert(u.clone(), sol.var_value(dv).max(0.0));
    }
    d.insert(Symbol::Same, sol.var_value(dsame).max(0.0));
    let sum: f64 = d.values().sum();
    for p in d.values_mut() {
        *p /= sum;
    }
    let distance = objective_value(rows, objective, &d);
    let d = FiniteDist::exact_from_probs(message_bits, d)?;
    Ok(SimulatorFit { distance, d })
}

/// Rows for a coding scheme: one per message, `P_s` = law of `Dec(f(Enc(s)))`.
pub fn code_rows(per_message: &[(crate::bits::BitWord, FiniteDist)]) -> Vec<SimRow> {
    per_message
        .iter()
        .map(|(s, dist)| SimRow {
            target: Symbol::Message(s.clone()),
            weight: 1.0 / per_message.len() as f64,
            mass: dist.iter().into_iter().collect(),
        })
        .collect()
}
