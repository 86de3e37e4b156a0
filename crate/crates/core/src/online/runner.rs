use std::fmt;
use std::str::FromStr;

use super::optimum::OptimumSolver;
use super::problem::{AffineEqualityConstraint, ProblemSequence};
use super::step::{oen_update, open_m_step};
use super::trajectory::{RoundOptimum, RoundRecord, Trajectory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Fixed constraints, Newton update from the previous decision.
    OenM,
    /// Project onto the round's feasible set, then Newton update.
    OpenM,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::OenM => "oen-m",
            Algorithm::OpenM => "open-m",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oen-m" => Ok(Algorithm::OenM),
            "open-m" => Ok(Algorithm::OpenM),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// Offline optimum of every round, each solve warm-started from the previous one.
pub fn compute_optima(
    problems: &ProblemSequence,
    x_start: &[f64],
    solver: &OptimumSolver,
) -> Result<Vec<RoundOptimum>> {
    let mut out: Vec<RoundOptimum> = Vec::with_capacity(problems.len());
    for round in problems {
        let init = out.last().map_or(x_start, |o| o.x.as_slice());
        out.push(solver.solve(round, init)?);
    }
    Ok(out)
}

/// Runs `algorithm` from `x0`, measuring each round against its offline optimum.
pub fn run(algorithm: Algorithm, problems: &ProblemSequence, x0: &[f64]) -> Result<Trajectory> {
    let optima = compute_optima(problems, x0, &OptimumSolver::relative(1e-11))?;
    run_with_optima(algorithm, problems, x0, Some(&optima))
}

/// Same as [`run`] with optima supplied by the caller (or none at all).
pub fn run_with_optima(
    algorithm: Algorithm,
    problems: &ProblemSequence,
    x0: &[f64],
    optima: Option<&[RoundOptimum]>,
) -> Result<Trajectory> {
    check_inputs(problems, x0, optima)?;
    match algorithm {
        Algorithm::OenM => {
            if let Some(round) = problems.first_constraint_change() {
                return Err(Error::ConstraintDrift { round });
            }
            let params = problems.rounds()[0].constraint().clone();
            run_oen_m_with_parameters(problems, x0, &params, optima)
        }
        Algorithm::OpenM => {
            let mut traj = Trajectory::with_capacity(problems.len());
            let mut x = x0.to_vec();
            for (i, round) in problems.iter().enumerate() {
                let step = open_m_step(&x, round)?;
                let played = std::mem::replace(&mut x, step.next);
                traj.push(RoundRecord::new(
                    round,
                    played,
                    step.dual,
                    Some(step.projected),
                    optimum_at(optima, i),
                ));
            }
            Ok(traj)
        }
    }
}

/// OEN-M with its parameters `(A, b)` supplied up front. Every update uses
/// `params`; decisions are scored against each round's own constraint.
pub fn run_oen_m_with_parameters(
    problems: &ProblemSequence,
    x0: &[f64],
    params: &AffineEqualityConstraint,
    optima: Option<&[RoundOptimum]>,
) -> Result<Trajectory> {
    check_inputs(problems, x0, optima)?;
    let mut traj = Trajectory::with_capacity(problems.len());
    let mut x = x0.to_vec();
    for (i, round) in problems.iter().enumerate() {
        let update_round = if round.constraint() == params {
            round.clone()
        } else {
            round.with_constraint(params.clone())?
        };
        let step = oen_update(&x, &update_round)?;
        let played = std::mem::replace(&mut x, step.next);
        traj.push(RoundRecord::new(
            round,
            played,
            step.dual,
            None,
            optimum_at(optima, i),
        ));
    }
    Ok(traj)
}

fn optimum_at(optima: Option<&[RoundOptimum]>, i: usize) -> Option<RoundOptimum> {
    optima.map(|o| o[i].clone())
}

fn check_inputs(
    problems: &ProblemSequence,
    x0: &[f64],
    optima: Option<&[RoundOptimum]>,
) -> Result<()> {
    if x0.len() != problems.dim() {
        return Err(Error::DimensionMismatch(format!(
            "x0 has length {}, problems have dimension {}",
            x0.len(),
            problems.dim()
        )));
    }
    if let Some(o) = optima {
        if o.len() != problems.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} optima for {} rounds",
                o.len(),
                problems.len()
            )));
        }
    }
    Ok(())
}
