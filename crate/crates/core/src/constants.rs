use crate::error::{Error, Result};

/// Problem-family constants used by the regret and violation bounds.
///
/// * `h`: lower bound such that `‖∇²f_t(x_t*)⁻¹‖ ≤ 1/h`
/// * `beta`: radius of the neighbourhood where the Hessian is `L`-Lipschitz
/// * `hessian_lipschitz`: `L`
/// * `loss_lipschitz`: `l`, local Lipschitz constant of the loss around `x_t*`
/// * `v_bar`: bound on `‖x_{t+1}* − x_t*‖`
/// * `a`: bound on `‖A_t‖`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    h: f64,
    beta: f64,
    hessian_lipschitz: f64,
    loss_lipschitz: f64,
    gamma: f64,
    v_bar: f64,
    a: f64,
}

fn check(name: &str, v: f64, strictly_positive: bool) -> Result<()> {
    let ok = v.is_finite() && if strictly_positive { v > 0.0 } else { v >= 0.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("constant {name} = {v}")))
    }
}

impl Constants {
    pub fn new(
        h: f64,
        beta: f64,
        hessian_lipschitz: f64,
        loss_lipschitz: f64,
        v_bar: f64,
        a: f64,
    ) -> Result<Self> {
        check("h", h, true)?;
        check("beta", beta, true)?;
        check("L", hessian_lipschitz, false)?;
        check("l", loss_lipschitz, false)?;
        check("v_bar", v_bar, false)?;
        check("a", a, false)?;
        let gamma = if hessian_lipschitz > 0.0 {
            beta.min(h / (2.0 * hessian_lipschitz))
        } else {
            beta
        };
        Ok(Self {
            h,
            beta,
            hessian_lipschitz,
            loss_lipschitz,
            gamma,
            v_bar,
            a,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn hessian_lipschitz(&self) -> f64 {
        self.hessian_lipschitz
    }

    pub fn loss_lipschitz(&self) -> f64 {
        self.loss_lipschitz
    }

    /// `min{β, h/(2L)}`, or `β` when `L = 0`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn v_bar(&self) -> f64 {
        self.v_bar
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `h − 2Lγ`, the denominator shared by both bounds.
    pub fn bound_denominator(&self) -> f64 {
        self.h - 2.0 * self.hessian_lipschitz * self.gamma
    }

    /// Drift condition `v̄ ≤ γ − (2L/h)γ²`.
    pub fn drift_condition_holds(&self) -> bool {
        self.v_bar <= self.gamma - 2.0 * self.hessian_lipschitz / self.h * self.gamma * self.gamma
    }

    /// `δ = (2L/h) γ (‖x_0 − x_0*‖ − ‖x_T − x_T*‖)`; may be negative.
    pub fn delta(&self, initial_gap: f64, final_gap: f64) -> f64 {
        2.0 * self.hessian_lipschitz / self.h * self.gamma * (initial_gap - final_gap)
    }

    pub fn with_v_bar(mut self, v_bar: f64) -> Result<Self> {
        check("v_bar", v_bar, false)?;
        self.v_bar = v_bar;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_rules() {
        let c = Constants::new(2.0, 0.5, 1.0, 1.0, 0.1, 1.0).unwrap();
        assert_eq!(c.gamma(), 0.5);
        let c = Constants::new(2.0, 5.0, 1.0, 1.0, 0.1, 1.0).unwrap();
        assert_eq!(c.gamma(), 1.0);
        let c = Constants::new(2.0, 5.0, 0.0, 1.0, 0.1, 1.0).unwrap();
        assert_eq!(c.gamma(), 5.0);
    }

    #[test]
    fn rejects_invalid() {
        assert!(Constants::new(0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(Constants::new(1.0, -1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(Constants::new(1.0, 1.0, f64::NAN, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn drift_condition() {
        // γ = 0.5, γ − (2L/h)γ² = 0.5 − 0.25 = 0.25
        let c = Constants::new(2.0, 0.5, 1.0, 1.0, 0.25, 1.0).unwrap();
        assert!(c.drift_condition_holds());
        assert!(!c.with_v_bar(0.26).unwrap().drift_condition_holds());
    }
}
