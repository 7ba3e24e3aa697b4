//! Per-axis position controllers that emit command velocities.
//!
//! The sliding-mode law works on `s = lambda e + e'` with the position error
//! `e = p - p_d` (target at rest), and inverts the first-order velocity model
//! `v' = A v + B u` so that `s' = -k_reach sgn(s) - q s`. The PD law is the
//! hand-tuned baseline it is compared against.

use thiserror::Error;

use crate::plant::FirstOrderModel;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ControlError {
    #[error("invalid controller parameters: {0}")]
    Config(&'static str),
}

/// Sliding-mode gains for one axis group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmcParams {
    /// Surface slope, 1/s.
    pub lambda: f64,
    /// Constant-rate reaching gain, m/s^2.
    pub k_reach: f64,
    /// Proportional reaching gain, 1/s.
    pub q: f64,
    /// Half-width of the linear region replacing `sign(s)`, m/s.
    pub boundary_layer: f64,
}

impl SmcParams {
    pub const DEFAULT_BOUNDARY_LAYER: f64 = 0.05;

    pub fn new(lambda: f64, k_reach: f64, q: f64, boundary_layer: f64) -> Result<Self, ControlError> {
        let p = Self {
            lambda,
            k_reach,
            q,
            boundary_layer,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        let all = [self.lambda, self.k_reach, self.q, self.boundary_layer];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(ControlError::Config("non-finite gain"));
        }
        if self.lambda <= 0.0 {
            return Err(ControlError::Config("lambda must be positive"));
        }
        if self.k_reach < 0.0 || self.q < 0.0 {
            return Err(ControlError::Config("reaching gains must be non-negative"));
        }
        if self.k_reach + self.q <= 0.0 {
            return Err(ControlError::Config("k_reach + q must be positive"));
        }
        if self.boundary_layer <= 0.0 {
            return Err(ControlError::Config("boundary layer must be positive"));
        }
        Ok(())
    }

    pub fn with_q(self, q: f64) -> Result<Self, ControlError> {
        Self::new(self.lambda, self.k_reach, q, self.boundary_layer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdParams {
    /// 1/s
    pub k_p: f64,
    pub k_d: f64,
}

impl PdParams {
    pub fn new(k_p: f64, k_d: f64) -> Result<Self, ControlError> {
        if !(k_p.is_finite() && k_d.is_finite()) {
            return Err(ControlError::Config("non-finite gain"));
        }
        if k_p <= 0.0 {
            return Err(ControlError::Config("k_p must be positive"));
        }
        if k_d < 0.0 {
            return Err(ControlError::Config("k_d must be non-negative"));
        }
        Ok(Self { k_p, k_d })
    }
}

/// Measured position and velocity over ground for one axis, and where it
/// should be.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisFeedback {
    pub position: f64,
    pub velocity: f64,
    pub target: f64,
}

impl AxisFeedback {
    pub fn error(&self) -> f64 {
        self.position - self.target
    }
}

/// `s = lambda (p - p_d) + v`.
pub fn sliding_surface(fb: &AxisFeedback, lambda: f64) -> f64 {
    lambda * fb.error() + fb.velocity
}

/// `sign(s)` with a linear ramp of half-width `boundary_layer` around zero.
pub fn smoothed_sign(s: f64, boundary_layer: f64) -> f64 {
    (s / boundary_layer).clamp(-1.0, 1.0)
}

/// Desired surface rate `-k_reach sgn(s) - q s`.
pub fn reaching_rate(s: f64, params: &SmcParams) -> f64 {
    -params.k_reach * smoothed_sign(s, params.boundary_layer) - params.q * s
}

fn smc_with_switch(
    params: &SmcParams,
    fb: &AxisFeedback,
    model: &FirstOrderModel,
    switch: f64,
    s: f64,
) -> f64 {
    let v = fb.velocity;
    (-params.k_reach * switch - params.q * s - model.state_coeff() * v - params.lambda * v)
        / model.input_coeff()
}

/// Sliding-mode command velocity. Not saturated.
pub fn smc_control(params: &SmcParams, fb: &AxisFeedback, model: &FirstOrderModel) -> f64 {
    let s = sliding_surface(fb, params.lambda);
    smc_with_switch(params, fb, model, smoothed_sign(s, params.boundary_layer), s)
}

/// Same law with the discontinuous `sign(s)`; chatters in discrete time.
pub fn smc_control_hard_sign(params: &SmcParams, fb: &AxisFeedback, model: &FirstOrderModel) -> f64 {
    let s = sliding_surface(fb, params.lambda);
    let sign = if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    };
    smc_with_switch(params, fb, model, sign, s)
}

/// `u = -k_p e - k_d v`, derivative on measured velocity.
pub fn pd_control(params: &PdParams, fb: &AxisFeedback) -> f64 {
    -params.k_p * fb.error() - params.k_d * fb.velocity
}

/// The control law driving one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisLaw {
    /// Sliding mode built on a design model, which need not match the plant.
    Smc {
        params: SmcParams,
        model: FirstOrderModel,
    },
    Pd(PdParams),
}

impl AxisLaw {
    pub fn command(&self, fb: &AxisFeedback) -> f64 {
        match self {
            AxisLaw::Smc { params, model } => smc_control(params, fb, model),
            AxisLaw::Pd(params) => pd_control(params, fb),
        }
    }

    pub fn smc_params(&self) -> Option<&SmcParams> {
        match self {
            AxisLaw::Smc { params, .. } => Some(params),
            AxisLaw::Pd(_) => None,
        }
    }
}

/// Laws for X, Y and Z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerSet {
    pub laws: [AxisLaw; 3],
}

impl ControllerSet {
    /// Sliding mode on every axis; X and Y share `xy` and the X/Y model.
    pub fn smc(
        xy: SmcParams,
        z: SmcParams,
        model_xy: FirstOrderModel,
        model_z: FirstOrderModel,
    ) -> Self {
        let lat = AxisLaw::Smc {
            params: xy,
            model: model_xy,
        };
        Self {
            laws: [
                lat,
                lat,
                AxisLaw::Smc {
                    params: z,
                    model: model_z,
                },
            ],
        }
    }

    pub fn pd(xy: PdParams, z: PdParams) -> Self {
        Self {
            laws: [AxisLaw::Pd(xy), AxisLaw::Pd(xy), AxisLaw::Pd(z)],
        }
    }

    pub fn is_smc(&self) -> bool {
        matches!(self.laws[0], AxisLaw::Smc { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GX: FirstOrderModel = FirstOrderModel::PAPER_XY;

    fn fb(e: f64, v: f64) -> AxisFeedback {
        AxisFeedback {
            position: 2.0 + e,
            velocity: v,
            target: 2.0,
        }
    }

    fn params() -> SmcParams {
        SmcParams::new(1.0, 0.1, 0.5, 0.05).unwrap()
    }

    #[test]
    fn surface_values() {
        assert_eq!(sliding_surface(&fb(0.0, 0.0), 1.5), 0.0);
        assert!((sliding_surface(&fb(0.5, -0.2), 1.0) - 0.3).abs() < 1e-12);
        let s = sliding_surface(&fb(0.4, 0.7), 2.0);
        assert!((sliding_surface(&fb(-0.4, -0.7), 2.0) + s).abs() < 1e-12);
    }

    #[test]
    fn smc_worked_example() {
        // A = -1/0.75, B = 1.16/0.75; s = 0.2, sgn = 1
        // u = (-0.1 - 0.1 + 0.5/0.75 - 0.5) / (1.16/0.75)
        let a: f64 = -1.0 / 0.75;
        let b: f64 = 1.16 / 0.75;
        let expected = (-0.1 - 0.5 * 0.2 - a * 0.5 - 1.0 * 0.5) / b;
        let u = smc_control(&params(), &fb(-0.3, 0.5), &GX);
        assert!((u - expected).abs() < 1e-12);
        assert!((u + 0.0216).abs() < 1e-4, "{u}");
        let mirrored = smc_control(&params(), &fb(0.3, -0.5), &GX);
        assert!((mirrored - 0.0216).abs() < 1e-4);
    }

    #[test]
    fn smc_at_rest_on_target() {
        assert_eq!(smc_control(&params(), &fb(0.0, 0.0), &GX), 0.0);
    }

    #[test]
    fn reaching_rate_values() {
        let p = params();
        assert_eq!(reaching_rate(0.0, &p), 0.0);
        assert!((reaching_rate(0.2, &p) + 0.2).abs() < 1e-12);
        for s in [-3.0, -0.01, 0.001, 0.04, 2.0] {
            assert_eq!(reaching_rate(s, &p).signum(), -s.signum());
        }
    }

    #[test]
    fn pd_values() {
        let p = PdParams::new(0.8, 0.5).unwrap();
        assert_eq!(pd_control(&p, &fb(0.0, 0.0)), 0.0);
        assert!((pd_control(&p, &fb(1.0, 0.2)) + 0.9).abs() < 1e-12);
        let u = pd_control(&p, &fb(0.3, 0.1));
        assert!((pd_control(&p, &fb(0.6, 0.2)) - 2.0 * u).abs() < 1e-12);
    }

    #[test]
    fn parameter_validation() {
        assert!(SmcParams::new(0.0, 1.0, 1.0, 0.05).is_err());
        assert!(SmcParams::new(1.0, -1.0, 1.0, 0.05).is_err());
        assert!(SmcParams::new(1.0, 0.0, 0.0, 0.05).is_err());
        assert!(SmcParams::new(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(SmcParams::new(1.0, 0.0, 1.0, 0.05).is_ok());
        assert!(PdParams::new(0.0, 0.1).is_err());
        assert!(PdParams::new(1.0, -0.1).is_err());
    }

    #[test]
    fn hard_sign_matches_outside_layer() {
        let p = params();
        let f = fb(-2.0, 0.1);
        assert_eq!(smc_control(&p, &f, &GX), smc_control_hard_sign(&p, &f, &GX));
    }
}
