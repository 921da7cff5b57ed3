//! Constitutive laws: the pressure `p`, the velocity `V` and the
//! discontinuous coefficient `c(x)`.

mod coefficient;

pub use coefficient::{Affine, CoefficientProfile, ProfileKind, Side};

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::roots;

/// Which quantity to evaluate from a pressure law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureOrder {
    Value,
    First,
    Second,
    Inverse,
}

/// Which quantity to evaluate from a velocity law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityOrder {
    Value,
    First,
    Second,
}

/// A pressure law `p` with `p(0) = 0` and `p' > 0`.
///
/// Implementors supply the value and two derivatives; the inverse falls back
/// to bisection when no closed form is given.
pub trait PressureLaw: Debug + Send + Sync {
    fn value(&self, rho: f64) -> f64;
    fn d1(&self, rho: f64) -> f64;
    fn d2(&self, rho: f64) -> f64;

    fn inverse(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        let mut hi = 1.0;
        while self.value(hi) < xi {
            hi *= 2.0;
        }
        roots::bisect(|r| self.value(r) - xi, 0.0, hi, 0.0).unwrap_or(hi)
    }

    /// `(kappa, gamma)` when the law is `kappa * rho^gamma`.
    fn power_params(&self) -> Option<(f64, f64)> {
        None
    }
}

/// A velocity law `V` with `V(0) = 0` and `V' > 0`.
pub trait VelocityLaw: Debug + Send + Sync {
    fn value(&self, h: f64) -> f64;
    fn d1(&self, h: f64) -> f64;
    fn d2(&self, h: f64) -> f64;

    /// Slope `a` when the law is `V(h) = a h`.
    fn linear_slope(&self) -> Option<f64> {
        None
    }
}

/// `p(rho) = kappa * rho^gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPressure {
    kappa: f64,
    gamma: f64,
}

impl PowerPressure {
    pub fn new(kappa: f64, gamma: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Domain(format!("pressure coefficient kappa = {kappa} must be > 0")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!("pressure exponent gamma = {gamma} must be > 0")));
        }
        Ok(Self { kappa, gamma })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl PressureLaw for PowerPressure {
    fn value(&self, rho: f64) -> f64 {
        if self.gamma == 2.0 {
            self.kappa * rho * rho
        } else {
            self.kappa * rho.powf(self.gamma)
        }
    }

    fn d1(&self, rho: f64) -> f64 {
        if self.gamma == 1.0 {
            self.kappa
        } else if self.gamma == 2.0 {
            2.0 * self.kappa * rho
        } else {
            self.kappa * self.gamma * rho.powf(self.gamma - 1.0)
        }
    }

    fn d2(&self, rho: f64) -> f64 {
        if self.gamma == 1.0 {
            0.0
        } else if self.gamma == 2.0 {
            2.0 * self.kappa
        } else {
            self.kappa * self.gamma * (self.gamma - 1.0) * rho.powf(self.gamma - 2.0)
        }
    }

    fn inverse(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            0.0
        } else if self.gamma == 1.0 {
            xi / self.kappa
        } else if self.gamma == 2.0 {
            (xi / self.kappa).sqrt()
        } else {
            (xi / self.kappa).powf(1.0 / self.gamma)
        }
    }

    fn power_params(&self) -> Option<(f64, f64)> {
        Some((self.kappa, self.gamma))
    }
}

/// `V(h) = slope * h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearVelocity {
    slope: f64,
}

impl LinearVelocity {
    pub fn new(slope: f64) -> Result<Self> {
        if !(slope.is_finite() && slope > 0.0) {
            return Err(Error::Domain(format!("velocity slope {slope} must be > 0")));
        }
        Ok(Self { slope })
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }
}

impl Default for LinearVelocity {
    fn default() -> Self {
        Self { slope: 1.0 }
    }
}

impl VelocityLaw for LinearVelocity {
    fn value(&self, h: f64) -> f64 {
        self.slope * h
    }

    fn d1(&self, _h: f64) -> f64 {
        self.slope
    }

    fn d2(&self, _h: f64) -> f64 {
        0.0
    }

    fn linear_slope(&self) -> Option<f64> {
        Some(self.slope)
    }
}

/// The pair `(p, V)` shared by every solver in the crate.
#[derive(Debug, Clone)]
pub struct ModelLaws {
    pressure: Arc<dyn PressureLaw>,
    velocity: Arc<dyn VelocityLaw>,
}

impl ModelLaws {
    pub fn new(pressure: Arc<dyn PressureLaw>, velocity: Arc<dyn VelocityLaw>) -> Self {
        Self { pressure, velocity }
    }

    /// `p(rho) = kappa rho^gamma`, `V(h) = slope h`.
    pub fn power_linear(kappa: f64, gamma: f64, slope: f64) -> Result<Self> {
        Ok(Self::new(Arc::new(PowerPressure::new(kappa, gamma)?), Arc::new(LinearVelocity::new(slope)?)))
    }

    /// `p(rho) = rho^2`, `V(h) = h`: the laws used in every bundled scenario.
    pub fn quadratic() -> Self {
        Self::new(Arc::new(PowerPressure { kappa: 1.0, gamma: 2.0 }), Arc::new(LinearVelocity::default()))
    }

    pub fn pressure(&self) -> &dyn PressureLaw {
        self.pressure.as_ref()
    }

    pub fn velocity(&self) -> &dyn VelocityLaw {
        self.velocity.as_ref()
    }

    /// `(gamma, slope)` when the closed forms for power pressure and linear
    /// velocity apply.
    pub(crate) fn closed_form(&self) -> Option<(f64, f64)> {
        let (_, gamma) = self.pressure.power_params()?;
        let slope = self.velocity.linear_slope()?;
        Some((gamma, slope))
    }

    pub fn pressure_eval(&self, order: PressureOrder, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::Domain(format!("pressure argument {x} must be >= 0")));
        }
        let p = &self.pressure;
        Ok(match order {
            PressureOrder::Value => p.value(x),
            PressureOrder::First => p.d1(x),
            PressureOrder::Second => p.d2(x),
            PressureOrder::Inverse => p.inverse(x),
        })
    }

    pub fn velocity_eval(&self, order: VelocityOrder, h: f64) -> Result<f64> {
        if h.is_nan() || h < 0.0 {
            return Err(Error::Domain(format!("velocity argument {h} must be >= 0")));
        }
        let v = &self.velocity;
        Ok(match order {
            VelocityOrder::Value => v.value(h),
            VelocityOrder::First => v.d1(h),
            VelocityOrder::Second => v.d2(h),
        })
    }

    /// `|V(h) - rho p'(rho) V'(h)|`.
    pub fn hyperbolicity_margin(&self, rho: f64, h: f64) -> f64 {
        let (p, v) = (&self.pressure, &self.velocity);
        (v.value(h) - rho * p.d1(rho) * v.d1(h)).abs()
    }

    /// `(2 p' + rho p'') V' - rho p'^2 V''`; positive when the first field is
    /// genuinely nonlinear.
    pub fn nonlinearity_margin(&self, rho: f64, h: f64) -> f64 {
        let (p, v) = (&self.pressure, &self.velocity);
        let dp = p.d1(rho);
        (2.0 * dp + rho * p.d2(rho)) * v.d1(h) - rho * dp * dp * v.d2(h)
    }

    /// Samples the structural inequalities on a `VALIDATION_GRID`² grid of
    /// cell midpoints over `domain`.
    pub fn validate(&self, domain: &SampleDomain) -> Result<ValidationReport> {
        domain.check()?;
        let n = VALIDATION_GRID;
        let mut report = ValidationReport {
            samples: n * n,
            hyperbolicity: Margin::unset(),
            nonlinearity: Margin::unset(),
            pressure_monotonicity: Margin::unset(),
            velocity_monotonicity: Margin::unset(),
            passed: false,
        };
        let drho = (domain.rho_max - domain.rho_min) / n as f64;
        let dh = (domain.h_max - domain.h_min) / n as f64;
        for i in 0..n {
            let rho = domain.rho_min + (i as f64 + 0.5) * drho;
            for j in 0..n {
                let h = domain.h_min + (j as f64 + 0.5) * dh;
                report.hyperbolicity.record(self.hyperbolicity_margin(rho, h), rho, h);
                report.nonlinearity.record(self.nonlinearity_margin(rho, h), rho, h);
                report.pressure_monotonicity.record(self.pressure.d1(rho), rho, h);
                report.velocity_monotonicity.record(self.velocity.d1(h), rho, h);
            }
        }
        report.passed =
            [&report.hyperbolicity, &report.nonlinearity, &report.pressure_monotonicity, &report.velocity_monotonicity]
                .iter()
                .all(|m| m.worst > 0.0);
        Ok(report)
    }
}

/// Side length of the sampling grid used by [`ModelLaws::validate`].
pub const VALIDATION_GRID: usize = 200;

/// The rectangle `(rho_min, rho_max] x (h_min, h_max]` sampled by validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDomain {
    pub rho_min: f64,
    pub rho_max: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl SampleDomain {
    pub fn new(rho_max: f64, h_max: f64) -> Self {
        Self { rho_min: 0.0, rho_max, h_min: 0.0, h_max }
    }

    fn check(&self) -> Result<()> {
        let ok = self.rho_min >= 0.0
            && self.h_min >= 0.0
            && self.rho_max > self.rho_min
            && self.h_max > self.h_min
            && self.rho_max.is_finite()
            && self.h_max.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "validation domain ({}, {}] x ({}, {}] must have positive area with rho, h > 0",
                self.rho_min, self.rho_max, self.h_min, self.h_max
            )))
        }
    }
}

/// Worst sampled value of one inequality and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub worst: f64,
    pub rho: f64,
    pub h: f64,
}

impl Margin {
    fn unset() -> Self {
        Self { worst: f64::INFINITY, rho: f64::NAN, h: f64::NAN }
    }

    fn record(&mut self, value: f64, rho: f64, h: f64) {
        // NaN margins count as failures.
        if value.is_nan() || value < self.worst {
            self.worst = if value.is_nan() { f64::NEG_INFINITY } else { value };
            self.rho = rho;
            self.h = h;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub samples: usize,
    pub hyperbolicity: Margin,
    pub nonlinearity: Margin,
    pub pressure_monotonicity: Margin,
    pub velocity_monotonicity: Margin,
    pub passed: bool,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows = [
            ("hyperbolicity |V - rho p' V'|", &self.hyperbolicity),
            ("genuine nonlinearity", &self.nonlinearity),
            ("p' > 0", &self.pressure_monotonicity),
            ("V' > 0", &self.velocity_monotonicity),
        ];
        writeln!(f, "law validation over {} samples: {}", self.samples, if self.passed { "pass" } else { "FAIL" })?;
        for (name, m) in rows {
            writeln!(f, "  {name}: worst margin {:.6e} at (rho, h) = ({:.6}, {:.6})", m.worst, m.rho, m.h)?;
        }
        Ok(())
    }
}
