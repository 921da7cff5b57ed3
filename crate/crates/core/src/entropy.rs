//! Entropy pairs and the admissibility of single discontinuities.
//!
//! The one-parameter family is
//!
//! ```text
//! E_k(h, w) = 1 - p^{-1}(w - h) / p^{-1}(w - k)
//! Q_k(h, w) = V(k) - V(h) p^{-1}(w - h) / p^{-1}(w - k)
//! ```
//!
//! for `h in (k, w]`, and zero otherwise. A jump from `W-` to `W+` moving
//! with speed `sigma` dissipates `D_k = sigma [E_k] - c [Q_k]` (brackets are
//! right minus left); it is admissible when `D_k >= 0` for every `k`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{CoefficientProfile, ModelLaws, Side};
use crate::quad;
use crate::riemann::{self, WaveFan};
use crate::state::InvariantState;

/// Absolute tolerance of the quadratures in [`pair_general_eval`].
pub const QUAD_TOL: f64 = 1e-10;
/// Finite-difference step of [`conent0_residual`].
pub const FD_STEP: f64 = 1e-6;
/// Round-off slack when testing `D_k >= 0`.
pub const DISSIPATION_TOL: f64 = 1e-12;
/// Tolerance for matching speeds and states against a Riemann solution.
pub const JUMP_TOL: f64 = 1e-9;
/// Number of uniform intervals in the default `k` grid.
pub const K_GRID_INTERVALS: usize = 1000;

/// `(E_k(W), Q_k(W))`.
pub fn pair_k_eval(laws: &ModelLaws, k: f64, state: InvariantState) -> (f64, f64) {
    let InvariantState { h, w } = state;
    if !(h > k && h <= w) {
        return (0.0, 0.0);
    }
    let ratio = laws.density(state) / laws.pressure().inverse(w - k);
    (1.0 - ratio, laws.velocity().value(k) - laws.velocity().value(h) * ratio)
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Data `(f, g, b)` of the general entropy pair
///
/// ```text
/// E = (f(w) - int_0^h zeta'(w - nu) g(nu) / V'(nu) dnu) p^{-1}(w - h)
/// Q = V(h) E - int_0^h g(nu) dnu + b,        zeta = 1 / p^{-1}
/// ```
///
/// `g_breaks` lists points where `g` is not smooth.
#[derive(Clone)]
pub struct GeneralEntropySpec {
    pub f: ScalarFn,
    pub g: ScalarFn,
    pub b: f64,
    pub g_breaks: Vec<f64>,
}

impl fmt::Debug for GeneralEntropySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralEntropySpec")
            .field("b", &self.b)
            .field("g_breaks", &self.g_breaks)
            .finish_non_exhaustive()
    }
}

impl GeneralEntropySpec {
    pub fn new(f: ScalarFn, g: ScalarFn, b: f64) -> Self {
        Self { f, g, b, g_breaks: Vec::new() }
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.g_breaks = breaks;
        self
    }

    /// The data generating `(E_k, Q_k)`: `f = 0`, `g = V' 1_{nu > k}`, `b = 0`.
    pub fn family(laws: &ModelLaws, k: f64) -> Self {
        let laws = laws.clone();
        let g = move |nu: f64| if nu > k { laws.velocity().d1(nu) } else { 0.0 };
        Self::new(Arc::new(|_| 0.0), Arc::new(g), 0.0).with_breaks(vec![k])
    }
}

/// `zeta'(x)` for `zeta = 1 / p^{-1}`.
fn zeta_prime(laws: &ModelLaws, x: f64) -> f64 {
    let rho = laws.pressure().inverse(x);
    -1.0 / (laws.pressure().d1(rho) * rho * rho)
}

/// General pair at `W`, with `c = 1`.
pub fn pair_general_eval(laws: &ModelLaws, spec: &GeneralEntropySpec, state: InvariantState) -> Result<(f64, f64)> {
    let InvariantState { h, w } = InvariantState::checked(state.h, state.w)?;
    if h >= w {
        return Err(Error::Vacuum);
    }
    let v = laws.velocity();
    let weight = |nu: f64| zeta_prime(laws, w - nu) * (spec.g)(nu) / v.d1(nu);
    let i1 = quad::integrate(weight, 0.0, h, QUAD_TOL, &spec.g_breaks)?;
    let i2 = quad::integrate(|nu| (spec.g)(nu), 0.0, h, QUAD_TOL, &spec.g_breaks)?;
    let e = ((spec.f)(w) - i1) * laws.density(InvariantState { h, w });
    Ok((e, v.value(h) * e - i2 + spec.b))
}

/// `D_k = sigma (E_k(W+) - E_k(W-)) - c (Q_k(W+) - Q_k(W-))`.
pub fn dissipation(
    laws: &ModelLaws,
    k: f64,
    minus: InvariantState,
    plus: InvariantState,
    sigma: f64,
    c: f64,
) -> Result<f64> {
    if minus.w != plus.w {
        return Err(Error::Domain(format!(
            "dissipation needs equal markers, got w- = {} and w+ = {}",
            minus.w, plus.w
        )));
    }
    let (em, qm) = pair_k_eval(laws, k, minus);
    let (ep, qp) = pair_k_eval(laws, k, plus);
    Ok(sigma * (ep - em) - c * (qp - qm))
}

/// Uniform grid on `[0, w]` with `extra` points (clipped to `[0, w]`) merged in.
pub fn k_grid(w: f64, extra: &[f64]) -> Vec<f64> {
    let n = K_GRID_INTERVALS;
    let mut ks: Vec<f64> = (0..=n).map(|i| if i == n { w } else { w * i as f64 / n as f64 }).collect();
    ks.extend(extra.iter().map(|k| k.clamp(0.0, w)));
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    ks
}

/// Grid adapted to a jump: the jump endpoints and their midpoint are added.
pub fn jump_k_grid(minus: InvariantState, plus: InvariantState) -> Vec<f64> {
    k_grid(minus.w, &[minus.h, plus.h, 0.5 * (minus.h + plus.h)])
}

/// `(k, D_k)` over [`jump_k_grid`].
pub fn dissipation_table(
    laws: &ModelLaws,
    minus: InvariantState,
    plus: InvariantState,
    sigma: f64,
    c: f64,
) -> Result<Vec<(f64, f64)>> {
    jump_k_grid(minus, plus).into_iter().map(|k| Ok((k, dissipation(laws, k, minus, plus, sigma, c)?))).collect()
}

/// `Q_k - D E_k . F` in conserved coordinates, with `D E_k` from central
/// differences. Equals `V(k)` when `h > k` and `k < w`, and zero otherwise.
pub fn conent0_residual(laws: &ModelLaws, k: f64, state: InvariantState) -> Result<f64> {
    if state.is_vacuum() {
        return Err(Error::Vacuum);
    }
    let u = laws.to_conserved(state);
    if u.rho <= FD_STEP {
        return Err(Error::Domain(format!("density {} is below the difference step", u.rho)));
    }
    let p = laws.pressure();
    let e = |rho: f64, q: f64| {
        let w = q / rho;
        pair_k_eval(laws, k, InvariantState::new(w - p.value(rho), w)).0
    };
    let d = FD_STEP;
    let de_drho = (e(u.rho + d, u.q) - e(u.rho - d, u.q)) / (2.0 * d);
    let de_dq = (e(u.rho, u.q + d) - e(u.rho, u.q - d)) / (2.0 * d);
    let (f0, f1) = laws.flux_conserved(u);
    Ok(pair_k_eval(laws, k, state).1 - (de_drho * f0 + de_dq * f1))
}

fn reproduces_jump(fan: &WaveFan, sigma: f64) -> bool {
    fan.waves.iter().all(|wave| {
        let trivial = wave.left.distance(&wave.right) < JUMP_TOL;
        trivial || ((wave.speed_lo - sigma).abs() <= JUMP_TOL && (wave.speed_hi - sigma).abs() <= JUMP_TOL)
    })
}

/// Whether a single discontinuity from `minus` to `plus` located at `x` and
/// moving with speed `sigma` is admissible.
///
/// At a jump of `c` the stationary discontinuity must be reproduced by the
/// two-sided solver. Elsewhere, jumps touching the vacuum or changing the
/// marker must be reproduced by the constant-coefficient solver, and the
/// remaining 1-discontinuities must satisfy the jump relation and dissipate
/// every `E_k`.
pub fn admissible_discontinuity(
    laws: &ModelLaws,
    profile: &CoefficientProfile,
    minus: InvariantState,
    plus: InvariantState,
    x: f64,
    sigma: f64,
) -> bool {
    let (Ok(minus), Ok(plus)) = (InvariantState::checked(minus.h, minus.w), InvariantState::checked(plus.h, plus.w))
    else {
        return false;
    };
    if !sigma.is_finite() {
        return false;
    }
    if minus == plus {
        return true;
    }
    let (c_left, c_right) = (profile.at(x, Side::Left), profile.at(x, Side::Right));
    if c_left != c_right {
        return sigma.abs() <= JUMP_TOL
            && riemann::solve_two_sided(laws, c_left, c_right, minus, plus)
                .is_ok_and(|fan| reproduces_jump(&fan, 0.0));
    }
    let c = c_right;
    if minus.is_vacuum() || plus.is_vacuum() || minus.w != plus.w {
        return riemann::solve_single(laws, c, minus, plus).is_ok_and(|fan| reproduces_jump(&fan, sigma));
    }
    let Ok(s) = laws.shock_speed(minus, plus) else { return false };
    if (sigma - c * s).abs() > JUMP_TOL {
        return false;
    }
    jump_k_grid(minus, plus)
        .into_iter()
        .all(|k| dissipation(laws, k, minus, plus, sigma, c).is_ok_and(|d| d >= -DISSIPATION_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laws() -> ModelLaws {
        ModelLaws::quadratic()
    }

    fn st(h: f64, w: f64) -> InvariantState {
        InvariantState::new(h, w)
    }

    #[test]
    fn family_examples() {
        let l = laws();
        let (e, q) = pair_k_eval(&l, 0.0, st(0.84, 1.0));
        assert!((e - 0.6).abs() < 1e-15 && (q + 0.336).abs() < 1e-15);
        assert_eq!(pair_k_eval(&l, 1.0, st(0.84, 1.0)), (0.0, 0.0));
        assert_eq!(pair_k_eval(&l, 0.9, st(0.84, 1.0)), (0.0, 0.0));
        assert!(pair_k_eval(&l, 0.3, st(0.3 + 1e-9, 1.0)).0.abs() < 1e-6);
    }

    #[test]
    fn general_pair_examples() {
        let l = laws();
        let w = st(0.84, 1.0);
        let (e, q) = pair_general_eval(&l, &GeneralEntropySpec::family(&l, 0.0), w).unwrap();
        let (ek, qk) = pair_k_eval(&l, 0.0, w);
        assert!((e - ek).abs() < 1e-8 && (q - qk).abs() < 1e-8);

        let conserved = GeneralEntropySpec::new(Arc::new(|_| 1.0), Arc::new(|_| 0.0), 0.0);
        let (e, q) = pair_general_eval(&l, &conserved, w).unwrap();
        assert!((e - 0.4).abs() < 1e-15 && (q - 0.336).abs() < 1e-15);

        let shifted = GeneralEntropySpec::new(Arc::new(|_| 1.0), Arc::new(|_| 0.0), 1.0);
        let (e2, q2) = pair_general_eval(&l, &shifted, w).unwrap();
        assert_eq!(e2, e);
        assert!((q2 - q - 1.0).abs() < 1e-15);

        assert!(matches!(pair_general_eval(&l, &conserved, st(1.0, 1.0)), Err(Error::Vacuum)));
    }

    #[test]
    fn shock_dissipation_examples() {
        let l = laws();
        let (a, b) = (st(0.84, 1.0), st(2.0 / 3.0, 1.0));
        let s = l.shock_speed(a, b).unwrap();
        for (_, d) in dissipation_table(&l, a, b, s, 1.0).unwrap() {
            assert!(d >= -DISSIPATION_TOL);
        }
        let reversed = dissipation_table(&l, b, a, s, 1.0).unwrap();
        assert!(reversed.iter().any(|&(k, d)| k > 2.0 / 3.0 && k < 0.84 && d < 0.0));
        for k in [0.0, 1.0] {
            assert!(dissipation(&l, k, a, b, s, 1.0).unwrap().abs() < 1e-12);
            assert!(dissipation(&l, k, b, a, s, 1.0).unwrap().abs() < 1e-12);
        }
        assert!(dissipation(&l, 0.5, a, st(0.5, 1.2), s, 1.0).is_err());
    }

    #[test]
    fn conent0_residual_equals_velocity_at_k() {
        let l = laws();
        assert!(conent0_residual(&l, 0.0, st(0.84, 1.0)).unwrap().abs() < 1e-6);
        assert!((conent0_residual(&l, 0.3, st(0.84, 1.0)).unwrap() - 0.3).abs() < 1e-5);
        assert_eq!(conent0_residual(&l, 1.0, st(0.84, 1.0)).unwrap(), 0.0);
        assert!(conent0_residual(&l, 0.3, st(1.0, 1.0)).is_err());
    }

    #[test]
    fn k_grid_contents() {
        let g = jump_k_grid(st(0.84, 1.0), st(0.5, 1.0));
        assert_eq!(g.first(), Some(&0.0));
        assert_eq!(g.last(), Some(&1.0));
        for k in [0.84, 0.5, 0.67] {
            assert!(g.contains(&k));
        }
        assert!(g.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn admissibility_verdicts() {
        let l = laws();
        let jump = CoefficientProfile::piecewise_constant(vec![0.0], vec![1.0, 0.5]).unwrap();
        let fan = riemann::solve_two_sided(&l, 1.0, 0.5, st(0.84, 1.0), st(0.84, 1.0)).unwrap();
        let (m, p) = fan.traces_at_zero();
        assert!(admissible_discontinuity(&l, &jump, m, p, 0.0, 0.0));
        assert!(!admissible_discontinuity(&l, &jump, p, m, 0.0, 0.0));

        let flat = CoefficientProfile::constant(1.0).unwrap();
        let (a, b) = (st(0.84, 1.0), st(2.0 / 3.0, 1.0));
        let s = l.shock_speed(a, b).unwrap();
        assert!(admissible_discontinuity(&l, &flat, a, b, 0.3, s));
        assert!(!admissible_discontinuity(&l, &flat, b, a, 0.3, s));
        assert!(!admissible_discontinuity(&l, &flat, a, b, 0.3, s + 0.1));

        let vac = st(1.0, 1.0);
        assert!(admissible_discontinuity(&l, &flat, vac, a, 0.0, 0.84));
        assert!(!admissible_discontinuity(&l, &flat, a, vac, 0.0, 0.84));
        assert!(admissible_discontinuity(&l, &flat, st(0.5, 1.0), st(0.5, 1.5), 0.0, 0.5));
    }

    proptest! {
        #[test]
        fn general_pair_matches_family(w in 0.1..=1.5f64, a in 0.0..0.95f64, t in 0.0..=1.2f64) {
            let l = laws();
            let state = st(a * w, w);
            let k = t * w;
            let (e, q) = pair_general_eval(&l, &GeneralEntropySpec::family(&l, k), state).unwrap();
            let (ek, qk) = pair_k_eval(&l, k, state);
            prop_assert!((e - ek).abs() < 1e-8 && (q - qk).abs() < 1e-8);
        }

        #[test]
        fn dissipation_dichotomy(w in 0.05..=1.5f64, a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
            prop_assume!((a - b).abs() > 1e-3);
            let l = laws();
            let (minus, plus) = (st(a * w, w), st(b * w, w));
            let s = l.shock_speed(minus, plus).unwrap();
            let table = dissipation_table(&l, minus, plus, s, 1.0).unwrap();
            let nonneg = table.iter().all(|&(_, d)| d >= -DISSIPATION_TOL);
            prop_assert_eq!(nonneg, minus.h >= plus.h);
            for &(k, d) in &table {
                if k == 0.0 || k == w {
                    prop_assert!(d.abs() < 1e-12);
                }
            }
        }
    }
}
