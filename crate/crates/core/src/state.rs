//! Conserved and Riemann-invariant coordinates, eigenstructure and the flux
//! geometry along a level set of the marker `w`.
//!
//! With `rho = p^{-1}(w - h)` the flux reads `F = V(h) rho (1, w)`, so along
//! `w = const` everything reduces to the scalar flux `f(h, w) = V(h) rho`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelLaws;
use crate::roots;

/// Slack allowed when testing membership of the invariant domain.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Density and generalized momentum.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConservedState {
    pub rho: f64,
    pub q: f64,
}

impl ConservedState {
    pub const VACUUM: Self = Self { rho: 0.0, q: 0.0 };

    pub fn new(rho: f64, q: f64) -> Self {
        Self { rho, q }
    }

    pub fn is_vacuum(&self) -> bool {
        self.rho == 0.0 && self.q == 0.0
    }
}

/// Riemann invariants `(h, w)` with `0 <= h <= w`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InvariantState {
    pub h: f64,
    pub w: f64,
}

/// Position of an invariant state inside `0 <= h <= w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `h = w`: zero density.
    Vacuum,
    /// `h = 0 < w`: positive density, zero velocity.
    Edge,
    /// `w > h > 0`.
    Interior,
}

impl InvariantState {
    pub fn new(h: f64, w: f64) -> Self {
        Self { h, w }
    }

    /// Builds a state after checking `0 <= h <= w` up to [`MEMBERSHIP_TOL`],
    /// clamping round-off excursions back onto the boundary.
    pub fn checked(h: f64, w: f64) -> Result<Self> {
        if !(h.is_finite() && w.is_finite()) || h < -MEMBERSHIP_TOL || w - h < -MEMBERSHIP_TOL {
            return Err(Error::Domain(format!("(h, w) = ({h}, {w}) is outside 0 <= h <= w")));
        }
        let w = w.max(0.0);
        Ok(Self { h: h.clamp(0.0, w), w })
    }

    pub fn region(&self) -> Region {
        if self.h >= self.w {
            Region::Vacuum
        } else if self.h <= 0.0 {
            Region::Edge
        } else {
            Region::Interior
        }
    }

    pub fn is_vacuum(&self) -> bool {
        self.region() == Region::Vacuum
    }

    /// Largest coordinate difference.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.h - other.h).abs().max((self.w - other.w).abs())
    }
}

impl ModelLaws {
    /// `h = q / rho - p(rho)`, `w = q / rho`.
    pub fn to_invariants(&self, u: ConservedState) -> Result<InvariantState> {
        if !(u.rho.is_finite() && u.q.is_finite()) || u.rho < 0.0 {
            return Err(Error::Domain(format!("(rho, q) = ({}, {}) is not admissible", u.rho, u.q)));
        }
        if u.rho == 0.0 {
            return Err(Error::Vacuum);
        }
        let w = u.q / u.rho;
        let h = w - self.pressure().value(u.rho);
        if h < -MEMBERSHIP_TOL {
            return Err(Error::InvariantViolation { rho: u.rho, q: u.q });
        }
        Ok(InvariantState { h: h.max(0.0), w })
    }

    pub fn to_conserved(&self, state: InvariantState) -> ConservedState {
        let rho = self.density(state);
        ConservedState { rho, q: rho * state.w }
    }

    /// `rho = p^{-1}(w - h)`.
    pub fn density(&self, state: InvariantState) -> f64 {
        self.pressure().inverse((state.w - state.h).max(0.0))
    }

    /// `f(h, w) = V(h) p^{-1}(w - h)`; zero at the vacuum and at `h = 0`.
    pub fn flux_f(&self, state: InvariantState) -> f64 {
        self.velocity().value(state.h) * self.density(state)
    }

    /// `F(U(W)) = f (1, w)`.
    pub fn flux_vector(&self, state: InvariantState) -> (f64, f64) {
        let f = self.flux_f(state);
        (f, f * state.w)
    }

    /// `F(U) = V(h(U)) U` in conserved coordinates, extended by `F(0) = 0`.
    pub fn flux_conserved(&self, u: ConservedState) -> (f64, f64) {
        if u.rho <= 0.0 {
            return (0.0, 0.0);
        }
        let h = (u.q / u.rho - self.pressure().value(u.rho)).max(0.0);
        let v = self.velocity().value(h);
        (v * u.rho, v * u.q)
    }

    /// `(lambda_1, lambda_2) = c (V - rho p' V', V)`.
    pub fn eigenvalues(&self, state: InvariantState, c: f64) -> Result<(f64, f64)> {
        if state.is_vacuum() {
            return Err(Error::Vacuum);
        }
        let rho = self.density(state);
        let (p, v) = (self.pressure(), self.velocity());
        let vh = v.value(state.h);
        Ok((c * (vh - rho * p.d1(rho) * v.d1(state.h)), c * vh))
    }

    /// Right eigenvectors `r_1 = U`, `r_2 = (rho, q + rho^2 p'(rho))`.
    pub fn eigenvectors(&self, u: ConservedState) -> Result<([f64; 2], [f64; 2])> {
        if u.rho <= 0.0 {
            return Err(Error::Vacuum);
        }
        let r2 = [u.rho, u.q + u.rho * u.rho * self.pressure().d1(u.rho)];
        Ok(([u.rho, u.q], r2))
    }

    /// `D lambda_1 . r_1`, negative in the interior of the domain.
    pub fn nonlinearity_alpha(&self, state: InvariantState, c: f64) -> Result<f64> {
        if state.is_vacuum() {
            return Err(Error::Vacuum);
        }
        let rho = self.density(state);
        let (p, v) = (self.pressure(), self.velocity());
        let dp = p.d1(rho);
        Ok(c * rho * (rho * dp * dp * v.d2(state.h) - (2.0 * dp + rho * p.d2(rho)) * v.d1(state.h)))
    }

    /// First characteristic speed on the level set `w`, for `c = 1`.
    pub fn lambda_w(&self, h: f64, w: f64) -> f64 {
        if let Some((gamma, slope)) = self.closed_form() {
            return slope * ((1.0 + gamma) * h - gamma * w);
        }
        let rho = self.pressure().inverse((w - h).max(0.0));
        let v = self.velocity();
        v.value(h) - rho * self.pressure().d1(rho) * v.d1(h)
    }

    /// `[lambda_w(0), lambda_w(w)]`.
    pub fn lambda_w_range(&self, w: f64) -> (f64, f64) {
        (self.lambda_w(0.0, w), self.lambda_w(w, w))
    }

    /// Inverse of `h -> lambda_w(h)` on `[0, w]`.
    pub fn lambda_w_inverse(&self, nu: f64, w: f64) -> Result<f64> {
        let (lo, hi) = self.lambda_w_range(w);
        if !(nu >= lo && nu <= hi) {
            return Err(Error::Range { value: nu, lo, hi });
        }
        if let Some((gamma, slope)) = self.closed_form() {
            return Ok(((nu / slope + gamma * w) / (1.0 + gamma)).clamp(0.0, w));
        }
        Ok(roots::bisect(|h| self.lambda_w(h, w) - nu, 0.0, w, 0.0).unwrap_or(w))
    }

    /// Unique maximizer of `h -> f(h, w)`: the root of `lambda_w`.
    pub fn flux_argmax(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        if let Some((gamma, _)) = self.closed_form() {
            return gamma * w / (1.0 + gamma);
        }
        roots::bisect(|h| self.lambda_w(h, w), 0.0, w, 0.0).unwrap_or(0.0)
    }

    /// `max_{h in [0, w]} f(h, w)`.
    pub fn flux_max(&self, w: f64) -> f64 {
        self.flux_f(InvariantState { h: self.flux_argmax(w), w })
    }

    /// Rankine-Hugoniot speed `(f_R - f_L) / (rho_R - rho_L)` for `c = 1`.
    pub fn shock_speed(&self, left: InvariantState, right: InvariantState) -> Result<f64> {
        let (rl, rr) = (self.density(left), self.density(right));
        if rl == rr {
            return Err(Error::Degenerate(rl));
        }
        Ok((self.flux_f(right) - self.flux_f(left)) / (rr - rl))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laws() -> ModelLaws {
        ModelLaws::quadratic()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn invariant_coordinates_of_scenario_data() {
        let l = laws();
        let cases = [((0.4, 0.4), (0.84, 1.0)), ((0.97, 0.97), (0.0591, 1.0)), ((0.5, 0.75), (1.25, 1.5))];
        for ((rho, q), (h, w)) in cases {
            let s = l.to_invariants(ConservedState::new(rho, q)).unwrap();
            assert!(close(s.h, h, 1e-14) && close(s.w, w, 1e-14), "{s:?}");
        }
    }

    #[test]
    fn conserved_coordinates() {
        let l = laws();
        let u = l.to_conserved(InvariantState::new(0.84, 1.0));
        assert!(close(u.rho, 0.4, 1e-15) && close(u.q, 0.4, 1e-15));
        assert_eq!(l.to_conserved(InvariantState::new(1.0, 1.0)), ConservedState::VACUUM);
        let u = l.to_conserved(InvariantState::new(2.0 / 3.0, 1.0));
        let r = (1.0f64 / 3.0).sqrt();
        assert!(close(u.rho, r, 1e-15) && close(u.q, r, 1e-15));
    }

    #[test]
    fn conversion_errors() {
        let l = laws();
        assert_eq!(l.to_invariants(ConservedState::VACUUM), Err(Error::Vacuum));
        assert!(matches!(l.to_invariants(ConservedState::new(0.5, 0.1)), Err(Error::InvariantViolation { .. })));
        assert!(InvariantState::checked(1.2, 1.0).is_err());
        assert!(InvariantState::checked(-0.1, 1.0).is_err());
        let s = InvariantState::checked(1.0 + 1e-13, 1.0).unwrap();
        assert_eq!(s, InvariantState::new(1.0, 1.0));
    }

    #[test]
    fn regions() {
        assert_eq!(InvariantState::new(1.0, 1.0).region(), Region::Vacuum);
        assert_eq!(InvariantState::new(0.0, 1.0).region(), Region::Edge);
        assert_eq!(InvariantState::new(0.5, 1.0).region(), Region::Interior);
        assert_eq!(InvariantState::new(0.0, 0.0).region(), Region::Vacuum);
    }

    #[test]
    fn flux_examples() {
        let l = laws();
        assert!(close(l.flux_f(InvariantState::new(0.84, 1.0)), 0.336, 1e-15));
        assert_eq!(l.flux_f(InvariantState::new(0.0, 0.7)), 0.0);
        assert_eq!(l.flux_f(InvariantState::new(0.7, 0.7)), 0.0);
        let (a, b) = l.flux_vector(InvariantState::new(0.84, 1.0));
        assert!(close(a, 0.336, 1e-15) && close(b, 0.336, 1e-15));
        assert_eq!(l.flux_vector(InvariantState::new(1.0, 1.0)), (0.0, 0.0));
        let (a, b) = l.flux_vector(InvariantState::new(1.25, 1.5));
        assert!(close(a, 0.625, 1e-15) && close(b, 0.9375, 1e-15));
    }

    #[test]
    fn eigenvalue_examples() {
        let l = laws();
        let (l1, l2) = l.eigenvalues(InvariantState::new(0.84, 1.0), 1.0).unwrap();
        assert!(close(l1, 0.52, 1e-15) && close(l2, 0.84, 1e-15));
        let (l1, l2) = l.eigenvalues(InvariantState::new(2.0 / 3.0, 1.0), 0.5).unwrap();
        assert!(close(l1, 0.0, 1e-15) && close(l2, 1.0 / 3.0, 1e-15));
        let s = InvariantState::new(0.3, 1.2);
        let (a1, a2) = l.eigenvalues(s, 1.0).unwrap();
        let (b1, b2) = l.eigenvalues(s, 2.0).unwrap();
        assert!(close(b1, 2.0 * a1, 1e-15) && close(b2, 2.0 * a2, 1e-15));
        assert_eq!(l.eigenvalues(InvariantState::new(1.0, 1.0), 1.0), Err(Error::Vacuum));
    }

    #[test]
    fn alpha_example() {
        let l = laws();
        // rho = 0.4, p' = 0.8, p'' = 2: alpha = 0.4 (0 - (1.6 + 0.8)) = -0.96
        let a = l.nonlinearity_alpha(InvariantState::new(0.84, 1.0), 1.0).unwrap();
        assert!(close(a, -0.96, 1e-14));
        let a2 = l.nonlinearity_alpha(InvariantState::new(0.84, 1.0), 3.0).unwrap();
        assert!(close(a2, 3.0 * a, 1e-14));
        assert!(l.nonlinearity_alpha(InvariantState::new(0.5, 0.5), 1.0).is_err());
    }

    #[test]
    fn lambda_w_examples() {
        let l = laws();
        assert!(close(l.lambda_w(2.0 / 3.0, 1.0), 0.0, 1e-15));
        assert!(close(l.lambda_w_inverse(0.0, 1.0).unwrap(), 2.0 / 3.0, 1e-15));
        assert!(close(l.lambda_w_inverse(1.0, 1.0).unwrap(), 1.0, 1e-15));
        for w in [0.5, 1.0, 1.5] {
            // -p^{-1}(w) p'(p^{-1}(w)) V'(0) = -2w
            assert!(close(l.lambda_w(0.0, w), -2.0 * w, 1e-15));
        }
        assert!(matches!(l.lambda_w_inverse(1.5, 1.0), Err(Error::Range { .. })));
    }

    #[test]
    fn flux_maximum() {
        let l = laws();
        assert!(close(l.flux_argmax(1.0), 2.0 / 3.0, 1e-15));
        assert!(close(l.flux_max(1.0), 0.3849001794597505, 1e-15));
        for w in [0.3, 1.7] {
            assert!(close(l.flux_argmax(w), 2.0 * w / 3.0, 1e-15));
        }
        let top = l.flux_max(1.0);
        for dh in [-0.01, 0.01] {
            assert!(l.flux_f(InvariantState::new(2.0 / 3.0 + dh, 1.0)) < top);
        }
    }

    #[test]
    fn shock_speed_examples() {
        let l = laws();
        let a = InvariantState::new(0.84, 1.0);
        let b = InvariantState::new(2.0 / 3.0, 1.0);
        // golden values from an independent 40-digit evaluation
        assert!(close(l.shock_speed(a, b).unwrap(), 0.2757265589908164, 1e-13));
        assert!(close(l.shock_speed(b, a).unwrap(), l.shock_speed(a, b).unwrap(), 1e-15));
        let c = InvariantState::new(0.97, 1.0);
        assert!(close(l.shock_speed(c, a).unwrap(), 0.7407179676972449, 1e-13));
        assert!(matches!(l.shock_speed(a, a), Err(Error::Degenerate(_))));
    }

    /// Generic laws with the same content as `quadratic`, forcing the
    /// bisection paths.
    #[derive(Debug)]
    struct Sq;
    impl crate::model::PressureLaw for Sq {
        fn value(&self, r: f64) -> f64 {
            r * r
        }
        fn d1(&self, r: f64) -> f64 {
            2.0 * r
        }
        fn d2(&self, _r: f64) -> f64 {
            2.0
        }
    }
    #[derive(Debug)]
    struct Id;
    impl crate::model::VelocityLaw for Id {
        fn value(&self, h: f64) -> f64 {
            h
        }
        fn d1(&self, _h: f64) -> f64 {
            1.0
        }
        fn d2(&self, _h: f64) -> f64 {
            0.0
        }
    }

    #[test]
    fn bisection_paths_agree_with_closed_forms() {
        let generic = ModelLaws::new(std::sync::Arc::new(Sq), std::sync::Arc::new(Id));
        let closed = laws();
        for w in [0.5, 1.0, 1.5] {
            assert!(close(generic.flux_argmax(w), closed.flux_argmax(w), 1e-13));
            let (lo, hi) = generic.lambda_w_range(w);
            for i in 0..=1000 {
                let nu = (lo + (hi - lo) * i as f64 / 1000.0).min(hi);
                let h = generic.lambda_w_inverse(nu, w).unwrap();
                assert!((generic.lambda_w(h, w) - nu).abs() < 1e-12);
                assert!(close(h, closed.lambda_w_inverse(nu, w).unwrap(), 1e-12));
            }
        }
    }

    #[test]
    fn eigenvectors_annihilate_invariant_gradients() {
        let l = laws();
        let eps = 1e-6;
        for (h, w) in [(0.84, 1.0), (0.2, 0.9), (1.25, 1.5)] {
            let u = l.to_conserved(InvariantState::new(h, w));
            let (r1, r2) = l.eigenvectors(u).unwrap();
            let grad = |g: &dyn Fn(InvariantState) -> f64| {
                let at = |rho: f64, q: f64| g(l.to_invariants(ConservedState::new(rho, q)).unwrap());
                [
                    (at(u.rho + eps, u.q) - at(u.rho - eps, u.q)) / (2.0 * eps),
                    (at(u.rho, u.q + eps) - at(u.rho, u.q - eps)) / (2.0 * eps),
                ]
            };
            let dw = grad(&|s| s.w);
            let dh = grad(&|s| s.h);
            assert!((dw[0] * r1[0] + dw[1] * r1[1]).abs() < 1e-8);
            assert!((dh[0] * r2[0] + dh[1] * r2[1]).abs() < 1e-8);
        }
    }

    fn interior() -> impl Strategy<Value = InvariantState> {
        (0.01f64..2.0, 0.0f64..1.0).prop_map(|(w, t)| InvariantState::new(t * w * 0.999, w))
    }

    proptest! {
        #[test]
        fn roundtrip(s in interior()) {
            let l = laws();
            let back = l.to_invariants(l.to_conserved(s)).unwrap();
            prop_assert!(back.distance(&s) < 1e-12);
        }

        #[test]
        fn strictly_hyperbolic(s in interior(), c in 0.1f64..3.0) {
            prop_assume!(s.h > 0.0);
            let (l1, l2) = laws().eigenvalues(s, c).unwrap();
            prop_assert!(l1 < l2);
            prop_assert!(laws().nonlinearity_alpha(s, c).unwrap() < 0.0);
        }

        #[test]
        fn lambda_w_increasing(w in 0.01f64..2.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            prop_assume!(a < b);
            let l = laws();
            prop_assert!(l.lambda_w(a * w, w) < l.lambda_w(b * w, w));
        }

        #[test]
        fn temple_jump_relation(w in 0.05f64..2.0, a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.2f64..2.0) {
            let l = laws();
            let s1 = InvariantState::new(a * w, w);
            let s2 = InvariantState::new(b * w, w);
            let (u1, u2) = (l.to_conserved(s1), l.to_conserved(s2));
            prop_assume!((u1.rho - u2.rho).abs() > 1e-9);
            let s = l.shock_speed(s1, s2).unwrap();
            let (f1, f2) = (l.flux_vector(s1), l.flux_vector(s2));
            prop_assert!((c * (f2.0 - f1.0) - s * c * (u2.rho - u1.rho)).abs() < 1e-12);
            prop_assert!((c * (f2.1 - f1.1) - s * c * (u2.q - u1.q)).abs() < 1e-12);
        }
    }
}
