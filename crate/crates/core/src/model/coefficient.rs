use crate::error::{Error, Result};

/// `c(x) = intercept + slope * x` on one piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub intercept: f64,
    pub slope: f64,
}

impl Affine {
    pub fn constant(value: f64) -> Self {
        Self { intercept: value, slope: 0.0 }
    }

    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Constant,
    PiecewiseConstant,
    PiecewiseLinear,
    Periodic,
}

/// Which value to return at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    /// The pointwise value, equal to the right limit.
    Value,
}

/// A piecewise affine coefficient `c(x)` with finitely many jumps, possibly
/// repeated periodically.
///
/// Pieces are indexed so that `pieces[i]` holds on `[breakpoints[i-1],
/// breakpoints[i])`. For periodic profiles the pieces describe one period
/// `[0, period)` and the breakpoints lie strictly inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    kind: ProfileKind,
    breakpoints: Vec<f64>,
    pieces: Vec<Affine>,
    period: Option<f64>,
    c_min: f64,
}

impl CoefficientProfile {
    pub fn constant(value: f64) -> Result<Self> {
        Self::build(ProfileKind::Constant, vec![], vec![Affine::constant(value)], None)
    }

    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let pieces = values.into_iter().map(Affine::constant).collect();
        Self::build(ProfileKind::PiecewiseConstant, breakpoints, pieces, None)
    }

    pub fn piecewise_linear(breakpoints: Vec<f64>, pieces: Vec<Affine>) -> Result<Self> {
        Self::build(ProfileKind::PiecewiseLinear, breakpoints, pieces, None)
    }

    /// Periodic extension of the profile given on `[0, period)`.
    pub fn periodic(period: f64, breakpoints: Vec<f64>, pieces: Vec<Affine>) -> Result<Self> {
        Self::build(ProfileKind::Periodic, breakpoints, pieces, Some(period))
    }

    fn build(kind: ProfileKind, breakpoints: Vec<f64>, pieces: Vec<Affine>, period: Option<f64>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::Domain(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite())
            || pieces.iter().any(|p| !p.intercept.is_finite() || !p.slope.is_finite())
        {
            return Err(Error::Domain("coefficient data must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("breakpoints must be strictly increasing".into()));
        }
        let mut ends = Vec::with_capacity(2 * pieces.len());
        match period {
            Some(t) => {
                if !(t.is_finite() && t > 0.0) {
                    return Err(Error::Domain(format!("period {t} must be > 0")));
                }
                if breakpoints.iter().any(|&b| b <= 0.0 || b >= t) {
                    return Err(Error::Domain("periodic breakpoints must lie inside (0, period)".into()));
                }
                let mut knots = vec![0.0];
                knots.extend_from_slice(&breakpoints);
                knots.push(t);
                for (i, piece) in pieces.iter().enumerate() {
                    ends.push(piece.at(knots[i]));
                    ends.push(piece.at(knots[i + 1]));
                }
            }
            None => {
                let (first, last) = (pieces[0], pieces[pieces.len() - 1]);
                if first.slope != 0.0 || last.slope != 0.0 {
                    return Err(Error::Domain("the unbounded outer pieces must be constant".into()));
                }
                ends.push(first.intercept);
                ends.push(last.intercept);
                for (i, &b) in breakpoints.iter().enumerate() {
                    ends.push(pieces[i].at(b));
                    ends.push(pieces[i + 1].at(b));
                }
            }
        }
        let c_min = ends.iter().copied().fold(f64::INFINITY, f64::min);
        if c_min <= 0.0 {
            return Err(Error::Domain(format!("c must be >= c_min > 0 (found minimum {c_min})")));
        }
        Ok(Self { kind, breakpoints, pieces, period, c_min })
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    /// Infimum of `c`.
    pub fn c_min(&self) -> f64 {
        self.c_min
    }

    /// Constant values at `-inf` and `+inf` (non-periodic profiles only).
    pub fn far_field(&self) -> Option<(f64, f64)> {
        match self.period {
            Some(_) => None,
            None => Some((self.pieces[0].intercept, self.pieces[self.pieces.len() - 1].intercept)),
        }
    }

    /// Single jump location with constant sides, if the profile is a
    /// piecewise constant function with at most one breakpoint.
    pub fn single_jump(&self) -> Option<(Option<f64>, f64, f64)> {
        if self.period.is_some() || self.pieces.iter().any(|p| p.slope != 0.0) {
            return None;
        }
        match self.breakpoints.as_slice() {
            [] => Some((None, self.pieces[0].intercept, self.pieces[0].intercept)),
            [xi] => Some((Some(*xi), self.pieces[0].intercept, self.pieces[1].intercept)),
            _ => None,
        }
    }

    fn reduce(&self, x: f64) -> f64 {
        match self.period {
            Some(t) => {
                let y = x.rem_euclid(t);
                if y >= t {
                    0.0
                } else {
                    y
                }
            }
            None => x,
        }
    }

    pub fn at(&self, x: f64, side: Side) -> f64 {
        let y = self.reduce(x);
        match side {
            Side::Value | Side::Right => {
                let idx = self.breakpoints.partition_point(|&b| b <= y);
                self.pieces[idx].at(y)
            }
            Side::Left => {
                if let (Some(t), true) = (self.period, y == 0.0) {
                    return self.pieces[self.pieces.len() - 1].at(t);
                }
                let idx = self.breakpoints.partition_point(|&b| b < y);
                self.pieces[idx].at(y)
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.at(x, Side::Value)
    }

    /// Variation over `[y0, y1]` in unreduced coordinates, ignoring the
    /// periodic wrap.
    fn span_variation(&self, y0: f64, y1: f64) -> f64 {
        if y1 <= y0 {
            return 0.0;
        }
        let mut idx = self.breakpoints.partition_point(|&b| b <= y0);
        let mut cursor = y0;
        let mut total = 0.0;
        while idx < self.breakpoints.len() && self.breakpoints[idx] <= y1 {
            let xi = self.breakpoints[idx];
            let piece = self.pieces[idx];
            total += (piece.at(xi) - piece.at(cursor)).abs();
            total += (self.pieces[idx + 1].at(xi) - piece.at(xi)).abs();
            cursor = xi;
            idx += 1;
        }
        let piece = self.pieces[idx];
        total + (piece.at(y1) - piece.at(cursor)).abs()
    }

    /// Total variation of `c` restricted to `[a, b]`; bounds may be infinite.
    ///
    /// A jump at `b` is counted, one at `a` is not, so the variation is
    /// additive over adjacent intervals.
    pub fn total_variation(&self, a: f64, b: f64) -> f64 {
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            return 0.0;
        }
        match self.period {
            None => {
                if self.breakpoints.is_empty() {
                    return 0.0;
                }
                let first = self.breakpoints[0];
                let last = self.breakpoints[self.breakpoints.len() - 1];
                let a = a.max(first - 1.0);
                let b = b.min(last + 1.0);
                self.span_variation(a, b)
            }
            Some(t) => {
                let last = self.pieces[self.pieces.len() - 1];
                let wrap = (self.pieces[0].at(0.0) - last.at(t)).abs();
                let per_period = self.span_variation(0.0, t) + wrap;
                if a.is_infinite() || b.is_infinite() {
                    return if per_period > 0.0 { f64::INFINITY } else { 0.0 };
                }
                let ka = (a / t).floor();
                let kb = (b / t).floor();
                let ya = (a - ka * t).clamp(0.0, t);
                let yb = (b - kb * t).clamp(0.0, t);
                if ka == kb {
                    self.span_variation(ya, yb)
                } else {
                    self.span_variation(ya, t) + wrap + (kb - ka - 1.0) * per_period + self.span_variation(0.0, yb)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step() -> CoefficientProfile {
        CoefficientProfile::piecewise_constant(vec![0.0], vec![1.0, 0.5]).unwrap()
    }

    fn sawtooth() -> CoefficientProfile {
        CoefficientProfile::periodic(0.5, vec![], vec![Affine { intercept: 1.0, slope: -1.0 }]).unwrap()
    }

    fn ramp() -> CoefficientProfile {
        let eps = 0.1;
        CoefficientProfile::piecewise_linear(
            vec![-eps, 0.0],
            vec![Affine::constant(0.5), Affine { intercept: 1.5, slope: 1.0 / eps }, Affine::constant(1.0)],
        )
        .unwrap()
    }

    #[test]
    fn step_profile_values() {
        let c = step();
        assert_eq!(c.at(-0.1, Side::Value), 1.0);
        assert_eq!(c.at(0.0, Side::Value), 0.5);
        assert_eq!(c.at(0.0, Side::Left), 1.0);
        assert_eq!(c.at(0.0, Side::Right), 0.5);
        assert_eq!(c.c_min(), 0.5);
    }

    #[test]
    fn periodic_profile_values() {
        let c = sawtooth();
        assert!((c.value(0.75) - 0.75).abs() < 1e-15);
        assert!((c.value(-0.25) - 0.75).abs() < 1e-15);
        assert_eq!(c.at(0.5, Side::Value), 1.0);
        assert!((c.at(0.5, Side::Left) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ramp_profile_values() {
        let c = ramp();
        assert!((c.value(-0.05) - 1.0).abs() < 1e-15);
        assert_eq!(c.value(-0.2), 0.5);
        assert_eq!(c.value(0.0), 1.0);
        assert!((c.at(0.0, Side::Left) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn total_variation_examples() {
        assert!((step().total_variation(f64::NEG_INFINITY, f64::INFINITY) - 0.5).abs() < 1e-15);
        assert_eq!(CoefficientProfile::constant(2.0).unwrap().total_variation(-5.0, 5.0), 0.0);
        assert!((sawtooth().total_variation(0.0, 0.5) - 1.0).abs() < 1e-15);
        assert!((sawtooth().total_variation(-1.0, 1.0) - 4.0).abs() < 1e-12);
        assert!((ramp().total_variation(f64::NEG_INFINITY, f64::INFINITY) - 1.5).abs() < 1e-12);
        assert_eq!(sawtooth().total_variation(f64::NEG_INFINITY, 0.0), f64::INFINITY);
    }

    #[test]
    fn one_sided_limits_match_nearby_values() {
        for c in [step(), ramp(), sawtooth()] {
            let mut points = c.breakpoints().to_vec();
            if let Some(t) = c.period() {
                points.extend([0.0, t, 2.0 * t]);
            }
            for xi in points {
                assert_eq!(c.at(xi, Side::Value), c.at(xi, Side::Right));
                let near = c.value(xi - 1e-13);
                assert!((near - c.at(xi, Side::Left)).abs() < 1e-10, "xi={xi}");
            }
        }
    }

    #[test]
    fn rejects_invalid_profiles() {
        assert!(CoefficientProfile::piecewise_constant(vec![0.0], vec![1.0, 0.0]).is_err());
        assert!(CoefficientProfile::piecewise_constant(vec![0.0], vec![1.0]).is_err());
        assert!(CoefficientProfile::piecewise_constant(vec![1.0, 0.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(CoefficientProfile::piecewise_linear(
            vec![0.0],
            vec![Affine { intercept: 1.0, slope: 1.0 }, Affine::constant(1.0)]
        )
        .is_err());
        assert!(CoefficientProfile::periodic(0.5, vec![], vec![Affine { intercept: 1.0, slope: -3.0 }]).is_err());
        let err = CoefficientProfile::constant(0.0).unwrap_err();
        assert!(err.to_string().contains("c must be >= c_min > 0"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn variation_is_additive(a in -2.0f64..2.0, d1 in 0.0f64..1.5, d2 in 0.0f64..1.5) {
                for c in [step(), ramp(), sawtooth()] {
                    let (m, b) = (a + d1, a + d1 + d2);
                    let whole = c.total_variation(a, b);
                    let split = c.total_variation(a, m) + c.total_variation(m, b);
                    prop_assert!((whole - split).abs() < 1e-12, "{whole} vs {split}");
                }
            }

            #[test]
            fn additive_at_breakpoints(k in -3i32..3) {
                let c = sawtooth();
                let m = 0.5 * k as f64;
                let whole = c.total_variation(m - 0.3, m + 0.3);
                let split = c.total_variation(m - 0.3, m) + c.total_variation(m, m + 0.3);
                prop_assert!((whole - split).abs() < 1e-12);
            }
        }
    }
}
