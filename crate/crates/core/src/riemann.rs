//! Exact self-similar solutions of the Riemann problem.
//!
//! [`solve_single`] handles a constant coefficient; [`solve_two_sided`]
//! couples two constant-coefficient solvers across a jump of `c` at `x = 0`
//! through a stationary non-classical shock that caps the interface flux.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::model::ModelLaws;
use crate::roots;
use crate::state::InvariantState;

/// Speeds closer than this to zero are treated as stationary.
pub const SPEED_TIE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveKind {
    Shock1,
    Rarefaction1,
    Contact2,
    NonClassical,
}

impl WaveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WaveKind::Shock1 => "Shock1",
            WaveKind::Rarefaction1 => "Rarefaction1",
            WaveKind::Contact2 => "Contact2",
            WaveKind::NonClassical => "NonClassical",
        }
    }
}

impl fmt::Display for WaveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WaveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Shock1" => Ok(WaveKind::Shock1),
            "Rarefaction1" => Ok(WaveKind::Rarefaction1),
            "Contact2" => Ok(WaveKind::Contact2),
            "NonClassical" => Ok(WaveKind::NonClassical),
            other => Err(Error::Domain(format!("unknown wave kind {other:?}"))),
        }
    }
}

/// One elementary wave. Discontinuities have `speed_lo == speed_hi`; a
/// rarefaction spans `[speed_lo, speed_hi]` and is evaluated with its
/// coefficient `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub kind: WaveKind,
    pub left: InvariantState,
    pub right: InvariantState,
    pub speed_lo: f64,
    pub speed_hi: f64,
    pub c: f64,
}

impl Wave {
    fn jump(kind: WaveKind, left: InvariantState, right: InvariantState, speed: f64, c: f64) -> Self {
        Self { kind, left, right, speed_lo: speed, speed_hi: speed, c }
    }

    pub fn is_discontinuity(&self) -> bool {
        self.kind != WaveKind::Rarefaction1
    }
}

/// Ordered wave sequence of a Riemann problem, sampleable at any `nu = x / t`.
#[derive(Debug, Clone)]
pub struct WaveFan {
    laws: ModelLaws,
    pub left: InvariantState,
    pub right: InvariantState,
    pub waves: Vec<Wave>,
    pub c_minus: f64,
    pub c_plus: f64,
}

fn snap(speed: f64) -> f64 {
    if speed.abs() < SPEED_TIE {
        0.0
    } else {
        speed
    }
}

fn checked_state(state: InvariantState) -> Result<InvariantState> {
    InvariantState::checked(state.h, state.w)
}

fn checked_coefficient(c: f64) -> Result<f64> {
    if c.is_finite() && c > 0.0 {
        Ok(c)
    } else {
        Err(Error::Domain(format!("coefficient {c} must be positive")))
    }
}

impl WaveFan {
    pub fn laws(&self) -> &ModelLaws {
        &self.laws
    }

    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }

    pub fn kinds(&self) -> Vec<WaveKind> {
        self.waves.iter().map(|w| w.kind).collect()
    }

    /// State at `nu`, closed on the right at every wave speed.
    pub fn sample(&self, nu: f64) -> InvariantState {
        for wave in &self.waves {
            if nu < wave.speed_lo {
                return wave.left;
            }
            if wave.kind == WaveKind::Rarefaction1 && nu < wave.speed_hi {
                return self.rarefaction_state(wave, nu);
            }
        }
        self.right
    }

    fn rarefaction_state(&self, wave: &Wave, nu: f64) -> InvariantState {
        let w = wave.left.w;
        let lo = self.laws.lambda_w(wave.left.h, w);
        let hi = self.laws.lambda_w(wave.right.h, w);
        let x = (nu / wave.c).clamp(lo, hi);
        let h = self.laws.lambda_w_inverse(x, w).unwrap_or(wave.right.h);
        InvariantState::new(h.clamp(wave.left.h, wave.right.h), w)
    }

    /// One-sided limits `(W(0-), W(0+))`.
    pub fn traces_at_zero(&self) -> (InvariantState, InvariantState) {
        let mut minus = self.right;
        for wave in &self.waves {
            if wave.speed_hi < 0.0 {
                continue;
            }
            minus = if wave.speed_lo < 0.0 {
                if wave.speed_hi == 0.0 {
                    wave.right
                } else {
                    self.rarefaction_state(wave, 0.0)
                }
            } else {
                wave.left
            };
            break;
        }
        (minus, self.sample(0.0))
    }

    /// Checks ordering, chaining and the placement of the non-classical wave.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Domain(msg));
        let mut prev = self.left;
        let mut prev_speed = f64::NEG_INFINITY;
        let mut non_classical = 0;
        for (i, wave) in self.waves.iter().enumerate() {
            if wave.left != prev {
                return fail(format!("wave {i} does not start where wave {} ends", i as isize - 1));
            }
            if wave.speed_lo < prev_speed || wave.speed_hi < wave.speed_lo {
                return fail(format!("wave {i} breaks the speed ordering"));
            }
            match wave.kind {
                WaveKind::Shock1 | WaveKind::Rarefaction1 => {
                    if wave.left.w != wave.right.w {
                        return fail(format!("1-wave {i} changes w"));
                    }
                    let increasing = wave.left.h < wave.right.h;
                    if increasing != (wave.kind == WaveKind::Rarefaction1) {
                        return fail(format!("1-wave {i} has the wrong h monotonicity"));
                    }
                }
                WaveKind::Contact2 => {
                    if wave.left.h != wave.right.h && !wave.left.is_vacuum() {
                        return fail(format!("contact {i} changes h"));
                    }
                }
                WaveKind::NonClassical => {
                    non_classical += 1;
                    if wave.speed_lo != 0.0 || wave.speed_hi != 0.0 {
                        return fail(format!("non-classical wave {i} is not stationary"));
                    }
                    let mismatch =
                        self.c_minus * self.laws.flux_f(wave.left) - self.c_plus * self.laws.flux_f(wave.right);
                    if mismatch.abs() > 1e-10 {
                        return fail(format!("non-classical wave {i} violates flux matching by {mismatch}"));
                    }
                }
            }
            prev = wave.right;
            prev_speed = wave.speed_hi;
        }
        if prev != self.right {
            return fail("the last wave does not end at the far-right state".into());
        }
        if non_classical > 1 {
            return fail("more than one non-classical wave".into());
        }
        Ok(())
    }

    /// Plain-text wave list: `#` header lines carrying the coefficients and
    /// far-field states, a column header, then one wave per line.
    pub fn to_wave_list(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# c_minus={}\n", fmt_num(self.c_minus)));
        out.push_str(&format!("# c_plus={}\n", fmt_num(self.c_plus)));
        out.push_str(&format!("# far_left={} {}\n", fmt_num(self.left.h), fmt_num(self.left.w)));
        out.push_str(&format!("# far_right={} {}\n", fmt_num(self.right.h), fmt_num(self.right.w)));
        out.push_str(WAVE_LIST_HEADER);
        out.push('\n');
        for wave in &self.waves {
            let cols = [wave.left.h, wave.left.w, wave.right.h, wave.right.w, wave.speed_lo, wave.speed_hi, wave.c];
            out.push_str(wave.kind.as_str());
            for v in cols {
                out.push(',');
                out.push_str(&fmt_num(v));
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`WaveFan::to_wave_list`].
    pub fn parse_wave_list(laws: &ModelLaws, text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Domain(format!("wave list line {line}: {msg}"));
        let num = |line: usize, s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| bad(line, &format!("invalid number {s:?}")))
        };
        let pair = |line: usize, s: &str| -> Result<InvariantState> {
            let mut it = s.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(h), Some(w), None) => Ok(InvariantState::new(num(line, h)?, num(line, w)?)),
                _ => Err(bad(line, "expected two numbers")),
            }
        };
        let (mut c_minus, mut c_plus, mut left, mut right) = (None, None, None, None);
        let mut waves = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw == WAVE_LIST_HEADER {
                continue;
            }
            if let Some(rest) = raw.strip_prefix('#') {
                let Some((key, value)) = rest.split_once('=') else { continue };
                match key.trim() {
                    "c_minus" => c_minus = Some(num(line, value)?),
                    "c_plus" => c_plus = Some(num(line, value)?),
                    "far_left" => left = Some(pair(line, value)?),
                    "far_right" => right = Some(pair(line, value)?),
                    _ => {}
                }
                continue;
            }
            let cols: Vec<&str> = raw.split(',').collect();
            if cols.len() != 8 {
                return Err(bad(line, &format!("expected 8 columns, found {}", cols.len())));
            }
            let v = cols[1..].iter().map(|s| num(line, s)).collect::<Result<Vec<_>>>()?;
            waves.push(Wave {
                kind: cols[0].parse()?,
                left: InvariantState::new(v[0], v[1]),
                right: InvariantState::new(v[2], v[3]),
                speed_lo: v[4],
                speed_hi: v[5],
                c: v[6],
            });
        }
        let missing = |what: &str| Error::Domain(format!("wave list is missing the {what} header"));
        Ok(Self {
            laws: laws.clone(),
            left: left.ok_or_else(|| missing("far_left"))?,
            right: right.ok_or_else(|| missing("far_right"))?,
            waves,
            c_minus: c_minus.ok_or_else(|| missing("c_minus"))?,
            c_plus: c_plus.ok_or_else(|| missing("c_plus"))?,
        })
    }
}

pub const WAVE_LIST_HEADER: &str = "kind,h_left,w_left,h_right,w_right,speed_lo,speed_hi,c";

fn rarefaction(laws: &ModelLaws, c: f64, left: InvariantState, right: InvariantState) -> Wave {
    Wave {
        kind: WaveKind::Rarefaction1,
        left,
        right,
        speed_lo: snap(c * laws.lambda_w(left.h, left.w)),
        speed_hi: snap(c * laws.lambda_w(right.h, right.w)),
        c,
    }
}

fn shock(laws: &ModelLaws, c: f64, left: InvariantState, right: InvariantState) -> Result<Wave> {
    let s = snap(c * laws.shock_speed(left, right)?);
    Ok(Wave::jump(WaveKind::Shock1, left, right, s, c))
}

fn contact(laws: &ModelLaws, c: f64, left: InvariantState, right: InvariantState) -> Wave {
    let s = snap(c * laws.velocity().value(right.h));
    Wave::jump(WaveKind::Contact2, left, right, s, c)
}

/// Riemann solver for the constant coefficient `c`.
pub fn solve_single(laws: &ModelLaws, c: f64, left: InvariantState, right: InvariantState) -> Result<WaveFan> {
    let c = checked_coefficient(c)?;
    let (l, r) = (checked_state(left)?, checked_state(right)?);
    let mut waves = Vec::with_capacity(2);
    if l != r {
        if l.w == r.w {
            if l.h > r.h {
                waves.push(shock(laws, c, l, r)?);
            } else {
                waves.push(rarefaction(laws, c, l, r));
            }
        } else if l.h == r.h {
            waves.push(contact(laws, c, l, r));
        } else if l.h > r.h {
            let m = InvariantState::new(r.h, l.w);
            waves.push(shock(laws, c, l, m)?);
            waves.push(contact(laws, c, m, r));
        } else {
            let m = InvariantState::new(r.h.min(l.w), l.w);
            if m.h > l.h {
                waves.push(rarefaction(laws, c, l, m));
            }
            waves.push(contact(laws, c, m, r));
        }
    }
    Ok(WaveFan { laws: laws.clone(), left: l, right: r, waves, c_minus: c, c_plus: c })
}

/// `W_* = (min(w_L, h_R), w_L)`.
pub fn w_star(right: InvariantState, w_left: f64) -> InvariantState {
    InvariantState::new(right.h.min(w_left), w_left)
}

/// Largest flux the left state can send through the interface.
pub fn q_minus(laws: &ModelLaws, left: InvariantState) -> f64 {
    if left.h <= laws.flux_argmax(left.w) {
        laws.flux_max(left.w)
    } else {
        laws.flux_f(left)
    }
}

/// Largest flux the right state can absorb from marker `w_left`.
pub fn q_plus(laws: &ModelLaws, right: InvariantState, w_left: f64) -> f64 {
    let star = w_star(right, w_left);
    if star.h < laws.flux_argmax(w_left) {
        laws.flux_f(star)
    } else {
        laws.flux_max(w_left)
    }
}

/// Interface flux `min(c- Q-, c+ Q+)`.
pub fn q_cap(laws: &ModelLaws, c_minus: f64, c_plus: f64, left: InvariantState, right: InvariantState) -> f64 {
    (c_minus * q_minus(laws, left)).min(c_plus * q_plus(laws, right, left.w))
}

/// Root of `c f(h, w) = q` on one monotone branch of `f(., w)`.
///
/// The search runs in the density, where the flux has no square-root
/// behaviour at the vacuum end.
fn branch_root(laws: &ModelLaws, c: f64, w: f64, q: f64, congested: bool) -> Result<InvariantState> {
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::Domain(format!("interface flux {q} must be nonnegative")));
    }
    let h_bar = laws.flux_argmax(w);
    let cap = c * laws.flux_max(w);
    if q > cap * (1.0 + 1e-12) {
        return Err(Error::Infeasible { target: q, max: cap });
    }
    if q >= cap {
        return Ok(InvariantState::new(h_bar, w));
    }
    if q <= 0.0 {
        return Ok(InvariantState::new(if congested { 0.0 } else { w }, w));
    }
    let (p, v) = (laws.pressure(), laws.velocity());
    let rho_bar = p.inverse(w - h_bar);
    let (lo, hi) = if congested { (rho_bar, p.inverse(w)) } else { (0.0, rho_bar) };
    let g = |rho: f64| c * v.value((w - p.value(rho)).max(0.0)) * rho - q;
    let rho = roots::bisect(g, lo, hi, 0.0).unwrap_or(rho_bar);
    let h = w - p.value(rho);
    let h = if congested { h.clamp(0.0, h_bar) } else { h.clamp(h_bar, w) };
    Ok(InvariantState::new(h, w))
}

/// `W^ = (h^, w_L)`: root of `c- f(h, w_L) = q` with `h <= h(w_L)`.
pub fn hat_state(laws: &ModelLaws, c_minus: f64, w_left: f64, q: f64) -> Result<InvariantState> {
    branch_root(laws, c_minus, w_left, q, true)
}

/// `Wv = (hv, w_L)`: root of `c+ f(h, w_L) = q` with `h >= h(w_L)`.
pub fn check_state(laws: &ModelLaws, c_plus: f64, w_left: f64, q: f64) -> Result<InvariantState> {
    branch_root(laws, c_plus, w_left, q, false)
}

/// Interface quantities of the two-sided solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceData {
    pub w_star: InvariantState,
    pub q_minus: f64,
    pub q_plus: f64,
    pub q: f64,
    pub hat: InvariantState,
    pub check: InvariantState,
}

pub fn interface_data(
    laws: &ModelLaws,
    c_minus: f64,
    c_plus: f64,
    left: InvariantState,
    right: InvariantState,
) -> Result<InterfaceData> {
    let (c_minus, c_plus) = (checked_coefficient(c_minus)?, checked_coefficient(c_plus)?);
    let (l, r) = (checked_state(left)?, checked_state(right)?);
    let qm = q_minus(laws, l);
    let qp = q_plus(laws, r, l.w);
    let q = (c_minus * qm).min(c_plus * qp);
    Ok(InterfaceData {
        w_star: w_star(r, l.w),
        q_minus: qm,
        q_plus: qp,
        q,
        hat: hat_state(laws, c_minus, l.w, q)?,
        check: check_state(laws, c_plus, l.w, q)?,
    })
}

/// Riemann solver for `c = c-` on `x < 0` and `c = c+` on `x >= 0`.
///
/// Equal coefficients reduce to [`solve_single`].
pub fn solve_two_sided(
    laws: &ModelLaws,
    c_minus: f64,
    c_plus: f64,
    left: InvariantState,
    right: InvariantState,
) -> Result<WaveFan> {
    let (c_minus, c_plus) = (checked_coefficient(c_minus)?, checked_coefficient(c_plus)?);
    if c_minus == c_plus {
        return solve_single(laws, c_minus, left, right);
    }
    let (l, r) = (checked_state(left)?, checked_state(right)?);
    let data = interface_data(laws, c_minus, c_plus, l, r)?;
    let h_bar = laws.flux_argmax(l.w);
    let mut waves = Vec::with_capacity(4);

    let trace_minus = if (l.h > h_bar && data.q == c_minus * data.q_minus) || l == data.hat {
        l
    } else {
        let mut trace = data.hat;
        for mut wave in solve_single(laws, c_minus, l, data.hat)?.waves {
            if wave.speed_lo >= 0.0 {
                trace = wave.left;
                break;
            }
            wave.speed_hi = wave.speed_hi.min(0.0);
            waves.push(wave);
        }
        trace
    };

    let dropped = data.w_star.h < h_bar && data.q == c_plus * data.q_plus;
    let start = if dropped { data.w_star } else { data.check };
    let mut right_waves = solve_single(laws, c_plus, start, r)?.waves;
    let mut trace_plus = start;
    if let Some(first) = right_waves.first_mut() {
        match first.kind {
            WaveKind::Shock1 if first.speed_lo <= 0.0 => {
                trace_plus = first.right;
                right_waves.remove(0);
            }
            WaveKind::Rarefaction1 => first.speed_lo = first.speed_lo.max(0.0),
            _ => {}
        }
    }

    if trace_minus != trace_plus {
        waves.push(Wave::jump(WaveKind::NonClassical, trace_minus, trace_plus, 0.0, c_plus));
    }
    waves.extend(right_waves);
    Ok(WaveFan { laws: laws.clone(), left: l, right: r, waves, c_minus, c_plus })
}
