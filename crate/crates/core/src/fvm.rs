//! Lax-Friedrichs finite-volume scheme with the coefficient sampled at cell
//! centres:
//!
//! ```text
//! U_j^{n+1} = (U_{j-1} + U_{j+1}) / 2 - dt / (2 dx) (c_{j+1} F(U_{j+1}) - c_{j-1} F(U_{j-1}))
//! ```

use std::io::Write;

use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::model::{CoefficientProfile, ModelLaws};
use crate::state::ConservedState;

/// Densities below this are projected onto the vacuum.
pub const VACUUM_FLOOR: f64 = 1e-10;
/// Bound on consecutive time-step halvings before giving up.
pub const MAX_HALVINGS: usize = 60;

pub const CSV_HEADER: &str = "t,x,rho,q,h,w,c";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) || n_cells == 0 {
            return Err(Error::Domain(format!("grid [{x_min}, {x_max}] with {n_cells} cells is empty")));
        }
        Ok(Self { x_min, x_max, n_cells })
    }

    /// Grid with spacing `dx`, which must divide the interval length.
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::Domain(format!("dx = {dx} must be positive")));
        }
        let cells = (x_max - x_min) / dx;
        let n = cells.round();
        if n < 1.0 || (cells - n).abs() > 1e-6 * n.max(1.0) {
            return Err(Error::Domain(format!("dx = {dx} does not divide [{x_min}, {x_max}] into whole cells")));
        }
        Self::new(x_min, x_max, n as usize)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    pub fn center(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|j| self.center(j)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Outflow,
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialDatum {
    Constant(ConservedState),
    /// `left` for `x < x0`, `right` for `x >= x0`.
    Riemann {
        x0: f64,
        left: ConservedState,
        right: ConservedState,
    },
    /// One value per cell.
    Table(Vec<ConservedState>),
}

impl InitialDatum {
    fn states(&self) -> Vec<ConservedState> {
        match self {
            InitialDatum::Constant(u) => vec![*u],
            InitialDatum::Riemann { left, right, .. } => vec![*left, *right],
            InitialDatum::Table(cells) => cells.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub laws: ModelLaws,
    pub profile: CoefficientProfile,
    pub datum: InitialDatum,
    pub grid: Grid,
    /// `dt / dx`.
    pub cfl: f64,
    pub t_final: f64,
    pub bc: BoundaryCondition,
    /// Snapshot every `stride` steps; 0 keeps only the initial and final fields.
    pub stride: usize,
}

/// Cell averages, cell-centre coefficients and the current time.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub u: Vec<ConservedState>,
    pub c: Vec<f64>,
    pub t: f64,
}

fn check_membership(laws: &ModelLaws, u: ConservedState) -> Result<()> {
    let ok = u.rho.is_finite()
        && u.q.is_finite()
        && u.rho >= 0.0
        && (u.rho == 0.0 && u.q == 0.0 || u.rho > 0.0 && u.q >= u.rho * laws.pressure().value(u.rho));
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("initial state (rho, q) = ({}, {}) violates rho >= 0, q >= rho p(rho)", u.rho, u.q)))
    }
}

pub fn init_field(scenario: &Scenario) -> Result<Field> {
    let grid = scenario.grid;
    for u in scenario.datum.states() {
        check_membership(&scenario.laws, u)?;
    }
    let centers = grid.centers();
    let u = match &scenario.datum {
        InitialDatum::Constant(u) => vec![*u; grid.n_cells],
        InitialDatum::Riemann { x0, left, right } => {
            centers.iter().map(|&x| if x < *x0 { *left } else { *right }).collect()
        }
        InitialDatum::Table(cells) => {
            if cells.len() != grid.n_cells {
                return Err(Error::Domain(format!("table has {} cells, grid has {}", cells.len(), grid.n_cells)));
            }
            cells.clone()
        }
    };
    let c = centers.iter().map(|&x| scenario.profile.value(x)).collect();
    Ok(Field { grid, u, c, t: 0.0 })
}

impl Field {
    /// `sum_j U_j dx` per component.
    pub fn totals(&self) -> (f64, f64) {
        let dx = self.grid.dx();
        self.u.iter().fold((0.0, 0.0), |(a, b), u| (a + u.rho * dx, b + u.q * dx))
    }

    /// `min_j (q_j - rho_j p(rho_j))`.
    pub fn min_membership(&self, laws: &ModelLaws) -> f64 {
        self.u.iter().map(|u| u.q - u.rho * laws.pressure().value(u.rho.max(0.0))).fold(f64::INFINITY, f64::min)
    }

    /// `max_j c_j max(|lambda_1|, |lambda_2|)`; vacuum cells do not count.
    pub fn max_speed(&self, laws: &ModelLaws) -> f64 {
        let (p, v) = (laws.pressure(), laws.velocity());
        self.u
            .iter()
            .zip(&self.c)
            .filter(|(u, _)| u.rho > 0.0)
            .map(|(u, &c)| {
                let h = (u.q / u.rho - p.value(u.rho)).max(0.0);
                let vh = v.value(h);
                let l1 = vh - u.rho * p.d1(u.rho) * v.d1(h);
                c * l1.abs().max(vh.abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn courant(&self, laws: &ModelLaws, dt: f64) -> f64 {
        dt / self.grid.dx() * self.max_speed(laws)
    }

    /// Writes one CSV row per cell; `h` and `w` are `nan` in vacuum cells.
    pub fn write_csv_rows<W: Write>(&self, laws: &ModelLaws, out: &mut W) -> std::io::Result<()> {
        for (j, (u, c)) in self.u.iter().zip(&self.c).enumerate() {
            let (h, w) = if u.rho > 0.0 {
                let w = u.q / u.rho;
                (w - laws.pressure().value(u.rho), w)
            } else {
                (f64::NAN, f64::NAN)
            };
            let row = [self.t, self.grid.center(j), u.rho, u.q, h, w, *c];
            let line: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// One Lax-Friedrichs step of length `dt`.
pub fn lf_step(laws: &ModelLaws, field: &Field, dt: f64, bc: BoundaryCondition) -> Result<Field> {
    let courant = field.courant(laws, dt);
    if courant > 1.0 {
        return Err(Error::Cfl { courant });
    }
    let n = field.u.len();
    let flux: Vec<(f64, f64)> = field
        .u
        .iter()
        .zip(&field.c)
        .map(|(&u, &c)| {
            let (f0, f1) = laws.flux_conserved(u);
            (c * f0, c * f1)
        })
        .collect();
    let neighbour = |j: usize, left: bool| -> usize {
        match (left, bc) {
            (true, _) if j > 0 => j - 1,
            (false, _) if j + 1 < n => j + 1,
            (true, BoundaryCondition::Periodic) => n - 1,
            (false, BoundaryCondition::Periodic) => 0,
            (_, BoundaryCondition::Outflow) => j,
        }
    };
    let ratio = dt / (2.0 * field.grid.dx());
    let mut u = Vec::with_capacity(n);
    for j in 0..n {
        let (l, r) = (neighbour(j, true), neighbour(j, false));
        let (ul, ur) = (field.u[l], field.u[r]);
        let rho = 0.5 * (ul.rho + ur.rho) - ratio * (flux[r].0 - flux[l].0);
        let q = 0.5 * (ul.q + ur.q) - ratio * (flux[r].1 - flux[l].1);
        if !(rho.is_finite() && q.is_finite()) {
            return Err(Error::NonFinite { cell: j });
        }
        u.push(if rho < VACUUM_FLOOR { ConservedState::VACUUM } else { ConservedState { rho, q } });
    }
    Ok(Field { grid: field.grid, u, c: field.c.clone(), t: field.t + dt })
}

/// Statistics of a completed run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunStats {
    pub steps: usize,
    pub halvings: usize,
    pub max_courant: f64,
}

/// Advances the scenario to `t_final`, handing every snapshot to `emit`.
///
/// The nominal step is `cfl * dx`; it is halved for a single step whenever
/// the Courant number would exceed one, and the last step is shortened to
/// land on `t_final`.
pub fn run_with<E>(scenario: &Scenario, mut emit: E) -> Result<(Field, RunStats)>
where
    E: FnMut(&Field, usize) -> Result<()>,
{
    if !(scenario.t_final.is_finite() && scenario.t_final >= 0.0) {
        return Err(Error::Domain(format!("final time {} must be >= 0", scenario.t_final)));
    }
    if !(scenario.cfl.is_finite() && scenario.cfl > 0.0) {
        return Err(Error::Domain(format!("cfl ratio {} must be positive", scenario.cfl)));
    }
    let laws = &scenario.laws;
    let dt0 = scenario.cfl * scenario.grid.dx();
    let mut field = init_field(scenario)?;
    let mut stats = RunStats::default();
    emit(&field, 0)?;
    while field.t < scenario.t_final {
        let remaining = scenario.t_final - field.t;
        let mut dt = if remaining <= dt0 * (1.0 + 1e-9) { remaining } else { dt0 };
        let mut courant = field.courant(laws, dt);
        let mut halvings = 0;
        while courant > 1.0 {
            if halvings == MAX_HALVINGS {
                return Err(Error::Cfl { courant });
            }
            dt *= 0.5;
            halvings += 1;
            courant = field.courant(laws, dt);
        }
        let last = dt == remaining;
        field = lf_step(laws, &field, dt, scenario.bc)?;
        if last {
            field.t = scenario.t_final;
        }
        stats.steps += 1;
        stats.halvings += halvings;
        stats.max_courant = stats.max_courant.max(courant);
        if scenario.stride > 0 && stats.steps % scenario.stride == 0 || field.t >= scenario.t_final {
            emit(&field, stats.steps)?;
        }
    }
    Ok((field, stats))
}

/// All snapshots of a run, initial and final included.
pub fn run(scenario: &Scenario) -> Result<(Vec<Field>, RunStats)> {
    let mut snapshots = Vec::new();
    let (_, stats) = run_with(scenario, |f, _| {
        snapshots.push(f.clone());
        Ok(())
    })?;
    Ok((snapshots, stats))
}

/// `sum_j |U_j - U_ref(x_j)| dx` per component.
pub fn l1_error<R>(field: &Field, reference: R) -> (f64, f64)
where
    R: Fn(f64) -> ConservedState,
{
    let dx = field.grid.dx();
    field.u.iter().enumerate().fold((0.0, 0.0), |(a, b), (j, u)| {
        let r = reference(field.grid.center(j));
        (a + (u.rho - r.rho).abs() * dx, b + (u.q - r.q).abs() * dx)
    })
}
