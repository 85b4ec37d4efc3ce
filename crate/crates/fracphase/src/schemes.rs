//! Time steppers: the second-order scalar-auxiliary-variable scheme and the
//! `3-alpha` order implicit–explicit multistep scheme.
//!
//! Both treat the nonlocal operator implicitly in its newest level and solve
//! one constant-coefficient problem `(c0 I - G L) u = rhs` per step in
//! Fourier space. The SAV stepper additionally carries the auxiliary scalar
//! `r ~ sqrt(E1(u) + shift)` and closes a linear scalar equation for it each
//! step, which keeps the modified energy bounded by its initial value. The
//! implicit–explicit stepper extrapolates the double-well force over three
//! history levels and satisfies the discrete fractional energy law under
//! the time-step restriction of [`crate::energy::dt_restriction`].

use std::time::Instant;

use statrs::function::gamma::gamma;

use crate::caputo::{l2_scale, l2_weights, History, LinearState, TimeGrid};
use crate::coeff::CoeffTable;
use crate::energy::{classical_energy, double_well, double_well_force, modified_energy};
use crate::error::{Error, Result};
use crate::spectral::{Field2D, Grid2D, Model, ModelSpec, SpectralField2D, SpectralOps};

/// Scheme selector, also used by run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Sav,
    Imex,
}

/// Per-step diagnostics emitted by both steppers.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub step: usize,
    pub time: f64,
    pub energy: f64,
    pub modified_energy: Option<f64>,
    pub max_norm: f64,
    pub mean: f64,
    pub wall_seconds: f64,
}

/// Source term attached to a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    None,
    /// The manufactured forcing whose exact solution is
    /// `0.2 t^5 sin(x) cos(y)` (Allen–Cahn on the centered box).
    Manufactured,
}

/// Per-step options shared by both steppers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOptions {
    pub source: Source,
    /// Apply the 2/3-rule cutoff to the transformed nonlinear terms.
    /// The reference setup runs plain collocation, so this defaults off.
    pub dealias: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions {
            source: Source::None,
            dealias: false,
        }
    }
}

impl StepOptions {
    pub fn with_source(source: Source) -> Self {
        StepOptions {
            source,
            ..Default::default()
        }
    }
}

/// Exact solution of the manufactured problem.
pub fn manufactured_solution(grid: Grid2D, t: f64) -> Field2D {
    Field2D::from_fn(grid, |x, y| 0.2 * t.powi(5) * x.sin() * y.cos())
}

fn require_centered_pi(grid: &Grid2D) -> Result<()> {
    let pi = std::f64::consts::PI;
    let ok = (grid.lx() - 2.0 * pi).abs() < 1e-12
        && (grid.ly() - 2.0 * pi).abs() < 1e-12
        && (grid.x(0) + pi).abs() < 1e-12
        && (grid.y(0) + pi).abs() < 1e-12;
    if ok {
        Ok(())
    } else {
        Err(Error::domain(
            "manufactured problem is posed on the centered [-pi,pi]^2 box",
        ))
    }
}

/// Source term of the manufactured problem at time `t`:
/// `s = Caputo(u) - eps^2 Lap(u) - u + u^3` for `u = 0.2 t^5 sin(x) cos(y)`,
/// evaluated analytically (the Caputo factor is
/// `Gamma(6)/Gamma(6-alpha) t^{5-alpha}` and `Lap(u) = -2u`).
pub fn manufacture_source(
    table: &CoeffTable,
    model: &ModelSpec,
    grid: Grid2D,
    t: f64,
) -> Result<Field2D> {
    if model.model != Model::AllenCahn {
        return Err(Error::domain(
            "the manufactured source is defined for the Allen-Cahn model",
        ));
    }
    require_centered_pi(&grid)?;
    let al = table.alpha().value();
    let caputo_factor = if t > 0.0 {
        0.2 * gamma(6.0) / gamma(6.0 - al) * t.powf(5.0 - al)
    } else {
        0.0
    };
    let amp = 0.2 * t.powi(5);
    let e2 = model.epsilon * model.epsilon;
    Ok(Field2D::from_fn(grid, |x, y| {
        let sc = x.sin() * y.cos();
        let u = amp * sc;
        caputo_factor * sc + 2.0 * e2 * u - u + u * u * u
    }))
}

/// Scale factor and per-level weights of the newest L2 application:
/// `L_n u = c0 u^n + sum_{m<n} w_m u^m / (Gamma(3-a) dt^a)`, with `c0` the
/// full coefficient of the unknown level (the `c_1` contribution included).
struct L2Split {
    c0: f64,
    known: SpectralField2D,
}

fn l2_split(
    table: &CoeffTable,
    tgrid: &TimeGrid,
    hist: &History<SpectralField2D>,
    n: usize,
) -> Result<L2Split> {
    let w = l2_weights(table, n)?;
    let scale = l2_scale(table.alpha(), tgrid.dt());
    let mut known = hist.get(0).zeros_like();
    for m in 0..n {
        known.axpy(w[m] * scale, hist.get(m));
    }
    Ok(L2Split {
        c0: w[n] * scale,
        known,
    })
}

/// Evolving state of the SAV stepper.
pub struct SavState {
    hist: History<SpectralField2D>,
    u_prev: Field2D,
    u_prev2: Field2D,
    r: Vec<f64>,
    c0_shift: f64,
}

impl SavState {
    /// Initialize from `u^0`. The auxiliary scalar starts at
    /// `r^0 = sqrt(E1(u^0) + shift)`; the ghost levels for the first step
    /// are `u^{-1} = u^0`, `r^{-1} = r^0`.
    pub fn new(
        u0: Field2D,
        c0_shift: f64,
        tgrid: &TimeGrid,
        ops: &SpectralOps,
    ) -> Result<Self> {
        if !(c0_shift >= 0.0) {
            return Err(Error::domain("c0_shift must be nonnegative"));
        }
        let e1 = u0.integrate(double_well) + c0_shift;
        if !(e1 > 0.0) {
            return Err(Error::State(format!(
                "E1(u0) + shift = {e1} is not positive; the square root is undefined"
            )));
        }
        let spec0 = ops.forward(&u0)?;
        Ok(SavState {
            hist: History::with_initial(spec0, tgrid.n_steps() + 1),
            u_prev: u0.clone(),
            u_prev2: u0,
            r: vec![e1.sqrt()],
            c0_shift,
        })
    }

    pub fn r_history(&self) -> &[f64] {
        &self.r
    }

    pub fn steps_taken(&self) -> usize {
        self.hist.len() - 1
    }
}

/// One SAV step `n >= 2`.
///
/// Solution algebra: with `L_n u = c0 u^n + known` and
/// `b = f(ubar)/sqrt(E1(ubar) + shift)`, the field splits as
/// `u^n = u_1 + r^n u_2`, where `(c0 I - G L) u_1 = -known + s(t_n)` and
/// `(c0 I - G L) u_2 = G b`. Substituting into the scalar relation
/// `3 r^n - 4 r^{n-1} + r^{n-2} = <b, 3u^n - 4u^{n-1} + u^{n-2}>/2`
/// leaves a linear equation for `r^n` whose pivot `3 - (3/2) <b, u_2>` is
/// at least 3 (`<b, u_2> <= 0` since `G` is nonpositive).
pub fn sav_step(
    state: &mut SavState,
    table: &CoeffTable,
    tgrid: &TimeGrid,
    model: &ModelSpec,
    ops: &SpectralOps,
    opts: StepOptions,
    n: usize,
) -> Result<(Field2D, f64)> {
    if n < 2 {
        return Err(Error::domain("sav_step handles n >= 2; use sav_first_step"));
    }
    sav_advance(state, table, tgrid, model, ops, opts, n)
}

/// The first SAV step, using the ghost convention `u^{-1} = u^0`,
/// `r^{-1} = r^0` and the first-order branch of the L2 operator.
pub fn sav_first_step(
    state: &mut SavState,
    table: &CoeffTable,
    tgrid: &TimeGrid,
    model: &ModelSpec,
    ops: &SpectralOps,
    opts: StepOptions,
) -> Result<(Field2D, f64)> {
    sav_advance(state, table, tgrid, model, ops, opts, 1)
}

fn sav_advance(
    state: &mut SavState,
    table: &CoeffTable,
    tgrid: &TimeGrid,
    model: &ModelSpec,
    ops: &SpectralOps,
    opts: StepOptions,
    n: usize,
) -> Result<(Field2D, f64)> {
    if state.hist.len() != n {
        return Err(Error::domain(format!(
            "history holds u^0..u^{}, cannot take step n={n}",
            state.hist.len() - 1
        )));
    }
    let split = l2_split(table, tgrid, &state.hist, n)?;

    // ubar = 2u^{n-1} - u^{n-2}; at n = 1 the ghost makes this u^0
    let ubar = state.u_prev.add_scaled(1.0, &state.u_prev)
        .add_scaled(-1.0, &state.u_prev2);
    let e1 = ubar.integrate(double_well) + state.c0_shift;
    if !(e1 > 0.0) {
        return Err(Error::State(format!(
            "E1(ubar) + shift = {e1} is not positive at step n={n}"
        )));
    }
    let inv_sqrt = 1.0 / e1.sqrt();
    let b = ubar.map(|v| double_well_force(v) * inv_sqrt);
    let mut b_hat = ops.forward(&b)?;
    if opts.dealias {
        ops.dealias_two_thirds(&mut b_hat);
    }

    let mut rhs1 = split.known.clone();
    rhs1.scale(-1.0);
    if opts.source == Source::Manufactured {
        let s = manufacture_source(table, model, *ops.grid(), tgrid.t(n))?;
        rhs1.axpy(1.0, &ops.forward(&s)?);
    }
    let u1 = ops.inverse(&ops.solve_helmholtz(&rhs1, split.c0, model)?)?;
    let gb = ops.apply_g(&b_hat, model)?;
    let u2 = ops.inverse(&ops.solve_helmholtz(&gb, split.c0, model)?)?;

    let pivot = 3.0 - 1.5 * b.inner(&u2);
    if pivot.abs() < 1e-12 {
        return Err(Error::SingularStep {
            n,
            alpha: table.alpha().value(),
            pivot,
        });
    }
    let r_prev = state.r[n - 1];
    let r_prev2 = if n >= 2 { state.r[n - 2] } else { state.r[0] };
    let field_part = u1
        .add_scaled(-4.0 / 3.0, &state.u_prev)
        .add_scaled(1.0 / 3.0, &state.u_prev2);
    let r_new = (4.0 * r_prev - r_prev2 + 1.5 * b.inner(&field_part)) / pivot;
    let u_new = u1.add_scaled(r_new, &u2);

    state.hist.push(ops.forward(&u_new)?);
    state.u_prev2 = std::mem::replace(&mut state.u_prev, u_new.clone());
    state.r.push(r_new);
    Ok((u_new, r_new))
}

/// Evolving state of the implicit–explicit stepper (Allen–Cahn only).
pub struct ImexState {
    hist: History<SpectralField2D>,
    recent: [Field2D; 3],
    max_norm_observed: f64,
}

impl ImexState {
    pub fn new(u0: Field2D, tgrid: &TimeGrid, ops: &SpectralOps) -> Result<Self> {
        let spec0 = ops.forward(&u0)?;
        let max_norm_observed = u0.max_norm();
        Ok(ImexState {
            hist: History::with_initial(spec0, tgrid.n_steps() + 1),
            recent: [u0.clone(), u0.clone(), u0],
            max_norm_observed,
        })
    }

    /// Install the ghost levels `u^{-1} = u^{-2} = u^0`, collapsing the
    /// extrapolated force at the first step to `-f(u^0)`. Idempotent; the
    /// constructor already sets the ghosts.
    pub fn startup(&mut self) {
        let u0 = self.recent[0].clone();
        self.recent = [u0.clone(), u0.clone(), u0];
    }

    /// Running maximum of `|u|_inf` over the trajectory, the observed
    /// stand-in for the theorem's a-priori bound.
    pub fn max_norm_observed(&self) -> f64 {
        self.max_norm_observed
    }

    pub fn steps_taken(&self) -> usize {
        self.hist.len() - 1
    }

    /// Replace the stored history with the given levels `u^0..u^k` (at
    /// least three), e.g. to restart or to seed a truncation-error probe
    /// with exact-solution samples.
    pub fn seed_history(&mut self, levels: &[Field2D], ops: &SpectralOps) -> Result<()> {
        if levels.len() < 3 {
            return Err(Error::domain(
                "seeding needs at least u^0, u^1, u^2 for the force extrapolation",
            ));
        }
        let mut hist = History::with_initial(ops.forward(&levels[0])?, levels.len());
        for u in &levels[1..] {
            hist.push(ops.forward(u)?);
        }
        self.hist = hist;
        let k = levels.len() - 1;
        self.recent = [
            levels[k].clone(),
            levels[k - 1].clone(),
            levels[k - 2].clone(),
        ];
        self.max_norm_observed = levels
            .iter()
            .map(Field2D::max_norm)
            .fold(0.0f64, f64::max);
        Ok(())
    }
}

/// One implicit–explicit step: solve
/// `(c0 I - eps^2 Lap) u^n = -known - 3 f(u^{n-1}) + 3 f(u^{n-2}) - f(u^{n-3}) + s(t_n)`
/// with the cubic force evaluated on the collocation grid.
pub fn imex_step(
    state: &mut ImexState,
    table: &CoeffTable,
    tgrid: &TimeGrid,
    model: &ModelSpec,
    ops: &SpectralOps,
    opts: StepOptions,
    n: usize,
) -> Result<Field2D> {
    if model.model != Model::AllenCahn {
        return Err(Error::domain(
            "the implicit-explicit stepper is defined for the Allen-Cahn model",
        ));
    }
    if state.hist.len() != n {
        return Err(Error::domain(format!(
            "history holds u^0..u^{}, cannot take step n={n}",
            state.hist.len() - 1
        )));
    }
    let split = l2_split(table, tgrid, &state.hist, n)?;

    let mut force = Field2D::zeros(*ops.grid());
    force
        .values_mut()
        .zip_mut_with(state.recent[0].values(), |acc, &u| {
            *acc -= 3.0 * double_well_force(u)
        });
    force
        .values_mut()
        .zip_mut_with(state.recent[1].values(), |acc, &u| {
            *acc += 3.0 * double_well_force(u)
        });
    force
        .values_mut()
        .zip_mut_with(state.recent[2].values(), |acc, &u| {
            *acc -= double_well_force(u)
        });

    let mut rhs = split.known.clone();
    rhs.scale(-1.0);
    let mut force_hat = ops.forward(&force)?;
    if opts.dealias {
        ops.dealias_two_thirds(&mut force_hat);
    }
    rhs.axpy(1.0, &force_hat);
    if opts.source == Source::Manufactured {
        let s = manufacture_source(table, model, *ops.grid(), tgrid.t(n))?;
        rhs.axpy(1.0, &ops.forward(&s)?);
    }
    let u_new = ops.inverse(&ops.solve_helmholtz(&rhs, split.c0, model)?)?;

    state.hist.push(ops.forward(&u_new)?);
    state.max_norm_observed = state.max_norm_observed.max(u_new.max_norm());
    state.recent = [
        u_new.clone(),
        state.recent[0].clone(),
        state.recent[1].clone(),
    ];
    Ok(u_new)
}

/// Full time integration of either scheme with per-step diagnostics.
pub struct RunOutput {
    pub reports: Vec<StepReport>,
    pub energies: Vec<f64>,
    pub modified_energies: Option<Vec<f64>>,
    pub means: Vec<f64>,
    pub final_field: Field2D,
}

/// Integrate from `u0` to `t_final = dt * n_steps`, collecting energies and
/// diagnostics each step. Deterministic for a fixed configuration.
#[allow(clippy::too_many_arguments)]
pub fn integrate(
    scheme: SchemeKind,
    u0: Field2D,
    table: &CoeffTable,
    tgrid: &TimeGrid,
    model: &ModelSpec,
    ops: &SpectralOps,
    opts: StepOptions,
    c0_shift: f64,
    mut on_step: impl FnMut(usize, &Field2D),
) -> Result<RunOutput> {
    let e0 = classical_energy(&u0, model, ops)?;
    let mut energies = vec![e0];
    let mut means = vec![u0.mean()];
    let mut reports = Vec::with_capacity(tgrid.n_steps());
    let mut final_field = u0.clone();

    match scheme {
        SchemeKind::Sav => {
            let mut state = SavState::new(u0.clone(), c0_shift, tgrid, ops)?;
            let mut modified = vec![modified_energy(
                &u0,
                &u0,
                state.r[0],
                state.r[0],
                model,
                ops,
            )?];
            let mut prev_field = u0;
            for n in 1..=tgrid.n_steps() {
                let t0 = Instant::now();
                let (u, r) = if n == 1 {
                    sav_first_step(&mut state, table, tgrid, model, ops, opts)?
                } else {
                    sav_step(&mut state, table, tgrid, model, ops, opts, n)?
                };
                let energy = classical_energy(&u, model, ops)?;
                let emod = modified_energy(&u, &prev_field, r, state.r[n - 1], model, ops)?;
                energies.push(energy);
                modified.push(emod);
                means.push(u.mean());
                reports.push(StepReport {
                    step: n,
                    time: tgrid.t(n),
                    energy,
                    modified_energy: Some(emod),
                    max_norm: u.max_norm(),
                    mean: u.mean(),
                    wall_seconds: t0.elapsed().as_secs_f64(),
                });
                on_step(n, &u);
                prev_field = u.clone();
                final_field = u;
            }
            Ok(RunOutput {
                reports,
                energies,
                modified_energies: Some(modified),
                means,
                final_field,
            })
        }
        SchemeKind::Imex => {
            let mut state = ImexState::new(u0, tgrid, ops)?;
            state.startup();
            for n in 1..=tgrid.n_steps() {
                let t0 = Instant::now();
                let u = imex_step(&mut state, table, tgrid, model, ops, opts, n)?;
                let energy = classical_energy(&u, model, ops)?;
                energies.push(energy);
                means.push(u.mean());
                reports.push(StepReport {
                    step: n,
                    time: tgrid.t(n),
                    energy,
                    modified_energy: None,
                    max_norm: u.max_norm(),
                    mean: u.mean(),
                    wall_seconds: t0.elapsed().as_secs_f64(),
                });
                on_step(n, &u);
                final_field = u;
            }
            Ok(RunOutput {
                reports,
                energies,
                modified_energies: None,
                means,
                final_field,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Alpha;
    use approx::assert_relative_eq;

    fn setup(
        alpha: f64,
        n_steps: usize,
        dt: f64,
        nx: usize,
        model: Model,
        eps: f64,
    ) -> (CoeffTable, TimeGrid, ModelSpec, SpectralOps) {
        let table = CoeffTable::build(Alpha::new(alpha).unwrap(), n_steps + 2).unwrap();
        let tgrid = TimeGrid::new(dt, n_steps).unwrap();
        let model = ModelSpec::new(model, eps).unwrap();
        let grid = if model.model == Model::AllenCahn {
            Grid2D::square_centered_pi(nx).unwrap()
        } else {
            Grid2D::square_two_pi(nx).unwrap()
        };
        let ops = SpectralOps::new(grid);
        (table, tgrid, model, ops)
    }

    #[test]
    fn sav_zero_field_is_stationary() {
        let (table, tgrid, model, ops) = setup(0.5, 6, 0.05, 16, Model::AllenCahn, 1.0);
        let u0 = Field2D::zeros(*ops.grid());
        let mut state = SavState::new(u0, 1.0, &tgrid, &ops).unwrap();
        let r0 = state.r[0];
        for n in 1..=6 {
            let (u, r) = if n == 1 {
                sav_first_step(&mut state, &table, &tgrid, &model, &ops, StepOptions::default()).unwrap()
            } else {
                sav_step(&mut state, &table, &tgrid, &model, &ops, StepOptions::default(), n).unwrap()
            };
            assert!(u.max_norm() < 1e-13, "step {n}: |u| = {}", u.max_norm());
            assert_relative_eq!(r, r0, max_relative = 1e-12);
        }
    }

    #[test]
    fn sav_first_step_radicand_positive_for_random_data() {
        let (table, tgrid, model, ops) = setup(0.3, 2, 0.01, 16, Model::AllenCahn, 0.5);
        let u0 = crate::problems::init_uniform_random(*ops.grid(), -0.5, 0.5, 7).unwrap();
        let mut state = SavState::new(u0, 1.0, &tgrid, &ops).unwrap();
        let (_, r1) = sav_first_step(&mut state, &table, &tgrid, &model, &ops, StepOptions::default()).unwrap();
        assert!(r1.is_finite());
    }

    #[test]
    fn sav_step_order_guard() {
        let (table, tgrid, model, ops) = setup(0.5, 4, 0.05, 16, Model::AllenCahn, 1.0);
        let u0 = Field2D::zeros(*ops.grid());
        let mut state = SavState::new(u0, 1.0, &tgrid, &ops).unwrap();
        assert!(sav_step(&mut state, &table, &tgrid, &model, &ops, StepOptions::default(), 1).is_err());
        assert!(sav_step(&mut state, &table, &tgrid, &model, &ops, StepOptions::default(), 2).is_err());
    }

    #[test]
    fn imex_well_minima_are_fixed_points() {
        for sign in [1.0, -1.0] {
            let (table, tgrid, model, ops) = setup(0.7, 8, 0.02, 16, Model::AllenCahn, 0.3);
            let u0 = Field2D::constant(*ops.grid(), sign);
            let mut state = ImexState::new(u0, &tgrid, &ops).unwrap();
            state.startup();
            for n in 1..=8 {
                let u = imex_step(&mut state, &table, &tgrid, &model, &ops, StepOptions::default(), n)
                    .unwrap();
                let dev = u.map(|v| v - sign).max_norm();
                assert!(dev < 1e-12, "step {n}: deviation {dev}");
            }
        }
    }

    #[test]
    fn imex_rejects_cahn_hilliard() {
        let (table, tgrid, _, _) = setup(0.5, 2, 0.05, 16, Model::AllenCahn, 1.0);
        let model = ModelSpec::new(Model::CahnHilliard, 1.0).unwrap();
        let ops = SpectralOps::new(Grid2D::square_two_pi(16).unwrap());
        let u0 = Field2D::zeros(*ops.grid());
        let mut state = ImexState::new(u0, &tgrid, &ops).unwrap();
        assert!(imex_step(&mut state, &table, &tgrid, &model, &ops, StepOptions::default(), 1).is_err());
    }

    #[test]
    fn imex_startup_force_collapses() {
        // with ghosts u^{-1} = u^{-2} = u^0 the extrapolation at n=1 is -f(u^0)
        let grid = Grid2D::square_centered_pi(8).unwrap();
        let u0 = Field2D::from_fn(grid, |x, y| 0.3 * x.sin() + 0.1 * y.cos());
        let combo = u0.map(|v| {
            -3.0 * double_well_force(v) + 3.0 * double_well_force(v) - double_well_force(v)
        });
        let direct = u0.map(|v| -double_well_force(v));
        let diff = combo.add_scaled(-1.0, &direct).max_norm();
        assert!(diff < 1e-15);
    }

    #[test]
    fn manufactured_source_values() {
        let table = CoeffTable::build(Alpha::new(0.5).unwrap(), 4).unwrap();
        let grid = Grid2D::square_centered_pi(32).unwrap();
        let model = ModelSpec::new(Model::AllenCahn, 1.0).unwrap();

        let s0 = manufacture_source(&table, &model, grid, 0.0).unwrap();
        assert!(s0.max_norm() < 1e-15);

        // at t=1 and the grid point (pi/2, 0): sin = cos = 1
        let s1 = manufacture_source(&table, &model, grid, 1.0).unwrap();
        let i = (3 * grid.nx()) / 4; // x = -pi + (3/4) 2pi = pi/2
        let j = grid.ny() / 2; // y = 0
        assert_relative_eq!(grid.x(i), std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert!(grid.y(j).abs() < 1e-12);
        let expect = 0.2 * gamma(6.0) / gamma(5.5) + 2.0 * 0.2 - 0.2 + 0.008;
        assert_relative_eq!(s1.values()[[i, j]], expect, max_relative = 1e-12);

        let ch = ModelSpec::new(Model::CahnHilliard, 1.0).unwrap();
        assert!(manufacture_source(&table, &ch, grid, 1.0).is_err());
        let wrong_box = Grid2D::square_two_pi(32).unwrap();
        assert!(manufacture_source(&table, &model, wrong_box, 1.0).is_err());
    }

    #[test]
    fn integrate_reports_every_step() {
        let (table, tgrid, model, ops) = setup(0.5, 5, 0.02, 16, Model::AllenCahn, 0.5);
        let u0 = Field2D::from_fn(*ops.grid(), |x, y| 0.1 * x.sin() * y.cos());
        let out = integrate(
            SchemeKind::Imex,
            u0,
            &table,
            &tgrid,
            &model,
            &ops,
            StepOptions::default(),
            1.0,
            |_, _| {},
        )
        .unwrap();
        assert_eq!(out.reports.len(), 5);
        assert_eq!(out.energies.len(), 6);
        assert!(out.modified_energies.is_none());
        assert!(out.reports.iter().all(|r| r.energy.is_finite()));
    }
}
