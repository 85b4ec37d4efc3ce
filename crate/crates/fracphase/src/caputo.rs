//! The discrete L2 Caputo operator applied to a stored solution history.
//!
//! Both the original three-coefficient form and the difference-quotient
//! reformulation are implemented as independent code paths; their numerical
//! agreement (to roundoff) is one of the certification targets.

use crate::coeff::{Alpha, CoeffTable};
use crate::error::{Error, Result};
use statrs::function::gamma::gamma;

/// Uniform time grid `t_k = k * dt`, `0 <= k <= n_steps`.
#[derive(Debug, Clone, Copy)]
pub struct TimeGrid {
    dt: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain(format!("time step must be positive, got {dt}")));
        }
        if n_steps == 0 {
            return Err(Error::domain("time grid needs at least one step"));
        }
        Ok(TimeGrid { dt, n_steps })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn t_final(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    pub fn t(&self, k: usize) -> f64 {
        self.dt * k as f64
    }
}

/// Append-only sequence of past states `u^0, u^1, ..., u^k`.
///
/// The nonlocal operator reads the whole history each step, so states are
/// kept in full; the resulting quadratic total cost is the method's cost.
#[derive(Debug, Clone)]
pub struct History<T> {
    entries: Vec<T>,
}

impl<T> History<T> {
    pub fn with_initial(u0: T, capacity: usize) -> Self {
        let mut entries = Vec::with_capacity(capacity);
        entries.push(u0);
        History { entries }
    }

    pub fn push(&mut self, state: T) {
        self.entries.push(state);
    }

    /// Number of stored states (`k+1` after step `k`).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, k: usize) -> &T {
        &self.entries[k]
    }

    pub fn last(&self) -> &T {
        self.entries.last().expect("history is never empty")
    }

    pub fn states(&self) -> &[T] {
        &self.entries
    }
}

/// Linear-space operations the operator needs from a state type.
pub trait LinearState: Clone {
    fn zeros_like(&self) -> Self;
    /// `self += coeff * other`
    fn axpy(&mut self, coeff: f64, other: &Self);
    fn scale(&mut self, factor: f64);
}

impl LinearState for f64 {
    fn zeros_like(&self) -> Self {
        0.0
    }

    fn axpy(&mut self, coeff: f64, other: &Self) {
        *self += coeff * other;
    }

    fn scale(&mut self, factor: f64) {
        *self *= factor;
    }
}

/// Collapsed history weights for the original L2 form.
///
/// Returns `w[0..=k]` such that
/// `L_k u = (w[0] u^0 + ... + w[k] u^k) / (Gamma(3-alpha) dt^alpha)`.
/// The first step (`k = 1`) folds its `1/Gamma(2-alpha)` branch into the
/// same scale via `Gamma(3-alpha) = (2-alpha) Gamma(2-alpha)`, so one scale
/// serves every step. The weights sum to zero: constants are annihilated.
pub fn l2_weights(table: &CoeffTable, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::domain("L2 operator index k must be >= 1"));
    }
    let al = table.alpha().value();
    if k == 1 {
        return Ok(vec![-(2.0 - al), 2.0 - al]);
    }
    if table.n_max() < k {
        return Err(Error::domain(format!(
            "coefficient table holds {} indices, need {}",
            table.n_max(),
            k
        )));
    }
    let mut w = vec![0.0; k + 1];
    for j in 1..k {
        w[k - j - 1] += table.a(j);
        w[k - j] += table.b(j);
        w[k - j + 1] += table.c(j);
    }
    w[k - 2] += 0.5 * al;
    w[k - 1] += -2.0;
    w[k] += 0.5 * (4.0 - al);
    Ok(w)
}

/// Common scale `1 / (Gamma(3-alpha) dt^alpha)` multiplying the weights.
pub fn l2_scale(alpha: Alpha, dt: f64) -> f64 {
    1.0 / (gamma(3.0 - alpha.value()) * dt.powf(alpha.value()))
}

fn check_apply_args<T>(history: &History<T>, grid: &TimeGrid, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::domain("L2 operator index k must be >= 1"));
    }
    if history.len() < k + 1 {
        return Err(Error::domain(format!(
            "history holds {} states, need u^0..u^{k}",
            history.len()
        )));
    }
    if k > grid.n_steps() {
        return Err(Error::domain(format!(
            "k = {k} beyond time grid with {} steps",
            grid.n_steps()
        )));
    }
    Ok(())
}

/// Apply the L2 operator in its original form.
pub fn l2_apply<T: LinearState>(
    history: &History<T>,
    table: &CoeffTable,
    grid: &TimeGrid,
    k: usize,
) -> Result<T> {
    check_apply_args(history, grid, k)?;
    let w = l2_weights(table, k)?;
    let mut acc = history.get(0).zeros_like();
    for (m, wm) in w.iter().enumerate() {
        acc.axpy(*wm, history.get(m));
    }
    acc.scale(l2_scale(table.alpha(), grid.dt()));
    Ok(acc)
}

/// Apply the L2 operator in the difference-quotient reformulation:
///
/// ```text
/// L_1 u = dt^{1-a}/Gamma(3-a) * (r_1 + d_1) D_1 u
/// L_k u = dt^{1-a}/Gamma(3-a) * [ (3a/2) D_k u - (a/2) D_{k-1} u
///         + sum_{j=1..k} d_j D_{k-j+1} u - c_k D_1 u ],  k >= 2
/// ```
///
/// with `D_j u = (u^j - u^{j-1}) / dt`. Algebraically identical to
/// [`l2_apply`]; kept as a separate route for cross-checking.
pub fn l2_apply_reformulated<T: LinearState>(
    history: &History<T>,
    table: &CoeffTable,
    grid: &TimeGrid,
    k: usize,
) -> Result<T> {
    check_apply_args(history, grid, k)?;
    let al = table.alpha().value();
    let dt = grid.dt();

    let quotient = |j: usize| -> T {
        let mut d = history.get(j).clone();
        d.axpy(-1.0, history.get(j - 1));
        d.scale(1.0 / dt);
        d
    };

    let mut acc = history.get(0).zeros_like();
    if k == 1 {
        acc.axpy(table.r1() + table.d(1), &quotient(1));
    } else {
        if table.n_max() < k {
            return Err(Error::domain(format!(
                "coefficient table holds {} indices, need {}",
                table.n_max(),
                k
            )));
        }
        acc.axpy(1.5 * al, &quotient(k));
        acc.axpy(-0.5 * al, &quotient(k - 1));
        for j in 1..=k {
            acc.axpy(table.d(j), &quotient(k - j + 1));
        }
        acc.axpy(-table.c(k), &quotient(1));
    }
    acc.scale(dt.powf(1.0 - al) / gamma(3.0 - al));
    Ok(acc)
}

/// Exact Caputo derivative of the monomial `t^p`:
/// `Gamma(p+1)/Gamma(p+1-alpha) * t^{p-alpha}` for integer `p >= 1`,
/// and zero for `p = 0` (constants).
pub fn caputo_reference(p: u32, alpha: Alpha, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain(format!("evaluation time must be positive, got {t}")));
    }
    if p == 0 {
        return Ok(0.0);
    }
    let al = alpha.value();
    let p = p as f64;
    Ok(gamma(p + 1.0) / gamma(p + 1.0 - al) * t.powf(p - al))
}
