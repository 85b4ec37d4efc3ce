//! Periodic 2D pseudo-spectral workspace.
//!
//! Real fields live on an `nx x ny` collocation grid; spectral fields use a
//! real-transform layout (`nx x (ny/2+1)` complex coefficients, conjugate
//! symmetry implied). Rows are transformed real-to-complex, columns by a
//! complex FFT. All operators act mode-wise with real symbols, so the layout
//! stays consistent with a real inverse transform throughout.

use std::io::{Read, Write};
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use crate::caputo::LinearState;
use crate::error::{Error, Result};

/// Periodic rectangular grid. Mode counts are restricted to powers of two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    x0: f64,
    y0: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, x0: f64, y0: f64) -> Result<Self> {
        if nx < 2 || ny < 2 || !nx.is_power_of_two() || !ny.is_power_of_two() {
            return Err(Error::domain(format!(
                "grid sizes must be powers of two >= 2, got {nx} x {ny}"
            )));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::domain("domain lengths must be positive"));
        }
        Ok(Grid2D { nx, ny, lx, ly, x0, y0 })
    }

    /// The `[0, 2pi]^2` box used by the coarsening examples.
    pub fn square_two_pi(n: usize) -> Result<Self> {
        let l = 2.0 * std::f64::consts::PI;
        Grid2D::new(n, n, l, l, 0.0, 0.0)
    }

    /// The `[-pi, pi]^2` box used by the manufactured-solution example.
    pub fn square_centered_pi(n: usize) -> Result<Self> {
        let l = 2.0 * std::f64::consts::PI;
        Grid2D::new(n, n, l, l, -std::f64::consts::PI, -std::f64::consts::PI)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.lx * i as f64 / self.nx as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + self.ly * j as f64 / self.ny as f64
    }

    /// Quadrature weight of one grid cell.
    pub fn cell_area(&self) -> f64 {
        self.lx * self.ly / (self.nx * self.ny) as f64
    }

    pub fn n_points(&self) -> usize {
        self.nx * self.ny
    }
}

/// Real field sampled at the collocation points, row-major `[i, j] = (x_i, y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    grid: Grid2D,
    values: Array2<f64>,
}

impl Field2D {
    pub fn zeros(grid: Grid2D) -> Self {
        Field2D {
            grid,
            values: Array2::zeros((grid.nx, grid.ny)),
        }
    }

    pub fn constant(grid: Grid2D, value: f64) -> Self {
        Field2D {
            grid,
            values: Array2::from_elem((grid.nx, grid.ny), value),
        }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn((grid.nx, grid.ny), |(i, j)| f(grid.x(i), grid.y(j)));
        Field2D { grid, values }
    }

    pub fn from_values(grid: Grid2D, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (grid.nx, grid.ny) {
            return Err(Error::domain(format!(
                "field shape {:?} does not match grid {} x {}",
                values.dim(),
                grid.nx,
                grid.ny
            )));
        }
        Ok(Field2D { grid, values })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    /// Grid average.
    pub fn mean(&self) -> f64 {
        self.values.sum() / self.grid.n_points() as f64
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Pointwise map into a new field.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field2D {
        Field2D {
            grid: self.grid,
            values: self.values.mapv(&f),
        }
    }

    /// `self + c * other`
    pub fn add_scaled(&self, c: f64, other: &Field2D) -> Field2D {
        let mut out = self.clone();
        out.values.zip_mut_with(&other.values, |a, &b| *a += c * b);
        out
    }

    /// Grid-quadrature inner product `<f, g> = cell_area * sum f g`.
    pub fn inner(&self, other: &Field2D) -> f64 {
        let mut acc = 0.0;
        ndarray::Zip::from(&self.values)
            .and(&other.values)
            .for_each(|a, b| acc += a * b);
        acc * self.grid.cell_area()
    }

    /// Grid-quadrature integral of a pointwise function of the field.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.values.iter().map(|&v| f(v)).sum::<f64>() * self.grid.cell_area()
    }
}

/// Fourier coefficients in the real-transform layout: `nx x (ny/2 + 1)`.
#[derive(Debug, Clone)]
pub struct SpectralField2D {
    grid: Grid2D,
    coeffs: Array2<Complex64>,
}

impl SpectralField2D {
    pub fn zeros(grid: Grid2D) -> Self {
        SpectralField2D {
            grid,
            coeffs: Array2::zeros((grid.nx, grid.ny / 2 + 1)),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coeffs
    }

    /// Coefficient of the constant mode divided by the point count; equals
    /// the grid mean of the underlying real field.
    pub fn mean(&self) -> f64 {
        self.coeffs[[0, 0]].re / self.grid.n_points() as f64
    }
}

impl LinearState for SpectralField2D {
    fn zeros_like(&self) -> Self {
        SpectralField2D::zeros(self.grid)
    }

    fn axpy(&mut self, coeff: f64, other: &Self) {
        self.coeffs
            .zip_mut_with(&other.coeffs, |a, &b| *a += coeff * b);
    }

    fn scale(&mut self, factor: f64) {
        self.coeffs.mapv_inplace(|c| c * factor);
    }
}

/// Phase-field model selector: `G = -1` (Allen–Cahn) or `G = Laplacian`
/// (Cahn–Hilliard), both with `L = -eps^2 Laplacian`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    AllenCahn,
    CahnHilliard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub model: Model,
    pub epsilon: f64,
}

impl ModelSpec {
    pub fn new(model: Model, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::domain(format!(
                "interface width epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(ModelSpec { model, epsilon })
    }
}

/// Transform plans and wavenumber tables for one grid.
pub struct SpectralOps {
    grid: Grid2D,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    kx: Vec<f64>,
    ky: Vec<f64>,
}

impl SpectralOps {
    pub fn new(grid: Grid2D) -> Self {
        let mut rp = RealFftPlanner::<f64>::new();
        let mut cp = FftPlanner::<f64>::new();
        let two_pi = 2.0 * std::f64::consts::PI;
        let kx = (0..grid.nx)
            .map(|i| {
                let f = if i <= grid.nx / 2 {
                    i as f64
                } else {
                    i as f64 - grid.nx as f64
                };
                f * two_pi / grid.lx
            })
            .collect();
        let ky = (0..=grid.ny / 2)
            .map(|j| j as f64 * two_pi / grid.ly)
            .collect();
        SpectralOps {
            grid,
            r2c: rp.plan_fft_forward(grid.ny),
            c2r: rp.plan_fft_inverse(grid.ny),
            col_fwd: cp.plan_fft_forward(grid.nx),
            col_inv: cp.plan_fft_inverse(grid.nx),
            kx,
            ky,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn check_grid(&self, other: &Grid2D) -> Result<()> {
        if *other != self.grid {
            return Err(Error::domain("field grid does not match workspace grid"));
        }
        Ok(())
    }

    /// Forward transform (unnormalized DFT).
    pub fn forward(&self, field: &Field2D) -> Result<SpectralField2D> {
        self.check_grid(field.grid())?;
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut out = SpectralField2D::zeros(self.grid);
        let mut row_in = vec![0.0f64; ny];
        let mut row_out = vec![Complex64::default(); ny / 2 + 1];
        for i in 0..nx {
            for j in 0..ny {
                row_in[j] = field.values[[i, j]];
            }
            self.r2c
                .process(&mut row_in, &mut row_out)
                .expect("real FFT length mismatch");
            for j in 0..=ny / 2 {
                out.coeffs[[i, j]] = row_out[j];
            }
        }
        let mut col = vec![Complex64::default(); nx];
        for j in 0..=ny / 2 {
            for i in 0..nx {
                col[i] = out.coeffs[[i, j]];
            }
            self.col_fwd.process(&mut col);
            for i in 0..nx {
                out.coeffs[[i, j]] = col[i];
            }
        }
        Ok(out)
    }

    /// Inverse transform, normalized so that `inverse(forward(f)) = f`.
    pub fn inverse(&self, spec: &SpectralField2D) -> Result<Field2D> {
        self.check_grid(spec.grid())?;
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut work = spec.coeffs.clone();
        let mut col = vec![Complex64::default(); nx];
        for j in 0..=ny / 2 {
            for i in 0..nx {
                col[i] = work[[i, j]];
            }
            self.col_inv.process(&mut col);
            for i in 0..nx {
                work[[i, j]] = col[i];
            }
        }
        let mut out = Field2D::zeros(self.grid);
        let norm = 1.0 / (nx * ny) as f64;
        let mut row_in = vec![Complex64::default(); ny / 2 + 1];
        let mut row_out = vec![0.0f64; ny];
        for i in 0..nx {
            for j in 0..=ny / 2 {
                row_in[j] = work[[i, j]];
            }
            // roundoff can leave stray imaginary parts where the layout
            // requires real entries
            row_in[0].im = 0.0;
            row_in[ny / 2].im = 0.0;
            self.c2r
                .process(&mut row_in, &mut row_out)
                .expect("real inverse FFT length mismatch");
            for j in 0..ny {
                out.values[[i, j]] = row_out[j] * norm;
            }
        }
        Ok(out)
    }

    /// Multiplicity of a spectral column under the half-spectrum layout.
    fn mode_weight(&self, j: usize) -> f64 {
        if j == 0 || j == self.grid.ny / 2 {
            1.0
        } else {
            2.0
        }
    }

    /// Apply the Laplacian symbol `-(kx^2 + ky^2)` mode-wise.
    pub fn apply_laplacian(&self, spec: &SpectralField2D) -> Result<SpectralField2D> {
        self.check_grid(spec.grid())?;
        let mut out = spec.clone();
        for ((i, j), c) in out.coeffs.indexed_iter_mut() {
            *c *= -(self.kx[i] * self.kx[i] + self.ky[j] * self.ky[j]);
        }
        Ok(out)
    }

    /// Symbol of `-G L` for the given model: `eps^2 |k|^2` for Allen–Cahn,
    /// `eps^2 |k|^4` for Cahn–Hilliard.
    pub fn minus_gl_symbol(&self, model: &ModelSpec, i: usize, j: usize) -> f64 {
        let k2 = self.kx[i] * self.kx[i] + self.ky[j] * self.ky[j];
        let e2 = model.epsilon * model.epsilon;
        match model.model {
            Model::AllenCahn => e2 * k2,
            Model::CahnHilliard => e2 * k2 * k2,
        }
    }

    /// Solve `(c0 I - G L) u = rhs` mode-wise. Well-posed for `c0 > 0` in
    /// both models, including the Cahn–Hilliard zero mode.
    pub fn solve_helmholtz(
        &self,
        rhs: &SpectralField2D,
        c0: f64,
        model: &ModelSpec,
    ) -> Result<SpectralField2D> {
        self.check_grid(rhs.grid())?;
        if !(c0 > 0.0) {
            return Err(Error::domain(format!("helmholtz shift must be positive, got {c0}")));
        }
        let mut out = rhs.clone();
        for ((i, j), c) in out.coeffs.indexed_iter_mut() {
            *c /= c0 + self.minus_gl_symbol(model, i, j);
        }
        Ok(out)
    }

    /// Apply the model operator `G` (`-I` or `Laplacian`) mode-wise.
    pub fn apply_g(&self, spec: &SpectralField2D, model: &ModelSpec) -> Result<SpectralField2D> {
        self.check_grid(spec.grid())?;
        let mut out = spec.clone();
        match model.model {
            Model::AllenCahn => out.scale(-1.0),
            Model::CahnHilliard => {
                for ((i, j), c) in out.coeffs.indexed_iter_mut() {
                    *c *= -(self.kx[i] * self.kx[i] + self.ky[j] * self.ky[j]);
                }
            }
        }
        Ok(out)
    }

    /// Zero every mode beyond two thirds of the resolvable band (the
    /// classical aliasing cutoff for a cubic nonlinearity). Off by default
    /// in the solvers; exposed for experimentation.
    pub fn dealias_two_thirds(&self, spec: &mut SpectralField2D) {
        let cut_x = self.grid.nx / 3;
        let cut_y = self.grid.ny / 3;
        for ((i, j), c) in spec.coeffs.indexed_iter_mut() {
            let fx = if i <= self.grid.nx / 2 {
                i
            } else {
                self.grid.nx - i
            };
            if fx > cut_x || j > cut_y {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// `Int |grad u|^2 dx` evaluated spectrally through the Laplacian symbol
    /// (Parseval), which keeps the discrete energy identities exact.
    pub fn integral_grad_sq(&self, spec: &SpectralField2D) -> f64 {
        let mut acc = 0.0;
        for ((i, j), c) in spec.coeffs.indexed_iter() {
            let k2 = self.kx[i] * self.kx[i] + self.ky[j] * self.ky[j];
            acc += self.mode_weight(j) * k2 * c.norm_sqr();
        }
        acc * self.grid.cell_area() / self.grid.n_points() as f64
    }

    /// `Int u^2 dx` via Parseval.
    pub fn integral_sq(&self, spec: &SpectralField2D) -> f64 {
        let mut acc = 0.0;
        for ((_, j), c) in spec.coeffs.indexed_iter() {
            acc += self.mode_weight(j) * c.norm_sqr();
        }
        acc * self.grid.cell_area() / self.grid.n_points() as f64
    }
}

const SNAPSHOT_MAGIC: &[u8; 4] = b"FPF1";

/// Write a field snapshot: 32-byte header (magic `FPF1`, nx, ny as u32,
/// step index as u64, time as f64, 4 padding bytes), then row-major
/// little-endian f64 values.
pub fn write_snapshot<W: Write>(
    mut out: W,
    field: &Field2D,
    step: u64,
    time: f64,
) -> Result<()> {
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_all(&(field.grid().nx() as u32).to_le_bytes())?;
    out.write_all(&(field.grid().ny() as u32).to_le_bytes())?;
    out.write_all(&step.to_le_bytes())?;
    out.write_all(&time.to_le_bytes())?;
    out.write_all(&[0u8; 4])?;
    for v in field.values().iter() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Read a snapshot written by [`write_snapshot`]. The caller supplies the
/// grid geometry (the file stores only the mode counts).
pub fn read_snapshot<R: Read>(mut input: R, grid: Grid2D) -> Result<(Field2D, u64, f64)> {
    let mut header = [0u8; 32];
    input.read_exact(&mut header)?;
    if &header[0..4] != SNAPSHOT_MAGIC {
        return Err(Error::domain("snapshot magic mismatch"));
    }
    let nx = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let ny = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    if (nx, ny) != (grid.nx(), grid.ny()) {
        return Err(Error::domain(format!(
            "snapshot is {nx} x {ny}, expected {} x {}",
            grid.nx(),
            grid.ny()
        )));
    }
    let step = u64::from_le_bytes(header[12..20].try_into().unwrap());
    let time = f64::from_le_bytes(header[20..28].try_into().unwrap());
    let mut buf = vec![0u8; nx * ny * 8];
    input.read_exact(&mut buf)?;
    let mut values = Array2::zeros((nx, ny));
    for (idx, v) in values.iter_mut().enumerate() {
        *v = f64::from_le_bytes(buf[idx * 8..idx * 8 + 8].try_into().unwrap());
    }
    Ok((Field2D::from_values(grid, values)?, step, time))
}

/// Plain-matrix CSV export, one grid row per line.
pub fn write_field_csv<W: Write>(mut out: W, field: &Field2D) -> Result<()> {
    for i in 0..field.grid().nx() {
        let row: Vec<String> = (0..field.grid().ny())
            .map(|j| format!("{:.16e}", field.values()[[i, j]]))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
