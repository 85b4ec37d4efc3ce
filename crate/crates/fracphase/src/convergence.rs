//! Convergence-table harness for the manufactured problem.
//!
//! The exact solution occupies a single Fourier mode, so a 32^2 grid already
//! makes the spatial error negligible and the tables measure the temporal
//! order: about 2 for the SAV scheme and 3 - alpha for the implicit-explicit
//! scheme. Errors are discrete L2 norms by grid quadrature,
//! `sqrt(cell_area * sum e^2)`.

use crate::caputo::TimeGrid;
use crate::coeff::{Alpha, CoeffTable};
use crate::error::{Error, Result};
use crate::runner::l2_norm;
use crate::schemes::{integrate, manufactured_solution, SchemeKind, Source, StepOptions};
use crate::spectral::{Field2D, Grid2D, Model, ModelSpec, SpectralOps};

/// One row of a refinement table.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub l2_error: f64,
    /// `log2(previous error / this error)`; empty on the first row.
    pub rate: Option<f64>,
}

/// Run the manufactured problem (`eps = 0.1`) for each time step in
/// `dt_list` and tabulate errors at `t_final` with successive rates.
/// The list must decrease by factors of two.
pub fn convergence_table(
    scheme: SchemeKind,
    alpha: Alpha,
    dt_list: &[f64],
    n_modes: usize,
    t_final: f64,
) -> Result<Vec<ConvergenceRow>> {
    if dt_list.is_empty() {
        return Err(Error::domain("convergence table needs at least one step size"));
    }
    for pair in dt_list.windows(2) {
        let ratio = pair[0] / pair[1];
        if (ratio - 2.0).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "step sizes must halve between rows, got ratio {ratio}"
            )));
        }
    }
    let grid = Grid2D::square_centered_pi(n_modes)?;
    let model = ModelSpec::new(Model::AllenCahn, 0.1)?;
    let ops = SpectralOps::new(grid);
    let exact = manufactured_solution(grid, t_final);

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(dt_list.len());
    for &dt in dt_list {
        let n_steps = (t_final / dt).round() as usize;
        if ((t_final / dt) - n_steps as f64).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "t_final = {t_final} is not a whole number of steps of dt = {dt}"
            )));
        }
        let tgrid = TimeGrid::new(dt, n_steps)?;
        let table = CoeffTable::build(alpha, n_steps + 2)?;
        let out = integrate(
            scheme,
            Field2D::zeros(grid),
            &table,
            &tgrid,
            &model,
            &ops,
            StepOptions::with_source(Source::Manufactured),
            1.0,
            |_, _| {},
        )?;
        let err = l2_norm(&out.final_field.add_scaled(-1.0, &exact));
        let rate = rows.last().map(|prev| (prev.l2_error / err).log2());
        rows.push(ConvergenceRow {
            dt,
            l2_error: err,
            rate,
        });
    }
    Ok(rows)
}

/// The halved step lists used by the reported tables: 1/40 down to 1/1280.
pub fn table_dt_list() -> Vec<f64> {
    (0..6).map(|k| 1.0 / (40.0 * (1 << k) as f64)).collect()
}

pub fn write_table_csv<W: std::io::Write>(mut out: W, rows: &[ConvergenceRow]) -> Result<()> {
    writeln!(out, "dt,l2_error,rate")?;
    for row in rows {
        let rate = row.rate.map(|r| format!("{r:.4}")).unwrap_or_default();
        writeln!(out, "{:.10e},{:.6e},{}", row.dt, row.l2_error, rate)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_halving_lists() {
        let alpha = Alpha::new(0.5).unwrap();
        assert!(convergence_table(SchemeKind::Sav, alpha, &[0.1, 0.03], 16, 1.0).is_err());
        assert!(convergence_table(SchemeKind::Sav, alpha, &[], 16, 1.0).is_err());
    }

    #[test]
    fn coarse_table_shows_second_order_sav() {
        let alpha = Alpha::new(0.5).unwrap();
        let rows =
            convergence_table(SchemeKind::Sav, alpha, &[1.0 / 10.0, 1.0 / 20.0, 1.0 / 40.0], 16, 1.0)
                .unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].rate.is_none());
        let rate = rows[2].rate.unwrap();
        assert!((1.6..2.4).contains(&rate), "rate {rate}");
    }

    #[test]
    fn coarse_table_shows_high_order_imex() {
        // pre-asymptotic at these resolutions; the full-table rates live in
        // the acceptance suite. Here: clearly better than second order.
        let alpha = Alpha::new(0.5).unwrap();
        let rows =
            convergence_table(SchemeKind::Imex, alpha, &[1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0], 16, 1.0)
                .unwrap();
        let rate = rows[2].rate.unwrap();
        assert!(rate > 2.2, "rate {rate} vs 3 - alpha = 2.5");
        assert!(rows[2].l2_error < rows[0].l2_error / 16.0);
    }

    #[test]
    fn table_csv_layout() {
        let rows = vec![
            ConvergenceRow { dt: 0.1, l2_error: 1e-3, rate: None },
            ConvergenceRow { dt: 0.05, l2_error: 2.5e-4, rate: Some(2.0) },
        ];
        let mut buf = Vec::new();
        write_table_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("dt,l2_error,rate\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
