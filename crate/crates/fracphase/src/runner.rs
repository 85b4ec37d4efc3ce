//! Execute a validated [`RunConfig`]: integrate, trace energies, and emit
//! artifacts (energy CSV, verdict summary, field snapshots).

use std::fs;
use std::path::Path;

use crate::coeff::{Alpha, CoeffTable};
use crate::config::{InitialCondition, RunConfig};
use crate::energy::EnergyTrace;
use crate::error::Result;
use crate::problems::{init_seven_circles, init_uniform_random};
use crate::schemes::{integrate, manufactured_solution, Source, StepOptions, StepReport};
use crate::spectral::{write_field_csv, write_snapshot, Field2D, SpectralOps};

/// Everything a finished run hands back to the caller.
pub struct RunSummary {
    pub reports: Vec<StepReport>,
    pub trace: EnergyTrace,
    pub final_field: Field2D,
    pub mean_drift: f64,
    /// Discrete L2 error at the final time, manufactured runs only.
    pub l2_error: Option<f64>,
}

/// Discrete L2 norm by grid quadrature: `sqrt(cell_area * sum e^2)`.
pub fn l2_norm(field: &Field2D) -> f64 {
    field.integrate(|v| v * v).sqrt()
}

/// Integrate the configured problem, writing artifacts into
/// `config.output_dir` when set: `energy.csv`, `verdict.txt`, `steps.csv`,
/// and snapshot files (binary always, CSV alongside for grids up to 64^2).
pub fn execute(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let grid = config.grid()?;
    let tgrid = config.time_grid()?;
    let model = config.model_spec()?;
    let alpha = Alpha::new(config.alpha)?;
    let table = CoeffTable::build(alpha, tgrid.n_steps() + 2)?;
    let ops = SpectralOps::new(grid);

    let (u0, source) = match &config.initial_condition {
        InitialCondition::Zero => (Field2D::zeros(grid), Source::None),
        InitialCondition::SevenCircles => {
            (init_seven_circles(grid, config.epsilon)?, Source::None)
        }
        InitialCondition::UniformRandom { lo, hi, seed } => {
            (init_uniform_random(grid, *lo, *hi, *seed)?, Source::None)
        }
        InitialCondition::Manufactured => (Field2D::zeros(grid), Source::Manufactured),
    };

    let out_dir = config.output_dir.as_deref();
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        emit_snapshot(dir, &u0, 0, 0.0)?;
    }
    let cadence = snapshot_cadence(tgrid.n_steps(), config.snapshots);

    let mut snapshot_err: Option<crate::error::Error> = None;
    let opts = StepOptions {
        source,
        dealias: config.dealias,
    };
    let output = integrate(
        config.scheme,
        u0,
        &table,
        &tgrid,
        &model,
        &ops,
        opts,
        config.c0_shift,
        |n, u| {
            if snapshot_err.is_none() && n % cadence == 0 {
                if let Some(dir) = out_dir {
                    if let Err(e) = emit_snapshot(dir, u, n as u64, tgrid.t(n)) {
                        snapshot_err = Some(e);
                    }
                }
            }
        },
    )?;
    if let Some(e) = snapshot_err {
        return Err(e);
    }

    let trace = EnergyTrace::assemble(
        &output.energies,
        output.modified_energies.as_deref(),
        &table,
        tgrid.dt(),
    )?;
    let mean_drift = output
        .means
        .iter()
        .map(|m| (m - output.means[0]).abs())
        .fold(0.0f64, f64::max);
    let l2_error = if config.initial_condition == InitialCondition::Manufactured {
        let exact = manufactured_solution(grid, tgrid.t_final());
        Some(l2_norm(&output.final_field.add_scaled(-1.0, &exact)))
    } else {
        None
    };

    if let Some(dir) = out_dir {
        trace.write_csv(std::io::BufWriter::new(fs::File::create(
            dir.join("energy.csv"),
        )?))?;
        let mut verdict = fs::File::create(dir.join("verdict.txt"))?;
        trace.write_verdict(&mut verdict)?;
        use std::io::Write;
        writeln!(verdict, "mean_drift={mean_drift:.3e}")?;
        if let Some(err) = l2_error {
            writeln!(verdict, "l2_error={err:.6e}")?;
        }
        write_steps_csv(dir, &output.reports)?;
        emit_snapshot(
            dir,
            &output.final_field,
            tgrid.n_steps() as u64,
            tgrid.t_final(),
        )?;
    }

    Ok(RunSummary {
        reports: output.reports,
        trace,
        final_field: output.final_field,
        mean_drift,
        l2_error,
    })
}

fn snapshot_cadence(n_steps: usize, snapshots: usize) -> usize {
    (n_steps / snapshots.max(1)).max(1)
}

fn emit_snapshot(dir: &Path, field: &Field2D, step: u64, time: f64) -> Result<()> {
    let bin = fs::File::create(dir.join(format!("snapshot_{step:06}.bin")))?;
    write_snapshot(std::io::BufWriter::new(bin), field, step, time)?;
    if field.grid().nx() <= 64 && field.grid().ny() <= 64 {
        let csv = fs::File::create(dir.join(format!("snapshot_{step:06}.csv")))?;
        write_field_csv(std::io::BufWriter::new(csv), field)?;
    }
    Ok(())
}

fn write_steps_csv(dir: &Path, reports: &[StepReport]) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(fs::File::create(dir.join("steps.csv"))?);
    writeln!(out, "n,t,energy,modified_energy,max_norm,mean,wall_seconds")?;
    for r in reports {
        let emod = r
            .modified_energy
            .map(|m| format!("{m:.16e}"))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.3e}",
            r.step, r.time, r.energy, emod, r.max_norm, r.mean, r.wall_seconds
        )?;
    }
    Ok(())
}
