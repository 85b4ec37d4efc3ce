//! L2 discretization coefficients for the Caputo derivative of order
//! `alpha` in (0,1).
//!
//! The piecewise-quadratic (L2) approximation of the Caputo derivative is
//! driven by three coefficient families `a_j`, `b_j`, `c_j` and, in the
//! difference-quotient reformulation, by `d_j` and `r_1`:
//!
//! ```text
//! a_j = -(3/2)(2-a)(j+1)^{1-a} + (1/2)(2-a) j^{1-a} + (j+1)^{2-a} - j^{2-a}
//! b_j =  2(2-a)(j+1)^{1-a} - 2(j+1)^{2-a} + 2 j^{2-a}
//! c_j = -(1/2)(2-a)[(j+1)^{1-a} + j^{1-a}] + (j+1)^{2-a} - j^{2-a}
//! d_1 = (1 + a/2) 2^{1-a} - (3/2) a,    d_j = c_j - a_{j-1}  (j >= 2)
//! r_1 = 2 - a - d_1
//! ```
//!
//! `a_j + b_j + c_j = 0` identically. The coefficients are tiny differences
//! of power values that grow like `j^{2-alpha}`, so each linear combination
//! is accumulated in compensated (double-double) arithmetic over power
//! atoms evaluated once and shared between the families. That makes every
//! coefficient correctly rounded with respect to the stored atoms and keeps
//! the zero-sum identity at the final-rounding level for the whole sweep
//! range. The power atoms themselves are plain `powf` evaluations; their
//! one-ulp errors are the precision floor quantified by [`sweep_slack`].

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Fractional order, restricted to the open interval (0,1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    /// Boundary values 0 and 1 are rejected: the schemes and their analysis
    /// are stated strictly inside the interval.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::domain(format!(
                "alpha must lie strictly in (0,1), got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Alpha {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

// Compensated accumulation of sum(coeff * atom) terms (Dekker/Knuth).
#[derive(Clone, Copy)]
struct TwoFloat {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> TwoFloat {
    let s = a + b;
    let bv = s - a;
    TwoFloat {
        hi: s,
        lo: (a - (s - bv)) + (b - bv),
    }
}

fn two_prod(a: f64, b: f64) -> TwoFloat {
    let p = a * b;
    TwoFloat {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

fn dd_add(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let s = two_sum(a.hi, b.hi);
    let lo = a.lo + b.lo + s.lo;
    two_sum(s.hi, lo)
}

fn combine(terms: &[(f64, f64)]) -> f64 {
    let mut acc = TwoFloat { hi: 0.0, lo: 0.0 };
    for &(c, x) in terms {
        acc = dd_add(acc, two_prod(c, x));
    }
    acc.hi + acc.lo
}

/// Second central difference of the power function: `(j+1)^b - 2 j^b + (j-1)^b`.
///
/// Building block of the `d_j` closed form and of the sign functions in
/// [`crate::analysis::eval_q`]. The combination is compensated; the power
/// atoms are direct `powf` evaluations whose cancellation at large `j` is
/// inherent and reported via [`sweep_slack`] rather than masked.
pub fn kappa(j: usize, beta: f64) -> f64 {
    assert!(j >= 1, "kappa is defined for j >= 1");
    let j = j as f64;
    combine(&[
        (1.0, (j + 1.0).powf(beta)),
        (-2.0, j.powf(beta)),
        (1.0, (j - 1.0).powf(beta)),
    ])
}

/// Roundoff allowance for sign and monotonicity checks on the coefficient
/// families at index `j`.
///
/// The checked quantities are exact-zero-free combinations of at most a
/// handful of power atoms of magnitude `(j+3)^{2-alpha}`, each carrying a
/// one-ulp evaluation error, so their computed values are trustworthy only
/// down to a small multiple of `eps * (j+3)^{2-alpha}`. Second- and
/// third-difference margins sink below this floor near `j ~ 1e4`; checks
/// against `-sweep_slack` assert "no violation beyond evaluation roundoff",
/// which is the strongest statement double precision supports here.
pub fn sweep_slack(alpha: Alpha, j: usize) -> f64 {
    64.0 * f64::EPSILON * ((j + 3) as f64).powf(2.0 - alpha.value())
}

/// The coefficient triple `(a_j, b_j, c_j)` from the closed forms above.
pub fn coeff_abc(alpha: Alpha, j: usize) -> Result<(f64, f64, f64)> {
    if j == 0 {
        return Err(Error::domain("coefficient index j must be >= 1"));
    }
    let al = alpha.value();
    let j = j as f64;
    let w = 2.0 - al;
    let wh = 0.5 * w; // exact
    let p1 = (j + 1.0).powf(1.0 - al);
    let p0 = j.powf(1.0 - al);
    let q1 = (j + 1.0).powf(2.0 - al);
    let q0 = j.powf(2.0 - al);
    // per-atom multipliers sum to exactly zero across the three families
    let a = combine(&[(-w, p1), (-wh, p1), (wh, p0), (1.0, q1), (-1.0, q0)]);
    let b = combine(&[(2.0 * w, p1), (-2.0, q1), (2.0, q0)]);
    let c = combine(&[(-wh, p1), (-wh, p0), (1.0, q1), (-1.0, q0)]);
    Ok((a, b, c))
}

/// The reformulation coefficient `d_j`, via the kappa closed form
/// `d_j = -(1 - a/2) kappa(j, 1-a) + kappa(j, 2-a)` for `j >= 2`.
///
/// For `j >= 2` this equals `c_j - a_{j-1}`; the two routes are kept as
/// independent code paths and cross-checked in tests.
pub fn coeff_d(alpha: Alpha, j: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::domain("coefficient index j must be >= 1"));
    }
    let al = alpha.value();
    if j == 1 {
        return Ok((1.0 + 0.5 * al) * 2f64.powf(1.0 - al) - 1.5 * al);
    }
    let wh = 0.5 * (2.0 - al);
    let jf = j as f64;
    let p_plus = (jf + 1.0).powf(1.0 - al);
    let p_mid = jf.powf(1.0 - al);
    let p_minus = (jf - 1.0).powf(1.0 - al);
    let q_plus = (jf + 1.0).powf(2.0 - al);
    let q_mid = jf.powf(2.0 - al);
    let q_minus = (jf - 1.0).powf(2.0 - al);
    Ok(combine(&[
        (-wh, p_plus),
        (2.0 * wh, p_mid),
        (-wh, p_minus),
        (1.0, q_plus),
        (-2.0, q_mid),
        (1.0, q_minus),
    ]))
}

/// `r_1 = 2 - alpha - d_1`, which exceeds `3 alpha / 4` on (0,1).
pub fn coeff_r1(alpha: Alpha) -> f64 {
    2.0 - alpha.value() - coeff_d(alpha, 1).expect("d_1 is defined")
}

/// Recompute `(a_j, c_j)` from their integral representations
///
/// ```text
/// a_j = (2-a)(1-a)/2 * Int_0^1 (2s - 3) (j + 1 - s)^{-a} ds
/// c_j = (2-a)(1-a)/2 * Int_0^1 (2s - 1) (j + 1 - s)^{-a} ds
/// ```
///
/// (time step scaled out) using Gauss–Legendre quadrature with `quad_points`
/// nodes. Serves as an independent oracle for the closed forms.
pub fn coeff_integral_check(alpha: Alpha, j: usize, quad_points: usize) -> Result<(f64, f64)> {
    if j == 0 {
        return Err(Error::domain("coefficient index j must be >= 1"));
    }
    if quad_points < 16 {
        return Err(Error::domain("integral check needs at least 16 nodes"));
    }
    let al = alpha.value();
    let jf = j as f64;
    let gl = GaussLegendre::new(quad_points, 0.0, 1.0);
    let front = 0.5 * (2.0 - al) * (1.0 - al);
    let a = front * gl.integrate(|s| (2.0 * s - 3.0) * (jf + 1.0 - s).powf(-al));
    let c = front * gl.integrate(|s| (2.0 * s - 1.0) * (jf + 1.0 - s).powf(-al));
    Ok((a, c))
}

/// Precomputed L2 coefficients for one fractional order, indexed from j = 1.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    alpha: Alpha,
    n_max: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
    r1: f64,
}

impl CoeffTable {
    /// Tabulate all coefficients for indices `1..=n_max`.
    pub fn build(alpha: Alpha, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::domain("coefficient table needs n_max >= 1"));
        }
        let mut a = Vec::with_capacity(n_max);
        let mut b = Vec::with_capacity(n_max);
        let mut c = Vec::with_capacity(n_max);
        let mut d = Vec::with_capacity(n_max);
        for j in 1..=n_max {
            let (aj, bj, cj) = coeff_abc(alpha, j)?;
            a.push(aj);
            b.push(bj);
            c.push(cj);
            d.push(coeff_d(alpha, j)?);
        }
        Ok(CoeffTable {
            alpha,
            n_max,
            a,
            b,
            c,
            d,
            r1: coeff_r1(alpha),
        })
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    /// `a_j` for `1 <= j <= n_max`. Panics on an out-of-range index; callers
    /// validate horizons once at construction time.
    pub fn a(&self, j: usize) -> f64 {
        self.a[j - 1]
    }

    pub fn b(&self, j: usize) -> f64 {
        self.b[j - 1]
    }

    pub fn c(&self, j: usize) -> f64 {
        self.c[j - 1]
    }

    pub fn d(&self, j: usize) -> f64 {
        self.d[j - 1]
    }

    /// Write the table as CSV: header `j,a,b,c,d`, one row per index, and a
    /// final footer line `r1,<value>`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "j,a,b,c,d")?;
        for j in 1..=self.n_max {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                j,
                self.a(j),
                self.b(j),
                self.c(j),
                self.d(j)
            )?;
        }
        writeln!(out, "r1,{:.16e}", self.r1)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn al(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    #[test]
    fn alpha_rejects_boundaries() {
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(1.0).is_err());
        assert!(Alpha::new(-0.3).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(0.5).is_ok());
    }

    #[test]
    fn abc_at_half_match_closed_form_evaluation() {
        // frozen from direct evaluation of the closed forms at alpha = 1/2
        let (a1, b1, c1) = coeff_abc(al(0.5), 1).unwrap();
        assert_relative_eq!(a1, -0.603553390593274, max_relative = 1e-12);
        assert_relative_eq!(b1, 0.585786437626905, max_relative = 1e-12);
        assert_relative_eq!(c1, 0.017766952966369, max_relative = 1e-9);
        // cross-check b_1 = -a_1 - c_1
        assert_relative_eq!(b1, -a1 - c1, max_relative = 1e-12);
        assert!(a1 < 0.0 && c1 > 0.0);
    }

    #[test]
    fn abc_rejects_j_zero() {
        assert!(coeff_abc(al(0.5), 0).is_err());
        assert!(coeff_d(al(0.5), 0).is_err());
    }

    #[test]
    fn abc_sum_vanishes() {
        for &a in &[0.1, 0.37, 0.5, 0.82, 0.99] {
            let alpha = al(a);
            for j in [1usize, 2, 7, 100, 5000, 9999, 10000] {
                let (aj, bj, cj) = coeff_abc(alpha, j).unwrap();
                assert!(
                    (aj + bj + cj).abs() <= 1e-12,
                    "alpha={a} j={j}: {:e}",
                    aj + bj + cj
                );
            }
        }
    }

    #[test]
    fn d_two_routes_agree() {
        for &a in &[0.1, 0.5, 0.9] {
            let alpha = al(a);
            for j in (2..200usize).chain([999, 5000, 10000]) {
                let via_kappa = coeff_d(alpha, j).unwrap();
                let via_diff =
                    coeff_abc(alpha, j).unwrap().2 - coeff_abc(alpha, j - 1).unwrap().0;
                assert_relative_eq!(via_kappa, via_diff, max_relative = 1e-12);
            }
            // j = 1: d_1 = c_1 + 2 - 2 alpha
            let d1 = coeff_d(alpha, 1).unwrap();
            let c1 = coeff_abc(alpha, 1).unwrap().2;
            assert_relative_eq!(d1, c1 + 2.0 - 2.0 * a, max_relative = 1e-13);
        }
    }

    #[test]
    fn d_at_half() {
        assert_relative_eq!(
            coeff_d(al(0.5), 1).unwrap(),
            1.017766952966369,
            max_relative = 1e-12
        );
    }

    #[test]
    fn r1_exceeds_three_quarters_alpha() {
        assert_relative_eq!(coeff_r1(al(0.5)), 0.482233047033631, max_relative = 1e-12);
        assert!(coeff_r1(al(0.5)) > 0.375);
        for k in 1..20 {
            let a = k as f64 * 0.05;
            let alpha = al(a);
            assert!(coeff_r1(alpha) > 0.75 * a, "alpha = {a}");
        }
    }

    #[test]
    fn kappa_basic_values() {
        assert_relative_eq!(kappa(1, 2.0), 2.0, max_relative = 1e-14);
        assert!(kappa(5, 1.0).abs() < 1e-14); // second difference of linear
        assert!(kappa(3, 0.5) < 0.0); // concavity of j^{1-alpha} at alpha=1/2
    }

    #[test]
    fn integral_check_matches_closed_forms() {
        let alpha = al(0.5);
        for j in [1usize, 10] {
            let (ai, ci) = coeff_integral_check(alpha, j, 128).unwrap();
            let (ac, _, cc) = coeff_abc(alpha, j).unwrap();
            assert_relative_eq!(ai, ac, max_relative = 1e-8);
            assert_relative_eq!(ci, cc, max_relative = 1e-8);
            assert!(ai < 0.0); // the (2s-3) factor is negative on [0,1]
        }
        assert!(coeff_integral_check(alpha, 1, 8).is_err());
    }

    #[test]
    fn table_matches_per_index_operations() {
        let alpha = al(0.5);
        let t = CoeffTable::build(alpha, 3).unwrap();
        for j in 1..=3 {
            let (aj, bj, cj) = coeff_abc(alpha, j).unwrap();
            assert_eq!(t.a(j), aj);
            assert_eq!(t.b(j), bj);
            assert_eq!(t.c(j), cj);
            assert_eq!(t.d(j), coeff_d(alpha, j).unwrap());
        }
        assert_eq!(t.r1(), coeff_r1(alpha));
        assert!(CoeffTable::build(alpha, 0).is_err());
    }

    #[test]
    fn lemma_properties_on_coarse_sweep() {
        // full 1e4 sweep lives in the acceptance suite; spot-check here
        for &a in &[0.1, 0.9] {
            let t = CoeffTable::build(al(a), 2000).unwrap();
            for j in 1..=1998 {
                assert!(t.a(j) < 0.0);
                assert!(t.c(j) > 0.0);
                assert!(t.d(j) > 0.0);
                assert!(t.d(j) - t.d(j + 1) > 0.0);
                assert!(3.0 * t.d(j) - 4.0 * t.d(j + 1) + t.d(j + 2) > 0.0);
                assert!(4.0 * t.d(j + 1) >= t.d(j));
                assert!(0.0 < -t.a(j) && -t.a(j) < t.d(j));
            }
        }
    }

    #[test]
    fn slack_tracks_atom_magnitude() {
        let alpha = al(0.1);
        assert!(sweep_slack(alpha, 1) < 1e-12);
        assert!(sweep_slack(alpha, 10_000) < 1e-6);
        assert!(sweep_slack(alpha, 10_000) > sweep_slack(alpha, 100));
    }

    #[test]
    fn csv_has_header_rows_and_footer() {
        let t = CoeffTable::build(al(0.3), 2).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "j,a,b,c,d");
        assert!(lines[3].starts_with("r1,"));
    }
}
