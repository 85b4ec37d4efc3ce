//! Quadratic-form matrices behind the stability estimates, plus numerical
//! certificates: minimum symmetric eigenvalues, the three structural
//! Cholesky conditions, randomized quadratic-form lower bounds, and the
//! kappa-product sign functions `Q_1`, `Q_2`, `Q_3`.
//!
//! Matrix entries are always taken from a [`CoeffTable`], never recomputed
//! inline, so a coefficient bug surfaces in exactly one module.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeff::{kappa, Alpha, CoeffTable};
use crate::error::{Error, Result};

/// Which lemma family a matrix set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadFormFamily {
    /// Split of `sum_k <L_k u, 3 D_k u - D_{k-1} u>`: three lower-triangular
    /// matrices `A`, `B`, `C`.
    Lemma22,
    /// Split of `sum_k d_{n-k+1} <L_k u, D_k u>`: two weighted matrices.
    Lemma23,
}

/// Dense matrices of one quadratic-form split.
#[derive(Debug, Clone)]
pub struct QuadFormMatrices {
    pub n: usize,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: Option<DMatrix<f64>>,
    pub which: QuadFormFamily,
}

fn require_table(table: &CoeffTable, n: usize, extra: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain("quadratic-form matrices need n >= 2"));
    }
    if table.n_max() < n + extra {
        return Err(Error::domain(format!(
            "coefficient table holds {} indices, need {}",
            table.n_max(),
            n + extra
        )));
    }
    Ok(())
}

/// Bidiagonal matrix with `r_1` in the corner and the `3a/2`, `-a/2` band;
/// shared by both splits.
fn alpha_bidiagonal(table: &CoeffTable, n: usize) -> DMatrix<f64> {
    let al = table.alpha().value();
    let mut c = DMatrix::zeros(n, n);
    c[(0, 0)] = table.r1();
    for i in 1..n {
        c[(i, i)] = 1.5 * al;
        c[(i, i - 1)] = -0.5 * al;
    }
    c
}

/// Lower-triangular matrices of the first split, entries as displayed in
/// the stability proof:
///
/// ```text
/// A: row 1:      (3d_1 + a_2)/2
///    rows 1<i<n: -3a_i + a_{i+1} | 3d_{i-j+1} - d_{i-j+2} | (3d_1 - d_2)/2
///    row n:      -3a_n           | 3d_{n-j+1}             | (5/2) d_1
/// B: bidiagonal, diagonal (3d_1+a_2)/2, (3d_1-d_2)/2, ..., d_1/2, sub -d_1
/// C: bidiagonal, diagonal r_1, 3a/2, ..., sub -a/2
/// ```
pub fn build_lemma22_matrices(table: &CoeffTable, n: usize) -> Result<QuadFormMatrices> {
    require_table(table, n, 1)?;
    let mut a = DMatrix::zeros(n, n);
    a[(0, 0)] = 0.5 * (3.0 * table.d(1) + table.a(2));
    for i in 2..n {
        a[(i - 1, 0)] = -3.0 * table.a(i) + table.a(i + 1);
        for j in 2..i {
            a[(i - 1, j - 1)] = 3.0 * table.d(i - j + 1) - table.d(i - j + 2);
        }
        a[(i - 1, i - 1)] = 0.5 * (3.0 * table.d(1) - table.d(2));
    }
    a[(n - 1, 0)] = -3.0 * table.a(n);
    for j in 2..n {
        a[(n - 1, j - 1)] = 3.0 * table.d(n - j + 1);
    }
    a[(n - 1, n - 1)] = 2.5 * table.d(1);

    let mut b = DMatrix::zeros(n, n);
    b[(0, 0)] = 0.5 * (3.0 * table.d(1) + table.a(2));
    for i in 1..n {
        b[(i, i)] = if i == n - 1 {
            0.5 * table.d(1)
        } else {
            0.5 * (3.0 * table.d(1) - table.d(2))
        };
        b[(i, i - 1)] = -table.d(1);
    }

    Ok(QuadFormMatrices {
        n,
        a,
        b,
        c: Some(alpha_bidiagonal(table, n)),
        which: QuadFormFamily::Lemma22,
    })
}

/// Weighted matrices of the second split: `A = diag(d_n..d_1) * T` with `T`
/// lower triangular (`d_1` diagonal, `-a_{i-1}` first column, `d_{i-j+1}`
/// below), and `B = diag(d_n..d_1)` times the `r_1`/alpha bidiagonal.
pub fn build_lemma23_matrices(table: &CoeffTable, n: usize) -> Result<QuadFormMatrices> {
    require_table(table, n, 0)?;
    let weights: Vec<f64> = (0..n).map(|i| table.d(n - i)).collect();
    let mut t = DMatrix::zeros(n, n);
    for i in 1..=n {
        t[(i - 1, i - 1)] = table.d(1);
        if i >= 2 {
            t[(i - 1, 0)] = -table.a(i - 1);
        }
        for j in 2..i {
            t[(i - 1, j - 1)] = table.d(i - j + 1);
        }
    }
    let mut a = t;
    let mut b = alpha_bidiagonal(table, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= weights[i];
            b[(i, j)] *= weights[i];
        }
    }
    Ok(QuadFormMatrices {
        n,
        a,
        b,
        c: None,
        which: QuadFormFamily::Lemma23,
    })
}

/// Conjugate of `A + A^T` (second split) by the anti-diagonal matrix with
/// entries `1/d_i`. Its lower triangle takes the closed form
/// `2 d_1/d_i` (diagonal), `d_{i-j+1}/d_i` (`j < i < n`), `-a_{n-j}/d_n`
/// (last row), a symmetric matrix of positive entries.
pub fn build_conjugate_s(table: &CoeffTable, n: usize) -> Result<DMatrix<f64>> {
    require_table(table, n, 0)?;
    let m = {
        let qf = build_lemma23_matrices(table, n)?;
        &qf.a + qf.a.transpose()
    };
    let mut p = DMatrix::zeros(n, n);
    for i in 1..=n {
        p[(i - 1, n - i)] = 1.0 / table.d(i);
    }
    Ok(&p * m * p.transpose())
}

/// Outcome of the three structural conditions on a symmetric matrix with
/// positive lower-triangular entries:
///
/// ```text
/// (i)   M[i-1][j] >= M[i][j]            (entries decrease down columns)
/// (ii)  M[i][j-1] <  M[i][j]            (strict increase along rows)
/// (iii) M[i-1][j-1] - M[i][j-1] <= M[i-1][j] - M[i][j]
/// ```
///
/// over the lower-triangular index range. The non-strict comparisons allow
/// `1e-12`-scaled slack: several entries (e.g. `d_i/d_i` ratios) are exactly
/// equal in exact arithmetic and differ by one ulp in floating point. The
/// strict comparison is exact.
#[derive(Debug, Clone)]
pub struct CholeskyConditions {
    pub ok: [bool; 3],
    /// First failing `(row, col, violation)` per condition, 0-indexed.
    pub witnesses: Vec<(usize, usize, usize, f64)>,
}

impl CholeskyConditions {
    pub fn all_ok(&self) -> bool {
        self.ok.iter().all(|&b| b)
    }
}

pub fn check_cholesky_conditions(m: &DMatrix<f64>) -> Result<CholeskyConditions> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::domain("cholesky condition check needs a square matrix"));
    }
    let sym_err = (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .fold(0.0f64, |w, (i, j)| w.max((m[(i, j)] - m[(j, i)]).abs()));
    if sym_err > 1e-12 * (1.0 + m.amax()) {
        return Err(Error::domain(format!(
            "matrix is not symmetric: max asymmetry {sym_err:.3e}"
        )));
    }

    let slack = |x: f64, y: f64| 1e-12 * 1.0f64.max(x.abs()).max(y.abs());
    let mut ok = [true; 3];
    let mut witnesses = Vec::new();

    // (i): needs (i-1, j) inside the lower triangle, i.e. j <= i-1
    'outer1: for i in 1..n {
        for j in 0..i {
            let (hi, lo) = (m[(i - 1, j)], m[(i, j)]);
            if hi < lo - slack(hi, lo) {
                ok[0] = false;
                witnesses.push((0, i, j, lo - hi));
                break 'outer1;
            }
        }
    }
    // (ii): strict increase along rows, j >= 1
    'outer2: for i in 1..n {
        for j in 1..=i {
            let (left, right) = (m[(i, j - 1)], m[(i, j)]);
            if !(left < right) {
                ok[1] = false;
                witnesses.push((1, i, j, left - right));
                break 'outer2;
            }
        }
    }
    // (iii): 2x2 difference condition, needs j-1 >= 0 and j <= i-1
    'outer3: for i in 2..n {
        for j in 1..i {
            let lhs = m[(i - 1, j - 1)] - m[(i, j - 1)];
            let rhs = m[(i - 1, j)] - m[(i, j)];
            if lhs > rhs + slack(lhs, rhs) {
                ok[2] = false;
                witnesses.push((2, i, j, lhs - rhs));
                break 'outer3;
            }
        }
    }
    Ok(CholeskyConditions { ok, witnesses })
}

/// Minimum eigenvalue of the symmetrized matrix `(M + M^T)/2`.
pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::domain("eigenvalue certificate needs a square matrix"));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Randomized check of the quadratic-form lower bounds
///
/// ```text
/// psi (A + B + C) psi^T >= (alpha/2) psi psi^T              (first split)
/// psi (A + B) psi^T >= (5 alpha/12) sum_k d_{n-k+1} psi_k^2  (second split)
/// ```
///
/// on `trials` seeded standard-normal vectors, each within `1e-10` scaled
/// slack. `n = 1` degenerates to the scalar bound `(r_1 + d_1) = 2 - alpha`.
pub fn quadform_lower_bound_check(
    table: &CoeffTable,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    if trials == 0 {
        return Err(Error::domain("lower-bound check needs at least one trial"));
    }
    let al = table.alpha().value();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // uniform directions suffice: both bounds are homogeneous of degree 2
    let directions = rand::distributions::Uniform::new_inclusive(-1.0, 1.0);

    if n == 1 {
        // scalar forms: (r_1 + d_1) psi^2 and d_1 (r_1 + d_1) psi^2
        let total = table.r1() + table.d(1);
        let ok22 = total >= 0.5 * al - 1e-10;
        let ok23 = table.d(1) * total >= (5.0 * al / 12.0) * table.d(1) - 1e-10;
        return Ok(ok22 && ok23);
    }

    let qf22 = build_lemma22_matrices(table, n)?;
    let total22 = &qf22.a + &qf22.b + qf22.c.as_ref().expect("first split carries C");
    let qf23 = build_lemma23_matrices(table, n)?;
    let total23 = &qf23.a + &qf23.b;
    let d_weights: Vec<f64> = (1..=n).map(|k| table.d(n - k + 1)).collect();

    for _ in 0..trials {
        let psi: Vec<f64> = (0..n).map(|_| directions.sample(&mut rng)).collect();
        let psi_v = nalgebra::DVector::from_column_slice(&psi);

        let lhs22 = (psi_v.transpose() * &total22 * &psi_v)[(0, 0)];
        let rhs22 = 0.5 * al * psi_v.norm_squared();
        if lhs22 < rhs22 - 1e-10 * 1.0f64.max(lhs22.abs()).max(rhs22.abs()) {
            return Ok(false);
        }

        let lhs23 = (psi_v.transpose() * &total23 * &psi_v)[(0, 0)];
        let rhs23 = (5.0 * al / 12.0)
            * psi
                .iter()
                .zip(&d_weights)
                .map(|(p, d)| d * p * p)
                .sum::<f64>();
        if lhs23 < rhs23 - 1e-10 * 1.0f64.max(lhs23.abs()).max(rhs23.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The sign functions from the conjugate-matrix monotonicity argument:
///
/// ```text
/// Q_1 = (a/2) kappa(i, 2-a) kappa(m, -a-1) + kappa(i, -a) kappa(m, 1-a)
/// Q_2 = (a/2) kappa(i, 1-a) kappa(m, -a-1) + ((1-a)/2) kappa(i, -a) kappa(m, -a)
/// Q_3 = -(1-a) kappa(i, 2-a) kappa(m, -a) + (2-a) kappa(i, 1-a) kappa(m, 1-a)
/// ```
///
/// with `m = i - j + 1`, for `i > j >= 1`. Certified signs: `Q_1 >= 0`,
/// `Q_2 <= 0`, `Q_3 <= 0`.
pub fn eval_q(alpha: Alpha, i: usize, j: usize) -> Result<(f64, f64, f64)> {
    if !(i > j && j >= 1) {
        return Err(Error::domain(format!("eval_q needs i > j >= 1, got i={i}, j={j}")));
    }
    let al = alpha.value();
    let m = i - j + 1;
    let q1 = 0.5 * al * kappa(i, 2.0 - al) * kappa(m, -al - 1.0)
        + kappa(i, -al) * kappa(m, 1.0 - al);
    let q2 = 0.5 * al * kappa(i, 1.0 - al) * kappa(m, -al - 1.0)
        + 0.5 * (1.0 - al) * kappa(i, -al) * kappa(m, -al);
    let q3 = -(1.0 - al) * kappa(i, 2.0 - al) * kappa(m, -al)
        + (2.0 - al) * kappa(i, 1.0 - al) * kappa(m, 1.0 - al);
    Ok((q1, q2, q3))
}

/// Roundoff-tolerant verdict on the `(Q_1 >= 0, Q_2 <= 0, Q_3 <= 0)` signs:
/// each is allowed `1e-12` relative slack against the largest-magnitude
/// sub-term of its sum, so cancellation near zero counts as passing.
pub fn q_signs_ok(alpha: Alpha, i: usize, j: usize) -> Result<bool> {
    let (q1, q2, q3) = eval_q(alpha, i, j)?;
    let al = alpha.value();
    let m = i - j + 1;
    let s1 = (0.5 * al * kappa(i, 2.0 - al) * kappa(m, -al - 1.0))
        .abs()
        .max((kappa(i, -al) * kappa(m, 1.0 - al)).abs());
    let s2 = (0.5 * al * kappa(i, 1.0 - al) * kappa(m, -al - 1.0))
        .abs()
        .max((0.5 * (1.0 - al) * kappa(i, -al) * kappa(m, -al)).abs());
    let s3 = ((1.0 - al) * kappa(i, 2.0 - al) * kappa(m, -al))
        .abs()
        .max(((2.0 - al) * kappa(i, 1.0 - al) * kappa(m, 1.0 - al)).abs());
    Ok(q1 >= -1e-12 * s1 && q2 <= 1e-12 * s2 && q3 <= 1e-12 * s3)
}

/// The padded matrix from the block-Cholesky argument and its factor
/// identity. Returns the minor `M_{n-1}`, the padded matrix, and the
/// `(l_nn^2, chol-of-M last diagonal squared, d_1/2)` triple satisfying
/// `l_nn^2 = 5 d_1 - (9/4) l l^T > d_1/2`.
pub struct BlockCholeskyCheck {
    pub minor: DMatrix<f64>,
    pub padded: DMatrix<f64>,
    pub l_nn_sq: f64,
    pub chol_last_diag_sq: f64,
    pub lower_bound: f64,
}

pub fn block_cholesky_check(table: &CoeffTable, n: usize) -> Result<BlockCholeskyCheck> {
    let qf = build_lemma22_matrices(table, n)?;
    let m = &qf.a + qf.a.transpose();
    let minor = m.view((0, 0), (n - 1, n - 1)).into_owned();
    let b = m.view((n - 1, 0), (1, n - 1)).into_owned();

    let mut padded = DMatrix::zeros(n, n);
    padded.view_mut((0, 0), (n - 1, n - 1)).copy_from(&minor);
    for j in 0..n - 1 {
        padded[(n - 1, j)] = b[(0, j)] * (2.0 / 3.0);
        padded[(j, n - 1)] = b[(0, j)] * (2.0 / 3.0);
    }
    padded[(n - 1, n - 1)] = 2.0 * table.d(1);

    let chol_padded = Cholesky::new(padded.clone())
        .ok_or_else(|| Error::domain("padded matrix is not positive definite"))?;
    let lt = chol_padded.l();
    let l_row = lt.view((n - 1, 0), (1, n - 1));
    let llt: f64 = l_row.iter().map(|v| v * v).sum();
    let l_nn_sq = 5.0 * table.d(1) - 2.25 * llt;

    let chol_m = Cholesky::new(m.clone())
        .ok_or_else(|| Error::domain("symmetrized matrix is not positive definite"))?;
    let last = chol_m.l()[(n - 1, n - 1)];

    Ok(BlockCholeskyCheck {
        minor,
        padded,
        l_nn_sq,
        chol_last_diag_sq: last * last,
        lower_bound: 0.5 * table.d(1),
    })
}

/// Certification outcome for one `(alpha, n)` pair.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub alpha: f64,
    pub n: usize,
    pub min_eig_22_a: f64,
    pub min_eig_22_b: f64,
    pub min_eig_22_c: f64,
    pub min_eig_23_a: f64,
    pub min_eig_23_b: f64,
    pub cholesky_minor_ok: [bool; 3],
    pub cholesky_padded_ok: [bool; 3],
    pub cholesky_conjugate_ok: [bool; 3],
    pub quadform_lower_bound_ok: bool,
    pub block_identity_ok: bool,
    /// `(condition, row, col, violation)` entries from failed predicates.
    pub witnesses: Vec<(usize, usize, usize, f64)>,
}

impl AnalysisReport {
    pub fn all_ok(&self) -> bool {
        self.min_eig_22_a > 0.0
            && self.min_eig_22_b > 0.0
            && self.min_eig_22_c > 0.0
            && self.min_eig_23_a > 0.0
            && self.min_eig_23_b > 0.0
            && self.cholesky_minor_ok.iter().all(|&b| b)
            && self.cholesky_padded_ok.iter().all(|&b| b)
            && self.cholesky_conjugate_ok.iter().all(|&b| b)
            && self.quadform_lower_bound_ok
            && self.block_identity_ok
    }

    pub fn csv_header() -> &'static str {
        "alpha,n,min_eig_22_a,min_eig_22_b,min_eig_22_c,min_eig_23_a,min_eig_23_b,\
         chol_minor_i,chol_minor_ii,chol_minor_iii,chol_padded_i,chol_padded_ii,chol_padded_iii,\
         chol_conj_i,chol_conj_ii,chol_conj_iii,quadform_ok,block_identity_ok"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{},{},{},{},{},{},{},{},{},{},{}",
            self.alpha,
            self.n,
            self.min_eig_22_a,
            self.min_eig_22_b,
            self.min_eig_22_c,
            self.min_eig_23_a,
            self.min_eig_23_b,
            self.cholesky_minor_ok[0],
            self.cholesky_minor_ok[1],
            self.cholesky_minor_ok[2],
            self.cholesky_padded_ok[0],
            self.cholesky_padded_ok[1],
            self.cholesky_padded_ok[2],
            self.cholesky_conjugate_ok[0],
            self.cholesky_conjugate_ok[1],
            self.cholesky_conjugate_ok[2],
            self.quadform_lower_bound_ok,
            self.block_identity_ok,
        )
    }
}

/// Run every certificate for one `(alpha, n)` pair.
pub fn analyze_pair(table: &CoeffTable, n: usize, trials: usize, seed: u64) -> Result<AnalysisReport> {
    let qf22 = build_lemma22_matrices(table, n)?;
    let qf23 = build_lemma23_matrices(table, n)?;
    let s = build_conjugate_s(table, n)?;
    let block = block_cholesky_check(table, n)?;

    let minor_conds = check_cholesky_conditions(&block.minor)?;
    let padded_conds = check_cholesky_conditions(&block.padded)?;
    let s_conds = check_cholesky_conditions(&s)?;

    let block_identity_ok = {
        let rel = (block.l_nn_sq - block.chol_last_diag_sq).abs()
            / (1.0 + block.l_nn_sq.abs());
        rel <= 1e-9 && block.l_nn_sq > block.lower_bound
    };

    let mut witnesses = Vec::new();
    witnesses.extend(minor_conds.witnesses.iter().copied());
    witnesses.extend(padded_conds.witnesses.iter().copied());
    witnesses.extend(s_conds.witnesses.iter().copied());

    Ok(AnalysisReport {
        alpha: table.alpha().value(),
        n,
        min_eig_22_a: min_symmetric_eigenvalue(&qf22.a)?,
        min_eig_22_b: min_symmetric_eigenvalue(&qf22.b)?,
        min_eig_22_c: min_symmetric_eigenvalue(qf22.c.as_ref().expect("first split carries C"))?,
        min_eig_23_a: min_symmetric_eigenvalue(&qf23.a)?,
        min_eig_23_b: min_symmetric_eigenvalue(&qf23.b)?,
        cholesky_minor_ok: minor_conds.ok,
        cholesky_padded_ok: padded_conds.ok,
        cholesky_conjugate_ok: s_conds.ok,
        quadform_lower_bound_ok: quadform_lower_bound_check(table, n, trials, seed)?,
        block_identity_ok,
        witnesses,
    })
}
