//! Initial conditions for the worked examples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{Field2D, Grid2D};

/// Centers `(x_i, y_i)` and radii `r_i` of the seven-circle initial datum,
/// in units of pi.
const SEVEN_CIRCLES: [(f64, f64, f64); 7] = [
    (0.5, 0.5, 0.2),
    (0.25, 0.75, 2.0 / 15.0),
    (0.5, 1.25, 2.0 / 15.0),
    (1.0, 0.25, 0.1),
    (1.5, 0.25, 0.1),
    (1.0, 1.0, 0.25),
    (1.5, 1.5, 0.25),
];

/// Bump profile `f(s) = 2 exp(-eps^2 / s^2)` for `s < 0`, zero otherwise.
fn bump(s: f64, epsilon: f64) -> f64 {
    if s < 0.0 {
        2.0 * (-epsilon * epsilon / (s * s)).exp()
    } else {
        0.0
    }
}

/// The seven-circle initial condition
/// `u_0 = -1 + sum_i f(sqrt((x-x_i)^2 + (y-y_i)^2) - r_i)` on `[0, 2pi]^2`.
pub fn init_seven_circles(grid: Grid2D, epsilon: f64) -> Result<Field2D> {
    let two_pi = 2.0 * std::f64::consts::PI;
    if (grid.lx() - two_pi).abs() > 1e-12
        || (grid.ly() - two_pi).abs() > 1e-12
        || grid.x(0).abs() > 1e-12
        || grid.y(0).abs() > 1e-12
    {
        return Err(Error::domain(
            "the seven-circle initial condition is posed on [0, 2pi]^2",
        ));
    }
    let pi = std::f64::consts::PI;
    Ok(Field2D::from_fn(grid, |x, y| {
        let mut u = -1.0;
        for &(cx, cy, r) in &SEVEN_CIRCLES {
            let dist = ((x - cx * pi).powi(2) + (y - cy * pi).powi(2)).sqrt();
            u += bump(dist - r * pi, epsilon);
        }
        u
    }))
}

/// Seeded uniform values in `[lo, hi)` per grid point, reproducible across
/// runs and platforms (counter-based generator, fixed traversal order).
pub fn init_uniform_random(grid: Grid2D, lo: f64, hi: f64, seed: u64) -> Result<Field2D> {
    if !(lo < hi) {
        return Err(Error::domain(format!("need lo < hi, got [{lo}, {hi})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = Field2D::zeros(grid);
    for v in field.values_mut().iter_mut() {
        *v = rng.gen_range(lo..hi);
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn seven_circles_background_and_center() {
        let pi = std::f64::consts::PI;
        let grid = Grid2D::square_two_pi(128).unwrap();
        let eps = 0.1;
        let u = init_seven_circles(grid, eps).unwrap();

        // far from every circle the field sits at -1; (7pi/4, 3pi/4) has
        // distance > 0.55 from each circle boundary
        let i = (7 * 128) / 8;
        let j = (3 * 128) / 8;
        assert_relative_eq!(u.values()[[i, j]], -1.0, epsilon = 1e-12);

        // the first circle's center (pi/2, pi/2) is grid point (32, 32);
        // the other circles do not reach it
        let center = u.values()[[32, 32]];
        let r1 = 0.2 * pi;
        assert_relative_eq!(
            center,
            -1.0 + 2.0 * (-eps * eps / (r1 * r1)).exp(),
            epsilon = 1e-12
        );

        // range stays inside [-1, 1 + delta]
        let max = u.values().iter().cloned().fold(f64::MIN, f64::max);
        let min = u.values().iter().cloned().fold(f64::MAX, f64::min);
        assert!(min >= -1.0 - 1e-15);
        assert!(max <= 1.0 + 1e-2);

        let wrong = Grid2D::square_centered_pi(32).unwrap();
        assert!(init_seven_circles(wrong, eps).is_err());
    }

    #[test]
    fn uniform_random_is_reproducible_and_in_range() {
        let grid = Grid2D::square_two_pi(64).unwrap();
        let a = init_uniform_random(grid, -0.5, 0.5, 42).unwrap();
        let b = init_uniform_random(grid, -0.5, 0.5, 42).unwrap();
        assert_eq!(a.values(), b.values());
        let c = init_uniform_random(grid, -0.5, 0.5, 43).unwrap();
        assert_ne!(a.values(), c.values());

        assert!(a.values().iter().all(|&v| (-0.5..0.5).contains(&v)));
        // empirical mean within 5 standard errors of the midpoint
        let se = (1.0 / 12.0f64).sqrt() / (64.0 * 64.0f64).sqrt();
        assert!(a.mean().abs() <= 5.0 * se, "mean {} vs se {se}", a.mean());

        assert!(init_uniform_random(grid, 0.5, -0.5, 1).is_err());
    }
}
