use crate::geometry::cloud::distance;

/// Volume `ω_n = π^{n/2} / Γ(n/2 + 1)` of the unit ball in ℝⁿ.
pub fn unit_ball_volume(n: usize) -> f64 {
    // ω_0 = 1, ω_1 = 2, ω_n = 2π/n · ω_{n-2}
    let mut w = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        w *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    w
}

/// A Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        assert!(radius > 0.0, "ball radius must be positive");
        Ball { center, radius }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Lebesgue measure `ω_n r^n`.
    pub fn measure(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    /// Closed-ball membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        distance(&self.center, x) <= self.radius
    }

    /// Radius of a ball of measure one.
    pub fn unit_measure_radius(n: usize) -> f64 {
        (1.0 / unit_ball_volume(n)).powf(1.0 / n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn unit_measure_radius_has_measure_one() {
        for n in 1..5 {
            let b = Ball::new(vec![0.0; n], Ball::unit_measure_radius(n));
            assert!((b.measure() - 1.0).abs() < 1e-12);
        }
    }
}
