use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::samplers::{log_t_max, tau_psi_with_t_max, RngStream};
use crate::specfun::BesselIndex;

/// The curved boundary `ψ(t) = sqrt(2t ln(a / (Γ(ν+1) t^{ν+1} 2^ν)))` obtained
/// from the image measure `F(dy) = y^{2ν+1} dy`, together with its explicit
/// hitting-time density `ψ^{2ν+2}(t) / (2at)` for the Bessel process started at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MovingBoundary {
    a: f64,
    index: BesselIndex,
    t_max: f64,
}

impl MovingBoundary {
    pub fn new(a: f64, index: BesselIndex) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return domain(format!("moving boundary needs finite a > 0, got {a}"));
        }
        Ok(Self { a, index, t_max: log_t_max(a, index).exp() })
    }

    /// Boundary whose largest radius is `gamma * d`.
    pub fn for_distance(d: f64, gamma: f64, index: BesselIndex) -> Result<Self> {
        Self::new(moving_sphere_param_a(d, gamma, index)?, index)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn index(&self) -> BesselIndex {
        self.index
    }

    /// End of the support; `ψ(t_max) = 0`.
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Maximizer `t_max / e` of `ψ`.
    pub fn t_star(&self) -> f64 {
        self.t_max / std::f64::consts::E
    }

    /// `sup_t ψ(t) = sqrt(2(ν+1) t*)`.
    pub fn psi_max(&self) -> f64 {
        (2.0 * (self.index.nu() + 1.0) * self.t_star()).sqrt()
    }

    fn check(&self, t: f64) -> Result<()> {
        if !(t > 0.0 && t <= self.t_max) {
            return domain(format!("t = {t} outside (0, {}]", self.t_max));
        }
        Ok(())
    }

    pub fn psi(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.psi_unchecked(t))
    }

    // ln(a / (Γ(ν+1) t^{ν+1} 2^ν)) = (ν+1) ln(t_max / t)
    #[inline]
    pub(crate) fn psi_unchecked(&self, t: f64) -> f64 {
        let nu1 = self.index.nu() + 1.0;
        (2.0 * t * nu1 * (self.t_max / t).ln()).max(0.0).sqrt()
    }

    pub fn hitting_pdf(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let psi = self.psi_unchecked(t);
        let power = 2 * self.index.floor_nu() + 2;
        let mut value = psi.powi(power as i32);
        if self.index.frac_nu() > 0.0 {
            value *= psi;
        }
        Ok(value / (2.0 * self.a * t))
    }

    /// Draw of the hitting time `τ_ψ`.
    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        tau_psi_with_t_max(self.t_max, self.index, rng)
    }
}

/// Free-function form of [`MovingBoundary::psi`].
pub fn psi(t: f64, boundary: &MovingBoundary) -> Result<f64> {
    boundary.psi(t)
}

/// Free-function form of [`MovingBoundary::hitting_pdf`].
pub fn hitting_pdf(t: f64, boundary: &MovingBoundary) -> Result<f64> {
    boundary.hitting_pdf(t)
}

/// Parameter `a = (γ² d² e / (ν+1))^{ν+1} Γ(ν+1) / 2` keeping the moving
/// sphere inside the ball of radius `γ d`.
pub fn moving_sphere_param_a(d: f64, gamma: f64, index: BesselIndex) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return domain(format!("distance to the boundary must be > 0, got {d}"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return domain(format!("gamma must lie in (0, 1), got {gamma}"));
    }
    let nu1 = index.nu() + 1.0;
    let log_a = nu1 * (gamma * gamma * d * d * std::f64::consts::E / nu1).ln() + index.log_gamma_nu1()
        - std::f64::consts::LN_2;
    Ok(log_a.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{chi_square_against_density, integrate, mean_se};
    use std::f64::consts::E;

    fn idx(delta: u32) -> BesselIndex {
        BesselIndex::from_dimension(delta).unwrap()
    }

    // golden-section maximization, independent of the closed-form maximizer
    fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - r * (hi - lo);
        let mut x2 = lo + r * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..200 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + r * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - r * (hi - lo);
                f1 = f(x1);
            }
        }
        f(0.5 * (lo + hi))
    }

    #[test]
    fn psi_vanishes_at_t_max() {
        for delta in 2..7 {
            let b = MovingBoundary::new(0.3, idx(delta)).unwrap();
            assert_eq!(b.psi(b.t_max()).unwrap(), 0.0);
            assert_eq!(b.hitting_pdf(b.t_max()).unwrap(), 0.0);
        }
    }

    #[test]
    fn psi_rejects_outside_support() {
        let b = MovingBoundary::new(0.3, idx(2)).unwrap();
        assert!(b.psi(0.0).is_err());
        assert!(b.psi(b.t_max() * 1.01).is_err());
        assert!(b.hitting_pdf(-1.0).is_err());
        assert!(MovingBoundary::new(0.0, idx(2)).is_err());
    }

    #[test]
    fn planar_psi_maximum_at_a_over_e() {
        let a = 0.7;
        let b = MovingBoundary::new(a, idx(2)).unwrap();
        let v = b.psi(a / E).unwrap();
        assert!((v - (2.0 * a / E).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sup_psi_equals_gamma_d() {
        for delta in [2, 3, 5] {
            for &(d, gamma) in &[(1.0, 0.99), (0.37, 0.5), (2.5, 0.1), (1e-4, 0.99)] {
                let b = MovingBoundary::for_distance(d, gamma, idx(delta)).unwrap();
                let numeric = golden_max(|t| b.psi(t).unwrap(), 1e-300_f64.max(b.t_max() * 1e-12), b.t_max());
                assert!((numeric - gamma * d).abs() < 1e-10 * d.max(1.0), "delta={delta} d={d}");
                let p = b.psi(b.t_star()).unwrap();
                assert!((p * p - gamma * gamma * d * d).abs() < 1e-12 * d * d);
                assert!((b.psi_max() - gamma * d).abs() < 1e-14 * d.max(1.0));
            }
        }
    }

    #[test]
    fn planar_pdf_is_log_ratio() {
        let a = 1.3;
        let b = MovingBoundary::new(a, idx(2)).unwrap();
        for i in 1..100 {
            let t = a * i as f64 / 100.0;
            let p = b.hitting_pdf(t).unwrap();
            assert!((p - (a / t).ln() / a).abs() < 1e-14);
        }
    }

    #[test]
    fn param_a_planar_closed_form() {
        for &(d, g) in &[(1.0, 0.99), (0.2, 0.5)] {
            let a = moving_sphere_param_a(d, g, idx(2)).unwrap();
            assert!((a - g * g * E * d * d / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn param_a_monotone_in_distance() {
        for delta in 2..9 {
            for &d in &[1e-3, 0.1, 0.5, 1.0] {
                for &g in &[0.1, 0.5, 0.99] {
                    let a1 = moving_sphere_param_a(d, g, idx(delta)).unwrap();
                    let a2 = moving_sphere_param_a(2.0 * d, g, idx(delta)).unwrap();
                    assert!(a2 > a1);
                }
            }
        }
    }

    #[test]
    fn param_a_domain_errors() {
        assert!(moving_sphere_param_a(0.0, 0.5, idx(2)).is_err());
        assert!(moving_sphere_param_a(1.0, 1.0, idx(2)).is_err());
        assert!(moving_sphere_param_a(1.0, 0.0, idx(2)).is_err());
    }

    #[test]
    fn pdf_has_unit_mass() {
        for delta in 2..=8 {
            let b = MovingBoundary::new(0.7, idx(delta)).unwrap();
            let m = integrate(|t| b.hitting_pdf(t).unwrap_or(0.0), 0.0, b.t_max(), 1e-13);
            assert!((m - 1.0).abs() < 1e-8, "delta={delta} mass={m}");
        }
    }

    #[test]
    fn planar_mean_by_quadrature() {
        let a = 1.3;
        let b = MovingBoundary::new(a, idx(2)).unwrap();
        let m = integrate(|t| t * b.hitting_pdf(t).unwrap_or(0.0), 0.0, b.t_max(), 1e-14);
        assert!((m - a / 4.0).abs() < 1e-10);
    }

    #[test]
    fn sampler_matches_pdf_by_chi_square() {
        let n = 200_000;
        for (i, &delta) in [2u32, 3, 5].iter().enumerate() {
            let b = MovingBoundary::new(0.9, idx(delta)).unwrap();
            let mut rng = RngStream::new(101, i as u64);
            let draws: Vec<f64> = (0..n).map(|_| b.sample(&mut rng)).collect();
            let p = chi_square_against_density(&draws, |t| b.hitting_pdf(t).unwrap_or(0.0), b.t_max(), 100);
            assert!(p > 1e-3, "delta={delta} p={p}");
        }
    }

    #[test]
    fn planar_sample_mean() {
        let a = 0.8;
        let b = MovingBoundary::new(a, idx(2)).unwrap();
        let mut rng = RngStream::new(7, 0);
        let n = 400_000;
        let xs: Vec<f64> = (0..n).map(|_| b.sample(&mut rng)).collect();
        let (m, se) = mean_se(&xs);
        assert!((m - a / 4.0).abs() < 3.0 * se);
    }

    #[test]
    fn draws_stay_inside_safety_ball() {
        let mut rng = RngStream::new(3, 3);
        for &delta in &[2u32, 3, 5] {
            for &d in &[1e-6, 0.01, 0.5, 1.0] {
                for &g in &[0.01, 0.5, 0.99] {
                    let b = MovingBoundary::for_distance(d, g, idx(delta)).unwrap();
                    for _ in 0..2000 {
                        let r = b.sample(&mut rng);
                        assert!(b.psi(r).unwrap() <= g * d + 1e-12);
                    }
                }
            }
        }
    }
}
