//! The connection form `ω = [[0, −kθ²], [kθ², 0]] + [[0, 0], [0, kθ¹]]`
//! on the torus is torsion-free but not skew, so no metric makes it
//! Levi-Civita. Its curvature is skew anyway and the Pfaffian integrates
//! to `−k²(2π)²`.

use affine_orth::frames::{skewness_defect, OneFormMatrix};
use affine_orth::quadrature::{euler_integral, PeriodicGrid};
use affine_orth::Point;

fn main() -> affine_orth::Result<()> {
    let grid = PeriodicGrid::new(64)?;
    let probes = [Point::new(vec![0.3, 2.2])?, Point::new(vec![4.0, 1.0])?];
    for k in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let omega = OneFormMatrix::torus_connection_form(k);
        let curvature = omega.curvature_form()?;
        let integral = euler_integral(&omega, &grid)?;
        println!(
            "k = {k}: ∫Pf(Ω) = {:.10} (expected {:.10}), skew defect of ω {}, of Ω {}",
            integral.value,
            -k * k * 4.0 * std::f64::consts::PI.powi(2),
            skewness_defect(&omega, &probes)?.value,
            skewness_defect(&curvature, &probes)?.value,
        );
    }
    Ok(())
}
