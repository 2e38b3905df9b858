//! Flat connections `Γ^1_11 = k` on the torus: zero curvature, yet the
//! holonomy around the first circle scales by `e^{−2πk}`, so different `k`
//! give non-isomorphic flat structures.

use affine_orth::{ChristoffelField, Curve, Point};

fn main() -> affine_orth::Result<()> {
    let p = Point::new(vec![0.4, 1.3])?;
    let lp = Curve::coordinate_loop(&Point::origin(2), 0);
    for k in [-1.0, 0.0, 0.5, 3.0] {
        let gamma = ChristoffelField::torus_affine(k, 2);
        let curvature = gamma.curvature_tensor(&p)?.norm();
        let spectrum = gamma.holonomy_eigenvalues(&lp, 1000)?;
        println!(
            "k = {k:>4}: |R| = {curvature:.1e}, holonomy moduli {spectrum:?}, e^(-2πk) = {:.6e}",
            (-2.0 * std::f64::consts::PI * k).exp()
        );
    }
    Ok(())
}
