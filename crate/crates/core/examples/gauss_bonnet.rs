//! Total curvature of a few doubly periodic metrics on the torus. Each is
//! zero up to quadrature error, whatever the local curvature looks like.

use affine_orth::quadrature::{gauss_bonnet_torus, PeriodicGrid};
use affine_orth::scenarios::TorusMetricFamily;
use affine_orth::DiagonalMetric;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> affine_orth::Result<()> {
    let grid = PeriodicGrid::new(128)?;
    for family in TorusMetricFamily::ALL {
        let r = gauss_bonnet_torus(&family.metric(), &grid)?;
        println!("{:<16} ∫K dA = {:+.3e} (estimated error {:.1e})", family.name(), r.value, r.estimated_error);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..3 {
        let g = DiagonalMetric::random_periodic(&mut rng, 2);
        let r = gauss_bonnet_torus(&g, &grid)?;
        println!("random #{i}        ∫K dA = {:+.3e}", r.value);
    }
    Ok(())
}
