//! The Hopf metric `δ_ij / |x|²` is invariant under every dilation, so it
//! descends to `S^{n-1} × S^1`. A stretch along one axis breaks this.
//!
//! ```bash
//! cargo run --example hopf_invariance
//! ```

use affine_orth::fields::sample_box;
use affine_orth::DiagonalMetric;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> affine_orth::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [2, 3] {
        let g = DiagonalMetric::hopf(n);
        let probes = sample_box(&mut rng, n, 100, 2.0, 0.1);
        let dilation = DMatrix::<f64>::identity(n, n) * 2.0;
        let mut stretch = vec![2.0; n];
        stretch[0] = 2.1;
        let stretched = DMatrix::from_diagonal(&DVector::from_vec(stretch));
        println!(
            "n = {n}: dilation residual {:e}, stretched residual {:e}",
            g.pullback_residual(&dilation, &probes)?.value,
            g.pullback_residual(&stretched, &probes)?.value,
        );
    }
    Ok(())
}
