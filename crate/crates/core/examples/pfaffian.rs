//! Pfaffians of random skew matrices: `Pf² = det`, and `Pf` is unchanged by
//! special-orthogonal changes of frame.

use affine_orth::frames::pfaffian;
use affine_orth::scenarios::random_special_orthogonal;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> affine_orth::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [2, 4, 6] {
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let m = &a - a.transpose();
        let pf = pfaffian(&m)?;
        let q = random_special_orthogonal(&mut rng, n);
        let rotated = q.transpose() * &m * &q;
        println!(
            "n = {n}: Pf = {pf:+.6}, Pf² − det = {:+.1e}, Pf(QᵀMQ) − Pf = {:+.1e}",
            pf * pf - m.determinant(),
            pfaffian(&rotated)? - pf
        );
    }
    Ok(())
}
