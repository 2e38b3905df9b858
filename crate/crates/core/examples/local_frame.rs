//! On the chart `θ_i ∈ (ε, 2π − ε)` with log coordinates `x̃_i = log θ_i`,
//! the flat torus metric stays diagonal with entries `θ_i²`.

use affine_orth::scenarios::{log_chart_metric, verify_local_frame, LocalFrameParams, Tolerances};

fn main() -> affine_orth::Result<()> {
    for theta in [[1.0, 1.0], [2.0, 3.0], [0.5, 6.0]] {
        let m = log_chart_metric(&theta)?;
        println!("θ = {theta:?}: metric\n{m}");
    }
    let report = verify_local_frame(&LocalFrameParams::default(), &Tolerances::default())?;
    for c in &report.checks {
        println!("{:<20} {:e}", c.name, c.residual);
    }
    Ok(())
}
