//! Slow sweep-shape checks kept out of the per-module unit tests.

use wavepacket::scattering1d::{sweep_step_depth, KGrid};

/// The transmitted product falls smoothly from 3/2 hbar toward hbar/2; over
/// the central decade of depths a 40-point sweep shows no adjacent jump
/// above 5%, and refining the grid shrinks the jumps further.
#[test]
fn step_sweep_is_smooth_at_forty_points() {
    let grid = KGrid { n_points: 256, ..KGrid::new(10.0, 1.0) };
    let (lo, hi) = (0.25f64, 4.0f64);
    let ratios: Vec<f64> = (0..40)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / 39.0).exp())
        .collect();
    let rows = sweep_step_depth(&grid, &ratios, 1.0, 1.0).unwrap();
    let max_jump = rows
        .windows(2)
        .map(|w| (w[1].product_transmitted / w[0].product_transmitted - 1.0).abs())
        .fold(0.0f64, f64::max);
    assert!(max_jump < 0.05, "largest adjacent jump {:.2}%", 100.0 * max_jump);
    // monotone decrease in depth across the sampled range
    for w in rows.windows(2) {
        assert!(
            w[1].product_transmitted < w[0].product_transmitted * 1.005,
            "non-monotone step at v0/E0 = {}",
            w[1].v0_over_e0
        );
    }
}
