//! Gaussian wave packets: construction, space-time evaluation, position and
//! momentum moments, and the phase-space completeness residual.
//!
//! The minimum packet is
//!
//! ```text
//! psi(x, 0) = (pi g^2)^(-1/4) exp(i p0 (x - x0)/hbar - (x - x0)^2 / (2 g^2))
//! ```
//!
//! with (dx)^2 = g^2/2 and (dp)^2 = hbar^2/(2 g^2), so dx*dp = hbar/2 for
//! every g. Nonminimum packets carry an extra Hermite factor H_m((x-x0)/g);
//! their momentum-space weight picks up the same factor in gamma*(k-k0),
//! since Hermite functions are Fourier eigenfunctions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    derivative_c6, hermite, second_derivative_c6, simpson_uniform, simpson_uniform_complex,
};

/// Parameters of a (possibly Hermite-modulated) Gaussian wave packet.
#[derive(Debug, Clone, Copy)]
pub struct PacketSpec {
    /// Center position.
    pub x0: f64,
    /// Central momentum.
    pub p0: f64,
    /// Spatial width parameter; (dx)^2 = gamma^2/2 for the minimum packet.
    pub gamma: f64,
    /// Hermite modulation order; 0 is the minimum packet.
    pub m_order: u32,
    /// Particle mass.
    pub mass: f64,
    /// Action constant of the active unit system.
    pub hbar: f64,
}

impl PacketSpec {
    pub fn minimum(x0: f64, p0: f64, gamma: f64, mass: f64, hbar: f64) -> Self {
        PacketSpec { x0, p0, gamma, m_order: 0, mass, hbar }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid("gamma", format!("must be > 0, got {}", self.gamma)));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::invalid("mass", format!("must be > 0, got {}", self.mass)));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::invalid("hbar", format!("must be > 0, got {}", self.hbar)));
        }
        if !self.x0.is_finite() || !self.p0.is_finite() {
            return Err(Error::invalid("x0/p0", "must be finite"));
        }
        Ok(())
    }

    /// Central wavenumber p0/hbar.
    pub fn k0(&self) -> f64 {
        self.p0 / self.hbar
    }

    /// Normalization (pi gamma^2)^(-1/4) / sqrt(2^m m!).
    pub fn norm_constant(&self) -> f64 {
        let n1 = (std::f64::consts::PI * self.gamma * self.gamma).powf(-0.25);
        let mut fact = 1.0;
        for k in 1..=self.m_order {
            fact *= k as f64;
        }
        n1 / (2f64.powi(self.m_order as i32) * fact).sqrt()
    }

    /// Standard deviation of the momentum-space density, sqrt(m + 1/2)*hbar/gamma.
    pub fn momentum_std(&self) -> f64 {
        (self.m_order as f64 + 0.5).sqrt() * self.hbar / self.gamma
    }

    /// Amplitude at (x, 0).
    fn amplitude_t0(&self, x: f64) -> Complex64 {
        let u = (x - self.x0) / self.gamma;
        let phase = Complex64::i() * self.p0 * (x - self.x0) / self.hbar;
        self.norm_constant()
            * hermite(self.m_order, u)
            * (phase - Complex64::new(0.5 * u * u, 0.0)).exp()
    }

    /// Momentum-space weight phi(k) such that
    /// psi(x, t) = (2 pi)^(-1/2) Int phi(k) exp(i k x - i E(k) t / hbar) dk.
    pub fn momentum_weight(&self, k: f64) -> Complex64 {
        let du = self.gamma * (k - self.k0());
        let im_pow = Complex64::i().powu(self.m_order);
        self.norm_constant()
            * self.gamma
            * hermite(self.m_order, du)
            * (-0.5 * du * du).exp()
            * im_pow.conj()
            * (-Complex64::i() * k * self.x0).exp()
    }
}

/// Position-sampled complex wave on a uniform grid.
#[derive(Debug, Clone)]
pub struct SampledWave {
    pub x_start: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
    pub time: f64,
}

impl SampledWave {
    pub fn new(x_start: f64, dx: f64, values: Vec<Complex64>, time: f64) -> Self {
        assert!(dx > 0.0 && values.len() >= 5);
        SampledWave { x_start, dx, values, time }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x_start + i as f64 * self.dx
    }

    pub fn x_end(&self) -> f64 {
        self.x_at(self.len() - 1)
    }

    /// Squared norm over the whole grid.
    pub fn norm_sq(&self) -> f64 {
        let density: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        simpson_uniform(&density, self.dx)
    }

    /// Inner product <self|other>; grids must coincide.
    pub fn inner(&self, other: &SampledWave) -> Complex64 {
        assert_eq!(self.len(), other.len());
        let vals: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .collect();
        simpson_uniform_complex(&vals, self.dx)
    }
}

/// Position/momentum moment summary of a sampled wave.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MomentReport {
    pub mean_x: f64,
    pub mean_p: f64,
    pub delta_x: f64,
    pub delta_p: f64,
    /// delta_x * delta_p
    pub product: f64,
    /// Squared norm inside the analyzed window.
    pub norm: f64,
}

/// Evaluate the packet amplitude at one space-time point.
///
/// At t = 0 the closed form is returned; otherwise the momentum integral is
/// taken by Simpson quadrature over the weight's support (8 standard
/// deviations), with the sample count scaled to the phase sweep of the
/// oscillatory factor.
pub fn evaluate_packet(spec: &PacketSpec, x: f64, t: f64) -> Result<Complex64> {
    spec.validate()?;
    if !x.is_finite() {
        return Err(Error::invalid("x", "must be finite"));
    }
    if !t.is_finite() {
        return Err(Error::invalid("t", "must be finite"));
    }
    if t == 0.0 {
        return Ok(spec.amplitude_t0(x));
    }
    let k0 = spec.k0();
    let k_std = (spec.m_order as f64 + 0.5).sqrt() / spec.gamma;
    let (k_lo, k_hi) = (k0 - 8.0 * k_std, k0 + 8.0 * k_std);
    let n = k_sample_count(spec, x, t, k_lo, k_hi);
    let h = (k_hi - k_lo) / n as f64;
    let vals: Vec<Complex64> = (0..=n)
        .map(|i| {
            let k = k_lo + i as f64 * h;
            let energy = spec.hbar * spec.hbar * k * k / (2.0 * spec.mass);
            spec.momentum_weight(k)
                * (Complex64::i() * (k * x - energy * t / spec.hbar)).exp()
        })
        .collect();
    Ok(simpson_uniform_complex(&vals, h) / (2.0 * std::f64::consts::PI).sqrt())
}

fn k_sample_count(spec: &PacketSpec, x: f64, t: f64, k_lo: f64, k_hi: f64) -> usize {
    // Bound on |d(phase)/dk| over the support.
    let k_abs = k_lo.abs().max(k_hi.abs());
    let rate = (x - spec.x0).abs() + spec.hbar * t.abs() * k_abs / spec.mass;
    let cycles = rate * (k_hi - k_lo) / (2.0 * std::f64::consts::PI);
    ((cycles * 24.0) as usize).clamp(2048, 2_000_000)
}

/// Sample a packet on `n + 1` uniform points of `[x_lo, x_hi]` at time `t`.
pub fn sample_packet(
    spec: &PacketSpec,
    x_lo: f64,
    x_hi: f64,
    n: usize,
    t: f64,
) -> Result<SampledWave> {
    spec.validate()?;
    assert!(x_hi > x_lo && n >= 8);
    let dx = (x_hi - x_lo) / n as f64;
    let values: Result<Vec<Complex64>> = (0..=n)
        .map(|i| evaluate_packet(spec, x_lo + i as f64 * dx, t))
        .collect();
    Ok(SampledWave::new(x_lo, dx, values?, t))
}

/// Grid that covers the packet out to `sigmas` standard deviations of the
/// freely evolved density at time `t`.
pub fn covering_grid(spec: &PacketSpec, t: f64, sigmas: f64, n: usize) -> (f64, f64, usize) {
    let center = spec.x0 + spec.p0 / spec.mass * t;
    let var0 = (spec.m_order as f64 + 0.5) * spec.gamma * spec.gamma;
    let vart = var0
        + (spec.momentum_std() * t / spec.mass).powi(2);
    let half = sigmas * vart.sqrt();
    (center - half, center + half, n)
}

/// Relative norm threshold below which a window is deemed empty.
pub const EMPTY_WINDOW_THRESHOLD: f64 = 1e-6;

/// Position and momentum moments over `window` (`None` = whole grid).
///
/// x-moments by direct quadrature of the density; p-moments through
/// <psi|(-i hbar d/dx)^n|psi> with 4th-order centered differences taken on
/// the full grid, then integrated over the window and normalized by the
/// in-window norm.
pub fn compute_moments(
    wave: &SampledWave,
    window: Option<(f64, f64)>,
    hbar: f64,
) -> Result<MomentReport> {
    let n = wave.len();
    let (i_lo, i_hi) = match window {
        None => (0, n - 1),
        Some((a, b)) => {
            if b <= a {
                return Err(Error::invalid("window", "upper edge must exceed lower edge"));
            }
            let i_lo = ((a - wave.x_start) / wave.dx).ceil().max(0.0) as usize;
            let i_hi_f = ((b - wave.x_start) / wave.dx).floor();
            if i_hi_f < 0.0 || i_lo >= n {
                return Err(Error::EmptyBranch("window does not intersect the grid".into()));
            }
            (i_lo, (i_hi_f as usize).min(n - 1))
        }
    };
    if i_hi - i_lo < 4 {
        return Err(Error::EmptyBranch("window covers fewer than 5 grid points".into()));
    }

    let density: Vec<f64> = wave.values.iter().map(|v| v.norm_sqr()).collect();
    let total = simpson_uniform(&density, wave.dx);
    let win_density = &density[i_lo..=i_hi];
    let norm_w = simpson_uniform(win_density, wave.dx);
    if !(norm_w > EMPTY_WINDOW_THRESHOLD * total) {
        return Err(Error::EmptyBranch(format!(
            "window norm {:.3e} below {:.0e} of total {:.3e}",
            norm_w, EMPTY_WINDOW_THRESHOLD, total
        )));
    }

    let xs: Vec<f64> = (i_lo..=i_hi).map(|i| wave.x_at(i)).collect();
    let wx: Vec<f64> = xs.iter().zip(win_density).map(|(x, d)| x * d).collect();
    let wxx: Vec<f64> = xs.iter().zip(win_density).map(|(x, d)| x * x * d).collect();
    let mean_x = simpson_uniform(&wx, wave.dx) / norm_w;
    let mean_xx = simpson_uniform(&wxx, wave.dx) / norm_w;
    let var_x = (mean_xx - mean_x * mean_x).max(0.0);

    let d1 = derivative_c6(&wave.values, wave.dx);
    let d2 = second_derivative_c6(&wave.values, wave.dx);
    let p_density: Vec<Complex64> = (i_lo..=i_hi)
        .map(|i| wave.values[i].conj() * d1[i] * Complex64::new(0.0, -hbar))
        .collect();
    let pp_density: Vec<Complex64> = (i_lo..=i_hi)
        .map(|i| wave.values[i].conj() * d2[i] * (-hbar * hbar))
        .collect();
    let mean_p = simpson_uniform_complex(&p_density, wave.dx).re / norm_w;
    let mean_pp = simpson_uniform_complex(&pp_density, wave.dx).re / norm_w;
    let var_p = (mean_pp - mean_p * mean_p).max(0.0);

    Ok(MomentReport {
        mean_x,
        mean_p,
        delta_x: var_x.sqrt(),
        delta_p: var_p.sqrt(),
        product: var_x.sqrt() * var_p.sqrt(),
        norm: norm_w,
    })
}

/// (P0, X0) quadrature specification for the completeness residual.
#[derive(Debug, Clone, Copy)]
pub struct PhaseGrid {
    pub p_lo: f64,
    pub p_hi: f64,
    pub n_p: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_x: usize,
    /// Width parameter of the coherent-state family; the resolution of the
    /// identity holds for any positive value.
    pub family_gamma: f64,
    pub hbar: f64,
}

impl PhaseGrid {
    /// Derive a covering phase grid from the moments of `f` and `g`.
    pub fn covering(
        f: &SampledWave,
        g: &SampledWave,
        family_gamma: f64,
        hbar: f64,
        n_p: usize,
        n_x: usize,
    ) -> Result<PhaseGrid> {
        let mf = compute_moments(f, None, hbar)?;
        let mg = compute_moments(g, None, hbar)?;
        let p_spread = mf.delta_p.max(mg.delta_p) + hbar / family_gamma;
        let x_spread = mf.delta_x.max(mg.delta_x) + family_gamma;
        Ok(PhaseGrid {
            p_lo: mf.mean_p.min(mg.mean_p) - 9.0 * p_spread,
            p_hi: mf.mean_p.max(mg.mean_p) + 9.0 * p_spread,
            n_p,
            x_lo: mf.mean_x.min(mg.mean_x) - 9.0 * x_spread,
            x_hi: mf.mean_x.max(mg.mean_x) + 9.0 * x_spread,
            n_x,
            family_gamma,
            hbar,
        })
    }
}

/// Overlap <P0,X0|g> of the coherent family member with a sampled wave.
fn coherent_overlap(grid: &PhaseGrid, p0: f64, x0: f64, g: &SampledWave) -> Complex64 {
    let n1 = (std::f64::consts::PI * grid.family_gamma * grid.family_gamma).powf(-0.25);
    let vals: Vec<Complex64> = (0..g.len())
        .map(|i| {
            let x = g.x_at(i);
            let u = (x - x0) / grid.family_gamma;
            let chi = n1
                * (Complex64::i() * p0 * (x - x0) / grid.hbar - Complex64::new(0.5 * u * u, 0.0))
                    .exp();
            chi.conj() * g.values[i]
        })
        .collect();
    simpson_uniform_complex(&vals, g.dx)
}

/// Residual of the coherent-state resolution of the identity:
///
/// ```text
/// Int dP0 dX0 / (2 pi hbar) <f|P0,X0><P0,X0|g>  -  <f|g>
/// ```
///
/// Returns the complex residual; callers report its magnitude. The phase
/// grid must cover both supports: the integrand is checked to have decayed
/// at the grid boundary.
pub fn completeness_residual(
    f: &SampledWave,
    g: &SampledWave,
    phase_grid: &PhaseGrid,
) -> Result<Complex64> {
    let pg = phase_grid;
    assert!(pg.n_p >= 8 && pg.n_x >= 8);
    let dp = (pg.p_hi - pg.p_lo) / pg.n_p as f64;
    let dxp = (pg.x_hi - pg.x_lo) / pg.n_x as f64;

    let mut max_interior: f64 = 0.0;
    let mut max_boundary: f64 = 0.0;
    let mut rows: Vec<Complex64> = Vec::with_capacity(pg.n_p + 1);
    for ip in 0..=pg.n_p {
        let p0 = pg.p_lo + ip as f64 * dp;
        let row: Vec<Complex64> = (0..=pg.n_x)
            .map(|ix| {
                let x0 = pg.x_lo + ix as f64 * dxp;
                let fg = coherent_overlap(pg, p0, x0, f).conj() * coherent_overlap(pg, p0, x0, g);
                let mag = fg.norm();
                if ip == 0 || ip == pg.n_p || ix == 0 || ix == pg.n_x {
                    max_boundary = max_boundary.max(mag);
                } else {
                    max_interior = max_interior.max(mag);
                }
                fg
            })
            .collect();
        rows.push(simpson_uniform_complex(&row, dxp));
    }
    if max_boundary > 1e-7 * max_interior.max(1e-300) {
        return Err(Error::Coverage(format!(
            "integrand at phase-grid boundary is {:.2e} of interior maximum",
            max_boundary / max_interior.max(1e-300)
        )));
    }
    let double = simpson_uniform_complex(&rows, dp) / (2.0 * std::f64::consts::PI * pg.hbar);
    Ok(double - f.inner(g))
}

/// Numerical dx*dp of the order-m Hermite-modulated packet. Independent of
/// gamma; grows with the modulation order.
pub fn hermite_uncertainty_product(m_order: u32, gamma: f64, hbar: f64) -> Result<f64> {
    if m_order > 8 {
        return Err(Error::invalid(
            "m_order",
            format!("quadrature accuracy bound is 8, got {m_order}"),
        ));
    }
    let spec = PacketSpec { x0: 0.0, p0: 0.0, gamma, m_order, mass: 1.0, hbar };
    let half_width = 8.0 * (m_order as f64 + 0.5).sqrt() * gamma;
    let wave = sample_packet(&spec, -half_width, half_width, 8192, 0.0)?;
    let report = compute_moments(&wave, None, hbar)?;
    Ok(report.product)
}

/// Variance of x for the freely evolving minimum packet:
/// gamma^2/2 + hbar^2 t^2 / (2 m^2 gamma^2).
pub fn free_minimum_variance(spec: &PacketSpec, t: f64) -> f64 {
    let g2 = spec.gamma * spec.gamma;
    0.5 * g2 + spec.hbar * spec.hbar * t * t / (2.0 * spec.mass * spec.mass * g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_spec() -> PacketSpec {
        PacketSpec::minimum(0.0, 0.0, 1.0, 1.0, 1.0)
    }

    #[test]
    fn center_amplitude_is_quarter_root_pi() {
        let spec = unit_spec();
        let v = evaluate_packet(&spec, 0.0, 0.0).unwrap();
        assert_relative_eq!(v.re, std::f64::consts::PI.powf(-0.25), max_relative = 1e-12);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn magnitude_symmetric_about_center() {
        let spec = PacketSpec::minimum(0.7, 3.1, 1.3, 1.0, 1.0);
        for d in [0.2, 0.9, 2.4] {
            let a = evaluate_packet(&spec, spec.x0 + d, 0.0).unwrap().norm();
            let b = evaluate_packet(&spec, spec.x0 - d, 0.0).unwrap().norm();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn nonfinite_input_rejected() {
        let spec = unit_spec();
        assert!(evaluate_packet(&spec, f64::NAN, 0.0).is_err());
        assert!(evaluate_packet(&spec, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form_at_small_t() {
        // Tiny but nonzero t forces the k-integral path; it must agree with
        // the t=0 closed form to the designed 1e-8 quadrature accuracy
        // (the 8-sigma support cutoff leaves e^-16 amplitude tails).
        let spec = PacketSpec::minimum(-1.0, 2.0, 0.8, 1.0, 1.0);
        for x in [-2.0, -1.0, 0.3] {
            let closed = evaluate_packet(&spec, x, 0.0).unwrap();
            let quad = evaluate_packet(&spec, x, 1e-12).unwrap();
            assert!((closed - quad).norm() < 2e-8);
        }
    }

    #[test]
    fn free_evolution_variance_matches_analytic() {
        let spec = PacketSpec::minimum(0.0, 2.0, 1.0, 1.0, 1.0);
        for t in [0.5, 2.0] {
            let (lo, hi, n) = covering_grid(&spec, t, 9.0, 4096);
            let wave = sample_packet(&spec, lo, hi, n, t).unwrap();
            let rep = compute_moments(&wave, None, 1.0).unwrap();
            let want = free_minimum_variance(&spec, t);
            assert_relative_eq!(rep.delta_x * rep.delta_x, want, max_relative = 1e-8);
        }
    }

    #[test]
    fn minimum_packet_product_is_half_hbar() {
        let spec = unit_spec();
        let wave = sample_packet(&spec, -8.0, 8.0, 4096, 0.0).unwrap();
        let rep = compute_moments(&wave, None, 1.0).unwrap();
        assert_relative_eq!(rep.product, 0.5, max_relative = 1e-9);
        assert_relative_eq!(rep.norm, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn mean_momentum_matches_p0() {
        let spec = PacketSpec::minimum(0.0, 5.0, 1.0, 1.0, 1.0);
        let wave = sample_packet(&spec, -8.0, 8.0, 4096, 0.0).unwrap();
        let rep = compute_moments(&wave, None, 1.0).unwrap();
        assert_relative_eq!(rep.mean_p, 5.0, max_relative = 1e-9);
    }

    #[test]
    fn first_hermite_order_triples_product() {
        let spec = PacketSpec { m_order: 1, ..unit_spec() };
        let wave = sample_packet(&spec, -10.0, 10.0, 8192, 0.0).unwrap();
        let rep = compute_moments(&wave, None, 1.0).unwrap();
        assert_relative_eq!(rep.product, 1.5, max_relative = 1e-6);
    }

    #[test]
    fn hermite_product_ladder() {
        assert_relative_eq!(hermite_uncertainty_product(0, 1.0, 1.0).unwrap(), 0.5, max_relative = 1e-8);
        assert_relative_eq!(hermite_uncertainty_product(1, 1.0, 1.0).unwrap(), 1.5, max_relative = 1e-6);
        assert_relative_eq!(hermite_uncertainty_product(2, 1.0, 1.0).unwrap(), 2.5, max_relative = 1e-6);
        assert!(hermite_uncertainty_product(9, 1.0, 1.0).is_err());
    }

    #[test]
    fn hermite_product_gamma_independent() {
        for m in [0u32, 2] {
            let base = hermite_uncertainty_product(m, 1.0, 1.0).unwrap();
            for gamma in [0.01, 0.1, 10.0, 100.0] {
                let p = hermite_uncertainty_product(m, gamma, 1.0).unwrap();
                assert_relative_eq!(p, base, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn empty_window_is_rejected() {
        let spec = unit_spec();
        let wave = sample_packet(&spec, -8.0, 8.0, 2048, 0.0).unwrap();
        let err = compute_moments(&wave, Some((7.0, 8.0)), 1.0).unwrap_err();
        assert!(matches!(err, Error::EmptyBranch(_)));
    }

    #[test]
    fn windowed_moments_match_full_for_contained_support() {
        let spec = unit_spec();
        let wave = sample_packet(&spec, -12.0, 12.0, 4096, 0.0).unwrap();
        let full = compute_moments(&wave, None, 1.0).unwrap();
        let windowed = compute_moments(&wave, Some((-9.0, 9.0)), 1.0).unwrap();
        assert_relative_eq!(full.product, windowed.product, max_relative = 1e-9);
    }

    #[test]
    fn completeness_resolves_identity_for_minimum_packet() {
        let spec = unit_spec();
        let wave = sample_packet(&spec, -8.0, 8.0, 512, 0.0).unwrap();
        let pg = PhaseGrid::covering(&wave, &wave, 1.0, 1.0, 96, 96).unwrap();
        let r = completeness_residual(&wave, &wave, &pg).unwrap();
        assert!(r.norm() < 1e-6, "residual {:.3e}", r.norm());
    }

    #[test]
    fn completeness_parity_zero_for_even_odd_pair() {
        let even = sample_packet(&unit_spec(), -9.0, 9.0, 512, 0.0).unwrap();
        let odd_spec = PacketSpec { m_order: 1, ..unit_spec() };
        let odd = sample_packet(&odd_spec, -9.0, 9.0, 512, 0.0).unwrap();
        let pg = PhaseGrid::covering(&even, &odd, 1.0, 1.0, 96, 96).unwrap();
        let r = completeness_residual(&even, &odd, &pg).unwrap();
        assert!(r.norm() < 1e-9, "residual {:.3e}", r.norm());
        assert!(even.inner(&odd).norm() < 1e-12);
    }

    #[test]
    fn completeness_for_displaced_pair() {
        let f_spec = PacketSpec::minimum(-1.5, 1.0, 1.0, 1.0, 1.0);
        let g_spec = PacketSpec::minimum(1.0, -0.5, 1.2, 1.0, 1.0);
        let f = sample_packet(&f_spec, -12.0, 12.0, 512, 0.0).unwrap();
        let g = sample_packet(&g_spec, -12.0, 12.0, 512, 0.0).unwrap();
        let pg = PhaseGrid::covering(&f, &g, 1.0, 1.0, 128, 128).unwrap();
        let r = completeness_residual(&f, &g, &pg).unwrap();
        assert!(r.norm() < 1e-6, "residual {:.3e}", r.norm());
    }

    #[test]
    fn completeness_rejects_undersized_phase_grid() {
        let spec = unit_spec();
        let wave = sample_packet(&spec, -8.0, 8.0, 512, 0.0).unwrap();
        let pg = PhaseGrid {
            p_lo: -1.0,
            p_hi: 1.0,
            n_p: 32,
            x_lo: -1.0,
            x_hi: 1.0,
            n_x: 32,
            family_gamma: 1.0,
            hbar: 1.0,
        };
        assert!(matches!(
            completeness_residual(&wave, &wave, &pg),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn completeness_residual_shrinks_under_refinement() {
        let spec = unit_spec();
        let wave = sample_packet(&spec, -8.0, 8.0, 384, 0.0).unwrap();
        let mut residuals = Vec::new();
        for n in [24usize, 48, 96] {
            let pg = PhaseGrid::covering(&wave, &wave, 1.0, 1.0, n, n).unwrap();
            residuals.push(completeness_residual(&wave, &wave, &pg).unwrap().norm());
        }
        assert!(
            residuals[2] <= residuals[0] * 1.05,
            "refinement did not reduce residual: {residuals:?}"
        );
    }

    #[test]
    fn free_evolution_preserves_norm_and_momentum() {
        let spec = PacketSpec::minimum(0.0, 3.0, 1.0, 1.0, 1.0);
        for t in [1.0, 4.0] {
            let (lo, hi, n) = covering_grid(&spec, t, 9.0, 4096);
            let wave = sample_packet(&spec, lo, hi, n, t).unwrap();
            let rep = compute_moments(&wave, None, 1.0).unwrap();
            assert_relative_eq!(rep.norm, 1.0, max_relative = 1e-9);
            assert_relative_eq!(rep.mean_p, 3.0, max_relative = 1e-9);
            assert_relative_eq!(rep.delta_p, (0.5f64).sqrt(), max_relative = 1e-9);
            assert_relative_eq!(rep.mean_x, spec.x0 + 3.0 * t, max_relative = 1e-8);
        }
    }
}
