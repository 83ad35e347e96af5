//! Momentum correlation functions for wave packets, two- and three-body
//! decays, two-body collisions, and the thermal statistical model with its
//! Gaussian-width fit.
//!
//! Weight functions are separable Gaussian amplitudes
//! `F(p) = N exp(-sum_i (p_i - c_i)^2 / (2 sigma_i^2))` normalized to
//! `Int |F|^2 = 1`. Thermal momenta are measured in units of k_B T (c = 1),
//! so every curve is temperature-scale free until the caller restores units.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, linear_fit, simpson_fn, simpson_uniform};

/// Separable Gaussian momentum-space weight, up to three axes.
#[derive(Debug, Clone)]
pub struct WeightFn {
    pub dim: usize,
    pub center: [f64; 3],
    pub sigma: [f64; 3],
}

impl WeightFn {
    pub fn isotropic(dim: usize, sigma: f64) -> Result<Self> {
        WeightFn::new(dim, [0.0; 3], [sigma; 3])
    }

    pub fn new(dim: usize, center: [f64; 3], sigma: [f64; 3]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::invalid("dim", format!("must be 1..=3, got {dim}")));
        }
        for &s in &sigma[..dim] {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::invalid("sigma", format!("must be > 0, got {s}")));
            }
        }
        Ok(WeightFn { dim, center, sigma })
    }

    /// Normalization so that Int |F|^2 d^dim p = 1.
    pub fn norm_constant(&self) -> f64 {
        self.sigma[..self.dim]
            .iter()
            .map(|s| (std::f64::consts::PI * s * s).powf(-0.25))
            .product()
    }

    /// Amplitude at momentum `p` (components beyond `dim` ignored).
    pub fn amplitude(&self, p: [f64; 3]) -> f64 {
        let mut arg = 0.0;
        for i in 0..self.dim {
            let d = (p[i] - self.center[i]) / self.sigma[i];
            arg += 0.5 * d * d;
        }
        self.norm_constant() * (-arg).exp()
    }

    fn is_isotropic_at_origin(&self) -> bool {
        let s0 = self.sigma[0];
        self.center[..self.dim].iter().all(|&c| c == 0.0)
            && self.sigma[..self.dim].iter().all(|&s| (s - s0).abs() < 1e-14 * s0)
    }
}

/// Occupancy statistics of a thermal species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    BoseEinstein,
    FermiDirac,
}

/// Single-particle dispersion used for occupancies and energy regulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispersion {
    /// epsilon = |p| (c = 1 momentum units).
    Massless,
    /// epsilon = p^2 / (2 m).
    NonRelativistic { mass: f64 },
}

impl Dispersion {
    pub fn energy(&self, p_abs: f64) -> f64 {
        match *self {
            Dispersion::Massless => p_abs,
            Dispersion::NonRelativistic { mass } => p_abs * p_abs / (2.0 * mass),
        }
    }

    fn gradient(&self, p_abs: f64) -> f64 {
        match *self {
            Dispersion::Massless => 1.0,
            Dispersion::NonRelativistic { mass } => p_abs / mass,
        }
    }
}

/// Temperature, chemical potential, statistics, and dispersion of one
/// thermal species. Temperatures in kelvin; `mu` in units of k_B T.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThermalState {
    pub temperature: f64,
    pub mu_over_kt: f64,
    pub statistics: Statistics,
    pub dispersion: Dispersion,
}

impl ThermalState {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0) {
            return Err(Error::invalid("temperature", "must be > 0"));
        }
        Ok(())
    }

    /// Occupancy at energy `eps` measured in units of k_B T.
    pub fn occupancy(&self, eps_over_kt: f64) -> Result<f64> {
        let x = eps_over_kt - self.mu_over_kt;
        match self.statistics {
            Statistics::BoseEinstein => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!(
                        "Bose-Einstein occupancy needs eps - mu > 0, got {x:.3e} k_B T"
                    )));
                }
                Ok(1.0 / (x.exp() - 1.0))
            }
            Statistics::FermiDirac => Ok(1.0 / (x.exp() + 1.0)),
        }
    }
}

/// Sampled, peak-normalized correlation curve with its fitted Gaussian width.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationCurve {
    pub delta_values: Vec<f64>,
    pub c_values: Vec<f64>,
    /// Gaussian width from the curve's second moment.
    pub fitted_width: f64,
    /// RMS deviation of the samples from the fitted Gaussian.
    pub fit_residual: f64,
    /// Width from least squares on log C, the cross-check estimator.
    pub fitted_width_log: f64,
    /// Set when the two estimators disagree by more than 5%.
    pub fit_warning: bool,
}

/// Packet momentum correlation C(p1, p2) = F*(p1) F(p2).
pub fn packet_correlation(weight: &WeightFn, p1: [f64; 3], p2: [f64; 3]) -> Complex64 {
    Complex64::new(weight.amplitude(p1) * weight.amplitude(p2), 0.0)
}

/// Energy regulator for the two-body decay correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EnergyRegulator {
    /// Replace the energy delta by a normalized Gaussian of this width,
    /// in the same energy units as the dispersion.
    Width(f64),
    /// No energy constraint (the three-body form).
    Off,
}

fn overlap_unregulated(weight: &WeightFn, delta: [f64; 3]) -> f64 {
    // Int F(p) F(p - delta): separable, one adapted Simpson per axis.
    let mut product = 1.0;
    for i in 0..weight.dim {
        let (c, s, d) = (weight.center[i], weight.sigma[i], delta[i]);
        let mid = c - 0.5 * d;
        let half = 8.0 * s / std::f64::consts::SQRT_2 + 0.75 * d.abs();
        let n1 = (std::f64::consts::PI * s * s).powf(-0.25);
        let f = |p: f64| {
            let u = (p - c) / s;
            let v = (p - d - c) / s;
            n1 * n1 * (-0.5 * (u * u + v * v)).exp()
        };
        product *= simpson_fn(f, mid - half, mid + half, 512);
    }
    product
}

/// Gaussian-regulated shell integral for an isotropic origin-centered
/// source: radial nodes follow the energy shell, polar nodes the second
/// shell constraint.
fn overlap_regulated(
    weight: &WeightFn,
    delta: [f64; 3],
    eps_e: f64,
    dispersion: Dispersion,
) -> Result<f64> {
    if weight.dim != 3 || !weight.is_isotropic_at_origin() {
        return Err(Error::invalid(
            "weight",
            "the energy regulator needs an isotropic 3D source centered at the origin",
        ));
    }
    let sigma = weight.sigma[0];
    let d_abs = (delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2]).sqrt();
    // reference energy: the source's central energy scale
    let p_ref = (1.5f64).sqrt() * sigma; // rms momentum of |F|^2
    let e_ref = dispersion.energy(p_ref);
    if eps_e < 1e-9 * e_ref.max(dispersion.energy(sigma)) {
        return Err(Error::Numerical(format!(
            "energy regulator width {eps_e:.3e} too narrow to resolve"
        )));
    }
    let g = |e: f64| {
        let z = (e - e_ref) / eps_e;
        (-0.5 * z * z).exp() / (eps_e * (2.0 * std::f64::consts::PI).sqrt())
    };
    let n1 = weight.norm_constant();
    let amp = |p2: f64| n1 * (-0.5 * p2 / (sigma * sigma)).exp();

    // radial support: envelope cut with the first energy shell
    let r_env = 10.0 * sigma + d_abs;
    let shell_half = {
        // invert |E(r) - e_ref| = 8 eps_e around p_ref
        let grad = dispersion.gradient(p_ref).max(1e-300);
        8.0 * eps_e / grad
    };
    let r_lo = (p_ref - shell_half).max(0.0);
    let r_hi = (p_ref + shell_half).min(r_env);
    if r_hi <= r_lo {
        return Ok(0.0);
    }
    let (r_nodes, r_weights) = gauss_legendre(96);
    let (u_nodes, u_weights) = gauss_legendre(96);
    let mut total = 0.0;
    for (rn, rw) in r_nodes.iter().zip(&r_weights) {
        let r = 0.5 * (r_lo + r_hi) + 0.5 * (r_hi - r_lo) * rn;
        let g1 = g(dispersion.energy(r));
        // second shell constrains u = cos(theta): |p - delta| near p_ref
        let (u_lo, u_hi) = if d_abs < 1e-12 * sigma.max(1.0) {
            (-1.0, 1.0)
        } else {
            // |p-d|^2 = r^2 + d^2 - 2 r d u; target |p-d| in p_ref +- shell
            let q_lo = (p_ref - shell_half).max(0.0);
            let q_hi = p_ref + shell_half;
            let u_from_q = |q: f64| (r * r + d_abs * d_abs - q * q) / (2.0 * r * d_abs);
            let (a, b) = (u_from_q(q_hi), u_from_q(q_lo));
            (a.max(-1.0).min(1.0), b.max(-1.0).min(1.0))
        };
        if u_hi <= u_lo {
            continue;
        }
        let mut inner = 0.0;
        for (un, uw) in u_nodes.iter().zip(&u_weights) {
            let u = 0.5 * (u_lo + u_hi) + 0.5 * (u_hi - u_lo) * un;
            let q2 = r * r + d_abs * d_abs - 2.0 * r * d_abs * u;
            let q = q2.max(0.0).sqrt();
            inner += uw * amp(r * r) * amp(q2) * g1 * g(dispersion.energy(q));
        }
        inner *= 0.5 * (u_hi - u_lo);
        total += rw * r * r * inner;
    }
    total *= 0.5 * (r_hi - r_lo) * 2.0 * std::f64::consts::PI;
    Ok(total)
}

/// Two-body decay correlation: the overlap of the parent weight with its
/// shifted self, with squared energy deltas regularized by normalized
/// Gaussians of width `eps_e`.
pub fn decay_correlation_2body(
    weight: &WeightFn,
    delta: [f64; 3],
    regulator: EnergyRegulator,
    dispersion: Dispersion,
) -> Result<f64> {
    match regulator {
        EnergyRegulator::Off => Ok(overlap_unregulated(weight, delta)),
        EnergyRegulator::Width(eps) => {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::invalid("eps_e", format!("must be > 0, got {eps}")));
            }
            overlap_regulated(weight, delta, eps, dispersion)
        }
    }
}

/// Three-body decay correlation: the same overlap with no residual energy
/// constraint.
pub fn decay_correlation_3body(weight: &WeightFn, delta: [f64; 3]) -> f64 {
    overlap_unregulated(weight, delta)
}

/// Two-body collision correlation: with both incoming packets independent,
/// the shift distributes over the pair, so C is the convolution of the two
/// single-packet overlaps. Separability makes that a per-axis 1D
/// convolution.
pub fn collision_correlation(
    weight_a: &WeightFn,
    weight_b: &WeightFn,
    delta: [f64; 3],
) -> Result<f64> {
    if weight_a.dim != weight_b.dim {
        return Err(Error::invalid("weight_b", "dimensions of the two sources must match"));
    }
    let mut product = 1.0;
    for i in 0..weight_a.dim {
        let oa = axis_overlap(weight_a, i);
        let ob = axis_overlap(weight_b, i);
        let d = delta[i];
        // Both axis overlaps are near-Gaussian with widths sqrt(2) sigma
        // centered at 0; their product concentrates at the
        // precision-weighted center, which fixes the grid.
        let wa = std::f64::consts::SQRT_2 * weight_a.sigma[i];
        let wb = std::f64::consts::SQRT_2 * weight_b.sigma[i];
        let q_star = d * wa * wa / (wa * wa + wb * wb);
        let w_star = wa * wb / (wa * wa + wb * wb).sqrt();
        let half = 10.0 * w_star;
        let f = |q: f64| oa(q) * ob(d - q);
        product *= simpson_fn(f, q_star - half, q_star + half, 768);
    }
    Ok(product)
}

/// One-axis overlap q -> Int F_ax(p) F_ax(p - q) dp as a closure over
/// Simpson quadrature.
fn axis_overlap(weight: &WeightFn, axis: usize) -> impl Fn(f64) -> f64 + '_ {
    let (c, s) = (weight.center[axis], weight.sigma[axis]);
    let n1 = (std::f64::consts::PI * s * s).powf(-0.25);
    move |q: f64| {
        let mid = c - 0.5 * q;
        let half = 8.0 * s / std::f64::consts::SQRT_2 + 0.75 * q.abs();
        simpson_fn(
            |p: f64| {
                let u = (p - c) / s;
                let v = (p - q - c) / s;
                n1 * n1 * (-0.5 * (u * u + v * v)).exp()
            },
            mid - half,
            mid + half,
            384,
        )
    }
}

/// Thermal pair kernel
/// `G(P) = Int d^3 k sqrt(N_BE(eps_ph(k))) sqrt(N_FD(eps_el(|P - k|)))`
/// with momenta in units of k_B T (c = 1). Isotropic: depends on |P| only.
pub fn thermal_kernel(
    p: [f64; 3],
    photon: &ThermalState,
    electron: &ThermalState,
    radial_cutoff: f64,
) -> Result<f64> {
    photon.validate()?;
    electron.validate()?;
    if !(radial_cutoff > 1.0) {
        return Err(Error::invalid("radial_cutoff", "must exceed 1 k_B T"));
    }
    let p_abs = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    thermal_kernel_radial(p_abs, photon, electron, radial_cutoff)
}

fn thermal_kernel_radial(
    p_abs: f64,
    photon: &ThermalState,
    electron: &ThermalState,
    radial_cutoff: f64,
) -> Result<f64> {
    let (r_nodes, r_weights) = gauss_legendre(48);
    let (u_nodes, u_weights) = gauss_legendre(32);
    let mut total = 0.0;
    for (rn, rw) in r_nodes.iter().zip(&r_weights) {
        let k = 0.5 * radial_cutoff * (rn + 1.0);
        let eps_ph = photon.dispersion.energy(k);
        let bose = photon.occupancy(eps_ph)?.max(0.0).sqrt();
        let mut inner = 0.0;
        for (un, uw) in u_nodes.iter().zip(&u_weights) {
            let q2 = p_abs * p_abs + k * k - 2.0 * p_abs * k * un;
            let q = q2.max(0.0).sqrt();
            let eps_el = electron.dispersion.energy(q);
            inner += uw * electron.occupancy(eps_el)?.max(0.0).sqrt();
        }
        total += rw * k * k * bose * inner;
    }
    Ok(total * 0.5 * radial_cutoff * 2.0 * std::f64::consts::PI)
}

/// Default closure of the statistical model: massless photons and electrons
/// at zero chemical potential.
pub fn default_thermal_pair(temperature: f64) -> (ThermalState, ThermalState) {
    (
        ThermalState {
            temperature,
            mu_over_kt: 0.0,
            statistics: Statistics::BoseEinstein,
            dispersion: Dispersion::Massless,
        },
        ThermalState {
            temperature,
            mu_over_kt: 0.0,
            statistics: Statistics::FermiDirac,
            dispersion: Dispersion::Massless,
        },
    )
}

/// Photon momentum correlation of the statistical model, sampled against
/// `|delta|` (units of k_B T) around a fixed electron momentum `p1` and
/// fitted with a Gaussian.
///
/// The sampling direction is the z axis; the curve is invariant under rigid
/// rotations of the geometry because the kernel is isotropic.
pub fn photon_correlation_curve(
    photon: &ThermalState,
    electron: &ThermalState,
    p1: [f64; 3],
    delta_list: &[f64],
    radial_cutoff: f64,
) -> Result<CorrelationCurve> {
    if delta_list.len() < 4 {
        return Err(Error::invalid("delta_list", "need at least 4 samples"));
    }
    let samples: Vec<f64> = delta_list
        .iter()
        .map(|&d| {
            let shifted = [p1[0], p1[1], p1[2] + d];
            thermal_kernel(shifted, photon, electron, radial_cutoff)
        })
        .collect::<Result<Vec<_>>>()?;
    let reference = thermal_kernel(p1, photon, electron, radial_cutoff)?;
    let peak = samples.iter().cloned().fold(reference, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Numerical("thermal kernel vanished on all samples".into()));
    }
    let c_values: Vec<f64> = samples.iter().map(|s| s / peak).collect();
    fit_gaussian_curve(delta_list.to_vec(), c_values)
}

/// Second-moment width with a log-space least-squares cross-check.
pub fn fit_gaussian_curve(delta_values: Vec<f64>, c_values: Vec<f64>) -> Result<CorrelationCurve> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (&d, &c) in delta_values.iter().zip(&c_values) {
        num += c * d * d;
        den += c;
    }
    if !(den > 0.0) {
        return Err(Error::Numerical("correlation curve has no mass".into()));
    }
    let width_m2 = (num / den).sqrt();

    // least squares on ln c = a - delta^2 / (2 w^2), ignoring the far tail
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&d, &c) in delta_values.iter().zip(&c_values) {
        if c > 1e-3 {
            xs.push(d * d);
            ys.push(c.ln());
        }
    }
    let (a0, slope) = linear_fit(&xs, &ys);
    let width_log = if slope < 0.0 { (-0.5 / slope).sqrt() } else { f64::INFINITY };

    let mut residual = 0.0;
    for (&d, &c) in delta_values.iter().zip(&c_values) {
        let model = a0.exp() * (-0.5 * d * d / (width_log * width_log)).exp();
        residual += (c - model) * (c - model);
    }
    let fit_residual = (residual / c_values.len() as f64).sqrt();
    let fit_warning = (width_log - width_m2).abs() > 0.05 * width_m2;

    Ok(CorrelationCurve {
        delta_values,
        c_values,
        fitted_width: width_m2,
        fit_residual,
        fitted_width_log: width_log,
        fit_warning,
    })
}

/// Coherent-state weight g(p, X) = sqrt(n(eps(p))) exp(-i p.X / hbar).
pub fn statistical_weight(
    p: [f64; 3],
    state: &ThermalState,
    x: [f64; 3],
    hbar: f64,
) -> Result<Complex64> {
    state.validate()?;
    let p_abs = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let occupancy = state.occupancy(state.dispersion.energy(p_abs))?;
    let phase = -(p[0] * x[0] + p[1] * x[1] + p[2] * x[2]) / hbar;
    Ok(occupancy.sqrt() * Complex64::new(0.0, phase).exp())
}

/// Root-sum-square accumulation of independent momentum spreads.
pub fn total_momentum_spread(sigma_list: &[f64]) -> Result<f64> {
    if sigma_list.is_empty() {
        return Err(Error::invalid("sigma_list", "need at least one spread"));
    }
    for &s in sigma_list {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::invalid("sigma_list", format!("spreads must be >= 0, got {s}")));
        }
    }
    Ok(sigma_list.iter().map(|s| s * s).sum::<f64>().sqrt())
}

/// Numeric check of the Gaussian-product decomposition: the total-momentum
/// marginal of `n` equal Gaussians, built by iterated convolution, has
/// standard deviation sqrt(n) sigma. Returns the measured marginal width.
pub fn gaussian_product_marginal_width(n: usize, sigma: f64) -> Result<f64> {
    if n == 0 || !(sigma > 0.0) {
        return Err(Error::invalid("n/sigma", "need n >= 1 and sigma > 0"));
    }
    let expect = (n as f64).sqrt() * sigma;
    let half = 10.0 * expect + 10.0 * sigma;
    let m = 4096usize;
    let h = 2.0 * half / m as f64;
    let xs: Vec<f64> = (0..=m).map(|i| -half + i as f64 * h).collect();
    let gauss: Vec<f64> = xs
        .iter()
        .map(|&x| (-0.5 * x * x / (sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt()))
        .collect();

    // convolution exponentiation by binary powers
    let conv = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let zero_idx = m / 2;
        (0..=m)
            .map(|i| {
                // (a * b)(x_i) = Int a(y) b(x_i - y) dy on the common grid
                let vals: Vec<f64> = (0..=m)
                    .map(|j| {
                        let k = i + zero_idx;
                        if k >= j && k - j <= m {
                            a[j] * b[k - j]
                        } else {
                            0.0
                        }
                    })
                    .collect();
                simpson_uniform(&vals, h)
            })
            .collect()
    };

    let mut result: Option<Vec<f64>> = None;
    let mut power = gauss.clone();
    let mut remaining = n;
    while remaining > 0 {
        if remaining & 1 == 1 {
            result = Some(match result {
                None => power.clone(),
                Some(r) => conv(&r, &power),
            });
        }
        remaining >>= 1;
        if remaining > 0 {
            power = conv(&power, &power);
        }
    }
    let marginal = result.unwrap();
    let norm = simpson_uniform(&marginal, h);
    let wx: Vec<f64> = marginal.iter().zip(&xs).map(|(f, x)| f * x).collect();
    let wxx: Vec<f64> = marginal.iter().zip(&xs).map(|(f, x)| f * x * x).collect();
    let mean = simpson_uniform(&wx, h) / norm;
    let var = simpson_uniform(&wxx, h) / norm - mean * mean;
    Ok(var.sqrt())
}
