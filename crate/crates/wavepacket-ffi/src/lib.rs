//! C ABI for the wavepacket toolkit.
//!
//! Every function returns a [`WpStatus`] code and writes results through
//! out-pointers; sweep tables and correlation curves come back as opaque
//! handles with accessor and free functions. Panics never cross the
//! boundary; they surface as `WP_STATUS_NUMERICAL`.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use wavepacket::correlations::{
    self, default_thermal_pair, Dispersion, EnergyRegulator, WeightFn,
};
use wavepacket::error::Error;
use wavepacket::medium;
use wavepacket::packets::{compute_moments, covering_grid, sample_packet, PacketSpec};
use wavepacket::scattering1d::{
    barrier_amplitudes, branch_uncertainty_product, step_amplitudes, sweep_barrier_width,
    sweep_step_depth, BarrierPotential, Branch, KGrid, PotentialKind, StepPotential, WaistMode,
};
use wavepacket::transforms::{
    add_potential_nonrel, add_potential_rel, cross_interface, lorentz_boost, scale_transform,
    InterfaceSpec, WidthState,
};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpStatus {
    Ok = 0,
    InvalidArgument = 1,
    DomainError = 2,
    Numerical = 3,
    NullPointer = 4,
}

fn status_of(err: &Error) -> WpStatus {
    match err {
        Error::InvalidArgument { .. } => WpStatus::InvalidArgument,
        Error::Domain(_) => WpStatus::DomainError,
        Error::EmptyBranch(_) | Error::Coverage(_) | Error::Numerical(_) => WpStatus::Numerical,
    }
}

/// Run a fallible closure behind the FFI boundary.
fn guarded<F: FnOnce() -> Result<(), WpStatus>>(f: F) -> WpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WpStatus::Ok,
        Ok(Err(code)) => code,
        Err(_) => WpStatus::Numerical,
    }
}

macro_rules! out_ref {
    ($ptr:expr) => {
        match unsafe { $ptr.as_mut() } {
            Some(r) => r,
            None => return WpStatus::NullPointer,
        }
    };
}

/// Position/momentum moment summary.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WpMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub delta_x: f64,
    pub delta_p: f64,
    pub product: f64,
    pub norm: f64,
}

/// Complex scattering amplitudes of one stationary solution.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WpScatterSolution {
    pub k: f64,
    pub k_prime_re: f64,
    pub k_prime_im: f64,
    pub b_minus_re: f64,
    pub b_minus_im: f64,
    pub a_plus_re: f64,
    pub a_plus_im: f64,
    pub a_minus_re: f64,
    pub a_minus_im: f64,
    pub c_plus_re: f64,
    pub c_plus_im: f64,
    pub boundary_residual: f64,
}

/// Width-state bundle for the transformation maps.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WpWidthState {
    pub p0_l: f64,
    pub delta_p_l: f64,
    pub delta_p_t: f64,
    pub delta_x_l: f64,
    pub delta_x_t: f64,
    pub mass: f64,
    pub energy: f64,
}

impl From<WidthState> for WpWidthState {
    fn from(s: WidthState) -> Self {
        WpWidthState {
            p0_l: s.p0_l,
            delta_p_l: s.delta_p_l,
            delta_p_t: s.delta_p_t,
            delta_x_l: s.delta_x_l,
            delta_x_t: s.delta_x_t,
            mass: s.mass,
            energy: s.energy,
        }
    }
}

impl From<WpWidthState> for WidthState {
    fn from(s: WpWidthState) -> Self {
        WidthState {
            p0_l: s.p0_l,
            delta_p_l: s.delta_p_l,
            delta_p_t: s.delta_p_t,
            delta_x_l: s.delta_x_l,
            delta_x_t: s.delta_x_t,
            mass: s.mass,
            energy: s.energy,
        }
    }
}

/// Mean-free-path coherence parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WpCoherence {
    pub l: f64,
    pub gamma_packet: f64,
    pub delta_p: f64,
    pub delta_e: f64,
    pub tau: f64,
}

/// Branch selector for branch products: 0 incident, 1 reflected,
/// 2 transmitted.
pub const WP_BRANCH_INCIDENT: i32 = 0;
pub const WP_BRANCH_REFLECTED: i32 = 1;
pub const WP_BRANCH_TRANSMITTED: i32 = 2;

/// Waist mode: 0 = time minimum, 1 = fixed distance past the boundary.
pub const WP_WAIST_TIME_MINIMUM: i32 = 0;
pub const WP_WAIST_FIXED_DISTANCE: i32 = 1;

/// Opaque numeric table (sweeps, correlation curves).
pub struct WpTable {
    columns: usize,
    values: Vec<f64>,
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn wp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn wp_status_message(status: WpStatus) -> *const c_char {
    let msg: &'static str = match status {
        WpStatus::Ok => "ok\0",
        WpStatus::InvalidArgument => "invalid argument\0",
        WpStatus::DomainError => "domain error\0",
        WpStatus::Numerical => "numerical failure\0",
        WpStatus::NullPointer => "null pointer\0",
    };
    msg.as_ptr() as *const c_char
}

/// Moments of a (possibly Hermite-modulated) Gaussian packet at time `t`.
///
/// # Safety
/// `out` must point to a writable `WpMoments`.
#[no_mangle]
pub unsafe extern "C" fn wp_packet_moments(
    gamma: f64,
    p0: f64,
    x0: f64,
    m_order: u32,
    mass: f64,
    hbar: f64,
    t: f64,
    out: *mut WpMoments,
) -> WpStatus {
    let out = out_ref!(out);
    guarded(|| {
        let spec = PacketSpec { x0, p0, gamma, m_order, mass, hbar };
        let (lo, hi, n) = covering_grid(&spec, t, 9.0, 4096);
        let wave = sample_packet(&spec, lo, hi, n, t).map_err(|e| status_of(&e))?;
        let rep = compute_moments(&wave, None, hbar).map_err(|e| status_of(&e))?;
        *out = WpMoments {
            mean_x: rep.mean_x,
            mean_p: rep.mean_p,
            delta_x: rep.delta_x,
            delta_p: rep.delta_p,
            product: rep.product,
            norm: rep.norm,
        };
        Ok(())
    })
}

/// Numerical dx*dp of the order-m Hermite packet.
///
/// # Safety
/// `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn wp_hermite_uncertainty_product(
    m_order: u32,
    gamma: f64,
    hbar: f64,
    out: *mut f64,
) -> WpStatus {
    let out = out_ref!(out);
    guarded(|| {
        *out = wavepacket::packets::hermite_uncertainty_product(m_order, gamma, hbar)
            .map_err(|e| status_of(&e))?;
        Ok(())
    })
}

/// Step amplitudes at incident wavenumber `k`; the step offset `v0` sits on
/// the incident side.
///
/// # Safety
/// `out` must point to a writable `WpScatterSolution`.
#[no_mangle]
pub unsafe extern "C" fn wp_step_amplitudes(
    k: f64,
    v0: f64,
    mass: f64,
    hbar: f64,
    out: *mut WpScatterSolution,
) -> WpStatus {
    let out = out_ref!(out);
    guarded(|| {
        let sol = step_amplitudes(k, &StepPotential { v0 }, mass, hbar).map_err(|e| status_of(&e))?;
        *out = convert_solution(&sol);
        Ok(())
    })
}

/// Barrier amplitudes at total energy `energy` for the well of depth `v0`
/// and width `a`.
///
/// # Safety
/// `out` must point to a writable `WpScatterSolution`.
#[no_mangle]
pub unsafe extern "C" fn wp_barrier_amplitudes(
    energy: f64,
    v0: f64,
    a: f64,
    mass: f64,
    hbar: f64,
    out: *mut WpScatterSolution,
) -> WpStatus {
    let out = out_ref!(out);
    guarded(|| {
        let sol = barrier_amplitudes(energy, &BarrierPotential { v0, a }, mass, hbar)
            .map_err(|e| status_of(&e))?;
        *out = convert_solution(&sol);
        Ok(())
    })
}

fn convert_solution(sol: &wavepacket::scattering1d::ScatterSolution) -> WpScatterSolution {
    WpScatterSolution {
        k: sol.k,
        k_prime_re: sol.k_prime.re,
        k_prime_im: sol.k_prime.im,
        b_minus_re: sol.b_minus.re,
        b_minus_im: sol.b_minus.im,
        a_plus_re: sol.a_plus.re,
        a_plus_im: sol.a_plus.im,
        a_minus_re: sol.a_minus.re,
        a_minus_im: sol.a_minus.im,
        c_plus_re: sol.c_plus.re,
        c_plus_im: sol.c_plus.im,
        boundary_residual: sol.boundary_residual,
    }
}

fn parse_branch(branch: i32) -> Result<Branch, WpStatus> {
    match branch {
        WP_BRANCH_INCIDENT => Ok(Branch::Incident),
        WP_BRANCH_REFLECTED => Ok(Branch::Reflected),
        WP_BRANCH_TRANSMITTED => Ok(Branch::Transmitted),
        _ => Err(WpStatus::InvalidArgument),
    }
}

fn parse_mode(mode: i32, distance: f64) -> Result<WaistMode, WpStatus> {
    match mode {
        WP_WAIST_TIME_MINIMUM => Ok(WaistMode::TimeMinimum),
        WP_WAIST_FIXED_DISTANCE => Ok(WaistMode::FixedTime { distance }),
        _ => Err(WpStatus::InvalidArgument),
    }
}

/// Uncertainty product of one scattering branch for a step potential.
/// `mode` selects the waist convention (`WP_WAIST_*`).
///
/// # Safety
/// The three out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn wp_step_branch_product(
    k0: f64,
    sigma_k: f64,
    n_points: usize,
    v0: f64,
    branch: i32,
    mode: i32,
    distance: f64,
    mass: f64,
    hbar: f64,
    out_delta_x: *mut f64,
    out_delta_p: *mut f64,
    out_product: *mut f64,
) -> WpStatus {
    let dx = out_ref!(out_delta_x);
    let dp = out_ref!(out_delta_p);
    let pr = out_ref!(out_product);
    guarded(|| {
        let grid = KGrid { k0, sigma_k, n_points, cutoff_sigmas: 6.0 };
        let pot = PotentialKind::Step(StepPotential { v0 });
        let product = branch_uncertainty_product(
            &grid,
            &pot,
            parse_branch(branch)?,
            parse_mode(mode, distance)?,
            mass,
            hbar,
        )
        .map_err(|e| status_of(&e))?;
        *dx = product.delta_x;
        *dp = product.delta_p;
        *pr = product.product;
        Ok(())
    })
}

/// Step-depth sweep; returns an opaque 3-column table
/// (v0_over_e0, product_reflected, product_transmitted), products in
/// units of hbar/2.
///
/// # Safety
/// `ratios` must point to `n_ratios` readable f64; `out` receives an owned
/// handle that must be released with [`wp_table_free`].
#[no_mangle]
pub unsafe extern "C" fn wp_sweep_step_depth(
    k0: f64,
    sigma_k: f64,
    n_points: usize,
    ratios: *const f64,
    n_ratios: usize,
    mass: f64,
    hbar: f64,
    out: *mut *mut WpTable,
) -> WpStatus {
    let out = out_ref!(out);
    if ratios.is_null() {
        return WpStatus::NullPointer;
    }
    let ratios = unsafe { std::slice::from_raw_parts(ratios, n_ratios) };
    guarded(|| {
        let grid = KGrid { k0, sigma_k, n_points, cutoff_sigmas: 6.0 };
        let rows = sweep_step_depth(&grid, ratios, mass, hbar).map_err(|e| status_of(&e))?;
        let mut values = Vec::with_capacity(rows.len() * 3);
        for r in rows {
            values.extend_from_slice(&[r.v0_over_e0, r.product_reflected, r.product_transmitted]);
        }
        *out = Box::into_raw(Box::new(WpTable { columns: 3, values }));
        Ok(())
    })
}

/// Barrier-width sweep; 3-column table (a, product_reflected,
/// product_transmitted), products in units of hbar/2.
///
/// # Safety
/// `widths` must point to `n_widths` readable f64; `out` receives an owned
/// handle that must be released with [`wp_table_free`].
#[no_mangle]
pub unsafe extern "C" fn wp_sweep_barrier_width(
    k0: f64,
    sigma_k: f64,
    n_points: usize,
    v0: f64,
    widths: *const f64,
    n_widths: usize,
    mass: f64,
    hbar: f64,
    out: *mut *mut WpTable,
) -> WpStatus {
    let out = out_ref!(out);
    if widths.is_null() {
        return WpStatus::NullPointer;
    }
    let widths = unsafe { std::slice::from_raw_parts(widths, n_widths) };
    guarded(|| {
        let grid = KGrid { k0, sigma_k, n_points, cutoff_sigmas: 6.0 };
        let rows = sweep_barrier_width(&grid, v0, widths, mass, hbar).map_err(|e| status_of(&e))?;
        let mut values = Vec::with_capacity(rows.len() * 3);
        for r in rows {
            values.extend_from_slice(&[r.a, r.product_reflected, r.product_transmitted]);
        }
        *out = Box::into_raw(Box::new(WpTable { columns: 3, values }));
        Ok(())
    })
}

/// Number of rows in a table handle.
///
/// # Safety
/// `table` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn wp_table_rows(table: *const WpTable) -> usize {
    match unsafe { table.as_ref() } {
        Some(t) => t.values.len() / t.columns,
        None => 0,
    }
}

/// Number of columns in a table handle.
///
/// # Safety
/// `table` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn wp_table_columns(table: *const WpTable) -> usize {
    match unsafe { table.as_ref() } {
        Some(t) => t.columns,
        None => 0,
    }
}

/// Fetch one cell of a table handle.
///
/// # Safety
/// `table` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wp_table_get(
    table: *const WpTable,
    row: usize,
    column: usize,
    out: *mut f64,
) -> WpStatus {
    let out = out_ref!(out);
    let Some(t) = (unsafe { table.as_ref() }) else {
        return WpStatus::NullPointer;
    };
    let idx = row * t.columns + column;
    if column >= t.columns || idx >= t.values.len() {
        return WpStatus::InvalidArgument;
    }
    *out = t.values[idx];
    WpStatus::Ok
}

/// Release a table handle. Passing NULL is a no-op.
///
/// # Safety
/// `table` must be NULL or an owned handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn wp_table_free(table: *mut WpTable) {
    if !table.is_null() {
        drop(unsafe { Box::from_raw(table) });
    }
}

/// Thomson cross section in m^2.
#[no_mangle]
pub extern "C" fn wp_sigma_thomson() -> f64 {
    medium::sigma_thomson()
}

/// Rutherford cross section in m^2.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wp_sigma_rutherford(
    temperature: f64,
    coulomb_log: f64,
    out: *mut f64,
) -> WpStatus {
    let out = out_ref!(out);
    guarded(|| {
        *out = medium::sigma_rutherford(temperature, coulomb_log).map_err(|e| status_of(&e))?;
        Ok(())
    })
}

/// Mean free path 1/(sigma n).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wp_mean_free_path(sigma: f64, n: f64, out: *mut f64) -> WpStatus {
    let out = out_ref!(out);
    guarded(|| {
        *out = medium::mean_free_path(sigma, n).map_err(|e| status_of(&e))?;
        Ok(())
    })
}

/// Coherence parameters from a mean free path and speed.
///
/// # Safety
/// `out` must point to a writable `WpCoherence`.
#[no_mangle]
pub unsafe extern "C" fn wp_coherence_from_path(
    l: f64,
    v: f64,
    hbar: f64,
    out: *mut WpCoherence,
) -> WpStatus {
    let out = out_ref!(out);
    guarded(|| {
        let r = medium::coherence_from_path(l, v, hbar).map_err(|e| status_of(&e))?;
        *out = WpCoherence {
            l: r.l,
            gamma_packet: r.gamma_packet,
            delta_p: r.delta_p,
            delta_e: r.delta_e,
            tau: r.tau,
        };
        Ok(())
    })
}

/// Boost a width state along its longitudinal axis.
///
/// # Safety
/// `state` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wp_lorentz_boost(
    state: *const WpWidthState,
    beta: f64,
    c: f64,
    hbar: f64,
    out: *mut WpWidthState,
) -> WpStatus {
    let out = out_ref!(out);
    let Some(state) = (unsafe { state.as_ref() }) else {
        return WpStatus::NullPointer;
    };
    guarded(|| {
        let s = lorentz_boost(&(*state).into(), beta, c, hbar).map_err(|e| status_of(&e))?;
        *out = s.into();
        Ok(())
    })
}

/// Nonrelativistic potential step on a width state.
///
/// # Safety
/// `state` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wp_add_potential_nonrel(
    state: *const WpWidthState,
    v0: f64,
    c: f64,
    out: *mut WpWidthState,
) -> WpStatus {
    let out = out_ref!(out);
    let Some(state) = (unsafe { state.as_ref() }) else {
        return WpStatus::NullPointer;
    };
    guarded(|| {
        let s = add_potential_nonrel(&(*state).into(), v0, c).map_err(|e| status_of(&e))?;
        *out = s.into();
        Ok(())
    })
}

/// Relativistic potential step on a width state.
///
/// # Safety
/// `state` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wp_add_potential_rel(
    state: *const WpWidthState,
    v0: f64,
    c: f64,
    out: *mut WpWidthState,
) -> WpStatus {
    let out = out_ref!(out);
    let Some(state) = (unsafe { state.as_ref() }) else {
        return WpStatus::NullPointer;
    };
    guarded(|| {
        let s = add_potential_rel(&(*state).into(), v0, c).map_err(|e| status_of(&e))?;
        *out = s.into();
        Ok(())
    })
}

/// Massless scale transformation on a width state.
///
/// # Safety
/// `state` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wp_scale_transform(
    state: *const WpWidthState,
    lambda: f64,
    c: f64,
    out: *mut WpWidthState,
) -> WpStatus {
    let out = out_ref!(out);
    let Some(state) = (unsafe { state.as_ref() }) else {
        return WpStatus::NullPointer;
    };
    guarded(|| {
        let s = scale_transform(&(*state).into(), lambda, c).map_err(|e| status_of(&e))?;
        *out = s.into();
        Ok(())
    })
}

/// Electron metal-to-vacuum interface crossing.
///
/// # Safety
/// `state` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wp_cross_electron_interface(
    state: *const WpWidthState,
    e0: f64,
    m_eff: f64,
    m0: f64,
    c: f64,
    hbar: f64,
    out: *mut WpWidthState,
) -> WpStatus {
    let out = out_ref!(out);
    let Some(state) = (unsafe { state.as_ref() }) else {
        return WpStatus::NullPointer;
    };
    guarded(|| {
        let spec = InterfaceSpec::ElectronMetal { e0, m_eff, m0 };
        let (s, _) = cross_interface(&(*state).into(), &spec, c, hbar, 1.0)
            .map_err(|e| status_of(&e))?;
        *out = s.into();
        Ok(())
    })
}

/// Light medium-to-vacuum crossing; `rho > 0` adds absorption and fills the
/// lifetime and energy-width outputs (NULL-able).
///
/// # Safety
/// `state` must be readable and `out` writable; the lifetime pointers may
/// be NULL.
#[no_mangle]
pub unsafe extern "C" fn wp_cross_light_interface(
    state: *const WpWidthState,
    mu_r: f64,
    eps_r: f64,
    rho: f64,
    c: f64,
    hbar: f64,
    eps0: f64,
    out: *mut WpWidthState,
    out_lifetime: *mut f64,
    out_energy_width: *mut f64,
) -> WpStatus {
    let out = out_ref!(out);
    let Some(state) = (unsafe { state.as_ref() }) else {
        return WpStatus::NullPointer;
    };
    guarded(|| {
        let spec = if rho > 0.0 {
            InterfaceSpec::LightAbsorbing { mu_r, eps_r, rho }
        } else {
            InterfaceSpec::LightDielectric { mu_r, eps_r }
        };
        let (s, extra) = cross_interface(&(*state).into(), &spec, c, hbar, eps0)
            .map_err(|e| status_of(&e))?;
        *out = s.into();
        if let Some(report) = extra {
            if let Some(t) = unsafe { out_lifetime.as_mut() } {
                *t = report.lifetime;
            }
            if let Some(w) = unsafe { out_energy_width.as_mut() } {
                *w = report.energy_width;
            }
        }
        Ok(())
    })
}

/// Decay correlation of an isotropic Gaussian source at shift
/// (dx, dy, dz); `eps_e <= 0` disables the energy regulator (the
/// three-body form).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wp_decay_correlation(
    sigma: f64,
    dx: f64,
    dy: f64,
    dz: f64,
    eps_e: f64,
    out: *mut f64,
) -> WpStatus {
    let out = out_ref!(out);
    guarded(|| {
        let weight = WeightFn::isotropic(3, sigma).map_err(|e| status_of(&e))?;
        let reg = if eps_e > 0.0 { EnergyRegulator::Width(eps_e) } else { EnergyRegulator::Off };
        *out = correlations::decay_correlation_2body(
            &weight,
            [dx, dy, dz],
            reg,
            Dispersion::Massless,
        )
        .map_err(|e| status_of(&e))?;
        Ok(())
    })
}

/// Collision correlation of two isotropic Gaussian sources.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wp_collision_correlation(
    sigma_a: f64,
    sigma_b: f64,
    dx: f64,
    dy: f64,
    dz: f64,
    out: *mut f64,
) -> WpStatus {
    let out = out_ref!(out);
    guarded(|| {
        let wa = WeightFn::isotropic(3, sigma_a).map_err(|e| status_of(&e))?;
        let wb = WeightFn::isotropic(3, sigma_b).map_err(|e| status_of(&e))?;
        *out = correlations::collision_correlation(&wa, &wb, [dx, dy, dz])
            .map_err(|e| status_of(&e))?;
        Ok(())
    })
}

/// Thermal photon correlation curve at temperature `t_kelvin`, sampled on
/// `n_samples` points of [0, delta_max] (units of k_B T). Returns a
/// 2-column table (delta, c_value) and writes the fitted Gaussian width.
///
/// # Safety
/// `out_table` receives an owned handle (release with [`wp_table_free`]);
/// `out_width` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn wp_thermal_correlation_curve(
    t_kelvin: f64,
    delta_max: f64,
    n_samples: usize,
    radial_cutoff: f64,
    out_table: *mut *mut WpTable,
    out_width: *mut f64,
) -> WpStatus {
    let out_table = out_ref!(out_table);
    guarded(|| {
        if n_samples < 4 || !(delta_max > 0.0) {
            return Err(WpStatus::InvalidArgument);
        }
        let deltas: Vec<f64> = (0..n_samples)
            .map(|i| delta_max * i as f64 / (n_samples - 1) as f64)
            .collect();
        let (ph, el) = default_thermal_pair(t_kelvin);
        let curve =
            correlations::photon_correlation_curve(&ph, &el, [0.0; 3], &deltas, radial_cutoff)
                .map_err(|e| status_of(&e))?;
        let mut values = Vec::with_capacity(curve.delta_values.len() * 2);
        for (d, c) in curve.delta_values.iter().zip(&curve.c_values) {
            values.extend_from_slice(&[*d, *c]);
        }
        if let Some(w) = unsafe { out_width.as_mut() } {
            *w = curve.fitted_width;
        }
        *out_table = Box::into_raw(Box::new(WpTable { columns: 2, values }));
        Ok(())
    })
}

/// Root-sum-square accumulation of independent momentum spreads.
///
/// # Safety
/// `spreads` must point to `n` readable f64; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wp_total_momentum_spread(
    spreads: *const f64,
    n: usize,
    out: *mut f64,
) -> WpStatus {
    let out = out_ref!(out);
    if spreads.is_null() {
        return WpStatus::NullPointer;
    }
    let list = unsafe { std::slice::from_raw_parts(spreads, n) };
    guarded(|| {
        *out = correlations::total_momentum_spread(list).map_err(|e| status_of(&e))?;
        Ok(())
    })
}
