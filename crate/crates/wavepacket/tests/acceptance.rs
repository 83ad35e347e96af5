//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see the lines for green tests).

use std::time::Instant;

use wavepacket::correlations::{
    self, default_thermal_pair, Dispersion, EnergyRegulator, WeightFn,
};
use wavepacket::medium;
use wavepacket::numerics::simpson_uniform;
use wavepacket::packets::{
    completeness_residual, compute_moments, sample_packet, PacketSpec, PhaseGrid,
};
use wavepacket::scattering1d::{
    barrier_amplitudes, branch_uncertainty_product, cliff_default_grid, step_amplitudes,
    sweep_barrier_width, sweep_step_depth, well_default_grid, BarrierPotential, Branch, KGrid,
    PotentialKind, StepPotential, WaistMode,
};
use wavepacket::transforms::{
    add_potential_nonrel, add_potential_rel, lorentz_boost, scale_transform, WidthState,
};

/// Minimal deterministic generator for randomized criteria.
struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

struct Criterion {
    name: &'static str,
    started: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Criterion { name, started: Instant::now(), failures: Vec::new() }
    }

    fn check(&mut self, label: &str, ok: bool, detail: String) {
        if !ok {
            self.failures.push(format!("{label}: {detail}"));
        }
        println!("    {} {label}: {detail}", if ok { "ok  " } else { "FAIL" });
    }

    fn finish(self, budget_s: f64) {
        let elapsed = self.started.elapsed().as_secs_f64();
        let status = if self.failures.is_empty() && elapsed <= budget_s { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {status} ({elapsed:.2} s of {budget_s:.0} s budget)",
            self.name
        );
        assert!(
            elapsed <= budget_s,
            "criterion {} exceeded its {budget_s} s budget: {elapsed:.2} s",
            self.name
        );
        assert!(
            self.failures.is_empty(),
            "criterion {} failed:\n  {}",
            self.name,
            self.failures.join("\n  ")
        );
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

#[test]
fn criterion_01_minimum_packet_product() {
    let mut c = Criterion::new("1 (minimum-packet product)");
    let spec = PacketSpec::minimum(0.0, 0.0, 1.0, 1.0, 1.0);
    let wave = sample_packet(&spec, -8.0, 8.0, 4096, 0.0).unwrap();
    let rep = compute_moments(&wave, None, 1.0).unwrap();
    let err = rel_err(rep.product, 0.5);
    c.check(
        "product = hbar/2 within 1e-9",
        err < 1e-9,
        format!("product {:.12}, relative error {err:.2e}", rep.product),
    );
    c.finish(1.0);
}

#[test]
fn criterion_02_completeness() {
    let mut c = Criterion::new("2 (completeness)");
    let base = PacketSpec::minimum(0.0, 0.0, 1.0, 1.0, 1.0);

    let same = sample_packet(&base, -9.0, 9.0, 512, 0.0).unwrap();
    let pg = PhaseGrid::covering(&same, &same, 1.0, 1.0, 96, 96).unwrap();
    let r1 = completeness_residual(&same, &same, &pg).unwrap().norm();
    c.check("identical minimum packets", r1 < 1e-6, format!("|residual| {r1:.2e}"));

    let odd_spec = PacketSpec { m_order: 1, ..base };
    let odd = sample_packet(&odd_spec, -9.0, 9.0, 512, 0.0).unwrap();
    let pg = PhaseGrid::covering(&same, &odd, 1.0, 1.0, 96, 96).unwrap();
    let r2 = completeness_residual(&same, &odd, &pg).unwrap().norm();
    c.check("even/odd pair", r2 < 1e-6, format!("|residual| {r2:.2e}"));

    let f_spec = PacketSpec::minimum(-1.5, 1.0, 1.0, 1.0, 1.0);
    let g_spec = PacketSpec::minimum(1.0, -0.5, 1.2, 1.0, 1.0);
    let f = sample_packet(&f_spec, -12.0, 12.0, 512, 0.0).unwrap();
    let g = sample_packet(&g_spec, -12.0, 12.0, 512, 0.0).unwrap();
    let pg = PhaseGrid::covering(&f, &g, 1.0, 1.0, 128, 128).unwrap();
    let r3 = completeness_residual(&f, &g, &pg).unwrap().norm();
    c.check("displaced pair", r3 < 1e-6, format!("|residual| {r3:.2e}"));

    c.finish(10.0);
}

#[test]
fn criterion_03_cliff_endpoints() {
    let mut c = Criterion::new("3 (step-depth figure)");
    let grid = cliff_default_grid();
    let n = 40;
    let (lo, hi) = (0.02f64, 50.0f64);
    let ratios: Vec<f64> = (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let rows = sweep_step_depth(&grid, &ratios, 1.0, 1.0).unwrap();

    let first = rows.first().unwrap();
    let last = rows.last().unwrap();
    c.check(
        "transmitted -> 3 hbar/2 at v0/E0 = 0.02 within 5%",
        rel_err(first.product_transmitted, 3.0) < 0.05,
        format!("product {:.4} hbar/2", first.product_transmitted),
    );
    c.check(
        "transmitted -> hbar/2 at v0/E0 = 50 within 5%",
        rel_err(last.product_transmitted, 1.0) < 0.05,
        format!("product {:.4} hbar/2", last.product_transmitted),
    );

    let refl_lo = rows
        .iter()
        .map(|r| r.product_reflected)
        .fold(f64::INFINITY, f64::min);
    let refl_hi = rows
        .iter()
        .map(|r| r.product_reflected)
        .fold(f64::NEG_INFINITY, f64::max);
    let in_band = rows
        .iter()
        .filter(|r| r.product_reflected >= 1.1 && r.product_reflected <= 1.5)
        .count();
    c.check(
        "reflected within [1.1, 1.5] hbar/2 over the full sweep",
        in_band == rows.len(),
        format!(
            "{in_band}/{} points in band; observed range [{refl_lo:.4}, {refl_hi:.4}] hbar/2",
            rows.len()
        ),
    );

    c.finish(300.0);
}

#[test]
fn criterion_04_well_sweep() {
    let mut c = Criterion::new("4 (barrier-width figure)");
    let grid = well_default_grid();
    let e0 = grid.k0 * grid.k0 / 2.0;
    let dx1 = grid.gamma() / std::f64::consts::SQRT_2;
    let n = 40;
    let a_list: Vec<f64> = (0..n).map(|i| 1.5 * dx1 * i as f64 / (n - 1) as f64).collect();

    for factor in [0.5, 1.0, 1.5] {
        let rows = sweep_barrier_width(&grid, factor * e0, &a_list, 1.0, 1.0).unwrap();
        let trans_ok = rows.iter().filter(|r| rel_err(r.product_transmitted, 1.0) < 0.10).count();
        let t_lo = rows.iter().map(|r| r.product_transmitted).fold(f64::INFINITY, f64::min);
        let t_hi = rows.iter().map(|r| r.product_transmitted).fold(f64::NEG_INFINITY, f64::max);
        c.check(
            &format!("v0 = {factor} E0: transmitted within 10% of hbar/2 across the sweep"),
            trans_ok == rows.len(),
            format!("{trans_ok}/{} in band; range [{t_lo:.4}, {t_hi:.4}] hbar/2", rows.len()),
        );

        // reflected band [1.0, 1.6] hbar/2 with 10% margin; the a = 0 point
        // has no reflected branch at all (NaN) and is skipped
        let live: Vec<f64> = rows
            .iter()
            .map(|r| r.product_reflected)
            .filter(|p| p.is_finite())
            .collect();
        let refl_ok = live.iter().filter(|&&p| (0.9..=1.76).contains(&p)).count();
        let r_hi = live.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        c.check(
            &format!("v0 = {factor} E0: reflected within [1.0, 1.6] hbar/2 (+10%)"),
            refl_ok == live.len(),
            format!("{refl_ok}/{} in band; max {r_hi:.4} hbar/2", live.len()),
        );
    }
    c.finish(600.0);
}

#[test]
fn criterion_05_unitarity_random_samples() {
    let mut c = Criterion::new("5 (unitarity over random samples)");
    let mut rng = Lcg(0x5eed_cafe);
    let mut worst_flux = 0.0f64;
    let mut worst_residual = 0.0f64;
    let mut worst_evanescent = 0.0f64;
    for _ in 0..500 {
        // step: energies and offsets across propagating and evanescent cases
        let k = rng.uniform(0.05, 15.0);
        let v0 = rng.uniform(-25.0, 25.0);
        let pot = StepPotential { v0 };
        let sol = step_amplitudes(k, &pot, 1.0, 1.0).unwrap();
        worst_residual = worst_residual.max(sol.boundary_residual);
        if 0.5 * k * k + v0 >= 0.0 {
            worst_flux = worst_flux.max(sol.flux_defect(&PotentialKind::Step(pot)));
        } else {
            worst_evanescent = worst_evanescent.max((sol.b_minus.norm() - 1.0).abs());
        }

        // barrier: keep the interior decay representable
        let e = rng.uniform(0.05, 15.0);
        let mut depth = rng.uniform(-20.0, 20.0);
        let a = rng.uniform(0.0, 3.0);
        if e + depth < 0.0 && (-2.0 * (e + depth)).sqrt() * a > 25.0 {
            depth = -e / 2.0;
        }
        let pot = BarrierPotential { v0: depth, a };
        let sol = barrier_amplitudes(e, &pot, 1.0, 1.0).unwrap();
        worst_residual = worst_residual.max(sol.boundary_residual);
        worst_flux = worst_flux.max(sol.flux_defect(&PotentialKind::Barrier(pot)));
    }
    c.check(
        "flux conservation < 1e-10 over 1e3 samples",
        worst_flux < 1e-10,
        format!("worst defect {worst_flux:.2e}"),
    );
    c.check(
        "boundary residuals < 1e-10",
        worst_residual < 1e-10,
        format!("worst residual {worst_residual:.2e}"),
    );
    c.check(
        "evanescent steps reflect with |B-| = 1",
        worst_evanescent < 1e-10,
        format!("worst deviation {worst_evanescent:.2e}"),
    );
    c.finish(30.0);
}

#[test]
fn criterion_06_decoupling_reference_values() {
    let mut c = Criterion::new("6 (cross sections and mean free paths)");
    let sigma_ru = medium::sigma_rutherford(3000.0, 10.0).unwrap();
    c.check(
        "sigma_Ru(3000 K, 10) within 3% of 4.4e-16 m^2",
        rel_err(sigma_ru, 4.4e-16) < 0.03,
        format!("sigma {sigma_ru:.4e} m^2"),
    );
    let l_ru = medium::mean_free_path(sigma_ru, 4e17).unwrap();
    c.check(
        "l_Ru within 2% of 5.7e-3 m",
        rel_err(l_ru, 5.7e-3) < 0.02,
        format!("l {l_ru:.4e} m"),
    );
    let sigma_th = medium::sigma_thomson();
    c.check(
        "sigma_Th within 12% of 0.6e-28 m^2",
        rel_err(sigma_th, 0.6e-28) < 0.12,
        format!("sigma {sigma_th:.4e} m^2 (constant-based 6.65e-29)"),
    );
    let l_th = medium::mean_free_path(sigma_th, 1e9 * 4e17).unwrap();
    let n_t = medium::collision_ratio(l_th, l_ru).unwrap();
    c.check(
        "N_T within order of magnitude 1e3..1e4",
        (1e3..1e4).contains(&n_t),
        format!("N_T {n_t:.0} (l_Th {l_th:.2} m from the constant-based cross section)"),
    );
    c.finish(1.0);
}

#[test]
fn criterion_07_coherence_identities() {
    let mut c = Criterion::new("7 (coherence identities)");
    let mut rng = Lcg(0xc0ffee);
    let mut worst = 0.0f64;
    for _ in 0..2000 {
        let l = 10f64.powf(rng.uniform(-9.0, 3.0));
        let v = 10f64.powf(rng.uniform(-3.0, 8.0));
        let hbar = if rng.next_f64() < 0.5 { 1.0 } else { wavepacket::units::HBAR_SI };
        let r = medium::coherence_from_path(l, v, hbar).unwrap();
        worst = worst
            .max((r.gamma_packet * std::f64::consts::SQRT_2 / r.l - 1.0).abs())
            .max((r.delta_p * r.l / hbar - 1.0).abs())
            .max((r.delta_e * r.tau / hbar - 1.0).abs());
    }
    c.check(
        "gamma = l/sqrt(2), dp*l = hbar, dE*tau = hbar within 1e-12",
        worst < 1e-12,
        format!("worst identity deviation {worst:.2e}"),
    );
    c.finish(1.0);
}

#[test]
fn criterion_08_transform_invariants() {
    let mut c = Criterion::new("8 (transform invariants)");
    let mut rng = Lcg(0xfeed);
    let mut worst_product = 0.0f64;
    let mut transverse_moved = 0.0f64;
    for _ in 0..500 {
        let s = WidthState::on_shell(
            rng.uniform(0.1, 20.0),
            rng.uniform(0.001, 0.5),
            rng.uniform(0.001, 0.5),
            1.0,
            1.0,
            1.0,
        );
        let v0 = rng.uniform(-0.4 * s.p0_l * s.p0_l / 2.0, 10.0);
        let out = add_potential_nonrel(&s, v0, 1.0).unwrap();
        worst_product = worst_product.max(
            (out.delta_x_l * out.delta_p_l / (s.delta_x_l * s.delta_p_l) - 1.0).abs(),
        );
        transverse_moved = transverse_moved
            .max((out.delta_p_t - s.delta_p_t).abs())
            .max((out.delta_x_t - s.delta_x_t).abs());

        let b = lorentz_boost(&s, rng.uniform(-0.9, 0.9), 1.0, 1.0).unwrap();
        transverse_moved = transverse_moved.max((b.delta_p_t - s.delta_p_t).abs());

        let rel = add_potential_rel(&s, v0.min(s.energy - 1.0 - 1e-3).max(-0.2), 1.0).unwrap();
        transverse_moved = transverse_moved
            .max((rel.delta_p_t - s.delta_p_t).abs())
            .max((rel.delta_x_t - s.delta_x_t).abs());
    }
    c.check(
        "adiabatic invariant dx_l*dp_l conserved to 1e-12",
        worst_product < 1e-12,
        format!("worst relative drift {worst_product:.2e}"),
    );
    c.check(
        "transverse widths are fixed points of the boost and potential maps",
        transverse_moved == 0.0,
        format!("largest transverse change {transverse_moved:.2e}"),
    );

    // scale transformation preserves per-axis products exactly
    let light = WidthState::on_shell(3.0, 0.2, 0.1, 0.0, 1.0, 1.0);
    let scaled = scale_transform(&light, 0.37, 1.0).unwrap();
    c.check(
        "scale transformation preserves per-axis products",
        (scaled.delta_x_l * scaled.delta_p_l - light.delta_x_l * light.delta_p_l).abs() < 1e-15
            && (scaled.delta_x_t * scaled.delta_p_t - light.delta_x_t * light.delta_p_t).abs()
                < 1e-15,
        "exact reciprocal scaling".into(),
    );

    // relativistic vs nonrelativistic agreement at p/m = 1e-3
    let slow = WidthState::on_shell(1e-3, 1e-5, 1e-5, 1.0, 1.0, 1.0);
    let v0 = 0.4 * slow.p0_l * slow.p0_l / 2.0;
    let nr = add_potential_nonrel(&slow, v0, 1.0).unwrap();
    let re = add_potential_rel(&slow, v0, 1.0).unwrap();
    let disagreement = rel_err(re.p0_l, nr.p0_l)
        .max(rel_err(re.delta_p_l, nr.delta_p_l))
        .max(rel_err(re.delta_x_l, nr.delta_x_l));
    c.check(
        "relativistic matches nonrelativistic within 1% at p/m = 1e-3",
        disagreement < 0.01,
        format!("largest disagreement {disagreement:.2e}"),
    );

    // ultrarelativistic size ratio at p/m = 1e3
    let fast = WidthState::on_shell(1e3, 0.1, 0.1, 1.0, 1.0, 1.0);
    let out = add_potential_rel(&fast, -0.1 * fast.energy, 1.0).unwrap();
    let ratio = out.delta_x_l / fast.delta_x_l;
    c.check(
        "ultrarelativistic dx ratio -> 1 within 1e-3 at p/m = 1e3",
        (ratio - 1.0).abs() < 1e-3,
        format!("dx2/dx1 = {ratio:.6}"),
    );
    c.finish(5.0);
}

#[test]
fn criterion_09_spread_accumulation() {
    let mut c = Criterion::new("9 (momentum-spread accumulation)");
    let sigma = 0.5;
    for n in [1usize, 4, 100] {
        let got = correlations::total_momentum_spread(&vec![sigma; n]).unwrap();
        let want = (n as f64).sqrt() * sigma;
        c.check(
            &format!("sqrt(N) sigma for N = {n}"),
            (got - want).abs() <= f64::EPSILON * want,
            format!("got {got}, want {want}"),
        );
    }
    let marginal = correlations::gaussian_product_marginal_width(4, 0.8).unwrap();
    c.check(
        "Gaussian-product marginal matches 2 sigma to 1e-9",
        rel_err(marginal, 1.6) < 1e-9,
        format!("marginal width {marginal:.12}"),
    );
    c.finish(1.0);
}

#[test]
fn criterion_10_thermal_width() {
    let mut c = Criterion::new("10 (thermal correlation width)");
    let (ph, el) = default_thermal_pair(3500.0);
    let deltas: Vec<f64> = (0..=32).map(|i| i as f64 * 0.25).collect();
    let curve =
        correlations::photon_correlation_curve(&ph, &el, [0.0; 3], &deltas, 20.0).unwrap();
    c.check(
        "fitted width in [3.0, 4.0] k_B T at 3500 K",
        (3.0..=4.0).contains(&curve.fitted_width),
        format!(
            "second-moment width {:.3} k_B T (log-fit {:.3}, residual {:.4}, warning {})",
            curve.fitted_width, curve.fitted_width_log, curve.fit_residual, curve.fit_warning
        ),
    );
    c.check(
        "fit residual reported and finite",
        curve.fit_residual.is_finite(),
        format!("residual {:.4}", curve.fit_residual),
    );
    c.finish(300.0);
}

/// Brute-force cylindrical quadrature of Int F(p) F(p - d) with optional
/// Gaussian energy regulators; delta along z, independent of the adapted
/// implementation path.
fn brute_decay(sigma: f64, d: f64, regulator: Option<f64>) -> f64 {
    let n1 = (std::f64::consts::PI * sigma * sigma).powf(-0.75);
    let e_ref = (1.5f64).sqrt() * sigma;
    let g = |e: f64| match regulator {
        None => 1.0,
        Some(eps) => {
            let z = (e - e_ref) / eps;
            (-0.5 * z * z).exp() / (eps * (2.0 * std::f64::consts::PI).sqrt())
        }
    };
    let half = 8.0 * sigma + d.abs();
    let n = 2048usize;
    let hz = 2.0 * half / n as f64;
    let hr = half / n as f64;
    let mut rows = Vec::with_capacity(n + 1);
    for iz in 0..=n {
        let z = -half + d / 2.0 + iz as f64 * hz;
        let mut row = Vec::with_capacity(n + 1);
        for ir in 0..=n {
            let rho = ir as f64 * hr;
            let p2 = rho * rho + z * z;
            let q2 = rho * rho + (z - d) * (z - d);
            let f = n1 * n1 * (-0.5 * (p2 + q2) / (sigma * sigma)).exp();
            row.push(rho * f * g(p2.sqrt()) * g(q2.sqrt()));
        }
        rows.push(simpson_uniform(&row, hr));
    }
    2.0 * std::f64::consts::PI * simpson_uniform(&rows, hz)
}

/// Radial profile of Int F(u) F(u - q) for an isotropic Gaussian by 2D
/// (radius, angle cosine) quadrature.
fn brute_overlap_radial(sigma: f64, q: f64) -> f64 {
    let n1 = (std::f64::consts::PI * sigma * sigma).powf(-0.75);
    let r_max = 8.0 * sigma + q;
    let n = 512usize;
    let hr = r_max / n as f64;
    let hu = 2.0 / 256 as f64;
    let mut rows = Vec::with_capacity(n + 1);
    for ir in 0..=n {
        let u_abs = ir as f64 * hr;
        let mut row = Vec::with_capacity(257);
        for iu in 0..=256 {
            let cu = -1.0 + iu as f64 * hu;
            let w2 = u_abs * u_abs + q * q - 2.0 * u_abs * q * cu;
            row.push((-0.5 * (u_abs * u_abs + w2) / (sigma * sigma)).exp());
        }
        rows.push(u_abs * u_abs * simpson_uniform(&row, hu));
    }
    2.0 * std::f64::consts::PI * n1 * n1 * simpson_uniform(&rows, hr)
}

/// Brute-force collision correlation: cylindrical convolution of the two
/// radial overlap profiles, themselves tabulated by brute quadrature.
fn brute_collision(sigma_a: f64, sigma_b: f64, d: f64) -> f64 {
    let q_max = 10.0 * (sigma_a.max(sigma_b)) + d;
    let table_n = 1024usize;
    let hq = q_max / table_n as f64;
    let table_a: Vec<f64> = (0..=table_n).map(|i| brute_overlap_radial(sigma_a, i as f64 * hq)).collect();
    let table_b: Vec<f64> = (0..=table_n).map(|i| brute_overlap_radial(sigma_b, i as f64 * hq)).collect();
    // Catmull-Rom cubic lookup; linear interpolation is not accurate
    // enough for the 1e-5 comparison budget.
    let lookup = |table: &[f64], q: f64| -> f64 {
        let x = (q / hq).clamp(0.0, (table_n - 1) as f64);
        let i = (x.floor() as usize).clamp(1, table_n - 2);
        let t = x - i as f64;
        let (p0, p1, p2, p3) = (table[i - 1], table[i], table[i + 1], table[i + 2]);
        p1 + 0.5
            * t
            * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)))
    };

    let half = q_max * 0.75;
    let n = 768usize;
    let hz = 2.0 * half / n as f64;
    let hr = half / n as f64;
    let mut rows = Vec::with_capacity(n + 1);
    for iz in 0..=n {
        let z = -half + d / 2.0 + iz as f64 * hz;
        let mut row = Vec::with_capacity(n + 1);
        for ir in 0..=n {
            let rho = ir as f64 * hr;
            let qa = (rho * rho + z * z).sqrt();
            let qb = (rho * rho + (d - z) * (d - z)).sqrt();
            row.push(rho * lookup(&table_a, qa) * lookup(&table_b, qb));
        }
        rows.push(simpson_uniform(&row, hr));
    }
    2.0 * std::f64::consts::PI * simpson_uniform(&rows, hz)
}

#[test]
fn criterion_11_correlation_oracles() {
    let mut c = Criterion::new("11 (correlation oracles)");
    let sigma = 1.0;
    let weight = WeightFn::isotropic(3, sigma).unwrap();
    let deltas = [0.0, 0.5, 1.0, 1.8, 2.6];

    // three-body (unregulated) against brute-force quadrature
    let mut worst3 = 0.0f64;
    for &d in &deltas {
        let got = correlations::decay_correlation_3body(&weight, [0.0, 0.0, d]);
        let want = brute_decay(sigma, d, None);
        worst3 = worst3.max(rel_err(got, want));
    }
    c.check(
        "three-body decay matches brute force to 1e-5",
        worst3 < 1e-5,
        format!("worst relative deviation {worst3:.2e}"),
    );

    // regulated two-body at a resolvable regulator width
    let eps = 0.1 * sigma;
    let mut worst2 = 0.0f64;
    for &d in &deltas {
        let got = correlations::decay_correlation_2body(
            &weight,
            [0.0, 0.0, d],
            EnergyRegulator::Width(eps),
            Dispersion::Massless,
        )
        .unwrap();
        let want = brute_decay(sigma, d, Some(eps));
        worst2 = worst2.max(rel_err(got, want));
    }
    c.check(
        "two-body decay (regulated) matches brute force to 1e-5",
        worst2 < 1e-5,
        format!("worst relative deviation {worst2:.2e}"),
    );

    // collision against the brute-force convolution
    let wb = WeightFn::isotropic(3, 0.6).unwrap();
    let mut worstc = 0.0f64;
    for &d in &deltas {
        let got = correlations::collision_correlation(&weight, &wb, [0.0, 0.0, d]).unwrap();
        let want = brute_collision(sigma, 0.6, d);
        worstc = worstc.max(rel_err(got, want));
    }
    c.check(
        "collision matches brute force to 1e-5",
        worstc < 1e-5,
        format!("worst relative deviation {worstc:.2e}"),
    );

    // plane-wave limits: vanishing source widths concentrate at delta = 0
    let tiny = WeightFn::isotropic(3, 1e-3).unwrap();
    let far = correlations::decay_correlation_3body(&tiny, [0.0, 0.0, 0.011])
        / correlations::decay_correlation_3body(&tiny, [0.0; 3]);
    let far_coll = correlations::collision_correlation(&tiny, &tiny, [0.0, 0.0, 0.02]).unwrap()
        / correlations::collision_correlation(&tiny, &tiny, [0.0; 3]).unwrap();
    c.check(
        "plane-wave concentration",
        far < 1e-8 && far_coll < 1e-8,
        format!("decay tail {far:.2e}, collision tail {far_coll:.2e}"),
    );

    c.finish(300.0);
}

#[test]
fn criterion_12_cli_determinism() {
    let mut c = Criterion::new("12 (CLI determinism across parallelism)");
    let dir = std::env::temp_dir().join(format!("wp-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let cases: Vec<Vec<String>> = vec![
        vec![
            "sweep-cliff".into(),
            "--points".into(),
            "8".into(),
            "--ratio-min".into(),
            "0.05".into(),
            "--ratio-max".into(),
            "20".into(),
            "--n-k".into(),
            "256".into(),
        ],
        vec![
            "sweep-well".into(),
            "--points".into(),
            "8".into(),
            "--n-k".into(),
            "256".into(),
        ],
        vec![
            "correlate".into(),
            "--mode".into(),
            "decay3".into(),
            "--points".into(),
            "16".into(),
        ],
        vec!["mfp".into()],
    ];
    for (i, case) in cases.iter().enumerate() {
        let out1 = dir.join(format!("case{i}-t1.csv"));
        let out8 = dir.join(format!("case{i}-t8.csv"));
        for (threads, path) in [("1", &out1), ("8", &out8)] {
            let status = std::process::Command::new(env!("CARGO_BIN_EXE_wavepacket"))
                .args(case)
                .args(["--threads", threads, "--out", path.to_str().unwrap()])
                .status()
                .expect("spawn wavepacket");
            assert!(status.success(), "case {case:?} failed");
        }
        let b1 = std::fs::read(&out1).unwrap();
        let b8 = std::fs::read(&out8).unwrap();
        c.check(
            &format!("{} byte-identical for threads 1 vs 8", case[0]),
            b1 == b8,
            format!("{} bytes", b1.len()),
        );
    }
    std::fs::remove_dir_all(&dir).ok();
    c.finish(300.0);
}
