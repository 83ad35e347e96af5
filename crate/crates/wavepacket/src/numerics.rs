//! Shared numerical kernels: composite Simpson quadrature (real and complex),
//! Gauss–Legendre nodes, centered finite differences, golden-section
//! minimization, and a small dense complex solver for boundary-matching
//! systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Composite Simpson rule on a uniform grid of `n + 1` samples (`n` intervals).
///
/// Odd interval counts are closed with a Simpson 3/8 block on the last three
/// intervals, so any `n >= 2` is accepted.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    assert!(n >= 2, "simpson_uniform needs at least 3 samples");
    let (n13, tail) = if n % 2 == 0 { (n, 0) } else { (n - 3, 3) };
    let mut sum = 0.0;
    if n13 >= 2 {
        sum += values[0] + values[n13];
        let mut i = 1;
        while i < n13 {
            sum += 4.0 * values[i];
            if i + 1 < n13 {
                sum += 2.0 * values[i + 1];
            }
            i += 2;
        }
        sum *= h / 3.0;
    }
    if tail == 3 {
        let v = &values[n - 3..];
        sum += 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
    }
    sum
}

/// Complex-valued counterpart of [`simpson_uniform`].
pub fn simpson_uniform_complex(values: &[Complex64], h: f64) -> Complex64 {
    let re: Vec<f64> = values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im).collect();
    Complex64::new(simpson_uniform(&re, h), simpson_uniform(&im, h))
}

/// Composite Simpson of `f` over `[a, b]` with `n` intervals (forced even).
pub fn simpson_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let values: Vec<f64> = (0..=n).map(|i| f(a + i as f64 * h)).collect();
    simpson_uniform(&values, h)
}

pub fn simpson_fn_complex(f: impl Fn(f64) -> Complex64, a: f64, b: f64, n: usize) -> Complex64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let values: Vec<Complex64> = (0..=n).map(|i| f(a + i as f64 * h)).collect();
    simpson_uniform_complex(&values, h)
}

/// Simpson quadrature refined by grid doubling until successive estimates
/// agree to `rel_tol` (relative to the magnitude of the estimate).
/// Returns the converged value and the final relative delta.
pub fn simpson_refine_complex(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<(Complex64, f64)> {
    let mut n = 256usize;
    let mut prev = simpson_fn_complex(&f, a, b, n);
    for _ in 0..8 {
        n *= 2;
        let next = simpson_fn_complex(&f, a, b, n);
        let scale = next.norm().max(1e-300);
        let delta = (next - prev).norm() / scale;
        if delta < rel_tol {
            return Ok((next, delta));
        }
        prev = next;
    }
    Err(Error::Numerical(format!(
        "quadrature did not reach relative tolerance {rel_tol:.1e} at {n} intervals"
    )))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence. Accurate to machine precision for n up to several
/// hundred.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by upward recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre quadrature of `f` over `[a, b]` with `n` nodes.
pub fn gauss_legendre_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Centered first derivative of complex samples on a uniform grid, 6th order
/// in the interior (exceeds the 4th-order floor the moment contracts need).
/// Points within three samples of an edge fall back to lower-order stencils;
/// callers keep meaningful amplitude away from the grid edges.
pub fn derivative_c6(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    assert!(n >= 7);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 3..n - 3 {
        out[i] = (values[i + 3] - values[i - 3] - 9.0 * (values[i + 2] - values[i - 2])
            + 45.0 * (values[i + 1] - values[i - 1]))
            / (60.0 * h);
    }
    for i in [1, 2, n - 3, n - 2] {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    out[0] = (values[1] - values[0]) / h;
    out[n - 1] = (values[n - 1] - values[n - 2]) / h;
    out
}

/// 6th-order centered second derivative, same edge policy as [`derivative_c6`].
pub fn second_derivative_c6(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    assert!(n >= 7);
    let h2 = h * h;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 3..n - 3 {
        out[i] = (2.0 * (values[i + 3] + values[i - 3]) - 27.0 * (values[i + 2] + values[i - 2])
            + 270.0 * (values[i + 1] + values[i - 1])
            - 490.0 * values[i])
            / (180.0 * h2);
    }
    for i in [1, 2, n - 3, n - 2] {
        out[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / h2;
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];
    out
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
/// Returns `(x_min, f_min)`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, a: f64, b: f64, x_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Solve a small dense complex system `A x = b` by Gaussian elimination with
/// partial pivoting. `a` is row-major `n x n`.
pub fn solve_complex(a: &[Vec<Complex64>], b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = b.len();
    let mut m: Vec<Vec<Complex64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (pivot, pnorm) = (col..n)
            .map(|r| (r, m[r][col].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pnorm < 1e-300 {
            return Err(Error::Numerical("singular matching system".into()));
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..n {
                let sub = factor * m[col][k];
                m[row][k] -= sub;
            }
            let sub = factor * rhs[col];
            rhs[row] -= sub;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

/// Physicists' Hermite polynomial H_m(x) by upward recurrence.
pub fn hermite(m: u32, x: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => 2.0 * x,
        _ => {
            let mut h0 = 1.0;
            let mut h1 = 2.0 * x;
            for k in 1..m {
                let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
    }
}

/// Ordinary least squares for `y ≈ c0 + c1 x`; returns `(c0, c1)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let denom = n * sxx - sx * sx;
    let c1 = (n * sxy - sx * sy) / denom;
    let c0 = (sy - c1 * sx) / n;
    (c0, c1)
}
