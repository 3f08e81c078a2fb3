//! Base functions in transformed coordinates.
//!
//! Each base function takes the already shifted/scaled/rotated point `z` and
//! returns its value. When `grad` is `Some`, it is overwritten with the
//! derivative with respect to `z`. Non-smooth points follow fixed conventions:
//! `|z|` has derivative 0 at 0, rounding passes gradients straight through and
//! piecewise branches own their boundary on the inner side.

use std::f64::consts::PI;

/// Offset added to every Schwefel coordinate so the optimum sits at the shift.
pub const SCHWEFEL_OFFSET: f64 = 4.209_687_462_275_036e2;

/// Lunacek bi-Rastrigin constants.
pub const LUNACEK_MU0: f64 = 2.5;
pub const LUNACEK_D: f64 = 1.0;

pub fn bent_cigar(z: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let head = z[0] * z[0];
    let tail: f64 = z[1..].iter().map(|v| v * v).sum();
    if let Some(g) = grad {
        g[0] = 2.0 * z[0];
        for (gi, zi) in g[1..].iter_mut().zip(&z[1..]) {
            *gi = 2.0e6 * zi;
        }
    }
    head + 1.0e6 * tail
}

pub fn zakharov(z: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let mut squares = 0.0;
    let mut weighted = 0.0;
    for (i, zi) in z.iter().enumerate() {
        squares += zi * zi;
        weighted += 0.5 * (i + 1) as f64 * zi;
    }
    let w2 = weighted * weighted;
    if let Some(g) = grad {
        let outer = 2.0 * weighted + 4.0 * w2 * weighted;
        for (i, (gi, zi)) in g.iter_mut().zip(z).enumerate() {
            *gi = 2.0 * zi + outer * 0.5 * (i + 1) as f64;
        }
    }
    squares + w2 + w2 * w2
}

/// Rosenbrock on `z` that already carries the `+1` inner offset.
pub fn rosenbrock(z: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let mut f = 0.0;
    for w in z.windows(2) {
        let a = w[0] * w[0] - w[1];
        let b = w[0] - 1.0;
        f += 100.0 * a * a + b * b;
    }
    if let Some(g) = grad {
        g.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..z.len() - 1 {
            let a = z[i] * z[i] - z[i + 1];
            g[i] += 400.0 * z[i] * a + 2.0 * (z[i] - 1.0);
            g[i + 1] -= 200.0 * a;
        }
    }
    f
}

pub fn rastrigin(z: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let f = z
        .iter()
        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
        .sum();
    if let Some(g) = grad {
        for (gi, v) in g.iter_mut().zip(z) {
            *gi = 2.0 * v + 20.0 * PI * (2.0 * PI * v).sin();
        }
    }
    f
}

/// Rounding rule of the non-continuous Rastrigin variant.
#[inline]
pub fn step_round(v: f64) -> f64 {
    if v.abs() > 0.5 {
        (2.0 * v + 0.5).floor() / 2.0
    } else {
        v
    }
}

pub fn noncontinuous_rastrigin(z: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let y: Vec<f64> = z.iter().map(|&v| step_round(v)).collect();
    // straight-through: d(round)/dz = 1
    rastrigin(&y, grad)
}

pub fn schaffer_f7(z: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let pairs = (z.len() - 1) as f64;
    let mut total = 0.0;
    let mut dg_ds = Vec::with_capacity(z.len() - 1);
    let mut radius = Vec::with_capacity(z.len() - 1);
    for w in z.windows(2) {
        let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
        let p = s.powf(0.2);
        let sin = (50.0 * p).sin();
        total += s.sqrt() * (1.0 + sin * sin);
        if s > 0.0 {
            dg_ds.push(0.5 / s.sqrt() * (1.0 + sin * sin) + 10.0 * (100.0 * p).sin() * s.powf(-0.3));
        } else {
            dg_ds.push(0.0);
        }
        radius.push(s);
    }
    let mean = total / pairs;
    if let Some(g) = grad {
        g.iter_mut().for_each(|v| *v = 0.0);
        let outer = 2.0 * mean / pairs;
        for i in 0..z.len() - 1 {
            let s = radius[i];
            if s > 0.0 {
                let k = outer * dg_ds[i] / s;
                g[i] += k * z[i];
                g[i + 1] += k * z[i + 1];
            }
        }
    }
    mean * mean
}

pub fn levy(z: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let n = z.len();
    let w: Vec<f64> = z.iter().map(|v| 1.0 + v / 4.0).collect();
    let head = (PI * w[0]).sin().powi(2);
    let mut f = head;
    for &wi in &w[..n - 1] {
        let s = (PI * wi + 1.0).sin();
        f += (wi - 1.0).powi(2) * (1.0 + 10.0 * s * s);
    }
    let wl = w[n - 1];
    let sl = (2.0 * PI * wl).sin();
    f += (wl - 1.0).powi(2) * (1.0 + sl * sl);

    if let Some(g) = grad {
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] += PI * (2.0 * PI * w[0]).sin();
        for i in 0..n - 1 {
            let wi = w[i];
            let arg = PI * wi + 1.0;
            let s = arg.sin();
            g[i] += 2.0 * (wi - 1.0) * (1.0 + 10.0 * s * s)
                + (wi - 1.0).powi(2) * 10.0 * PI * (2.0 * arg).sin();
        }
        g[n - 1] += 2.0 * (wl - 1.0) * (1.0 + sl * sl)
            + (wl - 1.0).powi(2) * 2.0 * PI * (4.0 * PI * wl).sin();
        g.iter_mut().for_each(|v| *v *= 0.25);
    }
    f
}

/// One Schwefel coordinate term including the boundary penalty.
/// Returns `(value, derivative)`.
fn schwefel_term(z: f64, n: f64) -> (f64, f64) {
    if z > 500.0 {
        let u = 500.0 - z % 500.0;
        let r = u.sqrt();
        let p = (z - 500.0) / 100.0;
        let value = -u * r.sin() + p * p / n;
        let deriv = r.sin() + 0.5 * r * r.cos() + 2.0 * p / (100.0 * n);
        (value, deriv)
    } else if z < -500.0 {
        let u = 500.0 - z.abs() % 500.0;
        let r = u.sqrt();
        let p = (z + 500.0) / 100.0;
        let value = u * r.sin() + p * p / n;
        let deriv = r.sin() + 0.5 * r * r.cos() + 2.0 * p / (100.0 * n);
        (value, deriv)
    } else {
        let r = z.abs().sqrt();
        let value = -z * r.sin();
        let deriv = -r.sin() - 0.5 * r * r.cos();
        (value, deriv)
    }
}

/// Schwefel on `z` that already carries [`SCHWEFEL_OFFSET`].
pub fn schwefel(z: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let n = z.len() as f64;
    let (floor, _) = schwefel_term(SCHWEFEL_OFFSET, n);
    let mut f = 0.0;
    match grad {
        Some(g) => {
            for (gi, &zi) in g.iter_mut().zip(z) {
                let (v, d) = schwefel_term(zi, n);
                f += v - floor;
                *gi = d;
            }
        }
        None => {
            for &zi in z {
                f += schwefel_term(zi, n).0 - floor;
            }
        }
    }
    f.max(0.0)
}

/// Lunacek bi-Rastrigin value on the sign-adjusted point `t` (quadratic part)
/// and its rotation `rt` (cosine part). Gradients are written separately for
/// the two inputs so the caller can chain them through its own transform.
pub fn lunacek(t: &[f64], rt: &[f64], grads: Option<(&mut [f64], &mut [f64])>) -> f64 {
    let n = t.len() as f64;
    let s = 1.0 - 1.0 / (2.0 * (n + 20.0).sqrt() - 8.2);
    let mu1 = -((LUNACEK_MU0 * LUNACEK_MU0 - LUNACEK_D) / s).sqrt();
    let near: f64 = t.iter().map(|v| v * v).sum();
    let far: f64 = LUNACEK_D * n
        + s * t
            .iter()
            .map(|v| (v + LUNACEK_MU0 - mu1).powi(2))
            .sum::<f64>();
    let cos_sum: f64 = rt.iter().map(|v| (2.0 * PI * v).cos()).sum();
    let use_near = near < far;
    if let Some((gt, grt)) = grads {
        for (g, v) in gt.iter_mut().zip(t) {
            *g = if use_near {
                2.0 * v
            } else {
                2.0 * s * (v + LUNACEK_MU0 - mu1)
            };
        }
        for (g, v) in grt.iter_mut().zip(rt) {
            *g = 20.0 * PI * (2.0 * PI * v).sin();
        }
    }
    near.min(far) + 10.0 * (n - cos_sum)
}
