// Shapiro-Wilk W test following Royston's AS R94: polynomial approximations
// for the coefficients and for the normalizing transformation of W, with the
// exact distribution for n = 3. Censoring is not supported.

use serde::{Deserialize, Serialize};

use super::{is_constant, sorted};
use crate::error::{Error, Result};
use crate::numerics::{normal_cdf, normal_quantile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapiroWilk {
    pub w: f64,
    pub p: f64,
}

const G: [f64; 2] = [-2.273, 0.459];
const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Shapiro-Wilk test of normality for `3 <= n <= 5000`.
pub fn shapiro_wilk(sample: &[f64]) -> Result<ShapiroWilk> {
    let n = sample.len();
    if !(3..=5000).contains(&n) {
        return Err(Error::SampleSizeOutOfRange(n));
    }
    if is_constant(sample) {
        return Err(Error::DegenerateSample);
    }
    let x = sorted(sample);
    let half = half_coefficients(n)?;

    // full antisymmetric coefficient vector
    let coef: Vec<f64> = (0..n)
        .map(|i| {
            let j = n - 1 - i;
            match i.cmp(&j) {
                std::cmp::Ordering::Less => -half[i],
                std::cmp::Ordering::Greater => half[j],
                std::cmp::Ordering::Equal => 0.0,
            }
        })
        .collect();

    let range = x[n - 1] - x[0];
    let scaled: Vec<f64> = x.iter().map(|v| (v - x[0]) / range).collect();
    let sa = coef.iter().sum::<f64>() / n as f64;
    let sx = scaled.iter().sum::<f64>() / n as f64;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (c, v) in coef.iter().zip(&scaled) {
        let asa = c - sa;
        let xsx = v - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    // 1 - W, computed directly to keep precision near W = 1
    let ssassx = (ssa * ssx).sqrt();
    let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    if w1 <= 0.0 {
        return Ok(ShapiroWilk { w: 1.0, p: 1.0 });
    }
    let w = 1.0 - w1;
    Ok(ShapiroWilk {
        w,
        p: p_value(w, w1, n).clamp(0.0, 1.0),
    })
}

// Coefficients a_1..a_{n/2} for the lower half of the order statistics,
// as positive magnitudes (a_1 belongs to the extreme pair).
fn half_coefficients(n: usize) -> Result<Vec<f64>> {
    let nn2 = n / 2;
    if n == 3 {
        return Ok(vec![std::f64::consts::FRAC_1_SQRT_2]);
    }
    let an = n as f64;
    let an25 = an + 0.25;
    // m_i are negative for the lower half
    let mut a = (1..=nn2)
        .map(|i| normal_quantile((i as f64 - 0.375) / an25))
        .collect::<Result<Vec<_>>>()?;
    let summ2 = 2.0 * a.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) - a[0] / ssumm2;

    let (first_scaled, fac) = if n > 5 {
        let a2 = -a[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        a[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    a[0] = a1;
    for v in a.iter_mut().skip(first_scaled) {
        *v /= -fac;
    }
    Ok(a)
}

fn p_value(w: f64, w1: f64, n: usize) -> f64 {
    if n == 3 {
        const PI6: f64 = 6.0 / std::f64::consts::PI;
        const STQR: f64 = std::f64::consts::FRAC_PI_3;
        return (PI6 * (w.sqrt().asin() - STQR)).max(0.0);
    }
    let an = n as f64;
    let mut y = w1.ln();
    let (m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99;
        }
        y = -(gamma - y).ln();
        (poly(&C3, an), poly(&C4, an).exp())
    } else {
        let xx = an.ln();
        (poly(&C5, xx), poly(&C6, xx).exp())
    };
    // upper tail of N(m, s)
    normal_cdf(-(y - m) / s)
}
