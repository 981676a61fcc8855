//! Special functions and distribution functions used by the tests and
//! estimators: log-gamma, regularized incomplete beta and gamma, and the
//! normal, Student t, F and chi-squared distributions.
//!
//! Everything here is a pure function of its arguments. Functions that
//! iterate (continued fractions, series, root finding) return
//! [`Error::NoConvergence`] instead of a silently inaccurate value.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// Convergence controls for series and continued-fraction evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel_eps: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_eps: 1e-12,
            max_iter: 300,
        }
    }
}

impl Tolerance {
    pub fn new(rel_eps: f64, max_iter: usize) -> Result<Self> {
        if !(rel_eps > 0.0) || max_iter == 0 {
            return Err(Error::DomainError(format!(
                "tolerance needs rel_eps > 0 and max_iter >= 1 (got {rel_eps}, {max_iter})"
            )));
        }
        Ok(Tolerance { rel_eps, max_iter })
    }
}

// The continued fractions below stop when the update is within machine
// precision of 1; rel_eps is a floor for that test, never a ceiling.
fn cf_eps(tol: &Tolerance) -> f64 {
    tol.rel_eps.clamp(f64::EPSILON, 1e-15)
}

const TINY: f64 = 1e-300;

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta function I_x(a, b).
pub fn reg_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    reg_incomplete_beta_with(a, b, x, &Tolerance::default())
}

pub fn reg_incomplete_beta_with(a: f64, b: f64, x: f64, tol: &Tolerance) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainError(format!(
            "incomplete beta needs a > 0, b > 0, x in [0,1] (got a={a}, b={b}, x={x})"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((ln_front.exp() * beta_cf(a, b, x, tol)? / a).clamp(0.0, 1.0))
    } else {
        Ok((1.0 - ln_front.exp() * beta_cf(b, a, 1.0 - x, tol)? / b).clamp(0.0, 1.0))
    }
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_cf(a: f64, b: f64, x: f64, tol: &Tolerance) -> Result<f64> {
    let eps = cf_eps(tol);
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=tol.max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= eps {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence(tol.max_iter))
}

/// Regularized lower incomplete gamma function P(s, x).
pub fn reg_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    reg_incomplete_gamma_with(s, x, &Tolerance::default())
}

pub fn reg_incomplete_gamma_with(s: f64, x: f64, tol: &Tolerance) -> Result<f64> {
    check_gamma_args(s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < s + 1.0 {
        gamma_series(s, x, tol)
    } else {
        Ok(1.0 - gamma_cf(s, x, tol)?)
    }
}

/// Regularized upper incomplete gamma function Q(s, x) = 1 - P(s, x),
/// computed without cancellation in the upper tail.
pub fn reg_incomplete_gamma_upper(s: f64, x: f64) -> Result<f64> {
    let tol = Tolerance::default();
    check_gamma_args(s, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < s + 1.0 {
        Ok(1.0 - gamma_series(s, x, &tol)?)
    } else {
        gamma_cf(s, x, &tol)
    }
}

fn check_gamma_args(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !(x >= 0.0) || x.is_nan() {
        return Err(Error::DomainError(format!(
            "incomplete gamma needs s > 0, x >= 0 (got s={s}, x={x})"
        )));
    }
    Ok(())
}

fn gamma_series(s: f64, x: f64, tol: &Tolerance) -> Result<f64> {
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    for _ in 0..tol.max_iter {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * cf_eps(tol) {
            let v = sum * (-x + s * x.ln() - ln_gamma(s)).exp();
            return Ok(v.clamp(0.0, 1.0));
        }
    }
    Err(Error::NoConvergence(tol.max_iter))
}

fn gamma_cf(s: f64, x: f64, tol: &Tolerance) -> Result<f64> {
    let eps = cf_eps(tol);
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=tol.max_iter {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= eps {
            let v = (-x + s * x.ln() - ln_gamma(s)).exp() * h;
            return Ok(v.clamp(0.0, 1.0));
        }
    }
    Err(Error::NoConvergence(tol.max_iter))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.5;
    }
    let z = 0.5 * x * x;
    if x < 0.0 {
        0.5 * upper_gamma_half(z)
    } else {
        0.5 + 0.5 * lower_gamma_half(z)
    }
}

// P(1/2, z) and Q(1/2, z) with arguments that are always in-domain.
fn lower_gamma_half(z: f64) -> f64 {
    if z.is_infinite() {
        return 1.0;
    }
    reg_incomplete_gamma(0.5, z).expect("P(1/2, z) converges for finite z >= 0")
}

fn upper_gamma_half(z: f64) -> f64 {
    if z.is_infinite() {
        return 0.0;
    }
    reg_incomplete_gamma_upper(0.5, z).expect("Q(1/2, z) converges for finite z >= 0")
}

/// Standard normal quantile for `p` in (0, 1).
///
/// Rational approximation (Acklam) refined by one Halley step on
/// [`normal_cdf`]. Exactly antisymmetric: `q(1 - p) == -q(p)` whenever
/// `1 - p` is representable.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DomainError(format!(
            "normal quantile needs p in (0,1), got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        // 1 - p is exact for p in [0.5, 1]
        return Ok(-lower_normal_quantile(1.0 - p));
    }
    Ok(lower_normal_quantile(p))
}

fn lower_normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    // Halley refinement
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    if !u.is_finite() {
        return x;
    }
    x - u / (1.0 + 0.5 * x * u)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (SQRT_2 * PI.sqrt())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

/// Student t CDF with `nu` degrees of freedom.
pub fn student_t_cdf(t: f64, nu: f64) -> Result<f64> {
    check_positive("degrees of freedom", nu)?;
    if t.is_nan() {
        return Err(Error::DomainError("t is NaN".into()));
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let tail = 0.5 * student_t_two_sided(t, nu)?;
    Ok(if t > 0.0 { 1.0 - tail } else { tail })
}

/// Two-sided tail probability P(|T| >= |t|) = 2 * student_t_cdf(-|t|, nu).
pub fn student_t_two_sided(t: f64, nu: f64) -> Result<f64> {
    check_positive("degrees of freedom", nu)?;
    if t.is_infinite() {
        return Ok(0.0);
    }
    let x = nu / (nu + t * t);
    reg_incomplete_beta(0.5 * nu, 0.5, x)
}

/// Student t quantile, found by bracketed root finding on [`student_t_cdf`].
pub fn student_t_quantile(p: f64, nu: f64) -> Result<f64> {
    check_positive("degrees of freedom", nu)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DomainError(format!(
            "t quantile needs p in (0,1), got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // bracket around the normal quantile, widening geometrically
    let guess = normal_quantile(p)?;
    let (mut lo, mut hi) = if p > 0.5 {
        (0.0, guess.max(1.0))
    } else {
        (guess.min(-1.0), 0.0)
    };
    let f = |x: f64| student_t_cdf(x, nu).map(|c| c - p);
    let mut steps = 0;
    while f(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > 1100 {
            return Err(Error::NoConvergence(steps));
        }
    }
    while f(lo)? > 0.0 {
        hi = lo;
        lo *= 2.0;
        steps += 1;
        if steps > 1100 {
            return Err(Error::NoConvergence(steps));
        }
    }
    brent_root(f, lo, hi, 1e-13, 200)
}

/// F distribution CDF with `d1`, `d2` degrees of freedom.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_positive("d1", d1)?;
    check_positive("d2", d2)?;
    if !(x >= 0.0) {
        return Err(Error::DomainError(format!(
            "F statistic must be >= 0, got {x}"
        )));
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    reg_incomplete_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2))
}

/// Upper tail of the F distribution, 1 - [`f_cdf`], evaluated directly.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_positive("d1", d1)?;
    check_positive("d2", d2)?;
    if !(x >= 0.0) {
        return Err(Error::DomainError(format!(
            "F statistic must be >= 0, got {x}"
        )));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    reg_incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * x))
}

/// Chi-squared CDF with `k` degrees of freedom.
pub fn chi2_cdf(x: f64, k: f64) -> Result<f64> {
    check_positive("degrees of freedom", k)?;
    if x.is_infinite() && x > 0.0 {
        return Ok(1.0);
    }
    reg_incomplete_gamma(0.5 * k, 0.5 * x)
}

/// Chi-squared upper tail, 1 - [`chi2_cdf`].
pub fn chi2_sf(x: f64, k: f64) -> Result<f64> {
    check_positive("degrees of freedom", k)?;
    if x.is_infinite() && x > 0.0 {
        return Ok(0.0);
    }
    reg_incomplete_gamma_upper(0.5 * k, 0.5 * x)
}

/// Brent's method on a bracketing interval `[a, b]` where `f` changes sign.
pub fn brent_root<F>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::DomainError(format!(
            "root not bracketed by [{a}, {b}]"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b)?;
    }
    Err(Error::NoConvergence(max_iter))
}
