//! Statistics kernel: Welch's unequal-variance t-test, the Student-t CDF it
//! relies on, and the small vector helpers used by topic comparisons.
//!
//! The Student-t CDF goes through the regularized incomplete beta function,
//! evaluated with a modified-Lentz continued fraction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_CF_ITERATIONS: usize = 10_000;

/// Outcome of a two-sample Welch t-test. `p_two_sided` is always in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct TTestResult<F = f64> {
    pub t: F,
    /// Welch–Satterthwaite degrees of freedom; not necessarily an integer.
    pub df: F,
    pub p_two_sided: F,
    pub mean_a: F,
    pub mean_b: F,
}

pub fn mean<F: Scalar>(values: &[F]) -> Option<F> {
    if values.is_empty() {
        return None;
    }
    Some(values.iter().copied().sum::<F>() / F::from_count(values.len()))
}

/// Unbiased (n - 1) sample variance, two-pass.
pub fn sample_variance<F: Scalar>(values: &[F]) -> Option<F> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    let ss: F = values.iter().map(|&v| (v - m) * (v - m)).sum();
    Some(ss / F::from_count(values.len() - 1))
}

/// Welch's two-sample t-test with a two-sided p-value.
///
/// Degenerate case: when both samples have zero variance the standard error is
/// zero. Equal means then give `t = 0, p = 1`; unequal means give
/// `t = ±inf, p = 0`. In both cases `df` is reported as `n_a + n_b - 2`.
pub fn welch_t_test<F: Scalar>(a: &[F], b: &[F]) -> Result<TTestResult<F>> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(Error::SampleTooSmall {
                needed: 2,
                got: s.len(),
            });
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("t-test sample contains a non-finite value".into()));
        }
    }
    let (na, nb) = (F::from_count(a.len()), F::from_count(b.len()));
    let mean_a = mean(a).unwrap();
    let mean_b = mean(b).unwrap();
    let se_a = sample_variance(a).unwrap() / na;
    let se_b = sample_variance(b).unwrap() / nb;
    let se2 = se_a + se_b;

    if se2 == F::zero() {
        let df = na + nb - F::lit(2.0);
        let (t, p) = if mean_a == mean_b {
            (F::zero(), F::one())
        } else if mean_a > mean_b {
            (F::infinity(), F::zero())
        } else {
            (F::neg_infinity(), F::zero())
        };
        return Ok(TTestResult {
            t,
            df,
            p_two_sided: p,
            mean_a,
            mean_b,
        });
    }

    let t = (mean_a - mean_b) / se2.sqrt();
    let df = se2 * se2 / (se_a * se_a / (na - F::one()) + se_b * se_b / (nb - F::one()));
    let p = t_two_sided_p(t, df);
    Ok(TTestResult {
        t,
        df,
        p_two_sided: p,
        mean_a,
        mean_b,
    })
}

/// `P(|T| >= |t|)` for a Student-t variable with `df` degrees of freedom.
pub fn t_two_sided_p<F: Scalar>(t: F, df: F) -> F {
    if t.is_nan() || !(df > F::zero()) {
        return F::nan();
    }
    if t.is_infinite() {
        return F::zero();
    }
    let t2 = t * t;
    let denom = df + t2;
    let p = reg_inc_beta(df / F::lit(2.0), F::lit(0.5), df / denom, t2 / denom);
    p.max(F::zero()).min(F::one())
}

/// Student-t cumulative distribution function.
///
/// Infinite `x` maps to 0 or 1. NaN input or `df <= 0` yields NaN.
pub fn t_cdf<F: Scalar>(x: F, df: F) -> F {
    if x.is_nan() || !(df > F::zero()) {
        return F::nan();
    }
    if x == F::infinity() {
        return F::one();
    }
    if x == F::neg_infinity() {
        return F::zero();
    }
    if x == F::zero() {
        return F::lit(0.5);
    }
    let half_tail = t_two_sided_p(x, df) / F::lit(2.0);
    if x > F::zero() {
        F::one() - half_tail
    } else {
        half_tail
    }
}

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7, n = 9).
pub fn ln_gamma<F: Scalar>(x: F) -> F {
    const G: f64 = 7.0;
    const COF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - F::one();
    let mut a = F::lit(COF[0]);
    for (i, &c) in COF.iter().enumerate().skip(1) {
        a += F::lit(c) / (x + F::from_count(i));
    }
    let t = x + F::lit(G + 0.5);
    let half_ln_two_pi = F::lit(0.918_938_533_204_672_8);
    half_ln_two_pi + (x + F::lit(0.5)) * t.ln() - t + a.ln()
}

/// Regularized incomplete beta `I_x(a, b)`.
///
/// `one_minus_x` is passed separately so callers that can form `1 - x` without
/// cancellation (the t-distribution near zero) keep full precision.
pub fn reg_inc_beta<F: Scalar>(a: F, b: F, x: F, one_minus_x: F) -> F {
    if x <= F::zero() {
        return F::zero();
    }
    if one_minus_x <= F::zero() {
        return F::one();
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * one_minus_x.ln();
    let front = ln_front.exp();
    if x < (a + F::one()) / (a + b + F::lit(2.0)) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        F::one() - front * beta_continued_fraction(b, a, one_minus_x) / b
    }
}

fn beta_continued_fraction<F: Scalar>(a: F, b: F, x: F) -> F {
    let tol = F::lit(1e-14).max(F::epsilon() * F::lit(4.0));
    let tiny = F::min_positive_value() / F::epsilon();
    let one = F::one();
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;

    let clamp = |v: F| if v.abs() < tiny { tiny } else { v };

    let mut c = one;
    let mut d = one / clamp(one - qab * x / qap);
    let mut h = d;
    for m in 1..=MAX_CF_ITERATIONS {
        let m = F::from_count(m);
        let m2 = m + m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one / clamp(one + aa * d);
        c = clamp(one + aa / c);
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one / clamp(one + aa * d);
        c = clamp(one + aa / c);
        let del = d * c;
        h *= del;
        if (del - one).abs() < tol {
            break;
        }
    }
    h
}

pub fn euclidean_distance<F: Scalar>(u: &[F], v: &[F]) -> Result<F> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(squared_distance(u, v).sqrt())
}

#[inline]
pub(crate) fn squared_distance<F: Scalar>(u: &[F], v: &[F]) -> F {
    u.iter()
        .zip(v)
        .map(|(&a, &b)| (a - b) * (a - b))
        .fold(F::zero(), |acc, x| acc + x)
}

/// Element-wise arithmetic mean of equal-length rows.
pub fn mean_vector<F: Scalar, R: AsRef<[F]>>(rows: &[R]) -> Result<Vec<F>> {
    let first = rows.first().ok_or(Error::SampleTooSmall { needed: 1, got: 0 })?;
    let width = first.as_ref().len();
    let mut acc = vec![F::zero(); width];
    for row in rows {
        let row = row.as_ref();
        if row.len() != width {
            return Err(Error::LengthMismatch {
                left: width,
                right: row.len(),
            });
        }
        for (a, &x) in acc.iter_mut().zip(row) {
            *a += x;
        }
    }
    let n = F::from_count(rows.len());
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(acc)
}
