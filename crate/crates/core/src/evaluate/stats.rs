//! Paired t-test and the special functions behind its p-value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedTTest<T> {
    pub n: usize,
    pub mean_delta: T,
    pub sd_delta: T,
    /// `None` when every delta is the same non-zero value (t is infinite).
    pub t: Option<T>,
    pub df: usize,
    /// Two-sided.
    pub p_value: T,
    pub degenerate: bool,
}

/// Paired t-test on `after[i] - before[i]`.
///
/// All-zero deltas give `t = 0, p = 1`; constant non-zero deltas give
/// `p = 0` with `degenerate` set.
pub fn paired_t_test<T: Scalar>(before: &[T], after: &[T]) -> Result<PairedTTest<T>> {
    if before.len() != after.len() {
        return Err(Error::Shape {
            expected: before.len(),
            found: after.len(),
        });
    }
    let n = before.len();
    if n < 2 {
        return Err(Error::Config("a paired t-test needs at least two pairs".into()));
    }
    let deltas: Vec<T> = before.iter().zip(after).map(|(&b, &a)| a - b).collect();
    let nf = T::from_usize_lossy(n);
    let mean = deltas.iter().copied().sum::<T>() / nf;
    let ss: T = deltas.iter().map(|&d| (d - mean) * (d - mean)).sum();
    let sd = (ss / (nf - T::one())).sqrt();
    let df = n - 1;
    if sd == T::zero() {
        return Ok(if mean == T::zero() {
            PairedTTest {
                n,
                mean_delta: mean,
                sd_delta: sd,
                t: Some(T::zero()),
                df,
                p_value: T::one(),
                degenerate: false,
            }
        } else {
            PairedTTest {
                n,
                mean_delta: mean,
                sd_delta: sd,
                t: None,
                df,
                p_value: T::zero(),
                degenerate: true,
            }
        });
    }
    let t = mean / (sd / nf.sqrt());
    Ok(PairedTTest {
        n,
        mean_delta: mean,
        sd_delta: sd,
        t: Some(t),
        df,
        p_value: students_t_two_sided_p(t, T::from_usize_lossy(df)),
        degenerate: false,
    })
}

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
pub fn students_t_two_sided_p<T: Scalar>(t: T, df: T) -> T {
    if t == T::zero() {
        return T::one();
    }
    let x = df / (df + t * t);
    let half = T::lit(0.5);
    regularized_incomplete_beta(x, df * half, half).max(T::zero()).min(T::one())
}

/// Lanczos approximation, g = 7, nine coefficients.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
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
    let pi = T::lit(std::f64::consts::PI);
    if x < T::lit(0.5) {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(COEF[0]);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::lit(G + 0.5);
    T::lit(0.5) * (T::lit(2.0) * pi).ln() + (x + T::lit(0.5)) * t.ln() - t + acc.ln()
}

/// I_x(a, b) via the Lentz continued fraction.
pub fn regularized_incomplete_beta<T: Scalar>(x: T, a: T, b: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::one() {
        return T::one();
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (T::one() - x).ln();
    let front = ln_front.exp();
    if x < (a + T::one()) / (a + b + T::lit(2.0)) {
        front * beta_cf(x, a, b) / a
    } else {
        T::one() - front * beta_cf(T::one() - x, b, a) / b
    }
}

fn beta_cf<T: Scalar>(x: T, a: T, b: T) -> T {
    let eps = T::epsilon();
    let tiny = T::min_positive_value() / eps;
    let one = T::one();
    let two = T::lit(2.0);
    let clamp = |v: T| if v.abs() < tiny { tiny } else { v };
    let (qab, qap, qam) = (a + b, a + one, a - one);
    let mut c = one;
    let mut d = one / clamp(one - qab * x / qap);
    let mut h = d;
    for m in 1..=500 {
        let m = T::from_usize_lossy(m);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one / clamp(one + aa * d);
        c = clamp(one + aa / c);
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one / clamp(one + aa * d);
        c = clamp(one + aa / c);
        let del = d * c;
        h = h * del;
        if (del - one).abs() <= eps {
            break;
        }
    }
    h
}
