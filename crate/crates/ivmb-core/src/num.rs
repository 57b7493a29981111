//! Scalar special functions backing every p-value in the crate.
//!
//! The χ², F, and t tail probabilities are computed from the regularized
//! incomplete gamma and beta functions, implemented with the classical
//! series / continued-fraction split (modified Lentz iteration) and a
//! Lanczos log-gamma. Accuracy is better than 1e-12 relative over the
//! ranges exercised by the tests, comfortably inside the 1e-10 contract.

/// Relative convergence target for the series and continued fractions.
const EPS: f64 = 1e-16;
/// Smallest magnitude substituted for a vanishing denominator in Lentz
/// iterations.
const TINY: f64 = 1e-300;
/// Iteration cap for series/continued fractions (generous; convergence is
/// typically < 100 terms for the df ranges used here).
const MAX_ITER: usize = 100_000;

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    // Coefficients for g = 7, n = 9 (double-precision standard set).
    const COEF: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    const G: f64 = 7.0;
    const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_7;
    debug_assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    if x < 0.5 {
        // Reflection keeps the Lanczos argument in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_93_f64;
    for (i, c) in COEF.iter().enumerate() {
        acc += c / (x + (i as f64) + 1.0);
    }
    let t = x + G + 0.5;
    SQRT_TWO_PI.ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Natural log of the multivariate gamma function Γ_l(x).
///
/// Γ_l(x) = π^{l(l−1)/4} · Π_{j=1..l} Γ(x + (1 − j)/2).
pub fn ln_multigamma(l: usize, x: f64) -> f64 {
    let mut acc = (l * (l - 1)) as f64 / 4.0 * std::f64::consts::PI.ln();
    for j in 1..=l {
        acc += ln_gamma(x + (1.0 - j as f64) / 2.0);
    }
    acc
}

/// Regularized lower incomplete gamma P(a, x) for `a > 0`, `x ≥ 0`.
pub fn reg_lower_gamma(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        lower_gamma_series(a, x)
    } else {
        1.0 - upper_gamma_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x).
pub fn reg_upper_gamma(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - lower_gamma_series(a, x)
    } else {
        upper_gamma_cf(a, x)
    }
}

/// Series expansion of P(a, x), accurate for x < a + 1.
fn lower_gamma_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut denom = a;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (a * x.ln() - x - ln_gamma(a)).exp()
}

/// Continued fraction for Q(a, x), accurate for x ≥ a + 1 (modified Lentz).
fn upper_gamma_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
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
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h * (a * x.ln() - x - ln_gamma(a)).exp()
}

/// Regularized incomplete beta I_x(a, b) for `a, b > 0`, `x ∈ [0, 1]`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0 && (0.0..=1.0).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let front =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    // Use the symmetry that keeps the continued fraction fast-converging.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Modified Lentz continued fraction for the incomplete beta.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
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
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        // Even step.
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
        // Odd step.
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
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Upper tail of the χ² distribution with `df` degrees of freedom.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    debug_assert!(df > 0.0);
    if x <= 0.0 {
        return 1.0;
    }
    reg_upper_gamma(df / 2.0, x / 2.0)
}

/// Upper tail of the F distribution with `(d1, d2)` degrees of freedom.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> f64 {
    debug_assert!(d1 > 0.0 && d2 > 0.0);
    if x <= 0.0 {
        return 1.0;
    }
    reg_inc_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x))
}

/// Two-sided tail probability of the t distribution with `df` degrees of
/// freedom: P(|T| ≥ |t|).
pub fn t_sf_two_sided(t: f64, df: f64) -> f64 {
    debug_assert!(df > 0.0);
    if t == 0.0 {
        return 1.0;
    }
    reg_inc_beta(df / 2.0, 0.5, df / (df + t * t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_factorials() {
        // Γ(n) = (n−1)! — spot-check integer and half-integer points.
        let cases = [
            (1.0, 0.0_f64),
            (2.0, 0.0),
            (5.0, 24.0_f64.ln()),
            (0.5, std::f64::consts::PI.sqrt().ln()),
            (10.5, 1_133_278.388_948_966_2_f64.ln()),
        ];
        for (x, want) in cases {
            assert!(
                (ln_gamma(x) - want).abs() < 1e-12 * (1.0 + want.abs()),
                "ln_gamma({x})"
            );
        }
    }

    #[test]
    fn incomplete_gamma_complements() {
        for (a, x) in [(0.5, 0.3), (2.0, 5.0), (25.0, 20.0), (0.5, 70.0)] {
            let p = reg_lower_gamma(a, x);
            let q = reg_upper_gamma(a, x);
            assert!((p + q - 1.0).abs() < 1e-14, "P+Q at a={a}, x={x}");
        }
    }

    #[test]
    fn incomplete_beta_symmetry() {
        for (a, b, x) in [(2.0, 3.0, 0.4), (0.5, 0.5, 0.9), (10.0, 1.5, 0.2)] {
            let lhs = reg_inc_beta(a, b, x);
            let rhs = 1.0 - reg_inc_beta(b, a, 1.0 - x);
            assert!((lhs - rhs).abs() < 1e-13, "I_x symmetry at ({a},{b},{x})");
        }
    }

    #[test]
    fn chi2_one_df_matches_normal_tail() {
        // For df=1, χ² tail at z² equals the two-sided normal tail at z;
        // at z = 1.959963984540054, p = 0.05.
        let z = 1.959_963_984_540_054_f64;
        let p = chi2_sf(z * z, 1.0);
        assert!((p - 0.05).abs() < 1e-12);
    }
}
