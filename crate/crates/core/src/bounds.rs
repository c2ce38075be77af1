//! Closed-form detection-probability bounds and sufficient-budget
//! formulas, plus the special functions they need. Every logarithm is
//! natural; probability-valued outputs are clamped to [0, 1].

use crate::error::Error;
use crate::Result;

/// ln Γ(x) for x > 0 (Lanczos approximation, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
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
        // Reflection for small arguments.
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = 0.999_999_999_999_809_9;
    for (i, &c) in COEFFS.iter().enumerate() {
        a += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Continued fraction for the incomplete beta (modified Lentz algorithm).
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;
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
    for m in 1..=MAX_ITER {
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
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b), absolute error below
/// 1e-10 on the stated domain.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || a <= 0.0 || b <= 0.0 || x.is_nan() {
        return Err(Error::OutOfDomain(format!(
            "reg_inc_beta(x={x}, a={a}, b={b})"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)
        + a * x.ln()
        + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // The continued fraction converges fast for x below the mean.
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(x, a, b) / a
    } else {
        1.0 - front * beta_cf(1.0 - x, b, a) / b
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Probability that a p-truthful source survives the yes-majority filter
/// after r repetitions: I_p(r - floor(r/2), floor(r/2) + 1).
pub fn majority_success_prob(p: f64, r: u32) -> f64 {
    let half = (r / 2) as f64;
    reg_inc_beta(p, r as f64 - half, half + 1.0).expect("valid beta arguments")
}

/// Majority-filter lower bound: p + (1-p)(1 - e^{-p^2 ln r}).
pub fn lemma1_lower(p: f64, r: u32) -> f64 {
    (p + (1.0 - p) * (1.0 - (-p * p * (r as f64).ln()).exp())).clamp(0.0, 1.0)
}

/// Local-center lower bound: 1 - e^{-p^2 r ln r}; degenerate (0) at r = 1
/// where r ln r vanishes.
pub fn lemma2_lower(p: f64, r: u32) -> f64 {
    let r = r as f64;
    (1.0 - (-p * p * r * r.ln()).exp()).clamp(0.0, 1.0)
}

/// Detection lower bound for the batch scheme:
/// ((r+p)/(r+1)) (1 - c e^{-h/2}) with c = 7(d+1)/d and
/// h = [ln(K/r)/ln(d-1)] ln[ln(K/r)/ln(d-1)]. Returns 0 when K/r is too
/// small for h to be defined.
pub fn prop1_lower(k_budget: u64, r: u32, p: f64, d: u32) -> f64 {
    let t = ((k_budget as f64) / r as f64).ln() / (d as f64 - 1.0).ln();
    if t <= 1.0 {
        return 0.0;
    }
    let h = t * t.ln();
    let c = 7.0 * (d as f64 + 1.0) / d as f64;
    let value = ((r as f64 + p) / (r as f64 + 1.0)) * (1.0 - c * (-h / 2.0).exp());
    value.clamp(0.0, 1.0)
}

/// Probability the true parent wins an r-round designation vote:
/// g_d(r, q) = 1 - e^{-r(d-1)(q - 1/d)^2 / (3d(1-q))}; 1 in the q -> 1
/// limit.
pub fn g_d(r: u32, q: f64, d: u32) -> f64 {
    if q >= 1.0 {
        return 1.0;
    }
    let d = d as f64;
    let dev = q - 1.0 / d;
    (1.0 - (-(r as f64) * (d - 1.0) * dev * dev / (3.0 * d * (1.0 - q))).exp()).clamp(0.0, 1.0)
}

/// Detection lower bound for the interactive scheme:
/// 1 - c exp[-2 g_d^3 (K/(r+1)) ln(K/(r+1))] with c = (8d+1)/d.
pub fn prop2_lower(k_budget: u64, r: u32, q: f64, d: u32) -> f64 {
    let m = k_budget as f64 / (r as f64 + 1.0);
    let g = g_d(r, q, d);
    let c = (8.0 * d as f64 + 1.0) / d as f64;
    (1.0 - c * (-2.0 * g.powi(3) * m * m.ln()).exp()).clamp(0.0, 1.0)
}

/// Sufficient budget for batch detection with failure probability delta:
/// [4(d-1)/(d-2)] (2/delta) / ((p - 1/2)^2 ln(ln(2/delta))).
pub fn budget_bound_batch(delta: f64, p: f64, d: u32) -> Result<f64> {
    let limit = 2.0 / std::f64::consts::E;
    if !(delta > 0.0 && delta < limit) {
        return Err(Error::DeltaOutOfRange {
            formula: "budget-batch",
            delta,
            admissible: format!("(0, {limit:.4})"),
        });
    }
    let d = d as f64;
    let loglog = (2.0 / delta).ln().ln();
    Ok(4.0 * (d - 1.0) / (d - 2.0) * (2.0 / delta) / ((p - 0.5).powi(2) * loglog))
}

/// Sufficient budget for interactive detection with failure probability
/// delta: [(2d-3)/d] ln(7/delta) / ((q - 1/d)^3 ln(ln(7/delta))).
pub fn budget_bound_interactive(delta: f64, q: f64, d: u32) -> Result<f64> {
    let limit = 7.0 / std::f64::consts::E;
    if !(delta > 0.0 && delta < limit.min(1.0)) {
        return Err(Error::DeltaOutOfRange {
            formula: "budget-interactive",
            delta,
            admissible: "(0, 1)".into(),
        });
    }
    let d = d as f64;
    let loglog = (7.0 / delta).ln().ln();
    Ok((2.0 * d - 3.0) / d * (7.0 / delta).ln() / ((q - 1.0 / d).powi(3) * loglog))
}

/// Suspect-set detection lower bound:
/// 1 - [2(k-1)/k] (1 - I_{1/2}(1/(d-2), (d-1)/(d-2))).
pub fn phi_suspect_lower(k: u32, d: u32) -> f64 {
    let d = d as f64;
    let beta = reg_inc_beta(0.5, 1.0 / (d - 2.0), (d - 1.0) / (d - 2.0))
        .expect("valid beta arguments");
    (1.0 - 2.0 * (k as f64 - 1.0) / k as f64 * (1.0 - beta)).clamp(0.0, 1.0)
}
