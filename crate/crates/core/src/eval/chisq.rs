use serde::{Deserialize, Serialize};

use crate::corpus::Location;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub table: Vec<Vec<f64>>,
    pub yates: bool,
    /// A row or column marginal is zero; statistic 0 and p 1 are reported.
    pub degenerate: bool,
}

/// Pearson chi-squared test of independence on an r×c table. The Yates
/// correction applies to 2×2 tables only.
pub fn chi_square(table: &[Vec<f64>], yates: bool) -> Result<ChiSquareResult> {
    let r = table.len();
    let c = table.first().map_or(0, Vec::len);
    if r < 2 || c < 2 || table.iter().any(|row| row.len() != c) {
        return Err(Error::shape(format!("contingency table must be at least 2×2 and rectangular, got {r} rows")));
    }
    if table.iter().flatten().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::invalid("contingency counts must be finite and non-negative"));
    }
    let rows: Vec<f64> = table.iter().map(|row| row.iter().sum()).collect();
    let cols: Vec<f64> = (0..c).map(|j| table.iter().map(|row| row[j]).sum()).collect();
    let total: f64 = rows.iter().sum();
    let yates = yates && r == 2 && c == 2;
    let dof = (r - 1) * (c - 1);
    if rows.iter().chain(&cols).any(|&m| m == 0.0) {
        return Ok(ChiSquareResult {
            statistic: 0.0,
            dof,
            p_value: 1.0,
            table: table.to_vec(),
            yates,
            degenerate: true,
        });
    }
    let mut stat = 0.0;
    for i in 0..r {
        for j in 0..c {
            let e = rows[i] * cols[j] / total;
            let mut d = (table[i][j] - e).abs();
            if yates {
                d = (d - 0.5).max(0.0);
            }
            stat += d * d / e;
        }
    }
    Ok(ChiSquareResult {
        statistic: stat,
        dof,
        p_value: chi2_sf(stat, dof as f64),
        table: table.to_vec(),
        yates,
        degenerate: false,
    })
}

/// 2×2 design: rows correct/incorrect, columns inter/intra.
pub fn chi_square_location(correct: &[bool], locations: &[Location], yates: bool) -> Result<ChiSquareResult> {
    if correct.len() != locations.len() {
        return Err(Error::shape(format!("{} outcomes vs {} locations", correct.len(), locations.len())));
    }
    let mut t = vec![vec![0.0; 2]; 2];
    for (&ok, loc) in correct.iter().zip(locations) {
        t[usize::from(!ok)][usize::from(loc.is_intra())] += 1.0;
    }
    chi_square(&t, yates)
}

/// Senses × location design over the labels that occur.
pub fn chi_square_senses(senses: &[usize], locations: &[Location]) -> Result<ChiSquareResult> {
    if senses.len() != locations.len() {
        return Err(Error::shape(format!("{} senses vs {} locations", senses.len(), locations.len())));
    }
    let mut present: Vec<usize> = senses.to_vec();
    present.sort_unstable();
    present.dedup();
    let mut t = vec![vec![0.0; 2]; present.len()];
    for (s, loc) in senses.iter().zip(locations) {
        let i = present.binary_search(s).unwrap();
        t[i][usize::from(loc.is_intra())] += 1.0;
    }
    chi_square(&t, false)
}

/// Upper tail of the chi-squared distribution.
pub fn chi2_sf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(dof / 2.0, x / 2.0)
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..10_000 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

// Modified Lentz evaluation of the continued fraction.
fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
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
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Lanczos approximation (g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
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
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + 7.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}
