//! Closed-form bounds on the number of observation nodes.
//!
//! Entropy bounds follow from the per-node output entropy of a function class
//! under uniformly random inputs: `n` observed bits are needed in total, the
//! time-1 state carries at most `n * H` of them, and the rest must come from
//! `y(0)`. Counting bounds follow from states that only `y(0)` can separate.

use std::f64::consts::LN_2;
use std::fmt;

use serde::Serialize;

use crate::state_space::{max_count, StateSpaceSummary};

/// Slack for the strict inequality flags.
pub const INEQUALITY_TOLERANCE: f64 = 1e-9;

/// Binary entropy in bits with the `0 log 0 = 0` convention.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Shannon entropy in bits of a distribution given by nonnegative weights.
pub fn entropy(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum()
}

/// Output entropy of an AND (or OR) of `k` literals under uniform inputs:
/// one of the `2^k` assignments differs from the rest.
pub fn andor_entropy(k: u32) -> f64 {
    assert!(k >= 1, "K must be at least 1");
    // H(2^-k) = k 2^-k - (1 - 2^-k) log2(1 - 2^-k), kept in log1p form so
    // large k does not cancel
    let eps = (-(k as f64)).exp2();
    k as f64 * eps - (1.0 - eps) * (-eps).ln_1p() / LN_2
}

pub fn andor_lower_coefficient(k: u32) -> f64 {
    1.0 - andor_entropy(k)
}

pub fn andor_lower(n: usize, k: u32) -> f64 {
    n as f64 * andor_lower_coefficient(k)
}

/// Largest output entropy of a canalyzing function of `k` literals, reached
/// at output frequencies `(2^(k-1) - 1, 2^(k-1) + 1) / 2^k`.
pub fn beta(k: u32) -> f64 {
    assert!(k >= 1, "K must be at least 1");
    let total = (k as f64).exp2();
    let half = (k as f64 - 1.0).exp2();
    binary_entropy((half - 1.0) / total)
}

/// `1 - beta(k)` without cancellation.
///
/// With `p = (1 - d) / 2` and `d = 2^(1-k)`,
/// `1 - H(p) = sum_{j>=1} d^(2j) / (j (2j - 1)) / (2 ln 2)`.
pub fn nc_lower_coefficient(k: u32) -> f64 {
    assert!(k >= 1, "K must be at least 1");
    if k == 1 {
        return 1.0;
    }
    let d2 = (2.0 - 2.0 * k as f64).exp2();
    let mut term = 1.0;
    let mut sum = 0.0;
    for j in 1..200u32 {
        term *= d2;
        let add = term / (j as f64 * (2 * j - 1) as f64);
        sum += add;
        if add < sum * 1e-18 {
            break;
        }
    }
    sum / (2.0 * LN_2)
}

pub fn nc_lower(n: usize, k: u32) -> f64 {
    n as f64 * nc_lower_coefficient(k)
}

/// `I_K = (2^K - 1) * andor_entropy(K)`, the entropy of one best-case block's
/// time-1 state measured per node.
pub fn i_k(k: u32) -> f64 {
    ((k as f64).exp2() - 1.0) * andor_entropy(k)
}

/// Smallest `m` with `2^m >= x` (0 for `x <= 1`).
pub fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        (64 - (x - 1).leading_zeros()) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    EntropyAndOr,
    EntropyNc,
    Count,
    FixedPoint,
    BestCaseAndOr,
    BestCaseNc,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::EntropyAndOr => "entropy-and-or",
            BoundKind::EntropyNc => "entropy-nc",
            BoundKind::Count => "count",
            BoundKind::FixedPoint => "fixed-point",
            BoundKind::BestCaseAndOr => "best-case-and-or",
            BoundKind::BestCaseNc => "best-case-nc",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BoundParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_points: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    /// Real-valued bound (bits or node count).
    pub value: f64,
    /// Sharpest integer consequence of `value`.
    pub integer: u64,
    pub params: BoundParams,
}

impl BoundReport {
    fn real(kind: BoundKind, value: f64, params: BoundParams) -> Self {
        BoundReport {
            kind,
            value,
            integer: (value - INEQUALITY_TOLERANCE).ceil().max(0.0) as u64,
            params,
        }
    }
}

pub fn count_bound(summary: &StateSpaceSummary) -> BoundReport {
    let max = max_count(summary);
    BoundReport {
        kind: BoundKind::Count,
        value: (max.max(1) as f64).log2(),
        integer: ceil_log2(max),
        params: BoundParams {
            n: Some(summary.n),
            max_count: Some(max),
            ..Default::default()
        },
    }
}

pub fn fixed_point_bound(summary: &StateSpaceSummary) -> BoundReport {
    let l = summary.fixed_point_count() as u64;
    BoundReport {
        kind: BoundKind::FixedPoint,
        value: (l.max(1) as f64).log2(),
        integer: ceil_log2(l),
        params: BoundParams {
            n: Some(summary.n),
            fixed_points: Some(l),
            ..Default::default()
        },
    }
}

pub fn andor_entropy_bound(n: usize, k: u32) -> BoundReport {
    BoundReport::real(
        BoundKind::EntropyAndOr,
        andor_lower(n, k),
        BoundParams {
            n: Some(n),
            k: Some(k),
            ..Default::default()
        },
    )
}

pub fn nc_entropy_bound(n: usize, k: u32) -> BoundReport {
    BoundReport::real(
        BoundKind::EntropyNc,
        nc_lower(n, k),
        BoundParams {
            n: Some(n),
            k: Some(k),
            ..Default::default()
        },
    )
}

/// Observer counts achieved by the best-case constructions at size `n`.
pub fn best_case_and_or(n: usize, k: u32) -> BoundReport {
    BoundReport::real(
        BoundKind::BestCaseAndOr,
        n as f64 * best_case_coefficients(k).and_or,
        BoundParams {
            n: Some(n),
            k: Some(k),
            ..Default::default()
        },
    )
}

pub fn best_case_nc(n: usize, k: u32) -> BoundReport {
    BoundReport {
        kind: BoundKind::BestCaseNc,
        value: n as f64 / k as f64,
        integer: n.div_ceil(k as usize) as u64,
        params: BoundParams {
            n: Some(n),
            k: Some(k),
            ..Default::default()
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestCaseCoefficients {
    /// `(2^K - K - 1) / (2^K - 1)`
    pub and_or: f64,
    /// `1 / K`
    pub nc: f64,
    /// XOR needs a constant number of observers, so its coefficient is 0.
    pub xor: f64,
    pub xor_absolute: u64,
}

pub fn best_case_coefficients(k: u32) -> BestCaseCoefficients {
    assert!(k >= 2, "K must be at least 2");
    let full = (k as f64).exp2() - 1.0;
    BestCaseCoefficients {
        and_or: (full - k as f64) / full,
        nc: 1.0 / k as f64,
        xor: 0.0,
        xor_absolute: 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientRow {
    #[serde(rename = "K")]
    pub k: u32,
    pub andor_lower_coeff: f64,
    pub andor_best_coeff: f64,
    pub one_minus_beta: f64,
    pub inv_k: f64,
    /// AND/OR best-case coefficient exceeds the entropy lower coefficient.
    pub andor_gap_positive: bool,
    /// `1/K` exceeds `1 - beta_K`.
    pub nc_gap_positive: bool,
    #[serde(rename = "I_K")]
    pub i_k: f64,
    #[serde(rename = "I_K_gt_K")]
    pub i_k_exceeds_k: bool,
}

impl CoefficientRow {
    pub const HEADER: [&'static str; 9] = [
        "K",
        "andor_lower_coeff",
        "andor_best_coeff",
        "one_minus_beta",
        "inv_k",
        "andor_gap_positive",
        "nc_gap_positive",
        "I_K",
        "I_K_gt_K",
    ];

    /// Best-case minus lower coefficient, from the entropy directly since
    /// both coefficients round towards 1 at large K.
    pub fn andor_margin(&self) -> f64 {
        andor_margin(self.k)
    }

    pub fn nc_margin(&self) -> f64 {
        self.inv_k - self.one_minus_beta
    }

    pub fn i_k_margin(&self) -> f64 {
        self.i_k - self.k as f64
    }
}

/// `K=3, 0.4564, 0.5714, 0.0456, 0.3333, true, true`
impl fmt::Display for CoefficientRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K={}, {:.4}, {:.4}, {:.4}, {:.4}, {}, {}",
            self.k,
            self.andor_lower_coeff,
            self.andor_best_coeff,
            self.one_minus_beta,
            self.inv_k,
            self.andor_gap_positive,
            self.nc_gap_positive
        )
    }
}

/// `H(2^-K) - K / (2^K - 1)`, the gap between the AND/OR best-case and
/// entropy lower coefficients.
pub fn andor_margin(k: u32) -> f64 {
    andor_entropy(k) - k as f64 / ((k as f64).exp2() - 1.0)
}

pub fn coefficient_row(k: u32) -> CoefficientRow {
    let best = best_case_coefficients(k);
    let andor_lower_coeff = andor_lower_coefficient(k);
    let one_minus_beta = nc_lower_coefficient(k);
    let i_k = i_k(k);
    CoefficientRow {
        k,
        andor_lower_coeff,
        andor_best_coeff: best.and_or,
        one_minus_beta,
        inv_k: best.nc,
        andor_gap_positive: andor_margin(k) > INEQUALITY_TOLERANCE,
        nc_gap_positive: best.nc - one_minus_beta > INEQUALITY_TOLERANCE,
        i_k,
        i_k_exceeds_k: i_k - k as f64 > INEQUALITY_TOLERANCE,
    }
}

pub fn coefficient_table(k_min: u32, k_max: u32) -> Vec<CoefficientRow> {
    (k_min.max(2)..=k_max).map(coefficient_row).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn andor_entropy_values() {
        assert!((andor_entropy(2) - 0.8113).abs() < 1e-4);
        assert!((andor_entropy(1) - 1.0).abs() < 1e-12);
        // 3 - (7/8) log2 7
        let direct = 3.0 - 7.0 / 8.0 * 7f64.log2();
        assert!((andor_entropy(3) - direct).abs() < 1e-12);
        assert!((andor_entropy(3) - 0.5436).abs() < 1e-4);
    }

    #[test]
    fn andor_entropy_matches_definition() {
        for k in 1..=20u32 {
            let total = (k as f64).exp2();
            let direct = entropy(&[1.0, total - 1.0]);
            assert!((andor_entropy(k) - direct).abs() < 1e-9, "K={k}");
        }
    }

    #[test]
    fn lower_bounds() {
        assert!((andor_lower(100, 2) - 18.87).abs() < 0.01);
        assert!((andor_lower(7, 3) - 3.195).abs() < 0.01);
        assert_eq!(andor_lower(50, 1), 0.0);
        assert!((nc_lower(12, 3) - 0.547).abs() < 0.01);
    }

    #[test]
    fn beta_values_and_series() {
        assert!((beta(2) - 0.8113).abs() < 1e-4);
        assert!((beta(2) - andor_entropy(2)).abs() < 1e-12);
        assert!((beta(3) - 0.9544).abs() < 1e-4);
        assert_eq!(beta(1), 0.0);
        for k in 2..=12u32 {
            assert!(
                ((1.0 - beta(k)) - nc_lower_coefficient(k)).abs() < 1e-12,
                "K={k}"
            );
        }
        // asymptotic form 1 - beta ~ (1/ln 2) 2^-(2K-1)
        for k in [15u32, 20, 30] {
            let approx = (-(2.0 * k as f64 - 1.0)).exp2() / LN_2;
            assert!((nc_lower_coefficient(k) / approx - 1.0).abs() < 1e-6, "K={k}");
        }
    }

    #[test]
    fn zero_log_zero() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert_eq!(entropy(&[0.0, 5.0]), 0.0);
    }

    #[test]
    fn integer_bounds() {
        assert_eq!(ceil_log2(0), 0);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(10), 4);
        assert_eq!(andor_entropy_bound(100, 2).integer, 19);
        assert_eq!(best_case_nc(11, 4).integer, 3);
    }

    #[test]
    fn best_case() {
        let c2 = best_case_coefficients(2);
        assert!((c2.and_or - 1.0 / 3.0).abs() < 1e-12);
        assert!((best_case_coefficients(3).and_or - 4.0 / 7.0).abs() < 1e-12);
        assert_eq!(best_case_coefficients(4).nc, 0.25);
        assert_eq!(best_case_and_or(15, 4).integer, 11);
    }

    #[test]
    fn coefficient_rows() {
        let row = coefficient_row(3);
        assert_eq!(row.to_string(), "K=3, 0.4564, 0.5714, 0.0456, 0.3333, true, true");
        let i2 = 3.0 * (2.0 - 0.75 * 3f64.log2());
        assert!((coefficient_row(2).i_k - i2).abs() < 1e-12);
        assert!((i2 - 2.434).abs() < 1e-3);
        let table = coefficient_table(2, 30);
        assert_eq!(table.len(), 29);
        assert!(table.iter().all(|r| r.andor_gap_positive && r.nc_gap_positive && r.i_k_exceeds_k));
    }

    #[test]
    fn monotone_in_k() {
        for k in 1..30u32 {
            assert!(andor_entropy(k + 1) < andor_entropy(k));
            // beta itself rounds to 1.0 in double precision past K ~ 27
            assert!(beta(k + 1) >= beta(k));
            assert!(nc_lower_coefficient(k + 1) < nc_lower_coefficient(k));
        }
    }
}
