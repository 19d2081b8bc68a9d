//! Exact calculators for the closed-form degree and probability bounds.
//!
//! Integer-valued bounds are computed with [`BigUint`]; probability bounds
//! of the shape `1 - 1/(deg * e^k)` are returned in log space as [`LogProb`].
//! Inequalities that involve `e` are decided with the rational sandwich
//! `2.718281828 < e < 2.718281829`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `C(a, b)`; zero when `b > a`.
pub fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial with a possibly negative top argument in the "monomials of
/// degree <= top in k variables" sense: `C(top + k, k)`, zero if `top < 0`.
fn monomial_count(top: i128, k: u64) -> BigUint {
    if top < 0 {
        BigUint::zero()
    } else {
        binomial(top as u64 + k, k)
    }
}

/// Largest `r` with `r^k <= value` (`k >= 1`).
pub fn floor_root(value: &BigUint, k: u64) -> BigUint {
    assert!(k >= 1, "root index must be positive");
    if k == 1 || value.is_zero() {
        return value.clone();
    }
    // r^k <= value  implies  r <= 2^(ceil(bits / k))
    let mut lo = BigUint::zero();
    let mut hi = BigUint::one() << (value.bits().div_ceil(k) as usize);
    while lo < hi {
        let mid: BigUint = (&lo + &hi + 1u32) >> 1usize;
        if mid.pow(k as u32) <= *value {
            lo = mid;
        } else {
            hi = mid - 1u32;
        }
    }
    lo
}

/// Serde adapter writing big integers as decimal strings.
pub mod big_decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A probability kept as its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogProb {
    pub ln: f64,
}

impl LogProb {
    pub const REL_TOL: f64 = 1e-9;

    pub fn from_ln(ln: f64) -> Self {
        Self { ln }
    }

    pub fn log10(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    pub fn value(&self) -> f64 {
        self.ln.exp()
    }

    /// `1 - self`, computed without cancellation for tiny probabilities.
    pub fn complement(&self) -> f64 {
        -self.ln.exp_m1()
    }
}

/// `ln` of the failure probability `1 / (deg_lci * e^(dim + (m-1) L))`.
pub fn density_failure(dim: u64, deg_lci: u64, m: u64, length: u64) -> LogProb {
    let exponent = dim as f64 + (m.saturating_sub(1) as f64) * length as f64;
    LogProb::from_ln(-((deg_lci as f64).ln() + exponent))
}

/// Which lower index the second intersection bound sums from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumStart {
    /// `1 + sum_{i=2}^s deg(C_i)` (theorem as stated in the body).
    #[default]
    Second,
    /// `1 + sum_{i=1}^s deg(C_i)` (version in the introduction).
    First,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionBounds {
    #[serde(with = "big_decimal")]
    pub first: BigUint,
    #[serde(with = "big_decimal")]
    pub second: BigUint,
    #[serde(with = "big_decimal")]
    pub average: BigUint,
}

/// Upper bounds for `deg_lci(C_1 ∩ ... ∩ C_s)` where `degrees[i] = deg_lci(C_{i+1})`
/// and `r = dim C_1`.
pub fn intersection_bounds(degrees: &[u64], r: u64, sum_start: SumStart) -> Result<IntersectionBounds> {
    let s = degrees.len() as u64;
    if s == 0 {
        return Err(Error::InvalidInput("need at least one degree".into()));
    }
    if degrees.contains(&0) {
        return Err(Error::InvalidInput("degrees must be >= 1".into()));
    }
    let deg1 = BigUint::from(degrees[0]);
    let rest_max = degrees[1..].iter().copied().max().unwrap_or(1);
    let first = binomial(s + r - 1, r) * &deg1 * BigUint::from(rest_max).pow(r as u32);

    let skip = match sum_start {
        SumStart::Second => 1,
        SumStart::First => 0,
    };
    let partial: BigUint = degrees[skip..].iter().map(|&d| BigUint::from(d)).sum();
    let second = &deg1 * (partial + 1u32).pow(r as u32);

    // s * average = total degree, so s^r * avg^r = total^r exactly
    let total: BigUint = degrees.iter().map(|&d| BigUint::from(d)).sum();
    let average = &deg1 * total.pow(r as u32);
    Ok(IntersectionBounds {
        first,
        second,
        average,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtrinsicBound {
    /// `N`
    #[serde(with = "big_decimal")]
    pub n_big: BigUint,
    /// `Ñ = C(N + (n-m), n-m)`
    #[serde(with = "big_decimal")]
    pub n_tilde: BigUint,
    /// `M = sum_i C(N - d_i + (n-m), n-m)`
    #[serde(with = "big_decimal")]
    pub m_sum: BigUint,
    /// `min{N, M + 1}`
    #[serde(with = "big_decimal")]
    pub n_prime: BigUint,
    #[serde(with = "big_decimal")]
    pub bound: BigUint,
}

/// Syntactic upper bound for the LCI-degree of the projection of
/// `V = V(g_1..g_s)` forgetting the last `n - m` variables.
pub fn extrinsic_bound(degrees: &[u64], n: u64, m: u64, dim_w: u64, deg_v: u64) -> Result<ExtrinsicBound> {
    if degrees.is_empty() {
        return Err(Error::InvalidInput("need at least one equation degree".into()));
    }
    if degrees.contains(&0) {
        return Err(Error::InvalidInput("equation degrees must be >= 1".into()));
    }
    if degrees.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::UnsortedDegrees);
    }
    if m >= n {
        return Err(Error::InvalidInput(format!("need n > m (got n = {n}, m = {m})")));
    }
    let k = n - m;
    let s = degrees.len() as u64;
    let n_big: BigUint = if s <= k {
        degrees.iter().map(|&d| BigUint::from(d)).product()
    } else {
        let head: BigUint = degrees[..(k - 1) as usize]
            .iter()
            .map(|&d| BigUint::from(d))
            .product();
        BigUint::from(2 * degrees[(s - 1) as usize]) * head - 1u32
    };
    let n_i128 = n_big
        .to_i128()
        .ok_or_else(|| Error::InvalidInput("N does not fit in 128 bits".into()))?;
    let n_tilde = binomial(n_i128 as u64 + k, k);
    let m_sum: BigUint = degrees
        .iter()
        .map(|&d| monomial_count(n_i128 - d as i128, k))
        .sum();
    let n_prime = (&m_sum + 1u32).min(n_big.clone());
    let bound = BigUint::from(deg_v)
        * BigUint::from(2 * degrees[0]).pow(dim_w as u32)
        * n_prime.pow(dim_w as u32 + 1);
    Ok(ExtrinsicBound {
        n_big,
        n_tilde,
        m_sum,
        n_prime,
        bound,
    })
}

/// Inputs of the density theorem's hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityInputs {
    pub n: u64,
    pub m: u64,
    /// max degree of the input list
    pub d: u64,
    /// sample length
    pub length: u64,
    pub dim_omega: u64,
    pub deg_lci_omega: u64,
    /// minimum degree of the sampling variety's equations
    pub delta: u64,
    /// maximum degree of the sampling variety's equations
    pub delta_max: u64,
    /// codimension of the sampling variety
    pub codim: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    /// false when the rational sandwich for `e` could not separate the sides
    pub exact: bool,
}

impl Check {
    fn exact(holds: bool) -> Self {
        Self { holds, exact: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisChecklist {
    /// `L >= 6 dim(Ω)`
    pub length: Check,
    /// `log δ >= 2 (1 + log(d+1))`
    pub delta_vs_degree: Check,
    /// `log δ >= 2 log(deg_lci Ω) / dim Ω`
    pub delta_vs_lci: Check,
    /// `max deg <= (1 + 1/(n-m)) δ`
    pub spread: Check,
    /// `r >= (n-m) + m/2 + 1/2`
    pub codim: Check,
    pub all: bool,
}

const E_LO: u64 = 2_718_281_828;
const E_HI: u64 = 2_718_281_829;
const E_SCALE: u64 = 1_000_000_000;

/// Decides `value >= e^2 * base` exactly where possible.
fn at_least_e_squared_times(value: &BigUint, base: &BigUint) -> Check {
    let lhs = value * BigUint::from(E_SCALE).pow(2);
    let hi = base * BigUint::from(E_HI).pow(2);
    let lo = base * BigUint::from(E_LO).pow(2);
    if lhs >= hi {
        Check::exact(true)
    } else if lhs < lo {
        Check::exact(false)
    } else {
        Check {
            holds: false,
            exact: false,
        }
    }
}

pub fn density_hypotheses(x: &DensityInputs) -> HypothesisChecklist {
    let length = Check::exact(x.length >= 6 * x.dim_omega);
    let delta = BigUint::from(x.delta);
    let delta_vs_degree = at_least_e_squared_times(&delta, &BigUint::from(x.d + 1).pow(2));
    // 2 ln(deg)/dim <= ln δ  <=>  deg^2 <= δ^dim
    let delta_vs_lci = if x.dim_omega == 0 {
        Check::exact(false)
    } else {
        Check::exact(BigUint::from(x.deg_lci_omega).pow(2) <= delta.pow(x.dim_omega as u32))
    };
    let spread = if x.n <= x.m {
        // 1 + 1/0: no constraint
        Check::exact(true)
    } else {
        let k = (x.n - x.m) as u128;
        Check::exact(x.delta_max as u128 * k <= (k + 1) * x.delta as u128)
    };
    let codim = Check::exact(2 * x.codim as u128 >= 2 * x.n.saturating_sub(x.m) as u128 + x.m as u128 + 1);
    let all = [length, delta_vs_degree, delta_vs_lci, spread, codim]
        .iter()
        .all(|c| c.holds);
    HypothesisChecklist {
        length,
        delta_vs_degree,
        delta_vs_lci,
        spread,
        codim,
        all,
    }
}

/// Smallest integer `δ` certified (via the upper end of the sandwich) to
/// satisfy `δ >= e^2 (d+1)^2`.
pub fn min_delta_for_degree(d: u64) -> u64 {
    let base = BigUint::from(d + 1).pow(2) * BigUint::from(E_HI).pow(2);
    let scale = BigUint::from(E_SCALE).pow(2);
    let q: BigUint = (&base + &scale - 1u32) / &scale;
    q.to_u64().expect("fits for any practical d")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SzBound {
    /// exact `1 - deg / card^codim` as `numerator / denominator` when the
    /// denominator fits in 128 bits
    pub exact: Option<(String, String)>,
    /// `log10(deg / card^codim)`
    pub failure_log10: f64,
    /// the bound itself as a float
    pub value: f64,
}

/// Lower bound `1 - deg_lci(C) / #(Q)^codim` for a random point of `Q^n`
/// to avoid the constructible set `C`.
pub fn sz_bound(deg_lci: u64, card_q: u64, codim: u64) -> Result<SzBound> {
    if card_q == 0 || codim == 0 {
        return Err(Error::InvalidInput("need card_Q >= 1 and codim >= 1".into()));
    }
    let den = BigUint::from(card_q).pow(codim as u32);
    let failure_ln = (deg_lci as f64).ln() - codim as f64 * (card_q as f64).ln();
    let exact = den.to_u128().map(|den128| {
        let num = den128 as i128 - deg_lci as i128;
        (num.to_string(), den128.to_string())
    });
    let value = match &exact {
        Some((num, den)) => num.parse::<f64>().unwrap() / den.parse::<f64>().unwrap(),
        None => -failure_ln.exp_m1(),
    };
    Ok(SzBound {
        exact,
        failure_log10: failure_ln / std::f64::consts::LN_10,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(9, 3), big(84));
        assert_eq!(binomial(6, 2), big(15));
        assert_eq!(binomial(3, 5), big(0));
        assert_eq!(binomial(0, 0), big(1));
    }

    #[test]
    fn binomial_symmetry_and_pascal() {
        for a in 0..=60u64 {
            for b in 0..=a {
                assert_eq!(binomial(a, b), binomial(a, a - b));
                if a > 0 && b > 0 {
                    assert_eq!(binomial(a, b), binomial(a - 1, b - 1) + binomial(a - 1, b));
                }
            }
        }
    }

    #[test]
    fn floor_root_examples() {
        assert_eq!(floor_root(&big(100), 2), big(10));
        assert_eq!(floor_root(&big(99), 2), big(9));
        assert_eq!(floor_root(&big(1), 6), big(1));
        assert_eq!(floor_root(&big(0), 3), big(0));
        assert_eq!(floor_root(&big(1 << 20), 20), big(2));
        for v in 0..2000u64 {
            for k in 1..5u64 {
                let r = floor_root(&big(v), k);
                assert!(r.pow(k as u32) <= big(v));
                assert!((r + 1u32).pow(k as u32) > big(v));
            }
        }
    }

    #[test]
    fn intersection_bound_examples() {
        let b = intersection_bounds(&[3, 2, 2], 2, SumStart::Second).unwrap();
        assert_eq!(b.first, big(72));
        assert_eq!(b.second, big(3 * 25));
        assert_eq!(b.average, big(3 * 49));
        let b1 = intersection_bounds(&[3, 2, 2], 2, SumStart::First).unwrap();
        assert_eq!(b1.second, big(3 * 64));
    }

    #[test]
    fn intersection_bound_degenerate_cases() {
        // points: the first bound collapses to deg_1
        let b = intersection_bounds(&[5, 7, 2], 0, SumStart::Second).unwrap();
        assert_eq!(b.first, big(5));
        // s = 2: (r+1) * deg1 * deg2 dominates plain Bezout
        for r in 0..6 {
            for d1 in 1..5 {
                for d2 in 1..5 {
                    let b = intersection_bounds(&[d1, d2], r, SumStart::Second).unwrap();
                    assert_eq!(b.first, big((r + 1) * d1 * d2.pow(r as u32)));
                    assert!(b.first >= big(d1 * d2) || r == 0);
                }
            }
        }
        assert!(intersection_bounds(&[], 1, SumStart::Second).is_err());
    }

    #[test]
    fn extrinsic_golden_value() {
        let e = extrinsic_bound(&[3, 2], 5, 2, 1, 6).unwrap();
        assert_eq!(
            (e.n_big.clone(), e.n_tilde.clone(), e.m_sum.clone(), e.n_prime.clone()),
            (big(6), big(84), big(55), big(6))
        );
        assert_eq!(e.bound, big(1296));
    }

    #[test]
    fn extrinsic_single_linear_equation() {
        for dim_w in 0..5 {
            let e = extrinsic_bound(&[1], 4, 1, dim_w, 3).unwrap();
            assert_eq!(e.n_big, big(1));
            assert_eq!(e.n_prime, big(1));
            assert_eq!(e.bound, big(3 * 2u64.pow(dim_w as u32)));
        }
    }

    #[test]
    fn extrinsic_overdetermined_branch() {
        // s = 3 > n - m = 2: N = 2 d_s d_1 - 1 = 2*2*4 - 1 = 15
        let e = extrinsic_bound(&[4, 3, 2], 4, 2, 1, 1).unwrap();
        assert_eq!(e.n_big, big(15));
        assert_eq!(e.m_sum, binomial(13, 2) + binomial(14, 2) + binomial(15, 2));
        assert_eq!(e.n_prime, big(15));
    }

    #[test]
    fn extrinsic_rejects_bad_input() {
        assert_eq!(extrinsic_bound(&[2, 3], 5, 2, 1, 1), Err(Error::UnsortedDegrees));
        assert!(extrinsic_bound(&[2], 2, 2, 1, 1).is_err());
    }

    #[test]
    fn extrinsic_monotone_in_deg_v() {
        let mut prev = big(0);
        for deg_v in 1..20 {
            let b = extrinsic_bound(&[3, 2, 2], 6, 2, 2, deg_v).unwrap().bound;
            assert!(b >= prev);
            prev = b;
        }
    }

    fn base_inputs() -> DensityInputs {
        DensityInputs {
            n: 4,
            m: 2,
            d: 2,
            length: 60,
            dim_omega: 10,
            deg_lci_omega: 1,
            delta: min_delta_for_degree(2),
            delta_max: min_delta_for_degree(2),
            codim: 4,
        }
    }

    #[test]
    fn zero_dimensional_regime_satisfies_degree_hypothesis() {
        for d in 0..50 {
            let mut x = base_inputs();
            x.d = d;
            x.delta = min_delta_for_degree(d);
            let c = density_hypotheses(&x).delta_vs_degree;
            assert!(c.holds && c.exact, "d = {d}");
            // the cruder certificate 8 (d+1)^2 passes as well
            x.delta = 8 * (d + 1) * (d + 1);
            assert!(density_hypotheses(&x).delta_vs_degree.holds);
            // 7 (d+1)^2 < e^2 (d+1)^2 fails
            x.delta = 7 * (d + 1) * (d + 1);
            assert!(!density_hypotheses(&x).delta_vs_degree.holds);
        }
        assert_eq!(min_delta_for_degree(0), 8);
    }

    #[test]
    fn length_boundary_and_codim_specialization() {
        let mut x = base_inputs();
        x.length = 6 * x.dim_omega;
        assert!(density_hypotheses(&x).length.holds);
        x.length -= 1;
        assert!(!density_hypotheses(&x).length.holds);

        // m = n: r >= m/2 + 1/2
        let mut x = base_inputs();
        x.m = 4;
        x.n = 4;
        x.codim = 2;
        assert!(!density_hypotheses(&x).codim.holds);
        x.codim = 3;
        assert!(density_hypotheses(&x).codim.holds);
        assert!(density_hypotheses(&x).spread.holds);
    }

    #[test]
    fn lci_hypothesis_is_exact() {
        let mut x = base_inputs();
        x.dim_omega = 2;
        x.deg_lci_omega = 10;
        x.delta = 10;
        assert!(density_hypotheses(&x).delta_vs_lci.holds);
        x.delta = 9;
        assert!(!density_hypotheses(&x).delta_vs_lci.holds);
    }

    #[test]
    fn sz_examples() {
        let b = sz_bound(2, 100, 1).unwrap();
        assert_eq!(b.exact, Some(("98".into(), "100".into())));
        assert!(b.value >= 0.98);
        let b = sz_bound(1, 7, 3).unwrap();
        assert!((b.value - (1.0 - 7f64.powi(-3))).abs() < 1e-15);
        for deg in 1..10 {
            for card in 1..10 {
                for codim in 1..4 {
                    assert!(sz_bound(deg, card, codim).unwrap().value <= 1.0);
                }
            }
        }
        // huge denominators fall back to log space
        let b = sz_bound(3, 1 << 40, 4).unwrap();
        assert!(b.exact.is_none());
        assert!(b.value <= 1.0 && b.value > 0.999);
    }

    #[test]
    fn density_failure_in_log_space() {
        let lp = density_failure(6, 1, 1, 36);
        assert!((lp.ln + 6.0).abs() < 1e-12);
        assert!((lp.complement() - (1.0 - (-6f64).exp())).abs() < 1e-12);
        let lp = density_failure(3, 5, 2, 10);
        assert!((lp.ln + (5f64.ln() + 13.0)).abs() < 1e-12);
    }
}
