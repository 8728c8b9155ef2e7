//! Closed-form predictions and coupon-collector combinatorics, plus
//! disorder-averaging helpers.
//!
//! Coverage probabilities are evaluated exactly (big-integer Stirling table)
//! for small draw counts and in floating point for large ones. The large-n
//! path uses the alternating inclusion-exclusion sum in log space when it is
//! numerically safe and falls back to a nonnegative occupancy DP otherwise.

use num_bigint::BigUint;
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::krylov::ComplexitySeries;

/// Largest n evaluated through the exact big-integer table.
pub const EXACT_COVERAGE_MAX_N: u64 = 64;

/// Table of Stirling numbers of the second kind S(n, m), 0 <= m <= n <= max_n.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    rows: Vec<Vec<BigUint>>,
}

impl StirlingTable {
    pub fn new(max_n: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![BigUint::one()]); // S(0,0) = 1
        for n in 1..=max_n {
            let prev = &rows[n - 1];
            let mut row = vec![BigUint::zero(); n + 1];
            for m in 1..=n {
                // S(n, m) = m*S(n-1, m) + S(n-1, m-1)
                let mut v = prev[m - 1].clone();
                if m < n {
                    v += BigUint::from(m) * &prev[m];
                }
                row[m] = v;
            }
            rows.push(row);
        }
        Self { rows }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// S(n, m); zero when m > n.
    pub fn get(&self, n: usize, m: usize) -> BigUint {
        if m > n {
            return BigUint::zero();
        }
        self.rows[n][m].clone()
    }
}

fn factorial(k: u64) -> BigUint {
    (1..=k).map(BigUint::from).product::<BigUint>().max(BigUint::one())
}

fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn ratio_to_f64(num: BigUint, den: BigUint) -> f64 {
    Ratio::<BigInt>::new(num.into(), den.into()).to_f64().unwrap_or(f64::NAN)
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: u64) -> f64 {
    statrs::function::gamma::ln_gamma(n as f64 + 1.0)
}

/// Expected spread complexity under per-step global Haar evolution:
/// `t - t(t-1)/(2D)` for t < D, continued at the plateau `D/2` for t >= D.
pub fn expected_complexity_haar(t: u64, d: u64) -> f64 {
    let df = d as f64;
    if t >= d {
        return df / 2.0;
    }
    let tf = t as f64;
    tf - tf * (tf - 1.0) / (2.0 * df)
}

/// Occupancy DP: distribution of the number of distinct outcomes after n
/// uniform draws from D. Nonnegative recurrence, stable for any n.
fn occupancy_distribution(n: u64, d: u64) -> Vec<f64> {
    let dd = d as usize;
    let mut p = vec![0.0f64; dd + 1];
    p[0] = 1.0;
    let df = d as f64;
    for _ in 0..n {
        let mut next = vec![0.0f64; dd + 1];
        for m in 0..=dd {
            if p[m] == 0.0 {
                continue;
            }
            // repeat draw
            next[m] += p[m] * m as f64 / df;
            // new outcome
            if m < dd {
                next[m + 1] += p[m] * (df - m as f64) / df;
            }
        }
        p = next;
    }
    p
}

/// Whether the inclusion-exclusion terms for coverage are strictly
/// decreasing in magnitude (no catastrophic cancellation).
fn inclusion_exclusion_stable(n: u64, d: u64) -> bool {
    // |t_{k+1}/t_k| = (D-k)/(k+1) * ((D-k-1)/(D-k))^n < 1 for all k iff it
    // holds at k = 0, where the ratio is D (1 - 1/D)^n
    let df = d as f64;
    let nf = n as f64;
    df.ln() + nf * ((df - 1.0) / df).ln() < 0.0
}

/// Log-space inclusion-exclusion for P(n, D) = Σ_k (-1)^k C(D,k)(1-k/D)^n.
fn coverage_inclusion_exclusion(n: u64, d: u64) -> f64 {
    let df = d as f64;
    let nf = n as f64;
    // peel off the k = 0 term and scale the rest relative to it
    let mut sum = 1.0;
    let mut comp = 0.0; // Kahan compensation
    for k in 1..d {
        let ln_term = ln_binomial(d, k) + nf * ((df - k as f64) / df).ln();
        let term = if k % 2 == 0 { ln_term.exp() } else { -ln_term.exp() };
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum.clamp(0.0, 1.0)
}

/// Probability that n uniform draws from a D-element basis cover every
/// element at least once: `P(n, D) = D!/Dⁿ · S(n, D)`.
pub fn coverage_probability(n: u64, d: u64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if n < d {
        return Ok(0.0);
    }
    if n <= EXACT_COVERAGE_MAX_N {
        return Ok(coverage_probability_exact(n, d));
    }
    Ok(coverage_probability_float(n, d))
}

/// Exact rational evaluation via the Stirling table (n <= 64).
pub fn coverage_probability_exact(n: u64, d: u64) -> f64 {
    if n < d {
        return 0.0;
    }
    let table = StirlingTable::new(n as usize);
    let num = factorial(d) * table.get(n as usize, d as usize);
    let den = BigUint::from(d).pow(n as u32);
    ratio_to_f64(num, den)
}

/// Floating-point evaluation for large n: log-space inclusion-exclusion when
/// the alternating series is stable, occupancy DP otherwise.
pub fn coverage_probability_float(n: u64, d: u64) -> f64 {
    if n < d {
        return 0.0;
    }
    if d == 1 {
        return 1.0;
    }
    if inclusion_exclusion_stable(n, d) {
        coverage_inclusion_exclusion(n, d)
    } else {
        occupancy_distribution(n, d)[d as usize]
    }
}

/// Probability that exactly m distinct basis vectors appear in n uniform
/// draws from D: `P(n, m) = C(D, m) · S(n, m) · m! / Dⁿ`.
pub fn partial_coverage_probability(n: u64, m: u64, d: u64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if m > n || m > d {
        return Ok(0.0);
    }
    if n == 0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    if m == 0 {
        return Ok(0.0);
    }
    if n <= EXACT_COVERAGE_MAX_N {
        let table = StirlingTable::new(n as usize);
        let num = binomial_big(d, m) * table.get(n as usize, m as usize) * factorial(m);
        let den = BigUint::from(d).pow(n as u32);
        return Ok(ratio_to_f64(num, den));
    }
    Ok(occupancy_distribution(n, d)[m as usize])
}

/// Full distribution over the number of distinct draws, Σ_m P(n, m) = 1.
pub fn partial_coverage_distribution(n: u64, d: u64) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if n <= EXACT_COVERAGE_MAX_N {
        (0..=d).map(|m| partial_coverage_probability(n, m, d)).collect()
    } else {
        Ok(occupancy_distribution(n, d))
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SaturationBound {
    /// Smallest n with coverage probability >= 1 - epsilon.
    pub draws: u64,
    /// Analytic proxy D·ln(D/epsilon).
    pub analytic_proxy: f64,
}

/// Coupon-collector bound on the p = 1 saturation time: smallest n with
/// `P(n, D) >= 1 - epsilon`, found by bisection.
pub fn saturation_time_bound(d: u64, epsilon: f64) -> Result<SaturationBound> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    let target = 1.0 - epsilon;
    let analytic_proxy = (d as f64) * ((d as f64) / epsilon).ln();
    // bracket [lo, hi] with P(lo) < target <= P(hi)
    let mut lo = d - 1; // P < 1 always holds below d, and P(d-1) = 0
    let mut hi = d.max((2.0 * analytic_proxy).ceil() as u64).max(d + 1);
    while coverage_probability(hi, d)? < target {
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if coverage_probability(mid, d)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(SaturationBound { draws: hi, analytic_proxy })
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MinComplexityEstimate {
    /// Most probable number of distinct draws after t steps.
    pub m_max: u64,
    /// Modal estimate `m_max · P(t, m_max)`.
    pub estimate: f64,
    /// Full expectation Σ_m m·P(t, m) (extension, not the modal collapse).
    pub expectation: f64,
    /// Asymptotic proxy (D·t)^(1/3).
    pub asymptotic_proxy: f64,
}

/// Minimal-growth estimate at measurement rate p = 1: the mode of the
/// distinct-draw distribution and the modal complexity estimate.
pub fn min_complexity_estimate(t: u64, d: u64) -> Result<MinComplexityEstimate> {
    if t == 0 {
        return Err(Error::InvalidParameter("need t >= 1".into()));
    }
    let dist = partial_coverage_distribution(t, d)?;
    let mut m_max = 1u64;
    let mut best = f64::NEG_INFINITY;
    for (m, &p) in dist.iter().enumerate().skip(1) {
        if p > best {
            best = p;
            m_max = m as u64;
        }
    }
    let expectation = dist.iter().enumerate().map(|(m, &p)| m as f64 * p).sum();
    Ok(MinComplexityEstimate {
        m_max,
        estimate: m_max as f64 * best,
        expectation,
        asymptotic_proxy: ((d as f64) * (t as f64)).cbrt(),
    })
}

/// Pointwise mean / standard error over disorder realizations.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct AveragedSeries {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub sample_count: usize,
}

impl AveragedSeries {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}

/// Pointwise mean and standard error (sample std / sqrt(count)); a single
/// series gets stderr 0 by convention.
pub fn aggregate(series: &[ComplexitySeries]) -> Result<AveragedSeries> {
    if series.is_empty() {
        return Err(Error::Aggregation("no series to aggregate".into()));
    }
    let len = series[0].len();
    if series.iter().any(|s| s.len() != len) {
        return Err(Error::Aggregation("series lengths differ".into()));
    }
    let count = series.len();
    let mut mean = vec![0.0; len];
    let mut stderr = vec![0.0; len];
    for t in 0..len {
        let m = series.iter().map(|s| s.values[t]).sum::<f64>() / count as f64;
        mean[t] = m;
        if count > 1 {
            let var = series
                .iter()
                .map(|s| (s.values[t] - m) * (s.values[t] - m))
                .sum::<f64>()
                / (count as f64 - 1.0);
            stderr[t] = (var / count as f64).sqrt();
        }
    }
    Ok(AveragedSeries { mean, stderr, sample_count: count })
}
