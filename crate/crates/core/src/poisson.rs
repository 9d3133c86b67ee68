//! Numerics for the zero-round vertex cover constant.
//!
//! For `Y ~ Poisson(λ)` with pmf `q_k`, the threshold variable
//!
//! ```text
//! F* = 0 if Y <= m,  1 - β if Y = m + 1,  1 if Y >= m + 2
//! ```
//!
//! minimizes `E[F]` subject to `F ∈ [0, 1]` and `E[F·Y] >= λ/2`. Here `m` is
//! the median of `Y` and `β ∈ (0, 1]` solves `Σ_{k<m} q_k + β q_m = 1/2`.
//! The ratio `E[F*] / Pr(Y != 0)` is bounded below by `1/3.44`, with its
//! minimum at the second median boundary.

use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::rng::StreamRng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PoissonError {
    #[error("edge probability must lie in (0, 1), got {0}")]
    Probability(f64),
    #[error("Poisson mean must be positive and finite, got {0}")]
    Lambda(f64),
    #[error("candidate {index} is infeasible: {reason}")]
    Infeasible { index: usize, reason: &'static str },
}

/// Relative slack used when deciding whether the CDF has reached 1/2, so
/// that `λ = ln 2` lands on median 0 despite rounding in `exp`.
const HALF_TOL: f64 = 4.0 * f64::EPSILON;

/// The Poisson bound constant as stated: `E[F] >= Pr(Y != 0) / 3.44`.
pub const BOUND: f64 = 3.44;

/// `λ = ln(1 / (1 - p))`, so that `Pr(Poisson(λ) = 0) = 1 - p`.
pub fn lambda_of_p(p: f64) -> Result<f64, PoissonError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(PoissonError::Probability(p));
    }
    Ok(-(-p).ln_1p())
}

/// Truncated pmf `q_0..q_K` from the log-space recurrence, with `K` past the
/// mode and `q_K < 1e-18 · max_k q_k`.
#[derive(Debug, Clone)]
pub struct Pmf {
    pub lambda: f64,
    pub q: Vec<f64>,
}

impl Pmf {
    pub fn new(lambda: f64) -> Result<Self, PoissonError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(PoissonError::Lambda(lambda));
        }
        let ln_l = lambda.ln();
        let mut lq = -lambda;
        let mut q = vec![lq.exp()];
        let mut peak = q[0];
        let mut k = 0usize;
        loop {
            lq += ln_l - ((k + 1) as f64).ln();
            k += 1;
            let x = lq.exp();
            peak = peak.max(x);
            q.push(x);
            if k as f64 > lambda && x < 1e-18 * peak {
                break;
            }
        }
        Ok(Pmf { lambda, q })
    }

    /// `q_k`, zero beyond the truncation point.
    pub fn get(&self, k: usize) -> f64 {
        self.q.get(k).copied().unwrap_or(0.0)
    }

    /// `Σ_{k<=i} q_k`, compensated.
    pub fn cdf(&self, i: usize) -> f64 {
        neumaier(self.q.iter().take(i + 1).copied())
    }
}

/// Neumaier-compensated summation.
fn neumaier(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonPoint {
    pub lambda: f64,
    /// Median of `Y`.
    pub m: usize,
    pub beta: f64,
    pub exp_f: f64,
    /// `E[F*·Y]`, which equals `λ/2`.
    pub exp_fy: f64,
    pub ratio: f64,
}

impl PoissonPoint {
    /// The threshold variable as a function of `Y`, on the support `0..len`.
    pub fn threshold(&self, len: usize) -> Vec<f64> {
        (0..len)
            .map(|k| match k.cmp(&(self.m + 1)) {
                std::cmp::Ordering::Less => 0.0,
                std::cmp::Ordering::Equal => 1.0 - self.beta,
                std::cmp::Ordering::Greater => 1.0,
            })
            .collect()
    }
}

/// Median, `β`, `E[F*]` and the ratio at `λ`.
pub fn evaluate_point(lambda: f64) -> Result<PoissonPoint, PoissonError> {
    let pmf = Pmf::new(lambda)?;
    Ok(point_from_pmf(&pmf))
}

fn point_from_pmf(pmf: &Pmf) -> PoissonPoint {
    let lambda = pmf.lambda;
    let q = &pmf.q;
    let mut below = 0.0; // Σ_{k<m} q_k
    let mut comp = 0.0;
    let mut m = 0;
    loop {
        let cdf = below + comp + q[m];
        if cdf >= 0.5 * (1.0 - HALF_TOL) || m + 1 == q.len() {
            break;
        }
        // compensated running sum
        let t = below + q[m];
        comp += if below.abs() >= q[m] {
            (below - t) + q[m]
        } else {
            (q[m] - t) + below
        };
        below = t;
        m += 1;
    }
    let below = below + comp;
    let beta = ((0.5 - below) / q[m]).clamp(f64::MIN_POSITIVE, 1.0);
    assert!(beta > 0.0 && beta <= 1.0, "beta out of range at λ = {lambda}");
    let q1 = pmf.get(m + 1);
    let exp_f = neumaier(std::iter::once((1.0 - beta) * q1).chain(q.iter().skip(m + 2).copied()));
    let exp_fy = neumaier(
        std::iter::once((1.0 - beta) * (m + 1) as f64 * q1)
            .chain(q.iter().enumerate().skip(m + 2).map(|(k, &x)| k as f64 * x)),
    );
    PoissonPoint {
        lambda,
        m,
        beta,
        exp_f,
        exp_fy,
        ratio: exp_f / -(-lambda).exp_m1(),
    }
}

/// `λ_1 .. λ_{i_max}`, where `λ_{i+1}` solves `Σ_{k<=i} q_k(λ) = 1/2`.
pub fn lambda_boundaries(i_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(i_max);
    for i in 0..i_max {
        if i == 0 {
            out.push(std::f64::consts::LN_2);
            continue;
        }
        // CDF_i is decreasing in λ; the root lies in (λ_i, i + 1]
        let cdf_i = |l: f64| Pmf::new(l).expect("positive λ").cdf(i);
        let mut lo = out[i - 1];
        let mut hi = (i + 1) as f64;
        while cdf_i(hi) > 0.5 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf_i(mid) > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioMinimum {
    pub lambda: f64,
    pub ratio: f64,
    /// Smallest ratio seen on the grid alone.
    pub grid_ratio: f64,
}

/// Global minimizer of `E[F*] / Pr(Y != 0)` over `λ > 0`.
///
/// The ratio is concave between consecutive median boundaries and at least
/// `1/2 - 4^4 e^{-4}/4!` beyond `λ_4`, so the minimum sits at one of
/// `λ_1..λ_4`. A uniform grid on `(0, λ_4]` guards that argument.
pub fn minimize_ratio() -> RatioMinimum {
    minimize_ratio_with_grid(20_000)
}

pub fn minimize_ratio_with_grid(grid: usize) -> RatioMinimum {
    let bounds = lambda_boundaries(4);
    let mut best = (f64::NAN, f64::INFINITY);
    for &l in &bounds {
        let r = evaluate_point(l).expect("positive λ").ratio;
        if r < best.1 {
            best = (l, r);
        }
    }
    let top = bounds[3];
    let mut grid_ratio = f64::INFINITY;
    for i in 1..=grid {
        let l = top * i as f64 / grid as f64;
        let r = evaluate_point(l).expect("positive λ").ratio;
        grid_ratio = grid_ratio.min(r);
        if r < best.1 {
            best = (l, r);
        }
    }
    RatioMinimum {
        lambda: best.0,
        ratio: best.1,
        grid_ratio,
    }
}

/// `points` evenly spaced values of `λ` on `(0, lambda_max]`.
pub fn ratio_curve(points: usize, lambda_max: f64) -> Vec<PoissonPoint> {
    (1..=points)
        .map(|i| evaluate_point(lambda_max * i as f64 / points as f64).expect("positive λ"))
        .collect()
}

/// `lambda,ratio` rows with a header.
pub fn write_curve_csv<W: Write>(curve: &[PoissonPoint], w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["lambda", "ratio"])?;
    for p in curve {
        wr.write_record([format!("{:.9}", p.lambda), format!("{:.12}", p.ratio)])?;
    }
    wr.flush()?;
    Ok(())
}

/// Checks `E[F] >= Pr(Y != 0) / 3.44` for each candidate `F`, given as its
/// value at `Y = k` for `k = 0, 1, ...` (missing entries count as 0).
///
/// Returns an error naming the first candidate outside `[0, 1]` or with
/// `E[F·Y] < λ/2`.
pub fn lemma_direct_check(lambda: f64, candidates: &[Vec<f64>]) -> Result<bool, PoissonError> {
    let pmf = Pmf::new(lambda)?;
    let p_nonzero = -(-lambda).exp_m1();
    let mut ok = true;
    for (index, f) in candidates.iter().enumerate() {
        if f.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(PoissonError::Infeasible {
                index,
                reason: "value outside [0, 1]",
            });
        }
        let (ef, efy) = moments(&pmf, f);
        if efy < lambda / 2.0 - 1e-12 * lambda.max(1.0) {
            return Err(PoissonError::Infeasible {
                index,
                reason: "E[F·Y] below λ/2",
            });
        }
        ok &= ef >= p_nonzero / BOUND;
    }
    Ok(ok)
}

fn moments(pmf: &Pmf, f: &[f64]) -> (f64, f64) {
    let ef = neumaier(f.iter().zip(&pmf.q).map(|(&x, &q)| x * q));
    let efy = neumaier(f.iter().zip(&pmf.q).enumerate().map(|(k, (&x, &q))| k as f64 * x * q));
    (ef, efy)
}

/// `count` feasible candidates near `F*`: each value is jittered by up to
/// `±0.5`, clamped to `[0, 1]`, then mixed with `F ≡ 1` just enough to meet
/// `E[F·Y] >= λ/2`.
pub fn random_feasible_candidates(
    lambda: f64,
    count: usize,
    rng: &mut StreamRng,
) -> Result<Vec<Vec<f64>>, PoissonError> {
    let pmf = Pmf::new(lambda)?;
    let base = point_from_pmf(&pmf).threshold(pmf.q.len());
    Ok((0..count)
        .map(|_| {
            let mut f: Vec<f64> = base
                .iter()
                .map(|&x| (x + rng.random_range(-0.5..=0.5)).clamp(0.0, 1.0))
                .collect();
            let (_, a) = moments(&pmf, &f);
            if a < lambda / 2.0 {
                // (1 - t)·a + t·λ = λ/2, nudged up for rounding
                let t = ((lambda / 2.0 - a) / (lambda - a) * (1.0 + 1e-9)).min(1.0);
                for x in &mut f {
                    *x = ((1.0 - t) * *x + t).min(1.0);
                }
            }
            f
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn lambda_mapping() {
        assert!((lambda_of_p(0.5).unwrap() - LN_2).abs() < 1e-15);
        assert!((lambda_of_p(1e-9).unwrap() - 1e-9).abs() < 1e-9);
        assert!(lambda_of_p(1.0).is_err());
        assert!(lambda_of_p(0.0).is_err());
        for i in 1..100 {
            let p = i as f64 / 100.0;
            let l = lambda_of_p(p).unwrap();
            assert!(((-l).exp() - (1.0 - p)).abs() < 1e-12);
        }
    }

    #[test]
    fn ln2_point_by_hand() {
        // q0 = 1/2, so m = 0 and β = 1; E[F*] = 1 - q0 - q1 = 1/2 - ln2/2
        let pt = evaluate_point(LN_2).unwrap();
        assert_eq!(pt.m, 0);
        assert!((pt.beta - 1.0).abs() < 1e-12);
        assert!((pt.exp_f - (0.5 - LN_2 / 2.0)).abs() < 1e-12);
        assert!((pt.exp_f - 0.153426).abs() < 1e-6);
    }

    #[test]
    fn small_lambda_matches_median_zero_formula() {
        // with m = 0, E[F*] = 1 - q0 - λ/2
        let l = 1e-6;
        let pt = evaluate_point(l).unwrap();
        assert_eq!(pt.m, 0);
        let expected = -(-l).exp_m1() - l / 2.0;
        assert!((pt.exp_f - expected).abs() < 1e-6);
        assert!((pt.ratio - 0.5).abs() < 1e-5);
    }

    #[test]
    fn median_equation_and_first_moment() {
        let mut rng = crate::rng::stream(5, "poisson-test", 0);
        for _ in 0..100 {
            let l: f64 = rng.random_range(1e-3..30.0);
            let pt = evaluate_point(l).unwrap();
            let pmf = Pmf::new(l).unwrap();
            let lhs = if pt.m == 0 { 0.0 } else { pmf.cdf(pt.m - 1) } + pt.beta * pmf.get(pt.m);
            assert!((lhs - 0.5).abs() < 1e-12, "λ = {l}");
            assert!(pt.beta > 0.0 && pt.beta <= 1.0);
            assert!((pt.exp_fy - l / 2.0).abs() < 1e-9);
            // both forms of E[F*] agree
            let alt = 1.0 - pmf.cdf(pt.m) - pt.beta * pmf.get(pt.m + 1);
            assert!((alt - pt.exp_f).abs() < 1e-12);
        }
    }

    #[test]
    fn boundaries_and_medians() {
        let b = lambda_boundaries(6);
        assert_eq!(b[0], LN_2);
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        for (i, w) in b.windows(2).enumerate() {
            for j in 1..=100 {
                let l = w[0] + (w[1] - w[0]) * j as f64 / 101.0;
                assert_eq!(evaluate_point(l).unwrap().m, i + 1, "λ = {l}");
            }
        }
        assert!((b[1] - 1.678347).abs() < 1e-6);
    }

    #[test]
    fn global_minimum() {
        let min = minimize_ratio();
        assert!((min.lambda - 1.678347).abs() < 1e-4);
        assert!((min.ratio - 1.0 / 3.43068).abs() < 1e-5);
        assert!(min.grid_ratio > min.ratio);
    }

    #[test]
    fn lemma_candidates() {
        let l = 1.678347;
        let pt = evaluate_point(l).unwrap();
        let ones = vec![1.0; 60];
        assert!(lemma_direct_check(l, &[ones, pt.threshold(60)]).unwrap());
        let bad = vec![vec![0.0; 10]];
        assert!(matches!(
            lemma_direct_check(l, &bad),
            Err(PoissonError::Infeasible { index: 0, .. })
        ));
        let mut rng = crate::rng::stream(1, "lemma", 0);
        for _ in 0..20 {
            let l = rng.random_range(0.01..=5.0);
            let c = random_feasible_candidates(l, 50, &mut rng).unwrap();
            assert!(lemma_direct_check(l, &c).unwrap());
        }
    }

    #[test]
    fn curve_csv_has_header() {
        let mut buf = Vec::new();
        write_curve_csv(&ratio_curve(3, 3.0), &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("lambda,ratio\n"));
        assert_eq!(s.lines().count(), 4);
    }
}
