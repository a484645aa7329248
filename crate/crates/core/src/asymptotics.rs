//! Growth-exponent fits, closed-form exponents and DMT curves.

use crate::constructions::infinite_place_ramified;
use crate::detsum::DetSumTable;
use crate::error::{Error, Result};
use crate::lattice::{Center, Construction, MatrixLattice};
use serde::{Deserialize, Serialize};

/// Least-squares fit of `log(value)` against `log(M)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r2: f64,
    /// `(log M, log value)` pairs that entered the fit.
    pub points_used: Vec<(f64, f64)>,
    /// Rows dropped because their value was zero.
    pub excluded_zero: usize,
    pub min_points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Explicit `[lo, hi]` radius window; disables the default trimming.
    pub window: Option<(f64, f64)>,
    /// Fraction of the smallest radii dropped when no window is given.
    pub drop_fraction: f64,
    pub min_points: usize,
    /// Required ratio between the largest and smallest fitted radius.
    pub min_span: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            window: None,
            drop_fraction: 0.25,
            min_points: 4,
            min_span: 10f64.sqrt(),
        }
    }
}

impl FitOptions {
    pub fn window(lo: f64, hi: f64) -> Self {
        FitOptions {
            window: Some((lo, hi)),
            ..Self::default()
        }
    }

    pub fn all() -> Self {
        FitOptions {
            drop_fraction: 0.0,
            ..Self::default()
        }
    }
}

/// Ordinary least squares `y = a + b x`: returns `(b, a, stderr(b), r²)`.
pub fn ols(points: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = if points.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    (slope, intercept, stderr, r2)
}

fn select(radii: &[f64], values: &[f64], opts: &FitOptions) -> Result<Vec<(f64, f64)>> {
    if radii.len() != values.len() {
        return Err(Error::InvalidArgument("radii and values differ in length".into()));
    }
    let mut rows: Vec<(f64, f64)> = radii.iter().copied().zip(values.iter().copied()).collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(match opts.window {
        Some((lo, hi)) => rows.into_iter().filter(|r| r.0 >= lo && r.0 <= hi).collect(),
        None => {
            let drop = (rows.len() as f64 * opts.drop_fraction).floor() as usize;
            rows.split_off(drop)
        }
    })
}

fn check_range(rows: &[(f64, f64)], opts: &FitOptions) -> Result<()> {
    if rows.len() < opts.min_points {
        return Err(Error::InsufficientRange(format!(
            "{} usable points, need at least {}",
            rows.len(),
            opts.min_points
        )));
    }
    let lo = rows.first().unwrap().0;
    let hi = rows.last().unwrap().0;
    if !(hi / lo >= opts.min_span * (1.0 - 1e-12)) {
        return Err(Error::InsufficientRange(format!(
            "radii span a factor {:.3}, need at least {:.3}",
            hi / lo,
            opts.min_span
        )));
    }
    Ok(())
}

/// Slope of `log value` against `log M`.
pub fn fit_growth(radii: &[f64], values: &[f64], opts: &FitOptions) -> Result<GrowthFit> {
    let rows = select(radii, values, opts)?;
    let total = rows.len();
    let rows: Vec<_> = rows.into_iter().filter(|r| r.1 > 0.0 && r.0 > 0.0).collect();
    let excluded_zero = total - rows.len();
    check_range(&rows, opts)?;
    let points: Vec<(f64, f64)> = rows.iter().map(|&(m, v)| (m.ln(), v.ln())).collect();
    let (slope, intercept, stderr, r2) = ols(&points);
    Ok(GrowthFit {
        slope,
        intercept,
        stderr,
        r2,
        points_used: points,
        excluded_zero,
        min_points: opts.min_points,
    })
}

/// Slope of `value` against `log M`, for logarithmic growth.
pub fn fit_log_growth(radii: &[f64], values: &[f64], opts: &FitOptions) -> Result<GrowthFit> {
    let rows = select(radii, values, opts)?;
    check_range(&rows, opts)?;
    let points: Vec<(f64, f64)> = rows.iter().map(|&(m, v)| (m.ln(), v)).collect();
    let (slope, intercept, stderr, r2) = ols(&points);
    Ok(GrowthFit {
        slope,
        intercept,
        stderr,
        r2,
        points_used: points,
        excluded_zero: 0,
        min_points: opts.min_points,
    })
}

/// `n_r k/n + k − k/n − 2n n_r`: the sum of any `k`-dimensional fully
/// diverse lattice grows at least this fast.
pub fn dmt_sum_lower_exponent(n: usize, k: usize, nr: usize) -> f64 {
    let (n, k, nr) = (n as f64, k as f64, nr as f64);
    nr * k / n + k - k / n - 2.0 * n * nr
}

/// Which closed-form growth law applies to a code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Division algebra with imaginary quadratic center.
    ComplexCenter,
    /// ℚ-central, not ramified at the infinite place.
    RationalUnramified,
    /// ℚ-central, ramified at the infinite place.
    RationalRamified,
    /// Diagonal number-field code; `trivial` for ℚ(i) itself.
    NumberField { trivial: bool },
}

impl Regime {
    pub fn describe(self) -> &'static str {
        match self {
            Regime::ComplexCenter => "complex center",
            Regime::RationalUnramified => "Q-central, unramified at infinity",
            Regime::RationalRamified => "Q-central, ramified at infinity",
            Regime::NumberField { trivial: false } => "number field",
            Regime::NumberField { trivial: true } => "number field (trivial)",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CodeProfile {
    pub regime: Regime,
    pub n: usize,
    pub k: usize,
}

/// Reads the regime off a constructed lattice.
pub fn profile(lattice: &MatrixLattice) -> Result<CodeProfile> {
    let regime = match lattice.construction() {
        Construction::NumberField(f) => Regime::NumberField { trivial: f.degree == 1 },
        Construction::CyclicAlgebra(spec) => match spec.center {
            Center::Gaussian => Regime::ComplexCenter,
            Center::Rational => {
                if infinite_place_ramified(spec)? {
                    Regime::RationalRamified
                } else {
                    Regime::RationalUnramified
                }
            }
        },
        Construction::Raw => {
            return Err(Error::OutOfRegime("raw lattices carry no algebraic structure".into()));
        }
    };
    Ok(CodeProfile {
        regime,
        n: lattice.n(),
        k: lattice.rank(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub exponent: f64,
    /// Growth is polylogarithmic; `exponent` is then 0.
    pub polylog: bool,
    pub regime: Regime,
    pub law: String,
}

/// Predicted exponent of `S^{2n_r}(M)`.
pub fn predicted_exponent(p: &CodeProfile, nr: usize) -> Result<Prediction> {
    let n = p.n as f64;
    let nr_f = nr as f64;
    if nr == 0 {
        return Err(Error::InvalidArgument("n_r must be positive".into()));
    }
    let (exponent, polylog, law) = match p.regime {
        Regime::ComplexCenter => {
            if nr < p.n {
                return Err(Error::OutOfRegime(format!("complex-center law needs n_r ≥ n = {}", p.n)));
            }
            (2.0 * n * n - 2.0 * n, false, "M^(2n^2-2n), unit group of an O_F-order")
        }
        Regime::RationalUnramified => {
            if 2.0 * nr_f < n {
                return Err(Error::OutOfRegime(format!("unramified law needs n_r ≥ n/2 = {}", n / 2.0)));
            }
            (n * n - n, false, "M^(n^2-n), unramified Q-central order")
        }
        Regime::RationalRamified => {
            if !p.n.is_multiple_of(2) {
                return Err(Error::OutOfRegime(format!("ramified law needs even n, got {}", p.n)));
            }
            if 2.0 * nr_f < n {
                return Err(Error::OutOfRegime(format!("ramified law needs n_r ≥ n/2 = {}", n / 2.0)));
            }
            (n * n - 2.0 * n, false, "M^(n^2-2n), ramified Q-central order")
        }
        Regime::NumberField { trivial } => (
            0.0,
            true,
            if trivial {
                "polylog/constant, Gaussian integers"
            } else {
                "polylog, (log M)^(3n-1) upper bound"
            },
        ),
    };
    Ok(Prediction {
        exponent,
        polylog,
        regime: p.regime,
        law: law.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmtCurve {
    pub vertices: Vec<(f64, f64)>,
    pub label: String,
}

impl DmtCurve {
    /// Piecewise-linear value at `r`, 0 past the last vertex.
    pub fn eval(&self, r: f64) -> f64 {
        let v = &self.vertices;
        if r <= v[0].0 {
            return v[0].1;
        }
        for w in v.windows(2) {
            if r <= w[1].0 {
                let t = (r - w[0].0) / (w[1].0 - w[0].0);
                return w[0].1 + t * (w[1].1 - w[0].1);
            }
        }
        0.0
    }
}

/// Optimal tradeoff vertices `(r, (n_t − r)(n_r − r))` at integer `r`.
pub fn optimal_dmt_exact(nt: usize, nr: usize) -> Vec<(i64, i64)> {
    let (nt, nr) = (nt as i64, nr as i64);
    (0..=nt.min(nr)).map(|r| (r, (nt - r) * (nr - r))).collect()
}

pub fn optimal_dmt(nt: usize, nr: usize) -> DmtCurve {
    DmtCurve {
        vertices: optimal_dmt_exact(nt, nr)
            .into_iter()
            .map(|(r, d)| (r as f64, d as f64))
            .collect(),
        label: format!("optimal {nt}x{nr}"),
    }
}

/// Straight DMT segment guaranteed on `r ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeDmt {
    /// Clipped at `d = 0` for display.
    pub curve: DmtCurve,
    pub d_at_0: i64,
    /// Unclipped affine value at `r = 1`.
    pub d_at_1: i64,
    pub meets_optimal: bool,
}

pub fn code_dmt_segment(regime: Regime, n: usize, nr: usize) -> Result<CodeDmt> {
    let (ni, nri) = (n as i64, nr as i64);
    let d1 = match regime {
        Regime::RationalRamified => {
            if !n.is_multiple_of(2) || 2 * nr < n {
                return Err(Error::OutOfRegime("ramified segment needs even n and n_r ≥ n/2".into()));
            }
            ni * nri - 2 * nri - ni + 2
        }
        Regime::RationalUnramified => {
            if 2 * nr < n {
                return Err(Error::OutOfRegime("unramified segment needs n_r ≥ n/2".into()));
            }
            ni * nri - 2 * nri - ni + 1
        }
        Regime::ComplexCenter => {
            if nr < n {
                return Err(Error::OutOfRegime("complex-center segment needs n_r ≥ n".into()));
            }
            ni * nri - ni - nri + 1
        }
        Regime::NumberField { .. } => 0,
    };
    let d0 = ni * nri;
    let opt = optimal_dmt_exact(n, nr);
    let opt_at_1 = opt.get(1).map_or(0, |v| v.1);
    let meets_optimal = opt[0].1 == d0 && opt_at_1 == d1;
    let mut vertices = vec![(0.0, d0 as f64)];
    if d1 >= 0 {
        vertices.push((1.0, d1 as f64));
    } else {
        vertices.push((d0 as f64 / (d0 - d1) as f64, 0.0));
    }
    Ok(CodeDmt {
        curve: DmtCurve {
            vertices,
            label: format!("{} n={n} n_r={nr}", regime.describe()),
        },
        d_at_0: d0,
        d_at_1: d1,
        meets_optimal,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnionBoundPoint {
    pub rho: f64,
    pub radius_needed: f64,
    pub radius_used: f64,
    pub sum: f64,
    pub bound: f64,
    /// The needed radius lies outside the table.
    pub extrapolated: bool,
}

/// `ρ^{−n n_r(1 − 2nr/k)} · S^{2n_r}(2ρ^{rn/k})`, reading `S` from the
/// table row nearest in `log M`.
pub fn union_bound_eval(
    table: &DetSumTable,
    n: usize,
    k: usize,
    nr: usize,
    rho_grid: &[f64],
    r: f64,
) -> Vec<UnionBoundPoint> {
    let (nf, kf, nrf) = (n as f64, k as f64, nr as f64);
    let lo = table.rows.first().map_or(0.0, |row| row.radius);
    let hi = table.rows.last().map_or(0.0, |row| row.radius);
    rho_grid
        .iter()
        .map(|&rho| {
            let needed = 2.0 * rho.powf(r * nf / kf);
            let row = table
                .rows
                .iter()
                .min_by(|a, b| {
                    (a.radius.ln() - needed.ln())
                        .abs()
                        .total_cmp(&(b.radius.ln() - needed.ln()).abs())
                })
                .expect("table has rows");
            let tol = 1e-9 * needed;
            UnionBoundPoint {
                rho,
                radius_needed: needed,
                radius_used: row.radius,
                sum: row.sum,
                bound: rho.powf(-nf * nrf * (1.0 - 2.0 * nf * r / kf)) * row.sum,
                extrapolated: needed < lo - tol || needed > hi + tol,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    MatchesPrediction,
    Inconclusive,
    Mismatch,
}

/// Slope tolerance used by reports.
pub const SLOPE_TOLERANCE: f64 = 0.35;
/// Pass threshold for polylogarithmic regimes.
pub const POLYLOG_THRESHOLD: f64 = 0.2;

/// Within `tol` matches, within `2·tol` is inconclusive, beyond mismatches.
/// Polylog regimes match when `|slope| ≤ 0.2` and use `tol` past that.
pub fn verdict(measured: f64, prediction: &Prediction, tol: f64) -> Verdict {
    if prediction.polylog {
        let excess = measured.abs() - POLYLOG_THRESHOLD;
        return if excess <= 0.0 {
            Verdict::MatchesPrediction
        } else if excess <= tol {
            Verdict::Inconclusive
        } else {
            Verdict::Mismatch
        };
    }
    let gap = (measured - prediction.exponent).abs();
    if gap <= tol {
        Verdict::MatchesPrediction
    } else if gap <= 2.0 * tol {
        Verdict::Inconclusive
    } else {
        Verdict::Mismatch
    }
}
