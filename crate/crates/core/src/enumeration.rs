//! Exhaustive enumeration of the nonzero lattice points in a Frobenius ball
//! `L(M) = {X ∈ L : ‖X‖_F ≤ M, X ≠ 0}`.
//!
//! The search is Fincke–Pohst branch-and-bound on the Cholesky factor of the
//! Gram matrix. Coordinates are visited lexicographically on
//! `(z_{k-1}, …, z_0)`, innermost coordinate fastest. Floating-point pruning
//! runs with a small relative slack; membership is then decided by the exact
//! integer form `zᵀ(2G)z` whenever the Gram matrix is half-integral, so shell
//! boundaries never produce false accepts or rejects.
//!
//! Points are streamed. Statistics are folded online through [`PointFold`];
//! the parallel driver partitions the outermost coordinate and merges partial
//! folds in increasing order of that coordinate, so results do not depend on
//! the thread count.

use crate::error::{Error, Result};
use crate::lattice::MatrixLattice;
use crate::numeric::{fmt_sig, unit_ball_volume, KahanSum};
use serde::Serialize;

pub const DEFAULT_NODE_BUDGET: f64 = 2e10;

/// Relative slack on the pruning radius.
const PRUNE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    pub node_budget: f64,
    pub parallel: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            parallel: true,
        }
    }
}

/// A point of `L(M)` as seen by visitors.
#[derive(Debug)]
pub struct BallPoint<'a> {
    pub coeffs: &'a [i64],
    /// `‖X‖_F²`.
    pub norm_sq: f64,
    /// Exact `2‖X‖_F²` when the Gram matrix is half-integral.
    pub norm_sq_x2: Option<i128>,
}

/// Associative accumulator over streamed points.
pub trait PointFold: Send {
    fn visit(&mut self, p: &BallPoint<'_>);
    /// Absorbs a fold over points that come later in enumeration order.
    fn merge(&mut self, later: Self);
}

/// Cholesky data in the Fincke–Pohst form
/// `zᵀGz = Σ_i q_ii (z_i + Σ_{j>i} q_ij z_j)²`.
#[derive(Clone, Debug)]
struct Pruner {
    k: usize,
    /// `q[i*k + j]` holds `q_ii` on the diagonal and `q_ij` above it.
    q: Vec<f64>,
    gram2: Option<Vec<i64>>,
}

impl Pruner {
    fn new(lattice: &MatrixLattice) -> Result<Self> {
        let k = lattice.rank();
        let g = lattice.gram();
        let mut q = g.to_vec();
        for i in 0..k {
            if !(q[i * k + i] > 0.0) {
                return Err(Error::DependentBasis { det: 0.0 });
            }
            for j in i + 1..k {
                q[j * k + i] = q[i * k + j];
                q[i * k + j] /= q[i * k + i];
            }
            for l in i + 1..k {
                for j in l..k {
                    q[l * k + j] -= q[l * k + i] * q[i * k + j];
                }
            }
        }
        Ok(Pruner {
            k,
            q,
            gram2: lattice.gram2_integral().map(|g| g.to_vec()),
        })
    }

    #[inline]
    fn qd(&self, i: usize) -> f64 {
        self.q[i * self.k + i]
    }

    fn smallest_diagonal(&self) -> f64 {
        (0..self.k).map(|i| self.qd(i).sqrt()).fold(f64::INFINITY, f64::min)
    }
}

#[inline]
fn range_at(center: f64, remaining: f64, qd: f64) -> (i64, i64) {
    if remaining < 0.0 {
        return (1, 0);
    }
    let w = (remaining / qd).sqrt();
    ((center - w).ceil() as i64, (center + w).floor() as i64)
}

/// Estimated `|L(M)|` from the ball volume and covolume.
pub fn estimate_points(lattice: &MatrixLattice, radius: f64) -> f64 {
    let k = lattice.rank();
    unit_ball_volume(k) * radius.powi(k as i32) / lattice.covolume()
}

struct Walker<'l> {
    pr: &'l Pruner,
    radius_sq: f64,
    prune_sq: f64,
    exact_limit: Option<f64>,
}

impl<'l> Walker<'l> {
    fn new(pr: &'l Pruner, radius: f64) -> Self {
        let radius_sq = radius * radius;
        Walker {
            pr,
            radius_sq,
            prune_sq: radius_sq * (1.0 + PRUNE_SLACK).powi(2),
            exact_limit: pr.gram2.as_ref().map(|_| 2.0 * radius_sq),
        }
    }

    fn outer_range(&self) -> (i64, i64) {
        let k = self.pr.k;
        range_at(0.0, self.prune_sq, self.pr.qd(k - 1))
    }

    /// Enumerates every accepted point with `z_{k-1} = top`.
    fn walk<V: FnMut(&BallPoint<'_>)>(&self, top: i64, visit: &mut V) -> u64 {
        let k = self.pr.k;
        let pr = self.pr;
        let mut z = vec![0i64; k];
        // partial[l]: float contribution of levels > l
        let mut partial = vec![0.0f64; k + 1];
        // exact[l]: zᵀ(2G)z restricted to levels > l
        let mut exact = vec![0i128; k + 1];
        let mut center = vec![0.0f64; k];
        let mut cross = vec![0i128; k];
        let mut hi = vec![0i64; k];
        let mut emitted = 0u64;

        let top_level = k - 1;
        z[top_level] = top;
        let c_top = 0.0;
        let d_top = top as f64 - c_top;
        partial[top_level] = pr.qd(top_level) * d_top * d_top;
        if let Some(g2) = &pr.gram2 {
            exact[top_level] = g2[top_level * k + top_level] as i128 * (top as i128) * (top as i128);
        }
        if partial[top_level] > self.prune_sq {
            return 0;
        }
        if k == 1 {
            if top != 0 {
                self.emit(&z, partial[0], exact[0], visit, &mut emitted);
            }
            return emitted;
        }

        // descend from level top_level-1 to 0
        let mut level = top_level - 1;
        self.enter(level, &mut z, &partial, &mut center, &mut cross, &mut hi);
        loop {
            // advance z[level]
            if z[level] > hi[level] {
                // backtrack
                level += 1;
                if level == top_level {
                    break;
                }
                z[level] += 1;
                continue;
            }
            let d = z[level] as f64 - center[level];
            let p = partial[level + 1] + pr.qd(level) * d * d;
            if level == 0 {
                let zl = z[0];
                let ex = if let Some(g2) = &pr.gram2 {
                    exact[1] + g2[0] as i128 * (zl as i128) * (zl as i128) + 2 * (zl as i128) * cross[0]
                } else {
                    0
                };
                self.emit(&z, p, ex, visit, &mut emitted);
                z[0] += 1;
                continue;
            }
            partial[level] = p;
            if let Some(g2) = &pr.gram2 {
                let zl = z[level] as i128;
                exact[level] = exact[level + 1] + g2[level * k + level] as i128 * zl * zl + 2 * zl * cross[level];
            }
            level -= 1;
            self.enter(level, &mut z, &partial, &mut center, &mut cross, &mut hi);
        }
        emitted
    }

    /// Sets up the scan of `level` given fixed coordinates above it.
    #[inline]
    fn enter(
        &self,
        level: usize,
        z: &mut [i64],
        partial: &[f64],
        center: &mut [f64],
        cross: &mut [i128],
        hi: &mut [i64],
    ) {
        let pr = self.pr;
        let k = pr.k;
        let mut c = 0.0;
        for j in level + 1..k {
            c -= pr.q[level * k + j] * z[j] as f64;
        }
        center[level] = c;
        if let Some(g2) = &pr.gram2 {
            let mut s: i128 = 0;
            for j in level + 1..k {
                s += g2[level * k + j] as i128 * z[j] as i128;
            }
            cross[level] = s;
        }
        let (lo, h) = range_at(c, self.prune_sq - partial[level + 1], pr.qd(level));
        z[level] = lo;
        hi[level] = h;
    }

    #[inline]
    fn emit<V: FnMut(&BallPoint<'_>)>(&self, z: &[i64], norm_sq: f64, exact: i128, visit: &mut V, emitted: &mut u64) {
        let accepted = match self.exact_limit {
            Some(limit) => (exact as f64) <= limit,
            None => norm_sq <= self.radius_sq,
        };
        if !accepted || z.iter().all(|&x| x == 0) {
            return;
        }
        *emitted += 1;
        let (norm_sq, norm_sq_x2) = match self.exact_limit {
            Some(_) => (exact as f64 / 2.0, Some(exact)),
            None => (norm_sq, None),
        };
        visit(&BallPoint {
            coeffs: z,
            norm_sq,
            norm_sq_x2,
        });
    }
}

fn check_request(lattice: &MatrixLattice, radius: f64, opts: &EnumOptions) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let estimate = estimate_points(lattice, radius);
    if estimate > opts.node_budget {
        return Err(Error::RadiusTooLarge {
            radius,
            estimate,
            budget: opts.node_budget,
        });
    }
    Ok(())
}

/// Visits every point of `L(M)` once, sequentially, in lexicographic order.
/// Returns `|L(M)|`.
pub fn enumerate_ball<V: FnMut(&BallPoint<'_>)>(lattice: &MatrixLattice, radius: f64, visit: V) -> Result<u64> {
    enumerate_ball_with(lattice, radius, &EnumOptions::default(), visit)
}

pub fn enumerate_ball_with<V: FnMut(&BallPoint<'_>)>(
    lattice: &MatrixLattice,
    radius: f64,
    opts: &EnumOptions,
    mut visit: V,
) -> Result<u64> {
    check_request(lattice, radius, opts)?;
    let pr = Pruner::new(lattice)?;
    let w = Walker::new(&pr, radius);
    let (lo, hi) = w.outer_range();
    let mut total = 0;
    for top in lo..=hi {
        total += w.walk(top, &mut visit);
    }
    Ok(total)
}

/// Materialized points of `L(M)`, for small radii.
pub fn collect_ball(lattice: &MatrixLattice, radius: f64) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    enumerate_ball(lattice, radius, |p| out.push(p.coeffs.to_vec()))?;
    Ok(out)
}

/// Folds every point of `L(M)` with per-partition accumulators created by
/// `init`, merged in enumeration order.
pub fn fold_ball<F, I>(lattice: &MatrixLattice, radius: f64, opts: &EnumOptions, init: I) -> Result<F>
where
    F: PointFold,
    I: Fn() -> F + Sync,
{
    check_request(lattice, radius, opts)?;
    let pr = Pruner::new(lattice)?;
    let w = Walker::new(&pr, radius);
    let (lo, hi) = w.outer_range();
    let run = |top: i64| {
        let mut f = init();
        w.walk(top, &mut |p: &BallPoint<'_>| f.visit(p));
        f
    };
    let parts: Vec<F> = partitioned(lo, hi, opts.parallel, run);
    let mut acc = init();
    for p in parts {
        acc.merge(p);
    }
    Ok(acc)
}

#[cfg(feature = "parallel")]
fn partitioned<F: Send>(lo: i64, hi: i64, parallel: bool, run: impl Fn(i64) -> F + Sync) -> Vec<F> {
    use rayon::prelude::*;
    if parallel && hi > lo {
        (lo..=hi).into_par_iter().map(&run).collect()
    } else {
        (lo..=hi).map(run).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn partitioned<F: Send>(lo: i64, hi: i64, _parallel: bool, run: impl Fn(i64) -> F + Sync) -> Vec<F> {
    (lo..=hi).map(run).collect()
}

/// Assigns points to the first radius whose ball contains them.
#[derive(Clone, Debug)]
pub struct RadiusBuckets {
    radii: Vec<f64>,
    /// `2M²` in exact mode, `M²` otherwise.
    thresholds: Vec<f64>,
    exact: bool,
}

impl RadiusBuckets {
    pub fn new(lattice: &MatrixLattice, radii: &[f64]) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidArgument("empty radius list".into()));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) || !(radii[0] > 0.0) {
            return Err(Error::InvalidArgument("radii must be positive and strictly increasing".into()));
        }
        let exact = lattice.gram2_integral().is_some();
        let thresholds = radii
            .iter()
            .map(|m| if exact { 2.0 * m * m } else { m * m })
            .collect();
        Ok(RadiusBuckets {
            radii: radii.to_vec(),
            thresholds,
            exact,
        })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn max_radius(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    #[inline]
    pub fn index(&self, p: &BallPoint<'_>) -> usize {
        let v = match (self.exact, p.norm_sq_x2) {
            (true, Some(x2)) => x2 as f64,
            _ => p.norm_sq,
        };
        self.thresholds.partition_point(|&t| t < v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellCountTable {
    pub radii: Vec<f64>,
    pub counts: Vec<u64>,
}

impl ShellCountTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("M,count\n");
        for (m, c) in self.radii.iter().zip(&self.counts) {
            s.push_str(&format!("{},{}\n", fmt_sig(*m, 6), c));
        }
        s
    }
}

struct BucketCounts<'b> {
    buckets: &'b RadiusBuckets,
    counts: Vec<u64>,
}

impl PointFold for BucketCounts<'_> {
    fn visit(&mut self, p: &BallPoint<'_>) {
        let i = self.buckets.index(p);
        if i < self.counts.len() {
            self.counts[i] += 1;
        }
    }
    fn merge(&mut self, later: Self) {
        for (a, b) in self.counts.iter_mut().zip(later.counts) {
            *a += b;
        }
    }
}

/// `|L(M)|` for each radius, from a single bucketed pass at the largest one.
pub fn shell_counts(lattice: &MatrixLattice, radii: &[f64]) -> Result<ShellCountTable> {
    shell_counts_with(lattice, radii, &EnumOptions::default())
}

pub fn shell_counts_with(lattice: &MatrixLattice, radii: &[f64], opts: &EnumOptions) -> Result<ShellCountTable> {
    let buckets = RadiusBuckets::new(lattice, radii)?;
    let fold = fold_ball(lattice, buckets.max_radius(), opts, || BucketCounts {
        buckets: &buckets,
        counts: vec![0; buckets.len()],
    })?;
    let mut running = 0;
    let counts = fold
        .counts
        .iter()
        .map(|c| {
            running += c;
            running
        })
        .collect();
    Ok(ShellCountTable {
        radii: radii.to_vec(),
        counts,
    })
}

struct PowerSum {
    half_s: f64,
    sum: KahanSum,
}

impl PointFold for PowerSum {
    fn visit(&mut self, p: &BallPoint<'_>) {
        self.sum.add(p.norm_sq.powf(self.half_s));
    }
    fn merge(&mut self, later: Self) {
        self.sum.merge(&later.sum);
    }
}

/// `Σ_{X ∈ L(M)} ‖X‖_F^s`.
pub fn norm_power_sum(lattice: &MatrixLattice, s: f64, radius: f64) -> Result<f64> {
    norm_power_sum_with(lattice, s, radius, &EnumOptions::default())
}

pub fn norm_power_sum_with(lattice: &MatrixLattice, s: f64, radius: f64, opts: &EnumOptions) -> Result<f64> {
    let f = fold_ball(lattice, radius, opts, || PowerSum {
        half_s: s / 2.0,
        sum: KahanSum::new(),
    })?;
    Ok(f.sum.value())
}

/// Smallest diagonal entry of the Cholesky factor of the Gram matrix.
pub fn smallest_cholesky_diagonal(lattice: &MatrixLattice) -> Result<f64> {
    Ok(Pruner::new(lattice)?.smallest_diagonal())
}
