//! Inverse determinant sums `S_L^m(M) = Σ_{X ∈ L(M)} |det X|^{−m}`, unit
//! counts, unit orbits of number-field codes and the truncated Dedekind zeta
//! function of ℚ(i).

use crate::constructions::CyclicFieldData;
use crate::enumeration::{fold_ball, BallPoint, EnumOptions, PointFold, RadiusBuckets};
use crate::error::{Error, Result};
use crate::gaussian::GaussInt;
use crate::lattice::{Construction, MatrixLattice};
use crate::numeric::{fmt_sig, KahanSum};
use crate::poly::horner;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroDetPolicy {
    /// Fail on the first point with `det = 0`.
    #[default]
    Reject,
    /// Leave such points out of the sum and count them.
    Skip,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DetSumOptions {
    pub zero_policy: ZeroDetPolicy,
    pub enumeration: EnumOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetSumRow {
    pub radius: f64,
    pub count: u64,
    pub sum: f64,
    pub unit_count: u64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetSumTable {
    pub label: String,
    pub m: u32,
    pub n: usize,
    pub k: usize,
    pub covolume: f64,
    pub rows: Vec<DetSumRow>,
    /// Points left out under [`ZeroDetPolicy::Skip`], cumulative at the largest radius.
    pub skipped_zero: u64,
}

impl DetSumTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("M,count,sum,unit_count,normalized\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_sig(r.radius, 6),
                r.count,
                fmt_sig(r.sum, 10),
                r.unit_count,
                fmt_sig(r.normalized, 10)
            ));
        }
        s
    }

    pub fn radii(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.radius).collect()
    }

    pub fn sums(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.sum).collect()
    }

    pub fn unit_counts(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.unit_count).collect()
    }
}

/// `|det|²` of each streamed point, exact when the lattice has an evaluator.
///
/// Consecutive points usually differ only in `z_0`, so the exact polynomial is
/// restricted to the current row once and evaluated by Horner's rule.
struct DetEvaluator<'a> {
    lattice: &'a MatrixLattice,
    row_key: Vec<i64>,
    row: Vec<GaussInt>,
    primed: bool,
}

enum DetSq {
    Exact(i128),
    Float(f64),
}

impl<'a> DetEvaluator<'a> {
    fn new(lattice: &'a MatrixLattice) -> Self {
        DetEvaluator {
            lattice,
            row_key: vec![0; lattice.rank().saturating_sub(1)],
            row: Vec::new(),
            primed: false,
        }
    }

    #[inline]
    fn det_sq(&mut self, z: &[i64]) -> DetSq {
        match self.lattice.exact_det() {
            Some(d) => {
                if !self.primed || self.row_key[..] != z[1..] {
                    self.row_key.copy_from_slice(&z[1..]);
                    d.compiled().restrict_inner(z, &mut self.row);
                    self.primed = true;
                }
                DetSq::Exact(horner(&self.row, z[0]).norm_sq())
            }
            None => DetSq::Float(self.lattice.float_det(z).norm_sqr()),
        }
    }
}

struct SumFold<'a> {
    buckets: &'a RadiusBuckets,
    half_m: f64,
    policy: ZeroDetPolicy,
    det: DetEvaluator<'a>,
    count: Vec<u64>,
    units: Vec<u64>,
    sums: Vec<KahanSum>,
    skipped: u64,
    zero: Option<Vec<i64>>,
}

impl<'a> SumFold<'a> {
    fn new(lattice: &'a MatrixLattice, buckets: &'a RadiusBuckets, m: u32, policy: ZeroDetPolicy) -> Self {
        let b = buckets.len();
        SumFold {
            buckets,
            half_m: m as f64 / 2.0,
            policy,
            det: DetEvaluator::new(lattice),
            count: vec![0; b],
            units: vec![0; b],
            sums: vec![KahanSum::new(); b],
            skipped: 0,
            zero: None,
        }
    }
}

impl PointFold for SumFold<'_> {
    fn visit(&mut self, p: &BallPoint<'_>) {
        let i = self.buckets.index(p);
        if i >= self.count.len() {
            return;
        }
        self.count[i] += 1;
        let (d2, unit) = match self.det.det_sq(p.coeffs) {
            DetSq::Exact(d) => (d as f64, d == 1),
            DetSq::Float(d) => {
                let scale = (p.norm_sq / self.det.lattice.n() as f64).powi(self.det.lattice.n() as i32);
                let d = if d <= 1e-24 * scale.max(1.0) { 0.0 } else { d };
                (d, (d - 1.0).abs() <= 1e-9)
            }
        };
        if d2 == 0.0 {
            self.skipped += 1;
            if self.policy == ZeroDetPolicy::Reject && self.zero.is_none() {
                self.zero = Some(p.coeffs.to_vec());
            }
            return;
        }
        if unit {
            self.units[i] += 1;
            self.sums[i].add(1.0);
        } else {
            self.sums[i].add((-self.half_m * d2.ln()).exp());
        }
    }

    fn merge(&mut self, later: Self) {
        for i in 0..self.count.len() {
            self.count[i] += later.count[i];
            self.units[i] += later.units[i];
            self.sums[i].merge(&later.sums[i]);
        }
        self.skipped += later.skipped;
        if self.zero.is_none() {
            self.zero = later.zero;
        }
    }
}

/// `S_L^m(M)` and companions for every radius, from one bucketed pass.
pub fn inverse_det_sum(lattice: &MatrixLattice, m: u32, radii: &[f64]) -> Result<DetSumTable> {
    inverse_det_sum_with(lattice, m, radii, &DetSumOptions::default())
}

pub fn inverse_det_sum_with(
    lattice: &MatrixLattice,
    m: u32,
    radii: &[f64],
    opts: &DetSumOptions,
) -> Result<DetSumTable> {
    if m == 0 {
        return Err(Error::InvalidArgument("exponent m must be positive".into()));
    }
    let buckets = RadiusBuckets::new(lattice, radii)?;
    let fold = fold_ball(lattice, buckets.max_radius(), &opts.enumeration, || {
        SumFold::new(lattice, &buckets, m, opts.zero_policy)
    })?;
    if let Some(coeffs) = fold.zero {
        return Err(Error::ZeroDeterminantEncountered { coeffs });
    }
    let k = lattice.rank();
    let n = lattice.n();
    let norm_factor = lattice.covolume().powf(m as f64 * n as f64 / k as f64);
    let mut count = 0;
    let mut units = 0;
    let mut sum = KahanSum::new();
    let rows = radii
        .iter()
        .enumerate()
        .map(|(i, &radius)| {
            count += fold.count[i];
            units += fold.units[i];
            sum.merge(&fold.sums[i]);
            DetSumRow {
                radius,
                count,
                sum: sum.value(),
                unit_count: units,
                normalized: norm_factor * sum.value(),
            }
        })
        .collect();
    Ok(DetSumTable {
        label: lattice.label().to_string(),
        m,
        n,
        k,
        covolume: lattice.covolume(),
        rows,
        skipped_zero: fold.skipped,
    })
}

/// `|{X ∈ L(M) : |det X| = 1}|` per radius (exact predicate).
pub fn unit_count(lattice: &MatrixLattice, radii: &[f64]) -> Result<Vec<u64>> {
    unit_count_with(lattice, radii, &EnumOptions::default())
}

pub fn unit_count_with(lattice: &MatrixLattice, radii: &[f64], opts: &EnumOptions) -> Result<Vec<u64>> {
    if lattice.exact_det().is_none() {
        return Err(Error::NoExactDeterminant);
    }
    let opts = DetSumOptions {
        zero_policy: ZeroDetPolicy::Skip,
        enumeration: *opts,
    };
    Ok(inverse_det_sum_with(lattice, 2, radii, &opts)?.unit_counts())
}

fn number_field(lattice: &MatrixLattice) -> Result<&Arc<CyclicFieldData>> {
    match lattice.construction() {
        Construction::NumberField(f) if f.degree == 2 => Ok(f),
        _ => Err(Error::NotANumberFieldLattice),
    }
}

fn unit_cache() -> &'static Mutex<HashMap<String, Vec<GaussInt>>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Vec<GaussInt>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Radius of the fundamental-unit search.
pub const FUNDAMENTAL_UNIT_RADIUS: f64 = 16.0;

/// Smallest-Frobenius nontorsion unit of a quadratic number-field lattice,
/// first in enumeration order on ties, as `O_F` coordinates.
pub fn fundamental_unit(lattice: &MatrixLattice) -> Result<Vec<GaussInt>> {
    let field = number_field(lattice)?;
    if let Some(u) = unit_cache().lock().unwrap().get(&field.label) {
        return Ok(u.clone());
    }
    let det = lattice.exact_det().ok_or(Error::NoExactDeterminant)?;
    let mut best: Option<(f64, Vec<i64>)> = None;
    crate::enumeration::enumerate_ball(lattice, FUNDAMENTAL_UNIT_RADIUS, |p| {
        // torsion {±1, ±i} lives in the w_0 coordinates
        let torsion = p.coeffs[2..].iter().all(|&c| c == 0);
        if !torsion && det.eval(p.coeffs).norm_sq() == 1 && best.as_ref().is_none_or(|(b, _)| p.norm_sq < *b) {
            best = Some((p.norm_sq, p.coeffs.to_vec()));
        }
    })?;
    let (_, z) = best.ok_or_else(|| {
        Error::InvalidFieldData(format!("no nontorsion unit within radius {FUNDAMENTAL_UNIT_RADIUS}"))
    })?;
    let u = coords_to_field(&z);
    unit_cache().lock().unwrap().insert(field.label.clone(), u.clone());
    Ok(u)
}

fn coords_to_field(z: &[i64]) -> Vec<GaussInt> {
    z.chunks(2).map(|c| GaussInt::new(c[0] as i128, c[1] as i128)).collect()
}

fn field_to_coords(x: &[GaussInt]) -> Option<Vec<i64>> {
    let mut z = Vec::with_capacity(2 * x.len());
    for c in x {
        z.push(i64::try_from(c.re).ok()?);
        z.push(i64::try_from(c.im).ok()?);
    }
    Some(z)
}

/// `A_x(M) = |{u ∈ O_K* : ‖ψ(xu)‖_F ≤ M}|`, with units generated as
/// `i^a ε^t` from torsion and the fundamental unit `ε`.
pub fn unit_orbit_count(lattice: &MatrixLattice, x: &[i64], radius: f64) -> Result<u64> {
    let field = number_field(lattice)?;
    if x.len() != lattice.rank() {
        return Err(Error::InvalidArgument(format!("expected {} coordinates", lattice.rank())));
    }
    if x.iter().all(|&c| c == 0) {
        return Err(Error::InvalidArgument("x must be nonzero".into()));
    }
    let eps = fundamental_unit(lattice)?;
    let n_eps = field.norm(&eps)?;
    // ε^{-1} = σ(ε) / N(ε), and N(ε) is a unit of ℤ[i]
    let eps_inv = field.scale(&field.sigma(&eps), &n_eps.conj());
    let limit = 2.0 * radius * radius;
    let within = |y: &[GaussInt]| -> Option<bool> {
        let z = field_to_coords(y)?;
        let q2 = lattice.norm_sq_times_two(&z)?;
        Some(q2 as f64 <= limit)
    };
    let xs = coords_to_field(x);
    let mut count = 0;
    // t ≥ 0 with ε, then t ≤ −1 with ε^{-1}; the norm is convex in t
    for (mut y, step) in [(xs.clone(), &eps), (field.mul(&xs, &eps_inv), &eps_inv)] {
        let mut prev = f64::INFINITY;
        loop {
            let norm = lattice.norm_sq(&field_to_coords(&y).ok_or(Error::InvalidArgument("overflow".into()))?);
            let inside = within(&y).ok_or(Error::InvalidArgument("overflow".into()))?;
            if inside {
                // the four torsion multiples have the same Frobenius norm
                count += 4;
            } else if norm > prev {
                break;
            }
            prev = norm;
            y = field.mul(&y, step);
        }
    }
    Ok(count)
}

/// `Σ_{N(I) ≤ N} N(I)^{−s}` over the nonzero ideals of `ℤ[i]`.
pub fn dedekind_zeta_qi_truncated(s: f64, n_max: u64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!("s must exceed 1, got {s}")));
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let counts = ideal_counts_qi(n_max);
    let mut sum = KahanSum::new();
    for (n, &a) in counts.iter().enumerate().skip(1) {
        if a != 0 {
            sum.add(a as f64 * (n as f64).powf(-s));
        }
    }
    Ok(sum.value())
}

/// Number of ideals of norm `n` in `ℤ[i]`, `a_n = Σ_{d | n} χ_{−4}(d)`, for `n ≤ n_max`.
pub fn ideal_counts_qi(n_max: u64) -> Vec<i64> {
    let n_max = n_max as usize;
    let mut a = vec![0i64; n_max + 1];
    for d in (1..=n_max).step_by(2) {
        let chi = if d % 4 == 1 { 1 } else { -1 };
        for m in (d..=n_max).step_by(d) {
            a[m] += chi;
        }
    }
    a
}
