//! Monte Carlo block error rates over the quasi-static Rayleigh channel
//! `Y = √(ρ/n_t)·H·X + N` with exhaustive ML decoding.

use crate::error::{Error, Result};
use crate::lattice::MatrixLattice;
use crate::matrix::ComplexMatrix;
use crate::numeric::fmt_sig;
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const QAM16: [i64; 4] = [-3, -1, 1, 3];

#[derive(Clone, Debug)]
pub struct Codebook {
    pub codewords: Vec<ComplexMatrix>,
    /// Factor applied to the lattice points to meet the power constraint.
    pub scale: f64,
    pub source: String,
    /// Integer lattice coefficients of each codeword before scaling.
    pub coeffs: Vec<Vec<i64>>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn n(&self) -> usize {
        self.codewords.first().map_or(0, |c| c.dim())
    }

    pub fn mean_energy(&self) -> f64 {
        self.codewords.iter().map(|c| c.frobenius_sq()).sum::<f64>() / self.len() as f64
    }

    /// Bits per channel use for a square `T = n` block.
    pub fn rate(&self) -> f64 {
        (self.len() as f64).log2() / self.n() as f64
    }
}

/// 16-QAM on each complex coordinate pair of a rank-4 lattice in `M_2(ℂ)`,
/// normalized to mean `‖X‖_F² = T·n = 4`.
pub fn qam_codebook(lattice: &MatrixLattice) -> Result<Codebook> {
    if lattice.n() != 2 || lattice.rank() != 4 {
        return Err(Error::UnsupportedLattice(format!(
            "16-QAM codebooks need n = 2 and rank 4, got n = {} and rank {}",
            lattice.n(),
            lattice.rank()
        )));
    }
    let mut coeffs = Vec::with_capacity(256);
    for &a in &QAM16 {
        for &b in &QAM16 {
            for &c in &QAM16 {
                for &d in &QAM16 {
                    coeffs.push(vec![a, b, c, d]);
                }
            }
        }
    }
    let raw: Vec<ComplexMatrix> = coeffs.iter().map(|z| lattice.matrix_of(z)).collect();
    let mean = raw.iter().map(|c| c.frobenius_sq()).sum::<f64>() / raw.len() as f64;
    let target = (lattice.n() * lattice.n()) as f64;
    let scale = (target / mean).sqrt();
    Ok(Codebook {
        codewords: raw.iter().map(|c| c.scale(scale)).collect(),
        scale,
        source: format!("{} / 16-QAM", lattice.label()),
        coeffs,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_r: usize,
    pub snr_db: Vec<f64>,
    pub blocks: u64,
    pub seed: u64,
    /// Force `N = 0` (decoder sanity check).
    #[serde(default)]
    pub noiseless: bool,
}

impl SimConfig {
    pub fn new(n_r: usize, snr_db: Vec<f64>, blocks: u64, seed: u64) -> Self {
        SimConfig { n_r, snr_db, blocks, seed, noiseless: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlerRow {
    pub snr_db: f64,
    pub blocks: u64,
    pub errors: u64,
    pub bler: f64,
    pub ci95: f64,
}

const Z95: f64 = 1.959963984540054;

/// Wilson score interval `(lo, hi)` for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

impl BlerRow {
    pub fn new(snr_db: f64, blocks: u64, errors: u64) -> Self {
        let (lo, hi) = wilson_interval(errors, blocks);
        BlerRow {
            snr_db,
            blocks,
            errors,
            bler: errors as f64 / blocks as f64,
            ci95: (hi - lo) / 2.0,
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        wilson_interval(self.errors, self.blocks)
    }
}

pub fn bler_csv(rows: &[BlerRow]) -> String {
    let mut s = String::from("snr_db,blocks,errors,bler,ci95\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.snr_db,
            r.blocks,
            r.errors,
            fmt_sig(r.bler, 10),
            fmt_sig(r.ci95, 10)
        ));
    }
    s
}

/// Counter-based source: block `b` of SNR point `s` always reads the same
/// ChaCha words, whatever thread runs it.
struct BlockRng {
    rng: ChaCha8Rng,
}

impl BlockRng {
    fn new(seed: u64, snr_index: u64, block: u64, words_per_block: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(snr_index);
        rng.set_word_pos(block as u128 * words_per_block as u128);
        BlockRng { rng }
    }

    /// Uniform in (0, 1].
    fn uniform(&mut self) -> f64 {
        1.0 - (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Circularly symmetric, `E|z|² = 1`.
    fn gaussian(&mut self) -> Complex64 {
        let r = (-self.uniform().ln()).sqrt();
        let t = std::f64::consts::TAU * self.uniform();
        Complex64::new(r * t.cos(), r * t.sin())
    }

    fn index(&mut self, len: usize) -> usize {
        ((self.rng.next_u64() as u128 * len as u128) >> 64) as usize
    }
}

/// Per-block channel draw: returns `(sent, decoded)`.
fn run_block(book: &Codebook, cfg: &SimConfig, amp: f64, rng: &mut BlockRng) -> (usize, usize) {
    let n = book.n();
    let nr = cfg.n_r;
    let sent = rng.index(book.len());
    let h: Vec<Complex64> = (0..nr * n).map(|_| rng.gaussian()).collect();
    let noise: Vec<Complex64> = (0..nr * n).map(|_| rng.gaussian()).collect();
    let hx = |x: &ComplexMatrix, out: &mut [Complex64]| {
        let e = x.entries();
        for r in 0..nr {
            for c in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += h[r * n + k] * e[k * n + c];
                }
                out[r * n + c] = s * amp;
            }
        }
    };
    let mut y = vec![Complex64::new(0.0, 0.0); nr * n];
    hx(&book.codewords[sent], &mut y);
    if !cfg.noiseless {
        for (yi, ni) in y.iter_mut().zip(&noise) {
            *yi += ni;
        }
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); nr * n];
    let mut best = (f64::INFINITY, 0);
    for (i, x) in book.codewords.iter().enumerate() {
        hx(x, &mut buf);
        let d: f64 = y.iter().zip(&buf).map(|(a, b)| (a - b).norm_sqr()).sum();
        if d < best.0 {
            best = (d, i);
        }
    }
    (sent, best.1)
}

fn words_per_block(book: &Codebook, n_r: usize) -> u64 {
    // one u64 for the codeword, two per Gaussian sample; ChaCha words are u32
    let gaussians = 2 * n_r * book.n();
    2 * (1 + 2 * gaussians as u64)
}

/// Error count for one SNR point over blocks `0..cfg.blocks`.
pub fn count_errors(book: &Codebook, cfg: &SimConfig, snr_index: usize) -> u64 {
    let rho = 10f64.powf(cfg.snr_db[snr_index] / 10.0);
    let amp = (rho / book.n() as f64).sqrt();
    let stride = words_per_block(book, cfg.n_r);
    let one = |b: u64| -> u64 {
        let mut rng = BlockRng::new(cfg.seed, snr_index as u64, b, stride);
        let (s, d) = run_block(book, cfg, amp, &mut rng);
        u64::from(s != d)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..cfg.blocks).into_par_iter().map(one).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..cfg.blocks).map(one).sum()
    }
}

pub fn simulate(book: &Codebook, cfg: &SimConfig) -> Result<Vec<BlerRow>> {
    if cfg.n_r == 0 || cfg.blocks == 0 {
        return Err(Error::InvalidArgument("n_r and blocks must be positive".into()));
    }
    if book.is_empty() {
        return Err(Error::InvalidArgument("empty codebook".into()));
    }
    Ok((0..cfg.snr_db.len())
        .map(|i| BlerRow::new(cfg.snr_db[i], cfg.blocks, count_errors(book, cfg, i)))
        .collect())
}

/// Transmitted and decoded codeword indices for a single block, exposed for
/// decoder cross-checks.
pub fn trace_block(book: &Codebook, cfg: &SimConfig, snr_index: usize, block: u64) -> BlockTrace {
    let rho = 10f64.powf(cfg.snr_db[snr_index] / 10.0);
    let amp = (rho / book.n() as f64).sqrt();
    let stride = words_per_block(book, cfg.n_r);
    let mut rng = BlockRng::new(cfg.seed, snr_index as u64, block, stride);
    let sent = rng.index(book.len());
    let n = book.n();
    let h: Vec<Complex64> = (0..cfg.n_r * n).map(|_| rng.gaussian()).collect();
    let noise: Vec<Complex64> = (0..cfg.n_r * n).map(|_| rng.gaussian()).collect();
    let mut rng = BlockRng::new(cfg.seed, snr_index as u64, block, stride);
    let (_, decoded) = run_block(book, cfg, amp, &mut rng);
    BlockTrace { sent, decoded, h, noise, amp }
}

#[derive(Clone, Debug)]
pub struct BlockTrace {
    pub sent: usize,
    pub decoded: usize,
    /// `n_r × n` row-major.
    pub h: Vec<Complex64>,
    /// `n_r × T` row-major; ignored when the config is noiseless.
    pub noise: Vec<Complex64>,
    pub amp: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{builtin, BuiltinCode};

    #[test]
    fn codebook_power() {
        for code in [BuiltinCode::L1, BuiltinCode::L2, BuiltinCode::Alamouti] {
            let book = qam_codebook(&builtin(code).unwrap()).unwrap();
            assert_eq!(book.len(), 256);
            assert!((book.mean_energy() - 4.0).abs() < 1e-9);
            assert!((book.rate() - 4.0).abs() < 1e-12);
        }
        let golden = builtin(BuiltinCode::GoldenOrder).unwrap();
        assert!(matches!(qam_codebook(&golden), Err(Error::UnsupportedLattice(_))));
    }

    #[test]
    fn wilson_basics() {
        let r = BlerRow::new(0.0, 100, 0);
        assert_eq!(r.bler, 0.0);
        let (lo, hi) = r.interval();
        assert!(lo.abs() < 1e-15);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo + hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_noiseless() {
        let book = qam_codebook(&builtin(BuiltinCode::L2).unwrap()).unwrap();
        let cfg = SimConfig::new(1, vec![10.0, 20.0], 500, 7);
        assert_eq!(simulate(&book, &cfg).unwrap(), simulate(&book, &cfg).unwrap());
        let mut quiet = SimConfig::new(2, vec![10.0], 500, 7);
        quiet.noiseless = true;
        assert_eq!(simulate(&book, &quiet).unwrap()[0].errors, 0);
    }

    #[test]
    fn trace_matches_run() {
        let book = qam_codebook(&builtin(BuiltinCode::L1).unwrap()).unwrap();
        let cfg = SimConfig::new(1, vec![12.0], 50, 3);
        let errs = (0..50).filter(|&b| {
            let t = trace_block(&book, &cfg, 0, b);
            t.sent != t.decoded
        });
        assert_eq!(errs.count() as u64, count_errors(&book, &cfg, 0));
    }
}
