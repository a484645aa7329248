use anyhow::{Context, Result};
use detsum_core::asymptotics::{
    code_dmt_segment, dmt_sum_lower_exponent, fit_growth, fit_log_growth, optimal_dmt_exact, predicted_exponent,
    profile, verdict, FitOptions, Regime, Verdict, SLOPE_TOLERANCE,
};
use detsum_core::channel::{bler_csv, qam_codebook, simulate, SimConfig};
use detsum_core::constructions::{builtin, lattice_from_descriptor, nvd_check_with, BuiltinCode};
use detsum_core::detsum::{dedekind_zeta_qi_truncated, inverse_det_sum_with, DetSumOptions, ZeroDetPolicy};
use detsum_core::enumeration::{enumerate_ball_with, shell_counts_with, EnumOptions};
use detsum_core::lattice::LatticeDescriptor;
use detsum_core::lie::{build_root_data, exponent_table, unit_growth_prediction, volume_exponent, Family, UnitRegime};
use detsum_core::numeric::{fmt_sig, parse_grid};
use detsum_core::MatrixLattice;
use serde_json::{json, Value};
use std::fmt;
use std::path::PathBuf;

use crate::{Command, Format, LatticeArg};

/// Marks errors that should exit with the usage status.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub enum Body {
    Csv(String),
    Json(Value),
    Text(String),
}

pub struct Emit {
    pub json: Value,
    pub csv: Option<String>,
    pub text: Option<String>,
    /// Extra files written next to the primary output.
    pub files: Vec<(PathBuf, Body)>,
    pub status: u8,
}

impl Emit {
    fn json(json: Value) -> Self {
        Emit { json, csv: None, text: None, files: Vec::new(), status: 0 }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }
}

/// Explicit `--format` wins; otherwise text, then CSV, then JSON.
pub fn select_body(emit: &Emit, format: Option<Format>) -> Result<Body> {
    Ok(match format {
        Some(Format::Json) => Body::Json(emit.json.clone()),
        Some(Format::Csv) => Body::Csv(emit.csv.clone().ok_or_else(|| usage("this command has no CSV form"))?),
        None => match (&emit.text, &emit.csv) {
            (Some(t), _) => Body::Text(t.clone()),
            (None, Some(c)) => Body::Csv(c.clone()),
            _ => Body::Json(emit.json.clone()),
        },
    })
}

fn load(src: &LatticeArg) -> Result<MatrixLattice> {
    if let Some(code) = &src.code {
        let code: BuiltinCode = code.parse()?;
        return Ok(builtin(code)?);
    }
    let path = src.lattice.as_ref().expect("clap enforces one source");
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let d: LatticeDescriptor =
        serde_json::from_str(&text).map_err(|e| usage(format!("bad descriptor {}: {e}", path.display())))?;
    Ok(lattice_from_descriptor(&d)?)
}

fn enum_opts(budget: Option<f64>) -> EnumOptions {
    let mut o = EnumOptions::default();
    if let Some(b) = budget {
        o.node_budget = b;
    }
    o
}

fn regime_name(r: Regime) -> &'static str {
    r.describe()
}

fn unit_regime(r: Regime) -> Option<UnitRegime> {
    match r {
        Regime::ComplexCenter => Some(UnitRegime::ComplexCenter),
        Regime::RationalUnramified => Some(UnitRegime::Unramified),
        Regime::RationalRamified => Some(UnitRegime::Ramified),
        Regime::NumberField { .. } => None,
    }
}

pub fn dispatch(cmd: &Command) -> Result<Emit> {
    match cmd {
        Command::Construct { src } => construct(src),
        Command::Enumerate { src, radii, points, budget } => enumerate(src, radii, *points, *budget),
        Command::Sum { src, m, radii, skip_zero, budget } => sum(src, *m, radii, *skip_zero, *budget),
        Command::Fit { input, col, lo, hi, log, min_span } => fit(input, col, *lo, *hi, *log, *min_span),
        Command::Predict { src, nr } => predict(src, *nr),
        Command::Dmt { n, k, nr, code } => dmt(*n, *k, *nr, code.as_deref()),
        Command::Lie { family, n } => lie(family, *n),
        Command::Simulate { src, nr, snr, blocks, seed, noiseless } => sim(src, *nr, snr, *blocks, *seed, *noiseless),
        Command::Report { src, m, nr, radii, out_dir } => report(src, *m, *nr, radii, out_dir.as_ref()),
        Command::Zeta { s, n_max } => zeta(*s, *n_max),
        Command::Nvd { src, radius } => nvd(src, *radius),
    }
}

fn construct(src: &LatticeArg) -> Result<Emit> {
    let l = load(src)?;
    let k = l.rank();
    let gram: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| l.gram_entry(i, j)).collect()).collect();
    let mut csv = String::new();
    for row in &gram {
        let cells: Vec<String> = row.iter().map(|x| fmt_sig(*x, 12)).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    let json = json!({
        "label": l.label(),
        "n": l.n(),
        "k": k,
        "covolume": l.covolume(),
        "exact_det": l.exact_det().is_some(),
        "gram": gram,
        "descriptor": l.to_descriptor(),
    });
    Ok(Emit::json(json).with_csv(csv))
}

fn enumerate(src: &LatticeArg, radii: &str, points: bool, budget: Option<f64>) -> Result<Emit> {
    let l = load(src)?;
    let radii = parse_grid(radii)?;
    let opts = enum_opts(budget);
    if points {
        let r = radii.iter().cloned().fold(0.0, f64::max);
        let mut rows = Vec::new();
        enumerate_ball_with(&l, r, &opts, |p| rows.push((p.coeffs.to_vec(), p.norm_sq)))?;
        let head: Vec<String> = (1..=l.rank()).map(|i| format!("z{i}")).chain(["norm_sq".into()]).collect();
        let mut csv = head.join(",") + "\n";
        for (z, n) in &rows {
            let cells: Vec<String> = z.iter().map(|x| x.to_string()).chain([fmt_sig(*n, 12)]).collect();
            csv.push_str(&cells.join(","));
            csv.push('\n');
        }
        let json = json!({
            "label": l.label(),
            "radius": r,
            "points": rows.iter().map(|(z, n)| json!({"coeffs": z, "norm_sq": n})).collect::<Vec<_>>(),
        });
        return Ok(Emit::json(json).with_csv(csv));
    }
    let table = shell_counts_with(&l, &radii, &opts)?;
    let json = json!({"label": l.label(), "radii": table.radii, "counts": table.counts});
    Ok(Emit::json(json).with_csv(table.to_csv()))
}

fn sum(src: &LatticeArg, m: u32, radii: &str, skip_zero: bool, budget: Option<f64>) -> Result<Emit> {
    let l = load(src)?;
    let radii = parse_grid(radii)?;
    let opts = DetSumOptions {
        zero_policy: if skip_zero { ZeroDetPolicy::Skip } else { ZeroDetPolicy::Reject },
        enumeration: enum_opts(budget),
    };
    let table = inverse_det_sum_with(&l, m, &radii, &opts)?;
    Ok(Emit::json(serde_json::to_value(&table)?).with_csv(table.to_csv()))
}

/// Reads `M` and one named column, skipping `#` lines.
pub fn read_column(path: &PathBuf, col: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    // `-` reads stdin so `sum | fit --in -` works
    let src: Box<dyn std::io::Read> = if path.as_os_str() == "-" {
        Box::new(std::io::stdin())
    } else {
        Box::new(std::fs::File::open(path).with_context(|| format!("reading {}", path.display()))?)
    };
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(src);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| usage(format!("column {name:?} not in {}", path.display())))
    };
    let (mi, ci) = (find("M")?, find(col)?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec[i].trim().parse::<f64>().map_err(|_| usage(format!("non-numeric cell {:?}", &rec[i])))
        };
        xs.push(parse(mi)?);
        ys.push(parse(ci)?);
    }
    Ok((xs, ys))
}

fn fit(input: &PathBuf, col: &str, lo: Option<f64>, hi: Option<f64>, log: bool, min_span: Option<f64>) -> Result<Emit> {
    let (xs, ys) = read_column(input, col)?;
    let mut opts = match (lo, hi) {
        (Some(lo), Some(hi)) => FitOptions::window(lo, hi),
        _ => FitOptions::default(),
    };
    if let Some(s) = min_span {
        opts.min_span = s;
    }
    let f = if log { fit_log_growth(&xs, &ys, &opts)? } else { fit_growth(&xs, &ys, &opts)? };
    let csv = format!(
        "slope,intercept,stderr,r2,points\n{},{},{},{},{}\n",
        fmt_sig(f.slope, 10),
        fmt_sig(f.intercept, 10),
        fmt_sig(f.stderr, 10),
        fmt_sig(f.r2, 10),
        f.points_used.len()
    );
    let mut json = serde_json::to_value(&f)?;
    json["column"] = json!(col);
    json["model"] = json!(if log { "value ~ a + b log M" } else { "log value ~ a + b log M" });
    Ok(Emit::json(json).with_csv(csv))
}

fn predict(src: &LatticeArg, nr: usize) -> Result<Emit> {
    let l = load(src)?;
    let p = profile(&l)?;
    let pred = predicted_exponent(&p, nr)?;
    let units = match unit_regime(p.regime) {
        Some(r) => unit_growth_prediction(r, p.n).ok().map(|t| t.to_string()),
        None => None,
    };
    let json = json!({
        "label": l.label(),
        "regime": regime_name(p.regime),
        "n": p.n,
        "k": p.k,
        "nr": nr,
        "predicted": pred.exponent,
        "polylog": pred.polylog,
        "law": pred.law,
        "lower_bound": dmt_sum_lower_exponent(p.n, p.k, nr),
        "unit_exponent": units,
    });
    Ok(Emit::json(json))
}

fn dmt(n: usize, k: Option<usize>, nr: usize, code: Option<&str>) -> Result<Emit> {
    if n == 0 || nr == 0 {
        return Err(usage("n and n_r must be positive"));
    }
    let k = k.unwrap_or(2 * n * n);
    let opt = optimal_dmt_exact(n, nr);
    let mut csv = String::from("curve,r,d\n");
    for (r, d) in &opt {
        csv.push_str(&format!("optimal,{r},{d}\n"));
    }
    let mut json = json!({
        "n": n,
        "k": k,
        "nr": nr,
        "optimal": opt,
        "lower_exponent": dmt_sum_lower_exponent(n, k, nr),
    });
    if let Some(code) = code {
        let l = builtin(code.parse()?)?;
        if l.n() != n {
            return Err(usage(format!("{code} has n = {}, not {n}", l.n())));
        }
        let seg = code_dmt_segment(profile(&l)?.regime, n, nr)?;
        for (r, d) in &seg.curve.vertices {
            csv.push_str(&format!("{code},{},{}\n", fmt_sig(*r, 10), fmt_sig(*d, 10)));
        }
        json["code"] = serde_json::to_value(&seg)?;
    }
    Ok(Emit::json(json).with_csv(csv))
}

fn lie(family: &str, n: usize) -> Result<Emit> {
    let family: Family = family.parse().map_err(|e: detsum_core::Error| usage(e.to_string()))?;
    let data = build_root_data(family, n)?;
    let t = volume_exponent(&data)?;
    let rows = exponent_table(&data, &data.dual_basis_raw);
    let mut csv = String::from("j,psi,two_psi,lambda_raw,lambda_normalized\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.j,
            r.psi,
            &r.psi + &r.psi,
            r.lambda_raw,
            r.lambda_normalized
        ));
    }
    let text = format!("T = {t}\n{csv}");
    let json = json!({
        "family": family,
        "n": n,
        "T": t.to_string(),
        "half_sum": data.half_sum().to_string(),
        "rows": rows.iter().map(|r| json!({
            "j": r.j,
            "psi": r.psi.to_string(),
            "lambda_raw": r.lambda_raw.to_string(),
            "lambda_normalized": r.lambda_normalized.to_string(),
        })).collect::<Vec<_>>(),
    });
    Ok(Emit::json(json).with_csv(csv).with_text(text))
}

fn sim(src: &LatticeArg, nr: usize, snr: &str, blocks: u64, seed: u64, noiseless: bool) -> Result<Emit> {
    if blocks < 10_000 {
        return Err(usage("--blocks must be at least 10000"));
    }
    let l = load(src)?;
    let book = qam_codebook(&l)?;
    let mut cfg = SimConfig::new(nr, parse_grid(snr)?, blocks, seed);
    cfg.noiseless = noiseless;
    let rows = simulate(&book, &cfg)?;
    let json = json!({
        "code": book.source,
        "rate_bpcu": book.rate(),
        "config": cfg,
        "rows": rows,
    });
    Ok(Emit::json(json).with_csv(bler_csv(&rows)))
}

fn report(src: &LatticeArg, m: u32, nr: usize, radii: &str, out_dir: Option<&PathBuf>) -> Result<Emit> {
    let l = load(src)?;
    let radii = parse_grid(radii)?;
    let p = profile(&l)?;
    let pred = predicted_exponent(&p, nr)?;
    let table = inverse_det_sum_with(&l, m, &radii, &DetSumOptions::default())?;
    let fit = fit_growth(&table.radii(), &table.sums(), &FitOptions::default())?;
    let v = verdict(fit.slope, &pred, SLOPE_TOLERANCE);
    let units: Vec<f64> = table.unit_counts().iter().map(|&u| u as f64).collect();
    let unit_fit = fit_growth(&table.radii(), &units, &FitOptions::default()).ok();
    let unit_pred = unit_regime(p.regime).and_then(|r| unit_growth_prediction(r, p.n).ok());
    let mut json = json!({
        "label": l.label(),
        "m": m,
        "nr": nr,
        "regime": regime_name(p.regime),
        "law": pred.law,
        "measured": fit.slope,
        "predicted": pred.exponent,
        "polylog": pred.polylog,
        "lower_bound": dmt_sum_lower_exponent(p.n, p.k, nr),
        "tolerance": SLOPE_TOLERANCE,
        "verdict": v,
        "fit": fit,
        "units": {
            "measured": unit_fit.as_ref().map(|f| f.slope),
            "predicted": unit_pred.map(|t| t.to_string()),
        },
    });
    if m as usize != 2 * nr {
        json["note"] = json!(format!("prediction is for S^(2 n_r) = S^{}, table uses m = {m}", 2 * nr));
    }
    let mut emit = Emit::json(json.clone()).with_csv(table.to_csv());
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        emit.files.push((dir.join("detsum_table.csv"), Body::Csv(table.to_csv())));
        emit.files.push((dir.join("report.json"), Body::Json(json)));
    }
    // the report document is the primary output
    emit.csv = None;
    emit.status = if v == Verdict::Mismatch { 3 } else { 0 };
    Ok(emit)
}

fn zeta(s: f64, n_max: u64) -> Result<Emit> {
    let z = dedekind_zeta_qi_truncated(s, n_max)?;
    let json = json!({"s": s, "n_max": n_max, "value": z});
    Ok(Emit::json(json).with_text(format!("{}\n", fmt_sig(z, 12))))
}

fn nvd(src: &LatticeArg, radius: f64) -> Result<Emit> {
    let l = load(src)?;
    let r = nvd_check_with(&l, radius, &EnumOptions::default())?;
    let mut json = serde_json::to_value(&r)?;
    json["label"] = json!(l.label());
    // i128 does not round-trip through every JSON reader
    json["min_det_norm_sq"] = json!(r.min_det_norm_sq.map(|d| d.to_string()));
    Ok(Emit::json(json))
}
