//! Small numeric helpers: compensated summation and significant-digit formatting.

/// Kahan–Babuška (Neumaier) compensated sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum in; the caller fixes the merge order.
    pub fn merge(&mut self, other: &KahanSum) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `%g`-style formatting with `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let exp = x.abs().log10().floor() as i32;
    // rounding can push the value into the next decade
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap();
    let exp = if rounded.abs() >= 10f64.powi(exp + 1) { exp + 1 } else { exp };
    if exp < -5 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        let (mant, e) = s.split_once('e').unwrap();
        format!("{}e{}", trim_zeros(mant), e)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Volume of the unit ball in ℝ^k.
pub fn unit_ball_volume(k: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_k = 2π/k · V_{k-2}
    let mut v = if k.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut d = if k.is_multiple_of(2) { 2 } else { 3 };
    while d <= k {
        v *= 2.0 * std::f64::consts::PI / d as f64;
        d += 2;
    }
    v
}

/// Parses `"a:b:gN"` (N geometric points) or `"a:b:step"` (arithmetic,
/// inclusive of `b` up to rounding). A bare number is a one-point grid.
pub fn parse_grid(spec: &str) -> crate::Result<Vec<f64>> {
    let bad = || crate::Error::InvalidArgument(format!("bad grid {spec:?}: expected a:b:gN or a:b:step"));
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [x] => Ok(vec![num(x)?]),
        [a, b, g] if g.trim_start().starts_with('g') => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = g.trim()[1..].parse().map_err(|_| bad())?;
            if a <= 0.0 || b < a || n == 0 || (n == 1 && b != a) {
                return Err(bad());
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            let r = (b / a).ln() / (n - 1) as f64;
            Ok((0..n)
                .map(|i| if i == n - 1 { b } else { a * (r * i as f64).exp() })
                .collect())
        }
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step <= 0.0 || b < a {
                return Err(bad());
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + step * i as f64).collect())
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut k = KahanSum::new();
        k.add(1e16);
        for _ in 0..1000 {
            k.add(1.0);
        }
        k.add(-1e16);
        assert_eq!(k.value(), 1000.0);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(8.0, 6), "8");
        assert_eq!(fmt_sig(10.079368399158986, 6), "10.0794");
        assert_eq!(fmt_sig(96.0, 6), "96");
        assert_eq!(fmt_sig(0.000123456789, 6), "0.000123457");
        assert_eq!(fmt_sig(1234567.0, 6), "1.23457e6");
        assert_eq!(fmt_sig(999999.7, 6), "1e6");
        assert_eq!(fmt_sig(-2.5, 10), "-2.5");
        assert_eq!(fmt_sig(113.2052345678901, 10), "113.2052346");
    }

    #[test]
    fn ball_volumes() {
        use std::f64::consts::PI;
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(8) - PI.powi(4) / 24.0).abs() < 1e-13);
    }

    #[test]
    fn grids() {
        let g = parse_grid("8:96:g12").unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!((g[0], g[11]), (8.0, 96.0));
        assert!((g[1] / g[0] - g[11] / g[10]).abs() < 1e-12);
        assert_eq!(parse_grid("10:24:2").unwrap(), vec![10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 22.0, 24.0]);
        assert_eq!(parse_grid("5").unwrap(), vec![5.0]);
        assert!(parse_grid("0:4:g3").is_err());
        assert!(parse_grid("1:4:0").is_err());
        assert!(parse_grid("x").is_err());
    }
}
