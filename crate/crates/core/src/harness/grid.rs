//! Point-set specifications for sweeps.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};

/// One line of a grid specification.
///
/// Text form, one item per line, `#` starts a comment:
/// `point re im`, `line re0 im0 re1 im1 count`,
/// `rect re_min re_max im_min im_max nx ny`, `tau_alpha re im`,
/// `tau_beta re im`, `random count re_min re_max im_min im_max [seed]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GridItem {
    Point(Complex64),
    Line { from: Complex64, to: Complex64, count: usize },
    Rect { re: (f64, f64), im: (f64, f64), nx: usize, ny: usize },
    /// `z = alpha + (1 + alpha) t`.
    TauAlpha(Complex64),
    /// `z = beta + (beta - 1) t`.
    TauBeta(Complex64),
    Random { count: usize, re: (f64, f64), im: (f64, f64), seed: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub items: Vec<GridItem>,
}

fn spread(a: f64, b: f64, k: usize, count: usize) -> f64 {
    if count <= 1 {
        a
    } else {
        a + (b - a) * k as f64 / (count - 1) as f64
    }
}

impl GridSpec {
    pub fn new(items: Vec<GridItem>) -> Self {
        GridSpec { items }
    }

    /// Real points on the axis.
    pub fn real_points(xs: &[f64]) -> Self {
        GridSpec { items: xs.iter().map(|&x| GridItem::Point(Complex64::new(x, 0.0))).collect() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut items = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let kind = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            let bad = |msg: &str| Error::Parse(format!("grid line {}: {msg}: {raw:?}", lineno + 1));
            let num = |i: usize| -> Result<f64> {
                let w = rest.get(i).ok_or_else(|| bad("missing field"))?;
                let v: f64 = w.parse().map_err(|_| bad("bad number"))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(bad("non-finite number"))
                }
            };
            let int = |i: usize| -> Result<u64> {
                let w = rest.get(i).ok_or_else(|| bad("missing field"))?;
                w.parse().map_err(|_| bad("bad integer"))
            };
            let arity = |lo: usize, hi: usize| -> Result<()> {
                if rest.len() < lo || rest.len() > hi {
                    Err(bad("wrong number of fields"))
                } else {
                    Ok(())
                }
            };
            let item = match kind {
                "point" => {
                    arity(2, 2)?;
                    GridItem::Point(Complex64::new(num(0)?, num(1)?))
                }
                "line" => {
                    arity(5, 5)?;
                    GridItem::Line {
                        from: Complex64::new(num(0)?, num(1)?),
                        to: Complex64::new(num(2)?, num(3)?),
                        count: int(4)? as usize,
                    }
                }
                "rect" => {
                    arity(6, 6)?;
                    GridItem::Rect { re: (num(0)?, num(1)?), im: (num(2)?, num(3)?), nx: int(4)? as usize, ny: int(5)? as usize }
                }
                "tau_alpha" => {
                    arity(2, 2)?;
                    GridItem::TauAlpha(Complex64::new(num(0)?, num(1)?))
                }
                "tau_beta" => {
                    arity(2, 2)?;
                    GridItem::TauBeta(Complex64::new(num(0)?, num(1)?))
                }
                "random" => {
                    arity(5, 6)?;
                    let seed = if rest.len() == 6 { int(5)? } else { 0 };
                    GridItem::Random { count: int(0)? as usize, re: (num(1)?, num(2)?), im: (num(3)?, num(4)?), seed }
                }
                other => return Err(bad(&format!("unknown item {other:?}"))),
            };
            items.push(item);
        }
        Ok(GridSpec { items })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Points for one degree; edge-scaled items depend on alpha and beta.
    pub fn points(&self, eq: &Equilibrium) -> Vec<Complex64> {
        let (alpha, beta) = (eq.alpha(), eq.beta());
        let mut out = Vec::new();
        for item in &self.items {
            match item {
                GridItem::Point(z) => out.push(*z),
                GridItem::Line { from, to, count } => {
                    for k in 0..*count {
                        let t = if *count <= 1 { 0.0 } else { k as f64 / (*count - 1) as f64 };
                        out.push(from + (to - from) * t);
                    }
                }
                GridItem::Rect { re, im, nx, ny } => {
                    for j in 0..*ny {
                        for i in 0..*nx {
                            out.push(Complex64::new(spread(re.0, re.1, i, *nx), spread(im.0, im.1, j, *ny)));
                        }
                    }
                }
                GridItem::TauAlpha(t) => out.push(alpha + (1.0 + alpha) * t),
                GridItem::TauBeta(t) => out.push(beta + (beta - 1.0) * t),
                GridItem::Random { count, re, im, seed } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    for _ in 0..*count {
                        let x = if re.0 < re.1 { rng.gen_range(re.0..re.1) } else { re.0 };
                        let y = if im.0 < im.1 { rng.gen_range(im.0..im.1) } else { im.0 };
                        out.push(Complex64::new(x, y));
                    }
                }
            }
        }
        out
    }
}
