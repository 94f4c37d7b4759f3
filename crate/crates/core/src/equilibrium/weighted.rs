//! Integrals against inverse-square-root weights on the band (alpha, beta),
//! the tail (beta, inf) and the gap (-1, alpha), with substitutions that make
//! the endpoint behavior smooth and singularity subtraction for Cauchy
//! kernels whose pole lies on or near the segment.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::quad::{integrate, QuadSettings};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel {
    One,
    X,
    /// `1 / (x - z)`.
    Cauchy(Complex64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    /// `1/sqrt((x-alpha)(beta-x))` on (alpha, beta).
    Band { alpha: f64, beta: f64 },
    /// `1/sqrt((x-alpha)(x-beta))` on (beta, inf).
    Tail { alpha: f64, beta: f64 },
    /// `1/sqrt((alpha-x)(beta-x))` on (-1, alpha).
    Gap { alpha: f64, beta: f64 },
}

#[derive(Clone, Copy, Debug)]
enum Map {
    /// x = alpha + u^2 on [alpha, 1]
    BandLeft,
    /// x = 1 + (beta-1) sin^2 u on [1, beta]
    BandRight,
    /// x = beta + u^2
    TailNear,
    /// x = beta + (t0/(1-u))^2
    TailFar(f64),
    /// x = -1 + (1+alpha) sin^2 u
    Gap,
}

struct Piece {
    map: Map,
    lo: f64,
    hi: f64,
    breaks: Vec<f64>,
    subtract: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Weighted {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

impl Segment {
    fn ends(&self) -> (f64, f64) {
        match *self {
            Segment::Band { alpha, beta } => (alpha, beta),
            Segment::Tail { beta, .. } => (beta, f64::INFINITY),
            Segment::Gap { alpha, .. } => (-1.0, alpha),
        }
    }

    fn weight(&self, x: f64) -> f64 {
        match *self {
            Segment::Band { alpha, beta } => 1.0 / ((x - alpha) * (beta - x)).sqrt(),
            Segment::Tail { alpha, beta } => 1.0 / ((x - alpha) * (x - beta)).sqrt(),
            Segment::Gap { alpha, beta } => 1.0 / ((alpha - x) * (beta - x)).sqrt(),
        }
    }

    /// The abscissa at u, weight times dx/du, and dx/du.
    fn eval(&self, map: Map, u: f64) -> (Abscissa, f64, f64) {
        let (x, wj, dxdu) = match (*self, map) {
            (Segment::Band { beta, .. }, Map::BandRight) => {
                let (s, c) = u.sin_cos();
                let h = beta - 1.0;
                let d = h * s * s;
                let x = 1.0 + d;
                let alpha = self.alpha();
                return (Abscissa { x, from_one: d }, 2.0 * h.sqrt() * s / (x - alpha).sqrt(), 2.0 * h * s * c);
            }
            _ => self.eval_plain(map, u),
        };
        (Abscissa { x, from_one: x - 1.0 }, wj, dxdu)
    }

    fn alpha(&self) -> f64 {
        match *self {
            Segment::Band { alpha, .. } | Segment::Tail { alpha, .. } | Segment::Gap { alpha, .. } => alpha,
        }
    }

    fn eval_plain(&self, map: Map, u: f64) -> (f64, f64, f64) {
        match (*self, map) {
            (Segment::Band { alpha, beta }, Map::BandLeft) => {
                let x = alpha + u * u;
                (x, 2.0 / (beta - x).sqrt(), 2.0 * u)
            }
            (Segment::Tail { alpha, beta }, Map::TailNear) => {
                let x = beta + u * u;
                (x, 2.0 / (x - alpha).sqrt(), 2.0 * u)
            }
            (Segment::Tail { alpha, beta }, Map::TailFar(t0)) => {
                let t = t0 / (1.0 - u);
                let dt = t0 / ((1.0 - u) * (1.0 - u));
                let x = beta + t * t;
                (x, 2.0 / (x - alpha).sqrt() * dt, 2.0 * t * dt)
            }
            (Segment::Gap { alpha, beta }, Map::Gap) => {
                let (s, c) = u.sin_cos();
                let h = 1.0 + alpha;
                let x = -1.0 + h * s * s;
                (x, 2.0 * h.sqrt() * s / (beta - x).sqrt(), 2.0 * h * s * c)
            }
            _ => unreachable!("map does not belong to segment"),
        }
    }

    fn pieces(&self, x0: Option<f64>, subtract: bool, window: Option<f64>) -> Vec<Piece> {
        let geometric = |scale: f64, hi: f64| -> Vec<f64> {
            let mut v = Vec::new();
            let mut t = scale / 16.0;
            while t < hi {
                v.push(t);
                t *= 2.0;
            }
            v
        };
        match *self {
            Segment::Band { alpha, beta } => {
                let top = (1.0 - alpha).sqrt();
                let mut lb = geometric((1.0 + alpha).sqrt(), top);
                let mut rb = vec![0.25 * FRAC_PI_2, 0.5 * FRAC_PI_2, 0.75 * FRAC_PI_2];
                if let Some(x0) = x0 {
                    if x0 > alpha && x0 < 1.0 {
                        lb.push((x0 - alpha).sqrt());
                    } else if x0 > 1.0 && x0 < beta {
                        rb.push(((x0 - 1.0) / (beta - 1.0)).sqrt().asin());
                    }
                }
                vec![
                    Piece { map: Map::BandLeft, lo: 0.0, hi: top, breaks: lb, subtract },
                    Piece { map: Map::BandRight, lo: 0.0, hi: FRAC_PI_2, breaks: rb, subtract },
                ]
            }
            Segment::Tail { beta, .. } => {
                let scale = (beta - 1.0).sqrt();
                match window {
                    Some(tw) => {
                        let mut nb = geometric(scale, tw);
                        nb.push(tw / 2f64.sqrt());
                        vec![
                            Piece { map: Map::TailNear, lo: 0.0, hi: tw, breaks: nb, subtract: true },
                            Piece { map: Map::TailFar(tw), lo: 0.0, hi: 1.0, breaks: vec![0.5, 0.9], subtract: false },
                        ]
                    }
                    None => {
                        let t1 = 1.0f64.max(4.0 * scale);
                        let mut nb = geometric(scale, t1);
                        if let Some(x0) = x0 {
                            if x0 > beta {
                                let t = (x0 - beta).sqrt();
                                if t < t1 {
                                    nb.push(t);
                                }
                            }
                        }
                        let mut fb = vec![0.5, 0.9];
                        if let Some(x0) = x0 {
                            let t = (x0 - beta).max(0.0).sqrt();
                            if t > t1 {
                                fb.push(1.0 - t1 / t);
                            }
                        }
                        vec![
                            Piece { map: Map::TailNear, lo: 0.0, hi: t1, breaks: nb, subtract: false },
                            Piece { map: Map::TailFar(t1), lo: 0.0, hi: 1.0, breaks: fb, subtract: false },
                        ]
                    }
                }
            }
            Segment::Gap { alpha, .. } => {
                let mut gb = vec![0.25 * FRAC_PI_2, 0.5 * FRAC_PI_2, 0.75 * FRAC_PI_2];
                if let Some(x0) = x0 {
                    if x0 > -1.0 && x0 < alpha {
                        gb.push(((x0 + 1.0) / (1.0 + alpha)).sqrt().asin());
                    }
                }
                vec![Piece { map: Map::Gap, lo: 0.0, hi: FRAC_PI_2, breaks: gb, subtract }]
            }
        }
    }
}

/// A quadrature abscissa with `x - 1` carried separately, exact where the
/// map produces it directly (the band right of 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_one: f64,
}

/// `int f(x) K(x) w(x) dx` over the segment with weight w.
pub fn weighted_integral<F>(seg: Segment, f: F, kernel: Kernel, settings: QuadSettings) -> Weighted
where
    F: Fn(f64) -> Complex64,
{
    weighted_integral_at(seg, |a: Abscissa| f(a.x), kernel, settings)
}

/// As `weighted_integral`, with the integrand seeing the full abscissa.
pub fn weighted_integral_at<F>(seg: Segment, f: F, kernel: Kernel, settings: QuadSettings) -> Weighted
where
    F: Fn(Abscissa) -> Complex64,
{
    let (a, b) = seg.ends();
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut converged = true;

    // Subtraction of f(x0) w(x0) / (x - z) near a pole on the segment.
    let mut sub: Option<(Complex64, Complex64)> = None;
    let mut window = None;
    let mut x0_opt = None;
    if let Kernel::Cauchy(z) = kernel {
        let x0 = z.re;
        x0_opt = Some(x0);
        if x0 > a && x0 < b {
            let reach = match seg {
                Segment::Band { alpha, beta } => beta - alpha,
                Segment::Gap { alpha, .. } => alpha + 1.0,
                Segment::Tail { beta, .. } => x0 - beta,
            };
            if z.im.abs() < reach {
                let c = f(Abscissa { x: x0, from_one: x0 - 1.0 }) * seg.weight(x0);
                let hi = match seg {
                    Segment::Tail { beta, .. } => {
                        window = Some((2.0 * (x0 - beta)).sqrt());
                        2.0 * x0 - beta
                    }
                    _ => b,
                };
                total += c * ((hi - z).ln() - (a - z).ln());
                sub = Some((c, z));
            }
        }
    }

    for piece in seg.pieces(x0_opt, sub.is_some(), window) {
        let map = piece.map;
        let subtract = piece.subtract && sub.is_some();
        let integrand = |u: f64| -> Complex64 {
            let (at, wj, dxdu) = seg.eval(map, u);
            let x = at.x;
            if !(x.is_finite() && wj.is_finite()) || wj == 0.0 && dxdu == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            match kernel {
                Kernel::One => f(at) * wj,
                Kernel::X => f(at) * (wj * x),
                Kernel::Cauchy(z) => {
                    if subtract {
                        let (c, _) = sub.unwrap();
                        let d = x - z;
                        // Rounding in the numerator dominates once x meets the pole.
                        if d.norm() <= 1e-13 * z.re.abs().max(1.0) {
                            return Complex64::new(0.0, 0.0);
                        }
                        (f(at) * wj - c * dxdu) / d
                    } else {
                        f(at) * wj / (x - z)
                    }
                }
            }
        };
        let mut pts = vec![piece.lo];
        pts.extend(piece.breaks.iter().copied().filter(|&t| t > piece.lo && t < piece.hi));
        pts.push(piece.hi);
        let r = integrate(integrand, &pts, settings);
        total += r.value;
        error += r.error;
        converged &= r.converged;
    }
    Weighted { value: total, error, converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c1(_: f64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    const S: QuadSettings = QuadSettings { abs_tol: 1e-300, rel_tol: 1e-13, max_panels: 4000 };

    #[test]
    fn chebyshev_moments() {
        let seg = Segment::Band { alpha: -0.99, beta: 1.01 };
        let r = weighted_integral(seg, c1, Kernel::One, S);
        assert!((r.value.re - PI).abs() < 1e-12);
        let r = weighted_integral(seg, c1, Kernel::X, S);
        assert!((r.value.re - PI * 0.01).abs() < 1e-12);
    }

    #[test]
    fn band_cauchy_off_and_on() {
        let (alpha, beta) = (-0.99, 1.01);
        let seg = Segment::Band { alpha, beta };
        let rr = |z: Complex64| (z - alpha).sqrt() * (z - beta).sqrt();
        for z in [Complex64::new(3.0, 1.0), Complex64::new(0.2, 1e-3), Complex64::new(0.2, 1e-150), Complex64::new(1.005, -1e-150)] {
            let r = weighted_integral(seg, c1, Kernel::Cauchy(z), S);
            let exact = -PI / rr(z);
            assert!((r.value - exact).norm() < 1e-10 * exact.norm(), "{z} {} {exact}", r.value);
        }
    }

    #[test]
    fn tail_cauchy() {
        // int_beta^inf dx / (sqrt((x-a)(x-b)) (x-z)) has closed form via R(z).
        let (alpha, beta) = (-0.99, 1.01);
        let seg = Segment::Tail { alpha, beta };
        let f = |x: f64| Complex64::new(1.0 / (x * x), 0.0);
        let z = Complex64::new(2.0, 1e-150);
        let zu = Complex64::new(2.0, 1e-6);
        let a = weighted_integral(seg, f, Kernel::Cauchy(z), S).value;
        let b = weighted_integral(seg, f, Kernel::Cauchy(zu), S).value;
        assert!((a - b).norm() < 1e-5 * a.norm(), "{a} {b}");
        let zl = Complex64::new(2.0, -1e-150);
        let d = weighted_integral(seg, f, Kernel::Cauchy(zl), S).value;
        let jump = a - d;
        let expect = Complex64::new(0.0, 2.0 * PI) * f(2.0) * seg.weight(2.0);
        assert!((jump - expect).norm() < 1e-12, "{jump} {expect}");
    }

    #[test]
    fn gap_moment() {
        // int_{-1}^{alpha} dx / sqrt((alpha-x)(beta-x))
        let (alpha, beta) = (-0.9, 1.1);
        let seg = Segment::Gap { alpha, beta };
        let r = weighted_integral(seg, c1, Kernel::One, S).value.re;
        let exact = 2.0 * (((beta + 1.0).sqrt() + (alpha + 1.0).sqrt()) / (beta - alpha).sqrt()).ln();
        assert!((r - exact).abs() < 1e-12, "{r} {exact}");
    }
}
