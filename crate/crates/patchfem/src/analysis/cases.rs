//! The benchmark cases: a smooth manufactured solution on the unit square,
//! the singular corner flow on the L-shaped domain, the lid-driven cavity
//! data, and low-degree polynomial solutions for patch tests.

use super::{ManufacturedSolution, StokesData};
use nalgebra::{Matrix2, Point2, Vector2};
use std::f64::consts::PI;

/// Interior angle of the L-shaped domain at the re-entrant corner.
const OMEGA: f64 = 1.5 * PI;

/// Smooth solenoidal benchmark on the unit square:
/// u = (sin 2πx cos 2πy, −cos 2πx sin 2πy), p = x² + y².
pub fn smooth_solution() -> ManufacturedSolution {
    ManufacturedSolution {
        u: Box::new(smooth_u),
        grad_u: Box::new(|x| {
            let (sx, cx) = (2.0 * PI * x.x).sin_cos();
            let (sy, cy) = (2.0 * PI * x.y).sin_cos();
            let w = 2.0 * PI;
            Matrix2::new(w * cx * cy, -w * sx * sy, w * sx * sy, -w * cx * cy)
        }),
        p: Box::new(|x| x.x * x.x + x.y * x.y),
        f: Box::new(|x| {
            let w = 8.0 * PI * PI;
            Vector2::new(
                w * (2.0 * PI * x.x).sin() * (2.0 * PI * x.y).cos() + 2.0 * x.x,
                -w * (2.0 * PI * x.x).cos() * (2.0 * PI * x.y).sin() + 2.0 * x.y,
            )
        }),
        g: Box::new(smooth_u),
    }
}

fn smooth_u(x: Point2<f64>) -> Vector2<f64> {
    Vector2::new(
        (2.0 * PI * x.x).sin() * (2.0 * PI * x.y).cos(),
        -(2.0 * PI * x.x).cos() * (2.0 * PI * x.y).sin(),
    )
}

/// Smallest positive root of sin(λω) + λ sin ω = 0 with ω = 3π/2, located by
/// bisection on (0.1, 0.9) to an interval width of 1e-12.
pub fn solve_lambda() -> f64 {
    let f = |l: f64| (l * OMEGA).sin() + l * OMEGA.sin();
    let (mut a, mut b) = (0.1, 0.9);
    debug_assert!(f(a) * f(b) < 0.0, "bisection bracket must straddle the root");
    while b - a > 1e-12 {
        let mid = 0.5 * (a + b);
        if f(a) * f(mid) <= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// The singular corner flow on the L-shaped domain
/// [−1,1]² \ [0,1)×(−1,0]: u = curl(r^{1+λ} ψ(θ)), a homogeneous Stokes
/// solution (f = 0) with no-slip on both edges meeting at the re-entrant
/// corner. u ∈ H^{1+λ−ε} only, so convergence rates are regularity-limited.
///
/// The associated pressure p = −r^{λ−1}[(1+λ)²ψ′(θ) + ψ‴(θ)]/(1−λ) is
/// supplied for completeness; velocity errors are the primary report on this
/// case. The pressure and the velocity gradient blow up at the corner; both
/// are finite at every interior quadrature point.
pub fn lshape_solution() -> ManufacturedSolution {
    let flow = CornerFlow::new();
    ManufacturedSolution {
        u: Box::new(move |x| flow.velocity(x)),
        grad_u: Box::new(move |x| flow.gradient(x)),
        p: Box::new(move |x| flow.pressure(x)),
        f: Box::new(|_| Vector2::zeros()),
        g: Box::new(move |x| flow.velocity(x)),
    }
}

/// Lid-driven cavity data on the unit square: g = (1,0) on the open lid
/// {0 < x < 1, y = 1}, zero elsewhere, f = 0. g is tangential, so the
/// compatibility integral ∫_∂Ω g·n vanishes exactly. The lid value at the
/// two corners is immaterial: Gauss points never land on them ("leaky lid by
/// quadrature").
pub fn cavity_case() -> StokesData {
    StokesData {
        f: Box::new(|_| Vector2::zeros()),
        g: Box::new(|x| {
            if (x.y - 1.0).abs() <= 1e-12 && x.x > 0.0 && x.x < 1.0 {
                Vector2::new(1.0, 0.0)
            } else {
                Vector2::zeros()
            }
        }),
    }
}

/// Polynomial Stokes solutions that the discrete spaces contain exactly,
/// keyed by the space pair they exercise (the patch-test cases). Supported
/// pairs: (1,0) with u = (y, x), p = 0; (2,1) with u = (y², x²),
/// p = x − 1/2; (2,2) with u = (y², x²), p = x² + y².
pub fn polynomial_case(k: usize, k_p: usize) -> Option<ManufacturedSolution> {
    match (k, k_p) {
        (1, 0) => Some(ManufacturedSolution {
            u: Box::new(|x| Vector2::new(x.y, x.x)),
            grad_u: Box::new(|_| Matrix2::new(0.0, 1.0, 1.0, 0.0)),
            p: Box::new(|_| 0.0),
            f: Box::new(|_| Vector2::zeros()),
            g: Box::new(|x| Vector2::new(x.y, x.x)),
        }),
        (2, 1) => Some(ManufacturedSolution {
            u: Box::new(|x| Vector2::new(x.y * x.y, x.x * x.x)),
            grad_u: Box::new(|x| Matrix2::new(0.0, 2.0 * x.y, 2.0 * x.x, 0.0)),
            p: Box::new(|x| x.x - 0.5),
            f: Box::new(|_| Vector2::new(-1.0, -2.0)),
            g: Box::new(|x| Vector2::new(x.y * x.y, x.x * x.x)),
        }),
        (2, 2) => Some(ManufacturedSolution {
            u: Box::new(|x| Vector2::new(x.y * x.y, x.x * x.x)),
            grad_u: Box::new(|x| Matrix2::new(0.0, 2.0 * x.y, 2.0 * x.x, 0.0)),
            p: Box::new(|x| x.x * x.x + x.y * x.y),
            f: Box::new(|x| Vector2::new(-2.0 + 2.0 * x.x, -2.0 + 2.0 * x.y)),
            g: Box::new(|x| Vector2::new(x.y * x.y, x.x * x.x)),
        }),
        _ => None,
    }
}

/// The corner-flow fields in closed form. The stream function is
/// φ = r^{1+λ} ψ(θ) with θ measured from the edge {x > 0, y = 0} into the
/// domain, so θ ∈ [0, 3π/2]; u = (∂φ/∂y, −∂φ/∂x) is solenoidal by
/// construction, and the Cartesian derivatives follow from the polar chain
/// rule.
#[derive(Debug, Clone, Copy)]
struct CornerFlow {
    lam: f64,
    /// cos(λω), the constant weighting the sin terms of ψ.
    clam: f64,
}

impl CornerFlow {
    fn new() -> Self {
        let lam = solve_lambda();
        Self { lam, clam: (lam * OMEGA).cos() }
    }

    /// ψ(θ) = sin((1+λ)θ)cos(λω)/(1+λ) − cos((1+λ)θ)
    ///      − sin((1−λ)θ)cos(λω)/(1−λ) + cos((1−λ)θ).
    fn psi(&self, t: f64) -> f64 {
        let (l, c) = (self.lam, self.clam);
        ((1.0 + l) * t).sin() * c / (1.0 + l) - ((1.0 + l) * t).cos()
            - ((1.0 - l) * t).sin() * c / (1.0 - l)
            + ((1.0 - l) * t).cos()
    }

    fn psi1(&self, t: f64) -> f64 {
        let (l, c) = (self.lam, self.clam);
        ((1.0 + l) * t).cos() * c + (1.0 + l) * ((1.0 + l) * t).sin()
            - ((1.0 - l) * t).cos() * c
            - (1.0 - l) * ((1.0 - l) * t).sin()
    }

    fn psi2(&self, t: f64) -> f64 {
        let (l, c) = (self.lam, self.clam);
        -(1.0 + l) * ((1.0 + l) * t).sin() * c + (1.0 + l) * (1.0 + l) * ((1.0 + l) * t).cos()
            + (1.0 - l) * ((1.0 - l) * t).sin() * c
            - (1.0 - l) * (1.0 - l) * ((1.0 - l) * t).cos()
    }

    fn psi3(&self, t: f64) -> f64 {
        let (l, c) = (self.lam, self.clam);
        let (lp, lm) = (1.0 + l, 1.0 - l);
        -lp * lp * (lp * t).cos() * c - lp * lp * lp * (lp * t).sin()
            + lm * lm * (lm * t).cos() * c
            + lm * lm * lm * (lm * t).sin()
    }

    /// Polar coordinates with θ ∈ [0, 2π); the L-shape occupies [0, 3π/2].
    fn polar(x: Point2<f64>) -> (f64, f64) {
        let r = x.coords.norm();
        let mut t = x.y.atan2(x.x);
        if t < 0.0 {
            t += 2.0 * PI;
        }
        (r, t)
    }

    fn velocity(&self, x: Point2<f64>) -> Vector2<f64> {
        let (r, t) = Self::polar(x);
        let (s, c) = t.sin_cos();
        let l = self.lam;
        let (p0, p1) = (self.psi(t), self.psi1(t));
        r.powf(l) * Vector2::new((1.0 + l) * s * p0 + c * p1, s * p1 - (1.0 + l) * c * p0)
    }

    /// ∇u = [[φ_xy, φ_yy], [−φ_xx, −φ_xy]] via the polar second derivatives
    /// of φ = r^{1+λ}ψ(θ).
    fn gradient(&self, x: Point2<f64>) -> Matrix2<f64> {
        let (r, t) = Self::polar(x);
        let (s, c) = t.sin_cos();
        let l = self.lam;
        let (p0, p1, p2) = (self.psi(t), self.psi1(t), self.psi2(t));
        let w = r.powf(l - 1.0);
        let pxx = w * ((1.0 + l) * (l * c * c + s * s) * p0 - 2.0 * s * c * l * p1 + s * s * p2);
        let pyy = w * ((1.0 + l) * (l * s * s + c * c) * p0 + 2.0 * s * c * l * p1 + c * c * p2);
        let pxy =
            w * (s * c * (1.0 + l) * (l - 1.0) * p0 + (c * c - s * s) * l * p1 - s * c * p2);
        Matrix2::new(pxy, pyy, -pxx, -pxy)
    }

    fn pressure(&self, x: Point2<f64>) -> f64 {
        let (r, t) = Self::polar(x);
        let l = self.lam;
        -r.powf(l - 1.0) * ((1.0 + l) * (1.0 + l) * self.psi1(t) + self.psi3(t)) / (1.0 - l)
    }
}
