//! Closed-form test functions: finite mixtures of Gaussian wave packets.
//!
//! The class is closed under every operation the evaluators apply — Fourier
//! transform, linear substitution, modulation, translation, pointwise product
//! and restriction to a horizontal line — so the only numerical error in the
//! trilinear-form computations is quadrature error, never representation
//! error.
//!
//! Conventions: an atom is `amp * exp(-pi (x-c)^T S (x-c)) * exp(2 pi i b.x)`
//! and the Fourier transform is `INT f(x) exp(-2 pi i xi.x) dx` (no
//! prefactor, `2 pi` in the exponent).

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot2, norm2, Mat2, Mat3, Sym2, Vec2};
use crate::quadrature::{self, QuadratureSpec, RealResult};

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

fn cis(phase: f64) -> Complex64 {
    let (s, c) = phase.sin_cos();
    Complex64::new(c, s)
}

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

/// One-dimensional Gaussian wave packet
/// `amp * exp(-pi * scale * (x-center)^2) * exp(2 pi i modulation x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAtom1 {
    pub amp: Complex64,
    pub center: f64,
    pub modulation: f64,
    pub scale: f64,
}

impl GaussianAtom1 {
    pub fn new(amp: Complex64, center: f64, modulation: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { amp, center, modulation, scale })
    }

    pub fn standard() -> Self {
        Self { amp: Complex64::new(1.0, 0.0), center: 0.0, modulation: 0.0, scale: 1.0 }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let u = x - self.center;
        let g = (-PI * self.scale * u * u).exp();
        if self.modulation == 0.0 {
            self.amp * g
        } else {
            self.amp * g * cis(TAU * self.modulation * x)
        }
    }

    pub fn fourier(&self) -> Self {
        Self {
            amp: self.amp * self.scale.powf(-0.5) * cis(TAU * self.modulation * self.center),
            center: self.modulation,
            modulation: -self.center,
            scale: 1.0 / self.scale,
        }
    }

    /// Exact integral over the line: the Fourier transform at 0.
    pub fn integral(&self) -> Complex64 {
        self.amp
            * self.scale.powf(-0.5)
            * (-PI * self.modulation * self.modulation / self.scale).exp()
            * cis(TAU * self.modulation * self.center)
    }

    /// `x -> atom(a x)`, exact.
    pub fn compose_scale(&self, a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::SingularMatrix);
        }
        Ok(Self {
            amp: self.amp,
            center: self.center / a,
            modulation: self.modulation * a,
            scale: self.scale * a * a,
        })
    }

    pub fn translate(&self, t: f64) -> Self {
        Self {
            amp: self.amp * cis(-TAU * self.modulation * t),
            center: self.center + t,
            modulation: self.modulation,
            scale: self.scale,
        }
    }

    /// Pointwise product of two atoms, again an atom.
    pub fn product(&self, o: &Self) -> Self {
        let s = self.scale + o.scale;
        let m = (self.scale * self.center + o.scale * o.center) / s;
        let cst = self.scale * self.center * self.center + o.scale * o.center * o.center
            - s * m * m;
        Self {
            amp: self.amp * o.amp * (-PI * cst).exp(),
            center: m,
            modulation: self.modulation + o.modulation,
            scale: s,
        }
    }
}

/// Two-dimensional Gaussian wave packet
/// `amp * exp(-pi (x-c)^T S (x-c)) * exp(2 pi i b.x)` with `S` SPD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAtom2 {
    pub amp: Complex64,
    pub center: Vec2,
    pub modulation: Vec2,
    pub shape: Sym2,
}

impl GaussianAtom2 {
    pub fn new(amp: Complex64, center: Vec2, modulation: Vec2, shape: Sym2) -> Result<Self> {
        if !shape.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { amp, center, modulation, shape })
    }

    pub fn standard() -> Self {
        Self {
            amp: Complex64::new(1.0, 0.0),
            center: [0.0, 0.0],
            modulation: [0.0, 0.0],
            shape: Sym2::identity(),
        }
    }

    /// Real unit-amplitude unmodulated atom with identity shape at `center`.
    pub fn real_at(center: Vec2) -> Self {
        Self { center, ..Self::standard() }
    }

    pub fn eval(&self, x: Vec2) -> Complex64 {
        let u = [x[0] - self.center[0], x[1] - self.center[1]];
        let g = (-PI * self.shape.quad_form(u)).exp();
        if self.modulation == [0.0, 0.0] {
            self.amp * g
        } else {
            self.amp * g * cis(TAU * dot2(self.modulation, x))
        }
    }

    pub fn fourier(&self) -> Self {
        let det = self.shape.det();
        Self {
            amp: self.amp * det.powf(-0.5) * cis(TAU * dot2(self.modulation, self.center)),
            center: self.modulation,
            modulation: [-self.center[0], -self.center[1]],
            shape: self.shape.inverse().expect("SPD shape is invertible"),
        }
    }

    /// Exact integral over the plane: the Fourier transform at 0.
    pub fn integral(&self) -> Complex64 {
        let inv = self.shape.inverse().expect("SPD shape is invertible");
        self.amp
            * self.shape.det().powf(-0.5)
            * (-PI * inv.quad_form(self.modulation)).exp()
            * cis(TAU * dot2(self.modulation, self.center))
    }

    /// Restriction `x1 -> atom(x1, x2)`, a 1-D atom (complex amplitude
    /// absorbs the cross terms of a non-diagonal shape).
    pub fn fiber(&self, x2: f64) -> GaussianAtom1 {
        let s11 = self.shape.a;
        let s12 = self.shape.b;
        let s22 = self.shape.d;
        let v = x2 - self.center[1];
        let transverse = (s22 - s12 * s12 / s11) * v * v;
        let mut amp = self.amp * (-PI * transverse).exp();
        if self.modulation[1] != 0.0 {
            amp *= cis(TAU * self.modulation[1] * x2);
        }
        GaussianAtom1 {
            amp,
            center: self.center[0] - (s12 / s11) * v,
            modulation: self.modulation[0],
            scale: s11,
        }
    }

    /// `x -> atom(A x)`, exact closed form.
    pub fn compose_linear(&self, a: &Mat2) -> Result<Self> {
        let inv = a.inverse().ok_or(Error::SingularMatrix)?;
        Ok(Self {
            amp: self.amp,
            center: inv.mul_vec(self.center),
            modulation: a.transpose().mul_vec(self.modulation),
            shape: self.shape.congruence(a),
        })
    }

    pub fn translate(&self, t: Vec2) -> Self {
        Self {
            amp: self.amp * cis(-TAU * dot2(self.modulation, t)),
            center: [self.center[0] + t[0], self.center[1] + t[1]],
            modulation: self.modulation,
            shape: self.shape,
        }
    }

    pub fn product(&self, o: &Self) -> Self {
        let s = self.shape.add(&o.shape);
        let rhs = [
            self.shape.mul_vec(self.center)[0] + o.shape.mul_vec(o.center)[0],
            self.shape.mul_vec(self.center)[1] + o.shape.mul_vec(o.center)[1],
        ];
        let m = s.inverse().expect("sum of SPD is SPD").mul_vec(rhs);
        let cst = self.shape.quad_form(self.center) + o.shape.quad_form(o.center)
            - s.quad_form(m);
        Self {
            amp: self.amp * o.amp * (-PI * cst).exp(),
            center: m,
            modulation: [
                self.modulation[0] + o.modulation[0],
                self.modulation[1] + o.modulation[1],
            ],
            shape: s,
        }
    }
}

// ---------------------------------------------------------------------------
// Mixtures
// ---------------------------------------------------------------------------

/// Finite Gaussian mixture on the line. An empty list is the zero function.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SchwartzMix1 {
    pub atoms: Vec<GaussianAtom1>,
}

/// Finite Gaussian mixture on the plane. An empty list is the zero function.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SchwartzMix2 {
    pub atoms: Vec<GaussianAtom2>,
}

impl SchwartzMix1 {
    pub fn new(atoms: Vec<GaussianAtom1>) -> Self {
        Self { atoms }
    }

    pub fn single(atom: GaussianAtom1) -> Self {
        Self { atoms: vec![atom] }
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.atoms.iter().map(|a| a.eval(x)).sum()
    }

    pub fn fourier(&self) -> Self {
        Self::new(self.atoms.iter().map(GaussianAtom1::fourier).collect())
    }

    pub fn integral(&self) -> Complex64 {
        self.atoms.iter().map(GaussianAtom1::integral).sum()
    }

    pub fn compose_scale(&self, a: f64) -> Result<Self> {
        Ok(Self::new(
            self.atoms
                .iter()
                .map(|t| t.compose_scale(a))
                .collect::<Result<_>>()?,
        ))
    }

    pub fn translate(&self, t: f64) -> Self {
        Self::new(self.atoms.iter().map(|a| a.translate(t)).collect())
    }

    pub fn scalar_mul(&self, z: Complex64) -> Self {
        Self::new(
            self.atoms
                .iter()
                .map(|a| GaussianAtom1 { amp: a.amp * z, ..*a })
                .collect(),
        )
    }

    pub fn modulate(&self, b: f64) -> Self {
        Self::new(
            self.atoms
                .iter()
                .map(|a| GaussianAtom1 { modulation: a.modulation + b, ..*a })
                .collect(),
        )
    }

    /// Pointwise product of mixtures (atom count multiplies).
    pub fn product(&self, o: &Self) -> Self {
        let mut atoms = Vec::with_capacity(self.atoms.len() * o.atoms.len());
        for a in &self.atoms {
            for b in &o.atoms {
                atoms.push(a.product(b));
            }
        }
        Self::new(atoms)
    }

    pub fn envelope(&self) -> DecayEnvelope {
        let mut amplitude = 0.0;
        let mut rate = f64::INFINITY;
        let mut center_radius: f64 = 0.0;
        for a in &self.atoms {
            amplitude += a.amp.norm();
            rate = rate.min(a.scale);
            center_radius = center_radius.max(a.center.abs());
        }
        if self.atoms.is_empty() {
            return DecayEnvelope::zero();
        }
        DecayEnvelope { amplitude, center_radius, rate, poly_degree: 0 }
    }

    pub fn lp_norm(&self, p: f64, quad: &QuadratureSpec) -> Result<RealResult> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidExponents(format!("p = {p} outside [1, oo)")));
        }
        if self.is_zero() {
            return Ok(RealResult::exact(0.0));
        }
        let env = self.envelope();
        let radius = env.radius_for((quad.abs_tol * 0.1).powf(p).min(1e-14), 1);
        let res = quadrature::adaptive_nd(
            &|x: &[f64]| Complex64::new(self.eval(x[0]).norm().powf(p), 0.0),
            &[(-radius, radius)],
            quad,
        );
        Ok(RealResult::from_power_integral(res, p))
    }
}

impl SchwartzMix2 {
    pub fn new(atoms: Vec<GaussianAtom2>) -> Self {
        Self { atoms }
    }

    pub fn single(atom: GaussianAtom2) -> Self {
        Self { atoms: vec![atom] }
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn eval(&self, x: Vec2) -> Complex64 {
        self.atoms.iter().map(|a| a.eval(x)).sum()
    }

    pub fn fourier(&self) -> Self {
        Self::new(self.atoms.iter().map(GaussianAtom2::fourier).collect())
    }

    pub fn integral(&self) -> Complex64 {
        self.atoms.iter().map(GaussianAtom2::integral).sum()
    }

    /// Reflection `x -> f(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.atoms
                .iter()
                .map(|a| GaussianAtom2 {
                    amp: a.amp,
                    center: [-a.center[0], -a.center[1]],
                    modulation: [-a.modulation[0], -a.modulation[1]],
                    shape: a.shape,
                })
                .collect(),
        )
    }

    /// Restriction to the horizontal line at height `x2`.
    pub fn fiber(&self, x2: f64) -> SchwartzMix1 {
        SchwartzMix1::new(self.atoms.iter().map(|a| a.fiber(x2)).collect())
    }

    /// The dilation action `(D_A f)(x) = sgn(det A) |det A|^{-1/3} f(A^{-1} x)`.
    pub fn dilate(&self, a: &Mat2) -> Result<Self> {
        let det = a.det();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularMatrix);
        }
        let inv = a.inverse().ok_or(Error::SingularMatrix)?;
        let factor = det.signum() * det.abs().powf(-1.0 / 3.0);
        let atoms = self
            .atoms
            .iter()
            .map(|t| {
                t.compose_linear(&inv).map(|u| GaussianAtom2 { amp: u.amp * factor, ..u })
            })
            .collect::<Result<_>>()?;
        Ok(Self::new(atoms))
    }

    /// The modulation action `(M_b f)(x) = exp(2 pi i b.x) f(x)`.
    pub fn modulate(&self, b: Vec2) -> Self {
        Self::new(
            self.atoms
                .iter()
                .map(|a| GaussianAtom2 {
                    modulation: [a.modulation[0] + b[0], a.modulation[1] + b[1]],
                    ..*a
                })
                .collect(),
        )
    }

    pub fn translate(&self, t: Vec2) -> Self {
        Self::new(self.atoms.iter().map(|a| a.translate(t)).collect())
    }

    pub fn scalar_mul(&self, z: Complex64) -> Self {
        Self::new(
            self.atoms
                .iter()
                .map(|a| GaussianAtom2 { amp: a.amp * z, ..*a })
                .collect(),
        )
    }

    pub fn envelope(&self) -> DecayEnvelope {
        let mut amplitude = 0.0;
        let mut rate = f64::INFINITY;
        let mut center_radius: f64 = 0.0;
        for a in &self.atoms {
            amplitude += a.amp.norm();
            rate = rate.min(a.shape.min_eigenvalue());
            center_radius = center_radius.max(norm2(a.center));
        }
        if self.atoms.is_empty() {
            return DecayEnvelope::zero();
        }
        DecayEnvelope { amplitude, center_radius, rate, poly_degree: 0 }
    }

    pub fn lp_norm(&self, p: f64, quad: &QuadratureSpec) -> Result<RealResult> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidExponents(format!("p = {p} outside [1, oo)")));
        }
        if self.is_zero() {
            return Ok(RealResult::exact(0.0));
        }
        let env = self.envelope();
        let radius = env.radius_for((quad.abs_tol * 0.1).powf(p).min(1e-14), 2);
        let res = quadrature::adaptive_nd(
            &|x: &[f64]| Complex64::new(self.eval([x[0], x[1]]).norm().powf(p), 0.0),
            &[(-radius, radius), (-radius, radius)],
            quad,
        );
        Ok(RealResult::from_power_integral(res, p))
    }

    /// Sup-norm lower bound by adaptive grid refinement: a coarse grid over
    /// the envelope box, then local refinement around the best cell until the
    /// improvement per round drops below `rel_tol` times the running value.
    pub fn sup_norm(&self, quad: &QuadratureSpec) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let radius = self.envelope().radius_for(1e-12, 2);
        let n = 64;
        let mut best = 0.0f64;
        let mut best_pt = [0.0, 0.0];
        let step = 2.0 * radius / n as f64;
        for i in 0..=n {
            for j in 0..=n {
                let pt = [-radius + i as f64 * step, -radius + j as f64 * step];
                let v = self.eval(pt).norm();
                if v > best {
                    best = v;
                    best_pt = pt;
                }
            }
        }
        let mut h = step;
        while h > 1e-9 * radius.max(1.0) {
            let mut improved = false;
            for i in -2iच32..=2 {
                for j in -2i32..=2 {
                    let pt = [best_pt[0] + i as f64 * h / 2.0, best_pt[1] + j as f64 * h / 2.0];
                    let v = self.eval(pt).norm();
                    if v > best {
                        best = v;
                        best_pt = pt;
                        improved = true;
                    }
                }
            }
            if !improved {
                h *= 0.5;
            }
            if h * best < quad.rel_tol * best {
                break;
            }
        }
        best
    }

    /// Iterated norm: inner `L^{p1}` in `x1` along each fiber, outer `L^{p2}`
    /// in `x2`.
    pub fn mixed_norm(&self, p1: f64, p2: f64, quad: &QuadratureSpec) -> Result<RealResult> {
        if !(p1 >= 1.0 && p1.is_finite() && p2 >= 1.0 && p2.is_finite()) {
            return Err(Error::InvalidExponents(format!(
                "(p1, p2) = ({p1}, {p2}) outside [1, oo)^2"
            )));
        }
        if self.is_zero() {
            return Ok(RealResult::exact(0.0));
        }
        let env = self.envelope();
        let radius = env.radius_for((quad.abs_tol * 0.1).min(1e-12), 2);
        let inner_quad = QuadratureSpec {
            rel_tol: quad.rel_tol * 0.2,
            abs_tol: quad.abs_tol * 0.2,
            ..quad.clone()
        };
        let res = quadrature::adaptive_nd_estimates(
            &|x2: &[f64]| {
                let fiber = self.fiber(x2[0]);
                let inner = fiber
                    .lp_norm(p1, &inner_quad)
                    .expect("validated exponent");
                quadrature::Estimate {
                    value: Complex64::new(inner.value.powf(p2), 0.0),
                    // d/dv v^{p2} propagation of the inner norm error
                    err: p2 * inner.value.powf(p2 - 1.0) * inner.error_estimate,
                }
            },
            &[(-radius, radius)],
            quad,
        );
        Ok(RealResult::from_power_integral(res, p2))
    }
}

// ---------------------------------------------------------------------------
// Decay envelopes and truncation radii
// ---------------------------------------------------------------------------

/// A pointwise bound `|f(x)| <= amplitude * (1+|x|)^poly_degree
/// * exp(-pi * rate * max(0, |x| - center_radius)^2)`.
///
/// `rate = 0` with negative `poly_degree` declares pure polynomial decay
/// (projectively transformed spectra).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEnvelope {
    pub amplitude: f64,
    pub center_radius: f64,
    pub rate: f64,
    pub poly_degree: i32,
}

impl DecayEnvelope {
    pub fn zero() -> Self {
        Self { amplitude: 0.0, center_radius: 0.0, rate: 1.0, poly_degree: 0 }
    }

    pub fn bound(&self, r: f64) -> f64 {
        let u = (r - self.center_radius).max(0.0);
        let poly = (1.0 + r).powi(self.poly_degree);
        self.amplitude * poly * (-PI * self.rate * u * u).exp()
    }

    /// Crude tail mass estimate of the bound outside radius `r` in `dim`
    /// ambient dimensions.
    pub fn tail(&self, r: f64, dim: u32) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let surf = match dim {
            1 => 2.0,
            2 => TAU,
            3 => 2.0 * TAU,
            _ => TAU * TAU, // dim 4
        };
        if self.rate > 0.0 {
            // shell at r times an effective width of the Gaussian tail
            let width = 1.0 / (self.rate.sqrt()) + 1.0;
            surf * (r + width).powi(dim as i32 - 1) * self.bound(r) * width
        } else {
            // polynomial decay; requires poly_degree < -dim to be integrable
            let k = -(self.poly_degree + dim as i32);
            if k <= 0 {
                return f64::INFINITY;
            }
            surf * self.amplitude * (1.0 + r).powi(-k) / k as f64 * (1.0 + r).powi(0)
                * (1.0 + r)
        }
    }

    /// Smallest radius (by doubling search) whose tail estimate is below
    /// `tol`.
    pub fn radius_for(&self, tol: f64, dim: u32) -> f64 {
        if self.amplitude == 0.0 {
            return 1.0;
        }
        let mut r = self.center_radius + 1.0;
        for _ in 0..200 {
            if self.tail(r, dim) <= tol {
                return r;
            }
            r *= 1.25;
        }
        r
    }

    /// Envelope of a product of functions of *independent* groups of
    /// variables, viewed radially in the joint space: at joint radius `r`
    /// some coordinate block has norm at least `r / sqrt(3)`.
    pub fn triple_product(a: &Self, b: &Self, c: &Self) -> Self {
        let amplitude = a.amplitude * b.amplitude * c.amplitude;
        let rate = a.rate.min(b.rate).min(c.rate) / 3.0;
        let center_radius =
            3f64.sqrt() * a.center_radius.max(b.center_radius).max(c.center_radius);
        Self { amplitude, center_radius, rate, poly_degree: 0 }
    }
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

type SpectrumFn = dyn Fn(Vec2) -> Result<Complex64> + Send + Sync;

/// A point-evaluable function on the frequency plane with a declared decay
/// envelope: either the exact transform of a Gaussian mixture or a wrapped
/// generic callable (used by the projective action).
#[derive(Clone)]
pub enum SpectrumFunction {
    Closed(SchwartzMix2),
    Generic { eval: Arc<SpectrumFn>, envelope: DecayEnvelope },
}

impl std::fmt::Debug for SpectrumFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Closed(m) => write!(f, "SpectrumFunction::Closed({} atoms)", m.atoms.len()),
            Self::Generic { envelope, .. } => {
                write!(f, "SpectrumFunction::Generic(envelope: {envelope:?})")
            }
        }
    }
}

impl SpectrumFunction {
    /// Spectrum of a space-side mixture (its exact Fourier transform).
    pub fn from_space_side(mix: &SchwartzMix2) -> Self {
        Self::Closed(mix.fourier())
    }

    pub fn closed(spectrum_mix: SchwartzMix2) -> Self {
        Self::Closed(spectrum_mix)
    }

    pub fn generic(
        eval: impl Fn(Vec2) -> Result<Complex64> + Send + Sync + 'static,
        envelope: DecayEnvelope,
    ) -> Self {
        Self::Generic { eval: Arc::new(eval), envelope }
    }

    pub fn eval(&self, xi: Vec2) -> Result<Complex64> {
        match self {
            Self::Closed(m) => Ok(m.eval(xi)),
            Self::Generic { eval, .. } => eval(xi),
        }
    }

    /// Quadrature-facing evaluation: singular points (a measure-zero set for
    /// the admissible transforms) contribute zero.
    pub fn eval_or_zero(&self, xi: Vec2) -> Complex64 {
        match self {
            Self::Closed(m) => m.eval(xi),
            Self::Generic { eval, .. } => eval(xi).unwrap_or(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn envelope(&self) -> DecayEnvelope {
        match self {
            Self::Closed(m) => m.envelope(),
            Self::Generic { envelope, .. } => *envelope,
        }
    }

    /// Translation on the frequency side, `xi -> F(xi - rho)`.
    pub fn translate(&self, rho: Vec2) -> Self {
        match self {
            Self::Closed(m) => Self::Closed(SchwartzMix2::new(
                m.atoms
                    .iter()
                    .map(|a| GaussianAtom2 {
                        amp: a.amp * cis(-TAU * dot2(a.modulation, rho)),
                        center: [a.center[0] + rho[0], a.center[1] + rho[1]],
                        ..*a
                    })
                    .collect(),
            )),
            Self::Generic { eval, envelope } => {
                let inner = eval.clone();
                let env = DecayEnvelope {
                    center_radius: envelope.center_radius + norm2(rho),
                    ..*envelope
                };
                Self::Generic {
                    eval: Arc::new(move |xi: Vec2| inner([xi[0] - rho[0], xi[1] - rho[1]])),
                    envelope: env,
                }
            }
        }
    }

    /// Spot-check the declared envelope on a seeded sample of points.
    pub fn validate_envelope(&self, seed: u64, samples: usize) -> bool {
        use rand::{Rng, SeedableRng};
        let env = self.envelope();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let r = rng.gen_range(0.0..3.0 * (env.center_radius + 3.0));
            let a = rng.gen_range(0.0..TAU);
            let xi = [r * a.cos(), r * a.sin()];
            if let Ok(v) = self.eval(xi) {
                if v.norm() > env.bound(norm2(xi)) * (1.0 + 1e-9) + 1e-300 {
                    return false;
                }
            }
        }
        true
    }
}

/// The induced action of `M` in GL3 on a spectrum, through the identification
/// of the plane with a chart of the projective plane:
/// `xi~ = M (1, xi)^t`, `breve(xi) = (xi~_1 / xi~_0, xi~_2 / xi~_0)` and
///
/// ```text
/// F_M(xi) = sgn(det M) |det M|^{-1/3} |det(d breve(xi)/d xi)| xi~_0 F(breve(xi)),
/// ```
///
/// with `det(d breve(xi)/d xi) = det M / xi~_0^3`. Evaluation on the line
/// `xi~_0 = 0` (the image of the line at infinity) is a singular-point error.
pub fn projective_spectrum(spec: &SpectrumFunction, m: &Mat3) -> Result<SpectrumFunction> {
    let det = m.det();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::SingularMatrix);
    }

    let prefactor = det.signum() * det.abs().powf(2.0 / 3.0);
    let mm = *m;
    let inner = spec.clone();
    let eval = move |xi: Vec2| -> Result<Complex64> {
        let lifted = mm.mul_vec([1.0, xi[0], xi[1]]);
        let t0 = lifted[0];
        if t0 == 0.0 {
            return Err(Error::ProjectiveSingularPoint);
        }
        let breve = [lifted[1] / t0, lifted[2] / t0];
        // |det M| / |t0|^3 * t0 = |det M| * sgn(t0) / t0^2, |det M| absorbed
        // into the prefactor above.
        let jac_signed = t0.signum() / (t0 * t0);
        Ok(prefactor * jac_signed * inner.eval_or_zero(breve))
    };

    // Envelope. The block-diagonal case stays Gaussian; the general case is
    // bounded empirically with polynomial decay of degree -2.
    let env = spec.envelope();
    let is_block_diag = m.m[0][1] == 0.0
        && m.m[0][2] == 0.0
        && m.m[1][0] == 0.0
        && m.m[2][0] == 0.0
        && m.m[0][0] != 0.0;
    let envelope = if is_block_diag {
        let l = Mat2::new(m.m[1][1], m.m[1][2], m.m[2][1], m.m[2][2]);
        let scale = 1.0 / m.m[0][0];
        let gram = Sym2::new(
            l.m[0][0] * l.m[0][0] + l.m[1][0] * l.m[1][0],
            l.m[0][0] * l.m[0][1] + l.m[1][0] * l.m[1][1],
            l.m[0][1] * l.m[0][1] + l.m[1][1] * l.m[1][1],
        );
        let sigma_min_sq = (gram.min_eigenvalue() * scale * scale).max(1e-300);
        DecayEnvelope {
            amplitude: env.amplitude * prefactor.abs() / m.m[0][0].abs(),
            center_radius: env.center_radius / sigma_min_sq.sqrt(),
            rate: env.rate * sigma_min_sq,
            poly_degree: env.poly_degree,
        }
    } else {
        // Sample |F_M| over circles and fit the (1+r)^{-2} profile.
        let mut amp: f64 = 1e-12;
        for ir in 0..40 {
            let r = 0.05 * (ir as f64 + 1.0) * (1.1f64).powi(ir);
            for ia in 0..48 {
                let a = TAU * ia as f64 / 48.0;
                let xi = [r * a.cos(), r * a.sin()];
                if let Ok(v) = eval(xi) {
                    amp = amp.max(v.norm() * (1.0 + r) * (1.0 + r));
                }
            }
        }
        DecayEnvelope {
            amplitude: 3.0 * amp,
            center_radius: 0.0,
            rate: 0.0,
            poly_degree: -2,
        }
    };

    Ok(SpectrumFunction::Generic { eval: Arc::new(eval), envelope })
}

// ---------------------------------------------------------------------------
// Exponents
// ---------------------------------------------------------------------------

/// A Hoelder triple `1/p + 1/q + 1/r = 1`, optionally with mixed-norm pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixed: Option<MixedExponents>,
}

/// Inner/outer exponent pairs for the mixed-norm variant; `.0` is the inner
/// (first-variable) exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedExponents {
    pub p: (f64, f64),
    pub q: (f64, f64),
    pub r: (f64, f64),
}

impl ExponentTriple {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        if !(p >= 1.0 && q >= 1.0 && r >= 1.0) {
            return Err(Error::InvalidExponents(format!("({p}, {q}, {r}) not all >= 1")));
        }
        let defect = (1.0 / p + 1.0 / q + 1.0 / r - 1.0).abs();
        if defect > 1e-9 {
            return Err(Error::InvalidExponents(format!(
                "1/p + 1/q + 1/r = 1 violated by {defect:.2e}"
            )));
        }
        Ok(Self { p, q, r, mixed: None })
    }

    pub fn with_mixed(mut self, mixed: MixedExponents) -> Result<Self> {
        for (a, b) in [mixed.p, mixed.q, mixed.r] {
            if !(a >= 1.0 && b >= 1.0) {
                return Err(Error::InvalidExponents("mixed exponents must be >= 1".into()));
            }
        }
        self.mixed = Some(mixed);
        Ok(self)
    }

    /// Whether the triple lies in the open regularity region `2 < p,q,r < oo`.
    pub fn regular(&self) -> bool {
        [self.p, self.q, self.r].iter().all(|&e| e > 2.0 && e.is_finite())
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct AtomJson {
    amp: [f64; 2],
    center: Vec<f64>,
    modulation: Vec<f64>,
    shape: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct MixJson {
    dim: usize,
    atoms: Vec<AtomJson>,
}

impl SchwartzMix2 {
    pub fn to_json(&self) -> serde_json::Value {
        let atoms = self
            .atoms
            .iter()
            .map(|a| AtomJson {
                amp: [a.amp.re, a.amp.im],
                center: a.center.to_vec(),
                modulation: a.modulation.to_vec(),
                shape: vec![vec![a.shape.a, a.shape.b], vec![a.shape.b, a.shape.d]],
            })
            .collect();
        serde_json::to_value(MixJson { dim: 2, atoms }).expect("static schema")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let mj: MixJson = serde_json::from_value(v.clone())?;
        if mj.dim != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: mj.dim });
        }
        let mut atoms = Vec::with_capacity(mj.atoms.len());
        for a in &mj.atoms {
            if a.center.len() != 2 || a.modulation.len() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: a.center.len() });
            }
            if a.shape.len() != 2 || a.shape.iter().any(|r| r.len() != 2) {
                return Err(Error::Config("shape must be a 2x2 matrix".into()));
            }
            if (a.shape[0][1] - a.shape[1][0]).abs() > 1e-12 {
                return Err(Error::Config("shape must be symmetric".into()));
            }
            atoms.push(GaussianAtom2::new(
                Complex64::new(a.amp[0], a.amp[1]),
                [a.center[0], a.center[1]],
                [a.modulation[0], a.modulation[1]],
                Sym2::new(a.shape[0][0], 0.5 * (a.shape[0][1] + a.shape[1][0]), a.shape[1][1]),
            )?);
        }
        Ok(Self::new(atoms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn eval_unit_atom() {
        let a = GaussianAtom2::standard();
        assert_relative_eq!(a.eval([0.0, 0.0]).re, 1.0, max_relative = 1e-15);
        assert_relative_eq!(a.eval([1.0, 0.0]).re, (-PI).exp(), max_relative = 1e-14);
        let b = GaussianAtom2 { modulation: [3.0, 4.0], ..GaussianAtom2::standard() };
        assert_relative_eq!(b.eval([0.0, 0.0]).re, 1.0, max_relative = 1e-15);
        assert!(b.eval([0.0, 0.0]).im.abs() < 1e-15);
    }

    #[test]
    fn fourier_standard_atom_is_self_dual() {
        let a = GaussianAtom2::standard();
        let f = a.fourier();
        assert_relative_eq!(f.amp.re, 1.0, max_relative = 1e-15);
        assert_eq!(f.center, [0.0, 0.0]);
        assert_eq!(f.modulation, [0.0, 0.0]);
        assert_eq!(f.shape, Sym2::identity());
    }

    #[test]
    fn double_fourier_is_reflection() {
        let mix = SchwartzMix2::new(vec![
            GaussianAtom2 {
                amp: Complex64::new(0.7, -0.2),
                center: [0.4, -1.1],
                modulation: [1.5, 0.3],
                shape: Sym2::new(1.2, 0.3, 0.9),
            },
            GaussianAtom2::real_at([1.0, 0.5]),
        ]);
        let ff = mix.fourier().fourier();
        let refl = mix.reflect();
        for pt in [[0.3, 0.4], [-1.0, 2.0], [0.0, 0.0], [1.7, -0.6]] {
            let d = (ff.eval(pt) - refl.eval(pt)).norm();
            assert!(d < 1e-10, "double transform vs reflection at {pt:?}: {d}");
        }
    }

    #[test]
    fn fiber_of_standard_atom() {
        let a = GaussianAtom2::standard();
        let f0 = a.fiber(0.0);
        assert_eq!(f0.center, 0.0);
        assert_eq!(f0.scale, 1.0);
        assert_relative_eq!(f0.amp.re, 1.0, max_relative = 1e-15);
        let f1 = a.fiber(1.0);
        assert_relative_eq!(f1.amp.re, (-PI).exp(), max_relative = 1e-14);
    }

    #[test]
    fn fiber_matches_parent_pointwise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let atom = GaussianAtom2 {
            amp: Complex64::new(0.8, 0.3),
            center: [0.7, -0.2],
            modulation: [1.3, -0.4],
            shape: Sym2::new(1.7, 0.6, 1.1),
        };
        let mix = SchwartzMix2::single(atom);
        let x2 = 0.37;
        let fiber = mix.fiber(x2);
        for _ in 0..10 {
            let x1: f64 = rng.gen_range(-3.0..3.0);
            let d = (fiber.eval(x1) - mix.eval([x1, x2])).norm();
            assert!(d < 1e-12, "fiber mismatch at {x1}: {d}");
        }
    }

    #[test]
    fn lp_norm_closed_forms() {
        let g2 = SchwartzMix2::single(GaussianAtom2::standard());
        let n2 = g2.lp_norm(2.0, &quad()).unwrap();
        assert_relative_eq!(n2.value, 2f64.powf(-0.5), max_relative = 1e-8);

        let g1 = SchwartzMix1::single(GaussianAtom1::standard());
        let n4 = g1.lp_norm(4.0, &quad()).unwrap();
        assert_relative_eq!(n4.value, 4f64.powf(-0.125), max_relative = 1e-8);
    }

    #[test]
    fn mixed_norm_closed_forms() {
        let g = SchwartzMix2::single(GaussianAtom2::standard());
        let m22 = g.mixed_norm(2.0, 2.0, &quad()).unwrap();
        assert_relative_eq!(m22.value, 2f64.powf(-0.5), max_relative = 1e-7);
        let m24 = g.mixed_norm(2.0, 4.0, &quad()).unwrap();
        assert_relative_eq!(
            m24.value,
            2f64.powf(-0.25) * 4f64.powf(-0.125),
            max_relative = 1e-7
        );
    }

    #[test]
    fn dilate_scales_shape_and_amplitude() {
        let a = Mat2::diag(2.0, 2.0);
        let m = SchwartzMix2::single(GaussianAtom2::standard()).dilate(&a).unwrap();
        let atom = m.atoms[0];
        assert_relative_eq!(atom.amp.re, 4f64.powf(-1.0 / 3.0), max_relative = 1e-14);
        assert_relative_eq!(atom.shape.a, 0.25, max_relative = 1e-14);
        assert_relative_eq!(atom.shape.d, 0.25, max_relative = 1e-14);

        let id = SchwartzMix2::single(GaussianAtom2::standard())
            .dilate(&Mat2::identity())
            .unwrap();
        assert_eq!(id.atoms[0], GaussianAtom2::standard());
    }

    #[test]
    fn dilate_matches_definition_pointwise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a = Mat2::new(1.3, -0.4, 0.2, 0.9);
        let inv = a.inverse().unwrap();
        let mix = SchwartzMix2::new(vec![
            GaussianAtom2 {
                amp: Complex64::new(0.5, 0.1),
                center: [0.2, 0.4],
                modulation: [0.7, -1.0],
                shape: Sym2::new(1.1, -0.2, 0.8),
            },
            GaussianAtom2::real_at([-0.5, 0.3]),
        ]);
        let dilated = mix.dilate(&a).unwrap();
        let factor = a.det().signum() * a.det().abs().powf(-1.0 / 3.0);
        for _ in 0..10 {
            let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let want = factor * mix.eval(inv.mul_vec(x));
            let got = dilated.eval(x);
            assert!((want - got).norm() < 1e-12);
        }
    }

    #[test]
    fn modulate_and_inverse() {
        let m = SchwartzMix2::single(GaussianAtom2::standard());
        let b = [1.0, 0.0];
        let mm = m.modulate(b);
        assert_relative_eq!(mm.eval([0.0, 0.0]).re, 1.0, max_relative = 1e-15);
        // e^{-pi} * e^{2 pi i} = e^{-pi}
        assert_relative_eq!(mm.eval([1.0, 0.0]).re, (-PI).exp(), max_relative = 1e-12);
        assert!(mm.eval([1.0, 0.0]).im.abs() < 1e-15);
        let back = mm.modulate([-b[0], -b[1]]);
        assert_eq!(back, m);
    }

    #[test]
    fn atom_product_matches_pointwise() {
        let a = GaussianAtom1 {
            amp: Complex64::new(0.9, 0.2),
            center: 0.5,
            modulation: 1.1,
            scale: 2.0,
        };
        let b = GaussianAtom1 {
            amp: Complex64::new(-0.3, 0.7),
            center: -1.0,
            modulation: -0.4,
            scale: 0.7,
        };
        let p = a.product(&b);
        for x in [-1.5, -0.2, 0.0, 0.8, 2.1] {
            assert!((p.eval(x) - a.eval(x) * b.eval(x)).norm() < 1e-13);
        }
    }

    #[test]
    fn atom2_integral_matches_fourier_at_zero() {
        let a = GaussianAtom2 {
            amp: Complex64::new(0.8, -0.1),
            center: [1.0, 0.0],
            modulation: [0.5, -0.2],
            shape: Sym2::new(1.4, 0.2, 0.9),
        };
        let i = a.integral();
        let f0 = a.fourier().eval([0.0, 0.0]);
        assert!((i - f0).norm() < 1e-14);
    }

    #[test]
    fn projective_identity_is_noop() {
        let spec = SpectrumFunction::from_space_side(&SchwartzMix2::single(
            GaussianAtom2::real_at([1.0, 0.0]),
        ));
        let t = projective_spectrum(&spec, &Mat3::identity()).unwrap();
        for pt in [[0.2, 0.4], [-1.0, 0.7]] {
            let d = (t.eval(pt).unwrap() - spec.eval(pt).unwrap()).norm();
            assert!(d < 1e-13);
        }
    }

    #[test]
    fn projective_rotation_matches_stated_formula() {
        let spec = SpectrumFunction::from_space_side(&SchwartzMix2::single(
            GaussianAtom2::real_at([1.0, 0.0]),
        ));
        let m = Mat3::new([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        let t = projective_spectrum(&spec, &m).unwrap();
        for xi in [[0.8, 0.3], [-1.4, 0.6], [2.0, -1.0]] {
            let want = xi[0].signum() * xi[0].powi(-2)
                * spec.eval([-1.0 / xi[0], xi[1] / xi[0]]).unwrap();
            let got = t.eval(xi).unwrap();
            assert!(
                (want - got).norm() < 1e-12 * want.norm().max(1.0),
                "projective rotation mismatch at {xi:?}"
            );
        }
        // The line at infinity maps to xi_1 = 0.
        assert!(matches!(
            t.eval([0.0, 1.0]),
            Err(Error::ProjectiveSingularPoint)
        ));
    }

    #[test]
    fn projective_jacobian_identity_vs_finite_differences() {
        // |det(d breve / d xi)| = |det M| / |xi~_0|^3, spot-checked.
        let m = Mat3::new([[0.4, 0.3, -0.2], [1.0, 0.8, 0.1], [-0.3, 0.2, 1.1]]);
        let breve = |xi: Vec2| -> Vec2 {
            let l = m.mul_vec([1.0, xi[0], xi[1]]);
            [l[1] / l[0], l[2] / l[0]]
        };
        for xi in [[0.3, 0.2], [-0.8, 0.5], [1.2, -0.4]] {
            let t0 = m.mul_vec([1.0, xi[0], xi[1]])[0];
            let h = 1e-6;
            let bx = breve([xi[0] + h, xi[1]]);
            let bmx = breve([xi[0] - h, xi[1]]);
            let by = breve([xi[0], xi[1] + h]);
            let bmy = breve([xi[0], xi[1] - h]);
            let j00 = (bx[0] - bmx[0]) / (2.0 * h);
            let j10 = (bx[1] - bmx[1]) / (2.0 * h);
            let j01 = (by[0] - bmy[0]) / (2.0 * h);
            let j11 = (by[1] - bmy[1]) / (2.0 * h);
            let det_fd = j00 * j11 - j01 * j10;
            let det_closed = m.det() / (t0 * t0 * t0);
            assert_relative_eq!(det_fd, det_closed, max_relative = 1e-5);
        }
    }

    #[test]
    fn exponent_triple_validation() {
        assert!(ExponentTriple::new(3.0, 3.0, 3.0).unwrap().regular());
        assert!(!ExponentTriple::new(2.0, 4.0, 4.0).unwrap().regular());
        assert!(ExponentTriple::new(2.0, 3.0, 4.0).is_err());
    }

    #[test]
    fn mix_json_round_trip_and_schema() {
        let mix = SchwartzMix2::new(vec![GaussianAtom2 {
            amp: Complex64::new(1.0, -0.5),
            center: [1.0, 0.0],
            modulation: [0.0, 2.0],
            shape: Sym2::new(1.0, 0.25, 2.0),
        }]);
        let v = mix.to_json();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["atoms"][0]["amp"][1], -0.5);
        assert_eq!(v["atoms"][0]["shape"][1][0], 0.25);
        let back = SchwartzMix2::from_json(&v).unwrap();
        assert_eq!(mix, back);
    }

    #[test]
    fn spectrum_envelope_spot_check() {
        let spec = SpectrumFunction::from_space_side(&SchwartzMix2::new(vec![
            GaussianAtom2::real_at([1.0, 0.0]),
            GaussianAtom2 {
                amp: Complex64::new(0.0, 2.0),
                center: [0.0, -1.0],
                modulation: [1.0, 1.0],
                shape: Sym2::new(0.8, 0.1, 1.3),
            },
        ]));
        assert!(spec.validate_envelope(3, 200));
    }
}
