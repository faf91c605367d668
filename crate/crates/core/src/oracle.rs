//! Brute-force cross-checks that do not go through the closed-form tensor.
//!
//! * [`mode_sum_im_green`] integrates the transverse projector
//!   (I − n̂n̂) cos(k n̂·ϱ) over propagation directions on the unit sphere.
//!   Its overall constant is fixed by demanding that the coincidence value
//!   is ω/(6πc) I, not by a hand-derived prefactor.
//! * [`radiated_power_rate`] treats the pair as coherently driven classical
//!   dipoles (plus their images above the plate) and integrates the
//!   far-field power. It is normalized so that an isolated dipole in free
//!   space radiates at its free-space rate.
//!
//! Both use a product rule: Gauss–Legendre in cos θ times a uniform grid in
//! φ. Sums run in a fixed order so results are bitwise reproducible.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::green::{image_dipole, RealTensor3};
use crate::model::constants::C;
use crate::model::{dot3, AngularFrequency, DipoleVector, Environment, PairConfig, Position3};
use crate::rates::free_space_single_rate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureScheme {
    /// Gauss–Legendre in cos θ, uniform trapezoid in φ.
    GaussLegendreUniformPhi,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: QuadratureScheme,
    pub theta_order: usize,
    pub phi_order: usize,
    /// Relative accuracy the caller expects from this rule.
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            scheme: QuadratureScheme::GaussLegendreUniformPhi,
            theta_order: 64,
            phi_order: 128,
            tolerance: 1e-8,
        }
    }
}

impl QuadratureSpec {
    pub fn new(theta_order: usize, phi_order: usize, tolerance: f64) -> Result<Self> {
        if theta_order < 4 {
            return Err(Error::config("theta_order", format!("must be at least 4, got {theta_order}")));
        }
        if phi_order < 4 {
            return Err(Error::config("phi_order", format!("must be at least 4, got {phi_order}")));
        }
        if !(tolerance > 0.0) {
            return Err(Error::config("tolerance", format!("must be positive, got {tolerance}")));
        }
        Ok(Self { scheme: QuadratureScheme::GaussLegendreUniformPhi, theta_order, phi_order, tolerance })
    }

    /// Rule with `order` nodes in cos θ and twice as many in φ.
    pub fn with_order(order: usize) -> Result<Self> {
        Self::new(order, 2 * order, Self::default().tolerance)
    }

    /// Rule fine enough for phases k n̂·Δr with k|Δr| up to `k_extent`.
    pub fn resolving(k_extent: f64) -> Self {
        let extent = k_extent.max(0.0);
        let theta_order = 64.max((0.6 * extent).ceil() as usize + 40);
        let phi_order = 128.max(extent.ceil() as usize + 64);
        Self { theta_order, phi_order, tolerance: 1e-10, ..Self::default() }
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on Pₙ.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Hemisphere {
    Full,
    Upper,
}

/// Unit directions with solid-angle weights summing to the covered area.
struct SphereRule {
    directions: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphereRule {
    fn new(quad: &QuadratureSpec, domain: Hemisphere) -> Self {
        let (nodes, gl_weights) = gauss_legendre(quad.theta_order);
        let (lo, hi) = match domain {
            Hemisphere::Full => (-1.0, 1.0),
            Hemisphere::Upper => (0.0, 1.0),
        };
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let dphi = 2.0 * PI / quad.phi_order as f64;

        let mut directions = Vec::with_capacity(quad.theta_order * quad.phi_order);
        let mut weights = Vec::with_capacity(quad.theta_order * quad.phi_order);
        for (u, wu) in nodes.iter().zip(&gl_weights) {
            let cos_t = mid + half * u;
            let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
            for j in 0..quad.phi_order {
                let (sp, cp) = (j as f64 * dphi).sin_cos();
                directions.push([sin_t * cp, sin_t * sp, cos_t]);
                weights.push(half * wu * dphi);
            }
        }
        Self { directions, weights }
    }
}

/// Σ w (I − n̂n̂) cos(k n̂·ϱ) over the full sphere, unnormalized.
fn projector_sum(rho: [f64; 3], k: f64, rule: &SphereRule) -> RealTensor3 {
    let mut m = [[0.0; 3]; 3];
    for (n, w) in rule.directions.iter().zip(&rule.weights) {
        let c = w * (k * dot3(*n, rho)).cos();
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                m[i][j] += c * (delta - n[i] * n[j]);
            }
        }
    }
    RealTensor3(m)
}

/// Mode-sum approximation of Im G⁰(r, r', ω).
pub fn mode_sum_im_green(
    r: Position3,
    rp: Position3,
    omega: AngularFrequency,
    quad: &QuadratureSpec,
) -> RealTensor3 {
    let rule = SphereRule::new(quad, Hemisphere::Full);
    let k = omega.wavenumber();
    let raw = projector_sum(r - rp, k, &rule);
    let anchor = projector_sum([0.0; 3], k, &rule);
    let trace = (anchor.0[0][0] + anchor.0[1][1] + anchor.0[2][2]) / 3.0;
    let norm = omega.value() / (6.0 * PI * C) / trace;
    raw.scale(norm)
}

/// A classical point dipole with a real amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Emitter {
    pub amplitude: f64,
    pub position: Position3,
    pub dipole: DipoleVector,
}

fn with_images(emitters: &[Emitter], env: Environment) -> Vec<Emitter> {
    let mut all = emitters.to_vec();
    if env == Environment::PerfectMirror {
        all.extend(emitters.iter().map(|e| Emitter {
            amplitude: e.amplitude,
            position: Position3 { z: -e.position.z, ..e.position },
            dipole: image_dipole(e.dipole),
        }));
    }
    all
}

/// Σ w |Σⱼ cⱼ (I − n̂n̂)dⱼ e^{−ik n̂·rⱼ}|² over the radiating directions.
fn far_field_power(sources: &[Emitter], k: f64, rule: &SphereRule) -> f64 {
    let mut total = 0.0;
    for (n, w) in rule.directions.iter().zip(&rule.weights) {
        let mut field = [Complex64::new(0.0, 0.0); 3];
        for s in sources {
            let d = s.dipole.to_array();
            let nd = dot3(*n, d);
            let phase = Complex64::from_polar(s.amplitude, -k * dot3(*n, s.position.to_array()));
            for i in 0..3 {
                field[i] += phase * (d[i] - n[i] * nd);
            }
        }
        total += w * field.iter().map(|f| f.norm_sqr()).sum::<f64>();
    }
    total
}

/// Largest k|rᵢ − rⱼ| among the sources and their images.
pub fn phase_extent(emitters: &[Emitter], env: Environment, omega: AngularFrequency) -> f64 {
    let all = with_images(emitters, env);
    let mut extent = 0.0_f64;
    for a in &all {
        for b in &all {
            extent = extent.max(a.position.distance(b.position));
        }
    }
    extent * omega.wavenumber()
}

/// Total far-field emission rate of coherently superposed dipoles. Above
/// the plate the images are added and only the upper half-space radiates.
pub fn radiated_power_rate_of(
    emitters: &[Emitter],
    env: Environment,
    omega: AngularFrequency,
    quad: &QuadratureSpec,
) -> f64 {
    let k = omega.wavenumber();
    let domain = match env {
        Environment::FreeSpace => Hemisphere::Full,
        Environment::PerfectMirror => Hemisphere::Upper,
    };
    let power = far_field_power(&with_images(emitters, env), k, &SphereRule::new(quad, domain));

    let unit = DipoleVector::along_z(1.0);
    let isolated = Emitter { amplitude: 1.0, position: Position3::ORIGIN, dipole: unit };
    let reference = far_field_power(&[isolated], k, &SphereRule::new(quad, Hemisphere::Full));
    free_space_single_rate(unit, omega) * power / reference
}

/// The pair's Dicke state as two emitters with amplitudes 1/√2 and ±1/√2.
pub fn pair_emitters(cfg: &PairConfig) -> [Emitter; 2] {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    [
        Emitter { amplitude: c, position: cfg.atom_a.position, dipole: cfg.atom_a.dipole },
        Emitter { amplitude: c * cfg.parity.sign(), position: cfg.atom_b.position, dipole: cfg.atom_b.dipole },
    ]
}

/// Collective decay rate from the radiated far-field power.
pub fn radiated_power_rate(cfg: &PairConfig, quad: &QuadratureSpec) -> f64 {
    radiated_power_rate_of(&pair_emitters(cfg), cfg.environment, cfg.omega0, quad)
}
