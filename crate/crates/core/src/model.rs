//! Domain types shared by every module: positions, dipoles, frequencies,
//! the two-atom configuration and the decomposed rate result.
//!
//! Everything is SI. Positions are in meters, dipole moments in C·m,
//! angular frequencies in rad/s and rates in 1/s.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Fixed physical constants (CODATA 2022).
pub mod constants {
    /// Speed of light in vacuum, m/s (exact).
    pub const C: f64 = 299_792_458.0;
    /// Vacuum magnetic permeability, N/A² (CODATA 2022: 1.25663706127e-6).
    pub const MU0: f64 = 1.256_637_061_27e-6;
    /// Vacuum electric permittivity, F/m.
    ///
    /// Derived as 1/(μ₀c²) = 8.854187818789433e-12, which agrees with the
    /// tabulated 8.8541878188e-12 to all published digits while keeping
    /// c²μ₀ε₀ = 1 to rounding.
    pub const EPS0: f64 = 1.0 / (MU0 * C * C);
    /// Reduced Planck constant, J·s (exact).
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Atomic unit of electric dipole moment e·a₀, C·m.
    pub const E_A0: f64 = 8.478_353_625_5e-30;
}

/// Bundle of the constants, for callers that want them as a value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    pub c: f64,
    pub mu0: f64,
    pub eps0: f64,
    pub hbar: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        c: constants::C,
        mu0: constants::MU0,
        eps0: constants::EPS0,
        hbar: constants::HBAR,
    };

    /// c²μ₀ε₀ − 1.
    pub fn consistency_residual(&self) -> f64 {
        self.c * self.c * self.mu0 * self.eps0 - 1.0
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

fn check_finite(field: &'static str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { field })
    }
}

/// A point in 3-space, meters. The mirror, when present, is the plane z = 0.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub const ORIGIN: Position3 = Position3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        check_finite("position", &[x, y, z])?;
        Ok(Self { x, y, z })
    }

    /// Point on the z axis.
    pub fn on_axis(z: f64) -> Self {
        Self { x: 0.0, y: 0.0, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn distance(self, other: Position3) -> f64 {
        norm(sub3(self.to_array(), other.to_array()))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Sub for Position3 {
    type Output = [f64; 3];

    fn sub(self, rhs: Position3) -> [f64; 3] {
        sub3(self.to_array(), rhs.to_array())
    }
}

/// Real transition dipole moment d^{eg} = d^{ge}, C·m.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DipoleVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl DipoleVector {
    pub const ZERO: DipoleVector = DipoleVector { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        check_finite("dipole", &[x, y, z])?;
        Ok(Self { x, y, z })
    }

    pub fn along_x(magnitude: f64) -> Self {
        Self { x: magnitude, y: 0.0, z: 0.0 }
    }

    pub fn along_y(magnitude: f64) -> Self {
        Self { x: 0.0, y: magnitude, z: 0.0 }
    }

    pub fn along_z(magnitude: f64) -> Self {
        Self { x: 0.0, y: 0.0, z: magnitude }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self { x: a[0], y: a[1], z: a[2] }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: DipoleVector) -> f64 {
        dot3(self.to_array(), other.to_array())
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Same direction, given magnitude. The zero vector stays zero.
    pub fn with_magnitude(self, magnitude: f64) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self;
        }
        self * (magnitude / n)
    }
}

impl Mul<f64> for DipoleVector {
    type Output = DipoleVector;

    fn mul(self, s: f64) -> DipoleVector {
        DipoleVector { x: self.x * s, y: self.y * s, z: self.z * s }
    }
}

impl Add for DipoleVector {
    type Output = DipoleVector;

    fn add(self, o: DipoleVector) -> DipoleVector {
        DipoleVector { x: self.x + o.x, y: self.y + o.y, z: self.z + o.z }
    }
}

impl Neg for DipoleVector {
    type Output = DipoleVector;

    fn neg(self) -> DipoleVector {
        self * -1.0
    }
}

/// Transition angular frequency ω₀ > 0, rad/s.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct AngularFrequency(f64);

impl AngularFrequency {
    /// 2p → 1s transition of hydrogen.
    pub const HYDROGEN_LYMAN_ALPHA: AngularFrequency = AngularFrequency(1.55e16);

    pub fn new(omega: f64) -> Result<Self> {
        if omega.is_finite() && omega > 0.0 {
            Ok(Self(omega))
        } else {
            Err(Error::NonPositiveFrequency(omega))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Vacuum wavenumber ω/c.
    pub fn wavenumber(self) -> f64 {
        self.0 / constants::C
    }
}

/// λ₀ = 2πc/ω₀ in meters.
pub fn transition_wavelength(omega0: f64) -> Result<f64> {
    let omega0 = AngularFrequency::new(omega0)?;
    Ok(2.0 * PI * constants::C / omega0.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Environment {
    FreeSpace,
    /// Perfectly reflecting plate occupying the plane z = 0.
    PerfectMirror,
}

impl Environment {
    pub fn name(self) -> &'static str {
        match self {
            Environment::FreeSpace => "free",
            Environment::PerfectMirror => "mirror",
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sign of the single-excitation Dicke superposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DickeParity {
    Symmetric,
    Antisymmetric,
}

impl DickeParity {
    pub fn sign(self) -> f64 {
        match self {
            DickeParity::Symmetric => 1.0,
            DickeParity::Antisymmetric => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            DickeParity::Symmetric => DickeParity::Antisymmetric,
            DickeParity::Antisymmetric => DickeParity::Symmetric,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DickeParity::Symmetric => "symmetric",
            DickeParity::Antisymmetric => "antisymmetric",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub position: Position3,
    pub dipole: DipoleVector,
}

impl Atom {
    pub fn new(position: Position3, dipole: DipoleVector) -> Self {
        Self { position, dipole }
    }
}

/// Checks that a position is admissible in the given environment.
pub fn check_position(field: &'static str, r: Position3, env: Environment) -> Result<()> {
    if !r.is_finite() {
        return Err(Error::NonFinite { field });
    }
    if env == Environment::PerfectMirror && r.z <= 0.0 {
        return Err(Error::NotAboveMirror { field, z: r.z });
    }
    Ok(())
}

/// The full physical scenario: two atoms, their transition frequency, the
/// Dicke parity of the initial state and the environment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairConfig {
    pub atom_a: Atom,
    pub atom_b: Atom,
    pub omega0: AngularFrequency,
    pub parity: DickeParity,
    pub environment: Environment,
}

impl PairConfig {
    pub fn new(
        atom_a: Atom,
        atom_b: Atom,
        omega0: AngularFrequency,
        parity: DickeParity,
        environment: Environment,
    ) -> Result<Self> {
        let cfg = Self { atom_a, atom_b, omega0, parity, environment };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_position("zA", self.atom_a.position, self.environment)?;
        check_position("zB", self.atom_b.position, self.environment)?;
        check_finite("dA", &self.atom_a.dipole.to_array())?;
        check_finite("dB", &self.atom_b.dipole.to_array())?;
        if self.atom_a.position == self.atom_b.position {
            return Err(Error::CoincidentAtoms);
        }
        Ok(())
    }

    pub fn separation(&self) -> f64 {
        self.atom_a.position.distance(self.atom_b.position)
    }

    pub fn with_parity(mut self, parity: DickeParity) -> Self {
        self.parity = parity;
        self
    }

    pub fn with_environment(mut self, environment: Environment) -> Self {
        self.environment = environment;
        self
    }
}

/// Decomposed collective decay rate. All `gamma_*` fields are in 1/s.
///
/// `gamma_a`, `gamma_b` are the single-atom rates in the configured
/// environment and `gamma_ab` the interference rate, so that
/// `gamma_total = (gamma_a + gamma_b)/2 ± gamma_ab`. `gamma_bulk` and
/// `gamma_scatter` split the same total into its free-space and
/// mirror-induced parts. The scaled values divide by the free-space
/// single-atom rates and are NaN when those vanish.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateResult {
    pub parity: DickeParity,
    pub gamma_total: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_ab: f64,
    pub gamma_bulk: f64,
    pub gamma_scatter: f64,
    pub scaled_pair_sum: f64,
    pub scaled_single: f64,
}

impl RateResult {
    /// Relative violation of gamma_total = (Γ_A+Γ_B)/2 ± Γ_AB.
    pub fn decomposition_residual(&self) -> f64 {
        let rhs = 0.5 * (self.gamma_a + self.gamma_b) + self.parity.sign() * self.gamma_ab;
        let scale = (self.gamma_a.abs() + self.gamma_b.abs()).max(self.gamma_total.abs());
        if scale == 0.0 {
            return (self.gamma_total - rhs).abs();
        }
        (self.gamma_total - rhs).abs() / scale
    }

    /// Non-negativity up to roundoff in Γ_A+Γ_B.
    pub fn is_physical(&self) -> bool {
        self.gamma_total >= -1e-12 * (self.gamma_a.abs() + self.gamma_b.abs())
    }
}

pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constants_are_consistent() {
        assert!(PhysicalConstants::CODATA.consistency_residual().abs() < 1e-12);
        assert_relative_eq!(constants::EPS0, 8.8541878188e-12, max_relative = 1e-10);
    }

    #[test]
    fn wavelength_of_hydrogen_line() {
        // 2πc/ω₀ evaluated at 40 digits: 1.215259075683131e-7 m
        let lam = transition_wavelength(1.55e16).unwrap();
        assert_relative_eq!(lam, 1.215_259_075_683_131e-7, max_relative = 1e-14);
        assert!((lam - 1.2e-7).abs() < 0.02e-7);
    }

    #[test]
    fn wavelength_definition() {
        let lam = transition_wavelength(2.0 * PI * constants::C).unwrap();
        assert_relative_eq!(lam, 1.0, max_relative = 1e-15);
        let half = transition_wavelength(3.10e16).unwrap();
        assert_relative_eq!(half, 6.076_295_378_415_656e-8, max_relative = 1e-14);
    }

    #[test]
    fn wavelength_rejects_bad_frequency() {
        assert!(matches!(transition_wavelength(0.0), Err(Error::NonPositiveFrequency(_))));
        assert!(transition_wavelength(-1.0).is_err());
        assert!(transition_wavelength(f64::NAN).is_err());
    }

    #[test]
    fn pair_config_rejects_coincident_atoms() {
        let r = Position3::on_axis(1e-9);
        let d = DipoleVector::along_z(1.0);
        let err = PairConfig::new(
            Atom::new(r, d),
            Atom::new(r, d),
            AngularFrequency::HYDROGEN_LYMAN_ALPHA,
            DickeParity::Symmetric,
            Environment::FreeSpace,
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "atom positions coincide");
    }

    #[test]
    fn pair_config_requires_atoms_above_mirror() {
        let d = DipoleVector::along_z(1.0);
        let err = PairConfig::new(
            Atom::new(Position3::on_axis(1e-9), d),
            Atom::new(Position3::on_axis(0.0), d),
            AngularFrequency::HYDROGEN_LYMAN_ALPHA,
            DickeParity::Symmetric,
            Environment::PerfectMirror,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotAboveMirror { field: "zB", .. }));
        // the same geometry is fine without the plate
        assert!(PairConfig::new(
            Atom::new(Position3::on_axis(1e-9), d),
            Atom::new(Position3::on_axis(0.0), d),
            AngularFrequency::HYDROGEN_LYMAN_ALPHA,
            DickeParity::Symmetric,
            Environment::FreeSpace,
        )
        .is_ok());
    }

    #[test]
    fn non_finite_inputs_are_rejected() {
        assert!(Position3::new(f64::NAN, 0.0, 1.0).is_err());
        assert!(DipoleVector::new(0.0, f64::INFINITY, 1.0).is_err());
    }
}
