//! Dyadic Green's tensors for free space and for the half-space above a
//! perfectly reflecting plate at z = 0.
//!
//! The free-space tensor between distinct points is
//!
//! ```text
//! G⁰(r, r', ω) = −(e^{ix} / 4πk²ϱ³) { [1 − ix − x²] I − [3 − 3ix − x²] ê ê }
//! ```
//!
//! with ϱ = r − r', x = kϱ and k = ω/c. The real contact term at ϱ = 0 is
//! never represented: only Im G enters decay rates and its coincidence
//! value is finite, Im G⁰(r, r, ω) = (ω/6πc) I.
//!
//! The plate is handled with images. The scattering part is
//! G¹(r, r', ω) = G⁰(r, r'*, ω)·R, where r'* is the mirror image of the
//! source point and R = diag(−1, −1, 1).

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{check_position, norm, AngularFrequency, DipoleVector, Environment, Position3};

/// Below this separation (m) the direct expression is refused.
pub const MIN_SEPARATION: f64 = 1e-15;

/// Below this value of kϱ the imaginary part is taken from its Taylor series.
pub const SERIES_SWITCH_KR: f64 = 1e-3;

/// Real 3×3 tensor, row-major over (x, y, z).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RealTensor3(pub [[f64; 3]; 3]);

impl RealTensor3 {
    pub const ZERO: RealTensor3 = RealTensor3([[0.0; 3]; 3]);

    pub fn identity() -> Self {
        Self::diagonal([1.0, 1.0, 1.0])
    }

    pub fn diagonal(d: [f64; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            m[i][i] = d[i];
        }
        RealTensor3(m)
    }

    /// a I + b ê ê.
    pub fn isotropic_plus_dyad(a: f64, b: f64, e: [f64; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = b * e[i] * e[j];
            }
            m[i][i] += a;
        }
        RealTensor3(m)
    }

    pub fn transpose(&self) -> Self {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.0[j][i];
            }
        }
        RealTensor3(m)
    }

    pub fn scale(&self, s: f64) -> Self {
        RealTensor3(self.0.map(|row| row.map(|v| v * s)))
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// a · T · b.
    pub fn contract(&self, a: DipoleVector, b: DipoleVector) -> f64 {
        let tb = self.apply(b.to_array());
        a.x * tb[0] + a.y * tb[1] + a.z * tb[2]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &RealTensor3) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for RealTensor3 {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl Add for RealTensor3 {
    type Output = RealTensor3;

    fn add(self, rhs: RealTensor3) -> RealTensor3 {
        let mut m = self.0;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += rhs.0[i][j];
            }
        }
        RealTensor3(m)
    }
}

impl Mul for RealTensor3 {
    type Output = RealTensor3;

    fn mul(self, rhs: RealTensor3) -> RealTensor3 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|l| self.0[i][l] * rhs.0[l][j]).sum();
            }
        }
        RealTensor3(m)
    }
}

impl fmt::Display for RealTensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            writeln!(f, "[{:+.9e} {:+.9e} {:+.9e}]", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

/// Complex 3×3 tensor in 1/m, row-major over (x, y, z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexTensor3(pub [[Complex64; 3]; 3]);

impl ComplexTensor3 {
    pub fn zero() -> Self {
        ComplexTensor3([[Complex64::new(0.0, 0.0); 3]; 3])
    }

    pub fn re(&self) -> RealTensor3 {
        RealTensor3(self.0.map(|row| row.map(|v| v.re)))
    }

    pub fn im(&self) -> RealTensor3 {
        RealTensor3(self.0.map(|row| row.map(|v| v.im)))
    }

    pub fn transpose(&self) -> Self {
        let mut m = self.0;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.0[j][i];
            }
        }
        ComplexTensor3(m)
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexTensor3(self.0.map(|row| row.map(|v| v * s)))
    }

    /// Right multiplication by a real tensor.
    pub fn mul_real(&self, rhs: &RealTensor3) -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|l| self.0[i][l] * rhs.0[l][j]).sum();
            }
        }
        ComplexTensor3(m)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexTensor3 {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl Add for ComplexTensor3 {
    type Output = ComplexTensor3;

    fn add(self, rhs: ComplexTensor3) -> ComplexTensor3 {
        let mut m = self.0;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += rhs.0[i][j];
            }
        }
        ComplexTensor3(m)
    }
}

fn unit(rho: [f64; 3], dist: f64) -> [f64; 3] {
    [rho[0] / dist, rho[1] / dist, rho[2] / dist]
}

/// Free-space Green's tensor between distinct points.
pub fn free_space_green(r: Position3, rp: Position3, omega: AngularFrequency) -> Result<ComplexTensor3> {
    let rho = r - rp;
    let dist = norm(rho);
    if !(dist >= MIN_SEPARATION) {
        return Err(Error::CoincidentPoints { min: MIN_SEPARATION });
    }
    let k = omega.wavenumber();
    let x = k * dist;
    let e = unit(rho, dist);

    // Split into transverse e^{ix}(1 − ix − x²) and longitudinal
    // −2e^{ix}(1 − ix) parts, expanded in real arithmetic so that the
    // small-x cancellation in the imaginary parts stays to one rounding.
    let (sin, cos) = x.sin_cos();
    let s_minus_xc = (-x).mul_add(cos, sin);
    let trans = Complex64::new(cos * (1.0 - x * x) + x * sin, s_minus_xc - x * x * sin);
    let long = Complex64::new(-2.0 * (cos + x * sin), -2.0 * s_minus_xc);
    let pref = -1.0 / (4.0 * PI * k * k * dist * dist * dist);

    let mut m = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let ee = e[i] * e[j];
            let delta = if i == j { 1.0 } else { 0.0 };
            m[i][j] = (long * ee + trans * (delta - ee)) * pref;
        }
    }
    Ok(ComplexTensor3(m))
}

/// Small-x expansions of the isotropic and dyadic coefficients of
/// (4π/k) Im G⁰:
///
///   iso(x)  = 2/3 − 2x²/15 + x⁴/140 − x⁶/5670
///   dyad(x) = x²/15 − x⁴/210 + x⁶/7560
fn im_coefficients_series(x: f64) -> (f64, f64) {
    let x2 = x * x;
    let iso = 2.0 / 3.0 + x2 * (-2.0 / 15.0 + x2 * (1.0 / 140.0 - x2 / 5670.0));
    let dyad = x2 * (1.0 / 15.0 + x2 * (-1.0 / 210.0 + x2 / 7560.0));
    (iso, dyad)
}

/// Imaginary part of the free-space tensor, finite at coincidence.
pub fn im_free_space_green(r: Position3, rp: Position3, omega: AngularFrequency) -> RealTensor3 {
    let rho = r - rp;
    let dist = norm(rho);
    let k = omega.wavenumber();
    let x = k * dist;
    if x < SERIES_SWITCH_KR || dist < MIN_SEPARATION {
        im_free_space_green_series(rho, dist, k)
    } else {
        im_free_space_green_direct(r, rp, omega)
    }
}

fn im_free_space_green_series(rho: [f64; 3], dist: f64, k: f64) -> RealTensor3 {
    let (iso, dyad) = im_coefficients_series(k * dist);
    let scale = k / (4.0 * PI);
    if dist == 0.0 {
        return RealTensor3::identity().scale(scale * iso);
    }
    RealTensor3::isotropic_plus_dyad(scale * iso, scale * dyad, unit(rho, dist))
}

fn im_free_space_green_direct(r: Position3, rp: Position3, omega: AngularFrequency) -> RealTensor3 {
    free_space_green(r, rp, omega)
        .expect("direct branch is only taken above the minimum separation")
        .im()
}

/// R = diag(−1, −1, +1).
pub fn reflection_matrix() -> RealTensor3 {
    RealTensor3::diagonal([-1.0, -1.0, 1.0])
}

/// Mirror image of a point above the plate.
pub fn image_position(r: Position3) -> Result<Position3> {
    check_position("position", r, Environment::PerfectMirror)?;
    Ok(reflect_point(r))
}

fn reflect_point(r: Position3) -> Position3 {
    Position3 { x: r.x, y: r.y, z: -r.z }
}

/// Image dipole d* = R·d.
pub fn image_dipole(d: DipoleVector) -> DipoleVector {
    DipoleVector::from_array(reflection_matrix().apply(d.to_array()))
}

fn check_pair_above(r: Position3, rp: Position3) -> Result<()> {
    check_position("r", r, Environment::PerfectMirror)?;
    check_position("rp", rp, Environment::PerfectMirror)
}

/// Scattering part G¹(r, r', ω) = G⁰(r, r'*, ω)·R.
pub fn scattering_green(r: Position3, rp: Position3, omega: AngularFrequency) -> Result<ComplexTensor3> {
    check_pair_above(r, rp)?;
    let g = free_space_green(r, reflect_point(rp), omega)?;
    Ok(g.mul_real(&reflection_matrix()))
}

/// Im G¹(r, r', ω). Uses the stable imaginary-part path, which matters
/// when both points approach the plate.
pub fn im_scattering_green(r: Position3, rp: Position3, omega: AngularFrequency) -> Result<RealTensor3> {
    check_pair_above(r, rp)?;
    Ok(im_free_space_green(r, reflect_point(rp), omega) * reflection_matrix())
}

/// Full complex tensor for the environment. Refuses coincident points.
pub fn total_green(
    env: Environment,
    r: Position3,
    rp: Position3,
    omega: AngularFrequency,
) -> Result<ComplexTensor3> {
    match env {
        Environment::FreeSpace => free_space_green(r, rp, omega),
        Environment::PerfectMirror => {
            let scatter = scattering_green(r, rp, omega)?;
            Ok(free_space_green(r, rp, omega)? + scatter)
        }
    }
}

/// Im G split into bulk and scattering parts. The scattering part is zero
/// in free space. Coincident points are allowed.
pub fn im_green_parts(
    env: Environment,
    r: Position3,
    rp: Position3,
    omega: AngularFrequency,
) -> Result<(RealTensor3, RealTensor3)> {
    check_position("r", r, env)?;
    check_position("rp", rp, env)?;
    let bulk = im_free_space_green(r, rp, omega);
    let scatter = match env {
        Environment::FreeSpace => RealTensor3::ZERO,
        Environment::PerfectMirror => im_scattering_green(r, rp, omega)?,
    };
    Ok((bulk, scatter))
}

/// Im of the total tensor, including the coincidence limit.
pub fn im_total_green(
    env: Environment,
    r: Position3,
    rp: Position3,
    omega: AngularFrequency,
) -> Result<RealTensor3> {
    let (bulk, scatter) = im_green_parts(env, r, rp, omega)?;
    Ok(bulk + scatter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::constants::C;
    use approx::assert_relative_eq;

    fn omega() -> AngularFrequency {
        AngularFrequency::HYDROGEN_LYMAN_ALPHA
    }

    fn k() -> f64 {
        omega().wavenumber()
    }

    fn coincidence_value() -> f64 {
        omega().value() / (6.0 * PI * C)
    }

    #[test]
    fn coincidence_is_isotropic() {
        let r = Position3::new(1e-9, -2e-9, 3e-9).unwrap();
        let g = im_free_space_green(r, r, omega());
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { coincidence_value() } else { 0.0 };
                assert_relative_eq!(g[(i, j)], want, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn coincident_points_are_refused_by_full_tensor() {
        let r = Position3::on_axis(1.0);
        assert!(matches!(free_space_green(r, r, omega()), Err(Error::CoincidentPoints { .. })));
    }

    #[test]
    fn axial_separation_is_diagonal() {
        let g = free_space_green(Position3::on_axis(3e-8), Position3::on_axis(1e-8), omega()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(g[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
        assert_eq!(g[(0, 0)], g[(1, 1)]);
    }

    // Reference values from a 40-digit evaluation of the closed form.
    #[test]
    fn axial_entries_at_unit_kr() {
        let g = free_space_green(Position3::on_axis(1.0 / k()), Position3::ORIGIN, omega()).unwrap();
        assert_relative_eq!(g[(0, 0)].re, -3_462_105.330_646_809, max_relative = 1e-12);
        assert_relative_eq!(g[(0, 0)].im, 2_222_992.268_395_2, max_relative = 1e-12);
        assert_relative_eq!(g[(2, 2)].re, 11_370_195.198_084_02, max_relative = 1e-12);
        assert_relative_eq!(g[(2, 2)].im, 2_478_226.124_503_217, max_relative = 1e-12);
    }

    #[test]
    fn off_axis_entries() {
        let rho = Position3::new(3e-8, -2e-8, 5e-8).unwrap();
        let g = free_space_green(rho, Position3::ORIGIN, omega()).unwrap();
        let want = [
            [(-942_061.912_184_634_3, -160_319.136_039_276_95), (-134_744.007_557_959_33, -198_202.413_580_849_8), (336_860.018_894_898_3, 495_506.033_952_124_5)],
            [(-134_744.007_557_959_33, -198_202.413_580_849_8), (-1_054_348.585_149_600_4, -325_487.814_023_318_45), (-224_573.345_929_932_2, -330_337.355_968_083)],
            [(336_860.018_894_898_3, 495_506.033_952_124_5), (-224_573.345_929_932_2, -330_337.355_968_083), (-582_744.558_696_742_8, 368_220.633_509_655_9)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(g[(i, j)].re, want[i][j].0, max_relative = 1e-11);
                assert_relative_eq!(g[(i, j)].im, want[i][j].1, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn decays_as_inverse_distance() {
        let near = free_space_green(Position3::on_axis(1e3 / k()), Position3::ORIGIN, omega()).unwrap();
        let far = free_space_green(Position3::on_axis(1e5 / k()), Position3::ORIGIN, omega()).unwrap();
        let ratio = far.max_abs() / near.max_abs();
        assert!((ratio - 1e-2).abs() < 1e-4, "ratio {ratio}");
    }

    #[test]
    fn series_and_direct_agree_at_switch() {
        let dist = SERIES_SWITCH_KR / k();
        for dir in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.6, -0.48, 0.64]] {
            let rho = [dir[0] * dist, dir[1] * dist, dir[2] * dist];
            let rp = Position3::new(rho[0], rho[1], rho[2]).unwrap();
            let direct = im_free_space_green_direct(rp, Position3::ORIGIN, omega());
            let series = im_free_space_green_series(rho, norm(rho), k());
            let err = direct.max_abs_diff(&series) / series.max_abs();
            assert!(err < 1e-10, "direction {dir:?}: {err:e}");
        }
    }

    #[test]
    fn converges_to_coincidence_value() {
        for x in [1e-2, 1e-4, 1e-6] {
            let g = im_free_space_green(Position3::new(x / k(), 0.0, 0.0).unwrap(), Position3::ORIGIN, omega());
            let want = RealTensor3::identity().scale(coincidence_value());
            let rel = g.max_abs_diff(&want) / coincidence_value();
            // leading correction is x²/5 on the transverse entries
            assert!(rel <= 0.2 * x * x * 1.01 + 1e-15, "x = {x}: {rel:e}");
        }
        let g = im_free_space_green(Position3::on_axis(1e-6 / k()), Position3::ORIGIN, omega());
        assert!(g.max_abs_diff(&RealTensor3::identity().scale(coincidence_value())) / coincidence_value() < 1e-9);
    }

    #[test]
    fn reflection_matrix_columns() {
        let r = reflection_matrix();
        assert_eq!(r.apply([0.0, 0.0, 1.0]), [0.0, 0.0, 1.0]);
        assert_eq!(r.apply([1.0, 0.0, 0.0]), [-1.0, 0.0, 0.0]);
        assert_eq!(r * r, RealTensor3::identity());
    }

    #[test]
    fn images() {
        let zb = 1.5e-7;
        assert_eq!(image_position(Position3::on_axis(zb)).unwrap(), Position3::on_axis(-zb));
        let p = Position3::new(1.0, 2.0, 3.0).unwrap();
        assert_eq!(image_position(p).unwrap(), Position3::new(1.0, 2.0, -3.0).unwrap());
        assert_eq!(reflect_point(image_position(p).unwrap()), p);
        assert!(image_position(Position3::on_axis(0.0)).is_err());
        assert!(image_position(Position3::on_axis(-1.0)).is_err());

        assert_eq!(image_dipole(DipoleVector::along_z(2.0)), DipoleVector::along_z(2.0));
        assert_eq!(image_dipole(DipoleVector::along_x(2.0)), DipoleVector::along_x(-2.0));
        assert_eq!(image_dipole(DipoleVector::ZERO).norm(), 0.0);
    }

    #[test]
    fn scattering_near_plate_approaches_reflection() {
        let z = 1e-4 * 2.0 * PI / k();
        let r = Position3::on_axis(z);
        let g1 = im_scattering_green(r, r, omega()).unwrap();
        let want = reflection_matrix().scale(coincidence_value());
        assert!(g1.max_abs_diff(&want) / coincidence_value() < 1e-6);
    }

    #[test]
    fn scattering_entries_at_unit_kr_plus() {
        // z + z' = 1/k, so the image distance has kϱ₊ = 1.
        let r = Position3::on_axis(0.4 / k());
        let rp = Position3::on_axis(0.6 / k());
        let g1 = scattering_green(r, rp, omega()).unwrap();
        assert_relative_eq!(g1[(0, 0)].re, 3_462_105.330_646_809, max_relative = 1e-12);
        assert_relative_eq!(g1[(0, 0)].im, -2_222_992.268_395_2, max_relative = 1e-12);
        assert_relative_eq!(g1[(2, 2)].re, 11_370_195.198_084_02, max_relative = 1e-12);
        assert_relative_eq!(g1[(2, 2)].im, 2_478_226.124_503_217, max_relative = 1e-12);
    }

    #[test]
    fn scattering_vanishes_far_from_plate() {
        let r = Position3::on_axis(1e6 / k());
        let g1 = scattering_green(r, r, omega()).unwrap();
        assert!(g1.max_abs() < 1e-6 * coincidence_value() * 10.0);
    }

    #[test]
    fn scattering_requires_points_above_plate() {
        let below = Position3::on_axis(-1e-9);
        let above = Position3::on_axis(1e-9);
        assert!(scattering_green(above, below, omega()).is_err());
        assert!(scattering_green(Position3::on_axis(0.0), above, omega()).is_err());
    }

    #[test]
    fn total_green_by_environment() {
        let r = Position3::new(1e-8, 0.0, 4e-8).unwrap();
        let rp = Position3::new(0.0, 2e-8, 7e-8).unwrap();
        let free = total_green(Environment::FreeSpace, r, rp, omega()).unwrap();
        assert_eq!(free, free_space_green(r, rp, omega()).unwrap());

        let z = 1e-4 * 2.0 * PI / k();
        let p = Position3::on_axis(z);
        let im = im_total_green(Environment::PerfectMirror, p, p, omega()).unwrap();
        let want = (RealTensor3::identity() + reflection_matrix()).scale(coincidence_value());
        assert!(im.max_abs_diff(&want) / coincidence_value() < 1e-6);
    }
}
