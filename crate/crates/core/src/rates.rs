//! Single-atom, interference and collective Dicke decay rates.
//!
//! Every rate is a contraction of Im G at the transition frequency:
//!
//! ```text
//! Γ_A  = (2μ₀ω₀²/ħ) d_A · Im G(r_A, r_A, ω₀) · d_A
//! Γ_AB = (2μ₀ω₀²/ħ) d_A · Im G(r_A, r_B, ω₀) · d_B
//! Γ±   = (Γ_A + Γ_B)/2 ± Γ_AB
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::green::{im_green_parts, RealTensor3};
use crate::model::constants::{C, EPS0, HBAR, MU0};
use crate::model::{
    check_position, AngularFrequency, DipoleVector, Environment, PairConfig, Position3, RateResult,
};
use crate::green::image_dipole;

/// 2μ₀ω₀²/ħ, converting d·Im G·d (C²m²·1/m) into a rate.
pub fn rate_prefactor(omega0: AngularFrequency) -> f64 {
    2.0 * MU0 * omega0.value().powi(2) / HBAR
}

/// Free-space single-atom rate |d|²ω₀³/(3πε₀ħc³).
pub fn free_space_single_rate(d: DipoleVector, omega0: AngularFrequency) -> f64 {
    d.norm_sqr() * omega0.value().powi(3) / (3.0 * PI * EPS0 * HBAR * C.powi(3))
}

/// (bulk, scattering) contributions to d_a · Im G(r_a, r_b) · d_b, already
/// multiplied by the rate prefactor.
fn contraction_parts(
    env: Environment,
    da: DipoleVector,
    ra: Position3,
    db: DipoleVector,
    rb: Position3,
    omega0: AngularFrequency,
) -> Result<(f64, f64)> {
    let (bulk, scatter) = im_green_parts(env, ra, rb, omega0)?;
    let pref = rate_prefactor(omega0);
    Ok((pref * bulk.contract(da, db), pref * scatter.contract(da, db)))
}

pub fn single_atom_rate(
    d: DipoleVector,
    r: Position3,
    omega0: AngularFrequency,
    env: Environment,
) -> Result<f64> {
    let (bulk, scatter) = contraction_parts(env, d, r, d, r, omega0)?;
    Ok(bulk + scatter)
}

/// Signed interference rate between two distinct atoms.
pub fn interference_rate(
    da: DipoleVector,
    db: DipoleVector,
    ra: Position3,
    rb: Position3,
    omega0: AngularFrequency,
    env: Environment,
) -> Result<f64> {
    if ra == rb {
        return Err(Error::CoincidentAtoms);
    }
    let (bulk, scatter) = contraction_parts(env, da, ra, db, rb, omega0)?;
    Ok(bulk + scatter)
}

fn ratio_or_nan(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::NAN
    }
}

/// Collective decay rate of the Dicke state described by `cfg`.
pub fn collective_rate(cfg: &PairConfig) -> Result<RateResult> {
    cfg.validate()?;
    let env = cfg.environment;
    let (a, b) = (cfg.atom_a, cfg.atom_b);
    let w = cfg.omega0;

    let (aa_bulk, aa_scatter) = contraction_parts(env, a.dipole, a.position, a.dipole, a.position, w)?;
    let (bb_bulk, bb_scatter) = contraction_parts(env, b.dipole, b.position, b.dipole, b.position, w)?;
    let (ab_bulk, ab_scatter) = contraction_parts(env, a.dipole, a.position, b.dipole, b.position, w)?;

    let sign = cfg.parity.sign();
    let gamma_a = aa_bulk + aa_scatter;
    let gamma_b = bb_bulk + bb_scatter;
    let gamma_ab = ab_bulk + ab_scatter;
    let gamma_total = 0.5 * (gamma_a + gamma_b) + sign * gamma_ab;
    let gamma_bulk = 0.5 * (aa_bulk + bb_bulk) + sign * ab_bulk;
    let gamma_scatter = 0.5 * (aa_scatter + bb_scatter) + sign * ab_scatter;

    let free_a = free_space_single_rate(a.dipole, w);
    let free_b = free_space_single_rate(b.dipole, w);

    Ok(RateResult {
        parity: cfg.parity,
        gamma_total,
        gamma_a,
        gamma_b,
        gamma_ab,
        gamma_bulk,
        gamma_scatter,
        scaled_pair_sum: ratio_or_nan(gamma_total, free_a + free_b),
        scaled_single: ratio_or_nan(gamma_total, free_a),
    })
}

/// Closed-form free-space interference rate for atoms separated by z
/// along the z axis (r_A − r_B = z ẑ), with λ = zω₀/c:
///
/// ```text
/// Γ_AB = [(d_A·d_B − 3d_Az d_Bz)(λ cos λ − sin λ)
///         + (d_A·d_B − d_Az d_Bz) λ² sin λ] / (2πε₀ħz³)
/// ```
pub fn free_space_interference_closed_form(
    da: DipoleVector,
    db: DipoleVector,
    z: f64,
    omega0: AngularFrequency,
) -> Result<f64> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::OutOfDomain { field: "z", value: z, requirement: "a positive separation" });
    }
    let lam = z * omega0.wavenumber();
    let (s, c) = lam.sin_cos();
    let dot = da.dot(db);
    let zz = da.z * db.z;
    let bracket = (dot - 3.0 * zz) * (lam * c - s) + (dot - zz) * lam * lam * s;
    Ok(bracket / (2.0 * PI * EPS0 * HBAR * z.powi(3)))
}

/// Limiting regime for the distance-independent asymptotic rates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymptoticRegime {
    /// Every distance (separation, heights, image distance) ≪ c/ω₀.
    NonRetarded,
    /// Separation ≫ c/ω₀. Above the mirror atom B is taken to stay close
    /// to the plate while atom A recedes.
    Retarded,
}

/// Analytic limit of the collective rate, built only from dipole and
/// image-dipole dot products.
pub fn asymptotic_rate(regime: AsymptoticRegime, cfg: &PairConfig) -> f64 {
    let w = cfg.omega0.value();
    let base = MU0 * w.powi(3) / (6.0 * PI * C * HBAR);
    let s = cfg.parity.sign();
    let da = cfg.atom_a.dipole;
    let db = cfg.atom_b.dipole;
    let da_img = image_dipole(da);
    let db_img = image_dipole(db);

    let bracket = match (cfg.environment, regime) {
        (Environment::FreeSpace, AsymptoticRegime::NonRetarded) => {
            da.dot(da) + db.dot(db) + 2.0 * s * da.dot(db)
        }
        (Environment::FreeSpace, AsymptoticRegime::Retarded) => da.dot(da) + db.dot(db),
        (Environment::PerfectMirror, AsymptoticRegime::NonRetarded) => {
            da.dot(da) + da.dot(da_img) + db.dot(db) + db.dot(db_img)
                + 2.0 * s * (da.dot(db) + da.dot(db_img))
        }
        (Environment::PerfectMirror, AsymptoticRegime::Retarded) => {
            da.dot(da) + db.dot(db) + db.dot(db_img)
        }
    };
    base * bracket
}

/// Probability |C_i(t)|² = exp(−Γt) of still finding the initial state.
pub fn survival_probability(gamma: f64, t: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::OutOfDomain { field: "gamma", value: gamma, requirement: "non-negative" });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::OutOfDomain { field: "t", value: t, requirement: "non-negative" });
    }
    Ok((-gamma * t).exp())
}

/// Free-space interference contraction d_a · Im G⁰(r_a, r_b) · d_b times
/// the rate prefactor, allowing r_b anywhere (used with image points
/// below the plate).
pub fn free_space_contraction(
    da: DipoleVector,
    ra: Position3,
    db: DipoleVector,
    rb: Position3,
    omega0: AngularFrequency,
) -> Result<f64> {
    check_position("ra", ra, Environment::FreeSpace)?;
    check_position("rb", rb, Environment::FreeSpace)?;
    let g: RealTensor3 = crate::green::im_free_space_green(ra, rb, omega0);
    Ok(rate_prefactor(omega0) * g.contract(da, db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{transition_wavelength, Atom, DickeParity};
    use approx::assert_relative_eq;

    const D: f64 = 1e-29;

    fn w() -> AngularFrequency {
        AngularFrequency::HYDROGEN_LYMAN_ALPHA
    }

    fn lam0() -> f64 {
        transition_wavelength(w().value()).unwrap()
    }

    fn pair(env: Environment, parity: DickeParity, za: f64, zb: f64, d: DipoleVector) -> PairConfig {
        PairConfig::new(
            Atom::new(Position3::on_axis(za), d),
            Atom::new(Position3::on_axis(zb), d),
            w(),
            parity,
            env,
        )
        .unwrap()
    }

    #[test]
    fn free_single_rate_matches_closed_form() {
        let d = DipoleVector::new(0.3e-29, -0.5e-29, 0.8e-29).unwrap();
        let r = Position3::new(1.0, 2.0, 3.0).unwrap();
        let g = single_atom_rate(d, r, w(), Environment::FreeSpace).unwrap();
        assert_relative_eq!(g, free_space_single_rate(d, w()), max_relative = 1e-12);
    }

    #[test]
    fn mirror_single_rate_near_plate() {
        let free = free_space_single_rate(DipoleVector::along_z(D), w());
        let r = Position3::on_axis(1e-3 * lam0());
        let perp = single_atom_rate(DipoleVector::along_z(D), r, w(), Environment::PerfectMirror).unwrap();
        assert_relative_eq!(perp, 2.0 * free, max_relative = 1e-3);
        let par = single_atom_rate(DipoleVector::along_x(D), r, w(), Environment::PerfectMirror).unwrap();
        assert!(par.abs() < 1e-3 * free, "{par}");
        assert!(par >= 0.0);
    }

    #[test]
    fn interference_limits() {
        let ga = free_space_single_rate(DipoleVector::along_x(D), w());
        let ra = Position3::on_axis(1e-6 * lam0());
        let near = interference_rate(
            DipoleVector::along_x(D),
            DipoleVector::along_x(D),
            ra,
            Position3::ORIGIN,
            w(),
            Environment::FreeSpace,
        )
        .unwrap();
        assert_relative_eq!(near, ga, max_relative = 1e-9);

        let ortho = interference_rate(
            DipoleVector::along_x(D),
            DipoleVector::along_y(D),
            Position3::on_axis(0.37 * lam0()),
            Position3::ORIGIN,
            w(),
            Environment::FreeSpace,
        )
        .unwrap();
        assert_eq!(ortho, 0.0);
    }

    #[test]
    fn axial_interference_at_half_wavelength() {
        // kϱ = π: 3/π² for dipoles along the separation
        let rho = PI / w().wavenumber();
        let d = DipoleVector::along_z(D);
        let gab = interference_rate(d, d, Position3::on_axis(rho), Position3::ORIGIN, w(), Environment::FreeSpace)
            .unwrap();
        let ga = free_space_single_rate(d, w());
        assert_relative_eq!(gab / ga, 0.303_963_550_927_013_3, max_relative = 1e-12);
    }

    #[test]
    fn coincident_atoms_rejected() {
        let d = DipoleVector::along_z(D);
        let r = Position3::on_axis(1e-9);
        assert!(matches!(
            interference_rate(d, d, r, r, w(), Environment::FreeSpace),
            Err(Error::CoincidentAtoms)
        ));
    }

    #[test]
    fn closed_form_examples() {
        let k = w().wavenumber();
        let dz = DipoleVector::along_z(D);
        let dx = DipoleVector::along_x(D);
        let ga = free_space_single_rate(dz, w());

        let near = free_space_interference_closed_form(dz, dz, 1e-3 / k, w()).unwrap();
        assert_relative_eq!(near / ga, 1.0, max_relative = 1e-6);

        for z in [0.1, 1.0, 7.3, 40.0] {
            let v = free_space_interference_closed_form(dx, DipoleVector::along_y(D), z / k, w()).unwrap();
            assert_eq!(v, 0.0);
        }

        let at_pi = free_space_interference_closed_form(dx, dx, PI / k, w()).unwrap();
        assert_relative_eq!(at_pi / ga, -0.151_981_775_463_506_66, max_relative = 1e-12);

        assert!(free_space_interference_closed_form(dz, dz, 0.0, w()).is_err());
        assert!(free_space_interference_closed_form(dz, dz, -1.0, w()).is_err());
    }

    #[test]
    fn collective_free_space_limits() {
        let d = DipoleVector::along_x(D);
        let near = 1e-3 * lam0();
        let sym = collective_rate(&pair(Environment::FreeSpace, DickeParity::Symmetric, near, 0.0, d)).unwrap();
        assert_relative_eq!(sym.gamma_total, sym.gamma_a + sym.gamma_b, max_relative = 1e-3);
        assert_relative_eq!(sym.scaled_pair_sum, 1.0, max_relative = 1e-3);

        let anti =
            collective_rate(&pair(Environment::FreeSpace, DickeParity::Antisymmetric, near, 0.0, d)).unwrap();
        assert!(anti.scaled_pair_sum < 1e-3 && anti.scaled_pair_sum >= 0.0);

        let far = collective_rate(&pair(Environment::FreeSpace, DickeParity::Symmetric, 100.0 * lam0(), 0.0, d))
            .unwrap();
        assert!((far.scaled_pair_sum - 0.5).abs() < 0.01);
        assert_relative_eq!(far.scaled_single, 2.0 * far.scaled_pair_sum, max_relative = 1e-14);
        assert_eq!(far.gamma_scatter, 0.0);
        assert_eq!(far.gamma_bulk, far.gamma_total);
    }

    #[test]
    fn decomposition_holds() {
        let d = DipoleVector::new(0.2e-29, 0.4e-29, -0.9e-29).unwrap();
        for parity in [DickeParity::Symmetric, DickeParity::Antisymmetric] {
            let r = collective_rate(&pair(Environment::PerfectMirror, parity, 3.1e-8, 1.7e-8, d)).unwrap();
            assert!(r.decomposition_residual() < 1e-12);
            assert_relative_eq!(r.gamma_bulk + r.gamma_scatter, r.gamma_total, max_relative = 1e-12);
            assert!(r.is_physical());
        }
    }

    #[test]
    fn zero_dipoles_give_nan_scaling() {
        let r = collective_rate(&pair(Environment::FreeSpace, DickeParity::Symmetric, 2e-9, 1e-9, DipoleVector::ZERO))
            .unwrap();
        assert_eq!(r.gamma_total, 0.0);
        assert!(r.scaled_pair_sum.is_nan() && r.scaled_single.is_nan());
    }

    #[test]
    fn asymptotic_examples() {
        let dz = DipoleVector::along_z(D);
        let dx = DipoleVector::along_x(D);
        let ga = free_space_single_rate(dz, w());
        let sym = DickeParity::Symmetric;

        let nret_z = asymptotic_rate(AsymptoticRegime::NonRetarded, &pair(Environment::PerfectMirror, sym, 2e-9, 1e-9, dz));
        assert_relative_eq!(nret_z, 4.0 * ga, max_relative = 1e-14);

        let nret_x = asymptotic_rate(AsymptoticRegime::NonRetarded, &pair(Environment::PerfectMirror, sym, 2e-9, 1e-9, dx));
        assert_eq!(nret_x, 0.0);

        let ret_z = asymptotic_rate(AsymptoticRegime::Retarded, &pair(Environment::PerfectMirror, sym, 1e-5, 1e-9, dz));
        assert_relative_eq!(ret_z, 1.5 * ga, max_relative = 1e-14);

        let free = asymptotic_rate(AsymptoticRegime::NonRetarded, &pair(Environment::FreeSpace, sym, 2e-9, 1e-9, dx));
        assert_relative_eq!(free, 2.0 * ga, max_relative = 1e-14);
        let free_anti = asymptotic_rate(
            AsymptoticRegime::NonRetarded,
            &pair(Environment::FreeSpace, DickeParity::Antisymmetric, 2e-9, 1e-9, dx),
        );
        assert_eq!(free_anti, 0.0);
        let free_ret = asymptotic_rate(AsymptoticRegime::Retarded, &pair(Environment::FreeSpace, sym, 1e-5, 1e-9, dx));
        assert_relative_eq!(free_ret, ga, max_relative = 1e-14);
    }

    #[test]
    fn asymptotics_match_exact_rates() {
        let dz = DipoleVector::along_z(D);
        let sym = DickeParity::Symmetric;
        let cfg = pair(Environment::PerfectMirror, sym, 2e-3 * lam0(), 1e-3 * lam0(), dz);
        let exact = collective_rate(&cfg).unwrap().gamma_total;
        assert_relative_eq!(exact, asymptotic_rate(AsymptoticRegime::NonRetarded, &cfg), max_relative = 1e-3);

        let cfg = pair(Environment::PerfectMirror, sym, 100.0 * lam0(), 1e-9, dz);
        let exact = collective_rate(&cfg).unwrap().gamma_total;
        assert_relative_eq!(exact, asymptotic_rate(AsymptoticRegime::Retarded, &cfg), max_relative = 1e-2);
    }

    #[test]
    fn survival() {
        assert_eq!(survival_probability(3.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(survival_probability(4.0, 0.25).unwrap(), (-1.0_f64).exp(), max_relative = 1e-15);
        let cfg = pair(Environment::FreeSpace, DickeParity::Symmetric, 1e-3 * lam0(), 0.0, DipoleVector::along_z(D));
        let g = collective_rate(&cfg).unwrap().gamma_total;
        assert_relative_eq!(survival_probability(g, 2f64.ln() / g).unwrap(), 0.5, max_relative = 1e-14);
        assert!(survival_probability(-1.0, 1.0).is_err());
        assert!(survival_probability(1.0, -1.0).is_err());
    }
}
