//! Randomized consistency suites behind the `validate` subcommand.
//!
//! Each suite compares two routes to the same quantity and records the
//! largest discrepancy it saw.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::green::{free_space_green, im_free_space_green, image_dipole, image_position, RealTensor3};
use crate::model::constants::{C, E_A0};
use crate::model::{
    transition_wavelength, AngularFrequency, Atom, DickeParity, DipoleVector, Environment, PairConfig, Position3,
};
use crate::oracle::{mode_sum_im_green, pair_emitters, phase_extent, radiated_power_rate, QuadratureSpec};
use crate::rates::{
    collective_rate, free_space_contraction, free_space_interference_closed_form, free_space_single_rate,
    interference_rate,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    fn new(name: &'static str, samples: usize, max_error: f64, tolerance: f64) -> Self {
        Self { name, samples, max_error, tolerance, passed: max_error <= tolerance }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationOptions {
    pub seed: u64,
    /// Multiplies every suite's sample count (1.0 = full run).
    pub sample_scale: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { seed: 0x5eed_d1c4e, sample_scale: 1.0 }
    }
}

impl ValidationOptions {
    fn count(&self, full: usize) -> usize {
        ((full as f64 * self.sample_scale).round() as usize).max(1)
    }
}

fn omega() -> AngularFrequency {
    AngularFrequency::HYDROGEN_LYMAN_ALPHA
}

pub fn random_unit<R: Rng>(rng: &mut R) -> [f64; 3] {
    let u: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let s = (1.0 - u * u).sqrt();
    [s * phi.cos(), s * phi.sin(), u]
}

fn random_dipole<R: Rng>(rng: &mut R) -> DipoleVector {
    let n = random_unit(rng);
    DipoleVector::from_array(n) * E_A0
}

/// Random pair with kϱ in `kr_range` and both heights in
/// [1e−3, 10]λ₀ (log-uniform), random orientations and parity.
pub fn random_pair_config<R: Rng>(rng: &mut R, env: Environment, kr_range: (f64, f64)) -> PairConfig {
    let w = omega();
    let k = w.wavenumber();
    let lam0 = transition_wavelength(w.value()).expect("positive frequency");
    let (zmin, zmax) = (1e-3 * lam0, 10.0 * lam0);
    loop {
        let zb = (rng.gen_range(zmin.ln()..zmax.ln())).exp();
        let rho = rng.gen_range(kr_range.0..kr_range.1) / k;
        let n = random_unit(rng);
        let ra = Position3 { x: rho * n[0], y: rho * n[1], z: zb + rho * n[2] };
        if !(zmin..=zmax).contains(&ra.z) {
            continue;
        }
        let parity = if rng.gen_bool(0.5) { DickeParity::Symmetric } else { DickeParity::Antisymmetric };
        let cfg = PairConfig::new(
            Atom::new(ra, random_dipole(rng)),
            Atom::new(Position3::on_axis(zb), random_dipole(rng)),
            w,
            parity,
            env,
        );
        if let Ok(cfg) = cfg {
            return cfg;
        }
    }
}

fn coincidence_checks() -> Vec<CheckReport> {
    let w = omega();
    let want = w.value() / (6.0 * PI * C);
    let iso = RealTensor3::identity().scale(want);
    let r = Position3::on_axis(3.3e-8);
    let analytic = im_free_space_green(r, r, w).max_abs_diff(&iso) / want;
    let mode_sum = mode_sum_im_green(r, r, w, &QuadratureSpec::default()).max_abs_diff(&iso) / want;
    vec![
        CheckReport::new("coincidence_limit", 1, analytic, 1e-12),
        CheckReport::new("mode_sum_coincidence", 1, mode_sum, 1e-8),
    ]
}

fn transposition_symmetry<R: Rng>(rng: &mut R, n: usize) -> CheckReport {
    let mut worst = 0.0_f64;
    for _ in 0..n {
        let scale = 10f64.powf(rng.gen_range(-9.0..-5.0));
        let r = Position3::new(rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale)
            .unwrap();
        let rp = Position3::new(rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale)
            .unwrap();
        let w = AngularFrequency::new(10f64.powf(rng.gen_range(14.0..17.0))).unwrap();
        let (Ok(g), Ok(gt)) = (free_space_green(r, rp, w), free_space_green(rp, r, w)) else { continue };
        let gt = gt.transpose();
        let mut diff = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                diff = diff.max((g[(i, j)] - gt[(i, j)]).norm());
            }
        }
        worst = worst.max(diff / g.max_abs());
    }
    CheckReport::new("transposition_symmetry", n, worst, 1e-12)
}

fn mode_sum_agreement<R: Rng>(rng: &mut R, n: usize) -> CheckReport {
    let w = omega();
    let k = w.wavenumber();
    let want = w.value() / (6.0 * PI * C);
    let mut worst = 0.0_f64;
    for _ in 0..n {
        let x = rng.gen_range(0.1..30.0);
        let e = random_unit(rng);
        let r = Position3::new(e[0] * x / k, e[1] * x / k, e[2] * x / k).unwrap();
        let quad = QuadratureSpec::resolving(x);
        let g = mode_sum_im_green(r, Position3::ORIGIN, w, &quad);
        worst = worst.max(g.max_abs_diff(&im_free_space_green(r, Position3::ORIGIN, w)) / want);
    }
    CheckReport::new("mode_sum_vs_analytic", n, worst, 1e-8)
}

fn closed_form_equivalence<R: Rng>(rng: &mut R, n: usize) -> CheckReport {
    let w = omega();
    let k = w.wavenumber();
    let mut worst = 0.0_f64;
    for _ in 0..n {
        let da = random_dipole(rng);
        let db = random_dipole(rng);
        let z = rng.gen_range(0.05..50.0) / k;
        let closed = free_space_interference_closed_form(da, db, z, w).unwrap();
        let path = interference_rate(da, db, Position3::on_axis(z), Position3::ORIGIN, w, Environment::FreeSpace).unwrap();
        worst = worst.max((closed - path).abs() / free_space_single_rate(da, w));
    }
    CheckReport::new("closed_form_vs_contraction", n, worst, 1e-10)
}

fn rate_identities<R: Rng>(rng: &mut R, n: usize) -> Vec<CheckReport> {
    let w = omega();
    let (mut sum_rule, mut negativity, mut images) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..n {
        let env = if i % 2 == 0 { Environment::FreeSpace } else { Environment::PerfectMirror };
        let cfg = random_pair_config(rng, env, (0.01, 60.0));
        let plus = collective_rate(&cfg.with_parity(DickeParity::Symmetric)).unwrap();
        let minus = collective_rate(&cfg.with_parity(DickeParity::Antisymmetric)).unwrap();
        let pair = plus.gamma_a + plus.gamma_b;
        sum_rule = sum_rule.max((plus.gamma_total + minus.gamma_total - pair).abs() / pair);
        negativity = negativity.max(-plus.gamma_total.min(minus.gamma_total) / pair);

        if env == Environment::PerfectMirror {
            let (a, b) = (cfg.atom_a, cfg.atom_b);
            let img = |atom: Atom| (image_dipole(atom.dipole), image_position(atom.position).unwrap());
            let (da_i, ra_i) = img(a);
            let (db_i, rb_i) = img(b);
            let aa = free_space_contraction(a.dipole, a.position, da_i, ra_i, w).unwrap();
            let bb = free_space_contraction(b.dipole, b.position, db_i, rb_i, w).unwrap();
            let ab = free_space_contraction(a.dipole, a.position, db_i, rb_i, w).unwrap();
            let want = 0.5 * (aa + bb) + cfg.parity.sign() * ab;
            let got = collective_rate(&cfg).unwrap().gamma_scatter;
            images = images.max((got - want).abs() / pair);
        }
    }
    vec![
        CheckReport::new("sum_rule", n, sum_rule, 1e-12),
        CheckReport::new("positivity", n, negativity.max(0.0), 1e-12),
        CheckReport::new("mirror_as_images", n / 2, images, 1e-12),
    ]
}

fn radiated_power_agreement<R: Rng>(rng: &mut R, n: usize) -> CheckReport {
    let mut worst = 0.0_f64;
    for i in 0..n {
        let env = if i % 2 == 0 { Environment::FreeSpace } else { Environment::PerfectMirror };
        let cfg = random_pair_config(rng, env, (0.1, 30.0));
        let quad = QuadratureSpec::resolving(phase_extent(&pair_emitters(&cfg), env, cfg.omega0));
        let oracle = radiated_power_rate(&cfg, &quad);
        let exact = collective_rate(&cfg).unwrap().gamma_total;
        worst = worst.max((oracle - exact).abs() / exact.abs());
    }
    CheckReport::new("radiated_power_vs_collective", n, worst, 1e-6)
}

fn far_zone_decoupling<R: Rng>(rng: &mut R, n: usize) -> CheckReport {
    let w = omega();
    let lam0 = transition_wavelength(w.value()).unwrap();
    let mut worst = 0.0_f64;
    for _ in 0..n {
        let zb = rng.gen_range(50.0..80.0) * lam0;
        let rho = rng.gen_range(0.05..3.0) * lam0;
        let e = random_unit(rng);
        let ra = Position3 { x: rho * e[0], y: rho * e[1], z: zb + rho * e[2] };
        let d = random_dipole(rng);
        let cfg = PairConfig::new(
            Atom::new(ra, d),
            Atom::new(Position3::on_axis(zb), d),
            w,
            DickeParity::Symmetric,
            Environment::PerfectMirror,
        )
        .unwrap();
        let mirror = collective_rate(&cfg).unwrap();
        let free = collective_rate(&cfg.with_environment(Environment::FreeSpace)).unwrap();
        let scale = free.gamma_a + free.gamma_b;
        worst = worst.max((mirror.gamma_total - free.gamma_total).abs() / scale);
    }
    CheckReport::new("far_zone_mirror_decoupling", n, worst, 1e-2)
}

/// Runs every suite with a fixed seed.
pub fn run_validation(opts: &ValidationOptions) -> Vec<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut reports = coincidence_checks();
    reports.push(transposition_symmetry(&mut rng, opts.count(1000)));
    reports.push(mode_sum_agreement(&mut rng, opts.count(50)));
    reports.push(closed_form_equivalence(&mut rng, opts.count(1000)));
    reports.extend(rate_identities(&mut rng, opts.count(400)));
    reports.push(radiated_power_agreement(&mut rng, opts.count(200)));
    reports.push(far_zone_decoupling(&mut rng, opts.count(100)));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_validation_passes() {
        let reports = run_validation(&ValidationOptions { sample_scale: 0.05, ..Default::default() });
        for r in &reports {
            assert!(r.passed, "{} failed: {:e} > {:e}", r.name, r.max_error, r.tolerance);
        }
    }

    #[test]
    fn random_configs_respect_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let lam0 = transition_wavelength(omega().value()).unwrap();
        let k = omega().wavenumber();
        for _ in 0..200 {
            let cfg = random_pair_config(&mut rng, Environment::PerfectMirror, (0.1, 30.0));
            let kr = k * cfg.separation();
            assert!((0.1..30.0 * (1.0 + 1e-12)).contains(&kr));
            for z in [cfg.atom_a.position.z, cfg.atom_b.position.z] {
                assert!(z >= 1e-3 * lam0 * (1.0 - 1e-12) && z <= 10.0 * lam0 * (1.0 + 1e-12));
            }
        }
    }
}
