//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Sweeps come back as flat `Float64Array`s, one row after another, so the
//! page can plot them without any JSON round trip.

use collective_decay::rates::collective_rate;
use collective_decay::scenarios::{figure_preset, run_figure, FigureId, Orientation, PresetOptions};
use collective_decay::{
    transition_wavelength, AngularFrequency, Atom, DickeParity, DipoleVector, Environment, PairConfig, Position3,
};
use wasm_bindgen::prelude::*;

const MIRROR_CURVES: [&str; 4] = ["mirror_zz", "free_zz", "mirror_xx", "free_xx"];

fn parity(symmetric: bool) -> DickeParity {
    if symmetric {
        DickeParity::Symmetric
    } else {
        DickeParity::Antisymmetric
    }
}

fn interleave(xs: &[f64], columns: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len() * (columns.len() + 1));
    for (i, x) in xs.iter().enumerate() {
        out.push(*x);
        out.extend(columns.iter().map(|c| c[i]));
    }
    out
}

/// Rows of (z_A, mirror zz, free zz, mirror xx, free xx), scaled by the
/// free-space single-atom rate, for atom B held at `z_b`.
pub fn mirror_sweep_rows(z_b: f64, samples: usize, symmetric: bool) -> Result<Vec<f64>, String> {
    let opts = PresetOptions { samples, ..Default::default() };
    let id = if symmetric { FigureId::Fig3 } else { FigureId::Fig6 };
    let mut preset = figure_preset(id, &opts).map_err(|e| e.to_string())?;
    let lam0 = transition_wavelength(opts.omega0.value()).map_err(|e| e.to_string())?;
    for curve in &mut preset.curves {
        let b = curve.sweep.template.atom_b;
        curve.sweep.template.atom_b = Atom::new(Position3::new(b.position.x, b.position.y, z_b).map_err(|e| e.to_string())?, b.dipole);
        curve.sweep.min = z_b + 1e-9;
        curve.sweep.max = curve.sweep.max.max(z_b + lam0);
    }
    let data = run_figure(&preset).map_err(|e| e.to_string())?;
    let first = data.table(MIRROR_CURVES[0]).ok_or("missing curve")?;
    let xs: Vec<f64> = first.rows.iter().map(|r| r.abscissa).collect();
    let columns: Vec<Vec<f64>> =
        MIRROR_CURVES.iter().map(|l| data.table(l).map(|t| t.scaled()).unwrap_or_default()).collect();
    Ok(interleave(&xs, &columns))
}

/// Rows of (ϱ, symmetric, antisymmetric) in free space, scaled by the
/// pair sum of single-atom rates.
pub fn pair_sweep_rows(samples: usize, axial: bool) -> Result<Vec<f64>, String> {
    let orientation = if axial { Orientation::Zz } else { Orientation::Xx };
    let opts = PresetOptions { samples, fig1_orientation: orientation, ..Default::default() };
    let data = run_figure(&figure_preset(FigureId::Fig1, &opts).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let sym = data.table("symmetric").ok_or("missing curve")?;
    let anti = data.table("antisymmetric").ok_or("missing curve")?;
    let xs: Vec<f64> = sym.rows.iter().map(|r| r.abscissa).collect();
    Ok(interleave(&xs, &[sym.scaled(), anti.scaled()]))
}

/// Rate breakdown for one configuration as aligned text.
pub fn rate_text(mirror: bool, z_a: f64, z_b: f64, axial: bool, symmetric: bool) -> Result<String, String> {
    let env = if mirror { Environment::PerfectMirror } else { Environment::FreeSpace };
    let omega0 = AngularFrequency::HYDROGEN_LYMAN_ALPHA;
    let orientation = if axial { Orientation::Zz } else { Orientation::Xx };
    let (da, db): (DipoleVector, DipoleVector) = orientation.dipoles(collective_decay::model::constants::E_A0);
    let at = |z: f64| Position3::new(0.0, 0.0, z).map_err(|e| e.to_string());
    let cfg = PairConfig::new(Atom::new(at(z_a)?, da), Atom::new(at(z_b)?, db), omega0, parity(symmetric), env)
        .map_err(|e| e.to_string())?;
    let r = collective_rate(&cfg).map_err(|e| e.to_string())?;
    let rows = [
        ("Γ", format!("{:.6e} s⁻¹", r.gamma_total)),
        ("Γ_A", format!("{:.6e} s⁻¹", r.gamma_a)),
        ("Γ_B", format!("{:.6e} s⁻¹", r.gamma_b)),
        ("Γ_AB", format!("{:.6e} s⁻¹", r.gamma_ab)),
        ("bulk", format!("{:.6e} s⁻¹", r.gamma_bulk)),
        ("scattered", format!("{:.6e} s⁻¹", r.gamma_scatter)),
        ("Γ/ΣΓ free", format!("{:.6}", r.scaled_pair_sum)),
        ("Γ/Γ_A free", format!("{:.6}", r.scaled_single)),
    ];
    Ok(rows.iter().map(|(k, v)| format!("{k:<12}{v}")).collect::<Vec<_>>().join("\n"))
}

#[wasm_bindgen]
pub fn mirror_sweep(z_b: f64, samples: usize, symmetric: bool) -> Result<Vec<f64>, JsError> {
    mirror_sweep_rows(z_b, samples, symmetric).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn pair_sweep(samples: usize, axial: bool) -> Result<Vec<f64>, JsError> {
    pair_sweep_rows(samples, axial).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn rate(mirror: bool, z_a: f64, z_b: f64, axial: bool, symmetric: bool) -> Result<String, JsError> {
    rate_text(mirror, z_a, z_b, axial, symmetric).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn wavelength() -> f64 {
    transition_wavelength(AngularFrequency::HYDROGEN_LYMAN_ALPHA.value()).unwrap_or(f64::NAN)
}
