//! Parameter sweeps, figure presets and their CSV/SVG output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::constants::E_A0;
use crate::model::{
    transition_wavelength, AngularFrequency, Atom, DickeParity, DipoleVector, Environment, PairConfig,
    Position3, RateResult,
};
use crate::rates::collective_rate;

/// Header of the per-curve CSV format.
pub const CSV_HEADER: &str = "z_A_m,gamma_total_si,gamma_A_si,gamma_B_si,gamma_AB_si,gamma_bulk_si,gamma_scatter_si,scaled_pair_sum,scaled_single";

/// Smallest atom–atom and atom–plate spacing used by the presets (10 Å).
pub const MIN_SPACING: f64 = 1e-9;

/// Default number of samples per curve.
pub const DEFAULT_SAMPLES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    /// Height z_A of atom A above the plate; atom B stays where the template puts it.
    AtomAHeight,
    /// Separation ϱ, with atom A placed at r_B + ϱ ẑ.
    Separation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Dipole orientation pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Orientation {
    /// Both dipoles along ẑ (perpendicular to the plate, along the separation).
    Zz,
    /// Both dipoles along x̂ (parallel to the plate, across the separation).
    Xx,
    /// Explicit vectors, used as given.
    Custom(DipoleVector, DipoleVector),
}

impl Orientation {
    pub fn dipoles(&self, magnitude: f64) -> (DipoleVector, DipoleVector) {
        match *self {
            Orientation::Zz => (DipoleVector::along_z(magnitude), DipoleVector::along_z(magnitude)),
            Orientation::Xx => (DipoleVector::along_x(magnitude), DipoleVector::along_x(magnitude)),
            Orientation::Custom(a, b) => (a, b),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Orientation::Zz => "zz",
            Orientation::Xx => "xx",
            Orientation::Custom(..) => "custom",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// Γ / (Γ_A,free + Γ_B,free): independent atoms in free space give ½.
    PairSum,
    /// Γ / Γ_A,free: independent atoms in free space give 1.
    SingleAtom,
}

impl Normalization {
    pub fn pick(self, r: &RateResult) -> f64 {
        match self {
            Normalization::PairSum => r.scaled_pair_sum,
            Normalization::SingleAtom => r.scaled_single,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Normalization::PairSum => "pair_sum",
            Normalization::SingleAtom => "single_atom",
        }
    }

    pub fn axis_label(self) -> &'static str {
        match self {
            Normalization::PairSum => "Γ / (Γ_A + Γ_B) free",
            Normalization::SingleAtom => "Γ / Γ_A free",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
    /// Supplies atom B, ω₀, parity and environment. Atom A's position is
    /// replaced at every sample.
    pub template: PairConfig,
    pub orientation: Orientation,
    /// Magnitude for the `Zz`/`Xx` orientations, C·m.
    pub dipole_magnitude: f64,
    pub normalization: Normalization,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::config("range", "bounds must be finite"));
        }
        if !(self.min > 0.0) {
            return Err(Error::config("min", format!("must be positive, got {}", self.min)));
        }
        if !(self.max > self.min) {
            return Err(Error::config("max", format!("must exceed min ({} <= {})", self.max, self.min)));
        }
        if self.count < 2 {
            return Err(Error::config("count", format!("need at least 2 samples, got {}", self.count)));
        }
        if self.parameter == SweepParameter::AtomAHeight && self.min <= self.template.atom_b.position.z {
            return Err(Error::config(
                "min",
                format!("z_A must start above z_B = {}", self.template.atom_b.position.z),
            ));
        }
        Ok(())
    }

    pub fn abscissae(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }

    /// Configuration at one abscissa value.
    pub fn config_at(&self, value: f64) -> Result<PairConfig> {
        let (da, db) = self.orientation.dipoles(self.dipole_magnitude);
        let rb = self.template.atom_b.position;
        let ra = match self.parameter {
            SweepParameter::AtomAHeight => Position3 { z: value, ..rb },
            SweepParameter::Separation => Position3 { z: rb.z + value, ..rb },
        };
        PairConfig::new(
            Atom::new(ra, da),
            Atom::new(rb, db),
            self.template.omega0,
            self.template.parity,
            self.template.environment,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    /// Value of the swept parameter, m.
    pub abscissa: f64,
    /// Height of atom A, m.
    pub z_a: f64,
    pub result: RateResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub normalization: Normalization,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn scaled(&self) -> Vec<f64> {
        self.rows.iter().map(|r| self.normalization.pick(&r.result)).collect()
    }
}

/// Evaluates every sample of the sweep. Points are computed in parallel and
/// returned in abscissa order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let rows = spec
        .abscissae()
        .into_par_iter()
        .map(|x| {
            let cfg = spec.config_at(x)?;
            Ok(SweepRow { abscissa: x, z_a: cfg.atom_a.position.z, result: collective_rate(&cfg)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { normalization: spec.normalization, rows })
}

/// Mean of |a − b| over matching rows, using each table's normalization.
pub fn mean_abs_deviation(a: &SweepTable, b: &SweepTable) -> f64 {
    let (sa, sb) = (a.scaled(), b.scaled());
    let n = sa.len().min(sb.len());
    sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).sum::<f64>() / n as f64
}

/// 17 significant digits, `.` separator; NaN for undefined values.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn csv_string(table: &SweepTable) -> String {
    let mut out = String::with_capacity(64 + 200 * table.rows.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        let r = &row.result;
        let fields = [
            row.z_a,
            r.gamma_total,
            r.gamma_a,
            r.gamma_b,
            r.gamma_ab,
            r.gamma_bulk,
            r.gamma_scatter,
            r.scaled_pair_sum,
            r.scaled_single,
        ];
        let line = fields.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(",");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Writes to a sibling temporary file and renames it into place, so a
/// failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::io(path, std::io::Error::new(std::io::ErrorKind::InvalidInput, "not a file path")))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp: PathBuf = path.with_file_name(tmp_name);
    if let Err(e) = fs::write(&tmp, contents) {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<()> {
    write_atomic(path, csv_string(table).as_bytes())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineStyle {
    Continuous,
    Dashed,
    Dotted,
    DotDashed,
}

impl LineStyle {
    fn dasharray(self) -> Option<&'static str> {
        match self {
            LineStyle::Continuous => None,
            LineStyle::Dashed => Some("8,5"),
            LineStyle::Dotted => Some("2,4"),
            LineStyle::DotDashed => Some("9,4,2,4"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub style: LineStyle,
    pub color: String,
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    pub fn from_table(label: &str, style: LineStyle, color: &str, table: &SweepTable) -> Self {
        let points = table.rows.iter().map(|r| (r.abscissa, table.normalization.pick(&r.result))).collect();
        Self { label: label.to_string(), style, color: color.to_string(), points }
    }
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn svg_string(series: &[PlotSeries], title: &str, x_label: &str, y_label: &str) -> Result<String> {
    if series.is_empty() {
        return Err(Error::config("plot", "no curves to draw"));
    }
    if let Some(empty) = series.iter().find(|s| !s.points.iter().any(|(x, y)| x.is_finite() && y.is_finite())) {
        return Err(Error::config("plot", format!("curve '{}' has no finite points", empty.label)));
    }

    let finite = || series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite() {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    y0 = y0.min(0.0);
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    y1 += pad;

    let (width, height) = (800.0, 500.0);
    let (left, right, top, bottom) = (80.0, 20.0, 40.0, 60.0);
    let pw = width - left - right;
    let ph = height - top - bottom;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, width / 2.0, escape_xml(title));
    let _ = writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.3e}</text>"#,
            sx(xv),
            top + ph + 18.0,
            xv
        );
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#, left - 6.0, sy(yv) + 4.0, yv);
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        height - 14.0,
        escape_xml(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape_xml(y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let pts = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect::<Vec<_>>()
            .join(" ");
        let dash = s.style.dasharray().map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash} points="{pts}"/>"#,
            escape_xml(&s.color)
        );
        let ly = top + 16.0 + 18.0 * i as f64;
        let lx = left + pw - 170.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="1.5"{dash}/>"#,
            lx + 30.0,
            escape_xml(&s.color)
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 36.0, ly + 4.0, escape_xml(&s.label));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_svg(series: &[PlotSeries], title: &str, x_label: &str, y_label: &str, path: &Path) -> Result<()> {
    let svg = svg_string(series, title, x_label, y_label)?;
    write_atomic(path, svg.as_bytes())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig1,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl FigureId {
    pub const ALL: [FigureId; 7] =
        [FigureId::Fig1, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5, FigureId::Fig6, FigureId::Fig7, FigureId::Fig8];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::config("figure", format!("unknown figure id '{s}' (expected fig1, fig3..fig8)")))
    }

    /// Fixed height of atom B for the mirror figures, m.
    pub fn fixed_z_b(self) -> Option<f64> {
        match self {
            FigureId::Fig1 => None,
            FigureId::Fig3 | FigureId::Fig6 => Some(1.0e-9),
            FigureId::Fig4 | FigureId::Fig7 => Some(1.2e-7),
            FigureId::Fig5 | FigureId::Fig8 => Some(1.5e-7),
        }
    }

    pub fn parity(self) -> Option<DickeParity> {
        match self {
            FigureId::Fig1 => None,
            FigureId::Fig3 | FigureId::Fig4 | FigureId::Fig5 => Some(DickeParity::Symmetric),
            _ => Some(DickeParity::Antisymmetric),
        }
    }
}

/// Knobs the presets leave open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PresetOptions {
    pub samples: usize,
    /// Dipole pair for fig1; defaults to both perpendicular to the separation.
    pub fig1_orientation: Orientation,
    pub dipole_magnitude: f64,
    pub omega0: AngularFrequency,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            fig1_orientation: Orientation::Xx,
            dipole_magnitude: E_A0,
            omega0: AngularFrequency::HYDROGEN_LYMAN_ALPHA,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub style: LineStyle,
    pub color: String,
    pub sweep: SweepSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigurePreset {
    pub id: FigureId,
    pub title: String,
    pub z_b: Option<f64>,
    pub omega0: AngularFrequency,
    pub normalization: Normalization,
    pub curves: Vec<Curve>,
}

fn curve(label: &str, style: LineStyle, color: &str, sweep: SweepSpec) -> Curve {
    Curve { label: label.to_string(), style, color: color.to_string(), sweep }
}

pub fn figure_preset(id: FigureId, opts: &PresetOptions) -> Result<FigurePreset> {
    let omega0 = opts.omega0;
    let lam0 = transition_wavelength(omega0.value())?;
    let placeholder = DipoleVector::along_z(opts.dipole_magnitude);

    let Some(z_b) = id.fixed_z_b() else {
        // Free space, separation sweep with atom B at the origin so z_A = ϱ.
        let template = PairConfig {
            atom_a: Atom::new(Position3::on_axis(MIN_SPACING), placeholder),
            atom_b: Atom::new(Position3::ORIGIN, placeholder),
            omega0,
            parity: DickeParity::Symmetric,
            environment: Environment::FreeSpace,
        };
        let sweep = SweepSpec {
            parameter: SweepParameter::Separation,
            min: MIN_SPACING,
            max: 10.0 * lam0,
            count: opts.samples,
            spacing: Spacing::Linear,
            template,
            orientation: opts.fig1_orientation,
            dipole_magnitude: opts.dipole_magnitude,
            normalization: Normalization::PairSum,
        };
        let anti = SweepSpec { template: template.with_parity(DickeParity::Antisymmetric), ..sweep };
        return Ok(FigurePreset {
            id,
            title: format!("Free space, dipoles {}: symmetric vs antisymmetric", opts.fig1_orientation.name()),
            z_b: None,
            omega0,
            normalization: Normalization::PairSum,
            curves: vec![
                curve("symmetric", LineStyle::Continuous, "blue", sweep),
                curve("antisymmetric", LineStyle::Dashed, "red", anti),
            ],
        });
    };

    let parity = id.parity().expect("mirror figures have a parity");
    let template = PairConfig {
        atom_a: Atom::new(Position3::on_axis(z_b + MIN_SPACING), placeholder),
        atom_b: Atom::new(Position3::on_axis(z_b), placeholder),
        omega0,
        parity,
        environment: Environment::PerfectMirror,
    };
    let base = SweepSpec {
        parameter: SweepParameter::AtomAHeight,
        min: z_b + MIN_SPACING,
        max: 10.0 * lam0,
        count: opts.samples,
        spacing: Spacing::Linear,
        template,
        orientation: Orientation::Zz,
        dipole_magnitude: opts.dipole_magnitude,
        normalization: Normalization::SingleAtom,
    };
    let free = template.with_environment(Environment::FreeSpace);
    let mirror_zz = base;
    let free_zz = SweepSpec { template: free, ..base };
    let mirror_xx = SweepSpec { orientation: Orientation::Xx, ..base };
    let free_xx = SweepSpec { orientation: Orientation::Xx, template: free, ..base };

    Ok(FigurePreset {
        id,
        title: format!("{} state, z_B = {:.1e} m", capitalize(parity.name()), z_b),
        z_b: Some(z_b),
        omega0,
        normalization: Normalization::SingleAtom,
        curves: vec![
            curve("mirror_zz", LineStyle::Dashed, "red", mirror_zz),
            curve("free_zz", LineStyle::Continuous, "blue", free_zz),
            curve("mirror_xx", LineStyle::Dotted, "orange", mirror_xx),
            curve("free_xx", LineStyle::DotDashed, "green", free_xx),
        ],
    })
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureData {
    pub preset: FigurePreset,
    pub tables: Vec<SweepTable>,
}

impl FigureData {
    pub fn table(&self, label: &str) -> Option<&SweepTable> {
        self.preset.curves.iter().position(|c| c.label == label).map(|i| &self.tables[i])
    }

    /// Wide CSV: z_A followed by one scaled-rate column per curve.
    pub fn csv_string(&self) -> String {
        let mut out = String::from("z_A_m");
        for c in &self.preset.curves {
            out.push(',');
            out.push_str(&c.label);
        }
        out.push('\n');
        let n = self.tables.first().map_or(0, |t| t.rows.len());
        for i in 0..n {
            out.push_str(&format_float(self.tables[0].rows[i].z_a));
            for t in &self.tables {
                out.push(',');
                out.push_str(&format_float(t.normalization.pick(&t.rows[i].result)));
            }
            out.push('\n');
        }
        out
    }

    pub fn series(&self) -> Vec<PlotSeries> {
        self.preset
            .curves
            .iter()
            .zip(&self.tables)
            .map(|(c, t)| PlotSeries::from_table(&c.label, c.style, &c.color, t))
            .collect()
    }

    pub fn x_label(&self) -> &'static str {
        match self.preset.id {
            FigureId::Fig1 => "interatomic distance ϱ (m)",
            _ => "z_A (m)",
        }
    }
}

pub fn run_figure(preset: &FigurePreset) -> Result<FigureData> {
    let tables = preset.curves.iter().map(|c| run_sweep(&c.sweep)).collect::<Result<Vec<_>>>()?;
    Ok(FigureData { preset: preset.clone(), tables })
}
