//! Run configuration: a flat key-value document with dotted namespaces,
//! strict about unknown keys, collecting every validation violation before
//! reporting.
//!
//! The numeric core is dimensionless; physical units enter only here.
//! Keys with a unit suffix (`_ev`, `_nm`, `_a3`) convert through the
//! reference energy `omega_ref_ev` (the value of `hbar omega_ref` in eV)
//! using `hbar c = 197.3269804 eV nm`.

use crate::media::{DielectricModel, PolarizabilityModel};
use crate::modes::{CenterModel, Rect, System};
use crate::quadrature::{QuadratureRule, QuadratureSpec};
use crate::scattering::{Channel, Polarization};
use crate::{Error, Result};

use std::collections::BTreeMap;

/// `hbar c` in eV nm; converts lengths to `c / omega_ref` units.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Wall and center amplitudes over the real frequency grid.
    Scatter,
    /// Pointwise density of states over the real frequency grid.
    Dos,
    /// Argument-principle mode count over a rectangle.
    CountModes,
    /// Ground-state energy scan over angular momentum with growth fits.
    EnergyScan,
    /// Atom-in-cavity energy shift over the radius grid.
    AtomShift,
    /// Per-channel TM energy integrand over the imaginary-axis grid.
    Figure3,
    /// Energy shift versus radius with a fitted log-log slope sidecar.
    Figure4,
}

impl Command {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "scatter" => Command::Scatter,
            "dos" => Command::Dos,
            "count-modes" => Command::CountModes,
            "energy-scan" => Command::EnergyScan,
            "atom-shift" => Command::AtomShift,
            "figure3" => Command::Figure3,
            "figure4" => Command::Figure4,
            other => {
                return Err(Error::Config(format!(
                    "unknown command '{other}'; expected one of scatter, dos, count-modes, \
                     energy-scan, atom-shift, figure3, figure4"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Scatter => "scatter",
            Command::Dos => "dos",
            Command::CountModes => "count-modes",
            Command::EnergyScan => "energy-scan",
            Command::AtomShift => "atom-shift",
            Command::Figure3 => "figure3",
            Command::Figure4 => "figure4",
        }
    }
}

/// A strictly increasing sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Grid {
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let step = if self.n > 1 {
            (self.max - self.min) / (self.n - 1) as f64
        } else {
            0.0
        };
        (0..self.n).map(move |i| {
            if i + 1 == self.n {
                self.max
            } else {
                self.min + i as f64 * step
            }
        })
    }

    /// Logarithmically spaced variant, for scale scans.
    pub fn log_points(&self) -> impl Iterator<Item = f64> + '_ {
        let ratio = if self.n > 1 {
            (self.max / self.min).powf(1.0 / (self.n - 1) as f64)
        } else {
            1.0
        };
        (0..self.n).map(move |i| {
            if i + 1 == self.n {
                self.max
            } else {
                self.min * ratio.powi(i as i32)
            }
        })
    }
}

/// Everything a run needs, validated and in core units.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub wall: DielectricModel,
    pub center: CenterModel,
    pub radius: f64,
    pub channel: Channel,
    pub omega_grid: Grid,
    pub u_grid: Grid,
    pub r_grid: Grid,
    pub rect: Rect,
    pub quad: QuadratureSpec,
    pub l_max: usize,
    pub d_at: Option<f64>,
    pub n_bins: usize,
    /// `hbar omega_ref` in eV; enables unit-suffixed inputs and meV output.
    pub omega_ref_ev: Option<f64>,
    pub fit_window: Option<(usize, usize)>,
}

impl RunConfig {
    pub fn system(&self) -> Result<System> {
        System::new(self.wall, self.center, self.radius)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "command",
    "omega_ref_ev",
    "wall.model",
    "wall.omega_p",
    "wall.omega_p_ev",
    "wall.omega0",
    "wall.omega0_ev",
    "wall.gamma",
    "wall.gamma_ev",
    "atom.alpha0",
    "atom.alpha0_a3",
    "atom.omega0",
    "atom.omega0_ev",
    "system.radius",
    "system.radius_nm",
    "channel.l",
    "channel.pol",
    "grid.omega.min",
    "grid.omega.max",
    "grid.omega.n",
    "grid.u.min",
    "grid.u.max",
    "grid.u.n",
    "grid.r.min",
    "grid.r.max",
    "grid.r.n",
    "rect.re_min",
    "rect.re_max",
    "rect.im_min",
    "rect.im_max",
    "quad.rule",
    "quad.rel_tol",
    "quad.abs_tol",
    "quad.max_depth",
    "scan.l_max",
    "scan.d_at",
    "dos.bins",
    "fit.lo",
    "fit.hi",
];

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn suggest(key: &str) -> String {
    let mut best: Vec<(usize, &str)> = KNOWN_KEYS
        .iter()
        .map(|k| (levenshtein(key, k), *k))
        .collect();
    best.sort();
    let close: Vec<&str> = best
        .iter()
        .take_while(|(d, _)| *d <= 3)
        .take(3)
        .map(|(_, k)| *k)
        .collect();
    if close.is_empty() {
        String::new()
    } else {
        format!("; did you mean {}?", close.join(" or "))
    }
}

/// Parse the flat dotted key-value document. `command_override` comes from
/// the CLI positional and wins over a `command` key in the file (they must
/// agree if both are present).
pub fn parse_config(text: &str, command_override: Option<Command>) -> Result<RunConfig> {
    let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            ))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "line {}: unknown key '{key}'{}",
                lineno + 1,
                suggest(&key)
            )));
        }
        if map.insert(key.clone(), (lineno + 1, value)).is_some() {
            return Err(Error::Config(format!(
                "line {}: duplicate key '{key}'",
                lineno + 1
            )));
        }
    }
    build(map, command_override)
}

struct Reader {
    map: BTreeMap<String, (usize, String)>,
    violations: Vec<String>,
}

impl Reader {
    fn raw(&mut self, key: &str) -> Option<String> {
        self.map.remove(key).map(|(_, v)| v)
    }

    fn f64(&mut self, key: &str) -> Option<f64> {
        let v = self.raw(key)?;
        match v.parse::<f64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.violations
                    .push(format!("{key}: '{v}' is not a number"));
                None
            }
        }
    }

    fn usize(&mut self, key: &str) -> Option<usize> {
        let v = self.raw(key)?;
        match v.parse::<usize>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.violations
                    .push(format!("{key}: '{v}' is not a non-negative integer"));
                None
            }
        }
    }

    /// Value in core units from either a plain key or its unit-suffixed
    /// sibling, converted by `per_unit` (core units per physical unit).
    fn with_unit(&mut self, key: &str, suffixed: &str, per_unit: Option<f64>) -> Option<f64> {
        let plain = self.f64(key);
        let phys = self.f64(suffixed);
        match (plain, phys) {
            (Some(_), Some(_)) => {
                self.violations
                    .push(format!("{key} and {suffixed} are mutually exclusive"));
                None
            }
            (Some(v), None) => Some(v),
            (None, Some(v)) => match per_unit {
                Some(c) => Some(v * c),
                None => {
                    self.violations.push(format!(
                        "{suffixed} requires omega_ref_ev to fix the unit system"
                    ));
                    None
                }
            },
            (None, None) => None,
        }
    }

    fn require(&mut self, what: &str, got: Option<f64>) -> f64 {
        match got {
            Some(v) => v,
            None => {
                self.violations.push(format!("{what} is required"));
                f64::NAN
            }
        }
    }

    fn positive(&mut self, what: &str, v: f64) -> f64 {
        if !(v > 0.0) && !v.is_nan() {
            self.violations.push(format!("{what} must be > 0, got {v}"));
        }
        v
    }
}

fn build(
    map: BTreeMap<String, (usize, String)>,
    command_override: Option<Command>,
) -> Result<RunConfig> {
    let mut r = Reader {
        map,
        violations: Vec::new(),
    };

    let file_command = match r.raw("command") {
        Some(s) => Some(Command::parse(&s)?),
        None => None,
    };
    let command = match (command_override, file_command) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Config(format!(
                "command mismatch: CLI says '{}', config says '{}'",
                a.name(),
                b.name()
            )));
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => {
            return Err(Error::Config(
                "no command given (CLI positional or 'command =' key)".into(),
            ));
        }
    };

    let omega_ref_ev = r.f64("omega_ref_ev");
    if let Some(e) = omega_ref_ev {
        if !(e > 0.0) {
            r.violations
                .push(format!("omega_ref_ev must be > 0, got {e}"));
        }
    }
    // core length unit is c/omega_ref = hbar c / (hbar omega_ref)
    let per_nm = omega_ref_ev.map(|e| e / HBAR_C_EV_NM);
    let per_ev = omega_ref_ev.map(|e| 1.0 / e);
    let per_a3 = per_nm.map(|p| (0.1 * p).powi(3)); // 1 A = 0.1 nm

    let wall = {
        let model = r.raw("wall.model").unwrap_or_else(|| "vacuum".into());
        let omega_p = r.with_unit("wall.omega_p", "wall.omega_p_ev", per_ev);
        let omega0 = r.with_unit("wall.omega0", "wall.omega0_ev", per_ev);
        let gamma = r.with_unit("wall.gamma", "wall.gamma_ev", per_ev);
        match model.as_str() {
            "vacuum" => DielectricModel::Vacuum,
            "pec" => DielectricModel::PerfectConductor,
            "lorentzian" => {
                let omega_p = r.require("wall.omega_p", omega_p);
                let omega0 = r.require("wall.omega0", omega0);
                let gamma = r.require("wall.gamma", gamma);
                DielectricModel::Lorentzian {
                    omega_p,
                    omega0,
                    gamma,
                }
            }
            "drude" => {
                let omega_p = r.require("wall.omega_p", omega_p);
                let gamma = r.require("wall.gamma", gamma);
                DielectricModel::Drude { omega_p, gamma }
            }
            other => {
                r.violations.push(format!(
                    "wall.model: unknown model '{other}'; expected vacuum, lorentzian, drude, pec"
                ));
                DielectricModel::Vacuum
            }
        }
    };
    if let Err(e) = wall.validate() {
        r.violations.push(e.to_string());
    }

    let alpha0 = r.with_unit("atom.alpha0", "atom.alpha0_a3", per_a3);
    let atom_omega0 = r.with_unit("atom.omega0", "atom.omega0_ev", per_ev);
    let atom = {
        let a0 = alpha0.unwrap_or(0.0);
        let w0 = atom_omega0.unwrap_or(1.0);
        match PolarizabilityModel::new(a0, w0) {
            Ok(m) => m,
            Err(e) => {
                r.violations.push(e.to_string());
                PolarizabilityModel::new(0.0, 1.0).expect("trivial atom")
            }
        }
    };
    let center = if alpha0.is_some() || atom_omega0.is_some() {
        CenterModel::Atom(atom)
    } else {
        match command {
            // these commands are about the atom; default to it even when
            // the atom block is absent (alpha0 = 0 then shifts nothing)
            Command::AtomShift | Command::Figure4 => CenterModel::Atom(atom),
            _ => CenterModel::Empty,
        }
    };

    let radius = {
        let v = r.with_unit("system.radius", "system.radius_nm", per_nm);
        r.positive("system.radius", v.unwrap_or(1.0))
    };

    let channel = {
        let l = r.usize("channel.l").unwrap_or(1);
        let pol = match r.raw("channel.pol").as_deref() {
            None | Some("tm") => Polarization::Tm,
            Some("te") => Polarization::Te,
            Some(other) => {
                r.violations
                    .push(format!("channel.pol: '{other}' is not 'te' or 'tm'"));
                Polarization::Tm
            }
        };
        match Channel::new(l, pol) {
            Ok(c) => c,
            Err(e) => {
                r.violations.push(e.to_string());
                Channel::new(1, pol).expect("l = 1 is valid")
            }
        }
    };

    let mut grid = |name: &str, dmin: f64, dmax: f64, dn: usize| -> Grid {
        let min = r.f64(&format!("grid.{name}.min")).unwrap_or(dmin);
        let max = r.f64(&format!("grid.{name}.max")).unwrap_or(dmax);
        let n = r.usize(&format!("grid.{name}.n")).unwrap_or(dn);
        if !(min < max) {
            r.violations
                .push(format!("grid.{name}: need min < max, got [{min}, {max}]"));
        }
        if n < 2 {
            r.violations
                .push(format!("grid.{name}.n must be >= 2, got {n}"));
        }
        if !(min > 0.0) {
            r.violations
                .push(format!("grid.{name}.min must be > 0, got {min}"));
        }
        Grid { min, max, n }
    };
    let omega_grid = grid("omega", 0.1, 5.0, 200);
    let u_grid = grid("u", 0.05, 5.0, 100);
    let r_grid = grid("r", 0.01, 0.1, 10);

    let rect = {
        let re_min = r.f64("rect.re_min").unwrap_or(0.1);
        let re_max = r.f64("rect.re_max").unwrap_or(8.0);
        let im_min = r.f64("rect.im_min").unwrap_or(-0.5);
        let im_max = r.f64("rect.im_max").unwrap_or(0.5);
        if !(re_min < re_max) || !(im_min < im_max) {
            r.violations.push(format!(
                "rect: degenerate rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            ));
        }
        Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    };

    let quad = {
        let rule = match r.raw("quad.rule").as_deref() {
            None | Some("tanh-sinh") => QuadratureRule::TanhSinh,
            Some("gauss-kronrod") => QuadratureRule::GaussKronrod,
            Some(other) => {
                r.violations.push(format!(
                    "quad.rule: '{other}' is not 'tanh-sinh' or 'gauss-kronrod'"
                ));
                QuadratureRule::TanhSinh
            }
        };
        let spec = QuadratureSpec {
            rule,
            rel_tol: r.f64("quad.rel_tol").unwrap_or(1e-8),
            abs_tol: r.f64("quad.abs_tol").unwrap_or(1e-12),
            max_depth: r.usize("quad.max_depth").unwrap_or(12),
        };
        if let Err(e) = spec.validate() {
            r.violations.push(e.to_string());
        }
        spec
    };

    let explicit_l_max = r.usize("scan.l_max");
    let d_at = r.f64("scan.d_at");
    let l_max = match (explicit_l_max, d_at) {
        (Some(_), Some(_)) => {
            r.violations
                .push("scan.l_max and scan.d_at are mutually exclusive".into());
            8
        }
        (Some(l), None) => l,
        (None, Some(d)) => match crate::energy::cutoff_l_max(radius, d) {
            Ok(l) => l,
            Err(e) => {
                r.violations.push(e.to_string());
                8
            }
        },
        (None, None) => 8,
    };
    if command == Command::EnergyScan && l_max < 2 {
        r.violations
            .push(format!("scan.l_max must be >= 2, got {l_max}"));
    }

    let n_bins = r.usize("dos.bins").unwrap_or(10);
    if n_bins == 0 {
        r.violations.push("dos.bins must be >= 1".into());
    }

    let fit_window = {
        let lo = r.usize("fit.lo");
        let hi = r.usize("fit.hi");
        match (lo, hi) {
            (Some(a), Some(b)) => {
                if a < 1 || b < a {
                    r.violations
                        .push(format!("fit window [{a}, {b}] is not a valid range"));
                }
                Some((a, b))
            }
            (None, None) => None,
            _ => {
                r.violations
                    .push("fit.lo and fit.hi must be given together".into());
                None
            }
        }
    };

    debug_assert!(r.map.is_empty(), "unconsumed known keys: {:?}", r.map);
    if !r.violations.is_empty() {
        return Err(Error::Validation(r.violations.join("\n")));
    }
    Ok(RunConfig {
        command,
        wall,
        center,
        radius,
        channel,
        omega_grid,
        u_grid,
        r_grid,
        rect,
        quad,
        l_max,
        d_at,
        n_bins,
        omega_ref_ev,
        fit_window,
    })
}
