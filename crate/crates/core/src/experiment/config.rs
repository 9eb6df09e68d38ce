use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use toml::Value;

use crate::kvtext::{Diagnostic, KvDoc, Reader};
use crate::liepoisson::AlgebroidChart;
use crate::nctorus::{SkewForm, TrigPoly};
use crate::poismap::{ProfileTable, RadialProfile};
use crate::weylrn::{parse_symbol, SymbolRn};

const SKEW_TOLERANCE: f64 = 1e-12;
const MAX_GRID_POINTS: f64 = 1048576.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    NctorusStar,
    Semiclassical,
    Weyl,
    SphereOde,
    PoissonResidual,
    JacobiCheck,
    BracketValidate,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::NctorusStar,
        Kind::Semiclassical,
        Kind::Weyl,
        Kind::SphereOde,
        Kind::PoissonResidual,
        Kind::JacobiCheck,
        Kind::BracketValidate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::NctorusStar => "nctorus-star",
            Kind::Semiclassical => "semiclassical",
            Kind::Weyl => "weyl",
            Kind::SphereOde => "sphere-ode",
            Kind::PoissonResidual => "poisson-residual",
            Kind::JacobiCheck => "jacobi-check",
            Kind::BracketValidate => "bracket-validate",
        }
    }

    /// Kinds that draw random samples and therefore need an explicit seed.
    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            Kind::Semiclassical | Kind::PoissonResidual | Kind::JacobiCheck | Kind::BracketValidate
        )
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Kind::NctorusStar => &[],
            Kind::Semiclassical => &["hbar", "max_error", "bound", "slope_running"],
            Kind::Weyl => &["hbar", "deviation", "slope"],
            Kind::SphereOde => &["t", "alpha", "closed_form", "deviation"],
            Kind::PoissonResidual => &["sample_id", "unorm", "residual"],
            Kind::JacobiCheck => &["sample_id", "unorm", "d1_exp_err", "d2_exp_err", "jacobi_err", "deta_norm"],
            Kind::BracketValidate => &["sample_id", "antisymmetry", "jacobi_residual", "leibniz"],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Kind::ALL.iter().map(|k| k.as_str()).collect();
                format!("unknown kind `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryChoice {
    Torus(SkewForm),
    Sphere,
}

#[derive(Debug, Clone)]
pub enum Params {
    NctorusStar {
        eta: SkewForm,
        a: TrigPoly,
        b: TrigPoly,
        hbar: f64,
        expect: Option<TrigPoly>,
        tol: f64,
    },
    Semiclassical {
        eta: SkewForm,
        hbar_list: Vec<f64>,
        trials: usize,
        max_modes: usize,
        max_freq: i64,
        slope_tol: f64,
    },
    Weyl {
        grid_size: usize,
        period: f64,
        hbar_list: Vec<f64>,
        symbol_f: SymbolRn,
        symbol_g: SymbolRn,
        max_deviation: Option<f64>,
        expect_slope: Option<f64>,
        slope_tol: f64,
    },
    SphereOde {
        a: f64,
        t0: f64,
        t1: f64,
        step: f64,
        alpha0: f64,
        tol: f64,
    },
    PoissonResidual {
        geometry: GeometryChoice,
        profile: RadialProfile,
        samples: usize,
        umin: f64,
        umax: f64,
        tol: f64,
        fd_step: f64,
        expect_poisson: bool,
    },
    JacobiCheck {
        samples: usize,
        umax: f64,
        tol: f64,
        fd_step: f64,
    },
    BracketValidate {
        chart: AlgebroidChart,
        samples: usize,
        umax: f64,
        zmax: f64,
        tol: f64,
        fd_step: f64,
    },
}

/// A validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: Kind,
    pub seed: u64,
    pub output: PathBuf,
    pub params: Params,
    echo: BTreeMap<String, Value>,
}

impl PartialEq for ExperimentConfig {
    fn eq(&self, other: &Self) -> bool {
        // charts hold closures, so compare through the normalized echo
        self.echo == other.echo
    }
}

impl ExperimentConfig {
    /// Normalized config text; validating it again yields an equal config.
    pub fn to_text(&self) -> String {
        toml::to_string(&self.echo).expect("flat values serialize")
    }
}

/// Parses and validates a config; relative input paths resolve against the
/// working directory.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, Vec<Diagnostic>> {
    validate_config_at(text, Path::new("."))
}

/// As [`validate_config`], resolving `chart` and `profile_file` against `base_dir`.
pub fn validate_config_at(text: &str, base_dir: &Path) -> Result<ExperimentConfig, Vec<Diagnostic>> {
    let doc = KvDoc::parse(text)?;
    validate_doc(doc, base_dir)
}

/// Validates `text` with `overrides` replacing file entries and `defaults`
/// filling absent keys. A `kind` in the file must agree with `kind`.
pub(crate) fn validate_with(
    text: &str,
    base_dir: &Path,
    kind: Option<Kind>,
    overrides: Vec<(&str, Value)>,
    defaults: Vec<(&str, Value)>,
) -> Result<ExperimentConfig, Vec<Diagnostic>> {
    let mut doc = KvDoc::parse(text)?;
    if let Some(kind) = kind {
        if let Some(entry) = doc.get("kind") {
            if entry.value.as_str() != Some(kind.as_str()) {
                return Err(vec![Diagnostic {
                    line: entry.line,
                    message: format!("config kind {} does not match subcommand `{kind}`", entry.value),
                }]);
            }
        } else {
            doc.insert("kind", Value::String(kind.as_str().into()));
        }
    }
    for (k, v) in overrides {
        doc.insert(k, v);
    }
    for (k, v) in defaults {
        if !doc.contains(k) {
            doc.insert(k, v);
        }
    }
    validate_doc(doc, base_dir)
}

struct Echo(BTreeMap<String, Value>);

impl Echo {
    fn f(&mut self, key: &str, v: f64) -> f64 {
        self.0.insert(key.into(), Value::Float(v));
        v
    }
    fn i(&mut self, key: &str, v: i64) -> i64 {
        self.0.insert(key.into(), Value::Integer(v));
        v
    }
    fn s(&mut self, key: &str, v: &str) {
        self.0.insert(key.into(), Value::String(v.into()));
    }
    fn b(&mut self, key: &str, v: bool) -> bool {
        self.0.insert(key.into(), Value::Boolean(v));
        v
    }
    fn list(&mut self, key: &str, v: &[f64]) {
        self.0.insert(key.into(), Value::Array(v.iter().map(|x| Value::Float(*x)).collect()));
    }
    fn matrix(&mut self, key: &str, eta: &SkewForm) {
        let m = eta.matrix();
        let rows = (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| Value::Float(m[(i, j)])).collect()))
            .collect();
        self.0.insert(key.into(), Value::Array(rows));
    }
}

fn read_eta(r: &mut Reader<'_>, echo: &mut Echo) -> Option<SkewForm> {
    let (flat, line) = r.flat_array_req("eta")?;
    let n = (flat.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != flat.len() {
        r.error(line, format!("eta has {} entries, not a square matrix", flat.len()));
        return None;
    }
    let mut worst = (0.0, 0, 0);
    for i in 0..n {
        for j in 0..n {
            let asym = (flat[i * n + j] + flat[j * n + i]).abs();
            if asym > worst.0 {
                worst = (asym, i, j);
            }
        }
    }
    let (asym, i, j) = worst;
    if asym > SKEW_TOLERANCE {
        r.error(
            line,
            format!(
                "eta is not skew-symmetric: eta[{i}][{j}] = {} but eta[{j}][{i}] = {} (asymmetry {asym:e})",
                flat[i * n + j],
                flat[j * n + i]
            ),
        );
        return None;
    }
    match SkewForm::from_row_major(n, &flat) {
        Ok(eta) => {
            echo.matrix("eta", &eta);
            Some(eta)
        }
        Err(e) => {
            r.error(line, format!("eta: {e}"));
            None
        }
    }
}

fn positive(r: &mut Reader<'_>, echo: &mut Echo, key: &str, default: Option<f64>) -> Option<f64> {
    let line = r.doc.line(key);
    let v = match default {
        Some(d) if !r.doc.contains(key) => d,
        _ => r.f64_req(key)?,
    };
    if !(v > 0.0 && v.is_finite()) {
        r.error(line, format!("`{key}` must be positive, got {v}"));
        return None;
    }
    Some(echo.f(key, v))
}

fn count(r: &mut Reader<'_>, echo: &mut Echo, key: &str, default: Option<usize>) -> Option<usize> {
    let line = r.doc.line(key);
    let v = match default {
        Some(d) if !r.doc.contains(key) => d,
        _ => r.usize_req(key)?,
    };
    if v == 0 {
        r.error(line, format!("`{key}` must be at least 1"));
        return None;
    }
    echo.i(key, v as i64);
    Some(v)
}

fn hbar_list(r: &mut Reader<'_>, echo: &mut Echo) -> Option<Vec<f64>> {
    let (list, line) = r.flat_array_req("hbar_list")?;
    if list.is_empty() {
        r.error(line, "`hbar_list` must not be empty");
        return None;
    }
    if let Some(bad) = list.iter().find(|h| !h.is_finite() || **h == 0.0) {
        r.error(line, format!("`hbar_list` entry {bad} is not allowed"));
        return None;
    }
    echo.list("hbar_list", &list);
    Some(list)
}

fn resolve(base_dir: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base_dir.join(path)
    }
}

fn validate_doc(mut doc: KvDoc, base_dir: &Path) -> Result<ExperimentConfig, Vec<Diagnostic>> {
    let mut r = Reader::new(&mut doc);
    let mut echo = Echo(BTreeMap::new());
    let name = r.str_req("name");
    let kind_line = r.doc.line("kind");
    let kind = r.str_req("kind").and_then(|k| match k.parse::<Kind>() {
        Ok(kind) => Some(kind),
        Err(msg) => {
            r.error(kind_line, msg);
            None
        }
    });
    let output = r.str_req("output");
    let (Some(name), Some(kind), Some(output)) = (name, kind, output) else {
        return Err(r.finish());
    };
    echo.s("name", &name);
    echo.s("kind", kind.as_str());
    echo.s("output", &output);

    let seed_line = r.doc.line("seed");
    let seed = if kind.is_stochastic() || r.doc.contains("seed") {
        r.int_req("seed").and_then(|s| {
            if s < 0 {
                r.error(seed_line, "`seed` must be non-negative");
                None
            } else {
                Some(s as u64)
            }
        })
    } else {
        Some(0)
    };
    if let Some(s) = seed {
        echo.i("seed", s as i64);
    }

    let params = match kind {
        Kind::NctorusStar => nctorus_star(&mut r, &mut echo),
        Kind::Semiclassical => semiclassical(&mut r, &mut echo),
        Kind::Weyl => weyl(&mut r, &mut echo),
        Kind::SphereOde => sphere_ode(&mut r, &mut echo),
        Kind::PoissonResidual => poisson_residual(&mut r, &mut echo, base_dir),
        Kind::JacobiCheck => jacobi_check(&mut r, &mut echo),
        Kind::BracketValidate => bracket_validate(&mut r, &mut echo, base_dir),
    };
    let diags = r.finish();
    match (params, seed) {
        (Some(params), Some(seed)) if diags.is_empty() => Ok(ExperimentConfig {
            name,
            kind,
            seed,
            output: PathBuf::from(output),
            params,
            echo: echo.0,
        }),
        _ => Err(diags),
    }
}

fn mode_list(r: &mut Reader<'_>, echo: &mut Echo, key: &str, dim: usize, required: bool) -> Option<Option<TrigPoly>> {
    let line = r.doc.line(key);
    let text = if required { Some(r.str_req(key)?) } else { r.str_opt(key) };
    let Some(text) = text else {
        return Some(None);
    };
    match TrigPoly::parse_mode_list(&text, dim) {
        Ok(p) => {
            echo.s(key, &text);
            Some(Some(p))
        }
        Err(e) => {
            r.error(line, format!("`{key}`: {e}"));
            None
        }
    }
}

fn nctorus_star(r: &mut Reader<'_>, echo: &mut Echo) -> Option<Params> {
    let eta = read_eta(r, echo);
    let hbar_line = r.doc.line("hbar");
    let hbar = r.f64_req("hbar");
    let tol = positive(r, echo, "tol", Some(1e-14));
    let eta = eta?;
    let dim = eta.dim();
    let a = mode_list(r, echo, "a", dim, true);
    let b = mode_list(r, echo, "b", dim, true);
    let expect = mode_list(r, echo, "expect", dim, false);
    let hbar = hbar?;
    if !hbar.is_finite() {
        r.error(hbar_line, "`hbar` must be finite");
        return None;
    }
    echo.f("hbar", hbar);
    Some(Params::NctorusStar { eta, a: a??, b: b??, hbar, expect: expect?, tol: tol? })
}

fn semiclassical(r: &mut Reader<'_>, echo: &mut Echo) -> Option<Params> {
    let eta = read_eta(r, echo);
    let hbars = hbar_list(r, echo);
    let trials = count(r, echo, "trials", None);
    let max_modes = count(r, echo, "max_modes", Some(4));
    let freq_line = r.doc.line("max_freq");
    let max_freq = if r.doc.contains("max_freq") { r.int_req("max_freq") } else { Some(2) };
    let slope_tol = positive(r, echo, "slope_tol", Some(0.05));
    let max_freq = max_freq?;
    if !(1..=1000).contains(&max_freq) {
        r.error(freq_line, "`max_freq` must be in 1..=1000");
        return None;
    }
    echo.i("max_freq", max_freq);
    Some(Params::Semiclassical {
        eta: eta?,
        hbar_list: hbars?,
        trials: trials?,
        max_modes: max_modes?,
        max_freq,
        slope_tol: slope_tol?,
    })
}

fn weyl(r: &mut Reader<'_>, echo: &mut Echo) -> Option<Params> {
    let n_line = r.doc.line("n");
    let n = count(r, echo, "n", None);
    let grid_line = r.doc.line("grid_size");
    let grid_size = count(r, echo, "grid_size", None);
    let period = positive(r, echo, "period", Some(TAU));
    let hbars = hbar_list(r, echo);
    let f_line = r.doc.line("symbol_f");
    let g_line = r.doc.line("symbol_g");
    let f_text = r.str_req("symbol_f");
    let g_text = r.str_req("symbol_g");
    let max_deviation = if r.doc.contains("max_deviation") { Some(positive(r, echo, "max_deviation", None)?) } else { None };
    let expect_slope = r.f64_opt("expect_slope");
    if let Some(s) = expect_slope {
        echo.f("expect_slope", s);
    }
    let slope_tol = positive(r, echo, "slope_tol", Some(0.1));
    let (n, grid_size, period) = (n?, grid_size?, period?);
    if n > 3 {
        r.error(n_line, "`n` must be at most 3");
        return None;
    }
    if grid_size < 16 || grid_size % 2 == 1 || (grid_size as f64).powi(n as i32) > MAX_GRID_POINTS {
        r.error(grid_line, format!("`grid_size` must be even, at least 16, and give at most {MAX_GRID_POINTS} points"));
        return None;
    }
    let mut symbol = |text: Option<String>, key: &str, line| -> Option<SymbolRn> {
        let text = text?;
        match parse_symbol(&text, n, period) {
            Ok(s) => {
                echo.s(key, &text);
                Some(s)
            }
            Err(e) => {
                r.error(line, format!("`{key}`: {e}"));
                None
            }
        }
    };
    let symbol_f = symbol(f_text, "symbol_f", f_line);
    let symbol_g = symbol(g_text, "symbol_g", g_line);
    Some(Params::Weyl {
        grid_size,
        period,
        hbar_list: hbars?,
        symbol_f: symbol_f?,
        symbol_g: symbol_g?,
        max_deviation,
        expect_slope,
        slope_tol: slope_tol?,
    })
}

fn sphere_ode(r: &mut Reader<'_>, echo: &mut Echo) -> Option<Params> {
    let a = r.f64_req("a");
    let t0_line = r.doc.line("t0");
    let t0 = positive(r, echo, "t0", None);
    let t1_line = r.doc.line("t1");
    let t1 = positive(r, echo, "t1", None);
    let step = positive(r, echo, "step", None);
    let alpha0 = r.f64_opt("alpha0");
    let tol = positive(r, echo, "tol", Some(1e-8));
    let (a, t0, t1) = (a?, t0?, t1?);
    echo.f("a", a);
    if t1 <= t0 {
        r.error(t1_line, format!("`t1` = {t1} must exceed `t0` = {t0}"));
        return None;
    }
    if t1 >= 2.0 {
        r.error(t1_line, "`t1` must be below 2");
        return None;
    }
    let alpha0 = alpha0.unwrap_or(a / t0 + 0.5 * t0);
    if !alpha0.is_finite() {
        r.error(t0_line, "initial value is not finite");
        return None;
    }
    echo.f("alpha0", alpha0);
    Some(Params::SphereOde { a, t0, t1, step: step?, alpha0, tol: tol? })
}

fn poisson_residual(r: &mut Reader<'_>, echo: &mut Echo, base_dir: &Path) -> Option<Params> {
    let geo_line = r.doc.line("geometry");
    let geometry = r.str_req("geometry");
    let prof_line = r.doc.line("profile");
    let profile = r.str_req("profile");
    let samples = count(r, echo, "samples", None);
    let umax_line = r.doc.line("umax");
    let umax = positive(r, echo, "umax", None);
    let umin = r.f64_opt("umin");
    let fd_step = positive(r, echo, "fd_step", Some(1e-3));
    let expect_poisson = r.bool_opt("expect_poisson").unwrap_or(true);
    echo.b("expect_poisson", expect_poisson);
    let geometry = match geometry?.as_str() {
        "torus" => {
            echo.s("geometry", "torus");
            GeometryChoice::Torus(read_eta(r, echo)?)
        }
        "sphere" => {
            echo.s("geometry", "sphere");
            GeometryChoice::Sphere
        }
        other => {
            r.error(geo_line, format!("unknown geometry `{other}` (expected torus or sphere)"));
            return None;
        }
    };
    let tol_default = if matches!(geometry, GeometryChoice::Torus(_)) { 1e-8 } else { 1e-6 };
    let tol = positive(r, echo, "tol", Some(tol_default));
    let profile_name = profile?;
    let profile = match profile_name.as_str() {
        "arcsin" => RadialProfile::Arcsin,
        "half" => RadialProfile::Half,
        "file" => {
            let line = r.doc.line("profile_file");
            let path = r.str_req("profile_file")?;
            match ProfileTable::load(&resolve(base_dir, &path)) {
                Ok(t) => {
                    echo.s("profile_file", &path);
                    RadialProfile::Tabulated(t)
                }
                Err(e) => {
                    r.error(line, format!("`profile_file`: {e}"));
                    return None;
                }
            }
        }
        other => {
            r.error(prof_line, format!("unknown profile `{other}` (expected arcsin, half or file)"));
            return None;
        }
    };
    echo.s("profile", &profile_name);
    if matches!(geometry, GeometryChoice::Torus(_)) && profile != RadialProfile::Half {
        r.error(prof_line, "the torus only supports profile = \"half\"");
        return None;
    }
    let umax = umax?;
    let (lo, hi) = profile.domain();
    let umin = umin.unwrap_or(lo);
    if !(umin >= lo && umin <= umax) {
        r.error(umax_line, format!("need {lo} <= umin <= umax, got umin = {umin}, umax = {umax}"));
        return None;
    }
    let fd_step = fd_step?;
    if matches!(geometry, GeometryChoice::Sphere) && umax + 2.0 * fd_step >= hi.min(std::f64::consts::PI) {
        r.error(umax_line, format!("`umax` = {umax} leaves no room for finite differences below {}", hi.min(std::f64::consts::PI)));
        return None;
    }
    echo.f("umin", umin);
    Some(Params::PoissonResidual {
        geometry,
        profile,
        samples: samples?,
        umin,
        umax,
        tol: tol?,
        fd_step,
        expect_poisson,
    })
}

fn jacobi_check(r: &mut Reader<'_>, echo: &mut Echo) -> Option<Params> {
    let samples = count(r, echo, "samples", None);
    let umax_line = r.doc.line("umax");
    let umax = positive(r, echo, "umax", None);
    let tol = positive(r, echo, "tol", Some(1e-7));
    let fd_step = positive(r, echo, "fd_step", Some(1e-3));
    let umax = umax?;
    if umax >= 3.0 {
        r.error(umax_line, "`umax` must stay below 3 (conjugate points at pi)");
        return None;
    }
    Some(Params::JacobiCheck { samples: samples?, umax, tol: tol?, fd_step: fd_step? })
}

fn bracket_validate(r: &mut Reader<'_>, echo: &mut Echo, base_dir: &Path) -> Option<Params> {
    let chart_line = r.doc.line("chart");
    let chart_path = r.str_req("chart");
    let samples = count(r, echo, "samples", None);
    let umax = positive(r, echo, "umax", Some(1.0));
    let zmax = positive(r, echo, "zmax", Some(1.0));
    let tol = positive(r, echo, "tol", Some(1e-8));
    let fd_step = positive(r, echo, "fd_step", Some(1e-3));
    let chart_path = chart_path?;
    let chart = match AlgebroidChart::load(&resolve(base_dir, &chart_path)) {
        Ok(c) => c,
        Err(diags) => {
            for d in diags {
                r.error(chart_line, format!("chart {chart_path}: {d}"));
            }
            return None;
        }
    };
    echo.s("chart", &chart_path);
    Some(Params::BracketValidate {
        chart,
        samples: samples?,
        umax: umax?,
        zmax: zmax?,
        tol: tol?,
        fd_step: fd_step?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEMI: &str = "name = \"s\"\nkind = \"semiclassical\"\nseed = 7\noutput = \"s.csv\"\n\
                        eta = [[0, 1], [-1, 0]]\nhbar_list = [0.1, 0.05]\ntrials = 3\n";

    #[test]
    fn minimal_config_round_trips() {
        let cfg = validate_config(SEMI).unwrap();
        assert_eq!(cfg.kind, Kind::Semiclassical);
        assert_eq!(cfg.seed, 7);
        let again = validate_config(&cfg.to_text()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_text(), cfg.to_text());
    }

    #[test]
    fn missing_eta_is_reported() {
        let text = SEMI.replace("eta = [[0, 1], [-1, 0]]\n", "");
        let diags = validate_config(&text).unwrap_err();
        assert!(diags.iter().any(|d| d.message == "missing key: eta"), "{diags:?}");
    }

    #[test]
    fn asymmetric_eta_names_the_entry() {
        let text = SEMI.replace("[[0, 1], [-1, 0]]", "[[0, 1], [-0.5, 0]]");
        let diags = validate_config(&text).unwrap_err();
        let d = &diags[0];
        assert_eq!(d.line, Some(5));
        assert!(d.message.contains("eta[0][1]") && d.message.contains("5e-1"), "{}", d.message);
    }

    #[test]
    fn unknown_keys_and_missing_seed() {
        let text = format!("{SEMI}colour = 3\n");
        let diags = validate_config(&text).unwrap_err();
        assert!(diags.iter().any(|d| d.message == "unknown key: colour" && d.line == Some(8)));
        let text = SEMI.replace("seed = 7\n", "");
        let diags = validate_config(&text).unwrap_err();
        assert!(diags.iter().any(|d| d.message == "missing key: seed"));
    }

    #[test]
    fn deterministic_kinds_default_the_seed() {
        let text = "name = \"o\"\nkind = \"sphere-ode\"\noutput = \"o.csv\"\na = 0\nt0 = 0.1\nt1 = 1.9\nstep = 1e-3\n";
        let cfg = validate_config(text).unwrap();
        assert_eq!(cfg.seed, 0);
        match cfg.params {
            Params::SphereOde { alpha0, tol, .. } => {
                assert!((alpha0 - 0.05).abs() < 1e-17);
                assert_eq!(tol, 1e-8);
            }
            _ => panic!("wrong params"),
        }
    }

    #[test]
    fn unknown_kind() {
        let diags = validate_config("name = \"x\"\nkind = \"fft\"\noutput = \"x\"\n").unwrap_err();
        assert_eq!(diags[0].line, Some(2));
        assert!(diags[0].message.contains("unknown kind"));
    }

    #[test]
    fn torus_needs_half_profile() {
        let text = "name = \"p\"\nkind = \"poisson-residual\"\noutput = \"p.csv\"\nseed = 1\n\
                    geometry = \"torus\"\nprofile = \"arcsin\"\nsamples = 3\numax = 1.0\neta = [0, 1, -1, 0]\n";
        let diags = validate_config(text).unwrap_err();
        assert!(diags.iter().any(|d| d.message.contains("profile")));
    }

    #[test]
    fn weyl_symbols_are_checked() {
        let text = "name = \"w\"\nkind = \"weyl\"\noutput = \"w.csv\"\nn = 1\ngrid_size = 64\n\
                    hbar_list = [0.1]\nsymbol_f = \"X\"\nsymbol_g = \"p\"\n";
        let diags = validate_config(text).unwrap_err();
        assert!(diags.iter().any(|d| d.line == Some(8) && d.message.contains("symbol_g")), "{diags:?}");
    }
}
