//! Text formats for models, measures, plans, maps, reports and trajectories.
//!
//! Numbers are written with the shortest decimal that parses back to the
//! same `f64`, so every file round-trips bit for bit. Atom indices in files
//! are 1-based. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lorentz_ot::dynamics::{DynamicalCoupling, RegularityReport};
use lorentz_ot::{Coupling, DiscreteMeasure, Event, ScaleFactor, SpacetimeModel, TransportPlan};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Syntax { path: PathBuf, line: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

pub fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

pub fn write(path: &Path, contents: &str) -> Result<(), FormatError> {
    std::fs::write(path, contents).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

/// Numbered content lines with comments and blanks removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

struct Cursor<'a> {
    path: &'a Path,
}

impl Cursor<'_> {
    fn syntax(&self, line: usize, message: impl Into<String>) -> FormatError {
        FormatError::Syntax { path: self.path.to_path_buf(), line, message: message.into() }
    }

    fn invalid(&self, message: impl Into<String>) -> FormatError {
        FormatError::Invalid { path: self.path.to_path_buf(), message: message.into() }
    }

    fn numbers(&self, line: usize, text: &str) -> Result<Vec<f64>, FormatError> {
        text.split_whitespace()
            .map(|w| w.parse::<f64>().map_err(|_| self.syntax(line, format!("`{w}` is not a number"))))
            .collect()
    }

    fn key_value<'t>(&self, line: usize, text: &'t str) -> Result<(&'t str, &'t str), FormatError> {
        text.split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| self.syntax(line, "expected `key=value`"))
    }

    /// `dim=<1+d>` header, returning the spatial dimension `d`.
    fn dim(&self, line: usize, value: &str) -> Result<usize, FormatError> {
        match value.parse::<usize>() {
            Ok(n) if n >= 2 => Ok(n - 1),
            _ => Err(self.syntax(line, format!("dim must be an integer ≥ 2 (got `{value}`)"))),
        }
    }

    /// One atom line `t x1 … xd weight`.
    fn atom(&self, line: usize, text: &str, d: usize) -> Result<(Event, f64), FormatError> {
        let v = self.numbers(line, text)?;
        if v.len() != d + 2 {
            return Err(self.syntax(line, format!("expected {} numbers (t, {d} coordinates, weight), got {}", d + 2, v.len())));
        }
        let event = Event::new(v[0], v[1..=d].to_vec()).map_err(|e| self.syntax(line, e.to_string()))?;
        Ok((event, v[d + 1]))
    }
}

/// Shortest decimal that parses back to `x`, in exponent form for very
/// small or large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

// ---------------------------------------------------------------- model

/// `kind=minkowski|rw`, `dim=<1+d>`, and for `rw` one of: a single
/// `a=<value>` line, several `a=<t> <a(t)>` rows interpolated linearly, or
/// `poly=<c0> <c1> …` for `a(t) = Σ c_k t^k`.
pub fn parse_model(path: &Path, text: &str) -> Result<SpacetimeModel, FormatError> {
    let c = Cursor { path };
    let (mut kind, mut dim) = (None, None);
    let mut constant = None;
    let mut rows: Vec<(f64, f64)> = Vec::new();
    let mut poly = None;
    for (line, l) in content_lines(text) {
        let (key, value) = c.key_value(line, l)?;
        match key {
            "kind" => kind = Some((line, value.to_string())),
            "dim" => dim = Some(c.dim(line, value)?),
            "a" => match c.numbers(line, value)?[..] {
                [a] => constant = Some(a),
                [t, a] => rows.push((t, a)),
                _ => return Err(c.syntax(line, "expected `a=<value>` or `a=<t> <a(t)>`")),
            },
            "poly" => poly = Some(c.numbers(line, value)?),
            other => return Err(c.syntax(line, format!("unknown key `{other}`"))),
        }
    }
    let d = dim.ok_or_else(|| c.invalid("missing `dim=`"))?;
    let (line, kind) = kind.ok_or_else(|| c.invalid("missing `kind=`"))?;
    let model = match kind.as_str() {
        "minkowski" => SpacetimeModel::minkowski(d),
        "rw" => {
            let scale = match (constant, rows.is_empty(), poly) {
                (Some(a), true, None) => ScaleFactor::Constant(a),
                (None, false, None) => ScaleFactor::Table(rows),
                (None, true, Some(c)) => ScaleFactor::Polynomial(c),
                _ => return Err(c.invalid("rw models need exactly one of `a=<value>`, `a=<t> <a(t)>` rows or `poly=`")),
            };
            SpacetimeModel::robertson_walker(d, scale)
        }
        other => return Err(c.syntax(line, format!("unknown kind `{other}` (expected minkowski or rw)"))),
    };
    model.map_err(|e| c.invalid(e.to_string()))
}

pub fn format_model(model: &SpacetimeModel) -> String {
    let mut s = String::new();
    match model {
        SpacetimeModel::Minkowski { spatial_dim } => {
            let _ = writeln!(s, "kind=minkowski\ndim={}", spatial_dim + 1);
        }
        SpacetimeModel::RobertsonWalker { spatial_dim, scale } => {
            let _ = writeln!(s, "kind=rw\ndim={}", spatial_dim + 1);
            match scale {
                ScaleFactor::Constant(a) => {
                    let _ = writeln!(s, "a={}", num(*a));
                }
                ScaleFactor::Table(rows) => {
                    for (t, a) in rows {
                        let _ = writeln!(s, "a={} {}", num(*t), num(*a));
                    }
                }
                ScaleFactor::Polynomial(c) => {
                    let c: Vec<String> = c.iter().map(|&x| num(x)).collect();
                    let _ = writeln!(s, "poly={}", c.join(" "));
                }
            }
        }
    }
    s
}

// ---------------------------------------------------------------- measure

fn write_atoms(s: &mut String, points: &[Event], weights: &[f64]) {
    for (p, w) in points.iter().zip(weights) {
        let _ = write!(s, "{}", num(p.t));
        for &x in &p.x {
            let _ = write!(s, " {}", num(x));
        }
        let _ = writeln!(s, " {}", num(*w));
    }
}

/// Header `dim=<1+d>`, then `t x1 … xd weight` per atom.
pub fn parse_measure(path: &Path, text: &str) -> Result<DiscreteMeasure, FormatError> {
    let c = Cursor { path };
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| c.invalid("empty measure file"))?;
    let (key, value) = c.key_value(line, header)?;
    if key != "dim" {
        return Err(c.syntax(line, "measure files start with `dim=<1+d>`"));
    }
    let d = c.dim(line, value)?;
    let (mut points, mut weights) = (Vec::new(), Vec::new());
    for (line, l) in lines {
        let (p, w) = c.atom(line, l, d)?;
        points.push(p);
        weights.push(w);
    }
    DiscreteMeasure::new(points, weights).map_err(|e| c.invalid(e.to_string()))
}

pub fn format_measure(m: &DiscreteMeasure) -> String {
    let mut s = format!("dim={}\n", m.spatial_dim() + 1);
    write_atoms(&mut s, m.points(), m.weights());
    s
}

// ---------------------------------------------------------------- plan

/// A solved plan with the measures it couples.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanFile {
    pub mu: DiscreteMeasure,
    pub nu: DiscreteMeasure,
    pub plan: TransportPlan,
}

const SECTIONS: [&str; 5] = ["sources", "targets", "coupling", "psi", "phi"];

/// ```text
/// dim=<1+d>
/// denominator=<N>
/// sources
/// t x1 … xd weight
/// targets
/// t x1 … xd weight
/// coupling
/// i j mass
/// psi
/// ψ_1 … ψ_m
/// phi
/// φ_1 … φ_n
/// primal=<value>
/// dual=<value>
/// ```
pub fn format_plan(f: &PlanFile) -> String {
    let p = &f.plan;
    let mut s = format!("dim={}\ndenominator={}\nsources\n", f.mu.spatial_dim() + 1, p.coupling.denominator());
    write_atoms(&mut s, f.mu.points(), f.mu.weights());
    s.push_str("targets\n");
    write_atoms(&mut s, f.nu.points(), f.nu.weights());
    s.push_str("coupling\n");
    for (i, j, _) in p.coupling.support() {
        let _ = writeln!(s, "{} {} {}", i + 1, j + 1, num(p.coupling.mass(i, j)));
    }
    let join = |v: &[f64]| v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ");
    let _ = writeln!(s, "psi\n{}\nphi\n{}", join(&p.psi), join(&p.phi));
    let _ = writeln!(s, "primal={}\ndual={}", num(p.primal_cost), num(p.dual_cost));
    s
}

pub fn parse_plan(path: &Path, text: &str) -> Result<PlanFile, FormatError> {
    let c = Cursor { path };
    let (mut dim, mut den, mut primal, mut dual) = (None, None, None, None);
    let mut section = "";
    let (mut src, mut tgt) = ((Vec::new(), Vec::new()), (Vec::new(), Vec::new()));
    let mut entries: Vec<(usize, usize, f64, usize)> = Vec::new();
    let (mut psi, mut phi) = (Vec::new(), Vec::new());
    for (line, l) in content_lines(text) {
        if SECTIONS.contains(&l) {
            section = SECTIONS.iter().find(|s| **s == l).expect("listed");
            continue;
        }
        if l.contains('=') {
            let (key, value) = c.key_value(line, l)?;
            let number = || value.parse::<f64>().map_err(|_| c.syntax(line, format!("`{value}` is not a number")));
            match key {
                "dim" => dim = Some(c.dim(line, value)?),
                "denominator" => {
                    den = Some(value.parse::<u64>().ok().filter(|&n| n > 0).ok_or_else(|| c.syntax(line, "bad denominator"))?)
                }
                "primal" => primal = Some(number()?),
                "dual" => dual = Some(number()?),
                other => return Err(c.syntax(line, format!("unknown key `{other}`"))),
            }
            section = "";
            continue;
        }
        match section {
            "sources" | "targets" => {
                let d = dim.ok_or_else(|| c.syntax(line, "`dim=` must precede the atoms"))?;
                let (p, w) = c.atom(line, l, d)?;
                let side = if section == "sources" { &mut src } else { &mut tgt };
                side.0.push(p);
                side.1.push(w);
            }
            "coupling" => {
                let words: Vec<&str> = l.split_whitespace().collect();
                let index = |w: &str| w.parse::<usize>().ok().filter(|&k| k >= 1).map(|k| k - 1);
                match words[..] {
                    [i, j, m] => {
                        let (Some(i), Some(j)) = (index(i), index(j)) else {
                            return Err(c.syntax(line, "indices are positive integers"));
                        };
                        let mass = c.numbers(line, m)?[0];
                        entries.push((i, j, mass, line));
                    }
                    _ => return Err(c.syntax(line, "expected `i j mass`")),
                }
            }
            "psi" => psi.extend(c.numbers(line, l)?),
            "phi" => phi.extend(c.numbers(line, l)?),
            _ => return Err(c.syntax(line, "data outside of a section")),
        }
    }
    let den = den.ok_or_else(|| c.invalid("missing `denominator=`"))?;
    let mu = DiscreteMeasure::new(src.0, src.1).map_err(|e| c.invalid(format!("sources: {e}")))?;
    let nu = DiscreteMeasure::new(tgt.0, tgt.1).map_err(|e| c.invalid(format!("targets: {e}")))?;
    let mut coupling = Coupling::zeros(mu.len(), nu.len(), den);
    for (i, j, mass, line) in entries {
        if i >= mu.len() || j >= nu.len() {
            return Err(c.syntax(line, format!("pair ({}, {}) out of range", i + 1, j + 1)));
        }
        let count = (mass * den as f64).round();
        if count < 1.0 || (count / den as f64 - mass).abs() > 1e-9 {
            return Err(c.syntax(line, format!("mass {mass} is not a positive multiple of 1/{den}")));
        }
        coupling.add(i, j, count as u64);
    }
    if psi.len() != mu.len() || phi.len() != nu.len() {
        return Err(c.invalid("psi and phi must have one entry per source and target"));
    }
    let plan = TransportPlan {
        coupling,
        primal_cost: primal.ok_or_else(|| c.invalid("missing `primal=`"))?,
        dual_cost: dual.ok_or_else(|| c.invalid("missing `dual=`"))?,
        psi,
        phi,
    };
    Ok(PlanFile { mu, nu, plan })
}

// ---------------------------------------------------------------- other outputs

/// `i j mass` per support pair, 1-based.
pub fn format_coupling(c: &Coupling) -> String {
    let mut s = String::new();
    for (i, j, _) in c.support() {
        let _ = writeln!(s, "{} {} {}", i + 1, j + 1, num(c.mass(i, j)));
    }
    s
}

/// `i -> j` per source, 1-based.
pub fn format_map(map: &[usize]) -> String {
    map.iter().enumerate().map(|(i, j)| format!("{} -> {}\n", i + 1, j + 1)).collect()
}

/// A value printable in a report.
pub trait ReportValue {
    fn render(&self) -> String;
}

impl ReportValue for f64 {
    fn render(&self) -> String {
        num(*self)
    }
}

macro_rules! display_value {
    ($($t:ty),*) => {$(
        impl ReportValue for $t {
            fn render(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

display_value!(usize, u64, bool, &str, String);

/// Ordered `key = value` lines.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: &str, value: impl ReportValue) -> &mut Self {
        self.entries.push((key.to_string(), value.render()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn regularity(&mut self, r: &RegularityReport) -> &mut Self {
        self.push("eps_time", r.eps_time)
            .push("pairs_tested", r.pairs_tested)
            .push("max_ratio", r.max_ratio)
            .push("fitted_exponent", r.fitted_exponent)
            .push("fit_intercept", r.fit_intercept)
            .push("fit_points", r.fit_points)
            .push("crossings", r.crossings)
            .push("degenerate", r.degenerate)
            .push("disjoint_supports", r.disjoint_supports)
    }

    pub fn parse(text: &str) -> Self {
        let entries = content_lines(text)
            .filter_map(|(_, l)| l.split_once(" = ").map(|(k, v)| (k.to_string(), v.to_string())))
            .collect();
        Report { entries }
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// `path_id s t x1 … xd mass` per stored geodesic sample, paths 1-based.
pub fn format_trajectories(dc: &DynamicalCoupling) -> String {
    let mut s = String::from("# path_id s t x1 ... xd mass\n");
    for (k, p) in dc.paths().iter().enumerate() {
        let mass = dc.mass(k);
        for sample in p.geodesic.samples() {
            let _ = write!(s, "{} {} {}", k + 1, num(sample.s), num(sample.point.t));
            for &x in &sample.point.x {
                let _ = write!(s, " {}", num(x));
            }
            let _ = writeln!(s, " {}", num(mass));
        }
    }
    s
}
