//! Experiment configuration: JSON file, command-line overrides, defaults and
//! validation.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sqrw_core::sweep::SweepConfig;
use sqrw_core::{Coord, Geometry};

/// Default output directory when neither `--out` nor the config sets one.
pub const OUTPUT_DIR_ENV: &str = "SQRW_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Snapshot,
    Sweep,
    Blind,
    Walls,
    Maze,
    LatticeCompare,
    Trend,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Kind::Snapshot => "snapshot",
            Kind::Sweep => "sweep",
            Kind::Blind => "blind",
            Kind::Walls => "walls",
            Kind::Maze => "maze",
            Kind::LatticeCompare => "lattice-compare",
            Kind::Trend => "trend",
        };
        f.write_str(name)
    }
}

/// A configuration problem, reported with exit status 1.
#[derive(Debug)]
pub struct ConfigError(pub Vec<String>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration:")?;
        for v in &self.0 {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub fn single(msg: impl Into<String>) -> Self {
        ConfigError(vec![msg.into()])
    }
}

/// Everything needed to reproduce one run. Signed step and radius fields keep
/// negative values reportable instead of failing to parse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default = "default_dims")]
    pub dims: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<usize>>,
    /// Unitary steps for a snapshot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_max: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<i64>,
    /// Random walls for snapshot and sweep, drawn as ensemble sample `sample`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walls: Option<usize>,
    #[serde(default)]
    pub sample: usize,
    /// Geometry file for snapshot and sweep; overrides `dims`, `n` and `walls`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<PathBuf>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wall_counts: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<[usize; 2]>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_dims() -> usize {
    2
}

fn default_samples() -> usize {
    50
}

impl ExperimentConfig {
    pub fn new(kind: Kind) -> Self {
        ExperimentConfig {
            kind,
            dims: 2,
            n: None,
            f: None,
            s: None,
            steps: None,
            u_max: None,
            r_max: None,
            walls: None,
            sample: 0,
            geometry: None,
            samples: default_samples(),
            wall_counts: Vec::new(),
            sizes: Vec::new(),
            pairs: Vec::new(),
            seed: 0,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::single(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::single(format!("config file {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fills every default that depends on the kind, so the stored config
    /// reruns the experiment without further context.
    pub fn resolve(&mut self) -> Result<(), ConfigError> {
        if let Some(path) = &self.geometry {
            let file = read_geometry(path).map_err(|e| ConfigError::single(format!("geometry {}: {e}", path.display())))?;
            self.dims = file.dims();
            self.n = Some(file.side());
            self.walls = None;
        }
        if self.n.is_none() {
            self.n = match self.kind {
                Kind::Snapshot | Kind::Sweep | Kind::Blind => Some(100),
                Kind::Walls | Kind::Maze => Some(40),
                Kind::LatticeCompare | Kind::Trend => None,
            };
        }
        match self.kind {
            Kind::Trend if self.sizes.is_empty() => self.sizes = (1..=10).map(|k| 10 * k).collect(),
            Kind::LatticeCompare if self.pairs.is_empty() => self.pairs = vec![[100, 22]],
            _ => {}
        }
        if let (Some(n), true) = (self.n, self.uses_sweep_bounds()) {
            let walled = matches!(self.kind, Kind::Walls | Kind::Maze) || self.walls.unwrap_or(0) > 0;
            let defaults = if walled {
                SweepConfig::walled(n)
            } else {
                SweepConfig::open_for(self.dims, n)
            };
            self.u_max.get_or_insert(defaults.max_steps as i64);
            self.r_max.get_or_insert(defaults.max_radius as i64);
        }
        Ok(())
    }

    fn uses_sweep_bounds(&self) -> bool {
        matches!(self.kind, Kind::Sweep | Kind::Blind | Kind::Walls | Kind::Maze)
    }

    /// Sweep bounds after [`resolve`](Self::resolve); `None` for kinds that
    /// use fixed bounds.
    pub fn sweep_config(&self) -> Option<SweepConfig> {
        Some(SweepConfig {
            max_steps: usize::try_from(self.u_max?).ok()?,
            max_radius: usize::try_from(self.r_max?).ok()?,
        })
    }

    pub fn side(&self) -> usize {
        self.n.unwrap_or(0)
    }

    pub fn target(&self) -> Option<Coord> {
        self.f.as_deref().map(to_coord)
    }

    pub fn start(&self) -> Option<Coord> {
        self.s.as_deref().map(to_coord)
    }

    /// Range checks only; nothing is run.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.side();
        if self.geometry.is_some() && !matches!(self.kind, Kind::Snapshot | Kind::Sweep) {
            out.push(format!("geometry: only snapshot and sweep accept a geometry file, not {}", self.kind));
        }
        if !(self.dims == 2 || self.dims == 3) {
            out.push(format!("dims: must be 2 or 3, got {}", self.dims));
        }
        if self.dims == 3 && !matches!(self.kind, Kind::Snapshot | Kind::Sweep) {
            out.push(format!("dims: {} runs on planar grids only", self.kind));
        }
        let min_n = match self.kind {
            Kind::Blind | Kind::Walls | Kind::Maze => 4,
            _ => 2,
        };
        if self.n.is_some() && n < min_n {
            out.push(format!("n: must be at least {min_n} for {}, got {n}", self.kind));
        }

        let needs_target = matches!(self.kind, Kind::Snapshot | Kind::Sweep | Kind::Walls | Kind::Maze);
        match (&self.f, needs_target) {
            (None, true) => out.push(format!("f: target F is required for {}", self.kind)),
            (Some(_), false) => out.push(format!("f: not used by {}", self.kind)),
            (Some(f), true) => self.check_node("f", "F", f, &mut out),
            _ => {}
        }
        if let Some(s) = &self.s {
            if !matches!(self.kind, Kind::Snapshot | Kind::Sweep) {
                out.push(format!("s: a second marked node is only used by snapshot and sweep, not {}", self.kind));
            } else {
                self.check_node("s", "S", s, &mut out);
                if self.f.as_ref() == Some(s) {
                    out.push("s: S must differ from F".to_string());
                }
            }
        }

        match (self.kind, self.steps) {
            (Kind::Snapshot, None) => out.push("steps: required for snapshot".to_string()),
            (Kind::Snapshot, Some(k)) if k < 0 => out.push(format!("steps: must be >= 0, got {k}")),
            (Kind::Snapshot, _) | (_, None) => {}
            (kind, Some(_)) => out.push(format!("steps: not used by {kind}")),
        }
        if let Some(u) = self.u_max {
            if u < 0 {
                out.push(format!("u_max: must be >= 0, got {u}"));
            }
        }
        if let Some(r) = self.r_max {
            if r < 0 {
                out.push(format!("r_max: must be >= 0, got {r}"));
            }
        }

        let max_walls = if self.dims == 2 && n >= 1 { (n - 1) * (n - 1) } else { usize::MAX };
        let wall_limit = |w: usize, field: &str, out: &mut Vec<String>| {
            if w > max_walls {
                out.push(format!("{field}: wall count {w} exceeds (N−1)² = {max_walls}"));
            }
        };
        if let Some(w) = self.walls {
            if !matches!(self.kind, Kind::Snapshot | Kind::Sweep) {
                out.push(format!("walls: not used by {}", self.kind));
            } else if self.dims != 2 {
                out.push("walls: random walls are only placed on planar grids".to_string());
            } else {
                wall_limit(w, "walls", &mut out);
            }
        }
        match self.kind {
            Kind::Walls => {
                if self.wall_counts.is_empty() {
                    out.push("wall_counts: at least one wall count is required".to_string());
                }
                for &w in &self.wall_counts {
                    wall_limit(w, "wall_counts", &mut out);
                }
            }
            _ if !self.wall_counts.is_empty() => out.push(format!("wall_counts: not used by {}", self.kind)),
            _ => {}
        }
        if matches!(self.kind, Kind::Walls | Kind::Maze) && self.samples == 0 {
            out.push("samples: must be at least 1".to_string());
        }
        if self.kind == Kind::Trend {
            for &size in self.sizes.iter().filter(|&&s| s < 4) {
                out.push(format!("sizes: grid size {size} is below the minimum 4"));
            }
        }
        if self.kind == Kind::LatticeCompare {
            for &[g, l] in &self.pairs {
                if g < 2 || l < 2 {
                    out.push(format!("pairs: sizes must be at least 2, got [{g}, {l}]"));
                }
            }
        }
        out
    }

    fn check_node(&self, field: &str, label: &str, c: &[usize], out: &mut Vec<String>) {
        let n = self.side();
        if c.len() != self.dims {
            out.push(format!("{field}: {label} needs {} coordinates, got {}", self.dims, c.len()));
        } else if c.iter().any(|&k| k < 1 || k > n) {
            out.push(format!("{field}: {label} {c:?} outside grid (coordinates run from 1 to {n})"));
        }
    }

    /// Geometry for snapshot and sweep.
    pub fn build_geometry(&self) -> sqrw_core::Result<Geometry> {
        if let Some(path) = &self.geometry {
            return read_geometry(path);
        }
        let n = self.side();
        match (self.dims, self.walls) {
            (3, _) => Geometry::lattice(n),
            (_, Some(w)) if w > 0 => sqrw_core::sweep::sample_geometry(n, w, self.sample, self.seed),
            _ => Geometry::grid(n),
        }
    }
}

fn read_geometry(path: &Path) -> sqrw_core::Result<Geometry> {
    Geometry::read_json(std::fs::File::open(path)?)
}

fn to_coord(c: &[usize]) -> Coord {
    match *c {
        [x, y] => Coord::planar(x, y),
        [x, y, z] => Coord::cubic(x, y, z),
        _ => Coord::planar(0, 0),
    }
}

/// A parsed comma list; a single clap value, unlike a bare `Vec`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct List<T>(pub Vec<T>);

/// Command-line overrides shared by every experiment.
#[derive(Args, Clone, Debug, Default)]
pub struct ExperimentArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// 2 for a grid, 3 for a cubic lattice.
    #[arg(long)]
    pub dims: Option<usize>,
    /// Side length N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Target F, e.g. `40,50`.
    #[arg(long, value_parser = parse_node, allow_hyphen_values = true)]
    pub f: Option<List<usize>>,
    /// Second marked node S.
    #[arg(long, value_parser = parse_node, allow_hyphen_values = true)]
    pub s: Option<List<usize>>,
    /// Unitary steps for a snapshot.
    #[arg(long, allow_hyphen_values = true)]
    pub steps: Option<i64>,
    /// Largest U_s swept.
    #[arg(long, allow_hyphen_values = true)]
    pub u_max: Option<i64>,
    /// Largest search radius swept.
    #[arg(long, allow_hyphen_values = true)]
    pub r_max: Option<i64>,
    /// Random wall count for snapshot and sweep.
    #[arg(long)]
    pub walls: Option<usize>,
    /// Ensemble sample id used to draw `--walls`.
    #[arg(long)]
    pub sample: Option<usize>,
    /// Geometry JSON file for snapshot and sweep.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Samples per wall count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Wall counts: `0..1521:100`, `0..=1500:100` or `0,100,200`.
    #[arg(long, value_parser = parse_counts)]
    pub counts: Option<List<usize>>,
    /// Grid sizes for `trend`, same syntax as `--counts`.
    #[arg(long, value_parser = parse_counts)]
    pub sizes: Option<List<usize>>,
    /// Grid/lattice pairs for `lattice-compare`, e.g. `100:22,40:12`.
    #[arg(long, value_parser = parse_pairs)]
    pub pairs: Option<List<[usize; 2]>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ExperimentArgs {
    /// File values first, then flags on top.
    pub fn into_config(self, kind: Kind) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let cfg = ExperimentConfig::load(path)?;
                if cfg.kind != kind {
                    return Err(ConfigError::single(format!(
                        "kind: config file describes {}, command is {kind}",
                        cfg.kind
                    )));
                }
                cfg
            }
            None => ExperimentConfig::new(kind),
        };
        self.apply(&mut cfg);
        Ok(cfg)
    }

    pub fn apply(self, cfg: &mut ExperimentConfig) {
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            };
            ($field:ident, opt) => {
                if self.$field.is_some() {
                    cfg.$field = self.$field;
                }
            };
        }
        set!(dims);
        set!(n, opt);
        if let Some(v) = self.f {
            cfg.f = Some(v.0);
        }
        if let Some(v) = self.s {
            cfg.s = Some(v.0);
        }
        set!(steps, opt);
        set!(u_max, opt);
        set!(r_max, opt);
        set!(walls, opt);
        set!(sample);
        set!(geometry, opt);
        set!(samples);
        if let Some(v) = self.sizes {
            cfg.sizes = v.0;
        }
        if let Some(v) = self.pairs {
            cfg.pairs = v.0;
        }
        set!(seed);
        if let Some(v) = self.counts {
            cfg.wall_counts = v.0;
        }
        if self.out.is_some() {
            cfg.output = self.out;
        }
    }
}

/// `40,50`, `[40,50]` or `1,2,3`. Zero is accepted here and reported by
/// validation.
pub fn parse_node(s: &str) -> Result<List<usize>, String> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts = inner
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad coordinate {p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("expected 2 or 3 coordinates, got {}", parts.len()));
    }
    Ok(List(parts))
}

/// `a..b:step` (end exclusive), `a..=b:step`, or a comma list.
pub fn parse_counts(s: &str) -> Result<List<usize>, String> {
    let num = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("bad number {p:?}: {e}"));
    let Some((start, rest)) = s.split_once("..") else {
        return s.split(',').map(num).collect::<Result<_, _>>().map(List);
    };
    let (end, step) = match rest.split_once(':') {
        Some((end, step)) => (end, num(step)?),
        None => (rest, 1),
    };
    if step == 0 {
        return Err("step must be positive".to_string());
    }
    let start = num(start)?;
    let values: Vec<usize> = match end.strip_prefix('=') {
        Some(end) => (start..=num(end)?).step_by(step).collect(),
        None => (start..num(end)?).step_by(step).collect(),
    };
    if values.is_empty() {
        return Err(format!("range {s:?} is empty"));
    }
    Ok(List(values))
}

/// `100:22,40:12`.
pub fn parse_pairs(s: &str) -> Result<List<[usize; 2]>, String> {
    s.split(',')
        .map(|pair| {
            let (g, l) = pair.split_once(':').ok_or_else(|| format!("expected grid:lattice, got {pair:?}"))?;
            let g = g.trim().parse().map_err(|e| format!("bad grid size {g:?}: {e}"))?;
            let l = l.trim().parse().map_err(|e| format!("bad lattice size {l:?}: {e}"))?;
            Ok([g, l])
        })
        .collect::<Result<_, _>>()
        .map(List)
}
