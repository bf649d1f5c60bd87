//! Run configuration: defaults, an optional key=value file and command-line
//! flags, merged in that order and validated once.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::Vector3;
use spinprobe::detector::{default_charge, CouplingKind, InitialState, SwitchingFunction};
use spinprobe::numerics::Tolerance;
use spinprobe::FINE_STRUCTURE;

/// Which table to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Orbital,
    Response,
    PflipSweep,
    Rate,
    UdwCompare,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Orbital => "orbital",
            Command::Response => "response",
            Command::PflipSweep => "pflip-sweep",
            Command::Rate => "rate",
            Command::UdwCompare => "udw-compare",
            Command::Oracle => "oracle",
        }
    }

    fn default_grid(self) -> Option<&'static str> {
        match self {
            Command::Orbital => Some("1e-3:20:200:log"),
            Command::PflipSweep => Some("-6:2:161"),
            Command::Rate => Some("-3:-0.3:10"),
            _ => None,
        }
    }

    fn default_t_list(self) -> &'static str {
        match self {
            Command::Rate => "25,50,100",
            _ => "10,20,40",
        }
    }
}

/// Evenly spaced sample points, linear or logarithmic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub log: bool,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == n {
                    return self.max;
                }
                let s = i as f64 / n as f64;
                if self.log {
                    (self.min.ln() + s * (self.max / self.min).ln()).exp()
                } else {
                    self.min + s * (self.max - self.min)
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let log = match parts.get(3) {
            None => false,
            Some(&"log") => true,
            Some(&"lin") => false,
            Some(other) => bail!("grid scale must be `log` or `lin`, got `{other}`"),
        };
        if parts.len() < 3 || parts.len() > 4 {
            bail!("grid must look like <min>:<max>:<steps>[:log], got `{s}`");
        }
        let grid = Grid {
            min: parse_f64(parts[0], "grid min")?,
            max: parse_f64(parts[1], "grid max")?,
            steps: parts[2].parse().with_context(|| format!("grid steps `{}`", parts[2]))?,
            log,
        };
        if grid.steps < 2 {
            bail!("grid needs at least 2 steps");
        }
        if !(grid.max > grid.min) {
            bail!("grid max must exceed min");
        }
        if log && !(grid.min > 0.0) {
            bail!("log grid needs a positive minimum");
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.steps)?;
        if self.log {
            write!(f, ":log")?;
        }
        Ok(())
    }
}

/// Switching profile as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwitchingSpec {
    Gaussian { width: f64 },
    Window { start: f64, end: f64 },
}

impl SwitchingSpec {
    pub fn build(&self) -> Result<SwitchingFunction> {
        Ok(match *self {
            SwitchingSpec::Gaussian { width } => SwitchingFunction::gaussian(width)?,
            SwitchingSpec::Window { start, end } => SwitchingFunction::window(start, end)?,
        })
    }
}

impl FromStr for SwitchingSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| anyhow!("switching must be gaussian:T=<v> or window:<a>,<b>, got `{s}`"))?;
        match kind {
            "gaussian" => {
                let v = rest
                    .strip_prefix("T=")
                    .ok_or_else(|| anyhow!("gaussian switching needs T=<width>"))?;
                let width = parse_f64(v, "switching width")?;
                SwitchingFunction::gaussian(width)?;
                Ok(SwitchingSpec::Gaussian { width })
            }
            "window" => {
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| anyhow!("window switching needs <start>,<end>"))?;
                let (start, end) = (parse_f64(a, "window start")?, parse_f64(b, "window end")?);
                SwitchingFunction::window(start, end)?;
                Ok(SwitchingSpec::Window { start, end })
            }
            other => bail!("unknown switching `{other}`"),
        }
    }
}

impl fmt::Display for SwitchingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwitchingSpec::Gaussian { width } => write!(f, "gaussian:T={width}"),
            SwitchingSpec::Window { start, end } => write!(f, "window:{start},{end}"),
        }
    }
}

/// Every key a config file or flag may set.
pub const KEYS: &[&str] = &[
    "Z",
    "n0",
    "alpha",
    "coupling",
    "charge",
    "gap",
    "switching",
    "grid",
    "t-list",
    "tol",
    "seed",
    "draws",
    "bloch",
    "initial",
    "out",
];

/// Fully resolved configuration for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub z: u32,
    pub n0: u32,
    pub alpha: f64,
    pub coupling: CouplingKind,
    /// Spin charge q. Unruh–DeWitt runs use λ = q/2π.
    pub charge: f64,
    pub gap: f64,
    pub switching: SwitchingSpec,
    pub grid: Option<Grid>,
    pub t_list: Vec<f64>,
    pub tol: Tolerance,
    pub seed: u64,
    pub draws: usize,
    pub bloch: Option<Vector3<f64>>,
    pub initial: InitialState,
    pub out: Option<PathBuf>,
    resolved: BTreeMap<String, String>,
}

impl RunConfig {
    /// Merges `file` (if any) and `flags` over the defaults for `command`.
    pub fn resolve(command: Command, file: Option<&Path>, flags: &BTreeMap<String, String>) -> Result<Self> {
        let mut map = BTreeMap::new();
        if let Some(path) = file {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            map = parse_key_values(&text).with_context(|| format!("in config {}", path.display()))?;
        }
        for (k, v) in flags {
            check_key(k)?;
            map.insert(k.clone(), v.clone());
        }
        Self::from_map(command, map)
    }

    pub fn from_map(command: Command, mut map: BTreeMap<String, String>) -> Result<Self> {
        let alpha = match map.get("alpha") {
            Some(v) => parse_f64(v, "alpha")?,
            None => FINE_STRUCTURE,
        };
        let mut defaults = vec![
            ("Z", "1".to_string()),
            ("n0", "1".to_string()),
            ("alpha", format!("{alpha:e}")),
            ("coupling", "spin".to_string()),
            ("charge", format!("{:e}", default_charge(alpha))),
            ("gap", "-1".to_string()),
            ("switching", "gaussian:T=10".to_string()),
            ("t-list", command.default_t_list().to_string()),
            ("tol", format!("{:e}", Tolerance::default().rel)),
            ("seed", "0".to_string()),
            ("draws", "20".to_string()),
            ("initial", "excited".to_string()),
        ];
        if let Some(g) = command.default_grid() {
            defaults.push(("grid", g.to_string()));
        }
        if command == Command::UdwCompare {
            defaults.push(("bloch", "0.6,0,0.8".to_string()));
        }
        for (k, v) in defaults {
            map.entry(k.to_string()).or_insert(v);
        }
        let get = |k: &str| map.get(k).map(String::as_str);

        let z: u32 = get("Z").unwrap().parse().context("Z must be a positive integer")?;
        let n0: u32 = get("n0").unwrap().parse().context("n0 must be a positive integer")?;
        if z == 0 || n0 == 0 {
            bail!("Z and n0 must be positive");
        }
        let coupling = match get("coupling").unwrap() {
            "spin" => CouplingKind::SpinMagnetic,
            "udw-amplitude" => CouplingKind::UdwAmplitude,
            "udw-derivative" => CouplingKind::UdwDerivative,
            other => bail!("coupling must be spin, udw-amplitude or udw-derivative, got `{other}`"),
        };
        let charge = parse_f64(get("charge").unwrap(), "charge")?;
        let gap = parse_f64(get("gap").unwrap(), "gap")?;
        let switching: SwitchingSpec = get("switching").unwrap().parse()?;
        let grid = get("grid").map(str::parse).transpose()?;
        let t_list = get("t-list")
            .unwrap()
            .split(',')
            .map(|v| parse_f64(v, "t-list entry"))
            .collect::<Result<Vec<_>>>()?;
        if t_list.iter().any(|t| !(*t > 0.0)) {
            bail!("t-list entries must be positive");
        }
        let rel = parse_f64(get("tol").unwrap(), "tol")?;
        let tol = Tolerance::default().with_rel(rel)?;
        let seed = get("seed")
            .unwrap()
            .parse()
            .context("seed must be an unsigned integer")?;
        let draws = get("draws")
            .unwrap()
            .parse()
            .context("draws must be an unsigned integer")?;
        let bloch = get("bloch").map(parse_bloch).transpose()?;
        let initial = match get("initial").unwrap() {
            "ground" => InitialState::Ground,
            "excited" => InitialState::Excited,
            other => bail!("initial must be ground or excited, got `{other}`"),
        };
        let out = get("out").map(PathBuf::from);
        // the output path does not change the table
        map.remove("out");

        Ok(RunConfig {
            command,
            z,
            n0,
            alpha,
            coupling,
            charge,
            gap,
            switching,
            grid,
            t_list,
            tol,
            seed,
            draws,
            bloch,
            initial,
            out,
            resolved: map,
        })
    }

    /// One-line comment recording the resolved configuration.
    pub fn header(&self) -> String {
        let mut line = format!("# spinprobe {} units=a0", self.command.name());
        for (k, v) in &self.resolved {
            line.push_str(&format!(" {k}={v}"));
        }
        line
    }

    /// The grid, or a single point at the configured gap.
    pub fn gaps(&self) -> Vec<f64> {
        match &self.grid {
            Some(g) => g.points(),
            None => vec![self.gap],
        }
    }
}

fn check_key(k: &str) -> Result<()> {
    if KEYS.contains(&k) {
        Ok(())
    } else {
        bail!("unknown config key `{k}`")
    }
}

/// `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key = value", no + 1))?;
        let k = k.trim();
        check_key(k).with_context(|| format!("line {}", no + 1))?;
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .with_context(|| format!("{what}: `{s}` is not a number"))?;
    if !v.is_finite() {
        bail!("{what} must be finite");
    }
    Ok(v)
}

fn parse_bloch(s: &str) -> Result<Vector3<f64>> {
    let v = s
        .split(',')
        .map(|c| parse_f64(c, "bloch component"))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != 3 {
        bail!("bloch needs three components");
    }
    let a = Vector3::new(v[0], v[1], v[2]);
    if a.norm() > 1.0 + 1e-12 {
        bail!("bloch vector has |a| = {} > 1", a.norm());
    }
    Ok(a)
}
