//! Batch experiment runner behind the `ergolab` binary.
//!
//! Configs are flat `key = value` files; lists are comma separated and `#`
//! starts a comment. Every run produces one CSV table and a text summary.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cocycle_rep::{
    cocycle_check, matrix_element, parse_group_table, Cocycle, FiberGroup, FiniteGroup, GroupElement,
};
use crate::error::{ErgoError, Result};
use crate::koopman::{cauchy_diagnostic, weighted_average, ww_scan, Observable};
use crate::output::{Cell, Table};
use crate::semigroup::{character_grid, exclude_near, Character, FolnerBox};
use crate::skew_ergodic::{
    irrep_mean_verdict, mean_ergodicity_verdict, unique_ergodicity_probe, ProbeParams, Verdict,
};
use crate::systems::{golden_alpha, DynamicalSystem, StatePoint, SubshiftPoint};

/// Experiments the runner knows about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Avg,
    WwScan,
    CocycleCheck,
    SkewErgodicity,
    UniqueErgodicity,
    DerndingerDemo,
}

impl FromStr for Command {
    type Err = ErgoError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "avg" => Command::Avg,
            "ww-scan" => Command::WwScan,
            "cocycle-check" => Command::CocycleCheck,
            "skew-ergodicity" => Command::SkewErgodicity,
            "unique-ergodicity" => Command::UniqueErgodicity,
            "derndinger-demo" => Command::DerndingerDemo,
            other => return Err(ErgoError::invalid(format!("unknown command `{other}`"))),
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Avg => "avg",
            Command::WwScan => "ww-scan",
            Command::CocycleCheck => "cocycle-check",
            Command::SkewErgodicity => "skew-ergodicity",
            Command::UniqueErgodicity => "unique-ergodicity",
            Command::DerndingerDemo => "derndinger-demo",
        })
    }
}

/// Catalog systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemSpec {
    Rotation,
    Derndinger,
    Anzai,
    Skew,
}

/// Catalog fiber groups.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupSpec {
    Cyclic(usize),
    S3,
    Torus,
    File(PathBuf),
}

/// Catalog cocycles; their parameters come from `cocycle_values`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CocycleSpec {
    Identity,
    Constant,
    TorusExp,
    CoordSwitch,
    Table,
}

/// Catalog observables.
#[derive(Clone, Debug, PartialEq)]
pub enum ObservableSpec {
    One,
    Exp(i64),
    Coord(u64),
    Fiber(i64),
    ExpFiber(i64, i64),
    /// Matrix element `π_ij` of a named irrep, as a function of the fiber.
    Irrep(String, usize, usize),
}

impl FromStr for ObservableSpec {
    type Err = ErgoError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || ErgoError::invalid(format!("unknown observable `{s}`"));
        let int = |t: &str| t.parse::<i64>().map_err(|_| bad());
        if s == "one" {
            return Ok(ObservableSpec::One);
        }
        if let Some((a, b)) = s.split_once('*') {
            let k = a.strip_prefix("exp-").ok_or_else(bad)?;
            let j = b.strip_prefix("fiber-").ok_or_else(bad)?;
            return Ok(ObservableSpec::ExpFiber(int(k)?, int(j)?));
        }
        if let Some(k) = s.strip_prefix("exp-") {
            return Ok(ObservableSpec::Exp(int(k)?));
        }
        if let Some(k) = s.strip_prefix("fiber-") {
            return Ok(ObservableSpec::Fiber(int(k)?));
        }
        if let Some(n) = s.strip_prefix("coord-") {
            let n = n.parse::<u64>().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            return Ok(ObservableSpec::Coord(n));
        }
        if let Some(rest) = s.strip_prefix("irrep:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() == 3 {
                let i = parts[1].parse().map_err(|_| bad())?;
                let j = parts[2].parse().map_err(|_| bad())?;
                return Ok(ObservableSpec::Irrep(parts[0].to_string(), i, j));
            }
        }
        Err(bad())
    }
}

/// A parsed experiment description.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub system: SystemSpec,
    /// Rotation generators, one circle angle per semigroup axis.
    pub alpha: Vec<f64>,
    pub uniquely_ergodic: bool,
    /// Base system of a `skew` system.
    pub base: SystemSpec,
    pub observables: Vec<ObservableSpec>,
    pub theta: Option<Vec<f64>>,
    pub theta_lo: Vec<f64>,
    pub theta_hi: Vec<f64>,
    pub theta_steps: usize,
    pub exclude_resonant: bool,
    pub group: Option<GroupSpec>,
    pub cocycle: Option<CocycleSpec>,
    pub cocycle_values: Vec<String>,
    pub torus_characters: Vec<i64>,
    pub windows: Vec<u64>,
    pub samples: usize,
    pub points: Vec<String>,
    pub tolerance: f64,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            system: SystemSpec::Rotation,
            alpha: vec![golden_alpha()],
            uniquely_ergodic: true,
            base: SystemSpec::Rotation,
            observables: vec![ObservableSpec::Exp(1)],
            theta: None,
            theta_lo: vec![0.0],
            theta_hi: vec![1.0],
            theta_steps: 64,
            exclude_resonant: true,
            group: None,
            cocycle: None,
            cocycle_values: Vec::new(),
            torus_characters: vec![0, 1, 2, 3],
            windows: vec![10_000],
            samples: 8,
            points: Vec::new(),
            tolerance: 0.05,
            trials: 1000,
            seed: 0,
            out: None,
        }
    }
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(item)
        .collect()
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ErgoError::invalid(format!("`{s}` is not a finite number")))
}

/// Nonnegative integers, also in scientific form such as `1e4`.
fn parse_count(s: &str) -> Result<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let err = || ErgoError::invalid(format!("`{s}` is not a nonnegative integer"));
    let v: f64 = s.parse().map_err(|_| err())?;
    if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(err())
    }
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ErgoError::invalid(format!("`{s}` is not a boolean"))),
    }
}

fn parse_system(s: &str) -> Result<SystemSpec> {
    Ok(match s {
        "rotation" => SystemSpec::Rotation,
        "derndinger" => SystemSpec::Derndinger,
        "anzai" => SystemSpec::Anzai,
        "skew" => SystemSpec::Skew,
        other => return Err(ErgoError::invalid(format!("unknown system `{other}`"))),
    })
}

fn parse_group(s: &str) -> Result<GroupSpec> {
    if let Some(path) = s.strip_prefix("file:") {
        return Ok(GroupSpec::File(PathBuf::from(path)));
    }
    match s {
        "S3" => return Ok(GroupSpec::S3),
        "T" => return Ok(GroupSpec::Torus),
        _ => {}
    }
    s.strip_prefix('Z')
        .and_then(|m| m.parse::<usize>().ok())
        .filter(|&m| m >= 1)
        .map(GroupSpec::Cyclic)
        .ok_or_else(|| ErgoError::invalid(format!("unknown group `{s}`")))
}

fn parse_cocycle(s: &str) -> Result<CocycleSpec> {
    Ok(match s {
        "identity" => CocycleSpec::Identity,
        "constant" => CocycleSpec::Constant,
        "torus-exp" => CocycleSpec::TorusExp,
        "coord-switch" => CocycleSpec::CoordSwitch,
        "table" => CocycleSpec::Table,
        other => return Err(ErgoError::invalid(format!("unknown cocycle `{other}`"))),
    })
}

fn apply_key(cfg: &mut ExperimentConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "command" => cfg.command = Some(value.parse()?),
        "system" => cfg.system = parse_system(value)?,
        "base" => {
            cfg.base = parse_system(value)?;
            if !matches!(cfg.base, SystemSpec::Rotation | SystemSpec::Derndinger) {
                return Err(ErgoError::invalid("base must be `rotation` or `derndinger`"));
            }
        }
        "alpha" => cfg.alpha = parse_list(value, parse_f64)?,
        "uniquely_ergodic" => cfg.uniquely_ergodic = parse_bool(value)?,
        "observable" => cfg.observables = parse_list(value, |s| s.parse())?,
        "theta" => cfg.theta = Some(parse_list(value, parse_f64)?),
        "theta_lo" => cfg.theta_lo = parse_list(value, parse_f64)?,
        "theta_hi" => cfg.theta_hi = parse_list(value, parse_f64)?,
        "theta_steps" => cfg.theta_steps = parse_count(value)? as usize,
        "exclude_resonant" => cfg.exclude_resonant = parse_bool(value)?,
        "group" => cfg.group = Some(parse_group(value)?),
        "cocycle" => cfg.cocycle = Some(parse_cocycle(value)?),
        "cocycle_values" => cfg.cocycle_values = parse_list(value, |s| Ok(s.to_string()))?,
        "torus_characters" => {
            cfg.torus_characters = parse_list(value, |s| {
                s.parse::<i64>()
                    .map_err(|_| ErgoError::invalid(format!("`{s}` is not an integer")))
            })?
        }
        "windows" => {
            let w = parse_list(value, parse_count)?;
            if w.is_empty() || w.contains(&0) {
                return Err(ErgoError::invalid("windows must be positive"));
            }
            if w.windows(2).any(|p| p[0] >= p[1]) {
                return Err(ErgoError::invalid("windows must be strictly increasing"));
            }
            cfg.windows = w;
        }
        "samples" => cfg.samples = parse_count(value)? as usize,
        "points" => cfg.points = parse_list(value, |s| Ok(s.to_string()))?,
        "tolerance" => {
            cfg.tolerance = parse_f64(value)?;
            if cfg.tolerance <= 0.0 {
                return Err(ErgoError::invalid("tolerance must be positive"));
            }
        }
        "trials" => cfg.trials = parse_count(value)? as usize,
        "seed" => cfg.seed = parse_count(value)?,
        "out" => cfg.out = Some(PathBuf::from(value)),
        other => return Err(ErgoError::invalid(format!("unknown key `{other}`"))),
    }
    Ok(())
}

/// Parses a `key = value` config. Errors carry the 1-based line number.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parse_err = |message: String| ErgoError::Parse { line, message };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected `key = value`, found `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if seen.iter().any(|k| k == key) {
            return Err(parse_err(format!("duplicate key `{key}`")));
        }
        seen.push(key.to_string());
        apply_key(&mut cfg, key, value).map_err(|e| match e {
            ErgoError::InvalidArgument(m) => parse_err(m),
            other => parse_err(other.to_string()),
        })?;
    }
    Ok(cfg)
}

/// Output of one run: the CSV table and a human-readable summary.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub table: Table,
    pub summary: String,
}

/// Process exit status for an error: 2 for invalid configurations, 3 for
/// numerical failures, 1 for I/O problems.
pub fn exit_code(err: &ErgoError) -> i32 {
    match err {
        ErgoError::Numerical(_) => 3,
        ErgoError::Io(_) | ErgoError::Csv(_) => 1,
        _ => 2,
    }
}

fn build_group(spec: &GroupSpec) -> Result<FiberGroup> {
    Ok(match spec {
        GroupSpec::Cyclic(m) => FiberGroup::finite(FiniteGroup::cyclic(*m)?),
        GroupSpec::S3 => FiberGroup::finite(FiniteGroup::s3()),
        GroupSpec::Torus => FiberGroup::Torus,
        GroupSpec::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                ErgoError::invalid(format!("cannot read group table {}: {e}", path.display()))
            })?;
            FiberGroup::finite(parse_group_table(&text)?)
        }
    })
}

fn parse_element(group: &FiberGroup, s: &str) -> Result<GroupElement> {
    let w = match group {
        FiberGroup::Torus => GroupElement::torus(parse_f64(s)?),
        FiberGroup::Finite(_) => GroupElement::Finite(parse_count(s)? as usize),
        FiberGroup::Unitary(_) => {
            return Err(ErgoError::invalid("U(N) cocycles are not available from configs"))
        }
    };
    if group.contains(&w) {
        Ok(w)
    } else {
        Err(ErgoError::invalid(format!("`{s}` is not an element of {group}")))
    }
}

fn build_base(cfg: &ExperimentConfig, spec: SystemSpec) -> Result<DynamicalSystem> {
    match spec {
        SystemSpec::Rotation => {
            DynamicalSystem::rotation(cfg.alpha.iter().map(|&a| vec![a]).collect(), cfg.uniquely_ergodic)
        }
        SystemSpec::Derndinger => Ok(DynamicalSystem::derndinger()),
        _ => Err(ErgoError::invalid("base must be `rotation` or `derndinger`")),
    }
}

fn build_cocycle(cfg: &ExperimentConfig, dim: usize) -> Result<Cocycle> {
    let spec = cfg
        .cocycle
        .ok_or_else(|| ErgoError::invalid("missing key `cocycle`"))?;
    if spec == CocycleSpec::TorusExp {
        let k = match cfg.cocycle_values.as_slice() {
            [] => 1,
            [k] => k
                .parse::<i64>()
                .map_err(|_| ErgoError::invalid(format!("`{k}` is not an integer")))?,
            _ => return Err(ErgoError::invalid("torus-exp takes one value k")),
        };
        return Ok(Cocycle::torus_exponential(k));
    }
    let group = build_group(
        cfg.group
            .as_ref()
            .ok_or_else(|| ErgoError::invalid("missing key `group`"))?,
    )?;
    let values = cfg
        .cocycle_values
        .iter()
        .map(|s| parse_element(&group, s))
        .collect::<Result<Vec<_>>>();
    match spec {
        CocycleSpec::Identity => Ok(Cocycle::identity(group, dim)),
        CocycleSpec::Constant => Cocycle::constant(group.clone(), values?),
        CocycleSpec::CoordSwitch => match values?.as_slice() {
            [a, b] => Cocycle::coordinate_switch(group.clone(), a.clone(), b.clone()),
            _ => Err(ErgoError::invalid("coord-switch takes two values")),
        },
        CocycleSpec::Table => match cfg.cocycle_values.as_slice() {
            [g, len] => Cocycle::tabulated(group.clone(), &parse_element(&group, g)?, parse_count(len)? as usize),
            _ => Err(ErgoError::invalid("table takes a generator and a length")),
        },
        CocycleSpec::TorusExp => unreachable!("handled above"),
    }
}

/// The base system and cocycle of a skew-product config.
fn build_skew_parts(cfg: &ExperimentConfig) -> Result<(DynamicalSystem, Cocycle)> {
    match cfg.system {
        SystemSpec::Anzai => {
            let base = build_base(cfg, SystemSpec::Rotation)?;
            if base.dim() != 1 {
                return Err(ErgoError::invalid("anzai needs a single alpha"));
            }
            Ok((base, Cocycle::torus_exponential(1)))
        }
        SystemSpec::Skew => {
            let base = build_base(cfg, cfg.base)?;
            let gamma = build_cocycle(cfg, base.dim())?;
            Ok((base, gamma))
        }
        _ => Err(ErgoError::invalid("this command needs system `anzai` or `skew`")),
    }
}

fn build_system(cfg: &ExperimentConfig) -> Result<DynamicalSystem> {
    match cfg.system {
        SystemSpec::Rotation | SystemSpec::Derndinger => build_base(cfg, cfg.system),
        SystemSpec::Anzai | SystemSpec::Skew => {
            let (base, gamma) = build_skew_parts(cfg)?;
            DynamicalSystem::skew_product(base, gamma)
        }
    }
}

fn build_observable(spec: &ObservableSpec, sys: &DynamicalSystem) -> Result<Observable> {
    let on_product = sys.as_skew().is_some();
    let lifted = |f: Observable| if on_product { Observable::lift(&f) } else { f };
    Ok(match spec {
        ObservableSpec::One => Observable::one(),
        ObservableSpec::Exp(k) => lifted(Observable::exp(*k)),
        ObservableSpec::Coord(n) => lifted(Observable::coord(*n)?),
        ObservableSpec::Fiber(k) => Observable::fiber_character(*k),
        ObservableSpec::ExpFiber(k, j) => {
            Observable::tensor(&Observable::exp(*k), &Observable::fiber_character(*j))?
                .with_descriptor(&format!("exp-{k}*fiber-{j}"))
        }
        ObservableSpec::Irrep(label, i, j) => {
            let skew = sys
                .as_skew()
                .ok_or_else(|| ErgoError::invalid("irrep observables need a skew-product system"))?;
            let FiberGroup::Finite(g) = skew.group() else {
                return Err(ErgoError::invalid("irrep observables need a finite fiber group"));
            };
            let rep = g
                .irrep(label)
                .ok_or_else(|| ErgoError::invalid(format!("unknown irrep `{label}`")))?;
            matrix_element(rep, *i, *j)?.on_fiber()
        }
    })
}

fn parse_point(sys: &DynamicalSystem, s: &str) -> Result<StatePoint> {
    let p = match sys {
        DynamicalSystem::Derndinger => {
            let (sign, rest) = match s.split_at(1) {
                ("+", r) => (true, r),
                ("-", r) => (false, r),
                _ => return Err(ErgoError::invalid(format!("bad subshift point `{s}`"))),
            };
            let i = rest
                .strip_prefix('x')
                .and_then(|i| i.parse::<u64>().ok())
                .ok_or_else(|| ErgoError::invalid(format!("bad subshift point `{s}`")))?;
            let sign = if sign { crate::systems::Sign::Plus } else { crate::systems::Sign::Minus };
            StatePoint::Subshift(SubshiftPoint::new(sign, i)?)
        }
        DynamicalSystem::Rotation(_) => StatePoint::torus(parse_list(&s.replace(';', ","), parse_f64)?),
        DynamicalSystem::SkewProduct(_) => {
            return Err(ErgoError::invalid("explicit points are not supported for skew products"))
        }
    };
    sys.validate_point(&p)?;
    Ok(p)
}

/// Explicit `points` if given, otherwise `samples` seeded random points.
fn sample_points(cfg: &ExperimentConfig, sys: &DynamicalSystem, seed: u64) -> Result<Vec<StatePoint>> {
    if !cfg.points.is_empty() {
        return cfg.points.iter().map(|s| parse_point(sys, s)).collect();
    }
    if cfg.samples == 0 {
        return Err(ErgoError::invalid("samples must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cfg.samples).map(|_| sys.random_point(&mut rng)).collect()
}

fn character(cfg: &ExperimentConfig, dim: usize) -> Result<Character> {
    match &cfg.theta {
        Some(t) => {
            ErgoError::check_dim(dim, t.len())?;
            Character::new(t.clone())
        }
        None => Ok(Character::trivial(dim)),
    }
}

fn finish(table: Table, summary: String) -> Result<RunOutput> {
    if table.has_nan() {
        return Err(ErgoError::Numerical("NaN in result table".into()));
    }
    Ok(RunOutput { table, summary })
}

fn run_avg(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    let sys = build_system(cfg)?;
    let chi = character(cfg, sys.dim())?;
    let samples = sample_points(cfg, &sys, seed)?;
    let mut table: Option<Table> = None;
    let mut summary = format!("avg on {} with theta {:?}\n", sys.id(), chi.angles());
    for spec in &cfg.observables {
        let f = build_observable(spec, &sys)?;
        for &n in &cfg.windows {
            let r = weighted_average(&sys, &f, &chi, &FolnerBox::new(n, sys.dim())?, &samples)?;
            summary.push_str(&format!(
                "  {} n = {}: sup-norm {:.6e}\n",
                f.descriptor(),
                n,
                r.sup_norm
            ));
            let t = r.to_table();
            match &mut table {
                None => table = Some(t),
                Some(acc) => {
                    if acc.header != t.header {
                        return Err(ErgoError::invalid("observables in one run must share a dimension"));
                    }
                    acc.extend(t);
                }
            }
        }
        if cfg.windows.len() >= 2 {
            let d = cauchy_diagnostic(&sys, &f, &chi, &samples, &cfg.windows)?;
            for (n, v) in d.iter().take(d.len() - 1) {
                summary.push_str(&format!(
                    "  {} |A_{} - A_{}| = {:.6e}\n",
                    f.descriptor(),
                    n,
                    cfg.windows.last().expect("nonempty"),
                    v
                ));
            }
        }
    }
    finish(table.expect("at least one observable and window"), summary)
}

/// `θ*` with `e^{2πi(θ* + kα)} = 1` for `exp-k` on a circle rotation.
fn resonance(sys: &DynamicalSystem, spec: &ObservableSpec) -> Option<(f64, i64, f64)> {
    let rot = sys.as_rotation()?;
    let k = match spec {
        ObservableSpec::Exp(k) => *k,
        _ => return None,
    };
    if rot.generators().len() != 1 || rot.torus_dim() != 1 {
        return None;
    }
    let alpha = rot.generators()[0][0];
    Some(((-(k as f64) * alpha).rem_euclid(1.0), k, alpha))
}

fn run_ww_scan(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    let sys = build_system(cfg)?;
    let samples = sample_points(cfg, &sys, seed)?;
    let n = *cfg.windows.last().expect("windows nonempty");
    let window = FolnerBox::new(n, sys.dim())?;
    let spec = cfg
        .observables
        .first()
        .ok_or_else(|| ErgoError::invalid("missing key `observable`"))?;
    if cfg.observables.len() != 1 {
        return Err(ErgoError::invalid("ww-scan takes exactly one observable"));
    }
    let f = build_observable(spec, &sys)?;
    let mut grid = character_grid(&cfg.theta_lo, &cfg.theta_hi, cfg.theta_steps)?;
    let res = resonance(&sys, spec);
    let mut excluded = 0;
    if let (true, Some((theta_star, _, _))) = (cfg.exclude_resonant, res) {
        let spacing = (cfg.theta_hi[0] - cfg.theta_lo[0]) / (cfg.theta_steps - 1) as f64;
        let before = grid.len();
        grid = exclude_near(grid, &Character::new(vec![theta_star])?, spacing / 2.0)?;
        excluded = before - grid.len();
    }
    if grid.is_empty() {
        return Err(ErgoError::invalid("character grid is empty after exclusion"));
    }
    let scan = ww_scan(&sys, &f, &grid, &window, &samples)?;
    let mut header = vec!["system_id".to_string(), "observable".to_string()];
    header.extend((0..sys.dim()).map(|k| format!("theta_{k}")));
    header.extend(["n", "sup_norm", "geometric_bound"].map(String::from));
    let mut table = Table::new(header);
    let mut worst_bound: f64 = 0.0;
    for (chi, sup) in &scan.entries {
        let bound = res.map(|(_, k, alpha)| {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * (chi.angles()[0] + k as f64 * alpha));
            2.0 / (n as f64 * (z - 1.0).norm())
        });
        if let Some(b) = bound {
            worst_bound = worst_bound.max(b);
        }
        let mut row = vec![Cell::text(sys.id()), Cell::text(f.descriptor())];
        row.extend(chi.angles().iter().map(|&a| Cell::Real(a)));
        row.push(Cell::Int(n as i64));
        row.push(Cell::Real(*sup));
        row.push(bound.map(Cell::Real).unwrap_or_else(|| Cell::text("")));
        table.push(row);
    }
    let mut summary = format!(
        "ww-scan on {} for {}: {} characters ({} excluded near resonance), n = {}\n  max sup-norm {:.6e}\n",
        sys.id(),
        f.descriptor(),
        grid.len(),
        excluded,
        n,
        scan.max
    );
    if res.is_some() {
        summary.push_str(&format!(
            "  geometric bound {:.6e} ({})\n",
            worst_bound,
            if scan.max <= worst_bound { "below bound" } else { "ABOVE bound" }
        ));
    }
    finish(table, summary)
}

fn run_cocycle_check(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    let (base, gamma) = build_skew_parts(cfg)?;
    let worst = cocycle_check(&gamma, &base, cfg.trials, seed)?;
    let mut table = Table::new(
        ["system_id", "cocycle", "trials", "seed", "max_deviation"]
            .map(String::from)
            .to_vec(),
    );
    table.push(vec![
        Cell::text(base.id()),
        Cell::text(gamma.label()),
        Cell::Int(cfg.trials as i64),
        Cell::Int(seed as i64),
        Cell::Real(worst),
    ]);
    let summary = format!(
        "cocycle {} over {}: max deviation {:.3e} over {} trials ({})\n",
        gamma.label(),
        base.id(),
        worst,
        cfg.trials,
        if worst <= cfg.tolerance { "cocycle equation holds" } else { "cocycle equation FAILS" }
    );
    finish(table, summary)
}

fn probe_observables(cfg: &ExperimentConfig, base: &DynamicalSystem) -> Result<Vec<Observable>> {
    cfg.observables.iter().map(|s| build_observable(s, base)).collect()
}

fn run_skew_ergodicity(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    let (base, gamma) = build_skew_parts(cfg)?;
    let samples = sample_points(cfg, &base, seed)?;
    let probes = probe_observables(cfg, &base)?;
    let params = ProbeParams {
        n: *cfg.windows.last().expect("windows nonempty"),
        tol: cfg.tolerance,
        torus_characters: cfg.torus_characters.clone(),
    };
    let report = mean_ergodicity_verdict(&base, &gamma, &probes, &samples, &params)?;
    finish(report.to_table(), report.summary())
}

fn run_unique_ergodicity(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    let sys = build_system(cfg)?;
    let starts = sample_points(cfg, &sys, seed)?;
    let tests = cfg
        .observables
        .iter()
        .map(|s| build_observable(s, &sys))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        ["system_id", "observables", "starts", "n", "spread"]
            .map(String::from)
            .to_vec(),
    );
    let names: Vec<&str> = tests.iter().map(|f| f.descriptor()).collect();
    let mut summary = format!("unique-ergodicity probe on {} ({} starts)\n", sys.id(), starts.len());
    for &n in &cfg.windows {
        let spread = unique_ergodicity_probe(&sys, &tests, &starts, &FolnerBox::new(n, sys.dim())?)?;
        table.push(vec![
            Cell::text(sys.id()),
            Cell::text(names.join(";")),
            Cell::Int(starts.len() as i64),
            Cell::Int(n as i64),
            Cell::Real(spread),
        ]);
        summary.push_str(&format!("  n = {n}: spread {spread:.6e}\n"));
    }
    finish(table, summary)
}

/// The subshift example: `S` is mean ergodic on the orbit closure while
/// `−S` is not. Uses the points `±x^{(i)}`, `i ≤ 100`.
fn run_derndinger_demo(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let n = *cfg.windows.last().expect("windows nonempty");
    let tol = cfg.tolerance;
    let sys = DynamicalSystem::derndinger();
    let samples: Vec<StatePoint> = (1..=100u64)
        .flat_map(|i| [SubshiftPoint::plus(i), SubshiftPoint::minus(i)])
        .map(StatePoint::Subshift)
        .collect();
    let f1 = Observable::coord(1)?;
    let window = FolnerBox::new(n, 1)?;
    let plain = weighted_average(&sys, &f1, &Character::trivial(1), &window, &samples)?;
    let twisted = weighted_average(&sys, &f1, &Character::new(vec![0.5])?, &window, &samples)?;
    let x100 = samples
        .iter()
        .position(|p| *p == StatePoint::Subshift(SubshiftPoint::plus(100)))
        .expect("x^(100) sampled");
    let minus1 = samples
        .iter()
        .position(|p| *p == StatePoint::Subshift(SubshiftPoint::minus(1)))
        .expect("-x^(1) sampled");
    let gap = (twisted.value(x100)[0] - twisted.value(minus1)[0]).norm();
    let dist = sys.metric(&samples[x100], &samples[minus1])?;

    // S and −S are the trivial and sign irreps of the constant ℤ/2 cocycle
    let z2 = FiberGroup::finite(FiniteGroup::cyclic(2)?);
    let gamma = Cocycle::constant(z2, vec![GroupElement::Finite(1)])?;
    let params = ProbeParams {
        n,
        tol,
        torus_characters: Vec::new(),
    };
    let report = mean_ergodicity_verdict(&sys, &gamma, &[f1], &samples, &params)?;
    let verdict_of = |trivial: bool| {
        let i = report
            .irreps
            .iter()
            .position(|r| r.trivial == trivial)
            .expect("both irreps probed");
        irrep_mean_verdict(&report.irreps[i], &report.jumps[i], tol)
    };
    let line = |name: &str, v: Verdict| match v {
        Verdict::Yes => format!("{name}: mean-ergodic (supported)\n"),
        Verdict::No => format!("{name}: NOT mean-ergodic (refuted by continuity jump)\n"),
        Verdict::Inconclusive => format!("{name}: inconclusive\n"),
    };

    let mut table = Table::new(
        ["system_id", "sample", "n", "untwisted", "twisted"]
            .map(String::from)
            .to_vec(),
    );
    for (i, x) in samples.iter().enumerate() {
        table.push(vec![
            Cell::text(sys.id()),
            Cell::text(x.to_string()),
            Cell::Int(n as i64),
            Cell::Real(plain.value(i)[0].re),
            Cell::Real(twisted.value(i)[0].re),
        ]);
    }
    let mut summary = format!("derndinger demo, n = {n}, samples ±x(i) for i <= 100\n");
    summary.push_str(&format!("untwisted sup-residual: {:.6e}\n", plain.sup_norm));
    summary.push_str(&format!(
        "twisted gap |A f1(+x100) - A f1(-x1)|: {gap:.6e} at distance {dist:.3e}\n"
    ));
    summary.push_str(&line("S", verdict_of(true)));
    summary.push_str(&line("−S", verdict_of(false)));
    finish(table, summary)
}

/// Runs one experiment. `seed` overrides the config seed when given.
pub fn run(command: Command, cfg: &ExperimentConfig, seed: Option<u64>) -> Result<RunOutput> {
    if let Some(c) = cfg.command {
        if c != command {
            return Err(ErgoError::invalid(format!(
                "config is for `{c}` but `{command}` was requested"
            )));
        }
    }
    let seed = seed.unwrap_or(cfg.seed);
    match command {
        Command::Avg => run_avg(cfg, seed),
        Command::WwScan => run_ww_scan(cfg, seed),
        Command::CocycleCheck => run_cocycle_check(cfg, seed),
        Command::SkewErgodicity => run_skew_ergodicity(cfg, seed),
        Command::UniqueErgodicity => run_unique_ergodicity(cfg, seed),
        Command::DerndingerDemo => run_derndinger_demo(cfg),
    }
}

/// Reads the config, runs the command and writes the CSV to `out` (or the
/// config's `out`, or stdout). Returns the summary text.
pub fn execute(
    command: Command,
    config_path: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
) -> Result<(RunOutput, Option<PathBuf>)> {
    let text = std::fs::read_to_string(config_path).map_err(|e| {
        ErgoError::invalid(format!("cannot read config {}: {e}", config_path.display()))
    })?;
    let cfg = parse_config(&text)?;
    let output = run(command, &cfg, seed)?;
    let target = out.map(Path::to_path_buf).or_else(|| cfg.out.clone());
    if let Some(path) = &target {
        output.table.write_csv(std::fs::File::create(path)?)?;
    }
    Ok((output, target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let cfg = parse_config("command = avg\nsystem = rotation\nalpha = 0.3\nobservable = exp-1\n").unwrap();
        assert_eq!(cfg.command, Some(Command::Avg));
        assert_eq!(cfg.alpha, vec![0.3]);
        assert_eq!(cfg.observables, vec![ObservableSpec::Exp(1)]);
    }

    #[test]
    fn unknown_key_names_line() {
        let err = parse_config("system = rotation\n\nalpha_typo = 0.3\n").unwrap_err();
        match err {
            ErgoError::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("alpha_typo"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn windows_forms() {
        let cfg = parse_config("windows = 1e3, 1e4").unwrap();
        assert_eq!(cfg.windows, vec![1000, 10_000]);
        let err = parse_config("windows = 100, 100").unwrap_err();
        assert!(err.to_string().contains("windows must be strictly increasing"));
        assert_eq!(exit_code(&err), 2);
        assert!(parse_config("windows = 2.5").is_err());
    }

    #[test]
    fn catalog_ids_are_checked() {
        for bad in ["system = torus", "group = Q8", "observable = exp-x", "cocycle = random", "command = plot"] {
            let err = parse_config(bad).unwrap_err();
            assert_eq!(exit_code(&err), 2);
            assert!(err.to_string().contains(bad.split(" = ").nth(1).unwrap()), "{err}");
        }
        assert!(parse_config("seed = 1\nseed = 2").is_err());
        assert!(parse_config("just text").is_err());
    }

    #[test]
    fn observable_names() {
        assert_eq!("exp--2".parse::<ObservableSpec>().unwrap(), ObservableSpec::Exp(-2));
        assert_eq!("exp-1*fiber-1".parse::<ObservableSpec>().unwrap(), ObservableSpec::ExpFiber(1, 1));
        assert_eq!(
            "irrep:standard:0:1".parse::<ObservableSpec>().unwrap(),
            ObservableSpec::Irrep("standard".into(), 0, 1)
        );
        assert!("coord-0".parse::<ObservableSpec>().is_err());
    }

    #[test]
    fn avg_runs_on_explicit_points() {
        let cfg = parse_config("system = derndinger\nobservable = coord-1\ntheta = 0.5\nwindows = 10\npoints = +x3, -x1\n")
            .unwrap();
        let out = run(Command::Avg, &cfg, None).unwrap();
        assert_eq!(out.table.rows.len(), 2);
        assert_eq!(out.table.rows[0][5], Cell::Real(0.6));
    }

    #[test]
    fn command_mismatch_is_rejected() {
        let cfg = parse_config("command = avg").unwrap();
        assert!(run(Command::WwScan, &cfg, None).is_err());
    }

    #[test]
    fn ww_scan_stays_below_bound() {
        let cfg = parse_config(
            "system = rotation\nobservable = exp-1\ntheta_lo = 0.1\ntheta_hi = 0.4\ntheta_steps = 16\nwindows = 2000\nsamples = 3\n",
        )
        .unwrap();
        let out = run(Command::WwScan, &cfg, Some(5)).unwrap();
        assert!(out.summary.contains("below bound"), "{}", out.summary);
    }

    #[test]
    fn derndinger_demo_verdicts() {
        let cfg = parse_config("windows = 1e4").unwrap();
        let out = run(Command::DerndingerDemo, &cfg, None).unwrap();
        assert!(out.summary.contains("S: mean-ergodic (supported)"), "{}", out.summary);
        assert!(out.summary.contains("−S: NOT mean-ergodic (refuted by continuity jump)"));
        assert_eq!(out.table.rows.len(), 200);
    }

    #[test]
    fn skew_commands_run() {
        let cfg = parse_config(
            "system = skew\ngroup = Z2\ncocycle = identity\nobservable = one\nwindows = 200\nsamples = 4\n",
        )
        .unwrap();
        let out = run(Command::SkewErgodicity, &cfg, None).unwrap();
        assert!(out.summary.contains("ergodic: no"), "{}", out.summary);
        let out = run(Command::CocycleCheck, &cfg, None).unwrap();
        assert!(out.summary.contains("holds"));

        let cfg = parse_config("system = anzai\nobservable = exp-1*fiber-1\nwindows = 100, 1000\nsamples = 4\n").unwrap();
        let out = run(Command::UniqueErgodicity, &cfg, Some(1)).unwrap();
        assert_eq!(out.table.rows.len(), 2);
    }
}
