//! Run configuration for figure sweeps, shared by presets, config files and CLI flags.

use std::fmt;

use dicke_qfi::noise::NoiseKind;
use dicke_qfi::operators::{HamiltonianKind, HamiltonianSpec};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, BenchResult};
use crate::output::Format;

/// Probe families understood by the sweep driver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProbeChoice {
    /// Best Dicke pair from the scan, after exclusion of the optimal probe.
    NearOptimal,
    /// `(|phi_max> + |phi_min>)/sqrt(2)` of the generator.
    Optimal,
    Ghz,
    WWbar,
    BalancedDicke,
    Dicke(usize),
    Pair(usize, usize),
}

impl ProbeChoice {
    pub fn parse(s: &str) -> BenchResult<Self> {
        let bad = || BenchError::Config(format!("unknown probe '{s}'"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        Ok(match s {
            "near_optimal" => ProbeChoice::NearOptimal,
            "optimal" => ProbeChoice::Optimal,
            "ghz" => ProbeChoice::Ghz,
            "wwbar" => ProbeChoice::WWbar,
            "balanced_dicke" | "balanced" => ProbeChoice::BalancedDicke,
            _ => {
                if let Some(rest) = s.strip_prefix("dicke:") {
                    ProbeChoice::Dicke(num(rest)?)
                } else if let Some(rest) = s.strip_prefix("pair:") {
                    let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                    ProbeChoice::Pair(num(a)?, num(b)?)
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl fmt::Display for ProbeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeChoice::NearOptimal => write!(f, "near_optimal"),
            ProbeChoice::Optimal => write!(f, "optimal"),
            ProbeChoice::Ghz => write!(f, "ghz"),
            ProbeChoice::WWbar => write!(f, "wwbar"),
            ProbeChoice::BalancedDicke => write!(f, "balanced_dicke"),
            ProbeChoice::Dicke(l) => write!(f, "dicke:{l}"),
            ProbeChoice::Pair(a, b) => write!(f, "pair:{a},{b}"),
        }
    }
}

/// `linear`, `r=1..4` or `power:k`.
pub fn parse_hamiltonian(s: &str) -> BenchResult<HamiltonianKind> {
    let bad = || BenchError::Config(format!("unknown hamiltonian '{s}'"));
    if s == "linear" {
        return Ok(HamiltonianKind::Linear);
    }
    if let Some(r) = s.strip_prefix("r=") {
        let r: u8 = r.parse().map_err(|_| bad())?;
        if !(1..=4).contains(&r) {
            return Err(bad());
        }
        return Ok(HamiltonianKind::TwoBody(r));
    }
    if let Some(k) = s.strip_prefix("power:") {
        let k: u32 = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        return Ok(HamiltonianKind::Power(k));
    }
    Err(bad())
}

pub fn hamiltonian_name(kind: HamiltonianKind) -> String {
    match kind {
        HamiltonianKind::Linear => "linear".into(),
        HamiltonianKind::TwoBody(r) => format!("r={r}"),
        HamiltonianKind::Power(k) => format!("power:{k}"),
    }
}

pub fn parse_noise(s: &str) -> BenchResult<Option<NoiseKind>> {
    if s == "none" {
        return Ok(None);
    }
    NoiseKind::parse(s)
        .map(Some)
        .ok_or_else(|| BenchError::Config(format!("unknown noise kind '{s}'")))
}

/// `8`, `3..8` (inclusive) or `4,6,8`.
pub fn parse_n_list(s: &str) -> BenchResult<Vec<usize>> {
    let bad = || BenchError::Config(format!("cannot parse qubit numbers '{s}'"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let list = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<BenchResult<Vec<_>>>()?
    };
    if list.is_empty() || list.contains(&0) {
        return Err(bad());
    }
    Ok(list)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for PGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 1.0,
            step: 0.02,
        }
    }
}

impl PGrid {
    /// `a:b:step`.
    pub fn parse(s: &str) -> BenchResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || BenchError::Config(format!("p-grid must be a:b:step, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<BenchResult<_>>()?;
        let grid = Self {
            start: v[0],
            stop: v[1],
            step: v[2],
        };
        grid.points()?;
        Ok(grid)
    }

    /// Points `start + k step`, with the last one snapped to `stop` when within rounding.
    pub fn points(&self) -> BenchResult<Vec<f64>> {
        let ok = (0.0..=1.0).contains(&self.start)
            && (0.0..=1.0).contains(&self.stop)
            && self.start <= self.stop
            && self.step > 0.0;
        if !ok {
            return Err(BenchError::Config(format!(
                "p-grid {}:{}:{} must lie in [0, 1] with a positive step",
                self.start, self.stop, self.step
            )));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        let mut points: Vec<f64> = (0..=count)
            .map(|k| (self.start + k as f64 * self.step).min(self.stop))
            .collect();
        if let Some(last) = points.last_mut() {
            if (self.stop - *last).abs() < 1e-9 * self.step {
                *last = self.stop;
            }
        }
        // Round away representation noise so grids print as 0.02, 0.04, ...
        for p in &mut points {
            *p = (*p * 1e12).round() / 1e12;
        }
        Ok(points)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AxisPolicy {
    /// Axis chosen once on the noiseless probe.
    #[default]
    Fixed,
    /// Axis re-optimized on every noisy state.
    Reopt,
}

impl AxisPolicy {
    pub fn parse(s: &str) -> BenchResult<Self> {
        match s {
            "fixed" => Ok(AxisPolicy::Fixed),
            "reopt" => Ok(AxisPolicy::Reopt),
            _ => Err(BenchError::Config(format!("unknown axis policy '{s}'"))),
        }
    }
}

/// Config-file form; all fields optional except what the preset does not supply.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub preset: Option<String>,
    pub n_qubits: Option<Vec<usize>>,
    pub probes: Option<Vec<String>>,
    pub hamiltonians: Option<Vec<String>>,
    pub noise: Option<Vec<String>>,
    pub p_grid: Option<PGrid>,
    pub axis_policy: Option<AxisPolicy>,
    pub output: Option<String>,
    pub format: Option<String>,
    pub threads: Option<usize>,
    pub full_cap: Option<usize>,
}

/// Fully resolved sweep description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub n_qubits: Vec<usize>,
    pub probes: Vec<ProbeChoice>,
    pub hamiltonians: Vec<HamiltonianKind>,
    /// `None` means the noiseless pure-state evaluation.
    pub noise: Vec<Option<NoiseKind>>,
    pub p_grid: PGrid,
    pub axis_policy: AxisPolicy,
    pub output: Option<String>,
    pub format: Format,
    pub threads: Option<usize>,
    pub full_cap: Option<usize>,
}

const LOCAL_AND_GLOBAL: [Option<NoiseKind>; 3] = [
    Some(NoiseKind::PhaseDamping),
    Some(NoiseKind::AmplitudeDamping),
    Some(NoiseKind::GlobalDepolarizing),
];

pub const PRESETS: [&str; 7] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

impl RunConfig {
    fn base(name: &str) -> Self {
        Self {
            name: name.into(),
            n_qubits: vec![8],
            probes: vec![],
            hamiltonians: vec![HamiltonianKind::Linear],
            noise: vec![None],
            p_grid: PGrid::default(),
            axis_policy: AxisPolicy::Fixed,
            output: None,
            format: Format::Csv,
            threads: None,
            full_cap: None,
        }
    }

    pub fn preset(name: &str) -> BenchResult<Self> {
        let mut c = Self::base(name);
        let linear_probes = vec![
            ProbeChoice::NearOptimal,
            ProbeChoice::WWbar,
            ProbeChoice::BalancedDicke,
            ProbeChoice::Ghz,
        ];
        match name {
            "fig1" => {
                c.n_qubits = (3..=24).collect();
                c.probes = linear_probes;
                c.p_grid = PGrid {
                    start: 0.0,
                    stop: 0.0,
                    step: 1.0,
                };
            }
            // QFI and sensitivity share one data set.
            "fig2" | "fig3" => {
                c.probes = linear_probes;
                c.noise = LOCAL_AND_GLOBAL.to_vec();
            }
            "fig4" => {
                c.probes = vec![ProbeChoice::Optimal];
                c.hamiltonians = vec![HamiltonianKind::TwoBody(2)];
                c.noise = LOCAL_AND_GLOBAL.to_vec();
            }
            "fig5" => {
                c.probes = vec![ProbeChoice::Optimal, ProbeChoice::NearOptimal];
                c.hamiltonians = vec![HamiltonianKind::TwoBody(1)];
                c.noise = vec![Some(NoiseKind::GlobalDepolarizing)];
            }
            "fig6" | "fig7" => {
                c.probes = vec![ProbeChoice::Optimal, ProbeChoice::NearOptimal];
                c.hamiltonians = (1..=4).map(HamiltonianKind::TwoBody).collect();
                c.noise = vec![Some(NoiseKind::PhaseDamping)];
            }
            _ => {
                return Err(BenchError::Config(format!(
                    "unknown preset '{name}', expected one of {}",
                    PRESETS.join(", ")
                )))
            }
        }
        Ok(c)
    }

    /// Config file on top of an optional preset.
    pub fn from_file(file: &RunConfigFile) -> BenchResult<Self> {
        let mut c = match &file.preset {
            Some(p) => Self::preset(p)?,
            None => Self::base("custom"),
        };
        if let Some(n) = &file.n_qubits {
            c.n_qubits = n.clone();
        }
        if let Some(p) = &file.probes {
            c.probes = p
                .iter()
                .map(|s| ProbeChoice::parse(s))
                .collect::<BenchResult<_>>()?;
        }
        if let Some(h) = &file.hamiltonians {
            c.hamiltonians = h
                .iter()
                .map(|s| parse_hamiltonian(s))
                .collect::<BenchResult<_>>()?;
        }
        if let Some(n) = &file.noise {
            c.noise = n
                .iter()
                .map(|s| parse_noise(s))
                .collect::<BenchResult<_>>()?;
        }
        if let Some(g) = file.p_grid {
            c.p_grid = g;
        }
        if let Some(a) = file.axis_policy {
            c.axis_policy = a;
        }
        c.output = file.output.clone().or(c.output);
        if let Some(f) = &file.format {
            c.format = Format::parse(f)
                .ok_or_else(|| BenchError::Config(format!("unknown format '{f}'")))?;
        }
        c.threads = file.threads.or(c.threads);
        c.full_cap = file.full_cap.or(c.full_cap);
        Ok(c)
    }

    pub fn parse_file(text: &str) -> BenchResult<Self> {
        let file: RunConfigFile = serde_json::from_str(text)
            .map_err(|e| BenchError::Config(format!("config file: {e}")))?;
        Self::from_file(&file)
    }

    pub fn validate(&self) -> BenchResult<()> {
        if self.probes.is_empty() {
            return Err(BenchError::Config("no probes selected".into()));
        }
        if self.hamiltonians.is_empty() || self.noise.is_empty() || self.n_qubits.is_empty() {
            return Err(BenchError::Config(
                "need at least one N, hamiltonian and noise entry".into(),
            ));
        }
        if self.n_qubits.contains(&0) {
            return Err(BenchError::Config("N must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(BenchError::Config("thread count must be positive".into()));
        }
        for &h in &self.hamiltonians {
            HamiltonianSpec::new(h, 2).validate()?;
        }
        self.p_grid.points()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g = PGrid::default().points().unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g[1], 0.02);
        assert_eq!(g[50], 1.0);
        assert_eq!(
            PGrid::parse("0:1:0.25").unwrap().points().unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert!(PGrid::parse("0:1.5:0.1").is_err());
        assert!(PGrid::parse("0:1").is_err());
        assert!(PGrid::parse("0:1:0").is_err());
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_n_list("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_n_list("4,8").unwrap(), vec![4, 8]);
        assert!(parse_n_list("5..3").is_err());
        assert_eq!(
            parse_hamiltonian("r=3").unwrap(),
            HamiltonianKind::TwoBody(3)
        );
        assert_eq!(
            parse_hamiltonian("power:3").unwrap(),
            HamiltonianKind::Power(3)
        );
        assert!(parse_hamiltonian("r=5").is_err());
        assert_eq!(
            ProbeChoice::parse("pair:3,5").unwrap(),
            ProbeChoice::Pair(3, 5)
        );
        for p in [
            "near_optimal",
            "optimal",
            "ghz",
            "wwbar",
            "balanced_dicke",
            "dicke:2",
            "pair:0,4",
        ] {
            assert_eq!(ProbeChoice::parse(p).unwrap().to_string(), p);
        }
        assert!(ProbeChoice::parse("w").is_err());
        assert_eq!(parse_noise("none").unwrap(), None);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse_file(r#"{"preset":"fig5","colour":"red"}"#).is_err());
        let c =
            RunConfig::parse_file(r#"{"preset":"fig5","p_grid":{"start":0,"stop":1,"step":0.5}}"#)
                .unwrap();
        assert_eq!(c.p_grid.points().unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(
            c.probes,
            vec![ProbeChoice::Optimal, ProbeChoice::NearOptimal]
        );
    }

    #[test]
    fn all_presets_resolve() {
        for p in PRESETS {
            RunConfig::preset(p).unwrap().validate().unwrap();
        }
        assert!(matches!(
            RunConfig::preset("fig9"),
            Err(BenchError::Config(_))
        ));
    }
}
