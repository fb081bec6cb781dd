//! JSON scenario files, built-in presets and the file-writing runner.
//!
//! One scenario produces
//! `<name>_series.csv`, optionally `<name>_scan.csv` and `<name>_oracle.json`,
//! and always `<name>_manifest.json`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{BathMode, BathSpec};
use crate::error::{Error, Result};
use crate::model::{CouplingFunction, ModelConfig, Temperature};
use crate::oracle::{fock_quantum_factor, fock_quantum_factor_thermal, mc_classical_factor, FockConfig};
use crate::rates::{hbar_scan, rate_pair, separation_scan, RatePair};
use crate::states::{build_density_matrix, GaussianPacket, GridSpec, SuperpositionState};
use crate::strongdec::{classical_factor, decoherence_series, quantum_factor, time_grid, DecoherenceSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub model: ModelSection,
    pub bath: BathSection,
    pub state: StateSection,
    pub coupling: CouplingSection,
    pub time: TimeSection,
    /// `[Q1, Q2]` for the factor, phase and gamma columns. Defaults to the
    /// first two packet centers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "one")]
    pub hbar: f64,
    /// Inverse temperature. Absent means zero temperature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default = "one")]
    pub system_mass: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            beta: None,
            system_mass: 1.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BathSection {
    Ohmic {
        eta: f64,
        /// Absent means no exponential cutoff.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega_c: Option<f64>,
        n_modes: usize,
        omega_max: f64,
    },
    Modes(Vec<ModeSection>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    #[serde(default = "one")]
    pub mass: f64,
    pub omega: f64,
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub packets: Vec<PacketSection>,
    /// Absent means an automatic grid (centers +/- 8 sigma, 8 points per sigma).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSection {
    pub center_q: f64,
    #[serde(default)]
    pub center_p: f64,
    pub sigma: f64,
    #[serde(default = "one")]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub q_min: f64,
    pub q_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingSection {
    Linear { a: f64 },
    Quadratic { a: f64, b: f64 },
    Cubic,
    Polynomial { coefficients: Vec<f64> },
    Sinusoidal { amplitude: f64, period: f64, phase: f64 },
    Tabulated { q: Vec<f64>, values: Vec<f64> },
}

impl CouplingSection {
    pub fn build(&self) -> Result<CouplingFunction> {
        match self {
            CouplingSection::Linear { a } => Ok(CouplingFunction::linear(*a)),
            CouplingSection::Quadratic { a, b } => Ok(CouplingFunction::quadratic(*a, *b)),
            CouplingSection::Cubic => Ok(CouplingFunction::cubic()),
            CouplingSection::Polynomial { coefficients } => {
                CouplingFunction::polynomial(coefficients.clone())
            }
            CouplingSection::Sinusoidal {
                amplitude,
                period,
                phase,
            } => CouplingFunction::sinusoidal(*amplitude, *period, *phase),
            CouplingSection::Tabulated { q, values } => {
                CouplingFunction::tabulated(q.clone(), values.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_max: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScanSection {
    /// Equal cats at the origin, one per separation, all with width `sigma`.
    Separations { values: Vec<f64>, sigma: f64 },
    /// The scenario state at several values of hbar.
    Hbar { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock: Option<FockConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub n_samples: usize,
    pub times: Vec<f64>,
}

/// Validated, ready-to-run pieces of a scenario.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub model: ModelConfig,
    pub bath: BathSpec,
    pub state: SuperpositionState,
    pub grid: GridSpec,
    pub coupling: CouplingFunction,
    pub times: Vec<f64>,
    pub probe: (f64, f64),
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be finite and > 0, got {x}")))
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks every section and builds the runtime objects. Grid coverage
    /// failures come back as [`Error::Coverage`].
    pub fn prepare(&self) -> Result<Prepared> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            return Err(Error::config(
                "name",
                "must be non-empty and use only letters, digits, '-', '_' or '.'",
            ));
        }
        let temperature = match self.model.beta {
            None => Temperature::Zero,
            Some(beta) => Temperature::Beta(beta),
        };
        let model = ModelConfig::new(self.model.hbar, temperature, self.model.system_mass)?;
        let bath = match &self.bath {
            BathSection::Ohmic {
                eta,
                omega_c,
                n_modes,
                omega_max,
            } => BathSpec::discretize_ohmic(
                *eta,
                omega_c.unwrap_or(f64::INFINITY),
                *n_modes,
                *omega_max,
                temperature,
                model.hbar,
            )?,
            BathSection::Modes(modes) => {
                if modes.is_empty() {
                    return Err(Error::config("bath.modes", "at least one mode"));
                }
                let modes = modes
                    .iter()
                    .map(|m| BathMode::new(m.mass, m.omega, m.coupling))
                    .collect::<Result<Vec<_>>>()?;
                BathSpec::new(modes, temperature, model.hbar)?
            }
        };

        if self.state.packets.is_empty() {
            return Err(Error::config("state.packets", "at least one packet"));
        }
        let packets = self
            .state
            .packets
            .iter()
            .map(|p| GaussianPacket::new(p.center_q, p.center_p, p.sigma, Complex64::new(p.re, p.im)))
            .collect::<Result<Vec<_>>>()?;
        let state = SuperpositionState::new(packets)?.normalize(model.hbar)?;
        let grid = match self.state.grid {
            Some(g) => GridSpec::new(g.q_min, g.q_max, g.n_points)?,
            None => GridSpec::auto(&state)?,
        };
        let (lo, hi) = state.required_span();
        grid.ensure_covers(lo, hi)?;

        let coupling = self.coupling.build()?;
        coupling.ensure_domain(grid.q_min, grid.q_max)?;

        positive("time.t_max", self.time.t_max)?;
        let times = time_grid(self.time.t_max, self.time.n_steps)?;

        let probe = match self.probe {
            Some([q1, q2]) => (q1, q2),
            None => match self.state.packets.as_slice() {
                [a, b, ..] => (a.center_q, b.center_q),
                [a] => (a.center_q + a.sigma, a.center_q - a.sigma),
                [] => unreachable!(),
            },
        };
        if !(probe.0.is_finite() && probe.1.is_finite()) {
            return Err(Error::config("probe", "positions must be finite"));
        }
        coupling.ensure_domain(probe.0.min(probe.1), probe.0.max(probe.1))?;

        match &self.scan {
            Some(ScanSection::Separations { values, sigma }) => {
                if values.is_empty() {
                    return Err(Error::config("scan.separations.values", "at least one value"));
                }
                if values.windows(2).any(|w| w[1] <= w[0]) || !(values[0] > 0.0) {
                    return Err(Error::config(
                        "scan.separations.values",
                        "must be positive and strictly increasing",
                    ));
                }
                positive("scan.separations.sigma", *sigma)?;
                if *sigma >= values[0] {
                    return Err(Error::config(
                        "scan.separations.sigma",
                        "must be smaller than the smallest separation",
                    ));
                }
                let reach = 0.5 * values[values.len() - 1] + 8.0 * sigma;
                coupling.ensure_domain(-reach, reach)?;
            }
            Some(ScanSection::Hbar { values }) => {
                if values.is_empty() {
                    return Err(Error::config("scan.hbar.values", "at least one value"));
                }
                for &h in values {
                    positive("scan.hbar.values", h)?;
                }
            }
            None => {}
        }

        if let Some(oracle) = &self.oracle {
            if let Some(mc) = &oracle.monte_carlo {
                if mc.n_samples < crate::oracle::monte_carlo::MIN_SAMPLES {
                    return Err(Error::config(
                        "oracle.monte_carlo.n_samples",
                        format!(
                            "need at least {} samples, got {}",
                            crate::oracle::monte_carlo::MIN_SAMPLES,
                            mc.n_samples
                        ),
                    ));
                }
                if mc.times.is_empty() || mc.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                    return Err(Error::config(
                        "oracle.monte_carlo.times",
                        "need at least one finite time >= 0",
                    ));
                }
            }
            if let Some(fock) = &oracle.fock {
                fock.validate()?;
                if bath.len() != 1 {
                    return Err(Error::config(
                        "oracle.fock",
                        format!("needs a single-mode bath, got {} modes", bath.len()),
                    ));
                }
            }
        }

        Ok(Prepared {
            model,
            bath,
            state,
            grid,
            coupling,
            times,
            probe,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridDiagnostics {
    pub q_min: f64,
    pub q_max: f64,
    pub n_points: usize,
    pub spacing: f64,
    pub trace: f64,
    pub purity: f64,
    pub hermiticity_error: f64,
    pub position_variance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BathDiagnostics {
    pub n_modes: usize,
    pub thermal_strength: f64,
    pub max_frequency: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanGrid {
    pub separation: f64,
    pub n_points: usize,
    pub spacing: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub name: String,
    pub version: String,
    pub seed: u64,
    pub config: Scenario,
    pub grid: GridDiagnostics,
    pub bath: BathDiagnostics,
    pub probe: [f64; 2],
    pub time_points: usize,
    pub initial_entropy: f64,
    pub rates: RatePair,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub scan_grids: Vec<ScanGrid>,
    pub mc_samples: usize,
    pub fock_levels: usize,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct McRecord {
    pub t: f64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub analytic_re: f64,
    pub analytic_im: f64,
    pub sigma_distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FockRecord {
    pub t: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub modulus: f64,
    pub analytic_modulus: f64,
    pub modulus_error: f64,
    pub n_levels: usize,
    pub thermal: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OracleReport {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub monte_carlo: Vec<McRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fock: Vec<FockRecord>,
}

/// Everything a run computed, alongside the files written.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: DecoherenceSeries,
    pub manifest: Manifest,
    pub oracle: Option<OracleReport>,
    pub files: Vec<PathBuf>,
}

const SERIES_HEADER: &str =
    "t,B1,B2,gamma_c,gamma_q,S_c,S_q,phase_c,phase_q,logmod_c,logmod_q";

fn push_row(out: &mut String, values: &[f64]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        // Adding zero folds -0.0 into 0.0.
        write!(out, "{:.16e}", v + 0.0).unwrap();
    }
    out.push('\n');
}

pub fn series_csv(series: &DecoherenceSeries) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for k in 0..series.len() {
        push_row(
            &mut out,
            &[
                series.times[k],
                series.b1[k],
                series.b2[k],
                series.gamma_c[k],
                series.gamma_q[k],
                series.entropy_c[k],
                series.entropy_q[k],
                series.phase_c[k],
                series.phase_q[k],
                series.log_modulus_c[k],
                series.log_modulus_q[k],
            ],
        );
    }
    out
}

fn oracle_report(
    scenario: &Scenario,
    prepared: &Prepared,
    section: &OracleSection,
) -> Result<OracleReport> {
    let (q1, q2) = prepared.probe;
    let (f, bath) = (&prepared.coupling, &prepared.bath);
    let mut report = OracleReport::default();
    if let Some(mc) = &section.monte_carlo {
        for &t in &mc.times {
            let est = mc_classical_factor(q1, q2, t, f, bath, mc.n_samples, scenario.seed)?;
            let exact = classical_factor(q1, q2, t, f, bath)?.value();
            report.monte_carlo.push(McRecord {
                t,
                mean_re: est.mean.re,
                mean_im: est.mean.im,
                std_error: est.std_error,
                n_samples: est.n_samples,
                analytic_re: exact.re,
                analytic_im: exact.im,
                sigma_distance: est.sigma_distance(exact),
            });
        }
    }
    if let Some(fock) = &section.fock {
        let thermal = bath.temperature() != Temperature::Zero;
        for t in fock.times() {
            let z = if thermal {
                fock_quantum_factor_thermal(q1, q2, t, f, bath, fock)?
            } else {
                fock_quantum_factor(q1, q2, t, f, bath, fock)?
            };
            let exact = quantum_factor(q1, q2, t, f, bath)?.modulus();
            report.fock.push(FockRecord {
                t,
                value_re: z.re,
                value_im: z.im,
                modulus: z.norm(),
                analytic_modulus: exact,
                modulus_error: (z.norm() - exact).abs(),
                n_levels: 2 * fock.n_levels,
                thermal,
            });
        }
    }
    Ok(report)
}

/// Runs `scenario` and writes its files into `out_dir` (created if needed).
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<RunOutput> {
    let prepared = scenario.prepare()?;
    let Prepared {
        model,
        bath,
        state,
        grid,
        coupling,
        times,
        probe,
    } = &prepared;
    let rho0 = build_density_matrix(state, grid, model.hbar)?;
    let series = decoherence_series(&rho0, coupling, bath, *probe, times)?;
    let rates = rate_pair(&rho0, coupling, bath)?;

    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let write = |files: &mut Vec<PathBuf>, suffix: &str, body: &str| -> Result<()> {
        let path = out_dir.join(format!("{}_{suffix}", scenario.name));
        fs::write(&path, body)?;
        files.push(path);
        Ok(())
    };

    write(&mut files, "series.csv", &series_csv(&series))?;

    let mut scan_grids = Vec::new();
    match &scenario.scan {
        Some(ScanSection::Separations { values, sigma }) => {
            let points = separation_scan(coupling, values, *sigma, bath)?;
            let mut csv = String::from(
                "separation,grid_points,grid_spacing,rate_classical,rate_quantum,ratio\n",
            );
            for p in &points {
                write!(csv, "{:.16e},{},", p.separation, p.grid_points).unwrap();
                push_row(
                    &mut csv,
                    &[p.grid_spacing, p.rates.classical_rate, p.rates.quantum_rate, p.rates.ratio],
                );
                scan_grids.push(ScanGrid {
                    separation: p.separation,
                    n_points: p.grid_points,
                    spacing: p.grid_spacing,
                });
            }
            write(&mut files, "scan.csv", &csv)?;
        }
        Some(ScanSection::Hbar { values }) => {
            let points = hbar_scan(&rho0, coupling, bath, values)?;
            let mut csv = String::from("hbar,rate_classical,rate_quantum,ratio\n");
            for p in &points {
                push_row(
                    &mut csv,
                    &[p.hbar, p.rates.classical_rate, p.rates.quantum_rate, p.rates.ratio],
                );
            }
            write(&mut files, "scan.csv", &csv)?;
        }
        None => {}
    }

    let oracle = match &scenario.oracle {
        Some(section) => {
            let report = oracle_report(scenario, &prepared, section)?;
            write(&mut files, "oracle.json", &serde_json::to_string_pretty(&report)?)?;
            Some(report)
        }
        None => None,
    };

    let mc_samples = scenario
        .oracle
        .as_ref()
        .and_then(|o| o.monte_carlo.as_ref())
        .map_or(0, |m| m.n_samples);
    let fock_levels = scenario
        .oracle
        .as_ref()
        .and_then(|o| o.fock.as_ref())
        .map_or(0, |f| f.n_levels);
    let mut outputs: Vec<String> = files
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    outputs.push(format!("{}_manifest.json", scenario.name));

    let manifest = Manifest {
        name: scenario.name.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: scenario.seed,
        config: scenario.clone(),
        grid: GridDiagnostics {
            q_min: grid.q_min,
            q_max: grid.q_max,
            n_points: grid.n_points,
            spacing: grid.spacing(),
            trace: rho0.trace(),
            purity: rho0.purity(),
            hermiticity_error: rho0.hermiticity_error(),
            position_variance: rho0.position_variance(),
        },
        bath: BathDiagnostics {
            n_modes: bath.len(),
            thermal_strength: bath.thermal_strength(),
            max_frequency: bath.max_frequency(),
        },
        probe: [probe.0, probe.1],
        time_points: times.len(),
        initial_entropy: series.initial_entropy,
        rates,
        scan_grids,
        mc_samples,
        fock_levels,
        outputs,
    };
    write(&mut files, "manifest.json", &serde_json::to_string_pretty(&manifest)?)?;

    Ok(RunOutput {
        series,
        manifest,
        oracle,
        files,
    })
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub scenario: Scenario,
}

fn cat_packets(separation: f64, sigma: f64) -> Vec<PacketSection> {
    [-0.5, 0.5]
        .iter()
        .map(|s| PacketSection {
            center_q: s * separation,
            center_p: 0.0,
            sigma,
            re: 1.0,
            im: 0.0,
        })
        .collect()
}

fn ohmic_50() -> BathSection {
    BathSection::Ohmic {
        eta: 1.0,
        omega_c: Some(1.0),
        n_modes: 50,
        omega_max: 5.0,
    }
}

fn unit_mode() -> BathSection {
    BathSection::Modes(vec![ModeSection {
        mass: 1.0,
        omega: 1.0,
        coupling: 1.0,
    }])
}

fn base(name: &str, coupling: CouplingSection, separation: f64, sigma: f64) -> Scenario {
    Scenario {
        name: name.to_string(),
        model: ModelSection {
            hbar: 1.0,
            beta: Some(1.0),
            system_mass: 1.0,
        },
        bath: ohmic_50(),
        state: StateSection {
            packets: cat_packets(separation, sigma),
            grid: None,
        },
        coupling,
        time: TimeSection {
            t_max: 20.0,
            n_steps: 200,
        },
        probe: None,
        scan: None,
        oracle: None,
        seed: 0,
    }
}

/// The built-in scenarios, in a fixed order.
pub fn presets() -> Vec<Preset> {
    let matched_sine = CouplingSection::Sinusoidal {
        amplitude: 1.0,
        period: 2.0,
        phase: PI / 4.0,
    };
    let unit_sine = CouplingSection::Sinusoidal {
        amplitude: 1.0,
        period: 1.0,
        phase: PI / 4.0,
    };

    let linear = base("linear", CouplingSection::Linear { a: 1.0 }, 4.0, 0.5);
    let quadratic = base("quadratic", CouplingSection::Quadratic { a: 1.0, b: 0.3 }, 4.0, 0.5);

    let mut cubic = base("cubic-cat", CouplingSection::Cubic, 2.0, 0.05);
    cubic.time = TimeSection {
        t_max: 10.0,
        n_steps: 200,
    };

    let mut sine = base("sine-cat", matched_sine, 2.0, 0.05);
    sine.time = cubic.time;

    let mut saturation = base("saturation-scan", unit_sine, 2.0, 0.1);
    saturation.time = cubic.time;
    saturation.scan = Some(ScanSection::Separations {
        values: vec![2.0, 4.0, 8.0, 16.0, 32.0],
        sigma: 0.1,
    });

    let mut hbar = base("hbar-scan", CouplingSection::Cubic, 2.0, 0.05);
    hbar.time = cubic.time;
    hbar.scan = Some(ScanSection::Hbar {
        values: vec![0.01, 0.1, 1.0, 10.0, 100.0],
    });

    let mut mc = base("mc-validate", CouplingSection::Linear { a: 1.0 }, 2.0, 0.2);
    mc.bath = unit_mode();
    mc.time = TimeSection {
        t_max: 2.0 * PI,
        n_steps: 100,
    };
    mc.probe = Some([1.5, -0.5]);
    mc.seed = 20_240_601;
    mc.oracle = Some(OracleSection {
        monte_carlo: Some(MonteCarloSection {
            n_samples: 100_000,
            times: vec![PI / 4.0, PI / 2.0, PI, 3.0 * PI / 2.0, 2.0 * PI],
        }),
        fock: None,
    });

    let mut fock = base("fock-validate", CouplingSection::Linear { a: 1.0 }, 2.0, 0.2);
    fock.model.beta = None;
    fock.bath = unit_mode();
    fock.time = mc.time;
    fock.oracle = Some(OracleSection {
        monte_carlo: None,
        fock: Some(FockConfig {
            n_levels: 64,
            time_step: 2.0 * PI / 9.0,
            t_max: 2.0 * PI,
        }),
    });

    vec![
        Preset {
            name: "linear",
            description: "f = Q, equal cat, 50-mode Ohmic bath: classical and quantum curves coincide",
            scenario: linear,
        },
        Preset {
            name: "quadratic",
            description: "f = Q + 0.3 Q^2: finite difference equals the slope, still exact agreement",
            scenario: quadratic,
        },
        Preset {
            name: "cubic-cat",
            description: "f = Q^3, narrow cat at the origin: decoherence with no classical entropy production",
            scenario: cubic,
        },
        Preset {
            name: "sine-cat",
            description: "f = sin(pi Q + pi/4) on a cat of separation 2: decoherence-free but classically mixing",
            scenario: sine,
        },
        Preset {
            name: "saturation-scan",
            description: "bounded sine coupling, separations 2..32: quantum rate saturates, classical keeps growing",
            scenario: saturation,
        },
        Preset {
            name: "hbar-scan",
            description: "cubic cat at five values of hbar on a fixed grid: rate ratio stays constant",
            scenario: hbar,
        },
        Preset {
            name: "mc-validate",
            description: "single mode, f = Q: trajectory Monte Carlo against the closed-form classical factor",
            scenario: mc,
        },
        Preset {
            name: "fock-validate",
            description: "single mode at zero temperature: number-basis propagation against the quantum modulus",
            scenario: fock,
        },
    ]
}

pub fn preset(name: &str) -> Option<Scenario> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .map(|p| p.scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_list_is_complete() {
        let names: Vec<_> = presets().iter().map(|p| p.name).collect();
        for required in [
            "linear",
            "quadratic",
            "cubic-cat",
            "sine-cat",
            "saturation-scan",
            "hbar-scan",
            "mc-validate",
            "fock-validate",
        ] {
            assert!(names.contains(&required), "{required}");
        }
        for p in presets() {
            assert_eq!(p.name, p.scenario.name);
            p.scenario.prepare().unwrap();
        }
    }

    #[test]
    fn presets_roundtrip_through_json() {
        for p in presets() {
            let text = p.scenario.to_json().unwrap();
            assert_eq!(Scenario::from_json(&text).unwrap(), p.scenario);
        }
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let s = Scenario::from_json(
            r#"{
                "name": "tiny",
                "bath": {"modes": [{"omega": 1.0, "coupling": 1.0}]},
                "state": {"packets": [{"center_q": 0.0, "sigma": 0.5}]},
                "coupling": {"kind": "linear", "a": 1.0},
                "time": {"t_max": 1.0, "n_steps": 10}
            }"#,
        )
        .unwrap();
        let p = s.prepare().unwrap();
        assert_eq!(p.model.temperature, Temperature::Zero);
        assert_eq!(p.model.hbar, 1.0);
        assert_eq!(p.probe, (0.5, -0.5));
        assert_eq!(p.times.len(), 11);
        assert_eq!(s.seed, 0);
    }

    #[test]
    fn unknown_field_is_rejected() {
        let err = Scenario::from_json(
            r#"{"name":"x","bath":{"modes":[]},"state":{"packets":[]},
                "coupling":{"kind":"cubic"},"time":{"t_max":1,"n_steps":1},"colour":3}"#,
        );
        assert!(matches!(err, Err(Error::Json(_))));
    }

    #[test]
    fn field_level_messages() {
        let mut s = preset("linear").unwrap();
        s.time.t_max = -1.0;
        match s.prepare() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "time.t_max"),
            other => panic!("{other:?}"),
        }
        let mut s = preset("linear").unwrap();
        s.state.packets[0].sigma = 0.0;
        assert!(matches!(s.prepare(), Err(Error::Config { .. })));
        let mut s = preset("linear").unwrap();
        s.name = "bad/name".into();
        assert!(matches!(s.prepare(), Err(Error::Config { .. })));
    }

    #[test]
    fn small_grid_is_a_coverage_error() {
        let mut s = preset("linear").unwrap();
        s.state.grid = Some(GridSection {
            q_min: -3.0,
            q_max: 3.0,
            n_points: 256,
        });
        assert!(matches!(s.prepare(), Err(Error::Coverage { .. })));
    }

    #[test]
    fn fock_needs_single_mode() {
        let mut s = preset("fock-validate").unwrap();
        s.bath = ohmic_50();
        assert!(matches!(s.prepare(), Err(Error::Config { .. })));
    }

    #[test]
    fn mc_sample_floor_is_a_config_error() {
        let mut s = preset("mc-validate").unwrap();
        if let Some(OracleSection {
            monte_carlo: Some(mc),
            ..
        }) = &mut s.oracle
        {
            mc.n_samples = 10;
        }
        assert!(matches!(s.prepare(), Err(Error::Config { .. })));
    }

    #[test]
    fn csv_uses_seventeen_significant_digits() {
        let mut out = String::new();
        push_row(&mut out, &[0.1, 1.0 / 3.0]);
        assert_eq!(out, "1.0000000000000001e-1,3.3333333333333331e-1\n");
        for (field, v) in out.trim().split(',').zip([0.1, 1.0 / 3.0]) {
            assert_eq!(field.parse::<f64>().unwrap(), v);
        }
        out.clear();
        push_row(&mut out, &[-0.0]);
        assert_eq!(out, "0.0000000000000000e0\n");
    }
}
