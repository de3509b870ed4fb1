//! Command-line front end: operator generation, multi-realization sampling,
//! goodness-of-fit reports, and reference-curve tables.
//!
//! All outputs are deterministic functions of the configuration: realization
//! `r` draws from the substream `substream(seed, r)` and results are merged
//! in realization order, so the worker count never changes a byte of output.

use crate::ensembles::{
    self, Architecture, CircuitSpec, EnsembleLabel, ZMode, SYMMETRY_BREAK_COUPLING,
};
use crate::linalg::{eig_unitary, io as matio, ComplexMatrix, LinalgError};
use crate::reference;
use crate::rng::{substream, SplitMix64};
use crate::spectra::{
    self, ks_statistic, ks_two_sample, SampleLabel, SampleMeta, StatSample,
};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Kramers pairing tolerance used by the sampling pipeline.
pub const PAIRING_TOL: f64 = 1e-8;

pub const USAGE: &str = "\
circens - pseudo-random circular-ensemble operators

USAGE:
  circens generate  --ensemble <cue|coe|cse> --out <PATH> [OPTIONS]
  circens sample    --ensemble <cue|coe|cse> --out <PREFIX> [OPTIONS]
  circens gof       --sample <PATH> --target <surmise|amplitude-law|haar-oracle> [OPTIONS]
  circens reference --ensemble <cue|coe|cse> --kind <spacing|amplitude> [OPTIONS]

SUBCOMMANDS:
  generate   Build one operator and write it as a matrix file
  sample     Build R operators, decompose them, and write spacing/amplitude
             statistics (JSON) plus histograms (CSV)
  gof        Kolmogorov-Smirnov distance of a sample against a reference
             curve or a freshly drawn Haar-oracle sample
  reference  Emit x,pdf,cdf rows of a reference curve

OPTIONS:
  --ensemble <cue|coe|cse>     ensemble to draw from
  --arch <circuit|qca1|qca2>   architecture (default circuit)
  -n <QUBITS>                  qubit count (default 2)
  -m <ITERATIONS>              coupler iterations (default 0)
  -R <REALIZATIONS>            realizations for sample (default 1)
  --seed <SEED>                64-bit seed (default 1)
  --z-mode <standard|qca>      time-reversal form for cse
                               (default: standard on circuit, qca on QCA)
  --break-symmetry             detune bond 1 from pi/4 to pi/5
  --out <PATH>                 output path (generate/reference) or prefix (sample)
  --format <bin|json>          matrix file format for generate (default bin)
  --bins <COUNT>               histogram bin count (default 40)
  --range <LO:HI>              histogram range (default 0:4)
  --sample <PATH>              sample file for gof
  --target <TARGET>            gof target: surmise | amplitude-law | haar-oracle
  --max <X>                    reference grid maximum (default 4)
  --step <DX>                  reference grid step (default 0.05)

EXIT CODES:
  0 success, 1 validation error, 2 numerical failure, 3 i/o failure
";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

impl From<ensembles::EnsembleError> for CliError {
    fn from(e: ensembles::EnsembleError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Bin,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum GofTarget {
    Surmise,
    AmplitudeLaw,
    HaarOracle,
}

/// Parameters of one experiment: which ensemble/architecture to draw from,
/// at what size, how many realizations, and where results go.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleLabel,
    pub architecture: Architecture,
    pub n_qubits: usize,
    pub iterations: usize,
    pub realizations: usize,
    pub seed: u64,
    pub z_mode: ZMode,
    pub coupling_override: Option<(usize, f64)>,
    pub out: PathBuf,
    pub format: MatrixFormat,
    pub bins: usize,
    pub range: (f64, f64),
}

impl ExperimentConfig {
    /// Reject impossible ensemble/architecture/z-mode combinations up front.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_qubits == 0 {
            return Err(CliError::Config("need at least one qubit".into()));
        }
        if self.realizations == 0 {
            return Err(CliError::Config("need at least one realization".into()));
        }
        if self.ensemble == EnsembleLabel::Cse {
            if self.z_mode == ZMode::Standard && self.architecture != Architecture::Circuit {
                return Err(CliError::Config(
                    "the standard z addresses a single qubit and is unavailable on QCA \
                     architectures; use --z-mode qca"
                        .into(),
                ));
            }
            ensembles::time_reversal_qubits(self.architecture, self.n_qubits, self.z_mode)
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    fn make_spec(&self, seed: u64) -> Result<CircuitSpec, CliError> {
        Ok(ensembles::make_spec(
            self.architecture,
            self.n_qubits,
            self.iterations,
            seed,
            self.coupling_override,
        )?)
    }

    fn build(&self, spec: &CircuitSpec) -> Result<ComplexMatrix, CliError> {
        let u = match self.ensemble {
            EnsembleLabel::Cue => ensembles::build_cue(spec),
            EnsembleLabel::Coe => ensembles::build_coe(spec),
            EnsembleLabel::Cse => ensembles::build_cse(spec, self.z_mode),
        }?;
        Ok(u)
    }

    fn meta(&self) -> SampleMeta {
        SampleMeta {
            architecture: self.architecture,
            n_qubits: self.n_qubits,
            iterations: self.iterations,
            realizations: self.realizations,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GofConfig {
    pub sample_path: PathBuf,
    pub target: GofTarget,
    pub expected_ensemble: Option<EnsembleLabel>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct ReferenceConfig {
    pub ensemble: EnsembleLabel,
    pub kind: crate::reference::CurveKind,
    pub max: f64,
    pub step: f64,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Command {
    Generate(ExperimentConfig),
    Sample(ExperimentConfig),
    Gof(GofConfig),
    Reference(ReferenceConfig),
}

// --- argument parsing -------------------------------------------------------

struct Args {
    items: Vec<String>,
    pos: usize,
}

impl Args {
    fn next(&mut self) -> Option<&str> {
        let item = self.items.get(self.pos)?;
        self.pos += 1;
        Some(item)
    }

    fn value(&mut self, flag: &str) -> Result<String, CliError> {
        self.next()
            .map(str::to_owned)
            .ok_or_else(|| CliError::Usage(format!("{flag} requires a value")))
    }
}

fn parse_ensemble(s: &str) -> Result<EnsembleLabel, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "cue" => Ok(EnsembleLabel::Cue),
        "coe" => Ok(EnsembleLabel::Coe),
        "cse" => Ok(EnsembleLabel::Cse),
        _ => Err(CliError::Usage(format!(
            "unknown ensemble '{s}' (expected cue, coe, or cse)"
        ))),
    }
}

fn parse_arch(s: &str) -> Result<Architecture, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "circuit" => Ok(Architecture::Circuit),
        "qca1" | "qca-one" => Ok(Architecture::QcaOneSpecies),
        "qca2" | "qca-two" => Ok(Architecture::QcaTwoSpecies),
        _ => Err(CliError::Usage(format!(
            "unknown architecture '{s}' (expected circuit, qca1, or qca2)"
        ))),
    }
}

fn parse_z_mode(s: &str) -> Result<ZMode, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "standard" => Ok(ZMode::Standard),
        "qca" | "qca-all" => Ok(ZMode::QcaAllQubits),
        _ => Err(CliError::Usage(format!(
            "unknown z-mode '{s}' (expected standard or qca)"
        ))),
    }
}

fn parse_num<T: std::str::FromStr>(flag: &str, s: &str) -> Result<T, CliError> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("{flag}: cannot parse '{s}'")))
}

/// Parse a full command line (without the program name).
pub fn parse_args(raw: &[String]) -> Result<Command, CliError> {
    let mut args = Args {
        items: raw.to_vec(),
        pos: 0,
    };
    let sub = args
        .next()
        .ok_or_else(|| CliError::Usage("missing subcommand".into()))?
        .to_owned();

    let mut ensemble: Option<EnsembleLabel> = None;
    let mut architecture = Architecture::Circuit;
    let mut n_qubits = 2usize;
    let mut iterations = 0usize;
    let mut realizations = 1usize;
    let mut seed = 1u64;
    let mut z_mode: Option<ZMode> = None;
    let mut break_symmetry = false;
    let mut out: Option<PathBuf> = None;
    let mut format = MatrixFormat::Bin;
    let mut bins = 40usize;
    let mut range = (0.0f64, 4.0f64);
    let mut sample_path: Option<PathBuf> = None;
    let mut target: Option<GofTarget> = None;
    let mut kind: Option<crate::reference::CurveKind> = None;
    let mut max = 4.0f64;
    let mut step = 0.05f64;

    while let Some(flag) = args.next().map(str::to_owned) {
        match flag.as_str() {
            "--ensemble" => ensemble = Some(parse_ensemble(&args.value(&flag)?)?),
            "--arch" => architecture = parse_arch(&args.value(&flag)?)?,
            "-n" => n_qubits = parse_num(&flag, &args.value(&flag)?)?,
            "-m" => iterations = parse_num(&flag, &args.value(&flag)?)?,
            "-R" => realizations = parse_num(&flag, &args.value(&flag)?)?,
            "--seed" => seed = parse_num(&flag, &args.value(&flag)?)?,
            "--z-mode" => z_mode = Some(parse_z_mode(&args.value(&flag)?)?),
            "--break-symmetry" => break_symmetry = true,
            "--out" => out = Some(PathBuf::from(args.value(&flag)?)),
            "--format" => {
                format = match args.value(&flag)?.as_str() {
                    "bin" => MatrixFormat::Bin,
                    "json" => MatrixFormat::Json,
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown format '{other}' (expected bin or json)"
                        )))
                    }
                }
            }
            "--bins" => bins = parse_num(&flag, &args.value(&flag)?)?,
            "--range" => {
                let v = args.value(&flag)?;
                let (lo, hi) = v.split_once(':').ok_or_else(|| {
                    CliError::Usage(format!("--range expects LO:HI, got '{v}'"))
                })?;
                range = (parse_num("--range", lo)?, parse_num("--range", hi)?);
            }
            "--sample" => sample_path = Some(PathBuf::from(args.value(&flag)?)),
            "--target" => {
                target = Some(match args.value(&flag)?.as_str() {
                    "surmise" => GofTarget::Surmise,
                    "amplitude-law" => GofTarget::AmplitudeLaw,
                    "haar-oracle" => GofTarget::HaarOracle,
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown target '{other}' (expected surmise, amplitude-law, or haar-oracle)"
                        )))
                    }
                })
            }
            "--kind" => {
                kind = Some(match args.value(&flag)?.as_str() {
                    "spacing" => crate::reference::CurveKind::SpacingSurmise,
                    "amplitude" => crate::reference::CurveKind::AmplitudeLaw,
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown kind '{other}' (expected spacing or amplitude)"
                        )))
                    }
                })
            }
            "--max" => max = parse_num(&flag, &args.value(&flag)?)?,
            "--step" => step = parse_num(&flag, &args.value(&flag)?)?,
            "--help" | "-h" => return Err(CliError::Usage("help requested".into())),
            other => return Err(CliError::Usage(format!("unknown flag '{other}'"))),
        }
    }

    let default_z = |arch: Architecture| match arch {
        Architecture::Circuit => ZMode::Standard,
        _ => ZMode::QcaAllQubits,
    };

    match sub.as_str() {
        "generate" | "sample" => {
            let ensemble =
                ensemble.ok_or_else(|| CliError::Usage("--ensemble is required".into()))?;
            let out = out.ok_or_else(|| CliError::Usage("--out is required".into()))?;
            let config = ExperimentConfig {
                ensemble,
                architecture,
                n_qubits,
                iterations,
                realizations,
                seed,
                z_mode: z_mode.unwrap_or_else(|| default_z(architecture)),
                coupling_override: break_symmetry.then_some((1, SYMMETRY_BREAK_COUPLING)),
                out,
                format,
                bins,
                range,
            };
            config.validate()?;
            if sub == "generate" {
                if config.realizations != 1 {
                    return Err(CliError::Config(
                        "generate writes a single operator; use -R 1".into(),
                    ));
                }
                Ok(Command::Generate(config))
            } else {
                Ok(Command::Sample(config))
            }
        }
        "gof" => {
            let sample_path =
                sample_path.ok_or_else(|| CliError::Usage("--sample is required".into()))?;
            let target = target.ok_or_else(|| CliError::Usage("--target is required".into()))?;
            Ok(Command::Gof(GofConfig {
                sample_path,
                target,
                expected_ensemble: ensemble,
                seed,
                out,
            }))
        }
        "reference" => {
            let ensemble =
                ensemble.ok_or_else(|| CliError::Usage("--ensemble is required".into()))?;
            let kind = kind.ok_or_else(|| CliError::Usage("--kind is required".into()))?;
            if !(max.is_finite() && step.is_finite() && max > 0.0 && step > 0.0) {
                return Err(CliError::Usage(format!(
                    "invalid grid: max {max}, step {step}"
                )));
            }
            Ok(Command::Reference(ReferenceConfig {
                ensemble,
                kind,
                max,
                step,
                out,
            }))
        }
        other => Err(CliError::Usage(format!("unknown subcommand '{other}'"))),
    }
}

// --- commands ----------------------------------------------------------------

fn numeric_err(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(format!("{context}: {e}"))
}

/// Build one operator and write it to disk.
pub fn cmd_generate(config: &ExperimentConfig) -> Result<String, CliError> {
    config.validate()?;
    let spec = config.make_spec(config.seed)?;
    let u = config.build(&spec)?;
    let dim = spec.dim();
    let defect = u
        .unitarity_defect()
        .map_err(|e| numeric_err("unitarity check", e))?;
    let bound = 1e-12 * dim as f64;
    if defect > bound {
        return Err(CliError::Numeric(format!(
            "unitarity defect {defect:.3e} exceeds bound {bound:.3e}"
        )));
    }

    let mut report = String::new();
    let _ = writeln!(
        report,
        "ensemble: {}  architecture: {}  n={} m={} seed={}",
        config.ensemble, config.architecture, config.n_qubits, config.iterations, config.seed
    );
    let _ = writeln!(report, "dim: {dim}");
    let _ = writeln!(
        report,
        "independent variables: {}",
        spec.independent_variable_count()
    );
    let _ = writeln!(report, "unitarity defect: {defect:.3e} (bound {bound:.3e})");
    match config.ensemble {
        EnsembleLabel::Coe => {
            let sym = u
                .max_abs_diff(&u.transpose())
                .map_err(|e| numeric_err("symmetry check", e))?;
            let _ = writeln!(report, "symmetry defect: {sym:.3e} (bound {bound:.3e})");
        }
        EnsembleLabel::Cse => {
            let z_qubits = ensembles::time_reversal_qubits(
                config.architecture,
                config.n_qubits,
                config.z_mode,
            )?;
            let z = ensembles::z_on_qubits(config.n_qubits, &z_qubits);
            let zuz = z
                .matmul(&u.transpose().matmul(&z).map_err(|e| numeric_err("dual", e))?)
                .map_err(|e| numeric_err("dual", e))?;
            let dual = ComplexMatrix::from_fn(dim, dim, |i, j| u[(i, j)] + zuz[(i, j)]).max_abs();
            let _ = writeln!(
                report,
                "self-duality defect: {dual:.3e} (bound {:.3e})",
                1e-11 * dim as f64
            );
        }
        EnsembleLabel::Cue => {}
    }

    let bytes = match config.format {
        MatrixFormat::Bin => {
            let mut buf = Vec::new();
            matio::write_matrix_bin(&mut buf, &u).map_err(|e| CliError::Io(e.to_string()))?;
            buf
        }
        MatrixFormat::Json => {
            let mut buf = Vec::new();
            matio::write_matrix_json(&mut buf, &u).map_err(|e| CliError::Io(e.to_string()))?;
            buf
        }
    };
    fs::write(&config.out, bytes)?;
    let _ = writeln!(report, "wrote {}", config.out.display());
    Ok(report)
}

struct RealizationStats {
    spacings: Vec<f64>,
    amplitudes: Vec<f64>,
}

fn run_realization(
    config: &ExperimentConfig,
    realization: usize,
) -> Result<RealizationStats, CliError> {
    let tag = |e: &dyn std::fmt::Display| format!("realization {realization}: {e}");
    let spec = config.make_spec(substream(config.seed, realization as u64))?;
    let u = config.build(&spec)?;
    let decomp = eig_unitary(&u).map_err(|e| CliError::Numeric(tag(&e)))?;
    match config.ensemble {
        EnsembleLabel::Cse => {
            let pairing = spectra::kramers_pair(&decomp, PAIRING_TOL)
                .map_err(|e| CliError::Numeric(tag(&e)))?;
            let spacings = spectra::nn_spacings(&pairing.distinct_angles)
                .map_err(|e| CliError::Numeric(tag(&e)))?;
            let z_qubits = ensembles::time_reversal_qubits(
                config.architecture,
                config.n_qubits,
                config.z_mode,
            )?;
            let mask = ensembles::partner_mask(config.n_qubits, &z_qubits);
            let amplitudes = spectra::amplitudes_cse(&decomp, &pairing, mask, config.meta())
                .map_err(|e| CliError::Numeric(tag(&e)))?;
            Ok(RealizationStats {
                spacings,
                amplitudes: amplitudes.values,
            })
        }
        _ => {
            let spacings =
                spectra::nn_spacings(&decomp.angles).map_err(|e| CliError::Numeric(tag(&e)))?;
            let amplitudes = spectra::amplitudes_standard(&decomp, config.ensemble, config.meta());
            Ok(RealizationStats {
                spacings,
                amplitudes: amplitudes.values,
            })
        }
    }
}

/// Aggregate spacing and amplitude statistics over all realizations of a
/// configuration. Used by both `cmd_sample` and the Haar-oracle comparison.
pub fn collect_statistics(config: &ExperimentConfig) -> Result<(StatSample, StatSample), CliError> {
    config.validate()?;
    let runs: Result<Vec<RealizationStats>, CliError> = (1..=config.realizations)
        .into_par_iter()
        .map(|r| run_realization(config, r))
        .collect();
    let runs = runs?;
    let mut spacings = Vec::new();
    let mut amplitudes = Vec::new();
    for run in runs {
        spacings.extend(run.spacings);
        amplitudes.extend(run.amplitudes);
    }
    let spacings = StatSample {
        label: SampleLabel::Spacings,
        ensemble: config.ensemble,
        meta: config.meta(),
        values: spacings,
    };
    let amplitudes = StatSample {
        label: SampleLabel::Amplitudes,
        ensemble: config.ensemble,
        meta: config.meta(),
        values: amplitudes,
    };
    Ok((spacings, amplitudes))
}

fn write_sample_files(
    config: &ExperimentConfig,
    sample: &StatSample,
    stem: &str,
) -> Result<(PathBuf, PathBuf), CliError> {
    sample
        .verify_mean()
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let base = config.out.display();
    let json_path = PathBuf::from(format!("{base}.{stem}.json"));
    let csv_path = PathBuf::from(format!("{base}.{stem}.csv"));
    let mut buf = Vec::new();
    sample
        .to_json_writer(&mut buf)
        .map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(&json_path, buf)?;
    let hist = spectra::histogram(&sample.values, config.bins, config.range)
        .map_err(|e| CliError::Config(e.to_string()))?;
    fs::write(&csv_path, hist.to_csv())?;
    Ok((json_path, csv_path))
}

/// Run R realizations and write spacing/amplitude samples and histograms.
pub fn cmd_sample(config: &ExperimentConfig) -> Result<String, CliError> {
    let (spacings, amplitudes) = collect_statistics(config)?;
    let (sj, sc) = write_sample_files(config, &spacings, "spacings")?;
    let (aj, ac) = write_sample_files(config, &amplitudes, "amplitudes")?;
    let mut report = String::new();
    let _ = writeln!(
        report,
        "ensemble: {}  architecture: {}  n={} m={} R={} seed={}",
        config.ensemble,
        config.architecture,
        config.n_qubits,
        config.iterations,
        config.realizations,
        config.seed
    );
    let _ = writeln!(
        report,
        "spacings: {} values (mean {:.12})",
        spacings.values.len(),
        spacings.mean()
    );
    let _ = writeln!(
        report,
        "amplitudes: {} values (mean {:.12})",
        amplitudes.values.len(),
        amplitudes.mean()
    );
    for p in [&sj, &sc, &aj, &ac] {
        let _ = writeln!(report, "wrote {}", p.display());
    }
    Ok(report)
}

/// Matched Haar-oracle statistics for a sample's parameters.
fn oracle_statistics(sample: &StatSample, seed: u64) -> Result<Vec<f64>, CliError> {
    let dim = 1usize << sample.meta.n_qubits;
    let runs: Result<Vec<Vec<f64>>, CliError> = (1..=sample.meta.realizations)
        .into_par_iter()
        .map(|r| {
            let tag = |e: &dyn std::fmt::Display| format!("oracle realization {r}: {e}");
            let mut rng = SplitMix64::new(substream(seed, r as u64));
            let u = match sample.ensemble {
                EnsembleLabel::Cue => reference::haar_unitary(dim, &mut rng),
                EnsembleLabel::Coe => reference::haar_coe(dim, &mut rng),
                EnsembleLabel::Cse => reference::haar_cse(sample.meta.n_qubits, &mut rng),
            };
            let decomp = eig_unitary(&u).map_err(|e| CliError::Numeric(tag(&e)))?;
            match (sample.ensemble, sample.label) {
                (EnsembleLabel::Cse, SampleLabel::Spacings) => {
                    let pairing = spectra::kramers_pair(&decomp, PAIRING_TOL)
                        .map_err(|e| CliError::Numeric(tag(&e)))?;
                    spectra::nn_spacings(&pairing.distinct_angles)
                        .map_err(|e| CliError::Numeric(tag(&e)))
                }
                (EnsembleLabel::Cse, SampleLabel::Amplitudes) => {
                    let pairing = spectra::kramers_pair(&decomp, PAIRING_TOL)
                        .map_err(|e| CliError::Numeric(tag(&e)))?;
                    let mask = 1usize; // oracle uses the standard z
                    Ok(spectra::amplitudes_cse(&decomp, &pairing, mask, sample.meta)
                        .map_err(|e| CliError::Numeric(tag(&e)))?
                        .values)
                }
                (_, SampleLabel::Spacings) => spectra::nn_spacings(&decomp.angles)
                    .map_err(|e| CliError::Numeric(tag(&e))),
                (_, SampleLabel::Amplitudes) => {
                    Ok(spectra::amplitudes_standard(&decomp, sample.ensemble, sample.meta).values)
                }
            }
        })
        .collect();
    Ok(runs?.into_iter().flatten().collect())
}

/// Goodness-of-fit report of a stored sample against a target.
pub fn cmd_gof(config: &GofConfig) -> Result<String, CliError> {
    let file = fs::File::open(&config.sample_path)?;
    let sample = StatSample::from_json_reader(std::io::BufReader::new(file))
        .map_err(|e| CliError::Io(format!("{}: {e}", config.sample_path.display())))?;
    if sample.values.is_empty() {
        return Err(CliError::Config("sample holds no values".into()));
    }
    if let Some(expected) = config.expected_ensemble {
        if expected != sample.ensemble {
            return Err(CliError::Config(format!(
                "sample is labeled {}, not {}",
                sample.ensemble, expected
            )));
        }
    }
    let ks = match config.target {
        GofTarget::Surmise => {
            if sample.label != SampleLabel::Spacings {
                return Err(CliError::Config(
                    "target 'surmise' needs a spacings sample".into(),
                ));
            }
            let curve = reference::spacing_surmise(sample.ensemble);
            ks_statistic(&sample.values, |x| curve.cdf(x))
                .map_err(|e| CliError::Numeric(e.to_string()))?
        }
        GofTarget::AmplitudeLaw => {
            if sample.label != SampleLabel::Amplitudes {
                return Err(CliError::Config(
                    "target 'amplitude-law' needs an amplitudes sample".into(),
                ));
            }
            let curve = reference::amplitude_law(sample.ensemble);
            ks_statistic(&sample.values, |x| curve.cdf(x))
                .map_err(|e| CliError::Numeric(e.to_string()))?
        }
        GofTarget::HaarOracle => {
            let oracle = oracle_statistics(&sample, config.seed)?;
            ks_two_sample(&sample.values, &oracle)
                .map_err(|e| CliError::Numeric(e.to_string()))?
        }
    };

    let target_name = match config.target {
        GofTarget::Surmise => "surmise",
        GofTarget::AmplitudeLaw => "amplitude-law",
        GofTarget::HaarOracle => "haar-oracle",
    };
    let mut report = String::new();
    let _ = writeln!(report, "sample: {}", config.sample_path.display());
    let _ = writeln!(
        report,
        "label: {:?}  ensemble: {}  architecture: {}  n={} m={} R={}  values={}",
        sample.label,
        sample.ensemble,
        sample.meta.architecture,
        sample.meta.n_qubits,
        sample.meta.iterations,
        sample.meta.realizations,
        sample.values.len()
    );
    let _ = writeln!(report, "target: {target_name}");
    let _ = writeln!(report, "ks: {ks:.6}");
    if let Some(path) = &config.out {
        fs::write(path, &report)?;
    }
    Ok(report)
}

/// Emit `x,pdf,cdf` rows of a reference curve.
pub fn cmd_reference(config: &ReferenceConfig) -> Result<String, CliError> {
    let curve = match config.kind {
        crate::reference::CurveKind::SpacingSurmise => {
            reference::spacing_surmise(config.ensemble)
        }
        crate::reference::CurveKind::AmplitudeLaw => reference::amplitude_law(config.ensemble),
    };
    let mut out = String::from("x,pdf,cdf\n");
    let steps = (config.max / config.step).round() as usize;
    for k in 0..=steps {
        let x = k as f64 * config.step;
        let _ = writeln!(out, "{},{},{}", x, curve.pdf(x), curve.cdf(x));
    }
    if let Some(path) = &config.out {
        fs::write(path, &out)?;
        Ok(format!("wrote {}\n", path.display()))
    } else {
        Ok(out)
    }
}

/// Parse and run a command line; returns the text to print on success.
pub fn run(raw: &[String]) -> Result<String, CliError> {
    match parse_args(raw)? {
        Command::Generate(c) => cmd_generate(&c),
        Command::Sample(c) => cmd_sample(&c),
        Command::Gof(c) => cmd_gof(&c),
        Command::Reference(c) => cmd_reference(&c),
    }
}

/// Read a matrix back from a `generate` output (either format, sniffed from
/// the magic bytes).
pub fn read_matrix_file(path: &Path) -> Result<ComplexMatrix, CliError> {
    let bytes = fs::read(path)?;
    let m = if bytes.starts_with(matio::MAGIC) {
        matio::read_matrix_bin(&mut bytes.as_slice())
    } else {
        matio::read_matrix_json(&mut bytes.as_slice())
    }
    .map_err(|e| CliError::Io(e.to_string()))?;
    m.check_finite()
        .map_err(|e: LinalgError| CliError::Io(e.to_string()))?;
    Ok(m)
}
