//! Pseudo-random operators of the three circular ensembles.
//!
//! An operator is specified by a [`CircuitSpec`]: `m` iterations of "random
//! SU(2) rotation on every qubit, then the nearest-neighbor coupler", closed
//! by a final rotation layer. CUE operators are the bare circuit; COE
//! operators multiply the circuit by its transpose (realized gate-by-gate in
//! reverse order); CSE operators conjugate the transposed circuit with the
//! antisymmetric unitary `Z` of the time-reversal operator `T = ZC`.
//!
//! Qubit 1 is the most significant bit of the basis index, so the standard
//! `Z = I ⊗ ... ⊗ I ⊗ z` acts on the least significant qubit. On QCA
//! architectures all qubits of a species share each layer's rotation, and `Z`
//! becomes `z` applied to an odd number of qubits.

use crate::linalg::{ComplexMatrix, LinalgError};
use crate::rng::SplitMix64;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;
use thiserror::Error;

/// Default nearest-neighbor coupling constant (maximizes entanglement).
pub const DEFAULT_COUPLING: f64 = FRAC_PI_4;

/// Replacement value used when one bond is detuned to break mirror symmetry.
pub const SYMMETRY_BREAK_COUPLING: f64 = std::f64::consts::PI / 5.0;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("invalid circuit spec: {0}")]
    InvalidSpec(String),
    #[error("rotation layer {layer} out of range (have {layers} layers)")]
    LayerOutOfRange { layer: usize, layers: usize },
    #[error("expected {expected} couplings for {n_qubits} qubits, got {got}")]
    CouplingCount {
        expected: usize,
        got: usize,
        n_qubits: usize,
    },
    #[error("coupling override bond {bond} out of range 1..={bonds}")]
    InvalidOverride { bond: usize, bonds: usize },
    #[error("time-reversal operator unavailable: {0}")]
    ZModeParity(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The three circular ensembles.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnsembleLabel {
    #[serde(rename = "CUE")]
    Cue,
    #[serde(rename = "COE")]
    Coe,
    #[serde(rename = "CSE")]
    Cse,
}

impl std::fmt::Display for EnsembleLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Cue => write!(f, "CUE"),
            Self::Coe => write!(f, "COE"),
            Self::Cse => write!(f, "CSE"),
        }
    }
}

/// Which hardware layout realizes the circuit.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Architecture {
    /// Every qubit is individually addressable.
    Circuit,
    /// One species: all qubits receive the same rotation each layer.
    QcaOneSpecies,
    /// Two alternating species; qubits 1, 3, 5, ... are species A and
    /// qubits 2, 4, 6, ... are species B.
    QcaTwoSpecies,
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Circuit => write!(f, "Circuit"),
            Self::QcaOneSpecies => write!(f, "QcaOneSpecies"),
            Self::QcaTwoSpecies => write!(f, "QcaTwoSpecies"),
        }
    }
}

/// Form of the unitary part `Z` of the time-reversal operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZMode {
    /// `z` on the least significant qubit: `I ⊗ ... ⊗ I ⊗ z`.
    Standard,
    /// `z` on every qubit of an addressable set of odd size: the whole
    /// register for circuit/one-species layouts (odd `n`), the odd-sized
    /// species for two-species layouts.
    QcaAllQubits,
}

impl std::fmt::Display for ZMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Standard => write!(f, "Standard"),
            Self::QcaAllQubits => write!(f, "QcaAllQubits"),
        }
    }
}

/// One SU(2) rotation: `theta` in `[0, π/2]`, `phi` and `psi` in `[0, 2π)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationTriple {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl RotationTriple {
    pub const IDENTITY: RotationTriple = RotationTriple {
        theta: 0.0,
        phi: 0.0,
        psi: 0.0,
    };
}

/// Full parameterization of one pseudo-random realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub architecture: Architecture,
    pub n_qubits: usize,
    /// Number of coupler iterations `m`; there are `m + 1` rotation layers.
    pub iterations: usize,
    /// `(m + 1) x slots` table; `slots` is `n` for the circuit architecture,
    /// 1 for one-species QCA, 2 for two-species QCA.
    pub rotation_angles: Vec<Vec<RotationTriple>>,
    /// `n - 1` nearest-neighbor coupling constants.
    pub couplings: Vec<f64>,
    /// Seed the rotation table was filled from.
    pub seed: u64,
}

/// Rotation slots per layer for an architecture.
fn slots(architecture: Architecture, n_qubits: usize) -> usize {
    match architecture {
        Architecture::Circuit => n_qubits,
        Architecture::QcaOneSpecies => 1,
        Architecture::QcaTwoSpecies => 2,
    }
}

/// Species of a 0-based qubit index under the alternating convention:
/// 1-based odd positions are species A (slot 0), even are species B (slot 1).
fn species_slot(qubit: usize) -> usize {
    qubit % 2
}

impl CircuitSpec {
    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn layers(&self) -> usize {
        self.iterations + 1
    }

    fn slot_of(&self, qubit: usize) -> usize {
        match self.architecture {
            Architecture::Circuit => qubit,
            Architecture::QcaOneSpecies => 0,
            Architecture::QcaTwoSpecies => species_slot(qubit),
        }
    }

    /// Rotation applied to `qubit` (0-based, most significant first) in `layer`.
    pub fn rotation(&self, layer: usize, qubit: usize) -> RotationTriple {
        self.rotation_angles[layer][self.slot_of(qubit)]
    }

    /// Count of independent variables: three per rotation slot per layer plus
    /// one per distinct coupling value.
    pub fn independent_variable_count(&self) -> usize {
        let rotations = 3 * self.layers() * slots(self.architecture, self.n_qubits);
        let mut distinct: Vec<u64> = self.couplings.iter().map(|c| c.to_bits()).collect();
        distinct.sort_unstable();
        distinct.dedup();
        rotations + distinct.len()
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.n_qubits == 0 {
            return Err(EnsembleError::InvalidSpec("need at least one qubit".into()));
        }
        let want_slots = slots(self.architecture, self.n_qubits);
        if self.rotation_angles.len() != self.layers() {
            return Err(EnsembleError::InvalidSpec(format!(
                "expected {} rotation layers, got {}",
                self.layers(),
                self.rotation_angles.len()
            )));
        }
        for (i, layer) in self.rotation_angles.iter().enumerate() {
            if layer.len() != want_slots {
                return Err(EnsembleError::InvalidSpec(format!(
                    "layer {i} has {} rotation slots, expected {want_slots}",
                    layer.len()
                )));
            }
            for t in layer {
                let ok = (0.0..=std::f64::consts::FRAC_PI_2 + 1e-15).contains(&t.theta)
                    && (0.0..std::f64::consts::TAU).contains(&t.phi)
                    && (0.0..std::f64::consts::TAU).contains(&t.psi);
                if !ok {
                    return Err(EnsembleError::InvalidSpec(format!(
                        "rotation angles out of range in layer {i}: {t:?}"
                    )));
                }
            }
        }
        if self.couplings.len() + 1 != self.n_qubits {
            return Err(EnsembleError::CouplingCount {
                expected: self.n_qubits - 1,
                got: self.couplings.len(),
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }
}

/// θ with `sin²θ` distributed uniformly: `θ = arcsin(√ξ)`.
pub fn theta_from_xi(xi: f64) -> f64 {
    xi.sqrt().asin()
}

/// Draw one rotation triple: `phi`, `psi` uniform on `[0, 2π)` and
/// `θ = arcsin(√ξ)` with `ξ` uniform on `[0, 1)`, in that draw order.
pub fn sample_rotation_triple(rng: &mut SplitMix64) -> RotationTriple {
    let phi = std::f64::consts::TAU * rng.next_f64();
    let psi = std::f64::consts::TAU * rng.next_f64();
    let theta = theta_from_xi(rng.next_f64());
    RotationTriple { theta, phi, psi }
}

/// Deterministically fill a spec from a seed.
///
/// Rotation triples are drawn layer-major, then by ascending qubit/species
/// slot. Couplings default to π/4; `coupling_override` replaces the 1-based
/// bond index with the given value (bond `k` couples qubits `k` and `k + 1`).
pub fn make_spec(
    architecture: Architecture,
    n_qubits: usize,
    iterations: usize,
    seed: u64,
    coupling_override: Option<(usize, f64)>,
) -> Result<CircuitSpec, EnsembleError> {
    if n_qubits == 0 {
        return Err(EnsembleError::InvalidSpec("need at least one qubit".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let n_slots = slots(architecture, n_qubits);
    let rotation_angles = (0..=iterations)
        .map(|_| (0..n_slots).map(|_| sample_rotation_triple(&mut rng)).collect())
        .collect();
    let mut couplings = vec![DEFAULT_COUPLING; n_qubits - 1];
    if let Some((bond, value)) = coupling_override {
        if bond == 0 || bond > couplings.len() {
            return Err(EnsembleError::InvalidOverride {
                bond,
                bonds: couplings.len(),
            });
        }
        couplings[bond - 1] = value;
    }
    Ok(CircuitSpec {
        architecture,
        n_qubits,
        iterations,
        rotation_angles,
        couplings,
        seed,
    })
}

type Gate2 = [[Complex64; 2]; 2];

fn su2_gate(t: RotationTriple) -> Gate2 {
    let (ct, st) = (t.theta.cos(), t.theta.sin());
    let ephi = Complex64::new(t.phi.cos(), t.phi.sin());
    let epsi = Complex64::new(t.psi.cos(), t.psi.sin());
    [
        [ephi * ct, epsi * st],
        [-epsi.conj() * st, ephi.conj() * ct],
    ]
}

fn gate_transpose(g: &Gate2) -> Gate2 {
    [[g[0][0], g[1][0]], [g[0][1], g[1][1]]]
}

/// The `z` block `[[0, -1], [1, 0]]` as a gate.
const Z_GATE: Gate2 = [
    [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
];

/// Random SU(2) rotation matrix
/// `[[e^{iφ}cosθ, e^{iψ}sinθ], [-e^{-iψ}sinθ, e^{-iφ}cosθ]]`.
pub fn su2_rotation(theta: f64, phi: f64, psi: f64) -> ComplexMatrix {
    let g = su2_gate(RotationTriple { theta, phi, psi });
    ComplexMatrix::two_by_two([g[0][0], g[0][1], g[1][0], g[1][1]])
}

/// The 2x2 block `z = [[0, -1], [1, 0]]`.
pub fn z_single() -> ComplexMatrix {
    ComplexMatrix::two_by_two([Z_GATE[0][0], Z_GATE[0][1], Z_GATE[1][0], Z_GATE[1][1]])
}

/// The two-rotation gate realization of `z`: the factors
/// `exp(-i(π/2)σ_z) = diag(-i, i)` and `exp(-i(π/2)σ_x) = [[0, -i], [-i, 0]]`,
/// whose product is exactly `[[0, -1], [1, 0]]`.
pub fn z_gate_factors() -> (ComplexMatrix, ComplexMatrix) {
    let zero = Complex64::new(0.0, 0.0);
    let minus_i = Complex64::new(0.0, -1.0);
    let plus_i = Complex64::new(0.0, 1.0);
    let exp_z = ComplexMatrix::two_by_two([minus_i, zero, zero, plus_i]);
    let exp_x = ComplexMatrix::two_by_two([zero, minus_i, minus_i, zero]);
    (exp_z, exp_x)
}

/// Diagonal phases of the nearest-neighbor coupler: entry `b` is
/// `exp(i Σ_j c_j s_j s_{j+1})` with `s_j = ±1` for bit values 0/1 of
/// qubit `j` in basis state `b`.
fn nnc_phases(n_qubits: usize, couplings: &[f64]) -> Result<Vec<Complex64>, EnsembleError> {
    if couplings.len() + 1 != n_qubits {
        return Err(EnsembleError::CouplingCount {
            expected: n_qubits - 1,
            got: couplings.len(),
            n_qubits,
        });
    }
    let dim = 1usize << n_qubits;
    let mut phases = Vec::with_capacity(dim);
    for b in 0..dim {
        let sign = |q: usize| -> f64 {
            if (b >> (n_qubits - 1 - q)) & 1 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let mut total = 0.0;
        for (k, &c) in couplings.iter().enumerate() {
            total += c * sign(k) * sign(k + 1);
        }
        phases.push(Complex64::new(total.cos(), total.sin()));
    }
    Ok(phases)
}

/// Nearest-neighbor coupling operator as a (diagonal) matrix.
pub fn nnc_operator(n_qubits: usize, couplings: &[f64]) -> Result<ComplexMatrix, EnsembleError> {
    let phases = nnc_phases(n_qubits, couplings)?;
    let dim = phases.len();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (b, &p) in phases.iter().enumerate() {
        m[(b, b)] = p;
    }
    Ok(m)
}

/// Left-multiply `mat` by a single-qubit gate acting on `qubit`.
fn apply_gate_left(mat: &mut ComplexMatrix, n_qubits: usize, qubit: usize, g: &Gate2) {
    let cols = mat.cols();
    let bit = 1usize << (n_qubits - 1 - qubit);
    let dim = 1usize << n_qubits;
    debug_assert_eq!(mat.rows(), dim);
    let data = mat.data_mut();
    for r0 in 0..dim {
        if r0 & bit != 0 {
            continue;
        }
        let r1 = r0 | bit;
        let (head, tail) = data.split_at_mut(r1 * cols);
        let row0 = &mut head[r0 * cols..r0 * cols + cols];
        let row1 = &mut tail[..cols];
        for j in 0..cols {
            let a = row0[j];
            let b = row1[j];
            row0[j] = g[0][0] * a + g[0][1] * b;
            row1[j] = g[1][0] * a + g[1][1] * b;
        }
    }
}

/// Left-multiply `mat` by a diagonal operator.
fn apply_phases_left(mat: &mut ComplexMatrix, phases: &[Complex64]) {
    let cols = mat.cols();
    let data = mat.data_mut();
    for (r, &p) in phases.iter().enumerate() {
        for v in &mut data[r * cols..(r + 1) * cols] {
            *v *= p;
        }
    }
}

/// Left-multiply by one full rotation layer.
fn apply_layer(mat: &mut ComplexMatrix, spec: &CircuitSpec, layer: usize, transposed: bool) {
    for q in 0..spec.n_qubits {
        let mut g = su2_gate(spec.rotation(layer, q));
        if transposed {
            g = gate_transpose(&g);
        }
        apply_gate_left(mat, spec.n_qubits, q, &g);
    }
}

/// The full Kronecker-product matrix of one rotation layer.
pub fn layer_rotation(spec: &CircuitSpec, layer: usize) -> Result<ComplexMatrix, EnsembleError> {
    spec.validate()?;
    if layer >= spec.layers() {
        return Err(EnsembleError::LayerOutOfRange {
            layer,
            layers: spec.layers(),
        });
    }
    let mut m = ComplexMatrix::identity(1);
    for q in 0..spec.n_qubits {
        let t = spec.rotation(layer, q);
        m = m.kron(&su2_rotation(t.theta, t.phi, t.psi));
    }
    Ok(m)
}

/// Pseudo-random CUE operator: rotation layer 0, coupler, rotation layer 1,
/// coupler, ..., closed by rotation layer `m`.
pub fn build_cue(spec: &CircuitSpec) -> Result<ComplexMatrix, EnsembleError> {
    spec.validate()?;
    let phases = nnc_phases(spec.n_qubits, &spec.couplings)?;
    let mut u = ComplexMatrix::identity(spec.dim());
    for layer in 0..spec.layers() {
        apply_layer(&mut u, spec, layer, false);
        if layer < spec.iterations {
            apply_phases_left(&mut u, &phases);
        }
    }
    Ok(u)
}

/// Transpose of the CUE operator, realized gate-by-gate: the transpose of
/// every operation applied in reverse order; the coupler is symmetric and
/// enters unchanged.
pub fn build_transpose_circuit(spec: &CircuitSpec) -> Result<ComplexMatrix, EnsembleError> {
    spec.validate()?;
    let phases = nnc_phases(spec.n_qubits, &spec.couplings)?;
    let mut u = ComplexMatrix::identity(spec.dim());
    apply_transpose_gates(&mut u, spec, &phases);
    Ok(u)
}

fn apply_transpose_gates(u: &mut ComplexMatrix, spec: &CircuitSpec, phases: &[Complex64]) {
    for layer in (0..spec.layers()).rev() {
        apply_layer(u, spec, layer, true);
        if layer > 0 {
            apply_phases_left(u, phases);
        }
    }
}

/// Pseudo-random COE operator `U_cue^T · U_cue`; symmetric unitary.
pub fn build_coe(spec: &CircuitSpec) -> Result<ComplexMatrix, EnsembleError> {
    spec.validate()?;
    let phases = nnc_phases(spec.n_qubits, &spec.couplings)?;
    let mut u = build_cue(spec)?;
    apply_transpose_gates(&mut u, spec, &phases);
    Ok(u)
}

/// 0-based qubits that carry `z` in the given time-reversal mode.
///
/// `Standard` always places `z` on the least significant qubit. On the
/// two-species layout, `QcaAllQubits` addresses the species with an odd
/// number of qubits (the antisymmetry `Z^T = -Z` needs an odd `z` count);
/// elsewhere it addresses the whole register and requires odd `n`.
pub fn time_reversal_qubits(
    architecture: Architecture,
    n_qubits: usize,
    mode: ZMode,
) -> Result<Vec<usize>, EnsembleError> {
    match mode {
        ZMode::Standard => Ok(vec![n_qubits - 1]),
        ZMode::QcaAllQubits => match architecture {
            Architecture::Circuit | Architecture::QcaOneSpecies => {
                if n_qubits % 2 == 0 {
                    Err(EnsembleError::ZModeParity(format!(
                        "z on all {n_qubits} qubits is symmetric, not antisymmetric; \
                         need an odd qubit count"
                    )))
                } else {
                    Ok((0..n_qubits).collect())
                }
            }
            Architecture::QcaTwoSpecies => {
                let species_a: Vec<usize> = (0..n_qubits).filter(|q| species_slot(*q) == 0).collect();
                let species_b: Vec<usize> = (0..n_qubits).filter(|q| species_slot(*q) == 1).collect();
                if species_a.len() % 2 == 1 {
                    Ok(species_a)
                } else if species_b.len() % 2 == 1 {
                    Ok(species_b)
                } else {
                    Err(EnsembleError::ZModeParity(format!(
                        "neither species has an odd qubit count for n = {n_qubits}"
                    )))
                }
            }
        },
    }
}

/// Basis-index XOR mask pairing `k` with its time-reversal partner
/// `k' = k ^ mask` for `z` applied to the given qubits.
pub fn partner_mask(n_qubits: usize, z_qubits: &[usize]) -> usize {
    z_qubits
        .iter()
        .fold(0usize, |m, &q| m | (1usize << (n_qubits - 1 - q)))
}

/// The unitary part `Z` of the time-reversal operator as a matrix.
///
/// `Standard` gives `I ⊗ ... ⊗ I ⊗ z`; `QcaAllQubits` gives `z^{⊗n}` and
/// requires odd `n`. Both satisfy `Z·Z* = -I` and `Z^T = -Z`.
pub fn z_operator(n_qubits: usize, mode: ZMode) -> Result<ComplexMatrix, EnsembleError> {
    let qubits = time_reversal_qubits(Architecture::Circuit, n_qubits, mode)?;
    Ok(z_on_qubits(n_qubits, &qubits))
}

/// `z` on the listed qubits, identity elsewhere.
pub fn z_on_qubits(n_qubits: usize, z_qubits: &[usize]) -> ComplexMatrix {
    let z = z_single();
    let i2 = ComplexMatrix::identity(2);
    let mut m = ComplexMatrix::identity(1);
    for q in 0..n_qubits {
        m = m.kron(if z_qubits.contains(&q) { &z } else { &i2 });
    }
    m
}

/// Pseudo-random CSE operator `-Z U_cue^T Z U_cue`, self-dual with respect to
/// the `Z` of the chosen mode. The leading minus sign is a global phase and
/// is kept so the self-duality identity holds as a matrix equation.
pub fn build_cse(spec: &CircuitSpec, z_mode: ZMode) -> Result<ComplexMatrix, EnsembleError> {
    spec.validate()?;
    let z_qubits = time_reversal_qubits(spec.architecture, spec.n_qubits, z_mode)?;
    let phases = nnc_phases(spec.n_qubits, &spec.couplings)?;
    let mut u = build_cue(spec)?;
    for &q in &z_qubits {
        apply_gate_left(&mut u, spec.n_qubits, q, &Z_GATE);
    }
    apply_transpose_gates(&mut u, spec, &phases);
    for &q in &z_qubits {
        apply_gate_left(&mut u, spec.n_qubits, q, &Z_GATE);
    }
    let minus_one = Complex64::new(-1.0, 0.0);
    for v in u.data_mut() {
        *v *= minus_one;
    }
    Ok(u)
}
