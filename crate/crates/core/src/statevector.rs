//! Dense statevector simulation.
//!
//! Amplitudes live in one flat `Vec<Complex64>` indexed by basis state, qubit 0
//! being the least-significant bit. Each gate is applied in place by walking
//! the index pairs that differ only in the target bit.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::tolerance;

/// Upper bound on simulated width. The default keeps a statevector at
/// 16 MiB; [`QubitCap::HARD_LIMIT`] cannot be exceeded by configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct QubitCap(usize);

impl QubitCap {
    pub const DEFAULT: usize = 24;
    pub const HARD_LIMIT: usize = 26;
    pub const ENV_VAR: &'static str = "DEPOLAB_MAX_QUBITS";

    pub fn new(max_qubits: usize) -> Result<Self> {
        if max_qubits == 0 || max_qubits > Self::HARD_LIMIT {
            return Err(Error::Config(format!(
                "qubit cap must be in 1..={}, got {max_qubits}",
                Self::HARD_LIMIT
            )));
        }
        Ok(QubitCap(max_qubits))
    }

    /// Interprets the value of `DEPOLAB_MAX_QUBITS`; unset means the default.
    pub fn from_env_value(value: Option<&str>) -> Result<Self> {
        match value {
            None => Ok(Self::default()),
            Some(s) => {
                let n = s.trim().parse::<usize>().map_err(|_| {
                    Error::Config(format!("{} must be an integer, got {s:?}", Self::ENV_VAR))
                })?;
                Self::new(n)
            }
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn check(self, width: usize) -> Result<()> {
        if width > self.0 {
            Err(Error::WidthCap { width, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for QubitCap {
    fn default() -> Self {
        QubitCap(Self::DEFAULT)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `width` qubits.
    pub fn zero(width: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { width, amps }
    }

    pub fn from_amplitudes(width: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << width {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for width {width}",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > tolerance::EXACT {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(StateVector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, z: usize) -> Complex64 {
        self.amps[z]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        let v = gate.violations(0, self.width);
        if !v.is_empty() {
            return Err(Error::InvalidCircuit(v));
        }
        let t = &gate.targets;
        match gate.kind {
            GateKind::I1 => {}
            GateKind::X => self.for_each_pair(t[0], |a, b| std::mem::swap(a, b)),
            GateKind::H => self.for_each_pair(t[0], |a, b| {
                let (x, y) = (*a, *b);
                *a = (x + y) * FRAC_1_SQRT_2;
                *b = (x - y) * FRAC_1_SQRT_2;
            }),
            GateKind::S => self.phase(t[0], Complex64::i()),
            GateKind::T => self.phase(t[0], Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
            GateKind::Cnot => self.cnot(t[0], t[1]),
        }
        Ok(())
    }

    fn for_each_pair(&mut self, q: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        let stride = 1usize << q;
        for block in self.amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                f(a, b);
            }
        }
    }

    fn phase(&mut self, q: usize, w: Complex64) {
        let stride = 1usize << q;
        for block in self.amps.chunks_exact_mut(stride << 1) {
            for a in &mut block[stride..] {
                *a *= w;
            }
        }
    }

    fn cnot(&mut self, control: usize, target: usize) {
        let (cm, tm) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }
}

/// Exact outcome probabilities over `2^width` basis states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    width: usize,
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates nonnegativity and unit sum (to [`tolerance::EXACT`]).
    pub fn new(width: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << width {
            return Err(Error::InvalidDistribution(format!(
                "{} entries for width {width}",
                probs.len()
            )));
        }
        if let Some((z, p)) = probs.iter().enumerate().find(|(_, p)| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("entry {z} is {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tolerance::EXACT {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Distribution { width, probs })
    }

    pub(crate) fn from_probs_unchecked(width: usize, probs: Vec<f64>) -> Self {
        Distribution { width, probs }
    }

    pub fn uniform(width: usize) -> Self {
        let n = 1usize << width;
        Distribution {
            width,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(width: usize, z: usize) -> Self {
        let mut probs = vec![0.0; 1 << width];
        probs[z] = 1.0;
        Distribution { width, probs }
    }

    pub fn from_state(state: &StateVector) -> Self {
        Distribution {
            width: state.width,
            probs: state.amps.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;

    fn index(&self, z: usize) -> &f64 {
        &self.probs[z]
    }
}

/// Bit string for outcome `z`, qubit 0 printed leftmost.
pub fn outcome_label(z: usize, width: usize) -> String {
    (0..width).map(|q| if z >> q & 1 == 1 { '1' } else { '0' }).collect()
}

/// Returns `gate · state`.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

pub fn run(circuit: &Circuit) -> Result<StateVector> {
    run_with_cap(circuit, QubitCap::default())
}

pub fn run_with_cap(circuit: &Circuit, cap: QubitCap) -> Result<StateVector> {
    circuit.ensure_valid()?;
    cap.check(circuit.width())?;
    let mut state = StateVector::zero(circuit.width());
    for g in circuit.gates() {
        state.apply(g)?;
    }
    Ok(state)
}

pub fn output_distribution(circuit: &Circuit) -> Result<Distribution> {
    output_distribution_with_cap(circuit, QubitCap::default())
}

pub fn output_distribution_with_cap(circuit: &Circuit, cap: QubitCap) -> Result<Distribution> {
    run_with_cap(circuit, cap).map(|s| Distribution::from_state(&s))
}

/// ⟨0…0|U|0…0⟩. Its squared modulus is the all-zeros acceptance probability.
pub fn zero_overlap(circuit: &Circuit) -> Result<Complex64> {
    zero_overlap_with_cap(circuit, QubitCap::default())
}

pub fn zero_overlap_with_cap(circuit: &Circuit, cap: QubitCap) -> Result<Complex64> {
    run_with_cap(circuit, cap).map(|s| s.amps[0])
}
