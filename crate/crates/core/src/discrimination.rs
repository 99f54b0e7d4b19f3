//! Distinguishing a globally depolarized state from the maximally mixed one.
//!
//! With `ρ0 = I/2^n` and `ρ1 = F ρ + (1 - F) I/2^n`, the best two-outcome
//! measurement on `k` copies succeeds with probability
//! `1/2 + ‖ρ0^{⊗k} - ρ1^{⊗k}‖₁ / 4`, and that is at most `1/2 + kF/2`.
//! [`bound_chain`] evaluates every step between the two.
//!
//! Trace norms come from a dense Hermitian eigendecomposition, so the copy
//! count is capped at `k·n <= 12` qubits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::depol::Fidelity;
use crate::error::{Error, Result};
use crate::statevector::StateVector;
use crate::tolerance;

/// Largest `k·n` accepted for tensor powers (a 4096-dimensional matrix).
pub const MAX_TENSOR_QUBITS: usize = 12;

type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    width: usize,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Checks shape, Hermiticity and unit trace to 1e-12, and eigenvalues
    /// down to -1e-10.
    pub fn new(width: usize, entries: CMatrix) -> Result<Self> {
        let dim = 1usize << width;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::InvalidDensity(format!(
                "{}x{} matrix for width {width}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let asym = (&entries - entries.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if asym > tolerance::EXACT {
            return Err(Error::InvalidDensity(format!("not Hermitian (max |A - A†| = {asym:e})")));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > tolerance::EXACT || tr.im.abs() > tolerance::EXACT {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -tolerance::ORACLE {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { width, entries })
    }

    /// `I / 2^width`.
    pub fn maximally_mixed(width: usize) -> Self {
        let dim = 1usize << width;
        DensityMatrix {
            width,
            entries: CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|c| c.re).collect()
    }

    /// `ρ^{⊗k}` as a raw matrix.
    pub fn tensor_power(&self, k: usize) -> Result<CMatrix> {
        check_tensor_cap(self.width, k)?;
        let mut out = self.entries.clone();
        for _ in 1..k {
            out = out.kronecker(&self.entries);
        }
        Ok(out)
    }
}

fn check_tensor_cap(width: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Precondition("copy count k must be at least 1".into()));
    }
    if k.saturating_mul(width) > MAX_TENSOR_QUBITS {
        return Err(Error::EnumerationCap {
            what: format!("{k} copies of a {width}-qubit state"),
            limit: format!("k*n <= {MAX_TENSOR_QUBITS}"),
        });
    }
    Ok(())
}

/// `|ψ⟩⟨ψ|`.
pub fn density_from_pure(state: &StateVector) -> Result<DensityMatrix> {
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > tolerance::EXACT {
        return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
    }
    let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
    Ok(DensityMatrix {
        width: state.width(),
        entries: &psi * psi.adjoint(),
    })
}

/// `F ρ + (1 - F) I/2^n`.
pub fn depolarize_density(rho: &DensityMatrix, f: Fidelity) -> DensityMatrix {
    let fv = f.value();
    let dim = rho.dim();
    let mut entries = &rho.entries * Complex64::new(fv, 0.0);
    let noise = (1.0 - fv) / dim as f64;
    for i in 0..dim {
        entries[(i, i)] += noise;
    }
    DensityMatrix {
        width: rho.width,
        entries,
    }
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn hermitian_trace_norm(a: &CMatrix) -> f64 {
    a.clone().symmetric_eigenvalues().iter().map(|l| l.abs()).sum()
}

fn check_widths(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.width != b.width {
        return Err(Error::WidthMismatch {
            left: a.width,
            right: b.width,
        });
    }
    Ok(())
}

/// `‖ρ - σ‖₁`.
pub fn trace_norm_diff(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_widths(rho, sigma)?;
    Ok(hermitian_trace_norm(&(&rho.entries - &sigma.entries)))
}

fn tensor_diff(rho0: &DensityMatrix, rho1: &DensityMatrix, k: usize) -> Result<CMatrix> {
    check_widths(rho0, rho1)?;
    Ok(rho0.tensor_power(k)? - rho1.tensor_power(k)?)
}

/// Optimal probability of telling `ρ0^{⊗k}` from `ρ1^{⊗k}` with equal priors.
pub fn helstrom_correct(rho0: &DensityMatrix, rho1: &DensityMatrix, k: usize) -> Result<f64> {
    let diff = tensor_diff(rho0, rho1, k)?;
    Ok(0.5 + 0.25 * hermitian_trace_norm(&diff))
}

/// Projector `Π0` onto the nonnegative eigenspace of `ρ0^{⊗k} - ρ1^{⊗k}`,
/// the outcome that answers "ρ0".
pub fn helstrom_projector(rho0: &DensityMatrix, rho1: &DensityMatrix, k: usize) -> Result<CMatrix> {
    let diff = tensor_diff(rho0, rho1, k)?;
    let dim = diff.nrows();
    let eig = diff.symmetric_eigen();
    let mut proj = CMatrix::zeros(dim, dim);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l >= 0.0 {
            let v = eig.eigenvectors.column(i);
            proj += &v * v.adjoint();
        }
    }
    Ok(proj)
}

/// Success probability of the two-outcome measurement `{Π0, I - Π0}`.
pub fn measurement_success(rho0: &CMatrix, rho1: &CMatrix, pi0: &CMatrix) -> f64 {
    let a = (pi0 * rho0).trace().re;
    let b = (pi0 * rho1).trace().re;
    0.5 + 0.5 * (a - b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLink {
    pub name: &'static str,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

impl ChainLink {
    fn new(name: &'static str, relation: Relation, lhs: f64, rhs: f64) -> Self {
        let passed = match relation {
            Relation::Equal => (lhs - rhs).abs() <= tolerance::ORACLE,
            Relation::AtMost => lhs <= rhs + tolerance::ORACLE,
        };
        ChainLink {
            name,
            relation,
            lhs,
            rhs,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub width: usize,
    pub fidelity: f64,
    pub copies: usize,
    pub p_correct: f64,
    pub links: Vec<ChainLink>,
}

impl ChainReport {
    pub fn all_passed(&self) -> bool {
        self.links.iter().all(|l| l.passed)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChainOptions {
    /// Evaluate `p_correct` by building the Helstrom projector and measuring
    /// with it, instead of through the trace-norm identity.
    pub explicit_measurement: bool,
}

pub fn bound_chain(rho: &DensityMatrix, f: Fidelity, k: usize) -> Result<ChainReport> {
    bound_chain_with(rho, f, k, ChainOptions::default())
}

/// Evaluates, for `ρ0 = I/2^n` and `ρ1 = F ρ + (1 - F) I/2^n`:
///
/// 1. `p_correct = 1/2 + ‖ρ0^{⊗k} - ρ1^{⊗k}‖₁ / 4`
/// 2. `‖ρ0^{⊗k} - ρ1^{⊗k}‖₁ <= k ‖ρ0 - ρ1‖₁`
/// 3. `‖ρ0 - ρ1‖₁ = F ‖ρ - I/2^n‖₁`
/// 4. `‖ρ - I/2^n‖₁ <= 2`
/// 5. `p_correct <= 1/2 + kF/2`
pub fn bound_chain_with(rho: &DensityMatrix, f: Fidelity, k: usize, opts: ChainOptions) -> Result<ChainReport> {
    check_tensor_cap(rho.width, k)?;
    let fv = f.value();
    let rho0 = DensityMatrix::maximally_mixed(rho.width);
    let rho1 = depolarize_density(rho, f);

    let t0 = rho0.tensor_power(k)?;
    let t1 = rho1.tensor_power(k)?;
    let k_norm = hermitian_trace_norm(&(&t0 - &t1));
    let helstrom = 0.5 + 0.25 * k_norm;
    let p_correct = if opts.explicit_measurement {
        let pi0 = helstrom_projector(&rho0, &rho1, k)?;
        measurement_success(&t0, &t1, &pi0)
    } else {
        helstrom
    };

    let single = trace_norm_diff(&rho0, &rho1)?;
    let from_mixed = trace_norm_diff(rho, &rho0)?;
    let kf = k as f64;

    let links = vec![
        ChainLink::new("helstrom", Relation::Equal, p_correct, helstrom),
        ChainLink::new("copies-subadditive", Relation::AtMost, k_norm, kf * single),
        ChainLink::new("depolarized-difference", Relation::Equal, single, fv * from_mixed),
        ChainLink::new("trace-distance-at-most-two", Relation::AtMost, from_mixed, 2.0),
        ChainLink::new("success-bound", Relation::AtMost, p_correct, 0.5 + kf * fv / 2.0),
    ];
    Ok(ChainReport {
        width: rho.width,
        fidelity: fv,
        copies: k,
        p_correct,
        links,
    })
}
