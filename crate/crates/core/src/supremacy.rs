//! The randomized ancilla construction and its acceptance thresholds.
//!
//! Starting from a `w`-qubit circuit `V = w_m ⋯ w_1`, the randomized circuit
//! runs on `n = w + m` qubits. At step `j` it applies either `w_j ⊗ I` or
//! `η_j ⊗ X` with probability 1/2, where the `X` acts on ancilla qubit `j`.
//! The ancilla register therefore records the branch string `α`, and the
//! all-zeros outcome only survives on the branch `α = 0^m` that ran `V` itself.
//!
//! Layout: main register on qubits `0..w`, ancilla `j` on qubit `w + j`, so
//! the joint outcome index is `y | α << w`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::depol::Fidelity;
use crate::error::{Error, Result};
use crate::random::seeded_rng;
use crate::statevector::{zero_overlap_with_cap, Distribution, QubitCap, StateVector};

/// Largest ancilla width [`mixture_distribution`] will enumerate.
pub const MAX_ENUMERATED_STEPS: usize = 20;

/// How the alternative gate `η_j` is chosen for each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EtaPolicy {
    /// `X` on the first target of `w_j`.
    FlipFirstTarget,
    /// One gate per step, in step order.
    Explicit(Vec<Gate>),
}

impl Default for EtaPolicy {
    fn default() -> Self {
        EtaPolicy::FlipFirstTarget
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomizedCircuit {
    main_width: usize,
    /// `(w_j, η_j)` per step.
    steps: Vec<(Gate, Gate)>,
}

impl RandomizedCircuit {
    pub fn main_width(&self) -> usize {
        self.main_width
    }

    /// One ancilla per step.
    pub fn ancilla_width(&self) -> usize {
        self.steps.len()
    }

    pub fn total_width(&self) -> usize {
        self.main_width + self.steps.len()
    }

    pub fn steps(&self) -> &[(Gate, Gate)] {
        &self.steps
    }

    /// The original circuit `V` on the main register.
    pub fn main_circuit(&self) -> Circuit {
        Circuit::from_parts(self.main_width, self.steps.iter().map(|(w, _)| w.clone()).collect())
    }

    /// `ξ_j^bit`: `w_j` for `false`, `η_j` for `true`.
    fn branch_gate(&self, j: usize, bit: bool) -> &Gate {
        let (w, eta) = &self.steps[j];
        if bit {
            eta
        } else {
            w
        }
    }
}

fn check_eta(step: usize, eta: &Gate, width: usize) -> Result<()> {
    if eta.kind == GateKind::I1 {
        return Err(Error::IllegalEta {
            step,
            reason: "identity is not an elementary gate choice".into(),
        });
    }
    let v = eta.violations(step, width);
    if let Some(first) = v.first() {
        return Err(Error::IllegalEta {
            step,
            reason: first.to_string(),
        });
    }
    Ok(())
}

pub fn build_randomized_circuit(v: &Circuit, policy: &EtaPolicy) -> Result<RandomizedCircuit> {
    v.ensure_valid()?;
    let etas: Vec<Gate> = match policy {
        EtaPolicy::FlipFirstTarget => v.gates().iter().map(|g| Gate::x(g.targets[0])).collect(),
        EtaPolicy::Explicit(list) => {
            if list.len() != v.gate_count() {
                return Err(Error::Precondition(format!(
                    "eta policy has {} gates for {} steps",
                    list.len(),
                    v.gate_count()
                )));
            }
            list.clone()
        }
    };
    for (j, eta) in etas.iter().enumerate() {
        check_eta(j, eta, v.width())?;
    }
    Ok(RandomizedCircuit {
        main_width: v.width(),
        steps: v.gates().iter().cloned().zip(etas).collect(),
    })
}

pub fn mixture_distribution(rc: &RandomizedCircuit) -> Result<Distribution> {
    mixture_distribution_with_cap(rc, QubitCap::default())
}

/// Exact distribution of the joint outcome `(y, α)`:
/// `P(y, α) = 2^-m |⟨y| ξ_m^{α_m} ⋯ ξ_1^{α_1} |0^w⟩|²`.
///
/// Branches are enumerated depth-first so that common gate prefixes are
/// simulated once.
pub fn mixture_distribution_with_cap(rc: &RandomizedCircuit, cap: QubitCap) -> Result<Distribution> {
    let m = rc.ancilla_width();
    if m > MAX_ENUMERATED_STEPS {
        return Err(Error::EnumerationCap {
            what: format!("{m} branch steps"),
            limit: format!("{MAX_ENUMERATED_STEPS}"),
        });
    }
    cap.check(rc.total_width())?;

    let mut probs = vec![0.0; 1 << rc.total_width()];
    let weight = 0.5f64.powi(m as i32);
    enumerate_branches(rc, 0, 0, StateVector::zero(rc.main_width), weight, &mut probs)?;
    Ok(Distribution::from_probs_unchecked(rc.total_width(), probs))
}

fn enumerate_branches(
    rc: &RandomizedCircuit,
    step: usize,
    alpha: usize,
    state: StateVector,
    weight: f64,
    out: &mut [f64],
) -> Result<()> {
    if step == rc.ancilla_width() {
        let base = alpha << rc.main_width;
        for (y, a) in state.amplitudes().iter().enumerate() {
            out[base | y] = weight * a.norm_sqr();
        }
        return Ok(());
    }
    let mut flipped = state.clone();
    flipped.apply(rc.branch_gate(step, true))?;
    let mut kept = state;
    kept.apply(rc.branch_gate(step, false))?;
    enumerate_branches(rc, step + 1, alpha, kept, weight, out)?;
    enumerate_branches(rc, step + 1, alpha | 1 << step, flipped, weight, out)
}

/// One draw of the branch string and the circuit it realizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    /// `alpha[j]` is true when step `j` took `η_j ⊗ X`.
    pub alpha: Vec<bool>,
    /// Circuit on `w + m` qubits with the ancilla flips made explicit.
    pub circuit: Circuit,
}

impl Branch {
    /// `α` packed with step 0 in the least-significant bit.
    pub fn alpha_index(&self) -> usize {
        self.alpha
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | (b as usize) << j)
    }
}

pub fn sample_branch(rc: &RandomizedCircuit, seed: u64) -> Branch {
    let mut rng = seeded_rng(seed);
    let w = rc.main_width;
    let mut alpha = Vec::with_capacity(rc.ancilla_width());
    let mut gates = Vec::with_capacity(2 * rc.ancilla_width());
    for j in 0..rc.ancilla_width() {
        let bit: bool = rng.gen();
        alpha.push(bit);
        gates.push(rc.branch_gate(j, bit).clone());
        if bit {
            gates.push(Gate::x(w + j));
        }
    }
    Branch {
        alpha,
        circuit: Circuit::from_parts(rc.total_width(), gates),
    }
}

/// `q = |⟨0^w|V|0^w⟩|²`, the ideal acceptance probability of `V`.
pub fn ideal_acceptance(rc: &RandomizedCircuit) -> Result<f64> {
    ideal_acceptance_with_cap(rc, QubitCap::default())
}

pub fn ideal_acceptance_with_cap(rc: &RandomizedCircuit, cap: QubitCap) -> Result<f64> {
    zero_overlap_with_cap(&rc.main_circuit(), cap).map(|a: Complex64| a.norm_sqr())
}

/// All-zeros acceptance probability after global depolarization:
/// `F q / 2^m + (1 - F) / 2^n`.
pub fn depolarized_acceptance(rc: &RandomizedCircuit, f: Fidelity) -> Result<f64> {
    depolarized_acceptance_with_cap(rc, f, QubitCap::default())
}

pub fn depolarized_acceptance_with_cap(rc: &RandomizedCircuit, f: Fidelity, cap: QubitCap) -> Result<f64> {
    let q = ideal_acceptance_with_cap(rc, cap)?;
    Ok(accept_from_q(q, rc.ancilla_width(), rc.total_width(), f))
}

pub(crate) fn accept_from_q(q: f64, m: usize, n: usize, f: Fidelity) -> f64 {
    let f = f.value();
    f * q * 0.5f64.powi(m as i32) + (1.0 - f) * 0.5f64.powi(n as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdParams {
    pub r: u32,
    pub w: u32,
    pub m: u32,
    pub fidelity: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    /// Lower bound on a multiplicative-error sampler's acceptance for yes instances.
    pub yes_lower: f64,
    /// Upper bound on the same for no instances.
    pub no_upper: f64,
    pub ratio: f64,
    /// `yes_lower >= 2 * no_upper`.
    pub sbp_ok: bool,
    pub params: ThresholdParams,
}

/// Acceptance thresholds for a sampler within multiplicative error `ε`, given
/// a circuit family whose ideal acceptance is `>= 1 - 2^-r` (yes) or
/// `<= 2^-r` (no):
///
/// ```text
/// yes_lower = (1 - ε) F 2^-m (1 - 2^-r)²
/// no_upper  = 2^-m (1 + ε) F (2^-2r + (1 - F) / (F 2^w))
/// ```
pub fn sbp_thresholds(r: u32, w: u32, m: u32, f: Fidelity, epsilon: f64) -> Result<ThresholdReport> {
    if r == 0 || w == 0 || m == 0 {
        return Err(Error::Precondition(format!(
            "r, w, m must be positive, got r={r} w={w} m={m}"
        )));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Precondition(format!("epsilon must lie in [0, 1), got {epsilon}")));
    }
    let fv = f.value();
    if fv == 0.0 {
        return Err(Error::Precondition("threshold gap is undefined at F = 0".into()));
    }
    let pow2 = |k: i32| 2f64.powi(k);
    let (r, w, m) = (r as i32, w as i32, m as i32);
    let yes_lower = (1.0 - epsilon) * fv * pow2(-m) * (1.0 - pow2(-r)).powi(2);
    let no_upper = pow2(-m) * (1.0 + epsilon) * fv * (pow2(-2 * r) + (1.0 - fv) / (fv * pow2(w)));
    Ok(ThresholdReport {
        yes_lower,
        no_upper,
        ratio: yes_lower / no_upper,
        sbp_ok: yes_lower >= 2.0 * no_upper,
        params: ThresholdParams {
            r: r as u32,
            w: w as u32,
            m: m as u32,
            fidelity: fv,
            epsilon,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardnessGap {
    pub alpha: f64,
    pub beta: f64,
    pub gap: f64,
}

/// Depolarized images of the promise thresholds `a > b` and their separation
/// `F (a - b)`, which does not depend on `n`.
pub fn hardness_gap(a: f64, b: f64, f: Fidelity, n: usize) -> Result<HardnessGap> {
    if !(0.0 <= b && b < a && a <= 1.0) {
        return Err(Error::Precondition(format!("need 0 <= b < a <= 1, got a={a} b={b}")));
    }
    let fv = f.value();
    let noise = (1.0 - fv) * 0.5f64.powi(n as i32);
    Ok(HardnessGap {
        alpha: fv * a + noise,
        beta: fv * b + noise,
        gap: fv * (a - b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_circuit;
    use crate::statevector::{output_distribution, zero_overlap};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fid(x: f64) -> Fidelity {
        Fidelity::new(x).unwrap()
    }

    fn circ(width: usize, gates: Vec<Gate>) -> Circuit {
        Circuit::new(width, gates).unwrap()
    }

    fn default_rc(v: &Circuit) -> RandomizedCircuit {
        build_randomized_circuit(v, &EtaPolicy::default()).unwrap()
    }

    /// Independent oracle: average the output distributions of every
    /// realized branch circuit, each simulated from scratch.
    fn mixture_by_branch_circuits(rc: &RandomizedCircuit) -> Vec<f64> {
        let (w, m) = (rc.main_width(), rc.ancilla_width());
        let mut out = vec![0.0; 1 << (w + m)];
        for alpha in 0..1usize << m {
            let mut gates = Vec::new();
            for (j, (wj, eta)) in rc.steps().iter().enumerate() {
                if alpha >> j & 1 == 1 {
                    gates.push(eta.clone());
                    gates.push(Gate::x(w + j));
                } else {
                    gates.push(wj.clone());
                }
            }
            let d = output_distribution(&circ(w + m, gates)).unwrap();
            for (z, p) in d.probs().iter().enumerate() {
                out[z] += p / (1 << m) as f64;
            }
        }
        out
    }

    #[test]
    fn build_examples() {
        let rc = default_rc(&circ(1, vec![Gate::h(0)]));
        assert_eq!(rc.steps(), &[(Gate::h(0), Gate::x(0))]);
        assert_eq!((rc.main_width(), rc.ancilla_width(), rc.total_width()), (1, 1, 2));

        let rc = default_rc(&circ(2, vec![Gate::h(0), Gate::cnot(0, 1)]));
        assert_eq!(rc.steps()[0].1, Gate::x(0));
        assert_eq!(rc.steps()[1].1, Gate::x(0));

        let v = circ(1, vec![Gate::h(0)]);
        let e = build_randomized_circuit(&v, &EtaPolicy::Explicit(vec![Gate::identity(0)])).unwrap_err();
        assert!(matches!(e, Error::IllegalEta { step: 0, .. }));
        let e = build_randomized_circuit(&v, &EtaPolicy::Explicit(vec![Gate::x(1)])).unwrap_err();
        assert!(matches!(e, Error::IllegalEta { .. }));
        assert!(build_randomized_circuit(&v, &EtaPolicy::Explicit(vec![])).is_err());
        assert!(build_randomized_circuit(&v, &EtaPolicy::Explicit(vec![Gate::t(0)])).is_ok());
    }

    #[test]
    fn mixture_hadamard_example() {
        let rc = default_rc(&circ(1, vec![Gate::h(0)]));
        let d = mixture_distribution(&rc).unwrap();
        // index = y | alpha << 1
        let want = [0.25, 0.25, 0.0, 0.5];
        for (z, (p, q)) in d.probs().iter().zip(want).enumerate() {
            assert!((p - q).abs() < 1e-12, "entry {z}: {p} vs {q}");
        }
    }

    #[test]
    fn mixture_matches_branch_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let w = rng.gen_range(1..=3);
            let m = rng.gen_range(0..=6);
            let rc = default_rc(&random_circuit(&mut rng, w, m));
            let d = mixture_distribution(&rc).unwrap();
            let oracle = mixture_by_branch_circuits(&rc);
            for (a, b) in d.probs().iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mixture_slices_and_accept_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_circuit(&mut rng, 3, 7);
        let rc = default_rc(&v);
        let d = mixture_distribution(&rc).unwrap();
        let w = rc.main_width();
        for alpha in 0..1usize << rc.ancilla_width() {
            let slice: f64 = d.probs()[alpha << w..(alpha + 1) << w].iter().sum();
            assert!((slice - 1.0 / 128.0).abs() < 1e-12);
        }
        let q = zero_overlap(&v).unwrap().norm_sqr();
        assert!((d[0] - q / 128.0).abs() < 1e-12);
    }

    #[test]
    fn equal_branch_gates_give_identical_slices() {
        let v = circ(2, vec![Gate::h(0), Gate::cnot(0, 1), Gate::t(1)]);
        let rc = build_randomized_circuit(&v, &EtaPolicy::Explicit(v.gates().to_vec())).unwrap();
        let d = mixture_distribution(&rc).unwrap();
        let first = &d.probs()[..4];
        for alpha in 1..8 {
            assert_eq!(&d.probs()[alpha * 4..alpha * 4 + 4], first);
        }
    }

    #[test]
    fn mixture_caps() {
        let v = Circuit::from_parts(1, vec![Gate::x(0); 21]);
        let rc = default_rc(&v);
        assert!(matches!(mixture_distribution(&rc), Err(Error::EnumerationCap { .. })));
        let v = Circuit::from_parts(10, vec![Gate::x(0); 15]);
        assert!(matches!(mixture_distribution(&default_rc(&v)), Err(Error::WidthCap { .. })));
    }

    #[test]
    fn sample_branch_examples() {
        let rc = default_rc(&circ(1, vec![Gate::h(0)]));
        assert_eq!(sample_branch(&rc, 5), sample_branch(&rc, 5));

        let n = 100_000u64;
        let ones = (0..n).filter(|&s| sample_branch(&rc, s).alpha[0]).count() as f64;
        let sigma = (n as f64 / 4.0).sqrt();
        assert!((ones - n as f64 / 2.0).abs() <= 3.0 * sigma, "ones {ones}");

        let v = circ(2, vec![]);
        let b = sample_branch(&default_rc(&v), 1);
        assert!(b.alpha.is_empty());
        assert_eq!(b.circuit, v);
    }

    #[test]
    fn sample_branch_realizes_flips() {
        let rc = default_rc(&circ(1, vec![Gate::h(0), Gate::t(0)]));
        for seed in 0..16 {
            let b = sample_branch(&rc, seed);
            assert!(b.circuit.is_valid());
            let flips = b.circuit.gates().iter().filter(|g| g.targets[0] >= 1).count();
            assert_eq!(flips, b.alpha.iter().filter(|&&x| x).count());
            // ancilla register reads out alpha deterministically
            let d = output_distribution(&b.circuit).unwrap();
            let anc: f64 = (0..2).map(|y| d[y | b.alpha_index() << 1]).sum();
            assert!((anc - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn depolarized_acceptance_examples() {
        let rc = default_rc(&circ(1, vec![Gate::h(0)]));
        for f in [0.0, 0.1, 0.5, 0.9, 1.0] {
            assert!((depolarized_acceptance(&rc, fid(f)).unwrap() - 0.25).abs() < 1e-15);
        }
        let rc = default_rc(&circ(1, vec![Gate::x(0), Gate::x(0)]));
        for f in [0.0, 0.3, 1.0] {
            let want = f / 4.0 + (1.0 - f) / 8.0;
            assert!((depolarized_acceptance(&rc, fid(f)).unwrap() - want).abs() < 1e-15);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rc = default_rc(&random_circuit(&mut rng, 3, 5));
        assert_eq!(depolarized_acceptance(&rc, Fidelity::ZERO).unwrap(), 0.5f64.powi(8));
    }

    #[test]
    fn threshold_example_values() {
        let t = sbp_thresholds(3, 10, 4, fid(0.5), 0.5).unwrap();
        // (1 - 1/2) (1/2) (1/16) (7/8)^2 = 49/4096
        assert!((t.yes_lower - 49.0 / 4096.0).abs() < 1e-15);
        // (1/16)(3/2)(1/2)(1/64 + 1/1024) = (3/64)(17/1024)
        assert!((t.no_upper - 3.0 / 64.0 * 17.0 / 1024.0).abs() < 1e-15);
        assert!((t.ratio - 15.372549019607844).abs() < 1e-12);
        assert!(t.sbp_ok);

        let t = sbp_thresholds(1, 1, 1, fid(0.5), 0.9).unwrap();
        assert!(!t.sbp_ok);

        let small = sbp_thresholds(4, 20, 3, Fidelity::ONE, 0.0).unwrap();
        let big = sbp_thresholds(16, 40, 3, Fidelity::ONE, 0.0).unwrap();
        assert!(big.ratio > small.ratio && big.ratio > 1e9);
        assert!(big.sbp_ok);

        assert!(sbp_thresholds(3, 10, 4, Fidelity::ZERO, 0.5).is_err());
        assert!(sbp_thresholds(3, 10, 4, fid(0.5), 1.0).is_err());
        assert!(sbp_thresholds(0, 10, 4, fid(0.5), 0.5).is_err());
    }

    #[test]
    fn thresholds_bound_the_construction() {
        // Enumerate every circuit of up to 3 gates on w <= 2 and check both
        // bounds against the exact depolarized acceptance.
        let mut pool = Vec::new();
        for w in 1..=2usize {
            let mut gates = vec![];
            for q in 0..w {
                for k in [GateKind::H, GateKind::X, GateKind::S, GateKind::T] {
                    gates.push(Gate::new(k, vec![q]));
                }
            }
            if w == 2 {
                gates.push(Gate::cnot(0, 1));
                gates.push(Gate::cnot(1, 0));
            }
            for m in 1..=3u32 {
                let mut idx = vec![0usize; m as usize];
                loop {
                    pool.push(circ(w, idx.iter().map(|&i| gates[i].clone()).collect()));
                    let mut k = 0;
                    while k < idx.len() {
                        idx[k] += 1;
                        if idx[k] < gates.len() {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == idx.len() {
                        break;
                    }
                }
            }
        }
        let mut yes_seen = 0;
        let mut no_seen = 0;
        for v in &pool {
            let rc = default_rc(v);
            let q = ideal_acceptance(&rc).unwrap();
            for r in 1..=4u32 {
                for (f, eps) in [(0.5, 0.5), (0.9, 0.1), (1.0, 0.0), (0.25, 0.75)] {
                    let t = sbp_thresholds(r, rc.main_width() as u32, rc.ancilla_width() as u32, fid(f), eps)
                        .unwrap();
                    let p = depolarized_acceptance(&rc, fid(f)).unwrap();
                    let tiny = 2f64.powi(-(r as i32));
                    if q >= (1.0 - tiny).powi(2) {
                        yes_seen += 1;
                        assert!(t.yes_lower <= (1.0 - eps) * p + 1e-15);
                    }
                    if q <= tiny * tiny {
                        no_seen += 1;
                        assert!((1.0 + eps) * p <= t.no_upper + 1e-15);
                    }
                }
            }
        }
        assert!(yes_seen > 0 && no_seen > 0);
    }

    #[test]
    fn hardness_gap_examples() {
        let g = hardness_gap(1.0, 0.0, fid(2f64.powi(-10)), 4).unwrap();
        assert_eq!(g.gap, 2f64.powi(-10));
        let g = hardness_gap(0.75, 0.25, Fidelity::ONE, 7).unwrap();
        assert_eq!((g.alpha, g.beta, g.gap), (0.75, 0.25, 0.5));
        let gaps: Vec<f64> = (1..12).map(|n| hardness_gap(0.6, 0.1, fid(0.3), n).unwrap().gap).collect();
        assert!(gaps.windows(2).all(|w| w[0] == w[1]));
        assert!(hardness_gap(0.2, 0.2, fid(0.5), 3).is_err());
        assert!(hardness_gap(0.1, 0.2, fid(0.5), 3).is_err());
        assert!(hardness_gap(1.5, 0.2, fid(0.5), 3).is_err());
    }

    proptest! {
        #[test]
        fn gap_is_exact(a in 0.0f64..=1.0, b in 0.0f64..=1.0, f in 0.0f64..=1.0, n in 1usize..30) {
            prop_assume!(b < a);
            let g = hardness_gap(a, b, fid(f), n).unwrap();
            prop_assert_eq!(g.gap, f * (a - b));
            prop_assert!((g.alpha - g.beta - g.gap).abs() < 1e-15);
        }

        #[test]
        fn ratio_monotone_in_r_and_w(r in 1u32..20, w in 1u32..40, m in 1u32..10,
                                     f in 0.01f64..=1.0, eps in 0.0f64..0.99) {
            let base = sbp_thresholds(r, w, m, fid(f), eps).unwrap().ratio;
            prop_assert!(sbp_thresholds(r + 1, w, m, fid(f), eps).unwrap().ratio >= base);
            prop_assert!(sbp_thresholds(r, w + 1, m, fid(f), eps).unwrap().ratio >= base);
        }
    }
}
