//! Dense state-vector oracle.
//!
//! Amplitudes are indexed by the base-`d` digits `(q_1, …, q_n)` with `q_1`
//! most significant. Reduced density matrices are formed as `M M^†` where `M`
//! is the amplitude vector reshaped across the bipartition, and spectra come
//! from the dense Hermitian eigensolver in `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Bipartition, MultiHypergraph};
use crate::modarith::root_of_unity;

pub const DEFAULT_AMPLITUDE_CAP: usize = 1 << 20;
pub const DEFAULT_MATRIX_CAP: usize = 4096;
pub const AMPLITUDE_CAP_ENV: &str = "QUHYPER_AMPLITUDE_CAP";

pub const AMPLITUDE_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-12;
/// Squared Schmidt coefficients at or below this count as zero.
pub const RANK_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Bound on `d^n`.
    pub amplitudes: usize,
    /// Bound on the dimension of a reduced density matrix.
    pub matrix_dim: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            amplitudes: DEFAULT_AMPLITUDE_CAP,
            matrix_dim: DEFAULT_MATRIX_CAP,
        }
    }
}

impl Caps {
    /// Defaults, with the amplitude cap overridden by `QUHYPER_AMPLITUDE_CAP`.
    pub fn from_env() -> Result<Self> {
        let mut caps = Self::default();
        if let Ok(raw) = std::env::var(AMPLITUDE_CAP_ENV) {
            caps.amplitudes = raw.trim().parse().map_err(|_| {
                Error::InvalidInput(format!("{AMPLITUDE_CAP_ENV}={raw:?} is not an integer"))
            })?;
        }
        Ok(caps)
    }

    fn check_amplitudes(&self, d: u64, n: usize) -> Result<usize> {
        let needed = (d as u128).saturating_pow(n as u32);
        if needed > self.amplitudes as u128 {
            return Err(Error::CapExceeded {
                what: "state vector",
                needed,
                cap: self.amplitudes as u128,
            });
        }
        Ok(needed as usize)
    }

    fn check_matrix(&self, d: u64, qudits: usize) -> Result<usize> {
        let needed = (d as u128).saturating_pow(qudits as u32);
        if needed > self.matrix_dim as u128 {
            return Err(Error::CapExceeded {
                what: "reduced density matrix",
                needed,
                cap: self.matrix_dim as u128,
            });
        }
        Ok(needed as usize)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    d: u64,
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes; they must have length `d^n` and unit norm.
    pub fn from_amplitudes(d: u64, n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if d < 2 || n < 1 {
            return invalid(format!("bad register d={d}, n={n}"));
        }
        if (amps.len() as u128) != (d as u128).pow(n as u32) {
            return invalid(format!(
                "expected {}^{} amplitudes, got {}",
                d,
                n,
                amps.len()
            ));
        }
        let state = Self { d, n, amps };
        if (state.norm() - 1.0).abs() > NORM_TOL {
            return invalid(format!("state has norm {}", state.norm()));
        }
        Ok(state)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Weight of vertex `v` (1-based) in the flat index.
    fn stride(&self, v: usize) -> usize {
        (self.d as usize).pow((self.n - v) as u32)
    }

    fn digit(&self, index: usize, v: usize) -> u64 {
        ((index / self.stride(v)) % self.d as usize) as u64
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// True when the states agree up to a global phase, amplitude by amplitude.
    pub fn approx_eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        if self.d != other.d || self.n != other.n {
            return false;
        }
        let overlap = self.inner(other);
        if overlap.norm() < 1e-12 {
            return false;
        }
        let phase = overlap / overlap.norm();
        self.amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a * phase - b).norm() <= tol)
    }

    /// Applies `(X_k^†)^times`, i.e. shifts digit `k` down by `times`.
    pub fn apply_x_dagger(&self, k: usize, times: u64) -> Result<Self> {
        self.check_vertex(k)?;
        let d = self.d as usize;
        let stride = self.stride(k);
        let shift = (times % self.d) as usize;
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            let q = (i / stride) % d;
            let src = i - q * stride + ((q + shift) % d) * stride;
            *slot = self.amps[src];
        }
        Ok(Self { amps: out, ..*self })
    }

    /// Applies `Z_k^power`.
    pub fn apply_local_phase(&self, k: usize, power: u64) -> Result<Self> {
        self.check_vertex(k)?;
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| a * root_of_unity(self.d, power % self.d * self.digit(i, k)))
            .collect();
        Ok(Self { amps, ..*self })
    }

    /// Applies `Z_e^times` for the edge with vertices `edge`.
    pub fn apply_controlled_phase(&self, edge: &[usize], times: u64) -> Result<Self> {
        for &v in edge {
            self.check_vertex(v)?;
        }
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let prod = edge
                    .iter()
                    .fold(1, |acc, &v| acc * self.digit(i, v) % self.d);
                a * root_of_unity(self.d, times % self.d * prod)
            })
            .collect();
        Ok(Self { amps, ..*self })
    }

    /// Projects qudit `k` onto `|q⟩` and drops it. Returns the outcome
    /// probability and the normalized state of the other `n-1` qudits, or
    /// `None` for the state when the probability vanishes.
    pub fn condition(&self, k: usize, q: u64) -> Result<(f64, Option<StateVector>)> {
        self.check_vertex(k)?;
        if self.n < 2 {
            return invalid("cannot condition away the only qudit");
        }
        if q >= self.d {
            return invalid(format!("outcome {q} is not in Z_{}", self.d));
        }
        let kept: Vec<Complex64> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.digit(*i, k) == q)
            .map(|(_, a)| *a)
            .collect();
        let p: f64 = kept.iter().map(|a| a.norm_sqr()).sum();
        if p < 1e-14 {
            return Ok((p, None));
        }
        let scale = 1.0 / p.sqrt();
        let amps = kept.into_iter().map(|a| a * scale).collect();
        Ok((
            p,
            Some(Self {
                d: self.d,
                n: self.n - 1,
                amps,
            }),
        ))
    }

    fn check_vertex(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n {
            return Err(Error::UnknownVertex {
                vertex: k,
                n: self.n,
            });
        }
        Ok(())
    }
}

/// `|H⟩ = ∏_e Z_e^{m_e} |+⟩^{⊗n}`: amplitude `d^{-n/2} ω^{Σ_e m_e ∏_{i∈e} q_i}`.
pub fn build_state(h: &MultiHypergraph, caps: &Caps) -> Result<StateVector> {
    basis_state(h, &vec![0; h.n()], caps)
}

/// `Z_1^{-k_1} ⋯ Z_n^{-k_n} |H⟩`, a member of the hypergraph-state basis.
pub fn basis_state(h: &MultiHypergraph, ks: &[u64], caps: &Caps) -> Result<StateVector> {
    let (d, n) = (h.d(), h.n());
    if ks.len() != n {
        return invalid(format!("basis label needs {n} entries, got {}", ks.len()));
    }
    let len = caps.check_amplitudes(d, n)?;
    let edges: Vec<(Vec<usize>, u64)> =
        h.edges().map(|(e, m)| (e.vertices().to_vec(), m)).collect();
    let roots: Vec<Complex64> = (0..d).map(|k| root_of_unity(d, k)).collect();
    let scale = (d as f64).powf(-(n as f64) / 2.0);
    let amps = (0..len)
        .into_par_iter()
        .map(|index| {
            let mut digits = vec![0u64; n + 1];
            let mut rest = index;
            for v in (1..=n).rev() {
                digits[v] = rest as u64 % d;
                rest /= d as usize;
            }
            let mut exponent = 0u64;
            for (vs, m) in &edges {
                let prod = vs.iter().fold(1u64, |acc, &v| acc * digits[v] % d);
                exponent = (exponent + m * prod) % d;
            }
            for (v, &k) in ks.iter().enumerate() {
                // ω^{-k q}
                exponent = (exponent + (d - k % d) % d * digits[v + 1]) % d;
            }
            roots[exponent as usize] * scale
        })
        .collect();
    Ok(StateVector { d, n, amps })
}

/// Reduced state of a subset of qudits.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    d: u64,
    qudits: Vec<usize>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn qudits(&self) -> &[usize] {
        &self.qudits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Full eigendecomposition `(λ, v)`, descending in `λ`.
    pub fn eigenpairs(&self) -> Vec<(f64, nalgebra::DVector<Complex64>)> {
        let eig = self.matrix.clone().symmetric_eigen();
        let mut pairs: Vec<_> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, eig.eigenvectors.column(i).into_owned()))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs
    }
}

/// Amplitudes reshaped into a `d^{|rows|} × d^{n-|rows|}` matrix.
fn reshape(psi: &StateVector, rows: &[usize]) -> DMatrix<Complex64> {
    let n = psi.n;
    let cols: Vec<usize> = (1..=n).filter(|v| !rows.contains(v)).collect();
    let d = psi.d as usize;
    let nrows = d.pow(rows.len() as u32);
    let ncols = d.pow(cols.len() as u32);
    let mut m = DMatrix::<Complex64>::zeros(nrows, ncols);
    for (index, amp) in psi.amps.iter().enumerate() {
        let r = rows
            .iter()
            .fold(0, |acc, &v| acc * d + psi.digit(index, v) as usize);
        let c = cols
            .iter()
            .fold(0, |acc, &v| acc * d + psi.digit(index, v) as usize);
        m[(r, c)] = *amp;
    }
    m
}

/// `Tr_{complement of A} |ψ⟩⟨ψ|`.
pub fn reduced_density(psi: &StateVector, subset: &[usize], caps: &Caps) -> Result<DensityMatrix> {
    let mut qudits = subset.to_vec();
    qudits.sort_unstable();
    qudits.dedup();
    if let Some(&v) = qudits.iter().find(|&&v| v == 0 || v > psi.n) {
        return Err(Error::UnknownVertex {
            vertex: v,
            n: psi.n,
        });
    }
    if qudits.is_empty() || qudits.len() == psi.n {
        return invalid("reduced state needs a non-empty proper subset of qudits");
    }
    caps.check_matrix(psi.d, qudits.len())?;
    let m = reshape(psi, &qudits);
    let matrix = &m * m.adjoint();
    Ok(DensityMatrix {
        d: psi.d,
        qudits,
        matrix,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    /// Descending, non-negative.
    pub coefficients: Vec<f64>,
    pub rank_threshold: f64,
}

impl SchmidtSpectrum {
    /// Number of coefficients whose square exceeds the threshold.
    pub fn rank(&self) -> usize {
        self.coefficients
            .iter()
            .filter(|s| *s * *s > self.rank_threshold)
            .count()
    }

    pub fn largest(&self) -> f64 {
        self.coefficients[0]
    }
}

fn check_bipartition(psi: &StateVector, b: &Bipartition) -> Result<()> {
    if b.n() != psi.n {
        return invalid(format!(
            "bipartition covers {} qudits, state has {}",
            b.n(),
            psi.n
        ));
    }
    Ok(())
}

/// Schmidt coefficients across `b`, from the reduced state of the smaller side.
pub fn schmidt_spectrum(
    psi: &StateVector,
    b: &Bipartition,
    caps: &Caps,
) -> Result<SchmidtSpectrum> {
    check_bipartition(psi, b)?;
    let rho = reduced_density(psi, b.smaller_side(), caps)?;
    let coefficients = rho
        .eigenvalues()
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    Ok(SchmidtSpectrum {
        coefficients,
        rank_threshold: RANK_THRESHOLD,
    })
}

/// `E^{AB} = 1 - λ_max(ρ_A)`.
pub fn bipartite_entanglement(psi: &StateVector, b: &Bipartition, caps: &Caps) -> Result<f64> {
    check_bipartition(psi, b)?;
    let rho = reduced_density(psi, b.smaller_side(), caps)?;
    Ok(1.0 - rho.max_eigenvalue())
}

/// Every bipartition of `1..=n` with vertex 1 on side A, in lexicographic
/// order of side A.
pub fn all_bipartitions(n: usize) -> Vec<Bipartition> {
    if n < 2 {
        return Vec::new();
    }
    let mut sides: Vec<Vec<usize>> = (0u64..(1 << (n - 1)) - 1)
        .map(|mask| {
            let mut a = vec![1];
            a.extend((2..=n).filter(|v| mask >> (v - 2) & 1 == 1));
            a
        })
        .collect();
    sides.sort();
    sides
        .into_iter()
        .map(|a| Bipartition::new(n, a).expect("vertex 1 alone never covers all of 1..=n"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Numeric,
    ClosedForm,
}

/// Maximum biseparable overlap `α` and the entanglement `E = 1 - α`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementResult {
    alpha: f64,
    exact_alpha: Option<BigRational>,
    pub witness: Option<Bipartition>,
    pub method: Method,
}

impl EntanglementResult {
    pub fn numeric(alpha: f64, witness: Option<Bipartition>) -> Self {
        Self {
            alpha,
            exact_alpha: None,
            witness,
            method: Method::Numeric,
        }
    }

    pub fn closed_form(alpha: BigRational) -> Self {
        Self {
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
            exact_alpha: Some(alpha),
            witness: None,
            method: Method::ClosedForm,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn entanglement(&self) -> f64 {
        1.0 - self.alpha
    }

    pub fn exact_alpha(&self) -> Option<&BigRational> {
        self.exact_alpha.as_ref()
    }

    pub fn exact_entanglement(&self) -> Option<BigRational> {
        self.exact_alpha
            .as_ref()
            .map(|a| BigRational::from_integer(1.into()) - a)
    }
}

/// `E = min_{AB} E^{AB}` over all `2^{n-1} - 1` bipartitions. Ties within
/// `1e-12` go to the lexicographically first bipartition.
pub fn multipartite_entanglement(psi: &StateVector, caps: &Caps) -> Result<EntanglementResult> {
    if psi.n < 2 {
        return invalid("multipartite entanglement needs at least two qudits");
    }
    let parts = all_bipartitions(psi.n);
    let lambdas: Vec<f64> = parts
        .par_iter()
        .map(|b| reduced_density(psi, b.smaller_side(), caps).map(|r| r.max_eigenvalue()))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, &l) in lambdas.iter().enumerate() {
        if l > lambdas[best] + 1e-12 {
            best = i;
        }
    }
    Ok(EntanglementResult::numeric(
        lambdas[best],
        Some(parts[best].clone()),
    ))
}

/// Maximum absolute row sum.
pub fn infinity_norm(rho: &DensityMatrix) -> f64 {
    rho.matrix
        .row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Edge;

    fn caps() -> Caps {
        Caps::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn empty_hypergraph_is_uniform() {
        let h = MultiHypergraph::new(3, 3).unwrap();
        let psi = build_state(&h, &caps()).unwrap();
        let a = 3f64.powf(-1.5);
        assert!(psi
            .amplitudes()
            .iter()
            .all(|z| (z - c(a, 0.0)).norm() < 1e-14));
    }

    #[test]
    fn qubit_cz() {
        let h = MultiHypergraph::elementary(2, 2, 1).unwrap();
        let psi = build_state(&h, &caps()).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (z, w) in psi.amplitudes().iter().zip(want) {
            assert!((z - c(w, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn qutrit_elementary_amplitudes() {
        let h = MultiHypergraph::elementary(3, 2, 1).unwrap();
        let psi = build_state(&h, &caps()).unwrap();
        for q1 in 0..3u64 {
            for q2 in 0..3u64 {
                let want = root_of_unity(3, q1 * q2) / 3.0;
                assert!((psi.amplitudes()[(q1 * 3 + q2) as usize] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let h = MultiHypergraph::new(4, 6).unwrap();
        let tight = Caps {
            amplitudes: 1000,
            ..caps()
        };
        assert!(matches!(
            build_state(&h, &tight),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn basis_state_examples() {
        let h = MultiHypergraph::new(2, 1).unwrap();
        let minus = basis_state(&h, &[1], &caps()).unwrap();
        let s = 0.5f64.sqrt();
        assert!((minus.amplitudes()[0] - c(s, 0.0)).norm() < 1e-14);
        assert!((minus.amplitudes()[1] - c(-s, 0.0)).norm() < 1e-14);

        let g = MultiHypergraph::from_edges(3, 3, [(vec![1, 2, 3], 2), (vec![2], 1)]).unwrap();
        assert_eq!(
            basis_state(&g, &[0, 0, 0], &caps()).unwrap(),
            build_state(&g, &caps()).unwrap()
        );
    }

    #[test]
    fn basis_states_are_orthonormal() {
        let h =
            MultiHypergraph::from_edges(4, 4, [(vec![1, 2, 3], 3), (vec![2, 4], 1), (vec![1], 2)])
                .unwrap();
        let labels: Vec<Vec<u64>> = (0..256u64)
            .map(|i| (0..4).map(|j| (i >> (2 * j)) & 3).collect())
            .collect();
        let states: Vec<StateVector> = labels
            .iter()
            .map(|k| basis_state(&h, k, &caps()).unwrap())
            .collect();
        for i in 0..states.len() {
            assert!((states[i].norm() - 1.0).abs() < 1e-12);
            for j in (i + 1)..states.len() {
                assert!(states[i].inner(&states[j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn reduced_density_examples() {
        // product state: rank one
        let prod = build_state(&MultiHypergraph::new(3, 3).unwrap(), &caps()).unwrap();
        let rho = reduced_density(&prod, &[1, 3], &caps()).unwrap();
        assert!((rho.max_eigenvalue() - 1.0).abs() < 1e-9);
        assert!(rho.eigenvalues()[1].abs() < 1e-9);

        let cz = build_state(&MultiHypergraph::elementary(2, 2, 1).unwrap(), &caps()).unwrap();
        let rho = reduced_density(&cz, &[1], &caps()).unwrap();
        let ev = rho.eigenvalues();
        assert!((ev[0] - 0.5).abs() < 1e-9 && (ev[1] - 0.5).abs() < 1e-9);

        let g3 = build_state(&MultiHypergraph::elementary(2, 3, 1).unwrap(), &caps()).unwrap();
        let rho = reduced_density(&g3, &[1, 2], &caps()).unwrap();
        assert!((rho.max_eigenvalue() - 0.75).abs() < 1e-9);

        assert!(reduced_density(&g3, &[], &caps()).is_err());
        assert!(reduced_density(&g3, &[1, 2, 3], &caps()).is_err());
        assert!(reduced_density(&g3, &[4], &caps()).is_err());
    }

    #[test]
    fn density_matrix_invariants_and_eigen_residual() {
        let h =
            MultiHypergraph::from_edges(3, 4, [(vec![1, 2, 3], 1), (vec![3, 4], 2), (vec![2], 1)])
                .unwrap();
        let psi = build_state(&h, &caps()).unwrap();
        for subset in [vec![1], vec![1, 2], vec![2, 4], vec![1, 3, 4]] {
            let rho = reduced_density(&psi, &subset, &caps()).unwrap();
            assert!(rho.hermiticity_defect() < 1e-10);
            assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-10);
            for (l, v) in rho.eigenpairs() {
                assert!(l > -1e-10);
                let residual = (rho.matrix() * &v - &v * c(l, 0.0)).norm();
                assert!(residual < 1e-8);
            }
        }
    }

    #[test]
    fn schmidt_rank_of_elementary_states() {
        let psi = build_state(&MultiHypergraph::elementary(4, 2, 2).unwrap(), &caps()).unwrap();
        let b = Bipartition::new(2, [1]).unwrap();
        assert_eq!(schmidt_spectrum(&psi, &b, &caps()).unwrap().rank(), 2);

        let prod = build_state(&MultiHypergraph::new(3, 2).unwrap(), &caps()).unwrap();
        let s = schmidt_spectrum(&prod, &b, &caps()).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.largest() - 1.0).abs() < 1e-9);

        for d in 2..=6u64 {
            for m in 1..d {
                let psi =
                    build_state(&MultiHypergraph::elementary(d, 3, m).unwrap(), &caps()).unwrap();
                let b = Bipartition::new(3, [1, 2]).unwrap();
                let s = schmidt_spectrum(&psi, &b, &caps()).unwrap();
                let sq: f64 = s.coefficients.iter().map(|x| x * x).sum();
                assert!((sq - 1.0).abs() < 1e-9);
                assert_eq!(s.rank() as u64, d / crate::modarith::gcd(m, d));
            }
        }
    }

    #[test]
    fn bipartite_examples() {
        let b2 = Bipartition::new(2, [1]).unwrap();
        let prod = build_state(&MultiHypergraph::new(2, 2).unwrap(), &caps()).unwrap();
        assert!(bipartite_entanglement(&prod, &b2, &caps()).unwrap().abs() < 1e-9);
        let cz = build_state(&MultiHypergraph::elementary(2, 2, 1).unwrap(), &caps()).unwrap();
        assert!((bipartite_entanglement(&cz, &b2, &caps()).unwrap() - 0.5).abs() < 1e-9);
        let g3 = build_state(&MultiHypergraph::elementary(2, 3, 1).unwrap(), &caps()).unwrap();
        let b = Bipartition::new(3, [1, 2]).unwrap();
        let e = bipartite_entanglement(&g3, &b, &caps()).unwrap();
        assert!((e - 0.25).abs() < 1e-9);
        let s = schmidt_spectrum(&g3, &b, &caps()).unwrap();
        assert!((e - (1.0 - s.largest().powi(2))).abs() < 1e-9);
    }

    #[test]
    fn bipartition_enumeration() {
        let parts = all_bipartitions(4);
        assert_eq!(parts.len(), 7);
        assert!(parts.iter().all(|b| b.in_a(1)));
        assert_eq!(parts[0].side_a(), &[1]);
        assert!(parts.windows(2).all(|w| w[0].side_a() < w[1].side_a()));
    }

    #[test]
    fn multipartite_examples() {
        let prod = build_state(&MultiHypergraph::new(3, 3).unwrap(), &caps()).unwrap();
        assert!(
            multipartite_entanglement(&prod, &caps())
                .unwrap()
                .entanglement()
                .abs()
                < 1e-9
        );

        let g5 = build_state(&MultiHypergraph::elementary(10, 4, 5).unwrap(), &caps()).unwrap();
        let r = multipartite_entanglement(&g5, &caps()).unwrap();
        assert!((r.entanglement() - 0.125).abs() < 1e-9);
        assert_eq!(r.method, Method::Numeric);
        assert!(r.witness.is_some());

        let g2 = build_state(&MultiHypergraph::elementary(10, 4, 2).unwrap(), &caps()).unwrap();
        let r = multipartite_entanglement(&g2, &caps()).unwrap();
        assert!((r.entanglement() - 0.512).abs() < 1e-9);

        let one = build_state(&MultiHypergraph::new(2, 1).unwrap(), &caps()).unwrap();
        assert!(multipartite_entanglement(&one, &caps()).is_err());
    }

    #[test]
    fn infinity_norm_examples() {
        let mixed = build_state(&MultiHypergraph::elementary(3, 2, 1).unwrap(), &caps()).unwrap();
        let rho = reduced_density(&mixed, &[1], &caps()).unwrap();
        assert!((infinity_norm(&rho) - 1.0 / 3.0).abs() < 1e-12);

        let plus = build_state(&MultiHypergraph::new(2, 2).unwrap(), &caps()).unwrap();
        let rho = reduced_density(&plus, &[1], &caps()).unwrap();
        assert!((infinity_norm(&rho) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infinity_norm_equals_top_schmidt_square_for_elementary_states() {
        for (d, n) in [(2u64, 5usize), (4, 4), (6, 3), (8, 3)] {
            for m in 1..d {
                let psi =
                    build_state(&MultiHypergraph::elementary(d, n, m).unwrap(), &caps()).unwrap();
                let top = schmidt_spectrum(&psi, &Bipartition::new(n, 1..n).unwrap(), &caps())
                    .unwrap()
                    .largest()
                    .powi(2);
                for k in 2..n {
                    let rho =
                        reduced_density(&psi, &(1..=n - k).collect::<Vec<_>>(), &caps()).unwrap();
                    assert!(
                        (infinity_norm(&rho) - top).abs() < 1e-9,
                        "d={d} n={n} m={m} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn eigenvalues_below_infinity_norm() {
        let h = MultiHypergraph::from_edges(
            3,
            5,
            [(vec![1, 2, 3], 1), (vec![3, 4, 5], 2), (vec![1, 5], 1)],
        )
        .unwrap();
        let psi = build_state(&h, &caps()).unwrap();
        for b in all_bipartitions(5) {
            let rho = reduced_density(&psi, b.side_a(), &caps()).unwrap();
            assert!(rho.max_eigenvalue() <= infinity_norm(&rho) + 1e-9);
        }
    }

    #[test]
    fn x_dagger_numeric_matches_rewrite() {
        let h = MultiHypergraph::from_edges(
            4,
            4,
            [(vec![1, 2, 3, 4], 2), (vec![2, 3, 4], 3), (vec![1], 1)],
        )
        .unwrap();
        for q in 0..4 {
            let rewritten = build_state(&h.apply_x_dagger(1, q).unwrap(), &caps()).unwrap();
            let numeric = build_state(&h, &caps())
                .unwrap()
                .apply_x_dagger(1, q)
                .unwrap();
            assert!(
                numeric.approx_eq_up_to_phase(&rewritten, AMPLITUDE_TOL),
                "q={q}"
            );
        }
    }

    #[test]
    fn measurement_numeric_matches_rewrite() {
        let h =
            MultiHypergraph::from_edges(4, 5, [(vec![2, 3, 4, 5], 1), (vec![3, 4, 5], 2)]).unwrap();
        let psi = build_state(&h, &caps()).unwrap();
        let (p, post) = psi.condition(2, 1).unwrap();
        assert!((p - 0.25).abs() < 1e-12);
        let (_, rewritten) = h.measure_z(2, 1).unwrap();
        let expected = MultiHypergraph::from_edges(4, 4, [(vec![2, 3, 4], 3)]).unwrap();
        assert_eq!(rewritten, expected);
        let want = build_state(&expected, &caps()).unwrap();
        assert!(post.unwrap().approx_eq_up_to_phase(&want, AMPLITUDE_TOL));
    }

    #[test]
    fn local_phase_leaves_entanglement_unchanged() {
        let h =
            MultiHypergraph::from_edges(3, 4, [(vec![1, 2, 3], 1), (vec![2, 3, 4], 2)]).unwrap();
        let psi = build_state(&h, &caps()).unwrap();
        let base = multipartite_entanglement(&psi, &caps())
            .unwrap()
            .entanglement();
        for k in 1..=4 {
            for p in [1, 2] {
                let phased = psi.apply_local_phase(k, p).unwrap();
                let e = multipartite_entanglement(&phased, &caps())
                    .unwrap()
                    .entanglement();
                assert!((e - base).abs() < 1e-9);
            }
        }
        let _ = Edge::new(vec![1]).unwrap();
    }
}
