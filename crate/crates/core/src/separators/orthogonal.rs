//! m-orthogonal separators of an ℓ₂² vector family given by its gram matrix.
//!
//! Nonzero vectors are mapped to unit vectors `ψ(u)` with
//! `⟨ψ(u),ψ(v)⟩ = ⟨ū,v̄⟩ / max(‖ū‖²,‖v̄‖²)`. A sample hashes every `ψ(u)` to
//! the sign word of `r` Gaussian projections, picks one of `n` slots (each
//! present word owns one slot, the rest are empty) and keeps the vertices
//! of that word whose squared norm reaches a uniform threshold in `(0, M]`.
//! Hence `Pr(u ∈ S) = ‖ū‖² / (nM)` exactly.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::SeparatorSample;
use crate::error::{Error, Result};
use crate::relaxation::SdpSolution;

/// Squared norms at or below this are treated as the origin.
pub const ZERO_NORM: f64 = 1e-12;
/// Eigenvalue floor accepted for an input gram matrix.
pub const PSD_FLOOR: f64 = -1e-7;

/// Prepared sampler for one vector family.
#[derive(Clone, Debug)]
pub struct OrthogonalSeparator {
    n: usize,
    /// Vertices with nonzero vectors.
    support: Vec<usize>,
    sq_norms: Vec<f64>,
    /// Row `i` is `ψ` of `support[i]`.
    psi: DMatrix<f64>,
    max_norm: f64,
    projections: usize,
    m: f64,
    beta: f64,
}

/// Number of Gaussian projections so that unit vectors at inner product at
/// most `1 − β/2` share a word with probability at most `1/m`.
pub fn projection_count(m: f64, beta: f64) -> usize {
    if m <= 1.0 {
        return 1;
    }
    let angle = (1.0 - beta / 2.0).clamp(-1.0, 1.0).acos() / std::f64::consts::PI;
    let by_angle = (m.ln() / -(1.0 - angle).ln()).ceil();
    let by_bits = m.log2().ceil();
    (by_angle.max(by_bits) as usize).clamp(1, 128)
}

impl OrthogonalSeparator {
    pub fn new(sol: &SdpSolution, m: f64, beta: f64) -> Result<Self> {
        if !(m >= 1.0) {
            return Err(Error::Input(format!("m={m} must be at least 1")));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Input(format!("beta={beta} must lie in (0,1)")));
        }
        let n = sol.n;
        let scale = (0..n).map(|u| sol.get(u, u).abs()).fold(1.0, f64::max);
        if n > 0 {
            let g = DMatrix::from_fn(n, n, |i, j| 0.5 * (sol.get(i, j) + sol.get(j, i)));
            let min_eig = SymmetricEigen::new(g).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            if min_eig < PSD_FLOOR * scale {
                return Err(Error::Input(format!("gram matrix is not PSD (min eigenvalue {min_eig:.3e})")));
            }
        }
        let support: Vec<usize> = (0..n).filter(|&u| sol.get(u, u) > ZERO_NORM).collect();
        let k = support.len();
        let sq_norms: Vec<f64> = (0..n).map(|u| sol.get(u, u).max(0.0)).collect();
        let max_norm = support.iter().map(|&u| sq_norms[u]).fold(0.0, f64::max);
        let kernel = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                1.0
            } else {
                let (u, v) = (support[i], support[j]);
                let ip = 0.5 * (sol.get(u, v) + sol.get(v, u));
                (ip / sq_norms[u].max(sq_norms[v])).clamp(-1.0, 1.0)
            }
        });
        let psi = if k == 0 {
            DMatrix::zeros(0, 0)
        } else {
            let eig = SymmetricEigen::new(kernel);
            let mut w = eig.eigenvectors.clone();
            for (c, &l) in eig.eigenvalues.iter().enumerate() {
                w.column_mut(c).scale_mut(l.max(0.0).sqrt());
            }
            for mut row in w.row_iter_mut() {
                let nr = row.norm();
                if nr > 0.0 {
                    row /= nr;
                }
            }
            w
        };
        Ok(OrthogonalSeparator {
            n,
            support,
            sq_norms,
            psi,
            max_norm,
            projections: projection_count(m, beta),
            m,
            beta,
        })
    }

    /// Probability scale `α` with `Pr(u ∈ S) = α‖ū‖²`.
    pub fn alpha(&self) -> f64 {
        if self.max_norm > 0.0 {
            1.0 / (self.n as f64 * self.max_norm)
        } else {
            0.0
        }
    }

    pub fn projections(&self) -> usize {
        self.projections
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SeparatorSample {
        let k = self.support.len();
        let mut out = SeparatorSample { set: Vec::new(), alpha: self.alpha(), m: Some(self.m), beta: self.beta };
        if k == 0 {
            // keep the stream aligned with the nonempty case
            let _: f64 = rng.random();
            return out;
        }
        let dim = self.psi.ncols();
        let mut words = vec![0u128; k];
        let mut gauss = vec![0.0; dim];
        for bit in 0..self.projections {
            for gv in gauss.iter_mut() {
                *gv = rng.sample(StandardNormal);
            }
            for (i, w) in words.iter_mut().enumerate() {
                let dot: f64 = self.psi.row(i).iter().zip(&gauss).map(|(a, b)| a * b).sum();
                if dot >= 0.0 {
                    *w |= 1u128 << bit;
                }
            }
        }
        let mut present = words.clone();
        present.sort_unstable();
        present.dedup();
        let slot = rng.random_range(0..self.n);
        let threshold = self.max_norm * (1.0 - rng.random::<f64>());
        if let Some(&word) = present.get(slot) {
            out.set = (0..k)
                .filter(|&i| words[i] == word && self.sq_norms[self.support[i]] >= threshold)
                .map(|i| self.support[i])
                .collect();
        }
        out
    }
}

/// Draws one m-orthogonal separator of the solution's vectors.
pub fn sample_orthogonal_separator<R: Rng + ?Sized>(
    sol: &SdpSolution,
    m: f64,
    beta: f64,
    rng: &mut R,
) -> Result<SeparatorSample> {
    Ok(OrthogonalSeparator::new(sol, m, beta)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn solution(n: usize, gram: Vec<f64>) -> SdpSolution {
        SdpSolution {
            n,
            gram,
            objective: 0.0,
            max_violation: 0.0,
            min_eigenvalue: 0.0,
            converged: true,
            iterations: 0,
        }
    }

    #[test]
    fn identical_unit_vectors_move_together() {
        let sol = solution(3, vec![1.0; 9]);
        let sep = OrthogonalSeparator::new(&sol, 4.0, 0.5).unwrap();
        assert!((sep.alpha() - 1.0 / 3.0).abs() < 1e-15);
        let mut rng = stream(1, "test");
        let mut hits = 0;
        for _ in 0..3000 {
            let s = sep.sample(&mut rng);
            assert!(s.set.is_empty() || s.set == vec![0, 1, 2]);
            hits += !s.set.is_empty() as usize;
        }
        assert!((hits as f64 / 3000.0 - 1.0 / 3.0).abs() < 0.04);
    }

    #[test]
    fn origin_never_sampled() {
        let sol = solution(2, vec![1.0, 0.0, 0.0, 0.0]);
        let sep = OrthogonalSeparator::new(&sol, 2.0, 0.5).unwrap();
        let mut rng = stream(2, "test");
        for _ in 0..2000 {
            assert!(!sep.sample(&mut rng).set.contains(&1));
        }
    }

    #[test]
    fn rejects_non_psd() {
        let sol = solution(2, vec![1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(OrthogonalSeparator::new(&sol, 2.0, 0.5), Err(Error::Input(_))));
    }

    #[test]
    fn projection_count_meets_both_bounds() {
        let r = projection_count(100.0, 0.5);
        let angle = (0.75f64).acos() / std::f64::consts::PI;
        assert!((1.0 - angle).powi(r as i32) <= 0.01);
        assert!(r as f64 >= 100f64.log2());
    }
}
