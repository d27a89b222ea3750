use nalgebra::Schur;
use num_complex::Complex64;

use super::SystemParams;
use crate::error::{Error, Result};
use crate::linalg::{c, left_multiplication, right_multiplication, unvectorize, vectorize, CMatrix, I};
use crate::spin_algebra::SpinAlgebra;

/// Dense Lindblad generator acting on column-stacked `ρ`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    dim: usize,
    matrix: CMatrix,
}

impl Liouvillian {
    /// `−i[H,·] + Σ_k r_k D[O_k]` for `(r_k, O_k)` in `jumps`.
    pub fn lindblad(hamiltonian: &CMatrix, jumps: &[(f64, CMatrix)]) -> Self {
        let dim = hamiltonian.nrows();
        let mut matrix = (left_multiplication(hamiltonian) - right_multiplication(hamiltonian)) * (-I);
        for (rate, op) in jumps {
            if *rate == 0.0 {
                continue;
            }
            let op_dag = op.adjoint();
            let n = &op_dag * op;
            // vec(OρO†) = (conj(O) ⊗ O) vec(ρ)
            let sandwich = op.conjugate().kronecker(op);
            let dissipator = sandwich - (left_multiplication(&n) + right_multiplication(&n)) * c(0.5);
            matrix += dissipator * c(*rate);
        }
        Liouvillian { dim, matrix }
    }

    /// Wraps a raw `d² × d²` generator.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        let dim = (n as f64).sqrt().round() as usize;
        if !matrix.is_square() || dim * dim != n || dim == 0 {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: n });
        }
        Ok(Liouvillian { dim, matrix })
    }

    /// Hilbert-space dimension `d` (the generator is `d² × d²`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rho.nrows() });
        }
        Ok(unvectorize(&(&self.matrix * vectorize(rho)), self.dim))
    }

    /// Largest entry of `vec(I)† L`; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        (0..d * d)
            .map(|col| (0..d).map(|i| self.matrix[(i * d + i, col)]).sum::<Complex64>().norm())
            .fold(0.0, f64::max)
    }

    /// All eigenvalues, from the complex Schur form.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let schur = Schur::try_new(self.matrix.clone(), f64::EPSILON, 100_000)
            .ok_or_else(|| Error::Solver("Schur decomposition did not converge".into()))?;
        let (_, t) = schur.unpack();
        Ok(t.diagonal().iter().copied().collect())
    }

    /// `max Re λ`.
    pub fn spectral_abscissa(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
    }

    /// `exp(L t)` by Padé scaling and squaring. Used as the reference
    /// propagator when checking the integrator.
    pub fn propagator(&self, t: f64) -> CMatrix {
        (&self.matrix * c(t)).exp()
    }
}

/// Generator of the rotating-frame master equation for `p`.
pub fn build_liouvillian(p: &SystemParams) -> Result<Liouvillian> {
    p.validate()?;
    let alg = SpinAlgebra::new(p.spin);
    let h = alg.sz() * c(p.delta) + alg.sy() * c(p.epsilon);
    let gain = alg.sp() * alg.sz();
    let damping = alg.sm() * alg.sz();
    Ok(Liouvillian::lindblad(&h, &[(p.gamma_g / 2.0, gain), (p.gamma_d / 2.0, damping)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DensityMatrix;
    use crate::linalg::{anticommutator, commutator, max_abs, trace};
    use crate::spin_algebra::Spin;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(twice: u32, delta: f64, eps: f64, gg: f64, gd: f64) -> SystemParams {
        SystemParams::new(Spin::from_twice(twice).unwrap(), delta, eps, gg, gd).unwrap()
    }

    /// Direct matrix-form right-hand side, independent of the Kronecker route.
    fn rhs_direct(p: &SystemParams, rho: &CMatrix) -> CMatrix {
        let alg = SpinAlgebra::new(p.spin);
        let h = alg.sz() * c(p.delta) + alg.sy() * c(p.epsilon);
        let mut out = commutator(&h, rho) * (-I);
        for (rate, o) in [(p.gamma_g / 2.0, alg.sp() * alg.sz()), (p.gamma_d / 2.0, alg.sm() * alg.sz())] {
            let od = o.adjoint();
            out += (&o * rho * &od - anticommutator(&(&od * &o), rho) * c(0.5)) * c(rate);
        }
        out
    }

    fn random_params(rng: &mut impl Rng) -> SystemParams {
        params(
            rng.random_range(1..=5),
            rng.random_range(-2.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(0.01..3.0),
            rng.random_range(0.01..3.0),
        )
    }

    #[test]
    fn matches_direct_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let p = random_params(&mut rng);
            let l = build_liouvillian(&p).unwrap();
            let rho = DensityMatrix::random(p.spin.dim(), &mut rng);
            let diff = l.apply(rho.matrix()).unwrap() - rhs_direct(&p, rho.matrix());
            assert!(max_abs(&diff) < 1e-13);
        }
    }

    #[test]
    fn equatorial_state_is_dark_without_drive() {
        let p = params(2, 0.0, 0.0, 0.3, 1.0);
        let alg = SpinAlgebra::new(p.spin);
        let rho = DensityMatrix::dicke(&alg, 0.0).unwrap();
        let out = build_liouvillian(&p).unwrap().apply(rho.matrix()).unwrap();
        assert_eq!(max_abs(&out), 0.0);
    }

    #[test]
    fn trace_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let p = params(2, 0.4, 0.2, 0.1, 1.0);
        let l = build_liouvillian(&p).unwrap();
        assert!(l.trace_defect() < 1e-14);
        for _ in 0..50 {
            let rho = DensityMatrix::random(3, &mut rng);
            assert!(trace(&l.apply(rho.matrix()).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn spectrum_in_closed_left_half_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let p = random_params(&mut rng);
            let l = build_liouvillian(&p).unwrap();
            assert!(l.spectral_abscissa().unwrap() <= 1e-10);
            assert!(l.trace_defect() < 1e-13);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = SystemParams { spin: Spin::ONE, delta: 0.0, epsilon: -1.0, gamma_g: 0.1, gamma_d: 1.0 };
        assert!(matches!(build_liouvillian(&bad), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn from_matrix_checks_shape() {
        assert!(Liouvillian::from_matrix(CMatrix::zeros(9, 9)).is_ok());
        assert!(Liouvillian::from_matrix(CMatrix::zeros(8, 8)).is_err());
    }
}
