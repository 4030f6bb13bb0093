//! Named tensor factorizations and the partial trace.

use crate::error::{Error, Result};
use crate::numerics::matrix::ComplexMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    factors: Vec<(String, usize)>,
}

impl HilbertSpace {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(n, d)| (n.into(), d)).collect();
        if factors.is_empty() {
            return Err(Error::InvalidParameter(
                "Hilbert space needs at least one factor".into(),
            ));
        }
        for (k, (name, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::InvalidParameter(format!(
                    "factor `{name}` has dimension 0"
                )));
            }
            if factors[..k].iter().any(|(other, _)| other == name) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate factor name `{name}`"
                )));
            }
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::UnknownFactor(name.to_string()))
    }

    pub fn factor_dim(&self, name: &str) -> Result<usize> {
        Ok(self.factors[self.position(name)?].1)
    }

    /// Product dimension of the named factors.
    pub fn subspace_dim(&self, names: &[&str]) -> Result<usize> {
        names.iter().map(|n| self.factor_dim(n)).product()
    }
}

/// Kronecker product `A ⊗ B` (left-factor-major).
pub fn tensor<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.kron(b)
}

/// Traces out every factor not listed in `keep`. The kept factors stay in the
/// order they have in `space`.
pub fn partial_trace<T: Scalar>(
    a: &ComplexMatrix<T>,
    space: &HilbertSpace,
    keep: &[&str],
) -> Result<ComplexMatrix<T>> {
    a.check_dim(space.dim())?;
    let mut kept = vec![false; space.factors.len()];
    for name in keep {
        kept[space.position(name)?] = true;
    }
    let dims: Vec<usize> = space.factors.iter().map(|(_, d)| *d).collect();
    let keep_dims: Vec<usize> = dims
        .iter()
        .zip(&kept)
        .filter_map(|(d, k)| k.then_some(*d))
        .collect();
    let drop_dims: Vec<usize> = dims
        .iter()
        .zip(&kept)
        .filter_map(|(d, k)| (!k).then_some(*d))
        .collect();
    let dk: usize = keep_dims.iter().product();
    let dd: usize = drop_dims.iter().product();

    // full index from (kept multi-index, dropped multi-index)
    let compose = |ik: usize, id: usize| -> usize {
        let mut rk = ik;
        let mut rd = id;
        let mut digits = vec![0usize; dims.len()];
        for f in (0..dims.len()).rev() {
            if kept[f] {
                digits[f] = rk % dims[f];
                rk /= dims[f];
            } else {
                digits[f] = rd % dims[f];
                rd /= dims[f];
            }
        }
        digits.iter().zip(&dims).fold(0, |acc, (d, n)| acc * n + d)
    };
    let index: Vec<Vec<usize>> = (0..dk)
        .map(|ik| (0..dd).map(|id| compose(ik, id)).collect())
        .collect();

    Ok(ComplexMatrix::from_fn(dk, |i, j| {
        (0..dd).map(|e| a[(index[i][e], index[j][e])]).sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::{pauli_z, ComplexMatrix};
    use crate::numerics::random::random_density;
    use crate::scalar::C;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn two(a: &str, da: usize, b: &str, db: usize) -> HilbertSpace {
        HilbertSpace::new([(a, da), (b, db)]).unwrap()
    }

    #[test]
    fn rejects_duplicates_and_zero_dims() {
        assert!(HilbertSpace::new([("a", 2), ("a", 3)]).is_err());
        assert!(HilbertSpace::new([("a", 0)]).is_err());
    }

    #[test]
    fn product_state_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rm: M = random_density(3, &mut rng);
        let rs: M = random_density(2, &mut rng).scale_real(0.7);
        let space = two("M", 3, "S", 2);
        let red = partial_trace(&tensor(&rm, &rs), &space, &["M"]).unwrap();
        assert!(red.max_abs_diff(&rm.scale_real(0.7)) < 1e-15);
        let red = partial_trace(&tensor(&rm, &rs), &space, &["S"]).unwrap();
        assert!(red.max_abs_diff(&rs) < 1e-15);
    }

    #[test]
    fn bell_state_marginal_is_maximally_mixed() {
        let s = 0.5f64.sqrt();
        let psi = vec![
            C::new(s, 0.0),
            C::new(0.0, 0.0),
            C::new(0.0, 0.0),
            C::new(s, 0.0),
        ];
        let rho = M::projector(&psi);
        let red = partial_trace(&rho, &two("M", 2, "S", 2), &["S"]).unwrap();
        assert!(red.max_abs_diff(&M::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn zz_traced_against_maximally_mixed_vanishes() {
        let z = pauli_z::<f64>();
        let zz = tensor(&z, &z);
        let weighted = &zz * &tensor(&M::identity(2), &M::identity(2).scale_real(0.5));
        let red = partial_trace(&weighted, &two("A", 2, "B", 2), &["A"]).unwrap();
        assert_eq!(red.max_abs(), 0.0);
    }

    #[test]
    fn trace_preserving_and_positive_on_random_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho: M = random_density(4, &mut rng);
        let red = partial_trace(&rho, &two("M", 2, "S", 2), &["M"]).unwrap();
        assert!((red.trace().re - 1.0).abs() < 1e-12);
        let e = crate::numerics::eig_hermitian(&red, &Default::default()).unwrap();
        assert!(e.eigenvalues[0] >= -1e-14);
    }

    #[test]
    fn middle_factor_trace_keeps_outer_order() {
        let space = HilbertSpace::new([("a", 2), ("b", 3), ("c", 2)]).unwrap();
        let a = M::from_real_diagonal(&[1.0, 2.0]);
        let b = M::identity(3);
        let c = M::from_real_diagonal(&[5.0, 7.0]);
        let full = tensor(&tensor(&a, &b), &c);
        let red = partial_trace(&full, &space, &["a", "c"]).unwrap();
        assert!(red.max_abs_diff(&tensor(&a, &c).scale_real(3.0)) < 1e-14);
    }

    #[test]
    fn errors() {
        let space = two("M", 2, "S", 2);
        assert!(matches!(
            partial_trace(&M::identity(3), &space, &["M"]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            partial_trace(&M::identity(4), &space, &["X"]),
            Err(Error::UnknownFactor(_))
        ));
    }
}
