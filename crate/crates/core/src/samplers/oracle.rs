//! Exact expectations by enumerating every atom of a sampling.
//!
//! These are the independent references for the closed-form identities: they
//! never touch the spectrum of `M`, only determinants and pseudoinverses of
//! principal submatrices.

use crate::error::{Error, Result};
use crate::linalg::{pinv, principal_submatrix, CoordSubset, Matrix, SymMatrix};
use crate::scalar::Real;

/// Largest dimension for which power-set enumeration is attempted.
pub const ENUMERATION_MAX_DIM: usize = 20;

/// One outcome of a sampling and its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub subset: CoordSubset,
    pub prob: T,
}

fn check_enumerable(d: usize) -> Result<()> {
    if d > ENUMERATION_MAX_DIM {
        Err(Error::EnumerationTooLarge {
            dim: d,
            limit: ENUMERATION_MAX_DIM,
        })
    } else {
        Ok(())
    }
}

fn sub_det<T: Real>(m: &SymMatrix<T>, s: &CoordSubset, scale: T) -> Result<T> {
    let sub = principal_submatrix(m, s)?;
    let det = sub.as_matrix().scale(scale).determinant()?;
    Ok(det.max(T::zero()))
}

/// `Σ_{S ⊆ [d]} det((M/α)_SS)` by enumeration.
pub fn enumerate_normalization<T: Real>(m: &SymMatrix<T>, alpha: T) -> Result<T> {
    let d = m.dim();
    check_enumerable(d)?;
    let inv_alpha = T::one() / alpha;
    let mut total = T::zero();
    for mask in 0..(1u64 << d) {
        total += sub_det(m, &CoordSubset::from_mask(d, mask), inv_alpha)?;
    }
    Ok(total)
}

/// All `2^d` atoms of `DPP(M/α)` with `P(S) = det((M/α)_SS) / det(I + M/α)`.
pub fn dpp_atoms<T: Real>(m: &SymMatrix<T>, alpha: T) -> Result<Vec<Atom<T>>> {
    let d = m.dim();
    check_enumerable(d)?;
    let inv_alpha = T::one() / alpha;
    let norm = m
        .as_matrix()
        .scale(inv_alpha)
        .add(&Matrix::identity(d))?
        .determinant()?;
    (0..(1u64 << d))
        .map(|mask| {
            let subset = CoordSubset::from_mask(d, mask);
            let prob = sub_det(m, &subset, inv_alpha)? / norm;
            Ok(Atom { subset, prob })
        })
        .collect()
}

/// All `2^d` atoms of independent inclusion with the given marginals.
pub fn poisson_atoms<T: Real>(marginals: &[T]) -> Result<Vec<Atom<T>>> {
    let d = marginals.len();
    check_enumerable(d)?;
    Ok((0..(1u64 << d))
        .map(|mask| {
            let prob = marginals
                .iter()
                .enumerate()
                .map(|(i, &p)| if mask >> i & 1 == 1 { p } else { T::one() - p })
                .fold(T::one(), |a, b| a * b);
            Atom {
                subset: CoordSubset::from_mask(d, mask),
                prob,
            }
        })
        .collect())
}

fn accumulate<T: Real>(
    d: usize,
    atoms: &[Atom<T>],
    mut block: impl FnMut(&CoordSubset) -> Result<SymMatrix<T>>,
) -> Result<SymMatrix<T>> {
    let mut acc = Matrix::zeros(d, d);
    for atom in atoms {
        if atom.prob == T::zero() || atom.subset.is_empty() {
            continue;
        }
        let b = block(&atom.subset)?;
        let idx = atom.subset.indices();
        for (a, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                acc[(i, j)] += atom.prob * b.get(a, c);
            }
        }
    }
    Ok(SymMatrix::new(acc)?)
}

/// `E[(M_S)^+] = Σ P(S) (M_S)^+` over the given atoms.
pub fn expected_placed_pinv<T: Real>(m: &SymMatrix<T>, atoms: &[Atom<T>]) -> Result<SymMatrix<T>> {
    accumulate(m.dim(), atoms, |s| Ok(pinv(&principal_submatrix(m, s)?)?.0))
}

/// `E[M_S] = Σ P(S) M_S` over the given atoms.
pub fn expected_placed_block<T: Real>(m: &SymMatrix<T>, atoms: &[Atom<T>]) -> Result<SymMatrix<T>> {
    accumulate(m.dim(), atoms, |s| principal_submatrix(m, s))
}

/// `E[(M_S)^+]` under `DPP(M/α)` by power-set enumeration (`d ≤ 20`).
pub fn brute_force_expected_pinv<T: Real>(m: &SymMatrix<T>, alpha: T) -> Result<SymMatrix<T>> {
    m.require_psd()?;
    let atoms = dpp_atoms(m, alpha)?;
    expected_placed_pinv(m, &atoms)
}

/// `E[M_S]` under `DPP(M/α)` by power-set enumeration (`d ≤ 20`).
pub fn brute_force_expected_msub<T: Real>(m: &SymMatrix<T>, alpha: T) -> Result<SymMatrix<T>> {
    m.require_psd()?;
    let atoms = dpp_atoms(m, alpha)?;
    expected_placed_block(m, &atoms)
}

pub fn atoms_expected_size<T: Real>(atoms: &[Atom<T>]) -> T {
    atoms
        .iter()
        .map(|a| a.prob * T::from_usize_lossy(a.subset.len()))
        .sum()
}

pub fn atoms_marginals<T: Real>(d: usize, atoms: &[Atom<T>]) -> Vec<T> {
    let mut p = vec![T::zero(); d];
    for a in atoms {
        for i in a.subset.iter() {
            p[i] += a.prob;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2() -> SymMatrix<f64> {
        SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap()
    }

    #[test]
    fn two_by_two_atoms() {
        let atoms = dpp_atoms(&m2(), 1.0).unwrap();
        let probs: Vec<f64> = atoms.iter().map(|a| a.prob).collect();
        let expect = [1.0 / 8.0, 2.0 / 8.0, 2.0 / 8.0, 3.0 / 8.0];
        for (p, e) in probs.iter().zip(expect) {
            assert!((p - e).abs() < 1e-15);
        }
        assert!((enumerate_normalization(&m2(), 1.0).unwrap() - 8.0).abs() < 1e-14);
    }

    #[test]
    fn expected_pinv_two_by_two() {
        let e = brute_force_expected_pinv(&m2(), 1.0).unwrap();
        let expect = [[3.0 / 8.0, -1.0 / 8.0], [-1.0 / 8.0, 3.0 / 8.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((e.get(i, j) - expect[i][j]).abs() < 1e-15);
            }
        }
        let one = brute_force_expected_pinv(&SymMatrix::<f64>::diagonal(&[1.0]), 1.0).unwrap();
        assert!((one.get(0, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn expected_msub_examples() {
        let e = brute_force_expected_msub(&m2(), 1.0).unwrap();
        let expect = [[10.0 / 8.0, 3.0 / 8.0], [3.0 / 8.0, 10.0 / 8.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((e.get(i, j) - expect[i][j]).abs() < 1e-15);
            }
        }
        let diag = [3.0, 0.5, 2.0];
        let a = 0.7;
        let e = brute_force_expected_msub(&SymMatrix::<f64>::diagonal(&diag), a).unwrap();
        for (i, &m) in diag.iter().enumerate() {
            assert!((e.get(i, i) - m * m / (m + a)).abs() < 1e-14);
        }
        let e = brute_force_expected_msub(&m2(), 1e15).unwrap();
        assert!(e.max_abs() < 1e-14);
    }

    #[test]
    fn enumeration_guard() {
        let m = SymMatrix::<f64>::identity(21);
        assert!(matches!(
            brute_force_expected_pinv(&m, 1.0),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn poisson_atoms_sum_to_one() {
        let atoms = poisson_atoms(&[0.2, 0.9, 0.5]).unwrap();
        let total: f64 = atoms.iter().map(|a| a.prob).sum();
        assert!((total - 1.0).abs() < 1e-15);
        let marg = atoms_marginals(3, &atoms);
        assert!((marg[1] - 0.9).abs() < 1e-15);
    }
}
