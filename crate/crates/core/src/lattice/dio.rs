//! Minimal nonnegative integer solutions of `sum_i x_i c_i = b` over `Z^d`.
//!
//! Contejean-Devie search: breadth-first over `N^n` starting from the unit
//! vectors, incrementing a coordinate only when doing so shrinks the defect
//! (`defect . c_i < 0`), pruning nodes that dominate a solution already
//! found.  Level order makes every newly found solution minimal outright.
//!
//! Inhomogeneous systems get an extra marker column `-b` capped at
//! coefficient 1; minimal solutions with marker 1 are exactly the minimal
//! solutions of the original system.  The search is exhaustive below
//! `max_nodes` explored nodes; past that it reports `SearchCapped` rather
//! than a wrong answer.

use std::collections::BTreeSet;

use num_traits::Signed;

use super::{LatticeError, LatticeVector};

#[derive(Clone, Copy, Debug)]
pub struct DioLimits {
    pub max_nodes: usize,
}

impl Default for DioLimits {
    fn default() -> Self {
        DioLimits { max_nodes: 200_000 }
    }
}

/// All minimal solutions of `sum x_i cols[i] = rhs`.  For `rhs = 0` these are
/// the minimal nonzero solutions of the homogeneous system.
pub fn minimal_nonneg_solutions(
    cols: &[LatticeVector],
    rhs: &LatticeVector,
    limits: &DioLimits,
) -> Result<Vec<Vec<u32>>, LatticeError> {
    if rhs.is_zero() {
        return search(cols, None, limits, false);
    }
    let mut ext: Vec<LatticeVector> = cols.to_vec();
    ext.push(rhs.neg());
    let marker = ext.len() - 1;
    let sols = search(&ext, Some(marker), limits, false)?;
    Ok(sols
        .into_iter()
        .filter(|s| s[marker] == 1)
        .map(|mut s| {
            s.pop();
            s
        })
        .collect())
}

/// Whether `sum x_i cols[i] = rhs` has any nonnegative solution (for
/// `rhs = 0` the zero solution counts, so this is vacuously true).
pub fn feasible(
    cols: &[LatticeVector],
    rhs: &LatticeVector,
    limits: &DioLimits,
) -> Result<bool, LatticeError> {
    if rhs.is_zero() {
        return Ok(true);
    }
    let mut ext: Vec<LatticeVector> = cols.to_vec();
    ext.push(rhs.neg());
    let marker = ext.len() - 1;
    let sols = search(&ext, Some(marker), limits, true)?;
    Ok(sols.iter().any(|s| s[marker] == 1))
}

fn dominates(x: &[u32], m: &[u32]) -> bool {
    x.iter().zip(m).all(|(a, b)| a >= b)
}

fn search(
    cols: &[LatticeVector],
    marker: Option<usize>,
    limits: &DioLimits,
    stop_at_marked: bool,
) -> Result<Vec<Vec<u32>>, LatticeError> {
    let n = cols.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let dim = cols[0].dim();
    debug_assert!(cols.iter().all(|c| c.dim() == dim));

    let mut minimal: Vec<Vec<u32>> = Vec::new();
    let mut frontier: Vec<(Vec<u32>, LatticeVector)> = (0..n)
        .map(|i| {
            let mut x = vec![0u32; n];
            x[i] = 1;
            (x, cols[i].clone())
        })
        .collect();
    let mut nodes = 0usize;

    while !frontier.is_empty() {
        let mut level_solutions: Vec<Vec<u32>> = Vec::new();
        let mut next: Vec<(Vec<u32>, LatticeVector)> = Vec::new();
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();

        for (x, defect) in frontier {
            nodes += 1;
            if nodes > limits.max_nodes {
                return Err(LatticeError::SearchCapped { nodes });
            }
            if minimal.iter().any(|m| dominates(&x, m)) {
                continue;
            }
            if defect.is_zero() {
                level_solutions.push(x);
                continue;
            }
            for i in 0..n {
                if marker == Some(i) && x[i] >= 1 {
                    continue;
                }
                if !defect.dot(&cols[i]).is_negative() {
                    continue;
                }
                let mut child = x.clone();
                child[i] += 1;
                if seen.insert(child.clone()) {
                    next.push((child, defect.add(&cols[i])));
                }
            }
        }

        // Distinct nodes of equal total degree are incomparable, so every
        // solution surfacing on this level is minimal.
        minimal.extend(level_solutions);
        if stop_at_marked {
            if let Some(mk) = marker {
                if minimal.iter().any(|s| s[mk] == 1) {
                    return Ok(minimal);
                }
            }
        }
        frontier = next;
    }
    Ok(minimal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(coords)
    }

    #[test]
    fn homogeneous_two_three_relation() {
        let sols = minimal_nonneg_solutions(
            &[v(&[2]), v(&[-3])],
            &v(&[0]),
            &DioLimits::default(),
        )
        .unwrap();
        assert_eq!(sols, vec![vec![3, 2]]);
    }

    #[test]
    fn inhomogeneous_difference_system() {
        // a - c = (0, 1) with a, c ranging over N{(1,0)} + N{(0,1)}.
        let cols = [v(&[1, 0]), v(&[0, 1]), v(&[-1, 0]), v(&[0, -1])];
        let sols =
            minimal_nonneg_solutions(&cols, &v(&[0, 1]), &DioLimits::default()).unwrap();
        assert_eq!(sols, vec![vec![0, 1, 0, 0]]);
    }

    #[test]
    fn infeasible_parity_system() {
        let sols = minimal_nonneg_solutions(&[v(&[2])], &v(&[1]), &DioLimits::default())
            .unwrap();
        assert!(sols.is_empty());
        assert!(!feasible(&[v(&[2])], &v(&[1]), &DioLimits::default()).unwrap());
    }

    #[test]
    fn feasibility_matches_enumeration() {
        let cols = [v(&[2]), v(&[3])];
        assert!(feasible(&cols, &v(&[7]), &DioLimits::default()).unwrap());
        assert!(!feasible(&cols, &v(&[1]), &DioLimits::default()).unwrap());
        let sols =
            minimal_nonneg_solutions(&cols, &v(&[12]), &DioLimits::default()).unwrap();
        // 12 = 6*2 = 2*2 + ... every pairwise-incomparable decomposition.
        assert_eq!(sols, vec![vec![0, 4], vec![3, 2], vec![6, 0]]);
    }

    #[test]
    fn node_budget_is_enforced() {
        let err = minimal_nonneg_solutions(
            &[v(&[5]), v(&[-7])],
            &v(&[0]),
            &DioLimits { max_nodes: 3 },
        )
        .unwrap_err();
        assert!(matches!(err, LatticeError::SearchCapped { .. }));
    }
}
