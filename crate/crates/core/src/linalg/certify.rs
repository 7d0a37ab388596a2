use serde::{Deserialize, Serialize};

use super::exact::rank_exact;
use super::modp::rank_mod_p;
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// A rank together with the evidence that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub rank: usize,
    /// `(prime, rank mod prime)` pairs.
    pub modular_evidence: Vec<(u64, usize)>,
    pub exact_confirmed: bool,
}

impl RankCertificate {
    pub fn is_singular(&self, n: usize) -> bool {
        self.rank < n
    }
}

/// Certifies the rank of `a`.
///
/// A full modular rank proves non-singularity on its own. Any deficit, or
/// `force_exact`, triggers exact elimination; a modular deficit is never
/// reported as a singularity verdict by itself.
pub fn certify_rank(a: &SymMatrix, primes: &[u64], force_exact: bool) -> Result<RankCertificate> {
    if primes.is_empty() {
        return Err(Error::EmptyPrimes);
    }
    let n = a.n();
    let mut evidence = Vec::with_capacity(primes.len());
    for &p in primes {
        let r = rank_mod_p(a, p)?;
        evidence.push((p, r));
        if r == n && !force_exact {
            return Ok(RankCertificate {
                rank: n,
                modular_evidence: evidence,
                exact_confirmed: false,
            });
        }
    }
    let rank = rank_exact(a);
    debug_assert!(evidence.iter().all(|&(_, r)| r <= rank));
    Ok(RankCertificate {
        rank,
        modular_evidence: evidence,
        exact_confirmed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::EntryDistribution;
    use crate::linalg::modp::default_primes;
    use crate::matrix::sample_symmetric;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let c = certify_rank(&SymMatrix::identity(5), &[default_primes()[0]], false).unwrap();
        assert_eq!((c.rank, c.exact_confirmed), (5, false));

        let c = certify_rank(&SymMatrix::zeros(3), &default_primes(), false).unwrap();
        assert_eq!((c.rank, c.exact_confirmed), (0, true));

        let two = SymMatrix::from_rows(&[vec![2, 0], vec![0, 2]]).unwrap();
        let c = certify_rank(&two, &[2], false).unwrap();
        assert_eq!(c.modular_evidence, vec![(2, 0)]);
        assert_eq!((c.rank, c.exact_confirmed), (2, true));

        assert!(matches!(certify_rank(&two, &[], false), Err(Error::EmptyPrimes)));
        let c = certify_rank(&SymMatrix::identity(2), &[3], true).unwrap();
        assert!(c.exact_confirmed);
    }

    proptest! {
        #[test]
        fn modular_ranks_bound_the_certified_rank(n in 0usize..14, seed in any::<u64>(), small in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let a = sample_symmetric(n, &EntryDistribution::bernoulli01(), seed);
            let c = certify_rank(&a, &[small, default_primes()[0]], false).unwrap();
            prop_assert!(c.modular_evidence.iter().all(|&(_, r)| r <= c.rank));
            if !c.exact_confirmed {
                prop_assert_eq!(c.rank, c.modular_evidence.iter().map(|&(_, r)| r).max().unwrap());
            }
            prop_assert_eq!(c.rank, rank_exact(&a));
        }
    }
}
