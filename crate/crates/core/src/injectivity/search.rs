use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::feasibility::{feasible_sign_pair, FarkasCertificate, FeasibilityResult};
use crate::linalg::{Rational, RationalMatrix};
use crate::sign::{SignVector, SignVectorSet};

/// Infeasibility proof for one `(mu, tau)` pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCertificate {
    pub mu: SignVector,
    pub tau: SignVector,
    pub certificate: FarkasCertificate,
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    /// Every pair is infeasible.
    Exhausted(Vec<PairCertificate>),
    /// The first feasible pair in `(mu, tau)` order, with the `(x, y)`
    /// witness of the sign system.
    Found {
        mu: SignVector,
        tau: SignVector,
        witness: Vec<Rational>,
    },
}

const CHUNK: usize = 64;

/// Solves the sign system for every `mu` in `mus` and `tau` in `taus`, in
/// canonical order, stopping at the first feasible pair. Chunks are solved
/// in parallel; the answer does not depend on the schedule.
pub fn sign_search(
    a: &RationalMatrix,
    b: &RationalMatrix,
    mus: &SignVectorSet,
    taus: &SignVectorSet,
) -> Result<SearchOutcome> {
    let pairs: Vec<(&SignVector, &SignVector)> =
        mus.iter().flat_map(|m| taus.iter().map(move |t| (m, t))).collect();
    let mut certs = Vec::with_capacity(pairs.len());
    for chunk in pairs.chunks(CHUNK) {
        let results: Vec<FeasibilityResult> = chunk
            .par_iter()
            .map(|(m, t)| feasible_sign_pair(a, b, m, t))
            .collect::<Result<_>>()?;
        for ((m, t), res) in chunk.iter().zip(results) {
            match res {
                FeasibilityResult::Feasible(witness) => {
                    return Ok(SearchOutcome::Found {
                        mu: (*m).clone(),
                        tau: (*t).clone(),
                        witness,
                    })
                }
                FeasibilityResult::Infeasible(certificate) => certs.push(PairCertificate {
                    mu: (*m).clone(),
                    tau: (*t).clone(),
                    certificate,
                }),
            }
        }
    }
    Ok(SearchOutcome::Exhausted(certs))
}

/// Up to `limit` feasible pairs with their witnesses, in `(mu, tau)` order.
pub fn feasible_pairs(
    a: &RationalMatrix,
    b: &RationalMatrix,
    mus: &SignVectorSet,
    taus: &SignVectorSet,
    limit: usize,
) -> Result<Vec<(SignVector, SignVector, Vec<Rational>)>> {
    let pairs: Vec<(&SignVector, &SignVector)> =
        mus.iter().flat_map(|m| taus.iter().map(move |t| (m, t))).collect();
    let mut out = Vec::new();
    for chunk in pairs.chunks(CHUNK) {
        let results: Vec<FeasibilityResult> = chunk
            .par_iter()
            .map(|(m, t)| feasible_sign_pair(a, b, m, t))
            .collect::<Result<_>>()?;
        for ((m, t), res) in chunk.iter().zip(results) {
            if let FeasibilityResult::Feasible(w) = res {
                out.push(((*m).clone(), (*t).clone(), w));
                if out.len() == limit {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}
