//! LDPC codes: progressive-edge-growth construction and parity-check ingestion.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::{Code, CodeFamily};
use crate::error::CodeError;
use crate::gf2::Gf2Matrix;

/// Attempts made (seed, seed + 1, ...) before giving up on a full-rank graph.
const MAX_PEG_ATTEMPTS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PegParams {
    pub n: usize,
    pub k: usize,
    pub column_weight: usize,
    pub seed: u64,
}

impl PegParams {
    /// Regular column weight 3, which gives row weight 6 at rate 1/2.
    pub fn regular(n: usize, k: usize, seed: u64) -> Self {
        PegParams { n, k, column_weight: 3, seed }
    }
}

/// Progressive edge growth: each new edge of a variable node goes to a check node
/// as far away as possible in the current graph, preferring the lowest current
/// check degree. Remaining ties are broken by a seeded RNG.
pub fn peg_parity_check(params: &PegParams) -> Result<Gf2Matrix, CodeError> {
    let PegParams { n, k, column_weight, seed } = *params;
    if k == 0 || k >= n || column_weight == 0 {
        return Err(CodeError::InvalidParameters(alloc::format!("PEG({n},{k}) column weight {column_weight}")));
    }
    let m = n - k;
    if column_weight > m {
        return Err(CodeError::InvalidParameters(alloc::format!("column weight {column_weight} exceeds {m} checks")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut var_checks: Vec<Vec<usize>> = vec![Vec::with_capacity(column_weight); n];
    let mut check_vars: Vec<Vec<usize>> = vec![Vec::new(); m];

    let mut check_seen = vec![usize::MAX; m];
    let mut var_seen = vec![usize::MAX; n];
    let mut stamp = 0usize;
    let mut candidates = Vec::with_capacity(m);

    for v in 0..n {
        for edge in 0..column_weight {
            candidates.clear();
            if edge == 0 {
                candidates.extend(0..m);
            } else {
                stamp += 1;
                let mut reached = 0usize;
                let mut frontier: VecDeque<usize> = VecDeque::new();
                for &c in &var_checks[v] {
                    check_seen[c] = stamp;
                    reached += 1;
                    frontier.push_back(c);
                }
                var_seen[v] = stamp;
                loop {
                    let mut next = VecDeque::new();
                    let mut newly = Vec::new();
                    while let Some(c) = frontier.pop_front() {
                        for &u in &check_vars[c] {
                            if var_seen[u] == stamp {
                                continue;
                            }
                            var_seen[u] = stamp;
                            for &c2 in &var_checks[u] {
                                if check_seen[c2] != stamp {
                                    check_seen[c2] = stamp;
                                    newly.push(c2);
                                    next.push_back(c2);
                                }
                            }
                        }
                    }
                    if newly.is_empty() {
                        candidates.extend((0..m).filter(|&c| check_seen[c] != stamp));
                        break;
                    }
                    if reached + newly.len() == m {
                        // every check is now reachable: take the ones reached last
                        candidates.extend(newly);
                        break;
                    }
                    reached += newly.len();
                    frontier = next;
                }
            }
            let min_degree = candidates.iter().map(|&c| check_vars[c].len()).min().expect("at least one candidate check");
            candidates.retain(|&c| check_vars[c].len() == min_degree);
            let chosen = candidates[rng.random_range(0..candidates.len())];
            var_checks[v].push(chosen);
            check_vars[chosen].push(v);
        }
    }

    let mut h = Gf2Matrix::zeros(m, n);
    for (v, checks) in var_checks.iter().enumerate() {
        for &c in checks {
            h.set(c, v, true);
        }
    }
    Ok(h)
}

/// Builds a PEG LDPC code whose `H` has full rank `n - k`, trying successive seeds
/// starting at `params.seed`. Returns the code and the seed that succeeded.
pub fn build_ldpc_peg(params: &PegParams) -> Result<(Code, u64), CodeError> {
    let m = params.n - params.k;
    for attempt in 0..MAX_PEG_ATTEMPTS {
        let seed = params.seed.wrapping_add(attempt);
        let h = peg_parity_check(&PegParams { seed, ..*params })?;
        if h.rank() == m {
            let code = Code::from_parity_check(CodeFamily::Ldpc, h, None)?;
            return Ok((code, seed));
        }
    }
    Err(CodeError::RankDeficient { expected: m, actual: 0 })
}

/// Wraps an externally supplied parity-check matrix (e.g. from an alist file).
pub fn build_ldpc_from_parity_check(h: Gf2Matrix) -> Result<Code, CodeError> {
    Code::from_parity_check(CodeFamily::Ldpc, h, None)
}

/// Length of the shortest cycle through the Tanner graph, by BFS from every
/// variable node. `None` for a forest.
pub fn girth(h: &Gf2Matrix) -> Option<usize> {
    let (m, n) = (h.rows(), h.cols());
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + m];
    for c in 0..m {
        for v in 0..n {
            if h.get(c, v) {
                adj[v].push(n + c);
                adj[n + c].push(v);
            }
        }
    }
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; n + m];
    let mut parent = vec![usize::MAX; n + m];
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &y in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    q.push_back(y);
                } else if parent[x] != y {
                    let cycle = dist[x] + dist[y] + 1;
                    best = Some(best.map_or(cycle, |b| b.min(cycle)));
                }
            }
        }
    }
    best
}
