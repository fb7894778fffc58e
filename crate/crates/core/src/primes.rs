//! Prime enumeration.

/// All primes `p < limit`, by an odd-only sieve of Eratosthenes.
pub fn primes_below(limit: u64) -> Vec<u64> {
    if limit <= 2 {
        return Vec::new();
    }
    // index i represents 2i + 1
    let half = (limit / 2) as usize;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) < limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2];
    out.extend(
        composite
            .iter()
            .enumerate()
            .filter(|&(i, &c)| !c && ((2 * i + 1) as u64) < limit)
            .map(|(i, _)| (2 * i + 1) as u64),
    );
    out
}

/// Primes `3 < p < limit`: the range used by every estimator here.
pub fn estimator_primes(limit: u64) -> Vec<u64> {
    primes_below(limit).into_iter().filter(|&p| p > 3).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime;

    #[test]
    fn sieve_matches_trial() {
        for limit in [0u64, 1, 2, 3, 4, 5, 6, 30, 31, 1000, 7919, 7920] {
            let expect: Vec<u64> = (0..limit).filter(|&n| is_prime(n)).collect();
            assert_eq!(primes_below(limit), expect, "limit={limit}");
        }
        assert_eq!(primes_below(1_000_000).len(), 78_498);
        assert_eq!(estimator_primes(6), vec![5]);
        assert!(estimator_primes(4).is_empty());
    }
}
