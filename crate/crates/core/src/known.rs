//! Exponents `p > 3` for which `W_p` is known to be prime or probable prime.

/// `W_p` proved prime.
pub const PROVED: [u64; 29] = [
    5, 7, 11, 13, 17, 19, 23, 31, 43, 61, 79, 101, 127, 167, 191, 199, 313, 347, 701, 1709, 2617, 3539, 5807,
    10501, 10691, 11279, 12391, 14479, 42737,
];

/// `W_p` a probable prime, no proof known.
pub const PROBABLE: [u64; 7] = [83339, 95369, 117239, 127031, 138937, 141079, 267017];

/// All 36 exponents in ascending order.
pub fn all() -> Vec<u64> {
    let mut v: Vec<u64> = PROVED.iter().chain(PROBABLE.iter()).copied().collect();
    v.sort_unstable();
    v
}

pub fn is_proved(p: u64) -> bool {
    PROVED.binary_search(&p).is_ok()
}

pub fn is_known(p: u64) -> bool {
    is_proved(p) || PROBABLE.binary_search(&p).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::is_prime_u64;

    #[test]
    fn sorted_prime_and_disjoint() {
        assert!(PROVED.windows(2).all(|w| w[0] < w[1]));
        assert!(PROBABLE.windows(2).all(|w| w[0] < w[1]));
        assert!(all().iter().all(|&p| is_prime_u64(p) && p > 3));
        assert_eq!(all().len(), 36);
        assert!(is_proved(2617) && !is_proved(83339) && is_known(83339) && !is_known(29));
    }
}
