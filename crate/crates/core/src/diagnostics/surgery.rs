//! Euler characteristic change under a neck surgery.

use crate::error::{domain, Result};

/// `χ(B^{n-k+1} × S^{k-1}) - χ(S^{n-k} × B^k)` for the surgery replacing a
/// neck `S^{n-k} × B^k` by two caps.
pub fn surgery_euler_delta(n: usize, k: usize) -> Result<i64> {
    if k < 1 || k + 1 > n {
        return domain(format!(
            "surgery needs 1 <= k <= n - 1, got n = {n}, k = {k}"
        ));
    }
    Ok(sphere_euler(k - 1) - sphere_euler(n - k))
}

/// `χ(S^d) = 1 + (-1)^d`.
pub fn sphere_euler(d: usize) -> i64 {
    if d.is_multiple_of(2) {
        2
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `χ(S^d)` as the alternating face count of the boundary of a `(d+1)`-simplex.
    fn simplex_boundary_euler(d: usize) -> i64 {
        let mut binom = vec![1i64];
        for m in 1..=d + 2 {
            let mut next = vec![1i64; m + 1];
            for i in 1..m {
                next[i] = binom[i - 1] + binom[i];
            }
            binom = next;
        }
        (0..=d)
            .map(|i| {
                if i % 2 == 0 {
                    binom[i + 1]
                } else {
                    -binom[i + 1]
                }
            })
            .sum()
    }

    #[test]
    fn matches_face_counts() {
        for n in 2..=7 {
            for k in 1..n {
                let want = simplex_boundary_euler(k - 1) - simplex_boundary_euler(n - k);
                assert_eq!(surgery_euler_delta(n, k).unwrap(), want);
            }
        }
        assert_eq!(surgery_euler_delta(2, 1).unwrap(), 2);
        assert_eq!(surgery_euler_delta(3, 1).unwrap(), 0);
        assert_eq!(surgery_euler_delta(3, 2).unwrap(), 0);
        assert!(surgery_euler_delta(3, 3).is_err());
        assert!(surgery_euler_delta(3, 0).is_err());
    }
}
