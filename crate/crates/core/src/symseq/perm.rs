//! Permutations in one-line notation and their Lehmer ranks.

/// Largest arity whose permutations are ranked in a `u64`.
pub const MAX_RANKED: usize = 20;

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Lehmer rank of a permutation of `0..n` in one-line notation.
pub fn rank(p: &[usize]) -> u64 {
    let n = p.len();
    assert!(n <= MAX_RANKED, "permutation too long to rank");
    let mut r = 0u64;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|x| **x < p[i]).count() as u64;
        r = r * (n - i) as u64 + smaller;
    }
    r
}

/// Inverse of [`rank`].
pub fn unrank(n: usize, mut r: u64) -> Vec<usize> {
    let mut digits = vec![0usize; n];
    for i in (0..n).rev() {
        let base = (n - i) as u64;
        digits[i] = (r % base) as usize;
        r /= base;
    }
    let mut avail: Vec<usize> = (0..n).collect();
    digits.iter().map(|d| avail.remove(*d)).collect()
}

/// Parity of the number of inversions.
pub fn is_odd(p: &[usize]) -> bool {
    let mut inv = 0usize;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

/// `(a ∘ b)(i) = a(b(i))`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|i| a[*i]).collect()
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, x) in p.iter().enumerate() {
        q[*x] = i;
    }
    q
}

/// Adjacent swaps that sort `dest` ascending, in the order performed.
/// Applying `s_i` for each returned `i` realizes the permutation that
/// sends position `k` to `dest[k]`.
pub fn bubble_swaps(dest: &[usize]) -> Vec<usize> {
    let mut a = dest.to_vec();
    let mut out = Vec::new();
    let n = a.len();
    for pass in 0..n {
        let mut moved = false;
        for i in 0..n.saturating_sub(1 + pass) {
            if a[i] > a[i + 1] {
                a.swap(i, i + 1);
                out.push(i);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    out
}

/// Stable sorting permutation: `dest[k]` is the sorted position of item `k`.
pub fn sorting_dest<T: Ord>(items: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|a, b| items[*a].cmp(&items[*b]).then(a.cmp(b)));
    inverse(&order)
}

/// Koszul sign parity of moving items with the given degrees to `dest`.
pub fn koszul_odd(degrees: &[i32], dest: &[usize]) -> bool {
    let mut odd = false;
    for k in 0..dest.len() {
        if degrees[k] & 1 == 0 {
            continue;
        }
        for l in k + 1..dest.len() {
            if dest[k] > dest[l] && degrees[l] & 1 == 1 {
                odd = !odd;
            }
        }
    }
    odd
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_roundtrip() {
        for n in 0..6 {
            for r in 0..factorial(n) {
                assert_eq!(rank(&unrank(n, r)), r);
            }
        }
        assert_eq!(unrank(3, 0), vec![0, 1, 2]);
        assert_eq!(unrank(3, 5), vec![2, 1, 0]);
    }

    #[test]
    fn bubble_realizes_dest() {
        let dest = vec![2, 0, 3, 1];
        let mut arr: Vec<usize> = (0..4).collect();
        for i in bubble_swaps(&dest) {
            arr.swap(i, i + 1);
        }
        for (k, d) in dest.iter().enumerate() {
            assert_eq!(arr[*d], k);
        }
    }
}
