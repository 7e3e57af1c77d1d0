/// `C(n, k)` in 128-bit arithmetic, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic `k`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    first: bool,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, idx: (0..k).collect(), first: true, done: k > n }
    }

    /// Advances to the next subset; `None` once exhausted.
    pub fn next_subset(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.first {
            self.first = false;
            return Some(&self.idx);
        }
        let k = self.idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx);
            }
        }
        self.done = true;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 3), 4);
        assert_eq!(binomial(25, 3), 2300);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(1000, 4), 41_417_124_750);
    }

    #[test]
    fn enumerates_all_subsets() {
        let mut c = Combinations::new(6, 3);
        let mut count = 0;
        let mut last = vec![];
        while let Some(s) = c.next_subset() {
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert!(last.as_slice() < s);
            last = s.to_vec();
            count += 1;
        }
        assert_eq!(count, binomial(6, 3));
    }
}
