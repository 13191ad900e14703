use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Exact table of `C(j, m)` for `0 <= j <= n` and `0 <= m <= max_lower`,
/// filled by Pascal's rule so that only additions are performed.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    n: usize,
    cols: Vec<Vec<BigUint>>,
    small: Vec<Vec<Option<u64>>>,
    zero: BigUint,
}

impl BinomialTable {
    pub fn new(n: usize, max_lower: usize) -> Self {
        let mut cols: Vec<Vec<BigUint>> = Vec::with_capacity(max_lower + 1);
        cols.push(vec![BigUint::from(1u32); n + 1]);
        for m in 1..=max_lower {
            let prev = &cols[m - 1];
            let mut col = Vec::with_capacity(n + 1);
            col.push(BigUint::zero());
            for j in 1..=n {
                let v = &col[j - 1] + &prev[j - 1];
                col.push(v);
            }
            cols.push(col);
        }
        let small = cols
            .iter()
            .map(|c| c.iter().map(ToPrimitive::to_u64).collect())
            .collect();
        Self {
            n,
            cols,
            small,
            zero: BigUint::zero(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_lower(&self) -> usize {
        self.cols.len() - 1
    }

    /// `C(j, m)`; zero when `m > j`.
    pub fn get(&self, j: usize, m: usize) -> &BigUint {
        assert!(j <= self.n && m <= self.max_lower(), "C({j}, {m}) outside table");
        if m > j {
            &self.zero
        } else {
            &self.cols[m][j]
        }
    }

    /// `C(j, m)` when it fits in 64 bits.
    pub fn get_u64(&self, j: usize, m: usize) -> Option<u64> {
        assert!(j <= self.n && m <= self.max_lower(), "C({j}, {m}) outside table");
        self.small[m][j]
    }
}

/// `C(n, k)` by the multiplicative formula, exact.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
