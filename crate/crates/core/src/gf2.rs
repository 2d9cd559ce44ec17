//! Bit-packed linear algebra over GF(2).
//!
//! Rows are stored as packed `u64` words. Elimination is dense; at the sizes
//! this crate works with (a few thousand variables at most) that is well
//! within budget and keeps the code obvious.

use std::fmt;

const WORD: usize = 64;

/// A fixed-length packed bit vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(
            bits.len(),
            bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i),
        )
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// `self ^= other`. Both vectors must have the same length.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * WORD + bit)
            })
        })
    }

    /// Bits `start..start + len` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len);
        BitVec::from_indices(len, (0..len).filter(|i| self.get(start + i)))
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[")?;
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        write!(f, "]")
    }
}

/// Brings `rows` to reduced row-echelon form, pivoting only on the first
/// `pivot_cols` columns. Columns beyond that ride along (right-hand sides,
/// payloads, row histories).
///
/// Returns the pivot columns; afterwards `rows[..pivots.len()]` are the pivot
/// rows in pivot order and the remaining rows are zero on the pivot range.
pub fn rref(rows: &mut [BitVec], pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..pivot_cols {
        if rank == rows.len() {
            break;
        }
        let Some(found) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, found);
        let (head, tail) = rows.split_at_mut(rank);
        let (pivot_row, tail) = tail.split_first_mut().expect("rank < len");
        for row in head.iter_mut().chain(tail.iter_mut()) {
            if row.get(col) {
                row.xor_assign(pivot_row);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// A system of affine equations `coeffs · v = rhs` over GF(2).
#[derive(Clone, Debug)]
pub struct LinearSystem {
    nvars: usize,
    coeffs: Vec<BitVec>,
    rhs: Vec<bool>,
}

/// Result of eliminating a [`LinearSystem`].
#[derive(Clone, Debug)]
pub struct Echelon {
    nvars: usize,
    /// Reduced pivot rows (coefficients only).
    rows: Vec<BitVec>,
    rhs: Vec<bool>,
    pivots: Vec<usize>,
    consistent: bool,
}

impl LinearSystem {
    pub fn new(nvars: usize) -> Self {
        Self {
            nvars,
            coeffs: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Appends an equation and returns its index.
    pub fn push(&mut self, coeffs: BitVec, rhs: bool) -> usize {
        assert_eq!(coeffs.len(), self.nvars);
        self.coeffs.push(coeffs);
        self.rhs.push(rhs);
        self.coeffs.len() - 1
    }

    /// Appends `Σ vars = rhs`.
    pub fn push_sum(&mut self, vars: impl IntoIterator<Item = usize>, rhs: bool) -> usize {
        let mut row = BitVec::zeros(self.nvars);
        for v in vars {
            row.toggle(v);
        }
        self.push(row, rhs)
    }

    pub fn equation(&self, i: usize) -> (&BitVec, bool) {
        (&self.coeffs[i], self.rhs[i])
    }

    fn augmented(&self, with_history: bool) -> Vec<BitVec> {
        let m = self.coeffs.len();
        let width = self.nvars + 1 + if with_history { m } else { 0 };
        self.coeffs
            .iter()
            .zip(&self.rhs)
            .enumerate()
            .map(|(i, (c, &b))| {
                let mut row = BitVec::zeros(width);
                for j in c.iter_ones() {
                    row.set(j, true);
                }
                row.set(self.nvars, b);
                if with_history {
                    row.set(self.nvars + 1 + i, true);
                }
                row
            })
            .collect()
    }

    pub fn eliminate(&self) -> Echelon {
        let mut rows = self.augmented(false);
        let pivots = rref(&mut rows, self.nvars);
        let consistent = rows[pivots.len()..].iter().all(|r| !r.get(self.nvars));
        let rank = pivots.len();
        Echelon {
            nvars: self.nvars,
            rhs: rows[..rank].iter().map(|r| r.get(self.nvars)).collect(),
            rows: rows[..rank]
                .iter()
                .map(|r| r.slice(0, self.nvars))
                .collect(),
            pivots,
            consistent,
        }
    }

    /// Canonical solution (free variables zero) or the indices of a subset of
    /// equations whose sum reads `0 = 1`.
    pub fn solve(&self) -> Result<BitVec, Vec<usize>> {
        let echelon = self.eliminate();
        if let Some(solution) = echelon.particular_solution() {
            return Ok(solution);
        }
        let mut rows = self.augmented(true);
        let rank = rref(&mut rows, self.nvars).len();
        let witness = rows[rank..]
            .iter()
            .find(|r| r.get(self.nvars))
            .expect("eliminate reported an inconsistency");
        Err(witness
            .slice(self.nvars + 1, self.coeffs.len())
            .iter_ones()
            .collect())
    }
}

impl LinearSystem {
    /// The equations at `indices`, in that order.
    pub fn subsystem(&self, indices: &[usize]) -> LinearSystem {
        let mut sub = LinearSystem::new(self.nvars);
        for &i in indices {
            sub.push(self.coeffs[i].clone(), self.rhs[i]);
        }
        sub
    }

    /// Shrinks an inconsistent subset of equations to an irreducible one:
    /// dropping any single equation of the result makes it consistent.
    pub fn minimize_witness(&self, witness: &[usize]) -> Vec<usize> {
        let mut keep = witness.to_vec();
        let mut i = 0;
        while i < keep.len() {
            let mut trial = keep.clone();
            trial.remove(i);
            if self.subsystem(&trial).eliminate().is_consistent() {
                i += 1;
            } else {
                keep = trial;
            }
        }
        keep
    }
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.nvars - self.rank()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// Free variables set to zero, pivot variables read off the right-hand side.
    pub fn particular_solution(&self) -> Option<BitVec> {
        if !self.consistent {
            return None;
        }
        let mut v = BitVec::zeros(self.nvars);
        for (&p, &b) in self.pivots.iter().zip(&self.rhs) {
            v.set(p, b);
        }
        Some(v)
    }

    /// One basis vector of the homogeneous solution space per free variable,
    /// in increasing free-variable order.
    pub fn null_space(&self) -> Vec<BitVec> {
        let mut is_pivot = vec![false; self.nvars];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.nvars)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::zeros(self.nvars);
                v.set(f, true);
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if row.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }
}

/// Rank of a list of equal-length vectors.
pub fn rank(rows: &[BitVec]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let width = first.len();
    let mut rows = rows.to_vec();
    rref(&mut rows, width).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bit_ops() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.count_ones(), 3);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(v.first_one(), Some(0));
        v.toggle(0);
        assert_eq!(v.first_one(), Some(64));
        let w = BitVec::from_indices(130, [64, 1]);
        assert!(v.dot(&w));
        v.xor_assign(&w);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![1, 129]);
        assert_eq!(v.slice(1, 3), BitVec::from_indices(3, [0]));
    }

    #[test]
    fn inconsistent_system_reports_witness() {
        // x0 + x1 = 1, x1 + x2 = 0, x0 + x2 = 0  => sum gives 0 = 1
        let mut sys = LinearSystem::new(4);
        sys.push_sum([0, 1], true);
        sys.push_sum([3], false);
        sys.push_sum([1, 2], false);
        sys.push_sum([0, 2], false);
        let witness = sys.solve().unwrap_err();
        assert_eq!(witness, vec![0, 2, 3]);
    }

    #[test]
    fn canonical_solution_zeroes_free_variables() {
        let mut sys = LinearSystem::new(3);
        sys.push_sum([0, 2], true);
        let sol = sys.solve().unwrap();
        assert_eq!(sol, BitVec::from_indices(3, [0]));
    }

    fn matrix_strategy() -> impl Strategy<Value = (usize, Vec<Vec<bool>>)> {
        (1usize..24, 0usize..24).prop_flat_map(|(n, m)| {
            (
                Just(n),
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), m),
            )
        })
    }

    /// Naive rank over Vec<Vec<bool>>, independent of the packed code path.
    fn naive_rank(mut m: Vec<Vec<bool>>, n: usize) -> usize {
        let mut r = 0;
        for c in 0..n {
            if let Some(p) = (r..m.len()).find(|&i| m[i][c]) {
                m.swap(r, p);
                for i in 0..m.len() {
                    if i != r && m[i][c] {
                        for k in 0..n {
                            m[i][k] ^= m[r][k];
                        }
                    }
                }
                r += 1;
            }
        }
        r
    }

    proptest! {
        #[test]
        fn null_space_is_annihilated_and_complete((n, m) in matrix_strategy()) {
            let mut sys = LinearSystem::new(n);
            for row in &m {
                sys.push(BitVec::from_bools(row), false);
            }
            let ech = sys.eliminate();
            prop_assert_eq!(ech.rank(), naive_rank(m.clone(), n));
            let basis = ech.null_space();
            prop_assert_eq!(basis.len() + ech.rank(), n);
            prop_assert_eq!(rank(&basis), basis.len());
            for v in &basis {
                for row in &m {
                    prop_assert!(!BitVec::from_bools(row).dot(v));
                }
            }
        }

        #[test]
        fn solve_satisfies_or_witness_is_contradiction(
            (n, m) in matrix_strategy(),
            rhs in proptest::collection::vec(any::<bool>(), 24),
        ) {
            let mut sys = LinearSystem::new(n);
            for (row, b) in m.iter().zip(&rhs) {
                sys.push(BitVec::from_bools(row), *b);
            }
            match sys.solve() {
                Ok(v) => {
                    for (row, b) in m.iter().zip(&rhs) {
                        prop_assert_eq!(BitVec::from_bools(row).dot(&v), *b);
                    }
                }
                Err(witness) => {
                    let mut acc = BitVec::zeros(n);
                    let mut parity = false;
                    for &i in &witness {
                        acc.xor_assign(&BitVec::from_bools(&m[i]));
                        parity ^= rhs[i];
                    }
                    prop_assert!(acc.is_zero());
                    prop_assert!(parity);
                }
            }
        }
    }
}
