//! Stabilizer tableau with destabilizers and native multi-qubit Pauli
//! measurement.

use std::fmt;

use rand::Rng;

use crate::pauli::{Pauli, PauliOperator};
use crate::surface::InitPattern;

/// A signed Pauli row in bit-packed symplectic form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliRow {
    xs: Vec<u64>,
    zs: Vec<u64>,
    negative: bool,
    n: usize,
}

impl PauliRow {
    pub fn identity(n: usize) -> Self {
        let words = n.div_ceil(64);
        PauliRow {
            xs: vec![0; words],
            zs: vec![0; words],
            negative: false,
            n,
        }
    }

    pub fn from_operator(op: &PauliOperator) -> Self {
        let mut row = PauliRow::identity(op.num_qubits());
        for (&q, &p) in op.support() {
            let (x, z) = p.bits();
            row.set(q, x, z);
        }
        row.negative = op.is_negative();
        row
    }

    pub fn to_operator(&self) -> PauliOperator {
        let terms = (0..self.n).filter_map(|q| {
            let (x, z) = self.get(q);
            Pauli::from_bits(x, z).map(|p| (q, p))
        });
        PauliOperator::from_terms(self.n, terms).with_sign(self.negative)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, q: usize) -> (bool, bool) {
        let (w, b) = (q / 64, q % 64);
        ((self.xs[w] >> b) & 1 == 1, (self.zs[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / 64, q % 64);
        self.xs[w] = (self.xs[w] & !(1 << b)) | ((x as u64) << b);
        self.zs[w] = (self.zs[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn anticommutes(&self, other: &PauliRow) -> bool {
        let mut acc = 0u32;
        for w in 0..self.xs.len() {
            acc ^= ((self.xs[w] & other.zs[w]) ^ (self.zs[w] & other.xs[w])).count_ones();
        }
        acc & 1 == 1
    }

    /// Sets `self ← self · rhs` (Pauli part only) and returns `k` with
    /// `self · rhs = i^k · result`, ignoring both signs.
    pub fn mul_assign_phase(&mut self, rhs: &PauliRow) -> u8 {
        // Per-lane two-bit counters, accumulated mod 4 across words.
        let (mut cnt1, mut cnt2) = (0u64, 0u64);
        for w in 0..self.xs.len() {
            let (old_x, old_z) = (self.xs[w], self.zs[w]);
            let (x2, z2) = (rhs.xs[w], rhs.zs[w]);
            self.xs[w] ^= x2;
            self.zs[w] ^= z2;
            let x1z2 = old_x & z2;
            let anti = (x2 & old_z) ^ x1z2;
            cnt2 ^= (cnt1 ^ self.xs[w] ^ self.zs[w] ^ x1z2) & anti;
            cnt1 ^= anti;
        }
        ((cnt1.count_ones() + 2 * cnt2.count_ones()) % 4) as u8
    }

    /// `self ← self · rhs` including signs. Panics if the product is not
    /// Hermitian.
    pub fn mul_assign(&mut self, rhs: &PauliRow) {
        let k = self.mul_assign_phase(rhs) % 4;
        assert!(k.is_multiple_of(2), "product of anticommuting rows");
        self.negative ^= rhs.negative ^ (k == 2);
    }

    fn same_paulis(&self, other: &PauliRow) -> bool {
        self.xs == other.xs && self.zs == other.zs
    }
}

impl fmt::Debug for PauliRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_operator())
    }
}

/// A stabilizer state on `n` qubits: rows `0..n` are destabilizers, rows
/// `n..2n` stabilizers, destabilizer `i` pairing with stabilizer `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    rows: Vec<PauliRow>,
}

/// Outcome of a Pauli measurement. `outcome` is `true` for eigenvalue −1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub outcome: bool,
    pub deterministic: bool,
}

impl Tableau {
    /// `|0…0⟩`.
    pub fn new(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            let mut r = PauliRow::identity(n);
            r.set(q, true, false);
            rows.push(r);
        }
        for q in 0..n {
            let mut r = PauliRow::identity(n);
            r.set(q, false, true);
            rows.push(r);
        }
        Tableau { n, rows }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizer(&self, i: usize) -> &PauliRow {
        &self.rows[self.n + i]
    }

    pub fn destabilizer(&self, i: usize) -> &PauliRow {
        &self.rows[i]
    }

    /// Current stabilizer generators.
    pub fn stabilizers(&self) -> Vec<PauliOperator> {
        self.rows[self.n..]
            .iter()
            .map(PauliRow::to_operator)
            .collect()
    }

    /// Multiplies every row anticommuting with `p` by −1.
    pub fn apply_pauli(&mut self, p: &PauliOperator) {
        assert_eq!(p.num_qubits(), self.n);
        let row = PauliRow::from_operator(p);
        for r in &mut self.rows {
            if r.anticommutes(&row) {
                r.negative = !r.negative;
            }
        }
    }

    /// The eigenvalue bit of `p` if it is determined by the state, without
    /// changing the state.
    pub fn peek(&self, p: &PauliOperator) -> Option<bool> {
        let row = PauliRow::from_operator(p);
        if self.rows[self.n..].iter().any(|s| s.anticommutes(&row)) {
            return None;
        }
        let mut acc = PauliRow::identity(self.n);
        for i in 0..self.n {
            if self.rows[i].anticommutes(&row) {
                acc.mul_assign(&self.rows[self.n + i]);
            }
        }
        debug_assert!(acc.same_paulis(&row), "stabilizer group lacks {p}");
        Some(acc.negative ^ row.negative)
    }

    /// Measures `p`. A random outcome is taken from `forced` when given,
    /// otherwise drawn from `rng`.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        p: &PauliOperator,
        forced: Option<bool>,
        rng: &mut R,
    ) -> Measurement {
        assert_eq!(p.num_qubits(), self.n);
        let row = PauliRow::from_operator(p);
        let n = self.n;
        let Some(pivot) = (n..2 * n).find(|&i| self.rows[i].anticommutes(&row)) else {
            return Measurement {
                outcome: self.peek(p).expect("commutes with every stabilizer"),
                deterministic: true,
            };
        };
        let outcome = forced.unwrap_or_else(|| rng.random::<bool>());
        let pivot_row = self.rows[pivot].clone();
        for i in 0..2 * n {
            if i != pivot && i != pivot - n && self.rows[i].anticommutes(&row) {
                self.rows[i].mul_assign(&pivot_row);
            }
        }
        self.rows[pivot - n] = pivot_row;
        let mut new = row;
        new.negative ^= outcome;
        self.rows[pivot] = new;
        Measurement {
            outcome,
            deterministic: false,
        }
    }

    /// Stabilizer group in reduced row-echelon form with signs, pivoting on
    /// qubit 0's X, then its Z, then qubit 1's X, and so on. Two tableaus
    /// describe the same state iff their canonical forms are equal.
    pub fn canonical_form(&self) -> Vec<PauliOperator> {
        canonical_group(self.rows[self.n..].to_vec())
    }

    /// Commutation and pairing checks; the first broken invariant, if any.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.n;
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let anti = self.rows[i].anticommutes(&self.rows[j]);
                let paired = j == i + n;
                if anti != paired {
                    return Err(format!(
                        "rows {i} and {j} {} but should {}",
                        if anti { "anticommute" } else { "commute" },
                        if paired { "anticommute" } else { "commute" }
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Reduced row-echelon form of a commuting set of signed Paulis.
pub fn canonical_group(mut rows: Vec<PauliRow>) -> Vec<PauliOperator> {
    let Some(n) = rows.first().map(PauliRow::num_qubits) else {
        return Vec::new();
    };
    let mut rank = 0;
    for col in 0..2 * n {
        let (q, want_x) = (col / 2, col % 2 == 0);
        let bit = |r: &PauliRow| {
            let (x, z) = r.get(q);
            if want_x {
                x
            } else {
                z
            }
        };
        let Some(found) = (rank..rows.len()).find(|&r| bit(&rows[r])) else {
            continue;
        };
        rows.swap(rank, found);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && bit(row) {
                row.mul_assign(&pivot);
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows.iter().map(PauliRow::to_operator).collect()
}

/// Product state of the pattern: `Z`, `X` or `Y` stabilizing each qubit.
pub fn prepare(pattern: &InitPattern) -> Tableau {
    let n = pattern.len();
    let mut t = Tableau::new(n);
    for (q, &state) in pattern.states().iter().enumerate() {
        let (sx, sz) = state.stabilizer().bits();
        // Destabilizer: Z for X-like stabilizers, X for Z.
        let (dx, dz) = if sx { (false, true) } else { (true, false) };
        t.rows[q] = PauliRow::identity(n);
        t.rows[q].set(q, dx, dz);
        t.rows[n + q] = PauliRow::identity(n);
        t.rows[n + q].set(q, sx, sz);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::product_phase;
    use crate::surface::{build_layout, injection_pattern, InitState};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn op(n: usize, text: &str) -> PauliOperator {
        PauliOperator::parse(n, text).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    /// Per-qubit reference for the word-level phase routine.
    fn reference_phase(a: &PauliOperator, b: &PauliOperator) -> u8 {
        (0..a.num_qubits())
            .map(|q| {
                let pa = a.get(q).map_or((false, false), Pauli::bits);
                let pb = b.get(q).map_or((false, false), Pauli::bits);
                product_phase(pa, pb)
            })
            .sum::<u8>()
            % 4
    }

    fn pauli_operator(n: usize) -> impl Strategy<Value = PauliOperator> {
        prop::collection::vec(0u8..4, n).prop_map(move |ps| {
            let terms = ps.iter().enumerate().filter_map(|(q, &p)| match p {
                1 => Some((q, Pauli::X)),
                2 => Some((q, Pauli::Y)),
                3 => Some((q, Pauli::Z)),
                _ => None,
            });
            PauliOperator::from_terms(n, terms)
        })
    }

    #[test]
    fn prepare_single_y() {
        let t = prepare(&InitPattern::new(vec![InitState::YState]));
        assert_eq!(t.stabilizers(), vec![op(1, "+Y0")]);
        assert!(t.check_invariants().is_ok());
    }

    #[test]
    fn prepare_zero_plus() {
        let t = prepare(&InitPattern::new(vec![InitState::Zero, InitState::Plus]));
        assert_eq!(t.stabilizers(), vec![op(2, "+Z0"), op(2, "+X1")]);
    }

    #[test]
    fn measure_prepared_eigenstates() {
        let mut t = prepare(&InitPattern::new(vec![InitState::Zero]));
        let m = t.measure(&op(1, "Z0"), None, &mut rng());
        assert_eq!(
            m,
            Measurement {
                outcome: false,
                deterministic: true
            }
        );
        let mut t = prepare(&injection_pattern(&build_layout(5).unwrap()));
        let m = t.measure(&op(25, "Y4"), None, &mut rng());
        assert_eq!(
            m,
            Measurement {
                outcome: false,
                deterministic: true
            }
        );
        assert_eq!(t.peek(&op(25, "-Y4")), Some(true));
    }

    #[test]
    fn repeated_measurement_is_idempotent() {
        let mut r = rng();
        for forced in [false, true] {
            let mut t = prepare(&InitPattern::new(vec![InitState::YState]));
            let first = t.measure(&op(1, "X0"), Some(forced), &mut r);
            assert!(!first.deterministic);
            assert_eq!(first.outcome, forced);
            let second = t.measure(&op(1, "X0"), None, &mut r);
            assert_eq!(
                second,
                Measurement {
                    outcome: forced,
                    deterministic: true
                }
            );
            assert!(t.check_invariants().is_ok());
        }
    }

    #[test]
    fn canonical_form_identifies_groups() {
        let a = vec![
            PauliRow::from_operator(&op(2, "X0 X1")),
            PauliRow::from_operator(&op(2, "Z0 Z1")),
        ];
        let b = vec![
            PauliRow::from_operator(&op(2, "-Y0 Y1")),
            PauliRow::from_operator(&op(2, "X0 X1")),
        ];
        assert_eq!(canonical_group(a), canonical_group(b));
    }

    #[test]
    fn pauli_application_flips_signs() {
        let mut t = prepare(&InitPattern::new(vec![InitState::Zero, InitState::Zero]));
        t.apply_pauli(&op(2, "X1"));
        assert_eq!(t.peek(&op(2, "Z1")), Some(true));
        assert_eq!(t.peek(&op(2, "Z0 Z1")), Some(true));
        assert_eq!(t.peek(&op(2, "X0")), None);
    }

    proptest! {
        #[test]
        fn word_phase_matches_reference(
            (a, b) in prop::sample::select(vec![1usize, 5, 63, 64, 65, 130])
                .prop_flat_map(|n| (pauli_operator(n), pauli_operator(n))),
        ) {
            let mut row = PauliRow::from_operator(&a);
            let k = row.mul_assign_phase(&PauliRow::from_operator(&b)) % 4;
            let (k_ref, product) = a.mul_with_phase(&b);
            prop_assert_eq!(k, reference_phase(&a, &b));
            prop_assert_eq!(k, k_ref);
            prop_assert_eq!(row.to_operator(), product);
        }

        #[test]
        fn random_measurements_keep_invariants(
            ops in prop::collection::vec(pauli_operator(6), 1..20),
            forced in prop::collection::vec(any::<bool>(), 20),
        ) {
            let mut t = prepare(&InitPattern::uniform(6, InitState::Zero));
            let mut r = rng();
            for (p, &f) in ops.iter().zip(&forced) {
                prop_assume!(!p.is_identity());
                let m = t.measure(p, Some(f), &mut r);
                prop_assert!(t.check_invariants().is_ok());
                let again = t.measure(p, None, &mut r);
                prop_assert_eq!(again, Measurement { outcome: m.outcome, deterministic: true });
            }
        }
    }
}
