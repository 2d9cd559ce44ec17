use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A non-identity single-qubit Pauli.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Symplectic bits `(x, z)`; `Y` has both.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Option<Pauli> {
        match (x, z) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        let (ax, az) = self.bits();
        let (bx, bz) = other.bits();
        (ax & bz) ^ (az & bx)
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            _ => Err(Error::Parse(format!("unknown Pauli {s:?}"))),
        }
    }
}

/// Exponent `k` such that the single-qubit product `a · b = i^k · (a ⊕ b)`,
/// where identity is `(false, false)` and `Y` is the Hermitian `Y`.
pub(crate) fn product_phase(a: (bool, bool), b: (bool, bool)) -> u8 {
    match (Pauli::from_bits(a.0, a.1), Pauli::from_bits(b.0, b.1)) {
        (Some(Pauli::X), Some(Pauli::Y)) => 1,
        (Some(Pauli::Y), Some(Pauli::Z)) => 1,
        (Some(Pauli::Z), Some(Pauli::X)) => 1,
        (Some(Pauli::Y), Some(Pauli::X)) => 3,
        (Some(Pauli::Z), Some(Pauli::Y)) => 3,
        (Some(Pauli::X), Some(Pauli::Z)) => 3,
        _ => 0,
    }
}

/// A signed tensor product of Paulis on `n` qubits, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    n: usize,
    support: BTreeMap<usize, Pauli>,
    negative: bool,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            support: BTreeMap::new(),
            negative: false,
        }
    }

    /// Builds `+P_{q0} P_{q1} ...`. Panics on an out-of-range or repeated qubit.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let mut op = Self::identity(n);
        for (q, p) in terms {
            assert!(q < n, "qubit {q} out of range for {n} qubits");
            let prev = op.support.insert(q, p);
            assert!(prev.is_none(), "qubit {q} listed twice");
        }
        op
    }

    /// The same Pauli on every listed qubit.
    pub fn uniform(n: usize, pauli: Pauli, qubits: impl IntoIterator<Item = usize>) -> Self {
        Self::from_terms(n, qubits.into_iter().map(|q| (q, pauli)))
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn get(&self, q: usize) -> Option<Pauli> {
        self.support.get(&q).copied()
    }

    pub fn support(&self) -> &BTreeMap<usize, Pauli> {
        &self.support
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.support.keys().copied()
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty() && !self.negative
    }

    pub fn commutes_with(&self, other: &PauliOperator) -> bool {
        let anti = self
            .support
            .iter()
            .filter(|(q, p)| other.get(**q).is_some_and(|o| p.anticommutes(o)))
            .count();
        anti % 2 == 0
    }

    /// `self · other` as `(k, P)` with `self · other = i^k · P` and `P`
    /// carrying the combined sign of both factors.
    pub fn mul_with_phase(&self, other: &PauliOperator) -> (u8, PauliOperator) {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        let mut phase = 0u8;
        let mut support = BTreeMap::new();
        let qubits: std::collections::BTreeSet<usize> =
            self.qubits().chain(other.qubits()).collect();
        for q in qubits {
            let a = self.get(q).map_or((false, false), Pauli::bits);
            let b = other.get(q).map_or((false, false), Pauli::bits);
            phase = (phase + product_phase(a, b)) % 4;
            if let Some(p) = Pauli::from_bits(a.0 ^ b.0, a.1 ^ b.1) {
                support.insert(q, p);
            }
        }
        (
            phase,
            PauliOperator {
                n: self.n,
                support,
                negative: self.negative ^ other.negative,
            },
        )
    }

    /// Folds a phase `i^k` with even `k` into the sign. Returns `None` for odd `k`
    /// (the product would not be Hermitian).
    pub fn absorb_phase(self, k: u8) -> Option<PauliOperator> {
        match k % 4 {
            0 => Some(self),
            2 => Some(self.negated()),
            _ => None,
        }
    }
}

impl fmt::Display for PauliOperator {
    /// `+Y4 X0 Z9`-style, qubits ascending.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.negative { '-' } else { '+' })?;
        if self.support.is_empty() {
            return write!(f, "I");
        }
        for (k, (q, p)) in self.support.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", p.symbol(), q)?;
        }
        Ok(())
    }
}

impl PauliOperator {
    /// Parses the [`Display`](fmt::Display) form, e.g. `-X0 Z3`, against `n` qubits.
    pub fn parse(n: usize, text: &str) -> Result<Self, Error> {
        let text = text.trim();
        let (negative, body) = match text.chars().next() {
            Some('-') => (true, &text[1..]),
            Some('+') => (false, &text[1..]),
            _ => (false, text),
        };
        let mut op = Self::identity(n).with_sign(negative);
        for term in body.split_whitespace() {
            if term == "I" {
                continue;
            }
            let (head, idx) = term.split_at(1);
            let pauli: Pauli = head.parse()?;
            let q: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad qubit index in term {term:?}")))?;
            if q >= n {
                return Err(Error::Parse(format!(
                    "qubit {q} out of range for {n} qubits"
                )));
            }
            if op.support.insert(q, pauli).is_some() {
                return Err(Error::Parse(format!("qubit {q} repeated")));
            }
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_products() {
        let x = PauliOperator::from_terms(1, [(0, Pauli::X)]);
        let z = PauliOperator::from_terms(1, [(0, Pauli::Z)]);
        // Z X = i Y
        let (k, p) = z.mul_with_phase(&x);
        assert_eq!(k, 1);
        assert_eq!(p.get(0), Some(Pauli::Y));
        // X Z = -i Y
        let (k, _) = x.mul_with_phase(&z);
        assert_eq!(k, 3);
        let (k, p) = x.mul_with_phase(&x);
        assert_eq!((k, p.weight()), (0, 0));
    }

    #[test]
    fn commutation() {
        let a = PauliOperator::uniform(4, Pauli::Z, [0, 1, 2, 3]);
        let b = PauliOperator::uniform(4, Pauli::X, [0]);
        let c = PauliOperator::uniform(4, Pauli::X, [0, 1]);
        assert!(!a.commutes_with(&b));
        assert!(a.commutes_with(&c));
    }

    #[test]
    fn display_parse_roundtrip() {
        let op =
            PauliOperator::from_terms(9, [(2, Pauli::Y), (0, Pauli::X), (8, Pauli::Z)]).negated();
        let text = op.to_string();
        assert_eq!(text, "-X0 Y2 Z8");
        assert_eq!(PauliOperator::parse(9, &text).unwrap(), op);
        assert!(PauliOperator::parse(3, "X5").is_err());
        assert!(PauliOperator::parse(3, "Q1").is_err());
    }
}
