//! Exact pure-state engine for systems of one to three qubits.
//!
//! Amplitude index `i` is read as a big-endian bitstring: qubit 0 is the most
//! significant bit. All operations return new states; nothing is mutated in
//! place once a [`PureState`] has been handed out.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

/// Complex amplitude of a computational basis state.
pub type Amplitude = Complex64;

/// Largest register the engine accepts.
pub const MAX_QUBITS: usize = 3;

/// Tolerance on state norms and unitarity checks.
pub const NORM_TOL: f64 = 1e-9;

/// Amplitudes (and branch probabilities) below this magnitude count as zero.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcoreError {
    #[error("register of {0} qubits exceeds the {MAX_QUBITS}-qubit limit")]
    TooManyQubits(usize),
    #[error("amplitude vector of length {0} is not 2^n for n in 1..={MAX_QUBITS}")]
    BadLength(usize),
    #[error("state has norm^2 {0}, expected 1")]
    NotNormalized(f64),
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("control and target are both qubit {0}")]
    SameWire(usize),
    #[error("operator is not unitary")]
    NonUnitary,
    #[error("projection onto the requested wire state vanishes")]
    VanishingProjection,
    #[error("invalid basis token `{0}`")]
    BadBasisToken(String),
    #[error("Bloch angles out of range: theta={theta}, phi={phi}")]
    BadBlochAngles { theta: f64, phi: f64 },
}

/// A 2x2 complex matrix acting on one wire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2(pub [[Complex64; 2]; 2]);

impl Matrix2 {
    pub fn real(m: [[f64; 2]; 2]) -> Self {
        Matrix2([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    pub fn identity() -> Self {
        Self::real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn mul(&self, rhs: &Matrix2) -> Matrix2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix2(out)
    }

    pub fn adjoint(&self) -> Matrix2 {
        let a = &self.0;
        Matrix2([
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ])
    }

    /// `U^dagger U == I` entrywise within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = self.adjoint().mul(self);
        let id = Matrix2::identity();
        (0..2).all(|i| (0..2).all(|j| (p.0[i][j] - id.0[i][j]).norm() <= tol))
    }
}

/// Alice's encoding alphabet.
///
/// Declaration order follows the two-bit key mapping `I=00, Z=01, X=10, iY=11`,
/// so the derived `Ord` sorts by key value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliCode {
    I,
    Z,
    X,
    /// `iY`, stored as the real matrix `[[0,1],[-1,0]]`.
    IY,
}

impl PauliCode {
    pub const ALL: [PauliCode; 4] = [PauliCode::I, PauliCode::Z, PauliCode::X, PauliCode::IY];

    pub fn matrix(self) -> Matrix2 {
        match self {
            PauliCode::I => Matrix2::real([[1.0, 0.0], [0.0, 1.0]]),
            PauliCode::X => Matrix2::real([[0.0, 1.0], [1.0, 0.0]]),
            PauliCode::IY => Matrix2::real([[0.0, 1.0], [-1.0, 0.0]]),
            PauliCode::Z => Matrix2::real([[1.0, 0.0], [0.0, -1.0]]),
        }
    }

    /// Key bits carried by this operation.
    pub fn bits(self) -> [u8; 2] {
        match self {
            PauliCode::I => [0, 0],
            PauliCode::Z => [0, 1],
            PauliCode::X => [1, 0],
            PauliCode::IY => [1, 1],
        }
    }

    pub fn from_bits(bits: [u8; 2]) -> Option<PauliCode> {
        PauliCode::ALL.into_iter().find(|op| op.bits() == bits)
    }
}

impl fmt::Display for PauliCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PauliCode::I => "I",
            PauliCode::Z => "Z",
            PauliCode::X => "X",
            PauliCode::IY => "iY",
        })
    }
}

/// Orthonormal single-qubit measurement basis.
///
/// `Bloch { theta, phi }` has eigenstate 0 at `(cos(θ/2), e^{iφ} sin(θ/2))` and
/// eigenstate 1 at `(sin(θ/2), -e^{iφ} cos(θ/2))`. The canonical variants agree
/// with `Bloch(0,0)`, `Bloch(π/2,0)` and `Bloch(π/2,π/2)` up to phase but use
/// exact constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasBasis {
    Z,
    X,
    Y,
    Bloch { theta: f64, phi: f64 },
}

impl MeasBasis {
    pub const CANONICAL: [MeasBasis; 3] = [MeasBasis::Z, MeasBasis::X, MeasBasis::Y];

    /// Checked constructor for a Bloch-parametrized basis.
    pub fn bloch(theta: f64, phi: f64) -> Result<MeasBasis, QcoreError> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(QcoreError::BadBlochAngles { theta, phi });
        }
        Ok(MeasBasis::Bloch { theta, phi })
    }

    pub fn is_canonical(&self) -> bool {
        !matches!(self, MeasBasis::Bloch { .. })
    }

    /// `(θ, φ)` of eigenstate 0.
    pub fn angles(&self) -> (f64, f64) {
        match *self {
            MeasBasis::Z => (0.0, 0.0),
            MeasBasis::X => (PI / 2.0, 0.0),
            MeasBasis::Y => (PI / 2.0, PI / 2.0),
            MeasBasis::Bloch { theta, phi } => (theta, phi),
        }
    }

    /// The canonical basis this basis coincides with, if any.
    pub fn as_canonical(&self) -> Option<MeasBasis> {
        if self.is_canonical() {
            return Some(*self);
        }
        MeasBasis::CANONICAL
            .into_iter()
            .find(|c| self.same_basis(c))
    }

    /// Both bases share the same pair of eigenstates (in either labelling order).
    pub fn same_basis(&self, other: &MeasBasis) -> bool {
        let a = self.eigenvector(0);
        let b0 = other.eigenvector(0);
        let b1 = other.eigenvector(1);
        let overlap = |u: &[Complex64; 2], v: &[Complex64; 2]| {
            (u[0].conj() * v[0] + u[1].conj() * v[1]).norm_sqr()
        };
        (overlap(&a, &b0) - 1.0).abs() < ZERO_TOL || (overlap(&a, &b1) - 1.0).abs() < ZERO_TOL
    }

    fn eigenvector(&self, bit: u8) -> [Complex64; 2] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match (*self, bit & 1) {
            (MeasBasis::Z, 0) => [one, zero],
            (MeasBasis::Z, _) => [zero, one],
            (MeasBasis::X, 0) => [h, h],
            (MeasBasis::X, _) => [h, -h],
            (MeasBasis::Y, 0) => [h, Complex64::new(0.0, FRAC_1_SQRT_2)],
            (MeasBasis::Y, _) => [h, Complex64::new(0.0, -FRAC_1_SQRT_2)],
            (MeasBasis::Bloch { theta, phi }, b) => {
                let (s, c) = (theta / 2.0).sin_cos();
                let e = Complex64::from_polar(1.0, phi);
                if b == 0 {
                    [Complex64::new(c, 0.0), e * s]
                } else {
                    [Complex64::new(s, 0.0), -e * c]
                }
            }
        }
    }

    /// Eigenstate `bit` of this basis as a one-qubit state (not canonicalized).
    pub fn eigenstate(&self, bit: u8) -> PureState {
        PureState {
            amps: self.eigenvector(bit).to_vec(),
        }
    }
}

impl fmt::Display for MeasBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasBasis::Z => f.write_str("Z"),
            MeasBasis::X => f.write_str("X"),
            MeasBasis::Y => f.write_str("Y"),
            MeasBasis::Bloch { theta, phi } => write!(f, "bloch:{theta},{phi}"),
        }
    }
}

impl FromStr for MeasBasis {
    type Err = QcoreError;

    /// Accepts `Z`, `X`, `Y` or `bloch:θ,φ` with angles in radians.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QcoreError::BadBasisToken(s.to_string());
        match s.trim() {
            "Z" | "z" => Ok(MeasBasis::Z),
            "X" | "x" => Ok(MeasBasis::X),
            "Y" | "y" => Ok(MeasBasis::Y),
            t => {
                let rest = t.strip_prefix("bloch:").ok_or_else(bad)?;
                let (th, ph) = rest.split_once(',').ok_or_else(bad)?;
                let theta: f64 = th.trim().parse().map_err(|_| bad())?;
                let phi: f64 = ph.trim().parse().map_err(|_| bad())?;
                MeasBasis::bloch(theta, phi)
            }
        }
    }
}

/// One outcome of a projective measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub outcome: u8,
    pub prob: f64,
    pub post: PureState,
}

/// Normalized pure state of 1 to 3 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Amplitude>,
}

fn bit_of(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

impl PureState {
    /// Validates length, finiteness and normalization.
    pub fn new(amps: Vec<Amplitude>) -> Result<PureState, QcoreError> {
        let n = amps.len();
        if !(n == 2 || n == 4 || n == 8) {
            return Err(QcoreError::BadLength(n));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QcoreError::NonFinite);
        }
        let s = PureState { amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QcoreError::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Real amplitudes, for tests and closed-form comparisons.
    pub fn from_real(amps: &[f64]) -> Result<PureState, QcoreError> {
        PureState::new(amps.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    /// Computational basis state `|index⟩` on `n_qubits` wires.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<PureState, QcoreError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(QcoreError::TooManyQubits(n_qubits));
        }
        let dim = 1 << n_qubits;
        if index >= dim {
            return Err(QcoreError::BadLength(index));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(PureState { amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`; `None` when sizes differ.
    pub fn inner(&self, other: &PureState) -> Option<Complex64> {
        (self.amps.len() == other.amps.len()).then(|| {
            self.amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a.conj() * b)
                .sum()
        })
    }

    /// Rotates the global phase so the first non-negligible amplitude is real positive.
    pub fn canonicalize(&self) -> PureState {
        let Some(lead) = self.amps.iter().find(|a| a.norm() > ZERO_TOL) else {
            return self.clone();
        };
        let rot = lead.conj() / lead.norm();
        let mut amps: Vec<_> = self.amps.iter().map(|a| a * rot).collect();
        if let Some(first) = amps.iter_mut().find(|a| a.norm() > ZERO_TOL) {
            first.im = 0.0;
        }
        PureState { amps }
    }

    /// True iff the states differ by at most `tol` after phase canonicalization.
    pub fn equal_up_to_phase(&self, other: &PureState, tol: f64) -> bool {
        if self.amps.len() != other.amps.len() {
            return false;
        }
        let a = self.canonicalize();
        let b = other.canonicalize();
        let dist: f64 = a
            .amps
            .iter()
            .zip(&b.amps)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        dist.sqrt() <= tol
    }

    /// Kronecker product, `self` on the leading wires.
    pub fn tensor(&self, other: &PureState) -> Result<PureState, QcoreError> {
        let n = self.n_qubits() + other.n_qubits();
        if n > MAX_QUBITS {
            return Err(QcoreError::TooManyQubits(n));
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(PureState { amps })
    }

    fn check_wire(&self, qubit: usize) -> Result<(), QcoreError> {
        let n = self.n_qubits();
        if qubit >= n {
            return Err(QcoreError::QubitOutOfRange { qubit, n_qubits: n });
        }
        Ok(())
    }

    /// Index pairs `(i0, i1)` that differ only in `qubit` (bit 0 and bit 1).
    fn wire_pairs(&self, qubit: usize) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n_qubits();
        let mask = 1 << (n - 1 - qubit);
        (0..self.amps.len())
            .filter(move |i| i & mask == 0)
            .map(move |i| (i, i | mask))
    }

    pub fn apply_1q(&self, op: &Matrix2, qubit: usize) -> Result<PureState, QcoreError> {
        self.check_wire(qubit)?;
        if !op.is_unitary(NORM_TOL) {
            return Err(QcoreError::NonUnitary);
        }
        let m = &op.0;
        let mut amps = self.amps.clone();
        for (i0, i1) in self.wire_pairs(qubit) {
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(PureState { amps })
    }

    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<PureState, QcoreError> {
        self.check_wire(control)?;
        self.check_wire(target)?;
        if control == target {
            return Err(QcoreError::SameWire(control));
        }
        let n = self.n_qubits();
        let tmask = 1 << (n - 1 - target);
        let amps = (0..self.amps.len())
            .map(|i| {
                let src = if bit_of(i, control, n) == 1 {
                    i ^ tmask
                } else {
                    i
                };
                self.amps[src]
            })
            .collect();
        Ok(PureState { amps })
    }

    /// Projective measurement of one wire; zero-probability branches are dropped.
    pub fn measure_branches(
        &self,
        qubit: usize,
        basis: &MeasBasis,
    ) -> Result<Vec<Branch>, QcoreError> {
        self.check_wire(qubit)?;
        let mut out = Vec::with_capacity(2);
        for outcome in 0..2u8 {
            let e = basis.eigenvector(outcome);
            let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
            for (i0, i1) in self.wire_pairs(qubit) {
                let c = e[0].conj() * self.amps[i0] + e[1].conj() * self.amps[i1];
                amps[i0] = e[0] * c;
                amps[i1] = e[1] * c;
            }
            let prob: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if prob < ZERO_TOL {
                continue;
            }
            let scale = 1.0 / prob.sqrt();
            amps.iter_mut().for_each(|a| *a *= scale);
            out.push(Branch {
                outcome,
                prob,
                post: PureState { amps },
            });
        }
        Ok(out)
    }

    /// Contracts `qubit` against the one-qubit state `onto` and drops that wire.
    ///
    /// Used to read off the remaining register once a wire is known to be in a
    /// product state with the rest.
    pub fn project_out(&self, qubit: usize, onto: &PureState) -> Result<PureState, QcoreError> {
        self.check_wire(qubit)?;
        let n = self.n_qubits();
        if n < 2 {
            return Err(QcoreError::BadLength(self.amps.len()));
        }
        if onto.n_qubits() != 1 {
            return Err(QcoreError::BadLength(onto.amps.len()));
        }
        let low = n - 1 - qubit;
        let mut amps = Vec::with_capacity(self.amps.len() / 2);
        for j in 0..(self.amps.len() / 2) {
            let hi = (j >> low) << (low + 1);
            let lo = j & ((1 << low) - 1);
            let i0 = hi | lo;
            let i1 = i0 | (1 << low);
            amps.push(onto.amps[0].conj() * self.amps[i0] + onto.amps[1].conj() * self.amps[i1]);
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm < ZERO_TOL {
            return Err(QcoreError::VanishingProjection);
        }
        let scale = 1.0 / norm.sqrt();
        amps.iter_mut().for_each(|a| *a *= scale);
        Ok(PureState { amps })
    }
}

/// The `bit`-th eigenstate of `basis`, canonicalized.
pub fn make_state(basis: &MeasBasis, bit: u8) -> PureState {
    basis.eigenstate(bit).canonicalize()
}
