//! One round of the two-way six-state protocol.
//!
//! Bob prepares a pair of qubits in two different canonical bases and sends it
//! to Alice. In encoding mode Alice applies one Pauli operation to both qubits
//! and returns them; Bob measures each qubit in its preparation basis and reads
//! the operation off the flip pattern. In control mode Alice measures one or
//! both qubits on arrival and the round ends with a public comparison.

use thiserror::Error;

use crate::adversary::{
    infer_from_sets, ira_forward, ira_infer, two_cnot_backward, two_cnot_forward, AdversaryError,
    EveObservation, EveStrategy, Inference, QubitAttack, QubitObservation, BOB_WIRE,
};
use crate::chooser::Chooser;
use crate::qcore::{MeasBasis, PauliCode, PureState, QcoreError, NORM_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error("pair bases must differ, both are {0}")]
    SameBasis(MeasBasis),
    #[error("preparation basis {0} is not canonical")]
    NonCanonical(MeasBasis),
    #[error("bit value {0} is not 0 or 1")]
    BadBit(u8),
    #[error("control round measures no qubit")]
    EmptyControl,
}

/// Whether `op` exchanges the two eigenstates of `basis` (up to phase).
pub fn flips(op: PauliCode, basis: &MeasBasis) -> bool {
    let m = op.matrix();
    (0..2u8).all(|bit| {
        basis
            .eigenstate(bit)
            .apply_1q(&m, 0)
            .map(|s| s.equal_up_to_phase(&basis.eigenstate(1 - bit), NORM_TOL))
            .unwrap_or(false)
    })
}

/// The unique operation with the given flip pattern on two distinct canonical bases.
pub fn decode_pair(
    basis1: MeasBasis,
    basis2: MeasBasis,
    flip1: bool,
    flip2: bool,
) -> Result<PauliCode, ProtocolError> {
    for b in [basis1, basis2] {
        if !b.is_canonical() {
            return Err(ProtocolError::NonCanonical(b));
        }
    }
    if basis1 == basis2 {
        return Err(ProtocolError::SameBasis(basis1));
    }
    let mut hits = PauliCode::ALL
        .into_iter()
        .filter(|&op| flips(op, &basis1) == flip1 && flips(op, &basis2) == flip2);
    let op = hits
        .next()
        .expect("flip patterns on distinct canonical bases are bijective");
    debug_assert!(hits.next().is_none());
    Ok(op)
}

/// The six ordered pairs of distinct canonical bases.
pub const ORDERED_BASIS_PAIRS: [[MeasBasis; 2]; 6] = [
    [MeasBasis::Z, MeasBasis::X],
    [MeasBasis::Z, MeasBasis::Y],
    [MeasBasis::X, MeasBasis::Z],
    [MeasBasis::X, MeasBasis::Y],
    [MeasBasis::Y, MeasBasis::Z],
    [MeasBasis::Y, MeasBasis::X],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPreparation {
    bases: [MeasBasis; 2],
    bits: [u8; 2],
}

impl PairPreparation {
    pub fn new(bases: [MeasBasis; 2], bits: [u8; 2]) -> Result<Self, ProtocolError> {
        for b in bases {
            if !b.is_canonical() {
                return Err(ProtocolError::NonCanonical(b));
            }
        }
        if bases[0] == bases[1] {
            return Err(ProtocolError::SameBasis(bases[0]));
        }
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(ProtocolError::BadBit(bad));
        }
        Ok(PairPreparation { bases, bits })
    }

    /// All 24 preparations: 6 ordered basis pairs times 4 bit pairs.
    pub fn all() -> Vec<PairPreparation> {
        ORDERED_BASIS_PAIRS
            .iter()
            .flat_map(|&bases| {
                (0..4u8).map(move |k| PairPreparation {
                    bases,
                    bits: [k >> 1, k & 1],
                })
            })
            .collect()
    }

    pub fn bases(&self) -> [MeasBasis; 2] {
        self.bases
    }

    pub fn bits(&self) -> [u8; 2] {
        self.bits
    }

    pub fn states(&self) -> [PureState; 2] {
        [0, 1].map(|q| self.bases[q].eigenstate(self.bits[q]).canonicalize())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoundMode {
    Encoding,
    /// Alice's measurement basis per qubit; `None` leaves that qubit alone.
    Control {
        bases: [Option<MeasBasis>; 2],
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlResult {
    pub qubit: usize,
    pub alice_basis: MeasBasis,
    pub alice_outcome: u8,
    /// Alice's basis coincides with Bob's preparation basis.
    pub conclusive: bool,
    /// Conclusive and Alice's outcome differs from Bob's bit.
    pub detected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub prep: PairPreparation,
    pub mode: RoundMode,
    pub alice_op: Option<PauliCode>,
    pub bob_flips: Option<[bool; 2]>,
    pub bob_decoded: Option<PauliCode>,
    pub control: Vec<ControlResult>,
    pub eve: EveObservation,
}

impl RoundRecord {
    pub fn decoded_correctly(&self) -> Option<bool> {
        Some(self.bob_decoded? == self.alice_op?)
    }

    pub fn any_detected(&self) -> bool {
        self.control.iter().any(|c| c.detected)
    }
}

/// Plays one round. `alice_op` is ignored in control mode.
///
/// Every random event (Eve's and Alice's measurements, Bob's readout) is
/// resolved through `chooser`, in a fixed order.
pub fn run_round(
    prep: &PairPreparation,
    mode: &RoundMode,
    alice_op: PauliCode,
    strategy: &EveStrategy,
    chooser: &mut dyn Chooser,
) -> Result<RoundRecord, ProtocolError> {
    let mut eve = EveObservation::default();
    let mut flight: [PureState; 2] = prep.states();

    // Forward trip.
    for q in 0..2 {
        match strategy.attack_on(q) {
            QubitAttack::Pass => {}
            QubitAttack::Measure(basis) => {
                let (forward, resent) = ira_forward(&flight[q], &basis, chooser)?;
                eve.qubits[q] = QubitObservation::Ira {
                    forward,
                    backward: None,
                };
                flight[q] = resent;
            }
            QubitAttack::Cnot(variant) => {
                flight[q] = two_cnot_forward(&flight[q], variant)?;
                eve.qubits[q] = QubitObservation::TwoCnot {
                    ancilla: None,
                    set: None,
                };
            }
        }
    }

    let mut record = RoundRecord {
        prep: *prep,
        mode: *mode,
        alice_op: None,
        bob_flips: None,
        bob_decoded: None,
        control: Vec::new(),
        eve,
    };

    if let RoundMode::Control { bases } = mode {
        if bases.iter().all(Option::is_none) {
            return Err(ProtocolError::EmptyControl);
        }
        for (q, basis) in bases.iter().enumerate() {
            let Some(alice_basis) = basis else { continue };
            let branches = flight[q].measure_branches(BOB_WIRE, alice_basis)?;
            let probs: Vec<f64> = branches.iter().map(|b| b.prob).collect();
            let outcome = branches[chooser.choose(&probs)].outcome;
            let conclusive = alice_basis.same_basis(&prep.bases[q]);
            record.control.push(ControlResult {
                qubit: q,
                alice_basis: *alice_basis,
                alice_outcome: outcome,
                conclusive,
                detected: conclusive && outcome != prep.bits[q],
            });
        }
        return Ok(record);
    }

    record.alice_op = Some(alice_op);
    let m = alice_op.matrix();
    for state in flight.iter_mut() {
        *state = state.apply_1q(&m, BOB_WIRE)?;
    }

    // Return trip.
    let mut sets = [None, None];
    for q in 0..2 {
        match strategy.attack_on(q) {
            QubitAttack::Pass => {}
            QubitAttack::Measure(basis) => {
                let (backward, resent) = ira_forward(&flight[q], &basis, chooser)?;
                if let QubitObservation::Ira { backward: slot, .. } = &mut record.eve.qubits[q] {
                    *slot = Some(backward);
                }
                flight[q] = resent;
            }
            QubitAttack::Cnot(variant) => {
                let readout = two_cnot_backward(&flight[q], variant)?;
                record.eve.qubits[q] = QubitObservation::TwoCnot {
                    ancilla: Some(readout.ancilla),
                    set: Some(readout.set),
                };
                sets[q] = Some(readout.set);
                flight[q] = readout.bob;
            }
        }
    }

    let mut bob_flips = [false; 2];
    for q in 0..2 {
        let branches = flight[q].measure_branches(BOB_WIRE, &prep.bases[q])?;
        let probs: Vec<f64> = branches.iter().map(|b| b.prob).collect();
        let outcome = branches[chooser.choose(&probs)].outcome;
        bob_flips[q] = outcome != prep.bits[q];
    }
    record.bob_flips = Some(bob_flips);
    record.bob_decoded = Some(decode_pair(
        prep.bases[0],
        prep.bases[1],
        bob_flips[0],
        bob_flips[1],
    )?);

    record.eve.inferred = match strategy {
        EveStrategy::None => Inference::Nothing,
        EveStrategy::InterceptResend { bases } => {
            if bases.iter().all(MeasBasis::is_canonical) {
                let f = record
                    .eve
                    .qubits
                    .map(|o| o.flip_in_eve_basis().unwrap_or(false));
                ira_infer(*bases, f[0], f[1])?
            } else {
                Inference::Nothing
            }
        }
        EveStrategy::TwoCnot { .. } => infer_from_sets(sets)?,
    };
    Ok(record)
}
