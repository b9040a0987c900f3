//! Eve's strategies: intercept-resend in arbitrary bases and the double-CNOT
//! ancilla attack in its two wirings.
//!
//! Wire convention for joint states: Bob's travelling qubit is wire 0 and
//! Eve's ancilla is wire 1.

use std::fmt;

use thiserror::Error;

use crate::chooser::Chooser;
use crate::protocol::{decode_pair, flips};
use crate::qcore::{MeasBasis, PauliCode, PureState, QcoreError};

pub const BOB_WIRE: usize = 0;
pub const EVE_WIRE: usize = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error("intercept-resend inference needs canonical bases, got {0}")]
    NonCanonical(MeasBasis),
    #[error("same-basis intercept saw different flips on the two qubits")]
    InconsistentFlips,
    #[error("{0:?} ancilla readout has {1} branches, expected exactly one")]
    NonDeterministicAncilla(Variant, usize),
    #[error("sets {0} and {1} do not intersect in exactly one operation")]
    BadSetPair(CnotSet, CnotSet),
    #[error("expected a {expected}-qubit state, got {got}")]
    WrongSize { expected: usize, got: usize },
}

/// Wiring of one double-CNOT execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Ancilla `|0⟩`, Bob's qubit controls, ancilla read out in Z.
    V1,
    /// Ancilla `|x+⟩`, ancilla controls, ancilla read out in X.
    V2,
}

impl Variant {
    fn ancilla(self) -> MeasBasis {
        match self {
            Variant::V1 => MeasBasis::Z,
            Variant::V2 => MeasBasis::X,
        }
    }

    fn wiring(self) -> (usize, usize) {
        match self {
            Variant::V1 => (BOB_WIRE, EVE_WIRE),
            Variant::V2 => (EVE_WIRE, BOB_WIRE),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::V1 => "v1",
            Variant::V2 => "v2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EveStrategy {
    None,
    InterceptResend { bases: [MeasBasis; 2] },
    TwoCnot { variants: [Option<Variant>; 2] },
}

/// What Eve does to one travelling qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitAttack {
    Pass,
    Measure(MeasBasis),
    Cnot(Variant),
}

impl EveStrategy {
    pub fn attack_on(&self, qubit: usize) -> QubitAttack {
        match self {
            EveStrategy::None => QubitAttack::Pass,
            EveStrategy::InterceptResend { bases } => QubitAttack::Measure(bases[qubit]),
            EveStrategy::TwoCnot { variants } => {
                variants[qubit].map_or(QubitAttack::Pass, QubitAttack::Cnot)
            }
        }
    }

    /// Short scenario name: `none`, `ira`, `ira-same` or `2cnot`.
    pub fn name(&self) -> &'static str {
        match self {
            EveStrategy::None => "none",
            EveStrategy::InterceptResend { bases } if bases[0].same_basis(&bases[1]) => "ira-same",
            EveStrategy::InterceptResend { .. } => "ira",
            EveStrategy::TwoCnot { .. } => "2cnot",
        }
    }

    /// Strategy parameters in CLI token form.
    pub fn parameters(&self) -> String {
        match self {
            EveStrategy::None => String::new(),
            EveStrategy::InterceptResend { bases } => {
                if bases.iter().all(MeasBasis::is_canonical) {
                    format!("{}{}", bases[0], bases[1])
                } else {
                    format!("{}/{}", bases[0], bases[1])
                }
            }
            EveStrategy::TwoCnot { variants } => variants
                .iter()
                .map(|v| v.map_or("skip".to_string(), |v| v.to_string()))
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

/// The operation classes a single double-CNOT execution can tell apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CnotSet {
    S11,
    S12,
    S21,
    S22,
}

impl CnotSet {
    pub fn members(self) -> [PauliCode; 2] {
        match self {
            CnotSet::S11 => [PauliCode::I, PauliCode::Z],
            CnotSet::S12 => [PauliCode::X, PauliCode::IY],
            CnotSet::S21 => [PauliCode::I, PauliCode::X],
            CnotSet::S22 => [PauliCode::Z, PauliCode::IY],
        }
    }

    pub fn contains(self, op: PauliCode) -> bool {
        self.members().contains(&op)
    }

    pub fn from_readout(variant: Variant, outcome: u8) -> CnotSet {
        match (variant, outcome) {
            (Variant::V1, 0) => CnotSet::S11,
            (Variant::V1, _) => CnotSet::S12,
            (Variant::V2, 0) => CnotSet::S21,
            (Variant::V2, _) => CnotSet::S22,
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            CnotSet::S11 | CnotSet::S12 => Variant::V1,
            CnotSet::S21 | CnotSet::S22 => Variant::V2,
        }
    }
}

impl fmt::Display for CnotSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Eve's record for one travelling qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitObservation {
    Untouched,
    /// `backward` is absent in control rounds, which end before the return trip.
    Ira {
        forward: u8,
        backward: Option<u8>,
    },
    TwoCnot {
        ancilla: Option<u8>,
        set: Option<CnotSet>,
    },
}

impl QubitObservation {
    /// Whether Alice flipped the state within Eve's basis.
    pub fn flip_in_eve_basis(&self) -> Option<bool> {
        match self {
            QubitObservation::Ira {
                forward,
                backward: Some(b),
            } => Some(forward != b),
            _ => None,
        }
    }
}

/// Eve's conclusion about Alice's operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Inference {
    Nothing,
    /// Sorted pair of candidates.
    Ambiguous([PauliCode; 2]),
    Exact(PauliCode),
}

impl Inference {
    pub fn admits(&self, op: PauliCode) -> bool {
        match self {
            Inference::Nothing => true,
            Inference::Ambiguous(set) => set.contains(&op),
            Inference::Exact(o) => *o == op,
        }
    }
}

impl fmt::Display for Inference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inference::Nothing => f.write_str("?"),
            Inference::Ambiguous([a, b]) => write!(f, "{{{a},{b}}}"),
            Inference::Exact(op) => write!(f, "{op}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EveObservation {
    pub qubits: [QubitObservation; 2],
    pub inferred: Inference,
}

impl Default for EveObservation {
    fn default() -> Self {
        EveObservation {
            qubits: [QubitObservation::Untouched; 2],
            inferred: Inference::Nothing,
        }
    }
}

fn expect_size(state: &PureState, n: usize) -> Result<(), AdversaryError> {
    if state.n_qubits() != n {
        return Err(AdversaryError::WrongSize {
            expected: n,
            got: state.n_qubits(),
        });
    }
    Ok(())
}

/// Measures a travelling qubit in `basis` and resends the collapsed eigenstate.
///
/// Also serves the backward pass, which uses the same basis.
pub fn ira_forward(
    state: &PureState,
    basis: &MeasBasis,
    chooser: &mut dyn Chooser,
) -> Result<(u8, PureState), AdversaryError> {
    expect_size(state, 1)?;
    let branches = state.measure_branches(0, basis)?;
    let probs: Vec<f64> = branches.iter().map(|b| b.prob).collect();
    let pick = &branches[chooser.choose(&probs)];
    Ok((pick.outcome, basis.eigenstate(pick.outcome).canonicalize()))
}

/// Eve's decoding from the flips she observed in her own two bases.
pub fn ira_infer(
    bases: [MeasBasis; 2],
    flip1: bool,
    flip2: bool,
) -> Result<Inference, AdversaryError> {
    let [b1, b2] = bases;
    for b in &bases {
        if !b.is_canonical() {
            return Err(AdversaryError::NonCanonical(*b));
        }
    }
    if b1 != b2 {
        let op = decode_pair(b1, b2, flip1, flip2).map_err(|_| AdversaryError::NonCanonical(b1))?;
        return Ok(Inference::Exact(op));
    }
    if flip1 != flip2 {
        return Err(AdversaryError::InconsistentFlips);
    }
    let mut set = PauliCode::ALL
        .into_iter()
        .filter(|&op| flips(op, &b1) == flip1);
    match (set.next(), set.next(), set.next()) {
        (Some(a), Some(b), None) => Ok(Inference::Ambiguous([a, b])),
        _ => Err(AdversaryError::NonCanonical(b1)),
    }
}

/// First CNOT of the attack: attaches Eve's ancilla on wire 1.
pub fn two_cnot_forward(bob: &PureState, variant: Variant) -> Result<PureState, AdversaryError> {
    expect_size(bob, 1)?;
    let ancilla = variant.ancilla().eigenstate(0);
    let (control, target) = variant.wiring();
    Ok(bob.tensor(&ancilla)?.apply_cnot(control, target)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnotReadout {
    pub set: CnotSet,
    pub bob: PureState,
    pub ancilla: u8,
}

/// Second CNOT followed by the ancilla readout.
///
/// For any state coming out of [`two_cnot_forward`] and one of Alice's
/// operations the readout is certain; anything else is reported as an error.
pub fn two_cnot_backward(
    joint: &PureState,
    variant: Variant,
) -> Result<CnotReadout, AdversaryError> {
    expect_size(joint, 2)?;
    let (control, target) = variant.wiring();
    let basis = variant.ancilla();
    let undone = joint.apply_cnot(control, target)?;
    let branches = undone.measure_branches(EVE_WIRE, &basis)?;
    if branches.len() != 1 {
        return Err(AdversaryError::NonDeterministicAncilla(
            variant,
            branches.len(),
        ));
    }
    let ancilla = branches[0].outcome;
    let bob = branches[0]
        .post
        .project_out(EVE_WIRE, &basis.eigenstate(ancilla))?;
    Ok(CnotReadout {
        set: CnotSet::from_readout(variant, ancilla),
        bob,
        ancilla,
    })
}

/// The single operation lying in both a V1 set and a V2 set.
pub fn combine_sets(first: CnotSet, second: CnotSet) -> Result<PauliCode, AdversaryError> {
    let bad = || AdversaryError::BadSetPair(first, second);
    if first.variant() != Variant::V1 || second.variant() != Variant::V2 {
        return Err(bad());
    }
    let mut common = first
        .members()
        .into_iter()
        .filter(|op| second.contains(*op));
    match (common.next(), common.next()) {
        (Some(op), None) => Ok(op),
        _ => Err(bad()),
    }
}

/// Eve's conclusion from the sets read on the two qubits of a pair.
pub fn infer_from_sets(sets: [Option<CnotSet>; 2]) -> Result<Inference, AdversaryError> {
    match sets {
        [None, None] => Ok(Inference::Nothing),
        [Some(s), None] | [None, Some(s)] => Ok(Inference::Ambiguous(s.members())),
        [Some(a), Some(b)] if a.variant() == b.variant() => {
            if a != b {
                return Err(AdversaryError::BadSetPair(a, b));
            }
            Ok(Inference::Ambiguous(a.members()))
        }
        [Some(a), Some(b)] => {
            let (v1, v2) = if a.variant() == Variant::V1 {
                (a, b)
            } else {
                (b, a)
            };
            Ok(Inference::Exact(combine_sets(v1, v2)?))
        }
    }
}
