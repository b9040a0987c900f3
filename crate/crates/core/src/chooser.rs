//! Branch resolution for protocol rounds.
//!
//! Every random decision in a round (preparation, Alice's operation, every
//! measurement outcome) goes through a [`Chooser`]. A [`SampleChooser`] draws
//! one alternative from a seeded stream; [`for_each_branch`] instead replays the
//! round once per path through the decision tree and reports each leaf with
//! its exact probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub trait Chooser {
    /// Picks an index into `probs`, which sums to 1.
    fn choose(&mut self, probs: &[f64]) -> usize;

    fn choose_uniform(&mut self, n: usize) -> usize {
        let p = 1.0 / n as f64;
        let probs = vec![p; n];
        self.choose(&probs)
    }
}

/// Samples from a ChaCha8 stream.
#[derive(Debug, Clone)]
pub struct SampleChooser {
    rng: ChaCha8Rng,
}

impl SampleChooser {
    /// Independent substream `stream` of `seed`.
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SampleChooser { rng }
    }
}

impl Chooser for SampleChooser {
    fn choose(&mut self, probs: &[f64]) -> usize {
        if probs.len() <= 1 {
            return 0;
        }
        let r: f64 = self.rng.random();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                return i;
            }
        }
        // r landed in the rounding gap above the cumulative sum.
        probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }
}

/// Follows a fixed prefix of choices, then takes the first alternative,
/// recording arities and the accumulated path probability.
#[derive(Debug, Clone, Default)]
pub struct PathChooser {
    path: Vec<usize>,
    arity: Vec<usize>,
    pos: usize,
    weight: f64,
}

impl PathChooser {
    fn replay(path: Vec<usize>) -> Self {
        PathChooser {
            path,
            arity: Vec::new(),
            pos: 0,
            weight: 1.0,
        }
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Choices taken so far.
    pub fn path(&self) -> &[usize] {
        &self.path[..self.pos]
    }
}

impl Chooser for PathChooser {
    fn choose(&mut self, probs: &[f64]) -> usize {
        if self.pos == self.path.len() {
            self.path.push(0);
        }
        let idx = self.path[self.pos];
        self.arity.push(probs.len());
        self.weight *= probs[idx];
        self.pos += 1;
        idx
    }
}

/// Runs `round` once per leaf of its decision tree, depth first.
///
/// `round` must be a deterministic function of the choices it receives.
/// `visit` gets each leaf's probability and result. Returns the leaf count.
pub fn for_each_branch<T, E>(
    mut round: impl FnMut(&mut dyn Chooser) -> Result<T, E>,
    mut visit: impl FnMut(f64, T),
) -> Result<usize, E> {
    let mut path = Vec::new();
    let mut leaves = 0;
    loop {
        let mut chooser = PathChooser::replay(path);
        let out = round(&mut chooser)?;
        visit(chooser.weight, out);
        leaves += 1;

        let PathChooser {
            path: mut taken,
            arity,
            pos,
            ..
        } = chooser;
        taken.truncate(pos);
        // Odometer step: bump the deepest choice that still has siblings.
        loop {
            match taken.pop() {
                None => return Ok(leaves),
                Some(last) => {
                    if last + 1 < arity[taken.len()] {
                        taken.push(last + 1);
                        break;
                    }
                }
            }
        }
        path = taken;
    }
}
