//! Point-selection policies over a finite candidate set.
//!
//! Every selector breaks ties toward the lowest candidate index.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::gp::{CandidatePosterior, PosteriorSummary};
use crate::rng::StreamRng;

/// Read access to the posterior at each candidate.
pub trait PosteriorView {
    fn len(&self) -> usize;
    fn summary(&self, i: usize) -> PosteriorSummary;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl PosteriorView for [PosteriorSummary] {
    fn len(&self) -> usize {
        <[PosteriorSummary]>::len(self)
    }

    fn summary(&self, i: usize) -> PosteriorSummary {
        self[i]
    }
}

impl PosteriorView for Vec<PosteriorSummary> {
    fn len(&self) -> usize {
        <[PosteriorSummary]>::len(self)
    }

    fn summary(&self, i: usize) -> PosteriorSummary {
        self[i]
    }
}

impl PosteriorView for CandidatePosterior {
    fn len(&self) -> usize {
        CandidatePosterior::len(self)
    }

    fn summary(&self, i: usize) -> PosteriorSummary {
        CandidatePosterior::summary(self, i)
    }
}

fn argmax_by(indices: impl Iterator<Item = usize>, mut score: impl FnMut(usize) -> f64) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for i in indices {
        let s = score(i);
        match best {
            Some((_, b)) if s <= b || s.is_nan() => {}
            _ => best = Some((i, s)),
        }
    }
    best.expect("selection over an empty candidate set").0
}

/// `argmax mu + beta_sqrt * sigma`.
pub fn select_ucb<P: PosteriorView + ?Sized>(post: &P, beta_sqrt: f64) -> usize {
    assert!(!post.is_empty(), "candidate set must be non-empty");
    argmax_by(0..post.len(), |i| {
        let s = post.summary(i);
        s.mean + beta_sqrt * s.std
    })
}

/// Closed-form expected improvement over the incumbent `y_best`.
pub fn expected_improvement(summary: PosteriorSummary, y_best: f64) -> f64 {
    let gap = summary.mean - y_best;
    if summary.std <= 1e-12 {
        return gap.max(0.0);
    }
    let z = gap / summary.std;
    let normal = Normal::standard();
    gap * normal.cdf(z) + summary.std * normal.pdf(z)
}

/// `argmax EI`. Before any observation there is no incumbent and the first
/// candidate is returned.
pub fn select_ei<P: PosteriorView + ?Sized>(post: &P, y_best: Option<f64>) -> usize {
    assert!(!post.is_empty(), "candidate set must be non-empty");
    match y_best {
        None => 0,
        Some(best) => argmax_by(0..post.len(), |i| {
            expected_improvement(post.summary(i), best)
        }),
    }
}

/// `argmax sigma`.
pub fn select_mvr<P: PosteriorView + ?Sized>(post: &P) -> usize {
    assert!(!post.is_empty(), "candidate set must be non-empty");
    argmax_by(0..post.len(), |i| post.summary(i).std)
}

pub fn select_uniform(num_candidates: usize, rng: &mut impl Rng) -> usize {
    assert!(num_candidates >= 1, "candidate set must be non-empty");
    rng.random_range(0..num_candidates)
}

/// Phased elimination baseline.
///
/// Within a phase the policy queries maximum-variance survivors. Once a
/// phase has used its batch, every survivor whose upper confidence bound
/// falls below the best surviving lower confidence bound is dropped and the
/// batch size doubles. This schedule is a reconstruction, not a canonical
/// implementation.
#[derive(Debug, Clone)]
pub struct PhasedElimination {
    survivors: Vec<usize>,
    batch: usize,
    steps_in_phase: usize,
    phase: usize,
}

impl PhasedElimination {
    pub fn new(num_candidates: usize, initial_batch: usize) -> Self {
        assert!(num_candidates >= 1, "candidate set must be non-empty");
        assert!(initial_batch >= 1, "initial batch must be >= 1");
        PhasedElimination {
            survivors: (0..num_candidates).collect(),
            batch: initial_batch,
            steps_in_phase: 0,
            phase: 1,
        }
    }

    pub fn survivors(&self) -> &[usize] {
        &self.survivors
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    /// Drops survivors whose UCB is below the best surviving LCB.
    pub fn eliminate<P: PosteriorView + ?Sized>(&mut self, post: &P, beta_sqrt: f64) {
        let max_lcb = self
            .survivors
            .iter()
            .map(|&i| {
                let s = post.summary(i);
                s.mean - beta_sqrt * s.std
            })
            .fold(f64::NEG_INFINITY, f64::max);
        self.survivors.retain(|&i| {
            let s = post.summary(i);
            s.mean + beta_sqrt * s.std >= max_lcb
        });
        debug_assert!(!self.survivors.is_empty());
    }

    pub fn select<P: PosteriorView + ?Sized>(&mut self, post: &P, beta_sqrt: f64) -> usize {
        if self.steps_in_phase == self.batch {
            self.eliminate(post, beta_sqrt);
            self.batch *= 2;
            self.steps_in_phase = 0;
            self.phase += 1;
        }
        self.steps_in_phase += 1;
        argmax_by(self.survivors.iter().copied(), |i| post.summary(i).std)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Ucb,
    Ei,
    Mvr,
    Pe,
    Uniform,
    /// Reserved name; selecting it is an error.
    Reds,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Ucb => "ucb",
            PolicyKind::Ei => "ei",
            PolicyKind::Mvr => "mvr",
            PolicyKind::Pe => "pe",
            PolicyKind::Uniform => "uniform",
            PolicyKind::Reds => "reds",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ucb" | "gp-ucb" => Ok(PolicyKind::Ucb),
            "ei" => Ok(PolicyKind::Ei),
            "mvr" => Ok(PolicyKind::Mvr),
            "pe" => Ok(PolicyKind::Pe),
            "uniform" | "random" => Ok(PolicyKind::Uniform),
            "reds" => Ok(PolicyKind::Reds),
            other => Err(Error::InvalidConfig(format!("unknown policy `{other}`"))),
        }
    }
}

fn default_pe_batch() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    #[serde(default = "default_pe_batch")]
    pub pe_initial_batch: usize,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind) -> Self {
        PolicyConfig {
            kind,
            pe_initial_batch: default_pe_batch(),
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn validate(&self) -> Result<()> {
        if self.pe_initial_batch == 0 {
            return Err(Error::InvalidConfig("pe_initial_batch must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum PolicyState {
    Stateless,
    Elimination(PhasedElimination),
}

/// A configured policy with its run-local state.
#[derive(Debug, Clone)]
pub struct Policy {
    kind: PolicyKind,
    beta_sqrt: f64,
    state: PolicyState,
    rng: StreamRng,
}

impl Policy {
    pub fn new(
        config: &PolicyConfig,
        beta_sqrt: f64,
        num_candidates: usize,
        rng: StreamRng,
    ) -> Result<Self> {
        config.validate()?;
        if beta_sqrt.is_nan() || beta_sqrt < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "beta_sqrt must be non-negative (got {beta_sqrt})"
            )));
        }
        let state = match config.kind {
            PolicyKind::Reds => return Err(Error::UnimplementedBaseline("reds".into())),
            PolicyKind::Pe => PolicyState::Elimination(PhasedElimination::new(
                num_candidates,
                config.pe_initial_batch,
            )),
            _ => PolicyState::Stateless,
        };
        Ok(Policy {
            kind: config.kind,
            beta_sqrt,
            state,
            rng,
        })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn beta_sqrt(&self) -> f64 {
        self.beta_sqrt
    }

    pub fn elimination(&self) -> Option<&PhasedElimination> {
        match &self.state {
            PolicyState::Elimination(pe) => Some(pe),
            PolicyState::Stateless => None,
        }
    }

    pub fn select(&mut self, post: &CandidatePosterior) -> usize {
        match (&mut self.state, self.kind) {
            (PolicyState::Elimination(pe), _) => pe.select(post, self.beta_sqrt),
            (_, PolicyKind::Ucb) => select_ucb(post, self.beta_sqrt),
            (_, PolicyKind::Ei) => select_ei(post, post.history().best_value()),
            (_, PolicyKind::Mvr) => select_mvr(post),
            (_, PolicyKind::Uniform) => select_uniform(post.len(), &mut self.rng),
            (_, PolicyKind::Pe) | (_, PolicyKind::Reds) => unreachable!("rejected in Policy::new"),
        }
    }
}
