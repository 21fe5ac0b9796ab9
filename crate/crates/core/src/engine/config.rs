// SPDX-License-Identifier: Apache-2.0

use core::fmt;
use core::str::FromStr;

use crate::hashtable::ProbeStrategy;

/// How `lpa_move` visits vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ExecMode {
    /// Asynchronous in-place updates spread over the executor's workers.
    /// Low-degree vertices run first, then high-degree vertices.
    #[default]
    Parallel,
    /// Asynchronous in-place updates on one worker in ascending id order.
    Sequential,
    /// Every candidate label is computed from the labels at the start of the
    /// pass, then all changes are applied together.
    Synchronous,
}

impl ExecMode {
    pub const ALL: [ExecMode; 3] = [
        ExecMode::Parallel,
        ExecMode::Sequential,
        ExecMode::Synchronous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExecMode::Parallel => "parallel",
            ExecMode::Sequential => "sequential",
            ExecMode::Synchronous => "synchronous",
        }
    }
}

/// Width of hashtable values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Precision {
    #[default]
    F32,
    F64,
}

impl Precision {
    pub const ALL: [Precision; 2] = [Precision::F32, Precision::F64];

    pub fn bits(self) -> u32 {
        match self {
            Precision::F32 => 32,
            Precision::F64 => 64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Precision::F32 => "32",
            Precision::F64 => "64",
        }
    }
}

macro_rules! named_enum {
    ($ty:ty, $what:literal) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = alloc::string::String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                <$ty>::ALL
                    .into_iter()
                    .find(|x| x.name() == s)
                    .ok_or_else(|| alloc::format!(concat!("unknown ", $what, " `{}`"), s))
            }
        }
    };
}

named_enum!(ExecMode, "execution mode");
named_enum!(Precision, "precision");

#[derive(Debug, Clone, PartialEq)]
pub struct LpaConfig {
    /// Convergence threshold on the fraction of changed vertices.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Pick-less passes run on iterations `l` with `l % pl_period == 0`.
    /// Zero disables them.
    pub pl_period: usize,
    /// Cross-check runs after iterations `l` with `l % cc_period == 0`.
    /// Zero disables it.
    pub cc_period: usize,
    pub strategy: ProbeStrategy,
    /// Vertices with degree below this take the scalar path; the rest are
    /// processed by a team with shared hashtable operations.
    pub switch_degree: usize,
    pub precision: Precision,
    pub exec_mode: ExecMode,
    /// Requested worker count; zero means "all available". Only the
    /// executor built by the caller honours this.
    pub workers: usize,
    /// Recorded with results; label propagation itself is deterministic up to
    /// scheduling.
    pub seed: u64,
    /// Skip vertices whose neighbourhood has not changed since they were last
    /// processed.
    pub pruning: bool,
}

impl Default for LpaConfig {
    fn default() -> Self {
        LpaConfig {
            tolerance: 0.05,
            max_iterations: 20,
            pl_period: 4,
            cc_period: 0,
            strategy: ProbeStrategy::QuadraticDouble,
            switch_degree: 32,
            precision: Precision::F32,
            exec_mode: ExecMode::Parallel,
            workers: 0,
            seed: 0,
            pruning: true,
        }
    }
}

impl LpaConfig {
    pub fn sequential() -> Self {
        LpaConfig {
            exec_mode: ExecMode::Sequential,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.tolerance > 0.0 && self.tolerance <= 1.0) {
            return Err("tolerance must be in (0, 1]");
        }
        if self.switch_degree < 2 {
            return Err("switch degree must be at least 2");
        }
        Ok(())
    }

    #[inline]
    pub fn is_pick_less(&self, iteration: usize) -> bool {
        self.pl_period > 0 && iteration.is_multiple_of(self.pl_period)
    }

    #[inline]
    pub fn is_cross_check(&self, iteration: usize) -> bool {
        self.cc_period > 0 && iteration.is_multiple_of(self.cc_period)
    }
}
