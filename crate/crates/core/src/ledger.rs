//! Query accounting.
//!
//! A [`QueryLedger`] is an append-only log of oracle invocations. Callers
//! group invocations into parallel layers with [`QueryLedger::begin_layer`];
//! everything recorded between two boundaries counts as one k-parallel query.
//! The derived figures are the total number of queries, the depth (number of
//! non-empty layers) and the width (largest layer).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OracleKind {
    /// Permutation-chain oracle `O_pi`.
    #[serde(rename = "PI")]
    Pi,
    /// Sparse column-index oracle `O_s`.
    #[serde(rename = "SPARSE_S")]
    SparseS,
    /// Sparse entry oracle `O_A`.
    #[serde(rename = "SPARSE_A")]
    SparseA,
    /// Block-encoding unitary `U_A`.
    #[serde(rename = "BLOCK_U")]
    BlockU,
}

impl OracleKind {
    pub const ALL: [OracleKind; 4] = [Self::Pi, Self::SparseS, Self::SparseA, Self::BlockU];

    /// Number of `O_pi` queries needed to implement one query of this kind.
    ///
    /// `O_s` and `O_A` each take one `O_pi` query; `U_A` takes two of each.
    pub fn pi_cost(self) -> u64 {
        match self {
            Self::Pi | Self::SparseS | Self::SparseA => 1,
            Self::BlockU => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Pi => "PI",
            Self::SparseS => "SPARSE_S",
            Self::SparseA => "SPARSE_A",
            Self::BlockU => "BLOCK_U",
        }
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LedgerEvent {
    BeginLayer,
    Query { kind: OracleKind, count: u64 },
}

/// `(total, depth, width)` of a ledger or of one oracle kind within it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub total: u64,
    pub depth: u64,
    pub width: u64,
}

impl Counts {
    pub fn as_tuple(&self) -> (u64, u64, u64) {
        (self.total, self.depth, self.width)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSummary {
    #[serde(flatten)]
    pub all: Counts,
    pub by_kind: BTreeMap<OracleKind, Counts>,
    /// Total cost re-expressed in `O_pi` queries.
    pub pi_equivalents: u64,
}

impl LedgerSummary {
    pub fn kind(&self, kind: OracleKind) -> Counts {
        self.by_kind.get(&kind).copied().unwrap_or_default()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Layer {
    counts: [u64; 4],
}

impl Layer {
    fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn slot(kind: OracleKind) -> usize {
    match kind {
        OracleKind::Pi => 0,
        OracleKind::SparseS => 1,
        OracleKind::SparseA => 2,
        OracleKind::BlockU => 3,
    }
}

/// Position in a ledger's event log, used to measure the cost of a sub-computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LedgerMark(usize);

#[derive(Clone, Debug, Default)]
pub struct QueryLedger {
    events: Vec<LedgerEvent>,
    layers: Vec<Layer>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a ledger from its event log.
    pub fn replay(events: &[LedgerEvent]) -> Self {
        let mut ledger = Self::new();
        for event in events {
            match *event {
                LedgerEvent::BeginLayer => ledger.begin_layer(),
                LedgerEvent::Query { kind, count } => ledger.record_n(kind, count),
            }
        }
        ledger
    }

    /// Closes the current layer. Queries recorded afterwards share a fresh layer.
    pub fn begin_layer(&mut self) {
        self.events.push(LedgerEvent::BeginLayer);
        self.layers.push(Layer::default());
    }

    pub fn record(&mut self, kind: OracleKind) {
        self.record_n(kind, 1);
    }

    pub fn record_n(&mut self, kind: OracleKind, count: u64) {
        if count == 0 {
            return;
        }
        self.events.push(LedgerEvent::Query { kind, count });
        if self.layers.is_empty() {
            self.layers.push(Layer::default());
        }
        let layer = self.layers.last_mut().expect("at least one layer");
        layer.counts[slot(kind)] += count;
    }

    pub fn events(&self) -> &[LedgerEvent] {
        &self.events
    }

    pub fn mark(&self) -> LedgerMark {
        LedgerMark(self.events.len())
    }

    /// Ledger of everything recorded after `mark`.
    pub fn since(&self, mark: LedgerMark) -> QueryLedger {
        Self::replay(&self.events[mark.0.min(self.events.len())..])
    }

    /// Appends another ledger's layers after this one's (sequential composition).
    pub fn append(&mut self, other: &QueryLedger) {
        self.begin_layer();
        for event in other.events() {
            match *event {
                LedgerEvent::BeginLayer => self.begin_layer(),
                LedgerEvent::Query { kind, count } => self.record_n(kind, count),
            }
        }
    }

    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for layer in &self.layers {
            let t = layer.total();
            if t > 0 {
                c.total += t;
                c.depth += 1;
                c.width = c.width.max(t);
            }
        }
        c
    }

    pub fn summary(&self) -> LedgerSummary {
        let mut by_kind = BTreeMap::new();
        let mut pi_equivalents = 0;
        for kind in OracleKind::ALL {
            let mut c = Counts::default();
            for layer in &self.layers {
                let n = layer.counts[slot(kind)];
                if n > 0 {
                    c.total += n;
                    c.depth += 1;
                    c.width = c.width.max(n);
                }
            }
            if c.total > 0 {
                pi_equivalents += c.total * kind.pi_cost();
                by_kind.insert(kind, c);
            }
        }
        LedgerSummary {
            all: self.counts(),
            by_kind,
            pi_equivalents,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_ledger() {
        let ledger = QueryLedger::new();
        assert_eq!(ledger.counts().as_tuple(), (0, 0, 0));
        assert!(ledger.summary().by_kind.is_empty());
    }

    #[test]
    fn sequential_single_queries() {
        let mut ledger = QueryLedger::new();
        for _ in 0..3 {
            ledger.begin_layer();
            ledger.record(OracleKind::Pi);
        }
        assert_eq!(ledger.counts().as_tuple(), (3, 3, 1));
    }

    #[test]
    fn parallel_layers() {
        let mut ledger = QueryLedger::new();
        for _ in 0..2 {
            ledger.begin_layer();
            for _ in 0..4 {
                ledger.record(OracleKind::Pi);
            }
        }
        assert_eq!(ledger.counts().as_tuple(), (8, 2, 4));
    }

    #[test]
    fn empty_layers_do_not_count() {
        let mut ledger = QueryLedger::new();
        ledger.begin_layer();
        ledger.begin_layer();
        ledger.record(OracleKind::SparseS);
        ledger.begin_layer();
        assert_eq!(ledger.counts().as_tuple(), (1, 1, 1));
    }

    #[test]
    fn per_kind_breakdown_and_pi_equivalents() {
        let mut ledger = QueryLedger::new();
        ledger.begin_layer();
        ledger.record_n(OracleKind::SparseS, 2);
        ledger.record_n(OracleKind::SparseA, 2);
        ledger.begin_layer();
        ledger.record(OracleKind::BlockU);
        let s = ledger.summary();
        assert_eq!(s.all.as_tuple(), (5, 2, 4));
        assert_eq!(s.kind(OracleKind::SparseS).as_tuple(), (2, 1, 2));
        assert_eq!(s.kind(OracleKind::BlockU).as_tuple(), (1, 1, 1));
        assert_eq!(s.kind(OracleKind::Pi).as_tuple(), (0, 0, 0));
        assert_eq!(s.pi_equivalents, 8);
    }

    #[test]
    fn since_mark_measures_delta() {
        let mut ledger = QueryLedger::new();
        ledger.record(OracleKind::Pi);
        let mark = ledger.mark();
        ledger.begin_layer();
        ledger.record_n(OracleKind::Pi, 3);
        assert_eq!(ledger.since(mark).counts().as_tuple(), (3, 1, 3));
    }

    #[test]
    fn append_is_sequential() {
        let mut a = QueryLedger::new();
        a.record_n(OracleKind::Pi, 2);
        let mut b = QueryLedger::new();
        b.record_n(OracleKind::Pi, 5);
        a.append(&b);
        assert_eq!(a.counts().as_tuple(), (7, 2, 5));
    }
}
