//! Butterfly communication pattern for frontier synchronization.
//!
//! Nodes are numbered `0..num_nodes` and written in base `radix`, where the
//! radix is 2 for fanout 1 (pairwise exchange) and the fanout otherwise. In
//! round `i` a node pulls from every node that differs from it only in digit
//! `i`, so after round `i` it has heard from its whole aligned block of
//! `radix^(i+1)` nodes.
//!
//! When `num_nodes` is not a power of the radix some of those partners do not
//! exist. A missing partner is replaced by the lowest existing node of the
//! partner's aligned `radix^i` block; that node has already gathered
//! everything its block knows, so nothing is lost. If the whole block is
//! missing there is nothing to pull and the source is dropped.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("number of compute nodes must be at least 1")]
    NoNodes,
    #[error("fanout must be at least 1")]
    ZeroFanout,
    #[error("fanout {fanout} exceeds the number of compute nodes {num_nodes}")]
    FanoutTooLarge { fanout: usize, num_nodes: usize },
}

fn validate(num_nodes: usize, fanout: usize) -> Result<(), ScheduleError> {
    if num_nodes == 0 {
        return Err(ScheduleError::NoNodes);
    }
    if fanout == 0 {
        return Err(ScheduleError::ZeroFanout);
    }
    if fanout > num_nodes {
        return Err(ScheduleError::FanoutTooLarge { fanout, num_nodes });
    }
    Ok(())
}

/// Digit base used for a fanout. Fanout 1 exchanges with one partner per
/// round, which is radix 2.
pub fn radix(fanout: usize) -> usize {
    fanout.max(2)
}

/// Smallest `k` with `radix^k >= num_nodes`.
pub fn num_rounds(num_nodes: usize, fanout: usize) -> Result<usize, ScheduleError> {
    validate(num_nodes, fanout)?;
    let r = radix(fanout);
    let mut span = 1usize;
    let mut rounds = 0;
    while span < num_nodes {
        span = span.saturating_mul(r);
        rounds += 1;
    }
    Ok(rounds)
}

/// Message total under the accounting where every node sends `fanout`
/// messages per round: `num_nodes * fanout * rounds`. For fanout >= 2 this
/// counts a node's own block as one of the `fanout` messages.
pub fn message_count_paper(num_nodes: usize, fanout: usize) -> Result<usize, ScheduleError> {
    Ok(num_nodes * fanout * num_rounds(num_nodes, fanout)?)
}

/// Incoming-frontier capacity a node needs: `fanout` frontiers of at most
/// `num_vertices` each.
pub fn buffer_bound(num_vertices: usize, fanout: usize) -> usize {
    fanout * num_vertices
}

/// Builds the butterfly schedule for `num_nodes` nodes at `fanout`.
pub fn make_schedule(num_nodes: usize, fanout: usize) -> Result<ButterflySchedule, ScheduleError> {
    ButterflySchedule::new(num_nodes, fanout)
}

/// Receive-side butterfly schedule: `rounds[i][g]` lists, ascending, the
/// nodes that node `g` pulls from in round `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ButterflySchedule {
    num_nodes: usize,
    fanout: usize,
    rounds: Vec<Vec<Vec<usize>>>,
}

impl ButterflySchedule {
    pub fn new(num_nodes: usize, fanout: usize) -> Result<Self, ScheduleError> {
        let rounds = num_rounds(num_nodes, fanout)?;
        let r = radix(fanout);
        let mut table = Vec::with_capacity(rounds);
        let mut stride = 1usize;
        for _ in 0..rounds {
            let per_node = (0..num_nodes)
                .map(|g| sources_for(g, stride, r, num_nodes))
                .collect();
            table.push(per_node);
            stride *= r;
        }
        Ok(ButterflySchedule {
            num_nodes,
            fanout,
            rounds: table,
        })
    }

    /// Builds a schedule from an explicit table without checking that it
    /// synchronizes anything. Used to inject broken schedules in tests.
    pub fn from_rounds(num_nodes: usize, fanout: usize, rounds: Vec<Vec<Vec<usize>>>) -> Self {
        assert!(rounds.iter().all(|r| r.len() == num_nodes));
        ButterflySchedule {
            num_nodes,
            fanout,
            rounds,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn fanout(&self) -> usize {
        self.fanout
    }

    pub fn radix(&self) -> usize {
        radix(self.fanout)
    }

    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn rounds(&self) -> &[Vec<Vec<usize>>] {
        &self.rounds
    }

    pub fn sources(&self, round: usize, node: usize) -> &[usize] {
        &self.rounds[round][node]
    }

    /// Largest number of sources any node pulls from in a single round.
    pub fn max_sources_per_round(&self) -> usize {
        self.rounds
            .iter()
            .flat_map(|r| r.iter().map(Vec::len))
            .max()
            .unwrap_or(0)
    }

    /// Number of cross-node transfers the schedule performs.
    pub fn message_count_remote(&self) -> usize {
        self.rounds
            .iter()
            .flat_map(|r| r.iter().map(Vec::len))
            .sum()
    }

    /// How many nodes pull from `node` in `round`.
    pub fn out_degree(&self, round: usize, node: usize) -> usize {
        self.rounds[round]
            .iter()
            .filter(|srcs| srcs.contains(&node))
            .count()
    }

    /// Simulates information flow: `result[g]` is the set of nodes whose
    /// data has reached `g` after every round has been applied in order.
    pub fn knows(&self) -> Vec<Vec<bool>> {
        self.knows_after(self.rounds.len())
    }

    /// Like [`knows`](Self::knows) but stops after the first `rounds` rounds.
    pub fn knows_after(&self, rounds: usize) -> Vec<Vec<bool>> {
        let n = self.num_nodes;
        let mut known: Vec<Vec<bool>> = (0..n)
            .map(|g| (0..n).map(|h| h == g).collect())
            .collect();
        for round in &self.rounds[..rounds] {
            // Pulls within a round read the state left by the previous round.
            let before = known.clone();
            for (g, srcs) in round.iter().enumerate() {
                for &src in srcs {
                    for h in 0..n {
                        known[g][h] |= before[src][h];
                    }
                }
            }
        }
        known
    }
}

/// Sources of node `g` in the round whose digit has place value `stride`.
fn sources_for(g: usize, stride: usize, radix: usize, num_nodes: usize) -> Vec<usize> {
    let digit = (g / stride) % radix;
    let block_base = g - digit * stride;
    let mut out = Vec::with_capacity(radix - 1);
    for value in 0..radix {
        if value == digit {
            continue;
        }
        let partner = block_base + value * stride;
        let source = if partner < num_nodes {
            partner
        } else {
            // Lowest node of the partner's aligned stride-sized block.
            let representative = partner - partner % stride;
            if representative >= num_nodes {
                continue;
            }
            representative
        };
        if source != g {
            out.push(source);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}
