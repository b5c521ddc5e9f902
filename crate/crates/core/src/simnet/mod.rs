/*
Copyright 2026 The distpd Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

//! In-process server/worker simulation of one communication round.
//!
//! Each worker owns its dual block and sees only the broadcast vector; it
//! answers with the `d`-dimensional aggregate `X_[k] v_[k]`. The server sums
//! the aggregates in worker order, so the result is bit-identical to the
//! serial round.

use std::sync::mpsc;
use std::thread;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solvers::{IterateState, RoundInfo, Solver, WorkerReply};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Server to all workers.
    Broadcast,
    /// One worker to the server.
    Aggregate,
}

/// A message crossing the server/worker boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Message<T> {
    pub direction: Direction,
    pub round: usize,
    /// Sender for aggregates; `None` for broadcasts.
    pub worker: Option<usize>,
    pub payload: Vec<T>,
}

/// Log entry: the envelope and payload shape of a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MessageRecord {
    pub direction: Direction,
    pub round: usize,
    pub worker: Option<usize>,
    pub rows: usize,
    pub cols: usize,
}

impl<T> Message<T> {
    pub fn record(&self) -> MessageRecord {
        MessageRecord {
            direction: self.direction,
            round: self.round,
            worker: self.worker,
            rows: self.payload.len(),
            cols: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WorkerTraffic {
    pub received_messages: usize,
    pub received_scalars: usize,
    pub sent_messages: usize,
    pub sent_scalars: usize,
}

/// Communication counters. A broadcast counts once regardless of the
/// number of recipients.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CommStats {
    pub rounds: usize,
    pub messages: usize,
    pub scalars: usize,
    pub per_worker: Vec<WorkerTraffic>,
}

impl CommStats {
    pub fn new(workers: usize) -> Self {
        Self {
            per_worker: vec![WorkerTraffic::default(); workers],
            ..Self::default()
        }
    }

    /// Scalars moved by one round: one broadcast and `K` aggregates.
    pub fn scalars_per_round(workers: usize, d: usize) -> usize {
        (workers + 1) * d
    }

    /// Counters of one complete round without running it.
    pub fn one_round(workers: usize, d: usize) -> Self {
        let mut s = Self::new(workers);
        s.rounds = 1;
        s.messages = workers + 1;
        s.scalars = Self::scalars_per_round(workers, d);
        for w in &mut s.per_worker {
            *w = WorkerTraffic {
                received_messages: 1,
                received_scalars: d,
                sent_messages: 1,
                sent_scalars: d,
            };
        }
        s
    }

    pub fn add(&mut self, other: &CommStats) {
        self.rounds += other.rounds;
        self.messages += other.messages;
        self.scalars += other.scalars;
        if self.per_worker.len() < other.per_worker.len() {
            self.per_worker
                .resize(other.per_worker.len(), WorkerTraffic::default());
        }
        for (a, b) in self.per_worker.iter_mut().zip(&other.per_worker) {
            a.received_messages += b.received_messages;
            a.received_scalars += b.received_scalars;
            a.sent_messages += b.sent_messages;
            a.sent_scalars += b.sent_scalars;
        }
    }
}

/// Simulated network: scheduling mode, optional injected failure, and the
/// running message log and counters.
#[derive(Debug, Clone)]
pub struct Network {
    workers: usize,
    d: usize,
    threaded: bool,
    fail: Option<(usize, usize)>,
    log: Vec<MessageRecord>,
    stats: CommStats,
}

impl Network {
    pub fn new(workers: usize, d: usize, threaded: bool) -> Self {
        Self {
            workers,
            d,
            threaded,
            fail: None,
            log: Vec::new(),
            stats: CommStats::new(workers),
        }
    }

    /// Makes `worker` drop its reply in round `round` (1-based).
    pub fn fail_worker(mut self, round: usize, worker: usize) -> Self {
        self.fail = Some((round, worker));
        self
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn log(&self) -> &[MessageRecord] {
        &self.log
    }

    pub fn stats(&self) -> &CommStats {
        &self.stats
    }

    fn deliver<T>(&mut self, delta: &mut CommStats, msg: &Message<T>) {
        self.log.push(msg.record());
        delta.messages += 1;
        delta.scalars += msg.payload.len();
        match (msg.direction, msg.worker) {
            (Direction::Broadcast, _) => {
                for w in &mut delta.per_worker {
                    w.received_messages += 1;
                    w.received_scalars += msg.payload.len();
                }
            }
            (Direction::Aggregate, Some(k)) => {
                delta.per_worker[k].sent_messages += 1;
                delta.per_worker[k].sent_scalars += msg.payload.len();
            }
            (Direction::Aggregate, None) => {}
        }
    }
}

/// Worker-side outcome: the reply message and the block the worker keeps.
type WorkerResult<T> = Result<Option<(Vec<T>, T, usize)>>;

/// Runs one round through the simulated network and returns its
/// diagnostics together with the traffic it generated.
pub fn execute_round<T: Scalar>(
    solver: &Solver<'_, T>,
    state: &mut IterateState<T>,
    net: &mut Network,
) -> Result<(RoundInfo, CommStats)> {
    let problem = solver.problem();
    let kk = problem.num_workers();
    if net.workers != kk || net.d != problem.d() {
        return Err(Error::Dimension {
            context: "network shape",
            expected: kk,
            got: net.workers,
        });
    }
    let plan = solver.plan(state)?;
    let mut delta = CommStats::new(kk);
    delta.rounds = 1;
    let broadcast = Message {
        direction: Direction::Broadcast,
        round: plan.round,
        worker: None,
        payload: plan.broadcast.clone(),
    };
    net.deliver(&mut delta, &broadcast);
    let failing = net.fail.filter(|&(r, _)| r == plan.round).map(|(_, k)| k);

    let local_blocks: Vec<Vec<T>> = (0..kk).map(|k| problem.block(k).gather(&state.v)).collect();
    let worker = |k: usize, inbox: &Message<T>, out: &mpsc::Sender<Message<T>>| -> WorkerResult<T> {
        let reply = solver.worker_step(k, &plan, &local_blocks[k])?;
        debug_assert_eq!(inbox.payload, plan.broadcast);
        if failing == Some(k) {
            return Ok(None);
        }
        let msg = Message {
            direction: Direction::Aggregate,
            round: inbox.round,
            worker: Some(k),
            payload: reply.aggregate,
        };
        // the server outlives every worker in this round
        out.send(msg).expect("server mailbox open");
        Ok(Some((reply.v_block, reply.residual, reply.iterations)))
    };

    let (tx, rx) = mpsc::channel::<Message<T>>();
    let kept: Vec<WorkerResult<T>> = if net.threaded {
        thread::scope(|s| {
            let handles: Vec<_> = (0..kk)
                .map(|k| {
                    let tx = tx.clone();
                    let inbox = &broadcast;
                    let worker = &worker;
                    s.spawn(move || worker(k, inbox, &tx))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or(Err(Error::WorkerFailure { round: plan.round, worker: usize::MAX })))
                .collect()
        })
    } else {
        (0..kk).map(|k| worker(k, &broadcast, &tx)).collect()
    };
    drop(tx);

    let mut inbox: Vec<Option<Message<T>>> = vec![None; kk];
    for msg in rx.try_iter() {
        if let Some(k) = msg.worker {
            inbox[k] = Some(msg);
        }
    }

    let mut replies = Vec::with_capacity(kk);
    for (k, (res, msg)) in kept.into_iter().zip(inbox).enumerate() {
        let local = res?;
        let (Some((v_block, residual, iterations)), Some(msg)) = (local, msg) else {
            return Err(Error::WorkerFailure {
                round: plan.round,
                worker: k,
            });
        };
        net.deliver(&mut delta, &msg);
        replies.push(WorkerReply {
            worker: k,
            v_block,
            aggregate: msg.payload,
            residual,
            iterations,
        });
    }
    let info = solver.finish(state, plan, replies)?;
    net.stats.add(&delta);
    Ok((info, delta))
}

/// `true` iff every logged payload is a single `d`-vector, i.e. no raw
/// dual block or data slice ever crossed the boundary.
pub fn audit_privacy(log: &[MessageRecord], d: usize) -> bool {
    log.iter().all(|m| m.rows == d && m.cols == 1)
}
