use crate::error::{Error, Result};
use crate::graph::{NodeId, SpatialGraph};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arrival {
    /// Every frame is available at time 0.
    Batch,
    /// Frame `f` arrives at `f * dt`.
    Interval(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Workload {
    pub frames: usize,
    /// Seconds of processing per frame.
    pub t_proc: f64,
    /// Seconds per hop between the master and a processor.
    pub t_hop: f64,
    pub frame_bits: f64,
    /// Bits per second; may be infinite.
    pub bandwidth: f64,
    pub arrival: Arrival,
}

impl Workload {
    /// `frames` frames of `t_proc` each, batch arrival, free communication.
    pub fn compute_only(frames: usize, t_proc: f64) -> Self {
        Workload {
            frames,
            t_proc,
            t_hop: 0.0,
            frame_bits: 0.0,
            bandwidth: f64::INFINITY,
            arrival: Arrival::Batch,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.frames == 0 {
            return bad("frames must be positive".into());
        }
        if !(self.t_proc > 0.0 && self.t_proc.is_finite()) {
            return bad(format!("t_proc = {} must be positive", self.t_proc));
        }
        if !(self.t_hop >= 0.0 && self.t_hop.is_finite()) {
            return bad(format!("t_hop = {} must be non-negative", self.t_hop));
        }
        if !(self.frame_bits >= 0.0 && self.frame_bits.is_finite()) {
            return bad(format!(
                "frame_bits = {} must be non-negative",
                self.frame_bits
            ));
        }
        if !(self.bandwidth > 0.0) {
            return bad(format!("bandwidth = {} must be positive", self.bandwidth));
        }
        if let Arrival::Interval(dt) = self.arrival {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("interval = {dt} must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub master: NodeId,
    pub makespan: f64,
    /// Processing time spent by each node.
    pub busy: Vec<f64>,
    pub frames_per_node: Vec<usize>,
    pub speedup: f64,
}

/// Serial processing time over makespan.
pub fn speedup(r: &SimResult, w: &Workload) -> Result<f64> {
    if r.makespan <= 0.0 {
        return Err(Error::ZeroMakespan);
    }
    Ok(w.frames as f64 * w.t_proc / r.makespan)
}

/// Simulates with the highest-degree node (lowest id on ties) as master.
pub fn simulate_stream(topology: &SpatialGraph, w: &Workload, seed: u64) -> Result<SimResult> {
    simulate_stream_from(topology, w, seed, None)
}

/// Greedy earliest-completion dispatch of the frame stream from `master`.
///
/// Frames are assigned in arrival order. A frame sent to processor `p` would
/// complete at `max(arrival, free_p) + transfer_p + t_proc`, where
/// `transfer_p = hops * t_hop + frame_bits / bandwidth` (zero on the master);
/// the processor with the earliest such time wins, equal times being settled
/// by a seed-dependent processor priority.
pub fn simulate_stream_from(
    topology: &SpatialGraph,
    w: &Workload,
    seed: u64,
    master: Option<NodeId>,
) -> Result<SimResult> {
    w.validate()?;
    let n = topology.node_count();
    if n == 0 {
        return Err(Error::NoProcessors);
    }
    if !topology.is_connected() {
        return Err(Error::Disconnected);
    }
    let master = match master {
        Some(m) => {
            if !topology.contains(m) {
                return Err(Error::UnknownNode(m.index()));
            }
            m
        }
        None => {
            let mut best = NodeId(0);
            for u in 1..n {
                if topology.degree(NodeId(u))? > topology.degree(best)? {
                    best = NodeId(u);
                }
            }
            best
        }
    };
    let hops = topology.shortest_path_lengths(master)?;
    let transfer: Vec<f64> = (0..n)
        .map(|p| {
            if p == master.index() {
                0.0
            } else {
                let h = hops[p].expect("connected") as f64;
                h * w.t_hop + w.frame_bits / w.bandwidth
            }
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    SplitMix64::new(seed).shuffle(&mut order);
    let mut priority = vec![0; n];
    for (rank, &p) in order.iter().enumerate() {
        priority[p] = rank;
    }

    let mut free = vec![0.0f64; n];
    let mut busy = vec![0.0; n];
    let mut frames_per_node = vec![0; n];
    let mut makespan = 0.0f64;
    for f in 0..w.frames {
        let arrival = match w.arrival {
            Arrival::Batch => 0.0,
            Arrival::Interval(dt) => f as f64 * dt,
        };
        let mut best: Option<(f64, usize)> = None;
        for p in 0..n {
            let done = arrival.max(free[p]) + transfer[p] + w.t_proc;
            let better = match best {
                None => true,
                Some((bt, bp)) => done < bt || (done == bt && priority[p] < priority[bp]),
            };
            if better {
                best = Some((done, p));
            }
        }
        let (done, p) = best.expect("at least one processor");
        free[p] = done;
        busy[p] += w.t_proc;
        frames_per_node[p] += 1;
        makespan = makespan.max(done);
    }

    let mut result = SimResult {
        master,
        makespan,
        busy,
        frames_per_node,
        speedup: 0.0,
    };
    result.speedup = speedup(&result, w)?;
    Ok(result)
}
