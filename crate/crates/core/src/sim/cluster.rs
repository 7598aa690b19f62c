use serde::{Deserialize, Serialize};

use crate::code::{DssParams, FrCode};
use crate::error::{Error, Result};
use crate::mds::{sha256, ContainerHeader, MdsCode, ShareContainer};
use crate::recovery::find_helper_set;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeStatus {
    Alive,
    Failed,
    Repaired,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepairPolicy {
    #[default]
    LocalFirst,
    GlobalOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepairMode {
    Local,
    Global,
}

/// One line of the event log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    pub event: String,
    pub node: Option<usize>,
    pub helpers: Vec<usize>,
    pub symbols_moved: usize,
}

/// Outcome of a successful repair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairLog {
    pub node: usize,
    pub mode: RepairMode,
    pub helpers: Vec<usize>,
    /// `per_helper[i]` lists the symbol positions copied from `helpers[i]`.
    pub per_helper: Vec<Vec<usize>>,
    pub symbols_moved: usize,
}

/// A simulated storage cluster. Node `i` holds the encoded blocks at the
/// positions of its symbol set, each tagged with its position.
#[derive(Clone, Debug)]
pub struct ClusterState {
    code: FrCode,
    params: DssParams,
    header: ContainerHeader,
    status: Vec<NodeStatus>,
    payloads: Vec<Option<Vec<(usize, Vec<u8>)>>>,
    digests: Vec<[u8; 32]>,
    /// Nodes that went down since the cluster was last fully healthy.
    in_round: Vec<bool>,
    reuse_repaired_helpers: bool,
    events: Vec<Event>,
    tick: u64,
    sent: Vec<usize>,
}

fn payload_digest(payload: &[(usize, Vec<u8>)]) -> [u8; 32] {
    let mut buf = Vec::new();
    for (pos, block) in payload {
        buf.extend_from_slice(&(*pos as u64).to_le_bytes());
        buf.extend_from_slice(block);
    }
    sha256(&buf)
}

impl ClusterState {
    /// Places every encoded block of `container` on the nodes holding its
    /// position.
    pub fn build(code: &FrCode, container: &ShareContainer, params: DssParams) -> Result<Self> {
        let h = &container.header;
        if h.theta != code.theta() || container.shares.len() != code.theta() {
            return Err(Error::SizeMismatch {
                expected: code.theta(),
                actual: container.shares.len(),
            });
        }
        if h.m != params.file_size {
            return Err(Error::SizeMismatch {
                expected: params.file_size,
                actual: h.m,
            });
        }
        let mut blocks = vec![None; code.theta()];
        for (pos, block) in &container.shares {
            code_pos_check(*pos, code.theta())?;
            blocks[*pos] = Some(block.clone());
        }
        let payloads: Vec<Option<Vec<(usize, Vec<u8>)>>> = code
            .nodes()
            .iter()
            .map(|v| {
                v.iter()
                    .map(|&s| {
                        blocks[s]
                            .clone()
                            .map(|b| (s, b))
                            .ok_or(Error::SizeMismatch {
                                expected: code.theta(),
                                actual: container.shares.len(),
                            })
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Some)
            })
            .collect::<Result<_>>()?;
        let digests = payloads
            .iter()
            .map(|p| payload_digest(p.as_deref().unwrap_or_default()))
            .collect();
        let n = code.n();
        Ok(ClusterState {
            code: code.clone(),
            params,
            header: h.clone(),
            status: vec![NodeStatus::Alive; n],
            payloads,
            digests,
            in_round: vec![false; n],
            reuse_repaired_helpers: false,
            events: Vec::new(),
            tick: 0,
            sent: vec![0; n],
        })
    }

    /// Lets nodes repaired earlier in the same round serve as helpers.
    pub fn set_reuse_repaired_helpers(&mut self, on: bool) {
        self.reuse_repaired_helpers = on;
    }

    pub fn code(&self) -> &FrCode {
        &self.code
    }

    pub fn params(&self) -> &DssParams {
        &self.params
    }

    pub fn status(&self) -> &[NodeStatus] {
        &self.status
    }

    pub fn payload(&self, node: usize) -> Option<&[(usize, Vec<u8>)]> {
        self.payloads.get(node)?.as_deref()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Symbols each node has sent to repairs so far.
    pub fn traffic(&self) -> &[usize] {
        &self.sent
    }

    pub fn alive_count(&self) -> usize {
        self.status.iter().filter(|&&s| s != NodeStatus::Failed).count()
    }

    pub fn failed(&self) -> Vec<usize> {
        (0..self.status.len())
            .filter(|&i| self.status[i] == NodeStatus::Failed)
            .collect()
    }

    fn log(&mut self, event: &str, node: Option<usize>, helpers: Vec<usize>, symbols_moved: usize) {
        self.events.push(Event {
            tick: self.tick,
            event: event.to_string(),
            node,
            helpers,
            symbols_moved,
        });
        self.tick += 1;
    }

    /// Erases the given nodes. Returns the ids that were already down.
    pub fn fail(&mut self, ids: &[usize]) -> Result<Vec<usize>> {
        for &i in ids {
            self.code.check_index(i)?;
        }
        if self.failed().is_empty() {
            self.in_round.iter_mut().for_each(|x| *x = false);
        }
        let mut ignored = Vec::new();
        for &i in ids {
            if self.status[i] == NodeStatus::Failed {
                ignored.push(i);
                self.log("fail-ignored", Some(i), Vec::new(), 0);
                continue;
            }
            self.status[i] = NodeStatus::Failed;
            self.payloads[i] = None;
            self.in_round[i] = true;
            self.log("fail", Some(i), Vec::new(), 0);
        }
        Ok(ignored)
    }

    fn available(&self) -> Vec<bool> {
        (0..self.status.len())
            .map(|i| match self.status[i] {
                NodeStatus::Alive => true,
                NodeStatus::Repaired => self.reuse_repaired_helpers || !self.in_round[i],
                NodeStatus::Failed => false,
            })
            .collect()
    }

    fn check_failed(&self, node: usize) -> Result<()> {
        self.code.check_index(node)?;
        if self.status[node] != NodeStatus::Failed {
            return Err(Error::NodeNotFailed { node });
        }
        Ok(())
    }

    fn restore(&mut self, node: usize, mode: RepairMode, helpers: Vec<usize>, per_helper: Vec<Vec<usize>>) -> Result<RepairLog> {
        let mut payload = Vec::with_capacity(self.code.alpha());
        for (h, symbols) in helpers.iter().zip(&per_helper) {
            let source = self.payloads[*h].as_ref().ok_or(Error::DeadNode { node: *h })?;
            for &s in symbols {
                let (_, block) = source
                    .iter()
                    .find(|(p, _)| *p == s)
                    .ok_or(Error::Corruption { position: s })?;
                payload.push((s, block.clone()));
            }
            self.sent[*h] += symbols.len();
        }
        payload.sort_by_key(|(p, _)| *p);
        if payload_digest(&payload) != self.digests[node] {
            return Err(Error::DigestMismatch);
        }
        let moved = payload.len();
        self.payloads[node] = Some(payload);
        self.status[node] = NodeStatus::Repaired;
        let event = match mode {
            RepairMode::Local => "repair-local",
            RepairMode::Global => "repair-global",
        };
        self.log(event, Some(node), helpers.clone(), moved);
        Ok(RepairLog {
            node,
            mode,
            helpers,
            per_helper,
            symbols_moved: moved,
        })
    }

    /// Rebuilds `node` from `r` helpers of an intact local structure, each
    /// sending `alpha / r` symbols.
    pub fn repair_local(&mut self, node: usize) -> Result<RepairLog> {
        self.check_failed(node)?;
        let (r, beta) = (self.params.r, self.params.beta_loc);
        match find_helper_set(&self.code, node, &self.available(), r, beta) {
            Some(a) => self.restore(node, RepairMode::Local, a.helpers, a.subsets),
            None => {
                self.log("repair-local-unavailable", Some(node), Vec::new(), 0);
                Err(Error::LocalRepairUnavailable { node })
            }
        }
    }

    /// Rebuilds `node` from the lexicographically smallest feasible set of `d`
    /// available helpers, each sending `beta` symbols.
    pub fn repair_global(&mut self, node: usize, d: usize, beta: usize) -> Result<RepairLog> {
        self.check_failed(node)?;
        if d == 0 || d * beta != self.code.alpha() {
            return Err(Error::SizeMismatch {
                expected: self.code.alpha(),
                actual: d * beta,
            });
        }
        match find_helper_set(&self.code, node, &self.available(), d, beta) {
            Some(a) => self.restore(node, RepairMode::Global, a.helpers, a.subsets),
            None => {
                self.log("repair-failed", Some(node), Vec::new(), 0);
                Err(Error::Unrepairable { node })
            }
        }
    }

    pub fn repair(&mut self, node: usize, policy: RepairPolicy) -> Result<RepairLog> {
        let (d, beta) = (self.params.d, self.params.beta);
        match policy {
            RepairPolicy::GlobalOnly => self.repair_global(node, d, beta),
            RepairPolicy::LocalFirst => match self.repair_local(node) {
                Err(Error::LocalRepairUnavailable { .. }) => self.repair_global(node, d, beta),
                other => other,
            },
        }
    }

    /// Repairs every failed node in ascending id order.
    pub fn repair_all(&mut self, policy: RepairPolicy) -> Vec<(usize, Result<RepairLog>)> {
        self.failed()
            .into_iter()
            .map(|v| (v, self.repair(v, policy)))
            .collect()
    }

    /// Distinct symbol positions stored on the given nodes.
    pub fn coverage(&self, ids: &[usize]) -> usize {
        self.code.masks().union_count(ids.iter().copied())
    }

    /// Reads the file from the given nodes through the outer MDS code.
    pub fn collect(&mut self, ids: &[usize]) -> Result<Vec<u8>> {
        for &i in ids {
            self.code.check_index(i)?;
            if self.status[i] == NodeStatus::Failed {
                return Err(Error::DeadNode { node: i });
            }
        }
        let outcome = self.read(ids);
        let event = if outcome.is_ok() { "collect" } else { "collect-failed" };
        self.log(event, None, ids.to_vec(), 0);
        outcome
    }

    fn read(&self, ids: &[usize]) -> Result<Vec<u8>> {
        let mut received: Vec<(usize, &[u8])> = ids
            .iter()
            .flat_map(|&i| self.payloads[i].as_deref().unwrap_or_default())
            .map(|(p, b)| (*p, b.as_slice()))
            .collect();
        received.sort_by_key(|p| p.0);
        received.dedup_by_key(|p| p.0);
        let h = &self.header;
        if received.len() < h.m {
            return Err(Error::ReconstructionFailed {
                covered: received.len(),
                needed: h.m,
            });
        }
        let mds = MdsCode::new(h.field, h.m, h.theta)?;
        let mut bytes = mds.decode(&received)?.concat();
        bytes.truncate(h.file_len as usize);
        if sha256(&bytes) != h.digest {
            return Err(Error::DigestMismatch);
        }
        Ok(bytes)
    }

    /// Every live node's payload matches its symbol set, and the stored
    /// instance count is `alive · alpha`.
    pub fn check_invariants(&self) -> bool {
        let mut instances = 0;
        for (i, p) in self.payloads.iter().enumerate() {
            match (self.status[i], p) {
                (NodeStatus::Failed, None) => {}
                (NodeStatus::Failed, Some(_)) | (_, None) => return false,
                (_, Some(p)) => {
                    let positions: Vec<usize> = p.iter().map(|(s, _)| *s).collect();
                    if positions != self.code.node(i) || payload_digest(p) != self.digests[i] {
                        return false;
                    }
                    instances += p.len();
                }
            }
        }
        instances == self.alive_count() * self.code.alpha()
    }

    /// Events as line-delimited JSON.
    pub fn events_jsonl(&self) -> String {
        events_jsonl(&self.events)
    }
}

fn code_pos_check(pos: usize, theta: usize) -> Result<()> {
    if pos >= theta {
        return Err(Error::IndexOutOfRange { index: pos, len: theta });
    }
    Ok(())
}

pub fn events_jsonl(events: &[Event]) -> String {
    events
        .iter()
        .map(|e| serde_json::to_string(e).expect("event serializes") + "\n")
        .collect()
}
