use std::collections::HashMap;

use super::NmeaSentence;

/// A complete armored payload, possibly joined from several fragments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssembledPayload {
    pub payload: String,
    pub fill_bits: u8,
    pub channel: Option<char>,
    pub fragments: u8,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct AssemblyStats {
    pub assembled: u64,
    /// Incomplete groups discarded (expired, superseded, or left at finish).
    pub dropped_groups: u64,
    /// Fragments discarded along with those groups.
    pub dropped_fragments: u64,
}

type GroupKey = (Option<u8>, Option<char>);

#[derive(Debug)]
struct Pending {
    count: u8,
    started: u64,
    parts: Vec<Option<(String, u8)>>,
}

impl Pending {
    fn received(&self) -> u64 {
        self.parts.iter().filter(|p| p.is_some()).count() as u64
    }
}

/// Joins multipart sentences keyed by (message id, channel).
///
/// A group that is still incomplete `window` sentences after its first
/// fragment arrived is dropped and counted.
#[derive(Debug)]
pub struct FragmentAssembler {
    window: u64,
    seen: u64,
    pending: HashMap<GroupKey, Pending>,
    stats: AssemblyStats,
}

impl FragmentAssembler {
    pub fn new(window: u64) -> Self {
        Self {
            window: window.max(1),
            seen: 0,
            pending: HashMap::new(),
            stats: AssemblyStats::default(),
        }
    }

    pub fn stats(&self) -> AssemblyStats {
        self.stats
    }

    pub fn pending_groups(&self) -> usize {
        self.pending.len()
    }

    fn drop_group(&mut self, p: &Pending) {
        self.stats.dropped_groups += 1;
        self.stats.dropped_fragments += p.received();
    }

    fn expire(&mut self) {
        let (seen, window) = (self.seen, self.window);
        let expired: Vec<GroupKey> = self
            .pending
            .iter()
            .filter(|(_, p)| seen - p.started > window)
            .map(|(k, _)| *k)
            .collect();
        for k in expired {
            if let Some(p) = self.pending.remove(&k) {
                self.drop_group(&p);
            }
        }
    }

    /// Feed one sentence; returns a payload once its group is complete.
    pub fn push(&mut self, s: &NmeaSentence) -> Option<AssembledPayload> {
        self.seen += 1;
        self.expire();

        if s.fragment_count == 1 {
            self.stats.assembled += 1;
            return Some(AssembledPayload {
                payload: s.payload.clone(),
                fill_bits: s.fill_bits,
                channel: s.channel,
                fragments: 1,
            });
        }

        let key = (s.message_id, s.channel);
        let slot = usize::from(s.fragment_index - 1);
        let conflict = match self.pending.get(&key) {
            Some(p) => p.count != s.fragment_count || p.parts[slot].is_some(),
            None => false,
        };
        if conflict {
            let old = self.pending.remove(&key).expect("checked above");
            self.drop_group(&old);
        }
        let seen = self.seen;
        let group = self.pending.entry(key).or_insert_with(|| Pending {
            count: s.fragment_count,
            started: seen,
            parts: vec![None; usize::from(s.fragment_count)],
        });
        group.parts[slot] = Some((s.payload.clone(), s.fill_bits));
        if group.parts.iter().any(Option::is_none) {
            return None;
        }

        let group = self.pending.remove(&key).expect("present");
        let mut payload = String::new();
        let mut fill_bits = 0;
        for (text, fill) in group.parts.into_iter().flatten() {
            payload.push_str(&text);
            fill_bits = fill;
        }
        self.stats.assembled += 1;
        Some(AssembledPayload {
            payload,
            fill_bits,
            channel: s.channel,
            fragments: group.count,
        })
    }

    /// Drop every incomplete group.
    pub fn finish(&mut self) -> AssemblyStats {
        let pending: Vec<Pending> = self.pending.drain().map(|(_, p)| p).collect();
        for p in &pending {
            self.drop_group(p);
        }
        self.stats
    }
}

/// Assemble an ordered stream of sentences; incomplete groups are dropped.
pub fn assemble_multipart<'a, I>(sentences: I, window: u64) -> (Vec<AssembledPayload>, AssemblyStats)
where
    I: IntoIterator<Item = &'a NmeaSentence>,
{
    let mut asm = FragmentAssembler::new(window);
    let out = sentences.into_iter().filter_map(|s| asm.push(s)).collect();
    let stats = asm.finish();
    (out, stats)
}
