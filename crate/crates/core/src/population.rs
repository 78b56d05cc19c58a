//! Individuals, the fitness-ordered population store and the SHADE archive.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Vec<f64>,
    pub fitness: f64,
    /// Global creation order within a run. Initial individuals occupy
    /// `0..|P^1|`; offspring that are evaluated but never stored still
    /// consume an index.
    pub insertion_index: u64,
    /// Insertion index of the crossover parent, `None` for initial individuals.
    pub parent_index: Option<u64>,
    /// `fitness <= parent fitness`; initial individuals count as successful.
    pub successful: bool,
}

impl Individual {
    pub fn initial(genome: Vec<f64>, fitness: f64, insertion_index: u64) -> Self {
        Self {
            genome,
            fitness,
            insertion_index,
            parent_index: None,
            successful: true,
        }
    }

    pub fn key(&self) -> RankKey {
        RankKey {
            fitness: self.fitness,
            id: self.insertion_index,
        }
    }
}

/// Sort key: fitness ascending, ties by earlier insertion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankKey {
    pub fitness: f64,
    pub id: u64,
}

impl RankKey {
    pub fn cmp_key(&self, other: &RankKey) -> Ordering {
        self.fitness
            .total_cmp(&other.fitness)
            .then(self.id.cmp(&other.id))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankEntry {
    pub key: RankKey,
    /// Position of the individual in its store.
    pub pos: usize,
}

const BLOCK: usize = 512;

/// Order-statistics index over [`RankKey`]s.
///
/// Entries live in sorted blocks of between `BLOCK / 2` and `2 * BLOCK`
/// elements, so insertion, removal, rank and k-th lookups stay cheap while
/// the unbounded population grows to hundreds of thousands of members.
#[derive(Debug, Clone, Default)]
pub struct OrderIndex {
    blocks: Vec<Vec<RankEntry>>,
    len: usize,
}

impl OrderIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn block_for(&self, key: &RankKey) -> usize {
        let b = self.blocks.partition_point(|blk| {
            blk.last()
                .map(|e| e.key.cmp_key(key) == Ordering::Less)
                .unwrap_or(true)
        });
        b.min(self.blocks.len().saturating_sub(1))
    }

    pub fn insert(&mut self, entry: RankEntry) {
        if self.blocks.is_empty() {
            self.blocks.push(Vec::with_capacity(2 * BLOCK));
        }
        let b = self.block_for(&entry.key);
        let blk = &mut self.blocks[b];
        let at = blk.partition_point(|e| e.key.cmp_key(&entry.key) == Ordering::Less);
        blk.insert(at, entry);
        self.len += 1;
        if blk.len() > 2 * BLOCK {
            let tail = blk.split_off(BLOCK);
            self.blocks.insert(b + 1, tail);
        }
    }

    pub fn remove(&mut self, key: &RankKey) -> Option<RankEntry> {
        if self.blocks.is_empty() {
            return None;
        }
        let b = self.block_for(key);
        let blk = &mut self.blocks[b];
        let at = blk.partition_point(|e| e.key.cmp_key(key) == Ordering::Less);
        if at < blk.len() && blk[at].key.cmp_key(key) == Ordering::Equal {
            let removed = blk.remove(at);
            self.len -= 1;
            if blk.is_empty() {
                self.blocks.remove(b);
            } else if blk.len() < BLOCK / 2 && b + 1 < self.blocks.len() {
                let next = self.blocks.remove(b + 1);
                let blk = &mut self.blocks[b];
                blk.extend(next);
                if blk.len() > 2 * BLOCK {
                    let tail = blk.split_off(blk.len() / 2);
                    self.blocks.insert(b + 1, tail);
                }
            }
            Some(removed)
        } else {
            None
        }
    }

    /// Entry at 0-based rank `k` (0 = best).
    pub fn nth(&self, mut k: usize) -> Option<&RankEntry> {
        for blk in &self.blocks {
            if k < blk.len() {
                return blk.get(k);
            }
            k -= blk.len();
        }
        None
    }

    /// 0-based rank of `key`, if present.
    pub fn rank(&self, key: &RankKey) -> Option<usize> {
        if self.blocks.is_empty() {
            return None;
        }
        let b = self.block_for(key);
        let blk = &self.blocks[b];
        let at = blk.partition_point(|e| e.key.cmp_key(key) == Ordering::Less);
        if at < blk.len() && blk[at].key.cmp_key(key) == Ordering::Equal {
            let before: usize = self.blocks[..b].iter().map(Vec::len).sum();
            Some(before + at)
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &RankEntry> {
        self.blocks.iter().flatten()
    }

    fn set_pos(&mut self, key: &RankKey, pos: usize) {
        let b = self.block_for(key);
        let blk = &mut self.blocks[b];
        let at = blk.partition_point(|e| e.key.cmp_key(key) == Ordering::Less);
        debug_assert!(blk[at].key.cmp_key(key) == Ordering::Equal);
        blk[at].pos = pos;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreMode {
    /// Fixed-size population replaced in place (DE, SHADE, LSHADE).
    Slot,
    /// Grow-only population (UDE family).
    Append,
}

/// Members grouped by `insertion_index mod modulus`, each group ordered by fitness.
#[derive(Debug, Clone)]
pub struct ResidueClasses {
    modulus: usize,
    classes: Vec<OrderIndex>,
}

impl ResidueClasses {
    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn class(&self, residue: usize) -> &OrderIndex {
        &self.classes[residue % self.modulus]
    }

    fn insert(&mut self, entry: RankEntry) {
        let r = (entry.key.id % self.modulus as u64) as usize;
        self.classes[r].insert(entry);
    }
}

#[derive(Debug, Clone)]
pub struct PopulationStore {
    mode: StoreMode,
    members: Vec<Individual>,
    order: OrderIndex,
    residues: Option<ResidueClasses>,
}

impl PopulationStore {
    pub fn new(mode: StoreMode) -> Self {
        Self {
            mode,
            members: Vec::new(),
            order: OrderIndex::new(),
            residues: None,
        }
    }

    pub fn mode(&self) -> StoreMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, pos: usize) -> Option<&Individual> {
        self.members.get(pos)
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn order(&self) -> &OrderIndex {
        &self.order
    }

    /// Maintain per-residue fitness orders from now on (append mode only).
    pub fn enable_residue_classes(&mut self, modulus: usize) {
        assert!(modulus > 0);
        assert_eq!(self.mode, StoreMode::Append, "residue classes need an append-only store");
        let mut classes = ResidueClasses {
            modulus,
            classes: vec![OrderIndex::new(); modulus],
        };
        for (pos, ind) in self.members.iter().enumerate() {
            classes.insert(RankEntry { key: ind.key(), pos });
        }
        self.residues = Some(classes);
    }

    pub fn residue_classes(&self) -> Option<&ResidueClasses> {
        self.residues.as_ref()
    }

    /// Adds an evaluated individual and returns its position.
    pub fn push(&mut self, ind: Individual) -> usize {
        assert!(ind.fitness.is_finite(), "unevaluated or non-finite individual");
        if let Some(last) = self.members.last() {
            debug_assert!(ind.insertion_index > last.insertion_index || self.mode == StoreMode::Slot);
        }
        let pos = self.members.len();
        let entry = RankEntry { key: ind.key(), pos };
        self.order.insert(entry);
        if let Some(res) = self.residues.as_mut() {
            res.insert(entry);
        }
        self.members.push(ind);
        pos
    }

    /// Slot mode: puts `ind` at `pos` and returns the previous occupant.
    pub fn replace(&mut self, pos: usize, ind: Individual) -> Result<Individual> {
        assert_eq!(self.mode, StoreMode::Slot, "append-only stores never overwrite");
        assert!(ind.fitness.is_finite());
        if pos >= self.members.len() {
            return Err(Error::UnknownIndex(pos));
        }
        let old_key = self.members[pos].key();
        self.order.remove(&old_key);
        self.order.insert(RankEntry { key: ind.key(), pos });
        Ok(std::mem::replace(&mut self.members[pos], ind))
    }

    /// Slot mode: removes worst-ranked members until `size` remain.
    pub fn truncate_worst(&mut self, size: usize) -> Vec<Individual> {
        assert_eq!(self.mode, StoreMode::Slot, "append-only stores never shrink");
        let mut removed = Vec::new();
        while self.members.len() > size {
            let worst = *self.order.nth(self.order.len() - 1).expect("non-empty");
            self.order.remove(&worst.key);
            let last = self.members.len() - 1;
            if worst.pos != last {
                let moved_key = self.members[last].key();
                self.order.set_pos(&moved_key, worst.pos);
            }
            removed.push(self.members.swap_remove(worst.pos));
        }
        removed
    }

    /// 1-based fitness rank of the member at `pos`.
    pub fn rank_of(&self, pos: usize) -> Result<usize> {
        let ind = self.members.get(pos).ok_or(Error::UnknownIndex(pos))?;
        self.order
            .rank(&ind.key())
            .map(|r| r + 1)
            .ok_or(Error::UnknownIndex(pos))
    }

    /// Position of the member with 1-based rank `rank`.
    pub fn position_at_rank(&self, rank: usize) -> Option<usize> {
        rank.checked_sub(1)
            .and_then(|k| self.order.nth(k))
            .map(|e| e.pos)
    }

    pub fn best(&self) -> Option<&Individual> {
        self.order.nth(0).map(|e| &self.members[e.pos])
    }

    /// Positions in rank order.
    pub fn sorted_positions(&self) -> Vec<usize> {
        self.order.iter().map(|e| e.pos).collect()
    }
}

/// Bounded pool of replaced parents.
#[derive(Debug, Clone)]
pub struct Archive {
    members: Vec<Individual>,
    capacity: usize,
}

impl Archive {
    pub fn new(capacity: usize) -> Self {
        Self {
            members: Vec::with_capacity(capacity),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn get(&self, i: usize) -> Option<&Individual> {
        self.members.get(i)
    }

    /// Appends while below capacity, otherwise overwrites a random member.
    pub fn insert(&mut self, ind: Individual, rng: &mut RngStream) {
        if self.capacity == 0 {
            return;
        }
        if self.members.len() < self.capacity {
            self.members.push(ind);
        } else {
            let victim = rng.below(self.members.len());
            self.members[victim] = ind;
        }
    }

    /// Changes the capacity, evicting random members if needed.
    pub fn set_capacity(&mut self, capacity: usize, rng: &mut RngStream) {
        self.capacity = capacity;
        while self.members.len() > capacity {
            let victim = rng.below(self.members.len());
            self.members.swap_remove(victim);
        }
    }
}
