//! Index newtypes and the two bitset types (agent groups, action sets)
//! every other module is built on.

use alloc::vec::Vec;
use core::fmt;

/// Upper bound on declared agents. A materialized step holds one entry per
/// non-empty group, so this keeps a step at most 1023 entries.
pub const MAX_AGENTS: usize = 10;
/// Upper bound on declared atomic actions (one bit each in [`ActSet`]).
pub const MAX_ACTIONS: usize = 64;

macro_rules! index_type {
    ($(#[$m:meta])* $name:ident($inner:ty)) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub $inner);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

index_type!(AgentId(u16));
index_type!(ActionId(u16));
index_type!(WorldId(u32));
index_type!(AtomId(u32));
index_type!(RoleId(u32));
index_type!(ContextId(u32));
index_type!(ObjectId(u32));
index_type!(ValueId(u32));
index_type!(
    /// Index of a materialized step inside a [`crate::event::StepUniverse`].
    StepId(u32)
);

/// A set of agents, stored as a bitmask over [`AgentId`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Group(pub u32);

impl Group {
    pub const EMPTY: Group = Group(0);

    pub fn singleton(a: AgentId) -> Group {
        Group(1 << a.0)
    }

    pub fn all(n: usize) -> Group {
        if n == 0 {
            Group(0)
        } else {
            Group(((1u64 << n) - 1) as u32)
        }
    }

    pub fn from_agents<I: IntoIterator<Item = AgentId>>(it: I) -> Group {
        it.into_iter().fold(Group(0), |g, a| g.with(a))
    }

    pub fn with(self, a: AgentId) -> Group {
        Group(self.0 | (1 << a.0))
    }

    pub fn without(self, a: AgentId) -> Group {
        Group(self.0 & !(1 << a.0))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, a: AgentId) -> bool {
        self.0 & (1 << a.0) != 0
    }

    pub fn union(self, other: Group) -> Group {
        Group(self.0 | other.0)
    }

    pub fn intersection(self, other: Group) -> Group {
        Group(self.0 & other.0)
    }

    pub fn is_subset(self, other: Group) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn agents(self) -> impl Iterator<Item = AgentId> {
        let bits = self.0;
        (0..32u16).filter(move |i| bits & (1 << i) != 0).map(AgentId)
    }

    /// All non-empty subsets, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Group> {
        let full = self.0;
        let mut cur: u32 = 0;
        let mut done = full == 0;
        core::iter::from_fn(move || {
            if done {
                return None;
            }
            cur = cur.wrapping_sub(full) & full;
            if cur == 0 {
                done = true;
                return None;
            }
            Some(Group(cur))
        })
    }

    /// Pairs `(left, right)` of non-empty subsets whose union is `self`.
    pub fn covers(self) -> Vec<(Group, Group)> {
        let subs: Vec<Group> = self.subsets().collect();
        let mut out = Vec::new();
        for &l in &subs {
            for &r in &subs {
                if l.union(r) == self {
                    out.push((l, r));
                }
            }
        }
        out
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.agents().map(|a| a.0)).finish()
    }
}

/// A set of atomic actions, stored as a bitmask over [`ActionId`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ActSet(pub u64);

impl ActSet {
    pub const EMPTY: ActSet = ActSet(0);

    pub fn singleton(a: ActionId) -> ActSet {
        ActSet(1 << a.0)
    }

    pub fn from_actions<I: IntoIterator<Item = ActionId>>(it: I) -> ActSet {
        it.into_iter().fold(ActSet(0), |s, a| ActSet(s.0 | (1 << a.0)))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, a: ActionId) -> bool {
        self.0 & (1 << a.0) != 0
    }

    pub fn union(self, other: ActSet) -> ActSet {
        ActSet(self.0 | other.0)
    }

    pub fn difference(self, other: ActSet) -> ActSet {
        ActSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: ActSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn actions(self) -> impl Iterator<Item = ActionId> {
        let bits = self.0;
        (0..64u16).filter(move |i| bits & (1 << i) != 0).map(ActionId)
    }
}

impl fmt::Debug for ActSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.actions().map(|a| a.0)).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_of_three() {
        let g = Group(0b111);
        let subs: Vec<_> = g.subsets().collect();
        assert_eq!(subs.len(), 7);
        assert!(subs.iter().all(|s| s.is_subset(g) && !s.is_empty()));
        assert_eq!(Group::EMPTY.subsets().count(), 0);
    }

    #[test]
    fn covers_of_pair() {
        // {1},{2} in either order plus every pair involving the full group
        let c = Group(0b11).covers();
        assert_eq!(c.len(), 7);
        assert!(c.iter().all(|(l, r)| l.union(*r) == Group(0b11)));
    }
}
