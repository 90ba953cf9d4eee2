//! Dense bitmask view of `Q_n - F` used by the searches and constructions.
//!
//! Vertices are plain labels; `live[v]` has bit `b` set when the edge from
//! `v` across bit position `b` is not faulty.

use crate::cube::{drop_bit, insert_bit};
use crate::fault::FaultSet;

/// Largest cube the dense representation is built for.
pub(crate) const DENSE_MAX_DIM: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LiveCube {
    n: u32,
    live: Vec<u32>,
}

impl LiveCube {
    pub fn full(n: u32) -> LiveCube {
        assert!(n <= DENSE_MAX_DIM, "Q_{n} is too large for the dense solver");
        let mask = if n == 0 { 0 } else { (1u32 << n) - 1 };
        LiveCube { n, live: vec![mask; 1usize << n] }
    }

    pub fn from_faults(faults: &FaultSet) -> LiveCube {
        let mut g = LiveCube::full(faults.cube_dim());
        for e in faults.iter() {
            let (a, b) = e.endpoints();
            g.kill(a.label() as usize, b.label() as usize);
        }
        g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> usize {
        self.live.len()
    }

    pub fn mask(&self, v: usize) -> u32 {
        self.live[v]
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.live[v].count_ones()
    }

    pub fn is_live(&self, u: usize, v: usize) -> bool {
        let d = u ^ v;
        d.is_power_of_two() && self.live[u] & (d as u32) != 0
    }

    pub fn kill(&mut self, u: usize, v: usize) {
        let d = u ^ v;
        debug_assert!(d.is_power_of_two());
        self.live[u] &= !(d as u32);
        self.live[v] &= !(d as u32);
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let m = self.live[v];
        (0..self.n).filter(move |b| m >> b & 1 == 1).map(move |b| v ^ (1 << b))
    }

    /// The half with bit `bit` equal to `theta`, relabelled into `Q_{n-1}`.
    pub fn half(&self, bit: u32, theta: u8) -> LiveCube {
        let n = self.n - 1;
        let live = (0..1usize << n)
            .map(|sub| {
                let v = insert_bit(sub as u64, bit, theta) as usize;
                drop_bit(u64::from(self.live[v]), bit) as u32
            })
            .collect();
        LiveCube { n, live }
    }

    /// Faulty edges as a [`FaultSet`].
    #[cfg(test)]
    pub fn to_faults(&self) -> FaultSet {
        let mut f = FaultSet::new(self.n).expect("valid dimension");
        for v in 0..self.size() {
            for b in 0..self.n {
                let w = v ^ (1 << b);
                if v < w && self.live[v] >> b & 1 == 0 {
                    f.insert(crate::cube::Edge::from_raw(self.n, v as u64, w as u64)).unwrap();
                }
            }
        }
        f
    }
}

pub(crate) fn parity(v: usize) -> u8 {
    (v.count_ones() & 1) as u8
}

pub(crate) fn drop_label(v: usize, bit: u32) -> usize {
    drop_bit(v as u64, bit) as usize
}

pub(crate) fn lift_label(v: usize, bit: u32, theta: u8) -> usize {
    insert_bit(v as u64, bit, theta) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves_keep_inner_faults() {
        let f = FaultSet::from_edges(3, ["000 001".parse().unwrap(), "100 110".parse().unwrap()]).unwrap();
        let g = LiveCube::from_faults(&f);
        assert!(!g.is_live(0, 1));
        assert!(g.is_live(0, 2));
        assert_eq!(g.degree(0), 2);
        let top = g.half(2, 1);
        assert_eq!(top.n(), 2);
        assert!(!top.is_live(0, 2));
        assert_eq!(g.to_faults(), f);
    }
}
