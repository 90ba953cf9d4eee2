//! Bit-level model of the hypercube `Q_n`.
//!
//! Coordinates are numbered `1..=n` from the left of the binary string, so
//! coordinate `i` lives at bit position `n - i` of the label (coordinate 1 is
//! the most significant bit). All public APIs speak in 1-based [`Dim`]s; the
//! bit position is an internal detail.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest dimension whose labels fit in a `u64` together with `1 << n`.
pub const MAX_DIM: u32 = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubeError {
    #[error("dimension count {0} out of range 1..={MAX_DIM}")]
    BadCubeDimension(u32),
    #[error("direction {j} out of range 1..={n}")]
    BadDirection { n: u32, j: u32 },
    #[error("label {label} does not fit in {n} bits")]
    LabelOutOfRange { n: u32, label: u64 },
    #[error("vertices {0} and {1} are at distance {2}, not an edge")]
    NotAdjacent(String, String, u32),
    #[error("vertices belong to cubes of different dimension ({0} vs {1})")]
    DimensionMismatch(u32, u32),
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// A direction (coordinate index) `j` in `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dim(u32);

impl Dim {
    pub fn new(n: u32, j: u32) -> Result<Dim, CubeError> {
        if j == 0 || j > n {
            return Err(CubeError::BadDirection { n, j });
        }
        Ok(Dim(j))
    }

    pub(crate) fn from_bit(n: u32, bit: u32) -> Dim {
        debug_assert!(bit < n);
        Dim(n - bit)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Bit position of this coordinate in an `n`-bit label.
    pub fn bit(self, n: u32) -> u32 {
        debug_assert!(self.0 >= 1 && self.0 <= n);
        n - self.0
    }

    /// All directions of `Q_n` in increasing order.
    pub fn all(n: u32) -> impl Iterator<Item = Dim> {
        (1..=n).map(Dim)
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn check_cube_dim(n: u32) -> Result<(), CubeError> {
    if n == 0 || n > MAX_DIM {
        Err(CubeError::BadCubeDimension(n))
    } else {
        Ok(())
    }
}

/// Removes bit `bit` from `label`, shifting the higher bits down.
#[inline]
pub(crate) fn drop_bit(label: u64, bit: u32) -> u64 {
    let low = label & ((1u64 << bit) - 1);
    let high = (label >> (bit + 1)) << bit;
    low | high
}

/// Inverse of [`drop_bit`]: opens a gap at `bit` and writes `value` there.
#[inline]
pub(crate) fn insert_bit(label: u64, bit: u32, value: u8) -> u64 {
    let low = label & ((1u64 << bit) - 1);
    let high = (label >> bit) << (bit + 1);
    low | high | (u64::from(value & 1) << bit)
}

/// A vertex of `Q_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    n: u32,
    label: u64,
}

impl Vertex {
    pub fn new(n: u32, label: u64) -> Result<Vertex, CubeError> {
        check_cube_dim(n)?;
        if label >> n != 0 {
            return Err(CubeError::LabelOutOfRange { n, label });
        }
        Ok(Vertex { n, label })
    }

    pub(crate) fn from_raw(n: u32, label: u64) -> Vertex {
        debug_assert!(label >> n == 0);
        Vertex { n, label }
    }

    pub fn label(self) -> u64 {
        self.label
    }

    /// Dimension of the cube this vertex belongs to.
    pub fn cube_dim(self) -> u32 {
        self.n
    }

    /// Parity: coordinate sum mod 2 (0 = white, 1 = black).
    pub fn parity(self) -> u8 {
        (self.label.count_ones() & 1) as u8
    }

    /// Value of coordinate `j`.
    pub fn coord(self, j: Dim) -> u8 {
        ((self.label >> j.bit(self.n)) & 1) as u8
    }

    /// The unique neighbor across direction `j`.
    pub fn neighbor(self, j: Dim) -> Vertex {
        Vertex { n: self.n, label: self.label ^ (1u64 << j.bit(self.n)) }
    }

    pub fn hamming(self, other: Vertex) -> u32 {
        (self.label ^ other.label).count_ones()
    }

    pub fn is_adjacent(self, other: Vertex) -> bool {
        self.n == other.n && self.hamming(other) == 1
    }

    /// Drops coordinate `j`; returns its value and the vertex of `Q_{n-1}`.
    pub fn project(self, j: Dim) -> (u8, Vertex) {
        let bit = j.bit(self.n);
        let theta = ((self.label >> bit) & 1) as u8;
        (theta, Vertex { n: self.n - 1, label: drop_bit(self.label, bit) })
    }

    /// Inverse of [`Vertex::project`]: `j` is a direction of the larger cube.
    pub fn embed(sub: Vertex, j: Dim, theta: u8) -> Vertex {
        let n = sub.n + 1;
        Vertex { n, label: insert_bit(sub.label, j.bit(n), theta) }
    }

    /// All `2^n` vertices in label order.
    pub fn all(n: u32) -> impl Iterator<Item = Vertex> {
        (0..1u64 << n).map(move |label| Vertex { n, label })
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.n).rev() {
            f.write_str(if (self.label >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Vertex {
    type Err = CubeError;

    fn from_str(s: &str) -> Result<Vertex, CubeError> {
        let s = s.trim();
        if s.is_empty() || s.len() as u32 > MAX_DIM || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(CubeError::Parse(s.to_string()));
        }
        let label = u64::from_str_radix(s, 2).map_err(|_| CubeError::Parse(s.to_string()))?;
        Vertex::new(s.len() as u32, label)
    }
}

/// An edge of `Q_n`, stored canonically as its endpoint with a 0 in the edge's
/// coordinate plus that coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    low: Vertex,
    bit: u32,
}

impl Edge {
    pub fn new(x: Vertex, y: Vertex) -> Result<Edge, CubeError> {
        if x.n != y.n {
            return Err(CubeError::DimensionMismatch(x.n, y.n));
        }
        let d = x.hamming(y);
        if d != 1 {
            return Err(CubeError::NotAdjacent(x.to_string(), y.to_string(), d));
        }
        let diff = x.label ^ y.label;
        Ok(Edge { low: Vertex { n: x.n, label: x.label & !diff }, bit: diff.trailing_zeros() })
    }

    /// The edge leaving `v` in direction `j`.
    pub fn along(v: Vertex, j: Dim) -> Edge {
        let bit = j.bit(v.n);
        Edge { low: Vertex { n: v.n, label: v.label & !(1u64 << bit) }, bit }
    }

    pub(crate) fn from_raw(n: u32, a: u64, b: u64) -> Edge {
        let diff = a ^ b;
        debug_assert_eq!(diff.count_ones(), 1);
        Edge { low: Vertex { n, label: a & !diff }, bit: diff.trailing_zeros() }
    }

    pub fn cube_dim(self) -> u32 {
        self.low.n
    }

    pub fn dim(self) -> Dim {
        Dim::from_bit(self.low.n, self.bit)
    }

    pub(crate) fn bit(self) -> u32 {
        self.bit
    }

    /// Both endpoints, the one with the 0 coordinate first.
    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.low, Vertex { n: self.low.n, label: self.low.label | (1u64 << self.bit) })
    }

    /// Parity of the endpoint with the smaller coordinate sum.
    pub fn parity(self) -> u8 {
        self.low.parity()
    }

    pub fn contains(self, v: Vertex) -> bool {
        let (a, b) = self.endpoints();
        a == v || b == v
    }

    /// The endpoint opposite `v`, if `v` is an endpoint.
    pub fn other(self, v: Vertex) -> Option<Vertex> {
        let (a, b) = self.endpoints();
        if v == a {
            Some(b)
        } else if v == b {
            Some(a)
        } else {
            None
        }
    }

    /// True when the two edges share an endpoint (or are equal).
    pub fn touches(self, other: Edge) -> bool {
        let (a, b) = other.endpoints();
        self.contains(a) || self.contains(b)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.endpoints();
        write!(f, "{a} {b}")
    }
}

impl FromStr for Edge {
    type Err = CubeError;

    fn from_str(s: &str) -> Result<Edge, CubeError> {
        let mut it = s.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(CubeError::Parse(s.to_string()));
        };
        Edge::new(a.parse()?, b.parse()?)
    }
}

/// Dimension of the edge `xy`, rejecting pairs at distance other than one.
pub fn edge_dimension(x: Vertex, y: Vertex) -> Result<Dim, CubeError> {
    Edge::new(x, y).map(Edge::dim)
}

/// The layer `E_j`: all `2^{n-1}` edges of direction `j`.
pub fn layer_edges(n: u32, j: Dim) -> Vec<Edge> {
    let bit = j.bit(n);
    (0..1u64 << (n - 1))
        .map(|sub| Edge { low: Vertex { n, label: insert_bit(sub, bit, 0) }, bit })
        .collect()
}

/// Every edge of `Q_n`, layer by layer.
pub fn all_edges(n: u32) -> Vec<Edge> {
    Dim::all(n).flat_map(|j| layer_edges(n, j)).collect()
}
