use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::system::JointSpectrum;

/// Lattice point by column `m` and index `k` within the ascending column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub m: i64,
    pub k: usize,
}

impl Node {
    pub fn new(m: i64, k: usize) -> Self {
        Self { m, k }
    }
}

/// Result of snapping a predicted `g` onto a column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snap {
    pub node: Node,
    /// Rescaled distance to the nearest point.
    pub d1: f64,
    /// Rescaled distance to the runner-up, infinite for one-point columns.
    pub d2: f64,
}

/// Joint spectrum indexed by column, with `g` measured in units of the
/// mean within-column spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLattice {
    pub n: i64,
    pub columns: BTreeMap<i64, Vec<f64>>,
    pub scaling: f64,
}

pub fn build_lattice(spec: &JointSpectrum) -> Result<SpectralLattice> {
    SpectralLattice::from_columns(spec.n, spec.columns.clone())
}

impl SpectralLattice {
    pub fn from_columns(n: i64, mut columns: BTreeMap<i64, Vec<f64>>) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidArgument(format!("lattice needs n >= 4, got {n}")));
        }
        for m in -(n - 2)..=(n - 2) {
            if columns.get(&m).is_none_or(|c| c.is_empty()) {
                return Err(Error::InvalidArgument(format!("column m = {m} is empty")));
            }
        }
        let mut gaps = 0.0;
        let mut count = 0usize;
        for col in columns.values_mut() {
            if col.iter().any(|g| !g.is_finite()) {
                return Err(Error::InvalidArgument("non-finite g in spectrum".into()));
            }
            col.sort_by(f64::total_cmp);
            for w in col.windows(2) {
                gaps += w[1] - w[0];
                count += 1;
            }
        }
        let scaling = gaps / count as f64;
        if !(scaling > 0.0) {
            return Err(Error::InvalidArgument("columns carry no spacing".into()));
        }
        Ok(Self { n, columns, scaling })
    }

    pub fn len(&self) -> usize {
        self.columns.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column(&self, m: i64) -> Option<&[f64]> {
        self.columns.get(&m).map(Vec::as_slice)
    }

    /// All points as `(m, g)`, ordered by column then `g`.
    pub fn points(&self) -> Vec<(i64, f64)> {
        self.columns
            .iter()
            .flat_map(|(&m, c)| c.iter().map(move |&g| (m, g)))
            .collect()
    }

    pub fn g(&self, node: Node) -> Option<f64> {
        self.column(node.m).and_then(|c| c.get(node.k)).copied()
    }

    /// Rescaled `g` of a node.
    pub fn height(&self, node: Node) -> Option<f64> {
        self.g(node).map(|g| g / self.scaling)
    }

    pub fn contains(&self, node: Node) -> bool {
        self.g(node).is_some()
    }

    /// Nearest point of column `m` to the rescaled height `h`.
    pub fn snap(&self, m: i64, h: f64) -> Option<Snap> {
        let col = self.column(m)?;
        if col.is_empty() {
            return None;
        }
        let g = h * self.scaling;
        let idx = col.partition_point(|&x| x < g);
        let mut cands: Vec<(f64, usize)> = [idx.checked_sub(2), idx.checked_sub(1), Some(idx), Some(idx + 1)]
            .into_iter()
            .flatten()
            .filter(|&k| k < col.len())
            .map(|k| ((col[k] / self.scaling - h).abs(), k))
            .collect();
        // ties resolved towards the lower index
        cands.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let (d1, k) = cands[0];
        let d2 = cands.get(1).map_or(f64::INFINITY, |c| c.0);
        Some(Snap {
            node: Node::new(m, k),
            d1,
            d2,
        })
    }

    pub(crate) fn column_span(&self, m: i64) -> Option<(f64, f64)> {
        let c = self.column(m)?;
        Some((*c.first()?, *c.last()?))
    }
}
