use super::lattice::{Node, Snap, SpectralLattice};
use super::matrix::MonodromyMatrix;
use crate::error::{Error, Result};

/// Relative gap below which two snap candidates count as ambiguous.
pub const AMBIGUITY_THRESHOLD: f64 = 0.1;
/// Largest rescaled distance between a prediction and its snapped point.
const MAX_SNAP_DISTANCE: f64 = 0.75;
/// A sheared `u` is replaced by `u + j v` once the nearest point of its
/// column is closer to the anchor by this fraction of `|v|`.
const REBASE_HYSTERESIS: f64 = 0.25;

/// Closed rectangular circuit in `(m, g)` traced by the cell anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSkeleton {
    pub center: (f64, f64),
    pub half_width: i64,
    pub g_bottom: f64,
    pub g_top: f64,
    /// Corners in visiting order as `(anchor column, g)`; first equals last.
    pub waypoints: Vec<(i64, f64)>,
}

impl LoopSkeleton {
    pub fn left(&self) -> i64 {
        self.center.0.round() as i64 - self.half_width
    }

    pub fn right(&self) -> i64 {
        self.center.0.round() as i64 + self.half_width
    }

    /// Same circuit in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.waypoints.reverse();
        out
    }

    /// This circuit followed by `other`; both must start at the same corner.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.waypoints.last() != other.waypoints.first() {
            return Err(Error::InvalidArgument("loops do not share a start corner".into()));
        }
        let mut out = self.clone();
        out.waypoints.extend(other.waypoints.iter().skip(1));
        Ok(out)
    }

    /// Whether the rectangle strictly encloses `(lz, g)`.
    pub fn encloses(&self, lz: f64, g: f64) -> bool {
        (self.left() as f64) < lz && lz < self.right() as f64 && self.g_bottom < g && g < self.g_top
    }
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    column: i64,
    g: f64,
    spacing: f64,
}

fn frame(lattice: &SpectralLattice, center: (f64, f64)) -> Result<Frame> {
    let (lz, g) = center;
    if !lz.is_finite() || !g.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite loop center ({lz}, {g})")));
    }
    let column = lz.round() as i64;
    let (lo, hi) = lattice
        .column_span(column)
        .ok_or_else(|| Error::InfeasibleLoop(format!("no column at l_z = {lz}")))?;
    if !(lo < g && g < hi) {
        return Err(Error::InfeasibleLoop(format!(
            "center g = {g} is outside column {column}, which spans [{lo}, {hi}]"
        )));
    }
    Ok(Frame {
        column,
        g,
        spacing: lattice.scaling,
    })
}

/// No cell on either leg may cover the center: near the center column the
/// top-leg anchors lie above it and the bottom-leg cells end below it.
fn top_clears(lattice: &SpectralLattice, f: &Frame, top: f64) -> bool {
    (f.column - 1..=f.column + 1).all(|m| {
        let Some(col) = lattice.column(m) else { return true };
        lattice
            .snap(m, top / lattice.scaling)
            .is_none_or(|p| col[p.node.k] > f.g)
    })
}

fn bottom_clears(lattice: &SpectralLattice, f: &Frame, bottom: f64) -> bool {
    (f.column - 1..=f.column + 1).all(|m| {
        let Some(col) = lattice.column(m) else { return true };
        lattice
            .snap(m, bottom / lattice.scaling)
            .is_none_or(|p| col.get(p.node.k + 1).is_none_or(|&g| g < f.g))
    })
}

/// Range `[lo, hi]` of `g` the bottom and top legs may use for half-width
/// `w`: anchors need a point above them in their column, and the `u`
/// column to the right must reach within half a spacing of both legs.
fn leg_bounds(lattice: &SpectralLattice, f: &Frame, w: i64) -> Result<(f64, f64)> {
    let limit = lattice.n - 3;
    let (first, last) = (f.column - w, f.column + w + 1);
    if first.abs() > limit || last.abs() > limit {
        return Err(Error::InfeasibleLoop(format!(
            "columns {first}..={last} exceed |m| <= {limit}, where cells no longer fit"
        )));
    }
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for j in first..last {
        let col = lattice
            .column(j)
            .filter(|c| c.len() >= 2)
            .ok_or_else(|| Error::InfeasibleLoop(format!("column {j} has fewer than two points")))?;
        lo = lo.max(col[0]);
        hi = hi.min(col[col.len() - 2]);
    }
    let (ulo, uhi) = lattice
        .column_span(last)
        .ok_or_else(|| Error::InfeasibleLoop(format!("no column {last}")))?;
    let half = 0.5 * f.spacing;
    Ok((lo.max(ulo - half), hi.min(uhi + half)))
}

fn skeleton(f: &Frame, center: (f64, f64), w: i64, bottom: f64, top: f64) -> LoopSkeleton {
    let (l, r) = (f.column - w, f.column + w);
    LoopSkeleton {
        center,
        half_width: w,
        g_bottom: bottom,
        g_top: top,
        waypoints: vec![(r, bottom), (r, top), (l, top), (l, bottom), (r, bottom)],
    }
}

/// Rectangle with anchor columns `c - w ..= c + w` and legs at `g_bottom`,
/// `g_top`, traversed counterclockwise from the bottom-right corner.
pub fn rectangle_loop(
    lattice: &SpectralLattice,
    center: (f64, f64),
    half_width: i64,
    g_bottom: f64,
    g_top: f64,
) -> Result<LoopSkeleton> {
    let f = frame(lattice, center)?;
    if half_width < 1 {
        return Err(Error::InvalidArgument(format!(
            "loop half-width must be >= 1, got {half_width}"
        )));
    }
    let (lo, hi) = leg_bounds(lattice, &f, half_width)?;
    if !(g_bottom >= lo && g_top <= hi) {
        return Err(Error::InfeasibleLoop(format!(
            "legs [{g_bottom}, {g_top}] leave the lattice range [{lo}, {hi}] for half-width {half_width}"
        )));
    }
    if !(bottom_clears(lattice, &f, g_bottom) && top_clears(lattice, &f, g_top)) {
        return Err(Error::InfeasibleLoop(format!(
            "legs [{g_bottom}, {g_top}] pass through cells covering g = {}",
            f.g
        )));
    }
    Ok(skeleton(&f, center, half_width, g_bottom, g_top))
}

/// Feasible rectangle of half-width `w` whose legs are at most `w`
/// spacings from the center.
fn widest_legs(lattice: &SpectralLattice, f: &Frame, w: i64) -> Option<(f64, f64)> {
    let (lo, hi) = leg_bounds(lattice, f, w).ok()?;
    let reach = w as f64 * f.spacing;
    let step = 0.25 * f.spacing;
    // start at distance `reach` and move each leg outward until it clears
    let mut bottom = lo.max(f.g - reach);
    while !bottom_clears(lattice, f, bottom) {
        bottom -= step;
        if bottom < lo {
            return None;
        }
    }
    let mut top = hi.min(f.g + reach);
    while !top_clears(lattice, f, top) {
        top += step;
        if top > hi {
            return None;
        }
    }
    Some((bottom, top))
}

/// Widest feasible loop around `center`.
pub fn default_loop(lattice: &SpectralLattice, center: (f64, f64)) -> Result<LoopSkeleton> {
    let f = frame(lattice, center)?;
    let (w, (bottom, top)) = (1..=(lattice.n - 4).max(0))
        .rev()
        .find_map(|w| widest_legs(lattice, &f, w).map(|legs| (w, legs)))
        .ok_or_else(|| {
            Error::InfeasibleLoop(format!(
                "no rectangle around ({}, {}) fits in the lattice",
                center.0, center.1
            ))
        })?;
    Ok(skeleton(&f, center, w, bottom, top))
}

/// Default loop with a fixed half-width.
pub fn loop_with_width(lattice: &SpectralLattice, center: (f64, f64), half_width: i64) -> Result<LoopSkeleton> {
    let f = frame(lattice, center)?;
    if half_width < 1 {
        return Err(Error::InvalidArgument(format!(
            "loop half-width must be >= 1, got {half_width}"
        )));
    }
    leg_bounds(lattice, &f, half_width)?;
    let (bottom, top) = widest_legs(lattice, &f, half_width)
        .ok_or_else(|| Error::InfeasibleLoop(format!("half-width {half_width} leaves no room around g = {}", f.g)))?;
    Ok(skeleton(&f, center, half_width, bottom, top))
}

/// Anchor plus the ends of the two basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub anchor: Node,
    /// End of `u`, in column `anchor.m + 1`.
    pub u_end: Node,
    /// End of `v`, in column `anchor.m`.
    pub v_end: Node,
}

impl Cell {
    fn delta(&self, end: Node) -> (i64, i64) {
        (end.m - self.anchor.m, end.k as i64 - self.anchor.k as i64)
    }

    /// `u` as an `(m, k)` index delta.
    pub fn u(&self) -> (i64, i64) {
        self.delta(self.u_end)
    }

    pub fn v(&self) -> (i64, i64) {
        self.delta(self.v_end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    PlusU,
    MinusU,
    PlusV,
    MinusV,
}

impl Move {
    pub fn name(self) -> &'static str {
        match self {
            Move::PlusU => "+u",
            Move::MinusU => "-u",
            Move::PlusV => "+v",
            Move::MinusV => "-v",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Every cell visited by the transport, starting with the initial cell.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CellPath {
    pub cells: Vec<Cell>,
    pub moves: Vec<Move>,
    /// `(cell index, j)` for every replacement `u -> u + j v`.
    pub rebasings: Vec<(usize, i64)>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transport {
    pub matrix: MonodromyMatrix,
    pub path: CellPath,
}

#[derive(Clone)]
struct Walker<'a> {
    lattice: &'a SpectralLattice,
    cell: Cell,
    path: CellPath,
    /// Shape change `(d su, d sv)` over the last move of each kind in the
    /// current leg, used when the same move repeats.
    memory: [Option<(f64, f64)>; 4],
    /// Set when the current step re-based `u`.
    rebased: bool,
    /// Rescaled g-range of the loop, bounding the pre-step settle.
    range: (f64, f64),
}

impl<'a> Walker<'a> {
    fn h(&self, node: Node) -> Result<f64> {
        self.lattice
            .height(node)
            .ok_or_else(|| Error::Transport(format!("node (m = {}, k = {}) is not in the lattice", node.m, node.k)))
    }

    fn shape(&self, cell: &Cell) -> Result<(f64, f64)> {
        let a = self.h(cell.anchor)?;
        Ok((self.h(cell.u_end)? - a, self.h(cell.v_end)? - a))
    }

    fn snap(&self, m: i64, h: f64) -> Result<Node> {
        let Snap { node, d1, d2 } = self
            .lattice
            .snap(m, h)
            .ok_or_else(|| Error::Transport(format!("cell left the lattice at column {m}")))?;
        if d1 > MAX_SNAP_DISTANCE {
            return Err(Error::Transport(format!(
                "predicted corner at m = {m}, g = {} is {d1:.3} spacings from the nearest point",
                h * self.lattice.scaling
            )));
        }
        if d2.is_finite() && (d2 - d1) / d2 < AMBIGUITY_THRESHOLD {
            return Err(Error::AmbiguousSnap {
                m,
                g: h * self.lattice.scaling,
                d1,
                d2,
            });
        }
        Ok(node)
    }

    /// Snaps a predicted `u` end. More than half an end gap past either end
    /// of the column, the column is continued with that gap and `u` is
    /// re-based onto the end point.
    fn snap_u(&mut self, m: i64, h: f64) -> Result<Node> {
        let col = self
            .lattice
            .column(m)
            .filter(|c| c.len() >= 2)
            .ok_or_else(|| Error::Transport(format!("cell left the lattice at column {m}")))?;
        let s = self.lattice.scaling;
        let last = col.len() - 1;
        let (lo, hi) = (col[0] / s, col[last] / s);
        let (gap_lo, gap_hi) = ((col[1] - col[0]) / s, (col[last] - col[last - 1]) / s);
        let overshoot = if h < lo - 0.5 * gap_lo {
            Some((Node::new(m, 0), ((lo - h) / gap_lo).round() as i64))
        } else if h > hi + 0.5 * gap_hi {
            Some((Node::new(m, last), -((h - hi) / gap_hi).round() as i64))
        } else {
            None
        };
        match overshoot {
            Some((node, j)) if j != 0 => {
                self.path.rebasings.push((self.path.cells.len(), j));
                self.rebased = true;
                Ok(node)
            }
            _ => self.snap(m, h),
        }
    }

    fn step(&mut self, mv: Move) -> Result<()> {
        self.rebased = false;
        let old = self.cell;
        let (su, sv) = self.shape(&old)?;
        let (dsu, dsv) = match self.path.moves.last() {
            Some(&last) if last == mv => self.memory[mv.index()].unwrap_or((0.0, 0.0)),
            _ => (0.0, 0.0),
        };
        let (pu, pv) = (su + dsu, sv + dsv);
        let m = old.anchor.m;
        let new = match mv {
            Move::PlusV => {
                let anchor = old.v_end;
                let ha = self.h(anchor)?;
                Cell {
                    anchor,
                    u_end: self.snap_u(m + 1, ha + pu)?,
                    v_end: self.snap(m, ha + pv)?,
                }
            }
            Move::MinusV => {
                let anchor = self.snap(m, self.h(old.anchor)? - pv)?;
                let ha = self.h(anchor)?;
                Cell {
                    anchor,
                    u_end: self.snap_u(m + 1, ha + pu)?,
                    v_end: old.anchor,
                }
            }
            Move::PlusU => {
                let anchor = old.u_end;
                let ha = self.h(anchor)?;
                Cell {
                    anchor,
                    u_end: self.snap_u(m + 2, ha + pu)?,
                    v_end: self.snap(m + 1, ha + pv)?,
                }
            }
            Move::MinusU => {
                let anchor = self.snap(m - 1, self.h(old.anchor)? - pu)?;
                let ha = self.h(anchor)?;
                Cell {
                    anchor,
                    u_end: old.anchor,
                    v_end: self.snap(m - 1, ha + pv)?,
                }
            }
        };
        if new.v_end.k <= new.anchor.k || new.anchor == old.anchor {
            return Err(Error::Transport(format!(
                "cell collapsed at m = {}, k = {}",
                new.anchor.m, new.anchor.k
            )));
        }
        let (new, reduced) = self.reduce(new)?;
        let rebased = reduced || self.rebased;
        let (nu, nv) = self.shape(&new)?;
        self.memory[mv.index()] = if rebased { None } else { Some((nu - su, nv - sv)) };
        self.cell = new;
        self.path.cells.push(new);
        self.path.moves.push(mv);
        Ok(())
    }

    /// Swaps a sheared `u` for the nearest point of its column.
    fn reduce(&mut self, cell: Cell) -> Result<(Cell, bool)> {
        let ha = self.h(cell.anchor)?;
        let sv = self.h(cell.v_end)? - ha;
        let current = (self.h(cell.u_end)? - ha).abs();
        let Some(best) = self.lattice.snap(cell.u_end.m, ha) else {
            return Ok((cell, false));
        };
        if best.node == cell.u_end || best.d1 >= current - REBASE_HYSTERESIS * sv {
            return Ok((cell, false));
        }
        let j = best.node.k as i64 - cell.u_end.k as i64;
        self.path.rebasings.push((self.path.cells.len(), j));
        Ok((
            Cell {
                u_end: best.node,
                ..cell
            },
            true,
        ))
    }

    fn anchor_distance(&self, node: Node, target: f64) -> Option<f64> {
        self.lattice.height(node).map(|h| (h - target).abs())
    }

    /// `+-v` steps until the anchor is the closest column point to `target`.
    fn settle(&mut self, target: f64) -> Result<()> {
        let bound = self.lattice.column(self.cell.anchor.m).map_or(0, <[f64]>::len);
        for _ in 0..=bound {
            let a = self.cell.anchor;
            let here = self.anchor_distance(a, target).unwrap_or(f64::INFINITY);
            let up = self.anchor_distance(Node::new(a.m, a.k + 1), target);
            let down =
                a.k.checked_sub(1)
                    .and_then(|k| self.anchor_distance(Node::new(a.m, k), target));
            if up.is_some_and(|d| d < here) {
                self.step(Move::PlusV)?;
            } else if down.is_some_and(|d| d < here) {
                self.step(Move::MinusV)?;
            } else {
                return Ok(());
            }
        }
        Err(Error::Transport("vertical leg did not settle".into()))
    }

    fn leg(&mut self, from: (i64, f64), to: (i64, f64)) -> Result<()> {
        self.memory = [None; 4];
        let target = to.1 / self.lattice.scaling;
        if from.0 == to.0 {
            return self.settle(target);
        }
        if from.1 != to.1 {
            return Err(Error::InvalidArgument("loop legs must be axis-aligned".into()));
        }
        while self.cell.anchor.m != to.0 {
            let mv = if to.0 > self.cell.anchor.m {
                Move::PlusU
            } else {
                Move::MinusU
            };
            let mut trial = self.clone();
            if trial.step(mv).is_ok() {
                *self = trial;
            } else {
                // the step left the lattice; aim it at the leg from a shifted anchor
                let (su, _) = self.shape(&self.cell)?;
                let shift = if mv == Move::PlusU { su } else { -su };
                self.settle((target - shift).clamp(self.range.0, self.range.1))?;
                self.step(mv)?;
            }
            self.settle(target)?;
        }
        Ok(())
    }
}

/// Carries the initial cell at the first waypoint around the skeleton and
/// reads the final basis in the initial one.
pub fn transport(lattice: &SpectralLattice, skeleton: &LoopSkeleton) -> Result<Transport> {
    let start = *skeleton
        .waypoints
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty loop".into()))?;
    if skeleton.waypoints.last() != Some(&start) {
        return Err(Error::InvalidArgument("loop is not closed".into()));
    }
    let s = lattice.scaling;
    let anchor = lattice
        .snap(start.0, start.1 / s)
        .ok_or_else(|| Error::InfeasibleLoop(format!("no column {}", start.0)))?
        .node;
    let v_end = Node::new(anchor.m, anchor.k + 1);
    let ha = lattice.height(anchor).expect("snapped node exists");
    if !lattice.contains(v_end) {
        return Err(Error::InfeasibleLoop(format!(
            "no point above the start anchor in column {}",
            anchor.m
        )));
    }
    let u_end = lattice
        .snap(anchor.m + 1, ha)
        .ok_or_else(|| Error::InfeasibleLoop(format!("no column {}", anchor.m + 1)))?
        .node;
    let initial = Cell { anchor, u_end, v_end };
    let mut walker = Walker {
        lattice,
        cell: initial,
        path: CellPath {
            cells: vec![initial],
            ..CellPath::default()
        },
        memory: [None; 4],
        rebased: false,
        range: (skeleton.g_bottom / s, skeleton.g_top / s),
    };
    for pair in skeleton.waypoints.windows(2) {
        walker.leg(pair[0], pair[1])?;
    }
    if walker.cell.anchor.m != anchor.m {
        return Err(Error::Transport("loop ended in a different column".into()));
    }
    walker.memory = [None; 4];
    while walker.cell.anchor.k != anchor.k {
        let mv = if walker.cell.anchor.k < anchor.k {
            Move::PlusV
        } else {
            Move::MinusV
        };
        walker.step(mv)?;
    }
    let fin = walker.cell;
    walker.path.closed = true;
    // final = transported * R with R the product of the re-basings
    let shear: i64 = walker.path.rebasings.iter().map(|&(_, j)| j).sum();
    let undo = MonodromyMatrix::new([[1, 0], [-shear, 1]]);
    let matrix = solve_basis(&initial, &fin)?.mul(&undo);
    Ok(Transport {
        matrix,
        path: walker.path,
    })
}

pub fn transport_cell(lattice: &SpectralLattice, skeleton: &LoopSkeleton) -> Result<MonodromyMatrix> {
    transport(lattice, skeleton).map(|t| t.matrix)
}

/// Columns of the result are the coordinates of the final `u`, `v` in the
/// initial basis; both cells share the anchor.
fn solve_basis(initial: &Cell, fin: &Cell) -> Result<MonodromyMatrix> {
    let (u0, v0) = (initial.u(), initial.v());
    let det = u0.0 * v0.1 - v0.0 * u0.1;
    if det == 0 {
        return Err(Error::Transport("initial basis is degenerate".into()));
    }
    let coords = |w: (i64, i64)| -> Result<(i64, i64)> {
        let x = w.0 * v0.1 - v0.0 * w.1;
        let y = u0.0 * w.1 - u0.1 * w.0;
        if x % det != 0 || y % det != 0 {
            return Err(Error::Transport(format!(
                "final basis vector {w:?} is not an integer combination"
            )));
        }
        Ok((x / det, y / det))
    };
    let (a, c) = coords(fin.u())?;
    let (b, d) = coords(fin.v())?;
    let m = MonodromyMatrix::new([[a, b], [c, d]]);
    if m.det().abs() != 1 {
        return Err(Error::Transport(format!(
            "transported basis has determinant {}",
            m.det()
        )));
    }
    Ok(m)
}
