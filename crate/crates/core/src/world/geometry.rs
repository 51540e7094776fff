//! Exact segment and triangle predicates on the half-cell lattice.
//!
//! Points are stored in doubled coordinates: cell `(r, c)` has its center at
//! `(2r, 2c)` and occupies the open square `(2r-1, 2r+1) x (2c-1, 2c+1)`.
//! Corners therefore have odd components. All predicates are evaluated in
//! integer arithmetic.
//!
//! A segment is blocked when it meets the interior of the blocked region, the
//! union of unviable cells and everything outside the grid. Touching a corner
//! or running along the boundary between a viable and an unviable cell does not
//! block; running along the shared edge of two blocked cells does.

use serde::{Serialize, Serializer};

use super::grid::{GridMap, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub row2: i64,
    pub col2: i64,
}

impl LatticePoint {
    pub const fn new(row2: i64, col2: i64) -> Self {
        Self { row2, col2 }
    }

    pub fn center(s: State) -> Self {
        Self::new(2 * i64::from(s.row), 2 * i64::from(s.col))
    }

    pub fn is_corner(self) -> bool {
        self.row2.rem_euclid(2) == 1 && self.col2.rem_euclid(2) == 1
    }

    pub fn row(self) -> f64 {
        self.row2 as f64 / 2.0
    }

    pub fn col(self) -> f64 {
        self.col2 as f64 / 2.0
    }

    /// Euclidean distance in cell units.
    pub fn distance(self, other: LatticePoint) -> f64 {
        ((self.row2 - other.row2) as f64).hypot((self.col2 - other.col2) as f64) / 2.0
    }

    /// The four cells sharing this corner, as `(row, col)`.
    pub fn incident_cells(self) -> [(i64, i64); 4] {
        debug_assert!(self.is_corner());
        let (r0, c0) = ((self.row2 - 1).div_euclid(2), (self.col2 - 1).div_euclid(2));
        [(r0, c0), (r0, c0 + 1), (r0 + 1, c0), (r0 + 1, c0 + 1)]
    }
}

impl Serialize for LatticePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.row(), self.col()].serialize(serializer)
    }
}

/// Twice the signed area of `(o, a, b)`; positive when `b` lies counter-clockwise of `o -> a`
/// in `(row, col)` axes.
pub fn cross(o: LatticePoint, a: LatticePoint, b: LatticePoint) -> i64 {
    (a.row2 - o.row2) * (b.col2 - o.col2) - (a.col2 - o.col2) * (b.row2 - o.row2)
}

fn cell_corners(row: i64, col: i64) -> [LatticePoint; 4] {
    let (r, c) = (2 * row, 2 * col);
    [
        LatticePoint::new(r - 1, c - 1),
        LatticePoint::new(r - 1, c + 1),
        LatticePoint::new(r + 1, c - 1),
        LatticePoint::new(r + 1, c + 1),
    ]
}

/// Cells whose open square overlaps the doubled-coordinate box `[lo, hi]` with positive area
/// or along a degenerate extent.
fn cell_range(lo: i64, hi: i64) -> std::ops::RangeInclusive<i64> {
    // 2r + 1 > lo and 2r - 1 < hi
    let first = (lo - 1).div_euclid(2) + 1;
    let last = -(-(hi + 1)).div_euclid(2) - 1;
    first..=last
}

/// Whether the closed segment `a-b` meets the open square of cell `(row, col)`.
pub fn segment_meets_cell(a: LatticePoint, b: LatticePoint, row: i64, col: i64) -> bool {
    let (r0, r1) = (2 * row - 1, 2 * row + 1);
    let (c0, c1) = (2 * col - 1, 2 * col + 1);
    if a == b {
        return a.row2 > r0 && a.row2 < r1 && a.col2 > c0 && a.col2 < c1;
    }
    if a.row2.max(b.row2) <= r0 || a.row2.min(b.row2) >= r1 {
        return false;
    }
    if a.col2.max(b.col2) <= c0 || a.col2.min(b.col2) >= c1 {
        return false;
    }
    let sides = cell_corners(row, col).map(|p| cross(a, b, p));
    !(sides.iter().all(|&s| s >= 0) || sides.iter().all(|&s| s <= 0))
}

/// Whether the segment `a-b` crosses the interior of the blocked region of `map`.
pub fn segment_blocked(map: &GridMap, a: LatticePoint, b: LatticePoint) -> bool {
    let rows = cell_range(a.row2.min(b.row2), a.row2.max(b.row2));
    let cols = cell_range(a.col2.min(b.col2), a.col2.max(b.col2));
    for r in rows {
        for c in cols.clone() {
            if map.is_blocked(r, c) && segment_meets_cell(a, b, r, c) {
                return true;
            }
        }
    }
    runs_between_blocked_cells(map, a, b)
}

/// Axis-aligned segments on a cell boundary line are inside the blocked region wherever both
/// neighbouring cells are blocked.
fn runs_between_blocked_cells(map: &GridMap, a: LatticePoint, b: LatticePoint) -> bool {
    if a.row2 == b.row2 && a.row2.rem_euclid(2) == 1 && a.col2 != b.col2 {
        let (above, below) = ((a.row2 - 1) / 2, (a.row2 + 1) / 2);
        let (lo, hi) = (a.col2.min(b.col2), a.col2.max(b.col2));
        return cell_range(lo, hi)
            .filter(|&c| (2 * c + 1).min(hi) > (2 * c - 1).max(lo))
            .any(|c| map.is_blocked(above, c) && map.is_blocked(below, c));
    }
    if a.col2 == b.col2 && a.col2.rem_euclid(2) == 1 && a.row2 != b.row2 {
        let (left, right) = ((a.col2 - 1) / 2, (a.col2 + 1) / 2);
        let (lo, hi) = (a.row2.min(b.row2), a.row2.max(b.row2));
        return cell_range(lo, hi)
            .filter(|&r| (2 * r + 1).min(hi) > (2 * r - 1).max(lo))
            .any(|r| map.is_blocked(r, left) && map.is_blocked(r, right));
    }
    false
}

/// Whether the open triangle `(a, b, c)` meets the open square of cell `(row, col)`.
/// Degenerate triangles have empty interior and meet nothing.
pub fn triangle_meets_cell(a: LatticePoint, b: LatticePoint, c: LatticePoint, row: i64, col: i64) -> bool {
    let orient = cross(a, b, c).signum();
    if orient == 0 {
        return false;
    }
    let (r0, r1) = (2 * row - 1, 2 * row + 1);
    let (c0, c1) = (2 * col - 1, 2 * col + 1);
    let rmax = a.row2.max(b.row2).max(c.row2);
    let rmin = a.row2.min(b.row2).min(c.row2);
    let cmax = a.col2.max(b.col2).max(c.col2);
    let cmin = a.col2.min(b.col2).min(c.col2);
    if rmax <= r0 || rmin >= r1 || cmax <= c0 || cmin >= c1 {
        return false;
    }
    let corners = cell_corners(row, col);
    for (p, q) in [(a, b), (b, c), (c, a)] {
        if corners.iter().all(|&k| cross(p, q, k) * orient <= 0) {
            return false;
        }
    }
    true
}

/// Blocked cells whose interior meets the open triangle `(a, b, c)`.
pub fn blocked_cells_in_triangle(map: &GridMap, a: LatticePoint, b: LatticePoint, c: LatticePoint) -> Vec<(i64, i64)> {
    let rows = cell_range(a.row2.min(b.row2).min(c.row2), a.row2.max(b.row2).max(c.row2));
    let cols = cell_range(a.col2.min(b.col2).min(c.col2), a.col2.max(b.col2).max(c.col2));
    let mut out = Vec::new();
    for r in rows {
        for col in cols.clone() {
            if map.is_blocked(r, col) && triangle_meets_cell(a, b, c, r, col) {
                out.push((r, col));
            }
        }
    }
    out
}

/// Corners of blocked cells, as lattice points.
pub fn corners_of(cell: (i64, i64)) -> [LatticePoint; 4] {
    cell_corners(cell.0, cell.1)
}

/// Float variant of [`segment_meets_cell`] for rays with arbitrary endpoints, given in cell
/// units. Contacts within `eps` of the square's boundary count as touching.
pub fn ray_meets_cell(a: (f64, f64), b: (f64, f64), row: i64, col: i64, eps: f64) -> bool {
    let (r0, r1) = (row as f64 - 0.5, row as f64 + 0.5);
    let (c0, c1) = (col as f64 - 0.5, col as f64 + 0.5);
    if a.0.max(b.0) <= r0 + eps || a.0.min(b.0) >= r1 - eps {
        return false;
    }
    if a.1.max(b.1) <= c0 + eps || a.1.min(b.1) >= c1 - eps {
        return false;
    }
    let (dr, dc) = (b.0 - a.0, b.1 - a.1);
    let len = dr.hypot(dc);
    if len == 0.0 {
        return true;
    }
    let side = |p: (f64, f64)| (dr * (p.1 - a.1) - dc * (p.0 - a.0)) / len;
    let sides = [side((r0, c0)), side((r0, c1)), side((r1, c0)), side((r1, c1))];
    !(sides.iter().all(|&s| s >= -eps) || sides.iter().all(|&s| s <= eps))
}

/// Whether a float segment crosses any blocked cell (including cells outside the grid).
pub fn ray_blocked(map: &GridMap, a: (f64, f64), b: (f64, f64), eps: f64) -> bool {
    let r_lo = (a.0.min(b.0) + 0.5).floor() as i64;
    let r_hi = (a.0.max(b.0) + 0.5).ceil() as i64;
    let c_lo = (a.1.min(b.1) + 0.5).floor() as i64;
    let c_hi = (a.1.max(b.1) + 0.5).ceil() as i64;
    for r in r_lo - 1..=r_hi {
        for c in c_lo - 1..=c_hi {
            if map.is_blocked(r, c) && ray_meets_cell(a, b, r, c, eps) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::load_map;

    fn p(r2: i64, c2: i64) -> LatticePoint {
        LatticePoint::new(r2, c2)
    }

    #[test]
    fn corner_touch_does_not_block() {
        // Cells (0,1) and (1,0) blocked; diagonal from (0,0) to (1,1) passes their shared corner.
        let map = load_map(".#\n#.").unwrap();
        assert!(!segment_blocked(&map, p(0, 0), p(2, 2)));
        assert!(segment_blocked(&map, p(0, 0), p(0, 2)));
    }

    #[test]
    fn edge_between_free_and_blocked_is_clear() {
        let map = load_map("...\n###\n...").unwrap();
        // Along row boundary 0.5 (doubled 1) between free row 0 and blocked row 1.
        assert!(!segment_blocked(&map, p(1, 0), p(1, 4)));
        // Crossing the wall.
        assert!(segment_blocked(&map, p(0, 0), p(4, 0)));
    }

    #[test]
    fn shared_edge_of_two_blocked_cells_blocks() {
        let map = load_map("....\n.##.\n.##.\n....").unwrap();
        // Row boundary between rows 1 and 2, through the middle of the 2x2 block.
        assert!(segment_blocked(&map, p(3, -1), p(3, 7)));
        // Column boundary 1.5 (doubled 3) between blocked cols 1 and 2.
        assert!(segment_blocked(&map, p(1, 3), p(5, 3)));
    }

    #[test]
    fn triangle_predicate() {
        // Triangle with vertices at cell centers (0,0), (0,4), (4,0) in doubled coords covers cell (1,0)'s interior partly.
        assert!(triangle_meets_cell(p(0, 0), p(0, 4), p(4, 0), 1, 0));
        assert!(!triangle_meets_cell(p(0, 0), p(0, 4), p(4, 0), 2, 2));
        // Degenerate triangle.
        assert!(!triangle_meets_cell(p(0, 0), p(2, 2), p(4, 4), 1, 1));
        // Triangle touching a cell only at its corner.
        assert!(!triangle_meets_cell(p(1, 1), p(1, 5), p(5, 1), 0, 0));
    }

    #[test]
    fn cell_range_bounds() {
        assert_eq!(cell_range(0, 0), 0..=0);
        assert!(cell_range(1, 1).is_empty());
        assert_eq!(cell_range(-1, 3), 0..=1);
        assert_eq!(cell_range(-2, 2), -1..=1);
    }

    #[test]
    fn ray_predicate_matches_exact_on_lattice_segments() {
        let map = load_map("..#..\n.#...\n.....\n...#.\n#....").unwrap();
        let pts: Vec<_> = (0..5).flat_map(|r| (0..5).map(move |c| p(2 * r, 2 * c))).collect();
        for &a in &pts {
            for &b in &pts {
                let exact = (0..5).any(|r| (0..5).any(|c| map.is_blocked(r, c) && segment_meets_cell(a, b, r, c)));
                let float = ray_blocked(&map, (a.row(), a.col()), (b.row(), b.col()), 1e-9);
                assert_eq!(exact, float, "{a:?} -> {b:?}");
            }
        }
    }
}
