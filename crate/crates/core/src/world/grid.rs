use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A cell of the tessellated workspace, addressed by `(row, col)`.
///
/// Coordinates are signed so that documents can name cells outside the grid;
/// such states are rejected by path validation rather than at parse time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct State {
    pub row: i32,
    pub col: i32,
}

impl State {
    pub const fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }

    /// Euclidean distance between cell centers, in cell units.
    pub fn distance(self, other: State) -> f64 {
        (self - other).norm()
    }

    pub fn offset(self, action: Action) -> State {
        State::new(self.row + action.drow, self.col + action.dcol)
    }
}

impl From<[i32; 2]> for State {
    fn from([row, col]: [i32; 2]) -> Self {
        State::new(row, col)
    }
}

impl From<State> for [i32; 2] {
    fn from(s: State) -> Self {
        [s.row, s.col]
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

impl std::ops::Sub for State {
    type Output = Action;

    fn sub(self, rhs: State) -> Action {
        Action::new(self.row - rhs.row, self.col - rhs.col)
    }
}

/// Transition between consecutive states, `a_i = s_i - s_{i-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Action {
    pub drow: i32,
    pub dcol: i32,
}

impl Action {
    pub const fn new(drow: i32, dcol: i32) -> Self {
        Self { drow, dcol }
    }

    pub fn norm(self) -> f64 {
        f64::from(self.drow).hypot(f64::from(self.dcol))
    }
}

impl std::ops::Sub for Action {
    type Output = Action;

    fn sub(self, rhs: Action) -> Action {
        Action::new(self.drow - rhs.drow, self.dcol - rhs.dcol)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("map document is empty")]
    Empty,
    #[error("line {line}: expected {expected} cells, found {found}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("line {line}, column {column}: unknown map character {found:?} (expected '.' or '#')")]
    UnknownChar { line: usize, column: usize, found: char },
    #[error("grid dimensions must be at least 1x1 and match the cell count")]
    BadDimensions,
}

/// Tessellated 2D workspace of viable (free) and unviable (occupied) cells.
///
/// Cells outside the grid are reported as blocked by [`GridMap::is_blocked`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridMap {
    width: usize,
    height: usize,
    viable: Vec<bool>,
    cell_size: f64,
}

impl GridMap {
    /// Builds a map from row-major viability flags.
    pub fn new(width: usize, height: usize, viable: Vec<bool>) -> Result<Self, MapError> {
        if width == 0 || height == 0 || viable.len() != width * height {
            return Err(MapError::BadDimensions);
        }
        Ok(Self {
            width,
            height,
            viable,
            cell_size: 1.0,
        })
    }

    pub fn open(width: usize, height: usize) -> Self {
        Self::new(width, height, vec![true; width * height]).expect("non-empty grid")
    }

    pub fn with_cell_size(mut self, cell_size: f64) -> Self {
        self.cell_size = cell_size;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn contains(&self, s: State) -> bool {
        s.row >= 0 && s.col >= 0 && (s.row as usize) < self.height && (s.col as usize) < self.width
    }

    fn index(&self, s: State) -> Option<usize> {
        self.contains(s).then(|| s.row as usize * self.width + s.col as usize)
    }

    pub fn is_viable(&self, s: State) -> bool {
        self.index(s).is_some_and(|i| self.viable[i])
    }

    /// True for unviable cells and for every cell outside the grid.
    pub fn is_blocked(&self, row: i64, col: i64) -> bool {
        if row < 0 || col < 0 || row >= self.height as i64 || col >= self.width as i64 {
            return true;
        }
        !self.viable[row as usize * self.width + col as usize]
    }

    pub fn set_viable(&mut self, s: State, viable: bool) {
        if let Some(i) = self.index(s) {
            self.viable[i] = viable;
        }
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.height as i32).flat_map(move |r| (0..self.width as i32).map(move |c| State::new(r, c)))
    }

    pub fn viable_states(&self) -> impl Iterator<Item = State> + '_ {
        self.states().filter(|&s| self.is_viable(s))
    }

    pub fn unviable_states(&self) -> impl Iterator<Item = State> + '_ {
        self.states().filter(|&s| !self.is_viable(s))
    }

    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for r in 0..self.height {
            for c in 0..self.width {
                out.push(if self.viable[r * self.width + c] { '.' } else { '#' });
            }
            out.push('\n');
        }
        out
    }
}

/// Parses the ASCII map format: one row per line, `.` viable, `#` unviable.
pub fn load_map(text: &str) -> Result<GridMap, MapError> {
    let mut lines: Vec<&str> = text.lines().map(str::trim_end).collect();
    while lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    if lines.is_empty() {
        return Err(MapError::Empty);
    }
    let width = lines[0].chars().count();
    if width == 0 {
        return Err(MapError::Empty);
    }
    let mut viable = Vec::with_capacity(width * lines.len());
    for (i, line) in lines.iter().enumerate() {
        let found = line.chars().count();
        if found != width {
            return Err(MapError::Ragged {
                line: i + 1,
                expected: width,
                found,
            });
        }
        for (j, ch) in line.chars().enumerate() {
            match ch {
                '.' => viable.push(true),
                '#' => viable.push(false),
                other => {
                    return Err(MapError::UnknownChar {
                        line: i + 1,
                        column: j + 1,
                        found: other,
                    })
                }
            }
        }
    }
    GridMap::new(width, lines.len(), viable)
}
