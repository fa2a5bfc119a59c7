//! 2D raster-map path planning.
//!
//! Maps are `n x n` occupancy grids (`0` free, `1` obstacle). Cell `(x, y)`
//! is 1-based and covers `[x - 0.5, x + 0.5] x [y - 0.5, y + 0.5]`; in the
//! text format line `r` (ignoring comments) and column `c` hold cell
//! `(c, r)`. Paths run from `(1, 1)` to `(n, n)` through `n_interior`
//! free-form waypoints, and a path is feasible only if every cell touched by
//! every segment is free.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance_2d, supercover_cells, Point2};
use crate::objective::Objective;
use crate::rng::RngStream;
use crate::space::SearchSpace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    n: usize,
    // Row-major by y, then x; 0-based internally.
    cells: Vec<bool>,
}

impl GridMap {
    /// An obstacle-free map.
    pub fn empty(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("grid side must be at least 2"));
        }
        Ok(Self {
            n,
            cells: vec![false; n * n],
        })
    }

    pub fn side(&self) -> usize {
        self.n
    }

    fn index(&self, x: i64, y: i64) -> Option<usize> {
        let n = self.n as i64;
        ((1..=n).contains(&x) && (1..=n).contains(&y)).then(|| ((y - 1) * n + (x - 1)) as usize)
    }

    /// True for obstacles and for anything outside the map.
    pub fn is_blocked(&self, x: i64, y: i64) -> bool {
        self.index(x, y).is_none_or(|i| self.cells[i])
    }

    /// Marks a cell; ignores out-of-range coordinates.
    pub fn set_blocked(&mut self, x: i64, y: i64, blocked: bool) {
        if let Some(i) = self.index(x, y) {
            self.cells[i] = blocked;
        }
    }

    pub fn obstacle_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn density(&self) -> f64 {
        self.obstacle_count() as f64 / (self.n * self.n) as f64
    }

    /// Infeasibility penalty `n^2`.
    pub fn penalty(&self) -> f64 {
        (self.n * self.n) as f64
    }

    /// Whether start and goal are joined by 4-connected free cells.
    pub fn start_goal_connected(&self) -> bool {
        let n = self.n as i64;
        if self.is_blocked(1, 1) || self.is_blocked(n, n) {
            return false;
        }
        let mut seen = vec![false; self.cells.len()];
        let mut queue = VecDeque::from([(1i64, 1i64)]);
        seen[0] = true;
        while let Some((x, y)) = queue.pop_front() {
            if (x, y) == (n, n) {
                return true;
            }
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (nx, ny) = (x + dx, y + dy);
                if let Some(i) = self.index(nx, ny) {
                    if !self.cells[i] && !seen[i] {
                        seen[i] = true;
                        queue.push_back((nx, ny));
                    }
                }
            }
        }
        false
    }

    /// Text form accepted by [`load_grid_map`], without comments.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.n + 1));
        for y in 1..=self.n as i64 {
            for x in 1..=self.n as i64 {
                out.push(if self.is_blocked(x, y) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// Parses the plain-text map format: `n` rows of `n` characters from
/// `{0, 1}`; lines starting with `#` and blank lines are ignored.
pub fn load_grid_map(text: &str, source_name: &str) -> Result<GridMap> {
    let parse_err = |line: usize, column: usize, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        column,
        message,
    };
    let mut rows: Vec<(usize, Vec<bool>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::with_capacity(line.len());
        for (col, ch) in line.chars().enumerate() {
            match ch {
                '0' => row.push(false),
                '1' => row.push(true),
                other => {
                    return Err(parse_err(
                        line_no,
                        col + 1,
                        format!("illegal character {other:?}, expected '0' or '1'"),
                    ))
                }
            }
        }
        if let Some((_, first)) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_err(
                    line_no,
                    row.len().min(first.len()) + 1,
                    format!("row has {} cells, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push((line_no, row));
    }
    let Some((first_line, first)) = rows.first() else {
        return Err(parse_err(1, 1, "map contains no rows".into()));
    };
    let n = first.len();
    if rows.len() != n {
        return Err(parse_err(
            *first_line,
            1,
            format!("map has {} rows of width {n}; maps must be square", rows.len()),
        ));
    }
    if n < 2 {
        return Err(parse_err(*first_line, 1, "grid side must be at least 2".into()));
    }
    if rows[0].1[0] {
        return Err(parse_err(rows[0].0, 1, "start cell (1,1) is blocked".into()));
    }
    if rows[n - 1].1[n - 1] {
        return Err(parse_err(rows[n - 1].0, n, format!("goal cell ({n},{n}) is blocked")));
    }
    Ok(GridMap {
        n,
        cells: rows.into_iter().flat_map(|(_, r)| r).collect(),
    })
}

/// Reads and parses a map file.
pub fn load_grid_map_file(path: &Path) -> Result<GridMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_grid_map(&text, &path.display().to_string())
}

/// A polyline from `(1, 1)` to `(n, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    pub points: Vec<Point2>,
    pub feasible: bool,
}

impl GridPath {
    pub fn interior_flat(&self) -> Vec<f64> {
        let k = self.points.len();
        self.points[1..k - 1].iter().flatten().copied().collect()
    }
}

/// True iff every cell touched by every segment is free.
pub fn rasterize_and_check(points: &[Point2], map: &GridMap) -> bool {
    points.windows(2).all(|w| {
        supercover_cells(w[0], w[1])
            .into_iter()
            .all(|(x, y)| !map.is_blocked(x, y))
    })
}

/// Builds the path `(1,1)`, interior pairs, `(n,n)` and checks feasibility.
pub fn decode_grid_candidate(candidate: &[f64], map: &GridMap, n_interior: usize) -> Result<GridPath> {
    if candidate.len() != 2 * n_interior {
        return Err(Error::invalid(format!(
            "candidate has {} values, expected {}",
            candidate.len(),
            2 * n_interior
        )));
    }
    let n = map.side() as f64;
    let mut points = Vec::with_capacity(n_interior + 2);
    points.push([1.0, 1.0]);
    points.extend(candidate.chunks_exact(2).map(|c| [c[0], c[1]]));
    points.push([n, n]);
    let feasible = rasterize_and_check(&points, map);
    Ok(GridPath { points, feasible })
}

/// Sum of Euclidean segment lengths.
pub fn grid_path_length(points: &[Point2]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
        .sum()
}

/// Path length when feasible, `n^2` otherwise.
pub fn grid_fitness(candidate: &[f64], map: &GridMap, n_interior: usize) -> Result<f64> {
    let path = decode_grid_candidate(candidate, map, n_interior)?;
    Ok(if path.feasible {
        grid_path_length(&path.points)
    } else {
        map.penalty()
    })
}

/// Waypoints where the heading changes by more than `1e-6` rad. Zero-length
/// segments are skipped.
pub fn turning_points(points: &[Point2]) -> usize {
    let headings: Vec<f64> = points
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| (w[1][1] - w[0][1]).atan2(w[1][0] - w[0][0]))
        .collect();
    headings
        .windows(2)
        .filter(|h| {
            let mut d = (h[1] - h[0]).abs();
            if d > std::f64::consts::PI {
                d = 2.0 * std::f64::consts::PI - d;
            }
            d > 1e-6
        })
        .count()
}

/// A map plus the decision-vector layout.
#[derive(Debug, Clone)]
pub struct GridScenario {
    pub name: String,
    pub map: GridMap,
    pub n_interior: usize,
}

impl GridScenario {
    pub const DEFAULT_INTERIOR: usize = 10;

    pub fn new(name: impl Into<String>, map: GridMap, n_interior: usize) -> Result<Self> {
        if n_interior == 0 {
            return Err(Error::invalid("n_interior must be at least 1"));
        }
        Ok(Self {
            name: name.into(),
            map,
            n_interior,
        })
    }

    /// One of the shipped maps: `grid20`, `grid40` or `grid60`.
    pub fn builtin(name: &str) -> Result<Self> {
        let (text, file) = match name {
            "grid20" => (GRID20, "maps/grid20.txt"),
            "grid40" => (GRID40, "maps/grid40.txt"),
            "grid60" => (GRID60, "maps/grid60.txt"),
            other => return Err(Error::invalid(format!("unknown builtin map {other:?}"))),
        };
        Self::new(name, load_grid_map(text, file)?, Self::DEFAULT_INTERIOR)
    }

    pub fn search_space(&self) -> SearchSpace {
        SearchSpace::uniform(2 * self.n_interior, 1.0, self.map.side() as f64).expect("side >= 2")
    }

    pub fn decode(&self, candidate: &[f64]) -> Result<GridPath> {
        decode_grid_candidate(candidate, &self.map, self.n_interior)
    }
}

impl Objective for GridScenario {
    fn dim(&self) -> usize {
        2 * self.n_interior
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        grid_fitness(x, &self.map, self.n_interior).unwrap_or(f64::INFINITY)
    }
}

pub const GRID20: &str = include_str!("../maps/grid20.txt");
pub const GRID40: &str = include_str!("../maps/grid40.txt");
pub const GRID60: &str = include_str!("../maps/grid60.txt");

/// Seed used to generate the shipped maps.
pub const BUILTIN_MAP_SEED: u64 = 2325;
/// Target obstacle density of the shipped maps.
pub const BUILTIN_MAP_DENSITY: f64 = 0.25;

/// Half-width, in cells, of the obstacle-free corridor kept by
/// [`generate_block_map`] on an `n x n` map.
pub fn corridor_half_width(n: usize) -> f64 {
    (n as f64 / 10.0).max(1.5)
}

/// Random rectangular obstacles around a guaranteed bent corridor.
///
/// The corridor is the set of cells whose centre lies within
/// [`corridor_half_width`] of the polyline start, bend, goal; the bend is the
/// map centre pushed perpendicular to the diagonal by an offset drawn from
/// `[n/8, n/6]`, to a random side. Rectangles with sides in
/// `1..=max(2, n/5)` are added until `density` is reached (at most `200 n`
/// attempts), skipping any that touch the corridor or a cell within
/// Chebyshev distance 1 of start or goal. Finally every unprotected cell
/// within the offset of the map centre is blocked, so the straight diagonal
/// is never feasible.
pub fn generate_block_map(n: usize, density: f64, seed: u64) -> Result<GridMap> {
    let mut map = GridMap::empty(n)?;
    let mut rng = RngStream::new(seed);
    let target = (density * (n * n) as f64).round() as usize;
    let max_side = (n / 5).max(2);
    let ni = n as i64;
    let centre = (1.0 + n as f64) / 2.0;
    let offset = rng.uniform_in(1.0 / 8.0, 1.0 / 6.0) * n as f64;
    let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
    let shift = sign * offset / std::f64::consts::SQRT_2;
    let bend = [centre + shift, centre - shift];
    let start = [1.0, 1.0];
    let goal = [n as f64, n as f64];
    let half_width = corridor_half_width(n);
    let protected = |x: i64, y: i64| {
        let c = [x as f64, y as f64];
        (x - 1).abs().max((y - 1).abs()) <= 1
            || (x - ni).abs().max((y - ni).abs()) <= 1
            || point_segment_distance_2d(c, start, bend) <= half_width
            || point_segment_distance_2d(c, bend, goal) <= half_width
    };
    for _ in 0..200 * n {
        if map.obstacle_count() >= target {
            break;
        }
        let w = rng.int_inclusive(1, max_side) as i64;
        let h = rng.int_inclusive(1, max_side) as i64;
        let x0 = rng.int_inclusive(1, n) as i64;
        let y0 = rng.int_inclusive(1, n) as i64;
        let cells: Vec<(i64, i64)> = (x0..x0 + w)
            .flat_map(|x| (y0..y0 + h).map(move |y| (x, y)))
            .filter(|&(x, y)| x <= ni && y <= ni)
            .collect();
        if cells.iter().any(|&(x, y)| protected(x, y)) {
            continue;
        }
        for &(x, y) in &cells {
            map.set_blocked(x, y, true);
        }
    }
    for x in 1..=ni {
        for y in 1..=ni {
            if (x as f64 - centre).hypot(y as f64 - centre) <= offset && !protected(x, y) {
                map.set_blocked(x, y, true);
            }
        }
    }
    Ok(map)
}

/// The shipped map text for side `n`, with its provenance comment.
pub fn builtin_map_text(n: usize) -> Result<String> {
    let map = generate_block_map(n, BUILTIN_MAP_DENSITY, BUILTIN_MAP_SEED + n as u64)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {n}x{n} block map: generate_block_map(n={n}, density={BUILTIN_MAP_DENSITY}, seed={})",
        BUILTIN_MAP_SEED + n as u64
    );
    let _ = writeln!(
        out,
        "# start (1,1) is the first character of the first row; goal ({n},{n}) the last of the last."
    );
    out.push_str(&map.to_text());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parse_minimal_and_comments() {
        let m = load_grid_map("# tiny\n00\n00\n", "t").unwrap();
        assert_eq!(m.side(), 2);
        assert_eq!(m.obstacle_count(), 0);
        let m = load_grid_map("001\n010\n000\n", "t").unwrap();
        assert!(m.is_blocked(3, 1));
        assert!(m.is_blocked(2, 2));
        assert!(!m.is_blocked(1, 3));
        assert!(m.is_blocked(0, 1) && m.is_blocked(4, 4));
    }

    #[test]
    fn parse_errors_carry_position() {
        match load_grid_map("00\n02\n", "bad.txt") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 2)),
            other => panic!("{other:?}"),
        }
        match load_grid_map("000\n00\n000\n", "ragged") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match load_grid_map("10\n00\n", "start") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 1)),
            other => panic!("{other:?}"),
        }
        assert!(load_grid_map("00\n01\n", "goal").is_err());
        assert!(load_grid_map("000\n000\n", "rect").is_err());
        assert!(load_grid_map("# only comments\n", "empty").is_err());
        assert!(load_grid_map("0\n", "one").is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = load_grid_map("0010\n0110\n0000\n1000\n", "t").unwrap();
        assert_eq!(load_grid_map(&m.to_text(), "t").unwrap(), m);
    }

    #[test]
    fn decode_examples() {
        let map = GridMap::empty(20).unwrap();
        let p = decode_grid_candidate(&[10.0, 10.0], &map, 1).unwrap();
        assert_eq!(p.points, vec![[1.0, 1.0], [10.0, 10.0], [20.0, 20.0]]);
        assert!(p.feasible);
        let flat = vec![3.0, 4.0, 5.5, 6.5, 19.0, 2.0];
        assert_eq!(decode_grid_candidate(&flat, &map, 3).unwrap().interior_flat(), flat);
        assert!(decode_grid_candidate(&[1.0], &map, 1).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let map = load_grid_map("00000\n00000\n00100\n00000\n00000\n", "t").unwrap();
        assert!(rasterize_and_check(&[[1.0, 1.0], [5.0, 1.0]], &map));
        assert!(!rasterize_and_check(&[[1.0, 3.0], [5.0, 3.0]], &map));
        // Squeezing between diagonal neighbours touches both at the corner.
        let squeeze = load_grid_map("010\n100\n000\n", "t").unwrap();
        assert!(!rasterize_and_check(&[[1.0, 1.0], [3.0, 3.0]], &squeeze));
    }

    #[test]
    fn length_examples() {
        assert_eq!(grid_path_length(&[[1.0, 1.0], [1.0, 2.0], [1.0, 3.0]]), 2.0);
        assert_abs_diff_eq!(
            grid_path_length(&[[1.0, 1.0], [2.0, 2.0]]),
            std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(grid_path_length(&[[1.0, 1.0], [20.0, 20.0]]), 26.870, epsilon = 1e-3);
    }

    #[test]
    fn fitness_penalty_is_side_squared() {
        for (n, expected) in [(40usize, 1600.0), (60, 3600.0)] {
            let mut map = GridMap::empty(n).unwrap();
            map.set_blocked(5, 5, true);
            let f = grid_fitness(&[5.0, 5.0], &map, 1).unwrap();
            assert_eq!(f, expected);
        }
        let map = GridMap::empty(20).unwrap();
        assert_abs_diff_eq!(
            grid_fitness(&[7.0, 7.0], &map, 1).unwrap(),
            19.0 * std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn exhaustive_single_waypoint_on_empty_map() {
        for n in [20usize, 40] {
            let map = GridMap::empty(n).unwrap();
            let mut best = f64::INFINITY;
            let steps = 4 * (n - 1);
            for i in 0..=steps {
                for j in 0..=steps {
                    let x = 1.0 + i as f64 / 4.0;
                    let y = 1.0 + j as f64 / 4.0;
                    best = best.min(grid_fitness(&[x, y], &map, 1).unwrap());
                }
            }
            assert_abs_diff_eq!(best, std::f64::consts::SQRT_2 * (n - 1) as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn feasible_length_below_penalty() {
        for n in [20usize, 40, 60] {
            for k in 1..=10usize {
                let bound = (k + 1) as f64 * std::f64::consts::SQRT_2 * (n - 1) as f64;
                assert!(bound < (n * n) as f64);
            }
        }
    }

    #[test]
    fn turning_point_count() {
        assert_eq!(turning_points(&[[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]), 0);
        assert_eq!(turning_points(&[[1.0, 1.0], [2.0, 1.0], [2.0, 2.0], [3.0, 2.0]]), 2);
        assert_eq!(turning_points(&[[1.0, 1.0], [2.0, 1.0], [2.0, 1.0], [3.0, 1.0]]), 0);
    }

    #[test]
    fn shipped_maps_match_generator() {
        for (n, text) in [(20usize, GRID20), (40, GRID40), (60, GRID60)] {
            assert_eq!(builtin_map_text(n).unwrap(), text, "map {n}");
            let map = load_grid_map(text, "builtin").unwrap();
            assert_eq!(map.side(), n);
            assert!(map.start_goal_connected());
            // Rectangles fill to 25%; the centre block adds a little more.
            assert!((0.25..0.30).contains(&map.density()), "density {}", map.density());
        }
    }

    #[test]
    fn builtin_lookup() {
        assert_eq!(GridScenario::builtin("grid40").unwrap().map.side(), 40);
        assert!(GridScenario::builtin("grid30").is_err());
    }

    proptest::proptest! {
        #[test]
        fn more_obstacles_never_help(
            pts in proptest::collection::vec((1.0f64..=12.0, 1.0f64..=12.0), 1..5),
            extra in proptest::collection::vec((1i64..=12, 1i64..=12), 1..20),
            seed_cells in proptest::collection::vec((1i64..=12, 1i64..=12), 0..10),
        ) {
            let mut map = GridMap::empty(12).unwrap();
            for &(x, y) in &seed_cells {
                map.set_blocked(x, y, true);
            }
            let mut path = vec![[1.0, 1.0]];
            path.extend(pts.iter().map(|&(x, y)| [x, y]));
            path.push([12.0, 12.0]);
            let before = rasterize_and_check(&path, &map);
            for &(x, y) in &extra {
                map.set_blocked(x, y, true);
            }
            proptest::prop_assert!(before || !rasterize_and_check(&path, &map));
        }
    }
}
