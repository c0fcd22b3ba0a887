//! Kinematic point-mass navigation among axis-aligned walls.
//!
//! Three worlds are provided: a 3×3 room maze, a four-rooms layout and an
//! open arena with two competing goals. Positions are 2-D, actions are
//! displacement vectors clipped to the world's step size, and motion stops
//! just short of the first wall it would enter.

use serde::{Deserialize, Serialize};

use crate::oracle::Objective;
use crate::rng::{seeded_rng, SeededRng};

/// Distance kept between the agent and a wall it runs into.
pub const CONTACT_EPS: f64 = 1e-6;
/// A goal counts as reached within this distance.
pub const GOAL_RADIUS: f64 = 0.5;
/// Radius around the far goal that earns the object bonus.
pub const FAR_BONUS_RADIUS: f64 = 1.0;

const ROOM: f64 = 3.0;
const WALL: f64 = 0.25;
const PITCH: f64 = ROOM + WALL;

pub type Point = [f64; 2];

/// Closed axis-aligned rectangle; zero width or height gives a segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            x0: x0.min(x1),
            y0: y0.min(y1),
            x1: x0.max(x1),
            y1: y0.max(y1),
        }
    }

    /// Strict interior membership.
    pub fn contains_strict(&self, p: Point) -> bool {
        p[0] > self.x0 && p[0] < self.x1 && p[1] > self.y0 && p[1] < self.y1
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    /// Parameter `t ∈ [0, 1]` at which `p + t·d` first touches the rectangle.
    fn entry_time(&self, p: Point, d: Point) -> Option<f64> {
        let mut t_in = 0.0f64;
        let mut t_out = 1.0f64;
        for axis in 0..2 {
            let (lo, hi) = if axis == 0 {
                (self.x0, self.x1)
            } else {
                (self.y0, self.y1)
            };
            if d[axis] == 0.0 {
                if p[axis] < lo || p[axis] > hi {
                    return None;
                }
            } else {
                let a = (lo - p[axis]) / d[axis];
                let b = (hi - p[axis]) / d[axis];
                t_in = t_in.max(a.min(b));
                t_out = t_out.min(a.max(b));
                if t_in > t_out {
                    return None;
                }
            }
        }
        Some(t_in)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalKind {
    Near,
    Far,
    Only,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Goal {
    pub pos: Point,
    pub kind: GoalKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NavReward {
    /// Step-discounted bonus on reaching the goal, negative distance
    /// otherwise.
    ReachGoal,
    /// Negative distance to the closest goal plus a bonus near the far one.
    SelectObject,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NavWorld {
    pub name: String,
    pub extent: Rect,
    pub walls: Vec<Rect>,
    pub start: Point,
    pub goals: Vec<Goal>,
    pub step_size: f64,
    pub horizon: usize,
    pub terminate_on_goal: bool,
    pub reward: NavReward,
}

/// Result of simulating one action sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// Position after each of the `horizon` steps; padded with the final
    /// position after an early termination.
    pub states: Vec<Point>,
    pub steps_used: usize,
    pub reached: bool,
}

impl Trajectory {
    pub fn final_state(&self) -> Point {
        *self.states.last().expect("trajectories have horizon >= 1")
    }
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn boundary_segments(extent: Rect) -> Vec<Rect> {
    let Rect { x0, y0, x1, y1 } = extent;
    vec![
        Rect::new(x0, y0, x1, y0),
        Rect::new(x0, y1, x1, y1),
        Rect::new(x0, y0, x0, y1),
        Rect::new(x1, y0, x1, y1),
    ]
}

impl NavWorld {
    /// Moves from `pos` by `action` clipped to the step size, stopping
    /// `CONTACT_EPS` before the first wall on the way.
    pub fn step(&self, pos: Point, action: Point) -> Point {
        let norm = action[0].hypot(action[1]);
        if !(norm > 0.0) {
            return pos;
        }
        let scale = if norm > self.step_size {
            self.step_size / norm
        } else {
            1.0
        };
        let d = [action[0] * scale, action[1] * scale];
        let len = norm * scale;
        let hit = self
            .walls
            .iter()
            .filter_map(|w| w.entry_time(pos, d))
            .fold(f64::INFINITY, f64::min);
        let t = if hit.is_finite() {
            (hit - CONTACT_EPS / len).max(0.0)
        } else {
            1.0
        };
        [pos[0] + t * d[0], pos[1] + t * d[1]]
    }

    pub fn goal_of(&self, kind: GoalKind) -> Option<Point> {
        self.goals.iter().find(|g| g.kind == kind).map(|g| g.pos)
    }

    fn reach_target(&self) -> Point {
        self.goal_of(GoalKind::Only)
            .or_else(|| self.goal_of(GoalKind::Far))
            .unwrap_or(self.goals[0].pos)
    }

    /// Simulates up to `horizon` actions; missing actions are zero.
    pub fn rollout(&self, actions: &[Point]) -> Trajectory {
        let mut pos = self.start;
        let mut states = Vec::with_capacity(self.horizon);
        let target = self.reach_target();
        let mut steps_used = self.horizon;
        let mut reached = false;
        for t in 0..self.horizon {
            let a = actions.get(t).copied().unwrap_or([0.0, 0.0]);
            pos = self.step(pos, a);
            states.push(pos);
            if self.terminate_on_goal && dist(pos, target) <= GOAL_RADIUS {
                reached = true;
                steps_used = t + 1;
                break;
            }
        }
        states.resize(self.horizon, pos);
        Trajectory {
            states,
            steps_used,
            reached,
        }
    }

    pub fn reward(&self, traj: &Trajectory) -> f64 {
        let fin = traj.final_state();
        match self.reward {
            NavReward::ReachGoal => {
                if traj.reached {
                    (1.0 - 0.2 * traj.steps_used as f64 / self.horizon as f64).max(0.8)
                } else {
                    -dist(fin, self.reach_target())
                }
            }
            NavReward::SelectObject => {
                let closest = self
                    .goals
                    .iter()
                    .map(|g| dist(fin, g.pos))
                    .fold(f64::INFINITY, f64::min);
                -closest + if self.far_bonus(fin) { 1.0 } else { 0.0 }
            }
        }
    }

    fn far_bonus(&self, p: Point) -> bool {
        self.goal_of(GoalKind::Far)
            .is_some_and(|g| dist(p, g) <= FAR_BONUS_RADIUS)
    }

    pub fn success(&self, traj: &Trajectory) -> bool {
        match self.reward {
            NavReward::ReachGoal => traj.reached,
            NavReward::SelectObject => self.far_bonus(traj.final_state()),
        }
    }

    /// Maps a flat search vector to world actions: step `t` moves by
    /// `step_size · (x[2t], x[2t+1])`, clipped by [`NavWorld::step`].
    pub fn decode(&self, x: &[f64]) -> Vec<Point> {
        x.chunks(2)
            .take(self.horizon)
            .map(|c| {
                [
                    self.step_size * c[0],
                    self.step_size * c.get(1).copied().unwrap_or(0.0),
                ]
            })
            .collect()
    }

    pub fn simulate(&self, x: &[f64]) -> Trajectory {
        self.rollout(&self.decode(x))
    }

    /// Whether `p` lies strictly inside any wall.
    pub fn in_wall(&self, p: Point) -> bool {
        self.walls.iter().any(|w| w.contains_strict(p))
    }

    /// Solid wall rectangles only, without the zero-width outer boundary.
    pub fn solid_walls(&self) -> impl Iterator<Item = &Rect> {
        self.walls.iter().filter(|w| w.x1 > w.x0 && w.y1 > w.y0)
    }

    /// 3×3 maze of 3×3 rooms separated by 0.25-wide walls. The room graph is
    /// a spanning tree carved by seeded recursive backtracking from the
    /// top-left room; the goal is the center of the last room carved.
    pub fn maze_s3(seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let (openings, last) = carve_maze(&mut rng);
        let size = 3.0 * ROOM + 2.0 * WALL;
        let extent = Rect::new(0.0, 0.0, size, size);
        let mut walls = boundary_segments(extent);
        // Row 0 is the top row.
        let y_lo = |row: usize| (2 - row) as f64 * PITCH;
        let x_lo = |col: usize| col as f64 * PITCH;
        for r in 0..3 {
            for c in 0..3 {
                if c < 2 && !openings.contains(&((r, c), (r, c + 1))) {
                    walls.push(Rect::new(
                        x_lo(c) + ROOM,
                        y_lo(r),
                        x_lo(c + 1),
                        y_lo(r) + ROOM,
                    ));
                }
                if r < 2 && !openings.contains(&((r, c), (r + 1, c))) {
                    walls.push(Rect::new(
                        x_lo(c),
                        y_lo(r + 1) + ROOM,
                        x_lo(c) + ROOM,
                        y_lo(r),
                    ));
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                walls.push(Rect::new(
                    x_lo(i) + ROOM,
                    y_lo(j + 1) + ROOM,
                    x_lo(i + 1),
                    y_lo(j),
                ));
            }
        }
        let center = |(r, c): (usize, usize)| [x_lo(c) + ROOM / 2.0, y_lo(r) + ROOM / 2.0];
        Self {
            name: "maze_s3".into(),
            extent,
            walls,
            start: center((0, 0)),
            goals: vec![Goal {
                pos: center(last),
                kind: GoalKind::Only,
            }],
            step_size: 0.3,
            horizon: 216,
            terminate_on_goal: true,
            reward: NavReward::ReachGoal,
        }
    }

    /// 14×14 space: a central wall cross leaves four 6×6 corner rooms
    /// joined by width-2 corridors along the outer edges. The start is a
    /// seeded point in one room and the goal its point reflection.
    pub fn four_rooms(seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let extent = Rect::new(0.0, 0.0, 14.0, 14.0);
        let mut walls = boundary_segments(extent);
        walls.push(Rect::new(6.0, 2.0, 8.0, 12.0));
        walls.push(Rect::new(2.0, 6.0, 12.0, 8.0));
        let room = rng.below(4);
        let ox = if room % 2 == 0 { 0.0 } else { 8.0 };
        let oy = if room < 2 { 0.0 } else { 8.0 };
        let start = [
            ox + rng.uniform_in(0.5, 5.5),
            oy + rng.uniform_in(0.5, 5.5),
        ];
        Self {
            name: "four_rooms".into(),
            extent,
            walls,
            start,
            goals: vec![Goal {
                pos: [14.0 - start[0], 14.0 - start[1]],
                kind: GoalKind::Only,
            }],
            step_size: 0.2,
            horizon: 250,
            terminate_on_goal: true,
            reward: NavReward::ReachGoal,
        }
    }

    /// 12×12 open arena with the agent at the center, a near goal 4–4.5
    /// units away and a far goal 5–5.5 units away, the two 3–4 units apart.
    pub fn select_obj(seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let extent = Rect::new(0.0, 0.0, 12.0, 12.0);
        let start = [6.0, 6.0];
        let inside = |p: Point| p[0] >= 0.5 && p[0] <= 11.5 && p[1] >= 0.5 && p[1] <= 11.5;
        let polar = |rng: &mut SeededRng, lo: f64, hi: f64| {
            let r = rng.uniform_in(lo, hi);
            let a = rng.uniform_in(0.0, std::f64::consts::TAU);
            [start[0] + r * a.cos(), start[1] + r * a.sin()]
        };
        let (near, far) = loop {
            let near = polar(&mut rng, 4.0, 4.5);
            let far = polar(&mut rng, 5.0, 5.5);
            let gap = dist(near, far);
            if inside(near) && inside(far) && (3.0..=4.0).contains(&gap) {
                break (near, far);
            }
        };
        Self {
            name: "select_obj".into(),
            extent,
            walls: boundary_segments(extent),
            start,
            goals: vec![
                Goal {
                    pos: near,
                    kind: GoalKind::Near,
                },
                Goal {
                    pos: far,
                    kind: GoalKind::Far,
                },
            ],
            step_size: 0.05,
            horizon: 200,
            terminate_on_goal: false,
            reward: NavReward::SelectObject,
        }
    }
}

type Cell = (usize, usize);

/// Recursive backtracking over the 3×3 room grid from the top-left room.
/// Returns the carved openings (ordered pairs, lower cell first) and the
/// last newly visited room.
fn carve_maze(rng: &mut SeededRng) -> (Vec<(Cell, Cell)>, Cell) {
    let mut visited = [[false; 3]; 3];
    let mut stack = vec![(0usize, 0usize)];
    visited[0][0] = true;
    let mut openings = Vec::new();
    let mut last = (0, 0);
    while let Some(&(r, c)) = stack.last() {
        let mut next = Vec::with_capacity(4);
        if r > 0 && !visited[r - 1][c] {
            next.push((r - 1, c));
        }
        if c < 2 && !visited[r][c + 1] {
            next.push((r, c + 1));
        }
        if r < 2 && !visited[r + 1][c] {
            next.push((r + 1, c));
        }
        if c > 0 && !visited[r][c - 1] {
            next.push((r, c - 1));
        }
        if next.is_empty() {
            stack.pop();
            continue;
        }
        let n = next[rng.below(next.len())];
        visited[n.0][n.1] = true;
        openings.push(((r, c).min(n), (r, c).max(n)));
        last = n;
        stack.push(n);
    }
    (openings, last)
}

/// A navigation world as a black-box objective over flat action vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NavTask {
    pub world: NavWorld,
}

impl NavTask {
    pub fn new(world: NavWorld) -> Self {
        Self { world }
    }

    /// Positions after every step, as partition-space state vectors.
    pub fn states(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.world
            .simulate(x)
            .states
            .iter()
            .map(|p| p.to_vec())
            .collect()
    }
}

impl Objective for NavTask {
    fn dim(&self) -> usize {
        2 * self.world.horizon
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        let traj = self.world.simulate(x);
        self.world.reward(&traj)
    }

    fn success(&self, x: &[f64]) -> Option<bool> {
        Some(self.world.success(&self.world.simulate(x)))
    }
}
