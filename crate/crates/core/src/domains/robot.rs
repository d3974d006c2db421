use std::sync::OnceLock;

use crate::logic::{Name, Term};

pub const SIZE: i64 = 6;

pub const ACTIONS: [&str; 6] = ["up", "down", "right", "left", "grab", "drop"];

/// Robot and ball on a 6x6 grid; x grows rightwards, y upwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RobotState {
    pub robot: (i64, i64),
    pub ball: (i64, i64),
    pub holding: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Up,
    Down,
    Right,
    Left,
    Grab,
    Drop,
}

impl Action {
    pub const ALL: [Action; 6] = [Action::Up, Action::Down, Action::Right, Action::Left, Action::Grab, Action::Drop];

    pub fn name(self) -> &'static str {
        ACTIONS[self as usize]
    }
}

struct Names {
    world: Name,
    yes: Name,
    no: Name,
}

fn names() -> &'static Names {
    static NAMES: OnceLock<Names> = OnceLock::new();
    NAMES.get_or_init(|| Names { world: Name::new("world"), yes: Name::new("true"), no: Name::new("false") })
}

/// Every on-grid state term, indexed by `RobotState::code`, so transitions share them.
fn terms() -> &'static [Term] {
    static TERMS: OnceLock<Vec<Term>> = OnceLock::new();
    TERMS.get_or_init(|| {
        let cells: Vec<(i64, i64)> = (1..=SIZE).flat_map(|x| (1..=SIZE).map(move |y| (x, y))).collect();
        let mut out = Vec::with_capacity(cells.len() * cells.len() * 2);
        for &robot in &cells {
            for &ball in &cells {
                for holding in [false, true] {
                    out.push(RobotState { robot, ball, holding }.build_term());
                }
            }
        }
        out
    })
}

fn on_grid((x, y): (i64, i64)) -> bool {
    (1..=SIZE).contains(&x) && (1..=SIZE).contains(&y)
}

impl RobotState {
    pub fn is_valid(&self) -> bool {
        on_grid(self.robot) && on_grid(self.ball) && (!self.holding || self.robot == self.ball)
    }

    pub fn step(&self, action: Action) -> Option<RobotState> {
        let (dx, dy) = match action {
            Action::Up => (0, 1),
            Action::Down => (0, -1),
            Action::Right => (1, 0),
            Action::Left => (-1, 0),
            Action::Grab => {
                return (!self.holding && self.robot == self.ball).then_some(RobotState { holding: true, ..*self });
            }
            Action::Drop => return self.holding.then_some(RobotState { holding: false, ..*self }),
        };
        let robot = (self.robot.0 + dx, self.robot.1 + dy);
        if !on_grid(robot) {
            return None;
        }
        let ball = if self.holding { robot } else { self.ball };
        Some(RobotState { robot, ball, holding: self.holding })
    }

    pub fn to_term(&self) -> Term {
        if on_grid(self.robot) && on_grid(self.ball) {
            return terms()[self.code()].clone();
        }
        self.build_term()
    }

    fn code(&self) -> usize {
        let cell = |(x, y): (i64, i64)| ((x - 1) * SIZE + (y - 1)) as usize;
        (cell(self.robot) * 36 + cell(self.ball)) * 2 + usize::from(self.holding)
    }

    fn build_term(&self) -> Term {
        Term::structure(
            "world",
            vec![
                Term::Int(self.robot.0),
                Term::Int(self.robot.1),
                Term::Int(self.ball.0),
                Term::Int(self.ball.1),
                Term::constant(if self.holding { "true" } else { "false" }),
            ],
        )
    }

    pub fn from_term(t: &Term) -> Option<RobotState> {
        let Term::Struct(f, args) = t else { return None };
        let n = names();
        if *f != n.world || args.len() != 5 {
            return None;
        }
        let int = |i: usize| match args[i] {
            Term::Int(v) => Some(v),
            _ => None,
        };
        let holding = match &args[4] {
            Term::Const(c) if *c == n.yes => true,
            Term::Const(c) if *c == n.no => false,
            _ => return None,
        };
        let s = RobotState { robot: (int(0)?, int(1)?), ball: (int(2)?, int(3)?), holding };
        s.is_valid().then_some(s)
    }

    /// Every valid state: robot and ball anywhere while not holding, co-located while holding.
    pub fn all() -> Vec<RobotState> {
        let cells: Vec<(i64, i64)> = (1..=SIZE).flat_map(|x| (1..=SIZE).map(move |y| (x, y))).collect();
        let mut out = Vec::with_capacity(cells.len() * cells.len() + cells.len());
        for &robot in &cells {
            for &ball in &cells {
                out.push(RobotState { robot, ball, holding: false });
            }
        }
        out.extend(cells.iter().map(|&c| RobotState { robot: c, ball: c, holding: true }));
        out
    }
}
