use std::sync::OnceLock;

use crate::logic::{Name, Term};

pub const WIDTH: usize = 6;
/// Tallest stack `place_block` will build.
pub const MAX_HEIGHT: i64 = 4;

pub const ACTIONS: [&str; 3] = ["left", "right", "place_block"];
pub const FLUENTS: [&str; 4] = ["at_left", "at_right", "not_at_left", "not_at_right"];

/// Cursor position (1-based) over a row of stack heights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LegoState {
    pub cursor: usize,
    pub board: [i64; WIDTH],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Left,
    Right,
    PlaceBlock,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fluent {
    AtLeft,
    AtRight,
    NotAtLeft,
    NotAtRight,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::Left, Action::Right, Action::PlaceBlock];
}

impl Fluent {
    pub const ALL: [Fluent; 4] = [Fluent::AtLeft, Fluent::AtRight, Fluent::NotAtLeft, Fluent::NotAtRight];
}

impl Default for LegoState {
    fn default() -> Self {
        LegoState { cursor: 1, board: [0; WIDTH] }
    }
}

impl LegoState {
    pub fn is_valid(&self) -> bool {
        (1..=WIDTH).contains(&self.cursor) && self.board.iter().all(|h| (0..=MAX_HEIGHT).contains(h))
    }

    pub fn step(&self, action: Action) -> Option<LegoState> {
        let mut next = *self;
        match action {
            Action::Left if self.cursor > 1 => next.cursor -= 1,
            Action::Right if self.cursor < WIDTH => next.cursor += 1,
            Action::PlaceBlock if self.board[self.cursor - 1] < MAX_HEIGHT => next.board[self.cursor - 1] += 1,
            _ => return None,
        }
        Some(next)
    }

    pub fn holds(&self, fluent: Fluent) -> bool {
        match fluent {
            Fluent::AtLeft => self.cursor == 1,
            Fluent::AtRight => self.cursor == WIDTH,
            Fluent::NotAtLeft => self.cursor != 1,
            Fluent::NotAtRight => self.cursor != WIDTH,
        }
    }

    pub fn to_term(&self) -> Term {
        Term::structure("lego", vec![Term::Int(self.cursor as i64), Term::list(self.board.iter().map(|&h| Term::Int(h)))])
    }

    pub fn from_term(t: &Term) -> Option<LegoState> {
        let Term::Struct(f, args) = t else { return None };
        static LEGO: OnceLock<Name> = OnceLock::new();
        if *f != *LEGO.get_or_init(|| Name::new("lego")) || args.len() != 2 {
            return None;
        }
        let Term::Int(cursor) = args[0] else { return None };
        let cells = args[1].as_list()?;
        if cells.len() != WIDTH || !(1..=WIDTH as i64).contains(&cursor) {
            return None;
        }
        let mut board = [0; WIDTH];
        for (b, c) in board.iter_mut().zip(cells) {
            match c {
                Term::Int(h) => *b = *h,
                _ => return None,
            }
        }
        let s = LegoState { cursor: cursor as usize, board };
        s.is_valid().then_some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moves_fail_at_the_ends() {
        let s = LegoState::default();
        assert_eq!(s.step(Action::Left), None);
        assert!(s.holds(Fluent::AtLeft) && s.holds(Fluent::NotAtRight));
        let mut r = s;
        for _ in 1..WIDTH {
            r = r.step(Action::Right).unwrap();
        }
        assert_eq!(r.step(Action::Right), None);
        assert!(r.holds(Fluent::AtRight) && !r.holds(Fluent::NotAtRight));
    }

    #[test]
    fn place_block_stacks_under_cursor() {
        let mut s = LegoState::default().step(Action::Right).unwrap();
        for _ in 0..MAX_HEIGHT {
            s = s.step(Action::PlaceBlock).unwrap();
        }
        assert_eq!(s.board, [0, 4, 0, 0, 0, 0]);
        assert_eq!(s.step(Action::PlaceBlock), None);
        assert_eq!(LegoState::from_term(&s.to_term()), Some(s));
        assert_eq!(s.to_term().to_string(), "lego(2,[0,4,0,0,0,0])");
    }
}
