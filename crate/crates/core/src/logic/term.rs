use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::name::Name;

/// Variable identifier. Printed as `A`..`Z`, then `A1`..`Z1`, `A2`, ...
pub type VarId = u32;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(VarId),
    Int(i64),
    Const(Name),
    Struct(Name, Arc<[Term]>),
}

pub(crate) const CONS: &str = ".";
pub(crate) const NIL: &str = "[]";

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::Const(Name::new(name))
    }

    pub fn structure(functor: &str, args: Vec<Term>) -> Term {
        Term::Struct(Name::new(functor), args.into())
    }

    /// Builds a proper list out of cons cells.
    pub fn list(items: impl IntoIterator<Item = Term, IntoIter: DoubleEndedIterator>) -> Term {
        let cons = Name::new(CONS);
        items
            .into_iter()
            .rev()
            .fold(Term::constant(NIL), |tail, head| {
                Term::Struct(cons, vec![head, tail].into())
            })
    }

    /// Elements of a proper list, or `None` for anything else.
    pub fn as_list(&self) -> Option<Vec<&Term>> {
        static NAMES: OnceLock<(Name, Name)> = OnceLock::new();
        let &(cons, nil) = NAMES.get_or_init(|| (Name::new(CONS), Name::new(NIL)));
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Term::Const(n) if *n == nil => return Some(out),
                Term::Struct(f, args) if *f == cons && args.len() == 2 => {
                    out.push(&args[0]);
                    cur = &args[1];
                }
                _ => return None,
            }
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) | Term::Const(_) => true,
            Term::Struct(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::Struct(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    /// Variables in first-occurrence order, without duplicates.
    pub fn vars_in_order(&self, out: &mut Vec<VarId>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::Struct(_, args) => args.iter().for_each(|a| a.vars_in_order(out)),
            _ => {}
        }
    }

    pub fn max_var(&self) -> Option<VarId> {
        match self {
            Term::Var(v) => Some(*v),
            Term::Struct(_, args) => args.iter().filter_map(Term::max_var).max(),
            _ => None,
        }
    }

    /// Shifts every variable by `offset`. Ground subterms are shared, not copied.
    pub fn offset_vars(&self, offset: VarId) -> Term {
        match self {
            Term::Var(v) => Term::Var(v + offset),
            Term::Struct(f, args) if !self.is_ground() => {
                Term::Struct(*f, args.iter().map(|a| a.offset_vars(offset)).collect())
            }
            _ => self.clone(),
        }
    }

    /// Applies a variable renaming; variables missing from the map are kept.
    pub fn rename(&self, map: &dyn Fn(VarId) -> VarId) -> Term {
        match self {
            Term::Var(v) => Term::Var(map(*v)),
            Term::Struct(f, args) if !self.is_ground() => {
                Term::Struct(*f, args.iter().map(|a| a.rename(map)).collect())
            }
            _ => self.clone(),
        }
    }
}

/// Canonical printed name for a variable id.
pub fn var_name(id: VarId) -> String {
    let letter = (b'A' + (id % 26) as u8) as char;
    match id / 26 {
        0 => letter.to_string(),
        n => format!("{letter}{n}"),
    }
}

/// Inverse of [`var_name`] for canonical spellings.
pub fn parse_var_name(text: &str) -> Option<VarId> {
    let mut chars = text.chars();
    let first = chars.next()?;
    if !first.is_ascii_uppercase() {
        return None;
    }
    let rest = chars.as_str();
    let base = (first as u8 - b'A') as VarId;
    if rest.is_empty() {
        return Some(base);
    }
    if rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: VarId = rest.parse().ok()?;
    n.checked_mul(26)?.checked_add(base)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(&var_name(*v)),
            Term::Int(i) => write!(f, "{i}"),
            Term::Const(n) => write!(f, "{n}"),
            Term::Struct(name, args) if name.as_str() == CONS && args.len() == 2 => {
                f.write_str("[")?;
                write!(f, "{}", args[0])?;
                let mut tail = &args[1];
                loop {
                    match tail {
                        Term::Struct(n, a) if n.as_str() == CONS && a.len() == 2 => {
                            write!(f, ",{}", a[0])?;
                            tail = &a[1];
                        }
                        Term::Const(n) if n.as_str() == NIL => break,
                        other => {
                            write!(f, "|{other}")?;
                            break;
                        }
                    }
                }
                f.write_str("]")
            }
            Term::Struct(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_names_round_trip() {
        for id in [0, 1, 25, 26, 27, 51, 52, 700] {
            assert_eq!(parse_var_name(&var_name(id)), Some(id), "{id}");
        }
        assert_eq!(var_name(26), "A1");
        assert_eq!(parse_var_name("A0"), None);
        assert_eq!(parse_var_name("Foo"), None);
    }

    #[test]
    fn lists_print_in_bracket_syntax() {
        let l = Term::list(vec![Term::Int(0), Term::Int(3)]);
        assert_eq!(l.to_string(), "[0,3]");
        assert_eq!(l.as_list().unwrap().len(), 2);
        let open = Term::structure(CONS, vec![Term::Int(1), Term::Var(1)]);
        assert_eq!(open.to_string(), "[1|B]");
    }

    #[test]
    fn offset_shares_ground_terms() {
        let t = Term::structure("f", vec![Term::Var(0), Term::structure("g", vec![Term::Int(1)])]);
        assert_eq!(t.offset_vars(3).to_string(), "f(D,g(1))");
        assert!(!t.is_ground());
        assert_eq!(t.max_var(), Some(0));
    }
}
