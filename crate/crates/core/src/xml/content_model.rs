//! Deterministic content-model matching via the Glushkov (position)
//! automaton. Models that would need lookahead are rejected up front.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repeat {
    One,
    Opt,
    Star,
    Plus,
}

impl Repeat {
    fn suffix(self) -> &'static str {
        match self {
            Repeat::One => "",
            Repeat::Opt => "?",
            Repeat::Star => "*",
            Repeat::Plus => "+",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Particle {
    Name(String, Repeat),
    Seq(Vec<Particle>, Repeat),
    Choice(Vec<Particle>, Repeat),
}

impl Particle {
    pub fn repeat(&self) -> Repeat {
        match self {
            Particle::Name(_, r) | Particle::Seq(_, r) | Particle::Choice(_, r) => *r,
        }
    }

    /// Every element name the particle mentions.
    pub fn names(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Particle::Name(n, _) => {
                out.insert(n);
            }
            Particle::Seq(ps, _) | Particle::Choice(ps, _) => ps.iter().for_each(|p| p.collect_names(out)),
        }
    }
}

impl fmt::Display for Particle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (items, sep, rep) = match self {
            Particle::Name(n, r) => return write!(f, "{n}{}", r.suffix()),
            Particle::Seq(ps, r) => (ps, ", ", r),
            Particle::Choice(ps, r) => (ps, " | ", r),
        };
        f.write_str("(")?;
        for (i, p) in items.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "){}", rep.suffix())
    }
}

/// Two positions with the same name compete for one input symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ambiguity {
    pub name: String,
}

/// Where a child sequence stops matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    /// Index of the offending child, or the sequence length if the
    /// sequence ended too early.
    pub index: usize,
    pub found: Option<String>,
    /// Names acceptable at that point, sorted.
    pub expected: Vec<String>,
    /// Whether ending the sequence there would have been accepted.
    pub could_end: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentModel {
    /// Name at each position; position 0 is the start state.
    names: Vec<String>,
    first: BTreeSet<usize>,
    follow: Vec<BTreeSet<usize>>,
    last: BTreeSet<usize>,
    nullable: bool,
}

struct Glushkov {
    names: Vec<String>,
    follow: Vec<BTreeSet<usize>>,
}

struct Sets {
    nullable: bool,
    first: BTreeSet<usize>,
    last: BTreeSet<usize>,
}

impl Glushkov {
    fn build(&mut self, p: &Particle) -> Sets {
        let mut s = match p {
            Particle::Name(n, _) => {
                self.names.push(n.clone());
                self.follow.push(BTreeSet::new());
                let pos = self.names.len() - 1;
                Sets { nullable: false, first: [pos].into(), last: [pos].into() }
            }
            Particle::Seq(items, _) => {
                let mut s = Sets { nullable: true, first: BTreeSet::new(), last: BTreeSet::new() };
                for item in items {
                    let t = self.build(item);
                    for &l in &s.last {
                        self.follow[l].extend(&t.first);
                    }
                    if s.nullable {
                        s.first.extend(&t.first);
                    }
                    if t.nullable {
                        s.last.extend(t.last);
                    } else {
                        s.last = t.last;
                    }
                    s.nullable &= t.nullable;
                }
                s
            }
            Particle::Choice(items, _) => {
                let mut s = Sets { nullable: false, first: BTreeSet::new(), last: BTreeSet::new() };
                for item in items {
                    let t = self.build(item);
                    s.nullable |= t.nullable;
                    s.first.extend(t.first);
                    s.last.extend(t.last);
                }
                s
            }
        };
        match p.repeat() {
            Repeat::One => {}
            Repeat::Opt => s.nullable = true,
            Repeat::Star | Repeat::Plus => {
                for &l in &s.last {
                    self.follow[l].extend(&s.first);
                }
                if p.repeat() == Repeat::Star {
                    s.nullable = true;
                }
            }
        }
        s
    }
}

impl ContentModel {
    pub fn compile(p: &Particle) -> Result<Self, Ambiguity> {
        let mut g = Glushkov { names: vec![String::new()], follow: vec![BTreeSet::new()] };
        let s = g.build(p);
        let model = ContentModel { names: g.names, first: s.first, follow: g.follow, last: s.last, nullable: s.nullable };
        for set in std::iter::once(&model.first).chain(model.follow.iter()) {
            let mut seen = BTreeSet::new();
            for &q in set {
                if !seen.insert(model.names[q].as_str()) {
                    return Err(Ambiguity { name: model.names[q].clone() });
                }
            }
        }
        Ok(model)
    }

    fn candidates(&self, state: usize) -> &BTreeSet<usize> {
        if state == 0 {
            &self.first
        } else {
            &self.follow[state]
        }
    }

    fn accepting(&self, state: usize) -> bool {
        if state == 0 {
            self.nullable
        } else {
            self.last.contains(&state)
        }
    }

    fn expected(&self, state: usize) -> Vec<String> {
        let set: BTreeSet<&str> = self.candidates(state).iter().map(|&q| self.names[q].as_str()).collect();
        set.into_iter().map(str::to_string).collect()
    }

    /// Runs the automaton over a child-name sequence.
    pub fn matches<S: AsRef<str>>(&self, children: &[S]) -> Result<(), Mismatch> {
        let mut state = 0;
        for (i, child) in children.iter().enumerate() {
            let child = child.as_ref();
            match self.candidates(state).iter().find(|&&q| self.names[q] == child) {
                Some(&q) => state = q,
                None => {
                    return Err(Mismatch {
                        index: i,
                        found: Some(child.to_string()),
                        expected: self.expected(state),
                        could_end: self.accepting(state),
                    })
                }
            }
        }
        if self.accepting(state) {
            Ok(())
        } else {
            Err(Mismatch { index: children.len(), found: None, expected: self.expected(state), could_end: false })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name(n: &str) -> Particle {
        Particle::Name(n.into(), Repeat::One)
    }

    #[test]
    fn sequence_reports_first_failing_child() {
        let m = ContentModel::compile(&Particle::Seq(vec![name("a"), name("b"), name("c")], Repeat::One)).unwrap();
        assert!(m.matches(&["a", "b", "c"]).is_ok());
        let e = m.matches(&["a", "c"]).unwrap_err();
        assert_eq!((e.index, e.found.as_deref(), e.expected.clone()), (1, Some("c"), vec!["b".to_string()]));
        let e = m.matches(&["a", "b"]).unwrap_err();
        assert_eq!((e.index, e.found), (2, None));
    }

    #[test]
    fn repetition_and_choice() {
        let p = Particle::Seq(
            vec![Particle::Choice(vec![name("a"), name("b")], Repeat::Plus), Particle::Name("c".into(), Repeat::Opt)],
            Repeat::One,
        );
        let m = ContentModel::compile(&p).unwrap();
        for ok in [&["a"][..], &["b", "a", "b"], &["a", "c"]] {
            assert!(m.matches(ok).is_ok(), "{ok:?}");
        }
        for bad in [&[][..], &["c"], &["a", "c", "a"]] {
            assert!(m.matches(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn ambiguous_models_are_rejected() {
        // (a, b) | (a, c) needs lookahead
        let p = Particle::Choice(
            vec![Particle::Seq(vec![name("a"), name("b")], Repeat::One), Particle::Seq(vec![name("a"), name("c")], Repeat::One)],
            Repeat::One,
        );
        assert_eq!(ContentModel::compile(&p), Err(Ambiguity { name: "a".into() }));
        // (a*, a)
        let p = Particle::Seq(vec![Particle::Name("a".into(), Repeat::Star), name("a")], Repeat::One);
        assert!(ContentModel::compile(&p).is_err());
    }

    #[test]
    fn display_round_trips_syntax() {
        let p = Particle::Seq(vec![name("a"), Particle::Choice(vec![name("b"), name("c")], Repeat::Star)], Repeat::Plus);
        assert_eq!(p.to_string(), "(a, (b | c)*)+");
    }
}
