//! Splitting a program into inactive prefix, active statement and remainder.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::syntax::{Ident, Stmt};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameKind {
    Block,
    /// `braced` records whether the labeled body was a block, so rebuilding
    /// keeps `l: s` and `l: { s }` apart.
    Labeled { labels: Vec<Ident>, braced: bool },
    Try { var: Ident, catch: Vec<Stmt> },
    LoopScope(Ident),
}

/// An open container on the path to the active statement, together with the
/// statements that follow the container in its own sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub kind: FrameKind,
    pub after: Vec<Stmt>,
}

impl Frame {
    fn wrap(&self, seq: Vec<Stmt>) -> Stmt {
        match &self.kind {
            FrameKind::Block => Stmt::Block(seq),
            FrameKind::Labeled { labels, braced } => {
                let body = match (braced, seq.len()) {
                    (false, 1) if !matches!(seq[0], Stmt::Labeled(..) | Stmt::VarDecl(..)) => {
                        seq.into_iter().next().unwrap_or(Stmt::Skip)
                    }
                    _ => Stmt::Block(seq),
                };
                Stmt::Labeled(labels.clone(), Box::new(body))
            }
            FrameKind::Try { var, catch } => Stmt::TryCatch(seq, var.clone(), catch.clone()),
            FrameKind::LoopScope(x) => Stmt::LoopScope(x.clone(), seq),
        }
    }
}

/// `π active rest ω`: `frames` (outermost first) describe `π` and `ω`, `rest`
/// is the remainder of the innermost open sequence.
///
/// An empty container (`{ }`, `l: { }`, `try { } catch ...`, `loop-scope(x) { }`)
/// is itself the active statement; labeled loops are active together with
/// their labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub frames: Vec<Frame>,
    pub active: Stmt,
    pub rest: Vec<Stmt>,
}

impl Decomposition {
    /// The whole program with `[active] ++ rest` replaced by `seq`.
    pub fn rebuild(&self, seq: Vec<Stmt>) -> Vec<Stmt> {
        rebuild(&self.frames, seq)
    }

    pub fn innermost(&self) -> Option<&Frame> {
        self.frames.last()
    }

    /// The program with the innermost frame closed: its container is replaced
    /// by `seq`, spliced in front of the statements following it.
    pub fn rebuild_outside(&self, seq: Vec<Stmt>) -> Vec<Stmt> {
        let (last, outer) = self.frames.split_last().expect("innermost frame");
        let mut s = seq;
        s.extend(last.after.iter().cloned());
        rebuild(outer, s)
    }
}

pub fn rebuild(frames: &[Frame], seq: Vec<Stmt>) -> Vec<Stmt> {
    frames.iter().rev().fold(seq, |cur, fr| {
        let mut out = vec![fr.wrap(cur)];
        out.extend(fr.after.iter().cloned());
        out
    })
}

/// Descends through blocks, non-loop labels, try-sections and loop-scope
/// bodies to the active statement. `None` for an empty program.
pub fn locate_active_statement(program: &[Stmt]) -> Option<Decomposition> {
    let mut frames = Vec::new();
    let mut seq: Vec<Stmt> = program.to_vec();
    loop {
        if seq.is_empty() {
            return None;
        }
        let first = seq.remove(0);
        let rest = seq;
        let (kind, inner) = match first {
            Stmt::Block(b) if !b.is_empty() => (FrameKind::Block, b),
            Stmt::Labeled(ls, body) if !body.is_loop() && *body != Stmt::Block(Vec::new()) => match *body {
                Stmt::Block(b) => (FrameKind::Labeled { labels: ls, braced: true }, b),
                other => (FrameKind::Labeled { labels: ls, braced: false }, vec![other]),
            },
            Stmt::TryCatch(t, var, catch) if !t.is_empty() => (FrameKind::Try { var, catch }, t),
            Stmt::LoopScope(x, b) if !b.is_empty() => (FrameKind::LoopScope(x), b),
            active => return Some(Decomposition { frames, active, rest }),
        };
        frames.push(Frame { kind, after: rest });
        seq = inner;
    }
}
