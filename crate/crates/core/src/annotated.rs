//! Annotated source files: pre/postcondition and one annotation per loop.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::dl::{expr_to_formula, Formula};
use crate::error::SyntaxError;
use crate::syntax::parser::{parse_annotated_raw, RawAnnotation};
use crate::syntax::{infer_sorts, validate_program, walk_all, ForInit, Signature, Stmt};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoopAnnotation {
    Invariant(Formula),
    Unwind(u32),
}

/// Identifies a loop independently of its labels and, for `for` loops, of the
/// initializer, so the annotation survives initializer pull-out and unwinding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LoopKey(Stmt);

impl LoopKey {
    pub fn of(loop_stmt: &Stmt) -> LoopKey {
        let s = match loop_stmt.as_labeled_loop() {
            Some((_, l)) => l,
            None => loop_stmt,
        };
        LoopKey(match s {
            Stmt::For { guard, update, body, .. } => Stmt::For {
                init: ForInit::Empty,
                guard: guard.clone(),
                update: update.clone(),
                body: body.clone(),
            },
            other => other.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedProgram {
    pub pre: Formula,
    pub post: Formula,
    pub program: Vec<Stmt>,
    pub annotations: BTreeMap<LoopKey, LoopAnnotation>,
    pub signature: Signature,
}

impl AnnotatedProgram {
    pub fn annotation(&self, loop_stmt: &Stmt) -> Option<&LoopAnnotation> {
        self.annotations.get(&LoopKey::of(loop_stmt))
    }
}

/// Parses, types and validates an annotated source file. Missing `pre`/`post`
/// default to `true`.
pub fn parse_annotated_file(src: &str) -> Result<AnnotatedProgram, SyntaxError> {
    let raw = parse_annotated_raw(src)?;
    validate_program(&raw.program)?;
    let mut formulas = Vec::new();
    formulas.extend(raw.pre.iter());
    formulas.extend(raw.post.iter());
    for (_, a) in &raw.loops {
        if let RawAnnotation::Invariant(e) = a {
            formulas.push(e);
        }
    }
    let signature = infer_sorts(&raw.program, &formulas, &Signature::new())?;
    let to_formula = |e: &Option<_>| e.as_ref().map_or(Formula::True, |e| expr_to_formula(e, &signature));
    let mut annotations = BTreeMap::new();
    for (l, a) in &raw.loops {
        let ann = match a {
            RawAnnotation::Invariant(e) => LoopAnnotation::Invariant(expr_to_formula(e, &signature)),
            RawAnnotation::Unwind(k) => LoopAnnotation::Unwind(*k),
        };
        match annotations.insert(LoopKey::of(l), ann.clone()) {
            Some(prev) if prev != ann => {
                return Err(SyntaxError::Annotation(format!(
                    "conflicting annotations for identical loops `{}`",
                    crate::syntax::ProgramDisplay(core::slice::from_ref(l))
                )))
            }
            _ => {}
        }
    }
    let mut missing = None;
    walk_all(&raw.program, &mut |s| {
        if s.is_loop() && missing.is_none() && !annotations.contains_key(&LoopKey::of(s)) {
            missing = Some(s.clone());
        }
    });
    if let Some(l) = missing {
        return Err(SyntaxError::Annotation(format!(
            "missing loop annotation for `{}`",
            crate::syntax::ProgramDisplay(core::slice::from_ref(&l))
        )));
    }
    Ok(AnnotatedProgram {
        pre: to_formula(&raw.pre),
        post: to_formula(&raw.post),
        program: raw.program,
        annotations,
        signature,
    })
}
