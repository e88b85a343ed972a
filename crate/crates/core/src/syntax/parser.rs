//! Recursive-descent parser for programs and annotation formulas.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::error::SyntaxError;

/// Raw loop annotation, before formulas are typed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawAnnotation {
    Invariant(Expr),
    Unwind(u32),
}

/// Untyped result of reading an annotated source file.
#[derive(Debug, Clone, Default)]
pub struct RawAnnotated {
    pub program: Vec<Stmt>,
    pub pre: Option<Expr>,
    pub post: Option<Expr>,
    /// Annotated loops (labels stripped) paired with their annotation.
    pub loops: Vec<(Stmt, RawAnnotation)>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    collect_annotations: bool,
    pending: Option<(RawAnnotation, usize, usize)>,
    out: RawAnnotated,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn new(src: &str, collect_annotations: bool) -> PResult<Self> {
        let mut toks = tokenize(src)?;
        if !collect_annotations {
            toks.retain(|t| !matches!(t.tok, Tok::Annot(..)));
        }
        Ok(Parser { toks, pos: 0, collect_annotations, pending: None, out: RawAnnotated::default() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(SyntaxError::Parse { line: t.line, col: t.col, msg: msg.into() })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(q) if *q == k)
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.is_punct(p) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{p}`, found {}", describe(self.peek())))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{k}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            other => self.error(format!("expected identifier, found {}", describe(&other))),
        }
    }

    fn absorb_annotations(&mut self) -> PResult<()> {
        while let Tok::Annot(key, body) = self.peek().clone() {
            let (line, col) = (self.toks[self.pos].line, self.toks[self.pos].col);
            match key.as_str() {
                "pre" | "post" => {
                    let f = parse_formula_at(&body, line)?;
                    let slot = if key == "pre" { &mut self.out.pre } else { &mut self.out.post };
                    if slot.is_some() {
                        return self.error(format!("duplicate `{key}` annotation"));
                    }
                    *slot = Some(f);
                }
                "invariant" | "unwind" => {
                    if self.pending.is_some() {
                        return self.error("two loop annotations for one loop");
                    }
                    let a = if key == "invariant" {
                        RawAnnotation::Invariant(parse_formula_at(&body, line)?)
                    } else {
                        let k: u32 = body.trim().parse().map_err(|_| SyntaxError::Parse {
                            line,
                            col,
                            msg: format!("unwind count must be a natural number, found `{body}`"),
                        })?;
                        RawAnnotation::Unwind(k)
                    };
                    self.pending = Some((a, line, col));
                }
                other => return self.error(format!("unknown annotation `{other}`")),
            }
            self.bump();
        }
        Ok(())
    }

    fn program(&mut self) -> PResult<Vec<Stmt>> {
        let mut prog = Vec::new();
        loop {
            self.absorb_annotations()?;
            if matches!(self.peek(), Tok::Eof) {
                break;
            }
            prog.push(self.stmt()?);
        }
        if let Some((_, line, col)) = self.pending.take() {
            return Err(SyntaxError::Annotation(format!(
                "{line}:{col}: annotation on non-loop (no statement follows)"
            )));
        }
        Ok(prog)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        if self.collect_annotations {
            self.absorb_annotations()?;
        }
        let pending = self.pending.take();
        let s = self.stmt_inner()?;
        if let Some((annot, line, col)) = pending {
            match s.as_labeled_loop() {
                Some((_, lp)) => self.out.loops.push((lp.clone(), annot)),
                None => {
                    return Err(SyntaxError::Annotation(format!(
                        "{line}:{col}: annotation on non-loop statement"
                    )))
                }
            }
        }
        Ok(s)
    }

    fn block_body(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let mut body = Vec::new();
        loop {
            if self.collect_annotations {
                self.absorb_annotations()?;
            }
            if self.is_punct("}") {
                break;
            }
            if matches!(self.peek(), Tok::Eof) {
                return self.error("unterminated block");
            }
            body.push(self.stmt()?);
        }
        if let Some((_, line, col)) = self.pending.take() {
            return Err(SyntaxError::Annotation(format!("{line}:{col}: annotation on non-loop")));
        }
        self.bump();
        Ok(body)
    }

    fn sort_kw(&self) -> Option<Sort> {
        match self.peek() {
            Tok::Kw("int") => Some(Sort::Int),
            Tok::Kw("boolean") => Some(Sort::Bool),
            _ => None,
        }
    }

    fn stmt_inner(&mut self) -> PResult<Stmt> {
        if let Some(sort) = self.sort_kw() {
            self.bump();
            let name = self.ident()?;
            self.expect_punct("=")?;
            let init = self.expr()?;
            self.expect_punct(";")?;
            return Ok(Stmt::VarDecl(sort, name, init));
        }
        match self.peek().clone() {
            Tok::Punct(";") => {
                self.bump();
                Ok(Stmt::Skip)
            }
            Tok::Punct("{") => Ok(Stmt::Block(self.block_body()?)),
            Tok::Ident(name) if matches!(self.peek_at(1), Tok::Punct(":")) => {
                self.bump();
                self.bump();
                let body = self.stmt()?;
                if let Stmt::Labeled(inner, _) = &body {
                    if inner.contains(&name) {
                        return Err(SyntaxError::DuplicateLabel(name));
                    }
                }
                Ok(Stmt::labeled(alloc::vec![name], body))
            }
            Tok::Ident(_) => {
                let u = self.update_expr()?;
                self.expect_punct(";")?;
                Ok(match u {
                    UpdateExpr::Assign(t, e) => Stmt::Assign(t, e),
                    other => Stmt::ExprStmt(other),
                })
            }
            Tok::Kw("if") => {
                self.bump();
                self.expect_punct("(")?;
                let c = self.expr()?;
                self.expect_punct(")")?;
                let then = self.stmt()?;
                let els = if self.is_kw("else") {
                    self.bump();
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                Ok(Stmt::If(c, Box::new(then), els))
            }
            Tok::Kw("while") => {
                self.bump();
                self.expect_punct("(")?;
                let c = self.expr()?;
                self.expect_punct(")")?;
                let body = self.stmt()?;
                Ok(Stmt::While(c, Box::new(body)))
            }
            Tok::Kw("for") => self.for_stmt(),
            Tok::Kw(k @ ("break" | "continue")) => {
                self.bump();
                let label = match self.peek() {
                    Tok::Ident(_) => Some(self.ident()?),
                    _ => None,
                };
                self.expect_punct(";")?;
                Ok(if k == "break" { Stmt::Break(label) } else { Stmt::Continue(label) })
            }
            Tok::Kw("throw") => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(";")?;
                Ok(Stmt::Throw(e))
            }
            Tok::Kw("try") => {
                self.bump();
                let body = self.block_body()?;
                self.expect_kw("catch")?;
                self.expect_punct("(")?;
                if self.is_kw("int") {
                    self.bump();
                }
                let var = self.ident()?;
                self.expect_punct(")")?;
                let handler = self.block_body()?;
                Ok(Stmt::TryCatch(body, var, handler))
            }
            Tok::Kw("loop-scope") => {
                self.bump();
                self.expect_punct("(")?;
                let x = self.ident()?;
                self.expect_punct(")")?;
                Ok(Stmt::LoopScope(x, self.block_body()?))
            }
            other => self.error(format!("expected statement, found {}", describe(&other))),
        }
    }

    fn for_stmt(&mut self) -> PResult<Stmt> {
        self.expect_kw("for")?;
        self.expect_punct("(")?;
        let init = if self.is_punct(";") {
            ForInit::Empty
        } else if let Some(first) = self.sort_kw() {
            let mut decls = Vec::new();
            let mut sort = first;
            loop {
                if let Some(s) = self.sort_kw() {
                    sort = s;
                    self.bump();
                }
                let name = self.ident()?;
                self.expect_punct("=")?;
                let init = self.expr()?;
                if decls.iter().any(|d: &Declarator| d.name == name) {
                    return self.error(format!("variable `{name}` declared twice in loop initializer"));
                }
                decls.push(Declarator { sort, name, init });
                if !self.is_punct(",") {
                    break;
                }
                self.bump();
            }
            ForInit::Decls(decls)
        } else {
            ForInit::Exprs(self.update_list()?)
        };
        self.expect_punct(";")?;
        let guard = if self.is_punct(";") { None } else { Some(self.expr()?) };
        self.expect_punct(";")?;
        let update = if self.is_punct(")") { Vec::new() } else { self.update_list()? };
        self.expect_punct(")")?;
        let body = self.stmt()?;
        Ok(Stmt::For { init, guard, update, body: Box::new(body) })
    }

    fn update_list(&mut self) -> PResult<Vec<UpdateExpr>> {
        let mut items = alloc::vec![self.update_expr()?];
        while self.is_punct(",") {
            self.bump();
            items.push(self.update_expr()?);
        }
        Ok(items)
    }

    fn update_expr(&mut self) -> PResult<UpdateExpr> {
        let target = self.ident()?;
        match self.bump() {
            Tok::Punct("=") => Ok(UpdateExpr::Assign(target, self.expr()?)),
            Tok::Punct("++") => Ok(UpdateExpr::Incr(target)),
            Tok::Punct("--") => Ok(UpdateExpr::Decr(target)),
            other => {
                self.pos -= 1;
                self.error(format!("expected `=`, `++` or `--`, found {}", describe(&other)))
            }
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(0, false)
    }

    fn binary(&mut self, min_prec: u8, allow_implies: bool) -> PResult<Expr> {
        let mut lhs = self.unary(allow_implies)?;
        while let Tok::Punct(p) = self.peek() {
            let op = match binop_of(p) {
                Some(op) if op != BinOp::Implies || allow_implies => op,
                _ => break,
            };
            if op.precedence() < min_prec {
                break;
            }
            self.bump();
            let next = if op.is_right_assoc() { op.precedence() } else { op.precedence() + 1 };
            let rhs = self.binary(next, allow_implies)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self, allow_implies: bool) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Punct("!") => {
                self.bump();
                Ok(Expr::not(self.unary(allow_implies)?))
            }
            Tok::Punct("-") => {
                self.bump();
                if let Tok::Int(v) = *self.peek() {
                    self.bump();
                    return Ok(Expr::Int(-v));
                }
                Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary(allow_implies)?)))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Kw("true") => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::Kw("false") => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Var(name))
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.binary(0, allow_implies)?;
                self.expect_punct(")")?;
                Ok(e)
            }
            other => self.error(format!("expected expression, found {}", describe(&other))),
        }
    }
}

fn binop_of(p: &str) -> Option<BinOp> {
    Some(match p {
        "+" => BinOp::Add,
        "-" => BinOp::Sub,
        "*" => BinOp::Mul,
        "==" => BinOp::Eq,
        "!=" => BinOp::Ne,
        "<" => BinOp::Lt,
        "<=" => BinOp::Le,
        ">" => BinOp::Gt,
        ">=" => BinOp::Ge,
        "&&" => BinOp::And,
        "||" => BinOp::Or,
        "->" => BinOp::Implies,
        _ => return None,
    })
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Int(v) => format!("integer `{v}`"),
        Tok::Kw(k) => format!("`{k}`"),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Annot(k, _) => format!("annotation `{k}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

/// Parses program text; `//@` annotations are ignored.
pub fn parse_program(src: &str) -> Result<Vec<Stmt>, SyntaxError> {
    let mut p = Parser::new(src, false)?;
    p.program()
}

/// Parses a single program expression (no `->`).
pub fn parse_expr(src: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(src, false)?;
    let e = p.expr()?;
    if !matches!(p.peek(), Tok::Eof) {
        return p.error("trailing input after expression");
    }
    Ok(e)
}

/// Parses formula surface syntax into an untyped expression tree that may contain `->`.
pub fn parse_formula_expr(src: &str) -> Result<Expr, SyntaxError> {
    parse_formula_at(src, 1)
}

fn parse_formula_at(src: &str, line: usize) -> Result<Expr, SyntaxError> {
    let shift = |e: SyntaxError| match e {
        SyntaxError::Parse { line: l, col, msg } => {
            SyntaxError::Parse { line: line + l - 1, col, msg: format!("malformed formula: {msg}") }
        }
        other => other,
    };
    let mut p = Parser::new(src, false).map_err(shift)?;
    let e = p.binary(0, true).map_err(shift)?;
    if !matches!(p.peek(), Tok::Eof) {
        return p.error::<Expr>("trailing input after formula").map_err(shift);
    }
    Ok(e)
}

/// Parses a source file with `//@` annotations, without typing formulas.
pub fn parse_annotated_raw(src: &str) -> Result<RawAnnotated, SyntaxError> {
    let mut p = Parser::new(src, true)?;
    let prog = p.program()?;
    let mut out = core::mem::take(&mut p.out);
    out.program = prog;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn while_loop() {
        let p = parse_program("b = true; while (b) { b = false; }").unwrap();
        assert_eq!(p[0], Stmt::Assign("b".into(), Expr::Bool(true)));
        assert_eq!(
            p[1],
            Stmt::While(
                Expr::var("b"),
                Box::new(Stmt::Block(vec![Stmt::Assign("b".into(), Expr::Bool(false))]))
            )
        );
    }

    #[test]
    fn for_loop() {
        let p = parse_program("for (int i = 0; i < n; i++) s = s + i;").unwrap();
        assert_eq!(
            p,
            vec![Stmt::For {
                init: ForInit::Decls(vec![Declarator {
                    sort: Sort::Int,
                    name: "i".into(),
                    init: Expr::Int(0)
                }]),
                guard: Some(Expr::bin(BinOp::Lt, Expr::var("i"), Expr::var("n"))),
                update: vec![UpdateExpr::Incr("i".into())],
                body: Box::new(Stmt::Assign(
                    "s".into(),
                    Expr::bin(BinOp::Add, Expr::var("s"), Expr::var("i"))
                )),
            }]
        );
    }

    #[test]
    fn label_lists_merge() {
        let p = parse_program("l1: l2: while (b) { continue l1; }").unwrap();
        match &p[0] {
            Stmt::Labeled(ls, body) => {
                assert_eq!(ls, &vec![String::from("l1"), String::from("l2")]);
                assert!(matches!(**body, Stmt::While(..)));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            parse_program("l: l: ;").unwrap_err(),
            SyntaxError::DuplicateLabel("l".into())
        );
    }

    #[test]
    fn precedence_and_negative_literals() {
        let e = parse_expr("a - -3 * b < c && !d").unwrap();
        let expect = Expr::bin(
            BinOp::And,
            Expr::bin(
                BinOp::Lt,
                Expr::bin(
                    BinOp::Sub,
                    Expr::var("a"),
                    Expr::bin(BinOp::Mul, Expr::Int(-3), Expr::var("b")),
                ),
                Expr::var("c"),
            ),
            Expr::not(Expr::var("d")),
        );
        assert_eq!(e, expect);
        assert!(parse_expr("a -> b").is_err());
        assert!(parse_formula_expr("a -> b -> c").is_ok());
    }

    #[test]
    fn syntax_error_position() {
        match parse_program("i = 1;\nwhile (i < 3 { }") {
            Err(SyntaxError::Parse { line, col, .. }) => assert_eq!((line, col), (2, 14)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn annotations_attach_to_loops() {
        let raw = parse_annotated_raw(
            "//@ pre: n >= 0\n//@ post: s == n\n//@ invariant: s == i && i <= n\nwhile (i < n) { s = s + 1; i = i + 1; }\n//@ unwind: 2\nl: for (;;) break;",
        )
        .unwrap();
        assert!(raw.pre.is_some() && raw.post.is_some());
        assert_eq!(raw.loops.len(), 2);
        assert_eq!(raw.loops[1].1, RawAnnotation::Unwind(2));
        let err = parse_annotated_raw("//@ unwind: 1\ni = 1;").unwrap_err();
        assert!(matches!(err, SyntaxError::Annotation(m) if m.contains("non-loop")));
    }
}
