//! Static helpers used by the loop rules: written-variable analysis, fresh names,
//! anonymizing updates, and the syntactic conversions of for-loop headers.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::dl::{parallel_compose, Term, Update};
use crate::syntax::{ForInit, Expr, Ident, Stmt, UpdateExpr};

fn collect_vars(s: &Stmt, out: &mut BTreeSet<Ident>) {
    s.walk(&mut |s| match s {
        Stmt::VarDecl(_, n, e) | Stmt::Assign(n, e) => {
            out.insert(n.clone());
            e.vars_into(out);
        }
        Stmt::ExprStmt(u) => update_vars(u, out),
        Stmt::If(c, ..) | Stmt::While(c, _) | Stmt::Throw(c) => c.vars_into(out),
        Stmt::For { init, guard, update, .. } => {
            match init {
                ForInit::Decls(ds) => ds.iter().for_each(|d| {
                    out.insert(d.name.clone());
                    d.init.vars_into(out);
                }),
                ForInit::Exprs(us) => us.iter().for_each(|u| update_vars(u, out)),
                ForInit::Empty => {}
            }
            if let Some(g) = guard {
                g.vars_into(out);
            }
            update.iter().for_each(|u| update_vars(u, out));
        }
        Stmt::TryCatch(_, v, _) | Stmt::LoopScope(v, _) => {
            out.insert(v.clone());
        }
        _ => {}
    });
}

fn update_vars(u: &UpdateExpr, out: &mut BTreeSet<Ident>) {
    out.insert(u.target().clone());
    if let UpdateExpr::Assign(_, e) = u {
        e.vars_into(out);
    }
}

/// Every variable name mentioned by the program.
pub fn program_vars(prog: &[Stmt]) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    prog.iter().for_each(|s| collect_vars(s, &mut out));
    out
}

/// Every variable name and label mentioned by the program.
pub fn program_idents(prog: &[Stmt]) -> BTreeSet<Ident> {
    let mut out = program_vars(prog);
    crate::syntax::walk_all(prog, &mut |s| match s {
        Stmt::Labeled(ls, _) => out.extend(ls.iter().cloned()),
        Stmt::Break(Some(l)) | Stmt::Continue(Some(l)) => {
            out.insert(l.clone());
        }
        _ => {}
    });
    out
}

/// Syntactic over-approximation of the variables `s` may write.
pub fn assigned_vars(s: &Stmt) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    s.walk(&mut |s| match s {
        Stmt::VarDecl(_, n, _) | Stmt::Assign(n, _) => {
            out.insert(n.clone());
        }
        Stmt::ExprStmt(u) => {
            out.insert(u.target().clone());
        }
        Stmt::For { init, update, .. } => {
            match init {
                ForInit::Decls(ds) => out.extend(ds.iter().map(|d| d.name.clone())),
                ForInit::Exprs(us) => out.extend(us.iter().map(|u| u.target().clone())),
                ForInit::Empty => {}
            }
            out.extend(update.iter().map(|u| u.target().clone()));
        }
        Stmt::TryCatch(_, v, _) | Stmt::LoopScope(v, _) => {
            out.insert(v.clone());
        }
        _ => {}
    });
    out
}

/// Source of names that collide with nothing in the proof.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreshNamePool {
    used: BTreeSet<Ident>,
    counter: u64,
}

impl FreshNamePool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_used(used: impl IntoIterator<Item = Ident>) -> Self {
        FreshNamePool { used: used.into_iter().collect(), counter: 0 }
    }

    pub fn reserve(&mut self, names: impl IntoIterator<Item = Ident>) {
        self.used.extend(names);
    }

    pub fn is_used(&self, name: &str) -> bool {
        self.used.contains(name)
    }

    /// A fresh program-variable name: `base` if unused, else `base_1`, `base_2`, ...
    pub fn fresh_var(&mut self, base: &str) -> Ident {
        let mut name: Ident = base.into();
        let mut k = 1;
        while self.used.contains(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        self.used.insert(name.clone());
        name
    }

    /// A fresh skolem constant `var#k`; the `#` keeps it apart from program names.
    pub fn fresh_const(&mut self, var: &str) -> Ident {
        loop {
            let name = format!("{var}#{}", self.counter);
            self.counter += 1;
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// `base || v1 := v1#k1 || ...` havocking every variable in `vars`.
pub fn anonymizing_update(base: &Update, vars: &BTreeSet<Ident>, pool: &mut FreshNamePool) -> Update {
    let havoc: Vec<(Ident, Term)> =
        vars.iter().map(|v| (v.clone(), Term::Fresh(pool.fresh_const(v)))).collect();
    parallel_compose(base, &Update::from_elems(havoc))
}

/// Statement list equivalent to a loop initializer.
pub fn init_to_stmts(init: &ForInit) -> Vec<Stmt> {
    match init {
        ForInit::Empty => Vec::new(),
        ForInit::Decls(ds) => {
            ds.iter().map(|d| Stmt::VarDecl(d.sort, d.name.clone(), d.init.clone())).collect()
        }
        ForInit::Exprs(us) => us.iter().cloned().map(Stmt::ExprStmt).collect(),
    }
}

/// Statement list equivalent to a for-loop update list.
pub fn update_list_to_stmts(upd: &[UpdateExpr]) -> Vec<Stmt> {
    upd.iter().cloned().map(Stmt::ExprStmt).collect()
}

/// The guard of a for loop, `true` when absent.
pub fn guard_or_true(guard: Option<&Expr>) -> Expr {
    guard.cloned().unwrap_or(Expr::Bool(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, Declarator, Sort};
    use alloc::string::{String, ToString};
    use alloc::vec;

    fn set(items: &[&str]) -> BTreeSet<Ident> {
        items.iter().map(|s| String::from(*s)).collect()
    }

    #[test]
    fn assigned_variables() {
        let p = parse_program("while (b) { b = false; }").unwrap();
        assert_eq!(assigned_vars(&p[0]), set(&["b"]));
        let p = parse_program("for (int i = 0; i < n; i++) s = s + i;").unwrap();
        assert_eq!(assigned_vars(&p[0]), set(&["i", "s"]));
        let p = parse_program("try { i = 1; } catch (e) { j = 2; }").unwrap();
        assert_eq!(assigned_vars(&p[0]), set(&["e", "i", "j"]));
    }

    #[test]
    fn fresh_names() {
        let mut pool = FreshNamePool::with_used(set(&["x"]));
        assert_eq!(pool.fresh_var("x"), "x_1");
        assert_eq!(pool.fresh_var("x"), "x_2");
        assert_eq!(FreshNamePool::new().fresh_var("cont"), "cont");
    }

    #[test]
    fn anonymization() {
        let mut pool = FreshNamePool::new();
        assert_eq!(anonymizing_update(&Update::empty(), &set(&["i"]), &mut pool).to_string(), "{i := i#0}");
        let mut pool = FreshNamePool::new();
        let u = anonymizing_update(&Update::elem("i", Term::Int(0)), &set(&["i", "s"]), &mut pool);
        assert_eq!(u.to_string(), "{i := 0 || i := i#0 || s := s#1}");
        assert_eq!(u.get("i"), Some(&Term::Fresh("i#0".into())));
    }

    #[test]
    fn header_conversions() {
        let init = ForInit::Decls(vec![
            Declarator { sort: Sort::Int, name: "i".into(), init: Expr::Int(0) },
            Declarator { sort: Sort::Int, name: "j".into(), init: Expr::Int(1) },
        ]);
        assert_eq!(
            init_to_stmts(&init),
            vec![
                Stmt::VarDecl(Sort::Int, "i".into(), Expr::Int(0)),
                Stmt::VarDecl(Sort::Int, "j".into(), Expr::Int(1))
            ]
        );
        assert!(init_to_stmts(&ForInit::Empty).is_empty());
        let us = vec![UpdateExpr::Assign("i".into(), Expr::Int(0)), UpdateExpr::Incr("j".into())];
        assert_eq!(
            init_to_stmts(&ForInit::Exprs(us.clone())),
            vec![Stmt::ExprStmt(us[0].clone()), Stmt::ExprStmt(us[1].clone())]
        );
        assert_eq!(update_list_to_stmts(&us).len(), 2);
        assert!(update_list_to_stmts(&[]).is_empty());
        assert_eq!(guard_or_true(None), Expr::Bool(true));
        assert_eq!(guard_or_true(Some(&Expr::var("g"))), Expr::var("g"));
    }
}
