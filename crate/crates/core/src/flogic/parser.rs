// Grammar:
//
// program    -> statement* EOF
// statement  -> ( class_stmt | fact_stmt | forall_stmt ) '.'
// class_stmt -> IDENT ( '::' IDENT (',' IDENT)* )? ( '[' sig* ']' )?
// sig        -> IDENT '==>' IDENT sep?
// fact_stmt  -> object ( ':' IDENT )? ( '[' spec* ']' )?      (at least one of the two)
// forall_stmt-> 'FORALL' IDENT (',' IDENT)*
//               ( '<-' conj                                   query
//               | conj ( '->' | '<->' | '<-' ) conj )        rule
// conj       -> molecule ( ('and' | ',') molecule )*
// molecule   -> term ( ':' IDENT )? ( '[' spec* ']' )?
// spec       -> IDENT '->>' term sep?
// sep        -> ';' | ','
// term       -> IDENT | QUOTED | STRING
//
// Inside FORALL statements an identifier is a variable iff it is bound by the
// FORALL list. Query bodies additionally treat free all-caps identifiers
// (`PE1`, `NAME`) as existential variables.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::diag::{Code, Diagnostics, Pos};
use crate::ontology::{AttributeSignature, ClassDecl, Fact};
use crate::symbol::{Name, Value};

pub const KW_FORALL: &str = "FORALL";
pub const KW_AND: &str = "and";

/// Whether a free identifier in a query body denotes an existential variable.
pub fn is_existential_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Whether `s` can be written unquoted as an object-id in every context.
pub fn is_plain_constant(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(super::lexer::is_ident_start)
        && chars.all(super::lexer::is_ident_continue)
        && s != KW_FORALL
        && s != KW_AND
        && !is_existential_name(s)
}

struct SyntaxError;

type PResult<T> = Result<T, SyntaxError>;

#[derive(Clone, Copy, PartialEq)]
enum Scope {
    Rule,
    Query,
}

struct Parser<'d> {
    toks: Vec<Token>,
    idx: usize,
    diags: &'d mut Diagnostics,
    program: Program,
}

/// Parses a frame-logic source text. Errors are reported to `diags`; the
/// returned program holds every statement that parsed cleanly.
pub fn parse_program(src: &str, diags: &mut Diagnostics) -> Program {
    let toks = tokenize(src, diags);
    let mut p = Parser { toks, idx: 0, diags, program: Program::default() };
    while p.peek() != &Tok::Eof {
        let start = p.idx;
        if p.statement().is_err() {
            p.recover(start);
        }
    }
    p.program
}

/// Parses a text consisting of exactly one query.
pub fn parse_query(src: &str, diags: &mut Diagnostics) -> Option<Query> {
    let before = diags.error_count();
    let mut program = parse_program(src, diags);
    if diags.error_count() > before {
        return None;
    }
    let others = program.class_decls.len() + program.signatures.len() + program.facts.len() + program.rules.len();
    if program.queries.len() != 1 || others != 0 {
        diags.error(Code::SyntaxError, Pos::new(1, 1), format!("expected exactly one query, found {} queries and {others} other statements", program.queries.len()));
        return None;
    }
    program.queries.pop()
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.idx + n).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.idx].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.idx].tok.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn fail<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.peek().describe();
        self.diags.error(Code::SyntaxError, self.pos(), format!("expected {expected}, found {found}"));
        Err(SyntaxError)
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.fail(&t.describe())
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Name> {
        match self.peek() {
            Tok::Ident(s) if s != KW_FORALL && s != KW_AND => {
                let n = Name::new(s);
                self.bump();
                Ok(n)
            }
            _ => self.fail(what),
        }
    }

    /// Skips past the next `.` (or to EOF), always making progress.
    fn recover(&mut self, start: usize) {
        if self.idx == start {
            self.bump();
        }
        while !matches!(self.peek(), Tok::Dot | Tok::Eof) {
            self.bump();
        }
        self.eat(&Tok::Dot);
    }

    fn statement(&mut self) -> PResult<()> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) if s == KW_FORALL => {
                self.bump();
                self.forall(pos)
            }
            Tok::Ident(s) if s != KW_AND => match self.peek_at(1) {
                Tok::Dot => {
                    self.bump();
                    self.bump();
                    self.program.class_decls.push(ClassDecl { name: Name::new(&s), supers: BTreeSet::new(), pos: Some(pos) });
                    Ok(())
                }
                Tok::ColonColon => self.subclass_stmt(pos),
                // `C[].` declares a class; `C[A ==> T ...].` only adds signatures
                // (owners are declared implicitly when the schema is built)
                Tok::LBracket if matches!(self.peek_at(2), Tok::RBracket) || matches!(self.peek_at(3), Tok::SigArrow) => {
                    let name = self.ident("class name")?;
                    let sigs = self.signature_block(&name)?;
                    self.expect(&Tok::Dot)?;
                    if sigs.is_empty() {
                        self.program.class_decls.push(ClassDecl { name, supers: BTreeSet::new(), pos: Some(pos) });
                    }
                    self.program.signatures.extend(sigs);
                    Ok(())
                }
                _ => self.fact_stmt(pos),
            },
            Tok::Quoted(_) | Tok::Str(_) => self.fact_stmt(pos),
            _ => self.fail("a statement"),
        }
    }

    fn subclass_stmt(&mut self, pos: Pos) -> PResult<()> {
        let name = self.ident("class name")?;
        self.expect(&Tok::ColonColon)?;
        let mut supers = BTreeSet::new();
        supers.insert(self.ident("superclass name")?);
        while self.eat(&Tok::Comma) {
            supers.insert(self.ident("superclass name")?);
        }
        let sigs = if self.peek() == &Tok::LBracket { self.signature_block(&name)? } else { Vec::new() };
        self.expect(&Tok::Dot)?;
        self.program.class_decls.push(ClassDecl { name, supers, pos: Some(pos) });
        self.program.signatures.extend(sigs);
        Ok(())
    }

    fn signature_block(&mut self, owner: &Name) -> PResult<Vec<AttributeSignature>> {
        self.expect(&Tok::LBracket)?;
        let mut sigs = Vec::new();
        while !self.eat(&Tok::RBracket) {
            let pos = self.pos();
            let attribute = self.ident("attribute name or `]`")?;
            if self.peek() == &Tok::SetArrow {
                return self.fail("`==>` (attribute values and signatures cannot be mixed)");
            }
            self.expect(&Tok::SigArrow)?;
            let value_type = self.ident("value type")?;
            sigs.push(AttributeSignature { owner: owner.clone(), attribute, value_type, pos: Some(pos) });
            if !self.eat(&Tok::Semi) {
                self.eat(&Tok::Comma);
            }
        }
        Ok(sigs)
    }

    fn constant(&mut self) -> PResult<Value> {
        let v = match self.peek() {
            Tok::Ident(s) if s != KW_FORALL && s != KW_AND => Value::Object(Name::new(s)),
            Tok::Quoted(s) => Value::Object(Name::new(s)),
            Tok::Str(s) => Value::Literal(Arc::from(s.as_str())),
            _ => return self.fail("an object-id or string literal"),
        };
        self.bump();
        Ok(v)
    }

    fn fact_stmt(&mut self, pos: Pos) -> PResult<()> {
        let subject = match self.constant()? {
            Value::Object(o) => o,
            Value::Literal(_) => {
                self.diags.error(Code::SyntaxError, pos, "a string literal cannot be the subject of a fact");
                return Err(SyntaxError);
            }
        };
        let mut facts = Vec::new();
        let mut any = false;
        if self.eat(&Tok::Colon) {
            let class = self.ident("class name")?;
            facts.push(FactDecl { fact: Fact::Member { object: subject.clone(), class }, pos: Some(pos) });
            any = true;
        }
        if self.eat(&Tok::LBracket) {
            any = true;
            while !self.eat(&Tok::RBracket) {
                let spos = self.pos();
                let attribute = self.ident("attribute name or `]`")?;
                if self.peek() == &Tok::SigArrow {
                    return self.fail("`->>` (signatures belong on class declarations)");
                }
                self.expect(&Tok::SetArrow)?;
                let value = self.constant()?;
                facts.push(FactDecl { fact: Fact::Attr { object: subject.clone(), attribute, value }, pos: Some(spos) });
                if !self.eat(&Tok::Semi) {
                    self.eat(&Tok::Comma);
                }
            }
        }
        if !any {
            return self.fail("`:`, `::` or `[`");
        }
        self.expect(&Tok::Dot)?;
        self.program.facts.extend(facts);
        Ok(())
    }

    fn forall(&mut self, pos: Pos) -> PResult<()> {
        let mut vars: Vec<Name> = Vec::new();
        let mut bound = BTreeSet::new();
        loop {
            let vpos = self.pos();
            let v = self.ident("variable name")?;
            if !bound.insert(v.clone()) {
                self.diags.error(Code::DuplicateVariable, vpos, format!("variable `{v}` is bound twice"));
            }
            vars.push(v);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if self.eat(&Tok::ImpliedBy) {
            let body = self.conjunction(&bound, Scope::Query)?;
            self.expect(&Tok::Dot)?;
            let used = vars_of(&body);
            for v in &vars {
                if !used.contains(v) {
                    self.diags.error(Code::UnsafeQuery, pos, format!("projected variable `{v}` does not occur in the query body"));
                }
            }
            self.program.queries.push(Query { vars, body, pos: Some(pos) });
            return Ok(());
        }
        let first = self.conjunction(&bound, Scope::Rule)?;
        let (kind, reversed) = match self.peek() {
            Tok::Implies => (RuleKind::Implication, false),
            Tok::ImpliedBy => (RuleKind::Implication, true),
            Tok::Equiv => (RuleKind::Equivalence, false),
            _ => return self.fail("`->`, `<->` or `<-`"),
        };
        self.bump();
        let second = self.conjunction(&bound, Scope::Rule)?;
        self.expect(&Tok::Dot)?;
        let (body, head) = if reversed { (second, first) } else { (first, second) };
        let rule = Rule { kind, vars, body, head, pos: Some(pos) };
        check_rule_safety(&rule, self.diags);
        self.program.rules.push(rule);
        Ok(())
    }

    fn term(&mut self, bound: &BTreeSet<Name>, scope: Scope) -> PResult<Term> {
        let t = match self.peek() {
            Tok::Ident(s) if s != KW_FORALL && s != KW_AND => {
                let n = Name::new(s);
                if bound.contains(&n) || (scope == Scope::Query && is_existential_name(s)) {
                    Term::Var(n)
                } else {
                    Term::Object(n)
                }
            }
            Tok::Quoted(s) => Term::Object(Name::new(s)),
            Tok::Str(s) => Term::Literal(Arc::from(s.as_str())),
            _ => return self.fail("a variable, object-id or string literal"),
        };
        self.bump();
        Ok(t)
    }

    fn conjunction(&mut self, bound: &BTreeSet<Name>, scope: Scope) -> PResult<Vec<Atom>> {
        let mut atoms = self.molecule(bound, scope)?;
        loop {
            let joined = matches!(self.peek(), Tok::Ident(s) if s == KW_AND) || self.peek() == &Tok::Comma;
            if !joined {
                return Ok(atoms);
            }
            self.bump();
            atoms.extend(self.molecule(bound, scope)?);
        }
    }

    fn molecule(&mut self, bound: &BTreeSet<Name>, scope: Scope) -> PResult<Vec<Atom>> {
        let pos = self.pos();
        let subject = self.term(bound, scope)?;
        let mut atoms = Vec::new();
        let mut any = false;
        if self.eat(&Tok::Colon) {
            let class = self.ident("class name")?;
            atoms.push(Atom::Member { term: subject.clone(), class });
            any = true;
        }
        if self.eat(&Tok::LBracket) {
            any = true;
            while !self.eat(&Tok::RBracket) {
                let attribute = self.ident("attribute name or `]`")?;
                self.expect(&Tok::SetArrow)?;
                let value = self.term(bound, scope)?;
                atoms.push(Atom::Attr { subject: subject.clone(), attribute, value });
                if !self.eat(&Tok::Semi) {
                    self.eat(&Tok::Comma);
                }
            }
        }
        if !any {
            return self.fail("`:` or `[` after the molecule subject");
        }
        if matches!(subject, Term::Literal(_)) {
            self.diags.error(Code::SyntaxError, pos, "a string literal cannot be the subject of a molecule");
            return Err(SyntaxError);
        }
        Ok(atoms)
    }
}

/// Range restriction: every head variable occurs in the body; for an
/// equivalence, both sides use the same variables.
pub fn check_rule_safety(rule: &Rule, diags: &mut Diagnostics) -> bool {
    let body = vars_of(&rule.body);
    let head = vars_of(&rule.head);
    let mut ok = true;
    for v in head.difference(&body) {
        diags.error(Code::UnsafeRule, rule.pos, format!("variable `{v}` occurs in the head but not in the body"));
        ok = false;
    }
    if rule.kind == RuleKind::Equivalence {
        for v in body.difference(&head) {
            diags.error(Code::UnsafeRule, rule.pos, format!("variable `{v}` occurs on the left of `<->` but not on the right"));
            ok = false;
        }
    }
    ok
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(src: &str) -> Program {
        let mut d = Diagnostics::new();
        let p = parse_program(src, &mut d);
        assert!(d.is_empty(), "{d}");
        p
    }

    fn parse_err(src: &str) -> Diagnostics {
        let mut d = Diagnostics::new();
        parse_program(src, &mut d);
        assert!(d.has_errors());
        d
    }

    #[test]
    fn empty_input() {
        assert!(parse_ok("").is_empty());
        assert!(parse_ok("  // nothing\n").is_empty());
    }

    #[test]
    fn subclass_declaration() {
        let p = parse_ok("TForscher :: TAngestellter.");
        assert_eq!(p.class_decls.len(), 1);
        assert_eq!(p.class_decls[0].name.as_str(), "TForscher");
        assert_eq!(p.class_decls[0].supers.iter().map(Name::as_str).collect::<Vec<_>>(), ["TAngestellter"]);
    }

    #[test]
    fn empty_signature_block_declares_class() {
        let p = parse_ok("Object[]. TObject.");
        assert_eq!(p.class_decls.len(), 2);
        assert!(p.signatures.is_empty());
    }

    #[test]
    fn signature_entries_need_no_separator() {
        let p = parse_ok("TPerson[\n HatName ==> STRING\n HatVeroeffentlicht ==> TVeroeffentlichung\n].");
        assert_eq!(p.signatures.len(), 2);
        assert_eq!(p.signatures[1].value_type.as_str(), "TVeroeffentlichung");
    }

    #[test]
    fn grouped_fact_expands() {
        let p = parse_ok("pr1 : TProjekt[HatMitglied ->> pe1; HatKunde ->> or1]. `Beispiel.pdf`[HatTitel ->> \"T\"].");
        assert_eq!(p.facts.len(), 4);
        assert_eq!(p.facts[0].fact, Fact::member("pr1", "TProjekt"));
        assert_eq!(p.facts[3].fact, Fact::attr("Beispiel.pdf", "HatTitel", Value::literal("T")));
    }

    #[test]
    fn semicolon_and_comma_are_synonyms() {
        let a = parse_ok("FORALL X, Y, Z X : C [A ->> Y ; B ->> Z] -> Y[D ->> Z].");
        let b = parse_ok("FORALL X, Y, Z X : C [A ->> Y, B ->> Z] -> Y[D ->> Z].");
        assert_eq!(a.without_positions(), b.without_positions());
        assert_eq!(a.rules[0].body.len(), 3);
    }

    #[test]
    fn reverse_implication() {
        let a = parse_ok("FORALL X X[B ->> X] <- X : C.");
        assert_eq!(a.rules[0].kind, RuleKind::Implication);
        assert_eq!(a.rules[0].body, vec![Atom::Member { term: Term::Var("X".into()), class: "C".into() }]);
    }

    #[test]
    fn forall_binding_decides_variables() {
        let p = parse_ok("FORALL X X : C [A ->> pe1] -> X : D.");
        let r = &p.rules[0];
        assert_eq!(r.body[1], Atom::Attr { subject: Term::Var("X".into()), attribute: "A".into(), value: Term::Object("pe1".into()) });
    }

    #[test]
    fn unsafe_rule_is_reported() {
        let d = parse_err("FORALL X, Y X : C -> Y : D.");
        assert!(d.has_code(Code::UnsafeRule));
        let d = parse_err("FORALL X, Y X[A ->> Y] <-> X : D.");
        assert!(d.has_code(Code::UnsafeRule));
    }

    #[test]
    fn duplicate_forall_variable() {
        let d = parse_err("FORALL X, X X : C -> X : D.");
        assert!(d.has_code(Code::DuplicateVariable));
    }

    #[test]
    fn single_atom_query() {
        let mut d = Diagnostics::new();
        let q = parse_query("FORALL X <- X : TPerson.", &mut d).unwrap();
        assert_eq!(q.vars, vec![Name::new("X")]);
        assert_eq!(q.body, vec![Atom::Member { term: Term::Var("X".into()), class: "TPerson".into() }]);
    }

    #[test]
    fn unbound_projection_is_unsafe() {
        let mut d = Diagnostics::new();
        assert!(parse_query("FORALL X <- Y : TPerson.", &mut d).is_none());
        assert!(d.has_code(Code::UnsafeQuery));
    }

    #[test]
    fn existential_query_variables() {
        let mut d = Diagnostics::new();
        let q = parse_query("FORALL N <- P : TPerson [HatName ->> N] and P[KooperiertMit ->> pe9].", &mut d).unwrap();
        assert!(d.is_empty());
        assert_eq!(vars_of(&q.body).len(), 2);
        assert!(q.body.contains(&Atom::Attr { subject: Term::Var("P".into()), attribute: "KooperiertMit".into(), value: Term::Object("pe9".into()) }));
    }

    #[test]
    fn recovery_continues_after_errors() {
        let mut d = Diagnostics::new();
        let p = parse_program("A :: . B :: A. C[X ->> ]. D :: B.", &mut d);
        assert_eq!(d.error_count(), 2, "{d}");
        assert_eq!(p.class_decls.len(), 2);
    }

    #[test]
    fn mixed_brackets_are_rejected() {
        assert!(parse_err("C[A ==> STRING B ->> x].").has_code(Code::SyntaxError));
    }

    #[test]
    fn diagnostics_carry_positions() {
        let d = parse_err("A :: B.\nB :: .");
        let e = d.iter().next().unwrap();
        assert_eq!(e.pos, Some(Pos::new(2, 6)));
    }
}
