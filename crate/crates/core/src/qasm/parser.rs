use std::collections::HashMap;

use super::lexer::{tokenize, Token, TokenKind};
use super::ParseDiagnostic;
use crate::circuit::{standard_gate, Circuit, Instruction, OpaqueDecl};

type PResult<T> = Result<T, ParseDiagnostic>;

const QASM3_KEYWORDS: &[&str] = &[
    "qubit", "bit", "def", "for", "while", "let", "const", "input", "output", "ctrl", "inv", "pow", "gphase", "defcal",
    "cal", "box", "delay", "stretch", "angle", "float", "int", "uint", "bool", "return", "break", "continue", "switch",
    "end",
];

/// Parameter expression inside a gate body, evaluated when the gate is inlined.
#[derive(Debug, Clone)]
enum Expr {
    Num(f64),
    Param(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Expr {
    fn eval(&self, bindings: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Param(i) => bindings[*i],
            Expr::Neg(e) => -e.eval(bindings),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(bindings), b.eval(bindings));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct BodyOp {
    name: String,
    params: Vec<Expr>,
    /// Indices into the definition's qubit arguments.
    args: Vec<usize>,
    barrier: bool,
    line: usize,
    column: usize,
}

#[derive(Debug, Clone)]
struct GateDef {
    num_params: usize,
    num_qubits: usize,
    body: Vec<BodyOp>,
}

#[derive(Debug, Clone)]
struct Register {
    start: usize,
    size: usize,
}

/// Operand reference before broadcasting.
enum Operand {
    Single(usize),
    Whole(Vec<usize>),
}

pub(crate) fn parse(text: &str) -> PResult<Circuit> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        qregs: HashMap::new(),
        cregs: HashMap::new(),
        num_qubits: 0,
        num_clbits: 0,
        gates: HashMap::new(),
        opaque: Vec::new(),
        instructions: Vec::new(),
    };
    parser.program()?;
    if parser.num_qubits == 0 {
        return Err(ParseDiagnostic::error(1, 1, "program declares no qubits"));
    }
    Ok(Circuit {
        num_qubits: parser.num_qubits,
        num_clbits: parser.num_clbits,
        instructions: parser.instructions,
        opaque_decls: parser.opaque,
    })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    qregs: HashMap<String, Register>,
    cregs: HashMap<String, Register>,
    num_qubits: usize,
    num_clbits: usize,
    gates: HashMap<String, GateDef>,
    opaque: Vec<OpaqueDecl>,
    instructions: Vec<Instruction>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error_at(tok: &Token, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic::error(tok.line, tok.column, message)
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        let tok = self.next();
        if tok.kind == kind {
            Ok(tok)
        } else {
            Err(Self::error_at(
                &tok,
                format!("expected {}, found {}", kind.describe(), tok.kind.describe()),
            ))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if &self.peek().kind == kind {
            self.next();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<(String, Token)> {
        let tok = self.next();
        match &tok.kind {
            TokenKind::Ident(s) => Ok((s.clone(), tok)),
            other => Err(Self::error_at(
                &tok,
                format!("expected identifier, found {}", other.describe()),
            )),
        }
    }

    fn int(&mut self) -> PResult<usize> {
        let tok = self.next();
        match tok.kind {
            TokenKind::Int(v) => Ok(v as usize),
            ref other => Err(Self::error_at(
                &tok,
                format!("expected integer, found {}", other.describe()),
            )),
        }
    }

    fn program(&mut self) -> PResult<()> {
        if matches!(&self.peek().kind, TokenKind::Ident(s) if s == "OPENQASM") {
            let tok = self.next();
            let version = self.next();
            let major = match version.kind {
                TokenKind::Real(v) => v.trunc() as i64,
                TokenKind::Int(v) => v as i64,
                ref other => {
                    return Err(Self::error_at(
                        &version,
                        format!("expected version number, found {}", other.describe()),
                    ))
                }
            };
            if major != 2 {
                return Err(Self::error_at(
                    &tok,
                    format!("OpenQASM version {major} is not supported; only OpenQASM 2.0 is accepted"),
                ));
            }
            self.expect(TokenKind::Semicolon)?;
        }
        while self.peek().kind != TokenKind::Eof {
            self.statement()?;
        }
        Ok(())
    }

    fn statement(&mut self) -> PResult<()> {
        let tok = self.peek().clone();
        let TokenKind::Ident(word) = &tok.kind else {
            return Err(Self::error_at(&tok, format!("unexpected {}", tok.kind.describe())));
        };
        match word.as_str() {
            "OPENQASM" => Err(Self::error_at(&tok, "OPENQASM header must be the first statement")),
            "include" => {
                self.next();
                let file = self.next();
                match &file.kind {
                    TokenKind::Str(name) if name == "qelib1.inc" => {}
                    TokenKind::Str(name) => {
                        return Err(Self::error_at(
                            &file,
                            format!("cannot include '{name}'; only \"qelib1.inc\" is recognized"),
                        ))
                    }
                    other => {
                        return Err(Self::error_at(
                            &file,
                            format!("expected file name, found {}", other.describe()),
                        ))
                    }
                }
                self.expect(TokenKind::Semicolon)?;
                Ok(())
            }
            "qreg" | "creg" => self.register_decl(),
            "gate" => self.gate_decl(),
            "opaque" => self.opaque_decl(),
            "measure" => self.measure(),
            "reset" => self.reset(),
            "barrier" => self.barrier(),
            "if" => Err(Self::error_at(
                &tok,
                "unsupported classical conditional: 'if' statements cannot be combined with qubit reuse",
            )),
            w if QASM3_KEYWORDS.contains(&w) => {
                Err(Self::error_at(&tok, format!("unsupported OpenQASM 3 feature '{w}'")))
            }
            _ => self.gate_call(),
        }
    }

    fn register_decl(&mut self) -> PResult<()> {
        let (kw, _) = self.ident()?;
        let (name, name_tok) = self.ident()?;
        self.expect(TokenKind::LBracket)?;
        let size = self.int()?;
        self.expect(TokenKind::RBracket)?;
        self.expect(TokenKind::Semicolon)?;
        if size == 0 {
            return Err(Self::error_at(&name_tok, format!("register '{name}' has size 0")));
        }
        if self.qregs.contains_key(&name) || self.cregs.contains_key(&name) {
            return Err(Self::error_at(&name_tok, format!("register '{name}' already declared")));
        }
        if kw == "qreg" {
            self.qregs.insert(
                name,
                Register {
                    start: self.num_qubits,
                    size,
                },
            );
            self.num_qubits += size;
        } else {
            self.cregs.insert(
                name,
                Register {
                    start: self.num_clbits,
                    size,
                },
            );
            self.num_clbits += size;
        }
        Ok(())
    }

    fn name_list(&mut self, terminator: &TokenKind) -> PResult<Vec<(String, Token)>> {
        let mut names = vec![self.ident()?];
        while self.eat(&TokenKind::Comma) {
            names.push(self.ident()?);
        }
        if &self.peek().kind != terminator {
            let tok = self.peek().clone();
            return Err(Self::error_at(
                &tok,
                format!("expected {}, found {}", terminator.describe(), tok.kind.describe()),
            ));
        }
        Ok(names)
    }

    fn gate_signature(&mut self) -> PResult<(String, Token, Vec<String>, Vec<String>)> {
        self.next();
        let (name, name_tok) = self.ident()?;
        let mut params = Vec::new();
        if self.eat(&TokenKind::LParen) && !self.eat(&TokenKind::RParen) {
            params = self
                .name_list(&TokenKind::RParen)?
                .into_iter()
                .map(|(s, _)| s)
                .collect();
            self.expect(TokenKind::RParen)?;
        }
        let args = self.qubit_arg_names()?;
        if self.gates.contains_key(&name) || self.opaque.iter().any(|d| d.name == name) {
            return Err(Self::error_at(&name_tok, format!("gate '{name}' already defined")));
        }
        Ok((name, name_tok, params, args))
    }

    fn qubit_arg_names(&mut self) -> PResult<Vec<String>> {
        let mut args = vec![self.ident()?.0];
        while self.eat(&TokenKind::Comma) {
            args.push(self.ident()?.0);
        }
        Ok(args)
    }

    fn opaque_decl(&mut self) -> PResult<()> {
        let (name, _, params, args) = self.gate_signature()?;
        self.expect(TokenKind::Semicolon)?;
        self.opaque.push(OpaqueDecl {
            name,
            num_params: params.len(),
            num_qubits: args.len(),
        });
        Ok(())
    }

    fn gate_decl(&mut self) -> PResult<()> {
        let (name, name_tok, params, args) = self.gate_signature()?;
        for (i, a) in args.iter().enumerate() {
            if args[..i].contains(a) {
                return Err(Self::error_at(
                    &name_tok,
                    format!("duplicate qubit argument '{a}' in gate '{name}'"),
                ));
            }
        }
        self.expect(TokenKind::LBrace)?;
        let mut body = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            let (callee, tok) = self.ident()?;
            let is_barrier = callee == "barrier";
            if matches!(callee.as_str(), "measure" | "reset" | "if") || QASM3_KEYWORDS.contains(&callee.as_str()) {
                return Err(Self::error_at(
                    &tok,
                    format!("'{callee}' is not allowed inside a gate body"),
                ));
            }
            let mut exprs = Vec::new();
            if !is_barrier && self.eat(&TokenKind::LParen) && !self.eat(&TokenKind::RParen) {
                exprs.push(self.expr(&params)?);
                while self.eat(&TokenKind::Comma) {
                    exprs.push(self.expr(&params)?);
                }
                self.expect(TokenKind::RParen)?;
            }
            let mut operand_idx = Vec::new();
            loop {
                let (a, atok) = self.ident()?;
                let Some(i) = args.iter().position(|x| *x == a) else {
                    return Err(Self::error_at(
                        &atok,
                        format!("'{a}' is not an argument of gate '{name}'"),
                    ));
                };
                operand_idx.push(i);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(TokenKind::Semicolon)?;
            if !is_barrier {
                self.check_callee(&callee, exprs.len(), operand_idx.len(), &tok)?;
            }
            body.push(BodyOp {
                name: callee,
                params: exprs,
                args: operand_idx,
                barrier: is_barrier,
                line: tok.line,
                column: tok.column,
            });
        }
        self.gates.insert(
            name,
            GateDef {
                num_params: params.len(),
                num_qubits: args.len(),
                body,
            },
        );
        Ok(())
    }

    fn check_callee(&self, name: &str, num_params: usize, num_qubits: usize, tok: &Token) -> PResult<()> {
        let arity = if let Some(def) = self.gates.get(name) {
            Some((def.num_qubits, def.num_params))
        } else if let Some(decl) = self.opaque.iter().find(|d| d.name == name) {
            Some((decl.num_qubits, decl.num_params))
        } else {
            standard_gate(canonical_name(name))
        };
        match arity {
            None => Err(Self::error_at(
                tok,
                format!("unknown gate '{name}' (declare it with 'opaque' or 'gate')"),
            )),
            Some((nq, np)) if nq != num_qubits || np != num_params => Err(Self::error_at(
                tok,
                format!("gate '{name}' expects {np} parameters and {nq} qubits, got {num_params} and {num_qubits}"),
            )),
            Some(_) => Ok(()),
        }
    }

    fn expr(&mut self, params: &[String]) -> PResult<Expr> {
        let mut lhs = self.term(params)?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.term(params)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self, params: &[String]) -> PResult<Expr> {
        let mut lhs = self.unary(params)?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary(params)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self, params: &[String]) -> PResult<Expr> {
        if self.eat(&TokenKind::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary(params)?)));
        }
        if self.eat(&TokenKind::Plus) {
            return self.unary(params);
        }
        self.primary(params)
    }

    fn primary(&mut self, params: &[String]) -> PResult<Expr> {
        let tok = self.next();
        match &tok.kind {
            TokenKind::Int(v) => Ok(Expr::Num(*v as f64)),
            TokenKind::Real(v) => Ok(Expr::Num(*v)),
            TokenKind::Ident(s) if s == "pi" => Ok(Expr::Num(std::f64::consts::PI)),
            TokenKind::Ident(s) => match params.iter().position(|p| p == s) {
                Some(i) => Ok(Expr::Param(i)),
                None => Err(Self::error_at(
                    &tok,
                    format!("unsupported identifier '{s}' in expression"),
                )),
            },
            TokenKind::LParen => {
                let e = self.expr(params)?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            TokenKind::Caret => Err(Self::error_at(&tok, "operator '^' is not supported")),
            other => Err(Self::error_at(
                &tok,
                format!("expected expression, found {}", other.describe()),
            )),
        }
    }

    fn operand(&mut self, classical: bool) -> PResult<(Operand, Token)> {
        let (name, tok) = self.ident()?;
        let regs = if classical { &self.cregs } else { &self.qregs };
        let Some(reg) = regs.get(&name).cloned() else {
            let kind = if classical { "classical" } else { "quantum" };
            return Err(Self::error_at(&tok, format!("unknown {kind} register '{name}'")));
        };
        if self.eat(&TokenKind::LBracket) {
            let idx_tok = self.peek().clone();
            let idx = self.int()?;
            self.expect(TokenKind::RBracket)?;
            if idx >= reg.size {
                return Err(Self::error_at(
                    &idx_tok,
                    format!("index {idx} out of range for register '{name}' of size {}", reg.size),
                ));
            }
            Ok((Operand::Single(reg.start + idx), tok))
        } else {
            Ok((Operand::Whole((reg.start..reg.start + reg.size).collect()), tok))
        }
    }

    /// Expands register operands positionally; every register must have
    /// the same size.
    fn broadcast(operands: &[(Operand, Token)]) -> PResult<Vec<Vec<usize>>> {
        let mut width: Option<usize> = None;
        for (op, tok) in operands {
            if let Operand::Whole(v) = op {
                match width {
                    None => width = Some(v.len()),
                    Some(w) if w != v.len() => {
                        return Err(Self::error_at(tok, "register operands have mismatched sizes"))
                    }
                    _ => {}
                }
            }
        }
        let rows = width.unwrap_or(1);
        Ok((0..rows)
            .map(|r| {
                operands
                    .iter()
                    .map(|(op, _)| match op {
                        Operand::Single(i) => *i,
                        Operand::Whole(v) => v[r],
                    })
                    .collect()
            })
            .collect())
    }

    fn measure(&mut self) -> PResult<()> {
        self.next();
        let q = self.operand(false)?;
        self.expect(TokenKind::Arrow)?;
        let c = self.operand(true)?;
        self.expect(TokenKind::Semicolon)?;
        let (qs, cs) = match (&q.0, &c.0) {
            (Operand::Single(a), Operand::Single(b)) => (vec![*a], vec![*b]),
            (Operand::Whole(a), Operand::Whole(b)) if a.len() == b.len() => (a.clone(), b.clone()),
            _ => {
                return Err(Self::error_at(
                    &q.1,
                    "measure operands must both be bits or equal-size registers",
                ))
            }
        };
        for (q, c) in qs.into_iter().zip(cs) {
            self.instructions.push(Instruction::measure(q, c));
        }
        Ok(())
    }

    fn reset(&mut self) -> PResult<()> {
        self.next();
        let (op, _) = self.operand(false)?;
        self.expect(TokenKind::Semicolon)?;
        let qubits = match op {
            Operand::Single(i) => vec![i],
            Operand::Whole(v) => v,
        };
        for q in qubits {
            self.instructions.push(Instruction::reset(q));
        }
        Ok(())
    }

    fn barrier(&mut self) -> PResult<()> {
        self.next();
        let mut qubits = Vec::new();
        loop {
            let (op, _) = self.operand(false)?;
            match op {
                Operand::Single(i) => qubits.push(i),
                Operand::Whole(v) => qubits.extend(v),
            }
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::Semicolon)?;
        let mut unique = Vec::with_capacity(qubits.len());
        for q in qubits {
            if !unique.contains(&q) {
                unique.push(q);
            }
        }
        self.instructions.push(Instruction::barrier(&unique));
        Ok(())
    }

    fn gate_call(&mut self) -> PResult<()> {
        let (name, tok) = self.ident()?;
        let mut params = Vec::new();
        if self.eat(&TokenKind::LParen) && !self.eat(&TokenKind::RParen) {
            params.push(self.expr(&[])?.eval(&[]));
            while self.eat(&TokenKind::Comma) {
                params.push(self.expr(&[])?.eval(&[]));
            }
            self.expect(TokenKind::RParen)?;
        }
        let mut operands = vec![self.operand(false)?];
        while self.eat(&TokenKind::Comma) {
            operands.push(self.operand(false)?);
        }
        self.expect(TokenKind::Semicolon)?;
        self.check_callee(&name, params.len(), operands.len(), &tok)?;
        for qubits in Self::broadcast(&operands)? {
            for (i, q) in qubits.iter().enumerate() {
                if qubits[..i].contains(q) {
                    return Err(Self::error_at(
                        &tok,
                        format!("gate '{name}' applied to qubit {q} twice"),
                    ));
                }
            }
            self.apply(&name, &params, &qubits, 0)?;
        }
        Ok(())
    }

    fn apply(&mut self, name: &str, params: &[f64], qubits: &[usize], depth: usize) -> PResult<()> {
        if let Some(def) = self.gates.get(name).cloned() {
            if depth > 64 {
                return Err(ParseDiagnostic::error(1, 1, format!("gate '{name}' nests too deeply")));
            }
            for op in &def.body {
                let mapped: Vec<usize> = op.args.iter().map(|&a| qubits[a]).collect();
                if op.barrier {
                    self.instructions.push(Instruction::barrier(&mapped));
                    continue;
                }
                for (i, q) in mapped.iter().enumerate() {
                    if mapped[..i].contains(q) {
                        return Err(ParseDiagnostic::error(
                            op.line,
                            op.column,
                            format!("gate '{}' applied to qubit {q} twice", op.name),
                        ));
                    }
                }
                let values: Vec<f64> = op.params.iter().map(|e| e.eval(params)).collect();
                self.apply(&op.name, &values, &mapped, depth + 1)?;
            }
            return Ok(());
        }
        self.instructions
            .push(Instruction::gate(canonical_name(name), params.to_vec(), qubits));
        Ok(())
    }
}

fn canonical_name(name: &str) -> &str {
    match name {
        "U" => "u",
        "CX" => "cx",
        other => other,
    }
}
