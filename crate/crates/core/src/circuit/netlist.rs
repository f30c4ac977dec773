//! Line-oriented netlist text format.
//!
//! ```text
//! # comment
//! in secret <name>        in public <name>
//! reg <name> [init 0|1]   out <name>
//! gate NOT|CNOT|TOF|Z|CZ|RAND|COPY <operands...>
//! cgate @<event> <GATE> <operands...>
//! ```
//!
//! `out` on an already declared register marks it as an output; otherwise it
//! declares a fresh output register initialised to 0.

use std::fmt::Write as _;

use super::{Circuit, CircuitBuilder, EventSource, GateKind, Role};
use crate::error::{Error, Result};

pub fn parse_netlist(text: &str) -> Result<Circuit> {
    let mut b = CircuitBuilder::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        let Some((&head, rest)) = toks.split_first() else {
            continue;
        };
        let syntax = |msg: String| Error::Syntax { line, msg };
        match head {
            "in" => {
                let [kind, name] = rest else {
                    return Err(syntax("expected `in secret|public <name>`".into()));
                };
                let role = match *kind {
                    "secret" => Role::SecretInput,
                    "public" => Role::PublicInput,
                    other => return Err(syntax(format!("unknown input kind `{other}`"))),
                };
                declare(&mut b, line, name, role, false)?;
            }
            "reg" => {
                let init = match rest {
                    [_] => false,
                    [_, "init", "0"] => false,
                    [_, "init", "1"] => true,
                    _ => return Err(syntax("expected `reg <name> [init 0|1]`".into())),
                };
                declare(&mut b, line, rest[0], Role::Internal, init)?;
            }
            "out" => {
                let [name] = rest else {
                    return Err(syntax("expected `out <name>`".into()));
                };
                match b.lookup(name) {
                    Some(id) => b.mark_output(id),
                    None => {
                        declare(&mut b, line, name, Role::Output, false)?;
                    }
                }
            }
            "gate" => {
                let kind = parse_gate(&b, line, rest)?;
                b.push(kind)?;
            }
            "cgate" => {
                let Some((cond, gate)) = rest.split_first() else {
                    return Err(syntax("expected `cgate @<event> <GATE> ...`".into()));
                };
                let event: usize = cond
                    .strip_prefix('@')
                    .unwrap_or(cond)
                    .parse()
                    .map_err(|_| syntax(format!("bad event reference `{cond}`")))?;
                let kind = parse_gate(&b, line, gate)?;
                b.push_conditioned(event, kind)?;
            }
            other => return Err(syntax(format!("unknown statement `{other}`"))),
        }
    }
    b.build()
}

fn declare(b: &mut CircuitBuilder, line: usize, name: &str, role: Role, init: bool) -> Result<()> {
    if name.starts_with('@') {
        return Err(Error::Syntax {
            line,
            msg: format!("register names may not start with `@`: `{name}`"),
        });
    }
    match b.add_register(name, role, init) {
        Err(Error::DuplicateRegister { name, .. }) => Err(Error::DuplicateRegister { line, name }),
        other => other.map(|_| ()),
    }
}

fn parse_gate(b: &CircuitBuilder, line: usize, toks: &[&str]) -> Result<GateKind> {
    let Some((&mnemonic, names)) = toks.split_first() else {
        return Err(Error::Syntax {
            line,
            msg: "missing gate mnemonic".into(),
        });
    };
    let arity = GateKind::arity(mnemonic).ok_or_else(|| Error::Syntax {
        line,
        msg: format!("unknown gate `{mnemonic}`"),
    })?;
    if names.len() != arity {
        return Err(Error::OperandCount {
            line,
            gate: mnemonic.to_string(),
            expected: arity,
            got: names.len(),
        });
    }
    let ops = names
        .iter()
        .map(|n| {
            b.lookup(n).ok_or_else(|| Error::UndeclaredRegister {
                line,
                name: n.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GateKind::from_parts(mnemonic, &ops).expect("arity checked"))
}

/// Canonical text: declarations in register-id order, then gates.
pub fn serialize_netlist(c: &Circuit) -> String {
    let mut out = String::new();
    for r in c.registers() {
        match r.role {
            Role::SecretInput => writeln!(out, "in secret {}", r.name),
            Role::PublicInput => writeln!(out, "in public {}", r.name),
            Role::Internal if r.init => writeln!(out, "reg {} init 1", r.name),
            Role::Internal => writeln!(out, "reg {}", r.name),
            Role::Output => writeln!(out, "out {}", r.name),
        }
        .unwrap();
        if r.output && r.role != Role::Output {
            writeln!(out, "out {}", r.name).unwrap();
        }
    }
    for g in c.gates() {
        match g.condition {
            Some(e) => write!(out, "cgate @{e} "),
            None => write!(out, "gate "),
        }
        .unwrap();
        out.push_str(g.kind.mnemonic());
        for r in g.kind.operands() {
            out.push(' ');
            out.push_str(&c.register(r).name);
        }
        out.push('\n');
    }
    out
}

/// One line per wire event: id, register, origin and a leak-free flag.
pub fn dump_events(c: &Circuit) -> String {
    let mut out = String::new();
    for (id, e) in c.events().iter().enumerate() {
        let reg = &c.register(e.reg).name;
        match e.source {
            EventSource::Input => writeln!(out, "{id}\t{reg}\tinput"),
            EventSource::Gate { gate, port } => {
                let g = &c.gates()[gate];
                let lf = if c.is_leak_free(id) { "\tleak-free" } else { "" };
                writeln!(out, "{id}\t{reg}\tgate {gate} {} port {port}{lf}", g.kind.mnemonic())
            }
        }
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
# twenty-line fixture
in secret y0
in secret y1
in public x
reg t0
reg t1 init 1
out o0
out o1
gate CNOT y0 o0       # copy-like
gate TOF y0 y1 t0
gate NOT t1
gate Z x
gate CZ x t1
gate RAND t0
gate COPY t0 o1
cgate @4 NOT o1
gate CNOT x o1
gate TOF t0 t1 o0
out x
gate CNOT o1 o0
";

    #[test]
    fn minimal_program() {
        let c = parse_netlist("in secret y0\nout o0\ngate CNOT y0 o0").unwrap();
        assert_eq!(c.registers().len(), 2);
        assert_eq!(c.gates().len(), 1);
        assert_eq!(c.event_count(), 3);
    }

    #[test]
    fn duplicate_operand_is_rejected() {
        let e = parse_netlist("in secret y0\nout o0\ngate CNOT y0 y0").unwrap_err();
        assert!(matches!(e, Error::DuplicateOperand { gate: 0, reg: 0 }));
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(
            parse_netlist("reg a\nreg a").unwrap_err(),
            Error::DuplicateRegister { line: 2, .. }
        ));
        assert!(matches!(
            parse_netlist("reg a\n\ngate CNOT a").unwrap_err(),
            Error::OperandCount {
                line: 3,
                expected: 2,
                got: 1,
                ..
            }
        ));
        assert!(matches!(
            parse_netlist("reg a\ngate NOT b").unwrap_err(),
            Error::UndeclaredRegister { line: 2, .. }
        ));
        assert!(matches!(
            parse_netlist("reg a\nfrobnicate a").unwrap_err(),
            Error::Syntax { line: 2, .. }
        ));
        assert!(matches!(
            parse_netlist("reg a init 2").unwrap_err(),
            Error::Syntax { line: 1, .. }
        ));
    }

    #[test]
    fn fixture_round_trips() {
        let c = parse_netlist(FIXTURE).unwrap();
        assert_eq!(FIXTURE.lines().count(), 20);
        let text = serialize_netlist(&c);
        let expected = "\
in secret y0
in secret y1
in public x
out x
reg t0
reg t1 init 1
out o0
out o1
gate CNOT y0 o0
gate TOF y0 y1 t0
gate NOT t1
gate Z x
gate CZ x t1
gate RAND t0
gate COPY t0 o1
cgate @4 NOT o1
gate CNOT x o1
gate TOF t0 t1 o0
gate CNOT o1 o0
";
        assert_eq!(text, expected);
        let again = parse_netlist(&text).unwrap();
        assert_eq!(again, c);
        assert_eq!(serialize_netlist(&again), text);
    }

    #[test]
    fn event_listing_marks_rand() {
        let c = parse_netlist("reg a\nout o\ngate RAND a\ngate CNOT a o").unwrap();
        let dump = dump_events(&c);
        assert_eq!(
            dump,
            "0\ta\tgate 0 RAND port 0\tleak-free\n1\ta\tgate 1 CNOT port 0\n2\to\tgate 1 CNOT port 1\n"
        );
    }
}
