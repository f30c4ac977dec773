use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("line {line}: duplicate register name `{name}`")]
    DuplicateRegister { line: usize, name: String },

    #[error("line {line}: `{gate}` expects {expected} operand(s), got {got}")]
    OperandCount {
        line: usize,
        gate: String,
        expected: usize,
        got: usize,
    },

    #[error("line {line}: reference to undeclared register `{name}`")]
    UndeclaredRegister { line: usize, name: String },

    #[error("gate {gate}: operand register {reg} appears more than once")]
    DuplicateOperand { gate: usize, reg: usize },

    #[error("gate {gate}: invalid operand register {reg}")]
    InvalidOperand { gate: usize, reg: usize },

    #[error("gate {gate}: condition refers to event {event}, which is not an earlier wire event")]
    InvalidCondition { gate: usize, event: usize },

    #[error("input register `{name}` declared after the first gate")]
    LateInput { name: String },

    #[error("output register `{name}` is never written")]
    UnwrittenOutput { name: String },

    #[error("{kind} input has {got} bit(s), circuit expects {expected}")]
    InputLength {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("random tape exhausted after {used} bit(s)")]
    TapeExhausted { used: usize },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("not a codeword: {0:07b}")]
    NotCodeword(u8),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}
