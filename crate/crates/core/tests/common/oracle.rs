//! Straightforward re-implementations, written without reference to the
//! library internals: a hard-coded recursive mapper for the builtin grammar,
//! a scalar expression evaluator that also reports distance to kinks and
//! singularities, and a dense forward pass.

use actevo::expr::{ActivationExpr, BinaryOp, BoundOp, UnaryOp};
use actevo::nn::{LayerActivation, Network};

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    Wraps,
    Depth,
}

struct Reader<'a> {
    codons: &'a [u8],
    pos: usize,
    wraps: usize,
    max_wraps: usize,
    consumed: usize,
}

impl Reader<'_> {
    fn read(&mut self, arity: usize) -> Result<usize, OracleError> {
        if self.pos == self.codons.len() {
            if self.wraps == self.max_wraps {
                return Err(OracleError::Wraps);
            }
            self.wraps += 1;
            self.pos = 0;
        }
        let c = self.codons[self.pos] as usize;
        self.pos += 1;
        self.consumed += 1;
        Ok(c % arity)
    }
}

enum Item {
    Operand(ActivationExpr),
    Op(BinaryOp),
}

const OPS: [BinaryOp; 4] = [BinaryOp::Add, BinaryOp::Div, BinaryOp::Mul, BinaryOp::Sub];
const VARS: [f64; 4] = [0.1, 1.0, 2.0, 3.0];

fn var(r: &mut Reader) -> Result<f64, OracleError> {
    Ok(VARS[r.read(4)?])
}

fn pre_op(r: &mut Reader, depth: usize, max_depth: usize) -> Result<ActivationExpr, OracleError> {
    if depth > max_depth {
        return Err(OracleError::Depth);
    }
    let x = || Box::new(ActivationExpr::Input);
    Ok(match r.read(8)? {
        0 => ActivationExpr::Unary(UnaryOp::Sin, x()),
        1 => ActivationExpr::Unary(UnaryOp::Cos, x()),
        2 => ActivationExpr::Unary(UnaryOp::Tan, x()),
        3 => ActivationExpr::Bounded(BoundOp::Min, x(), var(r)?),
        4 => ActivationExpr::Bounded(BoundOp::Max, x(), var(r)?),
        5 => ActivationExpr::Unary(UnaryOp::Exp, x()),
        6 => ActivationExpr::Unary(UnaryOp::Tanh, x()),
        _ => {
            let inner = pre_op(r, depth + 1, max_depth)?;
            ActivationExpr::Pow(Box::new(inner), var(r)?)
        }
    })
}

/// Flat operand/operator sequence of one `<acti_expr>`; a parenthesised
/// alternative becomes a single already-folded operand.
fn expr(r: &mut Reader, depth: usize, max_depth: usize) -> Result<Vec<Item>, OracleError> {
    if depth > max_depth {
        return Err(OracleError::Depth);
    }
    let choice = r.read(3)?;
    let head = pre_op(r, 1, max_depth)?;
    if choice == 0 {
        return Ok(vec![Item::Operand(head)]);
    }
    let op = OPS[r.read(4)?];
    let tail = expr(r, depth + 1, max_depth)?;
    let mut items = vec![Item::Operand(head), Item::Op(op)];
    items.extend(tail);
    if choice == 1 {
        Ok(items)
    } else {
        Ok(vec![Item::Operand(fold(items))])
    }
}

/// Two-level precedence fold: `*` and `/` first, then `+` and `-`, each
/// left to right.
fn fold(items: Vec<Item>) -> ActivationExpr {
    let mut terms: Vec<(BinaryOp, ActivationExpr)> = Vec::new();
    let mut pending_add = BinaryOp::Add;
    let mut current: Option<ActivationExpr> = None;
    let mut pending_mul: Option<BinaryOp> = None;
    for item in items {
        match item {
            Item::Operand(e) => {
                current = Some(match (current.take(), pending_mul.take()) {
                    (Some(left), Some(op)) => {
                        ActivationExpr::Binary(op, Box::new(left), Box::new(e))
                    }
                    (None, None) => e,
                    _ => unreachable!("operands and operators alternate"),
                });
            }
            Item::Op(op @ (BinaryOp::Mul | BinaryOp::Div)) => pending_mul = Some(op),
            Item::Op(op) => {
                terms.push((
                    pending_add,
                    current.take().expect("operand before operator"),
                ));
                pending_add = op;
            }
        }
    }
    terms.push((pending_add, current.expect("trailing operand")));
    let mut it = terms.into_iter();
    let (_, mut acc) = it.next().expect("at least one term");
    for (op, e) in it {
        acc = ActivationExpr::Binary(op, Box::new(acc), Box::new(e));
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleMapping {
    pub exprs: Vec<ActivationExpr>,
    pub consumed: usize,
    pub wraps: usize,
}

pub fn map_builtin(
    codons: &[u8],
    n_functions: usize,
    max_wraps: usize,
    max_depth: usize,
) -> Result<OracleMapping, OracleError> {
    let mut r = Reader {
        codons,
        pos: 0,
        wraps: 0,
        max_wraps,
        consumed: 0,
    };
    let mut exprs = Vec::new();
    for _ in 0..n_functions {
        // the start rule has a single production and only wraps <acti_expr>
        exprs.push(fold(expr(&mut r, 1, max_depth)?));
    }
    Ok(OracleMapping {
        exprs,
        consumed: r.consumed,
        wraps: r.wraps,
    })
}

/// Scalar value plus smoothness bookkeeping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Probe {
    /// Branch taken at every kink and the side of every singularity.
    pub signature: Vec<bool>,
    /// Smallest distance from a kink or singularity seen on the way.
    pub margin: f64,
}

fn walk(e: &ActivationExpr, x: f64, probe: &mut Probe) -> Option<f64> {
    use ActivationExpr as E;
    let v = match e {
        E::Input => x,
        E::Const(c) => *c,
        E::Unary(op, c) => {
            let u = walk(c, x, probe)?;
            match op {
                UnaryOp::Sin => u.sin(),
                UnaryOp::Cos => u.cos(),
                UnaryOp::Tan => {
                    let c = u.cos();
                    probe.signature.push(c > 0.0);
                    probe.margin = probe.margin.min(c.abs());
                    u.sin() / c
                }
                UnaryOp::Exp => u.exp(),
                UnaryOp::Tanh => u.tanh(),
            }
        }
        E::Bounded(op, c, bound) => {
            let u = walk(c, x, probe)?;
            probe.margin = probe.margin.min((u - bound).abs());
            let follow = match op {
                BoundOp::Min => u < *bound,
                BoundOp::Max => u > *bound,
            };
            probe.signature.push(follow);
            if follow {
                u
            } else {
                *bound
            }
        }
        E::Pow(c, p) => {
            let u = walk(c, x, probe)?;
            if p.fract() != 0.0 {
                probe.signature.push(u > 0.0);
                probe.margin = probe.margin.min(u.abs());
            }
            u.powf(*p)
        }
        E::Binary(op, l, r) => {
            let a = walk(l, x, probe)?;
            let b = walk(r, x, probe)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    probe.signature.push(b > 0.0);
                    probe.margin = probe.margin.min(b.abs());
                    if b.abs() < 1e-12 {
                        return None;
                    }
                    a / b
                }
            }
        }
    };
    v.is_finite().then_some(v)
}

fn uses_input(e: &ActivationExpr) -> bool {
    use ActivationExpr as E;
    match e {
        E::Input => true,
        E::Const(_) => false,
        E::Unary(_, c) | E::Bounded(_, c, _) | E::Pow(c, _) => uses_input(c),
        E::Binary(_, l, r) => uses_input(l) || uses_input(r),
    }
}

/// Value of `e` at `x`, `None` on a guard (division by ~0 or non-finite).
pub fn scalar(e: &ActivationExpr, x: f64, probe: &mut Probe) -> Option<f64> {
    let v = walk(e, x, probe)?;
    if uses_input(e) {
        Some(v)
    } else {
        let s = v * x;
        s.is_finite().then_some(s)
    }
}

/// Dense forward pass from the public weights; `None` if any activation
/// trips a guard.
pub fn forward(net: &Network, rows: &[Vec<f64>], probe: &mut Probe) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mut a = row.clone();
        for layer in net.layers() {
            let mut next = Vec::with_capacity(layer.bias.len());
            for j in 0..layer.bias.len() {
                let z: f64 = layer.bias[j]
                    + layer
                        .weights
                        .row(j)
                        .iter()
                        .zip(&a)
                        .map(|(w, x)| w * x)
                        .sum::<f64>();
                next.push(match &layer.activation {
                    LayerActivation::Logistic => 1.0 / (1.0 + (-z).exp()),
                    LayerActivation::Expr(e) => scalar(e, z, probe)?,
                });
            }
            a = next;
        }
        out.push(a[0]);
    }
    Some(out)
}

pub const CLAMP: f64 = 1e-7;

/// Mean clamped binary cross-entropy.
pub fn bce(p: &[f64], y: &[u8]) -> f64 {
    p.iter()
        .zip(y)
        .map(|(&p, &y)| {
            let p = p.clamp(CLAMP, 1.0 - CLAMP);
            if y == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / p.len() as f64
}
