use super::{ActivationExpr, BinaryOp, BoundOp, UnaryOp};

/// Denominators smaller than this in magnitude count as division by zero.
pub const ZERO_DIVISION_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalStatus {
    Ok,
    ZeroDivision,
    NonFinite,
}

/// Element-wise result. Whenever `status` is not `Ok`, `values` is all zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    pub values: Vec<f64>,
    pub status: EvalStatus,
}

impl EvalOutcome {
    pub fn is_ok(&self) -> bool {
        self.status == EvalStatus::Ok
    }

    fn guarded(len: usize, status: EvalStatus) -> Self {
        EvalOutcome {
            values: vec![0.0; len],
            status,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fault {
    ZeroDivision,
    NonFinite,
}

fn check(v: f64) -> Result<f64, Fault> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Fault::NonFinite)
    }
}

fn value_at(expr: &ActivationExpr, x: f64) -> Result<f64, Fault> {
    use ActivationExpr as E;
    let v = match expr {
        E::Input => x,
        E::Const(c) => *c,
        E::Unary(op, c) => {
            let u = value_at(c, x)?;
            match op {
                UnaryOp::Sin => u.sin(),
                UnaryOp::Cos => u.cos(),
                UnaryOp::Tan => u.tan(),
                UnaryOp::Exp => u.exp(),
                UnaryOp::Tanh => u.tanh(),
            }
        }
        E::Bounded(op, c, bound) => {
            let u = value_at(c, x)?;
            match op {
                BoundOp::Min => u.min(*bound),
                BoundOp::Max => u.max(*bound),
            }
        }
        E::Pow(c, e) => value_at(c, x)?.powf(*e),
        E::Binary(op, l, r) => {
            let a = value_at(l, x)?;
            let b = value_at(r, x)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    if b.abs() < ZERO_DIVISION_EPS {
                        return Err(Fault::ZeroDivision);
                    }
                    a / b
                }
            }
        }
    };
    check(v)
}

/// Value and first derivative with respect to the input.
fn dual_at(expr: &ActivationExpr, x: f64) -> Result<(f64, f64), Fault> {
    use ActivationExpr as E;
    let (v, d) = match expr {
        E::Input => (x, 1.0),
        E::Const(c) => (*c, 0.0),
        E::Unary(op, c) => {
            let (u, du) = dual_at(c, x)?;
            match op {
                UnaryOp::Sin => (u.sin(), u.cos() * du),
                UnaryOp::Cos => (u.cos(), -u.sin() * du),
                UnaryOp::Tan => {
                    let c = u.cos();
                    (u.tan(), du / (c * c))
                }
                UnaryOp::Exp => {
                    let e = u.exp();
                    (e, e * du)
                }
                UnaryOp::Tanh => {
                    let t = u.tanh();
                    (t, (1.0 - t * t) * du)
                }
            }
        }
        E::Bounded(op, c, bound) => {
            let (u, du) = dual_at(c, x)?;
            let follows_child = match op {
                BoundOp::Min => u <= *bound,
                BoundOp::Max => u >= *bound,
            };
            if follows_child {
                (u, du)
            } else {
                (*bound, 0.0)
            }
        }
        E::Pow(c, e) => {
            let (u, du) = dual_at(c, x)?;
            (u.powf(*e), e * u.powf(e - 1.0) * du)
        }
        E::Binary(op, l, r) => {
            let (a, da) = dual_at(l, x)?;
            let (b, db) = dual_at(r, x)?;
            match op {
                BinaryOp::Add => (a + b, da + db),
                BinaryOp::Sub => (a - b, da - db),
                BinaryOp::Mul => (a * b, da * b + a * db),
                BinaryOp::Div => {
                    if b.abs() < ZERO_DIVISION_EPS {
                        return Err(Fault::ZeroDivision);
                    }
                    (a / b, (da * b - a * db) / (b * b))
                }
            }
        }
    };
    Ok((check(v)?, check(d)?))
}

fn collect<F>(x: &[f64], mut f: F) -> EvalOutcome
where
    F: FnMut(f64) -> Result<f64, Fault>,
{
    let mut values = Vec::with_capacity(x.len());
    let mut fault = None;
    for &xi in x {
        match f(xi) {
            Ok(v) => values.push(v),
            Err(Fault::ZeroDivision) => {
                fault = Some(Fault::ZeroDivision);
                break;
            }
            Err(Fault::NonFinite) => {
                fault.get_or_insert(Fault::NonFinite);
                values.push(0.0);
            }
        }
    }
    match fault {
        None => EvalOutcome {
            values,
            status: EvalStatus::Ok,
        },
        Some(Fault::ZeroDivision) => EvalOutcome::guarded(x.len(), EvalStatus::ZeroDivision),
        Some(Fault::NonFinite) => EvalOutcome::guarded(x.len(), EvalStatus::NonFinite),
    }
}

/// Evaluates `expr` at every element of `x`.
///
/// A near-zero denominator anywhere yields `ZeroDivision`; any NaN or
/// infinity in an intermediate value yields `NonFinite` (zero division takes
/// precedence). Either way the whole output is zeroed. An expression that
/// never reads its input is multiplied element-wise by `x`.
pub fn evaluate(expr: &ActivationExpr, x: &[f64]) -> EvalOutcome {
    if expr.contains_input() {
        collect(x, |xi| value_at(expr, xi))
    } else {
        collect(x, |xi| value_at(expr, xi).and_then(|v| check(v * xi)))
    }
}

/// Element-wise derivative of `expr` under the same guards as [`evaluate`].
///
/// `min(u, c)` follows `u` where `u <= c` and `max(u, c)` where `u >= c`.
pub fn derivative(expr: &ActivationExpr, x: &[f64]) -> EvalOutcome {
    if expr.contains_input() {
        collect(x, |xi| dual_at(expr, xi).map(|(_, d)| d))
    } else {
        // d/dx [f * x] = f' * x + f
        collect(x, |xi| {
            dual_at(expr, xi).and_then(|(v, d)| check(d * xi + v))
        })
    }
}

/// `n` evenly spaced samples over `[lo, hi]`, both endpoints included.
/// Each point is evaluated on its own, so a guard at one abscissa zeroes
/// only that point.
pub fn sample_curve(expr: &ActivationExpr, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    assert!(lo < hi, "sample_curve needs lo < hi");
    assert!(n >= 2, "sample_curve needs at least two points");
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let x = if i == n - 1 { hi } else { lo + step * i as f64 };
            let y = evaluate(expr, &[x]).values[0];
            (x, y)
        })
        .collect()
}
