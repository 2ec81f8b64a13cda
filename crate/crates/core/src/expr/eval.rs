use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

use super::{BinOp, Expr, Func, Node};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Source of parameter values at evaluation time.
pub trait ParamLookup {
    fn lookup(&self, name: &str) -> Option<f64>;
}

impl ParamLookup for BTreeMap<String, f64> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl ParamLookup for [(&str, f64)] {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

impl<const N: usize> ParamLookup for [(&str, f64); N] {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.as_slice().lookup(name)
    }
}

struct Evaluator<'a, T, P: ?Sized> {
    bindings: &'a [T],
    params: &'a P,
    template: &'a T,
    memo: BTreeMap<*const Node, T>,
}

impl<T: Scalar, P: ParamLookup + ?Sized> Evaluator<'_, T, P> {
    fn eval(&mut self, e: &Expr) -> Result<T> {
        let key = alloc::sync::Arc::as_ptr(&e.0);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let v = self.eval_node(e.node())?;
        // Leaves are cheap; only interior nodes are worth caching.
        if matches!(e.node(), Node::Binary(..) | Node::Call(..) | Node::Neg(_)) {
            self.memo.insert(key, v.clone());
        }
        Ok(v)
    }

    fn eval_node(&mut self, node: &Node) -> Result<T> {
        Ok(match node {
            Node::Const(v) => self.template.constant_like(*v),
            Node::Var(i) => self.bindings.get(*i).cloned().ok_or(Error::BindingCount {
                expected: i + 1,
                found: self.bindings.len(),
            })?,
            Node::Param(name) => self.template.constant_like(self.param(name)?),
            Node::Neg(a) => -self.eval(a)?,
            Node::Binary(op, a, b) => {
                if *op == BinOp::Pow {
                    return self.pow(a, b);
                }
                let x = self.eval(a)?;
                let y = self.eval(b)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x.div(&y)?,
                    BinOp::Pow => unreachable!(),
                }
            }
            Node::Call(func, a) => {
                let x = self.eval(a)?;
                match func {
                    Func::Sqrt => x.sqrt()?,
                    Func::Exp => x.exp(),
                    Func::Log => x.ln()?,
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan()?,
                    Func::Atan => x.atan(),
                }
            }
        })
    }

    fn param(&self, name: &str) -> Result<f64> {
        self.params
            .lookup(name)
            .ok_or_else(|| Error::UnboundParameter(name.to_string()))
    }

    fn pow(&mut self, base: &Expr, exponent: &Expr) -> Result<T> {
        let b = self.eval(base)?;
        if exponent.depends_on_coordinates() {
            let e = self.eval(exponent)?;
            return Ok((e * b.ln()?).exp());
        }
        let e = evaluate_real_constant(exponent, self.params)?;
        if libm::trunc(e) == e && e.abs() <= 64.0 {
            b.powi(e as i32)
        } else {
            b.powf(e)
        }
    }
}

fn evaluate_real_constant<P: ParamLookup + ?Sized>(e: &Expr, params: &P) -> Result<f64> {
    let zero = 0.0;
    let mut ev = Evaluator {
        bindings: &[],
        params,
        template: &zero,
        memo: BTreeMap::new(),
    };
    ev.eval(e)
}

impl Expr {
    /// Evaluates with coordinates bound to `bindings`, in their algebra.
    pub fn evaluate<T: Scalar, P: ParamLookup + ?Sized>(
        &self,
        bindings: &[T],
        params: &P,
    ) -> Result<T> {
        let span = self.coordinate_span();
        if span > bindings.len() {
            return Err(Error::BindingCount {
                expected: span,
                found: bindings.len(),
            });
        }
        match bindings.first() {
            Some(template) => {
                let mut ev = Evaluator {
                    bindings,
                    params,
                    template,
                    memo: BTreeMap::new(),
                };
                ev.eval(self)
            }
            None => Err(Error::BindingCount {
                expected: 1,
                found: 0,
            }),
        }
    }

    /// Evaluates several expressions at once, sharing common subtrees.
    pub fn evaluate_all<T: Scalar, P: ParamLookup + ?Sized>(
        exprs: &[Expr],
        bindings: &[T],
        params: &P,
    ) -> Result<alloc::vec::Vec<T>> {
        let Some(template) = bindings.first() else {
            return Err(Error::BindingCount {
                expected: 1,
                found: 0,
            });
        };
        let mut ev = Evaluator {
            bindings,
            params,
            template,
            memo: BTreeMap::new(),
        };
        exprs.iter().map(|e| ev.eval(e)).collect()
    }

    /// Evaluates at a real point.
    pub fn eval_real<P: ParamLookup + ?Sized>(&self, x: &[f64], params: &P) -> Result<f64> {
        self.evaluate(x, params)
    }
}
