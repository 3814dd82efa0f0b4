//! Conservative bit-size estimation: a sound upper bound on the bit length
//! of every subterm's value, computed without materializing big numbers.
//!
//! Per-node rules: `bits(a±b) <= max(bits a, bits b)+1`, `bits(a*b) <=
//! bits(a)+bits(b)`, `bits(a^e) <= e*bits(a)` with the exponent evaluated
//! exactly, `bits(floor(a/b)) <= bits(a)`, `bits(a % b) <= bits(b)`.

use crate::eval::{bitlen, evaluate, Bindings, EvalBudget, EvalError, Strategy};
use crate::term::Term;

/// Exponent subterms are evaluated exactly while estimating; their own
/// intermediates are held to this budget.
const EXPONENT_EVAL_BITS: u64 = 1 << 16;

/// Bound for one subterm, in pre-order position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeBound {
    /// Nesting depth of the node (root is 0).
    pub depth: usize,
    /// Operation name of the node.
    pub label: &'static str,
    /// Sound upper bound on the bit length of the node's value.
    pub bound_bits: u128,
}

/// Sound per-node size bounds for a term under fixed bindings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeEstimate {
    /// Maximum bound over all nodes: an upper bound on the evaluation peak.
    pub total_bound_bits: u128,
    /// One entry per node, pre-order (parent before children, left to right).
    pub nodes: Vec<NodeBound>,
}

impl SizeEstimate {
    /// Bound for the root node (the final result).
    pub fn root_bound_bits(&self) -> u128 {
        self.nodes[0].bound_bits
    }
}

/// Computes sound upper bounds on the value sizes of `t` and all subterms.
///
/// Fails on unbound variables, negative or oversized exponents, and
/// structurally forced division by a literal zero.
pub fn estimate_bits(t: &Term, env: &Bindings) -> Result<SizeEstimate, EvalError> {
    let mut nodes = Vec::new();
    estimate_node(t, env, 0, &mut nodes)?;
    let total_bound_bits = nodes.iter().map(|n| n.bound_bits).max().unwrap_or(1);
    Ok(SizeEstimate {
        total_bound_bits,
        nodes,
    })
}

fn estimate_node(
    t: &Term,
    env: &Bindings,
    depth: usize,
    out: &mut Vec<NodeBound>,
) -> Result<u128, EvalError> {
    let idx = out.len();
    out.push(NodeBound {
        depth,
        label: t.op_name(),
        bound_bits: 0,
    });
    let bound = match t {
        Term::Literal(v) => bitlen(v) as u128,
        Term::Variable(name) => {
            let v = env
                .get(name)
                .ok_or_else(|| EvalError::UnboundVariable(name.clone()))?;
            bitlen(v) as u128
        }
        Term::Add(l, r) | Term::Sub(l, r) => {
            let a = estimate_node(l, env, depth + 1, out)?;
            let b = estimate_node(r, env, depth + 1, out)?;
            a.max(b).saturating_add(1)
        }
        Term::Mul(l, r) => {
            let a = estimate_node(l, env, depth + 1, out)?;
            let b = estimate_node(r, env, depth + 1, out)?;
            a.saturating_add(b)
        }
        Term::FloorDiv(l, r) => {
            let a = estimate_node(l, env, depth + 1, out)?;
            estimate_node(r, env, depth + 1, out)?;
            reject_literal_zero(r)?;
            a
        }
        Term::Mod(l, r) => {
            estimate_node(l, env, depth + 1, out)?;
            let b = estimate_node(r, env, depth + 1, out)?;
            reject_literal_zero(r)?;
            b
        }
        Term::Pow(base, exp) => {
            let base_bound = estimate_node(base, env, depth + 1, out)?;
            estimate_node(exp, env, depth + 1, out)?;
            let e = exact_exponent(exp, env)?;
            (e as u128).saturating_mul(base_bound).max(1)
        }
    };
    out[idx].bound_bits = bound;
    Ok(bound)
}

fn reject_literal_zero(r: &Term) -> Result<(), EvalError> {
    if matches!(r, Term::Literal(v) if *v == 0) {
        Err(EvalError::DivisionByZero)
    } else {
        Ok(())
    }
}

fn exact_exponent(exp: &Term, env: &Bindings) -> Result<u64, EvalError> {
    let (v, _) = evaluate(
        exp,
        env,
        &EvalBudget::new(EXPONENT_EVAL_BITS),
        Strategy::Naive,
    )?;
    if v < 0 {
        return Err(EvalError::NegativeExponent);
    }
    v.to_u64()
        .filter(|&e| e < (1 << 63))
        .ok_or(EvalError::BudgetExceeded {
            needed_bits: u128::MAX,
            max_bits: EXPONENT_EVAL_BITS,
        })
}
