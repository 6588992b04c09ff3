//! Jet-evaluable coefficient expressions.
//!
//! A [`CoefFn`] is an immutable expression DAG in the spatial variable `x`.
//! Nodes are shared through `Arc`, and every node carries a process-unique
//! id so an evaluation pass can visit each shared node once.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::jets::{Elementary, Jet, JetError};

static NEXT_ID: AtomicU64 = AtomicU64::new(0);

#[derive(Debug)]
struct Node {
    id: u64,
    kind: Kind,
}

#[derive(Debug)]
enum Kind {
    Const(f64),
    /// The identity function `x`.
    Var,
    Sum(Vec<(f64, CoefFn)>),
    Mul(CoefFn, CoefFn),
    /// Deferred `∂^k/∂x^k`, resolved by differentiating the child's jet.
    Deriv(usize, CoefFn),
    Elem(Elementary, CoefFn),
}

/// A coefficient function of `x`.
#[derive(Clone)]
pub struct CoefFn(Arc<Node>);

impl fmt::Debug for CoefFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Const(c) => write!(f, "{c}"),
            Kind::Var => write!(f, "x"),
            Kind::Sum(terms) => {
                write!(f, "(")?;
                for (i, (c, t)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{c}*{t:?}")?;
                }
                write!(f, ")")
            }
            Kind::Mul(a, b) => write!(f, "{a:?}*{b:?}"),
            Kind::Deriv(k, a) => write!(f, "d{k}({a:?})"),
            Kind::Elem(e, a) => write!(f, "{e:?}({a:?})"),
        }
    }
}

impl CoefFn {
    fn node(kind: Kind) -> Self {
        CoefFn(Arc::new(Node { id: NEXT_ID.fetch_add(1, Ordering::Relaxed), kind }))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Kind::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// The identity `x ↦ x`.
    pub fn x() -> Self {
        Self::node(Kind::Var)
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.0.kind {
            Kind::Const(c) => Some(c),
            _ => None,
        }
    }

    /// True when the node is structurally the zero constant.
    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    /// `Σ cᵢ·fᵢ` with zero terms removed and constants folded.
    pub fn linear_combination(terms: Vec<(f64, CoefFn)>) -> Self {
        let mut constant = 0.0;
        let mut kept = Vec::with_capacity(terms.len());
        for (c, f) in terms {
            if c == 0.0 {
                continue;
            }
            match f.as_constant() {
                Some(v) => constant += c * v,
                None => kept.push((c, f)),
            }
        }
        if kept.is_empty() {
            return Self::constant(constant);
        }
        if constant != 0.0 {
            kept.push((constant, Self::one()));
        }
        if kept.len() == 1 && kept[0].0 == 1.0 {
            return kept.pop().map(|(_, f)| f).unwrap_or_else(Self::zero);
        }
        Self::node(Kind::Sum(kept))
    }

    pub fn add(&self, other: &CoefFn) -> Self {
        Self::linear_combination(vec![(1.0, self.clone()), (1.0, other.clone())])
    }

    pub fn sub(&self, other: &CoefFn) -> Self {
        Self::linear_combination(vec![(1.0, self.clone()), (-1.0, other.clone())])
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 1.0 {
            return self.clone();
        }
        Self::linear_combination(vec![(c, self.clone())])
    }

    pub fn mul(&self, other: &CoefFn) -> Self {
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            (Some(a), None) => other.scale(a),
            (None, Some(b)) => self.scale(b),
            (None, None) => Self::node(Kind::Mul(self.clone(), other.clone())),
        }
    }

    /// Deferred `k`-th derivative in `x`.
    pub fn dx(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        match &self.0.kind {
            Kind::Const(_) => Self::zero(),
            Kind::Var if k == 1 => Self::one(),
            Kind::Var => Self::zero(),
            Kind::Deriv(j, inner) => Self::node(Kind::Deriv(j + k, inner.clone())),
            _ => Self::node(Kind::Deriv(k, self.clone())),
        }
    }

    pub fn elementary(&self, kind: Elementary) -> Self {
        Self::node(Kind::Elem(kind, self.clone()))
    }

    pub fn sech(&self) -> Self {
        self.elementary(Elementary::Sech)
    }

    pub fn tanh(&self) -> Self {
        self.elementary(Elementary::Tanh)
    }

    pub fn cosh(&self) -> Self {
        self.elementary(Elementary::Cosh)
    }

    pub fn csch(&self) -> Self {
        self.elementary(Elementary::Csch)
    }

    fn children(&self) -> Vec<&CoefFn> {
        match &self.0.kind {
            Kind::Const(_) | Kind::Var => Vec::new(),
            Kind::Sum(terms) => terms.iter().map(|(_, f)| f).collect(),
            Kind::Mul(a, b) => vec![a, b],
            Kind::Deriv(_, a) | Kind::Elem(_, a) => vec![a],
        }
    }

    /// Highest total number of `x`-derivatives along any path to a leaf.
    pub fn derivative_depth(&self) -> usize {
        let order = topological_order(&[self]);
        let mut depth: HashMap<u64, usize> = HashMap::with_capacity(order.len());
        for node in &order {
            let d = match &node.0.kind {
                Kind::Deriv(k, a) => k + depth[&a.id()],
                _ => node.children().iter().map(|c| depth[&c.id()]).max().unwrap_or(0),
            };
            depth.insert(node.id(), d);
        }
        depth[&self.id()]
    }

    /// Number of distinct nodes reachable from this expression.
    pub fn node_count(&self) -> usize {
        topological_order(&[self]).len()
    }

    /// Jet of this function at `x0` of the given order.
    pub fn jet(&self, x0: f64, order: usize) -> Result<Jet, JetError> {
        let mut out = JetEvaluator::new(x0).evaluate(&[(self, order)])?;
        Ok(out.remove(0))
    }

    pub fn value(&self, x0: f64) -> Result<f64, JetError> {
        self.jet(x0, 0).map(|j| j.value())
    }
}

/// Post-order (children first) listing of every node reachable from `roots`.
fn topological_order(roots: &[&CoefFn]) -> Vec<CoefFn> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut stack: Vec<(CoefFn, bool)> = roots.iter().rev().map(|r| ((*r).clone(), false)).collect();
    while let Some((node, expanded)) = stack.pop() {
        if expanded {
            out.push(node);
            continue;
        }
        if !seen.insert(node.id()) {
            continue;
        }
        let children: Vec<CoefFn> = node.children().into_iter().cloned().collect();
        stack.push((node, true));
        for c in children.into_iter().rev() {
            if !seen.contains(&c.id()) {
                stack.push((c, false));
            }
        }
    }
    out
}

/// Evaluates a set of expressions at one point, visiting each shared node
/// once at the highest jet order any of its parents needs.
///
/// Required orders are planned before any arithmetic runs: a `∂^k` node asks
/// its child for `k` more orders than it must deliver itself.
#[derive(Debug, Clone)]
pub struct JetEvaluator {
    x0: f64,
    max_source_order: Option<usize>,
}

impl JetEvaluator {
    pub fn new(x0: f64) -> Self {
        Self { x0, max_source_order: None }
    }

    /// Reject plans that would lift `x` to a jet order above `budget`.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.max_source_order = Some(budget);
        self
    }

    pub fn evaluate(&self, roots: &[(&CoefFn, usize)]) -> Result<Vec<Jet>, JetError> {
        let root_refs: Vec<&CoefFn> = roots.iter().map(|(r, _)| *r).collect();
        let order = topological_order(&root_refs);

        let mut required: HashMap<u64, usize> = HashMap::with_capacity(order.len());
        for (r, d) in roots {
            let e = required.entry(r.id()).or_insert(0);
            *e = (*e).max(*d);
        }
        for node in order.iter().rev() {
            let d = required[&node.id()];
            let extra = match node.0.kind {
                Kind::Deriv(k, _) => k,
                _ => 0,
            };
            for c in node.children() {
                let e = required.entry(c.id()).or_insert(0);
                *e = (*e).max(d + extra);
            }
        }

        let mut jets: HashMap<u64, Jet> = HashMap::with_capacity(order.len());
        for node in &order {
            let d = required[&node.id()];
            let child = |c: &CoefFn, need: usize| -> Jet {
                let j = &jets[&c.id()];
                if j.order() == need {
                    j.clone()
                } else {
                    j.truncate(need)
                }
            };
            let jet = match &node.0.kind {
                Kind::Const(c) => Jet::constant(self.x0, d, *c),
                Kind::Var => {
                    if let Some(budget) = self.max_source_order {
                        if d > budget {
                            return Err(JetError::InsufficientOrder { requested: d, available: budget });
                        }
                    }
                    Jet::lift(self.x0, d)
                }
                Kind::Sum(terms) => {
                    let mut acc = Jet::zero(self.x0, d);
                    for (c, f) in terms {
                        acc.add_scaled(*c, &child(f, d))?;
                    }
                    acc
                }
                Kind::Mul(a, b) => child(a, d).mul(&child(b, d))?,
                Kind::Deriv(k, a) => child(a, d + k).derivative(*k)?,
                Kind::Elem(e, a) => child(a, d).elementary(*e)?,
            };
            jets.insert(node.id(), jet);
        }
        Ok(roots.iter().map(|(r, d)| child_of(&jets, r, *d)).collect())
    }
}

fn child_of(jets: &HashMap<u64, Jet>, r: &CoefFn, d: usize) -> Jet {
    let j = &jets[&r.id()];
    if j.order() == d {
        j.clone()
    } else {
        j.truncate(d)
    }
}
