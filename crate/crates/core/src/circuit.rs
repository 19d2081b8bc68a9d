//! Straight-line programs: the evaluation-only encoding of polynomial lists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::MultiPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Node {
    #[serde(rename = "in")]
    Input { i: usize },
    Const { v: u64 },
    Add { a: usize, b: usize },
    Sub { a: usize, b: usize },
    Mul { a: usize, b: usize },
}

impl Node {
    fn operands(&self) -> Option<(usize, usize)> {
        match *self {
            Node::Add { a, b } | Node::Sub { a, b } | Node::Mul { a, b } => Some((a, b)),
            _ => None,
        }
    }
}

/// Arithmetic circuit over `F_p` with `n` inputs and `m` outputs. Nodes may
/// only reference earlier nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    field: PrimeField,
    n: usize,
    nodes: Vec<Node>,
    outputs: Vec<usize>,
}

impl Circuit {
    pub fn new(field: PrimeField, n: usize, nodes: Vec<Node>, outputs: Vec<usize>) -> Result<Self> {
        for (k, node) in nodes.iter().enumerate() {
            match *node {
                Node::Input { i } if i >= n => {
                    return Err(Error::InvalidInput(format!(
                        "node {k} reads input {i} but the circuit has {n} inputs"
                    )))
                }
                Node::Const { v } if v >= field.modulus() => {
                    return Err(Error::InvalidInput(format!(
                        "node {k} constant {v} is not reduced mod {}",
                        field.modulus()
                    )))
                }
                _ => {}
            }
            if let Some((a, b)) = node.operands() {
                if a >= k || b >= k {
                    return Err(Error::InvalidInput(format!(
                        "node {k} references a later node"
                    )));
                }
            }
        }
        if outputs.is_empty() {
            return Err(Error::InvalidInput("circuit has no outputs".into()));
        }
        if let Some(&o) = outputs.iter().find(|&&o| o >= nodes.len()) {
            return Err(Error::InvalidInput(format!("output index {o} out of range")));
        }
        Ok(Self {
            field,
            n,
            nodes,
            outputs,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn num_inputs(&self) -> usize {
        self.n
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Number of arithmetic (add/sub/mul) nodes.
    pub fn op_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.operands().is_some()).count()
    }

    pub fn evaluate(&self, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let f = self.field;
        let mut vals = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Input { i } => f.reduce(x[i]),
                Node::Const { v } => v,
                Node::Add { a, b } => f.add(vals[a], vals[b]),
                Node::Sub { a, b } => f.sub(vals[a], vals[b]),
                Node::Mul { a, b } => f.mul(vals[a], vals[b]),
            };
            vals.push(v);
        }
        Ok(self.outputs.iter().map(|&o| vals[o]).collect())
    }

    /// Compiles a polynomial list term by term: each monomial becomes a chain
    /// of multiplications, each output a sum of scaled monomials.
    pub fn from_polys(polys: &[MultiPoly]) -> Result<Self> {
        let first = polys
            .first()
            .ok_or_else(|| Error::InvalidInput("empty polynomial list".into()))?;
        let (field, n) = (first.field(), first.nvars());
        let mut b = Builder {
            nodes: (0..n).map(|i| Node::Input { i }).collect(),
        };
        let mut outputs = Vec::with_capacity(polys.len());
        for g in polys {
            if g.field() != field {
                return Err(Error::FieldMismatch(field.modulus(), g.field().modulus()));
            }
            if g.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.nvars(),
                });
            }
            let mut acc: Option<usize> = None;
            for (m, c) in g.terms() {
                let mut term = b.push(Node::Const { v: c });
                for (i, &e) in m.exps().iter().enumerate() {
                    for _ in 0..e {
                        term = b.push(Node::Mul { a: term, b: i });
                    }
                }
                acc = Some(match acc {
                    None => term,
                    Some(s) => b.push(Node::Add { a: s, b: term }),
                });
            }
            let out = match acc {
                Some(s) => s,
                None => b.push(Node::Const { v: 0 }),
            };
            outputs.push(out);
        }
        Circuit::new(field, n, b.nodes, outputs)
    }
}

struct Builder {
    nodes: Vec<Node>,
}

impl Builder {
    fn push(&mut self, node: Node) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    p: u64,
    n: usize,
    nodes: Vec<Node>,
    outputs: Vec<usize>,
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CircuitJson {
            p: self.field.modulus(),
            n: self.n,
            nodes: self.nodes.clone(),
            outputs: self.outputs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CircuitJson::deserialize(d)?;
        let field = PrimeField::new(raw.p).map_err(D::Error::custom)?;
        Circuit::new(field, raw.n, raw.nodes, raw.outputs).map_err(D::Error::custom)
    }
}

/// Anything that can be evaluated to an `m`-tuple at a point: an explicit
/// polynomial list or a circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Evaluable {
    Circuit(Circuit),
    Polys(Vec<MultiPoly>),
}

impl Evaluable {
    pub fn field(&self) -> PrimeField {
        match self {
            Evaluable::Circuit(c) => c.field(),
            Evaluable::Polys(ps) => ps[0].field(),
        }
    }

    pub fn num_inputs(&self) -> usize {
        match self {
            Evaluable::Circuit(c) => c.num_inputs(),
            Evaluable::Polys(ps) => ps[0].nvars(),
        }
    }

    pub fn num_outputs(&self) -> usize {
        match self {
            Evaluable::Circuit(c) => c.num_outputs(),
            Evaluable::Polys(ps) => ps.len(),
        }
    }

    /// Arithmetic cost of one evaluation (`T`): circuit op count, or the
    /// op count of the term-by-term compilation of the polynomial list.
    pub fn op_count(&self) -> usize {
        match self {
            Evaluable::Circuit(c) => c.op_count(),
            Evaluable::Polys(ps) => Circuit::from_polys(ps).map(|c| c.op_count()).unwrap_or(0),
        }
    }

    pub fn evaluate(&self, x: &[u64]) -> Result<Vec<u64>> {
        match self {
            Evaluable::Circuit(c) => c.evaluate(x),
            Evaluable::Polys(ps) => ps.iter().map(|g| g.evaluate(x)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Evaluable::Polys(ps) = self {
            let first = ps
                .first()
                .ok_or_else(|| Error::InvalidInput("empty polynomial list".into()))?;
            for g in ps {
                if g.field() != first.field() {
                    return Err(Error::FieldMismatch(first.field().modulus(), g.field().modulus()));
                }
                if g.nvars() != first.nvars() {
                    return Err(Error::DimensionMismatch {
                        expected: first.nvars(),
                        got: g.nvars(),
                    });
                }
            }
        }
        Ok(())
    }
}

impl From<MultiPoly> for Evaluable {
    fn from(g: MultiPoly) -> Self {
        Evaluable::Polys(vec![g])
    }
}

impl From<Vec<MultiPoly>> for Evaluable {
    fn from(gs: Vec<MultiPoly>) -> Self {
        Evaluable::Polys(gs)
    }
}

impl From<Circuit> for Evaluable {
    fn from(c: Circuit) -> Self {
        Evaluable::Circuit(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rng;
    use crate::testutil::random_dense;

    #[test]
    fn identity_circuit() {
        let f = PrimeField::new(7).unwrap();
        let c = Circuit::new(f, 1, vec![Node::Input { i: 0 }], vec![0]).unwrap();
        assert_eq!(c.evaluate(&[5]).unwrap(), vec![5]);
        assert_eq!(c.op_count(), 0);
    }

    #[test]
    fn product_and_sum() {
        let js = r#"{"p":7,"n":2,"nodes":[{"op":"in","i":0},{"op":"in","i":1},
            {"op":"mul","a":0,"b":1},{"op":"add","a":0,"b":1}],"outputs":[2,3]}"#;
        let c: Circuit = serde_json::from_str(js).unwrap();
        assert_eq!(c.evaluate(&[2, 3]).unwrap(), vec![6, 5]);
        assert_eq!(c.op_count(), 2);
        assert!(matches!(c.evaluate(&[2]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rejects_forward_references_and_bad_outputs() {
        let f = PrimeField::new(7).unwrap();
        assert!(Circuit::new(f, 1, vec![Node::Add { a: 0, b: 1 }, Node::Input { i: 0 }], vec![0]).is_err());
        assert!(Circuit::new(f, 1, vec![Node::Input { i: 0 }], vec![1]).is_err());
        assert!(Circuit::new(f, 1, vec![Node::Input { i: 3 }], vec![0]).is_err());
        assert!(Circuit::new(f, 1, vec![Node::Const { v: 9 }], vec![0]).is_err());
    }

    #[test]
    fn json_matches_documented_form() {
        let js = r#"{"p":101,"n":2,"nodes":[{"op":"in","i":0},{"op":"in","i":1},{"op":"mul","a":0,"b":1}],"outputs":[2]}"#;
        let c: Circuit = serde_json::from_str(js).unwrap();
        assert_eq!(serde_json::to_string(&c).unwrap(), js);
    }

    #[test]
    fn compiled_dense_polys_agree_with_direct_evaluation() {
        let f = PrimeField::new(1009).unwrap();
        let mut rng = Rng::new(17);
        for _ in 0..100 {
            let n = 1 + rng.below(3) as usize;
            let d = rng.below(4) as u32;
            let polys = vec![random_dense(f, n, d, &mut rng), random_dense(f, n, d, &mut rng)];
            let c = Circuit::from_polys(&polys).unwrap();
            for _ in 0..50 {
                let x: Vec<u64> = (0..n).map(|_| rng.element(f)).collect();
                let direct: Vec<u64> = polys.iter().map(|g| g.evaluate(&x).unwrap()).collect();
                assert_eq!(c.evaluate(&x).unwrap(), direct);
            }
        }
    }

    #[test]
    fn zero_polynomial_compiles_to_constant() {
        let f = PrimeField::new(7).unwrap();
        let c = Circuit::from_polys(&[MultiPoly::zero(f, 2)]).unwrap();
        assert_eq!(c.evaluate(&[3, 4]).unwrap(), vec![0]);
    }

    #[test]
    fn evaluable_untagged_json() {
        let circ = r#"{"p":7,"n":1,"nodes":[{"op":"in","i":0}],"outputs":[0]}"#;
        let e: Evaluable = serde_json::from_str(circ).unwrap();
        assert!(matches!(e, Evaluable::Circuit(_)));
        let polys = r#"[{"p":7,"n":1,"terms":[{"c":2,"e":[1]}]}]"#;
        let e: Evaluable = serde_json::from_str(polys).unwrap();
        assert_eq!(e.evaluate(&[3]).unwrap(), vec![6]);
    }
}
