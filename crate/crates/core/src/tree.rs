//! Binary decision trees and sum-of-trees ensembles.
//!
//! Nodes live in an arena addressed by [`NodeId`]. Ids are stable across
//! edits: pruning vacates the two child slots and growing reuses vacant slots
//! before appending. Trees are values; every edit returns a new tree.

use crate::data::{bin_of, Dataset};
use crate::error::{Error, Result};

/// Split on `x[variable] <= grid[variable][cutpoint]` (true goes left).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplitRule {
    pub variable: usize,
    pub cutpoint: usize,
}

impl SplitRule {
    pub fn new(variable: usize, cutpoint: usize) -> Self {
        SplitRule { variable, cutpoint }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Leaf { mu: f64 },
    Interior { rule: SplitRule, left: NodeId, right: NodeId },
}

#[derive(Clone, Debug)]
struct Slot {
    parent: Option<NodeId>,
    depth: u32,
    node: Node,
}

/// A binary tree of split rules with a scalar value on every leaf.
#[derive(Clone, Debug)]
pub struct DecisionTree {
    slots: Vec<Option<Slot>>,
}

/// Pre-order token of a serialized tree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Token {
    Split(SplitRule),
    Leaf(f64),
}

impl DecisionTree {
    /// Single-leaf tree.
    pub fn stump(mu: f64) -> Self {
        DecisionTree {
            slots: vec![Some(Slot {
                parent: None,
                depth: 0,
                node: Node::Leaf { mu },
            })],
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    fn slot(&self, id: NodeId) -> &Slot {
        self.slots
            .get(id.index())
            .and_then(Option::as_ref)
            .unwrap_or_else(|| panic!("node {id:?} is not part of this tree"))
    }

    fn slot_mut(&mut self, id: NodeId) -> &mut Slot {
        self.slots
            .get_mut(id.index())
            .and_then(Option::as_mut)
            .unwrap_or_else(|| panic!("node {id:?} is not part of this tree"))
    }

    pub fn contains(&self, id: NodeId) -> bool {
        matches!(self.slots.get(id.index()), Some(Some(_)))
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.slot(id).node
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.slot(id).parent
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.slot(id).depth as usize
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        matches!(self.node(id), Node::Leaf { .. })
    }

    pub fn rule(&self, id: NodeId) -> Option<SplitRule> {
        match self.node(id) {
            Node::Interior { rule, .. } => Some(*rule),
            Node::Leaf { .. } => None,
        }
    }

    pub fn children(&self, id: NodeId) -> Option<(NodeId, NodeId)> {
        match self.node(id) {
            Node::Interior { left, right, .. } => Some((*left, *right)),
            Node::Leaf { .. } => None,
        }
    }

    /// Leaf value; panics on interior nodes.
    pub fn mu(&self, id: NodeId) -> f64 {
        match self.node(id) {
            Node::Leaf { mu } => *mu,
            Node::Interior { .. } => panic!("node {id:?} is interior"),
        }
    }

    /// Size of the id space (including vacant slots).
    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    /// All node ids in pre-order (node, left subtree, right subtree).
    pub fn preorder_ids(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.slots.len());
        let mut stack = vec![NodeId::ROOT];
        while let Some(id) = stack.pop() {
            out.push(id);
            if let Node::Interior { left, right, .. } = self.node(id) {
                stack.push(*right);
                stack.push(*left);
            }
        }
        out
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        self.preorder_ids().into_iter().filter(|&id| self.is_leaf(id)).collect()
    }

    pub fn interiors(&self) -> Vec<NodeId> {
        self.preorder_ids().into_iter().filter(|&id| !self.is_leaf(id)).collect()
    }

    /// Interior nodes whose children are both leaves.
    pub fn nog_nodes(&self) -> Vec<NodeId> {
        self.interiors()
            .into_iter()
            .filter(|&id| {
                let (l, r) = self.children(id).unwrap();
                self.is_leaf(l) && self.is_leaf(r)
            })
            .collect()
    }

    /// (parent, child) pairs where both are interior.
    pub fn swap_pairs(&self) -> Vec<(NodeId, NodeId)> {
        let mut pairs = Vec::new();
        for id in self.interiors() {
            let (l, r) = self.children(id).unwrap();
            for c in [l, r] {
                if !self.is_leaf(c) {
                    pairs.push((id, c));
                }
            }
        }
        pairs
    }

    pub fn leaf_count(&self) -> usize {
        self.slots
            .iter()
            .flatten()
            .filter(|s| matches!(s.node, Node::Leaf { .. }))
            .count()
    }

    pub fn interior_count(&self) -> usize {
        self.slots.iter().flatten().count() - self.leaf_count()
    }

    pub fn max_depth(&self) -> usize {
        self.slots.iter().flatten().map(|s| s.depth as usize).max().unwrap_or(0)
    }

    /// Variables used by the interior nodes, in pre-order.
    pub fn split_variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.interiors().into_iter().map(move |id| self.rule(id).unwrap().variable)
    }

    /// Leaf reached by `x` (raw predictor values) under the given grids.
    pub fn assign_leaf(&self, x: &[f64], grids: &[Vec<f64>]) -> NodeId {
        let mut id = NodeId::ROOT;
        loop {
            match self.node(id) {
                Node::Leaf { .. } => return id,
                Node::Interior { rule, left, right } => {
                    id = if x[rule.variable] <= grids[rule.variable][rule.cutpoint] {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Leaf reached by a row given as per-variable bins.
    pub(crate) fn assign_leaf_binned(&self, bin: impl Fn(usize) -> u32) -> NodeId {
        let mut id = NodeId::ROOT;
        loop {
            match self.node(id) {
                Node::Leaf { .. } => return id,
                Node::Interior { rule, left, right } => {
                    id = if bin(rule.variable) as usize <= rule.cutpoint {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn evaluate(&self, x: &[f64], grids: &[Vec<f64>]) -> f64 {
        self.mu(self.assign_leaf(x, grids))
    }

    /// Route every training row; see [`Partition`].
    pub fn partition(&self, data: &Dataset) -> Partition {
        Partition::new(self, data)
    }

    fn alloc(&mut self, slot: Slot) -> NodeId {
        if let Some(i) = self.slots.iter().position(Option::is_none) {
            self.slots[i] = Some(slot);
            NodeId(i as u32)
        } else {
            self.slots.push(Some(slot));
            NodeId((self.slots.len() - 1) as u32)
        }
    }

    /// Replace leaf `leaf` by an interior node with `rule` and two zero-valued leaves.
    pub fn edit_grow(&self, leaf: NodeId, rule: SplitRule) -> Result<DecisionTree> {
        if !self.contains(leaf) || !self.is_leaf(leaf) {
            return Err(Error::StructuralEdit(format!("grow target {leaf:?} is not a leaf")));
        }
        let mut t = self.clone();
        let depth = t.slot(leaf).depth + 1;
        let child = |_: ()| Slot {
            parent: Some(leaf),
            depth,
            node: Node::Leaf { mu: 0.0 },
        };
        let left = t.alloc(child(()));
        let right = t.alloc(child(()));
        t.slot_mut(leaf).node = Node::Interior { rule, left, right };
        Ok(t)
    }

    /// Collapse a nog node (both children leaves) into a zero-valued leaf.
    pub fn edit_prune(&self, node: NodeId) -> Result<DecisionTree> {
        let (l, r) = match self.contains(node).then(|| self.children(node)).flatten() {
            Some(c) => c,
            None => {
                return Err(Error::StructuralEdit(format!("prune target {node:?} is not interior")))
            }
        };
        if !(self.is_leaf(l) && self.is_leaf(r)) {
            return Err(Error::StructuralEdit(format!(
                "prune target {node:?} has an interior child"
            )));
        }
        let mut t = self.clone();
        t.slots[l.index()] = None;
        t.slots[r.index()] = None;
        t.slot_mut(node).node = Node::Leaf { mu: 0.0 };
        t.trim();
        Ok(t)
    }

    /// Replace the rule of an interior node.
    pub fn edit_change(&self, node: NodeId, rule: SplitRule) -> Result<DecisionTree> {
        if !self.contains(node) || self.is_leaf(node) {
            return Err(Error::StructuralEdit(format!("change target {node:?} is not interior")));
        }
        let mut t = self.clone();
        if let Node::Interior { rule: r, .. } = &mut t.slot_mut(node).node {
            *r = rule;
        }
        Ok(t)
    }

    /// Exchange the rules of `parent` and its interior child `child`. When both
    /// children are interior and carry the same rule, the parent's rule is
    /// exchanged with both of them.
    pub fn edit_swap(&self, parent: NodeId, child: NodeId) -> Result<DecisionTree> {
        if !self.contains(parent) || !self.contains(child) {
            return Err(Error::StructuralEdit("swap targets are not in the tree".into()));
        }
        let (l, r) = self
            .children(parent)
            .ok_or_else(|| Error::StructuralEdit(format!("swap parent {parent:?} is a leaf")))?;
        if child != l && child != r {
            return Err(Error::StructuralEdit(format!(
                "{child:?} is not a child of {parent:?}"
            )));
        }
        let child_rule = self
            .rule(child)
            .ok_or_else(|| Error::StructuralEdit(format!("swap child {child:?} is a leaf")))?;
        let parent_rule = self.rule(parent).unwrap();
        let sibling = if child == l { r } else { l };
        let mut targets = vec![child];
        if self.rule(sibling) == Some(child_rule) {
            targets.push(sibling);
        }
        let mut t = self.clone();
        t.set_rule(parent, child_rule);
        for c in targets {
            t.set_rule(c, parent_rule);
        }
        Ok(t)
    }

    fn set_rule(&mut self, id: NodeId, new: SplitRule) {
        if let Node::Interior { rule, .. } = &mut self.slot_mut(id).node {
            *rule = new;
        }
    }

    fn trim(&mut self) {
        while matches!(self.slots.last(), Some(None)) {
            self.slots.pop();
        }
    }

    pub(crate) fn set_mu(&mut self, id: NodeId, value: f64) {
        if let Node::Leaf { mu } = &mut self.slot_mut(id).node {
            *mu = value;
        } else {
            panic!("node {id:?} is interior");
        }
    }

    /// Pre-order token stream (the serialized form).
    pub fn to_tokens(&self) -> Vec<Token> {
        self.preorder_ids()
            .into_iter()
            .map(|id| match self.node(id) {
                Node::Leaf { mu } => Token::Leaf(*mu),
                Node::Interior { rule, .. } => Token::Split(*rule),
            })
            .collect()
    }

    /// Rebuild from a pre-order token stream. Ids are assigned in pre-order.
    pub fn from_tokens(tokens: &[Token]) -> Result<DecisionTree> {
        fn build(
            tokens: &[Token],
            pos: &mut usize,
            parent: Option<NodeId>,
            depth: u32,
            slots: &mut Vec<Option<Slot>>,
        ) -> Result<NodeId> {
            let tok = *tokens
                .get(*pos)
                .ok_or_else(|| Error::InvalidTree("token stream ended early".into()))?;
            *pos += 1;
            let id = NodeId(slots.len() as u32);
            slots.push(None);
            let node = match tok {
                Token::Leaf(mu) => {
                    if !mu.is_finite() {
                        return Err(Error::InvalidTree("non-finite leaf value".into()));
                    }
                    Node::Leaf { mu }
                }
                Token::Split(rule) => {
                    let left = build(tokens, pos, Some(id), depth + 1, slots)?;
                    let right = build(tokens, pos, Some(id), depth + 1, slots)?;
                    Node::Interior { rule, left, right }
                }
            };
            slots[id.index()] = Some(Slot { parent, depth, node });
            Ok(id)
        }
        let mut slots = Vec::new();
        let mut pos = 0;
        build(tokens, &mut pos, None, 0, &mut slots)?;
        if pos != tokens.len() {
            return Err(Error::InvalidTree(format!(
                "{} trailing tokens after the tree",
                tokens.len() - pos
            )));
        }
        Ok(DecisionTree { slots })
    }

    /// Check every rule references an existing variable and cutpoint.
    pub fn validate(&self, grids: &[Vec<f64>]) -> Result<()> {
        for id in self.preorder_ids() {
            match self.node(id) {
                Node::Interior { rule, .. } => {
                    let ok = grids
                        .get(rule.variable)
                        .is_some_and(|g| rule.cutpoint < g.len());
                    if !ok {
                        return Err(Error::InvalidTree(format!(
                            "rule {rule:?} at {id:?} is outside the cutpoint grids"
                        )));
                    }
                }
                Node::Leaf { mu } => {
                    if !mu.is_finite() {
                        return Err(Error::InvalidTree(format!("leaf {id:?} has value {mu}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Same topology and rules, ignoring node ids and leaf values.
    pub fn same_structure(&self, other: &DecisionTree) -> bool {
        let strip = |t: &DecisionTree| -> Vec<Option<SplitRule>> {
            t.to_tokens()
                .into_iter()
                .map(|tok| match tok {
                    Token::Split(r) => Some(r),
                    Token::Leaf(_) => None,
                })
                .collect()
        };
        strip(self) == strip(other)
    }
}

/// Structural equality (topology, rules and leaf values), independent of ids.
impl PartialEq for DecisionTree {
    fn eq(&self, other: &Self) -> bool {
        self.to_tokens() == other.to_tokens()
    }
}

/// Rows of a dataset routed through a tree: row sets for every node, with the
/// leaf sets forming a partition of all rows.
#[derive(Clone, Debug)]
pub struct Partition {
    rows: Vec<Vec<u32>>,
    leaves: Vec<NodeId>,
}

impl Partition {
    pub fn new(tree: &DecisionTree, data: &Dataset) -> Self {
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); tree.capacity()];
        rows[NodeId::ROOT.index()] = (0..data.n() as u32).collect();
        let mut leaves = Vec::new();
        for id in tree.preorder_ids() {
            match tree.node(id) {
                Node::Leaf { .. } => leaves.push(id),
                Node::Interior { rule, left, right } => {
                    let here = std::mem::take(&mut rows[id.index()]);
                    let bins = data.bins(rule.variable);
                    let (l, r): (Vec<u32>, Vec<u32>) = here
                        .iter()
                        .partition(|&&i| bins[i as usize] as usize <= rule.cutpoint);
                    rows[left.index()] = l;
                    rows[right.index()] = r;
                    rows[id.index()] = here;
                }
            }
        }
        Partition { rows, leaves }
    }

    /// Rows routed to any node (interior nodes hold the union of their leaves).
    pub fn rows(&self, id: NodeId) -> &[u32] {
        &self.rows[id.index()]
    }

    /// (leaf, rows) cells in pre-order.
    pub fn cells(&self) -> impl Iterator<Item = (NodeId, &[u32])> + '_ {
        self.leaves.iter().map(move |&id| (id, self.rows(id)))
    }

    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    /// Leaf of every row.
    pub fn leaf_of_rows(&self, n: usize) -> Vec<NodeId> {
        let mut out = vec![NodeId::ROOT; n];
        for (leaf, rows) in self.cells() {
            for &i in rows {
                out[i as usize] = leaf;
            }
        }
        out
    }
}

/// One state of the sum-of-trees model: `m` trees plus the noise scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    trees: Vec<DecisionTree>,
    sigma: f64,
}

impl Ensemble {
    pub fn new(trees: Vec<DecisionTree>, sigma: f64) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::InvalidParameter("an ensemble needs at least one tree".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Ensemble { trees, sigma })
    }

    /// `m` single-leaf trees with value 0.
    pub fn stumps(m: usize, sigma: f64) -> Result<Self> {
        Self::new(vec![DecisionTree::stump(0.0); m], sigma)
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn m(&self) -> usize {
        self.trees.len()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Sum of the leaf values reached by `x` in every tree.
    pub fn evaluate_forest(&self, x: &[f64], grids: &[Vec<f64>]) -> f64 {
        self.trees.iter().map(|t| t.evaluate(x, grids)).sum()
    }

    pub(crate) fn evaluate_binned(&self, bins: &[u32]) -> f64 {
        self.trees
            .iter()
            .map(|t| t.mu(t.assign_leaf_binned(|v| bins[v])))
            .sum()
    }
}

/// Bins of a raw predictor row against the grids.
pub(crate) fn bin_row(x: &[f64], grids: &[Vec<f64>]) -> Vec<u32> {
    x.iter().zip(grids).map(|(&v, g)| bin_of(g, v)).collect()
}
