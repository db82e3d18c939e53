//! Subject hierarchy and the covering relation between subscriptions and
//! publications.
//!
//! A subscription to `S` matches a publication on `T` when `S` and `T` sit
//! on one root-to-leaf chain: subscribing to a subject pulls in everything
//! below it, and publishing on a subject reaches everyone subscribed
//! anywhere beneath it.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::dsl::{SmModel, SubjectDecl, TextValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopicError {
    #[error("unknown subject code '{0}'")]
    UnknownCode(String),
    #[error("duplicate subject code '{0}'")]
    DuplicateCode(String),
}

/// Index of a node inside its [`TopicHierarchy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeHandle(usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicNode {
    pub code: String,
    pub name: TextValue,
    pub description: TextValue,
    pub parent: Option<NodeHandle>,
    pub children: Vec<NodeHandle>,
    /// Roots sit at depth 0.
    pub depth: usize,
}

/// An immutable forest of subjects, in declaration (pre-)order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicHierarchy {
    nodes: Vec<TopicNode>,
    roots: Vec<NodeHandle>,
    index: HashMap<String, NodeHandle>,
}

impl TopicHierarchy {
    pub fn from_model(model: &SmModel) -> Result<Self, TopicError> {
        Self::from_subjects(&model.hierarchy)
    }

    pub fn from_subjects(subjects: &[SubjectDecl]) -> Result<Self, TopicError> {
        let mut h = TopicHierarchy {
            nodes: Vec::new(),
            roots: Vec::new(),
            index: HashMap::new(),
        };
        // Explicit stack keeps pre-order without recursion.
        let mut stack: Vec<(&SubjectDecl, Option<NodeHandle>)> =
            subjects.iter().rev().map(|s| (s, None)).collect();
        while let Some((decl, parent)) = stack.pop() {
            let handle = NodeHandle(h.nodes.len());
            if h.index.insert(decl.code.clone(), handle).is_some() {
                return Err(TopicError::DuplicateCode(decl.code.clone()));
            }
            let depth = match parent {
                Some(p) => {
                    h.nodes[p.0].children.push(handle);
                    h.nodes[p.0].depth + 1
                }
                None => {
                    h.roots.push(handle);
                    0
                }
            };
            h.nodes.push(TopicNode {
                code: decl.code.clone(),
                name: decl.name.clone(),
                description: decl.description.clone(),
                parent,
                children: Vec::new(),
                depth,
            });
            stack.extend(decl.sons.iter().rev().map(|s| (s, Some(handle))));
        }
        Ok(h)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn roots(&self) -> &[NodeHandle] {
        &self.roots
    }

    /// All nodes in declaration pre-order.
    pub fn nodes(&self) -> &[TopicNode] {
        &self.nodes
    }

    pub fn node(&self, handle: NodeHandle) -> &TopicNode {
        &self.nodes[handle.0]
    }

    pub fn lookup(&self, code: &str) -> Result<NodeHandle, TopicError> {
        self.index
            .get(code)
            .copied()
            .ok_or_else(|| TopicError::UnknownCode(code.to_string()))
    }

    pub fn get(&self, code: &str) -> Result<&TopicNode, TopicError> {
        self.lookup(code).map(|h| self.node(h))
    }

    pub fn contains(&self, code: &str) -> bool {
        self.index.contains_key(code)
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.code.as_str())
    }

    pub fn parent_code(&self, code: &str) -> Result<Option<&str>, TopicError> {
        let node = self.get(code)?;
        Ok(node.parent.map(|p| self.node(p).code.as_str()))
    }

    /// Codes from the root down to `code`, inclusive.
    pub fn path(&self, code: &str) -> Result<Vec<&str>, TopicError> {
        let mut chain = vec![];
        let mut cur = Some(self.lookup(code)?);
        while let Some(h) = cur {
            let node = self.node(h);
            chain.push(node.code.as_str());
            cur = node.parent;
        }
        chain.reverse();
        Ok(chain)
    }

    /// `code` and all of its transitive descendants.
    pub fn subtree(&self, code: &str) -> Result<BTreeSet<String>, TopicError> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self.lookup(code)?];
        while let Some(h) = stack.pop() {
            let node = self.node(h);
            out.insert(node.code.clone());
            stack.extend(node.children.iter().copied());
        }
        Ok(out)
    }

    fn is_ancestor_or_self(&self, ancestor: NodeHandle, mut node: NodeHandle) -> bool {
        let target_depth = self.node(ancestor).depth;
        while self.node(node).depth > target_depth {
            node = match self.node(node).parent {
                Some(p) => p,
                None => return false,
            };
        }
        node == ancestor
    }

    /// Whether a subscription to `subscription` entitles its holder to a
    /// publication on `publication`. Symmetric and reflexive.
    pub fn covers(&self, subscription: &str, publication: &str) -> Result<bool, TopicError> {
        let s = self.lookup(subscription)?;
        let p = self.lookup(publication)?;
        let (upper, lower) = if self.node(s).depth <= self.node(p).depth {
            (s, p)
        } else {
            (p, s)
        };
        Ok(self.is_ancestor_or_self(upper, lower))
    }

    /// Every publication topic matched by at least one code in `subs`:
    /// the union of their subtrees and ancestors.
    pub fn effective_subscriptions<'a, I>(&self, subs: I) -> Result<BTreeSet<String>, TopicError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut out = BTreeSet::new();
        for code in subs {
            out.extend(self.subtree(code)?);
            out.extend(self.path(code)?.into_iter().map(str::to_string));
        }
        Ok(out)
    }
}
