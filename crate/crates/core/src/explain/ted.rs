//! Ordered tree edit distance (Zhang–Shasha, unit costs) and edit scripts.
//!
//! Scripts are replayed on a forest: the first path index selects a top-level
//! tree, so a script may delete a root with several children and later wrap
//! the pieces again. A script applied to a one-tree forest always ends with a
//! one-tree forest.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arg: Option<String>,
}

impl Label {
    pub fn new(kind: impl Into<String>, arg: Option<String>) -> Self {
        Label { kind: kind.into(), arg }
    }

    pub fn bare(kind: impl Into<String>) -> Self {
        Label { kind: kind.into(), arg: None }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.arg {
            Some(a) => write!(f, "{}({a})", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tree {
    pub label: Label,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(label: Label) -> Self {
        Tree { label, children: Vec::new() }
    }

    pub fn node(label: Label, children: Vec<Tree>) -> Self {
        Tree { label, children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    pub fn at(&self, path: &[usize]) -> Option<&Tree> {
        path.iter().try_fold(self, |t, &i| t.children.get(i))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if !self.children.is_empty() {
            write!(f, "[")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// One unit-cost edit. Paths are forest paths (see the module docs).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    /// New node at `path`; it adopts the `adopt` siblings that currently
    /// start at that position as its children.
    InsertNode {
        path: Vec<usize>,
        label: Label,
        adopt: usize,
    },
    /// Removes the node at `path`; its children take its place.
    DeleteNode {
        path: Vec<usize>,
    },
    Relabel {
        path: Vec<usize>,
        from: Label,
        to: Label,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
    pub cost: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TedError {
    #[error("tree diff budget exceeded: {0} node pairs")]
    BudgetExceeded(usize),
    #[error("edit {index} does not apply: {reason}")]
    BadOp { index: usize, reason: String },
}

/// Largest `|a| * |b|` accepted by [`tree_diff`].
pub const DEFAULT_PAIR_BUDGET: usize = 4_000_000;

/// Where an edit came from, in the original trees (root = empty path).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    pub source: Option<Vec<usize>>,
    pub target: Option<Vec<usize>>,
}

/// Postorder view of a tree.
struct Indexed<'a> {
    nodes: Vec<&'a Tree>,
    /// Leftmost leaf descendant, in postorder numbering.
    lml: Vec<usize>,
    parent: Vec<Option<usize>>,
    /// Original path of every node.
    paths: Vec<Vec<usize>>,
    pre: Vec<usize>,
    keyroots: Vec<usize>,
}

impl<'a> Indexed<'a> {
    fn new(t: &'a Tree) -> Self {
        let mut ix = Indexed {
            nodes: Vec::new(),
            lml: Vec::new(),
            parent: Vec::new(),
            paths: Vec::new(),
            pre: Vec::new(),
            keyroots: Vec::new(),
        };
        let mut counter = 0;
        ix.visit(t, &mut Vec::new(), &mut counter);
        let n = ix.nodes.len();
        let mut seen = vec![false; n];
        for i in (0..n).rev() {
            if !seen[ix.lml[i]] {
                seen[ix.lml[i]] = true;
                ix.keyroots.push(i);
            }
        }
        ix.keyroots.sort_unstable();
        ix
    }

    fn visit(&mut self, t: &'a Tree, path: &mut Vec<usize>, counter: &mut usize) -> usize {
        let pre = *counter;
        *counter += 1;
        let mut kids = Vec::new();
        for (k, c) in t.children.iter().enumerate() {
            path.push(k);
            kids.push(self.visit(c, path, counter));
            path.pop();
        }
        let me = self.nodes.len();
        self.nodes.push(t);
        self.lml.push(kids.first().map_or(me, |&k| self.lml[k]));
        self.parent.push(None);
        self.paths.push(path.clone());
        self.pre.push(pre);
        for k in kids {
            self.parent[k] = Some(me);
        }
        me
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    fn subtree_size(&self, i: usize) -> usize {
        i - self.lml[i] + 1
    }
}

/// Costs are scaled by `unit` (larger than any tree), and a relabel that
/// changes the node kind costs one extra. Minimizing the scaled cost therefore
/// minimizes the unit cost first and breaks ties toward kind-preserving edits.
struct Zs<'a> {
    a: Indexed<'a>,
    b: Indexed<'a>,
    td: Vec<Vec<usize>>,
    unit: usize,
}

impl<'a> Zs<'a> {
    fn new(a: Indexed<'a>, b: Indexed<'a>) -> Self {
        let (n, m) = (a.len(), b.len());
        Zs { a, b, td: vec![vec![0; m]; n], unit: n + m + 1 }
    }

    fn relabel_cost(&self, x: usize, y: usize) -> usize {
        let (p, q) = (&self.a.nodes[x].label, &self.b.nodes[y].label);
        if p == q {
            0
        } else if p.kind == q.kind {
            self.unit
        } else {
            self.unit + 1
        }
    }

    /// Forest distance table for the keyroot pair `(i, j)`; also fills `td`
    /// for every pair of nodes on the two leftmost paths.
    fn forest(&mut self, i: usize, j: usize) -> Vec<Vec<usize>> {
        let (li, lj) = (self.a.lml[i], self.b.lml[j]);
        let (rows, cols) = (i - li + 2, j - lj + 2);
        let mut fd = vec![vec![0usize; cols]; rows];
        for x in 1..rows {
            fd[x][0] = x * self.unit;
        }
        for y in 1..cols {
            fd[0][y] = y * self.unit;
        }
        for x in li..=i {
            let xi = x - li + 1;
            for y in lj..=j {
                let yj = y - lj + 1;
                let del = fd[xi - 1][yj] + self.unit;
                let ins = fd[xi][yj - 1] + self.unit;
                if self.a.lml[x] == li && self.b.lml[y] == lj {
                    let m = fd[xi - 1][yj - 1] + self.relabel_cost(x, y);
                    fd[xi][yj] = del.min(ins).min(m);
                    self.td[x][y] = fd[xi][yj];
                } else {
                    let m = fd[self.a.lml[x] - li][self.b.lml[y] - lj] + self.td[x][y];
                    fd[xi][yj] = del.min(ins).min(m);
                }
            }
        }
        fd
    }

    fn run(&mut self) {
        let (ka, kb) = (self.a.keyroots.clone(), self.b.keyroots.clone());
        for &i in &ka {
            for &j in &kb {
                self.forest(i, j);
            }
        }
    }

    /// An optimal mapping as `(source, target)` postorder pairs.
    fn mapping(&mut self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut stack = vec![(self.a.len() - 1, self.b.len() - 1)];
        while let Some((i, j)) = stack.pop() {
            let fd = self.forest(i, j);
            let (li, lj) = (self.a.lml[i], self.b.lml[j]);
            let (mut xi, mut yj) = (i - li + 1, j - lj + 1);
            while xi > 0 || yj > 0 {
                if xi > 0 && fd[xi][yj] == fd[xi - 1][yj] + self.unit {
                    xi -= 1;
                } else if yj > 0 && fd[xi][yj] == fd[xi][yj - 1] + self.unit {
                    yj -= 1;
                } else {
                    let (x, y) = (li + xi - 1, lj + yj - 1);
                    if self.a.lml[x] == li && self.b.lml[y] == lj {
                        out.push((x, y));
                        xi -= 1;
                        yj -= 1;
                    } else {
                        stack.push((x, y));
                        xi = self.a.lml[x] - li;
                        yj = self.b.lml[y] - lj;
                    }
                }
            }
        }
        out
    }
}

/// Unit-cost tree edit distance between `a` and `b`.
pub fn tree_distance(a: &Tree, b: &Tree) -> usize {
    let mut zs = Zs::new(Indexed::new(a), Indexed::new(b));
    zs.run();
    let (n, m) = (zs.a.len(), zs.b.len());
    zs.td[n - 1][m - 1] / zs.unit
}

/// A minimum-cost edit script turning `a` into `b`.
pub fn tree_diff(a: &Tree, b: &Tree) -> Result<EditScript, TedError> {
    diff_with_origins(a, b, DEFAULT_PAIR_BUDGET).map(|(s, _)| s)
}

/// Working node during script replay; `target` is the target postorder id.
struct WNode {
    label: Label,
    target: Option<usize>,
    source: Option<usize>,
    children: Vec<usize>,
    parent: usize,
}

/// Forest under a virtual root at arena index 0.
struct Work {
    nodes: Vec<WNode>,
}

impl Work {
    fn path(&self, mut id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while id != 0 {
            let p = self.nodes[id].parent;
            out.push(self.nodes[p].children.iter().position(|&c| c == id).expect("child link"));
            id = p;
        }
        out.reverse();
        out
    }
}

/// Like [`tree_diff`], with the origin of each edit in the input trees.
pub fn diff_with_origins(a: &Tree, b: &Tree, budget: usize) -> Result<(EditScript, Vec<Origin>), TedError> {
    let pairs = a.size().saturating_mul(b.size());
    if pairs > budget {
        return Err(TedError::BudgetExceeded(pairs));
    }
    let mut zs = Zs::new(Indexed::new(a), Indexed::new(b));
    zs.run();
    let (n, m) = (zs.a.len(), zs.b.len());
    let cost = zs.td[n - 1][m - 1] / zs.unit;
    let mapping = zs.mapping();
    let (ia, ib) = (&zs.a, &zs.b);

    let mut to_target = vec![None; n];
    let mut mapped_target = vec![false; m];
    for &(x, y) in &mapping {
        to_target[x] = Some(y);
        mapped_target[y] = true;
    }

    let mut ops = Vec::new();
    let mut origins = Vec::new();

    // Build the working forest from the source tree.
    let mut work =
        Work { nodes: vec![WNode { label: Label::bare(""), target: None, source: None, children: vec![], parent: 0 }] };
    let mut arena_of = vec![0usize; n];
    for x in 0..n {
        arena_of[x] = work.nodes.len();
        work.nodes.push(WNode {
            label: ia.nodes[x].label.clone(),
            target: to_target[x],
            source: Some(x),
            children: vec![],
            parent: 0,
        });
    }
    for x in 0..n {
        let parent = ia.parent[x].map_or(0, |p| arena_of[p]);
        work.nodes[arena_of[x]].parent = parent;
    }
    // children in order: postorder ids of siblings are increasing
    for x in 0..n {
        let parent = work.nodes[arena_of[x]].parent;
        work.nodes[parent].children.push(arena_of[x]);
    }

    // Relabels first, while the forest still has the source shape.
    for &(x, y) in &mapping {
        if ia.nodes[x].label != ib.nodes[y].label {
            let id = arena_of[x];
            ops.push(EditOp::Relabel {
                path: work.path(id),
                from: ia.nodes[x].label.clone(),
                to: ib.nodes[y].label.clone(),
            });
            origins.push(Origin { source: Some(ia.paths[x].clone()), target: Some(ib.paths[y].clone()) });
            work.nodes[id].label = ib.nodes[y].label.clone();
        }
    }

    // Deletions of unmapped source nodes, in source preorder.
    let mut by_pre: Vec<usize> = (0..n).collect();
    by_pre.sort_by_key(|&x| ia.pre[x]);
    for x in by_pre {
        if to_target[x].is_some() {
            continue;
        }
        let id = arena_of[x];
        ops.push(EditOp::DeleteNode { path: work.path(id) });
        origins.push(Origin { source: Some(ia.paths[x].clone()), target: None });
        let parent = work.nodes[id].parent;
        let pos = work.nodes[parent].children.iter().position(|&c| c == id).expect("child link");
        let kids = std::mem::take(&mut work.nodes[id].children);
        for &k in &kids {
            work.nodes[k].parent = parent;
        }
        work.nodes[parent].children.splice(pos..=pos, kids);
    }

    // Insertions of unmapped target nodes, in target preorder.
    let mut target_arena = vec![None; m];
    for x in 0..n {
        if let Some(y) = to_target[x] {
            target_arena[y] = Some(arena_of[x]);
        }
    }
    let mut by_pre: Vec<usize> = (0..m).collect();
    by_pre.sort_by_key(|&y| ib.pre[y]);
    for y in by_pre {
        if mapped_target[y] {
            continue;
        }
        let parent = match ib.parent[y] {
            Some(p) => target_arena[p].expect("parents are placed before children"),
            None => 0,
        };
        let (lo, hi) = (ib.pre[y], ib.pre[y] + ib.subtree_size(y));
        let kids = &work.nodes[parent].children;
        let pre_of = |id: usize| ib.pre[work.nodes[id].target.expect("all remaining nodes are mapped")];
        let pos = kids.iter().filter(|&&c| pre_of(c) < lo).count();
        let adopt = kids.iter().filter(|&&c| (lo..hi).contains(&pre_of(c))).count();
        let id = work.nodes.len();
        let adopted: Vec<usize> = work.nodes[parent].children.splice(pos..pos + adopt, [id]).collect();
        for &k in &adopted {
            work.nodes[k].parent = id;
        }
        work.nodes.push(WNode {
            label: ib.nodes[y].label.clone(),
            target: Some(y),
            source: None,
            children: adopted,
            parent,
        });
        target_arena[y] = Some(id);
        let path = work.path(id);
        debug_assert_eq!(path.last().copied(), Some(pos));
        ops.push(EditOp::InsertNode { path, label: ib.nodes[y].label.clone(), adopt });
        origins.push(Origin { source: None, target: Some(ib.paths[y].clone()) });
    }
    debug_assert!(work.nodes.iter().skip(1).all(|w| w.source.is_some() || w.target.is_some()));
    debug_assert_eq!(ops.len(), cost);
    Ok((EditScript { ops, cost }, origins))
}

fn locate<'t>(forest: &'t mut Vec<Tree>, path: &[usize]) -> Option<(&'t mut Vec<Tree>, usize)> {
    let (&last, init) = path.split_last()?;
    let mut siblings = forest;
    for &i in init {
        siblings = &mut siblings.get_mut(i)?.children;
    }
    Some((siblings, last))
}

/// Replays `script` on `tree`.
pub fn apply(script: &EditScript, tree: &Tree) -> Result<Tree, TedError> {
    let mut forest = vec![tree.clone()];
    for (index, op) in script.ops.iter().enumerate() {
        let bad = |reason: &str| TedError::BadOp { index, reason: reason.to_string() };
        match op {
            EditOp::Relabel { path, from, to } => {
                let (sibs, k) = locate(&mut forest, path).ok_or_else(|| bad("no such node"))?;
                let node = sibs.get_mut(k).ok_or_else(|| bad("no such node"))?;
                if &node.label != from {
                    return Err(bad(&format!("expected label {from}, found {}", node.label)));
                }
                node.label = to.clone();
            }
            EditOp::DeleteNode { path } => {
                let (sibs, k) = locate(&mut forest, path).ok_or_else(|| bad("no such node"))?;
                if k >= sibs.len() {
                    return Err(bad("no such node"));
                }
                let node = sibs.remove(k);
                sibs.splice(k..k, node.children);
            }
            EditOp::InsertNode { path, label, adopt } => {
                let (sibs, k) = locate(&mut forest, path).ok_or_else(|| bad("no such position"))?;
                if k + adopt > sibs.len() {
                    return Err(bad("not enough siblings to adopt"));
                }
                let children: Vec<Tree> = sibs.drain(k..k + adopt).collect();
                sibs.insert(k, Tree::node(label.clone(), children));
            }
        }
    }
    match forest.len() {
        1 => Ok(forest.pop().expect("one tree")),
        n => Err(TedError::BadOp { index: script.ops.len(), reason: format!("script leaves {n} top-level trees") }),
    }
}
