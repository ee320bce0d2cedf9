//! Ordered tree enumeration and a brute-force forest edit distance.

use std::collections::HashMap;

use nile::explain::{Label, Tree};

/// Forest edit distance straight from the recursive definition: look at the
/// rightmost roots and either delete one, insert one, or match them.
/// Forests are interned so one instance can be reused across many pairs.
#[derive(Default)]
pub struct ForestDistance {
    ids: HashMap<Vec<Tree>, u32>,
    /// Per forest: size, and for non-empty forests the rightmost root's
    /// label plus the ids of (forest minus that root, rest, root's children).
    info: Vec<(u32, Option<(Label, u32, u32, u32)>)>,
    memo: HashMap<(u32, u32), u32>,
}

impl ForestDistance {
    pub fn intern(&mut self, f: &[Tree]) -> u32 {
        if let Some(&id) = self.ids.get(f) {
            return id;
        }
        let size = f.iter().map(Tree::size).sum::<usize>() as u32;
        let split = f.split_last().map(|(v, rest)| {
            let minus: Vec<Tree> = rest.iter().chain(v.children.iter()).cloned().collect();
            (v.label.clone(), self.intern(&minus), self.intern(rest), self.intern(&v.children))
        });
        let id = self.info.len() as u32;
        self.info.push((size, split));
        self.ids.insert(f.to_vec(), id);
        id
    }

    /// Forgets cached distances but keeps interned forests.
    pub fn clear(&mut self) {
        self.memo.clear();
    }

    pub fn dist(&mut self, f: u32, g: u32) -> u32 {
        let (fs, fsplit) = &self.info[f as usize];
        let (gs, gsplit) = &self.info[g as usize];
        let (Some(fsplit), Some(gsplit)) = (fsplit, gsplit) else { return fs + gs };
        if let Some(&d) = self.memo.get(&(f, g)) {
            return d;
        }
        let (fl, f_minus, f_rest, f_kids) = fsplit.clone();
        let (gl, g_minus, g_rest, g_kids) = gsplit.clone();
        let del = self.dist(f_minus, g) + 1;
        let ins = self.dist(f, g_minus) + 1;
        let matched = self.dist(f_rest, g_rest) + self.dist(f_kids, g_kids) + u32::from(fl != gl);
        let d = del.min(ins).min(matched);
        self.memo.insert((f, g), d);
        d
    }

    pub fn tree_dist(&mut self, a: &Tree, b: &Tree) -> usize {
        let (fa, fb) = (self.intern(std::slice::from_ref(a)), self.intern(std::slice::from_ref(b)));
        self.dist(fa, fb) as usize
    }
}

pub fn oracle(a: &Tree, b: &Tree) -> usize {
    ForestDistance::default().tree_dist(a, b)
}

/// All ordered forests with exactly `n` nodes, unlabeled (label "x").
pub fn forests(n: usize, memo: &mut HashMap<usize, Vec<Vec<Tree>>>) -> Vec<Vec<Tree>> {
    if n == 0 {
        return vec![vec![]];
    }
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for kids in forests(first - 1, memo) {
            let head = Tree::node(Label::bare("x"), kids);
            for rest in forests(n - first, memo) {
                let mut f = vec![head.clone()];
                f.extend(rest);
                out.push(f);
            }
        }
    }
    memo.insert(n, out.clone());
    out
}

/// Every ordered tree shape with at most `max` nodes.
pub fn shapes(max: usize) -> Vec<Tree> {
    let mut memo = HashMap::new();
    (1..=max)
        .flat_map(|n| forests(n - 1, &mut memo).into_iter().map(|kids| Tree::node(Label::bare("x"), kids)))
        .collect()
}

/// Relabels nodes in preorder with `labels[k]` for the k-th node.
pub fn relabel(t: &Tree, labels: &mut impl Iterator<Item = String>) -> Tree {
    let label = Label::bare(labels.next().unwrap());
    let children = t.children.iter().map(|c| relabel(c, labels)).collect();
    Tree::node(label, children)
}

/// Labels alternate A, B, A, ... in preorder.
pub fn alternating(t: &Tree) -> Tree {
    relabel(t, &mut (0..).map(|k| if k % 2 == 0 { "A".to_string() } else { "B".to_string() }))
}
