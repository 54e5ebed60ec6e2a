//! Static STR-packed bounding-box tree.
//!
//! Built once over (bbox, payload) pairs; queries return every payload whose
//! box intersects the query box. Refinement to exact geometry is the
//! caller's job.

use super::polygon::Aabb;

const NODE_CAPACITY: usize = 16;

enum Node<T> {
    Leaf { bbox: Aabb, items: Vec<(Aabb, T)> },
    Inner { bbox: Aabb, children: Vec<Node<T>> },
}

impl<T> Node<T> {
    fn bbox(&self) -> &Aabb {
        match self {
            Node::Leaf { bbox, .. } => bbox,
            Node::Inner { bbox, .. } => bbox,
        }
    }
}

pub struct StrTree<T> {
    root: Option<Node<T>>,
    len: usize,
}

impl<T> StrTree<T> {
    /// Bulk-loads with sort-tile-recursive packing.
    pub fn build(mut items: Vec<(Aabb, T)>) -> Self {
        let len = items.len();
        if items.is_empty() {
            return StrTree { root: None, len: 0 };
        }
        items.sort_by(|a, b| a.0.center().x.total_cmp(&b.0.center().x));
        let n_leaves = len.div_ceil(NODE_CAPACITY);
        let n_slices = (n_leaves as f64).sqrt().ceil() as usize;
        let slice_size = len.div_ceil(n_slices);

        let mut leaves: Vec<Node<T>> = Vec::with_capacity(n_leaves);
        let mut rest = items;
        while !rest.is_empty() {
            let take = slice_size.min(rest.len());
            let mut slice: Vec<(Aabb, T)> = rest.drain(..take).collect();
            slice.sort_by(|a, b| a.0.center().y.total_cmp(&b.0.center().y));
            while !slice.is_empty() {
                let take = NODE_CAPACITY.min(slice.len());
                let chunk: Vec<(Aabb, T)> = slice.drain(..take).collect();
                let bbox = chunk
                    .iter()
                    .map(|(b, _)| *b)
                    .reduce(|a, b| a.union(&b))
                    .unwrap();
                leaves.push(Node::Leaf { bbox, items: chunk });
            }
        }

        let mut level = leaves;
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(NODE_CAPACITY));
            let mut iter = level.into_iter().peekable();
            while iter.peek().is_some() {
                let children: Vec<Node<T>> = iter.by_ref().take(NODE_CAPACITY).collect();
                let bbox = children
                    .iter()
                    .map(|c| *c.bbox())
                    .reduce(|a, b| a.union(&b))
                    .unwrap();
                next.push(Node::Inner { bbox, children });
            }
            level = next;
        }
        StrTree { root: level.pop(), len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// All payloads whose bbox intersects `query`.
    pub fn query(&self, query: &Aabb) -> Vec<&T> {
        let mut out = Vec::new();
        if let Some(root) = &self.root {
            Self::visit(root, query, &mut out);
        }
        out
    }

    fn visit<'a>(node: &'a Node<T>, query: &Aabb, out: &mut Vec<&'a T>) {
        if !node.bbox().intersects(query) {
            return;
        }
        match node {
            Node::Leaf { items, .. } => {
                for (b, t) in items {
                    if b.intersects(query) {
                        out.push(t);
                    }
                }
            }
            Node::Inner { children, .. } => {
                for c in children {
                    Self::visit(c, query, out);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::polygon::Pt;
    use rand::{Rng, SeedableRng};

    fn boxed(x: f64, y: f64, w: f64, h: f64) -> Aabb {
        Aabb { min: Pt::new(x, y), max: Pt::new(x + w, y + h) }
    }

    #[test]
    fn empty_tree() {
        let t: StrTree<usize> = StrTree::build(vec![]);
        assert!(t.query(&boxed(0.0, 0.0, 1.0, 1.0)).is_empty());
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let items: Vec<(Aabb, usize)> = (0..2000)
            .map(|i| {
                let x = rng.gen_range(0.0..100.0);
                let y = rng.gen_range(0.0..100.0);
                (boxed(x, y, rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)), i)
            })
            .collect();
        let tree = StrTree::build(items.clone());
        for _ in 0..200 {
            let q = boxed(
                rng.gen_range(-5.0..100.0),
                rng.gen_range(-5.0..100.0),
                rng.gen_range(0.0..10.0),
                rng.gen_range(0.0..10.0),
            );
            let mut got: Vec<usize> = tree.query(&q).into_iter().copied().collect();
            got.sort_unstable();
            let mut want: Vec<usize> = items
                .iter()
                .filter(|(b, _)| b.intersects(&q))
                .map(|(_, i)| *i)
                .collect();
            want.sort_unstable();
            assert_eq!(got, want);
        }
    }
}
