//! Newick serialization of merge trees.
//!
//! Branch lengths are height differences (parent height − child height) and
//! node comments carry the pushforward mass, e.g. `n3[mass=0.25]:0.1`.

use super::MergeTree;

enum Step {
    Enter(usize),
    Exit(usize),
    Comma,
}

/// Render a tree in Newick format.
pub fn to_newick(tree: &MergeTree) -> String {
    let children = tree.children();
    let mut out = String::new();
    // Explicit stack; unbinned trees can be chains thousands of nodes deep.
    let mut stack = vec![Step::Enter(tree.root)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Enter(v) => {
                stack.push(Step::Exit(v));
                if !children[v].is_empty() {
                    out.push('(');
                    for (k, &c) in children[v].iter().enumerate().rev() {
                        stack.push(Step::Enter(c));
                        if k > 0 {
                            stack.push(Step::Comma);
                        }
                    }
                }
            }
            Step::Exit(v) => {
                if !children[v].is_empty() {
                    out.push(')');
                }
                let node = &tree.nodes[v];
                let branch = match node.parent {
                    Some(p) => tree.nodes[p].height - node.height,
                    None => 0.0,
                };
                out.push_str(&format!("n{}[mass={}]:{}", node.id, node.mass, branch));
            }
            Step::Comma => out.push(','),
        }
    }
    out.push(';');
    out
}

#[cfg(test)]
mod tests {
    use crate::bmt::build_tree_raw;

    use super::*;

    #[test]
    fn two_leaf_newick() {
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let tree = build_tree_raw(&adj, &[0.0, 1.0, 0.5], &[0.25, 0.25, 0.5], 2.0).unwrap();
        let text = to_newick(&tree);
        assert!(text.starts_with('('));
        assert!(text.ends_with(';'));
        assert!(text.contains("mass=0.25"));
        assert_eq!(text.matches('(').count(), text.matches(')').count());
        // Exactly one separator between the two leaf subtrees, placed between them.
        assert_eq!(text.matches(',').count(), 1);
        let comma = text.find(',').unwrap();
        let open = text.find('(').unwrap();
        let close = text.rfind(')').unwrap();
        assert!(open < comma && comma < close);
        // Two-leaf tree at heights 0 and 0.5 merging at 1: branch lengths 1 and 0.5.
        assert!(text.contains(":1,") || text.contains(":1"));
        assert!(text.contains(":0.5"));
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 5000;
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                let mut a = Vec::new();
                if v > 0 {
                    a.push(v - 1);
                }
                if v + 1 < n {
                    a.push(v + 1);
                }
                a
            })
            .collect();
        let values: Vec<f64> = (0..n).map(|k| k as f64).collect();
        let weights = vec![1.0 / n as f64; n];
        let tree = build_tree_raw(&adj, &values, &weights, 2.0).unwrap();
        let text = to_newick(&tree);
        assert!(text.ends_with(';'));
    }
}
