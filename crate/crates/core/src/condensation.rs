//! Strongly connected components of G(x) and the condensation DAG ℋ(x).

use std::collections::BTreeSet;

use serde::Serialize;

use crate::config::Configuration;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condensation {
    /// Member sets, sorted internally and ordered by smallest member.
    pub components: Vec<Vec<usize>>,
    /// Component index of every node.
    pub component_of: Vec<usize>,
    /// DAG edges (λ₁, λ₂): some edge of G(x) leaves λ₁ and enters λ₂.
    pub edges: BTreeSet<(usize, usize)>,
}

impl Condensation {
    pub fn is_sink(&self, c: usize) -> bool {
        !self.edges.iter().any(|&(a, _)| a == c)
    }

    pub fn is_source(&self, c: usize) -> bool {
        !self.edges.iter().any(|&(_, b)| b == c)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Tarjan's algorithm, iterative so deep graphs cannot overflow the stack.
pub fn condensation(config: &Configuration) -> Condensation {
    let n = config.n();
    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut raw: Vec<Vec<usize>> = Vec::new();
    let mut next_index = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        // (node, position of the next out-link to explore)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(top) = call.last_mut() {
            let v = top.0;
            let targets = config.action(v);
            if top.1 < targets.len() {
                let w = targets[top.1];
                top.1 += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                members.sort_unstable();
                raw.push(members);
            }
        }
    }

    raw.sort();
    let mut component_of = vec![0; n];
    for (c, members) in raw.iter().enumerate() {
        for &v in members {
            component_of[v] = c;
        }
    }
    let edges = config
        .edges()
        .filter_map(|(i, j)| {
            let (a, b) = (component_of[i], component_of[j]);
            (a != b).then_some((a, b))
        })
        .collect();
    Condensation {
        components: raw,
        component_of,
        edges,
    }
}
