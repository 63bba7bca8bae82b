use super::VertexAdjacency;

/// Assignment of every vertex to a color such that no force element uses
/// two vertices of the same color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorPartition {
    pub color_of: Vec<usize>,
    pub groups: Vec<Vec<usize>>,
    pub num_colors: usize,
}

impl ColorPartition {
    pub fn from_colors(color_of: Vec<usize>) -> Self {
        let num_colors = color_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut groups = vec![Vec::new(); num_colors];
        for (v, &c) in color_of.iter().enumerate() {
            groups[c].push(v);
        }
        Self {
            color_of,
            groups,
            num_colors,
        }
    }

    /// Checks that no element has two vertices of equal color and that
    /// `groups` agrees with `color_of`.
    pub fn is_valid_for<E, I>(&self, elements: I) -> bool
    where
        E: AsRef<[usize]>,
        I: IntoIterator<Item = E>,
    {
        for e in elements {
            let e = e.as_ref();
            for (a, &p) in e.iter().enumerate() {
                if e[a + 1..].iter().any(|&q| self.color_of[p] == self.color_of[q]) {
                    return false;
                }
            }
        }
        let mut seen = vec![false; self.color_of.len()];
        for (c, g) in self.groups.iter().enumerate() {
            for &v in g {
                if seen[v] || self.color_of[v] != c {
                    return false;
                }
                seen[v] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }
}

/// Vertices sorted by descending degree, ties broken by index.
pub fn degree_order(adj: &VertexAdjacency) -> Vec<usize> {
    let mut order: Vec<usize> = (0..adj.num_vertices()).collect();
    order.sort_by(|&a, &b| adj.degree(b).cmp(&adj.degree(a)).then(a.cmp(&b)));
    order
}

/// First-fit greedy coloring visiting vertices in `order`.
pub fn greedy_color(adj: &VertexAdjacency, order: &[usize]) -> ColorPartition {
    const UNSET: usize = usize::MAX;
    let n = adj.num_vertices();
    let mut color_of = vec![UNSET; n];
    let mut taken: Vec<bool> = Vec::new();
    for &v in order {
        taken.clear();
        taken.resize(adj.degree(v) + 1, false);
        for &w in &adj.neighbors[v] {
            let c = color_of[w];
            if c < taken.len() {
                taken[c] = true;
            }
        }
        color_of[v] = taken.iter().position(|&t| !t).unwrap();
    }
    // Vertices missing from `order` still need a color.
    for v in 0..n {
        if color_of[v] == UNSET {
            let mut c = 0;
            while adj.neighbors[v].iter().any(|&w| color_of[w] == c) {
                c += 1;
            }
            color_of[v] = c;
        }
    }
    ColorPartition::from_colors(color_of)
}
