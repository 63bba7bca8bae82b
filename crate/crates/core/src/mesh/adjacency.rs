/// One force element touching a vertex, and which of the element's vertex
/// slots the vertex occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub element: usize,
    pub slot: usize,
}

/// Per-vertex incident force elements and neighbor vertices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VertexAdjacency {
    pub elements: Vec<Vec<Incidence>>,
    /// Sorted, deduplicated neighbors of each vertex.
    pub neighbors: Vec<Vec<usize>>,
}

impl VertexAdjacency {
    /// Builds incidence lists from an iterator of element vertex lists;
    /// element ids are assigned in iteration order.
    pub fn build<E, I>(num_vertices: usize, elements: I) -> Self
    where
        E: AsRef<[usize]>,
        I: IntoIterator<Item = E>,
    {
        let mut adj = Self {
            elements: vec![Vec::new(); num_vertices],
            neighbors: vec![Vec::new(); num_vertices],
        };
        for (id, e) in elements.into_iter().enumerate() {
            adj.push_element(id, e.as_ref());
        }
        adj.finish();
        adj
    }

    /// Appends another set of elements, numbering them from `first_id`.
    pub fn extend<E, I>(&mut self, first_id: usize, elements: I)
    where
        E: AsRef<[usize]>,
        I: IntoIterator<Item = E>,
    {
        for (k, e) in elements.into_iter().enumerate() {
            self.push_element(first_id + k, e.as_ref());
        }
        self.finish();
    }

    fn push_element(&mut self, id: usize, verts: &[usize]) {
        for (slot, &v) in verts.iter().enumerate() {
            self.elements[v].push(Incidence { element: id, slot });
            for &w in verts {
                if w != v {
                    self.neighbors[v].push(w);
                }
            }
        }
    }

    fn finish(&mut self) {
        for n in &mut self.neighbors {
            n.sort_unstable();
            n.dedup();
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }
}
