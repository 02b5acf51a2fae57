//! The vertex set X of L_N(q) in canonical order, its Hasse diagram, and the
//! distance and valency checks relative to the zero subspace.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gfspace::{covers, enumerate_subspaces, gaussian_binomial, q_integer, FieldSpec, GaloisField, Subspace};

/// The poset L_N(q) together with its Hasse diagram.
#[derive(Debug, Clone)]
pub struct Geometry {
    field: GaloisField,
    n: usize,
    vertices: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
    cover_up: Vec<Vec<usize>>,
    cover_down: Vec<Vec<usize>>,
    zero_index: usize,
    /// first vertex index of each dimension, plus |X| at the end
    level_start: Vec<usize>,
}

/// A failed structural check: the offending vertex and what was seen there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexWitness {
    pub vertex: usize,
    pub detail: String,
}

impl Geometry {
    pub fn build(spec: &FieldSpec, n: usize, size_limit: usize) -> Result<Self> {
        let field = GaloisField::new(spec.clone());
        let vertices = enumerate_subspaces(&field, n, size_limit)?;
        let index: HashMap<Subspace, usize> = vertices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut level_start = vec![0; n + 2];
        for s in &vertices {
            level_start[s.dim() + 1] += 1;
        }
        for d in 1..level_start.len() {
            level_start[d] += level_start[d - 1];
        }
        // every cover pair joins consecutive dimensions
        let cover_down: Vec<Vec<usize>> = (0..vertices.len())
            .into_par_iter()
            .map(|z| {
                let d = vertices[z].dim();
                if d == 0 {
                    return Ok(Vec::new());
                }
                let mut below = Vec::new();
                for y in level_start[d - 1]..level_start[d] {
                    if covers(&field, &vertices[z], &vertices[y])? {
                        below.push(y);
                    }
                }
                Ok(below)
            })
            .collect::<Result<_>>()?;
        let mut cover_up = vec![Vec::new(); vertices.len()];
        for (z, below) in cover_down.iter().enumerate() {
            for &y in below {
                cover_up[y].push(z);
            }
        }
        Ok(Geometry { field, n, vertices, index, cover_up, cover_down, zero_index: 0, level_start })
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    /// The ambient dimension N, which is also the diameter from the zero vertex.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Subspace] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Subspace {
        &self.vertices[i]
    }

    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn dim(&self, y: usize) -> usize {
        self.vertices[y].dim()
    }

    pub fn zero_index(&self) -> usize {
        self.zero_index
    }

    pub fn top_index(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Vertices covering `y`, in canonical order.
    pub fn cover_up(&self, y: usize) -> &[usize] {
        &self.cover_up[y]
    }

    /// Vertices covered by `y`, in canonical order.
    pub fn cover_down(&self, y: usize) -> &[usize] {
        &self.cover_down[y]
    }

    /// Neighbours of `y` in the Hasse diagram.
    pub fn neighbours(&self, y: usize) -> impl Iterator<Item = usize> + '_ {
        self.cover_down[y].iter().chain(&self.cover_up[y]).copied()
    }

    /// Indices of the vertices at distance `i` from the zero vertex, i.e. of dimension `i`.
    pub fn subconstituent(&self, i: usize) -> Result<std::ops::Range<usize>> {
        if i > self.n {
            return Err(Error::OutOfRange { index: i, max: self.n });
        }
        Ok(self.level_start[i]..self.level_start[i + 1])
    }

    pub fn level(&self, i: usize) -> std::ops::Range<usize> {
        self.level_start[i]..self.level_start[i + 1]
    }

    /// `y <= z` in the poset, decided by walking down the cover relation.
    pub fn le(&self, y: usize, z: usize) -> bool {
        self.down_set(z).contains(&y)
    }

    /// All `w <= z`, ascending.
    pub fn down_set(&self, z: usize) -> Vec<usize> {
        self.closure(z, &self.cover_down)
    }

    /// All `w >= y`, ascending.
    pub fn up_set(&self, y: usize) -> Vec<usize> {
        self.closure(y, &self.cover_up)
    }

    fn closure(&self, start: usize, step: &[Vec<usize>]) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &step[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.cover_up.iter().map(Vec::len).sum()
    }

    /// Undirected edges `(lower, upper)`, ordered by lower then upper index.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.cover_up.iter().enumerate().flat_map(|(y, ups)| ups.iter().map(move |&z| (y, z))).collect()
    }

    /// One `lower upper` pair per line.
    pub fn edge_list(&self) -> String {
        self.edges().iter().map(|(a, b)| format!("{a} {b}\n")).collect()
    }

    /// Breadth-first distances from the zero vertex (`usize::MAX` if unreachable).
    pub fn bfs_distances(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[self.zero_index] = 0;
        let mut queue = VecDeque::from([self.zero_index]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbours(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// BFS distance from zero equals dimension at every vertex, and every edge
    /// joins an even-dimensional vertex to an odd-dimensional one.
    pub fn verify_distance_equals_dimension(&self) -> std::result::Result<(), VertexWitness> {
        let dist = self.bfs_distances();
        for (y, &d) in dist.iter().enumerate() {
            if d != self.dim(y) {
                let shown = if d == usize::MAX { "unreachable".to_string() } else { d.to_string() };
                return Err(VertexWitness { vertex: y, detail: format!("distance {shown}, dimension {}", self.dim(y)) });
            }
        }
        for (y, z) in self.edges() {
            if (self.dim(y) + self.dim(z)).is_multiple_of(2) {
                return Err(VertexWitness { vertex: y, detail: format!("edge to {z} within one parity class") });
            }
        }
        Ok(())
    }

    /// Each vertex of dimension i covers `[i]_q` vertices and is covered by `[N-i]_q`.
    pub fn verify_local_valencies(&self) -> std::result::Result<(), VertexWitness> {
        let q = self.q();
        for y in 0..self.len() {
            let i = self.dim(y) as u32;
            let (down, up) = (self.cover_down[y].len() as u128, self.cover_up[y].len() as u128);
            let (want_down, want_up) = (q_integer(i, q), q_integer(self.n as u32 - i, q));
            if down != want_down || up != want_up {
                return Err(VertexWitness {
                    vertex: y,
                    detail: format!("valencies (down {down}, up {up}), expected ({want_down}, {want_up})"),
                });
            }
        }
        Ok(())
    }

    /// `|Gamma_i(0)| = binom(N, i)_q` for every i.
    pub fn verify_sphere_sizes(&self) -> std::result::Result<(), VertexWitness> {
        let dist = self.bfs_distances();
        for i in 0..=self.n {
            let count = dist.iter().filter(|&&d| d == i).count() as u128;
            let want = gaussian_binomial(self.n as u32, i as i64, self.q());
            if count != want {
                let vertex = self.level_start[i];
                return Err(VertexWitness { vertex, detail: format!("sphere {i} has {count} vertices, expected {want}") });
            }
        }
        Ok(())
    }
}
