//! Undirected graph storage, SNAP-style dataset loaders and hop-distance
//! neighborhoods.
//!
//! Node ids are dense (`0..node_count`). Graphs loaded from files keep the
//! mapping back to the original ids so results can be reported in the
//! dataset's own numbering.

use std::collections::{HashMap, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Immutable undirected graph in compressed adjacency form.
///
/// A self-loop appears once in its node's adjacency list and contributes 1 to
/// the degree, so `degree(v) == neighbors(v).len()` for every node.
#[derive(Debug, Clone)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    ids: Option<IdMap>,
}

#[derive(Debug, Clone)]
struct IdMap {
    external: Vec<u64>,
    dense: HashMap<u64, NodeId>,
}

impl Graph {
    /// Builds a graph over `node_count` nodes. Edges are symmetrized and
    /// duplicates collapsed.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); node_count];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= node_count {
                    return Err(Error::NodeOutOfRange(w, node_count));
                }
            }
            adjacency[u].push(v);
            if u != v {
                adjacency[v].push(u);
            }
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut list in adjacency {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        Ok(Graph { offsets, targets, ids: None })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of distinct undirected edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        let loops = self.loop_count();
        (self.targets.len() - loops) / 2 + loops
    }

    pub fn loop_count(&self) -> usize {
        (0..self.node_count()).filter(|&v| self.has_edge(v, v)).count()
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Sum of all degrees.
    pub fn volume(&self) -> usize {
        self.targets.len()
    }

    /// Each undirected edge once, as `(u, v)` with `u <= v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count())
            .flat_map(move |u| self.neighbors(u).iter().copied().filter(move |&v| v >= u).map(move |v| (u, v)))
    }

    /// Original id of a dense node id.
    pub fn external_id(&self, v: NodeId) -> u64 {
        match &self.ids {
            Some(map) => map.external[v],
            None => v as u64,
        }
    }

    /// Dense id of an original id, if present.
    pub fn dense_id(&self, external: u64) -> Option<NodeId> {
        match &self.ids {
            Some(map) => map.dense.get(&external).copied(),
            None => usize::try_from(external).ok().filter(|&v| v < self.node_count()),
        }
    }

    /// Rebuilds the graph from a new edge list while keeping this graph's
    /// node set and id mapping.
    pub fn with_edges<I>(&self, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Graph::from_edges(self.node_count(), edges)?;
        g.ids = self.ids.clone();
        Ok(g)
    }
}

/// Sorted, duplicate-free set of dense node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(Vec<NodeId>);

impl NodeSet {
    pub fn new() -> Self {
        NodeSet(Vec::new())
    }

    /// Validates every id against `node_count`.
    pub fn checked<I: IntoIterator<Item = NodeId>>(ids: I, node_count: usize) -> Result<Self> {
        let set: NodeSet = ids.into_iter().collect();
        match set.0.last() {
            Some(&max) if max >= node_count => Err(Error::NodeOutOfRange(max, node_count)),
            _ => Ok(set),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = NodeId> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn first(&self) -> Option<NodeId> {
        self.0.first().copied()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        NodeSet(out)
    }

    pub fn intersection_len(&self, other: &NodeSet) -> usize {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().filter(|&v| large.contains(v)).count()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        let mut ids: Vec<NodeId> = iter.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        NodeSet(ids)
    }
}

impl From<Vec<NodeId>> for NodeSet {
    fn from(ids: Vec<NodeId>) -> Self {
        ids.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = NodeId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, NodeId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Ground-truth communities, in file order.
#[derive(Debug, Clone, Default)]
pub struct CommunitySet {
    pub communities: Vec<NodeSet>,
    /// Blank lines skipped while loading.
    pub skipped_empty: usize,
}

impl CommunitySet {
    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &NodeSet> {
        self.communities.iter()
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn parse_id(token: &str, line: usize) -> Result<u64> {
    if token.starts_with('-') && token[1..].parse::<u64>().is_ok() {
        return Err(Error::NegativeId { line, token: token.to_string() });
    }
    token.parse::<u64>().map_err(|_| Error::Parse { line, message: format!("invalid node id {token:?}") })
}

/// Loads a whitespace-separated edge list (`u v` per line, `#` comments).
///
/// Ids are densified in ascending order of their original value.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let reader = open(path)?;
    let mut raw = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse { line: line_no, message: format!("expected two node ids, got {trimmed:?}") });
        };
        raw.push((parse_id(a, line_no)?, parse_id(b, line_no)?));
    }

    let mut external: Vec<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
    external.sort_unstable();
    external.dedup();
    let dense: HashMap<u64, NodeId> = external.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut g = Graph::from_edges(external.len(), raw.iter().map(|(a, b)| (dense[a], dense[b])))?;
    g.ids = Some(IdMap { external, dense });
    Ok(g)
}

/// Writes `g` as an edge list in original ids, each edge once.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# nodes: {} edges: {}", g.node_count(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{}\t{}", g.external_id(u), g.external_id(v))?;
    }
    Ok(())
}

/// Loads up to `max_count` communities (one per line, original ids).
pub fn load_communities(path: impl AsRef<Path>, g: &Graph, max_count: usize) -> Result<CommunitySet> {
    let path = path.as_ref();
    let reader = open(path)?;
    let mut set = CommunitySet::default();
    for (index, line) in reader.lines().enumerate() {
        if set.communities.len() >= max_count {
            break;
        }
        let line_no = index + 1;
        let line = line.map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            set.skipped_empty += 1;
            continue;
        }
        let members = trimmed
            .split_whitespace()
            .map(|token| {
                let id = parse_id(token, line_no)?;
                g.dense_id(id).ok_or(Error::UnknownNode { line: line_no, id })
            })
            .collect::<Result<NodeSet>>()?;
        set.communities.push(members);
    }
    Ok(set)
}

/// All nodes at hop distance at most `max_hops` from some node of `sources`.
pub fn nodes_within_distance(g: &Graph, sources: &NodeSet, max_hops: usize) -> NodeSet {
    let mut dist: HashMap<NodeId, usize> = sources.iter().map(|v| (v, 0)).collect();
    let mut queue: VecDeque<NodeId> = sources.iter().collect();
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        if du == max_hops {
            continue;
        }
        for &w in g.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist.into_keys().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn degrees(g: &Graph) -> Vec<usize> {
        (0..g.node_count()).map(|v| g.degree(v)).collect()
    }

    #[test]
    fn path_file() {
        let f = write_tmp("0 1\n1 2");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(degrees(&g), vec![1, 2, 1]);
    }

    #[test]
    fn duplicates_and_comments_collapse() {
        let f = write_tmp("# c\n0 1\n1 0\n0 1");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(degrees(&g), vec![1, 1]);
    }

    #[test]
    fn sparse_ids_are_densified() {
        let f = write_tmp("10\t700\n700 42\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.dense_id(42), Some(1));
        assert_eq!(g.external_id(2), 700);
        assert_eq!(g.dense_id(5), None);
        assert!(g.has_edge(0, 2));
    }

    #[test]
    fn self_loop_stored_once() {
        let f = write_tmp("3 3\n3 3\n3 4\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(degrees(&g), vec![2, 1]);
        assert_eq!(g.loop_count(), 1);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn malformed_line_reports_number() {
        let f = write_tmp("0 1\n# x\n1\n");
        match load_edge_list(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let f = write_tmp("0 1 2\n");
        assert!(matches!(load_edge_list(f.path()), Err(Error::Parse { line: 1, .. })));
        let f = write_tmp("0 x\n");
        assert!(matches!(load_edge_list(f.path()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn negative_id_rejected() {
        let f = write_tmp("0 1\n-3 1\n");
        assert!(matches!(load_edge_list(f.path()), Err(Error::NegativeId { line: 2, .. })));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(load_edge_list("/nonexistent/graph.txt"), Err(Error::Io { .. })));
    }

    #[test]
    fn communities_with_cap() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let f = write_tmp("0 1 2\n3 4\n");
        let c = load_communities(f.path(), &g, 5).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.communities[0].as_slice(), &[0, 1, 2]);
        assert_eq!(c.communities[1].as_slice(), &[3, 4]);
        let c = load_communities(f.path(), &g, 1).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.communities[0].as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn communities_skip_blank_and_reject_unknown() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let f = write_tmp("0 1\n\n  \n3\t4\n");
        let c = load_communities(f.path(), &g, 10).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.skipped_empty, 2);

        let f = write_tmp("0 1\n2 9\n");
        match load_communities(f.path(), &g, 10) {
            Err(Error::UnknownNode { line, id }) => assert_eq!((line, id), (2, 9)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn communities_use_id_map() {
        let f = write_tmp("100 200\n200 300\n");
        let g = load_edge_list(f.path()).unwrap();
        let cf = write_tmp("300 100\n");
        let c = load_communities(cf.path(), &g, 10).unwrap();
        assert_eq!(c.communities[0].as_slice(), &[0, 2]);
    }

    #[test]
    fn ball_on_path() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let c: NodeSet = [0].into_iter().collect();
        assert_eq!(nodes_within_distance(&g, &c, 2).as_slice(), &[0, 1, 2]);
        assert_eq!(nodes_within_distance(&g, &c, 0), c);
        assert!(nodes_within_distance(&g, &NodeSet::new(), 3).is_empty());
    }

    #[test]
    fn ball_stays_in_component() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let c: NodeSet = [0, 1, 2].into_iter().collect();
        // brute force: every node reachable in <= 1 hop
        let expected: NodeSet = (0..6).filter(|&v| c.contains(v) || c.iter().any(|u| g.has_edge(u, v))).collect();
        assert_eq!(nodes_within_distance(&g, &c, 1), expected);
        assert_eq!(expected, c);
    }

    #[test]
    fn node_set_ops() {
        let a: NodeSet = vec![5, 1, 3, 1].into();
        let b: NodeSet = vec![3, 4].into();
        assert_eq!(a.as_slice(), &[1, 3, 5]);
        assert_eq!(a.union(&b).as_slice(), &[1, 3, 4, 5]);
        assert_eq!(a.intersection_len(&b), 1);
        assert!(NodeSet::checked([0, 7], 7).is_err());
        assert!(NodeSet::checked([0, 6], 7).is_ok());
    }

    #[test]
    fn out_of_range_edge() {
        assert!(matches!(Graph::from_edges(2, [(0, 2)]), Err(Error::NodeOutOfRange(2, 2))));
    }
}
