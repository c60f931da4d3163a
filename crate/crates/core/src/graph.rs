//! Attributed undirected networks over a fixed node set.
//!
//! Nodes are dense indices `0..N`. Edges are only ever added, never removed,
//! and each node carries a feature vector together with its social DNA
//! (a preference sign and a preference weight per feature).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index in `[0, N)`.
pub type NodeId = usize;

/// Feature vector plus per-feature preference sign and weight.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeAttributes {
    pub features: Vec<f64>,
    pub preference_signs: Vec<i8>,
    pub preference_weights: Vec<f64>,
}

impl NodeAttributes {
    pub fn new(features: Vec<f64>, preference_signs: Vec<i8>, preference_weights: Vec<f64>) -> Result<Self> {
        let attrs = Self {
            features,
            preference_signs,
            preference_weights,
        };
        attrs.validate()?;
        Ok(attrs)
    }

    /// Features with a neutral sDNA: sign `+1`, weight `0`.
    pub fn from_features(features: Vec<f64>) -> Result<Self> {
        let len = features.len();
        Self::new(features, vec![1; len], vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.features.len();
        if self.preference_signs.len() != f || self.preference_weights.len() != f {
            return Err(Error::validation(format!(
                "attribute vectors differ in length: {} features, {} signs, {} weights",
                f,
                self.preference_signs.len(),
                self.preference_weights.len()
            )));
        }
        if let Some(x) = self.features.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::validation(format!("feature value {x} outside [0, 1]")));
        }
        if let Some(s) = self.preference_signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::validation(format!("preference sign {s} is not -1 or +1")));
        }
        if let Some(w) = self.preference_weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::validation(format!("preference weight {w} outside [0, 1]")));
        }
        Ok(())
    }
}

/// Undirected simple graph on a fixed node set with per-node attributes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributedNetwork {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
    attributes: Vec<NodeAttributes>,
    /// Original label of each node as it appeared in the input files.
    labels: Vec<String>,
    feature_names: Vec<String>,
}

impl AttributedNetwork {
    /// Edgeless network with `n` nodes and no features.
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
            attributes: vec![NodeAttributes::default(); n],
            labels: (0..n).map(|i| i.to_string()).collect(),
            feature_names: Vec::new(),
        }
    }

    /// Edgeless network whose node count is given by `attributes`.
    pub fn with_attributes(attributes: Vec<NodeAttributes>) -> Result<Self> {
        let mut net = Self::empty(attributes.len());
        net.set_attributes(attributes)?;
        Ok(net)
    }

    /// Builds a network from dense edge pairs.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut net = Self::empty(n);
        for &(i, j) in edges {
            net.add_edge(i, j)?;
        }
        Ok(net)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `N(N-1)/2`.
    pub fn max_edges(&self) -> usize {
        let n = self.node_count();
        n * n.saturating_sub(1) / 2
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count == self.max_edges()
    }

    pub fn feature_count(&self) -> usize {
        self.attributes.first().map_or(0, NodeAttributes::len)
    }

    pub fn attributes(&self) -> &[NodeAttributes] {
        &self.attributes
    }

    pub fn attribute(&self, i: NodeId) -> Result<&NodeAttributes> {
        self.check(i)?;
        Ok(&self.attributes[i])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Replaces every node's attributes. All vectors must share one length.
    pub fn set_attributes(&mut self, attributes: Vec<NodeAttributes>) -> Result<()> {
        if attributes.len() != self.node_count() {
            return Err(Error::validation(format!(
                "{} attribute rows for {} nodes",
                attributes.len(),
                self.node_count()
            )));
        }
        let width = attributes.first().map_or(0, NodeAttributes::len);
        for (i, a) in attributes.iter().enumerate() {
            a.validate().map_err(|e| Error::validation(format!("node {i}: {e}")))?;
            if a.len() != width {
                return Err(Error::validation(format!(
                    "node {i} has {} features, expected {width}",
                    a.len()
                )));
            }
        }
        if self.feature_names.len() != width {
            self.feature_names = (1..=width).map(|k| format!("f{k}")).collect();
        }
        self.attributes = attributes;
        Ok(())
    }

    pub fn set_feature_names(&mut self, names: Vec<String>) -> Result<()> {
        if names.len() != self.feature_count() {
            return Err(Error::validation(format!(
                "{} feature names for {} features",
                names.len(),
                self.feature_count()
            )));
        }
        self.feature_names = names;
        Ok(())
    }

    fn check(&self, i: NodeId) -> Result<()> {
        if i >= self.node_count() {
            return Err(Error::validation(format!(
                "node id {i} out of range for {} nodes",
                self.node_count()
            )));
        }
        Ok(())
    }

    /// Inserts the undirected edge `{i, j}`. Self-loops and duplicates are rejected.
    pub fn add_edge(&mut self, i: NodeId, j: NodeId) -> Result<()> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::validation(format!("self-loop ({i}, {i})")));
        }
        let pos = match self.adjacency[i].binary_search(&j) {
            Ok(_) => return Err(Error::validation(format!("duplicate edge ({i}, {j})"))),
            Err(pos) => pos,
        };
        self.adjacency[i].insert(pos, j);
        let pos = self.adjacency[j].binary_search(&i).unwrap_err();
        self.adjacency[j].insert(pos, i);
        self.edge_count += 1;
        Ok(())
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        i < self.node_count() && self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Sorted neighbour list.
    pub fn neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: NodeId) -> Result<usize> {
        self.check(i)?;
        Ok(self.adjacency[i].len())
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nbrs)| nbrs.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Hop distance from `source` to every node; `None` marks unreachable nodes.
    pub fn bfs_distances(&self, source: NodeId) -> Result<Vec<Option<usize>>> {
        self.check(source)?;
        Ok(self.bfs_unchecked(source))
    }

    pub(crate) fn bfs_unchecked(&self, source: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All-pairs hop distances, one BFS per source.
    pub fn all_pairs_distances(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.node_count()).map(|s| self.bfs_unchecked(s)).collect()
    }

    /// Edge list text with dense ids, one `i j` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    /// Attribute table (`node,f1,...`) with dense ids.
    pub fn attributes_csv(&self) -> String {
        let mut out = String::from("node");
        for name in &self.feature_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, a) in self.attributes.iter().enumerate() {
            let _ = write!(out, "{i}");
            for f in &a.features {
                let _ = write!(out, ",{f}");
            }
            out.push('\n');
        }
        out
    }
}

/// Parses an edge list and optional attribute table into a validated network.
///
/// Node labels are remapped to dense ids: numerically when every label is an
/// integer, lexicographically otherwise. When `declared_nodes` exceeds the
/// number of labels seen, isolated nodes with the smallest unused integer
/// labels are appended.
pub fn load_network(
    edge_list_text: &str,
    attribute_table: Option<&str>,
    declared_nodes: Option<usize>,
) -> Result<AttributedNetwork> {
    let raw_edges = parse_edge_list(edge_list_text)?;
    let table = attribute_table.map(parse_attribute_table).transpose()?;

    let mut labels: BTreeSet<String> = BTreeSet::new();
    for (_, a, b) in &raw_edges {
        labels.insert(a.clone());
        labels.insert(b.clone());
    }
    if let Some(t) = &table {
        labels.extend(t.rows.iter().map(|(label, _)| label.clone()));
    }
    let mut labels: Vec<String> = labels.into_iter().collect();
    if let Some(n) = declared_nodes {
        if labels.len() > n {
            return Err(Error::validation(format!(
                "{} distinct node labels exceed the declared node count {n}",
                labels.len()
            )));
        }
        let mut next = 0u64;
        while labels.len() < n {
            let candidate = next.to_string();
            if !labels.contains(&candidate) {
                labels.push(candidate);
            }
            next += 1;
        }
    }
    let numeric: Option<Vec<i64>> = labels.iter().map(|l| l.parse::<i64>().ok()).collect();
    if let Some(values) = numeric {
        let mut paired: Vec<(i64, String)> = values.into_iter().zip(labels).collect();
        paired.sort();
        labels = paired.into_iter().map(|(_, l)| l).collect();
    } else {
        labels.sort();
    }
    let index: HashMap<&str, NodeId> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();

    let mut net = AttributedNetwork::empty(labels.len());
    for (line, a, b) in &raw_edges {
        let (i, j) = (index[a.as_str()], index[b.as_str()]);
        if i == j {
            return Err(Error::validation(format!("line {line}: self-loop ({a}, {b})")));
        }
        if net.has_edge(i, j) {
            return Err(Error::validation(format!("line {line}: duplicate edge ({a}, {b})")));
        }
        net.add_edge(i, j)?;
    }

    if let Some(table) = table {
        let mut rows: Vec<Option<Vec<f64>>> = vec![None; labels.len()];
        for (label, values) in table.rows {
            let slot = &mut rows[index[label.as_str()]];
            if slot.is_some() {
                return Err(Error::validation(format!(
                    "attribute row for node {label} appears twice"
                )));
            }
            *slot = Some(values);
        }
        let mut attributes = Vec::with_capacity(labels.len());
        for (i, row) in rows.into_iter().enumerate() {
            let values =
                row.ok_or_else(|| Error::validation(format!("attribute row missing for node {}", labels[i])))?;
            attributes.push(
                NodeAttributes::from_features(values)
                    .map_err(|e| Error::validation(format!("node {}: {e}", labels[i])))?,
            );
        }
        net.set_attributes(attributes)?;
        net.set_feature_names(table.columns)?;
    }
    net.labels = labels;
    Ok(net)
}

fn parse_edge_list(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two node ids, found {:?}", line),
            });
        }
        for t in &tokens {
            if t.parse::<i64>().is_err() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("node id {t:?} is not an integer"),
                });
            }
        }
        edges.push((line_no, tokens[0].to_string(), tokens[1].to_string()));
    }
    Ok(edges)
}

struct AttributeTable {
    columns: Vec<String>,
    rows: Vec<(String, Vec<f64>)>,
}

fn parse_attribute_table(text: &str) -> Result<AttributeTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if header.get(0) != Some("node") {
        return Err(Error::Parse {
            line: 1,
            message: "attribute table header must start with \"node\"".into(),
        });
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let label = record.get(0).unwrap_or("").to_string();
        if label.parse::<i64>().is_err() {
            return Err(Error::Parse {
                line,
                message: format!("node id {label:?} is not an integer"),
            });
        }
        let values = record
            .iter()
            .skip(1)
            .map(|v| {
                v.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("feature value {v:?} is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((label, values));
    }
    Ok(AttributeTable { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_path() {
        let net = load_network("0 1\n1 2", None, None).unwrap();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn declared_node_count_pads_isolated_nodes() {
        let net = load_network("", None, Some(3)).unwrap();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.edge_count(), 0);
    }

    #[test]
    fn comments_and_commas() {
        let net = load_network("# header\n1,2\n2 3 # trailing\n\n", None, None).unwrap();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.labels(), &["1", "2", "3"]);
        assert!(net.has_edge(0, 1) && net.has_edge(1, 2));
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let net = load_network("10 2\n2 9", None, None).unwrap();
        assert_eq!(net.labels(), &["2", "9", "10"]);
        assert!(net.has_edge(0, 2));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = load_network("0 1\n1 2 3\n", None, None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = load_network("0 1\nx y\n", None, None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn self_loop_and_duplicate_rejected_on_load() {
        let err = load_network("0 1\n1 1\n", None, None).unwrap_err();
        assert!(err.to_string().contains("self-loop (1, 1)"), "{err}");
        let err = load_network("0 1\n1 0\n", None, None).unwrap_err();
        assert!(err.to_string().contains("duplicate edge (1, 0)"), "{err}");
    }

    #[test]
    fn missing_attribute_row_is_validation_error() {
        let err = load_network("0 1\n1 2", Some("node,f1\n0,1\n1,0\n"), None).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("node 2"), "{err}");
    }

    #[test]
    fn attribute_table_ingests_binary_as_reals() {
        let net = load_network("0 1", Some("node,club\n0,1\n1,0\n"), None).unwrap();
        assert_eq!(net.feature_count(), 1);
        assert_eq!(net.attributes()[0].features, vec![1.0]);
        assert_eq!(net.attributes()[1].features, vec![0.0]);
        assert_eq!(net.feature_names(), &["club"]);
    }

    #[test]
    fn out_of_range_feature_rejected() {
        let err = load_network("0 1", Some("node,f1\n0,2\n1,0\n"), None).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn add_edge_is_unordered_and_rejects_duplicates() {
        let mut net = AttributedNetwork::empty(2);
        net.add_edge(1, 0).unwrap();
        assert!(net.has_edge(0, 1));
        assert!(net.add_edge(0, 1).is_err());
        assert!(net.add_edge(0, 0).is_err());
        assert!(net.add_edge(0, 5).is_err());
        assert_eq!(net.edge_count(), 1);
    }

    #[test]
    fn degree_cases() {
        let star = AttributedNetwork::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(star.degree(0).unwrap(), 4);
        let iso = AttributedNetwork::empty(3);
        assert_eq!(iso.degree(2).unwrap(), 0);
        assert!(iso.degree(3).is_err());
    }

    #[test]
    fn bfs_path_and_components() {
        let path = AttributedNetwork::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.bfs_distances(0).unwrap(), vec![Some(0), Some(1), Some(2)]);
        let split = AttributedNetwork::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(split.bfs_distances(0).unwrap(), vec![Some(0), Some(1), None, None]);
        assert!(split.bfs_distances(9).is_err());
    }

    #[test]
    fn node_attributes_invariants() {
        assert!(NodeAttributes::new(vec![0.5], vec![0], vec![0.5]).is_err());
        assert!(NodeAttributes::new(vec![0.5], vec![1], vec![1.5]).is_err());
        assert!(NodeAttributes::new(vec![0.5, 0.1], vec![1], vec![0.5]).is_err());
        assert!(NodeAttributes::new(vec![0.5], vec![-1], vec![0.5]).is_ok());
    }

    #[test]
    fn mixed_width_attributes_rejected() {
        let a = NodeAttributes::from_features(vec![1.0]).unwrap();
        let b = NodeAttributes::from_features(vec![]).unwrap();
        assert!(AttributedNetwork::with_attributes(vec![a, b]).is_err());
    }
}
