//! Trading-desk reconstruction.
//!
//! Virtual servers that touch the same order id during its lifecycle belong
//! to one desk. The desks are the connected components of the bipartite
//! server/order graph; each desk is named after its lexicographically
//! smallest member server so the assignment does not depend on event order.

use std::collections::{BTreeMap, HashMap};

use super::events::OrderEvent;

/// Disjoint-set forest with path compression and union by rank.
#[derive(Debug, Clone, Default)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn push(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.rank.push(0);
        id
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns true when two distinct sets were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// virtual server -> desk id, for one (dataset, stock) partition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeskMap {
    assignment: BTreeMap<String, String>,
}

impl DeskMap {
    pub fn desk_of(&self, server: &str) -> Option<&str> {
        self.assignment.get(server).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.assignment
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Desks with their sorted member servers.
    pub fn desks(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (server, desk) in &self.assignment {
            out.entry(desk.as_str()).or_default().push(server.as_str());
        }
        out
    }
}

/// Build the desk map from (server, order id) incidences.
pub fn desk_map_from_pairs<'a, I>(pairs: I) -> DeskMap
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut server_ix: HashMap<&str, usize> = HashMap::new();
    let mut servers: Vec<&str> = Vec::new();
    let mut first_server_of_order: HashMap<&str, usize> = HashMap::new();
    let mut uf = UnionFind::default();

    for (server, order) in pairs {
        let s = *server_ix.entry(server).or_insert_with(|| {
            servers.push(server);
            uf.push()
        });
        match first_server_of_order.get(order) {
            Some(&owner) => {
                uf.union(owner, s);
            }
            None => {
                first_server_of_order.insert(order, s);
            }
        }
    }

    let mut canonical: HashMap<usize, &str> = HashMap::new();
    for (i, name) in servers.iter().enumerate() {
        let root = uf.find(i);
        canonical
            .entry(root)
            .and_modify(|cur| {
                if *name < *cur {
                    *cur = name;
                }
            })
            .or_insert(name);
    }
    let assignment = servers
        .iter()
        .enumerate()
        .map(|(i, name)| (name.to_string(), canonical[&uf.find(i)].to_string()))
        .collect();
    DeskMap { assignment }
}

pub fn build_desk_map<'a, I>(events: I) -> DeskMap
where
    I: IntoIterator<Item = &'a OrderEvent>,
{
    desk_map_from_pairs(
        events
            .into_iter()
            .map(|e| (e.virtual_server.as_str(), e.order_id.as_str())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifecycle_table_example() {
        let map = desk_map_from_pairs([("V1", "O1"), ("V2", "O1"), ("V3", "O2"), ("V4", "O4")]);
        let desks = map.desks();
        assert_eq!(desks.len(), 3);
        assert_eq!(desks["V1"], vec!["V1", "V2"]);
        assert_eq!(desks["V3"], vec!["V3"]);
        assert_eq!(desks["V4"], vec!["V4"]);
        assert_eq!(map.desk_of("V2"), Some("V1"));
    }

    #[test]
    fn no_shared_orders_gives_singletons() {
        let pairs: Vec<(String, String)> =
            (0..7).map(|k| (format!("S{k}"), format!("O{k}"))).collect();
        let map = desk_map_from_pairs(pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())));
        assert_eq!(map.desks().len(), 7);
        assert!(map.iter().all(|(s, d)| s == d));
    }

    #[test]
    fn canonical_name_is_min_member_even_when_seen_last() {
        let map = desk_map_from_pairs([("Z", "O1"), ("M", "O1"), ("A", "O2"), ("M", "O2")]);
        assert!(map.iter().all(|(_, d)| d == "A"));
    }

    #[test]
    fn union_find_basics() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert!(uf.union(1, 4));
        assert_eq!(uf.find(0), uf.find(3));
        assert_ne!(uf.find(2), uf.find(0));
    }
}
