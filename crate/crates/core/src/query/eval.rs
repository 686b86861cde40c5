//! In-memory BGP evaluation with hash joins.

use std::collections::{BTreeSet, HashMap};

use crate::rdf_io::{EncodedTriple, NodeId, PredId};

use super::ast::{Query, Slot, TriplePattern};

/// Triples grouped by predicate. Positions refer to the slice the index
/// was built from.
#[derive(Debug, Clone, Default)]
pub struct TripleIndex {
    triples: Vec<EncodedTriple>,
    by_pred: HashMap<PredId, Vec<u32>>,
}

impl TripleIndex {
    pub fn new(triples: &[EncodedTriple]) -> Self {
        Self::from_vec(triples.to_vec())
    }

    pub fn from_vec(triples: Vec<EncodedTriple>) -> Self {
        assert!(triples.len() <= u32::MAX as usize, "too many triples for one index");
        let mut by_pred: HashMap<PredId, Vec<u32>> = HashMap::new();
        for (i, t) in triples.iter().enumerate() {
            by_pred.entry(t.p).or_default().push(i as u32);
        }
        Self { triples, by_pred }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triple(&self, pos: u32) -> EncodedTriple {
        self.triples[pos as usize]
    }

    pub fn triples(&self) -> &[EncodedTriple] {
        &self.triples
    }

    /// Positions of triples matching the pattern's constants and repeated
    /// variables.
    pub fn matches(&self, pattern: &TriplePattern) -> Vec<u32> {
        if !pattern.is_satisfiable() {
            return Vec::new();
        }
        let accept = |t: &EncodedTriple| slot_ok(&pattern.s, t.s) && slot_ok(&pattern.o, t.o) && repeats_ok(pattern, t);
        match pattern.p {
            Slot::Const(p) => self
                .by_pred
                .get(&p)
                .map(|ids| ids.iter().copied().filter(|&i| accept(&self.triples[i as usize])).collect())
                .unwrap_or_default(),
            _ => (0..self.triples.len() as u32).filter(|&i| accept(&self.triples[i as usize])).collect(),
        }
    }

    pub fn match_count(&self, pattern: &TriplePattern) -> usize {
        match (&pattern.s, &pattern.p, &pattern.o) {
            (Slot::Var(a), Slot::Const(p), Slot::Var(b)) if a != b => self.by_pred.get(p).map_or(0, Vec::len),
            _ => self.matches(pattern).len(),
        }
    }
}

fn slot_ok(slot: &Slot<NodeId>, v: NodeId) -> bool {
    match slot {
        Slot::Const(c) => *c == v,
        Slot::Var(_) => true,
        Slot::Absent(_) => false,
    }
}

fn repeats_ok(p: &TriplePattern, t: &EncodedTriple) -> bool {
    match (p.s.var(), p.o.var()) {
        (Some(a), Some(b)) if a == b => t.s == t.o,
        _ => true,
    }
}

/// A relation column: a query variable, or a payload tag carried through
/// joins without taking part in them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    Var(usize),
    Tag(usize),
}

/// Rows of values; variable columns hold node or predicate ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relation {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<u64>>,
}

impl Relation {
    /// The relation with one empty row, the identity for joins.
    pub fn unit() -> Self {
        Self { columns: Vec::new(), rows: vec![Vec::new()] }
    }

    /// Bindings of the pattern's variables for the triples at `positions`.
    /// With `tag = Some(i)`, an extra `Tag(i)` column stores each position.
    pub fn from_matches(pattern: &TriplePattern, index: &TripleIndex, positions: &[u32], tag: Option<usize>) -> Self {
        let vars = pattern.vars();
        let mut columns: Vec<Column> = vars.iter().map(|&v| Column::Var(v)).collect();
        if let Some(t) = tag {
            columns.push(Column::Tag(t));
        }
        let rows = positions
            .iter()
            .map(|&pos| {
                let t = index.triple(pos);
                let mut row: Vec<u64> = vars.iter().map(|&v| value_of(pattern, &t, v)).collect();
                if tag.is_some() {
                    row.push(pos as u64);
                }
                row
            })
            .collect();
        Self { columns, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn position(&self, c: Column) -> Option<usize> {
        self.columns.iter().position(|&x| x == c)
    }

    /// Variables present in both relations, in `self`'s column order.
    pub fn shared_vars(&self, other: &Relation) -> Vec<usize> {
        self.columns
            .iter()
            .filter_map(|c| match c {
                Column::Var(v) if other.columns.contains(c) => Some(*v),
                _ => None,
            })
            .collect()
    }

    /// Values of `vars` in `row`.
    pub fn key(&self, row: &[u64], vars: &[usize]) -> Vec<u64> {
        vars.iter().map(|&v| row[self.position(Column::Var(v)).expect("join variable")]).collect()
    }

    /// Natural join on shared variables; a cartesian product when none.
    pub fn join(&self, other: &Relation) -> Relation {
        let shared = self.shared_vars(other);
        let left_pos: Vec<usize> = shared.iter().map(|&v| self.position(Column::Var(v)).unwrap()).collect();
        let right_pos: Vec<usize> = shared.iter().map(|&v| other.position(Column::Var(v)).unwrap()).collect();
        let right_extra: Vec<usize> =
            (0..other.columns.len()).filter(|i| !self.columns.contains(&other.columns[*i])).collect();
        let mut columns = self.columns.clone();
        columns.extend(right_extra.iter().map(|&i| other.columns[i]));

        let mut table: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        for (i, row) in other.rows.iter().enumerate() {
            table.entry(right_pos.iter().map(|&p| row[p]).collect()).or_default().push(i);
        }
        let mut rows = Vec::new();
        for row in &self.rows {
            let key: Vec<u64> = left_pos.iter().map(|&p| row[p]).collect();
            if let Some(hits) = table.get(&key) {
                for &i in hits {
                    let r = &other.rows[i];
                    let mut out = row.clone();
                    out.extend(right_extra.iter().map(|&p| r[p]));
                    rows.push(out);
                }
            }
        }
        Relation { columns, rows }
    }

    /// Distinct projections onto `vars`.
    pub fn project(&self, vars: &[usize]) -> BTreeSet<Vec<u64>> {
        let pos: Vec<usize> =
            vars.iter().map(|&v| self.position(Column::Var(v)).expect("projected variable bound")).collect();
        self.rows.iter().map(|r| pos.iter().map(|&p| r[p]).collect()).collect()
    }
}

fn value_of(p: &TriplePattern, t: &EncodedTriple, v: usize) -> u64 {
    if p.s.var() == Some(v) {
        t.s.0
    } else if p.p.var() == Some(v) {
        t.p.0
    } else {
        t.o.0
    }
}

/// Pattern order used when joining.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JoinOrder {
    /// Left to right as written.
    #[default]
    AsWritten,
    /// Smallest match count first, then repeatedly the smallest pattern
    /// sharing a variable with those already joined. Ties go to the lower index.
    Greedy,
}

/// Join order for `query` given each pattern's match count.
pub fn plan_order(query: &Query, order: JoinOrder, counts: &[usize]) -> Vec<usize> {
    let n = query.patterns.len();
    if order == JoinOrder::AsWritten {
        return (0..n).collect();
    }
    let vars: Vec<Vec<usize>> = query.patterns.iter().map(TriplePattern::vars).collect();
    let mut bound: Vec<usize> = Vec::new();
    let mut used = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let connected = |i: usize| vars[i].iter().any(|v| bound.contains(v));
        let pick = (0..n)
            .filter(|&i| !used[i])
            .min_by_key(|&i| (out.is_empty() || !connected(i), counts[i], i))
            .unwrap();
        used[pick] = true;
        bound.extend(vars[pick].iter().copied());
        out.push(pick);
    }
    out
}

/// Distinct projected solutions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultSet {
    pub vars: Vec<String>,
    pub rows: BTreeSet<Vec<u64>>,
}

impl ResultSet {
    pub fn empty_for(query: &Query) -> Self {
        Self { vars: query.projection.iter().map(|&v| query.vars[v].clone()).collect(), rows: BTreeSet::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn extend(&mut self, other: ResultSet) {
        self.rows.extend(other.rows);
    }
}

/// Evaluates `query` over the triples of `index`.
pub fn evaluate(query: &Query, index: &TripleIndex, order: JoinOrder) -> ResultSet {
    let mut out = ResultSet::empty_for(query);
    let matches: Vec<Vec<u32>> = query.patterns.iter().map(|p| index.matches(p)).collect();
    if matches.iter().any(Vec::is_empty) {
        return out;
    }
    let counts: Vec<usize> = matches.iter().map(Vec::len).collect();
    let mut acc = Relation::unit();
    for i in plan_order(query, order, &counts) {
        acc = acc.join(&Relation::from_matches(&query.patterns[i], index, &matches[i], None));
        if acc.is_empty() {
            return out;
        }
    }
    out.rows = acc.project(&query.projection);
    out
}

/// Correctness oracle: left-to-right evaluation over all triples.
pub fn evaluate_global(query: &Query, triples: &[EncodedTriple]) -> ResultSet {
    evaluate(query, &TripleIndex::new(triples), JoinOrder::AsWritten)
}

/// Matches of a single pattern as a relation.
pub fn match_pattern(pattern: &TriplePattern, index: &TripleIndex) -> Relation {
    Relation::from_matches(pattern, index, &index.matches(pattern), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::VarKind;

    fn t(s: u64, p: u64, o: u64) -> EncodedTriple {
        EncodedTriple::new(s, p, o)
    }

    fn pat(s: Slot<NodeId>, p: u64, o: Slot<NodeId>) -> TriplePattern {
        TriplePattern { s, p: Slot::Const(PredId(p)), o }
    }

    fn query(nvars: usize, projection: Vec<usize>, patterns: Vec<TriplePattern>) -> Query {
        Query {
            vars: (0..nvars).map(|i| format!("v{i}")).collect(),
            var_kinds: vec![VarKind::Node; nvars],
            projection,
            patterns,
        }
    }

    #[test]
    fn single_pattern() {
        let q = query(2, vec![0, 1], vec![pat(Slot::Var(0), 0, Slot::Var(1))]);
        let r = evaluate_global(&q, &[t(0, 0, 1)]);
        assert_eq!(r.rows.into_iter().collect::<Vec<_>>(), vec![vec![0, 1]]);
    }

    #[test]
    fn chain_one_row() {
        let q = query(
            4,
            vec![0, 1, 2],
            vec![
                pat(Slot::Var(0), 0, Slot::Var(1)),
                pat(Slot::Var(1), 1, Slot::Var(2)),
                pat(Slot::Var(2), 2, Slot::Var(3)),
            ],
        );
        let data = [t(0, 0, 1), t(1, 1, 2), t(2, 2, 3), t(5, 0, 6)];
        let r = evaluate_global(&q, &data);
        assert_eq!(r.rows.into_iter().collect::<Vec<_>>(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn repeated_variable_and_constants() {
        let q = query(1, vec![0], vec![pat(Slot::Var(0), 0, Slot::Var(0))]);
        let r = evaluate_global(&q, &[t(1, 0, 1), t(1, 0, 2)]);
        assert_eq!(r.len(), 1);
        let q = query(1, vec![0], vec![pat(Slot::Var(0), 0, Slot::Const(NodeId(2)))]);
        let r = evaluate_global(&q, &[t(1, 0, 1), t(3, 0, 2)]);
        assert_eq!(r.rows.into_iter().next(), Some(vec![3]));
    }

    #[test]
    fn greedy_prefers_small_connected() {
        let q = query(
            3,
            vec![0],
            vec![
                pat(Slot::Var(0), 0, Slot::Var(1)),
                pat(Slot::Var(2), 1, Slot::Var(2)),
                pat(Slot::Var(1), 2, Slot::Var(2)),
            ],
        );
        assert_eq!(plan_order(&q, JoinOrder::Greedy, &[5, 1, 9]), vec![1, 2, 0]);
        assert_eq!(plan_order(&q, JoinOrder::AsWritten, &[5, 1, 9]), vec![0, 1, 2]);
    }

    #[test]
    fn orders_agree() {
        let data: Vec<EncodedTriple> = (0..60u64).map(|i| t(i % 7, i % 3, (i * 5) % 11)).collect();
        let q = query(
            3,
            vec![0, 2],
            vec![pat(Slot::Var(0), 0, Slot::Var(1)), pat(Slot::Var(2), 1, Slot::Var(0)), pat(Slot::Var(1), 2, Slot::Var(2))],
        );
        let idx = TripleIndex::new(&data);
        assert_eq!(evaluate(&q, &idx, JoinOrder::AsWritten), evaluate(&q, &idx, JoinOrder::Greedy));
    }
}
