//! Folded subgroup automata for finitely generated subgroups of free groups.
//!
//! Conjugation convention used throughout the crate: `h^g = g⁻¹ h g` and
//! `H^g = g⁻¹ H g`.
//!
//! Each positive edge of a folded graph carries a word over the generator
//! alphabet `t1, …, tn`. Reading a basepoint loop and multiplying these
//! labels yields an expression of the loop in the original generators. The
//! labels start on the subdivided rose (the last edge of the `i`-th petal
//! carries `ti`) and are kept consistent through every fold: when two equally
//! labelled edges at a state are identified, the connector `e1⁻¹ e2` has
//! trivial ambient label, and its generator label is pushed onto every edge
//! incident to the absorbed state.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Word};

/// One elementary fold, in the numbering of the unfolded rose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldRecord {
    /// State at which the two edges start.
    pub state: usize,
    pub label: Letter,
    pub kept_edge: usize,
    pub removed_edge: usize,
    /// `(kept, absorbed)` states, when the far endpoints differed.
    pub merged_states: Option<(usize, usize)>,
}

/// Folded, pointed, labelled graph with a breadth-first geodesic tree.
///
/// States are numbered in breadth-first order from the basepoint (state 0),
/// exploring letters by index with `+` before `−`.
#[derive(Debug, Clone)]
pub struct SubgroupGraph {
    alphabet: Arc<Alphabet>,
    next: Vec<Vec<Option<usize>>>,
    parent: Vec<Option<(usize, Letter)>>,
    history: Vec<FoldRecord>,
}

impl SubgroupGraph {
    pub const BASE: usize = 0;

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.next.len()
    }

    pub fn target(&self, state: usize, letter: Letter) -> Option<usize> {
        self.next[state][letter.slot()]
    }

    pub fn folding_history(&self) -> &[FoldRecord] {
        &self.history
    }

    /// Positive edges `(from, letter index, to)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.next.iter().enumerate().flat_map(|(s, row)| {
            row.iter()
                .enumerate()
                .filter(|(slot, _)| slot % 2 == 0)
                .filter_map(move |(slot, t)| t.map(|t| (s, slot / 2, t)))
        })
    }

    pub fn num_edges(&self) -> usize {
        self.edges().count()
    }

    /// Follows `letters` from `start` as far as possible; returns the state
    /// reached and the number of letters consumed.
    pub fn trace(&self, start: usize, letters: &[Letter]) -> (usize, usize) {
        let mut cur = start;
        for (i, &l) in letters.iter().enumerate() {
            match self.next[cur][l.slot()] {
                Some(t) => cur = t,
                None => return (cur, i),
            }
        }
        (cur, letters.len())
    }

    /// Label of the geodesic-tree path from the basepoint to `state`.
    pub fn tree_path(&self, state: usize) -> Word {
        let mut rev = Vec::new();
        let mut cur = state;
        while let Some((p, l)) = self.parent[cur] {
            rev.push(l);
            cur = p;
        }
        rev.reverse();
        Word::reduce_trusted(rev, &self.alphabet)
    }

    pub fn depth(&self, state: usize) -> usize {
        let mut d = 0;
        let mut cur = state;
        while let Some((p, _)) = self.parent[cur] {
            d += 1;
            cur = p;
        }
        d
    }

    fn is_tree_edge(&self, from: usize, index: usize, to: usize) -> bool {
        self.parent[to] == Some((from, Letter::pos(index)))
            || self.parent[from] == Some((to, Letter::neg(index)))
    }

    /// Largest undirected distance between two states.
    pub fn diameter(&self) -> usize {
        let n = self.num_states();
        let mut best = 0;
        for s in 0..n {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for t in self.next[u].iter().flatten() {
                    if dist[*t] == usize::MAX {
                        dist[*t] = dist[u] + 1;
                        best = best.max(dist[*t]);
                        queue.push_back(*t);
                    }
                }
            }
        }
        best
    }

    /// Folded: the table is a partial injection per letter. Core: every
    /// non-base state has degree at least two. Tree paths are geodesics.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.num_states();
        for s in 0..n {
            for (slot, t) in self.next[s].iter().enumerate() {
                if let Some(t) = *t {
                    if self.next[t][slot ^ 1] != Some(s) {
                        return Err(format!("edge {s} --{slot}--> {t} has no inverse"));
                    }
                }
            }
            let degree = self.next[s].iter().flatten().count();
            if s != Self::BASE && degree < 2 {
                return Err(format!("state {s} has degree {degree}"));
            }
            let (end, used) = self.trace(Self::BASE, self.tree_path(s).letters());
            if end != s || used != self.depth(s) {
                return Err(format!("tree path of {s} does not reach it"));
            }
        }
        // breadth-first distances agree with tree depths
        let mut dist = vec![usize::MAX; n];
        dist[Self::BASE] = 0;
        let mut queue = VecDeque::from([Self::BASE]);
        while let Some(u) = queue.pop_front() {
            for t in self.next[u].iter().flatten() {
                if dist[*t] == usize::MAX {
                    dist[*t] = dist[u] + 1;
                    queue.push_back(*t);
                }
            }
        }
        for s in 0..n {
            if dist[s] != self.depth(s) {
                return Err(format!("tree depth of {s} is not geodesic"));
            }
        }
        Ok(())
    }
}

struct Edge {
    from: usize,
    to: usize,
    index: usize,
    label: Word,
    alive: bool,
}

/// Folds the subdivided rose of `generators` while maintaining generator labels.
struct Folder {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    alive: Vec<bool>,
    base: usize,
    history: Vec<FoldRecord>,
}

impl Folder {
    fn rose(generators: &[Word], t_alphabet: &Arc<Alphabet>) -> Self {
        let mut f = Folder {
            edges: Vec::new(),
            adj: vec![Vec::new()],
            alive: vec![true],
            base: 0,
            history: Vec::new(),
        };
        for (i, g) in generators.iter().enumerate() {
            let n = g.len();
            let mut prev = 0;
            for (j, &l) in g.letters().iter().enumerate() {
                let next = if j + 1 == n {
                    0
                } else {
                    f.adj.push(Vec::new());
                    f.alive.push(true);
                    f.adj.len() - 1
                };
                let mut label = Word::empty(t_alphabet);
                if j + 1 == n {
                    label = Word::reduce_trusted([Letter::pos(i)], t_alphabet);
                }
                let (from, to) = if l.inverse { (next, prev) } else { (prev, next) };
                if l.inverse {
                    label = label.invert();
                }
                f.add_edge(from, to, l.index, label);
                prev = next;
            }
        }
        f
    }

    fn add_edge(&mut self, from: usize, to: usize, index: usize, label: Word) {
        let id = self.edges.len();
        self.edges.push(Edge {
            from,
            to,
            index,
            label,
            alive: true,
        });
        self.adj[from].push(id);
        if to != from {
            self.adj[to].push(id);
        }
    }

    /// Signed traversals of edge `e` leaving state `s`: (slot, far end, label read).
    fn traversals(&self, s: usize, e: usize) -> Vec<(Letter, usize, Word)> {
        let edge = &self.edges[e];
        let mut out = Vec::with_capacity(2);
        if edge.from == s {
            out.push((Letter::pos(edge.index), edge.to, edge.label.clone()));
        }
        if edge.to == s {
            out.push((Letter::neg(edge.index), edge.from, edge.label.invert()));
        }
        out
    }

    fn find_conflict(&self, s: usize) -> Option<(Letter, (usize, usize, Word), (usize, usize, Word))> {
        let mut seen: HashMap<Letter, (usize, usize, Word)> = HashMap::new();
        for &e in &self.adj[s] {
            for (l, end, label) in self.traversals(s, e) {
                if let Some(prev) = seen.get(&l) {
                    if prev.0 != e {
                        return Some((l, prev.clone(), (e, end, label)));
                    }
                } else {
                    seen.insert(l, (e, end, label));
                }
            }
        }
        None
    }

    fn detach(&mut self, e: usize) {
        self.edges[e].alive = false;
        let (from, to) = (self.edges[e].from, self.edges[e].to);
        self.adj[from].retain(|&x| x != e);
        self.adj[to].retain(|&x| x != e);
    }

    fn fold_all(&mut self) {
        let mut stack: Vec<usize> = (0..self.adj.len()).collect();
        while let Some(s) = stack.pop() {
            if !self.alive[s] {
                continue;
            }
            while let Some((letter, (e1, v1, l1), (e2, v2, l2))) = self.find_conflict(s) {
                // connector e1⁻¹ e2 runs from v1 to v2 with trivial ambient label
                let delta = &l1.invert() * &l2;
                self.detach(e2);
                let merged = if v1 != v2 {
                    // the basepoint is never absorbed, so basepoint loops keep
                    // their meaning
                    let (kept, gone, delta) = if v2 == self.base {
                        (v2, v1, delta.invert())
                    } else {
                        (v1, v2, delta)
                    };
                    let moved = std::mem::take(&mut self.adj[gone]);
                    for f in moved {
                        let edge = &mut self.edges[f];
                        if edge.from == gone {
                            edge.label = &delta * &edge.label;
                            edge.from = kept;
                        }
                        if edge.to == gone {
                            edge.label = &edge.label * &delta.invert();
                            edge.to = kept;
                        }
                        if !self.adj[kept].contains(&f) {
                            self.adj[kept].push(f);
                        }
                    }
                    self.alive[gone] = false;
                    Some((kept, gone))
                } else {
                    None
                };
                self.history.push(FoldRecord {
                    state: s,
                    label: letter,
                    kept_edge: e1,
                    removed_edge: e2,
                    merged_states: merged,
                });
                stack.push(merged.map_or(v1, |(kept, _)| kept));
                if !self.alive[s] {
                    break;
                }
            }
        }
    }

    fn trim(&mut self) {
        let degree = |f: &Folder, s: usize| -> usize {
            f.adj[s]
                .iter()
                .map(|&e| if f.edges[e].from == f.edges[e].to { 2 } else { 1 })
                .sum()
        };
        let mut stack: Vec<usize> = (0..self.adj.len()).filter(|&s| self.alive[s]).collect();
        while let Some(s) = stack.pop() {
            if !self.alive[s] || s == self.base || degree(self, s) >= 2 {
                continue;
            }
            let incident = self.adj[s].clone();
            for e in incident {
                let other = if self.edges[e].from == s {
                    self.edges[e].to
                } else {
                    self.edges[e].from
                };
                self.detach(e);
                stack.push(other);
            }
            self.alive[s] = false;
        }
    }
}

/// A subgroup graph together with the generators it was built from, their
/// edge labels, and a free basis read off the geodesic tree.
#[derive(Debug, Clone)]
pub struct GeneratingTuple {
    graph: SubgroupGraph,
    generators: Vec<Word>,
    t_alphabet: Arc<Alphabet>,
    t_labels: Vec<Vec<Option<Word>>>,
    basis: Vec<Word>,
    basis_alphabet: Arc<Alphabet>,
    basis_edge: HashMap<(usize, usize), usize>,
}

/// Witness for `c ∈ Z(H)`: `conjugator⁻¹ · target · conjugator = c` with
/// `target ∈ Z_t(H)` and `conjugator ∈ H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZWitness {
    pub t: Word,
    pub target: Word,
    pub conjugator: Word,
}

/// Double transversal of `H` in its generalized normalizer, with the
/// subgroups `Z_t(H)` for each nontrivial `t` rewritten over `H`'s basis.
#[derive(Debug, Clone)]
pub struct NormalizerData {
    pub transversal: Vec<Word>,
    pub z_graphs: Vec<(Word, GeneratingTuple)>,
}

impl GeneratingTuple {
    /// Folded core automaton of `⟨generators⟩`. Trivial generators are dropped.
    pub fn build(alphabet: &Arc<Alphabet>, generators: &[Word]) -> Result<Self> {
        let generators: Vec<Word> = generators.iter().filter(|g| !g.is_empty()).cloned().collect();
        for g in &generators {
            if !Arc::ptr_eq(g.alphabet(), alphabet) && **g.alphabet() != **alphabet {
                return Err(Error::AlphabetMismatch);
            }
        }
        let t_alphabet = Alphabet::numbered("t", generators.len());
        let mut folder = Folder::rose(&generators, &t_alphabet);
        folder.fold_all();
        folder.trim();

        // breadth-first renumbering
        let nslots = 2 * alphabet.len();
        let mut old_next: HashMap<usize, Vec<Option<(usize, usize)>>> = HashMap::new();
        for (id, e) in folder.edges.iter().enumerate().filter(|(_, e)| e.alive) {
            old_next.entry(e.from).or_insert_with(|| vec![None; nslots])[2 * e.index] = Some((e.to, id));
            old_next.entry(e.to).or_insert_with(|| vec![None; nslots])[2 * e.index + 1] =
                Some((e.from, id));
        }
        let mut new_id: HashMap<usize, usize> = HashMap::from([(folder.base, 0)]);
        let mut order = vec![folder.base];
        let mut parent = vec![None];
        let mut head = 0;
        while head < order.len() {
            let s = order[head];
            head += 1;
            if let Some(row) = old_next.get(&s) {
                for (slot, entry) in row.iter().enumerate() {
                    if let Some((t, _)) = entry {
                        if !new_id.contains_key(t) {
                            new_id.insert(*t, order.len());
                            order.push(*t);
                            parent.push(Some((new_id[&s], Letter::from_slot(slot))));
                        }
                    }
                }
            }
        }
        let n = order.len();
        let mut next = vec![vec![None; nslots]; n];
        let mut t_labels = vec![vec![None; alphabet.len()]; n];
        for e in folder.edges.iter().filter(|e| e.alive) {
            let (f, t) = (new_id[&e.from], new_id[&e.to]);
            next[f][2 * e.index] = Some(t);
            next[t][2 * e.index + 1] = Some(f);
            t_labels[f][e.index] = Some(e.label.clone());
        }
        let graph = SubgroupGraph {
            alphabet: alphabet.clone(),
            next,
            parent,
            history: folder.history,
        };
        debug_assert_eq!(graph.check_invariants(), Ok(()));

        let mut basis = Vec::new();
        let mut basis_edge = HashMap::new();
        for (s, index, t) in graph.edges() {
            if !graph.is_tree_edge(s, index, t) {
                basis_edge.insert((s, index), basis.len());
                let w = &(&graph.tree_path(s) * &Word::reduce_trusted([Letter::pos(index)], alphabet))
                    * &graph.tree_path(t).invert();
                basis.push(w);
            }
        }
        let basis_alphabet = Alphabet::numbered("c", basis.len());
        Ok(GeneratingTuple {
            graph,
            generators,
            t_alphabet,
            t_labels,
            basis,
            basis_alphabet,
            basis_edge,
        })
    }

    pub fn trivial(alphabet: &Arc<Alphabet>) -> Self {
        Self::build(alphabet, &[]).expect("empty generator list")
    }

    pub fn graph(&self) -> &SubgroupGraph {
        &self.graph
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.graph.alphabet()
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn t_alphabet(&self) -> &Arc<Alphabet> {
        &self.t_alphabet
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn basis_alphabet(&self) -> &Arc<Alphabet> {
        &self.basis_alphabet
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    fn check_alphabet(&self, w: &Word) -> Result<()> {
        if Arc::ptr_eq(w.alphabet(), self.alphabet()) || **w.alphabet() == **self.alphabet() {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }

    pub fn contains(&self, w: &Word) -> bool {
        let (end, used) = self.graph.trace(SubgroupGraph::BASE, w.letters());
        end == SubgroupGraph::BASE && used == w.len()
    }

    /// Returns `(rep, head)` with `w = head · rep`, `head ∈ H` and `rep` the
    /// shortest element of the coset `H·w`.
    pub fn coset_rep(&self, w: &Word) -> (Word, Word) {
        let (p, used) = self.graph.trace(SubgroupGraph::BASE, w.letters());
        let suffix = Word::reduce_trusted(w.letters()[used..].iter().copied(), w.alphabet());
        let rep = &self.graph.tree_path(p) * &suffix;
        let head = w * &rep.invert();
        (rep, head)
    }

    /// Bound `M` on head growth in [`GeneratingTuple::coset_rep`]: twice the
    /// graph diameter.
    pub fn head_bound(&self) -> usize {
        2 * self.graph.diameter()
    }

    fn read_loop(&self, w: &Word) -> Result<Vec<(usize, Letter)>> {
        self.check_alphabet(w)?;
        let mut cur = SubgroupGraph::BASE;
        let mut steps = Vec::with_capacity(w.len());
        for &l in w.letters() {
            let t = self.graph.target(cur, l).ok_or(Error::NotAMember)?;
            steps.push((cur, l));
            cur = t;
        }
        if cur != SubgroupGraph::BASE {
            return Err(Error::NotAMember);
        }
        Ok(steps)
    }

    /// Positive edge `(from, index)` underlying a step.
    fn edge_of(&self, state: usize, l: Letter) -> (usize, usize) {
        if l.inverse {
            (self.graph.target(state, l).expect("step exists"), l.index)
        } else {
            (state, l.index)
        }
    }

    /// Rewrites a member over the basis alphabet `c1, …, cr`.
    pub fn express_in_basis(&self, w: &Word) -> Result<Word> {
        let steps = self.read_loop(w)?;
        let letters = steps.into_iter().filter_map(|(s, l)| {
            self.basis_edge.get(&self.edge_of(s, l)).map(|&i| Letter {
                index: i,
                inverse: l.inverse,
            })
        });
        Ok(Word::reduce_trusted(letters, &self.basis_alphabet))
    }

    /// Rewrites a member over the generator alphabet `t1, …, tn`.
    pub fn express_in_generators(&self, w: &Word) -> Result<Word> {
        let steps = self.read_loop(w)?;
        let mut out = Word::empty(&self.t_alphabet);
        for (s, l) in steps {
            let (from, index) = self.edge_of(s, l);
            let label = self.t_labels[from][index].as_ref().expect("edge carries a label");
            out = if l.inverse {
                &out * &label.invert()
            } else {
                &out * label
            };
        }
        Ok(out)
    }

    /// `H₁ ∩ H₂`.
    pub fn pullback(&self, other: &GeneratingTuple) -> Result<GeneratingTuple> {
        self.check_alphabet(&Word::empty(other.alphabet()))?;
        let (g1, g2) = (&self.graph, &other.graph);
        let nslots = 2 * self.alphabet().len();
        let basis = component_basis(
            (SubgroupGraph::BASE, SubgroupGraph::BASE),
            nslots,
            |(p, q), slot| Some((g1.next[p][slot]?, g2.next[q][slot]?)),
            self.alphabet(),
        );
        GeneratingTuple::build(self.alphabet(), &basis)
    }

    /// `H^z = z⁻¹ H z`.
    pub fn conjugate(&self, z: &Word) -> Result<GeneratingTuple> {
        self.check_alphabet(z)?;
        let gens: Vec<Word> = self.generators.iter().map(|h| h.conjugate_by(z)).collect();
        GeneratingTuple::build(self.alphabet(), &gens)
    }

    /// `Z_t(H) = H^{t⁻¹} ∩ H`, the elements of `H` that `t` conjugates back into `H`.
    pub fn z_subgroup(&self, t: &Word) -> Result<GeneratingTuple> {
        self.conjugate(&t.invert())?.pullback(self)
    }

    /// `H ∩ H^w ≠ 1`.
    pub fn in_generalized_normalizer(&self, w: &Word) -> Result<bool> {
        Ok(!self.conjugate(w)?.pullback(self)?.is_trivial())
    }

    /// Finds `h ∈ H` and `z` with `z⁻¹ h z = w`.
    pub fn conjugacy_into(&self, w: &Word) -> Option<(Word, Word)> {
        let (core, y) = w.cyclic_reduce();
        if core.is_empty() {
            return Some((Word::empty(w.alphabet()), Word::empty(w.alphabet())));
        }
        let n = core.len();
        for q in 0..self.graph.num_states() {
            for r in 0..n {
                let rotated = core.rotate(r);
                if self.graph.trace(q, rotated.letters()) != (q, n) {
                    continue;
                }
                let path = self.graph.tree_path(q);
                let alpha = Word::reduce_trusted(core.letters()[..r].iter().copied(), w.alphabet());
                let target = &(&path * &rotated) * &path.invert();
                let z = &(&path * &alpha.invert()) * &y.invert();
                debug_assert_eq!(&target.conjugate_by(&z), w);
                return Some((target, z));
            }
        }
        None
    }

    /// `H t H = H t' H`, tested as `Ht ∩ t'H ≠ ∅`.
    pub fn same_double_coset(&self, t: &Word, t2: &Word) -> Result<bool> {
        let shifted = self.conjugate(&t2.invert())?;
        Ok(coset_intersection(self, t, &shifted, t2)?.is_some())
    }

    /// Representatives `t₀ = 1, t₁, …` of the double cosets `H t H` making up
    /// the generalized normalizer `{g : H ∩ H^g ≠ 1}`.
    pub fn double_transversal(&self) -> Result<Vec<Word>> {
        let g = &self.graph;
        let n = g.num_states();
        let id = |p: usize, q: usize| p * n + q;
        let mut uf = UnionFind::new(n * n);
        let mut pair_edges = Vec::new();
        for (p, index, p2) in g.edges() {
            for q in 0..n {
                if let Some(q2) = g.next[q][2 * index] {
                    pair_edges.push((id(p, q), id(p2, q2)));
                    uf.union(id(p, q), id(p2, q2));
                }
            }
        }
        let mut states_in: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..n * n {
            states_in.entry(uf.find(v)).or_default().push(v);
        }
        let mut edges_in: HashMap<usize, usize> = HashMap::new();
        for (a, _) in &pair_edges {
            *edges_in.entry(uf.find(*a)).or_default() += 1;
        }
        let diagonal = uf.find(id(SubgroupGraph::BASE, SubgroupGraph::BASE));
        let mut candidates = Vec::new();
        let mut roots: Vec<usize> = states_in.keys().copied().collect();
        roots.sort_unstable();
        for root in roots {
            let members = &states_in[&root];
            if root == diagonal || edges_in.get(&root).copied().unwrap_or(0) < members.len() {
                continue;
            }
            let best = members
                .iter()
                .map(|&v| &g.tree_path(v / n) * &g.tree_path(v % n).invert())
                .min()
                .expect("component is nonempty");
            candidates.push(best);
        }
        candidates.sort();
        let mut transversal = vec![Word::empty(self.alphabet())];
        for t in candidates {
            let mut fresh = true;
            for known in &transversal {
                if self.same_double_coset(&t, known)? {
                    fresh = false;
                    break;
                }
            }
            if fresh {
                transversal.push(t);
            }
        }
        Ok(transversal)
    }

    /// `H ∩ H^g = 1` for all `g ∉ H` (vacuously true when `H` is everything).
    pub fn is_malnormal(&self) -> Result<bool> {
        Ok(self.double_transversal()?.len() == 1)
    }

    pub fn normalizer_data(&self) -> Result<NormalizerData> {
        let transversal = self.double_transversal()?;
        let mut z_graphs = Vec::new();
        for t in transversal.iter().skip(1) {
            let z = self.z_subgroup(t)?;
            let gens = z
                .basis()
                .iter()
                .map(|b| self.express_in_basis(b))
                .collect::<Result<Vec<_>>>()?;
            z_graphs.push((t.clone(), GeneratingTuple::build(&self.basis_alphabet, &gens)?));
        }
        Ok(NormalizerData {
            transversal,
            z_graphs,
        })
    }

    /// Decides `c ∈ Z(H)` using precomputed normalizer data.
    pub fn z_set_witness(&self, data: &NormalizerData, c: &Word) -> Result<Option<ZWitness>> {
        let cb = self.express_in_basis(c)?;
        for (t, zg) in &data.z_graphs {
            if let Some((target, z)) = zg.conjugacy_into(&cb) {
                let target = target.substitute(&self.basis, self.alphabet());
                let conjugator = z.substitute(&self.basis, self.alphabet());
                debug_assert_eq!(&target.conjugate_by(&conjugator), c);
                return Ok(Some(ZWitness {
                    t: t.clone(),
                    target,
                    conjugator,
                }));
            }
        }
        Ok(None)
    }

    /// `c` lies in some `Z_t(H)^h`, `h ∈ H`, `t` a nontrivial transversal element.
    pub fn in_z_set(&self, c: &Word) -> Result<bool> {
        let data = self.normalizer_data()?;
        Ok(self.z_set_witness(&data, c)?.is_some())
    }
}

/// `Ka ∩ Lb`: `None` when empty, otherwise `(K ∩ L, h)` with `h` a shortest
/// element of the intersection.
pub fn coset_intersection(
    k: &GeneratingTuple,
    a: &Word,
    l: &GeneratingTuple,
    b: &Word,
) -> Result<Option<(GeneratingTuple, Word)>> {
    k.check_alphabet(a)?;
    l.check_alphabet(b)?;
    k.check_alphabet(&Word::empty(l.alphabet()))?;
    let ka = CosetAutomaton::new(&k.graph, a);
    let lb = CosetAutomaton::new(&l.graph, b);
    let start = (SubgroupGraph::BASE, SubgroupGraph::BASE);
    let goal = (ka.accept, lb.accept);
    let nslots = 2 * k.alphabet().len();
    let mut parent: HashMap<(usize, usize), Option<((usize, usize), usize)>> = HashMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    let mut found = false;
    while let Some(cur) = queue.pop_front() {
        if cur == goal {
            found = true;
            break;
        }
        for slot in 0..nslots {
            if let (Some(p), Some(q)) = (ka.next[cur.0][slot], lb.next[cur.1][slot]) {
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry((p, q)) {
                    e.insert(Some((cur, slot)));
                    queue.push_back((p, q));
                }
            }
        }
    }
    if !found {
        return Ok(None);
    }
    let mut rev = Vec::new();
    let mut cur = goal;
    while let Some(Some((prev, slot))) = parent.get(&cur) {
        rev.push(Letter::from_slot(*slot));
        cur = *prev;
    }
    rev.reverse();
    let h = Word::reduce_trusted(rev, k.alphabet());
    debug_assert!(k.contains(&(&h * &a.invert())) && l.contains(&(&h * &b.invert())));
    Ok(Some((k.pullback(l)?, h)))
}

/// Subgroup graph with a tail spelling a coset representative.
struct CosetAutomaton {
    next: Vec<Vec<Option<usize>>>,
    accept: usize,
}

impl CosetAutomaton {
    fn new(g: &SubgroupGraph, w: &Word) -> Self {
        let mut next = g.next.clone();
        let nslots = 2 * g.alphabet.len();
        let mut cur = SubgroupGraph::BASE;
        for &l in w.letters() {
            cur = match next[cur][l.slot()] {
                Some(t) => t,
                None => {
                    next.push(vec![None; nslots]);
                    let fresh = next.len() - 1;
                    next[cur][l.slot()] = Some(fresh);
                    next[fresh][l.inv().slot()] = Some(cur);
                    fresh
                }
            };
        }
        CosetAutomaton { next, accept: cur }
    }
}

/// Free basis of the loops at `start` in a deterministic graph given by `next`.
fn component_basis<S, F>(start: S, nslots: usize, next: F, alphabet: &Arc<Alphabet>) -> Vec<Word>
where
    S: Copy + Eq + Hash,
    F: Fn(S, usize) -> Option<S>,
{
    let mut parent: HashMap<S, Option<(S, Letter)>> = HashMap::from([(start, None)]);
    let mut order = vec![start];
    let mut head = 0;
    while head < order.len() {
        let s = order[head];
        head += 1;
        for slot in 0..nslots {
            if let Some(t) = next(s, slot) {
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(t) {
                    e.insert(Some((s, Letter::from_slot(slot))));
                    order.push(t);
                }
            }
        }
    }
    let path = |mut s: S| {
        let mut rev = Vec::new();
        while let Some(Some((p, l))) = parent.get(&s) {
            rev.push(*l);
            s = *p;
        }
        rev.reverse();
        Word::reduce_trusted(rev, alphabet)
    };
    let mut basis = Vec::new();
    for &s in &order {
        for slot in (0..nslots).step_by(2) {
            if let Some(t) = next(s, slot) {
                let l = Letter::from_slot(slot);
                let tree = parent[&t] == Some((s, l)) || parent[&s] == Some((t, l.inv()));
                if !tree {
                    basis.push(&(&path(s) * &Word::reduce_trusted([l], alphabet)) * &path(t).invert());
                }
            }
        }
    }
    basis
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abd() -> Arc<Alphabet> {
        Alphabet::new(["a", "b", "d"]).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s, &abd()).unwrap()
    }

    fn sub(gens: &[&str]) -> GeneratingTuple {
        let gens: Vec<Word> = gens.iter().map(|g| w(g)).collect();
        GeneratingTuple::build(&abd(), &gens).unwrap()
    }

    #[test]
    fn build_examples() {
        let c = sub(&["a^2", "b"]);
        assert_eq!(c.graph().num_states(), 2);
        assert_eq!(c.graph().num_edges(), 3);
        assert_eq!(c.graph().target(0, Letter::pos(1)), Some(0));
        assert_eq!(c.graph().target(0, Letter::pos(0)), Some(1));
        assert_eq!(c.graph().target(1, Letter::pos(0)), Some(0));

        let a = sub(&["a"]);
        assert_eq!(a.graph().num_states(), 1);
        assert_eq!(a.graph().num_edges(), 1);

        let dup = sub(&["a", "a^-1"]);
        assert_eq!(dup.graph().num_states(), 1);
        assert_eq!(dup.graph().num_edges(), 1);
        assert_eq!(dup.graph().folding_history().len(), 1);
        assert_eq!(dup.generators().len(), 2);
    }

    #[test]
    fn membership() {
        let c = sub(&["a^2", "b"]);
        assert!(c.contains(&w("a^2 b")));
        assert!(!c.contains(&w("a")));
        assert!(c.contains(&w("")));
    }

    #[test]
    fn coset_rep_examples() {
        let c = sub(&["a^2", "b"]);
        assert_eq!(c.coset_rep(&w("b^3")), (w(""), w("b^3")));
        assert_eq!(c.coset_rep(&w("d a^4")), (w("d a^4"), w("")));
        assert_eq!(c.coset_rep(&w("b^2 d")), (w("d"), w("b^2")));
        assert_eq!(c.head_bound(), 2);
    }

    #[test]
    fn basis_examples() {
        let c = sub(&["a^2", "b"]);
        assert_eq!(c.rank(), 2);
        assert_eq!(c.graph().num_edges() + 1 - c.graph().num_states(), 2);
        let mut b: Vec<String> = c.basis().iter().map(|x| x.to_string()).collect();
        b.sort();
        assert_eq!(b, vec!["a^2", "b"]);
        assert_eq!(sub(&["a"]).basis(), &[w("a")]);
        assert_eq!(sub(&["a", "a^-1"]).basis(), &[w("a")]);
    }

    #[test]
    fn expressions_round_trip() {
        let c = sub(&["a^2", "b"]);
        for m in ["a^2 b", "", "b^-1", "a^2 b a^2", "b a^-2 b^3 a^4"] {
            let m = w(m);
            let eb = c.express_in_basis(&m).unwrap();
            assert_eq!(eb.substitute(c.basis(), &abd()), m);
            let eg = c.express_in_generators(&m).unwrap();
            assert_eq!(eg.substitute(c.generators(), &abd()), m);
        }
        let t = c.t_alphabet().clone();
        assert_eq!(c.express_in_generators(&w("a^2 b a^2")).unwrap(), Word::parse("t1 t2 t1", &t).unwrap());
        assert!(c.express_in_generators(&w("")).unwrap().is_empty());
        assert_eq!(c.express_in_basis(&w("a")), Err(Error::NotAMember));

        let overlap = sub(&["a b", "b"]);
        let t = overlap.t_alphabet().clone();
        assert_eq!(
            overlap.express_in_generators(&w("a")).unwrap(),
            Word::parse("t1 t2^-1", &t).unwrap()
        );
    }

    #[test]
    fn pullback_examples() {
        let h = sub(&["a^2", "b"]).pullback(&sub(&["a^3"])).unwrap();
        assert!(h.contains(&w("a^6")));
        assert!(!h.contains(&w("a^2")));
        assert!(!h.contains(&w("a^3")));
        assert_eq!(h.rank(), 1);
        let c = sub(&["a^2", "b"]);
        let cc = c.pullback(&c).unwrap();
        assert_eq!(cc.rank(), 2);
        assert!(cc.contains(&w("a^2 b")));
        assert!(sub(&["a"]).pullback(&sub(&["b"])).unwrap().is_trivial());
    }

    #[test]
    fn conjugate_examples() {
        let b = sub(&["b"]).conjugate(&w("a")).unwrap();
        assert!(b.contains(&w("a^-1 b a")));
        assert!(!b.contains(&w("b")));
        let c = sub(&["a^2", "b"]);
        let same = c.conjugate(&w("a^2 b")).unwrap();
        for m in ["a^2", "b", "a^2 b a^-2"] {
            assert!(same.contains(&w(m)));
        }
        assert!(!same.contains(&w("a")));
        let inter = c.conjugate(&w("a")).unwrap().pullback(&c).unwrap();
        assert!(inter.contains(&w("a^2")));
        assert!(!inter.contains(&w("a^-1 b a")));
    }

    #[test]
    fn coset_intersection_examples() {
        let k = sub(&["a^2", "b"]);
        let l = sub(&["a^2"]);
        let (m, h) = coset_intersection(&k, &w("d"), &l, &w("d")).unwrap().unwrap();
        assert_eq!(h, w("d"));
        assert!(m.contains(&w("a^2")) && !m.contains(&w("b")));
        let (m, h) = coset_intersection(&k, &w("a d"), &k, &w("a d")).unwrap().unwrap();
        assert_eq!(m.rank(), k.rank());
        assert!(k.contains(&(&h * &w("d^-1 a^-1"))));
        assert_eq!(h, w("a d"));
        let a = sub(&["a"]);
        assert!(coset_intersection(&a, &w("b"), &a, &w("d")).unwrap().is_none());
    }

    #[test]
    fn conjugacy_into_examples() {
        let c = sub(&["a^2", "b"]);
        assert_eq!(c.conjugacy_into(&w("a^-1 b a")), Some((w("b"), w("a"))));
        assert_eq!(c.conjugacy_into(&w("d")), None);
        let xyz = Alphabet::new(["x", "y", "z"]).unwrap();
        let cb = GeneratingTuple::build(
            &xyz,
            &[Word::parse("x", &xyz).unwrap(), Word::parse("y^2", &xyz).unwrap()],
        )
        .unwrap();
        let y2 = Word::parse("y^2", &xyz).unwrap();
        assert_eq!(cb.conjugacy_into(&y2), Some((y2.clone(), Word::empty(&xyz))));
        // y² also loops at the middle of the y-cycle
        let mid = cb.graph().target(0, Letter::pos(1)).unwrap();
        assert_eq!(cb.graph().trace(mid, y2.letters()), (mid, 2));
    }

    #[test]
    fn transversal_examples() {
        let c = sub(&["a^2", "b"]);
        assert_eq!(c.double_transversal().unwrap(), vec![w(""), w("a")]);
        assert!(!c.is_malnormal().unwrap());
        let b = sub(&["b"]);
        assert_eq!(b.double_transversal().unwrap(), vec![w("")]);
        assert!(b.is_malnormal().unwrap());
        let all = sub(&["a", "b", "d"]);
        assert_eq!(all.double_transversal().unwrap(), vec![w("")]);
        assert!(all.is_malnormal().unwrap());
    }

    #[test]
    fn z_subgroup_examples() {
        let c = sub(&["a^2", "b"]);
        let z = c.z_subgroup(&w("a")).unwrap();
        assert!(z.contains(&w("a^2")) && !z.contains(&w("b")));
        let z0 = c.z_subgroup(&w("")).unwrap();
        assert_eq!(z0.rank(), 2);
        assert!(z0.contains(&w("b")));
        assert!(sub(&["b"]).z_subgroup(&w("a")).unwrap().is_trivial());
    }

    #[test]
    fn normalizer_membership() {
        let c = sub(&["a^2", "b"]);
        assert!(c.in_generalized_normalizer(&w("a")).unwrap());
        assert!(!c.in_generalized_normalizer(&w("d")).unwrap());
        assert!(c.in_generalized_normalizer(&w("b a^2")).unwrap());
    }

    #[test]
    fn z_set_examples() {
        let c = sub(&["a^2", "b"]);
        assert!(c.in_z_set(&w("a^2")).unwrap());
        assert!(!c.in_z_set(&w("b")).unwrap());
        assert!(c.in_z_set(&w("b a^4 b^-1")).unwrap());
        assert_eq!(c.in_z_set(&w("a")), Err(Error::NotAMember));
        let b = sub(&["b"]);
        assert!(!b.in_z_set(&w("b^3")).unwrap());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn ab() -> Arc<Alphabet> {
            Alphabet::new(["a", "b"]).unwrap()
        }

        fn word(max: usize) -> impl Strategy<Value = Word> {
            prop::collection::vec((0usize..2, any::<bool>()), 0..=max).prop_map(|ls| {
                Word::free_reduce(ls.into_iter().map(|(index, inverse)| Letter { index, inverse }), &ab())
                    .unwrap()
            })
        }

        fn all_words(max: usize) -> Vec<Word> {
            let a = ab();
            let mut out = vec![Word::empty(&a)];
            let mut layer = vec![Word::empty(&a)];
            for _ in 0..max {
                let mut nextl = Vec::new();
                for w in &layer {
                    for slot in 0..4 {
                        let l = Letter::from_slot(slot);
                        if w.last() != Some(l.inv()) {
                            nextl.push(w * &Word::reduce_trusted([l], &a));
                        }
                    }
                }
                out.extend(nextl.iter().cloned());
                layer = nextl;
            }
            out
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn members_round_trip(gens in prop::collection::vec(word(5), 1..4), picks in prop::collection::vec((0usize..3, any::<bool>()), 0..6)) {
                let h = GeneratingTuple::build(&ab(), &gens).unwrap();
                prop_assert_eq!(h.graph().check_invariants(), Ok(()));
                let kept: Vec<&Word> = gens.iter().filter(|g| !g.is_empty()).collect();
                let mut m = Word::empty(&ab());
                for (i, inv) in picks {
                    if kept.is_empty() { break; }
                    let g = kept[i % kept.len()];
                    m = if inv { &m * &g.invert() } else { &m * g };
                }
                prop_assert!(h.contains(&m));
                let eb = h.express_in_basis(&m).unwrap();
                prop_assert_eq!(&eb.substitute(h.basis(), &ab()), &m);
                let eg = h.express_in_generators(&m).unwrap();
                prop_assert_eq!(&eg.substitute(h.generators(), &ab()), &m);
                prop_assert_eq!(h.rank(), h.graph().num_edges() + 1 - h.graph().num_states());
            }

            #[test]
            fn coset_rep_is_shortest_and_invariant(gens in prop::collection::vec(word(4), 1..3), w in word(6), m in word(6)) {
                let h = GeneratingTuple::build(&ab(), &gens).unwrap();
                let (rep, head) = h.coset_rep(&w);
                prop_assert!(h.contains(&head));
                prop_assert_eq!(&(&head * &rep), &w);
                prop_assert!(rep.len() <= w.len());
                if h.contains(&m) {
                    let (rep2, _) = h.coset_rep(&(&m * &w));
                    prop_assert_eq!(&rep2, &rep);
                }
            }

            #[test]
            fn pullback_is_intersection(g1 in prop::collection::vec(word(4), 1..3), g2 in prop::collection::vec(word(4), 1..3)) {
                let h1 = GeneratingTuple::build(&ab(), &g1).unwrap();
                let h2 = GeneratingTuple::build(&ab(), &g2).unwrap();
                let both = h1.pullback(&h2).unwrap();
                for w in all_words(5) {
                    prop_assert_eq!(both.contains(&w), h1.contains(&w) && h2.contains(&w));
                }
            }

            #[test]
            fn coset_intersection_agrees_with_search(g1 in prop::collection::vec(word(3), 1..3), g2 in prop::collection::vec(word(3), 1..3), a in word(3), b in word(3)) {
                let k = GeneratingTuple::build(&ab(), &g1).unwrap();
                let l = GeneratingTuple::build(&ab(), &g2).unwrap();
                let found = coset_intersection(&k, &a, &l, &b).unwrap();
                if let Some((_, h)) = &found {
                    prop_assert!(k.contains(&(h * &a.invert())) && l.contains(&(h * &b.invert())));
                }
                let brute = all_words(6).into_iter()
                    .any(|h| k.contains(&(&h * &a.invert())) && l.contains(&(&h * &b.invert())));
                if brute {
                    prop_assert!(found.is_some());
                }
            }

            #[test]
            fn transversal_covers_normalizer(gens in prop::collection::vec(word(3), 1..3)) {
                let h = GeneratingTuple::build(&ab(), &gens).unwrap();
                prop_assume!(!h.is_trivial());
                let ts = h.double_transversal().unwrap();
                prop_assert!(ts[0].is_empty());
                for (i, t) in ts.iter().enumerate() {
                    prop_assert!(h.in_generalized_normalizer(t).unwrap());
                    for t2 in &ts[..i] {
                        prop_assert!(!h.same_double_coset(t, t2).unwrap());
                    }
                }
                for g in all_words(4) {
                    let inside = h.in_generalized_normalizer(&g).unwrap();
                    let covered = ts.iter().any(|t| h.same_double_coset(&g, t).unwrap());
                    prop_assert_eq!(inside, covered, "g = {}", g);
                }
            }

            #[test]
            fn conjugacy_into_witness(gens in prop::collection::vec(word(4), 1..3), m in word(5), z in word(4)) {
                let h = GeneratingTuple::build(&ab(), &gens).unwrap();
                let (_, head) = h.coset_rep(&m);
                let target = head.conjugate_by(&z);
                let (found, conj) = h.conjugacy_into(&target).expect("conjugate of a member");
                prop_assert!(h.contains(&found));
                prop_assert_eq!(&found.conjugate_by(&conj), &target);
            }
        }
    }
}
