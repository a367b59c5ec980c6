//! F-term rewriting and Jacobi-algebra normal forms, crossing invariants,
//! bounded-type certification, perfect matchings, and truncated linear
//! algebra for deformed ideal membership and quasi-flatness.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::rc::Rc;
use std::sync::Arc;

use num::{One, Zero};
use thiserror::Error;

use crate::dimer::{Dimer, End, Orientation, ZigzagPath};
use crate::ncpoly::{DefSeries, NcPoly, QMonomial, Quiver, QuiverPath, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JacobiError {
    #[error("CLASS_UNBOUNDED_SUSPECTED: F-term class of `{0}` exceeded the length cap")]
    ClassUnboundedSuspected(String),
    #[error("NOT_LFREE: path contains a full face cycle")]
    NotLfree,
    #[error("relations do not share endpoints required for sandwiching")]
    MixedEndpoints,
}

/// An F-term equivalence class explored by breadth-first search.
#[derive(Debug, Clone)]
pub struct FtermClass {
    pub representative: QuiverPath,
    pub members: BTreeSet<QuiverPath>,
    pub saturated: bool,
}

/// F-term rewriting context for the Jacobi algebra of a dimer
/// (normally the dual dimer of a mirror pair).
pub struct JacobiContext<'d> {
    pub dimer: &'d Dimer,
    pub quiver: Arc<Quiver>,
    pub length_cap: usize,
    memo: HashMap<QuiverPath, Rc<FtermClass>>,
    /// the two complements of each arc, as traversal arc sequences
    flips: Vec<[Vec<u32>; 2]>,
}

impl<'d> JacobiContext<'d> {
    pub fn new(dimer: &'d Dimer, quiver: Arc<Quiver>, length_cap: usize) -> JacobiContext<'d> {
        let flips = (0..dimer.arcs.len() as u32)
            .map(|a| {
                [
                    dimer.complement(a, Orientation::Clockwise),
                    dimer.complement(a, Orientation::Counterclockwise),
                ]
            })
            .collect();
        JacobiContext { dimer, quiver, length_cap, memo: HashMap::new(), flips }
    }

    /// Default cap from the truncation order: 3 * (max face length) * (N+1).
    pub fn default_length_cap(dimer: &Dimer, q_order: u32) -> usize {
        3 * dimer.max_face_len() * (q_order as usize + 1)
    }

    /// All single F-term flips of `p`: occurrences of one complement of an
    /// arc replaced by the other.
    pub fn flips_of(&self, p: &QuiverPath) -> Vec<QuiverPath> {
        let mut out = Vec::new();
        for a in 0..self.dimer.arcs.len() {
            for side in 0..2 {
                let from = &self.flips[a][side];
                let to = &self.flips[a][1 - side];
                if from.len() > p.arcs.len() {
                    continue;
                }
                for start in 0..=(p.arcs.len() - from.len()) {
                    if &p.arcs[start..start + from.len()] == from.as_slice() {
                        let mut arcs = Vec::with_capacity(p.arcs.len() - from.len() + to.len());
                        arcs.extend_from_slice(&p.arcs[..start]);
                        arcs.extend_from_slice(to);
                        arcs.extend_from_slice(&p.arcs[start + from.len()..]);
                        out.push(QuiverPath { source: p.source, arcs });
                    }
                }
            }
        }
        out
    }

    /// BFS closure of `p` under single-face flips, memoized. `saturated`
    /// is false when the length cap truncated the search.
    pub fn fterm_class(&mut self, p: &QuiverPath) -> Rc<FtermClass> {
        if let Some(c) = self.memo.get(p) {
            return c.clone();
        }
        let mut members: BTreeSet<QuiverPath> = BTreeSet::from([p.clone()]);
        let mut queue: VecDeque<QuiverPath> = VecDeque::from([p.clone()]);
        let mut saturated = true;
        while let Some(cur) = queue.pop_front() {
            for next in self.flips_of(&cur) {
                if next.arcs.len() > self.length_cap {
                    saturated = false;
                    continue;
                }
                if members.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        let representative = members.iter().next().unwrap().clone();
        let class = Rc::new(FtermClass { representative, members, saturated });
        for m in &class.members {
            self.memo.insert(m.clone(), class.clone());
        }
        class
    }

    /// Replace every path by its class representative, merging coefficients.
    pub fn normal_form(&mut self, x: &NcPoly) -> Result<NcPoly, JacobiError> {
        let mut out = NcPoly::zero(x.quiver.clone(), x.order);
        for (p, c) in &x.terms {
            let class = self.fterm_class(p);
            if !class.saturated {
                return Err(JacobiError::ClassUnboundedSuspected(p.display(&x.quiver)));
            }
            out.add_term(class.representative.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn equal_mod_relations(&mut self, x: &NcPoly, y: &NcPoly) -> Result<bool, JacobiError> {
        Ok(self.normal_form(x)? == self.normal_form(y)?)
    }

    pub fn is_zero_mod_relations(&mut self, x: &NcPoly) -> Result<bool, JacobiError> {
        Ok(self.normal_form(x)?.is_zero())
    }
}

/// Is the closed path free of full face cycles (no contiguous cyclic
/// subword traverses an entire polygon boundary)?
pub fn is_l_free(dimer: &Dimer, p: &QuiverPath) -> bool {
    let n = p.arcs.len();
    if n == 0 {
        return true;
    }
    let doubled: Vec<u32> = p.arcs.iter().chain(p.arcs.iter()).cloned().collect();
    for face in &dimer.faces {
        let m = face.arcs.len();
        if m > n {
            continue;
        }
        for rot in 0..m {
            let word: Vec<u32> = (0..m).map(|k| face.arcs[(rot + k) % m]).collect();
            for start in 0..n {
                if doubled[start..start + m] == word[..] {
                    return false;
                }
            }
        }
    }
    true
}

/// Number of crossings of the closed l-free path `p` over the zigzag path
/// `z`, counted over maximal runs of arcs following `z` and all alignments.
pub fn crossing_count(dimer: &Dimer, p: &QuiverPath, z: &ZigzagPath) -> Result<u32, JacobiError> {
    if !is_l_free(dimer, p) {
        return Err(JacobiError::NotLfree);
    }
    let n = p.arcs.len();
    if n == 0 {
        return Ok(0);
    }
    let zn = z.len();
    // does the cyclic pair (p[i], p[i+1]) follow z?
    let follows: Vec<bool> = (0..n)
        .map(|i| {
            let a = p.arcs[i];
            let b = p.arcs[(i + 1) % n];
            z.steps.iter().any(|&(za, zt)| za == a && dimer.turn_successor(za, zt) == b)
        })
        .collect();
    if follows.iter().all(|&f| f) {
        return Ok(0);
    }
    // maximal runs: a run starting at i covers arcs i..=j with pairs
    // i..j-1 following and pairs i-1, j not following
    let mut count = 0u32;
    let mut i = 0usize;
    while i < n {
        let prev = (i + n - 1) % n;
        if follows[prev] {
            i += 1;
            continue;
        }
        // run begins at arc i
        let mut len = 1usize;
        while follows[(i + len - 1) % n] {
            len += 1;
        }
        // alignments of the run inside z
        let run: Vec<u32> = (0..len).map(|k| p.arcs[(i + k) % n]).collect();
        // the run must also be on z as a single arc when len == 1
        for s in 0..zn {
            let matches = (0..len).all(|k| z.steps[(s + k) % zn].0 == run[k]);
            if !matches {
                continue;
            }
            // consecutive germ consistency within the run
            let chained = (0..len.saturating_sub(1)).all(|k| {
                let (za, zt) = z.steps[(s + k) % zn];
                dimer.turn_successor(za, zt) == run[k + 1]
            });
            if !chained {
                continue;
            }
            let entry_arc = p.arcs[(i + n - 1) % n];
            let exit_arc = p.arcs[(i + len) % n];
            let z_in = z.steps[(s + zn - 1) % zn].0;
            let z_out = z.steps[(s + len) % zn].0;
            let v_start = dimer.arcs[run[0] as usize].tail;
            let v_end = dimer.arcs[run[len - 1] as usize].head;
            let side_entry = rotation_side(
                dimer,
                v_start,
                End::head(z_in),
                End::tail(run[0]),
                End::head(entry_arc),
            );
            let side_exit = rotation_side(
                dimer,
                v_end,
                End::head(run[len - 1]),
                End::tail(z_out),
                End::tail(exit_arc),
            );
            if let (Some(a), Some(b)) = (side_entry, side_exit) {
                if a != b {
                    count += 1;
                }
            }
        }
        i += len.max(1);
        if len >= n {
            break;
        }
    }
    Ok(count)
}

/// Which side of the zigzag passage (in-end .. out-end) the query end lies
/// on: true when it appears strictly between them in rotation order.
fn rotation_side(dimer: &Dimer, v: u32, from: End, to: End, query: End) -> Option<bool> {
    let rot = &dimer.rotation[v as usize];
    let pos = |e: End| rot.iter().position(|&x| x == e);
    let (f, t, q) = (pos(from)?, pos(to)?, pos(query)?);
    if q == f || q == t {
        return None;
    }
    let m = rot.len();
    let mut k = (f + 1) % m;
    while k != t {
        if k == q {
            return Some(true);
        }
        k = (k + 1) % m;
    }
    Some(false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedVerdict {
    BoundedCertified(String),
    BoundedUpToCap,
    UnboundedSuspected(Vec<QuiverPath>),
}

/// Certify bounded type through structural criteria, falling back to a
/// breadth-first search of the classes of all face boundary words.
pub fn bounded_type_check(
    dimer: &Dimer,
    quiver: Arc<Quiver>,
    length_cap: usize,
    assume_cancellation: bool,
) -> BoundedVerdict {
    let lens: BTreeSet<usize> = dimer.faces.iter().map(|f| f.arcs.len()).collect();
    if lens.len() == 1 {
        return BoundedVerdict::BoundedCertified("equal face lengths".into());
    }
    if dimer.genus() == 1 {
        let matchings = perfect_matchings(dimer);
        let mut degree = vec![0usize; dimer.arcs.len()];
        for m in &matchings {
            for &a in m {
                degree[a as usize] += 1;
            }
        }
        if !degree.is_empty() && degree.iter().all(|&d| d > 0) {
            return BoundedVerdict::BoundedCertified(
                "torus grading from perfect matchings".into(),
            );
        }
    }
    if assume_cancellation && dimer.faces.iter().all(|f| f.arcs.len() >= 4) {
        return BoundedVerdict::BoundedCertified("no triangles".into());
    }
    // fall back: saturate the classes of all face boundary words
    let mut ctx = JacobiContext::new(dimer, quiver.clone(), length_cap);
    for face in &dimer.faces {
        let m = face.arcs.len();
        for rot in 0..m {
            let arcs: Vec<u32> = (0..m).map(|k| face.arcs[(rot + k) % m]).collect();
            let p = QuiverPath::from_arcs(&quiver, arcs).unwrap();
            let class = ctx.fterm_class(&p);
            if !class.saturated {
                let chain = growth_chain(&mut ctx, &p, length_cap);
                return BoundedVerdict::UnboundedSuspected(chain);
            }
        }
    }
    BoundedVerdict::BoundedUpToCap
}

/// A chain of flips of strictly growing length, as an unboundedness witness.
fn growth_chain(ctx: &mut JacobiContext, p: &QuiverPath, cap: usize) -> Vec<QuiverPath> {
    let mut chain = vec![p.clone()];
    let mut cur = p.clone();
    loop {
        let next = ctx.flips_of(&cur).into_iter().find(|q| q.arcs.len() > cur.arcs.len());
        match next {
            Some(q) if q.arcs.len() <= cap + ctx.dimer.max_face_len() => {
                chain.push(q.clone());
                cur = q;
                if cur.arcs.len() > cap {
                    return chain;
                }
            }
            _ => return chain,
        }
    }
}

/// F-relatedness for a raw relation basis: for each basis element, any two
/// paths appearing in it may be swapped as contiguous subpaths.
pub struct RelationBasis {
    pub quiver: Arc<Quiver>,
    pub elements: Vec<NcPoly>,
}

impl RelationBasis {
    fn moves(&self) -> Vec<(Vec<u32>, Vec<u32>)> {
        let mut out = Vec::new();
        for e in &self.elements {
            let paths: Vec<&QuiverPath> = e.terms.keys().collect();
            for x in &paths {
                for y in &paths {
                    if x != y {
                        out.push((x.arcs.clone(), y.arcs.clone()));
                    }
                }
            }
        }
        out
    }

    /// BFS class of `p` under the basis moves, with a growth witness when
    /// the cap truncates the search.
    pub fn f_related_class(
        &self,
        p: &QuiverPath,
        cap: usize,
    ) -> (BTreeSet<QuiverPath>, bool, Vec<QuiverPath>) {
        let moves = self.moves();
        let mut members = BTreeSet::from([p.clone()]);
        let mut parent: HashMap<QuiverPath, QuiverPath> = HashMap::new();
        let mut queue = VecDeque::from([p.clone()]);
        let mut saturated = true;
        let mut overflow: Option<QuiverPath> = None;
        while let Some(cur) = queue.pop_front() {
            for (from, to) in &moves {
                if from.len() > cur.arcs.len() {
                    continue;
                }
                for start in 0..=(cur.arcs.len() - from.len()) {
                    if &cur.arcs[start..start + from.len()] == from.as_slice() {
                        let mut arcs = Vec::new();
                        arcs.extend_from_slice(&cur.arcs[..start]);
                        arcs.extend_from_slice(to);
                        arcs.extend_from_slice(&cur.arcs[start + from.len()..]);
                        let next = QuiverPath { source: cur.source, arcs };
                        if next.arcs.len() > cap {
                            saturated = false;
                            if overflow.is_none() {
                                parent.insert(next.clone(), cur.clone());
                                overflow = Some(next);
                            }
                            continue;
                        }
                        if members.insert(next.clone()) {
                            parent.insert(next.clone(), cur.clone());
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
        let witness = match overflow {
            Some(end) => {
                let mut chain = vec![end];
                while let Some(prev) = parent.get(chain.last().unwrap()) {
                    chain.push(prev.clone());
                    if prev == p {
                        break;
                    }
                }
                chain.reverse();
                chain
            }
            None => Vec::new(),
        };
        (members, saturated, witness)
    }

    pub fn bounded_type_check(&self, seeds: &[QuiverPath], cap: usize) -> BoundedVerdict {
        for p in seeds {
            let (_, saturated, witness) = self.f_related_class(p, cap);
            if !saturated {
                return BoundedVerdict::UnboundedSuspected(witness);
            }
        }
        BoundedVerdict::BoundedUpToCap
    }
}

/// All arc subsets containing exactly one arc of every face boundary,
/// found by backtracking over the faces.
pub fn perfect_matchings(dimer: &Dimer) -> Vec<BTreeSet<u32>> {
    let nfaces = dimer.faces.len();
    let mut result = Vec::new();
    let mut chosen: BTreeSet<u32> = BTreeSet::new();
    // count of chosen arcs per face
    let mut counts = vec![0usize; nfaces];
    let face_pair = |a: u32| {
        let (f1, _) = dimer.face_of(a, Orientation::Clockwise);
        let (f2, _) = dimer.face_of(a, Orientation::Counterclockwise);
        (f1 as usize, f2 as usize)
    };
    fn rec(
        dimer: &Dimer,
        face: usize,
        chosen: &mut BTreeSet<u32>,
        counts: &mut Vec<usize>,
        face_pair: &dyn Fn(u32) -> (usize, usize),
        result: &mut Vec<BTreeSet<u32>>,
    ) {
        if face == dimer.faces.len() {
            if counts.iter().all(|&c| c == 1) {
                result.push(chosen.clone());
            }
            return;
        }
        if counts[face] == 1 {
            rec(dimer, face + 1, chosen, counts, face_pair, result);
            return;
        }
        if counts[face] > 1 {
            return;
        }
        let arcs = dimer.faces[face].arcs.clone();
        for a in arcs {
            if chosen.contains(&a) {
                continue;
            }
            let (f1, f2) = face_pair(a);
            if counts[f1] >= 1 || counts[f2] >= 1 {
                continue;
            }
            chosen.insert(a);
            counts[f1] += 1;
            counts[f2] += 1;
            rec(dimer, face + 1, chosen, counts, face_pair, result);
            chosen.remove(&a);
            counts[f1] -= 1;
            counts[f2] -= 1;
        }
    }
    rec(dimer, 0, &mut chosen, &mut counts, &face_pair, &mut result);
    result.sort();
    result.dedup();
    result
}

#[derive(Debug, Clone)]
pub enum MembershipVerdict {
    /// explicit combination: (relation index, left path, right path, coefficient)
    Member(Vec<(usize, QuiverPath, QuiverPath, DefSeries)>),
    NotMemberUpToCaps,
}

/// Enumerate composable paths from `source` up to `max_len`.
fn paths_from(quiver: &Quiver, source: u32, max_len: usize) -> Vec<QuiverPath> {
    let mut out = vec![QuiverPath::vertex(source)];
    let mut frontier = vec![QuiverPath::vertex(source)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            let at = p.target(quiver);
            for a in quiver.out_arcs(at) {
                let mut arcs = p.arcs.clone();
                arcs.push(a);
                next.push(QuiverPath { source, arcs });
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn paths_to(quiver: &Quiver, target: u32, max_len: usize) -> Vec<QuiverPath> {
    let mut out = Vec::new();
    for v in 0..quiver.vertices.len() as u32 {
        for p in paths_from(quiver, v, max_len) {
            if p.target(quiver) == target {
                out.push(p);
            }
        }
    }
    out
}

/// Incremental exact echelon over the rationals with tracked combinations.
struct Echelon {
    /// (pivot row, reduced vector, combination of inserted columns)
    rows: Vec<(usize, BTreeMap<usize, Rat>, BTreeMap<usize, Rat>)>,
}

impl Echelon {
    fn new() -> Echelon {
        Echelon { rows: Vec::new() }
    }

    /// Reduce a vector, returning the remainder and the combination of
    /// previously inserted columns that was subtracted.
    fn reduce(&self, mut v: BTreeMap<usize, Rat>) -> (BTreeMap<usize, Rat>, BTreeMap<usize, Rat>) {
        let mut combo: BTreeMap<usize, Rat> = BTreeMap::new();
        for (pivot, vec, comb) in &self.rows {
            if let Some(c) = v.get(pivot).cloned() {
                if c.is_zero() {
                    continue;
                }
                let factor = c / vec[pivot].clone();
                for (r, x) in vec {
                    let e = v.entry(*r).or_insert_with(Rat::zero);
                    *e -= factor.clone() * x.clone();
                }
                v.retain(|_, x| !x.is_zero());
                for (c2, x) in comb {
                    let e = combo.entry(*c2).or_insert_with(Rat::zero);
                    *e += factor.clone() * x.clone();
                }
            }
        }
        combo.retain(|_, x| !x.is_zero());
        (v, combo)
    }

    /// Insert column `id`; returns false if dependent (and nothing is added).
    fn insert(&mut self, id: usize, v: BTreeMap<usize, Rat>) -> bool {
        let (rem, mut combo) = self.reduce(v);
        if rem.is_empty() {
            return false;
        }
        let pivot = *rem.keys().next().unwrap();
        // the combination producing `rem` is id - combo
        let mut c = BTreeMap::from([(id, Rat::one())]);
        for (k, x) in combo.iter_mut() {
            c.insert(*k, -x.clone());
        }
        self.rows.push((pivot, rem, c));
        self.rows.sort_by_key(|r| r.0);
        true
    }

    /// Solve `target = sum c_i col_i` over the inserted columns.
    fn solve(&self, v: BTreeMap<usize, Rat>) -> Option<BTreeMap<usize, Rat>> {
        let (rem, combo) = self.reduce(v);
        rem.is_empty().then_some(combo)
    }
}

/// Exact truncated two-sided ideal membership: search for an expression of
/// `x` as a combination of monomial multiples of sandwiched relations
/// `p . r . s` with bounded path lengths, order by order in the deformation
/// variables.
pub fn ideal_membership_truncated(
    x: &NcPoly,
    relations: &[NcPoly],
    q_order: u32,
    length_cap: usize,
) -> Result<MembershipVerdict, JacobiError> {
    let quiver = x.quiver.clone();
    // sandwich generators with classical parts
    struct Gen {
        rel: usize,
        left: QuiverPath,
        right: QuiverPath,
        classical: BTreeMap<QuiverPath, Rat>,
        full: NcPoly,
    }
    let mut gens: Vec<Gen> = Vec::new();
    for (j, r) in relations.iter().enumerate() {
        let endpoints: BTreeSet<(u32, u32)> =
            r.terms.keys().map(|p| (p.source, p.target(&quiver))).collect();
        if endpoints.len() != 1 {
            return Err(JacobiError::MixedEndpoints);
        }
        let (src, tgt) = *endpoints.iter().next().unwrap();
        let rlen = r.max_path_len();
        if rlen > length_cap {
            continue;
        }
        let budget = length_cap - rlen;
        for s in paths_to(&quiver, src, budget) {
            for p in paths_from(&quiver, tgt, budget - s.len()) {
                let pnc = NcPoly::from_path(quiver.clone(), x.order, p.clone());
                let snc = NcPoly::from_path(quiver.clone(), x.order, s.clone());
                let full = pnc.mul(r).unwrap().mul(&snc).unwrap();
                if full.is_zero() {
                    continue;
                }
                let classical: BTreeMap<QuiverPath, Rat> = full
                    .classical_part()
                    .terms
                    .iter()
                    .map(|(k, v)| (k.clone(), v.coefficient(&QMonomial::one())))
                    .collect();
                if classical.is_empty() {
                    continue;
                }
                gens.push(Gen { rel: j, left: p, right: s.clone(), classical, full });
            }
        }
    }
    // row interning over paths
    let mut row_of: HashMap<QuiverPath, usize> = HashMap::new();
    let intern = |p: &QuiverPath, row_of: &mut HashMap<QuiverPath, usize>| -> usize {
        let next = row_of.len();
        *row_of.entry(p.clone()).or_insert(next)
    };
    let mut ech = Echelon::new();
    for (i, g) in gens.iter().enumerate() {
        let v: BTreeMap<usize, Rat> =
            g.classical.iter().map(|(p, c)| (intern(p, &mut row_of), c.clone())).collect();
        ech.insert(i, v);
    }
    // order-by-order lifting
    let mut residual = x.truncate(q_order);
    let mut combination: BTreeMap<usize, DefSeries> = BTreeMap::new();
    for d in 0..=q_order {
        // collect the degree-d monomials present
        let mut monos: BTreeSet<QMonomial> = BTreeSet::new();
        for c in residual.terms.values() {
            for m in c.terms.keys() {
                if m.degree() == d {
                    monos.insert(m.clone());
                }
            }
        }
        for m in monos {
            let mut v: BTreeMap<usize, Rat> = BTreeMap::new();
            for (p, c) in &residual.terms {
                let coef = c.coefficient(&m);
                if !coef.is_zero() {
                    if let Some(&row) = row_of.get(p) {
                        v.insert(row, coef);
                    } else {
                        // a path outside the generator span
                        return Ok(MembershipVerdict::NotMemberUpToCaps);
                    }
                }
            }
            if v.is_empty() {
                continue;
            }
            let combo = match ech.solve(v) {
                Some(c) => c,
                None => return Ok(MembershipVerdict::NotMemberUpToCaps),
            };
            for (gi, coef) in combo {
                let g = &gens[gi];
                let scaled = g.full.scale_series(&DefSeries::monomial(
                    m.clone(),
                    coef.clone(),
                    residual.order,
                ));
                residual = residual.sub(&scaled).unwrap();
                let entry = combination
                    .entry(gi)
                    .or_insert_with(|| DefSeries::zero(q_order));
                entry.add_term(m.clone(), coef);
            }
        }
        // degree-d part must now vanish
        for c in residual.terms.values() {
            if c.terms.keys().any(|mm| mm.degree() == d) {
                return Ok(MembershipVerdict::NotMemberUpToCaps);
            }
        }
    }
    let combo: Vec<(usize, QuiverPath, QuiverPath, DefSeries)> = combination
        .into_iter()
        .map(|(gi, ser)| (gens[gi].rel, gens[gi].left.clone(), gens[gi].right.clone(), ser))
        .collect();
    Ok(MembershipVerdict::Member(combo))
}

#[derive(Debug, Clone)]
pub enum QuasiFlatVerdict {
    QuasiFlat,
    Violation(NcPoly),
}

/// Truncated quasi-flatness: every element of the ideal span with vanishing
/// classical part must be expressible with order >= 1 coefficients on the
/// sandwiched relations.
pub fn quasi_flat_check_truncated(
    quiver: Arc<Quiver>,
    relations_q: &[NcPoly],
    q_order: u32,
    length_cap: usize,
) -> Result<QuasiFlatVerdict, JacobiError> {
    // sandwiched relation values
    let mut values: Vec<NcPoly> = Vec::new();
    for r in relations_q {
        let endpoints: BTreeSet<(u32, u32)> =
            r.terms.keys().map(|p| (p.source, p.target(&quiver))).collect();
        if endpoints.len() != 1 {
            return Err(JacobiError::MixedEndpoints);
        }
        let (src, tgt) = *endpoints.iter().next().unwrap();
        let rlen = r.max_path_len();
        if rlen > length_cap {
            continue;
        }
        let budget = length_cap - rlen;
        for s in paths_to(&quiver, src, budget) {
            for p in paths_from(&quiver, tgt, budget - s.len()) {
                let pnc = NcPoly::from_path(quiver.clone(), q_order, p.clone());
                let snc = NcPoly::from_path(quiver.clone(), q_order, s.clone());
                let v = pnc.mul(&r.truncate(q_order)).unwrap().mul(&snc).unwrap();
                if !v.is_zero() {
                    values.push(v);
                }
            }
        }
    }
    // monomial multiples
    let monomials = all_monomials(quiver.vars.len() as u32, q_order);
    let mut gens: Vec<NcPoly> = Vec::new();
    let mut gens_pos: Vec<NcPoly> = Vec::new();
    for v in &values {
        for m in &monomials {
            let g = v.scale_series(&DefSeries::monomial(m.clone(), Rat::one(), q_order));
            if g.is_zero() {
                continue;
            }
            if m.degree() >= 1 {
                gens_pos.push(g.clone());
            }
            gens.push(g);
        }
    }
    // vectorize over rows (path, monomial)
    let mut row_of: HashMap<(QuiverPath, QMonomial), usize> = HashMap::new();
    let vec_of = |x: &NcPoly, row_of: &mut HashMap<(QuiverPath, QMonomial), usize>| {
        let mut v: BTreeMap<usize, Rat> = BTreeMap::new();
        for (p, c) in &x.terms {
            for (m, r) in &c.terms {
                let next = row_of.len();
                let row = *row_of.entry((p.clone(), m.clone())).or_insert(next);
                v.insert(row, r.clone());
            }
        }
        v
    };
    // echelon of the infinitesimal span
    let mut w1 = Echelon::new();
    for (i, g) in gens_pos.iter().enumerate() {
        let v = vec_of(g, &mut row_of);
        w1.insert(i, v);
    }
    // elements of the span with vanishing classical part: kernel of the
    // classical projection, built triangularly
    let mut classical = Echelon::new();
    let mut kept: Vec<usize> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let c = g.classical_part();
        if c.is_zero() {
            // already infinitesimal
            let v = vec_of(g, &mut row_of);
            if w1.solve(v).is_none() {
                return Ok(QuasiFlatVerdict::Violation(g.clone()));
            }
            continue;
        }
        let cv = vec_of(&c, &mut row_of);
        let (rem, combo) = classical.reduce(cv.clone());
        if rem.is_empty() {
            // g - sum combo_k gen_kept[k] has zero classical part
            let mut u = g.clone();
            for (k, coef) in combo {
                u = u.sub(&gens[kept[k]].scale(&coef)).unwrap();
            }
            if u.is_zero() {
                continue;
            }
            let v = vec_of(&u, &mut row_of);
            if w1.solve(v).is_none() {
                return Ok(QuasiFlatVerdict::Violation(u));
            }
        } else {
            let id = kept.len();
            classical.insert(id, cv);
            kept.push(i);
        }
    }
    Ok(QuasiFlatVerdict::QuasiFlat)
}

fn all_monomials(nvars: u32, max_degree: u32) -> Vec<QMonomial> {
    let mut out = vec![QMonomial::one()];
    let mut frontier = vec![QMonomial::one()];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for m in &frontier {
            for v in 0..nvars {
                let n = m.mul(&QMonomial::var(v));
                next.push(n);
            }
        }
        next.sort();
        next.dedup();
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimer::{sphere3, torus4};
    use crate::mirror::Mirror;
    use crate::ncpoly::QuiverArc;

    fn sphere3_mirror() -> Mirror {
        Mirror::new(sphere3().unwrap()).unwrap()
    }

    fn torus4_mirror() -> Mirror {
        Mirror::new(torus4().unwrap()).unwrap()
    }

    #[test]
    fn commutators_die_in_sphere3_mirror() {
        let m = sphere3_mirror();
        let mut ctx = JacobiContext::new(&m.dual, m.quiver.clone(), 12);
        let q = m.quiver.clone();
        let a = q.arc_by_name("a").unwrap();
        let b = q.arc_by_name("b").unwrap();
        let ab = NcPoly::from_word(q.clone(), 0, &[a, b]).unwrap();
        let ba = NcPoly::from_word(q.clone(), 0, &[b, a]).unwrap();
        let diff = ab.sub(&ba).unwrap();
        assert!(ctx.is_zero_mod_relations(&diff).unwrap());
        // class of ab is {ab, ba}
        let p = QuiverPath::from_word(&q, &[a, b]).unwrap();
        let class = ctx.fterm_class(&p);
        assert!(class.saturated);
        assert_eq!(class.members.len(), 2);
    }

    #[test]
    fn torus4_fterm_example() {
        let m = torus4_mirror();
        let mut ctx = JacobiContext::new(&m.dual, m.quiver.clone(), 10);
        let q = m.quiver.clone();
        let n = |s: &str| q.arc_by_name(s).unwrap();
        // a4 b2 a2 = a1 b2 a3
        let p = QuiverPath::from_word(&q, &[n("a4"), n("b2"), n("a2")]).unwrap();
        let class = ctx.fterm_class(&p);
        let other = QuiverPath::from_word(&q, &[n("a1"), n("b2"), n("a3")]).unwrap();
        assert!(class.members.contains(&other));
        let x = NcPoly::from_path(q.clone(), 0, p)
            .sub(&NcPoly::from_path(q.clone(), 0, other))
            .unwrap();
        assert!(ctx.is_zero_mod_relations(&x).unwrap());
        // a single arrow with no applicable flips
        let single = QuiverPath::from_word(&q, &[n("a1")]).unwrap();
        let c = ctx.fterm_class(&single);
        assert_eq!(c.members.len(), 1);
    }

    #[test]
    fn normal_form_idempotent_and_congruent() {
        let m = torus4_mirror();
        let mut ctx = JacobiContext::new(&m.dual, m.quiver.clone(), 12);
        let w = m.classical_superpotential(2);
        let x = w.mul(&w).unwrap();
        let n1 = ctx.normal_form(&x).unwrap();
        let n2 = ctx.normal_form(&n1).unwrap();
        assert_eq!(n1, n2);
    }

    #[test]
    fn classical_potential_is_central_sphere3() {
        let m = sphere3_mirror();
        let mut ctx = JacobiContext::new(&m.dual, m.quiver.clone(), 12);
        let ell = m.classical_potential_raw(0);
        for x in 0..m.quiver.arcs.len() as u32 {
            let arrow = NcPoly::from_word(m.quiver.clone(), 0, &[x]).unwrap();
            let comm = ell.mul(&arrow).unwrap().sub(&arrow.mul(&ell).unwrap()).unwrap();
            assert!(ctx.is_zero_mod_relations(&comm).unwrap());
        }
    }

    #[test]
    fn potential_face_choice_invariant() {
        let m = torus4_mirror();
        let mut ctx = JacobiContext::new(&m.dual, m.quiver.clone(), 12);
        // all face cycles at a vertex are F-term equivalent
        for v in 0..m.dual.punctures.len() as u32 {
            let mut reps = Vec::new();
            for face in &m.dual.faces {
                let mc = face.arcs.len();
                for i in 0..mc {
                    if m.dual.arcs[face.arcs[i] as usize].tail == v {
                        let arcs: Vec<u32> = (0..mc).map(|k| face.arcs[(i + k) % mc]).collect();
                        let p = QuiverPath::from_arcs(&m.quiver, arcs).unwrap();
                        reps.push(ctx.fterm_class(&p).representative.clone());
                    }
                }
            }
            assert!(reps.windows(2).all(|w| w[0] == w[1]), "vertex {v} cycles differ");
        }
    }

    #[test]
    fn mirror_object_factorization_identity() {
        // g.f = ell_t and f.g = ell_h in Jac
        for m in [sphere3_mirror(), torus4_mirror()] {
            let mut ctx = JacobiContext::new(&m.dual, m.quiver.clone(), 12);
            let ell = m.classical_potential_raw(0);
            for a in 0..m.quiver.arcs.len() as u32 {
                let mf = m.classical_mirror_object(a, 0);
                let (de, dodd) = mf.defects(&ell);
                assert!(ctx.is_zero_mod_relations(&de).unwrap());
                assert!(ctx.is_zero_mod_relations(&dodd).unwrap());
            }
        }
    }

    #[test]
    fn perfect_matchings_sphere3_and_torus4() {
        let d = sphere3().unwrap();
        let ms = perfect_matchings(&d);
        assert_eq!(ms.len(), 3);
        assert!(ms.iter().all(|m| m.len() == 1));
        // brute-force oracle over all subsets
        let d = torus4().unwrap();
        let ms = perfect_matchings(&d);
        let mut brute = 0;
        for mask in 0u32..(1 << d.arcs.len()) {
            let set: BTreeSet<u32> =
                (0..d.arcs.len() as u32).filter(|&a| mask & (1 << a) != 0).collect();
            let ok = d.faces.iter().all(|f| {
                f.arcs.iter().filter(|a| set.contains(a)).count() == 1
            });
            if ok {
                brute += 1;
            }
        }
        assert_eq!(ms.len(), brute);
        assert!(ms.len() > 0);
        // positivity: every arc is in some matching (torus grading)
        let mut deg = vec![0; d.arcs.len()];
        for m in &ms {
            for &a in m {
                deg[a as usize] += 1;
            }
        }
        assert!(deg.iter().all(|&x| x > 0));
    }

    #[test]
    fn bounded_type_criteria() {
        let m = sphere3_mirror();
        match bounded_type_check(&m.dual, m.quiver.clone(), 20, false) {
            BoundedVerdict::BoundedCertified(r) => assert!(r.contains("equal face lengths")),
            v => panic!("unexpected {v:?}"),
        }
        let m = torus4_mirror();
        match bounded_type_check(&m.dual, m.quiver.clone(), 20, false) {
            BoundedVerdict::BoundedCertified(_) => {}
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn unbounded_raw_basis_example() {
        // basis {AB + ABC, AB - ABC} over one vertex with loops A, B, C
        let q = Arc::new(Quiver {
            name: "free3".into(),
            vertices: vec!["v".into()],
            arcs: ["A", "B", "C"]
                .iter()
                .map(|n| QuiverArc { name: n.to_string(), source: 0, target: 0 })
                .collect(),
            vars: vec![],
        });
        let ab = QuiverPath::from_word(&q, &[0, 1]).unwrap();
        let abc = QuiverPath::from_word(&q, &[0, 1, 2]).unwrap();
        let mk = |p: &QuiverPath, s: i64| {
            let mut x = NcPoly::zero(q.clone(), 0);
            x.add_path_monomial(p.clone(), QMonomial::one(), crate::ncpoly::rat(s));
            x
        };
        let e1 = mk(&ab, 1).add(&mk(&abc, 1)).unwrap();
        let e2 = mk(&ab, 1).sub(&mk(&abc, 1)).unwrap();
        let basis = RelationBasis { quiver: q.clone(), elements: vec![e1, e2] };
        match basis.bounded_type_check(&[ab.clone()], 6) {
            BoundedVerdict::UnboundedSuspected(chain) => {
                assert!(chain.len() >= 3);
                assert_eq!(chain[0], ab);
                // the chain starts AB ~ ABC ~ ABCC
                assert_eq!(chain[1], abc);
                assert_eq!(chain[2].arcs.len(), 4);
            }
            v => panic!("expected unbounded, got {v:?}"),
        }
        // the basis {AB, ABC} has singleton classes
        let f1 = mk(&ab, 1);
        let f2 = mk(&abc, 1);
        let good = RelationBasis { quiver: q.clone(), elements: vec![f1, f2] };
        match good.bounded_type_check(&[ab], 6) {
            BoundedVerdict::BoundedUpToCap => {}
            v => panic!("expected bounded, got {v:?}"),
        }
    }

    #[test]
    fn membership_basics() {
        let m = sphere3_mirror();
        let rels = m.classical_relations(2);
        // zero is a member with the empty combination
        let zero = NcPoly::zero(m.quiver.clone(), 2);
        match ideal_membership_truncated(&zero, &rels, 2, 6).unwrap() {
            MembershipVerdict::Member(c) => assert!(c.is_empty()),
            _ => panic!("zero must be a member"),
        }
        // a vertex idempotent is not in the ideal
        let one = NcPoly::vertex(m.quiver.clone(), 2, 0);
        match ideal_membership_truncated(&one, &rels, 2, 5).unwrap() {
            MembershipVerdict::NotMemberUpToCaps => {}
            _ => panic!("1 must not be a member"),
        }
        // ab - ba is a member, with a verified combination
        let q = m.quiver.clone();
        let a = q.arc_by_name("a").unwrap();
        let b = q.arc_by_name("b").unwrap();
        let x = NcPoly::from_word(q.clone(), 2, &[a, b])
            .unwrap()
            .sub(&NcPoly::from_word(q.clone(), 2, &[b, a]).unwrap())
            .unwrap();
        match ideal_membership_truncated(&x, &rels, 2, 6).unwrap() {
            MembershipVerdict::Member(combo) => {
                let mut acc = NcPoly::zero(q.clone(), 2);
                for (j, p, s, ser) in combo {
                    let pnc = NcPoly::from_path(q.clone(), 2, p);
                    let snc = NcPoly::from_path(q.clone(), 2, s);
                    let v = pnc.mul(&rels[j]).unwrap().mul(&snc).unwrap();
                    acc = acc.add(&v.scale_series(&ser)).unwrap();
                }
                assert_eq!(acc, x);
            }
            _ => panic!("ab - ba must be a member"),
        }
    }

    fn poly_ring_quiver() -> Arc<Quiver> {
        Arc::new(Quiver {
            name: "polyX".into(),
            vertices: vec!["*".into()],
            arcs: vec![QuiverArc { name: "X".into(), source: 0, target: 0 }],
            vars: vec!["q".into()],
        })
    }

    #[test]
    fn quasi_flat_toy_table() {
        let q = poly_ring_quiver();
        let order = 3;
        let xpath = QuiverPath::from_word(&q, &[0]).unwrap();
        // I_q = (X + q): quasi-flat
        let mut xq = NcPoly::from_path(q.clone(), order, xpath.clone());
        xq.add_path_monomial(QuiverPath::vertex(0), QMonomial::var(0), Rat::one());
        match quasi_flat_check_truncated(q.clone(), &[xq], order, 4).unwrap() {
            QuasiFlatVerdict::QuasiFlat => {}
            QuasiFlatVerdict::Violation(w) => panic!("(X+q) should be quasi-flat: {}", w.serialize()),
        }
        // I_q = (X) + (q): violation with witness q
        let x = NcPoly::from_path(q.clone(), order, xpath);
        let mut qq = NcPoly::zero(q.clone(), order);
        qq.add_path_monomial(QuiverPath::vertex(0), QMonomial::var(0), Rat::one());
        match quasi_flat_check_truncated(q.clone(), &[x, qq], order, 4).unwrap() {
            QuasiFlatVerdict::Violation(w) => {
                // the witness reduces to q * 1
                assert!(w.terms.contains_key(&QuiverPath::vertex(0)));
            }
            QuasiFlatVerdict::QuasiFlat => panic!("(X)+(q) should violate quasi-flatness"),
        }
        // empty relation list is trivially quasi-flat
        match quasi_flat_check_truncated(q.clone(), &[], order, 4).unwrap() {
            QuasiFlatVerdict::QuasiFlat => {}
            _ => panic!(),
        }
    }

    #[test]
    fn crossing_count_basics() {
        let d = torus4().unwrap();
        let quiver = Arc::new(d.path_quiver(vec![]));
        let paths = d.zigzag_paths();
        // a face boundary is not l-free
        let face = &d.faces[0];
        let p = QuiverPath::from_arcs(&quiver, face.arcs.clone()).unwrap();
        assert_eq!(crossing_count(&d, &p, &paths[0]), Err(JacobiError::NotLfree));
        // a zigzag cycle itself has zero crossings with everything it follows
        let z = &paths[0];
        let arcs: Vec<u32> = z.steps.iter().map(|g| g.0).collect();
        let zp = QuiverPath::from_arcs(&quiver, arcs).unwrap();
        assert!(is_l_free(&d, &zp));
        assert_eq!(crossing_count(&d, &zp, z).unwrap(), 0);
    }
}
