//! Midpoint polygons and the deformed mirror data built from them: the
//! deformed superpotential, potential, complements and mirror objects.
//!
//! A midpoint polygon is realized as a closed embedded walk in the universal
//! cover. The boundary follows zigzag strands in their own direction; a
//! corner at an arc midpoint switches strands and points into a face.
//! Clockwise polygons keep their interior to the right of travel (corners
//! arrive on left-turn states and depart on right turns); counterclockwise
//! polygons mirror this. Covered punctures are counted by flood fill of the
//! heart/star cell decomposition cut out by the zigzag curves.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::cover::{CoverError, CoverPatch};
use crate::dimer::{Germ, Orientation, Turn};
use crate::mirror::{MatrixFactorization, Mirror};
use crate::ncpoly::{DefSeries, NcPoly, QMonomial, QuiverPath, Rat};
use num::One;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DisksError {
    #[error("RADIUS_INSUFFICIENT: cover development too small even after retries")]
    RadiusInsufficient,
    #[error("INCONSISTENT_DIMER: midpoint polygons need geometric consistency or a sphere dimer")]
    InconsistentDimer,
    #[error("NON_COMPOSABLE: input morphisms do not chain")]
    NonComposable,
}

impl From<CoverError> for DisksError {
    fn from(_: CoverError) -> Self {
        DisksError::RadiusInsufficient
    }
}

/// A midpoint polygon with a marked start corner. Corners are listed in
/// walk order (the marked corner first); for counterclockwise polygons the
/// path recording reverses the tail of the walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedPolygon {
    pub class: Orientation,
    /// (base arc, pointing base face) per corner, walk order, anchor first
    pub corners: Vec<(u32, u32)>,
    /// angle counts per segment, walk order; all odd
    pub segment_lengths: Vec<u32>,
    /// interior crossing germs per segment, walk order
    pub segment_crossings: Vec<Vec<Germ>>,
    /// covered punctures with multiplicity
    pub punc: QMonomial,
    /// left-turn steps along the boundary (sign-law audit data)
    pub left_steps: u32,
    /// covered cells of the cover region
    pub hearts: u32,
    pub stars: u32,
}

impl MarkedPolygon {
    pub fn anchor(&self) -> u32 {
        self.corners[0].0
    }

    /// Sign |D| = sum (n_i - 1)/2 mod 2.
    pub fn sign_odd(&self) -> bool {
        self.segment_lengths.iter().map(|&n| (n - 1) / 2).sum::<u32>() % 2 == 1
    }

    /// Corner arcs in disk order (e_1 = the marked corner): walk order for
    /// clockwise polygons, reversed tail for counterclockwise ones.
    pub fn e_sequence(&self) -> Vec<u32> {
        let arcs: Vec<u32> = self.corners.iter().map(|c| c.0).collect();
        match self.class {
            Orientation::Clockwise => arcs,
            Orientation::Counterclockwise => {
                let mut out = vec![arcs[0]];
                out.extend(arcs[1..].iter().rev());
                out
            }
        }
    }

    /// The path recording of the marked polygon: traversal in e-order.
    pub fn arcs_path(&self, mirror: &Mirror) -> QuiverPath {
        QuiverPath::from_arcs(&mirror.quiver, self.e_sequence())
            .expect("polygon corners compose in the mirror quiver")
    }

    /// The path recording of the same walk re-marked to end at the anchor
    /// (used for potentials at right-turn identities and complements).
    pub fn ending_path(&self, mirror: &Mirror) -> QuiverPath {
        let arcs: Vec<u32> = self.corners[1..]
            .iter()
            .map(|c| c.0)
            .chain(std::iter::once(self.corners[0].0))
            .collect();
        QuiverPath::from_arcs(&mirror.quiver, arcs).expect("polygon corners compose")
    }

    /// Strip the anchor from `ending_path`: the complement contribution.
    pub fn complement_path(&self, mirror: &Mirror) -> QuiverPath {
        if self.corners.len() == 1 {
            return QuiverPath::vertex(mirror.quiver.source(self.anchor()));
        }
        let arcs: Vec<u32> = self.corners[1..].iter().map(|c| c.0).collect();
        QuiverPath::from_arcs(&mirror.quiver, arcs).expect("complement composes")
    }

    /// The closing segment of the marked polygon (between the last and the
    /// first arc of the disk order).
    pub fn closing_crossings(&self) -> &[Germ] {
        match self.class {
            Orientation::Clockwise => self.segment_crossings.last().unwrap(),
            Orientation::Counterclockwise => self.segment_crossings.first().unwrap(),
        }
    }

    /// Signed series contribution (-1)^{|D|} Punc(D) at truncation `order`.
    pub fn weight(&self, order: u32) -> DefSeries {
        let c = if self.sign_odd() { -Rat::one() } else { Rat::one() };
        DefSeries::monomial(self.punc.clone(), c, order)
    }

    pub fn dump_line(&self, mirror: &Mirror) -> String {
        let arcs: Vec<&str> = self
            .e_sequence()
            .iter()
            .map(|&a| mirror.base.arcs[a as usize].name.as_str())
            .collect();
        let lens: Vec<String> = self.segment_lengths.iter().map(|n| n.to_string()).collect();
        let punc = if self.punc.degree() == 0 {
            "1".to_string()
        } else {
            self.punc.display(&mirror.quiver.vars)[1..].to_string()
        };
        format!(
            "{} [{}] segs ({}) punc {} sign {}",
            self.class.short(),
            arcs.join(" "),
            lens.join(","),
            punc,
            if self.sign_odd() { "-" } else { "+" }
        )
    }
}

/// All marked midpoint polygons of both orientation classes up to a total
/// deformation degree.
pub struct PolygonCensus {
    pub cap: u32,
    pub polygons: Vec<MarkedPolygon>,
}

struct WalkState<'p, 'd> {
    patch: &'p CoverPatch<'d>,
    corner_index: &'p HashMap<u32, Vec<(u32, u32)>>,
    class: Orientation,
    cap: u32,
    anchor_lift: u32,
    visited: HashSet<u32>,
    corners: Vec<(u32, u32)>,
    corners_lifted: Vec<u32>,
    finished_segments: Vec<u32>,
    finished_crossings: Vec<Vec<Germ>>,
    cur_len: u32,
    cur_crossings: Vec<Germ>,
    walls: HashSet<(u32, u32)>,
    inside_stars: HashSet<u32>,
    left_steps: u32,
    results: Vec<MarkedPolygon>,
}

impl<'p, 'd> WalkState<'p, 'd> {
    fn corner_arrival_turn(&self) -> Turn {
        match self.class {
            Orientation::Clockwise => Turn::Left,
            Orientation::Counterclockwise => Turn::Right,
        }
    }

    fn wedge_face(&self, larc: u32) -> Option<u32> {
        let side = match self.class {
            Orientation::Clockwise => 0,
            Orientation::Counterclockwise => 1,
        };
        self.patch.arcs[larc as usize].sides[side]
    }

    fn explore(&mut self, germ: (u32, Turn)) -> Result<(), CoverError> {
        // take one step: cut the angle of `germ`
        let angle = self.patch.germ_angle(germ)?;
        let pivot = self.patch.corner_puncture(angle.0, angle.1);
        let interior_pivot = match self.class {
            Orientation::Clockwise => germ.1 == Turn::Left,
            Orientation::Counterclockwise => germ.1 == Turn::Right,
        };
        if self.walls.contains(&angle) {
            // boundary would reuse a curve piece: not embedded
            return Ok(());
        }
        let inserted_star = interior_pivot && self.inside_stars.insert(pivot);
        if self.inside_stars.len() as u32 > self.cap {
            if inserted_star {
                self.inside_stars.remove(&pivot);
            }
            return Ok(());
        }
        self.walls.insert(angle);
        self.cur_len += 1;
        if germ.1 == Turn::Left {
            self.left_steps += 1;
        }
        let arrival = self.patch.step_germ(germ)?;
        let (larc, turn) = arrival;
        let base_arc = self.patch.arcs[larc as usize].base;
        if larc == self.anchor_lift {
            if turn == self.corner_arrival_turn() {
                self.close()?;
            }
        } else if !self.visited.contains(&larc) {
            if turn == self.corner_arrival_turn() {
                // branch: corner here
                if let Some(wedge) = self.wedge_face(larc) {
                    let wedge_base = self.patch.faces[wedge as usize].base;
                    self.visited.insert(larc);
                    self.corners.push((base_arc, wedge_base));
                    self.corners_lifted.push(larc);
                    self.finished_segments.push(self.cur_len);
                    self.finished_crossings.push(std::mem::take(&mut self.cur_crossings));
                    let saved_len = self.cur_len;
                    self.cur_len = 0;
                    self.explore((larc, turn.flip()))?;
                    self.cur_len = saved_len;
                    self.cur_crossings = self.finished_crossings.pop().unwrap();
                    self.finished_segments.pop();
                    self.corners_lifted.pop();
                    self.corners.pop();
                    self.visited.remove(&larc);
                } else {
                    // wedge face undeveloped: the walk reached the rim
                    return Err(CoverError::RadiusInsufficient);
                }
            }
            // branch: cross straight through
            self.visited.insert(larc);
            self.cur_crossings.push((base_arc, turn));
            self.explore((larc, turn))?;
            self.cur_crossings.pop();
            self.visited.remove(&larc);
        }
        // undo the step
        self.walls.remove(&angle);
        self.cur_len -= 1;
        if germ.1 == Turn::Left {
            self.left_steps -= 1;
        }
        if inserted_star {
            self.inside_stars.remove(&pivot);
        }
        Ok(())
    }

    fn close(&mut self) -> Result<(), CoverError> {
        let mut segments = self.finished_segments.clone();
        segments.push(self.cur_len);
        let mut crossings = self.finished_crossings.clone();
        crossings.push(self.cur_crossings.clone());
        // flood fill the interior from the corner wedges
        let seeds: Vec<u32> = self
            .corners_lifted
            .iter()
            .map(|&la| self.wedge_face(la).ok_or(CoverError::RadiusInsufficient))
            .collect::<Result<_, _>>()?;
        let (hearts, star_cells) = flood_fill(self.patch, self.corner_index, &self.walls, &seeds)?;
        let mut punc_counts: BTreeMap<u32, u32> = BTreeMap::new();
        for &s in &star_cells {
            *punc_counts.entry(self.patch.punctures[s as usize].base).or_insert(0) += 1;
        }
        let punc = QMonomial(punc_counts);
        if punc.degree() > self.cap {
            return Ok(());
        }
        self.results.push(MarkedPolygon {
            class: self.class,
            corners: self.corners.clone(),
            segment_lengths: segments,
            segment_crossings: crossings,
            punc,
            left_steps: self.left_steps,
            hearts: hearts.len() as u32,
            stars: star_cells.len() as u32,
        });
        Ok(())
    }
}

/// Interior cells enclosed by the walls, grown from the seed hearts.
fn flood_fill(
    patch: &CoverPatch,
    corner_index: &HashMap<u32, Vec<(u32, u32)>>,
    walls: &HashSet<(u32, u32)>,
    seeds: &[u32],
) -> Result<(HashSet<u32>, HashSet<u32>), CoverError> {
    let mut hearts: HashSet<u32> = HashSet::new();
    let mut stars: HashSet<u32> = HashSet::new();
    let mut queue: Vec<(bool, u32)> = seeds.iter().map(|&f| (true, f)).collect();
    for &(_, f) in &queue {
        hearts.insert(f);
    }
    while let Some((is_heart, id)) = queue.pop() {
        if is_heart {
            let face = &patch.faces[id as usize];
            for corner in 0..face.arcs.len() as u32 {
                if walls.contains(&(id, corner)) {
                    continue;
                }
                let star = patch.corner_puncture(id, corner);
                if stars.insert(star) {
                    queue.push((false, star));
                }
            }
        } else {
            let valence = patch.punctures[id as usize].slots.len();
            let incident = corner_index.get(&id).map(|v| v.as_slice()).unwrap_or(&[]);
            if incident.len() != valence {
                // the link of an interior puncture is not fully developed
                return Err(CoverError::RadiusInsufficient);
            }
            for &(f, corner) in incident {
                if walls.contains(&(f, corner)) {
                    continue;
                }
                if hearts.insert(f) {
                    queue.push((true, f));
                }
            }
        }
    }
    Ok((hearts, stars))
}

fn corner_index(patch: &CoverPatch) -> HashMap<u32, Vec<(u32, u32)>> {
    let mut idx: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
    for (fi, face) in patch.faces.iter().enumerate() {
        for corner in 0..face.arcs.len() as u32 {
            let p = patch.corner_puncture(fi as u32, corner);
            idx.entry(p).or_default().push((fi as u32, corner));
        }
    }
    idx
}

impl PolygonCensus {
    /// Enumerate every marked midpoint polygon with deformation degree at
    /// most `cap`, complete and duplicate-free, by anchored walks in the
    /// universal cover. The dimer must be geometrically consistent or a
    /// sphere dimer.
    pub fn enumerate(mirror: &Mirror, cap: u32) -> Result<PolygonCensus, DisksError> {
        let genus = mirror.base.genus();
        if genus >= 2 {
            // not certified consistent; midpoint enumeration is restricted
            return Err(DisksError::InconsistentDimer);
        }
        if genus == 1 {
            match crate::cover::check_geometric_consistency(&mirror.base, 4) {
                crate::cover::ConsistencyVerdict::Inconsistent(_) => {
                    return Err(DisksError::InconsistentDimer)
                }
                _ => {}
            }
        }
        let mut radius = (mirror.base.max_face_len() as u32) * (cap + 2);
        for _attempt in 0..3 {
            match Self::enumerate_with_radius(mirror, cap, radius) {
                Ok(c) => return Ok(c),
                Err(DisksError::RadiusInsufficient) => {
                    radius *= 2;
                }
                Err(e) => return Err(e),
            }
        }
        Err(DisksError::RadiusInsufficient)
    }

    fn enumerate_with_radius(
        mirror: &Mirror,
        cap: u32,
        radius: u32,
    ) -> Result<PolygonCensus, DisksError> {
        let mut polygons = Vec::new();
        for class in [Orientation::Clockwise, Orientation::Counterclockwise] {
            for anchor in 0..mirror.base.arcs.len() as u32 {
                let (f0, _) = mirror.base.face_of(anchor, Orientation::Clockwise);
                let patch = CoverPatch::develop(&mirror.base, f0, radius)?;
                let idx = corner_index(&patch);
                let anchor_lift = patch.faces[0]
                    .arcs
                    .iter()
                    .copied()
                    .find(|&la| patch.arcs[la as usize].base == anchor)
                    .expect("anchor arc borders its clockwise face");
                let start_turn = match class {
                    Orientation::Clockwise => Turn::Right,
                    Orientation::Counterclockwise => Turn::Left,
                };
                let wedge = {
                    let side = match class {
                        Orientation::Clockwise => 0,
                        Orientation::Counterclockwise => 1,
                    };
                    patch.arcs[anchor_lift as usize].sides[side]
                        .ok_or(DisksError::RadiusInsufficient)?
                };
                let mut state = WalkState {
                    patch: &patch,
                    corner_index: &idx,
                    class,
                    cap,
                    anchor_lift,
                    visited: HashSet::from([anchor_lift]),
                    corners: vec![(anchor, patch.faces[wedge as usize].base)],
                    corners_lifted: vec![anchor_lift],
                    finished_segments: Vec::new(),
                    finished_crossings: Vec::new(),
                    cur_len: 0,
                    cur_crossings: Vec::new(),
                    walls: HashSet::new(),
                    inside_stars: HashSet::new(),
                    left_steps: 0,
                    results: Vec::new(),
                };
                state.explore((anchor_lift, start_turn))?;
                polygons.extend(state.results);
            }
        }
        // deterministic order for dumps and golden tests
        polygons.sort_by_key(|p| {
            (
                p.class.short(),
                p.e_sequence(),
                p.segment_lengths.clone(),
                p.punc.clone(),
            )
        });
        Ok(PolygonCensus { cap, polygons })
    }

    pub fn of_class(&self, class: Orientation) -> impl Iterator<Item = &MarkedPolygon> {
        self.polygons.iter().filter(move |p| p.class == class)
    }
}

/// W_q at truncation order `n`: the signed Punc-weighted path recordings of
/// all marked midpoint polygons, clockwise minus counterclockwise.
pub fn deformed_superpotential(mirror: &Mirror, n: u32) -> Result<NcPoly, DisksError> {
    let census = PolygonCensus::enumerate(mirror, n)?;
    Ok(superpotential_from_census(mirror, &census, n))
}

pub fn superpotential_from_census(mirror: &Mirror, census: &PolygonCensus, n: u32) -> NcPoly {
    let mut w = NcPoly::zero(mirror.quiver.clone(), n);
    for p in &census.polygons {
        let mut weight = p.weight(n);
        if p.class == Orientation::Counterclockwise {
            weight = weight.neg();
        }
        w.add_term(p.arcs_path(mirror), weight);
    }
    w
}

/// The three decoration types of an L-polygon for a fixed identity germ.
fn potential_part_from_census(
    mirror: &Mirror,
    census: &PolygonCensus,
    id_germ: Germ,
    n: u32,
) -> NcPoly {
    let mut ell = NcPoly::zero(mirror.quiver.clone(), n);
    for p in &census.polygons {
        // start-left / end-right decorations
        match (id_germ.1, p.class) {
            (Turn::Left, Orientation::Counterclockwise) if p.anchor() == id_germ.0 => {
                ell.add_term(p.arcs_path(mirror), p.weight(n));
            }
            (Turn::Right, Orientation::Clockwise) if p.anchor() == id_germ.0 => {
                ell.add_term(p.ending_path(mirror), p.weight(n));
            }
            _ => {}
        }
        // segment-crossing decorations on the closing segment
        let crossings = p.closing_crossings().iter().filter(|&&g| g == id_germ).count() as i64;
        if crossings > 0 {
            ell.add_term(
                p.arcs_path(mirror),
                p.weight(n).scale(&Rat::from_integer(crossings.into())),
            );
        }
    }
    ell
}

/// The deformed potential and its per-zigzag-path summands, for the given
/// identity germs (one per zigzag path).
pub fn deformed_potential_parts(
    mirror: &Mirror,
    id_germs: &[Germ],
    n: u32,
) -> Result<Vec<NcPoly>, DisksError> {
    let census = PolygonCensus::enumerate(mirror, n)?;
    Ok(id_germs
        .iter()
        .map(|&g| potential_part_from_census(mirror, &census, g, n))
        .collect())
}

pub fn deformed_potential(mirror: &Mirror, id_germs: &[Germ], n: u32) -> Result<NcPoly, DisksError> {
    let parts = deformed_potential_parts(mirror, id_germs, n)?;
    let mut ell = NcPoly::zero(mirror.quiver.clone(), n);
    for p in parts {
        ell = ell.add(&p).unwrap();
    }
    Ok(ell)
}

/// Default identity germs: the stored identity location of each path.
pub fn default_id_germs(mirror: &Mirror) -> Vec<Germ> {
    mirror.paths.iter().map(|p| p.identity_germ()).collect()
}

/// The deformed complement of an arc: signed Punc-weighted stripped path
/// recordings of the clockwise midpoint polygons ending at it.
pub fn deformed_complement(mirror: &Mirror, arc: u32, n: u32) -> Result<NcPoly, DisksError> {
    let census = PolygonCensus::enumerate(mirror, n)?;
    Ok(complement_from_census(mirror, &census, arc, n))
}

pub fn complement_from_census(
    mirror: &Mirror,
    census: &PolygonCensus,
    arc: u32,
    n: u32,
) -> NcPoly {
    let mut out = NcPoly::zero(mirror.quiver.clone(), n);
    for p in census.of_class(Orientation::Clockwise) {
        if p.anchor() == arc {
            out.add_term(p.complement_path(mirror), p.weight(n));
        }
    }
    out
}

/// The deformed mirror object of an arc, with curvature blocks reduced to
/// normal form.
pub fn deformed_mirror_object(
    mirror: &Mirror,
    arc: u32,
    n: u32,
) -> Result<MatrixFactorization, DisksError> {
    let census = PolygonCensus::enumerate(mirror, n)?;
    let id_germs = default_id_germs(mirror);
    let ell = {
        let mut e = NcPoly::zero(mirror.quiver.clone(), n);
        for g in &id_germs {
            e = e.add(&potential_part_from_census(mirror, &census, *g, n)).unwrap();
        }
        e
    };
    Ok(mirror_object_from_census(mirror, &census, &ell, arc, n))
}

pub fn mirror_object_from_census(
    mirror: &Mirror,
    census: &PolygonCensus,
    ell_q: &NcPoly,
    arc: u32,
    n: u32,
) -> MatrixFactorization {
    let q = mirror.quiver.clone();
    let f = NcPoly::from_path(q.clone(), n, QuiverPath { source: q.source(arc), arcs: vec![arc] });
    let g = complement_from_census(mirror, census, arc, n);
    let mut mf = MatrixFactorization {
        even_vertex: q.target(arc),
        odd_vertex: q.source(arc),
        f,
        g,
        curvature_even: NcPoly::zero(q.clone(), n),
        curvature_odd: NcPoly::zero(q, n),
    };
    let (ce, co) = mf.defects(ell_q);
    mf.curvature_even = ce;
    mf.curvature_odd = co;
    mf
}

/// Product of odd basis morphisms in the minimal model: the coefficient of
/// each even basis element Y_e and of each identity, as signed Punc-weighted
/// polygon counts. Inputs are arcs standing for the odd intersections X_e,
/// listed in disk order (the product consumes them right to left).
pub struct OddProduct {
    pub y_coefficients: BTreeMap<u32, DefSeries>,
    pub id_coefficients: BTreeMap<usize, DefSeries>,
}

pub fn hl_odd_product(
    mirror: &Mirror,
    census: &PolygonCensus,
    inputs: &[u32],
    id_germs: &[Germ],
    n: u32,
) -> Result<OddProduct, DisksError> {
    // composability: h(x_i) = t(x_{i+1}) in the mirror quiver
    for w in inputs.windows(2) {
        if mirror.quiver.target(w[0]) != mirror.quiver.source(w[1]) {
            return Err(DisksError::NonComposable);
        }
    }
    let mut y: BTreeMap<u32, DefSeries> = BTreeMap::new();
    let mut id: BTreeMap<usize, DefSeries> = BTreeMap::new();
    for p in &census.polygons {
        let e = p.e_sequence();
        if e.len() == inputs.len() + 1 && e[..inputs.len()] == *inputs {
            let mut weight = p.weight(n);
            if p.class == Orientation::Counterclockwise {
                weight = weight.neg();
            }
            let out = *e.last().unwrap();
            let entry = y.entry(out).or_insert_with(|| DefSeries::zero(n));
            *entry = entry.add(&weight);
        }
        if e == inputs {
            // identity contributions, one per matching decoration
            for (pi, &g) in id_germs.iter().enumerate() {
                let mut count = 0i64;
                match (g.1, p.class) {
                    (Turn::Left, Orientation::Counterclockwise) if p.anchor() == g.0 => count += 1,
                    (Turn::Right, Orientation::Clockwise) if p.anchor() == g.0 => count += 1,
                    _ => {}
                }
                count += p.closing_crossings().iter().filter(|&&x| x == g).count() as i64;
                if count != 0 {
                    let w = p.weight(n).scale(&Rat::from_integer(count.into()));
                    let entry = id.entry(pi).or_insert_with(|| DefSeries::zero(n));
                    *entry = entry.add(&w);
                }
            }
        }
    }
    y.retain(|_, v| !v.is_zero());
    id.retain(|_, v| !v.is_zero());
    Ok(OddProduct { y_coefficients: y, id_coefficients: id })
}

/// Result of a module-side product against the odd or even intersection of
/// an arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MdProduct {
    /// odd m: coefficient series on the even partner m*
    OnPartner(DefSeries),
    /// even m with the single odd input at the same arc: -m
    MinusPartner,
    Zero,
}

pub fn md_product(
    mirror: &Mirror,
    census: &PolygonCensus,
    arc: u32,
    m_is_odd: bool,
    inputs: &[u32],
    n: u32,
) -> Result<MdProduct, DisksError> {
    for w in inputs.windows(2) {
        if mirror.quiver.target(w[0]) != mirror.quiver.source(w[1]) {
            return Err(DisksError::NonComposable);
        }
    }
    if !m_is_odd {
        // the even intersection only pairs with the odd intersection at `arc`
        if inputs == [arc] {
            return Ok(MdProduct::MinusPartner);
        }
        return Ok(MdProduct::Zero);
    }
    if let Some(&last) = inputs.last() {
        if mirror.quiver.target(last) != mirror.quiver.source(arc) {
            return Err(DisksError::NonComposable);
        }
    }
    let mut total = DefSeries::zero(n);
    for p in census.of_class(Orientation::Clockwise) {
        if p.anchor() != arc {
            continue;
        }
        let e = p.e_sequence();
        // ending at `arc`: disk order (inputs..., arc)
        let word: Vec<u32> = e[1..].to_vec();
        if word == inputs {
            total = total.add(&p.weight(n));
        }
    }
    if total.is_zero() {
        Ok(MdProduct::Zero)
    } else {
        Ok(MdProduct::OnPartner(total))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimer::{sphere3, torus4};
    use crate::jacobi::JacobiContext;
    use crate::mirror::Mirror;
    use crate::ncpoly::rat;

    fn sphere() -> Mirror {
        Mirror::new(sphere3().unwrap()).unwrap()
    }

    fn torus() -> Mirror {
        Mirror::new(torus4().unwrap()).unwrap()
    }

    #[test]
    fn sphere3_census_cap1_has_twelve_polygons() {
        let m = sphere();
        let census = PolygonCensus::enumerate(&m, 1).unwrap();
        assert_eq!(census.polygons.len(), 12);
        let trigons: Vec<_> =
            census.polygons.iter().filter(|p| p.corners.len() == 3).collect();
        let monogons: Vec<_> =
            census.polygons.iter().filter(|p| p.corners.len() == 1).collect();
        assert_eq!(trigons.len(), 6);
        assert_eq!(monogons.len(), 6);
        // trigons: 3 clockwise + 3 counterclockwise, no punctures, sign +
        for t in &trigons {
            assert_eq!(t.punc.degree(), 0);
            assert!(!t.sign_odd());
            assert_eq!(t.segment_lengths, vec![1, 1, 1]);
        }
        assert_eq!(trigons.iter().filter(|t| t.class == Orientation::Clockwise).count(), 3);
        // monogons: one puncture each, sign -, segment length 3,
        // and the x-monogon covers the puncture named qx
        for mg in &monogons {
            assert_eq!(mg.punc.degree(), 1);
            assert!(mg.sign_odd());
            assert_eq!(mg.segment_lengths, vec![3]);
            let arc_name = &m.base.arcs[mg.anchor() as usize].name;
            let var = mg.punc.0.keys().next().unwrap();
            assert_eq!(m.quiver.vars[*var as usize], format!("q{arc_name}"));
        }
    }

    #[test]
    fn sphere3_deformed_superpotential_is_classical() {
        let m = sphere();
        for n in [0u32, 1, 2, 4] {
            let wq = deformed_superpotential(&m, n).unwrap();
            let w = m.classical_superpotential(n);
            assert_eq!(wq, w, "deformed terms must cancel at order {n}");
            assert!(wq.is_cyclic());
        }
    }

    #[test]
    fn sphere3_deformed_potential_matches_worked_example() {
        let m = sphere();
        let ids = default_id_germs(&m);
        let ell = deformed_potential(&m, &ids, 2).unwrap();
        // abc - qa a - qb b - qc c
        let q = m.quiver.clone();
        let n = |s: &str| q.arc_by_name(s).unwrap();
        let v = |s: &str| q.var_by_name(s).unwrap();
        let mut expect = NcPoly::from_word(q.clone(), 2, &[n("a"), n("b"), n("c")]).unwrap();
        for arc in ["a", "b", "c"] {
            expect.add_path_monomial(
                QuiverPath { source: q.source(n(arc)), arcs: vec![n(arc)] },
                QMonomial::var(v(&format!("q{arc}"))),
                -rat(1),
            );
        }
        assert_eq!(ell, expect);
    }

    #[test]
    fn sphere3_deformed_complements_match_table() {
        let m = sphere();
        let q = m.quiver.clone();
        let n = |s: &str| q.arc_by_name(s).unwrap();
        let v = |s: &str| q.var_by_name(s).unwrap();
        for (arc, word, qa) in [
            ("a", ["b", "c"], "qa"),
            ("b", ["c", "a"], "qb"),
            ("c", ["a", "b"], "qc"),
        ] {
            let got = deformed_complement(&m, n(arc), 1).unwrap();
            let mut expect =
                NcPoly::from_word(q.clone(), 1, &[n(word[0]), n(word[1])]).unwrap();
            expect.add_path_monomial(
                QuiverPath::vertex(q.source(n(arc))),
                QMonomial::var(v(qa)),
                -rat(1),
            );
            assert_eq!(got, expect, "complement of {arc}");
        }
        // at order 0 the classical complement comes back
        let a = n("a");
        let got = deformed_complement(&m, a, 0).unwrap();
        let classical =
            NcPoly::from_path(q.clone(), 0, m.complement_path(a, Orientation::Clockwise));
        assert_eq!(got, classical);
    }

    #[test]
    fn sphere3_deformed_mirror_objects_match_table() {
        let m = sphere();
        let q = m.quiver.clone();
        let n = |s: &str| q.arc_by_name(s).unwrap();
        let v = |s: &str| q.var_by_name(s).unwrap();
        let mut ctx = JacobiContext::new(&m.dual, q.clone(), 12);
        for (arc, curv) in [("a", ["qb", "qc"]), ("b", ["qa", "qc"]), ("c", ["qa", "qb"])] {
            let mf = deformed_mirror_object(&m, n(arc), 2).unwrap();
            // curvature = -q_x x - q_y y on both blocks, modulo relations
            let mut expect = NcPoly::zero(q.clone(), 2);
            for qv in curv {
                let x = n(&qv[1..]);
                expect.add_path_monomial(
                    QuiverPath { source: q.source(x), arcs: vec![x] },
                    QMonomial::var(v(qv)),
                    -rat(1),
                );
            }
            let ce = ctx.normal_form(&mf.curvature_even).unwrap();
            let co = ctx.normal_form(&mf.curvature_odd).unwrap();
            let en = ctx.normal_form(&expect).unwrap();
            assert_eq!(ce, en, "even curvature of {arc}");
            assert_eq!(co, en, "odd curvature of {arc}");
            assert!(ce.terms.values().all(|c| c.min_degree().unwrap_or(1) >= 1));
        }
    }

    #[test]
    fn torus4_census_cap0_is_the_four_huggers() {
        let m = torus();
        let census = PolygonCensus::enumerate(&m, 0).unwrap();
        // each of the four faces contributes one geometric hugger, marked at
        // each of its four corners
        assert_eq!(census.polygons.len(), 16);
        for p in &census.polygons {
            assert_eq!(p.corners.len(), 4);
            assert_eq!(p.segment_lengths, vec![1, 1, 1, 1]);
            assert_eq!(p.punc.degree(), 0);
            assert!(!p.sign_odd());
        }
        assert_eq!(census.of_class(Orientation::Clockwise).count(), 8);
    }

    #[test]
    fn torus4_w_at_order_zero_is_classical() {
        let m = torus();
        let wq = deformed_superpotential(&m, 0).unwrap();
        assert_eq!(wq, m.classical_superpotential(0));
    }

    #[test]
    fn sign_law_matches_abouzaid_recomputation() {
        // Abou(D) = |D| for clockwise disks, |D| + 1 for counterclockwise,
        // recomputed from the # signs (one per left-turn step) and the
        // orientation-dependent corner terms.
        let m = torus();
        let census = PolygonCensus::enumerate(&m, 2).unwrap();
        for p in &census.polygons {
            let hash_sum = p.left_steps; // # = 1 exactly on ccw-polygon angles
            let d: u32 = p.segment_lengths.iter().map(|&n| (n - 1) / 2).sum();
            let k = p.corners.len() as u32;
            match p.class {
                Orientation::Clockwise => {
                    assert_eq!(hash_sum % 2, d % 2);
                }
                Orientation::Counterclockwise => {
                    // hash_sum = sum (n_i + 1)/2 = d + k; the Abouzaid sign
                    // adds k - 1 more for the odd counterclockwise inputs,
                    // landing at d + 1: the opposite of the clockwise case
                    assert_eq!(hash_sum % 2, (d + k) % 2);
                }
            }
        }
        let m = sphere();
        let census = PolygonCensus::enumerate(&m, 1).unwrap();
        for p in &census.polygons {
            let d: u32 = p.segment_lengths.iter().map(|&n| (n - 1) / 2).sum();
            match p.class {
                Orientation::Clockwise => assert_eq!(p.left_steps % 2, d % 2),
                Orientation::Counterclockwise => {
                    assert_eq!((p.left_steps + p.corners.len() as u32) % 2, d % 2)
                }
            }
        }
    }

    #[test]
    fn hl_odd_product_classical_rule() {
        // at order 0: +Y_e for a clockwise polygon word, -Y for the
        // counterclockwise one, 0 for non-polygonal words
        let m = sphere();
        let census = PolygonCensus::enumerate(&m, 0).unwrap();
        let ids = default_id_germs(&m);
        let q = m.quiver.clone();
        let n = |s: &str| q.arc_by_name(s).unwrap();
        // clockwise dual face word abc: traversal c, b, a; e-seq of its
        // huggers are rotations of the traversal of the base cw face
        let cw_face = m
            .base
            .faces
            .iter()
            .find(|f| f.orientation == Orientation::Clockwise)
            .unwrap();
        let inputs = vec![cw_face.arcs[0], cw_face.arcs[1]];
        let out = hl_odd_product(&m, &census, &inputs, &ids, 0).unwrap();
        assert_eq!(out.y_coefficients.len(), 1);
        let (y, c) = out.y_coefficients.iter().next().unwrap();
        assert_eq!(*y, cw_face.arcs[2]);
        assert_eq!(*c, DefSeries::one(0));
        // a non-polygonal corner sequence gives nothing
        let bad = vec![n("a"), n("a")];
        let out = hl_odd_product(&m, &census, &bad, &ids, 0).unwrap();
        assert!(out.y_coefficients.is_empty() && out.id_coefficients.is_empty());
    }

    #[test]
    fn md_product_rules() {
        let m = sphere();
        let census = PolygonCensus::enumerate(&m, 1).unwrap();
        let q = m.quiver.clone();
        let a = q.arc_by_name("a").unwrap();
        // even m pairs only with the odd intersection at the same arc
        assert_eq!(md_product(&m, &census, a, false, &[a], 1).unwrap(), MdProduct::MinusPartner);
        assert_eq!(md_product(&m, &census, a, false, &[], 1).unwrap(), MdProduct::Zero);
        // odd m with no inputs: bc - qa as a coefficient on m* is the
        // complement series evaluated on the empty word... the monogon has
        // word (a) alone, so the empty input picks the monogon only when the
        // polygon is the monogon itself
        match md_product(&m, &census, a, true, &[], 1).unwrap() {
            MdProduct::OnPartner(s) => {
                // the monogon ending at a: weight -qa
                let v = q.var_by_name("qa").unwrap();
                assert_eq!(s.coefficient(&QMonomial::var(v)), -rat(1));
            }
            other => panic!("expected monogon contribution, got {other:?}"),
        }
        // the trigon ending at a has disk order (c, b, a): inputs (c, b),
        // matching the complement word bc traversed c first
        let b = q.arc_by_name("b").unwrap();
        let c = q.arc_by_name("c").unwrap();
        match md_product(&m, &census, a, true, &[c, b], 1).unwrap() {
            MdProduct::OnPartner(s) => assert_eq!(s, DefSeries::one(1)),
            other => panic!("expected trigon contribution, got {other:?}"),
        }
    }

    #[test]
    fn identity_shift_is_a_relation_multiple() {
        // adjacent identity germs g1 = (b1, L), g2 = (b2, R) with
        // h(b1) = t(b2): ell^{(g2)} - ell^{(g1)} = b2 . d_{b2} W_q exactly
        for (m, n) in [(sphere(), 2u32), (torus(), 3u32)] {
            let census = PolygonCensus::enumerate(&m, n).unwrap();
            let wq = superpotential_from_census(&m, &census, n);
            for path in &m.paths {
                let len = path.len();
                for i in 0..len {
                    let g1 = path.steps[i];
                    let g2 = path.steps[(i + 1) % len];
                    if g1.1 != Turn::Left {
                        continue;
                    }
                    assert_eq!(g2.1, Turn::Right);
                    let e1 = potential_part_from_census(&m, &census, g1, n);
                    let e2 = potential_part_from_census(&m, &census, g2, n);
                    let diff = e2.sub(&e1).unwrap();
                    let b2 = NcPoly::from_word(m.quiver.clone(), n, &[g2.0]).unwrap();
                    let rel = wq.cyclic_derivative(g2.0).unwrap();
                    let expect = b2.mul(&rel).unwrap();
                    assert_eq!(diff, expect, "shift {g1:?} -> {g2:?}");
                }
            }
        }
    }
}
