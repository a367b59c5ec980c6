//! Dimers on closed oriented punctured surfaces, encoded as rotation systems.
//!
//! The embedding is stored as a cyclic order of arc-ends at each puncture.
//! Faces are derived by corner tracing: walking a dart and leaving through
//! the rotation-successor of the arrival end. In a dimer every traced orbit
//! consists purely of forward darts (a clockwise face) or purely of backward
//! darts (a counterclockwise face); anything mixed is rejected.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimerError {
    #[error("MALFORMED_ROTATION: {0}")]
    MalformedRotation(String),
    #[error("FACE_TOO_SHORT: face {0:?} has fewer than three arcs")]
    FaceTooShort(Vec<String>),
    #[error("ORIENTATION_CLASH: face tracing mixes arc directions at arc `{0}`")]
    OrientationClash(String),
    #[error("M_TOO_SMALL: sphere dimers need at least three punctures")]
    MTooSmall,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("negative genus: V - E + F = {0} is not of the form 2 - 2g")]
    BadEuler(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct End {
    pub arc: u32,
    pub is_head: bool,
}

impl End {
    pub fn head(arc: u32) -> Self {
        End { arc, is_head: true }
    }
    pub fn tail(arc: u32) -> Self {
        End { arc, is_head: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::Counterclockwise,
            Orientation::Counterclockwise => Orientation::Clockwise,
        }
    }
    pub fn short(&self) -> &'static str {
        match self {
            Orientation::Clockwise => "cw",
            Orientation::Counterclockwise => "ccw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Turn {
    Left,
    Right,
}

impl Turn {
    pub fn flip(self) -> Self {
        match self {
            Turn::Left => Turn::Right,
            Turn::Right => Turn::Left,
        }
    }
    pub fn face_orientation(self) -> Orientation {
        match self {
            Turn::Right => Orientation::Clockwise,
            Turn::Left => Orientation::Counterclockwise,
        }
    }
}

/// A zigzag step: the path sits on `arc` and turns `turn` at its head.
pub type Germ = (u32, Turn);

#[derive(Debug, Clone)]
pub struct DimerArc {
    pub name: String,
    pub tail: u32,
    pub head: u32,
}

#[derive(Debug, Clone)]
pub struct Face {
    /// Boundary arcs in traversal order (consecutively composable).
    pub arcs: Vec<u32>,
    pub orientation: Orientation,
}

#[derive(Debug, Clone)]
pub struct Dimer {
    pub name: String,
    pub punctures: Vec<String>,
    pub arcs: Vec<DimerArc>,
    /// Cyclic order of arc-ends at each puncture.
    pub rotation: Vec<Vec<End>>,
    pub faces: Vec<Face>,
    /// Position of every end in the rotation tables: end -> (puncture, index).
    end_pos: HashMap<End, (u32, u32)>,
    /// For each arc, the bounding face of each orientation and the position
    /// of the arc in that face's traversal.
    arc_face: Vec<[(u32, u32); 2]>,
}

impl Dimer {
    /// Build and validate a dimer from punctures, arcs and rotation tables.
    pub fn new(
        name: String,
        punctures: Vec<String>,
        arcs: Vec<DimerArc>,
        rotation: Vec<Vec<End>>,
    ) -> Result<Dimer, DimerError> {
        if rotation.len() != punctures.len() {
            return Err(DimerError::MalformedRotation(
                "one rotation line per puncture required".into(),
            ));
        }
        let mut end_pos: HashMap<End, (u32, u32)> = HashMap::new();
        for (p, rot) in rotation.iter().enumerate() {
            for (i, &e) in rot.iter().enumerate() {
                if e.arc as usize >= arcs.len() {
                    return Err(DimerError::MalformedRotation(format!(
                        "rotation references unknown arc index {}",
                        e.arc
                    )));
                }
                let expected = if e.is_head { arcs[e.arc as usize].head } else { arcs[e.arc as usize].tail };
                if expected != p as u32 {
                    return Err(DimerError::MalformedRotation(format!(
                        "end {}.{} listed at `{}` but belongs to `{}`",
                        arcs[e.arc as usize].name,
                        if e.is_head { "h" } else { "t" },
                        punctures[p],
                        punctures[expected as usize],
                    )));
                }
                if end_pos.insert(e, (p as u32, i as u32)).is_some() {
                    return Err(DimerError::MalformedRotation(format!(
                        "end {}.{} appears twice",
                        arcs[e.arc as usize].name,
                        if e.is_head { "h" } else { "t" }
                    )));
                }
            }
        }
        for (i, a) in arcs.iter().enumerate() {
            for end in [End::head(i as u32), End::tail(i as u32)] {
                if !end_pos.contains_key(&end) {
                    return Err(DimerError::MalformedRotation(format!(
                        "end {}.{} missing from the rotation",
                        a.name,
                        if end.is_head { "h" } else { "t" }
                    )));
                }
            }
        }
        let mut dimer = Dimer {
            name,
            punctures,
            arcs,
            rotation,
            faces: Vec::new(),
            end_pos,
            arc_face: Vec::new(),
        };
        dimer.trace_faces()?;
        dimer.check_euler()?;
        Ok(dimer)
    }

    fn rotation_next(&self, e: End) -> End {
        let (p, i) = self.end_pos[&e];
        let rot = &self.rotation[p as usize];
        rot[(i as usize + 1) % rot.len()]
    }

    fn rotation_prev(&self, e: End) -> End {
        let (p, i) = self.end_pos[&e];
        let rot = &self.rotation[p as usize];
        rot[(i as usize + rot.len() - 1) % rot.len()]
    }

    /// Arrival end of a dart (arc, forward?).
    fn dart_arrival(arc: u32, forward: bool) -> End {
        if forward {
            End::head(arc)
        } else {
            End::tail(arc)
        }
    }

    fn trace_faces(&mut self) -> Result<(), DimerError> {
        let mut seen: HashSet<(u32, bool)> = HashSet::new();
        let mut faces = Vec::new();
        for arc in 0..self.arcs.len() as u32 {
            for forward in [true, false] {
                if seen.contains(&(arc, forward)) {
                    continue;
                }
                let mut walk = Vec::new();
                let mut dart = (arc, forward);
                loop {
                    if !seen.insert(dart) {
                        break;
                    }
                    walk.push(dart);
                    let arrive = Self::dart_arrival(dart.0, dart.1);
                    let leave = self.rotation_next(arrive);
                    // leaving through a tail-end walks the arc forward
                    dart = (leave.arc, !leave.is_head);
                    if dart == walk[0] {
                        break;
                    }
                }
                let all_forward = walk.iter().all(|d| d.1);
                let all_backward = walk.iter().all(|d| !d.1);
                if !all_forward && !all_backward {
                    let offender = walk.iter().find(|d| d.1 != walk[0].1).unwrap();
                    return Err(DimerError::OrientationClash(
                        self.arcs[offender.0 as usize].name.clone(),
                    ));
                }
                let (orientation, arcs) = if all_forward {
                    (Orientation::Clockwise, walk.iter().map(|d| d.0).collect::<Vec<_>>())
                } else {
                    (
                        Orientation::Counterclockwise,
                        walk.iter().rev().map(|d| d.0).collect::<Vec<_>>(),
                    )
                };
                if arcs.len() < 3 {
                    return Err(DimerError::FaceTooShort(
                        arcs.iter().map(|&a| self.arcs[a as usize].name.clone()).collect(),
                    ));
                }
                faces.push(Face { arcs, orientation });
            }
        }
        // every arc borders exactly one face of each orientation
        let mut arc_face = vec![[(u32::MAX, 0u32); 2]; self.arcs.len()];
        for (fi, f) in faces.iter().enumerate() {
            let slot = match f.orientation {
                Orientation::Clockwise => 0,
                Orientation::Counterclockwise => 1,
            };
            for (pos, &a) in f.arcs.iter().enumerate() {
                if arc_face[a as usize][slot].0 != u32::MAX {
                    return Err(DimerError::OrientationClash(self.arcs[a as usize].name.clone()));
                }
                arc_face[a as usize][slot] = (fi as u32, pos as u32);
            }
        }
        for (a, af) in arc_face.iter().enumerate() {
            if af[0].0 == u32::MAX || af[1].0 == u32::MAX {
                return Err(DimerError::OrientationClash(self.arcs[a].name.clone()));
            }
        }
        self.faces = faces;
        self.arc_face = arc_face;
        Ok(())
    }

    fn check_euler(&self) -> Result<(), DimerError> {
        let chi = self.euler_characteristic();
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(DimerError::BadEuler(chi));
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.punctures.len() as i64 - self.arcs.len() as i64 + self.faces.len() as i64
    }

    pub fn genus(&self) -> u32 {
        ((2 - self.euler_characteristic()) / 2) as u32
    }

    pub fn arc_by_name(&self, name: &str) -> Option<u32> {
        self.arcs.iter().position(|a| a.name == name).map(|i| i as u32)
    }

    pub fn puncture_by_name(&self, name: &str) -> Option<u32> {
        self.punctures.iter().position(|p| p == name).map(|i| i as u32)
    }

    pub fn max_face_len(&self) -> usize {
        self.faces.iter().map(|f| f.arcs.len()).max().unwrap_or(0)
    }

    /// The bounding face of `arc` with the given orientation, and the
    /// position of `arc` in its traversal.
    pub fn face_of(&self, arc: u32, o: Orientation) -> (u32, u32) {
        let slot = match o {
            Orientation::Clockwise => 0,
            Orientation::Counterclockwise => 1,
        };
        self.arc_face[arc as usize][slot]
    }

    /// Next arc when the zigzag strand on `arc` turns `turn` at its head.
    pub fn turn_successor(&self, arc: u32, turn: Turn) -> u32 {
        let (f, pos) = self.face_of(arc, turn.face_orientation());
        let face = &self.faces[f as usize];
        face.arcs[(pos as usize + 1) % face.arcs.len()]
    }

    /// Previous arc along the same strand (the arc whose `turn.flip()`-turn
    /// leads to `arc` is on the `turn.face_orientation()` face).
    pub fn turn_predecessor(&self, arc: u32, turn_at_prev: Turn) -> u32 {
        let (f, pos) = self.face_of(arc, turn_at_prev.face_orientation());
        let face = &self.faces[f as usize];
        face.arcs[(pos as usize + face.arcs.len() - 1) % face.arcs.len()]
    }

    /// Step a zigzag germ: successor arc, flipped turn.
    pub fn step_germ(&self, g: Germ) -> Germ {
        (self.turn_successor(g.0, g.1), g.1.flip())
    }

    /// The face corner cut by a zigzag step, as (face, corner index) where
    /// corner `i` of a face sits between traversal positions `i` and `i+1`.
    pub fn germ_angle(&self, g: Germ) -> (u32, u32) {
        let (f, pos) = self.face_of(g.0, g.1.face_orientation());
        (f, pos)
    }

    /// Complement of `arc` in its face of orientation `o`: the boundary
    /// traversal from the head of `arc` around to its tail.
    pub fn complement(&self, arc: u32, o: Orientation) -> Vec<u32> {
        let (f, pos) = self.face_of(arc, o);
        let face = &self.faces[f as usize];
        let m = face.arcs.len();
        (1..m).map(|k| face.arcs[(pos as usize + k) % m]).collect()
    }

    /// A face boundary cycle based at puncture `v` (first face in index
    /// order whose traversal passes through `v`).
    pub fn face_cycle_at(&self, v: u32) -> Option<Vec<u32>> {
        for face in &self.faces {
            let m = face.arcs.len();
            for (i, &a) in face.arcs.iter().enumerate() {
                if self.arcs[a as usize].tail == v {
                    return Some((0..m).map(|k| face.arcs[(i + k) % m]).collect());
                }
            }
        }
        None
    }

    /// The path-algebra quiver of this dimer, with the given deformation
    /// variable names.
    pub fn path_quiver(&self, vars: Vec<String>) -> crate::ncpoly::Quiver {
        crate::ncpoly::Quiver {
            name: self.name.clone(),
            vertices: self.punctures.clone(),
            arcs: self
                .arcs
                .iter()
                .map(|a| crate::ncpoly::QuiverArc {
                    name: a.name.clone(),
                    source: a.tail,
                    target: a.head,
                })
                .collect(),
            vars,
        }
    }

    /// Complete, duplicate-free list of zigzag paths. Every germ is covered
    /// by exactly one path.
    pub fn zigzag_paths(&self) -> Vec<ZigzagPath> {
        let mut seen: HashSet<Germ> = HashSet::new();
        let mut raw: Vec<Vec<Germ>> = Vec::new();
        for arc in 0..self.arcs.len() as u32 {
            for turn in [Turn::Right, Turn::Left] {
                let start = (arc, turn);
                if seen.contains(&start) {
                    continue;
                }
                let mut steps = Vec::new();
                let mut g = start;
                loop {
                    seen.insert(g);
                    steps.push(g);
                    g = self.step_germ(g);
                    if g == start {
                        break;
                    }
                }
                raw.push(steps);
            }
        }
        // canonical form: lexicographically minimal rotation of the step word
        let mut paths: Vec<ZigzagPath> = raw
            .into_iter()
            .map(|steps| {
                let n = steps.len();
                let min_rot = (0..n)
                    .min_by_key(|&k| {
                        let mut w: Vec<Germ> = Vec::with_capacity(n);
                        w.extend_from_slice(&steps[k..]);
                        w.extend_from_slice(&steps[..k]);
                        w
                    })
                    .unwrap();
                let mut steps2 = Vec::with_capacity(n);
                steps2.extend_from_slice(&steps[min_rot..]);
                steps2.extend_from_slice(&steps[..min_rot]);
                ZigzagPath::new(self, steps2)
            })
            .collect();
        paths.sort_by(|a, b| a.steps.cmp(&b.steps));
        paths
    }

    /// Serialize in the dimer file format.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# dimer {}", self.name).unwrap();
        writeln!(out, "punctures: {}", self.punctures.join(" ")).unwrap();
        for a in &self.arcs {
            writeln!(
                out,
                "arc {} {} {}",
                a.name, self.punctures[a.tail as usize], self.punctures[a.head as usize]
            )
            .unwrap();
        }
        for (p, rot) in self.rotation.iter().enumerate() {
            let ends: Vec<String> = rot
                .iter()
                .map(|e| {
                    format!("{}.{}", self.arcs[e.arc as usize].name, if e.is_head { "h" } else { "t" })
                })
                .collect();
            writeln!(out, "rot {}: {}", self.punctures[p], ends.join(" ")).unwrap();
        }
        out
    }

    /// Parse the dimer file format; `# ...` lines are comments.
    pub fn parse(name: &str, input: &str) -> Result<Dimer, DimerError> {
        let mut punctures: Vec<String> = Vec::new();
        let mut arcs: Vec<DimerArc> = Vec::new();
        let mut rot_lines: Vec<(String, Vec<(String, bool)>)> = Vec::new();
        for line in input.lines() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("punctures:") {
                punctures.extend(rest.split_whitespace().map(|s| s.to_string()));
            } else if let Some(rest) = line.strip_prefix("arc ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(DimerError::Parse(format!("bad arc line `{line}`")));
                }
                arcs.push(DimerArc { name: parts[0].into(), tail: u32::MAX, head: u32::MAX });
                let idx = arcs.len() - 1;
                // resolve later: stash endpoint names via rot_lines trick
                rot_lines.push((
                    format!("\u{0}arc{idx}"),
                    vec![(parts[1].into(), false), (parts[2].into(), true)],
                ));
            } else if let Some(rest) = line.strip_prefix("rot ") {
                let (p, ends) = rest
                    .split_once(':')
                    .ok_or_else(|| DimerError::Parse(format!("bad rot line `{line}`")))?;
                let ends: Vec<(String, bool)> = ends
                    .split_whitespace()
                    .map(|e| {
                        if let Some(a) = e.strip_suffix(".h") {
                            Ok((a.to_string(), true))
                        } else if let Some(a) = e.strip_suffix(".t") {
                            Ok((a.to_string(), false))
                        } else {
                            Err(DimerError::Parse(format!("bad end `{e}`")))
                        }
                    })
                    .collect::<Result<_, _>>()?;
                rot_lines.push((p.trim().to_string(), ends));
            } else {
                return Err(DimerError::Parse(format!("unrecognized line `{line}`")));
            }
        }
        let pidx: HashMap<&str, u32> =
            punctures.iter().enumerate().map(|(i, p)| (p.as_str(), i as u32)).collect();
        let mut rotation: Vec<Vec<End>> = vec![Vec::new(); punctures.len()];
        let mut seen_rot: HashSet<u32> = HashSet::new();
        for (key, ends) in rot_lines {
            if let Some(idx) = key.strip_prefix("\u{0}arc") {
                let idx: usize = idx.parse().unwrap();
                let tail = *pidx
                    .get(ends[0].0.as_str())
                    .ok_or_else(|| DimerError::Parse(format!("unknown puncture `{}`", ends[0].0)))?;
                let head = *pidx
                    .get(ends[1].0.as_str())
                    .ok_or_else(|| DimerError::Parse(format!("unknown puncture `{}`", ends[1].0)))?;
                arcs[idx].tail = tail;
                arcs[idx].head = head;
            } else {
                let p = *pidx
                    .get(key.as_str())
                    .ok_or_else(|| DimerError::Parse(format!("unknown puncture `{key}`")))?;
                if !seen_rot.insert(p) {
                    return Err(DimerError::Parse(format!("duplicate rot line for `{key}`")));
                }
                let aidx: HashMap<&str, u32> = arcs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| (a.name.as_str(), i as u32))
                    .collect();
                rotation[p as usize] = ends
                    .iter()
                    .map(|(a, is_head)| {
                        aidx.get(a.as_str())
                            .map(|&arc| End { arc, is_head: *is_head })
                            .ok_or_else(|| DimerError::Parse(format!("unknown arc `{a}`")))
                    })
                    .collect::<Result<_, _>>()?;
            }
        }
        Dimer::new(name.to_string(), punctures, arcs, rotation)
    }

    /// Resolve a built-in name (`sphere3`, `torus4`, `Q<M>`) or treat the
    /// argument as a file path.
    pub fn builtin(name: &str) -> Option<Result<Dimer, DimerError>> {
        match name {
            "sphere3" => Some(sphere3()),
            "torus4" => Some(torus4()),
            _ => name
                .strip_prefix('Q')
                .and_then(|m| m.parse::<u32>().ok())
                .map(standard_sphere_dimer),
        }
    }
}

/// A closed zigzag path with explicit turn data, canonical rotation, and a
/// configurable identity location.
#[derive(Debug, Clone)]
pub struct ZigzagPath {
    /// Steps in traversal order; turns alternate strictly.
    pub steps: Vec<Germ>,
    /// Index into `steps` of the chosen identity arc.
    pub identity_location: usize,
    /// Index into `steps` of the chosen co-identity angle, which must be a
    /// left-turn step (its angle lies in a counterclockwise polygon).
    pub coidentity_location: usize,
}

impl ZigzagPath {
    fn new(dimer: &Dimer, steps: Vec<Germ>) -> ZigzagPath {
        debug_assert!(steps.len() % 2 == 0);
        debug_assert!(steps.windows(2).all(|w| w[0].1 != w[1].1));
        let _ = dimer;
        // default identity: minimal arc id among right-turn steps
        let identity_location = steps
            .iter()
            .enumerate()
            .filter(|(_, g)| g.1 == Turn::Right)
            .min_by_key(|(_, g)| g.0)
            .map(|(i, _)| i)
            .unwrap_or(0);
        // default co-identity: the left-turn step following the identity
        // (its angle lies in the counterclockwise polygon at the identity arc's head)
        let n = steps.len();
        let coidentity_location = (identity_location + 1) % n;
        ZigzagPath { steps, identity_location, coidentity_location }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn contains_germ(&self, g: Germ) -> bool {
        self.steps.contains(&g)
    }

    pub fn identity_germ(&self) -> Germ {
        self.steps[self.identity_location]
    }

    /// Move the identity to the unique step of this path at `arc`, if any.
    /// Errors when the path passes `arc` with both turns (ambiguous).
    pub fn set_identity_arc(&mut self, arc: u32) -> Result<(), String> {
        let hits: Vec<usize> =
            self.steps.iter().enumerate().filter(|(_, g)| g.0 == arc).map(|(i, _)| i).collect();
        match hits.len() {
            0 => Err(format!("path does not pass arc index {arc}")),
            1 => {
                self.identity_location = hits[0];
                self.coidentity_location = (hits[0] + 1) % self.steps.len();
                Ok(())
            }
            _ => Err(format!(
                "path passes arc index {arc} twice; choose the germ explicitly"
            )),
        }
    }

    pub fn set_identity_germ(&mut self, g: Germ) -> Result<(), String> {
        match self.steps.iter().position(|&s| s == g) {
            Some(i) => {
                self.identity_location = i;
                self.coidentity_location = (i + 1) % self.steps.len();
                Ok(())
            }
            None => Err("germ not on this path".into()),
        }
    }

    pub fn display(&self, dimer: &Dimer) -> String {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|g| {
                format!(
                    "{}{}",
                    dimer.arcs[g.0 as usize].name,
                    match g.1 {
                        Turn::Right => "R",
                        Turn::Left => "L",
                    }
                )
            })
            .collect();
        parts.join(" ")
    }
}

/// Index from germs to (path index, step index) over a fixed path list.
pub fn germ_index(paths: &[ZigzagPath]) -> BTreeMap<Germ, (usize, usize)> {
    let mut map = BTreeMap::new();
    for (pi, p) in paths.iter().enumerate() {
        for (si, &g) in p.steps.iter().enumerate() {
            map.insert(g, (pi, si));
        }
    }
    map
}

/// The three-punctured sphere dimer of the worked example, with puncture
/// names chosen so that the clockwise monogon ending at arc `x` covers the
/// puncture named `qx`.
pub fn sphere3() -> Result<Dimer, DimerError> {
    // directed equator cycle traversing c, then b, then a
    // c: pa -> pb, b: pb -> pc, a: pc -> pa
    // puncture names: qa = h(c), qb = h(a), qc = h(b)
    let punctures = vec!["qb".to_string(), "qa".to_string(), "qc".to_string()];
    let arcs = vec![
        DimerArc { name: "a".into(), tail: 2, head: 0 },
        DimerArc { name: "b".into(), tail: 1, head: 2 },
        DimerArc { name: "c".into(), tail: 0, head: 1 },
    ];
    let rotation = vec![
        vec![End::head(0), End::tail(2)],
        vec![End::head(2), End::tail(1)],
        vec![End::head(1), End::tail(0)],
    ];
    Dimer::new("sphere3".into(), punctures, arcs, rotation)
}

/// The standard sphere dimer `Q_M`: M punctures on the equator, M arcs
/// forming a directed cycle, two faces of length M.
pub fn standard_sphere_dimer(m: u32) -> Result<Dimer, DimerError> {
    if m < 3 {
        return Err(DimerError::MTooSmall);
    }
    let punctures: Vec<String> = (1..=m).map(|i| format!("p{i}")).collect();
    // arc a_i runs from p_{i+1} to p_i so the traversal cycle is
    // [a_M, ..., a_2, a_1], matching the sphere3 labeling pattern.
    let arcs: Vec<DimerArc> = (0..m)
        .map(|i| DimerArc { name: format!("a{}", i + 1), tail: (i + 1) % m, head: i })
        .collect();
    let rotation: Vec<Vec<End>> =
        (0..m).map(|i| vec![End::head(i), End::tail((i + m - 1) % m)]).collect();
    Dimer::new(format!("Q{m}"), punctures, arcs, rotation)
}

/// The four-punctured torus dimer of the worked example: doubled square
/// quiver with four square faces. Puncture names are calibrated against the
/// midpoint-polygon census (see the disks module tests).
pub fn torus4() -> Result<Dimer, DimerError> {
    // punctures: P_alpha, P_beta, P_gamma, P_delta from the face derivation
    // a1, a2: Pd -> Pa;  a3, a4: Pg -> Pb;  b1, b3: Pb -> Pd;  b2, b4: Pa -> Pg
    // clockwise faces:  F1 = [a2 b2 a4 b1], F2 = [a3 b3 a1 b4]
    // counterclockwise: G1 = [b2 a3 b1 a1], G2 = [b3 a2 b4 a4]
    // names calibrated so the census reproduces the known midpoint-polygon
    // deformation parameters: Pa = q2, Pb = q3, Pg = q4, Pd = q1
    let punctures = vec!["q2".to_string(), "q3".to_string(), "q4".to_string(), "q1".to_string()];
    let (pa, pb, pg, pd) = (0u32, 1u32, 2u32, 3u32);
    let arcs = vec![
        DimerArc { name: "a1".into(), tail: pd, head: pa }, // 0
        DimerArc { name: "a2".into(), tail: pd, head: pa }, // 1
        DimerArc { name: "a3".into(), tail: pg, head: pb }, // 2
        DimerArc { name: "a4".into(), tail: pg, head: pb }, // 3
        DimerArc { name: "b1".into(), tail: pb, head: pd }, // 4
        DimerArc { name: "b2".into(), tail: pa, head: pg }, // 5
        DimerArc { name: "b3".into(), tail: pb, head: pd }, // 6
        DimerArc { name: "b4".into(), tail: pa, head: pg }, // 7
    ];
    let (a1, a2, a3, a4, b1, b2, b3, b4) = (0, 1, 2, 3, 4, 5, 6, 7);
    let rotation = vec![
        // Pa: [a2.h, b2.t, a1.h, b4.t]
        vec![End::head(a2), End::tail(b2), End::head(a1), End::tail(b4)],
        // Pb: [a4.h, b1.t, a3.h, b3.t]
        vec![End::head(a4), End::tail(b1), End::head(a3), End::tail(b3)],
        // Pg: [b2.h, a4.t, b4.h, a3.t]
        vec![End::head(b2), End::tail(a4), End::head(b4), End::tail(a3)],
        // Pd: [b1.h, a2.t, b3.h, a1.t]
        vec![End::head(b1), End::tail(a2), End::head(b3), End::tail(a1)],
    ];
    Dimer::new("torus4".into(), punctures, arcs, rotation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere3_shape() {
        let d = sphere3().unwrap();
        assert_eq!(d.punctures.len(), 3);
        assert_eq!(d.arcs.len(), 3);
        assert_eq!(d.faces.len(), 2);
        assert_eq!(d.genus(), 0);
        let cw: Vec<_> =
            d.faces.iter().filter(|f| f.orientation == Orientation::Clockwise).collect();
        assert_eq!(cw.len(), 1);
        // both faces traverse c, b, a
        let c = d.arc_by_name("c").unwrap();
        let b = d.arc_by_name("b").unwrap();
        let a = d.arc_by_name("a").unwrap();
        for f in &d.faces {
            let mut arcs = f.arcs.clone();
            let pos = arcs.iter().position(|&x| x == c).unwrap();
            arcs.rotate_left(pos);
            assert_eq!(arcs, vec![c, b, a]);
        }
    }

    #[test]
    fn torus4_shape() {
        let d = torus4().unwrap();
        assert_eq!(d.punctures.len(), 4);
        assert_eq!(d.arcs.len(), 8);
        assert_eq!(d.faces.len(), 4);
        assert_eq!(d.genus(), 1);
        assert_eq!(
            d.faces.iter().filter(|f| f.orientation == Orientation::Clockwise).count(),
            2
        );
        // expected traversals
        let n = |s: &str| d.arc_by_name(s).unwrap();
        let mut found_f1 = false;
        for f in &d.faces {
            if f.orientation == Orientation::Clockwise && f.arcs.contains(&n("a2")) {
                let mut arcs = f.arcs.clone();
                let pos = arcs.iter().position(|&x| x == n("a2")).unwrap();
                arcs.rotate_left(pos);
                assert_eq!(arcs, vec![n("a2"), n("b2"), n("a4"), n("b1")]);
                found_f1 = true;
            }
        }
        assert!(found_f1);
    }

    #[test]
    fn zigzag_counts() {
        assert_eq!(sphere3().unwrap().zigzag_paths().len(), 1);
        assert_eq!(standard_sphere_dimer(5).unwrap().zigzag_paths().len(), 1);
        assert_eq!(standard_sphere_dimer(6).unwrap().zigzag_paths().len(), 2);
        assert_eq!(torus4().unwrap().zigzag_paths().len(), 4);
    }

    #[test]
    fn torus4_zigzag_membership() {
        // the four zigzag paths of the worked example, as arc traversal cycles
        let d = torus4().unwrap();
        let n = |s: &str| d.arc_by_name(s).unwrap();
        let expected = [
            vec!["b1", "a2", "b4", "a3"],
            vec!["b2", "a3", "b3", "a2"],
            vec!["a1", "b2", "a4", "b3"],
            vec!["a1", "b4", "a4", "b1"],
        ];
        let paths = d.zigzag_paths();
        for exp in expected {
            let exp: Vec<u32> = exp.iter().map(|s| n(s)).collect();
            let found = paths.iter().any(|p| {
                let arcs: Vec<u32> = p.steps.iter().map(|g| g.0).collect();
                (0..arcs.len()).any(|k| {
                    let mut r = arcs.clone();
                    r.rotate_left(k);
                    r == exp
                })
            });
            assert!(found, "missing zigzag path {exp:?}");
        }
    }

    #[test]
    fn zigzag_cover_property() {
        for d in [sphere3().unwrap(), torus4().unwrap(), standard_sphere_dimer(7).unwrap()] {
            let total: usize = d.zigzag_paths().iter().map(|p| p.len()).sum();
            assert_eq!(total, 2 * d.arcs.len());
        }
    }

    #[test]
    fn zigzag_steps_compose_and_alternate() {
        let d = torus4().unwrap();
        for p in d.zigzag_paths() {
            let n = p.len();
            for i in 0..n {
                let (a, t) = p.steps[i];
                let (b, t2) = p.steps[(i + 1) % n];
                assert_eq!(d.turn_successor(a, t), b);
                assert_eq!(t.flip(), t2);
                // right-turn pairs lie on a clockwise polygon
                let (f, pos) = d.face_of(a, t.face_orientation());
                let face = &d.faces[f as usize];
                assert_eq!(face.arcs[(pos as usize + 1) % face.arcs.len()], b);
            }
        }
    }

    #[test]
    fn face_two_coloring_bipartite() {
        for d in [sphere3().unwrap(), torus4().unwrap()] {
            for arc in 0..d.arcs.len() as u32 {
                let (fc, _) = d.face_of(arc, Orientation::Clockwise);
                let (fcc, _) = d.face_of(arc, Orientation::Counterclockwise);
                assert_eq!(d.faces[fc as usize].orientation, Orientation::Clockwise);
                assert_eq!(d.faces[fcc as usize].orientation, Orientation::Counterclockwise);
                assert_ne!(fc, fcc);
            }
        }
    }

    #[test]
    fn malformed_rotation_rejected() {
        // an arc-end appearing twice
        let punctures = vec!["p".to_string(), "q".to_string()];
        let arcs = vec![DimerArc { name: "a".into(), tail: 0, head: 1 }];
        let rotation = vec![vec![End::tail(0), End::tail(0)], vec![End::head(0)]];
        match Dimer::new("bad".into(), punctures, arcs, rotation) {
            Err(DimerError::MalformedRotation(_)) => {}
            other => panic!("expected MalformedRotation, got {other:?}"),
        }
    }

    #[test]
    fn sphere_m_too_small() {
        assert_eq!(standard_sphere_dimer(2).unwrap_err(), DimerError::MTooSmall);
    }

    #[test]
    fn file_round_trip() {
        for d in [sphere3().unwrap(), torus4().unwrap(), standard_sphere_dimer(5).unwrap()] {
            let s = d.serialize();
            let d2 = Dimer::parse(&d.name, &s).unwrap();
            assert_eq!(d.serialize(), d2.serialize());
            assert_eq!(d.faces.len(), d2.faces.len());
        }
    }

    #[test]
    fn default_identity_is_min_right_turn_arc() {
        let d = sphere3().unwrap();
        let p = &d.zigzag_paths()[0];
        let g = p.identity_germ();
        assert_eq!(g.1, Turn::Right);
        assert_eq!(d.arcs[g.0 as usize].name, "a");
    }
}
