//! The dual dimer and the classical mirror data: superpotential, relations,
//! potential, the matrix factorizations attached to arcs, and the
//! morphism-level map on angles.
//!
//! Duality is realized combinatorially: clockwise faces keep their boundary
//! traversal, counterclockwise faces have it reversed, and the dual arcs run
//! between the zigzag paths through each arc (the left-turner at the head is
//! the tail, the right-turner the head).

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::dimer::{germ_index, Dimer, DimerArc, DimerError, End, Germ, Orientation, Turn, ZigzagPath};
use crate::ncpoly::{NcError, NcPoly, Quiver, QuiverPath};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MirrorError {
    #[error("NOT_AN_ANGLE: {0}")]
    NotAnAngle(String),
    #[error(transparent)]
    Dimer(#[from] DimerError),
    #[error(transparent)]
    Nc(#[from] NcError),
}

/// A dimer together with its zigzag paths, dual dimer and mirror quiver.
/// Arc indices agree between the base dimer, the dual dimer and the quiver.
#[derive(Debug, Clone)]
pub struct Mirror {
    pub base: Dimer,
    pub paths: Vec<ZigzagPath>,
    pub dual: Dimer,
    pub quiver: Arc<Quiver>,
    germ_to_path: BTreeMap<Germ, (usize, usize)>,
}

impl Mirror {
    pub fn new(base: Dimer) -> Result<Mirror, MirrorError> {
        let paths = base.zigzag_paths();
        let germ_to_path = germ_index(&paths);
        let path_names: Vec<String> = (1..=paths.len()).map(|i| format!("L{i}")).collect();
        // dual arcs: tail = left-turner at the head, head = right-turner
        let arcs: Vec<DimerArc> = base
            .arcs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let t = germ_to_path[&(i as u32, Turn::Left)].0 as u32;
                let h = germ_to_path[&(i as u32, Turn::Right)].0 as u32;
                DimerArc { name: a.name.clone(), tail: t, head: h }
            })
            .collect();
        // rotation at a dual vertex: the ends of the path's arcs in traversal
        // order; a left turn contributes the tail end, a right turn the head.
        let rotation: Vec<Vec<End>> = paths
            .iter()
            .map(|p| {
                p.steps
                    .iter()
                    .map(|&(a, t)| match t {
                        Turn::Left => End::tail(a),
                        Turn::Right => End::head(a),
                    })
                    .collect()
            })
            .collect();
        let dual = Dimer::new(format!("dual({})", base.name), path_names, arcs, rotation)?;
        let quiver = Arc::new(dual.path_quiver(base.punctures.clone()));
        Ok(Mirror { base, paths, dual, quiver, germ_to_path })
    }

    /// Zigzag path index holding a germ of the base dimer.
    pub fn path_of_germ(&self, g: Germ) -> usize {
        self.germ_to_path[&g].0
    }

    /// W = sum of clockwise face cycles minus counterclockwise face cycles
    /// of the dual dimer.
    pub fn classical_superpotential(&self, order: u32) -> NcPoly {
        let mut w = NcPoly::zero(self.quiver.clone(), order);
        for face in &self.dual.faces {
            let p = QuiverPath::from_arcs(&self.quiver, face.arcs.clone())
                .expect("face boundary composes");
            let cyc = NcPoly::cyc(self.quiver.clone(), order, &p).expect("face boundary closes");
            w = match face.orientation {
                Orientation::Clockwise => w.add(&cyc).unwrap(),
                Orientation::Counterclockwise => w.sub(&cyc).unwrap(),
            };
        }
        w
    }

    /// Classical relations, one per arrow of the dual quiver.
    pub fn classical_relations(&self, order: u32) -> Vec<NcPoly> {
        let w = self.classical_superpotential(order);
        (0..self.quiver.arcs.len() as u32)
            .map(|e| w.cyclic_derivative(e).expect("W is cyclic"))
            .collect()
    }

    /// The complement path of a dual arc in its face of orientation `o`
    /// (r_a^+ for clockwise, r_a^- for counterclockwise).
    pub fn complement_path(&self, arc: u32, o: Orientation) -> QuiverPath {
        let arcs = self.dual.complement(arc, o);
        QuiverPath::from_arcs(&self.quiver, arcs).expect("complement composes")
    }

    /// One chosen face cycle per dual vertex; the potential before reduction.
    pub fn classical_potential_raw(&self, order: u32) -> NcPoly {
        let mut ell = NcPoly::zero(self.quiver.clone(), order);
        for v in 0..self.dual.punctures.len() as u32 {
            let cycle = self.dual.face_cycle_at(v).expect("every vertex meets a face");
            let p = QuiverPath::from_arcs(&self.quiver, cycle).unwrap();
            ell = ell.add(&NcPoly::from_path(self.quiver.clone(), order, p)).unwrap();
        }
        ell
    }

    /// The classical mirror object of an arc: modules labeled by the two
    /// zigzag paths through it, f = the arc, g = its complement.
    pub fn classical_mirror_object(&self, arc: u32, order: u32) -> MatrixFactorization {
        let f = NcPoly::from_path(
            self.quiver.clone(),
            order,
            QuiverPath { source: self.quiver.source(arc), arcs: vec![arc] },
        );
        let g = NcPoly::from_path(
            self.quiver.clone(),
            order,
            self.complement_path(arc, Orientation::Clockwise),
        );
        MatrixFactorization {
            even_vertex: self.quiver.target(arc),
            odd_vertex: self.quiver.source(arc),
            f,
            g,
            curvature_even: NcPoly::zero(self.quiver.clone(), order),
            curvature_odd: NcPoly::zero(self.quiver.clone(), order),
        }
    }

    /// The angle of the base dimer winding from rotation position
    /// `start_pos` at `puncture` through `length` indecomposable angles.
    pub fn angle(&self, puncture: u32, start_pos: u32, length: u32) -> Result<Angle, MirrorError> {
        let valence = self.base.rotation[puncture as usize].len() as u32;
        if start_pos >= valence {
            return Err(MirrorError::NotAnAngle(format!(
                "rotation position {start_pos} out of range at puncture {puncture}"
            )));
        }
        Ok(Angle { puncture, start_pos, length })
    }

    /// Arcs crossed by the zigzag segment of an angle, from source to target.
    pub fn angle_arcs(&self, alpha: &Angle) -> Vec<u32> {
        let rot = &self.base.rotation[alpha.puncture as usize];
        (0..=alpha.length)
            .map(|i| rot[(alpha.start_pos + i) as usize % rot.len()].arc)
            .collect()
    }

    /// The morphism of matrix factorizations attached to an angle: the two
    /// opposite paths along the mirror zigzag segment, diagonal for even
    /// angle length, antidiagonal for odd.
    pub fn zeta(&self, alpha: &Angle) -> Result<MfMorphism, MirrorError> {
        let order = 0;
        let rot = &self.base.rotation[alpha.puncture as usize];
        let valence = rot.len();
        let z = self.angle_arcs(alpha);
        let k = alpha.length as usize;
        // u_i = complement of the dual pair (z_{i-1} -> z_i) in the dual face
        // matching the i-th sub-angle's face of the base dimer
        let mut u: Vec<Vec<u32>> = vec![Vec::new()]; // slot 0 unused
        for i in 1..=k {
            let e_prev = rot[(alpha.start_pos as usize + i - 1) % valence];
            let o = if e_prev.is_head {
                Orientation::Clockwise
            } else {
                Orientation::Counterclockwise
            };
            let comp = self.dual.complement(z[i - 1], o);
            if comp.first() != Some(&z[i]) {
                return Err(MirrorError::NotAnAngle(format!(
                    "sub-angle {i} does not continue the zigzag segment"
                )));
            }
            u.push(comp[1..].to_vec());
        }
        // chain the u's of alternating steps; the highest index is walked first
        let chain = |indices: &[usize], start_vertex: u32| -> NcPoly {
            let mut arcs: Vec<u32> = Vec::new();
            for &i in indices.iter().rev() {
                arcs.extend_from_slice(&u[i]);
            }
            if arcs.is_empty() {
                return NcPoly::vertex(self.quiver.clone(), order, start_vertex);
            }
            NcPoly::from_path(
                self.quiver.clone(),
                order,
                QuiverPath::from_arcs(&self.quiver, arcs).expect("opposite path composes"),
            )
        };
        let evens: Vec<usize> = (1..=k).filter(|i| i % 2 == 0).collect();
        let odds: Vec<usize> = (1..=k).filter(|i| i % 2 == 1).collect();
        let (source_arc, target_arc) = (z[0], z[k]);
        let q = &self.quiver;
        let m = if k % 2 == 0 {
            MfMorphism {
                source_arc,
                target_arc,
                parity: Parity::Even,
                // opp2: h(target) -> h(source) through the even-step faces
                a: Some(chain(&evens, q.target(source_arc))),
                b: None,
                c: None,
                // opp1: t(target) -> t(source) through the odd-step faces
                d: Some(chain(&odds, q.source(source_arc))),
            }
        } else {
            MfMorphism {
                source_arc,
                target_arc,
                parity: Parity::Odd,
                a: None,
                // opp1: h(target) -> t(source)
                b: Some(chain(&odds, q.source(source_arc))),
                // opp2: t(target) -> h(source)
                c: Some(chain(&evens, q.target(source_arc))),
                d: None,
            }
        };
        Ok(m)
    }
}

/// An angle of the base dimer: winds around `puncture` from the arc-end at
/// rotation position `start_pos` through `length` indecomposable angles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Angle {
    pub puncture: u32,
    pub start_pos: u32,
    pub length: u32,
}

/// A (possibly deformed) matrix factorization with standard projective
/// modules labeled by dual vertices: even module at `even_vertex` (the head
/// of the defining arc), odd at `odd_vertex`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFactorization {
    pub even_vertex: u32,
    pub odd_vertex: u32,
    /// map even -> odd (right multiplication)
    pub f: NcPoly,
    /// map odd -> even
    pub g: NcPoly,
    pub curvature_even: NcPoly,
    pub curvature_odd: NcPoly,
}

impl MatrixFactorization {
    /// The factorization defects ell - f.g and ell - g.f on the two blocks
    /// (before reduction); only the loops of `ell` at the block vertices
    /// contribute.
    pub fn defects(&self, ell: &NcPoly) -> (NcPoly, NcPoly) {
        let q = ell.quiver.clone();
        let order = ell.order;
        let ev = NcPoly::vertex(q.clone(), order, self.even_vertex);
        let ov = NcPoly::vertex(q.clone(), order, self.odd_vertex);
        // delta^2 on the even module: apply f then g
        let even_sq = self.f.mul(&self.g).unwrap();
        let odd_sq = self.g.mul(&self.f).unwrap();
        let ell_even = ev.mul(ell).unwrap().mul(&ev).unwrap();
        let ell_odd = ov.mul(ell).unwrap().mul(&ov).unwrap();
        (ell_even.sub(&even_sq).unwrap(), ell_odd.sub(&odd_sq).unwrap())
    }

    pub fn serialize(&self, quiver: &Quiver) -> String {
        format!(
            "even: {} odd: {}\nf = {}\ng = {}\ncurvature_even = {}\ncurvature_odd = {}",
            quiver.vertices[self.even_vertex as usize],
            quiver.vertices[self.odd_vertex as usize],
            self.f.serialize(),
            self.g.serialize(),
            self.curvature_even.serialize(),
            self.curvature_odd.serialize()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A morphism of matrix factorizations between the objects of two arcs,
/// presented as a 2-by-2 block matrix. Even morphisms populate the diagonal
/// blocks (`a`: even->even', `d`: odd->odd'), odd morphisms the antidiagonal
/// (`b`: odd->even', `c`: even->odd').
#[derive(Debug, Clone)]
pub struct MfMorphism {
    pub source_arc: u32,
    pub target_arc: u32,
    pub parity: Parity,
    pub a: Option<NcPoly>,
    pub b: Option<NcPoly>,
    pub c: Option<NcPoly>,
    pub d: Option<NcPoly>,
}

impl MfMorphism {
    pub fn identity(mirror: &Mirror, arc: u32, order: u32) -> MfMorphism {
        let q = mirror.quiver.clone();
        MfMorphism {
            source_arc: arc,
            target_arc: arc,
            parity: Parity::Even,
            a: Some(NcPoly::vertex(q.clone(), order, q.target(arc))),
            b: None,
            c: None,
            d: Some(NcPoly::vertex(q.clone(), order, q.source(arc))),
        }
    }

    /// The matrix-factorization differential of this morphism, before any
    /// reduction modulo relations: commutation against the twisted deltas of
    /// the source and target objects.
    pub fn mu1(&self, src: &MatrixFactorization, tgt: &MatrixFactorization) -> MfMorphism {
        let q = src.f.quiver.clone();
        let order = src.f.order;
        let zero = || NcPoly::zero(q.clone(), order);
        let a = self.a.clone().unwrap_or_else(zero);
        let b = self.b.clone().unwrap_or_else(zero);
        let c = self.c.clone().unwrap_or_else(zero);
        let d = self.d.clone().unwrap_or_else(zero);
        // mu1([[A,B],[C,D]]) = [[-g'C + Bf, -g'D + Ag], [f'A - Df, f'B - Cg]]
        // with composition translated to path products; the first-applied map
        // is the left factor of NcPoly::mul.
        let m = |x: &NcPoly, y: &NcPoly| x.mul(y).unwrap();
        let out_a = m(&src.f, &b).sub(&m(&c, &tgt.g)).unwrap();
        let out_b = m(&src.g, &a).sub(&m(&d, &tgt.g)).unwrap();
        let out_c = m(&a, &tgt.f).sub(&m(&src.f, &d)).unwrap();
        let out_d = m(&b, &tgt.f).sub(&m(&src.g, &c)).unwrap();
        MfMorphism {
            source_arc: self.source_arc,
            target_arc: self.target_arc,
            parity: match self.parity {
                Parity::Even => Parity::Odd,
                Parity::Odd => Parity::Even,
            },
            a: Some(out_a),
            b: Some(out_b),
            c: Some(out_c),
            d: Some(out_d),
        }
    }

    pub fn blocks(&self) -> Vec<&NcPoly> {
        [&self.a, &self.b, &self.c, &self.d].into_iter().flatten().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimer::{sphere3, torus4};

    #[test]
    fn dual_of_sphere3_is_one_punctured_torus() {
        let m = Mirror::new(sphere3().unwrap()).unwrap();
        assert_eq!(m.dual.punctures.len(), 1);
        assert_eq!(m.dual.arcs.len(), 3);
        assert_eq!(m.dual.faces.len(), 2);
        assert_eq!(m.dual.genus(), 1);
    }

    #[test]
    fn dual_faces_mirror_the_base_faces() {
        for d in [sphere3().unwrap(), torus4().unwrap()] {
            let m = Mirror::new(d).unwrap();
            let base_words: Vec<(Orientation, Vec<u32>)> = m
                .base
                .faces
                .iter()
                .map(|f| {
                    let arcs = match f.orientation {
                        Orientation::Clockwise => f.arcs.clone(),
                        Orientation::Counterclockwise => {
                            f.arcs.iter().rev().cloned().collect()
                        }
                    };
                    (f.orientation, arcs)
                })
                .collect();
            for (o, arcs) in base_words {
                let found = m.dual.faces.iter().any(|f| {
                    f.orientation == o
                        && f.arcs.len() == arcs.len()
                        && (0..arcs.len()).any(|k| {
                            let mut r = f.arcs.clone();
                            r.rotate_left(k);
                            r == arcs
                        })
                });
                assert!(found, "dual face {arcs:?} ({o:?}) missing in {}", m.dual.name);
            }
        }
    }

    #[test]
    fn sphere3_w_is_commutator() {
        let m = Mirror::new(sphere3().unwrap()).unwrap();
        let w = m.classical_superpotential(0);
        let q = m.quiver.clone();
        let a = q.arc_by_name("a").unwrap();
        let b = q.arc_by_name("b").unwrap();
        let c = q.arc_by_name("c").unwrap();
        let abc = QuiverPath::from_word(&q, &[a, b, c]).unwrap();
        let cba = QuiverPath::from_word(&q, &[c, b, a]).unwrap();
        let expect = NcPoly::cyc(q.clone(), 0, &abc)
            .unwrap()
            .sub(&NcPoly::cyc(q.clone(), 0, &cba).unwrap())
            .unwrap();
        assert_eq!(w, expect);
        assert!(w.is_cyclic());
        let da = w.cyclic_derivative(a).unwrap();
        let bc = NcPoly::from_word(q.clone(), 0, &[b, c]).unwrap();
        let cb = NcPoly::from_word(q.clone(), 0, &[c, b]).unwrap();
        assert_eq!(da, bc.sub(&cb).unwrap());
    }

    #[test]
    fn torus4_w_matches_display() {
        let m = Mirror::new(torus4().unwrap()).unwrap();
        let q = m.quiver.clone();
        let w = m.classical_superpotential(0);
        assert!(w.is_cyclic());
        let n = |s: &str| q.arc_by_name(s).unwrap();
        let mk = |word: [&str; 4]| {
            let w: Vec<u32> = word.iter().map(|s| n(s)).collect();
            QuiverPath::from_word(&q, &w).unwrap()
        };
        let expect = NcPoly::cyc(q.clone(), 0, &mk(["b1", "a4", "b2", "a2"]))
            .unwrap()
            .add(&NcPoly::cyc(q.clone(), 0, &mk(["b4", "a1", "b3", "a3"])).unwrap())
            .unwrap()
            .sub(&NcPoly::cyc(q.clone(), 0, &mk(["b2", "a3", "b1", "a1"])).unwrap())
            .unwrap()
            .sub(&NcPoly::cyc(q.clone(), 0, &mk(["b3", "a2", "b4", "a4"])).unwrap())
            .unwrap();
        assert_eq!(w, expect);
        let db1 = w.cyclic_derivative(n("b1")).unwrap();
        let r1 = NcPoly::from_word(q.clone(), 0, &[n("a4"), n("b2"), n("a2")])
            .unwrap()
            .sub(&NcPoly::from_word(q.clone(), 0, &[n("a1"), n("b2"), n("a3")]).unwrap())
            .unwrap();
        assert_eq!(db1, r1);
        let db2 = w.cyclic_derivative(n("b2")).unwrap();
        let r2 = NcPoly::from_word(q.clone(), 0, &[n("a2"), n("b1"), n("a4")])
            .unwrap()
            .sub(&NcPoly::from_word(q.clone(), 0, &[n("a3"), n("b1"), n("a1")]).unwrap())
            .unwrap();
        assert_eq!(db2, r2);
    }

    #[test]
    fn every_w_term_has_face_length() {
        let m = Mirror::new(torus4().unwrap()).unwrap();
        let w = m.classical_superpotential(0);
        for p in w.terms.keys() {
            assert!(p.len() >= 3);
        }
    }

    #[test]
    fn mirror_objects_shape() {
        let m = Mirror::new(sphere3().unwrap()).unwrap();
        let q = m.quiver.clone();
        let a = q.arc_by_name("a").unwrap();
        let ma = m.classical_mirror_object(a, 0);
        let bc = NcPoly::from_word(
            q.clone(),
            0,
            &[q.arc_by_name("b").unwrap(), q.arc_by_name("c").unwrap()],
        )
        .unwrap();
        assert_eq!(ma.g, bc);
        let m = Mirror::new(torus4().unwrap()).unwrap();
        let q = m.quiver.clone();
        let n = |s: &str| q.arc_by_name(s).unwrap();
        let ma1 = m.classical_mirror_object(n("a1"), 0);
        let g = NcPoly::from_word(q.clone(), 0, &[n("b3"), n("a3"), n("b4")]).unwrap();
        assert_eq!(ma1.g, g);
        assert_eq!(ma1.even_vertex, q.target(n("a1")));
        assert_eq!(ma1.odd_vertex, q.source(n("a1")));
    }

    #[test]
    fn identity_angle_gives_identity_morphism() {
        let m = Mirror::new(sphere3().unwrap()).unwrap();
        for arc in 0..3u32 {
            let (p, pos) = (0..m.base.punctures.len() as u32)
                .find_map(|p| {
                    m.base.rotation[p as usize]
                        .iter()
                        .position(|e| e.arc == arc)
                        .map(|i| (p, i as u32))
                })
                .unwrap();
            let alpha = m.angle(p, pos, 0).unwrap();
            let z = m.zeta(&alpha).unwrap();
            let id = MfMorphism::identity(&m, arc, 0);
            assert_eq!(z.parity, Parity::Even);
            assert_eq!(z.a, id.a);
            assert_eq!(z.d, id.d);
        }
    }
}
