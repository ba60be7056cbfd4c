//! Combinatorial profiles of the fourteen elementary square types.
//!
//! A profile records, in square-local sheet labels (descending z at the
//! upper-right corner), everything the rest of the library needs to know
//! about one square: the sheets above each side and corner, the induced
//! edge types, where each crossing arc is shifted when the singular set is
//! pushed into the 1-skeleton, and the cusp data driving Maslov potentials
//! and the 1-entries of the assembly matrices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Square-local sheet label. `S(i)` is the sheet in position `i` (1-based)
/// above the upper-right corner; `Tilde` is the single sheet to the left of
/// the cusp locus in a swallowtail square.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Label {
    S(u32),
    Tilde,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum Side {
    L,
    D,
    R,
    U,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::L, Side::D, Side::R, Side::U];

    pub fn idx(self) -> usize {
        match self {
            Side::L => 0,
            Side::D => 1,
            Side::R => 2,
            Side::U => 3,
        }
    }

    /// Image under reflection across x1 = x2.
    pub fn reflected(self) -> Side {
        match self {
            Side::L => Side::D,
            Side::D => Side::L,
            Side::R => Side::U,
            Side::U => Side::R,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::L => "L",
            Side::D => "D",
            Side::R => "R",
            Side::U => "U",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Corner {
    LL,
    LR,
    UL,
    UR,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::LL, Corner::LR, Corner::UL, Corner::UR];

    pub fn idx(self) -> usize {
        match self {
            Corner::LL => 0,
            Corner::LR => 1,
            Corner::UL => 2,
            Corner::UR => 3,
        }
    }

    pub fn reflected(self) -> Corner {
        match self {
            Corner::LL => Corner::LL,
            Corner::UR => Corner::UR,
            Corner::UL => Corner::LR,
            Corner::LR => Corner::UL,
        }
    }
}

/// Each side's tail and head corner under the (A1) orientations: vertical
/// sides run bottom to top, horizontal sides left to right.
pub fn side_ends(side: Side) -> (Corner, Corner) {
    match side {
        Side::L => (Corner::LL, Corner::UL),
        Side::D => (Corner::LL, Corner::LR),
        Side::R => (Corner::LR, Corner::UR),
        Side::U => (Corner::UL, Corner::UR),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum EdgeTag {
    #[serde(rename = "PV")]
    Pv,
    #[serde(rename = "OneCr")]
    OneCr,
    #[serde(rename = "TwoCr")]
    TwoCr,
    #[serde(rename = "Cu")]
    Cu,
}

/// Edge type in edge-local labels: `n` sheets above the head (terminal)
/// vertex, crossing or cusp sheets based at `k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeType {
    pub tag: EdgeTag,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
}

impl EdgeType {
    pub fn pv(n: u32) -> Self {
        EdgeType { tag: EdgeTag::Pv, n, k: None }
    }
    pub fn one_cr(n: u32, k: u32) -> Self {
        EdgeType { tag: EdgeTag::OneCr, n, k: Some(k) }
    }
    pub fn two_cr(n: u32, k: u32) -> Self {
        EdgeType { tag: EdgeTag::TwoCr, n, k: Some(k) }
    }
    pub fn cu(n: u32, k: u32) -> Self {
        EdgeType { tag: EdgeTag::Cu, n, k: Some(k) }
    }

    /// Sheet count above the tail (initial) vertex.
    pub fn tail_count(&self) -> u32 {
        match self.tag {
            EdgeTag::Cu => self.n - 2,
            _ => self.n,
        }
    }

    /// sigma_minus: edge-local position `p` (1-based) of a sheet at the
    /// head, to its position above the tail. `None` when the sheet does not
    /// reach the tail (cusping pair of a Cu edge).
    pub fn sigma_minus(&self, p: u32) -> Option<u32> {
        let k = self.k.unwrap_or(0);
        match self.tag {
            EdgeTag::Pv => Some(p),
            EdgeTag::OneCr => Some(if p == k {
                k + 1
            } else if p == k + 1 {
                k
            } else {
                p
            }),
            EdgeTag::TwoCr => Some(if p == k {
                k + 1
            } else if p == k + 1 {
                k + 2
            } else if p == k + 2 {
                k
            } else {
                p
            }),
            EdgeTag::Cu => {
                if p == k || p == k + 1 {
                    None
                } else if p > k + 1 {
                    Some(p - 2)
                } else {
                    Some(p)
                }
            }
        }
    }

    /// Pairs of edge-local head positions that cross above the open edge.
    pub fn crossing_pairs(&self) -> Vec<(u32, u32)> {
        let k = self.k.unwrap_or(0);
        match self.tag {
            EdgeTag::Pv | EdgeTag::Cu => vec![],
            EdgeTag::OneCr => vec![(k, k + 1)],
            EdgeTag::TwoCr => vec![(k, k + 2), (k + 1, k + 2)],
        }
    }

    /// The edge-local cusp pair, for Cu edges.
    pub fn cusp_pair(&self) -> Option<(u32, u32)> {
        match self.tag {
            EdgeTag::Cu => self.k.map(|k| (k, k + 1)),
            _ => None,
        }
    }

    /// Range check on the parameters; the sheet indices must merely stay
    /// inside 1..=n.
    pub fn well_formed(&self) -> bool {
        match self.tag {
            EdgeTag::Pv => self.k.is_none(),
            EdgeTag::OneCr | EdgeTag::Cu => {
                matches!(self.k, Some(k) if k >= 1 && k + 1 <= self.n)
            }
            EdgeTag::TwoCr => matches!(self.k, Some(k) if k >= 1 && k + 2 <= self.n),
        }
    }
}

/// Where a crossing arc lands once the singular set is shifted into the
/// 1-skeleton: a single closed side edge, or the lower-left vertex for a
/// Type (3) square.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArcTarget {
    OntoSide(Side),
    LowerLeftVertex,
}

/// One crossing arc of a square.
#[derive(Clone, Debug)]
pub struct Arc {
    /// The two sheets that cross (square labels, upper-at-UR first).
    pub pair: (Label, Label),
    pub target: ArcTarget,
    /// Sides the arc crosses before shifting, with the crossing pair in
    /// edge-local head positions. Used for gluing the crossing locus when
    /// checking (A4).
    pub crossings: Vec<(Side, (u32, u32))>,
    /// A swallowtail arc forces a constant 1 (not 0) into the B matrix slot
    /// of the edge it is shifted onto.
    pub swallowtail: bool,
}

/// A cusp line: `upper` and `lower` meet at a cusp with
/// mu(upper) = mu(lower) + 1.
#[derive(Clone, Copy, Debug)]
pub struct Cusp {
    pub upper: Label,
    pub lower: Label,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SwallowKind {
    None,
    /// Upward swallowtail among sheets k, k+1, k+2.
    Up { k: u32 },
    /// Downward swallowtail among sheets l-2, l-1, l.
    Down { l: u32 },
}

#[derive(Clone, Debug)]
pub struct SquareProfile {
    pub stype: u8,
    pub n: u32,
    pub reflected: bool,
    /// Sheets above each side, indexed by edge-local position (descending z
    /// at the side's head corner).
    pub side_order: [Vec<Label>; 4],
    pub corner_order: [Vec<Label>; 4],
    pub induced: [EdgeType; 4],
    pub arcs: Vec<Arc>,
    pub cusps: Vec<Cusp>,
    /// Sheet identifications internal to swallowtail squares.
    pub region_merges: Vec<(Label, Label)>,
    /// Square-label slots of A(v0) that receive a constant 1 (the cusping
    /// pairs of the square).
    pub cusp_one_slots: Vec<(u32, u32)>,
    pub swallow: SwallowKind,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MalformedSquare {
    #[error("square type {0} is not in 1..=14")]
    BadType(u8),
    #[error("type {stype} with n = {n}: parameter {what} out of range")]
    BadParam { stype: u8, n: u32, what: String },
    #[error("type {stype}: missing parameter {what}")]
    MissingParam { stype: u8, what: String },
    #[error("type {stype}: parameters k = {k} and l = {l} must involve disjoint sheet pairs")]
    OverlappingPairs { stype: u8, k: u32, l: u32 },
}

fn base(n: u32) -> Vec<Label> {
    (1..=n).map(Label::S).collect()
}

/// Base order with sheets a and a+1 exchanged.
fn swapped(n: u32, a: u32) -> Vec<Label> {
    let mut v = base(n);
    v.swap(a as usize - 1, a as usize);
    v
}

fn swapped2(n: u32, a: u32, b: u32) -> Vec<Label> {
    let mut v = swapped(n, a);
    v.swap(b as usize - 1, b as usize);
    v
}

/// Base order after sheet k+2 has crossed above both k+1 and k: positions
/// k, k+1, k+2 hold S(k+2), S(k), S(k+1).
fn cycled(n: u32, k: u32) -> Vec<Label> {
    let mut v = base(n);
    let k = k as usize - 1;
    v[k] = Label::S(k as u32 + 3);
    v[k + 1] = Label::S(k as u32 + 1);
    v[k + 2] = Label::S(k as u32 + 2);
    v
}

/// Fully reversed triple at k..k+2: S(k+2), S(k+1), S(k).
fn reversed3(n: u32, k: u32) -> Vec<Label> {
    let mut v = base(n);
    let k = k as usize - 1;
    v[k] = Label::S(k as u32 + 3);
    v[k + 2] = Label::S(k as u32 + 1);
    v
}

/// Order with the pair a, a+1 removed.
fn minus_pair(order: &[Label], a: u32) -> Vec<Label> {
    order
        .iter()
        .filter(|s| !matches!(s, Label::S(i) if *i == a || *i == a + 1))
        .copied()
        .collect()
}

fn pos_of(order: &[Label], want: Label) -> Option<u32> {
    order.iter().position(|s| *s == want).map(|p| p as u32 + 1)
}

impl SquareProfile {
    /// Edge-local head position of a square-local sheet above a side.
    pub fn side_pos(&self, side: Side, label: Label) -> Option<u32> {
        pos_of(&self.side_order[side.idx()], label)
    }

    pub fn corner_pos(&self, corner: Corner, label: Label) -> Option<u32> {
        pos_of(&self.corner_order[corner.idx()], label)
    }

    /// The side an arc-carrying edge lies on for swallowtail squares:
    /// D unreflected, L reflected.
    pub fn swallow_arc_side(&self) -> Option<Side> {
        match self.swallow {
            SwallowKind::None => None,
            _ => Some(if self.reflected { Side::L } else { Side::D }),
        }
    }
}

struct Builder {
    stype: u8,
    n: u32,
    side: [Vec<Label>; 4],
    corner: [Vec<Label>; 4],
    induced: [EdgeType; 4],
    arcs: Vec<Arc>,
    cusps: Vec<Cusp>,
    merges: Vec<(Label, Label)>,
    ones: Vec<(u32, u32)>,
    swallow: SwallowKind,
}

impl Builder {
    fn new(stype: u8, n: u32) -> Self {
        Builder {
            stype,
            n,
            side: [base(n), base(n), base(n), base(n)],
            corner: [base(n), base(n), base(n), base(n)],
            induced: [EdgeType::pv(n); 4],
            arcs: vec![],
            cusps: vec![],
            merges: vec![],
            ones: vec![],
            swallow: SwallowKind::None,
        }
    }

    fn side(&mut self, s: Side, ty: EdgeType, order: Vec<Label>) {
        debug_assert_eq!(ty.n as usize, order.len());
        self.induced[s.idx()] = ty;
        self.side[s.idx()] = order;
    }

    fn corner(&mut self, c: Corner, order: Vec<Label>) {
        self.corner[c.idx()] = order;
    }

    fn arc(&mut self, a: u32, b: u32, target: ArcTarget, crossings: Vec<(Side, (u32, u32))>) {
        self.arcs.push(Arc {
            pair: (Label::S(a), Label::S(b)),
            target,
            crossings,
            swallowtail: false,
        });
    }

    fn finish(self, reflected: bool) -> SquareProfile {
        let p = SquareProfile {
            stype: self.stype,
            n: self.n,
            reflected: false,
            side_order: self.side,
            corner_order: self.corner,
            induced: self.induced,
            arcs: self.arcs,
            cusps: self.cusps,
            region_merges: self.merges,
            cusp_one_slots: self.ones,
            swallow: self.swallow,
        };
        if reflected {
            reflect(p)
        } else {
            p
        }
    }
}

fn reflect(p: SquareProfile) -> SquareProfile {
    let pick_side = |s: Side| p.side_order[s.reflected().idx()].clone();
    let pick_ind = |s: Side| p.induced[s.reflected().idx()];
    let pick_corner = |c: Corner| p.corner_order[c.reflected().idx()].clone();
    SquareProfile {
        stype: p.stype,
        n: p.n,
        reflected: true,
        side_order: [
            pick_side(Side::L),
            pick_side(Side::D),
            pick_side(Side::R),
            pick_side(Side::U),
        ],
        corner_order: [
            pick_corner(Corner::LL),
            pick_corner(Corner::LR),
            pick_corner(Corner::UL),
            pick_corner(Corner::UR),
        ],
        induced: [
            pick_ind(Side::L),
            pick_ind(Side::D),
            pick_ind(Side::R),
            pick_ind(Side::U),
        ],
        arcs: p
            .arcs
            .into_iter()
            .map(|a| Arc {
                pair: a.pair,
                target: match a.target {
                    ArcTarget::OntoSide(s) => ArcTarget::OntoSide(s.reflected()),
                    ArcTarget::LowerLeftVertex => ArcTarget::LowerLeftVertex,
                },
                crossings: a
                    .crossings
                    .into_iter()
                    .map(|(s, pr)| (s.reflected(), pr))
                    .collect(),
                swallowtail: a.swallowtail,
            })
            .collect(),
        cusps: p.cusps,
        region_merges: p.region_merges,
        cusp_one_slots: p.cusp_one_slots,
        swallow: p.swallow,
    }
}

fn need_k(stype: u8, k: Option<u32>) -> Result<u32, MalformedSquare> {
    k.ok_or(MalformedSquare::MissingParam { stype, what: "k".into() })
}

fn need_l(stype: u8, l: Option<u32>) -> Result<u32, MalformedSquare> {
    l.ok_or(MalformedSquare::MissingParam { stype, what: "l".into() })
}

fn check(cond: bool, stype: u8, n: u32, what: &str) -> Result<(), MalformedSquare> {
    if cond {
        Ok(())
    } else {
        Err(MalformedSquare::BadParam { stype, n, what: what.into() })
    }
}

/// Build the profile of an elementary square.
pub fn square_profile(
    stype: u8,
    n: u32,
    k: Option<u32>,
    l: Option<u32>,
    reflected: bool,
) -> Result<SquareProfile, MalformedSquare> {
    let mut b = Builder::new(stype, n);
    match stype {
        1 => {
            check(n >= 1, 1, n, "n >= 1")?;
        }
        2 => {
            let k = need_k(2, k)?;
            check(k >= 1 && k + 1 <= n, 2, n, "1 <= k, k+1 <= n")?;
            b.side(Side::U, EdgeType::one_cr(n, k), base(n));
            b.side(Side::D, EdgeType::one_cr(n, k), base(n));
            b.side(Side::L, EdgeType::pv(n), swapped(n, k));
            b.corner(Corner::UL, swapped(n, k));
            b.corner(Corner::LL, swapped(n, k));
            b.arc(
                k,
                k + 1,
                ArcTarget::OntoSide(Side::L),
                vec![(Side::U, (k, k + 1)), (Side::D, (k, k + 1))],
            );
        }
        3 => {
            let k = need_k(3, k)?;
            check(k >= 1 && k + 1 <= n, 3, n, "1 <= k, k+1 <= n")?;
            b.side(Side::L, EdgeType::one_cr(n, k), base(n));
            b.side(Side::D, EdgeType::one_cr(n, k), base(n));
            b.corner(Corner::LL, swapped(n, k));
            b.arc(
                k,
                k + 1,
                ArcTarget::LowerLeftVertex,
                vec![(Side::L, (k, k + 1)), (Side::D, (k, k + 1))],
            );
        }
        4 => {
            let k = need_k(4, k)?;
            check(k >= 1 && k + 1 <= n, 4, n, "1 <= k, k+1 <= n")?;
            b.side(Side::R, EdgeType::one_cr(n, k), base(n));
            b.side(Side::D, EdgeType::one_cr(n, k), swapped(n, k));
            b.corner(Corner::LR, swapped(n, k));
            b.arc(
                k,
                k + 1,
                ArcTarget::OntoSide(Side::D),
                vec![(Side::R, (k, k + 1)), (Side::D, (k, k + 1))],
            );
        }
        5 => {
            let k = need_k(5, k)?;
            check(k >= 1 && k + 2 <= n, 5, n, "1 <= k, k+2 <= n")?;
            b.side(Side::L, EdgeType::two_cr(n, k), base(n));
            b.side(Side::R, EdgeType::two_cr(n, k), base(n));
            b.side(Side::D, EdgeType::pv(n), cycled(n, k));
            b.corner(Corner::LL, cycled(n, k));
            b.corner(Corner::LR, cycled(n, k));
            b.arc(
                k + 1,
                k + 2,
                ArcTarget::OntoSide(Side::D),
                vec![(Side::L, (k + 1, k + 2)), (Side::R, (k + 1, k + 2))],
            );
            b.arc(
                k,
                k + 2,
                ArcTarget::OntoSide(Side::D),
                vec![(Side::L, (k, k + 2)), (Side::R, (k, k + 2))],
            );
        }
        6 => {
            let k = need_k(6, k)?;
            check(k >= 1 && k + 2 <= n, 6, n, "1 <= k, k+2 <= n")?;
            b.side(Side::R, EdgeType::two_cr(n, k), base(n));
            b.side(Side::D, EdgeType::one_cr(n, k), cycled(n, k));
            b.side(Side::L, EdgeType::one_cr(n, k + 1), base(n));
            b.corner(Corner::LR, cycled(n, k));
            b.corner(Corner::LL, swapped(n, k + 1));
            b.arc(
                k + 1,
                k + 2,
                ArcTarget::OntoSide(Side::D),
                vec![(Side::R, (k + 1, k + 2)), (Side::L, (k + 1, k + 2))],
            );
            b.arc(
                k,
                k + 2,
                ArcTarget::OntoSide(Side::D),
                vec![(Side::R, (k, k + 2)), (Side::D, (k, k + 1))],
            );
        }
        7 => {
            let k = need_k(7, k)?;
            let l = need_l(7, l)?;
            check(k >= 1 && k + 1 <= n && l >= 1 && l + 1 <= n, 7, n, "pairs in range")?;
            if k.abs_diff(l) < 2 {
                return Err(MalformedSquare::OverlappingPairs { stype: 7, k, l });
            }
            b.side(Side::U, EdgeType::one_cr(n, k), base(n));
            b.side(Side::R, EdgeType::one_cr(n, l), base(n));
            b.side(Side::D, EdgeType::one_cr(n, k), swapped(n, l));
            b.side(Side::L, EdgeType::one_cr(n, l), swapped(n, k));
            b.corner(Corner::LR, swapped(n, l));
            b.corner(Corner::UL, swapped(n, k));
            b.corner(Corner::LL, swapped2(n, k, l));
            b.arc(
                k,
                k + 1,
                ArcTarget::OntoSide(Side::L),
                vec![(Side::U, (k, k + 1)), (Side::D, (k, k + 1))],
            );
            b.arc(
                l,
                l + 1,
                ArcTarget::OntoSide(Side::D),
                vec![(Side::R, (l, l + 1)), (Side::L, (l, l + 1))],
            );
        }
        8 => {
            let k = need_k(8, k)?;
            check(k >= 1 && k + 2 <= n, 8, n, "1 <= k, k+2 <= n")?;
            b.side(Side::U, EdgeType::one_cr(n, k), base(n));
            b.side(Side::R, EdgeType::two_cr(n, k), base(n));
            b.side(Side::D, EdgeType::one_cr(n, k + 1), cycled(n, k));
            b.side(Side::L, EdgeType::two_cr(n, k), swapped(n, k));
            b.corner(Corner::LR, cycled(n, k));
            b.corner(Corner::UL, swapped(n, k));
            b.corner(Corner::LL, reversed3(n, k));
            b.arc(
                k,
                k + 1,
                ArcTarget::OntoSide(Side::L),
                vec![(Side::U, (k, k + 1)), (Side::D, (k + 1, k + 2))],
            );
            b.arc(
                k + 1,
                k + 2,
                ArcTarget::OntoSide(Side::D),
                vec![(Side::R, (k + 1, k + 2)), (Side::L, (k, k + 2))],
            );
            b.arc(
                k,
                k + 2,
                ArcTarget::OntoSide(Side::D),
                vec![(Side::R, (k, k + 2)), (Side::L, (k + 1, k + 2))],
            );
        }
        9 => {
            let k = need_k(9, k)?;
            check(k >= 1 && k + 1 <= n, 9, n, "1 <= k, k+1 <= n")?;
            b.side(Side::U, EdgeType::cu(n, k), base(n));
            b.side(Side::D, EdgeType::cu(n, k), base(n));
            b.side(Side::L, EdgeType::pv(n - 2), minus_pair(&base(n), k));
            b.corner(Corner::UL, minus_pair(&base(n), k));
            b.corner(Corner::LL, minus_pair(&base(n), k));
            b.cusps.push(Cusp { upper: Label::S(k), lower: Label::S(k + 1) });
            b.ones.push((k, k + 1));
        }
        10 => {
            let k = need_k(10, k)?;
            let l = need_l(10, l)?;
            check(k >= 1 && k + 1 <= n && l >= 1 && l + 1 <= n, 10, n, "pairs in range")?;
            if k.abs_diff(l) < 2 {
                return Err(MalformedSquare::OverlappingPairs { stype: 10, k, l });
            }
            let lp = if l < k { l } else { l - 2 };
            b.side(Side::U, EdgeType::cu(n, k), base(n));
            b.side(Side::R, EdgeType::one_cr(n, l), base(n));
            b.side(Side::D, EdgeType::cu(n, k), swapped(n, l));
            b.side(Side::L, EdgeType::one_cr(n - 2, lp), minus_pair(&base(n), k));
            b.corner(Corner::LR, swapped(n, l));
            b.corner(Corner::UL, minus_pair(&base(n), k));
            b.corner(Corner::LL, minus_pair(&swapped(n, l), k));
            b.arc(
                l,
                l + 1,
                ArcTarget::OntoSide(Side::D),
                vec![(Side::R, (l, l + 1)), (Side::L, (lp, lp + 1))],
            );
            b.cusps.push(Cusp { upper: Label::S(k), lower: Label::S(k + 1) });
            b.ones.push((k, k + 1));
        }
        11 => {
            let k = need_k(11, k)?;
            let l = need_l(11, l)?;
            check(k >= 1 && k + 1 <= n && l >= 1 && l + 1 <= n, 11, n, "pairs in range")?;
            if k.abs_diff(l) < 2 {
                return Err(MalformedSquare::OverlappingPairs { stype: 11, k, l });
            }
            let kp = if k < l { k } else { k - 2 };
            let lp = if l < k { l } else { l - 2 };
            b.side(Side::U, EdgeType::cu(n, k), base(n));
            b.side(Side::R, EdgeType::cu(n, l), base(n));
            b.side(Side::D, EdgeType::cu(n - 2, kp), minus_pair(&base(n), l));
            b.side(Side::L, EdgeType::cu(n - 2, lp), minus_pair(&base(n), k));
            b.corner(Corner::LR, minus_pair(&base(n), l));
            b.corner(Corner::UL, minus_pair(&base(n), k));
            b.corner(Corner::LL, minus_pair(&minus_pair(&base(n), l), k));
            b.cusps.push(Cusp { upper: Label::S(k), lower: Label::S(k + 1) });
            b.cusps.push(Cusp { upper: Label::S(l), lower: Label::S(l + 1) });
            b.ones.push((k, k + 1));
            b.ones.push((l, l + 1));
        }
        12 => {
            let k = need_k(12, k)?;
            check(k >= 1 && k + 2 <= n, 12, n, "1 <= k, k+2 <= n")?;
            b.side(Side::U, EdgeType::cu(n, k), base(n));
            b.side(Side::R, EdgeType::two_cr(n, k), base(n));
            b.side(Side::D, EdgeType::cu(n, k + 1), cycled(n, k));
            b.side(Side::L, EdgeType::pv(n - 2), minus_pair(&base(n), k));
            b.corner(Corner::LR, cycled(n, k));
            b.corner(Corner::UL, minus_pair(&base(n), k));
            b.corner(Corner::LL, minus_pair(&base(n), k));
            b.arc(
                k,
                k + 2,
                ArcTarget::OntoSide(Side::D),
                vec![(Side::R, (k, k + 2))],
            );
            b.arc(
                k + 1,
                k + 2,
                ArcTarget::OntoSide(Side::D),
                vec![(Side::R, (k + 1, k + 2))],
            );
            b.cusps.push(Cusp { upper: Label::S(k), lower: Label::S(k + 1) });
            b.ones.push((k, k + 1));
        }
        13 => {
            let k = need_k(13, k)?;
            check(n >= 3 && k >= 1 && k + 2 <= n, 13, n, "1 <= k, k+2 <= n")?;
            let mut d_order = base(n);
            d_order[k as usize] = Label::S(k + 2);
            d_order[k as usize + 1] = Label::S(k + 1);
            let mut left = minus_pair(&base(n), k + 1);
            left[k as usize - 1] = Label::Tilde;
            b.side(Side::U, EdgeType::cu(n, k), base(n));
            b.side(Side::R, EdgeType::one_cr(n, k + 1), base(n));
            b.side(Side::D, EdgeType::cu(n, k), d_order.clone());
            b.side(Side::L, EdgeType::pv(n - 2), left.clone());
            b.corner(Corner::LR, d_order);
            b.corner(Corner::UL, left.clone());
            b.corner(Corner::LL, left);
            b.arcs.push(Arc {
                pair: (Label::S(k + 1), Label::S(k + 2)),
                target: ArcTarget::OntoSide(Side::D),
                crossings: vec![(Side::R, (k + 1, k + 2))],
                swallowtail: true,
            });
            b.cusps.push(Cusp { upper: Label::S(k), lower: Label::S(k + 1) });
            b.cusps.push(Cusp { upper: Label::S(k), lower: Label::S(k + 2) });
            b.merges.push((Label::Tilde, Label::S(k + 1)));
            b.merges.push((Label::Tilde, Label::S(k + 2)));
            b.ones.push((k, k + 2));
            b.swallow = SwallowKind::Up { k };
        }
        14 => {
            let l = need_l(14, l).or_else(|_| need_k(14, k))?;
            check(n >= 3 && l >= 3 && l <= n, 14, n, "3 <= l <= n")?;
            let mut d_order = base(n);
            d_order[l as usize - 3] = Label::S(l - 1);
            d_order[l as usize - 2] = Label::S(l - 2);
            let mut left = minus_pair(&base(n), l - 1);
            left[l as usize - 3] = Label::Tilde;
            b.side(Side::U, EdgeType::cu(n, l - 1), base(n));
            b.side(Side::R, EdgeType::one_cr(n, l - 2), base(n));
            b.side(Side::D, EdgeType::cu(n, l - 1), d_order.clone());
            b.side(Side::L, EdgeType::pv(n - 2), left.clone());
            b.corner(Corner::LR, d_order);
            b.corner(Corner::UL, left.clone());
            b.corner(Corner::LL, left);
            b.arcs.push(Arc {
                pair: (Label::S(l - 2), Label::S(l - 1)),
                target: ArcTarget::OntoSide(Side::D),
                crossings: vec![(Side::R, (l - 2, l - 1))],
                swallowtail: true,
            });
            b.cusps.push(Cusp { upper: Label::S(l - 1), lower: Label::S(l) });
            b.cusps.push(Cusp { upper: Label::S(l - 2), lower: Label::S(l) });
            b.merges.push((Label::Tilde, Label::S(l - 1)));
            b.merges.push((Label::Tilde, Label::S(l - 2)));
            b.ones.push((l - 2, l));
            b.swallow = SwallowKind::Down { l };
        }
        t => return Err(MalformedSquare::BadType(t)),
    }
    Ok(b.finish(reflected))
}

/// The sigma maps of a square, with cusping pairs at the half-integer
/// position k-0.5 encoded as doubled integers (2k-1); ordinary positions p
/// are encoded as 2p.
pub struct SigmaMaps {
    /// sigma_L(i): position of sheet S(i) above the upper-left corner.
    pub sigma_l: Vec<Option<u32>>,
    /// sigma_D(i): position of sheet S(i) above the lower-right corner.
    pub sigma_d: Vec<Option<u32>>,
    /// Induced edge types in side order L, D, R, U.
    pub sides: [EdgeType; 4],
}

pub fn sigma_maps(p: &SquareProfile) -> SigmaMaps {
    let half = |corner: Corner, i: u32| -> Option<u32> {
        // A sheet missing over the corner cusps somewhere between two
        // surviving positions; report the doubled half-integer slot.
        // Cusping sheets k,k+1 over U (resp. R) sit at k-0.5 in sigma_L
        // (resp. sigma_D).
        for c in &p.cusps {
            let (Label::S(u), Label::S(lo)) = (c.upper, c.lower) else { continue };
            if i == u || i == lo {
                // Position k-0.5 where k is the smaller index of the pair
                // as placed over the adjacent full side.
                let k = u.min(lo);
                let _ = corner;
                return Some(2 * k - 1);
            }
        }
        None
    };
    let lookup = |corner: Corner, i: u32| -> Option<u32> {
        match p.corner_pos(corner, Label::S(i)) {
            Some(pos) => Some(2 * pos),
            None => {
                if p.swallow != SwallowKind::None {
                    // Swallowtail sheets continuing as the tilde sheet take
                    // its position; the true cusping sheet gets the half slot.
                    if let Some(pos) = p.corner_pos(corner, Label::Tilde) {
                        return match p.swallow {
                            SwallowKind::Up { k } if i == k + 1 || i == k + 2 => Some(2 * pos),
                            SwallowKind::Down { l } if i == l - 1 || i == l - 2 => Some(2 * pos),
                            _ => half(corner, i),
                        };
                    }
                }
                half(corner, i)
            }
        }
    };
    SigmaMaps {
        sigma_l: (1..=p.n).map(|i| lookup(Corner::UL, i)).collect(),
        sigma_d: (1..=p.n).map(|i| lookup(Corner::LR, i)).collect(),
        sides: p.induced,
    }
}
