//! Brute-force access simulator: runs a dataflow's canonical loop nest MAC by
//! MAC and counts register-file and DRAM touches.
//!
//! Each mapping splits the seven conv loops into outer loops (across PEs and
//! passes) and inner loops (one PE, one pass). A data type is kept in the RF
//! when the inner loops touch some datum of it more than once, judged on a
//! probe shape large enough to expose every reuse pattern. DRAM counts are
//! first touches of inputs and weights plus one write per output.

#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::HashSet;
use std::sync::OnceLock;

use dnncost::{DataflowKind, ResolvedLayer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    N,
    M,
    C,
    E,
    F,
    R,
    S,
}

use Dim::*;

fn mapping(kind: DataflowKind) -> (&'static [Dim], &'static [Dim]) {
    match kind {
        DataflowKind::Ws => (&[M, C, R, S], &[N, E, F]),
        DataflowKind::Os => (&[N, M, E, F], &[C, R, S]),
        DataflowKind::Nlr => (&[N, M, C, R, S, E, F], &[]),
        DataflowKind::Rs => (&[N, M, C, R, E], &[F, S]),
    }
}

#[derive(Debug, Clone, Copy)]
struct Shape {
    n: u64,
    c: u64,
    m: u64,
    h: u64,
    w: u64,
    r: u64,
    s: u64,
    u: u64,
    pad: u64,
    g: u64,
    e: u64,
    f: u64,
}

impl Shape {
    fn of(layer: &ResolvedLayer, batch: u64) -> Self {
        Self {
            n: batch,
            c: layer.in_channels,
            m: layer.out_channels,
            h: layer.in_h,
            w: layer.in_w,
            r: layer.kernel_h,
            s: layer.kernel_w,
            u: layer.stride,
            pad: layer.pad,
            g: layer.groups,
            e: layer.out_h,
            f: layer.out_w,
        }
    }

    fn extent(&self, d: Dim) -> u64 {
        match d {
            N => self.n,
            M => self.m,
            C => self.c / self.g,
            E => self.e,
            F => self.f,
            R => self.r,
            S => self.s,
        }
    }
}

type Key = [i64; 4];

/// Indices of one MAC: `[n, m, c_in_group, e, f, r, s]`.
struct Mac([u64; 7]);

impl Mac {
    fn get(&self, d: Dim) -> u64 {
        self.0[d as usize]
    }

    /// Input coordinate, `None` when it falls in the zero padding.
    fn input(&self, sh: &Shape) -> (Key, bool) {
        let group = self.get(M) / (sh.m / sh.g);
        let channel = group * (sh.c / sh.g) + self.get(C);
        let y = (self.get(E) * sh.u + self.get(R)) as i64 - sh.pad as i64;
        let x = (self.get(F) * sh.u + self.get(S)) as i64 - sh.pad as i64;
        let inside = y >= 0 && x >= 0 && y < sh.h as i64 && x < sh.w as i64;
        ([self.get(N) as i64, channel as i64, y, x], inside)
    }

    fn weight(&self) -> Key {
        [self.get(M), self.get(C), self.get(R), self.get(S)].map(|v| v as i64)
    }

    fn psum(&self) -> Key {
        [self.get(N), self.get(M), self.get(E), self.get(F)].map(|v| v as i64)
    }

    fn key(&self, d: usize, sh: &Shape) -> Key {
        match d {
            0 => self.input(sh).0,
            1 => self.weight(),
            _ => self.psum(),
        }
    }
}

/// Calls `body` for every index tuple of `dims`, first dim outermost.
fn nest(dims: &[Dim], sh: &Shape, idx: &mut [u64; 7], body: &mut dyn FnMut(&[u64; 7])) {
    match dims.split_first() {
        None => body(idx),
        Some((&d, rest)) => {
            for v in 0..sh.extent(d) {
                idx[d as usize] = v;
                nest(rest, sh, idx, body);
            }
        }
    }
}

/// Visits MACs pass by pass; `pass_start` fires before each inner-loop run.
fn run(kind: DataflowKind, sh: &Shape, pass_start: &mut dyn FnMut(), mac: &mut dyn FnMut(&Mac)) {
    let (outer, inner) = mapping(kind);
    let mut idx = [0u64; 7];
    nest(outer, sh, &mut idx, &mut |o| {
        pass_start();
        let mut i = *o;
        nest(inner, sh, &mut i, &mut |m| mac(&Mac(*m)));
    });
}

/// Which of input, weight, psum the mapping keeps in the RF.
pub fn resident(kind: DataflowKind) -> [bool; 3] {
    static CACHE: OnceLock<Vec<[bool; 3]>> = OnceLock::new();
    let all = CACHE.get_or_init(|| DataflowKind::ALL.iter().map(|k| probe_residency(*k)).collect());
    all[DataflowKind::ALL.iter().position(|k| *k == kind).unwrap()]
}

fn probe_residency(kind: DataflowKind) -> [bool; 3] {
    let probe = Shape {
        n: 3,
        c: 3,
        m: 3,
        h: 7,
        w: 7,
        r: 3,
        s: 3,
        u: 1,
        pad: 0,
        g: 1,
        e: 5,
        f: 5,
    };
    let mut reused = [false; 3];
    let seen: RefCell<[HashSet<Key>; 3]> = Default::default();
    run(
        kind,
        &probe,
        &mut || seen.borrow_mut().iter_mut().for_each(HashSet::clear),
        &mut |m| {
            for (d, r) in reused.iter_mut().enumerate() {
                if !seen.borrow_mut()[d].insert(m.key(d, &probe)) {
                    *r = true;
                }
            }
        },
    );
    reused
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimCounts {
    pub macs: u64,
    /// RF touches per type; a psum update is a read plus a write.
    pub rf: [u64; 3],
    /// RF fills per type: distinct data a PE loads per pass.
    pub fills: [u64; 3],
    pub dram: [u64; 3],
}

pub fn simulate(kind: DataflowKind, layer: &ResolvedLayer, batch: u64) -> SimCounts {
    let sh = Shape::of(layer, batch);
    let keep = resident(kind);
    let mut out = SimCounts::default();
    let local: RefCell<[HashSet<Key>; 3]> = Default::default();
    let mut fetched: [HashSet<Key>; 3] = Default::default();
    run(
        kind,
        &sh,
        &mut || local.borrow_mut().iter_mut().for_each(HashSet::clear),
        &mut |m| {
            out.macs += 1;
            let (input, inside) = m.input(&sh);
            let keys = [input, m.weight(), m.psum()];
            for d in 0..3 {
                if keep[d] {
                    out.rf[d] += if d == 2 { 2 } else { 1 };
                    if local.borrow_mut()[d].insert(keys[d]) {
                        out.fills[d] += 1;
                    }
                }
                if d != 0 || inside {
                    fetched[d].insert(keys[d]);
                }
            }
        },
    );
    out.dram = fetched.map(|f| f.len() as u64);
    out
}

/// Every conv with N, C, M, H, W <= 3, R, S <= 2, unit stride, pad 0 or 1
/// and every group count dividing both C and M.
pub fn sweep() -> Vec<(ResolvedLayer, u64)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for c in 1..=3 {
            for m in 1..=3 {
                for g in (1..=c).filter(|g| c % g == 0 && m % g == 0) {
                    for h in 1..=3 {
                        for w in 1..=3 {
                            for r in 1..=2 {
                                for s in 1..=2 {
                                    for pad in 0..=1 {
                                        if let Ok(l) = ResolvedLayer::conv("sweep", c, h, w, m, (r, s), 1, pad, g) {
                                            out.push((l, n));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
