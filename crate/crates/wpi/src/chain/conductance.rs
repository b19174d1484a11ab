//! Weak conductance by subset enumeration, the Cheeger-type WPI it yields,
//! and indicator-based lower bounds on the minimal β.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rate::{Interp, MonotoneRate, Sieve, WpiCertificate, OSC_SQ_A_BOUND};

use super::kernel::{FiniteKernel, Observable, MASS_TOL};

/// Exhaustive enumeration visits `2^(n−1) − 1` complement classes; capped
/// here (≈ 5·10⁵ subsets at the cap).
pub const EXHAUSTIVE_STATE_CAP: usize = 20;

/// Hard ceiling for callers that explicitly opt into a larger scan.
const ABSOLUTE_STATE_CAP: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConductanceMode {
    /// Every proper subset, one representative per complement pair.
    Exhaustive,
    /// Random subsets only: yields an upper bound on κ, flagged as such.
    SampledSets { count: usize, seed: u64 },
}

/// How indicator functions enter a β*-lower scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorMode {
    /// No indicators, user candidates only.
    None,
    /// All subsets, allowing up to `max_states` states (capped at 28; the
    /// default exhaustive cap is [`EXHAUSTIVE_STATE_CAP`]).
    Exhaustive { max_states: usize },
}

/// One achieved cut: `u = μ⊗μ(A×A^∁)`, `ratio = μ⊗P(A×A^∁)/u`, and the
/// witness subset as a bit mask.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CutPoint {
    pub u_level: f64,
    pub ratio: f64,
    pub witness: u32,
}

/// The weak conductance `κ(u) = inf { ratio(A) : μ⊗μ(A×A^∁) > u }` as a
/// nondecreasing step function, with `κ(u) = ∞` for `u >= 1/4` and beyond
/// the largest achieved level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConductanceProfile {
    /// Distinct achieved levels, ascending.
    levels: Vec<f64>,
    /// `env[i] = κ(u)` for `u ∈ [levels[i], levels[i+1])`.
    env: Vec<f64>,
    witnesses: Vec<u32>,
    /// `κ(u)` below the smallest level (the global minimum ratio).
    head: f64,
    head_witness: u32,
    /// Sampled profiles only upper-bound the true infimum.
    pub one_sided: bool,
    pub n_states: usize,
}

impl ConductanceProfile {
    pub fn kappa(&self, u: f64) -> f64 {
        if u >= 0.25 {
            return f64::INFINITY;
        }
        if self.levels.is_empty() || u < self.levels[0] {
            return if self.levels.is_empty() { f64::INFINITY } else { self.head };
        }
        if u >= *self.levels.last().unwrap() {
            return f64::INFINITY;
        }
        let i = match self
            .levels
            .binary_search_by(|l| l.partial_cmp(&u).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        self.env[i]
    }

    /// Cheeger constant estimate `κ(0)`.
    pub fn kappa_zero(&self) -> f64 {
        self.head
    }

    pub fn max_level(&self) -> f64 {
        self.levels.last().copied().unwrap_or(0.0)
    }

    /// Witness set achieving `κ(u)`.
    pub fn witness(&self, u: f64) -> Option<u32> {
        if u >= 0.25 || self.levels.is_empty() || u >= *self.levels.last().unwrap() {
            return None;
        }
        if u < self.levels[0] {
            return Some(self.head_witness);
        }
        let i = match self
            .levels
            .binary_search_by(|l| l.partial_cmp(&u).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Some(self.witnesses[i])
    }

    pub fn breakpoints(&self) -> Vec<CutPoint> {
        let mut out = Vec::with_capacity(self.levels.len() + 1);
        out.push(CutPoint { u_level: 0.0, ratio: self.head, witness: self.head_witness });
        for i in 0..self.levels.len() {
            out.push(CutPoint {
                u_level: self.levels[i],
                ratio: self.env[i],
                witness: self.witnesses[i],
            });
        }
        out
    }

    /// The Cheeger-type rate `α(r) = 16/κ²(r/16)` as a step function.
    pub fn to_alpha_rate(&self) -> Result<MonotoneRate> {
        if self.head <= 0.0 {
            return Err(Error::ZeroConductance(format!(
                "minimum cut ratio {} (witness {:#b})",
                self.head, self.head_witness
            )));
        }
        let mut grid = Vec::with_capacity(self.levels.len() + 1);
        let mut values = Vec::with_capacity(self.levels.len() + 1);
        grid.push(16.0 * self.levels[0] * 1e-9);
        values.push(16.0 / (self.head * self.head));
        for i in 0..self.levels.len() {
            let r = 16.0 * self.levels[i];
            let alpha = if self.env[i].is_infinite() {
                0.0
            } else {
                16.0 / (self.env[i] * self.env[i])
            };
            grid.push(r);
            values.push(alpha);
        }
        Ok(MonotoneRate::tabulated(grid, values, Interp::Step))
    }

    /// Certificate form of [`Self::to_alpha_rate`] for the oscillation
    /// sieve.
    pub fn to_alpha_certificate(&self) -> Result<WpiCertificate> {
        WpiCertificate::alpha(Sieve::OscSq, self.to_alpha_rate()?, OSC_SQ_A_BOUND)
    }
}

/// Per-thread accumulator over enumerated cuts.
trait CutVisitor: Send {
    fn visit(&mut self, mask: u32, var: f64, flow: f64);
    fn merge(&mut self, other: Self);
}

/// Walks subsets in Gray-code order over states `1..n`, keeping state 0 out
/// of `A` so each complement pair is visited exactly once (the cut level
/// and ratio are complement-invariant for μ-invariant kernels). `inner`
/// and `mu_a` are maintained incrementally and rebuilt periodically to
/// keep floating-point drift below 1e-12.
fn enumerate_cuts<V: CutVisitor>(
    kernel: &FiniteKernel,
    parallelism: usize,
    make: impl Fn() -> V + Sync,
) -> V {
    const REBUILD: u64 = 1024;
    let n = kernel.n();
    let total: u64 = (1u64 << (n - 1)) - 1; // masks 1..=total over states 1..n
    let width = parallelism.clamp(1, 64);
    // blocks aligned to the rebuild period so every walker state is a
    // deterministic function of the absolute index, independent of width
    let chunk = {
        let raw = total / width as u64 + 1;
        raw.div_ceil(REBUILD) * REBUILD
    };

    let run_block = |lo: u64, hi: u64| -> V {
        let mut acc = make();
        if lo > hi {
            return acc;
        }
        let mut walker = Walker::init(kernel, gray(lo));
        acc.visit(walker.mask, walker.var(), walker.flow());
        for i in (lo + 1)..=hi {
            if i % REBUILD == 0 {
                walker = Walker::init(kernel, gray(i));
            } else {
                let bit = i.trailing_zeros() as usize + 1; // states 1..n
                walker.toggle(kernel, bit);
            }
            acc.visit(walker.mask, walker.var(), walker.flow());
        }
        acc
    };

    if width == 1 || chunk >= total {
        return run_block(1, total);
    }
    let mut blocks: Vec<V> = Vec::with_capacity(width);
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(width);
        for w in 0..width {
            let lo = (w as u64 * chunk).max(1);
            let hi = ((w as u64 + 1) * chunk - 1).min(total);
            let run = &run_block;
            handles.push(scope.spawn(move || run(lo, hi)));
        }
        for h in handles {
            blocks.push(h.join().expect("enumeration worker panicked"));
        }
    });
    // merge in block order: visitor merges are order-insensitive anyway
    let mut iter = blocks.into_iter();
    let mut acc = iter.next().unwrap();
    for b in iter {
        acc.merge(b);
    }
    acc
}

#[inline]
fn gray(i: u64) -> u32 {
    (i ^ (i >> 1)) as u32
}

struct Walker {
    /// Bit k set means state k+1 is in A (state 0 never is).
    mask: u32,
    mu_a: f64,
    /// `Σ_{x,y ∈ A} μ(x)P(x,y)`.
    inner: f64,
    members: Vec<usize>,
}

impl Walker {
    fn init(kernel: &FiniteKernel, mask: u32) -> Self {
        let members: Vec<usize> = (0..kernel.n() - 1)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| k + 1)
            .collect();
        let mut mu_a = 0.0;
        let mut inner = 0.0;
        for &x in &members {
            mu_a += kernel.mu()[x];
            for &y in &members {
                inner += kernel.mu()[x] * kernel.at(x, y);
            }
        }
        Walker { mask, mu_a, inner, members }
    }

    fn toggle(&mut self, kernel: &FiniteKernel, state: usize) {
        let bit = 1u32 << (state - 1);
        if self.mask & bit == 0 {
            // entering
            let mut delta = kernel.mu()[state] * kernel.at(state, state);
            for &y in &self.members {
                delta += kernel.mu()[state] * kernel.at(state, y)
                    + kernel.mu()[y] * kernel.at(y, state);
            }
            self.inner += delta;
            self.mu_a += kernel.mu()[state];
            self.mask |= bit;
            self.members.push(state);
        } else {
            self.mask &= !bit;
            self.members.retain(|&s| s != state);
            let mut delta = kernel.mu()[state] * kernel.at(state, state);
            for &y in &self.members {
                delta += kernel.mu()[state] * kernel.at(state, y)
                    + kernel.mu()[y] * kernel.at(y, state);
            }
            self.inner -= delta;
            self.mu_a -= kernel.mu()[state];
        }
    }

    #[inline]
    fn var(&self) -> f64 {
        self.mu_a * (1.0 - self.mu_a)
    }

    #[inline]
    fn flow(&self) -> f64 {
        (self.mu_a - self.inner).max(0.0)
    }
}

struct ProfileCollector {
    points: Vec<(f64, f64, u32)>,
}

impl CutVisitor for ProfileCollector {
    fn visit(&mut self, mask: u32, var: f64, flow: f64) {
        if var > MASS_TOL {
            self.points.push((var, flow / var, mask));
        }
    }
    fn merge(&mut self, other: Self) {
        self.points.extend(other.points);
    }
}

fn profile_from_points(
    mut points: Vec<(f64, f64, u32)>,
    one_sided: bool,
    n_states: usize,
) -> ConductanceProfile {
    points.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
            .then(a.2.cmp(&b.2))
    });
    // suffix minima of the ratio, tie-broken toward the smaller mask
    let m = points.len();
    let mut env = vec![(f64::INFINITY, 0u32); m];
    let mut best = (f64::INFINITY, 0u32);
    for i in (0..m).rev() {
        let cand = (points[i].1, points[i].2);
        if cand.0 < best.0 || (cand.0 == best.0 && cand.1 < best.1) {
            best = cand;
        }
        env[i] = best;
    }
    let head = env[0];
    // κ on [levels[i], next) is the suffix min strictly above level i;
    // compress equal levels and equal envelope values
    let mut levels = Vec::new();
    let mut env_out = Vec::new();
    let mut wit_out = Vec::new();
    let mut i = 0usize;
    while i < m {
        let level = points[i].0;
        let mut j = i;
        while j < m && points[j].0 <= level {
            j += 1;
        }
        let value = if j < m { env[j] } else { (f64::INFINITY, 0u32) };
        if env_out.last() != Some(&value.0) || levels.is_empty() {
            levels.push(level);
            env_out.push(value.0);
            wit_out.push(value.1);
        } else {
            // same envelope value: extend the previous segment
        }
        i = j;
    }
    // always keep the top level so max_level() is the true maximum
    let max_level = points.last().map(|p| p.0).unwrap_or(0.0);
    if levels.last().copied() != Some(max_level) {
        levels.push(max_level);
        env_out.push(f64::INFINITY);
        wit_out.push(0);
    }
    ConductanceProfile {
        levels,
        env: env_out,
        witnesses: wit_out,
        head: head.0,
        head_witness: head.1,
        one_sided,
        n_states,
    }
}

/// Weak conductance profile of a kernel, by exhaustive Gray-code
/// enumeration (a true infimum) or by sampled subsets (an upper bound,
/// flagged `one_sided`).
pub fn weak_conductance(
    kernel: &FiniteKernel,
    mode: ConductanceMode,
    parallelism: usize,
) -> Result<ConductanceProfile> {
    let n = kernel.n();
    if n < 2 {
        return Err(Error::InvalidKernel("need at least two states".into()));
    }
    match mode {
        ConductanceMode::Exhaustive => {
            if n > EXHAUSTIVE_STATE_CAP {
                return Err(Error::TooLarge { max: EXHAUSTIVE_STATE_CAP, got: n });
            }
            let collected = enumerate_cuts(kernel, parallelism, || ProfileCollector {
                points: Vec::new(),
            });
            Ok(profile_from_points(collected.points, false, n))
        }
        ConductanceMode::SampledSets { count, seed } => {
            use rand::{Rng, SeedableRng};
            if n > 32 {
                return Err(Error::TooLarge { max: 32, got: n });
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
            let mut points = Vec::with_capacity(count);
            for _ in 0..count {
                let mask = rng.random_range(1..full);
                let members: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
                let ind = kernel.indicator(&members);
                let var = ind.variance;
                if var > MASS_TOL {
                    let flow = kernel.dirichlet_form(&ind.values);
                    points.push((var, flow / var, mask));
                }
            }
            Ok(profile_from_points(points, true, n))
        }
    }
}

/// Cheeger-type WPI `α(r) = 16/κ²(r/16)` from the exhaustive profile.
pub fn cheeger_wpi(kernel: &FiniteKernel, parallelism: usize) -> Result<WpiCertificate> {
    let profile = weak_conductance(kernel, ConductanceMode::Exhaustive, parallelism)?;
    profile.to_alpha_certificate()
}

/// Converse check rows: `1/α(r) <= 2κ(2r)` pointwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheegerConverseReport {
    pub rows: Vec<(f64, f64, f64)>,
    pub ok: bool,
}

pub fn cheeger_converse(
    cert: &WpiCertificate,
    profile: &ConductanceProfile,
    r_grid: &[f64],
) -> CheegerConverseReport {
    let mut rows = Vec::with_capacity(r_grid.len());
    let mut ok = true;
    for &r in r_grid {
        let alpha = cert.eval_alpha(r);
        let lhs = if alpha > 0.0 { 1.0 / alpha } else { f64::INFINITY };
        let rhs = 2.0 * profile.kappa(2.0 * r);
        if !(lhs <= rhs * (1.0 + 1e-12) || rhs.is_infinite()) {
            ok = false;
        }
        rows.push((r, lhs, rhs));
    }
    CheegerConverseReport { rows, ok }
}

struct GridMaximizer {
    s_grid: Vec<f64>,
    /// per-grid-point max of `var − s·flow` with the achieving mask
    best: Vec<(f64, u32)>,
}

impl GridMaximizer {
    fn new(s_grid: &[f64]) -> Self {
        GridMaximizer {
            s_grid: s_grid.to_vec(),
            best: vec![(0.0, 0); s_grid.len()],
        }
    }
    fn feed(&mut self, mask: u32, var: f64, flow: f64) {
        for (j, s) in self.s_grid.iter().enumerate() {
            let cand = var - s * flow;
            let cur = &mut self.best[j];
            if cand > cur.0 || (cand == cur.0 && mask < cur.1) {
                *cur = (cand, mask);
            }
        }
    }
}

impl CutVisitor for GridMaximizer {
    fn visit(&mut self, mask: u32, var: f64, flow: f64) {
        self.feed(mask, var, flow);
    }
    fn merge(&mut self, other: Self) {
        for (cur, new) in self.best.iter_mut().zip(other.best) {
            if new.0 > cur.0 || (new.0 == cur.0 && new.1 < cur.1) {
                *cur = new;
            }
        }
    }
}

/// Diagnostics attached to a β*-lower scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetaStarReport {
    /// Witness mask per s-grid point (0 when the positive part is zero).
    pub witnesses: Vec<u32>,
    /// ψ-function sandwich rows `(r, 1/(2ψ(2r)), α̂(r), 1/ψ(r))` over the
    /// same family, when an r-grid was supplied.
    pub psi_sandwich: Option<Vec<(f64, f64, f64, f64)>>,
    pub psi_sandwich_ok: bool,
}

/// Certified lower bound on the minimal β at the supplied grid:
/// `β̂*(s) = max over the family of (‖ḡ‖² − s·E(P,g))₊` with every
/// candidate normalized to unit oscillation. The indicator family is
/// enumerated exhaustively when requested.
pub fn beta_star_lower(
    kernel: &FiniteKernel,
    candidates: &[Observable],
    s_grid: &[f64],
    indicators: IndicatorMode,
    r_grid: Option<&[f64]>,
    parallelism: usize,
) -> Result<(MonotoneRate, BetaStarReport)> {
    assert!(s_grid.windows(2).all(|w| w[0] < w[1]), "s_grid must increase");
    let mut cuts: Vec<(f64, f64, u32)> = Vec::new(); // (var, flow, mask) for candidates
    for f in candidates {
        if f.osc <= 0.0 {
            continue;
        }
        let scale = f.osc * f.osc;
        let centered = f.centered();
        cuts.push((f.variance / scale, kernel.dirichlet_form(&centered) / scale, u32::MAX));
    }

    let mut acc = GridMaximizer::new(s_grid);
    let mut family_points: Vec<(f64, f64, u32)> = Vec::new(); // (var, ratio, mask) for ψ
    for &(var, flow, mask) in &cuts {
        acc.feed(mask, var, flow);
        if var > MASS_TOL {
            family_points.push((var, flow / var, mask));
        }
    }
    let mut alpha_hat: Option<Vec<f64>> = None;

    if let IndicatorMode::Exhaustive { max_states } = indicators {
        let cap = max_states.min(ABSOLUTE_STATE_CAP);
        if kernel.n() > cap {
            return Err(Error::TooLarge { max: cap, got: kernel.n() });
        }
        struct Fused {
            beta: GridMaximizer,
            alpha: Option<GridMaximizer>,
            profile: Option<ProfileCollector>,
        }
        impl CutVisitor for Fused {
            fn visit(&mut self, mask: u32, var: f64, flow: f64) {
                self.beta.feed(mask, var, flow);
                if let Some(a) = &mut self.alpha {
                    // α̂(r) = max (var − r)/flow over cuts with flow > 0
                    if flow > 0.0 {
                        for (j, r) in a.s_grid.iter().enumerate() {
                            let cand = (var - r) / flow;
                            let cur = &mut a.best[j];
                            if cand > cur.0 {
                                *cur = (cand, mask);
                            }
                        }
                    }
                }
                if let Some(p) = &mut self.profile {
                    p.visit(mask, var, flow);
                }
            }
            fn merge(&mut self, other: Self) {
                self.beta.merge(other.beta);
                if let (Some(a), Some(b)) = (&mut self.alpha, other.alpha) {
                    a.merge(b);
                }
                if let (Some(p), Some(q)) = (&mut self.profile, other.profile) {
                    p.merge(q);
                }
            }
        }
        let want_psi = r_grid.is_some();
        let fused = enumerate_cuts(kernel, parallelism, || Fused {
            beta: GridMaximizer::new(s_grid),
            alpha: r_grid.map(GridMaximizer::new),
            profile: if want_psi {
                Some(ProfileCollector { points: Vec::new() })
            } else {
                None
            },
        });
        acc.merge(fused.beta);
        if let Some(a) = fused.alpha {
            alpha_hat = Some(a.best.iter().map(|(v, _)| v.max(0.0)).collect());
        }
        if let Some(p) = fused.profile {
            family_points.extend(p.points);
        }
    } else if let Some(rg) = r_grid {
        // candidates only
        let mut vals = vec![0.0f64; rg.len()];
        for &(var, flow, _) in &cuts {
            for (j, r) in rg.iter().enumerate() {
                if flow > 0.0 {
                    vals[j] = vals[j].max((var - r) / flow);
                }
            }
        }
        alpha_hat = Some(vals);
    }

    let values: Vec<f64> = acc.best.iter().map(|(v, _)| v.max(0.0)).collect();
    let witnesses: Vec<u32> = acc
        .best
        .iter()
        .zip(&values)
        .map(|((_, w), v)| if *v > 0.0 { *w } else { 0 })
        .collect();

    // The pointwise max of nonincreasing affine positive parts is
    // nonincreasing in s; clamp roundoff.
    let mut v = values;
    for i in 1..v.len() {
        if v[i] > v[i - 1] {
            v[i] = v[i - 1];
        }
    }
    let rate = MonotoneRate::tabulated(s_grid.to_vec(), v, Interp::Step);

    let (psi_sandwich, psi_sandwich_ok) = match (r_grid, &alpha_hat) {
        (Some(rg), Some(ah)) => {
            let prof = profile_from_points(family_points, true, kernel.n());
            let mut rows = Vec::with_capacity(rg.len());
            let mut ok = true;
            for (j, &r) in rg.iter().enumerate() {
                // ψ̂(t) over the family is exactly the κ̂ envelope
                let psi_2r = prof.kappa(2.0 * r);
                let psi_r = prof.kappa(r);
                let lower = if psi_2r.is_infinite() { 0.0 } else { 0.5 / psi_2r };
                let upper = if psi_r > 0.0 { 1.0 / psi_r } else { f64::INFINITY };
                let a = ah[j];
                if !(lower <= a * (1.0 + 1e-9) + 1e-15 && a <= upper * (1.0 + 1e-9)) {
                    ok = false;
                }
                rows.push((r, lower, a, upper));
            }
            (Some(rows), ok)
        }
        _ => (None, true),
    };
    Ok((rate, BetaStarReport { witnesses, psi_sandwich, psi_sandwich_ok }))
}

/// Exhaustive-indicator lower envelope of the minimal α at the grid
/// points: `α̂(r) = max_A (var(1_A) − r)/E(P,1_A) ∨ 0`.
pub fn alpha_star_lower(
    kernel: &FiniteKernel,
    r_grid: &[f64],
    parallelism: usize,
) -> Result<Vec<f64>> {
    if kernel.n() > EXHAUSTIVE_STATE_CAP {
        return Err(Error::TooLarge { max: EXHAUSTIVE_STATE_CAP, got: kernel.n() });
    }
    struct AlphaMax {
        grid: Vec<f64>,
        best: Vec<f64>,
    }
    impl CutVisitor for AlphaMax {
        fn visit(&mut self, _mask: u32, var: f64, flow: f64) {
            if flow <= 0.0 {
                return;
            }
            for (j, r) in self.grid.iter().enumerate() {
                let cand = (var - r) / flow;
                if cand > self.best[j] {
                    self.best[j] = cand;
                }
            }
        }
        fn merge(&mut self, other: Self) {
            for (a, b) in self.best.iter_mut().zip(other.best) {
                *a = a.max(b);
            }
        }
    }
    let acc = enumerate_cuts(kernel, parallelism, || AlphaMax {
        grid: r_grid.to_vec(),
        best: vec![0.0; r_grid.len()],
    });
    Ok(acc.best.iter().map(|v| v.max(0.0)).collect())
}

/// Closed-form sticky-set floor value
/// `c·(α/(1+α))^α·s^(−α)·[1/(1+α) − C·(α/(1+α))^α·s^(−α)]`
/// (clamped at zero), valid when `c·ε^α <= μ(A_ε) <= C·ε^α`.
pub fn sticky_floor_value(s: f64, alpha: f64, c_lo: f64, c_hi: f64) -> f64 {
    let k = (alpha / (1.0 + alpha)).powf(alpha);
    let y = k * s.powf(-alpha);
    (c_lo * y * (1.0 / (1.0 + alpha) - c_hi * y)).max(0.0)
}

/// Polynomial no-faster-than floor from sticky-set mass estimates.
///
/// Verifies the sandwich `c·ε^α <= μ(A_ε) <= C·ε^α` on the sampled ε and
/// returns the monotone (right-supremum) envelope of the closed-form
/// floor, tabulated with right endpoints so the result never exceeds the
/// true lower bound.
pub fn sticky_polynomial_floor(
    mu_a_eps: &dyn Fn(f64) -> f64,
    alpha: f64,
    c_lo: f64,
    c_hi: f64,
    eps_samples: &[f64],
) -> Result<MonotoneRate> {
    if !(alpha > 0.0 && c_lo > 0.0 && c_hi >= c_lo) {
        return Err(Error::DomainError("need 0 < c <= C and alpha > 0".into()));
    }
    for &eps in eps_samples {
        let m = mu_a_eps(eps);
        let lo = c_lo * eps.powf(alpha);
        let hi = c_hi * eps.powf(alpha);
        if !(m >= lo - 1e-12 && m <= hi + 1e-12) {
            return Err(Error::BracketViolation(format!(
                "mu(A_eps) = {m:.6e} outside [{lo:.6e}, {hi:.6e}] at eps = {eps:.6e}"
            )));
        }
    }
    let grid = crate::num::log_grid(1e-4, 1e8, 2048);
    let raw: Vec<f64> = grid
        .iter()
        .map(|&s| sticky_floor_value(s, alpha, c_lo, c_hi))
        .collect();
    // right-supremum envelope, then shift to right endpoints so the step
    // tabulation underestimates everywhere
    let mut env = raw;
    for i in (0..env.len() - 1).rev() {
        env[i] = env[i].max(env[i + 1]);
    }
    let mut values = Vec::with_capacity(env.len());
    for i in 0..env.len() {
        values.push(if i + 1 < env.len() { env[i + 1] } else { env[i] });
    }
    Ok(MonotoneRate::tabulated(grid, values, Interp::Step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn independent_kernel_has_unit_conductance() {
        let k = FiniteKernel::independent(vec![0.3, 0.3, 0.4]).unwrap();
        let prof = weak_conductance(&k, ConductanceMode::Exhaustive, 1).unwrap();
        for &u in &[0.0, 0.05, 0.2] {
            let kp = prof.kappa(u);
            if kp.is_finite() {
                assert!((kp - 1.0).abs() < 1e-12);
            }
        }
        assert!((prof.kappa_zero() - 1.0).abs() < 1e-12);
        assert_eq!(prof.kappa(0.25), f64::INFINITY);
        assert_eq!(prof.kappa(0.3), f64::INFINITY);
    }

    #[test]
    fn two_state_single_cut() {
        let k = FiniteKernel::two_state(0.3, 0.3).unwrap();
        let prof = weak_conductance(&k, ConductanceMode::Exhaustive, 1).unwrap();
        // only A = {0}: ratio = 0.15/0.25 = 0.6 at level 0.25
        assert!((prof.kappa_zero() - 0.6).abs() < 1e-12);
        assert!((prof.kappa(0.2) - 0.6).abs() < 1e-12);
        assert_eq!(prof.kappa(0.25), f64::INFINITY);
        assert!((prof.max_level() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn enumeration_matches_direct_scan() {
        // every subset's (var, flow) against a direct indicator computation
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        let k = FiniteKernel::random_reversible(7, &mut rng);
        let prof = weak_conductance(&k, ConductanceMode::Exhaustive, 3).unwrap();
        // brute-force κ over all proper subsets at a few levels
        for &u in &[0.01, 0.05, 0.1, 0.16] {
            let mut inf = f64::INFINITY;
            for mask in 1u32..(1 << 7) - 1 {
                let members: Vec<usize> = (0..7).filter(|i| mask >> i & 1 == 1).collect();
                let ind = k.indicator(&members);
                if ind.variance > u {
                    inf = inf.min(k.dirichlet_form(&ind.values) / ind.variance);
                }
            }
            let got = prof.kappa(u);
            if inf.is_finite() {
                assert!((got - inf).abs() < 1e-10, "u={u}: {got} vs {inf}");
            } else {
                assert!(got.is_infinite());
            }
        }
    }

    #[test]
    fn parallel_enumeration_is_deterministic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let k = FiniteKernel::random_reversible(9, &mut rng);
        let p1 = weak_conductance(&k, ConductanceMode::Exhaustive, 1).unwrap();
        let p4 = weak_conductance(&k, ConductanceMode::Exhaustive, 4).unwrap();
        let p7 = weak_conductance(&k, ConductanceMode::Exhaustive, 7).unwrap();
        for &u in &[0.0, 0.01, 0.07, 0.13, 0.21] {
            assert_eq!(p1.kappa(u).to_bits(), p4.kappa(u).to_bits());
            assert_eq!(p1.kappa(u).to_bits(), p7.kappa(u).to_bits());
            assert_eq!(p1.witness(u), p4.witness(u));
            assert_eq!(p1.witness(u), p7.witness(u));
        }
    }

    #[test]
    fn sampled_mode_upper_bounds_exhaustive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let k = FiniteKernel::random_reversible(10, &mut rng);
        let full = weak_conductance(&k, ConductanceMode::Exhaustive, 2).unwrap();
        let sampled =
            weak_conductance(&k, ConductanceMode::SampledSets { count: 200, seed: 4 }, 1).unwrap();
        assert!(sampled.one_sided);
        for &u in &[0.0, 0.03, 0.1] {
            assert!(sampled.kappa(u) >= full.kappa(u) - 1e-12);
        }
    }

    #[test]
    fn exhaustive_cap_is_enforced() {
        let k = FiniteKernel::independent(vec![1.0 / 21.0; 21]).unwrap();
        assert!(matches!(
            weak_conductance(&k, ConductanceMode::Exhaustive, 1),
            Err(Error::TooLarge { max: 20, got: 21 })
        ));
    }

    #[test]
    fn cheeger_alpha_constant_for_constant_kappa() {
        let k = FiniteKernel::independent(vec![0.2, 0.5, 0.3]).unwrap();
        let cert = cheeger_wpi(&k, 1).unwrap();
        // κ ≡ 1 below the top level: α = 16 there
        assert!((cert.eval_alpha(1e-6) - 16.0).abs() < 1e-9);
    }

    #[test]
    fn zero_conductance_is_reported() {
        let rows = vec![
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.0, 0.0, 0.5, 0.5],
            vec![0.0, 0.0, 0.5, 0.5],
        ];
        let k = FiniteKernel::with_stationary(rows, vec![0.25; 4]).unwrap();
        assert!(matches!(cheeger_wpi(&k, 1), Err(Error::ZeroConductance(_))));
    }

    #[test]
    fn beta_star_lower_vanishes_for_large_s_and_is_monotone() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let k = FiniteKernel::random_reversible(6, &mut rng);
        let s_grid = crate::num::log_grid(0.1, 1e6, 40);
        let (rate, report) = beta_star_lower(
            &k,
            &[],
            &s_grid,
            IndicatorMode::Exhaustive { max_states: 20 },
            None,
            2,
        )
        .unwrap();
        let vals: Vec<f64> = s_grid.iter().map(|s| rate.eval(*s)).collect();
        assert!(crate::num::is_nonincreasing(&vals, 0.0));
        assert_eq!(*vals.last().unwrap(), 0.0, "positive part must die off");
        assert!(vals[0] > 0.0);
        assert_eq!(report.witnesses.len(), s_grid.len());
        // indicators hit zero for s >= 1/Gap
        let gap = k.right_spectral_gap().unwrap();
        for (s, v) in s_grid.iter().zip(&vals) {
            if *s >= 1.0 / gap {
                assert_eq!(*v, 0.0, "s={s} beyond inverse gap {}", 1.0 / gap);
            }
        }
    }

    #[test]
    fn psi_sandwich_holds_on_indicator_family() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        for _ in 0..5 {
            let k = FiniteKernel::random_reversible(5, &mut rng);
            let s_grid = crate::num::log_grid(0.1, 100.0, 16);
            let r_grid = crate::num::lin_grid(0.002, 0.3, 30);
            let (_, report) = beta_star_lower(
                &k,
                &[],
                &s_grid,
                IndicatorMode::Exhaustive { max_states: 20 },
                Some(&r_grid),
                1,
            )
            .unwrap();
            assert!(report.psi_sandwich_ok, "{:?}", report.psi_sandwich);
        }
    }

    #[test]
    fn sticky_floor_alpha_one_closed_form() {
        // c = C, α = 1: floor = (c/2)s⁻¹[1/2 − (C/2)s⁻¹]
        let (c, s) = (0.8, 7.0);
        let want = (c / 2.0) / s * (0.5 - (c / 2.0) / s);
        assert!((sticky_floor_value(s, 1.0, c, c) - want).abs() < 1e-14);
    }

    #[test]
    fn sticky_floor_decays_at_the_nominal_rate() {
        let alpha = 1.4;
        let floor = sticky_polynomial_floor(
            &|eps| 0.5 * eps.powf(alpha),
            alpha,
            0.4,
            0.6,
            &[1e-3, 1e-2, 0.1],
        )
        .unwrap();
        let ss = crate::num::log_grid(1e3, 1e6, 20);
        let vals: Vec<f64> = ss.iter().map(|s| floor.eval(*s)).collect();
        let slope = crate::num::loglog_slope(&ss, &vals);
        assert!((slope + alpha).abs() < 0.02, "slope {slope}");
    }

    #[test]
    fn sticky_floor_bracket_violation() {
        let r = sticky_polynomial_floor(&|eps| eps * eps, 1.0, 0.9, 1.1, &[0.01, 0.1]);
        assert!(matches!(r, Err(Error::BracketViolation(_))));
    }

    #[test]
    fn sticky_floor_below_exhaustive_beta_star() {
        // engineered chain with mu(A_eps) ≈ eps: symmetric rank-one
        // off-diagonal part with row sums r_i = i/n under uniform mu
        let n = 8usize;
        let r: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        let total: f64 = r.iter().sum();
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    rows[i][j] = r[i] * r[j] / total;
                }
            }
            rows[i][i] = 1.0 - r[i] + r[i] * r[i] / total;
        }
        let k = FiniteKernel::with_stationary(rows, vec![1.0 / n as f64; n]).unwrap();
        assert!(k.is_reversible());
        // exit probability of state i is r_i(1 − r_i/total) ≈ r_i
        let mu_a_eps = |eps: f64| -> f64 {
            (0..n)
                .filter(|&i| 1.0 - k.at(i, i) <= eps)
                .map(|_| 1.0 / n as f64)
                .sum()
        };
        let floor =
            sticky_polynomial_floor(&mu_a_eps, 1.0, 0.4, 1.6, &[0.15, 0.3, 0.5, 0.8]).unwrap();
        // compare only where the floor's implicit sticky level
        // eps(s) ≈ 1/(2s) falls inside the bracketed window
        let s_grid = crate::num::log_grid(0.7, 3.5, 24);
        let (beta_hat, _) = beta_star_lower(
            &k,
            &[],
            &s_grid,
            IndicatorMode::Exhaustive { max_states: 20 },
            None,
            1,
        )
        .unwrap();
        for &s in &s_grid {
            assert!(
                floor.eval(s) <= beta_hat.eval(s) + 1e-9,
                "floor exceeds indicator bound at s={s}"
            );
        }
    }
}
