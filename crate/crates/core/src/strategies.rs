//! Query strategies behind a common interface.
//!
//! | id       | selection                                                        |
//! |----------|------------------------------------------------------------------|
//! | `random` | uniform without replacement                                      |
//! | `fps`    | farthest-point sampling, min-distances seeded by labeled samples |
//! | `osal`   | k-means++ clusters (k by silhouette), FPS within each cluster    |
//! | `mcfps`  | FPS seeds → kNN neighborhoods → most MC-dropout-uncertain member |

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dataset::{EmbeddingPool, PoolPartition};
use crate::error::{Error, Result};
use crate::geometry::{self, FarthestPointSampler, KMeansOptions, Points};
use crate::rng::{self, tag, Rng};
use crate::Mlp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    Random,
    Fps,
    Osal,
    Mcfps,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [Self::Random, Self::Fps, Self::Osal, Self::Mcfps];

    pub fn id(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::Fps => "fps",
            Self::Osal => "osal",
            Self::Mcfps => "mcfps",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| {
                Error::validation(format!(
                    "unknown strategy {s:?}; valid ids: random, fps, osal, mcfps"
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrategyParams {
    /// Neighbors examined around each MCFPS seed.
    pub neighborhood_k: usize,
    /// MC-dropout passes per candidate.
    pub passes_t: usize,
    /// A neighborhood whose members all have certainty strictly above this is skipped.
    pub skip_threshold: f64,
    pub osal_k_range: (usize, usize),
    /// Draw extra FPS seeds to replace skipped neighborhoods.
    pub refill_on_skip: bool,
    /// Silhouette is O(n²); above this many points the cluster count is
    /// chosen on a seeded subsample of this size.
    pub osal_silhouette_sample: usize,
}

impl Default for StrategyParams {
    fn default() -> Self {
        Self {
            neighborhood_k: 10,
            passes_t: 20,
            skip_threshold: 0.8,
            osal_k_range: (2, 10),
            refill_on_skip: false,
            osal_silhouette_sample: 4000,
        }
    }
}

impl StrategyParams {
    pub fn validate(&self) -> Result<()> {
        if self.passes_t < 1 {
            return Err(Error::validation("passes_t must be at least 1"));
        }
        if !(self.skip_threshold > 0.0 && self.skip_threshold <= 1.0) {
            return Err(Error::validation("skip_threshold must lie in (0, 1]"));
        }
        let (lo, hi) = self.osal_k_range;
        if lo < 2 || lo > hi {
            return Err(Error::validation(format!("OSAL k range [{lo}, {hi}] invalid")));
        }
        Ok(())
    }
}

/// Everything a strategy may look at in one round.
pub struct QueryContext<'a> {
    pub pool: &'a EmbeddingPool,
    pub partition: &'a PoolPartition,
    pub model: &'a Mlp,
    pub budget: usize,
    pub params: &'a StrategyParams,
    pub round_seed: u64,
}

impl QueryContext<'_> {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.budget < 1 {
            return Err(Error::validation("budget must be at least 1"));
        }
        if self.budget > self.partition.unlabeled.len() {
            return Err(Error::validation(format!(
                "budget {} exceeds {} unlabeled samples",
                self.budget,
                self.partition.unlabeled.len()
            )));
        }
        Ok(())
    }

    fn points(&self) -> Points<'_, f32> {
        self.pool.points()
    }

    fn first_unlabeled(&self) -> usize {
        self.partition.unlabeled[0]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PickInfo {
    pub index: usize,
    /// FPS seed whose neighborhood produced the pick (the pick itself for
    /// strategies without neighborhoods).
    pub seed_index: usize,
    /// Max of the MC-averaged softmax; MCFPS only.
    pub certainty: Option<f64>,
    /// OSAL cluster of the pick.
    pub cluster: Option<usize>,
}

impl PickInfo {
    fn plain(index: usize) -> Self {
        Self {
            index,
            seed_index: index,
            certainty: None,
            cluster: None,
        }
    }

    pub fn uncertainty(&self) -> Option<f64> {
        self.certainty.map(|c| 1.0 - c)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QueryBatch {
    pub picks: Vec<usize>,
    pub diagnostics: Vec<PickInfo>,
    /// Seeds of neighborhoods skipped by the certainty threshold.
    pub skipped: Vec<usize>,
}

impl QueryBatch {
    fn from_infos(diagnostics: Vec<PickInfo>, skipped: Vec<usize>) -> Self {
        Self {
            picks: diagnostics.iter().map(|d| d.index).collect(),
            diagnostics,
            skipped,
        }
    }
}

pub trait QueryStrategy: Send {
    fn kind(&self) -> StrategyKind;
    fn query(&mut self, ctx: &QueryContext<'_>) -> Result<QueryBatch>;
}

pub fn make_strategy(kind: StrategyKind) -> Box<dyn QueryStrategy> {
    match kind {
        StrategyKind::Random => Box::new(Stateless(kind, query_random)),
        StrategyKind::Fps => Box::new(Stateless(kind, query_fps)),
        StrategyKind::Mcfps => Box::new(Stateless(kind, query_mcfps)),
        StrategyKind::Osal => Box::new(OsalStrategy::default()),
    }
}

struct Stateless(StrategyKind, fn(&QueryContext<'_>) -> Result<QueryBatch>);

impl QueryStrategy for Stateless {
    fn kind(&self) -> StrategyKind {
        self.0
    }

    fn query(&mut self, ctx: &QueryContext<'_>) -> Result<QueryBatch> {
        (self.1)(ctx)
    }
}

/// `budget` unlabeled indices drawn uniformly without replacement.
pub fn query_random(ctx: &QueryContext<'_>) -> Result<QueryBatch> {
    ctx.validate()?;
    let mut items = ctx.partition.unlabeled.clone();
    let mut rng = Rng::new(rng::mix(ctx.round_seed, tag::QUERY));
    rng.choose_prefix(&mut items, ctx.budget);
    Ok(QueryBatch::from_infos(
        items[..ctx.budget].iter().map(|&i| PickInfo::plain(i)).collect(),
        Vec::new(),
    ))
}

fn labeled_aware_sampler<'a>(ctx: &'a QueryContext<'_>) -> Result<FarthestPointSampler<'a, f32>> {
    FarthestPointSampler::new(
        ctx.points(),
        &ctx.partition.unlabeled,
        &ctx.partition.labeled,
        ctx.first_unlabeled(),
    )
}

/// Farthest-point sampling over the unlabeled set. Once labels exist, the
/// max-min criterion also counts distance to every labeled sample.
pub fn query_fps(ctx: &QueryContext<'_>) -> Result<QueryBatch> {
    ctx.validate()?;
    let picks = labeled_aware_sampler(ctx)?.take(ctx.budget);
    Ok(QueryBatch::from_infos(picks.map(PickInfo::plain).collect(), Vec::new()))
}

/// A seed, its neighborhood members (seed first) and their certainties.
struct Neighborhood {
    seed: usize,
    members: Vec<usize>,
    certainty: Vec<f64>,
}

fn neighborhood(ctx: &QueryContext<'_>, seed: usize) -> Result<Neighborhood> {
    let nl = geometry::knn(ctx.points(), &ctx.partition.unlabeled, seed, ctx.params.neighborhood_k)?;
    let mut members = Vec::with_capacity(nl.len() + 1);
    members.push(seed);
    members.extend(nl.indices);
    let nseed = rng::mix_all(ctx.round_seed, &[tag::MASK, seed as u64]);
    let certainty = members
        .iter()
        .map(|&m| {
            ctx.model
                .mc_dropout(ctx.pool.row(m), ctx.params.passes_t, rng::mix(nseed, m as u64))
                .map(|u| u.certainty)
        })
        .collect::<Result<_>>()?;
    Ok(Neighborhood {
        seed,
        members,
        certainty,
    })
}

/// Outcome of resolving one neighborhood against the picks made so far.
enum Resolution {
    Pick(PickInfo),
    Skipped,
    /// Every member was already picked from an earlier neighborhood.
    Exhausted,
}

fn resolve(nb: &Neighborhood, threshold: f64, taken: &HashSet<usize>) -> Resolution {
    if nb.certainty.iter().all(|&c| c > threshold) {
        return Resolution::Skipped;
    }
    let mut best: Option<(usize, f64)> = None;
    for (pos, (&m, &c)) in nb.members.iter().zip(&nb.certainty).enumerate() {
        if taken.contains(&m) {
            continue;
        }
        let u = 1.0 - c;
        best = match best {
            Some((bp, bu)) if bu > u || (bu == u && nb.members[bp] < m) => Some((bp, bu)),
            _ => Some((pos, u)),
        };
    }
    match best {
        Some((pos, _)) => Resolution::Pick(PickInfo {
            index: nb.members[pos],
            seed_index: nb.seed,
            certainty: Some(nb.certainty[pos]),
            cluster: None,
        }),
        None => Resolution::Exhausted,
    }
}

/// FPS seeds, kNN neighborhoods over the unlabeled set, and one pick per
/// neighborhood: the member with the highest MC-dropout uncertainty
/// `1 − max(mean softmax)`. Neighborhoods whose members are all more certain
/// than `skip_threshold` are skipped; skipped budget is only replaced when
/// `refill_on_skip` is set.
pub fn query_mcfps(ctx: &QueryContext<'_>) -> Result<QueryBatch> {
    ctx.validate()?;
    let mut sampler = labeled_aware_sampler(ctx)?;
    let seeds: Vec<usize> = sampler.by_ref().take(ctx.budget).collect();
    let neighborhoods: Vec<Neighborhood> = seeds
        .par_iter()
        .map(|&s| neighborhood(ctx, s))
        .collect::<Result<_>>()?;

    let threshold = ctx.params.skip_threshold;
    let mut taken = HashSet::new();
    let mut infos = Vec::with_capacity(ctx.budget);
    let mut skipped = Vec::new();
    let mut absorb = |nb: &Neighborhood, infos: &mut Vec<PickInfo>, skipped: &mut Vec<usize>| {
        match resolve(nb, threshold, &taken) {
            Resolution::Pick(info) => {
                taken.insert(info.index);
                infos.push(info);
            }
            Resolution::Skipped => skipped.push(nb.seed),
            Resolution::Exhausted => {}
        }
    };
    for nb in &neighborhoods {
        absorb(nb, &mut infos, &mut skipped);
    }
    if ctx.params.refill_on_skip {
        while infos.len() < ctx.budget {
            let Some(seed) = sampler.next() else { break };
            let nb = neighborhood(ctx, seed)?;
            absorb(&nb, &mut infos, &mut skipped);
        }
    }
    Ok(QueryBatch::from_infos(infos, skipped))
}

/// Cluster structure of the non-test space, fixed after the first OSAL round.
#[derive(Clone, Debug, PartialEq)]
pub struct OsalClusters {
    pub k: usize,
    /// Pool indices per cluster, ascending.
    pub members: Vec<Vec<usize>>,
}

impl OsalClusters {
    /// Cluster the union of labeled and unlabeled samples. k is chosen by
    /// silhouette over `osal_k_range` (capped at the point count).
    pub fn build(ctx: &QueryContext<'_>) -> Result<Self> {
        let mut space: Vec<usize> = ctx
            .partition
            .labeled
            .iter()
            .chain(&ctx.partition.unlabeled)
            .copied()
            .collect();
        space.sort_unstable();
        let data = ctx.points().gather(&space);
        let pts = Points::new(&data, ctx.pool.dim())?;
        let (lo, hi) = ctx.params.osal_k_range;
        let hi = hi.min(space.len());
        if lo > hi {
            return Err(Error::validation("too few samples for the OSAL k range"));
        }
        let seed = rng::mix(ctx.round_seed, tag::KMEANS);
        let opts = KMeansOptions::default();
        let cap = ctx.params.osal_silhouette_sample.max(hi);
        let clustering = if space.len() <= cap {
            geometry::choose_k_by_silhouette(pts, lo, hi, seed, opts)?.1
        } else {
            let mut sample: Vec<usize> = (0..space.len()).collect();
            Rng::new(rng::mix(seed, tag::SILHOUETTE)).choose_prefix(&mut sample, cap);
            sample.truncate(cap);
            sample.sort_unstable();
            let sub = pts.gather(&sample);
            let (k, _) = geometry::choose_k_by_silhouette(Points::new(&sub, pts.dim())?, lo, hi, seed, opts)?;
            geometry::kmeans_pp(pts, k, seed, opts)?
        };
        let members = (0..clustering.k)
            .map(|c| clustering.members(c).into_iter().map(|p| space[p]).collect())
            .collect();
        Ok(Self {
            k: clustering.k,
            members,
        })
    }
}

/// Split `budget` across clusters one unit at a time in cluster order,
/// skipping clusters with no remaining capacity.
pub fn round_robin_allocation(budget: usize, capacity: &[usize]) -> Vec<usize> {
    let mut share = vec![0; capacity.len()];
    let mut left = budget;
    while left > 0 {
        let mut progressed = false;
        for (s, &cap) in share.iter_mut().zip(capacity) {
            if left > 0 && *s < cap {
                *s += 1;
                left -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    share
}

/// Cluster-wise FPS with equal per-cluster allocation. Each cluster's FPS is
/// anchored on its already-labeled members.
pub fn query_osal(ctx: &QueryContext<'_>, cache: &mut Option<OsalClusters>) -> Result<QueryBatch> {
    ctx.validate()?;
    if cache.is_none() {
        *cache = Some(OsalClusters::build(ctx)?);
    }
    let clusters = cache.as_ref().unwrap();
    let unlabeled: HashSet<usize> = ctx.partition.unlabeled.iter().copied().collect();
    let labeled: HashSet<usize> = ctx.partition.labeled.iter().copied().collect();
    let (open, anchors): (Vec<Vec<usize>>, Vec<Vec<usize>>) = clusters
        .members
        .iter()
        .map(|m| {
            (
                m.iter().copied().filter(|i| unlabeled.contains(i)).collect(),
                m.iter().copied().filter(|i| labeled.contains(i)).collect(),
            )
        })
        .unzip();
    let capacity: Vec<usize> = open.iter().map(Vec::len).collect();
    let share = round_robin_allocation(ctx.budget, &capacity);

    let mut infos = Vec::with_capacity(ctx.budget);
    for (c, &count) in share.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let sampler = FarthestPointSampler::new(ctx.points(), &open[c], &anchors[c], open[c][0])?;
        infos.extend(sampler.take(count).map(|i| PickInfo {
            cluster: Some(c),
            ..PickInfo::plain(i)
        }));
    }
    Ok(QueryBatch::from_infos(infos, Vec::new()))
}

/// OSAL with its cluster cache.
#[derive(Default)]
pub struct OsalStrategy {
    pub clusters: Option<OsalClusters>,
}

impl QueryStrategy for OsalStrategy {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Osal
    }

    fn query(&mut self, ctx: &QueryContext<'_>) -> Result<QueryBatch> {
        query_osal(ctx, &mut self.clusters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::MlpConfig;

    fn line_pool() -> EmbeddingPool {
        EmbeddingPool::new(2, vec![0.0, 0.0, 1.0, 0.0, 10.0, 0.0], Some(vec![0, 0, 1]), 2).unwrap()
    }

    fn untrained(pool: &EmbeddingPool) -> Mlp {
        Mlp::new(MlpConfig::new(pool.dim(), pool.num_classes().max(2))).unwrap()
    }

    fn partition(unlabeled: Vec<usize>, labeled: Vec<usize>) -> PoolPartition {
        PoolPartition {
            labeled,
            unlabeled,
            test: Vec::new(),
        }
    }

    #[test]
    fn ids_roundtrip() {
        for k in StrategyKind::ALL {
            assert_eq!(k.id().parse::<StrategyKind>().unwrap(), k);
        }
        let err = "bogus".parse::<StrategyKind>().unwrap_err().to_string();
        assert!(err.contains("mcfps"));
    }

    #[test]
    fn fps_first_round_collinear() {
        let pool = line_pool();
        let model = untrained(&pool);
        let part = partition(vec![0, 1, 2], vec![]);
        let params = StrategyParams::default();
        let ctx = QueryContext {
            pool: &pool,
            partition: &part,
            model: &model,
            budget: 2,
            params: &params,
            round_seed: 1,
        };
        assert_eq!(query_fps(&ctx).unwrap().picks, vec![0, 2]);
        let all = QueryContext { budget: 3, ..ctx };
        let mut picks = query_fps(&all).unwrap().picks;
        picks.sort();
        assert_eq!(picks, vec![0, 1, 2]);
    }

    #[test]
    fn budget_bounds_are_validated() {
        let pool = line_pool();
        let model = untrained(&pool);
        let part = partition(vec![0, 1], vec![2]);
        let params = StrategyParams::default();
        let ctx = QueryContext {
            pool: &pool,
            partition: &part,
            model: &model,
            budget: 3,
            params: &params,
            round_seed: 1,
        };
        assert!(query_random(&ctx).is_err());
        assert!(query_fps(&QueryContext { budget: 0, ..ctx }).is_err());
    }

    #[test]
    fn random_is_uniform_enough() {
        let pool = EmbeddingPool::new(1, (0..10).map(|i| i as f32).collect(), Some(vec![0; 10]), 2).unwrap();
        let model = untrained(&pool);
        let part = partition((0..10).collect(), vec![]);
        let params = StrategyParams::default();
        let mut freq = [0usize; 10];
        for s in 0..1000 {
            let ctx = QueryContext {
                pool: &pool,
                partition: &part,
                model: &model,
                budget: 1,
                params: &params,
                round_seed: s,
            };
            freq[query_random(&ctx).unwrap().picks[0]] += 1;
        }
        assert!(freq.iter().all(|&f| (60..=140).contains(&f)), "{freq:?}");
    }

    #[test]
    fn round_robin_examples() {
        assert_eq!(round_robin_allocation(4, &[10, 10]), vec![2, 2]);
        assert_eq!(round_robin_allocation(4, &[1, 10]), vec![1, 3]);
        assert_eq!(round_robin_allocation(5, &[10, 10]), vec![3, 2]);
        assert_eq!(round_robin_allocation(9, &[2, 3]), vec![2, 3]);
        assert_eq!(round_robin_allocation(4, &[0, 10]), vec![0, 4]);
    }

    fn resolve_with(certainty: Vec<f64>, threshold: f64) -> Resolution {
        let nb = Neighborhood {
            seed: 10,
            members: vec![10, 11, 12],
            certainty,
        };
        resolve(&nb, threshold, &HashSet::new())
    }

    #[test]
    fn most_uncertain_member_wins() {
        match resolve_with(vec![0.9, 0.6, 0.5], 0.8) {
            Resolution::Pick(p) => {
                assert_eq!(p.index, 12);
                assert_eq!(p.seed_index, 10);
            }
            _ => panic!("expected a pick"),
        }
        assert!(matches!(resolve_with(vec![0.95, 0.9, 0.85], 0.8), Resolution::Skipped));
        assert!(matches!(resolve_with(vec![1.0, 1.0, 1.0], 1.0), Resolution::Pick(_)));
        match resolve_with(vec![0.5, 0.5, 0.9], 0.8) {
            Resolution::Pick(p) => assert_eq!(p.index, 10),
            _ => panic!("expected a pick"),
        }
    }
}
