//! The four-stage pipeline: cluster laughter, optimize each clustering,
//! keep the better one, then refine it segment by segment with the
//! lexical segmenter.
//!
//! Every choice between alternatives goes through a [`CandidateLog`]. In
//! oracle mode candidates are ranked by `pk + wd` against the reference
//! (ties: smaller pk, then the earlier candidate); in likelihood mode by
//! total lexical log likelihood (ties: the earlier candidate).

mod config;

pub use config::{ConfigError, MethodChoice, PipelineConfig, SelectorMode};

use serde::Serialize;
use thiserror::Error;

use crate::bayesseg::{self, optimal_cuts, BayesError, ScoreTable, Selector, UnitSequence};
use crate::clustering::{self, kmedoids, ClusterError};
use crate::metrics::{EvalResult, Evaluator, MetricsError};
use crate::segmentation::{clump, clusters_to_segmentation, validate, SegMethod, Segmentation, SegmentationError};
use crate::transcript::{extract_laughter, Transcript};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("too few laughter turns for this method ({found} found, {needed} needed)")]
    NoLaughter { found: usize, needed: usize },
    #[error("the oracle selector and the K-medoids optimizer need a reference segmentation")]
    MissingReference,
    #[error("k_init must satisfy 1 < k_init < 20, got {0}")]
    KInit(usize),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Segmentation(#[from] SegmentationError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Bayes(#[from] BayesError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub segmentation: Segmentation,
    /// Present whenever a reference is available.
    pub eval: Option<EvalResult>,
    /// Total lexical log likelihood; present in likelihood mode.
    pub log_likelihood: Option<f64>,
    pub note: String,
}

/// Every candidate considered for one decision, in evaluation order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateLog {
    pub entries: Vec<Candidate>,
    pub selected: usize,
}

impl CandidateLog {
    pub fn best(&self) -> &Candidate {
        &self.entries[self.selected]
    }
}

/// Ranks candidates for one conversation.
#[derive(Debug, Clone, Copy)]
pub enum Objective<'a> {
    Oracle(&'a Evaluator),
    Likelihood {
        table: &'a ScoreTable,
        evaluator: Option<&'a Evaluator>,
    },
}

impl<'a> Objective<'a> {
    pub fn new(
        mode: SelectorMode,
        table: &'a ScoreTable,
        evaluator: Option<&'a Evaluator>,
    ) -> Result<Self, PipelineError> {
        match mode {
            SelectorMode::Oracle => evaluator.map(Objective::Oracle).ok_or(PipelineError::MissingReference),
            SelectorMode::Likelihood => Ok(Objective::Likelihood { table, evaluator }),
        }
    }

    fn selector(&self) -> Selector<'a> {
        match *self {
            Objective::Oracle(ev) => Selector::Oracle(ev),
            Objective::Likelihood { .. } => Selector::Likelihood,
        }
    }

    pub fn candidate(&self, segmentation: Segmentation, note: impl Into<String>) -> Result<Candidate, PipelineError> {
        let (eval, log_likelihood) = match *self {
            Objective::Oracle(ev) => (Some(ev.evaluate(&segmentation)?), None),
            Objective::Likelihood { table, evaluator } => (
                evaluator.map(|ev| ev.evaluate(&segmentation)).transpose()?,
                Some(table.total(0..segmentation.n_units, &segmentation.boundaries)),
            ),
        };
        Ok(Candidate {
            segmentation,
            eval,
            log_likelihood,
            note: note.into(),
        })
    }

    /// True when `a` ranks strictly ahead of `b`.
    fn better(&self, a: &Candidate, b: &Candidate) -> bool {
        match self {
            Objective::Oracle(_) => {
                let (ea, eb) = (a.eval.expect("oracle eval"), b.eval.expect("oracle eval"));
                ea.combined() < eb.combined() || (ea.combined() == eb.combined() && ea.pk < eb.pk)
            }
            Objective::Likelihood { .. } => a.log_likelihood > b.log_likelihood,
        }
    }

    fn argmin(&self, entries: &[Candidate]) -> usize {
        let mut best = 0;
        for i in 1..entries.len() {
            if self.better(&entries[i], &entries[best]) {
                best = i;
            }
        }
        best
    }

    pub fn log(&self, entries: Vec<Candidate>) -> CandidateLog {
        let selected = self.argmin(&entries);
        CandidateLog { entries, selected }
    }
}

/// Agglomerative path: clump runs of laughter, cluster with average
/// linkage, cut by the inconsistency coefficient, and close every
/// multi-member cluster with a boundary.
pub fn optimize_agglo(t: &Transcript, config: &PipelineConfig) -> Result<Segmentation, PipelineError> {
    let laughter = extract_laughter(t);
    if laughter.is_empty() {
        return Err(PipelineError::NoLaughter { found: 0, needed: 1 });
    }
    let points = clump(&laughter);
    let values: Vec<f64> = points.iter().map(|&p| p as f64).collect();
    let tree = clustering::linkage_average(&values)?;
    let clusters = match config.cutoff {
        Some(c) => clustering::cut_at(&tree, config.inconsistency_depth, c)?,
        None => clustering::cut_by_inconsistency(&tree, config.inconsistency_depth)?,
    };
    Ok(clusters_to_segmentation(&clusters, &points, t.len(), SegMethod::Agglo)?)
}

/// The order in which K values are tried: `k_init`, then down to 2, then up
/// to `min(k_max, n_points) - 1`, keeping only `2..=n_points`.
pub fn kmedoids_schedule(k_init: usize, k_max: usize, n_points: usize) -> Vec<usize> {
    let upper = k_max.min(n_points).saturating_sub(1);
    std::iter::once(k_init)
        .chain((2..k_init).rev())
        .chain(k_init + 1..=upper)
        .filter(|&k| (2..=n_points).contains(&k))
        .collect()
}

/// K-medoids path: cluster the laughter turns for every K in
/// [`kmedoids_schedule`] and keep the segmentation closest to the reference.
pub fn optimize_kmedoids(
    t: &Transcript,
    evaluator: &Evaluator,
    config: &PipelineConfig,
) -> Result<(Segmentation, CandidateLog), PipelineError> {
    if !(1 < config.k_init && config.k_init < 20) {
        return Err(PipelineError::KInit(config.k_init));
    }
    let laughter = extract_laughter(t);
    if laughter.len() < 2 {
        return Err(PipelineError::NoLaughter {
            found: laughter.len(),
            needed: 2,
        });
    }
    let values: Vec<f64> = laughter.iter().map(|&p| p as f64).collect();
    let objective = Objective::Oracle(evaluator);
    let entries = kmedoids_schedule(config.k_init, config.k_max, laughter.len())
        .into_iter()
        .map(|k| {
            let state = kmedoids(&values, k)?;
            let seg = clusters_to_segmentation(&state.to_clustering(), &laughter, t.len(), SegMethod::Kmedoids)?;
            objective.candidate(seg, format!("k={k}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let log = objective.log(entries);
    Ok((log.best().segmentation.clone(), log))
}

/// Picks the better of the two cluster-derived segmentations by `pk + wd`;
/// equal scores go to the agglomerative one. A path that cannot run is
/// skipped as long as the other can.
pub fn select_best_cluster(
    evaluator: &Evaluator,
    agglo: Result<&Segmentation, &PipelineError>,
    kmedoids: Result<&Segmentation, &PipelineError>,
) -> Result<Segmentation, PipelineError> {
    let objective = Objective::Oracle(evaluator);
    let mut entries = Vec::new();
    for (path, note) in [(agglo, "agglo"), (kmedoids, "kmedoids")] {
        if let Ok(seg) = path {
            entries.push(objective.candidate(seg.clone(), note)?);
        }
    }
    if entries.is_empty() {
        return Err(agglo.err().cloned().expect("both paths failed"));
    }
    let log = objective.log(entries);
    Ok(log.best().segmentation.clone().with_method(SegMethod::Bestcluster))
}

/// Runs both cluster paths and returns the better segmentation.
pub fn best_cluster(
    t: &Transcript,
    evaluator: &Evaluator,
    config: &PipelineConfig,
) -> Result<Segmentation, PipelineError> {
    let agglo = optimize_agglo(t, config);
    let kmed = optimize_kmedoids(t, evaluator, config).map(|(s, _)| s);
    select_best_cluster(evaluator, agglo.as_ref(), kmed.as_ref())
}

/// Replaces the boundaries inside units `lo..hi` of `base` (0-based,
/// half-open) with the best lexical cut of that span.
fn recut(
    objective: &Objective<'_>,
    table: &ScoreTable,
    base: &Segmentation,
    lo: usize,
    hi: usize,
    k_max: usize,
    note: &str,
) -> Result<Candidate, PipelineError> {
    let outside: Vec<usize> = base
        .boundaries
        .iter()
        .copied()
        .filter(|&b| b <= lo || b >= hi)
        .collect();
    let mut best: Option<Candidate> = None;
    for cut in optimal_cuts(table, lo..hi, k_max) {
        let mut boundaries = outside.clone();
        boundaries.extend(&cut.cuts);
        let seg = Segmentation::from_unsorted(base.n_units, boundaries, SegMethod::Hybrid);
        let cand = objective.candidate(seg, format!("{note} k={}", cut.k))?;
        let take = match &best {
            None => true,
            Some(b) => match objective {
                Objective::Oracle(_) => objective.better(&cand, b),
                // the outside is fixed, so the span's own score decides
                Objective::Likelihood { .. } => cand.log_likelihood > b.log_likelihood,
            },
        };
        if take {
            best = Some(cand);
        }
    }
    Ok(best.expect("span is non-empty"))
}

/// Refines `base` with the lexical segmenter.
///
/// Candidates are the base itself, then the base with each segment re-cut
/// on its own. If the best re-cut is not in the last segment, the segments
/// that follow it are absorbed one at a time (their boundaries removed) and
/// the merged span is re-cut. The best candidate overall is returned.
pub fn hybridize_with(
    objective: &Objective<'_>,
    table: &ScoreTable,
    base: &Segmentation,
    k_max: usize,
) -> Result<(Segmentation, CandidateLog), PipelineError> {
    validate(base)?;
    let base = base.clone().with_method(SegMethod::Hybrid);
    let spans: Vec<(usize, usize)> = base.segments().into_iter().map(|(a, b)| (a - 1, b)).collect();
    let s = spans.len();

    let mut entries = vec![objective.candidate(base.clone(), "base")?];
    for (i, &(lo, hi)) in spans.iter().enumerate() {
        entries.push(recut(objective, table, &base, lo, hi, k_max, &format!("recut segment {i}"))?);
    }
    let best_refinement = objective.argmin(&entries[1..]);
    if best_refinement < s - 1 {
        let lo = spans[best_refinement].0;
        for (j, &(_, hi)) in spans.iter().enumerate().skip(best_refinement + 1) {
            let note = format!("merge segments {best_refinement}..={j}");
            entries.push(recut(objective, table, &base, lo, hi, k_max, &note)?);
        }
    }
    let log = objective.log(entries);
    let seg = log.best().segmentation.clone();
    validate(&seg)?;
    Ok((seg, log))
}

/// Per-conversation inputs shared by every stage.
pub struct Prepared {
    pub table: ScoreTable,
    pub evaluator: Option<Evaluator>,
}

impl Prepared {
    pub fn new(t: &Transcript, config: &PipelineConfig) -> Result<Self, PipelineError> {
        config.validate().map_err(PipelineError::Config)?;
        let seq = UnitSequence::from_transcript(t, config.stopwords);
        let table = ScoreTable::new(&seq, config.theta0)?;
        let evaluator = t
            .reference
            .as_ref()
            .map(|r| -> Result<Evaluator, PipelineError> {
                Ok(Evaluator::new(r.to_segmentation(t.len())?, config.metric_unit, t.token_counts())?)
            })
            .transpose()?;
        Ok(Self { table, evaluator })
    }

    pub fn objective(&self, mode: SelectorMode) -> Result<Objective<'_>, PipelineError> {
        Objective::new(mode, &self.table, self.evaluator.as_ref())
    }
}

/// [`hybridize_with`] for one transcript, building its tables first.
pub fn hybridize(
    t: &Transcript,
    base: &Segmentation,
    config: &PipelineConfig,
) -> Result<(Segmentation, CandidateLog), PipelineError> {
    let prepared = Prepared::new(t, config)?;
    let objective = prepared.objective(config.selector)?;
    hybridize_with(&objective, &prepared.table, base, config.k_max)
}

/// Output of one method on one conversation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRun {
    pub segmentation: Segmentation,
    /// Absent when the conversation has no reference.
    pub eval: Option<EvalResult>,
    pub log: Option<CandidateLog>,
    /// For the best-cluster method: which path won.
    pub source: Option<SegMethod>,
}

/// All five methods on one conversation, in pipeline order.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub id: String,
    pub selector: SelectorMode,
    pub runs: Vec<(SegMethod, Result<MethodRun, PipelineError>)>,
}

impl PipelineResult {
    pub fn get(&self, method: SegMethod) -> Option<&Result<MethodRun, PipelineError>> {
        self.runs.iter().find(|(m, _)| *m == method).map(|(_, r)| r)
    }

    /// The run's segmentation when the method succeeded.
    pub fn segmentation(&self, method: SegMethod) -> Option<&Segmentation> {
        self.get(method)?.as_ref().ok().map(|r| &r.segmentation)
    }

    pub fn eval(&self, method: SegMethod) -> Option<EvalResult> {
        self.get(method)?.as_ref().ok()?.eval
    }
}

/// Runs agglomerative, K-medoids, best-cluster, lexical-only and hybrid
/// segmentation on one conversation.
///
/// Oracle mode needs a reference. Likelihood mode runs without one: the
/// K-medoids path is skipped (its K is chosen against the reference), the
/// best cluster is the agglomerative one, and the lexical stages select by
/// likelihood. When the cluster paths find no laughter, the hybrid starts
/// from a single segment.
pub fn run_pipeline(t: &Transcript, config: &PipelineConfig) -> Result<PipelineResult, PipelineError> {
    let prepared = Prepared::new(t, config)?;
    let objective = prepared.objective(config.selector)?;
    let evaluator = prepared.evaluator.as_ref();
    let eval = |seg: &Segmentation| -> Result<Option<EvalResult>, PipelineError> {
        Ok(evaluator.map(|ev| ev.evaluate(seg)).transpose()?)
    };
    let run = |segmentation: Segmentation, log: Option<CandidateLog>, source: Option<SegMethod>| {
        Ok(MethodRun {
            eval: eval(&segmentation)?,
            segmentation,
            log,
            source,
        })
    };

    let agglo = optimize_agglo(t, config).and_then(|s| run(s, None, None));

    let kmed = match (config.selector, evaluator) {
        (SelectorMode::Oracle, Some(ev)) => {
            optimize_kmedoids(t, ev, config).and_then(|(s, log)| run(s, Some(log), None))
        }
        _ => Err(PipelineError::MissingReference),
    };

    let best = match (config.selector, evaluator) {
        (SelectorMode::Oracle, Some(ev)) => select_best_cluster(
            ev,
            agglo.as_ref().map(|r| &r.segmentation),
            kmed.as_ref().map(|r| &r.segmentation),
        )
        .and_then(|s| {
            let source = if agglo.as_ref().is_ok_and(|a| a.segmentation.boundaries == s.boundaries) {
                SegMethod::Agglo
            } else {
                SegMethod::Kmedoids
            };
            run(s, None, Some(source))
        }),
        _ => match &agglo {
            Ok(a) => run(a.segmentation.clone().with_method(SegMethod::Bestcluster), None, Some(SegMethod::Agglo)),
            Err(e) => Err(e.clone()),
        },
    };

    let k_max = config.k_max.min(t.len());
    let bayes = bayesseg::scan_table(&prepared.table, k_max, objective.selector())
        .map_err(PipelineError::from)
        .and_then(|r| run(r.segmentation, None, None));

    let base = match &best {
        Ok(b) => b.segmentation.clone(),
        Err(_) => Segmentation::whole(t.len(), SegMethod::Hybrid),
    };
    let hybrid = hybridize_with(&objective, &prepared.table, &base, config.k_max)
        .and_then(|(s, log)| run(s, Some(log), None));

    Ok(PipelineResult {
        id: t.id.clone(),
        selector: config.selector,
        runs: vec![
            (SegMethod::Agglo, agglo),
            (SegMethod::Kmedoids, kmed),
            (SegMethod::Bestcluster, best),
            (SegMethod::Bayes, bayes),
            (SegMethod::Hybrid, hybrid),
        ],
    })
}
