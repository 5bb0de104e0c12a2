//! Role assignment and the L-ratio: the fraction of a team playing lead
//! roles, from 1/n (one lead) up to 1.0 (everyone leads). Teams with an
//! L-ratio below 0.5 are "tall", at or above it "flat".

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Paper;
use crate::ids::{AuthorIdx, PaperIdx};
use crate::lexicon::{Activity, ActivitySet, RoleCluster, ACTIVITY_COUNT, ALL_ACTIVITIES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Lead,
    DirectSupport,
    IndirectSupport,
    Unknown,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Lead => "lead",
            Role::DirectSupport => "direct_support",
            Role::IndirectSupport => "indirect_support",
            Role::Unknown => "unknown",
        }
    }

    pub fn is_support(self) -> bool {
        matches!(self, Role::DirectSupport | Role::IndirectSupport)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleSource {
    Parsed,
    Predicted,
}

/// Activity → role-cluster mapping used for assignment. Defaults to the
/// fixed reference partition; a discovered partition can be substituted
/// after its clusters are mapped onto roles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RolePartition {
    roles: [RoleCluster; ACTIVITY_COUNT],
}

impl Default for RolePartition {
    fn default() -> Self {
        RolePartition::reference()
    }
}

impl RolePartition {
    pub fn reference() -> Self {
        let mut roles = [RoleCluster::Lead; ACTIVITY_COUNT];
        for a in ALL_ACTIVITIES {
            roles[a.index()] = a.reference_cluster();
        }
        RolePartition { roles }
    }

    pub fn from_map(map: impl Fn(Activity) -> RoleCluster) -> Self {
        let mut roles = [RoleCluster::Lead; ACTIVITY_COUNT];
        for a in ALL_ACTIVITIES {
            roles[a.index()] = map(a);
        }
        RolePartition { roles }
    }

    pub fn role_of(&self, a: Activity) -> RoleCluster {
        self.roles[a.index()]
    }
}

/// Priority order Lead > DirectSupport > IndirectSupport: any lead activity
/// makes the author a lead.
pub fn assign_role(activities: ActivitySet, partition: &RolePartition) -> Role {
    if activities.is_empty() {
        return Role::Unknown;
    }
    let mut best = Role::IndirectSupport;
    for a in activities.iter() {
        match partition.role_of(a) {
            RoleCluster::Lead => return Role::Lead,
            RoleCluster::DirectSupport => best = Role::DirectSupport,
            RoleCluster::IndirectSupport => {}
        }
    }
    best
}

/// Per-paper role vector, byline-ordered.
#[derive(Debug, Clone)]
pub struct PaperRoles {
    pub paper: PaperIdx,
    pub roles: Vec<(AuthorIdx, Role)>,
    pub source: RoleSource,
}

impl PaperRoles {
    pub fn team_size(&self) -> usize {
        self.roles.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LRatio {
    pub n: usize,
    pub n_lead: usize,
    pub value: f64,
    pub tall: bool,
}

/// Outcome of the L-ratio computation for one paper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LRatioOutcome {
    Ok(LRatio),
    /// at least one byline author has an Unknown role
    Incomplete { unknowns: usize },
    /// no author plays a lead role; excluded from analyses by default
    ZeroLead,
}

pub fn compute_lratio(roles: &[Role]) -> LRatioOutcome {
    let n = roles.len();
    let unknowns = roles.iter().filter(|r| **r == Role::Unknown).count();
    if unknowns > 0 {
        return LRatioOutcome::Incomplete { unknowns };
    }
    let n_lead = roles.iter().filter(|r| **r == Role::Lead).count();
    if n_lead == 0 {
        return LRatioOutcome::ZeroLead;
    }
    let value = n_lead as f64 / n as f64;
    LRatioOutcome::Ok(LRatio {
        n,
        n_lead,
        value,
        tall: value < 0.5,
    })
}

/// Fallback for zero-lead papers, off by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PromoteRule {
    #[default]
    None,
    /// promote the first corresponding author (first author if none)
    Corresponding,
    /// promote the first author
    First,
}

impl PromoteRule {
    pub fn parse(s: &str) -> Option<PromoteRule> {
        match s {
            "none" => Some(PromoteRule::None),
            "corresponding" => Some(PromoteRule::Corresponding),
            "first" => Some(PromoteRule::First),
            _ => None,
        }
    }
}

/// Promote one author to Lead on a zero-lead paper according to the rule.
/// Returns true if a promotion happened.
pub fn apply_promotion(roles: &mut [Role], paper: &Paper, rule: PromoteRule) -> bool {
    if rule == PromoteRule::None || roles.is_empty() {
        return false;
    }
    if roles.iter().any(|r| *r == Role::Lead || *r == Role::Unknown) {
        return false;
    }
    let pos = match rule {
        PromoteRule::Corresponding => paper
            .corresponding
            .iter()
            .position(|&c| c)
            .unwrap_or(0),
        PromoteRule::First => 0,
        PromoteRule::None => unreachable!(),
    };
    roles[pos] = Role::Lead;
    true
}

/// Per-size role composition over all authors on teams of that size.
/// Unknown roles stay in the denominator, so fractions sum to at most 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Composition {
    pub authors: usize,
    pub frac_lead: f64,
    pub frac_direct: f64,
    pub frac_indirect: f64,
}

pub fn composition_by_size(
    papers: &[PaperRoles],
    max_size: usize,
) -> BTreeMap<usize, Composition> {
    let mut counts: BTreeMap<usize, (usize, usize, usize, usize)> = BTreeMap::new();
    for pr in papers {
        let n = pr.team_size();
        if n == 0 || n > max_size {
            continue;
        }
        let entry = counts.entry(n).or_default();
        for (_, role) in &pr.roles {
            entry.0 += 1;
            match role {
                Role::Lead => entry.1 += 1,
                Role::DirectSupport => entry.2 += 1,
                Role::IndirectSupport => entry.3 += 1,
                Role::Unknown => {}
            }
        }
    }
    counts
        .into_iter()
        .map(|(n, (total, lead, direct, indirect))| {
            let t = total as f64;
            (
                n,
                Composition {
                    authors: total,
                    frac_lead: lead as f64 / t,
                    frac_direct: direct as f64 / t,
                    frac_indirect: indirect as f64 / t,
                },
            )
        })
        .collect()
}

/// Histogram bin edges are fixed at 0.0, 0.1, ..., 1.0; the last bin is
/// closed on the right.
pub const LRATIO_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeDistribution {
    pub count: usize,
    pub mean: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub histogram: [usize; LRATIO_BINS],
}

/// Per-team-size distribution of L-ratio values.
pub fn lratio_distribution_by_size(lratios: &[LRatio]) -> BTreeMap<usize, SizeDistribution> {
    let mut by_size: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for lr in lratios {
        by_size.entry(lr.n).or_default().push(lr.value);
    }
    by_size
        .into_iter()
        .map(|(n, mut vals)| {
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let mut histogram = [0usize; LRATIO_BINS];
            for &v in &vals {
                let bin = ((v * LRATIO_BINS as f64) as usize).min(LRATIO_BINS - 1);
                histogram[bin] += 1;
            }
            (
                n,
                SizeDistribution {
                    count: vals.len(),
                    mean,
                    q1: quantile_sorted(&vals, 0.25),
                    median: quantile_sorted(&vals, 0.5),
                    q3: quantile_sorted(&vals, 0.75),
                    histogram,
                },
            )
        })
        .collect()
}

/// Type-7 (linear interpolation) quantile of a sorted slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!((0.0..=1.0).contains(&q));
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(acts: &[Activity]) -> ActivitySet {
        acts.iter().copied().collect()
    }

    #[test]
    fn priority_lead_beats_direct() {
        let p = RolePartition::reference();
        assert_eq!(
            assign_role(set(&[Activity::Design, Activity::Analyze]), &p),
            Role::Lead
        );
    }

    #[test]
    fn direct_support_assignment() {
        let p = RolePartition::reference();
        assert_eq!(
            assign_role(set(&[Activity::Perform, Activity::Analyze]), &p),
            Role::DirectSupport
        );
    }

    #[test]
    fn indirect_only() {
        let p = RolePartition::reference();
        assert_eq!(
            assign_role(set(&[Activity::Discuss, Activity::Edit]), &p),
            Role::IndirectSupport
        );
    }

    #[test]
    fn empty_profile_unknown() {
        let p = RolePartition::reference();
        assert_eq!(assign_role(ActivitySet::empty(), &p), Role::Unknown);
    }

    #[test]
    fn adding_lead_activity_never_demotes() {
        let p = RolePartition::reference();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rank = |r: Role| match r {
            Role::Lead => 3,
            Role::DirectSupport => 2,
            Role::IndirectSupport => 1,
            Role::Unknown => 0,
        };
        for _ in 0..200 {
            let mut s = ActivitySet::empty();
            for _ in 0..rng.gen_range(0..5) {
                s.insert(ALL_ACTIVITIES[rng.gen_range(0..ACTIVITY_COUNT)]);
            }
            let before = assign_role(s, &p);
            let mut with_lead = s;
            with_lead.insert(Activity::Conceive);
            let after = assign_role(with_lead, &p);
            assert!(rank(after) >= rank(before));
            assert_eq!(after, Role::Lead);
        }
    }

    #[test]
    fn lratio_half_is_flat() {
        let roles = [Role::Lead, Role::Lead, Role::DirectSupport, Role::IndirectSupport];
        match compute_lratio(&roles) {
            LRatioOutcome::Ok(lr) => {
                assert_eq!(lr.value, 0.5);
                assert!(!lr.tall);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lratio_one_lead_of_five() {
        let roles = [
            Role::Lead,
            Role::DirectSupport,
            Role::DirectSupport,
            Role::IndirectSupport,
            Role::DirectSupport,
        ];
        match compute_lratio(&roles) {
            LRatioOutcome::Ok(lr) => {
                assert_eq!(lr.value, 0.2);
                assert_eq!(lr.value, 1.0 / lr.n as f64);
                assert!(lr.tall);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lratio_all_leads_flat_extreme() {
        match compute_lratio(&[Role::Lead; 3]) {
            LRatioOutcome::Ok(lr) => {
                assert_eq!(lr.value, 1.0);
                assert!(!lr.tall);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_lead_flagged() {
        assert_eq!(
            compute_lratio(&[Role::DirectSupport, Role::IndirectSupport]),
            LRatioOutcome::ZeroLead
        );
    }

    #[test]
    fn unknown_role_incomplete() {
        assert_eq!(
            compute_lratio(&[Role::Lead, Role::Unknown]),
            LRatioOutcome::Incomplete { unknowns: 1 }
        );
    }

    #[test]
    fn bounds_and_permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let n = rng.gen_range(1..=10);
            let mut roles: Vec<Role> = (0..n)
                .map(|_| match rng.gen_range(0..3) {
                    0 => Role::Lead,
                    1 => Role::DirectSupport,
                    _ => Role::IndirectSupport,
                })
                .collect();
            if let LRatioOutcome::Ok(lr) = compute_lratio(&roles) {
                assert!(lr.value >= 1.0 / n as f64 - 1e-15);
                assert!(lr.value <= 1.0);
                assert_eq!(lr.tall, lr.value < 0.5);
                // shuffle must not change the value
                use rand::seq::SliceRandom;
                roles.shuffle(&mut rng);
                match compute_lratio(&roles) {
                    LRatioOutcome::Ok(lr2) => assert_eq!(lr.value, lr2.value),
                    other => panic!("{other:?}"),
                }
            }
        }
    }

    fn paper_roles(roles: Vec<Role>) -> PaperRoles {
        PaperRoles {
            paper: PaperIdx(0),
            roles: roles
                .into_iter()
                .enumerate()
                .map(|(i, r)| (AuthorIdx(i as u32), r))
                .collect(),
            source: RoleSource::Parsed,
        }
    }

    #[test]
    fn composition_size_two() {
        let papers = vec![
            paper_roles(vec![Role::Lead, Role::DirectSupport]),
            paper_roles(vec![Role::Lead, Role::DirectSupport]),
        ];
        let table = composition_by_size(&papers, 25);
        let c = table.get(&2).unwrap();
        assert_eq!(c.frac_lead, 0.5);
        assert_eq!(c.frac_direct, 0.5);
        assert_eq!(c.frac_indirect, 0.0);
        assert!(table.get(&3).is_none());
    }

    #[test]
    fn composition_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut papers = Vec::new();
        for _ in 0..120 {
            let n = rng.gen_range(2..=6);
            papers.push(paper_roles(
                (0..n)
                    .map(|_| match rng.gen_range(0..4) {
                        0 => Role::Lead,
                        1 => Role::DirectSupport,
                        2 => Role::IndirectSupport,
                        _ => Role::Unknown,
                    })
                    .collect(),
            ));
        }
        let table = composition_by_size(&papers, 25);
        for (&size, comp) in &table {
            let mut total = 0usize;
            let mut lead = 0usize;
            for pr in papers.iter().filter(|p| p.team_size() == size) {
                for (_, r) in &pr.roles {
                    total += 1;
                    if *r == Role::Lead {
                        lead += 1;
                    }
                }
            }
            assert_eq!(comp.authors, total);
            assert!((comp.frac_lead - lead as f64 / total as f64).abs() < 1e-15);
            assert!(comp.frac_lead + comp.frac_direct + comp.frac_indirect <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn distribution_single_paper() {
        let lrs = vec![LRatio {
            n: 4,
            n_lead: 2,
            value: 0.5,
            tall: false,
        }];
        let d = lratio_distribution_by_size(&lrs);
        assert_eq!(d.get(&4).unwrap().mean, 0.5);
    }

    #[test]
    fn distribution_two_papers_size_two() {
        let lrs = vec![
            LRatio { n: 2, n_lead: 1, value: 0.5, tall: false },
            LRatio { n: 2, n_lead: 2, value: 1.0, tall: false },
        ];
        let d = lratio_distribution_by_size(&lrs);
        assert_eq!(d.get(&2).unwrap().mean, 0.75);
    }

    #[test]
    fn quantiles_match_sorted_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let lrs: Vec<LRatio> = (0..40)
            .map(|_| {
                let n = 5;
                let n_lead = rng.gen_range(1..=n);
                let value = n_lead as f64 / n as f64;
                LRatio { n, n_lead, value, tall: value < 0.5 }
            })
            .collect();
        let d = lratio_distribution_by_size(&lrs);
        let dist = d.get(&5).unwrap();
        let mut sorted: Vec<f64> = lrs.iter().map(|l| l.value).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // independent quantile recomputation
        let oracle = |q: f64| -> f64 {
            let h = (sorted.len() - 1) as f64 * q;
            let lo = h.floor() as usize;
            let frac = h - lo as f64;
            if lo + 1 < sorted.len() {
                sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
            } else {
                sorted[lo]
            }
        };
        assert!((dist.q1 - oracle(0.25)).abs() < 1e-12);
        assert!((dist.median - oracle(0.5)).abs() < 1e-12);
        assert!((dist.q3 - oracle(0.75)).abs() < 1e-12);
        assert_eq!(dist.histogram.iter().sum::<usize>(), 40);
    }

    #[test]
    fn promotion_rules() {
        let paper = Paper {
            year: 2000,
            venue: "J".into(),
            byline: vec![AuthorIdx(0), AuthorIdx(1), AuthorIdx(2)],
            corresponding: vec![false, true, false],
            refs: vec![],
            topics: vec![],
            statement: None,
        };
        let mut roles = vec![Role::DirectSupport, Role::IndirectSupport, Role::DirectSupport];
        assert!(apply_promotion(&mut roles, &paper, PromoteRule::Corresponding));
        assert_eq!(roles[1], Role::Lead);

        let mut roles = vec![Role::DirectSupport, Role::IndirectSupport, Role::DirectSupport];
        assert!(apply_promotion(&mut roles, &paper, PromoteRule::First));
        assert_eq!(roles[0], Role::Lead);

        // no promotion when a lead exists or rule is none
        let mut roles = vec![Role::Lead, Role::DirectSupport, Role::DirectSupport];
        assert!(!apply_promotion(&mut roles, &paper, PromoteRule::Corresponding));
        let mut roles = vec![Role::DirectSupport; 3];
        assert!(!apply_promotion(&mut roles, &paper, PromoteRule::None));
    }
}
