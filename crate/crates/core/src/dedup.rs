//! One unit of demand per `(job_id, region)`, split equally across the
//! JSTs that hit the posting.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;

use crate::corpus::{Posting, Region};
use crate::matcher::MatchRecord;
use crate::taxonomy::JstId;
use crate::text::normalize_text;

/// Per-assignment weight, always `1/k`.
pub type Weight = Ratio<u64>;

pub fn to_big(w: Weight) -> BigRational {
    BigRational::new(BigInt::from(*w.numer()), BigInt::from(*w.denom()))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DedupError {
    #[error("job {job_id} in {region} has more than one match record")]
    DuplicateUnit { job_id: String, region: Region },
    #[error("job {job_id} in {region} has a match record with no JSTs")]
    EmptyRecord { job_id: String, region: Region },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DemandUnit {
    pub job_id: String,
    pub region: Region,
    pub employer_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAssignment {
    /// Index into [`DemandLedger::units`].
    pub unit: usize,
    pub jst: JstId,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DemandLedger {
    /// Sorted by `(region, job_id)`.
    pub units: Vec<DemandUnit>,
    /// Grouped by unit, JST ascending within a unit.
    pub assignments: Vec<WeightedAssignment>,
}

impl DemandLedger {
    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    /// Exact sum of every weight.
    pub fn total(&self) -> BigRational {
        // Σ 1/k computed as Σ (count_k / k): one rational add per distinct k.
        let mut by_den: BTreeMap<u64, u64> = BTreeMap::new();
        for a in &self.assignments {
            *by_den.entry(*a.weight.denom()).or_default() += *a.weight.numer();
        }
        by_den
            .into_iter()
            .fold(BigRational::zero(), |acc, (den, num)| acc + BigRational::new(num.into(), den.into()))
    }

    pub fn unit(&self, a: &WeightedAssignment) -> &DemandUnit {
        &self.units[a.unit]
    }
}

/// Split each record's unit of demand equally across its JSTs.
pub fn weight_assignments(records: &[MatchRecord]) -> Result<DemandLedger, DedupError> {
    let mut order: Vec<&MatchRecord> = records.iter().collect();
    order.sort_by(|a, b| (a.region, &a.job_id).cmp(&(b.region, &b.job_id)));

    let mut ledger = DemandLedger::default();
    for (i, r) in order.iter().enumerate() {
        if i > 0 && order[i - 1].region == r.region && order[i - 1].job_id == r.job_id {
            return Err(DedupError::DuplicateUnit { job_id: r.job_id.clone(), region: r.region });
        }
        let jsts: BTreeSet<JstId> = r.jst_ids().collect();
        if jsts.is_empty() {
            return Err(DedupError::EmptyRecord { job_id: r.job_id.clone(), region: r.region });
        }
        let weight = Weight::new(1, jsts.len() as u64);
        let unit = ledger.units.len();
        ledger.units.push(DemandUnit {
            job_id: r.job_id.clone(),
            region: r.region,
            employer_name: r.employer_name.clone(),
        });
        ledger.assignments.extend(jsts.into_iter().map(|jst| WeightedAssignment { unit, jst, weight }));
    }
    Ok(ledger)
}

/// Postings with identical normalized title and description that appear in
/// more than one region. Each member stays its own demand unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossRegionGroup {
    /// Sorted by `(region, job_id)`.
    pub members: Vec<(Region, String)>,
}

type TextKey = (Vec<String>, Vec<String>);

pub fn cross_region_groups<'a>(postings: impl IntoIterator<Item = &'a Posting>) -> Vec<CrossRegionGroup> {
    let mut groups: BTreeMap<TextKey, Vec<(Region, String)>> = BTreeMap::new();
    for p in postings {
        let key = (normalize_text(&p.title), normalize_text(&p.job_description));
        groups.entry(key).or_default().push((p.region, p.job_id.clone()));
    }
    let mut out: Vec<CrossRegionGroup> = groups
        .into_values()
        .filter(|m| m.iter().map(|(r, _)| r).collect::<BTreeSet<_>>().len() > 1)
        .map(|mut members| {
            members.sort();
            CrossRegionGroup { members }
        })
        .collect();
    out.sort_by(|a, b| a.members.cmp(&b.members));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::JstHit;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec;
    use chrono::NaiveDate;
    use num_traits::One;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn record(job: &str, region: Region, jsts: &[u32]) -> MatchRecord {
        MatchRecord {
            job_id: job.to_string(),
            region,
            employer_name: "Acme".to_string(),
            hits: jsts.iter().map(|&j| JstHit { jst: JstId(j), in_title: false }).collect(),
        }
    }

    fn posting(job: &str, region: Region, title: &str, desc: &str) -> Posting {
        Posting {
            job_id: job.to_string(),
            title: title.to_string(),
            job_description: desc.to_string(),
            employer_name: String::new(),
            employer_description: String::new(),
            region,
            retrieved_at: NaiveDate::from_ymd_opt(2025, 4, 1).unwrap(),
        }
    }

    #[test]
    fn two_jsts_split_in_half() {
        let l = weight_assignments(&[record("1", Region::LosAngeles, &[0, 1])]).unwrap();
        assert_eq!(l.assignments.len(), 2);
        assert!(l.assignments.iter().all(|a| a.weight == Weight::new(1, 2)));
        assert_eq!(l.total(), BigRational::one());
    }

    #[test]
    fn single_jst_gets_unit_weight() {
        let l = weight_assignments(&[record("1", Region::SanDiego, &[3])]).unwrap();
        assert_eq!(l.assignments, vec![WeightedAssignment { unit: 0, jst: JstId(3), weight: Weight::new(1, 1) }]);
    }

    #[test]
    fn duplicate_unit_is_an_error() {
        let recs = [record("1", Region::LosAngeles, &[0]), record("1", Region::LosAngeles, &[1])];
        assert!(matches!(weight_assignments(&recs), Err(DedupError::DuplicateUnit { .. })));
        let ok = [record("1", Region::LosAngeles, &[0]), record("1", Region::SanDiego, &[1])];
        assert_eq!(weight_assignments(&ok).unwrap().unit_count(), 2);
    }

    #[test]
    fn generated_records_match_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut records = Vec::new();
        let mut truth: BTreeMap<u32, BigRational> = BTreeMap::new();
        for i in 0..500 {
            let k = rng.random_range(1..=5usize);
            let mut pool: Vec<u32> = (0..20).collect();
            pool.shuffle(&mut rng);
            let mut planted = pool[..k].to_vec();
            planted.sort();
            for &j in &planted {
                *truth.entry(j).or_insert_with(BigRational::zero) += BigRational::new(BigInt::one(), BigInt::from(k));
            }
            records.push(record(&format!("{i}"), Region::ALL[i % 3], &planted));
        }
        let l = weight_assignments(&records).unwrap();
        let mut got: BTreeMap<u32, BigRational> = BTreeMap::new();
        for a in &l.assignments {
            *got.entry(a.jst.0).or_insert_with(BigRational::zero) += to_big(a.weight);
        }
        assert_eq!(got, truth);
        assert_eq!(l.total(), BigRational::from_integer(BigInt::from(500)));
    }

    #[test]
    fn cross_region_repeats_stay_separate_units() {
        let ps = [
            posting("a", Region::LosAngeles, "Layout Engineer", "Semiconductor layout engineer."),
            posting("b", Region::SanDiego, "layout engineer", "semiconductor LAYOUT engineer"),
            posting("c", Region::LosAngeles, "Design Engineer", "x"),
        ];
        let groups = cross_region_groups(&ps);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].members, vec![(Region::LosAngeles, "a".to_string()), (Region::SanDiego, "b".to_string())]);
        let recs = [record("a", Region::LosAngeles, &[0]), record("b", Region::SanDiego, &[0])];
        assert_eq!(weight_assignments(&recs).unwrap().unit_count(), 2);
    }

    #[test]
    fn no_repeats_no_groups() {
        let ps = [
            posting("a", Region::LosAngeles, "t", "d1"),
            posting("b", Region::LosAngeles, "t", "d1"),
            posting("c", Region::SanDiego, "t", "d2"),
        ];
        // same-region copies are not cross-region
        assert!(cross_region_groups(&ps).is_empty());
    }

    fn arb_records() -> impl Strategy<Value = Vec<MatchRecord>> {
        proptest::collection::btree_map((0..60u32, 0..3usize), proptest::collection::btree_set(0..12u32, 1..6), 0..80)
            .prop_map(|m| m.into_iter().map(|((j, r), s)| record(&format!("J{j}"), Region::ALL[r], &s.into_iter().collect::<Vec<_>>())).collect())
    }

    proptest! {
        #[test]
        fn unit_mass_is_conserved_exactly(records in arb_records()) {
            let l = weight_assignments(&records).unwrap();
            let mut per_unit = vec![BigRational::zero(); l.unit_count()];
            for a in &l.assignments {
                per_unit[a.unit] += to_big(a.weight);
            }
            prop_assert!(per_unit.iter().all(|s| s.is_one()));
            prop_assert_eq!(l.total(), BigRational::from_integer(BigInt::from(records.len())));
        }

        #[test]
        fn permutation_invariant(records in arb_records(), seed in any::<u64>()) {
            let mut shuffled = records.clone();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(weight_assignments(&records).unwrap(), weight_assignments(&shuffled).unwrap());
        }

        #[test]
        fn adding_a_jst_touches_only_that_record(records in arb_records(), pick in any::<prop::sample::Index>()) {
            prop_assume!(!records.is_empty());
            let i = pick.index(records.len());
            let mut grown = records.clone();
            let next = grown[i].hits.iter().map(|h| h.jst.0).max().unwrap() + 1;
            grown[i].hits.push(JstHit { jst: JstId(next), in_title: false });
            let (a, b) = (weight_assignments(&records).unwrap(), weight_assignments(&grown).unwrap());
            let key = (records[i].region, records[i].job_id.clone());
            let weights = |l: &DemandLedger| -> BTreeMap<(Region, String, u32), Weight> {
                l.assignments.iter().filter(|x| (l.unit(x).region, l.unit(x).job_id.clone()) != key)
                    .map(|x| ((l.unit(x).region, l.unit(x).job_id.clone(), x.jst.0), x.weight)).collect()
            };
            prop_assert_eq!(weights(&a), weights(&b));
        }
    }
}
