//! End to end on a synthetic corpus with the built-in taxonomy: the pipeline
//! must reproduce the generator's ground truth exactly.

use std::collections::{BTreeMap, BTreeSet};

use jobpulse::files::load_taxonomy;
use jobpulse_core::dedup::Weight;
use jobpulse_core::employers::Canonicalizer;
use jobpulse_core::pipeline::{match_all, run, PipelineConfig};
use jobpulse_core::synth::{generate, SynthConfig};
use jobpulse_core::taxonomy::JstId;
use jobpulse_core::Region;

#[test]
fn pipeline_recovers_ground_truth() {
    let (taxonomy, _) = load_taxonomy(None).unwrap();
    let cfg = SynthConfig { seed: 11, n_postings: 4000, ..Default::default() };
    let synth = generate(&cfg, &taxonomy).unwrap();
    let out = run(&synth.postings, &taxonomy, &Canonicalizer::new(cfg.dictionary.clone()), &PipelineConfig::default())
        .unwrap();

    let key = |region: Region, id: &str| (region, id.to_string());
    let truth: BTreeMap<_, _> = synth.truth.iter().map(|t| (key(t.region, &t.job_id), t)).collect();

    // every posting matches exactly its planted terms
    let all = match_all(&synth.postings, &taxonomy);
    assert_eq!(all.len(), synth.truth.len());
    for r in &all {
        let t = truth[&key(r.region, &r.job_id)];
        assert_eq!(r.jst_ids().collect::<Vec<_>>(), t.jsts, "{}", r.job_id);
    }
    assert_eq!(out.matched_postings, all.len());
    let in_industry = synth.truth.iter().filter(|t| !t.off_industry).count();
    assert_eq!(out.records.len(), in_industry);

    // only in-industry postings become units, each spread as 1/k
    let mut per_unit: BTreeMap<(Region, String), Vec<(JstId, Weight)>> = BTreeMap::new();
    for a in &out.ledger.assignments {
        let u = out.ledger.unit(a);
        per_unit.entry(key(u.region, &u.job_id)).or_default().push((a.jst, a.weight));
    }
    let kept: BTreeSet<_> = truth.iter().filter(|(_, t)| !t.off_industry).map(|(k, _)| k.clone()).collect();
    assert_eq!(per_unit.keys().cloned().collect::<BTreeSet<_>>(), kept);
    for (k, assigned) in &per_unit {
        let t = truth[k];
        let k_terms = t.jsts.len() as u64;
        assert_eq!(assigned.iter().map(|a| a.0).collect::<Vec<_>>(), t.jsts);
        assert!(assigned.iter().all(|a| a.1 == Weight::new(1, k_terms)));
    }

    // canonical groups coincide with the underlying companies
    let mut company_of_group: BTreeMap<usize, usize> = BTreeMap::new();
    let mut group_of_company: BTreeMap<usize, usize> = BTreeMap::new();
    for t in truth.values().filter(|t| !t.off_industry) {
        let g = out.mapping.index_of(&t.employer_name).expect("mapped");
        assert_eq!(*company_of_group.entry(g).or_insert(t.employer_company), t.employer_company);
        assert_eq!(*group_of_company.entry(t.employer_company).or_insert(g), g);
        assert_eq!(out.mapping.employers[g].canonical_name, t.employer_canonical);
    }
    assert!(out.employers.unattributed_units == num_traits::Zero::zero());

    // cross-region copies are found as groups and nothing else is
    let planted: BTreeSet<usize> = synth.truth.iter().filter_map(|t| t.cross_region_group).collect();
    assert_eq!(out.cross_region.len(), planted.len());
    for g in &out.cross_region {
        let ids: BTreeSet<_> = g.members.iter().map(|(r, id)| truth[&key(*r, id)].cross_region_group).collect();
        assert_eq!(ids.len(), 1);
        assert!(ids.iter().next().unwrap().is_some());
    }
}
