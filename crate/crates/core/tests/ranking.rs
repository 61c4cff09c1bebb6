mod common;

use common::rng;
use lensrank::cluster::RawIndex;
use lensrank::composite::{
    rank_views, select_diverse_views, LinearModel, MeasureConfig, MeasureFlag, MeasureVector, Selection,
};
use lensrank::dataset::{AxisPair, LabeledDataset, Provenance};
use lensrank::parallel::Execution;
use rand::seq::SliceRandom;
use rand::Rng;

/// Columns `a`, `b` separate two classes perfectly; `c`, `d` are noise.
fn best_pair_dataset(seed: u64) -> LabeledDataset {
    let mut r = rng(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..60 {
        let cls = i % 2;
        let off = cls as f64 * 2.0;
        rows.push(vec![
            off + r.gen::<f64>() * 0.5,
            off + r.gen::<f64>() * 0.5,
            r.gen::<f64>(),
            r.gen::<f64>(),
        ]);
        labels.push(cls);
    }
    LabeledDataset::new(
        rows,
        labels,
        ["a", "b", "c", "d"].map(String::from).to_vec(),
        vec!["p".into(), "q".into()],
    )
    .unwrap()
}

fn rank(ds: &LabeledDataset, top: usize) -> Vec<(Provenance, f64)> {
    rank_views(ds, &LinearModel::published_visual(), top, &MeasureConfig::default(), Execution::default())
        .unwrap()
        .into_iter()
        .map(|v| (v.provenance, v.phr))
        .collect()
}

#[test]
fn separating_pair_ranks_first() {
    for seed in 0..3 {
        let ranked = rank(&best_pair_dataset(seed), 3);
        assert_eq!(ranked[0].0, Provenance::Axes(AxisPair { x: 0, y: 1 }), "seed {seed}");
        assert!(ranked[0].1 < ranked[1].1);
    }
}

#[test]
fn oversized_top_returns_every_pair() {
    assert_eq!(rank(&best_pair_dataset(0), 100).len(), 6);
}

#[test]
fn duplicated_columns_tie_and_resolve_by_provenance() {
    let base = best_pair_dataset(4);
    let rows: Vec<Vec<f64>> = (0..base.n_rows())
        .map(|i| vec![base.column(0)[i], base.column(0)[i], base.column(2)[i]])
        .collect();
    let ds = LabeledDataset::new(
        rows,
        base.labels().to_vec(),
        ["a", "a2", "c"].map(String::from).to_vec(),
        base.class_names().to_vec(),
    )
    .unwrap();
    let ranked = rank(&ds, 10);
    let phr = |x, y| ranked.iter().find(|r| r.0 == Provenance::Axes(AxisPair { x, y })).unwrap().1;
    assert_eq!(phr(0, 2), phr(1, 2));
    let pos = |x, y| ranked.iter().position(|r| r.0 == Provenance::Axes(AxisPair { x, y })).unwrap();
    assert_eq!(pos(1, 2), pos(0, 2) + 1);
}

#[test]
fn row_order_does_not_change_the_ranking() {
    let ds = best_pair_dataset(5);
    let mut order: Vec<usize> = (0..ds.n_rows()).collect();
    order.shuffle(&mut rng(99));
    let rows = order.iter().map(|&i| (0..4).map(|c| ds.column(c)[i]).collect()).collect();
    let labels = order.iter().map(|&i| ds.labels()[i]).collect();
    let shuffled = LabeledDataset::new(rows, labels, ds.feature_names().to_vec(), ds.class_names().to_vec()).unwrap();
    let a: Vec<_> = rank(&ds, 6).into_iter().map(|r| r.0).collect();
    let b: Vec<_> = rank(&shuffled, 6).into_iter().map(|r| r.0).collect();
    assert_eq!(a, b);
}

fn random_vector(r: &mut impl Rng) -> MeasureVector {
    let mut values = [None; 10];
    for v in &mut values {
        if r.gen_bool(0.9) {
            *v = Some(r.gen::<f64>());
        }
    }
    let raw = RawIndex {
        value: 0.0,
        infinite_ratio: false,
        degenerate: false,
    };
    MeasureVector {
        values,
        flags: [MeasureFlag::Ok; 10],
        raw_db: raw,
        raw_dunn: raw,
    }
}

/// Repeated arg-max over a recount of every view for every bin.
fn selection_oracle(vs: &[MeasureVector], bins: usize, per_bin: usize) -> Vec<Selection> {
    let count = |mv: &MeasureVector, b: usize| {
        mv.values
            .iter()
            .flatten()
            .filter(|&&v| ((v * bins as f64).floor() as usize).min(bins - 1) == b)
            .count()
    };
    let mut taken = vec![false; vs.len()];
    let mut out = Vec::new();
    for b in 0..bins {
        for _ in 0..per_bin {
            let mut best: Option<(usize, usize)> = None;
            for (i, mv) in vs.iter().enumerate() {
                let c = count(mv, b);
                if !taken[i] && c > 0 && best.map_or(true, |(_, bc)| c > bc) {
                    best = Some((i, c));
                }
            }
            if let Some((i, c)) = best {
                taken[i] = true;
                out.push(Selection { bin: b, view: i, count: c });
            }
        }
    }
    out
}

#[test]
fn selection_matches_recount_oracle() {
    let mut r = rng(50);
    for trial in 0..20 {
        let vs: Vec<MeasureVector> = (0..50).map(|_| random_vector(&mut r)).collect();
        for (bins, per_bin) in [(5, 2), (3, 4), (10, 1)] {
            let got = select_diverse_views(&vs, bins, per_bin).unwrap();
            assert_eq!(got, selection_oracle(&vs, bins, per_bin), "trial {trial}");
            assert!(got.len() <= bins * per_bin);
        }
    }
}

#[test]
fn selection_needs_enough_views() {
    let mut r = rng(1);
    let vs: Vec<MeasureVector> = (0..9).map(|_| random_vector(&mut r)).collect();
    assert!(select_diverse_views(&vs, 5, 2).is_err());
}
