use textcontrast::corpus::Group;
use textcontrast::predict::{
    knn_cross_validate, knn_predict, linearly_separable, tsne_embed, LabeledPoint, TsneConfig,
};
use textcontrast::synthetic::cluster_points;
use textcontrast::LabeledPoint64;

fn clusters(seed: u64) -> Vec<LabeledPoint64> {
    cluster_points(20, 10, 5.0, 0.1, seed)
}

fn config(seed: u64) -> TsneConfig {
    TsneConfig {
        seed,
        ..TsneConfig::default()
    }
    .clamped_for(40)
}

#[test]
fn embedding_separates_clusters_and_calibrates() {
    let pts = clusters(1);
    let e = tsne_embed(&pts, &config(1)).unwrap();
    assert_eq!(e.points.len(), 40);
    assert!(e.calibration.iter().all(|c| c.entropy_error <= 1e-4));
    assert!(e.points.iter().all(|p| p.x.is_finite() && p.y.is_finite()));
    assert!(linearly_separable(&e.points));
    assert_eq!(e.points[0].doc_id, pts[0].id);
    assert_eq!(e.points[39].group, Group::B);
}

#[test]
fn same_seed_is_bit_identical() {
    let pts = clusters(2);
    let a = tsne_embed(&pts, &config(5)).unwrap();
    let b = tsne_embed(&pts, &config(5)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn objective_settles() {
    let pts = clusters(3);
    let cfg = config(3);
    let e = tsne_embed(&pts, &cfg).unwrap();
    let at_exaggeration_end = e.kl_trace.iter().find(|(i, _)| *i == cfg.exaggeration_iters).unwrap().1;
    let last = e.kl_trace.last().unwrap();
    assert_eq!(last.0, cfg.iterations);
    assert!(last.1 <= at_exaggeration_end, "{} > {}", last.1, at_exaggeration_end);
    let tail: Vec<f64> = e
        .kl_trace
        .iter()
        .filter(|(i, _)| *i > cfg.iterations - 100)
        .map(|&(_, v)| v)
        .collect();
    assert_eq!(tail.len(), 100);
    for w in tail.windows(2) {
        assert!(w[1] <= w[0] + 1e-6, "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn duplicates_land_together() {
    let mut pts = clusters(4);
    let dup = LabeledPoint::new("dup", pts[3].features.clone(), Group::A);
    pts.push(dup);
    let e = tsne_embed(&pts, &config(4).clamped_for(41)).unwrap();
    let (xs, ys): (Vec<f64>, Vec<f64>) = e.points.iter().map(|p| (p.x, p.y)).unzip();
    let span = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = span(&xs).max(span(&ys));
    let a = &e.points[3];
    let b = e.points.last().unwrap();
    let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt() / scale;
    assert!(d <= 1e-3, "{d}");
}

#[test]
fn infeasible_perplexity_is_rejected() {
    let pts = clusters(0);
    let cfg = TsneConfig::default();
    assert!(tsne_embed(&pts, &cfg).is_err());
    assert!(tsne_embed(&pts[..3], &cfg.clamped_for(3)).is_err());
}

#[test]
fn knn_on_clusters() {
    let pts = clusters(6);
    let cv = knn_cross_validate(&pts, &[1, 3, 5], pts.len(), 0).unwrap();
    assert!(cv.results[0].accuracy >= 0.9);

    let held_out = cluster_points::<f64>(10, 10, 5.0, 0.1, 77);
    let queries: Vec<LabeledPoint64> = held_out
        .iter()
        .map(|p| LabeledPoint::new(p.id.clone(), p.features.clone(), Group::Unknown))
        .collect();
    let preds = knn_predict(&pts, &queries, 3).unwrap();
    let correct = preds.iter().zip(&held_out).filter(|(p, h)| p.group == h.group).count();
    assert!(correct as f64 >= 0.9 * held_out.len() as f64);
}
