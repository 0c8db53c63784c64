//! k-NN and Nadaraya-Watson conditional means, plus the odd/even cross-fit split.

use k2st::regression::crossfit_split;
use k2st::{Bandwidth, KnnK, Points, Predictor, Regressor, RegressorSpec};

fn main() -> k2st::Result<()> {
    let v: Vec<f64> = (0..40).map(|i| i as f64 / 4.0).collect();
    let r: Vec<f64> = v.iter().map(|x| x.sin()).collect();
    let covariates = Points::from_scalars(&v);
    let queries = Points::from_scalars(&[1.1, 4.7, 8.0]);

    for spec in [
        RegressorSpec::Knn(KnnK::Fixed(3)),
        RegressorSpec::Knn(KnnK::Auto),
        RegressorSpec::NadarayaWatson(Bandwidth::Fixed(0.3)),
        RegressorSpec::NadarayaWatson(Bandwidth::MedianHeuristic),
    ] {
        let fitted = spec.fit(&covariates, &r)?;
        let pred = fitted.predict_many(&queries)?;
        println!("{:<22} {:?} -> {pred:.3?}", spec.label(), fitted.hyperparameters());
    }
    println!("truth                  {:.3?}", [1.1f64.sin(), 4.7f64.sin(), 8.0f64.sin()]);

    let folds = crossfit_split(5, 3)?;
    let (a, b) = folds.global_positions();
    println!("cross-fit folds over 5 labeled + 3 unlabeled: a = {a:?}, b = {b:?}");
    Ok(())
}
