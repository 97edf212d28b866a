use collatz_core::analyzer::{
    classify_records, residual_class_table, AnalyzerConfig, ErrorClass, PredictionRecord,
    ResidueStatus,
};
use collatz_core::emulator::{emulate, EmulatedLabel, EmulatedPrediction, EmulationSpec};
use collatz_core::Frontier;

fn records(predictions: &[EmulatedPrediction], base: u32) -> Vec<PredictionRecord> {
    predictions
        .iter()
        .map(|p| PredictionRecord {
            n: p.n,
            target: p.target,
            prediction: p.prediction,
            base,
        })
        .collect()
}

fn same_label(emitted: EmulatedLabel, found: ErrorClass) -> bool {
    match (emitted, found) {
        (EmulatedLabel::Correct, ErrorClass::Correct) => true,
        (EmulatedLabel::PowerOfTwo { l }, ErrorClass::PowerOfTwo { l: m }) => l == m,
        (EmulatedLabel::Hard { a, l }, ErrorClass::Hard { a: b, l: m }) => a == b && l == m,
        _ => false,
    }
}

#[test]
fn classifier_recovers_emulated_labels() {
    let mut spec = EmulationSpec::new(Frontier::canonical(3).unwrap(), 20_000, 11);
    spec.min_n = 1_000_000;
    let predictions = emulate(&spec).unwrap();
    let classified = classify_records(&records(&predictions, 26), &AnalyzerConfig::default());
    let agree = predictions
        .iter()
        .zip(&classified)
        .filter(|(p, c)| same_label(p.label, c.class))
        .count();
    assert!(agree as f64 / predictions.len() as f64 >= 0.99, "{agree}");
}

#[test]
fn residual_pattern_of_first_step() {
    let predictions = emulate(&EmulationSpec::new(
        Frontier::canonical(1).unwrap(),
        20_000,
        3,
    ))
    .unwrap();
    let classified = classify_records(&records(&predictions, 10), &AnalyzerConfig::default());
    let rows = residual_class_table(&classified, 3, &AnalyzerConfig::default()).unwrap();
    let learned: Vec<u64> = rows
        .iter()
        .filter(|r| r.bits == 3 && r.status == ResidueStatus::Learned)
        .map(|r| r.residue)
        .collect();
    assert_eq!(learned, vec![1]);
}
