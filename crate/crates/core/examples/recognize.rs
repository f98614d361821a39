//! Closed-form recognition of decimal values in quantum integers at q = e^{iπ/12}.
use cellforge::solver::RecognitionDictionary;

fn main() {
    let dict = RecognitionDictionary::default();
    println!("{} dictionary entries up to complexity {}", dict.len(), dict.bound);
    let xs: Vec<f64> = match std::env::args().skip(1).map(|s| s.parse()).collect::<Result<Vec<f64>, _>>() {
        Ok(v) if !v.is_empty() => v,
        _ => vec![1.931852, 0.366025, 0.896575, 0.239691, 1.692705],
    };
    for x in xs {
        println!("{}", dict.recognize(x));
    }
}
