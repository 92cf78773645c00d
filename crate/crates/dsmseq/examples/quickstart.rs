//! Minimal library tour: load a case, rank it, score it, improve it.

use dsmseq::ga::{ga_run, GaPreset};
use dsmseq::rankers::{rank, RankerKind};
use dsmseq::{feedback_count, load_case};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let case = load_case("data/cases/conveyor_8.json")?;
    let ranked = rank(&case, RankerKind::Visibility, None, 0)?;
    let score = feedback_count(&case, &ranked)?;
    println!("visibility ranking: {} feedback marks", score);

    let (best, _trace) = ga_run(&case, &GaPreset::Balanced.config(0))?;
    println!("ga-balanced:        {} feedback marks", best.score);
    assert!(best.score <= score);
    Ok(())
}
