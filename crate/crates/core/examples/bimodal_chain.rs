//! Energy of the multiply chain over random operands, split by operand parity.

use wcec_lab::cli::{bimodal_report, ChainInputs, ExperimentConfig};

fn main() {
    for chain_inputs in [ChainInputs::All, ChainInputs::OddOdd, ChainInputs::EvenA] {
        let cfg = ExperimentConfig { chain_inputs, runs: 10_000, ..ExperimentConfig::default() };
        let (hist, report) = bimodal_report(&cfg, None).unwrap();
        let centers: Vec<String> = report.modes.centers.iter().map(|c| format!("{c:.0}")).collect();
        println!(
            "{chain_inputs:?}: {} bins, {} mode(s) at [{}] pJ, predicted p99.9 {:.0} pJ",
            hist.bins(),
            report.modes.count,
            centers.join(", "),
            report.predicted_p999
        );
    }
}
