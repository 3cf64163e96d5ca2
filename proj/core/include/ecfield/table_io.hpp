#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ecfield/critical_variance.hpp"
#include "ecfield/experiment.hpp"

namespace ecfield {

// Deterministic double formatting ("%.17g"), shared by every emitter so that
// equal runs produce byte-identical files.
std::string format_double(double v);

// diff.csv: u,diff_mean,diff_se,ec_mean,tail_est,n
void write_diff_csv(std::ostream& out, std::span<const PairedDiffEstimate> rows);

// simulate.csv: u,mean_ec,se_ec,tail_estimate,se_tail,n_paths
void write_simulate_csv(std::ostream& out, std::span<const SimulateRow> rows);

// approx.csv: u,term_0..term_k,p_hat
void write_approx_csv(std::ostream& out, std::span<const EcApproximation> rows);

// eq3.csv: u,bound,diff_mean,diff_se,exceeds_bound
void write_eq3_csv(std::ostream& out, std::span<const Eq3Row> bound_rows,
                   std::span<const PairedDiffEstimate> diff_rows);

// JSON emitters. Infinite values are encoded as the string "inf"; absent
// optional fields as null. Key order follows the documented schema.
std::string sigma_report_json(const CriticalVarianceReport& report);
std::string validation_report_json(const ValidationReport& report);

std::string rows_json(std::span<const SimulateRow> rows);
std::string rows_json(std::span<const EcApproximation> rows);

}  // namespace ecfield
