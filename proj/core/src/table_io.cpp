#include "ecfield/table_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace ecfield {

namespace {

using ordered_json = nlohmann::ordered_json;

// Infinity has no JSON literal; encode it as a string sentinel.
ordered_json json_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

ordered_json sigma_json_object(const CriticalVarianceReport& r) {
    ordered_json j;
    j["sigma_c_sq"] = json_number(r.sigma_c_sq);
    if (r.argmax_t.has_value()) {
        j["argmax_t"] = json_number(*r.argmax_t);
    } else {
        j["argmax_t"] = "local";
    }
    j["attained_locally"] = r.attained_locally;
    j["exponent"] = json_number(r.exponent);
    j["theta_c"] = json_number(r.theta_c);
    j["method"] = to_string(r.method);
    return j;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_diff_csv(std::ostream& out, std::span<const PairedDiffEstimate> rows) {
    out << "u,diff_mean,diff_se,ec_mean,tail_est,n\n";
    for (const auto& r : rows) {
        out << format_double(r.u) << ',' << format_double(r.diff_mean) << ','
            << format_double(r.diff_se) << ',' << format_double(r.ec_mean) << ','
            << format_double(r.tail_est) << ',' << r.n << '\n';
    }
}

void write_simulate_csv(std::ostream& out, std::span<const SimulateRow> rows) {
    out << "u,mean_ec,se_ec,tail_estimate,se_tail,n_paths\n";
    for (const auto& r : rows) {
        out << format_double(r.u) << ',' << format_double(r.mean_ec) << ','
            << format_double(r.se_ec) << ',' << format_double(r.tail_estimate) << ','
            << format_double(r.se_tail) << ',' << r.n_paths << '\n';
    }
}

void write_approx_csv(std::ostream& out, std::span<const EcApproximation> rows) {
    if (rows.empty()) return;
    out << "u";
    for (std::size_t j = 0; j < rows[0].terms.size(); ++j) out << ",term_" << j;
    out << ",p_hat\n";
    for (const auto& r : rows) {
        out << format_double(r.level);
        for (double t : r.terms) out << ',' << format_double(t);
        out << ',' << format_double(r.total) << '\n';
    }
}

void write_eq3_csv(std::ostream& out, std::span<const Eq3Row> bound_rows,
                   std::span<const PairedDiffEstimate> diff_rows) {
    out << "u,bound,diff_mean,diff_se,exceeds_bound\n";
    for (std::size_t i = 0; i < bound_rows.size(); ++i) {
        out << format_double(bound_rows[i].u) << ',' << format_double(bound_rows[i].bound);
        if (i < diff_rows.size()) {
            out << ',' << format_double(diff_rows[i].diff_mean) << ','
                << format_double(diff_rows[i].diff_se) << ','
                << (diff_rows[i].diff_mean > bound_rows[i].bound ? 1 : 0);
        } else {
            out << ",,,";
        }
        out << '\n';
    }
}

std::string sigma_report_json(const CriticalVarianceReport& report) {
    return sigma_json_object(report).dump(2) + "\n";
}

std::string validation_report_json(const ValidationReport& report) {
    ordered_json j;
    j["sigma_c_sq"] = json_number(report.sigma.sigma_c_sq);
    j["attained_locally"] = report.sigma.attained_locally;
    if (report.sigma.argmax_t.has_value()) {
        j["argmax_t"] = json_number(*report.sigma.argmax_t);
    } else {
        j["argmax_t"] = "local";
    }
    j["bound"] = json_number(report.bound);
    if (report.fit.has_value()) {
        j["slope"] = json_number(report.fit->slope);
        j["slope_se"] = json_number(report.fit->slope_se);
        j["points_used"] = report.fit->points_used;
    } else {
        j["slope"] = nullptr;
        j["slope_se"] = nullptr;
        j["points_used"] = 0;
    }
    j["verdict"] = report.verdict;
    j["seed"] = report.seed;
    j["runtime_s"] = json_number(report.runtime_s);
    return j.dump(2) + "\n";
}

std::string rows_json(std::span<const SimulateRow> rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json j;
        j["u"] = json_number(r.u);
        j["mean_ec"] = json_number(r.mean_ec);
        j["se_ec"] = json_number(r.se_ec);
        j["tail_estimate"] = json_number(r.tail_estimate);
        j["se_tail"] = json_number(r.se_tail);
        j["n_paths"] = r.n_paths;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string rows_json(std::span<const EcApproximation> rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json j;
        j["u"] = json_number(r.level);
        ordered_json terms = ordered_json::array();
        for (double t : r.terms) terms.push_back(json_number(t));
        j["terms"] = std::move(terms);
        j["p_hat"] = json_number(r.total);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

}  // namespace ecfield
