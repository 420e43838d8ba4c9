#pragma once

// Command dispatch for the regcomply tool. Each command produces a JSON result
// and a flat table (the CSV projection).

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <string>
#include <vector>

#include "regcomply/cli/run_config.hpp"
#include "regcomply/geometry.hpp"
#include "regcomply/ksupport.hpp"
#include "regcomply/optimizer.hpp"
#include "regcomply/oracle.hpp"
#include "regcomply/rip.hpp"
#include "regcomply/sampler.hpp"

namespace regcomply::cli {

inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::json;

// Doubles are emitted with 15 significant digits; infinities as strings.
inline Json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

inline Json num_array(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

// Inverse of num() for reading results back.
inline double parse_num(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct Output {
  Json result;
  Table table;
};

namespace detail {

inline opt::Measure measure_or(const RunConfig& c, opt::Measure fallback) {
  return c.measure.empty() ? fallback : opt::parse_measure(c.measure);
}

inline std::string csv_cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
    return s;
  }
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v.get<double>());
    return buf;
  }
  return v.dump();
}

inline Json report_json(const rip::ComplianceReport& r) {
  Json j = {{"witness", num_array(r.witness)},
            {"method", rip::to_string(r.method)},
            {"certified", r.certified}};
  if (r.oracle_value) j["oracle_value"] = num(*r.oracle_value);
  return j;
}

inline void maybe_certify(const RunConfig& c, rip::ComplianceReport& r, const WeightVector& w,
                          const SparsityModel& model) {
  if (!c.oracle_check) return;
  oracle::GridSpec grid;
  grid.seed = c.seed;
  grid.workers = c.search.workers;
  oracle::certify_report(r, w, model, grid);
}

inline Output measure3d(const RunConfig& c) {
  if (c.n != 3 || c.k != 1) throw ConfigError("measure3d needs n = 3, k = 1");
  Output out;
  out.table.columns = {"w1", "w2", "w3", "area", "published_formula_area", "u", "nu"};
  Json runs = Json::array();
  for (const auto& w : resolve_weights(c)) {
    const auto areas = geometry::cone_areas_3d(w);
    std::array<double, 3> pub{};
    for (std::size_t i = 0; i < 3; ++i) pub[i] = geometry::published_cone_area_3d(w, i);
    const double u = geometry::compliance_uniform_3d(w), nu = geometry::compliance_nonuniform_3d(w);
    runs.push_back({{"weights", num_array(w.values())},
                    {"area", num(areas[0])},
                    {"areas", num_array(areas)},
                    {"published_formula_area", num(pub[0])},
                    {"published_formula_areas", num_array(pub)},
                    {"published_formula_deviation", num(areas[0] - pub[0])},
                    {"u", num(u)},
                    {"nu", num(nu)},
                    {"max_area_axis", geometry::max_area_axis(w) + 1}});
    out.table.rows.push_back(
        {num(w[0]), num(w[1]), num(w[2]), num(areas[0]), num(pub[0]), num(u), num(nu)});
  }
  out.result = {{"runs", runs}};
  return out;
}

inline Output mc(const RunConfig& c) {
  const auto m = measure_or(c, opt::Measure::McU);
  if (m != opt::Measure::McU && m != opt::Measure::McNU)
    throw ConfigError("mc needs measure mc-U or mc-NU");
  const SparsityModel model(c.n, c.k);
  sampler::McOptions o;
  o.count = c.samples;
  o.seed = c.seed;
  o.workers = c.search.workers;
  const auto mode = m == opt::Measure::McU ? sampler::Mode::Uniform : sampler::Mode::NonUniform;
  Output out;
  out.table.columns = {"weights", "estimate", "std_error", "samples", "seed"};
  Json runs = Json::array();
  for (const auto& w : resolve_weights(c)) {
    const auto r = sampler::mc_compliance(w, model, mode, o);
    Json worst = nullptr;
    if (r.worst_support) {
      worst = Json::array();
      for (const auto& e : r.worst_support->entries())
        worst.push_back({{"index", e.index + 1}, {"sign", e.sign}});
    }
    runs.push_back({{"weights", num_array(w.values())},
                    {"measure", opt::to_string(m)},
                    {"estimate", num(r.compliance.estimate)},
                    {"std_error", num(r.compliance.std_error)},
                    {"samples", r.compliance.samples},
                    {"seed", r.compliance.seed},
                    {"supports_evaluated", r.supports_evaluated},
                    {"supports_enumerated", r.supports_enumerated},
                    {"worst_support", worst}});
    out.table.rows.push_back({num_array(w.values()), num(r.compliance.estimate),
                              num(r.compliance.std_error), r.compliance.samples,
                              r.compliance.seed});
  }
  out.result = {{"runs", runs}};
  return out;
}

inline Output rip_nec(const RunConfig& c) {
  const SparsityModel model(c.n, c.k);
  const auto cfg = c.effective_search();
  Output out;
  out.table.columns = {"weights", "B", "gamma", "delta", "method"};
  Json runs = Json::array();
  for (const auto& w : resolve_weights(c)) {
    auto r = rip::gamma_sigma(w, model, cfg);
    maybe_certify(c, r, w, model);
    Json run = report_json(r);
    run["weights"] = num_array(w.values());
    run["B"] = num(r.supremum);
    run["gamma"] = num(r.value);
    run["delta"] = num(*r.delta);
    runs.push_back(run);
    out.table.rows.push_back({num_array(w.values()), num(r.supremum), num(r.value), num(*r.delta),
                              rip::to_string(r.method)});
  }
  out.result = {{"runs", runs}};
  return out;
}

inline Output rip_suff(const RunConfig& c) {
  const SparsityModel model(c.n, c.k);
  const auto cfg = c.effective_search();
  Output out;
  out.table.columns = {"weights", "D", "delta", "method"};
  Json runs = Json::array();
  for (const auto& w : resolve_weights(c)) {
    auto r = rip::delta_suff(w, model, cfg);
    maybe_certify(c, r, w, model);
    Json run = report_json(r);
    run["weights"] = num_array(w.values());
    run["D"] = num(r.supremum);
    run["delta"] = num(r.value);
    runs.push_back(run);
    out.table.rows.push_back(
        {num_array(w.values()), num(r.supremum), num(r.value), rip::to_string(r.method)});
  }
  out.result = {{"runs", runs}};
  return out;
}

inline opt::Measure default_measure(const RunConfig& c) {
  return measure_or(c, c.n == 3 && c.k == 1 ? opt::Measure::NU3 : opt::Measure::RipSuff);
}

inline Output optimize(const RunConfig& c) {
  const auto m = default_measure(c);
  const auto tr = opt::optimize_weights(m, SparsityModel(c.n, c.k), c.effective_search());
  Output out;
  out.table.columns = {"iteration", "w", "value"};
  Json history = Json::array();
  for (const auto& p : tr.history) {
    history.push_back({{"iteration", p.iteration}, {"w", num_array(p.w)}, {"value", num(p.value)}});
    out.table.rows.push_back({p.iteration, num_array(p.w), num(p.value)});
  }
  out.result = {{"measure", tr.measure},
                {"best_w", num_array(tr.best_w.values())},
                {"best_value", num(tr.best_value)},
                {"evaluations", tr.evaluations},
                {"budget_exhausted", tr.budget_exhausted},
                {"history", history}};
  return out;
}

inline Output certify(const RunConfig& c) {
  const auto m = default_measure(c);
  const auto ws = resolve_weights(c);
  if (ws.size() != 1) throw ConfigError("certify needs a single candidate weight vector");
  const auto cert = opt::optimality_certificate(m, ws.front(), SparsityModel(c.n, c.k), c.trials,
                                                c.seed, c.effective_search());
  Output out;
  out.table.columns = {"trial", "w", "value", "margin"};
  Json details = Json::array(), trials = Json::array();
  for (const auto& v : cert.violations)
    details.push_back({{"w", num_array(v.w)}, {"value", num(v.value)}, {"witness", num_array(v.witness)}});
  for (std::size_t t = 0; t < cert.trial_values.size(); ++t) {
    trials.push_back({{"w", num_array(cert.trial_weights[t])}, {"value", num(cert.trial_values[t])}});
    out.table.rows.push_back({t, num_array(cert.trial_weights[t]), num(cert.trial_values[t]),
                              num(cert.candidate_value - cert.trial_values[t])});
  }
  out.result = {{"measure", cert.measure},
                {"candidate", num_array(cert.candidate)},
                {"candidate_value", num(cert.candidate_value)},
                {"trials", cert.trials},
                {"seed", cert.seed},
                {"min_margin", num(cert.min_margin)},
                {"violations", cert.violations.size()},
                {"violation_details", details},
                {"trial_results", trials}};
  return out;
}

inline constexpr double kOracleAgreement = 0.02;

inline Output oracle_battery(const RunConfig& c) {
  std::vector<oracle::BatteryCase> cases;
  if (c.weights == "ones" || parse_random_spec(c.weights)) {
    cases = oracle::standard_battery();
  } else {
    cases.push_back({c.n, c.k, resolve_weights(c).front().vec()});
  }
  oracle::GridSpec grid;
  grid.seed = c.seed;
  grid.workers = c.search.workers;
  const auto cfg = c.effective_search();
  Output out;
  out.table.columns = {"n", "k", "weights", "B", "B_oracle", "B_gap", "D", "D_oracle", "D_gap", "pass"};
  Json rows = Json::array();
  bool all = true;
  for (const auto& bc : cases) {
    const SparsityModel model(bc.n, bc.k);
    const auto w = normalize_weights(bc.w);
    const auto b = rip::B_sigma(w, model, cfg), d = rip::D_sigma(w, model, cfg);
    const auto ob = oracle::brute_B_sigma(w, model, grid), od = oracle::brute_D_sigma(w, model, grid);
    const double gb = oracle::relative_gap(b.value, ob.value), gd = oracle::relative_gap(d.value, od.value);
    const bool pass = gb <= kOracleAgreement && gd <= kOracleAgreement;
    all = all && pass;
    rows.push_back({{"n", bc.n},
                    {"k", bc.k},
                    {"weights", num_array(w.values())},
                    {"B", num(b.value)},
                    {"B_oracle", num(ob.value)},
                    {"B_oracle_witness", num_array(ob.witness)},
                    {"B_gap", num(gb)},
                    {"D", num(d.value)},
                    {"D_oracle", num(od.value)},
                    {"D_oracle_witness", num_array(od.witness)},
                    {"D_gap", num(gd)},
                    {"pass", pass}});
    out.table.rows.push_back({bc.n, bc.k, num_array(w.values()), num(b.value), num(ob.value),
                              num(gb), num(d.value), num(od.value), num(gd), pass});
  }
  out.result = {{"tolerance", num(kOracleAgreement)}, {"all_pass", all}, {"cases", rows}};
  return out;
}

inline Output curves(const RunConfig& c) {
  const std::size_t max_L = c.max_L == 0 ? c.n : c.max_L;
  Output out;
  out.table.columns = {"L", "u", "B_L", "D_L", "gamma_L", "delta_nec_L"};
  Json rows = Json::array();
  for (std::size_t L = 1; L <= max_L; ++L) {
    const double b = rip::B_L_ell1(L, c.k), d = rip::D_L_ell1(L, c.k);
    const double gamma = 1.0 + 1.0 / b;
    const double u = double(L) / double(c.k);
    rows.push_back({{"L", L},
                    {"u", num(u)},
                    {"B_L", num(b)},
                    {"D_L", num(d)},
                    {"gamma_L", num(gamma)},
                    {"delta_nec_L", num(rip::delta_from_gamma(gamma))}});
    out.table.rows.push_back({L, num(u), num(b), num(d), num(gamma), num(rip::delta_from_gamma(gamma))});
  }
  const auto pm = rip::ell1_B_profile_max();
  out.result = {{"k", c.k},
                {"rows", rows},
                {"profile_max", {{"u", num(pm.u)}, {"value", num(pm.value)}}},
                {"delta_suff", num(std::sqrt(1.0 / (rip::D_L_ell1(max_L, c.k) + 1.0)))}};
  return out;
}

}  // namespace detail

inline Output run(const RunConfig& c) {
  c.validate();
  if (c.command == "measure3d") return detail::measure3d(c);
  if (c.command == "mc") return detail::mc(c);
  if (c.command == "rip-nec") return detail::rip_nec(c);
  if (c.command == "rip-suff") return detail::rip_suff(c);
  if (c.command == "optimize") return detail::optimize(c);
  if (c.command == "certify") return detail::certify(c);
  if (c.command == "oracle") return detail::oracle_battery(c);
  return detail::curves(c);
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Full output document: version, timestamp, config echo and result.
inline Json document(const RunConfig& c, const Output& o, const std::string& timestamp) {
  return {{"tool", "regcomply"},
          {"version", kToolVersion},
          {"timestamp", timestamp},
          {"seed", c.seed},
          {"config", to_json(c)},
          {"result", o.result}};
}

inline std::string render_csv(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + detail::csv_cell(row[i]);
    s += '\n';
  }
  return s;
}

inline std::string render(const RunConfig& c, const Output& o, const std::string& timestamp) {
  if (c.format == "csv") return render_csv(o.table);
  return document(c, o, timestamp).dump(2) + "\n";
}

}  // namespace regcomply::cli
