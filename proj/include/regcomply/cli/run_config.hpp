#pragma once

// Run configuration for the command-line front end, with JSON round-trip.
// Requires nlohmann/json (vendored as json.hpp).

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "regcomply/core.hpp"
#include "regcomply/errors.hpp"
#include "regcomply/optimizer.hpp"
#include "regcomply/search_config.hpp"

namespace regcomply::cli {

inline constexpr std::string_view kCommands[] = {"measure3d", "mc",      "rip-nec", "rip-suff",
                                                 "optimize",  "certify", "oracle",  "curves"};

inline bool is_command(std::string_view c) {
  return std::find(std::begin(kCommands), std::end(kCommands), c) != std::end(kCommands);
}

struct RunConfig {
  std::string command;
  std::size_t n = 3;
  std::size_t k = 1;
  std::string weights = "ones";  // "ones" | "1,0.5,0.5" | "random:count:seed"
  std::string measure;           // empty: command default
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t trials = 200;
  std::size_t max_L = 0;  // curves; 0 means n
  SearchConfig search;
  std::string out;  // empty: stdout
  std::string format = "json";
  bool oracle_check = false;  // rip-nec / rip-suff: certify against the brute oracle

  void validate() const {
    if (!is_command(command)) throw ConfigError("unknown command '" + command + "'");
    if (n < 1 || k < 1) throw ConfigError("n and k must be >= 1");
    if (samples < 1) throw ConfigError("samples must be >= 1");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (format != "json" && format != "csv") throw ConfigError("format must be json or csv");
    if (!measure.empty()) (void)opt::parse_measure(measure);
    try {
      search.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }

  // Search budgets with the run-level seed and sample count folded in.
  SearchConfig effective_search() const {
    SearchConfig s = search;
    s.seed = seed;
    s.samples = samples;
    return s;
  }

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    auto s = [](const SearchConfig& c) {
      return std::tie(c.restarts, c.grid_steps, c.tolerance, c.max_iters, c.weight_floor,
                      c.workers);
    };
    return a.command == b.command && a.n == b.n && a.k == b.k && a.weights == b.weights &&
           a.measure == b.measure && a.samples == b.samples && a.seed == b.seed &&
           a.trials == b.trials && a.max_L == b.max_L && s(a.search) == s(b.search) &&
           a.out == b.out && a.format == b.format && a.oracle_check == b.oracle_check;
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"n", c.n},
          {"k", c.k},
          {"weights", c.weights},
          {"measure", c.measure},
          {"samples", c.samples},
          {"seed", c.seed},
          {"trials", c.trials},
          {"max_L", c.max_L},
          {"search",
           {{"restarts", c.search.restarts},
            {"grid_steps", c.search.grid_steps},
            {"tolerance", c.search.tolerance},
            {"max_iters", c.search.max_iters},
            {"weight_floor", c.search.weight_floor},
            {"workers", c.search.workers}}},
          {"out", c.out},
          {"format", c.format},
          {"oracle_check", c.oracle_check}};
}

// Missing keys keep the values already in `c`, so a file can be partial.
inline void merge_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    auto get = [&](const nlohmann::json& obj, const char* key, auto& dst) {
      if (obj.contains(key)) obj.at(key).get_to(dst);
    };
    get(j, "command", c.command);
    get(j, "n", c.n);
    get(j, "k", c.k);
    get(j, "weights", c.weights);
    get(j, "measure", c.measure);
    get(j, "samples", c.samples);
    get(j, "seed", c.seed);
    get(j, "trials", c.trials);
    get(j, "max_L", c.max_L);
    get(j, "out", c.out);
    get(j, "format", c.format);
    get(j, "oracle_check", c.oracle_check);
    if (j.contains("search")) {
      const auto& s = j.at("search");
      get(s, "restarts", c.search.restarts);
      get(s, "grid_steps", c.search.grid_steps);
      get(s, "tolerance", c.search.tolerance);
      get(s, "max_iters", c.search.max_iters);
      get(s, "weight_floor", c.search.weight_floor);
      get(s, "workers", c.search.workers);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

inline RunConfig from_json(const nlohmann::json& j) {
  RunConfig c;
  merge_json(c, j);
  return c;
}

// Random weights, written "random:count:seed".
struct RandomWeights {
  std::size_t count;
  std::uint64_t seed;
};

inline std::optional<RandomWeights> parse_random_spec(std::string_view spec) {
  if (!spec.starts_with("random:")) return std::nullopt;
  const auto rest = spec.substr(7);
  const auto colon = rest.find(':');
  if (colon == std::string_view::npos) throw ConfigError("weights: expected random:count:seed");
  RandomWeights r{};
  const auto a = rest.substr(0, colon), b = rest.substr(colon + 1);
  if (std::from_chars(a.data(), a.data() + a.size(), r.count).ec != std::errc{} || r.count < 1 ||
      std::from_chars(b.data(), b.data() + b.size(), r.seed).ec != std::errc{})
    throw ConfigError("weights: bad random spec '" + std::string(spec) + "'");
  return r;
}

inline Vector parse_weight_list(std::string_view spec) {
  Vector out;
  std::stringstream ss{std::string(spec)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("weights: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("weights: empty list");
  return out;
}

// Resolves the weights string to normalized weight vectors of dimension n.
inline std::vector<WeightVector> resolve_weights(const RunConfig& c) {
  if (c.weights == "ones") return {WeightVector::ones(c.n)};
  if (auto r = parse_random_spec(c.weights)) {
    std::vector<WeightVector> ws;
    for (std::size_t i = 0; i < r->count; ++i)
      ws.push_back(opt::random_weights(c.n, r->seed, i, c.search.weight_floor));
    return ws;
  }
  const Vector raw = parse_weight_list(c.weights);
  check_dimension(c.n, raw.size());
  return {normalize_weights(raw)};
}

}  // namespace regcomply::cli
