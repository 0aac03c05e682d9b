// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lapa/assignment.hpp"
#include "lapa/geometry.hpp"
#include "lapa/harness.hpp"
#include "lapa/interference.hpp"
#include "lapa/pilots.hpp"
#include "lapa/version.hpp"

namespace lapa {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form; locale-free and deterministic, so
// repeated runs emit byte-identical files.
inline std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---- user drops -----------------------------------------------------------

// Drop file schema: { "users": [ { "r": meters, "theta": radians,
// "k_factor": linear }, ... ] }. User identifiers are positions in the list
// (1-based in messages and reports).
inline UserDrop drop_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("users") || !j["users"].is_array())
    throw std::invalid_argument("drop file: expected an object with a \"users\" array");
  std::vector<UserLocation> users;
  users.reserve(j["users"].size());
  std::size_t index = 1;
  for (const auto& entry : j["users"]) {
    const std::string label = "users[" + std::to_string(index) + "]";
    if (!entry.is_object()) throw std::invalid_argument(label + ": expected an object");
    for (const char* field : {"r", "theta", "k_factor"})
      if (!entry.contains(field) || !entry[field].is_number())
        throw std::invalid_argument(label + "." + field + ": missing or not a number");
    users.push_back({entry["r"].get<double>(), entry["theta"].get<double>(),
                     entry["k_factor"].get<double>()});
    ++index;
  }
  return UserDrop(std::move(users));  // range checks happen here
}

inline Json drop_to_json(const UserDrop& drop) {
  Json users = Json::array();
  for (const auto& u : drop.users())
    users.push_back({{"r", u.r}, {"theta", u.theta}, {"k_factor", u.k_factor}});
  return Json{{"users", std::move(users)}};
}

inline UserDrop load_drop_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("drop file " + path + ": " + e.what());
  }
  return drop_from_json(j);
}

// ---- pilot assignments -----------------------------------------------------

// Wire format: { "tau": int, "groups": [[1-based user indices]] }.
inline Json assignment_to_json(const PilotAssignment& assignment) {
  Json groups = Json::array();
  for (const auto& group : assignment.groups()) {
    Json g = Json::array();
    for (int user : group) g.push_back(user + 1);
    groups.push_back(std::move(g));
  }
  return Json{{"tau", assignment.tau()}, {"groups", std::move(groups)}};
}

inline PilotAssignment assignment_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("tau") || !j.contains("groups") ||
      !j["tau"].is_number_integer() || !j["groups"].is_array())
    throw std::invalid_argument(
        "assignment: expected an object with integer \"tau\" and array \"groups\"");
  const int tau = j["tau"].get<int>();
  std::vector<std::vector<int>> groups;
  int n_users = 0;
  for (const auto& g : j["groups"]) {
    if (!g.is_array()) throw std::invalid_argument("assignment: groups must be arrays");
    std::vector<int> group;
    for (const auto& user : g) {
      if (!user.is_number_integer())
        throw std::invalid_argument("assignment: user indices must be integers");
      group.push_back(user.get<int>() - 1);
      ++n_users;
    }
    groups.push_back(std::move(group));
  }
  const auto violations = validate_groups(tau, groups, n_users);
  if (!violations.empty()) throw std::invalid_argument("assignment: " + violations.front());
  return PilotAssignment(tau, std::move(groups));
}

// T-matrix CSV: column m lists the (1-based) users assigned pilot m, one
// tier per row; short groups leave trailing cells empty.
inline std::string t_matrix_csv(const PilotAssignment& assignment) {
  std::size_t depth = 0;
  for (const auto& group : assignment.groups()) depth = std::max(depth, group.size());

  std::ostringstream out;
  for (int m = 0; m < assignment.tau(); ++m) {
    if (m > 0) out << ',';
    out << "pilot_" << (m + 1);
  }
  out << '\n';
  for (std::size_t row = 0; row < depth; ++row) {
    for (int m = 0; m < assignment.tau(); ++m) {
      if (m > 0) out << ',';
      const auto& group = assignment.groups()[static_cast<std::size_t>(m)];
      if (row < group.size()) out << group[row] + 1;
    }
    out << '\n';
  }
  return out.str();
}

// ---- interference reports ---------------------------------------------------

inline Json interference_report_to_json(const InterferenceReport& report) {
  Json pairs = Json::array();
  for (const auto& p : report.pairs)
    pairs.push_back({{"n", p.n + 1}, {"i", p.i + 1}, {"value", p.value}});
  Json j{{"pairs", std::move(pairs)}, {"total", report.total}};
  if (report.total_db)
    j["total_db"] = *report.total_db;
  else
    j["total_db"] = nullptr;
  return j;
}

// ---- experiment records ------------------------------------------------------

inline std::string records_to_csv(const std::vector<ExperimentRecord>& records,
                                  std::string_view kind, std::uint64_t master_seed) {
  std::ostringstream out;
  out << "# lapa " << version << " kind=" << kind << " master_seed=" << master_seed << '\n';
  out << "m,scheme,i_tot,i_tot_db,sum_rate,trials,seed\n";
  for (const auto& r : records) {
    out << r.m_antennas << ',' << r.scheme << ',';
    if (r.mean_i_tot) out << format_double(*r.mean_i_tot);
    out << ',';
    if (r.mean_i_tot_db) out << format_double(*r.mean_i_tot_db);
    out << ',';
    if (r.mean_sum_rate) out << format_double(*r.mean_sum_rate);
    out << ',' << r.trials << ',' << r.seed << '\n';
  }
  return out.str();
}

inline Json records_to_json(const std::vector<ExperimentRecord>& records) {
  Json out = Json::array();
  for (const auto& r : records) {
    Json j{{"m", r.m_antennas}, {"scheme", r.scheme}};
    j["i_tot"] = r.mean_i_tot ? Json(*r.mean_i_tot) : Json(nullptr);
    j["i_tot_db"] = r.mean_i_tot_db ? Json(*r.mean_i_tot_db) : Json(nullptr);
    j["sum_rate"] = r.mean_sum_rate ? Json(*r.mean_sum_rate) : Json(nullptr);
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    out.push_back(std::move(j));
  }
  return out;
}

inline std::string kernel_csv(const std::vector<std::pair<double, double>>& sweep) {
  std::ostringstream out;
  out << "d_theta,value\n";
  for (const auto& [d_theta, value] : sweep)
    out << format_double(d_theta) << ',' << format_double(value) << '\n';
  return out.str();
}

// ---- configuration -----------------------------------------------------------

// K-factor values accept an explicit dB suffix ("4.77dB"); bare numbers are
// linear.
inline double parse_k_factor(std::string_view text) {
  std::string s(text);
  bool db = false;
  if (s.size() >= 2) {
    const std::string tail = s.substr(s.size() - 2);
    if (tail == "dB" || tail == "db" || tail == "DB") {
      db = true;
      s = s.substr(0, s.size() - 2);
    }
  }
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument("k_factor: cannot parse \"" + std::string(text) + "\"");
  }
  if (consumed != s.size())
    throw std::invalid_argument("k_factor: trailing characters in \"" + std::string(text) + "\"");
  return db ? from_db(value) : value;
}

inline std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> values;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stoi(item));
  }
  return values;
}

namespace detail {

inline void apply_config_entry(ExperimentConfig& config, const std::string& key,
                               const std::string& value) {
  if (key == "n_users") config.n_users = std::stoi(value);
  else if (key == "tau") config.tau = std::stoi(value);
  else if (key == "coherence_t") config.coherence_t = std::stoi(value);
  else if (key == "pathloss_exponent") config.pathloss_exponent = std::stod(value);
  else if (key == "cell_radius_m") config.cell_radius_m = std::stod(value);
  else if (key == "r_min_m") config.r_min_m = std::stod(value);
  else if (key == "k_factor") config.k_factor = parse_k_factor(value);
  else if (key == "p_u") config.p_u = std::stod(value);
  else if (key == "antenna_spacing_ratio") config.antenna_spacing_ratio = std::stod(value);
  else if (key == "m_sweep") config.m_sweep = parse_int_list(value);
  else if (key == "trials_interference") config.trials_interference = std::stoi(value);
  else if (key == "trials_rate") config.trials_rate = std::stoi(value);
  else if (key == "fading_realizations") config.fading_realizations = std::stoi(value);
  else if (key == "master_seed") config.master_seed = std::stoull(value);
  else if (key == "threads") config.threads = std::stoi(value);
  else if (key == "detector") {
    if (value == "mf") config.detector = Detector::normalized_mf;
    else if (value == "zf") config.detector = Detector::pseudo_inverse_zf;
    else throw std::invalid_argument("detector must be \"mf\" or \"zf\"");
  } else if (key == "matching") {
    if (value == "greedy") config.matching = MatchPolicy::greedy;
    else if (value == "optimal") config.matching = MatchPolicy::optimal;
    else throw std::invalid_argument("matching must be \"greedy\" or \"optimal\"");
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

inline std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

}  // namespace detail

// Flat key-value config file: one `key = value` per line, `#` starts a
// comment. Keys mirror the ExperimentConfig fields (documented in the
// README).
inline void apply_config_file(ExperimentConfig& config, const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected `key = value`");
    const std::string key = detail::trim(trimmed.substr(0, eq));
    const std::string value = detail::trim(trimmed.substr(eq + 1));
    try {
      detail::apply_config_entry(config, key, value);
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": bad value for " + key);
    }
  }
}

inline Json config_to_json(const ExperimentConfig& config) {
  return Json{
      {"n_users", config.n_users},
      {"tau", config.tau},
      {"coherence_t", config.coherence_t},
      {"pathloss_exponent", config.pathloss_exponent},
      {"cell_radius_m", config.cell_radius_m},
      {"r_min_m", config.r_min_m},
      {"k_factor", config.k_factor},
      {"p_u", config.p_u},
      {"antenna_spacing_ratio", config.antenna_spacing_ratio},
      {"m_sweep", config.m_sweep},
      {"trials_interference", config.trials_interference},
      {"trials_rate", config.trials_rate},
      {"fading_realizations", config.fading_realizations},
      {"master_seed", config.master_seed},
      {"detector", config.detector == Detector::normalized_mf ? "mf" : "zf"},
      {"matching", config.matching == MatchPolicy::greedy ? "greedy" : "optimal"},
  };
}

inline ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig config;
  config.n_users = j.at("n_users").get<int>();
  config.tau = j.at("tau").get<int>();
  config.coherence_t = j.at("coherence_t").get<int>();
  config.pathloss_exponent = j.at("pathloss_exponent").get<double>();
  config.cell_radius_m = j.at("cell_radius_m").get<double>();
  config.r_min_m = j.at("r_min_m").get<double>();
  config.k_factor = j.at("k_factor").get<double>();
  config.p_u = j.at("p_u").get<double>();
  config.antenna_spacing_ratio = j.at("antenna_spacing_ratio").get<double>();
  config.m_sweep = j.at("m_sweep").get<std::vector<int>>();
  config.trials_interference = j.at("trials_interference").get<int>();
  config.trials_rate = j.at("trials_rate").get<int>();
  config.fading_realizations = j.at("fading_realizations").get<int>();
  config.master_seed = j.at("master_seed").get<std::uint64_t>();
  const std::string detector = j.at("detector").get<std::string>();
  config.detector = detector == "zf" ? Detector::pseudo_inverse_zf : Detector::normalized_mf;
  const std::string matching = j.at("matching").get<std::string>();
  config.matching = matching == "optimal" ? MatchPolicy::optimal : MatchPolicy::greedy;
  return config;
}

// ---- run manifests -------------------------------------------------------------

// Everything needed to reproduce a run byte-for-byte: resolved config, seed,
// kind and output locations. Worker-thread count is intentionally absent
// (it never changes results).
inline Json make_manifest(std::string_view kind, const ExperimentConfig& config,
                          const std::map<std::string, std::string>& outputs) {
  char stamp[32] = {0};
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);

  Json out_json = Json::object();
  for (const auto& [name, path] : outputs) out_json[name] = path;
  return Json{
      {"tool", "lapa"},         {"version", version},     {"kind", std::string(kind)},
      {"created_utc", stamp},   {"master_seed", config.master_seed},
      {"config", config_to_json(config)}, {"outputs", std::move(out_json)},
  };
}

inline ExperimentConfig config_from_manifest(const Json& manifest) {
  if (!manifest.is_object() || !manifest.contains("config"))
    throw std::invalid_argument("manifest: missing \"config\" object");
  return config_from_json(manifest.at("config"));
}

}  // namespace lapa
