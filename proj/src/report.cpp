#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "whitham/experiments.hpp"

namespace whitham {

namespace {

bool compare(double value, const std::string& relation, double threshold) {
  if (relation == "<=") return value <= threshold;
  if (relation == "<") return value < threshold;
  if (relation == ">=") return value >= threshold;
  if (relation == ">") return value > threshold;
  throw std::logic_error("unknown relation " + relation);
}

std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void render(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::number_float:
      out += number(j.get<double>());
      return;
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(key).dump() + (indent > 0 ? ": " : ":");
        render(value, indent, depth + 1, out);
      }
      out += nl + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      bool first = true;
      for (const auto& value : j) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        render(value, indent, depth + 1, out);
      }
      out += nl + close_pad + "]";
      return;
    }
    default:
      out += j.dump();
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const Verdict& ExperimentReport::add_verdict(const std::string& name, double value,
                                             const std::string& relation,
                                             const std::string& threshold_key) {
  if (!params.contains(threshold_key) || !params[threshold_key].is_number()) {
    throw std::logic_error("verdict " + name + " refers to missing threshold " + threshold_key);
  }
  const double threshold = params[threshold_key].get<double>();
  verdicts.push_back({name, compare(value, relation, threshold), value, relation, threshold_key,
                      threshold});
  return verdicts.back();
}

const Verdict& ExperimentReport::add_check(const std::string& name, bool passed, double value,
                                           const std::string& relation,
                                           const std::string& threshold_key) {
  if (!params.contains(threshold_key) || !params[threshold_key].is_number()) {
    throw std::logic_error("verdict " + name + " refers to missing threshold " + threshold_key);
  }
  verdicts.push_back({name, passed, value, relation, threshold_key,
                      params[threshold_key].get<double>()});
  return verdicts.back();
}

const SlopeRecord& ExperimentReport::add_slope(const std::string& name, const SlopeFit& fit,
                                               std::optional<double> target) {
  slopes.push_back({name, fit, target});
  return slopes.back();
}

bool ExperimentReport::passed() const {
  for (const auto& v : verdicts) {
    if (!v.passed) return false;
  }
  return true;
}

const Verdict* ExperimentReport::find_verdict(const std::string& name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

const SlopeRecord* ExperimentReport::find_slope(const std::string& name) const {
  for (const auto& s : slopes) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

Json ExperimentReport::to_json() const {
  Json doc = Json::object();
  doc["experiment_id"] = experiment_id;
  doc["params"] = params;
  doc["rows"] = Json::array();
  for (const auto& r : rows) doc["rows"].push_back(r);
  doc["slopes"] = Json::object();
  for (const auto& s : slopes) {
    Json entry = {{"slope", s.fit.slope}, {"halfwidth", s.fit.halfwidth},
                  {"intercept", s.fit.intercept}};
    if (s.target) entry["target"] = *s.target;
    doc["slopes"][s.name] = entry;
  }
  doc["verdicts"] = Json::object();
  for (const auto& v : verdicts) {
    doc["verdicts"][v.name] = {{"passed", v.passed},
                               {"value", v.value},
                               {"relation", v.relation},
                               {"threshold_key", v.threshold_key},
                               {"threshold", v.threshold}};
  }
  return doc;
}

std::string render_json(const Json& doc, int indent) {
  std::string out;
  render(doc, indent, 0, out);
  out += "\n";
  return out;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& path,
                  bool reproducible) {
  auto doc = report.to_json();
  if (!reproducible) doc["sidecar"] = {{"timestamp", utc_timestamp()}};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report to " + path.string());
  out << render_json(doc);
}

}  // namespace whitham
