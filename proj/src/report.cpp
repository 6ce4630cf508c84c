#include "metspace/report.hpp"

#include <json.hpp>

#include <cstdio>

namespace metspace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void Report::add_config(const std::string& key, const std::string& value) {
  config.emplace_back(key, value);
}

void Report::add_result(std::vector<std::pair<std::string, std::string>> row) {
  results.push_back(std::move(row));
}

std::string Report::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = schema_version;
  j["command"] = command;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  j["anchors"] = anchors;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : results) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (const auto& [k, v] : row) r[k] = v;
    rows.push_back(r);
  }
  j["results"] = rows;
  j["violations"] = violations;
  return j.dump(2) + "\n";
}

std::string Report::to_csv() const {
  std::string out;
  if (results.empty()) return out;
  const auto& head = results.front();
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (i) out += ",";
    out += head[i].first;
  }
  out += "\n";
  for (const auto& row : results) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += row[i].second;
    }
    out += "\n";
  }
  return out;
}

}  // namespace metspace
