#pragma once

#include <map>
#include <string>
#include <vector>

namespace metspace {

/// Machine-readable command report.  Serialization is deterministic: fixed
/// field order, fixed float formatting, no timestamps.
struct Report {
  int schema_version = 1;
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> anchors;  // math-topic slugs the command exercises
  std::vector<std::vector<std::pair<std::string, std::string>>> results;
  std::vector<std::string> violations;

  void add_config(const std::string& key, const std::string& value);
  void add_result(std::vector<std::pair<std::string, std::string>> row);

  std::string to_json() const;
  std::string to_csv() const;
};

std::string format_number(double v);

}  // namespace metspace
