#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "toric/functionals.hpp"

namespace toric {

struct VerifyConfig {
  std::uint64_t seed = 0;
  std::size_t nodes = 2048;
  std::size_t instances = 100;
  std::string only;       // empty = every item
  std::size_t dimension = 0;  // 0 = the item's default dimensions
};

struct VerifyReport {
  std::vector<Verdict> verdicts;
  nlohmann::json observations = nlohmann::json::object();
  bool all_passed() const;
};

/// Suite item names, in run order.
const std::vector<std::string>& verify_items();

/// Runs the selected items on builtin and seeded random instances.
VerifyReport run_verify(const VerifyConfig& config);

nlohmann::json to_json(const VerifyReport& r);

}  // namespace toric
