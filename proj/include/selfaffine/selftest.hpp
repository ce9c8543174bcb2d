#pragma once
// The acceptance suite. Each criterion yields a pass flag and a metrics
// object; the document holds no timings, so equal seeds give equal bytes.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "selfaffine/serialize.hpp"

namespace selfaffine {

inline constexpr int kCriterionCount = 12;

struct CriterionEvent {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  // Slowest single chaos-game render with its box fits (criterion 9 only).
  double max_render_seconds = 0.0;
};

struct SelftestOptions {
  std::uint64_t seed = 20261016;
  unsigned workers = 0;
  // Criterion ids to run; empty runs all. Criterion 12 reruns the others
  // (all of 1-11 when it is selected alone) with a different worker count
  // and compares the serialized documents.
  std::vector<int> criteria;
  std::function<void(const CriterionEvent&)> progress;
};

// {"suite", "seed", "criteria": [{"id", "name", "pass", "metrics"}], "all_pass"}
Json run_selftest(const SelftestOptions& options = {});

std::string criterion_name(int id);

}  // namespace selfaffine
