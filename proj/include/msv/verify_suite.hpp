#pragma once

// Self-checks behind `msv verify`: brute-force oracle comparisons on small
// synthetic inputs, validity of greedy runs under every split strategy, and
// a golden replay that pins the deterministic output of a tie-heavy search.

#include <cstdint>
#include <string>
#include <vector>

#include "msv/greedy.hpp"

namespace msv {

struct VerifyOptions {
  TieBreak tie_break = TieBreak::kLowestIndex;
  std::uint64_t seed = 0;
  int beta = 16;              // used by the validity cases
  std::size_t fuzz_cases = 24;
};

struct VerifyCase {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCase> cases;
  bool passed() const;
};

VerifyReport run_verify_suite(const VerifyOptions& opt = {});

}  // namespace msv
