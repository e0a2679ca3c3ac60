// Acceptance gate: one line per criterion, non-zero exit if any fails.
#include <cstdio>

#include "scooter/acceptance.hpp"

int main() {
  const auto results = scooter::run_acceptance();
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] %2d %-34s %s (%.3f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    if (!r.passed) ++failed;
  }
  std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}
