// One line per acceptance criterion; exit status 1 if any fails.

#include <cstdio>

#include "cvmet/claims.hpp"

int main() {
  const cvmet::RunConfig cfg = cvmet::parse_config("");
  int failed = 0;
  for (const cvmet::ClaimResult& r : cvmet::run_claims(cfg)) {
    std::printf("[%s] criterion %d: %s (%.1f s) -- %s\n", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
  }
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
