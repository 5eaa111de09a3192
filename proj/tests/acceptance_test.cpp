// Acceptance gate: runs every registered verification check and prints one
// pass/fail line per criterion.  Exits nonzero if any check fails.

#include <cstdio>
#include <cstdlib>

#include "fanlab/verification.hpp"

int main() {
  int threads = 1;
  if (const char* env = std::getenv("FANLAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) threads = v;
  }
  std::vector<fanlab::CheckResult> results;
  try {
    results = fanlab::run_acceptance("all", threads);
  } catch (const fanlab::Error& e) {
    std::fprintf(stderr, "acceptance run aborted: %s\n", e.what());
    return 2;
  }
  bool all_passed = true;
  for (const fanlab::CheckResult& r : results) {
    std::printf("[%s] %s — %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    all_passed = all_passed && r.passed;
  }
  std::printf("%zu/%zu criteria passed\n",
              static_cast<std::size_t>(
                  std::count_if(results.begin(), results.end(),
                                [](const fanlab::CheckResult& r) { return r.passed; })),
              results.size());
  return all_passed ? 0 : 1;
}
