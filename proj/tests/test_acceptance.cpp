#include <iostream>

#include "rswalk/acceptance.hpp"

int main() {
  int failed = 0;
  for (int k = 1; k <= rswalk::kCriterionCount; ++k) {
    const auto r = rswalk::run_criterion(k);
    std::cout << rswalk::format_result(r) << std::endl;
    failed += r.pass ? 0 : 1;
  }
  std::cout << (rswalk::kCriterionCount - failed) << "/" << rswalk::kCriterionCount << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
