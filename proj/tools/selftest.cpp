#include "oracles/suite.hpp"

#include <iomanip>
#include <ostream>

int run_selftest(std::ostream& out) {
  const auto results = snc::oracle::run_oracle_suite();
  bool all = true;
  for (const auto& r : results) {
    out << (r.ok ? "PASS " : "FAIL ") << std::left << std::setw(22) << r.name << " comparisons "
        << std::setw(8) << r.comparisons << " max error " << std::setprecision(3) << r.max_error << '\n';
    all = all && r.ok;
  }
  return all ? 0 : 1;
}
