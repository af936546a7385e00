#ifndef LAB_SELFTEST_HPP
#define LAB_SELFTEST_HPP

#include <string>
#include <vector>

namespace lab::selftest {

struct CriterionResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

// Runs the full acceptance suite; one result per criterion.
std::vector<CriterionResult> run_all();

} // namespace lab::selftest

#endif
