#include <cmath>

#include "doctest.h"

#include "bkhm/oracle.hpp"
#include "support.hpp"

using namespace bkhm;

TEST_CASE("oracle suite passes") {
    const auto reports = run_oracle_suite(20, 7);
    for (const auto& r : reports) {
        INFO(r.operation << ": " << r.max_rel_error);
        CHECK(r.pass);
    }
    CHECK(reports.size() >= 10);
}
