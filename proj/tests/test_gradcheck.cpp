#include "doctest.h"
#include "mimic/core/gradcheck.hpp"

using namespace mimic::core;

TEST_CASE("finite differences: every op, double precision") {
    for (const auto& r : gradcheck_ops_double()) {
        INFO(r.name);
        CHECK(r.max_rel_err < 1e-5);
    }
}

TEST_CASE("finite differences: every op, single precision") {
    for (const auto& r : gradcheck_ops_float()) {
        INFO(r.name);
        CHECK(r.max_rel_err < 1e-3);
    }
}
