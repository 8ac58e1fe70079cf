#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "nhc/validation.hpp"

using namespace nhc;

TEST_CASE("fast suite passes and is reproducible") {
  ValidationOptions o;
  const auto a = run_validation(o);
  CHECK(a.size() == 6);
  CHECK(all_passed(a));
  const auto b = run_validation(o);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].value == b[i].value);
  }
}

TEST_CASE("injected fault fails the metric check") {
  ValidationOptions o;
  o.inject_fault = true;
  const auto r = run_validation(o);
  CHECK_FALSE(all_passed(r));
  CHECK(r[0].name == "geometry.metric");
  CHECK_FALSE(r[0].passed);
  CHECK(r[0].detail.find("G Omega G = Omega") != std::string::npos);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i].passed);
}

TEST_CASE("table layout") {
  CheckResult pass{"a", "inv", true, false, 1e-12, 1e-9, "d", 0.5};
  CheckResult info{"b", "inv", true, true, 3.0, 0.0, "", 0.0};
  const std::string t = format_table({pass, info});
  CHECK(t.rfind("name\tstatus\tvalue\tthreshold\tseconds\tinvariant\tdetail\n", 0) == 0);
  CHECK(t.find("a\tPASS\t1e-12\t1e-09\t0.500\tinv\td\n") != std::string::npos);
  CHECK(t.find("b\tINFO\t") != std::string::npos);
  CHECK(validation_level_from_string("full") == ValidationLevel::full);
  CHECK_THROWS(validation_level_from_string("slow"));
}
