#pragma once

#include <json.hpp>

#include "t2m/fixtures.hpp"

namespace t2m {

struct SuiteOptions {
    std::uint64_t seed = 42;
    double tol_struct = 1e-10;  // structural identities (cocycles, roundtrips)
    double tol_fd = 1e-6;       // finite-difference comparisons at step 1e-4
    double tol_metric = 1e-8;   // identities routed through FD metric derivatives
    double tol_exact = 1e-12;   // identities exact up to rounding
};

// One verification record.  A regular check passes when residual <= tolerance;
// a witness check (must_exceed) passes when the residual is LARGE, asserting
// that a law genuinely fails where it should.  `error` carries the message of
// a check that raised instead of returning a residual.
struct CheckRecord {
    std::string check_id;
    std::string location;
    double residual = 0.0;
    double tolerance = 0.0;
    bool must_exceed = false;
    bool pass = false;
    std::string error;
};

struct SuiteReport {
    std::string fixture;
    std::string suite;
    SuiteOptions options;
    bool pass = true;
    std::vector<CheckRecord> checks;  // sorted by (check_id, location)
    double wall_ms = 0.0;

    // Machine-readable body; wall_ms is the last key so byte comparisons can
    // drop it without reparsing.
    nlohmann::ordered_json to_json() const;
    // Human summary table.
    std::string summary() const;
};

const std::vector<std::string>& suite_names();
bool is_suite_name(const std::string& name);

// Run one module suite (or "all") against a fixture.  Record sets and
// residuals depend only on the fixture and options; every check draws from
// its own generator seeded by (seed, check id, location), so reports are
// reproducible record-by-record.
SuiteReport run_suite(const Fixture& fx, const std::string& suite,
                      const SuiteOptions& opts = {});

}  // namespace t2m
