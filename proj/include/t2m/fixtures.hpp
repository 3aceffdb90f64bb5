#pragma once

#include "t2m/config.hpp"

namespace t2m {

struct FixtureInfo {
    std::string name;
    std::string description;
};

// Names and descriptions of the shipped fixtures, clean ones first.
std::vector<FixtureInfo> builtin_fixtures();

bool is_builtin_fixture(const std::string& name);

// The fixture document as shipped; ConfigError for an unknown name.
nlohmann::json builtin_fixture_json(const std::string& name);

Fixture load_builtin_fixture(const std::string& name);

}  // namespace t2m
