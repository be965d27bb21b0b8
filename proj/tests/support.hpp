#pragma once

#include "oracles.hpp"

#include <collatz/collatz.hpp>

#include <string>

namespace support {

inline std::string fixture(const std::string& name) { return std::string(COLLATZ_FIXTURES) + "/" + name; }
inline std::string data_file(const std::string& name) { return std::string(COLLATZ_DATA) + "/" + name; }

inline std::vector<collatz::ClassBlock> fixture_blocks(const std::string& name) {
    return collatz::parse_blocks(oracle::slurp(fixture(name)));
}

inline collatz::Term T(std::uint64_t v) { return collatz::Term(v); }

} // namespace support
