#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tfim/couplings.hpp"

namespace tfim {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);
/// Digest of the coupling matrix as written by write_couplings_csv.
std::string couplings_digest(const CouplingMatrix& couplings);

}  // namespace tfim
