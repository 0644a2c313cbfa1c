#pragma once

#include <string>
#include <string_view>

namespace repodomain {

// Hex-encoded SHA-256 digest. Backed by OpenSSL's EVP interface.
std::string sha256_hex(std::string_view data);

}  // namespace repodomain
