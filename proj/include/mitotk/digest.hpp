#pragma once

#include <string>
#include <string_view>

namespace mitotk {

// SHA-256 as 64 lowercase hex chars.
std::string sha256_hex(std::string_view data);

} // namespace mitotk
