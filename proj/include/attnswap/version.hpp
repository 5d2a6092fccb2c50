#pragma once

namespace attnswap {

constexpr const char* kToolVersion = "0.1.0";

}  // namespace attnswap
