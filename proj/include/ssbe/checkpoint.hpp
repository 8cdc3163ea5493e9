#pragma once

/// @file checkpoint.hpp
/// @brief Versioned binary parameter files.
///
/// Layout, all little-endian: "SSBECKPT", u32 version (1), u32 activation
/// (0 tanh, 1 relu3), u32 layer count, u32 sizes..., u64 parameter count,
/// f64 parameters in NetworkParams::data() order.

#include <string>

#include "ssbe/diffnet.hpp"

namespace ssbe {

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const NetworkParams& params, const std::string& path);
/// Throws Error for missing files, bad magic, unknown versions or truncation.
NetworkParams load_checkpoint(const std::string& path);

}  // namespace ssbe
