#pragma once

#include "networth/network.hpp"

#include <vector>

namespace networth {

/// Megabytes and kilobytes to Mbit (decimal units, 8 bits per byte).
inline constexpr double mbyte_to_mbit(double mb) { return mb * 8.0; }
inline constexpr double kbyte_to_mbit(double kb) { return kb * 8.0 / 1000.0; }

/// The six reference application profiles: two hard-real-time (voice,
/// video-phone), one real-time (interactive multimedia) and three elastic
/// (e-mail, remote login, file transfer).
std::vector<TrafficProfile> builtin_profiles();

}  // namespace networth
