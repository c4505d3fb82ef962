#pragma once

namespace backoff::calibration {

// Empirical constants for the two protocols whose makespan is known only up
// to a constant factor. Each was measured once with
//   backoffsim experiment makespan --protocol {stb,llb} --n 4096 --trials 200 --seed 1
// and frozen here as 2x the observed mean (the flat-ratio acceptance check
// bounds the drift across n by a factor of 4, so the margin is ample).
//
// stb: mean makespan / n at n = 4096 was 6.9954.
// llb: mean makespan / (n lglg n / lglglg n) at n = 4096 was 3.4825.

inline constexpr double kStbMakespanPerPacket = 14.0;
inline constexpr double kLlbMakespanFactor = 7.0;

}  // namespace backoff::calibration
