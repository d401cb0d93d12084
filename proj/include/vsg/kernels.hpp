#pragma once

// Data-parallel kernels. Each has an OpenMP version used by the library and a
// plain serial version kept as the reference for tests and benchmarks.

#include "vsg/tokens.hpp"
#include "vsg/types.hpp"

#include <map>
#include <span>
#include <vector>

namespace vsg::kernels {

ScoreVolume coverage_scores_parallel(const std::map<FrameIndex, BinaryMask>& masks,
                                     const TokenGridSpec& spec);

/// Row-major |a| x |b| matrix of spatiotemporal IoU.
std::vector<double> stiou_matrix_parallel(std::span<const Trajectory> a,
                                          std::span<const Trajectory> b);

} // namespace vsg::kernels

namespace vsg::reference {

/// Per-pixel, per-frame scan over decoded masks.
ScoreVolume coverage_scores_serial(const std::map<FrameIndex, BinaryMask>& masks,
                                   const TokenGridSpec& spec);

std::vector<double> stiou_matrix_serial(std::span<const Trajectory> a,
                                        std::span<const Trajectory> b);

} // namespace vsg::reference
